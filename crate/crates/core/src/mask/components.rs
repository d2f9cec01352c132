use super::BinaryMask;

/// Inclusive pixel bounds of a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub min_row: usize,
    pub max_row: usize,
    pub min_col: usize,
    pub max_col: usize,
}

impl BoundingBox {
    pub fn height(&self) -> usize {
        self.max_row - self.min_row + 1
    }

    pub fn width(&self) -> usize {
        self.max_col - self.min_col + 1
    }

    /// Length of the box diagonal in pixels.
    pub fn diagonal(&self) -> f64 {
        (self.width() as f64).hypot(self.height() as f64)
    }
}

/// One 8-connected building: its pixels (row-major sorted), bounds and centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pixels: Vec<(usize, usize)>,
    bbox: BoundingBox,
    centroid: (f64, f64),
}

impl Component {
    /// Wraps a non-empty pixel set. Connectivity is not checked; callers
    /// outside [`connected_components`] are trusted to pass one object.
    pub fn from_pixels(mut pixels: Vec<(usize, usize)>) -> Option<Self> {
        if pixels.is_empty() {
            return None;
        }
        pixels.sort_unstable();
        pixels.dedup();
        let mut bbox = BoundingBox {
            min_row: usize::MAX,
            max_row: 0,
            min_col: usize::MAX,
            max_col: 0,
        };
        let (mut sr, mut sc) = (0.0, 0.0);
        for &(r, c) in &pixels {
            bbox.min_row = bbox.min_row.min(r);
            bbox.max_row = bbox.max_row.max(r);
            bbox.min_col = bbox.min_col.min(c);
            bbox.max_col = bbox.max_col.max(c);
            sr += r as f64;
            sc += c as f64;
        }
        let n = pixels.len() as f64;
        Some(Self {
            pixels,
            bbox,
            centroid: (sr / n, sc / n),
        })
    }

    pub fn pixels(&self) -> &[(usize, usize)] {
        &self.pixels
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    /// Mean `(row, col)` of the member pixels.
    pub fn centroid(&self) -> (f64, f64) {
        self.centroid
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.pixels.binary_search(&(row, col)).is_ok()
    }

    /// Bitmap over the bounding box, row-major, `bbox.width()` columns.
    pub(crate) fn local_bitmap(&self) -> Vec<bool> {
        let (w, h) = (self.bbox.width(), self.bbox.height());
        let mut bits = vec![false; w * h];
        for &(r, c) in &self.pixels {
            bits[(r - self.bbox.min_row) * w + (c - self.bbox.min_col)] = true;
        }
        bits
    }

    /// Component with every pixel shifted so the bbox starts at `(row, col)`.
    pub fn moved_to(&self, row: usize, col: usize) -> Component {
        let pixels = self
            .pixels
            .iter()
            .map(|&(r, c)| (r - self.bbox.min_row + row, c - self.bbox.min_col + col))
            .collect();
        Component::from_pixels(pixels).expect("non-empty")
    }
}

const NEIGHBOURS_8: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// Splits the foreground into 8-connected components, ordered by the
/// `(min_row, min_col)` of their bounding boxes.
pub fn connected_components(mask: &BinaryMask) -> Vec<Component> {
    let (w, h) = mask.dims();
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();

    for start in 0..w * h {
        if !mask.pixels()[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        while let Some(idx) = stack.pop() {
            let (r, c) = (idx / w, idx % w);
            pixels.push((r, c));
            for (dr, dc) in NEIGHBOURS_8 {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                    continue;
                }
                let n = nr as usize * w + nc as usize;
                if mask.pixels()[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        out.push(Component::from_pixels(pixels).expect("seeded with one pixel"));
    }

    // scan order already sorts by min_row; stable sort fixes min_col
    out.sort_by_key(|c| (c.bbox.min_row, c.bbox.min_col));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_mask_has_no_components() {
        assert!(connected_components(&BinaryMask::new(4, 4)).is_empty());
    }

    #[test]
    fn diagonal_pixels_join() {
        let m = BinaryMask::from_coords(4, 4, [(0, 0), (1, 1)]);
        let comps = connected_components(&m);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].area(), 2);
    }

    #[test]
    fn separated_pixels_split() {
        let m = BinaryMask::from_coords(4, 4, [(0, 0), (0, 3)]);
        let comps = connected_components(&m);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].pixels(), &[(0, 0)]);
        assert_eq!(comps[1].pixels(), &[(0, 3)]);
    }

    #[test]
    fn ordering_uses_bbox_min_col() {
        // the second object is reached later by the scan but its bbox starts further left
        let m = BinaryMask::from_ascii(
            "
            ..#.#
            ....#
            ...#.
            ###..
            ",
        )
        .unwrap();
        let comps = connected_components(&m);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].bbox().min_col, 0);
        assert_eq!(comps[0].area(), 6);
        assert_eq!(comps[1].pixels(), &[(0, 2)]);
    }

    #[test]
    fn centroid_and_bbox() {
        let c = Component::from_pixels(vec![(2, 2), (2, 3), (3, 2), (3, 3)]).unwrap();
        assert_eq!(c.centroid(), (2.5, 2.5));
        let b = c.bbox();
        assert_eq!((b.width(), b.height()), (2, 2));
        assert!(c.contains(3, 3) && !c.contains(4, 4));
        assert_eq!(c.moved_to(0, 0).pixels(), &[(0, 0), (0, 1), (1, 0), (1, 1)]);
    }
}
