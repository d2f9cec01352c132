use super::{BinaryMask, Component};
use crate::error::{Error, Result};

/// 2x3 affine map on `(x, y) = (col, row)` pixel-space points:
/// `x' = a*x + b*y + tx`, `y' = c*x + d*y + ty`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub m: [[f64; 3]; 2],
}

impl Affine {
    pub const IDENTITY: Affine = Affine {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
    };

    pub fn new(m: [[f64; 3]; 2]) -> Self {
        Self { m }
    }

    pub fn scale(sx: f64, sy: f64) -> Self {
        Self::new([[sx, 0.0, 0.0], [0.0, sy, 0.0]])
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Self::new([[1.0, 0.0, dx], [0.0, 1.0, dy]])
    }

    /// Rotation by `degrees`, counter-clockwise as displayed (rows grow downward).
    pub fn rotation_degrees(degrees: f64) -> Self {
        let (s, c) = degrees.to_radians().sin_cos();
        Self::new([[c, s, 0.0], [-s, c, 0.0]])
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let [[a, b, tx], [c, d, ty]] = self.m;
        (a * x + b * y + tx, c * x + d * y + ty)
    }

    pub fn determinant(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Result<Affine> {
        let det = self.determinant();
        if !det.is_finite() || det.abs() < 1e-12 || self.m.iter().flatten().any(|v| !v.is_finite())
        {
            return Err(Error::DegenerateTransform);
        }
        let [[a, b, tx], [c, d, ty]] = self.m;
        let (ia, ib, ic, id) = (d / det, -b / det, -c / det, a / det);
        Ok(Self::new([
            [ia, ib, -(ia * tx + ib * ty)],
            [ic, id, -(ic * tx + id * ty)],
        ]))
    }
}

/// Footprint of `component` after applying `matrix` about `anchor` (`(row, col)`
/// in pixel-index units, i.e. the anchor point is the centre of that pixel).
///
/// Output pixels are found by inverse mapping: an output pixel is kept when
/// its centre maps back into a pixel of the component. The result is clipped
/// to the mask and sorted row-major.
pub fn transform_component(
    mask: &BinaryMask,
    component: &Component,
    matrix: &Affine,
    anchor: (f64, f64),
) -> Result<Vec<(usize, usize)>> {
    let inverse = matrix.inverse()?;
    let (ax, ay) = (anchor.1 + 0.5, anchor.0 + 0.5);
    let forward = |x: f64, y: f64| {
        let (tx, ty) = matrix.apply(x - ax, y - ay);
        (tx + ax, ty + ay)
    };

    let bbox = component.bbox();
    let (x0, y0) = (bbox.min_col as f64, bbox.min_row as f64);
    let (x1, y1) = (bbox.max_col as f64 + 1.0, bbox.max_row as f64 + 1.0);
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for (x, y) in [(x0, y0), (x1, y0), (x1, y1), (x0, y1)] {
        let (tx, ty) = forward(x, y);
        lo_x = lo_x.min(tx);
        lo_y = lo_y.min(ty);
        hi_x = hi_x.max(tx);
        hi_y = hi_y.max(ty);
    }
    let (w, h) = mask.dims();
    let clamp_lo = |v: f64, n: usize| (v.floor() - 1.0).clamp(0.0, n as f64) as usize;
    let clamp_hi = |v: f64, n: usize| (v.ceil() + 1.0).clamp(0.0, n as f64) as usize;
    let (c_start, c_end) = (clamp_lo(lo_x, w), clamp_hi(hi_x, w));
    let (r_start, r_end) = (clamp_lo(lo_y, h), clamp_hi(hi_y, h));

    let bits = component.local_bitmap();
    let bw = bbox.width();
    let mut out = Vec::new();
    for r in r_start..r_end {
        for c in c_start..c_end {
            let (sx, sy) = inverse.apply(c as f64 + 0.5 - ax, r as f64 + 0.5 - ay);
            let (sx, sy) = ((sx + ax).floor(), (sy + ay).floor());
            if sx < x0 || sy < y0 || sx >= x1 || sy >= y1 {
                continue;
            }
            let (lr, lc) = (sy as usize - bbox.min_row, sx as usize - bbox.min_col);
            if bits[lr * bw + lc] {
                out.push((r, c));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::connected_components;

    fn square(size: usize, top: usize, left: usize, canvas: usize) -> BinaryMask {
        BinaryMask::from_coords(
            canvas,
            canvas,
            (top..top + size).flat_map(|r| (left..left + size).map(move |c| (r, c))),
        )
    }

    #[test]
    fn identity_is_noop() {
        let m = BinaryMask::from_ascii("....\n.##.\n..#.\n....\n").unwrap();
        let comp = &connected_components(&m)[0];
        let out = transform_component(&m, comp, &Affine::IDENTITY, comp.centroid()).unwrap();
        assert_eq!(out, comp.pixels());
    }

    #[test]
    fn doubling_a_three_square() {
        let m = square(3, 10, 10, 32);
        let comp = &connected_components(&m)[0];
        let out = transform_component(&m, comp, &Affine::scale(2.0, 2.0), comp.centroid()).unwrap();
        assert_eq!(out.len(), 36);
        let rows: Vec<_> = out.iter().map(|p| p.0).collect();
        let cols: Vec<_> = out.iter().map(|p| p.1).collect();
        assert_eq!(
            (*rows.iter().min().unwrap(), *rows.iter().max().unwrap()),
            (8, 13)
        );
        assert_eq!(
            (*cols.iter().min().unwrap(), *cols.iter().max().unwrap()),
            (8, 13)
        );
    }

    #[test]
    fn far_translation_is_clipped_away() {
        let m = square(5, 100, 100, 256);
        let comp = &connected_components(&m)[0];
        let out = transform_component(
            &m,
            comp,
            &Affine::translation(300.0, 300.0),
            comp.centroid(),
        )
        .unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = square(2, 1, 1, 8);
        let comp = &connected_components(&m)[0];
        let err = transform_component(&m, comp, &Affine::scale(0.0, 1.0), (0.0, 0.0)).unwrap_err();
        assert_eq!(err.to_string(), "degenerate transform");
    }

    #[test]
    fn inverse_composes_to_identity() {
        let a = Affine::new([[1.3, 0.4, 2.0], [-0.2, 0.9, -5.0]]);
        let inv = a.inverse().unwrap();
        let (x, y) = a.apply(3.0, 7.0);
        let (bx, by) = inv.apply(x, y);
        assert!((bx - 3.0).abs() < 1e-12 && (by - 7.0).abs() < 1e-12);
    }
}
