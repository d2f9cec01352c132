//! Outer-boundary tracing and even-odd polygon rasterization.
//!
//! Coordinates are continuous pixel space: `x` runs along columns, `y` along
//! rows, and pixel `(r, c)` covers `[c, c + 1] x [r, r + 1]`.

use super::{BinaryMask, Component};
use crate::error::{Error, Result};

/// Closed polygon in pixel space. The closing edge from the last vertex back
/// to the first is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonRing {
    vertices: Vec<(f64, f64)>,
}

impl PolygonRing {
    /// Needs at least three vertices and no two consecutive duplicates
    /// (including last/first).
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::invalid(format!(
                "polygon ring needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(Error::invalid(format!(
                    "consecutive duplicate vertex at index {i}"
                )));
            }
        }
        if vertices
            .iter()
            .any(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::invalid("non-finite polygon vertex"));
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned rectangle with corners `(x0, y0)` and `(x1, y1)`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1` (wrapping).
    pub fn edge(&self, i: usize) -> ((f64, f64), (f64, f64)) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    /// Shoelace area, signed by orientation.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut acc = 0.0;
        for i in 0..n {
            let (x0, y0) = self.vertices[i];
            let (x1, y1) = self.vertices[(i + 1) % n];
            acc += x0 * y1 - x1 * y0;
        }
        acc / 2.0
    }

    /// Inserts `vertex` after index `after`. Rejects a point equal to either
    /// neighbour.
    pub fn insert_after(&mut self, after: usize, vertex: (f64, f64)) -> Result<()> {
        let n = self.vertices.len();
        let (a, b) = self.edge(after);
        if vertex == a || vertex == b || !vertex.0.is_finite() || !vertex.1.is_finite() {
            return Err(Error::invalid(
                "inserted vertex coincides with an edge endpoint",
            ));
        }
        self.vertices.insert((after % n) + 1, vertex);
        Ok(())
    }
}

// Directions in clockwise order as displayed (y grows downward).
const EAST: u8 = 0;
const SOUTH: u8 = 1;
const WEST: u8 = 2;
const NORTH: u8 = 3;

fn step(dir: u8) -> (isize, isize) {
    match dir {
        EAST => (1, 0),
        SOUTH => (0, 1),
        WEST => (-1, 0),
        _ => (0, -1),
    }
}

fn left_of(dir: u8) -> u8 {
    (dir + 3) % 4
}

/// Traces the outer boundary of `component` along pixel edges.
///
/// The walk keeps the component on its right-hand side. Where two pixels
/// touch only at a corner the walk turns toward the other pixel, so the ring
/// wraps the whole 8-connected object. Interior holes are not reported, and
/// collinear runs are merged so only corners remain.
pub fn trace_boundary(component: &Component) -> PolygonRing {
    let bbox = component.bbox();
    let (w, h) = (bbox.width(), bbox.height());
    // one pixel of background padding on every side
    let (pw, ph) = (w + 2, h + 2);
    let mut grid = vec![false; pw * ph];
    for &(r, c) in component.pixels() {
        grid[(r - bbox.min_row + 1) * pw + (c - bbox.min_col + 1)] = true;
    }
    let fg = |r: usize, c: usize| grid[r * pw + c];

    // outgoing edge directions per lattice vertex
    let vw = pw + 1;
    let mut out = vec![0u8; vw * (ph + 1)];
    for r in 1..=h {
        for c in 1..=w {
            if !fg(r, c) {
                continue;
            }
            if !fg(r - 1, c) {
                out[r * vw + c] |= 1 << EAST;
            }
            if !fg(r, c + 1) {
                out[r * vw + c + 1] |= 1 << SOUTH;
            }
            if !fg(r + 1, c) {
                out[(r + 1) * vw + c + 1] |= 1 << WEST;
            }
            if !fg(r, c - 1) {
                out[(r + 1) * vw + c] |= 1 << NORTH;
            }
        }
    }

    // top-left corner of the first pixel in row-major order is never a pinch
    let (r0, c0) = component.pixels()[0];
    let start = (c0 - bbox.min_col + 1, r0 - bbox.min_row + 1);
    let mut pos = start;
    let mut heading = NORTH;
    let mut corners = Vec::new();
    loop {
        let choices = out[pos.1 * vw + pos.0];
        let next = if choices.count_ones() == 1 {
            choices.trailing_zeros() as u8
        } else {
            let turn = left_of(heading);
            debug_assert!(choices & (1 << turn) != 0, "pinch vertex without left exit");
            turn
        };
        if next != heading {
            corners.push(pos);
        }
        heading = next;
        let (dx, dy) = step(heading);
        pos = (
            (pos.0 as isize + dx) as usize,
            (pos.1 as isize + dy) as usize,
        );
        if pos == start {
            break;
        }
    }

    let x_off = bbox.min_col as f64 - 1.0;
    let y_off = bbox.min_row as f64 - 1.0;
    let vertices = corners
        .into_iter()
        .map(|(x, y)| (x as f64 + x_off, y as f64 + y_off))
        .collect();
    PolygonRing::new(vertices).expect("traced ring has at least four corners")
}

/// Rasterizes `rings` onto a `width x height` canvas.
///
/// Pixel `(r, c)` is set when its centre `(c + 0.5, r + 0.5)` lies inside at
/// least one ring under the even-odd rule. Zero-area rings contribute nothing.
pub fn rasterize(rings: &[PolygonRing], width: usize, height: usize) -> Result<BinaryMask> {
    if width == 0 || height == 0 {
        return Err(Error::invalid(format!(
            "canvas dimensions must be positive, got {width}x{height}"
        )));
    }
    let mut mask = BinaryMask::new(width, height);
    let mut crossings = Vec::new();
    for ring in rings {
        if ring.signed_area().abs() < 1e-12 {
            continue;
        }
        let (lo, hi) = ring
            .vertices()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| {
                (lo.min(y), hi.max(y))
            });
        let r_start = (lo - 0.5).ceil().max(0.0) as usize;
        let r_end = ((hi - 0.5).floor() + 1.0).clamp(0.0, height as f64) as usize;
        for r in r_start..r_end {
            let y = r as f64 + 0.5;
            crossings.clear();
            for i in 0..ring.len() {
                let ((x0, y0), (x1, y1)) = ring.edge(i);
                // half-open in y so shared vertices count once
                if (y0 <= y && y < y1) || (y1 <= y && y < y0) {
                    crossings.push(x0 + (y - y0) * (x1 - x0) / (y1 - y0));
                }
            }
            crossings.sort_by(f64::total_cmp);
            for span in crossings.chunks_exact(2) {
                // centres strictly inside (x_a, x_b)
                let c_start = (span[0] - 0.5).floor() + 1.0;
                let c_end = (span[1] - 0.5).ceil();
                let c_start = c_start.clamp(0.0, width as f64) as usize;
                let c_end = c_end.clamp(0.0, width as f64) as usize;
                for c in c_start..c_end {
                    mask.set(r, c, true);
                }
            }
        }
    }
    Ok(mask)
}
