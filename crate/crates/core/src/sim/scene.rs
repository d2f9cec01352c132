//! Random building scenes used as clean masks for desk-scale runs.

use rand::Rng;

use crate::mask::{rasterize, Affine, BinaryMask, PolygonRing};
use crate::seed::sample_stream;

/// Draws a clean mask with 0 to 10 buildings: axis-aligned boxes, rotated
/// boxes and L-shapes, each up to a third of the canvas across. About one
/// scene in twelve is empty.
pub fn random_scene(width: usize, height: usize, seed: u64, sample_id: &str) -> BinaryMask {
    let mut rng = sample_stream(seed, "scene", sample_id);
    let n_buildings = if rng.random_bool(1.0 / 12.0) {
        0
    } else {
        rng.random_range(1..=10)
    };
    let max_side = (width.min(height) as f64 / 3.0).max(3.0);
    let min_side = (max_side / 6.0).max(2.0);
    let mut rings = Vec::with_capacity(n_buildings);
    for _ in 0..n_buildings {
        let bw = rng.random_range(min_side..=max_side);
        let bh = rng.random_range(min_side..=max_side);
        let cx = rng.random_range(0.0..width as f64);
        let cy = rng.random_range(0.0..height as f64);
        let (hw, hh) = (bw / 2.0, bh / 2.0);
        let outline: Vec<(f64, f64)> = match rng.random_range(0..3) {
            0 | 1 => vec![(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)],
            _ => {
                let (nx, ny) = (
                    rng.random_range(0.3..0.7) * bw,
                    rng.random_range(0.3..0.7) * bh,
                );
                vec![
                    (-hw, -hh),
                    (-hw + nx, -hh),
                    (-hw + nx, -hh + ny),
                    (hw, -hh + ny),
                    (hw, hh),
                    (-hw, hh),
                ]
            }
        };
        let angle = if rng.random_bool(0.5) {
            rng.random_range(-45.0..45.0)
        } else {
            0.0
        };
        let rot = Affine::rotation_degrees(angle);
        let vertices = outline
            .into_iter()
            .map(|(x, y)| {
                let (rx, ry) = rot.apply(x, y);
                (rx + cx, ry + cy)
            })
            .collect();
        if let Ok(ring) = PolygonRing::new(vertices) {
            rings.push(ring);
        }
    }
    rasterize(&rings, width, height).expect("positive canvas")
}
