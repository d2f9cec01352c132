//! The seven noise operators. Stochastic operators come in pairs: a
//! sampling entry point that records what it drew, and a deterministic
//! applier that replays a recorded draw.

use rand::Rng;

use super::{
    Axis, ShapeBank, ShapePlacement, SkippedShape, VertexPlacement, DELETION_RATIO_LIMITS,
    FALSE_POSITIVE_LIMITS, ROTATION_LIMITS, SCALE_FACTOR_LIMITS, TRANSLATION_LIMITS,
    VERTEX_COUNT_LIMITS,
};
use crate::error::{check_range, Error, Result};
use crate::mask::{
    connected_components, rasterize, trace_boundary, transform_component, Affine, BinaryMask,
    PolygonRing,
};

/// Largest vertex displacement as a fraction of the host component's bbox diagonal.
pub const VERTEX_OFFSET_FRACTION: f64 = 0.1;

fn transform_each(mask: &BinaryMask, affine: &Affine) -> Result<BinaryMask> {
    let (w, h) = mask.dims();
    let mut out = BinaryMask::new(w, h);
    for comp in connected_components(mask) {
        for (r, c) in transform_component(mask, &comp, affine, comp.centroid())? {
            out.set(r, c, true);
        }
    }
    Ok(out)
}

/// Scales every building by `factor` about its own centroid.
pub fn global_scale(mask: &BinaryMask, factor: f64) -> Result<BinaryMask> {
    check_range(
        "scale factor",
        factor,
        SCALE_FACTOR_LIMITS.0,
        SCALE_FACTOR_LIMITS.1,
    )?;
    transform_each(mask, &Affine::scale(factor, factor))
}

/// Scales every building along one axis about its own centroid.
pub fn one_sided_scale(mask: &BinaryMask, axis: Axis, factor: f64) -> Result<BinaryMask> {
    check_range(
        "scale factor",
        factor,
        SCALE_FACTOR_LIMITS.0,
        SCALE_FACTOR_LIMITS.1,
    )?;
    let affine = match axis {
        Axis::Horizontal => Affine::scale(factor, 1.0),
        Axis::Vertical => Affine::scale(1.0, factor),
    };
    transform_each(mask, &affine)
}

/// Rotates every building by `angle` degrees about its own centroid.
pub fn rotate(mask: &BinaryMask, angle: f64) -> Result<BinaryMask> {
    check_range(
        "rotation angle",
        angle,
        ROTATION_LIMITS.0,
        ROTATION_LIMITS.1,
    )?;
    transform_each(mask, &Affine::rotation_degrees(angle))
}

/// Shifts the whole annotation by `dx` columns and `dy` rows; pixels pushed
/// off the canvas are lost.
pub fn translate(mask: &BinaryMask, dx: i32, dy: i32) -> Result<BinaryMask> {
    let (lo, hi) = (TRANSLATION_LIMITS.0 as f64, TRANSLATION_LIMITS.1 as f64);
    check_range("dx", dx as f64, lo, hi)?;
    check_range("dy", dy as f64, lo, hi)?;
    let (w, h) = mask.dims();
    let mut out = BinaryMask::new(w, h);
    for (r, c) in mask.coords() {
        let (nr, nc) = (r as i64 + dy as i64, c as i64 + dx as i64);
        if nr >= 0 && nc >= 0 && (nr as usize) < h && (nc as usize) < w {
            out.set(nr as usize, nc as usize, true);
        }
    }
    Ok(out)
}

/// Removes `round(ratio * m)` of the `m` buildings (at least one when
/// `m >= 1`), chosen uniformly without replacement. Returns the sorted
/// removed component indices.
pub fn delete_components<R: Rng + ?Sized>(
    mask: &BinaryMask,
    ratio: f64,
    rng: &mut R,
) -> Result<(BinaryMask, Vec<usize>)> {
    check_range(
        "deletion ratio",
        ratio,
        DELETION_RATIO_LIMITS.0,
        DELETION_RATIO_LIMITS.1,
    )?;
    let m = connected_components(mask).len();
    if m == 0 {
        return Ok((mask.clone(), Vec::new()));
    }
    let k = ((ratio * m as f64).round() as usize).clamp(1, m);
    let mut picked = rand::seq::index::sample(rng, m, k).into_vec();
    picked.sort_unstable();
    let out = remove_components(mask, &picked)?;
    Ok((out, picked))
}

/// Clears the listed components (indices into [`connected_components`] order).
pub fn remove_components(mask: &BinaryMask, indices: &[usize]) -> Result<BinaryMask> {
    let comps = connected_components(mask);
    let mut out = mask.clone();
    for &i in indices {
        let comp = comps.get(i).ok_or_else(|| {
            Error::invalid(format!(
                "component index {i} out of range ({} components)",
                comps.len()
            ))
        })?;
        for &(r, c) in comp.pixels() {
            out.set(r, c, false);
        }
    }
    Ok(out)
}

fn insert_vertex(ring: &mut PolygonRing, edge: usize, offset: f64) -> Result<()> {
    if edge >= ring.len() || !offset.is_finite() {
        return Err(Error::invalid(format!(
            "vertex placement edge {edge} / offset {offset} invalid for a {}-vertex ring",
            ring.len()
        )));
    }
    let ((x0, y0), (x1, y1)) = ring.edge(edge);
    let (dx, dy) = (x1 - x0, y1 - y0);
    let len = dx.hypot(dy);
    let (nx, ny) = (-dy / len, dx / len);
    let mid = ((x0 + x1) / 2.0 + offset * nx, (y0 + y1) / 2.0 + offset * ny);
    ring.insert_after(edge, mid)
}

/// Adds `n_vertices` contour vertices, assigned to buildings round-robin.
/// Each goes on a uniformly drawn edge of the current ring, at the edge
/// midpoint pushed along the normal by up to 10% of the building's bbox
/// diagonal either way. All rings are then re-rasterized, so interior holes
/// are filled.
pub fn add_vertices<R: Rng + ?Sized>(
    mask: &BinaryMask,
    n_vertices: u32,
    rng: &mut R,
) -> Result<(BinaryMask, Vec<VertexPlacement>)> {
    check_range(
        "vertex count",
        n_vertices as f64,
        VERTEX_COUNT_LIMITS.0 as f64,
        VERTEX_COUNT_LIMITS.1 as f64,
    )?;
    let comps = connected_components(mask);
    if comps.is_empty() {
        return Ok((mask.clone(), Vec::new()));
    }
    let mut rings: Vec<PolygonRing> = comps.iter().map(trace_boundary).collect();
    let mut placements = Vec::with_capacity(n_vertices as usize);
    for j in 0..n_vertices as usize {
        let component = j % comps.len();
        let edge = rng.random_range(0..rings[component].len());
        let reach = VERTEX_OFFSET_FRACTION * comps[component].bbox().diagonal();
        let offset = rng.random_range(-reach..=reach);
        insert_vertex(&mut rings[component], edge, offset)?;
        placements.push(VertexPlacement {
            component,
            edge,
            offset,
        });
    }
    let out = rasterize(&rings, mask.width(), mask.height())?;
    Ok((out, placements))
}

/// Replays recorded vertex insertions.
pub fn apply_vertex_placements(
    mask: &BinaryMask,
    placements: &[VertexPlacement],
) -> Result<BinaryMask> {
    let comps = connected_components(mask);
    if comps.is_empty() {
        if placements.is_empty() {
            return Ok(mask.clone());
        }
        return Err(Error::invalid(
            "vertex placements recorded for an empty mask",
        ));
    }
    let mut rings: Vec<PolygonRing> = comps.iter().map(trace_boundary).collect();
    for p in placements {
        let ring = rings.get_mut(p.component).ok_or_else(|| {
            Error::invalid(format!(
                "vertex placement names missing component {}",
                p.component
            ))
        })?;
        insert_vertex(ring, p.edge, p.offset)?;
    }
    rasterize(&rings, mask.width(), mask.height())
}

/// What [`add_false_positives`] drew.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FalsePositiveOutcome {
    pub placements: Vec<ShapePlacement>,
    pub skipped: Vec<SkippedShape>,
}

/// Pastes `count` shapes drawn uniformly from `bank` (skipping shapes cut
/// from `exclude`) at uniform positions where the whole bbox fits. Shapes
/// larger than the canvas are skipped and reported.
pub fn add_false_positives<R: Rng + ?Sized>(
    mask: &BinaryMask,
    count: u32,
    bank: &ShapeBank,
    exclude: Option<&str>,
    rng: &mut R,
) -> Result<(BinaryMask, FalsePositiveOutcome)> {
    check_range(
        "false positive count",
        count as f64,
        FALSE_POSITIVE_LIMITS.0 as f64,
        FALSE_POSITIVE_LIMITS.1 as f64,
    )?;
    let (w, h) = mask.dims();
    let mut outcome = FalsePositiveOutcome::default();
    for _ in 0..count {
        let bank_index = bank.draw(exclude, rng)?;
        let entry = bank.get(bank_index).expect("drawn index is in range");
        let bbox = entry.shape.bbox();
        let source_id = entry.source_id.clone();
        if bbox.height() > h || bbox.width() > w {
            outcome.skipped.push(SkippedShape {
                bank_index,
                source_id,
            });
            continue;
        }
        let row = rng.random_range(0..=h - bbox.height());
        let col = rng.random_range(0..=w - bbox.width());
        outcome.placements.push(ShapePlacement {
            bank_index,
            source_id,
            row,
            col,
        });
    }
    let out = paste_shapes(mask, bank, &outcome.placements)?;
    Ok((out, outcome))
}

/// Unions recorded bank placements into `mask`.
pub fn paste_shapes(
    mask: &BinaryMask,
    bank: &ShapeBank,
    placements: &[ShapePlacement],
) -> Result<BinaryMask> {
    let (w, h) = mask.dims();
    let mut out = mask.clone();
    for p in placements {
        let entry = bank
            .get(p.bank_index)
            .filter(|e| e.source_id == p.source_id)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "bank entry {} from {:?} is not in this shape bank",
                    p.bank_index, p.source_id
                ))
            })?;
        let bbox = entry.shape.bbox();
        if p.row + bbox.height() > h || p.col + bbox.width() > w {
            return Err(Error::invalid(format!(
                "placement of bank entry {} at ({}, {}) leaves the canvas",
                p.bank_index, p.row, p.col
            )));
        }
        for &(r, c) in entry.shape.pixels() {
            out.set(p.row + r, p.col + c, true);
        }
    }
    Ok(out)
}
