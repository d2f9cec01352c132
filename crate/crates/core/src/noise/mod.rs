//! Synthetic annotation noise for building masks.
//!
//! Seven operators cover geometric distortion (global and one-sided
//! scaling, rotation, translation, vertex addition), omission (deletion)
//! and spurious insertion (false positives pasted from a [`ShapeBank`]).
//! [`apply_random_noise`] picks one operator per sample from a seeded
//! stream and returns a [`NoiseSpec`] that replays the result bit-exactly.

mod bank;
mod ops;
mod pipeline;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

pub use bank::{BankShape, ShapeBank};
pub use ops::{
    add_false_positives, add_vertices, apply_vertex_placements, delete_components, global_scale,
    one_sided_scale, paste_shapes, remove_components, rotate, translate, FalsePositiveOutcome,
};
pub use pipeline::{apply_random_noise, inject_all};

/// Legal scale factors for both scaling operators.
pub const SCALE_FACTOR_LIMITS: (f64, f64) = (0.3, 2.5);
/// Legal rotation angles in degrees.
pub const ROTATION_LIMITS: (f64, f64) = (-90.0, 90.0);
/// Legal translation offsets in pixels, per axis.
pub const TRANSLATION_LIMITS: (i32, i32) = (-20, 20);
/// Legal fraction of buildings removed by deletion.
pub const DELETION_RATIO_LIMITS: (f64, f64) = (0.3, 0.6);
/// Legal number of vertices added per mask.
pub const VERTEX_COUNT_LIMITS: (u32, u32) = (2, 10);
/// Legal number of pasted false-positive shapes.
pub const FALSE_POSITIVE_LIMITS: (u32, u32) = (1, 5);

/// The seven noise families, in a fixed order used for uniform draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseType {
    GlobalScale,
    OneSidedScale,
    Rotation,
    Translation,
    Deletion,
    VertexAddition,
    FalsePositiveAddition,
}

impl NoiseType {
    pub const ALL: [NoiseType; 7] = [
        NoiseType::GlobalScale,
        NoiseType::OneSidedScale,
        NoiseType::Rotation,
        NoiseType::Translation,
        NoiseType::Deletion,
        NoiseType::VertexAddition,
        NoiseType::FalsePositiveAddition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseType::GlobalScale => "global_scale",
            NoiseType::OneSidedScale => "one_sided_scale",
            NoiseType::Rotation => "rotation",
            NoiseType::Translation => "translation",
            NoiseType::Deletion => "deletion",
            NoiseType::VertexAddition => "vertex_addition",
            NoiseType::FalsePositiveAddition => "false_positive_addition",
        }
    }
}

impl std::fmt::Display for NoiseType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Along columns (x).
    Horizontal,
    /// Along rows (y).
    Vertical,
}

/// One inserted contour vertex: on `edge` of the ring traced from
/// `component`, at the edge midpoint moved `offset` pixels along the edge
/// normal (positive = toward the inside of a traced ring).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexPlacement {
    pub component: usize,
    pub edge: usize,
    pub offset: f64,
}

/// A bank shape pasted with its bbox top-left at `(row, col)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapePlacement {
    pub bank_index: usize,
    pub source_id: String,
    pub row: usize,
    pub col: usize,
}

/// A drawn bank shape that did not fit on the canvas.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedShape {
    pub bank_index: usize,
    pub source_id: String,
}

/// Fully materialized description of the noise applied to one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NoiseSpec {
    GlobalScale {
        factor: f64,
    },
    OneSidedScale {
        axis: Axis,
        factor: f64,
    },
    Rotation {
        angle: f64,
    },
    Translation {
        dx: i32,
        dy: i32,
    },
    Deletion {
        ratio: f64,
        deleted_indices: Vec<usize>,
    },
    VertexAddition {
        n_vertices: u32,
        placements: Vec<VertexPlacement>,
    },
    FalsePositiveAddition {
        count: u32,
        placements: Vec<ShapePlacement>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        skipped: Vec<SkippedShape>,
    },
}

impl NoiseSpec {
    pub fn noise_type(&self) -> NoiseType {
        match self {
            NoiseSpec::GlobalScale { .. } => NoiseType::GlobalScale,
            NoiseSpec::OneSidedScale { .. } => NoiseType::OneSidedScale,
            NoiseSpec::Rotation { .. } => NoiseType::Rotation,
            NoiseSpec::Translation { .. } => NoiseType::Translation,
            NoiseSpec::Deletion { .. } => NoiseType::Deletion,
            NoiseSpec::VertexAddition { .. } => NoiseType::VertexAddition,
            NoiseSpec::FalsePositiveAddition { .. } => NoiseType::FalsePositiveAddition,
        }
    }

    /// Checks the recorded parameters against `cfg`'s ranges.
    pub fn check_within(&self, cfg: &NoiseConfig) -> Result<()> {
        match self {
            NoiseSpec::GlobalScale { factor } | NoiseSpec::OneSidedScale { factor, .. } => {
                cfg.scale_factor.check("scale factor", *factor)
            }
            NoiseSpec::Rotation { angle } => cfg.rotation_degrees.check("rotation angle", *angle),
            NoiseSpec::Translation { dx, dy } => {
                cfg.translation_px.check("dx", *dx)?;
                cfg.translation_px.check("dy", *dy)
            }
            NoiseSpec::Deletion { ratio, .. } => cfg.deletion_ratio.check("deletion ratio", *ratio),
            NoiseSpec::VertexAddition {
                n_vertices,
                placements,
            } => {
                cfg.vertex_count.check("vertex count", *n_vertices)?;
                if !placements.is_empty() && placements.len() != *n_vertices as usize {
                    return Err(Error::invalid(
                        "vertex placements disagree with vertex count",
                    ));
                }
                Ok(())
            }
            NoiseSpec::FalsePositiveAddition {
                count,
                placements,
                skipped,
            } => {
                cfg.false_positive_count
                    .check("false positive count", *count)?;
                if placements.len() + skipped.len() != *count as usize {
                    return Err(Error::invalid("shape placements disagree with count"));
                }
                Ok(())
            }
        }
    }
}

/// Inclusive parameter range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange<T> {
    pub min: T,
    pub max: T,
}

impl<T: Copy + PartialOrd + Into<f64>> ParamRange<T> {
    pub const fn new(min: T, max: T) -> Self {
        Self { min, max }
    }

    fn check(&self, name: &'static str, value: T) -> Result<()> {
        check_range(name, value.into(), self.min.into(), self.max.into())
    }

    fn validate(&self, name: &'static str, limits: (T, T)) -> Result<()> {
        let (lo, hi) = (self.min.into(), self.max.into());
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::invalid(format!(
                "{name} range [{lo}, {hi}] is empty"
            )));
        }
        check_range(name, lo, limits.0.into(), limits.1.into())?;
        check_range(name, hi, limits.0.into(), limits.1.into())
    }
}

/// Noise parameter ranges and the master seed. Defaults are the full legal
/// ranges; overrides may only narrow them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub master_seed: u64,
    pub scale_factor: ParamRange<f64>,
    pub rotation_degrees: ParamRange<f64>,
    pub translation_px: ParamRange<i32>,
    pub deletion_ratio: ParamRange<f64>,
    pub vertex_count: ParamRange<u32>,
    pub false_positive_count: ParamRange<u32>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            scale_factor: ParamRange::new(SCALE_FACTOR_LIMITS.0, SCALE_FACTOR_LIMITS.1),
            rotation_degrees: ParamRange::new(ROTATION_LIMITS.0, ROTATION_LIMITS.1),
            translation_px: ParamRange::new(TRANSLATION_LIMITS.0, TRANSLATION_LIMITS.1),
            deletion_ratio: ParamRange::new(DELETION_RATIO_LIMITS.0, DELETION_RATIO_LIMITS.1),
            vertex_count: ParamRange::new(VERTEX_COUNT_LIMITS.0, VERTEX_COUNT_LIMITS.1),
            false_positive_count: ParamRange::new(FALSE_POSITIVE_LIMITS.0, FALSE_POSITIVE_LIMITS.1),
        }
    }
}

impl NoiseConfig {
    pub fn with_seed(master_seed: u64) -> Self {
        Self {
            master_seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scale_factor
            .validate("scale factor", SCALE_FACTOR_LIMITS)?;
        self.rotation_degrees
            .validate("rotation angle", ROTATION_LIMITS)?;
        self.translation_px
            .validate("translation", TRANSLATION_LIMITS)?;
        self.deletion_ratio
            .validate("deletion ratio", DELETION_RATIO_LIMITS)?;
        self.vertex_count
            .validate("vertex count", VERTEX_COUNT_LIMITS)?;
        self.false_positive_count
            .validate("false positive count", FALSE_POSITIVE_LIMITS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        NoiseConfig::default().validate().unwrap();
    }

    #[test]
    fn widening_a_range_is_rejected() {
        let mut cfg = NoiseConfig::default();
        cfg.scale_factor.max = 3.0;
        assert!(cfg.validate().is_err());
        let cfg = NoiseConfig {
            vertex_count: ParamRange::new(5, 4),
            ..NoiseConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = NoiseConfig {
            rotation_degrees: ParamRange::new(-10.0, f64::NAN),
            ..NoiseConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn partial_toml_override_keeps_defaults() {
        let cfg: NoiseConfig =
            toml::from_str("master_seed = 9\nrotation_degrees = { min = -10.0, max = 10.0 }\n")
                .unwrap();
        assert_eq!(cfg.master_seed, 9);
        assert_eq!(cfg.rotation_degrees, ParamRange::new(-10.0, 10.0));
        assert_eq!(cfg.scale_factor, NoiseConfig::default().scale_factor);
        cfg.validate().unwrap();
    }

    #[test]
    fn spec_json_shape() {
        let spec = NoiseSpec::Translation { dx: -3, dy: 20 };
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"type":"translation","dx":-3,"dy":20}"#);
        assert_eq!(serde_json::from_str::<NoiseSpec>(&json).unwrap(), spec);
    }
}
