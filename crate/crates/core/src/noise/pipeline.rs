use rand::Rng;
use rayon::prelude::*;

use super::ops::{
    add_false_positives, add_vertices, apply_vertex_placements, delete_components, global_scale,
    one_sided_scale, paste_shapes, remove_components, rotate, translate,
};
use super::{Axis, NoiseConfig, NoiseSpec, NoiseType, ParamRange, ShapeBank};
use crate::error::Result;
use crate::mask::BinaryMask;
use crate::seed::sample_stream;

const STREAM_DOMAIN: &str = "noise";

fn draw_f64<R: Rng + ?Sized>(rng: &mut R, range: ParamRange<f64>) -> f64 {
    if range.min == range.max {
        range.min
    } else {
        rng.random_range(range.min..=range.max)
    }
}

/// Applies one uniformly chosen noise type to `clean`.
///
/// The random stream is derived from `(cfg.master_seed, sample_id)`, so the
/// outcome is a pure function of the inputs and independent of the order in
/// which samples are processed.
pub fn apply_random_noise(
    clean: &BinaryMask,
    cfg: &NoiseConfig,
    bank: &ShapeBank,
    sample_id: &str,
) -> Result<(BinaryMask, NoiseSpec)> {
    cfg.validate()?;
    let mut rng = sample_stream(cfg.master_seed, STREAM_DOMAIN, sample_id);
    let noise_type = NoiseType::ALL[rng.random_range(0..NoiseType::ALL.len())];
    match noise_type {
        NoiseType::GlobalScale => {
            let factor = draw_f64(&mut rng, cfg.scale_factor);
            Ok((
                global_scale(clean, factor)?,
                NoiseSpec::GlobalScale { factor },
            ))
        }
        NoiseType::OneSidedScale => {
            let axis = if rng.random::<bool>() {
                Axis::Horizontal
            } else {
                Axis::Vertical
            };
            let factor = draw_f64(&mut rng, cfg.scale_factor);
            Ok((
                one_sided_scale(clean, axis, factor)?,
                NoiseSpec::OneSidedScale { axis, factor },
            ))
        }
        NoiseType::Rotation => {
            let angle = draw_f64(&mut rng, cfg.rotation_degrees);
            Ok((rotate(clean, angle)?, NoiseSpec::Rotation { angle }))
        }
        NoiseType::Translation => {
            let r = cfg.translation_px;
            let dx = rng.random_range(r.min..=r.max);
            let dy = rng.random_range(r.min..=r.max);
            Ok((translate(clean, dx, dy)?, NoiseSpec::Translation { dx, dy }))
        }
        NoiseType::Deletion => {
            let ratio = draw_f64(&mut rng, cfg.deletion_ratio);
            let (noisy, deleted_indices) = delete_components(clean, ratio, &mut rng)?;
            Ok((
                noisy,
                NoiseSpec::Deletion {
                    ratio,
                    deleted_indices,
                },
            ))
        }
        NoiseType::VertexAddition => {
            let r = cfg.vertex_count;
            let n_vertices = rng.random_range(r.min..=r.max);
            let (noisy, placements) = add_vertices(clean, n_vertices, &mut rng)?;
            Ok((
                noisy,
                NoiseSpec::VertexAddition {
                    n_vertices,
                    placements,
                },
            ))
        }
        NoiseType::FalsePositiveAddition => {
            let r = cfg.false_positive_count;
            let count = rng.random_range(r.min..=r.max);
            let (noisy, outcome) =
                add_false_positives(clean, count, bank, Some(sample_id), &mut rng)?;
            Ok((
                noisy,
                NoiseSpec::FalsePositiveAddition {
                    count,
                    placements: outcome.placements,
                    skipped: outcome.skipped,
                },
            ))
        }
    }
}

/// Runs [`apply_random_noise`] over many samples in parallel. Output order
/// matches input order and does not depend on the thread count.
pub fn inject_all(
    samples: &[(&str, &BinaryMask)],
    cfg: &NoiseConfig,
    bank: &ShapeBank,
) -> Result<Vec<(BinaryMask, NoiseSpec)>> {
    samples
        .par_iter()
        .map(|&(id, clean)| {
            apply_random_noise(clean, cfg, bank, id).map_err(|e| crate::Error::sample(id, e))
        })
        .collect()
}

impl NoiseSpec {
    /// Re-applies the recorded noise to `clean`. The shape bank is only
    /// consulted for false-positive specs.
    pub fn replay(&self, clean: &BinaryMask, bank: &ShapeBank) -> Result<BinaryMask> {
        match self {
            NoiseSpec::GlobalScale { factor } => global_scale(clean, *factor),
            NoiseSpec::OneSidedScale { axis, factor } => one_sided_scale(clean, *axis, *factor),
            NoiseSpec::Rotation { angle } => rotate(clean, *angle),
            NoiseSpec::Translation { dx, dy } => translate(clean, *dx, *dy),
            NoiseSpec::Deletion {
                deleted_indices, ..
            } => remove_components(clean, deleted_indices),
            NoiseSpec::VertexAddition { placements, .. } => {
                apply_vertex_placements(clean, placements)
            }
            NoiseSpec::FalsePositiveAddition { placements, .. } => {
                paste_shapes(clean, bank, placements)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::scene::random_scene;

    #[test]
    fn deterministic_per_sample() {
        let clean = random_scene(64, 64, 5, "s1");
        let other = random_scene(64, 64, 5, "s2");
        let bank = ShapeBank::from_masks([("s1", &clean), ("s2", &other)]);
        let cfg = NoiseConfig::with_seed(11);
        for id in ["a", "b", "c", "d", "e", "f", "g", "h"] {
            let first = apply_random_noise(&clean, &cfg, &bank, id).unwrap();
            let second = apply_random_noise(&clean, &cfg, &bank, id).unwrap();
            assert_eq!(first, second);
            assert_eq!(first.1.replay(&clean, &bank).unwrap(), first.0);
            first.1.check_within(&cfg).unwrap();
        }
    }

    #[test]
    fn narrowed_ranges_are_honoured() {
        let clean = random_scene(64, 64, 5, "s1");
        let bank = ShapeBank::from_masks([("other", &clean)]);
        let mut cfg = NoiseConfig::with_seed(2);
        cfg.scale_factor = ParamRange::new(1.0, 1.0);
        cfg.rotation_degrees = ParamRange::new(0.0, 0.0);
        cfg.translation_px = ParamRange::new(0, 0);
        for i in 0..40 {
            let id = format!("n{i}");
            let (noisy, spec) = apply_random_noise(&clean, &cfg, &bank, &id).unwrap();
            spec.check_within(&cfg).unwrap();
            if matches!(
                spec.noise_type(),
                NoiseType::GlobalScale
                    | NoiseType::OneSidedScale
                    | NoiseType::Rotation
                    | NoiseType::Translation
            ) {
                assert_eq!(noisy, clean);
            }
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let clean = BinaryMask::new(8, 8);
        let cfg = NoiseConfig {
            deletion_ratio: ParamRange::new(0.1, 0.5),
            ..NoiseConfig::default()
        };
        assert!(apply_random_noise(&clean, &cfg, &ShapeBank::new(), "x").is_err());
    }
}
