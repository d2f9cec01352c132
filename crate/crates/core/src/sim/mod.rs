//! Simulated ensembles: stand-ins for trained segmentation models.
//!
//! Each member is the clean mask with a random square dilation or erosion
//! (boundary uncertainty) followed by independent per-pixel flips
//! (unstructured model error).

pub mod scene;

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{dilate_square, erode_square, BinaryMask};
use crate::scoring::EnsembleStack;
use crate::seed::derive_stream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Ensemble size.
    pub k: usize,
    /// Per-pixel flip probability, in `[0, 0.5)`.
    pub flip_rate: f64,
    /// Largest dilation/erosion radius in pixels.
    pub boundary_jitter: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("ensemble size must be at least 1"));
        }
        if !(0.0..0.5).contains(&self.flip_rate) {
            return Err(Error::OutOfRange {
                name: "flip rate",
                value: self.flip_rate,
                min: 0.0,
                max: 0.5,
            });
        }
        Ok(())
    }
}

/// Builds a `cfg.k`-member stack for one sample. Member `k` draws from a
/// stream keyed by `(cfg.seed, sample_id, k)`.
pub fn simulate_stack(
    clean: &BinaryMask,
    cfg: &SimConfig,
    sample_id: &str,
) -> Result<EnsembleStack> {
    cfg.validate()?;
    let members = (0..cfg.k)
        .map(|k| simulate_member(clean, cfg, sample_id, k))
        .collect();
    EnsembleStack::new(sample_id, members)
}

fn simulate_member(clean: &BinaryMask, cfg: &SimConfig, sample_id: &str, k: usize) -> BinaryMask {
    let mut rng = derive_stream(
        cfg.seed,
        &[b"ensemble", sample_id.as_bytes(), &(k as u64).to_le_bytes()],
    );
    let jitter = cfg.boundary_jitter as i64;
    let radius = if jitter == 0 {
        0
    } else {
        rng.random_range(-jitter..=jitter)
    };
    let mut member = match radius {
        0 => clean.clone(),
        r if r > 0 => dilate_square(clean, r as usize),
        r => erode_square(clean, r.unsigned_abs() as usize),
    };
    if cfg.flip_rate > 0.0 {
        // geometric gaps between flips: same law as per-pixel Bernoulli draws
        let gaps = Geometric::new(cfg.flip_rate).expect("flip rate validated");
        let pixels = member.pixels_mut();
        let mut idx: u64 = 0;
        loop {
            idx = idx.saturating_add(gaps.sample(&mut rng));
            if idx >= pixels.len() as u64 {
                break;
            }
            let p = &mut pixels[idx as usize];
            *p = !*p;
            idx += 1;
        }
    }
    member
}

/// [`simulate_stack`] over many samples in parallel, preserving input order.
pub fn simulate_all(
    samples: &[(&str, &BinaryMask)],
    cfg: &SimConfig,
) -> Result<Vec<EnsembleStack>> {
    cfg.validate()?;
    samples
        .par_iter()
        .map(|&(id, clean)| simulate_stack(clean, cfg, id))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, flip_rate: f64, boundary_jitter: usize) -> SimConfig {
        SimConfig {
            k,
            flip_rate,
            boundary_jitter,
            seed: 5,
        }
    }

    #[test]
    fn identity_config_copies_clean() {
        let clean = scene::random_scene(64, 64, 1, "a");
        let stack = simulate_stack(&clean, &cfg(4, 0.0, 0), "a").unwrap();
        assert!(stack.members().iter().all(|m| *m == clean));
    }

    #[test]
    fn flip_counts_concentrate() {
        let clean = scene::random_scene(256, 256, 1, "a");
        let stack = simulate_stack(&clean, &cfg(8, 0.1, 0), "a").unwrap();
        for m in stack.members() {
            let diff = m
                .pixels()
                .iter()
                .zip(clean.pixels())
                .filter(|(a, b)| a != b)
                .count() as i64;
            assert!((diff - 6554).abs() <= 600, "{diff}");
        }
    }

    #[test]
    fn deterministic_and_member_specific() {
        let clean = scene::random_scene(64, 64, 1, "a");
        let c = cfg(3, 0.05, 2);
        let first = simulate_stack(&clean, &c, "a").unwrap();
        assert_eq!(first, simulate_stack(&clean, &c, "a").unwrap());
        assert_ne!(first.members()[0], first.members()[1]);
        assert_ne!(first, simulate_stack(&clean, &c, "b").unwrap());
    }

    #[test]
    fn config_validation() {
        assert!(cfg(0, 0.1, 0).validate().is_err());
        assert!(cfg(2, 0.5, 0).validate().is_err());
        assert!(cfg(2, -0.1, 0).validate().is_err());
        assert!(cfg(2, 0.49, 3).validate().is_ok());
    }
}
