mod common;

use std::collections::BTreeMap;

use common::Synthetic;
use segnoise::ranking::{compare, gt_ranking};
use segnoise::scoring::score_dataset;
use segnoise::sim::{simulate_all, SimConfig};
use segnoise::{BinaryMask, EnsembleStack, Method};

fn aer_tau(data: &Synthetic, flip_rate: f64, jitter: usize) -> f64 {
    let cfg = SimConfig {
        k: 8,
        flip_rate,
        boundary_jitter: jitter,
        seed: 31,
    };
    let pairs: Vec<(&str, &BinaryMask)> = data
        .ids
        .iter()
        .map(String::as_str)
        .zip(&data.clean)
        .collect();
    let stacks: BTreeMap<String, EnsembleStack> = simulate_all(&pairs, &cfg)
        .unwrap()
        .into_iter()
        .map(|s| (s.sample_id().to_owned(), s))
        .collect();
    let labels: BTreeMap<String, BinaryMask> = data
        .ids
        .iter()
        .cloned()
        .zip(data.noisy.iter().cloned())
        .collect();
    let (_, aer) = score_dataset(Method::Aer, &data.ids, &stacks, &labels, 0).unwrap();
    let gt = gt_ranking(&data.triples()).unwrap();
    compare(&aer, &gt).unwrap().kendall_tau
}

#[test]
fn noiseless_simulation_is_an_oracle() {
    let data = Synthetic::build(120, 128, 30);
    assert_eq!(aer_tau(&data, 0.0, 0), 1.0);
}

#[test]
fn fidelity_falls_with_flip_rate() {
    let data = Synthetic::build(150, 128, 31);
    let taus: Vec<f64> = [0.0, 0.05, 0.15, 0.3]
        .iter()
        .map(|&r| aer_tau(&data, r, 1))
        .collect();
    let inversions = (0..taus.len())
        .flat_map(|i| (i + 1..taus.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| taus[j] > taus[i])
        .count();
    assert!(inversions <= 1, "{taus:?}");
    assert!(taus[0] > taus[3], "{taus:?}");
}
