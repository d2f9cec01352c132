#![allow(dead_code)]

use std::path::Path;

use segnoise::dataset::{save_manifest, Manifest, SampleRecord};
use segnoise::noise::inject_all;
use segnoise::sim::scene::random_scene;
use segnoise::{BinaryMask, NoiseConfig, NoiseSpec, ShapeBank};

pub struct Synthetic {
    pub ids: Vec<String>,
    pub clean: Vec<BinaryMask>,
    pub noisy: Vec<BinaryMask>,
    pub specs: Vec<NoiseSpec>,
    pub bank: ShapeBank,
}

impl Synthetic {
    /// `n` random scenes with one injected noise type each.
    pub fn build(n: usize, side: usize, seed: u64) -> Self {
        let ids: Vec<String> = (0..n).map(|i| format!("s{i:05}")).collect();
        let clean: Vec<BinaryMask> = ids
            .iter()
            .map(|id| random_scene(side, side, seed, id))
            .collect();
        let pairs: Vec<(&str, &BinaryMask)> = ids.iter().map(String::as_str).zip(&clean).collect();
        let bank = ShapeBank::from_masks(pairs.iter().copied());
        let (noisy, specs) = inject_all(&pairs, &NoiseConfig::with_seed(seed), &bank)
            .expect("injection")
            .into_iter()
            .unzip();
        Self {
            ids,
            clean,
            noisy,
            specs,
            bank,
        }
    }

    pub fn triples(&self) -> Vec<(&str, &BinaryMask, &BinaryMask)> {
        self.ids
            .iter()
            .zip(&self.clean)
            .zip(&self.noisy)
            .map(|((id, c), n)| (id.as_str(), c, n))
            .collect()
    }
}

/// Writes `n` clean scenes as PNGs plus a manifest under `dir`.
pub fn write_clean_dataset(dir: &Path, n: usize, side: usize, seed: u64) -> std::path::PathBuf {
    let masks = dir.join("masks");
    std::fs::create_dir_all(&masks).unwrap();
    let mut manifest = Manifest::new(dir);
    for i in 0..n {
        let id = format!("tile_{i:03}");
        random_scene(side, side, seed, &id)
            .save_png(masks.join(format!("{id}.png")))
            .unwrap();
        manifest
            .records
            .push(SampleRecord::new(&id, format!("masks/{id}.png")));
    }
    let path = dir.join("manifest.jsonl");
    save_manifest(&manifest, &path).unwrap();
    path
}

/// Quadratic-time tau-b straight from pair classification.
pub fn brute_kendall(x: &[f64], y: &[f64]) -> f64 {
    let (mut conc, mut disc, mut only_x, mut only_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            match (dx == 0.0, dy == 0.0) {
                (true, true) => {}
                (true, false) => only_x += 1,
                (false, true) => only_y += 1,
                (false, false) if (dx > 0.0) == (dy > 0.0) => conc += 1,
                _ => disc += 1,
            }
        }
    }
    let den = (((conc + disc + only_x) * (conc + disc + only_y)) as f64).sqrt();
    (conc - disc) as f64 / den
}

/// Midranks by counting, then the textbook Pearson formula.
pub fn brute_spearman(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| {
                let below = v.iter().filter(|b| *b < a).count() as f64;
                let equal = v.iter().filter(|b| *b == a).count() as f64;
                below + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}
