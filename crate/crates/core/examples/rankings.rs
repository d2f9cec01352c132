//! Ground-truth and random rankings, evaluation, rank averaging,
//! per-noise-type breakdown and top-fraction selection.

use segnoise::noise::inject_all;
use segnoise::ranking::{
    combine_average, compare, gt_ranking, random_ranking, select_top, stratify_by_noise_type,
};
use segnoise::sim::scene::random_scene;
use segnoise::{BinaryMask, NoiseConfig, Orientation, Ranking, ShapeBank};

fn main() -> segnoise::Result<()> {
    let ids: Vec<String> = (0..400).map(|i| format!("s{i:03}")).collect();
    let clean: Vec<BinaryMask> = ids.iter().map(|id| random_scene(96, 96, 3, id)).collect();
    let pairs: Vec<(&str, &BinaryMask)> = ids.iter().map(String::as_str).zip(&clean).collect();
    let bank = ShapeBank::from_masks(pairs.iter().copied());
    let injected = inject_all(&pairs, &NoiseConfig::with_seed(3), &bank)?;

    let triples: Vec<_> = pairs
        .iter()
        .zip(&injected)
        .map(|(&(id, c), (n, _))| (id, c, n))
        .collect();
    let gt = gt_ranking(&triples)?;
    let head: Vec<&str> = gt.ids().take(3).collect();
    let tail: Vec<&str> = gt.ids().skip(gt.len() - 3).collect();
    println!("gt ranking: cleanest {head:?}, noisiest {tail:?}");

    let random = random_ranking(&ids, 11)?;
    let r = compare(&random, &gt)?;
    println!(
        "random vs gt: tau {:+.4}, rho {:+.4}",
        r.kendall_tau, r.spearman_rho
    );

    // a noisy imitation of the gt: iou plus a deterministic wobble
    let wobbly = Ranking::from_scores(
        gt.entries()
            .iter()
            .enumerate()
            .map(|(i, e)| (e.sample_id.clone(), e.score + ((i * 37) % 11) as f64 * 0.02)),
        Orientation::HigherIsCleaner,
    )?;
    let combined = combine_average(&[wobbly.clone(), gt.clone()])?;
    println!(
        "wobbly vs gt: tau {:+.4}",
        compare(&wobbly, &gt)?.kendall_tau
    );
    println!(
        "combined vs gt: tau {:+.4}",
        compare(&combined, &gt)?.kendall_tau
    );

    let types = ids
        .iter()
        .map(String::as_str)
        .zip(injected.iter().map(|(_, s)| s.noise_type()));
    let strata = stratify_by_noise_type(&wobbly, &gt, types)?;
    for (ty, rep) in &strata.reports {
        println!("  {ty:<24} n={:<4} tau {:+.4}", rep.n, rep.kendall_tau);
    }

    for f in [0.25, 0.5, 0.75] {
        println!("top {f}: {} samples", select_top(&gt, f)?.len());
    }
    Ok(())
}
