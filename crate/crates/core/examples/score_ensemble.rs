//! Simulated ensembles scored with AER and RVR against noisy labels.

use segnoise::noise::inject_all;
use segnoise::ranking::{compare, gt_ranking};
use segnoise::scoring::{aer_score, pixel_variance, rvr_score, ScoreAux};
use segnoise::sim::scene::random_scene;
use segnoise::sim::{simulate_stack, SimConfig};
use segnoise::{BinaryMask, Method, NoiseConfig, Orientation, Ranking, ShapeBank};

fn main() -> segnoise::Result<()> {
    let ids: Vec<String> = (0..150).map(|i| format!("s{i:03}")).collect();
    let clean: Vec<BinaryMask> = ids.iter().map(|id| random_scene(128, 128, 5, id)).collect();
    let pairs: Vec<(&str, &BinaryMask)> = ids.iter().map(String::as_str).zip(&clean).collect();
    let bank = ShapeBank::from_masks(pairs.iter().copied());
    let noisy: Vec<BinaryMask> = inject_all(&pairs, &NoiseConfig::with_seed(5), &bank)?
        .into_iter()
        .map(|(m, _)| m)
        .collect();
    let triples: Vec<_> = pairs
        .iter()
        .zip(&noisy)
        .map(|(&(id, c), n)| (id, c, n))
        .collect();
    let gt = gt_ranking(&triples)?;

    for flip_rate in [0.02, 0.1, 0.3] {
        let cfg = SimConfig {
            k: 8,
            flip_rate,
            boundary_jitter: 1,
            seed: 5,
        };
        let mut aer = Vec::new();
        let mut rvr = Vec::new();
        let mut variance = 0.0;
        for ((id, c), n) in pairs.iter().zip(&noisy) {
            let stack = simulate_stack(c, &cfg, id)?;
            variance += pixel_variance(&stack).1;
            aer.push((id.to_string(), aer_score(&stack, n)?.score));
            let rec = rvr_score(&stack, n)?;
            if let (
                0,
                ScoreAux::Rvr {
                    max_iou,
                    mean_variance,
                    ..
                },
            ) = (rvr.len(), rec.aux)
            {
                println!(
                    "  first RVR record: max IoU {max_iou:.3}, mean variance {mean_variance:.4}"
                );
            }
            rvr.push((id.to_string(), rec.score));
        }
        let aer = Ranking::from_scores(aer, Method::Aer.orientation())?;
        let rvr = Ranking::from_scores(rvr, Orientation::HigherIsCleaner)?;
        println!(
            "flip {flip_rate:<4}: mean variance {:.4}, AER tau {:+.3}, RVR tau {:+.3}",
            variance / ids.len() as f64,
            compare(&aer, &gt)?.kendall_tau,
            compare(&rvr, &gt)?.kendall_tau
        );
    }
    Ok(())
}
