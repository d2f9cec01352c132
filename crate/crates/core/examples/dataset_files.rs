//! Manifest, prediction directory and CSV round trips on disk.
//!
//! Usage: `cargo run --example dataset_files [-- <dir>]` (defaults to a temp dir).

use segnoise::dataset::{
    load_manifest, read_ranking_csv, save_manifest, write_ranking_csv, write_stack, Manifest,
    PredictionDir, SampleRecord,
};
use segnoise::noise::inject_all;
use segnoise::sim::scene::random_scene;
use segnoise::sim::{simulate_stack, SimConfig};
use segnoise::{BinaryMask, NoiseConfig, ShapeBank};

fn main() -> segnoise::Result<()> {
    let tmp = tempfile::tempdir().expect("temp dir");
    let root = std::env::args()
        .nth(1)
        .map_or_else(|| tmp.path().to_path_buf(), Into::into);
    std::fs::create_dir_all(root.join("masks")).expect("create masks dir");

    let ids: Vec<String> = (0..8).map(|i| format!("tile_{i}")).collect();
    let clean: Vec<BinaryMask> = ids.iter().map(|id| random_scene(64, 64, 9, id)).collect();
    let pairs: Vec<(&str, &BinaryMask)> = ids.iter().map(String::as_str).zip(&clean).collect();
    let bank = ShapeBank::from_masks(pairs.iter().copied());
    let noisy = inject_all(&pairs, &NoiseConfig::with_seed(9), &bank)?;

    let mut manifest = Manifest::new(&root);
    manifest.header.master_seed = Some(9);
    for ((id, c), (n, spec)) in pairs.iter().zip(&noisy) {
        c.save_png(root.join(format!("masks/{id}.png")))?;
        n.save_png(root.join(format!("masks/{id}_noisy.png")))?;
        let mut rec = SampleRecord::new(*id, format!("masks/{id}.png"));
        rec.noisy_mask_path = Some(format!("masks/{id}_noisy.png"));
        rec.noise_spec = Some(spec.clone());
        manifest.records.push(rec);
    }
    let path = root.join("manifest.jsonl");
    save_manifest(&manifest, &path)?;
    let loaded = load_manifest(&path, true)?;
    println!(
        "manifest: {} records, round trip equal: {}",
        loaded.records.len(),
        loaded.records == manifest.records
    );
    println!(
        "first line of a record:\n  {}",
        loaded.to_jsonl()?.lines().nth(1).unwrap_or("")
    );

    let cfg = SimConfig {
        k: 3,
        flip_rate: 0.05,
        boundary_jitter: 1,
        seed: 9,
    };
    for (id, c) in &pairs {
        write_stack(&root.join("preds"), &simulate_stack(c, &cfg, id)?)?;
    }
    let preds = PredictionDir::open(root.join("preds"))?;
    println!(
        "prediction dir: K = {}, {}",
        preds.k(),
        preds.member_path(0, &ids[0]).display()
    );

    let gt = segnoise::dataset::gt_ranking(&loaded)?;
    let csv = root.join("gt.csv");
    write_ranking_csv(&gt, &csv)?;
    println!(
        "ranking csv round trip equal: {}",
        read_ranking_csv(&csv)? == gt
    );
    print!("{}", std::fs::read_to_string(&csv).expect("read csv"));
    Ok(())
}
