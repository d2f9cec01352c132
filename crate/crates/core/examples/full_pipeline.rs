//! Runs the command-line pipeline in-process on a small generated dataset:
//! inject, rank-gt, simulate-ensemble, score, evaluate, stratify, select.
//!
//! Usage: `cargo run --example full_pipeline [-- <dir>]` (defaults to a temp dir).

use segnoise::dataset::{save_manifest, Manifest, SampleRecord};
use segnoise::sim::scene::random_scene;

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let root = std::env::args()
        .nth(1)
        .map_or_else(|| tmp.path().to_path_buf(), Into::into);
    let clean_dir = root.join("clean");
    std::fs::create_dir_all(clean_dir.join("masks")).expect("create dirs");
    let mut manifest = Manifest::new(&clean_dir);
    for i in 0..60 {
        let id = format!("tile_{i:03}");
        random_scene(128, 128, 42, &id)
            .save_png(clean_dir.join(format!("masks/{id}.png")))
            .expect("write png");
        manifest
            .records
            .push(SampleRecord::new(&id, format!("masks/{id}.png")));
    }
    save_manifest(&manifest, clean_dir.join("manifest.jsonl")).expect("write manifest");

    let p = |rel: &str| root.join(rel).to_string_lossy().into_owned();
    let steps: Vec<Vec<String>> = vec![
        vec![
            "inject",
            "--manifest",
            &p("clean/manifest.jsonl"),
            "--out",
            &p("run"),
            "--seed",
            "42",
        ],
        vec![
            "rank-gt",
            "--manifest",
            &p("run/manifest.jsonl"),
            "--out",
            &p("run/gt.csv"),
        ],
        vec![
            "simulate-ensemble",
            "--manifest",
            &p("run/manifest.jsonl"),
            "--out",
            &p("run/preds"),
            "--seed",
            "43",
            "--k",
            "8",
            "--flip-rate",
            "0.05",
        ],
        vec![
            "score",
            "--method",
            "aer",
            "--manifest",
            &p("run/manifest.jsonl"),
            "--preds",
            &p("run/preds"),
            "--out",
            &p("run/aer.csv"),
        ],
        vec![
            "score",
            "--method",
            "rvr",
            "--manifest",
            &p("run/manifest.jsonl"),
            "--preds",
            &p("run/preds"),
            "--out",
            &p("run/rvr.csv"),
        ],
        vec![
            "evaluate",
            "--predicted",
            &p("run/aer.csv"),
            "--reference",
            &p("run/gt.csv"),
        ],
        vec![
            "evaluate",
            "--predicted",
            &p("run/rvr.csv"),
            "--reference",
            &p("run/gt.csv"),
        ],
        vec![
            "stratify",
            "--predicted",
            &p("run/aer.csv"),
            &p("run/rvr.csv"),
            "--reference",
            &p("run/gt.csv"),
            "--manifest",
            &p("run/manifest.jsonl"),
        ],
        vec![
            "select",
            "--ranking",
            &p("run/aer.csv"),
            "--fraction",
            "0.5",
            "--out",
            &p("run/clean_half.jsonl"),
            "--manifest",
            &p("run/manifest.jsonl"),
        ],
    ]
    .into_iter()
    .map(|s| s.into_iter().map(str::to_owned).collect())
    .collect();

    for args in steps {
        println!("$ segnoise {}", args.join(" "));
        let code = segnoise::cli::run(std::iter::once("segnoise".to_owned()).chain(args));
        if code != 0 {
            std::process::exit(code);
        }
    }
}
