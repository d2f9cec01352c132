//! `segnoise` command-line front end.
//!
//! Subcommands run in pipeline order: `inject`, `rank-gt`,
//! `simulate-ensemble`, `score`, `evaluate`, `stratify`, `select`.
//! Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 I/O error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;

use crate::dataset::{self, load_manifest, save_manifest, Manifest, NoisyLabels, PredictionDir};
use crate::error::{Error, ErrorKind, Result};
use crate::mask::BinaryMask;
use crate::noise::{inject_all, NoiseConfig, ShapeBank};
use crate::ranking::{self, Ranking};
use crate::scoring::{self, Method, NoStacks};
use crate::sim::{self, SimConfig};

#[derive(Debug, Parser)]
#[command(
    name = "segnoise",
    version,
    about = "Label-noise injection, ranking and scoring for binary masks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply one random noise type per sample and record what was applied.
    Inject(InjectArgs),
    /// Rank samples by IoU between clean and noisy masks.
    RankGt(RankGtArgs),
    /// Write simulated ensemble predictions for every clean mask.
    SimulateEnsemble(SimulateArgs),
    /// Score and rank samples with an ensemble method or the random baseline.
    Score(ScoreArgs),
    /// Compare a predicted ranking with a reference ranking.
    Evaluate(EvaluateArgs),
    /// Per-noise-type correlations of a (possibly rank-averaged) ranking.
    Stratify(StratifyArgs),
    /// Keep the top fraction of a ranking.
    Select(SelectArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Worker threads (defaults to all cores); results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Overwrite existing outputs.
    #[arg(long)]
    force: bool,
    /// TOML file with `seed`, `jobs`, `[noise]` and `[simulate]` settings; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Open every referenced mask while loading manifests.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct InjectArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory; receives `manifest.jsonl` and `noisy/<id>.png`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct RankGtArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Ranking CSV.
    #[arg(long)]
    out: PathBuf,
    /// Also write a copy of the manifest with `gt_iou` filled in.
    #[arg(long)]
    manifest_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Prediction root; receives `member_<k>/<id>.png`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Ensemble size [default: 8].
    #[arg(long)]
    k: Option<usize>,
    /// Per-pixel flip probability in [0, 0.5) [default: 0.05].
    #[arg(long)]
    flip_rate: Option<f64>,
    /// Largest dilation/erosion radius [default: 1].
    #[arg(long)]
    jitter: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// aer, rvr or random.
    #[arg(long)]
    method: Method,
    #[arg(long)]
    manifest: PathBuf,
    /// Prediction root (aer and rvr).
    #[arg(long)]
    preds: Option<PathBuf>,
    /// Ranking CSV.
    #[arg(long)]
    out: PathBuf,
    /// Score CSV [default: `<out stem>.scores.csv` next to `--out`].
    #[arg(long)]
    scores_out: Option<PathBuf>,
    /// Required for `--method random`.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    predicted: PathBuf,
    #[arg(long)]
    reference: PathBuf,
    /// Report JSON (always printed to stdout as well).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct StratifyArgs {
    /// One ranking, or several to combine by mean rank position.
    #[arg(long, required = true, num_args = 1..)]
    predicted: Vec<PathBuf>,
    #[arg(long)]
    reference: PathBuf,
    /// Injected manifest supplying each sample's noise type.
    #[arg(long)]
    manifest: PathBuf,
    /// Report JSON (always printed to stdout as well).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the combined ranking CSV here.
    #[arg(long)]
    combined_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(long)]
    ranking: PathBuf,
    /// Fraction in (0, 1].
    #[arg(long)]
    fraction: f64,
    /// JSONL output: a manifest subset when `--manifest` is given, else
    /// `{"sample_id", "rank"}` rows.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    jobs: Option<usize>,
    noise: Option<NoiseConfig>,
    simulate: Option<SimulateSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateSection {
    k: Option<usize>,
    flip_rate: Option<f64>,
    boundary_jitter: Option<usize>,
}

fn read_config(path: Option<&Path>) -> Result<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string().replace('\n', " "),
    })
}

fn require_seed(flag: Option<u64>, cfg: &ConfigFile, what: &str) -> Result<u64> {
    flag.or(cfg.seed).ok_or_else(|| {
        Error::Usage(format!(
            "{what} needs an explicit --seed (or `seed` in --config)"
        ))
    })
}

fn guard(path: &Path, force: bool) -> Result<()> {
    if !force && path.exists() {
        return Err(Error::WouldOverwrite(path.to_path_buf()));
    }
    Ok(())
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
        }
        _ => Ok(()),
    }
}

fn load_cleans(manifest: &Manifest) -> Result<Vec<BinaryMask>> {
    manifest
        .records
        .par_iter()
        .map(|r| manifest.load_clean(r))
        .collect()
}

fn report_json<T: serde::Serialize>(value: &T, out: Option<&Path>, force: bool) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| Error::invalid(e.to_string()))?;
    text.push('\n');
    if let Some(path) = out {
        guard(path, force)?;
        ensure_parent(path)?;
        dataset::write_atomic(path, text.as_bytes())?;
    }
    print!("{text}");
    Ok(())
}

fn inject(args: &InjectArgs, cfg: &ConfigFile) -> Result<()> {
    let seed = require_seed(args.seed, cfg, "inject")?;
    let mut noise_cfg = cfg.noise.clone().unwrap_or_default();
    noise_cfg.master_seed = seed;
    noise_cfg.validate()?;

    let out_manifest = args.out.join("manifest.jsonl");
    let noisy_dir = args.out.join("noisy");
    guard(&out_manifest, args.common.force)?;
    guard(&noisy_dir, args.common.force)?;

    let manifest = load_manifest(&args.manifest, args.common.strict)?;
    let cleans = load_cleans(&manifest)?;
    let samples: Vec<(&str, &BinaryMask)> = manifest
        .records
        .iter()
        .map(|r| r.sample_id.as_str())
        .zip(&cleans)
        .collect();
    let bank = ShapeBank::from_masks(samples.iter().copied());
    let noisy = inject_all(&samples, &noise_cfg, &bank)?;

    std::fs::create_dir_all(&noisy_dir).map_err(|e| Error::io(&noisy_dir, e))?;
    manifest
        .records
        .par_iter()
        .zip(&noisy)
        .try_for_each(|(r, (mask, _))| {
            mask.save_png(noisy_dir.join(format!("{}.png", r.sample_id)))
        })?;

    let mut out = manifest.rebased(&args.out)?;
    out.header.master_seed = Some(seed);
    out.header.noise_config = Some(noise_cfg);
    for (record, (_, spec)) in out.records.iter_mut().zip(noisy) {
        record.noisy_mask_path = Some(format!("noisy/{}.png", record.sample_id));
        record.noise_spec = Some(spec);
        record.gt_iou = None;
    }
    save_manifest(&out, &out_manifest)?;
    println!(
        "injected noise into {} samples -> {}",
        out.records.len(),
        out_manifest.display()
    );
    Ok(())
}

fn rank_gt(args: &RankGtArgs) -> Result<()> {
    guard(&args.out, args.common.force)?;
    if let Some(p) = &args.manifest_out {
        guard(p, args.common.force)?;
    }
    let manifest = load_manifest(&args.manifest, args.common.strict)?;
    let ranking = dataset::gt_ranking(&manifest)?;
    ensure_parent(&args.out)?;
    dataset::write_ranking_csv(&ranking, &args.out)?;
    if let Some(path) = &args.manifest_out {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut out = manifest.rebased(&dir)?;
        let scores: BTreeMap<&str, f64> = ranking
            .entries()
            .iter()
            .map(|e| (e.sample_id.as_str(), e.score))
            .collect();
        for r in &mut out.records {
            r.gt_iou = scores.get(r.sample_id.as_str()).copied();
        }
        ensure_parent(path)?;
        save_manifest(&out, path)?;
    }
    println!("ranked {} samples -> {}", ranking.len(), args.out.display());
    Ok(())
}

fn simulate(args: &SimulateArgs, cfg: &ConfigFile) -> Result<()> {
    let seed = require_seed(args.seed, cfg, "simulate-ensemble")?;
    let section = cfg.simulate.as_ref();
    let sim_cfg = SimConfig {
        k: args.k.or(section.and_then(|s| s.k)).unwrap_or(8),
        flip_rate: args
            .flip_rate
            .or(section.and_then(|s| s.flip_rate))
            .unwrap_or(0.05),
        boundary_jitter: args
            .jitter
            .or(section.and_then(|s| s.boundary_jitter))
            .unwrap_or(1),
        seed,
    };
    sim_cfg.validate()?;
    for k in 0..sim_cfg.k {
        guard(
            &args.out.join(dataset::member_dir_name(k)),
            args.common.force,
        )?;
    }
    let manifest = load_manifest(&args.manifest, args.common.strict)?;
    manifest.records.par_iter().try_for_each(|r| {
        let clean = manifest.load_clean(r)?;
        let stack = sim::simulate_stack(&clean, &sim_cfg, &r.sample_id)?;
        dataset::write_stack(&args.out, &stack)
    })?;
    println!(
        "simulated {} members for {} samples -> {}",
        sim_cfg.k,
        manifest.records.len(),
        args.out.display()
    );
    Ok(())
}

fn default_scores_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "ranking".into());
    out.with_file_name(format!("{stem}.scores.csv"))
}

fn score(args: &ScoreArgs, cfg: &ConfigFile) -> Result<()> {
    let scores_out = args
        .scores_out
        .clone()
        .unwrap_or_else(|| default_scores_path(&args.out));
    guard(&args.out, args.common.force)?;
    guard(&scores_out, args.common.force)?;
    let manifest = load_manifest(&args.manifest, args.common.strict)?;
    let ids = manifest.ids();
    let labels = NoisyLabels(&manifest);
    let (records, ranking) = match args.method {
        Method::Random => {
            let seed = require_seed(args.seed, cfg, "score --method random")?;
            scoring::score_dataset(Method::Random, &ids, &NoStacks, &labels, seed)?
        }
        method => {
            let root = args
                .preds
                .as_ref()
                .ok_or_else(|| Error::Usage(format!("--method {method} needs --preds")))?;
            let preds = PredictionDir::open(root)?;
            scoring::score_dataset(method, &ids, &preds, &labels, 0)?
        }
    };
    ensure_parent(&args.out)?;
    ensure_parent(&scores_out)?;
    dataset::write_ranking_csv(&ranking, &args.out)?;
    dataset::write_scores_csv(&records, &scores_out)?;
    println!(
        "scored {} samples with {} -> {}",
        ranking.len(),
        args.method,
        args.out.display()
    );
    Ok(())
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let predicted = dataset::read_ranking_csv(&args.predicted)?;
    let reference = dataset::read_ranking_csv(&args.reference)?;
    let report = ranking::compare(&predicted, &reference)?;
    report_json(&report, args.out.as_deref(), args.common.force)
}

fn stratify(args: &StratifyArgs) -> Result<()> {
    if let Some(p) = &args.combined_out {
        guard(p, args.common.force)?;
    }
    let rankings = args
        .predicted
        .iter()
        .map(dataset::read_ranking_csv)
        .collect::<Result<Vec<Ranking>>>()?;
    let combined = if rankings.len() == 1 {
        rankings.into_iter().next().expect("one ranking")
    } else {
        ranking::combine_average(&rankings)?
    };
    let reference = dataset::read_ranking_csv(&args.reference)?;
    let manifest = load_manifest(&args.manifest, args.common.strict)?;
    let types = manifest
        .records
        .iter()
        .map(|r| {
            r.noise_spec
                .as_ref()
                .map(|s| (r.sample_id.as_str(), s.noise_type()))
                .ok_or_else(|| Error::sample(&r.sample_id, "no noise spec in manifest"))
        })
        .collect::<Result<Vec<_>>>()?;
    let strata = ranking::stratify_by_noise_type(&combined, &reference, types)?;
    for (ty, n) in &strata.omitted {
        eprintln!("warning: noise type {ty} has {n} sample(s); omitted");
    }
    if let Some(p) = &args.combined_out {
        ensure_parent(p)?;
        dataset::write_ranking_csv(&combined, p)?;
    }
    report_json(&strata, args.out.as_deref(), args.common.force)
}

fn select(args: &SelectArgs) -> Result<()> {
    guard(&args.out, args.common.force)?;
    let ranking = dataset::read_ranking_csv(&args.ranking)?;
    let ids = ranking::select_top(&ranking, args.fraction)?;
    ensure_parent(&args.out)?;
    match &args.manifest {
        Some(path) => {
            let manifest = load_manifest(path, args.common.strict)?;
            let dir = match args.out.parent() {
                Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
                _ => PathBuf::from("."),
            };
            let mut subset = manifest.rebased(&dir)?;
            let mut by_id: BTreeMap<String, _> = std::mem::take(&mut subset.records)
                .into_iter()
                .map(|r| (r.sample_id.clone(), r))
                .collect();
            subset.records = ids
                .iter()
                .map(|id| {
                    by_id
                        .remove(id)
                        .ok_or_else(|| Error::sample(id, "ranked sample missing from manifest"))
                })
                .collect::<Result<_>>()?;
            save_manifest(&subset, &args.out)?;
        }
        None => dataset::write_selection_jsonl(&ids, &args.out)?,
    }
    println!(
        "selected {} of {} samples -> {}",
        ids.len(),
        ranking.len(),
        args.out.display()
    );
    Ok(())
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Inject(a) => &a.common,
        Command::RankGt(a) => &a.common,
        Command::SimulateEnsemble(a) => &a.common,
        Command::Score(a) => &a.common,
        Command::Evaluate(a) => &a.common,
        Command::Stratify(a) => &a.common,
        Command::Select(a) => &a.common,
    }
}

fn dispatch(cmd: &Command, cfg: &ConfigFile) -> Result<()> {
    match cmd {
        Command::Inject(a) => inject(a, cfg),
        Command::RankGt(a) => rank_gt(a),
        Command::SimulateEnsemble(a) => simulate(a, cfg),
        Command::Score(a) => score(a, cfg),
        Command::Evaluate(a) => evaluate(a),
        Command::Stratify(a) => stratify(a),
        Command::Select(a) => select(a),
    }
}

fn execute(cli: Cli) -> Result<()> {
    let common = common(&cli.command);
    let cfg = read_config(common.config.as_deref())?;
    match common.jobs.or(cfg.jobs) {
        Some(0) => Err(Error::Usage("--jobs must be at least 1".into())),
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Usage(e.to_string()))?
            .install(|| dispatch(&cli.command, &cfg)),
        None => dispatch(&cli.command, &cfg),
    }
}

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Usage => 1,
        ErrorKind::Data => 2,
        ErrorKind::Io => 3,
    }
}

/// Parses `argv` (program name first), runs one subcommand and returns the
/// process exit code. Failures print one `error[<kind>]: <message>` line to
/// stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            let kind = e.kind();
            let label = match kind {
                ErrorKind::Usage => "usage",
                ErrorKind::Data => "data",
                ErrorKind::Io => "io",
            };
            let message = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("error[{label}]: {message}");
            exit_code(kind)
        }
    }
}
