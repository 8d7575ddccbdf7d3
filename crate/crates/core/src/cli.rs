//! `pih` command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::config::{resolve_seed, RunConfig, Stream, SEED_ENV};
use crate::contact::EnvConfig;
use crate::control::run_episode;
use crate::convergence::{
    detect_convergence, detect_online, ensemble_statistics, window_statistics,
    write_convergence_csv,
};
use crate::error::{Error, Result};
use crate::learning::{
    collect_dataset, evaluate_models, train_models, Dataset, EvaluationReport, ModelBundle,
};
use crate::policy::{evaluate_policy, DirectionPredictor, RunSummary, SignaturePredictor};
use crate::types::{seeded_rng, PlanarMisalignment, Position3, TrajectorySpec};

#[derive(Debug, Parser)]
#[command(
    name = "pih",
    version,
    about = "Simulated peg-in-hole accommodation control and force-signature learning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run-config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Overrides both the config seed and PIH_SEED.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PredictorChoice {
    /// Trained direction classifiers from `--model`.
    Model,
    /// Exact sign read off the contact signature.
    Signature,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Collect a force-signature dataset (dataset.csv, meta.json).
    Collect {
        #[command(flatten)]
        common: Common,
    },
    /// Convergence statistics over an episode ensemble (convergence.csv).
    AnalyzeConvergence {
        #[command(flatten)]
        common: Common,
    },
    /// Fit direction classifiers and magnitude regressors (model.json).
    Train {
        #[command(flatten)]
        common: Common,
        /// Defaults to `<out>/dataset.csv`.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Held-out accuracy, RMSE and feature importance (evaluation.json).
    EvaluateModels {
        #[command(flatten)]
        common: Common,
        /// Defaults to `<out>/dataset.csv`.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
    /// Run corrective insertion trials (summary.json).
    Insert {
        #[command(flatten)]
        common: Common,
        /// Defaults to `<out>/model.json`.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PredictorChoice::Model)]
        predictor: PredictorChoice,
    },
    /// Summarize the artifacts found in `--out` (report.md).
    Report {
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Returns 0 on success, 1 on usage errors and 2 on runtime errors.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load(common: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&common.config)?;
    let env = std::env::var(SEED_ENV).ok();
    cfg.seed = resolve_seed(cfg.seed, env.as_deref(), common.seed)?;
    fs::create_dir_all(&common.out).map_err(|e| Error::io(&common.out, e))?;
    Ok(cfg)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Dataset::read_csv(f)
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Collect { common } => collect(&common),
        Command::AnalyzeConvergence { common } => analyze(&common),
        Command::Train { common, dataset } => train(&common, dataset),
        Command::EvaluateModels { common, dataset } => evaluate(&common, dataset),
        Command::Insert {
            common,
            model,
            predictor,
        } => insert(&common, model, predictor),
        Command::Report { common } => report(&common),
    }
}

fn collect(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let controller = cfg.controller_config(cfg.controller);
    let data = collect_dataset(
        &cfg.env,
        &controller,
        &cfg.episode,
        &cfg.convergence,
        cfg.collect_episodes,
        &mut cfg.rng(Stream::Collect),
    )?;
    let path = common.out.join("dataset.csv");
    let f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    data.write_csv(BufWriter::new(f))?;
    write_json(
        &common.out.join("meta.json"),
        &json!({ "seed": cfg.seed, "n_records": data.len(), "controller": cfg.controller, "config": cfg }),
    )?;
    println!("{}", json!({ "n_records": data.len(), "dataset": path }));
    Ok(())
}

fn analyze(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let controller = cfg.controller_config(cfg.controller);
    let m = PlanarMisalignment::new(cfg.analysis_offset[0], cfg.analysis_offset[1]);
    let start = Position3::new(0.0, 0.0, cfg.env.surface_z + cfg.episode.approach_height);
    let traj = TrajectorySpec {
        dt: cfg.episode.dt,
        ..TrajectorySpec::downward(start, cfg.episode.speed, cfg.episode.horizon_ticks)
    };
    let mut rng = cfg.rng(Stream::Analysis);
    let logs = (0..cfg.analysis_episodes)
        .map(|_| {
            let seed = rand::Rng::random(&mut rng);
            let env = EnvConfig {
                seed,
                ..cfg.env.clone()
            };
            run_episode(&controller, &env, &traj, m, &mut seeded_rng(seed))
        })
        .collect::<Result<Vec<_>>>()?;
    let wl = cfg.convergence.window_len;
    let representative = window_statistics(&logs[0], wl)?;
    let ensemble = ensemble_statistics(&logs, wl)?;
    let path = common.out.join("convergence.csv");
    let f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_convergence_csv(BufWriter::new(f), &representative, &ensemble)?;
    logs[0].save(&common.out, "episode")?;
    let online = detect_online(&logs[0], &cfg.convergence);
    let ens = detect_convergence(&ensemble.criterion_series(), &cfg.convergence);
    let out = json!({
        "controller": cfg.controller,
        "n_episodes": logs.len(),
        "online_window": online.as_ref().map(|c| c.window),
        "online_time_s": online.as_ref().map(|c| c.time_s(cfg.episode.dt)),
        "contact_onset_tick": logs[0].contact_onset(),
        "ensemble_window": ens,
    });
    println!("{out}");
    Ok(())
}

fn dataset_path(common: &Common, dataset: Option<PathBuf>) -> PathBuf {
    dataset.unwrap_or_else(|| common.out.join("dataset.csv"))
}

fn train(common: &Common, dataset: Option<PathBuf>) -> Result<()> {
    let cfg = load(common)?;
    let data = read_dataset(&dataset_path(common, dataset))?.for_controller(cfg.controller);
    if data.is_empty() {
        return Err(Error::InsufficientData(format!(
            "dataset has no {} records",
            cfg.controller
        )));
    }
    let bundle = train_models(
        &data.records,
        cfg.controller,
        cfg.learning.feature_mode,
        &cfg.learning,
    )?;
    let path = common.out.join("model.json");
    write_json(&path, &bundle)?;
    println!("{}", json!({ "n_train": data.len(), "model": path }));
    Ok(())
}

fn evaluate(common: &Common, dataset: Option<PathBuf>) -> Result<()> {
    let cfg = load(common)?;
    let data = read_dataset(&dataset_path(common, dataset))?;
    let report = evaluate_models(&data, &cfg.learning, &mut cfg.rng(Stream::Evaluation))?;
    write_json(&common.out.join("evaluation.json"), &report)?;
    print!("{}", evaluation_table(&report));
    Ok(())
}

fn insert(common: &Common, model: Option<PathBuf>, choice: PredictorChoice) -> Result<()> {
    let cfg = load(common)?;
    let predictor: Box<dyn DirectionPredictor> = match choice {
        PredictorChoice::Signature => Box::new(SignaturePredictor),
        PredictorChoice::Model => {
            let path = model.unwrap_or_else(|| common.out.join("model.json"));
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let bundle: ModelBundle = serde_json::from_str(&text)?;
            if bundle.controller != cfg.controller {
                return Err(Error::Config(format!(
                    "model was trained for the {} controller, config selects {}",
                    bundle.controller, cfg.controller
                )));
            }
            Box::new(bundle)
        }
    };
    let summary = evaluate_policy(
        &cfg.setup(),
        predictor.as_ref(),
        cfg.n_trials,
        &mut cfg.rng(Stream::Trials),
    )?;
    write_json(&common.out.join("summary.json"), &summary)?;
    println!(
        "{}",
        json!({ "n_trials": summary.n_trials, "success_rate": summary.success_rate, "mean_corrections": summary.mean_corrections })
    );
    Ok(())
}

fn evaluation_table(r: &EvaluationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "| axis | controller | features | accuracy | rmse (mm) |");
    let _ = writeln!(s, "|---|---|---|---|---|");
    for row in &r.rows {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {:.3} | {:.3} |",
            row.axis.name(),
            row.controller,
            row.feature_mode.name(),
            row.accuracy,
            row.rmse
        );
    }
    s
}

fn report(common: &Common) -> Result<()> {
    let _cfg = load(common)?;
    let dir = &common.out;
    let mut s = String::from("# pih run report\n\n");
    let eval = dir.join("evaluation.json");
    if eval.exists() {
        let text = fs::read_to_string(&eval).map_err(|e| Error::io(&eval, e))?;
        let r: EvaluationReport = serde_json::from_str(&text)?;
        let _ = writeln!(s, "## Models ({} train / {} test)\n", r.n_train, r.n_test);
        s.push_str(&evaluation_table(&r));
        let _ = writeln!(
            s,
            "\n| axis | controller | feature | importance | std |\n|---|---|---|---|---|"
        );
        for row in &r.importance {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {:.3} | {:.3} |",
                row.axis.name(),
                row.controller,
                row.feature,
                row.mean,
                row.std
            );
        }
        s.push('\n');
    }
    let summ = dir.join("summary.json");
    if summ.exists() {
        let text = fs::read_to_string(&summ).map_err(|e| Error::io(&summ, e))?;
        let r: RunSummary = serde_json::from_str(&text)?;
        let mean = r
            .mean_corrections
            .map_or("n/a".to_string(), |m| format!("{m:.2}"));
        let _ = writeln!(
            s,
            "## Insertion\n\n{} trials, success rate {:.3}, mean corrections per success {mean}\n",
            r.n_trials, r.success_rate
        );
    }
    let conv = dir.join("convergence.csv");
    if conv.exists() {
        let rows = csv::Reader::from_path(&conv)?.records().count();
        let _ = writeln!(s, "## Convergence\n\n{rows} windows in `convergence.csv`\n");
    }
    if s.lines().count() <= 2 {
        return Err(Error::InsufficientData(format!(
            "no artifacts found in {}",
            dir.display()
        )));
    }
    let path = dir.join("report.md");
    fs::write(&path, &s).map_err(|e| Error::io(&path, e))?;
    print!("{s}");
    Ok(())
}
