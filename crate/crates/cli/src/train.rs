use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use zqvae_core::config::RunConfig;
use zqvae_core::data::{Dataset, Side};
use zqvae_core::losses::LossKind;
use zqvae_core::metrics::{reconstruction_rate, report_triple, MeanStd};
use zqvae_core::objective::{ModelParams, ObjectiveMode};
use zqvae_core::optim::{train, TrainData, TrainResult};
use zqvae_core::{Error, Result};

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum ModeArg {
    Instance,
    Global,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Run config JSON; every omitted block takes its defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run directory to create
    #[arg(long)]
    out: PathBuf,
    /// Sweep spec `beta=start:end:step`; one subdirectory per value
    #[arg(long)]
    sweep: Option<String>,
    /// Objective-mode override
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

/// Aggregate run record; also the schema the report command consumes.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunMetrics {
    pub mode: ObjectiveMode,
    pub recon: LossKind,
    pub reg: LossKind,
    pub beta: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub n_l: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub f: MeanStd,
    pub l: Option<MeanStd>,
    pub r: Option<MeanStd>,
    pub per_seed: Vec<SeedMetrics>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SeedMetrics {
    pub seed: u64,
    pub best_objective: f64,
    pub test_recon: f64,
}

fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MeanStd { mean, std: var.sqrt() }
}

/// `beta=start:end:step` → inclusive value list, rounded to 1e-10 so the
/// directory names stay clean under float accumulation.
fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("sweep must look like beta=start:end:step, got {spec:?}"));
    let (field, range) = spec.split_once('=').ok_or_else(bad)?;
    if field != "beta" {
        return Err(Error::Config(format!("only beta sweeps are supported, got {field:?}")));
    }
    let parts: Vec<f64> = range
        .split(':')
        .map(|p| p.parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, end, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0) || end < start {
        return Err(Error::Config("sweep needs end >= start and step > 0".into()));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| ((start + k as f64 * step) * 1e10).round() / 1e10).collect())
}

pub fn run(args: TrainArgs) -> Result<i32> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::from_str("{}")?,
    };
    if let Some(mode) = args.mode {
        cfg.objective.mode = match mode {
            ModeArg::Instance => ObjectiveMode::Instance,
            ModeArg::Global => ObjectiveMode::Global,
        };
    }
    match &args.sweep {
        None => run_single(&cfg, &args.out)?,
        Some(spec) => {
            let betas = parse_sweep(spec)?;
            std::fs::create_dir_all(&args.out)?;
            std::fs::write(args.out.join("config.resolved.json"), cfg.resolved_json()?)?;
            for beta in betas {
                let mut sub = cfg.clone();
                sub.objective.beta = beta;
                run_single(&sub, &args.out.join(format!("beta={beta}")))?;
            }
        }
    }
    println!("{}", args.out.display());
    Ok(0)
}

fn run_single(cfg: &RunConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("config.resolved.json"), cfg.resolved_json()?)?;
    let ds: Dataset<f64> = cfg.data.build()?;
    let enc = cfg.model.encoder()?;
    let dec = cfg.model.decoder()?;
    if ds.n_qubits() != enc.n_x {
        return Err(Error::Config(format!(
            "dataset states have {} qubits but model.n_x = {} ({})",
            ds.n_qubits(),
            enc.n_x,
            dir.display()
        )));
    }
    let spec = cfg.objective.spec::<f64>()?;
    let train_pts = ds.side_points(Side::Train)?;
    log::info!(
        "training {} seeds on {} points (beta={}, mode={:?}) -> {}",
        cfg.train.seeds.len(),
        train_pts.len(),
        cfg.objective.beta,
        cfg.objective.mode,
        dir.display()
    );
    let results = train(&enc, &dec, &spec, TrainData::Instance(&train_pts), &cfg.train)?;
    for r in &results {
        write_seed(dir, r)?;
    }

    let models: Vec<ModelParams<f64>> = results.iter().map(|r| r.params.clone()).collect();
    let (f, l, r) = if ds.labels.is_some() {
        let t = report_triple(&enc, &dec, &models, &ds, &cfg.qsvc)?;
        (t.f, Some(t.l), Some(t.r))
    } else {
        let fids: Vec<f64> = models
            .iter()
            .map(|m| reconstruction_rate(&enc, &dec, m, &ds, Side::Test))
            .collect::<Result<_>>()?;
        (mean_std(&fids), None, None)
    };
    let per_seed = results
        .iter()
        .map(|res| {
            Ok(SeedMetrics {
                seed: res.seed,
                best_objective: res.trace.best_objective,
                test_recon: reconstruction_rate(&enc, &dec, &res.params, &ds, Side::Test)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let metrics = RunMetrics {
        mode: cfg.objective.mode,
        recon: cfg.objective.recon,
        reg: cfg.objective.reg,
        beta: cfg.objective.beta,
        n_a: enc.n_aux,
        n_b: dec.n_aux,
        n_l: cfg.model.layers,
        n_train: ds.side_indices(Side::Train)?.len(),
        n_test: ds.side_indices(Side::Test)?.len(),
        f,
        l,
        r,
        per_seed,
    };
    std::fs::write(dir.join("metrics.json"), serde_json::to_string_pretty(&metrics)?)?;
    Ok(())
}

fn write_seed(dir: &Path, res: &TrainResult<f64>) -> Result<()> {
    let seed_dir = dir.join(format!("seed-{}", res.seed));
    std::fs::create_dir_all(&seed_dir)?;
    let params = serde_json::json!({
        "seed": res.seed,
        "theta_e": res.params.theta_e.values,
        "theta_d": res.params.theta_d.values,
    });
    std::fs::write(seed_dir.join("params.json"), serde_json::to_string_pretty(&params)?)?;
    let mut ndjson = String::new();
    for (k, v) in res.trace.evals.iter().enumerate() {
        writeln!(ndjson, r#"{{"eval":{k},"objective":{v}}}"#)
            .expect("string formatting is infallible");
    }
    let summary = serde_json::json!({
        "best_objective": res.trace.best_objective,
        "epoch_best": res.trace.epoch_best,
        "stop": res.trace.stop,
    });
    writeln!(ndjson, "{summary}").expect("string formatting is infallible");
    std::fs::write(seed_dir.join("trace.ndjson"), ndjson)?;
    Ok(())
}
