use std::path::{Path, PathBuf};

use clap::Args;
use zqvae_core::channel::AnsatzParams;
use zqvae_core::config::RunConfig;
use zqvae_core::data::Side;
use zqvae_core::metrics::map_side;
use zqvae_core::objective::ModelParams;
use zqvae_core::qstate::bloch_coords;
use zqvae_core::qsvc::kernel_matrix;
use zqvae_core::{Error, Result};

use crate::train::RunMetrics;

#[derive(Args)]
pub struct ReportArgs {
    /// Completed run directories, or parents holding them one level down
    #[arg(required = true)]
    runs: Vec<PathBuf>,
    /// Write the aggregate table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the aggregate rows as JSON
    #[arg(long)]
    json: Option<PathBuf>,
}

fn is_run_dir(p: &Path) -> bool {
    p.join("config.resolved.json").is_file() && p.join("metrics.json").is_file()
}

/// Resolve the argument paths to run directories; a parent counts through its
/// immediate children.
fn collect_runs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut runs = Vec::new();
    for p in paths {
        if is_run_dir(p) {
            runs.push(p.clone());
            continue;
        }
        if !p.is_dir() {
            return Err(Error::Invalid(format!("{} is not a directory", p.display())));
        }
        let mut children: Vec<PathBuf> = std::fs::read_dir(p)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|c| is_run_dir(c))
            .collect();
        children.sort();
        if children.is_empty() {
            return Err(Error::Invalid(format!(
                "no completed runs under {} (need config.resolved.json + metrics.json)",
                p.display()
            )));
        }
        runs.append(&mut children);
    }
    Ok(runs)
}

fn load_metrics(dir: &Path) -> Result<RunMetrics> {
    let path = dir.join("metrics.json");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Invalid(format!("{} does not match the run schema: {e}", path.display())))
}

fn load_seed_models(dir: &Path) -> Result<Vec<(u64, ModelParams<f64>)>> {
    let mut models = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let Some(seed) = name.strip_prefix("seed-").and_then(|s| s.parse::<u64>().ok()) else {
            continue;
        };
        let text = std::fs::read_to_string(path.join("params.json"))?;
        let v: serde_json::Value = serde_json::from_str(&text)?;
        let vec_of = |key: &str| -> Result<Vec<f64>> {
            v[key]
                .as_array()
                .ok_or_else(|| Error::Invalid(format!("params.json in {name} lacks {key}")))?
                .iter()
                .map(|x| {
                    x.as_f64()
                        .ok_or_else(|| Error::Invalid(format!("non-numeric {key} entry in {name}")))
                })
                .collect()
        };
        models.push((
            seed,
            ModelParams {
                theta_e: AnsatzParams::new(vec_of("theta_e")?),
                theta_d: AnsatzParams::new(vec_of("theta_d")?),
            },
        ));
    }
    models.sort_by_key(|(seed, _)| *seed);
    if models.is_empty() {
        return Err(Error::Invalid(format!("{} holds no seed-* results", dir.display())));
    }
    Ok(models)
}

/// Best seed by stored objective (falls back to the first on schema drift).
fn best_seed(metrics: &RunMetrics) -> u64 {
    metrics
        .per_seed
        .iter()
        .min_by(|a, b| a.best_objective.total_cmp(&b.best_objective))
        .map(|s| s.seed)
        .unwrap_or(0)
}

fn write_bloch(dir: &Path, cfg: &RunConfig, model: &ModelParams<f64>) -> Result<()> {
    let enc = cfg.model.encoder()?;
    if enc.n_z != 1 {
        log::warn!(
            "{}: bloch dump needs a single latent qubit (n_z = {}), skipping",
            dir.display(),
            enc.n_z
        );
        return Ok(());
    }
    let dec = cfg.model.decoder()?;
    let ds = cfg.data.build::<f64>()?;
    let (latents, _) = map_side(&enc, &dec, model, &ds, Side::All)?;
    let labels = ds.labels.clone().unwrap_or_else(|| vec![0; latents.len()]);
    let mut w = csv::Writer::from_path(dir.join("bloch.csv"))?;
    w.write_record(["x", "y", "z", "label", "beta"])?;
    for (zeta, label) in latents.iter().zip(&labels) {
        let (x, y, z) = bloch_coords(zeta, 0)?;
        w.write_record([
            format!("{x}"),
            format!("{y}"),
            format!("{z}"),
            format!("{label}"),
            format!("{}", cfg.objective.beta),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_kernel(dir: &Path, cfg: &RunConfig, model: &ModelParams<f64>) -> Result<()> {
    let enc = cfg.model.encoder()?;
    let dec = cfg.model.decoder()?;
    let ds = cfg.data.build::<f64>()?;
    let (latents, _) = map_side(&enc, &dec, model, &ds, Side::Train)?;
    let (spec, params) = cfg.qsvc.kernel_for::<f64>(enc.n_z)?;
    let gram = kernel_matrix(&latents, &spec, &params)?;
    let mut w = csv::Writer::from_path(dir.join("kernel.csv"))?;
    for row in &gram {
        w.write_record(row.iter().map(|v| format!("{v}")))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(serde::Serialize)]
struct Row {
    run: String,
    n_a: usize,
    n_l: usize,
    beta: f64,
    recon: String,
    reg: String,
    f_mean: f64,
    f_std: f64,
    l_mean: Option<f64>,
    l_std: Option<f64>,
    r_mean: Option<f64>,
    r_std: Option<f64>,
}

pub fn run(args: ReportArgs) -> Result<i32> {
    let runs = collect_runs(&args.runs)?;
    let mut rows = Vec::with_capacity(runs.len());
    for dir in &runs {
        let metrics = load_metrics(dir)?;
        let cfg = RunConfig::from_path(&dir.join("config.resolved.json"))?;
        if cfg.report.bloch_dump || cfg.report.kernel_csv {
            let models = load_seed_models(dir)?;
            let best = best_seed(&metrics);
            let model = &models
                .iter()
                .find(|(s, _)| *s == best)
                .unwrap_or(&models[0])
                .1;
            if cfg.report.bloch_dump {
                write_bloch(dir, &cfg, model)?;
            }
            if cfg.report.kernel_csv {
                write_kernel(dir, &cfg, model)?;
            }
        }
        rows.push(Row {
            run: dir.display().to_string(),
            n_a: metrics.n_a,
            n_l: metrics.n_l,
            beta: metrics.beta,
            recon: serde_json::to_value(metrics.recon)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            reg: serde_json::to_value(metrics.reg)?.as_str().unwrap_or_default().to_string(),
            f_mean: metrics.f.mean,
            f_std: metrics.f.std,
            l_mean: metrics.l.map(|m| m.mean),
            l_std: metrics.l.map(|m| m.std),
            r_mean: metrics.r.map(|m| m.mean),
            r_std: metrics.r.map(|m| m.std),
        });
    }
    rows.sort_by(|a, b| {
        (a.n_a, a.n_l)
            .cmp(&(b.n_a, b.n_l))
            .then(a.beta.total_cmp(&b.beta))
            .then(a.run.cmp(&b.run))
    });

    let table = {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &rows {
            w.serialize(row)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?)
            .expect("csv output is UTF-8")
    };
    match &args.out {
        Some(path) => std::fs::write(path, &table)?,
        None => print!("{table}"),
    }
    if let Some(path) = &args.json {
        std::fs::write(path, serde_json::to_string_pretty(&rows)?)?;
    }
    Ok(0)
}
