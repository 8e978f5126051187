use std::path::PathBuf;

use clap::Args;
use zqvae_core::config::{DataConfig, DataKind};
use zqvae_core::data::save_bundle;
use zqvae_core::Result;

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum KindArg {
    SyntheticQuantum,
    SwissRoll,
    Csv,
    Bundle,
}

impl From<KindArg> for DataKind {
    fn from(k: KindArg) -> DataKind {
        match k {
            KindArg::SyntheticQuantum => DataKind::SyntheticQuantum,
            KindArg::SwissRoll => DataKind::SwissRoll,
            KindArg::Csv => DataKind::Csv,
            KindArg::Bundle => DataKind::Bundle,
        }
    }
}

#[derive(Args)]
pub struct GenArgs {
    /// Generator kind (csv/bundle re-ingest an existing source via --path)
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Number of points (generated kinds)
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output bundle directory
    #[arg(long)]
    out: PathBuf,
    /// Swiss-roll: appended Gaussian noise dimensions
    #[arg(long, default_value_t = 5)]
    noise_dims: usize,
    /// Swiss-roll: noise standard deviation
    #[arg(long, default_value_t = 0.2)]
    noise_sd: f64,
    /// Source file (csv) or directory (bundle)
    #[arg(long)]
    path: Option<PathBuf>,
    /// CSV label column header (defaults to unlabeled ingestion)
    #[arg(long)]
    label_column: Option<String>,
    /// CSV embedding width in qubits
    #[arg(long, default_value_t = 2)]
    n_qubits: usize,
    #[arg(long, default_value_t = 0.7)]
    train_ratio: f64,
}

pub fn run(args: GenArgs) -> Result<i32> {
    let cfg = DataConfig {
        kind: args.kind.into(),
        n: args.n,
        seed: args.seed,
        noise_dims: args.noise_dims,
        noise_sd: args.noise_sd,
        path: args.path,
        label_column: args.label_column,
        n_qubits: args.n_qubits,
        train_ratio: args.train_ratio,
    };
    let ds = cfg.build::<f64>()?;
    std::fs::create_dir_all(&args.out)?;
    save_bundle(&ds, &args.out)?;
    let labeled = if ds.labels.is_some() { "labeled" } else { "unlabeled" };
    log::info!(
        "wrote {} {labeled} {}-qubit states to {}",
        ds.n_points(),
        ds.n_qubits(),
        args.out.display()
    );
    println!("{}", args.out.display());
    Ok(0)
}
