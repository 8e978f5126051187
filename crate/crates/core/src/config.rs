//! Run configuration: one JSON file with {data, model, objective, train,
//! qsvc, report} blocks. Every field has a default; serializing the parsed
//! config back out yields the fully-resolved form.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{default_aux_count, DecoderSpec, EncoderSpec};
use crate::data::{gen_swiss_roll, gen_synthetic_quantum, ingest_csv, load_bundle, split, Dataset};
use crate::error::{Error, Result};
use crate::losses::LossKind;
use crate::objective::{ObjectiveMode, ObjectiveSpec};
use crate::optim::TrainConfig;
use crate::qsvc::QsvcConfig;
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    SyntheticQuantum,
    SwissRoll,
    Csv,
    Bundle,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub kind: DataKind,
    pub n: usize,
    pub seed: u64,
    pub noise_dims: usize,
    pub noise_sd: f64,
    /// source file (csv) or directory (bundle)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,
    /// embedding width for csv ingestion
    pub n_qubits: usize,
    pub train_ratio: f64,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            kind: DataKind::SyntheticQuantum,
            n: 1000,
            seed: 7,
            noise_dims: 5,
            noise_sd: 0.2,
            path: None,
            label_column: None,
            n_qubits: 2,
            train_ratio: 0.7,
        }
    }
}

impl DataConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Config("data.n must be >= 1".into()));
        }
        if !(self.train_ratio > 0.0 && self.train_ratio < 1.0) {
            return Err(Error::Config("data.train_ratio must lie in (0,1)".into()));
        }
        if matches!(self.kind, DataKind::Csv | DataKind::Bundle) && self.path.is_none() {
            return Err(Error::Config("data.path is required for csv/bundle data".into()));
        }
        Ok(())
    }

    /// Builds (or loads) the dataset and guarantees a train/test split.
    pub fn build<T: Scalar>(&self) -> Result<Dataset<T>> {
        self.validate()?;
        let path = self.path.as_deref();
        let mut ds = match self.kind {
            DataKind::SyntheticQuantum => gen_synthetic_quantum(self.n, self.seed)?,
            DataKind::SwissRoll => {
                gen_swiss_roll(self.n, self.noise_dims, self.noise_sd, self.seed)?
            }
            DataKind::Csv => ingest_csv(
                path.unwrap(),
                self.label_column.as_deref(),
                self.n_qubits,
                self.train_ratio,
                self.seed,
            )?,
            DataKind::Bundle => load_bundle(path.unwrap())?,
        };
        if ds.split.is_none() {
            let mut rng = Rng::seed_from_u64(self.seed ^ 0x53504C4954); // "SPLIT"
            let stratify = ds.labels.is_some();
            split(&mut ds, self.train_ratio, stratify, &mut rng)?;
        }
        Ok(ds)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub n_x: usize,
    pub n_z: usize,
    /// encoder/decoder auxiliary counts; absent means the N_X + 2·N_Z default
    pub enc_aux: Option<usize>,
    pub dec_aux: Option<usize>,
    pub layers: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { n_x: 2, n_z: 1, enc_aux: None, dec_aux: None, layers: 3 }
    }
}

impl ModelConfig {
    pub fn encoder(&self) -> Result<EncoderSpec> {
        let aux = self.enc_aux.unwrap_or_else(|| default_aux_count(self.n_x, self.n_z));
        EncoderSpec::new(self.n_x, self.n_z, aux, self.layers)
    }

    pub fn decoder(&self) -> Result<DecoderSpec> {
        let aux = self.dec_aux.unwrap_or_else(|| default_aux_count(self.n_x, self.n_z));
        DecoderSpec::new(self.n_x, self.n_z, aux, self.layers)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveConfig {
    pub recon: LossKind,
    pub reg: LossKind,
    pub beta: f64,
    pub mode: ObjectiveMode,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        ObjectiveConfig {
            recon: LossKind::Fidelity,
            reg: LossKind::Jsd,
            beta: 0.0,
            mode: ObjectiveMode::Instance,
        }
    }
}

impl ObjectiveConfig {
    pub fn spec<T: Scalar>(&self) -> Result<ObjectiveSpec<T>> {
        ObjectiveSpec::new(self.recon, self.reg, T::of(self.beta), self.mode)
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// per-latent Bloch coordinate dump (x,y,z,label,beta) for plotting
    pub bloch_dump: bool,
    /// write train/test kernel matrices as CSV
    pub kernel_csv: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { bloch_dump: true, kernel_csv: false }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataConfig,
    pub model: ModelConfig,
    pub objective: ObjectiveConfig,
    pub train: TrainConfig,
    pub qsvc: QsvcConfig,
    pub report: ReportConfig,
}

impl RunConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_str(&std::fs::read_to_string(path)?)
    }

    /// The fully-resolved form: every applied default spelled out, including
    /// the computed auxiliary counts.
    pub fn resolved_json(&self) -> Result<String> {
        let mut resolved = self.clone();
        resolved.model.enc_aux = Some(self.model.encoder()?.n_aux);
        resolved.model.dec_aux = Some(self.model.decoder()?.n_aux);
        Ok(serde_json::to_string_pretty(&resolved)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.data.validate()?;
        self.model.encoder()?;
        self.model.decoder()?;
        self.objective.spec::<f64>()?;
        self.train.validate()?;
        if self.qsvc.map_layers < 1 {
            return Err(Error::Config("qsvc.map_layers must be >= 1".into()));
        }
        if !(self.qsvc.c_reg > 0.0) {
            return Err(Error::Config("qsvc.c_reg must be positive".into()));
        }
        Ok(())
    }
}
