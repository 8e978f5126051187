//! Dataset generators (synthetic quantum, Swiss Roll), CSV ingestion with the
//! global-then-per-point normalization pipeline, train/test splitting, and the
//! on-disk bundle format.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::{kron, CMatrix, C};
use crate::qstate::{amplitude_embed, DensityMatrix};
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
    pub params: serde_json::Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Train,
    Test,
    All,
}

/// A collection of instance states with optional ±1 labels and a train/test
/// split. Instance inputs are pure unless the generator explicitly produces
/// mixed states (the synthetic-quantum recipe does).
#[derive(Clone, Debug)]
pub struct Dataset<T: Scalar> {
    pub points: Vec<DensityMatrix<T>>,
    pub labels: Option<Vec<i8>>,
    pub split: Option<Split>,
    pub provenance: Provenance,
    pub allows_mixed: bool,
    /// globally-normalized feature rows (CSV ingestion only; backs export)
    pub features: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(
        points: Vec<DensityMatrix<T>>,
        labels: Option<Vec<i8>>,
        provenance: Provenance,
        allows_mixed: bool,
    ) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Invalid("dataset needs at least one point".into()))?;
        let n_qubits = first.n_qubits();
        for p in &points {
            if p.n_qubits() != n_qubits {
                return Err(Error::DimMismatch("mixed qubit counts in dataset".into()));
            }
            if !allows_mixed && (p.purity() - T::one()).abs() > T::of(1e-9) {
                return Err(Error::Invalid(format!(
                    "non-pure point (purity {}) in a pure dataset",
                    p.purity().to_f64()
                )));
            }
        }
        if let Some(ls) = &labels {
            if ls.len() != points.len() {
                return Err(Error::DimMismatch("label count vs point count".into()));
            }
            if ls.iter().any(|&l| l != 1 && l != -1) {
                return Err(Error::Invalid("labels must be +1/-1".into()));
            }
        }
        Ok(Dataset { points, labels, split: None, provenance, allows_mixed, features: None })
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.points[0].n_qubits()
    }

    pub fn side_indices(&self, side: Side) -> Result<Vec<usize>> {
        let split = || {
            self.split
                .as_ref()
                .ok_or_else(|| Error::Invalid("dataset has no train/test split".into()))
        };
        let idx = match side {
            Side::All => (0..self.points.len()).collect(),
            Side::Train => split()?.train.clone(),
            Side::Test => split()?.test.clone(),
        };
        if idx.is_empty() {
            return Err(Error::Invalid("selected split side is empty".into()));
        }
        Ok(idx)
    }

    pub fn side_points(&self, side: Side) -> Result<Vec<DensityMatrix<T>>> {
        Ok(self.side_indices(side)?.iter().map(|&i| self.points[i].clone()).collect())
    }

    pub fn side_labels(&self, side: Side) -> Result<Option<Vec<i8>>> {
        match &self.labels {
            None => Ok(None),
            Some(ls) => Ok(Some(self.side_indices(side)?.iter().map(|&i| ls[i]).collect())),
        }
    }
}

/// Single-qubit state from a Bloch vector (‖b‖ ≤ 1).
fn bloch_state<T: Scalar>(b: (T, T, T)) -> CMatrix<T> {
    let half = T::of(0.5);
    CMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => C::new((T::one() + b.2) * half, T::zero()),
        (0, 1) => C::new(b.0 * half, -b.1 * half),
        (1, 0) => C::new(b.0 * half, b.1 * half),
        _ => C::new((T::one() - b.2) * half, T::zero()),
    })
}

/// Controlled-Ry with the first (most significant) qubit as control.
fn cry<T: Scalar>(theta: T) -> CMatrix<T> {
    let half = T::of(0.5);
    let (c, s) = ((theta * half).cos(), (theta * half).sin());
    CMatrix::from_fn(4, |i, j| {
        let v = match (i, j) {
            (0, 0) | (1, 1) => T::one(),
            (2, 2) | (3, 3) => c,
            (2, 3) => -s,
            (3, 2) => s,
            _ => T::zero(),
        };
        C::new(v, T::zero())
    })
}

fn synth_point<T: Scalar>(b: (T, T, T), theta: T) -> Result<DensityMatrix<T>> {
    let pre = kron(&bloch_state(b), DensityMatrix::<T>::zero_state(1).mat())?;
    let u = cry(theta);
    DensityMatrix::new(2, u.mul(&pre).mul(&u.adjoint()))
}

/// Bloch vector of shell radius r ∈ [0.6, 0.7], direction uniform on the sphere.
fn sample_shell_bloch<T: Scalar>(rng: &mut Rng) -> (T, T, T) {
    let r: T = rng.uniform(T::of(0.6), T::of(0.7));
    let z: T = rng.uniform(-T::one(), T::one());
    let phi: T = rng.uniform(T::zero(), T::of(std::f64::consts::TAU));
    let s = (T::one() - z * z).max(T::zero()).sqrt();
    (r * s * phi.cos(), r * s * phi.sin(), r * z)
}

/// Two-qubit states: a mixed first qubit with Bloch norm in [0.6, 0.7], a |0⟩
/// second qubit, then Controlled-Ry(θ) with θ ~ N(π/2, π/20). The outputs are
/// intentionally mixed, so the dataset carries `allows_mixed`.
pub fn gen_synthetic_quantum<T: Scalar>(n: usize, seed: u64) -> Result<Dataset<T>> {
    if n == 0 {
        return Err(Error::Config("need at least one point".into()));
    }
    let mut rng = Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let b = sample_shell_bloch::<T>(&mut rng);
        let theta = T::of(std::f64::consts::FRAC_PI_2)
            + rng.normal::<T>() * T::of(std::f64::consts::PI / 20.0);
        points.push(synth_point(b, theta)?);
    }
    Dataset::new(
        points,
        None,
        Provenance {
            generator: "synthetic_quantum".into(),
            seed: Some(seed),
            params: json!({ "n": n }),
        },
        true,
    )
}

/// 3-D Swiss roll (t = 1.5π(1+2u): (t·cos t, h, t·sin t), h ~ U[0,21)) plus
/// Gaussian noise dimensions, per-point L2 normalized and amplitude-embedded;
/// ±1 labels split the roll at the median of t.
pub fn gen_swiss_roll<T: Scalar>(
    n: usize,
    noise_dims: usize,
    noise_sd: f64,
    seed: u64,
) -> Result<Dataset<T>> {
    if n == 0 {
        return Err(Error::Config("need at least one point".into()));
    }
    let dim = 3 + noise_dims;
    let n_qubits = dim.next_power_of_two().trailing_zeros().max(1) as usize;
    let mut rng = Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut ts = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.uniform(0.0, 1.0);
        let t = 1.5 * std::f64::consts::PI * (1.0 + 2.0 * u);
        let h: f64 = rng.uniform(0.0, 21.0);
        let mut row = vec![T::of(t * t.cos()), T::of(h), T::of(t * t.sin())];
        for _ in 0..noise_dims {
            row.push(T::of(rng.normal::<f64>() * noise_sd));
        }
        rows.push(row);
        ts.push(t);
    }
    let mut sorted = ts.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if n % 2 == 0 {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    } else {
        sorted[n / 2]
    };
    let labels: Vec<i8> = ts.iter().map(|&t| if t > median { 1 } else { -1 }).collect();
    let points = rows
        .iter()
        .map(|row| amplitude_embed(row, n_qubits))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(
        points,
        Some(labels),
        Provenance {
            generator: "swiss_roll".into(),
            seed: Some(seed),
            params: json!({ "n": n, "noise_dims": noise_dims, "noise_sd": noise_sd }),
        },
        false,
    )
}

/// Populates `dataset.split` with disjoint, exhaustive train/test index sets.
/// Stratified splitting keeps per-class balance within one point.
pub fn split<T: Scalar>(
    ds: &mut Dataset<T>,
    ratio: f64,
    stratify: bool,
    rng: &mut Rng,
) -> Result<()> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Config("split ratio must lie in (0,1)".into()));
    }
    let n = ds.points.len();
    let mut train = Vec::new();
    let mut test = Vec::new();
    let assign = |members: &[usize], rng: &mut Rng, train: &mut Vec<usize>, test: &mut Vec<usize>| -> Result<()> {
        let m = members.len();
        if m < 2 {
            return Err(Error::Invalid(
                "cannot split a group with fewer than 2 points".into(),
            ));
        }
        let k = ((m as f64 * ratio).round() as usize).clamp(1, m - 1);
        let perm = rng.permutation(m);
        for (pos, &pi) in perm.iter().enumerate() {
            if pos < k {
                train.push(members[pi]);
            } else {
                test.push(members[pi]);
            }
        }
        Ok(())
    };
    if stratify {
        let labels = ds
            .labels
            .as_ref()
            .ok_or_else(|| Error::Config("stratified split needs labels".into()))?;
        for class in [1i8, -1] {
            let members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
            if !members.is_empty() {
                assign(&members, rng, &mut train, &mut test)?;
            }
        }
    } else {
        let all: Vec<usize> = (0..n).collect();
        assign(&all, rng, &mut train, &mut test)?;
    }
    train.sort_unstable();
    test.sort_unstable();
    ds.split = Some(Split { train, test });
    Ok(())
}

/// Reads a rectangular numeric CSV (header row), applies the global
/// min-max → [0, π] normalization, per-row L2 via amplitude embedding, class
/// balancing (labels are downsampled to equal case/control counts), and a
/// stratified split at `train_ratio`.
pub fn ingest_csv<T: Scalar>(
    path: &Path,
    label_column: Option<&str>,
    n_qubits: usize,
    train_ratio: f64,
    seed: u64,
) -> Result<Dataset<T>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let label_idx = match label_column {
        Some(name) => Some(headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Config(format!("label column '{name}' not found in csv header"))
        })?),
        None => None,
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<i8> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::new();
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::Invalid(format!("non-numeric cell '{cell}' at row {r}, column {c}"))
            })?;
            if Some(c) == label_idx {
                if v == 1.0 {
                    labels.push(1);
                } else if v == -1.0 {
                    labels.push(-1);
                } else {
                    return Err(Error::Invalid(format!("label {v} at row {r} is not +1/-1")));
                }
            } else {
                row.push(v);
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Invalid("csv has no data rows".into()));
    }
    let n_feat = rows[0].len();
    if n_feat == 0 || n_feat > (1 << n_qubits) {
        return Err(Error::DimMismatch(format!(
            "{n_feat} features do not fit 2^{n_qubits} amplitudes"
        )));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for row in &rows {
        for &v in row {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !(hi > lo) {
        return Err(Error::Invalid("degenerate normalization: constant feature matrix".into()));
    }
    let scale = std::f64::consts::PI / (hi - lo);
    for row in &mut rows {
        for v in row.iter_mut() {
            *v = (*v - lo) * scale;
        }
    }
    let mut rng = Rng::seed_from_u64(seed);
    let keep: Vec<usize> = if label_idx.is_some() {
        // equal case/control counts: downsample the majority class
        let pos: Vec<usize> = (0..rows.len()).filter(|&i| labels[i] == 1).collect();
        let neg: Vec<usize> = (0..rows.len()).filter(|&i| labels[i] == -1).collect();
        let m = pos.len().min(neg.len());
        if m == 0 {
            return Err(Error::Invalid("one label class is empty".into()));
        }
        let mut kept: Vec<usize> = rng.permutation(pos.len())[..m].iter().map(|&p| pos[p]).collect();
        kept.extend(rng.permutation(neg.len())[..m].iter().map(|&p| neg[p]));
        kept.sort_unstable();
        kept
    } else {
        (0..rows.len()).collect()
    };
    let feats: Vec<Vec<T>> = keep
        .iter()
        .map(|&i| rows[i].iter().map(|&v| T::of(v)).collect())
        .collect();
    let points = feats
        .iter()
        .map(|row| amplitude_embed(row, n_qubits))
        .collect::<Result<Vec<_>>>()?;
    let kept_labels = label_idx
        .is_some()
        .then(|| keep.iter().map(|&i| labels[i]).collect::<Vec<_>>());
    let stratify = kept_labels.is_some();
    let mut ds = Dataset::new(
        points,
        kept_labels,
        Provenance {
            generator: "csv".into(),
            seed: Some(seed),
            params: json!({
                "path": path.display().to_string(),
                "label_column": label_column,
                "n_qubits": n_qubits,
                "train_ratio": train_ratio,
            }),
        },
        false,
    )?;
    ds.features = Some(feats);
    split(&mut ds, train_ratio, stratify, &mut rng)?;
    Ok(ds)
}

/// Writes the retained normalized feature rows (plus labels) back to CSV.
/// Min-max normalization is idempotent on its own output, so re-ingesting an
/// export reproduces the same states as long as no class rebalancing dropped
/// the rows holding the global extremes (label-free and already-balanced data
/// always round-trip).
pub fn export_csv<T: Scalar>(ds: &Dataset<T>, path: &Path) -> Result<()> {
    let feats = ds
        .features
        .as_ref()
        .ok_or_else(|| Error::Invalid("dataset holds no feature rows (not CSV-ingested)".into()))?;
    let mut w = csv::Writer::from_path(path)?;
    let n_feat = feats[0].len();
    let mut header: Vec<String> = (0..n_feat).map(|i| format!("f{i}")).collect();
    if ds.labels.is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    for (i, row) in feats.iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|&v| format!("{}", v.to_f64())).collect();
        if let Some(ls) = &ds.labels {
            rec.push(ls[i].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct BundleMeta {
    n_points: usize,
    n_qubits: usize,
    allows_mixed: bool,
    has_labels: bool,
    provenance: Provenance,
    split: Option<Split>,
}

/// Serializes the dataset as a directory: `meta.json` (provenance + split),
/// `states.bin` (dimension-prefixed little-endian complex matrices, f64
/// re/im pairs), `labels.csv` when labels are present.
pub fn save_bundle<T: Scalar>(ds: &Dataset<T>, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let meta = BundleMeta {
        n_points: ds.points.len(),
        n_qubits: ds.n_qubits(),
        allows_mixed: ds.allows_mixed,
        has_labels: ds.labels.is_some(),
        provenance: ds.provenance.clone(),
        split: ds.split.clone(),
    };
    let mut mf = BufWriter::new(File::create(dir.join("meta.json"))?);
    serde_json::to_writer_pretty(&mut mf, &meta)?;
    mf.write_all(b"\n")?;
    mf.flush()?;
    let mut w = BufWriter::new(File::create(dir.join("states.bin"))?);
    for p in &ds.points {
        w.write_all(&(p.dim() as u64).to_le_bytes())?;
        for i in 0..p.dim() {
            for j in 0..p.dim() {
                let e = p.mat().get(i, j);
                w.write_all(&e.re.to_f64().to_le_bytes())?;
                w.write_all(&e.im.to_f64().to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    if let Some(labels) = &ds.labels {
        let mut lw = csv::Writer::from_path(dir.join("labels.csv"))?;
        lw.write_record(["label"])?;
        for l in labels {
            lw.write_record([l.to_string()])?;
        }
        lw.flush()?;
    }
    Ok(())
}

fn read_exact_n<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn load_bundle<T: Scalar>(dir: &Path) -> Result<Dataset<T>> {
    let meta: BundleMeta = serde_json::from_reader(File::open(dir.join("meta.json"))?)?;
    let mut r = BufReader::new(File::open(dir.join("states.bin"))?);
    let mut points = Vec::with_capacity(meta.n_points);
    for _ in 0..meta.n_points {
        let dim = u64::from_le_bytes(read_exact_n::<8>(&mut r)?) as usize;
        if dim != 1 << meta.n_qubits {
            return Err(Error::Invalid(format!(
                "record dimension {dim} does not match meta ({} qubits)",
                meta.n_qubits
            )));
        }
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let re = f64::from_le_bytes(read_exact_n::<8>(&mut r)?);
                let im = f64::from_le_bytes(read_exact_n::<8>(&mut r)?);
                m.set(i, j, C::new(T::of(re), T::of(im)));
            }
        }
        points.push(DensityMatrix::new(meta.n_qubits, m)?);
    }
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::Invalid("trailing bytes in states.bin".into()));
    }
    let labels = if meta.has_labels {
        let mut lr = csv::Reader::from_path(dir.join("labels.csv"))?;
        let mut ls = Vec::new();
        for rec in lr.records() {
            let rec = rec?;
            ls.push(
                rec.get(0)
                    .unwrap_or("")
                    .trim()
                    .parse::<i8>()
                    .map_err(|_| Error::Invalid("bad label in labels.csv".into()))?,
            );
        }
        Some(ls)
    } else {
        None
    };
    let mut ds = Dataset::new(points, labels, meta.provenance, meta.allows_mixed)?;
    if let Some(s) = &meta.split {
        let n = ds.points.len();
        let mut seen = vec![false; n];
        for &i in s.train.iter().chain(&s.test) {
            if i >= n || seen[i] {
                return Err(Error::Invalid("split indices out of range or duplicated".into()));
            }
            seen[i] = true;
        }
    }
    ds.split = meta.split;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::bloch_coords;
    use approx::assert_abs_diff_eq;

    #[test]
    fn synthetic_quantum_shell_and_structure() {
        let ds = gen_synthetic_quantum::<f64>(50, 3).unwrap();
        assert!(ds.allows_mixed);
        assert!(ds.labels.is_none());
        assert_eq!(ds.n_points(), 50);
        for p in &ds.points {
            assert_eq!(p.n_qubits(), 2);
            assert_abs_diff_eq!(p.mat().trace().re, 1.0, epsilon = 1e-12);
            // mixed by construction: r < 1 on the first qubit
            assert!(p.purity() < 1.0 - 1e-3);
        }
        // pre-gate first-qubit Bloch norm sits on the sampled shell
        let mut rng = Rng::seed_from_u64(17);
        for _ in 0..300 {
            let (x, y, z) = sample_shell_bloch::<f64>(&mut rng);
            let norm = (x * x + y * y + z * z).sqrt();
            assert!((0.6..=0.7).contains(&norm), "norm {norm}");
        }
    }

    #[test]
    fn synthetic_quantum_zero_theta_is_identity_on_second_qubit() {
        let mut rng = Rng::seed_from_u64(4);
        for _ in 0..10 {
            let b = sample_shell_bloch::<f64>(&mut rng);
            let p = synth_point(b, 0.0).unwrap();
            let marg = partial_trace(p.mat(), 2, &[0]).unwrap();
            assert_abs_diff_eq!(marg.get(0, 0).re, 1.0, epsilon = 1e-12);
            assert!(marg.get(1, 1).re.abs() < 1e-12);
        }
    }

    #[test]
    fn synthetic_quantum_cry_oracle() {
        // control |1⟩ (bloch z=-1): target rotates to (cos θ/2, sin θ/2)
        let theta = 0.9_f64;
        let p = synth_point((0.0, 0.0, -1.0), theta).unwrap();
        let marg = partial_trace(p.mat(), 2, &[0]).unwrap();
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        assert_abs_diff_eq!(marg.get(0, 0).re, c * c, epsilon = 1e-12);
        assert_abs_diff_eq!(marg.get(1, 1).re, s * s, epsilon = 1e-12);
        assert_abs_diff_eq!(marg.get(0, 1).re, c * s, epsilon = 1e-12);
        // control |0⟩: nothing happens
        let p = synth_point((0.0, 0.0, 1.0), theta).unwrap();
        let marg = partial_trace(p.mat(), 2, &[0]).unwrap();
        assert_abs_diff_eq!(marg.get(0, 0).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn synthetic_quantum_deterministic() {
        let a = gen_synthetic_quantum::<f64>(10, 42).unwrap();
        let b = gen_synthetic_quantum::<f64>(10, 42).unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            assert_eq!(x.mat().max_abs_diff(y.mat()), 0.0);
        }
    }

    #[test]
    fn swiss_roll_shape_labels_and_balance() {
        let ds = gen_swiss_roll::<f64>(41, 5, 0.2, 7).unwrap();
        assert!(!ds.allows_mixed);
        assert_eq!(ds.n_qubits(), 3);
        let labels = ds.labels.as_ref().unwrap();
        let pos = labels.iter().filter(|&&l| l == 1).count() as i64;
        let neg = labels.len() as i64 - pos;
        assert!((pos - neg).abs() <= 1, "imbalance {pos} vs {neg}");
        for p in &ds.points {
            assert_abs_diff_eq!(p.purity(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn swiss_roll_zero_noise_leaves_tail_amplitudes_empty() {
        let ds = gen_swiss_roll::<f64>(12, 5, 0.0, 9).unwrap();
        for p in &ds.points {
            for k in 3..8 {
                assert_eq!(p.mat().get(k, k).re, 0.0);
            }
        }
    }

    #[test]
    fn swiss_roll_deterministic() {
        let a = gen_swiss_roll::<f64>(20, 5, 0.2, 11).unwrap();
        let b = gen_swiss_roll::<f64>(20, 5, 0.2, 11).unwrap();
        assert_eq!(a.labels, b.labels);
        for (x, y) in a.points.iter().zip(&b.points) {
            assert_eq!(x.mat().max_abs_diff(y.mat()), 0.0);
        }
    }

    #[test]
    fn split_counts_and_determinism() {
        let mut ds = gen_synthetic_quantum::<f64>(10, 1).unwrap();
        let mut rng = Rng::seed_from_u64(2);
        split(&mut ds, 0.7, false, &mut rng).unwrap();
        let s = ds.split.clone().unwrap();
        assert_eq!(s.train.len(), 7);
        assert_eq!(s.test.len(), 3);
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        let mut rng = Rng::seed_from_u64(2);
        let mut ds2 = gen_synthetic_quantum::<f64>(10, 1).unwrap();
        split(&mut ds2, 0.7, false, &mut rng).unwrap();
        assert_eq!(ds.split, ds2.split);
    }

    #[test]
    fn stratified_split_balances_classes() {
        let mut ds = gen_swiss_roll::<f64>(12, 5, 0.2, 5).unwrap();
        let mut rng = Rng::seed_from_u64(3);
        split(&mut ds, 0.5, true, &mut rng).unwrap();
        let s = ds.split.as_ref().unwrap();
        let labels = ds.labels.as_ref().unwrap();
        for side in [&s.train, &s.test] {
            let pos = side.iter().filter(|&&i| labels[i] == 1).count();
            assert_eq!(pos, 3, "each side holds half of each 6-member class");
            assert_eq!(side.len(), 6);
        }
    }

    #[test]
    fn split_rejects_bad_input() {
        let mut ds = gen_synthetic_quantum::<f64>(4, 1).unwrap();
        let mut rng = Rng::seed_from_u64(1);
        assert!(split(&mut ds, 0.0, false, &mut rng).is_err());
        assert!(split(&mut ds, 1.0, false, &mut rng).is_err());
        assert!(split(&mut ds, 0.5, true, &mut rng).is_err()); // no labels
        let mut one = gen_synthetic_quantum::<f64>(1, 1).unwrap();
        assert!(split(&mut one, 0.7, false, &mut rng).is_err());
        // a 2-member class survives, a 1-member class does not
        let mut ds = gen_swiss_roll::<f64>(4, 5, 0.2, 1).unwrap();
        ds.labels = Some(vec![1, 1, 1, -1]);
        assert!(split(&mut ds, 0.5, true, &mut rng).is_err());
    }

    #[test]
    fn ingest_toy_pipeline_oracle() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.csv");
        std::fs::write(&path, "a,b\n0,1\n1,0\n").unwrap();
        let ds = ingest_csv::<f64>(&path, None, 1, 0.5, 1).unwrap();
        let f = ds.features.as_ref().unwrap();
        assert_abs_diff_eq!(f[0][0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f[0][1], std::f64::consts::PI, epsilon = 1e-15);
        assert_abs_diff_eq!(f[1][0], std::f64::consts::PI, epsilon = 1e-15);
        // states collapse to the basis directions
        assert_abs_diff_eq!(ds.points[0].mat().get(1, 1).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ds.points[1].mat().get(0, 0).re, 1.0, epsilon = 1e-12);
        let s = ds.split.as_ref().unwrap();
        assert_eq!(s.train.len() + s.test.len(), 2);
    }

    #[test]
    fn ingest_rejects_malformed_input() {
        let dir = tempfile::tempdir().unwrap();
        let write = |name: &str, body: &str| {
            let p = dir.path().join(name);
            std::fs::write(&p, body).unwrap();
            p
        };
        let p = write("bad.csv", "a,b\n0,x\n1,0\n");
        assert!(ingest_csv::<f64>(&p, None, 1, 0.5, 1).is_err());
        let p = write("const.csv", "a,b\n2,2\n2,2\n");
        let err = ingest_csv::<f64>(&p, None, 1, 0.5, 1).unwrap_err();
        assert!(err.to_string().contains("degenerate normalization"));
        let p = write("nolabel.csv", "a,b\n0,1\n1,0\n");
        assert!(ingest_csv::<f64>(&p, Some("y"), 1, 0.5, 1).is_err());
        let p = write("single.csv", "a,b\n0,1\n");
        assert!(ingest_csv::<f64>(&p, None, 1, 0.7, 1).is_err());
        let p = write("wide.csv", "a,b,c\n0,1,2\n1,0,2\n");
        assert!(ingest_csv::<f64>(&p, None, 1, 0.5, 1).is_err());
        let p = write("badlabel.csv", "a,b,y\n0,1,2\n1,0,1\n");
        assert!(ingest_csv::<f64>(&p, Some("y"), 1, 0.5, 1).is_err());
    }

    #[test]
    fn ingest_balances_labelled_classes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("unbalanced.csv");
        std::fs::write(
            &path,
            "a,b,y\n0,1,1\n1,0,1\n2,1,1\n3,2,1\n1,3,-1\n0,2,-1\n",
        )
        .unwrap();
        let ds = ingest_csv::<f64>(&path, Some("y"), 1, 0.5, 4).unwrap();
        let labels = ds.labels.as_ref().unwrap();
        assert_eq!(labels.len(), 4);
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 2);
        let s = ds.split.as_ref().unwrap();
        for side in [&s.train, &s.test] {
            assert_eq!(side.iter().filter(|&&i| labels[i] == 1).count(), 1);
        }
    }

    #[test]
    fn export_then_ingest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let mut rng = Rng::seed_from_u64(8);
        let mut body = String::from("a,b,c,d,y\n");
        for i in 0..6 {
            for _ in 0..4 {
                body.push_str(&format!("{},", rng.uniform(-3.0, 5.0)));
            }
            body.push_str(if i < 3 { "1\n" } else { "-1\n" });
        }
        std::fs::write(&path, body).unwrap();
        let ds = ingest_csv::<f64>(&path, Some("y"), 2, 0.5, 2).unwrap();
        let out = dir.path().join("export.csv");
        export_csv(&ds, &out).unwrap();
        let ds2 = ingest_csv::<f64>(&out, Some("label"), 2, 0.5, 9).unwrap();
        assert_eq!(ds.labels, ds2.labels);
        for (a, b) in ds.points.iter().zip(&ds2.points) {
            assert!(a.mat().max_abs_diff(b.mat()) < 1e-12);
        }
    }

    #[test]
    fn bundle_round_trip_exact() {
        let dir = tempfile::tempdir().unwrap();
        let mut ds = gen_swiss_roll::<f64>(15, 5, 0.2, 21).unwrap();
        let mut rng = Rng::seed_from_u64(1);
        split(&mut ds, 0.7, true, &mut rng).unwrap();
        save_bundle(&ds, dir.path()).unwrap();
        let back = load_bundle::<f64>(dir.path()).unwrap();
        assert_eq!(back.labels, ds.labels);
        assert_eq!(back.split, ds.split);
        assert_eq!(back.allows_mixed, ds.allows_mixed);
        assert_eq!(back.provenance.generator, "swiss_roll");
        for (a, b) in ds.points.iter().zip(&back.points) {
            assert_eq!(a.mat().max_abs_diff(b.mat()), 0.0);
        }
        // mixed states survive the purity gate via allows_mixed
        let dir2 = tempfile::tempdir().unwrap();
        let ds = gen_synthetic_quantum::<f64>(5, 33).unwrap();
        save_bundle(&ds, dir2.path()).unwrap();
        let back = load_bundle::<f64>(dir2.path()).unwrap();
        assert!(back.allows_mixed);
        for (a, b) in ds.points.iter().zip(&back.points) {
            assert_eq!(a.mat().max_abs_diff(b.mat()), 0.0);
        }
    }

    #[test]
    fn dataset_validation() {
        let mixed = gen_synthetic_quantum::<f64>(3, 1).unwrap();
        // same points rejected when purity is demanded
        assert!(Dataset::new(mixed.points.clone(), None, mixed.provenance.clone(), false).is_err());
        assert!(Dataset::<f64>::new(vec![], None, mixed.provenance.clone(), true).is_err());
        let pure = gen_swiss_roll::<f64>(4, 5, 0.2, 1).unwrap();
        assert!(Dataset::new(pure.points.clone(), Some(vec![1, -1]), pure.provenance.clone(), false).is_err());
        assert!(Dataset::new(pure.points.clone(), Some(vec![1, -1, 0, 1]), pure.provenance.clone(), false).is_err());
    }

    #[test]
    fn side_selection() {
        let mut ds = gen_swiss_roll::<f64>(10, 5, 0.2, 2).unwrap();
        assert!(ds.side_points(Side::Train).is_err()); // no split yet
        assert_eq!(ds.side_points(Side::All).unwrap().len(), 10);
        let mut rng = Rng::seed_from_u64(1);
        split(&mut ds, 0.7, true, &mut rng).unwrap();
        // 5+5 classes, per-class round(3.5) = 4 train each
        assert_eq!(ds.side_points(Side::Train).unwrap().len(), 8);
        assert_eq!(ds.side_labels(Side::Test).unwrap().unwrap().len(), 2);
        let (x, y, z) = bloch_coords(&ds.points[0], 0).unwrap();
        assert!((x * x + y * y + z * z).sqrt() <= 1.0 + 1e-9);
    }
}
