//! Quantum-kernel support vector classifier: ansatz feature map, fidelity
//! kernel with optional tan rescaling, SMO dual solver, accuracy/AUC scoring.

use serde::{Deserialize, Serialize};

use crate::channel::{build_unitary, AnsatzParams, AnsatzSpec};
use crate::error::{Error, Result};
use crate::linalg::eigh;
use crate::losses::fidelity;
use crate::qstate::DensityMatrix;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelScaling {
    None,
    /// x ↦ tan(π·x/2.03): spreads the fidelity range concentrated near 1
    /// (finite at x = 1 because 2.03 > 2).
    Tan,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelSpec {
    pub feature_map: AnsatzSpec,
    pub scaling: KernelScaling,
}

impl KernelSpec {
    pub fn new(feature_map: AnsatzSpec, scaling: KernelScaling) -> Result<Self> {
        if feature_map.n_layers < 1 {
            return Err(Error::Config("feature map needs at least one layer".into()));
        }
        Ok(KernelSpec { feature_map, scaling })
    }
}

/// Kernel recipe independent of state arity: the concrete feature map is
/// instantiated per qubit count with parameters frozen at a seeded draw.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QsvcConfig {
    #[serde(default = "default_scaling")]
    pub scaling: KernelScaling,
    #[serde(default = "default_map_layers")]
    pub map_layers: usize,
    #[serde(default)]
    pub map_seed: u64,
    #[serde(default = "default_c_reg")]
    pub c_reg: f64,
}

fn default_scaling() -> KernelScaling {
    KernelScaling::Tan
}
fn default_map_layers() -> usize {
    3
}
fn default_c_reg() -> f64 {
    1.0
}

impl Default for QsvcConfig {
    fn default() -> Self {
        QsvcConfig {
            scaling: default_scaling(),
            map_layers: default_map_layers(),
            map_seed: 0,
            c_reg: default_c_reg(),
        }
    }
}

impl QsvcConfig {
    pub fn kernel_for<T: Scalar>(&self, n_qubits: usize) -> Result<(KernelSpec, AnsatzParams<T>)> {
        let spec = KernelSpec::new(AnsatzSpec::new(n_qubits, self.map_layers), self.scaling)?;
        let mut rng = crate::rng::Rng::seed_from_u64(self.map_seed);
        let params = AnsatzParams::random_uniform(&spec.feature_map, &mut rng);
        Ok((spec, params))
    }
}

fn rescale<T: Scalar>(scaling: KernelScaling, x: T) -> T {
    match scaling {
        KernelScaling::None => x,
        KernelScaling::Tan => {
            (T::of(std::f64::consts::PI) * x.min(T::one()).max(T::zero()) / T::of(2.03)).tan()
        }
    }
}

fn map_states<T: Scalar>(
    states: &[DensityMatrix<T>],
    spec: &KernelSpec,
    params: &AnsatzParams<T>,
) -> Result<Vec<DensityMatrix<T>>> {
    let u = build_unitary(&spec.feature_map, params)?;
    states
        .iter()
        .map(|s| {
            if s.dim() != u.dim() {
                return Err(Error::DimMismatch(format!(
                    "feature map over {} qubits applied to a {}-qubit state",
                    spec.feature_map.n_qubits,
                    s.n_qubits()
                )));
            }
            Ok(DensityMatrix::trusted(
                s.n_qubits(),
                u.adjoint().mul(s.mat()).mul(&u),
            ))
        })
        .collect()
}

/// Symmetric kernel K[i][j] = g(F(Φρ_i, Φρ_j)); unit diagonal before scaling.
pub fn kernel_matrix<T: Scalar>(
    states: &[DensityMatrix<T>],
    spec: &KernelSpec,
    params: &AnsatzParams<T>,
) -> Result<Vec<Vec<T>>> {
    let mapped = map_states(states, spec, params)?;
    let n = mapped.len();
    let mut k = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        k[i][i] = rescale(spec.scaling, T::one());
        for j in i + 1..n {
            let v = rescale(spec.scaling, fidelity(&mapped[i], &mapped[j])?);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    Ok(k)
}

/// Rectangular kernel rows = test states, columns = train states.
pub fn kernel_cross<T: Scalar>(
    test: &[DensityMatrix<T>],
    train: &[DensityMatrix<T>],
    spec: &KernelSpec,
    params: &AnsatzParams<T>,
) -> Result<Vec<Vec<T>>> {
    let mt = map_states(test, spec, params)?;
    let mr = map_states(train, spec, params)?;
    mt.iter()
        .map(|a| mr.iter().map(|b| Ok(rescale(spec.scaling, fidelity(a, b)?))).collect())
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SvmModel<T: Scalar> {
    pub alpha: Vec<T>,
    pub bias: T,
    pub support: Vec<usize>,
    pub c_reg: T,
    pub labels: Vec<T>,
    /// diagonal shift applied when the (rescaled) kernel lost PSD
    pub psd_shift: T,
}

/// Soft-margin dual SVM via SMO with maximal-violating-pair selection,
/// deterministic for a fixed input order. A kernel whose smallest eigenvalue
/// is below −1e-6 gets its diagonal shifted up by the deficit first.
pub fn fit<T: Scalar>(k: &[Vec<T>], labels: &[T], c_reg: T) -> Result<SvmModel<T>> {
    let n = k.len();
    if n == 0 || labels.len() != n || k.iter().any(|row| row.len() != n) {
        return Err(Error::DimMismatch("kernel/label shapes".into()));
    }
    if c_reg <= T::zero() {
        return Err(Error::Config("regularization constant must be positive".into()));
    }
    for (i, row) in k.iter().enumerate() {
        for j in 0..n {
            if (row[j] - k[j][i]).abs() > T::of(1e-9) {
                return Err(Error::Invalid("kernel matrix not symmetric".into()));
            }
        }
    }
    let y: Vec<T> = labels.to_vec();
    if y.iter().any(|&v| v != T::one() && v != -T::one()) {
        return Err(Error::Invalid("labels must be +1/-1".into()));
    }

    // PSD repair
    let km = crate::linalg::CMatrix::from_fn(n, |i, j| crate::linalg::C::new(k[i][j], T::zero()));
    let (vals, _) = eigh(&km)?;
    let min_eig = vals[0];
    let psd_shift = if min_eig < T::of(-1e-6) { -min_eig } else { T::zero() };
    let kv = |i: usize, j: usize| -> T {
        if i == j {
            k[i][j] + psd_shift
        } else {
            k[i][j]
        }
    };

    let mut alpha = vec![T::zero(); n];
    // u_s = Σ_t α_t y_t K_st, maintained incrementally
    let mut u = vec![T::zero(); n];
    let tol = T::of(1e-5);
    let max_iter = 200 * n.max(1000);
    let mut m_val = T::zero();
    let mut big_m_val = T::zero();
    for _ in 0..max_iter {
        // maximal violating pair over I_up / I_low on v_s = y_s - u_s
        let mut i_up: Option<usize> = None;
        let mut i_low: Option<usize> = None;
        for s in 0..n {
            let v = y[s] - u[s];
            let up = (y[s] > T::zero() && alpha[s] < c_reg) || (y[s] < T::zero() && alpha[s] > T::zero());
            let low = (y[s] < T::zero() && alpha[s] < c_reg) || (y[s] > T::zero() && alpha[s] > T::zero());
            if up && i_up.is_none_or(|t| v > y[t] - u[t]) {
                i_up = Some(s);
            }
            if low && i_low.is_none_or(|t| v < y[t] - u[t]) {
                i_low = Some(s);
            }
        }
        let (i, j) = match (i_up, i_low) {
            (Some(i), Some(j)) => (i, j),
            _ => break,
        };
        m_val = y[i] - u[i];
        big_m_val = y[j] - u[j];
        if m_val - big_m_val <= tol {
            break;
        }
        // two-variable subproblem along y_i dα_i = -y_j dα_j = t
        let eta = (kv(i, i) + kv(j, j) - kv(i, j) - kv(j, i)).max(T::of(1e-12));
        let mut t = (m_val - big_m_val) / eta;
        let (lo_i, hi_i) = if y[i] > T::zero() { (-alpha[i], c_reg - alpha[i]) } else { (alpha[i] - c_reg, alpha[i]) };
        let (lo_j, hi_j) = if y[j] > T::zero() { (alpha[j] - c_reg, alpha[j]) } else { (-alpha[j], c_reg - alpha[j]) };
        t = t.min(hi_i).min(hi_j).max(lo_i).max(lo_j);
        if t == T::zero() {
            break;
        }
        alpha[i] += y[i] * t;
        alpha[j] -= y[j] * t;
        for s in 0..n {
            u[s] += t * (kv(s, i) - kv(s, j));
        }
    }
    let bias = (m_val + big_m_val) * T::of(0.5);
    let support = (0..n).filter(|&s| alpha[s] > T::of(1e-10)).collect();
    Ok(SvmModel { alpha, bias, support, c_reg, labels: y, psd_shift })
}

impl<T: Scalar> SvmModel<T> {
    /// Decision values for a test-vs-train kernel block.
    pub fn decision(&self, k_cross: &[Vec<T>]) -> Result<Vec<T>> {
        let n = self.alpha.len();
        k_cross
            .iter()
            .map(|row| {
                if row.len() != n {
                    return Err(Error::DimMismatch("cross-kernel width".into()));
                }
                let mut d = self.bias;
                for s in 0..n {
                    d += self.alpha[s] * self.labels[s] * row[s];
                }
                Ok(d)
            })
            .collect()
    }
}

/// Accuracy plus rank-statistic AUC (ties averaged); AUC is absent on a
/// single-class test set.
pub fn evaluate<T: Scalar>(
    model: &SvmModel<T>,
    k_cross: &[Vec<T>],
    labels: &[T],
) -> Result<(T, Option<T>)> {
    if k_cross.len() != labels.len() {
        return Err(Error::DimMismatch("test labels vs kernel rows".into()));
    }
    let d = model.decision(k_cross)?;
    let n = labels.len();
    if n == 0 {
        return Err(Error::Invalid("empty test set".into()));
    }
    let correct = d
        .iter()
        .zip(labels)
        .filter(|(di, &yi)| if **di >= T::zero() { yi > T::zero() } else { yi < T::zero() })
        .count();
    let acc = T::of(correct as f64) / T::of(n as f64);

    let n_pos = labels.iter().filter(|&&y| y > T::zero()).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Ok((acc, None));
    }
    // average ranks over sorted decision values
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap().then(a.cmp(&b)));
    let mut rank = vec![T::zero(); n];
    let mut s = 0;
    while s < n {
        let mut e = s;
        while e + 1 < n && d[idx[e + 1]] == d[idx[s]] {
            e += 1;
        }
        let avg = T::of((s + e + 2) as f64) / T::of(2.0);
        for t in s..=e {
            rank[idx[t]] = avg;
        }
        s = e + 1;
    }
    let pos_rank_sum: T = (0..n).filter(|&t| labels[t] > T::zero()).map(|t| rank[t]).sum();
    let auc = (pos_rank_sum - T::of((n_pos * (n_pos + 1)) as f64 / 2.0))
        / T::of((n_pos * n_neg) as f64);
    Ok((acc, Some(auc)))
}
