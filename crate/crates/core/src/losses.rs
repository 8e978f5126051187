//! Divergences: reconstruction losses (fidelity, KLD, JSD, auxiliary
//! Wasserstein) and regularization losses against the maximally mixed prior.
//!
//! All logarithms are natural (entropies in nats). Eigenvalues are floored at
//! 1e-12 inside logs so rank-deficient states stay finite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, mat_func, CMatrix, C};
use crate::qstate::{maximally_mixed, DensityMatrix};
use crate::scalar::Scalar;

/// Eigenvalue floor used inside logarithms.
pub const LOG_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Fidelity,
    Kld,
    Jsd,
    #[serde(rename = "wasserstein")]
    WassersteinAux,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossRole {
    Reconstruction,
    Regularization,
}

impl LossKind {
    /// The quantum Wasserstein loss is defined through a channel coupling and
    /// has no regularization form.
    pub fn valid_for(&self, role: LossRole) -> bool {
        !(matches!(self, LossKind::WassersteinAux) && role == LossRole::Regularization)
    }
}

/// Hermitian PSD observable over 2·N_X qubits used by the auxiliary
/// Wasserstein loss.
#[derive(Clone, Debug)]
pub struct CostObservable<T: Scalar> {
    n_x: usize,
    mat: CMatrix<T>,
}

impl<T: Scalar> CostObservable<T> {
    pub fn new(n_x: usize, mat: CMatrix<T>) -> Result<Self> {
        let dim = 1usize << (2 * n_x);
        if mat.dim() != dim {
            return Err(Error::DimMismatch(format!(
                "cost observable dim {} is not 4^{}",
                mat.dim(),
                n_x
            )));
        }
        let tol = T::of(1e-10);
        let dev = mat.herm_deviation();
        if dev > tol {
            return Err(Error::NotHermitian { dev: dev.to_f64() });
        }
        let (vals, _) = eigh(&mat)?;
        if vals[0] < -tol {
            return Err(Error::Invalid(format!(
                "cost observable has negative eigenvalue {}",
                vals[0].to_f64()
            )));
        }
        Ok(CostObservable { n_x, mat })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn mat(&self) -> &CMatrix<T> {
        &self.mat
    }
}

/// Uhlmann fidelity (Tr √(√σ ρ √σ))², with the pure-state shortcut
/// ⟨ψ|σ|ψ⟩ = Tr(ρσ) when either argument has purity above 1 − 1e-9.
///
/// Eigenvalues of the inner product below max(λ_max·1e-11, 1e-13) are
/// dropped before the square root: for rank-deficient inputs the
/// eigensolver's noise on the zero eigenvalues (~1e-14) would otherwise be
/// amplified to ~1e-7 each by the root.
pub fn fidelity<T: Scalar>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch(format!(
            "fidelity between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let near_one = T::one() - T::of(1e-9);
    let f = if rho.purity() > near_one || sigma.purity() > near_one {
        rho.mat().trace_prod_re(sigma.mat())
    } else {
        let sqrt_sigma = mat_func(sigma.mat(), |x| x.sqrt(), T::zero())?;
        let inner = sqrt_sigma.mul(rho.mat()).mul(&sqrt_sigma);
        let (vals, _) = eigh(&inner.hermitize())?;
        let top = vals.last().copied().unwrap_or_else(T::zero).max(T::zero());
        let tau = (top * T::of(1e-11)).max(T::of(1e-13));
        let s: T = vals.iter().filter(|&&l| l > tau).map(|&l| l.sqrt()).sum();
        s * s
    };
    Ok(f.max(T::zero()).min(T::one()))
}

fn floored_log<T: Scalar>(m: &CMatrix<T>) -> Result<CMatrix<T>> {
    mat_func(m, |x| x.ln(), T::of(LOG_FLOOR))
}

/// Von Neumann entropy −Tr(ρ ln ρ) with the log floor.
pub fn von_neumann_entropy<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    let (vals, _) = eigh(rho.mat())?;
    let floor = T::of(LOG_FLOOR);
    Ok(-vals.iter().map(|&l| {
        let lf = l.max(floor);
        lf * lf.ln()
    }).sum::<T>())
}

/// Quantum relative entropy S(ρ|σ) = Tr ρ(ln ρ − ln σ).
pub fn kld<T: Scalar>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch(format!(
            "kld between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let log_r = floored_log(rho.mat())?;
    let log_s = floored_log(sigma.mat())?;
    Ok(rho.mat().trace_prod_re(&log_r.sub(&log_s)))
}

/// Jensen–Shannon divergence S(ρ|m) + S(σ|m), m = (ρ+σ)/2. Symmetric exactly:
/// both the midpoint and the final sum are commutative float operations.
pub fn jsd<T: Scalar>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch(format!(
            "jsd between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let m = DensityMatrix::trusted(
        rho.n_qubits(),
        rho.mat().add(sigma.mat()).scale(T::of(0.5)),
    );
    Ok(kld(rho, &m)? + kld(sigma, &m)?)
}

/// Auxiliary Wasserstein loss Tr(π(ρ,T)·C) with the coupling
/// π = Σ_i p_i T(|e_i⟩⟨e_i|) ⊗ |e_i⟩⟨e_i| over ρ's eigenbasis. Eigenvalues
/// below 1e-12 are skipped.
pub fn wasserstein_aux<T: Scalar>(
    rho: &DensityMatrix<T>,
    channel: impl Fn(&DensityMatrix<T>) -> Result<DensityMatrix<T>>,
    cost: &CostObservable<T>,
) -> Result<T> {
    if cost.n_x() != rho.n_qubits() {
        return Err(Error::DimMismatch(format!(
            "cost observable for {} qubits applied to a {}-qubit state",
            cost.n_x(),
            rho.n_qubits()
        )));
    }
    let (vals, vecs) = eigh(rho.mat())?;
    let n = rho.dim();
    let skip = T::of(1e-12);
    let mut total = T::zero();
    for k in 0..n {
        let p = vals[k];
        if p < skip {
            continue;
        }
        let e = CMatrix::from_fn(n, |i, j| vecs.get(i, k) * vecs.get(j, k).conj());
        let e = DensityMatrix::trusted(rho.n_qubits(), e);
        let te = channel(&e)?;
        if te.dim() != n {
            return Err(Error::DimMismatch(
                "wasserstein channel must map N_X qubits to N_X qubits".into(),
            ));
        }
        let pi_k = kron(te.mat(), e.mat())?;
        total += p * pi_k.trace_prod_re(cost.mat());
    }
    Ok(total)
}

/// Register-exchange operator on two n_x-qubit registers.
fn swap_registers<T: Scalar>(n_x: usize) -> Result<CMatrix<T>> {
    let d = 1usize << n_x;
    let dim = d * d;
    if dim > crate::linalg::MAX_DIM {
        return Err(Error::TooLarge { dim, max: crate::linalg::MAX_DIM });
    }
    let mut m = CMatrix::zeros(dim);
    for i in 0..d {
        for j in 0..d {
            m.set(i * d + j, j * d + i, C::new(T::one(), T::zero()));
        }
    }
    Ok(m)
}

/// Default cost observable C = (I − SWAP)/2, the projector onto the
/// antisymmetric subspace; vanishes on identical pure couplings and satisfies
/// Tr[(ρ⊗ρ)C] = (1 − Tr ρ²)/2.
pub fn default_cost<T: Scalar>(n_x: usize) -> Result<CostObservable<T>> {
    let swap = swap_registers::<T>(n_x)?;
    let dim = swap.dim();
    let half = T::of(0.5);
    let mat = CMatrix::from_fn(dim, |i, j| {
        let id = if i == j { T::one() } else { T::zero() };
        let s = swap.get(i, j);
        C::new((id - s.re) * half, -s.im * half)
    });
    Ok(CostObservable { n_x, mat })
}

/// Regularization divergence of the latent against ζ_gen = maximally mixed.
/// The KLD form uses the closed form n·ln2 − S(ζ).
pub fn regularization<T: Scalar>(zeta: &DensityMatrix<T>, kind: LossKind) -> Result<T> {
    let n = zeta.n_qubits();
    match kind {
        LossKind::Fidelity => {
            let gen = maximally_mixed::<T>(n);
            Ok(T::one() - fidelity(zeta, &gen)?)
        }
        LossKind::Kld => {
            let c = T::of(n as f64) * T::of(std::f64::consts::LN_2);
            Ok(c - von_neumann_entropy(zeta)?)
        }
        LossKind::Jsd => {
            let gen = maximally_mixed::<T>(n);
            jsd(zeta, &gen)
        }
        LossKind::WassersteinAux => Err(Error::Config(
            "the Wasserstein loss has no regularization form".into(),
        )),
    }
}
