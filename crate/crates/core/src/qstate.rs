//! Density-matrix state types, classical-to-quantum embeddings, Bloch-coordinate
//! readout, and the global data state.

use crate::error::{Error, Result};
use crate::linalg::{eigh, partial_trace, CMatrix, C};
use crate::scalar::Scalar;

fn invariant_tol<T: Scalar>() -> T {
    // 1e-10 at f64; loosened when the scalar type cannot resolve it (f32)
    T::of(1e-10).max(T::epsilon() * T::of(1e3))
}

/// Hermitian, unit-trace, positive-semidefinite matrix over `n_qubits`.
/// The universal state representation (data ρ, latent ζ, reconstruction σ).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    n_qubits: usize,
    mat: CMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validating constructor: Hermitian, trace 1 and min eigenvalue ≥ 0,
    /// each within 1e-10.
    pub fn new(n_qubits: usize, mat: CMatrix<T>) -> Result<Self> {
        if n_qubits == 0 || mat.dim() != 1 << n_qubits {
            return Err(Error::DimMismatch(format!(
                "matrix dim {} does not match 2^{}",
                mat.dim(),
                n_qubits
            )));
        }
        let tol = invariant_tol::<T>();
        let dev = mat.herm_deviation();
        if dev > tol {
            return Err(Error::NotHermitian { dev: dev.to_f64() });
        }
        let tr = mat.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::Invalid(format!(
                "trace {} + {}i is not 1",
                tr.re.to_f64(),
                tr.im.to_f64()
            )));
        }
        let herm = mat.hermitize();
        let (vals, _) = eigh(&herm)?;
        if vals[0] < -tol {
            return Err(Error::Invalid(format!(
                "negative eigenvalue {}",
                vals[0].to_f64()
            )));
        }
        Ok(DensityMatrix { n_qubits, mat: herm })
    }

    /// Fast path for matrices produced by CPTP maps, which preserve the
    /// invariants analytically; hermitizes to bound floating-point drift but
    /// skips the eigenvalue check.
    pub(crate) fn trusted(n_qubits: usize, mat: CMatrix<T>) -> Self {
        debug_assert_eq!(mat.dim(), 1 << n_qubits);
        DensityMatrix { n_qubits, mat: mat.hermitize() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn mat(&self) -> &CMatrix<T> {
        &self.mat
    }

    pub fn purity(&self) -> T {
        self.mat.trace_prod_re(&self.mat)
    }

    /// |0…0⟩⟨0…0| over n qubits.
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut m = CMatrix::zeros(1 << n_qubits);
        m.set(0, 0, C::new(T::one(), T::zero()));
        DensityMatrix { n_qubits, mat: m }
    }

    /// Pure state from a normalized complex amplitude vector.
    pub fn pure(n_qubits: usize, amplitudes: &[C<T>]) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(Error::DimMismatch(format!(
                "{} amplitudes for dim {}",
                amplitudes.len(),
                dim
            )));
        }
        let norm_sq: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - T::one()).abs() > T::of(1e-8) {
            return Err(Error::Invalid("amplitudes not normalized".into()));
        }
        let inv = T::one() / norm_sq.sqrt();
        let mat = CMatrix::from_fn(dim, |i, j| {
            amplitudes[i] * amplitudes[j].conj() * C::new(inv * inv, T::zero())
        });
        Ok(DensityMatrix { n_qubits, mat })
    }
}

/// Uniform mixture ρ_glob = (1/N) Σ_i ρ_i of a dataset, kept together with the
/// ensemble members so couplings defined point-wise on the ensemble (the
/// auxiliary Wasserstein global objective) can be evaluated.
#[derive(Clone, Debug)]
pub struct GlobalState<T: Scalar> {
    rho_glob: DensityMatrix<T>,
    members: Vec<DensityMatrix<T>>,
}

impl<T: Scalar> GlobalState<T> {
    pub fn rho_glob(&self) -> &DensityMatrix<T> {
        &self.rho_glob
    }

    pub fn n_points(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[DensityMatrix<T>] {
        &self.members
    }
}

/// Pure state with amplitudes `features / ‖features‖₂`, zero-padded to 2^n.
pub fn amplitude_embed<T: Scalar>(features: &[T], n_qubits: usize) -> Result<DensityMatrix<T>> {
    let dim = 1usize << n_qubits;
    if n_qubits == 0 || features.len() > dim {
        return Err(Error::DimMismatch(format!(
            "{} features exceed dim 2^{}",
            features.len(),
            n_qubits
        )));
    }
    let norm_sq: T = features.iter().map(|&f| f * f).sum();
    if norm_sq <= T::zero() || !norm_sq.is_finite() {
        return Err(Error::Invalid("cannot embed a zero feature vector".into()));
    }
    let inv = T::one() / norm_sq.sqrt();
    let amp = |k: usize| -> T {
        if k < features.len() {
            features[k] * inv
        } else {
            T::zero()
        }
    };
    let mat = CMatrix::from_fn(dim, |i, j| C::new(amp(i) * amp(j), T::zero()));
    Ok(DensityMatrix { n_qubits, mat })
}

/// One qubit per feature: ⊗_q Ry(f_q)|0⟩, so qubit q holds
/// (cos(f_q/2), sin(f_q/2)).
pub fn angle_embed<T: Scalar>(features: &[T]) -> Result<DensityMatrix<T>> {
    let n = features.len();
    if n == 0 {
        return Err(Error::Invalid("angle embedding needs at least one feature".into()));
    }
    let dim = 1usize << n;
    let half = T::of(0.5);
    let amp = |idx: usize| -> T {
        let mut a = T::one();
        for (q, &f) in features.iter().enumerate() {
            let bit = (idx >> (n - 1 - q)) & 1;
            a = a * if bit == 0 { (f * half).cos() } else { (f * half).sin() };
        }
        a
    };
    let mat = CMatrix::from_fn(dim, |i, j| C::new(amp(i) * amp(j), T::zero()));
    Ok(DensityMatrix { n_qubits: n, mat })
}

/// (1/2^n) I, the generative latent prior ζ_gen.
pub fn maximally_mixed<T: Scalar>(n_qubits: usize) -> DensityMatrix<T> {
    let dim = 1usize << n_qubits;
    let p = T::one() / T::of(dim as f64);
    let mut mat = CMatrix::zeros(dim);
    for i in 0..dim {
        mat.set(i, i, C::new(p, T::zero()));
    }
    DensityMatrix { n_qubits, mat }
}

/// Uniform convex mixture of the data points.
pub fn global_state<T: Scalar>(points: &[DensityMatrix<T>]) -> Result<GlobalState<T>> {
    let first = points
        .first()
        .ok_or_else(|| Error::Invalid("global state of an empty dataset".into()))?;
    let n_qubits = first.n_qubits();
    let dim = first.dim();
    let mut acc = CMatrix::zeros(dim);
    for p in points {
        if p.n_qubits() != n_qubits {
            return Err(Error::DimMismatch(
                "mixed qubit counts in global state".into(),
            ));
        }
        acc = acc.add(p.mat());
    }
    let mat = acc.scale(T::one() / T::of(points.len() as f64));
    Ok(GlobalState {
        rho_glob: DensityMatrix { n_qubits, mat },
        members: points.to_vec(),
    })
}

/// Pauli expectation values (⟨X_q⟩, ⟨Y_q⟩, ⟨Z_q⟩) of the single-qubit marginal.
pub fn bloch_coords<T: Scalar>(rho: &DensityMatrix<T>, qubit: usize) -> Result<(T, T, T)> {
    let n = rho.n_qubits();
    if qubit >= n {
        return Err(Error::Invalid(format!("qubit {} out of range for {} qubits", qubit, n)));
    }
    let traced: Vec<usize> = (0..n).filter(|&q| q != qubit).collect();
    let m = if traced.is_empty() {
        rho.mat().clone()
    } else {
        partial_trace(rho.mat(), n, &traced)?
    };
    let b = m.get(0, 1);
    let two = T::of(2.0);
    let x = two * b.re;
    let y = -(two * b.im);
    let z = m.get(0, 0).re - m.get(1, 1).re;
    Ok((x, y, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, random_density, random_pure};
    use crate::rng::Rng;
    use approx::assert_abs_diff_eq;

    type M = CMatrix<f64>;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn amplitude_embed_basis_vector() {
        let rho = amplitude_embed(&[1.0, 0.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(rho.mat().get(0, 0), c(1.0, 0.0));
        for i in 0..4 {
            for j in 0..4 {
                if (i, j) != (0, 0) {
                    assert_eq!(rho.mat().get(i, j), c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn amplitude_embed_uniform() {
        let rho = amplitude_embed(&[1.0, 1.0, 1.0, 1.0], 2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(rho.mat().get(i, j).re, 0.25, epsilon = 1e-14);
                assert_eq!(rho.mat().get(i, j).im, 0.0);
            }
        }
    }

    #[test]
    fn amplitude_embed_three_four() {
        let rho = amplitude_embed(&[3.0, 4.0], 1).unwrap();
        assert_abs_diff_eq!(rho.mat().get(0, 0).re, 9.0 / 25.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.mat().get(1, 1).re, 16.0 / 25.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.mat().get(0, 1).re, 12.0 / 25.0, epsilon = 1e-14);
    }

    #[test]
    fn amplitude_embed_pads_tail() {
        let rho = amplitude_embed(&[3.0, 4.0], 2).unwrap();
        assert_abs_diff_eq!(rho.mat().get(0, 0).re, 9.0 / 25.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.mat().get(1, 1).re, 16.0 / 25.0, epsilon = 1e-14);
        assert_eq!(rho.mat().get(2, 2), c(0.0, 0.0));
        assert_eq!(rho.mat().get(3, 3), c(0.0, 0.0));
    }

    #[test]
    fn amplitude_embed_rejects_bad_input() {
        assert!(amplitude_embed(&[0.0, 0.0], 1).is_err());
        assert!(amplitude_embed(&[1.0; 5], 2).is_err());
    }

    #[test]
    fn amplitude_embed_is_pure() {
        let mut rng = Rng::seed_from_u64(7);
        for _ in 0..20 {
            let feats: Vec<f64> = (0..6).map(|_| rng.normal()).collect();
            let rho = amplitude_embed(&feats, 3).unwrap();
            assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(rho.mat().trace().re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn angle_embed_matches_ry_rotation() {
        use std::f64::consts::FRAC_PI_2;
        let rho = angle_embed(&[FRAC_PI_2]).unwrap();
        let (x, y, z) = bloch_coords(&rho, 0).unwrap();
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z, 0.0, epsilon = 1e-12);

        // product structure: second qubit untouched at angle 0
        let rho2 = angle_embed(&[FRAC_PI_2, 0.0]).unwrap();
        let (x0, _, _) = bloch_coords(&rho2, 0).unwrap();
        let (_, _, z1) = bloch_coords(&rho2, 1).unwrap();
        assert_abs_diff_eq!(x0, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z1, 1.0, epsilon = 1e-12);
        assert!(angle_embed::<f64>(&[]).is_err());
    }

    #[test]
    fn maximally_mixed_diagonal() {
        for n in 1..=3 {
            let mm = maximally_mixed::<f64>(n);
            let dim = 1 << n;
            for i in 0..dim {
                assert_abs_diff_eq!(mm.mat().get(i, i).re, 1.0 / dim as f64, epsilon = 1e-15);
            }
            // max entropy: -sum p ln p = n ln 2
            let s: f64 = (0..dim)
                .map(|i| {
                    let p = mm.mat().get(i, i).re;
                    -p * p.ln()
                })
                .sum();
            assert_abs_diff_eq!(s, n as f64 * std::f64::consts::LN_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn global_state_orthogonal_pair() {
        let zero = DensityMatrix::zero_state(1);
        let one = DensityMatrix::new(
            1,
            M::from_fn(2, |i, j| if i == 1 && j == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) }),
        )
        .unwrap();
        let g = global_state(&[zero, one]).unwrap();
        assert_abs_diff_eq!(g.rho_glob().mat().get(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g.rho_glob().mat().get(1, 1).re, 0.5, epsilon = 1e-15);
        assert_eq!(g.rho_glob().mat().get(0, 1), c(0.0, 0.0));
        assert_eq!(g.n_points(), 2);
    }

    #[test]
    fn global_state_single_point_is_identity_map() {
        let mut rng = Rng::seed_from_u64(3);
        let rho = DensityMatrix::<f64>::new(2, random_density(&mut rng, 2)).unwrap();
        let g = global_state(std::slice::from_ref(&rho)).unwrap();
        assert!(g.rho_glob().mat().max_abs_diff(rho.mat()) < 1e-15);
    }

    #[test]
    fn global_state_zero_plus_pair() {
        let zero = DensityMatrix::zero_state(1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityMatrix::pure(1, &[c(s, 0.0), c(s, 0.0)]).unwrap();
        let g = global_state(&[zero, plus]).unwrap();
        assert_abs_diff_eq!(g.rho_glob().mat().get(0, 0).re, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(g.rho_glob().mat().get(0, 1).re, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(g.rho_glob().mat().get(1, 0).re, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(g.rho_glob().mat().get(1, 1).re, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn global_state_rejects_bad_input() {
        assert!(global_state::<f64>(&[]).is_err());
        let a = DensityMatrix::<f64>::zero_state(1);
        let b = DensityMatrix::<f64>::zero_state(2);
        assert!(global_state(&[a, b]).is_err());
    }

    #[test]
    fn global_state_mixture_matches_manual_average() {
        let mut rng = Rng::seed_from_u64(11);
        let pts: Vec<_> = (0..5)
            .map(|_| DensityMatrix::new(2, random_pure(&mut rng, 2)).unwrap())
            .collect();
        let g = global_state(&pts).unwrap();
        let mut manual = M::zeros(4);
        for p in &pts {
            manual = manual.add(p.mat());
        }
        manual = manual.scale(0.2);
        assert!(g.rho_glob().mat().max_abs_diff(&manual) < 1e-12);
        assert_abs_diff_eq!(g.rho_glob().mat().trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bloch_coords_cardinal_states() {
        let (x, y, z) = bloch_coords(&DensityMatrix::<f64>::zero_state(1), 0).unwrap();
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z, 1.0, epsilon = 1e-15);

        let (x, y, z) = bloch_coords(&maximally_mixed::<f64>(1), 0).unwrap();
        assert!(x.abs() < 1e-15 && y.abs() < 1e-15 && z.abs() < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityMatrix::pure(1, &[c(s, 0.0), c(s, 0.0)]).unwrap();
        let (x, y, z) = bloch_coords(&plus, 0).unwrap();
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z, 0.0, epsilon = 1e-12);

        assert!(bloch_coords(&plus, 1).is_err());
    }

    #[test]
    fn bloch_coords_matches_tensored_pauli_trace() {
        // oracle: Tr(rho (P_q tensored with identity)) for each Pauli
        let mut rng = Rng::seed_from_u64(21);
        let rho = DensityMatrix::new(2, random_density(&mut rng, 2)).unwrap();
        let paulis: [M; 3] = [
            M::from_fn(2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) }),
            M::from_fn(2, |i, j| match (i, j) {
                (0, 1) => c(0.0, -1.0),
                (1, 0) => c(0.0, 1.0),
                _ => c(0.0, 0.0),
            }),
            M::from_fn(2, |i, j| match (i, j) {
                (0, 0) => c(1.0, 0.0),
                (1, 1) => c(-1.0, 0.0),
                _ => c(0.0, 0.0),
            }),
        ];
        for q in 0..2 {
            let got = bloch_coords(&rho, q).unwrap();
            let got = [got.0, got.1, got.2];
            for (p, pauli) in paulis.iter().enumerate() {
                let full = if q == 0 {
                    kron(pauli, &M::identity(2)).unwrap()
                } else {
                    kron(&M::identity(2), pauli).unwrap()
                };
                let want = rho.mat().trace_prod_re(&full);
                assert_abs_diff_eq!(got[p], want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bloch_norm_bounded_and_saturates_for_pure_marginals() {
        let mut rng = Rng::seed_from_u64(5);
        for _ in 0..20 {
            let rho = DensityMatrix::<f64>::new(2, random_density(&mut rng, 2)).unwrap();
            for q in 0..2 {
                let (x, y, z) = bloch_coords(&rho, q).unwrap();
                let norm = (x * x + y * y + z * z).sqrt();
                assert!(norm <= 1.0 + 1e-10, "bloch norm {} exceeds 1", norm);
            }
        }
        // product pure state: marginal is pure, norm saturates
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = amplitude_embed(&[s, s], 1).unwrap();
        let m = kron(plus.mat(), DensityMatrix::<f64>::zero_state(1).mat()).unwrap();
        let rho = DensityMatrix::new(2, m).unwrap();
        for q in 0..2 {
            let (x, y, z) = bloch_coords(&rho, q).unwrap();
            assert_abs_diff_eq!((x * x + y * y + z * z).sqrt(), 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn density_matrix_rejects_invalid() {
        // non-Hermitian
        let m = M::from_fn(2, |i, j| if i == 0 && j == 1 { c(0.5, 0.0) } else if i == j { c(0.5, 0.0) } else { c(0.0, 0.0) });
        assert!(DensityMatrix::new(1, m).is_err());
        // wrong trace
        let m = M::from_fn(2, |i, j| if i == j { c(0.75, 0.0) } else { c(0.0, 0.0) });
        assert!(DensityMatrix::new(1, m).is_err());
        // negative eigenvalue
        let m = M::from_fn(2, |i, j| match (i, j) {
            (0, 0) => c(1.5, 0.0),
            (1, 1) => c(-0.5, 0.0),
            _ => c(0.0, 0.0),
        });
        assert!(DensityMatrix::new(1, m).is_err());
        // dim mismatch
        assert!(DensityMatrix::new(2, M::identity(2)).is_err());
    }

    #[test]
    fn pure_constructor_validates() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(DensityMatrix::pure(1, &[c(s, 0.0), c(0.0, s)]).is_ok());
        assert!(DensityMatrix::pure(1, &[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(DensityMatrix::pure(1, &[c(1.0, 0.0)]).is_err());
    }
}
