//! Dense complex-matrix kernel: tensor products, partial trace, Hermitian
//! eigendecomposition, matrix functions, and random state/unitary generation.
//!
//! Convention used everywhere: qubit 0 is the MOST significant bit of the
//! computational-basis index (circuit diagrams read top-to-bottom).

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Dense storage cap: 12 qubits (dim 4096). Desk scale needs at most 6.
pub const MAX_DIM: usize = 1 << 12;

pub type C<T> = Complex<T>;

/// Square, row-major complex matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct CMatrix<T: Scalar> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dim must be >= 1");
        CMatrix { dim, data: vec![C::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<T>) {
        self.data[i * self.dim + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dim mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    dst[j] += a * row[j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = C::new(a.re * s, a.im * s);
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> C<T> {
        let mut t = C::zero();
        for i in 0..self.dim {
            t += self.data[i * self.dim + i];
        }
        t
    }

    /// Re Tr(self * other) without forming the product.
    pub fn trace_prod_re(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut t = T::zero();
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                let b = other.data[k * n + i];
                t += a.re * b.re - a.im * b.im;
            }
        }
        t
    }

    /// (m + m^dag)/2; bounds floating-point drift after channel applications.
    pub fn hermitize(&self) -> Self {
        let n = self.dim;
        let half = T::of(0.5);
        Self::from_fn(n, |i, j| {
            let a = self.get(i, j);
            let b = self.get(j, i).conj();
            C::new((a.re + b.re) * half, (a.im + b.im) * half)
        })
    }

    pub fn herm_deviation(&self) -> T {
        let n = self.dim;
        let mut dev = T::zero();
        for i in 0..n {
            for j in 0..n {
                let d = self.get(i, j) - self.get(j, i).conj();
                dev = dev.max(d.norm());
            }
        }
        dev
    }

    pub fn frob_norm(&self) -> T {
        self.data
            .iter()
            .map(|c| c.re * c.re + c.im * c.im)
            .sum::<T>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C<T>] {
        &mut self.data
    }
}

/// Kronecker product; errors when the result would exceed the dense cap.
pub fn kron<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let dim = a.dim() * b.dim();
    if dim > MAX_DIM {
        return Err(Error::TooLarge { dim, max: MAX_DIM });
    }
    let (da, db) = (a.dim(), b.dim());
    let mut out = CMatrix::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let v = a.get(i, j);
            if v.re == T::zero() && v.im == T::zero() {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, v * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

/// Traces out the given qubits (qubit 0 = most significant bit).
pub fn partial_trace<T: Scalar>(
    m: &CMatrix<T>,
    n_qubits: usize,
    traced: &[usize],
) -> Result<CMatrix<T>> {
    if m.dim() != 1 << n_qubits {
        return Err(Error::DimMismatch(format!(
            "matrix dim {} is not 2^{}",
            m.dim(),
            n_qubits
        )));
    }
    let mut traced_sorted: Vec<usize> = traced.to_vec();
    traced_sorted.sort_unstable();
    traced_sorted.dedup();
    if traced_sorted.iter().any(|&q| q >= n_qubits) {
        return Err(Error::Invalid("traced qubit index out of range".into()));
    }
    let kept: Vec<usize> = (0..n_qubits).filter(|q| !traced_sorted.contains(q)).collect();
    let n_keep = kept.len();
    let n_tr = traced_sorted.len();
    let dim_out = 1 << n_keep;
    let dim_tr = 1 << n_tr;

    // bit position of qubit q within a dim-2^n index
    let pos = |q: usize| n_qubits - 1 - q;
    let place = |bits: usize, qubits: &[usize]| -> usize {
        let mut idx = 0usize;
        for (j, &q) in qubits.iter().enumerate() {
            let bit = (bits >> (qubits.len() - 1 - j)) & 1;
            idx |= bit << pos(q);
        }
        idx
    };

    let mut out = CMatrix::zeros(dim_out);
    for a in 0..dim_out {
        let ra = place(a, &kept);
        for b in 0..dim_out {
            let cb = place(b, &kept);
            let mut acc = C::zero();
            for t in 0..dim_tr {
                let tt = place(t, &traced_sorted);
                acc += m.get(ra | tt, cb | tt);
            }
            out.set(a, b, acc);
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues ascending and eigenvectors as columns of a
/// unitary matrix, with a deterministic phase fix per column.
pub fn eigh<T: Scalar>(m: &CMatrix<T>) -> Result<(Vec<T>, CMatrix<T>)> {
    let dev = m.herm_deviation();
    if dev > T::of(1e-10) {
        return Err(Error::NotHermitian { dev: dev.to_f64() });
    }
    let n = m.dim();
    let mut a = m.hermitize();
    let mut q = CMatrix::identity(n);
    let eps = T::of(1e-14);
    let scale = a.frob_norm().max(T::one());

    for _sweep in 0..60 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.get(i, j).norm_sqr();
            }
        }
        if off.sqrt() <= eps * scale {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let z = a.get(p, r);
                let zn = z.norm();
                if zn <= eps * scale * T::of(1e-2) {
                    continue;
                }
                let phi = z.im.atan2(z.re);
                let tau = (a.get(r, r).re - a.get(p, p).re) / (T::of(2.0) * zn);
                let t = if tau == T::zero() {
                    T::one()
                } else {
                    let s = if tau > T::zero() { T::one() } else { -T::one() };
                    s / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // G[p][p]=c, G[p][r]=s, G[r][p]=-s e^{-i phi}, G[r][r]=c e^{-i phi}
                let em = C::new(phi.cos(), -phi.sin()); // e^{-i phi}
                let ep = em.conj();
                let gpp = C::new(c, T::zero());
                let gpr = C::new(s, T::zero());
                let grp = C::new(-s, T::zero()) * em;
                let grr = C::new(c, T::zero()) * em;

                // A <- A G (columns p, r)
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akr = a.get(k, r);
                    a.set(k, p, akp * gpp + akr * grp);
                    a.set(k, r, akp * gpr + akr * grr);
                }
                // A <- G^dag A (rows p, r)
                for k in 0..n {
                    let apk = a.get(p, k);
                    let ark = a.get(r, k);
                    a.set(p, k, apk * C::new(c, T::zero()) + ark * C::new(-s, T::zero()) * ep);
                    a.set(r, k, apk * C::new(s, T::zero()) + ark * C::new(c, T::zero()) * ep);
                }
                // Q <- Q G
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkr = q.get(k, r);
                    q.set(k, p, qkp * gpp + qkr * grp);
                    q.set(k, r, qkp * gpr + qkr * grr);
                }
            }
        }
    }

    let mut pairs: Vec<(T, usize)> = (0..n).map(|i| (a.get(i, i).re, i)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

    let mut vals = Vec::with_capacity(n);
    let mut vecs = CMatrix::zeros(n);
    for (out_col, &(lam, src_col)) in pairs.iter().enumerate() {
        vals.push(lam);
        // deterministic phase: first entry with |v_k| >= colmax*1e-6 made
        // real-positive
        let mut colmax = T::zero();
        for k in 0..n {
            colmax = colmax.max(q.get(k, src_col).norm());
        }
        let mut phase = C::new(T::one(), T::zero());
        for k in 0..n {
            let v = q.get(k, src_col);
            if v.norm() >= colmax * T::of(1e-6) {
                phase = v.conj() / C::new(v.norm(), T::zero());
                break;
            }
        }
        for k in 0..n {
            vecs.set(k, out_col, q.get(k, src_col) * phase);
        }
    }
    Ok((vals, vecs))
}

/// Applies `f` to the eigenvalues (clamped at `eigenvalue_floor`) of a
/// Hermitian PSD matrix and reassembles in its eigenbasis.
pub fn mat_func<T: Scalar>(
    m: &CMatrix<T>,
    f: impl Fn(T) -> T,
    eigenvalue_floor: T,
) -> Result<CMatrix<T>> {
    let (vals, vecs) = eigh(m)?;
    let n = m.dim();
    let mut fv = Vec::with_capacity(n);
    for &v in &vals {
        let y = f(v.max(eigenvalue_floor));
        if !y.is_finite() {
            return Err(Error::Config(format!(
                "matrix function undefined at clamped eigenvalue {}",
                v.max(eigenvalue_floor)
            )));
        }
        fv.push(y);
    }
    // V diag(fv) V^dag
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C::zero();
            for k in 0..n {
                acc += vecs.get(i, k) * C::new(fv[k], T::zero()) * vecs.get(j, k).conj();
            }
            out.set(i, j, acc);
        }
    }
    Ok(out.hermitize())
}

/// Random density matrix via the Ginibre construction G G^dag / Tr.
pub fn random_density<T: Scalar>(rng: &mut Rng, n_qubits: usize) -> CMatrix<T> {
    let dim = 1 << n_qubits;
    let g = CMatrix::from_fn(dim, |_, _| C::new(rng.normal::<T>(), rng.normal::<T>()));
    let m = g.mul(&g.adjoint());
    let t = m.trace().re;
    m.scale(T::one() / t).hermitize()
}

/// Random pure state |psi><psi| with Haar-like direction.
pub fn random_pure<T: Scalar>(rng: &mut Rng, n_qubits: usize) -> CMatrix<T> {
    let dim = 1 << n_qubits;
    let mut v: Vec<C<T>> = (0..dim)
        .map(|_| C::new(rng.normal::<T>(), rng.normal::<T>()))
        .collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    for c in v.iter_mut() {
        *c = *c / C::new(norm, T::zero());
    }
    CMatrix::from_fn(dim, |i, j| v[i] * v[j].conj())
}

/// Haar-like random unitary via QR of a Ginibre matrix (Gram-Schmidt with
/// diagonal phase fix).
pub fn random_unitary<T: Scalar>(rng: &mut Rng, dim: usize) -> CMatrix<T> {
    let g = CMatrix::from_fn(dim, |_, _| C::new(rng.normal::<T>(), rng.normal::<T>()));
    // modified Gram-Schmidt on columns
    let mut cols: Vec<Vec<C<T>>> = (0..dim)
        .map(|j| (0..dim).map(|i| g.get(i, j)).collect())
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let mut dot: C<T> = C::zero();
            for i in 0..dim {
                dot += cols[k][i].conj() * cols[j][i];
            }
            for i in 0..dim {
                let ck = cols[k][i];
                cols[j][i] -= dot * ck;
            }
        }
        let norm = cols[j].iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        // r_jj phase fix for Haar measure: divide by norm (r_jj > 0 real)
        for c in cols[j].iter_mut() {
            *c = *c / C::new(norm, T::zero());
        }
    }
    CMatrix::from_fn(dim, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    type M = CMatrix<f64>;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn pauli_x() -> M {
        M::from_fn(2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn kron_identities() {
        let i2 = M::identity(2);
        let i4 = kron(&i2, &i2).unwrap();
        assert_eq!(i4, M::identity(4));
    }

    #[test]
    fn kron_basis_states() {
        let p0 = M::from_fn(2, |i, j| if i == 0 && j == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let p1 = M::from_fn(2, |i, j| if i == 1 && j == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let k = kron(&p0, &p1).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(k.get(i, j).re, want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn kron_bitflip_conjugation() {
        let xx = kron(&pauli_x(), &pauli_x()).unwrap();
        let p00 = M::from_fn(4, |i, j| if i == 0 && j == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let out = xx.mul(&p00).mul(&xx.adjoint());
        assert_abs_diff_eq!(out.get(3, 3).re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.get(0, 0).re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn kron_overflow_errors() {
        let big = M::identity(1 << 7);
        assert!(kron(&big, &big).is_err());
        let ok = kron(&M::identity(1 << 6), &M::identity(1 << 6));
        assert!(ok.is_ok());
    }

    #[test]
    fn partial_trace_bell() {
        // |Phi+> = (|00> + |11>)/sqrt(2)
        let mut bell = M::zeros(4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell.set(i, j, c(0.5, 0.0));
        }
        let red = partial_trace(&bell, 2, &[1]).unwrap();
        assert_abs_diff_eq!(red.get(0, 0).re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(red.get(1, 1).re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(red.get(0, 1).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn partial_trace_product_state() {
        let mut r = Rng::seed_from_u64(1);
        let a = random_density::<f64>(&mut r, 1);
        let b = random_density::<f64>(&mut r, 2);
        let ab = kron(&a, &b).unwrap();
        let red = partial_trace(&ab, 3, &[1, 2]).unwrap();
        assert!(red.max_abs_diff(&a) < 1e-13);
    }

    #[test]
    fn partial_trace_vs_bruteforce_oracle() {
        // independent oracle: explicit double loop over kept/traced indices
        // for the fixed layout trace {1,2} of 3 qubits (qubit 0 = MSB);
        // out[a][b] = sum_t m[a*4+t][b*4+t]
        let mut r = Rng::seed_from_u64(2);
        let m = random_density::<f64>(&mut r, 3);
        let red = partial_trace(&m, 3, &[1, 2]).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = c(0.0, 0.0);
                for t in 0..4 {
                    acc += m.get(a * 4 + t, b * 4 + t);
                }
                assert!((red.get(a, b) - acc).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_preserves_trace_and_hermiticity() {
        let mut r = Rng::seed_from_u64(3);
        let m = random_density::<f64>(&mut r, 3);
        let red = partial_trace(&m, 3, &[0, 2]).unwrap();
        assert_abs_diff_eq!(red.trace().re, 1.0, epsilon = 1e-12);
        assert!(red.herm_deviation() < 1e-12);
    }

    #[test]
    fn eigh_diagonal() {
        let m = M::from_fn(2, |i, j| {
            if i == j {
                c(if i == 0 { 0.25 } else { 0.75 }, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let (vals, vecs) = eigh(&m).unwrap();
        assert_abs_diff_eq!(vals[0], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(vecs.get(0, 0).re.abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigh_pauli_x() {
        let (vals, vecs) = eigh(&pauli_x()).unwrap();
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-12);
        // eigenvector of +1 is |+>
        let v = (vecs.get(0, 1), vecs.get(1, 1));
        assert_abs_diff_eq!((v.0 - v.1).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        for n_qubits in [1usize, 2, 3] {
            let mut r = Rng::seed_from_u64(40 + n_qubits as u64);
            let dim = 1 << n_qubits;
            let g = M::from_fn(dim, |_, _| c(r.normal(), r.normal()));
            let h = g.add(&g.adjoint()).scale(0.5);
            let (vals, vecs) = eigh(&h).unwrap();
            // residual of V diag V^dag
            let mut rec = M::zeros(dim);
            for i in 0..dim {
                for j in 0..dim {
                    let mut acc = c(0.0, 0.0);
                    for k in 0..dim {
                        acc += vecs.get(i, k) * c(vals[k], 0.0) * vecs.get(j, k).conj();
                    }
                    rec.set(i, j, acc);
                }
            }
            assert!(rec.sub(&h).frob_norm() < 1e-9, "qubits {}", n_qubits);
            // Q unitary
            let qq = vecs.adjoint().mul(&vecs);
            assert!(qq.max_abs_diff(&M::identity(dim)) < 1e-10);
            // ascending
            for w in vals.windows(2) {
                assert!(w[0] <= w[1] + 1e-12);
            }
        }
    }

    #[test]
    fn eigh_dim64_residual() {
        let mut r = Rng::seed_from_u64(99);
        let g = M::from_fn(64, |_, _| c(r.normal(), r.normal()));
        let h = g.add(&g.adjoint()).scale(0.5);
        let (vals, vecs) = eigh(&h).unwrap();
        let mut rec = M::zeros(64);
        for i in 0..64 {
            for j in 0..64 {
                let mut acc = c(0.0, 0.0);
                for k in 0..64 {
                    acc += vecs.get(i, k) * c(vals[k], 0.0) * vecs.get(j, k).conj();
                }
                rec.set(i, j, acc);
            }
        }
        assert!(rec.sub(&h).frob_norm() < 1e-9 * h.frob_norm().max(1.0));
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = M::from_fn(2, |i, j| if i == 0 && j == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!(eigh(&m).is_err());
    }

    #[test]
    fn mat_func_examples() {
        // sqrt of diag(4,9)/13
        let m = M::from_fn(2, |i, j| {
            if i == j {
                c(if i == 0 { 4.0 / 13.0 } else { 9.0 / 13.0 }, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let s = mat_func(&m, |x| x.sqrt(), 0.0).unwrap();
        assert_abs_diff_eq!(s.get(0, 0).re, 2.0 / 13.0f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.get(1, 1).re, 3.0 / 13.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn mat_func_log_identity_is_zero() {
        let s = mat_func(&M::identity(2), |x| x.ln(), 1e-12).unwrap();
        assert!(s.frob_norm() < 1e-12);
    }

    #[test]
    fn mat_func_sqrt_squares_back() {
        let mut r = Rng::seed_from_u64(5);
        let m = random_density::<f64>(&mut r, 2);
        let s = mat_func(&m, |x| x.sqrt(), 0.0).unwrap();
        assert!(s.mul(&s).max_abs_diff(&m) < 1e-8);
    }

    #[test]
    fn mat_func_identity_function() {
        let mut r = Rng::seed_from_u64(6);
        let m = random_density::<f64>(&mut r, 2);
        let s = mat_func(&m, |x| x, 0.0).unwrap();
        assert!(s.max_abs_diff(&m) < 1e-10);
    }

    #[test]
    fn mat_func_rejects_undefined() {
        let err = mat_func(&M::identity(2).scale(0.5), |x| (x - 1.0).ln(), 0.0);
        assert!(err.is_err());
    }

    #[test]
    fn random_density_invariants() {
        let mut r = Rng::seed_from_u64(7);
        let m = random_density::<f64>(&mut r, 2);
        assert_abs_diff_eq!(m.trace().re, 1.0, epsilon = 1e-12);
        let (vals, _) = eigh(&m).unwrap();
        assert!(vals[0] > -1e-12);
    }

    #[test]
    fn random_pure_is_rank_one() {
        let mut r = Rng::seed_from_u64(8);
        let m = random_pure::<f64>(&mut r, 2);
        let (vals, _) = eigh(&m).unwrap();
        assert_abs_diff_eq!(vals[3], 1.0, epsilon = 1e-10);
        assert!(vals[2].abs() < 1e-10);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut r = Rng::seed_from_u64(9);
        let u = random_unitary::<f64>(&mut r, 8);
        assert!(u.adjoint().mul(&u).max_abs_diff(&M::identity(8)) < 1e-10);
    }

    #[test]
    fn f32_instantiation_smoke() {
        let mut r = Rng::seed_from_u64(10);
        let m = random_density::<f32>(&mut r, 1);
        assert!((m.trace().re - 1.0f32).abs() < 1e-5);
        let (vals, _) = eigh(&m).unwrap();
        assert!(vals[0] > -1e-5);
    }
}
