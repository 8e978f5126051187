//! Parameterized ansatz circuits (Rzz ring + Ry rotations per layer) and the
//! encoder/decoder CPTP maps, including trash/auxiliary qubit bookkeeping.
//!
//! Layer structure for n ≥ 2 qubits: Rzz on ring pairs (0,1),(1,2),…,(n−1,0)
//! in that order, then Ry on every qubit. A single-qubit ansatz degenerates to
//! an Ry chain. Gate conventions: Rzz(θ) = exp(−i(θ/2) Z⊗Z),
//! Ry(θ) = exp(−i(θ/2) Y). The circuit unitary composes left-to-right, i.e.
//! later gates left-multiply. Channels conjugate as U†(·)U.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, partial_trace, CMatrix, C};
use crate::qstate::DensityMatrix;
use crate::rng::Rng;
use crate::scalar::Scalar;

/// Fixed-topology layered circuit shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, n_layers: usize) -> Self {
        AnsatzSpec { n_qubits, n_layers }
    }

    /// Parameters per layer: n Rzz + n Ry for n ≥ 2, one Ry for n = 1.
    pub fn param_count(&self) -> usize {
        if self.n_qubits >= 2 {
            self.n_layers * 2 * self.n_qubits
        } else {
            self.n_layers
        }
    }
}

/// Flat rotation-angle vector (radians) for one ansatz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams<T: Scalar> {
    pub values: Vec<T>,
}

impl<T: Scalar> AnsatzParams<T> {
    pub fn new(values: Vec<T>) -> Self {
        AnsatzParams { values }
    }

    pub fn zeros(spec: &AnsatzSpec) -> Self {
        AnsatzParams { values: vec![T::zero(); spec.param_count()] }
    }

    pub fn random_uniform(spec: &AnsatzSpec, rng: &mut Rng) -> Self {
        let pi = T::PI();
        AnsatzParams {
            values: (0..spec.param_count()).map(|_| rng.uniform(-pi, pi)).collect(),
        }
    }
}

/// Encoder E(ρ) = Tr_{trash ∪ aux} U†(ρ ⊗ |0_{N_A}⟩⟨0_{N_A}|)U.
/// Trash qubits are the first N_T = N_X − N_Z of the data register; auxiliary
/// qubits are appended last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub n_x: usize,
    pub n_z: usize,
    pub n_aux: usize,
    pub n_layers: usize,
}

impl EncoderSpec {
    pub fn new(n_x: usize, n_z: usize, n_aux: usize, n_layers: usize) -> Result<Self> {
        if n_z == 0 || n_z > n_x {
            return Err(Error::Config(format!("need 1 <= n_z <= n_x, got n_z={n_z}, n_x={n_x}")));
        }
        Ok(EncoderSpec { n_x, n_z, n_aux, n_layers })
    }

    pub fn n_trash(&self) -> usize {
        self.n_x - self.n_z
    }

    /// Circuit acts on the data register plus the auxiliary register.
    pub fn ansatz(&self) -> AnsatzSpec {
        AnsatzSpec::new(self.n_x + self.n_aux, self.n_layers)
    }
}

/// Decoder D(ζ) = Tr_{aux} V†(ζ ⊗ |0_{N_T+N_B}⟩⟨0|)V; the input register is
/// laid out [latent | trash zeros | aux zeros].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderSpec {
    pub n_x: usize,
    pub n_z: usize,
    pub n_aux: usize,
    pub n_layers: usize,
}

impl DecoderSpec {
    pub fn new(n_x: usize, n_z: usize, n_aux: usize, n_layers: usize) -> Result<Self> {
        if n_z == 0 || n_z > n_x {
            return Err(Error::Config(format!("need 1 <= n_z <= n_x, got n_z={n_z}, n_x={n_x}")));
        }
        Ok(DecoderSpec { n_x, n_z, n_aux, n_layers })
    }

    pub fn n_trash(&self) -> usize {
        self.n_x - self.n_z
    }

    pub fn ansatz(&self) -> AnsatzSpec {
        AnsatzSpec::new(self.n_x + self.n_aux, self.n_layers)
    }
}

/// Prop. 1 sizing N_A = N_B = N_X + 2·N_Z, sufficient for full channel
/// expressivity; the §5 experiments use 0 or 1 instead.
pub fn default_aux_count(n_x: usize, n_z: usize) -> usize {
    n_x + 2 * n_z
}

fn check_param_len<T: Scalar>(spec: &AnsatzSpec, params: &AnsatzParams<T>) -> Result<()> {
    if params.values.len() != spec.param_count() {
        return Err(Error::DimMismatch(format!(
            "{} parameters supplied, ansatz needs {}",
            params.values.len(),
            spec.param_count()
        )));
    }
    Ok(())
}

// G·U for a diagonal Rzz(theta) on qubits (a, b): row i picks up
// exp(-i theta/2 * s_i), s_i = +1 when bits a,b agree.
fn apply_rzz_left<T: Scalar>(u: &mut CMatrix<T>, theta: T, a: usize, b: usize, n: usize) {
    let dim = u.dim();
    let half = theta * T::of(0.5);
    let (sin, cos) = (half.sin(), half.cos());
    let plus = C::new(cos, -sin); // e^{-i theta/2}
    let minus = C::new(cos, sin);
    let pa = n - 1 - a;
    let pb = n - 1 - b;
    let data = u.data_mut();
    for i in 0..dim {
        let same = ((i >> pa) & 1) == ((i >> pb) & 1);
        let ph = if same { plus } else { minus };
        for v in &mut data[i * dim..(i + 1) * dim] {
            *v = *v * ph;
        }
    }
}

// G·U for Ry(theta) on qubit q: mixes row pairs that differ in bit q.
fn apply_ry_left<T: Scalar>(u: &mut CMatrix<T>, theta: T, q: usize, n: usize) {
    let dim = u.dim();
    let half = theta * T::of(0.5);
    let (s, c) = (half.sin(), half.cos());
    let mask = 1usize << (n - 1 - q);
    let data = u.data_mut();
    for i0 in 0..dim {
        if i0 & mask != 0 {
            continue;
        }
        let i1 = i0 | mask;
        for j in 0..dim {
            let r0 = data[i0 * dim + j];
            let r1 = data[i1 * dim + j];
            data[i0 * dim + j] = C::new(r0.re * c - r1.re * s, r0.im * c - r1.im * s);
            data[i1 * dim + j] = C::new(r0.re * s + r1.re * c, r0.im * s + r1.im * c);
        }
    }
}

/// Full circuit unitary for the layered Rzz/Ry ansatz.
pub fn build_unitary<T: Scalar>(spec: &AnsatzSpec, params: &AnsatzParams<T>) -> Result<CMatrix<T>> {
    check_param_len(spec, params)?;
    let n = spec.n_qubits;
    if n == 0 {
        return Err(Error::Config("ansatz needs at least one qubit".into()));
    }
    let mut u = CMatrix::identity(1 << n);
    let mut k = 0;
    for _ in 0..spec.n_layers {
        if n >= 2 {
            for q in 0..n {
                apply_rzz_left(&mut u, params.values[k], q, (q + 1) % n, n);
                k += 1;
            }
        }
        for q in 0..n {
            apply_ry_left(&mut u, params.values[k], q, n);
            k += 1;
        }
    }
    Ok(u)
}

/// Encode with a prebuilt circuit unitary (the per-eval fast path: build the
/// unitary once, apply to every data point).
pub fn encode_with<T: Scalar>(
    enc: &EncoderSpec,
    u: &CMatrix<T>,
    rho: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    if rho.n_qubits() != enc.n_x {
        return Err(Error::DimMismatch(format!(
            "encoder expects {} qubits, state has {}",
            enc.n_x,
            rho.n_qubits()
        )));
    }
    let n = enc.n_x + enc.n_aux;
    if u.dim() != 1 << n {
        return Err(Error::DimMismatch("unitary dim does not match encoder register".into()));
    }
    let full = if enc.n_aux > 0 {
        kron(rho.mat(), DensityMatrix::<T>::zero_state(enc.n_aux).mat())?
    } else {
        rho.mat().clone()
    };
    let conj = u.adjoint().mul(&full).mul(u);
    let traced: Vec<usize> = (0..enc.n_trash()).chain(enc.n_x..n).collect();
    let kept = if traced.is_empty() { conj } else { partial_trace(&conj, n, &traced)? };
    Ok(DensityMatrix::trusted(enc.n_z, kept))
}

pub fn encode<T: Scalar>(
    enc: &EncoderSpec,
    params: &AnsatzParams<T>,
    rho: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    let u = build_unitary(&enc.ansatz(), params)?;
    encode_with(enc, &u, rho)
}

/// Decode with a prebuilt circuit unitary.
pub fn decode_with<T: Scalar>(
    dec: &DecoderSpec,
    v: &CMatrix<T>,
    zeta: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    if zeta.n_qubits() != dec.n_z {
        return Err(Error::DimMismatch(format!(
            "decoder expects {} latent qubits, state has {}",
            dec.n_z,
            zeta.n_qubits()
        )));
    }
    let n = dec.n_x + dec.n_aux;
    if v.dim() != 1 << n {
        return Err(Error::DimMismatch("unitary dim does not match decoder register".into()));
    }
    let pad = dec.n_trash() + dec.n_aux;
    let full = if pad > 0 {
        kron(zeta.mat(), DensityMatrix::<T>::zero_state(pad).mat())?
    } else {
        zeta.mat().clone()
    };
    let conj = v.adjoint().mul(&full).mul(v);
    let out = if dec.n_aux > 0 {
        let traced: Vec<usize> = (dec.n_x..n).collect();
        partial_trace(&conj, n, &traced)?
    } else {
        conj
    };
    Ok(DensityMatrix::trusted(dec.n_x, out))
}

pub fn decode<T: Scalar>(
    dec: &DecoderSpec,
    params: &AnsatzParams<T>,
    zeta: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    let v = build_unitary(&dec.ansatz(), params)?;
    decode_with(dec, &v, zeta)
}

/// Numeric CPTP verification over random inputs: trace preservation, output
/// positivity, and linearity on convex two-point mixtures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CptpReport {
    pub trials: usize,
    pub max_trace_dev: f64,
    pub min_eigenvalue: f64,
    pub max_linearity_residual: f64,
    pub pass: bool,
}

pub fn verify_cptp<T: Scalar>(
    channel: impl Fn(&DensityMatrix<T>) -> Result<DensityMatrix<T>>,
    n_in: usize,
    trials: usize,
    rng: &mut Rng,
) -> Result<CptpReport> {
    let mut max_trace_dev = T::zero();
    let mut min_eigenvalue = T::one();
    let mut max_lin = T::zero();
    for _ in 0..trials {
        let r1 = DensityMatrix::trusted(n_in, crate::linalg::random_density(rng, n_in));
        let r2 = DensityMatrix::trusted(n_in, crate::linalg::random_density(rng, n_in));
        let w: T = rng.uniform(T::zero(), T::one());
        let o1 = channel(&r1)?;
        let o2 = channel(&r2)?;
        for o in [&o1, &o2] {
            let tr = o.mat().trace();
            let dev = (C::new(tr.re - T::one(), tr.im)).norm();
            max_trace_dev = max_trace_dev.max(dev);
            let (vals, _) = eigh(o.mat())?;
            min_eigenvalue = min_eigenvalue.min(vals[0]);
        }
        let mix = DensityMatrix::trusted(
            n_in,
            r1.mat().scale(w).add(&r2.mat().scale(T::one() - w)),
        );
        let om = channel(&mix)?;
        let expect = o1.mat().scale(w).add(&o2.mat().scale(T::one() - w));
        max_lin = max_lin.max(om.mat().max_abs_diff(&expect));
    }
    let tol = 1e-9;
    Ok(CptpReport {
        trials,
        max_trace_dev: max_trace_dev.to_f64(),
        min_eigenvalue: min_eigenvalue.to_f64(),
        max_linearity_residual: max_lin.to_f64(),
        pass: max_trace_dev.to_f64() <= tol
            && min_eigenvalue.to_f64() >= -tol
            && max_lin.to_f64() <= tol,
    })
}
