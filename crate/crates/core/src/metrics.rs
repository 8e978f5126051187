//! Evaluation quantities: fidelity reconstruction rate, pairwise-fidelity
//! PCC, latent volume, and the f/l/r reporting triple.

use serde::{Deserialize, Serialize};

use crate::channel::{build_unitary, decode_with, encode_with, DecoderSpec, EncoderSpec};
use crate::data::{Dataset, Side};
use crate::error::{Error, Result};
use crate::losses::fidelity;
use crate::objective::ModelParams;
use crate::qstate::{bloch_coords, DensityMatrix};
use crate::qsvc::{evaluate, fit, kernel_cross, kernel_matrix, QsvcConfig};
use crate::scalar::Scalar;

/// Latent and reconstructed states for one side of the split, in index order.
pub fn map_side<T: Scalar>(
    enc: &EncoderSpec,
    dec: &DecoderSpec,
    model: &ModelParams<T>,
    ds: &Dataset<T>,
    side: Side,
) -> Result<(Vec<DensityMatrix<T>>, Vec<DensityMatrix<T>>)> {
    let points = ds.side_points(side)?;
    let u = build_unitary(&enc.ansatz(), &model.theta_e)?;
    let v = build_unitary(&dec.ansatz(), &model.theta_d)?;
    let mut latents = Vec::with_capacity(points.len());
    let mut recons = Vec::with_capacity(points.len());
    for rho in &points {
        let zeta = encode_with(enc, &u, rho)?;
        recons.push(decode_with(dec, &v, &zeta)?);
        latents.push(zeta);
    }
    Ok((latents, recons))
}

/// Mean F(ρ_i, decode(encode(ρ_i))) over the chosen split side.
pub fn reconstruction_rate<T: Scalar>(
    enc: &EncoderSpec,
    dec: &DecoderSpec,
    model: &ModelParams<T>,
    ds: &Dataset<T>,
    side: Side,
) -> Result<T> {
    let points = ds.side_points(side)?;
    let u = build_unitary(&enc.ansatz(), &model.theta_e)?;
    let v = build_unitary(&dec.ansatz(), &model.theta_d)?;
    let mut acc = T::zero();
    for rho in &points {
        let sigma = decode_with(dec, &v, &encode_with(enc, &u, rho)?)?;
        acc += fidelity(rho, &sigma)?;
    }
    Ok(acc / T::of(points.len() as f64))
}

fn upper_triangle_fidelities<T: Scalar>(states: &[DensityMatrix<T>]) -> Result<Vec<T>> {
    let n = states.len();
    let mut v = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            v.push(fidelity(&states[i], &states[j])?);
        }
    }
    Ok(v)
}

/// Pearson correlation between the strict upper triangles of the two
/// pairwise-fidelity matrices.
pub fn pairwise_fidelity_pcc<T: Scalar>(
    states_a: &[DensityMatrix<T>],
    states_b: &[DensityMatrix<T>],
) -> Result<T> {
    if states_a.len() != states_b.len() {
        return Err(Error::DimMismatch("state-set sizes differ".into()));
    }
    if states_a.len() < 3 {
        return Err(Error::Invalid("pairwise PCC needs at least 3 states".into()));
    }
    let fa = upper_triangle_fidelities(states_a)?;
    let fb = upper_triangle_fidelities(states_b)?;
    let n = T::of(fa.len() as f64);
    let mean = |v: &[T]| v.iter().copied().fold(T::zero(), |a, b| a + b) / n;
    let (ma, mb) = (mean(&fa), mean(&fb));
    let mut cov = T::zero();
    let mut va = T::zero();
    let mut vb = T::zero();
    for (&a, &b) in fa.iter().zip(&fb) {
        cov += (a - ma) * (b - mb);
        va += (a - ma) * (a - ma);
        vb += (b - mb) * (b - mb);
    }
    if va <= T::zero() || vb <= T::zero() {
        return Err(Error::Invalid("zero variance in a pairwise-fidelity triangle".into()));
    }
    Ok(cov / (va.sqrt() * vb.sqrt()))
}

/// Vol_latent = √(σ_x² + σ_y² + σ_z²): population standard deviations of the
/// Bloch coordinates across the set, combined in quadrature. Single-qubit
/// latents only.
pub fn latent_volume<T: Scalar>(latents: &[DensityMatrix<T>]) -> Result<T> {
    if latents.len() < 2 {
        return Err(Error::Invalid("latent volume needs at least 2 states".into()));
    }
    if latents.iter().any(|z| z.n_qubits() != 1) {
        return Err(Error::Invalid(
            "latent volume is defined for single-qubit latents only".into(),
        ));
    }
    let n = T::of(latents.len() as f64);
    let mut coords = Vec::with_capacity(latents.len());
    let mut mean = [T::zero(); 3];
    for z in latents {
        let (x, y, zc) = bloch_coords(z, 0)?;
        mean[0] += x;
        mean[1] += y;
        mean[2] += zc;
        coords.push([x, y, zc]);
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var_sum = T::zero();
    for c in &coords {
        for k in 0..3 {
            var_sum += (c[k] - mean[k]) * (c[k] - mean[k]);
        }
    }
    Ok((var_sum / n).sqrt())
}

/// QSVC accuracy: kernel fit on the train states, scored on the test states.
pub fn qsvc_accuracy<T: Scalar>(
    cfg: &QsvcConfig,
    train: &[DensityMatrix<T>],
    train_labels: &[i8],
    test: &[DensityMatrix<T>],
    test_labels: &[i8],
) -> Result<T> {
    if train.is_empty() || train.len() != train_labels.len() || test.len() != test_labels.len() {
        return Err(Error::DimMismatch("labels vs states".into()));
    }
    let (spec, params) = cfg.kernel_for::<T>(train[0].n_qubits())?;
    let k = kernel_matrix(train, &spec, &params)?;
    let y: Vec<T> = train_labels.iter().map(|&l| T::of(l as f64)).collect();
    let model = fit(&k, &y, T::of(cfg.c_reg))?;
    let kc = kernel_cross(test, train, &spec, &params)?;
    let yt: Vec<T> = test_labels.iter().map(|&l| T::of(l as f64)).collect();
    let (acc, _) = evaluate(&model, &kc, &yt)?;
    Ok(acc)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MeanStd { mean, std: var.sqrt() }
}

/// f = test-side reconstruction rate, l/r = QSVC test accuracy on latent and
/// reconstructed states; mean ± population std over the seed models.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ReportTriple {
    pub f: MeanStd,
    pub l: MeanStd,
    pub r: MeanStd,
}

pub fn report_triple<T: Scalar>(
    enc: &EncoderSpec,
    dec: &DecoderSpec,
    models: &[ModelParams<T>],
    ds: &Dataset<T>,
    qsvc: &QsvcConfig,
) -> Result<ReportTriple> {
    if models.is_empty() {
        return Err(Error::Invalid("report needs at least one trained seed".into()));
    }
    let train_labels = ds
        .side_labels(Side::Train)?
        .ok_or_else(|| Error::Invalid("f/l/r report needs labels".into()))?;
    let test_labels = ds.side_labels(Side::Test)?.unwrap();
    let mut fs = Vec::with_capacity(models.len());
    let mut ls = Vec::with_capacity(models.len());
    let mut rs = Vec::with_capacity(models.len());
    for model in models {
        fs.push(reconstruction_rate(enc, dec, model, ds, Side::Test)?.to_f64());
        let (lat_train, rec_train) = map_side(enc, dec, model, ds, Side::Train)?;
        let (lat_test, rec_test) = map_side(enc, dec, model, ds, Side::Test)?;
        ls.push(qsvc_accuracy(qsvc, &lat_train, &train_labels, &lat_test, &test_labels)?.to_f64());
        rs.push(qsvc_accuracy(qsvc, &rec_train, &train_labels, &rec_test, &test_labels)?.to_f64());
    }
    Ok(ReportTriple { f: mean_std(&fs), l: mean_std(&ls), r: mean_std(&rs) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::AnsatzParams;
    use crate::data::{gen_swiss_roll, gen_synthetic_quantum, split};
    use crate::linalg::random_pure;
    use crate::qstate::{amplitude_embed, maximally_mixed};
    use crate::rng::Rng;
    use approx::assert_abs_diff_eq;

    fn zero_model(enc: &EncoderSpec, dec: &DecoderSpec) -> ModelParams<f64> {
        ModelParams {
            theta_e: AnsatzParams::zeros(&enc.ansatz()),
            theta_d: AnsatzParams::zeros(&dec.ansatz()),
        }
    }

    #[test]
    fn identity_model_rate_is_one() {
        let ds = gen_synthetic_quantum::<f64>(6, 3).unwrap();
        let enc = EncoderSpec::new(2, 2, 0, 1).unwrap();
        let dec = DecoderSpec::new(2, 2, 0, 1).unwrap();
        let model = zero_model(&enc, &dec);
        let rate = reconstruction_rate(&enc, &dec, &model, &ds, Side::All).unwrap();
        assert_abs_diff_eq!(rate, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn rotation_model_rate_matches_closed_form() {
        // 1-qubit encoder Ry(t), identity decoder: every basis-state input
        // reconstructs with fidelity cos²(t/2)
        let zero = crate::qstate::DensityMatrix::<f64>::zero_state(1);
        let one = amplitude_embed(&[0.0, 1.0], 1).unwrap();
        let ds = Dataset::new(
            vec![zero, one],
            None,
            crate::data::Provenance {
                generator: "test".into(),
                seed: None,
                params: serde_json::json!({}),
            },
            false,
        )
        .unwrap();
        let enc = EncoderSpec::new(1, 1, 0, 1).unwrap();
        let dec = DecoderSpec::new(1, 1, 0, 1).unwrap();
        let t = 0.8_f64;
        let model = ModelParams {
            theta_e: AnsatzParams::new(vec![t]),
            theta_d: AnsatzParams::zeros(&dec.ansatz()),
        };
        let rate = reconstruction_rate(&enc, &dec, &model, &ds, Side::All).unwrap();
        assert_abs_diff_eq!(rate, (t / 2.0).cos().powi(2), epsilon = 1e-12);
    }

    #[test]
    fn rate_requires_nonempty_side() {
        let ds = gen_synthetic_quantum::<f64>(3, 1).unwrap();
        let enc = EncoderSpec::new(2, 2, 0, 1).unwrap();
        let dec = DecoderSpec::new(2, 2, 0, 1).unwrap();
        let model = zero_model(&enc, &dec);
        assert!(reconstruction_rate(&enc, &dec, &model, &ds, Side::Train).is_err());
    }

    #[test]
    fn pcc_self_is_one_and_three_point_oracle() {
        let mut rng = Rng::seed_from_u64(5);
        let states: Vec<_> = (0..5)
            .map(|_| DensityMatrix::<f64>::new(2, random_pure(&mut rng, 2)).unwrap())
            .collect();
        let pcc = pairwise_fidelity_pcc(&states, &states).unwrap();
        assert_abs_diff_eq!(pcc, 1.0, epsilon = 1e-12);

        // 3 states on each side: direct 3-choose-2 computation
        let a: Vec<_> = (0..3)
            .map(|_| DensityMatrix::<f64>::new(1, random_pure(&mut rng, 1)).unwrap())
            .collect();
        let b: Vec<_> = (0..3)
            .map(|_| DensityMatrix::<f64>::new(1, random_pure(&mut rng, 1)).unwrap())
            .collect();
        let fa = [
            fidelity(&a[0], &a[1]).unwrap(),
            fidelity(&a[0], &a[2]).unwrap(),
            fidelity(&a[1], &a[2]).unwrap(),
        ];
        let fb = [
            fidelity(&b[0], &b[1]).unwrap(),
            fidelity(&b[0], &b[2]).unwrap(),
            fidelity(&b[1], &b[2]).unwrap(),
        ];
        let m = |v: &[f64]| v.iter().sum::<f64>() / 3.0;
        let (ma, mb) = (m(&fa), m(&fb));
        let cov: f64 = fa.iter().zip(&fb).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = fa.iter().map(|x| (x - ma) * (x - ma)).sum();
        let vb: f64 = fb.iter().map(|y| (y - mb) * (y - mb)).sum();
        let want = cov / (va.sqrt() * vb.sqrt());
        let got = pairwise_fidelity_pcc(&a, &b).unwrap();
        assert_abs_diff_eq!(got, want, epsilon = 1e-10);
        assert!(got.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn pcc_rejects_degenerate_input() {
        let mut rng = Rng::seed_from_u64(9);
        let a: Vec<_> = (0..3)
            .map(|_| DensityMatrix::<f64>::new(1, random_pure(&mut rng, 1)).unwrap())
            .collect();
        let b = vec![a[0].clone(); 3]; // all pairwise fidelities equal 1
        assert!(pairwise_fidelity_pcc(&a, &b).is_err());
        assert!(pairwise_fidelity_pcc(&a[..2], &a[..2]).is_err());
        assert!(pairwise_fidelity_pcc(&a[..2], &a).is_err());
    }

    #[test]
    fn latent_volume_examples() {
        let zero = DensityMatrix::<f64>::zero_state(1);
        let one = amplitude_embed(&[0.0, 1.0], 1).unwrap();
        assert_abs_diff_eq!(
            latent_volume(&[zero.clone(), zero.clone()]).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        // {|0⟩, |1⟩}: σ_z = 1 (population), others 0
        assert_abs_diff_eq!(latent_volume(&[zero.clone(), one]).unwrap(), 1.0, epsilon = 1e-12);
        // antipodal x-axis pair matches by rotation symmetry
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = amplitude_embed(&[s, s], 1).unwrap();
        let minus = amplitude_embed(&[s, -s], 1).unwrap();
        assert_abs_diff_eq!(latent_volume(&[plus, minus]).unwrap(), 1.0, epsilon = 1e-12);
        // bounds
        let mut rng = Rng::seed_from_u64(2);
        let states: Vec<_> = (0..20)
            .map(|_| DensityMatrix::<f64>::new(1, random_pure(&mut rng, 1)).unwrap())
            .collect();
        let vol = latent_volume(&states).unwrap();
        assert!(vol >= 0.0 && vol <= 3f64.sqrt() + 1e-12);
        // errors
        assert!(latent_volume(&[zero.clone()]).is_err());
        assert!(latent_volume(&[maximally_mixed::<f64>(2), maximally_mixed::<f64>(2)]).is_err());
    }

    #[test]
    fn report_triple_shapes_and_latent_recon_agreement() {
        // zero-aux decoder: reconstructed states are unitary images of the
        // latents, so latent and reconstructed kernels coincide and l == r
        let mut ds = gen_swiss_roll::<f64>(16, 5, 0.2, 4).unwrap();
        let mut rng = Rng::seed_from_u64(1);
        split(&mut ds, 0.5, true, &mut rng).unwrap();
        let enc = EncoderSpec::new(3, 1, 0, 2).unwrap();
        let dec = DecoderSpec::new(3, 1, 0, 2).unwrap();
        let mut seed_rng = Rng::seed_from_u64(8);
        let models: Vec<_> = (0..2)
            .map(|_| ModelParams {
                theta_e: AnsatzParams::<f64>::random_uniform(&enc.ansatz(), &mut seed_rng),
                theta_d: AnsatzParams::<f64>::random_uniform(&dec.ansatz(), &mut seed_rng),
            })
            .collect();
        let cfg = QsvcConfig::default();
        let report = report_triple(&enc, &dec, &models, &ds, &cfg).unwrap();
        assert!(report.f.mean > 0.0 && report.f.mean <= 1.0 + 1e-12);
        assert!((0.0..=1.0).contains(&report.l.mean));
        assert_abs_diff_eq!(report.l.mean, report.r.mean, epsilon = 1e-9);
        assert_abs_diff_eq!(report.l.std, report.r.std, epsilon = 1e-9);

        // single seed: std exactly 0
        let single = report_triple(&enc, &dec, &models[..1], &ds, &cfg).unwrap();
        assert_eq!(single.f.std, 0.0);
        assert_eq!(single.l.std, 0.0);
    }
}
