use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use zqvae_core::channel::{
    build_unitary, decode_with, encode_with, verify_cptp, AnsatzParams, DecoderSpec, EncoderSpec,
};
use zqvae_core::linalg::{kron, random_pure, random_unitary, CMatrix};
use zqvae_core::losses::{default_cost, fidelity, jsd, kld, LossKind};
use zqvae_core::objective::{
    check_elbo_bound, check_global_instance_equiv, ModelParams, ObjectiveMode, ObjectiveSpec,
};
use zqvae_core::qstate::{global_state, DensityMatrix};
use zqvae_core::{Result, Rng};

#[derive(Args)]
pub struct CheckArgs {
    /// Random trials per suite
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the suite report here as JSON
    #[arg(long)]
    json: Option<PathBuf>,
    /// Test hook: corrupt the CPTP statistic so the run must fail
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Serialize)]
struct Suite {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn rand_model(rng: &mut Rng, enc: &EncoderSpec, dec: &DecoderSpec) -> ModelParams<f64> {
    ModelParams {
        theta_e: AnsatzParams::random_uniform(&enc.ansatz(), rng),
        theta_d: AnsatzParams::random_uniform(&dec.ansatz(), rng),
    }
}

fn pure_dm(rng: &mut Rng, n: usize) -> DensityMatrix<f64> {
    DensityMatrix::new(n, random_pure(rng, n)).expect("random_pure yields a valid state")
}

/// Trace preservation, positivity, and linearity of randomly parameterized
/// encoder/decoder channels.
fn suite_cptp(trials: usize, rng: &mut Rng, inject: bool) -> Result<Suite> {
    let inner = 4usize;
    let models = trials.div_ceil(inner).max(1);
    let mut max_trace = 0.0f64;
    let mut min_eig = 1.0f64;
    let mut max_lin = 0.0f64;
    for _ in 0..models {
        let layers = 1 + rng.uniform_usize(3);
        let enc = EncoderSpec::new(2, 1, rng.uniform_usize(2), layers)?;
        let dec = DecoderSpec::new(2, 1, rng.uniform_usize(2), layers)?;
        let u = build_unitary(&enc.ansatz(), &AnsatzParams::<f64>::random_uniform(&enc.ansatz(), rng))?;
        let v = build_unitary(&dec.ansatz(), &AnsatzParams::<f64>::random_uniform(&dec.ansatz(), rng))?;
        let rep = verify_cptp(
            |rho| decode_with(&dec, &v, &encode_with(&enc, &u, rho)?),
            2,
            inner,
            rng,
        )?;
        max_trace = max_trace.max(rep.max_trace_dev);
        min_eig = min_eig.min(rep.min_eigenvalue);
        max_lin = max_lin.max(rep.max_linearity_residual);
    }
    if inject {
        max_trace += 1e-3;
    }
    let pass = max_trace <= 1e-9 && min_eig >= -1e-9 && max_lin <= 1e-10;
    Ok(Suite {
        name: "cptp",
        pass,
        detail: format!(
            "{models} channels x {inner} inputs: max trace dev {max_trace:.2e} (<=1e-9), min eigenvalue {min_eig:.2e} (>=-1e-9), max linearity residual {max_lin:.2e} (<=1e-10)"
        ),
    })
}

/// ELBO lower bound on random models over small pure-state sets.
fn suite_elbo(trials: usize, rng: &mut Rng) -> Result<Suite> {
    let mut violations = 0usize;
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let layers = 1 + rng.uniform_usize(3);
        let enc = EncoderSpec::new(2, 2, 0, layers)?;
        let dec = DecoderSpec::new(2, 2, 0, layers)?;
        let model = rand_model(rng, &enc, &dec);
        let n = 1 + rng.uniform_usize(6);
        let points: Vec<_> = (0..n).map(|_| pure_dm(rng, 2)).collect();
        let report = check_elbo_bound(&enc, &dec, &model, &global_state(&points)?)?;
        worst = worst.min(report.margin);
        if report.margin < -1e-6 {
            violations += 1;
        }
    }
    Ok(Suite {
        name: "elbo",
        pass: violations == 0,
        detail: format!(
            "{trials} models: {violations} bound violations beyond 1e-6 (min margin {worst:.2e})"
        ),
    })
}

/// Global-objective vs mean-instance-objective identity at beta = 0 with the
/// linear reconstruction loss.
fn suite_equivalence(trials: usize, rng: &mut Rng) -> Result<Suite> {
    let enc = EncoderSpec::new(2, 1, 1, 2)?;
    let dec = DecoderSpec::new(2, 1, 1, 2)?;
    let spec = ObjectiveSpec::new(
        LossKind::WassersteinAux,
        LossKind::Jsd,
        0.0,
        ObjectiveMode::Instance,
    )?;
    let mut max_diff = 0.0f64;
    for _ in 0..trials {
        let model = rand_model(rng, &enc, &dec);
        let n = 1 + rng.uniform_usize(8);
        let points: Vec<_> = (0..n).map(|_| pure_dm(rng, 2)).collect();
        let rep = check_global_instance_equiv(&spec, &enc, &dec, &model, &points)?;
        max_diff = max_diff.max(rep.diff);
    }
    Ok(Suite {
        name: "equivalence",
        pass: max_diff <= 1e-9,
        detail: format!("{trials} trials: max |global - instance/N| {max_diff:.2e} (<=1e-9)"),
    })
}

/// Divergence axioms plus two closed-form oracles (classical KL on commuting
/// pairs; purity identity of the swap cost).
fn suite_divergences(trials: usize, rng: &mut Rng) -> Result<Suite> {
    let mut worst_nonneg = f64::INFINITY;
    let mut worst_ident = 0.0f64;
    let mut symmetric = true;
    let mut worst_oracle = 0.0f64;
    let mut worst_swap = 0.0f64;
    for _ in 0..trials {
        let n = 1 + rng.uniform_usize(2);
        let a = DensityMatrix::new(n, zqvae_core::linalg::random_density(rng, n))?;
        let b = DensityMatrix::new(n, zqvae_core::linalg::random_density(rng, n))?;
        worst_nonneg = worst_nonneg.min(kld(&a, &b)?).min(jsd(&a, &b)?);
        worst_ident = worst_ident.max(kld(&a, &a)?.abs()).max(jsd(&a, &a)?.abs());
        symmetric &= jsd(&a, &b)? == jsd(&b, &a)?;

        // commuting pair with spectra far above the log floor: quantum KL
        // must match the classical value on the shared eigenbasis
        let dim = 1usize << n;
        let basis = random_unitary::<f64>(rng, dim);
        let draw_probs = |rng: &mut Rng| {
            let raw: Vec<f64> = (0..dim).map(|_| rng.uniform(0.05, 1.0)).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect::<Vec<_>>()
        };
        let p = draw_probs(rng);
        let q = draw_probs(rng);
        let from_spectrum = |probs: &[f64]| -> Result<DensityMatrix<f64>> {
            let m = CMatrix::from_fn(dim, |i, j| {
                (0..dim)
                    .map(|k| basis.get(i, k) * basis.get(j, k).conj() * probs[k])
                    .sum()
            });
            DensityMatrix::new(n, m.hermitize())
        };
        let classical: f64 = p.iter().zip(&q).map(|(&pi, &qi)| pi * (pi / qi).ln()).sum();
        let quantum = kld(&from_spectrum(&p)?, &from_spectrum(&q)?)?;
        worst_oracle = worst_oracle.max((quantum - classical).abs());

        let cost = default_cost::<f64>(n)?;
        let lhs = kron(a.mat(), a.mat())?.trace_prod_re(cost.mat());
        worst_swap = worst_swap.max((lhs - (1.0 - a.purity()) / 2.0).abs());

        let f_ident = (1.0 - fidelity(&a, &a)?).abs();
        worst_ident = worst_ident.max(f_ident);
    }
    let pass = worst_nonneg >= -1e-9
        && worst_ident <= 1e-8
        && symmetric
        && worst_oracle <= 1e-9
        && worst_swap <= 1e-10;
    Ok(Suite {
        name: "divergences",
        pass,
        detail: format!(
            "{trials} draws: min value {worst_nonneg:.2e} (>=-1e-9), identity dev {worst_ident:.2e} (<=1e-8), JSD symmetric {symmetric}, KL oracle dev {worst_oracle:.2e} (<=1e-9), swap-trick dev {worst_swap:.2e} (<=1e-10)"
        ),
    })
}

pub fn run(args: CheckArgs) -> Result<i32> {
    let mut rng = Rng::seed_from_u64(args.seed);
    let suites = vec![
        suite_cptp(args.trials, &mut rng, args.inject_fault)?,
        suite_elbo(args.trials, &mut rng)?,
        suite_equivalence(args.trials, &mut rng)?,
        suite_divergences(args.trials, &mut rng)?,
    ];
    for s in &suites {
        println!("{}: {} — {}", s.name, if s.pass { "pass" } else { "FAIL" }, s.detail);
    }
    let failed = suites.iter().filter(|s| !s.pass).count();
    if let Some(path) = &args.json {
        std::fs::write(path, serde_json::to_string_pretty(&suites)?)?;
    }
    if failed == 0 {
        println!("all {} suites pass", suites.len());
        Ok(0)
    } else {
        println!("{failed} suite(s) FAILED");
        Ok(3)
    }
}
