//! Derivative-free training: a COBYLA-style minimizer (linear interpolation
//! over a simplex of n+1 points inside a shrinking trust region) wrapped in
//! epoch restarts with patience-based early stopping, plus the multi-seed
//! trainer.
//!
//! Every decision in the loop is a deterministic function of the objective
//! values, so a fixed (seed, config, dataset) triple reproduces the trace
//! byte for byte.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{DecoderSpec, EncoderSpec};
use crate::error::{Error, Result};
use crate::objective::{eval_global, instance_total, ModelParams, ObjectiveMode, ObjectiveSpec};
use crate::qstate::{global_state, DensityMatrix, GlobalState};
use crate::rng::Rng;
use crate::scalar::Scalar;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub patience: usize,
    pub seeds: Vec<u64>,
    pub rho_begin: f64,
    pub rho_end: f64,
    pub max_fun_per_epoch: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            patience: 5,
            seeds: vec![1, 2, 3, 4, 5],
            rho_begin: 0.5,
            rho_end: 1e-4,
            max_fun_per_epoch: 250,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if !(self.rho_end > 0.0 && self.rho_end <= self.rho_begin) {
            return Err(Error::Config("need 0 < rho_end <= rho_begin".into()));
        }
        if self.patience > self.epochs {
            return Err(Error::Config("patience must be <= epochs".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopReason {
    Patience,
    Epochs,
}

/// Full optimization record. Objective values are stored as f64 regardless
/// of the working precision so serialized traces compare across builds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainTrace {
    pub evals: Vec<f64>,
    pub epoch_best: Vec<f64>,
    pub best_objective: f64,
    pub best_params: Vec<f64>,
    pub stop: StopReason,
}

/// Gaussian elimination with partial pivoting; None on (near-)singular.
fn solve_linear<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < T::of(1e-14) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= factor * v;
            }
            let v = b[col];
            b[r] -= factor * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for c in row + 1..n {
            s -= a[row][c] * x[c];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

struct EvalCtx<'a, T: Scalar> {
    f: &'a mut dyn FnMut(&[T]) -> Result<T>,
    trace: Vec<f64>,
    count: usize,
}

impl<'a, T: Scalar> EvalCtx<'a, T> {
    fn eval(&mut self, x: &[T]) -> Result<T> {
        let v = (self.f)(x)?;
        self.count += 1;
        if !v.is_finite() {
            return Err(Error::NonFinite { at: self.count });
        }
        self.trace.push(v.to_f64());
        Ok(v)
    }
}

fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// One trust-region epoch from `x0`; returns the best point seen. The simplex
/// starts as coordinate offsets of size rho_begin, the model gradient comes
/// from linear interpolation, steps have length rho, and rho halves whenever
/// an adequate-geometry step fails to make sufficient progress.
fn cobyla_epoch<T: Scalar>(
    ctx: &mut EvalCtx<T>,
    x0: Vec<T>,
    f0: T,
    rho_begin: f64,
    rho_end: f64,
    max_fun: usize,
) -> Result<(Vec<T>, T)> {
    let n = x0.len();
    let mut best_x = x0.clone();
    let mut best_f = f0;
    let mut rho = T::of(rho_begin);
    let rho_min = T::of(rho_end);
    let budget_start = ctx.count;
    let spent = |ctx: &EvalCtx<T>| ctx.count - budget_start;

    // vertices[0] is kept as the incumbent
    let mut vx: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    let mut vf: Vec<T> = Vec::with_capacity(n + 1);
    vx.push(x0);
    vf.push(f0);
    for i in 0..n {
        if spent(ctx) >= max_fun {
            return Ok((best_x, best_f));
        }
        let mut p = vx[0].clone();
        p[i] += rho;
        let fp = ctx.eval(&p)?;
        if fp < best_f {
            best_f = fp;
            best_x = p.clone();
        }
        vx.push(p);
        vf.push(fp);
    }

    loop {
        if spent(ctx) >= max_fun {
            return Ok((best_x, best_f));
        }
        // keep the minimum at slot 0
        let mut imin = 0;
        for i in 1..=n {
            if vf[i] < vf[imin] {
                imin = i;
            }
        }
        vx.swap(0, imin);
        vf.swap(0, imin);

        // geometry: pull any vertex farther than 2.1 rho back onto the sphere
        let mut far = 0;
        let mut far_d = T::zero();
        for i in 1..=n {
            let d: Vec<T> = vx[i].iter().zip(&vx[0]).map(|(&a, &b)| a - b).collect();
            let dist = norm(&d);
            if dist > far_d {
                far_d = dist;
                far = i;
            }
        }
        if far > 0 && far_d > T::of(2.1) * rho {
            let scale = rho / far_d;
            let p: Vec<T> = vx[far]
                .iter()
                .zip(&vx[0])
                .map(|(&a, &b)| b + (a - b) * scale)
                .collect();
            let fp = ctx.eval(&p)?;
            if fp < best_f {
                best_f = fp;
                best_x = p.clone();
            }
            vx[far] = p;
            vf[far] = fp;
            continue;
        }

        // linear model gradient: rows (x_i - x_0)^T g = f_i - f_0
        let a: Vec<Vec<T>> = (1..=n)
            .map(|i| vx[i].iter().zip(&vx[0]).map(|(&p, &q)| p - q).collect())
            .collect();
        let b: Vec<T> = (1..=n).map(|i| vf[i] - vf[0]).collect();
        let g = match solve_linear(a, b) {
            Some(g) => g,
            None => {
                // degenerate simplex: rebuild coordinate offsets at current rho
                for i in 0..n {
                    if spent(ctx) >= max_fun {
                        return Ok((best_x, best_f));
                    }
                    let mut p = vx[0].clone();
                    p[i] += rho;
                    let fp = ctx.eval(&p)?;
                    if fp < best_f {
                        best_f = fp;
                        best_x = p.clone();
                    }
                    vx[i + 1] = p;
                    vf[i + 1] = fp;
                }
                continue;
            }
        };
        let gnorm = norm(&g);
        let pred = rho * gnorm;
        if pred <= T::of(1e-14) * (T::one() + vf[0].abs()) {
            if rho <= rho_min {
                return Ok((best_x, best_f));
            }
            rho = (rho * T::of(0.5)).max(rho_min);
            continue;
        }

        let step = rho / gnorm;
        let xt: Vec<T> = vx[0].iter().zip(&g).map(|(&x, &gi)| x - step * gi).collect();
        let ft = ctx.eval(&xt)?;
        if ft < best_f {
            best_f = ft;
            best_x = xt.clone();
        }

        // choose the vertex to replace: the one carrying the largest
        // barycentric weight of the step keeps the simplex volume up
        let d: Vec<T> = xt.iter().zip(&vx[0]).map(|(&a, &b)| a - b).collect();
        let cols: Vec<Vec<T>> = (0..n)
            .map(|r| (1..=n).map(|i| vx[i][r] - vx[0][r]).collect())
            .collect();
        let w = solve_linear(cols, d);
        let mut target = 0;
        if let Some(w) = w {
            let mut jmax = 0;
            for j in 1..n {
                if w[j].abs() > w[jmax].abs() {
                    jmax = j;
                }
            }
            let keeps_volume = w[jmax].abs() >= T::of(0.5);
            if ft < vf[jmax + 1] || keeps_volume {
                target = jmax + 1;
            }
        }
        if target == 0 {
            // fall back to replacing the worst vertex when the trial beats it
            let mut jworst = 1;
            for j in 2..=n {
                if vf[j] > vf[jworst] {
                    jworst = j;
                }
            }
            if ft < vf[jworst] {
                target = jworst;
            }
        }
        if target > 0 {
            vx[target] = xt;
            vf[target] = ft;
        }

        let improved = ft < vf[0] - T::of(0.1) * pred;
        if !improved {
            if rho <= rho_min {
                return Ok((best_x, best_f));
            }
            rho = (rho * T::of(0.5)).max(rho_min);
        }
    }
}

/// Epoch-restarted minimization: every epoch restarts the trust region at
/// rho_begin from the incumbent (the visible objective jumps at epoch
/// boundaries), stopping early after `patience` epochs without an
/// improvement of more than 1e-6.
pub fn minimize<T: Scalar>(
    mut objective: impl FnMut(&[T]) -> Result<T>,
    x0: &[T],
    cfg: &TrainConfig,
) -> Result<(Vec<T>, TrainTrace)> {
    cfg.validate()?;
    let n = x0.len();
    let mut ctx = EvalCtx { f: &mut objective, trace: Vec::new(), count: 0 };
    let f0 = ctx.eval(x0)?;
    let mut best_x = x0.to_vec();
    let mut best_f = f0;
    if n == 0 {
        return Ok((
            best_x.clone(),
            TrainTrace {
                evals: ctx.trace,
                epoch_best: vec![best_f.to_f64()],
                best_objective: best_f.to_f64(),
                best_params: Vec::new(),
                stop: StopReason::Epochs,
            },
        ));
    }
    if cfg.max_fun_per_epoch < n + 2 {
        return Err(Error::Config(format!(
            "max_fun_per_epoch must be at least {} for {} parameters",
            n + 2,
            n
        )));
    }
    let mut epoch_best = Vec::with_capacity(cfg.epochs);
    let mut stall = 0usize;
    let mut stop = StopReason::Epochs;
    for _ in 0..cfg.epochs {
        let (x, f) = cobyla_epoch(
            &mut ctx,
            best_x.clone(),
            best_f,
            cfg.rho_begin,
            cfg.rho_end,
            cfg.max_fun_per_epoch,
        )?;
        if f < best_f - T::of(1e-6) {
            stall = 0;
        } else {
            stall += 1;
        }
        if f < best_f {
            best_f = f;
            best_x = x;
        }
        epoch_best.push(best_f.to_f64());
        if stall >= cfg.patience {
            stop = StopReason::Patience;
            break;
        }
    }
    let trace = TrainTrace {
        evals: ctx.trace,
        epoch_best,
        best_objective: best_f.to_f64(),
        best_params: best_x.iter().map(|&v| v.to_f64()).collect(),
        stop,
    };
    Ok((best_x, trace))
}

/// Training data for [`train`]: per-point set or the precomputed mixture.
pub enum TrainData<'a, T: Scalar> {
    Instance(&'a [DensityMatrix<T>]),
    Global(&'a GlobalState<T>),
}

#[derive(Clone, Debug)]
pub struct TrainResult<T: Scalar> {
    pub seed: u64,
    pub params: ModelParams<T>,
    pub trace: TrainTrace,
}

/// Multi-seed training; each seed draws its initial parameters uniformly
/// from [−π, π). Seeds run independently (and in parallel), results come
/// back in seed order.
pub fn train<T: Scalar>(
    enc: &EncoderSpec,
    dec: &DecoderSpec,
    spec: &ObjectiveSpec<T>,
    data: TrainData<T>,
    cfg: &TrainConfig,
) -> Result<Vec<TrainResult<T>>> {
    spec.validate()?;
    cfg.validate()?;
    let owned_global;
    let global: Option<&GlobalState<T>> = match (spec.mode, &data) {
        (ObjectiveMode::Instance, TrainData::Instance(_)) => None,
        (ObjectiveMode::Global, TrainData::Global(g)) => Some(g),
        (ObjectiveMode::Global, TrainData::Instance(points)) => {
            owned_global = global_state(points)?;
            Some(&owned_global)
        }
        (ObjectiveMode::Instance, TrainData::Global(_)) => {
            return Err(Error::Config(
                "instance-mode training needs the per-point dataset".into(),
            ));
        }
    };
    let points = match &data {
        TrainData::Instance(p) => *p,
        TrainData::Global(_) => &[],
    };
    let ne = enc.ansatz().param_count();
    let nd = dec.ansatz().param_count();
    cfg.seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = Rng::seed_from_u64(seed);
            let x0: Vec<T> = (0..ne + nd)
                .map(|_| rng.uniform(-T::of(std::f64::consts::PI), T::of(std::f64::consts::PI)))
                .collect();
            let objective = |x: &[T]| -> Result<T> {
                let model = ModelParams::from_flat(enc, dec, x)?;
                match global {
                    Some(g) => Ok(eval_global(spec, enc, dec, &model, g)?.0),
                    None => instance_total(spec, enc, dec, &model, points),
                }
            };
            let (x_best, trace) = minimize(objective, &x0, cfg)?;
            Ok(TrainResult { seed, params: ModelParams::from_flat(enc, dec, &x_best)?, trace })
        })
        .collect()
}
