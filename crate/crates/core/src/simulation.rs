//! Synthetic diagonal-quadratic finite sums with exact optima, efficient
//! per-method iterations and Lyapunov-based checks of emitted certificates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::RateCertificate;
use crate::error::{Error, Result};
use crate::function_classes::IndividualAssumption;
use crate::jump_models::{equilibrium, FiniteSum, JumpRealization, Method};
use crate::lmi::StructuredP;

/// f_i(x) = ½ Σ_k d_ik x_k² + b_ikᵀx, stored row-major as n×p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFiniteSum {
    pub n: usize,
    pub p: usize,
    pub d: Vec<f64>,
    pub b: Vec<f64>,
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub assumption: IndividualAssumption,
    /// ℓ2 weight outside the f_i (m for SDCA instances, 0 otherwise).
    pub reg: f64,
    pub xstar: Vec<f64>,
}

impl QuadraticFiniteSum {
    pub fn curvature(&self, i: usize) -> &[f64] {
        &self.d[i * self.p..(i + 1) * self.p]
    }

    /// Per-coordinate average of the component curvatures.
    pub fn average_curvature(&self) -> Vec<f64> {
        let nf = self.n as f64;
        (0..self.p)
            .map(|k| (0..self.n).map(|i| self.d[i * self.p + k]).sum::<f64>() / nf)
            .collect()
    }

    fn average_linear(&self) -> Vec<f64> {
        let nf = self.n as f64;
        (0..self.p)
            .map(|k| (0..self.n).map(|i| self.b[i * self.p + k]).sum::<f64>() / nf)
            .collect()
    }

    pub fn value(&self, i: usize, x: &[f64]) -> f64 {
        let row = i * self.p;
        (0..self.p).map(|k| 0.5 * self.d[row + k] * x[k] * x[k] + self.b[row + k] * x[k]).sum()
    }

    /// Whether every curvature obeys `a` and the average lies in [m, L], up to `tol`.
    pub fn satisfies(&self, a: IndividualAssumption, m: f64, l: f64, tol: f64) -> bool {
        let (lo, hi) = a.curvature_bounds(m, l);
        let entries = self.d.iter().all(|&d| d >= lo - tol && d <= hi + tol);
        let avg = self.average_curvature().iter().all(|&d| d >= m - tol && d <= l + tol);
        entries && avg
    }
}

impl FiniteSum<f64> for QuadraticFiniteSum {
    fn n(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        self.p
    }

    fn grad_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let row = i * self.p;
        for k in 0..self.p {
            out[k] = self.d[row + k] * x[k] + self.b[row + k];
        }
    }

    fn stationary_point(&self, reg: f64) -> Result<Vec<f64>> {
        self.average_curvature()
            .iter()
            .zip(self.average_linear())
            .map(|(&h, b)| {
                let h = h + reg;
                if h > 0.0 {
                    Ok(-b / h)
                } else {
                    Err(Error::NoUniqueMinimizer)
                }
            })
            .collect()
    }
}

/// n values in [lo, hi] with mean exactly `target` (up to rounding): uniform
/// draws pulled towards the target by the largest factor that keeps them inside.
fn fill_with_mean(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64, target: f64) -> Vec<f64> {
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    let mean = u.iter().sum::<f64>() / n as f64;
    let mut c: f64 = 1.0;
    for &v in &u {
        let dev = v - mean;
        if dev > 0.0 {
            c = c.min((hi - target) / dev);
        } else if dev < 0.0 {
            c = c.min((lo - target) / dev);
        }
    }
    let c = c * (1.0 - 1e-12);
    let mut out: Vec<f64> = u.iter().map(|&v| target + c * (v - mean)).collect();
    let resid = target - out.iter().sum::<f64>() / n as f64;
    for v in &mut out {
        *v += resid;
    }
    out
}

/// Random instance whose averaged curvatures span [m, L] exactly (coordinate 0
/// sits at m, coordinate p−1 at L; with p = 1 only m is hit).
pub fn generate_problem(
    method: Method,
    assumption: IndividualAssumption,
    m: f64,
    l: f64,
    n: usize,
    p: usize,
    seed: u64,
) -> Result<QuadraticFiniteSum> {
    if !(m > 0.0 && l >= m && l.is_finite()) {
        return Err(Error::InvalidParameter("m > 0 and L >= m".into()));
    }
    if n < 2 {
        return Err(Error::InfeasibleClass("n >= 2".into()));
    }
    if p == 0 {
        return Err(Error::InvalidParameter("p >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = n as f64;
    let (lo, hi) = assumption.curvature_bounds(m, l);
    let targets: Vec<f64> = (0..p)
        .map(|k| match k {
            0 => m,
            k if k == p - 1 => l,
            _ => rng.gen_range(m..=l),
        })
        .collect();

    let mut d = vec![0.0; n * p];
    let force_negative = assumption == IndividualAssumption::SmoothOnly && n >= 3;
    for (k, &t) in targets.iter().enumerate() {
        // one component gets negative curvature, the rest absorb it; impossible
        // once m >= (n-1)L/n
        let room = (nf - 1.0) * hi - nf * t;
        let column = if force_negative && k == 0 && room > 0.0 {
            let neg = 0.5 * room.min(l);
            let rest_mean = (nf * t + neg) / (nf - 1.0);
            let mut col = vec![-neg];
            col.extend(fill_with_mean(&mut rng, n - 1, lo, hi, rest_mean));
            col
        } else {
            fill_with_mean(&mut rng, n, lo, hi, t)
        };
        for (i, v) in column.into_iter().enumerate() {
            d[i * p + k] = v;
        }
    }
    let b: Vec<f64> = (0..n * p).map(|_| rng.sample(StandardNormal)).collect();
    let reg = if method == Method::Sdca { m } else { 0.0 };
    let mut problem = QuadraticFiniteSum { n, p, d, b, m, l, assumption, reg, xstar: Vec::new() };
    problem.xstar = problem.stationary_point(reg)?;
    Ok(problem)
}

/// Initial tables: zeros, or the gradients at x⁰. SDCA tables are always
/// shifted so that x⁰ = Σy_i/(mn).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableInit {
    #[default]
    Zero,
    Gradients,
}

/// Stacked state ξ⁰ in the jump-system layout for a given primal start x⁰.
pub fn initial_state(
    method: Method,
    problem: &QuadraticFiniteSum,
    x0: &[f64],
    init: TableInit,
) -> Vec<f64> {
    let (n, p) = (problem.n, problem.p);
    let mut tables = vec![0.0; n * p];
    if init == TableInit::Gradients {
        for (i, chunk) in tables.chunks_mut(p).enumerate() {
            problem.grad_into(i, x0, chunk);
        }
    }
    match method {
        Method::Saga | Method::Sag => [tables, x0.to_vec()].concat(),
        Method::Finito => {
            let mut xi = tables;
            for _ in 0..n {
                xi.extend_from_slice(x0);
            }
            xi
        }
        Method::Sdca => {
            // y_i = −∇f_i(x⁰) + c with c chosen so that Σy_i/(mn) = x⁰
            let mut y: Vec<f64> = tables.iter().map(|g| -g).collect();
            let nf = n as f64;
            for k in 0..p {
                let mean: f64 = (0..n).map(|i| y[i * p + k]).sum::<f64>() / nf;
                let shift = problem.reg * x0[k] - mean;
                for i in 0..n {
                    y[i * p + k] += shift;
                }
            }
            y
        }
    }
}

/// How SDCA recovers x from the dual table each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdcaPrimal {
    /// x = Σy_i/(mn) recomputed from the table.
    Direct,
    /// x⁺ = x − α(y_i + ∇f_i(x)).
    Recursive,
}

/// One trajectory of a method in its efficient form. The state is kept in the
/// jump-system layout so Lyapunov values can be read off directly.
#[derive(Debug, Clone)]
pub struct Runner<'a> {
    method: Method,
    problem: &'a QuadraticFiniteSum,
    alpha: f64,
    xi: Vec<f64>,
    /// Σ_i y_i.
    ysum: Vec<f64>,
    /// Σ_i x_i for Finito, the primal x for SDCA.
    aux: Vec<f64>,
    sdca: SdcaPrimal,
    grad: Vec<f64>,
    grad_calls: u64,
}

impl<'a> Runner<'a> {
    pub fn new(method: Method, problem: &'a QuadraticFiniteSum, alpha: f64, xi0: Vec<f64>) -> Result<Self> {
        let (n, p) = (problem.n, problem.p);
        if xi0.len() != method.state_dim(n) * p {
            return Err(Error::DimensionMismatch(format!(
                "state has {} entries, expected {}",
                xi0.len(),
                method.state_dim(n) * p
            )));
        }
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha >= 0".into()));
        }
        if method == Method::Sdca && !(problem.reg > 0.0) {
            return Err(Error::MissingRegularizer);
        }
        let mut r = Self {
            method,
            problem,
            alpha,
            xi: xi0,
            ysum: vec![0.0; p],
            aux: vec![0.0; p],
            sdca: SdcaPrimal::Recursive,
            grad: vec![0.0; p],
            grad_calls: 0,
        };
        r.resync();
        Ok(r)
    }

    pub fn with_sdca_primal(mut self, mode: SdcaPrimal) -> Self {
        self.sdca = mode;
        self
    }

    fn resync(&mut self) {
        let (n, p) = (self.problem.n, self.problem.p);
        self.ysum = vec![0.0; p];
        for i in 0..n {
            for k in 0..p {
                self.ysum[k] += self.xi[i * p + k];
            }
        }
        match self.method {
            Method::Finito => {
                self.aux = vec![0.0; p];
                for i in 0..n {
                    for k in 0..p {
                        self.aux[k] += self.xi[(n + i) * p + k];
                    }
                }
            }
            Method::Sdca => {
                let s = 1.0 / (self.problem.reg * n as f64);
                self.aux = self.ysum.iter().map(|v| v * s).collect();
            }
            _ => {}
        }
    }

    pub fn state(&self) -> &[f64] {
        &self.xi
    }

    pub fn grad_calls(&self) -> u64 {
        self.grad_calls
    }

    /// The point the gradients are evaluated at, v = (C̃ ⊗ I)ξ.
    pub fn iterate(&self) -> Vec<f64> {
        let (n, p) = (self.problem.n, self.problem.p);
        match self.method {
            Method::Saga | Method::Sag => self.xi[n * p..].to_vec(),
            Method::Finito => {
                let nf = n as f64;
                (0..p).map(|k| self.aux[k] / nf - self.alpha * self.ysum[k]).collect()
            }
            Method::Sdca => match self.sdca {
                SdcaPrimal::Recursive => self.aux.clone(),
                SdcaPrimal::Direct => {
                    let s = 1.0 / (self.problem.reg * n as f64);
                    (0..p).map(|k| (0..n).map(|i| self.xi[i * p + k]).sum::<f64>() * s).collect()
                }
            },
        }
    }

    fn eval_grad(&mut self, i: usize, x: &[f64]) {
        self.problem.grad_into(i, x, &mut self.grad);
        self.grad_calls += 1;
    }

    /// One iteration with sampled component `i` (0-based). O(p) work apart
    /// from the SDCA direct mode.
    pub fn step(&mut self, i: usize) {
        let (n, p) = (self.problem.n, self.problem.p);
        let nf = n as f64;
        let a = self.alpha;
        let yi = i * p;
        match self.method {
            Method::Saga => {
                let x = self.xi[n * p..].to_vec();
                self.eval_grad(i, &x);
                for k in 0..p {
                    let g = self.grad[k];
                    let old = self.xi[yi + k];
                    self.xi[n * p + k] -= a * (g - old + self.ysum[k] / nf);
                    self.ysum[k] += g - old;
                    self.xi[yi + k] = g;
                }
            }
            Method::Sag => {
                let x = self.xi[n * p..].to_vec();
                self.eval_grad(i, &x);
                for k in 0..p {
                    let g = self.grad[k];
                    self.ysum[k] += g - self.xi[yi + k];
                    self.xi[yi + k] = g;
                    self.xi[n * p + k] -= a * self.ysum[k] / nf;
                }
            }
            Method::Finito => {
                let v = self.iterate();
                self.eval_grad(i, &v);
                let xi_block = (n + i) * p;
                for k in 0..p {
                    let g = self.grad[k];
                    self.ysum[k] += g - self.xi[yi + k];
                    self.xi[yi + k] = g;
                    self.aux[k] += v[k] - self.xi[xi_block + k];
                    self.xi[xi_block + k] = v[k];
                }
            }
            Method::Sdca => {
                let x = self.iterate();
                self.eval_grad(i, &x);
                let at = a * self.problem.reg * nf;
                for k in 0..p {
                    let g = self.grad[k];
                    let old = self.xi[yi + k];
                    let delta = -at * (old + g);
                    self.xi[yi + k] = old + delta;
                    self.ysum[k] += delta;
                    self.aux[k] = x[k] - a * (old + g);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub iters: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub init: TableInit,
}

/// Trial-averaged trajectory statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub method: Method,
    pub n: usize,
    pub p: usize,
    pub alpha: f64,
    pub seed: u64,
    pub trials: usize,
    /// ChaCha stream of each trial under `seed`.
    pub trial_streams: Vec<u64>,
    pub k: Vec<usize>,
    pub mean_v: Vec<f64>,
    pub stderr_v: Vec<f64>,
    /// ‖v^k − x*‖² averaged over trials, v^k the gradient evaluation point.
    pub mean_dist2: Vec<f64>,
    /// ‖ξ^k − ξ*‖² averaged over trials.
    pub mean_state_dist2: Vec<f64>,
    /// Condition number of P̃.
    pub cond_p: f64,
    pub grad_calls: u64,
}

/// Random start: x⁰ = x* + u with ‖u‖ = 1, drawn from stream 0 of `seed`.
/// Per-trial V, ‖x − x*‖², ‖ξ − ξ*‖² paths and gradient count.
type TrialPaths = (Vec<f64>, Vec<f64>, Vec<f64>, u64);

pub fn initial_point(problem: &QuadraticFiniteSum, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    loop {
        let u: Vec<f64> = (0..problem.p).map(|_| rng.sample(StandardNormal)).collect();
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return problem.xstar.iter().zip(&u).map(|(x, v)| x + v / norm).collect();
        }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn lyapunov(weights: &StructuredP<f64>, n: usize, p: usize, xi: &[f64], xistar: &[f64]) -> f64 {
    let d: Vec<f64> = xi.iter().zip(xistar).map(|(a, b)| a - b).collect();
    weights.quadratic_form(n, p, &d)
}

/// Runs `opts.trials` independent trajectories from a shared initial state and
/// aggregates V(ξ^k) under `weights`. Trial t draws indices from stream t+1.
pub fn run_method(
    method: Method,
    problem: &QuadraticFiniteSum,
    alpha: f64,
    weights: &StructuredP<f64>,
    opts: &RunOptions,
) -> Result<SimulationTrace> {
    if !weights.fits(method) {
        return Err(Error::InvalidParameter(format!("P form does not fit {method}")));
    }
    if opts.trials == 0 {
        return Err(Error::InvalidParameter("trials >= 1".into()));
    }
    let (n, p) = (problem.n, problem.p);
    let reg = if method == Method::Sdca { Some(problem.reg) } else { None };
    let real = JumpRealization::build(method, n, alpha.max(f64::MIN_POSITIVE), reg)?;
    let eq = equilibrium(&real, problem)?;
    let x0 = initial_point(problem, opts.seed);
    let xi0 = initial_state(method, problem, &x0, opts.init);
    let eigs = weights.matrix(n).eigenvalues()?;
    let cond_p = eigs.last().unwrap().abs() / eigs[0].abs();

    let per_trial: Vec<Result<TrialPaths>> = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(t as u64 + 1);
            let mut run = Runner::new(method, problem, alpha, xi0.clone())?;
            let mut v = Vec::with_capacity(opts.iters + 1);
            let mut dx = Vec::with_capacity(opts.iters + 1);
            let mut ds = Vec::with_capacity(opts.iters + 1);
            for it in 0..=opts.iters {
                if it > 0 {
                    run.step(rng.gen_range(0..n));
                }
                v.push(lyapunov(weights, n, p, run.state(), &eq.xistar));
                dx.push(dist2(&run.iterate(), &problem.xstar));
                ds.push(dist2(run.state(), &eq.xistar));
            }
            Ok((v, dx, ds, run.grad_calls()))
        })
        .collect();

    let len = opts.iters + 1;
    let tf = opts.trials as f64;
    let per_trial = per_trial.into_iter().collect::<Result<Vec<_>>>()?;
    let mean_of = |pick: &dyn Fn(&TrialPaths) -> &Vec<f64>| -> Vec<f64> {
        (0..len).map(|k| per_trial.iter().map(|t| pick(t)[k]).sum::<f64>() / tf).collect()
    };
    let mean_v = mean_of(&|t| &t.0);
    let mean_dist2 = mean_of(&|t| &t.1);
    let mean_state_dist2 = mean_of(&|t| &t.2);
    // two-pass variance; the one-pass form cancels when all trials agree
    let stderr_v = (0..len)
        .map(|k| {
            if opts.trials < 2 {
                return 0.0;
            }
            let ss: f64 = per_trial.iter().map(|t| (t.0[k] - mean_v[k]).powi(2)).sum();
            (ss / (tf - 1.0) / tf).sqrt()
        })
        .collect();
    let grad_calls = per_trial.iter().map(|t| t.3).sum();
    Ok(SimulationTrace {
        method,
        n,
        p,
        alpha,
        seed: opts.seed,
        trials: opts.trials,
        trial_streams: (1..=opts.trials as u64).collect(),
        k: (0..len).collect(),
        mean_v,
        stderr_v,
        mean_dist2,
        mean_state_dist2,
        cond_p,
        grad_calls,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    #[serde(rename = "mean_V")]
    pub mean_v: f64,
    #[serde(rename = "stderr_V")]
    pub stderr_v: f64,
    pub envelope: f64,
    pub mean_dist2: f64,
    pub envelope_status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Least-squares slope of log(mean V_k) against k.
    pub slope: f64,
    pub fitted_rho2: f64,
    pub rho2: f64,
    /// ρ^{2k}·V₀·(1 + 3·stderr_k/mean_k).
    pub envelope: Vec<f64>,
    pub envelope_ok: bool,
    pub first_violation: Option<usize>,
    /// E‖ξ^k − ξ*‖² ≤ ρ^{2k}·cond(P̃)·‖ξ⁰ − ξ*‖², with the same stderr slack.
    pub cond_envelope_ok: bool,
}

impl RateFit {
    pub fn rows(&self, trace: &SimulationTrace) -> Vec<TraceRow> {
        trace
            .k
            .iter()
            .map(|&k| TraceRow {
                k,
                mean_v: trace.mean_v[k],
                stderr_v: trace.stderr_v[k],
                envelope: self.envelope[k],
                mean_dist2: trace.mean_dist2[k],
                envelope_status: if trace.mean_v[k] <= self.envelope[k] { "ok" } else { "violated" }.into(),
            })
            .collect()
    }
}

pub const MIN_FIT_ITERS: usize = 50;
pub const MIN_FIT_TRIALS: usize = 100;

/// Fitted decay of the mean Lyapunov value and the envelope check against ρ².
pub fn empirical_rate(trace: &SimulationTrace, rho2: f64) -> Result<RateFit> {
    let iters = trace.k.len().saturating_sub(1);
    if iters < MIN_FIT_ITERS || trace.trials < MIN_FIT_TRIALS {
        return Err(Error::InsufficientTrace(format!(
            "needs >= {MIN_FIT_ITERS} iterations and >= {MIN_FIT_TRIALS} trials, got {iters} and {}",
            trace.trials
        )));
    }
    let v0 = trace.mean_v[0];
    if !(v0 > 0.0) {
        return Err(Error::DegenerateTrace("V0 = 0".into()));
    }
    let pts: Vec<(f64, f64)> = trace
        .k
        .iter()
        .zip(&trace.mean_v)
        .filter(|(_, &v)| v > 0.0 && v.ln().is_finite())
        .map(|(&k, &v)| (k as f64, v.ln()))
        .collect();
    let np = pts.len() as f64;
    let (mk, mv) = pts.iter().fold((0.0, 0.0), |(a, b), (k, v)| (a + k / np, b + v / np));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (k, v)| (a + (k - mk) * (v - mv), b + (k - mk) * (k - mk)));
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };

    let slack = |k: usize, mean: f64, se: f64| {
        let rel = if mean > 0.0 { se / mean } else { 0.0 };
        rho2.powi(k as i32) * (1.0 + 3.0 * rel)
    };
    let envelope: Vec<f64> = trace
        .k
        .iter()
        .map(|&k| v0 * slack(k, trace.mean_v[k], trace.stderr_v[k]))
        .collect();
    let first_violation = trace.k.iter().copied().find(|&k| trace.mean_v[k] > envelope[k]);
    let s0 = trace.mean_state_dist2[0];
    let cond_envelope_ok = trace.k.iter().all(|&k| {
        trace.mean_state_dist2[k] <= trace.cond_p * s0 * slack(k, trace.mean_v[k], trace.stderr_v[k])
    });
    Ok(RateFit {
        slope,
        fitted_rho2: slope.exp(),
        rho2,
        envelope,
        envelope_ok: first_violation.is_none(),
        first_violation,
        cond_envelope_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub states: usize,
    /// max over states of E[V(ξ⁺)] − ρ²V(ξ).
    pub max_violation: f64,
    /// max over states of (E[V(ξ⁺)] − ρ²V(ξ)) / max(1, V(ξ)).
    pub max_relative: f64,
}

impl ContractionReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_relative <= tol
    }
}

pub const CONTRACTION_TOL: f64 = 1e-9;

fn check_problem_matches(c: &RateCertificate<f64>, problem: &QuadraticFiniteSum) -> Result<()> {
    if problem.n != c.n {
        return Err(Error::DimensionMismatch(format!("problem n={} vs certificate n={}", problem.n, c.n)));
    }
    if !problem.satisfies(c.sector, c.m, c.l, 1e-12 * c.l.max(1.0)) {
        return Err(Error::InvalidParameter(format!(
            "problem is outside the {} class with m={}, L={}",
            c.sector, c.m, c.l
        )));
    }
    if c.method == Method::Sdca && (problem.reg - c.m).abs() > 1e-15 * c.m {
        return Err(Error::InvalidParameter("SDCA problem regularizer must equal m".into()));
    }
    Ok(())
}

/// Exact conditional expectation (1/n)Σ_i V(Ã_iξ + B̃_iw) against ρ²V(ξ) for
/// each state.
pub fn check_onestep_contraction(
    c: &RateCertificate<f64>,
    problem: &QuadraticFiniteSum,
    states: &[Vec<f64>],
) -> Result<ContractionReport> {
    check_problem_matches(c, problem)?;
    let r = c.realization()?;
    let eq = equilibrium(&r, problem)?;
    let (n, p) = (problem.n, problem.p);
    let rho2 = c.rate().rho2();
    let mut report = ContractionReport { states: states.len(), max_violation: f64::NEG_INFINITY, max_relative: f64::NEG_INFINITY };
    for xi in states {
        if xi.len() != eq.xistar.len() {
            return Err(Error::DimensionMismatch(format!("state has {} entries", xi.len())));
        }
        let v = lyapunov(&c.p, n, p, xi, &eq.xistar);
        let expected = (1..=n)
            .map(|i| lyapunov(&c.p, n, p, &r.step_exact(xi, problem, i), &eq.xistar))
            .sum::<f64>()
            / n as f64;
        let gap = expected - rho2 * v;
        report.max_violation = report.max_violation.max(gap);
        report.max_relative = report.max_relative.max(gap / v.max(1.0));
    }
    Ok(report)
}

/// States reachable from random initializations: ξ⁰ = ξ* + Gaussian noise of
/// random scale, followed by 0–20 random iterations.
pub fn sample_states(
    method: Method,
    problem: &QuadraticFiniteSum,
    alpha: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let reg = if method == Method::Sdca { Some(problem.reg) } else { None };
    let real = JumpRealization::build(method, problem.n, alpha, reg)?;
    let eq = equilibrium(&real, problem)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
        let xi0: Vec<f64> = eq
            .xistar
            .iter()
            .map(|&x| x + scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let mut run = Runner::new(method, problem, alpha, xi0)?;
        for _ in 0..rng.gen_range(0..=20) {
            run.step(rng.gen_range(0..problem.n));
        }
        out.push(run.state().to_vec());
    }
    Ok(out)
}

/// Instance in the certificate's class (and with its regularizer for SDCA).
pub fn problem_for(c: &RateCertificate<f64>, p: usize, seed: u64) -> Result<QuadraticFiniteSum> {
    generate_problem(c.method, c.assumption, c.m, c.l, c.n, p, seed)
}
