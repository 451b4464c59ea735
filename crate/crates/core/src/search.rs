//! Numerical search for the smallest certifiable rate: Nelder–Mead over the
//! scalar unknowns of a reduced LMI bundle, restarted from analytic points and
//! random draws, wrapped in a bisection on the rate.
//!
//! A missing witness is a one-sided verdict: the search failed, which is not a
//! proof of infeasibility.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::{applicable_certificates, profile_for, saga_certificate, seed_points, verify_tol};
use crate::error::Result;
use crate::function_classes::IndividualAssumption;
use crate::jump_models::{JumpRealization, Method};
use crate::lmi::{structured_bundle, MultiplierPair, Rate, StructuredP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub rho2_tol: f64,
    pub feas_tol: f64,
    pub restarts: usize,
    pub max_evals: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { rho2_tol: 1e-6, feas_tol: 1e-9, restarts: 16, max_evals: 2000, seed: 0 }
    }
}

/// Which family of Lyapunov matrices the search ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PForm {
    /// diag(p1·I, p2), for SAGA and SAG.
    Diagonal,
    /// [[p1·I + p2·eeᵀ, p3·e], [p3·eᵀ, p4]], for SAGA and SAG.
    Invariant,
    Finito,
    Sdca,
}

impl PForm {
    pub fn default_for(method: Method) -> Self {
        match method {
            Method::Saga | Method::Sag => Self::Diagonal,
            Method::Finito => Self::Finito,
            Method::Sdca => Self::Sdca,
        }
    }

    pub fn num_vars(self) -> usize {
        match self {
            Self::Diagonal | Self::Sdca => 4,
            Self::Invariant => 6,
            Self::Finito => 7,
        }
    }

    /// Positive p entries are exp(u); λ = u²; the rest are free.
    fn decode(self, u: &[f64]) -> (StructuredP<f64>, MultiplierPair<f64>) {
        let k = u.len();
        let mult = MultiplierPair::new(u[k - 2] * u[k - 2], u[k - 1] * u[k - 1]);
        let p = match self {
            Self::Diagonal => StructuredP::Diagonal { p1: u[0].exp(), p2: u[1].exp() },
            Self::Invariant => StructuredP::Invariant { p1: u[0].exp(), p2: u[1], p3: u[2], p4: u[3].exp() },
            Self::Finito => StructuredP::Finito { p1: u[0].exp(), p2: u[1], p3: u[2], p4: u[3].exp(), p5: u[4] },
            Self::Sdca => StructuredP::Sdca { p1: u[0].exp(), p2: u[1] },
        };
        (p, mult)
    }

    fn encode(self, p: &StructuredP<f64>, mult: &MultiplierPair<f64>) -> Option<Vec<f64>> {
        let ln = |x: f64| if x > 0.0 { Some(x.ln()) } else { None };
        let mut u = match (self, *p) {
            (Self::Diagonal, StructuredP::Diagonal { p1, p2 }) => vec![ln(p1)?, ln(p2)?],
            (Self::Invariant, StructuredP::Diagonal { p1, p2 }) => vec![ln(p1)?, 0.0, 0.0, ln(p2)?],
            (Self::Invariant, StructuredP::Invariant { p1, p2, p3, p4 }) => vec![ln(p1)?, p2, p3, ln(p4)?],
            (Self::Finito, StructuredP::Finito { p1, p2, p3, p4, p5 }) => vec![ln(p1)?, p2, p3, ln(p4)?, p5],
            (Self::Sdca, StructuredP::Sdca { p1, p2 }) => vec![ln(p1)?, p2],
            _ => return None,
        };
        u.push(mult.lambda1.max(0.0).sqrt());
        u.push(mult.lambda2.max(0.0).sqrt());
        Some(u)
    }

    fn is_log(self, i: usize) -> bool {
        match self {
            Self::Diagonal | Self::Sdca => i == 0 || (self == Self::Diagonal && i == 1),
            Self::Invariant | Self::Finito => i == 0 || i == 3,
        }
    }
}

/// Divides (P̃, λ) by the largest |p| so that the largest P parameter is 1.
pub fn normalize(p: &StructuredP<f64>, mult: &MultiplierPair<f64>) -> (StructuredP<f64>, MultiplierPair<f64>) {
    let s = p.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if s > 0.0 && s.is_finite() {
        (p.scaled(1.0 / s), mult.scaled(1.0 / s))
    } else {
        (*p, *mult)
    }
}

/// A point at which the reduced bundle verifies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchWitness {
    pub method: Method,
    pub assumption: IndividualAssumption,
    /// Class whose sector the LMI used.
    pub sector: IndividualAssumption,
    pub form: PForm,
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub n: usize,
    pub alpha: f64,
    pub rho2: f64,
    pub gap: f64,
    #[serde(rename = "P_params")]
    pub p: StructuredP<f64>,
    pub lambdas: MultiplierPair<f64>,
    /// Largest NSD eigenvalue divided by the common bundle scale.
    pub normalized_max_eig: f64,
    /// Largest NSD eigenvalue at the normalized point, without scaling.
    pub raw_max_eig: f64,
    /// "analytic" when a closed-form point was accepted as is, else "search".
    pub origin: String,
}

impl SearchWitness {
    /// Re-evaluates the bundle at the witness.
    pub fn verify(&self, tol: f64) -> Result<bool> {
        let prob = Problem::new(self.method, self.sector, self.m, self.l, self.n, self.alpha)?;
        let b = structured_bundle(&prob.realization, &prob.profile, Rate::from_gap(self.gap), &self.p, &self.lambdas)?;
        b.is_feasible(tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartDiagnostics {
    pub restart: usize,
    pub sector: IndividualAssumption,
    pub start: String,
    pub evals: usize,
    pub best_normalized: f64,
    pub best_raw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub witness: Option<SearchWitness>,
    pub evals: usize,
    pub restarts: Vec<RestartDiagnostics>,
}

struct Problem {
    realization: JumpRealization<f64>,
    profile: crate::function_classes::AssumptionProfile<f64>,
}

impl Problem {
    fn new(method: Method, sector: IndividualAssumption, m: f64, l: f64, n: usize, alpha: f64) -> Result<Self> {
        let realization = JumpRealization::build(method, n, alpha, (method == Method::Sdca).then_some(m))?;
        let profile = profile_for(method, sector, m, l)?;
        Ok(Self { realization, profile })
    }

    /// (objective on the normalized point, raw max eigenvalue). Non-PD or
    /// non-evaluable points get objective ≥ 1.
    fn objective(&self, form: PForm, u: &[f64], rate: Rate<f64>, pd_margin: f64) -> (f64, f64) {
        let (p, mult) = form.decode(u);
        let (p, mult) = normalize(&p, &mult);
        let bundle = match structured_bundle(&self.realization, &self.profile, rate, &p, &mult) {
            Ok(b) => b,
            Err(_) => return (f64::INFINITY, f64::INFINITY),
        };
        match bundle.evaluate() {
            Ok(rep) if rep.max_scaled_nsd.is_finite() => {
                let raw = rep.nsd_max_eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if rep.min_scaled_pd > pd_margin {
                    (rep.max_scaled_nsd, raw)
                } else {
                    (1.0 + (pd_margin - rep.min_scaled_pd), raw)
                }
            }
            _ => (f64::INFINITY, f64::INFINITY),
        }
    }
}

struct NmOutcome {
    best: Vec<f64>,
    best_f: f64,
    best_raw: f64,
    evals: usize,
}

/// Nelder–Mead with standard coefficients; stops once f ≤ target, the budget
/// is spent, or the simplex collapses.
fn nelder_mead(f: &dyn Fn(&[f64]) -> (f64, f64), x0: &[f64], steps: &[f64], target: f64, max_evals: usize) -> NmOutcome {
    let d = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        simplex.push(x);
    }
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| -> (f64, f64) {
        *evals += 1;
        let (v, r) = f(x);
        (if v.is_nan() { f64::INFINITY } else { v }, r)
    };
    let mut vals: Vec<(f64, f64)> = simplex.iter().map(|x| eval(x, &mut evals)).collect();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    loop {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[a].0.partial_cmp(&vals[b].0).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let spread = simplex
            .iter()
            .skip(1)
            .map(|x| x.iter().zip(&simplex[0]).fold(0.0f64, |a, (p, q)| a.max((p - q).abs())))
            .fold(0.0f64, f64::max);
        if vals[0].0 <= target || evals >= max_evals || spread < 1e-12 {
            break;
        }
        let centroid: Vec<f64> = (0..d).map(|j| simplex[..d].iter().map(|x| x[j]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..d).map(|j| centroid[j] + t * (simplex[d][j] - centroid[j])).collect() };
        let xr = along(-alpha);
        let fr = eval(&xr, &mut evals);
        if fr.0 < vals[0].0 {
            let xe = along(-gamma);
            let fe = eval(&xe, &mut evals);
            if fe.0 < fr.0 {
                simplex[d] = xe;
                vals[d] = fe;
            } else {
                simplex[d] = xr;
                vals[d] = fr;
            }
        } else if fr.0 < vals[d - 1].0 {
            simplex[d] = xr;
            vals[d] = fr;
        } else {
            let (xc, fc) = if fr.0 < vals[d].0 {
                let x = along(-rho);
                let v = eval(&x, &mut evals);
                (x, v)
            } else {
                let x = along(rho);
                let v = eval(&x, &mut evals);
                (x, v)
            };
            if fc.0 < vals[d].0.min(fr.0) {
                simplex[d] = xc;
                vals[d] = fc;
            } else {
                for i in 1..=d {
                    let x: Vec<f64> = (0..d).map(|j| simplex[0][j] + sigma * (simplex[i][j] - simplex[0][j])).collect();
                    vals[i] = eval(&x, &mut evals);
                    simplex[i] = x;
                }
            }
        }
    }
    NmOutcome { best: simplex[0].clone(), best_f: vals[0].0, best_raw: vals[0].1, evals }
}

/// Classes whose sector constraints hold for functions of class `a`.
pub fn admissible_sectors(method: Method, a: IndividualAssumption) -> Vec<IndividualAssumption> {
    use IndividualAssumption::*;
    let all = match a {
        StronglyConvex => vec![StronglyConvex, ConvexSmooth, SmoothOnly],
        ConvexSmooth => vec![ConvexSmooth, SmoothOnly],
        SmoothOnly => vec![SmoothOnly],
    };
    if method == Method::Sdca {
        // strongly convex components enter SDCA through the convex sector
        let mut v: Vec<_> = all.into_iter().filter(|&s| s != StronglyConvex).collect();
        if v.is_empty() {
            v.push(SmoothOnly);
        }
        v
    } else {
        all
    }
}

/// Inputs of one feasibility question.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSpec {
    pub method: Method,
    pub assumption: IndividualAssumption,
    pub m: f64,
    pub l: f64,
    pub n: usize,
    pub alpha: f64,
    pub form: PForm,
}

impl SearchSpec {
    pub fn new(method: Method, assumption: IndividualAssumption, m: f64, l: f64, n: usize, alpha: f64) -> Self {
        Self { method, assumption, m, l, n, alpha, form: PForm::default_for(method) }
    }

    pub fn with_form(mut self, form: PForm) -> Self {
        self.form = form;
        self
    }

    fn analytic_seeds(&self) -> Vec<(StructuredP<f64>, MultiplierPair<f64>)> {
        seed_points(self.method, self.m, self.l, self.n, self.alpha)
    }
}

fn restart_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_start(form: PForm, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..form.num_vars())
        .map(|i| {
            let z: f64 = rng.sample(StandardNormal);
            if form.is_log(i) {
                rng.gen_range(-8.0..2.0)
            } else {
                z * 10f64.powf(rng.gen_range(-4.0..0.0))
            }
        })
        .collect()
}

fn steps_for(form: PForm, u: &[f64]) -> Vec<f64> {
    u.iter()
        .enumerate()
        .map(|(i, &x)| if form.is_log(i) { 0.5 } else { 0.25 * x.abs().max(1e-4) })
        .collect()
}

/// Looks for (P̃, λ) satisfying the reduced bundle at the given rate. Closed-form
/// points and `extra_seeds` are tried first; restart 0 starts from the best of
/// them, later restarts from perturbations and random draws.
pub fn feasible_at_with_seeds(
    spec: &SearchSpec,
    rho2: f64,
    cfg: &SearchConfig,
    extra_seeds: &[(StructuredP<f64>, MultiplierPair<f64>)],
) -> Result<FeasibilityResult> {
    feasible_at_gap(spec, Rate::from_rho2(rho2), cfg, extra_seeds)
}

pub fn feasible_at(spec: &SearchSpec, rho2: f64, cfg: &SearchConfig) -> Result<FeasibilityResult> {
    feasible_at_with_seeds(spec, rho2, cfg, &[])
}

fn feasible_at_gap(
    spec: &SearchSpec,
    rate: Rate<f64>,
    cfg: &SearchConfig,
    extra_seeds: &[(StructuredP<f64>, MultiplierPair<f64>)],
) -> Result<FeasibilityResult> {
    let form = spec.form;
    let mut seeds: Vec<Vec<f64>> =
        extra_seeds.iter().chain(spec.analytic_seeds().iter()).filter_map(|(p, m)| form.encode(p, m)).collect();
    if seeds.is_empty() {
        seeds.push(vec![0.0; form.num_vars()]);
    }
    let pd_margin = verify_tol::<f64>();
    let mut total_evals = 0usize;
    let mut diags = Vec::new();
    for (si, sector) in admissible_sectors(spec.method, spec.assumption).into_iter().enumerate() {
        let prob = Problem::new(spec.method, sector, spec.m, spec.l, spec.n, spec.alpha)?;
        let obj = |u: &[f64]| prob.objective(form, u, rate, pd_margin);
        let witness_from = |u: &[f64], f: f64, raw: f64, origin: &str| -> SearchWitness {
            let (p, mult) = form.decode(u);
            let (p, mult) = normalize(&p, &mult);
            SearchWitness {
                method: spec.method,
                assumption: spec.assumption,
                sector,
                form,
                m: spec.m,
                l: spec.l,
                n: spec.n,
                alpha: spec.alpha,
                rho2: rate.rho2(),
                gap: rate.gap(),
                p,
                lambdas: mult,
                normalized_max_eig: f,
                raw_max_eig: raw,
                origin: origin.to_string(),
            }
        };
        // seeds as given
        let mut best_seed = (f64::INFINITY, 0usize);
        for (k, s) in seeds.iter().enumerate() {
            let (f, raw) = obj(s);
            total_evals += 1;
            if f <= cfg.feas_tol {
                return Ok(FeasibilityResult {
                    witness: Some(witness_from(s, f, raw, if k < extra_seeds.len() { "warm-start" } else { "analytic" })),
                    evals: total_evals,
                    restarts: diags,
                });
            }
            if f < best_seed.0 {
                best_seed = (f, k);
            }
        }
        let base = seeds[best_seed.1].clone();
        let outcomes: Vec<(RestartDiagnostics, Option<SearchWitness>)> = (0..cfg.restarts)
            .into_par_iter()
            .map(|r| {
                let mut rng = restart_rng(cfg.seed, (si * 1_000_003 + r) as u64);
                let (start, label) = if r == 0 {
                    (base.clone(), "seed")
                } else if r % 2 == 1 {
                    let s = &seeds[(r / 2) % seeds.len()];
                    let x: Vec<f64> = s
                        .iter()
                        .enumerate()
                        .map(|(i, &x)| {
                            let z: f64 = rng.sample(StandardNormal);
                            if form.is_log(i) {
                                x + z
                            } else {
                                x * (1.0 + 0.5 * z)
                            }
                        })
                        .collect();
                    (x, "perturbed-seed")
                } else {
                    (random_start(form, &mut rng), "random")
                };
                let out = nelder_mead(&obj, &start, &steps_for(form, &start), cfg.feas_tol, cfg.max_evals);
                let diag = RestartDiagnostics {
                    restart: r,
                    sector,
                    start: label.to_string(),
                    evals: out.evals,
                    best_normalized: out.best_f,
                    best_raw: out.best_raw,
                };
                let w = (out.best_f <= cfg.feas_tol).then(|| witness_from(&out.best, out.best_f, out.best_raw, "search"));
                (diag, w)
            })
            .collect();
        for (diag, w) in outcomes {
            total_evals += diag.evals;
            diags.push(diag);
            if let Some(w) = w {
                return Ok(FeasibilityResult { witness: Some(w), evals: total_evals, restarts: diags });
            }
        }
    }
    Ok(FeasibilityResult { witness: None, evals: total_evals, restarts: diags })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    /// A witness exists at `rho2_best`.
    Certified,
    /// No witness even at ρ² = 1 (one-sided).
    NoWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub method: Method,
    pub assumption: IndividualAssumption,
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub n: usize,
    pub alpha: f64,
    pub status: SearchStatus,
    /// None when no witness was found.
    pub rho2_best: Option<f64>,
    pub gap_best: Option<f64>,
    /// Best closed-form rate that seeded the bisection, if one applied.
    pub analytic_rho2: Option<f64>,
    pub witness: Option<SearchWitness>,
    pub evals: usize,
    /// (ρ², witness found) for every bisection probe.
    pub probes: Vec<(f64, bool)>,
    /// Restart diagnostics from the last infeasible probe.
    pub restarts: Vec<RestartDiagnostics>,
    pub config: SearchConfig,
}

/// Closed-form points that verify at their own rates for these inputs.
pub fn analytic_witnesses(spec: &SearchSpec) -> Vec<(f64, StructuredP<f64>, MultiplierPair<f64>, IndividualAssumption)> {
    let mut v: Vec<_> = match spec.method {
        Method::Saga => saga_certificate(spec.assumption, spec.m, spec.l, spec.n, spec.alpha, None)
            .into_iter()
            .collect(),
        Method::Sag => Vec::new(),
        _ => {
            let mut found = Vec::new();
            for s in admissible_sectors(spec.method, spec.assumption) {
                found.extend(applicable_certificates(spec.method, s, spec.m, spec.l, spec.n, spec.alpha));
            }
            found
        }
    };
    v.sort_by(|a, b| b.gap.partial_cmp(&a.gap).expect("finite"));
    v.into_iter().map(|c| (c.gap, c.p, c.lambdas, c.sector)).collect()
}

/// Bisection on the gap 1 − ρ². The upper end starts at the best closed-form
/// rate when one applies, otherwise at ρ² = 1 which must be feasible.
pub fn bisect_rate(spec: &SearchSpec, cfg: &SearchConfig) -> Result<SearchResult> {
    let analytic = if spec.form == PForm::default_for(spec.method) { analytic_witnesses(spec) } else { Vec::new() };
    let mut evals = 0usize;
    let mut probes = Vec::new();
    let mut last_diags = Vec::new();
    let mut seeds: Vec<(StructuredP<f64>, MultiplierPair<f64>)> = Vec::new();
    let base = SearchResult {
        method: spec.method,
        assumption: spec.assumption,
        m: spec.m,
        l: spec.l,
        n: spec.n,
        alpha: spec.alpha,
        status: SearchStatus::NoWitness,
        rho2_best: None,
        gap_best: None,
        analytic_rho2: analytic.first().map(|a| 1.0 - a.0),
        witness: None,
        evals: 0,
        probes: Vec::new(),
        restarts: Vec::new(),
        config: *cfg,
    };

    // feasible end of the bracket
    let (mut hi_gap, mut best) = if let Some((gap, p, mult, sector)) = analytic.first() {
        seeds.push((*p, *mult));
        let prob = Problem::new(spec.method, *sector, spec.m, spec.l, spec.n, spec.alpha)?;
        let (p, mult) = normalize(p, mult);
        let b = structured_bundle(&prob.realization, &prob.profile, Rate::from_gap(*gap), &p, &mult)?;
        let rep = b.evaluate()?;
        let w = SearchWitness {
            method: spec.method,
            assumption: spec.assumption,
            sector: *sector,
            form: spec.form,
            m: spec.m,
            l: spec.l,
            n: spec.n,
            alpha: spec.alpha,
            rho2: 1.0 - gap,
            gap: *gap,
            p,
            lambdas: mult,
            normalized_max_eig: rep.max_scaled_nsd,
            raw_max_eig: rep.nsd_max_eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            origin: "analytic".into(),
        };
        (*gap, w)
    } else {
        let res = feasible_at_gap(spec, Rate::from_gap(0.0), cfg, &seeds)?;
        evals += res.evals;
        probes.push((1.0, res.witness.is_some()));
        match res.witness {
            Some(w) => (0.0, w),
            None => {
                return Ok(SearchResult { evals, probes, restarts: res.restarts, ..base });
            }
        }
    };
    seeds.insert(0, (best.p, best.lambdas));

    // infeasible end: 1 − 4/n, or ρ² = 0 if that turns out feasible
    let mut lo_gap = (4.0 / spec.n as f64).min(1.0).max(hi_gap);
    let mut lo_known_infeasible = false;
    if lo_gap > hi_gap {
        let res = feasible_at_gap(spec, Rate::from_gap(lo_gap), cfg, &seeds)?;
        evals += res.evals;
        probes.push((1.0 - lo_gap, res.witness.is_some()));
        if let Some(w) = res.witness {
            hi_gap = lo_gap;
            seeds.insert(0, (w.p, w.lambdas));
            best = w;
            lo_gap = 1.0;
        } else {
            lo_known_infeasible = true;
            last_diags = res.restarts;
        }
    }
    if !lo_known_infeasible && lo_gap > hi_gap {
        let res = feasible_at_gap(spec, Rate::from_gap(lo_gap), cfg, &seeds)?;
        evals += res.evals;
        probes.push((1.0 - lo_gap, res.witness.is_some()));
        if let Some(w) = res.witness {
            hi_gap = lo_gap;
            best = w;
        } else {
            last_diags = res.restarts;
        }
    }
    while lo_gap - hi_gap > cfg.rho2_tol {
        let mid = 0.5 * (lo_gap + hi_gap);
        let res = feasible_at_gap(spec, Rate::from_gap(mid), cfg, &seeds)?;
        evals += res.evals;
        probes.push((1.0 - mid, res.witness.is_some()));
        match res.witness {
            Some(w) => {
                hi_gap = mid;
                seeds.insert(0, (w.p, w.lambdas));
                seeds.truncate(8);
                best = w;
            }
            None => {
                lo_gap = mid;
                last_diags = res.restarts;
            }
        }
    }
    Ok(SearchResult {
        status: SearchStatus::Certified,
        rho2_best: Some(1.0 - hi_gap),
        gap_best: Some(hi_gap),
        witness: Some(best),
        evals,
        probes,
        restarts: last_diags,
        ..base
    })
}

/// Stepsize and rate that earlier work reports for SAG: α = 1/(16L) and
/// ρ² = 1 − min{m/(16L), 1/(8n)}.
pub fn published_sag_point(m: f64, l: f64, n: usize) -> (f64, f64) {
    (1.0 / (16.0 * l), 1.0 - (m / (16.0 * l)).min(1.0 / (8.0 * n as f64)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SagProbeRow {
    pub rho2: f64,
    /// Witness with P̃ = diag(p1·I, p2).
    pub restricted: Option<SearchWitness>,
    pub restricted_best: f64,
    /// Witness with the permutation-invariant P̃ (lossless for this LMI).
    pub invariant: Option<SearchWitness>,
    pub invariant_best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SagProbe {
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub n: usize,
    pub alpha: f64,
    pub assumption: IndividualAssumption,
    pub rows: Vec<SagProbeRow>,
    /// Once the restricted search fails for some ρ², it fails for every smaller ρ².
    pub restricted_monotone: bool,
    pub invariant_monotone: bool,
}

fn best_of(res: &FeasibilityResult) -> f64 {
    res.witness
        .as_ref()
        .map(|w| w.normalized_max_eig)
        .unwrap_or_else(|| res.restarts.iter().map(|d| d.best_normalized).fold(f64::INFINITY, f64::min))
}

/// Feasibility of the SAG condition on a grid of rates, with the SAGA-style
/// block-diagonal P̃ and with the general permutation-invariant P̃.
pub fn sag_probe(
    assumption: IndividualAssumption,
    m: f64,
    l: f64,
    n: usize,
    alpha: f64,
    rho2_grid: &[f64],
    cfg: &SearchConfig,
) -> Result<SagProbe> {
    let spec = SearchSpec::new(Method::Sag, assumption, m, l, n, alpha);
    // ascending in ρ², so that witnesses at smaller rates warm-start larger ones
    let mut order: Vec<usize> = (0..rho2_grid.len()).collect();
    order.sort_by(|&a, &b| rho2_grid[a].partial_cmp(&rho2_grid[b]).expect("finite"));
    let (mut warm_r, mut warm_i) = (Vec::new(), Vec::new());
    let mut rows: Vec<Option<SagProbeRow>> = vec![None; rho2_grid.len()];
    for idx in order {
        let rho2 = rho2_grid[idx];
        let r = feasible_at_with_seeds(&spec.with_form(PForm::Diagonal), rho2, cfg, &warm_r)?;
        let i = feasible_at_with_seeds(&spec.with_form(PForm::Invariant), rho2, cfg, &warm_i)?;
        if let Some(w) = &r.witness {
            warm_r.insert(0, (w.p, w.lambdas));
        }
        if let Some(w) = &i.witness {
            warm_i.insert(0, (w.p, w.lambdas));
        }
        rows[idx] = Some(SagProbeRow {
            rho2,
            restricted_best: best_of(&r),
            restricted: r.witness,
            invariant_best: best_of(&i),
            invariant: i.witness,
        });
    }
    let rows: Vec<SagProbeRow> = rows.into_iter().map(|r| r.expect("every grid point probed")).collect();
    let monotone = |found: Vec<(f64, bool)>| -> bool {
        let mut sorted = found;
        sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite"));
        let mut failed = false;
        for (_, ok) in sorted {
            if failed && ok {
                return false;
            }
            failed |= !ok;
        }
        true
    };
    Ok(SagProbe {
        m,
        l,
        n,
        alpha,
        assumption,
        restricted_monotone: monotone(rows.iter().map(|r| (r.rho2, r.restricted.is_some())).collect()),
        invariant_monotone: monotone(rows.iter().map(|r| (r.rho2, r.invariant.is_some())).collect()),
        rows,
    })
}

/// One line of a sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: Method,
    pub assumption: IndividualAssumption,
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub n: usize,
    pub alpha: f64,
    pub rho2_best: Option<f64>,
    pub status: SearchStatus,
}

impl From<&SearchResult> for SweepRow {
    fn from(r: &SearchResult) -> Self {
        Self {
            method: r.method,
            assumption: r.assumption,
            m: r.m,
            l: r.l,
            n: r.n,
            alpha: r.alpha,
            rho2_best: r.rho2_best,
            status: r.status,
        }
    }
}
