//! Closed-form rate certificates: a rate, a structured Lyapunov matrix and a
//! multiplier pair that together satisfy the reduced LMI, checked before
//! being handed out.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_classes::{AssumptionProfile, IndividualAssumption};
use crate::jump_models::{JumpRealization, Method};
use crate::lmi::{
    finito_relaxed, finito_slice, full_lmi, structured_bundle, BundleReport, FinitoPdMode,
    MultiplierPair, Rate, StructuredP,
};
use crate::scalar::Scalar;

/// Relative NSD tolerance used when certificates are checked.
pub const VERIFY_TOL: f64 = 1e-8;

/// Verification tolerance for the scalar type: 1e-8, or a few hundred ulps
/// when the type is too coarse for that.
pub fn verify_tol<T: Scalar>() -> T {
    T::of(VERIFY_TOL).max(T::epsilon() * T::of(256.0))
}

/// Which closed-form point a certificate comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statement {
    /// SAGA, strongly convex f_i, p1 = 1/L.
    SagaScA,
    /// SAGA, strongly convex f_i, p1 = 2/(3L).
    SagaScB,
    /// SAGA, convex f_i, free b in [2Lα, 1].
    SagaCvx,
    /// SAGA, smooth f_i, free b in [2, 3m/(4αL²)].
    SagaSmooth,
    /// SAGA, smooth f_i, stepsize balancing both terms of the rate.
    SagaSmoothBalanced,
    /// SAGA, strongly convex, α = 1/(2(mn+L)), L ≥ 2m.
    SagaLargeN,
    /// SAGA, strongly convex, α = 1/(2(mn+L)), L < 2m.
    SagaLargeNClose,
    /// SAGA, convex, α = 1/(3(mn+L)), b = 2/3.
    SagaLargeNCvx,
    FinitoSc,
    FinitoCvx,
    FinitoSmooth,
    SdcaCvx,
    SdcaSmooth,
}

impl Statement {
    pub const ALL: [Statement; 13] = [
        Self::SagaScA,
        Self::SagaScB,
        Self::SagaCvx,
        Self::SagaSmooth,
        Self::SagaSmoothBalanced,
        Self::SagaLargeN,
        Self::SagaLargeNClose,
        Self::SagaLargeNCvx,
        Self::FinitoSc,
        Self::FinitoCvx,
        Self::FinitoSmooth,
        Self::SdcaCvx,
        Self::SdcaSmooth,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::SagaScA => "saga-sc-a",
            Self::SagaScB => "saga-sc-b",
            Self::SagaCvx => "saga-cvx",
            Self::SagaSmooth => "saga-smooth",
            Self::SagaSmoothBalanced => "saga-smooth-balanced",
            Self::SagaLargeN => "saga-large-n",
            Self::SagaLargeNClose => "saga-large-n-close",
            Self::SagaLargeNCvx => "saga-large-n-cvx",
            Self::FinitoSc => "finito-sc",
            Self::FinitoCvx => "finito-cvx",
            Self::FinitoSmooth => "finito-smooth",
            Self::SdcaCvx => "sdca-cvx",
            Self::SdcaSmooth => "sdca-smooth",
        }
    }

    pub fn method(self) -> Method {
        match self {
            Self::FinitoSc | Self::FinitoCvx | Self::FinitoSmooth => Method::Finito,
            Self::SdcaCvx | Self::SdcaSmooth => Method::Sdca,
            _ => Method::Saga,
        }
    }

    pub fn assumption(self) -> IndividualAssumption {
        use IndividualAssumption::*;
        match self {
            Self::SagaScA | Self::SagaScB | Self::SagaLargeN | Self::SagaLargeNClose | Self::FinitoSc => {
                StronglyConvex
            }
            Self::SagaCvx | Self::SagaLargeNCvx | Self::FinitoCvx | Self::SdcaCvx => ConvexSmooth,
            Self::SagaSmooth | Self::SagaSmoothBalanced | Self::FinitoSmooth | Self::SdcaSmooth => SmoothOnly,
        }
    }

    /// Statements whose stepsize is fixed by (m, L, n).
    pub fn fixes_alpha(self) -> bool {
        matches!(
            self,
            Self::SagaSmoothBalanced
                | Self::SagaLargeN
                | Self::SagaLargeNClose
                | Self::SagaLargeNCvx
                | Self::FinitoSc
                | Self::FinitoCvx
                | Self::FinitoSmooth
        )
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Statement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|st| st.tag() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown statement '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight<T> {
    pub name: String,
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCertificate<T> {
    pub method: Method,
    /// Class the certificate was requested for.
    pub assumption: IndividualAssumption,
    /// Class whose sector constraint the LMI uses; equal to `assumption` or weaker.
    pub sector: IndividualAssumption,
    pub m: T,
    #[serde(rename = "L")]
    pub l: T,
    pub n: usize,
    pub alpha: T,
    pub b: Option<T>,
    pub rho2: T,
    /// 1 − ρ², kept separately for precision near one.
    pub gap: T,
    #[serde(rename = "P_params")]
    pub p: StructuredP<T>,
    pub lambdas: MultiplierPair<T>,
    /// V expressed in the natural distances, normalized as in the bound.
    pub lyapunov_weights: Vec<Weight<T>>,
    pub provenance: Statement,
    /// Simplified closed-form bound that this certificate implies, if any.
    pub reference_bound: Option<T>,
    /// Other admissible points for the same inputs, as (provenance, ρ²).
    #[serde(default)]
    pub alternatives: Vec<(Statement, T)>,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
}

impl<T: Scalar> RateCertificate<T> {
    /// The certified rate. If `rho2` and `gap` disagree (for example after a
    /// hand edit) the `rho2` field wins.
    pub fn rate(&self) -> Rate<T> {
        let from_rho2 = T::one() - self.rho2;
        if (from_rho2 - self.gap).abs() <= T::of(4.0) * T::epsilon() {
            Rate::from_gap(self.gap)
        } else {
            Rate::from_rho2(self.rho2)
        }
    }

    pub fn profile(&self) -> Result<AssumptionProfile<T>> {
        profile_for(self.method, self.sector, self.m, self.l)
    }

    pub fn realization(&self) -> Result<JumpRealization<T>> {
        let m = (self.method == Method::Sdca).then_some(self.m);
        JumpRealization::build(self.method, self.n, self.alpha, m)
    }

    /// Iterations until ρ^{2k} ≤ ε.
    pub fn complexity(&self, eps: f64) -> Option<u64> {
        let gap = self.rate().gap().to_f64_lossy();
        if gap <= 0.0 || eps <= 0.0 || eps >= 1.0 {
            return None;
        }
        Some(((1.0 / eps).ln() / -(-gap).ln_1p()).ceil() as u64)
    }
}

pub fn profile_for<T: Scalar>(
    method: Method,
    a: IndividualAssumption,
    m: T,
    l: T,
) -> Result<AssumptionProfile<T>> {
    match method {
        Method::Sdca => AssumptionProfile::sdca(a, m, l),
        _ => AssumptionProfile::primal(a, m, l),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport<T> {
    pub feasible: bool,
    pub bundles: Vec<(String, BundleReport<T>)>,
    /// Largest scaled NSD eigenvalue over all bundles.
    pub max_violation: T,
    pub issues: Vec<String>,
}

/// Re-evaluates the reduced conditions at the certificate's point. For Finito
/// both the relaxed scalar conditions and the reduced 3×3 bundle must hold.
pub fn verify_certificate<T: Scalar>(c: &RateCertificate<T>) -> CertificateReport<T> {
    let tol = verify_tol::<T>();
    let mut report = CertificateReport {
        feasible: true,
        bundles: Vec::new(),
        max_violation: T::neg_infinity(),
        issues: Vec::new(),
    };
    let fail = |report: &mut CertificateReport<T>, msg: String| {
        report.feasible = false;
        report.issues.push(msg);
    };
    let (r, prof) = match (c.realization(), c.profile()) {
        (Ok(r), Ok(p)) => (r, p),
        (Err(e), _) | (_, Err(e)) => {
            fail(&mut report, e.to_string());
            return report;
        }
    };
    if !c.p.fits(c.method) {
        fail(&mut report, format!("P form does not fit {}", c.method));
        return report;
    }
    let rate = c.rate();
    if !rate.is_valid() {
        fail(&mut report, "rho2 outside [0, 1]".into());
    }
    let mut bundles = Vec::new();
    match structured_bundle(&r, &prof, rate, &c.p, &c.lambdas) {
        Ok(b) => bundles.push(b),
        Err(e) => fail(&mut report, e.to_string()),
    }
    if let (Method::Finito, StructuredP::Finito { p1, p4, .. }) = (c.method, c.p) {
        match finito_relaxed(&prof, c.n, c.alpha, p1, p4, &c.lambdas, rate) {
            Ok(b) => bundles.push(b),
            Err(e) => fail(&mut report, e.to_string()),
        }
    }
    for b in bundles {
        match b.evaluate() {
            Ok(rep) => {
                if !rep.feasible(tol) {
                    let why = if !rep.signs_ok {
                        "negative multiplier".to_string()
                    } else if rep.min_scaled_pd <= tol {
                        "Lyapunov matrix not positive definite".to_string()
                    } else {
                        format!("NSD violation {:e}", rep.max_scaled_nsd.to_f64_lossy())
                    };
                    fail(&mut report, format!("{}: {why}", b.label));
                }
                report.max_violation = report.max_violation.max(rep.max_scaled_nsd);
                report.bundles.push((b.label.clone(), rep));
            }
            Err(e) => fail(&mut report, e.to_string()),
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullReport<T> {
    pub feasible: bool,
    pub nsd_scaled_max_eig: T,
    pub pd_scaled_min_eig: T,
    pub signs_ok: bool,
}

/// Checks the certificate against the full, unreduced condition of
/// dimension state_dim + n.
pub fn verify_certificate_full<T: Scalar>(c: &RateCertificate<T>) -> Result<FullReport<T>> {
    let tol = verify_tol::<T>();
    let r = c.realization()?;
    let prof = c.profile()?;
    let pt = c.p.matrix(c.n);
    let full = full_lmi(&r, &prof, c.rate(), &pt, &c.lambdas)?;
    let scale = |x: T| if x > T::zero() { x } else { T::one() };
    let pscale = c.p.values().iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let nsd = full.max_eigenvalue()? / scale(pscale);
    let pd = pt.min_eigenvalue()? / scale(pt.frobenius_norm());
    let signs_ok = c.lambdas.lambda1 >= T::zero() && c.lambdas.lambda2 >= T::zero();
    Ok(FullReport {
        feasible: nsd <= tol && pd > T::zero() && signs_ok,
        nsd_scaled_max_eig: nsd,
        pd_scaled_min_eig: pd,
        signs_ok,
    })
}

struct Draft<T> {
    statement: Statement,
    alpha: T,
    b: Option<T>,
    gap: T,
    p: StructuredP<T>,
    lambdas: MultiplierPair<T>,
    reference_bound: Option<T>,
}

fn finish<T: Scalar>(d: Draft<T>, assumption: IndividualAssumption, m: T, l: T, n: usize) -> Result<RateCertificate<T>> {
    if !(d.gap > T::zero()) {
        return Err(Error::StepsizeOutOfRange("bound is trivial (rho2 >= 1) at these parameters".into()));
    }
    let method = d.statement.method();
    let nf = T::of_usize(n);
    let lyapunov_weights = match d.p {
        StructuredP::Diagonal { p1, p2 } => vec![w("x_dist2", T::one()), w("sum_y_dist2", p1 / p2)],
        StructuredP::Finito { p1, p4, .. } => {
            vec![w("sum_x_dist2", p4), w("sum_y_dist2", p1), w("v_dist2", T::one())]
        }
        StructuredP::Sdca { p1, p2 } => {
            let mn = m * nf;
            vec![w("x_dist2", T::one()), w("sum_y_dist2", p1 / (p2 * mn * mn))]
        }
        StructuredP::Invariant { .. } => Vec::new(),
    };
    let mut c = RateCertificate {
        method,
        assumption,
        sector: d.statement.assumption(),
        m,
        l,
        n,
        alpha: d.alpha,
        b: d.b,
        rho2: T::one() - d.gap,
        gap: d.gap,
        p: d.p,
        lambdas: d.lambdas,
        lyapunov_weights,
        provenance: d.statement,
        reference_bound: d.reference_bound,
        alternatives: Vec::new(),
        verified: false,
        manifest: None,
    };
    let rep = verify_certificate(&c);
    if !rep.feasible {
        return Err(Error::VerificationFailed(rep.max_violation.to_f64_lossy()));
    }
    c.verified = true;
    Ok(c)
}

fn w<T>(name: &str, weight: T) -> Weight<T> {
    Weight { name: name.to_string(), weight }
}

fn check_inputs<T: Scalar>(m: T, l: T, n: usize, alpha: T) -> Result<()> {
    profile_for(Method::Saga, IndividualAssumption::StronglyConvex, m, l)?;
    if n < 2 {
        return Err(Error::InvalidParameter("n >= 2".into()));
    }
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::StepsizeOutOfRange("alpha > 0".into()));
    }
    Ok(())
}

fn saga_sc_a<T: Scalar>(m: T, l: T, n: usize, a: T) -> Draft<T> {
    let (one, two, nf) = (T::one(), T::two(), T::of_usize(n));
    let gap = ((two * l * a - one) / ((l * a - one) * nf)).min(two * m * a - a * m * m / ((one - l * a) * l));
    Draft {
        statement: Statement::SagaScA,
        alpha: a,
        b: None,
        gap,
        p: StructuredP::Diagonal { p1: one / l, p2: one / a },
        lambdas: MultiplierPair::new(T::zero(), one / l),
        reference_bound: None,
    }
}

fn saga_sc_b<T: Scalar>(m: T, l: T, n: usize, a: T) -> Draft<T> {
    let (one, two, nf) = (T::one(), T::two(), T::of_usize(n));
    let (three, four, nine) = (T::of(3.0), T::of(4.0), T::of(9.0));
    let gap = ((nine * l * a - four) / ((three * l * a - four) * nf))
        .min(two * m * a - three * a * m * m / ((four - three * l * a) * l));
    Draft {
        statement: Statement::SagaScB,
        alpha: a,
        b: None,
        gap,
        p: StructuredP::Diagonal { p1: two / (three * l), p2: one / a },
        lambdas: MultiplierPair::new(T::zero(), one / l),
        reference_bound: None,
    }
}

fn saga_cvx<T: Scalar>(m: T, l: T, n: usize, a: T, b: T) -> Draft<T> {
    let (one, two, nf) = (T::one(), T::two(), T::of_usize(n));
    let gap = ((two * l * a - b) / ((l * a - b) * nf))
        .min(two * (one - b) * m * a - a * m * m * (one - b) * (one - b) / ((two - b - l * a) * l));
    Draft {
        statement: Statement::SagaCvx,
        alpha: a,
        b: Some(b),
        gap,
        p: StructuredP::Diagonal { p1: b / l, p2: one / a },
        lambdas: MultiplierPair::new((one - b) / l, b / l),
        reference_bound: None,
    }
}

fn saga_smooth<T: Scalar>(m: T, l: T, n: usize, a: T, b: T) -> Draft<T> {
    let (one, two, nf) = (T::one(), T::two(), T::of_usize(n));
    let gap = ((b - two) / ((b - one) * nf)).min(T::of(1.5) * m * a - two * b * l * l * a * a);
    Draft {
        statement: Statement::SagaSmooth,
        alpha: a,
        b: Some(b),
        gap,
        p: StructuredP::Diagonal { p1: b * a, p2: one / a },
        lambdas: MultiplierPair::new(one / l, b * a),
        reference_bound: None,
    }
}

fn saga_cvx_b_range<T: Scalar>(l: T, a: T, b: Option<T>) -> Result<T> {
    let lo = T::two() * l * a;
    let b = b.unwrap_or_else(|| lo.max(T::of(5.0 / 6.0)));
    if b < lo || b > T::one() {
        return Err(Error::BOutOfRange("2*L*alpha <= b <= 1".into()));
    }
    Ok(b)
}

fn saga_smooth_b_range<T: Scalar>(m: T, l: T, a: T, b: Option<T>) -> Result<T> {
    let hi = T::of(3.0) * m / (T::of(4.0) * a * l * l);
    let b = b.unwrap_or_else(|| T::of(3.0).min(hi));
    if b < T::two() || b > hi {
        return Err(Error::BOutOfRange("2 <= b <= 3m/(4*alpha*L^2)".into()));
    }
    Ok(b)
}

/// Certificate for one named statement. `alpha` and `b` are ignored by
/// statements that fix them.
pub fn statement_certificate<T: Scalar>(
    st: Statement,
    m: T,
    l: T,
    n: usize,
    alpha: Option<T>,
    b: Option<T>,
) -> Result<RateCertificate<T>> {
    let (one, two, nf) = (T::one(), T::two(), T::of_usize(n));
    let need_alpha = || -> Result<T> {
        let a = alpha.ok_or_else(|| Error::InvalidParameter(format!("{st} needs alpha")))?;
        check_inputs(m, l, n, a)?;
        Ok(a)
    };
    profile_for(st.method(), st.assumption(), m, l)?;
    let draft = match st {
        Statement::SagaScA => {
            let a = need_alpha()?;
            if a > one / (two * l) {
                return Err(Error::StepsizeOutOfRange("alpha <= 1/(2L)".into()));
            }
            saga_sc_a(m, l, n, a)
        }
        Statement::SagaScB => {
            let a = need_alpha()?;
            if a > T::of(4.0) / (T::of(9.0) * l) {
                return Err(Error::StepsizeOutOfRange("alpha <= 4/(9L)".into()));
            }
            saga_sc_b(m, l, n, a)
        }
        Statement::SagaCvx => {
            let a = need_alpha()?;
            if a > one / (two * l) {
                return Err(Error::StepsizeOutOfRange("alpha <= 1/(2L)".into()));
            }
            let b = saga_cvx_b_range(l, a, b)?;
            saga_cvx(m, l, n, a, b)
        }
        Statement::SagaSmooth => {
            let a = need_alpha()?;
            if a > T::of(3.0) * m / (T::of(8.0) * l * l) {
                return Err(Error::StepsizeOutOfRange("alpha <= 3m/(8L^2)".into()));
            }
            let b = saga_smooth_b_range(m, l, a, b)?;
            saga_smooth(m, l, n, a, b)
        }
        Statement::SagaSmoothBalanced => {
            let s = m * m * nf + l * l;
            let a = m / (T::of(4.0) * s);
            check_inputs(m, l, n, a)?;
            let mut d = saga_smooth(m, l, n, a, two * s / (l * l));
            d.statement = st;
            d.reference_bound = Some(one - m * m / (T::of(8.0) * s));
            d
        }
        Statement::SagaLargeN | Statement::SagaLargeNClose => {
            let mn = m * nf;
            let a = one / (two * (mn + l));
            check_inputs(m, l, n, a)?;
            let close = l < two * m;
            if close != (st == Statement::SagaLargeNClose) {
                let which = if close { "L >= 2m" } else { "L < 2m" };
                return Err(Error::InvalidParameter(format!("{st} requires {which}")));
            }
            let mut d = saga_sc_a(m, l, n, a);
            d.statement = st;
            if close {
                let (three, five, nine, fifteen) = (T::of(3.0), T::of(5.0), T::of(9.0), T::of(15.0));
                d.p = StructuredP::Diagonal { p1: T::of(0.75) / l, p2: one / a };
                d.gap = ((fifteen * mn - l) / (nf * (fifteen * mn + nine * l)))
                    .min(m / (mn + l) - two * m * m / ((three * l + five * mn) * l));
                d.reference_bound = Some(one - m / (two * (mn + l)));
            } else {
                d.reference_bound = Some(one - m / (mn + l) + m * m / ((l + two * mn) * l));
            }
            d
        }
        Statement::SagaLargeNCvx => {
            let a = one / (T::of(3.0) * (m * nf + l));
            check_inputs(m, l, n, a)?;
            let mut d = saga_cvx(m, l, n, a, two / T::of(3.0));
            d.statement = st;
            d.reference_bound = Some(one - m / (T::of(6.0) * (m * nf + l)));
            d
        }
        Statement::FinitoSc | Statement::FinitoCvx | Statement::FinitoSmooth => {
            let (thr, a, p1, p4, lam, gap, label) = match st {
                Statement::FinitoSc => {
                    let a = one / (T::of(5.0) * l);
                    let gap = (one / (two * nf)).min(m / (T::of(20.0) * l));
                    let thr = (T::of(50.0) * l / m).sqrt();
                    (thr, a, a / l, T::of(0.5) * m * a, MultiplierPair::new(T::zero(), a / l), gap, "n >= sqrt(50L/m)")
                }
                Statement::FinitoCvx => {
                    let a = one / (T::of(8.0) * l);
                    let gap = (one / (T::of(3.0) * nf)).min(T::of(5.0) * m / (T::of(176.0) * l));
                    let thr = (T::of(64.0) * l / m).sqrt();
                    let h = a / (two * l);
                    (thr, a, h, T::of(0.5) * m * a, MultiplierPair::new(h, h), gap, "n >= sqrt(64L/m)")
                }
                _ => {
                    let a = one / (two * nf * m);
                    let thr = T::of(48.0) * l * l / (m * m);
                    let p1 = T::of(4.0) * a * a;
                    (thr, a, p1, T::of(0.75) * m * a, MultiplierPair::new(a / l, p1), one / (T::of(3.0) * nf), "n >= 48L^2/m^2")
                }
            };
            check_inputs(m, l, n, a)?;
            if nf < thr {
                return Err(Error::BigDataConditionViolated(label.into()));
            }
            Draft { statement: st, alpha: a, b: None, gap, p: finito_slice(n, a, p1, p4), lambdas: lam, reference_bound: None }
        }
        Statement::SdcaCvx | Statement::SdcaSmooth => {
            let a = need_alpha()?;
            let mn = m * nf;
            let (limit, label) = if st == Statement::SdcaCvx {
                (two / (l + two * mn), "alpha <= 2/(L+2mn)")
            } else {
                (m / (l * l + m * mn), "alpha <= m/(L^2+m^2 n)")
            };
            if a > limit {
                return Err(Error::StepsizeOutOfRange(label.into()));
            }
            let at = a * mn;
            if at >= one {
                return Err(Error::StepsizeOutOfRange("alpha*m*n < 1".into()));
            }
            let p = StructuredP::Sdca { p1: one / at, p2: (one - at) / (at * at) };
            let k = (one - at) * mn / (at * l);
            let lambdas = if st == Statement::SdcaCvx {
                MultiplierPair::new(T::zero(), k)
            } else {
                MultiplierPair::new(k, T::of(0.5))
            };
            Draft { statement: st, alpha: a, b: None, gap: m * a, p, lambdas, reference_bound: None }
        }
    };
    finish(draft, st.assumption(), m, l, n)
}

/// SAGA certificate for the given assumption. Points stated for weaker
/// assumptions remain valid, so every admissible point for this class or a
/// weaker one is tried and the smallest rate is kept. `b` applies to the
/// point of the requested class.
pub fn saga_certificate<T: Scalar>(
    assumption: IndividualAssumption,
    m: T,
    l: T,
    n: usize,
    alpha: T,
    b: Option<T>,
) -> Result<RateCertificate<T>> {
    check_inputs(m, l, n, alpha)?;
    use IndividualAssumption::*;
    let own: &[Statement] = match assumption {
        StronglyConvex => &[Statement::SagaScA, Statement::SagaScB],
        ConvexSmooth => &[Statement::SagaCvx],
        SmoothOnly => &[Statement::SagaSmooth],
    };
    let weaker: &[Statement] = match assumption {
        StronglyConvex => &[Statement::SagaCvx, Statement::SagaSmooth],
        ConvexSmooth => &[Statement::SagaSmooth],
        SmoothOnly => &[],
    };
    let mut first_err = None;
    let mut found = Vec::new();
    for (&st, b) in own.iter().map(|s| (s, b)).chain(weaker.iter().map(|s| (s, None))) {
        match statement_certificate(st, m, l, n, Some(alpha), b) {
            Ok(mut c) => {
                c.assumption = assumption;
                found.push(c);
            }
            Err(e) => {
                if first_err.is_none() && own.contains(&st) {
                    first_err = Some(e);
                }
            }
        }
    }
    if found.is_empty() {
        return Err(first_err.expect("at least one own statement"));
    }
    found.sort_by(|x, y| y.gap.partial_cmp(&x.gap).expect("finite gaps"));
    let mut best = found.remove(0);
    best.alternatives = found.iter().map(|c| (c.provenance, c.rho2)).collect();
    Ok(best)
}

/// SAGA with the stepsize tied to mn + L.
pub fn saga_remark1_certificate<T: Scalar>(
    assumption: IndividualAssumption,
    m: T,
    l: T,
    n: usize,
) -> Result<RateCertificate<T>> {
    match assumption {
        IndividualAssumption::StronglyConvex => {
            let st = if l < T::two() * m { Statement::SagaLargeNClose } else { Statement::SagaLargeN };
            statement_certificate(st, m, l, n, None, None)
        }
        IndividualAssumption::ConvexSmooth => statement_certificate(Statement::SagaLargeNCvx, m, l, n, None, None),
        IndividualAssumption::SmoothOnly => {
            Err(Error::Unsupported("no mn+L stepsize certificate for smooth-only components".into()))
        }
    }
}

/// SAGA without component convexity at α = m/(4(m²n+L²)).
pub fn saga_smooth_balanced<T: Scalar>(m: T, l: T, n: usize) -> Result<RateCertificate<T>> {
    statement_certificate(Statement::SagaSmoothBalanced, m, l, n, None, None)
}

pub fn finito_certificate<T: Scalar>(
    assumption: IndividualAssumption,
    m: T,
    l: T,
    n: usize,
) -> Result<RateCertificate<T>> {
    let st = match assumption {
        IndividualAssumption::StronglyConvex => Statement::FinitoSc,
        IndividualAssumption::ConvexSmooth => Statement::FinitoCvx,
        IndividualAssumption::SmoothOnly => Statement::FinitoSmooth,
    };
    statement_certificate(st, m, l, n, None, None)
}

pub fn sdca_certificate<T: Scalar>(
    assumption: IndividualAssumption,
    m: T,
    l: T,
    n: usize,
    alpha: T,
) -> Result<RateCertificate<T>> {
    let st = match assumption {
        IndividualAssumption::StronglyConvex => {
            return Err(Error::Unsupported(
                "SDCA certificates are stated for convex or smooth components".into(),
            ))
        }
        IndividualAssumption::ConvexSmooth => Statement::SdcaCvx,
        IndividualAssumption::SmoothOnly => Statement::SdcaSmooth,
    };
    statement_certificate(st, m, l, n, Some(alpha), None)
}

/// Closed-form (P̃, λ) points evaluated at an arbitrary stepsize, for use as
/// starting points of a numerical search. No range checks; nothing here is
/// claimed to be feasible.
pub fn seed_points<T: Scalar>(
    method: Method,
    m: T,
    l: T,
    n: usize,
    alpha: T,
) -> Vec<(StructuredP<T>, MultiplierPair<T>)> {
    let (one, two, nf) = (T::one(), T::two(), T::of_usize(n));
    let a = alpha;
    match method {
        Method::Saga | Method::Sag => {
            let mut v = vec![
                (StructuredP::Diagonal { p1: one / l, p2: one / a }, MultiplierPair::new(T::zero(), one / l)),
                (StructuredP::Diagonal { p1: two / (T::of(3.0) * l), p2: one / a }, MultiplierPair::new(T::zero(), one / l)),
                (StructuredP::Diagonal { p1: T::of(0.75) / l, p2: one / a }, MultiplierPair::new(T::zero(), one / l)),
            ];
            for b in [T::of(5.0 / 6.0), T::of(2.0 / 3.0), (two * l * a).min(one)] {
                v.push((StructuredP::Diagonal { p1: b / l, p2: one / a }, MultiplierPair::new((one - b) / l, b / l)));
            }
            let b_hi = T::of(3.0) * m / (T::of(4.0) * a * l * l);
            for b in [T::of(3.0).min(b_hi), two, b_hi] {
                v.push((StructuredP::Diagonal { p1: b * a, p2: one / a }, MultiplierPair::new(one / l, b * a)));
            }
            v
        }
        Method::Finito => vec![
            (finito_slice(n, a, a / l, T::of(0.5) * m * a), MultiplierPair::new(T::zero(), a / l)),
            (finito_slice(n, a, a / (two * l), T::of(0.5) * m * a), MultiplierPair::new(a / (two * l), a / (two * l))),
            (finito_slice(n, a, T::of(4.0) * a * a, T::of(0.75) * m * a), MultiplierPair::new(a / l, T::of(4.0) * a * a)),
        ],
        Method::Sdca => {
            let mn = m * nf;
            let at = a * mn;
            let p = StructuredP::Sdca { p1: one / at, p2: (one - at) / (at * at) };
            let k = (one - at) * mn / (at * l);
            vec![(p, MultiplierPair::new(T::zero(), k)), (p, MultiplierPair::new(k, T::of(0.5)))]
        }
    }
}

/// Every closed-form certificate that accepts these inputs, for the given
/// method and assumption; statements with a fixed stepsize are included only
/// when that stepsize equals `alpha`.
pub fn applicable_certificates<T: Scalar>(
    method: Method,
    assumption: IndividualAssumption,
    m: T,
    l: T,
    n: usize,
    alpha: T,
) -> Vec<RateCertificate<T>> {
    Statement::ALL
        .iter()
        .filter(|st| st.method() == method && st.assumption() == assumption)
        .filter_map(|&st| statement_certificate(st, m, l, n, Some(alpha), None).ok())
        .filter(|c| !c.provenance.fixes_alpha() || (c.alpha - alpha).abs() <= T::of(1e-12) * alpha)
        .collect()
}

/// The Finito PD check with the (2,2) entry as printed, for comparison.
pub fn finito_pd_as_printed<T: Scalar>(c: &RateCertificate<T>) -> Option<bool> {
    let blocks = c.p.pd_blocks(c.n, FinitoPdMode::AsPrinted);
    blocks.iter().map(|b| b.is_pd(T::zero()).ok()).collect::<Option<Vec<_>>>().map(|v| v.into_iter().all(|x| x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use IndividualAssumption::*;

    #[test]
    fn saga_showcase_value() {
        let c = saga_certificate(StronglyConvex, 0.1, 1.0, 100, 1.0 / 3.0, None).unwrap();
        assert!((c.rho2 - 0.995f64).abs() < 1e-15);
        assert_eq!(c.provenance, Statement::SagaScA);
        assert!(c.alternatives.iter().any(|(st, _)| *st == Statement::SagaScB));
    }

    #[test]
    fn statement_tags_roundtrip() {
        for st in Statement::ALL {
            assert_eq!(st.tag().parse::<Statement>().unwrap(), st);
        }
    }

    #[test]
    fn sdca_rejects_large_stepsize() {
        assert!(matches!(
            sdca_certificate(ConvexSmooth, 0.1, 1.0, 50, 0.5),
            Err(Error::StepsizeOutOfRange(_))
        ));
    }

    #[test]
    fn complexity_estimate() {
        let c = saga_certificate(StronglyConvex, 0.1, 1.0, 100, 1.0 / 3.0, None).unwrap();
        let k = c.complexity(1e-6).unwrap();
        assert_eq!(k, ((1e6f64).ln() / -(0.995f64).ln()).ceil() as u64);
    }
}
