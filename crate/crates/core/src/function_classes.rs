//! Assumption taxonomy on the objective and its components, and the sector
//! quadratic forms that the LMI multipliers stand for.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// What is assumed about each component f_i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndividualAssumption {
    /// f_i is m-strongly convex and L-smooth.
    #[serde(alias = "sc")]
    StronglyConvex,
    /// f_i is convex and L-smooth.
    #[serde(alias = "cvx")]
    ConvexSmooth,
    /// f_i is only L-smooth.
    #[serde(alias = "smooth")]
    SmoothOnly,
}

impl IndividualAssumption {
    pub const ALL: [IndividualAssumption; 3] =
        [Self::StronglyConvex, Self::ConvexSmooth, Self::SmoothOnly];

    pub fn short_name(self) -> &'static str {
        match self {
            Self::StronglyConvex => "sc",
            Self::ConvexSmooth => "cvx",
            Self::SmoothOnly => "smooth",
        }
    }

    /// Interval that every per-component curvature must lie in.
    pub fn curvature_bounds<T: Scalar>(self, m: T, l: T) -> (T, T) {
        match self {
            Self::StronglyConvex => (m, l),
            Self::ConvexSmooth => (T::zero(), l),
            Self::SmoothOnly => (-l, l),
        }
    }
}

impl fmt::Display for IndividualAssumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for IndividualAssumption {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sc" | "strongly-convex" => Ok(Self::StronglyConvex),
            "cvx" | "convex-smooth" => Ok(Self::ConvexSmooth),
            "smooth" | "smooth-only" => Ok(Self::SmoothOnly),
            other => Err(Error::InvalidParameter(format!("unknown assumption '{other}'"))),
        }
    }
}

/// Sector parameter γ for the individual components: −m, 0 or L.
pub fn gamma_of<T: Scalar>(a: IndividualAssumption, m: T, l: T) -> T {
    match a {
        IndividualAssumption::StronglyConvex => -m,
        IndividualAssumption::ConvexSmooth => T::zero(),
        IndividualAssumption::SmoothOnly => l,
    }
}

/// Sector constants (m, L, ν, γ): ν for the averaged gradient, γ for each component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionProfile<T> {
    pub m: T,
    pub l: T,
    pub nu: T,
    pub gamma: T,
}

impl<T: Scalar> AssumptionProfile<T> {
    /// Profile for SAGA, SAG and Finito: g ∈ S(m, L) so ν = −m.
    pub fn primal(a: IndividualAssumption, m: T, l: T) -> Result<Self> {
        check_constants(m, l)?;
        Ok(Self { m, l, nu: -m, gamma: gamma_of(a, m, l) })
    }

    /// Profile for SDCA: the averaged f is only convex (ν = 0) and m is the
    /// regularizer weight. Strongly convex components are treated as convex.
    pub fn sdca(a: IndividualAssumption, m: T, l: T) -> Result<Self> {
        check_constants(m, l)?;
        let gamma = match a {
            IndividualAssumption::SmoothOnly => l,
            _ => T::zero(),
        };
        Ok(Self { m, l, nu: T::zero(), gamma })
    }
}

fn check_constants<T: Scalar>(m: T, l: T) -> Result<()> {
    if !(m > T::zero()) || !(l > T::zero()) || !m.is_finite() || !l.is_finite() {
        return Err(Error::InvalidParameter("m > 0 and L > 0".into()));
    }
    if l < m {
        return Err(Error::InvalidParameter("L >= m".into()));
    }
    Ok(())
}

/// Value of [Δx; Δg]ᵀ [[2·c1·c2, c1 − c2], [c1 − c2, −2]] [Δx; Δg], summed over
/// coordinates. Per coordinate this is 2(c1·Δx − Δg)(Δg + c2·Δx), so it is
/// nonnegative whenever Δg lies between −c2·Δx and c1·Δx.
pub fn sector_quadratic<T: Scalar>(dx: &[T], dg: &[T], c1: T, c2: T) -> Result<T> {
    if dx.len() != dg.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", dx.len(), dg.len())));
    }
    let two = T::two();
    Ok(dx
        .iter()
        .zip(dg)
        .map(|(&x, &g)| two * c1 * c2 * x * x + two * (c1 - c2) * x * g - two * g * g)
        .sum())
}
