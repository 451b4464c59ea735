//! Jump-system realizations (Ã_i, B̃_i, C̃) of SAGA, SAG, Finito and SDCA,
//! their equilibria, and the matrix-form step used for validation.
//!
//! State layouts (per coordinate, before the ⊗I_p lift):
//! SAGA/SAG `[y_1..y_n, x]`, Finito `[y_1..y_n, x_1..x_n]`, SDCA `[y_1..y_n]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, SparseMat};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Saga,
    Sag,
    Finito,
    Sdca,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Saga, Method::Sag, Method::Finito, Method::Sdca];

    pub fn name(self) -> &'static str {
        match self {
            Method::Saga => "saga",
            Method::Sag => "sag",
            Method::Finito => "finito",
            Method::Sdca => "sdca",
        }
    }

    pub fn state_dim(self, n: usize) -> usize {
        match self {
            Method::Saga | Method::Sag => n + 1,
            Method::Finito => 2 * n,
            Method::Sdca => n,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "saga" => Ok(Method::Saga),
            "sag" => Ok(Method::Sag),
            "finito" => Ok(Method::Finito),
            "sdca" => Ok(Method::Sdca),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

/// Per-coordinate realization of one method. Matrices are produced on demand;
/// indices `i` are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpRealization<T> {
    pub method: Method,
    pub n: usize,
    pub alpha: T,
    pub m: Option<T>,
}

impl<T: Scalar> JumpRealization<T> {
    pub fn build(method: Method, n: usize, alpha: T, m: Option<T>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("n >= 2".into()));
        }
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha > 0".into()));
        }
        let m = match (method, m) {
            (Method::Sdca, None) => return Err(Error::MissingRegularizer),
            (Method::Sdca, Some(m)) if !(m > T::zero()) => return Err(Error::MissingRegularizer),
            (Method::Sdca, Some(m)) => Some(m),
            _ => None,
        };
        Ok(Self { method, n, alpha, m })
    }

    pub fn state_dim(&self) -> usize {
        self.method.state_dim(self.n)
    }

    /// α̃ = α·m·n for SDCA.
    pub fn alpha_tilde(&self) -> Option<T> {
        self.m.map(|m| self.alpha * m * T::of_usize(self.n))
    }

    fn check_index(&self, i: usize) {
        assert!(i >= 1 && i <= self.n, "index {i} outside 1..={}", self.n);
    }

    /// Ã_i − I, which has O(n) nonzeros.
    pub fn a_minus_identity(&self, i: usize) -> SparseMat<T> {
        self.check_index(i);
        let n = self.n;
        let k = i - 1;
        let nf = T::of_usize(n);
        let a = self.alpha;
        let dim = self.state_dim();
        let mut s = SparseMat::new(dim, dim);
        match self.method {
            Method::Saga => {
                s.push(k, k, -T::one());
                for j in 0..n {
                    let v = if j == k { a * (nf - T::one()) / nf } else { -a / nf };
                    s.push(n, j, v);
                }
            }
            Method::Sag => {
                s.push(k, k, -T::one());
                for j in 0..n {
                    if j != k {
                        s.push(n, j, -a / nf);
                    }
                }
            }
            Method::Finito => {
                s.push(k, k, -T::one());
                for j in 0..n {
                    s.push(n + k, j, -a);
                }
                for j in 0..n {
                    let v = if j == k { T::one() / nf - T::one() } else { T::one() / nf };
                    s.push(n + k, n + j, v);
                }
            }
            Method::Sdca => {
                let at = self.alpha_tilde().expect("SDCA carries m");
                s.push(k, k, -at);
            }
        }
        s
    }

    pub fn a_sparse(&self, i: usize) -> SparseMat<T> {
        let mut s = self.a_minus_identity(i);
        for d in 0..self.state_dim() {
            s.entries.push((d, d, T::one()));
        }
        s
    }

    pub fn a(&self, i: usize) -> Mat<T> {
        self.a_sparse(i).to_dense()
    }

    /// B̃_i: nonzeros only in column i.
    pub fn b_sparse(&self, i: usize) -> SparseMat<T> {
        self.check_index(i);
        let n = self.n;
        let k = i - 1;
        let mut s = SparseMat::new(self.state_dim(), n);
        match self.method {
            Method::Saga => {
                s.push(k, k, T::one());
                s.push(n, k, -self.alpha);
            }
            Method::Sag => {
                s.push(k, k, T::one());
                s.push(n, k, -self.alpha / T::of_usize(n));
            }
            Method::Finito => s.push(k, k, T::one()),
            Method::Sdca => s.push(k, k, -self.alpha_tilde().expect("SDCA carries m")),
        }
        s
    }

    pub fn b(&self, i: usize) -> Mat<T> {
        self.b_sparse(i).to_dense()
    }

    /// C̃ as a row.
    pub fn c(&self) -> Vec<T> {
        let n = self.n;
        let nf = T::of_usize(n);
        match self.method {
            Method::Saga | Method::Sag => {
                let mut c = vec![T::zero(); n + 1];
                c[n] = T::one();
                c
            }
            Method::Finito => {
                let mut c = vec![-self.alpha; 2 * n];
                for v in c.iter_mut().skip(n) {
                    *v = T::one() / nf;
                }
                c
            }
            Method::Sdca => vec![T::one() / (self.m.expect("SDCA carries m") * nf); n],
        }
    }

    /// v = (C̃ ⊗ I_p) ξ.
    pub fn output(&self, xi: &[T], p: usize) -> Vec<T> {
        let c = self.c();
        let mut v = vec![T::zero(); p];
        for (j, &cj) in c.iter().enumerate() {
            if cj != T::zero() {
                for k in 0..p {
                    v[k] = v[k] + cj * xi[j * p + k];
                }
            }
        }
        v
    }

    /// (Ã_i ⊗ I_p) ξ + (B̃_i ⊗ I_p) w for a given stacked gradient w.
    pub fn step_with_gradients(&self, i: usize, xi: &[T], w: &[T], p: usize) -> Vec<T> {
        let mut out = xi.to_vec();
        self.a_minus_identity(i).apply_kron_add(xi, p, &mut out);
        self.b_sparse(i).apply_kron_add(w, p, &mut out);
        out
    }

    /// One step of the jump system: v = Cξ, w = stacked ∇f_j(v), then
    /// (Ã_i⊗I)ξ + (B̃_i⊗I)w. Validation path only.
    pub fn step_exact<F: FiniteSum<T>>(&self, xi: &[T], problem: &F, i: usize) -> Vec<T> {
        let p = problem.dim();
        let w = stacked_gradients(problem, &self.output(xi, p));
        self.step_with_gradients(i, xi, &w, p)
    }
}

/// A finite sum of n components on R^p with per-component gradients.
pub trait FiniteSum<T: Scalar>: Sync {
    fn n(&self) -> usize;
    fn dim(&self) -> usize;
    /// ∇f_i(x) for 0-based `i`.
    fn grad_into(&self, i: usize, x: &[T], out: &mut [T]);
    /// Minimizer of (1/n)Σf_i(x) + (reg/2)‖x‖².
    fn stationary_point(&self, reg: T) -> Result<Vec<T>>;
}

/// [∇f_1(x); …; ∇f_n(x)].
pub fn stacked_gradients<T: Scalar, F: FiniteSum<T>>(problem: &F, x: &[T]) -> Vec<T> {
    let p = problem.dim();
    let mut w = vec![T::zero(); problem.n() * p];
    for (i, chunk) in w.chunks_mut(p).enumerate() {
        problem.grad_into(i, x, chunk);
    }
    w
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumData<T> {
    pub xstar: Vec<T>,
    pub wstar: Vec<T>,
    pub xistar: Vec<T>,
    pub vstar: Vec<T>,
}

pub fn equilibrium<T: Scalar, F: FiniteSum<T>>(
    r: &JumpRealization<T>,
    problem: &F,
) -> Result<EquilibriumData<T>> {
    if problem.n() != r.n {
        return Err(Error::DimensionMismatch(format!("problem n={} vs realization n={}", problem.n(), r.n)));
    }
    let reg = if r.method == Method::Sdca { r.m.expect("SDCA carries m") } else { T::zero() };
    let xstar = problem.stationary_point(reg)?;
    let wstar = stacked_gradients(problem, &xstar);
    let xistar = match r.method {
        Method::Saga | Method::Sag => [wstar.clone(), xstar.clone()].concat(),
        Method::Finito => {
            let mut v = wstar.clone();
            for _ in 0..r.n {
                v.extend_from_slice(&xstar);
            }
            v
        }
        Method::Sdca => wstar.iter().map(|&g| -g).collect(),
    };
    Ok(EquilibriumData { vstar: xstar.clone(), xstar, wstar, xistar })
}

/// Largest ∞-norm residual of ξ* = Ã_iξ* + B̃_iw* (over all i) and v* = C̃ξ*.
pub fn verify_fixed_point<T: Scalar>(r: &JumpRealization<T>, eq: &EquilibriumData<T>, p: usize) -> T {
    let mut worst = T::zero();
    for i in 1..=r.n {
        let next = r.step_with_gradients(i, &eq.xistar, &eq.wstar, p);
        for (a, b) in next.iter().zip(&eq.xistar) {
            worst = worst.max((*a - *b).abs());
        }
    }
    let v = r.output(&eq.xistar, p);
    for (a, b) in v.iter().zip(&eq.vstar) {
        worst = worst.max((*a - *b).abs());
    }
    worst
}
