//! LMI assembly: the full condition for a jump realization, the structured
//! Lyapunov matrices, the reduced small-matrix bundles, the block reduction for
//! μI + q·eeᵀ structured matrices, and the relaxed scalar conditions for Finito.
//!
//! Every expression that contains ρ² is written in terms of the gap
//! δ = 1 − ρ² so that rates very close to one keep full relative precision.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::function_classes::AssumptionProfile;
use crate::jump_models::{JumpRealization, Method};
use crate::linalg::SymMatrix;
use crate::scalar::Scalar;

/// A contraction factor ρ², stored as its gap δ = 1 − ρ².
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Rate<T> {
    gap: T,
}

impl<T: Scalar> Rate<T> {
    pub fn from_rho2(rho2: T) -> Self {
        Self { gap: T::one() - rho2 }
    }

    pub fn from_gap(gap: T) -> Self {
        Self { gap }
    }

    pub fn rho2(self) -> T {
        T::one() - self.gap
    }

    pub fn gap(self) -> T {
        self.gap
    }

    pub fn is_valid(self) -> bool {
        self.gap >= T::zero() && self.gap <= T::one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierPair<T> {
    pub lambda1: T,
    pub lambda2: T,
}

impl<T: Scalar> MultiplierPair<T> {
    pub fn new(lambda1: T, lambda2: T) -> Self {
        Self { lambda1, lambda2 }
    }

    pub fn scaled(self, c: T) -> Self {
        Self { lambda1: self.lambda1 * c, lambda2: self.lambda2 * c }
    }
}

/// Which (2,2) entry to use in the Finito positivity block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FinitoPdMode {
    /// p4 + n·p5, consistent with the rank-one structure of P̃.
    #[default]
    Corrected,
    /// p4 + n·p4, the printed variant of the corner entry.
    AsPrinted,
}

/// Permutation-invariant Lyapunov matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum StructuredP<T> {
    /// diag(p1·I_n, p2) on [y; x].
    Diagonal { p1: T, p2: T },
    /// [[p1·I + p2·eeᵀ, p3·e], [p3·eᵀ, p4]] on [y; x].
    Invariant { p1: T, p2: T, p3: T, p4: T },
    /// [[p1·I + p2·eeᵀ, p3·eeᵀ], [p3·eeᵀ, p4·I + p5·eeᵀ]] on [y; x_1..x_n].
    Finito { p1: T, p2: T, p3: T, p4: T, p5: T },
    /// p1·I + p2·eeᵀ on y.
    Sdca { p1: T, p2: T },
}

impl<T: Scalar> StructuredP<T> {
    pub fn values(&self) -> Vec<T> {
        match *self {
            Self::Diagonal { p1, p2 } | Self::Sdca { p1, p2 } => vec![p1, p2],
            Self::Invariant { p1, p2, p3, p4 } => vec![p1, p2, p3, p4],
            Self::Finito { p1, p2, p3, p4, p5 } => vec![p1, p2, p3, p4, p5],
        }
    }

    pub fn named_values(&self) -> Vec<(String, T)> {
        self.values().into_iter().enumerate().map(|(k, v)| (format!("p{}", k + 1), v)).collect()
    }

    pub fn scaled(&self, c: T) -> Self {
        match *self {
            Self::Diagonal { p1, p2 } => Self::Diagonal { p1: p1 * c, p2: p2 * c },
            Self::Sdca { p1, p2 } => Self::Sdca { p1: p1 * c, p2: p2 * c },
            Self::Invariant { p1, p2, p3, p4 } => {
                Self::Invariant { p1: p1 * c, p2: p2 * c, p3: p3 * c, p4: p4 * c }
            }
            Self::Finito { p1, p2, p3, p4, p5 } => {
                Self::Finito { p1: p1 * c, p2: p2 * c, p3: p3 * c, p4: p4 * c, p5: p5 * c }
            }
        }
    }

    /// Methods this form can be paired with.
    pub fn fits(&self, method: Method) -> bool {
        matches!(
            (self, method),
            (Self::Diagonal { .. }, Method::Saga | Method::Sag)
                | (Self::Invariant { .. }, Method::Saga | Method::Sag)
                | (Self::Finito { .. }, Method::Finito)
                | (Self::Sdca { .. }, Method::Sdca)
        )
    }

    /// The full state_dim × state_dim matrix P̃.
    pub fn matrix(&self, n: usize) -> SymMatrix<T> {
        match *self {
            Self::Diagonal { p1, p2 } => SymMatrix::from_fn(n + 1, |i, j| match (i == j, i < n) {
                (true, true) => p1,
                (true, false) => p2,
                _ => T::zero(),
            }),
            Self::Invariant { p1, p2, p3, p4 } => SymMatrix::from_fn(n + 1, |i, j| {
                match (i < n, j < n) {
                    (true, true) => p2 + if i == j { p1 } else { T::zero() },
                    (false, false) => p4,
                    _ => p3,
                }
            }),
            Self::Finito { p1, p2, p3, p4, p5 } => SymMatrix::from_fn(2 * n, |i, j| {
                let diag = i == j;
                match (i < n, j < n) {
                    (true, true) => p2 + if diag { p1 } else { T::zero() },
                    (false, false) => p5 + if diag { p4 } else { T::zero() },
                    _ => p3,
                }
            }),
            Self::Sdca { p1, p2 } => {
                SymMatrix::from_fn(n, |i, j| p2 + if i == j { p1 } else { T::zero() })
            }
        }
    }

    /// Small matrices whose positive definiteness is equivalent to P̃ ≻ 0.
    pub fn pd_blocks(&self, n: usize, mode: FinitoPdMode) -> Vec<SymMatrix<T>> {
        let nf = T::of_usize(n);
        let one = |x: T| SymMatrix::diagonal(&[x]);
        match *self {
            Self::Diagonal { p1, p2 } => vec![one(p1), one(p2)],
            Self::Sdca { p1, p2 } => vec![one(p1), one(p1 + nf * p2)],
            Self::Invariant { p1, p2, p3, p4 } => {
                let s = nf.sqrt() * p3;
                vec![one(p1), sym2(p1 + nf * p2, s, p4)]
            }
            Self::Finito { p1, p2, p3, p4, p5 } => {
                let corner = match mode {
                    FinitoPdMode::Corrected => p4 + nf * p5,
                    FinitoPdMode::AsPrinted => p4 + nf * p4,
                };
                vec![one(p1), one(p4), sym2(p1 + nf * p2, nf * p3, corner)]
            }
        }
    }

    /// (Δξ)ᵀ(P̃ ⊗ I_p)(Δξ) in O(state_dim·p), using the structure of P̃.
    pub fn quadratic_form(&self, n: usize, p: usize, d: &[T]) -> T {
        let block_sum = |start: usize| -> Vec<T> {
            let mut s = vec![T::zero(); p];
            for i in 0..n {
                for k in 0..p {
                    s[k] = s[k] + d[(start + i) * p + k];
                }
            }
            s
        };
        let sq = |range: std::ops::Range<usize>| -> T {
            d[range.start * p..range.end * p].iter().map(|&x| x * x).sum()
        };
        let dot = |a: &[T], b: &[T]| -> T { a.iter().zip(b).map(|(&x, &y)| x * y).sum() };
        let two = T::two();
        match *self {
            Self::Diagonal { p1, p2 } => p1 * sq(0..n) + p2 * sq(n..n + 1),
            Self::Invariant { p1, p2, p3, p4 } => {
                let sy = block_sum(0);
                let x = &d[n * p..(n + 1) * p];
                p1 * sq(0..n) + p2 * dot(&sy, &sy) + two * p3 * dot(&sy, x) + p4 * dot(x, x)
            }
            Self::Finito { p1, p2, p3, p4, p5 } => {
                let sy = block_sum(0);
                let sx = block_sum(n);
                p1 * sq(0..n)
                    + p2 * dot(&sy, &sy)
                    + two * p3 * dot(&sy, &sx)
                    + p4 * sq(n..2 * n)
                    + p5 * dot(&sx, &sx)
            }
            Self::Sdca { p1, p2 } => {
                let sy = block_sum(0);
                p1 * sq(0..n) + p2 * dot(&sy, &sy)
            }
        }
    }
}

fn sym2<T: Scalar>(a: T, b: T, c: T) -> SymMatrix<T> {
    SymMatrix::from_rows(&[vec![a, b], vec![b, c]]).expect("2x2")
}

fn sym3<T: Scalar>(r: [[T; 3]; 3]) -> SymMatrix<T> {
    SymMatrix::from_rows(&r.iter().map(|row| row.to_vec()).collect::<Vec<_>>()).expect("3x3")
}

/// A set of matrices that must all be negative semidefinite, matrices that
/// must be positive definite, and scalars that must be nonnegative.
///
/// NSD verdicts divide each block's largest eigenvalue by the size of the
/// Lyapunov parameters, max |p_k|, which fixes the homogeneous scale of
/// (P̃, λ) without letting large multipliers shrink the verdict. Bundles
/// without parameters fall back to the largest block norm. PD verdicts divide
/// each block's smallest eigenvalue by that block's own norm.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiBundle<T> {
    pub label: String,
    pub nsd_blocks: Vec<SymMatrix<T>>,
    /// max |p_k| of the Lyapunov parameters, when known.
    pub variable_scale: Option<T>,
    pub pd_blocks: Vec<SymMatrix<T>>,
    pub nonnegative: Vec<(String, T)>,
    pub params: Vec<(String, T)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundleReport<T> {
    pub nsd_max_eigs: Vec<T>,
    pub nsd_scale: T,
    pub pd_min_eigs: Vec<T>,
    pub pd_scaled_min_eigs: Vec<T>,
    /// Largest NSD eigenvalue divided by the scale (≤ 0 when feasible).
    pub max_scaled_nsd: T,
    /// Smallest scaled PD eigenvalue (> 0 when feasible).
    pub min_scaled_pd: T,
    pub signs_ok: bool,
}

impl<T: Scalar> BundleReport<T> {
    pub fn feasible(&self, tol: T) -> bool {
        self.signs_ok && self.max_scaled_nsd <= tol && self.min_scaled_pd > tol
    }

    /// Single number that is ≤ tol iff the NSD part holds and that also
    /// penalizes PD blocks that approach singularity.
    pub fn violation(&self, tol: T) -> T {
        let pd = tol - self.min_scaled_pd;
        let sign = if self.signs_ok { T::neg_infinity() } else { T::one() };
        self.max_scaled_nsd.max(pd).max(sign)
    }
}

impl<T: Scalar> LmiBundle<T> {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            nsd_blocks: Vec::new(),
            variable_scale: None,
            pd_blocks: Vec::new(),
            nonnegative: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn push_nsd(&mut self, block: SymMatrix<T>) {
        self.nsd_blocks.push(block);
    }

    pub fn push_pd(&mut self, block: SymMatrix<T>) {
        self.pd_blocks.push(block);
    }

    pub fn push_nonnegative(&mut self, name: &str, value: T) {
        self.nonnegative.push((name.to_string(), value));
    }

    pub fn push_param(&mut self, name: &str, value: T) {
        self.params.push((name.to_string(), value));
    }

    pub fn nsd_scale(&self) -> T {
        let s = self
            .variable_scale
            .unwrap_or_else(|| self.nsd_blocks.iter().fold(T::zero(), |a, b| a.max(b.frobenius_norm())));
        if s > T::zero() && s.is_finite() {
            s
        } else {
            T::one()
        }
    }

    pub fn evaluate(&self) -> Result<BundleReport<T>> {
        let scale = self.nsd_scale();
        let nsd_max_eigs =
            self.nsd_blocks.iter().map(|b| b.max_eigenvalue()).collect::<Result<Vec<_>>>()?;
        let pd_min_eigs =
            self.pd_blocks.iter().map(|b| b.min_eigenvalue()).collect::<Result<Vec<_>>>()?;
        let pd_scaled_min_eigs: Vec<T> = self
            .pd_blocks
            .iter()
            .zip(&pd_min_eigs)
            .map(|(b, &e)| {
                let s = b.frobenius_norm();
                if s > T::zero() {
                    e / s
                } else {
                    T::zero()
                }
            })
            .collect();
        let max_scaled_nsd =
            nsd_max_eigs.iter().map(|&e| e / scale).fold(T::neg_infinity(), T::max);
        let min_scaled_pd = pd_scaled_min_eigs.iter().copied().fold(T::infinity(), T::min);
        let signs_ok = self.nonnegative.iter().all(|(_, v)| *v >= T::zero());
        Ok(BundleReport {
            nsd_max_eigs,
            nsd_scale: scale,
            pd_min_eigs,
            pd_scaled_min_eigs,
            max_scaled_nsd,
            min_scaled_pd,
            signs_ok,
        })
    }

    pub fn is_feasible(&self, tol: T) -> Result<bool> {
        Ok(self.evaluate()?.feasible(tol))
    }

    /// {label, nsd_blocks, pd_blocks, params}; blocks as row-major arrays.
    pub fn to_json(&self) -> Value {
        let blocks = |v: &[SymMatrix<T>]| -> Vec<Vec<f64>> {
            v.iter().map(|b| b.as_slice().iter().map(|x| x.to_f64_lossy()).collect()).collect()
        };
        let mut params = serde_json::Map::new();
        for (k, v) in self.params.iter().chain(&self.nonnegative) {
            params.insert(k.clone(), json!(v.to_f64_lossy()));
        }
        json!({
            "label": self.label,
            "nsd_blocks": blocks(&self.nsd_blocks),
            "pd_blocks": blocks(&self.pd_blocks),
            "params": params,
        })
    }
}

/// Full condition for an arbitrary P̃, by summation over the n jump modes:
/// the expectation block minus ρ²·diag(P̃, 0) plus the multiplier term built
/// from the sector vectors D̃ψ1 = [L, ν, L, γ, …], D̃ψ2 = [−e/n, e/n, −e_1, e_1, …].
/// Variables are ordered [ξ; w].
pub fn full_lmi<T: Scalar>(
    r: &JumpRealization<T>,
    profile: &AssumptionProfile<T>,
    rate: Rate<T>,
    pt: &SymMatrix<T>,
    mult: &MultiplierPair<T>,
) -> Result<SymMatrix<T>> {
    let dim = r.state_dim();
    if pt.dim() != dim {
        return Err(Error::DimensionMismatch(format!("P has dim {} but state has {dim}", pt.dim())));
    }
    let n = r.n;
    let big = dim + n;
    let mut acc = vec![T::zero(); big * big];

    // avg over i of GᵢᵀP̃Gᵢ − ρ²·diag(P̃,0) with Gᵢ = [I, 0] + Dᵢ and Dᵢ = [Ãᵢ − I, B̃ᵢ]
    // equals diag(δP̃, 0) + avg(JᵀP̃Dᵢ + DᵢᵀP̃J + DᵢᵀP̃Dᵢ).
    for i in 1..=n {
        let mut d = r.a_minus_identity(i).entries;
        d.extend(r.b_sparse(i).entries.into_iter().map(|(a, b, v)| (a, dim + b, v)));
        let mut cols: Vec<usize> = d.iter().map(|e| e.1).collect();
        cols.sort_unstable();
        cols.dedup();
        // x[c][row] = (P̃ Dᵢ)[row, cols[c]]
        let mut x = vec![vec![T::zero(); dim]; cols.len()];
        for &(row_d, col, v) in &d {
            let c = cols.binary_search(&col).expect("column listed");
            for (row, xr) in x[c].iter_mut().enumerate() {
                *xr = *xr + pt.get(row, row_d) * v;
            }
        }
        for (c, &col) in cols.iter().enumerate() {
            for row in 0..dim {
                let v = x[c][row];
                acc[row * big + col] = acc[row * big + col] + v;
                acc[col * big + row] = acc[col * big + row] + v;
            }
        }
        for &(row_d, col1, v) in &d {
            for (c2, &col2) in cols.iter().enumerate() {
                acc[col1 * big + col2] = acc[col1 * big + col2] + v * x[c2][row_d];
            }
        }
    }
    let inv_n = T::one() / T::of_usize(n);
    for a in acc.iter_mut() {
        *a = *a * inv_n;
    }
    for i in 0..dim {
        for j in 0..dim {
            acc[i * big + j] = acc[i * big + j] + rate.gap() * pt.get(i, j);
        }
    }

    // Multiplier term Gᵀ W G with rows g_{2k}, g_{2k+1} paired by [[0,1],[1,0]].
    let c = r.c();
    let nf = T::of_usize(n);
    let psi1: Vec<T> = {
        let mut v = vec![profile.l, profile.nu];
        for _ in 0..n {
            v.push(profile.l);
            v.push(profile.gamma);
        }
        v
    };
    let row = |k: usize| -> Vec<T> {
        let mut g = vec![T::zero(); big];
        for (j, &cj) in c.iter().enumerate() {
            g[j] = psi1[k] * cj;
        }
        let sign = if k.is_multiple_of(2) { -T::one() } else { T::one() };
        if k < 2 {
            for j in 0..n {
                g[dim + j] = sign / nf;
            }
        } else {
            g[dim + (k - 2) / 2] = sign;
        }
        g
    };
    for pair in 0..=n {
        let weight = if pair == 0 { mult.lambda1 } else { mult.lambda2 / nf };
        if weight == T::zero() {
            continue;
        }
        let g0 = row(2 * pair);
        let g1 = row(2 * pair + 1);
        for i in 0..big {
            if g0[i] == T::zero() && g1[i] == T::zero() {
                continue;
            }
            for j in 0..big {
                acc[i * big + j] = acc[i * big + j] + weight * (g0[i] * g1[j] + g1[i] * g0[j]);
            }
        }
    }
    Ok(SymMatrix::from_fn(big, |i, j| acc[i * big + j]))
}

/// Kind of a diagonal block in a permutation-invariant matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// n-dimensional block of the form μI + q·eeᵀ.
    Vector,
    /// One row and column.
    Scalar,
}

/// Matrix made of μI + q·eeᵀ blocks. For two vector blocks the block is
/// mu·I + q·eeᵀ; between a vector and a scalar block it is q·e; a scalar
/// diagonal entry is stored in mu.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockStructure<T> {
    pub kinds: Vec<BlockKind>,
    pub mu: Vec<Vec<T>>,
    pub q: Vec<Vec<T>>,
}

impl<T: Scalar> BlockStructure<T> {
    pub fn zeros(kinds: Vec<BlockKind>) -> Self {
        let k = kinds.len();
        Self { kinds, mu: vec![vec![T::zero(); k]; k], q: vec![vec![T::zero(); k]; k] }
    }

    pub fn add_mu(&mut self, a: usize, b: usize, v: T) {
        self.mu[a][b] = self.mu[a][b] + v;
        if a != b {
            self.mu[b][a] = self.mu[b][a] + v;
        }
    }

    pub fn add_q(&mut self, a: usize, b: usize, v: T) {
        self.q[a][b] = self.q[a][b] + v;
        if a != b {
            self.q[b][a] = self.q[b][a] + v;
        }
    }

    fn offsets(&self, n: usize) -> (Vec<usize>, usize) {
        let mut off = Vec::with_capacity(self.kinds.len());
        let mut total = 0;
        for k in &self.kinds {
            off.push(total);
            total += match k {
                BlockKind::Vector => n,
                BlockKind::Scalar => 1,
            };
        }
        (off, total)
    }

    fn locate(&self, offsets: &[usize], n: usize, idx: usize) -> (usize, usize) {
        let b = offsets.iter().rposition(|&o| o <= idx).expect("index inside");
        let _ = n;
        (b, idx - offsets[b])
    }

    /// The full matrix.
    pub fn expand(&self, n: usize) -> SymMatrix<T> {
        let (off, total) = self.offsets(n);
        SymMatrix::from_fn(total, |i, j| {
            let (a, ia) = self.locate(&off, n, i);
            let (b, jb) = self.locate(&off, n, j);
            match (self.kinds[a], self.kinds[b]) {
                (BlockKind::Vector, BlockKind::Vector) => {
                    self.q[a][b] + if ia == jb { self.mu[a][b] } else { T::zero() }
                }
                (BlockKind::Scalar, BlockKind::Scalar) => self.mu[a][b],
                _ => self.q[a][b],
            }
        })
    }

    /// Reads μ and q off a full matrix with this block layout, and returns the
    /// largest deviation between the matrix and the re-expanded structure.
    pub fn extract(full: &SymMatrix<T>, kinds: Vec<BlockKind>, n: usize) -> Result<(Self, T)> {
        if n < 2 {
            return Err(Error::InvalidParameter("structure extraction needs n >= 2".into()));
        }
        let mut s = Self::zeros(kinds);
        let (off, total) = s.offsets(n);
        if total != full.dim() {
            return Err(Error::DimensionMismatch(format!("layout {total} vs matrix {}", full.dim())));
        }
        let k = s.kinds.len();
        for a in 0..k {
            for b in 0..k {
                let (oa, ob) = (off[a], off[b]);
                match (s.kinds[a], s.kinds[b]) {
                    (BlockKind::Vector, BlockKind::Vector) => {
                        let q = full.get(oa, ob + 1);
                        s.q[a][b] = q;
                        s.mu[a][b] = full.get(oa, ob) - q;
                    }
                    (BlockKind::Scalar, BlockKind::Scalar) => s.mu[a][b] = full.get(oa, ob),
                    _ => s.q[a][b] = full.get(oa, ob),
                }
            }
        }
        let resid = s.expand(n).max_abs_diff(full);
        Ok((s, resid))
    }

    /// Small matrices whose joint negative semidefiniteness is equivalent to
    /// that of the expanded matrix: the part orthogonal to e (vector blocks
    /// keep μ, scalar blocks keep their entry, couplings to scalars vanish) and
    /// the part along e (μ + n·q between vector blocks, √n·q between a vector
    /// and a scalar block). For n = 1 only the second matrix is returned.
    pub fn reduce(&self, n: usize) -> Vec<SymMatrix<T>> {
        let k = self.kinds.len();
        let nf = T::of_usize(n);
        let mean = SymMatrix::from_fn(k, |a, b| match (self.kinds[a], self.kinds[b]) {
            (BlockKind::Vector, BlockKind::Vector) => self.mu[a][b] + nf * self.q[a][b],
            (BlockKind::Scalar, BlockKind::Scalar) => self.mu[a][b],
            _ => nf.sqrt() * self.q[a][b],
        });
        if n == 1 {
            return vec![mean];
        }
        let orth = SymMatrix::from_fn(k, |a, b| match (self.kinds[a], self.kinds[b]) {
            (BlockKind::Vector, BlockKind::Vector) => self.mu[a][b],
            (BlockKind::Scalar, BlockKind::Scalar) => self.mu[a][b],
            _ => T::zero(),
        });
        vec![orth, mean]
    }
}

/// Named layouts of the block-reduction statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListShape {
    /// μ1·I + q1·eeᵀ; lists (μ1) and (q1).
    Single,
    /// 2×2 vector blocks; lists (μ1, μ2, μ3) and (q1, q2, q3), μ3/q3 off-diagonal.
    Pair,
    /// vector, scalar, vector; lists (μ1..μ6) and (q1..q6) with μ2 the scalar
    /// entry, q4/q5 the couplings to the scalar, μ6/q6 the vector-vector
    /// coupling; μ4, μ5, q2 are ignored.
    SagaTriple,
    /// three vector blocks; lists (μ1..μ6), (q1..q6) with 4 = (1,2), 5 = (2,3), 6 = (1,3).
    Triple,
}

impl<T: Scalar> BlockStructure<T> {
    pub fn from_lists(mu: &[T], q: &[T], shape: ListShape) -> Result<Self> {
        use BlockKind::*;
        let need = match shape {
            ListShape::Single => 1,
            ListShape::Pair => 3,
            ListShape::SagaTriple | ListShape::Triple => 6,
        };
        if mu.len() != need || q.len() != need {
            return Err(Error::DimensionMismatch(format!("{shape:?} needs {need} values of mu and q")));
        }
        let s = match shape {
            ListShape::Single => {
                let mut s = Self::zeros(vec![Vector]);
                s.mu[0][0] = mu[0];
                s.q[0][0] = q[0];
                s
            }
            ListShape::Pair => {
                let mut s = Self::zeros(vec![Vector, Vector]);
                s.mu[0][0] = mu[0];
                s.mu[1][1] = mu[1];
                s.add_mu(0, 1, mu[2]);
                s.q[0][0] = q[0];
                s.q[1][1] = q[1];
                s.add_q(0, 1, q[2]);
                s
            }
            ListShape::SagaTriple => {
                let mut s = Self::zeros(vec![Vector, Scalar, Vector]);
                s.mu[0][0] = mu[0];
                s.mu[1][1] = mu[1];
                s.mu[2][2] = mu[2];
                s.add_mu(0, 2, mu[5]);
                s.q[0][0] = q[0];
                s.q[2][2] = q[2];
                s.add_q(0, 1, q[3]);
                s.add_q(1, 2, q[4]);
                s.add_q(0, 2, q[5]);
                s
            }
            ListShape::Triple => {
                let mut s = Self::zeros(vec![Vector, Vector, Vector]);
                for (d, (&m, &qq)) in mu.iter().zip(q).take(3).enumerate() {
                    s.mu[d][d] = m;
                    s.q[d][d] = qq;
                }
                for (idx, (a, b)) in [(3, (0, 1)), (4, (1, 2)), (5, (0, 2))] {
                    s.add_mu(a, b, mu[idx]);
                    s.add_q(a, b, q[idx]);
                }
                s
            }
        };
        Ok(s)
    }
}

/// Reduced matrices for one of the named layouts (see [`ListShape`]).
pub fn block_reduce<T: Scalar>(mu: &[T], q: &[T], n: usize, shape: ListShape) -> Result<Vec<SymMatrix<T>>> {
    Ok(BlockStructure::from_lists(mu, q, shape)?.reduce(n))
}

/// Multiplier contributions to a block structure whose state blocks have
/// output coefficients `c` (v = Σ c_b·eᵀ(block b), or c_b·x for a scalar block)
/// and whose last block is w.
fn add_multiplier_terms<T: Scalar>(
    s: &mut BlockStructure<T>,
    c: &[T],
    profile: &AssumptionProfile<T>,
    mult: &MultiplierPair<T>,
    n: usize,
) {
    let nf = T::of_usize(n);
    let two = T::two();
    let (l, nu, g) = (profile.l, profile.nu, profile.gamma);
    let (l1, l2) = (mult.lambda1, mult.lambda2);
    let kvv = two * l * (nu * l1 + g * l2);
    let kvw = ((l - nu) * l1 + (l - g) * l2) / nf;
    let w = c.len();
    for a in 0..w {
        for b in a..w {
            let v = c[a] * c[b] * kvv;
            match (s.kinds[a], s.kinds[b]) {
                (BlockKind::Scalar, BlockKind::Scalar) => s.add_mu(a, b, v),
                _ => s.add_q(a, b, v),
            }
        }
        s.add_q(a, w, c[a] * kvw);
    }
    s.add_q(w, w, -two * l1 / (nf * nf));
    s.add_mu(w, w, -two * l2 / nf);
}

/// Block structure of the full condition assembled from closed-form
/// expressions for the averaged products, with P̃ of the given structured form.
pub fn closed_form_structure<T: Scalar>(
    r: &JumpRealization<T>,
    profile: &AssumptionProfile<T>,
    rate: Rate<T>,
    pt: &StructuredP<T>,
    mult: &MultiplierPair<T>,
) -> Result<BlockStructure<T>> {
    use BlockKind::*;
    let n = r.n;
    let nf = T::of_usize(n);
    let a = r.alpha;
    let d = rate.gap();
    let one = T::one();
    let two = T::two();
    match (r.method, *pt) {
        (Method::Saga, StructuredP::Diagonal { p1, p2 }) => {
            let mut s = BlockStructure::zeros(vec![Vector, Scalar, Vector]);
            s.add_mu(0, 0, p2 * a * a / nf - p1 / nf + d * p1);
            s.add_q(0, 0, -a * a * p2 / (nf * nf));
            s.add_mu(1, 1, d * p2);
            s.add_mu(0, 2, -a * a * p2 / nf);
            s.add_q(0, 2, a * a * p2 / (nf * nf));
            s.add_q(1, 2, -a * p2 / nf);
            s.add_mu(2, 2, (p1 + a * a * p2) / nf);
            add_multiplier_terms(&mut s, &[T::zero(), one], profile, mult, n);
            Ok(s)
        }
        (Method::Sag, StructuredP::Diagonal { p1, p2 }) => {
            let n2 = nf * nf;
            let n3 = n2 * nf;
            let mut s = BlockStructure::zeros(vec![Vector, Scalar, Vector]);
            s.add_mu(0, 0, -p1 / nf + p2 * a * a / n3 + d * p1);
            s.add_q(0, 0, p2 * a * a * (one - two / nf) / n2);
            s.add_q(0, 1, -(a * p2 / nf) * (one - one / nf));
            s.add_mu(1, 1, d * p2);
            s.add_mu(0, 2, -a * a * p2 / n3);
            s.add_q(0, 2, a * a * p2 / n3);
            s.add_q(1, 2, -a * p2 / n2);
            s.add_mu(2, 2, (p1 + a * a * p2 / n2) / nf);
            add_multiplier_terms(&mut s, &[T::zero(), one], profile, mult, n);
            Ok(s)
        }
        (Method::Finito, StructuredP::Finito { p1, p2, p3, p4, p5 }) => {
            let mut s = BlockStructure::zeros(vec![Vector, Vector, Vector]);
            s.add_mu(0, 0, (p2 - p1) / nf + d * p1);
            s.add_q(0, 0, -two * p2 / nf + d * p2 - two * (one - one / nf) * p3 * a + (p4 + p5) * a * a);
            s.add_mu(0, 1, p3 / nf);
            s.add_q(0, 1, -(one / nf + one / (nf * nf)) * p3 + d * p3 - (p4 + nf * p5) * a / nf);
            s.add_mu(1, 1, (p5 - p4) / nf + d * p4);
            s.add_q(1, 1, (p4 - p5) / (nf * nf) + d * p5);
            s.add_mu(0, 2, -p2 / nf);
            s.add_q(0, 2, (p2 - p3 * a) / nf);
            s.add_mu(1, 2, -p3 / nf);
            s.add_q(1, 2, (nf + one) * p3 / (nf * nf));
            s.add_mu(2, 2, (p1 + p2) / nf);
            add_multiplier_terms(&mut s, &[-a, one / nf], profile, mult, n);
            Ok(s)
        }
        (Method::Sdca, StructuredP::Sdca { p1, p2 }) => {
            let at = r.alpha_tilde().expect("SDCA carries m");
            let m = r.m.expect("SDCA carries m");
            let mut s = BlockStructure::zeros(vec![Vector, Vector]);
            s.add_mu(0, 0, p1 * (at * at - two * at) / nf + d * p1 + p2 * at * at / nf);
            s.add_q(0, 0, -two * at * p2 / nf + d * p2);
            s.add_mu(0, 1, (p1 * (at * at - at) + p2 * at * at) / nf);
            s.add_q(0, 1, -at * p2 / nf);
            s.add_mu(1, 1, (p1 + p2) * at * at / nf);
            add_multiplier_terms(&mut s, &[one / (m * nf)], profile, mult, n);
            Ok(s)
        }
        (method, pt) => Err(Error::Unsupported(format!(
            "no closed-form assembly for {method} with {pt:?}"
        ))),
    }
}

fn standard_params<T: Scalar>(bundle: &mut LmiBundle<T>, pt: &StructuredP<T>, mult: &MultiplierPair<T>, rate: Rate<T>) {
    bundle.variable_scale = Some(pt.values().iter().fold(T::zero(), |a, v| a.max(v.abs())));
    for (k, v) in pt.named_values() {
        bundle.push_param(&k, v);
    }
    bundle.push_param("rho2", rate.rho2());
    bundle.push_param("gap", rate.gap());
    bundle.push_nonnegative("lambda1", mult.lambda1);
    bundle.push_nonnegative("lambda2", mult.lambda2);
}

/// SAGA with P̃ = diag(p1·I, p2): two 2×2 conditions.
pub fn reduced_lmi_saga<T: Scalar>(
    profile: &AssumptionProfile<T>,
    n: usize,
    alpha: T,
    p1: T,
    p2: T,
    mult: &MultiplierPair<T>,
    rate: Rate<T>,
) -> LmiBundle<T> {
    let nf = T::of_usize(n);
    let (a, d, two) = (alpha, rate.gap(), T::two());
    let (l, nu, g) = (profile.l, profile.nu, profile.gamma);
    let (l1, l2) = (mult.lambda1, mult.lambda2);
    let mut b = LmiBundle::new("saga");
    b.push_nsd(sym2(
        p2 * a * a + (nf * d - T::one()) * p1,
        -a * a * p2,
        p1 + a * a * p2 - two * l2,
    ));
    b.push_nsd(sym2(
        d * p2 + two * l * (nu * l1 + g * l2),
        -a * p2 + (l - nu) * l1 + (l - g) * l2,
        p1 + a * a * p2 - two * l1 - two * l2,
    ));
    let pt = StructuredP::Diagonal { p1, p2 };
    for blk in pt.pd_blocks(n, FinitoPdMode::Corrected) {
        b.push_pd(blk);
    }
    standard_params(&mut b, &pt, mult, rate);
    b
}

/// Finito with the five-parameter P̃: one PD block pair and two 3×3 conditions.
#[allow(clippy::too_many_arguments)]
pub fn reduced_lmi_finito<T: Scalar>(
    profile: &AssumptionProfile<T>,
    n: usize,
    alpha: T,
    p: [T; 5],
    mult: &MultiplierPair<T>,
    rate: Rate<T>,
    mode: FinitoPdMode,
) -> LmiBundle<T> {
    let nf = T::of_usize(n);
    let [p1, p2, p3, p4, p5] = p;
    let (a, d, one, two) = (alpha, rate.gap(), T::one(), T::two());
    let (l, nu, g) = (profile.l, profile.nu, profile.gamma);
    let (l1, l2) = (mult.lambda1, mult.lambda2);
    let kvv = two * l * (nu * l1 + g * l2);
    let kvw = (l - nu) * l1 + (l - g) * l2;
    let mut b = LmiBundle::new("finito");
    b.push_nsd(sym3([
        [p2 - p1 + nf * d * p1, p3, -p2],
        [p3, p5 - p4 + nf * d * p4, -p3],
        [-p2, -p3, p1 + p2 - two * l2],
    ]));
    let x11 = (d - one / nf) * p1 + p2 * (one / nf - two + nf * d) - two * (one - one / nf) * p3 * a * nf
        + (p4 + p5 + kvv) * a * a * nf;
    let x12 = nf * d * p3 - p3 - (p4 + nf * p5 + kvv) * a;
    let x13 = (one - one / nf) * p2 - (p3 + kvw) * a;
    let x23 = p3 + kvw / nf;
    b.push_nsd(sym3([
        [x11, x12, x13],
        [x12, (p4 + nf * p5) * d + kvv / nf, x23],
        [x13, x23, (p1 + p2 - two * l1 - two * l2) / nf],
    ]));
    let pt = StructuredP::Finito { p1, p2, p3, p4, p5 };
    for blk in pt.pd_blocks(n, mode) {
        b.push_pd(blk);
    }
    standard_params(&mut b, &pt, mult, rate);
    b
}

/// SDCA with P̃ = p1·I + p2·eeᵀ and α̃ = αmn: two 2×2 conditions.
#[allow(clippy::too_many_arguments)]
pub fn reduced_lmi_sdca<T: Scalar>(
    profile: &AssumptionProfile<T>,
    n: usize,
    alpha: T,
    m: T,
    p1: T,
    p2: T,
    mult: &MultiplierPair<T>,
    rate: Rate<T>,
) -> LmiBundle<T> {
    let nf = T::of_usize(n);
    let at = alpha * m * nf;
    let (d, two) = (rate.gap(), T::two());
    let (l, nu, g) = (profile.l, profile.nu, profile.gamma);
    let (l1, l2) = (mult.lambda1, mult.lambda2);
    let mut b = LmiBundle::new("sdca");
    b.push_nsd(sym2(
        p1 * (at * at - two * at + nf * d) + p2 * at * at,
        p1 * (at * at - at) + at * at * p2,
        (p1 + p2) * at * at - two * l2,
    ));
    let x11 = p1 * (at * at - two * at + nf * d)
        + p2 * (at * at - two * at * nf + nf * nf * d)
        + two * l * (nu * l1 + g * l2) / (m * m);
    let x12 = p1 * (at * at - at) + at * (at - nf) * p2 + ((l - nu) * l1 + (l - g) * l2) / m;
    b.push_nsd(sym2(x11, x12, (p1 + p2) * at * at - two * (l1 + l2)));
    let pt = StructuredP::Sdca { p1, p2 };
    for blk in pt.pd_blocks(n, FinitoPdMode::Corrected) {
        b.push_pd(blk);
    }
    standard_params(&mut b, &pt, mult, rate);
    b
}

/// Reduced bundle for any supported (method, P̃ form): the stated reduced
/// conditions for SAGA, Finito and SDCA, the closed-form block structure for
/// SAG with diagonal P̃, and structure extraction from the summed full
/// condition for the invariant (n+1)-state form.
pub fn structured_bundle<T: Scalar>(
    r: &JumpRealization<T>,
    profile: &AssumptionProfile<T>,
    rate: Rate<T>,
    pt: &StructuredP<T>,
    mult: &MultiplierPair<T>,
) -> Result<LmiBundle<T>> {
    let n = r.n;
    match (r.method, *pt) {
        (Method::Saga, StructuredP::Diagonal { p1, p2 }) => {
            Ok(reduced_lmi_saga(profile, n, r.alpha, p1, p2, mult, rate))
        }
        (Method::Finito, StructuredP::Finito { p1, p2, p3, p4, p5 }) => Ok(reduced_lmi_finito(
            profile,
            n,
            r.alpha,
            [p1, p2, p3, p4, p5],
            mult,
            rate,
            FinitoPdMode::Corrected,
        )),
        (Method::Sdca, StructuredP::Sdca { p1, p2 }) => {
            let m = r.m.expect("SDCA carries m");
            Ok(reduced_lmi_sdca(profile, n, r.alpha, m, p1, p2, mult, rate))
        }
        (Method::Sag, StructuredP::Diagonal { .. }) => {
            let s = closed_form_structure(r, profile, rate, pt, mult)?;
            Ok(bundle_from_structure(format!("{}-diagonal", r.method), s, n, pt, mult, rate))
        }
        (Method::Saga | Method::Sag, StructuredP::Invariant { .. }) => {
            let full = full_lmi(r, profile, rate, &pt.matrix(n), mult)?;
            let kinds = vec![BlockKind::Vector, BlockKind::Scalar, BlockKind::Vector];
            let (s, _) = BlockStructure::extract(&full, kinds, n)?;
            Ok(bundle_from_structure(format!("{}-invariant", r.method), s, n, pt, mult, rate))
        }
        (method, pt) => Err(Error::Unsupported(format!("{method} with {pt:?}"))),
    }
}

fn bundle_from_structure<T: Scalar>(
    label: String,
    s: BlockStructure<T>,
    n: usize,
    pt: &StructuredP<T>,
    mult: &MultiplierPair<T>,
    rate: Rate<T>,
) -> LmiBundle<T> {
    let mut b = LmiBundle::new(label);
    for blk in s.reduce(n) {
        b.push_nsd(blk);
    }
    for blk in pt.pd_blocks(n, FinitoPdMode::Corrected) {
        b.push_pd(blk);
    }
    standard_params(&mut b, pt, mult, rate);
    b
}

/// The Lyapunov parameters induced by (p1, p4) on the relaxed Finito slice:
/// (p1, α², −α/n, p4, 1/n²).
pub fn finito_slice<T: Scalar>(n: usize, alpha: T, p1: T, p4: T) -> StructuredP<T> {
    let nf = T::of_usize(n);
    StructuredP::Finito { p1, p2: alpha * alpha, p3: -alpha / nf, p4, p5: T::one() / (nf * nf) }
}

/// Relaxed scalar conditions for Finito on the slice of [`finito_slice`], as
/// 1×1 NSD blocks: the pivot α² − 2λ2 + p1 and three Schur-complemented
/// conditions.
pub fn finito_relaxed<T: Scalar>(
    profile: &AssumptionProfile<T>,
    n: usize,
    alpha: T,
    p1: T,
    p4: T,
    mult: &MultiplierPair<T>,
    rate: Rate<T>,
) -> Result<LmiBundle<T>> {
    let nf = T::of_usize(n);
    let d = rate.gap();
    if d < T::zero() || d > T::one() / nf {
        return Err(Error::RateOutOfRange("1 - 1/n <= rho2 <= 1".into()));
    }
    let (a, two) = (alpha, T::two());
    let (l, nu, g) = (profile.l, profile.nu, profile.gamma);
    let (l1, l2) = (mult.lambda1, mult.lambda2);
    let pivot = a * a - two * l2 + p1;
    if pivot >= T::zero() {
        return Err(Error::PivotSignViolation("alpha^2 - 2*lambda2 + p1 < 0".into()));
    }
    let mut b = LmiBundle::new("finito-relaxed");
    let scalar = |terms: &[T]| -> SymMatrix<T> {
        SymMatrix::diagonal(&[terms.iter().copied().fold(T::zero(), |s, t| s + t)])
    };
    let conds = [
        scalar(&[a * a, -two * l2, p1]),
        scalar(&[nf * d * p1, -p1, two * a * a, -two * a.powi(4) / pivot]),
        scalar(&[nf * d * p4, -p4, two / (nf * nf), -two * a * a / (nf * nf * pivot)]),
        {
            let cross = (l - nu) * l1 + (l - g) * l2 - a;
            let piv2 = a * a - two * l1 - two * l2 + p1;
            scalar(&[p4, d, two * l * g * l2, two * l * nu * l1, -cross * cross / piv2])
        },
    ];
    for blk in conds {
        b.push_nsd(blk);
    }
    b.push_pd(SymMatrix::diagonal(&[p1]));
    b.push_pd(SymMatrix::diagonal(&[p4]));
    standard_params(&mut b, &finito_slice(n, alpha, p1, p4), mult, rate);
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_classes::IndividualAssumption;

    #[test]
    fn rate_roundtrip() {
        let r = Rate::<f64>::from_rho2(0.995);
        assert!((r.gap() - 0.005).abs() < 1e-15);
        assert_eq!(Rate::from_gap(0.25).rho2(), 0.75);
    }

    #[test]
    fn single_list_reduction() {
        let ok = block_reduce(&[1.0], &[-0.19], 5, ListShape::Single).unwrap();
        assert!(ok.iter().all(|m| m.is_pd(0.0).unwrap()));
        let bad = block_reduce(&[1.0], &[-0.21], 5, ListShape::Single).unwrap();
        assert!(!bad.iter().all(|m| m.is_pd(0.0).unwrap()));
    }

    #[test]
    fn n_one_collapses() {
        let mu = [-1.0, -2.0, 0.3];
        let q = [0.1, -0.2, 0.05];
        let s = BlockStructure::from_lists(&mu, &q, ListShape::Pair).unwrap();
        let red = s.reduce(1);
        assert_eq!(red.len(), 1);
        assert!(red[0].max_abs_diff(&s.expand(1)) < 1e-15);
    }

    #[test]
    fn saga_closed_form_block_matches_appendix_shape() {
        let (n, a, p1, p2) = (3usize, 0.2, 0.7, 1.3);
        let r = JumpRealization::build(Method::Saga, n, a, None).unwrap();
        let prof = AssumptionProfile::primal(IndividualAssumption::StronglyConvex, 0.1, 1.0).unwrap();
        let full = full_lmi(&r, &prof, Rate::from_rho2(1.0), &StructuredP::Diagonal { p1, p2 }.matrix(n), &MultiplierPair::new(0.0, 0.0)).unwrap();
        let nf = n as f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { p2 * a * a / nf + (nf - 1.0) / nf * p1 } else { 0.0 } - a * a * p2 / (nf * nf)
                    - if i == j { p1 } else { 0.0 };
                assert!((full.get(i, j) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn finito_relaxed_rejects_bad_pivot_and_rate() {
        let prof = AssumptionProfile::primal(IndividualAssumption::StronglyConvex, 0.1, 1.0).unwrap();
        let mult = MultiplierPair::new(0.0, 0.0);
        assert!(matches!(
            finito_relaxed(&prof, 10, 0.2, 0.1, 0.1, &mult, Rate::from_gap(0.01)),
            Err(Error::PivotSignViolation(_))
        ));
        let mult = MultiplierPair::new(0.0, 1.0);
        assert!(matches!(
            finito_relaxed(&prof, 10, 0.2, 0.1, 0.1, &mult, Rate::from_gap(0.2)),
            Err(Error::RateOutOfRange(_))
        ));
    }
}
