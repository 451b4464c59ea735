#![allow(dead_code)]

use jumplmi::certificates::{statement_certificate, RateCertificate, Statement};
use jumplmi::Error;

pub const RATIOS: [f64; 5] = [1e-3, 1e-2, 0.1, 0.5, 1.0];
pub const NS: [usize; 4] = [4, 10, 50, 200];

#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub statement: Statement,
    pub m: f64,
    pub l: f64,
    pub n: usize,
    pub alpha: Option<f64>,
    pub b: Option<f64>,
}

fn stepsizes(st: Statement, m: f64, l: f64, n: usize) -> Vec<(Option<f64>, Option<f64>)> {
    let nf = n as f64;
    match st {
        Statement::SagaScA => [1.0 / 3.0, 0.2, 0.45].iter().map(|a| (Some(a / l), None)).collect(),
        Statement::SagaScB => [1.0 / 3.0, 0.2, 0.4].iter().map(|a| (Some(a / l), None)).collect(),
        Statement::SagaCvx => {
            let mut v = Vec::new();
            for a in [1.0 / (3.0 * l), 1.0 / (8.0 * l)] {
                v.push((Some(a), None));
                v.push((Some(a), Some((2.0 * l * a + 1.0) / 2.0)));
            }
            v
        }
        Statement::SagaSmooth => {
            let mut v = Vec::new();
            for a in [m / (8.0 * l * l), m / (16.0 * l * l)] {
                v.push((Some(a), None));
                v.push((Some(a), Some(2.5)));
            }
            v
        }
        Statement::SdcaCvx => {
            vec![(Some(1.0 / (l + m * nf)), None), (Some(2.0 / (l + 2.0 * m * nf)), None)]
        }
        Statement::SdcaSmooth => {
            let a = m / (l * l + m * m * nf);
            vec![(Some(a), None), (Some(0.5 * a), None)]
        }
        _ => vec![(None, None)],
    }
}

/// All (statement, m/L, n, stepsize) cells of the certificate grid.
pub fn grid() -> Vec<Cell> {
    let mut out = Vec::new();
    for st in Statement::ALL {
        for &m in &RATIOS {
            for &n in &NS {
                for (alpha, b) in stepsizes(st, m, 1.0, n) {
                    out.push(Cell { statement: st, m, l: 1.0, n, alpha, b });
                }
            }
        }
    }
    out
}

/// None when the cell is outside the statement's preconditions (big-data
/// threshold or the L-versus-2m branch); otherwise the constructor result.
pub fn build(c: &Cell) -> Option<Result<RateCertificate<f64>, Error>> {
    match statement_certificate(c.statement, c.m, c.l, c.n, c.alpha, c.b) {
        Err(Error::BigDataConditionViolated(_)) => None,
        Err(Error::InvalidParameter(s)) if s.contains("requires L") => None,
        r => Some(r),
    }
}
