//! One-variable specialisations `P(x, x^{n_2}, …, x^{n_k})` and their root
//! ratios, set against the torus prediction `Σ_{j≥2} c_j(P)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{parse_poly, MultiPoly};
use crate::sampling::QuadratureSpec;
use crate::torus::{c_default, c_j_slice, MeasureEstimate};
use crate::uniroot::{root_report, DEFAULT_DELTA};

/// Largest substituted degree accepted in default runs.
pub const DEFAULT_DEGREE_CAP: u64 = 20_000;

/// Root census of one substituted polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub exponents: Vec<u64>,
    pub degree: usize,
    pub inside: usize,
    pub unimodular: usize,
    pub outside: usize,
    pub ratio_inside: f64,
    pub ratio_unimodular: f64,
    pub ratio_outside: f64,
}

/// `c(P(x, x^{n_2}, …))` with unimodular roots reported rather than fatal.
pub fn c_substituted(p: &MultiPoly, n: &[u64]) -> Result<ConvergenceRow> {
    c_substituted_with(p, n, DEFAULT_DEGREE_CAP, DEFAULT_DELTA)
}

pub fn c_substituted_with(
    p: &MultiPoly,
    n: &[u64],
    cap: u64,
    delta: f64,
) -> Result<ConvergenceRow> {
    let uni = p.substitute_powers_capped(n, cap)?;
    if uni.degree() == 0 {
        return Err(Error::InvalidArgument(
            "substituted polynomial is constant".into(),
        ));
    }
    let report = root_report(&uni, delta)?;
    let d = report.degree as f64;
    Ok(ConvergenceRow {
        exponents: n.to_vec(),
        degree: report.degree,
        inside: report.inside,
        unimodular: report.unimodular,
        outside: report.outside,
        ratio_inside: report.inside as f64 / d,
        ratio_unimodular: report.unimodular as f64 / d,
        ratio_outside: report.outside as f64 / d,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitPrediction {
    pub value: f64,
    pub std_error: f64,
    /// `c_j` estimates for `j = 2..k`, in variable order.
    pub terms: Vec<MeasureEstimate>,
}

/// `Σ_{j≥2} c_j(P)` from the slice estimator, errors added in quadrature.
pub fn limit_prediction(p: &MultiPoly, spec: &QuadratureSpec) -> Result<LimitPrediction> {
    if p.num_vars() < 2 {
        return Err(Error::InvalidArgument(
            "limit prediction needs at least two variables".into(),
        ));
    }
    let terms = (1..p.num_vars())
        .map(|j| c_j_slice(p, j, spec))
        .collect::<Result<Vec<_>>>()?;
    let value = terms.iter().map(|t| t.value).sum();
    let std_error = terms
        .iter()
        .map(|t| t.std_error.powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(LimitPrediction {
        value,
        std_error,
        terms,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub prediction: LimitPrediction,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "exponents,degree,inside,unimodular,outside,ratio_inside,predicted_limit\n",
        );
        for r in &self.rows {
            let exps: Vec<String> = r.exponents.iter().map(u64::to_string).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                exps.join(";"),
                r.degree,
                r.inside,
                r.unimodular,
                r.outside,
                r.ratio_inside,
                self.prediction.value
            );
        }
        out
    }
}

/// Checks that every tuple has `k - 1` strictly increasing entries and that
/// no entry shrinks from one row to the next.
pub fn check_schedule(k: usize, schedule: &[Vec<u64>]) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidArgument(msg));
    if k < 2 {
        return bad("schedules need at least two variables".into());
    }
    for (i, row) in schedule.iter().enumerate() {
        if row.len() != k - 1 {
            return bad(format!(
                "row {i}: expected {} exponents, got {}",
                k - 1,
                row.len()
            ));
        }
        if row.contains(&0) {
            return bad(format!("row {i}: exponents must be at least 1"));
        }
        if row.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("row {i}: later exponents must be larger"));
        }
        if i > 0 && schedule[i - 1].iter().zip(row).any(|(a, b)| b < a) {
            return bad(format!("row {i}: exponents decrease from the previous row"));
        }
    }
    Ok(())
}

/// Rows of substituted counts in schedule order plus the torus prediction.
pub fn convergence_table(
    p: &MultiPoly,
    schedule: &[Vec<u64>],
    spec: &QuadratureSpec,
) -> Result<ConvergenceTable> {
    check_schedule(p.num_vars(), schedule)?;
    let rows = schedule
        .par_iter()
        .map(|n| c_substituted(p, n))
        .collect::<Result<Vec<_>>>()?;
    let prediction = limit_prediction(p, spec)?;
    Ok(ConvergenceTable { rows, prediction })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Bumps each exponent up until it is coprime to every earlier one.
fn make_coprime(row: &mut [u64]) {
    for i in 1..row.len() {
        while row[..i].iter().any(|&a| gcd(a, row[i]) != 1) {
            row[i] += 1;
        }
    }
}

/// Iterated-limit schedule: row `N` is `(N, N², …, N^{k-1})`, the last
/// exponent growing fastest.
pub fn iterated_schedule(k: usize, bases: &[u64], coprime: bool) -> Vec<Vec<u64>> {
    bases
        .iter()
        .map(|&b| {
            let mut row: Vec<u64> = (1..k as u32).map(|e| b.saturating_pow(e)).collect();
            if coprime {
                make_coprime(&mut row);
            }
            row
        })
        .collect()
}

/// Joint-growth schedule: row `N` is `(N, 2N + 1, 3N + 2, …)`.
pub fn joint_schedule(k: usize, bases: &[u64], coprime: bool) -> Vec<Vec<u64>> {
    bases
        .iter()
        .map(|&b| {
            let mut row: Vec<u64> = (0..k as u64 - 1).map(|i| (i + 1) * b + i).collect();
            if coprime {
                make_coprime(&mut row);
            }
            row
        })
        .collect()
}

/// `1 + x1 + … + xk`.
pub fn simplex_polynomial(k: usize) -> Result<MultiPoly> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let src: Vec<String> = std::iter::once("1".to_string())
        .chain((1..=k).map(|i| format!("x{i}")))
        .collect();
    parse_poly(&src.join(" + "), None)
}

/// One line of the `c(1 + x1 + … + xk)` scan against `1/(k+1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureRow {
    pub k: usize,
    pub target: f64,
    pub estimate: MeasureEstimate,
    pub deviation: f64,
    /// `|deviation| / std_error`; infinite when the error bar is zero.
    pub sigmas: f64,
}

pub fn conjecture_scan(
    k_min: usize,
    k_max: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<ConjectureRow>> {
    if k_min == 0 || k_min > k_max {
        return Err(Error::InvalidArgument(format!(
            "bad k range {k_min}..={k_max}"
        )));
    }
    (k_min..=k_max)
        .map(|k| {
            let estimate = c_default(&simplex_polynomial(k)?, spec)?;
            let target = 1.0 / (k as f64 + 1.0);
            let deviation = estimate.value - target;
            let sigmas = if estimate.std_error > 0.0 {
                deviation.abs() / estimate.std_error
            } else if deviation == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            Ok(ConjectureRow {
                k,
                target,
                estimate,
                deviation,
                sigmas,
            })
        })
        .collect()
}
