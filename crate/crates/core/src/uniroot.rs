//! Univariate root finding, classification against the unit circle, and the
//! argument-principle winding counter.
//!
//! [`find_roots`] is the ground truth every multivariate estimator leans on:
//! a simultaneous Aberth–Ehrlich iteration started from Newton-polygon radii,
//! followed by a Newton polish. [`winding_count`] counts the same zeros by an
//! independent route (periodic trapezoid rule on `z P'(z) / P(z)`), so the two
//! can be checked against each other.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result, RootCounts};
use crate::poly::{unit, UniPoly};

/// Default half-width of the band `||α| - 1| ≤ δ` treated as the unit circle.
pub const DEFAULT_DELTA: f64 = 1e-9;
/// Worst acceptable backward error `|P(α)| / Σ|a_i||α|^i` after polishing.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const WINDING_INITIAL_NODES: usize = 256;
pub const WINDING_NODE_CAP: usize = 1 << 20;
const WINDING_LOCK: f64 = 0.05;
const MAX_ITERATIONS: usize = 500;
const PARALLEL_THRESHOLD: usize = 128;

/// Classified roots of a univariate polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootReport {
    #[serde(skip)]
    pub roots: Vec<Complex64>,
    pub inside: usize,
    pub unimodular: usize,
    pub outside: usize,
    pub delta: f64,
    pub degree: usize,
}

impl RootReport {
    pub fn counts(&self) -> RootCounts {
        RootCounts {
            inside: self.inside,
            unimodular: self.unimodular,
            outside: self.outside,
        }
    }
}

/// `c(P) = inside / degree`, kept as an integer ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactRatio {
    pub inside: usize,
    pub degree: usize,
    pub report: RootReport,
}

impl ExactRatio {
    pub fn value(&self) -> f64 {
        self.inside as f64 / self.degree as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindingResult {
    /// Trapezoid value of `∫₀¹ P'(e^{2πit}) e^{2πit} / P(e^{2πit}) dt`.
    pub raw: Complex64,
    pub rounded: usize,
    pub residual: f64,
    pub nodes_used: usize,
}

/// Newton correction `P/P'` and backward error at `z`.
///
/// Outside the unit disk the reversed polynomial is evaluated at `1/z`, which
/// keeps high-degree evaluations in range.
fn newton_ratio(coeffs: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let m = coeffs.len() - 1;
    let zero = Complex64::new(0.0, 0.0);
    if z.norm() <= 1.0 {
        let r = z.norm();
        let (mut p, mut dp, mut s) = (zero, zero, 0.0);
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            s = s * r + c.norm();
        }
        (p / dp, p.norm() / s)
    } else {
        let w = z.inv();
        let r = w.norm();
        let (mut q, mut dq, mut s) = (zero, zero, 0.0);
        for &c in coeffs.iter() {
            dq = dq * w + q;
            q = q * w + c;
            s = s * r + c.norm();
        }
        (z * q / (q * m as f64 - w * dq), q.norm() / s)
    }
}

/// Starting points on circles whose radii come from the upper convex hull of
/// `(i, log|a_i|)`; requires `a_0 ≠ 0`.
fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let m = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (i, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross =
                (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    const SIGMA: f64 = 0.7;
    let mut out = Vec::with_capacity(m);
    for edge in hull.windows(2) {
        let (i, li) = edge[0];
        let (j, lj) = edge[1];
        let n = j - i;
        let radius = ((li - lj) / n as f64).exp();
        for k in 0..n {
            let angle = TAU * k as f64 / n as f64 + TAU * i as f64 / m as f64 + SIGMA;
            out.push(Complex64::from_polar(radius, angle));
        }
    }
    out
}

fn aberth_step(coeffs: &[Complex64], z: &[Complex64], i: usize) -> (Complex64, f64) {
    let (ratio, berr) = newton_ratio(coeffs, z[i]);
    let zi = z[i];
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, &zj) in z.iter().enumerate() {
        if j != i {
            sum += (zi - zj).inv();
        }
    }
    let mut w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
    if !w.is_finite() {
        w = ratio;
    }
    if !w.is_finite() {
        w = Complex64::new(0.0, 0.0);
    }
    (zi - w, berr)
}

/// All roots of `p` with multiplicity.
///
/// Deterministic: the starting configuration is fixed and the parallel
/// update is a Jacobi sweep, so results do not depend on the worker count.
pub fn find_roots(p: &UniPoly) -> Result<Vec<Complex64>> {
    if p.degree() == 0 {
        return Err(Error::InvalidArgument(
            "root finding needs degree at least 1".into(),
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    let zeros = p.coeffs().iter().take_while(|&&c| c == zero).count();
    let coeffs = &p.coeffs()[zeros..];
    let m = coeffs.len() - 1;
    let mut roots = vec![zero; zeros];
    if m == 0 {
        return Ok(roots);
    }
    if m == 1 {
        roots.push(-coeffs[0] / coeffs[1]);
        return Ok(roots);
    }

    let noise = (4 * m + 1) as f64 * f64::EPSILON;
    let mut z = initial_guesses(coeffs);
    let mut done = vec![false; m];
    for _ in 0..MAX_ITERATIONS {
        let update = |i: usize| -> (Complex64, bool) {
            if done[i] {
                return (z[i], true);
            }
            let (next, berr) = aberth_step(coeffs, &z, i);
            let settled = berr <= noise || (next - z[i]).norm() <= f64::EPSILON * z[i].norm();
            (if berr <= noise { z[i] } else { next }, settled)
        };
        let stepped: Vec<(Complex64, bool)> = if m >= PARALLEL_THRESHOLD {
            (0..m).into_par_iter().map(update).collect()
        } else {
            (0..m).map(update).collect()
        };
        for (i, (zi, settled)) in stepped.into_iter().enumerate() {
            z[i] = zi;
            done[i] = settled;
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }

    // Newton polish, keeping a step only when it lowers the backward error.
    let polish = |mut zi: Complex64| -> (Complex64, f64) {
        let (mut ratio, mut berr) = newton_ratio(coeffs, zi);
        for _ in 0..3 {
            if berr == 0.0 || !ratio.is_finite() {
                break;
            }
            let cand = zi - ratio;
            let (r2, b2) = newton_ratio(coeffs, cand);
            if b2 < berr {
                zi = cand;
                ratio = r2;
                berr = b2;
            } else {
                break;
            }
        }
        (zi, berr)
    };
    let polished: Vec<(Complex64, f64)> = if m >= PARALLEL_THRESHOLD {
        z.par_iter().map(|&zi| polish(zi)).collect()
    } else {
        z.iter().map(|&zi| polish(zi)).collect()
    };
    // NaN residuals must surface, so no f64::max here.
    let worst = polished
        .iter()
        .map(|&(_, b)| b)
        .fold(0.0, |m: f64, b| if b.is_nan() || b > m { b } else { m });
    if worst.is_nan() || worst > RESIDUAL_TOL {
        return Err(Error::NonConvergence {
            worst_residual: worst,
        });
    }
    roots.extend(polished.into_iter().map(|(zi, _)| zi));
    Ok(roots)
}

/// Partitions roots by the band `||α| - 1| ≤ delta`.
pub fn classify(roots: &[Complex64], delta: f64) -> Result<RootReport> {
    if !(delta > 0.0 && delta <= 1e-3) {
        return Err(Error::InvalidArgument(format!(
            "classification delta {delta} outside (0, 1e-3]"
        )));
    }
    let (mut inside, mut unimodular, mut outside) = (0, 0, 0);
    for r in roots {
        let m = r.norm();
        if m < 1.0 - delta {
            inside += 1;
        } else if m > 1.0 + delta {
            outside += 1;
        } else {
            unimodular += 1;
        }
    }
    Ok(RootReport {
        roots: roots.to_vec(),
        inside,
        unimodular,
        outside,
        delta,
        degree: roots.len(),
    })
}

/// Finds and classifies the roots of `p`.
pub fn root_report(p: &UniPoly, delta: f64) -> Result<RootReport> {
    classify(&find_roots(p)?, delta)
}

/// Exact `c(P) = #{|α| < 1} / deg P`.
///
/// Unimodular roots make the contour integral ill-posed, so they are an
/// error; the full triple travels in the error payload.
pub fn c_exact(p: &UniPoly, delta: f64) -> Result<ExactRatio> {
    let report = root_report(p, delta)?;
    if report.unimodular > 0 {
        return Err(Error::UnimodularRoots(report.counts()));
    }
    Ok(ExactRatio {
        inside: report.inside,
        degree: report.degree,
        report,
    })
}

/// Counts zeros inside the unit circle with the argument principle.
///
/// The periodic trapezoid rule is refined by doubling the node count until
/// two consecutive levels round to the same integer with residual ≤ 0.05.
pub fn winding_count(p: &UniPoly, initial_nodes: usize) -> Result<WindingResult> {
    if p.degree() == 0 {
        return Err(Error::InvalidArgument(
            "winding count needs degree at least 1".into(),
        ));
    }
    if initial_nodes == 0 {
        return Err(Error::InvalidArgument(
            "initial_nodes must be positive".into(),
        ));
    }
    let floor = 1e-13 * p.l1_norm();
    let integrand = |t: f64| -> Result<Complex64> {
        let z = unit(t);
        let (v, dv) = p.eval_with_derivative(z);
        if v.norm() < floor {
            return Err(Error::ZeroOnContour { t });
        }
        Ok(dv * z / v)
    };

    let degree = p.degree();
    let mut n = initial_nodes;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        sum += integrand(k as f64 / n as f64)?;
    }
    let mut previous: Option<usize> = None;
    loop {
        let raw = sum / n as f64;
        let nearest = raw.re.round();
        let residual = (raw - Complex64::new(nearest, 0.0)).norm();
        let locked = (residual <= WINDING_LOCK && nearest >= 0.0 && nearest <= degree as f64)
            .then_some(nearest as usize);
        let accept = match (locked, previous) {
            (Some(a), Some(b)) => a == b,
            (Some(_), None) => n >= WINDING_NODE_CAP,
            _ => false,
        };
        if accept {
            return Ok(WindingResult {
                raw,
                rounded: locked.unwrap(),
                residual,
                nodes_used: n,
            });
        }
        if n >= WINDING_NODE_CAP {
            return Err(Error::WindingCap {
                re: raw.re,
                im: raw.im,
                nodes: n,
            });
        }
        previous = locked;
        // Refine: the new nodes are the odd points of the doubled grid.
        let m = 2 * n;
        for k in (1..m).step_by(2) {
            sum += integrand(k as f64 / m as f64)?;
        }
        n = m;
    }
}

/// Mean root modulus `(1/d) Σ |α_j|`.
pub fn s_measure(p: &UniPoly) -> Result<f64> {
    let roots = find_roots(p)?;
    Ok(roots.iter().map(|r| r.norm()).sum::<f64>() / roots.len() as f64)
}
