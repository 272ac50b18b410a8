//! The multivariate measure `c_j(P)`.
//!
//! `c_j(P)` is the torus average of
//! `∂_j P(z) · z_j / (d_j · P(z))`, where `d_j` is the degree of `P` in `x_j`.
//! Integrating out `t_j` first turns the inner integral into a zero count of
//! the slice polynomial in `x_j`, so two estimators are offered:
//!
//! * [`c_j_direct`] samples the full `k`-dimensional integrand;
//! * [`c_j_slice`] samples the outer `(k-1)`-torus and counts slice roots
//!   inside the unit disk exactly.
//!
//! Polynomials that vanish on a measure-zero subset of the torus (such as
//! `1 + x + y`) are accepted; samples that land too close to the zero set are
//! retried or discarded under the quadrature's discard budget.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{unit, MultiPoly, TorusPoint};
use crate::sampling::{integrate, PointSet, QuadratureSpec, Sample};
use crate::uniroot::find_roots;

/// Retries with fresh jitter before a band-straddling slice is discarded.
pub const SLICE_RETRIES: usize = 3;
/// Direct-integrand samples with `|P| < DIRECT_FLOOR · Σ|c|` are discarded.
pub const DIRECT_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub std_error: f64,
    pub imag_residual: f64,
    pub discarded_fraction: f64,
    pub samples_used: usize,
    #[serde(rename = "method")]
    pub method_tag: String,
}

fn generic_degree(p: &MultiPoly, j: usize) -> Result<usize> {
    let d = p.degree_in(j)? as usize;
    if d == 0 {
        return Err(Error::InvalidArgument(format!(
            "polynomial does not depend on `{}`",
            p.var_names()[j]
        )));
    }
    Ok(d)
}

/// Monte Carlo / lattice estimate of the full torus integral.
pub fn c_j_direct(p: &MultiPoly, j: usize, spec: &QuadratureSpec) -> Result<MeasureEstimate> {
    let d = generic_degree(p, j)? as f64;
    let dp = p.partial_derivative(j)?;
    let floor = DIRECT_FLOOR * p.l1_norm();
    let k = p.num_vars();
    let r = integrate(spec, k, 0, |t| {
        let z: Vec<Complex64> = t.iter().map(|&a| unit(a)).collect();
        let v = p.evaluate(&z);
        if v.norm() < floor {
            return Ok(Sample::Reject);
        }
        Ok(Sample::Value(dp.evaluate(&z) * z[j] / (v * d)))
    })?;
    Ok(MeasureEstimate {
        value: r.mean.re,
        std_error: r.std_error,
        imag_residual: r.mean.im.abs(),
        discarded_fraction: r.discarded_fraction,
        samples_used: r.samples_used,
        method_tag: format!("direct/{}", spec.method),
    })
}

/// Outer-torus sampling with exact inner zero counts.
///
/// Each outer point contributes `#{roots of the slice in |x_j| < 1} / d_j`,
/// always divided by the generic degree even where the slice degree drops.
pub fn c_j_slice(p: &MultiPoly, j: usize, spec: &QuadratureSpec) -> Result<MeasureEstimate> {
    let d = generic_degree(p, j)?;
    let plan = p.slice_plan(j)?;
    let band = spec.circle_band_delta;
    let r = integrate(spec, plan.outer_dim(), SLICE_RETRIES, |t| {
        let slice = match plan.slice(t) {
            Ok(s) => s,
            Err(Error::SliceZero) => return Ok(Sample::RejectFatal(Error::SliceZero)),
            Err(e) => return Err(e),
        };
        if slice.poly.degree() == 0 {
            return Ok(Sample::Value(Complex64::new(0.0, 0.0)));
        }
        let roots = find_roots(&slice.poly)?;
        let mut inside = 0usize;
        for r in &roots {
            let m = r.norm();
            if (m - 1.0).abs() < band {
                return Ok(Sample::Reject);
            }
            if m < 1.0 {
                inside += 1;
            }
        }
        Ok(Sample::Value(Complex64::new(inside as f64 / d as f64, 0.0)))
    })?;
    Ok(MeasureEstimate {
        value: r.mean.re,
        std_error: r.std_error,
        imag_residual: r.mean.im.abs(),
        discarded_fraction: r.discarded_fraction,
        samples_used: r.samples_used,
        method_tag: format!("slice/{}", spec.method),
    })
}

/// `c(P)` with respect to the last variable in canonical order.
pub fn c_default(p: &MultiPoly, spec: &QuadratureSpec) -> Result<MeasureEstimate> {
    if p.num_vars() == 0 {
        return Err(Error::InvalidArgument("constant polynomial".into()));
    }
    c_j_slice(p, p.num_vars() - 1, spec)
}

/// `c(a + x + y) = arccos(|a|/2) / π`, which is zero once `|a| ≥ 2`.
pub fn trinomial_closed_form(a: f64) -> f64 {
    let half = (a.abs() / 2.0).min(1.0);
    half.acos() / PI
}

#[derive(Clone, Debug, PartialEq)]
pub struct VanishingProbe {
    pub min_abs: f64,
    pub argmin: TorusPoint,
}

/// Smallest `|P|` seen over the sample set of `spec`; purely diagnostic.
pub fn torus_vanishing_probe(p: &MultiPoly, spec: &QuadratureSpec) -> Result<VanishingProbe> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let k = p.num_vars();
    let points = PointSet::new(spec, k)?;
    let values: Vec<(f64, Vec<f64>)> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let mut t = vec![0.0; k];
            points.point(i, &mut t);
            (p.evaluate_at_angles(&t).norm(), t)
        })
        .collect();
    let (min_abs, t) = values
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("point sets are non-empty");
    Ok(VanishingProbe {
        min_abs,
        argmin: TorusPoint::new(t)?,
    })
}
