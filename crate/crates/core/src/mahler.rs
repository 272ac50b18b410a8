//! Logarithmic Mahler measure `m(P)`, the torus average of `log|P|`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{MultiPoly, UniPoly};
use crate::sampling::{integrate, QuadratureSpec, Sample};
use crate::torus::{c_default, MeasureEstimate};
use crate::uniroot::{c_exact, find_roots, DEFAULT_DELTA};

/// Torus samples with `|P|` below this are discarded.
pub const LOG_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MahlerResult {
    /// `m(P)`.
    pub log_value: f64,
    /// `M(P) = exp(m(P))`.
    pub exp_value: f64,
    #[serde(rename = "method")]
    pub method_tag: String,
    pub std_error: f64,
    /// Zero for root-based evaluation.
    pub samples_used: usize,
    pub discarded_fraction: f64,
}

/// Jensen's formula: `log|a_d| + Σ_{|α|>1} log|α|`.
pub fn mahler_univariate(p: &UniPoly) -> Result<MahlerResult> {
    if p.degree() == 0 {
        return Err(Error::InvalidArgument(
            "Mahler measure via roots needs degree at least 1".into(),
        ));
    }
    let roots = find_roots(p)?;
    let outside: f64 = roots
        .iter()
        .map(|r| r.norm())
        .filter(|&m| m > 1.0)
        .map(f64::ln)
        .sum();
    let log_value = p.leading().norm().ln() + outside;
    Ok(MahlerResult {
        log_value,
        exp_value: log_value.exp(),
        method_tag: "jensen".into(),
        std_error: 0.0,
        samples_used: 0,
        discarded_fraction: 0.0,
    })
}

/// Sample mean of `log|P|` over the torus.
pub fn mahler_torus(p: &MultiPoly, spec: &QuadratureSpec) -> Result<MahlerResult> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let r = integrate(spec, p.num_vars(), 0, |t| {
        let v = p.evaluate_at_angles(t).norm();
        if v < LOG_FLOOR {
            return Ok(Sample::Reject);
        }
        Ok(Sample::Value(Complex64::new(v.ln(), 0.0)))
    })?;
    Ok(MahlerResult {
        log_value: r.mean.re,
        exp_value: r.mean.re.exp(),
        method_tag: format!("torus/{}", spec.method),
        std_error: r.std_error,
        samples_used: r.samples_used,
        discarded_fraction: r.discarded_fraction,
    })
}

/// `m(P)` next to `c(P)`; each side fails independently.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureComparison {
    pub mahler: Result<MahlerResult>,
    pub c: Result<MeasureEstimate>,
}

/// Univariate inputs use root-based `m` and exact `c`; others use torus
/// sampling for both, with the same quadrature settings.
pub fn compare_measures(p: &MultiPoly, spec: &QuadratureSpec) -> Result<MeasureComparison> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.num_vars() == 1 {
        let uni = p.substitute_powers(&[])?;
        let c = c_exact(&uni, DEFAULT_DELTA).map(|r| MeasureEstimate {
            value: r.value(),
            std_error: 0.0,
            imag_residual: 0.0,
            discarded_fraction: 0.0,
            samples_used: 0,
            method_tag: "exact".into(),
        });
        return Ok(MeasureComparison {
            mahler: mahler_univariate(&uni),
            c,
        });
    }
    Ok(MeasureComparison {
        mahler: mahler_torus(p, spec),
        c: c_default(p, spec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::RootCounts;

    fn uni(s: &str) -> UniPoly {
        parse_poly(s, None).unwrap().substitute_powers(&[]).unwrap()
    }

    const LEHMER: &str = "x^10 + x^9 - x^7 - x^6 - x^5 - x^4 - x^3 + x + 1";

    #[test]
    fn jensen_examples() {
        let m = mahler_univariate(&uni(LEHMER)).unwrap();
        assert!((m.log_value - 0.162_357_612).abs() < 1e-8, "{m:?}");
        assert!((m.exp_value - m.log_value.exp()).abs() < 1e-15);
        let two = mahler_univariate(&uni("x - 2")).unwrap();
        assert!((two.log_value - 2f64.ln()).abs() < 1e-14);
        assert!(
            mahler_univariate(&uni("x^2 + x + 1"))
                .unwrap()
                .log_value
                .abs()
                < 1e-10
        );
    }

    #[test]
    fn cyclotomic_product_vanishes() {
        let p = uni("x^3 (x^2 + x + 1) (x + 1)");
        assert!(mahler_univariate(&p).unwrap().log_value.abs() < 1e-10);
    }

    #[test]
    fn multiplicative() {
        let (a, b) = (uni("3x^3 - x + 2"), uni("x^4 - 5x^2 + x + 1"));
        let ma = mahler_univariate(&a).unwrap().log_value;
        let mb = mahler_univariate(&b).unwrap().log_value;
        let mab = mahler_univariate(&a.mul(&b)).unwrap().log_value;
        assert!((mab - ma - mb).abs() < 1e-10);
    }

    #[test]
    fn torus_examples() {
        let spec = QuadratureSpec::monte_carlo(1 << 14, 7);
        let mono = mahler_torus(&parse_poly("x", None).unwrap(), &spec).unwrap();
        assert!(mono.log_value.abs() < 1e-14);
        let two = mahler_torus(&parse_poly("x - 2", None).unwrap(), &spec).unwrap();
        assert!((two.log_value - 2f64.ln()).abs() < 3.0 * two.std_error + 1e-12);
        let e = mahler_torus(&parse_poly("1+x+y", None).unwrap(), &spec).unwrap();
        assert!((e.log_value - 0.3230659).abs() < 4.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn comparison() {
        let spec = QuadratureSpec::monte_carlo(1 << 14, 1);
        let cmp = compare_measures(&parse_poly("3+x+y", None).unwrap(), &spec).unwrap();
        assert!(cmp.mahler.unwrap().log_value > 1.0);
        assert_eq!(cmp.c.unwrap().value, 0.0);

        let lehmer = compare_measures(&parse_poly(LEHMER, None).unwrap(), &spec).unwrap();
        assert!((lehmer.mahler.unwrap().log_value - 0.162_357_612).abs() < 1e-8);
        assert_eq!(
            lehmer.c,
            Err(Error::UnimodularRoots(RootCounts {
                inside: 1,
                unimodular: 8,
                outside: 1
            }))
        );
    }
}
