//! Polynomial representation shared by every measure in the crate.
//!
//! [`MultiPoly`] is a sparse map from exponent vectors to complex
//! coefficients; [`UniPoly`] is a dense coefficient list used once a
//! polynomial has been reduced to one variable, either by freezing the other
//! variables on the torus ([`MultiPoly::slice_univariate`]) or by the power
//! substitution `x_j -> x_1^{n_j}` ([`MultiPoly::substitute_powers`]).

mod parse;
mod uni;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use parse::parse_poly;
pub use uni::{Reciprocal, UniPoly};

/// Largest exponent accepted for a single variable.
pub const MAX_EXPONENT: u64 = 1_000_000;
/// Largest degree produced by [`MultiPoly::substitute_powers`].
pub const MAX_SUBSTITUTED_DEGREE: u64 = 10_000_000;
/// Slice leading coefficients below this fraction of the largest term
/// coefficient are treated as zero.
pub const SLICE_TRIM_RELATIVE: f64 = 1e-12;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(exponents: Vec<u32>) -> Self {
        ExponentVector(exponents)
    }

    pub fn zeros(len: usize) -> Self {
        ExponentVector(vec![0; len])
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

impl Deref for ExponentVector {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

/// A point `(e^{2πi t_1}, …, e^{2πi t_k})` of the unit torus, stored by its
/// angles `t_i ∈ [0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    angles: Vec<f64>,
}

impl TorusPoint {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if let Some(bad) = angles.iter().find(|t| !(0.0..1.0).contains(*t)) {
            return Err(Error::InvalidArgument(format!(
                "torus angle {bad} outside [0, 1)"
            )));
        }
        Ok(TorusPoint { angles })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn coordinates(&self) -> Vec<Complex64> {
        self.angles.iter().map(|&t| unit(t)).collect()
    }
}

/// `e^{2πi t}`.
#[inline]
pub fn unit(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// Sparse multivariate polynomial with complex coefficients.
///
/// Terms live in a `BTreeMap`, so iteration order (and everything derived
/// from it, including printing) is deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<ExponentVector, Complex64>,
}

impl MultiPoly {
    /// The zero polynomial over the given variables.
    pub fn zero(vars: Vec<String>) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Vec<String>, c: Complex64) -> Self {
        let k = vars.len();
        let mut p = MultiPoly::zero(vars);
        p.add_term(ExponentVector::zeros(k), c);
        p
    }

    /// The polynomial `x_j`.
    pub fn variable(vars: Vec<String>, j: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[j] = 1;
        let mut p = MultiPoly::zero(vars);
        p.add_term(ExponentVector(e), Complex64::new(1.0, 0.0));
        p
    }

    pub fn from_terms<I>(vars: Vec<String>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let mut p = MultiPoly::zero(vars);
        for (e, c) in terms {
            if e.len() != p.vars.len() {
                return Err(Error::InvalidArgument(format!(
                    "exponent vector of length {} for {} variables",
                    e.len(),
                    p.vars.len()
                )));
            }
            if let Some(&big) = e.iter().find(|&&x| x as u64 > MAX_EXPONENT) {
                return Err(Error::ExponentOverflow(big as u64));
            }
            p.add_term(ExponentVector(e), c);
        }
        Ok(p)
    }

    pub fn parse(source: &str) -> Result<Self> {
        parse_poly(source, None)
    }

    fn add_term(&mut self, e: ExponentVector, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let slot = self.terms.entry(e).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        if *slot == Complex64::new(0.0, 0.0) {
            // Drop exact cancellations so no stored coefficient is zero.
            self.terms.retain(|_, v| *v != Complex64::new(0.0, 0.0));
        }
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponents: &[u32]) -> Complex64 {
        self.terms
            .get(&ExponentVector(exponents.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ |c|`, which bounds `|P|` everywhere on the torus.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// True when every coefficient is a real integer.
    pub fn has_integer_coefficients(&self) -> bool {
        self.terms
            .values()
            .all(|c| c.im == 0.0 && c.re.fract() == 0.0)
    }

    fn check_var(&self, j: usize) -> Result<()> {
        if j >= self.vars.len() {
            return Err(Error::InvalidArgument(format!(
                "variable index {j} out of range for {} variables",
                self.vars.len()
            )));
        }
        Ok(())
    }

    /// Largest exponent of `x_j` over all terms.
    pub fn degree_in(&self, j: usize) -> Result<u32> {
        self.check_var(j)?;
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.terms.keys().map(|e| e[j]).max().unwrap_or(0))
    }

    pub fn partial_derivative(&self, j: usize) -> Result<MultiPoly> {
        self.check_var(j)?;
        let mut out = MultiPoly::zero(self.vars.clone());
        for (e, &c) in &self.terms {
            if e[j] == 0 {
                continue;
            }
            let mut d = e.0.clone();
            d[j] -= 1;
            out.add_term(ExponentVector(d), c * e[j] as f64);
        }
        Ok(out)
    }

    /// Evaluates at `z`, Horner-style in the first variable: terms are sorted
    /// lexicographically, so equal leading exponents are contiguous.
    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.vars.len(), "point dimension mismatch");
        let zero = Complex64::new(0.0, 0.0);
        if self.vars.is_empty() {
            return self.terms.values().copied().sum();
        }
        let mut acc = zero;
        let mut prev: Option<u32> = None;
        let mut group = zero;
        // Walk groups from the highest leading exponent down.
        for (e, &c) in self.terms.iter().rev() {
            let lead = e[0];
            match prev {
                Some(p) if p == lead => {}
                Some(p) => {
                    acc = (acc + group) * z[0].powu(p - lead);
                    group = zero;
                }
                None => {}
            }
            prev = Some(lead);
            let mut m = c;
            for (zi, &ei) in z[1..].iter().zip(&e[1..]) {
                if ei != 0 {
                    m *= zi.powu(ei);
                }
            }
            group += m;
        }
        if let Some(p) = prev {
            acc = (acc + group) * z[0].powu(p);
        }
        acc
    }

    /// Evaluates on the torus at the given angles.
    pub fn evaluate_at_angles(&self, t: &[f64]) -> Complex64 {
        let z: Vec<Complex64> = t.iter().map(|&a| unit(a)).collect();
        self.evaluate(&z)
    }

    /// `P(x, x^{n_2}, …, x^{n_k})` as a dense univariate polynomial.
    pub fn substitute_powers(&self, n: &[u64]) -> Result<UniPoly> {
        self.substitute_powers_capped(n, MAX_SUBSTITUTED_DEGREE)
    }

    pub fn substitute_powers_capped(&self, n: &[u64], cap: u64) -> Result<UniPoly> {
        let k = self.vars.len();
        if k == 0 || n.len() != k - 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} substitution exponents, got {}",
                k.saturating_sub(1),
                n.len()
            )));
        }
        if n.contains(&0) {
            return Err(Error::InvalidArgument(
                "substitution exponents must be at least 1".into(),
            ));
        }
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let target = |e: &ExponentVector| -> u64 {
            e[0] as u64
                + n.iter()
                    .zip(&e[1..])
                    .map(|(&nj, &ej)| nj.saturating_mul(ej as u64))
                    .fold(0u64, u64::saturating_add)
        };
        let degree = self.terms.keys().map(target).max().unwrap_or(0);
        if degree > cap {
            return Err(Error::DegreeOverflow { degree, cap });
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); degree as usize + 1];
        for (e, &c) in &self.terms {
            coeffs[target(e) as usize] += c;
        }
        UniPoly::new(coeffs)
    }

    /// Coefficients of `P` as a polynomial in `x_j`, each coefficient being a
    /// polynomial in the remaining variables.
    pub fn slice_plan(&self, j: usize) -> Result<SlicePlan> {
        let degree = self.degree_in(j)? as usize;
        let mut groups: Vec<Vec<(Vec<u32>, Complex64)>> = vec![Vec::new(); degree + 1];
        for (e, &c) in &self.terms {
            let outer: Vec<u32> = e
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &x)| x)
                .collect();
            groups[e[j] as usize].push((outer, c));
        }
        Ok(SlicePlan {
            groups,
            outer_dim: self.vars.len() - 1,
            threshold: SLICE_TRIM_RELATIVE * self.max_coeff(),
        })
    }

    /// Freezes every variable except `x_j` at a torus point.
    pub fn slice_univariate(&self, j: usize, outer: &TorusPoint) -> Result<Slice> {
        self.slice_plan(j)?.slice(outer.angles())
    }

    pub fn scale(&self, c: Complex64) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars.clone());
        for (e, &v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    fn assert_same_vars(&self, other: &MultiPoly) {
        assert_eq!(
            self.vars, other.vars,
            "polynomials over different variable lists"
        );
    }
}

/// Precomputed grouping of a polynomial by powers of one variable.
#[derive(Clone, Debug)]
pub struct SlicePlan {
    groups: Vec<Vec<(Vec<u32>, Complex64)>>,
    outer_dim: usize,
    threshold: f64,
}

/// A univariate slice together with the number of leading coefficients that
/// fell below the trim threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    pub poly: UniPoly,
    pub trimmed: usize,
}

impl SlicePlan {
    /// Generic degree `d_j` of the sliced variable.
    pub fn degree(&self) -> usize {
        self.groups.len() - 1
    }

    pub fn outer_dim(&self) -> usize {
        self.outer_dim
    }

    /// Raw (untrimmed) slice coefficients at the outer angles.
    pub fn coefficients(&self, outer_angles: &[f64]) -> Vec<Complex64> {
        assert_eq!(outer_angles.len(), self.outer_dim, "outer point dimension");
        let z: Vec<Complex64> = outer_angles.iter().map(|&t| unit(t)).collect();
        self.groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|(e, c)| {
                        e.iter()
                            .zip(&z)
                            .filter(|(&ei, _)| ei != 0)
                            .fold(*c, |acc, (&ei, zi)| acc * zi.powu(ei))
                    })
                    .sum()
            })
            .collect()
    }

    pub fn slice(&self, outer_angles: &[f64]) -> Result<Slice> {
        let mut coeffs = self.coefficients(outer_angles);
        let mut trimmed = 0;
        while coeffs.last().is_some_and(|c| c.norm() < self.threshold) {
            coeffs.pop();
            trimmed += 1;
        }
        if coeffs.is_empty() {
            return Err(Error::SliceZero);
        }
        Ok(Slice {
            poly: UniPoly::new(coeffs)?,
            trimmed,
        })
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.assert_same_vars(rhs);
        let mut out = MultiPoly::zero(self.vars.clone());
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(ExponentVector(e), ca * cb);
            }
        }
        out
    }
}

fn fmt_real(x: f64) -> String {
    format!("{x}")
}

impl fmt::Display for MultiPoly {
    /// Prints in a form the parser reads back to the identical term map.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let monomial: Vec<String> = e
                .iter()
                .zip(&self.vars)
                .filter(|(&ei, _)| ei > 0)
                .map(|(&ei, v)| {
                    if ei == 1 {
                        v.clone()
                    } else {
                        format!("{v}^{ei}")
                    }
                })
                .collect();
            let monomial = monomial.join("*");
            let (negative, body) = if c.im == 0.0 {
                let mag = c.re.abs();
                let body = match (monomial.is_empty(), mag == 1.0) {
                    (true, _) => fmt_real(mag),
                    (false, true) => monomial.clone(),
                    (false, false) => format!("{}*{}", fmt_real(mag), monomial),
                };
                (c.re < 0.0, body)
            } else {
                let sign = if c.im < 0.0 { '-' } else { '+' };
                let z = format!("({}{}{}i)", fmt_real(c.re), sign, fmt_real(c.im.abs()));
                let body = if monomial.is_empty() {
                    z
                } else {
                    format!("{z}*{monomial}")
                };
                (false, body)
            };
            match (idx, negative) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn degree_examples() {
        let p = MultiPoly::parse("1+x+y").unwrap();
        assert_eq!(p.degree_in(1).unwrap(), 1);
        let q = MultiPoly::parse("x*y+x+1").unwrap();
        assert_eq!(q.degree_in(0).unwrap(), 1);
        let r = MultiPoly::parse("(1+x)*y^2+x*y").unwrap();
        assert_eq!(r.degree_in(1).unwrap(), 2);
        assert_eq!(
            MultiPoly::zero(vec!["x".into()]).degree_in(0),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn derivative_examples() {
        let p = MultiPoly::parse("1+x+y").unwrap();
        assert_eq!(
            p.partial_derivative(1).unwrap(),
            MultiPoly::constant(p.var_names().to_vec(), c(1.0))
        );
        let q = MultiPoly::parse("x*y+x+1").unwrap();
        assert_eq!(
            q.partial_derivative(1).unwrap(),
            MultiPoly::variable(q.var_names().to_vec(), 0)
        );
        let r = MultiPoly::parse("y^2 + 3y").unwrap();
        assert_eq!(
            r.partial_derivative(0).unwrap(),
            parse_poly("2y+3", Some(&["y"])).unwrap()
        );
    }

    #[test]
    fn evaluate_examples() {
        let p = MultiPoly::parse("1+x+y").unwrap();
        assert_eq!(p.evaluate(&[c(1.0), c(1.0)]), c(3.0));
        let w = unit(1.0 / 3.0);
        assert!(p.evaluate(&[w, w.conj()]).norm() < 1e-15);
        let q = MultiPoly::parse("x*y+x+1").unwrap();
        assert_eq!(q.evaluate(&[c(2.0), c(3.0)]), c(9.0));
    }

    #[test]
    fn substitute_examples() {
        let p = MultiPoly::parse("1+x+y").unwrap();
        let u = p.substitute_powers(&[7]).unwrap();
        assert_eq!(u.degree(), 7);
        assert_eq!(u.coeffs()[0], c(1.0));
        assert_eq!(u.coeffs()[1], c(1.0));
        assert_eq!(u.coeffs()[7], c(1.0));

        let q = MultiPoly::parse("x*y+x+1").unwrap();
        let u = q.substitute_powers(&[5]).unwrap();
        assert_eq!(u.degree(), 6);
        assert_eq!(
            u,
            UniPoly::from_real(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap()
        );

        let r = MultiPoly::parse("1+x+y+z").unwrap();
        let u = r.substitute_powers(&[3, 5]).unwrap();
        assert_eq!(
            u,
            UniPoly::from_real(&[1.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap()
        );

        assert!(matches!(
            r.substitute_powers(&[3, 20_000_000]),
            Err(Error::DegreeOverflow { .. })
        ));
        assert!(r.substitute_powers(&[0, 3]).is_err());
    }

    #[test]
    fn slice_examples() {
        let p = MultiPoly::parse("1+x+y").unwrap();
        let s = p
            .slice_univariate(1, &TorusPoint::new(vec![0.0]).unwrap())
            .unwrap();
        assert_eq!(s.poly, UniPoly::from_real(&[2.0, 1.0]).unwrap());
        assert_eq!(s.trimmed, 0);

        let s = p
            .slice_univariate(1, &TorusPoint::new(vec![0.5]).unwrap())
            .unwrap();
        assert_eq!(s.poly.degree(), 1);
        assert!(s.poly.coeffs()[0].norm() < 1e-15);

        let r = MultiPoly::parse("1+x+y+z").unwrap();
        let s = r
            .slice_univariate(2, &TorusPoint::new(vec![1.0 / 3.0, 2.0 / 3.0]).unwrap())
            .unwrap();
        assert_eq!(s.poly.degree(), 1);
        assert!(s.poly.coeffs()[0].norm() < 1e-15);
    }

    #[test]
    fn slice_trims_vanishing_leading_coefficient() {
        // (1+x) y^2 + y + 1 at x = -1 drops to degree 1.
        let p = MultiPoly::parse("(1+x)*y^2 + y + 1").unwrap();
        let s = p
            .slice_univariate(1, &TorusPoint::new(vec![0.5]).unwrap())
            .unwrap();
        assert_eq!(s.trimmed, 1);
        assert_eq!(s.poly.degree(), 1);

        let z = MultiPoly::parse("(1+x)*y").unwrap();
        assert_eq!(
            z.slice_univariate(1, &TorusPoint::new(vec![0.5]).unwrap()),
            Err(Error::SliceZero)
        );
    }

    #[test]
    fn torus_point_rejects_out_of_range() {
        assert!(TorusPoint::new(vec![1.0]).is_err());
        assert!(TorusPoint::new(vec![-0.1]).is_err());
        assert!(TorusPoint::new(vec![0.0, 0.999]).is_ok());
    }

    #[test]
    fn display_round_trips_complex_and_decimal() {
        let p = parse_poly("(0.5-2i)*x^3 - 1/3*y + 7 - x*y", None).unwrap();
        let printed = p.to_string();
        let again = parse_poly(&printed, Some(&["x", "y"])).unwrap();
        assert_eq!(p, again, "{printed}");
    }
}
