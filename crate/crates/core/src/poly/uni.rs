use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense univariate polynomial, coefficients ascending from degree 0.
///
/// The leading coefficient is always nonzero; the zero polynomial is not
/// representable.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Complex64>,
}

/// Result of [`UniPoly::reciprocal`].
#[derive(Clone, Debug, PartialEq)]
pub struct Reciprocal {
    pub poly: UniPoly,
    /// How far the degree fell below the original degree; nonzero exactly
    /// when the constant term was zero.
    pub degree_drop: usize,
}

impl Reciprocal {
    pub fn is_exact(&self) -> bool {
        self.degree_drop == 0
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        while coeffs
            .last()
            .is_some_and(|c| *c == Complex64::new(0.0, 0.0))
        {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(UniPoly { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        UniPoly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.im == 0.0 && c.re.fract() == 0.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(P(z), P'(z))` in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Option<UniPoly> {
        let d: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        UniPoly::new(d).ok()
    }

    /// `x^d P(1/x)`: the coefficient list reversed.
    pub fn reciprocal(&self) -> Reciprocal {
        let rev: Vec<Complex64> = self.coeffs.iter().rev().copied().collect();
        let poly = UniPoly::new(rev).expect("reversal of a nonzero polynomial is nonzero");
        let degree_drop = self.degree() - poly.degree();
        Reciprocal { poly, degree_drop }
    }

    pub fn scale(&self, c: Complex64) -> Result<UniPoly> {
        UniPoly::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Exact convolution product.
    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out).expect("product of nonzero polynomials")
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            match i {
                0 => {}
                1 => write!(f, "*x")?,
                _ => write!(f, "*x^{i}")?,
            }
        }
        Ok(())
    }
}
