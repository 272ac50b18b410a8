//! Root-ratio measure `c(P)`: the fraction of a polynomial's zeros inside the
//! unit disk, generalised to several variables as a torus average of slice
//! zero counts, with a reference logarithmic Mahler measure alongside.

pub mod boyd_lawton;
pub mod cli;
pub mod error;
pub mod mahler;
pub mod poly;
pub mod sampling;
pub mod torus;
pub mod uniroot;

pub use error::{Error, Result, RootCounts};
pub use poly::{parse_poly, ExponentVector, MultiPoly, TorusPoint, UniPoly};
pub use sampling::{Method, QuadratureSpec};
pub use torus::MeasureEstimate;
