//! Sample points on the unit torus and a reproducible parallel integrator.
//!
//! Every sample is addressed by its index: Monte Carlo points come from a
//! ChaCha stream selected by `(seed, index)`, lattice points from the index
//! arithmetic plus a seeded shift, and tensor points from the index digits.
//! Per-sample values are collected in index order and reduced sequentially,
//! so a given [`QuadratureSpec`] produces bit-identical results for any
//! worker count.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Independent random shifts used by the shifted-lattice rule.
pub const LATTICE_SHIFTS: usize = 16;
/// Highest dimension the tensor grid is offered for.
pub const TENSOR_MAX_DIM: usize = 3;
const KOROBOV_CANDIDATES: usize = 64;
const SHIFT_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    TensorTrapezoid,
    ShiftedLattice,
    JitteredMonteCarlo,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::TensorTrapezoid => "tensor-trapezoid",
            Method::ShiftedLattice => "shifted-lattice",
            Method::JitteredMonteCarlo => "jittered-monte-carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tensor-trapezoid" | "tensor" => Ok(Method::TensorTrapezoid),
            "shifted-lattice" | "lattice" => Ok(Method::ShiftedLattice),
            "jittered-monte-carlo" | "monte-carlo" | "mc" => Ok(Method::JitteredMonteCarlo),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// Sampling method, sizes, seed and tolerances for a torus integral.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub method: Method,
    pub total_samples: usize,
    /// Grid size per dimension for [`Method::TensorTrapezoid`].
    pub nodes_per_dim: usize,
    pub seed: u64,
    /// Slices with a root in `||α| - 1| < circle_band_delta` are resampled.
    pub circle_band_delta: f64,
    pub max_discard_fraction: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            method: Method::JitteredMonteCarlo,
            total_samples: 1 << 16,
            nodes_per_dim: 16,
            seed: 0,
            circle_band_delta: 1e-7,
            max_discard_fraction: 0.01,
        }
    }
}

impl QuadratureSpec {
    pub fn monte_carlo(total_samples: usize, seed: u64) -> Self {
        QuadratureSpec {
            total_samples,
            seed,
            ..Default::default()
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.total_samples < 16 {
            return bad(format!("total_samples {} < 16", self.total_samples));
        }
        if self.nodes_per_dim < 4 {
            return bad(format!("nodes_per_dim {} < 4", self.nodes_per_dim));
        }
        if !(self.circle_band_delta > 0.0 && self.circle_band_delta <= 1e-3) {
            return bad(format!(
                "circle_band_delta {} outside (0, 1e-3]",
                self.circle_band_delta
            ));
        }
        if !(self.max_discard_fraction > 0.0 && self.max_discard_fraction < 0.5) {
            return bad(format!(
                "max_discard_fraction {} outside (0, 0.5)",
                self.max_discard_fraction
            ));
        }
        Ok(())
    }
}

/// Index-addressed sample points in `[0, 1)^dim`.
#[derive(Clone, Debug)]
pub struct PointSet {
    method: Method,
    dim: usize,
    len: usize,
    seed: u64,
    nodes_per_dim: usize,
    lattice: Option<Lattice>,
}

#[derive(Clone, Debug)]
struct Lattice {
    per_shift: usize,
    generator: Vec<u64>,
    shifts: Vec<Vec<f64>>,
}

impl PointSet {
    pub fn new(spec: &QuadratureSpec, dim: usize) -> Result<Self> {
        spec.validate()?;
        let mut set = PointSet {
            method: spec.method,
            dim,
            len: spec.total_samples,
            seed: spec.seed,
            nodes_per_dim: spec.nodes_per_dim,
            lattice: None,
        };
        if dim == 0 {
            set.len = 1;
            return Ok(set);
        }
        match spec.method {
            Method::JitteredMonteCarlo => {}
            Method::TensorTrapezoid => {
                if dim > TENSOR_MAX_DIM {
                    return Err(Error::InvalidArgument(format!(
                        "tensor-trapezoid supports at most {TENSOR_MAX_DIM} dimensions, got {dim}"
                    )));
                }
                set.len = spec.nodes_per_dim.pow(dim as u32);
            }
            Method::ShiftedLattice => {
                let per_shift = (spec.total_samples / LATTICE_SHIFTS).max(1);
                let generator = korobov_generator(per_shift, dim);
                let shifts = (0..LATTICE_SHIFTS)
                    .map(|s| {
                        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ SHIFT_SEED_SALT);
                        rng.set_stream(s as u64);
                        (0..dim).map(|_| rng.gen::<f64>()).collect()
                    })
                    .collect();
                set.len = per_shift * LATTICE_SHIFTS;
                set.lattice = Some(Lattice {
                    per_shift,
                    generator,
                    shifts,
                });
            }
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Base point for sample `index`.
    pub fn point(&self, index: usize, out: &mut [f64]) {
        match self.method {
            Method::JitteredMonteCarlo => {
                let mut rng = self.sample_rng(index);
                out.iter_mut().for_each(|t| *t = rng.gen::<f64>());
            }
            Method::TensorTrapezoid => {
                let m = self.nodes_per_dim;
                let mut rest = index;
                for t in out.iter_mut() {
                    *t = ((rest % m) as f64 + 0.5) / m as f64;
                    rest /= m;
                }
            }
            Method::ShiftedLattice => {
                let lat = self.lattice.as_ref().expect("lattice initialised");
                let (shift, r) = (index / lat.per_shift, index % lat.per_shift);
                for (d, t) in out.iter_mut().enumerate() {
                    let base = ((r as u128 * lat.generator[d] as u128) % lat.per_shift as u128)
                        as f64
                        / lat.per_shift as f64;
                    *t = wrap(base + lat.shifts[shift][d]);
                }
            }
        }
    }

    /// Random generator owned by sample `index`; used for Monte Carlo points
    /// and for the jitter of retried samples under every method.
    fn sample_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    /// Which group a sample belongs to for error estimation.
    fn group(&self, index: usize) -> usize {
        match &self.lattice {
            Some(lat) => index / lat.per_shift,
            None => 0,
        }
    }
}

fn wrap(t: f64) -> f64 {
    let f = t - t.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Korobov generating vector `(1, a, a², …) mod n` with `a` picked from a
/// fixed candidate list by the smallest P₂ figure of merit.
fn korobov_generator(n: usize, dim: usize) -> Vec<u64> {
    let n64 = n as u64;
    let vector = |a: u64| -> Vec<u64> {
        let mut g = Vec::with_capacity(dim);
        let mut cur = 1 % n64.max(1);
        for _ in 0..dim {
            g.push(cur);
            cur = (cur as u128 * a as u128 % n64 as u128) as u64;
        }
        g
    };
    if dim <= 1 || n < 4 {
        return vector(1);
    }
    let p2 = |g: &[u64]| -> f64 {
        let two_pi_sq = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
        let mut total = 0.0;
        for r in 0..n64 {
            let mut prod = 1.0;
            for &gd in g {
                let x = ((r as u128 * gd as u128) % n64 as u128) as f64 / n as f64;
                prod *= 1.0 + two_pi_sq * (x * x - x + 1.0 / 6.0);
            }
            total += prod;
        }
        total / n as f64 - 1.0
    };
    let half = (n64 / 2).max(2);
    let step = (half / KOROBOV_CANDIDATES as u64).max(1);
    let mut best: Option<(f64, Vec<u64>)> = None;
    let mut a = 2;
    while a < n64 && a <= half {
        if gcd(a, n64) == 1 {
            let g = vector(a);
            let score = p2(&g);
            if best.as_ref().is_none_or(|(s, _)| score < *s) {
                best = Some((score, g));
            }
        }
        a += step;
    }
    best.map(|(_, g)| g).unwrap_or_else(|| vector(1))
}

/// What a per-sample integrand reports.
#[derive(Clone, Debug)]
pub(crate) enum Sample {
    Value(Complex64),
    /// Retry with fresh jitter; discard if retries run out.
    Reject,
    /// Retry with fresh jitter; fail with the error if retries run out.
    RejectFatal(Error),
}

/// Outcome of [`integrate`].
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Integral {
    pub mean: Complex64,
    pub std_error: f64,
    pub samples_used: usize,
    pub discarded_fraction: f64,
}

/// Averages `f` over the point set with the retry-then-discard policy.
pub(crate) fn integrate<F>(
    spec: &QuadratureSpec,
    dim: usize,
    max_retries: usize,
    f: F,
) -> Result<Integral>
where
    F: Fn(&[f64]) -> Result<Sample> + Sync,
{
    let points = PointSet::new(spec, dim)?;
    let evaluate = |index: usize| -> Result<Option<Complex64>> {
        let mut t = vec![0.0; dim];
        points.point(index, &mut t);
        let mut rng: Option<ChaCha8Rng> = None;
        let mut attempt = 0;
        loop {
            match f(&t)? {
                Sample::Value(v) => return Ok(Some(v)),
                Sample::Reject if attempt >= max_retries => return Ok(None),
                Sample::RejectFatal(e) if attempt >= max_retries => return Err(e),
                Sample::Reject | Sample::RejectFatal(_) => {
                    attempt += 1;
                    let rng = rng.get_or_insert_with(|| {
                        let mut r = points.sample_rng(index);
                        // Skip past the draws the base point may have used.
                        for _ in 0..dim {
                            r.gen::<f64>();
                        }
                        r
                    });
                    t.iter_mut().for_each(|x| *x = rng.gen::<f64>());
                }
            }
        }
    };
    let values: Vec<Option<Complex64>> = (0..points.len())
        .into_par_iter()
        .map(evaluate)
        .collect::<Result<_>>()?;

    let total = values.len();
    let kept = values.iter().flatten().count();
    let discarded_fraction = (total - kept) as f64 / total as f64;
    if discarded_fraction > spec.max_discard_fraction || kept == 0 {
        return Err(Error::DiscardBudget {
            fraction: discarded_fraction,
            limit: spec.max_discard_fraction,
        });
    }

    let mut sum = Complex64::new(0.0, 0.0);
    for v in values.iter().flatten() {
        sum += v;
    }
    let mean = sum / kept as f64;

    let std_error = match (spec.method, dim) {
        (_, 0) | (Method::TensorTrapezoid, _) => 0.0,
        (Method::JitteredMonteCarlo, _) => {
            if kept < 2 {
                0.0
            } else {
                let ss: f64 = values
                    .iter()
                    .flatten()
                    .map(|v| (v.re - mean.re).powi(2))
                    .sum();
                (ss / (kept - 1) as f64).sqrt() / (kept as f64).sqrt()
            }
        }
        (Method::ShiftedLattice, _) => {
            let mut sums = vec![(0.0, 0usize); LATTICE_SHIFTS];
            for (i, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    let g = points.group(i);
                    sums[g].0 += v.re;
                    sums[g].1 += 1;
                }
            }
            let means: Vec<f64> = sums
                .iter()
                .filter(|(_, c)| *c > 0)
                .map(|(s, c)| s / *c as f64)
                .collect();
            let q = means.len();
            if q < 2 {
                0.0
            } else {
                let mu = means.iter().sum::<f64>() / q as f64;
                let ss: f64 = means.iter().map(|m| (m - mu).powi(2)).sum();
                (ss / (q - 1) as f64).sqrt() / (q as f64).sqrt()
            }
        }
    };

    Ok(Integral {
        mean,
        std_error,
        samples_used: kept,
        discarded_fraction,
    })
}

/// Runs `f` on a dedicated pool with `threads` workers, or on the global
/// pool when `threads` is `None`.
pub fn with_threads<R, F>(threads: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match threads {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}
