//! Acceptance checks, one line per criterion. Run with
//! `cargo test --test acceptance`; the process fails if any criterion fails.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rootratio::boyd_lawton::{
    c_substituted, convergence_table, limit_prediction, simplex_polynomial,
};
use rootratio::mahler::{mahler_torus, mahler_univariate};
use rootratio::sampling::with_threads;
use rootratio::torus::{c_default, c_j_slice, trinomial_closed_form};
use rootratio::uniroot::{c_exact, root_report, winding_count, DEFAULT_DELTA};
use rootratio::{parse_poly, MultiPoly, QuadratureSpec, UniPoly};

const LEHMER: &str = "x^10 + x^9 - x^7 - x^6 - x^5 - x^4 - x^3 + x + 1";

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn poly(s: &str) -> MultiPoly {
    parse_poly(s, None).expect("valid polynomial")
}

fn mc(log2: u32, seed: u64) -> QuadratureSpec {
    QuadratureSpec::monte_carlo(1 << log2, seed)
}

/// `L(χ₋₃, 2) = Σ_k [1/(3k+1)² - 1/(3k+2)²]` by direct partial sums; the
/// paired terms decay like `k⁻³`, so the tail past 2·10⁶ is below 1e-13.
fn l_chi3_2() -> f64 {
    (0..2_000_000u64)
        .rev()
        .map(|k| {
            let (a, b) = ((3 * k + 1) as f64, (3 * k + 2) as f64);
            1.0 / (a * a) - 1.0 / (b * b)
        })
        .sum()
}

/// `ζ(3)` by direct partial sums, smallest terms first.
fn zeta3() -> f64 {
    let n = 2_000_000u64;
    (1..=n).rev().map(|k| 1.0 / (k as f64).powi(3)).sum()
}

fn log_measure_of_linear_trinomial() -> f64 {
    3.0 * 3f64.sqrt() / (4.0 * PI) * l_chi3_2()
}

fn zeta_value() -> f64 {
    7.0 * zeta3() / (2.0 * PI * PI)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let e = c_j_slice(&poly("1+x+y"), 1, &mc(16, 0)).unwrap();
    let t = start.elapsed();
    let dev = (e.value - 1.0 / 3.0).abs();
    let pass = dev <= 5e-3 && dev <= 3.0 * e.std_error && t <= Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "c(1+x+y) slice 2^16: value {:.6} σ {:.2e} |Δ| {:.2e} time {:.2?}",
            e.value, e.std_error, dev, t
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for a in [0.5, 1.0, 1.5] {
        let e = c_default(&poly(&format!("{a}+x+y")), &mc(18, 1)).unwrap();
        let target = (a / 2.0f64).acos() / PI;
        let dev = (e.value - target).abs();
        pass &= dev <= 5e-3 && (trinomial_closed_form(a) - target).abs() < 1e-15;
        parts.push(format!("a={a}: {:.5} vs {:.5}", e.value, target));
    }
    outcome(pass, format!("c(a+x+y) 2^18: {}", parts.join(", ")))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let e = c_j_slice(&poly("1+x+y+z"), 2, &mc(18, 2)).unwrap();
    let t = start.elapsed();
    let dev = (e.value - 0.25).abs();
    let pass = dev <= 8e-3 && t <= Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "c(1+x+y+z) slice 2^18: value {:.6} |Δ| {:.2e} time {:.2?}",
            e.value, dev, t
        ),
    )
}

fn criterion_4() -> Outcome {
    let p = poly("x*y+x+1");
    let cx = c_j_slice(&p, 0, &mc(18, 3)).unwrap();
    let cy = c_j_slice(&p, 1, &mc(18, 3)).unwrap();
    let pass = (cx.value - 2.0 / 3.0).abs() <= 5e-3 && (cy.value - 1.0 / 3.0).abs() <= 5e-3;
    outcome(
        pass,
        format!(
            "xy+x+1: c_x {:.5} (2/3), c_y {:.5} (1/3)",
            cx.value, cy.value
        ),
    )
}

fn criterion_5() -> Outcome {
    let p = poly("1+x+y+z");
    let pred = limit_prediction(&p, &mc(18, 4)).unwrap();
    let pred_ok = (pred.value - 0.5).abs() <= 8e-3;
    let schedule = vec![vec![10, 100], vec![20, 400], vec![40, 1600]];
    let table = convergence_table(&p, &schedule, &mc(10, 4)).unwrap();
    let devs: Vec<f64> = table
        .rows
        .iter()
        .map(|r| (r.ratio_inside - 0.5).abs())
        .collect();
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    let final_ok = *devs.last().unwrap() <= 0.05;
    let rows: Vec<String> = table
        .rows
        .iter()
        .map(|r| {
            format!(
                "({};{}) {}/{}",
                r.exponents[0], r.exponents[1], r.inside, r.degree
            )
        })
        .collect();
    outcome(
        pred_ok && decreasing && final_ok,
        format!(
            "prediction {:.5} ± {:.1e} [{}]; rows {} |ratio-0.5| {:?} [decreasing {}, final within 0.05 {}]",
            pred.value,
            pred.std_error,
            if pred_ok { "ok" } else { "off" },
            rows.join(", "),
            devs.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>(),
            decreasing,
            final_ok
        ),
    )
}

fn criterion_6() -> Outcome {
    let target = (-0.5f64).acos() / PI;
    let p = poly("1+x+y");
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [500u64, 1000, 2000] {
        let row = c_substituted(&p, &[n]).unwrap();
        pass &= (row.ratio_outside - target).abs() <= 0.02;
        parts.push(format!("n={n}: {:.4}", row.ratio_outside));
    }
    outcome(
        pass,
        format!("x^n+x+1 ratio_outside vs {target:.4}: {}", parts.join(", ")),
    )
}

fn criterion_7() -> Outcome {
    let uni = poly(LEHMER).substitute_powers(&[]).unwrap();
    let m = mahler_univariate(&uni).unwrap();
    let r = root_report(&uni, 1e-9).unwrap();
    let triple = (r.inside, r.unimodular, r.outside);
    let pass = (m.log_value - 0.162_357_612).abs() <= 1e-8 && triple == (1, 8, 1);
    outcome(
        pass,
        format!("Lehmer: m = {:.10}, triple {:?}", m.log_value, triple),
    )
}

fn criterion_8() -> Outcome {
    let trinomial_ref = log_measure_of_linear_trinomial();
    let zeta = zeta_value();
    let a = mahler_torus(&poly("1+x+y"), &mc(22, 5)).unwrap();
    let b = mahler_torus(&poly("1+x+y+z"), &mc(22, 6)).unwrap();
    let pass = (a.log_value - trinomial_ref).abs() <= 1e-3 && (b.log_value - zeta).abs() <= 2e-3;
    outcome(
        pass,
        format!(
            "m(1+x+y) {:.5} vs {:.7} (σ {:.1e}); m(1+x+y+z) {:.5} vs {:.7} (σ {:.1e})",
            a.log_value, trinomial_ref, a.std_error, b.log_value, zeta, b.std_error
        ),
    )
}

fn random_complex_poly(rng: &mut ChaCha8Rng) -> UniPoly {
    let degree = rng.gen_range(1..=40);
    let mut c: Vec<Complex64> = (0..=degree)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    if c[degree].norm() < 1e-3 {
        c[degree] = Complex64::new(1.0, 0.0);
    }
    UniPoly::new(c).unwrap()
}

fn random_integer_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> UniPoly {
    let degree = rng.gen_range(1..=max_degree);
    let mut c: Vec<f64> = (0..=degree)
        .map(|_| rng.gen_range(-6i32..=6) as f64)
        .collect();
    for i in [0, degree] {
        if c[i] == 0.0 {
            c[i] = 1.0;
        }
    }
    UniPoly::from_real(&c).unwrap()
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    let mut winding_failures = 0;
    for _ in 0..100 {
        let p = random_complex_poly(&mut rng);
        let r = root_report(&p, DEFAULT_DELTA).unwrap();
        match winding_count(&p, 256) {
            Ok(w) if r.unimodular == 0 && w.rounded == r.inside => {}
            _ => winding_failures += 1,
        }
    }

    let (mut reciprocal_checked, mut reciprocal_failures) = (0, 0);
    for _ in 0..100 {
        let p = random_integer_poly(&mut rng, 16);
        let Ok(r) = c_exact(&p, DEFAULT_DELTA) else {
            continue;
        };
        reciprocal_checked += 1;
        match c_exact(&p.reciprocal().poly, DEFAULT_DELTA) {
            Ok(s) if s.inside == r.degree - r.inside && s.degree == r.degree => {}
            _ => reciprocal_failures += 1,
        }
    }

    let (mut additive_checked, mut additive_failures) = (0, 0);
    for _ in 0..100 {
        let (p, q) = (
            random_integer_poly(&mut rng, 10),
            random_integer_poly(&mut rng, 10),
        );
        let (Ok(rp), Ok(rq)) = (c_exact(&p, DEFAULT_DELTA), c_exact(&q, DEFAULT_DELTA)) else {
            continue;
        };
        additive_checked += 1;
        match c_exact(&p.mul(&q), DEFAULT_DELTA) {
            Ok(rpq) if rpq.inside == rp.inside + rq.inside => {}
            _ => additive_failures += 1,
        }
    }

    let p = poly("1+x+y+z");
    let spec = mc(14, 9);
    let reference = with_threads(Some(1), || c_j_slice(&p, 2, &spec)).unwrap();
    let deterministic = [2, 3, 8]
        .iter()
        .all(|&n| with_threads(Some(n), || c_j_slice(&p, 2, &spec)).unwrap() == reference);

    let t = start.elapsed();
    let pass = winding_failures == 0
        && reciprocal_failures == 0
        && additive_failures == 0
        && reciprocal_checked > 0
        && additive_checked > 0
        && deterministic
        && t <= Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "winding vs solver 100 cases, {winding_failures} failures; reciprocal {reciprocal_checked} cases, \
             {reciprocal_failures} failures; additivity {additive_checked} cases, {additive_failures} failures; \
             thread determinism {deterministic}; time {t:.2?}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [4usize, 5] {
        let e = c_default(&simplex_polynomial(k).unwrap(), &mc(18, 10 + k as u64)).unwrap();
        let target = 1.0 / (k as f64 + 1.0);
        let dev = (e.value - target).abs();
        pass &= dev <= 1e-2;
        parts.push(format!(
            "k={k}: {:.5} vs {:.5} ({:.1}σ)",
            e.value,
            target,
            dev / e.std_error
        ));
    }
    outcome(
        pass,
        format!("conjecture scan (not a theorem): {}", parts.join(", ")),
    )
}

fn main() {
    let checks: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = Vec::new();
    for (id, check) in checks {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2}: {tag}  {}", result.detail);
        if !result.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
