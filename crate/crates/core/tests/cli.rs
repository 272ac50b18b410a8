use std::process::{Command, Output};

use serde_json::Value;

fn rootratio(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rootratio"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("TORUS_MEASURE_THREADS", t),
        None => cmd.env_remove("TORUS_MEASURE_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn without_elapsed(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("elapsed_ms");
    v
}

#[test]
fn c_example() {
    let out = rootratio(
        &[
            "c",
            "--var",
            "y",
            "1+x+y",
            "--samples",
            "65536",
            "--seed",
            "42",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(
        (v["value"].as_f64().unwrap() - 1.0 / 3.0).abs() < 0.006,
        "{v}"
    );
    assert_eq!(v["samples_used"].as_u64(), Some(65536));
    assert_eq!(v["method"], "slice/jittered-monte-carlo");
}

#[test]
fn exit_codes() {
    let lehmer = rootratio(&["roots", "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1"], None);
    assert_eq!(lehmer.status.code(), Some(0));
    assert_eq!(json(&lehmer)["unimodular"].as_u64(), Some(8));

    assert_eq!(rootratio(&["c-exact", "x-2"], None).status.code(), Some(0));

    let uni = rootratio(&["c-exact", "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1"], None);
    assert_eq!(uni.status.code(), Some(4));
    let e = &json(&uni)["error"];
    assert_eq!(
        (
            e["inside"].as_u64(),
            e["unimodular"].as_u64(),
            e["outside"].as_u64()
        ),
        (Some(1), Some(8), Some(1))
    );

    let parse = rootratio(&["c", "1 + * x"], None);
    assert_eq!(parse.status.code(), Some(2));
    assert_eq!(json(&parse)["error"]["code"], "syntax_error");

    let usage = rootratio(&["frobnicate", "x"], None);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(json(&usage)["error"]["code"], "invalid_argument");

    let budget = rootratio(&["c", "1+x", "--samples", "64"], None);
    assert_eq!(budget.status.code(), Some(3));
    assert_eq!(json(&budget)["error"]["code"], "discard_budget");

    let bad_env = rootratio(&["c", "1+x+y"], Some("lots"));
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn output_is_deterministic_across_thread_caps() {
    let args = [
        "c",
        "1+x+y+z",
        "--samples",
        "20000",
        "--seed",
        "7",
        "--method",
        "lattice",
    ];
    let one = without_elapsed(json(&rootratio(&args, Some("1"))));
    let four = without_elapsed(json(&rootratio(&args, Some("4"))));
    let default = without_elapsed(json(&rootratio(&args, None)));
    assert_eq!(one, four);
    assert_eq!(one, default);
}

#[test]
fn negative_leading_term_is_not_a_flag() {
    let out = rootratio(&["c-exact", "-x + 2"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["value"].as_f64(), Some(0.0));
}

#[test]
fn conjecture_scan_text() {
    let out = rootratio(
        &[
            "scan-conjecture",
            "--k-max",
            "3",
            "--samples",
            "4096",
            "--output",
            "text",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("conjecture: true"));
    assert!(text.contains("k=3"));
}
