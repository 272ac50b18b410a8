"""Smoke test for the rootratio Python extension.

Build and install first:
    pip install maturin
    maturin build --release -m crates/py/Cargo.toml
    pip install target/wheels/rootratio-*.whl
"""

import math

import rootratio as rr

LEHMER = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    p = rr.Polynomial("1 + x + y")
    assert p.variables == ["x", "y"]
    assert p.degree_in("y") == 1
    assert rr.Polynomial(str(p), p.variables) == p

    est = rr.c_j(p, "y", samples=1 << 16, seed=42)
    assert close(est.value, 1 / 3, 0.006), est
    direct = rr.c_j(p, "y", estimator="direct", samples=1 << 16, seed=42)
    assert close(direct.value, 1 / 3, 4 * direct.std_error), direct

    q = rr.Polynomial("x*y + x + 1")
    assert close(rr.c_j(q, "x").value, 2 / 3, 0.01)
    assert close(rr.c_default(q).value, 1 / 3, 0.01)
    assert close(rr.trinomial_closed_form(1.5), math.acos(0.75) / math.pi, 1e-12)

    report = rr.root_report(LEHMER)
    assert report.counts() == (1, 8, 1), report
    assert close(rr.mahler_univariate(LEHMER).log_value, 0.162357612, 1e-8)
    try:
        rr.c_exact(LEHMER)
    except rr.UnimodularRootsError as e:
        assert e.args[1] == (1, 8, 1)
    else:
        raise AssertionError("expected UnimodularRootsError")
    assert rr.c_exact([-2, 1]) == 0.0
    assert rr.winding_count([0.25, 0, 1]) == 2
    assert len(rr.find_roots([1, 0, 1])) == 2

    row = rr.c_substituted(p, [5])
    assert (row.inside, row.unimodular, row.outside) == (1, 2, 2)
    rows, predicted, sigma = rr.convergence_table(
        rr.Polynomial("1 + x + y + z"), [[2, 5], [3, 10]], samples=4096
    )
    assert [r.degree for r in rows] == [5, 10]
    assert close(predicted, 0.5, 5 * sigma + 0.01)

    m = rr.mahler_torus(p, samples=1 << 18, seed=1)
    assert close(m.log_value, 0.3230659, 5 * m.std_error), m

    try:
        rr.Polynomial("1 + * x")
    except rr.ParseError:
        pass
    else:
        raise AssertionError("expected ParseError")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
