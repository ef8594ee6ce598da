"""Smoke tests for the python bindings of the compiled core."""

import math

import pytest

import qthemi as qt

PI = math.pi


def test_parse_eval_diff():
    e = qt.parse("3 + 12*0.25*x1")
    assert qt.eval(e, [1, 0, 0, 0, 0]) == pytest.approx(6.0)
    d = qt.diff(qt.parse("exp(-4*x1)"), 1)
    assert qt.eval(d, [0.5, 0, 0, 0, 0]) == pytest.approx(-4 * math.exp(-2))
    with pytest.raises(qt.SourceError):
        qt.parse("x6")
    with pytest.raises(qt.EvalError):
        qt.eval(qt.parse("log(x1)"), [-1, 0, 0, 0, 0])


def test_homogenize_and_compose():
    h = qt.homogenize0(qt.parse("x5^3"))
    v1 = qt.eval(h, [0.1, 0.2, 0.0, 0.0, 0.5])
    v2 = qt.eval(h, [0.2, 0.4, 0.0, 0.0, 1.0])
    assert v1 == pytest.approx(v2, rel=1e-12)
    ident = [qt.parse(s) for s in ("x1", "x2", "x3", "x4", "x5")]
    c = qt.compose(qt.parse("x1*x2"), ident)
    assert qt.eval(c, [0.3, 0.5, 0, 0, 0.2]) == pytest.approx(0.15)


def test_quadrature_anchors():
    h = qt.hemisphere_rule(16, 16, 32)
    b = qt.boundary_rule(16, 32)
    assert h.weight_sum() == pytest.approx(4 * PI**2 / 3, rel=1e-12)
    assert b.weight_sum() == pytest.approx(2 * PI**2, rel=1e-12)
    assert qt.integrate(qt.parse("x5"), h) == pytest.approx(PI**2 / 2, rel=1e-10)
    assert qt.integrate(qt.parse("x5^3"), h) == pytest.approx(PI**2 / 6, rel=1e-10)


def test_operators():
    lap = qt.laplace(qt.parse("x1"))
    assert qt.eval(lap, [1, 0, 0, 0, 0]) == pytest.approx(-4.0)
    pan = qt.paneitz4(qt.parse("x1*x2"))
    p = [0.3, 0.4, 0.5, 0.1, math.sqrt(1 - 0.09 - 0.16 - 0.25 - 0.01)]
    assert qt.eval(pan, p) == pytest.approx(120 * 0.3 * 0.4, rel=1e-9)
    assert qt.normal_derivative(qt.parse("x5"), [1, 0, 0, 0, 0]) == pytest.approx(-1.0)
    assert qt.paneitz3(qt.parse("x5^3"), [0, 1, 0, 0, 0]) == pytest.approx(3.0)


def test_mobius_anchor():
    out = qt.mobius_ball([0, 0.5, 0, 0], [1, 0, 0, 0])
    assert out == pytest.approx([0.6, 0.8, 0.0, 0.0], abs=1e-14)
    cm = qt.ConformalMap([0, 0.5, 0, 0])
    p = [0.1, 0.2, 0.3, 0.4, math.sqrt(1 - 0.01 - 0.04 - 0.09 - 0.16)]
    back = cm.inverse(cm.forward(p))
    assert back == pytest.approx(p, abs=1e-11)
    assert cm.factor([0, 0, 0, 0, 1]) != 0.0


def test_flow_and_divergence():
    x1_field = [0.0] * 10
    x1_field[6] = 1.0
    north = [0, 0, 0, 0, 1]
    v = qt.algebra_eval(x1_field, north)
    assert v == pytest.approx([1, 0, 0, 0, 0], abs=1e-15)
    fr = qt.flow(x1_field, north, 0.0)
    assert fr["factor"] == pytest.approx(0.0, abs=1e-9)
    p = [0.6, 0, 0, 0, 0.8]
    h = 1e-3
    pd = (qt.flow(x1_field, p, h)["factor"] - qt.flow(x1_field, p, -h)["factor"]) / (2 * h)
    assert pd == pytest.approx(qt.divergence(x1_field, p) / 4, abs=1e-5)


def test_manufacture_gbc_and_kw():
    b = qt.boundary_rule(12, 24)
    h = qt.hemisphere_rule(12, 12, 24)
    u = qt.parse("0.3*x1 + 0.2*x5^3")
    q, t = qt.manufacture(u, b)
    defect = qt.gbc_defect(u, q, t, h, b)
    assert abs(defect) < 1e-7 * 4 * PI**2
    rep = qt.kw_report(u, q, t, h, b)
    assert rep["pass"]
    assert rep["max_normalized"] < 1e-7
    res = qt.weak_residual(u, q, t, qt.parse("x1^2"), h, b)
    assert abs(res) < 1e-6 * 100


def test_certify_smoke():
    found = qt.certify(qt.parse("3 + 0.1*x1"), qt.parse("1"), 500, 200)
    assert found["found"]
    cert = found["certificate"]
    assert cert["fine_min_interior"] >= -1e-9
    assert cert["c"][6] > 0.5

    none = qt.certify(qt.parse("3"), qt.parse("0"), 500, 200)
    assert not none["found"]
    assert "inconclusive" in none["note"] or "does not prove" in none["note"]
