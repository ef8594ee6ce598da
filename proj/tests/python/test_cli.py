"""End-to-end CLI tests against the built `qt` binary."""

import json
import os
import subprocess

import pytest

QT = os.environ.get("QT_BIN", "qt")


def run(*args, expect=0):
    proc = subprocess.run([QT, *args], capture_output=True, text=True)
    assert proc.returncode == expect, proc.stderr + proc.stdout
    return proc


def report_of(proc):
    rep = json.loads(proc.stdout)
    assert list(rep.keys()) == ["command", "config", "checks", "pass", "seconds"]
    for check in rep["checks"]:
        assert list(check.keys()) == ["name", "value", "tol", "pass"]
    return rep


def test_verify_manufactured():
    proc = run("verify", "--u", "0.3*x1 + 0.2*x5^3", "--nodes", "12")
    rep = report_of(proc)
    assert rep["pass"]
    names = [c["name"] for c in rep["checks"]]
    assert "gbc_defect_rel" in names
    assert sum(n.startswith("kw_normalized_") for n in names) == 10
    assert sum(n.startswith("weak_residual_") for n in names) == 6
    assert sum(n.startswith("cocycle_defect_") for n in names) == 3


def test_certify_finds_direction():
    proc = run("certify", "--q", "3 + 0.1*x1", "--t", "1")
    rep = report_of(proc)
    assert rep["pass"]
    checks = {c["name"]: c for c in rep["checks"]}
    assert checks["certificate_found"]["value"] == 1.0
    assert checks["c_7"]["value"] > 0.5


def test_certify_none_is_inconclusive():
    proc = run("certify", "--q", "3", "--t", "0")
    rep = report_of(proc)
    assert rep["pass"]
    checks = {c["name"]: c for c in rep["checks"]}
    assert checks["certificate_found"]["value"] == 0.0
    assert "no_certificate_inconclusive" in checks


def test_mobius_check_anchor():
    proc = run("mobius-check", "--a", "0,0.5,0,0")
    rep = report_of(proc)
    assert rep["pass"]
    checks = {c["name"]: c for c in rep["checks"]}
    assert "phi_a_e1_anchor" in checks

    # with a rotation part the generic diagnostics still pass
    proc = run("mobius-check", "--a", "0.2,0,0.3,0", "--rot", "1,2,0.7,3,4,-0.4")
    rep = report_of(proc)
    assert rep["pass"]
    assert "phi_a_e1_anchor" not in {c["name"] for c in rep["checks"]}


def test_gbc_and_paneitz():
    rep = report_of(run("gbc", "--u", "x5^3", "--nodes", "12"))
    assert rep["pass"]
    rep = report_of(run("paneitz-check"))
    assert rep["pass"]


def test_orbit_check():
    rep = report_of(run("orbit-check", "--u", "0.25*x1", "--nodes", "8"))
    assert rep["pass"]


def test_exit_codes_and_determinism(tmp_path):
    run("verify", expect=2)  # missing --u
    run("nonsense", expect=2)
    run("verify", "--u", "x6", expect=2)  # unknown identifier
    run("certify", "--q", "3", "--t", "x5", expect=2)  # boundary data on x1..x4 only
    run("mobius-check", "--a", "1.5,0,0,0", expect=2)  # |a| < 1 required
    run("mobius-check", "--a", "0,0.5,0", expect=2)  # a needs 4 components
    run("gbc", "--u", "x1", "--nodes", "300", expect=2)  # nodes in [8,256]
    run("verify", "--u", "x5", "--nodes", "8", expect=1)  # not in H

    p1 = run("gbc", "--u", "0.25*x1", "--nodes", "8")
    p2 = run("gbc", "--u", "0.25*x1", "--nodes", "8")
    r1 = json.loads(p1.stdout)
    r2 = json.loads(p2.stdout)
    r1.pop("seconds")
    r2.pop("seconds")
    assert r1 == r2

    # threads change only their own config echo, never the values
    p4 = run("gbc", "--u", "0.25*x1", "--nodes", "8", "--threads", "2")
    r4 = json.loads(p4.stdout)
    assert r1["checks"] == r4["checks"]


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo configuration\nu=0.25*x1\nnodes=8\n")
    proc = run("gbc", "--config", str(cfg))
    rep = report_of(proc)
    assert rep["pass"]
    assert rep["config"]["nodes"] == 8

    # flags override the file
    proc2 = run("gbc", "--config", str(cfg), "--nodes", "10")
    rep2 = report_of(proc2)
    assert rep2["config"]["nodes"] == 10


def test_out_file(tmp_path):
    out = tmp_path / "report.json"
    run("paneitz-check", "--out", str(out))
    rep = json.loads(out.read_text())
    assert rep["pass"]
