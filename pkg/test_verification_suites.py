#!/usr/bin/env python3
"""验证套件：小规模参数下全部通过"""

import orjson
import pytest

from errors import DomainError, NotACellError
from verification_suites import (
    COEFFICIENT_CHOICES, RUELLE_RANDOM_PAIRS, SUITES, SuiteReport, _Recorder, default_random_pairs, export_report,
    print_report, run_suite,
)


@pytest.mark.parametrize("name, params", [
    ("hopf", {"n": 2}),
    ("qbasis", {"n": 3}),
    ("dynkin", {"n": 3}),
    ("ruelle", {"n": 3}),
    ("arrows", {"n": 2, "r_max": 1}),
    ("products", {"n": 2, "n_j": 2}),
    ("bogoliubov", {"n_g": 1, "n_j": 1}),
    ("scattering", {"n": 3, "n_g": 1}),
])
def test_suite_passes(name, params):
    report = run_suite(name, seed=0, **params)
    assert report.total > 0
    assert report.passed, [f"{r.invariant}: {r.case} {r.detail}" for r in report.failures()]


def test_dynkin_suite_data():
    report = run_suite("dynkin", n=3, seed=0)
    assert report.data["cells"] == 6
    assert report.data["rank"] == 6


def test_steinmann_suite_four_points():
    report = run_suite("steinmann", n=4, seed=0)
    assert report.passed
    assert report.data["quadruples"] > 0
    assert report.data["rank"] == 26
    assert report.data["quotient_dimension"] == 26
    assert report.counters()["quotient_dimension"] == {"correct": 1, "total": 1}


def test_arrows_suite_covers_all_coefficient_pairs():
    assert COEFFICIENT_CHOICES == [(1, 0), (0, 1), (2, -3)]
    report = run_suite("arrows", n=2, r_max=1, seed=0)
    assert report.passed
    cases = [r.case for r in report.results if r.invariant in ("derivation", "coderivation")]
    for coeffs in COEFFICIENT_CHOICES:
        assert any(case.startswith(f"u{coeffs} ") for case in cases)


def test_ruelle_random_pairs():
    assert default_random_pairs(4) == RUELLE_RANDOM_PAIRS == 100
    assert default_random_pairs(3) == 0
    report = run_suite("ruelle", n=2, random_pairs=5, seed=3)
    assert report.passed
    assert report.params["random_pairs"] == 5
    assert report.counters()["ruelle_random"] == {"correct": 5, "total": 5}
    assert run_suite("ruelle", n=2, seed=3).params["random_pairs"] == 0


def test_none_parameters_use_defaults():
    report = run_suite("hopf", n=1, seed=None, progress=None)
    assert report.params == {"n": 1}
    assert report.passed


def test_unknown_suite():
    with pytest.raises(DomainError):
        run_suite("nope")
    assert "ruelle" in SUITES


def test_recorder_catches_domain_errors():
    report = SuiteReport(suite="demo", seed=0)
    rec = _Recorder(report)

    def boom():
        raise NotACellError("坏胞腔")

    assert rec.check("cell", "case-1", lambda: True)
    assert not rec.check("cell", "case-2", boom)
    assert report.counters() == {"cell": {"correct": 1, "total": 2}}
    assert report.failures()[0].detail.startswith("NotACellError")
    assert not report.passed


def test_report_output(tmp_path, capsys):
    report = run_suite("hopf", n=2, seed=0)
    print_report(report)
    out = capsys.readouterr().out
    assert "验证套件 hopf" in out
    assert f"通过: {report.correct}" in out

    target = tmp_path / "hopf.json"
    export_report(report, str(target))
    data = orjson.loads(target.read_bytes())
    assert data["suite"] == "hopf"
    assert data["passed"] is True
    assert data["total"] == report.total
