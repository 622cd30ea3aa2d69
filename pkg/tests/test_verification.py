"""Tests for the verification suites"""

import pytest
from pathlib import Path

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.engine import open_engine
from src.core.models import FINSET, OPSET, DegreeFn
from src.core.settings import EngineSettings
from src.core.verification import (
    MAX_REPORTED_FAILURES,
    SUITES,
    SuiteReport,
    engines,
    load_fixtures,
    oracle_total,
    partial_bijections,
    run_suites,
    size_tuples,
)


@pytest.fixture
def small():
    """Bounds that keep every suite quick"""
    return EngineSettings(
        verify_max_size=2,
        oracle_total_size=2,
        finset_oracle_size=1,
        verify_workers=2,
    )


class TestSuiteReport:
    """Tests for SuiteReport"""

    def test_check(self):
        """Test counting checks and failures"""
        report = SuiteReport("demo")
        report.check(True, "fine")
        report.check(False, "broken")
        assert report.checks == 2
        assert report.failures == ["broken"]
        assert not report.passed

    def test_failures_truncated(self):
        """Test that to_dict caps the failure list"""
        report = SuiteReport("demo")
        for i in range(MAX_REPORTED_FAILURES + 5):
            report.check(False, f"failure {i}")
        data = report.to_dict()
        assert data["failure_count"] == MAX_REPORTED_FAILURES + 5
        assert len(data["failures"]) == MAX_REPORTED_FAILURES
        assert data["passed"] is False

    def test_document_has_no_timing(self):
        """Test that the report document carries no wall-clock values"""
        report = SuiteReport("demo", checks=3, seconds=1.25)
        assert "seconds" not in report.to_dict()
        assert report.to_dict() == SuiteReport("demo", checks=3, seconds=9.5).to_dict()


class TestHelpers:
    """Tests for counting helpers and fixtures"""

    def test_partial_bijections(self):
        """Test Σ C(m,k)C(n,k)k!"""
        assert partial_bijections(0, 3) == 1
        assert partial_bijections(2, 2) == 7
        assert partial_bijections(2, 3) == 13
        assert partial_bijections(3, 3) == 34

    def test_size_tuples(self):
        """Test bounded size sweeps"""
        assert len(size_tuples(2, 0, 2, total=2)) == 6
        assert size_tuples(1, 1, 3) == [(1,), (2,), (3,)]

    def test_fixtures(self):
        """Test that every fixture names an operation and a value"""
        cases = load_fixtures()
        assert cases
        assert {case["op"] for case in cases} == {"homdim", "omega", "compose", "malcev"}
        assert all("expected" in case for case in cases)

    def test_oracle_bounds_per_degree(self):
        """Test that constant degrees sweep the smaller total carrier"""
        settings = EngineSettings(oracle_total_size=6, oracle_constant_total_size=4)
        assert oracle_total(open_engine(OPSET, DegreeFn.T_POWER, settings), settings) == 6
        assert oracle_total(open_engine(OPSET, DegreeFn.ONE, settings), settings) == 4
        assert oracle_total(open_engine(OPSET, DegreeFn.ZERO_NONISO, settings), settings) == 4
        capped = EngineSettings(oracle_total_size=2, oracle_constant_total_size=4)
        assert oracle_total(open_engine(OPSET, DegreeFn.ONE, capped), capped) == 2

    def test_engines_follow_settings(self, small):
        """Test that suite engines carry the caller's settings and FinSet only has degree one"""
        tagged = [(engine.backend, engine.degree) for engine in engines(small)]
        assert tagged == [
            (FINSET, DegreeFn.ONE),
            (OPSET, DegreeFn.ONE),
            (OPSET, DegreeFn.ZERO_NONISO),
            (OPSET, DegreeFn.T_POWER),
        ]
        assert all(engine.category.settings == small for engine in engines(small))


class TestRunSuites:
    """Tests for run_suites"""

    @pytest.mark.parametrize("name", list(SUITES))
    def test_suite_passes(self, small, name):
        """Test that each suite passes on small bounds"""
        [report] = run_suites([name], settings=small)
        assert report.error is None
        assert report.failures == []
        assert report.checks > 0

    def test_order_preserved(self, small):
        """Test that reports come back in the requested order"""
        names = ["structure-constants", "dimensions"]
        reports = run_suites(names, settings=small)
        assert [r.name for r in reports] == names

    def test_unknown_suite(self, small):
        """Test that unknown names are rejected"""
        with pytest.raises(KeyError):
            run_suites(["structure-constants", "nonsense"], settings=small)

    def test_guards_come_from_settings(self):
        """Test that suites apply the size guards of the settings they are given"""
        tight = EngineSettings(opset_max_size=1, verify_workers=1)
        [report] = run_suites(["structure-constants"], settings=tight)
        assert report.error is not None
        assert report.error.startswith("SizeGuardError")

    def test_crash_is_reported(self, small, monkeypatch):
        """Test that a crashing suite becomes an error report"""
        def boom(settings, max_size):
            raise RuntimeError("lattice exploded")

        monkeypatch.setitem(SUITES, "boom", boom)
        [report] = run_suites(["boom"], settings=small)
        assert report.error == "RuntimeError: lattice exploded"
        assert not report.passed
        assert report.to_dict()["suite"] == "boom"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
