import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jacobi_mz.profiles import ExperimentReport, NormProfile, fit_growth, rows_to_csv, select_model

NS = (8, 16, 32, 64, 128)


class TestModelSelection:
    def test_constant(self):
        p = NormProfile(NS, [2.0] * 5)
        assert p.model == "constant" and p.is_bounded() and p.classify() == "bounded"

    def test_power_law_recovers_exponent(self):
        p = NormProfile(NS, [3.0 * n**0.4 for n in NS])
        assert p.model == "power"
        assert p.exponent == pytest.approx(0.4, abs=1e-12)
        assert p.classify() == "diverges"

    def test_logarithmic(self):
        p = NormProfile(NS, [math.log(n) for n in NS])
        assert p.model == "log"
        assert p.fits["log"].slope == pytest.approx(1.0, abs=1e-12)

    def test_decay(self):
        p = NormProfile(NS, [n**-1.5 for n in NS])
        assert p.exponent == pytest.approx(-1.5, abs=1e-12)
        assert p.is_bounded() and p.is_decreasing()

    def test_simpler_model_preferred_on_ties(self):
        fits = fit_growth(NS, [1.0, 1.0 + 1e-3, 1.0, 1.0 + 1e-3, 1.0])
        assert select_model(fits) in ("constant", "log", "power")
        noisy = NormProfile(NS, [1.0, 1.001, 0.999, 1.0005, 1.0])
        assert noisy.is_bounded()

    def test_short_span_is_inconclusive(self):
        p = NormProfile((8, 16, 32), [8, 16, 32])
        assert p.classify() == "inconclusive"

    @settings(max_examples=50)
    @given(c=st.floats(0.01, 100), e=st.floats(-2, 2))
    def test_power_fit_property(self, c, e):
        p = NormProfile(NS, [c * n**e for n in NS])
        assert p.exponent == pytest.approx(e, abs=1e-9)
        assert p.classify() == ("bounded" if e <= 0.05 else "diverges")


class TestConvergence:
    def test_converges(self):
        assert NormProfile(NS, [1, 0.1, 1e-2, 1e-3, 1e-4]).converges()

    def test_jitter(self):
        assert NormProfile(NS, [1, 0.5, 0.54, 0.2, 1e-4]).converges()
        assert not NormProfile(NS, [1, 0.5, 0.6, 0.2, 1e-4]).converges()

    def test_floor(self):
        assert NormProfile(NS, [1e-3, 1e-14, 3e-14, 2e-14, 1e-14]).converges()

    def test_not_small_enough(self):
        assert not NormProfile(NS, [1, 0.5, 0.25, 0.1, 0.05]).converges()


class TestValidation:
    @pytest.mark.parametrize(
        "ns,values",
        [((8, 8), (1, 1)), ((16, 8), (1, 1)), ((8,), (1, 2)), ((), ()), ((1, 2), (1, 1)), ((8, 16), (1, math.nan)), ((8, 16), (1, -1))],
    )
    def test_rejects(self, ns, values):
        with pytest.raises(ValueError):
            NormProfile(ns, values)


class TestExport:
    def test_csv_columns_and_format(self):
        text = NormProfile((8, 16, 32), (1.0, 1 / 3, 0.1)).to_csv()
        lines = text.split("\n")
        assert lines[0] == "n,value,model,exponent,residual"
        assert lines[-1] == "" and "\r" not in text
        assert lines[2].split(",")[1] == "0.33333333333333331"

    def test_rows_to_csv(self):
        assert rows_to_csv([{"a": 1, "b": True, "c": 0.1}]) == "a,b,c\n1,true,0.10000000000000001\n"
        assert rows_to_csv([]) == ""

    def test_report_json(self):
        profile = NormProfile(NS, [1.0] * 5)
        report = ExperimentReport("demo", {"x": "1"}, profile.rows(), "PASS", {"model": profile.model}, seed=3, notes={"M": math.inf})
        data = json.loads(report.to_json())
        assert data["verdict"] == "PASS" and data["seed"] == 3 and data["notes"]["M"] == "inf"
        assert data["table"][0]["value"] == 1.0
        with pytest.raises(ValueError):
            ExperimentReport("demo", {}, [], "MAYBE")

    def test_summary(self):
        s = NormProfile(NS, [n**0.3 for n in NS], "demo").summary()
        assert s["label"] == "demo" and set(s["fits"]) == {"constant", "log", "power"}
        assert np.isclose(s["exponent"], 0.3)
