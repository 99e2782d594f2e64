import csv
import io
import json
import math

import numpy as np
import pytest

from rkdv.experiments import (
    ConvergenceReport,
    ConvergenceRow,
    DriftReport,
    DriftSample,
    emit,
    load_report,
    momentum_drift,
    spatial_convergence,
    spatial_rate,
    temporal_convergence,
    temporal_rate,
)
from rkdv.problems import get_problem


def test_temporal_rate():
    assert temporal_rate(4e-4, 1e-4) == pytest.approx(2.0)
    assert temporal_rate(1.0, 1.0) == 0.0


def test_spatial_rate():
    assert spatial_rate(1e-2, 1e-2 / 2**8, 16, 32) == pytest.approx(8.0)
    # super-algebraic decay shows up as an exploding algebraic rate
    assert spatial_rate(1e-2, 1e-6, 16, 32) > 8


class TestStudies:
    def test_temporal_second_order(self):
        prob = get_problem("manufactured2d")
        rep = temporal_convergence(prob, 8, [0.1, 0.05, 0.025], 0.5)
        assert rep.axis == "temporal" and rep.rates[0] is None
        for r in rep.rates[1:]:
            assert 1.9 < r < 2.1
        assert rep.metadata["N"] == 8 and rep.metadata["bootstrap_source"] == "start"

    def test_single_tau(self):
        rep = temporal_convergence(get_problem("manufactured2d"), 8, [0.1], 0.2)
        assert len(rep.rows) == 1 and rep.rows[0].rate is None

    def test_spatial_floor(self):
        rep = spatial_convergence(get_problem("manufactured2d"), 1e-4, [4, 8, 16], 0.1)
        assert rep.errors[1] < rep.errors[0] / 2**8
        assert rep.metadata["floor_from"] == 16

    def test_ordering_enforced(self):
        prob = get_problem("manufactured2d")
        with pytest.raises(ValueError):
            temporal_convergence(prob, 8, [0.05, 0.1], 0.2)
        with pytest.raises(ValueError):
            spatial_convergence(prob, 0.1, [8, 8], 0.2)

    def test_workers_match_serial(self):
        prob = get_problem("manufactured2d")
        a = temporal_convergence(prob, 8, [0.1, 0.05], 0.2)
        b = temporal_convergence(prob, 8, [0.1, 0.05], 0.2, workers=2)
        assert a.errors == b.errors

    def test_drift(self):
        rep = momentum_drift(get_problem("periodic2d"), 16, 0.1, 2.0, sample_every=7)
        assert [s.t for s in rep.samples] == pytest.approx([0.0, 0.7, 1.4, 2.0])
        assert rep.max_relative_drift < 1e-12
        assert rep.samples[0].drift == 0.0

    def test_drift_soliton_has_error(self):
        rep = momentum_drift(get_problem("soliton1d"), 128, 0.1, 0.5)
        assert rep.metadata["error_inf"] < 1e-2

    def test_drift_forced_rejected(self):
        with pytest.raises(ValueError):
            momentum_drift(get_problem("manufactured2d"), 8, 0.1, 1.0)

    def test_deterministic(self):
        prob = get_problem("soliton1d")
        a = temporal_convergence(prob, 64, [0.1, 0.05], 0.5)
        b = temporal_convergence(prob, 64, [0.1, 0.05], 0.5)
        assert a.errors == b.errors


def _table():
    rows = [ConvergenceRow(0.1, 2.8001e-05, None, 1.0), ConvergenceRow(0.05, 6.9585e-06, 2.0087, 2.0)]
    return ConvergenceReport("temporal", rows, {"N": 1024})


class TestEmit:
    def test_csv_layout(self, capsys):
        emit(_table())
        out = capsys.readouterr().out
        assert out.splitlines() == [
            "resolution,error_inf,rate,wall_seconds",
            "0.1,2.80010e-05,,1.000",
            "0.05,6.95850e-06,2.01,2.000",
        ]

    def test_csv_integer_resolution(self, capsys):
        emit(ConvergenceReport("spatial", [ConvergenceRow(64, 2.3e-8, 12.3, 0.5)]))
        assert capsys.readouterr().out.splitlines()[1].startswith("64,")

    def test_empty_report_header_only(self, capsys):
        emit(ConvergenceReport("temporal"))
        assert capsys.readouterr().out == "resolution,error_inf,rate,wall_seconds\n"

    def test_drift_csv(self, tmp_path):
        rep = DriftReport(114.59, [DriftSample(0.0, 114.59, 0.0), DriftSample(0.1, 114.59 + 1e-13, 1e-13)])
        path = tmp_path / "d.csv"
        emit(rep, "csv", path)
        rows = list(csv.DictReader(io.StringIO(path.read_text())))
        assert float(rows[1]["momentum"]) == 114.59 + 1e-13
        assert float(rows[1]["drift"]) == pytest.approx(1e-13)

    @pytest.mark.parametrize("rep", [_table(), DriftReport(2.0, [DriftSample(0.0, 2.0, 0.0)], {"N": 8})])
    def test_json_round_trip(self, rep, tmp_path):
        path = tmp_path / "r.json"
        emit(rep, "json", path)
        back = load_report(path)
        assert back == rep
        assert json.loads(path.read_text())["kind"] in ("convergence", "drift")

    def test_bad_format(self):
        with pytest.raises(ValueError):
            emit(_table(), "xml")

    def test_bad_document(self, tmp_path):
        path = tmp_path / "x.json"
        path.write_text("{}")
        with pytest.raises(ValueError):
            load_report(path)

    def test_bad_type(self):
        with pytest.raises(TypeError):
            emit(object())
