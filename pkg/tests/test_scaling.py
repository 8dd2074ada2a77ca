import math

import numpy as np
import pytest

from adiabound.bounds import trace_from_parts
from adiabound.errors import DomainError, EpsilonOutOfRange, NoCrossing
from adiabound.model import ModelParams, c_n, delta_v_closed
from adiabound.scaling import (E_INV, M_IMPROVED, M_OLD, adiabaticity_condition, crossing,
                               max_driving_rate, mean_free_path, mean_free_path_asymptotic,
                               r_at_mean_free_path, scaling_report)


class TestConstant:
    def test_value(self):
        assert 1.18700 <= M_IMPROVED <= 1.18712
        assert M_IMPROVED == pytest.approx(1.18706, abs=1e-5)

    def test_closed_form(self):
        expected = math.exp(-0.5) * math.sqrt(1 - E_INV) + math.sqrt(1 - E_INV - math.exp(-2))
        assert M_IMPROVED == expected


class TestMeanFreePath:
    @pytest.mark.parametrize("n,expected", [(1000, 0.050596), (10000, 0.016)])
    def test_asymptotic(self, n, expected):
        assert mean_free_path_asymptotic(ModelParams(N=n)) == pytest.approx(expected, abs=1e-6)

    def test_numeric_close_to_asymptotic(self, chain_runs):
        p, _, trace = chain_runs[1000]
        asym, num = mean_free_path(p, trace)
        assert abs(num - asym) / asym < 0.05

    def test_simulated_window(self):
        asym, num = mean_free_path(ModelParams(N=400), points=1024)
        assert abs(num - asym) / asym < 0.05

    def test_speed_limit_at_mean_free_path(self):
        r = r_at_mean_free_path(ModelParams(N=1000, Gamma=0.7))
        assert r == pytest.approx(math.sqrt(1000) / (2 * 0.7 * 390.625), rel=1e-14)
        assert r == pytest.approx(0.0578245, abs=1e-7)

    def test_speed_limit_scaling(self):
        base = r_at_mean_free_path(ModelParams(N=1000))
        assert r_at_mean_free_path(ModelParams(N=4000)) == pytest.approx(base / 2, rel=1e-14)
        vals = [r_at_mean_free_path(ModelParams(N=n)) for n in (100, 1000, 10000)]
        assert vals[0] > vals[1] > vals[2]


class TestCrossing:
    def test_linear(self):
        grid = np.linspace(0, 1, 11)
        assert crossing(grid, 1 - grid, 0.25) == pytest.approx(0.75, abs=1e-6)

    def test_first_point(self):
        assert crossing([0.0, 1.0], [0.1, 0.0], 0.5) == 0.0

    def test_never_reached(self):
        with pytest.raises(NoCrossing):
            crossing([0.0, 1.0], [1.0, 0.9])


class TestAdiabaticityCondition:
    def _trace(self, c, g):
        grid = np.linspace(0, 1, len(c))
        tr = trace_from_parts(grid, np.zeros(len(c)), np.log(c), np.zeros(len(c)), np.zeros(len(c)))
        tr.g = np.asarray(g, dtype=float)
        return tr

    def test_holds_at_start(self):
        rep = adiabaticity_condition(self._trace([1.0], [0.0]), 0.1)
        assert rep.holds[0] and rep.margin[0] == pytest.approx(0.1)

    def test_breakdown_at_inverse_e(self):
        rep = adiabaticity_condition(self._trace([1.0, E_INV], [0.0, 0.0]), 0.1)
        assert not rep.holds[1]
        assert rep.margin[1] == pytest.approx(-(1 - 0.1 - E_INV))
        assert rep.first_violation == 1.0

    def test_intervals(self):
        c = [1.0, 0.2, 0.2, 1.0, 0.2]
        rep = adiabaticity_condition(self._trace(c, np.zeros(5)), 0.1)
        assert rep.violation_intervals() == [(0.25, 0.5), (1.0, 1.0)]

    def test_full_simulation_reports_an_interval(self, chain_runs):
        rep = adiabaticity_condition(chain_runs[1000][2], 0.1)
        intervals = rep.violation_intervals()
        assert intervals
        assert 0 < rep.first_violation < 1.5

    def test_rejects_bad_epsilon(self):
        with pytest.raises(DomainError):
            adiabaticity_condition(self._trace([1.0], [0.0]), 1.5)


class TestDrivingRate:
    def test_ratio(self):
        p = ModelParams()
        assert delta_v_closed(p) / c_n(p) == pytest.approx(0.080954, abs=1e-6)

    def test_value(self):
        assert max_driving_rate(ModelParams(), 0.1) == pytest.approx(0.090297, abs=1e-6)

    def test_weaker_constant(self):
        p = ModelParams()
        assert M_OLD == 1.0
        assert max_driving_rate(p, 0.1, improved=False) == pytest.approx(
            max_driving_rate(p, 0.1) / M_IMPROVED, rel=1e-14)

    def test_quadrupled_size_halves_rate(self):
        a = max_driving_rate(ModelParams(N=1000))
        assert max_driving_rate(ModelParams(N=4000)) == pytest.approx(a / 2, rel=1e-14)

    @pytest.mark.parametrize("eps", [0.0, 1 - E_INV, 0.7, -0.1])
    def test_epsilon_range(self, eps):
        with pytest.raises(EpsilonOutOfRange):
            max_driving_rate(ModelParams(), eps)


class TestReport:
    def test_row(self):
        rep = scaling_report(ModelParams(N=1000), 0.1, points=1024)
        assert rep.N == 1000
        assert rep.lambda_star_asymptotic == pytest.approx(0.050596, abs=1e-6)
        assert abs(rep.lambda_star_numeric / rep.lambda_star_asymptotic - 1) < 0.05
        assert rep.Gamma_N_bound == pytest.approx(0.090297, abs=1e-6)
        assert len(rep.row()) == len(rep.CSV_COLUMNS)
