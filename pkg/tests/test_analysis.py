import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filippov_contraction import analysis as an
from filippov_contraction.errors import EmptyWindow, NoConvergence, ZeroDistance
from filippov_contraction.flow import IntegratorCfg
from filippov_contraction.geometry import RegionSign, SystemDef
from filippov_contraction.weight import WeightSpec

W = WeightSpec(0.05, 0.01)


def synthetic_series(times, dist, events=()):
    return an.PairSeries(np.asarray(times, float), np.asarray(dist, float),
                         np.asarray(dist, float), np.asarray(events, float))


def assert_sandwich(series, w):
    lo = math.exp(-w.delta) * series.euclid_dist
    assert np.all(series.weighted_dist >= lo * (1 - 1e-15))
    assert np.all(series.weighted_dist <= series.euclid_dist)


@pytest.fixture(scope="module")
def sys4():
    s = SystemDef(1.8, 0.1, period=4 * math.pi)
    return s, IntegratorCfg(dt=s.period / 2000)


@pytest.fixture(scope="module")
def smooth_pair(sys4):
    s, cfg = sys4
    return an.pair_series(s, W, cfg, (0.1, 1.0), (0.101, 1.001), 5 * s.period)


@pytest.fixture(scope="module")
def orbit():
    s = SystemDef(1.8, 0.1)
    return an.find_periodic_orbit(s, IntegratorCfg(), (1.0, 1.0), 1e-8, 60)


class TestPairSeries:
    def test_rejects_equal_starts(self, sys4):
        s, cfg = sys4
        with pytest.raises(ValueError):
            an.pair_series(s, W, cfg, (0.1, 1.0), (0.1, 1.0), 1.0)

    def test_monotone_after_first_period(self, sys4, smooth_pair):
        s, _ = sys4
        after = smooth_pair.euclid_dist[smooth_pair.times >= s.period]
        assert np.all(np.diff(after) <= 0)
        fit = an.fit_decay_rate(smooth_pair, (s.period, 5 * s.period))
        assert fit.r2 > 0.999

    def test_sandwich(self, smooth_pair):
        assert_sandwich(smooth_pair, W)

    def test_decay_constant_reported(self, smooth_pair):
        assert smooth_pair.decay_constant == pytest.approx(math.exp(0.1))
        assert an.euclidean_decay_constant(WeightSpec(0.2, 1.0)) == pytest.approx(math.exp(0.4))

    def test_unforced_vertical_offset(self):
        s = SystemDef(1.8, 0.1, forcing_amp=0.0)
        ps = an.pair_series(s, W, IntegratorCfg(dt=1e-2), (0.4, 1.0), (0.4, 1.2), 10.0)
        np.testing.assert_allclose(ps.euclid_dist, 0.2 * np.exp(-0.1 * ps.times), rtol=1e-9)
        assert_sandwich(ps, W)

    def test_sliding_pair_decays(self, sys4):
        s, cfg = sys4
        ps = an.pair_series(s, W, cfg, (0.0, 1.0), (0.001, 1.001), 5 * s.period)
        assert ps.has_sliding()
        assert ps.euclid_dist[-1] < ps.euclid_dist[0]
        assert_sandwich(ps, W)
        # merged events are sorted and unique
        assert np.all(np.diff(ps.merged_events) > 0)


class TestFitDecayRate:
    def test_exact_exponential(self):
        t = np.linspace(0, 10, 100)
        fit = an.fit_decay_rate(synthetic_series(t, 2 * np.exp(-0.3 * t)))
        assert fit.slope == pytest.approx(-0.3, abs=1e-9)
        assert fit.intercept == pytest.approx(math.log(2), abs=1e-9)
        assert fit.r2 == pytest.approx(1.0)

    def test_constant(self):
        fit = an.fit_decay_rate(synthetic_series(np.arange(10.0), np.full(10, 0.5)))
        assert fit.slope == pytest.approx(0.0, abs=1e-15)
        assert 0.0 <= fit.r2 <= 1.0

    def test_builtin_pair_rate(self, sys4, smooth_pair):
        s, _ = sys4
        fit = an.fit_decay_rate(smooth_pair, (2 * s.period, 5 * s.period))
        assert fit.slope == pytest.approx(-0.1, abs=0.02)
        assert fit.fit_window[0] >= 2 * s.period

    def test_weighted_series(self, smooth_pair):
        assert an.fit_decay_rate(smooth_pair, (30.0, 60.0), which="weighted").slope < 0

    def test_errors(self):
        ser = synthetic_series([0, 1, 2], [1.0, 0.0, 1.0])
        with pytest.raises(EmptyWindow):
            an.fit_decay_rate(ser, (5, 6))
        with pytest.raises(ZeroDistance):
            an.fit_decay_rate(ser, (0, 2))

    @given(rate=st.floats(-2, 2), amp=st.floats(1e-3, 1e3))
    def test_recovers_rate(self, rate, amp):
        t = np.linspace(0, 5, 50)
        fit = an.fit_decay_rate(synthetic_series(t, amp * np.exp(rate * t)))
        assert fit.slope == pytest.approx(rate, abs=1e-9)


class TestComparisonBound:
    def test_examples(self):
        assert an.comparison_bound(1.0, 0.1, [], 10.0) == pytest.approx(0.367879, abs=1e-6)
        assert an.comparison_bound(1.0, 0.1, [(5, 0.5)], 10.0) == pytest.approx(0.183940, abs=1e-6)
        assert an.comparison_bound(2.0, 0.0, [(1, 0.9), (2, 0.9)], 3.0) == pytest.approx(1.62)

    def test_future_jumps_ignored(self):
        assert an.comparison_bound(1.0, 0.0, [(5, 0.5)], 4.0) == 1.0

    @pytest.mark.parametrize("gamma", [0.0, -0.5, 1.5])
    def test_rejects_bad_factor(self, gamma):
        with pytest.raises(ValueError):
            an.comparison_bound(1.0, 0.1, [(1.0, gamma)], 2.0)
        with pytest.raises(ValueError):
            an.comparison_violation([0, 1], [1, 1], 0.0, [(0.5, gamma)])

    def test_rejects_negative_start(self):
        with pytest.raises(ValueError):
            an.comparison_bound(-1.0, 0.1, [], 1.0)


class TestVerifyComparison:
    def test_exact_construction_passes(self):
        t = np.linspace(0, 10, 201)
        events = [2.5, 6.0]
        vals = np.array([an.comparison_bound(3.0, 0.2, [(e, math.exp(-0.1)) for e in events], s) for s in t])
        res = an.verify_comparison(synthetic_series(t, vals, events), 0.2, 0.1)
        assert res.passes and res.max_violation == 0.0

    def test_builtin_pair(self, sys4, smooth_pair):
        s, _ = sys4
        assert an.verify_comparison(smooth_pair, 0.05, 0.0, t_start=2 * s.period).passes
        assert not an.verify_comparison(smooth_pair, 0.5, 0.0, t_start=2 * s.period).passes


class TestTimeTMap:
    def test_unforced(self):
        s = SystemDef(1.8, 0.1, forcing_amp=0.0)
        x = an.time_T_map(s, IntegratorCfg(), (0.5, 1.0))
        np.testing.assert_allclose(x, (0.5 * math.exp(-3.6 * math.pi), math.exp(-0.2 * math.pi)), atol=1e-6)

    def test_equilibrium(self):
        s = SystemDef(1.8, 0.1, forcing_amp=0.0)
        np.testing.assert_array_equal(an.time_T_map(s, IntegratorCfg(), (0.0, 0.0)), (0.0, 0.0))

    def test_fixed_point(self, orbit):
        s = SystemDef(1.8, 0.1)
        x = an.time_T_map(s, IntegratorCfg(), orbit.fixed_point)
        assert np.linalg.norm(x - orbit.fixed_point) <= orbit.residual * 1.0000001


class TestPeriodicOrbit:
    def test_converges(self, orbit):
        assert abs(orbit.fixed_point[1]) <= 1e-8
        assert orbit.residual <= 1e-8
        assert 0 < orbit.q_est < 1
        assert orbit.q_est == pytest.approx(math.exp(-0.2 * math.pi), abs=0.05)

    def test_periodicity_of_samples(self, orbit):
        xs = orbit.orbit_samples.x
        assert np.linalg.norm(xs[0] - xs[-1]) <= 1e-7

    def test_differences_nonincreasing(self, orbit):
        d = orbit.diffs
        assert np.all(np.diff(d[2:]) <= 0)

    def test_other_start_same_orbit(self, orbit):
        s = SystemDef(1.8, 0.1)
        other = an.find_periodic_orbit(s, IntegratorCfg(), (-0.5, 1.3), 1e-8, 60)
        assert np.linalg.norm(other.fixed_point - orbit.fixed_point) <= 1e-7

    def test_departure_side_does_not_change_orbit(self, orbit):
        s = SystemDef(1.8, 0.1)
        cfg = IntegratorCfg(depart_side=RegionSign.MINUS)
        other = an.find_periodic_orbit(s, cfg, (1.0, 1.0), 1e-8, 60)
        assert np.linalg.norm(other.fixed_point - orbit.fixed_point) <= 1e-7

    def test_no_convergence(self):
        s = SystemDef(1.8, 0.1)
        with pytest.raises(NoConvergence) as info:
            an.find_periodic_orbit(s, IntegratorCfg(), (1.0, 1.0), 1e-8, 2)
        assert info.value.max_iter == 2
        assert len(info.value.iterates) == 3

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError):
            an.find_periodic_orbit(SystemDef(1.8, 0.1), IntegratorCfg(), (1, 1), 0.0, 5)

    def test_json_export(self, orbit, tmp_path):
        an.write_orbit_json(orbit, tmp_path / "o.json", "orbit.csv")
        doc = json.loads((tmp_path / "o.json").read_text())
        assert set(doc) == {"fixed_point", "residual", "q_est", "iterates", "orbit_csv_path"}
        assert doc["fixed_point"] == [float(v) for v in orbit.fixed_point]


class TestPoincare:
    def test_zero_iterations(self, builtin, rk4):
        starts = an.grid_starts((-1, 1, -1, 1), 3, 2)
        np.testing.assert_array_equal(an.poincare_grid(builtin, rk4, starts, 0)[:, 0], starts)

    def test_equal_starts(self, builtin):
        cfg = IntegratorCfg(dt=builtin.period / 200)
        its = an.poincare_grid(builtin, cfg, np.tile([0.4, -0.7], (5, 1)), 2, workers=1)
        assert np.all(its == its[0])

    def test_chunking_and_workers_do_not_change_output(self, builtin):
        cfg = IntegratorCfg(dt=builtin.period / 200)
        starts = an.grid_starts((-1.5, 1.5, -2, 2), 5, 4)
        ref = an.poincare_grid(builtin, cfg, starts, 3, workers=1)
        par = an.poincare_grid(builtin, cfg, starts, 3, workers=2, chunk=7)
        np.testing.assert_array_equal(ref, par)

    def test_grid_ordering(self):
        g = an.grid_starts((0, 1, 10, 11), 2, 3)
        np.testing.assert_array_equal(g[:3, 0], 0.0)
        np.testing.assert_array_equal(g[:3, 1], [10, 10.5, 11])

    def test_rejects_negative_iterations(self, builtin, rk4):
        with pytest.raises(ValueError):
            an.poincare_grid(builtin, rk4, [[0, 0]], -1)

    def test_csv(self, tmp_path):
        its = np.arange(12, dtype=float).reshape(2, 3, 2) / 7
        an.write_poincare_csv(its, tmp_path / "p.csv")
        rows = list(csv.reader(open(tmp_path / "p.csv")))
        assert rows[0] == ["start_idx", "k", "x1", "x2"]
        assert rows[4][:2] == ["1", "0"] and float(rows[4][2]) == its[1, 0, 0]


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 700), st.integers(0, 2 ** 31))
def test_point_spread_matches_brute_force(n, seed):
    p = np.random.default_rng(seed).normal(size=(n, 2))
    ref = max(float(np.linalg.norm(p - p[i], axis=1).max()) for i in range(min(n, 40)))
    assert an.point_spread(p) >= ref - 1e-12
    d = np.sqrt(((p[:, None] - p[None]) ** 2).sum(-1)).max()
    assert an.point_spread(p) == pytest.approx(d, abs=1e-12)


def test_pair_csv(tmp_path, smooth_pair):
    an.write_pair_csv(smooth_pair, tmp_path / "pair.csv")
    rows = list(csv.reader(open(tmp_path / "pair.csv")))
    assert rows[0] == ["t", "dist_euclid", "dist_weighted"]
    assert float(rows[10][2]) == smooth_pair.weighted_dist[9]


def test_default_workers_env(monkeypatch):
    monkeypatch.setenv(an.WORKERS_ENV, "3")
    assert an.default_workers() == 3
    monkeypatch.delenv(an.WORKERS_ENV)
    assert an.default_workers() >= 1


jump_lists = st.lists(st.tuples(st.floats(0.0, 9.0), st.floats(0.01, 1.0)), max_size=6)


@settings(max_examples=200, deadline=None)
@given(jumps=jump_lists, nu=st.floats(0.0, 2.0), a0=st.floats(0.01, 100.0),
       slack=st.floats(0.0, 1.0), shrink=st.floats(0.2, 1.0))
def test_signals_meeting_hypotheses_are_bounded(jumps, nu, a0, slack, shrink):
    jumps = sorted(jumps)
    t = np.linspace(0.0, 10.0, 301)
    vals = np.array([a0 * math.exp(-(nu + slack) * s)
                     * math.prod(g * shrink for tk, g in jumps if tk <= s) for s in t])
    assert an.comparison_violation(t, vals, nu, jumps) <= 0
    for s, v in zip(t[::50], vals[::50]):
        assert v <= an.comparison_bound(a0, nu, jumps, s) * (1 + 1e-9)


@settings(max_examples=200, deadline=None)
@given(jumps=jump_lists, nu=st.floats(0.0, 2.0), a0=st.floats(0.01, 100.0),
       growth=st.floats(1e-3, 1.0))
def test_slow_decay_is_detected(jumps, nu, a0, growth):
    jumps = sorted(jumps)
    t = np.linspace(0.0, 10.0, 301)
    vals = np.array([a0 * math.exp(-(nu - growth) * s) * math.prod(g for tk, g in jumps if tk <= s)
                     for s in t])
    assert an.comparison_violation(t, vals, nu, jumps) > 0
