import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grindmodm import ConfigError, DomainError, ProcessConstants
from grindmodm.process_model import (
    DecisionVector,
    cost_terms,
    evaluate,
    grinding_time,
    production_cost,
    surface_roughness,
    wear_constraint_residual,
    wheel_wear_parameter,
    workpiece_removal_parameter,
    wrp_factors,
    wwp_factors,
)

# (vw, vs, aw) -> (Ra, T, C_T) as published; WSM and goal programming share a row
PUBLISHED_ROWS = {
    "Lp-Metric": ((31.60, 3000, 0.12), (0.144, 26.7, 5.656)),
    "Max-Min": ((10, 1000, 0.109), (0.375, 37, 7.149)),
    "Goal attainment": ((10, 1000, 0.047), (1.508, 37, 6.733)),
    "WSM": ((50, 3000, 0.12), (0.16, 25, 5.445)),
}

# 40-digit mpmath evaluation of the removal/wear expressions at (50, 3000, 0.12)
WRP_AT_WSM = 15.623431540784083673
WWP_AT_WSM_FIXED = 0.020759577141737048806  # a_p = 0.005
WWP_AT_WSM_DERIVED = 0.12455746285042229284  # a_p = 0.12 / 4


def random_points(c, n, seed=0):
    rng = np.random.default_rng(seed)
    return DecisionVector(
        rng.uniform(c.vw_min, c.vw_max, n),
        rng.uniform(c.vs_min, c.vs_max, n),
        rng.uniform(c.aw_min, c.aw_max, n),
    )


class TestConstants:
    def test_defaults_match_parameter_table(self, constants):
        assert constants.mc == 30 and constants.g_ratio == 60 and constants.cd == 75
        assert (constants.lw, constants.le, constants.bw, constants.be) == (30, 15, 20, 10)
        assert (constants.nd, constants.nt, constants.ntd, constants.np) == (4, 4, 2000, 4)
        assert (constants.ka, constants.vol, constants.dg, constants.rc) == (0.0869, 6.99, 0.3, 58)
        assert (constants.vw_min, constants.vw_max) == (10, 50)
        assert (constants.vs_min, constants.vs_max) == (1000, 3000)
        assert (constants.aw_min, constants.aw_max) == (0.04, 0.12)

    def test_json_round_trip(self, constants):
        assert ProcessConstants.from_json(constants.to_json()) == constants
        derived = dataclasses.replace(constants, ap_mode="derived")
        assert ProcessConstants.from_json(derived.to_json()) == derived

    def test_json_keys_are_field_names(self, constants):
        keys = set(json.loads(constants.to_json()))
        assert keys == {f.name for f in dataclasses.fields(ProcessConstants)}

    def test_bound_order_violation(self):
        with pytest.raises(ConfigError) as err:
            ProcessConstants(vw_min=50, vw_max=10)
        assert err.value.issues[0][0] == "vw_min"

    @pytest.mark.parametrize(
        "change",
        [{"mc": 0}, {"p": 0}, {"de": -1}, {"ap_mode": 0}, {"ap_mode": "guess"}, {"g_ratio": -1}],
    )
    def test_invalid_values_rejected(self, change):
        with pytest.raises(ConfigError):
            ProcessConstants(**change)

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError):
            ProcessConstants.from_dict({"bogus": 1})

    def test_all_issues_reported_together(self):
        with pytest.raises(ConfigError) as err:
            ProcessConstants(mc=-1, aw_min=0.2)
        assert {name for name, _ in err.value.issues} == {"mc", "aw_min"}


class TestSurfaceRoughness:
    @pytest.mark.parametrize(
        "dv, expected",
        [
            ((50, 3000, 0.12), 0.160),
            ((31.60, 3000, 0.12), 0.144),
            ((10, 3000, 0.12), 0.111),
        ],
    )
    def test_published_values(self, dv, expected, constants):
        assert surface_roughness(DecisionVector(*dv), constants) == pytest.approx(expected, abs=1e-3)

    def test_unit_inputs_give_coefficient(self, constants):
        assert surface_roughness(DecisionVector(1, 1, 1), constants) == 4.456

    @pytest.mark.parametrize("dv", [(0, 3000, 0.1), (10, -1, 0.1), (10, 3000, 0.0)])
    def test_domain_errors(self, dv, constants):
        with pytest.raises(DomainError):
            surface_roughness(DecisionVector(*dv), constants)

    def test_partial_derivative_signs(self, constants):
        pts = random_points(constants, 100, seed=1)
        for k in range(100):
            x = np.array([pts.vw[k], pts.vs[k], pts.aw[k]])
            grad = []
            for axis in range(3):
                h = 1e-6 * x[axis]
                up, down = x.copy(), x.copy()
                up[axis] += h
                down[axis] -= h
                grad.append(
                    (surface_roughness(DecisionVector(*up)) - surface_roughness(DecisionVector(*down)))
                    / (2 * h)
                )
            assert grad[0] > 0 and grad[1] < 0 and grad[2] < 0


class TestGrindingTime:
    @pytest.mark.parametrize("vw, expected", [(50, 25.0), (10, 37.0)])
    def test_published_values(self, vw, expected, constants):
        assert grinding_time(DecisionVector(vw, 2000, 0.1), constants) == pytest.approx(expected, abs=1e-12)

    def test_lp_row(self, constants):
        assert grinding_time(DecisionVector(31.60, 3000, 0.12), constants) == pytest.approx(26.7, abs=0.05)

    def test_closed_form(self, constants):
        pts = random_points(constants, 500, seed=2)
        assert np.max(np.abs(grinding_time(pts, constants) - (150 / pts.vw + 22))) < 1e-9

    def test_independent_of_vs_and_aw(self, constants):
        base = grinding_time(DecisionVector(23.0, 1000, 0.04), constants)
        assert grinding_time(DecisionVector(23.0, 2999, 0.11), constants) == base

    def test_strictly_decreasing_in_vw(self, constants):
        vw = np.linspace(10, 50, 200)
        t = grinding_time(DecisionVector(vw, 2000.0, 0.1), constants)
        assert np.all(np.diff(t) < 0)

    def test_rejects_nonpositive_speed(self, constants):
        with pytest.raises(DomainError):
            grinding_time(DecisionVector(0, 2000, 0.1), constants)


class TestProductionCost:
    def test_dressing_term(self, constants):
        assert cost_terms(DecisionVector(50, 3000, 0.12), constants).dressing == pytest.approx(0.0375, abs=1e-15)

    def test_idle_term(self, constants):
        assert cost_terms(DecisionVector(50, 3000, 0.12), constants).idle == pytest.approx(1.2, abs=1e-15)

    def test_adjustment_term(self, constants):
        # M_c / 60 * t_ch / N_t = 0.5 * 20 / 4
        assert cost_terms(DecisionVector(50, 3000, 0.12), constants).adjustment == pytest.approx(2.5)

    @pytest.mark.parametrize("name", list(PUBLISHED_ROWS))
    def test_within_envelope_of_published(self, name, constants):
        dv, (_, _, ct) = PUBLISHED_ROWS[name]
        assert production_cost(DecisionVector(*dv), constants) == pytest.approx(ct, rel=0.15)

    def test_terms_nonnegative_and_sum(self, constants):
        pts = random_points(constants, 1000, seed=3)
        terms = cost_terms(pts, constants)
        for term in terms:
            assert np.all(np.asarray(term) >= 0)
        total = production_cost(pts, constants)
        manual = sum(np.asarray(t, dtype=float) for t in terms)
        assert np.all(np.abs(total - manual) <= 1e-12 * np.abs(manual))

    def test_derived_down_feed_changes_machining_term_only(self, constants):
        derived = dataclasses.replace(constants, ap_mode="derived")
        dv = DecisionVector(50, 3000, 0.12)
        a, b = cost_terms(dv, constants), cost_terms(dv, derived)
        assert a.machining != b.machining
        assert a[1:] == b[1:]

    def test_rejects_zero_depth(self, constants):
        with pytest.raises(DomainError):
            production_cost(DecisionVector(50, 3000, 0.0), constants)


class TestWearParameters:
    def test_wrp_regression(self, constants):
        value = workpiece_removal_parameter(DecisionVector(50, 3000, 0.12), constants)
        assert value == pytest.approx(WRP_AT_WSM, rel=1e-13)

    def test_wwp_regression(self, constants):
        dv = DecisionVector(50, 3000, 0.12)
        assert wheel_wear_parameter(dv, constants) == pytest.approx(WWP_AT_WSM_FIXED, rel=1e-13)
        derived = dataclasses.replace(constants, ap_mode="derived")
        assert wheel_wear_parameter(dv, derived) == pytest.approx(WWP_AT_WSM_DERIVED, rel=1e-13)

    def test_wrp_ignores_depth(self, constants):
        pts = random_points(constants, 200, seed=4)
        other = DecisionVector(pts.vw, pts.vs, np.full_like(pts.aw, 0.077))
        assert np.array_equal(
            workpiece_removal_parameter(pts, constants), workpiece_removal_parameter(other, constants)
        )

    def test_positive(self, constants):
        pts = random_points(constants, 500, seed=5)
        assert np.all(workpiece_removal_parameter(pts, constants) > 0)
        assert np.all(wheel_wear_parameter(pts, constants) > 0)

    @pytest.mark.parametrize("mode", [0.005, "derived"])
    def test_wwp_increasing_in_vw(self, mode, constants):
        c = dataclasses.replace(constants, ap_mode=mode)
        pts = random_points(c, 100, seed=6)
        h = 1e-6 * pts.vw
        up = wheel_wear_parameter(DecisionVector(pts.vw + h, pts.vs, pts.aw), c)
        down = wheel_wear_parameter(DecisionVector(pts.vw - h, pts.vs, pts.aw), c)
        assert np.all(up - down > 0)

    def test_factor_dumps_recompose(self, constants):
        dv = DecisionVector(31.6, 2500, 0.1)
        f = wrp_factors(dv, constants)
        manual = (
            94.4 * f["dressing"] * f["lead"] * f["speed_ratio"] * f["wheel_speed"]
            / (f["wheel_diameter"] * f["hardness"] * f["grain"] * f["workpiece_hardness"])
        )
        assert manual == pytest.approx(workpiece_removal_parameter(dv, constants), rel=1e-14)
        g = wwp_factors(dv, constants)
        assert g["down_feed"] == constants.ap_mode
        assert g["speed_ratio"] * g["workpiece_speed"] == pytest.approx(2500 ** (3 / 19) * 31.6 ** (16 / 19))


class TestWearConstraint:
    @pytest.mark.parametrize("mode", [0.005, "derived"])
    @pytest.mark.parametrize("name", list(PUBLISHED_ROWS))
    def test_published_solutions_feasible(self, name, mode, constants):
        c = dataclasses.replace(constants, ap_mode=mode)
        assert wear_constraint_residual(DecisionVector(*PUBLISHED_ROWS[name][0]), c) >= 0

    def test_residual_zero_at_threshold(self, constants):
        dv = DecisionVector(40, 2000, 0.1)
        ratio = workpiece_removal_parameter(dv, constants) / wheel_wear_parameter(dv, constants)
        c = dataclasses.replace(constants, g_ratio=ratio)
        assert wear_constraint_residual(dv, c) == 0.0

    def test_zero_threshold(self, constants):
        c = dataclasses.replace(constants, g_ratio=0.0)
        dv = DecisionVector(40, 2000, 0.1)
        ratio = workpiece_removal_parameter(dv, c) / wheel_wear_parameter(dv, c)
        assert wear_constraint_residual(dv, c) == ratio > 0

    def test_derived_mode_corner_is_infeasible(self, constants):
        # WRP/WWP scales with (vs/vw)^(13/19)/a_p, so this corner is the worst case
        c = dataclasses.replace(constants, ap_mode="derived")
        assert wear_constraint_residual(DecisionVector(50, 1000, 0.12), c) < 0
        assert not evaluate(DecisionVector(50, 1000, 0.12), c).feasible


class TestEvaluate:
    def test_wsm_row(self, constants):
        f, feasible = evaluate(DecisionVector(50, 3000, 0.12), constants)
        assert feasible
        assert f.ra == pytest.approx(0.160, abs=1e-3)
        assert f.t == pytest.approx(25.0, abs=1e-9)
        assert f.ct == pytest.approx(5.445, rel=0.15)

    def test_out_of_bounds(self, constants):
        f, feasible = evaluate(DecisionVector(5, 3000, 0.12), constants)
        assert not feasible
        assert math.isfinite(f.ra)

    def test_max_min_row(self, constants):
        f, feasible = evaluate(DecisionVector(10, 1000, 0.109), constants)
        assert feasible
        assert f.ra == pytest.approx(0.375, abs=1e-3)
        assert f.t == pytest.approx(37.0)
        assert f.ct == pytest.approx(7.149, rel=0.15)

    @settings(max_examples=50, deadline=None)
    @given(
        st.floats(10, 50), st.floats(1000, 3000), st.floats(0.04, 0.12)
    )
    def test_pure(self, vw, vs, aw):
        c = ProcessConstants()
        a = evaluate(DecisionVector(vw, vs, aw), c)
        b = evaluate(DecisionVector(vw, vs, aw), c)
        assert a == b
        assert all(x > 0 and math.isfinite(x) for x in a.objectives)

    def test_vectorized_matches_scalar(self, constants):
        pts = random_points(constants, 20, seed=7)
        f, feasible = evaluate(pts, constants)
        for k in range(20):
            g, ok = evaluate(DecisionVector(pts.vw[k], pts.vs[k], pts.aw[k]), constants)
            assert ok == feasible[k]
            assert np.allclose(g, [f.ra[k], f.t[k], f.ct[k]], rtol=1e-15, atol=0)
