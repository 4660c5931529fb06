"""Critical sets, collinearity, the gamma scan and the decision procedure."""
import math

import numpy as np
import pytest

from extremum.analytic import blaschke_boundary, outer_from_modulus, sine_half_gap
from extremum.config import AnalysisConfig
from extremum.errors import PreconditionError
from extremum.extremality import (RULES, FunctionSpec, Status, Verdict, cluster,
                                  collinearity_classes, component_angles, critical_set_E1,
                                  critical_set_E2, decide_extreme, gamma_scan, window_levels,
                                  xi1, xi2)
from extremum.fixtures import make_fixture
from extremum.grid import GridSpec, SampledFunction, make_gauge, make_power_gauge, sample
from extremum.norms import normalize
from extremum.perturbation import scan_witness
from extremum.rearrangement import decreasing_rearrangement

G = GridSpec(4096)
PHI = make_power_gauge(2.0, G)
T0 = 3.0


def _normalised(func):
    return normalize(sample(G, func), PHI)[0]


QUADRATIC = _normalised(lambda t: 25.0 - (t - T0) * np.abs(t - T0))
CUBIC = _normalised(lambda t: 40.0 - (t - T0) ** 3)
LINEAR = _normalised(lambda t: 10.0 - t)
EXPONENTIAL = make_fixture("exponential", G, PHI)[0]


def _contains(components, t):
    i = int(G.nearest_index(t))
    return any(a - 2 <= i <= b + 2 for a, b in components)


def test_xi_quantities():
    xi = G.nodes
    assert xi1(7, 7, xi) == 0.0
    assert xi1(10, 10 + 2048, xi) == pytest.approx(1.0)
    u, v = 100, 900
    g = 0.5 * (xi[u] + xi[v])
    assert xi2(u, v, g, xi) == pytest.approx(0.0, abs=1e-15)
    assert xi2(u, v, 0.3 + math.pi, xi) == pytest.approx(xi2(u, v, 0.3, xi), abs=1e-14)
    assert xi2(u, u, xi[u] - math.pi / 2, xi) == pytest.approx(1.0)
    tr = blaschke_boundary(0.4 - 0.2j, G)
    assert xi1(u, v, tr.arg_branch) == pytest.approx(sine_half_gap(u, v, tr), abs=1e-12)


def test_window_levels():
    assert window_levels(4096) == list(range(3, 11))
    with pytest.raises(PreconditionError):
        window_levels(64)


def test_cluster():
    flags = np.zeros(20, bool)
    flags[[1, 2, 4, 9, 10, 19]] = True
    assert cluster(flags) == [(1, 4), (9, 10), (19, 19)]
    assert cluster(np.zeros(5, bool)) == []


def test_e1_exponential_empty():
    assert critical_set_E1(EXPONENTIAL).card == 0


def test_e1_quadratic_flat():
    e1 = critical_set_E1(QUADRATIC)
    assert e1.card == 1 and _contains(e1.components, T0)
    assert critical_set_E2(QUADRATIC).card == 0


def test_e2_cubic_flat():
    e2 = critical_set_E2(CUBIC)
    assert e2.card == 1 and _contains(e2.components, T0)


def test_linear_profile_has_no_critical_points():
    assert critical_set_E1(LINEAR).card == 0
    assert critical_set_E2(LINEAR).card == 0


def test_constant_flags_everything():
    e1 = critical_set_E1(SampledFunction(G, np.ones(4096)))
    assert e1.flags.all() and e1.card == 1


def test_profiles_are_nonnegative():
    for mu in (QUADRATIC, CUBIC, EXPONENTIAL):
        assert np.all(critical_set_E1(mu).profiles >= 0)
        assert np.all(critical_set_E2(mu).profiles >= 0)


@pytest.mark.parametrize("seed", range(5))
def test_e2_inside_e1(seed):
    rng = np.random.default_rng(seed)
    mu = SampledFunction(G, 1 + rng.random(4096) * np.linspace(0, 1, 4096) ** 3)
    e1, e2 = critical_set_E1(mu), critical_set_E2(mu)
    assert np.all(e1.flags[e2.flags])
    for a, b in e2.components:
        assert any(c <= a and b <= d for c, d in e1.components)


def test_nonpositive_rejected():
    with pytest.raises(PreconditionError):
        critical_set_E1(SampledFunction(G, np.r_[np.ones(4095), 0.0]))


def test_collinearity_examples():
    mat, ok = collinearity_classes([1.0, 1.0 + math.pi])
    assert ok and mat.all()
    mat, ok = collinearity_classes([1.0, 1.0 + math.pi / 2])
    assert not ok and not mat[0, 1]
    assert collinearity_classes([2.0])[1]
    assert collinearity_classes([0.001, math.pi - 0.001])[1]


def test_branch_offset_invariance():
    mu, _ = make_fixture("quad-flat-2-collinear", G, PHI, 0.3 + 0.4j)
    tr = blaschke_boundary(0.3 + 0.4j, G)
    r = decreasing_rearrangement(mu)
    e1 = critical_set_E1(r)
    base = component_angles(e1, r, tr)
    for turns in (-2, 1, 5):
        shifted = component_angles(e1, r, tr.with_branch_offset(turns))
        assert collinearity_classes(shifted)[0].tolist() == collinearity_classes(base)[0].tolist()
        shifted_c = component_angles(e1, r, tr.arg_branch + 0.123 * turns)
        assert collinearity_classes(shifted_c)[0].tolist() == collinearity_classes(base)[0].tolist()
    outer = outer_from_modulus(mu)
    a = scan_witness(mu, tr, outer, PHI, theta_hints=base)
    b = scan_witness(mu, tr.with_branch_offset(3), outer, PHI, theta_hints=base)
    assert a.witness is not None and b.witness is not None
    assert a.witness.theta_index == b.witness.theta_index
    assert a.witness.params.beta == b.witness.params.beta


def test_gamma_scan_examples():
    xi = blaschke_boundary(0, G)
    const = gamma_scan(SampledFunction(G, np.ones(4096)), xi)
    assert np.all(const.min_ratio == 0) and const.condition_holds
    expo = gamma_scan(EXPONENTIAL, xi)
    assert not expo.condition_holds
    assert np.max(expo.min_ratio) > AnalysisConfig().eps_crit
    col, _ = make_fixture("quad-flat-2-collinear", G, PHI)
    scan = gamma_scan(col, xi, hints=[1.0])
    assert scan.min_ratio[0] > AnalysisConfig().eps_crit
    assert not scan.condition_holds


@pytest.mark.parametrize("name", ["constant", "exponential", "quad-flat-1", "quad-flat-4",
                                  "cubic-flat-1", "quad-flat-2-collinear", "quad-flat-2-generic"])
def test_gamma_witness_duality(name):
    mu, _ = make_fixture(name, G, PHI)
    tr = blaschke_boundary(0, G)
    v = decide_extreme(FunctionSpec(mu, (0,)), PHI)
    hints = v.report.angles
    scan = gamma_scan(mu, tr, hints=hints)
    assert scan.condition_holds == (v.witness is None)


def test_verdict_invariants():
    with pytest.raises(ValueError):
        Verdict(Status.EXTREME, "made-up", None, None)
    with pytest.raises(ValueError):
        Verdict(Status.NOT_EXTREME, RULES[0], None, None)


def test_decide_preconditions():
    mu, _ = make_fixture("exponential", G, PHI)
    linear = make_gauge(lambda t: t / (2 * math.pi), G)
    with pytest.raises(PreconditionError):
        decide_extreme(FunctionSpec(mu, (0,)), linear)
    with pytest.raises(PreconditionError):
        decide_extreme(FunctionSpec(SampledFunction(G, 2 * mu.values), (0,)), PHI)


def test_outer_is_extreme():
    v = decide_extreme(FunctionSpec(EXPONENTIAL), PHI)
    assert v.status is Status.EXTREME and v.rule == "outer-thmC"


def test_constant_inner_is_extreme():
    mu, _ = make_fixture("constant", G, PHI)
    v = decide_extreme(FunctionSpec(mu, (0.5,)), PHI)
    assert v.status is Status.EXTREME and v.rule == "inner-constant-modulus"


def test_shuffled_modulus_uses_the_rearrangement_map():
    # Shuffling the cells of a decreasing profile keeps mu* but makes omega wild;
    # the pulled-back argument then oscillates on every scale, so the critical
    # sets computed with omega are large and no perturbation survives.
    mu, _ = make_fixture("exponential", G, PHI)
    perm = np.random.default_rng(1).permutation(4096)
    shuffled = SampledFunction(G, mu.values[perm])
    v = decide_extreme(FunctionSpec(shuffled, (0,)), PHI)
    assert v.status is Status.EXTREME
    assert v.report.e1.card >= 4
    scan = scan_witness(shuffled, blaschke_boundary(0, G), outer_from_modulus(shuffled), PHI)
    assert scan.witness is None


def test_increasing_profile_uses_the_rearrangement_map():
    # An increasing modulus has omega = reversal, so xi o omega stays smooth.
    mu, _ = make_fixture("exponential", G, PHI)
    v = decide_extreme(FunctionSpec(SampledFunction(G, mu.values[::-1]), (0,)), PHI)
    assert v.status is Status.NOT_EXTREME and v.rule == "corollary-6.9-ii"
    assert max(v.witness.norm_plus, v.witness.norm_minus) == pytest.approx(1, abs=1e-4)


def test_two_factor_exponential():
    v = decide_extreme(FunctionSpec(EXPONENTIAL, (0, 0.5)), PHI)
    assert v.status is Status.NOT_EXTREME and v.rule == "corollary-6.5"
    assert v.witness.balance_residual < 1e-9


def test_two_factor_four_flats_is_unknown():
    mu, _ = make_fixture("quad-flat-4", G, PHI)
    v = decide_extreme(FunctionSpec(mu, (0, 0.5)), PHI)
    assert v.status is Status.UNKNOWN and v.rule == "unknown-gap"
