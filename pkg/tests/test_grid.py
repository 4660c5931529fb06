"""Grid, sampled functions, gauges and CSV ingestion."""
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from extremum.errors import DataError, PreconditionError
from extremum.grid import (TWO_PI, GridSpec, Role, SampledFunction, make_gauge,
                           make_power_gauge, read_csv, sample, validate_gauge, write_csv)


def test_edges_and_nodes():
    g = GridSpec(16)
    assert g.edges[3] == pytest.approx(3 * math.pi / 8, abs=1e-15)
    assert g.edges[0] == 0.0 and g.edges[-1] == TWO_PI
    assert np.allclose(g.nodes, 0.5 * (g.edges[:-1] + g.edges[1:]))
    assert g.step == pytest.approx(math.pi / 8)


@pytest.mark.parametrize("n", [17, 8, 0, -16, 100, 2.5, True])
def test_bad_sizes(n):
    with pytest.raises(PreconditionError):
        GridSpec(n)


def test_nearest_index_wraps():
    g = GridSpec(32)
    assert np.array_equal(g.nearest_index(g.nodes), np.arange(32))
    assert g.nearest_index(g.nodes[3] + TWO_PI) == 3
    assert g.nearest_index(-1e-9) == 31


def test_sampled_function_is_read_only():
    f = sample(GridSpec(16), np.cos, Role.SIGNED)
    with pytest.raises(ValueError):
        f.values[0] = 2.0


@pytest.mark.parametrize("vals,role", [
    (-np.ones(16), Role.MODULUS),
    (np.full(16, 1.5), Role.SIGNED),
    (np.full(16, np.nan), Role.MODULUS),
    (np.ones(15), Role.MODULUS),
])
def test_sampled_function_validation(vals, role):
    with pytest.raises(PreconditionError):
        SampledFunction(GridSpec(16), vals, role)


def test_power_gauge_half():
    g = GridSpec(16)
    phi = make_power_gauge(2.0, g)
    assert phi.phi_values[8] == pytest.approx(math.sqrt(0.5))
    rep = validate_gauge(phi)
    assert rep.admissible and phi.admissible
    assert phi.increments.sum() == pytest.approx(1.0, abs=1e-15)


def test_power_gauge_rejects_linear():
    with pytest.raises(PreconditionError):
        make_power_gauge(1.0, GridSpec(16))


def test_linear_gauge_is_not_strictly_concave():
    g = GridSpec(64)
    phi = make_gauge(lambda t: t / TWO_PI, g, "linear")
    assert phi.strictly_increasing
    assert not phi.strictly_concave
    assert not phi.admissible


def test_gauge_normalisation_required():
    with pytest.raises(PreconditionError):
        make_gauge(lambda t: 2 * t / TWO_PI, GridSpec(16))


@settings(max_examples=30, deadline=None)
@given(st.floats(1.01, 20.0))
def test_power_gauges_are_admissible(p):
    g = GridSpec(256)
    phi = make_power_gauge(p, g)
    assert validate_gauge(phi).admissible


def test_csv_round_trip_is_exact(tmp_path):
    g = GridSpec(64)
    rng = np.random.default_rng(3)
    f = SampledFunction(g, rng.random(64) + 0.1)
    path = tmp_path / "f.csv"
    write_csv(f, path)
    back = read_csv(str(path), g)
    assert np.array_equal(back.values, f.values)


def test_csv_trace_round_trip():
    g = GridSpec(32)
    f = SampledFunction(g, np.exp(1j * g.nodes), Role.TRACE)
    buf = io.StringIO()
    write_csv(f, buf)
    back = read_csv(io.StringIO(buf.getvalue()), g, Role.TRACE)
    assert np.array_equal(back.values, f.values)


def test_csv_resamples_to_nearest_node():
    g = GridSpec(16)
    text = "".join(f"{t},{t}\n" for t in np.linspace(0, TWO_PI, 64, endpoint=False))
    f = read_csv(io.StringIO(text), g)
    assert np.max(np.abs(f.values - g.nodes)) <= TWO_PI / 128 + 1e-12


@pytest.mark.parametrize("text", ["", "t,value\n", "1,2,3,4\n", "0,abc\n", "0,1\n1\n", "0,nan\n",
                                  "0,-1\n"])
def test_csv_bad_input(text):
    with pytest.raises(DataError):
        read_csv(io.StringIO(text), GridSpec(16))


def test_csv_missing_file(tmp_path):
    with pytest.raises(DataError):
        read_csv(str(tmp_path / "nope.csv"), GridSpec(16))
