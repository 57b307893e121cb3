import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from plgtsp.model import (
    NodeCapError, PowerLawParams, asymptotic_counts, degree_sequence, interval_volume,
    node_cap, volume_upper_bound, zeta,
)


@pytest.mark.parametrize("s", [1.01, 1.1, 1.5, 2.0, 2.4, 2.5, 3.0, 7.0, 30.0])
def test_zeta_matches_mpmath(s):
    assert zeta(s) == pytest.approx(float(mpmath.zeta(s)), rel=1e-12)


def test_zeta_known_values():
    assert zeta(2) == pytest.approx(math.pi ** 2 / 6, abs=1e-12)
    assert zeta(1.5) == pytest.approx(2.612375, abs=1e-6)
    assert zeta(2.5) == pytest.approx(1.341487, abs=1e-6)


@pytest.mark.parametrize("s", [1.0, 0.5, -2.0])
def test_zeta_rejects_s_le_1(s):
    with pytest.raises(ValueError):
        zeta(s)


def test_params_validation():
    for a, b in [(0, 2), (-1, 2), (1, 0), (1, -1), (math.inf, 2), (math.nan, 2)]:
        with pytest.raises(ValueError):
            PowerLawParams(a, b)


def test_degree_sequence_ln100_beta2():
    seq = degree_sequence(PowerLawParams(math.log(100), 2))
    assert seq.max_degree == 10
    assert [seq.counts[i] for i in range(1, 5)] == [100, 25, 11, 6]


def test_degree_sequence_single_node():
    seq = degree_sequence(PowerLawParams(0.1, 3))
    assert seq.max_degree == 1
    assert seq.node_count == 1
    assert list(seq.degrees()) == [1]


def test_degree_sequence_total_near_zeta():
    p = PowerLawParams(math.log(1000), 2.5)
    seq = degree_sequence(p)
    exact = sum(int(mpmath.floor(mpmath.mpf(1000) / mpmath.mpf(i) ** 2.5)) for i in range(1, 16))
    assert seq.node_count == exact == 1325
    # floors lose < 1 per degree and the cut-off tail is below e^(a/b)
    assert abs(seq.node_count - zeta(2.5) * 1000) <= math.exp(p.alpha / p.beta) + p.max_degree


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 9.0), st.floats(1.05, 4.0))
def test_counts_are_exact_floors(alpha, beta):
    seq = degree_sequence(PowerLawParams(alpha, beta))
    for i, y in seq.counts.items():
        exact = mpmath.floor(mpmath.e ** mpmath.mpf(alpha) / mpmath.mpf(i) ** mpmath.mpf(beta))
        # the float rounding guard may lift a value sitting within 1e-12 of an integer
        assert y == int(exact) or abs(mpmath.e ** alpha / i ** beta - y) < 1e-9 * max(1, y)
    assert seq.max_degree == math.floor(math.exp(alpha / beta) + 1e-9)


def test_volume_and_node_count():
    seq = degree_sequence(PowerLawParams(math.log(100), 2))
    assert seq.node_count == sum(seq.counts.values())
    assert seq.volume == sum(i * y for i, y in seq.counts.items())
    assert seq.volume == int(seq.degrees().sum())


def test_asymptotic_counts():
    n, m = asymptotic_counts(PowerLawParams(math.log(1000), 2.5))
    assert n == pytest.approx(float(mpmath.zeta(2.5)) * 1000, rel=1e-9)
    assert m == pytest.approx(0.5 * float(mpmath.zeta(1.5)) * 1000, rel=1e-9)
    _, m2 = asymptotic_counts(PowerLawParams(math.log(1000), 2))
    assert m2 == pytest.approx(0.25 * math.log(1000) * 1000, rel=1e-9)
    n15, _ = asymptotic_counts(PowerLawParams(math.log(1000), 1.5))
    assert n15 == pytest.approx(float(mpmath.zeta(1.5)) * 1000, rel=1e-9)


def test_interval_volume():
    p = PowerLawParams(math.log(100), 2)
    assert interval_volume(p, 1, 1) == 100
    assert interval_volume(p, 1, p.max_degree) == degree_sequence(p).volume
    with pytest.raises(ValueError):
        interval_volume(p, 0, 3)
    with pytest.raises(ValueError):
        interval_volume(p, 5, 4)


def test_interval_volume_below_tail_bound():
    p = PowerLawParams(math.log(1e6), 2.5)
    a = math.ceil(0.5 * p.max_degree)
    exact = interval_volume(p, a, p.max_degree)
    bound = math.exp(2 * p.alpha / p.beta) / ((p.beta - 2) * 0.5 ** (p.beta - 2))
    assert exact <= bound


def test_volume_upper_bound_values():
    assert volume_upper_bound(PowerLawParams(3 * math.log(10), 3), 1.0) == pytest.approx(100)
    assert volume_upper_bound(PowerLawParams(math.log(1e4), 4), 0.5) == pytest.approx(200)
    p = PowerLawParams(math.log(1e6), 2.5)
    a = math.ceil(0.25 * p.max_degree)
    assert volume_upper_bound(p, 0.25) >= interval_volume(p, a, p.max_degree)


def test_volume_upper_bound_domain():
    with pytest.raises(ValueError):
        volume_upper_bound(PowerLawParams(5, 2), 0.5)
    with pytest.raises(ValueError):
        volume_upper_bound(PowerLawParams(5, 3), 0.0)


def test_node_cap_env(monkeypatch):
    monkeypatch.setenv("PLGTSP_NODE_CAP", "50")
    assert node_cap() == 50
    with pytest.raises(NodeCapError):
        degree_sequence(PowerLawParams(math.log(1000), 2))
    assert degree_sequence(PowerLawParams(math.log(10), 2)).node_count < 50
