"""Closed-form constants against independent quadrature and known values."""
import math

import numpy as np
import pytest

from meanosc.constants import (
    adaptive_simpson,
    bellman_value,
    c3p,
    classic_jn_constants,
    jn_weak_envelope,
    lp_equiv_constant,
)
from meanosc.errors import InputError


def composite_simpson(f, a: float, b: float, n: int = 400_000) -> float:
    """Fixed-step Simpson oracle, independent of the adaptive routine.

    The high resolution is needed because the integrands have a singular
    derivative at 0 for non-integer p.
    """
    xs = np.linspace(a, b, 2 * n + 1)
    ys = f(xs)
    h = (b - a) / (2 * n)
    return float(h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-2:2].sum()))


def test_c3p_at_one_is_two_over_e():
    assert c3p(1.0) == pytest.approx(2.0 / math.e, abs=1e-12)


def test_c3p_at_two_is_one():
    assert c3p(2.0) == pytest.approx(1.0, abs=1e-10)


def test_c3p_matches_simpson_oracle():
    for p in (1.0, 1.5, 2.0, 3.0, 5.0):
        integral = composite_simpson(lambda t: t ** (p - 1.0) * np.exp(t), 0.0, 1.0)
        expected = (p / math.e * (math.gamma(p) - integral) + 1.0) ** (1.0 / p)
        assert c3p(p) == pytest.approx(expected, abs=1e-10)


def test_c3p_monotone_in_p():
    grid = np.linspace(1.0, 8.0, 29)
    vals = [c3p(p) for p in grid]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_c3p_rejects_small_p():
    with pytest.raises(InputError):
        c3p(0.99)


def test_lp_equiv_values():
    assert lp_equiv_constant(4.0) == pytest.approx(12.0**0.25, abs=1e-12)
    assert lp_equiv_constant(3.0) == pytest.approx(3.0 ** (1.0 / 3.0), abs=1e-12)
    assert lp_equiv_constant(2.0 + 1e-9) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(InputError):
        lp_equiv_constant(2.0)


def test_envelope_branch_values_and_continuity():
    assert jn_weak_envelope(0.5) == 1.0
    assert jn_weak_envelope(1.0) == 1.0
    assert abs(jn_weak_envelope(1.0) - jn_weak_envelope(1.0 + 1e-15)) < 1e-12
    assert jn_weak_envelope(2.0) == 0.25
    assert abs(jn_weak_envelope(2.0) - 0.25 * math.exp(2.0 - 2.0)) < 1e-12
    assert jn_weak_envelope(3.0) == pytest.approx(0.25 * math.exp(-1.0), abs=1e-12)
    assert jn_weak_envelope(3.0) == pytest.approx(0.0919699, abs=1e-7)
    with pytest.raises(InputError):
        jn_weak_envelope(0.0)


def test_classic_pair():
    c1, c2 = classic_jn_constants()
    assert c1 == pytest.approx(0.5 * math.exp(4.0 / math.e), abs=1e-15)
    assert c2 == pytest.approx(2.0 / math.e, abs=1e-15)
    assert c2 == pytest.approx(c3p(1.0), abs=1e-12)


def test_bellman_values():
    assert bellman_value("lp_moment", p=2.0) == 1.0
    assert bellman_value("lp_moment", p=4.0) == pytest.approx(12.0, abs=1e-12)
    assert bellman_value("weak_type", lam=2.0) == 0.25
    assert bellman_value("weak_type", lam=1.5) == pytest.approx(1.0 / 2.25, abs=1e-15)
    with pytest.raises(InputError):
        bellman_value("weak_type", lam=0.5)
    with pytest.raises(InputError):
        bellman_value("nonsense")


def test_adaptive_simpson_known_integral():
    assert adaptive_simpson(math.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0, abs=1e-12)
    assert adaptive_simpson(lambda t: t * math.exp(t), 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)
