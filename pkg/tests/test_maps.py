import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qexp.base import new_base
from qexp.errors import OutOfDomain
from qexp.maps import (
    admissible_digits,
    conjugacy,
    conjugate_map,
    evaluate,
    expansion,
    follows_map,
    greedy_step,
    lazy_step,
    normalized_error,
    partial_inverse_H,
    step,
)

from .conftest import strict_bases


def test_greedy_step_examples(rounded):
    d, y = greedy_step(rounded, 1.465573)
    assert d == 1 and y == pytest.approx(1.1479, abs=1e-5)
    assert greedy_step(rounded, 0.0) == (0, 0.0)
    d, y = greedy_step(rounded, 0.5)
    assert d == 0 and y == pytest.approx(1.07395, abs=1e-5)


def test_lazy_step_examples(rounded, boundary):
    d, y = lazy_step(rounded, rounded.right)
    assert d == 1 and y == pytest.approx(rounded.right, abs=1e-12)
    d, y = lazy_step(rounded, 0.9)
    assert d == 0 and y == pytest.approx(1.93311, abs=1e-5)
    d, y = lazy_step(boundary, 0.7)
    assert d == 1 and y == pytest.approx(0.05, abs=1e-12)


def test_switch_conventions(ref):
    assert greedy_step(ref, ref.greedy_switch)[0] == 1
    assert lazy_step(ref, ref.lazy_switch)[0] == 0
    assert greedy_step(ref, np.nextafter(ref.greedy_switch, 0))[0] == 0
    assert lazy_step(ref, np.nextafter(ref.lazy_switch, 5))[0] == 1


def test_domain_handling(ref):
    with pytest.raises(OutOfDomain):
        greedy_step(ref, -0.01)
    with pytest.raises(OutOfDomain):
        lazy_step(ref, ref.right + 1e-9)
    assert greedy_step(ref, -5e-13) == (0, 0.0)
    assert lazy_step(ref, ref.right + 5e-13)[1] == pytest.approx(ref.right)
    with pytest.raises(ValueError):
        step(ref, 0.1, "random")


def test_critical_words(ref):
    # G^2(r) should equal 1/q1 exactly but lands an ulp below; snapping restores it
    assert expansion(ref, ref.r, 6, "greedy", snap=1e-12).digits == (1, 1, 1, 0, 0, 0)
    assert expansion(ref, ref.ell, 5, "lazy", snap=1e-12).digits == (0, 0, 1, 1, 1)
    assert expansion(ref, ref.r, 2, "greedy").digits == (1, 1)


@pytest.mark.parametrize("kind", ["greedy", "lazy"])
def test_zero_expands_to_zeros(ref, kind):
    orb = expansion(ref, 0.0, 12, kind)
    assert orb.digits == (0,) * 12 and set(orb.points) == {0.0}


def test_evaluate_examples(ref, rounded):
    assert evaluate(ref, "", "ones") == pytest.approx(ref.right, rel=1e-15)
    assert evaluate(ref, "111") == pytest.approx(ref.r, abs=1e-12)
    assert evaluate(ref, "00", "ones") == pytest.approx(ref.ell, abs=1e-12)
    assert evaluate(rounded, "111") == pytest.approx(1.465573, abs=1e-5)
    assert evaluate(rounded, "00", "ones") == pytest.approx(0.46558, abs=1e-4)
    assert evaluate(rounded, [0, 0], "ones") == pytest.approx(rounded.right / rounded.q0**2, rel=1e-14)


def test_admissible_digits(rounded):
    assert admissible_digits(rounded, 0.9) == {0, 1}
    assert admissible_digits(rounded, 0.0) == {0}
    assert admissible_digits(rounded, rounded.right) == {1}
    b = new_base(3, 1.5)
    assert admissible_digits(b, b.greedy_switch) == {0, 1}
    assert admissible_digits(b, b.right) == {1}


def test_partial_inverse_examples(rounded, boundary):
    assert partial_inverse_H(rounded, rounded.right, 7) == pytest.approx(rounded.right, rel=1e-15)
    assert partial_inverse_H(rounded, 0.0, 1) == pytest.approx(0.682328, abs=1e-6)
    assert partial_inverse_H(boundary, 2.0, 200) == pytest.approx(2.0, abs=1e-12)
    assert partial_inverse_H(boundary, 0.0, 200) == pytest.approx(2.0, abs=1e-12)


@given(strict_bases(), st.floats(0, 1), st.integers(0, 30))
def test_partial_inverse_properties(Q, u, k):
    t = u * Q.right
    a, b = partial_inverse_H(Q, t, k), partial_inverse_H(Q, t, k + 1)
    assert b >= a - 1e-15
    assert greedy_step(Q, partial_inverse_H(Q, t, 1))[1] == pytest.approx(t, abs=1e-12)


def test_conjugate_map_examples(rounded):
    a1 = (rounded.q1 - 1) / rounded.q1
    assert conjugate_map(rounded, 0.0) == 0.0
    assert conjugate_map(rounded, a1) == pytest.approx(0.0, abs=1e-15)
    assert conjugate_map(rounded, 0.5) == pytest.approx(0.26722, abs=1e-5)
    with pytest.raises(OutOfDomain):
        conjugate_map(rounded, 1.5)


@given(strict_bases())
def test_conjugacy(Q):
    rng = np.random.default_rng(int(Q.q0 * 1e6))
    for u in rng.random(1000):
        lhs = conjugacy(Q, conjugate_map(Q, u))
        rhs = greedy_step(Q, conjugacy(Q, u))[1]
        assert abs(lhs - rhs) <= 1e-12


@given(strict_bases(), st.floats(0, 1), st.integers(1, 40))
def test_remainder_identity(Q, u, n):
    x = u * Q.right
    orb = expansion(Q, x, n, "greedy")
    A = math.prod(Q.q(d) for d in orb.digits)
    lhs = x - evaluate(Q, orb.digits)
    rhs = orb.points[-1] / A
    eps = np.finfo(float).eps
    assert abs(lhs - rhs) <= 1e-9 * abs(rhs) + 8 * eps * Q.right
    assert 0 <= lhs + 8 * eps * Q.right and lhs <= Q.right / Q.qmin**n + 8 * eps * Q.right


@given(strict_bases(), st.floats(0, 1), st.sampled_from(["greedy", "lazy"]))
def test_orbit_confined(Q, u, kind):
    orb = expansion(Q, u * Q.right, 200, kind)
    pts = np.array(orb.points)
    assert pts.min() >= 0 and pts.max() <= Q.right
    for k, d in enumerate(orb.digits[:50]):
        expected = Q.q1 * pts[k] - 1 if d else Q.q0 * pts[k]
        assert pts[k + 1] == pytest.approx(expected, abs=1e-12)


@given(strict_bases(), st.floats(0, 1))
def test_theta_identity(Q, u):
    x = u * Q.right
    eps = np.finfo(float).eps
    # float orbits drift like qmax^n eps; stay where that is below 1e-11
    n = max(1, int(math.log(1e-11 / eps) / math.log(Q.qmax)))
    orb = expansion(Q, x, n, "greedy")
    for j in range(n + 1):
        theta = normalized_error(Q, x, orb.digits, j)
        assert abs(theta - orb.points[j]) <= 1e-9 * Q.right


def test_follows_map(ref):
    assert follows_map(ref, "111", "zeros", "greedy")
    assert follows_map(ref, "00", "ones", "lazy")
    # 1 0^inf sits on the greedy switch, where the lazy map picks 0
    assert not follows_map(ref, "1", "zeros", "lazy")
    # 0 1^inf is the lazy switch, above 1/q1, so greedy picks 1 there
    assert not follows_map(ref, "0", "ones", "greedy")
