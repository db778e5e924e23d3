import math

import pytest
import sympy as sp
from hypothesis import given

from qexp.base import BasePair, new_base, random_bases, reference_base, solve_base, word_value
from qexp.density import critical_orbit
from qexp.errors import InvalidBase, NonFinite, NoSolution
from qexp.maps import follows_map

from .conftest import strict_bases


def test_boundary_pair_constants():
    Q = new_base(3, 1.5)
    assert Q.ell == 0.0 and Q.r == 2.0 and Q.right == 2.0
    assert Q.greedy_switch == pytest.approx(2 / 3, abs=1e-15)
    assert Q.lazy_switch == Q.greedy_switch
    assert not Q.strict


def test_rounded_pair_is_strict():
    Q = new_base(2.1479, 1.46557)
    assert Q.strict
    assert Q.r == pytest.approx(1.465573, abs=1e-6)


def test_equal_bases_two():
    Q = new_base(2, 2)
    assert (Q.ell, Q.r, Q.right, Q.strict) == (0.0, 1.0, 1.0, False)


@pytest.mark.parametrize("q0,q1", [(2, 2.5), (1.0, 3.0), (3.0, 0.5), (0.9, 1.1), (5, 5)])
def test_inadmissible(q0, q1):
    with pytest.raises(InvalidBase):
        new_base(q0, q1)


@pytest.mark.parametrize("q0,q1", [(math.nan, 2), (2, math.inf), ("2", 2), (None, 2)])
def test_non_finite(q0, q1):
    with pytest.raises(NonFinite):
        new_base(q0, q1)


@pytest.mark.parametrize("q0", [1.5, 2.0, 2.5, 3.0, 4.0])
def test_boundary_family_ties_exactly(q0):
    Q = new_base(q0, q0 / (q0 - 1))
    assert not Q.strict
    assert Q == BasePair.boundary(q0)


@given(strict_bases())
def test_ordering_invariants(Q):
    assert 0 <= Q.ell <= Q.lazy_switch
    assert Q.greedy_switch <= Q.r <= Q.right
    assert 0 < Q.greedy_switch < Q.lazy_switch < Q.right
    assert Q.strict


@given(strict_bases())
def test_derived_formulas(Q):
    q0, q1 = Q.q0, Q.q1
    assert Q.ell == pytest.approx(q1 / (q0 * (q1 - 1)) - 1, abs=1e-12)
    assert Q.r == q0 / q1
    assert Q.right == 1 / (q1 - 1)


def test_boundary_constructor_pins_identities():
    Q = BasePair.boundary(2.7)
    assert Q.ell == 0 and Q.r == Q.right and Q.greedy_switch == Q.lazy_switch
    with pytest.raises(InvalidBase):
        BasePair.boundary(1.0)


def test_word_value_tails():
    assert word_value(2.0, 3.0, (), "ones") == pytest.approx(0.5)
    assert word_value(2.0, 3.0, (0, 1), "zeros") == pytest.approx(1 / 6)
    with pytest.raises(ValueError):
        word_value(2.0, 3.0, (1,), "twos")


def test_solve_worked_example():
    Q = solve_base("111", "00")
    assert Q.q0 == pytest.approx(2.1479, abs=1e-4)
    assert Q.q1 == pytest.approx(1.46557, abs=1e-5)
    assert abs(word_value(Q.q0, Q.q1, (1, 1, 1)) - Q.r) <= 1e-10
    assert abs(word_value(Q.q0, Q.q1, (0, 0), "ones") - Q.ell) <= 1e-10


def test_solve_matches_algebraic_root():
    # eliminating q0 from the two equations leaves q1^3 = q1^2 + 1, q0 = q1^2
    x = sp.symbols("x")
    psi = [r for r in sp.Poly(x**3 - x**2 - 1).nroots(n=30) if r.is_real][0]
    Q = reference_base()
    assert Q.q1 == pytest.approx(float(psi), abs=1e-12)
    assert Q.q0 == pytest.approx(float(psi**2), abs=1e-12)


def test_degenerate_words_rejected():
    with pytest.raises(NoSolution):
        solve_base("", "", greedy_tail="ones", lazy_tail="zeros")


def test_inconsistent_words_rejected():
    # the lazy equation for 0 1^inf forces q0 = 1, outside the admissible region
    with pytest.raises(NoSolution):
        solve_base("11", "0")


def test_round_trip_depth_32():
    for Q in random_bases(11, 20):
        gw = critical_orbit(Q, "greedy", 32).orbit.digits
        lw = critical_orbit(Q, "lazy", 32).orbit.digits
        P = solve_base(gw, lw)
        assert follows_map(P, gw, "zeros", "greedy")
        assert follows_map(P, lw, "ones", "lazy")
        assert abs(P.q0 - Q.q0) < 1e-3 and abs(P.q1 - Q.q1) < 1e-3


def test_random_bases_reproducible():
    a, b = random_bases(4, 5), random_bases(4, 5)
    assert a == b
    assert all(Q.strict for Q in a)
    assert not any(Q.strict for Q in random_bases(4, 3, strict=False))
