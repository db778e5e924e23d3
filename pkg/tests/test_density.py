import numpy as np
import pytest
import sympy as sp
from hypothesis import given

from qexp.base import new_base, random_bases
from qexp.density import (
    DigitSumSeq,
    critical_orbit,
    density_mean,
    depth_for_tail,
    invariant_densities,
    jump_function,
    tail_bound,
)
from qexp.transfer import FPOperator, residual

from .conftest import PHI, strict_bases

REFERENCE_VALUES = (0.8369, 0.6554, 0.3896)


def test_reference_greedy_orbit(ref):
    co = critical_orbit(ref, "greedy", 6)
    assert co.orbit.digits == (1, 1, 1, 0, 0, 0)
    pts = co.orbit.points
    assert pts[1] == pytest.approx(1.1479, abs=1e-4) and pts[1] == pytest.approx(ref.q0 - 1, abs=1e-14)
    assert pts[2] == ref.greedy_switch
    assert pts[3:] == (0.0,) * 4
    assert co.fixed_at == 3 and co.eventually_constant
    assert co.sums.partial_sums == (0, 1, 2, 3, 3, 3, 3)


def test_reference_lazy_orbit(ref):
    co = critical_orbit(ref, "lazy", 6)
    assert co.orbit.digits == (0, 0, 1, 1, 1, 1)
    assert co.fixed_at == 2


def test_boundary_orbit(boundary):
    co = critical_orbit(boundary, "greedy", 4)
    assert co.orbit.digits == (1, 1, 1, 1)
    assert set(co.orbit.points) == {2.0}


def test_golden_orbit(golden):
    co = critical_orbit(golden, "greedy", 4)
    assert co.orbit.digits == (1, 1, 0, 0)
    assert np.allclose(co.orbit.points, [1.0, 1 / PHI, 0.0, 0.0, 0.0], atol=1e-15)


@given(strict_bases())
def test_digit_sums(Q):
    s = critical_orbit(Q, "greedy", 30).sums
    assert all(b - a in (0, 1) for a, b in zip(s.partial_sums, s.partial_sums[1:]))
    assert all(v <= n for n, v in enumerate(s.partial_sums))
    assert DigitSumSeq.from_digits(s.digits) == s


def test_reference_jump_function(ref):
    h, bound = jump_function(ref, "greedy")
    q1 = ref.q1
    assert bound == 0.0
    assert np.allclose(h.breakpoints, [1 / q1, ref.q0 - 1, ref.r], atol=1e-15)
    assert np.allclose(h.values, [1 + 1 / q1 + 1 / q1**2, 1 + 1 / q1, 1.0, 0.0], atol=1e-14)
    assert np.allclose(h.values[:3], [2.1479, 1.68233, 1.0], atol=1e-4)


def test_boundary_jump_functions(boundary):
    hg, tg = jump_function(boundary, "greedy")
    hl, tl = jump_function(boundary, "lazy")
    assert tg == tl == 0.0
    assert len(hg.values) == 1 and hg.values[0] == pytest.approx(3.0, abs=1e-14)
    assert len(hl.values) == 1 and hl.values[0] == pytest.approx(1.5, abs=1e-14)


def test_reference_densities(ref):
    d = invariant_densities(ref)
    vals = [v for _, _, v in d.h_greedy.support_pieces()]
    assert np.allclose(vals, REFERENCE_VALUES, atol=5e-4)
    assert d.tail_bound_l1 == 0.0


def test_boundary_densities(boundary):
    d = invariant_densities(boundary)
    for h in (d.h_greedy, d.h_lazy):
        assert np.allclose(h.values, [0.5], atol=1e-12)


def test_golden_parry_density(golden):
    # exact Parry density of x -> phi x mod 1, from sympy
    phi = (1 + sp.sqrt(5)) / 2
    c = 1 + 1 / phi**2  # integral of 1_[0,1) + phi^-1 1_[0,1/phi)
    hi_piece = sp.nsimplify((1 + 1 / phi) / c)
    lo_piece = sp.nsimplify(1 / c)
    h = invariant_densities(golden).h_greedy
    assert np.allclose(h.breakpoints, [1 / PHI, 1.0], atol=1e-15)
    assert np.allclose(h.values, [float(hi_piece), float(lo_piece), 0.0], atol=1e-12)


def test_means(ref, boundary):
    b = invariant_densities(boundary)
    for kind in ("greedy", "lazy"):
        assert density_mean(b, kind) == pytest.approx(1.0, abs=1e-12)
    d = invariant_densities(ref)
    assert density_mean(d, "greedy") == pytest.approx(0.6358, abs=5e-4)
    assert density_mean(d, "lazy") > 0.5 * ref.right


def test_tail_depth_consistent():
    for Q in random_bases(2, 5):
        for tol in (1e-6, 1e-12):
            n = depth_for_tail(Q, tol)
            assert tail_bound(Q, n) <= tol < tail_bound(Q, n - 1)


def test_truncation_error_within_bound():
    Q = new_base(1.9, 1.8)
    h20, b20 = jump_function(Q, "greedy", 20)
    h80, _ = jump_function(Q, "greedy", 80)
    assert b20 > 0
    assert h20.l1_distance(h80) <= b20


def test_fixed_point_residuals():
    for Q in random_bases(21, 20):
        for kind in ("greedy", "lazy"):
            h, tail = jump_function(Q, kind)
            assert residual(FPOperator(Q, kind), h) <= 2 * tail + 1e-9


@given(strict_bases())
def test_density_invariants(Q):
    d = invariant_densities(Q)
    hg, hl = d.h_greedy, d.h_lazy
    assert hg.integrate() == pytest.approx(1, abs=1e-10)
    assert hl.integrate() == pytest.approx(1, abs=1e-10)
    assert hg.is_nonincreasing() and hl.is_nondecreasing()
    xs = np.linspace(Q.r + 1e-9, Q.right, 40)
    assert np.all(hg(xs) == 0)
    xs = np.linspace(0, Q.ell - 1e-9, 40) if Q.ell > 1e-9 else np.array([])
    assert np.all(hl(xs) == 0) if len(xs) else True
    # positive with a computable floor on the supports
    assert min(v for a, b, v in hg.pieces() if b <= Q.r + 1e-12) > 0
    assert min(v for a, b, v in hl.pieces() if a >= Q.ell - 1e-12) > 0


def test_boundary_collapse():
    # walk (q0, 2) towards the curve q0 + q1 = q0 q1, i.e. q0 -> 2
    dists = []
    for eps in (0.4, 0.2, 0.1, 0.05, 0.02):
        d = invariant_densities(new_base(2 - eps, 2.0), 200)
        dists.append(d.h_greedy.l1_distance(d.h_lazy))
    assert all(b < a for a, b in zip(dists, dists[1:]))
