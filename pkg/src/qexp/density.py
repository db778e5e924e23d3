"""Explicit invariant densities built from the orbits of the critical points.

The greedy jump function is

    h~_g = sum_{n>=0} q1^{-s(n)} q0^{-(n-s(n))} 1_[0, G^n(r))

with s(n) the digit sum of the first n greedy digits of r; the lazy one uses
the lazy orbit of ell and indicators (L^n(ell), right].  Normalizing gives
the invariant probability densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import BasePair, Word
from .maps import OrbitRecord, check_kind, expansion
from .stepfn import StepFunction

DEFAULT_DEPTH = 64
# critical orbits are snapped onto 0, the switch points and right within this
CRITICAL_SNAP = 1e-12


@dataclass(frozen=True)
class DigitSumSeq:
    digits: Word
    partial_sums: tuple[int, ...]

    @classmethod
    def from_digits(cls, digits) -> "DigitSumSeq":
        sums = [0]
        for d in digits:
            sums.append(sums[-1] + d)
        return cls(tuple(digits), tuple(sums))


@dataclass(frozen=True)
class CriticalOrbit:
    orbit: OrbitRecord
    sums: DigitSumSeq
    fixed_at: int | None  # first index where the orbit sits on 0 or right

    @property
    def eventually_constant(self) -> bool:
        return self.fixed_at is not None


def critical_orbit(Q: BasePair, kind: str = "greedy", N: int = DEFAULT_DEPTH) -> CriticalOrbit:
    """N steps of G from r_Q (greedy) or of L from ell_Q (lazy)."""
    check_kind(kind)
    if N < 1:
        raise ValueError("N must be >= 1")
    start = Q.r if kind == "greedy" else Q.ell
    orb = expansion(Q, start, N, kind, snap=CRITICAL_SNAP)
    fixed_at = None
    for k, x in enumerate(orb.points):
        if x == 0.0 or x == Q.right:
            fixed_at = k
            break
    return CriticalOrbit(orb, DigitSumSeq.from_digits(orb.digits), fixed_at)


def tail_bound(Q: BasePair, N: int) -> float:
    """L1 bound on the terms n >= N of a jump function: right * qmin^-N / (1 - 1/qmin)."""
    qmin = Q.qmin
    return Q.right * qmin ** (-N) / (1.0 - 1.0 / qmin)


def depth_for_tail(Q: BasePair, tol: float, max_depth: int = 5000) -> int:
    """Smallest truncation depth whose tail bound is below tol."""
    qmin = Q.qmin
    n = math.log(Q.right / (tol * (1.0 - 1.0 / qmin))) / math.log(qmin)
    return int(min(max(1, math.ceil(n)), max_depth))


def jump_function(Q: BasePair, kind: str = "greedy", N: int = DEFAULT_DEPTH) -> tuple[StepFunction, float]:
    """Unnormalized jump function truncated after N terms, with its L1 tail bound.

    When the critical orbit lands on the fixed point 0 or right, the
    remaining terms form a geometric series that is summed exactly and
    the returned bound is 0.
    """
    co = critical_orbit(Q, kind, N)
    pts = co.orbit.points
    digits = co.orbit.digits
    R = Q.right

    n_terms = co.fixed_at if co.fixed_at is not None else N
    weights = np.empty(n_terms)
    c = 1.0
    for n in range(n_terms):
        weights[n] = c
        c /= Q.q(digits[n])
    xs = np.array(pts[:n_terms], dtype=float)

    # closed-form tail: the orbit sits on p from n_terms on, each step dividing by q_d
    extra = 0.0
    if co.fixed_at is not None:
        p = pts[co.fixed_at]
        q = Q.q1 if p == R else Q.q0
        geometric = c / (1.0 - 1.0 / q)
        # greedy indicator [0, p) is empty at p=0, lazy (p, R] is empty at p=R
        if (kind == "greedy" and p == R) or (kind == "lazy" and p == 0.0):
            extra = geometric
        bound = 0.0
    else:
        bound = tail_bound(Q, N)

    order = np.argsort(xs, kind="stable")
    xs, ws = xs[order], weights[order]
    edges = np.concatenate([[0.0], xs, [R]])
    if kind == "greedy":
        # piece [x_(i-1), x_(i)) is covered by every indicator [0, x_j) with j >= i
        vals = np.concatenate([np.cumsum(ws[::-1])[::-1], [0.0]])
    else:
        vals = np.concatenate([[0.0], np.cumsum(ws)])
    vals = vals + extra
    return StepFunction.from_edges(edges, vals), bound


@dataclass(frozen=True)
class DensityPair:
    base: BasePair
    h_greedy: StepFunction
    h_lazy: StepFunction
    truncation_N: int
    tail_bound_l1: float

    def density(self, kind: str) -> StepFunction:
        return self.h_greedy if check_kind(kind) == "greedy" else self.h_lazy


def _normalized(Q: BasePair, kind: str, N: int) -> tuple[StepFunction, float]:
    h, tail = jump_function(Q, kind, N)
    total = h.integrate()
    h = h.normalize()
    if tail == 0.0:
        return h, 0.0
    return h, tail / (total - tail) if total > tail else math.inf


def invariant_densities(Q: BasePair, N: int = DEFAULT_DEPTH) -> DensityPair:
    hg, tg = _normalized(Q, "greedy", N)
    hl, tl = _normalized(Q, "lazy", N)
    return DensityPair(Q, hg, hl, N, max(tg, tl))


def invariant_density(Q: BasePair, kind: str = "greedy", N: int = DEFAULT_DEPTH) -> StepFunction:
    return _normalized(Q, kind, N)[0]


def density_mean(d: DensityPair, kind: str = "greedy") -> float:
    """Mean of the invariant measure, i.e. the integral of x h(x)."""
    return d.density(kind).first_moment()
