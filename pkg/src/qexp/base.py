"""Double bases Q = (q0, q1) and their derived constants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InvalidBase, NonFinite, NoSolution

Word = tuple[int, ...]

# search box for the inverse problem
Q0_BOX = (1.0, 8.0)
Q1_BOX = (1.0, 4.0)
# well-posed word pairs give condition numbers below ~1e2; a rank-deficient system
# (e.g. both words empty) shows up around 1e9 because of finite-difference noise
COND_LIMIT = 1e6


@dataclass(frozen=True)
class BasePair:
    """An admissible double base with every derived constant precomputed.

    ``ell`` and ``r`` are the critical points bounding the supports of the lazy
    and greedy invariant densities; ``right`` is the right end of I_Q.
    Instances should be built with :func:`new_base` or :meth:`boundary`.
    """

    q0: float
    q1: float
    ell: float
    r: float
    right: float
    greedy_switch: float
    lazy_switch: float
    strict: bool

    @classmethod
    def boundary(cls, q0: float) -> "BasePair":
        """Point (q0, q0/(q0-1)) of the curve q0 + q1 = q0*q1, classified as non-strict.

        Float rounding can move the computed q1 off the curve by an ulp; this
        constructor pins the classification instead of relying on the tie.
        """
        _check_finite(q0, 1.0)
        if q0 <= 1:
            raise InvalidBase(f"q0={q0!r} must exceed 1")
        q1 = q0 / (q0 - 1.0)
        return _build(q0, q1, strict=False)

    @property
    def qmin(self) -> float:
        return min(self.q0, self.q1)

    @property
    def qmax(self) -> float:
        return max(self.q0, self.q1)

    def q(self, digit: int) -> float:
        return self.q1 if digit else self.q0

    def as_dict(self) -> dict:
        return {
            "q0": self.q0,
            "q1": self.q1,
            "ell": self.ell,
            "r": self.r,
            "right": self.right,
            "greedy_switch": self.greedy_switch,
            "lazy_switch": self.lazy_switch,
            "strict": self.strict,
        }


def _check_finite(q0, q1):
    for name, v in (("q0", q0), ("q1", q1)):
        try:
            ok = math.isfinite(v)
        except TypeError:
            raise NonFinite(f"{name}={v!r} is not a number") from None
        if not ok:
            raise NonFinite(f"{name}={v!r} is not finite")


def _build(q0: float, q1: float, strict: bool) -> BasePair:
    right = 1.0 / (q1 - 1.0)
    greedy_switch = 1.0 / q1
    if strict:
        lazy_switch = 1.0 / (q0 * (q1 - 1.0))
        ell = q1 / (q0 * (q1 - 1.0)) - 1.0
        r = q0 / q1
    else:
        # on the boundary curve these identities hold exactly; don't let rounding break them
        lazy_switch = greedy_switch
        ell = 0.0
        r = right
    return BasePair(q0, q1, ell, r, right, greedy_switch, lazy_switch, strict)


def new_base(q0: float, q1: float) -> BasePair:
    """Validate (q0, q1) and return the corresponding :class:`BasePair`.

    Raises InvalidBase unless q0 > 1, q1 > 1 and q0 + q1 >= q0*q1.  The
    comparison is exact: a tie is the boundary case and gives ``strict=False``.
    """
    _check_finite(q0, q1)
    q0, q1 = float(q0), float(q1)
    if q0 <= 1 or q1 <= 1:
        raise InvalidBase(f"bases must exceed 1, got q0={q0!r}, q1={q1!r}")
    s, p = q0 + q1, q0 * q1
    if s < p:
        raise InvalidBase(f"q0+q1={s!r} < q0*q1={p!r}")
    return _build(q0, q1, strict=s > p)


def word_value(q0: float, q1: float, word: Sequence[int], tail: str = "zeros") -> float:
    """pi_Q of ``word`` followed by 0^inf (``tail="zeros"``) or 1^inf (``"ones"``)."""
    terms = []
    a = 1.0
    for d in word:
        a *= q1 if d else q0
        if d:
            terms.append(1.0 / a)
    if tail == "ones":
        terms.append(1.0 / ((q1 - 1.0) * a))
    elif tail != "zeros":
        raise ValueError(f"tail must be 'zeros' or 'ones', not {tail!r}")
    return math.fsum(terms)


def as_word(w) -> Word:
    """Coerce a string like ``"0110"`` or an iterable of ints to a word tuple."""
    if isinstance(w, str):
        digits = tuple(int(c) for c in w)
    else:
        digits = tuple(int(c) for c in w)
    if any(d not in (0, 1) for d in digits):
        raise ValueError(f"digits must be 0 or 1: {w!r}")
    return digits


def _residual(q, greedy_word, lazy_word, greedy_tail, lazy_tail):
    q0, q1 = q
    r = q0 / q1
    ell = q1 / (q0 * (q1 - 1.0)) - 1.0
    return np.array(
        [
            word_value(q0, q1, greedy_word, greedy_tail) - r,
            word_value(q0, q1, lazy_word, lazy_tail) - ell,
        ]
    )


def _jacobian(f, q, h=1e-7):
    jac = np.empty((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        jac[:, j] = (f(q + e) - f(q - e)) / (2 * h)
    return jac


def _in_box(q):
    return Q0_BOX[0] < q[0] < Q0_BOX[1] and Q1_BOX[0] < q[1] < Q1_BOX[1]


def _newton(f, q, max_iter=100, tol=1e-14):
    fq = f(q)
    for _ in range(max_iter):
        norm = np.max(np.abs(fq))
        if norm <= tol:
            break
        jac = _jacobian(f, q)
        try:
            step = np.linalg.solve(jac, -fq)
        except np.linalg.LinAlgError:
            return q, fq, False
        # damping by step halving
        t = 1.0
        for _ in range(40):
            trial = q + t * step
            if _in_box(trial):
                ftrial = f(trial)
                if np.max(np.abs(ftrial)) < norm:
                    break
            t *= 0.5
        else:
            return q, fq, False
        q, fq = trial, ftrial
    return q, fq, True


def solve_base(
    greedy_word,
    lazy_word,
    greedy_tail: str = "zeros",
    lazy_tail: str = "ones",
    tol: float = 1e-10,
) -> BasePair:
    """Find Q whose critical points have the prescribed expansions.

    Solves pi_Q(greedy_word + tail) = r_Q and pi_Q(lazy_word + tail) = ell_Q
    with a damped Newton iteration started from the best points of a coarse
    grid over the box (1, 8) x (1, 4).
    """
    gw, lw = as_word(greedy_word), as_word(lazy_word)

    def f(q):
        return _residual(q, gw, lw, greedy_tail, lazy_tail)

    grid = []
    for q0 in np.linspace(1.02, 7.98, 59):
        for q1 in np.linspace(1.02, 3.98, 75):
            if q0 + q1 >= q0 * q1:
                q = np.array([q0, q1])
                grid.append((float(np.max(np.abs(f(q)))), q))
    grid.sort(key=lambda t: t[0])

    inadmissible = None
    rejected = False
    for _, start in grid[:12]:
        q, fq, ok = _newton(f, start)
        if not ok or np.max(np.abs(fq)) > tol:
            continue
        jac = _jacobian(f, q)
        if np.linalg.cond(jac) > COND_LIMIT:
            raise NoSolution(
                f"prescribed expansions do not determine Q (singular system near q0={q[0]:.6g}, q1={q[1]:.6g})"
            )
        try:
            Q = new_base(float(q[0]), float(q[1]))
        except InvalidBase as exc:
            inadmissible = exc
            continue
        from .maps import follows_map

        # a root of the two equations need not make the words greedy/lazy expansions
        if follows_map(Q, gw, greedy_tail, "greedy") and follows_map(Q, lw, lazy_tail, "lazy"):
            return Q
        rejected = True
    if rejected:
        raise NoSolution("roots found, but the words are not the greedy/lazy expansions there")
    if inadmissible is not None:
        raise inadmissible
    raise NoSolution("root finder did not converge inside (1,8)x(1,4)")


@lru_cache(maxsize=None)
def reference_base() -> BasePair:
    """The strict base whose critical points expand as 1110^inf (greedy, r) and 001^inf (lazy, ell).

    Numerically (2.1478990357..., 1.4655712318...): q1 is the supergolden
    ratio and q0 = q1^2.  The 5- and 6-digit roundings of this pair do not
    reproduce the finite critical orbits, so all worked examples use the
    solved values.
    """
    return solve_base("111", "00")


def random_bases(seed: int, n: int, strict: bool = True, margin: float = 0.05) -> list[BasePair]:
    """n reproducible admissible bases with q1 in (1.2, 3) and q0 at least ``margin`` inside the curve."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        q1 = rng.uniform(1.2, 3.0)
        q0_max = q1 / (q1 - 1.0)
        if strict:
            q0 = rng.uniform(1.2, q0_max - margin) if q0_max - margin > 1.2 else None
            if q0 is None:
                continue
            out.append(new_base(q0, q1))
        else:
            out.append(BasePair.boundary(q0_max))
    return out
