"""Greedy and lazy maps on I_Q = [0, 1/(q1-1)] and the expansions they generate."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .base import BasePair, Word, as_word, word_value
from .errors import OutOfDomain

Kind = Literal["greedy", "lazy"]
KINDS = ("greedy", "lazy")

# affine steps amplify rounding; excursions this small are clamped back onto I_Q
DOMAIN_TOL = 1e-12


def check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ValueError(f"kind must be 'greedy' or 'lazy', not {kind!r}")
    return kind


def to_domain(Q: BasePair, x: float) -> float:
    """Return x clamped onto [0, right], raising OutOfDomain for real excursions."""
    if 0.0 <= x <= Q.right:
        return x
    if -DOMAIN_TOL <= x < 0.0:
        return 0.0
    if Q.right < x <= Q.right + DOMAIN_TOL:
        return Q.right
    raise OutOfDomain(f"x={x!r} outside [0, {Q.right!r}]")


def branch(Q: BasePair, digit: int, x: float) -> float:
    """Apply branch G_0(x)=q0*x or G_1(x)=q1*x-1 (shared by both maps)."""
    return Q.q1 * x - 1.0 if digit else Q.q0 * x


def greedy_step(Q: BasePair, x: float) -> tuple[int, float]:
    x = to_domain(Q, x)
    d = 1 if x >= Q.greedy_switch else 0
    return d, to_domain(Q, branch(Q, d, x))


def lazy_step(Q: BasePair, x: float) -> tuple[int, float]:
    x = to_domain(Q, x)
    d = 0 if x <= Q.lazy_switch else 1
    return d, to_domain(Q, branch(Q, d, x))


def step(Q: BasePair, x: float, kind: Kind) -> tuple[int, float]:
    if check_kind(kind) == "greedy":
        return greedy_step(Q, x)
    return lazy_step(Q, x)


def snap_point(Q: BasePair, x: float, tol: float) -> float:
    """Move x onto the nearest special point (0, switches, right) if within tol."""
    for p in (0.0, Q.greedy_switch, Q.lazy_switch, Q.right):
        if abs(x - p) <= tol:
            return p
    return x


@dataclass(frozen=True)
class OrbitRecord:
    base: BasePair
    start: float
    points: tuple[float, ...]
    digits: Word
    kind: str

    def __len__(self) -> int:
        return len(self.digits)


def expansion(Q: BasePair, x: float, n: int, kind: Kind = "greedy", snap: float = 0.0) -> OrbitRecord:
    """Iterate the greedy or lazy map n times from x, recording points and digits.

    With ``snap > 0`` every point is first snapped onto 0, a switch point or
    the right endpoint when within ``snap`` of it.  Plain expansions keep
    ``snap=0``; critical orbits use it to land on the switch points exactly.
    """
    check_kind(kind)
    if n < 0:
        raise ValueError("n must be >= 0")
    x = to_domain(Q, x)
    start = x
    stepper = greedy_step if kind == "greedy" else lazy_step
    points = [x]
    digits = []
    for _ in range(n):
        if snap:
            x = snap_point(Q, x, snap)
            points[-1] = x
        d, x = stepper(Q, x)
        digits.append(d)
        points.append(x)
    if snap:
        points[-1] = snap_point(Q, points[-1], snap)
    return OrbitRecord(Q, start, tuple(points), tuple(digits), kind)


def evaluate(Q: BasePair, w, tail: str = "zeros") -> float:
    """pi_Q(w 0^inf) or pi_Q(w 1^inf), summed with compensation."""
    return to_domain(Q, word_value(Q.q0, Q.q1, as_word(w), tail))


def admissible_digits(Q: BasePair, x: float) -> frozenset[int]:
    """Digits d for which the branch G_d keeps x inside I_Q.

    0 is allowed up to the lazy switch 1/(q0(q1-1)), 1 from the greedy
    switch 1/q1 on; both on the overlap between them.
    """
    x = to_domain(Q, x)
    out = set()
    if x <= Q.lazy_switch:
        out.add(0)
    if x >= Q.greedy_switch:
        out.add(1)
    return frozenset(out)


def partial_inverse_H(Q: BasePair, t: float, k: int = 1) -> float:
    """H^k(t) with H(t) = (1+t)/q1, the inverse of the greedy branch 1."""
    t = to_domain(Q, t)
    if k < 0:
        raise ValueError("k must be >= 0")
    for _ in range(k):
        t = (1.0 + t) / Q.q1
    return t


def conjugacy(Q: BasePair, u: float) -> float:
    """phi(u) = u/(q1-1), the linear bijection [0,1] -> I_Q."""
    return u / (Q.q1 - 1.0)


def conjugate_map(Q: BasePair, u: float) -> float:
    """The greedy map transported to [0, 1] by ``conjugacy``."""
    if not (-DOMAIN_TOL <= u <= 1.0 + DOMAIN_TOL):
        raise OutOfDomain(f"u={u!r} outside [0, 1]")
    u = min(max(u, 0.0), 1.0)
    a1 = (Q.q1 - 1.0) / Q.q1
    if u < a1:
        return Q.q0 * u
    return Q.q1 * u - (Q.q1 - 1.0)


def normalized_error(Q: BasePair, x: float, digits, n: int) -> float:
    """theta_n = q_{b1}...q_{bn} (x - sum_{i<=n} b_i/(q_{b1}...q_{bi})), in exact rationals.

    The float base and x are converted exactly, so the only error is the
    final rounding; compare against a float orbit with a tolerance that
    grows like qmax^n * eps.
    """
    q = (Fraction(Q.q0), Fraction(Q.q1))
    a = Fraction(1)
    acc = Fraction(x)
    for d in digits[:n]:
        a *= q[d]
        if d:
            acc -= 1 / a
    return float(a * acc)


def follows_map(Q: BasePair, w, tail: str, kind: Kind, tol: float = 1e-9) -> bool:
    """Whether ``w`` + constant tail is the greedy (or lazy) expansion of its value.

    Each digit is checked against the value of the remaining sequence
    pi_Q(w_k w_{k+1} ... tail) instead of a forward orbit, so points that
    sit exactly on a switch are judged without amplified rounding.
    """
    w = as_word(w)
    check_kind(kind)
    for k in range(len(w)):
        x = word_value(Q.q0, Q.q1, w[k:], tail)
        if kind == "greedy":
            ok = x >= Q.greedy_switch - tol if w[k] else x < Q.greedy_switch + tol
        else:
            ok = x > Q.lazy_switch - tol if w[k] else x <= Q.lazy_switch + tol
        if not ok:
            return False
    return True
