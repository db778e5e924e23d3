"""Cylinder intervals I_w, their images J_w, and full-return words."""

from __future__ import annotations

from dataclasses import dataclass

from .base import BasePair, Word, as_word
from .errors import NotFound
from .maps import check_kind

EMPTY_TOL = 1e-12


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = False

    @property
    def length(self) -> float:
        return max(0.0, self.hi - self.lo)

    @property
    def is_empty(self) -> bool:
        return self.hi - self.lo <= EMPTY_TOL

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo, hi, lo_closed, hi_closed)

    def affine(self, slope: float, offset: float) -> "Interval":
        """Image under the increasing map x -> slope*x - offset."""
        return Interval(slope * self.lo - offset, slope * self.hi - offset, self.lo_closed, self.hi_closed)

    def close_to(self, other: "Interval", tol: float = 1e-12) -> bool:
        return (
            abs(self.lo - other.lo) <= tol
            and abs(self.hi - other.hi) <= tol
            and self.lo_closed == other.lo_closed
            and self.hi_closed == other.hi_closed
        )

    def __str__(self) -> str:
        return f"{'[' if self.lo_closed else '('}{self.lo:.12g}, {self.hi:.12g}{']' if self.hi_closed else ')'}"


EMPTY = Interval(0.0, 0.0, False, False)


@dataclass(frozen=True)
class CylinderInterval:
    """Word w with domain I_w, image J_w = G_w(I_w) and G_w(x) = weight*x - offset."""

    word: Word
    domain: Interval
    image: Interval
    weight: float
    offset: float

    @property
    def word_str(self) -> str:
        return "".join(map(str, self.word))


def branch_domains(Q: BasePair, kind: str = "greedy") -> tuple[Interval, Interval]:
    if check_kind(kind) == "greedy":
        s = Q.greedy_switch
        return Interval(0.0, s, True, False), Interval(s, Q.right, True, True)
    s = Q.lazy_switch
    return Interval(0.0, s, True, True), Interval(s, Q.right, False, True)


def _image_step(Q: BasePair, J: Interval, d: int, domains) -> Interval:
    part = J.intersect(domains[d])
    if part.is_empty:
        return EMPTY
    J = part.affine(Q.q(d), float(d))
    # G_1(1/q1) = 0 and the like come out an ulp off; pin endpoints to 0, r and right
    return Interval(_snap(Q, J.lo), _snap(Q, J.hi), J.lo_closed, J.hi_closed)


def _snap(Q: BasePair, x: float) -> float:
    for p in (0.0, Q.r, Q.right):
        if abs(x - p) <= EMPTY_TOL:
            return p
    return x


def image_interval(Q: BasePair, w, kind: str = "greedy") -> Interval:
    """J_w by the forward recursion J_{ud} = G_d(D_d ∩ J_u), starting from J_() = I_Q."""
    domains = branch_domains(Q, kind)
    J = Interval(0.0, Q.right, True, True)
    for d in as_word(w):
        J = _image_step(Q, J, d, domains)
        if J.is_empty:
            return EMPTY
    return J


def level_partition(Q: BasePair, n: int, kind: str = "greedy") -> list[CylinderInterval]:
    """All nonempty cylinders of length n, ordered by left endpoint (= by word).

    Children split the parent domain at a single computed point, so
    neighbouring domains share endpoints exactly.
    """
    if not 1 <= n <= 20:
        raise ValueError("level must be between 1 and 20")
    domains = branch_domains(Q, kind)
    switch = domains[0].hi
    root = CylinderInterval((), Interval(0.0, Q.right, True, True), Interval(0.0, Q.right, True, True), 1.0, 0.0)
    level = [root]
    for _ in range(n):
        nxt = []
        for cyl in level:
            imgs = [_image_step(Q, cyl.image, d, domains) for d in (0, 1)]
            alive = [not im.is_empty for im in imgs]
            dom = cyl.domain
            if alive[0] and alive[1]:
                s = (switch + cyl.offset) / cyl.weight
                doms = [
                    Interval(dom.lo, s, dom.lo_closed, domains[0].hi_closed),
                    Interval(s, dom.hi, domains[1].lo_closed, dom.hi_closed),
                ]
            else:
                doms = [dom, dom]
            for d in (0, 1):
                if alive[d]:
                    q = Q.q(d)
                    nxt.append(
                        CylinderInterval(cyl.word + (d,), doms[d], imgs[d], q * cyl.weight, q * cyl.offset + d)
                    )
        level = nxt
    return level


def is_full_image(Q: BasePair, J: Interval) -> bool:
    return J.close_to(Interval(0.0, Q.right, True, True))


def is_return_image(Q: BasePair, J: Interval) -> bool:
    """J == [0, r_Q)."""
    return J.close_to(Interval(0.0, Q.r, True, False))


def full_return(Q: BasePair, u, m_max: int = 200) -> int:
    """Least m >= 0 with J_{u 0^m} = [0, r_Q), from J_{u0^m} = [0, min(r, q0^m xi_u)).

    Greedy map only.  A full image J_u = I_Q needs exactly one 0.
    """
    J = image_interval(Q, u)
    if J.is_empty:
        raise ValueError(f"J_u is empty for u={as_word(u)}")
    if is_return_image(Q, J):
        return 0
    if is_full_image(Q, J):
        if m_max < 1:
            raise NotFound("m_max < 1")
        return 1
    xi = J.hi
    for m in range(0, m_max + 1):
        if xi >= Q.r - EMPTY_TOL:
            return m
        xi *= Q.q0
    raise NotFound(f"no full return within m_max={m_max}; raise m_max")
