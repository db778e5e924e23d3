"""Frobenius-Perron operators of the greedy and lazy maps, acting exactly on step functions."""

from __future__ import annotations

from dataclasses import dataclass, field

from .base import BasePair
from .errors import BreakpointOverflow, DomainMismatch
from .maps import check_kind
from .stepfn import StepFunction

BREAKPOINT_CAP = 20000
CONVERGED_INCREMENT = 1e-12


@dataclass(frozen=True)
class FPOperator:
    base: BasePair
    kind: str = "greedy"

    def __post_init__(self):
        check_kind(self.kind)

    def __call__(self, f: StepFunction) -> StepFunction:
        return apply(self, f)

    @property
    def support(self) -> tuple[float, float]:
        """Interval carrying the invariant density: [0, r) or (ell, right]."""
        Q = self.base
        return (0.0, Q.r) if self.kind == "greedy" else (Q.ell, Q.right)


def apply(op: FPOperator, f: StepFunction) -> StepFunction:
    """One application of the transfer operator.

    greedy: Gf(x) = f(x/q0)/q0 * 1_[0,r)(x) + f((x+1)/q1)/q1
    lazy:   Lf(x) = f(x/q0)/q0 + f((x+1)/q1)/q1 * 1_(ell,right](x)
    """
    Q = op.base
    R = Q.right
    if f.domain_right != R:
        raise DomainMismatch(f"step function lives on [0,{f.domain_right}], operator on [0,{R}]")
    if op.kind == "greedy":
        first = f.affine_image(Q.q0, 0.0, 0.0, Q.r, 1.0 / Q.q0)
        second = f.affine_image(Q.q1, 1.0, 0.0, R, 1.0 / Q.q1)
    else:
        first = f.affine_image(Q.q0, 0.0, 0.0, R, 1.0 / Q.q0)
        second = f.affine_image(Q.q1, 1.0, Q.ell, R, 1.0 / Q.q1)
    return first + second


def residual(op: FPOperator, f: StepFunction) -> float:
    """||Pf - f||_1."""
    return apply(op, f).l1_distance(f)


@dataclass
class IterationResult:
    increments: list[float] = field(default_factory=list)
    breakpoint_counts: list[int] = field(default_factory=list)
    mass_outside: list[float] = field(default_factory=list)
    final: StepFunction | None = None

    def rows(self):
        """(n, l1_increment, breakpoint_count, mass_outside_support) per iterate."""
        for i, row in enumerate(zip(self.increments, self.breakpoint_counts, self.mass_outside)):
            yield (i + 1, *row)


def _mass_outside(op: FPOperator, f: StepFunction) -> float:
    Q = op.base
    if op.kind == "greedy":
        return f.mass_on(Q.r, Q.right)
    return f.mass_on(0.0, Q.ell)


def iterate(
    op: FPOperator,
    f0: StepFunction,
    n: int,
    cap: int = BREAKPOINT_CAP,
    stop_early: bool = True,
) -> IterationResult:
    """Apply the operator up to n times, recording the L1 Cauchy increments.

    Stops once three consecutive increments fall below 1e-12 (unless
    ``stop_early`` is off).
    """
    out = IterationResult()
    f = f0
    quiet = 0
    for _ in range(n):
        g = apply(op, f)
        if len(g.breakpoints) > cap:
            raise BreakpointOverflow(f"{len(g.breakpoints)} breakpoints exceed cap {cap}")
        inc = g.l1_distance(f)
        out.increments.append(inc)
        out.breakpoint_counts.append(len(g.breakpoints))
        out.mass_outside.append(_mass_outside(op, g))
        f = g
        quiet = quiet + 1 if inc < CONVERGED_INCREMENT else 0
        if stop_early and quiet >= 3:
            break
    out.final = f
    return out


def power(op: FPOperator, f: StepFunction, n: int) -> StepFunction:
    for _ in range(n):
        f = apply(op, f)
    return f


def power_expansion_check(op: FPOperator, f: StepFunction, N: int) -> float:
    """L1 gap between P^N f and the cylinder sum over words of length N.

    The second route is sum_w (1/A_w) 1_{J_w}(y) f(G_w^{-1} y), built from
    the cylinder images J_w and weights A_w rather than by iterating P.
    """
    from .cylinders import level_partition

    if not 1 <= N <= 10:
        raise ValueError("N must be between 1 and 10")
    direct = power(op, f, N)
    total = StepFunction.constant(f.domain_right, 0.0)
    for cyl in level_partition(op.base, N, kind=op.kind):
        if cyl.image.is_empty:
            continue
        # open/closed ends differ from [lo, hi) only on null sets
        img = cyl.image
        total = total + f.affine_image(cyl.weight, cyl.offset, img.lo, img.hi, 1.0 / cyl.weight)
    return direct.l1_distance(total)
