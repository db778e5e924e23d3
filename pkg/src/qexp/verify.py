"""The ten acceptance checks, shared by ``qexp verify`` and the test suite.

Each check returns a :class:`CheckResult`; a check passes only if its
numerical conditions hold and it ran inside its time budget (if any).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .base import BasePair, new_base, random_bases, reference_base
from .cylinders import full_return, image_interval, is_full_image, is_return_image, level_partition, Interval
from .density import depth_for_tail, invariant_densities, jump_function
from .ergodic import (
    birkhoff_averages,
    chebyshev_gap,
    enumerate_expansions,
    multiplicity_fraction,
    uniforms,
    univoque_fraction,
    univoque_profile,
)
from .maps import expansion
from .stepfn import StepFunction
from .transfer import FPOperator, iterate, residual

REFERENCE_VALUES = (0.8369, 0.6554, 0.3896)
REFERENCE_EDGES = (0.682328, 1.1479, 1.465573)
BOUNDARY_Q0 = (1.5, 2.0, 2.5, 3.0, 4.0)


@dataclass(frozen=True)
class Profile:
    name: str
    birkhoff_n: int
    birkhoff_orbits: int = 50
    univoque_samples: int = 10_000
    multiplicity_samples: int = 1_000


PROFILES = {
    "desk": Profile("desk", birkhoff_n=100_000),
    "ci": Profile("ci", birkhoff_n=10_000),
}


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: float | None = None
    values: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        t = f"{self.seconds:.2f}s" + (f"/{self.budget:g}s" if self.budget else "")
        return f"[{status}] {self.number:2d} {self.name} ({t}): {self.detail}"


def _timed(number, name, budget, fn, *args) -> CheckResult:
    t0 = time.perf_counter()
    try:
        ok, detail, values = fn(*args)
    except Exception as exc:  # a crash is a failure with a message, not an abort
        ok, detail, values = False, f"{type(exc).__name__}: {exc}", {}
    dt = time.perf_counter() - t0
    if budget is not None and dt >= budget:
        ok = False
        detail += f"; over budget ({dt:.2f}s >= {budget}s)"
    return CheckResult(number, name, bool(ok), detail, dt, budget, values)


# -- individual checks -----------------------------------------------------------


def check_reference_density():
    Q = reference_base()
    h = invariant_densities(Q).h_greedy
    pieces = h.support_pieces()
    vals = [v for _, _, v in pieces]
    ends = [b for _, b, _ in pieces]
    ok = len(pieces) == 3
    if ok:
        dv = max(abs(a - b) for a, b in zip(vals, REFERENCE_VALUES))
        de = max(abs(a - b) for a, b in zip(ends, REFERENCE_EDGES))
        ok = dv <= 5e-4 and de <= 5e-6
        detail = f"3 pieces, max value error {dv:.2e}, max breakpoint error {de:.2e}"
    else:
        detail = f"{len(pieces)} support pieces"
    return ok, detail, {"values": vals, "breakpoints": ends}


def check_boundary_family():
    worst_density = worst_inc = 0.0
    ok = True
    for q0 in BOUNDARY_Q0:
        Q = new_base(q0, q0 / (q0 - 1.0))
        ok &= not Q.strict
        d = invariant_densities(Q)
        c = StepFunction.constant(Q.right, Q.q1 - 1.0)
        for h in (d.h_greedy, d.h_lazy):
            worst_density = max(worst_density, float(np.max(np.abs(h.values - (Q.q1 - 1.0)))))
        for kind in ("greedy", "lazy"):
            inc = iterate(FPOperator(Q, kind), c, 1).increments[0]
            worst_inc = max(worst_inc, inc)
    ok &= worst_density <= 1e-9 and worst_inc <= 1e-12
    return ok, f"max |h - (q1-1)| {worst_density:.1e}, max first increment {worst_inc:.1e}", {}


def check_fixed_point(seed: int):
    worst = -math.inf
    for Q in random_bases(seed, 20):
        for kind in ("greedy", "lazy"):
            h, tail = jump_function(Q, kind)
            worst = max(worst, residual(FPOperator(Q, kind), h) - (2 * tail + 1e-9))
    return worst <= 0, f"max(residual - 2*tail - 1e-9) = {worst:.2e} over 20 bases x 2 maps", {}


def check_transfer():
    Q = reference_base()
    h = invariant_densities(Q).h_greedy
    f0 = StepFunction.constant(Q.right, 1.0 / Q.right)
    res = iterate(FPOperator(Q, "greedy"), f0, 60, stop_early=False)
    dist = res.final.l1_distance(h)
    inc = np.array(res.increments)
    # eventually monotone: non-increasing over the second half, up to rounding noise
    tail = inc[len(inc) // 2 :]
    mono = bool(np.all(np.diff(tail) <= 1e-12))
    mass = res.mass_outside[-1]
    ok = dist <= 1e-3 and mono and mass < 1e-6
    return ok, f"L1 to h {dist:.1e}, tail monotone {mono}, mass outside {mass:.1e}", {}


def _first_return_by_images(Q: BasePair, u, m_max: int = 200) -> int:
    # independent route: recompute J_{u0^m} by the forward recursion for each m
    for m in range(m_max + 1):
        if is_return_image(Q, image_interval(Q, tuple(u) + (0,) * m)):
            return m
    raise RuntimeError("no return found")


def level_two_intervals(Q: BasePair) -> list[tuple[str, Interval, tuple[float, float]]]:
    """(name, computed, expected (lo, hi)) for the level-two cylinder formulas."""
    q0, q1, R, r = Q.q0, Q.q1, Q.right, Q.r
    doms = {c.word_str: c.domain for c in level_partition(Q, 2)}
    expected_dom = {
        "00": (0.0, 1 / (q0 * q1)),
        "01": (1 / (q0 * q1), 1 / q1),
        "10": (1 / q1, 1 / q1 + 1 / q1**2),
        "11": (1 / q1 + 1 / q1**2, R),
    }
    expected_img = {"00": (0.0, r), "01": (0.0, q0 - 1.0), "10": (0.0, r), "11": (0.0, R)}
    out = [(f"I_{w}", doms[w], expected_dom[w]) for w in expected_dom]
    out += [(f"J_{w}", image_interval(Q, w), expected_img[w]) for w in expected_img]
    return out


def check_partitions(seed: int):
    bases = random_bases(seed, 10)
    worst_len = worst_overlap = worst_formula = 0.0
    tri_ok = True
    for Q in bases:
        for n in range(1, 13):
            cyls = level_partition(Q, n)
            total = math.fsum(c.domain.length for c in cyls)
            worst_len = max(worst_len, abs(total - Q.right))
            for a, b in zip(cyls, cyls[1:]):
                worst_overlap = max(worst_overlap, a.domain.hi - b.domain.lo)
            for c in cyls:
                full = is_full_image(Q, c.image)
                ones = all(c.word)
                if full != ones:
                    tri_ok = False
                if not full and not (c.image.lo == 0.0 and not c.image.hi_closed and c.image.hi < Q.right):
                    tri_ok = False
        for _, got, (lo, hi) in level_two_intervals(Q):
            worst_formula = max(worst_formula, abs(got.lo - lo), abs(got.hi - hi))
    rng = np.random.default_rng(seed)
    mismatches = 0
    tried = 0
    while tried < 100:
        Q = bases[tried % len(bases)]
        u = tuple(int(v) for v in rng.integers(0, 2, size=int(rng.integers(1, 11))))
        if image_interval(Q, u).is_empty:
            continue
        tried += 1
        if full_return(Q, u) != _first_return_by_images(Q, u):
            mismatches += 1
    ok = worst_len <= 1e-9 and worst_overlap <= 0 and tri_ok and worst_formula <= 1e-12 and mismatches == 0
    detail = (
        f"length error {worst_len:.1e}, overlap {max(worst_overlap, 0):.1e}, trichotomy {tri_ok}, "
        f"level-2 formulas {worst_formula:.1e}, full_return mismatches {mismatches}/100"
    )
    return ok, detail, {}


def check_birkhoff(profile: Profile, seed: int):
    Q = reference_base()
    d = invariant_densities(Q)
    parts = []
    ok = True
    for kind in ("greedy", "lazy"):
        xs = uniforms(seed, profile.birkhoff_orbits, 0.0, Q.right)
        avgs = birkhoff_averages(Q, xs, profile.birkhoff_n, kind)
        target = d.density(kind).first_moment()
        se = avgs.std(ddof=1) / math.sqrt(len(avgs))
        z = abs(avgs.mean() - target) / se
        ok &= z <= 4
        parts.append(f"{kind} {avgs.mean():.5f} vs {target:.5f} ({z:.2f} se)")
    return ok, ", ".join(parts), {}


def check_gap(seed: int):
    worst = math.inf
    ordered = True
    for Q in random_bases(seed, 20):
        g = chebyshev_gap(Q, invariant_densities(Q, depth_for_tail(Q, 1e-12)))
        ordered &= g.ordered
        worst = min(worst, *g.margins)
    return ordered and worst > 1e-6, f"strict ordering {ordered}, smallest margin {worst:.3e}", {}


def check_univoque(profile: Profile, seed: int):
    Q = reference_base()
    depths = (8, 16, 32, 64)
    reps = univoque_profile(Q, depths, profile.univoque_samples, seed)
    fr = [r.mean for r in reps]
    mono = all(b <= a for a, b in zip(fr, fr[1:]))
    boundary = univoque_fraction(new_base(3.0, 1.5), 64, profile.univoque_samples, seed, require_strict=False)
    ok = mono and fr[-1] < 0.01 and boundary.mean > 0.99
    detail = "fractions " + "/".join(f"{v:.4f}" for v in fr) + f", boundary {boundary.mean:.4f}"
    return ok, detail, {"fractions": fr}


def check_multiplicity(profile: Profile, seed: int):
    Q = reference_base()
    rep = multiplicity_fraction(Q, 48, profile.multiplicity_samples, seed)
    bad = 0
    xs = uniforms(seed + 1, 100, 0.0, Q.right)
    for i, x in enumerate(xs):
        depth = 1 + i % 14
        words = enumerate_expansions(Q, float(x), depth)
        g = expansion(Q, float(x), depth, "greedy").digits
        l_ = expansion(Q, float(x), depth, "lazy").digits
        if words[-1] != g or words[0] != l_:
            bad += 1
    ok = rep.mean >= 0.99 and bad == 0
    return ok, f"fraction with >= 2 expansions {rep.mean:.4f}, extremality failures {bad}/100", {}


def check_golden():
    phi = (1 + math.sqrt(5)) / 2
    Q = new_base(phi, phi)
    h = invariant_densities(Q).h_greedy
    parry = (StepFunction.indicator(Q.right, 0.0, 1.0) + StepFunction.indicator(Q.right, 0.0, 1 / phi, 1 / phi)).normalize()
    dist = h.l1_distance(parry)
    return dist <= 1e-9, f"L1 distance to Parry density {dist:.1e}", {}


def run_all(profile: str = "desk", seed: int = 0) -> list[CheckResult]:
    prof = PROFILES[profile]
    return [
        _timed(1, "reference density", 1.0, check_reference_density),
        _timed(2, "boundary family", 1.0, check_boundary_family),
        _timed(3, "fixed-point identity", None, check_fixed_point, seed),
        _timed(4, "transfer convergence", 10.0, check_transfer),
        _timed(5, "partition structure", None, check_partitions, seed),
        _timed(6, "birkhoff agreement", 20.0, check_birkhoff, prof, seed),
        _timed(7, "mean gap ordering", None, check_gap, seed),
        _timed(8, "univoque decay", 30.0, check_univoque, prof, seed),
        _timed(9, "multiplicity", None, check_multiplicity, prof, seed),
        _timed(10, "golden-ratio cross-check", None, check_golden),
    ]
