"""Monte Carlo and orbit statistics: Birkhoff averages, the mean gap between the
greedy and lazy measures, expansion branching, unique-to-depth fractions and
correlation decay.

Random draws are made in fixed blocks, each with its own ``SeedSequence``
spawn key, so results depend only on (seed, n_samples) and never on the
number of worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .base import BasePair, Word
from .density import DensityPair
from .errors import BranchOverflow, ConsistencyError, NotStrict, OutOfDomain
from .maps import DOMAIN_TOL, check_kind, expansion, normalized_error, to_domain

BLOCK = 4096
MAX_BRANCHES = 2**20
THETA_REL_CAP = 1e-6
THETA_MAX_J = 60
SCALAR_BATCH = 8


def n_threads() -> int:
    env = os.environ.get("QEXP_THREADS")
    cpus = os.cpu_count() or 1
    if env:
        return max(1, min(int(env), cpus))
    return cpus


def _map(fn, items):
    items = list(items)
    workers = min(n_threads(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _blocks(n: int):
    return [(b, min(BLOCK, n - b * BLOCK)) for b in range((n + BLOCK - 1) // BLOCK)]


def _block_uniforms(seed: int, block: int, size: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))
    return rng.random(size)


def uniforms(seed: int, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """n uniform draws on [lo, hi); the i-th draw depends only on (seed, i)."""
    parts = [_block_uniforms(seed, b, size) for b, size in _blocks(n)]
    u = np.concatenate(parts) if parts else np.empty(0)
    return lo + (hi - lo) * u


@dataclass(frozen=True)
class SampleReport:
    base: BasePair
    n_samples: int
    depth: int
    seed: int
    statistic: str
    mean: float
    stderr: float

    def as_row(self) -> dict:
        return {
            "statistic": self.statistic,
            "q0": self.base.q0,
            "q1": self.base.q1,
            "depth": self.depth,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "mean": self.mean,
            "stderr": self.stderr,
        }


# -- vectorized orbits ---------------------------------------------------------------


def step_many(Q: BasePair, x: np.ndarray, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """One greedy or lazy step applied to an array of points; returns (digits, images)."""
    if kind == "greedy":
        d = x >= Q.greedy_switch
    else:
        d = x > Q.lazy_switch
    y = np.where(d, Q.q1 * x - 1.0, Q.q0 * x)
    if np.any(y < -DOMAIN_TOL) or np.any(y > Q.right + DOMAIN_TOL):
        raise OutOfDomain("orbit left I_Q")
    return d, np.clip(y, 0.0, Q.right)


def _birkhoff_scalar(Q: BasePair, x: float, n: int, kind: str) -> float:
    # numpy's per-call overhead dominates for a single orbit
    q0, q1, R = Q.q0, Q.q1, Q.right
    greedy = kind == "greedy"
    switch = Q.greedy_switch if greedy else Q.lazy_switch
    acc = 0.0
    for _ in range(n):
        acc += x
        one = x >= switch if greedy else x > switch
        x = q1 * x - 1.0 if one else q0 * x
        if x < 0.0 or x > R:
            if x < -DOMAIN_TOL or x > R + DOMAIN_TOL:
                raise OutOfDomain("orbit left I_Q")
            x = min(max(x, 0.0), R)
    return acc / n


def birkhoff_averages(Q: BasePair, xs, n: int, kind: str = "greedy") -> np.ndarray:
    """(1/n) sum_{j<n} T^j(x) for each starting point in xs."""
    check_kind(kind)
    if n < 1:
        raise ValueError("n must be >= 1")
    x = np.array([to_domain(Q, float(v)) for v in np.atleast_1d(xs)])
    if len(x) <= SCALAR_BATCH:
        return np.array([_birkhoff_scalar(Q, float(v), n, kind) for v in x])
    acc = np.zeros_like(x)
    for _ in range(n):
        acc += x
        _, x = step_many(Q, x, kind)
    return acc / n


def theta_check_indices(Q: BasePair, n: int) -> list[int]:
    """Indices j at which theta_j is compared with the float orbit.

    Rounding in the orbit grows like qmax^j * eps, so j is capped where that
    reaches THETA_REL_CAP (and at THETA_MAX_J).
    """
    eps = np.finfo(float).eps
    j_cap = int(math.log(THETA_REL_CAP / (16 * eps)) / math.log(Q.qmax))
    j_cap = max(1, min(j_cap, THETA_MAX_J))
    return sorted({min(j, j_cap) for j in (1, max(1, n // 2), n)})


def validate_theta(Q: BasePair, x: float, n: int, kind: str = "greedy") -> float:
    """Check theta_j = T^j(x) at a few j; return the worst scaled discrepancy."""
    js = theta_check_indices(Q, n)
    orb = expansion(Q, x, max(js), kind)
    worst = 0.0
    eps = np.finfo(float).eps
    for j in js:
        theta = normalized_error(Q, x, orb.digits, j)
        tol = max(16 * eps * Q.qmax**j, 1e-15) * Q.right
        err = abs(theta - orb.points[j])
        if err > tol:
            raise ConsistencyError(f"theta_{j}={theta!r} but orbit point is {orb.points[j]!r}")
        worst = max(worst, err / Q.right)
    return worst


def birkhoff_average(Q: BasePair, x: float, n: int, kind: str = "greedy", validate: bool = True) -> float:
    """Time average of the orbit of x (which equals the average of the normalized errors)."""
    avg = float(birkhoff_averages(Q, [x], n, kind)[0])
    if validate:
        validate_theta(Q, x, n, kind)
    return avg


# -- mean gap ---------------------------------------------------------------------


@dataclass(frozen=True)
class GapResult:
    mean_greedy: float
    midpoint: float
    mean_lazy: float

    @property
    def margins(self) -> tuple[float, float]:
        return self.midpoint - self.mean_greedy, self.mean_lazy - self.midpoint

    @property
    def ordered(self) -> bool:
        return self.mean_greedy < self.midpoint < self.mean_lazy


def chebyshev_gap(Q: BasePair, d: DensityPair) -> GapResult:
    """(mean of h_greedy, 1/(2(q1-1)), mean of h_lazy); strictly ordered when Q is strict."""
    if not Q.strict:
        raise NotStrict("the three means coincide on the boundary q0+q1 = q0*q1")
    return GapResult(d.h_greedy.first_moment(), 0.5 * Q.right, d.h_lazy.first_moment())


# -- expansion branching ------------------------------------------------------------


def _children(Q: BasePair, x: float):
    # digit 0 first so depth-first output comes out lexicographically sorted
    if x <= Q.lazy_switch:
        yield 0, to_domain(Q, Q.q0 * x)
    if x >= Q.greedy_switch:
        yield 1, to_domain(Q, Q.q1 * x - 1.0)


def enumerate_expansions(Q: BasePair, x: float, depth: int) -> list[Word]:
    """Every digit word of length depth whose orbit from x stays inside I_Q, sorted."""
    if not 0 <= depth <= 24:
        raise ValueError("depth must be between 0 and 24")
    x = to_domain(Q, x)
    out: list[Word] = []
    stack = [((), x)]
    while stack:
        word, y = stack.pop()
        if len(word) == depth:
            out.append(word)
            if len(out) > MAX_BRANCHES:
                raise BranchOverflow(f"more than {MAX_BRANCHES} expansions")
            continue
        kids = list(_children(Q, y))
        for d, z in reversed(kids):
            stack.append((word + (d,), z))
    return out


def count_expansions(Q: BasePair, x: float, depth: int, at_least: int | None = None) -> int:
    """Number of admissible words of length depth from x.

    With ``at_least`` the search stops as soon as that many are found and
    returns ``at_least``; this keeps deep queries cheap.
    """
    x = to_domain(Q, x)
    limit = at_least if at_least is not None else MAX_BRANCHES + 1
    count = 0
    stack = [(0, x)]
    while stack:
        k, y = stack.pop()
        if k == depth:
            count += 1
            if count >= limit:
                if at_least is None:
                    raise BranchOverflow(f"more than {MAX_BRANCHES} expansions")
                return at_least
            continue
        for _, z in _children(Q, y):
            stack.append((k + 1, z))
    return count


# -- unique-to-depth fraction -------------------------------------------------------


def _unique_depths(Q: BasePair, x: np.ndarray, depths: list[int]) -> np.ndarray:
    """Boolean matrix: greedy and lazy prefixes of length depths[i] coincide."""
    out = np.zeros((len(depths), len(x)), dtype=bool)
    same = np.ones(len(x), dtype=bool)
    y = x.copy()
    targets = {d: i for i, d in enumerate(depths)}
    if 0 in targets:
        out[targets[0]] = same
    for k in range(1, max(depths) + 1):
        # while the prefixes agree both orbits are the same point y
        split = (y >= Q.greedy_switch) & (y <= Q.lazy_switch)
        same &= ~split
        _, y = step_many(Q, y, "greedy")
        if k in targets:
            out[targets[k]] = same
    return out


def univoque_profile(
    Q: BasePair, depths, n_samples: int, seed: int, require_strict: bool = True
) -> list[SampleReport]:
    """Unique-to-depth fractions at several depths, from one shared sample."""
    if require_strict and not Q.strict:
        raise NotStrict("the univoque set is only null for q0+q1 > q0*q1")
    depths = sorted(set(int(d) for d in depths))

    def run(block):
        b, size = block
        x = Q.right * _block_uniforms(seed, b, size)
        return _unique_depths(Q, x, depths)

    hits = np.concatenate(_map(run, _blocks(n_samples)), axis=1)
    reports = []
    for i, depth in enumerate(depths):
        p = float(hits[i].mean())
        se = math.sqrt(p * (1 - p) / n_samples)
        reports.append(SampleReport(Q, n_samples, depth, seed, "univoque_fraction", p, se))
    return reports


def univoque_fraction(
    Q: BasePair, depth: int, n_samples: int, seed: int, require_strict: bool = True
) -> SampleReport:
    """Fraction of uniform x in I_Q whose greedy and lazy depth-prefixes coincide."""
    return univoque_profile(Q, [depth], n_samples, seed, require_strict)[0]


def multiplicity_fraction(Q: BasePair, depth: int, n_samples: int, seed: int) -> SampleReport:
    """Fraction of uniform x having at least two admissible words of length depth (DFS)."""
    x = uniforms(seed, n_samples, 0.0, Q.right)
    hits = np.array([count_expansions(Q, float(v), depth, at_least=2) >= 2 for v in x])
    p = float(hits.mean())
    return SampleReport(Q, n_samples, depth, seed, "multiplicity_fraction", p, math.sqrt(p * (1 - p) / n_samples))


# -- correlations -------------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationSeries:
    values: np.ndarray  # C_0 .. C_nmax
    stderr: np.ndarray


def _interval_mass(h, A) -> float:
    return h.mass_on(A[0], A[1])


def mixing_correlation(
    Q: BasePair,
    d: DensityPair,
    A: tuple[float, float],
    B: tuple[float, float],
    n_max: int,
    n_samples: int,
    seed: int,
    kind: str = "greedy",
) -> CorrelationSeries:
    """Estimate C_n = mu(A ∩ T^-n B) - mu(A) mu(B) for n = 0..n_max.

    Points are drawn from the invariant density by exact inverse CDF, so
    mu(A), mu(B) are taken exactly from the density.
    """
    h = d.density(kind)
    lo, hi = (0.0, Q.r) if kind == "greedy" else (Q.ell, Q.right)
    for name, (a, b) in (("A", A), ("B", B)):
        if a < lo - DOMAIN_TOL or b > hi + DOMAIN_TOL or b < a:
            raise OutOfDomain(f"{name}=[{a}, {b}] is not inside the support [{lo}, {hi}]")
    mu_ab = _interval_mass(h, A) * _interval_mass(h, B)

    def run(block):
        b, size = block
        x = h.inverse_cdf(_block_uniforms(seed, b, size))
        in_a = (x >= A[0]) & (x < A[1])
        rows = np.empty((n_max + 1, size))
        for n in range(n_max + 1):
            rows[n] = in_a & (x >= B[0]) & (x < B[1])
            if n < n_max:
                _, x = step_many(Q, x, kind)
        return rows

    joint = np.concatenate(_map(run, _blocks(n_samples)), axis=1)
    values = joint.mean(axis=1) - mu_ab
    stderr = joint.std(axis=1, ddof=1) / math.sqrt(n_samples)
    return CorrelationSeries(values, stderr)
