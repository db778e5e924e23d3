"""Piecewise-constant functions on [0, R].

Piece i covers [b_i, b_{i+1}) with b_0 = 0; the last piece is closed at R.
Every instance is kept in canonical form: breakpoints strictly inside
(0, R), no piece shorter than ``MERGE_TOL``, and no two neighbours with
(numerically) equal values.  Merging is mass preserving, so integrals and
monotonicity survive canonicalization.
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, Iterator

import numpy as np

from .errors import DomainMismatch, OutOfDomain, ZeroIntegral

MERGE_TOL = 1e-11
VALUE_TOL = 1e-12
DOMAIN_TOL = 1e-12


def _same_domain(f: "StepFunction", g: "StepFunction") -> None:
    if f.domain_right != g.domain_right:
        raise DomainMismatch(f"domains [0,{f.domain_right}] and [0,{g.domain_right}] differ")


def _collapse_tiny(edges: np.ndarray, values: np.ndarray, tol: float):
    """Collapse runs of pieces shorter than tol onto their midpoint.

    The mass of each run is handed to its neighbours, split at the
    midpoint, so the integral is unchanged and new values are averages.
    """
    R = edges[-1]
    lo = list(edges[:-1])
    hi = list(edges[1:])
    val = list(values)
    out_lo: list[float] = []
    out_hi: list[float] = []
    out_v: list[float] = []
    carry = None  # (new left edge, mass) pushed onto the next kept piece
    i, n = 0, len(val)
    while i < n:
        if hi[i] - lo[i] >= tol:
            a, b, v = lo[i], hi[i], val[i]
            if carry is not None:
                m, mass = carry
                v = (v * (b - a) + mass) / (b - m)
                a = m
                carry = None
            out_lo.append(a)
            out_hi.append(b)
            out_v.append(v)
            i += 1
            continue
        j = i
        while j < n and hi[j] - lo[j] < tol:
            j += 1
        s, t = lo[i], hi[j - 1]
        if s == 0.0:
            m = 0.0
        elif t == R:
            m = R
        else:
            m = 0.5 * (s + t)
        left_mass = right_mass = 0.0
        for k in range(i, j):
            left_mass += val[k] * max(0.0, min(hi[k], m) - lo[k])
            right_mass += val[k] * max(0.0, hi[k] - max(lo[k], m))
        if out_v:
            a = out_lo[-1]
            out_v[-1] = (out_v[-1] * (out_hi[-1] - a) + left_mass) / (m - a)
            out_hi[-1] = m
        else:
            right_mass += left_mass
        if carry is not None:
            right_mass += carry[1]
        carry = (m, right_mass)
        i = j
    if carry is not None and out_v:
        # trailing run with nothing to its right
        a = out_lo[-1]
        out_v[-1] = (out_v[-1] * (out_hi[-1] - a) + carry[1]) / (R - a)
        out_hi[-1] = R
    if not out_v:
        total = float(np.sum(values * np.diff(edges)))
        return np.array([0.0, R]), np.array([total / R if R > 0 else 0.0])
    return np.array([out_lo[0]] + out_hi), np.array(out_v)


def _merge_equal(edges: np.ndarray, values: np.ndarray, vtol: float):
    diff = np.abs(np.diff(values))
    scale = np.maximum(1.0, np.maximum(np.abs(values[:-1]), np.abs(values[1:])))
    if not np.any(diff <= vtol * scale):
        return edges, values
    out_e = [edges[0]]
    out_v: list[float] = []
    cur_v = values[0]
    cur_len = edges[1] - edges[0]
    for k in range(1, len(values)):
        v = values[k]
        length = edges[k + 1] - edges[k]
        if abs(v - cur_v) <= vtol * max(1.0, abs(v), abs(cur_v)):
            if v != cur_v:
                cur_v = (cur_v * cur_len + v * length) / (cur_len + length)
            cur_len += length
        else:
            out_e.append(edges[k])
            out_v.append(cur_v)
            cur_v, cur_len = v, length
    out_e.append(edges[-1])
    out_v.append(cur_v)
    return np.array(out_e), np.array(out_v)


def canonicalize(edges, values, tol: float = MERGE_TOL, vtol: float = VALUE_TOL):
    edges = np.asarray(edges, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = np.diff(edges) > 0
    if not np.all(keep):
        values = values[keep]
        edges = np.concatenate([[edges[0]], edges[1:][keep]])
        if len(values) == 0:
            return np.array([0.0, edges[-1]]), np.array([0.0])
    if np.any(np.diff(edges) < tol):
        edges, values = _collapse_tiny(edges, values, tol)
    return _merge_equal(edges, values, vtol)


class StepFunction:
    """Canonical piecewise-constant function on [0, domain_right]."""

    __slots__ = ("domain_right", "breakpoints", "values")

    def __init__(self, domain_right: float, breakpoints: Iterable[float] = (), values: Iterable[float] = (0.0,)):
        R = float(domain_right)
        if not R > 0:
            raise ValueError("domain_right must be positive")
        b = np.asarray(list(breakpoints), dtype=float)
        v = np.asarray(list(values), dtype=float)
        if len(v) != len(b) + 1:
            raise ValueError(f"{len(b)} breakpoints need {len(b) + 1} values, got {len(v)}")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        if len(b) and (np.any(np.diff(b) <= 0) or b[0] <= 0 or b[-1] >= R):
            raise ValueError("breakpoints must be strictly increasing inside (0, R)")
        edges, vals = canonicalize(np.concatenate([[0.0], b, [R]]), v)
        self._set(R, edges, vals)

    def _set(self, R, edges, vals):
        bp = np.ascontiguousarray(edges[1:-1])
        vals = np.ascontiguousarray(vals)
        bp.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "domain_right", R)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("StepFunction is immutable")

    @classmethod
    def from_edges(cls, edges, values) -> "StepFunction":
        """Build from a full non-decreasing edge list [0, ..., R] (zero-length pieces allowed)."""
        edges = np.asarray(edges, dtype=float)
        R = float(edges[-1])
        e, v = canonicalize(edges, values)
        obj = cls.__new__(cls)
        obj._set(R, e, v)
        return obj

    @classmethod
    def constant(cls, R: float, c: float) -> "StepFunction":
        return cls(R, (), (c,))

    @classmethod
    def indicator(cls, R: float, lo: float, hi: float, weight: float = 1.0) -> "StepFunction":
        """weight * 1_[lo, hi), clipped to [0, R]; hi >= R includes R itself."""
        lo, hi = max(0.0, lo), min(R, hi)
        if hi <= lo:
            return cls.constant(R, 0.0)
        return cls.from_edges([0.0, lo, hi, R], [0.0, weight, 0.0])

    # -- structure -----------------------------------------------------------------

    @property
    def edges(self) -> np.ndarray:
        return np.concatenate([[0.0], self.breakpoints, [self.domain_right]])

    def pieces(self) -> Iterator[tuple[float, float, float]]:
        e = self.edges
        for i, v in enumerate(self.values):
            yield float(e[i]), float(e[i + 1]), float(v)

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        return f"StepFunction(R={self.domain_right!r}, pieces={len(self)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return (
            self.domain_right == other.domain_right
            and np.array_equal(self.breakpoints, other.breakpoints)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    # -- evaluation ------------------------------------------------------------

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        if np.any(xa < -DOMAIN_TOL) or np.any(xa > self.domain_right + DOMAIN_TOL):
            raise OutOfDomain(f"x outside [0, {self.domain_right}]")
        idx = np.searchsorted(self.breakpoints, xa, side="right")
        out = self.values[idx]
        return float(out) if out.ndim == 0 else out

    eval = __call__

    def _eval_unchecked(self, x: np.ndarray) -> np.ndarray:
        return self.values[np.searchsorted(self.breakpoints, x, side="right")]

    # -- algebra -----------------------------------------------------------------

    def combine(self, other: "StepFunction", op: str = "add") -> "StepFunction":
        _same_domain(self, other)
        edges = np.union1d(self.edges, other.edges)
        mids = 0.5 * (edges[:-1] + edges[1:])
        a, b = self._eval_unchecked(mids), other._eval_unchecked(mids)
        if op == "add":
            vals = a + b
        elif op == "sub":
            vals = a - b
        else:
            raise ValueError(f"op must be 'add' or 'sub', not {op!r}")
        return StepFunction.from_edges(edges, vals)

    def __add__(self, other):
        if isinstance(other, StepFunction):
            return self.combine(other, "add")
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, StepFunction):
            return self.combine(other, "sub")
        return NotImplemented

    def scale(self, c: float) -> "StepFunction":
        return StepFunction.from_edges(self.edges, self.values * float(c))

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1.0)

    def abs(self) -> "StepFunction":
        return StepFunction.from_edges(self.edges, np.abs(self.values))

    # -- integrals -----------------------------------------------------------------

    def integrate(self) -> float:
        return float(np.dot(self.values, np.diff(self.edges)))

    def first_moment(self) -> float:
        e = self.edges
        return float(np.dot(self.values, (e[1:] ** 2 - e[:-1] ** 2))) / 2.0

    def l1_norm(self) -> float:
        return float(np.dot(np.abs(self.values), np.diff(self.edges)))

    def l1_distance(self, other: "StepFunction") -> float:
        return (self - other).l1_norm()

    def mass_on(self, lo: float, hi: float) -> float:
        """Integral of |f| over [lo, hi]."""
        e = self.edges
        left = np.clip(e[:-1], lo, hi)
        right = np.clip(e[1:], lo, hi)
        return float(np.dot(np.abs(self.values), right - left))

    def normalize(self) -> "StepFunction":
        total = self.integrate()
        if not total > 0:
            raise ZeroIntegral(f"cannot normalize a function with integral {total!r}")
        return self.scale(1.0 / total)

    # -- shape -----------------------------------------------------------------------

    def is_nonincreasing(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.diff(self.values) <= tol))

    def is_nondecreasing(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.diff(self.values) >= -tol))

    def support_pieces(self) -> list[tuple[float, float, float]]:
        return [p for p in self.pieces() if p[2] != 0.0]

    # -- transport -----------------------------------------------------------------

    def affine_image(self, slope: float, offset: float, lo: float, hi: float, weight: float = 1.0) -> "StepFunction":
        """y -> weight * f((y + offset)/slope) on [lo, hi), zero elsewhere.

        This is the pushforward term of the increasing affine branch
        x -> slope*x - offset; breakpoints b of f move to slope*b - offset.
        """
        R = self.domain_right
        lo, hi = max(0.0, lo), min(R, hi)
        if hi <= lo:
            return StepFunction.constant(R, 0.0)
        moved = slope * self.breakpoints - offset
        moved = moved[(moved > lo) & (moved < hi)]
        edges = np.concatenate([[0.0, lo], moved, [hi, R]])
        mids = 0.5 * (edges[:-1] + edges[1:])
        src = np.clip((mids + offset) / slope, 0.0, R)
        vals = weight * self._eval_unchecked(src)
        vals[mids < lo] = 0.0
        vals[mids >= hi] = 0.0
        return StepFunction.from_edges(edges, vals)

    # -- sampling ----------------------------------------------------------------------

    def inverse_cdf(self, u):
        """Quantile function of a nonnegative f normalized to a probability density."""
        if np.any(self.values < 0):
            raise ValueError("inverse_cdf needs a nonnegative function")
        e = self.edges
        masses = self.values * np.diff(e)
        total = masses.sum()
        if not total > 0:
            raise ZeroIntegral("cannot sample from a zero function")
        cdf = np.concatenate([[0.0], np.cumsum(masses) / total])
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(cdf, u, side="right") - 1
        idx = np.clip(idx, 0, len(masses) - 1)
        # pieces with zero mass are never selected because their cdf step is flat
        frac = (u - cdf[idx]) / np.where(masses[idx] > 0, masses[idx] / total, 1.0)
        x = e[idx] + np.clip(frac, 0.0, 1.0) * (e[idx + 1] - e[idx])
        return np.minimum(x, np.nextafter(e[idx + 1], -np.inf))

    # -- serialization -------------------------------------------------------------

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(["piece_index", "left", "right", "value"])
        for i, (a, b, v) in enumerate(self.pieces()):
            w.writerow([i, f"{a:.17g}", f"{b:.17g}", f"{v:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "StepFunction":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if rows and rows[0][0] == "piece_index":
            rows = rows[1:]
        if not rows:
            raise ValueError("empty step function CSV")
        edges = [float(rows[0][1])] + [float(r[2]) for r in rows]
        values = [float(r[3]) for r in rows]
        return cls.from_edges(edges, values)
