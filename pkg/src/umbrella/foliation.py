"""Level-curve foliations of a mapping and a grid-based tangency oracle.

The oracle finds points where all level curves through the point share a
tangent line. It works only from conic coefficients and their gradients,
never from the Jacobian routine or the minor conics, so agreement with
:func:`umbrella.locus.solve_singular_points` is an independent check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq, minimize

from .conics import Conic, classify_conic, level_conic
from .errors import InvalidInput
from .mapping import GDSMapping, Point2, as_point, evaluate, matrix_rank, rank_at

DEFAULT_GRID = 200
DEFAULT_TANGENCY_TOL = 1e-7
BOX_INFLATION = 3.0
# box used when the oracle is meant to cover the whole plane in practice
WIDE_INFLATION = 1000.0
MAX_SEEDS = 24
# first-stage descent result above which a seed is abandoned
SCREEN_OBJECTIVE = 1e-3
# normalized-cross value assigned where some gradient vanishes
_DEGENERATE_OBJECTIVE = 2.0


@dataclass(frozen=True)
class FoliationLevel:
    index: int
    center: Point2
    level: float
    conic: Conic
    kind: str

    def to_dict(self) -> dict:
        return {"index": self.index, "center": list(self.center), "level": self.level,
                "conic": self.conic.to_dict(), "kind": self.kind}


def levels_through_point(m: GDSMapping, q) -> list[FoliationLevel]:
    """The ell level curves ``F_i = F_i(q)`` with their kinds."""
    q = as_point(q)
    c = evaluate(m, q)
    out = []
    for i in range(m.ell):
        conic = level_conic(m, i, float(c[i]))
        out.append(FoliationLevel(i, Point2(*m.P[i]), float(c[i]), conic, classify_conic(conic)))
    return out


class Box(NamedTuple):
    x0: float
    y0: float
    x1: float
    y1: float

    @classmethod
    def parse(cls, text: str) -> "Box":
        try:
            vals = [float(v) for v in text.split(",")]
        except ValueError as exc:
            raise InvalidInput(f"box must be x0,y0,x1,y1, got {text!r}") from exc
        if len(vals) != 4:
            raise InvalidInput(f"box must be x0,y0,x1,y1, got {text!r}")
        return cls.checked(*vals)

    @classmethod
    def checked(cls, x0, y0, x1, y1) -> "Box":
        box = cls(float(x0), float(y0), float(x1), float(y1))
        if not (np.all(np.isfinite(box)) and box.x1 > box.x0 and box.y1 > box.y0):
            raise InvalidInput(f"box must satisfy x0 < x1 and y0 < y1, got {tuple(box)}")
        return box

    def inflated(self, factor: float) -> "Box":
        cx, cy = (self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2
        hw, hh = (self.x1 - self.x0) * factor / 2, (self.y1 - self.y0) * factor / 2
        return Box(cx - hw, cy - hh, cx + hw, cy + hh)

    def contains(self, x, margin: float = 0.0) -> bool:
        return (self.x0 - margin <= x[0] <= self.x1 + margin
                and self.y0 - margin <= x[1] <= self.y1 + margin)


def centers_box(m: GDSMapping, inflation: float = BOX_INFLATION) -> Box:
    """Bounding box of the centers, squared up to the larger side and scaled by ``inflation``."""
    lo, hi = m.P.min(axis=0), m.P.max(axis=0)
    side = max(float(np.max(hi - lo)), 1e-3 * (1 + float(np.max(np.abs(m.P)))))
    c = (lo + hi) / 2
    return Box(c[0] - side / 2, c[1] - side / 2, c[0] + side / 2, c[1] + side / 2).inflated(inflation)


class _Gradients:
    """Gradients of the level conics through a point, straight from conic coefficients."""

    def __init__(self, m: GDSMapping):
        cs = [level_conic(m, i, 0.0) for i in range(m.ell)]
        self.c20 = np.array([c.c20 for c in cs])
        self.c11 = np.array([c.c11 for c in cs])
        self.c02 = np.array([c.c02 for c in cs])
        self.c10 = np.array([c.c10 for c in cs])
        self.c01 = np.array([c.c01 for c in cs])
        self.centers = m.P
        self.pairs = list(itertools.combinations(range(m.ell), 2))
        self._rows = [(c.c20, c.c11, c.c02, c.c10, c.c01) for c in cs]

    def at(self, X, Y):
        X = np.asarray(X, dtype=float)[..., None]
        Y = np.asarray(Y, dtype=float)[..., None]
        gx = 2 * self.c20 * X + self.c11 * Y + self.c10
        gy = self.c11 * X + 2 * self.c02 * Y + self.c01
        return gx, gy

    def scalar(self, x: float, y: float) -> float:
        """Pure-Python :meth:`objective` at one point (the descent's hot path)."""
        dirs = []
        for c20, c11, c02, c10, c01 in self._rows:
            gx = 2 * c20 * x + c11 * y + c10
            gy = c11 * x + 2 * c02 * y + c01
            n = math.hypot(gx, gy)
            if n <= 1e-14 * (1 + math.hypot(x, y)) * (1 + abs(c10) + abs(c01)):
                return _DEGENERATE_OBJECTIVE
            dirs.append((gx / n, gy / n))
        t = 0.0
        for i, k in self.pairs:
            t = max(t, abs(dirs[i][0] * dirs[k][1] - dirs[i][1] * dirs[k][0]))
        return t

    def signed_crosses(self, X, Y) -> np.ndarray:
        """Normalized ``g_i x g_k`` for every pair, stacked on the last axis."""
        gx, gy = self.at(X, Y)
        norm = np.hypot(gx, gy)
        safe = np.where(norm == 0.0, 1.0, norm)
        ux, uy = gx / safe, gy / safe
        return np.stack([ux[..., i] * uy[..., k] - uy[..., i] * ux[..., k] for i, k in self.pairs], axis=-1)

    def objective(self, X, Y, skip: Optional[int] = None):
        """Max over pairs of ``|g_i x g_k| / (|g_i| |g_k|)``; rows with a vanishing gradient score 2."""
        gx, gy = self.at(X, Y)
        norm = np.hypot(gx, gy)
        scale = 1 + np.hypot(np.asarray(X, dtype=float), np.asarray(Y, dtype=float))[..., None]
        dead = norm <= 1e-14 * scale * (1 + np.abs(self.c10) + np.abs(self.c01))
        if skip is not None:
            dead[..., skip] = False
        safe = np.where(dead | (norm == 0.0), 1.0, norm)
        ux, uy = gx / safe, gy / safe
        T = np.zeros(np.shape(X))
        for i, k in self.pairs:
            if skip in (i, k):
                continue
            T = np.maximum(T, np.abs(ux[..., i] * uy[..., k] - uy[..., i] * ux[..., k]))
        return np.where(dead.any(axis=-1), _DEGENERATE_OBJECTIVE, T)


@dataclass
class TangencyReport:
    points: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    excluded: list = field(default_factory=list)
    box: Optional[Box] = None

    def to_dict(self) -> dict:
        return {
            "tangency_points": [list(p) for p in self.points],
            "excluded_regions": len(self.excluded),
            "objective_at_points": list(self.objective),
            "excluded_points": [[float(v) for v in p] for p in self.excluded],
        }


def _local_minima(T: np.ndarray) -> list[tuple[int, int]]:
    pad = np.pad(T, 1, constant_values=np.inf)
    core = pad[1:-1, 1:-1]
    is_min = np.ones_like(core, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                is_min &= core <= pad[1 + di:pad.shape[0] - 1 + di, 1 + dj:pad.shape[1] - 1 + dj]
    is_min &= core < _DEGENERATE_OBJECTIVE
    idx = np.argwhere(is_min)
    order = np.argsort(T[is_min], kind="stable")
    return [tuple(v) for v in idx[order]]


def stretched_axis(lo: float, hi: float, n: int, fine_half_width: float) -> np.ndarray:
    """``n`` nodes on ``[lo, hi]``, uniform when the interval is narrow, sinh-graded otherwise.

    When the half-width ``W`` exceeds ``fine_half_width`` (``w``) the nodes are
    ``c + W sinh(k u) / sinh(k)`` for uniform ``u`` in ``[-1, 1]``, with ``k``
    chosen so the spacing at the middle matches a uniform grid of half-width ``w``.
    """
    c, W = (lo + hi) / 2, (hi - lo) / 2
    u = np.linspace(-1.0, 1.0, n)
    if W <= fine_half_width:
        return c + W * u
    ratio = W / fine_half_width
    k = brentq(lambda t: np.sinh(t) / t - ratio, 1e-9, 2 * np.log(2 * ratio) + 2)
    return c + W * np.sinh(k * u) / np.sinh(k)


def _sign_change_cells(S: np.ndarray) -> list[tuple[int, int]]:
    """Lower-left nodes of grid cells where every pairwise cross product changes sign."""
    corners = [S[:-1, :-1], S[1:, :-1], S[:-1, 1:], S[1:, 1:]]
    lo = np.minimum.reduce(corners)
    hi = np.maximum.reduce(corners)
    hit = np.all((lo <= 0) & (hi >= 0), axis=-1)
    return [tuple(v) for v in np.argwhere(hit)]


def tangency_search(m: GDSMapping, box: Optional[Box] = None, grid_n: int = DEFAULT_GRID,
                    tol: float = DEFAULT_TANGENCY_TOL) -> TangencyReport:
    """Points in ``box`` where the level curves through the point are mutually tangent.

    Scans a ``grid_n x grid_n`` grid for local minima of the tangency
    objective, descends from the best of them with Nelder-Mead, and keeps
    endpoints with objective below ``tol``. The grid is uniform over the
    default box (the centers' box inflated 3x) and sinh-graded beyond it,
    so large boxes keep full resolution near the centers. Endpoints that
    collapse onto a center (a level curve shrinking to a point) are
    reported as exclusions, as are centers at which the remaining level
    curves are already tangent.
    """
    if grid_n < 16:
        raise InvalidInput(f"grid_n must be at least 16, got {grid_n}")
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    fine = centers_box(m)
    box = fine if box is None else Box.checked(*box)
    fine_hw = (fine.x1 - fine.x0) / 2
    grads = _Gradients(m)
    xs = stretched_axis(box.x0, box.x1, grid_n, fine_hw)
    ys = stretched_axis(box.y0, box.y1, grid_n, fine_hw)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    T = grads.objective(X, Y)
    radius = 1e-6 * (1 + np.hypot(*m.P.T))

    def near(x):
        d = np.hypot(*(m.P - x).T)
        hits = np.flatnonzero(d < radius)
        return int(hits[0]) if len(hits) else None

    def f(x):
        # the objective decays towards infinity, so descent is fenced into the box
        if not box.contains(x):
            return _DEGENERATE_OBJECTIVE
        return grads.scalar(x[0], x[1])

    report = TangencyReport(box=box)
    excluded_idx: set[int] = set()
    for i in range(m.ell):
        p = m.P[i]
        if box.contains(p) and m.ell > 2 and float(grads.objective(p[0], p[1], skip=i)) < tol:
            excluded_idx.add(i)

    # cells crossed by every pairwise zero curve come first, then plain grid minima
    seeds = [(np.array([(xs[a] + xs[a + 1]) / 2, (ys[b] + ys[b + 1]) / 2]),
              (xs[a + 1] - xs[a]) / 2, (ys[b + 1] - ys[b]) / 2)
             for a, b in _sign_change_cells(grads.signed_crosses(X, Y))]
    for a, b in _local_minima(T)[:MAX_SEEDS]:
        hx = xs[min(a + 1, grid_n - 1)] - xs[max(a - 1, 0)]
        hy = ys[min(b + 1, grid_n - 1)] - ys[max(b - 1, 0)]
        seeds.append((np.array([xs[a], ys[b]]), hx / 2, hy / 2))

    accepted = []
    for x0, hx, hy in seeds:
        if any(np.hypot(*(x0 - y)) < max(hx, hy) for y, _ in accepted):
            continue
        x = _descend(f, x0, hx, hy, tol)
        if x is None:
            continue
        hit = near(x)
        if hit is not None:
            excluded_idx.add(hit)
            continue
        val = f(x)
        if val >= tol:
            continue
        if any(np.hypot(*(x - y)) < 1e-6 * (1 + np.hypot(*y)) for y, _ in accepted):
            continue
        accepted.append((x, val))

    accepted.sort(key=lambda t: (t[0][0], t[0][1]))
    report.points = [Point2(float(x[0]), float(x[1])) for x, _ in accepted]
    report.objective = [float(v) for _, v in accepted]
    report.excluded = [Point2(*m.P[i]) for i in sorted(excluded_idx)]
    return report


def _descend(f, x0, hx: float, hy: float, tol: float):
    """Two-stage Nelder-Mead from ``x0``; returns ``None`` for seeds that cannot reach ``tol``."""
    scale = 1 + np.abs(x0).max()
    simplex = np.array([x0, x0 + [hx, 0.0], x0 + [0.0, hy]])
    res = minimize(f, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": 1e-2 * min(hx, hy), "fatol": 1e-9,
                            "maxiter": 150})
    if res.fun > SCREEN_OBJECTIVE:
        return None
    x = res.x
    step = max(1e-3 * min(hx, hy), 1e-12 * scale)
    for round_ in range(3):
        simplex = np.array([x, x + [step, 0.0], x + [0.0, step]])
        res = minimize(f, x, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": 1e-15 * scale, "fatol": 1e-18,
                                "maxiter": 400})
        moved = np.max(np.abs(res.x - x))
        x = res.x
        if round_ == 0 and res.fun >= tol:
            return None
        if moved < 1e-13 * scale:
            break
        step = max(10 * moved, 1e-12 * scale)
    return x


@dataclass(frozen=True)
class DegeneracyReport:
    sigma_flags: tuple
    coincident_centers: tuple
    rank_deficient_A: bool

    @property
    def clean(self) -> bool:
        """No center is itself singular and no two centers coincide."""
        return not any(self.sigma_flags) and not self.coincident_centers

    def to_dict(self) -> dict:
        return {"sigma_flags": list(self.sigma_flags),
                "coincident_centers": [list(p) for p in self.coincident_centers],
                "rank_deficient_A": self.rank_deficient_A}


def detect_degeneracy(m: GDSMapping, tol: float = 1e-9) -> DegeneracyReport:
    """Flag centers ``p_i`` that are singular points, coincident centers, and rank-1 ``A``."""
    flags = tuple(rank_at(m, p, tol).rank <= 1 for p in m.P)
    scale = 1 + float(np.max(np.abs(m.P)))
    coincident = tuple(
        (i, k) for i, k in itertools.combinations(range(m.ell), 2)
        if np.hypot(*(m.P[i] - m.P[k])) <= tol * scale
    )
    return DegeneracyReport(flags, coincident, matrix_rank(m.A) < 2)


def match_point_sets(a, b, tol: float = 1e-5) -> bool:
    """Whether two point lists pair up one-to-one within ``tol``."""
    a = sorted(tuple(p) for p in a)
    b = [tuple(p) for p in b]
    if len(a) != len(b):
        return False
    remaining = list(b)
    for p in a:
        d = [np.hypot(p[0] - q[0], p[1] - q[1]) for q in remaining]
        j = int(np.argmin(d))
        if d[j] > tol:
            return False
        remaining.pop(j)
    return True
