"""Singular sets: finitely many points for ell >= 3, a conic for ell = 2."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .conics import Conic, candidate_grid, classify_conic, minor_conics
from .errors import InvalidInput, SolverInconsistency
from .mapping import GDSMapping, Point2, evaluate, rank_at
from .numerics import gauss_newton

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
# sigma_2 / sigma_1 threshold a located point must meet to count as singular
ACCEPT_RANK_TOL = 1e-6
DEGENERATE_REL = 1e-6
CANDIDATE_IMAG_CUTOFF = 1e-4


@dataclass(frozen=True)
class SingularPointRecord:
    location: Point2
    jacobian_rank: int
    kernel: Point2
    max_minor_residual: float
    degenerate: bool
    levels: tuple

    def to_dict(self) -> dict:
        return {
            "x1": self.location.x1,
            "x2": self.location.x2,
            "rank": self.jacobian_rank,
            "kernel": list(self.kernel),
            "residual": self.max_minor_residual,
            "degenerate": self.degenerate,
            "levels": list(self.levels),
        }


class MinorSystem:
    """All non-zero minor conics, canonically normalized, evaluated as one vector."""

    def __init__(self, m: GDSMapping):
        self.pairs = []
        rows = []
        for i, k, c in minor_conics(m):
            if c.is_zero():
                continue
            self.pairs.append((i, k))
            rows.append(c.normalized().coeffs)
        self.C = np.array(rows).reshape(-1, 6)

    def residual(self, x) -> np.ndarray:
        u, v = x
        return self.C @ np.array([u * u, u * v, v * v, u, v, 1.0])

    def jac(self, x) -> np.ndarray:
        u, v = x
        du = np.array([2 * u, v, 0.0, 1.0, 0.0, 0.0])
        dv = np.array([0.0, u, 2 * v, 0.0, 1.0, 0.0])
        return np.column_stack([self.C @ du, self.C @ dv])

    def max_residual(self, x) -> float:
        if len(self.C) == 0:
            return 0.0
        return float(np.max(np.abs(self.residual(x))))


def near_center(m: GDSMapping, x, rel: float = DEGENERATE_REL) -> bool:
    d = np.hypot(*(m.P - np.asarray(x)).T)
    return bool(np.any(d < rel * (1 + np.hypot(*m.P.T))))


def _seeds(m: GDSMapping) -> list:
    """Resultant candidates from minors (0,1) and (0,2), plus every center."""
    nonzero = [(i, k, c) for i, k, c in minor_conics(m) if not c.is_zero()]
    # (0,1),(0,2) come first; later pairs are only tried when earlier ones share a component
    seeds: list = []
    for (i1, k1, c1), (i2, k2, c2) in itertools.combinations(nonzero, 2):
        pts, shared = candidate_grid(c1, c2, imag_cutoff=CANDIDATE_IMAG_CUTOFF)
        if not shared:
            seeds.extend(pts)
            break
        log.debug("minors (%d,%d) and (%d,%d) share a component", i1, k1, i2, k2)
    seeds.extend(tuple(p) for p in m.P)
    uniq: list = []
    for s in seeds:
        if not any(abs(s[0] - t[0]) + abs(s[1] - t[1]) < 1e-12 * (1 + abs(t[0]) + abs(t[1])) for t in uniq):
            uniq.append(s)
    return uniq


def solve_singular_points(m: GDSMapping, tol: float = DEFAULT_TOL) -> list[SingularPointRecord]:
    """All real points where the Jacobian of ``m`` drops rank, for ``ell >= 3``.

    Candidates come from resultant roots of two minors (plus the centers);
    each is refined by Gauss-Newton on the least-squares system of all
    minors and kept when every normalized minor is below ``tol`` and the
    Jacobian has numerical rank at most one.
    """
    if m.ell < 3:
        raise InvalidInput(f"solve_singular_points needs ell >= 3, got {m.ell}; use singular_curve")
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    system = MinorSystem(m)
    seeds = _seeds(m)

    found = []
    diverged = 0
    for s in seeds:
        x, status = gauss_newton(system.residual, system.jac, s)
        if status == "diverged":
            diverged += 1
            continue
        res = system.max_residual(x)
        if res >= tol:
            continue
        info = rank_at(m, x, ACCEPT_RANK_TOL)
        if info.rank == 2:
            continue
        found.append((x, res, info))
    if seeds and diverged == len(seeds):
        raise SolverInconsistency("Newton refinement diverged from every candidate", candidates=seeds)

    found.sort(key=lambda t: t[1])
    kept = []
    for x, res, info in found:
        if all(np.hypot(*(x - y)) >= 10 * tol * (1 + np.hypot(*y)) for y, _, _ in kept):
            kept.append((x, res, info))

    records = [
        SingularPointRecord(
            location=Point2(float(x[0]), float(x[1])),
            jacobian_rank=info.rank,
            kernel=info.kernel,
            max_minor_residual=res,
            degenerate=near_center(m, x),
            levels=tuple(float(c) for c in evaluate(m, x)),
        )
        for x, res, info in kept
    ]
    records.sort(key=lambda r: r.location)
    return records


def singular_curve(m: GDSMapping) -> tuple[Conic, str]:
    """The single minor conic of an ``ell = 2`` mapping and its kind."""
    if m.ell != 2:
        raise InvalidInput(f"singular_curve needs ell = 2, got {m.ell}")
    (_, _, c), = minor_conics(m)
    return c, classify_conic(c)
