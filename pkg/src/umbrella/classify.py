"""Cross-cap recognition and per-mapping classification for ell >= 3."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInput, NotRankOne
from .locus import ACCEPT_RANK_TOL, DEFAULT_TOL, solve_singular_points
from .mapping import GDSMapping, Point2, jacobian, numerical_rank

DEFAULT_CROSSCAP_TOL = 1e-6


@dataclass(frozen=True)
class CrossCapWitness:
    eta: Point2
    tau: Point2
    det_value: float
    normalized_det: float
    is_crosscap: bool


def crosscap_from_jets(J, hessians, tol: float = DEFAULT_CROSSCAP_TOL,
                       rank_tol: float = ACCEPT_RANK_TOL) -> CrossCapWitness:
    """Whitney umbrella test from the 2-jet of a map germ into R^3.

    ``J`` is the 3x2 Jacobian and ``hessians`` a 3x2x2 stack of component
    Hessians. With unit kernel ``eta`` and ``tau`` its +90 degree rotation,
    the germ is a cross-cap iff ``dF(tau)``, ``D2F(eta, eta)`` and
    ``D2F(tau, eta)`` are linearly independent; independence is judged by
    the determinant divided by the product of the three column norms.
    """
    J = np.asarray(J, dtype=float)
    H = np.asarray(hessians, dtype=float)
    if J.shape != (3, 2) or H.shape != (3, 2, 2):
        raise InvalidInput("cross-cap recognition is defined for germs into R^3 only")
    info = numerical_rank(J, rank_tol)
    if info.rank != 1:
        raise NotRankOne(f"Jacobian has numerical rank {info.rank}, expected 1")
    eta = np.array(info.kernel)
    tau = np.array([-eta[1], eta[0]])
    cols = np.column_stack([J @ tau, H @ eta @ eta, H @ eta @ tau])
    det = float(np.linalg.det(cols))
    norms = np.prod(np.linalg.norm(cols, axis=0))
    ndet = float(det / norms) if norms > 0 else 0.0
    return CrossCapWitness(Point2(*eta), Point2(*tau), det, ndet, bool(abs(ndet) > tol))


def mapping_hessians(m: GDSMapping) -> np.ndarray:
    """Constant Hessians ``diag(2 a_i1, 2 a_i2)`` of every component."""
    H = np.zeros((m.ell, 2, 2))
    H[:, 0, 0] = 2 * m.A[:, 0]
    H[:, 1, 1] = 2 * m.A[:, 1]
    return H


def crosscap_test(m: GDSMapping, q, tol: float = DEFAULT_CROSSCAP_TOL,
                  rank_tol: float = ACCEPT_RANK_TOL) -> CrossCapWitness:
    if m.ell != 3:
        raise InvalidInput(f"crosscap_test needs ell = 3, got {m.ell}")
    return crosscap_from_jets(jacobian(m, q), mapping_hessians(m), tol, rank_tol)


@dataclass(frozen=True)
class MapClass:
    kind: str  # whitney_umbrella | immersion | unresolved
    point: Optional[Point2] = None
    det: Optional[float] = None
    reason: Optional[str] = None
    candidates: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out: dict = {"class": self.kind}
        if self.point is not None:
            out["point"] = list(self.point)
        if self.det is not None:
            out["det"] = self.det
        if self.reason is not None:
            out["reason"] = self.reason
        if self.candidates:
            out["candidates"] = [r.to_dict() for r in self.candidates]
        return out


def classify_map(m: GDSMapping, tol: float = DEFAULT_TOL,
                 crosscap_tol: float = DEFAULT_CROSSCAP_TOL) -> MapClass:
    """Assign ``m`` to whitney_umbrella, immersion, or unresolved.

    No singular points means immersion. For ell = 3 a single singular point
    that passes :func:`crosscap_test` means whitney_umbrella. Anything else
    is reported as unresolved together with the located points.
    """
    if m.ell < 3:
        raise InvalidInput(f"classify_map needs ell >= 3, got {m.ell}")
    points = solve_singular_points(m, tol)
    if not points:
        return MapClass("immersion")
    if m.ell > 3:
        return MapClass("unresolved", reason=f"{len(points)} singular point(s) for ell={m.ell}",
                        candidates=points)
    if len(points) > 1:
        return MapClass("unresolved", reason=f"{len(points)} singular points", candidates=points)
    q = points[0].location
    try:
        w = crosscap_test(m, q, crosscap_tol)
    except NotRankOne as exc:
        return MapClass("unresolved", reason=str(exc), candidates=points)
    if not w.is_crosscap:
        return MapClass("unresolved", point=q, det=w.normalized_det,
                        reason="singular point fails the cross-cap test", candidates=points)
    return MapClass("whitney_umbrella", point=q, det=w.normalized_det)
