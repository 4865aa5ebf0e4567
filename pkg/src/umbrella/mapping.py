"""Generalized distance-squared mappings of the plane.

A mapping is fixed by an ``ell x 2`` coefficient matrix ``A`` with non-zero
entries and ``ell`` centers ``p_i``; component ``i`` is

    a_i1 (x1 - p_i1)^2 + a_i2 (x2 - p_i2)^2.

Row and center indices are 0-based throughout the Python API.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidInput, InvalidParams, ZeroEntry

FORMS = ("general", "distance_squared", "lorentzian", "ellipse_circle")
SPECIAL_KINDS = FORMS[1:]

DEFAULT_RANK_TOL = 1e-9


class Point2(NamedTuple):
    x1: float
    x2: float


def as_point(x) -> Point2:
    """Coerce a pair to a finite :class:`Point2`."""
    try:
        x1, x2 = (float(v) for v in x)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"expected a pair of reals, got {x!r}") from exc
    if not (math.isfinite(x1) and math.isfinite(x2)):
        raise InvalidInput(f"point must be finite, got {(x1, x2)}")
    return Point2(x1, x2)


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def matrix_rank(A, tol: float = 1e-12) -> int:
    """Rank of an ``ell x 2`` matrix by the ratio of its singular values."""
    s = np.linalg.svd(np.asarray(A, dtype=float), compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s / s[0] > tol))


@dataclass(frozen=True, eq=False)
class GDSMapping:
    """The map ``x -> (sum_j a_ij (x_j - p_ij)^2)_i`` from the plane to R^ell.

    Build instances with :func:`make_mapping` or :func:`make_special`, which
    validate the inputs; the dataclass itself trusts its arguments.
    """

    A: np.ndarray
    P: np.ndarray
    form: str = "general"
    a: Optional[float] = None
    b: Optional[float] = None
    rank: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "A", _frozen(self.A))
        object.__setattr__(self, "P", _frozen(self.P))
        object.__setattr__(self, "rank", matrix_rank(self.A))

    @property
    def ell(self) -> int:
        return self.A.shape[0]

    @property
    def centers(self) -> list[Point2]:
        return [Point2(float(u), float(v)) for u, v in self.P]

    def evaluate(self, x) -> np.ndarray:
        return evaluate(self, x)

    def jacobian(self, x) -> np.ndarray:
        return jacobian(self, x)

    def with_rows(self, A=None, P=None) -> "GDSMapping":
        """Return a general-form copy with replaced coefficients and/or centers."""
        return make_mapping(self.A if A is None else A, self.P if P is None else P)

    def to_dict(self) -> dict:
        out = {
            "ell": self.ell,
            "A": self.A.tolist(),
            "p": self.P.tolist(),
            "form": self.form,
        }
        if self.form == "ellipse_circle":
            out["a"] = self.a
            out["b"] = self.b
        return out

    def __repr__(self):
        return f"GDSMapping(form={self.form!r}, A={self.A.tolist()}, P={self.P.tolist()})"


def _check_centers(p) -> np.ndarray:
    try:
        P = np.array(p, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"central point is not numeric: {p!r}") from exc
    if P.ndim != 2 or P.shape[1] != 2:
        raise DimensionMismatch(f"central point must be a list of pairs, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise InvalidInput("central point coordinates must be finite")
    return P


def make_mapping(A, p) -> GDSMapping:
    """Build a general-form mapping after validating ``A`` and ``p``.

    Raises
    ------
    ZeroEntry
        Some coefficient is exactly zero.
    DimensionMismatch
        ``A`` is not ``ell x 2`` with ``ell >= 2``, or ``p`` has a different length.
    """
    try:
        A = np.array(A, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"coefficient matrix is not numeric: {A!r}") from exc
    if A.ndim != 2 or A.shape[1] != 2:
        raise DimensionMismatch(f"coefficient matrix must be ell x 2, got shape {A.shape}")
    if A.shape[0] < 2:
        raise DimensionMismatch(f"ell must be at least 2, got {A.shape[0]}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("coefficient matrix entries must be finite")
    zeros = np.argwhere(A == 0.0)
    if len(zeros):
        i, j = zeros[0]
        raise ZeroEntry(f"entry A[{i}][{j}] is zero")
    P = _check_centers(p)
    if P.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"{A.shape[0]} coefficient rows but {P.shape[0]} centers")
    return GDSMapping(A, P)


def make_special(kind: str, p, a: Optional[float] = None, b: Optional[float] = None) -> GDSMapping:
    """Build one of the named special forms.

    ``distance_squared`` uses an all-ones matrix, ``lorentzian`` has first
    column -1 and second column 1, and ``ellipse_circle`` has first row
    ``(a, b)`` with ``0 < a < b`` followed by rows of ones.
    """
    if kind not in SPECIAL_KINDS:
        raise InvalidParams(f"unknown special form {kind!r}; expected one of {SPECIAL_KINDS}")
    P = _check_centers(p)
    ell = P.shape[0]
    if ell < 2:
        raise DimensionMismatch(f"ell must be at least 2, got {ell}")
    A = np.ones((ell, 2))
    if kind == "lorentzian":
        A[:, 0] = -1.0
    elif kind == "ellipse_circle":
        if a is None or b is None:
            raise InvalidParams("ellipse_circle needs both a and b")
        a, b = float(a), float(b)
        if not (math.isfinite(a) and math.isfinite(b)) or not (0.0 < a < b):
            raise InvalidParams(f"ellipse_circle needs 0 < a < b, got a={a}, b={b}")
        A[0] = (a, b)
        return GDSMapping(A, P, form=kind, a=a, b=b)
    return GDSMapping(A, P, form=kind)


def evaluate(m: GDSMapping, x) -> np.ndarray:
    x = np.asarray(as_point(x))
    return np.sum(m.A * (x - m.P) ** 2, axis=1)


def jacobian(m: GDSMapping, x) -> np.ndarray:
    """``ell x 2`` Jacobian; row ``i`` is ``2 (a_i1 (x1 - p_i1), a_i2 (x2 - p_i2))``."""
    x = np.asarray(as_point(x))
    return 2.0 * m.A * (x - m.P)


class RankInfo(NamedTuple):
    rank: int
    kernel: Optional[Point2]
    ratio: float


def _unit_kernel(v) -> Point2:
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    # sign fixed so the first non-negligible component is positive
    k = 0 if abs(v[0]) > 1e-12 else 1
    if v[k] < 0:
        v = -v
    return Point2(float(v[0]), float(v[1]))


def numerical_rank(J, tol: float = DEFAULT_RANK_TOL) -> RankInfo:
    """Rank 0, 1 or 2 of an ``ell x 2`` matrix using ``sigma_2 / sigma_1 < tol``."""
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    _, s, vt = np.linalg.svd(np.asarray(J, dtype=float))
    if s[0] == 0.0:
        return RankInfo(0, Point2(1.0, 0.0), 0.0)
    ratio = float(s[1] / s[0])
    if ratio < tol:
        return RankInfo(1, _unit_kernel(vt[1]), ratio)
    return RankInfo(2, None, ratio)


def rank_at(m: GDSMapping, x, tol: float = DEFAULT_RANK_TOL) -> RankInfo:
    """Numerical rank of the Jacobian at ``x`` plus a unit kernel vector when rank <= 1."""
    return numerical_rank(jacobian(m, x), tol)


def jacobian_minors(J) -> dict[tuple[int, int], float]:
    """All 2x2 minors ``det(row_i; row_k)`` for ``i < k``."""
    J = np.asarray(J, dtype=float)
    out = {}
    for i in range(len(J)):
        for k in range(i + 1, len(J)):
            out[(i, k)] = float(J[i, 0] * J[k, 1] - J[i, 1] * J[k, 0])
    return out


def mapping_from_dict(spec: dict) -> GDSMapping:
    """Parse the mapping-specification JSON object.

    Fields: ``ell``, ``A``, ``p``, ``form`` and, for ``ellipse_circle``,
    ``a`` and ``b``. ``A`` is required for the general form and ignored
    otherwise.
    """
    if not isinstance(spec, dict):
        raise InvalidInput("mapping specification must be a JSON object")
    form = spec.get("form", "general")
    if form not in FORMS:
        raise InvalidParams(f"unknown form {form!r}")
    if "p" not in spec:
        raise InvalidInput("mapping specification lacks 'p'")
    if form == "general":
        if "A" not in spec:
            raise InvalidInput("general form needs 'A'")
        m = make_mapping(spec["A"], spec["p"])
    else:
        m = make_special(form, spec["p"], spec.get("a"), spec.get("b"))
    if "ell" in spec and int(spec["ell"]) != m.ell:
        raise DimensionMismatch(f"ell={spec['ell']} but {m.ell} centers given")
    return m


def scaled_rows(m: GDSMapping, factors: Sequence[float]) -> GDSMapping:
    """Multiply row ``i`` of ``A`` by ``factors[i]``."""
    f = np.asarray(factors, dtype=float).reshape(-1, 1)
    return make_mapping(m.A * f, m.P)
