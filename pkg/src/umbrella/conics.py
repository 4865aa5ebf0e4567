"""Implicit conics: Jacobian minors, level sets, classification, resultants.

A conic is ``c20 x1^2 + c11 x1 x2 + c02 x2^2 + c10 x1 + c01 x2 + c00``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DegenerateGradient, InvalidInput, ZeroPolynomial
from .mapping import GDSMapping, Point2, as_point
from .numerics import gauss_newton

COEFF_NAMES = ("c20", "c11", "c02", "c10", "c01", "c00")

KINDS = (
    "circle",
    "ellipse",
    "rectangular_hyperbola",
    "hyperbola",
    "parabola",
    "intersecting_lines",
    "parallel_lines",
    "single_line",
    "single_point",
    "empty",
    "whole_plane",
)

DEFAULT_CLASSIFY_TOL = 1e-9
IMAG_CUTOFF = 1e-8


@dataclass(frozen=True)
class Conic:
    c20: float = 0.0
    c11: float = 0.0
    c02: float = 0.0
    c10: float = 0.0
    c01: float = 0.0
    c00: float = 0.0

    def __post_init__(self):
        for name in COEFF_NAMES:
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidInput(f"conic coefficient {name} is not finite")
            object.__setattr__(self, name, v)

    @classmethod
    def from_array(cls, coeffs) -> "Conic":
        return cls(*(float(c) for c in coeffs))

    @classmethod
    def from_dict(cls, d: dict) -> "Conic":
        try:
            return cls(**{k: float(d[k]) for k in COEFF_NAMES})
        except KeyError as exc:
            raise InvalidInput(f"conic JSON lacks coefficient {exc.args[0]}") from exc

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in COEFF_NAMES}

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.c20, self.c11, self.c02, self.c10, self.c01, self.c00])

    def __call__(self, x1, x2):
        return (self.c20 * x1 * x1 + self.c11 * x1 * x2 + self.c02 * x2 * x2
                + self.c10 * x1 + self.c01 * x2 + self.c00)

    def gradient(self, x1, x2):
        return (2 * self.c20 * x1 + self.c11 * x2 + self.c10,
                self.c11 * x1 + 2 * self.c02 * x2 + self.c01)

    def scale(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def is_zero(self) -> bool:
        return self.scale() == 0.0

    def normalized(self) -> "Conic":
        """Canonical representative: max |coefficient| is 1 and the first non-zero one is positive.

        Only meant for comparison and residual scaling; the zero conic is returned unchanged.
        """
        c = self.coeffs
        s = np.max(np.abs(c))
        if s == 0.0:
            return self
        c = c / s
        first = c[np.flatnonzero(c)[0]]
        return Conic.from_array(c if first > 0 else -c)

    def matrix(self) -> np.ndarray:
        """Symmetric 3x3 matrix of the homogenized quadratic form."""
        return np.array([
            [self.c20, self.c11 / 2, self.c10 / 2],
            [self.c11 / 2, self.c02, self.c01 / 2],
            [self.c10 / 2, self.c01 / 2, self.c00],
        ])

    def swapped(self) -> "Conic":
        """The same curve with ``x1`` and ``x2`` exchanged."""
        return Conic(self.c02, self.c11, self.c20, self.c01, self.c10, self.c00)


def minor_conics(m: GDSMapping) -> list[tuple[int, int, Conic]]:
    """Each 2x2 Jacobian minor ``det(row_i; row_k)`` as a conic, for ``i < k``.

    Jacobian rows carry a factor 2, so the returned conic equals the minor divided by 4.
    """
    if m.ell < 2:
        raise InvalidInput("need at least two components")
    A, P = m.A, m.P
    out = []
    for i, k in itertools.combinations(range(m.ell), 2):
        al = A[i, 0] * A[k, 1]
        be = A[i, 1] * A[k, 0]
        out.append((i, k, Conic(
            c11=al - be,
            c10=-al * P[k, 1] + be * P[i, 1],
            c01=-al * P[i, 0] + be * P[k, 0],
            c00=al * P[i, 0] * P[k, 1] - be * P[i, 1] * P[k, 0],
        )))
    return out


def level_conic(m: GDSMapping, i: int, level: float) -> Conic:
    """Component ``i`` minus ``level`` as a conic."""
    (a1, a2), (q1, q2) = m.A[i], m.P[i]
    return Conic(c20=a1, c02=a2, c10=-2 * a1 * q1, c01=-2 * a2 * q2,
                 c00=a1 * q1 * q1 + a2 * q2 * q2 - level)


def classify_conic(c: Conic, tol: float = DEFAULT_CLASSIFY_TOL) -> str:
    """Affine kind of a real conic; one of :data:`KINDS`.

    Zero tests are relative: coefficients are first scaled so the largest
    has magnitude one, and the quadratic-part determinant is compared to the
    square of the largest quadratic coefficient.
    """
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    s = c.scale()
    if s == 0.0:
        return "whole_plane"
    c20, c11, c02, c10, c01, c00 = c.coeffs / s
    q = max(abs(c20), abs(c11) / 2, abs(c02))
    if q <= tol:
        return "single_line" if max(abs(c10), abs(c01)) > tol else "empty"

    Q = np.array([[c20, c11 / 2], [c11 / 2, c02]])
    L = np.array([c10, c01])
    det_rel = (c20 * c02 - c11 * c11 / 4) / (q * q)

    if abs(det_rel) <= tol:
        w, V = np.linalg.eigh(Q)
        j = int(np.argmax(np.abs(w)))
        lam, e1, e2 = w[j], V[:, j], V[:, 1 - j]
        if abs(L @ e2) > tol:
            return "parabola"
        l1 = L @ e1
        disc = l1 * l1 - 4 * lam * c00
        if abs(disc) <= tol * max(l1 * l1, abs(4 * lam * c00)):
            return "single_line"
        return "parallel_lines" if disc > 0 else "empty"

    x0 = np.linalg.solve(Q, -L / 2)
    f0 = c00 + (L @ x0) / 2
    f_scale = max(abs(c00), abs(c10 * x0[0]) / 2, abs(c01 * x0[1]) / 2, q * float(x0 @ x0))
    f_zero = abs(f0) <= tol * f_scale

    if det_rel > 0:
        if f_zero:
            return "single_point"
        if f0 * np.sign(c20) > 0:
            return "empty"
        round_ = max(abs(c20), abs(c02))
        if abs(c20 - c02) <= tol * round_ and abs(c11) <= tol * round_:
            return "circle"
        return "ellipse"
    if f_zero:
        return "intersecting_lines"
    if abs(c20 + c02) <= tol * q:
        return "rectangular_hyperbola"
    return "hyperbola"


@dataclass(frozen=True)
class UnivariatePoly:
    """Polynomial with ascending coefficients; ``is_zero`` flags an identically vanishing resultant."""

    coeffs: tuple
    is_zero: bool = False

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else len(self.coeffs) - 1

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, self.coeffs)

    def to_numpy(self) -> Polynomial:
        return Polynomial(self.coeffs)


def _trimmed(coeffs, rel: float = 1e-15) -> tuple:
    c = np.asarray(coeffs, dtype=float)
    if len(c) == 0:
        return (0.0,)
    big = np.max(np.abs(c))
    n = len(c)
    while n > 1 and abs(c[n - 1]) <= rel * big:
        n -= 1
    return tuple(float(v) for v in c[:n])


def _as_poly_in(c: Conic, var: str) -> list[Polynomial]:
    """Coefficients of ``c`` viewed as a polynomial in ``var``, highest power first.

    Each coefficient is a :class:`Polynomial` in the other variable. Leading
    zero coefficients are dropped so the list length is degree + 1.
    """
    if var == "x2":
        coeffs = [Polynomial([c.c02]), Polynomial([c.c01, c.c11]), Polynomial([c.c00, c.c10, c.c20])]
    elif var == "x1":
        coeffs = [Polynomial([c.c20]), Polynomial([c.c10, c.c11]), Polynomial([c.c00, c.c01, c.c02])]
    else:
        raise InvalidInput(f"var must be 'x1' or 'x2', got {var!r}")
    while len(coeffs) > 1 and not np.any(coeffs[0].coef):
        coeffs.pop(0)
    return coeffs


def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    total = Polynomial([0.0])
    for j in range(n):
        if not np.any(M[0][j].coef):
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def sylvester_matrix(f: list, g: list) -> list[list]:
    """Sylvester matrix of two polynomials given highest-coefficient-first."""
    m, n = len(f) - 1, len(g) - 1
    zero = Polynomial([0.0])
    size = m + n
    rows = []
    for r in range(n):
        rows.append([zero] * r + list(f) + [zero] * (size - m - 1 - r))
    for r in range(m):
        rows.append([zero] * r + list(g) + [zero] * (size - n - 1 - r))
    return rows


def eliminate_variable(c1: Conic, c2: Conic, var: str = "x2") -> UnivariatePoly:
    """Resultant of ``c1`` and ``c2`` with respect to ``var``, a polynomial in the other variable.

    Its real roots contain the projections of all real common zeros. When
    the conics share a component the resultant vanishes identically and the
    returned polynomial has ``is_zero`` set.
    """
    f = _as_poly_in(c1, var)
    g = _as_poly_in(c2, var)
    m, n = len(f) - 1, len(g) - 1
    if m == 0 and n == 0:
        # neither depends on var: every common zero lies over a common root of both
        res = f[0] * g[0]
    else:
        res = _det(sylvester_matrix(f, g))
    coef = np.atleast_1d(res.coef)
    e1, e2 = (n, m) if (m or n) else (1, 1)
    scale = c1.scale() ** e1 * c2.scale() ** e2
    if scale == 0.0 or np.max(np.abs(coef)) <= 1e-10 * scale:
        return UnivariatePoly((0.0,), is_zero=True)
    return UnivariatePoly(_trimmed(coef))


def companion_roots(coeffs) -> np.ndarray:
    """Complex roots from eigenvalues of the companion matrix (ascending coefficients)."""
    c = np.asarray(coeffs, dtype=float)
    n = len(c) - 1
    if n < 1:
        return np.array([], dtype=complex)
    C = np.zeros((n, n))
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -c[:-1] / c[-1]
    return np.linalg.eigvals(C)


def real_roots(p: UnivariatePoly, tol: float = 1e-9, imag_cutoff: float = IMAG_CUTOFF
               ) -> list[tuple[float, int]]:
    """Sorted real roots with multiplicities; roots closer than ``tol`` are merged.

    A complex eigenvalue counts as real when ``|Im| < imag_cutoff * (1 + |Re|)``.
    """
    if p.is_zero or not np.any(p.coeffs):
        raise ZeroPolynomial("cannot isolate roots of the zero polynomial")
    z = companion_roots(p.coeffs)
    re = np.sort(z.real[np.abs(z.imag) < imag_cutoff * (1 + np.abs(z.real))])
    out: list[list] = []
    for r in re:
        if out and abs(r - out[-1][0] / out[-1][1]) <= tol:
            out[-1][0] += r
            out[-1][1] += 1
        else:
            out.append([r, 1])
    return [(float(s / k), k) for s, k in out]


def tangent_at_point(c1: Conic, c2: Conic, q, tol: float = 1e-9) -> bool:
    """Whether both conics pass through ``q`` with parallel, non-zero gradients.

    Raises :class:`DegenerateGradient` when either gradient vanishes at ``q``.
    """
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    x1, x2 = as_point(q)
    n1, n2 = c1.normalized(), c2.normalized()
    r2 = x1 * x1 + x2 * x2
    if abs(n1(x1, x2)) > tol * (1 + r2) or abs(n2(x1, x2)) > tol * (1 + r2):
        return False
    g1 = np.array(n1.gradient(x1, x2))
    g2 = np.array(n2.gradient(x1, x2))
    floor = tol * (1 + math.sqrt(r2))
    for g in (g1, g2):
        if np.linalg.norm(g) <= floor:
            raise DegenerateGradient(f"gradient vanishes at {(x1, x2)}", point=Point2(x1, x2))
    cross = g1[0] * g2[1] - g1[1] * g2[0]
    return abs(cross) / (np.linalg.norm(g1) * np.linalg.norm(g2)) < tol


class CommonZeros(NamedTuple):
    points: list
    shared_component: bool


def candidate_grid(c1: Conic, c2: Conic, imag_cutoff: float = 1e-4) -> tuple[list, bool]:
    """Cartesian product of resultant roots in ``x1`` and ``x2``.

    Returns ``(points, shared)`` where ``shared`` reports an identically
    vanishing resultant, in which case no points are produced.
    """
    rx = eliminate_variable(c1, c2, "x2")
    ry = eliminate_variable(c1, c2, "x1")
    if rx.is_zero or ry.is_zero:
        return [], True
    xs = [r for r, _ in real_roots(rx, imag_cutoff=imag_cutoff)]
    ys = [r for r, _ in real_roots(ry, imag_cutoff=imag_cutoff)]
    return [(x, y) for x in xs for y in ys], False


def common_zeros(c1: Conic, c2: Conic, tol: float = 1e-9) -> CommonZeros:
    """Real common zeros of two conics, from resultant candidates polished by Newton."""
    cands, shared = candidate_grid(c1, c2)
    if shared:
        return CommonZeros([], True)
    n1, n2 = c1.normalized(), c2.normalized()

    def res(x):
        return np.array([n1(*x), n2(*x)])

    def jac(x):
        return np.array([n1.gradient(*x), n2.gradient(*x)])

    found = []
    for x0 in cands:
        x, status = gauss_newton(res, jac, x0)
        if status == "diverged":
            continue
        r = np.max(np.abs(res(x))) / (1 + float(x @ x))
        if r < tol and not any(np.hypot(*(x - y)) < 1e-7 * (1 + np.hypot(*y)) for y in found):
            found.append(x)
    found.sort(key=lambda v: (v[0], v[1]))
    return CommonZeros([Point2(float(a), float(b)) for a, b in found], False)
