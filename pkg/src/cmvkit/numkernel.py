"""Complex polynomials and dense complex linear algebra.

Everything numeric in cmvkit bottoms out here.  Eigenvalues and linear
solves are delegated to LAPACK through numpy/scipy (Hessenberg reduction
followed by shifted complex QR for ``eig``, partial-pivoting LU for
``solve``); this module wraps them with the residual reporting, tolerance
handling and error types the rest of the package relies on.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly
import scipy.linalg

from .errors import ArgumentError, NumericError, SingularMatrixError


@dataclass(frozen=True)
class Tolerances:
    """Dimensionless relative thresholds used throughout the package."""

    eps_structural: float = 1e-12
    eps_roots: float = 1e-8
    eps_deflate: float = 1e-11

    def __post_init__(self):
        if min(self.eps_structural, self.eps_roots, self.eps_deflate) <= 0:
            raise ArgumentError("tolerances must be strictly positive")
        if not self.eps_structural <= self.eps_deflate <= self.eps_roots:
            raise ArgumentError("need eps_structural <= eps_deflate <= eps_roots")

    def replace(self, **changes) -> "Tolerances":
        values = {**self.__dict__, **{k: v for k, v in changes.items() if v is not None}}
        return Tolerances(**values)


DEFAULT_TOL = Tolerances()


class Poly:
    """Dense complex polynomial, coefficients in ascending powers.

    The stored coefficient array is never trimmed implicitly; ``degree``
    reports the index of the last coefficient whose modulus exceeds
    ``eps_deflate`` times the largest modulus.
    """

    __slots__ = ("_c", "_tol")

    def __init__(self, coeffs, tol: Tolerances = DEFAULT_TOL):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        if c.ndim != 1:
            raise ArgumentError("polynomial coefficients must be one-dimensional")
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if not np.all(np.isfinite(c)):
            raise ArgumentError("polynomial coefficients must be finite")
        c.setflags(write=False)
        self._c = c
        self._tol = tol

    @classmethod
    def from_roots(cls, zs, tol: Tolerances = DEFAULT_TOL) -> "Poly":
        zs = np.asarray(zs, dtype=complex).ravel()
        if zs.size == 0:
            return cls([1.0], tol)
        return cls(npoly.polyfromroots(zs), tol)

    @classmethod
    def monomial(cls, n: int, tol: Tolerances = DEFAULT_TOL) -> "Poly":
        c = np.zeros(n + 1, dtype=complex)
        c[n] = 1.0
        return cls(c, tol)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def tol(self) -> Tolerances:
        return self._tol

    @property
    def degree(self) -> int:
        mags = np.abs(self._c)
        top = mags.max()
        if top == 0.0:
            return -1
        big = np.nonzero(mags > self._tol.eps_deflate * top)[0]
        return int(big[-1])

    @property
    def is_zero(self) -> bool:
        return self.degree < 0

    @property
    def leading(self) -> complex:
        d = self.degree
        return complex(self._c[d]) if d >= 0 else 0j

    def trim(self) -> "Poly":
        return Poly(self._c[: max(self.degree, 0) + 1], self._tol)

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, self._c.size), dtype=complex)
        out[: self._c.size] = self._c
        return out

    def __call__(self, z):
        return npoly.polyval(z, self._c)

    def deriv(self, order: int = 1) -> "Poly":
        if order == 0:
            return self
        if self._c.size <= order:
            return Poly([0.0], self._tol)
        return Poly(npoly.polyder(self._c, order), self._tol)

    def monic(self) -> "Poly":
        if self.is_zero:
            raise ArgumentError("zero polynomial has no monic normalization")
        t = self.trim()
        c = t.coeffs / t.coeffs[-1]
        c[-1] = 1.0
        return Poly(c, self._tol)

    def shift(self, k: int = 1) -> "Poly":
        """Multiply by z**k."""
        return Poly(np.concatenate([np.zeros(k, dtype=complex), self._c]), self._tol)

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, Poly):
            return other.coeffs
        return np.asarray([other], dtype=complex)

    def __add__(self, other):
        return Poly(npoly.polyadd(self._c, self._coerce(other)), self._tol)

    __radd__ = __add__

    def __sub__(self, other):
        return Poly(npoly.polysub(self._c, self._coerce(other)), self._tol)

    def __rsub__(self, other):
        return Poly(npoly.polysub(self._coerce(other), self._c), self._tol)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return Poly(npoly.polymul(self._c, other.coeffs), self._tol)
        return Poly(self._c * complex(other), self._tol)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Poly(self._c / complex(scalar), self._tol)

    def __neg__(self):
        return Poly(-self._c, self._tol)

    def allclose(self, other: "Poly", atol: float) -> bool:
        n = max(self._c.size, other.coeffs.size)
        return bool(np.max(np.abs(self.padded(n) - other.padded(n))) <= atol)

    def __repr__(self):
        return f"Poly({np.array2string(self._c, precision=6)})"


def star(p: Poly, n: int) -> Poly:
    """Reversed conjugate z**n * conj(p(1/conj(z))) of ``p`` viewed as degree ``n``."""
    if n < p.degree:
        raise ArgumentError(f"star degree bound {n} is below deg p = {p.degree}")
    c = p.padded(n + 1)[: n + 1]
    return Poly(np.conj(c[::-1]), p.tol)


@dataclass(frozen=True)
class EigResult:
    values: np.ndarray
    residuals: np.ndarray
    vectors: np.ndarray


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ArgumentError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ArgumentError("matrix entries must be finite")
    return a


def eig(m, tol: Tolerances = DEFAULT_TOL) -> EigResult:
    """Eigenvalues of a dense complex matrix with per-eigenvalue residuals.

    Residual for eigenvalue ``lam`` is ``||(m - lam I) v||`` for the unit
    eigenvector ``v`` LAPACK returns.
    """
    a = _as_square(m)
    try:
        w, v = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue iteration did not converge: {exc}") from exc
    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    res = np.linalg.norm(a @ v - v * w[None, :], axis=0)
    return EigResult(values=w, residuals=res, vectors=v)


def cluster(values, tol: float) -> list[tuple[complex, int]]:
    """Group values closer than ``tol`` (single linkage) into (centroid, multiplicity).

    Output is sorted by real part, then imaginary part.
    """
    vals = np.asarray(values, dtype=complex).ravel()
    n = vals.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(vals[i] - vals[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = [(complex(vals[idx].mean()), len(idx)) for idx in groups.values()]
    out.sort(key=lambda t: (round(t[0].real, 12), round(t[0].imag, 12)))
    return out


def solve(m, rhs, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    a = _as_square(m)
    b = np.asarray(rhs, dtype=complex)
    if b.shape[0] != a.shape[0]:
        raise ArgumentError("right-hand side length does not match matrix dimension")
    with warnings.catch_warnings():
        # singularity is judged below against eps_structural
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    scale = max(np.linalg.norm(a, 2), np.finfo(float).tiny)
    if np.min(np.abs(np.diag(lu))) <= tol.eps_structural * scale:
        raise SingularMatrixError("matrix is numerically singular")
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def companion(p: Poly) -> np.ndarray:
    """Companion matrix whose characteristic polynomial is ``p.monic()``."""
    c = p.monic().coeffs
    n = c.size - 1
    m = np.zeros((n, n), dtype=complex)
    if n > 1:
        m[1:, :-1] = np.eye(n - 1)
    m[:, -1] = -c[:-1]
    return m


def roots(p: Poly, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """All roots of ``p`` counting multiplicity, via the companion matrix."""
    if p.is_zero:
        raise ArgumentError("the zero polynomial has no finite root set")
    if p.degree < 1:
        raise ArgumentError("roots() needs degree >= 1")
    return eig(companion(p), tol).values


def match_multisets(a, b) -> float:
    """Largest distance in the optimal one-to-one pairing of two equal-size multisets."""
    from scipy.optimize import linear_sum_assignment

    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise ArgumentError("multisets differ in size")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())
