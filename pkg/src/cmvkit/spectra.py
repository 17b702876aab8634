"""Direct spectral analysis of truncated CMV matrices.

The characteristic (Schur) function is evaluated through the resolvent of
the bordered parent: with (C - zI) x = e_0 the Caratheodory function is
F(z) = 1 + 2 z x_0 and f(z) = (F - 1) / (z (F + 1)) = x_0 / (1 + z x_0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._validation import circle_points
from .cmv import CmvMatrix, TruncatedCmv, defect_data, submatrix_k
from .errors import ArgumentError, SingularMatrixError
from .numkernel import DEFAULT_TOL, Poly, Tolerances, cluster, eig, solve
from .opuc import MonicOpucChain, _szego_step
from .schurfun import blaschke_from_schur_params, schur_step


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray
    residuals: np.ndarray
    clustered: list
    all_in_disk: bool

    @property
    def multiplicity_total(self) -> int:
        return sum(m for _, m in self.clustered)


def spectrum(t, tol: Tolerances | None = None) -> SpectrumResult:
    """Eigenvalues of a truncated CMV matrix (or any square matrix), clustered by eps_roots."""
    dense = t.dense if isinstance(t, TruncatedCmv) else t
    tol = tol or (t.tol if isinstance(t, TruncatedCmv) else DEFAULT_TOL)
    res = eig(dense, tol)
    vals = res.values
    return SpectrumResult(
        eigenvalues=vals,
        residuals=res.residuals,
        clustered=cluster(vals, tol.eps_roots),
        all_in_disk=bool(np.all(np.abs(vals) < 1.0 + tol.eps_roots)),
    )


def _parent(m) -> tuple[np.ndarray, complex]:
    """Dense bordered matrix and f(0) = alpha_0."""
    if isinstance(m, TruncatedCmv):
        dense = m.parent()
    elif isinstance(m, CmvMatrix):
        dense = np.asarray(m.dense)
    else:
        raise ArgumentError("expected a CmvMatrix or a TruncatedCmv")
    return dense, complex(np.conj(dense[0, 0]))


def charfun_schur(m, z):
    """Schur function of the measure behind a CMV matrix, at points of the disk.

    Accepts a CmvMatrix or a TruncatedCmv (its bordered parent is used).  The
    transposed (alternate) layout gives the same value since the (0, 0)
    entry of the resolvent is transpose invariant.  At z = 0 the value is
    alpha_0.
    """
    dense, f0 = _parent(m)
    zz = np.asarray(z, dtype=complex)
    flat = zz.ravel()
    if flat.size and np.max(np.abs(flat)) >= 1.0:
        raise ArgumentError("charfun points must lie in the open unit disk")
    tol = m.params.tol
    n = dense.shape[0]
    e0 = np.zeros(n, dtype=complex)
    e0[0] = 1.0
    out = np.empty(flat.shape, dtype=complex)
    for i, w in enumerate(flat):
        if w == 0:
            out[i] = f0
            continue
        try:
            x0 = solve(dense - w * np.eye(n), e0, tol)[0]
        except SingularMatrixError as exc:
            raise SingularMatrixError(f"resolvent is singular at z = {w}") from exc
        out[i] = x0 / (1.0 + w * x0)
    out = out.reshape(zz.shape)
    return complex(out) if out.ndim == 0 else out


def caratheodory_cmv(m, z) -> complex:
    """F(z) = <(C + z)(C - z)^{-1} e_0, e_0>."""
    dense, _ = _parent(m)
    n = dense.shape[0]
    e0 = np.zeros(n, dtype=complex)
    e0[0] = 1.0
    z = complex(z)
    x = solve(dense - z * np.eye(n), e0, m.params.tol)
    return complex(e0 @ ((dense + z * np.eye(n)) @ x))


def nagy_foias_charfun(t: TruncatedCmv, z):
    """Characteristic function from the defect operators of T alone.

    theta(z) = <(-T + z D_{T*} (I - z T*)^{-1} D_T) v, d_1> on the rank-one
    defect spaces.  With the defect vectors of ``defect_data`` this equals
    the Schur function of the parameters; an independent route to
    ``charfun_schur``.
    """
    T = np.asarray(t.dense)
    dd = defect_data(t)
    n = t.n
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(zz.shape, dtype=complex)
    Ts = T.conj().T
    for i, w in enumerate(zz.ravel()):
        y = np.linalg.solve(np.eye(n) - w * Ts, dd.right)
        out.flat[i] = -(dd.left.conj() @ T @ dd.right) + w * dd.rho0**2 * (dd.left.conj() @ y)
    return complex(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def hessenberg_charpoly(m) -> Poly:
    """det(zI - m) via upper Hessenberg reduction and the standard column recursion."""
    a = np.asarray(m, dtype=complex)
    n = a.shape[0]
    h = scipy.linalg.hessenberg(a) if n > 2 else a
    p = [np.array([1.0 + 0j])]
    for k in range(1, n + 1):
        cur = np.convolve(np.array([-h[k - 1, k - 1], 1.0]), p[k - 1])
        prod = 1.0 + 0j
        for i in range(k - 1, 0, -1):
            prod *= h[i, i - 1]
            term = h[i - 1, k - 1] * prod * p[i - 1]
            cur[: term.size] -= term
        p.append(cur)
    return Poly(p[n])


@dataclass(frozen=True)
class CharpolyReport:
    n: int
    determinant: Poly
    opuc: Poly
    gap: float


def charpoly_check(c: CmvMatrix, n: int) -> CharpolyReport:
    """Compare det(zI - C^{(n)}) of the principal n x n block with Phi_n."""
    size = c.n
    if not 1 <= n <= size:
        raise ArgumentError(f"n must satisfy 1 <= n <= {size}")
    det = hessenberg_charpoly(np.asarray(c.dense)[:n, :n])
    alphas = c.params.as_array()
    chain = MonicOpucChain.from_alphas(alphas[: min(n, c.params.n)], c.params.tol)
    phi = chain.last
    if n == size:
        # last step uses the unimodular terminal parameter
        phi = _szego_step(phi, n - 1, complex(alphas[n - 1]))
    gap = float(np.max(np.abs(det.padded(n + 1) - phi.padded(n + 1))))
    return CharpolyReport(n, det, phi, gap)


@dataclass(frozen=True)
class IterateReport:
    k: int
    points: np.ndarray
    gap: float


def sample_points(count: int, radius: float = 0.7) -> np.ndarray:
    """Interior sample points on two circles, avoiding z = 0."""
    half = count // 2
    inner = 0.5 * radius * circle_points(count - half) * np.exp(0.3j)
    outer = radius * circle_points(half) * np.exp(0.1j) if half else np.zeros(0)
    return np.concatenate([outer, inner])


def schur_iterate_check(t: TruncatedCmv, k: int, sample_count: int = 16) -> IterateReport:
    """Characteristic function of T with k leading rows/columns deleted
    against the k-th Schur iterate of the characteristic function of T."""
    sub = submatrix_k(t, k)
    pts = sample_points(sample_count)
    lhs = charfun_schur(sub.matrix, pts)
    f = blaschke_from_schur_params(t.params).as_rational()
    for _ in range(k):
        _, f = schur_step(f, inner=True)
    rhs = f(pts)
    return IterateReport(k, pts, float(np.max(np.abs(lhs - rhs))))
