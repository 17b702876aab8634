"""CMV and truncated CMV matrices built from Schur parameters.

Conventions: indices are 0-based, ``alpha[-1] = -1`` and the finite
(N+1)x(N+1) matrix has interior parameters alpha_0..alpha_{N-1} plus a
unimodular alpha_N (so rho_N = 0).  Truncation deletes row 0 and column 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_square
from .errors import ArgumentError, StructureError
from .numkernel import DEFAULT_TOL, Tolerances
from .schurfun import SchurParams


def _full_alphas(p: SchurParams) -> tuple[np.ndarray, np.ndarray]:
    """alpha_0..alpha_N and rho_0..rho_N for a finite parameter set."""
    if p.terminal is None:
        raise ArgumentError("a finite CMV matrix needs a unimodular terminal parameter")
    a = p.as_array()
    rho = np.sqrt(np.clip(1.0 - np.abs(a) ** 2, 0.0, None))
    rho[-1] = 0.0
    return a, rho


def cmv_entries(alphas, rhos, size: int) -> np.ndarray:
    """Fill a size x size matrix from the parity entry formulas.

    ``alphas``/``rhos`` must cover indices 0..size-1; entries that would
    reference indices beyond are skipped.
    """
    n = size
    c = np.zeros((n, n), dtype=complex)

    def al(k):
        return -1.0 + 0j if k == -1 else alphas[k]

    for m in range(n):
        eps_m, eps_m1 = m % 2, (m + 1) % 2
        c[m, m] = -np.conj(al(m)) * al(m - 1)
        if m + 1 < n:
            c[m + 1, m] = np.conj(al(m + 1)) * rhos[m] * eps_m - al(m - 1) * rhos[m] * eps_m1
            c[m, m + 1] = np.conj(al(m + 1)) * rhos[m] * eps_m1 - al(m - 1) * rhos[m] * eps_m
        if m + 2 < n:
            c[m + 2, m] = rhos[m] * rhos[m + 1] * eps_m
            c[m, m + 2] = rhos[m] * rhos[m + 1] * eps_m1
    return c


@dataclass(frozen=True)
class CmvMatrix:
    """Finite unitary CMV matrix of dimension N+1 with its parameters."""

    params: SchurParams
    dense: np.ndarray
    alternate: bool = False

    @property
    def n(self) -> int:
        return self.dense.shape[0]

    def unitarity_residual(self) -> float:
        d = self.dense
        return float(np.linalg.norm(d.conj().T @ d - np.eye(self.n), "fro"))


@dataclass(frozen=True)
class TruncatedCmv:
    """CMV matrix with its first row and column removed.

    ``params`` is finite (terminal set) for a genuine truncation; a leading
    section of a semi-infinite matrix carries ``terminal=None``.  The
    colligation parts are S = conj(alpha_0), the row G and the column F
    that were split off the parent.
    """

    params: SchurParams
    dense: np.ndarray
    S: complex
    G: np.ndarray
    F: np.ndarray
    alternate: bool = False
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)
    # verification data attached by the inverse solvers
    info: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.dense.shape[0]

    def parent(self) -> np.ndarray:
        """Bordered matrix [[S, G], [F, T]]."""
        top = np.concatenate([[self.S], self.G])
        body = np.column_stack([self.F, self.dense])
        return np.vstack([top, body])


def assemble_cmv(p: SchurParams) -> CmvMatrix:
    """(N+1)x(N+1) CMV matrix from alpha_0..alpha_{N-1} and unimodular alpha_N."""
    a, rho = _full_alphas(p)
    dense = cmv_entries(a, rho, a.size)
    dense.setflags(write=False)
    return CmvMatrix(p, dense)


def _psi(alpha: complex, terminal: bool) -> np.ndarray:
    if terminal:
        return np.array([[np.conj(alpha)]], dtype=complex)
    r = np.sqrt(1.0 - abs(alpha) ** 2)
    return np.array([[np.conj(alpha), r], [r, -alpha]], dtype=complex)


def lm_factors(p: SchurParams) -> tuple[np.ndarray, np.ndarray]:
    """L = Psi(a0) + Psi(a2) + ..., M = 1 + Psi(a1) + ...; L @ M is the CMV matrix."""
    a, _ = _full_alphas(p)
    size = a.size
    N = size - 1

    def build(start_ones: int, first_index: int) -> np.ndarray:
        m = np.zeros((size, size), dtype=complex)
        pos = 0
        if start_ones:
            m[0, 0] = 1.0
            pos = 1
        k = first_index
        while pos < size:
            blk = _psi(a[k], terminal=(k == N))
            w = blk.shape[0]
            m[pos : pos + w, pos : pos + w] = blk
            pos += w
            k += 2
        return m

    return build(0, 0), build(1, 1)


def alternate_cmv(p: SchurParams) -> CmvMatrix:
    """CMV matrix in the alternate basis, which is the transpose of the standard one."""
    a, _ = _full_alphas(p)
    L, M = lm_factors(p)
    dense = M @ L
    dense.setflags(write=False)
    return CmvMatrix(p, dense, alternate=True)


def truncate(c: CmvMatrix) -> TruncatedCmv:
    if c.n < 2:
        raise ArgumentError("truncation needs a parent of dimension >= 2")
    d = np.array(c.dense)
    t = d[1:, 1:].copy()
    t.setflags(write=False)
    return TruncatedCmv(c.params, t, complex(d[0, 0]), d[0, 1:].copy(), d[1:, 0].copy(),
                        alternate=c.alternate, tol=c.params.tol)


def truncated_cmv(p: SchurParams) -> TruncatedCmv:
    """Shorthand for truncate(assemble_cmv(p))."""
    return truncate(assemble_cmv(p))


@dataclass(frozen=True)
class BlockTridiagonal:
    """Diagonal blocks B_n with sub-diagonal A_n and super-diagonal C_n."""

    A: tuple
    B: tuple
    C: tuple

    def assemble(self) -> np.ndarray:
        sizes = [b.shape[0] for b in self.B]
        offs = np.concatenate([[0], np.cumsum(sizes)])
        out = np.zeros((offs[-1], offs[-1]), dtype=complex)
        for i, b in enumerate(self.B):
            out[offs[i] : offs[i + 1], offs[i] : offs[i + 1]] = b
        for i, a in enumerate(self.A):
            out[offs[i + 1] : offs[i + 2], offs[i] : offs[i + 1]] = a
        for i, c in enumerate(self.C):
            out[offs[i] : offs[i + 1], offs[i + 1] : offs[i + 2]] = c
        return out


def blocks(m) -> BlockTridiagonal:
    """Split a CMV matrix (or a bordered truncation) into 1, 2, 2, ... blocks.

    Accepts a CmvMatrix or a TruncatedCmv; the latter is re-bordered so the
    block boundaries match the parent.
    """
    dense = m.parent() if isinstance(m, TruncatedCmv) else np.asarray(m.dense)
    size = dense.shape[0]
    offs = [0, 1]
    while offs[-1] < size:
        offs.append(min(offs[-1] + 2, size))
    sl = [slice(offs[i], offs[i + 1]) for i in range(len(offs) - 1)]
    B = tuple(dense[s, s].copy() for s in sl)
    A = tuple(dense[sl[i + 1], sl[i]].copy() for i in range(len(sl) - 1))
    C = tuple(dense[sl[i], sl[i + 1]].copy() for i in range(len(sl) - 1))
    return BlockTridiagonal(A, B, C)


class NonUniqueWarning(UserWarning):
    """Parameters returned are one representative of a family."""


def params_from_truncated(m, tol: Tolerances = DEFAULT_TOL) -> SchurParams:
    """Recover alpha_0..alpha_N from the entries of a truncated CMV matrix.

    For N >= 2 the recovery is unique: rho_m is the length of the pair
    (conj(alpha_{m+1}) rho_m, rho_{m+1} rho_m) sitting in column/row m, and
    the alphas follow by division.  A 1x1 input only determines the
    product -conj(alpha_1) alpha_0; the normal form alpha_1 = 1 is returned
    together with a ``NonUniqueWarning``.
    """
    t = check_square(m.dense if isinstance(m, TruncatedCmv) else m, "truncated CMV matrix")
    N = t.shape[0]
    if N == 1:
        v = complex(t[0, 0])
        if abs(v) > 1.0 - tol.eps_roots:
            raise StructureError("1x1 entry must lie in the open unit disk")
        warnings.warn("1x1 truncated CMV matrix: returning normal form alpha_1 = 1", NonUniqueWarning, stacklevel=2)
        return SchurParams([-v], 1.0 + 0j, tol)

    def c(i, j):
        # parent indices; T[i-1, j-1] = C[i, j]
        return complex(t[i - 1, j - 1])

    rho = np.zeros(N + 1)
    first = np.zeros(N + 1, dtype=complex)  # conj(alpha_{m+1}) rho_m, m = 1..N-1
    for mm in range(1, N):
        first[mm] = c(mm + 1, mm) if mm % 2 else c(mm, mm + 1)
        second = 0.0
        if mm + 2 <= N:
            second = c(mm + 2, mm) if mm % 2 else c(mm, mm + 2)
        rho[mm] = float(np.hypot(abs(first[mm]), abs(second)))
    if np.any(rho[1:N] <= tol.eps_structural):
        raise StructureError("a recovered rho vanishes: input is not an interior truncated CMV matrix")

    est: list[list[tuple[float, complex]]] = [[] for _ in range(N + 1)]
    for mm in range(1, N):
        # alpha_{mm-1}
        e = c(mm, mm + 1) if mm % 2 else c(mm + 1, mm)
        est[mm - 1].append((rho[mm], -e / rho[mm]))
        # alpha_{mm+1}
        est[mm + 1].append((rho[mm], np.conj(first[mm] / rho[mm])))
    aN = max(est[N])[1]
    if abs(aN) <= tol.eps_structural:
        raise StructureError("terminal parameter vanishes")
    aN = aN / abs(aN)
    est[N] = [(1.0, aN)]
    if not est[N - 1]:
        est[N - 1].append((0.0, -aN * c(N, N)))
    alphas = np.array([max(e, key=lambda x: x[0])[1] for e in est])
    if np.max(np.abs(alphas[:N])) >= 1.0:
        raise StructureError("recovered parameters leave the unit disk")
    p = SchurParams(alphas[:N], aN, tol)
    resid = float(np.max(np.abs(truncated_cmv(p).dense - t)))
    if resid > tol.eps_roots * max(1.0, float(np.max(np.abs(t)))):
        raise StructureError(f"not a truncated CMV matrix: reassembly residual {resid:.3e}")
    return p


def rotation_matrix(n: int, angle: float) -> np.ndarray:
    """diag(e^{it}, 1, e^{it}, 1, ...) of size n."""
    d = np.ones(n, dtype=complex)
    d[0::2] = np.exp(1j * angle)
    return np.diag(d)


def conjugation_residual(t: TruncatedCmv, angle: float) -> float:
    """max |V T V^{-1} - T(e^{it} alpha)| for the diagonal rotation V."""
    V = rotation_matrix(t.n, angle)
    lhs = V @ np.asarray(t.dense) @ np.conj(V)
    rhs = _rebuild(t.params.rotated(angle), t.n, t.alternate)
    return float(np.max(np.abs(lhs - rhs)))


def rotate_conjugate(t: TruncatedCmv, angle: float) -> TruncatedCmv:
    """Truncated CMV matrix with parameters e^{it} alpha_n.

    The result is checked against V T V^{-1} before it is returned.
    """
    p = t.params.rotated(angle)
    out = _from_params(p, t.n, t.alternate, t.tol)
    gap = conjugation_residual(t, angle)
    if gap > t.tol.eps_structural * max(t.n, 1) * 10:
        raise StructureError(f"rotation conjugation identity fails: {gap:.3e}")
    return out


@dataclass(frozen=True)
class DefectData:
    rho0: float
    left: np.ndarray
    right: np.ndarray
    residuals: dict


def _defect_vectors(t: TruncatedCmv) -> tuple[float, np.ndarray, np.ndarray]:
    a = t.params.interior
    a0 = a[0]
    a1 = a[1] if a.size > 1 else t.params.terminal
    rho0 = float(np.sqrt(1.0 - abs(a0) ** 2))
    rho1 = float(np.sqrt(max(0.0, 1.0 - abs(a1) ** 2)))
    left = np.zeros(t.n, dtype=complex)
    left[0] = 1.0
    right = np.zeros(t.n, dtype=complex)
    right[0] = a1
    if t.n > 1:
        right[1] = rho1
    return rho0, left, right


def defect_data(t: TruncatedCmv) -> DefectData:
    """Rank-one defects: I - TT* = rho_0^2 d1 d1*, I - T*T = rho_0^2 v v*.

    Here d1 is the first basis vector and v = alpha_1 d1 + rho_1 d2.
    Residuals compare the Gram-matrix form, the matrix square roots, and
    the identity T v = -alpha_0 d1.
    """
    T = np.asarray(t.dense)
    n = t.n
    tol = t.tol
    rho0, d1, v = _defect_vectors(t)
    eye = np.eye(n)
    left_gram = eye - T @ T.conj().T
    right_gram = eye - T.conj().T @ T
    for name, g in (("I - TT*", left_gram), ("I - T*T", right_gram)):
        sv = np.linalg.svd(g, compute_uv=False)
        if int(np.sum(sv > tol.eps_roots)) != 1:
            raise StructureError(f"{name} is not rank one (singular values {sv[:3]})")
    res = {
        "left_gram": float(np.max(np.abs(left_gram - rho0**2 * np.outer(d1, d1.conj())))),
        "right_gram": float(np.max(np.abs(right_gram - rho0**2 * np.outer(v, v.conj())))),
        "left_sqrt": float(np.max(np.abs(_psd_sqrt(left_gram) - rho0 * np.outer(d1, d1.conj())))),
        "right_sqrt": float(np.max(np.abs(_psd_sqrt(right_gram) - rho0 * np.outer(v, v.conj())))),
        "T_v": float(np.max(np.abs(T @ v + t.params.interior[0] * d1))),
    }
    return DefectData(rho0, d1, v, res)


def _psd_sqrt(g: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh((g + g.conj().T) / 2)
    # rounding noise of size eps would otherwise become sqrt(eps)
    w = np.where(w > 1e-12 * max(1.0, float(np.max(np.abs(w)))), w, 0.0)
    return (u * np.sqrt(w)) @ u.conj().T


def _section(alphas: np.ndarray, n: int) -> np.ndarray:
    """n x n leading section of the semi-infinite truncation for given alphas.

    ``alphas`` must cover indices 0..n+1; missing ones are taken as zero.
    """
    a = np.zeros(n + 2, dtype=complex)
    k = min(alphas.size, n + 2)
    a[:k] = alphas[:k]
    rho = np.sqrt(1.0 - np.abs(a) ** 2)
    return cmv_entries(a, rho, n + 2)[1 : n + 1, 1 : n + 1]


def _rebuild(p: SchurParams, n: int, alternate: bool) -> np.ndarray:
    if p.terminal is None:
        d = _section(p.interior, n)
    else:
        d = assemble_cmv(p).dense[1:, 1:]
    return d.T.copy() if alternate else np.array(d)


def _from_params(p: SchurParams, n: int, alternate: bool, tol: Tolerances) -> TruncatedCmv:
    if p.terminal is None:
        a = np.zeros(n + 2, dtype=complex)
        k = min(p.interior.size, n + 2)
        a[:k] = p.interior[:k]
        rho = np.sqrt(1.0 - np.abs(a) ** 2)
        parent = cmv_entries(a, rho, n + 2)[: n + 1, : n + 1]
    else:
        parent = np.array(assemble_cmv(p).dense)
    if alternate:
        parent = parent.T.copy()
    t = parent[1:, 1:].copy()
    t.setflags(write=False)
    return TruncatedCmv(p, t, complex(parent[0, 0]), parent[0, 1:].copy(), parent[1:, 0].copy(),
                        alternate=alternate, tol=tol)


def livsic_matrix(r: float, phi: float, n: int, tol: Tolerances = DEFAULT_TOL) -> TruncatedCmv:
    """n x n leading section of the quasi-unitary extension with constant
    characteristic function r e^{i phi}: t(1,2) = -r e^{i phi}, shift pattern elsewhere.

    Its parameters are (r e^{i phi}, 0, 0, ...), so the result carries
    ``terminal=None``.
    """
    if not 0.0 < r < 1.0:
        raise ArgumentError("r must lie in (0, 1)")
    if n < 1:
        raise ArgumentError("dimension must be >= 1")
    alphas = np.zeros(n + 1, dtype=complex)
    alphas[0] = r * np.exp(1j * phi)
    return _from_params(SchurParams(alphas, None, tol), n, False, tol)


@dataclass(frozen=True)
class SubmatrixResult:
    """T with its first k rows and columns deleted, plus the predicted tail form."""

    matrix: TruncatedCmv
    k: int
    tail_params: SchurParams
    transposed: bool
    residual: float


def submatrix_k(t: TruncatedCmv, k: int) -> SubmatrixResult:
    """Delete the first k rows and columns of T.

    For even k the result is the truncated CMV matrix of alpha_k, alpha_{k+1}, ...;
    for odd k it is the transpose of that matrix.  ``residual`` measures the
    gap between the deleted block and this prediction.
    """
    if not 0 <= k < t.n:
        raise ArgumentError(f"k must satisfy 0 <= k < {t.n}")
    raw = np.asarray(t.dense)[k:, k:]
    tail = t.params.tail(k)
    transposed = bool((k % 2) ^ t.alternate)
    pred = _from_params(tail, t.n - k, transposed, t.tol)
    residual = float(np.max(np.abs(pred.dense - raw)))
    if residual > t.tol.eps_structural * 10:
        raise StructureError(f"deleted submatrix does not match the tail prediction: {residual:.3e}")
    return SubmatrixResult(pred, k, tail, transposed, residual)
