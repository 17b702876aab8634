"""Inverse spectral solvers for finite truncated CMV matrices.

* ``reconstruct_from_spectrum``: all N eigenvalues given; unique up to a
  common unimodular factor on the parameters.
* ``mixed_first``: r eigenvalues plus alpha_0..alpha_{N-r}; unique when it
  exists, found through a degenerate Nevanlinna-Pick problem.
* ``mixed_last``: m eigenvalues plus alpha_m..alpha_N; exists always, one
  solution is returned.

Every solver re-verifies its output against the data it was given and
stores the residuals in ``result.info["verification"]``.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from ._validation import as_complex_vector, check_in_disk, check_unimodular
from .cmv import TruncatedCmv, params_from_truncated, truncated_cmv
from .errors import ArgumentError, CapabilityError, NoSolution, NumericError, StructureError
from .numkernel import DEFAULT_TOL, Poly, Tolerances, cluster, roots, star
from .opuc import khrushchev_params, ttt_verblunsky
from .schurfun import BlaschkeProduct, SchurParams, schur_params_of_blaschke, wall_pair
from .spectra import hessenberg_charpoly

MAX_NODE_MULTIPLICITY = 3


class ConditioningWarning(UserWarning):
    """Data sits close to the unit circle; results may lose accuracy."""


def as_multiset(eigen) -> list[tuple[complex, int]]:
    """Normalize eigenvalue data to a list of distinct (value, multiplicity).

    Accepts a flat sequence of complex numbers (repeats count as
    multiplicity) or a sequence of (value, multiplicity) pairs.
    """
    items = list(eigen)
    if items and all(isinstance(e, (tuple, list)) and len(e) == 2 and isinstance(e[1], (int, np.integer)) for e in items):
        flat = []
        for v, m in items:
            if m < 1:
                raise ArgumentError("multiplicities must be positive")
            flat.extend([complex(v)] * int(m))
    else:
        flat = list(as_complex_vector(items, "eigenvalues")) if items else []
    flat = check_in_disk(flat, "eigenvalues") if flat else np.zeros(0, dtype=complex)
    return [(complex(v), int(m)) for v, m in cluster(flat, 1e-14)]


def _flatten(ms) -> np.ndarray:
    return np.array([v for v, m in ms for _ in range(m)], dtype=complex)


def _attach(t: TruncatedCmv, **info) -> TruncatedCmv:
    return dataclasses.replace(t, info={**t.info, **info})


def _node_residuals(P: Poly, ms) -> float:
    """max |P^{(j)}(z) / j!| over nodes and j < multiplicity, relative to the coefficient size."""
    scale = max(1.0, float(np.sum(np.abs(P.coeffs))))
    worst = 0.0
    for z, m in ms:
        for j in range(m):
            worst = max(worst, abs(P.deriv(j)(z)) / factorial(j))
    return worst / scale


# ---------------------------------------------------------------- full spectrum


def reconstruct_from_spectrum(zs, phase: float = 0.0, tol: Tolerances = DEFAULT_TOL) -> TruncatedCmv:
    """Truncated CMV matrix whose eigenvalues are ``zs`` (with multiplicity).

    The parameters are those of b = e^{i phase} prod (z - z_k)/(1 - conj(z_k) z),
    read off the reversed Verblunsky coefficients of P = prod (z - z_k).
    ``phase`` selects a member of the unitarily equivalent family; it
    defaults to 0.
    """
    zs = check_in_disk(zs, "eigenvalues")
    if zs.size == 0:
        raise ArgumentError("need at least one eigenvalue")
    notes = []
    if np.max(np.abs(zs)) > 1.0 - 1e-3:
        msg = f"eigenvalue of modulus {np.max(np.abs(zs)):.6g} is close to the unit circle"
        warnings.warn(msg, ConditioningWarning, stacklevel=2)
        notes.append(msg)
    P = Poly.from_roots(zs, tol)
    params = khrushchev_params(P).rotated(phase)
    t = truncated_cmv(params)
    det = hessenberg_charpoly(t.dense)
    gap = float(np.max(np.abs(det.padded(zs.size + 1) - P.padded(zs.size + 1))))
    if gap > tol.eps_roots * max(1.0, float(np.sum(np.abs(P.coeffs)))):
        raise NumericError(f"characteristic polynomial misses the prescribed spectrum by {gap:.3e}", partial=t)
    return _attach(t, verification={"charpoly_gap": gap, "phase": float(phase)}, warnings=notes)


# ---------------------------------------------------------------- mixed, first parameters


@dataclass(frozen=True)
class MixedFirstData:
    """r eigenvalues (with multiplicity) and the leading parameters alpha_0, alpha_1, ...

    Without a zero eigenvalue exactly N - r + 1 leading parameters are
    required.  With 0 among the eigenvalues any count from N - r + 1 up to
    N - r' + 1 is accepted, r' being the number of nonzero eigenvalues.
    """

    eigen: tuple
    first_params: np.ndarray
    n: int
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        ms = tuple(as_multiset(self.eigen))
        object.__setattr__(self, "eigen", ms)
        fp = check_in_disk(self.first_params, "first parameters", margin=self.tol.eps_roots)
        object.__setattr__(self, "first_params", fp)
        N = int(self.n)
        r = self.r
        if N < 1:
            raise ArgumentError("target dimension must be >= 1")
        if r < 1 or r > N:
            raise ArgumentError(f"need 1 <= r <= N, got r = {r}, N = {N}")
        lo = N - r + 1
        hi = N - self.r_nonzero + 1 if self.zero_multiplicity else lo
        hi = min(hi, N)
        if not lo <= fp.size <= max(hi, lo):
            raise ArgumentError(f"expected {lo} leading parameters" + (f" (up to {hi})" if hi > lo else "") + f", got {fp.size}")

    @property
    def r(self) -> int:
        return sum(m for _, m in self.eigen)

    @property
    def zero_multiplicity(self) -> int:
        return sum(m for v, m in self.eigen if v == 0)

    @property
    def r_nonzero(self) -> int:
        return self.r - self.zero_multiplicity


@dataclass(frozen=True)
class FamilyDescriptor:
    """Infinitely many solutions: the data leave some parameters free.

    ``free_interior`` lists the parameter indices the caller may choose in
    the disk (index ``zero_multiplicity`` must stay nonzero when listed);
    ``free_terminal`` says whether the unimodular alpha_N is free.  The
    remaining parameters are either ``fixed_params`` or determined by the
    nonzero eigenvalues through ``member``.
    """

    n: int
    fixed_params: np.ndarray
    free_interior: tuple
    free_terminal: bool
    zero_multiplicity: int
    nonzero_eigen: tuple
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def member(self, values=(), gamma: complex = 1.0) -> TruncatedCmv:
        values = as_complex_vector(values, "free parameter values") if len(values) else np.zeros(0, dtype=complex)
        if values.size != len(self.free_interior):
            raise ArgumentError(f"expected {len(self.free_interior)} free values, got {values.size}")
        params = np.concatenate([self.fixed_params, values])
        k = self.zero_multiplicity
        if k < params.size and params[k] == 0:
            raise ArgumentError(f"alpha_{k} must be nonzero so that 0 has multiplicity exactly {k}")
        if self.free_terminal:
            gamma = check_unimodular(gamma, "terminal parameter", atol=1e-10)
            t = truncated_cmv(SchurParams(params, gamma, self.tol))
            ms = [(0j, k)] if k else []
        else:
            reduced = MixedFirstData(self.nonzero_eigen, params[k:], self.n - k, self.tol)
            sub = mixed_first(reduced)
            full = np.concatenate([np.zeros(k, dtype=complex), sub.params.interior])
            t = truncated_cmv(SchurParams(full, sub.params.terminal, self.tol))
            ms = [(0j, k)] + list(self.nonzero_eigen)
        resid = _node_residuals(hessenberg_charpoly(t.dense), ms)
        return _attach(t, verification={"node_residual": resid})


def _pick_solve(nodes, w, tol: Tolerances):
    """Order (r-1) Blaschke s with s(z_k) = w_k from a rank-deficient Pick matrix."""
    z = np.asarray(nodes)
    P = (1.0 - np.outer(w, np.conj(w))) / (1.0 - np.outer(z, np.conj(z)))
    P = (P + P.conj().T) / 2
    ev, vec = np.linalg.eigh(P)
    scale = max(1.0, float(np.max(np.abs(P))))
    report = {"pick_eigenvalues": ev.tolist()}
    if ev[0] < -tol.eps_roots * scale:
        raise NoSolution("Pick matrix has a negative eigenvalue: no Schur interpolant", report)
    if ev[0] > tol.eps_roots * scale:
        raise NoSolution("Pick matrix is positive definite: no interpolant of the required order", report)
    if ev.size > 1 and ev[1] <= tol.eps_roots * scale:
        raise NoSolution("Pick matrix rank deficiency exceeds one", report)
    c = vec[:, 0]
    r = z.size
    # s = sum c_k/(1 - conj(z_k) z) / sum c_k conj(w_k)/(1 - conj(z_k) z), cleared of denominators
    num = Poly([0.0], tol)
    den = Poly([0.0], tol)
    for k in range(r):
        others = Poly.from_roots([1.0 / np.conj(z[j]) for j in range(r) if j != k], tol)
        # prod_{j != k}(1 - conj(z_j) z) = prod(-conj(z_j)) * prod(z - 1/conj(z_j))
        lead = np.prod([-np.conj(z[j]) for j in range(r) if j != k]) if r > 1 else 1.0
        basis = others * lead
        num = num + basis * c[k]
        den = den + basis * (c[k] * np.conj(w[k]))
    return num, den, report


def _kernel_solve(nodes_ms, wp, r: int, tol: Tolerances):
    """Polynomial q of degree <= r-1 with A q^* + z B^* q vanishing to order l_k at z_k.

    The condition is real-linear in q; a one-dimensional real kernel gives
    s = q / q^*.
    """
    A, Bs = wp.A, wp.B_star
    rows1, rows2 = [], []
    for z, l in nodes_ms:
        for j in range(l):
            r1, r2 = [], []
            for i in range(r):
                r1.append((Bs * Poly.monomial(i + 1, tol)).deriv(j)(z) / factorial(j))
                r2.append((A * Poly.monomial(r - 1 - i, tol)).deriv(j)(z) / factorial(j))
            rows1.append(r1)
            rows2.append(r2)
    M1 = np.array(rows1, dtype=complex)
    M2 = np.array(rows2, dtype=complex)
    X = M1 + M2
    Y = 1j * (M1 - M2)
    big = np.block([[X.real, Y.real], [X.imag, Y.imag]])
    big = big / np.linalg.norm(big, axis=1, keepdims=True)
    _, sv, vt = np.linalg.svd(big)
    report = {"kernel_singular_values": sv.tolist()}
    if sv[-1] > tol.eps_roots * sv[0]:
        raise NoSolution("interpolation system has trivial kernel: no Blaschke solution of the required order", report)
    if sv.size > 1 and sv[-2] <= tol.eps_roots * sv[0]:
        raise NoSolution("interpolation kernel has dimension above one", report)
    x = vt[-1]
    q = Poly(x[:r] + 1j * x[r:], tol)
    return q, star(q, r - 1), report


def _blaschke_from_ratio(num: Poly, den: Poly, order: int, tol: Tolerances, report: dict) -> BlaschkeProduct:
    """Check num/den is a Blaschke product of the given order and return it."""
    if order == 0:
        val = complex(num.coeffs[0] / den.coeffs[0])
        if abs(abs(val) - 1.0) > tol.eps_roots * 100:
            raise NoSolution("constant interpolant is not unimodular", {**report, "modulus": abs(val)})
        return BlaschkeProduct(float(np.angle(val)), np.zeros(0), tol)
    if num.degree != order:
        raise NoSolution("interpolant has too few zeros", report)
    zs = roots(num, tol)
    if np.max(np.abs(zs)) >= 1.0 - tol.eps_roots:
        raise NoSolution("interpolant has a zero outside the disk", {**report, "zeros": zs.tolist()})
    probe = np.exp(2j * np.pi * np.arange(8) / 8) * 0.5
    b0 = BlaschkeProduct(0.0, zs, tol)
    ratio = num(probe) / den(probe) / b0(probe)
    if np.max(np.abs(ratio - ratio.mean())) > tol.eps_roots * 1e2 or abs(abs(ratio.mean()) - 1) > tol.eps_roots * 1e2:
        raise NoSolution("interpolant is not a Blaschke product", report)
    return BlaschkeProduct(float(np.angle(ratio.mean())), zs, tol)


def mixed_first(d: MixedFirstData, method: str = "auto"):
    """Unique truncated CMV matrix with the given eigenvalues and leading parameters.

    ``method`` is ``"pick"`` (null vector of the Pick matrix, distinct nodes
    only), ``"kernel"`` (real-linear interpolation kernel, any multiplicity)
    or ``"auto"``.  Returns a ``TruncatedCmv``; data with a zero eigenvalue
    may instead produce a ``FamilyDescriptor``.  Raises ``NoSolution`` when
    the data admit no matrix.
    """
    if d.zero_multiplicity:
        return mixed_first_zero_reduction(d)
    tol = d.tol
    N, r = d.n, d.r
    if d.first_params.size != N - r + 1:
        raise ArgumentError(f"expected {N - r + 1} leading parameters, got {d.first_params.size}")
    if max(m for _, m in d.eigen) > MAX_NODE_MULTIPLICITY:
        raise CapabilityError(f"node multiplicities above {MAX_NODE_MULTIPLICITY} are not supported")
    if method == "auto":
        method = "pick" if all(m == 1 for _, m in d.eigen) else "kernel"
    wp = wall_pair(d.first_params, tol)
    nodes = np.array([z for z, _ in d.eigen])
    if method == "pick":
        if any(m > 1 for _, m in d.eigen):
            raise ArgumentError("the Pick route needs distinct nodes; use method='kernel'")
        w = -wp.A(nodes) / (nodes * wp.B_star(nodes))
        num, den, report = _pick_solve(nodes, w, tol)
        report["targets"] = w.tolist()
    elif method == "kernel":
        num, den, report = _kernel_solve(d.eigen, wp, r, tol)
    else:
        raise ArgumentError(f"unknown method {method!r}")
    s = _blaschke_from_ratio(num, den, r - 1, tol, report)
    tail = schur_params_of_blaschke(s) if s.order else SchurParams([], s.unimodular, tol)
    params = SchurParams(np.concatenate([d.first_params, tail.interior]), tail.terminal, tol)
    t = truncated_cmv(params)
    node_res = _node_residuals(hessenberg_charpoly(t.dense), d.eigen)
    try:
        recovered = params_from_truncated(t.dense, tol) if N > 1 else params
    except StructureError as exc:
        raise NoSolution(f"candidate is not a valid truncated CMV matrix: {exc}", report) from exc
    param_gap = float(np.max(np.abs(recovered.interior[: d.first_params.size] - d.first_params)))
    verification = {"node_residual": node_res, "param_gap": param_gap, "method": method}
    if node_res > tol.eps_roots * 10 or param_gap > tol.eps_roots:
        raise NoSolution("candidate failed verification", {**report, **verification})
    return _attach(t, verification=verification)


def mixed_first_zero_reduction(d: MixedFirstData):
    """Mixed-first data in which 0 is an eigenvalue of multiplicity k.

    A zero of order k of the characteristic function forces
    alpha_0 = ... = alpha_{k-1} = 0 and alpha_k != 0; the rest is the same
    problem for the k-th Schur iterate.
    """
    tol = d.tol
    k = d.zero_multiplicity
    if k == 0:
        return mixed_first(d)
    N = d.n
    given = d.first_params
    nonzero = tuple((v, m) for v, m in d.eigen if v != 0)
    rp = sum(m for _, m in nonzero)
    bad = [j for j in range(min(k, given.size)) if given[j] != 0]
    if bad:
        raise NoSolution(
            f"0 is an eigenvalue of multiplicity {k} but alpha_{bad[0]} = {given[bad[0]]} is nonzero",
            {"zero_multiplicity": k, "offending_index": bad[0]},
        )
    if given.size > k and given[k] == 0:
        raise NoSolution(
            f"alpha_{k} = 0 would raise the multiplicity of the zero eigenvalue above {k}",
            {"zero_multiplicity": k},
        )
    if k == N:
        # only the terminal is free: e^{i phi} z^N
        return FamilyDescriptor(N, np.zeros(N, dtype=complex), (), True, k, (), tol)
    fixed = np.concatenate([np.zeros(k, dtype=complex), given[k:]])
    need = N - rp + 1
    if rp > 0 and fixed.size >= need:
        reduced = MixedFirstData(nonzero, fixed[k:need], N - k, tol)
        sub = mixed_first(reduced)
        params = SchurParams(np.concatenate([np.zeros(k, dtype=complex), sub.params.interior]), sub.params.terminal, tol)
        t = truncated_cmv(params)
        node_res = _node_residuals(hessenberg_charpoly(t.dense), d.eigen)
        if node_res > tol.eps_roots * 10:
            raise NoSolution("reduced solution failed verification", {"node_residual": node_res})
        return _attach(t, verification={"node_residual": node_res, "reduced": sub.info.get("verification", {})})
    if rp == 0:
        free = tuple(range(fixed.size, N))
        return FamilyDescriptor(N, fixed, free, True, k, (), tol)
    free = tuple(range(fixed.size, need))
    return FamilyDescriptor(N, fixed, free, False, k, nonzero, tol)


# ---------------------------------------------------------------- mixed, last parameters


@dataclass(frozen=True)
class MixedLastData:
    """m eigenvalues and the trailing parameters alpha_m..alpha_{N-1} plus unimodular alpha_N."""

    eigen: np.ndarray
    last_params: np.ndarray
    terminal: complex
    n: int
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        zs = check_in_disk(list(self.eigen), "eigenvalues") if len(self.eigen) else np.zeros(0, dtype=complex)
        object.__setattr__(self, "eigen", zs)
        lp = check_in_disk(list(self.last_params), "last parameters", margin=self.tol.eps_roots) if len(self.last_params) else np.zeros(0, dtype=complex)
        object.__setattr__(self, "last_params", lp)
        object.__setattr__(self, "terminal", check_unimodular(self.terminal, "terminal parameter", atol=1e-10))
        if zs.size + lp.size != self.n:
            raise ArgumentError(f"need m + (N - m) = N, got {zs.size} + {lp.size} != {self.n}")
        if self.n < 1:
            raise ArgumentError("target dimension must be >= 1")


def mixed_last(d: MixedLastData, seed: int = 0) -> TruncatedCmv:
    """One truncated CMV matrix with the given eigenvalues and trailing parameters.

    Existence is guaranteed; for m >= 2 the construction relies on a
    multi-start Newton solve, which raises ``ExistenceNotFound`` if no
    start converges.  Uniqueness is not claimed.
    """
    tol = d.tol
    N = d.n
    m = d.eigen.size
    gamma = d.terminal
    if m == 0:
        params = SchurParams(d.last_params, gamma, tol)
    else:
        beta, ext = ttt_verblunsky(d.last_params, d.eigen, gamma, seed=seed)
        interior = np.array([-gamma * np.conj(beta[N - 1 - j]) for j in range(N)], dtype=complex)
        params = SchurParams(interior, gamma, tol)
    t = truncated_cmv(params)
    ms = cluster(d.eigen, 1e-14) if m else []
    node_res = _node_residuals(hessenberg_charpoly(t.dense), ms) if m else 0.0
    if N > 1:
        rec = params_from_truncated(t.dense, tol)
    else:
        rec = params
    tail_gap = float(np.max(np.abs(rec.as_array()[m:] - np.append(d.last_params, gamma))))
    verification = {"node_residual": node_res, "param_gap": tail_gap}
    if node_res > tol.eps_roots * 10 or tail_gap > tol.eps_roots:
        raise NumericError("mixed-last solution failed verification", partial=verification)
    return _attach(t, verification=verification)


# ---------------------------------------------------------------- semi-infinite predicate


@dataclass(frozen=True)
class BlaschkeConditionReport:
    partial_sum: float
    partial_sums: np.ndarray
    monotone: bool
    note: str = "finite data cannot decide convergence of the infinite sum"


def blaschke_condition(zs) -> BlaschkeConditionReport:
    """Partial sums of sum (1 - |z_n|) over a finite prefix of eigenvalues."""
    zs = check_in_disk(zs, "eigenvalue prefix") if len(zs) else np.zeros(0, dtype=complex)
    sums = np.cumsum(1.0 - np.abs(zs))
    total = float(sums[-1]) if sums.size else 0.0
    return BlaschkeConditionReport(total, sums, bool(np.all(np.diff(sums) >= 0)))
