"""Monic orthogonal polynomials on the unit circle.

Szegő recursions in both directions, Verblunsky coefficients of monic
polynomials and of finitely supported measures, extensions with prescribed
zeros, and the finitely supported ("trivial") measure attached to a finite
Blaschke product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from ._validation import as_complex_vector, check_in_disk, check_unimodular
from .errors import (
    ArgumentError,
    ConsistencyError,
    ExistenceNotFound,
    NumericError,
    StructureError,
)
from .numkernel import DEFAULT_TOL, Poly, Tolerances, cluster, roots, star
from .schurfun import BlaschkeProduct, SchurParams


@dataclass(frozen=True)
class MonicOpucChain:
    """Phi_0 .. Phi_n together with the coefficients alpha_0 .. alpha_{n-1}."""

    polys: tuple
    alphas: np.ndarray

    @classmethod
    def start(cls, tol: Tolerances = DEFAULT_TOL) -> "MonicOpucChain":
        return cls((Poly([1.0], tol),), np.zeros(0, dtype=complex))

    @classmethod
    def from_alphas(cls, alphas, tol: Tolerances = DEFAULT_TOL) -> "MonicOpucChain":
        chain = cls.start(tol)
        for a in as_complex_vector(alphas, "Verblunsky coefficients"):
            chain = szego_up(chain, a)
        return chain

    @property
    def n(self) -> int:
        return len(self.polys) - 1

    @property
    def last(self) -> Poly:
        return self.polys[-1]

    @property
    def rhos(self) -> np.ndarray:
        return np.sqrt(1.0 - np.abs(self.alphas) ** 2)


def szego_up(chain: MonicOpucChain, alpha) -> MonicOpucChain:
    """Append Phi_{n+1} = z Phi_n - conj(alpha) Phi_n^*."""
    alpha = complex(alpha)
    if abs(alpha) >= 1.0:
        raise ArgumentError(f"Verblunsky coefficient must lie in the disk, got |a| = {abs(alpha):.17g}")
    new = _szego_step(chain.last, chain.n, alpha)
    return MonicOpucChain(chain.polys + (new,), np.append(chain.alphas, alpha))


def _szego_step(phi: Poly, n: int, alpha: complex) -> Poly:
    c = phi.shift().padded(n + 2) - np.conj(alpha) * star(phi, n).padded(n + 2)
    c[n + 1] = 1.0
    return Poly(c[: n + 2], phi.tol)


def szego_down(phi: Poly) -> tuple[complex, Poly]:
    """Inverse Szegő step: (alpha, Phi_prev) with z Phi_prev = (Phi + conj(alpha) Phi^*) / rho^2."""
    n = phi.degree
    if n < 1:
        raise ArgumentError("szego_down needs degree >= 1")
    c = phi.padded(n + 1)[: n + 1]
    if abs(c[n] - 1.0) > phi.tol.eps_roots:
        raise ArgumentError("szego_down needs a monic polynomial")
    alpha = -np.conj(c[0])
    if abs(alpha) >= 1.0:
        raise NumericError(f"|Phi(0)| = {abs(alpha):.17g} >= 1: zeros not inside the disk")
    rho2 = 1.0 - abs(alpha) ** 2
    s = np.conj(c[::-1])
    prev = (c + np.conj(alpha) * s) / rho2
    prev = prev[1:]
    prev[-1] = 1.0
    return complex(alpha), Poly(prev, phi.tol)


def verblunsky_from_monic(P: Poly) -> np.ndarray:
    """Verblunsky coefficients beta_0..beta_{n-1} with Phi_n = P (repeated inverse Szegő)."""
    out = []
    phi = P.trim()
    while phi.degree >= 1:
        a, phi = szego_down(phi)
        out.append(a)
    return np.asarray(out[::-1], dtype=complex)


def khrushchev_params(P: Poly) -> SchurParams:
    """Schur parameters of P / P^*: (-conj(beta_{n-1}), ..., -conj(beta_0); 1)."""
    beta = verblunsky_from_monic(P)
    return SchurParams(-np.conj(beta[::-1]), 1.0, P.tol)


def extend_one_zero(P: Poly, z1) -> tuple[complex, Poly]:
    """The unique alpha_n with (z P - conj(alpha_n) P^*)(z1) = 0, and that extension."""
    tol = P.tol
    z1 = complex(check_in_disk([z1], "prescribed zero")[0])
    n = P.degree
    ps = star(P, n)
    abar = z1 * P(z1) / ps(z1)
    alpha = complex(np.conj(abar))
    if abs(alpha) >= 1.0 - tol.eps_roots:
        raise NumericError(f"extension coefficient has modulus {abs(alpha):.17g}")
    return alpha, _szego_step(P, n, alpha)


def _extension_poly(P: Poly, alphas) -> Poly:
    n = P.degree
    phi = P
    for k, a in enumerate(alphas):
        phi = _szego_step(phi, n + k, a)
    return phi


def _zero_conditions(zs) -> list[tuple[complex, int]]:
    """Distinct points with multiplicity, grouped exactly (within 1e-14)."""
    return [(z, m) for z, m in cluster(zs, 1e-14)]


def _residuals(P: Poly, alphas, conds) -> np.ndarray:
    Q = _extension_poly(P, alphas)
    out = []
    for z, mult in conds:
        for j in range(mult):
            out.append(Q.deriv(j)(z) / factorial(j))
    return np.asarray(out, dtype=complex)


@dataclass(frozen=True)
class ExtensionResult:
    alphas: np.ndarray
    poly: Poly
    residual: float
    starts_tried: int
    jacobian_cond: float = field(default=float("nan"))


def extend_zeros_numeric(
    P: Poly,
    zs,
    seed: int = 0,
    max_random_starts: int = 32,
    max_iter: int = 100,
) -> ExtensionResult:
    """Find m new Verblunsky coefficients so that the extension vanishes on ``zs``.

    Damped Newton on the real and imaginary parts of the m residuals
    Q^{(j)}(z_k) / j!, multi-start from zero and then from seeded random
    interior points.  Only existence is known for this problem; the returned
    solution is one of possibly many.
    """
    tol = P.tol
    zs = check_in_disk(zs, "prescribed zeros")
    m = zs.size
    if m == 0:
        return ExtensionResult(np.zeros(0, dtype=complex), P, 0.0, 0)
    if m == 1:
        a, Q = extend_one_zero(P, zs[0])
        return ExtensionResult(np.array([a]), Q, float(abs(Q(zs[0]))), 0)
    conds = _zero_conditions(zs)
    rng = np.random.default_rng(seed)
    starts = [np.zeros(m, dtype=complex)]
    for _ in range(max_random_starts):
        r = 0.9 * np.sqrt(rng.uniform(size=m))
        starts.append(r * np.exp(2j * np.pi * rng.uniform(size=m)))

    def F(x):
        a = x[:m] + 1j * x[m:]
        r = _residuals(P, a, conds)
        return np.concatenate([r.real, r.imag])

    best = None
    for count, a0 in enumerate(starts, start=1):
        x = np.concatenate([a0.real, a0.imag])
        fx = F(x)
        for _ in range(max_iter):
            nf = np.linalg.norm(fx, np.inf)
            if nf <= tol.eps_roots * 1e-2:
                break
            J = _fd_jacobian(F, x, fx)
            step = np.linalg.lstsq(J, -fx, rcond=None)[0]
            lam = 1.0
            while lam > 1e-6:
                xn = x + lam * step
                an = xn[:m] + 1j * xn[m:]
                if np.max(np.abs(an)) < 1.0 - tol.eps_roots:
                    fn = F(xn)
                    if np.linalg.norm(fn) < np.linalg.norm(fx):
                        x, fx = xn, fn
                        break
                lam *= 0.5
            else:
                break
        res = float(np.linalg.norm(fx, np.inf))
        if best is None or res < best[1]:
            best = (x, res, count)
        if res <= tol.eps_roots:
            a = x[:m] + 1j * x[m:]
            J = _fd_jacobian(F, x, fx)
            return ExtensionResult(a, _extension_poly(P, a), res, count, float(np.linalg.cond(J)))
    raise ExistenceNotFound(
        f"no start converged (best residual {best[1]:.3e}); existence is guaranteed, "
        "this is a numerical failure",
        partial=best[0][:m] + 1j * best[0][m:],
    )


def _fd_jacobian(F, x, fx, h: float = 1e-7) -> np.ndarray:
    J = np.empty((fx.size, x.size))
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        J[:, i] = (F(x + e) - F(x - e)) / (2 * h)
    return J


def ttt_verblunsky(alphas, zs, gamma, seed: int = 0) -> tuple[np.ndarray, ExtensionResult]:
    """Verblunsky coefficients beta_0..beta_{n+m-1} behind the prescribed-tail construction.

    With b = gamma * Phi_{n+m} / Phi_{n+m}^*, the Schur parameters of b are
    gamma * (-conj(beta_{n+m-1}), ..., -conj(beta_0)) followed by gamma.
    """
    tol = DEFAULT_TOL
    alphas = check_in_disk(alphas, "prescribed parameters")
    gamma = check_unimodular(gamma, "terminal parameter", atol=1e-10)
    n = alphas.size
    # reversed, conjugated and rotated so that the tail of S(b) reproduces alphas
    beta = np.array([-gamma * np.conj(alphas[n - k - 1]) for k in range(n)], dtype=complex)
    P = MonicOpucChain.from_alphas(beta, tol).last
    ext = extend_zeros_numeric(P, zs, seed=seed)
    return np.concatenate([beta, ext.alphas]), ext


def theorem_ttt_build(alphas, zs, gamma, seed: int = 0) -> BlaschkeProduct:
    """Blaschke product of order n+m with S b = (omega_0..omega_{m-1}, alphas, gamma) and b(zs) = 0."""
    gamma = check_unimodular(gamma, "terminal parameter", atol=1e-10)
    _, ext = ttt_verblunsky(alphas, zs, gamma, seed=seed)
    Q = ext.poly
    zeros = roots(Q) if Q.degree >= 1 else np.zeros(0)
    return BlaschkeProduct(float(np.angle(gamma)), zeros)


@dataclass(frozen=True)
class TrivialMeasure:
    """Probability measure sum mu_k delta(zeta_k) with zeta_k on the unit circle."""

    support: np.ndarray
    weights: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        s = as_complex_vector(self.support, "support")
        w = np.asarray(self.weights, dtype=float).ravel()
        if s.size != w.size or s.size == 0:
            raise ArgumentError("support and weights must be non-empty and of equal length")
        if np.max(np.abs(np.abs(s) - 1.0)) > self.tol.eps_roots:
            raise ArgumentError("support points must lie on the unit circle")
        if np.any(w <= 0):
            raise ArgumentError("weights must be positive")
        if abs(w.sum() - 1.0) > self.tol.eps_roots:
            raise ArgumentError(f"weights sum to {w.sum():.17g}, not 1")
        for i in range(s.size):
            for j in range(i + 1, s.size):
                if abs(s[i] - s[j]) <= self.tol.eps_roots:
                    raise ArgumentError("support points must be distinct")
        s = s / np.abs(s)
        w = w / w.sum()
        s.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return int(self.support.size)


def measure_from_blaschke(b: BlaschkeProduct) -> TrivialMeasure:
    """The measure whose Schur function is ``b``: poles of (1 + z b) / (1 - z b)."""
    tol = b.tol
    P = b.monic_poly()
    N = b.order
    g = P.shift() * b.unimodular - star(P, N)
    zeta = roots(g, tol)
    if np.max(np.abs(np.abs(zeta) - 1.0)) > tol.eps_roots:
        raise ConsistencyError("support points of the measure are off the unit circle")
    zeta = zeta / np.abs(zeta)
    # mu_k = -1 / (zeta g'(zeta)) with g = 1 - z b; on the circle this is
    # 1 / (1 + sum of Poisson kernels), real and positive.
    dg = -(b(zeta) + zeta * b(zeta) * b.log_derivative(zeta))
    w = -1.0 / (zeta * dg)
    if np.max(np.abs(w.imag)) > tol.eps_roots or np.any(w.real <= 0):
        raise ConsistencyError("residue weights are not positive reals")
    w = w.real
    if abs(w.sum() - 1.0) > tol.eps_roots:
        raise ConsistencyError(f"residue weights sum to {w.sum():.17g}")
    order = np.argsort(np.angle(zeta))
    return TrivialMeasure(zeta[order], w[order] / w.sum(), tol)


def moments(mu: TrivialMeasure, n: int) -> complex:
    return complex(np.sum(mu.weights * mu.support ** (-n)))


def caratheodory_eval(mu: TrivialMeasure, z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise ArgumentError("Carathéodory function is evaluated inside the disk")
    zeta = mu.support.reshape((-1,) + (1,) * z.ndim)
    w = mu.weights.reshape(zeta.shape)
    out = np.sum(w * (zeta + z) / (zeta - z), axis=0)
    return out if out.ndim else complex(out)


def verblunsky_from_measure(mu: TrivialMeasure, check_norms: bool = True) -> np.ndarray:
    """alpha_0..alpha_{N-2} of an N-point measure by Gram–Schmidt on 1, z, ..., z^{N-1}."""
    tol = mu.tol
    N = mu.size
    if N < 2:
        raise ArgumentError("need at least two support points")
    zeta, w = mu.support, mu.weights

    def ip(f, g):
        return np.sum(w * f * np.conj(g))

    vals: list[np.ndarray] = []
    coefs: list[np.ndarray] = []
    norms2: list[float] = []
    alphas = []
    for n in range(N):
        v = zeta ** n
        c = np.zeros(N, dtype=complex)
        c[n] = 1.0
        for _ in range(2):
            for k in range(n):
                proj = ip(v, vals[k]) / norms2[k]
                v = v - proj * vals[k]
                c = c - proj * coefs[k]
        nrm2 = float(ip(v, v).real)
        if nrm2 <= tol.eps_structural ** 2:
            raise StructureError(f"Gram matrix numerically singular at degree {n}")
        vals.append(v)
        coefs.append(c)
        norms2.append(nrm2)
        if n >= 1:
            alphas.append(-np.conj(c[0]))
    alphas = np.asarray(alphas, dtype=complex)
    if check_norms:
        rho = np.sqrt(1.0 - np.abs(alphas) ** 2)
        expected = np.concatenate([[1.0], np.cumprod(rho)])
        got = np.sqrt(np.asarray(norms2, dtype=float))
        if np.max(np.abs(got - expected)) > tol.eps_roots:
            raise ConsistencyError("norm identity ||Phi_n|| = prod rho_j violated")
    return alphas
