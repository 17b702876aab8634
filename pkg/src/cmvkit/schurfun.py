"""Schur functions, the Schur algorithm, Wall pairs and Blaschke products."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_complex_vector, check_in_disk, circle_points
from .errors import (
    ArgumentError,
    ConsistencyError,
    NumericError,
    TerminalParameterReached,
)
from .numkernel import DEFAULT_TOL, Poly, Tolerances, cluster, roots, star


@dataclass(frozen=True)
class SchurParams:
    """Schur (= Verblunsky) parameters gamma_0..gamma_{N-1} plus a terminal value.

    ``terminal`` is unimodular for a finite Blaschke product.  ``None``
    marks a truncated view of a longer (or infinite) sequence, used for
    leading sections and non-inner functions.
    """

    interior: np.ndarray
    terminal: complex | None = 1.0 + 0j
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        tol = self.tol
        interior = check_in_disk(self.interior, "interior Schur parameters", margin=0.0)
        if interior.size and np.max(np.abs(interior)) > 1.0 - tol.eps_roots:
            raise ArgumentError("interior Schur parameters must satisfy |gamma| <= 1 - eps_roots")
        interior = interior.copy()
        interior.setflags(write=False)
        object.__setattr__(self, "interior", interior)
        if self.terminal is not None:
            t = complex(self.terminal)
            if abs(abs(t) - 1.0) > tol.eps_structural * 10:
                raise ArgumentError(f"terminal parameter must be unimodular, got |t| = {abs(t):.17g}")
            object.__setattr__(self, "terminal", t / abs(t))

    @property
    def n(self) -> int:
        """Number of interior parameters (the order of the Blaschke product)."""
        return int(self.interior.size)

    @property
    def rho(self) -> np.ndarray:
        return np.sqrt(1.0 - np.abs(self.interior) ** 2)

    @property
    def finite(self) -> bool:
        return self.terminal is not None

    def as_array(self) -> np.ndarray:
        """Interior followed by terminal (when present)."""
        if self.terminal is None:
            return self.interior.copy()
        return np.concatenate([self.interior, [self.terminal]])

    def rotated(self, angle: float) -> "SchurParams":
        u = np.exp(1j * angle)
        term = None if self.terminal is None else u * self.terminal
        return SchurParams(u * self.interior, term, self.tol)

    def tail(self, k: int) -> "SchurParams":
        return SchurParams(self.interior[k:], self.terminal, self.tol)

    def max_gap(self, other: "SchurParams") -> float:
        a, b = self.as_array(), other.as_array()
        if a.size != b.size:
            return float("inf")
        return float(np.max(np.abs(a - b))) if a.size else 0.0

    @classmethod
    def from_array(cls, values, tol: Tolerances = DEFAULT_TOL) -> "SchurParams":
        v = as_complex_vector(values, "Schur parameters")
        if v.size == 0:
            raise ArgumentError("need at least the terminal parameter")
        return cls(v[:-1], v[-1], tol)


@dataclass(frozen=True)
class BlaschkeProduct:
    """e^{i phase} * prod (z - z_k) / (1 - conj(z_k) z), stored by zeros."""

    phase: float
    zeros: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        zs = check_in_disk(self.zeros, "Blaschke zeros", margin=self.tol.eps_roots).copy()
        zs.setflags(write=False)
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "phase", float(np.mod(self.phase, 2 * np.pi)))

    @property
    def order(self) -> int:
        return int(self.zeros.size)

    @property
    def unimodular(self) -> complex:
        return complex(np.exp(1j * self.phase))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.unimodular, dtype=complex)
        for zk in self.zeros:
            out = out * (z - zk) / (1.0 - np.conj(zk) * z)
        return out if out.ndim else complex(out)

    def log_derivative(self, z):
        """b'(z)/b(z)."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for zk in self.zeros:
            out = out + 1.0 / (z - zk) + np.conj(zk) / (1.0 - np.conj(zk) * z)
        return out

    def monic_poly(self) -> Poly:
        return Poly.from_roots(self.zeros, self.tol)

    def as_rational(self) -> "RationalSchur":
        p = self.monic_poly()
        return RationalSchur(p, star(p, self.order) * np.exp(-1j * self.phase), self.tol)

    def rotated(self, angle: float) -> "BlaschkeProduct":
        return BlaschkeProduct(self.phase + angle, self.zeros, self.tol)

    def zero_multiset(self) -> list[tuple[complex, int]]:
        return cluster(self.zeros, self.tol.eps_roots)


@dataclass(frozen=True)
class RationalSchur:
    """Rational Schur function num/den."""

    num: Poly
    den: Poly
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        if abs(self.den(0.0)) <= self.tol.eps_structural * max(np.abs(self.den.coeffs).max(), 1e-300):
            raise ArgumentError("denominator vanishes at the origin")

    @classmethod
    def constant(cls, c, tol: Tolerances = DEFAULT_TOL) -> "RationalSchur":
        return cls(Poly([c], tol), Poly([1.0], tol), tol)

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def sup_on_circle(self, samples: int = 64) -> float:
        return float(np.max(np.abs(self(circle_points(samples)))))

    def scaled(self, c) -> "RationalSchur":
        return RationalSchur(self.num * c, self.den, self.tol)


def schur_step(f: RationalSchur, inner: bool = False) -> tuple[complex, RationalSchur]:
    """One step of the Schur algorithm: (f(0), (f - f(0)) / (z (1 - conj(f(0)) f))).

    With ``inner=True`` the input is a Blaschke product whose numerator and
    denominator have equal formal degree; the leading coefficient of the new
    denominator cancels exactly and is dropped instead of being left to
    rounding.
    """
    tol = f.tol
    num, den = f.num, f.den
    d0 = complex(den(0.0))
    gamma = complex(num(0.0)) / d0
    if abs(gamma) >= 1.0 - tol.eps_roots:
        raise TerminalParameterReached(gamma)
    length = max(num.coeffs.size, den.coeffs.size)
    a = num.padded(length)
    b = den.padded(length)
    new_num = a - gamma * b
    new_num[0] = 0.0
    new_num = new_num[1:] if length > 1 else np.zeros(1, dtype=complex)
    new_den = b - np.conj(gamma) * a
    if inner and length > 1:
        new_den = new_den[:-1]
    scale = new_den[0]
    return gamma, RationalSchur(Poly(new_num / scale, tol), Poly(new_den / scale, tol), tol)


def schur_params_of_blaschke(b: BlaschkeProduct, cross_check: bool = True) -> SchurParams:
    """Schur parameters of a finite Blaschke product via the Schur algorithm.

    The result is checked against the reversed-Verblunsky (Khrushchev) route;
    disagreement beyond ``eps_roots`` raises ``ConsistencyError``.
    """
    tol = b.tol
    f = b.as_rational()
    gammas = []
    for _ in range(b.order):
        g, f = schur_step(f, inner=True)
        gammas.append(g)
    terminal = complex(f.num.coeffs[0] / f.den.coeffs[0])
    if abs(abs(terminal) - 1.0) > tol.eps_roots:
        raise NumericError(f"terminal Schur parameter has modulus {abs(terminal):.17g}", partial=gammas)
    params = SchurParams(np.asarray(gammas, dtype=complex), terminal / abs(terminal), tol)
    if cross_check:
        from .opuc import khrushchev_params

        other = khrushchev_params(b.monic_poly()).rotated(b.phase)
        gap = params.max_gap(other)
        if gap > tol.eps_roots:
            raise ConsistencyError(f"Schur algorithm and Khrushchev route disagree by {gap:.3e}")
    return params


def schur_params_of_rational(f: RationalSchur, max_steps: int = 4096, tail_tol: float = 1e-15) -> SchurParams:
    """Leading Schur parameters of a rational Schur function.

    Stops at a unimodular value (inner function: terminal set), or once
    ``max_steps`` parameters are produced, or when a run of 32 consecutive
    parameters is below ``tail_tol`` (terminal left as ``None``).
    """
    gammas = []
    small_run = 0
    for _ in range(max_steps):
        try:
            g, f = schur_step(f)
        except TerminalParameterReached as hit:
            return SchurParams(np.asarray(gammas, dtype=complex), hit.gamma / abs(hit.gamma), f.tol)
        gammas.append(g)
        small_run = small_run + 1 if abs(g) < tail_tol else 0
        if small_run >= 32:
            break
    return SchurParams(np.asarray(gammas, dtype=complex), None, f.tol)


@dataclass(frozen=True)
class WallPair:
    """Polynomials A, B (degree <= n) with W = [[z B*, A], [z A*, B]] = Q_{g0} ... Q_{gn}.

    Normalized so that B(0) = 1; then B* B - A* A = c z^n with
    c = prod (1 - |g_j|^2).
    """

    A: Poly
    B: Poly
    n: int

    @property
    def A_star(self) -> Poly:
        return star(self.A, self.n)

    @property
    def B_star(self) -> Poly:
        return star(self.B, self.n)

    def matrix(self, z) -> np.ndarray:
        z = complex(z)
        return np.array(
            [[z * self.B_star(z), self.A(z)], [z * self.A_star(z), self.B(z)]], dtype=complex
        )

    def lft(self, s_num: Poly, s_den: Poly) -> tuple[Poly, Poly]:
        """Numerator and denominator of (A + z B* s) / (B + z A* s) for s = s_num/s_den."""
        num = self.A * s_den + (self.B_star * s_num).shift()
        den = self.B * s_den + (self.A_star * s_num).shift()
        return num, den


def wall_pair(interior, tol: Tolerances = DEFAULT_TOL) -> WallPair:
    gam = as_complex_vector(interior, "Wall pair parameters")
    if gam.size == 0:
        raise ArgumentError("Wall pair needs at least one parameter")
    if np.max(np.abs(gam)) >= 1.0:
        raise ArgumentError("Wall pair parameters must lie in the open unit disk")
    # W entries as ascending coefficient arrays; Q_w = [[z, w], [z conj(w), 1]] / rho
    w = [[np.array([1.0 + 0j]), np.array([0j])], [np.array([0j]), np.array([1.0 + 0j])]]
    for g in gam:
        rho = np.sqrt(1.0 - abs(g) ** 2)
        q = [
            [np.array([0, 1], dtype=complex) / rho, np.array([g]) / rho],
            [np.array([0, np.conj(g)]) / rho, np.array([1.0 + 0j]) / rho],
        ]
        w = [
            [
                _padd(np.convolve(w[i][0], q[0][j]), np.convolve(w[i][1], q[1][j]))
                for j in range(2)
            ]
            for i in range(2)
        ]
    b0 = w[1][1][0]
    A = Poly(w[0][1] / b0, tol)
    B = Poly(w[1][1] / b0, tol)
    n = gam.size - 1
    return WallPair(Poly(A.padded(n + 1)[: n + 1], tol), Poly(B.padded(n + 1)[: n + 1], tol), n)


def _padd(a, b):
    out = np.zeros(max(a.size, b.size), dtype=complex)
    out[: a.size] += a
    out[: b.size] += b
    return out


def blaschke_from_schur_params(p: SchurParams, samples: int = 16) -> BlaschkeProduct:
    """Synthesize the Blaschke product with Schur parameters ``p`` (Wall pair route)."""
    if not p.finite:
        raise ArgumentError("synthesis needs a unimodular terminal parameter")
    tol = p.tol
    if p.n == 0:
        return BlaschkeProduct(float(np.angle(p.terminal)), np.zeros(0), tol)
    wp = wall_pair(p.interior, tol)
    num, den = wp.lft(Poly([p.terminal], tol), Poly([1.0], tol))
    zs = roots(num, tol)
    if np.max(np.abs(zs)) >= 1.0 - tol.eps_roots:
        raise NumericError("synthesized zero escaped the unit disk", partial=zs)
    zeta = circle_points(samples)
    factor = np.ones(samples, dtype=complex)
    for zk in zs:
        factor *= (zeta - zk) / (1.0 - np.conj(zk) * zeta)
    ratio = np.mean(num(zeta) / den(zeta) / factor)
    return BlaschkeProduct(float(np.angle(ratio)), zs, tol)


def caratheodory_from_schur(f_value, z):
    zf = complex(z) * complex(f_value)
    if zf == 1.0:
        raise ArgumentError("1 - z f vanishes")
    return (1.0 + zf) / (1.0 - zf)


def schur_from_caratheodory(F_value, z):
    z = complex(z)
    if z == 0:
        raise ArgumentError("z = 0: use the limit f(0) = F'(0)/2 instead")
    F = complex(F_value)
    return (F - 1.0) / (z * (F + 1.0))


@dataclass(frozen=True)
class ProductCheck:
    product: float
    integral: float
    gap: float
    inner: bool
    samples: int


def param_product_check(p: SchurParams, f, samples: int = 2048) -> ProductCheck:
    """Compare prod (1 - |g_n|^2) with exp of the circle mean of ln(1 - |f|^2).

    ``f`` is any callable Schur function; the mean is the trapezoidal rule on
    ``samples`` equispaced circle points.
    """
    product = float(np.prod(1.0 - np.abs(p.interior) ** 2)) if p.n else 1.0
    vals = np.abs(np.asarray(f(circle_points(samples)), dtype=complex)) ** 2
    if np.all(vals >= 1.0 - p.tol.eps_structural):
        return ProductCheck(product, 0.0, abs(product), True, samples)
    integral = float(np.exp(np.mean(np.log1p(-np.minimum(vals, 1.0)))))
    gap = abs(product - integral) / max(abs(integral), np.finfo(float).tiny)
    return ProductCheck(product, integral, gap, False, samples)
