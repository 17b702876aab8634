import numpy as np
import pytest

from cmvkit.errors import ArgumentError, TerminalParameterReached
from cmvkit.numkernel import Poly, match_multisets, star
from cmvkit.schurfun import (
    BlaschkeProduct,
    RationalSchur,
    SchurParams,
    blaschke_from_schur_params,
    caratheodory_from_schur,
    param_product_check,
    schur_from_caratheodory,
    schur_params_of_blaschke,
    schur_params_of_rational,
    schur_step,
    wall_pair,
)
from cmvkit._validation import circle_points
from conftest import random_disk, random_params


def test_schur_params_validation():
    with pytest.raises(ArgumentError):
        SchurParams([0.5, 1.0], 1.0)
    with pytest.raises(ArgumentError):
        SchurParams([0.5], 0.9)
    p = SchurParams([0.3j], None)
    assert not p.finite


def test_schur_step_single_factor():
    a = 0.4 - 0.3j
    g, nxt = schur_step(BlaschkeProduct(0.0, [a]).as_rational(), inner=True)
    assert abs(g + a) <= 1e-15
    assert abs(nxt(0.37 + 0.1j) - 1.0) <= 1e-14


def test_schur_step_zero_function():
    g, nxt = schur_step(RationalSchur.constant(0.0))
    assert g == 0
    assert abs(nxt(0.5)) == 0


def test_schur_step_lowers_order(rng):
    b = BlaschkeProduct(0.7, random_disk(rng, 4))
    _, nxt = schur_step(b.as_rational(), inner=True)
    assert nxt.den.degree == 3
    vals = np.abs(nxt(circle_points(64)))
    assert np.max(np.abs(vals - 1.0)) <= 1e-12


def test_schur_step_terminal():
    with pytest.raises(TerminalParameterReached) as hit:
        schur_step(RationalSchur.constant(np.exp(0.3j)))
    assert abs(hit.value.gamma - np.exp(0.3j)) < 1e-15


def test_params_of_monomial():
    p = schur_params_of_blaschke(BlaschkeProduct(1.1, np.zeros(4)))
    assert np.all(p.interior == 0)
    assert abs(p.terminal - np.exp(1.1j)) <= 1e-15


def test_params_single_zero():
    a = 0.2 + 0.5j
    p = schur_params_of_blaschke(BlaschkeProduct(0.0, [a]))
    assert abs(p.interior[0] + a) <= 1e-15
    assert abs(p.terminal - 1) <= 1e-15


@pytest.mark.parametrize("order", [1, 5, 8, 12])
def test_synthesis_round_trip(rng, order):
    b = BlaschkeProduct(rng.uniform(0, 2 * np.pi), random_disk(rng, order, 0.85))
    b2 = blaschke_from_schur_params(schur_params_of_blaschke(b))
    assert match_multisets(b.zeros, b2.zeros) <= 1e-8
    assert abs(np.exp(1j * b.phase) - np.exp(1j * b2.phase)) <= 1e-8


def test_synthesis_examples():
    assert blaschke_from_schur_params(SchurParams([], np.exp(0.4j))).order == 0
    b = blaschke_from_schur_params(SchurParams(np.zeros(3), 1.0))
    assert np.max(np.abs(b.zeros)) <= 1e-12 and abs(b.unimodular - 1) <= 1e-12
    b = blaschke_from_schur_params(SchurParams([-0.3j], 1.0))
    assert abs(b.zeros[0] - 0.3j) <= 1e-14 and abs(b.unimodular - 1) <= 1e-14


def test_rotation_scales_params(rng):
    b = BlaschkeProduct(0.2, random_disk(rng, 5))
    lam = 1.3
    p = schur_params_of_blaschke(b)
    q = schur_params_of_blaschke(b.rotated(lam))
    assert p.rotated(lam).max_gap(q) <= 1e-8


def test_wall_pair_examples(rng):
    g = 0.3 - 0.1j
    wp = wall_pair([g])
    assert np.allclose(wp.A.coeffs, [g]) and np.allclose(wp.B.coeffs, [1])
    wp = wall_pair(np.zeros(4))
    assert np.allclose(wp.A.coeffs, 0) and np.allclose(wp.B.coeffs, [1, 0, 0, 0])
    with pytest.raises(ArgumentError):
        wall_pair([1.0])


def test_wall_pair_determinant_constant(rng):
    gam = random_disk(rng, 4, 0.8)
    wp = wall_pair(gam)
    lhs = (wp.B_star * wp.B - wp.A_star * wp.A).padded(8)
    c = np.prod(1 - np.abs(gam) ** 2)
    expected = np.zeros(8, dtype=complex)
    expected[3] = c
    assert np.max(np.abs(lhs - expected)) <= 1e-12


def test_wall_pair_j_structure(rng):
    wp = wall_pair(random_disk(rng, 4, 0.8))
    j = np.diag([1.0, -1.0])
    for z in circle_points(32):
        W = wp.matrix(z)
        assert np.max(np.abs(W.conj().T @ j @ W - j * abs(W[0, 0] * W[1, 1] - W[0, 1] * W[1, 0]))) <= 1e-8
    for z in 0.7 * circle_points(32) * np.exp(0.2j):
        W = wp.matrix(z)
        d = W[0, 0] * W[1, 1] - W[0, 1] * W[1, 0]
        # normalized W / sqrt(det) is j-contractive inside the disk
        Wn = W / np.sqrt(d)
        assert np.min(np.linalg.eigvalsh(j - Wn.conj().T @ j @ Wn)) >= -1e-8


def test_wall_pair_parametrizes_tail(rng):
    p = random_params(rng, 6)
    wp = wall_pair(p.interior[:3])
    tail = blaschke_from_schur_params(p.tail(3))
    full = blaschke_from_schur_params(p)
    z = 0.3 + 0.4j
    s = tail(z)
    val = (wp.A(z) + z * wp.B_star(z) * s) / (wp.B(z) + z * wp.A_star(z) * s)
    assert abs(val - full(z)) <= 1e-12


def test_caratheodory_conversions(rng):
    assert caratheodory_from_schur(0.0, 0.4) == 1
    assert schur_from_caratheodory(1.0, 0.4) == 0
    f, z = 0.3 - 0.2j, 0.5 + 0.1j
    assert abs(schur_from_caratheodory(caratheodory_from_schur(f, z), z) - f) <= 1e-15
    with pytest.raises(ArgumentError):
        schur_from_caratheodory(1.5, 0.0)


def test_rational_params_of_constant():
    p = schur_params_of_rational(RationalSchur.constant(0.5))
    assert abs(p.interior[0] - 0.5) <= 1e-15
    assert p.terminal is None


def test_product_check_examples(rng):
    r = param_product_check(SchurParams([], None), lambda z: 0 * z)
    assert abs(r.product - 1) <= 1e-15 and abs(r.integral - 1) <= 1e-15
    c = 0.6j
    p = schur_params_of_rational(RationalSchur.constant(c))
    r = param_product_check(p, lambda z: c + 0 * z)
    assert abs(r.product - (1 - abs(c) ** 2)) <= 1e-12 and abs(r.integral - (1 - abs(c) ** 2)) <= 1e-12
    b = BlaschkeProduct(0.0, [0.2])
    r = param_product_check(schur_params_of_blaschke(b), b)
    assert r.inner


def test_blaschke_requires_disk():
    with pytest.raises(ArgumentError):
        BlaschkeProduct(0.0, [1.0])
    b = BlaschkeProduct(0.5, [0.1, 0.1 + 1e-12, 0.3j])
    assert sorted(m for _, m in b.zero_multiset()) == [1, 2]
    assert np.allclose(np.abs(b(circle_points(16))), 1.0)
