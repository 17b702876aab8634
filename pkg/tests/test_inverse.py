import numpy as np
import pytest

from cmvkit.cmv import truncated_cmv
from cmvkit.errors import ArgumentError, CapabilityError, NoSolution
from cmvkit.inverse import (
    ConditioningWarning,
    FamilyDescriptor,
    MixedFirstData,
    MixedLastData,
    as_multiset,
    blaschke_condition,
    mixed_first,
    mixed_last,
    reconstruct_from_spectrum,
)
from cmvkit.numkernel import match_multisets
from cmvkit.schurfun import SchurParams
from cmvkit.spectra import spectrum
from conftest import random_disk, random_params


def test_as_multiset():
    assert sorted(as_multiset([0.5, 0.5, 0.1j]), key=lambda p: p[1]) == [(0.1j, 1), (0.5, 2)]
    assert as_multiset([(0.2, 3)]) == [(0.2, 3)]
    with pytest.raises(ArgumentError):
        as_multiset([(0.2, 0)])


def test_reconstruct_zero_spectrum():
    t = reconstruct_from_spectrum([0, 0, 0], phase=0.4)
    assert np.allclose(t.params.interior, 0) and abs(t.params.terminal - np.exp(0.4j)) < 1e-15
    t = reconstruct_from_spectrum([0.0])
    assert t.dense.shape == (1, 1) and t.dense[0, 0] == 0


def test_reconstruct_single():
    a = 0.3 + 0.5j
    t = reconstruct_from_spectrum([a])
    assert abs(t.dense[0, 0] - a) <= 1e-15
    assert abs(t.params.interior[0] + a) <= 1e-15


def test_reconstruct_random(rng):
    for n in (2, 5, 10):
        zs = random_disk(rng, n, 0.85)
        for phase in (0.0, 1.0):
            t = reconstruct_from_spectrum(zs, phase)
            assert match_multisets(spectrum(t).eigenvalues, zs) <= 1e-7
            assert t.info["verification"]["charpoly_gap"] <= 1e-10


def test_reconstruct_repeated(rng):
    zs = [0.4j, 0.4j, -0.3]
    t = reconstruct_from_spectrum(zs)
    assert t.info["verification"]["charpoly_gap"] <= 1e-10


def test_reconstruct_near_boundary_warns():
    with pytest.warns(ConditioningWarning):
        reconstruct_from_spectrum([0.9999, 0.2])


def _oracle(rng, n, r):
    p = random_params(rng, n, 0.8)
    ev = spectrum(truncated_cmv(p)).eigenvalues
    return p, ev[:r]


@pytest.mark.parametrize("n,r", [(1, 1), (3, 1), (4, 2), (6, 3), (8, 8)])
def test_mixed_first_recovers(rng, n, r):
    p, ev = _oracle(rng, n, r)
    t = mixed_first(MixedFirstData(list(ev), p.interior[: n - r + 1], n))
    assert p.max_gap(t.params) <= 1e-6


def test_mixed_first_pick_and_kernel_agree(rng):
    p, ev = _oracle(rng, 6, 3)
    d = MixedFirstData(list(ev), p.interior[:4], 6)
    a = mixed_first(d, method="pick")
    b = mixed_first(d, method="kernel")
    assert a.params.max_gap(b.params) <= 1e-8


def test_mixed_first_double_node():
    z = 0.25 + 0.1j
    base = reconstruct_from_spectrum([z, z, -0.3, 0.5j]).params
    d = MixedFirstData([(z, 2)], base.interior[:3], 4)
    t = mixed_first(d)
    assert base.max_gap(t.params) <= 1e-6
    assert t.info["verification"]["method"] == "kernel"
    with pytest.raises(ArgumentError):
        mixed_first(d, method="pick")


def test_mixed_first_capability_limit():
    d = MixedFirstData([(0.3, 4)], [0.1], 4)
    with pytest.raises(CapabilityError):
        mixed_first(d)


def test_mixed_first_full_spectrum(rng):
    # r = N: only alpha_0 is given, and it must match the product of eigenvalues
    p, ev = _oracle(rng, 4, 4)
    t = mixed_first(MixedFirstData(list(ev), p.interior[:1], 4))
    assert p.max_gap(t.params) <= 1e-6
    with pytest.raises(NoSolution):
        mixed_first(MixedFirstData(list(ev), [0.0 + 0.05j], 4))


def test_mixed_first_no_solution():
    # eigenvalue outside the spectrum reachable from these parameters
    with pytest.raises(NoSolution) as exc:
        mixed_first(MixedFirstData([0.9, -0.9], [0.0, 0.0, 0.0], 4))
    assert exc.value.report


def test_zero_reduction_nonzero_leading():
    with pytest.raises(NoSolution):
        mixed_first(MixedFirstData([0.0, 0.5], [0.3, 0.1], 3))


def test_zero_reduction_unique(rng):
    p = SchurParams([0.0, 0.4, -0.2j, 0.1], np.exp(0.3j))
    ev = spectrum(truncated_cmv(p)).eigenvalues
    nz = [v for v in ev if abs(v) > 1e-8]
    t = mixed_first(MixedFirstData([0.0] + nz[:2], [0.0, 0.4, -0.2j], 4))
    assert p.max_gap(t.params) <= 1e-6


def test_zero_reduction_all_zero_family():
    fam = mixed_first(MixedFirstData([0, 0, 0], [0.0], 3))
    assert isinstance(fam, FamilyDescriptor)
    assert fam.free_terminal and fam.free_interior == ()
    t = fam.member(gamma=np.exp(0.2j))
    assert np.max(np.abs(spectrum(t).eigenvalues)) <= 1e-5


def test_zero_reduction_family_member():
    fam = mixed_first(MixedFirstData([0.0], [0.0, 0.5, 0.2j], 3))
    assert isinstance(fam, FamilyDescriptor)
    assert fam.free_interior == () and fam.free_terminal
    t = fam.member(gamma=-1)
    ev = spectrum(t).eigenvalues
    assert np.sum(np.abs(ev) < 1e-8) == 1
    with pytest.raises(NoSolution):
        mixed_first(MixedFirstData([0.0], [0.0, 0.0, 0.2j], 3))


def test_zero_reduction_family_with_nonzero():
    p = SchurParams([0.0, 0.4, 0.1j, 0.2 - 0.1j], np.exp(0.5j))
    ev = spectrum(truncated_cmv(p)).eigenvalues
    z = ev[np.argmax(np.abs(ev))]
    fam = mixed_first(MixedFirstData([0.0, z], [0.0, 0.4, 0.1j], 4))
    assert isinstance(fam, FamilyDescriptor) and not fam.free_terminal
    assert fam.free_interior == (3,)
    t = fam.member([0.2 - 0.1j])
    assert p.max_gap(t.params) <= 1e-6


def test_mixed_last_no_eigenvalues():
    t = mixed_last(MixedLastData([], [0.1, 0.2j], -1.0, 2))
    assert np.allclose(t.params.interior, [0.1, 0.2j]) and t.params.terminal == -1


def test_mixed_last_one(rng):
    for _ in range(10):
        n = int(rng.integers(1, 7))
        tail = random_disk(rng, n - 1, 0.8)
        z = random_disk(rng, 1, 0.8)
        t = mixed_last(MixedLastData(z, tail, np.exp(0.7j), n))
        assert np.min(np.abs(spectrum(t).eigenvalues - z[0])) <= 1e-7
        assert np.allclose(t.params.interior[1:], tail, atol=1e-10)


def test_mixed_last_validation():
    with pytest.raises(ArgumentError):
        MixedLastData([0.1], [0.2], 1.0, 3)
    with pytest.raises(ArgumentError):
        MixedLastData([0.1], [0.2], 0.5, 2)


def test_blaschke_condition():
    rep = blaschke_condition([0.5, 0.75, 0.875])
    assert rep.partial_sum == pytest.approx(0.875) and rep.monotone
    assert blaschke_condition([]).partial_sum == 0
    assert "finite" in rep.note


def test_mixed_last_scalar():
    a = 0.3 - 0.4j
    t = mixed_last(MixedLastData([a], [], 1.0, 1))
    assert abs(t.dense[0, 0] - a) <= 1e-15
    assert abs(t.params.interior[0] + a) <= 1e-15 and t.params.terminal == 1


def test_zero_eigenvalue_obstruction():
    with pytest.raises(NoSolution):
        mixed_first(MixedFirstData([0.0], [0.3, 0.1, 0.2], 3))


def test_blaschke_condition_examples():
    assert blaschke_condition([0, 0, 0]).partial_sum == 3
    zs = [1 - 2.0**-n for n in range(1, 11)]
    assert blaschke_condition(zs).partial_sum == pytest.approx(1 - 2.0**-10)
    with pytest.raises(ArgumentError):
        blaschke_condition([1.0])
