import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaosprobe.ensembles import GoeSpec, sample_goe
from chaosprobe.linalg import (
    DimensionError, NotHermitianError, eigh, eigvalsh, embed, embed_local, kron,
)
from conftest import random_hermitian

SZ = np.diag([1.0, -1.0])


def test_diagonal_and_pauli_spectra():
    assert np.allclose(eigh(np.diag([3.0, 1.0, 2.0])).eigenvalues, [1, 2, 3])
    assert np.allclose(eigh([[0, 1], [1, 0]]).eigenvalues, [-1, 1])


def test_trace_identity_goe64():
    a = sample_goe(GoeSpec(64, seed=3))
    assert abs(eigh(a).eigenvalues.sum() - np.trace(a)) <= 1e-9


@pytest.mark.parametrize("real", [True, False])
def test_spectral_decomposition_invariants(rng, real):
    a = random_hermitian(rng, 40, real)
    s = eigh(a)
    assert np.all(np.diff(s.eigenvalues) >= 0)
    assert np.abs(s.reconstruct() - a).max() <= 1e-9 * max(1, np.abs(a).max())
    v = s.eigenvectors
    assert np.abs(v.conj().T @ v - np.eye(40)).max() <= 1e-10
    # reconstruct -> eigh -> reconstruct is stable
    assert np.abs(eigh(s.reconstruct()).reconstruct() - s.reconstruct()).max() <= 1e-9


def test_real_path_selected_for_zero_imaginary(rng):
    a = random_hermitian(rng, 8, real=True).astype(complex)
    s = eigh(a)
    assert not np.iscomplexobj(s.eigenvectors)


def test_non_hermitian_rejected_with_location():
    a = np.zeros((3, 3))
    a[0, 2] = 1e-6
    with pytest.raises(NotHermitianError, match=r"A\[(0,2|2,0)\]"):
        eigh(a)
    with pytest.raises(DimensionError):
        eigh(np.zeros((2, 3)))


def test_blockwise_eigvalsh_matches_dense(rng):
    a = random_hermitian(rng, 6)
    b = random_hermitian(rng, 5)
    big = np.zeros((11, 11), dtype=complex)
    perm = rng.permutation(11)
    big[np.ix_(perm[:6], perm[:6])] = a
    big[np.ix_(perm[6:], perm[6:])] = b
    assert np.allclose(eigvalsh(big), np.linalg.eigvalsh(big), atol=1e-12)


def test_kron_examples(rng):
    assert np.array_equal(kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))
    a = random_hermitian(rng, 3)
    ev = eigvalsh(kron(np.eye(2), a))
    assert np.allclose(ev, np.sort(np.repeat(eigvalsh(a), 2)))
    with pytest.raises(DimensionError):
        kron(np.eye(4), np.eye(4), max_dim=8)


def test_kron_spectrum_is_pairwise_products(rng):
    for _ in range(5):
        a, b = random_hermitian(rng, 4), random_hermitian(rng, 4)
        brute = np.sort([x * y for x in eigvalsh(a) for y in eigvalsh(b)])
        assert np.allclose(eigvalsh(kron(a, b)), brute, atol=1e-10)


def test_kron_index_formula(rng):
    a, b = rng.standard_normal((2, 2)), rng.standard_normal((3, 3))
    k = kron(a, b)
    for i, j, p, q in np.ndindex(2, 2, 3, 3):
        assert k[i * 3 + p, j * 3 + q] == a[i, j] * b[p, q]


def test_embed_local_examples(rng):
    a = random_hermitian(rng, 3)
    assert np.array_equal(embed_local(a, 0, [3]), a)
    assert np.array_equal(embed_local(SZ, 1, [2, 2]), np.diag([1.0, -1, 1, -1]))
    with pytest.raises(DimensionError, match="slot 1"):
        embed_local(a, 1, [3, 2])
    with pytest.raises(DimensionError, match="slot 5"):
        embed_local(a, 5, [3, 2])


@pytest.mark.parametrize("slot", [0, 1, 2])
def test_embed_local_multiplicity(rng, slot):
    dims = [2, 3, 2]
    a = random_hermitian(rng, dims[slot])
    mult = int(np.prod(dims)) // dims[slot]
    assert np.allclose(eigvalsh(embed_local(a, slot, dims)), np.sort(np.repeat(eigvalsh(a), mult)), atol=1e-12)


def test_embed_matches_explicit_kron(rng):
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 3)
    got = embed({0: a, 2: b}, [2, 4, 3])
    assert np.allclose(got, np.kron(np.kron(a, np.eye(4)), b), atol=0)


def _unit(rng, d):
    a = random_hermitian(rng, d)
    return a / np.abs(a).max()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4))
def test_kron_algebraic_properties(seed, da, db, dc):
    rng = np.random.default_rng(seed)
    a, b, c = _unit(rng, da), _unit(rng, db), _unit(rng, dc)
    assert np.abs(kron(kron(a, b), c) - kron(a, kron(b, c))).max() <= 1e-12
    ta, tb = np.trace(a), np.trace(b)
    assert abs(np.trace(kron(a, b)) - ta * tb) <= 1e-10 * max(1.0, abs(ta * tb))
    # embeddings at disjoint slots commute
    ea = embed_local(a, 0, [da, db])
    eb = embed_local(b, 1, [da, db])
    assert np.abs(ea @ eb - eb @ ea).max() <= 1e-10
