import numpy as np
import pytest

from chaosprobe.ensembles import goe_matrix
from chaosprobe.linalg import as_hermitian, eigvalsh, embed
from chaosprobe.multipartite import (
    Interaction, Local, MissingTermError, MultipartiteSpec, Total, build_observable, build_total,
    interaction_part, sample_goe_multipartite,
)


def _spec(rng, dims, couplings, shared=False):
    return sample_goe_multipartite(dims, couplings, rng, shared=shared)


def test_single_subsystem_is_its_local_term(rng):
    h = goe_matrix(5, 1.0, rng)
    spec = MultipartiteSpec((5,), ((h,),))
    assert np.array_equal(build_total(spec), h)


def test_uncoupled_spectrum_is_pairwise_sums(rng):
    spec = _spec(rng, (4, 4), (0.0,))
    e1, e2 = eigvalsh(spec.term(0, 0)), eigvalsh(spec.term(1, 0))
    brute = np.sort([a + b for a in e1 for b in e2])
    assert np.allclose(eigvalsh(build_total(spec)), brute, atol=1e-10)


def test_bipartite_matches_explicit_formula(rng):
    spec = _spec(rng, (3, 4), (2.5,))
    h10, h11 = spec.term(0, 0), spec.term(0, 1)
    h20, h21 = spec.term(1, 0), spec.term(1, 1)
    expected = np.kron(h10, np.eye(4)) + np.kron(np.eye(3), h20) + 2.5 * np.kron(h11, h21)
    assert np.allclose(build_total(spec), expected, atol=1e-12)


def test_fig2_observables(rng):
    spec = _spec(rng, (10, 10), (5.0,))
    assert np.array_equal(build_observable(spec, Local(0)), np.kron(spec.term(0, 0), np.eye(10)))
    x = build_observable(spec, Interaction((0, 1)))
    assert np.array_equal(x, np.kron(spec.term(0, 1), spec.term(1, 1)))
    assert np.allclose(build_observable(spec, Interaction((1, 0), scaled=True)), 5.0 * x)
    assert np.array_equal(build_observable(spec, Total()), build_total(spec))


def test_local_spectrum_multiplicity(rng):
    spec = _spec(rng, (2, 3, 2), (1.0, 1.0))
    x = build_observable(spec, Local(1))
    assert np.allclose(eigvalsh(x), np.sort(np.repeat(eigvalsh(spec.term(1, 0)), 4)), atol=1e-12)


def test_tripartite_all_orders(rng):
    spec = _spec(rng, (2, 3, 2), (0.7, -1.3))
    t = {(j, k): spec.term(j, k) for j in range(3) for k in range(3)}
    dims = (2, 3, 2)
    expected = sum(embed({j: t[j, 0]}, dims) for j in range(3))
    expected = expected + 0.7 * sum(embed({j: t[j, 1], k: t[k, 1]}, dims) for j, k in [(0, 1), (0, 2), (1, 2)])
    expected = expected - 1.3 * np.kron(np.kron(t[0, 2], t[1, 2]), t[2, 2])
    h = build_total(spec)
    assert np.allclose(h, expected, atol=1e-12)
    as_hermitian(h)


def test_linearity_in_couplings(rng):
    spec = _spec(rng, (2, 2, 3), (0.4, 2.0))
    base = build_total(spec.with_couplings((0.0, 0.0)))
    diff = build_total(spec) - base
    expected = 0.4 * interaction_part(spec, 2) + 2.0 * interaction_part(spec, 3)
    assert np.abs(diff - expected).max() <= 1e-12


def test_shared_matrices_reused(rng):
    spec = _spec(rng, (3, 3, 3), (1.0, 1.0), shared=True)
    for j in range(3):
        assert spec.term(j, 0) is spec.term(j, 1) is spec.term(j, 2)


def test_missing_term_named(rng):
    h = goe_matrix(2, 1.0, rng)
    spec = MultipartiteSpec((2, 2), ((h, None), (h, h)), (1.0,))
    with pytest.raises(MissingTermError, match="subsystem 0 at order index 1"):
        build_total(spec)


@pytest.mark.parametrize("kwargs", [
    dict(dims=(2, 2), terms=((np.eye(3),), (np.eye(2),))),
    dict(dims=(2, 2), terms=((np.eye(2),), (np.eye(2),)), couplings=(np.inf,)),
    dict(dims=(2, 2), terms=((np.eye(2),), (np.eye(2),)), couplings=(1.0,), orders={3}),
])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        MultipartiteSpec(**kwargs)


def test_interaction_selector_validation():
    with pytest.raises(ValueError):
        Interaction((1,))
    with pytest.raises(ValueError):
        Interaction((1, 1))
