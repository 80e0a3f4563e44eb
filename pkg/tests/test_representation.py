import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sicrep.hermitian import (
    DimensionError,
    haar_random_pure,
    make_rng,
    onb_containing,
    random_ginibre_density,
    random_povm,
    trace_inner,
)
from sicrep.representation import (
    ConditionalMatrix,
    ProbabilityError,
    UrungleichungViolation,
    affine_replacement,
    as_prob_vector,
    basis_state_norm2,
    basis_states,
    conditional_matrix,
    is_valid_quantum_prob,
    min_eigenvalue,
    probs_to_state,
    purity_residuals,
    state_to_probs,
    total_probability,
    triple_products,
    urgleichung,
    urgleichung_raw,
    urungleichung_check,
)
from sicrep.whsic import known_fiducial, sic_from_fiducial

from .conftest import get_sic


def sky_constants(d):
    return d + 1.0, 1.0 / d


# -- probability vectors ------------------------------------------------------


def test_prob_vector_clamps_float_noise():
    v = as_prob_vector([0.5, 0.5 + 5e-15, -5e-15])
    assert v[2] == 0.0 and abs(v.sum() - 1) < 1e-15


def test_prob_vector_rejects_real_negativity():
    with pytest.raises(ProbabilityError):
        as_prob_vector([1.1, -0.1])
    with pytest.raises(ProbabilityError):
        as_prob_vector([0.5, 0.4])


def test_conditional_matrix_must_be_stochastic():
    ConditionalMatrix([[0.2, 1.0], [0.8, 0.0]])
    with pytest.raises(ProbabilityError):
        ConditionalMatrix([[0.2, 0.5], [0.7, 0.5]])


# -- Born rule and its inverse ------------------------------------------------


def test_maximally_mixed_is_uniform(sic):
    d = sic.dim
    p = state_to_probs(np.eye(d) / d, sic)
    assert np.allclose(p, 1 / d**2, atol=1e-15)


def test_sic_element_gives_basis_state(sic):
    d = sic.dim
    for k in range(d * d):
        p = state_to_probs(sic.projectors[k], sic)
        expected = (np.eye(d * d)[k] + 1 / d) / (d + 1)
        assert np.allclose(p, expected, atol=1e-14)


def test_sic_element_d2(sic2):
    p = state_to_probs(sic2.projectors[0], sic2)
    assert np.allclose(p, [1 / 2, 1 / 6, 1 / 6, 1 / 6], atol=1e-15)


def test_probs_bounded_by_inverse_dim(sic):
    d = sic.dim
    for seed in range(20):
        p = state_to_probs(random_ginibre_density(d, seed), sic)
        assert np.all(p >= 0) and np.all(p <= 1 / d + 1e-15)
        assert abs(p.sum() - 1) < 1e-12


def test_state_to_probs_errors(sic2):
    with pytest.raises(DimensionError):
        state_to_probs(np.eye(3) / 3, sic2)
    bad = sic_from_fiducial(np.array([1, 0]))
    with pytest.raises(ValueError, match="not verified"):
        state_to_probs(np.eye(2) / 2, bad)


def test_uniform_reconstructs_maximally_mixed(sic):
    d = sic.dim
    rho = probs_to_state(np.full(d * d, 1 / d**2), sic)
    assert np.max(np.abs(rho - np.eye(d) / d)) < 1e-12


def test_round_trip(sic):
    d = sic.dim
    for seed in range(100):
        rho = random_ginibre_density(d, seed)
        back = probs_to_state(state_to_probs(rho, sic), sic)
        assert np.linalg.norm(back - rho) < 1e-12


def test_probs_to_state_hermitian_trace_one(sic):
    d = sic.dim
    rng = make_rng(d)
    for _ in range(10):
        p = rng.dirichlet(np.ones(d * d))
        rho = probs_to_state(p, sic)
        assert np.max(np.abs(rho - rho.conj().T)) == 0
        assert abs(np.trace(rho) - 1) < 1e-12


def test_vertex_is_not_a_state(sic2):
    vertex = np.array([1.0, 0, 0, 0])
    rho = probs_to_state(vertex, sic2)
    assert np.max(np.abs(rho - (3 * sic2.projectors[0] - np.eye(2)))) < 1e-14
    assert min_eigenvalue(vertex, sic2) == pytest.approx(-1, abs=1e-13)
    assert not is_valid_quantum_prob(vertex, sic2, 1e-10)


def test_probs_to_state_length(sic2):
    with pytest.raises(DimensionError):
        probs_to_state(np.full(3, 1 / 3), sic2)


def test_validity(sic):
    d = sic.dim
    assert is_valid_quantum_prob(np.full(d * d, 1 / d**2), sic)
    for seed in range(10):
        assert is_valid_quantum_prob(state_to_probs(random_ginibre_density(d, seed), sic), sic)


# -- conditional matrices -----------------------------------------------------


def test_trivial_ground(sic):
    r = conditional_matrix([np.eye(sic.dim)], sic)
    assert r.entries.shape == (1, sic.dim**2)
    assert np.allclose(r.entries, 1.0, atol=1e-14)


def test_sic_as_ground(sic):
    d = sic.dim
    r = conditional_matrix(list(sic.effects), sic)
    expected = (d * np.eye(d * d) + 1) / (d * (d + 1))
    assert np.max(np.abs(r.entries - expected)) < 1e-14


def test_row_sums(sic):
    d = sic.dim
    ground = random_povm(d, 3, 17)
    r = conditional_matrix(ground, sic)
    for j, f in enumerate(ground):
        assert abs(r.entries[j].sum() - d * np.trace(f).real) < 1e-12


def test_conditional_rejects_non_povm(sic2):
    with pytest.raises(ValueError):
        conditional_matrix([np.eye(2), np.eye(2)], sic2)


# -- Urgleichung ----------------------------------------------------------------


def test_classical_constants_give_total_probability(sic2):
    rho = random_ginibre_density(2, 3)
    ground = random_povm(2, 3, 4)
    p = state_to_probs(rho, sic2)
    r = conditional_matrix(ground, sic2)
    assert np.array_equal(urgleichung(p, r, 1.0, 0.0), total_probability(p, r))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_urgleichung_is_born_rule(d):
    sic = get_sic(d)
    alpha, beta = sky_constants(d)
    for seed in range(50):
        rho = random_ginibre_density(d, seed)
        basis = onb_containing(haar_random_pure(d, 1000 + seed))
        ground = [np.outer(b, b.conj()) for b in basis]
        q = urgleichung(state_to_probs(rho, sic), conditional_matrix(ground, sic), alpha, beta)
        born = np.array([trace_inner(rho, f).real for f in ground])
        assert np.max(np.abs(q - born)) < 1e-12


def test_uniform_prior_isu_ground(sic):
    d = sic.dim
    basis = onb_containing(haar_random_pure(d, 8))
    r = conditional_matrix([np.outer(b, b.conj()) for b in basis], sic)
    q = urgleichung(np.full(d * d, 1 / d**2), r, *sky_constants(d))
    assert np.allclose(q, 1 / d, atol=1e-14)


def test_urgleichung_normalization_guard(sic2):
    r = conditional_matrix([np.eye(2)], sic2)
    with pytest.raises(ValueError, match="n beta"):
        urgleichung(np.full(4, 0.25), r, 3.0, 0.4)


def test_urgleichung_rejects_non_quantum_pair(sic2):
    basis = onb_containing(sic2.vectors[0])
    r = conditional_matrix([np.outer(b, b.conj()) for b in basis], sic2)
    with pytest.raises(UrungleichungViolation) as info:
        urgleichung(np.array([1.0, 0, 0, 0]), r, 3.0, 0.5)
    assert np.allclose(info.value.q, [2, -1], atol=1e-13)


def test_affine_replacement_path(sic):
    d = sic.dim
    alpha, beta = sky_constants(d)
    r = conditional_matrix(random_povm(d, 4, 5), sic)
    p = state_to_probs(random_ginibre_density(d, 6), sic)
    direct = urgleichung_raw(p, r, alpha, beta)
    via_total = total_probability(affine_replacement(p, alpha, beta), r, check=False)
    assert np.max(np.abs(direct - via_total)) <= 1e-14
    assert abs(direct.sum() - 1) < 1e-12


def test_total_probability_permutation():
    p = np.array([0.1, 0.2, 0.3, 0.4])
    perm = np.eye(4)[[2, 0, 3, 1]]
    assert np.array_equal(total_probability(p, perm), perm @ p)


def test_total_probability_sic_ground_uniform(sic):
    d = sic.dim
    r = conditional_matrix(list(sic.effects), sic)
    s = total_probability(np.full(d * d, 1 / d**2), r)
    assert np.allclose(s, 1 / d**2, atol=1e-15)


def test_total_probability_shape_mismatch():
    with pytest.raises(DimensionError):
        total_probability([0.5, 0.5], np.eye(3))


# documented instance: d=2 exact SIC, Ginibre state seed 11, 3-outcome POVM seed 12
GAP_STATE_SEED, GAP_POVM_SEED = 11, 12


def test_factualized_counterfactual_gap(sic2):
    p = state_to_probs(random_ginibre_density(2, GAP_STATE_SEED), sic2)
    r = conditional_matrix(random_povm(2, 3, GAP_POVM_SEED), sic2)
    q = urgleichung(p, r, 3.0, 0.5)
    s = total_probability(p, r)
    assert np.max(np.abs(s - q)) > 1e-3


# -- Urungleichung -------------------------------------------------------------


@pytest.mark.parametrize("d", [2, 3, 4])
def test_quantum_pairs_satisfy_urungleichung(d):
    sic = get_sic(d)
    alpha, beta = sky_constants(d)
    rng = make_rng(100 + d)
    for _ in range(300):
        p = state_to_probs(random_ginibre_density(d, int(rng.integers(2**62))), sic)
        m = int(rng.integers(2, d * d + 1))
        r = conditional_matrix(random_povm(d, m, int(rng.integers(2**62))), sic)
        assert urungleichung_check(p, r, alpha, beta)


def test_vertex_with_sic_ground_stays_in_range(sic2):
    # the SIC itself as ground maps the vertex to a deterministic distribution
    r = conditional_matrix(list(sic2.effects), sic2)
    q = urgleichung_raw(np.array([1.0, 0, 0, 0]), r, 3.0, 0.5)
    assert np.allclose(q, [1, 0, 0, 0], atol=1e-14)


def test_vertex_with_aligned_basis_violates(sic2):
    basis = onb_containing(sic2.vectors[0])
    r = conditional_matrix([np.outer(b, b.conj()) for b in basis], sic2)
    assert not urungleichung_check(np.array([1.0, 0, 0, 0]), r, 3.0, 0.5)


@settings(max_examples=100, deadline=None)
@given(
    n=st.integers(1, 6),
    m=st.integers(1, 5),
    seed=st.integers(0, 2**32 - 1),
)
def test_classical_urungleichung_always_holds(n, m, seed):
    rng = make_rng(seed)
    p = rng.dirichlet(np.ones(n))
    r = rng.dirichlet(np.ones(m), size=n).T
    assert urungleichung_check(p, r, 1.0, 0.0)


# -- triple products and purity -------------------------------------------------


def test_triple_product_structure(sic):
    d = sic.dim
    c = triple_products(sic).tensor
    n = d * d
    idx = np.arange(n)
    assert np.allclose(c[idx, idx, idx], 1.0, atol=1e-12)
    for i in range(n):
        for j in range(n):
            if i != j:
                assert abs(c[i, i, j] - 1 / (d + 1)) < 1e-12
    for perm in [(0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]:
        assert np.max(np.abs(c - c.transpose(perm))) < 1e-12


def test_triple_products_size_cap():
    sic = get_sic(7)
    with pytest.raises(ValueError, match="allow_large"):
        triple_products(sic)


def test_triple_products_reject_unverified():
    with pytest.raises(ValueError):
        triple_products(sic_from_fiducial(np.array([1, 0])))


def test_pure_state_residuals_d3():
    sic = get_sic(3)
    c = triple_products(sic)
    assert 2 / (3 * 4) == pytest.approx(1 / 6)
    assert (3 + 7) / 4**3 == pytest.approx(5 / 32)
    for seed in range(20):
        psi = haar_random_pure(3, seed)
        res2, res3 = purity_residuals(state_to_probs(np.outer(psi, psi.conj()), sic), c, 3)
        assert abs(res2) < 1e-10 and abs(res3) < 1e-10


def test_maximally_mixed_residual_d2(sic2):
    res2, _ = purity_residuals(np.full(4, 0.25), triple_products(sic2), 2)
    assert res2 == pytest.approx(-1 / 12, abs=1e-15)


def test_basis_state_is_pure(sic2):
    e = basis_states(4, 3.0, 0.5)[0]
    res2, res3 = purity_residuals(e, triple_products(sic2), 2)
    assert abs(res2) < 1e-15 and abs(res3) < 1e-14


def test_mixed_states_below_pure_purity(sic):
    d = sic.dim
    c = triple_products(sic)
    for seed in range(30):
        rho = random_ginibre_density(d, seed)
        purity = np.trace(rho @ rho).real
        res2, _ = purity_residuals(state_to_probs(rho, sic), c, d)
        # sum p^2 = (tr rho^2 + 1) / (d (d+1))
        assert res2 == pytest.approx((purity - 1) / (d * (d + 1)), abs=1e-14)
        if purity < 1 - 1e-3:
            assert res2 < 0


def test_purity_residuals_shape(sic2):
    with pytest.raises(DimensionError):
        purity_residuals(np.full(9, 1 / 9), triple_products(sic2), 2)


# -- basis states --------------------------------------------------------------


def test_basis_states_d2():
    es = basis_states(4, 3.0, 0.5)
    assert np.allclose(es[0], [1 / 2, 1 / 6, 1 / 6, 1 / 6], atol=1e-16)
    assert basis_state_norm2(4, 3.0, 0.5) == pytest.approx(1 / 3, abs=1e-16)
    assert np.dot(es[2], es[2]) == pytest.approx(1 / 3, abs=1e-15)


def test_basis_states_match_born_route(sic):
    d = sic.dim
    es = basis_states(d * d, *sky_constants(d))
    for k, e in enumerate(es):
        assert np.max(np.abs(e - state_to_probs(sic.projectors[k], sic))) < 1e-12
        assert abs(e @ e - basis_state_norm2(d * d, *sky_constants(d))) < 1e-12


def test_basis_states_constraint():
    with pytest.raises(ValueError):
        basis_states(4, 3.0, 0.4)


def test_known_fiducial_sic_matches_searched_sic_on_uniform():
    sic = sic_from_fiducial(known_fiducial(2))
    other = get_sic(2, seed=99)
    u = np.full(4, 0.25)
    assert np.allclose(probs_to_state(u, sic), probs_to_state(u, other), atol=1e-14)
