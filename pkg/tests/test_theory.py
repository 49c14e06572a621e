"""Vectorization identities, moment oracles, transfer/noise algebra, MSD formula."""

import dataclasses

import numpy as np
import pytest

from augring import (
    NetworkConfig,
    NoiseProfile,
    SignalKind,
    SignalModel,
    build_transfer,
    estimate_moments,
    noise_term,
    predict_msd,
    stability_bound,
    unvec,
    vec,
)
from augring.theory import MomentSet, moments_from_draws, moments_from_rows
from conftest import random_pd


def rand_c(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


# ---------------------------------------------------------------- vec / kron

def test_vec_column_major():
    np.testing.assert_array_equal(vec(np.array([[1, 3], [2, 4]])), [1, 2, 3, 4])


def test_unvec_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(20):
        m = rand_c(rng, 3, 5)
        np.testing.assert_array_equal(unvec(vec(m), 3, 5), m)


def test_unvec_rejects_bad_length():
    with pytest.raises(ValueError):
        unvec(np.arange(5), 2, 2)


@pytest.mark.parametrize("dim", [4, 8])
def test_kron_vec_identity(dim):
    rng = np.random.default_rng(dim)
    worst = 0.0
    for _ in range(200):
        z1, sig, z2 = rand_c(rng, dim, dim), rand_c(rng, dim, dim), rand_c(rng, dim, dim)
        lhs = vec(z1 @ sig @ z2)
        rhs = np.kron(z2.T, z1) @ vec(sig)
        worst = max(worst, np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))
    assert worst < 1e-12


# ------------------------------------------------------------------- moments

def white_moments(seed, L=1, T=1, delta=0.0, samples=2000, node=0):
    model = SignalModel(SignalKind.DOUBLY_WHITE, seed=seed)
    return estimate_moments(model, L, T, delta, samples, node=node, burn_in=0)


def test_moments_constant_signal_hand_case():
    rows = np.ones((4, 1), dtype=complex)  # L = T = 1, segment length 1
    m = moments_from_rows(rows, 1, 1, delta=0.0)
    np.testing.assert_allclose(m.ed, 0.5 * np.ones((2, 2)), atol=1e-14)
    eig = np.sort(np.linalg.eigvalsh(m.ed))
    np.testing.assert_allclose(eig, [0.0, 1.0], atol=1e-12)


def test_moments_white_diagonal_is_half():
    m = white_moments(3)
    np.testing.assert_allclose(np.diag(m.ed).real, [0.5, 0.5], atol=1e-14)
    assert np.max(np.abs(m.ed - np.diag(np.diag(m.ed)))) < 0.05


def test_moments_two_seeds_agree_within_stderr():
    # Two disjoint-seed estimates differ only by Monte Carlo error: the
    # normalized squared deviations must average ~1 with no gross outlier.
    a = estimate_moments(SignalModel(SignalKind.CIRCULAR_AR1, seed=3), 2, 2, 1e-3, 10**4)
    b = estimate_moments(SignalModel(SignalKind.CIRCULAR_AR1, seed=4), 2, 2, 1e-3, 10**4)
    stderr = np.hypot(a.ed_stderr, b.ed_stderr)
    z = np.abs(a.ed - b.ed) / stderr
    assert np.mean(z**2) < 2.0
    assert np.max(z) < 5.0


def test_moments_hermitian_psd():
    m = estimate_moments(SignalModel(SignalKind.NONCIRCULAR_ARMA, seed=5), 3, 2, 1e-3, 3000)
    for mat in (m.ed, m.noise_matrix):
        sym = (mat + np.conj(mat.T)) / 2
        rel = np.max(np.abs(mat - sym)) / np.max(np.abs(mat))
        assert rel < 1e-8
        assert np.min(np.linalg.eigvalsh(sym)) > -1e-10


def test_moments_reject_bad_args():
    model = SignalModel(SignalKind.CIRCULAR_AR1, seed=0)
    with pytest.raises(ValueError):
        estimate_moments(model, 2, 2, 1e-3, 0)
    with pytest.raises(ValueError):
        moments_from_rows(np.ones((5, 3), dtype=complex), 2, 3, 1e-3)


def test_full_kron_moment_matches_draw_loop():
    # E[D^T kron D] accumulated as a tensor equals the brute-force average.
    rng = np.random.default_rng(6)
    draws = np.array([random_pd(rng, 3, floor=0.0) for _ in range(40)])
    m = moments_from_draws(draws, draws.copy(), delta=0.0)
    brute = np.mean([np.kron(d.T, d) for d in draws], axis=0)
    np.testing.assert_allclose(m.edt_kron_ed, brute, atol=1e-12)


# ------------------------------------------------------------------ transfer

def test_transfer_zero_step_is_exact_identity():
    m = white_moments(4, L=2, T=1, delta=1e-3, samples=500)
    f = build_transfer(m, 0.0).matrix
    assert np.array_equal(f, np.eye(16))


def test_transfer_scalar_moment_closed_form():
    c = 0.37
    one = np.array([[c]], dtype=complex)
    m = MomentSet(ed=one, edt_kron_i=one.copy(), i_kron_ed=one.copy(),
                  edt_kron_ed=np.array([[c * c]], dtype=complex),
                  noise_matrix=one.copy(), ed_squared=np.array([[c * c]]),
                  ed_stderr=np.zeros((1, 1)), samples=1, delta=0.0)
    for mu in (0.1, 0.5, 2.0):
        f = build_transfer(m, mu, kron_moment="decoupled").matrix[0, 0]
        assert f == pytest.approx((1 - mu * c) ** 2, rel=1e-12)


def test_transfer_decoupled_matches_matrix_recursion():
    # F vec(S) = vec(S - mu S E[D] - mu E[D] S + mu^2 E[D] S E[D]).
    rng = np.random.default_rng(7)
    m = estimate_moments(SignalModel(SignalKind.CIRCULAR_AR1, seed=9), 2, 2, 1e-3, 500)
    mu = 0.3
    f = build_transfer(m, mu, kron_moment="decoupled").matrix
    for _ in range(20):
        sig = random_pd(rng, 4)
        direct = sig - mu * sig @ m.ed - mu * m.ed @ sig + mu**2 * m.ed @ sig @ m.ed
        rel = np.max(np.abs(f @ vec(sig) - vec(direct))) / np.max(np.abs(direct))
        assert rel < 1e-12


def test_transfer_full_matches_draw_average():
    # With the full moment, F vec(S) reproduces E[S - mu S D - mu D S + mu^2 D S D].
    rng = np.random.default_rng(8)
    draws = np.array([random_pd(rng, 2, floor=0.0) for _ in range(25)])
    m = moments_from_draws(draws, draws.copy(), delta=0.0)
    mu = 0.4
    f = build_transfer(m, mu, kron_moment="full").matrix
    sig = random_pd(rng, 2)
    direct = np.mean([sig - mu * sig @ d - mu * d @ sig + mu**2 * d @ sig @ d
                      for d in draws], axis=0)
    np.testing.assert_allclose(unvec(f @ vec(sig), 2), direct, atol=1e-12)


def test_transfer_rejects_unknown_variant():
    with pytest.raises(ValueError):
        build_transfer(white_moments(1), 0.1, kron_moment="bogus")


# ---------------------------------------------------------------- noise term

def test_noise_term_zero_variance():
    assert np.all(noise_term(white_moments(2), 0.0) == 0)


def test_noise_term_identity_weighting_is_trace():
    m = white_moments(3, L=2, T=2, delta=1e-3, samples=400)
    row = noise_term(m, 0.01)
    value = row @ vec(np.eye(4))
    assert abs(value.imag) < 1e-12
    assert value.real == pytest.approx(0.01 * np.trace(m.noise_matrix).real, rel=1e-10)
    assert value.real >= 0


def test_noise_term_single_draw_brute_force():
    # s(vec(S)) must equal sigma_v^2 Tr(B U^H S U B) for a single-draw moment set.
    rng = np.random.default_rng(9)
    L, T, delta = 3, 2, 1e-3
    X = rand_c(rng, L, T)
    U = np.concatenate([np.conj(X), X], axis=0)
    B = np.linalg.inv(np.conj(U.T) @ U + delta * np.eye(T))
    D = U @ B @ np.conj(U.T)
    UB2 = U @ B @ B @ np.conj(U.T)
    m = moments_from_draws(D[None], UB2[None], delta=delta)
    sigma_v = 0.02
    row = noise_term(m, sigma_v)
    for _ in range(10):
        sig = random_pd(rng, 2 * L)
        brute = sigma_v * np.trace(B @ np.conj(U.T) @ sig @ U @ B)
        got = row @ vec(sig)
        assert abs(got - brute) / abs(brute) < 1e-10


def test_noise_term_literal_variant_uses_d_squared():
    m = white_moments(5, L=2, T=1, delta=1e-3, samples=300)
    row = noise_term(m, 0.5, variant="d_squared")
    np.testing.assert_allclose(row, 0.5 * vec(m.ed_squared), atol=1e-14)
    with pytest.raises(ValueError):
        noise_term(m, 0.5, variant="nope")


# ------------------------------------------------------------- msd prediction

def synthetic_net(n_nodes, variances, mus, L=1, delta=1e-3, ring_order=None):
    return NetworkConfig(
        n_nodes=n_nodes, filter_length=L, projection_order=1,
        models=tuple(SignalModel(SignalKind.DOUBLY_WHITE, seed=k) for k in range(n_nodes)),
        noise=NoiseProfile(np.asarray(variances, float), seed=0),
        true_h=np.ones(L), true_g=np.ones(L),
        step_sizes=np.asarray(mus, float), regularization=delta,
        ring_order=ring_order,
    )


def node_moment_list(n_nodes, L=1, T=1, delta=1e-3, samples=1500):
    return [white_moments(100 + k, L=L, T=T, delta=delta, samples=samples, node=k)
            for k in range(n_nodes)]


def test_predict_single_node_closed_form():
    m = node_moment_list(1)[0]
    net = synthetic_net(1, [0.05], [0.3])
    pred = predict_msd(net, [m])
    f = build_transfer(m, 0.3).matrix
    s_row = 0.3**2 * noise_term(m, 0.05)
    expected = (s_row @ np.linalg.solve(np.eye(4) - f, vec(np.eye(2)))).real
    assert pred.stable
    assert pred.per_node[0] == pytest.approx(expected, rel=1e-10)


def test_predict_zero_noise_zero_msd():
    moments = node_moment_list(3)
    net = synthetic_net(3, [0.0, 0.0, 0.0], [0.2, 0.2, 0.2])
    pred = predict_msd(net, moments)
    assert pred.stable
    np.testing.assert_allclose(pred.per_node, 0.0, atol=1e-18)


def test_predict_linear_in_noise_power():
    moments = node_moment_list(4)
    variances = [0.01, 0.02, 0.005, 0.03]
    net1 = synthetic_net(4, variances, [0.25] * 4)
    net2 = synthetic_net(4, [2 * v for v in variances], [0.25] * 4)
    p1, p2 = predict_msd(net1, moments), predict_msd(net2, moments)
    np.testing.assert_allclose(p2.per_node, 2 * p1.per_node, rtol=1e-10)


def test_predict_invariant_under_cyclic_relabeling():
    moments = node_moment_list(4)
    variances = [0.01, 0.02, 0.005, 0.03]
    mus = [0.2, 0.25, 0.15, 0.3]
    base = predict_msd(synthetic_net(4, variances, mus), moments)
    shift = 1
    rolled_moments = [dataclasses.replace(moments[(k - shift) % 4], node=k) for k in range(4)]
    rolled = predict_msd(
        synthetic_net(4, np.roll(variances, shift), np.roll(mus, shift)), rolled_moments)
    np.testing.assert_allclose(rolled.per_node, np.roll(base.per_node, shift), rtol=1e-10)


def test_predict_ring_rotation_same_cycle():
    # Rotating the visit order without relabeling nodes leaves the cycle, and
    # hence every node's MSD, unchanged.
    moments = node_moment_list(3)
    net_a = synthetic_net(3, [0.01, 0.02, 0.03], [0.2, 0.3, 0.25])
    net_b = synthetic_net(3, [0.01, 0.02, 0.03], [0.2, 0.3, 0.25], ring_order=(1, 2, 0))
    pa, pb = predict_msd(net_a, moments), predict_msd(net_b, moments)
    np.testing.assert_allclose(pb.per_node, pa.per_node, rtol=1e-10)


def test_predict_reports_unstable_radius():
    moments = node_moment_list(2)
    net = synthetic_net(2, [0.01, 0.01], [50.0, 50.0])
    pred = predict_msd(net, moments)
    assert not pred.stable
    assert pred.per_node is None
    assert np.max(pred.spectral_radii) >= 1.0


def test_predict_requires_one_moment_per_node():
    with pytest.raises(ValueError):
        predict_msd(synthetic_net(2, [0.01, 0.01], [0.1, 0.1]), node_moment_list(1))


# ------------------------------------------------------------ stability bound

def test_stability_scalar_closed_form():
    c = 0.8
    one = np.array([[c]], dtype=complex)
    m = MomentSet(ed=one, edt_kron_i=one.copy(), i_kron_ed=one.copy(),
                  edt_kron_ed=np.array([[c * c]], dtype=complex),
                  noise_matrix=one.copy(), ed_squared=np.array([[c * c]]),
                  ed_stderr=np.zeros((1, 1)), samples=1, delta=0.0)
    b = stability_bound(m)
    assert b.branch_ratio == pytest.approx(2 / c, rel=1e-12)
    # companion eigenvalues are c(1 +- j)/2, modulus c/sqrt(2)
    assert b.branch_companion == pytest.approx(np.sqrt(2) / c, rel=1e-10)
    assert b.mu_max == pytest.approx(np.sqrt(2) / c, rel=1e-10)
    assert b.complex_spectrum


def test_stability_bound_positive_for_pd_moments():
    for m in node_moment_list(3, L=2, T=2, samples=800):
        b = stability_bound(m)
        assert b.mu_max > 0
        assert not b.pinv_fallback


def test_prediction_stable_at_ninety_percent_of_bound():
    # Cross-check between the bound and the transfer matrices it constrains:
    # the decoupled recursion is stable strictly inside the bound.
    moments = node_moment_list(3, L=2, T=1, delta=1e-3, samples=1000)
    mu_max = min(stability_bound(m).mu_max for m in moments)
    net = synthetic_net(3, [0.01] * 3, [0.9 * mu_max] * 3, L=2)
    pred = predict_msd(net, moments, kron_moment="decoupled")
    assert pred.stable
    assert np.max(pred.spectral_radii) < 1.0


def test_transfer_radius_small_inside_bound():
    for m in node_moment_list(2, L=2, T=2, samples=800):
        mu_max = stability_bound(m).mu_max
        f = build_transfer(m, 0.5 * mu_max, kron_moment="decoupled").matrix
        assert np.max(np.abs(np.linalg.eigvals(f))) < 1.0
