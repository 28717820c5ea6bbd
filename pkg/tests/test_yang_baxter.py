import numpy as np
import pytest

from sgsov import lax, make_params, monodromy, r_matrix, transfer, verify_rll
from sgsov import laurent
from sgsov.yang_baxter import (
    b_commutator_residual,
    monodromy_rll_residual,
    transfer_commutator_residual,
)


def test_lax_offdiagonal_entries():
    # kappa = xi = 1, lambda = 1: upper-right block is diagonal (q^k - q^-k)/i
    params = make_params(1, 3, 2, [1.0], [1.0])
    blocks = lax(params, 1, 1.0).blocks
    expected = np.diag((params.q ** np.arange(3) - params.q ** -np.arange(3)) / 1j)
    assert np.allclose(blocks[0, 1], expected, atol=1e-14)


def test_lax_b_block_odd_under_inversion(rng):
    # conjugating the clock basis by k -> -k sends v -> v^-1; combined with
    # inverting the site variable lambda/xi the B block flips sign
    params = make_params(1, 3, 2, [1.3], [0.7])
    lam = 0.8 + 0.5j
    xi = params.xi[0]
    flip = np.zeros((3, 3))
    for k in range(3):
        flip[(-k) % 3, k] = 1.0
    b_at = lax(params, 1, lam).blocks[0, 1]
    b_inv = lax(params, 1, xi ** 2 / lam).blocks[0, 1]
    assert np.allclose(flip @ b_inv @ flip, -b_at, atol=1e-13)


def test_lax_rejects_zero_lambda():
    params = make_params(1, 3, 2, [1.0], [1.0])
    with pytest.raises(ValueError):
        lax(params, 1, 0.0)
    with pytest.raises(ValueError):
        lax(params, 2, 1.0)


def test_rll_residual_random_pairs(params7, rng):
    for n in range(1, params7.N + 1):
        for _ in range(10):
            lam, mu = laurent.sample_annulus(rng, 2)
            assert verify_rll(params7, n, lam, mu) < 1e-10


def test_rll_residual_p5(rng):
    params = make_params(1, 5, 2, [1.4], [0.6])
    for _ in range(5):
        lam, mu = laurent.sample_annulus(rng, 2)
        assert verify_rll(params, 1, lam, mu) < 1e-10


def test_rll_coincident_point(params7):
    # ratio 1 degenerates R to a permutation multiple; the relation survives
    assert verify_rll(params7, 1, 0.9 + 0.2j, 0.9 + 0.2j) < 1e-10


def test_r_matrix_permutation_point(params7):
    r = r_matrix(params7, 1.0)
    c = params7.q - 1 / params7.q
    perm = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    assert np.allclose(r, c * perm, atol=1e-14)
    with pytest.raises(ValueError):
        r_matrix(params7, 0.0)


def test_monodromy_single_site_is_lax():
    params = make_params(1, 3, 2, [1.2], [0.9])
    lam = 1.1 - 0.4j
    mono = monodromy(params, lam)
    blocks = lax(params, 1, lam).blocks
    assert np.allclose(mono.A, blocks[0, 0])
    assert np.allclose(mono.B, blocks[0, 1])
    assert np.allclose(mono.C, blocks[1, 0])
    assert np.allclose(mono.D, blocks[1, 1])


def test_monodromy_shape_and_finiteness(params7):
    mono = monodromy(params7, 0.7 + 0.7j)
    for block in (mono.A, mono.B, mono.C, mono.D):
        assert block.shape == (27, 27)
        assert np.all(np.isfinite(block))


def test_monodromy_satisfies_rll(params7, rng):
    lam, mu = laurent.sample_annulus(rng, 2)
    assert monodromy_rll_residual(params7, lam, mu) < 1e-10


def test_transfer_and_b_commutativity(params7, rng):
    for _ in range(10):
        lam, mu = laurent.sample_annulus(rng, 2)
        assert transfer_commutator_residual(params7, lam, mu) < 1e-10
        assert b_commutator_residual(params7, lam, mu) < 1e-10


def test_transfer_laurent_class(params7, rng):
    # l^(N-1) T(l) is entrywise polynomial in l^2 of degree <= N-1
    N = params7.N
    lams = laurent.sample_annulus(rng, N + 3)
    values = np.array([(lam ** (N - 1)) * transfer(params7, lam) for lam in lams])
    powers = 2 * np.arange(N)
    coeffs = laurent.fit(lams[:N], values[:N], powers)
    predicted = laurent.evaluate(coeffs, powers, lams[N:])
    scale = np.max(np.abs(values[N:]))
    assert np.max(np.abs(predicted - values[N:])) / scale < 1e-9


def test_monodromy_entries_laurent(params7, rng):
    # entries span powers -N..N: fit on 2N+1 samples, validate on held out
    N = params7.N
    powers = laurent.monodromy_powers(N)
    lams = laurent.sample_annulus(rng, 2 * N + 4)
    values = np.array([monodromy(params7, lam).B for lam in lams])
    coeffs = laurent.fit(lams[: 2 * N + 1], values[: 2 * N + 1], powers)
    predicted = laurent.evaluate(coeffs, powers, lams[2 * N + 1 :])
    scale = np.max(np.abs(values[2 * N + 1 :]))
    assert np.max(np.abs(predicted - values[2 * N + 1 :])) / scale < 1e-9
