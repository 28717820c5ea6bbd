import numpy as np

from sgsov import make_params, solve


def _complex_instance(seed):
    rng = np.random.default_rng(seed)
    kappa = rng.uniform(0.5, 2, 3) * np.exp(1j * rng.uniform(-0.6, 0.6, 3))
    xi = rng.uniform(0.5, 2, 3) * np.exp(1j * rng.uniform(-0.6, 0.6, 3))
    return make_params(3, 3, 2, kappa, xi)


def test_parity_alignment_for_complex_couplings():
    # this instance needs one grid representative negated before the
    # shift-generator determinant identity holds; solve() finds the
    # alignment on its own and everything downstream stays consistent
    params = _complex_instance(1)
    sol = solve(params, seed=1)
    assert np.any(np.angle(sol.avg.Z) < -1e-9)  # a flip actually happened

    assert sol.right_overlaps.min() > 1 - 1e-8
    assert sol.left_overlaps.min() > 1 - 1e-8
    det_id = sol.form_factor_table("identity")
    dir_id = sol.direct_table("identity")
    const = (np.diag(det_id) / np.diag(dir_id)).mean()
    ratio = sol.form_factor_table("u1") / sol.direct_table("u1")
    assert np.max(np.abs(ratio / const - 1)) < 1e-6


def test_no_flip_for_real_couplings(solution7):
    # real couplings keep every squared zero on the stable branch
    assert np.all(np.angle(solution7.avg.Z) >= -1e-9)


def test_solve_is_deterministic(params7, solution7):
    again = solve(params7, seed=7)
    assert np.array_equal(again.built_right, solution7.built_right)
    assert np.array_equal(again.matched_left, solution7.matched_left)
    assert again.reference_index == solution7.reference_index
