"""End-to-end assembly: grids, spectrum, Q-functions, calibrated frame.

``solve`` runs the whole construction once and returns a
:class:`ModelSolution` holding every intermediate product, so commands
and tests can share one build.  All randomness (spectral-parameter
samples, random combinations) flows from the single seed through spawned
``numpy`` seed sequences, making outputs deterministic per seed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .averages import AverageData, compute_grids
from .model import ModelParams
from .observables import (
    build_coeigenstate,
    build_eigenstate,
    form_factor,
    u1_operator,
)
from .sov_basis import (
    SOVFrame,
    apply_measure_normalization,
    calibrate_scales,
    diagonalize_b_family,
    label_vectors,
    separate_expansion,
)
from .spectrum import (
    BaxterCoeffs,
    OracleSpectrum,
    baxter_coeffs,
    oracle_spectrum,
    q_from_t,
)

__all__ = ["ModelSolution", "solve"]


def _match_scalar(reference: np.ndarray, target: np.ndarray) -> tuple[complex, float]:
    """Least-squares scalar s with s*reference ~ target, plus the overlap."""
    inner = np.vdot(reference, target)
    scale = complex(inner / np.vdot(reference, reference))
    overlap = abs(inner) / (np.linalg.norm(reference) * np.linalg.norm(target))
    return scale, float(overlap)


@dataclass(frozen=True)
class ModelSolution:
    """Everything the pipeline produces for one parameter set and seed.

    ``matched_right`` / ``matched_left`` hold the brute-force eigenvectors
    and covectors rescaled onto the normalisation of the built separate
    states (frozen after construction); they are the reference side of
    the determinant-versus-direct form-factor comparisons.
    """

    params: ModelParams
    avg: AverageData
    coeffs: BaxterCoeffs
    oracle: OracleSpectrum
    frame: SOVFrame
    reference_index: int
    built_right: np.ndarray     # built eigenstates as columns
    built_left: np.ndarray      # built dual states as rows
    matched_right: np.ndarray
    matched_left: np.ndarray
    right_overlaps: np.ndarray  # |<oracle, built>| per state, normalised
    left_overlaps: np.ndarray

    @property
    def pairs(self):
        return self.oracle.pairs

    @property
    def dim(self) -> int:
        return self.params.dim

    def operator(self, tag: str) -> np.ndarray | None:
        if tag == "identity":
            return None
        if tag == "u1":
            return u1_operator(self.params)
        raise ValueError(f"unknown operator tag {tag!r}")

    def form_factor_table(self, tag: str) -> np.ndarray:
        """Determinant values det Phi indexed [t', t] over all pairs."""
        dim = self.dim
        out = np.empty((dim, dim), dtype=complex)
        for jp, tp in enumerate(self.pairs):
            for j, t in enumerate(self.pairs):
                out[jp, j] = form_factor(self.frame, t, tp, tag)
        return out

    def direct_table(self, tag: str) -> np.ndarray:
        """Brute-force matrix elements over matched oracle states, [t', t]."""
        op = self.operator(tag)
        mid = self.matched_right if op is None else op @ self.matched_right
        return self.matched_left @ mid


def _assemble(params: ModelParams, seed: int, avg: AverageData,
              base_oracle: OracleSpectrum) -> ModelSolution:
    """One construction pass on fixed grids and a fixed brute-force spectrum."""
    seeds = np.random.SeedSequence(seed).spawn(2)
    coeffs = baxter_coeffs(params)
    pairs = [
        pair.with_q(q_from_t(params, avg, coeffs, pair.t_coeffs))
        for pair in base_oracle.pairs
    ]
    oracle = replace(base_oracle, pairs=pairs)

    frame = diagonalize_b_family(params, avg, seeds[1])
    frame = label_vectors(frame, avg, params)
    frame = apply_measure_normalization(frame)

    # reference: the eigenpair whose expansion coefficients are best
    # conditioned (largest worst-case coefficient), so no scale is fixed
    # from a near-vanishing component
    floor = []
    for pair in pairs:
        coeff = np.abs(separate_expansion(frame, pair.q_function.grid_values))
        floor.append(coeff.min() / coeff.max())
    reference = int(np.argmax(floor))
    frame = calibrate_scales(frame, pairs[reference])

    dim = params.dim
    built_right = np.column_stack([build_eigenstate(frame, p.q_function) for p in pairs])
    built_left = np.vstack([build_coeigenstate(frame, p.q_function) for p in pairs])

    matched_right = np.empty_like(built_right)
    matched_left = np.empty_like(built_left)
    r_overlap = np.empty(dim)
    l_overlap = np.empty(dim)
    for j, pair in enumerate(pairs):
        s, r_overlap[j] = _match_scalar(pair.vector, built_right[:, j])
        matched_right[:, j] = s * pair.vector
        s, l_overlap[j] = _match_scalar(pair.left_vector, built_left[j])
        matched_left[j] = s * pair.left_vector

    return ModelSolution(
        params=params,
        avg=avg,
        coeffs=coeffs,
        oracle=oracle,
        frame=frame,
        reference_index=reference,
        built_right=built_right,
        built_left=built_left,
        matched_right=matched_right,
        matched_left=matched_left,
        right_overlaps=r_overlap,
        left_overlaps=l_overlap,
    )


def _shift_parity(sol: ModelSolution) -> complex:
    """Internal parity of the shift-generator determinant identity.

    Compares one determinant against the dense matrix element between the
    built states themselves (no brute-force data enters).  The result is
    +-1 up to rounding: the grid representatives Z_n are only defined up
    to sign by their defining polynomial, and negating one of them flips
    the parity of the last determinant column while leaving every other
    construction intact.
    """
    ref = sol.reference_index
    op = u1_operator(sol.params)
    row = sol.built_left[ref] @ op @ sol.built_right
    j = int(np.argmax(np.abs(row)))
    det = form_factor(sol.frame, sol.pairs[j], sol.pairs[ref], "u1")
    const = form_factor(sol.frame, sol.pairs[ref], sol.pairs[ref], "identity") / (
        sol.built_left[ref] @ sol.built_right[:, ref]
    )
    return complex(det / (row[j] * const))


def _flip_variable(avg: AverageData, n: int, params: ModelParams) -> AverageData:
    """Negate the grid representative of variable ``n`` (0-based)."""
    z = avg.Z.copy()
    z[n] = -z[n]
    y0 = np.exp(np.log(z) / params.p)
    grids = y0[:, None] * params.q ** np.arange(params.p)[None, :]
    return replace(avg, Z=z, y0=y0, grids=grids)


def solve(params: ModelParams, seed: int = 7) -> ModelSolution:
    """Run the full construction for one parameter set.

    Steps: separation grids, brute-force spectrum, per-eigenvalue
    Q-functions, joint B-diagonalisation, grid labelling, measure
    normalisation, single-reference calibration, state assembly, oracle
    matching, and parity alignment of the grid representatives.

    The last step settles a genuine sign freedom: each representative
    Z_n may be negated (both signs satisfy the defining equations and
    produce consistent bases, states and scalar products), but the
    shift-generator determinant identity holds with parity +1 for only
    one choice per variable.  When the internal parity test reports -1,
    single representatives are negated and the construction repeated
    until the identity aligns; couplings whose squared zeros are real
    positive (e.g. any real coupling set) never need a flip.
    """
    avg = compute_grids(params)
    oracle_seed = np.random.SeedSequence(seed).spawn(2)[0]
    base_oracle = oracle_spectrum(params, oracle_seed)

    sol = _assemble(params, seed, avg, base_oracle)
    parity = _shift_parity(sol)
    if abs(parity - 1) < 1e-6:
        return sol
    for n in range(params.N):
        flipped = _assemble(params, seed, _flip_variable(avg, n, params), base_oracle)
        parity = _shift_parity(flipped)
        if abs(parity - 1) < 1e-6:
            return flipped
    raise RuntimeError(
        f"could not align the shift-generator parity (last value {parity:.6f})"
    )
