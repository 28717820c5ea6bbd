"""Transfer-matrix spectrum, Baxter coefficients, and Q-function recovery.

Eigenvalue functions live in the Laurent class

    t(l) = sum_{m=0}^{N-1} c_m l^(2m - N + 1),

i.e. l^(N-1) t(l) is a polynomial in l^2 of degree <= N-1 whose
coefficients are real for suitable (e.g. real positive) couplings; the
package measures the imaginary residue instead of assuming it vanishes.

For each eigenvalue the finite-difference equation

    t(l) Q(l) = a(l) Q(l/q) + d(l) Q(l q)

restricted to a separation grid closes into a cyclic p x p system
(multiplication by q walks the grid), and its one-dimensional nullspace
yields the Q values per variable up to one scale each.  A joint
homogeneous least-squares solve stitches the per-variable values into a
single polynomial of degree <= N(p-1); the system is overdetermined by
one equation, so the residual is a real consistency check.

The brute-force spectrum ("oracle") is obtained by simultaneous
diagonalisation of transfer matrices at several spectral parameters via
a seeded random linear combination, with every eigenvector certified
against each family member.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.optimize

from . import laurent
from .averages import AverageData
from .errors import DegenerateModelError
from .model import ModelParams
from .yang_baxter import transfer

__all__ = [
    "BaxterCoeffs",
    "QFunction",
    "TransferEigenpair",
    "OracleSpectrum",
    "baxter_coeffs",
    "t_eval",
    "oracle_spectrum",
    "separate_system",
    "hadamard_scale",
    "grid_determinants",
    "q_from_t",
    "tq_residual",
    "ab_initio_spectrum",
]


class BaxterCoeffs:
    """The Laurent-polynomial coefficients a(l), d(l) of the TQ equation.

    ``a`` is the literal product over sites

        a(l) = prod_r (kappa_r xi_r / (i l))
               (1 + i q^(-1/2) l kappa_r / xi_r)
               (1 + i q^(-1/2) l / (kappa_r xi_r))

    and ``d(l) = q^N a(-l q)`` identically.  Both vectorise over ``l``.
    """

    def __init__(self, params: ModelParams):
        self.params = params

    def a(self, lam: complex | np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        if np.any(lam == 0):
            raise ValueError("spectral parameter must be nonzero")
        pr = self.params
        kx = pr.kappa * pr.xi
        ll = lam[..., None]
        qinv_half = 1.0 / pr.q_half
        factors = (
            kx / (1j * ll)
            * (1 + 1j * qinv_half * ll * pr.kappa / pr.xi)
            * (1 + 1j * qinv_half * ll / kx)
        )
        return np.prod(factors, axis=-1)

    def d(self, lam: complex | np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        return self.params.q ** self.params.N * self.a(-lam * self.params.q)


def baxter_coeffs(params: ModelParams) -> BaxterCoeffs:
    return BaxterCoeffs(params)


def t_eval(t_coeffs: np.ndarray, lam: complex | np.ndarray) -> np.ndarray:
    """Evaluate an eigenvalue function from its Laurent coefficients."""
    powers = laurent.transfer_powers(len(t_coeffs))
    return laurent.evaluate(np.asarray(t_coeffs, dtype=complex), powers, lam)


@dataclass(frozen=True)
class QFunction:
    """Polynomial Q attached to a transfer eigenvalue.

    Coefficients are unit-norm with the global phase rotated to minimise
    the total imaginary weight (Q is only defined up to normalisation);
    ``imag_residue`` records what remains.  Grid values are evaluations
    of the fitted polynomial on the separation grids and their negatives
    (the latter enter the dual states and form factors).
    """

    coeffs: np.ndarray            # (N(p-1)+1,) low to high
    grid_values: np.ndarray       # (N, p)
    neg_grid_values: np.ndarray   # (N, p)
    fit_residual: float           # joint homogeneous-system residual
    nullspace_gaps: np.ndarray    # (N,) second-smallest singular value per variable
    imag_residue: float

    def __call__(self, lam: complex | np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(np.asarray(lam, dtype=complex), self.coeffs)

    @property
    def degree(self) -> int:
        mags = np.abs(self.coeffs)
        sig = np.nonzero(mags > 1e-12 * mags.max())[0]
        return int(sig[-1]) if sig.size else 0


@dataclass(frozen=True)
class TransferEigenpair:
    """One point of the brute-force spectrum.

    ``vector`` (column) and ``left_vector`` (row of the inverse
    eigenvector matrix) are frozen-normalisation oracle data;
    ``q_function`` is attached by :func:`q_from_t` downstream.
    """

    label: int
    t_coeffs: np.ndarray
    vector: np.ndarray
    left_vector: np.ndarray
    fit_residual: float
    imag_residue: float
    q_function: QFunction | None = None

    def t(self, lam: complex | np.ndarray) -> np.ndarray:
        return t_eval(self.t_coeffs, lam)

    def with_q(self, q_function: QFunction) -> "TransferEigenpair":
        return replace(self, q_function=q_function)


@dataclass(frozen=True)
class OracleSpectrum:
    """Full brute-force diagonalisation of the commuting transfer family."""

    params: ModelParams
    pairs: list[TransferEigenpair]
    right: np.ndarray             # eigenvectors as columns
    left: np.ndarray              # inverse of ``right``; rows are covectors
    lambda_samples: np.ndarray
    leakage: float                # worst off-diagonal weight of W^-1 T W
    min_coeff_gap: float          # min pairwise distance of t-coefficient vectors

    def __len__(self) -> int:
        return len(self.pairs)


def simultaneous_eig(
    ops: Sequence[np.ndarray],
    rng: np.random.Generator,
    collision_tol: float,
    max_retries: int = 5,
):
    """Joint eigenbasis of a commuting family via a random combination.

    Draws complex coefficients, diagonalises the combination, and retries
    with fresh coefficients when the combined spectrum has near-collisions
    (which would let the eigensolver mix joint eigenspaces).  Returns the
    eigenvector matrix, its inverse, the matrix of per-operator eigenvalues
    (one row per operator) and the worst relative off-diagonal leakage.
    """
    dim = ops[0].shape[0]
    last_gap = np.inf
    for _ in range(max_retries):
        coeff = rng.standard_normal(len(ops)) + 1j * rng.standard_normal(len(ops))
        combo = sum(c * op for c, op in zip(coeff, ops))
        vals, right = sla.eig(combo)
        diffs = np.abs(vals[:, None] - vals[None, :])
        np.fill_diagonal(diffs, np.inf)
        scale = max(np.max(np.abs(vals)), 1e-300)
        last_gap = diffs.min() / scale
        if last_gap < collision_tol:
            continue
        left = np.linalg.inv(right)
        eigvals = np.empty((len(ops), dim), dtype=complex)
        leakage = 0.0
        for i, op in enumerate(ops):
            g = left @ op @ right
            diag = np.diag(g)
            off = g - np.diag(diag)
            leakage = max(leakage, np.linalg.norm(off) / np.linalg.norm(g))
            eigvals[i] = diag
        return right, left, eigvals, leakage
    raise DegenerateModelError(
        f"random-combination spectrum kept colliding (last gap {last_gap:.3e}); "
        "parameters appear degenerate"
    )


def oracle_spectrum(
    params: ModelParams,
    seed: int | np.random.SeedSequence = 0,
    n_fit: int | None = None,
    n_holdout: int = 3,
    max_retries: int = 5,
) -> OracleSpectrum:
    """Brute-force transfer spectrum with Laurent-class eigenvalue fits.

    Transfer matrices at ``n_fit`` (default N+2) random spectral
    parameters are simultaneously diagonalised; eigenvalue samples are
    fitted to the class l^(N-1) t(l) in R[l^2]_(N-1) and validated on
    ``n_holdout`` held-out parameters.  Eigenpairs are sorted by
    coefficient vectors for deterministic output.
    """
    N = params.N
    rng = np.random.default_rng(seed)
    n_fit = N + 2 if n_fit is None else n_fit
    lams = laurent.sample_annulus(rng, n_fit + n_holdout)
    ops = [transfer(params, lam) for lam in lams]

    right, left, eigvals, leakage = simultaneous_eig(
        ops, rng, collision_tol=params.tol("eig_collision"), max_retries=max_retries
    )

    powers = laurent.transfer_powers(N)
    coeffs = laurent.fit(lams[:n_fit], eigvals[:n_fit], powers)  # (N, dim)
    predicted = laurent.evaluate(coeffs, powers, lams[n_fit:])
    actual = eigvals[n_fit:]
    fit_resid = np.max(np.abs(predicted - actual) / np.abs(actual), axis=0)

    # deterministic ordering by stacked real/imaginary coefficient parts
    keys = np.vstack([np.round(coeffs.real, 9), np.round(coeffs.imag, 9)])
    order = np.lexsort(keys[::-1])
    coeffs = coeffs[:, order]
    right = right[:, order]
    left = left[order, :]
    fit_resid = fit_resid[order]

    cdiff = np.linalg.norm(coeffs[:, :, None] - coeffs[:, None, :], axis=0)
    np.fill_diagonal(cdiff, np.inf)
    min_gap = float(cdiff.min())
    if min_gap < 1e-10 * np.max(np.abs(coeffs)):
        raise DegenerateModelError(
            f"two eigenvalue functions coincide (gap {min_gap:.3e}): spectrum not simple"
        )

    cmax = np.max(np.abs(coeffs), axis=0)
    pairs = [
        TransferEigenpair(
            label=j,
            t_coeffs=coeffs[:, j].copy(),
            vector=right[:, j].copy(),
            left_vector=left[j, :].copy(),
            fit_residual=float(fit_resid[j]),
            imag_residue=float(np.max(np.abs(coeffs[:, j].imag)) / cmax[j]),
        )
        for j in range(right.shape[1])
    ]
    return OracleSpectrum(
        params=params,
        pairs=pairs,
        right=right,
        left=left,
        lambda_samples=lams,
        leakage=float(leakage),
        min_coeff_gap=min_gap,
    )


def _cyclic_system(params: ModelParams, coeffs: BaxterCoeffs,
                   t_coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """TQ difference equation restricted to one q-cyclic orbit of points."""
    p = params.p
    mat = np.zeros((p, p), dtype=complex)
    ks = np.arange(p)
    mat[ks, ks] = t_eval(t_coeffs, points)
    mat[ks, (ks - 1) % p] -= coeffs.a(points)
    mat[ks, (ks + 1) % p] -= coeffs.d(points)
    return mat


def separate_system(
    params: ModelParams,
    avg: AverageData,
    coeffs: BaxterCoeffs,
    t_coeffs: np.ndarray,
    n: int,
) -> np.ndarray:
    """Cyclic tridiagonal system of the TQ equation on grid ``n`` (1-based).

    Row k encodes  t(y_k) Q(y_k) - a(y_k) Q(y_{k-1}) - d(y_k) Q(y_{k+1}) = 0
    with indices mod p; a polynomial Q solves the equation on this grid
    iff its value vector lies in the nullspace.
    """
    return _cyclic_system(params, coeffs, t_coeffs, avg.grids[n - 1])


def hadamard_scale(mat: np.ndarray) -> float:
    """Hadamard bound prod_k |row_k|; natural scale for |det|."""
    return float(np.prod(np.linalg.norm(mat, axis=1)))


def grid_determinants(
    params: ModelParams,
    avg: AverageData,
    coeffs: BaxterCoeffs,
    t_coeffs: np.ndarray,
) -> np.ndarray:
    """|det| of every per-variable grid system, scaled by its Hadamard bound.

    All entries vanish (to tolerance) iff ``t_coeffs`` belongs to the
    spectrum; a generic perturbed vector leaves at least one entry finite.
    """
    out = np.empty(params.N)
    for n in range(1, params.N + 1):
        mat = separate_system(params, avg, coeffs, t_coeffs, n)
        out[n - 1] = abs(np.linalg.det(mat)) / hadamard_scale(mat)
    return out


def q_from_t(
    params: ModelParams,
    avg: AverageData,
    coeffs: BaxterCoeffs,
    t_coeffs: np.ndarray,
    max_degree: int | None = None,
) -> QFunction:
    """Reconstruct the Q polynomial of an eigenvalue from the grid systems.

    The difference equation closes cyclically on each grid and on each
    negated grid (2N orbits in total; the negated values are the ones the
    dual states consume).  Per orbit the (numerically) one-dimensional
    nullspace fixes the Q values up to one scale; the polynomial
    coefficients and the 2N orbit scales are then solved jointly as the
    nullspace of a homogeneous linear system with rows balanced to unit
    norm.  With 2Np equations against N(p-1) + 2N + 1 unknowns the system
    is genuinely overdetermined, so the returned ``fit_residual`` (the
    smallest singular value at unit solution norm) is a real consistency
    check that one polynomial of degree <= N(p-1) reproduces every orbit.

    ``max_degree`` widens the polynomial basis beyond the default bound
    N(p-1); the trailing coefficients of the solution then measure how
    sharply the degree bound holds.
    """
    N, p = params.N, params.p
    deg = N * (p - 1) if max_degree is None else int(max_degree)
    gap_tol = params.tol("nullspace_gap")

    orbits = np.vstack([avg.grids, -avg.grids])  # (2N, p)
    orbit_vals = np.empty((2 * N, p), dtype=complex)
    gaps = np.empty(2 * N)
    for m, points in enumerate(orbits):
        mat = _cyclic_system(params, coeffs, t_coeffs, points)
        _, svals, vh = np.linalg.svd(mat)
        gaps[m] = svals[-2] / svals[0]
        if gaps[m] < gap_tol:
            raise DegenerateModelError(
                f"grid system {m % N + 1} has a nullspace of dimension > 1 "
                f"(singular-value gap {gaps[m]:.3e})"
            )
        orbit_vals[m] = vh[-1].conj()

    # rows: Q(points[m, k]) - scale_m * nullvec_m[k] = 0
    design = np.zeros((2 * N * p, deg + 1 + 2 * N), dtype=complex)
    pts = orbits.reshape(-1)
    design[:, : deg + 1] = pts[:, None] ** np.arange(deg + 1)[None, :]
    for m in range(2 * N):
        design[m * p : (m + 1) * p, deg + 1 + m] = -orbit_vals[m]
    # equilibrate: balance equations, then unknowns (monomial columns grow
    # like max|y|^j and would otherwise swamp the singular-value gap)
    design /= np.linalg.norm(design, axis=1)[:, None]
    col_scale = np.linalg.norm(design, axis=0)
    design /= col_scale[None, :]

    _, svals, vh = np.linalg.svd(design)
    fit_residual = float(svals[-1])
    if svals[-2] < gap_tol:
        raise DegenerateModelError(
            f"joint Q system is rank deficient (second singular value {svals[-2]:.3e})"
        )
    solution = vh[-1].conj() / col_scale
    qc = solution[: deg + 1]
    scales = solution[deg + 1 :]
    if np.min(np.abs(scales)) < 1e-10 * np.max(np.abs(scales)):
        raise DegenerateModelError("a per-variable scale collapsed in the joint Q solve")

    # global phase: rotate to minimise the imaginary weight, then fix sign
    s2 = np.sum(qc ** 2)
    if abs(s2) > 0:
        qc = qc * np.exp(-0.5j * np.angle(s2))
    if qc[np.argmax(np.abs(qc))].real < 0:
        qc = -qc
    qc = qc / np.linalg.norm(qc)
    imag_residue = float(np.max(np.abs(qc.imag)) / np.max(np.abs(qc)))

    poly = np.polynomial.polynomial.polyval
    return QFunction(
        coeffs=qc,
        grid_values=poly(avg.grids, qc),
        neg_grid_values=poly(-avg.grids, qc),
        fit_residual=fit_residual,
        nullspace_gaps=gaps,
        imag_residue=imag_residue,
    )


def tq_residual(
    coeffs: BaxterCoeffs,
    t_coeffs: np.ndarray,
    q_function: QFunction,
    lam: complex | np.ndarray,
) -> np.ndarray:
    """Relative residual of the functional TQ equation at arbitrary ``lam``."""
    lam = np.asarray(lam, dtype=complex)
    q = coeffs.params.q
    lhs = t_eval(t_coeffs, lam) * q_function(lam)
    term_a = coeffs.a(lam) * q_function(lam / q)
    term_d = coeffs.d(lam) * q_function(lam * q)
    scale = np.abs(lhs) + np.abs(term_a) + np.abs(term_d)
    return np.abs(lhs - term_a - term_d) / scale


def ab_initio_spectrum(
    params: ModelParams,
    avg: AverageData,
    coeffs: BaxterCoeffs,
    seed: int | np.random.SeedSequence = 0,
    n_starts: int = 400,
    residual_tol: float = 1e-9,
    dedup_tol: float = 1e-6,
) -> np.ndarray:
    """Search for spectrum points directly from the grid determinants.

    Multi-start damped least squares on the map  c -> (det D_1, ..., det D_N)
    over real coefficient vectors.  Secondary path: completeness of the
    returned set is not guaranteed and depends on ``n_starts``; the oracle
    spectrum remains the reference.  Returns found coefficient vectors,
    deduplicated, as an (n_found, N) array.
    """
    N = params.N
    rng = np.random.default_rng(seed)
    powers = laurent.transfer_powers(N)
    pts = avg.grids.reshape(-1)
    # per-coefficient start scale from the magnitudes a, d reach on the grids
    drive = np.abs(coeffs.a(pts)) + np.abs(coeffs.d(pts))
    start_scale = np.array(
        [np.median(drive / np.abs(pts ** pw)) for pw in powers]
    )

    def residuals(c: np.ndarray) -> np.ndarray:
        dets = np.empty(N, dtype=complex)
        for n in range(1, N + 1):
            mat = separate_system(params, avg, coeffs, c, n)
            dets[n - 1] = np.linalg.det(mat) / hadamard_scale(mat)
        return np.concatenate([dets.real, dets.imag])

    found: list[np.ndarray] = []
    for _ in range(n_starts):
        c0 = start_scale * rng.standard_normal(N)
        sol = scipy.optimize.least_squares(residuals, c0, method="lm", xtol=1e-14)
        resid = np.linalg.norm(residuals(sol.x))
        if resid > residual_tol:
            continue
        scale = max(np.linalg.norm(sol.x), 1e-300)
        if all(np.linalg.norm(sol.x - c) / scale > dedup_tol for c in found):
            found.append(sol.x)
    return np.array(found).reshape(-1, N)
