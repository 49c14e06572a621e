"""Steady-state mean-square prediction and stability bound for the ring.

The weighted-energy analysis of the update reduces, under independence of the
regressors across time and nodes, to a linear recursion on vectorized
weighting matrices.  With D = U B U^H (B the regularized Gram inverse) the
per-node transfer matrix acting on sigma = vec(Sigma) is

    F = I - mu (E[D]^T kron I) - mu (I kron E[D]) + mu^2 E[D^T kron D]

and the measurement noise injects mu^2 sigma_v^2 vec(G)^H sigma per visit,
with G = E[U B^2 U^H].  Chaining the N per-node relations around the ring
yields a closed form for the steady-state mean-square deviation at every node
and a sufficient step-size bound for mean-square convergence.

All expectations are estimated by Monte Carlo over independent regressor
draws; nothing here requires closed-form input statistics.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .network import NetworkConfig
from .signals import SignalModel, generate_batch

__all__ = [
    "vec",
    "unvec",
    "MomentSet",
    "TransferMatrix",
    "MsdPrediction",
    "StabilityMatrices",
    "estimate_moments",
    "moments_from_rows",
    "moments_from_draws",
    "build_transfer",
    "noise_term",
    "predict_msd",
    "stability_bound",
]


def vec(matrix) -> np.ndarray:
    """Stack columns of a matrix into a vector (column-major)."""
    return np.asarray(matrix).flatten(order="F")


def unvec(vector, rows: int, cols: int = None) -> np.ndarray:
    """Inverse of vec; cols defaults to a square matrix."""
    vector = np.asarray(vector)
    cols = rows if cols is None else cols
    if vector.size != rows * cols:
        raise ValueError(f"cannot reshape length {vector.size} into {rows}x{cols}")
    return vector.reshape((rows, cols), order="F")


@dataclasses.dataclass(eq=False)
class MomentSet:
    """Monte Carlo moments of D = U B U^H for one node.

    `ed` is E[D]; the three Kronecker fields are E[D]^T kron I, I kron E[D]
    and the full E[D^T kron D]; `noise_matrix` is G = E[U B^2 U^H] and
    `ed_squared` is E[D^2] (alternative noise moment, kept for comparison).
    """

    ed: np.ndarray
    edt_kron_i: np.ndarray
    i_kron_ed: np.ndarray
    edt_kron_ed: np.ndarray
    noise_matrix: np.ndarray
    ed_squared: np.ndarray
    ed_stderr: np.ndarray
    samples: int
    delta: float
    node: int = 0

    @property
    def dim(self) -> int:
        return self.ed.shape[0]


@dataclasses.dataclass(eq=False)
class TransferMatrix:
    """Linear map sigma -> sigma' for one node's update at step size mu."""

    matrix: np.ndarray
    mu: float
    node: int = 0
    kron_moment: str = "full"


@dataclasses.dataclass(eq=False)
class MsdPrediction:
    """Closed-form steady-state MSD per node, or the offending radius if unstable."""

    stable: bool
    spectral_radii: np.ndarray
    per_node: np.ndarray = None
    per_node_db: np.ndarray = None
    network_avg: float = None
    network_avg_db: float = None
    cycle_products: list = None
    noise_rows: list = None
    imag_residual: float = 0.0


@dataclasses.dataclass(eq=False)
class StabilityMatrices:
    """Step-size bound material: F = I - mu M + mu^2 N and its companion form."""

    m_mat: np.ndarray
    n_mat: np.ndarray
    h_mat: np.ndarray
    mu_max: float
    branch_ratio: float
    branch_companion: float
    complex_spectrum: bool = False
    pinv_fallback: bool = False


def estimate_moments(model: SignalModel, filter_length: int, projection_order: int,
                     delta: float, samples: int, seed=None, burn_in: int = 100,
                     node: int = 0) -> MomentSet:
    """Monte Carlo moment estimation from independent regressor draws.

    Each draw realizes a fresh signal segment of length burn_in + L + T - 1,
    takes the fully populated window at its end, stacks U = [X*; X], and
    accumulates D = U B U^H, D^T kron D, U B^2 U^H and D^2.  The burn-in
    pushes recursive generators to their stationary regime so draws reflect
    what a long-running simulation sees.
    """
    if samples < 1:
        raise ValueError("need at least one Monte Carlo draw")
    if delta < 0:
        raise ValueError("regularization must be nonnegative")
    work_model = model if seed is None else dataclasses.replace(model, seed=int(seed))
    L, T = int(filter_length), int(projection_order)
    rows = generate_batch(work_model, samples, L + T - 1, burn_in=burn_in)
    return moments_from_rows(rows, L, T, delta, node=node)


def moments_from_rows(rows: np.ndarray, filter_length: int, projection_order: int,
                      delta: float, node: int = 0) -> MomentSet:
    """Build a MomentSet from (draws, L+T-1) signal segments."""
    L, T = int(filter_length), int(projection_order)
    rows = np.asarray(rows, dtype=complex)
    if rows.shape[1] != L + T - 1:
        raise ValueError("each row must hold exactly L + T - 1 samples")
    end = L + T - 2
    lag = np.arange(L)[:, None] + np.arange(T)[None, :]
    X = rows[:, end - lag]                      # (m, L, T), newest column first
    U = np.concatenate([np.conj(X), X], axis=1)  # (m, 2L, T)
    A = np.einsum("mpt,mps->mts", np.conj(U), U)
    B = np.linalg.inv(A + delta * np.eye(T))
    UB = np.einsum("mpt,mts->mps", U, B)
    D = np.einsum("mps,mqs->mpq", UB, np.conj(U))
    UB2 = np.einsum("mps,mqs->mpq", np.einsum("mpt,mts->mps", U, B @ B), np.conj(U))
    return moments_from_draws(D, UB2, delta=delta, node=node)


def moments_from_draws(d_draws: np.ndarray, noise_draws: np.ndarray,
                       delta: float, node: int = 0) -> MomentSet:
    """Average per-draw D and U B^2 U^H matrices into a MomentSet."""
    m, dim = d_draws.shape[0], d_draws.shape[1]
    ed = d_draws.mean(axis=0)
    # E[D^T kron D] accumulated as a 4-way tensor; avoids per-draw Kroneckers.
    dt = d_draws.transpose(0, 2, 1)
    kron_full = np.einsum("mij,mkl->ikjl", dt, d_draws).reshape(dim * dim, dim * dim) / m
    eye = np.eye(dim)
    second = np.abs(d_draws) ** 2
    var = second.mean(axis=0) - np.abs(ed) ** 2
    stderr = np.sqrt(np.maximum(var, 0.0) / m)
    return MomentSet(
        ed=ed,
        edt_kron_i=np.kron(ed.T, eye),
        i_kron_ed=np.kron(eye, ed),
        edt_kron_ed=kron_full,
        noise_matrix=noise_draws.mean(axis=0),
        ed_squared=np.einsum("mij,mjk->ik", d_draws, d_draws) / m,
        ed_stderr=stderr,
        samples=m,
        delta=delta,
        node=node,
    )


def build_transfer(moments: MomentSet, mu: float, kron_moment: str = "full") -> TransferMatrix:
    """Assemble F = I - mu(E[D]^T kron I) - mu(I kron E[D]) + mu^2 K.

    K is the full E[D^T kron D] by default; "decoupled" substitutes
    E[D]^T kron E[D] for sensitivity checks.
    """
    if kron_moment == "full":
        quad = moments.edt_kron_ed
    elif kron_moment == "decoupled":
        quad = np.kron(moments.ed.T, moments.ed)
    else:
        raise ValueError("kron_moment must be 'full' or 'decoupled'")
    dim2 = moments.dim ** 2
    matrix = (np.eye(dim2)
              - mu * moments.edt_kron_i
              - mu * moments.i_kron_ed
              + (mu * mu) * quad)
    return TransferMatrix(matrix, mu=mu, node=moments.node, kron_moment=kron_moment)


def noise_term(moments: MomentSet, noise_variance: float,
               variant: str = "noise_matrix") -> np.ndarray:
    """Row functional of the per-update noise injection, without the mu^2 factor.

    Default: s(sigma) = sigma_v^2 vec(G)^H sigma with G = E[U B^2 U^H], the
    form the doubly white noise actually induces through B (it equals
    sigma_v^2 Tr(G Sigma)).  The "d_squared" variant evaluates
    sigma_v^2 vec(E[D^2])^T sigma instead, retained for comparison; note its
    row length matches only because D is square.
    """
    if variant == "noise_matrix":
        return noise_variance * np.conj(vec(moments.noise_matrix))
    if variant == "d_squared":
        return noise_variance * vec(moments.ed_squared)
    raise ValueError("variant must be 'noise_matrix' or 'd_squared'")


def predict_msd(config: NetworkConfig, moment_sets, kron_moment: str = "full",
                noise_variant: str = "noise_matrix") -> MsdPrediction:
    """Steady-state MSD at every node from per-node moment sets.

    Walking the per-node weighting relations once around the ring couples each
    node's weighting vector to itself through the cyclic product of transfer
    matrices; solving the fixed point gives, per ring position p,

        msd = f_p (I - P_p)^-1 vec(I)

    where P_p chains all N transfer matrices starting at position p and f_p
    accumulates every node's noise row pushed through the partial products.
    The value at position p describes the estimate held after position p-1
    updates, so results are attributed to the predecessor node.
    """
    n = config.n_nodes
    if len(moment_sets) != n:
        raise ValueError("need one moment set per node")
    order = config.ring_order
    F = [build_transfer(moment_sets[k], float(config.step_sizes[k]), kron_moment).matrix
         for k in order]
    s = [float(config.step_sizes[k]) ** 2
         * noise_term(moment_sets[k], float(config.noise.variances[k]), noise_variant)
         for k in order]
    dim = moment_sets[order[0]].dim
    dim2 = dim * dim
    identity = np.eye(dim2)
    vec_eye = vec(np.eye(dim))

    radii = np.empty(n)
    msd = np.full(n, np.nan)
    products, rows = [None] * n, [None] * n
    imag_resid = 0.0
    for p in range(n):
        f = s[(p - 1) % n].copy()
        partial = identity
        for l in range(n, 1, -1):
            partial = F[(p + l - 1) % n] @ partial
            f = f + s[(p + l - 2) % n] @ partial
        full_cycle = F[p] @ partial
        target = order[(p - 1) % n]
        radii[target] = np.max(np.abs(np.linalg.eigvals(full_cycle)))
        products[target] = full_cycle
        rows[target] = f
        if radii[target] < 1.0:
            value = f @ np.linalg.solve(identity - full_cycle, vec_eye)
            imag_resid = max(imag_resid, abs(np.imag(value)))
            msd[target] = max(float(np.real(value)), 0.0)

    stable = bool(np.all(radii < 1.0))
    if not stable:
        return MsdPrediction(stable=False, spectral_radii=radii,
                             cycle_products=products, noise_rows=rows,
                             imag_residual=imag_resid)
    with np.errstate(divide="ignore"):
        per_db = 10.0 * np.log10(msd)
    avg = float(msd.mean())
    return MsdPrediction(
        stable=True, spectral_radii=radii, per_node=msd, per_node_db=per_db,
        network_avg=avg,
        network_avg_db=float(10.0 * np.log10(avg)) if avg > 0 else -np.inf,
        cycle_products=products, noise_rows=rows, imag_residual=imag_resid,
    )


def stability_bound(moments: MomentSet) -> StabilityMatrices:
    """Sufficient step-size bound for mean-square convergence of one node.

    Writing F = I - mu M + mu^2 N with M = E[D]^T kron I + I kron E[D] and
    N = E[D]^T kron E[D], the bound is

        mu_max = min( 1 / lambda_max(M^-1 N), 1 / lambda_max(H) ),
        H = [[M/2, -N/2], [I, 0]].

    lambda_max is the largest eigenvalue magnitude; a complex companion
    spectrum is flagged, as is a pseudo-inverse fallback for singular M.
    """
    m_mat = moments.edt_kron_i + moments.i_kron_ed
    n_mat = np.kron(moments.ed.T, moments.ed)
    dim2 = m_mat.shape[0]
    pinv_fallback = False
    try:
        ratio = np.linalg.solve(m_mat, n_mat)
    except np.linalg.LinAlgError:
        ratio = np.linalg.pinv(m_mat) @ n_mat
        pinv_fallback = True
    lam_ratio, cplx_ratio = _lambda_max(np.linalg.eigvals(ratio))
    h_mat = np.block([[0.5 * m_mat, -0.5 * n_mat],
                      [np.eye(dim2), np.zeros((dim2, dim2))]])
    lam_h, cplx_h = _lambda_max(np.linalg.eigvals(h_mat))
    branch_ratio = 1.0 / lam_ratio if lam_ratio > 0 else np.inf
    branch_companion = 1.0 / lam_h if lam_h > 0 else np.inf
    return StabilityMatrices(
        m_mat=m_mat, n_mat=n_mat, h_mat=h_mat,
        mu_max=float(min(branch_ratio, branch_companion)),
        branch_ratio=float(branch_ratio),
        branch_companion=float(branch_companion),
        complex_spectrum=cplx_ratio or cplx_h,
        pinv_fallback=pinv_fallback,
    )


def _lambda_max(values: np.ndarray, rtol: float = 1e-9):
    """Largest eigenvalue magnitude, flagging a genuinely complex spectrum."""
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    if scale == 0.0:
        return 0.0, False
    is_complex = bool(np.max(np.abs(np.imag(values))) > rtol * scale)
    return scale, is_complex
