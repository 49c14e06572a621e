"""Augmented affine projection updates on an incremental ring.

The node update solves a regularized projection onto the span of the T most
recent augmented regressors:

    e = d - X^T h - X^H g
    A = X^H X + X^T X*          (equivalently U^H U with U = [X*; X])
    h' = h + mu X* (A + delta I)^-1 e
    g' = g + mu X  (A + delta I)^-1 e

In the incremental network the estimate travels the ring: node k starts from
node k-1's output at the same time step, wrapping to the previous cycle at the
ring boundary.  The non-cooperative baseline applies the identical algebra to
each node's own previous state.
"""

from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from .network import RegressorBlock

__all__ = [
    "FilterUpdateError",
    "NodeState",
    "UpdateRecord",
    "EnergyAudit",
    "LearningCurve",
    "gram",
    "augmented_regressor",
    "local_update",
    "incremental_cycle",
    "noncooperative_update",
    "energy_audit",
]


class FilterUpdateError(RuntimeError):
    """The regularized Gram system could not be solved."""


@dataclasses.dataclass(eq=False)
class NodeState:
    """Weight estimates (h, g) plus the node's step size and regularization."""

    h: np.ndarray
    g: np.ndarray
    mu: float
    delta: float

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=np.complex128)
        self.g = np.asarray(self.g, dtype=np.complex128)
        if self.mu < 0:
            raise ValueError("step size must be nonnegative")
        if self.delta <= 0:
            raise ValueError("regularization must be positive")

    @classmethod
    def zero(cls, filter_length: int, mu: float, delta: float) -> "NodeState":
        z = np.zeros(filter_length, dtype=np.complex128)
        return cls(z, z.copy(), mu, delta)

    def weight_error(self, true_h, true_g) -> np.ndarray:
        """Augmented error [h_true - h; g_true - g]."""
        return np.concatenate([np.asarray(true_h, dtype=complex) - self.h,
                               np.asarray(true_g, dtype=complex) - self.g])


@dataclasses.dataclass(eq=False)
class UpdateRecord:
    """Everything one update exposes for analysis and audits.

    gram_matrix is A = X^H X + X^T X*, inverse is (A + delta I)^-1, and
    regressor is the stacked U = [X*; X].  Weight errors are populated only
    when the true weights were supplied (simulation-only instrumentation).
    """

    error: np.ndarray
    gram_matrix: np.ndarray
    inverse: np.ndarray
    regressor: np.ndarray
    node: int = 0
    time: int = 0
    weight_error_before: np.ndarray = None
    weight_error_after: np.ndarray = None


@dataclasses.dataclass(frozen=True)
class EnergyAudit:
    """Result of the weighted energy-balance check for one update."""

    residual: float
    scale: float
    relative: float
    skipped: bool = False


@dataclasses.dataclass(eq=False)
class LearningCurve:
    """Trial-averaged squared weight error, per cycle and node."""

    values: np.ndarray  # (horizon, n_nodes), linear scale
    trials: int
    algorithm: str
    signal: str
    config_hash: str = ""

    def network(self) -> np.ndarray:
        return self.values.mean(axis=1)

    def network_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.network())


def gram(X) -> np.ndarray:
    """A = X^H X + X^T X*; Hermitian PSD with exactly real entries."""
    X = np.asarray(X, dtype=complex)
    C = np.conj(X.T) @ X
    return C + np.conj(C)


def augmented_regressor(X) -> np.ndarray:
    """Stack U = [X*; X]; U^H U reproduces gram(X)."""
    X = np.asarray(X, dtype=complex)
    return np.concatenate([np.conj(X), X], axis=0)


def local_update(state: NodeState, block: RegressorBlock, truth=None):
    """One augmented affine projection step from the given starting state.

    Returns the new state (same hyperparameters) and an UpdateRecord.  When
    `truth = (h_true, g_true)` is given, the record carries the augmented
    weight-error vectors before and after the step.
    """
    X = np.asarray(block.X, dtype=complex)
    L, T = X.shape
    if state.h.shape != (L,) or state.g.shape != (L,):
        raise ValueError("state and regressor dimensions disagree")
    e = block.d - X.T @ state.h - np.conj(X.T) @ state.g
    A = gram(X)
    reg = A + state.delta * np.eye(T)
    try:
        z = np.linalg.solve(reg, e)
        B = np.linalg.inv(reg)
    except np.linalg.LinAlgError as exc:
        raise FilterUpdateError(f"singular regularized Gram system at node {block.node}") from exc
    new = NodeState(state.h + state.mu * (np.conj(X) @ z),
                    state.g + state.mu * (X @ z), state.mu, state.delta)
    record = UpdateRecord(
        error=e, gram_matrix=A, inverse=B, regressor=augmented_regressor(X),
        node=block.node, time=block.time,
    )
    if truth is not None:
        record.weight_error_before = state.weight_error(*truth)
        record.weight_error_after = new.weight_error(*truth)
    return new, record


def incremental_cycle(states: Sequence[NodeState], blocks: Sequence[RegressorBlock],
                      ring_order=None, truth=None):
    """Pass the running estimate once around the ring.

    Node `ring_order[0]` starts from the previous cycle's final estimate
    (i.e. the current state of `ring_order[-1]`); every node then applies
    local_update with its own (mu, delta) and block.  Returns the new states
    (indexed by node) and the records in visit order.
    """
    n = len(states)
    if len(blocks) != n:
        raise ValueError("need exactly one block per node")
    ring = tuple(range(n)) if ring_order is None else tuple(ring_order)
    if sorted(ring) != list(range(n)):
        raise ValueError("ring order must be a permutation of the node indices")

    carry_h, carry_g = states[ring[-1]].h, states[ring[-1]].g
    new_states = list(states)
    records = []
    for k in ring:
        seeded = NodeState(carry_h, carry_g, states[k].mu, states[k].delta)
        updated, record = local_update(seeded, blocks[k], truth)
        carry_h, carry_g = updated.h, updated.g
        new_states[k] = updated
        records.append(record)
    return new_states, records


def noncooperative_update(state: NodeState, block: RegressorBlock) -> NodeState:
    """Stand-alone update chained on the node's own previous state."""
    new, _ = local_update(state, block)
    return new


def energy_audit(record: UpdateRecord, sigma) -> EnergyAudit:
    """Check the weighted energy balance of one update.

    With F = U^H Sigma U, e_a = U^H Sigma w_before and e_p = U^H Sigma w_after,
    the update satisfies

        ||w_after||^2_Sigma + e_a^H F^-1 e_a
            = ||w_before||^2_Sigma + e_p^H F^-1 e_p

    exactly in exact arithmetic for any Hermitian Sigma with invertible F.
    Returns the achieved residual relative to the magnitude of the terms;
    a singular F skips the audit (flag set) instead of failing.
    """
    if record.weight_error_before is None or record.weight_error_after is None:
        raise ValueError("energy audit requires weight errors (update with truth)")
    U = record.regressor
    sigma = np.asarray(sigma, dtype=complex)
    w_pre, w_post = record.weight_error_before, record.weight_error_after
    F = np.conj(U.T) @ sigma @ U
    e_a = np.conj(U.T) @ (sigma @ w_pre)
    e_p = np.conj(U.T) @ (sigma @ w_post)
    try:
        fa = np.linalg.solve(F, e_a)
        fp = np.linalg.solve(F, e_p)
    except np.linalg.LinAlgError:
        return EnergyAudit(np.nan, np.nan, np.nan, skipped=True)
    t1 = float(np.real(np.conj(w_post) @ sigma @ w_post))
    t2 = float(np.real(np.conj(e_a) @ fa))
    t3 = float(np.real(np.conj(w_pre) @ sigma @ w_pre))
    t4 = float(np.real(np.conj(e_p) @ fp))
    residual = abs((t1 + t2) - (t3 + t4))
    scale = abs(t1) + abs(t2) + abs(t3) + abs(t4)
    return EnergyAudit(residual, scale, residual / scale if scale > 0 else 0.0)
