"""Ring topology, widely linear observation streams, augmented covariance.

Each node k observes d_k(i) = x_{k,i}^T h + x_{k,i}^H g + v_k(i), where
x_{k,i} stacks the L most recent samples of the node's scalar input process
and v_k is doubly white measurement noise.  The regressor matrix for the
affine projection update gathers the T most recent input vectors.
"""

from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from .seeding import NOISE_STREAM, derive_seed
from .signals import ComplexSequence, NoiseProfile, SignalModel, gen_doubly_white, generate

__all__ = [
    "NetworkConfig",
    "RegressorBlock",
    "AugmentedCovariance",
    "build_regressors",
    "generate_observations",
    "widely_linear_output",
    "model_residual",
    "estimate_augmented_covariance",
]


@dataclasses.dataclass(eq=False)
class NetworkConfig:
    """Structure and hyperparameters of one incremental ring network."""

    n_nodes: int
    filter_length: int
    projection_order: int
    models: tuple
    noise: NoiseProfile
    true_h: np.ndarray
    true_g: np.ndarray
    step_sizes: np.ndarray
    regularization: float
    ring_order: tuple = None

    def __post_init__(self):
        self.true_h = np.asarray(self.true_h, dtype=np.complex128)
        self.true_g = np.asarray(self.true_g, dtype=np.complex128)
        self.step_sizes = np.asarray(self.step_sizes, dtype=float)
        if self.ring_order is None:
            self.ring_order = tuple(range(self.n_nodes))
        else:
            self.ring_order = tuple(int(k) for k in self.ring_order)
        self.validate()

    def validate(self):
        if self.n_nodes < 1:
            raise ValueError("need at least one node")
        if self.filter_length < 1 or self.projection_order < 1:
            raise ValueError("filter length and projection order must be >= 1")
        if self.regularization <= 0:
            raise ValueError("regularization must be positive")
        if len(self.models) != self.n_nodes:
            raise ValueError("need one signal model per node")
        if self.noise.variances.size != self.n_nodes:
            raise ValueError("need one noise variance per node")
        if self.true_h.shape != (self.filter_length,) or self.true_g.shape != (self.filter_length,):
            raise ValueError("true weights must be length-L vectors")
        if self.step_sizes.shape != (self.n_nodes,) or np.any(self.step_sizes < 0):
            raise ValueError("need one nonnegative step size per node")
        if sorted(self.ring_order) != list(range(self.n_nodes)):
            raise ValueError("ring order must be a permutation of the node indices")

    @property
    def augmented_true(self) -> np.ndarray:
        return np.concatenate([self.true_h, self.true_g])


@dataclasses.dataclass(eq=False)
class RegressorBlock:
    """One node's data for a single update: {X, d} plus the noise for audits.

    Column j of X is the input vector at time i-j (newest first); d holds the
    matching desired samples and v the noise values that entered them.
    """

    X: np.ndarray
    d: np.ndarray
    v: np.ndarray
    node: int = 0
    time: int = 0


@dataclasses.dataclass(eq=False)
class AugmentedCovariance:
    """Covariance C = E[x x^H] and pseudocovariance P = E[x x^T] of a regressor."""

    covariance: np.ndarray
    pseudocovariance: np.ndarray
    samples: int
    underdetermined: bool = False

    @property
    def assembled(self) -> np.ndarray:
        """The 2L x 2L block matrix [[C, P], [P*, C*]] for (x, x*) stacked."""
        C, P = self.covariance, self.pseudocovariance
        return np.block([[C, P], [np.conj(P), np.conj(C)]])

    @property
    def noncircularity(self) -> float:
        """Frobenius-norm ratio ||P|| / ||C||."""
        return float(np.linalg.norm(self.pseudocovariance) / np.linalg.norm(self.covariance))


def build_regressors(samples, filter_length: int, projection_order: int,
                     time: int, pad: bool = True) -> np.ndarray:
    """Assemble the L x T regressor matrix at a given time index.

    Entry (l, j) is x(time - j - l); samples before t=0 are zero when padding
    is enabled, otherwise a partially populated window raises.
    """
    x = samples.samples if isinstance(samples, ComplexSequence) else np.asarray(samples, dtype=complex)
    L, T = int(filter_length), int(projection_order)
    if L < 1 or T < 1:
        raise ValueError("filter length and projection order must be >= 1")
    if time < 0 or time >= x.size:
        raise IndexError(f"time {time} outside sequence of length {x.size}")
    lo = time - (L + T - 2)
    if lo < 0 and not pad:
        raise ValueError("window reaches before t=0 and padding is disabled")
    window = np.concatenate([np.zeros(max(0, -lo), dtype=complex), x[max(0, lo):time + 1]])[::-1]
    lag = np.arange(L)[:, None] + np.arange(T)[None, :]
    return window[lag]


def widely_linear_output(x, true_h, true_g) -> np.ndarray:
    """Noise-free model output: sum_l h_l x(t-l) + g_l conj(x(t-l)), x(t<0)=0.

    Accumulates over l in ascending order; model_residual reassembles the same
    sum so that generated observations reproduce exactly.
    """
    x = np.asarray(x, dtype=complex)
    true_h = np.asarray(true_h, dtype=complex)
    true_g = np.asarray(true_g, dtype=complex)
    L, n = true_h.size, x.shape[-1]
    xpad = np.concatenate([np.zeros(x.shape[:-1] + (L - 1,), dtype=complex), x], axis=-1)
    acc = np.zeros(x.shape, dtype=complex)
    for l in range(L):
        w = xpad[..., L - 1 - l:L - 1 - l + n]
        acc = acc + (true_h[l] * w + true_g[l] * np.conj(w))
    return acc


def generate_observations(config: NetworkConfig, node: int, horizon: int,
                          burn_in: int = 0, noise_seed=None) -> list:
    """Stream of per-time RegressorBlocks for one node under the model.

    d(i) collects the widely linear output plus the node's noise; blocks are
    zero-padded at start-up so every time index from 0 is usable.
    """
    model: SignalModel = config.models[node]
    x = generate(model, horizon, burn_in).samples
    if noise_seed is None:
        noise_seed = derive_seed(config.noise.seed, NOISE_STREAM, node)
    v = gen_doubly_white(horizon, float(config.noise.variances[node]), noise_seed).samples
    d = widely_linear_output(x, config.true_h, config.true_g) + v

    T = config.projection_order
    dpad = np.concatenate([np.zeros(T - 1, dtype=complex), d])
    vpad = np.concatenate([np.zeros(T - 1, dtype=complex), v])
    taps = np.arange(T)
    blocks = []
    for i in range(horizon):
        X = build_regressors(x, config.filter_length, T, i)
        blocks.append(RegressorBlock(
            X=X, d=dpad[i + T - 1 - taps], v=vpad[i + T - 1 - taps], node=node, time=i,
        ))
    return blocks


def model_residual(block: RegressorBlock, true_h, true_g) -> np.ndarray:
    """d - (X^T h + X^H g + v), reassembled with the generator's summation order.

    Exactly zero (bit level) on blocks from generate_observations.
    """
    true_h = np.asarray(true_h, dtype=complex)
    true_g = np.asarray(true_g, dtype=complex)
    acc = np.zeros(block.d.shape, dtype=complex)
    for l in range(true_h.size):
        row = block.X[l]
        acc = acc + (true_h[l] * row + true_g[l] * np.conj(row))
    return block.d - (acc + block.v)


def estimate_augmented_covariance(source, filter_length: int = None,
                                  samples: int = None) -> AugmentedCovariance:
    """Sample-average augmented covariance from a sequence or regressor blocks.

    A sequence contributes sliding L-windows at consecutive times; blocks
    contribute every column of their X matrices.  Fewer draws than L sets the
    `underdetermined` flag (rank-deficient estimate) without failing.
    """
    blocks_input = isinstance(source, (list, tuple)) and len(source) > 0 and isinstance(source[0], RegressorBlock)
    if not blocks_input:
        x = source.samples if isinstance(source, ComplexSequence) else np.asarray(source, dtype=complex)
        if filter_length is None:
            raise ValueError("filter_length is required for sequence input")
        L = int(filter_length)
        available = x.size - L + 1
        if available < 1:
            raise ValueError("sequence shorter than one regressor window")
        m = available if samples is None else min(int(samples), available)
        idx = (L - 1 + np.arange(m))[:, None] - np.arange(L)[None, :]
        draws = x[idx].T  # (L, m), column = one regressor draw
    else:
        blocks = list(source)
        if not blocks:
            raise ValueError("no regressor blocks given")
        draws = np.concatenate([b.X for b in blocks], axis=1)
        if samples is not None:
            draws = draws[:, :int(samples)]
        L = draws.shape[0]

    m = draws.shape[1]
    aug = np.concatenate([draws, np.conj(draws)], axis=0)
    assembled = (aug @ np.conj(aug.T)) / m
    return AugmentedCovariance(
        covariance=assembled[:L, :L],
        pseudocovariance=assembled[:L, L:],
        samples=m,
        underdetermined=m < L,
    )
