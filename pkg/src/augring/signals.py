"""Benchmark complex-valued signal generators and circularity diagnostics.

Three input processes are provided (a circular first-order autoregression, a
noncircular ARMA recursion driven by conjugated noise, and the chaotic Ikeda
map) plus the doubly white Gaussian noise that drives them.  Gaussian draws
use an explicit Box-Muller transform on PCG64 uniforms, so a given
(kind, parameters, seed) triple reproduces the same samples on any platform.
"""

from __future__ import annotations

import dataclasses
import enum
import json
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .seeding import rng_from

__all__ = [
    "SignalKind",
    "SignalModel",
    "ComplexSequence",
    "NoiseProfile",
    "CircularityReport",
    "complex_gaussian",
    "gen_doubly_white",
    "gen_circular_ar1",
    "gen_noncircular_arma",
    "gen_ikeda",
    "ikeda_orbit",
    "generate",
    "generate_batch",
    "estimate_circularity",
    "log_uniform_profile",
    "write_sequence_csv",
]


class SignalKind(str, enum.Enum):
    DOUBLY_WHITE = "doubly_white"
    CIRCULAR_AR1 = "circular_ar1"
    NONCIRCULAR_ARMA = "noncircular_arma"
    IKEDA = "ikeda"


# Default recursion constants for the benchmark processes.
AR1_COEFF = 0.5
# x(t) = c1*x(t-1) + c2*q(t) + c3*conj(q(t)) + c4*q(t-1) + c5*conj(q(t-1))
ARMA_COEFFS = (0.5, 2.0, 0.5, 1.0, 0.9)
IKEDA_GAIN = 0.9
IKEDA_PHASE_OFFSET = 0.4
IKEDA_PHASE_SCALE = 6.0


@dataclasses.dataclass(frozen=True)
class SignalModel:
    """Identity of one generator: kind, recursion parameters and seed.

    Identical (kind, parameters, seed) triples produce bit-identical output.
    """

    kind: SignalKind
    seed: int
    ar_coeff: float = AR1_COEFF
    arma_coeffs: tuple = ARMA_COEFFS
    ikeda_gain: float = IKEDA_GAIN
    ikeda_phase_offset: float = IKEDA_PHASE_OFFSET
    ikeda_phase_scale: float = IKEDA_PHASE_SCALE
    variance: float = 1.0  # doubly_white only

    def metadata(self) -> dict:
        meta = {"kind": self.kind.value, "seed": int(self.seed)}
        if self.kind is SignalKind.DOUBLY_WHITE:
            meta["variance"] = self.variance
        elif self.kind is SignalKind.CIRCULAR_AR1:
            meta["ar_coeff"] = self.ar_coeff
        elif self.kind is SignalKind.NONCIRCULAR_ARMA:
            meta["arma_coeffs"] = list(self.arma_coeffs)
        else:
            meta["gain"] = self.ikeda_gain
            meta["phase_offset"] = self.ikeda_phase_offset
            meta["phase_scale"] = self.ikeda_phase_scale
        return meta


@dataclasses.dataclass(eq=False)
class ComplexSequence:
    """A finite run of complex samples plus the model that produced it."""

    samples: np.ndarray
    model: SignalModel
    burn_in: int = 0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if self.samples.size and not np.all(np.isfinite(self.samples.view(np.float64))):
            raise ValueError("generator produced non-finite samples")

    def __len__(self) -> int:
        return self.samples.size


@dataclasses.dataclass(eq=False)
class NoiseProfile:
    """Per-node measurement-noise powers and the seed they were drawn from."""

    variances: np.ndarray
    seed: int = 0

    def __post_init__(self):
        self.variances = np.asarray(self.variances, dtype=float)
        # Zero is tolerated so noiseless diagnostic runs are expressible.
        if np.any(self.variances < 0) or not np.all(np.isfinite(self.variances)):
            raise ValueError("noise variances must be finite and nonnegative")


@dataclasses.dataclass(frozen=True)
class CircularityReport:
    """Lag-0 second-order summary: covariance, pseudocovariance, |p|/c."""

    covariance: complex
    pseudocovariance: complex
    coefficient: float


def complex_gaussian(rng, size, variance: float = 1.0) -> np.ndarray:
    """Doubly white complex Gaussian draws via Box-Muller.

    Consumes two uniform blocks (u1 then u2).  Real and imaginary parts are
    independent N(0, variance/2), so E[v conj(v)] = variance and E[v v] = 0.
    """
    u1 = rng.random(size)
    u2 = rng.random(size)
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    phase = (2.0 * np.pi) * u2
    z = radius * np.cos(phase) + 1j * (radius * np.sin(phase))
    return np.sqrt(variance / 2.0) * z


def gen_doubly_white(n: int, variance: float, seed) -> ComplexSequence:
    """i.i.d. doubly white complex Gaussian noise with the given power."""
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    model = SignalModel(SignalKind.DOUBLY_WHITE, seed=_seed_int(seed), variance=variance)
    samples = complex_gaussian(rng_from(seed), n, variance)
    return ComplexSequence(samples, model)


def gen_circular_ar1(n: int, seed, burn_in: int = 0) -> ComplexSequence:
    """Circular AR(1): x(t) = a*x(t-1) + q(t), q doubly white with unit power.

    x(0) is drawn from the stationary distribution (power 1/(1-a^2)); the
    stream layout is one stationary draw followed by the driving noise block.
    """
    model = SignalModel(SignalKind.CIRCULAR_AR1, seed=_seed_int(seed))
    return _finish(model, _ar1_rows(rng_from(seed), 1, n + burn_in, model.ar_coeff), n, burn_in)


def gen_noncircular_arma(n: int, seed, burn_in: int = 0) -> ComplexSequence:
    """Noncircular ARMA recursion with conjugate driving terms.

    x(t) = c1*x(t-1) + c2*q(t) + c3*q*(t) + c4*q(t-1) + c5*q*(t-1) with
    x(-1) = q(-1) = 0, so x(0) = c2*q(0) + c3*q*(0).
    """
    model = SignalModel(SignalKind.NONCIRCULAR_ARMA, seed=_seed_int(seed))
    rows = _arma_rows(rng_from(seed), 1, n + burn_in, model.arma_coeffs)
    return _finish(model, rows, n, burn_in)


def gen_ikeda(n: int, seed, burn_in: int = 0, init=None) -> ComplexSequence:
    """Chaotic Ikeda map emitted as x(t) = a(t) + j b(t).

    a(t) = 1 + gain*(a(t-1)cos r - b(t-1)sin r),
    b(t) =     gain*(a(t-1)sin r + b(t-1)cos r),
    r    = offset - scale/(1 + a(t-1)^2 + b(t-1)^2).

    The initial point is drawn uniformly from (0,1)^2 (or forced via `init`)
    and is not emitted; the first sample is one iteration past it.
    """
    model = SignalModel(SignalKind.IKEDA, seed=_seed_int(seed))
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    if init is None:
        a0, b0 = rng_from(seed).random(2)
    else:
        a0, b0 = float(init[0]), float(init[1])
    rows = ikeda_orbit(
        np.array([a0]), np.array([b0]), n + burn_in,
        model.ikeda_gain, model.ikeda_phase_offset, model.ikeda_phase_scale,
    )
    return _finish(model, rows, n, burn_in)


def ikeda_orbit(a, b, n, gain=IKEDA_GAIN, offset=IKEDA_PHASE_OFFSET,
                scale=IKEDA_PHASE_SCALE) -> np.ndarray:
    """Iterate the Ikeda map from a batch of initial states.

    Returns an (len(a), n) complex array; the initial state itself is not
    included in the output.
    """
    a = np.asarray(a, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    out = np.empty((a.size, n), dtype=np.complex128)
    for t in range(n):
        r = offset - scale / (1.0 + a * a + b * b)
        cr, sr = np.cos(r), np.sin(r)
        a, b = 1.0 + gain * (a * cr - b * sr), gain * (a * sr + b * cr)
        out[:, t] = a + 1j * b
    return out


def generate(model: SignalModel, n: int, burn_in: int = 0) -> ComplexSequence:
    """Dispatch on model.kind; same output as the matching gen_* function."""
    if model.kind is SignalKind.DOUBLY_WHITE:
        return gen_doubly_white(n, model.variance, model.seed)
    if model.kind is SignalKind.CIRCULAR_AR1:
        return gen_circular_ar1(n, model.seed, burn_in)
    if model.kind is SignalKind.NONCIRCULAR_ARMA:
        return gen_noncircular_arma(n, model.seed, burn_in)
    if model.kind is SignalKind.IKEDA:
        return gen_ikeda(n, model.seed, burn_in)
    raise ValueError(f"unknown signal kind: {model.kind}")


def generate_batch(model: SignalModel, rows: int, n: int, burn_in: int = 0,
                   rng=None) -> np.ndarray:
    """Independent realizations as a (rows, n) array from a single stream.

    Used by Monte Carlo moment estimation, where rows only need to be
    mutually independent, not individually re-generable.
    """
    if rows < 0 or n < 0:
        raise ValueError("rows and sample count must be nonnegative")
    rng = rng_from(model.seed) if rng is None else rng
    total = n + burn_in
    if model.kind is SignalKind.DOUBLY_WHITE:
        out = complex_gaussian(rng, (rows, total), model.variance)
    elif model.kind is SignalKind.CIRCULAR_AR1:
        out = _ar1_rows(rng, rows, total, model.ar_coeff)
    elif model.kind is SignalKind.NONCIRCULAR_ARMA:
        out = _arma_rows(rng, rows, total, model.arma_coeffs)
    elif model.kind is SignalKind.IKEDA:
        inits = rng.random((rows, 2))
        out = ikeda_orbit(inits[:, 0], inits[:, 1], total, model.ikeda_gain,
                          model.ikeda_phase_offset, model.ikeda_phase_scale)
    else:
        raise ValueError(f"unknown signal kind: {model.kind}")
    return out[:, burn_in:]


def estimate_circularity(seq) -> CircularityReport:
    """Sample covariance c = mean(x conj(x)), pseudocovariance p = mean(x x).

    The coefficient |p|/c is ~0 for circular (proper) processes and grows
    with improperness.  Means are not centred.
    """
    x = seq.samples if isinstance(seq, ComplexSequence) else np.asarray(seq, dtype=complex)
    if x.size == 0:
        raise ValueError("cannot estimate circularity of an empty sequence")
    c = complex(np.mean(x * np.conj(x)))
    p = complex(np.mean(x * x))
    return CircularityReport(c, p, abs(p) / c.real)


def log_uniform_profile(n_nodes: int, seed, low: float = 1e-3,
                        high: float = 1e-2) -> NoiseProfile:
    """Draw per-node noise powers log-uniformly from [low, high]."""
    if n_nodes < 1:
        raise ValueError("need at least one node")
    if not (0 < low <= high):
        raise ValueError("need 0 < low <= high")
    rng = rng_from(seed)
    variances = np.exp(rng.uniform(np.log(low), np.log(high), n_nodes))
    return NoiseProfile(variances, seed=_seed_int(seed))


def write_sequence_csv(seq: ComplexSequence, path) -> Path:
    """Write (t, re, im) rows preceded by a '#'-prefixed JSON metadata line."""
    path = Path(path)
    meta = dict(seq.model.metadata(), n=len(seq), burn_in=seq.burn_in)
    lines = ["# " + json.dumps(meta, sort_keys=True), "t,re,im"]
    for t, v in enumerate(seq.samples):
        lines.append(f"{t},{float(v.real)!r},{float(v.imag)!r}")
    path.write_text("\n".join(lines) + "\n")
    return path


def _seed_int(seed) -> int:
    return int(seed) if not isinstance(seed, np.random.Generator) else -1


def _finish(model, rows, n, burn_in) -> ComplexSequence:
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    return ComplexSequence(rows[0, burn_in:], model, burn_in)


def _ar1_rows(rng, rows, total, a) -> np.ndarray:
    """Stationary-start AR(1) rows; one x(0) draw then the noise block."""
    x0 = complex_gaussian(rng, rows, 1.0 / (1.0 - a * a))
    if total == 0:
        return np.empty((rows, 0), dtype=np.complex128)
    q = complex_gaussian(rng, (rows, total - 1))
    out = np.empty((rows, total), dtype=np.complex128)
    out[:, 0] = x0
    if total > 1:
        out[:, 1:] = lfilter([1.0], [1.0, -a], q, axis=1, zi=(a * x0)[:, None])[0]
    return out


def _arma_rows(rng, rows, total, coeffs) -> np.ndarray:
    c1, c2, c3, c4, c5 = coeffs
    q = complex_gaussian(rng, (rows, total))
    u = c2 * q + c3 * np.conj(q)
    if total > 1:
        u[:, 1:] += c4 * q[:, :-1] + c5 * np.conj(q[:, :-1])
    return lfilter([1.0], [1.0, -c1], u, axis=1)
