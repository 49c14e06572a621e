"""Experiment configuration: JSON schema, validation, network construction.

A single JSON file describes a full experiment (network, signal models,
horizon, trials, seeds, sweep lists, output paths).  All randomness derives
from the master seed, so a config file plus seed pins every output byte.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from pathlib import Path

import numpy as np

from .seeding import PROFILE_STREAM, SIGNAL_STREAM, derive_seed
from .network import NetworkConfig
from .signals import NoiseProfile, SignalKind, SignalModel, log_uniform_profile

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "config_from_dict"]

SCHEMA_VERSION = 1

SIGNAL_KINDS = tuple(k.value for k in SignalKind if k is not SignalKind.DOUBLY_WHITE)
DEFAULT_BURN_IN = {"circular_ar1": 0, "noncircular_arma": 0, "ikeda": 100}


class ConfigError(ValueError):
    """The configuration file is malformed or violates an invariant."""


@dataclasses.dataclass(eq=False)
class ExperimentConfig:
    """Resolved experiment description (defaults applied, profile drawn)."""

    seed: int = 2024
    trials: int = 100
    horizon: int = 2000
    signals: tuple = ("circular_ar1", "noncircular_arma", "ikeda")

    n_nodes: int = 10
    filter_length: int = 4
    projection_order: int = 2
    step_sizes: tuple = None          # resolved to one value per node
    regularization: float = 1e-3
    ring_order: tuple = None
    true_h: tuple = None              # complex entries
    true_g: tuple = None
    noise_variances: tuple = None     # resolved per node
    noise_seed: int = None
    noise_low: float = 1e-3
    noise_high: float = 1e-2

    burn_in: dict = None
    moment_samples: int = 10000
    moment_burn_in: int = 100
    kron_moment: str = "full"
    noise_variant: str = "noise_matrix"

    sweep_projection_orders: tuple = ()
    sweep_step_sizes: tuple = ()

    output_dir: str = "out"
    output_format: str = "csv"

    steady_window: int = 50
    steady_span: int = 100
    steady_tol_db: float = 0.1

    def __post_init__(self):
        if self.step_sizes is None:
            self.step_sizes = (0.2,) * self.n_nodes
        if self.burn_in is None:
            self.burn_in = dict(DEFAULT_BURN_IN)
        if self.true_h is None:
            self.true_h = (1.0 + 0.0j,) * self.filter_length
        if self.true_g is None:
            self.true_g = (1.0 + 0.0j,) * self.filter_length
        if self.noise_seed is None:
            self.noise_seed = derive_seed(self.seed, PROFILE_STREAM)
        if self.noise_variances is None:
            profile = log_uniform_profile(self.n_nodes, self.noise_seed,
                                          self.noise_low, self.noise_high)
            self.noise_variances = tuple(float(v) for v in profile.variances)
        if self.ring_order is None:
            self.ring_order = tuple(range(self.n_nodes))
        self.validate()

    def validate(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if self.n_nodes < 1 or self.filter_length < 1 or self.projection_order < 1:
            raise ConfigError("network dimensions must be >= 1")
        if self.regularization <= 0:
            raise ConfigError("regularization must be positive")
        if not self.signals:
            raise ConfigError("at least one signal model is required")
        for name in self.signals:
            if name not in SIGNAL_KINDS:
                raise ConfigError(f"unknown signal model {name!r}; choose from {SIGNAL_KINDS}")
        if len(self.step_sizes) != self.n_nodes or any(m < 0 for m in self.step_sizes):
            raise ConfigError("need one nonnegative step size per node")
        if len(self.noise_variances) != self.n_nodes or any(v < 0 for v in self.noise_variances):
            raise ConfigError("need one nonnegative noise variance per node")
        if sorted(self.ring_order) != list(range(self.n_nodes)):
            raise ConfigError("ring_order must be a permutation of 0..N-1")
        if len(self.true_h) != self.filter_length or len(self.true_g) != self.filter_length:
            raise ConfigError("true weights must have filter_length entries")
        if self.kron_moment not in ("full", "decoupled"):
            raise ConfigError("kron_moment must be 'full' or 'decoupled'")
        if self.noise_variant not in ("noise_matrix", "d_squared"):
            raise ConfigError("noise_variant must be 'noise_matrix' or 'd_squared'")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("output format must be 'csv' or 'json'")
        if self.moment_samples < 1:
            raise ConfigError("moment_samples must be >= 1")
        if any(t < 1 for t in self.sweep_projection_orders):
            raise ConfigError("sweep projection orders must be >= 1")
        if self.steady_window < 1 or self.steady_span < 1:
            raise ConfigError("steady-state window and span must be >= 1")

    # -- derived objects ---------------------------------------------------

    def network(self, signal: str, projection_order: int = None,
                step_scale: float = 1.0) -> NetworkConfig:
        """Build the NetworkConfig for one experiment entry.

        Per-node model seeds are derived from the master seed; the simulation
        engine re-derives per-trial seeds on top of these.
        """
        kind = SignalKind(signal)
        models = tuple(
            SignalModel(kind, seed=derive_seed(self.seed, SIGNAL_STREAM, k))
            for k in range(self.n_nodes)
        )
        return NetworkConfig(
            n_nodes=self.n_nodes,
            filter_length=self.filter_length,
            projection_order=self.projection_order if projection_order is None else int(projection_order),
            models=models,
            noise=NoiseProfile(np.asarray(self.noise_variances), seed=self.noise_seed),
            true_h=np.asarray(self.true_h, dtype=complex),
            true_g=np.asarray(self.true_g, dtype=complex),
            step_sizes=step_scale * np.asarray(self.step_sizes, dtype=float),
            regularization=self.regularization,
            ring_order=self.ring_order,
        )

    def signal_burn_in(self, signal: str) -> int:
        return int(self.burn_in.get(signal, 0))

    @property
    def warmup(self) -> int:
        """Start-up cycles excluded from steady-state statistics."""
        return self.filter_length + self.projection_order

    # -- serialization -----------------------------------------------------

    def echo(self) -> dict:
        """Canonical resolved form: defaults applied, profile made explicit."""
        return {
            "schema_version": SCHEMA_VERSION,
            "seed": int(self.seed),
            "trials": int(self.trials),
            "horizon": int(self.horizon),
            "signals": list(self.signals),
            "network": {
                "nodes": self.n_nodes,
                "filter_length": self.filter_length,
                "projection_order": self.projection_order,
                "step_sizes": [float(m) for m in self.step_sizes],
                "regularization": float(self.regularization),
                "ring_order": list(self.ring_order),
                "true_h": [[float(w.real), float(w.imag)] for w in map(complex, self.true_h)],
                "true_g": [[float(w.real), float(w.imag)] for w in map(complex, self.true_g)],
                "noise": {
                    "variances": [float(v) for v in self.noise_variances],
                    "seed": int(self.noise_seed),
                },
            },
            "burn_in": {k: int(v) for k, v in sorted(self.burn_in.items())},
            "theory": {
                "moment_samples": int(self.moment_samples),
                "moment_burn_in": int(self.moment_burn_in),
                "kron_moment": self.kron_moment,
                "noise_variant": self.noise_variant,
            },
            "sweep": {
                "projection_orders": [int(t) for t in self.sweep_projection_orders],
                "step_sizes": [float(m) for m in self.sweep_step_sizes],
            },
            "output": {"directory": self.output_dir, "format": self.output_format},
            "steady_state": {
                "window": int(self.steady_window),
                "span": int(self.steady_span),
                "tol_db": float(self.steady_tol_db),
            },
        }

    def hash(self) -> str:
        blob = json.dumps(self.echo(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def load_config(path, **overrides) -> ExperimentConfig:
    """Parse and validate a JSON config file; keyword overrides win."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw, **overrides)


def config_from_dict(raw: dict, **overrides) -> ExperimentConfig:
    """Build an ExperimentConfig from a parsed JSON document."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version}; expected {SCHEMA_VERSION}")

    net = raw.get("network", {})
    noise = net.get("noise", {})
    theory = raw.get("theory", {})
    sweep = raw.get("sweep", {})
    output = raw.get("output", {})
    steady = raw.get("steady_state", {})

    kwargs = {}
    _put(kwargs, "seed", raw.get("seed"), int)
    _put(kwargs, "trials", raw.get("trials"), int)
    _put(kwargs, "horizon", raw.get("horizon"), int)
    signals = raw.get("signals", raw.get("signal"))
    if signals is not None:
        kwargs["signals"] = (signals,) if isinstance(signals, str) else tuple(signals)

    _put(kwargs, "n_nodes", net.get("nodes"), int)
    _put(kwargs, "filter_length", net.get("filter_length"), int)
    _put(kwargs, "projection_order", net.get("projection_order"), int)
    _put(kwargs, "regularization", net.get("regularization"), float)
    if net.get("ring_order") is not None:
        kwargs["ring_order"] = tuple(int(k) for k in net["ring_order"])

    nodes = kwargs.get("n_nodes", 10)
    length = kwargs.get("filter_length", 4)
    mu = net.get("step_size", net.get("step_sizes"))
    if mu is not None:
        kwargs["step_sizes"] = tuple([float(mu)] * nodes) if np.isscalar(mu) \
            else tuple(float(m) for m in mu)
    for key in ("true_h", "true_g"):
        if net.get(key) is not None:
            kwargs[key] = _parse_weights(net[key], length, key)

    if noise.get("variances") is not None:
        kwargs["noise_variances"] = tuple(float(v) for v in noise["variances"])
    _put(kwargs, "noise_seed", noise.get("seed"), int)
    _put(kwargs, "noise_low", noise.get("low"), float)
    _put(kwargs, "noise_high", noise.get("high"), float)

    if raw.get("burn_in") is not None:
        burn = dict(DEFAULT_BURN_IN)
        burn.update({str(k): int(v) for k, v in raw["burn_in"].items()})
        kwargs["burn_in"] = burn

    _put(kwargs, "moment_samples", theory.get("moment_samples"), int)
    _put(kwargs, "moment_burn_in", theory.get("moment_burn_in"), int)
    _put(kwargs, "kron_moment", theory.get("kron_moment"), str)
    _put(kwargs, "noise_variant", theory.get("noise_variant"), str)

    if sweep.get("projection_orders") is not None:
        kwargs["sweep_projection_orders"] = tuple(int(t) for t in sweep["projection_orders"])
    if sweep.get("step_sizes") is not None:
        kwargs["sweep_step_sizes"] = tuple(float(m) for m in sweep["step_sizes"])

    _put(kwargs, "output_dir", output.get("directory"), str)
    _put(kwargs, "output_format", output.get("format"), str)
    _put(kwargs, "steady_window", steady.get("window"), int)
    _put(kwargs, "steady_span", steady.get("span"), int)
    _put(kwargs, "steady_tol_db", steady.get("tol_db"), float)

    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _put(kwargs, key, value, cast):
    if value is not None:
        try:
            kwargs[key] = cast(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid value for {key!r}: {value!r}") from exc


def _parse_weights(entry, length, name):
    """Weights as "ones", a list of reals, or a list of [re, im] pairs."""
    if entry == "ones":
        return (1.0 + 0.0j,) * length
    if not isinstance(entry, (list, tuple)):
        raise ConfigError(f"{name} must be 'ones' or a list")
    out = []
    for item in entry:
        if isinstance(item, (list, tuple)):
            if len(item) != 2:
                raise ConfigError(f"{name} entries must be numbers or [re, im] pairs")
            out.append(complex(float(item[0]), float(item[1])))
        else:
            out.append(complex(float(item), 0.0))
    return tuple(out)
