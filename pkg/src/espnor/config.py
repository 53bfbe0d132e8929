"""Run-time configuration dataclasses and their JSON loader."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

ONE_IS_OCCUPIED = "one_is_occupied"
ZERO_IS_OCCUPIED = "zero_is_occupied"
CONVENTIONS = (ONE_IS_OCCUPIED, ZERO_IS_OCCUPIED)


class ConfigError(ValueError):
    """Raised for malformed or inconsistent run configurations."""


@dataclass(frozen=True)
class NoiseSpec:
    """Depolarizing error rates per native gate.

    ``p1`` applies to single-qubit gates, ``p2`` to each qubit addressed by a
    two-qubit gate.
    """

    p1: float = 3e-4
    p2: float = 1.5e-2

    def __post_init__(self) -> None:
        for name in ("p1", "p2"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"noise.{name} must lie in [0, 1], got {value}")

    @property
    def is_zero(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 500
    gradient_tolerance: float = 1e-6
    restarts: int = 5
    initial_parameter_scale: float = 0.1
    fd_step: float = 1e-5

    def __post_init__(self) -> None:
        if self.max_iterations < 0:
            raise ConfigError("optimizer.max_iterations must be >= 0")
        if self.restarts < 1:
            raise ConfigError("optimizer.restarts must be >= 1")
        for name in ("gradient_tolerance", "initial_parameter_scale", "fd_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"optimizer.{name} must be > 0")


@dataclass(frozen=True)
class ZneConfig:
    """Zero-noise extrapolation settings.

    ``anchor_value`` of ``None`` means ``1 / 2**n_qubits`` (the fully mixed
    frequency), resolved once the register size is known. With ``analytic``
    the exact density-matrix probabilities replace sampled frequencies.
    """

    lambdas: tuple[float, ...] = (1.0, 2.0, 3.0)
    anchor_lambda: float = 1e5
    anchor_value: float | None = None
    trajectories_per_lambda: int = 60000
    mode: str = "trajectory"
    rng_seed: int = 0
    analytic: bool = False

    def __post_init__(self) -> None:
        lambdas = tuple(float(x) for x in self.lambdas)
        object.__setattr__(self, "lambdas", lambdas)
        if len(lambdas) < 2:
            raise ConfigError("zne.lambdas needs at least two scale factors")
        if 1.0 not in lambdas:
            raise ConfigError("zne.lambdas must contain 1")
        if list(lambdas) != sorted(lambdas) or len(set(lambdas)) != len(lambdas):
            raise ConfigError("zne.lambdas must be strictly ascending")
        if min(lambdas) < 1.0:
            raise ConfigError("zne.lambdas must all be >= 1")
        if self.trajectories_per_lambda < 1:
            raise ConfigError("zne.trajectories_per_lambda must be >= 1")
        if self.mode not in ("trajectory", "density_matrix"):
            raise ConfigError(f"zne.mode must be trajectory or density_matrix, got {self.mode!r}")
        if self.analytic and self.mode != "density_matrix":
            raise ConfigError("zne.analytic requires mode density_matrix")

    def anchor_for(self, n_qubits: int) -> float:
        return 1.0 / 2**n_qubits if self.anchor_value is None else float(self.anchor_value)


@dataclass(frozen=True)
class RunConfig:
    shots: int = 40000
    rng_seed: int = 0
    occupation_convention: str = ONE_IS_OCCUPIED
    noise: NoiseSpec | None = None
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    zne: ZneConfig | None = None
    convergence_min_shots: int = 1000
    include_small_shot_range: bool = False

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if not 0 <= self.rng_seed < 2**64:
            raise ConfigError("rng_seed must be a 64-bit unsigned integer")
        if self.occupation_convention not in CONVENTIONS:
            raise ConfigError(
                f"occupation_convention must be one of {CONVENTIONS}, got {self.occupation_convention!r}"
            )

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        if self.zne is not None:
            out["zne"]["lambdas"] = list(self.zne.lambdas)
        return out


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    data = dict(data)
    unknown = set(data) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        if data.get("noise") is not None:
            data["noise"] = NoiseSpec(**data["noise"])
        if data.get("optimizer") is not None:
            data["optimizer"] = OptimizerConfig(**data["optimizer"])
        else:
            data.pop("optimizer", None)
        if data.get("zne") is not None:
            data["zne"] = ZneConfig(**data["zne"])
        return RunConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    return config_from_dict(data)
