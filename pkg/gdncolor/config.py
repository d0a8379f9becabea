"""Configuration objects for gdncolor runs."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from .support import normalize_method


THREADS_ENV = "GDN_THREADS"

DEFAULT_DEPTH = 20
DEFAULT_RESTARTS = 10
DEFAULT_EXACT_BUDGET = 10_000_000


@dataclass
class LossConfig:
    """Margin-loss settings."""

    margin: float = 1.0
    """Hinge margin m; adjacent embeddings closer than this are penalised."""

    def validate(self) -> None:
        if not self.margin > 0:
            raise ValueError(f"margin must be positive, got {self.margin}")


@dataclass
class AdamConfig:
    """Adam hyperparameters; only the learning rate departs from convention."""

    lr: float = 0.001
    b1: float = 0.9
    b2: float = 0.999
    eps: float = 1e-8

    def validate(self) -> None:
        if self.lr <= 0:
            raise ValueError(f"learning rate must be positive, got {self.lr}")
        if not (0.0 <= self.b1 < 1.0 and 0.0 <= self.b2 < 1.0):
            raise ValueError(f"Adam betas must lie in [0, 1), got b1={self.b1}, b2={self.b2}")


@dataclass
class TrainConfig:
    """Top-level training configuration.

    Example
    -------
    >>> config = TrainConfig(epochs=10, depth=20, loss=LossConfig(margin=1.0))
    """

    epochs: int = 10
    seed: int = 0
    depth: int = DEFAULT_DEPTH
    """Layers of freshly initialised params when no starting params are given."""

    calibrate: bool = True
    """Rescale fresh params so edge distances start near the margin."""

    aggregator: str = "sum"
    loss: LossConfig = field(default_factory=LossConfig)
    adam: AdamConfig = field(default_factory=AdamConfig)

    def validate(self) -> None:
        if self.epochs < 0:
            raise ValueError(f"epochs must be non-negative, got {self.epochs}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        self.loss.validate()
        self.adam.validate()


@dataclass
class TabuConfig:
    """Tabucol settings."""

    iteration_limit: Optional[int] = None
    """Single-move budget. None → 1000 × n."""

    tenure_factor: float = 0.6
    """Tenure grows with the current conflict count (conflicted edges): factor × that count."""

    tenure_random: int = 9
    """Upper bound of the uniform random tenure component (inclusive)."""

    seed: int = 0

    def resolve_iterations(self, n: int) -> int:
        limit = self.iteration_limit if self.iteration_limit is not None else 1000 * max(n, 1)
        if limit < 1:
            raise ValueError(f"iteration_limit must be >= 1, got {limit}")
        return limit


@dataclass
class BpConfig:
    """Belief-propagation settings."""

    sweeps: int = 100
    damping: float = 0.5
    """Weight of the previous message in the damped update; must lie in [0, 1)."""

    def validate(self) -> None:
        if self.sweeps < 1:
            raise ValueError(f"sweeps must be >= 1, got {self.sweeps}")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError(f"damping must lie in [0, 1), got {self.damping}")


@dataclass
class SolveConfig:
    """User-facing configuration for one colouring run."""

    k: int
    depth: int = DEFAULT_DEPTH
    restarts: int = DEFAULT_RESTARTS
    seed: int = 0
    pre: bool = False
    """Peel nodes of degree < k before solving and reinsert them afterwards."""

    post: bool = False
    """Run recolour/swap local search on every restart's result."""

    hybrid: bool = False
    """Complete a conflicted result exactly from its thresholded beliefs."""

    hybrid_temperature: float = 0.1
    """Softmax temperature applied to unit-norm embedding rows before thresholding."""

    params_path: Optional[Path] = None
    """Trained params file; None → the default initialisation."""

    method: str = "gdn"
    aggregator: str = "sum"
    attribute_mode: str = "random"
    pin_clamp: bool = False
    """Reset pinned rows after every layer instead of only at initialisation."""

    exact_budget: int = DEFAULT_EXACT_BUDGET
    tabu: TabuConfig = field(default_factory=TabuConfig)
    bp: BpConfig = field(default_factory=BpConfig)

    def validate(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.exact_budget < 1:
            raise ValueError(f"exact_budget must be >= 1, got {self.exact_budget}")
        if not self.hybrid_temperature > 0:
            raise ValueError(f"hybrid_temperature must be positive, got {self.hybrid_temperature}")
        self.method = normalize_method(self.method)
        self.bp.validate()

    @classmethod
    def from_kwargs(cls, **kwargs: object) -> "SolveConfig":
        """Helper for creating configs from keyword arguments."""

        return cls(**kwargs)  # type: ignore[arg-type]


def resolve_worker_count(requested: Optional[int] = None, env: Optional[Dict[str, str]] = None) -> int:
    """Worker count from the explicit request, capped by ``GDN_THREADS``."""
    env = os.environ if env is None else env
    workers = requested if requested is not None else (os.cpu_count() or 1)

    raw = env.get(THREADS_ENV, "").strip()
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
        if cap < 1:
            raise ValueError(f"{THREADS_ENV} must be positive, got {cap}")
        workers = min(workers, cap)

    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    return workers
