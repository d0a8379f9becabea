"""Configuration dataclasses for the multi-instance experiments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..config import DEFAULT_EXACT_BUDGET, SolveConfig
from ..model import GdnParams
from ..support import normalize_method


DEFAULT_BENCH_METHODS = ("gdn", "greedy-dynamic", "tabucol")


@dataclass
class BenchConfig:
    """Configuration for a benchmark matrix (instances × methods).

    The ``k`` of *solve* is a placeholder: every instance runs at the
    palette given in its manifest line, or at its chromatic number when the
    line names none (see :func:`gdncolor.workflow.utils.parse_manifest`).
    """

    methods: List[str] = field(default_factory=lambda: list(DEFAULT_BENCH_METHODS))
    """Method names or aliases, normalised by :meth:`validate`."""

    solve: SolveConfig = field(default_factory=lambda: SolveConfig(k=2))
    """Template for every run; ``k`` and ``method`` are overwritten per row."""

    workers: Optional[int] = None
    """Worker processes. None → CPU count; always capped by ``GDN_THREADS``."""

    chi_budget: int = DEFAULT_EXACT_BUDGET
    """Expansion budget of the exact oracle filling the ``chi`` column; 0 disables it."""

    def validate(self) -> None:
        if not self.methods:
            raise ValueError("bench needs at least one method")
        self.methods = [normalize_method(name) for name in self.methods]
        if self.chi_budget < 0:
            raise ValueError(f"chi_budget must be non-negative, got {self.chi_budget}")


@dataclass
class DepthSweepConfig:
    """Configuration for solved-ratio-versus-depth sweeps.

    Example
    -------
    >>> config = DepthSweepConfig(depths=[2, 20], replicates=5)
    """

    depths: List[int] = field(default_factory=lambda: [2, 5, 10, 20])
    """Model depths to evaluate."""

    replicates: int = 1
    """Seed replicates per depth; replicate r runs with ``solve.seed + r``."""

    solve: SolveConfig = field(default_factory=lambda: SolveConfig(k=2))
    """Template run configuration; ``k`` comes from the corpus, ``depth`` from the sweep."""

    params: Dict[int, GdnParams] = field(default_factory=dict)
    """Params per depth, e.g. trained ones; depths left out use the default initialisation."""

    def validate(self) -> None:
        if not self.depths:
            raise ValueError("depth sweep needs at least one depth")
        if any(depth < 1 for depth in self.depths):
            raise ValueError(f"depths must be >= 1, got {self.depths}")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        for depth, params in self.params.items():
            if params.depth != depth:
                raise ValueError(f"params given for depth {depth} have {params.depth} layers")
