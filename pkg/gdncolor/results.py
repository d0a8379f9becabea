"""Result containers for colouring runs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple


@dataclass
class ConflictReport:
    """Monochromatic-edge accounting for one assignment."""

    conflicts: int
    solved_ratio: float
    conflict_edges: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def is_proper(self) -> bool:
        return self.conflicts == 0


@dataclass
class SolveReport:
    """Structured output of one solver invocation on one instance."""

    instance: str
    n: int
    m: int
    k: int
    method: str
    conflicts: int
    solved_ratio: float
    colors_used: int
    restarts_used: int
    wall_ms: float
    seed: int
    params_fingerprint: Optional[str] = None
    peeled: int = 0
    hybrid_reduction: Optional[float] = None
    hybrid_status: Optional[str] = None

    def ensure_consistent(self, recomputed_conflicts: int) -> None:
        """Raise if the stored conflict count disagrees with a recount."""

        if recomputed_conflicts != self.conflicts:
            raise ValueError(
                f"report claims {self.conflicts} conflicts but the assignment has "
                f"{recomputed_conflicts}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)


@dataclass
class TrainingReport:
    """Reproducibility record of a training run."""

    corpus: Dict[str, Any]
    seed: int
    epochs: int
    epoch_losses: List[float]
    final_params: Dict[str, Any]

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(asdict(self), **kwargs)
