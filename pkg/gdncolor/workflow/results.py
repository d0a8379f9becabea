"""Result containers for the multi-instance experiments."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from ..results import SolveReport


BENCH_COLUMNS = (
    "instance",
    "method",
    "status",
    "n",
    "m",
    "k",
    "chi",
    "conflicts",
    "solved_ratio",
    "colors_used",
    "restarts_used",
    "wall_ms",
    "seed",
    "params_fingerprint",
    "peeled",
    "error",
)


@dataclass
class BenchRow:
    """One (instance, method) cell of a benchmark matrix.

    Attributes
    ----------
    status:
        ``"ok"`` when the method ran, ``"failed"`` when the instance could
        not be read or the run raised; *error* then holds the message.
    chi:
        Chromatic number from the exact oracle, None when skipped or over
        budget.
    """

    instance: str
    method: str
    status: str = "ok"
    report: Optional[SolveReport] = None
    chi: Optional[int] = None
    error: str = ""

    def to_record(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {column: None for column in BENCH_COLUMNS}
        if self.report is not None:
            record.update({key: value for key, value in self.report.to_dict().items() if key in record})
        record.update(instance=self.instance, method=self.method, status=self.status, chi=self.chi, error=self.error)
        return record


@dataclass
class BenchReport:
    """Benchmark rows in manifest order, methods in configured order."""

    rows: List[BenchRow] = field(default_factory=list)

    def records(self) -> List[Dict[str, Any]]:
        return [row.to_record() for row in self.rows]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(BENCH_COLUMNS), lineterminator="\n")
        writer.writeheader()
        for record in self.records():
            writer.writerow({key: "" if value is None else value for key, value in record.items()})
        return buffer.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.records(), indent=2, sort_keys=True)

    def write(self, path: Union[str, Path]) -> Path:
        """Write JSON for a ``.json`` suffix, CSV otherwise."""

        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        text = self.to_json() if target.suffix.lower() == ".json" else self.to_csv()
        target.write_text(text, encoding="utf-8")
        return target

    @property
    def failed(self) -> List[BenchRow]:
        return [row for row in self.rows if row.status != "ok"]


@dataclass
class DepthSweepResult:
    """Mean solved ratio per depth.

    ``per_replicate[depth]`` lists the corpus-mean solved ratio of every
    seed replicate at that depth.
    """

    depths: List[int]
    mean_solved_ratio: List[float]
    per_replicate: Dict[int, List[float]] = field(default_factory=dict)

    def table(self) -> List[Tuple[int, float]]:
        return list(zip(self.depths, self.mean_solved_ratio))

    def to_json(self) -> str:
        return json.dumps(
            {"rows": [{"depth": d, "mean_solved_ratio": r} for d, r in self.table()]},
            sort_keys=True,
        )


@dataclass
class FixedColorResult:
    """Outcome of a pinned-colour experiment.

    Attributes
    ----------
    fixed:
        Graphs solved without conflicts while keeping the pinned colour.
    total:
        Corpus size.
    pins:
        ``(node, colour)`` drawn for each graph, in corpus order.
    outcomes:
        Per-graph success flags, in corpus order.
    """

    fixed: int
    total: int
    pins: List[Tuple[int, int]] = field(default_factory=list)
    outcomes: List[bool] = field(default_factory=list)

    @property
    def ratio(self) -> float:
        return self.fixed / self.total if self.total else 0.0
