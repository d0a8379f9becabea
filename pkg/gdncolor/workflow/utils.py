"""Utility helpers for the experiment drivers."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from ..graph import ColorAssignment
from ..results import SolveReport


@dataclass(frozen=True)
class ManifestEntry:
    """One benchmark instance: a name or path and an optional palette size."""

    source: str
    k: Optional[int] = None


def parse_manifest(text: str) -> List[ManifestEntry]:
    """Parse ``NAME_OR_PATH [K]`` lines; ``#`` starts a comment.

    Raises
    ------
    ValueError
        If a line has more than two fields or a non-integer / non-positive K.
    """
    entries: List[ManifestEntry] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) > 2:
            raise ValueError(f"manifest line {line_number}: expected 'NAME [K]', got {raw.strip()!r}")
        k: Optional[int] = None
        if len(fields) == 2:
            try:
                k = int(fields[1])
            except ValueError:
                raise ValueError(f"manifest line {line_number}: K must be an integer, got {fields[1]!r}") from None
            if k < 1:
                raise ValueError(f"manifest line {line_number}: K must be positive, got {k}")
        entries.append(ManifestEntry(fields[0], k))
    return entries


def read_manifest(path: Union[str, Path]) -> List[ManifestEntry]:
    """Read a manifest file; relative instance paths resolve against its directory."""

    manifest_path = Path(path)
    entries = parse_manifest(manifest_path.read_text(encoding="utf-8"))
    resolved = []
    for entry in entries:
        candidate = manifest_path.parent / entry.source
        source = str(candidate) if candidate.is_file() else entry.source
        resolved.append(ManifestEntry(source, entry.k))
    return resolved


def instance_name(source: str) -> str:
    return Path(source).stem or source


def mean_solved_ratio(reports: Iterable[SolveReport]) -> float:
    """Mean of ``solved_ratio`` over *reports*."""

    ratios = [report.solved_ratio for report in reports]
    if not ratios:
        raise ValueError("cannot average an empty list of reports")
    return float(np.mean(ratios))


def pin_respected(assignment: ColorAssignment, node: int, color: int) -> bool:
    return int(assignment.colors[node]) == color


def replicate_seeds(base: int, replicates: int) -> Sequence[int]:
    return [base + r for r in range(replicates)]
