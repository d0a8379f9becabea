"""Instance resolution for bundled and user-supplied benchmark graphs."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Dict, List, Optional, Union

from .formats import load_graph
from .graph import Graph


INSTANCES_ENV = "GDNCOLOR_INSTANCES"
INSTANCE_SUFFIXES = (".col", ".txt", ".edges")

PACKAGE_INSTANCE_DIR = Path(__file__).resolve().parent / "data" / "instances"

__all__ = [
    "INSTANCES_ENV",
    "PACKAGE_INSTANCE_DIR",
    "list_bundled_instances",
    "load_instance",
    "resolve_instance",
]


def resolve_instance(name_or_path: Union[str, Path], *, env: Optional[Dict[str, str]] = None) -> Path:
    """Resolve an instance file following the configured priority order.

    An existing path wins; otherwise the name (with or without suffix) is
    looked up in ``$GDNCOLOR_INSTANCES`` and then among the bundled files.
    """

    explicit = Path(name_or_path).expanduser()
    if explicit.is_file():
        return explicit.resolve()

    env = os.environ if env is None else env
    env_dir = env.get(INSTANCES_ENV)
    if env_dir:
        directory = Path(env_dir).expanduser()
        if not directory.is_dir():
            raise FileNotFoundError(
                f"Environment variable {INSTANCES_ENV} points to missing directory: {directory}"
            )
        found = _find_in_directory(directory, explicit.name)
        if found is not None:
            return found.resolve()

    found = _find_in_directory(PACKAGE_INSTANCE_DIR, explicit.name)
    if found is not None:
        return found.resolve()

    raise FileNotFoundError(f"Instance not found: {name_or_path}")


def load_instance(name_or_path: Union[str, Path], *, strict: bool = False) -> Graph:
    """Resolve *name_or_path* and parse it."""

    return load_graph(resolve_instance(name_or_path), strict=strict)


def list_bundled_instances() -> List[str]:
    """Names of the instances shipped with the package."""

    if not PACKAGE_INSTANCE_DIR.exists():
        return []
    return sorted(path.stem for path in PACKAGE_INSTANCE_DIR.glob("*.col"))


def _find_in_directory(directory: Path, name: str) -> Optional[Path]:
    candidate = directory / name
    if candidate.is_file():
        return candidate
    for suffix in INSTANCE_SUFFIXES:
        candidate = directory / f"{name}{suffix}"
        if candidate.is_file():
            return candidate
    return None
