"""Method registry and alias handling."""

from __future__ import annotations

from typing import Dict, Tuple


_METHOD_TABLE: Dict[str, Dict[str, object]] = {
    "gdn": {
        "family": "learned",
        "aliases": ("gdn", "gnn"),
        "uses_k": True,
        "description": "colour-equivariant message passing with argmax decoding",
    },
    "greedy-static": {
        "family": "greedy",
        "aliases": ("greedy-static", "greedy_static", "static"),
        "uses_k": True,
        "description": "first-fit in node-id order",
    },
    "greedy-sorted": {
        "family": "greedy",
        "aliases": ("greedy-sorted", "greedy_sorted", "sorted", "largest-first"),
        "uses_k": True,
        "description": "first-fit in descending degree order",
    },
    "greedy-dynamic": {
        "family": "greedy",
        "aliases": ("greedy-dynamic", "greedy_dynamic", "dynamic"),
        "uses_k": True,
        "description": "first-fit choosing the largest residual degree next",
    },
    "tabucol": {
        "family": "local-search",
        "aliases": ("tabucol", "tabu"),
        "uses_k": True,
        "description": "tabu search over single recolour moves",
    },
    "bp": {
        "family": "message-passing",
        "aliases": ("bp", "belief-propagation"),
        "uses_k": True,
        "description": "damped belief propagation, each node taking its least refuted colour",
    },
    "bp-greedy": {
        "family": "message-passing",
        "aliases": ("bp-greedy", "bp_greedy"),
        "uses_k": True,
        "description": "damped belief propagation with confidence-ordered greedy decoding",
    },
    "exact": {
        "family": "exact",
        "aliases": ("exact", "backtracking"),
        "uses_k": True,
        "description": "backtracking search for a zero-conflict colouring",
    },
}


def normalize_method(method: str) -> str:
    """Map an alias to its canonical method name."""

    name = method.strip().lower()
    for canonical, entry in _METHOD_TABLE.items():
        if name in entry["aliases"]:  # type: ignore[operator]
            return canonical
    raise ValueError(
        f"Unsupported method '{method}'; choose one of {', '.join(_METHOD_TABLE)}"
    )


def supports_method(method: str) -> bool:
    """Return True if *method* (or an alias) is registered."""

    try:
        normalize_method(method)
    except ValueError:
        return False
    return True


def list_supported_methods(*, family: str = "") -> Dict[str, Tuple[str, str]]:
    """Return ``{name: (family, description)}``, optionally filtered by family."""

    return {
        name: (str(entry["family"]), str(entry["description"]))
        for name, entry in _METHOD_TABLE.items()
        if not family or entry["family"] == family
    }


def validate_method_choice(method: str, *, k: int) -> str:
    """Raise ValueError if the method cannot run with palette size *k*."""

    canonical = normalize_method(method)
    if canonical in {"gdn", "tabucol"} and k < 2:
        raise ValueError(f"method {canonical} needs at least 2 colours, got k={k}")
    return canonical
