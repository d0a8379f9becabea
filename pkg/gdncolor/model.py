"""Graph Discrimination Network: colour-equivariant linear message passing.

Every layer maps an ``n × k`` matrix of colour beliefs ``h`` to::

    h'_v = λ_C h_v + γ_C (Σ_j h_v[j]) 1 + λ_A m_v + γ_A (Σ_j m_v[j]) 1 + β 1
    m_v  = Σ_{u ∈ N(v)} h_u

with five trainable scalars per layer.  Because each weight matrix has the
form ``λI + γ11ᵀ`` the map commutes with any permutation of colour columns.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray
from scipy import sparse

from .graph import ColorAssignment, Graph


EmbeddingMatrix = NDArray[np.float64]

LAYER_FIELDS = ("lambda_c", "gamma_c", "lambda_a", "gamma_a", "beta")
DEFAULT_LAYER = (1.0, 0.0, -1.0, 0.0, 0.0)
AGGREGATORS = ("sum", "mean")


class LayerParams(NamedTuple):
    lambda_c: float
    gamma_c: float
    lambda_a: float
    gamma_a: float
    beta: float


@dataclass(frozen=True, eq=False)
class GdnParams:
    """Per-layer scalar 5-tuples, stored as an ``(L, 5)`` float array."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[1] != len(LAYER_FIELDS):
            raise ValueError(f"params must have shape (L, 5), got {values.shape}")
        if values.shape[0] < 1:
            raise ValueError("params need at least one layer")
        if not np.isfinite(values).all():
            raise ValueError("params contain non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def default(cls, depth: int) -> "GdnParams":
        """Neighbour-repelling initialisation ``(1, 0, -1, 0, 0)`` in every layer."""
        if depth < 1:
            raise ValueError(f"depth must be >= 1, got {depth}")
        return cls(np.tile(np.asarray(DEFAULT_LAYER), (depth, 1)))

    @classmethod
    def from_layers(cls, layers: Iterable[Sequence[float]]) -> "GdnParams":
        return cls(np.asarray([tuple(layer) for layer in layers], dtype=np.float64))

    @property
    def depth(self) -> int:
        return int(self.values.shape[0])

    @property
    def layers(self) -> List[LayerParams]:
        return [LayerParams(*row) for row in self.values.tolist()]

    def to_dict(self) -> Dict[str, object]:
        return {
            "depth": self.depth,
            "layers": [dict(zip(LAYER_FIELDS, row)) for row in self.values.tolist()],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, object]) -> "GdnParams":
        layers = data["layers"]
        params = cls.from_layers([[float(layer[name]) for name in LAYER_FIELDS] for layer in layers])  # type: ignore[index,union-attr]
        declared = data.get("depth")
        if declared is not None and int(declared) != params.depth:  # type: ignore[arg-type]
            raise ValueError(f"declared depth {declared} but {params.depth} layers present")
        return params

    def to_json(self) -> str:
        # repr-based floats: exact decimal round trip.
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GdnParams":
        return cls.from_dict(json.loads(text))

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "GdnParams":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if "final_params" in data:
            data = data["final_params"]
        return cls.from_dict(data)

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()[:12]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GdnParams):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())


@dataclass(frozen=True)
class ColorPermutation:
    """Bijection on colour indices; ``perm[i]`` is the image of colour i."""

    perm: Tuple[int, ...]

    def __post_init__(self) -> None:
        perm = tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, k: int) -> "ColorPermutation":
        return cls(tuple(range(k)))

    @classmethod
    def random(cls, k: int, rng: np.random.Generator) -> "ColorPermutation":
        return cls(tuple(rng.permutation(k).tolist()))

    @property
    def k(self) -> int:
        return len(self.perm)

    def inverse(self) -> "ColorPermutation":
        inv = [0] * self.k
        for i, p in enumerate(self.perm):
            inv[p] = i
        return ColorPermutation(tuple(inv))

    def __call__(self, color: int) -> int:
        return self.perm[color]

    def matrix(self) -> np.ndarray:
        """Permutation matrix P with ``(hP)[:, perm[i]] = h[:, i]``."""
        P = np.zeros((self.k, self.k))
        P[np.arange(self.k), self.perm] = 1.0
        return P


@dataclass(frozen=True)
class PinSet:
    """Nodes whose colour is fixed before the forward pass."""

    pins: Mapping[int, int] = field(default_factory=dict)

    def validate(self, n: int, k: int) -> None:
        for node, color in self.pins.items():
            if not 0 <= node < n:
                raise ValueError(f"pinned node {node} outside 0..{n - 1}")
            if not 0 <= color < k:
                raise ValueError(f"pinned colour {color} for node {node} outside palette 0..{k - 1}")

    @classmethod
    def parse(cls, specs: Iterable[str]) -> "PinSet":
        """Parse ``NODE:COLOR`` strings."""
        pins: Dict[int, int] = {}
        for spec in specs:
            node, sep, color = spec.partition(":")
            if not sep:
                raise ValueError(f"pin must look like NODE:COLOR, got {spec!r}")
            pins[int(node)] = int(color)
        return cls(pins)

    def permuted(self, perm: ColorPermutation) -> "PinSet":
        return PinSet({node: perm(color) for node, color in self.pins.items()})

    def __bool__(self) -> bool:
        return bool(self.pins)

    def __len__(self) -> int:
        return len(self.pins)


def sample_simplex(rng: np.random.Generator, rows: int, k: int) -> np.ndarray:
    """Uniform samples on the probability simplex (normalised exponentials)."""
    draws = rng.standard_exponential((rows, k))
    return draws / draws.sum(axis=1, keepdims=True)


def init_attributes(
    g: Graph,
    k: int,
    pins: Optional[PinSet] = None,
    seed: int = 0,
    *,
    mode: str = "random",
) -> EmbeddingMatrix:
    """Centred initial colour distributions, one row per node.

    ``mode="random"`` draws each unpinned row uniformly on the simplex;
    ``mode="uniform"`` gives every unpinned row the uniform distribution
    (all zeros after centring).  Pinned rows are centred one-hot vectors.
    """
    if k < 2:
        raise ValueError(f"palette size must be >= 2, got {k}")
    pins = pins or PinSet()
    pins.validate(g.n, k)

    if mode == "random":
        rng = np.random.default_rng(seed)
        probs = sample_simplex(rng, g.n, k)
    elif mode == "uniform":
        probs = np.full((g.n, k), 1.0 / k)
    else:
        raise ValueError(f"unknown attribute mode {mode!r}; choose 'random' or 'uniform'")

    for node, color in pins.pins.items():
        probs[node] = 0.0
        probs[node, color] = 1.0
    return probs - 1.0 / k


def pinned_row(k: int, color: int) -> np.ndarray:
    row = np.full(k, -1.0 / k)
    row[color] += 1.0
    return row


def row_sums(h: np.ndarray) -> np.ndarray:
    # Sorted first so the sum cannot depend on column order.
    return np.sort(h, axis=1).sum(axis=1)


def aggregation_operator(g: Graph, aggregator: str = "sum", *, closed: bool = False) -> sparse.csr_matrix:
    """Sparse operator M with ``(M @ h)[v]`` the aggregate over N(v) (or N(v)∪{v})."""
    if aggregator not in AGGREGATORS:
        raise ValueError(f"unknown aggregator {aggregator!r}; choose one of {AGGREGATORS}")
    op = g.adjacency
    if closed:
        op = (op + sparse.identity(g.n, format="csr")).tocsr()
        op.sort_indices()
    if aggregator == "mean":
        sizes = np.asarray(op.sum(axis=1)).ravel()
        scale = np.divide(1.0, sizes, out=np.zeros_like(sizes), where=sizes > 0)
        op = sparse.diags(scale) @ op
        op = op.tocsr()
        op.sort_indices()
    return op


def _check_shape(h: np.ndarray, g: Graph) -> None:
    if h.ndim != 2 or h.shape[0] != g.n:
        raise ValueError(f"embedding has shape {h.shape}, expected ({g.n}, k)")


def _combine(h: np.ndarray, agg: np.ndarray, p: Sequence[float]) -> np.ndarray:
    lambda_c, gamma_c, lambda_a, gamma_a, beta = p
    return (
        lambda_c * h
        + (gamma_c * row_sums(h))[:, None]
        + lambda_a * agg
        + (gamma_a * row_sums(agg))[:, None]
        + beta
    )


def forward_layer(
    h: EmbeddingMatrix,
    g: Graph,
    p: Sequence[float],
    *,
    aggregator: str = "sum",
    operator: Optional[sparse.csr_matrix] = None,
) -> EmbeddingMatrix:
    """One GDN layer; returns a new matrix and leaves *h* untouched."""
    _check_shape(h, g)
    op = operator if operator is not None else aggregation_operator(g, aggregator)
    agg = np.asarray(op @ h)
    return _combine(h, agg, p)


def forward(
    x: EmbeddingMatrix,
    g: Graph,
    params: GdnParams,
    *,
    aggregator: str = "sum",
    pins: Optional[PinSet] = None,
    clamp: bool = False,
) -> Tuple[EmbeddingMatrix, List[EmbeddingMatrix]]:
    """Apply every layer in turn.

    Returns the final embedding and the list of per-layer outputs
    (``trace[i]`` is the output of layer ``i``).  With *clamp* the pinned
    rows are reset to their centred one-hot vector after every layer.
    """
    _check_shape(x, g)
    op = aggregation_operator(g, aggregator)
    k = x.shape[1]
    pinned = list((pins or PinSet()).pins.items()) if clamp else []

    h = np.asarray(x, dtype=np.float64)
    trace: List[EmbeddingMatrix] = []
    for index, layer in enumerate(params.values):
        h = forward_layer(h, g, layer, operator=op)
        for node, color in pinned:
            h[node] = pinned_row(k, color)
        if not np.isfinite(h).all():
            raise FloatingPointError(f"non-finite embedding after layer {index + 1}")
        trace.append(h)
    return h, trace


def integrated_forward_layer(
    h: EmbeddingMatrix,
    g: Graph,
    p: Sequence[float],
    *,
    aggregator: str = "sum",
) -> EmbeddingMatrix:
    """Layer whose aggregate runs over the closed neighbourhood N(v)∪{v}.

    The self terms ``λ_C``/``γ_C`` are ignored: the node's own row only
    enters through the aggregate.
    """
    _check_shape(h, g)
    op = aggregation_operator(g, aggregator, closed=True)
    agg = np.asarray(op @ h)
    _, _, lambda_a, gamma_a, beta = p
    return lambda_a * agg + (gamma_a * row_sums(agg))[:, None] + beta


def integrated_forward(
    x: EmbeddingMatrix,
    g: Graph,
    params: GdnParams,
    *,
    aggregator: str = "sum",
) -> Tuple[EmbeddingMatrix, List[EmbeddingMatrix]]:
    h = np.asarray(x, dtype=np.float64)
    trace: List[EmbeddingMatrix] = []
    for layer in params.values:
        h = integrated_forward_layer(h, g, layer, aggregator=aggregator)
        trace.append(h)
    return h, trace


def classify_argmax(h: EmbeddingMatrix) -> ColorAssignment:
    """Row-wise argmax; ties go to the lowest colour index."""
    if h.ndim != 2 or h.shape[1] < 1:
        raise ValueError(f"embedding must be a 2-d matrix with k >= 1 columns, got {h.shape}")
    return ColorAssignment(np.argmax(h, axis=1), int(h.shape[1]))


def permute_colors(h: EmbeddingMatrix, perm: ColorPermutation) -> EmbeddingMatrix:
    """Right-multiply by the permutation matrix: column ``perm[i]`` receives column i."""
    if h.shape[1] != perm.k:
        raise ValueError(f"permutation over {perm.k} colours applied to {h.shape[1]} columns")
    return np.ascontiguousarray(h[:, list(perm.inverse().perm)])


def softmax_rows(h: EmbeddingMatrix) -> EmbeddingMatrix:
    shifted = h - h.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def normalize_rows(h: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit Euclidean norm; all-zero rows stay zero."""
    norms = np.linalg.norm(h, axis=1, keepdims=True)
    return np.divide(h, norms, out=np.zeros_like(h, dtype=np.float64), where=norms > 0)
