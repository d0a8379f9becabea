"""Public API for the gdncolor package."""

__version__ = "0.1.0"

from .baselines import (
    BpMessages,
    bp_color,
    bp_decode,
    bp_refutations,
    bp_update,
    exact_chromatic,
    greedy_dynamic,
    greedy_sorted,
    greedy_static,
    tabucol,
)
from .config import (
    AdamConfig,
    BpConfig,
    LossConfig,
    SolveConfig,
    TabuConfig,
    TrainConfig,
    resolve_worker_count,
)
from .errors import (
    BudgetExceededError,
    DimacsParseError,
    GdnColorError,
    GenerationError,
    InvariantError,
)
from .formats import (
    load_graph,
    parse_dimacs,
    parse_edge_list,
    read_assignment,
    save_graph,
    write_assignment,
    write_dimacs,
    write_edge_list,
)
from .generators import (
    gen_complete,
    gen_cycle,
    gen_gnp,
    gen_mycielski,
    gen_path,
    gen_petersen,
    gen_queen,
    gen_random_regular,
    gen_star,
)
from .graph import ColorAssignment, Graph, count_conflicts, greedy_clique, is_proper_coloring
from .instances import list_bundled_instances, load_instance, resolve_instance
from .model import (
    ColorPermutation,
    GdnParams,
    PinSet,
    classify_argmax,
    forward,
    forward_layer,
    init_attributes,
    integrated_forward,
    integrated_forward_layer,
    normalize_rows,
    permute_colors,
    softmax_rows,
)
from .refine import (
    CompletionResult,
    CompletionStatus,
    PartialAssignment,
    exact_complete,
    postprocess_local_search,
    preprocess_peel,
    reinsert,
    threshold_partial,
)
from .results import ConflictReport, SolveReport, TrainingReport
from .runner import ChromaticResult, GdnSolver, chromatic_search, solve
from .support import list_supported_methods, supports_method
from .training import adam_step, backward, calibrate_params, finite_diff_grad, margin_loss, train

__all__ = [
    "__version__",
    "Graph",
    "ColorAssignment",
    "count_conflicts",
    "is_proper_coloring",
    "parse_dimacs",
    "write_dimacs",
    "parse_edge_list",
    "write_edge_list",
    "load_graph",
    "save_graph",
    "read_assignment",
    "write_assignment",
    "gen_random_regular",
    "gen_gnp",
    "gen_queen",
    "gen_mycielski",
    "gen_cycle",
    "gen_path",
    "gen_complete",
    "gen_star",
    "gen_petersen",
    "GdnParams",
    "ColorPermutation",
    "PinSet",
    "init_attributes",
    "forward_layer",
    "forward",
    "integrated_forward_layer",
    "integrated_forward",
    "classify_argmax",
    "normalize_rows",
    "permute_colors",
    "softmax_rows",
    "margin_loss",
    "backward",
    "calibrate_params",
    "finite_diff_grad",
    "adam_step",
    "train",
    "preprocess_peel",
    "reinsert",
    "postprocess_local_search",
    "PartialAssignment",
    "threshold_partial",
    "exact_complete",
    "CompletionStatus",
    "CompletionResult",
    "greedy_static",
    "greedy_sorted",
    "greedy_dynamic",
    "tabucol",
    "BpMessages",
    "bp_update",
    "bp_color",
    "bp_decode",
    "bp_refutations",
    "greedy_clique",
    "exact_chromatic",
    "GdnSolver",
    "ChromaticResult",
    "solve",
    "chromatic_search",
    "SolveConfig",
    "TabuConfig",
    "BpConfig",
    "LossConfig",
    "AdamConfig",
    "TrainConfig",
    "resolve_worker_count",
    "ConflictReport",
    "SolveReport",
    "TrainingReport",
    "GdnColorError",
    "DimacsParseError",
    "InvariantError",
    "GenerationError",
    "BudgetExceededError",
    "list_supported_methods",
    "supports_method",
    "list_bundled_instances",
    "load_instance",
    "resolve_instance",
]
