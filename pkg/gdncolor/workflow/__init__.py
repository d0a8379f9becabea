"""Multi-instance experiments built on the single-graph solver.

Typical usage
-------------
>>> from gdncolor.workflow import BenchConfig, bench
>>> report = bench("manifest.txt", BenchConfig(methods=["gdn", "tabucol"]), out="results.csv")
"""

from .config import BenchConfig, DepthSweepConfig
from .experiments import bench, depth_sweep, fixed_color_experiment
from .results import BenchReport, BenchRow, DepthSweepResult, FixedColorResult
from .utils import ManifestEntry, parse_manifest, read_manifest

__all__ = [
    "bench",
    "depth_sweep",
    "fixed_color_experiment",
    "BenchConfig",
    "DepthSweepConfig",
    "BenchReport",
    "BenchRow",
    "DepthSweepResult",
    "FixedColorResult",
    "ManifestEntry",
    "parse_manifest",
    "read_manifest",
]
