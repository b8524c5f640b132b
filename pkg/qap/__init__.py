"""QAP instances, exact evaluation and the exhaustive oracle"""

from qap.errors import (
    QAPError,
    InstanceFormatError,
    DimensionError,
    SolutionError,
    InstanceTooLargeError,
    MissingBestKnownError,
    UnknownTargetError,
    RunLogError,
    InstanceNotFoundError,
    CurveFileError,
)
from qap.instance import (
    Instance,
    BEST_KNOWN,
    best_known,
    parse_instance,
    serialize_instance,
    load_instance,
    find_instance,
    quality,
    cost_threshold,
)
from qap.evaluation import (
    DeltaTable,
    cost,
    swap_delta,
    delta_row,
    build_delta_table,
    update_delta_table,
    apply_swap,
)
from qap.solution import Assignment, validate_perm, write_solution, read_solution
from qap.oracle import brute_force, naive_cost

__version__ = "0.1.0"

__all__ = [
    "QAPError",
    "InstanceFormatError",
    "DimensionError",
    "SolutionError",
    "InstanceTooLargeError",
    "MissingBestKnownError",
    "UnknownTargetError",
    "RunLogError",
    "InstanceNotFoundError",
    "CurveFileError",
    "Instance",
    "BEST_KNOWN",
    "best_known",
    "parse_instance",
    "serialize_instance",
    "load_instance",
    "find_instance",
    "quality",
    "cost_threshold",
    "DeltaTable",
    "cost",
    "swap_delta",
    "delta_row",
    "build_delta_table",
    "update_delta_table",
    "apply_swap",
    "Assignment",
    "validate_perm",
    "write_solution",
    "read_solution",
    "brute_force",
    "naive_cost",
    "__version__",
]
