"""Exhaustive enumeration for tiny instances

Used as ground truth in tests. The evaluator here is a plain double sum over
Python lists and deliberately shares no code with qap.evaluation, so the two
cross-check each other.
"""

import itertools
import logging
from typing import Sequence, Tuple

from qap.errors import InstanceTooLargeError
from qap.instance import Instance
from qap.solution import Assignment

logger = logging.getLogger(__name__)

DEFAULT_MAX_N = 10


def naive_cost(instance: Instance, perm: Sequence[int]) -> int:
    """Straight Σ_i Σ_j F[i][j] · D[p(i)][p(j)] without numpy"""
    flow = instance.flow.tolist()
    dist = instance.dist.tolist()
    return _naive_cost(flow, dist, perm)


def _naive_cost(flow, dist, perm) -> int:
    total = 0
    for i, frow in enumerate(flow):
        drow = dist[perm[i]]
        for j, fij in enumerate(frow):
            total += fij * drow[perm[j]]
    return total


def brute_force(instance: Instance, max_n: int = DEFAULT_MAX_N) -> Tuple[Assignment, int]:
    """
    Enumerate all N! permutations.

    Returns:
        The lexicographically smallest optimal assignment and the number of
        distinct optimal permutations

    Raises:
        InstanceTooLargeError: N > max_n
    """
    if instance.n > max_n:
        raise InstanceTooLargeError(
            f"Instance {instance.name} has N={instance.n}; brute force is limited to N <= {max_n}"
        )

    flow = instance.flow.tolist()
    dist = instance.dist.tolist()

    best_perm = None
    best_cost = None
    count = 0
    # permutations() yields in lexicographic order, so the first optimum kept is the smallest
    for perm in itertools.permutations(range(instance.n)):
        c = _naive_cost(flow, dist, perm)
        if best_cost is None or c < best_cost:
            best_cost, best_perm, count = c, perm, 1
        elif c == best_cost:
            count += 1

    logger.debug(f"Brute force on {instance.name}: optimum {best_cost}, {count} optimal permutations")
    return Assignment(perm=tuple(best_perm), cost=best_cost), count
