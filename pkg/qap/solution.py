"""Assignments and QAPLIB .sln solution files

Solution files carry "N cost" on the first line followed by the permutation
with 1-based location indices. Internally permutations are 0-based.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

from qap.errors import SolutionError
from qap.evaluation import cost as evaluate
from qap.instance import Instance


def validate_perm(perm: Sequence[int], n: int) -> Tuple[int, ...]:
    """Return perm as a tuple after checking it is a bijection of {0..n-1}"""
    values = tuple(int(v) for v in perm)
    if len(values) != n or sorted(values) != list(range(n)):
        raise SolutionError(f"Not a permutation of 0..{n - 1}: {values}")
    return values


@dataclass(frozen=True)
class Assignment:
    """Facility → location permutation with its cost"""

    perm: Tuple[int, ...]
    cost: int

    @classmethod
    def from_perm(cls, instance: Instance, perm: Sequence[int]) -> "Assignment":
        values = validate_perm(perm, instance.n)
        return cls(perm=values, cost=evaluate(instance, values))

    @property
    def n(self) -> int:
        return len(self.perm)


def write_solution(instance: Instance, assignment: Assignment) -> str:
    """Serialise an assignment as QAPLIB .sln text"""
    validate_perm(assignment.perm, instance.n)
    actual = evaluate(instance, assignment.perm)
    if actual != assignment.cost:
        raise SolutionError(f"Assignment states cost {assignment.cost} but evaluates to {actual}")
    locations = " ".join(str(loc + 1) for loc in assignment.perm)
    return f"{instance.n} {assignment.cost}\n{locations}\n"


def read_solution(text: str, instance: Instance) -> Assignment:
    """
    Parse .sln text and check it against the instance.

    Raises:
        SolutionError: malformed header, wrong size, not a bijection, or a
            stated cost that differs from the recomputed one
    """
    tokens = text.split()
    try:
        values = [int(tok) for tok in tokens]
    except ValueError as e:
        raise SolutionError(f"Non-integer token in solution file ({e})") from e

    if len(values) < 2:
        raise SolutionError("Solution file needs 'N cost' followed by the permutation")

    n, stated = values[0], values[1]
    if n != instance.n:
        raise SolutionError(f"Solution is for N={n}, instance {instance.name} has N={instance.n}")
    if len(values) != 2 + n:
        raise SolutionError(f"Expected {n} permutation entries, got {len(values) - 2}")

    perm = validate_perm([v - 1 for v in values[2:]], n)
    actual = evaluate(instance, perm)
    if actual != stated:
        raise SolutionError(f"Solution states cost {stated} but the permutation evaluates to {actual}")
    return Assignment(perm=perm, cost=actual)
