"""QAPLIB instance parsing and the best-known cost registry

A QAPLIB file holds an integer N followed by two N×N integer matrices with no
labels. The first matrix is read as the flow matrix F and the second as the
distance matrix D, so that C = Σ F[i][j] · D[p(i)][p(j)]. Line breaks are not
significant; only the token sequence is.
"""

import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

import numpy as np
from dotenv import load_dotenv

from qap.errors import InstanceFormatError, InstanceNotFoundError

load_dotenv()

logger = logging.getLogger(__name__)

# Best known costs of the six benchmark instances
BEST_KNOWN = {
    "nug30": 6124,
    "lipa90a": 360630,
    "sko100a": 152002,
    "tai100a": 21052466,
    "tho150": 8133398,
    "dre110": 2052,
}


def best_known(name: str) -> Optional[int]:
    """Return the registered best-known cost for an instance name, or None"""
    return BEST_KNOWN.get(name.lower())


@dataclass(frozen=True, eq=False)
class Instance:
    """A QAP instance: N facilities, N locations, flow and distance matrices"""

    name: str
    n: int
    flow: np.ndarray
    dist: np.ndarray
    best_known: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise InstanceFormatError(f"Instance {self.name}: N must be >= 1, got {self.n}")
        for label in ("flow", "dist"):
            matrix = np.array(getattr(self, label), dtype=np.int64)
            if matrix.shape != (self.n, self.n):
                raise InstanceFormatError(
                    f"Instance {self.name}: {label} matrix is {matrix.shape}, expected {(self.n, self.n)}"
                )
            matrix.flags.writeable = False
            object.__setattr__(self, label, matrix)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.name == other.name
            and self.n == other.n
            and self.best_known == other.best_known
            and np.array_equal(self.flow, other.flow)
            and np.array_equal(self.dist, other.dist)
        )

    def __hash__(self) -> int:
        return hash((self.name, self.n, self.best_known))

    def __repr__(self) -> str:
        return f"Instance(name={self.name!r}, n={self.n}, best_known={self.best_known})"


def parse_instance(text: str, name: str) -> Instance:
    """
    Parse QAPLIB text into an Instance.

    Args:
        text: N followed by 2·N² integers, whitespace separated
        name: Instance identifier, also used for the best-known lookup

    Raises:
        InstanceFormatError: non-integer token, N < 1 or wrong number count
    """
    tokens = text.split()
    if not tokens:
        raise InstanceFormatError(f"Instance {name}: empty input")

    try:
        values = [int(tok) for tok in tokens]
    except ValueError as e:
        raise InstanceFormatError(f"Instance {name}: non-integer token ({e})") from e

    n = values[0]
    if n < 1:
        raise InstanceFormatError(f"Instance {name}: N must be >= 1, got {n}")

    expected = 1 + 2 * n * n
    if len(values) != expected:
        raise InstanceFormatError(
            f"Instance {name}: expected {expected} integers for N={n}, got {len(values)}"
        )

    flow = np.array(values[1:1 + n * n], dtype=np.int64).reshape(n, n)
    dist = np.array(values[1 + n * n:], dtype=np.int64).reshape(n, n)
    return Instance(name=name, n=n, flow=flow, dist=dist, best_known=best_known(name))


def serialize_instance(instance: Instance) -> str:
    """Write an instance in QAPLIB layout (N, blank line, F, blank line, D)"""
    lines = [str(instance.n), ""]
    lines.extend(" ".join(str(v) for v in row) for row in instance.flow)
    lines.append("")
    lines.extend(" ".join(str(v) for v in row) for row in instance.dist)
    return "\n".join(lines) + "\n"


def load_instance(path: Union[str, Path], name: Optional[str] = None) -> Instance:
    """Read a QAPLIB .dat file; the name defaults to the file stem"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError:
        text = path.read_text(encoding="latin-1")
    instance = parse_instance(text, name or path.stem)
    logger.debug(f"Loaded instance {instance.name} (N={instance.n}) from {path}")
    return instance


def qaplib_dir(directory: Optional[Union[str, Path]] = None) -> Optional[Path]:
    """Directory holding QAPLIB files: explicit argument, else QAPLIB_DIR"""
    if directory:
        return Path(directory)
    env_dir = os.getenv("QAPLIB_DIR")
    return Path(env_dir) if env_dir else None


def find_instance(name_or_path: Union[str, Path], directory: Optional[Union[str, Path]] = None) -> Instance:
    """
    Resolve an instance given either a file path or a bare QAPLIB name.

    Bare names are looked up as <directory>/<name>.dat, where the directory
    comes from the argument or the QAPLIB_DIR environment variable.
    """
    candidate = Path(name_or_path)
    if candidate.is_file():
        return load_instance(candidate)

    base = qaplib_dir(directory)
    if base is not None:
        for filename in (f"{candidate.name}.dat", candidate.name):
            path = base / filename
            if path.is_file():
                return load_instance(path, name=candidate.stem)

    raise InstanceNotFoundError(
        f"Instance '{name_or_path}' not found (looked in {base or 'no QAPLIB directory'})"
    )


def quality(cost: int, best: int) -> float:
    """Relative gap Q = (C - C_best) / C_best"""
    if best == 0:
        return 0.0 if cost == 0 else float("inf")
    return (cost - best) / best


def cost_threshold(q: float, best: int) -> int:
    """Largest integer cost meeting quality q, i.e. floor((1 + q) · C_best)"""
    return int((1 + Fraction(str(q))) * best // 1)
