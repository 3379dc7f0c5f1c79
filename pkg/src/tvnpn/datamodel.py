"""Core data containers: datasets with a scalar index variable, smoothing
kernels, evaluation grids, and undirected graphs.

Conventions used throughout the package:

* Samples are rows.  ``x[i]`` is observed at index value ``z[i]``, and the
  index variable always lives in the open interval (0, 1).
* Variables are 0-based internally.  The on-disk formats (CSV column names
  ``x1..xd``, graph JSON edge lists) are 1-based; conversion happens at the
  I/O boundary and nowhere else.
* Graph edges are unordered pairs stored canonically as ``(j, k)`` with
  ``j < k``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DatasetFormatError",
    "DimensionError",
    "DomainError",
    "Dataset",
    "KernelSpec",
    "KERNEL_NAMES",
    "kernel_eval",
    "kernel_weights",
    "EvalGrid",
    "Graph",
    "load_dataset",
    "save_dataset",
    "validate_symmetric",
    "validate_correlation",
]


class DatasetFormatError(ValueError):
    """Malformed cell, bad header, or non-finite value in a dataset file."""


class DimensionError(ValueError):
    """Ragged rows or inconsistent dimensions."""


class DomainError(ValueError):
    """Index value outside the open interval (0, 1)."""


@dataclass(frozen=True)
class Dataset:
    """An i.i.d. sample ``(x[i], z[i])`` with index values in (0, 1).

    Parameters
    ----------
    x : ndarray of shape (n, d)
        Observations; finite floats.
    z : ndarray of shape (n,)
        Index values, each strictly inside (0, 1).
    """

    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        z = np.asarray(self.z, dtype=float)
        if x.ndim != 2:
            raise DimensionError(f"x must be 2-d, got shape {x.shape}")
        if z.ndim != 1 or z.shape[0] != x.shape[0]:
            raise DimensionError(
                f"z must be 1-d with length {x.shape[0]}, got shape {z.shape}"
            )
        if x.shape[1] < 2:
            raise DimensionError("need at least 2 variables")
        if not np.all(np.isfinite(x)):
            raise DatasetFormatError("non-finite entry in x")
        if not np.all(np.isfinite(z)):
            raise DatasetFormatError("non-finite entry in z")
        if np.any(z <= 0.0) or np.any(z >= 1.0):
            bad = z[(z <= 0.0) | (z >= 1.0)][0]
            raise DomainError(f"index value {bad!r} outside the open interval (0, 1)")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

KERNEL_NAMES = ("epanechnikov", "uniform", "triangular")


def _epanechnikov(u):
    return np.where(np.abs(u) < 1.0, 0.75 * (1.0 - u * u), 0.0)


def _uniform(u):
    return np.where(np.abs(u) < 1.0, 0.5, 0.0)


def _triangular(u):
    return np.where(np.abs(u) < 1.0, 1.0 - np.abs(u), 0.0)


_KERNELS = {
    "epanechnikov": _epanechnikov,
    "uniform": _uniform,
    "triangular": _triangular,
}


@dataclass(frozen=True)
class KernelSpec:
    """A symmetric density kernel supported on [-1, 1] plus a bandwidth.

    ``name`` is one of ``"epanechnikov"`` (0.75 (1 - u^2)), ``"uniform"``
    (0.5) or ``"triangular"`` (1 - |u|), each restricted to |u| < 1.
    All three integrate to one and are symmetric about zero.
    """

    name: str
    h: float

    def __post_init__(self):
        if self.name not in _KERNELS:
            raise ValueError(
                f"unknown kernel {self.name!r}; choose from {KERNEL_NAMES}"
            )
        if not (math.isfinite(self.h) and self.h > 0.0):
            raise ValueError(f"bandwidth must be positive, got {self.h!r}")


def kernel_eval(spec: KernelSpec, u):
    """Evaluate the unscaled kernel K(u); zero outside [-1, 1]."""
    return _KERNELS[spec.name](np.asarray(u, dtype=float))


def kernel_weights(spec: KernelSpec, t):
    """Evaluate the rescaled kernel K_h(t) = K(t / h) / h."""
    return kernel_eval(spec, np.asarray(t, dtype=float) / spec.h) / spec.h


# ---------------------------------------------------------------------------
# evaluation grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalGrid:
    """Evenly spaced index values ``lo <= z <= hi`` inside (0, 1).

    ``points`` always includes both endpoints (a single point when
    ``lo == hi``).
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 1:
            raise ValueError("grid needs at least one point")
        if np.any(pts <= 0.0) or np.any(pts >= 1.0):
            raise DomainError("grid points must lie strictly inside (0, 1)")
        if np.any(np.diff(pts) <= 0) and pts.size > 1:
            raise ValueError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def linspace(cls, lo: float, hi: float, count: int) -> "EvalGrid":
        if count < 1:
            raise ValueError("count must be at least 1")
        if count == 1:
            if lo != hi:
                raise ValueError("count == 1 requires lo == hi")
            return cls(np.array([lo]))
        return cls(np.linspace(lo, hi, count))

    @classmethod
    def singleton(cls, z0: float) -> "EvalGrid":
        return cls(np.array([float(z0)]))

    @property
    def lo(self) -> float:
        return float(self.points[0])

    @property
    def hi(self) -> float:
        return float(self.points[-1])

    def __len__(self) -> int:
        return self.points.size

    def __iter__(self):
        return iter(self.points.tolist())


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------


def _canonical_edges(edges) -> frozenset:
    out = set()
    for j, k in edges:
        j, k = int(j), int(k)
        if j == k:
            raise ValueError(f"self-loop ({j}, {k}) not allowed")
        out.add((j, k) if j < k else (k, j))
    return frozenset(out)


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices ``0..d-1`` (no self-loops).

    Edges are unordered pairs held canonically with ``j < k``.  The JSON
    form (``to_json`` / ``from_json``) exposes 1-based vertex labels.
    """

    d: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be positive")
        edges = _canonical_edges(self.edges)
        for j, k in edges:
            if not (0 <= j < self.d and 0 <= k < self.d):
                raise ValueError(f"edge ({j}, {k}) outside 0..{self.d - 1}")
        object.__setattr__(self, "edges", edges)

    def has_edge(self, j: int, k: int) -> bool:
        return (min(j, k), max(j, k)) in self.edges

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_list(self) -> list:
        """Edges sorted lexicographically, as a list of (j, k) with j < k."""
        return sorted(self.edges)

    def complement_edges(self) -> list:
        """All non-edges (j, k), j < k, sorted lexicographically."""
        return [
            (j, k)
            for j in range(self.d)
            for k in range(j + 1, self.d)
            if (j, k) not in self.edges
        ]

    def to_json(self) -> dict:
        """JSON form with 1-based vertex labels."""
        return {"d": self.d, "edges": [[j + 1, k + 1] for j, k in self.edge_list()]}

    @classmethod
    def from_json(cls, obj) -> "Graph":
        """Parse the 1-based JSON form (a dict or a JSON string)."""
        if isinstance(obj, str):
            obj = json.loads(obj)
        d = int(obj["d"])
        edges = []
        for j, k in obj["edges"]:
            j, k = int(j), int(k)
            if not (1 <= j <= d and 1 <= k <= d):
                raise ValueError(f"edge [{j}, {k}] outside 1..{d}")
            edges.append((j - 1, k - 1))
        return cls(d, frozenset(_canonical_edges(edges)))

    @classmethod
    def complete(cls, d: int) -> "Graph":
        return cls(d, frozenset((j, k) for j in range(d) for k in range(j + 1, d)))

    @classmethod
    def empty(cls, d: int) -> "Graph":
        return cls(d, frozenset())


# ---------------------------------------------------------------------------
# dataset I/O
# ---------------------------------------------------------------------------


def load_dataset(path) -> Dataset:
    """Read a dataset CSV with header ``z,x1,...,xd``.

    Leading lines starting with ``#`` are ignored (output files written by
    this package carry a manifest comment there).  Raises
    :class:`DatasetFormatError` for malformed or non-finite cells,
    :class:`DimensionError` for ragged rows, and :class:`DomainError` when
    an index value falls outside (0, 1).
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    lines = [ln for ln in lines if ln.strip() != ""]
    while lines and lines[0].lstrip().startswith("#"):
        lines.pop(0)
    if not lines:
        raise DatasetFormatError(f"{path}: empty file")
    header = [c.strip() for c in lines[0].split(",")]
    if len(header) < 3 or header[0] != "z":
        raise DatasetFormatError(
            f"{path}: expected header 'z,x1,...,xd', got {lines[0]!r}"
        )
    d = len(header) - 1
    expected = ["z"] + [f"x{j}" for j in range(1, d + 1)]
    if header != expected:
        raise DatasetFormatError(
            f"{path}: expected header {','.join(expected)!r}, got {lines[0]!r}"
        )
    zs = []
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        cells = ln.split(",")
        if len(cells) != d + 1:
            raise DimensionError(
                f"{path}:{lineno}: expected {d + 1} fields, got {len(cells)}"
            )
        try:
            vals = [float(c) for c in cells]
        except ValueError as exc:
            raise DatasetFormatError(f"{path}:{lineno}: {exc}") from None
        if not all(math.isfinite(v) for v in vals):
            raise DatasetFormatError(f"{path}:{lineno}: non-finite value")
        if not (0.0 < vals[0] < 1.0):
            raise DomainError(
                f"{path}:{lineno}: z={vals[0]!r} outside the open interval (0, 1)"
            )
        zs.append(vals[0])
        rows.append(vals[1:])
    if not rows:
        raise DatasetFormatError(f"{path}: no data rows")
    return Dataset(np.array(rows, dtype=float), np.array(zs, dtype=float))


def save_dataset(data: Dataset, path, comment: str | None = None) -> None:
    """Write a dataset CSV (``repr`` float formatting, so reloading
    reproduces every value bit-exactly)."""
    with open(path, "w", encoding="utf-8") as fh:
        if comment is not None:
            for ln in comment.splitlines():
                fh.write(f"# {ln}\n")
        fh.write("z," + ",".join(f"x{j}" for j in range(1, data.d + 1)) + "\n")
        for i in range(data.n):
            fields = [repr(float(data.z[i]))]
            fields += [repr(float(v)) for v in data.x[i]]
            fh.write(",".join(fields) + "\n")


# ---------------------------------------------------------------------------
# matrix validators
# ---------------------------------------------------------------------------


def validate_symmetric(m, name: str = "matrix", tol: float = 1e-12) -> np.ndarray:
    """Check squareness and symmetry (within ``tol``); return as float array."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    if np.max(np.abs(a - a.T), initial=0.0) > tol:
        raise ValueError(f"{name} is not symmetric within {tol}")
    return a


def validate_correlation(m, name: str = "matrix", tol: float = 1e-8) -> np.ndarray:
    """validate_symmetric plus a unit-diagonal check (within ``tol``)."""
    a = validate_symmetric(m, name=name, tol=max(tol, 1e-12))
    if np.max(np.abs(np.diag(a) - 1.0)) > tol:
        raise ValueError(f"{name} does not have a unit diagonal within {tol}")
    return a
