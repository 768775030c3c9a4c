"""Periodic grids and graded matrix-valued cochains (discrete forms).

A degree-0 or degree-2 form stores one 2x2 complex matrix per cell; a
degree-1 form stores two, one per edge direction.  Cells carry 1-based
labels (k, s) with k in 1..n and s in 1..m, and every index is reduced
modulo the grid before any array access, so the periodic identifications
hold by construction rather than as a maintained invariant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .algebra import mat_from_json, mat_to_json, su2_from_coords
from .errors import DegreeMismatch, ParseError


@dataclass(frozen=True)
class TorusGrid:
    """Cell counts of the periodic grid: n in direction 1, m in direction 2."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.n}x{self.m}")

    def wrap(self, k: int, s: int) -> tuple[int, int]:
        """1-based label -> 0-based storage index, reduced modulo the grid."""
        return (k - 1) % self.n, (s - 1) % self.m

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.m)


@dataclass(frozen=True)
class ZeroForm:
    """Marker for the structurally absent degree-3 slot.

    Returned by the coboundary on degree 2 (and by the gauged coboundary on
    degree 2); consumers treat it as an exact zero.
    """

    grid: TorusGrid


def shift_coeffs(arr: np.ndarray, dk: int, ds: int) -> np.ndarray:
    """Array whose value at (k, s) is ``arr`` at (k + dk, s + ds), wrapped.

    Operates on the first two axes; trailing matrix axes ride along.
    """
    if dk == 0 and ds == 0:
        return arr.copy()
    return np.roll(arr, (-dk, -ds), axis=(0, 1))


class DiscreteForm:
    """Immutable graded cochain over a TorusGrid.

    coeffs shape: (n, m, 2, 2) for degrees 0 and 2; (2, n, m, 2, 2) for
    degree 1, component axis first.
    """

    __slots__ = ("grid", "degree", "coeffs")

    def __init__(self, grid: TorusGrid, degree: int, coeffs):
        if degree not in (0, 1, 2):
            raise DegreeMismatch(f"degree must be 0, 1 or 2, got {degree}")
        coeffs = np.array(coeffs, dtype=complex)
        expected = (
            (2, grid.n, grid.m, 2, 2) if degree == 1 else (grid.n, grid.m, 2, 2)
        )
        if coeffs.shape != expected:
            raise ValueError(
                f"coefficient shape {coeffs.shape} does not match degree {degree} "
                f"on a {grid.n}x{grid.m} grid (expected {expected})"
            )
        coeffs.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("DiscreteForm is immutable")

    def component(self, i: int) -> np.ndarray:
        """Edge component (1 or 2) of a degree-1 form, as an (n, m, 2, 2) view."""
        if self.degree != 1:
            raise DegreeMismatch("components exist only for degree-1 forms")
        if i not in (1, 2):
            raise DegreeMismatch(f"edge component must be 1 or 2, got {i}")
        return self.coeffs[i - 1]

    def _binary_check(self, other: "DiscreteForm"):
        if not isinstance(other, DiscreteForm):
            raise TypeError(f"expected DiscreteForm, got {type(other).__name__}")
        if self.grid != other.grid or self.degree != other.degree:
            raise DegreeMismatch("form arithmetic requires equal grid and degree")

    def __add__(self, other):
        self._binary_check(other)
        return DiscreteForm(self.grid, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._binary_check(other)
        return DiscreteForm(self.grid, self.degree, self.coeffs - other.coeffs)

    def __neg__(self):
        return DiscreteForm(self.grid, self.degree, -self.coeffs)

    def __rmul__(self, scalar):
        return DiscreteForm(self.grid, self.degree, scalar * self.coeffs)

    __mul__ = __rmul__

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))


def make_form(
    grid: TorusGrid,
    degree: int,
    init: str = "zero",
    *,
    value=None,
    seed: int | None = None,
    scale: float = 1.0,
) -> DiscreteForm:
    """Construct a form.

    init modes:
      "zero"        all coefficients zero
      "constant"    every cell carries ``value`` (a matrix, or a pair of
                    matrices for degree 1)
      "random-su2"  su(2) coordinates drawn uniformly from scale*[-1, 1]^3,
                    deterministic in ``seed``
      "random-mat"  general complex entries with re/im uniform in
                    scale*[-1, 1], deterministic in ``seed``
    """
    shape = (2, grid.n, grid.m) if degree == 1 else (grid.n, grid.m)
    if init == "zero":
        return DiscreteForm(grid, degree, np.zeros(shape + (2, 2), dtype=complex))
    if init == "constant":
        if degree == 1:
            v1, v2 = value
            coeffs = np.empty(shape + (2, 2), dtype=complex)
            coeffs[0] = np.asarray(v1, dtype=complex)
            coeffs[1] = np.asarray(v2, dtype=complex)
        else:
            coeffs = np.broadcast_to(np.asarray(value, dtype=complex), shape + (2, 2))
        return DiscreteForm(grid, degree, coeffs)
    rng = np.random.default_rng(seed)
    if init == "random-su2":
        coords = rng.uniform(-scale, scale, size=shape + (3,))
        return DiscreteForm(grid, degree, su2_from_coords(coords))
    if init == "random-mat":
        re = rng.uniform(-scale, scale, size=shape + (2, 2))
        im = rng.uniform(-scale, scale, size=shape + (2, 2))
        return DiscreteForm(grid, degree, re + 1j * im)
    raise ValueError(f"unknown init mode {init!r}")


def pairing(f: DiscreteForm, index) -> np.ndarray:
    """Coefficient of ``f`` at a basis cell or edge, with wrapped indices.

    Degree 0 and 2 take a (k, s) pair; degree 1 takes (component, k, s)
    with component 1 or 2.  Any integers are accepted and wrapped.
    """
    index = tuple(index)
    if f.degree == 1:
        if len(index) != 3:
            raise DegreeMismatch(
                f"degree-1 pairing needs (component, k, s), got {index}"
            )
        c, k, s = index
        if c not in (1, 2):
            raise DegreeMismatch(f"edge component must be 1 or 2, got {c}")
        i, j = f.grid.wrap(k, s)
        return f.coeffs[c - 1, i, j]
    if len(index) != 2:
        raise DegreeMismatch(f"degree-{f.degree} pairing needs (k, s), got {index}")
    i, j = f.grid.wrap(*index)
    return f.coeffs[i, j]


def total_over_cells(psi: DiscreteForm) -> np.ndarray:
    """Matrix sum of a degree-2 form over every cell.

    Invariant under shifts of the form, since the sum runs over a full
    period in each direction.
    """
    if psi.degree != 2:
        raise DegreeMismatch(f"cell total needs a degree-2 form, got degree {psi.degree}")
    return psi.coeffs.sum(axis=(0, 1))


def shift_form(f: DiscreteForm, dk: int, ds: int) -> DiscreteForm:
    """Form whose coefficient at (k, s) is ``f``'s at (k + dk, s + ds)."""
    if f.degree == 1:
        coeffs = np.stack(
            [shift_coeffs(f.coeffs[0], dk, ds), shift_coeffs(f.coeffs[1], dk, ds)]
        )
    else:
        coeffs = shift_coeffs(f.coeffs, dk, ds)
    return DiscreteForm(f.grid, f.degree, coeffs)


def _grid_to_json(arr: np.ndarray) -> list:
    # (n, m, 2, 2) -> nested lists, outer index k, inner index s
    return [[mat_to_json(arr[i, j]) for j in range(arr.shape[1])] for i in range(arr.shape[0])]


def _grid_from_json(obj, n: int, m: int, field: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != n:
        raise ParseError(f"expected {n} rows", field)
    out = np.empty((n, m, 2, 2), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != m:
            raise ParseError(f"expected {m} entries per row", f"{field}[{i}]")
        for j, mat in enumerate(row):
            out[i, j] = mat_from_json(mat, f"{field}[{i}][{j}]")
    return out


def serialize(f: DiscreteForm) -> str:
    """JSON text for a form; lossless at double precision."""
    if f.degree == 1:
        coeffs = {"c1": _grid_to_json(f.coeffs[0]), "c2": _grid_to_json(f.coeffs[1])}
    else:
        coeffs = _grid_to_json(f.coeffs)
    payload = {"n": f.grid.n, "m": f.grid.m, "degree": f.degree, "coeffs": coeffs}
    return json.dumps(payload, indent=2, sort_keys=True)


def deserialize(text: str) -> DiscreteForm:
    """Inverse of serialize; raises ParseError with field context."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("top-level value must be an object")
    for key in ("n", "m", "degree", "coeffs"):
        if key not in obj:
            raise ParseError("missing required key", key)
    n, m, degree = obj["n"], obj["m"], obj["degree"]
    if not isinstance(n, int) or not isinstance(m, int) or n < 1 or m < 1:
        raise ParseError("grid dimensions must be positive integers", "n/m")
    if degree not in (0, 1, 2):
        raise ParseError(f"degree must be 0, 1 or 2, got {degree!r}", "degree")
    grid = TorusGrid(n, m)
    coeffs = obj["coeffs"]
    if degree == 1:
        if not isinstance(coeffs, dict) or set(coeffs) != {"c1", "c2"}:
            raise ParseError('degree-1 coeffs must be {"c1": ..., "c2": ...}', "coeffs")
        c1 = _grid_from_json(coeffs["c1"], n, m, "coeffs.c1")
        c2 = _grid_from_json(coeffs["c2"], n, m, "coeffs.c2")
        return DiscreteForm(grid, 1, np.stack([c1, c2]))
    return DiscreteForm(grid, degree, _grid_from_json(coeffs, n, m, "coeffs"))
