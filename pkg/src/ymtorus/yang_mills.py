"""Gauged operators and the two discrete Yang-Mills residuals.

A connection is an su(2)-valued degree-1 form; its curvature F combines
the coboundary with the cup square, F = d(A) + A cup A, and generally
drifts out of su(2) because the shifted cup products are not commutators.
Nothing here assumes closure; the drift is measured and reported.

The two residual operators are implemented twice on purpose: once as the
direct difference stencils (through the kernel backends) and once by
composing the library operators.  Tests require the routes to agree; the
double entry is what catches index-convention mistakes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra import (
    SU2_MEMBERSHIP_TOL,
    coords_array_from_su2,
    su2_deviation,
    su2_from_coords,
)
from .cochain import DiscreteForm, TorusGrid, ZeroForm
from .errors import DegreeMismatch, NotInSu2, ParseError
from .exterior_calc import cup, d, delta, star, star_inv


class Connection:
    """su(2)-valued degree-1 form; the unknown of the Yang-Mills equations.

    Coefficients are projected onto their basis coordinates at
    construction (inputs farther than ``tol`` from su(2) are rejected), so
    the stored form and the stored coordinate array describe identical
    data; both the stencil and the operator code paths see the same
    connection.
    """

    __slots__ = ("grid", "form", "coords")

    def __init__(self, form: DiscreteForm, tol: float = SU2_MEMBERSHIP_TOL):
        if form.degree != 1:
            raise DegreeMismatch(f"a connection is a degree-1 form, got degree {form.degree}")
        dev = float(np.max(su2_deviation(form.coeffs)))
        if dev > tol:
            raise NotInSu2(
                f"connection coefficients deviate from su(2) by {dev:.3e} (tol {tol:.3e})"
            )
        # (n, m, edge, basis) float coordinates; flattened C-order this is
        # the solver's parameter vector.
        coords = np.stack(
            [coords_array_from_su2(form.coeffs[0]), coords_array_from_su2(form.coeffs[1])],
            axis=2,
        )
        coords.flags.writeable = False
        object.__setattr__(self, "grid", form.grid)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(
            self,
            "form",
            DiscreteForm(
                form.grid,
                1,
                np.stack([su2_from_coords(coords[:, :, 0]), su2_from_coords(coords[:, :, 1])]),
            ),
        )

    def __setattr__(self, name, value):
        raise AttributeError("Connection is immutable")

    @classmethod
    def from_coords(cls, grid: TorusGrid, coords) -> "Connection":
        """Connection from an (n, m, 2, 3) coordinate array (or flat vector)."""
        c = np.asarray(coords, dtype=float).reshape(grid.n, grid.m, 2, 3)
        form = DiscreteForm(
            grid, 1, np.stack([su2_from_coords(c[:, :, 0]), su2_from_coords(c[:, :, 1])])
        )
        return cls(form)

    @classmethod
    def zero(cls, grid: TorusGrid) -> "Connection":
        return cls.from_coords(grid, np.zeros((grid.n, grid.m, 2, 3)))

    @classmethod
    def random(cls, grid: TorusGrid, seed: int | None = None, scale: float = 1.0) -> "Connection":
        """Coordinates uniform in scale*[-1, 1]^3 per edge, deterministic in seed."""
        rng = np.random.default_rng(seed)
        return cls.from_coords(grid, rng.uniform(-scale, scale, size=(grid.n, grid.m, 2, 3)))

    def flat_coords(self) -> np.ndarray:
        return self.coords.reshape(-1)

    def to_json(self) -> str:
        payload = {
            "n": self.grid.n,
            "m": self.grid.m,
            "degree": 1,
            "su2": True,
            "a1_coords": self.coords[:, :, 0].tolist(),
            "a2_coords": self.coords[:, :, 1].tolist(),
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Connection":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ParseError("top-level value must be an object")
        for key in ("n", "m", "degree", "su2", "a1_coords", "a2_coords"):
            if key not in obj:
                raise ParseError("missing required key", key)
        n, m = obj["n"], obj["m"]
        if not isinstance(n, int) or not isinstance(m, int) or n < 1 or m < 1:
            raise ParseError("grid dimensions must be positive integers", "n/m")
        if obj["degree"] != 1 or obj["su2"] is not True:
            raise ParseError('a connection file needs "degree": 1 and "su2": true')
        coords = np.empty((n, m, 2, 3), dtype=float)
        for edge, key in enumerate(("a1_coords", "a2_coords")):
            rows = obj[key]
            if not isinstance(rows, list) or len(rows) != n:
                raise ParseError(f"expected {n} rows", key)
            for i, row in enumerate(rows):
                if not isinstance(row, list) or len(row) != m:
                    raise ParseError(f"expected {m} entries per row", f"{key}[{i}]")
                for j, triple in enumerate(row):
                    if (
                        not isinstance(triple, list)
                        or len(triple) != 3
                        or not all(isinstance(v, (int, float)) for v in triple)
                    ):
                        raise ParseError(
                            "coordinate entry must be a [a1, a2, a3] number triple",
                            f"{key}[{i}][{j}]",
                        )
                    coords[i, j, edge] = triple
        return cls.from_coords(TorusGrid(n, m), coords)


@dataclass(frozen=True)
class Curvature:
    """Degree-2 curvature form plus its measured su(2) drift."""

    form: DiscreteForm
    su2_deviation_max: float


def curvature(A: Connection) -> Curvature:
    """Curvature F of the connection via the direct component stencil.

    F[k,s] = A2[tk,s] - A2[k,s] - A1[k,ts] + A1[k,s]
             + A1[k,s] A2[tk,s] - A2[k,s] A1[k,ts]
    """
    coeffs = kernels.curvature(A.flat_coords(), A.grid.n, A.grid.m)
    form = DiscreteForm(A.grid, 2, coeffs)
    return Curvature(form, float(np.max(su2_deviation(form.coeffs))))


def curvature_via_operators(A: Connection) -> DiscreteForm:
    """Curvature as d(A) + A cup A; oracle twin of :func:`curvature`."""
    return d(A.form) + cup(A.form, A.form)


def _cup_or_none(f, g):
    if isinstance(f, ZeroForm) or isinstance(g, ZeroForm):
        return None
    if f.degree + g.degree > 2:
        return None
    return cup(f, g)


def d_A(A: Connection, f):
    """Covariant coboundary: d(f) + A cup f + (-1)^(r+1) f cup A.

    Cup terms past the top degree are zero by the grading; a degree-2
    input therefore maps to the ZeroForm marker (which is why the Bianchi
    identity d_A(F) = 0 holds structurally in two dimensions).
    """
    if isinstance(f, ZeroForm) or f.degree == 2:
        return ZeroForm(A.grid)
    sign = -1.0 if f.degree == 0 else 1.0
    out = d(f)
    left = _cup_or_none(A.form, f)
    right = _cup_or_none(f, A.form)
    if left is not None:
        out = out + left
    if right is not None:
        out = out + sign * right
    return out


def delta_A(A: Connection, f: DiscreteForm, mode: str = "via_delta") -> DiscreteForm:
    """Adjoint of the covariant coboundary; lowers the degree by one.

    Three algebraically equal computation routes are kept (their agreement
    is itself a library invariant):

      "via_delta"    delta(f) + star_inv(star(f) cup star(star(A))
                                         + (-1)^q A cup star(f))
      "via_star_d"   (-1)^q star_inv(d(star(f))
                                     + (-1)^q star(f) cup star(star(A))
                                     + A cup star(f))
      "via_star_dA"  (-1)^q star_inv(d_A(star(f)))
                         + star_inv(star(f) cup (star(star(A)) + A))

    with q the input degree.  On degree-0 input the result is the zero
    0-form (the flat codifferential vanishes there and every cup term
    collapses), which keeps the covariant Laplacian total on all degrees.
    """
    if f.degree == 0:
        return DiscreteForm(f.grid, 0, np.zeros_like(f.coeffs))
    q = f.degree
    sign = -1.0 if q % 2 else 1.0
    sf = star(f)
    ssa = star(star(A.form))
    if mode == "via_delta":
        return delta(f) + star_inv(cup(sf, ssa) + sign * cup(A.form, sf))
    if mode == "via_star_d":
        return sign * star_inv(d(sf) + sign * cup(sf, ssa) + cup(A.form, sf))
    if mode == "via_star_dA":
        # star(f) has degree 2 - q <= 1 here, so d_A of it is a real form
        return sign * star_inv(d_A(A, sf)) + star_inv(cup(sf, ssa + A.form))
    raise ValueError(f"unknown delta_A mode {mode!r}")


def laplacian_A(A: Connection, f: DiscreteForm) -> DiscreteForm:
    """Covariant Laplacian d_A delta_A + delta_A d_A; degree-preserving.

    The term whose inner operator lands outside the complex (delta_A on
    degree 0, d_A on degree 2) contributes zero and is skipped.
    """
    if f.degree == 0:
        return delta_A(A, d_A(A, f))
    if f.degree == 1:
        return d_A(A, delta_A(A, f)) + delta_A(A, d_A(A, f))
    return d_A(A, delta_A(A, f))


def residual_dstar(A: Connection) -> DiscreteForm:
    """Residual of the star-form Yang-Mills equation, as a degree-1 form.

    Direct stencil (b = backward shift):

      comp1[k,s] = F[k,bs] - F[bk,bs] + A1[k,s] F[k,bs] - F[bk,bs] A1[k,s]
      comp2[k,s] = F[bk,s] - F[bk,bs] + A2[k,s] F[bk,s] - F[bk,bs] A2[k,s]

    Equals d_A(A, star(F)) computed through the operators.
    """
    coeffs = kernels.residual(A.flat_coords(), A.grid.n, A.grid.m, False)
    return DiscreteForm(A.grid, 1, coeffs)


def residual_delta(A: Connection) -> DiscreteForm:
    """Residual of the codifferential-form Yang-Mills equation.

    Same stencil as :func:`residual_dstar` except the trailing factor sits
    at the backward-shifted site:

      comp1[k,s] = F[k,bs] - F[bk,bs] + A1[k,s] F[k,bs] - F[bk,bs] A1[bk,bs]
      comp2[k,s] = F[bk,s] - F[bk,bs] + A2[k,s] F[bk,s] - F[bk,bs] A2[bk,bs]

    These components are the star image of delta_A(A, F): the star is an
    invertible relabeling of edges, so the equation systems "stencil = 0"
    and "delta_A(F) = 0" are the same, entry for entry, and the operator
    cross-check is star(delta_A(A, F)).
    """
    coeffs = kernels.residual(A.flat_coords(), A.grid.n, A.grid.m, True)
    return DiscreteForm(A.grid, 1, coeffs)


def residual_via_operators(A: Connection, equation: str = "delta") -> DiscreteForm:
    """Residuals composed from the library operators; oracle twin of the stencils."""
    F = curvature(A).form
    if equation == "dstar":
        return d_A(A, star(F))
    if equation == "delta":
        return star(delta_A(A, F, mode="via_delta"))
    raise ValueError(f"unknown equation {equation!r} (choices: dstar, delta)")
