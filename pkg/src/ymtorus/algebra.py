"""2x2 complex matrices and the su(2) subspace used for cochain coefficients.

Coefficients throughout the library are arbitrary 2x2 complex matrices;
su(2) (anti-Hermitian traceless) is the distinguished real subspace in which
connections live.  Coordinates refer to the basis

    E1 = [[i, 0], [0, -i]],   E2 = [[0, 1], [-1, 0]],   E3 = [[0, i], [i, 0]],

so a triple (a1, a2, a3) corresponds to the matrix

    [[ a1*i,       a2 + a3*i ],
     [ -a2 + a3*i, -a1*i     ]].

Matrix products of su(2) elements generally leave su(2); no operation here
assumes closure, and `su2_deviation` measures how far a matrix has drifted.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NotInSu2, ParseError

# Absolute tolerance for su(2) membership checks: far above accumulated
# round-off at the coefficient magnitudes used here, far below any
# meaningful violation.
SU2_MEMBERSHIP_TOL = 1e-9

E1 = np.array([[1j, 0.0], [0.0, -1j]])
E2 = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
E3 = np.array([[0.0, 1j], [1j, 0.0]])
ZERO2 = np.zeros((2, 2), dtype=complex)
IDENTITY2 = np.eye(2, dtype=complex)

for _c in (E1, E2, E3, ZERO2, IDENTITY2):
    _c.flags.writeable = False
del _c


class Su2Coords(NamedTuple):
    a1: float
    a2: float
    a3: float


def mat2c(m00, m01, m10, m11) -> np.ndarray:
    """2x2 complex matrix from row-major entries."""
    return np.array([[m00, m01], [m10, m11]], dtype=complex)


def su2_from_coords(c) -> np.ndarray:
    """Matrix a1*E1 + a2*E2 + a3*E3 for the coordinate triple ``c``.

    Broadcasts over leading axes: an (..., 3) float array yields an
    (..., 2, 2) complex array.
    """
    a = np.asarray(c, dtype=float)
    out = np.empty(a.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = 1j * a[..., 0]
    out[..., 0, 1] = a[..., 1] + 1j * a[..., 2]
    out[..., 1, 0] = -a[..., 1] + 1j * a[..., 2]
    out[..., 1, 1] = -1j * a[..., 0]
    return out


def coords_from_su2(m, tol: float = SU2_MEMBERSHIP_TOL) -> Su2Coords:
    """Coordinates of an su(2) matrix.

    Raises NotInSu2 when the deviation from anti-Hermitian traceless
    exceeds ``tol``.
    """
    m = np.asarray(m, dtype=complex)
    dev = su2_deviation(m)
    if dev > tol:
        raise NotInSu2(
            f"su(2) deviation {dev:.3e} exceeds tolerance {tol:.3e}"
        )
    return Su2Coords(float(m[0, 0].imag), float(m[0, 1].real), float(m[0, 1].imag))


def coords_array_from_su2(mats) -> np.ndarray:
    """Batched coordinate extraction, (..., 2, 2) -> (..., 3), no membership check."""
    m = np.asarray(mats, dtype=complex)
    out = np.empty(m.shape[:-2] + (3,), dtype=float)
    out[..., 0] = m[..., 0, 0].imag
    out[..., 1] = m[..., 0, 1].real
    out[..., 2] = m[..., 0, 1].imag
    return out


def trace_pairing(a, b) -> complex:
    """-1/2 tr(a b).

    Bilinear on all 2x2 complex matrices; restricted to su(2) arguments it
    is real and equals the coordinate dot product.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    return complex(
        -0.5
        * (a[0, 0] * b[0, 0] + a[0, 1] * b[1, 0] + a[1, 0] * b[0, 1] + a[1, 1] * b[1, 1])
    )


def su2_deviation(m):
    """Frobenius norm of m + m^dagger plus |tr m|; zero iff m is in su(2).

    Broadcasts over leading axes and returns a float array for batched input.
    """
    m = np.asarray(m, dtype=complex)
    herm = m + np.conj(np.swapaxes(m, -1, -2))
    fro = np.sqrt(np.sum(herm.real**2 + herm.imag**2, axis=(-1, -2)))
    tr = np.abs(m[..., 0, 0] + m[..., 1, 1])
    out = fro + tr
    return float(out) if out.ndim == 0 else out


def mat_to_json(m) -> list:
    """Row-major [ [re, im], ... ] encoding with exact double round-trip."""
    m = np.asarray(m, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in m.reshape(4)]


def mat_from_json(obj, field: str = "matrix") -> np.ndarray:
    if not isinstance(obj, (list, tuple)) or len(obj) != 4:
        raise ParseError("matrix must be a length-4 array of [re, im] pairs", field)
    entries = []
    for idx, pair in enumerate(obj):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) for x in pair)
        ):
            raise ParseError("complex entry must be a [re, im] number pair", f"{field}[{idx}]")
        entries.append(complex(pair[0], pair[1]))
    return np.array(entries, dtype=complex).reshape(2, 2)
