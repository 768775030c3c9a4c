"""Pure-numpy implementations of the hot kernels.

Shares an exact semantics contract with the compiled twin in
``_speedups.pyx``: ``coords`` is a C-ordered float64 vector of length
6*n*m holding su(2) coordinates in (k, s, edge, basis) lexicographic
order (k outermost).  All shifts wrap modulo the grid.

These evaluations sit inside the solver's finite-difference loop, which
is why they exist separately from the operator pipeline in
``exterior_calc``/``yang_mills`` and in two backends.
"""

from __future__ import annotations

import numpy as np

from .algebra import su2_from_coords


def _edge_fields(coords: np.ndarray, n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.ascontiguousarray(coords, dtype=np.float64).reshape(-1)
    if a.shape[0] != 6 * n * m:
        raise ValueError(
            f"coords length {a.shape[0]} does not match 6*{n}*{m} = {6 * n * m}"
        )
    mats = su2_from_coords(a.reshape(n, m, 2, 3))  # (n, m, 2, 2, 2)
    return mats[:, :, 0], mats[:, :, 1]


def curvature(coords, n: int, m: int) -> np.ndarray:
    """Curvature coefficients F[k,s] of the connection, shape (n, m, 2, 2).

    F = a2[tk,s] - a2[k,s] - a1[k,ts] + a1[k,s]
        + a1[k,s] a2[tk,s] - a2[k,s] a1[k,ts]
    """
    a1, a2 = _edge_fields(coords, n, m)
    a2_tk = np.roll(a2, -1, axis=0)  # value at (k+1, s)
    a1_ts = np.roll(a1, -1, axis=1)  # value at (k, s+1)
    return a2_tk - a2 - a1_ts + a1 + a1 @ a2_tk - a2 @ a1_ts


def residual(coords, n: int, m: int, eq_delta: bool) -> np.ndarray:
    """Residual 1-form of the selected equation, shape (2, n, m, 2, 2).

    Component 1:  F[k,bs] - F[bk,bs] + a1[k,s] F[k,bs] - F[bk,bs] X1
    Component 2:  F[bk,s] - F[bk,bs] + a2[k,s] F[bk,s] - F[bk,bs] X2

    with b the backward shift; the trailing factors are X = a[k,s] for the
    dstar equation and X = a[bk,bs] for the delta equation (the only place
    the two families differ).
    """
    a1, a2 = _edge_fields(coords, n, m)
    f = curvature(coords, n, m)
    f_bb = np.roll(f, (1, 1), axis=(0, 1))  # F at (k-1, s-1)
    f_b2 = np.roll(f, 1, axis=1)  # F at (k, s-1)
    f_b1 = np.roll(f, 1, axis=0)  # F at (k-1, s)
    if eq_delta:
        x1 = np.roll(a1, (1, 1), axis=(0, 1))
        x2 = np.roll(a2, (1, 1), axis=(0, 1))
    else:
        x1, x2 = a1, a2
    r1 = f_b2 - f_bb + a1 @ f_b2 - f_bb @ x1
    r2 = f_b1 - f_bb + a2 @ f_b1 - f_bb @ x2
    return np.stack([r1, r2])


def objective(coords, n: int, m: int, eq_delta: bool) -> float:
    """Squared Frobenius residual norm: 1/2 sum |R|^2 over all entries."""
    r = residual(coords, n, m, eq_delta)
    return 0.5 * float(np.sum(r.real**2 + r.imag**2))


def gradient_fd(coords, n: int, m: int, eq_delta: bool, h: float) -> np.ndarray:
    """Central finite-difference gradient of the objective in the coordinates."""
    x = np.array(coords, dtype=np.float64).reshape(-1)
    if x.shape[0] != 6 * n * m:
        raise ValueError(
            f"coords length {x.shape[0]} does not match 6*{n}*{m} = {6 * n * m}"
        )
    g = np.empty_like(x)
    for j in range(x.size):
        orig = x[j]
        x[j] = orig + h
        fp = objective(x, n, m, eq_delta)
        x[j] = orig - h
        fm = objective(x, n, m, eq_delta)
        x[j] = orig
        g[j] = (fp - fm) / (2.0 * h)
    return g
