# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Semantics contract shared with the pure fallback in ``_kernels_py``:
``coords`` is a C-ordered float64 vector of length 6*n*m holding su(2)
coordinates in (k, s, edge, basis) lexicographic order.  2x2 complex
matrices are handled as flat 4-entry arrays (row-major m00 m01 m10 m11).
"""

import numpy as np

cdef double complex J = 1j


cdef inline void _load_edge(const double[::1] x, Py_ssize_t m,
                            Py_ssize_t i, Py_ssize_t j, int e,
                            double complex* out):
    cdef Py_ssize_t base = 6 * (i * m + j) + 3 * e
    cdef double a1 = x[base]
    cdef double a2 = x[base + 1]
    cdef double a3 = x[base + 2]
    out[0] = a1 * J
    out[1] = a2 + a3 * J
    out[2] = -a2 + a3 * J
    out[3] = -a1 * J


cdef inline void _mm(const double complex* a, const double complex* b,
                     double complex* c):
    c[0] = a[0] * b[0] + a[1] * b[2]
    c[1] = a[0] * b[1] + a[1] * b[3]
    c[2] = a[2] * b[0] + a[3] * b[2]
    c[3] = a[2] * b[1] + a[3] * b[3]


cdef void _fill_curvature(const double[::1] x, Py_ssize_t n, Py_ssize_t m,
                          double complex[::1] fb):
    # fb: flat (n*m*4) buffer of curvature coefficients
    cdef Py_ssize_t i, j, ip, jp, base, t
    cdef double complex a1[4]
    cdef double complex a2[4]
    cdef double complex a2_tk[4]
    cdef double complex a1_ts[4]
    cdef double complex p1[4]
    cdef double complex p2[4]
    for i in range(n):
        ip = i + 1 if i + 1 < n else 0
        for j in range(m):
            jp = j + 1 if j + 1 < m else 0
            _load_edge(x, m, i, j, 0, a1)
            _load_edge(x, m, i, j, 1, a2)
            _load_edge(x, m, ip, j, 1, a2_tk)
            _load_edge(x, m, i, jp, 0, a1_ts)
            _mm(a1, a2_tk, p1)
            _mm(a2, a1_ts, p2)
            base = 4 * (i * m + j)
            for t in range(4):
                fb[base + t] = ((((a2_tk[t] - a2[t]) - a1_ts[t]) + a1[t]) + p1[t]) - p2[t]


cdef void _cell_residual(const double[::1] x, Py_ssize_t n, Py_ssize_t m,
                         const double complex[::1] fb, bint eq_delta,
                         Py_ssize_t i, Py_ssize_t j,
                         double complex* r1, double complex* r2):
    cdef Py_ssize_t im = i - 1 if i > 0 else n - 1
    cdef Py_ssize_t jm = j - 1 if j > 0 else m - 1
    cdef Py_ssize_t b_b2 = 4 * (i * m + jm)   # F at (k, s-1)
    cdef Py_ssize_t b_b1 = 4 * (im * m + j)   # F at (k-1, s)
    cdef Py_ssize_t b_bb = 4 * (im * m + jm)  # F at (k-1, s-1)
    cdef double complex a1[4]
    cdef double complex a2[4]
    cdef double complex x1[4]
    cdef double complex x2[4]
    cdef double complex f_b2[4]
    cdef double complex f_b1[4]
    cdef double complex f_bb[4]
    cdef double complex p[4]
    cdef double complex q[4]
    cdef Py_ssize_t t
    _load_edge(x, m, i, j, 0, a1)
    _load_edge(x, m, i, j, 1, a2)
    if eq_delta:
        _load_edge(x, m, im, jm, 0, x1)
        _load_edge(x, m, im, jm, 1, x2)
    else:
        for t in range(4):
            x1[t] = a1[t]
            x2[t] = a2[t]
    for t in range(4):
        f_b2[t] = fb[b_b2 + t]
        f_b1[t] = fb[b_b1 + t]
        f_bb[t] = fb[b_bb + t]
    _mm(a1, f_b2, p)
    _mm(f_bb, x1, q)
    for t in range(4):
        r1[t] = ((f_b2[t] - f_bb[t]) + p[t]) - q[t]
    _mm(a2, f_b1, p)
    _mm(f_bb, x2, q)
    for t in range(4):
        r2[t] = ((f_b1[t] - f_bb[t]) + p[t]) - q[t]


cdef double _objective(const double[::1] x, Py_ssize_t n, Py_ssize_t m,
                       bint eq_delta, double complex[::1] fb):
    cdef Py_ssize_t i, j, t
    cdef double complex r1[4]
    cdef double complex r2[4]
    cdef double s1 = 0.0, s2 = 0.0
    _fill_curvature(x, n, m, fb)
    for i in range(n):
        for j in range(m):
            _cell_residual(x, n, m, fb, eq_delta, i, j, r1, r2)
            for t in range(4):
                s1 += r1[t].real * r1[t].real + r1[t].imag * r1[t].imag
                s2 += r2[t].real * r2[t].real + r2[t].imag * r2[t].imag
    return 0.5 * (s1 + s2)



cdef _as_coords(coords, Py_ssize_t n, Py_ssize_t m):
    x = np.ascontiguousarray(coords, dtype=np.float64).reshape(-1)
    if x.shape[0] != 6 * n * m:
        raise ValueError(
            f"coords length {x.shape[0]} does not match 6*{n}*{m} = {6 * n * m}"
        )
    return x

def curvature(coords, Py_ssize_t n, Py_ssize_t m):
    """Curvature coefficients of the connection, shape (n, m, 2, 2)."""
    x_arr = _as_coords(coords, n, m)
    out = np.empty(n * m * 4, dtype=np.complex128)
    cdef const double[::1] x = x_arr
    cdef double complex[::1] fb = out
    _fill_curvature(x, n, m, fb)
    return out.reshape(n, m, 2, 2)


def residual(coords, Py_ssize_t n, Py_ssize_t m, bint eq_delta):
    """Residual 1-form of the selected equation, shape (2, n, m, 2, 2)."""
    x_arr = _as_coords(coords, n, m)
    fbuf = np.empty(n * m * 4, dtype=np.complex128)
    out = np.empty(2 * n * m * 4, dtype=np.complex128)
    cdef const double[::1] x = x_arr
    cdef double complex[::1] fb = fbuf
    cdef double complex[::1] r = out
    cdef double complex r1[4]
    cdef double complex r2[4]
    cdef Py_ssize_t i, j, t, base
    _fill_curvature(x, n, m, fb)
    for i in range(n):
        for j in range(m):
            _cell_residual(x, n, m, fb, eq_delta, i, j, r1, r2)
            base = 4 * (i * m + j)
            for t in range(4):
                r[base + t] = r1[t]
                r[4 * n * m + base + t] = r2[t]
    return out.reshape(2, n, m, 2, 2)


def objective(coords, Py_ssize_t n, Py_ssize_t m, bint eq_delta):
    """Squared Frobenius residual norm: 1/2 sum |R|^2 over all entries."""
    x_arr = _as_coords(coords, n, m)
    fbuf = np.empty(n * m * 4, dtype=np.complex128)
    cdef const double[::1] x = x_arr
    cdef double complex[::1] fb = fbuf
    return _objective(x, n, m, eq_delta, fb)


def gradient_fd(coords, Py_ssize_t n, Py_ssize_t m, bint eq_delta, double h):
    """Central finite-difference gradient of the objective in the coordinates."""
    x_arr = np.array(_as_coords(coords, n, m), copy=True)
    g_arr = np.empty(6 * n * m, dtype=np.float64)
    fbuf = np.empty(n * m * 4, dtype=np.complex128)
    cdef double[::1] x = x_arr
    cdef double[::1] g = g_arr
    cdef double complex[::1] fb = fbuf
    cdef Py_ssize_t j, total = 6 * n * m
    cdef double orig, fp, fm
    for j in range(total):
        orig = x[j]
        x[j] = orig + h
        fp = _objective(x, n, m, eq_delta, fb)
        x[j] = orig - h
        fm = _objective(x, n, m, eq_delta, fb)
        x[j] = orig
        g[j] = (fp - fm) / (2.0 * h)
    return g_arr
