import numpy as np
import pytest

from ymtorus.algebra import E1, E2, su2_deviation, su2_from_coords
from ymtorus.cochain import DiscreteForm, TorusGrid, ZeroForm, make_form, pairing
from ymtorus.errors import DegreeMismatch, NotInSu2, ParseError
from ymtorus.exterior_calc import cup, d, delta, inner, norm_sq, star, star_inv
from ymtorus.yang_mills import (
    Connection,
    curvature,
    curvature_via_operators,
    d_A,
    delta_A,
    laplacian_A,
    residual_delta,
    residual_dstar,
    residual_via_operators,
)

GRIDS = [(1, 1), (2, 2), (3, 5), (8, 8)]


def constant_connection(grid, c1=0.3, c2=0.5):
    """Constant connection with both components multiples of E1: flat."""
    coords = np.zeros((grid.n, grid.m, 2, 3))
    coords[:, :, 0, 0] = c1
    coords[:, :, 1, 0] = c2
    return Connection.from_coords(grid, coords)


# --- Connection type ------------------------------------------------------


def test_connection_rejects_non_su2():
    g = TorusGrid(2, 2)
    with pytest.raises(NotInSu2):
        Connection(make_form(g, 1, "constant", value=(np.eye(2), np.zeros((2, 2)))))
    with pytest.raises(DegreeMismatch):
        Connection(make_form(g, 0, "zero"))


def test_connection_coords_roundtrip():
    g = TorusGrid(3, 4)
    A = Connection.random(g, seed=3, scale=0.7)
    B = Connection.from_coords(g, A.coords)
    np.testing.assert_array_equal(A.form.coeffs, B.form.coeffs)
    # parameter vector ordering: (k, s, edge, basis) lexicographic
    flat = A.flat_coords()
    k, s, e, b = 2, 3, 1, 2  # 1-based labels, edge 2 of cell (2, 3), basis 3
    idx = (((k - 1) * g.m + (s - 1)) * 2 + e) * 3 + b
    assert flat[idx] == A.coords[k - 1, s - 1, e, b]


def test_connection_json_roundtrip_and_errors():
    g = TorusGrid(2, 3)
    A = Connection.random(g, seed=9, scale=0.4)
    B = Connection.from_json(A.to_json())
    np.testing.assert_array_equal(A.coords, B.coords)
    with pytest.raises(ParseError):
        Connection.from_json("{}")
    with pytest.raises(ParseError):
        Connection.from_json("not json")


# --- curvature ------------------------------------------------------------


def test_curvature_zero_connection():
    g = TorusGrid(3, 3)
    F = curvature(Connection.zero(g))
    assert F.form.max_abs() == 0.0 and F.su2_deviation_max == 0.0


def test_curvature_constant_commuting_is_flat():
    # difference terms vanish by constancy, product terms cancel by commutativity
    for n, m in GRIDS:
        F = curvature(constant_connection(TorusGrid(n, m)))
        assert F.form.max_abs() <= 1e-16


def test_curvature_component_formula_2x2():
    g = TorusGrid(2, 2)
    A = Connection.random(g, seed=4, scale=0.8)
    F = curvature(A).form

    def a(c, k, s):
        return pairing(A.form, (c, k, s))

    expected_11 = (
        a(1, 1, 1)
        - a(1, 1, 2)
        + a(2, 2, 1)
        - a(2, 1, 1)
        + a(1, 1, 1) @ a(2, 2, 1)
        - a(2, 1, 1) @ a(1, 1, 2)
    )
    np.testing.assert_allclose(pairing(F, (1, 1)), expected_11, atol=1e-15)


def test_curvature_general_stencil_oracle():
    g = TorusGrid(3, 5)
    A = Connection.random(g, seed=5)
    F = curvature(A).form

    def a(c, k, s):
        return pairing(A.form, (c, k, s))

    for k in range(1, 4):
        for s in range(1, 6):
            expected = (
                a(2, k + 1, s)
                - a(2, k, s)
                - a(1, k, s + 1)
                + a(1, k, s)
                + a(1, k, s) @ a(2, k + 1, s)
                - a(2, k, s) @ a(1, k, s + 1)
            )
            np.testing.assert_allclose(pairing(F, (k, s)), expected, atol=1e-14)


def test_curvature_two_routes_agree_and_deviation_recorded():
    for n, m in GRIDS:
        A = Connection.random(TorusGrid(n, m), seed=n * 10 + m)
        F = curvature(A)
        assert (F.form - curvature_via_operators(A)).max_abs() <= 1e-13
        assert F.su2_deviation_max == pytest.approx(
            float(np.max(su2_deviation(F.form.coeffs))), abs=1e-15
        )
        # reproducible from A componentwise
        np.testing.assert_array_equal(F.form.coeffs, curvature(A).form.coeffs)


# --- covariant coboundary ---------------------------------------------------


def test_d_A_reduces_to_d_at_zero_connection():
    g = TorusGrid(3, 4)
    A0 = Connection.zero(g)
    for degree in (0, 1):
        f = make_form(g, degree, "random-mat", seed=degree)
        assert (d_A(A0, f) - d(f)).max_abs() == 0.0
    assert isinstance(d_A(A0, make_form(g, 2, "random-mat", seed=3)), ZeroForm)


def test_bianchi_identity_structural():
    for n, m in GRIDS:
        A = Connection.random(TorusGrid(n, m), seed=n + m)
        F = curvature(A).form
        out = d_A(A, F)
        assert isinstance(out, ZeroForm)
        assert norm_sq(out) == 0.0


def test_d_A_degree0_direct_expansion_oracle():
    g = TorusGrid(2, 3)
    A = Connection.random(g, seed=6)
    f = make_form(g, 0, "random-mat", seed=7)
    out = d_A(A, f)
    for k in range(1, 3):
        for s in range(1, 4):
            a1 = pairing(A.form, (1, k, s))
            a2 = pairing(A.form, (2, k, s))
            e1 = (
                pairing(f, (k + 1, s))
                - pairing(f, (k, s))
                + a1 @ pairing(f, (k + 1, s))
                - pairing(f, (k, s)) @ a1
            )
            e2 = (
                pairing(f, (k, s + 1))
                - pairing(f, (k, s))
                + a2 @ pairing(f, (k, s + 1))
                - pairing(f, (k, s)) @ a2
            )
            np.testing.assert_allclose(pairing(out, (1, k, s)), e1, atol=1e-14)
            np.testing.assert_allclose(pairing(out, (2, k, s)), e2, atol=1e-14)


def test_gauged_leibniz_rule():
    g = TorusGrid(3, 5)
    rng = np.random.default_rng(2)
    for _ in range(20):
        seeds = rng.integers(0, 2**31, size=3)
        A = Connection.random(g, seed=int(seeds[0]))
        f0 = make_form(g, 0, "random-mat", seed=int(seeds[1]))
        f1 = make_form(g, 1, "random-mat", seed=int(seeds[2]))
        lhs = d_A(A, cup(f0, f1))
        rhs = cup(d_A(A, f0), f1) + cup(f0, d_A(A, f1))
        assert (lhs - rhs).max_abs() <= 1e-13
        lhs = d_A(A, cup(f1, f0))
        rhs = cup(d_A(A, f1), f0) + (-1.0) * cup(f1, d_A(A, f0))
        assert (lhs - rhs).max_abs() <= 1e-13
        # total degree 2: both sides structurally zero
        assert isinstance(d_A(A, cup(f1, f1)), ZeroForm)


# --- covariant codifferential ------------------------------------------------


def test_delta_A_reduces_to_delta_at_zero_connection():
    g = TorusGrid(3, 4)
    A0 = Connection.zero(g)
    for degree in (1, 2):
        f = make_form(g, degree, "random-mat", seed=degree)
        assert (delta_A(A0, f) - delta(f)).max_abs() == 0.0


def test_delta_A_zero_on_functions():
    g = TorusGrid(2, 2)
    A = Connection.random(g, seed=1)
    out = delta_A(A, make_form(g, 0, "random-mat", seed=2))
    assert out.degree == 0 and out.max_abs() == 0.0


def test_delta_A_three_modes_agree():
    for n, m in GRIDS:
        g = TorusGrid(n, m)
        A = Connection.random(g, seed=n * 3 + m)
        for degree in (1, 2):
            f = make_form(g, degree, "random-mat", seed=degree + n)
            base = delta_A(A, f, mode="via_delta")
            assert (delta_A(A, f, mode="via_star_d") - base).max_abs() <= 1e-13
            assert (delta_A(A, f, mode="via_star_dA") - base).max_abs() <= 1e-13
    with pytest.raises(ValueError):
        delta_A(A, f, mode="bogus")


def test_delta_A_curvature_reproduces_2x2_difference_system():
    # first line of the 2x2 difference system for the delta equation:
    # F12 - F22 + A1_{1,1} F12 - F22 A1_{2,2} = 0, read through the star map
    g = TorusGrid(2, 2)
    A = Connection.random(g, seed=13, scale=0.6)
    F = curvature(A).form
    sys_form = star(delta_A(A, F, mode="via_delta"))

    def a(c, k, s):
        return pairing(A.form, (c, k, s))

    def f(k, s):
        return pairing(F, (k, s))

    expected_line1 = f(1, 2) - f(2, 2) + a(1, 1, 1) @ f(1, 2) - f(2, 2) @ a(1, 2, 2)
    np.testing.assert_allclose(pairing(sys_form, (1, 1, 1)), expected_line1, atol=1e-14)
    # and entrywise across the full system via the residual stencil
    assert (sys_form - residual_delta(A)).max_abs() <= 1e-13


def test_gauged_adjointness():
    for n, m in GRIDS:
        g = TorusGrid(n, m)
        rng = np.random.default_rng(n * 13 + m)
        for _ in range(10):
            seeds = rng.integers(0, 2**31, size=5)
            A = Connection.random(g, seed=int(seeds[0]))
            f0 = make_form(g, 0, "random-mat", seed=int(seeds[1]))
            g1 = make_form(g, 1, "random-mat", seed=int(seeds[2]))
            f1 = make_form(g, 1, "random-mat", seed=int(seeds[3]))
            g2 = make_form(g, 2, "random-mat", seed=int(seeds[4]))
            assert abs(inner(d_A(A, f0), g1) - inner(f0, delta_A(A, g1))) <= 1e-12
            assert abs(inner(d_A(A, f1), g2) - inner(f1, delta_A(A, g2))) <= 1e-12


# --- covariant Laplacian -----------------------------------------------------


def test_laplacian_A_reduces_and_energy_identity():
    g = TorusGrid(3, 3)
    A0 = Connection.zero(g)
    from ymtorus.exterior_calc import laplacian

    for degree in (0, 1, 2):
        f = make_form(g, degree, "random-mat", seed=degree)
        assert (laplacian_A(A0, f) - laplacian(f)).max_abs() == 0.0
    A = Connection.random(g, seed=21)
    for degree in (0, 1, 2):
        f = make_form(g, degree, "random-mat", seed=degree + 5)
        lhs = inner(laplacian_A(A, f), f)
        rhs = 0j
        df = d_A(A, f)
        if not isinstance(df, ZeroForm):
            rhs += inner(df, df)
        if degree > 0:
            deltf = delta_A(A, f)
            rhs += inner(deltf, deltf)
        assert abs(lhs - rhs) <= 1e-12


def test_laplacian_A_self_adjoint():
    g = TorusGrid(3, 5)
    A = Connection.random(g, seed=22)
    for degree in (0, 1, 2):
        f = make_form(g, degree, "random-mat", seed=degree)
        h = make_form(g, degree, "random-mat", seed=degree + 50)
        assert abs(inner(laplacian_A(A, f), h) - inner(f, laplacian_A(A, h))) <= 1e-12


def test_laplacian_A_positivity_on_su2_closed_data():
    # with a zero connection everything stays su(2)-valued, where the
    # quadratic form is a genuine squared norm
    g = TorusGrid(3, 4)
    A0 = Connection.zero(g)
    rng = np.random.default_rng(23)
    for degree in (0, 1, 2):
        for _ in range(20):
            f = make_form(g, degree, "random-su2", seed=int(rng.integers(2**31)))
            df = d_A(A0, f)
            if not isinstance(df, ZeroForm):
                assert float(np.max(su2_deviation(df.coeffs))) <= 1e-9
            val = inner(laplacian_A(A0, f), f)
            assert val.real >= -1e-10
            assert abs(val.imag) <= 1e-12
            # zero quadratic form forces both images to vanish
            if abs(val) <= 1e-12:
                if not isinstance(df, ZeroForm):
                    assert norm_sq(df) <= 1e-12
                if degree > 0:
                    assert norm_sq(delta_A(A0, f)) <= 1e-12


# --- residual operators ------------------------------------------------------


def test_residuals_vanish_for_flat_connections():
    for n, m in GRIDS:
        g = TorusGrid(n, m)
        for A in (Connection.zero(g), constant_connection(g)):
            assert curvature(A).form.max_abs() <= 1e-14
            assert residual_dstar(A).max_abs() <= 1e-12
            assert residual_delta(A).max_abs() <= 1e-12


def test_residual_dstar_displayed_equations_2x2():
    g = TorusGrid(2, 2)
    A = Connection.random(g, seed=31, scale=0.6)
    F = curvature(A).form
    res = residual_dstar(A)

    def a(c, k, s):
        return pairing(A.form, (c, k, s))

    def f(k, s):
        return pairing(F, (k, s))

    # first displayed equation of the star-form system
    expected = f(1, 2) - f(2, 2) + a(1, 1, 1) @ f(1, 2) - f(2, 2) @ a(1, 1, 1)
    np.testing.assert_allclose(pairing(res, (1, 1, 1)), expected, atol=1e-14)


def test_residual_general_stencil_oracles():
    # both families at every site, against pairing-level direct summation
    g = TorusGrid(3, 4)
    A = Connection.random(g, seed=32)
    F = curvature(A).form

    def a(c, k, s):
        return pairing(A.form, (c, k, s))

    def f(k, s):
        return pairing(F, (k, s))

    r_star = residual_dstar(A)
    r_delta = residual_delta(A)
    for k in range(1, 4):
        for s in range(1, 5):
            base1 = f(k, s - 1) - f(k - 1, s - 1)
            base2 = f(k - 1, s) - f(k - 1, s - 1)
            np.testing.assert_allclose(
                pairing(r_star, (1, k, s)),
                base1 + a(1, k, s) @ f(k, s - 1) - f(k - 1, s - 1) @ a(1, k, s),
                atol=1e-14,
            )
            np.testing.assert_allclose(
                pairing(r_star, (2, k, s)),
                base2 + a(2, k, s) @ f(k - 1, s) - f(k - 1, s - 1) @ a(2, k, s),
                atol=1e-14,
            )
            # delta family: identical except the trailing site moves back
            np.testing.assert_allclose(
                pairing(r_delta, (1, k, s)),
                base1 + a(1, k, s) @ f(k, s - 1) - f(k - 1, s - 1) @ a(1, k - 1, s - 1),
                atol=1e-14,
            )
            np.testing.assert_allclose(
                pairing(r_delta, (2, k, s)),
                base2 + a(2, k, s) @ f(k - 1, s) - f(k - 1, s - 1) @ a(2, k - 1, s - 1),
                atol=1e-14,
            )


@pytest.mark.parametrize("n,m", GRIDS)
def test_residual_double_entry(n, m):
    g = TorusGrid(n, m)
    rng = np.random.default_rng(n * 5 + m)
    for _ in range(20):
        A = Connection.random(g, seed=int(rng.integers(2**31)))
        assert (residual_dstar(A) - residual_via_operators(A, "dstar")).max_abs() <= 1e-13
        assert (residual_delta(A) - residual_via_operators(A, "delta")).max_abs() <= 1e-13
        # the delta stencil is the star image of the codifferential residual
        F = curvature(A).form
        assert (star_inv(residual_delta(A)) - delta_A(A, F)).max_abs() <= 1e-13
    with pytest.raises(ValueError):
        residual_via_operators(A, "bogus")
