"""The operator zoo: metrics, bundles, curvature chain, elasticity, forms."""

from fractions import Fraction
from math import comb

import pytest

from dgcalc import zoo
from dgcalc.engine import module_equal
from dgcalc.operators import adjoint, cc, compose, is_self_adjoint, scale


# -- metrics --------------------------------------------------------------------


def test_metric_tables():
    e3 = zoo.euclidean(3)
    assert e3.n == 3 and e3.tag == "e"
    assert e3.matrix == tuple(
        tuple(Fraction(int(i == j)) for j in range(3)) for i in range(3)
    )
    m4 = zoo.minkowski(4)
    assert m4.tag == "m"
    assert m4[4, 4] == -1
    assert m4[1, 1] == 1
    assert m4[1, 2] == 0
    assert m4.inverse == m4.matrix
    assert e3.inv(2, 2) == 1
    with pytest.raises(ValueError):
        zoo.euclidean(0)
    with pytest.raises(ValueError):
        zoo.minkowski(1)


# -- bundles --------------------------------------------------------------------


def test_symmetric_bundle_layout():
    assert zoo.sym_pairs(3) == [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]
    b = zoo.sym_bundle(3)
    assert b.labels == ("11", "12", "13", "22", "23", "33")
    assert b.weights == (1, 2, 2, 1, 2, 1)
    assert zoo.vector_bundle(4).dim == 4
    assert zoo.scalar_bundle().dim == 1


@pytest.mark.parametrize("n, expect", [(2, 1), (3, 6), (4, 20), (5, 50), (6, 105)])
def test_curvature_bundle_dimension(n, expect):
    assert zoo.riemann_bundle(n, "F1").dim == expect
    assert zoo.dims(n).f1 == expect


@pytest.mark.parametrize("n, expect", [(3, 0), (4, 10), (5, 35)])
def test_trace_free_curvature_dimension(n, expect):
    assert zoo.dims(n).f1hat == expect


# -- first-order geometry ---------------------------------------------------------


def test_killing_in_the_plane():
    k = zoo.killing(zoo.euclidean(2))
    assert k.entry_strs() == [["2*d1", "0"], ["d2", "d1"], ["0", "2*d2"]]
    assert k.source.labels == ("1", "2")
    assert k.target.labels == ("11", "12", "22")


def test_stress_divergence_is_minus_half_the_adjoint():
    for g in (zoo.euclidean(2), zoo.euclidean(3), zoo.minkowski(4)):
        assert zoo.cauchy(g) == scale(adjoint(zoo.killing(g)), Fraction(-1, 2))
    assert zoo.cauchy(zoo.euclidean(2)).entry_strs() == [
        ["d1", "d2", "0"],
        ["0", "d1", "d2"],
    ]
    assert zoo.cauchy(zoo.euclidean(3)).entry_strs()[0] == [
        "d1", "d2", "d3", "0", "0", "0",
    ]


def test_conformal_killing_shapes():
    assert len(zoo.conformal_killing(zoo.euclidean(3)).matrix) == 5
    wk = zoo.weyl_killing(zoo.euclidean(3))
    assert len(wk.matrix) == 8
    assert wk.source.dim == 3


# -- the curvature chain ------------------------------------------------------------


@pytest.mark.parametrize("g", [
    zoo.euclidean(2), zoo.euclidean(3), zoo.minkowski(3),
])
def test_curvature_rows_are_the_killing_conditions(g):
    assert module_equal(
        zoo.riemann_lin(g).rows(), cc(zoo.killing(g)).rows()
    )


@pytest.mark.parametrize("g", [zoo.euclidean(3), zoo.minkowski(4)])
def test_curvature_operators_annihilate_infinitesimal_motions(g):
    k = zoo.killing(g)
    for op in (zoo.riemann_lin(g), zoo.ricci_lin(g), zoo.scalar_lin(g),
               zoo.einstein_lin(g)):
        assert compose(op, k).is_zero()
    if g.n >= 4:
        assert compose(zoo.weyl_lin(g), k).is_zero()


@pytest.mark.parametrize("g", [zoo.euclidean(3), zoo.minkowski(4)])
def test_trace_adjusted_curvature_is_self_adjoint(g):
    assert is_self_adjoint(zoo.einstein_lin(g))
    assert not is_self_adjoint(zoo.ricci_lin(g))


@pytest.mark.parametrize("g", [zoo.euclidean(3), zoo.minkowski(4)])
def test_trace_flip_relates_the_two_curvatures(g):
    assert compose(zoo.c_map(g), zoo.ricci_lin(g)) == zoo.einstein_lin(g)
    back = compose(zoo.c_map_inverse(g), zoo.c_map(g))
    k = g.n * (g.n + 1) // 2
    assert back.entry_strs() == [
        ["1" if i == j else "0" for j in range(k)] for i in range(k)
    ]


def test_trace_flip_has_no_inverse_in_the_plane():
    with pytest.raises(ValueError):
        zoo.c_map_inverse(zoo.euclidean(2))


def test_weyl_shapes_and_wave_composite():
    w = zoo.weyl_lin(zoo.minkowski(4))
    assert len(w.matrix) == 10
    assert w.source.dim == 10
    bw = zoo.box_weyl(zoo.minkowski(4))
    assert bw.name == "box_weyl_m4"
    assert len(bw.matrix) == 10 and bw.source.dim == 10
    assert bw.order() == 4
    assert zoo.dalembertian(zoo.minkowski(4)).entry_strs() == [
        ["d1^2 + d2^2 + d3^2 - d4^2"]
    ]


# -- vector calculus and forms --------------------------------------------------------


def test_gradient_divergence_curl_complexes():
    assert zoo.div(3).entry_strs() == [["d1", "d2", "d3"]]
    assert compose(zoo.div(3), zoo.curl()).is_zero()
    assert compose(zoo.curl(), zoo.grad(3)).is_zero()
    assert zoo.exterior_derivative(3, 0).matrix == zoo.grad(3).matrix


@pytest.mark.parametrize("n, r", [(3, 0), (3, 1), (4, 0), (4, 1), (4, 2)])
def test_form_derivative_squares_to_zero(n, r):
    inner = zoo.exterior_derivative(n, r)
    assert len(inner.matrix) == comb(n, r + 1)
    assert inner.source.dim == comb(n, r)
    if r + 1 < n:
        outer = zoo.exterior_derivative(n, r + 1)
        assert compose(outer, inner).is_zero()


@pytest.mark.parametrize("n, r", [(3, 0), (3, 1), (4, 1)])
def test_form_conditions_are_the_next_derivative(n, r):
    assert module_equal(
        cc(zoo.exterior_derivative(n, r)).rows(),
        zoo.exterior_derivative(n, r + 1).rows(),
    )


def test_form_degree_bounds():
    with pytest.raises(ValueError):
        zoo.exterior_derivative(3, 3)
    with pytest.raises(ValueError):
        zoo.exterior_derivative(3, -1)


# -- elasticity -------------------------------------------------------------------------


def test_elastostatics_display_and_symmetry():
    op = zoo.lame(1, 1, 2)
    assert op.entry_strs() == [
        ["3*d1^2 + d2^2", "2*d1*d2"],
        ["2*d1*d2", "d1^2 + 3*d2^2"],
    ]
    assert is_self_adjoint(op)
    assert is_self_adjoint(zoo.lame(Fraction(5, 2), 1, 3))
    with pytest.raises(ValueError):
        zoo.lame(1, 0, 2)


def test_plane_stress_law_inverts():
    prod = compose(zoo.hooke2d(1, 1), zoo.hooke2d_inverse(1, 1))
    assert prod.entry_strs() == [
        ["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"],
    ]
    prod2 = compose(
        zoo.hooke2d_inverse(2, Fraction(1, 3)), zoo.hooke2d(2, Fraction(1, 3))
    )
    assert prod2.entry_strs() == [
        ["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"],
    ]


def test_biharmonic_identity_at_unit_moduli():
    r = zoo.riemann_lin(zoo.euclidean(2))
    out = compose(r, compose(zoo.hooke2d_inverse(1, 1), adjoint(r)))
    assert out.entry_strs() == [["3/4*d1^4 + 3/2*d1^2*d2^2 + 3/4*d2^4"]]


# -- planar Cosserat ---------------------------------------------------------------------


def test_cosserat_displays():
    sp = zoo.cosserat_spencer()
    assert sp.entry_strs() == [
        ["d1", "0", "0"],
        ["d2", "0", "-1"],
        ["0", "d1", "1"],
        ["0", "d2", "0"],
        ["0", "0", "d1"],
        ["0", "0", "d2"],
    ]
    eq = zoo.cosserat_equilibrium()
    assert eq == scale(adjoint(sp), -1)
    assert eq.entry_strs() == [
        ["d1", "d2", "0", "0", "0", "0"],
        ["0", "0", "d1", "d2", "0", "0"],
        ["0", "1", "-1", "0", "d1", "d2"],
    ]
    par = zoo.cosserat_parametrization()
    assert compose(eq, par).is_zero()


def test_cosserat_record_bundles_the_triple():
    rec = zoo.cosserat2d()
    assert rec.spencer_D1 == zoo.cosserat_spencer()
    assert rec.equilibrium == zoo.cosserat_equilibrium()
    assert rec.parametrization == zoo.cosserat_parametrization()


# -- dimension bookkeeping ----------------------------------------------------------------


def test_group_dimensions_in_the_plane():
    t = zoo.dims(2)
    assert t.group_isometry == 3
    assert t.group_homothety == 4
    assert t.group_conformal == 6
    assert zoo.dims(4).group_isometry == 10


def test_jet_complex_split():
    table = zoo.diagram1_table()
    assert table["full"] == (20, 30, 12)
    t = zoo.dims(2)
    assert tuple(t.spencer_full_dim(r, 3, 2) for r in range(3)) == (20, 30, 12)
    for group in table["groups"]:
        for s, j, f in zip(group["spencer"], group["janet"], table["full"]):
            assert s + j == f
    names = [g["name"] for g in table["groups"]]
    assert names == ["isometry", "homothety", "conformal"]
    assert [g["dim"] for g in table["groups"]] == [3, 4, 6]


# -- registry -------------------------------------------------------------------------------


def test_registry_builds_match_direct_constructors():
    assert zoo.build("killing", n=2) == zoo.killing(zoo.euclidean(2))
    assert (
        zoo.build("einstein", n=4, metric="minkowski")
        == zoo.einstein_lin(zoo.minkowski(4))
    )
    assert zoo.build("curl") == zoo.curl()
    assert zoo.build("grad", n=3) == zoo.grad(3)
    assert zoo.build("exterior_derivative", n=4, r=1) == zoo.exterior_derivative(4, 1)
    assert zoo.build("lame", n=2, lam=1, mu=1) == zoo.lame(1, 1, 2)
    assert zoo.build("hooke2d", lam=2, mu=3) == zoo.hooke2d(2, 3)
    assert zoo.build("cosserat_equilibrium") == zoo.cosserat_equilibrium()


def test_registry_error_cases():
    with pytest.raises(KeyError):
        zoo.build("nonsense")
    with pytest.raises(ValueError):
        zoo.build("killing")
    with pytest.raises(ValueError):
        zoo.build("killing", n=3, metric="hyperbolic")


def test_registry_covers_every_entry():
    assert len(zoo.ZOO) == 23
    for name, entry in zoo.ZOO.items():
        assert entry.key == name
        assert entry.summary
        op = zoo.build(
            name,
            n=4 if entry.needs_metric or entry.needs_n else None,
            metric="minkowski" if entry.needs_metric else "euclidean",
            r=1,
        )
        assert op.nvars >= 1
        assert not all(p.is_zero() for row in op.matrix for p in row)
