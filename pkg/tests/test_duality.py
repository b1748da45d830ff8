"""Double-duality parametrizability test, torsion witnesses, Ext modules."""

import pytest

from dgcalc import zoo
from dgcalc.duality import (
    TorsionWitnessError,
    ext_module,
    minimal_parametrization,
    param_test,
)
from dgcalc.engine import FreeElem, module_contains, module_equal
from dgcalc.operators import cc, compose, image_module_equal
from dgcalc.poly import serialize


def test_divergence_is_parametrized_by_the_curl():
    rep = param_test(zoo.div(3))
    assert rep.parametrizable
    assert rep.ext1_zero
    assert rep.ext2_zero
    assert compose(zoo.div(3), rep.parametrization).is_zero()
    assert image_module_equal(rep.parametrization, zoo.curl())
    assert rep.torsion == ()
    assert module_equal(rep.recomputed_cc.rows(), zoo.div(3).rows())


def test_divergence_minimal_parametrization_has_two_potentials():
    mp = minimal_parametrization(zoo.div(3))
    assert mp.source.dim == 2
    assert compose(zoo.div(3), mp).is_zero()
    assert mp.entry_strs() == [["d3", "0"], ["0", "d3"], ["-d1", "-d2"]]
    assert image_module_equal(
        mp, minimal_parametrization(zoo.div(3))
    )


def test_plane_rigid_motions_leave_torsion():
    rep = param_test(zoo.killing(zoo.euclidean(2)))
    assert not rep.parametrizable
    assert not rep.ext1_zero
    assert rep.ext2_zero
    assert rep.potentials == 1
    witnessed = {
        (str(t.row), t.order, serialize(t.annihilator)) for t in rep.torsion
    }
    assert witnessed == {("(0, 1)", 0, "d2"), ("(1, 0)", 0, "d1")}


def test_torsion_annihilators_actually_annihilate():
    for op in (zoo.killing(zoo.euclidean(2)),
               zoo.einstein_lin(zoo.minkowski(4))):
        rep = param_test(op, with_ext2=False)
        rows = op.rows()
        assert rep.torsion
        for t in rep.torsion:
            killed = FreeElem([t.annihilator * p for p in t.row.entries])
            assert not module_contains(rows, t.row)
            assert module_contains(rows, killed)


def test_torsion_witness_search_can_be_exhausted():
    with pytest.raises(TorsionWitnessError):
        param_test(zoo.killing(zoo.euclidean(2)), witness_degree=0)


def test_trace_adjusted_curvature_is_not_parametrizable():
    op = zoo.einstein_lin(zoo.minkowski(4))
    rep = param_test(op, with_ext2=False)
    assert not rep.parametrizable
    assert not rep.ext1_zero
    assert rep.potentials == 4
    assert len(rep.recomputed_cc.matrix) == 20
    assert module_equal(
        rep.recomputed_cc.rows(), zoo.riemann_lin(zoo.minkowski(4)).rows()
    )
    assert len(rep.torsion) == 10
    anns = {serialize(t.annihilator) for t in rep.torsion}
    assert anns == {"d1^2 + d2^2 + d3^2 - d4^2"}
    assert all(t.order == 2 for t in rep.torsion)
    with pytest.raises(ValueError):
        minimal_parametrization(op, report=rep)


def test_stress_equilibrium_is_parametrizable_in_three_variables():
    op = zoo.cauchy(zoo.euclidean(3))
    rep = param_test(op)
    assert rep.parametrizable
    assert rep.ext1_zero
    assert rep.ext2_zero
    assert rep.potentials == 6
    assert compose(op, rep.parametrization).is_zero()
    mp = minimal_parametrization(op, report=rep)
    assert mp.source.dim == 3
    assert mp.order() == 2
    assert compose(op, mp).is_zero()
    assert module_equal(cc(mp).rows(), op.rows())


def test_couple_stress_balance_is_parametrizable():
    eq = zoo.cosserat_equilibrium()
    rep = param_test(eq, with_ext2=False)
    assert rep.parametrizable
    assert rep.ext1_zero
    assert rep.potentials == 3
    assert compose(eq, rep.parametrization).is_zero()


@pytest.mark.parametrize("index, gens", [(0, 0), (1, 1), (2, 3)])
def test_divergence_obstruction_modules_vanish(index, gens):
    rep = ext_module(zoo.div(3), index)
    assert rep.index == index
    assert rep.is_zero
    assert rep.rank == 0
    assert len(rep.generators) == gens


def test_first_obstruction_of_plane_rigid_motions_is_nonzero():
    rep = ext_module(zoo.killing(zoo.euclidean(2)), 1)
    assert not rep.is_zero
    assert rep.rank == 0
    assert rep.generators
    assert rep.relations


def test_report_and_direct_ext_agree():
    for op, expect in [
        (zoo.div(3), True),
        (zoo.killing(zoo.euclidean(2)), False),
        (zoo.einstein_lin(zoo.minkowski(4)), False),
    ]:
        assert param_test(op, with_ext2=False).ext1_zero is expect
        assert ext_module(op, 1).is_zero is expect
