"""Operators: bundles, matrix algebra, adjoints, factorization, JSON."""

import json
from fractions import Fraction

import pytest

from dgcalc import zoo
from dgcalc.engine import module_equal, syzygies
from dgcalc.operators import (
    Bundle,
    LinDiffOp,
    NotFactorable,
    OpFormatError,
    ShapeMismatch,
    adjoint,
    cc,
    compose,
    factor_through,
    image_module_equal,
    is_self_adjoint,
    load_operator,
    operator_from_dict,
    operator_json,
    order_profile,
    save_operator,
    scale,
    symbol_at,
)
from dgcalc.poly import parse


def mk(name, nvars, width, entries):
    """Build an operator from rows of strings over simple unit-weight bundles."""
    rows = [[parse(s, nvars) for s in row] for row in entries]
    src = Bundle.simple("src", width)
    tgt = Bundle.simple("tgt", len(entries))
    return LinDiffOp(name, nvars, src, tgt, rows)


# -- bundles ---------------------------------------------------------------------


def test_bundle_rejects_empty_and_duplicates():
    with pytest.raises(ValueError):
        Bundle("b", [])
    with pytest.raises(ValueError):
        Bundle("b", [("u", 1), ("u", 2)])
    with pytest.raises(ValueError):
        Bundle("b", [("u", 0)])
    with pytest.raises(ValueError):
        Bundle("b", [("u", -2)])


def test_bundle_equality_ignores_name():
    a = Bundle("first", [("u", 1), ("v", Fraction(1, 2))])
    b = Bundle("second", [("u", 1), ("v", Fraction(1, 2))])
    assert a == b
    assert hash(a) == hash(b)
    assert a != Bundle("first", [("u", 1), ("v", 1)])
    assert Bundle.simple("s", 3).labels == ("1", "2", "3")
    assert Bundle.simple("s", 3).weights == (1, 1, 1)


# -- construction and structure ----------------------------------------------------


def test_operator_shape_validation():
    src = Bundle.simple("s", 2)
    tgt = Bundle.simple("t", 1)
    good = [[parse("d1", 2), parse("d2", 2)]]
    LinDiffOp("ok", 2, src, tgt, good)
    with pytest.raises(ShapeMismatch):
        LinDiffOp("bad", 2, src, Bundle.simple("t", 2), good)
    with pytest.raises(ShapeMismatch):
        LinDiffOp("bad", 2, Bundle.simple("s", 3), tgt, good)
    with pytest.raises(ShapeMismatch):
        LinDiffOp("bad", 3, src, tgt, good)


def test_operator_equality_excludes_name():
    a = mk("one", 2, 2, [["d1", "d2"]])
    b = mk("two", 2, 2, [["d1", "d2"]])
    assert a == b
    assert hash(a) == hash(b)
    assert a.with_name("three") == a
    assert a != mk("one", 2, 2, [["d1", "0"]])


def test_rows_columns_order():
    op = mk("m", 2, 2, [["d1^2", "d2"], ["0", "1"]])
    assert [str(r) for r in op.rows()] == ["(d1^2, d2)", "(0, 1)"]
    assert [str(c) for c in op.columns()] == ["(d1^2, 0)", "(d2, 1)"]
    assert op.order() == 2
    assert op.row_degrees() == (2, 0)
    assert order_profile(op) == (0, 2)
    assert not op.is_zero()
    assert mk("z", 2, 1, [["0"]]).is_zero()


# -- algebra -------------------------------------------------------------------------


def test_compose_is_matrix_product():
    div = mk("div", 2, 2, [["d1", "d2"]])
    grad = mk("grad", 2, 1, [["d1"], ["d2"]])
    lap = compose(div, grad)
    assert lap.entry_strs() == [["d1^2 + d2^2"]]
    assert lap.name == "compose(div,grad)"
    assert lap.source == grad.source
    assert lap.target == div.target


def test_compose_shape_errors():
    with pytest.raises(ShapeMismatch):
        compose(mk("a", 2, 1, [["d1"]]), mk("b", 3, 1, [["d1"]]))
    with pytest.raises(ShapeMismatch):
        compose(mk("a", 2, 2, [["d1", "d2"]]), mk("b", 2, 1, [["d1"]]))


def test_scale_multiplies_every_entry():
    op = scale(mk("a", 2, 2, [["d1", "d2"]]), Fraction(-1, 2))
    assert op.entry_strs() == [["-1/2*d1", "-1/2*d2"]]
    assert scale(op, -2) == mk("a", 2, 2, [["d1", "d2"]])


def test_adjoint_moves_weights_across():
    tgt = Bundle("pair", [("a", 1), ("b", 2)])
    op = LinDiffOp("g", 2, Bundle.simple("s", 1), tgt,
                   [[parse("d1", 2)], [parse("d2", 2)]])
    ad = adjoint(op)
    assert ad.entry_strs() == [["-d1", "-2*d2"]]
    assert ad.source == tgt
    assert adjoint(ad) == op


def test_adjoint_is_involutive_and_contravariant():
    k = zoo.killing(zoo.euclidean(2))
    r = cc(k)
    assert adjoint(adjoint(k)) == k
    assert adjoint(compose(r, k)) == compose(adjoint(k), adjoint(r))


def test_self_adjointness():
    lap = mk("lap", 2, 1, [["d1^2 + d2^2"]])
    assert is_self_adjoint(lap)
    assert not is_self_adjoint(mk("g", 2, 1, [["d1"], ["d2"]]))
    assert not is_self_adjoint(mk("t", 2, 1, [["d1"]]))


# -- compatibility conditions --------------------------------------------------------


def test_cc_annihilates_and_is_complete():
    g = zoo.grad(3)
    c = cc(g)
    assert compose(c, g).is_zero()
    assert module_equal(c.rows(), syzygies(g.rows()))
    assert c.source == g.target


def test_cc_of_free_rows_is_zero_operator():
    op = mk("free", 2, 2, [["d1", "0"], ["0", "d2"]])
    c = cc(op)
    assert c.is_zero()
    assert c.target.dim == 1
    assert c.source.dim == 2
    assert compose(c, op).is_zero()


# -- factorization --------------------------------------------------------------------


def test_factor_recovers_left_factor():
    b = zoo.grad(3)
    q = mk("q", 3, 3, [["d1", "d2", "d3"], ["1", "0", "d1*d3"]])
    a = compose(q, b)
    out = factor_through(a, b)
    assert compose(out, b) == a
    assert out.source == b.target
    assert out.target == a.target


def test_factor_failure_reports_row_and_remainder():
    a = mk("a", 3, 1, [["d1"], ["1"]])
    b = mk("b", 3, 1, [["d1"], ["d2"]])
    with pytest.raises(NotFactorable) as info:
        factor_through(a, b)
    assert info.value.row_index == 1
    assert str(info.value.remainder) == "(1)"


def test_factor_shape_errors():
    with pytest.raises(ShapeMismatch):
        factor_through(mk("a", 2, 1, [["d1"]]), mk("b", 3, 1, [["d1"]]))
    with pytest.raises(ShapeMismatch):
        factor_through(mk("a", 2, 2, [["d1", "d2"]]), mk("b", 2, 1, [["d1"]]))


# -- inspection ------------------------------------------------------------------------


def test_symbol_at_evaluates_entries():
    g = zoo.grad(3)
    assert symbol_at(g, [1, 2, 3]) == [[1], [2], [3]]
    assert symbol_at(g, [Fraction(1, 2), 0, 0]) == [[Fraction(1, 2)], [0], [0]]
    with pytest.raises(ShapeMismatch):
        symbol_at(g, [1, 2])


def test_image_module_comparison():
    c = zoo.curl()
    assert image_module_equal(c, scale(c, 7))
    assert not image_module_equal(zoo.grad(3), c)
    assert not image_module_equal(c, zoo.grad(2))


# -- serialization ----------------------------------------------------------------------


def test_json_round_trip_is_byte_exact():
    ops = [
        zoo.killing(zoo.minkowski(4)),
        zoo.curl(),
        zoo.hooke2d(1, 1),
    ]
    for op in ops:
        text = operator_json(op)
        back = operator_from_dict(json.loads(text))
        assert back == op
        assert back.name == op.name
        assert operator_json(back) == text


def test_provenance_note_survives_the_dict_form():
    op = zoo.grad(2)
    doc = json.loads(operator_json(op, provenance="hand-checked"))
    assert doc["provenance"] == "hand-checked"
    assert operator_from_dict(doc) == op
    assert "provenance" not in json.loads(operator_json(op))


def test_save_and_load(tmp_path):
    op = zoo.conformal_killing(zoo.euclidean(3))
    path = tmp_path / "ck.json"
    save_operator(op, path)
    assert load_operator(path) == op
    with pytest.raises(OpFormatError):
        load_operator(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(OpFormatError):
        load_operator(bad)


@pytest.mark.parametrize("mangle", [
    lambda d: [],
    lambda d: {k: v for k, v in d.items() if k != "matrix"},
    lambda d: {**d, "nvars": 0},
    lambda d: {**d, "nvars": "3"},
    lambda d: {**d, "matrix": "rows"},
    lambda d: {**d, "matrix": [d["matrix"][0] + ["d1"]] + d["matrix"][1:]},
    lambda d: {**d, "matrix": [[5] + d["matrix"][0][1:]] + d["matrix"][1:]},
    lambda d: {**d, "matrix": [["x1"] + d["matrix"][0][1:]] + d["matrix"][1:]},
    lambda d: {**d, "source": {"components": [{"label": "u"}]}},
])
def test_malformed_documents_are_rejected(mangle):
    doc = json.loads(operator_json(zoo.curl()))
    with pytest.raises(OpFormatError):
        operator_from_dict(mangle(doc))
