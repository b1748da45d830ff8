"""Command-line interface: subcommands, exit codes, file output, determinism."""

import json

import pytest

from dgcalc import cli, zoo
from dgcalc.operators import compose, operator_from_dict, save_operator


@pytest.fixture
def ops_dir(tmp_path):
    d = tmp_path / "ops"
    d.mkdir()
    save_operator(zoo.grad(3), d / "grad3.json")
    save_operator(zoo.div(3), d / "div3.json")
    save_operator(zoo.curl(), d / "curl3.json")
    save_operator(zoo.killing(zoo.euclidean(2)), d / "killing_e2.json")
    return d


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- zoo -----------------------------------------------------------------------


def test_zoo_listing_names_every_operator(capsys):
    code, out, err = run(capsys, "zoo")
    assert code == 0
    for key in zoo.ZOO:
        assert key in out
    assert "--lam --mu" in out


def test_zoo_prints_an_operator_document(capsys):
    code, out, _ = run(capsys, "zoo", "div", "--n", "3")
    assert code == 0
    assert operator_from_dict(json.loads(out)) == zoo.div(3)


def test_zoo_writes_into_a_directory(capsys, tmp_path):
    code, out, _ = run(
        capsys, "zoo", "einstein", "--n", "4", "--metric", "minkowski",
        "-o", str(tmp_path) + "/",
    )
    assert code == 0
    target = tmp_path / "einstein_m4.json"
    assert target.exists()
    assert str(target) in out
    assert operator_from_dict(json.loads(target.read_text())) \
        == zoo.einstein_lin(zoo.minkowski(4))


def test_zoo_rational_moduli(capsys):
    code, out, _ = run(capsys, "zoo", "lame", "--n", "2",
                       "--lam", "5/2", "--mu", "1/3")
    assert code == 0
    assert operator_from_dict(json.loads(out)) == zoo.lame("5/2", "1/3", 2)


# -- algebra subcommands -----------------------------------------------------------


def test_cc_output_annihilates_the_input(capsys, ops_dir):
    code, out, _ = run(capsys, "cc", str(ops_dir / "grad3.json"))
    assert code == 0
    c = operator_from_dict(json.loads(out))
    assert compose(c, zoo.grad(3)).is_zero()
    assert not c.is_zero()


def test_adjoint_twice_returns_the_operator(capsys, ops_dir, tmp_path):
    first = tmp_path / "once.json"
    code, _, _ = run(capsys, "adjoint", str(ops_dir / "killing_e2.json"),
                     "-o", str(first))
    assert code == 0
    code, out, _ = run(capsys, "adjoint", str(first))
    assert code == 0
    assert operator_from_dict(json.loads(out)) == zoo.killing(zoo.euclidean(2))


def test_compose_matches_library_composition(capsys, ops_dir):
    code, out, _ = run(capsys, "compose", str(ops_dir / "div3.json"),
                       str(ops_dir / "curl3.json"))
    assert code == 0
    assert operator_from_dict(json.loads(out)).is_zero()


def test_rank_reports_the_matrix_profile(capsys, ops_dir):
    code, out, _ = run(capsys, "rank", str(ops_dir / "curl3.json"))
    assert code == 0
    doc = json.loads(out)
    assert doc == {"operator": "curl3", "rows": 3, "columns": 3, "rank": 2}


def test_resolve_writes_summary_and_steps(capsys, ops_dir, tmp_path):
    out_dir = tmp_path / "res"
    code, out, _ = run(capsys, "resolve", str(ops_dir / "grad3.json"),
                       "-o", str(out_dir))
    assert code == 0
    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["dims"] == [3, 3, 1]
    assert summary["complete"] is True
    assert summary["euler_characteristic"] == 0
    step_files = sorted(p.name for p in out_dir.glob("step*.json"))
    assert step_files == ["step00.json", "step01.json", "step02.json"]
    step0 = json.loads((out_dir / "step00.json").read_text())
    assert step0["index"] == 0
    assert step0["rows"] == [["d1"], ["d2"], ["d3"]]
    step2 = json.loads((out_dir / "step02.json").read_text())
    assert len(step2["rows"]) == 1


def test_paramtest_and_minparam(capsys, ops_dir):
    code, out, _ = run(capsys, "paramtest", str(ops_dir / "div3.json"))
    assert code == 0
    doc = json.loads(out)
    assert doc["parametrizable"] is True
    assert doc["torsion"] == []
    code, out, _ = run(capsys, "minparam", str(ops_dir / "div3.json"))
    assert code == 0
    mp = operator_from_dict(json.loads(out))
    assert mp.source.dim == 2
    assert compose(zoo.div(3), mp).is_zero()


def test_paramtest_reports_torsion(capsys, ops_dir):
    code, out, _ = run(capsys, "paramtest", str(ops_dir / "killing_e2.json"))
    assert code == 0
    doc = json.loads(out)
    assert doc["parametrizable"] is False
    assert len(doc["torsion"]) == 2
    anns = {t["annihilator"] for t in doc["torsion"]}
    assert anns == {"d1", "d2"}


def test_ext_subcommand(capsys, ops_dir):
    code, out, _ = run(capsys, "ext", str(ops_dir / "div3.json"), "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["index"] == 1
    assert doc["is_zero"] is True
    assert doc["rank"] == 0


def test_factor_finds_the_left_factor(capsys, ops_dir, tmp_path):
    lap = compose(zoo.div(3), zoo.grad(3))
    save_operator(lap, tmp_path / "lap.json")
    code, out, _ = run(capsys, "factor", str(tmp_path / "lap.json"),
                       str(ops_dir / "grad3.json"))
    assert code == 0
    q = operator_from_dict(json.loads(out))
    assert compose(q, zoo.grad(3)) == lap


# -- exit codes ----------------------------------------------------------------------


def test_malformed_document_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nvars": 0}')
    code, _, err = run(capsys, "adjoint", str(bad))
    assert code == 2
    assert err


def test_shape_mismatch_exits_3(capsys, ops_dir):
    code, _, err = run(capsys, "compose", str(ops_dir / "killing_e2.json"),
                       str(ops_dir / "div3.json"))
    assert code == 3
    assert "variable counts" in err


def test_budget_exhaustion_exits_4(capsys, ops_dir, monkeypatch):
    monkeypatch.setenv("DGCALC_BUDGET_DEGREE", "1")
    code, _, err = run(capsys, "resolve", str(ops_dir / "killing_e2.json"))
    assert code == 4
    assert err


def test_failed_factorization_exits_5(capsys, ops_dir):
    code, _, err = run(capsys, "factor", str(ops_dir / "div3.json"),
                       str(ops_dir / "curl3.json"))
    assert code == 5
    assert "row 0" in err


def test_unknown_zoo_name_exits_1(capsys):
    code, _, err = run(capsys, "zoo", "nonsense")
    assert code == 1
    assert err


# -- report ---------------------------------------------------------------------------


def test_report_filtered_run_passes(capsys):
    code, out, _ = run(capsys, "report", "--only", "c09")
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith("PASS")]
    assert len(lines) == 2
    assert "checks passed" in out


def test_report_json_form(capsys):
    code, out, _ = run(capsys, "report", "--only", "c09", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["failed"] == 0
    assert doc["passed"] == 2
    assert all(row["passed"] for row in doc["checks"])


def test_report_with_no_matching_checks_fails(capsys):
    code, _, err = run(capsys, "report", "--only", "zzz")
    assert code == 1


# -- determinism -----------------------------------------------------------------------


def test_outputs_are_byte_identical_across_runs_and_threads(capsys, ops_dir, tmp_path):
    save_operator(zoo.killing(zoo.minkowski(3)), tmp_path / "k.json")
    runs = []
    for threads, sub in (("1", "a"), ("4", "b")):
        out_dir = tmp_path / sub
        code, _, _ = run(capsys, "resolve", str(tmp_path / "k.json"),
                         "--threads", threads, "-o", str(out_dir))
        assert code == 0
        blob = b"".join(
            p.read_bytes() for p in sorted(out_dir.iterdir())
        )
        runs.append(blob)
    assert runs[0] == runs[1]
    first = run(capsys, "paramtest", str(ops_dir / "div3.json"))
    second = run(capsys, "paramtest", str(ops_dir / "div3.json"))
    assert first == second
