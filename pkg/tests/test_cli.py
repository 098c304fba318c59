import json

import pytest

from loomlab.cli import EXIT_BUDGET, EXIT_FAILED, EXIT_OK, EXIT_USAGE, ExprError, construct, main
from loomlab.formats import hypergraph_to_json, loom_to_json, write_json
from loomlab.loom import Loom
from loomlab.weave import fano_plane, grid_loom, loom_V, petersen, pm_hypergraph, star_hypergraph


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    G = grid_loom(3)
    paths = {}
    for name, obj in (
        ("gridA", hypergraph_to_json(G.A)),
        ("gridB", hypergraph_to_json(G.B)),
        ("grid", loom_to_json(G)),
        ("fano", hypergraph_to_json(fano_plane())),
        ("petA", hypergraph_to_json(pm_hypergraph(petersen()))),
        ("petB", hypergraph_to_json(star_hypergraph(petersen()))),
        ("petersen", hypergraph_to_json(petersen())),
    ):
        p = tmp_path / f"{name}.json"
        write_json(p, obj)
        paths[name] = str(p)
    return paths


# ---------------------------------------------------------------------------
# compute


def test_compute_nustar_fano(capsys, files):
    code, out, _ = run(capsys, "--json", "compute", "nustar", files["fano"])
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["value"] == "7/3"
    assert data["primal"] and data["dual"]


def test_compute_human_output_is_one_based(capsys, files):
    code, out, _ = run(capsys, "compute", "tau", files["gridA"])
    assert code == EXIT_OK
    assert "tau = 3" in out
    assert "{0" not in out


def test_compute_chistar_petersen(capsys, files):
    code, out, _ = run(capsys, "--json", "compute", "chistar", files["petersen"])
    assert code == EXIT_OK
    assert json.loads(out)["value"] == "3/1"


def test_compute_budget_exceeded(capsys, tmp_path):
    from loomlab.weave import complete_graph

    p = tmp_path / "k8.json"
    write_json(p, hypergraph_to_json(pm_hypergraph(complete_graph(8))))
    code, _, err = run(capsys, "--json", "--budget", "3", "compute", "tau", str(p))
    assert code == EXIT_BUDGET
    assert json.loads(err)["exit_code"] == EXIT_BUDGET


# ---------------------------------------------------------------------------
# verify and closure


def test_verify_grid_from_two_files(capsys, files):
    code, out, _ = run(capsys, "verify", "loom", files["gridA"], files["gridB"])
    assert code == EXIT_OK
    assert "(3,3)-loom" in out
    assert "FAIL" not in out


def test_verify_petersen_pair_fails(capsys, files):
    code, out, _ = run(capsys, "--json", "verify", "loom", files["petA"], files["petB"])
    assert code == EXIT_FAILED
    data = json.loads(out)
    assert data["loom"] is False
    failed = [c for c in data["report"]["checks"] if c["passed"] is False]
    assert [c["name"] for c in failed] == ["B_equals_CsA"]
    assert len(failed[0]["witness"]["missing"]) == 5


def test_closure_petersen(capsys, files, tmp_path):
    out_path = tmp_path / "pl.json"
    code, out, _ = run(capsys, "--json", "closure", files["petA"], files["petB"], "-o", str(out_path))
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["result"]["r"] == 5 and data["result"]["s"] == 3
    assert len(data["result"]["B"]["edges"]) == 15
    code, _, _ = run(capsys, "verify", "loom", str(out_path))
    assert code == EXIT_OK


def test_verify_certificate_round_trip(capsys, files, tmp_path):
    for q in ("tau", "nu", "nustar"):
        code, out, _ = run(capsys, "--json", "compute", q, files["fano"])
        cert = tmp_path / f"{q}.json"
        cert.write_text(out)
        code, out, _ = run(capsys, "--json", "verify", "cert", files["fano"], str(cert))
        assert code == EXIT_OK, out
        assert json.loads(out)["ok"]


def test_verify_bad_certificate(capsys, files, tmp_path):
    cert = tmp_path / "bad.json"
    cert.write_text(json.dumps({"quantity": "tau", "value": 2, "witness": [[0, 1]]}))
    code, _, _ = run(capsys, "verify", "cert", files["fano"], str(cert))
    assert code == EXIT_FAILED


# ---------------------------------------------------------------------------
# construct


def test_construct_expressions():
    assert isinstance(construct("gridloom(3)"), Loom)
    L = construct(" compose2( vloom(2) , vloom(2) ) ")
    assert (L.r, L.s) == (2, 2)
    L = construct("graphloom(kbip(3))")
    assert (L.r, L.s) == (3, 3)
    assert construct("fano").n == 7
    assert len(construct("trblow(petersen)")) == 45


def test_construct_errors_report_position():
    with pytest.raises(ExprError) as info:
        construct("gridloom(3")
    assert "position" in str(info.value)
    with pytest.raises(ExprError):
        construct("nosuch(1)")


def test_construct_output_accepted_by_other_verbs(capsys, tmp_path):
    p = tmp_path / "vane.json"
    assert run(capsys, "construct", "vane33", "-o", str(p))[0] == EXIT_OK
    assert run(capsys, "verify", "loom", str(p))[0] == EXIT_OK
    assert run(capsys, "closure", str(p), str(p))[0] == EXIT_OK
    assert run(capsys, "compute", "nustar", str(p))[0] == EXIT_OK
    code, out, _ = run(capsys, "audit", str(p))
    # the fractional parts hold; the integral cover bound does not for this loom
    assert code == EXIT_FAILED
    assert "FAIL  gl_bound" in out


def test_construct_blowup_spec(capsys, tmp_path):
    G = grid_loom(2)
    spec = {
        "P": {"A": hypergraph_to_json(G.A), "B": hypergraph_to_json(G.B)},
        "parts": [loom_to_json(loom_V(2))] * 4,
    }
    p = tmp_path / "spec.json"
    write_json(p, spec)
    L = construct(f"blowup({p})")
    assert (L.r, L.s) == (4, 2)


def test_construct_graph_loom_failure(capsys):
    code, _, _ = run(capsys, "construct", "graphloom(trblow(petersen))")
    assert code == EXIT_FAILED


def test_audit_single_edge_loom(capsys, tmp_path):
    p = tmp_path / "v3.json"
    run(capsys, "construct", "vloom(3)", "-o", str(p))
    code, out, _ = run(capsys, "audit", str(p))
    assert code == EXIT_OK, out


# ---------------------------------------------------------------------------
# classify, battery


def test_classify_r2_and_diff(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    code, out, _ = run(capsys, "classify", "r2", "--r", "4", "-o", str(a))
    assert code == EXIT_OK
    assert "classes: 5" in out
    run(capsys, "classify", "r2", "--r", "4", "-o", str(b))
    assert a.read_bytes() == b.read_bytes()
    assert run(capsys, "classify", "diff", str(a), str(b))[0] == EXIT_OK
    run(capsys, "classify", "r2", "--r", "3", "-o", str(b))
    assert run(capsys, "classify", "diff", str(a), str(b))[0] == EXIT_FAILED


def test_classify_33_summary(capsys):
    code, out, _ = run(capsys, "classify", "33")
    assert code == EXIT_OK
    assert "indecomposable classes: 2" in out


def test_battery_json_is_byte_stable(capsys):
    first = run(capsys, "--json", "battery", "--count", "30", "--seed", "4", "--r", "2")
    second = run(capsys, "--json", "battery", "--count", "30", "--seed", "4", "--r", "2")
    assert first[0] == EXIT_OK
    assert first[1] == second[1]


# ---------------------------------------------------------------------------
# usage errors


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["compute", "size", "x.json"],
        ["classify", "r2"],
        ["verify", "loom", "a", "b", "c"],
        ["--threads", "0", "battery"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_usage_error_json_on_stderr(capsys):
    code, out, err = run(capsys, "--json", "construct", "gridloom(")
    assert code == EXIT_USAGE
    data = json.loads(err)
    assert data["error"] == "usage" and "position" in data["message"]


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "compute", "tau", str(tmp_path / "none.json"))[0] == EXIT_USAGE


def test_threads_env_override(capsys, monkeypatch):
    monkeypatch.setenv("LOOMLAB_THREADS", "nope")
    assert run(capsys, "battery", "--count", "1")[0] == EXIT_USAGE
    monkeypatch.setenv("LOOMLAB_THREADS", "2")
    assert run(capsys, "battery", "--count", "3")[0] == EXIT_OK
