import io
import json
import subprocess
import sys

import pytest

from lipmult.catalog import catalog, export_catalog, get_entry
from lipmult.cli import RunConfig, main, run
from lipmult.jsonio import dumps, to_plain

FAST = ["--density-samples", "20000"]


def invoke(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def invoke_json(capsys, *argv):
    code, out = invoke(capsys, *argv, "--json")
    return code, json.loads(out)


def test_mult_cusp(capsys):
    code, doc = invoke_json(capsys, "mult", "--poly", "x^3 - y^2")
    assert code == 0 and doc["agree"] is True and doc["version"] == 1 and doc["seed"] == 0
    r = doc["routes"]
    assert r["order"] == r["line"]["value"] == r["cone"] == r["hilbert"] == 2
    assert abs(r["density"]["estimate"] - 2) <= 0.1
    assert set(doc) == {"input", "routes", "agree", "notes", "seed", "version"}


def test_branches_whitney(capsys):
    code, doc = invoke_json(capsys, "branches", "--poly", "x*y*(y-x)*(y-2*x)")
    assert code == 0
    orders = [b["order"] for b in doc["routes"]["decomposition"]["branches"]]
    assert orders == [1, 1, 1, 1] and doc["routes"]["total"] == 4


def test_catalog_listing_and_export(capsys):
    code, doc = invoke_json(capsys, "catalog")
    assert code == 0 and doc["routes"]["entries"] == [e.name for e in catalog()]
    assert len(doc["routes"]["entries"]) >= 8
    code, doc = invoke_json(capsys, "catalog", "--export")
    assert doc["routes"]["catalog"] == to_plain(export_catalog())


def test_catalog_entries_of_note():
    assert get_entry("cusp").expected["mult"] == 2
    w = get_entry("whitney-t2").expected
    assert w["mult"] == 4 and w["tangentLines"] == 4
    fermat = get_entry("fermat-cubic-surface")
    assert fermat.expected["milnor"] == 8 and fermat.expected["chi"] == 9
    assert "not C^1 smooth" in fermat.note and "outside computational scope" in fermat.note
    assert all(e.provenance for e in catalog())
    with pytest.raises(KeyError):
        get_entry("nope")


def test_catalog_single_entry(capsys):
    code, doc = invoke_json(capsys, "catalog", "--name", "node", *FAST)
    assert code == 0 and doc["agree"] is True
    assert doc["routes"]["results"][0]["ok"] is True


def test_unknown_catalog_entry_is_input_error(capsys):
    code, doc = invoke_json(capsys, "catalog", "--name", "nope")
    assert code == 2 and "KeyError" in doc["notes"][0]


def test_cone_and_secants(capsys):
    code, doc = invoke_json(capsys, "cone", "--poly", "x*y", "--secant-scale", "1e-3")
    assert code == 0 and doc["routes"]["degree"] == 2 and len(doc["routes"]["lines"]) == 2
    assert doc["routes"]["secant"]["clusters"] == 2


def test_density_subcommand(capsys):
    code, doc = invoke_json(capsys, "density", "--poly", "x*y", "--samples", "20000")
    assert code == 0 and abs(doc["routes"]["density"]["estimate"] - 2) <= 0.1


def test_milnor_subcommands(capsys):
    code, doc = invoke_json(capsys, "milnor", "--poly", "x^3+y^3+z^3")
    assert code == 0 and doc["routes"]["mu"] == 8 and doc["routes"]["truncationDegree"] >= 1
    code, doc = invoke_json(capsys, "milnor", "--poly", "x*y*(x+y)", "--vars", "x,y,z",
                            "--transversal", "--line", "0,0,1")
    assert code == 0 and doc["routes"]["muPrime"] == 4


def test_randell_subcommand(capsys):
    code, doc = invoke_json(capsys, "randell", "--n", "2", "--degree", "3", "--mu-prime", "4")
    assert code == 0 and doc["routes"]["chi"] == -3
    code, doc = invoke_json(capsys, "randell", "--n", "2", "--chi", "-3", "--mu-prime", "4")
    assert doc["routes"]["degrees"] == [3]


def test_lne_subcommand(capsys):
    code, doc = invoke_json(capsys, "lne", "--poly", "(y-x^2)*(y+x^2)", "--scale-ladder", "1e-1,1e-2",
                            "--samples", "800")
    assert code == 0
    ladder = doc["routes"]["evidence"]["ladder"]
    assert [e["label"] for e in ladder] == ["evidence", "evidence"]
    assert ladder[0]["ratio"] < ladder[1]["ratio"]
    assert doc["routes"]["decision"] == {"lne": False, "reason": "shared tangent (1:0)", "label": "decision"}


def test_text_output(capsys):
    code, out = invoke(capsys, "milnor", "--poly", "y^2 - x^3")
    assert code == 0 and out.startswith("milnor: ") and "mu = 2" in out


@pytest.mark.parametrize("argv", [
    ["mult", "--poly", "x^^2"],
    ["mult", "--poly", "x*(y"],
    ["branches", "--poly", "(y-x)^2"],
    ["milnor", "--poly", "x*y", "--transversal"],
    ["mult", "--poly", "x + 1"],
])
def test_input_errors_exit_2(capsys, argv):
    code, doc = invoke_json(capsys, *argv)
    assert code == 2 and doc["notes"]


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["mult"])
    assert info.value.code == 2
    capsys.readouterr()


def test_numeric_failure_exit_3_with_report(capsys):
    code, doc = invoke_json(capsys, "milnor", "--poly", "x^2", "--vars", "x,y,z", "--transversal")
    assert code == 3 and "NotIsolatedError" in doc["notes"][0]
    code, doc = invoke_json(capsys, "milnor", "--poly", "x^2*y", "--vars", "x,y")
    assert code == 3 and "non-isolated" in doc["notes"][0]


def test_mult_failure_still_reports_routes(capsys):
    # the branch route needs a reduced curve; the failure becomes a note and exit 3
    code, doc = invoke_json(capsys, "mult", "--poly", "(y-x)^2", "--routes", "order,cone")
    assert code == 3
    assert doc["routes"]["order"] == 2 and doc["routes"]["cone"] is None
    assert any("cone" in n for n in doc["notes"])


def test_run_with_config_object():
    out = io.StringIO()
    cfg = RunConfig("randell", options={"n": 1, "mu_prime": 0, "degree": 4, "chi": None}, json=True)
    assert run(cfg, out) == 0
    assert json.loads(out.getvalue())["routes"]["chi"] == 1 - 3 ** 2


def test_byte_identical_runs(capsys):
    argv = ["mult", "--poly", "x^3 - y^2", "--json", "--seed", "5", *FAST]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_byte_identical_across_processes():
    argv = [sys.executable, "-m", "lipmult", "lne", "--poly", "x*y", "--json",
            "--scale-ladder", "1e-2", "--samples", "300"]
    outs = [subprocess.run(argv, capture_output=True, text=True, check=True).stdout for _ in range(2)]
    assert outs[0] == outs[1] and json.loads(outs[0])["version"] == 1


@pytest.mark.parametrize("name", ["cusp", "node", "whitney-t3", "e6", "three-planes"])
def test_seed_changes_leave_integer_routes(capsys, name):
    entry = get_entry(name)
    results = []
    for seed in (0, 1, 99):
        code, doc = invoke_json(capsys, "mult", "--poly", entry.polynomial, "--vars",
                                ",".join(entry.variables), "--routes", "order,line,cone,hilbert",
                                "--seed", str(seed))
        assert code == 0
        r = doc["routes"]
        results.append({k: (v["value"] if isinstance(v, dict) else v) for k, v in r.items()
                        if v is not None})
    assert results[0] == results[1] == results[2]
    assert set(results[0].values()) == {entry.expected["mult"]}


# -- JSON encoding --------------------------------------------------------------------


def test_floats_keep_17_digits():
    assert dumps(0.1) == "0.10000000000000001"
    assert float(dumps(1 / 3)) == 1 / 3
    assert dumps(2.0) == "2.0"
    assert dumps([float("inf"), float("nan")]) == '["inf", "nan"]'


def test_complex_and_sets():
    assert json.loads(dumps({"z": 1 + 2j, "s": {3, 1}})) == {"z": [1.0, 2.0], "s": [1, 3]}


def test_catalog_run_all(capsys):
    code, doc = invoke_json(capsys, "catalog", "--run-all", *FAST)
    assert code == 0 and doc["agree"] is True
    results = doc["routes"]["results"]
    assert [r["name"] for r in results] == [e.name for e in catalog()]
    assert all(r["ok"] for r in results)
