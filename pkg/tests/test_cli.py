import json

import pytest

from qlstar.cli import EXIT_CAP, EXIT_INVALID, EXIT_OK, EXIT_PARSE, load_problem, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, data, name="p.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


def test_cs_fixture_b(capsys):
    assert run(capsys, "cs", "fixture:B", "(0,_,_)", "(_,0,0)")[:2] == (EXIT_OK, "g:1\n")


def test_eval(capsys):
    assert run(capsys, "eval", "fixture:B", "(0,0,0)")[1] == "0\n"
    assert run(capsys, "eval", "fixture:B", "(0,t:0,t:0)")[1] == "t:1\n"
    assert run(capsys, "eval", "fixture:B", "--pair", "(t:0,0,0)", "(0,t:0,t:0)")[1] == "g:1\n"


def test_malformed_scalar_reports_position(capsys):
    code, _, err = run(capsys, "eval", "fixture:B", "(x:1,0,0)")
    assert code == EXIT_PARSE and "[0]" in err and "x:1" in err


def test_bad_command_line_is_a_parse_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["reduce", "fixture:D", "0", "1", "--mode", "sideways"])
    assert exc.value.code == EXIT_PARSE


def test_cliques_containing(capsys):
    code, out, _ = run(capsys, "cliques", "fixture:A", "--containing", "(0,_,_,_)")
    assert code == EXIT_OK
    assert json.loads(out)["maximal"] == [["(0, _, _, _)", "(_, _, _, 0)"]]


def test_graph_dot_is_a_path(capsys):
    out = run(capsys, "graph", "fixture:D", "--dot")[1]
    edges = [line.strip() for line in out.splitlines() if "--" in line]
    assert edges == ["v0 -- v1;", "v1 -- v2;", "v2 -- v3;", "v3 -- v4;"]


def test_path_and_reduce(capsys):
    out = json.loads(run(capsys, "path", "fixture:D", "(0,_,_,_,_)", "(_,_,_,_,0)")[1])
    assert out["length"] == 4
    out = json.loads(run(capsys, "reduce", "fixture:A", "0", "3", "1", "3", "2")[1])
    assert out["result"]["length"] == 2 and out["direct"]
    assert out["steps"][0]["bridge"] == ["(0, _, _, _)", "(_, _, _, 0)"]
    out = json.loads(run(capsys, "reduce", "fixture:D+twin", "0", "1", "5", "2", "3", "4",
                         "--mode", "elementary")[1])
    assert out["result"]["length"] == 4 and out["steps"][0]["pillar"] == "(_, 0, _, _, _)"


def test_anchors_and_flocks_on_twin_universe(capsys):
    out = json.loads(run(capsys, "anchors", "fixture:D+twin", "0", "1", "2", "3", "4")[1])
    assert out["m"] == 2 and out["twin_pairs"] == [0, 1, 3]
    assert out["anchors"][1] == "(_, 0, 0, _, _)"
    out = json.loads(run(capsys, "flocks", "fixture:D+twin", "0", "1", "2", "3", "4")[1])
    assert out["flocks"] == [[0, 2]] and out["flocky"]
    dot = run(capsys, "anchors", "fixture:D+twin", "0", "1", "2", "3", "4", "--dot")[1]
    assert dot.startswith("digraph")


def test_modify_without_tracks(capsys):
    out = json.loads(run(capsys, "modify", "fixture:D", "0", "1", "2", "3", "4")[1])
    assert out["note"] == "no tracks" and out["result"] == out["input"]


def test_non_direct_path_is_rejected(capsys):
    code, _, err = run(capsys, "anchors", "fixture:D+twin", "0", "5", "2", "3", "4")
    assert code == EXIT_INVALID and "not direct" in err


def test_validate_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "validate", "fixture:C")
    assert code == EXIT_OK
    prob = json.loads(out)["problem"]
    again = json.loads(run(capsys, "validate", write(tmp_path, prob))[1])["problem"]
    assert again == prob
    assert load_problem(prob).to_json() == prob


def test_problem_file_errors(capsys, tmp_path):
    base = {"semifield": "discrete", "dim": 2, "diag": ["t:0", "t:0"], "cross": [[1, 2, "t:0"]]}
    assert run(capsys, "validate", write(tmp_path, "{not json"))[0] == EXIT_PARSE
    assert run(capsys, "validate", write(tmp_path, dict(base, diag=["t:0", "y:1"])))[0] == EXIT_PARSE
    # syntactically fine, but not an integer magnitude
    assert run(capsys, "validate", write(tmp_path, dict(base, diag=["t:1/2", "t:0"])))[0] == EXIT_INVALID
    assert run(capsys, "validate", write(tmp_path, dict(base, diag=["t:0", "0"])))[0] == EXIT_INVALID
    empty = dict(base, universe={"generators": []})
    assert run(capsys, "graph", write(tmp_path, empty))[0] == EXIT_INVALID
    big = dict(base, universe={"closure": "skeleton(3)", "cap": 2})
    assert run(capsys, "stars", write(tmp_path, big))[0] == EXIT_CAP


def test_vector_generators_and_closure(capsys, tmp_path):
    data = {"semifield": "discrete", "dim": 3, "diag": ["g:0", "g:0", "g:0"],
            "cross": [[1, 2, "t:1"], [1, 3, "t:1"], [2, 3, "t:1"]],
            "universe": {"generators": ["(0,_,_)", {"vector": ["0", "t:0", "0"]}, [None, None, 0]],
                         "closure": "subset_sums"}}
    out = json.loads(run(capsys, "validate", write(tmp_path, data))[1])
    assert out["rays"] == 7


def test_check_exit_codes(capsys):
    code, out, _ = run(capsys, "check", "--fixtures", "--suite", "core", "--samples", "0")
    assert code == EXIT_OK and json.loads(out)["failed"] == []
    code, out, _ = run(capsys, "check", "--suite", "paths", "--samples", "1", "--strict")
    assert code == EXIT_INVALID and json.loads(out)["known_defects"]


def test_check_reports_witness_on_fixture_c(capsys):
    code, out, _ = run(capsys, "check", "fixture:C", "--suite", "convexity", "--samples", "2")
    res = {r["name"]: r for r in json.loads(out)["results"]}
    assert code == EXIT_OK and res["Thm 13.4 witness"]["cases"] > 0


def test_outputs_are_deterministic(capsys):
    a = run(capsys, "check", "--suite", "core", "--samples", "2", "--seed", "3")[1]
    b = run(capsys, "check", "--suite", "core", "--samples", "2", "--seed", "3")[1]
    assert a == b
