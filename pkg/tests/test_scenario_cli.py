import textwrap
from fractions import Fraction

import pytest

from aqsim import cli
from aqsim.adversary import AdversaryError
from aqsim.scenario import ScenarioError, load_scenario, make_adversary, parse_scenario
from aqsim.sim_engine import EngineInvariantError

# ---- scenario files ------------------------------------------------------------


def test_load_line_saturating_scenario(scenario_dir):
    sc = load_scenario(str(scenario_dir / "line_saturating.yaml"))
    assert sc.name == "line_saturating"
    assert sc.network.edge_ids == ("e1", "e2", "e3", "e4")
    assert sc.adversary_kind == "saturating"
    assert sc.r == Fraction(1, 2)
    assert sc.b == 4
    assert sc.sat_path.edges == ("e1", "e2", "e3", "e4")
    assert sc.strategy_kind == "interval"
    assert sc.discipline == "FIFO"
    assert sc.improvement is False
    assert sc.max_steps == 200


def test_load_burst_scenario(scenario_dir):
    sc = load_scenario(str(scenario_dir / "burst_fifo.yaml"))
    assert sc.adversary_kind == "burst"
    assert sc.r is None
    assert len(sc.burst_paths) == 4
    assert sc.strategy_kind == "plain"


def test_load_improvement_scenario(scenario_dir):
    sc = load_scenario(str(scenario_dir / "improvement_tail.yaml"))
    assert sc.adversary_kind == "scripted"
    assert sc.strategy_kind == "interval"
    assert sc.improvement is False
    assert len(sc.events) == 9
    assert sc.events[-1].time == 8


def _valid_doc():
    return {
        "name": "demo",
        "network": {
            "nodes": ["v0", "v1"],
            "edges": [["v0", "v1", "e1"]],
        },
        "adversary": {"kind": "saturating", "r": 0.5, "b": 2, "path": ["e1"]},
        "strategy": {"kind": "interval", "discipline": "FIFO"},
        "run": {"max_steps": 50},
    }


def test_parse_scenario_happy_path():
    sc = parse_scenario(_valid_doc())
    assert sc.name == "demo"
    assert sc.r == Fraction(1, 2)


def test_parse_collects_every_problem_with_field_paths():
    doc = _valid_doc()
    doc["adversary"]["r"] = 1.5
    doc["strategy"]["discipline"] = "BOGUS"
    doc["run"]["max_steps"] = 0
    with pytest.raises(ScenarioError) as err:
        parse_scenario(doc)
    problems = err.value.problems
    assert len(problems) == 3
    assert any(p.startswith("adversary.r:") for p in problems)
    assert any(p.startswith("strategy.discipline:") for p in problems)
    assert any(p.startswith("run.max_steps:") for p in problems)


@pytest.mark.parametrize(
    "mutate, needle",
    [
        (lambda d: d.update(extra={"x": 1}), "extra"),
        (lambda d: d["adversary"].update(paths=[["e1"]]), "adversary"),
        (lambda d: d["adversary"].update(kind="burst"), "adversary"),
        (lambda d: d["adversary"].pop("r"), "adversary.r"),
        (lambda d: d["adversary"].update(b=True), "adversary.b"),
        (lambda d: d["adversary"].update(path=["e9"]), "adversary.path"),
        (lambda d: d["strategy"].update(wake="never"), "strategy.wake"),
        (lambda d: d["network"]["edges"].append(["v0", "v1", "e2"]), "network"),
        (lambda d: d.update(name="a/b"), "name"),
        (lambda d: d["run"].update(max_steps=True), "run.max_steps"),
    ],
)
def test_parse_rejects_structural_problems(mutate, needle):
    doc = _valid_doc()
    mutate(doc)
    with pytest.raises(ScenarioError) as err:
        parse_scenario(doc)
    assert any(needle in p for p in err.value.problems)


def test_parse_rejects_improvement_on_plain_strategy():
    doc = _valid_doc()
    doc["strategy"] = {"kind": "plain", "discipline": "FIFO", "improvement": True}
    with pytest.raises(ScenarioError) as err:
        parse_scenario(doc)
    assert any("strategy.improvement" in p for p in err.value.problems)


def test_parse_rejects_unsorted_events():
    doc = _valid_doc()
    doc["adversary"] = {
        "kind": "scripted",
        "r": 0.5,
        "b": 2,
        "events": [{"step": 5, "path": ["e1"]}, {"step": 1, "path": ["e1"]}],
    }
    with pytest.raises(ScenarioError) as err:
        parse_scenario(doc)
    assert any("sorted" in p for p in err.value.problems)


def test_name_defaults_to_file_stem(tmp_path):
    doc = textwrap.dedent(
        """
        network:
          nodes: [v0, v1]
          edges: [[v0, v1, e1]]
        adversary: {kind: burst, b: 1, paths: [[e1]]}
        strategy: {kind: plain, discipline: FIFO}
        run: {max_steps: 10}
        """
    )
    f = tmp_path / "my_case.yaml"
    f.write_text(doc)
    assert load_scenario(str(f)).name == "my_case"


def test_make_adversary_returns_fresh_instances():
    sc = parse_scenario(_valid_doc())
    assert make_adversary(sc) is not make_adversary(sc)


def test_make_adversary_rejects_inadmissible_script():
    doc = _valid_doc()
    doc["adversary"] = {
        "kind": "scripted",
        "r": 0.5,
        "b": 1,
        "events": [{"step": t, "path": ["e1"]} for t in (1, 2, 3)],
    }
    sc = parse_scenario(doc)  # structurally fine
    with pytest.raises(AdversaryError):
        make_adversary(sc)


# ---- argument parsing --------------------------------------------------------------


def test_parser_run_defaults():
    args = cli.build_parser().parse_args(["run", "case.yaml"])
    assert args.command == "run"
    assert args.scenario == "case.yaml"
    assert args.max_steps is None
    assert args.strategy is None
    assert args.improvement is None
    assert args.out == "."


def test_parser_bounds_defaults():
    args = cli.build_parser().parse_args(["bounds", "line"])
    assert (args.r, args.b, args.d) == (0.5, 4, 4)
    assert (args.c1, args.c2, args.c3) == (1.0, 1.0, 0.0)
    assert args.i_max == 20
    assert args.log_base == 2.0


def test_parser_sweep_defaults():
    args = cli.build_parser().parse_args(["sweep"])
    assert args.max_packets == 3
    assert args.max_edges == 3
    assert args.shapes == "line,tree"


def test_parser_rejects_unknown_formula():
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["bounds", "circle"])


# ---- the run command -----------------------------------------------------------------


def test_run_writes_all_csvs(tmp_path, scenario_dir, capsys):
    rc = cli.main(["run", str(scenario_dir / "line_saturating.yaml"), "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "phases completed" in out
    assert "phase duration growth: BOUNDED" in out
    for suffix in ("trace", "packets", "phases"):
        f = tmp_path / f"line_saturating_{suffix}.csv"
        assert f.exists()
        first = f.read_text().splitlines()[0]
        assert first.startswith("# scenario=line_saturating")


def test_run_plain_scenario_has_no_phase_csv(tmp_path, scenario_dir):
    rc = cli.main(["run", str(scenario_dir / "burst_fifo.yaml"), "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "burst_fifo_trace.csv").exists()
    assert not (tmp_path / "burst_fifo_phases.csv").exists()


def test_run_missing_file_exits_2(capsys):
    assert cli.main(["run", "no_such_file.yaml"]) == 2
    assert "cannot read scenario" in capsys.readouterr().err


def test_run_invalid_yaml_exits_2(tmp_path, capsys):
    f = tmp_path / "broken.yaml"
    f.write_text("a: [unclosed\n")
    assert cli.main(["run", str(f)]) == 2
    assert "not valid YAML" in capsys.readouterr().err


def test_run_scenario_problems_exit_2_and_name_fields(tmp_path, capsys):
    f = tmp_path / "bad.yaml"
    f.write_text(
        textwrap.dedent(
            """
            network:
              nodes: [v0, v1]
              edges: [[v0, v1, e1]]
            adversary: {kind: saturating, r: 1.5, b: 2, path: [e1]}
            strategy: {kind: interval, discipline: FIFO}
            run: {max_steps: 10}
            """
        )
    )
    assert cli.main(["run", str(f)]) == 2
    assert "adversary.r" in capsys.readouterr().err


def test_run_improvement_override_needs_interval(scenario_dir, tmp_path, capsys):
    rc = cli.main([
        "run", str(scenario_dir / "burst_fifo.yaml"),
        "--improvement", "on", "--out", str(tmp_path),
    ])
    assert rc == 2
    assert "interval" in capsys.readouterr().err


def test_run_unknown_strategy_override_exits_2(scenario_dir, tmp_path, capsys):
    rc = cli.main([
        "run", str(scenario_dir / "burst_fifo.yaml"),
        "--strategy", "NOPE", "--out", str(tmp_path),
    ])
    assert rc == 2


def test_run_inadmissible_script_exits_2(tmp_path, capsys):
    f = tmp_path / "hot.yaml"
    f.write_text(
        textwrap.dedent(
            """
            network:
              nodes: [v0, v1]
              edges: [[v0, v1, e1]]
            adversary:
              kind: scripted
              r: 0.5
              b: 1
              events:
                - {step: 1, path: [e1]}
                - {step: 2, path: [e1]}
                - {step: 3, path: [e1]}
            strategy: {kind: plain, discipline: FIFO}
            run: {max_steps: 10}
            """
        )
    )
    assert cli.main(["run", str(f)]) == 2
    assert "inadmissible" in capsys.readouterr().err


def test_run_invariant_break_exits_3(scenario_dir, tmp_path, monkeypatch, capsys):
    def explode(*args, **kwargs):
        raise EngineInvariantError("synthetic failure for the exit-code contract")

    monkeypatch.setattr(cli, "run_interval", explode)
    rc = cli.main(["run", str(scenario_dir / "line_saturating.yaml"), "--out", str(tmp_path)])
    assert rc == 3
    assert "invariant" in capsys.readouterr().err


# ---- the bounds command -----------------------------------------------------------------


def test_bounds_line_defaults_are_constant_eight(capsys):
    assert cli.main(["bounds", "line"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# formula=line r=0.5 b=4")
    assert lines[1] == "i,value"
    assert lines[2] == "1,8.0"
    assert lines[21] == "20,8.0"
    assert lines[22] == "limit,8.0"
    assert lines[23] == "growth,BOUNDED"


def test_bounds_tree_doubling_series(capsys):
    assert cli.main(["bounds", "tree", "--r", "0.5", "--b", "1", "--d", "4",
                     "--i-max", "10"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[2] == "1,4.0"
    assert lines[11] == "10,2048.0"
    assert lines[12] == "growth,DIVERGENT"  # no 'limit' row: it is infinite


def test_bounds_theorem_packets_start_at_b(capsys):
    assert cli.main(["bounds", "theorem-packets", "--b", "6", "--i-max", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[2] == "1,6.0"


def test_bounds_nonforward_domain_error_exits_2(capsys):
    assert cli.main(["bounds", "nonforward", "--b", "1"]) == 2
    assert "b >= 2" in capsys.readouterr().err


def test_bounds_bad_imax_exits_2(capsys):
    assert cli.main(["bounds", "line", "--i-max", "0"]) == 2


# ---- the sweep command -----------------------------------------------------------------


def test_sweep_small_table(capsys):
    assert cli.main(["sweep", "--max-packets", "1", "--max-edges", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "# sweep max_packets=1 max_edges=1 shapes=line,tree"
    assert lines[1] == "instance_id,packets,edges,n,d,optimal,greedy_fifo,lemma1_bound"
    assert lines[2] == "1,1,1,1,1,1,1,1"
    assert lines[3] == "# no instance exceeded n+d (1 instances checked)"


def test_sweep_reports_greedy_gap(capsys):
    assert cli.main(["sweep", "--max-packets", "2", "--max-edges", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    data = [ln for ln in lines if ln and not ln.startswith("#") and ln[0].isdigit()]
    assert len(data) == 16
    assert any(int(row.split(",")[5]) < int(row.split(",")[6]) for row in data)


def test_sweep_rejects_unknown_shape(capsys):
    assert cli.main(["sweep", "--shapes", "circle"]) == 2


def test_sweep_rejects_nonpositive_limits(capsys):
    assert cli.main(["sweep", "--max-packets", "0"]) == 2
