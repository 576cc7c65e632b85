import json

import pytest

from ontolab.cli import main
from ontolab.library import data_dir
from ontolab.models import (
    EpistemicState,
    ModelMeasurement,
    OnticSpace,
    OntologicalModel,
    Preparation,
    ResponseFunction,
    model_from_json,
    save_model,
    validate,
)
from ontolab.quantum import KET_PLUS, KET_ZERO, Z_MEASUREMENT


@pytest.fixture
def born_broken_model(tmp_path):
    """|0> prepared with all mass on the label that answers Z = 1."""
    model = OntologicalModel(
        space=OnticSpace(labels=("a", "b")),
        preparations={
            "phi": Preparation(KET_ZERO, EpistemicState({"b": 1.0})),
            "psi": Preparation(KET_PLUS, EpistemicState({"a": 0.5, "b": 0.5})),
        },
        measurements={
            "Z": ModelMeasurement(
                Z_MEASUREMENT,
                ResponseFunction({"a": (1.0, 0.0), "b": (0.0, 1.0)}, 2),
            )
        },
    )
    path = tmp_path / "broken.json"
    save_model(model, path)
    return path


class TestValidateCommand:
    def test_packaged_fixture_passes(self, capsys):
        assert main(["validate", "psi_complete.json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] is True

    def test_failing_model_exits_one(self, born_broken_model, capsys):
        assert main(["validate", str(born_broken_model)]) == 1
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] is False
        assert payload["worst"]["max_residual"] == pytest.approx(1.0)

    def test_tolerance_override(self, born_broken_model):
        assert main(["validate", str(born_broken_model), "--tolerance", "2.0"]) == 0

    def test_missing_file_exits_two(self, capsys):
        assert main(["validate", "no_such_model.json"]) == 2
        assert "not found" in capsys.readouterr().err

    def test_malformed_json_reports_position(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text('{"dimension" 2}')
        assert main(["validate", str(path)]) == 2
        err = capsys.readouterr().err
        assert "malformed JSON at line 1, column" in err

    def test_schema_problems_one_line_each(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "dimension": 3,
                    "tolerance": -1,
                    "ontic_states": [],
                    "preparations": {},
                    "measurements": {},
                }
            )
        )
        assert main(["validate", str(path)]) == 2
        err_lines = [l for l in capsys.readouterr().err.splitlines() if l]
        assert len(err_lines) == 3
        assert all(l.startswith("error: ") for l in err_lines)

    def test_out_writes_file_and_keeps_stdout_quiet(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert main(["validate", "psi_complete.json", "--out", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text())["passed"] is True

    def test_output_is_byte_identical_across_runs(self, capsys):
        main(["validate", "psi_complete.json"])
        first = capsys.readouterr().out
        main(["validate", "psi_complete.json"])
        assert capsys.readouterr().out == first


class TestEpistemicityCommand:
    def test_psi_complete_satisfies_bounds(self, capsys):
        assert main(["epistemicity", "psi_complete.json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["pairs"]) == 8
        assert all(c["satisfied"] for c in payload["bound_checks"])

    def test_lattice_violates_bounds(self, capsys):
        assert main(["epistemicity", "ks_qubit_1000.json"]) == 1
        payload = json.loads(capsys.readouterr().out)
        assert any(not c["satisfied"] for c in payload["bound_checks"])

    def test_csv_output(self, capsys):
        assert main(["epistemicity", "psi_complete.json", "--csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "phi,psi,q_overlap,o_overlap,omega"
        assert len(lines) == 9

    def test_explicit_pairs(self, capsys):
        assert main(["epistemicity", "psi_complete.json", "--pairs", "zero:plus"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["pairs"]) == 1

    def test_orthogonal_pair_exits_two(self, capsys):
        assert main(["epistemicity", "psi_complete.json", "--pairs", "zero:one"]) == 2
        assert "omega undefined" in capsys.readouterr().err

    def test_bad_pair_syntax_exits_two(self, capsys):
        assert main(["epistemicity", "psi_complete.json", "--pairs", "zeroplus"]) == 2
        assert "phi:psi" in capsys.readouterr().err


class TestClassifyCommand:
    def test_reference_tags(self, capsys):
        expected = {
            "table_i.json": "TYPE_1",
            "table_ii.json": "TYPE_2I",
            "table_iii.json": "TYPE_2II",
            "table_iv.json": "TYPE_2III",
            "table_v.json": "TYPE_2II",
        }
        for name, tag in expected.items():
            assert main(["classify", name]) == 0
            payload = json.loads(capsys.readouterr().out)
            assert payload["tag"] == tag, name

    def test_witness_payload(self, capsys):
        main(["classify", "table_ii.json"])
        payload = json.loads(capsys.readouterr().out)
        assert payload["witnesses"] == [
            {
                "party": "A",
                "setting": "sy",
                "remote_pair": ["sx", "sy"],
                "outcomes": [1, -1],
            }
        ]


class TestEvolveCommand:
    def test_worked_example(self, capsys):
        rc = main(["evolve", "table_v.json", "--party", "A", "--setting", "sz"])
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["result_type"] == "TYPE_2II"
        assert payload["realized_outcomes"] == [1]
        assert payload["remote_fixed"] == {"sz": 1, "sx": 1, "sy": 1}
        assert payload["admissible_count"] == 4
        sample = payload["sample_table"]
        assert set(sample) == {"order", "grid", "entries"}
        assert sample["entries"]["sz,sx"] == [1, 1]

    def test_sample_is_seed_deterministic(self, capsys):
        argv = ["evolve", "table_v.json", "--party", "A", "--setting", "sz"]
        main(argv)
        first = capsys.readouterr().out
        main(argv + ["--seed", "42"])
        assert capsys.readouterr().out == first

    def test_ordering_violation_exits_two(self, capsys):
        rc = main(["evolve", "table_v.json", "--party", "B", "--setting", "sz"])
        assert rc == 2
        assert "cannot measure first" in capsys.readouterr().err

    def test_unknown_setting_exits_two(self, capsys):
        rc = main(["evolve", "table_i.json", "--party", "A", "--setting", "sq"])
        assert rc == 2
        assert "absent" in capsys.readouterr().err


class TestCloneSimCommand:
    def test_psi_complete_feasible(self, capsys):
        rc = main(
            ["clone-sim", "psi_complete.json", "--basis", "zero,one", "--psi", "plus"]
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["feasibility"]["feasible"] is True
        assert payload["feasibility"]["max_chsh"] == pytest.approx(4.0)
        assert len(payload["routing"]) == 3

    def test_lattice_infeasible_exits_one(self, capsys):
        rc = main(
            ["clone-sim", "ks_qubit_1000.json", "--basis", "zero,one", "--psi", "plus"]
        )
        assert rc == 1
        payload = json.loads(capsys.readouterr().out)
        assert payload["feasibility"]["feasible"] is False

    def test_rest_cap(self, capsys):
        rc = main(
            [
                "clone-sim", "psi_complete.json", "--basis", "zero,one",
                "--psi", "plus", "--rest-cap", "2.8284271247461903",
            ]
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["feasibility"]["margin"] == pytest.approx(0.0, abs=1e-12)

    def test_bad_basis_exits_two(self, capsys):
        rc = main(["clone-sim", "psi_complete.json", "--basis", "zero", "--psi", "plus"])
        assert rc == 2
        assert "two comma-separated" in capsys.readouterr().err

    def test_missing_preparation_exits_two(self, capsys):
        rc = main(
            ["clone-sim", "psi_complete.json", "--basis", "zero,one", "--psi", "ghost"]
        )
        assert rc == 2
        assert "missing" in capsys.readouterr().err


class TestBoundSweepCommand:
    def test_range_grid(self, capsys):
        assert main(["bound-sweep", "--alpha", "0.1:0.5:0.1"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("alpha_sq,")
        assert [l.split(",")[0] for l in lines[1:]] == ["0.1", "0.2", "0.3", "0.4", "0.5"]

    def test_comma_list(self, capsys):
        assert main(["bound-sweep", "--alpha", "0.25,0.5"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 3

    def test_jobs_flag_keeps_bytes(self, capsys):
        main(["bound-sweep", "--alpha", "0.2:0.8:0.2"])
        single = capsys.readouterr().out
        main(["bound-sweep", "--alpha", "0.2:0.8:0.2", "--jobs", "3"])
        assert capsys.readouterr().out == single

    def test_bad_range_exits_two(self, capsys):
        assert main(["bound-sweep", "--alpha", "0.5:0.1:0.1"]) == 2
        assert main(["bound-sweep", "--alpha", "0.2:0.4"]) == 2

    def test_degenerate_value_exits_two(self, capsys):
        assert main(["bound-sweep", "--alpha", "0.5,1.0"]) == 2
        assert "degenerate" in capsys.readouterr().err


class TestSearchCommand:
    def test_packaged_instance(self, capsys):
        assert main(["search", "search_basic.json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["optimum"] == pytest.approx(0.5, abs=1e-9)
        assert payload["objective"] == ["zero", "plus"]
        witness = model_from_json(json.dumps(payload["witness"]))
        assert validate(witness).passed

    def test_unknown_objective_id(self, tmp_path, capsys):
        obj = json.loads((data_dir() / "search_basic.json").read_text())
        obj["objective"] = ["zero", "ghost"]
        path = tmp_path / "instance.json"
        path.write_text(json.dumps(obj))
        assert main(["search", str(path)]) == 2
        assert "ghost" in capsys.readouterr().err

    def test_non_object_instance(self, tmp_path, capsys):
        path = tmp_path / "instance.json"
        path.write_text("[1, 2]")
        assert main(["search", str(path)]) == 2
        assert "JSON object" in capsys.readouterr().err


class TestProp1Command:
    def test_default_grid_passes(self, capsys):
        assert main(["prop1"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] is True
        assert payload["tables_enumerated"] == 64
        assert payload["finals_checked"] == 192

    def test_anchor_override(self, capsys):
        assert main(["prop1", "--anchor", "sx,sz"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["anchor"] == ["sx", "sz"]

    def test_bad_anchor_exits_two(self, capsys):
        assert main(["prop1", "--anchor", "sq,sz"]) == 2
        assert "not a grid cell" in capsys.readouterr().err

    def test_oversized_grid_exits_two(self, capsys):
        rc = main(["prop1", "--alice", "a,b,c,d,e", "--bob", "a,b"])
        assert rc == 2
        assert "at most 4 settings" in capsys.readouterr().err

    def test_table_cap_exits_two(self, capsys):
        rc = main(["prop1", "--alice", "a,b,c", "--bob", "a,b,c", "--max-tables", "100"])
        assert rc == 2
        assert "exceed the cap" in capsys.readouterr().err
