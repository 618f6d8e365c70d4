import json

import pytest

from rpt.cli import main, parse_args
from rpt.graph import Graph, to_edge_list, to_graph6


@pytest.fixture
def c5_file(tmp_path):
    path = tmp_path / "c5.el"
    path.write_text(to_edge_list(Graph.cycle(5)))
    return str(path)


@pytest.fixture
def k4_g6_file(tmp_path):
    path = tmp_path / "k4.g6"
    path.write_text(to_graph6(Graph.complete(4)) + "\n")
    return str(path)


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


class TestParse:
    def test_count_plan(self, c5_file):
        plan = parse_args(["count", "--graph", c5_file, "--pattern", "K3"])
        assert plan.subcommand == "count"
        assert plan.mode == "practical" and not plan.json_mode

    def test_theorem_plan_with_globals_after_subcommand(self, c5_file):
        plan = parse_args(
            [
                "theorem",
                "--graph",
                c5_file,
                "--pattern",
                "P4",
                "--eps",
                "1/4",
                "--d",
                "10",
                "--mode",
                "practical",
                "--seed",
                "1",
                "--json",
            ]
        )
        assert plan.subcommand == "theorem" and plan.json_mode and plan.seed == 1

    def test_constants_plan(self):
        plan = parse_args(
            ["constants", "--h", "3", "--eps", "1/4", "--eta", "1/4", "--theta", "1/4"]
        )
        assert plan.subcommand == "constants"

    def test_malformed_fraction_rejected(self, c5_file):
        code = main(["extract", "--graph", c5_file, "--pattern", "K2",
                     "--op", "density", "--eps", "nonsense"])
        assert code == 1

    def test_paper_mode_forbids_ledger_overrides(self, c5_file):
        code = main(
            [
                "keylemma",
                "--graph",
                c5_file,
                "--pattern",
                "K2",
                "--d",
                "1",
                "--mode",
                "paper",
                "--delta-prime",
                "1/8",
            ]
        )
        assert code == 1


class TestCommands:
    def test_count_human_and_json(self, capsys, c5_file):
        code, out = run_cli(capsys, ["count", "--graph", c5_file, "--pattern", "P3"])
        assert code == 0 and "10" in out
        code, out = run_cli(
            capsys, ["count", "--graph", c5_file, "--pattern", "P3", "--json"]
        )
        assert code == 0 and json.loads(out)["value"] == "10"

    def test_count_reads_graph6(self, capsys, k4_g6_file):
        code, out = run_cli(
            capsys, ["count", "--graph", k4_g6_file, "--pattern", "K3", "--json"]
        )
        assert code == 0 and json.loads(out)["value"] == "24"

    def test_check_valid_partition(self, capsys, tmp_path, c5_file):
        cert = tmp_path / "cert.json"
        cert.write_text(
            json.dumps(
                {
                    "kind": "restricted_partition",
                    "parts": [[0, 1], [2, 3], [4]],
                    "eps": "1/4",
                    "N": 3,
                }
            )
        )
        code, out = run_cli(capsys, ["check", "--graph", c5_file, "--cert", str(cert)])
        assert code == 0 and "VERIFIED" in out

    def test_check_mutated_partition_exit_2(self, capsys, tmp_path, c5_file):
        cert = tmp_path / "cert.json"
        cert.write_text(
            json.dumps(
                {
                    "kind": "restricted_partition",
                    "parts": [[0, 1, 2], [3], [4]],
                    "eps": "0",
                    "N": 3,
                }
            )
        )
        code, out = run_cli(capsys, ["check", "--graph", c5_file, "--cert", str(cert)])
        assert code == 2 and "part 0" in out

    def test_theorem_roundtrip_through_check(self, capsys, tmp_path, c5_file):
        code, out = run_cli(
            capsys,
            ["theorem", "--graph", c5_file, "--pattern", "K2", "--eps", "1/4",
             "--d", "2", "--json"],
        )
        assert code == 0
        cert = tmp_path / "removal.json"
        cert.write_text(out)
        code, out = run_cli(capsys, ["check", "--graph", c5_file, "--cert", str(cert)])
        assert code == 0

    def test_keylemma_result_round_trip_through_check(self, capsys, tmp_path, c5_file):
        code, out = run_cli(
            capsys,
            ["keylemma", "--graph", c5_file, "--pattern", "K2", "--d", "2", "--json"],
        )
        assert code == 0
        cert = tmp_path / "kl.json"
        cert.write_text(out)
        code, _ = run_cli(capsys, ["check", "--graph", c5_file, "--cert", str(cert)])
        assert code == 0
        obj = json.loads(out)
        obj["C"] = [c for c in obj["C"] if c != [4]]  # vertex 4 vanishes
        cert.write_text(json.dumps(obj))
        code, out2 = run_cli(capsys, ["check", "--graph", c5_file, "--cert", str(cert)])
        assert code == 2 and "cover" in out2

    def test_blowup_found_round_trip_through_check(self, capsys, tmp_path):
        from fractions import Fraction

        from rpt import serialize
        from rpt.graph import Graph, mask_from_ids, named_pattern, to_edge_list
        from rpt.keypartition import KeyParams, MNTPartition, run_key_lemma

        k2 = named_pattern("K2")
        core = 10
        edges = [(i, j) for i in range(core) for j in range(i + 1, core)]
        edges += [(i, core) for i in range(core)]
        g = Graph.from_edges(core + 1, edges)
        params = KeyParams.practical(k2, Fraction(1, 4))
        start = MNTPartition(
            (), (), (), (mask_from_ids(range(core)),), 1 << core, params, 0
        )
        found = run_key_lemma(g, k2, params, 0, start=start)
        payload = serialize.blowup_found_to_json(found)
        g_path = tmp_path / "g.el"
        g_path.write_text(to_edge_list(g))
        cert = tmp_path / "bf.json"
        cert.write_text(json.dumps(payload))
        code, out = run_cli(capsys, ["check", "--graph", str(g_path), "--cert", str(cert)])
        assert code == 0, out
        payload["copy_count"] = "999999"
        cert.write_text(json.dumps(payload))
        code, _ = run_cli(capsys, ["check", "--graph", str(g_path), "--cert", str(cert)])
        assert code == 2

    def test_keylemma_transcript(self, capsys, c5_file):
        code, out = run_cli(
            capsys,
            ["keylemma", "--graph", c5_file, "--pattern", "K2", "--d", "2",
             "--transcript", "--json"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["kind"] == "key_lemma_result"
        assert all(rec["kind"] == "step_record" for rec in payload["transcript"])

    def test_extract_peel(self, capsys, c5_file):
        code, out = run_cli(
            capsys,
            ["extract", "--graph", c5_file, "--pattern", "K2", "--op", "peel",
             "--eps", "1/2", "--eta", "1/4", "--delta", "1/5", "--json"],
        )
        assert code == 0
        assert json.loads(out)["kind"] == "peel_chain"

    def test_counterexample_inline(self, capsys):
        code, out = run_cli(
            capsys,
            ["counterexample", "--m", "20", "--n", "24", "--big-n", "1",
             "--eps", "1/20", "--seed", "7", "--json"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["ok"] and payload["core"] == list(range(20))

    def test_constants_json(self, capsys):
        code, out = run_cli(
            capsys,
            ["constants", "--h", "2", "--eps", "1/4", "--eta", "1/4",
             "--theta", "1/4", "--json"],
        )
        assert code == 0
        entries = json.loads(out)["entries"]
        assert entries["xi"]["exact"] == "1/16"

    def test_oracle_sweep_csv(self, capsys):
        code, out = run_cli(
            capsys,
            ["oracle", "--op", "min-removal", "--n-parts", "2", "--eps", "0",
             "--sweep", "3", "--sweep-n", "5"],
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "seed,n,value" and len(lines) == 4

    def test_missing_file_is_error(self, capsys):
        code, _ = run_cli(capsys, ["count", "--graph", "/nonexistent", "--pattern", "K2"])
        assert code == 1

    def test_threads_env_fallback(self, monkeypatch, c5_file):
        monkeypatch.setenv("RPT_THREADS", "4")
        plan = parse_args(["count", "--graph", c5_file, "--pattern", "K2"])
        assert plan.threads == 4
        plan = parse_args(
            ["count", "--graph", c5_file, "--pattern", "K2", "--threads", "2"]
        )
        assert plan.threads == 2


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["count", "--graph", "{c5}", "--pattern", "P3", "--json"],
            ["theorem", "--graph", "{c5}", "--pattern", "K2", "--eps", "1/4",
             "--d", "2", "--json", "--seed", "3"],
            ["keylemma", "--graph", "{c5}", "--pattern", "K2", "--d", "1",
             "--json", "--seed", "3"],
            ["extract", "--graph", "{c5}", "--pattern", "K2", "--op", "density",
             "--eps", "1/4", "--json"],
            ["counterexample", "--m", "20", "--n", "22", "--big-n", "1",
             "--eps", "1/20", "--seed", "5", "--json"],
            ["constants", "--h", "2", "--eps", "1/4", "--eta", "1/4",
             "--theta", "1/4", "--json"],
            ["oracle", "--op", "n-restricted", "--n-parts", "2", "--eps", "1/4",
             "--graph", "{c5}", "--json"],
        ],
    )
    def test_byte_identical_json(self, capsys, c5_file, argv):
        argv = [a.format(c5=c5_file) for a in argv]
        code1, out1 = run_cli(capsys, argv)
        code2, out2 = run_cli(capsys, argv)
        assert code1 == code2 == 0
        assert out1 == out2
