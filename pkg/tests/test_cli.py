import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest
from click.testing import CliRunner

from rankmed.cli import main
from rankmed.report import load_report_schema


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, args):
    return runner.invoke(main, args, catch_exceptions=False)


def write_csv(path, header, rows):
    lines = [",".join(header)] + [",".join(str(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def identity_csv(tmp_path):
    return write_csv(
        tmp_path / "id3.csv",
        ["a", "b", "c", "y"],
        [[1, 0, 0, "A"], [0, 1, 0, "B"], [0, 0, 1, "A"]],
    )


@pytest.fixture
def duplicated_csv(tmp_path):
    rows = [[float(v), 2 * float(v), "A" if v % 2 else "B"] for v in range(1, 9)]
    return write_csv(tmp_path / "dup.csv", ["orig", "double", "y"], rows)


def balanced_dataset(tmp_path, seed=0, n_per=12):
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(2 * n_per):
        label = "A" if i < n_per else "B"
        shift = 0.0 if i < n_per else 6.0  # well separated on "sig"
        rows.append([f"{rng.normal() + shift:.9g}", f"{rng.normal():.9g}", label])
    return write_csv(tmp_path / "balanced.csv", ["sig", "noise", "y"], rows)


def imbalanced_dataset(tmp_path):
    # minority-class signal whose rank improves under compensation;
    # construction verified against an independent convex solver.
    rng = np.random.default_rng(0)
    codes = np.array([1] * 20 + [2] * 20 + [3] * 8)
    n = codes.size
    f1 = np.where(codes == 3, 2.5, 0.0) + rng.normal(scale=0.6, size=n)
    f2 = np.where(codes == 1, 2.2, 0.0) + rng.normal(scale=0.6, size=n)
    f3 = np.where(codes <= 2, 1.8 * (codes == 1), 0.9) + rng.normal(scale=0.8, size=n)
    rows = [
        [f"{f1[i]:.12g}", f"{f2[i]:.12g}", f"{f3[i]:.12g}", "ABC"[codes[i] - 1]]
        for i in range(n)
    ]
    return write_csv(tmp_path / "imb.csv", ["min_sig", "ab_sig", "mix_sig", "y"], rows)


class TestSpectrum:
    def test_identity_eigenvalues(self, runner, identity_csv):
        result = run(runner, ["spectrum", identity_csv, "--label-column", "y"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "# effective_rank=3"
        for line in lines[1:]:
            _, value = line.split("\t")
            assert value == "0.333333333333"

    def test_rank_one_input(self, runner, duplicated_csv):
        result = run(runner, ["spectrum", duplicated_csv, "--label-column", "y"])
        lines = result.output.strip().splitlines()
        assert lines[0] == "# effective_rank=1"

    def test_output_file(self, runner, identity_csv, tmp_path):
        out = tmp_path / "spec.tsv"
        result = run(runner, ["spectrum", identity_csv, "--label-column", "y", "-o", str(out)])
        assert result.exit_code == 0
        assert out.read_text().startswith("# effective_rank=3")

    def test_missing_file_exit_2(self, runner, tmp_path):
        result = run(runner, ["spectrum", str(tmp_path / "nope.csv"), "--label-column", "y"])
        assert result.exit_code == 2

    def test_missing_label_column_exit_2(self, runner, identity_csv):
        result = run(runner, ["spectrum", identity_csv, "--label-column", "zzz"])
        assert result.exit_code == 2


class TestCluster:
    def test_duplicated_feature_single_cluster(self, runner, duplicated_csv):
        result = run(runner, ["cluster", duplicated_csv, "--label-column", "y"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["k"] == 1
        assert report["clusters"] == [["orig", "double"]]
        assert report["cluster_indices"] == [[1, 2]]
        assert report["rank_checks"] <= 1

    def test_planted_rank_synthetic(self, runner, tmp_path):
        from oracles import planted_matrix, rational_rank

        rng = np.random.default_rng(12)
        mat, rank = planted_matrix(rng)
        header = [f"f{j}" for j in range(1, mat.shape[0] + 1)] + ["y"]
        rows = [
            [str(int(v)) for v in mat[:, i]] + ["A" if i % 2 else "B"]
            for i in range(mat.shape[1])
        ]
        path = write_csv(tmp_path / "planted.csv", header, rows)
        result = run(runner, ["cluster", path, "--label-column", "y"])
        report = json.loads(result.output)
        # constant columns may drop; rank of the surviving rows is the oracle
        kept = [report["input"]["n_features"]]
        survivors = [mat[j] for j in range(mat.shape[0])
                     if f"f{j+1}" not in report["input"]["dropped_features"]]
        assert report["k"] == rational_rank(survivors)
        del kept, rank

    def test_schema_validates(self, runner, duplicated_csv):
        report = json.loads(run(runner, ["cluster", duplicated_csv, "--label-column", "y"]).output)
        jsonschema.validate(report, load_report_schema())

    def test_report_embeds_provenance(self, runner, duplicated_csv):
        report = json.loads(run(runner, ["cluster", duplicated_csv, "--label-column", "y"]).output)
        assert len(report["input"]["sha256"]) == 64
        assert report["version"]
        assert report["params"]["tol"] == 0.0

    def test_k_matches_spectrum_effective_rank(self, runner, tmp_path):
        from oracles import planted_matrix

        rng = np.random.default_rng(99)
        checked = 0
        while checked < 5:
            mat, _ = planted_matrix(rng)
            good = [j for j in range(mat.shape[0]) if mat[j].max() > mat[j].min()]
            if not good:
                continue
            checked += 1
            header = [f"f{j}" for j in good] + ["y"]
            rows = [
                [str(int(mat[j, i])) for j in good] + ["A" if i % 2 else "B"]
                for i in range(mat.shape[1])
            ]
            path = write_csv(tmp_path / "consistency.csv", header, rows)
            cluster_rep = json.loads(run(runner, ["cluster", path, "--label-column", "y"]).output)
            spectrum_out = run(runner, ["spectrum", path, "--label-column", "y"]).output
            effective = int(spectrum_out.splitlines()[0].split("=")[1])
            assert cluster_rep["k"] == effective


class TestRelevance:
    def test_balanced_compensation_is_identity(self, runner, tmp_path):
        path = balanced_dataset(tmp_path)
        base = json.loads(
            run(runner, ["relevance", path, "--label-column", "y"]).output
        )
        plain = json.loads(
            run(runner, ["relevance", path, "--label-column", "y", "--no-compensation"]).output
        )
        assert np.allclose(base["total"], plain["total"], atol=1e-8)
        assert np.allclose(base["per_class"], plain["per_class"], atol=1e-8)

    def test_minority_feature_rank_improves_with_compensation(self, runner, tmp_path):
        path = imbalanced_dataset(tmp_path)
        comp = json.loads(run(runner, ["relevance", path, "--label-column", "y"]).output)
        unc = json.loads(
            run(runner, ["relevance", path, "--label-column", "y", "--no-compensation"]).output
        )
        rank_comp = [e["name"] for e in comp["ranking"]].index("min_sig")
        rank_unc = [e["name"] for e in unc["ranking"]].index("min_sig")
        assert rank_comp < rank_unc

    def test_duplicate_features_share_relevance(self, runner, duplicated_csv):
        report = json.loads(run(runner, ["relevance", duplicated_csv, "--label-column", "y"]).output)
        total = report["total"]
        assert total[0] == pytest.approx(total[1], abs=1e-8)

    def test_medoids_only_restricts(self, runner, duplicated_csv):
        report = json.loads(
            run(runner, ["relevance", duplicated_csv, "--label-column", "y", "--medoids-only"]).output
        )
        assert report["feature_indices"] == [1]
        assert len(report["total"]) == 1

    def test_single_class_refused(self, runner, tmp_path):
        path = write_csv(tmp_path / "one.csv", ["a", "y"], [[1, "A"], [2, "A"], [3, "A"]])
        result = run(runner, ["relevance", path, "--label-column", "y"])
        assert result.exit_code == 2

    def test_tsv_side_outputs(self, runner, tmp_path):
        path = balanced_dataset(tmp_path)
        total_out = tmp_path / "total.tsv"
        per_class_out = tmp_path / "perclass.tsv"
        result = run(
            runner,
            ["relevance", path, "--label-column", "y",
             "--total-tsv", str(total_out), "--per-class-tsv", str(per_class_out)],
        )
        assert result.exit_code == 0
        report = json.loads(result.output)
        total_lines = total_out.read_text().strip().splitlines()
        assert total_lines[0].startswith("#")
        parsed = {int(line.split("\t")[0]): float(line.split("\t")[1]) for line in total_lines[1:]}
        for idx, score in zip(report["feature_indices"], report["total"]):
            assert parsed[idx] == pytest.approx(score, rel=1e-10)
        header = per_class_out.read_text().splitlines()[0]
        assert header.split("\t")[1:] == report["input"]["class_names"]

    def test_schema_validates(self, runner, tmp_path):
        path = balanced_dataset(tmp_path)
        report = json.loads(run(runner, ["relevance", path, "--label-column", "y"]).output)
        jsonschema.validate(report, load_report_schema())


class TestSelect:
    def test_zero_drop_returns_medoids(self, runner, duplicated_csv):
        report = json.loads(run(runner, ["select", duplicated_csv, "--label-column", "y"]).output)
        assert [e["index"] for e in report["selected"]] == report["medoid_indices"]
        assert report["dropped_bottom"] == []

    def test_drop_to_single_keeps_top_feature(self, runner, tmp_path):
        path = balanced_dataset(tmp_path)
        report = json.loads(
            run(runner, ["select", path, "--label-column", "y", "--drop-bottom", "1"]).output
        )
        assert len(report["selected"]) == 1
        assert report["selected"][0]["name"] == "sig"

    def test_drop_too_many_exit_2(self, runner, duplicated_csv):
        result = run(runner, ["select", duplicated_csv, "--label-column", "y", "--drop-bottom", "5"])
        assert result.exit_code == 2

    def test_text_format(self, runner, tmp_path):
        path = balanced_dataset(tmp_path)
        result = run(runner, ["select", path, "--label-column", "y", "--format", "text"])
        lines = result.output.strip().splitlines()
        assert len(lines) == 2
        index, name, score = lines[0].split("\t")
        assert index == "1" and name == "sig"
        float(score)

    def test_schema_validates(self, runner, tmp_path):
        path = balanced_dataset(tmp_path)
        report = json.loads(run(runner, ["select", path, "--label-column", "y"]).output)
        jsonschema.validate(report, load_report_schema())


class TestEvaluate:
    def test_separable_full_features(self, runner, tmp_path):
        path = balanced_dataset(tmp_path, n_per=20)
        result = run(
            runner,
            ["evaluate", path, "--label-column", "y", "--features", "sig,noise", "--folds", "4"],
        )
        report = json.loads(result.output)
        assert report["weighted_tp"] >= 0.95

    def test_feature_refs_accept_indices(self, runner, tmp_path):
        path = balanced_dataset(tmp_path, n_per=20)
        by_name = json.loads(
            run(runner, ["evaluate", path, "--label-column", "y", "--features", "sig", "--folds", "4"]).output
        )
        by_index = json.loads(
            run(runner, ["evaluate", path, "--label-column", "y", "--features", "1", "--folds", "4"]).output
        )
        assert by_name["weighted_tp"] == by_index["weighted_tp"]
        assert by_index["feature_subset"]["names"] == ["sig"]

    def test_auto_selection(self, runner, tmp_path):
        path = balanced_dataset(tmp_path, n_per=20)
        report = json.loads(
            run(runner, ["evaluate", path, "--label-column", "y", "--auto", "0", "--folds", "4"]).output
        )
        assert report["weighted_tp"] >= 0.9
        jsonschema.validate(report, load_report_schema())

    def test_features_and_auto_conflict(self, runner, tmp_path):
        path = balanced_dataset(tmp_path)
        result = run(
            runner,
            ["evaluate", path, "--label-column", "y", "--features", "sig", "--auto", "0"],
        )
        assert result.exit_code == 2

    def test_unknown_feature_exit_2(self, runner, tmp_path):
        path = balanced_dataset(tmp_path)
        result = run(runner, ["evaluate", path, "--label-column", "y", "--features", "bogus"])
        assert result.exit_code == 2


class TestConfigAndEnv:
    def test_config_provides_defaults_flags_win(self, runner, tmp_path):
        path = balanced_dataset(tmp_path)
        cfg = tmp_path / "run.cfg"
        cfg.write_text("label-column=y\ngamma=2.0\n", encoding="utf-8")
        report = json.loads(run(runner, ["relevance", path, "--config", str(cfg)]).output)
        assert report["params"]["gamma"] == 2.0
        flag_wins = json.loads(
            run(runner, ["relevance", path, "--config", str(cfg), "--gamma", "0.5"]).output
        )
        assert flag_wins["params"]["gamma"] == 0.5

    def test_env_tolerance_flag_wins(self, runner, duplicated_csv, monkeypatch):
        monkeypatch.setenv("RANKMED_TOL", "0.5")
        report = json.loads(run(runner, ["cluster", duplicated_csv, "--label-column", "y"]).output)
        assert report["params"]["tol"] == 0.5
        flag = json.loads(
            run(runner, ["cluster", duplicated_csv, "--label-column", "y", "--tol", "1e-9"]).output
        )
        assert flag["params"]["tol"] == 1e-9

    def test_bad_config_line_exit_2(self, runner, duplicated_csv, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("tol 0.5\n", encoding="utf-8")
        result = run(runner, ["cluster", duplicated_csv, "--label-column", "y", "--config", str(cfg)])
        assert result.exit_code == 2


class TestConsoleScript:
    def test_installed_entry_point(self, identity_csv):
        proc = subprocess.run(
            [sys.executable, "-m", "rankmed.cli", "spectrum", identity_csv, "--label-column", "y"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith("# effective_rank=3")

    def test_exit_code_two_from_process(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "rankmed.cli", "cluster", str(tmp_path / "missing.csv"),
             "--label-column", "y"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 2
        assert "error" in proc.stderr
