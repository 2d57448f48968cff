import json

import pytest

from clipseek.catalog import Catalog
from clipseek.cli import main
from clipseek.synth import class_colors, moving_square_frames, solid_frame, write_frames


def class_frames(c, marker=0, n=3):
    return [solid_frame(class_colors(4)[c], marker_pixels=marker)] * n


@pytest.fixture
def workspace(tmp_path):
    cat_root = tmp_path / "catalog"
    frames_a = write_frames(tmp_path / "clip_a", class_frames(0, marker=1))
    frames_b = write_frames(tmp_path / "clip_b", class_frames(1, marker=1))
    return tmp_path, cat_root, frames_a, frames_b


def run(args):
    return main([str(a) for a in args])


class TestRegister:
    def test_success_line_and_exit_code(self, workspace, capsys):
        tmp, cat, a, _ = workspace
        code = run(["--catalog", cat, "register", "--name", "a", "--frames", a])
        assert code == 0
        assert capsys.readouterr().out == "v_id=1 keyframes=1\n"

    def test_empty_dir_exit_two(self, workspace, capsys):
        tmp, cat, *_ = workspace
        empty = tmp / "empty"
        empty.mkdir()
        assert run(["--catalog", cat, "register", "--name", "x", "--frames", empty]) == 2
        assert "error:" in capsys.readouterr().err

    def test_repeat_registrations_monotone(self, workspace, capsys):
        tmp, cat, a, b = workspace
        run(["--catalog", cat, "register", "--name", "a", "--frames", a])
        run(["--catalog", cat, "register", "--name", "b", "--frames", b])
        out = capsys.readouterr().out.splitlines()
        assert out == ["v_id=1 keyframes=1", "v_id=2 keyframes=1"]


class TestIngest:
    def test_lists_keyframes(self, workspace, capsys):
        tmp, _, a, _ = workspace
        assert run(["ingest", "--frames", a]) == 0
        out, err = capsys.readouterr()
        assert out == "0\tf000.ppm\n"
        assert "keyframes=1 of 3" in err


class TestSearch:
    def test_self_query_zero_distance(self, workspace, capsys):
        tmp, cat, a, b = workspace
        run(["--catalog", cat, "register", "--name", "a", "--frames", a])
        run(["--catalog", cat, "register", "--name", "b", "--frames", b])
        capsys.readouterr()
        assert run(["--catalog", cat, "search", "--frames", a]) == 0
        out, err = capsys.readouterr()
        first = out.splitlines()[0].split("\t")
        assert first == ["1", "a", "0.000000"]
        assert "retrieval_s=" in err and "matching_s=" in err

    def test_exhaustive_matches_indexed_top1(self, workspace, capsys):
        tmp, cat, a, b = workspace
        run(["--catalog", cat, "register", "--name", "a", "--frames", a])
        run(["--catalog", cat, "register", "--name", "b", "--frames", b])
        capsys.readouterr()
        run(["--catalog", cat, "search", "--frames", a])
        indexed = capsys.readouterr().out.splitlines()[0]
        run(["--catalog", cat, "search", "--frames", a, "--exhaustive"])
        exhaustive = capsys.readouterr().out.splitlines()[0]
        assert indexed == exhaustive

    def test_empty_catalog_no_results(self, workspace, capsys):
        tmp, cat, a, _ = workspace
        assert run(["--catalog", cat, "search", "--frames", a]) == 0
        assert capsys.readouterr().out == "no results\n"

    def test_undecodable_input_exit_two(self, workspace, capsys):
        tmp, cat, *_ = workspace
        bad = tmp / "bad"
        bad.mkdir()
        (bad / "junk.txt").write_text("nope")
        assert run(["--catalog", cat, "search", "--frames", bad]) == 2


class TestEval:
    def test_judgments_mode_reproduces_published_values(self, tmp_path, capsys):
        manifest = tmp_path / "j.json"
        manifest.write_text(
            json.dumps(
                {
                    "judgments": [
                        {"query": "vid1.mpeg", "matched": 4, "retrieved": 5, "available": 9},
                        {"query": "vid4.mpeg", "matched": 8, "retrieved": 9, "available": 12},
                    ]
                }
            )
        )
        report_dir = tmp_path / "report"
        assert run(["eval", "--queries", manifest, "--report-dir", report_dir]) == 0
        out = capsys.readouterr().out
        assert "0.80" in out and "0.56" in out
        assert "0.89" in out and "0.75" in out
        assert (report_dir / "report.csv").exists()
        assert (report_dir / "precision_recall.png").exists()

    def test_query_mode_end_to_end(self, workspace, capsys):
        tmp, cat, a, b = workspace
        run(["--catalog", cat, "register", "--name", "a", "--frames", a])
        run(["--catalog", cat, "register", "--name", "b", "--frames", b])
        manifest = tmp / "m.json"
        manifest.write_text(
            json.dumps({"queries": [{"frames_dir": "clip_a", "relevant": [1]}]})
        )
        capsys.readouterr()
        code = run(
            ["--catalog", cat, "eval", "--queries", manifest, "--k", 1,
             "--report-dir", tmp / "rep"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "1.00" in out

    def test_empty_manifest_ok(self, tmp_path, capsys):
        manifest = tmp_path / "e.json"
        manifest.write_text(json.dumps({"judgments": []}))
        assert run(["eval", "--queries", manifest, "--report-dir", tmp_path / "r"]) == 0

    def test_unknown_relevant_id_exit_two(self, workspace, capsys):
        tmp, cat, a, _ = workspace
        run(["--catalog", cat, "register", "--name", "a", "--frames", a])
        manifest = tmp / "m.json"
        manifest.write_text(
            json.dumps({"queries": [{"frames_dir": "clip_a", "relevant": [1, 42]}]})
        )
        capsys.readouterr()
        assert run(["--catalog", cat, "eval", "--queries", manifest]) == 2
        assert "42" in capsys.readouterr().err

    def test_bad_manifest_exit_two(self, tmp_path):
        manifest = tmp_path / "bad.json"
        manifest.write_text("{not json")
        assert run(["eval", "--queries", manifest]) == 2
        manifest.write_text(json.dumps({"wrong": []}))
        assert run(["eval", "--queries", manifest]) == 2


class TestMotion:
    def _seed(self, tmp, cat):
        mover = write_frames(tmp / "mover", moving_square_frames())
        static = write_frames(tmp / "static", class_frames(0, marker=1, n=5))
        run(["--catalog", cat, "register", "--name", "mover", "--frames", mover])
        run(["--catalog", cat, "register", "--name", "static", "--frames", static])

    def test_stroke_ranks_mover_first(self, tmp_path, capsys):
        cat = tmp_path / "catalog"
        self._seed(tmp_path, cat)
        sketch = tmp_path / "stroke.json"
        sketch.write_text(
            json.dumps({"points": [[0.05 + 0.9 * t / 19, 0.5] for t in range(20)]})
        )
        capsys.readouterr()
        assert run(["--catalog", cat, "motion", "--sketch", sketch]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].split("\t")[1] == "mover"
        assert len(lines) == 1  # static video has no trajectory

    def test_degenerate_sketch_exit_two(self, tmp_path, capsys):
        cat = tmp_path / "catalog"
        self._seed(tmp_path, cat)
        sketch = tmp_path / "p.json"
        sketch.write_text(json.dumps({"points": [[0.5, 0.5], [0.5, 0.5]]}))
        capsys.readouterr()
        assert run(["--catalog", cat, "motion", "--sketch", sketch]) == 2

    def test_no_trajectories_no_results(self, workspace, capsys):
        tmp, cat, a, _ = workspace
        run(["--catalog", cat, "register", "--name", "a", "--frames", a])
        sketch = tmp / "s.json"
        sketch.write_text(json.dumps({"points": [[0.1, 0.5], [0.9, 0.5]]}))
        capsys.readouterr()
        assert run(["--catalog", cat, "motion", "--sketch", sketch]) == 0
        assert capsys.readouterr().out == "no results\n"


class TestExitCodes:
    def test_internal_error_exit_one(self, workspace, capsys, monkeypatch):
        import clipseek.cli as cli_mod

        tmp, cat, a, _ = workspace

        def explode(*args, **kwargs):
            raise RuntimeError("boom")

        monkeypatch.setattr(cli_mod, "ingest_frames", explode)
        assert run(["--catalog", cat, "register", "--name", "x", "--frames", a]) == 1
        assert "internal error" in capsys.readouterr().err

    def test_eval_parallel_flag(self, workspace, capsys):
        tmp, cat, a, b = workspace
        run(["--catalog", cat, "register", "--name", "a", "--frames", a])
        manifest = tmp / "m.json"
        manifest.write_text(
            json.dumps({"queries": [{"frames_dir": "clip_a", "relevant": [1]}]})
        )
        capsys.readouterr()
        code = run(
            ["--catalog", cat, "eval", "--queries", manifest, "--parallel",
             "--report-dir", tmp / "rp"]
        )
        assert code == 0
        assert "timings unreliable" in capsys.readouterr().out


class TestSeedCorpus:
    def test_writes_tree_and_registers(self, tmp_path, capsys):
        out = tmp_path / "corpus"
        cat = tmp_path / "catalog"
        code = run(
            ["--catalog", cat, "seed-corpus", "--out", out,
             "--classes", 2, "--per-class", 2, "--register"]
        )
        assert code == 0
        stdout = capsys.readouterr().out
        assert "videos=6" in stdout  # 2x2 class videos + 2 motion videos
        assert (out / "manifest.json").exists()
        assert (out / "sketches" / "right.json").exists()
        assert len(Catalog(cat).videos()) == 6
