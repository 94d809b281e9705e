import json
import shutil

from permfiber.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_perm_all_checks(capsys):
    code, out, _ = run_cli(capsys, "perm", "--n", "4", "--pages", "2",
                           "--checks", "all")
    assert code == 0
    assert "E1: (1,-1):4 (2,-1):6 (3,-1):4 (4,-1):1" in out
    assert "E2: (1,-1):1" in out
    assert out.rstrip().endswith("result: PASS")


def test_perm_reports_are_deterministic(capsys):
    _, first, _ = run_cli(capsys, "perm", "--n", "3")
    _, second, _ = run_cli(capsys, "perm", "--n", "3")
    assert first == second


def test_perm_out_of_cap(capsys):
    code, _, err = run_cli(capsys, "perm", "--n", "9")
    assert code == 2
    assert "cap" in err


def test_perm_cap_env_override(capsys, monkeypatch):
    monkeypatch.setenv("PERMFIBER_CAP", "2")
    code, _, err = run_cli(capsys, "perm", "--n", "3")
    assert code == 2
    code, _, _ = run_cli(capsys, "perm", "--n", "3", "--cap", "3")
    assert code == 0


def test_unknown_check_token(capsys):
    code, _, err = run_cli(capsys, "perm", "--n", "2", "--checks", "nonsense")
    assert code == 2
    assert "unknown check" in err


def test_simplex_command(capsys):
    code, out, _ = run_cli(capsys, "simplex", "--n", "4")
    assert code == 0
    assert "check homology: pass" in out


def test_fiber_koszul(capsys, corpus_dir):
    code, out, _ = run_cli(capsys, "fiber", "--graph",
                           str(corpus_dir / "path3.edges"), "--checks", "koszul")
    assert code == 0
    assert "dims by blocks: k=1:1 k=2:5 k=3:5" in out
    assert "H_-3=1" in out


def test_fiber_disconnected_graph(capsys, tmp_path):
    bad = tmp_path / "disconnected.edges"
    bad.write_text("0 1\n2 3\n")
    code, _, err = run_cli(capsys, "fiber", "--graph", str(bad))
    assert code == 2
    assert "not connected" in err


def test_fiber_missing_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "fiber", "--graph", str(tmp_path / "nope.edges"))
    assert code == 2


def test_export_files(capsys, tmp_path, corpus_dir):
    out_dir = tmp_path / "out"
    code, _, _ = run_cli(capsys, "fiber", "--graph",
                         str(corpus_dir / "path3.edges"), "--out", str(out_dir))
    assert code == 0
    dims = (out_dir / "dims.csv").read_text().splitlines()
    assert dims[0] == "object,degree,dim"
    assert "path3,-2,5" in dims
    pages = (out_dir / "pages.csv").read_text().splitlines()
    assert pages[0] == "object,r,p,q,dim"
    assert "path3,2,1,-4,1" in pages
    checks = (out_dir / "checks.csv").read_text().splitlines()
    assert checks[0] == "object,check,pass"
    assert "path3,koszul,true" in checks
    doc = json.loads((out_dir / "path3.json").read_text())
    from permfiber.complexes import complex_from_json
    complex_, levels = complex_from_json(doc)
    assert complex_.dim(-2) == 5
    assert levels is not None


def small_corpus(tmp_path, corpus_dir, names=("path2", "path3", "star3")):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    manifest = json.loads((corpus_dir / "manifest.json").read_text())
    subset = {}
    for name in names:
        shutil.copy(corpus_dir / f"{name}.edges", corpus / f"{name}.edges")
        subset[name] = manifest[name]
    (corpus / "manifest.json").write_text(json.dumps(subset))
    return corpus


def test_suite_small_corpus(capsys, tmp_path, corpus_dir):
    corpus = small_corpus(tmp_path, corpus_dir)
    code, out, _ = run_cli(capsys, "suite", "--corpus", str(corpus), "--cap", "4")
    assert code == 0
    assert "object: P4" in out
    assert "object: P5" not in out  # the sweep respects the cap
    assert out.rstrip().endswith("result: PASS")


def test_suite_mutated_manifest(capsys, tmp_path, corpus_dir):
    corpus = small_corpus(tmp_path, corpus_dir)
    manifest = json.loads((corpus / "manifest.json").read_text())
    manifest["path3"]["dims"]["-2"] = 6
    (corpus / "manifest.json").write_text(json.dumps(manifest))
    code, out, _ = run_cli(capsys, "suite", "--corpus", str(corpus), "--cap", "3")
    assert code == 1
    assert "degree -2: got 5, manifest 6" in out


def test_suite_graph_without_manifest_entry(capsys, tmp_path, corpus_dir):
    corpus = small_corpus(tmp_path, corpus_dir)
    shutil.copy(corpus_dir / "theta.edges", corpus / "theta.edges")
    code, out, _ = run_cli(capsys, "suite", "--corpus", str(corpus), "--cap", "3")
    assert code == 1
    assert "theta,manifest,false" not in out  # csv only goes to files
    assert "no manifest entry" in out


def test_suite_stale_manifest_entry(capsys, tmp_path, corpus_dir):
    corpus = small_corpus(tmp_path, corpus_dir)
    (corpus / "path2.edges").unlink()
    code, out, _ = run_cli(capsys, "suite", "--corpus", str(corpus), "--cap", "3")
    assert code == 1
    assert "manifest entry has no graph file" in out


def test_suite_empty_corpus(capsys, tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "manifest.json").write_text("{}")
    code, _, err = run_cli(capsys, "suite", "--corpus", str(corpus))
    assert code == 2
    assert "no .edges files" in err


def test_suite_missing_manifest(capsys, tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "g.edges").write_text("0 1\n")
    code, _, err = run_cli(capsys, "suite", "--corpus", str(corpus))
    assert code == 2
    assert "manifest" in err


def test_suite_low_cap_reports_oversize_graphs(capsys, corpus_dir):
    code, out, _ = run_cli(capsys, "suite", "--corpus", str(corpus_dir),
                           "--cap", "3")
    assert code == 1  # graphs above the cap are reported, not silently skipped
    assert "above the cap" in out


def test_suite_shipped_corpus_passes(capsys, corpus_dir, tmp_path):
    out_dir = tmp_path / "summary"
    code, out, _ = run_cli(capsys, "suite", "--corpus", str(corpus_dir),
                           "--out", str(out_dir))
    assert code == 0
    assert out.rstrip().endswith("result: PASS")
    checks = (out_dir / "checks.csv").read_text().splitlines()
    assert checks[0] == "object,check,pass"
    assert all(line.endswith(",true") for line in checks[1:])
    assert any(line.startswith("P6,") for line in checks)