import json
import subprocess
import sys

import pytest

from lexclean.cli import main
from lexclean.pipeline import read_report


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--segments", "2000", "--pairs", "80", "--seed", "5", "--out", str(out)]) == 0
    return out


def test_synth_outputs(synth_dir):
    assert (synth_dir / "bitext.txt").exists()
    assert len((synth_dir / "gold.tsv").read_text().splitlines()) == 80
    resolved = json.loads((synth_dir / "config.resolved").read_text())
    assert resolved["segments"] == 2000 and resolved["command"] == "synth"


def test_synth_clean_eval(synth_dir, tmp_path):
    bitext = str(synth_dir / "bitext.txt")
    assert main(["clean", "--corpus", bitext, "--out", str(tmp_path / "c"), "--workers", "1"]) == 0
    report = read_report(tmp_path / "c" / "report.tsv")
    assert report and report[-1].entries_in_lexicon > 0
    rc = main(["eval", "--corpus", bitext, "--lexicon", str(tmp_path / "c" / "lexicon.tsv"),
               "--gold", str(synth_dir / "gold.tsv"), "--plateau", "1/1", "--out", str(tmp_path / "e")])
    assert rc == 0
    summary = dict(line.split("\t") for line in (tmp_path / "e" / "report.tsv").read_text().splitlines()[1:])
    assert float(summary["combined_recall_percent"]) > 85
    assert (tmp_path / "e" / "recall.tsv").exists()
    assert (tmp_path / "e" / "precision.tsv").exists()


def test_cutoff_and_induce(synth_dir, tmp_path):
    bitext = str(synth_dir / "bitext.txt")
    assert main(["clean", "--corpus", bitext, "--out", str(tmp_path / "c"), "--workers", "1"]) == 0
    assert main(["cutoff", "--lexicon", str(tmp_path / "c" / "lexicon.tsv"), "--plateau", "3/3",
                 "--out", str(tmp_path / "cut")]) == 0
    assert main(["induce", "--corpus", bitext, "--out", str(tmp_path / "i"), "--workers", "1"]) == 0
    rc = main(["cutoff", "--lexicon", str(tmp_path / "i" / "lexicon.tsv"), "--plateau", "2/2",
               "--out", str(tmp_path / "bad")])
    assert rc == 1


def test_empty_corpus_message(tmp_path, capsys):
    (tmp_path / "empty.txt").write_text("")
    rc = main(["clean", "--corpus", str(tmp_path / "empty.txt"), "--out", str(tmp_path / "o")])
    assert rc == 1
    assert "empty corpus" in capsys.readouterr().err


def test_generation_zero_cutoff_message(tmp_path, capsys):
    (tmp_path / "lex.tsv").write_text("source_word\ttarget_word\tscore\tk\tn\na\tx\t3.000000\t0\t2\n")
    rc = main(["cutoff", "--lexicon", str(tmp_path / "lex.tsv"), "--plateau", "2/2", "--out", str(tmp_path / "o")])
    assert rc == 1
    assert "lexicon not regraded" in capsys.readouterr().err


def test_usage_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["clean", "--no-such-flag"])
    assert exc.value.code == 2


def test_config_file_and_flag_override(synth_dir, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"corpus": str(synth_dir / "bitext.txt"), "threshold": 5.0, "workers": 1}))
    assert main(["baseline", "--config", str(cfg), "--threshold", "20", "--out", str(tmp_path / "b")]) == 0
    resolved = json.loads((tmp_path / "b" / "config.resolved").read_text())
    assert resolved["threshold"] == 20.0 and resolved["corpus"].endswith("bitext.txt")
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["baseline", "--config", str(cfg), "--out", str(tmp_path / "b2")]) == 1


def test_workers_env_fallback(synth_dir, tmp_path, monkeypatch):
    monkeypatch.setenv("LEXCLEAN_WORKERS", "2")
    assert main(["induce", "--corpus", str(synth_dir / "bitext.txt"), "--out", str(tmp_path / "i")]) == 0
    assert json.loads((tmp_path / "i" / "config.resolved").read_text())["workers"] == 2


def test_concord(synth_dir, tmp_path):
    src, tgt = (synth_dir / "gold.tsv").read_text().splitlines()[0].split("\t")
    assert main(["concord", "--corpus", str(synth_dir / "bitext.txt"), "--entry", src, tgt,
                 "--max-lines", "3", "--out", str(tmp_path / "k")]) == 0
    text = (tmp_path / "k" / "concordance.txt").read_text()
    assert text.startswith(f"# {src}\t{tgt}\t3 excerpt(s)")
    assert f"[[{src}]]" in text


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lexclean.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "synth" in proc.stdout
