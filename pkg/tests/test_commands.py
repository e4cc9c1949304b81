import json
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from apps.harmony.ngram import ChordSequenceModel


def run(*args, **options):
    out = StringIO()
    call_command(*args, stdout=out, **options)
    return out.getvalue()


def test_validate_config_prints_the_resolved_engine(assets_dir):
    output = run("validate_config", str(assets_dir / "default.conf"))
    assert "pop at 120 BPM in 4/4, 3 melody agents, cycle 4 s" in output
    assert "Config OK." in output


def test_validate_config_rejects_bad_values(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("engine.style = polka\n", encoding="utf-8")
    with pytest.raises(CommandError) as excinfo:
        run("validate_config", str(path))
    assert excinfo.value.returncode == 2


def test_replay_writes_midi_and_logs(assets_dir, tmp_path):
    out = tmp_path / "threat.mid"
    trace = assets_dir / "traces" / "threat_ramp.jsonl"
    output = run("replay", "--trace", str(trace), "--out", str(out), "--duration", "8")
    assert "cycles: 2" in output
    assert out.read_bytes().startswith(b"MThd")
    assert (tmp_path / "threat.events.jsonl").exists()
    assert (tmp_path / "threat.score.jsonl").exists()


def test_replay_argument_errors(assets_dir, tmp_path):
    with pytest.raises(CommandError) as excinfo:
        run("replay", "--trace", str(assets_dir / "traces" / "threat_ramp.jsonl"), "--out", str(tmp_path / "x.wav"))
    assert excinfo.value.returncode == 1
    with pytest.raises(CommandError) as excinfo:
        run("replay", "--trace", str(tmp_path / "missing.jsonl"), "--out", str(tmp_path / "x.mid"))
    assert excinfo.value.returncode == 2


def test_train_chords_writes_a_loadable_model(tmp_path):
    out = tmp_path / "chords.amsc"
    output = run("train_chords", "--out", str(out))
    assert "held-out perplexity" in output
    assert ChordSequenceModel.load(out).order == 3


def test_train_chords_reports_corpus_errors(tmp_path):
    corpus = tmp_path / "jazz.txt"
    corpus.write_text("Dm7 G7 | Qq\n", encoding="utf-8")
    with pytest.raises(CommandError) as excinfo:
        run("train_chords", f"jazz={corpus}", "--out", str(tmp_path / "c.amsc"))
    assert excinfo.value.returncode == 2
    with pytest.raises(CommandError) as excinfo:
        run("train_chords", f"polka={corpus}", "--out", str(tmp_path / "c.amsc"))
    assert excinfo.value.returncode == 1


def test_repl_injects_messages(tmp_path):
    out = tmp_path / "repl.mid"
    stdin = StringIO("affect sadness 80\nsnapshot\nbogus\ntick 3\nquit\n")
    output = run("repl", "--out", str(out), stdin=stdin)
    snapshot = json.loads(next(line for line in output.splitlines() if line.startswith("{")))
    assert snapshot["sadness"] == pytest.approx(80, abs=0.1)
    assert "commands:" in output
    assert out.exists()


def test_seed_assets_regenerates_the_demo_traces(tmp_path):
    output = run("seed_assets", "--out-dir", str(tmp_path), "--duration", "5", "--soak", "10")
    assert {p.name for p in tmp_path.iterdir()} == {
        "threat_ramp.jsonl",
        "happiness_plateau.jsonl",
        "sadness_plateau.jsonl",
        "mixed_session.jsonl",
        "soak_10.jsonl",
    }
    assert "Seeding complete." in output
