import pytest
from django.urls import reverse
from kombu.exceptions import OperationalError as KombuOperationalError
from rest_framework.test import APIClient

from apps.conductor.models import ReplayJob
from apps.conductor.tasks import run_replay_job
from apps.conductor.trace import write_trace


def no_broker(*args, **kwargs):
    raise KombuOperationalError("broker down")


@pytest.mark.django_db
def test_replay_rejects_non_midi_output(monkeypatch):
    monkeypatch.setattr("apps.conductor.views.run_replay_job.delay", no_broker)
    client = APIClient()
    resp = client.post(reverse("replay-list"), {"trace": "t.jsonl", "out": "out.wav"}, format="json")
    assert resp.status_code == 400
    assert "out" in resp.data
    assert ReplayJob.objects.count() == 0


@pytest.mark.django_db
def test_replay_job_stays_pending_without_a_broker(monkeypatch):
    monkeypatch.setattr("apps.conductor.views.run_replay_job.delay", no_broker)
    client = APIClient()
    resp = client.post(reverse("replay-list"), {"trace": "t.jsonl", "out": "out.mid"}, format="json")
    assert resp.status_code == 201
    assert resp.data["status"] == "PENDING"

    detail = client.get(reverse("replay-detail", args=[resp.data["id"]]))
    assert detail.status_code == 200
    assert detail.data["output_path"] == "out.mid"
    assert client.get(reverse("replay-list")).data["results"][0]["id"] == resp.data["id"]


@pytest.mark.django_db
def test_replay_job_runs_to_done(tmp_path):
    trace = tmp_path / "empty.jsonl"
    write_trace([], trace)
    job = ReplayJob.objects.create(trace_path=str(trace), output_path=str(tmp_path / "out.mid"))

    run_replay_job(job.id)

    job.refresh_from_db()
    assert job.status == ReplayJob.STATUS_DONE
    assert job.cycles == 15
    assert len(job.midi_sha256) == 64
    assert job.finished_at is not None
    assert (tmp_path / "out.events.jsonl").exists()


@pytest.mark.django_db
def test_replay_job_with_missing_trace_fails(tmp_path):
    job = ReplayJob.objects.create(trace_path=str(tmp_path / "missing.jsonl"), output_path=str(tmp_path / "o.mid"))

    run_replay_job(job.id)

    job.refresh_from_db()
    assert job.status == ReplayJob.STATUS_FAILED
    assert job.error


@pytest.mark.django_db
def test_unknown_job_is_ignored():
    run_replay_job(999)
    assert ReplayJob.objects.count() == 0


@pytest.mark.django_db
def test_theme_list():
    resp = APIClient().get(reverse("theme-list"))
    assert resp.status_code == 200
    assert [t["id"] for t in resp.data] == list(range(8))
    assert all(len(t["digest"]) == 64 for t in resp.data)


@pytest.mark.django_db
def test_engine_status_without_redis(monkeypatch):
    monkeypatch.setattr("apps.conductor.views.read_status", lambda: None)
    resp = APIClient().get(reverse("engine-status"))
    assert resp.data == {"available": False}


@pytest.mark.django_db
def test_engine_status_passes_the_latest_snapshot(monkeypatch):
    monkeypatch.setattr("apps.conductor.views.read_status", lambda: {"cycle": 4, "leader": "melody"})
    resp = APIClient().get(reverse("engine-status"))
    assert resp.data == {"available": True, "cycle": 4, "leader": "melody"}
