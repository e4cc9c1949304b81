import logging
from collections import Counter

import mido
from mido import Message, MetaMessage, MidiFile, MidiTrack

from .exceptions import MidiSerializationError
from .score import NOTE_OFF, NOTE_ON, PERCUSSION_CHANNEL

logger = logging.getLogger(__name__)

TICKS_PER_BEAT = 480


def _check_matched(instrument, events):
    open_notes = Counter()
    for ev in events:
        key = (ev.channel, ev.pitch)
        if ev.kind == NOTE_ON:
            open_notes[key] += 1
        elif ev.kind == NOTE_OFF:
            if open_notes[key] == 0:
                raise MidiSerializationError(f"{instrument}: note-off without note-on at tick {ev.tick}")
            open_notes[key] -= 1
    dangling = [key for key, n in open_notes.items() if n]
    if dangling:
        raise MidiSerializationError(f"{instrument}: unmatched note-on for {sorted(dangling)}")


def build_midi(score, tempo_bpm, time_signature=(4, 4)):
    mid = MidiFile(type=1, ticks_per_beat=TICKS_PER_BEAT)
    tempo_track = MidiTrack()
    tempo_track.append(MetaMessage("track_name", name="tempo", time=0))
    tempo_track.append(MetaMessage("set_tempo", tempo=mido.bpm2tempo(tempo_bpm), time=0))
    tempo_track.append(
        MetaMessage("time_signature", numerator=time_signature[0], denominator=time_signature[1], time=0)
    )
    mid.tracks.append(tempo_track)

    for instrument in score.instruments:
        events = score.events(instrument)
        _check_matched(instrument, events)
        track = MidiTrack()
        track.append(MetaMessage("track_name", name=instrument, time=0))
        program = score.program(instrument)
        if program is not None and program[0] != PERCUSSION_CHANNEL:
            track.append(Message("program_change", channel=program[0], program=program[1], time=0))
        last = 0
        for ev in events:
            track.append(Message(ev.kind, channel=ev.channel, note=ev.pitch, velocity=ev.velocity, time=ev.tick - last))
            last = ev.tick
        mid.tracks.append(track)
    return mid


def write_midi(score, tempo_bpm, path, time_signature=(4, 4)):
    mid = build_midi(score, tempo_bpm, time_signature)
    mid.save(str(path))
    logger.info("wrote %d tracks (%d notes) to %s", len(mid.tracks), len(score), path)
    return path


def read_notes(path):
    """Parses a written file back into (track name, channel, pitch, start, duration, velocity) tuples."""
    mid = MidiFile(str(path))
    notes = []
    for track in mid.tracks:
        name, now, pending = track.name, 0, {}
        for msg in track:
            now += msg.time
            if msg.type == "note_on" and msg.velocity > 0:
                pending.setdefault((msg.channel, msg.note), []).append((now, msg.velocity))
            elif msg.type in ("note_off", "note_on"):
                start, velocity = pending[(msg.channel, msg.note)].pop(0)
                notes.append((name, msg.channel, msg.note, start, now - start, velocity))
    return sorted(notes, key=lambda n: (n[0], n[3], n[2]))
