"""
One composition cycle: two measures of chords, melody lines and drums.

The harmony agent and the first melody agent compare confidences to decide
who commits first; the remaining melody agents then fill in voices beneath
agent 1 while consuming harmonic resources, and every agent that committed
a phrase gets its reward.
"""
import logging
from dataclasses import dataclass

from apps.context.concepts import Affect
from apps.harmony.chords import INTERVALS
from apps.harmony.exceptions import ModelError
from apps.melody.exceptions import MelodyError
from apps.melody.reward import extract_features, max_range
from apps.melody.search import Abstention, Proposal, RangeConstraint
from apps.percussion.generator import GM_NOTES, TemplatePercussion
from apps.render.score import PERCUSSION_CHANNEL, ScoreNote
from .state import HARMONY_CHANNEL

logger = logging.getLogger(__name__)

HARMONY_BASE_PITCH = 48
HARMONY_VELOCITY = 70
DRUM_DURATION = 60
VELOCITY_AFFECT_GAIN = 0.3
LEADER_HARMONY = "harmony"
LEADER_MELODY = "melody"


@dataclass(frozen=True)
class CycleResult:
    cycle_index: int
    measure_index: int
    leader: str
    progression: object
    notes: tuple
    records: tuple


def _features(fragment, tempo_bpm, onset_offset=0):
    if fragment is None or not fragment.notes:
        return None
    try:
        return extract_features(fragment, tempo_bpm, onset_offset)
    except MelodyError:
        return None


def _agent_record(cycle, agent, outcome, region_ticks, tempo_bpm, h=None, reward=None):
    decision = outcome.decision
    record = {
        "event": "agent",
        "cycle": cycle,
        "agent_id": agent.agent_id,
        "operator": decision.operator.label,
        "r_hat": decision.estimated_reward,
        "explored": decision.explored,
    }
    candidate = decision.candidate.truncated(region_ticks) if decision.candidate is not None else None
    features = _features(candidate, tempo_bpm)
    if features is not None:
        record.update(n_s=features.notes_per_second, p_bar=features.mean_interval, d=features.diatonic_fraction)
    if isinstance(outcome, Proposal):
        placement = outcome.placement
        p = outcome.choice.style_score
        realized = agent.realized_fragment(placement)
        record.update(
            status="placed",
            transposition=placement.transposition,
            shift=placement.time_shift,
            H=h,
            P=p,
            M=h + p,
            R=reward,
            lowest=realized.lowest,
            highest=realized.highest,
        )
    else:
        record.update(status="abstain", reason=outcome.reason)
    return record


def _velocity(base, snapshot, enabled):
    if not enabled:
        return base
    gain = 1 + VELOCITY_AFFECT_GAIN * max(snapshot.level(Affect.ANGER), snapshot.level(Affect.THREAT)) / 100
    return min(127, round(base * gain))


def _chord_notes(progression, origin, measure_ticks, program):
    notes = []
    start = origin
    for chord, measures in progression.segments:
        duration = int(measures * measure_ticks)
        for interval in INTERVALS[chord.quality]:
            notes.append(
                ScoreNote(
                    instrument="harmony",
                    channel=HARMONY_CHANNEL,
                    pitch=HARMONY_BASE_PITCH + chord.root + interval,
                    start=start,
                    duration=duration,
                    velocity=HARMONY_VELOCITY,
                    program=program,
                )
            )
        start += duration
    return notes


def _melody_notes(agent, placement, origin, ticks_per_cell, snapshot, velocity_affect):
    offset = origin + placement.time_shift * ticks_per_cell
    return [
        ScoreNote(
            instrument=f"melody_{agent.agent_id}",
            channel=agent.agent_id - 1,
            pitch=note.pitch,
            start=offset + note.onset,
            duration=note.duration,
            velocity=_velocity(note.velocity, snapshot, velocity_affect),
            agent_id=agent.agent_id,
            program=agent.program,
        )
        for note in agent.realized_fragment(placement).notes
    ]


def lowest_line_order(agent_count):
    """Agents searched for the lowest committed line: 2, then 3..N, then 1."""
    if agent_count < 2:
        return [1]
    return [2, *range(3, agent_count + 1), 1]


def kick_onsets(placement, ticks_per_cell):
    shift = placement.time_shift * ticks_per_cell
    return sorted({(shift + n.onset) // ticks_per_cell * ticks_per_cell for n in placement.fragment.notes})


def _lead_with_melody(state, agent, decision, base, config, style):
    """
    Places agent 1 against the carry-over context, then walks down the
    first-chord ranks until the fixed phrase fits. Returns (progression,
    context, proposal, H), or an Abstention when the phrase cannot be kept.
    """
    outcome = agent.place(decision, base.carry_over(), style, agent.register, h_min=0.0)
    if not isinstance(outcome, Proposal):
        return outcome
    for rank in range(1, state.harmony.top_k + 1):
        try:
            progression = state.harmony.propose(state.chord_history, first_rank=rank)
        except ModelError:
            break
        context = base.extend(progression.segments)
        h = context.harmonic_fitness(outcome.placement)
        if h >= config.melody.h_min:
            return progression, context, outcome, h
    logger.info("cycle %d: no chord rank fits the leading phrase, discarding it", state.cycle_index)
    return Abstention(decision, "no-chord-fit")


def composition_cycle(state, snapshot, theme, config):
    """Composes the next two measures into `state` and returns what was committed."""
    cycle = state.cycle_index
    style = config.engine.style
    tempo = config.engine.tempo_bpm
    mode = config.melody.selection_mode
    n_agents = len(state.agents)
    base = state.matrix
    tpc = base.ticks_per_cell
    region_ticks = base.region_cells * tpc
    measure_ticks = config.measure_ticks
    origin = state.measure_index * measure_ticks
    records = []

    first = state.harmony.propose(state.chord_history, first_rank=1)
    c_h = first.confidence
    leader_agent = state.agents[0]
    lead_decision = leader_agent.decide(theme, snapshot, mode)
    can_lead = not lead_decision.gated and lead_decision.candidate is not None
    c_m = lead_decision.estimated_reward / config.xcs.params.reward_max if can_lead else 0.0

    outcomes = {}
    commit_h = {}
    leader = LEADER_HARMONY
    progression, matrix = first, None
    if c_m > c_h:
        led = _lead_with_melody(state, leader_agent, lead_decision, base, config, style)
        if isinstance(led, Abstention):
            outcomes[1] = led
        else:
            leader = LEADER_MELODY
            progression, matrix, proposal, h = led
            outcomes[1] = proposal
            commit_h[1] = h
            matrix = matrix.consume(proposal.placement)
    if matrix is None:
        matrix = base.extend(first.segments)

    records.append(
        {
            "event": "leader",
            "cycle": cycle,
            "measure": state.measure_index,
            "leader": leader,
            "c_h": c_h,
            "c_m": c_m,
        }
    )
    records.append(
        {
            "event": "chords",
            "cycle": cycle,
            "rank": progression.first_rank,
            "confidence": progression.confidence,
            "chords": progression.labels(),
        }
    )

    m_r = max_range(n_agents, style, config.style_range)
    lines = {}
    if isinstance(outcomes.get(1), Proposal):
        lines[1] = leader_agent.realized_fragment(outcomes[1].placement)
    inner_high = None
    for agent in state.agents:
        aid = agent.agent_id
        if aid in outcomes:
            continue
        decision = lead_decision if aid == 1 else agent.decide(theme, snapshot, mode)
        low, high = agent.register.low, agent.register.high
        top = lines.get(1)
        if aid > 1 and top is not None:
            high = min(high, top.lowest)
            low = max(low, top.highest - m_r)
        if aid > 2 and inner_high is not None:
            low = max(low, inner_high)
        outcome = agent.place(decision, matrix, style, RangeConstraint(low, high))
        outcomes[aid] = outcome
        if isinstance(outcome, Proposal):
            commit_h[aid] = matrix.harmonic_fitness(outcome.placement)
            matrix = matrix.consume(outcome.placement)
            lines[aid] = agent.realized_fragment(outcome.placement)
            if aid > 1:
                inner_high = lines[aid].highest

    notes = _chord_notes(progression, origin, measure_ticks, config.harmony.program)
    for agent in state.agents:
        outcome = outcomes[agent.agent_id]
        reward = None
        if isinstance(outcome, Proposal):
            reward = agent.learn(outcome, snapshot, tpc)
            notes.extend(
                _melody_notes(agent, outcome.placement, origin, tpc, snapshot, config.melody.velocity_affect)
            )
        records.append(
            _agent_record(cycle, agent, outcome, region_ticks, tempo, commit_h.get(agent.agent_id), reward)
        )

    if config.percussion.enabled:
        source = next(
            (aid for aid in lowest_line_order(n_agents) if isinstance(outcomes.get(aid), Proposal)),
            None,
        )
        onsets = kick_onsets(outcomes[source].placement, tpc) if source is not None else []
        drums = TemplatePercussion(
            config.percussion.ornament_probability,
            beats_per_measure=config.engine.beats_per_measure,
        ).generate(onsets, style, state.rng)
        hits = 0
        for lane, lane_hits in drums.lanes.items():
            for hit in lane_hits:
                notes.append(
                    ScoreNote(
                        instrument="percussion",
                        channel=PERCUSSION_CHANNEL,
                        pitch=GM_NOTES[lane],
                        start=origin + hit.onset,
                        duration=DRUM_DURATION,
                        velocity=_velocity(hit.velocity, snapshot, config.melody.velocity_affect),
                    )
                )
                hits += 1
        records.append(
            {"event": "percussion", "cycle": cycle, "source_agent": source, "kick": onsets, "hits": hits}
        )

    state.score.extend(notes)
    state.remember(progression.tokens)
    state.matrix = matrix
    result = CycleResult(cycle, state.measure_index, leader, progression, tuple(notes), tuple(records))
    state.measure_index += 2
    state.cycle_index += 1
    logger.debug(
        "cycle %d: leader=%s chords=%s placed=%s",
        cycle,
        leader,
        " ".join(progression.labels()),
        sorted(lines),
    )
    return result
