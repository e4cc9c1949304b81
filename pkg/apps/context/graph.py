"""
Concept graph: the engine's model of what the game is currently about.

Vertices are affects (always present), objects and environments. Activation
spreads along weighted undirected edges once per tick, fades linearly, and
co-activated non-affect vertices grow inferred edges between them.
"""
import logging
from dataclasses import dataclass

import networkx as nx

from apps.osc.messages import ActivateConcept, AssignTheme, SetAffect, SetEdge
from .concepts import (
    AFFECT_ORDER,
    ActivationMode,
    Affect,
    AffectSnapshot,
    ConceptEdge,
    ConceptVertex,
    EdgeProvenance,
    VertexKind,
)
from .exceptions import ConceptNotFound, ProtocolError

logger = logging.getLogger(__name__)

MAX_ACTIVATION = 100.0
MAX_THEME_ID = 63


@dataclass(frozen=True)
class GraphSettings:
    vertex_fade_per_s: float = 0.1
    edge_fade_per_s: float = 0.01
    inferred_weight: float = 0.5
    reinforce_step: float = 0.1
    coactivation_threshold: float = 50.0
    edge_floor: float = 0.01


def _edge_length(u, v, data):
    weight = data["weight"]
    # zero-weight edges are not traversable
    if weight <= 0.0:
        return None
    return 1.0 / weight


def _pair(a, b):
    return (a, b) if a <= b else (b, a)


class ConceptGraph:
    def __init__(self, settings=None):
        self.settings = settings or GraphSettings()
        self.clock_ms = 0
        self._g = nx.Graph()
        self._coactive = set()
        self._theme_requests = []
        for affect in AFFECT_ORDER:
            self._g.add_node(
                affect.value,
                kind=VertexKind.AFFECT,
                activation=0.0,
                theme=None,
                last_activated=0,
            )

    # ------------------------------------------------------------------ reads

    def __contains__(self, concept):
        return self.resolve(concept) in self._g

    def resolve(self, name):
        """Maps affect names onto their canonical vertex id, leaves others alone."""
        affect = Affect.parse(name)
        return affect.value if affect is not None else name

    def vertex(self, concept):
        vid = self.resolve(concept)
        if vid not in self._g:
            raise ConceptNotFound(concept)
        data = self._g.nodes[vid]
        return ConceptVertex(
            id=vid,
            kind=data["kind"],
            activation=data["activation"],
            theme=data["theme"],
            last_activated=data["last_activated"],
        )

    def vertices(self):
        return [self.vertex(vid) for vid in sorted(self._g.nodes)]

    def edge(self, a, b):
        data = self._g.get_edge_data(self.resolve(a), self.resolve(b))
        if data is None:
            return None
        u, v = _pair(self.resolve(a), self.resolve(b))
        return ConceptEdge(u, v, data["weight"], data["provenance"])

    def edges(self):
        return sorted(
            (
                ConceptEdge(*_pair(u, v), data["weight"], data["provenance"])
                for u, v, data in self._g.edges(data=True)
            ),
            key=lambda e: (e.a, e.b),
        )

    def copy(self):
        clone = ConceptGraph(self.settings)
        clone.clock_ms = self.clock_ms
        clone._g = self._g.copy()
        clone._coactive = set(self._coactive)
        clone._theme_requests = list(self._theme_requests)
        return clone

    def affect_snapshot(self):
        return AffectSnapshot(
            *(self._g.nodes[a.value]["activation"] for a in AFFECT_ORDER)
        )

    def dominant_theme(self):
        """(theme_id, vertex id) of the most active themed object, or None."""
        candidates = [
            (vid, data)
            for vid, data in self._g.nodes(data=True)
            if data["kind"] is VertexKind.OBJECT
            and data["theme"] is not None
            and data["activation"] > 0.0
        ]
        if not candidates:
            return None
        vid, data = min(
            candidates,
            key=lambda item: (-item[1]["activation"], -item[1]["last_activated"], item[0]),
        )
        return data["theme"], vid

    def nearest_themed(self, concept, k):
        """Themes of the k themed objects closest to `concept`, distance = sum of 1/w."""
        vid = self.resolve(concept)
        if vid not in self._g:
            raise ConceptNotFound(concept)
        lengths = nx.single_source_dijkstra_path_length(self._g, vid, weight=_edge_length)
        ranked = sorted(
            (distance, other)
            for other, distance in lengths.items()
            if other != vid
            and self._g.nodes[other]["kind"] is VertexKind.OBJECT
            and self._g.nodes[other]["theme"] is not None
        )
        return [self._g.nodes[other]["theme"] for _, other in ranked[:k]]

    def pop_theme_requests(self):
        """Objects that just got their first edge and still have no theme."""
        requests, self._theme_requests = self._theme_requests, []
        return [
            vid
            for vid in requests
            if vid in self._g and self._g.nodes[vid]["theme"] is None
        ]

    def dump(self):
        lines = [f"clock\t{self.clock_ms}"]
        for v in self.vertices():
            theme = "-" if v.theme is None else str(v.theme)
            lines.append(
                f"vertex\t{v.id}\t{v.kind.value}\t{v.activation:.6f}\t{theme}\t{v.last_activated}"
            )
        for e in self.edges():
            lines.append(f"edge\t{e.a}\t{e.b}\t{e.weight:.6f}\t{e.provenance.value}")
        return "\n".join(lines) + "\n"

    # ----------------------------------------------------------------- writes

    def apply(self, message):
        match message:
            case ActivateConcept(name=name, kind=kind, level=level, mode=mode):
                if VertexKind(kind) is VertexKind.AFFECT:
                    raise ProtocolError("affects are driven through SetAffect")
                self._activate(name, VertexKind(kind), level, mode)
            case SetAffect(category=category, level=level, mode=mode):
                self._activate(Affect(category).value, VertexKind.AFFECT, level, mode)
            case SetEdge(a=a, b=b, weight=weight):
                self.set_edge(a, b, weight)
            case AssignTheme(concept=concept, theme_id=theme_id):
                self.assign_theme(concept, theme_id)
            case _:
                raise ProtocolError(f"unsupported message {message!r}")
        return self

    def _activate(self, name, kind, level, mode):
        if not 0.0 <= level <= MAX_ACTIVATION:
            raise ProtocolError(f"activation {level!r} outside [0, 100]")
        vid = self.resolve(name)
        if vid in self._g:
            existing = self._g.nodes[vid]["kind"]
            if existing is not kind:
                raise ProtocolError(f"{vid!r} is a {existing.value}, not a {kind.value}")
        else:
            self._add_vertex(vid, kind)
        data = self._g.nodes[vid]
        if ActivationMode(mode) is ActivationMode.ADD:
            data["activation"] = min(MAX_ACTIVATION, data["activation"] + level)
        else:
            data["activation"] = max(data["activation"], level)
        data["last_activated"] = self.clock_ms

    def _add_vertex(self, vid, kind):
        self._g.add_node(vid, kind=kind, activation=0.0, theme=None, last_activated=self.clock_ms)

    def _ensure_object(self, name):
        vid = self.resolve(name)
        if vid not in self._g:
            logger.debug("creating object vertex %r on first reference", vid)
            self._add_vertex(vid, VertexKind.OBJECT)
        return vid

    def _note_first_edge(self, vid):
        data = self._g.nodes[vid]
        if data["kind"] is VertexKind.OBJECT and data["theme"] is None and self._g.degree(vid) == 0:
            self._theme_requests.append(vid)

    def set_edge(self, a, b, weight, provenance=EdgeProvenance.EXPLICIT):
        if not 0.0 <= weight <= 1.0:
            raise ProtocolError(f"edge weight {weight!r} outside [0, 1]")
        u, v = self.resolve(a), self.resolve(b)
        if u == v:
            raise ProtocolError(f"self-loop on {u!r}")
        if Affect.parse(u) is not None and Affect.parse(v) is not None:
            raise ProtocolError("affect vertices cannot be linked to each other")
        u, v = self._ensure_object(u), self._ensure_object(v)
        if not self._g.has_edge(u, v):
            self._note_first_edge(u)
            self._note_first_edge(v)
        self._g.add_edge(u, v, weight=float(weight), provenance=EdgeProvenance(provenance))

    def assign_theme(self, concept, theme_id):
        if not 0 <= int(theme_id) <= MAX_THEME_ID:
            raise ProtocolError(f"theme id {theme_id!r} outside [0, {MAX_THEME_ID}]")
        vid = self.resolve(concept)
        if vid in self._g and self._g.nodes[vid]["kind"] is not VertexKind.OBJECT:
            raise ProtocolError(f"only objects carry themes, {vid!r} does not")
        vid = self._ensure_object(vid)
        self._g.nodes[vid]["theme"] = int(theme_id)

    def tick(self, dt_ms):
        """Advance by dt_ms: spread from the pre-tick snapshot, fade, infer edges."""
        if dt_ms <= 0:
            raise ValueError("dt_ms must be positive")
        s = self.settings
        nodes = self._g.nodes
        pre = {vid: data["activation"] for vid, data in nodes(data=True)}

        vertex_fade = s.vertex_fade_per_s * dt_ms / 1000.0
        new = {vid: max(0.0, level - vertex_fade) for vid, level in pre.items()}
        for u, v, weight in self._g.edges(data="weight"):
            if pre[u] > 0.0:
                new[v] = max(new[v], pre[u] * weight)
            if pre[v] > 0.0:
                new[u] = max(new[u], pre[v] * weight)
        for vid, level in new.items():
            nodes[vid]["activation"] = min(MAX_ACTIVATION, level)

        edge_fade = s.edge_fade_per_s * dt_ms / 1000.0
        expired = []
        for u, v, data in self._g.edges(data=True):
            if data["provenance"] is EdgeProvenance.INFERRED:
                data["weight"] = max(0.0, data["weight"] - edge_fade)
                if data["weight"] < s.edge_floor:
                    expired.append((u, v))
        if expired:
            logger.debug("dropping %d faded inferred edges", len(expired))
            self._g.remove_edges_from(expired)

        hot = sorted(
            vid
            for vid, level in pre.items()
            if level > s.coactivation_threshold and nodes[vid]["kind"] is not VertexKind.AFFECT
        )
        coactive = set()
        for i, u in enumerate(hot):
            for v in hot[i + 1:]:
                key = _pair(u, v)
                coactive.add(key)
                data = self._g.get_edge_data(u, v)
                # a missing edge is inferred on every tick; reinforcement only on a rising edge
                if data is None:
                    self._note_first_edge(u)
                    self._note_first_edge(v)
                    self._g.add_edge(
                        u, v, weight=s.inferred_weight, provenance=EdgeProvenance.INFERRED
                    )
                elif key not in self._coactive and data["provenance"] is EdgeProvenance.INFERRED:
                    data["weight"] = min(1.0, data["weight"] + s.reinforce_step)
        self._coactive = coactive

        self.clock_ms += dt_ms
        return self
