"""Conversions between event-based and state-based models.

The forward transform turns an event model into the state model it induces:
each process contributes a chain of ``n_i + 1`` states named ``i.k``, and
``[i,r] < [j,s]`` across chains exactly when the event entering ``[i,r+1]``
happened before (or is, for a shared event) the event entering ``[j,s]``.

The reverse transform rebuilds an event model from a state model.  It lays
down one tentative event per non-initial state, adds a cross edge
``(i,r) -> (j,s)`` whenever ``[i,r-1] < [j,s]``, and then collapses each
strongly connected component of the tentative graph into a single shared
event.  A component with two nodes on the same chain cannot be collapsed;
such inputs do not model any computation and are reported rather than
converted.

Both transforms are pure; parallel invocation is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .eventmodel import EventModel, build_event_model
from .poset import build_poset
from .statemodel import StateModel, build_state_model

Node = tuple[int, int]


def es_transform(m: EventModel) -> StateModel:
    """Event model -> state model; states are named ``i.k``.

    Every valid event model converts; the result is a poset and passes the
    omega checks by construction.
    """
    names: dict[Node, str] = {}
    chains: list[list[str]] = []
    for i in range(1, m.n + 1):
        chain = []
        for k in range(m.chain_length(i) + 1):
            name = f"{i}.{k}"
            names[(i, k)] = name
            chain.append(name)
        chains.append(chain)

    pairs: list[tuple[str, str]] = []
    for i in range(1, m.n + 1):
        for r in range(m.chain_length(i)):
            pairs.append((names[(i, r)], names[(i, r + 1)]))
        for j in range(1, m.n + 1):
            if i == j:
                continue
            for r in range(m.chain_length(i)):
                for s in range(1, m.chain_length(j) + 1):
                    if m.state_less((i, r), (j, s)):
                        pairs.append((names[(i, r)], names[(j, s)]))
    poset = build_poset(names.values(), pairs)
    return build_state_model(poset, chains)


@dataclass(frozen=True)
class OffendingComponent:
    """A strongly connected component that blocks the reverse transform."""

    nodes: tuple[Node, ...]
    chain: int  # the chain contributing at least two nodes

    def as_json(self) -> dict:
        return {"nodes": [list(n) for n in self.nodes], "chain": self.chain}


@dataclass(frozen=True)
class InvalidityReport:
    """Why a state model cannot come from any event model."""

    components: tuple[OffendingComponent, ...]

    def as_json(self) -> dict:
        return {
            "error": "not-width-extensible",
            "components": [c.as_json() for c in self.components],
        }


@dataclass(frozen=True)
class SETransformOutcome:
    """Either the rebuilt event model or an invalidity report.

    ``temp_edges`` exposes the tentative pre-collapse graph (including any
    cycles) for diagnostics.
    """

    event_model: EventModel | None
    report: InvalidityReport | None
    temp_nodes: tuple[Node, ...] = field(default=(), repr=False)
    temp_edges: tuple[tuple[Node, Node], ...] = field(default=(), repr=False)

    @property
    def ok(self) -> bool:
        return self.event_model is not None


def transition_graph(sm: StateModel) -> tuple[list[Node], dict[Node, list[Node]]]:
    """Tentative event graph of a state model (may contain cycles).

    Nodes ``(i,k)`` stand for the transition into state ``[i,k]``; edges are
    the per-chain successions plus a cross edge ``(i,r) -> (j,s)`` whenever
    ``[i,r-1] < [j,s]``.
    """
    nodes: list[Node] = []
    succ: dict[Node, list[Node]] = {}
    for i in range(1, sm.n + 1):
        for k in range(1, sm.chain_top_index(i) + 1):
            node = (i, k)
            nodes.append(node)
            succ[node] = []
    for i in range(1, sm.n + 1):
        for k in range(1, sm.chain_top_index(i)):
            succ[(i, k)].append((i, k + 1))
        for j in range(1, sm.n + 1):
            if i == j:
                continue
            for r in range(1, sm.chain_top_index(i) + 1):
                src = sm.state_at(i, r - 1)
                for s in range(1, sm.chain_top_index(j) + 1):
                    if sm.poset.less(src, sm.state_at(j, s)):
                        succ[(i, r)].append((j, s))
    for node in nodes:
        succ[node].sort()
    return nodes, succ


def strongly_connected_components(
    nodes: Sequence[Node], succ: dict[Node, list[Node]]
) -> list[tuple[Node, ...]]:
    """Tarjan's algorithm, iterative; components in reverse topological order."""
    index: dict[Node, int] = {}
    lowlink: dict[Node, int] = {}
    on_stack: set[Node] = set()
    stack: list[Node] = []
    counter = 0
    result: list[tuple[Node, ...]] = []

    for root in nodes:
        if root in index:
            continue
        work: list[tuple[Node, int]] = [(root, 0)]
        while work:
            node, child_pos = work[-1]
            if child_pos == 0:
                index[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            children = succ[node]
            while child_pos < len(children):
                child = children[child_pos]
                child_pos += 1
                if child not in index:
                    work[-1] = (node, child_pos)
                    work.append((child, 0))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index[child])
            if advanced:
                continue
            work.pop()
            if lowlink[node] == index[node]:
                component = []
                while True:
                    top = stack.pop()
                    on_stack.discard(top)
                    component.append(top)
                    if top == node:
                        break
                result.append(tuple(sorted(component)))
            if work:
                parent, pos = work[-1]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
                work[-1] = (parent, pos)
    return result


def _shared_id(members: Sequence[Node]) -> str:
    return "shared(" + ",".join(f"{i}.{k}" for i, k in sorted(members)) + ")"


def se_transform(sm: StateModel) -> SETransformOutcome:
    """State model -> event model, or an invalidity report.

    Runs in time linear in the tentative graph.  Collapsed shared events get
    deterministic ids so that round-trips compare equal; plain events are
    named ``e<i>.<k>``.
    """
    nodes, succ = transition_graph(sm)
    temp_edges = tuple(
        (a, b) for a in nodes for b in succ[a]
    )
    components = strongly_connected_components(nodes, succ)

    offending: list[OffendingComponent] = []
    for comp in components:
        if len(comp) < 2:
            continue
        chains = [i for i, _ in comp]
        dupes = sorted({c for c in chains if chains.count(c) > 1})
        if dupes:
            offending.append(OffendingComponent(nodes=comp, chain=dupes[0]))
    if offending:
        return SETransformOutcome(
            event_model=None,
            report=InvalidityReport(tuple(sorted(offending))),
            temp_nodes=tuple(nodes),
            temp_edges=temp_edges,
        )

    comp_of: dict[Node, tuple[Node, ...]] = {}
    for comp in components:
        for node in comp:
            comp_of[node] = comp
    ids: dict[tuple[Node, ...], str] = {}
    labels: dict[str, frozenset[Node]] = {}
    for comp in components:
        (i, k) = comp[0]
        eid = f"e{i}.{k}" if len(comp) == 1 else _shared_id(comp)
        ids[comp] = eid
        labels[eid] = frozenset(comp)
    pairs = sorted(
        {
            (ids[comp_of[a]], ids[comp_of[b]])
            for a, b in temp_edges
            if comp_of[a] is not comp_of[b]
        }
    )
    poset = build_poset(labels.keys(), pairs)
    # The component screening makes this validation unreachable-by-failure.
    model = build_event_model(poset, sm.n, labels, allow_empty_process=True)
    return SETransformOutcome(
        event_model=model,
        report=None,
        temp_nodes=tuple(nodes),
        temp_edges=temp_edges,
    )


def event_signature(m: EventModel):
    """Canonical shape of an event model, invariant under event renaming.

    Each event is keyed by its sorted slot tuple (slots are unique across
    events), so two models compare equal iff they agree on slot sets and on
    the happened-before relation between them.
    """
    sig = {e: tuple(sorted(slots)) for e, slots in m.labels.items()}
    edges = frozenset(
        (sig[a], sig[b]) for a, b in m.poset.closure_pairs()
    )
    return m.n, frozenset(sig.values()), edges


def state_signature(sm: StateModel):
    """Canonical shape of a state model in chain coordinates."""
    lengths = tuple(len(c) for c in sm.chains)
    pairs = frozenset(
        (sm.coords(a), sm.coords(b)) for a, b in sm.poset.closure_pairs()
    )
    return lengths, pairs


def roundtrip_es_se(m: EventModel) -> bool:
    """True iff the reverse transform undoes the forward one on *m*."""
    outcome = se_transform(es_transform(m))
    if not outcome.ok:
        return False
    return event_signature(outcome.event_model) == event_signature(m)


def roundtrip_se_es(sm: StateModel) -> bool:
    """True iff the forward transform undoes the reverse one on *sm*."""
    outcome = se_transform(sm)
    if not outcome.ok:
        return False
    return state_signature(es_transform(outcome.event_model)) == state_signature(sm)
