"""Acceptance suite: one test per release criterion, one printed line each.

Each criterion asserts exact values (set equality, pinned witnesses) or a
zero-counterexample randomized sweep, plus its wall-clock budget.  Lines are
written straight to the terminal so the pass/fail summary is visible in
normal pytest runs.
"""

import random
import time

import pytest

from posetdual import (
    build_event_model,
    build_poset,
    build_state_model,
    check_omega1,
    check_omega2,
    check_omega3,
    check_psi,
    check_width_extensible,
    cut_to_antichain,
    enumerate_antichains,
    enumerate_event_cuts,
    enumerate_width_antichains,
    es_transform,
    find_useless_checkpoints,
    is_asc,
    roundtrip_es_se,
    roundtrip_se_es,
    se_transform,
    width,
)
from posetdual.lattice import antichain_to_cut
from posetdual.statemodel import (
    check_interleaving_consistent,
    interleaving_consistent_bruteforce,
    width_extensible_bruteforce,
)
from posetdual.transforms import event_signature, state_signature
from posetdual.analysis import detect_width_predicate

from builders import (
    MESSAGE_PAIR_ANTICHAINS,
    MESSAGE_PAIR_CUTS,
    barrier_event,
    barrier_predicate,
    barrier_state,
    forks_predicate,
    message_pair_event,
    message_pair_state,
    permits_predicate,
    pinch_poset,
    pinch_state,
    random_asc,
    random_chain_poset,
    random_event_model,
    random_marking,
    sessions_model,
    triple_pinch_poset,
    zigzag_marking,
    zigzag_state,
)


@pytest.fixture
def report(capfd):
    """Emit one pass/fail line per criterion straight to the terminal."""

    def emit(tag: str, started: float, budget: float, note: str = "") -> None:
        elapsed = time.monotonic() - started
        verdict = "PASS" if elapsed < budget else "FAIL"
        with capfd.disabled():
            print(f"[{verdict}] {tag}: {note} ({elapsed:.2f}s < {budget:.0f}s)", flush=True)
        assert elapsed < budget, f"{tag} exceeded its {budget}s budget ({elapsed:.2f}s)"

    return emit


def test_criterion_1_message_pair_reproduction(report):
    t0 = time.monotonic()
    m = message_pair_event()
    sm = message_pair_state()

    cuts = list(enumerate_event_cuts(m))
    assert set(cuts) == {frozenset(c) for c in MESSAGE_PAIR_CUTS}
    assert len(cuts) == 12

    assert state_signature(es_transform(m)) == state_signature(sm)

    antichains = list(enumerate_width_antichains(sm))
    assert set(antichains) == {frozenset(a) for a in MESSAGE_PAIR_ANTICHAINS}
    assert len(antichains) == 12

    for cut, antichain in zip(MESSAGE_PAIR_CUTS, MESSAGE_PAIR_ANTICHAINS):
        image = cut_to_antichain(m, cut)
        named = {sm.state_at(int(i), int(k)) for i, k in (s.split(".") for s in image)}
        assert named == antichain
        assert antichain_to_cut(m, image) == frozenset(cut)

    report(
        "criterion 1", t0, 1.0,
        "12 cuts, 12 maximum antichains, transform and bijection agree pairwise",
    )


def test_criterion_2_non_extensible_witnesses(report):
    t0 = time.monotonic()
    v = check_width_extensible(pinch_poset())
    assert not v.ok and v.witness == frozenset({"b"})

    p = triple_pinch_poset()
    v = check_width_extensible(p)
    assert not v.ok and v.witness == frozenset({"b", "i"})

    w, _ = width(p)
    widest = list(enumerate_antichains(p, size_filter=w))
    for s in p.elements:
        assert any(s in a for a in widest), f"singleton {s} should extend"

    report(
        "criterion 2", t0, 1.0,
        "witness {b} and {b,i}; every singleton of the triple pinch extends",
    )


def test_criterion_3_barrier_pipeline(report):
    t0 = time.monotonic()
    me = barrier_event()
    sm = barrier_state()
    assert not is_asc(me)
    assert state_signature(es_transform(me)) == state_signature(sm)

    out = se_transform(sm)
    assert out.ok
    edges = set(out.temp_edges)
    assert ((1, 2), (2, 2)) in edges and ((2, 2), (1, 2)) in edges
    shared = [s for s in out.event_model.labels.values() if len(s) > 1]
    assert shared == [frozenset({(1, 2), (2, 2)})]
    assert event_signature(out.event_model) == event_signature(me)

    assert not check_psi(sm).ok
    assert not check_interleaving_consistent(sm.poset).ok

    report(
        "criterion 3", t0, 1.0,
        "barrier round-trip with collapsed 2-cycle; psi and interleaving fail",
    )


def test_criterion_4_invalid_poset_detection(report):
    t0 = time.monotonic()
    out = se_transform(pinch_state())
    assert not out.ok
    assert len(out.report.components) == 1
    comp = out.report.components[0]
    assert set(comp.nodes) == {(1, 1), (1, 2), (2, 1)}
    assert comp.chain == 1
    report(
        "criterion 4", t0, 1.0,
        "reverse transform reports the same-chain cycle (1,1),(1,2),(2,1)",
    )


def test_criterion_5_theorem_property_suites(report):
    t0 = time.monotonic()
    rng = random.Random(0xC5)

    n_posets = 0
    n_width_sized = 0
    n_extensible = 0
    while n_posets < 500 or n_width_sized < 200 or n_extensible < 100:
        p, chains = random_chain_poset(rng, max_elems=12, max_chains=4)
        n_posets += 1
        w, _ = width(p)

        # (a) size-2 fast path == definition
        fast = check_width_extensible(p).ok
        assert fast == width_extensible_bruteforce(p), p.covers

        # (b) refined equivalence on every chain partition ...
        sm = build_state_model(p, chains)
        omega = check_omega1(sm).ok and check_omega2(sm).ok and check_omega3(sm).ok
        assert omega == (fast and w == sm.n), p.covers
        # ... and the plain equivalence whenever the partition is width-sized
        if w == sm.n:
            n_width_sized += 1
            assert omega == fast

            if fast:
                n_extensible += 1
                # (c) psi <=> interleaving-consistency on extensible posets
                assert check_psi(sm).ok == interleaving_consistent_bruteforce(p).ok
                # (d) reverse-then-forward identity on valid state models
                assert roundtrip_se_es(sm)

    n_models = 0
    while n_models < 500:
        m = random_event_model(rng, max_procs=4, max_events_per_proc=3)
        n_models += 1
        # (d) forward-then-reverse identity on valid event models
        assert roundtrip_es_se(m)
        # (e) cut and maximum-antichain families have equal size
        n_cuts = sum(1 for _ in enumerate_event_cuts(m))
        sm = es_transform(m)
        w, _ = width(sm.poset)
        oracle = sum(1 for _ in enumerate_antichains(sm.poset, size_filter=w))
        assert n_cuts == oracle
        assert n_cuts == sum(1 for _ in enumerate_width_antichains(sm))

    report(
        "criterion 5", t0, 60.0,
        f"{n_posets} posets + {n_models} models, zero counterexamples "
        f"({n_width_sized} width-sized, {n_extensible} extensible)",
    )


def _chains_only_model(n: int, per_proc: int):
    ids, rel, labels = [], [], {}
    for i in range(1, n + 1):
        prev = None
        for k in range(1, per_proc + 1):
            e = f"e{i}.{k:02}"
            ids.append(e)
            labels[e] = {(i, k)}
            if prev:
                rel.append((prev, e))
            prev = e
    return build_event_model(build_poset(ids, rel), n, labels)


def test_criterion_6_enumeration_scaling(report):
    t0 = time.monotonic()
    per_proc = 10

    def percut(n: int) -> float:
        m = _chains_only_model(n, per_proc)
        expected = (per_proc + 1) ** n
        reps = 5 if n <= 3 else 1
        best = float("inf")
        for _ in range(reps):
            start = time.monotonic()
            count = sum(1 for _ in enumerate_event_cuts(m))
            best = min(best, time.monotonic() - start)
            assert count == expected
        return best / expected

    counts4 = (per_proc + 1) ** 4
    assert 10**4 <= counts4 <= 10**5

    measured = {n: percut(n) for n in (2, 3, 4, 5, 6)}
    # reference fitted at the n=2 baseline; growth must stay within 4x of n^2
    c = measured[2] / 4
    for n, y in measured.items():
        assert y <= 4 * c * n * n, (
            f"per-cut work at n={n} is {y / (c * n * n):.2f}x the n^2 reference"
        )

    report(
        "criterion 6", t0, 120.0,
        "per-cut work across n=2..6 stays within 4x of the quadratic reference "
        + "(us/cut: " + ", ".join(f"n={n}:{y * 1e6:.1f}" for n, y in measured.items()) + ")",
    )


def test_criterion_7_checkpoint_engines(report):
    t0 = time.monotonic()
    rep = find_useless_checkpoints(zigzag_state(), zigzag_marking(), engine="both")
    assert rep.useless == {"1.1"}
    assert rep.engines_agree is True

    rng = random.Random(0xC7)
    agreements = 0
    for _ in range(200):
        sm = es_transform(random_asc(rng, max_procs=4, max_events_per_proc=6))
        marking = random_marking(rng, sm, max_marks=5)
        r = find_useless_checkpoints(sm, marking, engine="both")
        assert r.engine == "both" and r.engines_agree is True
        agreements += 1
    assert agreements == 200

    report(
        "criterion 7", t0, 60.0,
        "zig-zag marks exactly one useless checkpoint; engines agree on 200/200",
    )


def test_criterion_8_predicate_detection(report):
    t0 = time.monotonic()
    from posetdual.analysis import _evaluate

    sm = sessions_model()
    w, _ = width(sm.poset)
    preds = {
        "barrier-style": barrier_predicate(),
        "deadlock-style": forks_predicate(),
        "aggregate permits": permits_predicate(),
    }
    for name, pred in preds.items():
        got = set(detect_width_predicate(sm, pred))
        oracle = {
            a
            for a in enumerate_antichains(sm.poset, size_filter=w)
            if _evaluate(sm, pred, a, [])
        }
        assert got == oracle, name
        assert got, f"{name} should be satisfiable on the fixture"

    report(
        "criterion 8", t0, 10.0,
        "three fixture predicates return oracle-identical satisfying sets",
    )
