"""State-side model of a concurrent computation and its property checks.

A :class:`StateModel` is a poset of local states under existed-before plus a
chain partition: chain ``i`` lists the states of process ``i`` from the
initial state (index 0) up to the final state (index ``n_i``).

The checks implemented here decide which posets can model computations at
all:

* ``omega1``/``omega2``: all initial / all final states pairwise concurrent;
* ``omega3``: cross-chain transitivity through a predecessor state;
* ``psi``: no mutual crossing between two chains (the order never forces two
  processes to advance in lockstep);
* width-extensibility: every antichain extends to a maximum antichain;
* interleaving-consistency: every non-top maximum antichain has a successor
  maximum antichain differing in exactly one state.

All checks are pure functions over immutable models and safe to call from
multiple threads.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import (
    ModelError,
    NotTotallyOrdered,
    NotWidthAntichain,
    NotWidthExtensible,
    UnknownElement,
)
from .poset import (
    ChainPartition,
    Comparability,
    Interval,
    Poset,
    comparable,
    enumerate_antichains,
    incomparable_interval,
    is_antichain,
    minimum_chain_partition,
    width,
)


@dataclass(frozen=True)
class StateModel:
    """Validated state-based model; build via :func:`build_state_model`."""

    poset: Poset
    chains: tuple[tuple[str, ...], ...]
    attrs: Mapping[str, Mapping[str, object]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.chains)

    def chain_top_index(self, proc: int) -> int:
        """Final-state index ``n_i`` of process *proc* (1-based)."""
        return len(self.chains[proc - 1]) - 1

    def state_at(self, proc: int, idx: int) -> str:
        return self.chains[proc - 1][idx]

    def coords(self, state: str) -> tuple[int, int]:
        """``(process, index)`` of a state; process is 1-based."""
        return self._coords()[state]

    def _coords(self) -> dict[str, tuple[int, int]]:
        cache = getattr(self, "_coords_cache", None)
        if cache is None:
            cache = {
                s: (i + 1, k)
                for i, chain in enumerate(self.chains)
                for k, s in enumerate(chain)
            }
            object.__setattr__(self, "_coords_cache", cache)
        return cache

    def partition(self) -> ChainPartition:
        return ChainPartition(self.chains)


def build_state_model(
    poset: Poset,
    chains: Iterable[Iterable[str]],
    attrs: Mapping[str, Mapping[str, object]] | None = None,
) -> StateModel:
    """Validate and freeze a state model.

    Chains must be nonempty, disjoint, jointly cover the poset, and be listed
    in ascending existed-before order.
    """
    chs = tuple(tuple(c) for c in chains)
    seen: set[str] = set()
    for i, chain in enumerate(chs, start=1):
        if not chain:
            raise ModelError(f"chain {i} is empty; every process has an initial state")
        for s in chain:
            if s not in poset:
                raise UnknownElement(f"chain {i} names unknown state {s!r}")
            if s in seen:
                raise ModelError(f"state {s!r} appears on more than one chain")
            seen.add(s)
        for a, b in zip(chain, chain[1:]):
            if not poset.less(a, b):
                raise NotTotallyOrdered(
                    i, f"chain {i} is not ascending at {a!r} -> {b!r}"
                )
    if len(seen) != len(poset.elements):
        missing = sorted(set(poset.elements) - seen)
        raise ModelError(f"states {missing} are not assigned to any chain")
    bad_attrs = sorted(set(attrs or ()) - seen)
    if bad_attrs:
        raise UnknownElement(f"attrs reference unknown states {bad_attrs}")
    return StateModel(poset=poset, chains=chs, attrs=dict(attrs or {}))


@dataclass(frozen=True)
class Verdict:
    """Outcome of a property check; a false verdict carries a witness."""

    ok: bool
    witness: tuple | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def as_json(self) -> dict:
        out: dict = {"ok": self.ok}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.detail:
            out["detail"] = self.detail
        return out


def _jsonable(value):
    if isinstance(value, (frozenset, set)):
        return sorted(_jsonable(v) for v in value)
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


def check_omega1(sm: StateModel) -> Verdict:
    """All initial states pairwise concurrent."""
    initials = [chain[0] for chain in sm.chains]
    for a, b in itertools.combinations(initials, 2):
        if comparable(sm.poset, a, b) is not Comparability.CONCURRENT:
            return Verdict(False, (a, b), "initial states are ordered")
    return Verdict(True)


def check_omega2(sm: StateModel) -> Verdict:
    """All final states pairwise concurrent."""
    finals = [chain[-1] for chain in sm.chains]
    for a, b in itertools.combinations(finals, 2):
        if comparable(sm.poset, a, b) is not Comparability.CONCURRENT:
            return Verdict(False, (a, b), "final states are ordered")
    return Verdict(True)


def check_omega3(sm: StateModel) -> Verdict:
    """Cross-chain transitivity through the predecessor state.

    For all chains ``i != j`` and ``j != k`` (``i == k`` allowed):
    ``[i,s] < [j,t]`` and ``[j,t-1] < [k,u]`` imply ``[i,s] < [k,u]``.
    """
    p = sm.poset
    n = sm.n
    for j in range(1, n + 1):
        for t in range(1, sm.chain_top_index(j) + 1):
            jt = sm.state_at(j, t)
            jt_prev = sm.state_at(j, t - 1)
            below = [
                (i, s)
                for i in range(1, n + 1)
                if i != j
                for s in range(sm.chain_top_index(i) + 1)
                if p.less(sm.state_at(i, s), jt)
            ]
            above = [
                (k, u)
                for k in range(1, n + 1)
                if k != j
                for u in range(sm.chain_top_index(k) + 1)
                if p.less(jt_prev, sm.state_at(k, u))
            ]
            for (i, s), (k, u) in itertools.product(below, above):
                a, c = sm.state_at(i, s), sm.state_at(k, u)
                if not p.less(a, c):
                    return Verdict(
                        False,
                        (a, jt, c),
                        f"[{i},{s}] < [{j},{t}] and [{j},{t - 1}] < [{k},{u}] "
                        f"but not [{i},{s}] < [{k},{u}]",
                    )
    return Verdict(True)


def check_psi(sm: StateModel) -> Verdict:
    """No mutual crossing: ``[i,s-1] < [j,t]`` forbids ``[j,t-1] < [i,s]``."""
    p = sm.poset
    n = sm.n
    for i, j in itertools.permutations(range(1, n + 1), 2):
        for s in range(1, sm.chain_top_index(i) + 1):
            for t in range(1, sm.chain_top_index(j) + 1):
                if p.less(sm.state_at(i, s - 1), sm.state_at(j, t)) and p.less(
                    sm.state_at(j, t - 1), sm.state_at(i, s)
                ):
                    return Verdict(
                        False,
                        (
                            sm.state_at(i, s - 1),
                            sm.state_at(j, t),
                            sm.state_at(j, t - 1),
                            sm.state_at(i, s),
                        ),
                        f"chains {i} and {j} advance in lockstep at "
                        f"indices {s} and {t}",
                    )
    return Verdict(True)


def extend_to_width_antichain(
    p: Poset, members: Iterable[str]
) -> frozenset[str]:
    """Grow an antichain to a maximum antichain, one chain at a time.

    For each chain of a minimum chain partition not yet represented, the
    incomparable runs of the current members intersect (runs are intervals,
    so pairwise intersection gives a common element); any element of the
    intersection extends the antichain.  Raises :class:`NotWidthExtensible`
    with the stuck sub-antichain when no extension exists.
    """
    current = set(members)
    if not is_antichain(p, current):
        raise NotWidthAntichain(f"{sorted(current)} is not an antichain")
    cp = minimum_chain_partition(p)
    chain_of = {e: ci for ci, chain in enumerate(cp.chains) for e in chain}
    for ci, chain in enumerate(cp.chains):
        if any(chain_of[s] == ci for s in current):
            continue
        lo, hi = 0, len(chain) - 1
        for s in current:
            run = incomparable_interval(p, cp, s, ci)
            if not run:
                raise NotWidthExtensible(frozenset({s}))
            lo, hi = max(lo, run.lo), min(hi, run.hi)
        if lo > hi:
            raise NotWidthExtensible(frozenset(current))
        current.add(chain[lo])
    return frozenset(current)


def check_width_extensible(p: Poset, *, debug: bool = False) -> Verdict:
    """Decide whether every antichain extends to a maximum antichain.

    It suffices to check antichains of size at most two: singletons need a
    nonempty incomparable run on every other chain of a minimum chain
    partition, and incomparable pairs need those runs to intersect on every
    chain containing neither element (runs on a chain obey the Helly
    property, so pairwise intersection lifts to any antichain).  On failure
    the witness is the offending antichain; among several failures the
    lexicographically greatest is reported.  With ``debug=True`` a true
    verdict is re-verified by actually extending every singleton.
    """
    if not p.elements:
        return Verdict(True)
    cp = minimum_chain_partition(p)
    chain_of = {e: ci for ci, chain in enumerate(cp.chains) for e in chain}
    intervals: dict[tuple[str, int], Interval] = {}

    def interval(s: str, ci: int) -> Interval:
        key = (s, ci)
        if key not in intervals:
            intervals[key] = incomparable_interval(p, cp, s, ci)
        return intervals[key]

    failing_singleton: tuple[str, ...] | None = None
    for s in p.elements:
        for ci in range(cp.n):
            if ci == chain_of[s]:
                continue
            if not interval(s, ci):
                if failing_singleton is None or (s,) > failing_singleton:
                    failing_singleton = (s,)
                break
    if failing_singleton is not None:
        return Verdict(
            False, frozenset(failing_singleton), "no maximum antichain contains it"
        )

    failing_pair: tuple[str, str] | None = None
    for a, b in itertools.combinations(p.elements, 2):
        if comparable(p, a, b) is not Comparability.CONCURRENT:
            continue
        for ci in range(cp.n):
            if ci in (chain_of[a], chain_of[b]):
                continue
            ia, ib = interval(a, ci), interval(b, ci)
            lo = max(ia.lo, ib.lo)
            hi = min(ia.hi, ib.hi)
            if lo > hi:
                if failing_pair is None or (a, b) > failing_pair:
                    failing_pair = (a, b)
                break
    if failing_pair is not None:
        return Verdict(
            False, frozenset(failing_pair), "no maximum antichain contains both"
        )
    if debug:
        w, _ = width(p)
        for s in p.elements:
            grown = extend_to_width_antichain(p, {s})
            if len(grown) != w or not is_antichain(p, grown):
                raise AssertionError(f"debug extension of {s!r} failed")
    return Verdict(True)


def width_extensible_bruteforce(p: Poset, *, bound: int | None = None) -> bool:
    """Definition-level oracle: every antichain lies in some maximum one."""
    w, _ = width(p)
    width_antichains = [
        a for a in enumerate_antichains(p, size_filter=w, bound=bound)
    ]
    for a in enumerate_antichains(p, bound=bound):
        if not any(a <= wa for wa in width_antichains):
            return False
    return True


def _antichain_leq(p: Poset, a: frozenset[str], b: frozenset[str]) -> bool:
    return all(x in b or any(p.less(x, y) for y in b) for x in a)


def compare_width_antichains(
    p: Poset, a: Iterable[str], b: Iterable[str]
) -> Comparability:
    """Compare two maximum antichains under the for-all/exists order."""
    fa, fb = frozenset(a), frozenset(b)
    for s in (fa, fb):
        require_width_antichain(p, s)
    if fa == fb:
        return Comparability.EQUAL
    le = _antichain_leq(p, fa, fb)
    ge = _antichain_leq(p, fb, fa)
    if le and not ge:
        return Comparability.LESS
    if ge and not le:
        return Comparability.GREATER
    if le and ge:
        # Both directions only happen for equal maximum antichains.
        raise AssertionError("distinct maximum antichains mutually below")
    return Comparability.CONCURRENT


def require_width_antichain(p: Poset, members: Iterable[str]) -> frozenset[str]:
    ms = frozenset(members)
    w, _ = width(p)
    if len(ms) != w or not is_antichain(p, ms):
        raise NotWidthAntichain(
            f"{sorted(ms)} is not an antichain of maximum size {w}"
        )
    return ms


def interleaving_consistent_bruteforce(
    p: Poset, *, bound: int | None = None
) -> Verdict:
    """Definition-level check over the enumerated maximum antichains."""
    w, _ = width(p)
    if w == 0:
        return Verdict(True)
    family = list(enumerate_antichains(p, size_filter=w, bound=bound))
    maximal = [
        a
        for a in family
        if not any(b != a and _antichain_leq(p, a, b) for b in family)
    ]
    if len(maximal) != 1:
        raise AssertionError("maximum antichains must have a unique top")
    top = maximal[0]
    for a in family:
        if a == top:
            continue
        ok = any(
            b != a
            and len(a & b) == len(a) - 1
            and _antichain_leq(p, a, b)
            for b in family
        )
        if not ok:
            return Verdict(False, a, "no one-step successor maximum antichain")
    return Verdict(True)


def check_interleaving_consistent(
    p: Poset, *, bound: int | None = None
) -> Verdict:
    """Decide interleaving-consistency.

    Fast path: on a width-extensible poset (with a minimum chain partition)
    the property is equivalent to ``psi``, so the crossing scan decides it.
    Otherwise the definition is checked by enumerating maximum antichains,
    subject to the oracle bound.
    """
    if not p.elements:
        return Verdict(True)
    we = check_width_extensible(p)
    if we.ok:
        sm = StateModel(poset=p, chains=minimum_chain_partition(p).chains)
        psi = check_psi(sm)
        if psi.ok:
            return Verdict(True)
        return Verdict(False, psi.witness, psi.detail)
    return interleaving_consistent_bruteforce(p, bound=bound)


@dataclass(frozen=True)
class PropertyReport:
    """Bundle of verdicts for a state model, for CLI/JSON output."""

    omega1: Verdict | None = None
    omega2: Verdict | None = None
    omega3: Verdict | None = None
    psi: Verdict | None = None
    width_extensible: Verdict | None = None
    interleaving_consistent: Verdict | None = None

    def as_json(self) -> dict:
        names = {
            "omega1": self.omega1,
            "omega2": self.omega2,
            "omega3": self.omega3,
            "psi": self.psi,
            "we": self.width_extensible,
            "ic": self.interleaving_consistent,
        }
        return {k: v.as_json() for k, v in names.items() if v is not None}


def run_property_checks(
    sm: StateModel, properties: Iterable[str], *, bound: int | None = None
) -> PropertyReport:
    """Run the requested subset of {omega1,omega2,omega3,psi,we,ic}."""
    wanted = list(properties)
    unknown = sorted(set(wanted) - {"omega1", "omega2", "omega3", "psi", "we", "ic"})
    if unknown:
        raise ModelError(f"unknown properties {unknown}")
    kw: dict[str, Verdict] = {}
    if "omega1" in wanted:
        kw["omega1"] = check_omega1(sm)
    if "omega2" in wanted:
        kw["omega2"] = check_omega2(sm)
    if "omega3" in wanted:
        kw["omega3"] = check_omega3(sm)
    if "psi" in wanted:
        kw["psi"] = check_psi(sm)
    if "we" in wanted:
        kw["width_extensible"] = check_width_extensible(sm.poset)
    if "ic" in wanted:
        kw["interleaving_consistent"] = check_interleaving_consistent(
            sm.poset, bound=bound
        )
    return PropertyReport(**kw)
