"""Greedy matching heuristics under pluggable nondeterminism.

Every run produces a ``RunTrace``: the full step-by-step record (selected
node, its degree at selection, partner, removed edges, step mode) needed to
replay the execution and drive the charging verifier.  ``worst_case_size``
exhausts all nondeterministic choice sequences of a heuristic and returns
the minimum matching size with a witness trace.

Canonical orders: candidate nodes ascending by id, candidate neighbors
ascending by id, candidate edges ascending as (u, v) pairs.  The first
policy always takes the first candidate, which makes runs reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .graphs import Edge, Graph, GraphFormatError, Matching, ResidualView, norm_edge

ALGORITHMS = ("mingreedy", "one_two_mingreedy", "karpsipser", "greedy", "mrg", "shuffle")

MODE_DEGREE = "degree_rule"
MODE_FREE = "free_edge"


class PolicyError(ValueError):
    """Raised when a policy cannot resolve a choice (bad script, bad input)."""


class SearchBudgetExceededError(RuntimeError):
    """Exhaustive search ran out of budget; carries the best bound found."""

    def __init__(self, bound: int | None, budget: int):
        super().__init__(f"search budget of {budget} states exceeded")
        self.bound = bound
        self.budget = budget


# ---------------------------------------------------------------------------
# Policies
# ---------------------------------------------------------------------------


class Chooser:
    """Per-run consumable view of a policy."""

    def choose(self, step: int, slot: str, candidates: Sequence):
        raise NotImplementedError

    def finish(self) -> None:
        """Called at run end; scripted choosers must be exactly exhausted."""


class Policy:
    def fresh(self) -> Chooser:
        raise NotImplementedError


class FirstPolicy(Policy):
    """Deterministic canonical policy: always the first candidate."""

    class _C(Chooser):
        def choose(self, step, slot, candidates):
            return candidates[0]

    def fresh(self) -> Chooser:
        return FirstPolicy._C()

    def __repr__(self) -> str:
        return "FirstPolicy()"


class RandomPolicy(Policy):
    """Seeded uniform choices via random.Random (Mersenne Twister), so a
    (graph, policy) pair replays bit-for-bit on any platform."""

    def __init__(self, seed: int):
        self.seed = seed

    class _C(Chooser):
        def __init__(self, seed: int):
            self.rng = random.Random(seed)

        def choose(self, step, slot, candidates):
            return candidates[self.rng.randrange(len(candidates))]

    def fresh(self) -> Chooser:
        return RandomPolicy._C(self.seed)

    def __repr__(self) -> str:
        return f"RandomPolicy({self.seed})"


class ScriptedPolicy(Policy):
    """Replays explicit choices as (step, index-into-candidates) pairs.

    Pairs are consumed in order and must be exactly exhausted when the run
    terminates.  Plain integers are accepted and match any step.
    """

    def __init__(self, choices: Sequence[int | tuple[int, int]]):
        self.choices = tuple(choices)

    class _C(Chooser):
        def __init__(self, choices):
            self.choices = choices
            self.pos = 0

        def choose(self, step, slot, candidates):
            if self.pos >= len(self.choices):
                raise PolicyError(f"script exhausted at step {step} ({slot})")
            entry = self.choices[self.pos]
            self.pos += 1
            if isinstance(entry, tuple):
                want_step, idx = entry
                if want_step != step:
                    raise PolicyError(f"script entry for step {want_step} used at step {step}")
            else:
                idx = entry
            if not 0 <= idx < len(candidates):
                raise PolicyError(
                    f"script index {idx} out of range for {len(candidates)} candidates "
                    f"at step {step} ({slot})"
                )
            return candidates[idx]

        def finish(self):
            if self.pos != len(self.choices):
                raise PolicyError(f"{len(self.choices) - self.pos} script entries left unconsumed")

    def fresh(self) -> Chooser:
        return ScriptedPolicy._C(self.choices)

    def __repr__(self) -> str:
        return f"ScriptedPolicy({list(self.choices)!r})"


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    """One picked edge: who was selected, at what degree, and what died."""

    index: int
    selected: int
    sel_degree: int
    partner: int
    removed: tuple[Edge, ...]
    mode: str

    @property
    def edge(self) -> Edge:
        return norm_edge(self.selected, self.partner)


@dataclass(frozen=True)
class RunTrace:
    graph: Graph
    steps: tuple[TraceStep, ...]
    result: Matching

    def verify_replay(self) -> None:
        """Re-run the steps on a fresh view; every removed list must match."""
        view = ResidualView(self.graph)
        for st in self.steps:
            if not view.alive_edge(st.selected, st.partner):
                raise ValueError(f"step {st.index}: picked edge not alive")
            if view.degree_of(st.selected) != st.sel_degree:
                raise ValueError(f"step {st.index}: recorded selection degree is stale")
            removed = view.remove_pair(st.selected, st.partner)
            if tuple(removed) != st.removed:
                raise ValueError(f"step {st.index}: removed-edge list mismatch")
        if view.has_alive():
            raise ValueError("alive edges remain after the last step")
        if self.result.pairs != frozenset(st.edge for st in self.steps):
            raise ValueError("result does not equal the set of picked edges")


def save_trace(trace: RunTrace) -> str:
    lines = []
    for st in trace.steps:
        lines.append(f"s {st.index} {st.selected} {st.sel_degree} {st.partner} {st.mode}")
        lines.extend(f"r {a} {b}" for a, b in st.removed)
    return "\n".join(lines) + "\n"


def load_trace(text: str, g: Graph) -> RunTrace:
    """Parse and replay-check a trace file against its graph."""
    steps: list[TraceStep] = []
    cur: list | None = None
    removed: list[Edge] = []

    def flush():
        if cur is not None:
            steps.append(TraceStep(cur[0], cur[1], cur[2], cur[3], tuple(removed), cur[4]))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if len(parts) != 6:
                raise GraphFormatError(f"line {lineno}: step line must be 's <i> <u> <d> <v> <mode>'")
            flush()
            try:
                cur = [int(parts[1]), int(parts[2]), int(parts[3]), int(parts[4]), parts[5]]
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-integer step field") from None
            if parts[5] not in (MODE_DEGREE, MODE_FREE):
                raise GraphFormatError(f"line {lineno}: unknown mode '{parts[5]}'")
            removed = []
        elif parts[0] == "r":
            if cur is None:
                raise GraphFormatError(f"line {lineno}: removed edge before any step")
            if len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: removed line must be 'r <a> <b>'")
            try:
                removed.append(norm_edge(int(parts[1]), int(parts[2])))
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-integer node id") from None
        else:
            raise GraphFormatError(f"line {lineno}: unknown record '{parts[0]}'")
    flush()
    trace = RunTrace(g, tuple(steps), Matching.from_pairs(st.edge for st in steps))
    try:
        trace.verify_replay()
    except ValueError as exc:
        raise GraphFormatError(f"trace does not replay: {exc}") from None
    return trace


# ---------------------------------------------------------------------------
# Heuristic runners
# ---------------------------------------------------------------------------


def _freemode_orientation(view: ResidualView, u: int, v: int) -> tuple[int, int]:
    # Record the endpoint of smaller current degree as the selected node
    # (ties by id); the charging analysis cases on the selected degree.
    if (view.degree_of(u), u) <= (view.degree_of(v), v):
        return u, v
    return v, u


def _drive(g: Graph, policy: Policy, pick: Callable) -> RunTrace:
    view = ResidualView(g)
    chooser = policy.fresh()
    steps: list[TraceStep] = []
    idx = 0
    while view.has_alive():
        idx += 1
        u, v, mode = pick(view, chooser, idx)
        du = view.degree_of(u)
        removed = view.remove_pair(u, v)
        steps.append(TraceStep(idx, u, du, v, tuple(removed), mode))
    chooser.finish()
    return RunTrace(g, tuple(steps), Matching.from_pairs(st.edge for st in steps))


def _pick_mingreedy(view: ResidualView, chooser: Chooser, idx: int):
    u = chooser.choose(idx, "node", view.min_degree_nodes())
    v = chooser.choose(idx, "neighbor", view.alive_neighbors(u))
    return u, v, MODE_DEGREE


def run_min_greedy(g: Graph, policy: Policy) -> RunTrace:
    """Repeatedly select a node of minimum nonzero degree, then a neighbor;
    pick that edge and delete both endpoints."""
    return _drive(g, policy, _pick_mingreedy)


def run_one_two_min_greedy(g: Graph, policy: Policy) -> RunTrace:
    """Like min-greedy, but while every degree is at least 3 any alive edge
    may be picked (a free step, recorded as such)."""

    def pick(view, chooser, idx):
        if view.min_degree() >= 3:
            u, v = chooser.choose(idx, "edge", view.alive_edges())
            u, v = _freemode_orientation(view, u, v)
            return u, v, MODE_FREE
        return _pick_mingreedy(view, chooser, idx)

    return _drive(g, policy, pick)


def run_karp_sipser(g: Graph, policy: Policy) -> RunTrace:
    """Edge-greedy that prefers edges incident to a degree-1 node."""

    def pick(view, chooser, idx):
        if view.min_degree() == 1:
            u = chooser.choose(idx, "node", view.min_degree_nodes())
            (v,) = view.alive_neighbors(u)
            return u, v, MODE_DEGREE
        u, v = chooser.choose(idx, "edge", view.alive_edges())
        u, v = _freemode_orientation(view, u, v)
        return u, v, MODE_FREE

    return _drive(g, policy, pick)


def run_greedy(g: Graph, policy: Policy) -> RunTrace:
    """Plain edge-greedy: pick any alive edge."""

    def pick(view, chooser, idx):
        u, v = chooser.choose(idx, "edge", view.alive_edges())
        u, v = _freemode_orientation(view, u, v)
        return u, v, MODE_FREE

    return _drive(g, policy, pick)


def run_mrg(g: Graph, policy: Policy) -> RunTrace:
    """Node-then-edge greedy: select a non-isolated node, then a neighbor.

    Selection is over non-isolated nodes (nodes with an alive edge); see the
    module notes on this reading of the node-selection rule.
    """

    def pick(view, chooser, idx):
        nonisolated = sorted(v for v in range(g.n) if view.degree_of(v) > 0)
        u = chooser.choose(idx, "node", nonisolated)
        v = chooser.choose(idx, "neighbor", view.alive_neighbors(u))
        return u, v, MODE_DEGREE

    return _drive(g, policy, pick)


def run_shuffle(g: Graph, permutation: Sequence[int]) -> RunTrace:
    """Match the permutation-first non-isolated node to its permutation-first
    unmatched neighbor, repeatedly."""
    perm = list(permutation)
    if sorted(perm) != list(range(g.n)):
        raise PolicyError("permutation must be a permutation of 0..n-1")
    rank = {v: i for i, v in enumerate(perm)}

    def pick(view, chooser, idx):
        u = min((v for v in range(g.n) if view.degree_of(v) > 0), key=rank.__getitem__)
        v = min(view.alive_neighbors(u), key=rank.__getitem__)
        return u, v, MODE_DEGREE

    return _drive(g, FirstPolicy(), pick)


_RUNNERS = {
    "mingreedy": run_min_greedy,
    "one_two_mingreedy": run_one_two_min_greedy,
    "karpsipser": run_karp_sipser,
    "greedy": run_greedy,
    "mrg": run_mrg,
}


def run_algorithm(algo: str, g: Graph, policy: Policy) -> RunTrace:
    if algo not in _RUNNERS:
        raise PolicyError(f"unknown or unsupported algorithm '{algo}'")
    return _RUNNERS[algo](g, policy)


# ---------------------------------------------------------------------------
# Choice enumeration and scripted replays
# ---------------------------------------------------------------------------


def _choice_slots(view: ResidualView, algo: str) -> list[tuple[str, list]]:
    """The ordered choice slots a policy fills at the current step."""
    if algo == "mingreedy":
        return [("node", view.min_degree_nodes()), ("neighbor", None)]
    if algo == "one_two_mingreedy":
        if view.min_degree() >= 3:
            return [("edge", view.alive_edges())]
        return [("node", view.min_degree_nodes()), ("neighbor", None)]
    if algo == "karpsipser":
        if view.min_degree() == 1:
            return [("node", view.min_degree_nodes())]
        return [("edge", view.alive_edges())]
    if algo == "greedy":
        return [("edge", view.alive_edges())]
    if algo == "mrg":
        g = view.graph
        return [("node", sorted(v for v in range(g.n) if view.degree_of(v) > 0)),
                ("neighbor", None)]
    raise PolicyError(f"choice enumeration unsupported for '{algo}'")


def iter_all_pick_sequences(g: Graph, algo: str, limit: int | None = None) -> Iterator[list[Edge]]:
    """Yield the picked-edge sequence of every complete choice path.

    Exhaustive over the heuristic's nondeterminism; intended for small
    graphs in tests.  Stops with an error if limit leaves are exceeded.
    """
    view = ResidualView(g)
    count = 0

    def rec(prefix: list[Edge]) -> Iterator[list[Edge]]:
        nonlocal count
        if not view.has_alive():
            count += 1
            if limit is not None and count > limit:
                raise SearchBudgetExceededError(None, limit)
            yield list(prefix)
            return
        slots = _choice_slots(view, algo)
        if slots[0][0] == "edge":
            moves = [(u, v) for u, v in slots[0][1]]
        elif len(slots) == 1:
            moves = [(u, view.alive_neighbors(u)[0]) for u in slots[0][1]]
        else:
            moves = [(u, v) for u in slots[0][1] for v in view.alive_neighbors(u)]
        for u, v in moves:
            removed = view.remove_pair(u, v)
            prefix.append(norm_edge(u, v))
            yield from rec(prefix)
            prefix.pop()
            view.restore_edges(removed)

    yield from rec([])


def script_from_picks(g: Graph, picks: Sequence[tuple[int, int]], algo: str) -> ScriptedPolicy:
    """Turn an explicit pick sequence into a scripted policy for algo.

    Raises PolicyError if some pick is not reachable by the heuristic at its
    step, e.g. when checking that a min-greedy run is a valid free-variant run.
    """
    view = ResidualView(g)
    choices: list[tuple[int, int]] = []
    for step, (a, b) in enumerate(picks, start=1):
        slots = _choice_slots(view, algo)
        if slots[0][0] == "edge":
            edge = norm_edge(a, b)
            cands = slots[0][1]
            if edge not in cands:
                raise PolicyError(f"step {step}: edge {edge} not pickable")
            choices.append((step, cands.index(edge)))
        else:
            cands = slots[0][1]
            u, v = (a, b) if a in cands else (b, a)
            if u not in cands:
                raise PolicyError(f"step {step}: neither endpoint of {(a, b)} selectable")
            choices.append((step, cands.index(u)))
            if len(slots) == 2:
                nbrs = view.alive_neighbors(u)
                if v not in nbrs:
                    raise PolicyError(f"step {step}: {v} not an alive neighbor of {u}")
                choices.append((step, nbrs.index(v)))
        view.remove_pair(a, b)
    if view.has_alive():
        raise PolicyError("pick sequence ends before all edges are removed")
    return ScriptedPolicy(choices)


def trace_from_picks(g: Graph, picks: Sequence[tuple[int, int]], algo: str) -> RunTrace:
    """Replay an explicit pick sequence as a run of algo."""
    return run_algorithm(algo, g, script_from_picks(g, picks, algo))


# ---------------------------------------------------------------------------
# Exhaustive worst-case search
# ---------------------------------------------------------------------------


def worst_case_size(
    g: Graph,
    algo: str,
    budget: int = 2_000_000,
) -> tuple[int, RunTrace]:
    """Minimum matching size over ALL nondeterministic choice sequences.

    Memoized DFS over residual states keyed by the alive-edge bitmask, which
    deduplicates permuted choice orders reaching the same residual graph.
    Returns the exact minimum and one witness trace achieving it.
    """
    if algo not in ("mingreedy", "one_two_mingreedy", "karpsipser", "greedy", "mrg"):
        raise PolicyError(f"worst-case search unsupported for '{algo}'")
    m = g.m
    if m == 0:
        return 0, RunTrace(g, (), Matching.from_pairs(()))
    edges = list(g.edges)
    inc = [0] * g.n
    for i, (u, v) in enumerate(edges):
        inc[u] |= 1 << i
        inc[v] |= 1 << i
    nodes = range(g.n)
    full = (1 << m) - 1
    memo: dict[int, int] = {}
    choice: dict[int, tuple[int, int]] = {}
    spent = 0

    def moves_of(state: int) -> list[tuple[int, int]]:
        degs = [(state & inc[v]).bit_count() for v in nodes]
        alive = [edges[i] for i in _bits(state)]
        if algo in ("greedy",):
            return alive
        mind = min(d for d in degs if d > 0)
        if algo == "mrg":
            # Any non-isolated node with any neighbor: the reachable
            # transitions are exactly the alive edges.
            return alive
        if algo == "karpsipser":
            if mind == 1:
                out = []
                for u in nodes:
                    if degs[u] == 1:
                        i = (state & inc[u]).bit_length() - 1
                        a, b = edges[i]
                        out.append((u, b if a == u else a))
                return out
            return alive
        if algo == "one_two_mingreedy" and mind >= 3:
            return alive
        # minimum-degree rule
        out = []
        for u in nodes:
            if degs[u] == mind:
                for i in _bits(state & inc[u]):
                    a, b = edges[i]
                    out.append((u, b if a == u else a))
        return out

    def rec(state: int) -> int:
        nonlocal spent
        if state == 0:
            return 0
        cached = memo.get(state)
        if cached is not None:
            return cached
        spent += 1
        if spent > budget:
            raise SearchBudgetExceededError(None, budget)
        best = None
        best_move = None
        seen_next: set[int] = set()
        for u, v in moves_of(state):
            nxt = state & ~(inc[u] | inc[v])
            if nxt in seen_next:
                continue
            seen_next.add(nxt)
            val = 1 + rec(nxt)
            if best is None or val < best:
                best = val
                best_move = (u, v)
        memo[state] = best
        choice[state] = best_move
        return best

    try:
        size = rec(full)
    except SearchBudgetExceededError as exc:
        done = [1 + memo[full & ~(inc[u] | inc[v])]
                for u, v in moves_of(full)
                if (full & ~(inc[u] | inc[v])) in memo]
        raise SearchBudgetExceededError(min(done) if done else None, budget) from None

    picks = []
    state = full
    while state:
        u, v = choice[state]
        picks.append((u, v))
        state &= ~(inc[u] | inc[v])
    return size, trace_from_picks(g, picks, algo)


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low
