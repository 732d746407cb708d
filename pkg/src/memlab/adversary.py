"""Adaptive adversary for pairwise-equality play over a bipartite consistency graph.

The graph starts complete between positions 1..n and n+1..2n.  Every query is
answered "No" unless the queried edge is forced, i.e. isolated; a "No" on a
present edge deletes it, after which every surviving edge that lies in no
perfect matching vanishes.  The filter follows the classic matching
characterization: fix one perfect matching, orient matched and unmatched
edges oppositely, and keep exactly the non-matching edges whose endpoints
share a strongly connected component.

The audit utilities check the counting identities this discipline guarantees:
deletions + vanishings == n(n-1) on a finished run, and the fixed-point-free
pairing of non-matching edges in which at least one member of every pair was
deleted rather than vanished, giving deletions >= n(n-1)/2.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .game_core import Deck, MatchTriple, Transcript
from .strategies import GameHost, SpaceBudget


class InvariantViolation(RuntimeError):
    """The consistency graph lost its perfect matching (unreachable in legal play)."""


class StrategyRejected(RuntimeError):
    """A strategy declared a pair the adversary had not been forced to confirm."""

    def __init__(self, pair: tuple[int, int], counterexample: Deck):
        super().__init__(f"declared unforced pair {pair}")
        self.pair = pair
        self.counterexample = counterexample


def edge_key(n: int, i: int, j: int) -> tuple[int, int] | None:
    """Canonical (left, right) key for a cross pair, or None for a same-side pair."""
    if i > j:
        i, j = j, i
    if i <= n < j:
        return (i, j)
    return None


@dataclass(frozen=True)
class AnswerEvents:
    """Mutations caused by one query: at most one deletion plus its vanish set."""

    deleted: tuple[int, int] | None = None
    vanished: tuple[tuple[int, int], ...] = ()


_NO_EVENTS = AnswerEvents()


class KnowledgeGraph:
    """Bipartite consistency graph between positions 1..n and n+1..2n.

    While driven through kg_answer, every present edge lies in some perfect
    matching, the edge set only shrinks, `mate` holds a maintained perfect
    matching, and `comp` caches the filter's component ids so a deletion of a
    non-matching edge only rescans its own component.
    """

    __slots__ = ("n", "adj", "mate", "status", "comp", "_comp_next", "closure_hook")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        self.n = n
        self.adj: list[set[int]] = [set() for _ in range(2 * n + 1)]
        self.mate: list[int] = [0] * (2 * n + 1)
        self.status: dict[tuple[int, int], str] = {}
        self.comp: list[int] | None = None
        self._comp_next = 1
        self.closure_hook = None

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def present(self, l: int, r: int) -> bool:
        return r in self.adj[l]

    def isolated(self, l: int, r: int) -> bool:
        return r in self.adj[l] and len(self.adj[l]) == 1 and len(self.adj[r]) == 1

    def edge_count(self) -> int:
        return sum(len(self.adj[l]) for l in range(1, self.n + 1))

    def edges(self) -> set[tuple[int, int]]:
        return {(l, r) for l in range(1, self.n + 1) for r in self.adj[l]}

    def copy(self) -> "KnowledgeGraph":
        g = KnowledgeGraph(self.n)
        g.adj = [set(s) for s in self.adj]
        g.mate = list(self.mate)
        g.status = dict(self.status)
        g.comp = None if self.comp is None else list(self.comp)
        g._comp_next = self._comp_next
        return g


def kg_init(n: int) -> KnowledgeGraph:
    """Complete bipartite consistency graph with its diagonal matching."""
    g = KnowledgeGraph(n)
    for l in range(1, n + 1):
        g.adj[l] = set(range(n + 1, 2 * n + 1))
        g.mate[l] = n + l
        g.mate[n + l] = l
    for r in range(n + 1, 2 * n + 1):
        g.adj[r] = set(range(1, n + 1))
    _run_filter(g, range(1, 2 * n + 1))
    return g


def kg_from_edges(n: int, edges) -> KnowledgeGraph:
    """Graph over a given cross edge set; must admit a perfect matching."""
    g = KnowledgeGraph(n)
    for i, j in edges:
        key = edge_key(n, i, j)
        if key is None or not (1 <= i <= 2 * n and 1 <= j <= 2 * n):
            raise ValueError(f"not a cross edge: {(i, j)}")
        l, r = key
        g.adj[l].add(r)
        g.adj[r].add(l)
    g.mate = hopcroft_karp(n, g.adj)
    if any(g.mate[l] == 0 for l in range(1, n + 1)):
        raise InvariantViolation("edge set admits no perfect matching")
    return g


def kg_is_done(g: KnowledgeGraph) -> bool:
    """True iff the graph is a perfect matching (every vertex has degree 1)."""
    return all(len(g.adj[v]) == 1 for v in range(1, 2 * g.n + 1))


def kg_answer(g: KnowledgeGraph, i: int, j: int) -> tuple[bool, AnswerEvents]:
    """Answer "is x_i = x_j?", mutating the graph on a deletion.

    Yes exactly when {i,j} is a present isolated edge.  A present non-isolated
    edge is deleted and the vanish closure runs; same-side or already-removed
    pairs answer No without mutation.
    """
    if i == j:
        raise ValueError(f"queried a position against itself: {i}")
    if not (1 <= i <= 2 * g.n and 1 <= j <= 2 * g.n):
        raise ValueError(f"positions out of range: {(i, j)}")
    key = edge_key(g.n, i, j)
    if key is None:
        return False, _NO_EVENTS
    l, r = key
    if r not in g.adj[l]:
        return False, _NO_EVENTS
    if len(g.adj[l]) == 1 and len(g.adj[r]) == 1:
        return True, _NO_EVENTS

    g.adj[l].discard(r)
    g.adj[r].discard(l)
    g.status[(l, r)] = "deleted"
    if g.mate[l] == r:
        g.mate[l] = 0
        g.mate[r] = 0
        if not _augment(g, l):
            raise InvariantViolation(f"deleting {(l, r)} destroyed the last perfect matching")
        vanished = _run_filter(g, range(1, 2 * g.n + 1))
    elif g.comp is not None and g.comp[l] != 0 and g.comp[l] == g.comp[r]:
        cid = g.comp[l]
        verts = [v for v in range(1, 2 * g.n + 1) if g.comp[v] == cid]
        vanished = _run_filter(g, verts)
    else:
        vanished = _run_filter(g, range(1, 2 * g.n + 1))
    if g.closure_hook is not None:
        g.closure_hook(g, vanished)
    return False, AnswerEvents((l, r), tuple(vanished))


def vanish_closure(g: KnowledgeGraph) -> list[tuple[int, int]]:
    """Remove exactly the present edges lying in no perfect matching.

    Afterwards every present edge lies in some perfect matching, so a second
    call removes nothing.  Raises InvariantViolation when no perfect matching
    exists at all.
    """
    for l in range(1, g.n + 1):
        if g.mate[l] == 0 and not _augment(g, l):
            raise InvariantViolation("graph admits no perfect matching")
    vanished = _run_filter(g, range(1, 2 * g.n + 1))
    if g.closure_hook is not None:
        g.closure_hook(g, vanished)
    return vanished


def realize_input(g: KnowledgeGraph, R: int,
                  assigned: dict[tuple[int, int], int] | None = None) -> Deck:
    """A valid deck consistent with a finished graph: one value per matched pair.

    `assigned` pins values already granted to declared pairs; the rest get the
    smallest unused values.
    """
    if not kg_is_done(g):
        raise ValueError("graph is not a perfect matching yet")
    if R < g.n:
        raise ValueError(f"need R >= n, got R={R} < n={g.n}")
    matching = [(l, next(iter(g.adj[l]))) for l in range(1, g.n + 1)]
    return deck_from_matching(g.n, R, matching, assigned or {})


def deck_from_matching(n: int, R: int, matching, assigned: dict[tuple[int, int], int]) -> Deck:
    """Deck realizing a perfect matching, honoring pre-assigned pair values."""
    deck = [0] * (2 * n)
    used = set(assigned.values())
    fresh = (v for v in range(1, R + 1) if v not in used)
    for l, r in sorted(matching):
        v = assigned.get((l, r))
        if v is None:
            v = next(fresh)
        deck[l - 1] = v
        deck[r - 1] = v
    return tuple(deck)


# ---------------------------------------------------------------------------
# Matching + filter internals

def hopcroft_karp(n: int, adj: list[set[int]]) -> list[int]:
    """Maximum matching on the position graph; returns the mate array (0 = free)."""
    INF = float("inf")
    mate = [0] * (2 * n + 1)
    dist = [0.0] * (n + 1)

    def bfs() -> bool:
        q = deque()
        for l in range(1, n + 1):
            if mate[l] == 0:
                dist[l] = 0
                q.append(l)
            else:
                dist[l] = INF
        found = False
        while q:
            l = q.popleft()
            for r in adj[l]:
                m = mate[r]
                if m == 0:
                    found = True
                elif dist[m] == INF:
                    dist[m] = dist[l] + 1
                    q.append(m)
        return found

    def dfs(l: int) -> bool:
        for r in adj[l]:
            m = mate[r]
            if m == 0 or (dist[m] == dist[l] + 1 and dfs(m)):
                mate[l] = r
                mate[r] = l
                return True
        dist[l] = INF
        return False

    while bfs():
        for l in range(1, n + 1):
            if mate[l] == 0:
                dfs(l)
    return mate


def _augment(g: KnowledgeGraph, root: int) -> bool:
    """Single augmenting-path search restoring the matching after a deletion."""
    seen: set[int] = set()

    def dfs(l: int) -> bool:
        for r in g.adj[l]:
            if r in seen:
                continue
            seen.add(r)
            if g.mate[r] == 0 or dfs(g.mate[r]):
                g.mate[l] = r
                g.mate[r] = l
                return True
        return False

    return dfs(root)


def _run_filter(g: KnowledgeGraph, verts) -> list[tuple[int, int]]:
    """Useful-edge filter over `verts`: SCC the matched/unmatched orientation,
    drop non-matching edges whose endpoints land in different components.

    Degree-1 vertices carry only their matched edge, so they are skipped; the
    component ids of rescanned vertices are refreshed in g.comp.
    """
    comp = _scc_ids(g, [v for v in verts if len(g.adj[v]) >= 2])
    vanished: list[tuple[int, int]] = []
    for l in verts:
        if l > g.n:
            continue
        ml = g.mate[l]
        for r in g.adj[l]:
            if r != ml and comp.get(l) != comp.get(r):
                vanished.append((l, r))
    for l, r in vanished:
        g.adj[l].discard(r)
        g.adj[r].discard(l)
        g.status[(l, r)] = "vanished"
    if g.comp is None:
        g.comp = [0] * (2 * g.n + 1)
    base = g._comp_next
    top = 0
    for v, c in comp.items():
        g.comp[v] = base + c
        if c > top:
            top = c
    g._comp_next = base + top + 1
    vanished.sort()
    return vanished


def _scc_ids(g: KnowledgeGraph, verts: list[int]) -> dict[int, int]:
    """Tarjan over the induced orientation: unmatched left->right, matched right->left."""
    n = g.n
    adj = g.adj
    mate = g.mate
    member = set(verts)

    def succs(v: int):
        if v <= n:
            m = mate[v]
            return [r for r in adj[v] if r != m and r in member]
        m = mate[v]
        return [m] if m and m in member else []

    index: dict[int, int] = {}
    low: dict[int, int] = {}
    comp: dict[int, int] = {}
    onstack: set[int] = set()
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in verts:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack.add(root)
        work: list[tuple[int, object]] = [(root, iter(succs(root)))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack.add(w)
                    work.append((w, iter(succs(w))))
                    advanced = True
                    break
                if w in onstack and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                ncomp += 1
                while True:
                    w = stack.pop()
                    onstack.discard(w)
                    comp[w] = ncomp
                    if w == v:
                        break
    return comp


# ---------------------------------------------------------------------------
# Brute-force oracles (small n)

def perfect_matchings(g: KnowledgeGraph) -> list[frozenset[tuple[int, int]]]:
    """All perfect matchings by backtracking; test oracle for small n."""
    out: list[frozenset[tuple[int, int]]] = []
    used: set[int] = set()
    pick: list[tuple[int, int]] = []

    def rec(l: int) -> None:
        if l > g.n:
            out.append(frozenset(pick))
            return
        for r in sorted(g.adj[l]):
            if r not in used:
                used.add(r)
                pick.append((l, r))
                rec(l + 1)
                pick.pop()
                used.discard(r)

    rec(1)
    return out


def useful_edges_brute(g: KnowledgeGraph) -> set[tuple[int, int]]:
    """Edges lying in at least one perfect matching, by exhaustive enumeration."""
    out: set[tuple[int, int]] = set()
    for m in perfect_matchings(g):
        out |= m
    return out


# ---------------------------------------------------------------------------
# Adversarial game loop

@dataclass(frozen=True)
class QueryRecord:
    i: int
    j: int
    answer: bool
    deleted: tuple[int, int] | None
    vanished: tuple[tuple[int, int], ...]


class AdversaryLog:
    """Per-query audit trail: answers, the single deletion a "No" on a present
    edge causes, and the vanish set of the closure that follows."""

    def __init__(self, n: int, status: dict[tuple[int, int], str], keep_records: bool = True):
        self.n = n
        self.status = status
        self.records: list[QueryRecord] = []
        self.queries = 0
        self.deletions = 0
        self.vanishings = 0
        self._keep = keep_records

    def note(self, i: int, j: int, answer: bool, events: AnswerEvents) -> None:
        self.queries += 1
        if events.deleted is not None:
            self.deletions += 1
        self.vanishings += len(events.vanished)
        if self._keep:
            self.records.append(QueryRecord(i, j, answer, events.deleted, events.vanished))


class AdversaryHost(GameHost):
    """Game host whose equality bits come from the adaptive adversary.

    Examining a card expands into one pairwise query per stored position, so
    a flip reveals at most `slots` answers.  A declaration is accepted only on
    a forced (isolated) edge; anything else raises StrategyRejected carrying a
    valid deck consistent with every answer given so far on which the declared
    pair is not a match.
    """

    def __init__(self, kg: KnowledgeGraph, log: AdversaryLog, slots: int,
                 transcript: Transcript | None = None):
        super().__init__(kg.n, slots, transcript)
        self.kg = kg
        self.log = log
        self.assigned: dict[tuple[int, int], int] = {}
        self._next_value = 1

    def _equal_members(self, pos: int) -> list[int]:
        hits = []
        for j in sorted(self.working):
            a, b = (pos, j) if pos < j else (j, pos)
            ans, events = kg_answer(self.kg, a, b)
            self.log.note(a, b, ans, events)
            self.transcript.add_query(a, b, ans)
            if events.deleted is not None:
                self.transcript.add_delete(*events.deleted)
                for e in events.vanished:
                    self.transcript.add_vanish(*e)
            if ans:
                hits.append(j)
        return hits

    def _declare_value(self, i: int, j: int) -> tuple[MatchTriple, bool]:
        key = edge_key(self.kg.n, i, j)
        if key is None or not self.kg.isolated(*key):
            raise StrategyRejected((i, j), self._counterexample(i, j))
        v = self.assigned.get(key)
        if v is None:
            v = self._next_value
            self._next_value += 1
            self.assigned[key] = v
        return MatchTriple(i, j, v), True

    def _counterexample(self, i: int, j: int) -> Deck:
        """A deck consistent with all answers in which {i,j} is not a match."""
        n = self.kg.n
        adj = [set(s) for s in self.kg.adj]
        key = edge_key(n, i, j)
        if key is not None and key[1] in adj[key[0]]:
            adj[key[0]].discard(key[1])
            adj[key[1]].discard(key[0])
        mate = hopcroft_karp(n, adj)
        if any(mate[l] == 0 for l in range(1, n + 1)):
            raise InvariantViolation(f"pair {(i, j)} was forced after all")
        matching = [(l, mate[l]) for l in range(1, n + 1)]
        return deck_from_matching(n, n, matching, self.assigned)


@dataclass
class AdversaryResult:
    transcript: Transcript
    log: AdversaryLog
    graph: KnowledgeGraph
    matching: tuple[tuple[int, int], ...] | None = None
    realized: Deck | None = None
    complete: bool = False
    incorrect: bool = False
    rejected_pair: tuple[int, int] | None = None
    counterexample: Deck | None = None


def adversarial_play(strategy, n: int, budget: SpaceBudget | None = None,
                     lean: bool = False, keep_records: bool = True) -> AdversaryResult:
    """Drive a strategy with adversary answers until it outputs n matches.

    An unforced declaration ends the run immediately with incorrect=True and a
    counterexample deck.  On completion the final matching is realized as a
    deck that reproduces every recorded answer.
    """
    if budget is None:
        budget = SpaceBudget.for_slots(n, 2 * n)
    g = kg_init(n)
    log = AdversaryLog(n, g.status, keep_records=keep_records)
    host = AdversaryHost(g, log, budget.slots, Transcript(lean=lean))
    try:
        strategy.play(host)
    except StrategyRejected as rej:
        return AdversaryResult(host.transcript, log, g, incorrect=True,
                               rejected_pair=rej.pair, counterexample=rej.counterexample)
    complete = host.done() and len(host.transcript.outputs) == n
    matching = realized = None
    if complete and kg_is_done(g):
        matching = tuple((l, g.mate[l]) for l in range(1, n + 1))
        realized = realize_input(g, n, host.assigned)
    return AdversaryResult(host.transcript, log, g, matching=matching,
                           realized=realized, complete=complete)


def replay_consistent(result: AdversaryResult) -> bool:
    """Every recorded answer agrees with the realized deck."""
    x = result.realized
    if x is None:
        return False
    return all(rec.answer == (x[rec.i - 1] == x[rec.j - 1]) for rec in result.log.records)


# ---------------------------------------------------------------------------
# Involution audit

@dataclass(frozen=True)
class InvolutionReport:
    ok: bool
    claim_ok: bool
    accounting_ok: bool
    lower_bound_ok: bool
    pair_count: int
    deletions: int
    vanishings: int
    failures: tuple


def involution_audit(log: AdversaryLog, matching) -> InvolutionReport:
    """Audit a finished run against the pairing of non-matching edges.

    Renumbering right vertices so the final matching becomes {i, n+i} turns
    the pairing into ({i,n+j} <-> {j,n+i}); in original labels that maps
    (l, r) to (left-partner of r, right-partner of l).  The audit checks the
    map is a fixed-point-free involution off the matching, that every pair
    contains at least one deleted (not vanished) edge, and the removal
    accounting identities.
    """
    n = log.n
    pm = {l: r for l, r in matching}
    if len(pm) != n or sorted(pm) != list(range(1, n + 1)):
        raise ValueError("final matching must pair every left position")
    left_of = {r: l for l, r in pm.items()}

    def phi(e: tuple[int, int]) -> tuple[int, int]:
        l, r = e
        return (left_of[r], pm[l])

    failures: list[tuple] = []
    seen: set[tuple[int, int]] = set()
    pair_count = 0
    for l in range(1, n + 1):
        for r in range(n + 1, 2 * n + 1):
            if pm[l] == r:
                continue
            e = (l, r)
            fe = phi(e)
            if phi(fe) != e:
                failures.append(("not-involutive", e, fe))
                continue
            if fe == e:
                failures.append(("fixed-point", e))
                continue
            if e in seen:
                continue
            seen.add(e)
            seen.add(fe)
            pair_count += 1
            st_e = log.status.get(e)
            st_f = log.status.get(fe)
            if st_e is None or st_f is None:
                failures.append(("still-present", e, fe))
            elif st_e != "deleted" and st_f != "deleted":
                failures.append(("pair-entirely-vanished", e, fe))
    accounting_ok = log.deletions + log.vanishings == n * (n - 1)
    lower_bound_ok = log.deletions >= n * (n - 1) // 2
    claim_ok = not failures
    return InvolutionReport(
        ok=claim_ok and accounting_ok and lower_bound_ok,
        claim_ok=claim_ok,
        accounting_ok=accounting_ok,
        lower_bound_ok=lower_bound_ok,
        pair_count=pair_count,
        deletions=log.deletions,
        vanishings=log.vanishings,
        failures=tuple(failures),
    )
