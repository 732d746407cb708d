"""R-way decision trees with per-edge match outputs.

A tree of depth r queries r distinct positions along every root-to-leaf path
and may annotate edges with declared matches.  Trees are checked two ways:
running a deck down its path (tree_run), and exact path-by-path counting of
the decks consistent with each leaf, which yields the equal-pairs law and the
productive-input fraction without enumerating the deck universe.
"""
from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterator

from .game_core import (CapExceeded, Deck, MatchTriple, Transcript,
                        count_valid_inputs, enumerate_valid_inputs, matches_of)
from .strategies import GameHost, ProtocolError
from .analysis import y_exact_distribution

DEFAULT_TREE_CAP = 2_000_000


class TreeNode:
    __slots__ = ("pos", "kids", "outs")

    def __init__(self, pos: int, R: int):
        self.pos = pos
        self.kids: list[TreeNode | None] = [None] * R
        self.outs: list[tuple[MatchTriple, ...]] = [()] * R


class DecisionTree:
    """Validated R-way tree: uniform depth, no position re-queried and no
    output repeated along any path, all R branches present at every node."""

    def __init__(self, root: TreeNode | None, n: int, R: int, depth: int):
        if depth < 0 or depth > 2 * n:
            raise ValueError(f"depth must lie in 0..2n, got {depth}")
        if (root is None) != (depth == 0):
            raise ValueError("empty tree iff depth 0")
        self.root = root
        self.n = n
        self.R = R
        self.depth = depth
        self.node_count = self._validate()

    def _validate(self) -> int:
        if self.root is None:
            return 0
        count = 0

        def walk(node: TreeNode, level: int, queried: set[int], outs: set[MatchTriple]) -> None:
            nonlocal count
            count += 1
            if not 1 <= node.pos <= 2 * self.n:
                raise ValueError(f"queried position {node.pos} out of range")
            if node.pos in queried:
                raise ValueError(f"position {node.pos} re-queried along a path")
            if len(node.kids) != self.R or len(node.outs) != self.R:
                raise ValueError(f"node must carry exactly R={self.R} branches")
            queried.add(node.pos)
            for v in range(self.R):
                branch_outs = node.outs[v]
                fresh = set(branch_outs)
                if len(fresh) != len(branch_outs) or fresh & outs:
                    raise ValueError("output repeated along a path")
                for o in branch_outs:
                    if not (1 <= o.i < o.j <= 2 * self.n and 1 <= o.v <= self.R):
                        raise ValueError(f"malformed output {o}")
                child = node.kids[v]
                if child is None:
                    if level + 1 != self.depth:
                        raise ValueError("non-uniform depth")
                else:
                    walk(child, level + 1, queried, outs | fresh)
            queried.discard(node.pos)

        walk(self.root, 0, set(), set())
        return count


@dataclass(frozen=True)
class PathStats:
    """Trace of one deck through a tree."""

    queried: tuple[int, ...]
    values: tuple[int, ...]
    outputs: tuple[MatchTriple, ...]
    equal_pairs: int
    correct_outputs: int


def tree_run(tree: DecisionTree, x: Deck) -> PathStats:
    """Follow the deck's path; count equal value-pairs and correct outputs."""
    queried: list[int] = []
    values: list[int] = []
    outputs: list[MatchTriple] = []
    node = tree.root
    while node is not None:
        v = x[node.pos - 1]
        queried.append(node.pos)
        values.append(v)
        outputs.extend(node.outs[v - 1])
        node = node.kids[v - 1]
    eq = sum(c // 2 for c in Counter(values).values())
    truth = matches_of(x)
    correct = sum(1 for o in outputs if o in truth)
    return PathStats(tuple(queried), tuple(values), tuple(outputs), eq, correct)


# ---------------------------------------------------------------------------
# Exact distribution checks

def x_exact_distribution(tree: DecisionTree, n: int, R: int,
                         cap: int | None = None) -> list[Fraction]:
    """Law of the equal-pairs count over a uniform valid deck, by enumeration."""
    kwargs = {} if cap is None else {"cap": cap}
    tally = Counter()
    total = 0
    for x in enumerate_valid_inputs(n, R, **kwargs):
        tally[tree_run(tree, x).equal_pairs] += 1
        total += 1
    return [Fraction(tally.get(u, 0), total) for u in range(tree.depth // 2 + 1)]


def xy_equiv_check(tree: DecisionTree, n: int, R: int, cap: int | None = None) -> bool:
    """Exact rational equality of the tree's equal-pairs law with the
    completed-pairs law of drawing depth cards without replacement."""
    return x_exact_distribution(tree, n, R, cap) == y_exact_distribution(n, tree.depth)


# ---------------------------------------------------------------------------
# Path-by-path counting

def _iter_leaves(tree: DecisionTree) -> Iterator[tuple[dict[int, int], Counter, list[MatchTriple]]]:
    if tree.root is None:
        yield {}, Counter(), []
        return
    qvals: dict[int, int] = {}
    counts: Counter = Counter()
    outputs: list[MatchTriple] = []

    def rec(node: TreeNode) -> Iterator[tuple[dict[int, int], Counter, list[MatchTriple]]]:
        pos = node.pos
        for v in range(1, tree.R + 1):
            qvals[pos] = v
            counts[v] += 1
            outs = node.outs[v - 1]
            outputs.extend(outs)
            child = node.kids[v - 1]
            if child is None:
                yield qvals, counts, outputs
            else:
                yield from rec(child)
            for _ in outs:
                outputs.pop()
            counts[v] -= 1
            del qvals[pos]

    yield from rec(tree.root)


def _consistent_count(n: int, R: int, u: int, d: int, r: int) -> int:
    """Decks agreeing with r fixed reads holding u complete and d half pairs:
    choose the fresh value set, then arrange the remaining multiset."""
    f = n - u - d
    if f < 0:
        return 0
    return math.comb(R - u - d, f) * math.factorial(2 * n - r) // 2**f


def _pinned_count(n: int, R: int, counts: Counter, r: int, events) -> int:
    """Consistent decks additionally forcing every (position, value) pin of
    the given events; 0 when the pins contradict each other or the reads."""
    pins: dict[int, int] = {}
    extra: Counter = Counter()
    for ev in events:
        for pos, v in ev:
            cur = pins.get(pos)
            if cur is None:
                pins[pos] = v
                extra[v] += 1
            elif cur != v:
                return 0
    merged = counts.copy()
    for v, c in extra.items():
        merged[v] += c
        if merged[v] > 2:
            return 0
    u = sum(1 for c in merged.values() if c == 2)
    d = sum(1 for c in merged.values() if c == 1)
    return _consistent_count(n, R, u, d, r + len(pins))


def productive_deck_count(tree: DecisionTree, t: int) -> tuple[int, int]:
    """(decks on which the tree emits >= 2t correct outputs, all decks).

    Per leaf, outputs split into read-determined ones and speculative events
    pinning unread positions; the with-at-least-k form of inclusion-exclusion
    counts completions satisfying enough events.
    """
    n, R = tree.n, tree.R
    productive = 0
    total = 0
    for qvals, counts, outputs in _iter_leaves(tree):
        if any(c > 2 for c in counts.values()):
            continue
        u = sum(1 for c in counts.values() if c == 2)
        d = sum(1 for c in counts.values() if c == 1)
        r = len(qvals)
        base = _consistent_count(n, R, u, d, r)
        if base == 0:
            continue
        total += base
        det = 0
        events: list[tuple[tuple[int, int], ...]] = []
        for i, j, v in outputs:
            iq = i in qvals
            jq = j in qvals
            if iq and jq:
                if qvals[i] == v and qvals[j] == v:
                    det += 1
            elif iq or jq:
                qp, fp = (i, j) if iq else (j, i)
                if qvals[qp] == v and counts[v] == 1:
                    events.append(((fp, v),))
            else:
                if counts[v] == 0:
                    events.append(((i, v), (j, v)))
        need = 2 * t - det
        if need <= 0:
            productive += base
            continue
        m = len(events)
        if m < need:
            continue
        got = 0
        for k in range(need, m + 1):
            sk = 0
            for A in combinations(events, k):
                sk += _pinned_count(n, R, counts, r, A)
            got += (-1) ** (k - need) * math.comb(k - 1, need - 1) * sk
        productive += got
    return productive, total


def path_distribution(tree: DecisionTree) -> list[Fraction]:
    """Equal-pairs law by exact path counting (dual route to enumeration)."""
    n, R = tree.n, tree.R
    tally: Counter = Counter()
    for qvals, counts, _ in _iter_leaves(tree):
        if any(c > 2 for c in counts.values()):
            continue
        u = sum(1 for c in counts.values() if c == 2)
        d = sum(1 for c in counts.values() if c == 1)
        base = _consistent_count(n, R, u, d, len(qvals))
        if base:
            tally[u] += base
    total = count_valid_inputs(n, R)
    return [Fraction(tally.get(u, 0), total) for u in range(tree.depth // 2 + 1)]


@dataclass(frozen=True)
class ProductivityResult:
    n: int
    R: int
    r: int
    t: int
    productive: int
    total: int
    fraction: Fraction
    bound: float
    ok: bool


def lemma43_check(tree: DecisionTree, n: int, R: int, t: int) -> ProductivityResult:
    """Exact fraction of decks on which the tree emits >= 2t correct outputs,
    against the shallow-tree productivity bound (n-r-t)^-t + e^-t."""
    r = tree.depth
    if tree.n != n or tree.R != R:
        raise ValueError("tree shape disagrees with n, R")
    if R < n:
        raise ValueError(f"need R >= n, got R={R} < n={n}")
    if r > n // 2:
        raise ValueError(f"need depth <= n/2, got r={r}, n={n}")
    if t < 1 or t > r // 2:
        raise ValueError(f"need 1 <= t <= r/2, got t={t}, r={r}")
    productive, total = productive_deck_count(tree, t)
    expect = count_valid_inputs(n, R)
    if total != expect:
        raise ValueError(f"tree is not total: paths cover {total} of {expect} decks")
    fraction = Fraction(productive, total)
    bound = (n - r - t) ** (-t) + math.exp(-t)
    return ProductivityResult(n, R, r, t, productive, total, fraction, bound,
                              fraction <= Fraction(bound))


def productive_fraction_brute(tree: DecisionTree, n: int, R: int, t: int,
                              cap: int | None = None) -> Fraction:
    """Deck-enumeration oracle for the productive fraction (small n only)."""
    kwargs = {} if cap is None else {"cap": cap}
    productive = 0
    total = 0
    for x in enumerate_valid_inputs(n, R, **kwargs):
        total += 1
        if tree_run(tree, x).correct_outputs >= 2 * t:
            productive += 1
    return Fraction(productive, total)


# ---------------------------------------------------------------------------
# Tree builders

def _check_tree_cap(n: int, R: int, depth: int, cap: int) -> None:
    if depth > 2 * n:
        raise ValueError(f"depth {depth} exceeds the {2 * n} distinct positions")
    nodes = (R ** (depth + 1) - 1) // (R - 1) if R > 1 else depth + 1
    if nodes > cap:
        raise CapExceeded(f"tree would hold ~{nodes} nodes, cap {cap}")


def fixed_position_tree(n: int, R: int, depth: int,
                        cap: int = DEFAULT_TREE_CAP) -> DecisionTree:
    """Oblivious tree reading positions 1..depth with no outputs."""
    _check_tree_cap(n, R, depth, cap)

    def rec(k: int) -> TreeNode | None:
        if k == depth:
            return None
        node = TreeNode(k + 1, R)
        for v in range(R):
            node.kids[v] = rec(k + 1)
        return node

    return DecisionTree(rec(0), n, R, depth)


def random_tree(n: int, R: int, depth: int, seed: int, out_prob: float = 0.4,
                cap: int = DEFAULT_TREE_CAP) -> DecisionTree:
    """Random well-formed tree: random fresh position per node, sparse random
    output annotations that never repeat along a path."""
    _check_tree_cap(n, R, depth, cap)
    rng = random.Random(seed)

    def rec(k: int, used: tuple[int, ...], path_outs: frozenset) -> TreeNode | None:
        if k == depth:
            return None
        pos = rng.choice([p for p in range(1, 2 * n + 1) if p not in used])
        node = TreeNode(pos, R)
        for v in range(R):
            outs: tuple[MatchTriple, ...] = ()
            if rng.random() < out_prob:
                i = rng.randrange(1, 2 * n)
                j = rng.randrange(i + 1, 2 * n + 1)
                w = rng.randrange(1, R + 1)
                cand = MatchTriple(i, j, w)
                if cand not in path_outs:
                    outs = (cand,)
            node.kids[v] = rec(k + 1, used + (pos,), path_outs | set(outs))
            node.outs[v] = outs
        return node

    return DecisionTree(rec(0, (), frozenset()), n, R, depth)


def build_guessing_tree(n: int, R: int, depth: int, t: int,
                        cap: int = DEFAULT_TREE_CAP) -> DecisionTree:
    """Adversarially productive tree: reads positions 1..depth, declares every
    equal pair among its reads, and speculates t+1 extra matches on each final
    edge (half-open singles paired with unread positions first, then fresh
    pairs on fresh values)."""
    _check_tree_cap(n, R, depth, cap)

    def speculative(vals: tuple[int, ...]) -> list[MatchTriple]:
        counts = Counter(vals)
        singles = sorted(v for v, c in counts.items() if c == 1)
        unread = list(range(depth + 1, 2 * n + 1))
        unseen = [v for v in range(1, R + 1) if counts[v] == 0]
        outs: list[MatchTriple] = []
        want = t + 1
        for v in singles:
            if len(outs) == want or not unread:
                break
            qp = vals.index(v) + 1
            p = unread.pop(0)
            outs.append(MatchTriple(min(qp, p), max(qp, p), v))
        while len(outs) < want and len(unread) >= 2 and unseen:
            p1 = unread.pop(0)
            p2 = unread.pop(0)
            outs.append(MatchTriple(p1, p2, unseen.pop(0)))
        return outs

    def rec(k: int, vals: tuple[int, ...]) -> TreeNode | None:
        if k == depth:
            return None
        node = TreeNode(k + 1, R)
        for v in range(1, R + 1):
            vals2 = vals + (v,)
            outs: list[MatchTriple] = []
            seen = vals.count(v)
            if seen % 2 == 1:
                idx = [i for i, w in enumerate(vals) if w == v][seen - 1]
                outs.append(MatchTriple(idx + 1, k + 1, v))
            if k + 1 == depth:
                outs.extend(speculative(vals2))
            node.kids[v - 1] = rec(k + 1, vals2)
            node.outs[v - 1] = tuple(outs)
        return node

    return DecisionTree(rec(0, ()), n, R, depth)


# ---------------------------------------------------------------------------
# Compiling a player's first reads into a tree

class _NeedsRead(Exception):
    def __init__(self, pos: int):
        self.pos = pos


class _ReplayHost(GameHost):
    """Feeds a player scripted values: the k-th distinct position read gets
    the k-th feed value; re-reads answer from the script without consuming."""

    def __init__(self, n: int, slots: int, feed: tuple[int, ...]):
        super().__init__(n, slots, Transcript(lean=True))
        self.feed = feed
        self.values: dict[int, int] = {}
        self.fresh: list[int] = []
        self.outs_by_step: list[list[MatchTriple]] = [[] for _ in range(len(feed) + 1)]

    def _equal_members(self, pos: int) -> list[int]:
        if pos not in self.values:
            if len(self.fresh) == len(self.feed):
                raise _NeedsRead(pos)
            self.values[pos] = self.feed[len(self.fresh)]
            self.fresh.append(pos)
        v = self.values[pos]
        return sorted(j for j in self.working if self.values[j] == v)

    def _declare_value(self, i: int, j: int) -> tuple[MatchTriple, bool]:
        vi = self.values.get(i)
        vj = self.values.get(j)
        if vi is None or vj is None:
            raise ProtocolError("declared an unexamined position; not representable on a tree edge")
        return MatchTriple(i, j, vi), vi == vj

    def declare(self, i: int, j: int) -> MatchTriple:
        triple = super().declare(i, j)
        self.outs_by_step[len(self.fresh)].append(triple)
        return triple


def _replay(make_player: Callable, n: int, slots: int, feed: tuple[int, ...]):
    host = _ReplayHost(n, slots, feed)
    player = make_player()
    try:
        player.play(host)
        nxt = None
    except _NeedsRead as e:
        nxt = e.pos
    return tuple(host.fresh), nxt, [tuple(o) for o in host.outs_by_step]


def compile_prefix_tree(make_player: Callable, n: int, R: int, depth: int,
                        slots: int | None = None,
                        cap: int = DEFAULT_TREE_CAP) -> DecisionTree:
    """Unfold a deterministic player's first `depth` distinct reads into a tree.

    Redundant re-reads collapse onto the known branch; once the player stops
    reading, remaining levels query the lowest-indexed fresh position as
    output-free dummies so every leaf sits at uniform depth.
    """
    _check_tree_cap(n, R, depth, cap)
    if slots is None:
        slots = 2 * n

    def build(feed: tuple[int, ...], positions: tuple[int, ...]):
        qpos, next_pos, outs_by_step = _replay(make_player, n, slots, feed)
        k = len(feed)
        if list(qpos) != list(positions[:len(qpos)]):
            raise ValueError("player is not deterministic: read order changed")
        entry = outs_by_step[k]
        if k == 0 and entry:
            raise ValueError("player produced output before its first read")
        if k == depth:
            return None, entry
        if next_pos is not None:
            if len(qpos) != k:
                raise ValueError("player consumed fewer reads than fed yet asked for more")
            pos = next_pos
        else:
            pos = min(p for p in range(1, 2 * n + 1) if p not in positions)
        node = TreeNode(pos, R)
        for v in range(1, R + 1):
            child, edge_outs = build(feed + (v,), positions + (pos,))
            node.kids[v - 1] = child
            node.outs[v - 1] = tuple(edge_outs)
        return node, entry

    root, _ = build((), ())
    return DecisionTree(root, n, R, depth)
