"""Deck universe for the pair-matching card game.

A deck is a tuple of 2n values in 1..R in which exactly n distinct values
occur exactly twice each.  Positions and values are 1-based throughout,
including all serialized forms.  This module owns deck generation and
enumeration, match extraction, the event transcript every player produces,
and the brute-force verification report the test suite leans on.
"""
from __future__ import annotations

import hashlib
import math
import random
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, NamedTuple

Deck = tuple[int, ...]

DEFAULT_ENUM_CAP = 10_000_000


class CapExceeded(ValueError):
    """An exhaustive computation would exceed its configured cap."""


@dataclass(frozen=True)
class GameParams:
    """Deck shape: n pairs with values from 1..R, plus the RNG seed."""

    n: int
    R: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need n >= 1, got n={self.n}")
        if self.R < self.n:
            raise ValueError(f"need R >= n, got R={self.R} < n={self.n}: no valid deck exists")


class MatchTriple(NamedTuple):
    """A declared match: positions i < j holding the same value v."""

    i: int
    j: int
    v: int


def derive_seed(seed: int, *parts) -> int:
    """Stable 63-bit child seed from a master seed and a label path.

    The split is sha256 over "seed:part/part/...", so any cell or trial of an
    experiment can be re-run in isolation from its recorded child seed.
    """
    text = f"{seed}:" + "/".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


def generate_valid_input(params: GameParams) -> Deck:
    """Uniformly random deck: a uniform size-n value set, then a uniform arrangement."""
    rng = random.Random(params.seed)
    vals = rng.sample(range(1, params.R + 1), params.n)
    deck = [v for v in vals for _ in (0, 1)]
    rng.shuffle(deck)
    return tuple(deck)


def count_valid_inputs(n: int, R: int) -> int:
    """|deck universe| = C(R,n) * (2n)! / 2^n."""
    return math.comb(R, n) * math.factorial(2 * n) // 2**n


def enumerate_valid_inputs(n: int, R: int, cap: int = DEFAULT_ENUM_CAP) -> Iterator[Deck]:
    """Every valid deck exactly once, in canonical order.

    Order: value subsets ascending lexicographically, then the distinct
    arrangements of each subset's multiset in lexicographic order.  Refuses
    up front when the universe exceeds `cap`.
    """
    if R < n:
        raise ValueError(f"need R >= n, got R={R} < n={n}")
    total = count_valid_inputs(n, R)
    if total > cap:
        raise CapExceeded(f"{total} decks for n={n}, R={R} exceeds cap {cap}")
    return _enumerate_decks(n, R)


def _enumerate_decks(n: int, R: int) -> Iterator[Deck]:
    import itertools

    for subset in itertools.combinations(range(1, R + 1), n):
        counts = {v: 2 for v in subset}
        yield from _multiset_perms(counts, 2 * n, ())


def _multiset_perms(counts: dict[int, int], slots: int, prefix: Deck) -> Iterator[Deck]:
    if slots == 0:
        yield prefix
        return
    for v in sorted(counts):
        if counts[v] == 0:
            continue
        counts[v] -= 1
        yield from _multiset_perms(counts, slots - 1, prefix + (v,))
        counts[v] += 1


def deck_multiplicities(x: Iterable[int]) -> Counter:
    return Counter(x)


def validate_deck(x: Deck, R: int | None = None) -> int:
    """Check validity and return n; diagnostics name the offending multiplicities."""
    counts = deck_multiplicities(x)
    if len(x) % 2 != 0:
        raise ValueError(f"deck length {len(x)} is odd")
    n = len(x) // 2
    bad = {v: c for v, c in counts.items() if c != 2}
    if bad or len(counts) != n:
        raise ValueError(f"invalid deck: value multiplicities {dict(sorted(bad.items()))} (need every value exactly twice)")
    if R is not None and any(v < 1 or v > R for v in counts):
        raise ValueError(f"deck values outside 1..{R}")
    return n


def matches_of(x: Deck) -> set[MatchTriple]:
    """The n matches of a valid deck, as (i, j, v) triples with i < j."""
    validate_deck(x)
    first: dict[int, int] = {}
    out: set[MatchTriple] = set()
    for pos, v in enumerate(x, start=1):
        if v in first:
            out.add(MatchTriple(first[v], pos, v))
        else:
            first[v] = pos
    return out


# ---------------------------------------------------------------------------
# Transcripts

class Event(NamedTuple):
    """One transcript event; the meaning of a/b/c depends on kind.

    flip:   a=position, b=working-set size at the flip (-1 if unrecorded)
    query:  a=i, b=j, c=1/0 answer
    output: a=i, b=j, c=v
    delete: a=i, b=j        (adversary edge removal by a "No" answer)
    vanish: a=i, b=j        (adversary edge removal by uselessness)
    pass:   a=pass index
    """

    kind: str
    a: int = 0
    b: int = 0
    c: int = 0


class Transcript:
    """Ordered event log of one game: flips, pairwise queries, outputs,
    adversary edge removals, and pass boundaries.

    In lean mode only counters, outputs and the running working-set maximum
    are kept; the event list stays empty.  Output triples never repeat.
    """

    __slots__ = ("events", "flips", "queries", "passes", "outputs", "_seen", "max_ws", "lean")

    def __init__(self, lean: bool = False):
        self.events: list[Event] = []
        self.flips = 0
        self.queries = 0
        self.passes = 0
        self.outputs: list[MatchTriple] = []
        self._seen: set[MatchTriple] = set()
        self.max_ws = 0
        self.lean = lean

    def add_flip(self, pos: int, ws_size: int = -1) -> None:
        self.flips += 1
        if ws_size > self.max_ws:
            self.max_ws = ws_size
        if not self.lean:
            self.events.append(Event("flip", pos, ws_size))

    def note_ws(self, size: int) -> None:
        if size > self.max_ws:
            self.max_ws = size

    def add_query(self, i: int, j: int, answer: bool) -> None:
        self.queries += 1
        if not self.lean:
            self.events.append(Event("query", i, j, int(answer)))

    def add_output(self, t: MatchTriple) -> None:
        if t in self._seen:
            raise ValueError(f"output repeated: {t}")
        self._seen.add(t)
        self.outputs.append(t)
        if not self.lean:
            self.events.append(Event("output", t.i, t.j, t.v))

    def add_delete(self, i: int, j: int) -> None:
        if not self.lean:
            self.events.append(Event("delete", i, j))

    def add_vanish(self, i: int, j: int) -> None:
        if not self.lean:
            self.events.append(Event("vanish", i, j))

    def add_pass(self, index: int) -> None:
        self.passes += 1
        if not self.lean:
            self.events.append(Event("pass", index))

    def flip_positions(self) -> list[int]:
        return [e.a for e in self.events if e.kind == "flip"]


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of checking a transcript's outputs against a deck's matches."""

    ok: bool
    missing: tuple[MatchTriple, ...]
    unexpected: tuple[MatchTriple, ...]
    flips: int
    queries: int

    def __str__(self) -> str:
        if self.ok:
            return f"ok ({self.flips} flips, {self.queries} queries)"
        return f"FAIL missing={list(self.missing)} unexpected={list(self.unexpected)}"


def verify_transcript(x: Deck, t: Transcript) -> VerificationReport:
    """Report whether t's outputs are exactly matches_of(x); never raises."""
    want = matches_of(x)
    got = set(t.outputs)
    missing = tuple(sorted(want - got))
    unexpected = tuple(sorted(got - want))
    ok = not missing and not unexpected and len(t.outputs) == len(want)
    return VerificationReport(ok, missing, unexpected, t.flips, t.queries)


# ---------------------------------------------------------------------------
# Serialization

def write_transcript_csv(t: Transcript, fh: IO[str]) -> None:
    """Event log as CSV with columns step,event,arg1,arg2,arg3."""
    fh.write("step,event,arg1,arg2,arg3\n")
    for k, e in enumerate(t.events, start=1):
        fh.write(f"{k},{e.kind},{e.a},{e.b},{e.c}\n")


def read_transcript_csv(fh: IO[str]) -> Transcript:
    header = fh.readline().strip()
    if header != "step,event,arg1,arg2,arg3":
        raise ValueError(f"bad transcript header: {header!r}")
    t = Transcript()
    for line in fh:
        line = line.strip()
        if not line:
            continue
        _, kind, a, b, c = line.split(",")
        a, b, c = int(a), int(b), int(c)
        if kind == "flip":
            t.add_flip(a, b)
        elif kind == "query":
            t.add_query(a, b, bool(c))
        elif kind == "output":
            t.add_output(MatchTriple(a, b, c))
        elif kind == "delete":
            t.add_delete(a, b)
        elif kind == "vanish":
            t.add_vanish(a, b)
        elif kind == "pass":
            t.add_pass(a)
        else:
            raise ValueError(f"unknown event kind {kind!r}")
    return t


def write_deck_file(fh: IO[str], n: int, R: int, decks: Iterable[Deck]) -> None:
    """Deck text format: header line "n R", then one space-separated deck per line."""
    fh.write(f"{n} {R}\n")
    for deck in decks:
        fh.write(" ".join(str(v) for v in deck) + "\n")


def read_deck_file(fh: IO[str]) -> tuple[int, int, list[Deck]]:
    header = fh.readline().split()
    if len(header) != 2:
        raise ValueError("deck file must start with a header line: n R")
    n, R = int(header[0]), int(header[1])
    decks: list[Deck] = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        deck = tuple(int(tok) for tok in line.split())
        if len(deck) != 2 * n:
            raise ValueError(f"deck of length {len(deck)}, expected {2 * n}")
        decks.append(deck)
    return n, R, decks
