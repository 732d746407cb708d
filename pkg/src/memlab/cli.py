"""Command-line harness: single games, adversary audits, parameter sweeps,
probabilistic checks, CSV reporting, and row replay.

Every CSV row carries the child seed that produced it, all output is written
in deterministic cell order regardless of the parallelism degree, and the
exit status is 0 exactly when every assertion in the run held, so any command
can serve as a CI gate.  `memlab replay --file F --line K` recomputes one
data row and compares byte for byte.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .adversary import adversarial_play, involution_audit, replay_consistent
from .analysis import (unique_pairs_expected, unique_pairs_expected_enumerated,
                       unique_pairs_mc, y_sample_size, y_tail_estimate, YExperiment)
from .game_core import (DEFAULT_ENUM_CAP, CapExceeded, GameParams, derive_seed,
                        generate_valid_input, matches_of, read_deck_file,
                        verify_transcript, write_transcript_csv, Transcript)
from .strategies import (DeckHost, SpaceBudget, make_strategy, multi_pass_play,
                         multi_pass_time_bound, randomized_order)
from .trees import (DEFAULT_TREE_CAP, build_guessing_tree, compile_prefix_tree,
                    fixed_position_tree, lemma43_check, random_tree, xy_equiv_check)
from . import strategies

PLAY_HEADER = "n,S,s,T,passes,correct"
TRADEOFF_HEADER = "kind,n,S,s,seed,strategy,T,passes,correct,st_product,c_ratio,ok"
ADVERSARY_HEADER = "n,S,s,seed,strategy,queries,deletions,vanishings,lower_bound_ok,involution_ok"
LEMMA_Y_HEADER = "n,r,t,trials,seed,estimate,bound,sigma,ok"
XY_HEADER = "n,R,depth,seed,kind,ok"
LEMMA43_HEADER = "n,R,r,t,tree,frac_num,frac_den,fraction,bound,ok"
UNIQUE_HEADER = "n,trials,seed,enumerated,from_n_pairs,from_all_pairs,mc_estimate,mc_sigma,threshold,ok"


def _emit(out_path: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Sweep configuration

@dataclass
class SweepConfig:
    """Grid for the tradeoff and adversary sweeps.

    `s_spec` is either the token "pow2" (slots 1, 2, 4, ... up to 2n per n)
    or an explicit list of slot counts.
    """

    ns: list[int] = field(default_factory=lambda: [8, 16, 32, 64, 128, 256])
    s_spec: object = "pow2"
    seeds: int = 100
    strategy: str = "multipass"
    jobs: int = 1
    master_seed: int = 0

    def s_values(self, n: int) -> list[int]:
        if self.s_spec == "pow2":
            out, s = [], 1
            while s <= 2 * n:
                out.append(s)
                s *= 2
            return out
        return list(self.s_spec)


def parse_config_file(path: str) -> dict[str, str]:
    """Flat key = value format; lists are comma separated; # starts a comment."""
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw.rstrip()!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def sweep_config_from(args) -> SweepConfig:
    cfg = SweepConfig(jobs=args.jobs, master_seed=args.seed)
    raw: dict[str, str] = {}
    if getattr(args, "config", None):
        raw = parse_config_file(args.config)
    if "n" in raw:
        cfg.ns = _int_list(raw["n"])
    if "s" in raw:
        cfg.s_spec = raw["s"] if raw["s"] == "pow2" else _int_list(raw["s"])
    if "seeds" in raw:
        cfg.seeds = int(raw["seeds"])
    if "strategy" in raw:
        cfg.strategy = raw["strategy"]
    if "jobs" in raw:
        cfg.jobs = int(raw["jobs"])
    if "seed" in raw:
        cfg.master_seed = int(raw["seed"])
    if getattr(args, "n_list", None):
        cfg.ns = _int_list(args.n_list)
    if getattr(args, "s_list", None):
        cfg.s_spec = args.s_list if args.s_list == "pow2" else _int_list(args.s_list)
    if getattr(args, "seeds", None):
        cfg.seeds = args.seeds
    if getattr(args, "strategy", None):
        cfg.strategy = args.strategy
    return cfg


def _map_cells(fn, specs: list, jobs: int) -> list:
    if jobs <= 1 or len(specs) <= 1:
        return [fn(spec) for spec in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, specs))


# ---------------------------------------------------------------------------
# Tradeoff sweep

def _tradeoff_record(n: int, s: int, dseed: int, strategy: str) -> tuple:
    budget = SpaceBudget.for_slots(n, s)
    x = generate_valid_input(GameParams(n, n, dseed))
    order = randomized_order(n, derive_seed(dseed, "order")) if strategy == "rmultipass" else None
    tr = multi_pass_play(x, budget, order=order, lean=True)
    correct = set(tr.outputs) == matches_of(x)
    in_bound = tr.flips <= multi_pass_time_bound(n, budget)
    return dseed, tr.flips, tr.passes, correct, in_bound


def _tradeoff_cell(spec: tuple) -> list[tuple]:
    n, s, nseeds, master, strategy = spec
    return [_tradeoff_record(n, s, derive_seed(master, "deck", n, k), strategy)
            for k in range(nseeds)]


def _tradeoff_record_row(n: int, s: int, strategy: str, rec: tuple) -> str:
    budget = SpaceBudget.for_slots(n, s)
    dseed, T, passes, correct, in_bound = rec
    ratio = budget.S * T / (n * n * budget.bits_per_index)
    ok = correct and in_bound
    return (f"record,{n},{budget.S},{s},{dseed},{strategy},{T},{passes},"
            f"{correct},{budget.S * T},{ratio!r},{ok}")


def tradeoff_sweep(cfg: SweepConfig) -> tuple[list[str], bool]:
    """Grid of multi-pass runs; asserts the memory-time product stays within
    twice its calibration at the smallest n in the grid."""
    cells = [(n, s) for n in cfg.ns for s in cfg.s_values(n)]
    specs = [(n, s, cfg.seeds, cfg.master_seed, cfg.strategy) for n, s in cells]
    results = _map_cells(_tradeoff_cell, specs, cfg.jobs)

    n_min = min(cfg.ns)
    summaries = []
    for (n, s), recs in zip(cells, results):
        budget = SpaceBudget.for_slots(n, s)
        T_worst = max(r[1] for r in recs)
        passes_worst = max(r[2] for r in recs if r[1] == T_worst)
        recs_ok = all(r[3] and r[4] for r in recs)
        ratio = budget.S * T_worst / (n * n * budget.bits_per_index)
        summaries.append((n, s, budget, T_worst, passes_worst, recs_ok, ratio))
    c_cal = max(sm[6] for sm in summaries if sm[0] == n_min)

    lines = [TRADEOFF_HEADER]
    all_ok = True
    for ((n, s), recs), sm in zip(zip(cells, results), summaries):
        for rec in recs:
            lines.append(_tradeoff_record_row(n, s, cfg.strategy, rec))
        _, _, budget, T_worst, passes_worst, recs_ok, ratio = sm
        ok = recs_ok and ratio <= 2.0 * c_cal
        all_ok = all_ok and ok
        lines.append(f"summary,{n},{budget.S},{s},-1,{cfg.strategy},{T_worst},"
                     f"{passes_worst},{recs_ok},{budget.S * T_worst},{ratio!r},{ok}")
    lines.append(f"calibration,{n_min},0,0,-1,{cfg.strategy},0,0,True,0,{c_cal!r},{all_ok}")
    return lines, all_ok


# ---------------------------------------------------------------------------
# Adversary sweep

def _pick_adversary_strategy(token: str, n: int, seed: int) -> tuple[str, int]:
    rnd = random.Random(derive_seed(seed, "pick"))
    name = rnd.choice(["multipass", "rmultipass", "perfect"]) if token == "mixed" else token
    if name == "perfect":
        return name, 2 * n
    pow2 = []
    s = 1
    while s <= 2 * n:
        pow2.append(s)
        s *= 2
    return name, rnd.choice(pow2)


def _adversary_row_for(n: int, s: int, seed: int, name: str) -> str:
    budget = SpaceBudget.for_slots(n, s)
    strat = make_strategy(name, n, seed)
    res = adversarial_play(strat, n, budget, lean=True, keep_records=False)
    lower_ok = res.log.queries >= n * (n - 1) // 2
    inv_ok = False
    if res.complete and not res.incorrect and res.matching is not None:
        inv_ok = involution_audit(res.log, res.matching).ok
    return (f"{n},{budget.S},{s},{seed},{name},{res.log.queries},"
            f"{res.log.deletions},{res.log.vanishings},{lower_ok},{inv_ok}")


def _adversary_cell(spec: tuple) -> str:
    n, k, master, token = spec
    seed = derive_seed(master, "adv", n, k)
    name, s = _pick_adversary_strategy(token, n, seed)
    return _adversary_row_for(n, s, seed, name)


def adversary_sweep(cfg: SweepConfig) -> tuple[list[str], bool]:
    specs = [(n, k, cfg.master_seed, cfg.strategy) for n in cfg.ns for k in range(cfg.seeds)]
    rows = _map_cells(_adversary_cell, specs, cfg.jobs)
    ok = all(row.split(",")[-2:] == ["True", "True"] for row in rows)
    return [ADVERSARY_HEADER] + rows, ok


# ---------------------------------------------------------------------------
# Single-run and check commands

def cmd_play(args) -> int:
    if args.deck:
        with open(args.deck) as fh:
            n, R, decks = read_deck_file(fh)
        if not decks:
            print("deck file holds no decks", file=sys.stderr)
            return 2
        x = decks[0]
    else:
        n = args.n
        R = args.R or n
        x = generate_valid_input(GameParams(n, R, args.seed))
    if args.strategy == "perfect":
        budget = SpaceBudget.for_slots(n, 2 * n)
    else:
        if args.space_bits is None:
            print("--space-bits is required for this strategy", file=sys.stderr)
            return 2
        budget = SpaceBudget(args.space_bits, n)
        if budget.slots < 1:
            print(f"S={budget.S} bits stores no card index: need at least "
                  f"{budget.bits_per_index}", file=sys.stderr)
            return 2
    strat = make_strategy(args.strategy, n, args.seed)
    host = DeckHost(x, budget.slots, Transcript())
    strat.play(host)
    tr = host.transcript
    report = verify_transcript(x, tr)
    print(PLAY_HEADER)
    print(f"{n},{budget.S},{budget.slots},{tr.flips},{tr.passes},{report.ok}")
    if args.out:
        with open(args.out, "w") as fh:
            write_transcript_csv(tr, fh)
    return 0 if report.ok else 1


def cmd_adversary(args) -> int:
    if args.config or args.n_list:
        cfg = sweep_config_from(args)
        if args.strategy is None:
            cfg.strategy = "mixed"
        lines, ok = adversary_sweep(cfg)
        _emit(args.out, lines)
        return 0 if ok else 1
    n = args.n
    strategy = args.strategy or "multipass"
    if strategy == "mixed":
        print("--strategy mixed applies to sweep mode only", file=sys.stderr)
        return 2
    if strategy == "perfect":
        s = 2 * n
    elif args.space_bits is not None:
        s = SpaceBudget(args.space_bits, n).slots
        if s < 1:
            print("space budget stores no card index", file=sys.stderr)
            return 2
    else:
        s = max(1, n // 2)
    row = _adversary_row_for(n, s, args.seed, strategy)
    _emit(args.out, [ADVERSARY_HEADER, row])
    if args.audit:
        strat = make_strategy(strategy, n, args.seed)
        res = adversarial_play(strat, n, SpaceBudget.for_slots(n, s))
        rep = involution_audit(res.log, res.matching) if res.matching else None
        print(f"audit: complete={res.complete} replay_consistent={replay_consistent(res)}",
              file=sys.stderr)
        if rep:
            print(f"audit: claim_ok={rep.claim_ok} accounting_ok={rep.accounting_ok} "
                  f"lower_bound_ok={rep.lower_bound_ok} deletions={rep.deletions} "
                  f"vanishings={rep.vanishings} pairs={rep.pair_count}", file=sys.stderr)
    return 0 if row.split(",")[-2:] == ["True", "True"] else 1


def cmd_tradeoff(args) -> int:
    cfg = sweep_config_from(args)
    lines, ok = tradeoff_sweep(cfg)
    _emit(args.out, lines)
    return 0 if ok else 1


def _lemma_y_row(n: int, r: int, t: int, trials: int, seed: int) -> str:
    est = y_tail_estimate(YExperiment(n=n, r=r, t=t, trials=trials, seed=seed))
    return f"{n},{r},{t},{trials},{seed},{est.estimate!r},{est.bound!r},{est.sigma!r},{est.ok}"


def cmd_lemma_y(args) -> int:
    r = args.r if args.r is not None else y_sample_size(args.n, args.t)
    row = _lemma_y_row(args.n, r, args.t, args.trials, args.seed)
    _emit(args.out, [LEMMA_Y_HEADER, row])
    return 0 if row.endswith("True") else 1


def _xy_row(n: int, R: int, depth: int, seed: int, kind: str, cap: int) -> str:
    if kind == "fixed":
        tree = fixed_position_tree(n, R, depth)
    elif kind.startswith("compiled_s"):
        slots = int(kind.removeprefix("compiled_s"))
        tree = compile_prefix_tree(strategies.MultiPass, n, R, depth, slots=slots)
    else:
        tree = random_tree(n, R, depth, seed)
    ok = xy_equiv_check(tree, n, R, cap)
    return f"{n},{R},{depth},{seed},{kind},{ok}"


def cmd_xy_check(args) -> int:
    n, R = args.n, args.R
    rows = [_xy_row(n, R, min(2, 2 * n), 0, "fixed", args.cap_enum)]
    for k in range(args.trees):
        depth = 1 + k % min(4, 2 * n)
        seed = derive_seed(args.seed, "xy", n, R, k)
        rows.append(_xy_row(n, R, depth, seed, "random", args.cap_enum))
    _emit(args.out, [XY_HEADER] + rows)
    return 0 if all(r.endswith("True") for r in rows) else 1


def _lemma43_row(n: int, R: int, r: int, t: int, tree_kind: str, cap: int) -> str:
    if tree_kind.startswith("compiled_s"):
        slots = int(tree_kind.removeprefix("compiled_s"))
        tree = compile_prefix_tree(strategies.MultiPass, n, R, r, slots=slots, cap=cap)
    elif tree_kind == "guessing":
        tree = build_guessing_tree(n, R, r, t, cap=cap)
    else:
        raise ValueError(f"unknown tree kind {tree_kind!r}")
    res = lemma43_check(tree, n, R, t)
    return (f"{n},{R},{r},{t},{tree_kind},{res.fraction.numerator},"
            f"{res.fraction.denominator},{float(res.fraction)!r},{res.bound!r},{res.ok}")


def cmd_lemma43(args) -> int:
    kind = f"compiled_s{args.s}" if args.tree == "compiled" else "guessing"
    row = _lemma43_row(args.n, args.R, args.r, args.t, kind, args.cap_tree)
    _emit(args.out, [LEMMA43_HEADER, row])
    return 0 if row.endswith("True") else 1


def _unique_row(n: int, trials: int, seed: int, cap: int) -> str:
    exp = unique_pairs_expected(n)
    try:
        en = unique_pairs_expected_enumerated(n, cap)
        enumerated = f"{en.numerator}/{en.denominator}"
    except CapExceeded:
        enumerated = "na"
    mc, sigma = unique_pairs_mc(n, trials, seed)
    ok = mc - 3.0 * sigma > exp.threshold
    return (f"{n},{trials},{seed},{enumerated},{exp.from_n_pairs!r},"
            f"{exp.from_all_pairs!r},{mc!r},{sigma!r},{exp.threshold!r},{ok}")


def cmd_unique_pairs(args) -> int:
    row = _unique_row(args.n, args.trials, args.seed, args.cap_enum)
    _emit(args.out, [UNIQUE_HEADER, row])
    return 0 if row.endswith("True") else 1


# ---------------------------------------------------------------------------
# Report and replay

def cmd_report(args) -> int:
    any_fail = False
    parse_fail = False
    tidy = ["file,line,column,value,row_ok"]
    for path in args.paths:
        try:
            with open(path) as fh:
                lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
        except OSError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            parse_fail = True
            continue
        if not lines:
            print(f"{path}: 0 rows, 0 failing")
            continue
        header = lines[0].split(",")
        bool_cols = [i for i, h in enumerate(header)
                     if h in ("ok", "correct") or h.endswith("_ok")]
        fails = []
        for lineno, line in enumerate(lines[1:], start=2):
            vals = line.split(",")
            if len(vals) != len(header):
                print(f"{path}:{lineno}: expected {len(header)} fields, got {len(vals)}",
                      file=sys.stderr)
                parse_fail = True
                continue
            row_ok = all(vals[i] == "True" for i in bool_cols)
            if not row_ok:
                fails.append(lineno)
            for i, h in enumerate(header):
                tidy.append(f"{path},{lineno},{h},{vals[i]},{row_ok}")
        any_fail = any_fail or bool(fails)
        suffix = f" (first at line {fails[0]})" if fails else ""
        print(f"{path}: {len(lines) - 1} rows, {len(fails)} failing{suffix}")
    if args.out:
        _emit(args.out, tidy)
    if parse_fail:
        return 2
    return 1 if any_fail else 0


def _recompute_row(header: str, row: str, caps: tuple[int, int]) -> str | None:
    cap_enum, cap_tree = caps
    vals = row.split(",")
    if header == TRADEOFF_HEADER:
        kind, n, _S, s, seed, strategy = vals[0], int(vals[1]), vals[2], int(vals[3]), int(vals[4]), vals[5]
        if kind != "record":
            return None
        rec = _tradeoff_record(n, s, seed, strategy)
        return _tradeoff_record_row(n, s, strategy, rec)
    if header == ADVERSARY_HEADER:
        n, s, seed, strategy = int(vals[0]), int(vals[2]), int(vals[3]), vals[4]
        return _adversary_row_for(n, s, seed, strategy)
    if header == LEMMA_Y_HEADER:
        n, r, t, trials, seed = (int(v) for v in vals[:5])
        return _lemma_y_row(n, r, t, trials, seed)
    if header == XY_HEADER:
        n, R, depth, seed, kind = int(vals[0]), int(vals[1]), int(vals[2]), int(vals[3]), vals[4]
        return _xy_row(n, R, depth, seed, kind, cap_enum)
    if header == LEMMA43_HEADER:
        n, R, r, t, kind = int(vals[0]), int(vals[1]), int(vals[2]), int(vals[3]), vals[4]
        return _lemma43_row(n, R, r, t, kind, cap_tree)
    if header == UNIQUE_HEADER:
        n, trials, seed = int(vals[0]), int(vals[1]), int(vals[2])
        return _unique_row(n, trials, seed, cap_enum)
    return None


def cmd_replay(args) -> int:
    with open(args.file) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if args.line < 1 or args.line >= len(lines):
        print(f"line {args.line} out of range (file has {len(lines) - 1} data rows)",
              file=sys.stderr)
        return 2
    header, original = lines[0], lines[args.line]
    recomputed = _recompute_row(header, original, (args.cap_enum, args.cap_tree))
    if recomputed is None:
        print(f"rows under header {header!r} (or aggregate rows) cannot be replayed in isolation",
              file=sys.stderr)
        return 2
    print(f"original:   {original}")
    print(f"recomputed: {recomputed}")
    if recomputed == original:
        print("replay: identical")
        return 0
    print("replay: MISMATCH")
    return 1


# ---------------------------------------------------------------------------
# Argument wiring

def _add_sweep_flags(p: argparse.ArgumentParser, default_strategy: str,
                     strategy_choices: list[str]) -> None:
    p.add_argument("--config", help="sweep config file (key = value lines)")
    p.add_argument("--n-list", help="comma-separated pair counts")
    p.add_argument("--s-list", help="comma-separated slot counts, or pow2")
    p.add_argument("--seeds", type=int, help="runs per cell")
    p.add_argument("--strategy", choices=strategy_choices, default=None,
                   help=f"player (default {default_strategy})")


def _add_globals(p: argparse.ArgumentParser, root: bool) -> None:
    # accepted both before and after the subcommand; the later wins
    d = (lambda v: v) if root else (lambda v: argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=d(None),
                   help="master seed (default: $MEMLAB_SEED, else 0)")
    p.add_argument("--out", default=d(None), help="output path (default: stdout)")
    p.add_argument("--jobs", type=int, default=d(None),
                   help="parallel cells for sweeps (default: all cores)")
    p.add_argument("--cap-enum", type=int, default=d(DEFAULT_ENUM_CAP),
                   help="max deck-universe size for exhaustive checks")
    p.add_argument("--cap-tree", type=int, default=d(DEFAULT_TREE_CAP),
                   help="max node count for built trees")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="memlab",
        description="Space-bounded pair-matching game lab: players, adaptive "
                    "adversary, exact distribution and tail-bound checks.")
    _add_globals(parser, root=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_cmd(name, **kw):
        p = sub.add_parser(name, **kw)
        _add_globals(p, root=False)
        return p

    p = add_cmd("play", help="one game against a real deck")
    p.add_argument("--strategy", choices=["multipass", "rmultipass", "perfect"],
                   default="multipass")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--R", type=int, default=None, help="alphabet size (default n)")
    p.add_argument("--space-bits", type=int, default=None)
    p.add_argument("--deck", help="deck file; plays its first deck")
    p.set_defaults(func=cmd_play)

    p = add_cmd("adversary", help="adversarial game(s) with audits; "
                                  "--config/--n-list switches to sweep mode")
    p.add_argument("--strategy",
                   choices=["multipass", "rmultipass", "perfect", "mixed"],
                   default=None, help="player (default multipass; mixed in sweeps)")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--space-bits", type=int, default=None)
    p.add_argument("--audit", action="store_true",
                   help="print involution/replay audit details to stderr")
    p.add_argument("--config", help="sweep config file (key = value lines)")
    p.add_argument("--n-list", help="comma-separated pair counts (sweep mode)")
    p.add_argument("--s-list", help="comma-separated slot counts, or pow2")
    p.add_argument("--seeds", type=int, help="runs per cell (sweep mode)")
    p.set_defaults(func=cmd_adversary)

    p = add_cmd("tradeoff", help="memory-time product sweep")
    _add_sweep_flags(p, "multipass", ["multipass", "rmultipass"])
    p.set_defaults(func=cmd_tradeoff)

    p = add_cmd("lemma-y", help="Monte Carlo completed-pairs tail vs e^-t")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=None,
                   help="sample size (default floor((2/e) sqrt(nt)))")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_lemma_y)

    p = add_cmd("xy-check", help="tree equal-pairs law vs sampling law")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--trees", type=int, default=10)
    p.set_defaults(func=cmd_xy_check)

    p = add_cmd("lemma43", help="exact productive-input fraction vs bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--tree", choices=["compiled", "guessing"], default="compiled")
    p.add_argument("--s", type=int, default=2, help="slots for the compiled player")
    p.set_defaults(func=cmd_lemma43)

    p = add_cmd("unique-pairs", help="unique-pairs expectation checks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=2000)
    p.set_defaults(func=cmd_unique_pairs)

    p = add_cmd("report", help="aggregate result CSVs; nonzero exit on failures")
    p.add_argument("paths", nargs="*")
    p.set_defaults(func=cmd_report)

    p = add_cmd("replay", help="recompute one CSV data row from its seed")
    p.add_argument("--file", required=True)
    p.add_argument("--line", type=int, required=True, help="1-based data row index")
    p.set_defaults(func=cmd_replay)

    args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = int(os.environ.get("MEMLAB_SEED", "0"))
    if args.jobs is None:
        args.jobs = os.cpu_count() or 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"memlab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
