"""Instance file format, generators, command-line surface, and the
randomized cross-check harness.

File format (canonical form; `c` lines are comments, final newline
required)::

    p sfast <n> <k>
    t <i1> <i2> ...          sorted 1-based terminals, may be empty
    a <u> <v>                one line per pair, sorted by (min, max)

Exit codes: 0 consistent, 1 usage error, 2 invariant violation, 3 oracle
disagreement.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .core import (
    Arc,
    Instance,
    Tournament,
    build_tournament,
    transitive_tournament,
    verify_solution,
)
from .errors import BadParameters, ParseError, SfastError, TooLarge
from .reduce import Status, TRACE_SCHEMA, iter_replay, kernelize, replay_trace
from .solve import decide, exact_branch, exact_order, exact_subset


# ------------------------------------------------------------- file format


def _significant_lines(text: str):
    if not text.endswith("\n"):
        raise ParseError("final newline required")
    for no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped == "c" or stripped.startswith("c "):
            continue
        yield no, stripped.split()


def parse_instance(text: str) -> Instance:
    """Parse the instance format; duplicate pairs are parse errors, while
    an incomplete orientation surfaces as MalformedTournament."""
    n = k = None
    terminals: list[int] = []
    arcs: list[Arc] = []
    seen_pairs: set[tuple[int, int]] = set()
    seen_t = False
    for no, tok in _significant_lines(text):
        if n is None:
            if len(tok) != 4 or tok[0] != "p" or tok[1] != "sfast":
                raise ParseError("expected header 'p sfast <n> <k>'", no)
            try:
                n, k = int(tok[2]), int(tok[3])
            except ValueError:
                raise ParseError("header counts must be integers", no) from None
            if n < 0 or k < 0:
                raise ParseError("n and k must be non-negative", no)
        elif tok[0] == "t":
            if seen_t:
                raise ParseError("duplicate terminal line", no)
            seen_t = True
            try:
                terminals = [int(x) for x in tok[1:]]
            except ValueError:
                raise ParseError("terminals must be integers", no) from None
            if any(not (1 <= t <= n) for t in terminals):
                raise ParseError(f"terminal out of range 1..{n}", no)
            if any(a >= b for a, b in zip(terminals, terminals[1:])):
                raise ParseError("terminals must be sorted and distinct", no)
        elif tok[0] == "a":
            if not seen_t:
                raise ParseError("arc line before terminal line", no)
            if len(tok) != 3:
                raise ParseError("expected 'a <u> <v>'", no)
            try:
                u, v = int(tok[1]), int(tok[2])
            except ValueError:
                raise ParseError("arc endpoints must be integers", no) from None
            if not (1 <= u <= n and 1 <= v <= n) or u == v:
                raise ParseError(f"bad arc ({u}, {v})", no)
            pair = (min(u, v), max(u, v))
            if pair in seen_pairs:
                raise ParseError(f"pair {{{u}, {v}}} appears twice", no)
            seen_pairs.add(pair)
            arcs.append((u - 1, v - 1))
        else:
            raise ParseError(f"unknown line kind {tok[0]!r}", no)
    if n is None:
        raise ParseError("missing header")
    if not seen_t:
        raise ParseError("missing terminal line")
    tournament = build_tournament(n, arcs)
    return Instance(tournament, {t - 1 for t in terminals}, k)


def serialize_instance(inst: Instance) -> str:
    """Canonical text form; parse(serialize(x)) == x."""
    lines = [f"p sfast {inst.n} {inst.budget}"]
    terms = " ".join(str(t + 1) for t in sorted(inst.terminals))
    lines.append(f"t {terms}".rstrip())
    adj = inst.tournament.adj
    for i in range(inst.n):
        for j in range(i + 1, inst.n):
            if adj[i, j]:
                lines.append(f"a {i + 1} {j + 1}")
            else:
                lines.append(f"a {j + 1} {i + 1}")
    return "\n".join(lines) + "\n"


def parse_witness(text: str) -> frozenset[Arc]:
    """Witness files hold `a <u> <v>` lines; `optimum` lines (as printed
    by the solve command) and comments are ignored."""
    arcs: set[Arc] = set()
    for no, tok in _significant_lines(text):
        if tok[0] == "optimum":
            continue
        if tok[0] != "a" or len(tok) != 3:
            raise ParseError("expected 'a <u> <v>'", no)
        try:
            u, v = int(tok[1]), int(tok[2])
        except ValueError:
            raise ParseError("arc endpoints must be integers", no) from None
        if u < 1 or v < 1 or u == v:
            raise ParseError(f"bad arc ({u}, {v})", no)
        arc = (u - 1, v - 1)
        if arc in arcs:
            raise ParseError(f"arc ({u}, {v}) appears twice", no)
        arcs.add(arc)
    return frozenset(arcs)


def load_instance(path) -> Instance:
    return parse_instance(Path(path).read_text())


def save_instance(path, inst: Instance) -> None:
    Path(path).write_text(serialize_instance(inst))


def trivial_yes_instance() -> Instance:
    return Instance(transitive_tournament(1), frozenset(), 0)


def trivial_no_instance() -> Instance:
    cycle = build_tournament(3, [(0, 1), (1, 2), (2, 0)])
    return Instance(cycle, {0, 1, 2}, 0)


# --------------------------------------------------------------- generators


def generate(model: str, n: int, k: int, terminal_fraction: float = 0.0,
             s: int = 0, seed: int = 0) -> Instance:
    """Seed-deterministic instance generators.

    uniform: every pair oriented by a fair coin. planted: transitive plus
    s distinct pair reversals, so the optimum is at most s.
    """
    if n < 1:
        raise BadParameters("n must be at least 1")
    if k < 0:
        raise BadParameters("k must be non-negative")
    if not (0.0 <= terminal_fraction <= 1.0):
        raise BadParameters("terminal fraction must be in [0, 1]")
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n), dtype=bool)
    if model == "uniform":
        flips = rng.random(len(pairs)) < 0.5
        for (i, j), flip in zip(pairs, flips):
            if flip:
                adj[j, i] = True
            else:
                adj[i, j] = True
    elif model == "planted":
        if not (0 <= s <= len(pairs)):
            raise BadParameters(f"s must be in 0..{len(pairs)}")
        adj = np.triu(np.ones((n, n), dtype=bool), 1)
        if s:
            chosen = rng.choice(len(pairs), size=s, replace=False)
            for idx in chosen:
                i, j = pairs[idx]
                adj[i, j] = False
                adj[j, i] = True
    else:
        raise BadParameters(f"unknown model {model!r}")
    count = int(round(terminal_fraction * n))
    terminals = set()
    if count:
        terminals = {int(t) for t in rng.choice(n, size=count, replace=False)}
    return Instance(Tournament(adj, _validate=False), terminals, k)


# ------------------------------------------------------------------- trace


def trace_lines(inst: Instance, result, provider: str) -> list[str]:
    lines = [json.dumps({
        "record": "meta", "schema": TRACE_SCHEMA,
        "n": inst.n, "k": inst.budget, "provider": provider,
    }, sort_keys=True)]
    for rec in result.trace:
        payload = dataclasses.asdict(rec)
        payload["record"] = "rule"
        payload["touched"] = [list(t) if isinstance(t, tuple) else t
                              for t in payload["touched"]]
        lines.append(json.dumps(payload, sort_keys=True))
    summary = {"record": "result", "status": result.status.value}
    if result.bounds is not None:
        summary["order_cost"] = result.bounds.order_cost
        summary["budget"] = result.bounds.budget
        summary["size_cap"] = result.bounds.size_cap
    if result.instance is not None:
        summary["n"] = result.instance.n
    lines.append(json.dumps(summary, sort_keys=True))
    return lines


# ----------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    inst = generate(args.model, args.n, args.k, args.tfrac, args.s, args.seed)
    save_instance(args.out, inst)
    return 0


def cmd_kernelize(args) -> int:
    inst = load_instance(args.infile)
    result = kernelize(inst, provider=args.provider)
    if args.trace:
        Path(args.trace).write_text("\n".join(trace_lines(inst, result, args.provider)) + "\n")
    if args.out:
        if result.status is Status.REDUCED:
            out_inst = result.instance
        elif result.status is Status.TRIVIAL_YES:
            out_inst = trivial_yes_instance()
        else:
            out_inst = trivial_no_instance()
        save_instance(args.out, out_inst)
    replayed_status, replayed = replay_trace(inst, result.trace)
    if replayed_status is not result.status or (
        result.status is Status.REDUCED and replayed != result.instance
    ):
        raise SfastError("trace replay does not reproduce the result")
    final_n = result.instance.n if result.instance else 0
    final_k = result.instance.budget if result.instance else 0
    print(f"status {result.status.value} n {inst.n} -> {final_n} "
          f"k {inst.budget} -> {final_k} rules {len(result.trace)}")
    return 0


def cmd_solve(args) -> int:
    inst = load_instance(args.infile)
    if args.method == "subset":
        outcome = exact_subset(inst)
    elif args.method == "branch":
        outcome = exact_branch(inst)
    else:
        outcome = exact_order(inst)
    print(f"optimum {outcome.optimum}")
    for u, v in sorted(outcome.witness):
        print(f"a {u + 1} {v + 1}")
    return 0


def cmd_verify(args) -> int:
    inst = load_instance(args.infile)
    witness = parse_witness(Path(args.witness).read_text())
    if verify_solution(inst, witness):
        print(f"accept size {len(witness)} budget {inst.budget}")
        return 0
    print(f"reject size {len(witness)} budget {inst.budget}")
    return 2


def run_xcheck(n_max: int, k_max: int, trials: int, seed: int,
               out=sys.stdout) -> tuple[int, int]:
    """Random instances through the pipeline; every recorded rule firing
    and the final verdict must preserve the subset-oracle answer.

    Returns (checks, failures).
    """
    checks = 0
    failures = 0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        n = int(rng.integers(2, n_max + 1))
        k = int(rng.integers(0, k_max + 1))
        tfrac = float(rng.random())
        inst = generate("uniform", n, k, tfrac, seed=int(rng.integers(0, 2**31)))
        baseline = decide(inst)
        result = kernelize(inst)
        trial_fail = 0
        last = inst
        for rec, before, after, status in iter_replay(inst, result.trace):
            checks += 1
            if status is not None:
                if decide(before) != (status is Status.TRIVIAL_YES):
                    trial_fail += 1
                    print(f"trial {trial}: rule {rec.rule} verdict disagrees "
                          f"with the oracle", file=out)
            else:
                if decide(before) != decide(after):
                    trial_fail += 1
                    print(f"trial {trial}: rule {rec.rule} changed the answer",
                          file=out)
                last = after
        if result.status is Status.REDUCED:
            checks += 1
            if replay_trace(inst, result.trace)[1] != result.instance:
                raise SfastError("trace replay does not reproduce the result")
            if decide(result.instance) != baseline:
                trial_fail += 1
                print(f"trial {trial}: pipeline changed the answer", file=out)
        else:
            checks += 1
            if baseline != (result.status is Status.TRIVIAL_YES):
                trial_fail += 1
                print(f"trial {trial}: final verdict disagrees with the oracle",
                      file=out)
        failures += trial_fail
    return checks, failures


def cmd_xcheck(args) -> int:
    checks, failures = run_xcheck(args.n_max, args.k_max, args.trials, args.seed)
    print(f"trials {args.trials} checks {checks} failures {failures}")
    return 0 if failures == 0 else 3


# --------------------------------------------------------------------- main


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sfast", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance file")
    p.add_argument("--model", choices=["uniform", "planted"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tfrac", type=float, default=0.0)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("kernelize", help="reduce an instance, write trace")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--provider", choices=["heuristic", "exact"], default="heuristic")
    p.add_argument("--trace")
    p.add_argument("--out")
    p.set_defaults(func=cmd_kernelize)

    p = sub.add_parser("solve", help="print the optimum and a witness")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--method", choices=["subset", "branch", "order"], default="subset")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a witness file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--witness", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("xcheck", help="randomized rule-safety cross-check")
    p.add_argument("--n-max", type=int, default=9)
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_xcheck)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (ParseError, BadParameters, TooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SfastError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
