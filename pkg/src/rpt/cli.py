"""Batch command-line surface.

Subcommands: count, check, extract, keylemma, theorem, counterexample,
constants, oracle.  All fractions are parsed exactly ('p/q' or decimal
strings); graph inputs are edge-list or graph6 (auto-detected); output
is human-readable by default and deterministic JSON with --json.

Exit codes: 0 verified success, 2 a check that verified false, 1 errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import serialize
from .adversarial import (
    HardInstanceSpec,
    exact_n_restricted,
    generate_hard_graph,
    min_removal_oracle,
    naive_count,
    verify_hard_graph,
)
from .assembly import (
    LengthenParams,
    PathPartition,
    RemovalResult,
    run_main_theorem,
    verify_path_partition,
    verify_restricted_partition,
)
from .extraction import (
    ExtractionBudget,
    extract_restricted_exact,
    find_low_or_high_density_subset,
    peel_chain,
    phi,
)
from .graph import (
    Graph,
    Pattern,
    count_induced_copies,
    edge_density,
    load_graph_text,
    mask_from_ids,
    named_pattern,
    to_edge_list,
)
from .keypartition import BlowupFound, KeyParams, run_key_lemma
from .ledger import build_ledger
from .predicates import is_full_pair, is_restricted, verify_blowup
from .values import parse_fraction


@dataclass
class CommandPlan:
    subcommand: str
    args: argparse.Namespace
    seed: int
    json_mode: bool
    mode: str
    threads: int


def _fraction(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load_graph(path: str) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return load_graph_text(fh.read())


def _load_pattern(spec: str) -> Pattern:
    if os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            return Pattern.of(load_graph_text(fh.read()))
    return named_pattern(spec)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=["paper", "practical"], default="practical")
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker cap (falls back to RPT_THREADS; operations are "
        "deterministic regardless)",
    )
    top = argparse.ArgumentParser(
        prog="rpt",
        description="count induced copies, verify certificates, and run the "
        "removal/partition pipeline",
    )
    sub = top.add_subparsers(dest="subcommand", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, parents=[common])

    c = add("count", "number of induced copies of a pattern")
    c.add_argument("--graph", required=True)
    c.add_argument("--pattern", required=True)

    k = add("check", "verify a certificate JSON against a graph")
    k.add_argument("--graph", required=True)
    k.add_argument("--cert", required=True)

    e = add("extract", "density / restricted / peel extraction")
    e.add_argument("--graph", required=True)
    e.add_argument("--pattern", required=True)
    e.add_argument("--op", choices=["density", "restricted", "peel"], required=True)
    e.add_argument("--eps", type=_fraction, default=Fraction(1, 4))
    e.add_argument("--eps2", type=_fraction, default=None)
    e.add_argument("--delta", type=_fraction, default=Fraction(1, 8))
    e.add_argument("--eta", type=_fraction, default=Fraction(1, 4))
    e.add_argument("--depth", type=int, default=None)

    kl = add("keylemma", "run the working-partition iteration")
    kl.add_argument("--graph", required=True)
    kl.add_argument("--pattern", required=True)
    kl.add_argument("--eps", type=_fraction, default=Fraction(1, 4))
    kl.add_argument("--eta", type=_fraction, default=Fraction(1, 4))
    kl.add_argument("--theta", type=_fraction, default=Fraction(1, 4))
    kl.add_argument("--d", type=int, required=True)
    kl.add_argument("--delta-prime", type=_fraction, default=None)
    kl.add_argument("--transcript", action="store_true", help="emit step records")

    t = add("theorem", "remove <= d vertices, partition the rest")
    t.add_argument("--graph", required=True)
    t.add_argument("--pattern", required=True)
    t.add_argument("--eps", type=_fraction, default=Fraction(1, 4))
    t.add_argument("--d", type=int, required=True)
    t.add_argument("--delta-prime", type=_fraction, default=None)

    x = add("counterexample", "generate a verified hard instance")
    x.add_argument("--big-n", type=int, default=1, help="restriction budget N")
    x.add_argument("--m", type=int, required=True)
    x.add_argument("--n", type=int, required=True)
    x.add_argument("--eps", type=_fraction, default=Fraction(1, 20))
    x.add_argument("--pattern", default="K2")
    x.add_argument("--allow-small-core", action="store_true")
    x.add_argument("--out", default=None, help="write the edge list here")

    n = add("constants", "dump the constants ledger")
    n.add_argument("--h", type=int, required=True)
    n.add_argument("--eps", type=_fraction, required=True)
    n.add_argument("--eta", type=_fraction, required=True)
    n.add_argument("--theta", type=_fraction, required=True)

    o = add("oracle", "exhaustive baselines on small graphs")
    o.add_argument("--graph", default=None)
    o.add_argument("--pattern", default=None)
    o.add_argument(
        "--op", choices=["count", "n-restricted", "min-removal"], required=True
    )
    o.add_argument("--n-parts", type=int, default=2)
    o.add_argument("--eps", type=_fraction, default=Fraction(1, 4))
    o.add_argument("--sweep", type=int, default=None, help="CSV over this many seeds")
    o.add_argument("--sweep-n", type=int, default=7)
    o.add_argument("--sweep-p", type=_fraction, default=Fraction(1, 2))
    return top


def parse_args(argv) -> CommandPlan:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("RPT_THREADS", "1"))
    if threads < 1:
        parser.error("--threads must be >= 1")
    if args.mode == "paper" and getattr(args, "delta_prime", None) is not None:
        parser.error("paper mode forbids overriding ledger-defined parameters")
    return CommandPlan(args.subcommand, args, args.seed, args.json, args.mode, threads)


def _emit(plan: CommandPlan, payload: dict, human: str) -> None:
    if plan.json_mode:
        print(serialize.dumps(payload))
    else:
        print(human)


def _cmd_count(plan: CommandPlan) -> int:
    g = _load_graph(plan.args.graph)
    pat = _load_pattern(plan.args.pattern)
    value = count_induced_copies(g, pat)
    _emit(
        plan,
        {"kind": "count", "value": str(value), "n": g.n, "h": pat.size},
        f"ind = {value} (graph on {g.n} vertices, pattern on {pat.size})",
    )
    return 0


def _check_key_result(g: Graph, obj: dict) -> tuple[bool, str]:
    """Re-verify an exported working-partition result clause by clause."""
    from math import comb

    from rpt.graph import mask_from_ids

    eps = parse_fraction(obj["eps"])
    eta = parse_fraction(obj["eta"])
    theta = parse_fraction(obj["theta"])
    h = int(obj["h"])
    removed = mask_from_ids(obj["S"])
    if removed.bit_count() > int(obj["d"]):
        return False, "removed set exceeds d"
    if len(obj["A"]) != len(obj["B"]):
        return False, "pair rows have unequal lengths"
    if len(obj["A"]) > comb(h, 2):
        return False, "more pairs than C(h,2)"
    union = removed
    for idx, (a_ids, b_ids) in enumerate(zip(obj["A"], obj["B"])):
        a, b = mask_from_ids(a_ids), mask_from_ids(b_ids)
        if not a or not b:
            return False, f"pair {idx} has an empty side"
        if (a | b) & union or a & b:
            return False, f"pair {idx} overlaps earlier sets"
        union |= a | b
        if not is_restricted(g, a, eps):
            return False, f"pair {idx}: A not eps-restricted"
        if b.bit_count() > eta * a.bit_count():
            return False, f"pair {idx}: B larger than eta*|A|"
        if not is_tight_to(g, a, b, theta, "tight").ok:
            return False, f"pair {idx}: B not theta-tight to A"
    for idx, c_ids in enumerate(obj["C"]):
        c = mask_from_ids(c_ids)
        if not c or c & union:
            return False, f"single {idx} empty or overlapping"
        union |= c
        if not is_restricted(g, c, eps):
            return False, f"single {idx} not eps-restricted"
    if union != g.full_mask:
        return False, "sets do not cover V(G)"
    if "delta_prime" in obj and "eta_prime" in obj:
        bound = comb(h, 2) + (h - 1) * phi(
            parse_fraction(obj["delta_prime"]), parse_fraction(obj["eta_prime"])
        )
        if len(obj["C"]) > bound:
            return False, f"single count exceeds N = {bound}"
    return True, ""


def _cmd_check(plan: CommandPlan) -> int:
    g = _load_graph(plan.args.graph)
    with open(plan.args.cert, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    kind = obj.get("kind")
    ok = False
    detail = ""
    if kind == "full_pair":
        cert = serialize.full_pair_from_json(obj)
        res = is_full_pair(g, cert, method="exact")
        ok = res.ok
        if not ok:
            detail = f"violating subpair a={serialize.ids(res.witness_a)} b={serialize.ids(res.witness_b)}"
    elif kind == "blowup":
        cert = serialize.blowup_from_json(obj)
        res = verify_blowup(g, cert)
        ok = res.ok
        if not ok:
            detail = f"failing pair {res.failing_pair}"
    elif kind == "restricted_partition":
        part = serialize.restricted_partition_from_json(obj)
        ok, why = verify_restricted_partition(g, part)
        detail = why or ""
    elif kind == "path_partition":
        pp = serialize.path_partition_from_json(obj)
        rep = verify_path_partition(g, pp)
        ok = rep.ok
        detail = rep.clause or ""
    elif kind == "removal_result":
        res = serialize.removal_result_from_json(obj)
        try:
            res.verify(g)
            ok = True
        except AssertionError as exc:
            detail = str(exc)
    elif kind == "key_lemma_result":
        ok, detail = _check_key_result(g, obj)
    elif kind == "blowup_found":
        from .embedding import blowup_copy_bound
        from .graph import count_embeddings_into_parts

        cert = serialize.blowup_from_json(obj["certificate"])
        res = verify_blowup(g, cert)
        ok = res.ok
        if not ok:
            detail = f"failing pair {res.failing_pair}"
        else:
            count = count_embeddings_into_parts(g, cert.pattern, cert.parts)
            if str(count) != obj["copy_count"]:
                ok, detail = False, "copy count does not match a recount"
            elif count < parse_fraction(obj["copy_bound"]):
                ok, detail = False, "copy count below the stated bound"
    elif kind == "peel_chain":
        data = serialize.peel_chain_from_json(obj)
        ok = True
        union = data["leftover"]
        for idx, peel in enumerate(data["peels"]):
            if peel & union or not is_restricted(g, peel, data["eps"]):
                ok, detail = False, f"peel {idx} overlaps or is not restricted"
                break
            union |= peel
        if ok and union != g.full_mask:
            ok, detail = False, "peels plus leftover do not cover V(G)"
        if ok and data["leftover"].bit_count() > data["eta"] * g.n:
            ok, detail = False, "leftover exceeds eta |G|"
        if ok and data["phi_bound"] != phi(data["delta"], data["eta"]):
            ok, detail = False, "phi bound does not match its parameters"
        if ok and len(data["peels"]) > data["phi_bound"]:
            ok, detail = False, "more peels than phi(delta, eta)"
    else:
        raise ValueError(f"unknown certificate kind {kind!r}")
    _emit(
        plan,
        {"kind": "check_result", "certificate": kind, "ok": ok, "detail": detail},
        f"{kind}: {'VERIFIED' if ok else 'FAILED'}" + (f" ({detail})" if detail else ""),
    )
    return 0 if ok else 2


def _cmd_extract(plan: CommandPlan) -> int:
    args = plan.args
    g = _load_graph(args.graph)
    pat = _load_pattern(args.pattern)
    if args.op == "density":
        eps2 = args.eps2 if args.eps2 is not None else args.eps
        if plan.mode == "paper":
            budget = ExtractionBudget.exact_schedule(pat.size, args.eps, eps2)
        else:
            from .extraction import depth_for

            depth = args.depth if args.depth is not None else depth_for(min(args.eps, eps2))
            budget = ExtractionBudget.practical(args.eps, eps2, depth, h=pat.size)
        res = find_low_or_high_density_subset(g, pat, budget)
        payload = {
            "kind": "density_subset",
            "vertices": serialize.ids(res.vertices),
            "side": res.side,
            "guaranteed": res.guaranteed,
            "density": serialize.frac(edge_density(g, res.vertices)),
        }
        _emit(
            plan,
            payload,
            f"{res.side}-density subset of size {res.vertices.bit_count()} "
            f"(guaranteed: {res.guaranteed})",
        )
        return 0
    if args.op == "restricted":
        if plan.mode == "paper":
            raise RuntimeError(
                "exact-schedule sizes are below one vertex at this scale; "
                "use practical mode with --delta"
            )
        t = extract_restricted_exact(g, pat, args.eps, args.delta, depth=args.depth)
        payload = {
            "kind": "restricted_set",
            "vertices": serialize.ids(t),
            "eps": serialize.frac(args.eps),
            "size": t.bit_count(),
        }
        _emit(plan, payload, f"eps-restricted set of size {t.bit_count()}")
        return 0
    pc = peel_chain(g, pat, args.eps, args.eta, args.delta)
    _emit(
        plan,
        serialize.peel_chain_to_json(pc),
        f"{pc.length} peels, leftover {pc.leftover.bit_count()} "
        f"(phi bound {pc.phi_bound}, guaranteed: {pc.guaranteed})",
    )
    return 0


def _key_params(plan: CommandPlan, pat: Pattern, g: Graph) -> KeyParams:
    args = plan.args
    if plan.mode == "paper":
        return KeyParams.paper(pat, args.eps, args.eta, args.theta)
    dp = getattr(args, "delta_prime", None)
    if dp is None:
        dp = Fraction(1, max(8, g.n))
    return KeyParams.practical(
        pat, args.eps, eta=args.eta, theta=args.theta, delta_prime=dp
    )


def _cmd_keylemma(plan: CommandPlan) -> int:
    args = plan.args
    g = _load_graph(args.graph)
    pat = _load_pattern(args.pattern)
    params = _key_params(plan, pat, g)
    res = run_key_lemma(g, pat, params, args.d)
    if isinstance(res, BlowupFound):
        payload = serialize.blowup_found_to_json(res)
        _emit(
            plan,
            payload,
            f"blowup found: {res.copy_count} labeled copies (bound {res.copy_bound})",
        )
        return 0
    payload = serialize.key_result_to_json(res)
    if args.transcript:
        payload["transcript"] = [serialize.step_record_to_json(r) for r in res.transcript]
    human = (
        f"removed {res.removed.bit_count()} <= d={args.d}; "
        f"{len(res.pairs)} pairs, {len(res.singles)} singles"
    )
    if args.transcript and not plan.json_mode:
        # one JSON line per step so the run can be re-verified externally
        human += "\n" + "\n".join(
            serialize.dumps(serialize.step_record_to_json(r)) for r in res.transcript
        )
    _emit(plan, payload, human)
    return 0


def _cmd_theorem(plan: CommandPlan) -> int:
    args = plan.args
    g = _load_graph(args.graph)
    pat = _load_pattern(args.pattern)
    if plan.mode == "paper":
        key = KeyParams.paper(pat, args.eps, Fraction(1, pat.size**2), args.eps / 12)
        params = LengthenParams.practical(pat, args.eps, key=key)
    else:
        dp = getattr(args, "delta_prime", None) or Fraction(1, max(8, g.n))
        key = KeyParams.practical(pat, args.eps, delta_prime=dp)
        params = LengthenParams.practical(pat, args.eps, key=key)
    res = run_main_theorem(g, pat, args.eps, args.d, params)
    _emit(
        plan,
        serialize.removal_result_to_json(res),
        f"removed {res.removed.bit_count()} <= d={args.d}; "
        f"{len(res.partition.parts)} eps-restricted parts (bound {res.partition.bound})",
    )
    return 0


def _cmd_counterexample(plan: CommandPlan) -> int:
    args = plan.args
    spec = HardInstanceSpec(
        restriction_budget=args.big_n,
        core_size=args.m,
        total_size=args.n,
        eps=args.eps,
        pattern=_load_pattern(args.pattern),
        seed=plan.seed,
        allow_small_core=args.allow_small_core,
    )
    inst = generate_hard_graph(spec)
    report = verify_hard_graph(inst, count_induced_copies)
    edge_list = to_edge_list(inst.graph)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(edge_list)
    payload = {
        "kind": "hard_instance",
        "core": serialize.ids(inst.core),
        "spec": {
            "N": args.big_n,
            "m": args.m,
            "n": args.n,
            "eps": serialize.frac(args.eps),
            "pattern": args.pattern,
            "seed": plan.seed,
        },
        "resamples": inst.resamples,
        "core_exactly_verified": inst.core_exactly_verified,
        "verified_clauses": report["clauses"],
        "ok": report["ok"],
    }
    if not args.out:
        payload["edge_list"] = edge_list
    _emit(
        plan,
        payload,
        f"hard instance on {args.n} vertices (core {args.m}), "
        f"verification {'OK' if report['ok'] else 'FAILED'}",
    )
    return 0 if report["ok"] else 2


def _cmd_constants(plan: CommandPlan) -> int:
    args = plan.args
    led = build_ledger(args.h, args.eps, args.eta, args.theta)
    payload = {"kind": "constants", "h": args.h, "entries": led.as_dict()}
    lines = [f"{name}: {entry.describe()}" for name, entry in led.entries.items()]
    _emit(plan, payload, "\n".join(lines))
    return 0


def _cmd_oracle(plan: CommandPlan) -> int:
    args = plan.args
    if args.sweep is not None:
        rows = ["seed,n,value"]
        for seed in range(args.sweep):
            rng = random.Random(seed)
            n = args.sweep_n
            g = Graph.from_edges(
                n,
                [
                    (u, v)
                    for u in range(n)
                    for v in range(u + 1, n)
                    if rng.random() < args.sweep_p
                ],
            )
            if args.op == "count":
                value = naive_count(g, _load_pattern(args.pattern or "K2"))
            elif args.op == "n-restricted":
                value = int(exact_n_restricted(g, args.n_parts, args.eps)[0])
            else:
                value = min_removal_oracle(g, args.n_parts, args.eps)[0]
            rows.append(f"{seed},{n},{value}")
        body = "\n".join(rows)
        if plan.json_mode:
            print(serialize.dumps({"kind": "oracle_sweep", "csv": body}))
        else:
            print(body)
        return 0
    if not args.graph:
        raise ValueError("oracle needs --graph (or --sweep)")
    g = _load_graph(args.graph)
    if args.op == "count":
        value = naive_count(g, _load_pattern(args.pattern or "K2"))
        _emit(plan, {"kind": "oracle_count", "value": str(value)}, f"naive count = {value}")
        return 0
    if args.op == "n-restricted":
        ok, parts = exact_n_restricted(g, args.n_parts, args.eps)
        payload = {
            "kind": "oracle_n_restricted",
            "ok": ok,
            "parts": None if parts is None else [serialize.ids(p) for p in parts],
        }
        _emit(plan, payload, f"({args.n_parts}, {args.eps})-restricted: {ok}")
        return 0
    size, removed, parts = min_removal_oracle(g, args.n_parts, args.eps)
    payload = {
        "kind": "oracle_min_removal",
        "size": size,
        "removed": serialize.ids(removed),
        "parts": [serialize.ids(p) for p in parts],
    }
    _emit(plan, payload, f"minimum removal = {size}")
    return 0


_DISPATCH = {
    "count": _cmd_count,
    "check": _cmd_check,
    "extract": _cmd_extract,
    "keylemma": _cmd_keylemma,
    "theorem": _cmd_theorem,
    "counterexample": _cmd_counterexample,
    "constants": _cmd_constants,
    "oracle": _cmd_oracle,
}


def execute_plan(plan: CommandPlan) -> int:
    return _DISPATCH[plan.subcommand](plan)


def main(argv=None) -> int:
    try:
        plan = parse_args(argv if argv is not None else sys.argv[1:])
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return execute_plan(plan)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
