"""JSON forms for certificates and results.

Fractions travel as exact "p/q" strings, vertex sets as sorted id lists,
counts as decimal strings (they outgrow doubles quickly).  Emission is
deterministic: sorted keys, fixed separators, no timestamps.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .assembly import PathPartition, RemovalResult, RestrictedPartition
from .embedding import CopyCount, TightPairWitness
from .extraction import PeelChain
from .graph import Graph, Pattern, mask_from_ids, mask_to_ids
from .keypartition import KeyLemmaResult, StepRecord
from .predicates import BlowupCertificate, FullPairCertificate
from .values import format_fraction, parse_fraction


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def ids(mask: int) -> list[int]:
    return mask_to_ids(mask)


def frac(x: Fraction) -> str:
    return format_fraction(x)


def pattern_to_json(pat: Pattern) -> dict:
    return {
        "n": pat.size,
        "edges": sorted(pat.graph.edges()),
        "order": list(pat.order),
    }


def pattern_from_json(obj: dict) -> Pattern:
    g = Graph.from_edges(obj["n"], [tuple(e) for e in obj["edges"]])
    return Pattern(g, tuple(obj.get("order", range(obj["n"]))))


def full_pair_to_json(cert: FullPairCertificate) -> dict:
    return {
        "kind": "full_pair",
        "a": ids(cert.a),
        "b": ids(cert.b),
        "c": frac(cert.c),
        "eps": frac(cert.eps),
        "polarity": cert.polarity,
    }


def full_pair_from_json(obj: dict) -> FullPairCertificate:
    return FullPairCertificate(
        mask_from_ids(obj["a"]),
        mask_from_ids(obj["b"]),
        parse_fraction(obj["c"]),
        parse_fraction(obj["eps"]),
        obj["polarity"],
    )


def blowup_to_json(cert: BlowupCertificate) -> dict:
    return {
        "kind": "blowup",
        "parts": [ids(p) for p in cert.parts],
        "c": frac(cert.c),
        "eps": frac(cert.eps),
        "pattern": pattern_to_json(cert.pattern),
    }


def blowup_from_json(obj: dict) -> BlowupCertificate:
    return BlowupCertificate(
        tuple(mask_from_ids(p) for p in obj["parts"]),
        parse_fraction(obj["c"]),
        parse_fraction(obj["eps"]),
        pattern_from_json(obj["pattern"]),
    )


def tight_witness_to_json(w: TightPairWitness) -> dict:
    return {
        "kind": "tight_witness",
        "i": w.i,
        "j": w.j,
        "a": ids(w.a),
        "b": ids(w.b),
        "mode": w.mode,
    }


def copy_count_to_json(c: CopyCount) -> dict:
    return {"kind": "copy_count", "count": str(c.count), "bound": frac(c.bound)}


def peel_chain_to_json(pc: PeelChain) -> dict:
    return {
        "kind": "peel_chain",
        "peels": [ids(p) for p in pc.peels],
        "leftover": ids(pc.leftover),
        "eps": frac(pc.eps),
        "eta": frac(pc.eta),
        "delta": frac(pc.delta),
        "phi_bound": pc.phi_bound,
        "guaranteed": pc.guaranteed,
    }


def peel_chain_from_json(obj: dict) -> dict:
    return {
        "peels": [mask_from_ids(p) for p in obj["peels"]],
        "leftover": mask_from_ids(obj["leftover"]),
        "eps": parse_fraction(obj["eps"]),
        "eta": parse_fraction(obj["eta"]),
        "delta": parse_fraction(obj["delta"]),
        "phi_bound": obj["phi_bound"],
    }


def key_result_to_json(res: KeyLemmaResult) -> dict:
    out = {
        "kind": "key_lemma_result",
        "S": ids(res.removed),
        "A": [ids(a) for a, _ in res.pairs],
        "B": [ids(b) for _, b in res.pairs],
        "C": [ids(c) for c in res.singles],
        "d": res.d_budget,
        "h": res.params.h,
        "eps": frac(res.params.eps),
        "eta": frac(res.params.eta),
        "theta": frac(res.params.theta),
    }
    if isinstance(res.params.delta_prime, Fraction) and isinstance(
        res.params.eta_prime, Fraction
    ):
        out["delta_prime"] = frac(res.params.delta_prime)
        out["eta_prime"] = frac(res.params.eta_prime)
    return out


def blowup_found_to_json(found) -> dict:
    return {
        "kind": "blowup_found",
        "certificate": blowup_to_json(found.certificate),
        "copy_count": str(found.copy_count),
        "copy_bound": frac(found.copy_bound),
        "contradiction_checked": found.contradiction_checked,
    }


def step_record_to_json(rec: StepRecord) -> dict:
    return {
        "kind": "step_record",
        "t": rec.t,
        "S": ids(rec.correct_set),
        "finished": rec.finished,
        "L_parts": [ids(x) for x in rec.l_parts],
        "core": ids(rec.core),
        "chain": [ids(x) for x in rec.chain],
        "D_primes": [ids(x) for x in rec.d_primes],
        "P_sets": [ids(x) for x in rec.p_sets],
        "peels": [ids(x) for x in rec.peel_sets],
        "peel_leftover": ids(rec.peel_leftover),
    }


def restricted_partition_to_json(p: RestrictedPartition) -> dict:
    return {
        "kind": "restricted_partition",
        "parts": [ids(x) for x in p.parts],
        "eps": frac(p.eps),
        "N": p.bound,
    }


def restricted_partition_from_json(obj: dict) -> RestrictedPartition:
    return RestrictedPartition(
        tuple(mask_from_ids(x) for x in obj["parts"]),
        parse_fraction(obj["eps"]),
        int(obj["N"]),
    )


def path_partition_to_json(p: PathPartition) -> dict:
    return {
        "kind": "path_partition",
        "blocks": [ids(x) for x in p.blocks],
        "eps": frac(p.eps),
    }


def path_partition_from_json(obj: dict) -> PathPartition:
    return PathPartition(
        tuple(mask_from_ids(x) for x in obj["blocks"]), parse_fraction(obj["eps"])
    )


def removal_result_to_json(r: RemovalResult, verified: bool = True) -> dict:
    return {
        "kind": "removal_result",
        "removed": ids(r.removed),
        "parts": [ids(x) for x in r.partition.parts],
        "eps": frac(r.partition.eps),
        "N": r.partition.bound,
        "d": r.d_budget,
        "verified": verified,
    }


def removal_result_from_json(obj: dict) -> RemovalResult:
    partition = RestrictedPartition(
        tuple(mask_from_ids(x) for x in obj["parts"]),
        parse_fraction(obj["eps"]),
        int(obj["N"]),
    )
    return RemovalResult(mask_from_ids(obj["removed"]), partition, int(obj["d"]))
