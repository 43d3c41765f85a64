"""Command-line front end: JSON problem files in, deterministic reports out.

Matrices travel as arrays of arrays of decimal strings so arbitrary
precision survives transport; reports embed the library version and the
resolved configuration, and identical input plus seed yields byte-identical
JSON.  Exit codes: 0 positive verdict, 1 negative verdict, 2 invalid input,
3 resource cutoff.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .finring import (
    FiniteRing,
    KernelInfinite,
    NotSplit,
    NotSurjective,
    NotUnit,
    RingSurjection,
    TooLarge,
    lift_unit,
    order_to_ring,
)
from .hodge import (
    BrauerClass,
    ClassTerm,
    GradedHodgeObject,
    HodgeObject,
    K3Model,
    NotSurjectiveBrauer,
    RatOp,
    brauer_kernel,
    hdg_class_reduce,
    hs_hom,
    scalar_sublattice_test,
    verify_blowup_relation,
)
from .k0 import (
    IsoConstructed,
    NoIso,
    NotApplicable,
    enumerate_idempotents_conj,
    iso_from_stable,
    retract_certificate,
    stable_iso_probe,
)
from .linalg import IntMatrix
from .modp import k0_class_fp, fingerprint
from .orders import LatticeModule, Order, hom_group, tensor_fp, validate_order
from .quadratic import RealQuadraticField, SearchBoundExceeded, md_orbit_count

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# JSON (de)serialization helpers
# ---------------------------------------------------------------------------

def _to_int(x) -> int:
    if isinstance(x, bool):
        raise InputError("booleans are not integers")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x, 10)
        except ValueError as exc:
            raise InputError(f"bad integer literal {x!r}") from exc
    raise InputError(f"expected an integer or decimal string, got {type(x).__name__}")


def parse_matrix(data) -> IntMatrix:
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise InputError("matrix must be an array of arrays")
    return IntMatrix([[_to_int(x) for x in row] for row in data])


def dump_matrix(m: IntMatrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in m.data]


def parse_vector(data) -> tuple[int, ...]:
    if not isinstance(data, list):
        raise InputError("vector must be an array")
    return tuple(_to_int(x) for x in data)


def parse_order(data) -> Order:
    if not isinstance(data, dict) or "table" not in data or "unit" not in data:
        raise InputError("order needs 'table' and 'unit'")
    table = [[parse_vector(cell) for cell in row] for row in data["table"]]
    return validate_order(table, parse_vector(data["unit"]))


def parse_module(order: Order, data) -> LatticeModule:
    if not isinstance(data, dict) or "actions" not in data:
        raise InputError("module needs 'actions'")
    actions = [parse_matrix(m) for m in data["actions"]]
    return LatticeModule(order, actions)


def parse_hodge_object(data) -> HodgeObject:
    if not isinstance(data, dict):
        raise InputError("hodge object must be an object")
    weight = _to_int(data.get("weight", 0))
    rank = _to_int(data["rank"])
    constraints = []
    for c in data.get("constraints", []):
        num = parse_matrix(c["num"])
        den = _to_int(c.get("den", 1))
        constraints.append(RatOp(num, den))
    gram = parse_matrix(data["gram"]) if data.get("gram") is not None else None
    return HodgeObject(weight, rank, constraints, gram)


def parse_graded(data) -> GradedHodgeObject:
    """Weight -> hodge object, or weight -> list of summands (the list form
    records the direct-sum structure, which class reduction can cancel)."""
    if not isinstance(data, dict):
        raise InputError("graded object must map weights to hodge objects")
    comps = {}
    for w, h in data.items():
        weight = _to_int(w)
        if isinstance(h, list):
            if not h:
                continue
            parts = [parse_hodge_object(x).with_weight(weight) for x in h]
            obj = parts[0]
            for part in parts[1:]:
                obj = obj.direct_sum(part)
        else:
            obj = parse_hodge_object(h).with_weight(weight)
        comps[weight] = obj
    return GradedHodgeObject(comps)


def parse_finring(data) -> FiniteRing:
    if not isinstance(data, dict):
        raise InputError("ring must be an object")
    if "order" in data:
        return order_to_ring(parse_order(data["order"]))
    if "moduli" not in data or "table" not in data or "unit" not in data:
        raise InputError("ring needs 'moduli', 'table' and 'unit'")
    table = [[parse_vector(cell) for cell in row] for row in data["table"]]
    return FiniteRing(parse_vector(data["moduli"]), table, parse_vector(data["unit"]))


def _pair_of_modules(doc):
    """X, Y either as lattice modules over one order, or as Hodge objects."""
    if "order" in doc:
        order = parse_order(doc["order"])
        mods = doc.get("modules", {})
        if "X" not in mods or "Y" not in mods:
            raise InputError("need modules 'X' and 'Y'")
        return parse_module(order, mods["X"]), parse_module(order, mods["Y"]), "order"
    if "hodge_objects" in doc:
        objs = doc["hodge_objects"]
        if "X" not in objs or "Y" not in objs:
            raise InputError("need hodge objects 'X' and 'Y'")
        return parse_hodge_object(objs["X"]), parse_hodge_object(objs["Y"]), "hodge"
    raise InputError("input must carry 'order'+'modules' or 'hodge_objects'")


# ---------------------------------------------------------------------------
# subcommand implementations: return (payload dict, exit code)
# ---------------------------------------------------------------------------

def cmd_hom(doc, cfg):
    X, Y, kind = _pair_of_modules(doc)
    H = hom_group(X, Y) if kind == "order" else hs_hom(X, Y)
    payload = {
        "kind": kind,
        "hom_rank": H.rank,
        "basis": [dump_matrix(b) for b in H.basis],
    }
    return payload, EXIT_OK


def cmd_retract(doc, cfg):
    X, Y, kind = _pair_of_modules(doc)
    cert = retract_certificate(X, Y)
    if cert is None:
        return {"kind": kind, "retract": False}, EXIT_NEGATIVE
    payload = {
        "kind": kind,
        "retract": True,
        "n": cert.n,
        "f": dump_matrix(cert.f),
        "g": dump_matrix(cert.g),
    }
    return payload, EXIT_OK


def cmd_iso(doc, cfg):
    X, Y, kind = _pair_of_modules(doc)
    res = iso_from_stable(X, Y)
    if isinstance(res, IsoConstructed):
        return {
            "kind": kind,
            "verdict": "IsoConstructed",
            "matrix": dump_matrix(res.matrix),
            "det": str(res.matrix.det()),
        }, EXIT_OK
    if isinstance(res, NoIso):
        payload = {"kind": kind, "verdict": "NoIso", "reason": res.reason, "hom_rank": res.hom_rank}
        if res.generator_det is not None:
            payload["generator_det"] = str(res.generator_det)
        return payload, EXIT_NEGATIVE
    assert isinstance(res, NotApplicable)
    payload = {"kind": kind, "verdict": "NotApplicable", "reason": res.reason}
    if res.end_rank is not None:
        payload["end_rank"] = res.end_rank
    return payload, EXIT_NEGATIVE


def cmd_probe(doc, cfg):
    X, Y, kind = _pair_of_modules(doc)
    if kind != "order":
        raise InputError("probe works on lattice modules over an order")
    report = stable_iso_probe(X, Y, prime_bound=cfg["prime_bound"], seed=cfg["seed"])
    payload = {
        "verdict": report.verdict,
        "primes": [{"p": v.p, "isomorphic": v.isomorphic} for v in report.prime_verdicts],
        "retract_x_of_y_terms": report.retract_x_of_y,
        "retract_y_of_x_terms": report.retract_y_of_x,
        "min_generators_end": report.min_generators_end,
        "min_generators_hom": report.min_generators_hom,
        "proof_of_equal_classes": report.is_proof_of_equal_classes,
    }
    if report.obstruction_prime is not None:
        payload["obstruction_prime"] = report.obstruction_prime
    if report.iso_matrix is not None:
        payload["iso_matrix"] = dump_matrix(report.iso_matrix)
    code = EXIT_NEGATIVE if report.verdict == "ObstructionFound" else EXIT_OK
    return payload, code


def cmd_decomp_p(doc, cfg):
    if "order" not in doc:
        raise InputError("decomp-p needs 'order' and module 'X'")
    order = parse_order(doc["order"])
    mods = doc.get("modules", {})
    if "X" not in mods:
        raise InputError("decomp-p needs module 'X'")
    X = parse_module(order, mods["X"])
    p = cfg.get("prime")
    if p is None:
        raise InputError("decomp-p needs --prime")
    M = tensor_fp(X, p)
    cls = k0_class_fp(M, seed=cfg["seed"])
    entries = []
    for rep, mult in cls.entries:
        entries.append(
            {
                "dim": rep.dim,
                "multiplicity": mult,
                "fingerprint": str(fingerprint(rep)),
                "actions": [[[str(int(x)) for x in row] for row in a] for a in rep.actions],
            }
        )
    return {"p": p, "total_dim": M.dim, "summands": entries}, EXIT_OK


def cmd_idempotents(doc, cfg):
    ring = parse_finring(doc.get("ring", doc))
    cutoff = _to_int(doc.get("cutoff", 10 ** 6))
    reps = enumerate_idempotents_conj(ring, cutoff)
    return {
        "count": len(reps),
        "representatives": [[str(c) for c in rep] for rep in reps],
    }, EXIT_OK


def cmd_blowup_check(doc, cfg):
    graded = doc.get("graded", {})
    for name in ("X", "Y", "Z", "E"):
        if name not in graded:
            raise InputError(f"blowup-check needs graded object {name!r}")
    c = _to_int(doc.get("codimension", 1))
    report = verify_blowup_relation(
        parse_graded(graded["X"]),
        parse_graded(graded["Y"]),
        parse_graded(graded["Z"]),
        parse_graded(graded["E"]),
        c,
    )
    payload = {
        "ok": report.ok,
        "exceptional_ok": report.exceptional_ok,
        "total_ok": report.total_ok,
        "class_identity_ok": report.class_identity_ok,
        "failing_weights": report.failing_weights,
    }
    return payload, EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_class_reduce(doc, cfg):
    terms = []
    for t in doc.get("terms", []):
        terms.append(
            ClassTerm(
                _to_int(t.get("coeff", 1)),
                parse_graded(t["graded"]),
                _to_int(t.get("l_exp", 0)),
            )
        )
    red = hdg_class_reduce(terms)
    def atom_payload(pair):
        w, h = pair
        return {"weight": w, "rank": h.rank}
    return {
        "zero": red.is_zero(),
        "cancellations": red.cancellations,
        "positives": [atom_payload(p) for p in red.positives],
        "negatives": [atom_payload(p) for p in red.negatives],
    }, EXIT_OK


def cmd_k3_kernel(doc, cfg):
    if "k3" not in doc or "brauer" not in doc:
        raise InputError("k3-kernel needs 'k3' and 'brauer'")
    T = parse_hodge_object(doc["k3"]["T"])
    model = K3Model(T, _to_int(doc["k3"].get("ns_rank", 0)))
    b = doc["brauer"]
    alpha = BrauerClass(_to_int(b["n"]), parse_vector(b["vector"]))
    out = brauer_kernel(model, alpha)
    return {
        "n": alpha.n,
        "rank": out.rank,
        "gram": dump_matrix(out.gram),
        "det": str(out.gram.det()),
        "det_ratio": str(out.gram.det() // model.D),
        "constraints": [
            {"num": dump_matrix(c.num), "den": str(c.den)} for c in out.constraints
        ],
    }, EXIT_OK


def cmd_scalar_test(doc, cfg):
    if "hodge" not in doc or "sublattice" not in doc:
        raise InputError("scalar-test needs 'hodge' and 'sublattice'")
    T = parse_hodge_object(doc["hodge"])
    S = parse_matrix(doc["sublattice"])
    k, report = scalar_sublattice_test(T, [list(r) for r in S.data])
    payload = {
        "k": k,
        "index": str(report["index"]),
        "end_trivial": report["end_trivial"],
        "verdict": report["verdict"],
    }
    return payload, EXIT_OK if k is not None else EXIT_NEGATIVE


def cmd_md_count(doc, cfg):
    if "d" not in doc or "D" not in doc:
        raise InputError("md-count needs 'd' and 'D'")
    F = RealQuadraticField(_to_int(doc["d"]))
    factor = cfg["search_factor"] if cfg["search_factor"] is not None else _to_int(doc.get("search_factor", 10))
    report = md_orbit_count(F, _to_int(doc["D"]), search_factor=factor)
    return {
        "d": report.d,
        "D": report.D,
        "count": report.count,
        "bound": report.bound,
        "primes": [{"p": p, "splitting": s, "ord": o} for (p, s, o) in report.primes],
        "verdicts": [
            {
                "exponents": list(v.exponents),
                "principal": v.principal,
                "generator": [str(c) for c in v.generator] if v.generator else None,
                "denominator": str(v.denominator),
            }
            for v in report.verdicts
        ],
    }, EXIT_OK


def cmd_unit_lift(doc, cfg):
    for k in ("source", "target", "matrix", "unit"):
        if k not in doc:
            raise InputError(f"unit-lift needs {k!r}")
    src = parse_finring(doc["source"])
    tgt = parse_finring(doc["target"])
    f = RingSurjection(src, tgt, parse_matrix(doc["matrix"]))
    u = parse_vector(doc["unit"])
    x = lift_unit(f, u)
    return {
        "lift": [str(c) for c in x],
        "maps_to": [str(c) for c in f.apply(x)],
    }, EXIT_OK


COMMANDS = {
    "hom": cmd_hom,
    "retract": cmd_retract,
    "iso": cmd_iso,
    "probe": cmd_probe,
    "decomp-p": cmd_decomp_p,
    "idempotents": cmd_idempotents,
    "blowup-check": cmd_blowup_check,
    "class-reduce": cmd_class_reduce,
    "k3-kernel": cmd_k3_kernel,
    "scalar-test": cmd_scalar_test,
    "md-count": cmd_md_count,
    "unit-lift": cmd_unit_lift,
}


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n")
        return
    def flatten(prefix, obj):
        if isinstance(obj, dict):
            for k in sorted(obj):
                yield from flatten(f"{prefix}{k}." if prefix else f"{k}.", obj[k]) if isinstance(obj[k], (dict, list)) else [(f"{prefix}{k}", obj[k])]
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                yield from flatten(f"{prefix}{i}.", v) if isinstance(v, (dict, list)) else [(f"{prefix}{i}", v)]
        else:
            yield (prefix.rstrip("."), obj)
    for key, val in flatten("", report):
        sys.stdout.write(f"{key} = {val}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="k0lat",
        description="lattice K0 certificates, mod-p decomposition, Hodge-lattice "
        "bookkeeping and real-quadratic-field counts",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--input", required=True, help="JSON problem file")
    parser.add_argument("--prime", type=int, default=None)
    parser.add_argument("--prime-bound", type=int, default=100)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--search-factor", type=int, default=None)
    parser.add_argument("--format", choices=("json", "text"), default="json")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = args.seed
    if seed is None:
        env = os.environ.get("K0LAT_SEED")
        seed = int(env) if env else 0
    cfg = {
        "seed": seed,
        "prime": args.prime,
        "prime_bound": args.prime_bound,
        "search_factor": args.search_factor,
    }
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read problem file: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = {
        "version": __version__,
        "command": args.command,
        "config": {k: v for k, v in sorted(cfg.items())},
    }
    try:
        payload, code = COMMANDS[args.command](doc, cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (TooLarge, SearchBoundExceeded) as exc:
        print(f"resource cutoff: {exc}", file=sys.stderr)
        report["cutoff"] = str(exc)
        _emit(report, args.format)
        return EXIT_RESOURCE
    except (NotSurjective, NotUnit, KernelInfinite, NotSplit, NotSurjectiveBrauer) as exc:
        print(f"negative verdict: {exc}", file=sys.stderr)
        report["verdict"] = type(exc).__name__
        report["detail"] = str(exc)
        _emit(report, args.format)
        return EXIT_NEGATIVE
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report.update(payload)
    _emit(report, args.format)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
