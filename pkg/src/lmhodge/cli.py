"""Command-line entry point: JSON problem documents in, JSON reports out.

Exit statuses: 0 definite verdict, 2 undecided, 3 malformed or invalid input,
4 internal assertion (oracle disagreement, weak-fan violation, corpus failure).
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Any, Callable

from . import corpus
from .cones import MarkedCone
from .errors import FormatError, LMHodgeError, OracleDisagreement, UndecidedRMF, WeakFanViolation
from .fans import FanSet, GroupData, check_face_closure, check_fan, check_strong_compat, weakfan_falsify
from .filtration import IncFiltration
from .monodromy import check_admissible, relative_monodromy
from .neron import (
    NeronContext,
    TwoWeightData,
    build_relcomplete_fan,
    compute_B1,
    in_sigma1,
    kummer_type,
    relative_completeness_probe,
    sigma_tau_upsilon,
)
from .orbits import orbit_test
from .serialize import (
    digest,
    dump_cone,
    dump_inc,
    dump_matrix,
    dump_vector,
    load_cone,
    load_dec,
    load_filtered_nilp,
    load_frame,
    load_inc,
    load_matrix,
    load_square,
    parse_document,
    pretty_json,
)

EXIT_OK, EXIT_UNDECIDED, EXIT_FORMAT, EXIT_ASSERT = 0, 2, 3, 4


class Outcome:
    def __init__(self, doc: dict, status: int = EXIT_OK):
        self.doc = doc
        self.status = status


# document helpers ---------------------------------------------------------------

def _field(doc, key, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"missing field {key!r}")
    v = doc[key]
    if kind is not None and not isinstance(v, kind):
        raise FormatError(f"field {key!r} has the wrong type")
    return v


def _payload(doc, kind: str) -> tuple[dict, dict]:
    if not isinstance(doc, dict):
        raise FormatError("a problem document must be a JSON object")
    if doc.get("kind") != kind:
        raise FormatError(f"expected a document of kind {kind!r}, got {doc.get('kind')!r}")
    payload = _field(doc, "payload", dict)
    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise FormatError("options must be an object")
    return payload, options


def _rank(payload) -> int:
    n = _field(payload, "rank", int)
    if n < 0:
        raise FormatError("rank must be non-negative")
    return n


def _cones(payload, W: IncFiltration | None = None) -> list:
    items = _field(payload, "cones", list)
    if not items:
        raise FormatError("the cone list is empty")
    return [load_cone(c, W) for c in items]


def _admissibility_doc(res) -> dict:
    return {"verdict": res.verdict,
            "certificate": [[list(s), dump_inc(M)] for s, M in res.certificate],
            "failure": corpus.encode(res.failure)}


# subcommands ----------------------------------------------------------------------

def cmd_rmf(doc, args) -> Outcome:
    payload, options = _payload(doc, "rmf")
    x = load_filtered_nilp(payload)
    res = relative_monodromy(x, **({"max_rounds": options["max_rounds"]} if "max_rounds" in options else {}))
    out = {"verdict": res.verdict,
           "filtration": dump_inc(res.filtration) if res.filtration is not None else None,
           "witness": corpus.encode(res.witness)}
    return Outcome(out, EXIT_UNDECIDED if res.verdict == "Undecided" else EXIT_OK)


def cmd_admissible(doc, args) -> Outcome:
    payload, _ = _payload(doc, "admissible")
    n = _rank(payload)
    W = load_inc(_field(payload, "W"), n)
    cone = load_cone(_field(payload, "cone"), W)
    if cone.n != n:
        raise FormatError("cone and W have different ranks")
    res = check_admissible(cone, W)
    status = EXIT_UNDECIDED if res.failure and res.failure.get("verdict") == "Undecided" else EXIT_OK
    return Outcome(_admissibility_doc(res), status)


def cmd_orbit(doc, args) -> Outcome:
    payload, options = _payload(doc, "orbit")
    frame = load_frame(_field(payload, "frame"))
    cone = load_cone(_field(payload, "cone"), frame.W)
    F = load_dec(_field(payload, "F"), frame.n)
    mode = options.get("mode", "certified")
    if mode not in ("certified", "sampled", "both"):
        raise FormatError(f"unknown orbit mode {mode!r}")
    rep = orbit_test(frame, cone, F, mode)
    out = {"verdict": rep.verdict, "reason": rep.reason, "transversality": rep.transversality,
           "admissibility": _admissibility_doc(rep.admissibility) if rep.admissibility else None,
           "graded": {str(w): {"verdict": r.verdict, "reason": r.reason}
                      for w, r in sorted(rep.gr_certificates.items()) if hasattr(r, "verdict")}}
    return Outcome(out, EXIT_UNDECIDED if rep.verdict == "Undecided" else EXIT_OK)


def _group(payload, n: int) -> GroupData | None:
    if "group" not in payload:
        return None
    gens = [load_square(g, n) for g in _field(payload["group"], "generators", list)]
    try:
        return GroupData(gens)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def cmd_fan(doc, args) -> Outcome:
    payload, _ = _payload(doc, "fan")
    W = load_inc(payload["W"], _rank(payload)) if "W" in payload else None
    fan = FanSet(_cones(payload, W))
    closure = check_face_closure(fan)
    axiom = check_fan(fan)
    out: dict[str, Any] = {
        "verdict": "Fan" if closure.ok and axiom.ok else "NotFan",
        "face_closure": {"ok": closure.ok, "missing": [dump_cone(c) for c in closure.witnesses]},
        "fan_axiom": {"ok": axiom.ok,
                      "witness": [{"sigma": dump_cone(a), "other": dump_cone(b), "intersection": dump_cone(m)}
                                  for a, b, m in axiom.witnesses]},
    }
    cones = list(fan)
    group = _group(payload, cones[0].n)
    if group is not None:
        rep = check_strong_compat(fan, group)
        out["compatibility"] = {"ok": rep.ok, "compatible": rep.compatible, "strong": rep.strong,
                                "pairs": [list(p) for p in rep.pairs], "rays": [list(r) for r in rep.rays]}
    return Outcome(out)


def cmd_weakfan(doc, args) -> Outcome:
    payload, _ = _payload(doc, "weakfan")
    frame = load_frame(_field(payload, "frame"))
    fan = FanSet(_cones(payload, frame.W))
    cands = [load_dec(F, frame.n) for F in _field(payload, "candidates", list)]
    rep = weakfan_falsify(fan, cands, frame)
    if rep is None:
        return Outcome({"verdict": "NoViolationFound", "candidates": len(cands)})
    return Outcome({"verdict": "Violation", "sigma": dump_cone(rep.sigma),
                    "sigma_prime": dump_cone(rep.sigma_prime), "F_index": rep.F_index})


def _context(payload) -> NeronContext:
    ctx = _field(payload, "context", dict)
    frame = load_frame(_field(ctx, "frame"))
    proj = [load_square(p, frame.n) for p in _field(ctx, "proj", list)]
    try:
        return NeronContext(frame, proj)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _face_and_upsilon(payload, ctx) -> tuple[list[int], Any]:
    face = _field(payload, "face", list)
    if not all(isinstance(j, int) for j in face):
        raise FormatError("face indices must be integers")
    return face, load_square(_field(payload, "upsilon"), ctx.frame.n)


def cmd_sigma_upsilon(doc, args) -> Outcome:
    payload, _ = _payload(doc, "neron-sigma-upsilon")
    ctx = _context(payload)
    face, ups = _face_and_upsilon(payload, ctx)
    return Outcome({"verdict": "Constructed", "cone": dump_cone(sigma_tau_upsilon(ctx, face, ups))})


def cmd_kummer(doc, args) -> Outcome:
    payload, _ = _payload(doc, "neron-kummer")
    ctx = _context(payload)
    face, ups = _face_and_upsilon(payload, ctx)
    sigma = sigma_tau_upsilon(ctx, face, ups)
    res = kummer_type(ctx, sigma)
    return Outcome({"verdict": str(res), "index": res.index, "multiples": res.multiples,
                    "in_sigma1": in_sigma1(ctx, sigma), "cone": dump_cone(sigma)})


def cmd_b1(doc, args) -> Outcome:
    payload, _ = _payload(doc, "neron-b1")
    d = compute_B1(load_matrix(_field(payload, "gamma")))
    return Outcome({"verdict": "Computed", "rank": d.rank,
                    "finite": [[dump_vector(v), k] for v, k in d.finite],
                    "divisible": [dump_vector(v) for v in d.divisible]})


def _two_weight(payload):
    tw = _field(payload, "two_weight", dict)
    a, b = _field(tw, "a", int), _field(tw, "b", int)
    Na, Nb = load_matrix(_field(tw, "Na")), load_matrix(_field(tw, "Nb"))
    L = load_matrix(tw["L"]) if tw.get("L") is not None else None
    try:
        return build_relcomplete_fan(TwoWeightData(a, b, Na, Nb, L))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _window(options, args) -> tuple[int, int]:
    text = args.window or options.get("window", "-3:3")
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except (ValueError, AttributeError):
        raise FormatError(f"window must look like LO:HI, got {text!r}") from None
    if lo > hi:
        raise FormatError("empty window")
    return lo, hi


def cmd_build_fan(doc, args) -> Outcome:
    payload, options = _payload(doc, "neron-build-fan")
    fan = _two_weight(payload)
    lo, hi = _window(options, args)
    xs = [load_matrix([x]).row_list(0) for x in payload.get("x", [[]] if fan.quotient_rank == 0 else [])]
    if not xs:
        raise FormatError("x values are required when X/Y is nonzero")
    cones = []
    for x in xs:
        for n in product(range(lo, hi + 1), repeat=fan.m):
            cones.append({"x": dump_vector(x), "n": list(n), "cone": dump_cone(fan.cone(x, list(n)))})
    return Outcome({"verdict": "Constructed", "X": dump_matrix(fan.X.basis), "Y": dump_matrix(fan.Y.basis),
                    "e": dump_matrix(fan.e), "m": fan.m, "quotient_rank": fan.quotient_rank, "cones": cones})


def cmd_probe(doc, args) -> Outcome:
    payload, _ = _payload(doc, "neron-probe")
    fan = _two_weight(payload)
    probes = [load_cone(p, fan.W) for p in _field(payload, "probes", list)]
    if not all(isinstance(p, MarkedCone) for p in probes):
        raise FormatError("probes must be marked cones")
    results = relative_completeness_probe(fan, probes)
    items = [{"covered": r.covered, "pieces": [list(n) for n, _ in r.pieces],
              "x": dump_vector(r.x) if r.x is not None else None, "failure": r.failure} for r in results]
    ok = all(r.covered for r in results)
    return Outcome({"verdict": "Covered" if ok else "NotCovered", "probes": items})


COMMANDS: dict[str, Callable] = {
    "rmf": cmd_rmf, "admissible": cmd_admissible, "orbit-check": cmd_orbit, "fan-check": cmd_fan,
    "weakfan-falsify": cmd_weakfan,
}
NERON: dict[str, Callable] = {
    "sigma-upsilon": cmd_sigma_upsilon, "kummer": cmd_kummer, "b1": cmd_b1,
    "build-fan": cmd_build_fan, "probe": cmd_probe,
}


def run_corpus(name: str, threads: int) -> Outcome:
    names = list(corpus.NAMES) if name == "all" else [name]
    if any(n not in corpus.ITEMS for n in names):
        raise FormatError(f"unknown corpus item {name!r}")
    if threads > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda n: corpus.corpus_run(n, 1), names))
    else:
        reports = [corpus.corpus_run(n, threads) for n in names]
    ok = all(r.ok for r in reports)
    doc = {"verdict": "PASS" if ok else "FAIL", "items": [r.to_doc() for r in reports]}
    return Outcome(doc, EXIT_OK if ok else EXIT_ASSERT)


HELP = {
    "rmf": "relative monodromy filtration M(N, W)",
    "admissible": "admissibility of a cone of nilpotents relative to W",
    "orbit-check": "does (cone, F) generate a nilpotent orbit",
    "fan-check": "face closure, fan axiom and optional compatibility with a group",
    "weakfan-falsify": "search for a weak-fan violation among candidate Hodge filtrations",
    "sigma-upsilon": "the marked cone of a face translated by a unipotent element",
    "kummer": "Kummer type of a translated face",
    "b1": "the group B1 of a unipotent integral matrix",
    "build-fan": "cones of the relatively complete two-weight fan",
    "probe": "relative completeness probe on marked cones",
}


# driver -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--threads", type=int, default=1, help="worker threads for independent items")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    common.add_argument("--window", help="index window LO:HI for fan constructions")

    p = argparse.ArgumentParser(prog="lmhodge", description="Exact checks for degenerating mixed Hodge structures.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common], help=HELP[name])
        sp.add_argument("document", help="JSON problem document, or - for stdin")
    neron = sub.add_parser("neron", help="Néron-model fans and component groups")
    nsub = neron.add_subparsers(dest="neron_command", required=True)
    for name in NERON:
        sp = nsub.add_parser(name, parents=[common], help=HELP[name])
        sp.add_argument("document", help="JSON problem document, or - for stdin")
    cp = sub.add_parser("corpus", help="worked-example corpus")
    csub = cp.add_subparsers(dest="corpus_command", required=True)
    run = csub.add_parser("run", parents=[common])
    run.add_argument("name", help=f"one of {', '.join(corpus.NAMES)} or all")
    return p


def _read(path: str) -> tuple[Any, str]:
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    doc = parse_document(text)
    return doc, digest(doc)


def execute(args) -> Outcome:
    start = time.perf_counter()
    if args.command == "corpus":
        outcome = run_corpus(args.name, args.threads)
        outcome.doc["input_digest"] = digest({"corpus": args.name})
        outcome.doc["kind"] = "corpus"
    else:
        fn = NERON[args.neron_command] if args.command == "neron" else COMMANDS[args.command]
        doc, dig = _read(args.document)
        outcome = fn(doc, args)
        outcome.doc["input_digest"] = dig
        outcome.doc["kind"] = doc["kind"]
    if args.timings:
        outcome.doc["timings"] = {"wall_seconds": f"{time.perf_counter() - start:.3f}"}
    return outcome


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_FORMAT
    try:
        outcome = execute(args)
    except (FormatError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except UndecidedRMF as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except (OracleDisagreement, WeakFanViolation, AssertionError) as exc:
        print(f"internal assertion: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    except (LMHodgeError, ValueError, IndexError) as exc:
        print(f"invalid input: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    text = pretty_json(outcome.doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return outcome.status


if __name__ == "__main__":
    sys.exit(main())
