"""Command-line surface: check, classify, expand, gen.

``check`` emits one JSON verdict on stdout and uses exit codes
0 (answered), 2 (unparseable input), 3 (no applicable algorithm within
the configured budgets).  Refusal is deliberate: outside the supported
classes the tool never guesses.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from .blackbox import BlackBox, blackbox_sps_test, lowdeg_bw_test
from .circuit import (Circuit, PlusLayering, Rejection, SpsView,
                      circuit_degree, classify_plus_regular, classify_sps,
                      parse, serialize)
from .errors import (BudgetError, FieldSizeError, NcpitError, ParseError,
                     StructureError)
from .field import PrimeField, derive_rng, find_prime_above
from .gen import generate
from .oracle import expand
from .pistar import PiStarConfig
from .plus_regular import pit_plus_regular
from .slp import DEFAULT_EPS, FingerprintSession

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NO_ALGORITHM = 3

LOWDEG_DEGREE_CAP = 31  # keeps substitution matrices at most 16 x 16


def _load_circuit(path: str, prime: Optional[int]) -> Circuit:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}", 0) from None
    circuit = parse(text)
    if prime is not None and circuit.field.p != prime:
        raise ParseError(
            f"--prime {prime} conflicts with the file's field {circuit.field.p}",
            1)
    return circuit


def _verdict(args, circuit_class: str, algorithm: str, result: str,
             epsilon: Optional[float], witness, deterministic: bool,
             started: float) -> dict:
    return {
        "file": args.file,
        "class": circuit_class,
        "algorithm": algorithm,
        "result": result,
        "epsilon": epsilon,
        "witness": json.loads(witness.to_json()) if witness else None,
        "deterministic": deterministic,
        "seed": args.seed,
        "elapsed_ms": round((time.monotonic() - started) * 1000, 3),
    }


def _try_plus_regular(c: Circuit, args, started) -> Optional[dict]:
    layering = classify_plus_regular(c)
    if isinstance(layering, Rejection):
        return None
    cfg = PiStarConfig(c_const=args.c_const, eps=args.error,
                       session=FingerprintSession(args.seed))
    try:
        verdict = pit_plus_regular(c, cfg)
    except (StructureError, ValueError):
        return None
    eps = None if verdict.deterministic else args.error
    return _verdict(args, "plus-regular", "plus-regular-whitebox",
                    "zero" if verdict.is_zero else "nonzero",
                    eps, None, verdict.deterministic, started)


def _try_sps(c: Circuit, args, started) -> Optional[dict]:
    view = classify_sps(c)
    if isinstance(view, Rejection):
        return None
    bb = BlackBox.from_circuit(c)
    try:
        verdict = blackbox_sps_test(bb, view.s, view.max_degree,
                                    trials=args.trials, seed=args.seed)
    except FieldSizeError:
        return None
    if verdict.nonzero:
        return _verdict(args, "sps", "sps-blackbox", "nonzero", None,
                        verdict.witness, False, started)
    return _verdict(args, "sps", "sps-blackbox", "probably-zero",
                    verdict.error_bound, None, False, started)


def _try_lowdeg(c: Circuit, args, started) -> Optional[dict]:
    degree = circuit_degree(c)
    if degree > LOWDEG_DEGREE_CAP:
        return None
    bb = BlackBox.from_circuit(c)
    try:
        verdict = lowdeg_bw_test(bb, degree, trials=args.trials,
                                 seed=args.seed)
    except FieldSizeError:
        return None
    if verdict.nonzero:
        return _verdict(args, "low-degree", "lowdeg-blackbox", "nonzero",
                        None, verdict.witness, False, started)
    return _verdict(args, "low-degree", "lowdeg-blackbox", "probably-zero",
                    verdict.error_bound, None, False, started)


def _try_oracle(c: Circuit, args, started) -> Optional[dict]:
    try:
        poly = expand(c, max_terms=args.max_expand, max_degree=args.max_degree)
    except BudgetError:
        return None
    return _verdict(args, "expanded", "sparse-expansion",
                    "zero" if poly.is_zero() else "nonzero",
                    None, None, True, started)


def cmd_check(args) -> int:
    started = time.monotonic()
    try:
        circuit = _load_circuit(args.file, args.prime)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    attempts = {
        "plus-regular": [_try_plus_regular],
        "sps": [_try_sps],
        "lowdeg": [_try_lowdeg],
        "oracle": [_try_oracle],
        "auto": [_try_plus_regular, _try_sps, _try_lowdeg, _try_oracle],
    }[args.mode]
    for attempt in attempts:
        verdict = attempt(circuit, args, started)
        if verdict is not None:
            print(json.dumps(verdict))
            return EXIT_OK
    print(f"error: no applicable algorithm for {args.file} in mode "
          f"{args.mode} under the configured budgets", file=sys.stderr)
    return EXIT_NO_ALGORITHM


def cmd_classify(args) -> int:
    try:
        circuit = _load_circuit(args.file, None)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    report: dict = {"file": args.file}
    layering = classify_plus_regular(circuit)
    if isinstance(layering, PlusLayering):
        report["plus_regular"] = {
            "layers": layering.layers,
            "layer_degrees": [str(d) for d in layering.layer_degrees],
        }
    else:
        report["plus_regular"] = {"rejected": str(layering)}
    view = classify_sps(circuit)
    if isinstance(view, SpsView):
        report["sps"] = {
            "s": view.s,
            "degree": str(view.max_degree),
            "homogeneous": view.homogeneous,
        }
    else:
        report["sps"] = {"rejected": str(view)}
    parts = []
    if isinstance(view, SpsView):
        parts.append(f"sps, s={view.s}, D={view.max_degree}")
    if isinstance(layering, PlusLayering):
        parts.append(f"plus-regular, {layering.layers} layers")
    if not parts:
        parts.append(f"neither: {layering}")
    report["summary"] = "; also ".join(parts) if len(parts) > 1 else parts[0]
    print(json.dumps(report))
    return EXIT_OK


def cmd_expand(args) -> int:
    try:
        circuit = _load_circuit(args.file, None)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        poly = expand(circuit, max_terms=args.max_terms,
                      max_degree=args.max_degree)
    except BudgetError as exc:
        print(f"error: expansion over budget ({exc.kind}): {exc}",
              file=sys.stderr)
        return EXIT_NO_ALGORITHM
    dump = poly.dump()
    if dump:
        print(dump)
    return EXIT_OK


def cmd_gen(args) -> int:
    field = (PrimeField(args.prime) if args.prime is not None
             else find_prime_above(100))
    rng = derive_rng(args.seed, "gen", args.cls, args.n, args.layers,
                     args.degree, args.force_zero)
    generated = generate(rng, field, args.cls, args.n, layers=args.layers,
                         max_degree=args.degree, force_zero=args.force_zero)
    text = serialize(generated.circuit)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(args.out + ".truth.json", "w", encoding="utf-8") as fh:
            json.dump(generated.sidecar(args.seed), fh)
            fh.write("\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncpit",
        description="Identity testing for noncommutative arithmetic circuits")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="decide whether a circuit is zero")
    check.add_argument("file")
    check.add_argument("--mode", default="auto",
                       choices=["auto", "plus-regular", "sps", "lowdeg",
                                "oracle"])
    check.add_argument("--prime", type=int, default=None,
                       help="assert the file's field modulus")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--trials", type=int, default=10)
    check.add_argument("--error", type=float, default=DEFAULT_EPS,
                       help="word-equality error budget")
    check.add_argument("--c-const", dest="c_const", type=int, default=4,
                       help="mismatch budget multiplier")
    check.add_argument("--max-expand", type=int, default=1 << 20,
                       help="oracle term budget")
    check.add_argument("--max-degree", type=int, default=64,
                       help="oracle degree budget")
    check.set_defaults(fn=cmd_check)

    classify = sub.add_parser("classify", help="report circuit structure")
    classify.add_argument("file")
    classify.set_defaults(fn=cmd_classify)

    exp = sub.add_parser("expand", help="dump the expanded term list")
    exp.add_argument("file")
    exp.add_argument("--max-terms", type=int, default=1 << 20)
    exp.add_argument("--max-degree", type=int, default=64)
    exp.set_defaults(fn=cmd_expand)

    gen = sub.add_parser("gen", help="generate a random circuit file")
    gen.add_argument("--class", dest="cls", required=True,
                     choices=["plus-regular", "sps"])
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--n", type=int, default=3)
    gen.add_argument("--layers", type=int, default=2)
    gen.add_argument("--degree", type=int, default=6)
    gen.add_argument("--force-zero", action="store_true")
    gen.add_argument("--prime", type=int, default=None)
    gen.add_argument("--out", default=None,
                     help="write the circuit here plus a .truth.json sidecar")
    gen.set_defaults(fn=cmd_gen)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except NcpitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_ALGORITHM


if __name__ == "__main__":
    sys.exit(main())
