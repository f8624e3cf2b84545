"""Command-line interface: game, mpp, bound, and lightcone experiments.

Every command emits one machine-readable report (JSON by default, CSV on
request) to stdout or ``--out``.  Reports embed the command, its
configuration, the seed, the package version, and the wall-clock runtime;
with a fixed seed and configuration the payload is reproducible
byte-for-byte apart from the runtime field.

Exit codes: 0 success, 2 invalid input, 3 domain precondition failure,
4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__, game, lightcone, mpp
from .errors import DomainError
from .rng import stream

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_INTERNAL = 4


def _parse_params(text: str) -> game.Params:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"cannot parse parameter list {text!r}")
    if len(vals) != 6 or any(v not in (1, -1) for v in vals):
        raise ValueError("params must be six comma-separated +-1 values")
    return vals  # type: ignore[return-value]


def _flatten(prefix: str, value, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(value, (list, tuple)):
        rows.append((prefix, json.dumps(value)))
    else:
        rows.append((prefix, str(value)))


def _emit(report: dict, fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        text = json.dumps(report, indent=2) + "\n"
    elif fmt == "csv":
        rows: list[tuple[str, str]] = []
        _flatten("", report, rows)
        text = "key,value\n" + "\n".join(f"{k},{v}" for k, v in rows) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


# -- game ---------------------------------------------------------------------


def cmd_game_brute_force(args) -> dict:
    params = _parse_params(args.params)
    best, (alice, bob) = game.brute_force_optimum(params)
    recheck = game.win_probability(alice, bob, params)
    return {
        "max_prob": _frac(best),
        "witness": [alice.to_json(), bob.to_json()],
        "witness_win_probability": _frac(recheck),
    }


def cmd_game_play(args) -> dict:
    params = _parse_params(args.params)
    rng = stream(args.seed, 0)
    quantum = args.strategy == "quantum"
    if args.strategy == "classical-witness":
        pair = game.mirror_strategy_pair(params)
    elif quantum:
        pair = None
    else:
        try:
            with open(args.strategy) as fh:
                pair = game.strategy_pair_from_json(fh.read())
        except OSError as exc:
            raise ValueError(f"cannot read strategy file: {exc}")
    wins = 0
    for i in range(args.rounds):
        round_rng = stream(args.seed, 1, i)
        x, y = (int(v) for v in round_rng.choice(5, size=2, replace=False))
        if quantum:
            z, w = mpp.quantum_round(x, y, params, round_rng)
        else:
            z, w = pair[0].answer(x), pair[1].answer(y)
        wins += game.referee(x, y, z, w, params)
    report = {
        "strategy": args.strategy,
        "rounds": args.rounds,
        "wins": wins,
    }
    if args.rounds:
        report["win_rate"] = wins / args.rounds
        report["win_rate_exact"] = _frac(Fraction(wins, args.rounds))
    return report


# -- mpp ----------------------------------------------------------------------


def _load_instance(args) -> mpp.MppInput:
    if getattr(args, "input", None):
        with open(args.input) as fh:
            data = json.load(fh)
        if isinstance(data, dict) and "input" in data:
            data = data["input"]
        if isinstance(data, str):
            return mpp.MppInput.from_packed(data)
        return mpp.MppInput.from_json(data)
    if getattr(args, "packed", None):
        return mpp.MppInput.from_packed(args.packed)
    if getattr(args, "n", None):
        return mpp.sample_instance(args.n, stream(args.seed, 10))
    raise ValueError("provide --input, --packed, or --n")


def cmd_mpp_sample(args) -> dict:
    instances = []
    for i in range(args.count):
        rng = stream(args.seed, 20, i)
        if args.k is not None or args.l is not None:
            if args.k is None or args.l is None:
                raise ValueError("--k and --l must be given together")
            inp = mpp.sample_instance_at(args.n, args.k, args.l, rng)
        else:
            inp = mpp.sample_instance(args.n, rng)
        k, l = inp.active_pair()
        instances.append({"packed": inp.packed, "k": k, "l": l, **inp.to_json()})
    return {"count": args.count, "instances": instances}


def _run_payload(inp: mpp.MppInput, out: mpp.MppOutput, backend: str) -> dict:
    payload: dict = {
        "backend": backend,
        "input": inp.to_json(),
        "input_packed": inp.packed,
        "output": out.to_json(),
        "output_packed": out.packed,
        "support_ok": mpp.verify_support(inp, out),
    }
    if inp.in_instance_set():
        k, l = inp.active_pair()
        a1, b1, a2, b2, a3, b3 = mpp.extract_params(out, k, l)
        payload.update(
            {
                "k": k,
                "l": l,
                "params": [a1, b1, a2, b2, a3, b3],
                "relation_ok": mpp.verify_game_relation(inp, out),
            }
        )
    return payload


def cmd_mpp_run(args) -> dict:
    inp = _load_instance(args)
    out = mpp.run(inp, stream(args.seed, 30), backend=args.backend)
    return _run_payload(inp, out, args.backend)


def cmd_mpp_verify(args) -> dict:
    if args.report:
        with open(args.report) as fh:
            data = json.load(fh)
        inp = mpp.MppInput.from_packed(data["input_packed"])
        out = mpp.MppOutput.from_packed(data["output_packed"])
    else:
        inp = _load_instance(args)
        if not args.outbits:
            raise ValueError("provide --outbits or --report")
        out = mpp.MppOutput.from_packed(args.outbits)
    payload: dict = {
        "input_packed": inp.packed,
        "output_packed": out.packed,
        "support_ok": mpp.verify_support(inp, out),
    }
    if inp.in_instance_set():
        payload["relation_ok"] = mpp.verify_game_relation(inp, out)
    return payload


# -- bound ---------------------------------------------------------------------


def cmd_bound(args) -> dict:
    if args.which == "eq1":
        value = lightcone.depth_bound_pentagram(args.n, args.B, args.p)
        threshold = str(lightcone.CLASSICAL_CAP)
    else:
        value = lightcone.depth_bound_square(args.n, args.B, args.p)
        threshold = str(lightcone.SQUARE_CAP)
    return {
        "formula": args.which,
        "n": args.n,
        "B": args.B,
        "p": args.p,
        "threshold": threshold,
        "depth_bound": value,
    }


# -- lightcone -------------------------------------------------------------------


def _load_circuit(path: str) -> lightcone.ClassicalCircuit:
    try:
        with open(path) as fh:
            return lightcone.ClassicalCircuit.from_json(json.load(fh))
    except OSError as exc:
        raise ValueError(f"cannot read circuit file: {exc}")


def cmd_lightcone_analyze(args) -> dict:
    c = _load_circuit(args.circuit)
    payload: dict = {
        "inputs": c.n_inputs,
        "random_wires": c.n_random,
        "gates": c.n_gates,
        "depth": c.depth,
        "max_fanin": c.max_fanin,
    }
    if args.input_bit is not None:
        payload["input_bit"] = args.input_bit
        payload["lightcone"] = sorted(lightcone.lightcone(c, args.input_bit))
        return payload
    cones = {
        f"i{i}": sorted(lightcone.lightcone(c, i)) for i in range(c.n_inputs)
    }
    payload["lightcones"] = cones
    if c.n_inputs % 6 == 0 and len(c.outputs) == c.n_inputs:
        n = c.n_inputs // 6
        if n <= 64:
            payload["events"] = {
                f"{k},{l}": lightcone.disjoint_event(c, k, l)
                for k in range(1, n + 1)
                for l in range(k + 1, n + 1)
            }
    return payload


def cmd_lightcone_prob_e(args) -> dict:
    c = _load_circuit(args.circuit)
    if args.n is not None and args.n * 6 != c.n_inputs:
        raise ValueError("--n disagrees with the circuit layout")
    p = lightcone.prob_disjoint(c)
    return {
        "n": c.n_inputs // 6,
        "depth": c.depth,
        "max_fanin": c.max_fanin,
        "prob_event": float(p),
        "prob_event_exact": _frac(p),
    }


def cmd_lightcone_adversary(args) -> dict:
    c = _load_circuit(args.circuit)
    report = lightcone.eval_adversary(c, args.samples, stream(args.seed, 40))
    payload = report.to_json()
    cap = float(lightcone.CLASSICAL_CAP)
    payload["cap"] = str(lightcone.CLASSICAL_CAP)
    payload["given_event_within_cap"] = (
        report.success_given_event <= cap + report.given_event_halfwidth
    )
    return payload


def cmd_lightcone_generate(args) -> dict:
    if args.kind == "identity":
        c = lightcone.identity_circuit(args.n)
    elif args.kind == "random":
        c = lightcone.random_nc0_circuit(
            args.n, args.B, args.D, stream(args.seed, 50), n_random=args.random_wires
        )
    else:
        alice, bob, value = lightcone.optimal_lookup_pair()
        c = lightcone.strategy_circuit(args.n, (alice, bob))
    with open(args.out_circuit, "w") as fh:
        json.dump(c.to_json(), fh)
    return {
        "kind": args.kind,
        "file": args.out_circuit,
        "inputs": c.n_inputs,
        "gates": c.n_gates,
        "depth": c.depth,
        "max_fanin": c.max_fanin,
    }


# -- wiring -----------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pentagram",
        description="Magic pentagram game and problem experiments",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="64-bit run seed")
        p.add_argument("--out", default=None, help="write the report to a file")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    g = sub.add_parser("game", help="nonlocal game experiments")
    gsub = g.add_subparsers(dest="subcommand", required=True)
    p = gsub.add_parser("brute-force", help="exact classical optimum with witness")
    p.add_argument("--params", default="1,1,1,1,1,1", help="six +-1 values")
    common(p)
    p.set_defaults(fn=cmd_game_brute_force)
    p = gsub.add_parser("play", help="play repeated rounds")
    p.add_argument(
        "--strategy",
        default="quantum",
        help="quantum | classical-witness | path to a strategy JSON file",
    )
    p.add_argument("--rounds", type=int, default=100)
    p.add_argument("--params", default="1,1,1,1,1,1")
    common(p)
    p.set_defaults(fn=cmd_game_play)

    m = sub.add_parser("mpp", help="problem-circuit experiments")
    msub = m.add_subparsers(dest="subcommand", required=True)
    p = msub.add_parser("sample", help="draw structured instances")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--count", type=int, default=1)
    common(p)
    p.set_defaults(fn=cmd_mpp_sample)
    p = msub.add_parser("run", help="run the circuit on an instance")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--input", default=None, help="instance JSON file")
    p.add_argument("--packed", default=None, help="6n-bit instance string")
    p.add_argument("--backend", choices=("stabilizer", "statevector"), default="stabilizer")
    common(p)
    p.set_defaults(fn=cmd_mpp_run)
    p = msub.add_parser("verify", help="verify an output against an instance")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--input", default=None)
    p.add_argument("--packed", default=None)
    p.add_argument("--outbits", default=None, help="6n-bit output string")
    p.add_argument("--report", default=None, help="report file from a previous run")
    common(p)
    p.set_defaults(fn=cmd_mpp_verify)

    b = sub.add_parser("bound", help="depth lower-bound formulas")
    bsub = b.add_subparsers(dest="subcommand", required=True)
    for which in ("eq1", "eq3"):
        p = bsub.add_parser(which, help=f"depth bound {which}")
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--B", type=int, required=True)
        p.add_argument("--p", type=float, required=True)
        common(p)
        p.set_defaults(fn=cmd_bound, which=which)

    lc = sub.add_parser("lightcone", help="classical circuit analysis")
    lsub = lc.add_subparsers(dest="subcommand", required=True)
    p = lsub.add_parser("analyze", help="lightcones and event verdicts")
    p.add_argument("--circuit", required=True)
    p.add_argument("--input-bit", type=int, default=None)
    common(p)
    p.set_defaults(fn=cmd_lightcone_analyze)
    p = lsub.add_parser("prob-e", help="exact disjointness probability")
    p.add_argument("--circuit", required=True)
    p.add_argument("--n", type=int, default=None)
    common(p)
    p.set_defaults(fn=cmd_lightcone_prob_e)
    p = lsub.add_parser("adversary", help="score a circuit on structured inputs")
    p.add_argument("--circuit", required=True)
    p.add_argument("--samples", type=int, default=10000)
    common(p)
    p.set_defaults(fn=cmd_lightcone_adversary)
    p = lsub.add_parser("generate", help="write a circuit file")
    p.add_argument("--kind", choices=("identity", "random", "witness"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--B", type=int, default=2)
    p.add_argument("--D", type=int, default=1)
    p.add_argument("--random-wires", type=int, default=0)
    p.add_argument("--out-circuit", required=True)
    common(p)
    p.set_defaults(fn=cmd_lightcone_generate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        payload = args.fn(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:  # invariant breach
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    runtime_ms = (time.perf_counter() - start) * 1000
    report = {
        "command": f"{args.command} {getattr(args, 'subcommand', '')}".strip(),
        "version": __version__,
        "seed": getattr(args, "seed", None),
        "config": {
            k: v
            for k, v in sorted(vars(args).items())
            if k not in ("fn", "command", "subcommand", "out", "format")
            and v is not None
        },
        **payload,
        "runtime_ms": round(runtime_ms, 3),
    }
    _emit(report, args.format, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
