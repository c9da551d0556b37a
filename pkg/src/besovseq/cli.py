"""Command-line entry point: ``besovseq <command> ...``.

Exit codes: 0 success, 1 property check failed, 2 usage or validation
error, 3 numeric failure (hypothesis violated, grid too short, degenerate
window).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import compress, embedding, estimator, haar, synthesis
from .errors import DegenerateWindow, GridTooShort, HypothesisViolated, InsufficientData
from .sequence import BesovParams, WaveletSequence

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

SEED_ENV = "BESOVSEQ_SEED"


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer")


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _triple(text: str) -> BesovParams:
    vals = _float_list(text)
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected p,q,s, got {text!r}")
    try:
        return BesovParams(*vals)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _plain(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return str(v)


def _provenance(args, seed) -> dict:
    record = {"command": args.command, "seed": seed}
    record["args"] = {
        k: _plain(v)
        for k, v in sorted(vars(args).items())
        if k not in ("func", "command", "no_timestamp", "seed") and not callable(v)
    }
    if not args.no_timestamp:
        record["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return record


def _emit(text: str, path) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_sequence(seq: WaveletSequence, path, prov: dict) -> None:
    seq = seq.with_meta(provenance=prov)
    _emit(json.dumps(seq.to_dict()) + "\n", path)


def _estimator_config(args) -> estimator.EstimatorConfig:
    kw = {"window_start_fraction": args.window_fraction, "method": args.method}
    if args.u_grid is not None:
        kw["u_grid"] = tuple(args.u_grid)
    kw["concave_envelope"] = not args.no_envelope
    return estimator.EstimatorConfig(**kw)


# -- commands --------------------------------------------------------------


def cmd_synth(args, prov) -> int:
    kind = args.kind
    if kind == "lacunary":
        seq = synthesis.lacunary(args.alpha0, args.s0, args.scales, offset=args.offset)
    elif kind == "dirac":
        seq = synthesis.dirac_model(args.scales)
    elif kind == "gaussian":
        seq = synthesis.gaussian_cascade(args.H, args.scales, prov["seed"])
    elif kind == "from-curve":
        u, s = estimator.read_curve_csv(Path(args.curve).read_text())
        seq, terms = synthesis.from_curve(
            np.column_stack([u, s]), args.terms, args.scales, max_gap=args.max_gap
        )
        tangents = args.tangents
        if tangents is None and args.output not in (None, "-"):
            tangents = Path(args.output).with_suffix(".tangents.json")
        if tangents is not None:
            doc = {"provenance": prov, "terms": [t.to_dict() for t in terms]}
            Path(tangents).write_text(json.dumps(doc, indent=2) + "\n")
    elif kind == "combine":
        seqs = [WaveletSequence.load(p) for p in args.inputs]
        weights = args.weights if args.weights is not None else [1.0] * len(seqs)
        seq = synthesis.combine(seqs, weights)
    else:  # argparse restricts the choices
        raise UsageError(f"unknown kind {kind!r}")
    _write_sequence(seq, args.output, prov)
    return EXIT_OK


def _read_signal(path: Path) -> np.ndarray:
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return np.asarray(json.loads(text), dtype=float)
    values = []
    header_seen = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line.split(",")[0]))
        except ValueError:
            if values or header_seen:
                raise UsageError(f"non-numeric row {line!r} in {path}")
            header_seen = True
    return np.asarray(values)


def cmd_analyze(args, prov) -> int:
    seq = haar.haar_forward(_read_signal(Path(args.signal)))
    _write_sequence(seq, args.output, prov)
    return EXIT_OK


def cmd_estimate(args, prov) -> int:
    seq = WaveletSequence.load(args.sequence)
    config = _estimator_config(args)
    curve = estimator.estimate_curve(seq, config)
    tol = args.tol if args.tol is not None else 2.0 / seq.max_scale
    props = estimator.check_curve_properties(curve, tol, args.concave_tol)
    _emit(curve.to_csv(), args.output)
    doc = props.to_dict()
    if seq.meta.get("basis") == "haar":
        doc["above_haar_range"] = haar.above_haar_range(curve)
    if args.report is not None:
        Path(args.report).write_text(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_compress(args, prov) -> int:
    seq = WaveletSequence.load(args.sequence)
    config = compress.CompressConfig(estimator=_estimator_config(args), kappa_tol=args.kappa_tol)
    rep = compress.report(seq, args.p0, args.s0, config)
    doc = rep.to_dict()
    doc["provenance"] = prov
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    if args.csv is not None:
        Path(args.csv).write_text(rep.sigma_csv())
    return EXIT_OK


def cmd_diagram(args, prov) -> int:
    rows = ["series,u,s"]
    grids = []
    for path in args.curves:
        curve = estimator.CriticalCurve.load(path)
        grids.append(curve.u_grid)
        name = Path(path).stem
        rows += [f"{name},{u!r},{s!r}" for u, s in zip(curve.u_grid.tolist(), curve.s_values.tolist())]
    if (args.p0 is None) != (args.s0 is None):
        raise UsageError("--p0 and --s0 must be given together")
    if args.p0 is not None:
        inv_p = 0.0 if math.isinf(args.p0) else 1.0 / args.p0
        us = np.unique(np.concatenate(grids + [np.array([inv_p])]))
        rows += [f"line,{u!r},{u - inv_p + args.s0!r}" for u in us.tolist()]
    _emit("\n".join(rows) + "\n", args.output)
    return EXIT_OK


def cmd_check(args, prov) -> int:
    seq = WaveletSequence.load(args.sequence)
    curve = estimator.estimate_curve(seq, _estimator_config(args))
    tol = args.tol if args.tol is not None else 2.0 / seq.max_scale
    props = estimator.check_curve_properties(curve, tol, args.concave_tol)
    _emit(json.dumps(props.to_dict(), indent=2) + "\n", args.output)
    return EXIT_OK if props.passed else EXIT_PROPERTY


def cmd_check_embed(args, prov) -> int:
    ok = embedding.embeds(args.src, args.dst)
    print(json.dumps({"embeds": ok, "condition": embedding.binding_condition(args.src, args.dst)}))
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def _add_estimator_flags(p):
    p.add_argument("--u-grid", type=_float_list, default=None, help="comma-separated u = 1/p values")
    p.add_argument("--window-fraction", type=float, default=0.4)
    p.add_argument("--method", choices=estimator.METHODS, default="envelope")
    p.add_argument("--no-envelope", action="store_true", help="skip the concave majorant")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="besovseq", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
    parser.add_argument("--no-timestamp", action="store_true", help="omit timestamps for byte-identical output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic sequence")
    kinds = p.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("lacunary")
    k.add_argument("--alpha0", type=float, required=True)
    k.add_argument("--s0", type=float, required=True)
    k.add_argument("--scales", type=int, required=True)
    k.add_argument("--offset", type=int, default=0)
    k = kinds.add_parser("dirac")
    k.add_argument("--scales", type=int, required=True)
    k = kinds.add_parser("gaussian")
    k.add_argument("--H", type=float, required=True)
    k.add_argument("--scales", type=int, required=True)
    k = kinds.add_parser("from-curve")
    k.add_argument("--curve", required=True, help='CSV with header "u,s"')
    k.add_argument("--terms", type=int, required=True)
    k.add_argument("--scales", type=int, required=True)
    k.add_argument("--max-gap", type=float, default=0.025)
    k.add_argument("--tangents", default=None, help="tangent dump path (default: next to output)")
    k = kinds.add_parser("combine")
    k.add_argument("inputs", nargs="+")
    k.add_argument("--weights", type=_float_list, default=None)
    for k in kinds.choices.values():
        k.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("analyze", help="Haar-analyze a sampled signal")
    p.add_argument("signal", help="CSV single column or JSON array")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("estimate", help="estimate the critical curve")
    p.add_argument("sequence")
    p.add_argument("-o", "--output", default=None, help="curve CSV")
    p.add_argument("--report", default=None, help="property report JSON")
    p.add_argument("--tol", type=float, default=None, help="monotone/Lipschitz slack (default 2/J)")
    p.add_argument("--concave-tol", type=float, default=1e-9)
    _add_estimator_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("compress", help="best N-term errors and compressibility")
    p.add_argument("sequence")
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--s0", type=float, required=True)
    p.add_argument("--kappa-tol", type=float, default=0.1)
    p.add_argument("-o", "--output", default=None, help="report JSON")
    p.add_argument("--csv", default=None, help='"N,sigma" CSV')
    _add_estimator_flags(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("diagram", help="(1/p, s) diagram data")
    p.add_argument("curves", nargs="+")
    p.add_argument("--p0", type=float, default=None)
    p.add_argument("--s0", type=float, default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("check", help="exit 0 iff the curve properties hold")
    p.add_argument("sequence")
    p.add_argument("--tol", type=float, default=None, help="monotone/Lipschitz slack (default 2/J)")
    p.add_argument("--concave-tol", type=float, default=1e-9)
    p.add_argument("-o", "--output", default=None)
    _add_estimator_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("check-embed", help="test the embedding condition")
    p.add_argument("--src", type=_triple, required=True, help="p,q,s")
    p.add_argument("--dst", type=_triple, required=True, help="p,q,s")
    p.set_defaults(func=cmd_check_embed)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        seed = args.seed if args.seed is not None else _default_seed()
        prov = _provenance(args, seed)
        print("# besovseq " + json.dumps(prov, sort_keys=True), file=sys.stderr)
        return args.func(args, prov)
    except (HypothesisViolated, GridTooShort, DegenerateWindow, InsufficientData) as exc:
        print(f"besovseq: numeric error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, OSError, KeyError) as exc:
        print(f"besovseq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
