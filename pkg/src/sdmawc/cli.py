"""Command-line front end: region, example, simulate and validate."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coding import SimConfig, estimate_error, estimate_leakage
from .errors import InvalidArgument, ResourceError, SdmawcError
from .examples import (example1_channel, example1_scheme1_assignment, example1b_channel,
                       example1b_scheme2_assignment)
from .io import (detect_kind, read_json, validate_document, write_csv, write_json,
                 write_manifest)
from .pmf import ChannelModel, binary_entropy
from .regions import REGION_IDS, FAMILIES, region_axes
from .search import (SearchConfig, achievable_region, check_degraded, example2_capacity,
                     example2_rows, shannon_strategy_bound)

EXIT_OK, EXIT_USAGE, EXIT_RESOURCE, EXIT_INTERNAL = 0, 2, 3, 4


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InvalidArgument(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def _polygon_files(out: Path, stem: str, poly, region: str) -> list[Path]:
    a1, a2 = poly.axes
    srcs = poly.sources or [None] * len(poly.vertices)
    rows = [(region, i, v[0], v[1], s) for i, (v, s) in enumerate(zip(poly.vertices, srcs))]
    csv_path = write_csv(out / f"{stem}.csv", ["region", "vertex", a1, a2, "source"], rows)
    A, b = poly.halfplanes if not poly.is_empty else (np.zeros((0, 2)), np.zeros(0))
    json_path = write_json(out / f"{stem}.json", {
        "region": region, "axes": list(poly.axes), "vertices": poly.vertices.tolist(),
        "sources": list(srcs), "halfplanes": {"A": A.tolist(), "b": b.tolist()}})
    return [csv_path, json_path]


# ---------------------------------------------------------------------------
# region


def cmd_region(args) -> int:
    doc = read_json(args.config)
    validate_document(doc, "region")
    channel = ChannelModel.from_dict(doc["channel"])
    search_doc = dict(doc.get("search", {}))
    if args.seed is not None:
        search_doc["seed"] = args.seed
    if args.grid is not None:
        search_doc["grid"] = args.grid
    search = SearchConfig.from_dict(search_doc)
    region = args.region or doc.get("region", "R11")
    if region not in REGION_IDS and region not in FAMILIES:
        raise InvalidArgument(f"unknown region id {region!r}")
    if region_axes(region)[1] == "R0":
        check_degraded(channel, doc.get("degraded_check", "raise"))
    poly = achievable_region(channel, region, search)
    out = _out_dir(args.out)
    files = _polygon_files(out, f"region_{region}", poly, region)
    effective = {"channel": doc["channel"], "search": search.to_dict(), "region": region}
    write_manifest(out, "region", effective, search.seed, files)
    print(f"{region}: {len(poly.vertices)} vertices written to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# example


def _example_1a(args, out: Path) -> list[Path]:
    rows = []
    step = 1.0 / (args.grid or 1000)
    for p in args.p:
        poly = achievable_region(example1_channel(p), "R11",
                                 SearchConfig(candidates=(example1_scheme1_assignment(),),
                                              samples=0))
        target = min(1.0 - p, 1.0 - binary_entropy(p))
        bound = shannon_strategy_bound(example1_channel(p), step=step)
        rows.append((p, target, poly.contains((target, 0.0), 1e-6), bound,
                     target - bound, bound < target - 1e-4))
    return [write_csv(out / "example1a.csv",
                      ["p", "scheme1_R1", "scheme1_contains", "scheme2_bound", "gap",
                       "separated"], rows)]


def _example_1b(args, out: Path) -> list[Path]:
    rows = []
    for p in args.p:
        poly = achievable_region(example1b_channel(p), "R2",
                                 SearchConfig(candidates=(example1b_scheme2_assignment(),),
                                              samples=0))
        point = binary_entropy(p)
        rows.append((p, point, 1.0 - binary_entropy(p) >= point,
                     poly.contains((0.0, point), 1e-6)))
    return [write_csv(out / "example1b.csv",
                      ["p", "R2_point", "key_condition", "scheme2_contains"], rows)]


def _example_2(args, out: Path) -> list[Path]:
    r = args.grid or 100
    alphas = [0.5 + k / r for k in range(r // 2 + 1)]
    q, p = args.q, args.p[0]
    poly = example2_capacity(q, p, alphas)
    curve = []
    for a in alphas:
        r1a, r1b, sa, sb = example2_rows(q, p, a)
        curve.append((a, r1a, r1b, sa, sb, min(r1a, r1b), min(sa, sb)))
    files = [write_csv(out / "example2_curve.csv",
                       ["alpha", "R1_row1", "R1_row2", "sum_row1", "sum_row2", "R1_max",
                        "sum_max"], curve)]
    return files + _polygon_files(out, "example2_region", poly, "example2")


def cmd_example(args) -> int:
    defaults = {"1a": [0.6, 0.75, 0.9], "1b": [0.1], "2": [0.1]}
    args.p = args.p or defaults[args.which]
    for v in args.p + [args.q]:
        if not 0.0 <= v <= 1.0:
            raise InvalidArgument(f"probability {v} outside [0, 1]")
    if args.grid is not None and args.grid < 2:
        raise InvalidArgument("--grid must be at least 2")
    out = _out_dir(args.out)
    run = {"1a": _example_1a, "1b": _example_1b, "2": _example_2}[args.which]
    files = run(args, out)
    params = {"which": args.which, "p": args.p, "q": args.q, "grid": args.grid}
    write_manifest(out, f"example {args.which}", params, None, files)
    print(f"example {args.which}: wrote {', '.join(f.name for f in files)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args) -> int:
    doc = read_json(args.config)
    validate_document(doc, "sim")
    doc = dict(doc)
    if args.seed is not None:
        doc["seed"] = args.seed
    trials = args.trials if args.trials is not None else doc.pop("trials", 100)
    doc.pop("trials", None)
    leak = doc.pop("leakage", {"mode": "none"})
    if trials < 1:
        raise InvalidArgument("--trials must be >= 1")
    cfg = SimConfig.from_dict(doc)
    out = _out_dir(args.out)
    log: list = []
    report = estimate_error(cfg, trials, log)
    files = []
    if args.transcript:
        rows = [(t, int(err), root or "", ";".join(f"{b}:{c}" for b, c in sorted(pb.items())))
                for t, err, root, pb in log]
        files.append(write_csv(out / "transcript.csv",
                               ["trial", "error", "root_cause", "block_failures"], rows))
    if leak["mode"] != "none":
        report.leakage = estimate_leakage(cfg, leak["mode"], leak.get("trials", 100000))
    body = report.to_dict()
    body["derived_rates"] = cfg.derived_rates
    files.insert(0, write_json(out / "report.json", body))
    effective = cfg.to_dict() | {"trials": trials, "leakage": leak}
    write_manifest(out, "simulate", effective, cfg.seed, files)
    print(f"P_e = {report.p_error:.6g} over {trials} trials; report written to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate


def cmd_validate(args) -> int:
    doc = read_json(args.config)
    kind = args.kind or detect_kind(doc)
    validate_document(doc, kind)
    if kind == "sim":
        body = {k: v for k, v in doc.items() if k not in ("trials", "leakage")}
        SimConfig.from_dict(body)
    elif kind == "region":
        ChannelModel.from_dict(doc["channel"])
        SearchConfig.from_dict(doc.get("search", {}))
    print(f"{args.config}: valid {kind} config")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdmawc", description="Secrecy rate regions and block-Markov simulation for "
                                   "state-dependent multiple-access wiretap channels.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", help="achievable region polygon for a channel config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--region", help="region id or family (default: config or R11)")
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", type=int, help="simplex grid resolution of the search")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("example", help="reproduce a worked example")
    p.add_argument("which", choices=["1a", "1b", "2"])
    p.add_argument("--out", required=True)
    p.add_argument("--p", type=float, nargs="+", help="state (1a, 1b) or noise (2) parameter")
    p.add_argument("--q", type=float, default=0.25, help="state parameter of example 2")
    p.add_argument("--grid", type=int, help="1a: 1/step of the input grid; 2: alpha grid 1/step")
    p.add_argument("--seed", type=int, help="accepted for uniformity; examples are exact")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("simulate", help="Monte Carlo run of the block-Markov scheme")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--transcript", action="store_true", help="also write per-trial CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="check a config against the shipped schemas")
    p.add_argument("--config", required=True)
    p.add_argument("--kind", choices=["region", "sim"])
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except SdmawcError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
