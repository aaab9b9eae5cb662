"""Batch front-end: every experiment as a seeded, reproducible command.

Exit codes: 0 success, 2 usage or unsupported input, 3 invariant violation
detected by an audit.  Output is byte-identical for identical (command,
config, seed); `--threads N` must and does match `--threads 1`.

Defaults come from, in increasing precedence: built-ins, a flat key=value
config file (`--config`), the SKALAB_SEED environment variable (seed only),
explicit flags.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .errors import InvariantViolation, SkalabError
from .finite_field import field_for_size
from .halving_walk import ESTIMATOR_IDS, get_estimator, halve
from .incidence_graph import (
    BoundReport,
    SubgraphQuery,
    build_plane_graph,
    dense_subgraph_search,
    sdz_report,
)
from .projective_plane import enumerate_plane, sample_flag
from .reporting import canonical_json, envelope, render_csv
from .ska_protocol import run_session, secrecy_audit
from .subplane_cover import baer_subplane, build_cover

STRATEGIES = ("exhaustive", "greedy-peel", "local-swap")


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {line!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def _resolve(args, key: str, cast, fallback):
    """flag > config file > (SKALAB_SEED for seed) > built-in default."""
    flag_value = getattr(args, key.replace("-", "_"), None)
    if flag_value is not None:
        return flag_value
    if args.config_values and key in args.config_values:
        return cast(args.config_values[key])
    if key == "seed":
        env = os.environ.get("SKALAB_SEED")
        if env is not None:
            return cast(env)
    return fallback


def _emit(args, text: str) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_plane(args) -> int:
    fmt = _resolve(args, "format", str, "json")
    seed = _resolve(args, "seed", int, 0)
    plane = enumerate_plane(args.q)
    config = {"command": "plane", "q": args.q, "format": fmt, "seed": seed,
              "version": __version__}
    n_points, n_lines, n_flags = plane.counts()
    if fmt == "csv":
        if args.flags:
            header = ("q", "line_id", "point_id")
            rows = [(args.q, lid, pid) for lid, pid in plane.flag_ids]
        else:
            header = ("schema_version", "version", "q", "seed", "points", "lines", "flags", "degree")
            rows = [(1, __version__, args.q, seed, n_points, n_lines, n_flags, args.q + 1)]
        _emit(args, render_csv(header, rows))
        return 0
    body = {
        "points": n_points,
        "lines": n_lines,
        "flags": n_flags,
        "degree": args.q + 1,
    }
    if args.flags:
        body["flag_list"] = [[lid, pid] for lid, pid in plane.flag_ids]
    _emit(args, canonical_json(envelope("plane", config, body)))
    return 0


def cmd_audit(args) -> int:
    fmt = _resolve(args, "format", str, "csv")
    seed = _resolve(args, "seed", int, 0)
    strategy = _resolve(args, "strategy", str, "greedy-peel")
    iters = _resolve(args, "iters", int, 100)
    threads = _resolve(args, "threads", int, 1)
    g = build_plane_graph(args.q)
    if args.baer:
        query = baer_subplane(args.q)
        label = "baer"
    else:
        if args.a is None or args.b is None:
            raise SkalabError("audit needs --baer or both --a and --b")
        if strategy not in STRATEGIES:
            raise SkalabError(f"strategy must be one of {STRATEGIES}")
        query, _ = dense_subgraph_search(
            g, args.a, args.b, strategy=strategy, seed=seed, iters=iters, threads=threads
        )
        label = strategy
    report = sdz_report(g, query)
    config = {
        "command": "audit", "q": args.q, "seed": seed, "strategy": label,
        "a": args.a, "b": args.b, "iters": iters, "format": fmt,
        "version": __version__,
    }
    if fmt == "json":
        body = {"report": report.to_json_dict(), "query_label": label}
        _emit(args, canonical_json(envelope("audit", config, body)))
    else:
        header = ("schema_version", "version", "seed", "strategy") + BoundReport.CSV_HEADER
        rows = [(1, __version__, seed, label) + report.csv_row()]
        _emit(args, render_csv(header, rows))
    return 0


def cmd_ska(args) -> int:
    fmt = _resolve(args, "format", str, "json")
    seed = _resolve(args, "seed", int, 0)
    spec = field_for_size(args.q)
    if spec.degree != 2:
        raise SkalabError(f"q={args.q} has no proper subfield; the protocol needs q = p^2")
    config = {"command": "ska", "mode": args.mode, "q": args.q, "seed": seed,
              "format": fmt, "version": __version__}
    if args.mode == "run":
        flag = sample_flag(args.q, seed)
        result = run_session(flag)
        _emit(args, canonical_json(envelope("ska", config, {"session": result.to_json_dict()})))
        return 0
    audit = secrecy_audit(args.q)
    _emit(args, canonical_json(envelope("ska", config, {"audit": audit.to_json_dict()})))
    return 0 if audit.uniform else 3


def cmd_cover(args) -> int:
    fmt = _resolve(args, "format", str, "json")
    seed = _resolve(args, "seed", int, 0)
    threads = _resolve(args, "threads", int, 1)
    c = _resolve(args, "c", float, 3.0)
    family = build_cover(args.q, c=c, seed=seed, threads=threads)
    config = {"command": "cover", "q": args.q, "c": c, "seed": seed,
              "format": fmt, "version": __version__}
    _emit(args, canonical_json(envelope("cover", config, {"cover": family.to_json_dict()})))
    return 0


def cmd_halve(args) -> int:
    estimator_id = _resolve(args, "estimator", str, "zlib")
    try:
        with open(args.x_file, "rb") as fh:
            x = fh.read()
        with open(args.y_file, "rb") as fh:
            y = fh.read()
    except OSError as exc:
        raise SkalabError(f"cannot read input: {exc}") from exc
    est = get_estimator(estimator_id, x, y)
    report = halve(x, y, est)
    config = {"command": "halve", "x_file": args.x_file, "y_file": args.y_file,
              "estimator": estimator_id, "version": __version__}
    _emit(args, canonical_json(envelope("halve", config, {"halve": report.to_json_dict()})))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skalab",
        description="Projective-plane incidence experiments with seeded determinism.",
    )
    parser.add_argument("--version", action="version", version=f"skalab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_seed=True, with_format=True):
        p.add_argument("--config", default=None, help="flat key=value defaults file")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        if with_seed:
            p.add_argument("--seed", type=int, default=None)
        if with_format:
            p.add_argument("--format", choices=("json", "csv"), default=None)

    p_plane = sub.add_parser("plane", help="enumerate PG(2,q)")
    p_plane.add_argument("--q", type=int, required=True)
    p_plane.add_argument("--flags", action="store_true", help="include the full flag listing")
    common(p_plane)
    p_plane.set_defaults(func=cmd_plane)

    p_audit = sub.add_parser("audit", help="density audit of an induced subgraph")
    p_audit.add_argument("--q", type=int, required=True)
    p_audit.add_argument("--baer", action="store_true", help="audit the Baer subplane query")
    p_audit.add_argument("--a", type=int, default=None, help="target left size")
    p_audit.add_argument("--b", type=int, default=None, help="target right size")
    p_audit.add_argument("--strategy", choices=STRATEGIES, default=None)
    p_audit.add_argument("--iters", type=int, default=None)
    p_audit.add_argument("--threads", type=int, default=None)
    common(p_audit)
    p_audit.set_defaults(func=cmd_audit)

    p_ska = sub.add_parser("ska", help="run or audit the key-agreement protocol")
    p_ska.add_argument("mode", choices=("run", "audit"))
    p_ska.add_argument("--q", type=int, required=True)
    common(p_ska)
    p_ska.set_defaults(func=cmd_ska)

    p_cover = sub.add_parser("cover", help="randomized subplane covering family")
    p_cover.add_argument("--q", type=int, required=True)
    p_cover.add_argument("--c", type=float, default=None, help="oversampling constant")
    p_cover.add_argument("--threads", type=int, default=None)
    common(p_cover)
    p_cover.set_defaults(func=cmd_cover)

    p_halve = sub.add_parser("halve", help="winding-number halving walk on two files")
    p_halve.add_argument("--x-file", required=True)
    p_halve.add_argument("--y-file", required=True)
    p_halve.add_argument("--estimator", choices=ESTIMATOR_IDS, default=None)
    common(p_halve, with_seed=False)
    p_halve.set_defaults(func=cmd_halve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.config_values = _read_config_file(args.config) if args.config else {}
    except (OSError, ValueError) as exc:
        print(f"skalab: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"skalab: invariant violation: {exc}", file=sys.stderr)
        return 3
    except SkalabError as exc:
        print(f"skalab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
