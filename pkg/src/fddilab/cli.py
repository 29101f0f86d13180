"""Command-line entry point.

    fddilab tables {2|3|4|5}
    fddilab rates [--links L] [--ber P] [--frame-octets N] [--latency D] [--mode M]
    fddilab verify {table6|table8|table9|fcs-multiples}
    fddilab search --events K --symbols N [--check NAME]
    fddilab parse --stream SYMBOLS [--mode M] [--check NAME]
    fddilab simulate [--trials T] [--seed S] [--links L] [--ber P] [--frame-octets N] [--mode M]

Every subcommand takes --format json|csv|markdown. Exit status is 0 on
success, 1 when a regenerated value disagrees with its printed counterpart
and 2 on bad usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__, analytics, golden, search, sim
from .coding import parse_symbol_text
from .fcs import CHECKS
from .frames import MODES, parse, validate
from .noise import tabulate_effects

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def sci(x) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(x, ".4E")


def _plain(obj):
    """JSON-ready copy with every float as a scientific-notation string."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return sci(float(obj))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _cell(v) -> str:
    v = _plain(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    return "" if v is None else str(v)


def render(subcommand: str, parameters: dict, rows: list[dict], fmt: str, extra=None, warnings=()) -> str:
    if fmt == "json":
        results = {"rows": rows}
        if extra:
            results.update(extra)
        env = {
            "tool_version": __version__,
            "subcommand": subcommand,
            "parameters": parameters,
            "results": results,
            "warnings": list(warnings),
        }
        return json.dumps(_plain(env), indent=2, sort_keys=False) + "\n"
    columns = list(dict.fromkeys(k for r in rows for k in r))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(r.get(k)) for k in columns})
        return buf.getvalue()
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for r in rows:
        lines.append("| " + " | ".join(_cell(r.get(k)).replace("|", "\\|") for k in columns) + " |")
    for w in warnings:
        lines.append(f"\n> warning: {w}")
    return "\n".join(lines) + "\n"


# tables -------------------------------------------------------------------


def _table_rows(which: str) -> tuple[list[dict], bool]:
    tab = tabulate_effects()
    rows = []
    if which == "2":
        for s, effects in tab.effects.items():
            got = "".join(e.value for e in effects)
            rows.append({"symbol": s, **{_col(c): e.value for c, e in zip(golden.TABLE2_COLUMNS, effects)},
                         "match": got == golden.TABLE2[s]})
    elif which == "3":
        for cat, (count, pct) in golden.TABLE3_INTRA.items():
            got = (tab.intra_counts.get(cat, 0), tab.intra_percent(cat))
            rows.append({"block": "intrasymbol", "outcome": cat, "count": got[0], "percent": got[1],
                         "match": got == (count, pct)})
        for cat, (count, pct) in golden.TABLE3_INTER.items():
            got = (tab.inter_counts.get(cat, 0), tab.inter_percent(cat))
            rows.append({"block": "intersymbol", "outcome": cat, "count": got[0], "percent": got[1],
                         "match": got == (count, pct)})
        for name, share, printed in (
            ("symbol_violation", tab.symbol_violation_share, golden.SYMBOL_VIOLATION_SHARE),
            ("data_to_data", tab.data_share, golden.DATA_TO_DATA_SHARE),
            ("control", tab.control_share, golden.CONTROL_SHARE),
        ):
            pct = _pct(share)
            rows.append({"block": "share", "outcome": name, "count": None, "percent": pct, "match": pct == printed})
    elif which == "4":
        for s, pats in tab.error_patterns.items():
            rows.append({"symbol": s, **{_col(c): p or "" for c, p in zip(golden.TABLE2_COLUMNS, pats)},
                         "match": pats == golden.TABLE4[s]})
    elif which == "5":
        for pat, (count, pct) in golden.TABLE5.items():
            got = (tab.pattern_counts.get(pat, 0), tab.pattern_percent(pat))
            rows.append({"pattern": pat, "count": got[0], "percent": got[1], "match": got == (count, pct)})
    else:
        raise UsageError(f"no table {which}")
    return rows, all(r["match"] for r in rows)


def _col(positions) -> str:
    """Column label for a set of changed code-bit positions, e.g. "bits 1-2"."""
    return "bits " + "-".join(map(str, positions))


def _pct(frac) -> str:
    from .noise import percent

    return percent(frac.numerator, frac.denominator)


# rates --------------------------------------------------------------------

_UNITS = {"frame_error": "M_ms", "token_loss": "M_s"}
_MODE_ROWS = {
    "enhanced": ("frame_error", "token_loss", "fcs3", "fcs4", "false_ed", "false_sd"),
    "baseline": ("false_ed_baseline", "fcs3_baseline", "fcs4_baseline"),
    "option_a": ("false_ed_option_a",),
}


def _printed_column(params: analytics.RingParams) -> int | None:
    for i, col in enumerate(golden.TABLE10_COLUMNS):
        if (col["links"], col["ber"], col["frame_octets"] * 10) == (params.links, params.ber, params.frame_bits) and \
                math.isclose(params.latency, analytics.LARGE_RING_LATENCY * params.links / 1000):
            return i
    return None


def rates_rows(params: analytics.RingParams, mode: str = "all") -> tuple[list[dict], bool]:
    grid = analytics.rate_grid(params)
    col = _printed_column(params)
    names = [n for m, ns in _MODE_ROWS.items() if mode in ("all", m) for n in ns]
    rows, ok = [], True
    for name in names:
        rep = grid[name]
        unit = _UNITS.get(name, "M_yr")
        row = {
            "quantity": name,
            "probability": rep.probability,
            "mean_time": analytics.table_cell(rep, unit),
            "mean_time_unit": {"M_ms": "ms", "M_s": "s", "M_yr": "year"}[unit],
        }
        if rep.probability_exact is not None:
            row["probability_exact"] = rep.probability_exact
        if col is not None:
            printed_p = golden.TABLE10[(name, "P")][col]
            printed_m = golden.TABLE10[(name, unit)][col]
            match = analytics.matches_printed(rep.probability, printed_p) and \
                analytics.matches_printed(row["mean_time"], printed_m)
            row.update({"printed_probability": printed_p, "printed_mean_time": printed_m, "match": match})
            ok &= match
        rows.append(row)
    return rows, ok


# dispatch -----------------------------------------------------------------


def _ring(args) -> analytics.RingParams:
    try:
        return analytics.RingParams(
            links=args.links, ber=args.ber, frame_bits=args.frame_octets * 10, latency=args.latency
        )
    except analytics.InvalidRingParams as e:
        raise UsageError(str(e)) from e


def cmd_tables(args):
    rows, ok = _table_rows(args.table)
    return {"table": args.table}, rows, None, [], ok


def cmd_rates(args):
    params = _ring(args)
    rows, ok = rates_rows(params, args.mode)
    extra = {"fcs3_coefficients": analytics.fcs3_coefficients(params)}
    parameters = {"links": params.links, "ber": params.ber, "frame_octets": args.frame_octets,
                  "latency_s": params.latency, "mode": args.mode}
    return parameters, rows, extra, params.warnings(), ok


def cmd_verify(args):
    what = args.target
    warnings = []
    if what == "table6":
        rows = search.verify_table6()
        ok = all(r["codeword"] for r in rows)
    elif what == "table8":
        rows = search.verify_table8(np.random.default_rng(args.seed))
        full = search.find_undetected(3, 8990, enforce_bound=False)
        printed = {tuple(r) for r, _ in golden.TABLE8}
        found = set(full.offset_classes())
        for cls in sorted(found - printed):
            warnings.append(f"undetected triple not in the printed table: {cls}")
        total = analytics.ue_fcs(analytics.RingParams(), 3).probability
        rows.append({"row": "total", "probability": total, "printed": golden.TABLE8_TOTAL,
                     "relative_error": total / golden.TABLE8_TOTAL - 1,
                     "ok": abs(total / golden.TABLE8_TOTAL - 1) <= 0.02 and found == printed})
        ok = all(r["ok"] for r in rows)
    elif what == "table9":
        rows = search.verify_table9()
        for r in rows:
            if not r["claim_holds"]:
                warnings.append(
                    f"{r['events']} events: an undetected combination spans only "
                    f"{r['measured_min_span']} symbols, below the printed {r['printed_data_symbols']}"
                )
        ok = all(r["claim_holds"] and r["arithmetic_ok"] for r in rows)
    elif what == "fcs-multiples":
        rows = []
        for w, bound in ((3, 92000), (4, 3100), (5, 350), (6, 250)):
            poly = search.min_degree_multiple(w, bound)
            exps = sorted(poly.exponents())
            printed_bits, printed_octets = golden.TABLE7[w]
            rows.append({"weight": w, "degree": poly.degree, "exponents": exps,
                         "printed_degree": printed_bits, "max_octets": poly.degree // 8,
                         "match": poly.degree == printed_bits and tuple(exps) == golden.TABLE6[w]
                         and poly.degree // 8 == printed_octets})
        ok = all(r["match"] for r in rows)
    else:
        raise UsageError(f"unknown verification target {what}")
    return {"target": what}, rows, None, warnings, ok


def cmd_search(args):
    check = CHECKS[args.check]
    try:
        res = search.find_undetected(args.events, args.symbols, check=check, workers=args.workers)
    except search.BoundExceeded as e:
        raise UsageError(str(e)) from e
    d = res.to_dict()
    rows = [{"placements": h["placements"], "span": h["span"], "exponents": h["exponents"]} for h in d["hits"]]
    parameters = {"events": args.events, "symbols": args.symbols, "check": args.check}
    return parameters, rows, {"min_span": d["min_span"], "hit_count": len(rows)}, [], True


def cmd_parse(args):
    try:
        stream = parse_symbol_text(args.stream)
    except ValueError as e:
        raise UsageError(str(e)) from e
    check = CHECKS[args.check]
    result = parse(stream)
    rows = []
    for c in result.candidates:
        verdict = validate(c, mode=args.mode, check=check) if c.kind == "frame" else None
        rows.append({
            "kind": c.kind,
            "start": c.start,
            "end": c.end,
            "body": c.body,
            "indicators": c.indicators,
            "aborted": c.aborted,
            "valid": verdict.valid if verdict else c.aborted is None,
            "failure": verdict.failure if verdict else None,
        })
    events = [{"kind": e.kind, "position": e.position, "detail": e.detail} for e in result.events]
    return {"stream": stream, "mode": args.mode, "check": args.check}, rows, {"events": events}, [], True


def cmd_simulate(args):
    ring = _ring(args)
    check = CHECKS[args.check]
    try:
        config = sim.SimConfig(
            ring, trials=args.trials, seed=args.seed, mode=args.mode, check=check,
            destination=args.destination if args.destination == "uniform" else int(args.destination),
        )
    except (sim.InvalidSimConfig, ValueError) as e:
        raise UsageError(str(e)) from e
    parameters = {"trials": args.trials, "seed": args.seed, "links": ring.links, "ber": ring.ber,
                  "frame_octets": args.frame_octets, "mode": args.mode, "check": args.check,
                  "destination": args.destination, "token": args.token}
    warnings = ring.warnings()
    if args.token:
        tally = sim.run_token(config)
        pred = sim.predictions(ring)["token_loss"]
        lost = tally["token_lost"] + tally["token_converted"]  # either way the token is not seen
        extra = {"token_loss_fraction": lost / tally.trials,
                 "token_loss_interval95": list(sim.wilson_interval(lost, tally.trials)),
                 "token_loss_predicted": pred}
    else:
        tally = sim.run(config)
        rep = sim.report(config, tally)
        extra = {k: v for k, v in rep.items() if k != "tally"}
        warnings += rep["notes"]
    rows = [{"outcome": c, "count": tally[c], "fraction": tally.fraction(c)} for c in sim.CLASSES]
    return parameters, rows, extra, warnings, True


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv", "markdown"), default="json")

    ring = argparse.ArgumentParser(add_help=False)
    ring.add_argument("--links", type=int, default=1000)
    ring.add_argument("--ber", type=float, default=2.5e-10)
    ring.add_argument("--frame-octets", type=int, default=4500)
    ring.add_argument("--latency", type=float, default=None, help="ring latency in seconds (default 1.773 ms per 1000 links)")

    p = argparse.ArgumentParser(prog="fddilab", description="FDDI error analysis toolkit")
    p.add_argument("--version", action="version", version=f"fddilab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tables", parents=[fmt], help="regenerate the single-event effect tables")
    t.add_argument("table", choices=("2", "3", "4", "5"))
    t.set_defaults(func=cmd_tables)

    r = sub.add_parser("rates", parents=[fmt, ring], help="closed-form error rates")
    r.add_argument("--mode", choices=("all",) + MODES, default="all")
    r.set_defaults(func=cmd_rates)

    v = sub.add_parser("verify", parents=[fmt], help="check printed tables against computation")
    v.add_argument("target", choices=("table6", "table8", "table9", "fcs-multiples"))
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", parents=[fmt], help="exhaustive search for undetected noise events")
    s.add_argument("--events", type=int, required=True)
    s.add_argument("--symbols", type=int, required=True)
    s.add_argument("--check", choices=tuple(CHECKS), default="fcs32")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_search)

    pa = sub.add_parser("parse", parents=[fmt], help="delimit and validate a symbol stream")
    pa.add_argument("--stream", required=True)
    pa.add_argument("--mode", choices=MODES, default="enhanced")
    pa.add_argument("--check", choices=tuple(CHECKS), default="fcs32")
    pa.set_defaults(func=cmd_parse)

    m = sub.add_parser("simulate", parents=[fmt, ring], help="Monte Carlo ring simulation")
    m.add_argument("--trials", type=int, default=10_000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--mode", choices=MODES, default="enhanced")
    m.add_argument("--check", choices=tuple(CHECKS), default="fcs32")
    m.add_argument("--destination", default="uniform")
    m.add_argument("--token", action="store_true", help="circulate a token instead of a frame")
    m.add_argument("--report", dest="format", choices=("json", "csv", "markdown"))
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        parameters, rows, extra, warnings, ok = args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"fddilab {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(args.command, parameters, rows, args.format, extra, warnings))
    return EXIT_OK if ok else EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
