"""Command-line interface: ``rankone <group> <command> [options]``.

Exit status is 0 on success, 1 on usage errors and 2 on domain errors, which
print a single ``error: <Kind>: <message>`` line to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__
from .actions import CATALOG, lyapunov_list, load_action, parse_action_file, spec_to_dict
from .entropy_geometry import (
    Polytope,
    ball_svg,
    directional_entropy,
    entropy_bounds,
    fried_average_entropy,
    polytope_csv,
    polytope_volume,
    relational_entropy,
    unit_ball,
)
from .errors import ParseError, RankOneError
from .periodic import fix_count, fix_grid, grid_csv, hull_experiment
from .sync import rstar_trace, strong_sync_count_123, sync_family, sync_growth_rate, trace_csv, weak_sync_count
from .zeta import (
    directional_zeta_x2x3,
    nonexpansive_directions,
    omega_csv,
    omega_set,
    omega_svg,
    zeta_series,
    zeta_series_check,
)

LOG2 = math.log(2)

# Options whose values may start with "-" (negative vectors and ranges).
_VALUE_FLAGS = ("--n", "--n1", "--n2", "--t", "--pairs")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# Argument helpers


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise ParseError(f"expected comma-separated numbers, got {text!r}") from None


def _range(text: str) -> range:
    try:
        a, b = text.split("..")
        return range(int(a), int(b) + 1)
    except ValueError:
        raise ParseError(f"expected a range a..b, got {text!r}") from None


def _real(x: float, args) -> str:
    return f"{x:.{args.precision}g}"


def _entropy(x: float, args) -> float:
    return x / LOG2 if args.bits else x


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj: dict) -> str:
    return json.dumps({"schema": 1, **obj}, indent=2, ensure_ascii=False) + "\n"


def _fmt(args, allowed: Sequence[str], default: str) -> str:
    fmt = args.format or default
    if fmt not in allowed:
        raise UsageError(f"--format {fmt} is not available here (choose from {', '.join(allowed)})")
    return fmt


# ---------------------------------------------------------------------------
# action


def cmd_action_list(args):
    if _fmt(args, ("json", "text"), "text") == "json":
        return _json({"actions": list(CATALOG)})
    return "".join(name + "\n" for name in CATALOG)


def cmd_action_show(args):
    spec = load_action(args.action)
    L = lyapunov_list(spec)
    body = spec_to_dict(spec)
    body["lyapunov"] = [
        {
            "vector": [round(_entropy(x, args), args.precision) + 0.0 for x in e.vector],
            "place": e.place,
            "component": e.component,
        }
        for e in L.entries
    ]
    body["units"] = "bits" if args.bits else "nats"
    return _json({"action": body})


def cmd_action_validate(args):
    with open(args.path, encoding="utf-8") as fh:
        spec = parse_action_file(fh.read())
    return _json({"valid": True, "name": spec.name, "d": spec.d})


# ---------------------------------------------------------------------------
# entropy


def cmd_entropy_eval(args):
    spec = load_action(args.action)
    t = _floats(args.t)
    h = _entropy(float(directional_entropy(spec, t)), args)
    if _fmt(args, ("json", "text"), "text") == "json":
        return _json({"t": list(t), "h": h, "units": "bits" if args.bits else "nats"})
    return _real(h, args) + "\n"


def cmd_entropy_ball(args):
    spec = load_action(args.action)
    P = unit_ball(spec)
    if args.bits:
        # h in bits is h / log 2, so its unit ball is U scaled by log 2
        P = Polytope(P.normals / LOG2, P.vertices * LOG2, P.incidence)
    fmt = _fmt(args, ("json", "csv", "svg"), "json")
    if fmt == "csv":
        return polytope_csv(P, args.precision)
    if fmt == "svg":
        return ball_svg(P)
    return _json(
        {
            "action": spec.name,
            "facets": P.n_facets,
            "vertices": [[round(float(x), args.precision) + 0.0 for x in v] for v in P.vertices],
            "volume": polytope_volume(P),
        }
    )


def cmd_entropy_fried(args):
    spec = load_action(args.action)
    h = fried_average_entropy(spec)
    vol = polytope_volume(unit_ball(spec))
    if args.bits:
        h, vol = h / LOG2**spec.d, vol * LOG2**spec.d
    if _fmt(args, ("json", "text"), "text") == "json":
        return _json({"action": spec.name, "fried_average_entropy": h, "unit_ball_volume": vol})
    return _real(h, args) + "\n"


def cmd_entropy_bounds(args):
    spec = load_action(args.action)
    c1, c2 = entropy_bounds(spec)
    c1, c2 = _entropy(c1, args), _entropy(c2, args)
    if _fmt(args, ("json", "text"), "text") == "json":
        return _json({"action": spec.name, "C1": c1, "C2": c2})
    return f"{_real(c1, args)} {_real(c2, args)}\n"


def cmd_entropy_relational(args):
    pairs = []
    for chunk in args.pairs.split(";"):
        if chunk.strip():
            s, t = _floats(chunk)
            pairs.append((s, t))
    h = _entropy(relational_entropy(pairs), args)
    if _fmt(args, ("json", "text"), "text") == "json":
        return _json({"pairs": pairs, "relational_entropy": h})
    return _real(h, args) + "\n"


# ---------------------------------------------------------------------------
# fix


def cmd_fix_count(args):
    spec = load_action(args.action)
    c = fix_count(spec, _ints(args.n))
    if _fmt(args, ("json", "text"), "text") == "json":
        return _json({"action": spec.name, "n": list(_ints(args.n)), "count": str(c)})
    return f"{c}\n"


def cmd_fix_grid(args):
    spec = load_action(args.action)
    n1, n2 = _range(args.n1), _range(args.n2)
    grid = fix_grid(spec, n1, n2)
    if _fmt(args, ("json", "csv"), "csv") == "csv":
        return grid_csv(grid)
    return _json(
        {
            "action": spec.name,
            "n1": list(n1),
            "n2": sorted(n2, reverse=True),
            "rows": [[str(c) for c in row] for row in grid],
        }
    )


# ---------------------------------------------------------------------------
# hull


def cmd_hull_run(args):
    spec = load_action(args.action)
    logNs = _floats(args.logN)
    records = hull_experiment(spec, logNs, args.delta, args.expansive_only, args.workers)
    _fmt(args, ("json",), "json")
    return "".join(r.to_json() + "\n" for r in records)


# ---------------------------------------------------------------------------
# zeta


def cmd_zeta_show(args):
    n = _ints(args.n)
    z = directional_zeta_x2x3(n)
    if _fmt(args, ("json", "text"), "text") == "json":
        return _json({"n": list(n), "numerator": list(z.numerator), "denominator": list(z.denominator)})
    return f"{z}\n"


def cmd_zeta_check(args):
    spec = load_action(args.action)
    n = _ints(args.n)
    fmt = _fmt(args, ("json", "text"), "text")
    if spec.name == "times2_times3":
        ok = zeta_series_check(spec, n, directional_zeta_x2x3(n), args.K)
        if fmt == "json":
            return _json({"n": list(n), "K": args.K, "closed_form": str(directional_zeta_x2x3(n)), "agrees": ok})
        return ("ok" if ok else "mismatch") + "\n"
    coeffs = zeta_series(spec, n, args.K)
    if fmt == "json":
        return _json({"n": list(n), "K": args.K, "series": [str(c) for c in coeffs]})
    return " ".join(str(c) for c in coeffs) + "\n"


def cmd_zeta_omega(args):
    pts = omega_set(args.radius, args.per_cone)
    fmt = _fmt(args, ("json", "csv", "svg"), "csv")
    if fmt == "csv":
        return omega_csv(pts, args.precision)
    if fmt == "svg":
        return omega_svg(pts)
    return _json({"radius": args.radius, "points": [[p.theta, p.y] for p in pts]})


def cmd_zeta_nonexpansive(args):
    spec = load_action(args.action)
    planes = nonexpansive_directions(spec)
    if _fmt(args, ("json", "text"), "text") == "json":
        return _json({"action": spec.name, "normals": [list(h.normal) for h in planes]})
    return "".join(h.describe(args.precision) + "\n" for h in planes)


# ---------------------------------------------------------------------------
# sync


def cmd_sync_pair(args):
    fam = sync_family(sorted({args.a, args.b, "x1"}))
    c = weak_sync_count(fam, args.a, args.b, args.n)
    if _fmt(args, ("json", "text"), "text") == "json":
        return _json({"a": args.a, "b": args.b, "n": args.n, "count": str(c)})
    return f"{c}\n"


def cmd_sync_strong(args):
    c = strong_sync_count_123(args.n)
    if _fmt(args, ("json", "text"), "text") == "json":
        return _json({"n": args.n, "count": str(c)})
    return f"{c}\n"


def cmd_sync_rate(args):
    r = sync_growth_rate(sync_family(args.maps.split(",")))
    if _fmt(args, ("json", "text"), "text") == "json":
        return _json({"maps": args.maps.split(","), "rate": str(Fraction(r)), "rate_float": float(r)})
    return _real(float(r), args) + "\n"


def cmd_sync_trace(args):
    rows = rstar_trace(sync_family(), args.nmax)
    fmt = _fmt(args, ("json", "csv"), "csv")
    if fmt == "csv":
        return trace_csv(rows, args.precision)
    return _json(
        {
            "rows": [
                {"n": r.n, "count": str(r.count), "root": r.root, "tail_max": r.tail_max, "trivial": r.trivial}
                for r in rows
            ]
        }
    )


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "svg", "text"))
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--precision", type=int, default=12, help="significant digits for reals")
    common.add_argument("--bits", action="store_true", help="report entropies in bits instead of nats")

    p = _Parser(prog="rankone", description="Entropy geometry and periodic points of rank-one Z^d-actions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def command(group, name, func, help_):
        sp = group.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    g = groups.add_parser("action", help="catalog and action files").add_subparsers(dest="cmd", required=True)
    command(g, "list", cmd_action_list, "list catalog actions")
    command(g, "show", cmd_action_show, "action description and Lyapunov list").add_argument("action")
    command(g, "validate", cmd_action_validate, "validate an action file").add_argument("path")

    g = groups.add_parser("entropy", help="directional entropy geometry").add_subparsers(dest="cmd", required=True)
    sp = command(g, "eval", cmd_entropy_eval, "h(t)")
    sp.add_argument("action")
    sp.add_argument("--t", required=True, help="direction, e.g. 1,-2")
    command(g, "ball", cmd_entropy_ball, "unit ball vertices, CSV or SVG").add_argument("action")
    command(g, "fried", cmd_entropy_fried, "Fried average entropy").add_argument("action")
    command(g, "bounds", cmd_entropy_bounds, "min and max of h on the unit sphere").add_argument("action")
    command(g, "relational", cmd_entropy_relational, "relational entropy of Lyapunov pairs").add_argument(
        "--pairs", required=True, help="s1,t1;s2,t2;..."
    )

    g = groups.add_parser("fix", help="periodic point counts").add_subparsers(dest="cmd", required=True)
    sp = command(g, "count", cmd_fix_count, "|Fix(alpha^n)|")
    sp.add_argument("action")
    sp.add_argument("--n", required=True)
    sp = command(g, "grid", cmd_fix_grid, "counts over a rectangle")
    sp.add_argument("action")
    sp.add_argument("--n1", required=True, help="range a..b")
    sp.add_argument("--n2", required=True, help="range a..b")

    g = groups.add_parser("hull", help="convex hull growth").add_subparsers(dest="cmd", required=True)
    sp = command(g, "run", cmd_hull_run, "vol H(N) / (log N)^d")
    sp.add_argument("action")
    sp.add_argument("--logN", required=True, help="comma-separated thresholds")
    sp.add_argument("--delta", type=float, default=0.9)
    sp.add_argument("--expansive-only", action="store_true")
    sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    g = groups.add_parser("zeta", help="directional zeta functions").add_subparsers(dest="cmd", required=True)
    command(g, "show", cmd_zeta_show, "closed form for x2,x3").add_argument("--n", required=True)
    sp = command(g, "check", cmd_zeta_check, "closed form against counts")
    sp.add_argument("action")
    sp.add_argument("--n", required=True)
    sp.add_argument("--K", type=int, default=8)
    sp = command(g, "omega", cmd_zeta_omega, "pole/zero scatter")
    sp.add_argument("--radius", type=float, default=50.0)
    sp.add_argument("--per-cone", type=int, default=None)
    command(g, "nonexpansive", cmd_zeta_nonexpansive, "non-expansive hyperplanes").add_argument("action")

    g = groups.add_parser("sync", help="synchronization points").add_subparsers(dest="cmd", required=True)
    sp = command(g, "pair", cmd_sync_pair, "weak count for a pair")
    sp.add_argument("a", choices=("x1", "x2", "x3"))
    sp.add_argument("b", choices=("x1", "x2", "x3"))
    sp.add_argument("--n", type=int, required=True)
    command(g, "strong", cmd_sync_strong, "gcd(3^n-1, 2^n-1)").add_argument("--n", type=int, required=True)
    command(g, "rate", cmd_sync_rate, "growth rate r").add_argument("--maps", default="x2,x3")
    command(g, "trace", cmd_sync_trace, "strong counts and n-th roots").add_argument("--nmax", type=int, default=20)
    return p


def _join_values(argv: Sequence[str]) -> list[str]:
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_values(argv))
    except SystemExit as e:
        return int(e.code or 0)
    try:
        _emit(args, args.func(args))
    except UsageError as e:
        print(f"rankone: error: {e}", file=sys.stderr)
        return 1
    except RankOneError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())
