"""Command line interface.

Subcommands: divergence, bound, solve, certify, sweep, volume. Inputs are
JSON, inline or by file path. Exit status: 0 on success, 1 when a checked
bound is violated, 2 on usage or input errors (single-line diagnostic on
stderr naming the failing field).

Output is deterministic for a fixed seed: JSON uses sorted keys and
17-significant-digit floats, and nothing depends on FANO_THREADS (a reserved
parallelism knob; it is validated if set and otherwise ignored).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

from . import bounds as _bounds
from . import chains as _chains
from . import jsonio
from . import verify as _verify
from .distributions import distribution_from_json
from .divergences import kl_divergence, renyi_divergence
from .errors import FanoError
from .relations import domain_from_json
from .bounds import BoundInputs, reports_to_csv


def _thread_cap() -> int:
    raw = os.environ.get("FANO_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise FanoError(f"FANO_THREADS: must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise FanoError(f"FANO_THREADS: must be a positive integer, got {raw!r}")
    return value


def _load_json(argument: str):
    text = argument
    if not argument.lstrip().startswith(("{", "[")):
        try:
            with open(argument, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise FanoError(f"input: cannot read {argument!r} ({exc})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FanoError(f"input: invalid JSON ({exc})") from None


def _parse_base(text: str) -> float:
    if text.strip().lower() == "e":
        return math.e
    try:
        value = float(text)
    except ValueError:
        raise FanoError(f"base: expected a number or 'e', got {text!r}") from None
    return value


def _parse_alpha(text: str):
    s = text.strip().lower()
    if s == "kl":
        return "kl"
    if s in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise FanoError(f"alpha: expected a number, 'inf' or 'kl', got {text!r}") from None


def _write_output(text: str, out_path: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out_path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out_path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp_path, out_path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _report_table(report: _bounds.BoundReport) -> str:
    rows = [
        ("mode", report.mode),
        ("bound_value", report.bound_value),
        ("observed", report.observed),
        ("slack", report.slack),
        ("feasible_sup", report.feasible_sup),
        ("solver_tolerance", report.solver_tolerance),
        ("holds", report.holds),
        ("notes", report.notes or "-"),
    ]
    lines = []
    for name, value in rows:
        if isinstance(value, float):
            value = _bounds._csv_cell(value)
        lines.append("%-17s %s" % (name + ":", value))
    return "\n".join(lines)


def _emit_reports(reports: list, fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        obj = {"reports": {r.instance_id or "report": r.to_json_obj() for r in reports}}
        _write_output(jsonio.dumps(obj), out_path)
    elif fmt == "csv":
        _write_output(reports_to_csv(reports), out_path)
    else:
        blocks = []
        for r in reports:
            head = ("[%s]\n" % r.instance_id) if r.instance_id else ""
            blocks.append(head + _report_table(r))
        _write_output("\n\n".join(blocks), out_path)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--base", default="e", help="logarithm base (number or 'e')")
    parser.add_argument("--format", choices=("table", "json", "csv"),
                        default="table", help="output format")
    parser.add_argument("--out", default=None, help="write output to this file")
    parser.add_argument("--tolerance", type=float, default=1e-9,
                        help="slack tolerance for pass/fail")
    parser.add_argument("--seed", type=int, default=0, help="stream seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fano",
        description="Diffusion-style reconstruction bounds over finite and "
                    "continuous alphabets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("divergence", help="order-alpha or KL divergence of two "
                                          "distributions")
    p.add_argument("P", help="first distribution (JSON or path)")
    p.add_argument("Q", help="second distribution (JSON or path)")
    p.add_argument("--alpha", default="kl", help="order, 'inf', or 'kl'")
    _add_common(p)

    p = sub.add_parser("bound", help="check one bound from scalar inputs")
    p.add_argument("input", help="bound description (JSON or path)")
    p.add_argument("--alpha", default=None, help="override the order")
    p.add_argument("--pmin", type=float, default=None, help="override p_min")
    p.add_argument("--pmax", type=float, default=None, help="override p_max")
    _add_common(p)

    p = sub.add_parser("solve", help="solve the self-consistent bound for its "
                                     "extreme probability")
    p.add_argument("input", help="bound description (JSON or path)")
    p.add_argument("--alpha", default=None, help="override the order")
    p.add_argument("--pmin", type=float, default=None, help="override p_min")
    p.add_argument("--pmax", type=float, default=None, help="override p_max")
    _add_common(p)

    p = sub.add_parser("certify", help="run every applicable bound on a chain")
    p.add_argument("experiment", help="experiment description (JSON or path)")
    p.add_argument("--trials", type=int, default=None,
                   help="force the Monte Carlo chain with this many trials")
    p.add_argument("--n", type=int, default=None, help="override sample count")
    _add_common(p)

    p = sub.add_parser("sweep", help="exhaustive grid verification of the "
                                     "diffusion bounds")
    p.add_argument("--k", default="2,3,4", help="comma-separated outcome counts")
    p.add_argument("--denominator", type=int, default=8, help="weight grid denominator")
    p.add_argument("--alphas", default="0.25,0.5,2,4",
                   help="comma-separated orders (KL is always included)")
    p.add_argument("--timing", action="store_true",
                   help="include elapsed time in the output")
    _add_common(p)

    p = sub.add_parser("volume", help="supremal ball volume of a continuous domain")
    p.add_argument("domain", help="domain description (JSON or path)")
    p.add_argument("--method", choices=("auto", "exact", "monte-carlo", "grid"),
                   default="auto")
    p.add_argument("--samples", type=int, default=65536, help="draws per center")
    p.add_argument("--resolution", type=int, default=64, help="grid cells per axis")
    _add_common(p)
    return parser


def _scalar_output(obj: dict, fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        _write_output(jsonio.dumps(obj), out_path)
    elif fmt == "csv":
        keys = sorted(obj.keys())
        cells = [_bounds._csv_cell(obj[k]) if not isinstance(obj[k], str) else obj[k]
                 for k in keys]
        _write_output(",".join(keys) + "\n" + ",".join(cells), out_path)
    else:
        lines = ["%-14s %s" % (k + ":", _bounds._csv_cell(v) if isinstance(v, float) else v)
                 for k, v in sorted(obj.items())]
        _write_output("\n".join(lines), out_path)


def _cmd_divergence(args) -> int:
    base = _parse_base(args.base)
    P = distribution_from_json(_load_json(args.P))
    Q = distribution_from_json(_load_json(args.Q))
    alpha = _parse_alpha(args.alpha)
    if alpha == "kl":
        value = kl_divergence(P, Q, base)
    else:
        value = renyi_divergence(P, Q, alpha, base)
    _scalar_output({"alpha": alpha, "base": base, "value": value},
                   args.format, args.out)
    return 0


def _bound_inputs_from_json(obj: dict, args, base: float) -> BoundInputs:
    alpha = obj.get("alpha", "kl")
    if args.alpha is not None:
        alpha = _parse_alpha(args.alpha)
    elif isinstance(alpha, str):
        alpha = _parse_alpha(alpha)
    p_min = args.pmin if args.pmin is not None else obj.get("p_min")
    p_max = args.pmax if args.pmax is not None else obj.get("p_max")
    if p_min is None or p_max is None:
        raise FanoError("p_min, p_max: required (in the input object or via flags)")
    divergence = obj.get("divergence")
    if divergence is None:
        raise FanoError("divergence: required in the input object")
    return BoundInputs(divergence=jsonio.parse_extended(divergence), alpha=alpha,
                       p_min=float(p_min), p_max=float(p_max), base=base)


def _cmd_bound(args, solve: bool) -> int:
    base = _parse_base(args.base)
    obj = _load_json(args.input)
    if not isinstance(obj, dict):
        raise FanoError("input: expected a JSON object")
    kind = obj.get("kind", "kl")
    if kind in ("kl", "renyi"):
        inputs = _bound_inputs_from_json(obj, args, base)
        if solve:
            report = _bounds.solve_diffusion(inputs)
        else:
            p_obs = obj.get("p", obj.get("observed"))
            if p_obs is None:
                raise FanoError("p: the observed probability is required for check mode")
            if isinstance(inputs.alpha, str) and inputs.alpha == "kl":
                report = _bounds.check_kl_diffusion(float(p_obs), inputs,
                                                    args.tolerance)
            else:
                report = _bounds.check_renyi_diffusion(float(p_obs), inputs,
                                                       args.tolerance)
    elif kind == "mi-distance":
        for key in ("mi", "size", "ball_max"):
            if key not in obj:
                raise FanoError(f"{key}: required for the mi-distance bound")
        report = _bounds.mi_distance_bound(
            jsonio.parse_extended(obj["mi"]), int(obj["size"]), int(obj["ball_max"]),
            p_t=None if solve else obj.get("p_t"),
            mode="solve" if solve else "check",
            base=base, tolerance=args.tolerance)
    elif kind == "continuous":
        if "mi" not in obj or "domain" not in obj:
            raise FanoError("mi, domain: required for the continuous bound")
        report = _bounds.continuous_fano_bound(
            jsonio.parse_extended(obj["mi"]), domain_from_json(obj["domain"]),
            p_t=None if solve else obj.get("p_t"),
            variant=obj.get("variant", "log2"),
            mode="solve" if solve else "check",
            volume_method=obj.get("method", "auto"),
            samples=int(obj.get("samples", 65536)),
            seed=args.seed,
            resolution=int(obj.get("resolution", 64)),
            base=base, tolerance=args.tolerance)
    else:
        raise FanoError(f"kind: unknown bound kind {kind!r}")
    _emit_reports([report], args.format, args.out)
    return 0 if (solve or report.holds) else 1


def _cmd_certify(args) -> int:
    base = _parse_base(args.base)
    obj = _load_json(args.experiment)
    if isinstance(obj, dict) and "base" not in obj:
        obj = dict(obj, base=base)
    exp = _chains.experiment_from_json(obj)
    if args.n is not None:
        import dataclasses
        exp = dataclasses.replace(exp, n_samples=args.n)
    reports = _chains.certify(exp, trials=args.trials, seed=args.seed,
                              tolerance=args.tolerance)
    _emit_reports(reports, args.format, args.out)
    return 0 if all(r.holds is not False for r in reports) else 1


def _cmd_sweep(args) -> int:
    try:
        counts = tuple(int(v) for v in args.k.split(",") if v.strip())
        alphas = tuple(float(v) for v in args.alphas.split(",") if v.strip())
    except ValueError:
        raise FanoError("k, alphas: expected comma-separated numbers") from None
    spec = _verify.SweepSpec(outcome_counts=counts,
                             weight_grid_denominator=args.denominator,
                             alphas=alphas, tolerance=args.tolerance,
                             seed=args.seed)
    summary = _verify.sweep_diffusion(spec)
    if args.format == "json":
        _write_output(jsonio.dumps(summary.to_json_obj(include_timing=args.timing)),
                      args.out)
    elif args.format == "csv":
        header = ["instances", "violations", "max_violation", "worst_id"]
        cells = [str(summary.instances), str(summary.violations),
                 _bounds._csv_cell(summary.max_violation),
                 summary.worst_instance["id"] if summary.worst_instance else ""]
        if args.timing:
            header.append("elapsed_ms")
            cells.append(_bounds._csv_cell(summary.elapsed_ms))
        _write_output(",".join(header) + "\n" + ",".join(cells), args.out)
    else:
        lines = [
            "instances:     %d" % summary.instances,
            "violations:    %d" % summary.violations,
            "max_violation: %s" % _bounds._csv_cell(summary.max_violation),
            "worst:         %s" % (summary.worst_instance["id"]
                                   if summary.worst_instance else "-"),
        ]
        if args.timing:
            lines.append("elapsed_ms:    %s" % _bounds._csv_cell(summary.elapsed_ms))
        _write_output("\n".join(lines), args.out)
    return 1 if summary.violations else 0


def _cmd_volume(args) -> int:
    domain = domain_from_json(_load_json(args.domain))
    value, error = _verify_sup_ball(domain, args)
    _scalar_output({"value": value, "error": error, "method": args.method},
                   args.format, args.out)
    return 0


def _verify_sup_ball(domain, args):
    from .relations import sup_ball_volume
    return sup_ball_volume(domain, method=args.method, samples=args.samples,
                           seed=args.seed, resolution=args.resolution)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _thread_cap()
        if args.command == "divergence":
            return _cmd_divergence(args)
        if args.command == "bound":
            return _cmd_bound(args, solve=False)
        if args.command == "solve":
            return _cmd_bound(args, solve=True)
        if args.command == "certify":
            return _cmd_certify(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "volume":
            return _cmd_volume(args)
        raise FanoError(f"command: unknown command {args.command!r}")
    except FanoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
