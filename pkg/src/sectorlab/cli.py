"""Config-driven command-line front end.

Exit codes: 0 = success (criterion satisfied where one applies),
1 = criterion rejection (a successful computation whose selection
criterion failed), 2 = input error.  All reports are deterministic for a
fixed seed and print numbers with 17 significant digits.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import serialize as io
from .algebra import DimensionCapError
from .channels import design_matrix, invert_cq, separation_check
from .config import with_overrides
from .cuntz import ExpressionError, parse_expression
from .dhrnet import dhr_check, invert_selected_state
from .models import bundle_examples
from .sectors import decompose_sectors, estimate_charge, sector_energies
from .thermal import build_thermal_channel, hierarchy_report, thermal_function

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_INPUT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    # allow_abbrev off: "--tol" on subcommands must not be taken for an
    # abbreviation of the global --tol.* family
    p = argparse.ArgumentParser(
        prog="sectorlab",
        description="operator-algebra laboratory: sectors, channels, "
                    "thermal criteria, DHR nets, Cuntz rewriting",
        allow_abbrev=False,
    )
    p.add_argument("--seed", type=int, default=0, help="seed for all random choices")
    p.add_argument("--format", choices=("json", "text"), default="json",
                   help="report rendering")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--tol.rank", dest="tol_rank", type=float, default=None)
    p.add_argument("--tol.gap", dest="tol_gap", type=float, default=None)
    p.add_argument("--tol.state", dest="tol_state", type=float, default=None)
    p.add_argument("--tol.criterion", dest="tol_criterion", type=float, default=None)

    sub = p.add_subparsers(dest="command", required=True)

    sec = sub.add_parser("sectors", help="superselection-sector analysis")
    sec_sub = sec.add_subparsers(dest="subcommand", required=True)
    an = sec_sub.add_parser("analyze")
    an.add_argument("--field", required=True)
    an.add_argument("--group", required=True)
    an.add_argument("--rep", required=True)
    an.add_argument("--state")
    an.add_argument("--hamiltonian")

    th = sub.add_parser("thermal", help="thermality criterion")
    th_sub = th.add_subparsers(dest="subcommand", required=True)
    est = th_sub.add_parser("estimate")
    est.add_argument("--system", required=True)
    est.add_argument("--grid", required=True)
    est.add_argument("--measured", required=True)
    est.add_argument("--hierarchy", required=True)
    est.add_argument("--csv", help="write thermal functions of the finest "
                                   "level's probes here")

    dhr = sub.add_parser("dhr", help="locality selection criterion")
    dhr_sub = dhr.add_subparsers(dest="subcommand", required=True)
    chk = dhr_sub.add_parser("check")
    chk.add_argument("--net", required=True)
    chk.add_argument("--state", required=True)
    chk.add_argument("--vacuum", required=True)
    chk.add_argument("--tol", type=float, default=None)
    chk.add_argument("--all-subsets", action="store_true")
    inv = dhr_sub.add_parser("invert")
    inv.add_argument("--net", required=True)
    inv.add_argument("--state", required=True)
    inv.add_argument("--vacuum", required=True)
    inv.add_argument("--tol", type=float, default=None)

    cz = sub.add_parser("cuntz", help="word arithmetic")
    cz_sub = cz.add_subparsers(dest="subcommand", required=True)
    nf = cz_sub.add_parser("nf")
    nf.add_argument("--d", type=int, required=True)
    nf.add_argument("--expr", required=True)
    nf.add_argument("--json", action="store_true",
                    help="emit the term list as JSON instead of plain text")

    ch = sub.add_parser("channels", help="moment-problem inversion")
    ch_sub = ch.add_subparsers(dest="subcommand", required=True)
    cin = ch_sub.add_parser("invert")
    cin.add_argument("--channel", required=True)
    cin.add_argument("--probes", required=True)
    cin.add_argument("--data", required=True)
    cin.add_argument("--tol", type=float, default=None)
    cin.add_argument("--design-csv", dest="design_csv",
                     help="export the design matrix for external audit")

    ex = sub.add_parser("examples", help="bundled worked models")
    ex_sub = ex.add_subparsers(dest="subcommand", required=True)
    init = ex_sub.add_parser("init")
    init.add_argument("--dir", default="sectorlab_examples")

    return p


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return io.dumps_canonical(report)
    lines = []

    def walk(prefix: str, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{prefix}.{k}" if prefix else str(k), v)
        elif isinstance(obj, (list, tuple)):
            rendered = " ".join(
                io.format_float(float(v)) if isinstance(v, float) else str(v)
                for v in obj
            ) if all(not isinstance(v, (dict, list, tuple)) for v in obj) else None
            if rendered is not None:
                lines.append(f"{prefix} = [{rendered}]")
            else:
                for i, v in enumerate(obj):
                    walk(f"{prefix}[{i}]", v)
        elif isinstance(obj, float):
            lines.append(f"{prefix} = {io.format_float(obj)}")
        else:
            lines.append(f"{prefix} = {obj}")

    walk("", report)
    return "\n".join(lines) + "\n"


def _emit(report: dict, args) -> None:
    text = _render(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _criterion_tol(args) -> float:
    explicit = getattr(args, "tol", None)
    if explicit is not None:
        return explicit
    return with_overrides(criterion=args.tol_criterion).criterion


def _load_group_arg(value: str):
    """A group argument is either a JSON file or a built-in name (cyclic:2)."""
    if os.path.exists(value):
        return io.group_from_json(io.load_json(value))
    if ":" in value and os.sep not in value:
        return io.group_from_json(value)
    raise io.InputFormatError(
        f"{value}: neither an existing file nor a built-in group name"
    )


def _run_sectors_analyze(args, tol) -> int:
    field = io.algebra_from_json(io.load_json(args.field))
    group = _load_group_arg(args.group)
    rep = io.rep_from_json(io.load_json(args.rep), group=group)
    decomp = decompose_sectors(field, rep, tol=tol, seed=args.seed)
    report = {
        "labels": list(decomp.labels),
        "dims": [
            {"label": lab, "dim_H": m, "dim_V": v}
            for lab, m, v in zip(decomp.labels, decomp.mult_dims,
                                 decomp.irrep_dims)
        ],
        "center_dim": decomp.n_sectors,
        "field_algebra_full": decomp.field_algebra_full,
        "reconstruction_residual": decomp.reconstruction_residual(rep),
    }
    if args.state:
        omega = io.state_from_json(io.load_json(args.state))
        nu = estimate_charge(omega, decomp)
        report["charges"] = {
            lab: float(w) for lab, w in zip(decomp.labels, nu.weights)
        }
    if args.hamiltonian:
        h = io.matrix_from_json(io.load_json(args.hamiltonian))
        report["sector_energies"] = sector_energies(decomp, h)
    _emit(report, args)
    return EXIT_OK


def _run_thermal_estimate(args, tol) -> int:
    system = io.system_from_json(io.load_json(args.system))
    grid = io.grid_from_json(io.load_json(args.grid))
    measured = io.measured_from_json(io.load_json(args.measured))
    hierarchy = io.hierarchy_from_json(io.load_json(args.hierarchy))
    channel = build_thermal_channel(system, grid)
    crit_tol = _criterion_tol(args)
    report = hierarchy_report(measured, hierarchy, channel, tol=crit_tol)
    payload = {
        "levels": [
            {
                "level": v.level,
                "accepted": v.accepted,
                "residual": v.residual,
                "tolerance": v.tolerance,
                "unique": v.unique,
                "nullspace_dim": v.nullspace_dim,
                "weights": [float(w) for w in v.weight_estimate.weights],
                "moments": {
                    name: {"mean": mv[0], "variance": mv[1]}
                    for name, mv in v.moments.items()
                },
            }
            for v in report.verdicts
        ],
        "max_accepted_level": report.max_accepted_level,
        "residual_monotone": report.residual_monotone,
    }
    _emit(payload, args)
    if args.csv:
        probes = hierarchy.levels[-1][1] if hierarchy.levels else ()
        header = ["beta", "mu"] + [name for name, _ in probes]
        rows = []
        values = [thermal_function(system, grid, m) for _, m in probes]
        for i, (beta, mu) in enumerate(grid.points):
            rows.append([beta, 0.0 if mu is None else mu]
                        + [float(col[i]) for col in values])
        with open(args.csv, "w") as fh:
            fh.write(io.format_csv(rows, header))
    return EXIT_OK if payload["max_accepted_level"] is not None else EXIT_REJECTED


def _run_dhr_check(args, tol) -> int:
    net = io.net_from_json(io.load_json(args.net))
    omega = io.state_from_json(io.load_json(args.state))
    vacuum = io.state_from_json(io.load_json(args.vacuum))
    crit_tol = _criterion_tol(args)
    report = dhr_check(omega, vacuum, net, tol=crit_tol,
                       all_subsets=args.all_subsets)
    payload = {
        "passes": report.passes,
        "tolerance": report.tol,
        "witness_regions": [list(r) for r in report.witness_regions],
        "distances": [
            {"region": list(r), "distance": d} for r, d in report.distances
        ],
    }
    _emit(payload, args)
    return EXIT_OK if report.passes else EXIT_REJECTED


def _run_dhr_invert(args, tol) -> int:
    net = io.net_from_json(io.load_json(args.net))
    omega = io.state_from_json(io.load_json(args.state))
    vacuum = io.state_from_json(io.load_json(args.vacuum))
    crit_tol = _criterion_tol(args)
    result = invert_selected_state(omega, vacuum, net, tol=crit_tol)
    payload = {
        "found": result.found,
        "region": None if result.region is None else list(result.region),
        "label": None if result.morphism is None else result.morphism.label,
        "distance": result.distance,
        "candidates_tried": result.n_tried,
    }
    _emit(payload, args)
    return EXIT_OK if result.found else EXIT_REJECTED


def _run_cuntz_nf(args) -> int:
    poly = parse_expression(args.expr, args.d)
    if args.json or args.format == "json":
        terms = []
        for w, c in poly.sorted_terms():
            if poly.exact:
                entry = {"mu": list(w.mu), "nu": list(w.nu),
                         "re": str(c.re), "im": str(c.im)}
            else:
                z = complex(c)
                entry = {"mu": list(w.mu), "nu": list(w.nu),
                         "re": z.real, "im": z.imag}
            terms.append(entry)
        payload = {
            "d": args.d,
            "normal_form": str(poly),
            "exact": poly.exact,
            "terms": terms,
        }
        _emit(payload, args)
    else:
        text = str(poly) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def _run_channels_invert(args) -> int:
    channel = io.channel_from_json(io.load_json(args.channel))
    probes = io.probes_from_json(io.load_json(args.probes))
    measured = io.measured_from_json(io.load_json(args.data))
    missing = [n for n, _ in probes if n not in measured]
    if missing:
        raise io.InputFormatError(f"data missing probe values: {missing}")
    mats = [m for _, m in probes]
    data = np.array([measured[n] for n, _ in probes])
    crit_tol = _criterion_tol(args)
    result = invert_cq(channel, mats, data, tol=crit_tol)
    sep = separation_check(channel, mats)
    payload = {
        "labels": [io._label_to_json(l) for l in channel.space.labels],
        "weights": [float(w) for w in result.weight.weights],
        "residual": result.residual,
        "kkt_residual": result.kkt_residual,
        "converged": result.converged,
        "unique": result.unique,
        "rank": sep.rank,
        "sigma_min": sep.sigma_min,
        "nullspace_dim": result.nullspace_dim,
    }
    _emit(payload, args)
    if args.design_csv:
        m = design_matrix(channel, mats)
        header = ["probe"] + [str(io._label_to_json(l))
                              for l in channel.space.labels]
        rows = [[name] + [float(x) for x in m[j]]
                for j, (name, _) in enumerate(probes)]
        with open(args.design_csv, "w") as fh:
            fh.write(io.format_csv(rows, header))
    return EXIT_OK if result.residual <= crit_tol else EXIT_REJECTED


def _run_examples_init(args) -> int:
    dirs = bundle_examples(args.dir)
    _emit({"directories": dirs}, args)
    return EXIT_OK


def run(args) -> int:
    tol = with_overrides(
        rank=args.tol_rank, gap=args.tol_gap,
        state=args.tol_state, criterion=args.tol_criterion,
    )
    if args.command == "sectors":
        return _run_sectors_analyze(args, tol)
    if args.command == "thermal":
        return _run_thermal_estimate(args, tol)
    if args.command == "dhr":
        if args.subcommand == "check":
            return _run_dhr_check(args, tol)
        return _run_dhr_invert(args, tol)
    if args.command == "cuntz":
        return _run_cuntz_nf(args)
    if args.command == "channels":
        return _run_channels_invert(args)
    if args.command == "examples":
        return _run_examples_init(args)
    raise AssertionError(f"unhandled command {args.command}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(args)
    except (io.InputFormatError, ExpressionError, DimensionCapError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except FileNotFoundError as err:
        print(f"error: {err.filename}: file not found", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
