"""Command-line front end: solve, table, verify, factor, checkpd."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .anglesweep import SweepConfig
from .cyclic import solve_CF_Z, solve_CF_m, solve_K_m
from .fejer import FactorizationError, WindowedSequence, factor_Z, factor_Zm
from .groups import (
    DegenerateSupportError,
    GroupConstructionError,
    SubsetMask,
    check_cf_condition,
    element_order,
    generated_subgroup,
    make_group,
    support_trace,
    symmetrize,
)
from .posdef import GroupFunction, is_posdef
from .solver import ADMMConfig, ADMMError, ExtremalProblem, solve, verify_reduction

EXIT_OK = 0
EXIT_NOT_PD = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3

DEFAULT_MATRIX = os.path.join(os.path.dirname(__file__), "data", "default_matrix.txt")


@dataclass
class RunConfig:
    """Output and solver settings shared by all commands.

    All computations are deterministic; the seed is recorded in machine
    output so batch runs can be tied to a configuration.
    """

    fmt: str = "plain"
    seed: int = 0
    rho: float = 1.0
    tol_primal: float = 1e-7
    tol_dual: float = 1e-7
    max_iter: int = 50000
    grid: int = 64

    def admm(self):
        return ADMMConfig(self.rho, self.tol_primal, self.tol_dual, self.max_iter)

    def sweep(self):
        return SweepConfig(grid=self.grid)


def _fmt(x):
    return f"{float(x):.9g}"


def parse_omega(group, text, z):
    """Omega grammar: 'all', 'window:N' (powers of z), or comma-separated indices."""
    text = text.strip()
    if text == "all":
        return SubsetMask.full(group.order)
    if text.startswith("window:"):
        radius = int(text.split(":", 1)[1])
        m = element_order(group, z)
        powers = generated_subgroup(group, z)
        idx = {powers[n % m] for n in range(-radius, radius + 1)}
        return SubsetMask.from_indices(group.order, sorted(idx))
    indices = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    return SubsetMask.from_indices(group.order, indices)


def _emit(config, payload, plain_lines, csv_rows=None):
    if config.fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif config.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        for row in csv_rows or []:
            writer.writerow(row)
        sys.stdout.write(buf.getvalue())
    else:
        for line in plain_lines:
            print(line)


# -- solve -------------------------------------------------------------------------


def cmd_solve(args, config):
    group = make_group(args.group)
    z = int(args.z)
    if z < 0 or z >= group.order:
        print(f"error: z index {z} out of range for group of order {group.order}", file=sys.stderr)
        return EXIT_USAGE
    omega_raw = parse_omega(group, args.omega, z)
    omega, already = symmetrize(group, omega_raw)
    if not already:
        print("warning: omega was not symmetric; using omega intersect omega^-1", file=sys.stderr)
    target = group.power(z, args.nu)
    problem = ExtremalProblem(group, omega, target, field=args.field,
                              sweep=config.sweep(), admm=config.admm())
    result = solve(problem)
    trace = support_trace(group, omega, z)
    window = check_cf_condition(group, omega, z)

    payload = result.to_json()
    payload.update({
        "group": group.name,
        "z": z,
        "nu": args.nu,
        "field": args.field,
        "omega": omega.indices(),
        "trace": trace.residues(),
        "cf_condition_window": window,
        "seed": config.seed,
    })
    witness_txt = ", ".join(
        f"{group.labels[i]}: {_fmt(v.real)}{v.imag:+.9g}i" for i, v in enumerate(result.witness.values) if abs(v) > 1e-12
    )
    lines = [
        f"group            {group.name} (order {group.order})",
        f"z                {z} ({group.labels[z]}), order {element_order(group, z)}, nu {args.nu}",
        f"omega            {omega.indices()}",
        f"trace H          {trace.residues()} (mod {trace.m})",
        f"cf window N      {window if window is not None else 'not satisfied'}",
        f"field            {args.field}",
        f"value            {_fmt(result.value)}",
        f"certified bound  {_fmt(result.certified_lower_bound)}",
        f"sweep angle      {_fmt(result.sweep_angle)}",
        f"witness verdict  {result.certificate.verdict} (min eig {_fmt(result.certificate.min_eigenvalue)})",
        f"witness          {witness_txt}",
    ]
    rows = [["group", "z", "nu", "field", "value", "certified_lower_bound", "sweep_angle"],
            [group.name, z, args.nu, args.field, _fmt(result.value), _fmt(result.certified_lower_bound), _fmt(result.sweep_angle)]]
    _emit(config, payload, lines, rows)
    return EXIT_OK


# -- table -------------------------------------------------------------------------


def cmd_table(args, config):
    if args.kind == "cf_window":
        rows = [["N", "solver", "closed_form", "gap"]]
        for n in range(args.start, args.stop + 1):
            sol = solve_CF_Z(n, list(range(-n, n + 1)), field="real", admm=config.admm())
            exact = float(np.cos(np.pi / (n + 2)))
            rows.append([n, _fmt(sol.value), _fmt(exact), f"{abs(sol.value - exact):.3e}"])
    elif args.kind == "km_punctured":
        rows = [["m", "lp_value", "closed_form", "gap"]]
        start = args.start + args.start % 2
        for m in range(max(4, start), args.stop + 1, 2):
            support = [k for k in range(m) if k != m // 2]
            sol = solve_K_m(m, support)
            exact = 0.5 * (1.0 + float(np.cos(2.0 * np.pi / m)))
            rows.append([m, _fmt(sol.value), _fmt(exact), f"{abs(sol.value - exact):.3e}"])
    elif args.kind == "ruzsa":
        rows = [["m", "subsets", "violations", "left_tightest_H", "left_slack", "right_tightest_H", "right_slack"]]
        for m in range(2, args.stop + 1):
            stats = _ruzsa_row(m)
            rows.append(stats)
    else:
        print(f"error: unknown table kind {args.kind!r}", file=sys.stderr)
        return EXIT_USAGE

    header, *body = rows
    payload = {"kind": args.kind, "seed": config.seed,
               "rows": [dict(zip(header, row)) for row in body]}
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(header))]
    lines = ["  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)) for row in rows]
    _emit(config, payload, lines, rows)
    return EXIT_OK


def _symmetric_subsets(m):
    half = m // 2
    classes = list(range(1, half + 1))
    for bits in range(1 << len(classes)):
        members = [0]
        for i, k in enumerate(classes):
            if bits >> i & 1:
                members.append(k)
                if k != (m - k) % m:
                    members.append(m - k)
        yield sorted(set(members))


def _ruzsa_row(m):
    count = 0
    violations = 0
    left_best = (np.inf, None)
    right_best = (np.inf, None)
    factor = float(np.cos(np.pi / m))
    for support in _symmetric_subsets(m):
        count += 1
        cf = solve_CF_m(m, support).value
        km = solve_K_m(m, support).value
        left_slack = km - factor * cf
        right_slack = cf - km
        if left_slack < -1e-6 or right_slack < -1e-6:
            violations += 1
        if 1 in support:
            if left_slack < left_best[0]:
                left_best = (left_slack, support)
            if right_slack < right_best[0]:
                right_best = (right_slack, support)
    return [m, count, violations,
            str(left_best[1]), f"{left_best[0]:.3e}",
            str(right_best[1]), f"{right_best[0]:.3e}"]


# -- verify ------------------------------------------------------------------------


def load_matrix(path):
    instances = []
    with open(path, "r", encoding="utf-8") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(";")]
            if len(parts) != 3:
                raise ValueError(f"line {ln}: expected 'group; omega; z'")
            instances.append((parts[0], parts[1], int(parts[2])))
    return instances


def cmd_verify(args, config):
    path = args.matrix or DEFAULT_MATRIX
    try:
        instances = load_matrix(path)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read matrix file: {exc}", file=sys.stderr)
        return EXIT_USAGE

    reports = []
    failed = 0
    lines = []
    for gspec, ospec, z in instances:
        group = make_group(gspec)
        omega = parse_omega(group, ospec, z)
        report = verify_reduction(group, omega, z, sweep=config.sweep(), admm=config.admm())
        reports.append(report)
        status = "PASS" if report.passed else "FAIL"
        if not report.passed:
            failed += 1
        lines.append(
            f"{status}  {gspec:<22} z={z:<3} omega={ospec:<18} "
            f"complex {_fmt(report.group_complex)} vs {_fmt(report.cyclic_complex)} (gap {report.gap_complex:.2e})  "
            f"real {_fmt(report.group_real)} vs {_fmt(report.cyclic_real)} (gap {report.gap_real:.2e})"
        )
    lines.append(f"{len(reports) - failed}/{len(reports)} instances PASS")
    payload = {"matrix": path, "seed": config.seed,
               "reports": [r.to_json() for r in reports], "failed": failed}
    rows = [["status", "group", "z", "omega", "group_complex", "cyclic_complex", "group_real", "cyclic_real"]]
    for (gspec, ospec, z), r in zip(instances, reports):
        rows.append(["PASS" if r.passed else "FAIL", gspec, z, ospec,
                     _fmt(r.group_complex), _fmt(r.cyclic_complex), _fmt(r.group_real), _fmt(r.cyclic_real)])
    _emit(config, payload, lines, rows)
    return EXIT_OK if failed == 0 else EXIT_NOT_PD


# -- factor / checkpd ---------------------------------------------------------------


def _read_json_input(source):
    if source == "-":
        return json.load(sys.stdin)
    with open(source, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _complex_list(values):
    return [complex(re, im) for re, im in values]


def cmd_factor(args, config):
    try:
        obj = _read_json_input(args.input)
        kind = obj.get("kind", "window")
        if kind == "window":
            seq = WindowedSequence.from_json(obj)
            theta = factor_Z(seq)
        elif kind == "cyclic":
            theta = factor_Zm(np.array(_complex_list(obj["values"])))
        else:
            print(f"error: unknown factor kind {kind!r}", file=sys.stderr)
            return EXIT_USAGE
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        if isinstance(exc, FactorizationError):
            print(f"not positive definite: {exc}", file=sys.stderr)
            return EXIT_NOT_PD
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    payload = {"theta": [[float(v.real), float(v.imag)] for v in theta], "seed": config.seed}
    lines = ["theta: " + ", ".join(f"{v.real:.9g}{v.imag:+.9g}i" for v in theta)]
    rows = [["index", "re", "im"]] + [[i, _fmt(v.real), _fmt(v.imag)] for i, v in enumerate(theta)]
    _emit(config, payload, lines, rows)
    return EXIT_OK


def cmd_checkpd(args, config):
    try:
        obj = _read_json_input(args.input)
        group = make_group(obj["group"])
        fn = GroupFunction.from_json(obj["function"])
        if fn.group_order != group.order:
            raise ValueError("function length does not match group order")
    except (OSError, KeyError, ValueError, json.JSONDecodeError, GroupConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cert = is_posdef(group, fn, tol=args.tol)
    payload = {"group": group.name, "certificate": cert.to_json(), "seed": config.seed}
    lines = [
        f"verdict          {cert.verdict}",
        f"min eigenvalue   {_fmt(cert.min_eigenvalue)}",
        f"hermitian resid  {_fmt(cert.hermitian_residual)}",
        f"tolerance        {_fmt(cert.tolerance)}",
    ]
    rows = [["verdict", "min_eigenvalue", "hermitian_residual"],
            [cert.verdict, _fmt(cert.min_eigenvalue), _fmt(cert.hermitian_residual)]]
    _emit(config, payload, lines, rows)
    return EXIT_OK if cert.verdict != "not_pd" else EXIT_NOT_PD


# -- entry -------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cfextremal",
        description="Point-value extremal constants for positive definite functions "
        "supported in a prescribed subset of a finite group or of Z.",
        epilog="Supports are plain subsets: on a discrete group every set containing "
        "the identity is an open neighborhood, so no topological checks apply.",
    )
    parser.add_argument("--format", choices=["plain", "json", "csv"], default="plain")
    parser.add_argument("--seed", type=int, default=None,
                        help="recorded in machine output; CF_SEED env overrides")
    parser.add_argument("--rho", type=float, default=1.0, help="ADMM penalty parameter")
    parser.add_argument("--max-iter", type=int, default=50000)
    parser.add_argument("--tol-primal", type=float, default=1e-7)
    parser.add_argument("--tol-dual", type=float, default=1e-7)
    parser.add_argument("--sweep-grid", type=int, default=64)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one extremal instance")
    p.add_argument("--group", required=True)
    p.add_argument("--omega", required=True, help="'all', 'window:N', or comma-separated indices")
    p.add_argument("--z", required=True, type=int)
    p.add_argument("--field", choices=["real", "complex"], default="complex")
    p.add_argument("--nu", type=int, default=1, help="target element is z^nu")

    p = sub.add_parser("table", help="reproduction tables")
    p.add_argument("--kind", required=True, choices=["cf_window", "km_punctured", "ruzsa"])
    p.add_argument("--start", type=int, default=1)
    p.add_argument("--stop", type=int, default=None)

    p = sub.add_parser("verify", help="two-solver verification over a test matrix")
    p.add_argument("--matrix", default=None, help="file of 'group; omega; z' lines")

    p = sub.add_parser("factor", help="convolution square root of a sequence (JSON in)")
    p.add_argument("--input", required=True, help="JSON file or '-' for stdin")

    p = sub.add_parser("checkpd", help="positive definiteness certificate (JSON in)")
    p.add_argument("--input", required=True, help="JSON file or '-' for stdin")
    p.add_argument("--tol", type=float, default=1e-9)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = args.seed
    env_seed = os.environ.get("CF_SEED")
    if env_seed is not None:
        seed = int(env_seed)
    if seed is None:
        seed = 0
    config = RunConfig(fmt=args.format, seed=seed, rho=args.rho,
                       tol_primal=args.tol_primal, tol_dual=args.tol_dual,
                       max_iter=args.max_iter, grid=args.sweep_grid)
    if args.command == "table" and args.stop is None:
        args.stop = {"cf_window": 10, "km_punctured": 20, "ruzsa": 12}[args.kind]

    try:
        if args.command == "solve":
            return cmd_solve(args, config)
        if args.command == "table":
            return cmd_table(args, config)
        if args.command == "verify":
            return cmd_verify(args, config)
        if args.command == "factor":
            return cmd_factor(args, config)
        if args.command == "checkpd":
            return cmd_checkpd(args, config)
    except (GroupConstructionError, DegenerateSupportError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ADMMError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
