"""Batch command-line front end.

Subcommands: kernel, sensitivity, scan-t0, check-lemmas, forward, recover,
oracle.  Curves go to CSV, scalar results to JSON; every output embeds the
resolved configuration and its hash.  --plot renders a PNG view of the same
data next to the delimited file.

Exit codes: 0 ok, 2 invalid configuration or flags, 3 numerical failure,
4 no solution (observed value outside the attainable range), 5 certificate
failure (observation time below the certified threshold or non-monotone
samples).  Errors are reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import config as cfgmod
from .errors import (
    CertificateError,
    DomainError,
    NoSolutionError,
    QuadratureError,
    RStokesError,
    ThresholdNotFoundError,
)
from .forward import observation_value, solve, synthesize
from .inverse import InverseSpec, recover_alpha
from .kernel import KernelPoint, kernel_time_derivative, kernel_value
from .oracle import OracleConfig, solve_scalar
from .quadrature import QuadratureConfig
from .sensitivity import (
    alpha_sensitivity,
    check_envelope_bounds,
    estimate_threshold_time,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_NO_SOLUTION = 4
EXIT_CERTIFICATE = 5


def _error_exit(exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def _quad_config(args) -> QuadratureConfig:
    return QuadratureConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                            max_panels=args.max_panels, panel_order=args.panel_order)


def _add_quad_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", type=float, default=1e-14)
    p.add_argument("--max-panels", type=int, default=200)
    p.add_argument("--panel-order", type=int, default=15)


def _out_path(args, default_name: str) -> str:
    base = cfgmod.output_dir(None, getattr(args, "output_dir", None))
    name = getattr(args, "output", None) or default_name
    if os.path.isabs(name):
        return name
    return os.path.join(base, name)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise cfgmod.ConfigError(f"cannot parse float list {text!r}") from exc


def cmd_kernel(args) -> int:
    quad = _quad_config(args)
    if args.n < 1:
        raise cfgmod.ConfigError("--n must be >= 1")
    if args.t_max < args.t_min:
        raise cfgmod.ConfigError("--t-max must be >= --t-min")
    if args.log_spacing:
        if args.t_min <= 0.0:
            raise cfgmod.ConfigError("--log spacing needs --t-min > 0")
        ts = np.geomspace(args.t_min, args.t_max, args.n)
    else:
        ts = np.linspace(args.t_min, args.t_max, args.n)
    meta = {
        "command": "kernel", "lambda": args.lam, "gamma": args.gamma,
        "alpha": args.alpha, "t_min": args.t_min, "t_max": args.t_max,
        "n": args.n, "log": args.log_spacing, "rel_tol": quad.rel_tol,
        "abs_tol": quad.abs_tol,
    }
    rows = []
    for t in ts:
        point = KernelPoint(args.lam, args.gamma, args.alpha, float(t))
        B = kernel_value(point, quad)
        # the time derivative diverges to -inf as t -> 0+
        dB = -math.inf if t == 0.0 else kernel_time_derivative(point, quad)
        rows.append((float(t), B, dB))
    path = _out_path(args, "kernel.csv")
    cfgmod.write_csv(path, ["t", "B", "dBdt"], rows, meta)
    if args.plot:
        from .plots import plot_kernel_curve

        plot_kernel_curve([r[0] for r in rows], [r[1] for r in rows],
                          [r[2] for r in rows], os.path.splitext(path)[0] + ".png")
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    quad = _quad_config(args)
    if args.n < 1:
        raise cfgmod.ConfigError("--n must be >= 1")
    alphas = np.linspace(args.alpha_min, args.alpha_max, args.n) if args.n > 1 else [args.alpha_min]
    meta = {
        "command": "sensitivity", "lambda": args.lam, "gamma": args.gamma,
        "t0": args.t0, "alpha_min": args.alpha_min, "alpha_max": args.alpha_max,
        "n": args.n, "rel_tol": quad.rel_tol,
    }
    rows, terms, totals, fds = [], [], [], []
    for a in alphas:
        point = KernelPoint(args.lam, args.gamma, float(a), args.t0)
        sb = alpha_sensitivity(point, quad)
        rows.append((float(a), sb.total, *sb.terms, sb.fd_reference))
        totals.append(sb.total)
        terms.append(sb.terms)
        fds.append(sb.fd_reference)
    path = _out_path(args, "sensitivity.csv")
    cfgmod.write_csv(
        path,
        ["alpha", "dB_dalpha_total", "I1", "I2", "I3", "I4", "I5", "fd_reference"],
        rows, meta,
    )
    if args.plot:
        from .plots import plot_sensitivity_terms

        plot_sensitivity_terms(list(alphas), totals, terms, fds,
                               os.path.splitext(path)[0] + ".png")
    return EXIT_OK


def cmd_scan_t0(args) -> int:
    quad = _quad_config(args)
    alphas = _parse_floats(args.alphas)
    meta = {
        "command": "scan-t0", "gamma": args.gamma, "lambda1": args.lambda1,
        "alphas": alphas, "max_exponent": args.max_exponent, "rel_tol": quad.rel_tol,
    }
    threshold = estimate_threshold_time(
        args.gamma, args.lambda1, alphas, quad, max_exponent=args.max_exponent,
    )
    payload = {"T0_estimate": threshold}
    path = _out_path(args, "scan_t0.json")
    cfgmod.write_json(path, payload, meta)
    if args.plot:
        from .plots import plot_threshold_scan

        ts, worst = [], []
        for k in range(args.max_exponent + 1):
            t = 2.0**k
            ts.append(t)
            worst.append(max(
                alpha_sensitivity(KernelPoint(args.lambda1 * fac, args.gamma, a, t),
                                  quad, lambda1=args.lambda1, with_fd=False).total
                for a in alphas for fac in (1.0, 10.0, 100.0)
            ))
        plot_threshold_scan(ts, worst, threshold, os.path.splitext(path)[0] + ".png")
    return EXIT_OK


def cmd_check_lemmas(args) -> int:
    lambdas = _parse_floats(args.lambdas)
    alphas = _parse_floats(args.alphas)
    t0s = _parse_floats(args.t0s)
    meta = {
        "command": "check-lemmas", "gamma": args.gamma, "lambdas": lambdas,
        "alphas": alphas, "t0s": t0s, "samples": args.samples,
    }
    report = check_envelope_bounds(args.gamma, lambdas, alphas, t0s, n_samples=args.samples)
    payload = {
        "n_checks": report.n_checks,
        "n_violations": len(report.violations),
        "ok": report.ok,
        "violations": [
            {
                "label": v.label, "gamma": v.gamma, "lambda": v.lam, "alpha": v.alpha,
                "t0": v.t0, "xi": v.xi, "lhs": v.lhs, "rhs": v.rhs,
            }
            for v in report.violations[:200]
        ],
    }
    path = _out_path(args, "check_lemmas.json")
    cfgmod.write_json(path, payload, meta)
    return EXIT_OK


def cmd_forward(args) -> int:
    cfg = cfgmod.load_problem(args.config)
    if "alpha" not in cfg:
        raise cfgmod.ConfigError("forward run needs 'alpha' in the problem file")
    quad = cfgmod.build_quadrature_config(cfg)
    op = cfgmod.build_operator(cfg)
    data = cfgmod.build_initial_data(op, cfg)
    weights = cfgmod.build_weights(op, cfg)
    t_grid = cfgmod.t_grid_from(cfg)
    solution = solve(op, data, cfg["alpha"], cfg["gamma"], t_grid, quad)
    w = weights.values[: solution.truncation_K_effective]
    U = np.einsum("kt,kt->t", (w[:, None] * solution.amplitudes),
                  (w[:, None] * solution.amplitudes))
    out_dir = cfgmod.output_dir(cfg, args.output_dir)
    norm_path = os.path.join(out_dir, "forward_norm.csv")
    cfgmod.write_csv(norm_path, ["t", "U"], list(zip(map(float, t_grid), map(float, U))), cfg)
    written = [norm_path]
    if "x_points" in cfg:
        field = synthesize(solution, np.asarray(cfg["x_points"], dtype=float))
        rows = []
        for i, x in enumerate(cfg["x_points"]):
            label = x if np.isscalar(x) else ";".join(cfgmod.format_float(float(v)) for v in np.atleast_1d(x))
            for j, t in enumerate(t_grid):
                rows.append((label, float(t), float(field[i, j])))
        field_path = os.path.join(out_dir, "forward_field.csv")
        cfgmod.write_csv(field_path, ["x", "t", "u"], rows, cfg)
        written.append(field_path)
    result_path = os.path.join(out_dir, "forward_result.json")
    cfgmod.write_json(result_path, {
        "truncation_K_effective": solution.truncation_K_effective,
        "U_final": float(U[-1]),
        "files": [os.path.basename(p) for p in written],
    }, cfg)
    if args.plot:
        from .plots import plot_norm_decay

        plot_norm_decay(t_grid, U, os.path.join(out_dir, "forward_norm.png"))
    return EXIT_OK


def cmd_recover(args) -> int:
    cfg = cfgmod.load_problem(args.config)
    if "observation" not in cfg:
        raise cfgmod.ConfigError("recover run needs 'observation' in the problem file")
    quad = cfgmod.build_quadrature_config(cfg)
    op = cfgmod.build_operator(cfg)
    data = cfgmod.build_initial_data(op, cfg)
    weights = cfgmod.build_weights(op, cfg)
    obs = cfg["observation"]
    spec = InverseSpec(
        t0=obs["t0"],
        d0=obs["d0"],
        alpha_bracket=tuple(obs.get("alpha_bracket", (1e-3, 1.0 - 1e-3))),
        alpha_tol=obs.get("alpha_tol", 1e-8),
        value_tol=obs.get("value_tol", 1e-10),
    )
    unsafe = bool(args.unsafe_t0 or obs.get("unsafe_t0", False))
    result = recover_alpha(spec, op, data, cfg["gamma"], weights, quad, unsafe_t0=unsafe)
    payload = {
        "alpha_hat": result.alpha_hat,
        "residual": result.residual,
        "iterations": result.iterations,
        "certificate": {
            "certified": result.certified,
            "u_min": result.certificate.u_min,
            "u_max": result.certificate.u_max,
            "alpha_samples": [float(v) for v in result.certificate.alpha_samples],
            "u_samples": [float(v) for v in result.certificate.u_samples],
        },
        "T0_used": result.certificate.threshold_estimate,
    }
    out_dir = cfgmod.output_dir(cfg, args.output_dir)
    path = os.path.join(out_dir, args.output or "recover.json")
    cfgmod.write_json(path, payload, cfg)
    if args.plot:
        from .plots import plot_recovery

        plot_recovery(result.certificate.alpha_samples, result.certificate.u_samples,
                      spec.d0, result.alpha_hat, os.path.splitext(path)[0] + ".png")
    return EXIT_OK


def cmd_oracle(args) -> int:
    ocfg = OracleConfig(h=args.h, T=args.T)
    meta = {
        "command": "oracle", "lambda": args.lam, "gamma": args.gamma,
        "alpha": args.alpha, "y0": args.y0, "h": args.h, "T": args.T,
    }
    t, y = solve_scalar(args.lam, args.gamma, args.alpha, args.y0, ocfg)
    stride = max(1, math.ceil(len(t) / args.max_rows)) if args.max_rows else 1
    rows = [(float(tv), float(yv)) for tv, yv in zip(t[::stride], y[::stride])]
    if stride > 1 and (len(t) - 1) % stride:
        rows.append((float(t[-1]), float(y[-1])))
    path = _out_path(args, "oracle.csv")
    cfgmod.write_csv(path, ["t", "y"], rows, meta)
    if args.plot:
        from .plots import plot_oracle_trajectory

        plot_oracle_trajectory([r[0] for r in rows], [r[1] for r in rows],
                               os.path.splitext(path)[0] + ".png")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rstokes",
        description="Viscoelastic relaxation kernel toolkit: forward spectral "
                    "solver and fractional-order recovery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="tabulate the kernel and its time derivative")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--log", dest="log_spacing", action="store_true")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--plot", action="store_true")
    _add_quad_flags(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("sensitivity", help="five-term order-sensitivity breakdown over an alpha grid")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--alpha-min", type=float, required=True)
    p.add_argument("--alpha-max", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--plot", action="store_true")
    _add_quad_flags(p)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("scan-t0", help="estimate the threshold time by a geometric grid scan")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--lambda1", type=float, required=True)
    p.add_argument("--alphas", type=str, required=True,
                   help="comma-separated alpha grid, e.g. 0.1,0.3,0.5")
    p.add_argument("--max-exponent", type=int, default=30)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--plot", action="store_true")
    _add_quad_flags(p)
    p.set_defaults(func=cmd_scan_t0)

    p = sub.add_parser("check-lemmas", help="spot-check the envelope inequalities pointwise")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--lambdas", type=str, required=True)
    p.add_argument("--alphas", type=str, required=True)
    p.add_argument("--t0s", type=str, required=True)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_check_lemmas)

    p = sub.add_parser("forward", help="forward solve from a problem file")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("recover", help="recover the fractional order from a problem file")
    p.add_argument("--config", required=True)
    p.add_argument("--unsafe-t0", action="store_true",
                   help="skip the threshold gate; the output is stamped uncertified")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("oracle", help="brute-force time stepper for the scalar decay equation")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--y0", type=float, default=1.0)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--max-rows", type=int, default=2001,
                   help="subsample the trajectory to at most this many CSV rows (0 = all)")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoSolutionError as exc:
        return _error_exit(exc, EXIT_NO_SOLUTION)
    except CertificateError as exc:
        return _error_exit(exc, EXIT_CERTIFICATE)
    except (QuadratureError, ThresholdNotFoundError) as exc:
        return _error_exit(exc, EXIT_NUMERIC)
    except (cfgmod.ConfigError, DomainError) as exc:
        return _error_exit(exc, EXIT_CONFIG)
    except RStokesError as exc:
        return _error_exit(exc, EXIT_NUMERIC)


if __name__ == "__main__":
    sys.exit(main())
