"""Command-line front end: scenario runs, parameter sweeps, certification.

Subcommands
-----------
run <config> [--out DIR] [--format csv|json]
    Solve every mode in the configured range and write three files into
    the output directory: a per-mode table (``modes.csv`` or
    ``modes.json``), a run summary (``summary.csv``/``summary.json``),
    and, when the scenario requests angle samples, a two-column
    ``differential.csv`` with phi vs d sigma/d phi ready for plotting.

sweep <config> --vary name=start:stop:step [--vary ...] [--out DIR]
    Cartesian product over the varied potential parameters; one summary
    row (varied values + total absorption cross section) per grid point,
    ordered by the flag order with the rightmost axis fastest.

certify [--strict]
    Self-check suite: Wronskian sweep, ODE residual sweep, closed-form
    model invariants, the independent radial-integration oracle against
    the closed forms, and the quartic connection-matrix flux identities.
    Prints one pass/fail line per check with its worst residual.
    --strict reruns the oracle at tolerance/100 and additionally requires
    the residuals to shrink.

All floating-point output is printed with 17 significant digits, so a
given input produces byte-identical files.  Exit codes: 0 success,
1 usage or configuration error, 2 solver error, 3 certification failure.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import dataclasses
import itertools
import json
import math
import os
import sys

import numpy as np

from . import channels, oracle, quartic, scenario, specfun
from .errors import ConfigError, FluxsinkError

__all__ = ["main", "run_scenario", "certify", "run_sweep"]


MODE_COLUMNS = ("m", "regime", "nu_squared", "mu", "re_s", "im_s", "abs_s", "sigma_abs")


def _g17(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------
# mode solving
# ---------------------------------------------------------------------


def _solve_modes(scn: scenario.Scenario, m_range: tuple) -> list:
    """Solve every mode in [lo, hi], ascending; errors carry the mode index."""
    lo, hi = int(m_range[0]), int(m_range[1])
    if lo > hi:
        raise ConfigError(f"empty mode range [{lo}, {hi}]")
    sols = []
    for m in range(lo, hi + 1):
        try:
            if scn.is_quartic:
                model = scn.model
                if isinstance(model, quartic.ModeSchedule):
                    model = model.model_for(m)
                sols.append(quartic.quartic_smatrix(scn.potential, m, model))
            else:
                mode = channels.classify_mode(scn.potential, m)
                model = scn.model
                if isinstance(model, scenario.ElasticAssignment):
                    model = model.for_mode(mode)
                sols.append(channels.solve_channel(scn.potential, mode, model))
        except ConfigError:
            raise
        except FluxsinkError as exc:
            raise type(exc)(f"mode m={m}: {exc}") from exc
    return sols


def _check_coverage(scn: scenario.Scenario, m_range: tuple) -> None:
    """An explicit range must still cover every absorbing mode."""
    lo, hi = int(m_range[0]), int(m_range[1])
    if scn.is_quartic:
        if isinstance(scn.model, quartic.ModeSchedule):
            a = scn.model.m_abs
            if lo > -a or hi < a:
                raise ConfigError(
                    f"m_range [{lo}, {hi}] misses absorbed modes |m| <= {a};"
                    " use m_range = auto"
                )
        return
    missing = [m for m in channels.nonregular_modes(scn.potential) if not lo <= m <= hi]
    if missing:
        raise ConfigError(
            f"m_range [{lo}, {hi}] misses non-Regular modes {missing};"
            " use m_range = auto"
        )


def _total_sigma(sols: list) -> float:
    total = 0.0
    for sol in sorted(sols, key=lambda s: s.mode.m):
        total += sol.sigma_abs
    return total


def _model_label(model) -> str:
    if isinstance(model, channels.Sink) or isinstance(model, quartic.Sink):
        return "sink"
    if isinstance(model, scenario.ElasticAssignment):
        return f"elastic(l={_g17(model.l)}, theta={_g17(model.theta)})"
    if isinstance(model, quartic.Elastic):
        return f"elastic(theta={_g17(model.theta)})"
    if isinstance(model, channels.TotalAbsorption):
        return f"total_absorption(window=[{-model.n_minus}, {model.n_plus}])"
    if isinstance(model, quartic.ModeSchedule):
        return f"total_absorption(|m| <= {model.m_abs}) + elastic outside"
    if isinstance(model, channels.Custom):
        ms = ", ".join(str(m) for m in sorted(model.ratios))
        return f"custom(modes {ms})"
    return type(model).__name__


def _phi_grid(n: int) -> np.ndarray:
    lo = 2.0 * channels.PHI_MIN
    return np.linspace(lo, 2.0 * math.pi - lo, n)


def _differential(scn: scenario.Scenario, sols: list, n: int):
    grid = _phi_grid(n)
    amp = quartic.quartic_amplitude if scn.is_quartic else channels.amplitude
    values = [abs(amp(scn.potential, sols, float(ph))) ** 2 for ph in grid]
    return grid, values


# ---------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------


def _write_text(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _write_csv(path: str, header, rows) -> None:
    # \n terminator and minimal quoting keep the bytes platform-independent
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _mode_rows(sols: list) -> list:
    rows = []
    for sol in sols:
        s = sol.s_matrix
        rows.append(
            (
                sol.mode.m,
                sol.mode.regime,
                sol.mode.nu_squared,
                sol.mode.mu,
                s.real,
                s.imag,
                abs(s),
                sol.sigma_abs,
            )
        )
    return rows


def _summary_pairs(scn: scenario.Scenario, m_range: tuple, total: float) -> list:
    """(key, value) rows with native types; the writers format them."""
    cfg = scn.potential
    pairs = [("potential", "inverse_quartic" if scn.is_quartic else "inverse_square")]
    pairs.append(("beta", cfg.beta))
    if scn.is_quartic:
        pairs.append(("lam", cfg.lam))
    else:
        pairs.append(("gamma", cfg.gamma))
    pairs.extend(
        [
            ("p", cfg.p),
            ("mass", cfg.mass),
            ("model", _model_label(scn.model)),
            ("m_lo", int(m_range[0])),
            ("m_hi", int(m_range[1])),
            ("phi_samples", scn.phi_samples),
            ("sigma_total_abs", total),
        ]
    )
    return pairs


def _cell(value) -> str:
    return _g17(value) if isinstance(value, float) else str(value)


def _write_outputs(scn, out_dir: str, fmt: str, sols: list, m_range: tuple) -> list:
    os.makedirs(out_dir, exist_ok=True)
    total = _total_sigma(sols)
    rows = _mode_rows(sols)
    pairs = _summary_pairs(scn, m_range, total)
    written = []

    if fmt == "csv":
        path = os.path.join(out_dir, "modes.csv")
        _write_csv(
            path,
            MODE_COLUMNS,
            ([str(row[0]), row[1]] + [_g17(v) for v in row[2:]] for row in rows),
        )
        written.append(path)

        path = os.path.join(out_dir, "summary.csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerows((k, _cell(v)) for k, v in pairs)
        written.append(path)
    else:
        # 17g round-trips doubles exactly, so the JSON numbers carry the
        # same values as the csv text while staying machine-parseable.
        objs = [
            {k: (v if isinstance(v, (int, str)) else float(_g17(v))) for k, v in zip(MODE_COLUMNS, row)}
            for row in rows
        ]
        path = os.path.join(out_dir, "modes.json")
        _write_text(path, json.dumps({"modes": objs}, indent=2) + "\n")
        written.append(path)

        path = os.path.join(out_dir, "summary.json")
        obj = {
            k: (float(_g17(v)) if isinstance(v, float) else v) for k, v in pairs
        }
        _write_text(path, json.dumps(obj, indent=2) + "\n")
        written.append(path)

    if scn.phi_samples > 0:
        grid, values = _differential(scn, sols, scn.phi_samples)
        path = os.path.join(out_dir, "differential.csv")
        _write_csv(
            path,
            ("phi", "dsigma_dphi"),
            ((_g17(ph), _g17(v)) for ph, v in zip(grid, values)),
        )
        written.append(path)
    return written


def _resolve_out_dir(flag_value, scn) -> str:
    if flag_value:
        return flag_value
    env = os.environ.get("FLUXSINK_OUTDIR")
    if env:
        return env
    return scn.out_path


# ---------------------------------------------------------------------
# run
# ---------------------------------------------------------------------


def run_scenario(scn: scenario.Scenario, out_dir: str, fmt: str) -> list:
    """Solve, aggregate, and write the three output files; returns paths."""
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {fmt!r} (csv or json)")
    m_range = scenario.resolve_m_range(scn)
    _check_coverage(scn, m_range)
    sols = _solve_modes(scn, m_range)
    return _write_outputs(scn, out_dir, fmt, sols, m_range)


def _cmd_run(args) -> int:
    scn = scenario.load_scenario(args.config)
    fmt = args.format or scn.out_format
    out_dir = _resolve_out_dir(args.out, scn)
    for path in run_scenario(scn, out_dir, fmt):
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------


def _parse_vary(raw: str) -> tuple:
    name, eq, grid = raw.partition("=")
    name = name.strip()
    parts = grid.split(":")
    if not eq or len(parts) != 3:
        raise ConfigError(f"--vary wants name=start:stop:step, got {raw!r}")
    try:
        start, stop, step = (float(t) for t in parts)
    except ValueError as exc:
        raise ConfigError(f"--vary {raw!r}: bounds must be numbers") from exc
    if step <= 0.0 or stop < start:
        raise ConfigError(f"--vary {raw!r}: need step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1.0 + 1e-9))
    values = [start + k * step for k in range(count)]
    return name, values


def run_sweep(scn: scenario.Scenario, axes: list, out_dir: str, fmt: str) -> str:
    """Cartesian sweep over potential parameters; one row per grid point."""
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {fmt!r} (csv or json)")
    allowed = {"beta", "p", "mass", "lam" if scn.is_quartic else "gamma"}
    names = [name for name, _ in axes]
    for name in names:
        if name not in allowed:
            raise ConfigError(
                f"--vary {name}: not a parameter of this potential"
                f" (allowed: {', '.join(sorted(allowed))})"
            )
    if len(set(names)) != len(names):
        raise ConfigError("--vary repeats a parameter name")

    rows = []
    for combo in itertools.product(*(values for _, values in axes)):
        try:
            potential = dataclasses.replace(scn.potential, **dict(zip(names, combo)))
        except FluxsinkError as exc:
            point = ", ".join(f"{n}={_g17(v)}" for n, v in zip(names, combo))
            raise ConfigError(f"sweep point ({point}): {exc}") from exc
        point_scn = dataclasses.replace(scn, potential=potential)
        m_range = scenario.resolve_m_range(point_scn)
        _check_coverage(point_scn, m_range)
        sols = _solve_modes(point_scn, m_range)
        rows.append(tuple(combo) + (_total_sigma(sols),))

    os.makedirs(out_dir, exist_ok=True)
    header = names + ["sigma_total_abs"]
    if fmt == "csv":
        path = os.path.join(out_dir, "sweep.csv")
        _write_csv(path, header, (tuple(_g17(v) for v in row) for row in rows))
    else:
        objs = [
            {k: float(_g17(v)) for k, v in zip(header, row)} for row in rows
        ]
        path = os.path.join(out_dir, "sweep.json")
        _write_text(path, json.dumps({"sweep": objs}, indent=2) + "\n")
    return path


def _cmd_sweep(args) -> int:
    scn = scenario.load_scenario(args.config)
    axes = [_parse_vary(raw) for raw in args.vary]
    fmt = args.format or scn.out_format
    out_dir = _resolve_out_dir(args.out, scn)
    path = run_sweep(scn, axes, out_dir, fmt)
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------


def _wronskian_worst(n_draws: int, rng: np.random.Generator) -> float:
    # FLUXSINK_FAULT=wronskian stands in for a corrupted special-function
    # build: it bumps every deviation by 1e-6 so the gate must go red.
    # Test-only negative control; never set it in real use.
    fault = os.environ.get("FLUXSINK_FAULT", "") == "wronskian"
    worst = 0.0
    for _ in range(n_draws):
        kind = "real" if rng.random() < 0.5 else "imaginary"
        mu = rng.uniform(0.05 if kind == "imaginary" else 0.0, 40.0)
        x = 10.0 ** rng.uniform(-3.0, 4.0)
        dev = specfun.wronskian_check(specfun.Order(kind, mu), x)
        if fault:
            dev += 1e-6
        worst = max(worst, dev)
    return worst


def _residual_worst(n_draws: int, rng: np.random.Generator) -> float:
    # five-point stencil at h = 1e-4 x against the defining equation
    worst = 0.0
    for _ in range(n_draws):
        kind = "real" if rng.random() < 0.5 else "imaginary"
        mu = rng.uniform(0.05 if kind == "imaginary" else 0.0, 5.0)
        order = specfun.Order(kind, mu)
        x = 10.0 ** rng.uniform(math.log10(0.5), 2.0)
        fn = specfun.bessel_j if rng.random() < 0.5 else (
            lambda o, xx: specfun.hankel(1, o, xx)
        )
        h = 1e-4 * x
        ys = [fn(order, x + k * h) for k in (-2, -1, 0, 1, 2)]
        d1 = (ys[0] - 8 * ys[1] + 8 * ys[3] - ys[4]) / (12 * h)
        d2 = (-ys[0] + 16 * ys[1] - 30 * ys[2] + 16 * ys[3] - ys[4]) / (12 * h * h)
        r = d2 + d1 / x + (1.0 - order.nu_squared / (x * x)) * ys[2]
        worst = max(worst, abs(r) / max(abs(ys[2]), 1.0))
    return worst


def _closed_form_worst(n_draws: int, rng: np.random.Generator) -> float:
    worst = 0.0
    for _ in range(n_draws):
        beta = rng.uniform(0.05, 0.95)
        gamma = rng.uniform(0.3, 2.0)
        p = rng.uniform(0.5, 2.0)
        cfg = channels.ScatteringConfig(beta=beta, gamma=gamma, p=p)
        for m in channels.nonregular_modes(cfg):
            mode = channels.classify_mode(cfg, m)
            if mode.regime == channels.Regime.SUPERCRITICAL:
                el = channels.solve_channel(
                    cfg, mode, channels.ElasticSupercritical(theta=rng.uniform(0, 2 * math.pi))
                )
                sk = channels.solve_channel(cfg, mode, channels.Sink())
                want = (1.0 - math.exp(-2.0 * math.pi * mode.mu)) / p
                worst = max(worst, abs(sk.sigma_abs - want) / want)
            else:
                el = channels.solve_channel(
                    cfg, mode, channels.ElasticSubcritical(l=rng.uniform(-2.0, 2.0))
                )
            worst = max(worst, abs(abs(el.s_matrix) - 1.0), el.sigma_abs * p)
            ta = channels.solve_channel(
                cfg, mode, channels.TotalAbsorption(n_minus=abs(m), n_plus=abs(m))
            )
            worst = max(worst, abs(ta.sigma_abs - 1.0 / p) * p)
            want_f = -cmath.exp(-0.25j * math.pi) / p * math.cos(math.pi * beta)
            worst = max(worst, abs(ta.f_coeff - want_f) * p)
    return worst


def _oracle_channels(rng: np.random.Generator, n_draws: int) -> list:
    chans = []
    for _ in range(n_draws):
        if rng.random() < 0.5:
            beta = rng.uniform(0.05, 0.8)
            gamma = beta + rng.uniform(0.3, 1.0)
            cfg = channels.ScatteringConfig(beta=beta, gamma=gamma, p=rng.uniform(0.5, 2.0))
            chans.append((cfg, 0, channels.Sink()))
        else:
            beta = rng.uniform(0.1, 0.8)
            cfg = channels.ScatteringConfig(beta=beta, gamma=0.05, p=rng.uniform(0.5, 2.0))
            chans.append((cfg, 1, channels.ElasticSubcritical(l=rng.uniform(-0.5, 0.5))))
    return chans


def _oracle_worst(chans: list, tol: float) -> float:
    worst = 0.0
    for cfg, m, model in chans:
        mode = channels.classify_mode(cfg, m)
        closed = channels.solve_channel(cfg, mode, model).s_matrix
        probed = oracle.oracle_smatrix(cfg, mode, model, tol=tol)
        worst = max(worst, abs(probed - closed))
    return worst


def _quartic_worst() -> tuple:
    cfg = quartic.QuarticConfig(beta=0.3, lam=1.0, p=1.0)
    flux = 0.0
    unit = 0.0
    for m in (0, 1):
        conn = quartic.connection_matrix(cfg, m)
        flux = max(flux, max(conn.flux_defects))
        sol = quartic.quartic_smatrix(cfg, m, quartic.Elastic())
        unit = max(unit, abs(abs(sol.s_matrix) - 1.0))
    back = quartic.backward_defect(cfg, 0)
    return flux, unit, back


def certify(strict: bool = False, stream=None) -> int:
    """Run the release-gate checks; print the matrix; 0 if all pass else 3."""
    stream = stream or sys.stdout
    rng = np.random.default_rng(20260819)
    checks = []

    checks.append(("wronskian-sweep", _wronskian_worst(30, rng), 1e-8))
    checks.append(("ode-residual-sweep", _residual_worst(30, rng), 1e-6))
    checks.append(("closed-form-invariants", _closed_form_worst(8, rng), 1e-12))

    chans = _oracle_channels(rng, 3)
    worst_default = _oracle_worst(chans, 1e-6)
    checks.append(("oracle-vs-closed", worst_default, 1e-5))
    if strict:
        worst_tight = _oracle_worst(chans, 1e-8)
        checks.append(("oracle-vs-closed/100", worst_tight, 1e-5))
        # convergence evidence: refining the tolerance must help
        checks.append(("oracle-refinement", worst_tight, worst_default))

    flux, unit, back = _quartic_worst()
    checks.append(("quartic-flux-form", flux, 1e-6))
    checks.append(("quartic-elastic-unitarity", unit, 1e-6))
    checks.append(("quartic-backward-roundtrip", back, 1e-5))

    failed = 0
    for name, worst, bound in checks:
        ok = worst <= bound
        failed += 0 if ok else 1
        verdict = "PASS" if ok else "FAIL"
        print(
            f"[{verdict}] {name:28s} worst={worst:.3e}  bound={bound:.3e}",
            file=stream,
        )
    total = len(checks)
    print(f"certify: {total - failed}/{total} checks passed", file=stream)
    return 0 if failed == 0 else 3


def _cmd_certify(args) -> int:
    return certify(strict=args.strict)


# ---------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxsink",
        description="Partial-wave scattering and absorption on flux lines with singular cores.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve one scenario and write tables")
    p_run.add_argument("config", help="scenario file (ini sections, see package docs)")
    p_run.add_argument("--out", help="output directory (overrides FLUXSINK_OUTDIR and the config)")
    p_run.add_argument("--format", choices=("csv", "json"), help="table format (overrides config)")
    p_run.set_defaults(func=_cmd_run)

    p_cert = sub.add_parser("certify", help="run the self-check suite")
    p_cert.add_argument("--strict", action="store_true", help="also rerun the oracle at tolerance/100")
    p_cert.set_defaults(func=_cmd_certify)

    p_sweep = sub.add_parser("sweep", help="Cartesian parameter sweep")
    p_sweep.add_argument("config", help="base scenario file")
    p_sweep.add_argument(
        "--vary",
        action="append",
        required=True,
        metavar="NAME=START:STOP:STEP",
        help="axis to vary (repeatable); rightmost flag varies fastest",
    )
    p_sweep.add_argument("--out", help="output directory (overrides FLUXSINK_OUTDIR and the config)")
    p_sweep.add_argument("--format", choices=("csv", "json"), help="table format (overrides config)")
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FluxsinkError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
