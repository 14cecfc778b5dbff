"""Command-line front end: classify, risk reports, grid sweeps, simulation.

Four subcommands share one model vocabulary (``--family``, ``--zeta``,
``--beta``/``--tau``, ``--power``):

``classify``
    Label a newline-delimited file of statistics (or p-values with
    ``--pvalues``) by the step-up rule with its ``alpha/m`` floor.
``risk``
    Calibrate one configuration and report thresholds, risks, relative
    excess, and every applicable finite-sample bound.
``grid``
    Sweep a (beta, power) lattice for several procedures and emit CSV
    plus a fraction-below-threshold summary per (m, procedure, rule).
``simulate``
    Monte Carlo risk estimation with optional exact-formula cross-check,
    deterministic-threshold agreement mode, and threshold concentration
    profile.

Flags override values from an INI-style ``--config`` file (sections
``[model]``, ``[run]``, ``[grid]``).  Every failure exits nonzero after a
single ``error: ...`` line on stderr.  CSV cells that do not apply hold
``NA``; floats are serialized with full round-trip precision.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import CapacityError, DomainError, FdrThreshError
from .model import CanonicalParams, Kind, calibrate
from .risk import (
    BoundParams,
    EXACT_RISK_CAP,
    bfdr_excess_bound,
    bfdr_ratio_floor,
    exact_fdr_risk,
    explicit_excess_bound,
    fdr_excess_bound,
    rho_rate,
    risk_det,
)
from .simulate import RiskKind, SimConfig, concentration_profile, fdr_rule, mc_risk
from .threshold import (
    LevelChoice,
    bfdr_threshold,
    fdr_threshold,
    pvalues_from_stats,
    q_opt,
    statistic_scale,
)

__all__ = ["GridConfig", "main", "run_grid"]

GRID_HEADER = (
    "family,zeta,m,beta,C,procedure,alpha_rule,alpha,risk,bayes_risk,excess_rel"
)

_NAMED_FAMILIES = {
    "gaussian-location": (Kind.LOCATION, 2.0),
    "gaussian-scale": (Kind.SCALE, 2.0),
    "laplace-scale": (Kind.SCALE, 1.0),
}


class _CliError(Exception):
    """Usage or runtime failure destined for the ``error:`` channel."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(message)


def _fmt(x) -> str:
    if x is None:
        return "NA"
    return repr(float(x))


def _resolve_family(family, zeta):
    """Return ``(label, kind, zeta)`` from the family/zeta flags."""
    if family is None:
        raise _CliError("--family is required")
    family = str(family).lower()
    if family in _NAMED_FAMILIES:
        kind, implied = _NAMED_FAMILIES[family]
        if zeta is not None and float(zeta) != implied:
            raise _CliError(f"family {family} fixes zeta = {implied}")
        return family, kind, implied
    if family in ("location", "scale"):
        if zeta is None:
            raise _CliError(f"family {family} requires --zeta")
        return family, Kind(family), float(zeta)
    raise _CliError(
        f"unknown family {family!r} (choose gaussian-location, gaussian-scale, "
        "laplace-scale, location, or scale)"
    )


def _level_choice(args) -> LevelChoice:
    if args.alpha is not None and args.alpha_opt is not None:
        raise _CliError("choose one of --alpha / --alpha-opt, not both")
    if args.alpha is not None:
        return LevelChoice.fixed(args.alpha)
    if args.alpha_opt is not None:
        b0, c0 = args.alpha_opt
        return LevelChoice.opt_at(b0, c0)
    raise _CliError("an alpha rule is required: --alpha A or --alpha-opt B0 C0")


def _canonical_params(args) -> CanonicalParams:
    if (args.beta is None) == (args.tau is None):
        raise _CliError("exactly one of --beta / --tau is required")
    if args.power is None:
        raise _CliError("--power is required")
    return CanonicalParams(power=args.power, beta=args.beta, tau=args.tau)


def _rho_gamma(kind: Kind, zeta: float) -> float:
    return 1.0 - 1.0 / zeta if kind is Kind.LOCATION else 1.0


# ------------------------------------------------------------------ config


_CONFIG_KEYS = {
    "family": ("model.family",),
    "zeta": ("model.zeta",),
    "beta": ("model.beta",),
    "tau": ("model.tau",),
    "power": ("model.power",),
    "m": ("grid.m", "run.m"),
    "alpha": ("run.alpha",),
    "alpha_opt": ("run.alpha_opt",),
    "pvalues": ("run.pvalues",),
    "risk": ("run.risk",),
    "seed": ("run.seed",),
    "replicates": ("run.replicates",),
    "threads": ("run.threads",),
    "out": ("run.out",),
    "beta_grid": ("grid.beta_grid",),
    "power_grid": ("grid.power_grid",),
    "procedures": ("grid.procedures",),
    "excess_level": ("grid.excess_level",),
}

_CONFIG_CASTS = {
    "zeta": float, "beta": float, "tau": float, "power": float,
    "alpha": float, "excess_level": float,
    "seed": int, "replicates": int, "threads": int,
    "alpha_opt": lambda s: tuple(float(v) for v in s.replace(",", " ").split()),
    "pvalues": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}


def _load_config(path: str) -> dict:
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_string(handle.read(), source=path)
    except OSError as exc:
        raise _CliError(f"cannot read config file: {exc}") from None
    except configparser.Error as exc:
        raise _CliError(f"bad config file: {exc}") from None
    return {
        f"{section}.{key}": value
        for section in parser.sections()
        for key, value in parser[section].items()
    }


def _apply_config(args: argparse.Namespace):
    if getattr(args, "config", None) is None:
        return
    cfg = _load_config(args.config)
    for name, keys in _CONFIG_KEYS.items():
        if getattr(args, name, None) is not None or not hasattr(args, name):
            continue
        for key in keys:
            if key in cfg:
                cast = _CONFIG_CASTS.get(name, str)
                try:
                    setattr(args, name, cast(cfg[key]))
                except ValueError:
                    raise _CliError(f"bad config value {key} = {cfg[key]!r}") from None
                break


# ---------------------------------------------------------------- classify


def _read_numeric_lines(path: str) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise _CliError(str(exc)) from None
    values = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        try:
            values.append(float(text))
        except ValueError:
            raise _CliError(f"line {lineno}: could not parse {text!r}") from None
    if not values:
        raise _CliError("no observations")
    return np.asarray(values)


def cmd_classify(args) -> int:
    data = _read_numeric_lines(args.input)
    m = data.size
    if args.pvalues:
        pvalues = data
        if np.any((pvalues < 0.0) | (pvalues > 1.0)):
            raise _CliError("p-values must lie in [0, 1]")
        family = kind = zeta = None
        if args.family is not None:
            family, kind, zeta = _resolve_family(args.family, args.zeta)
    else:
        family, kind, zeta = _resolve_family(args.family, args.zeta)
        pvalues = pvalues_from_stats(kind, zeta, data)
    rule = _level_choice(args)
    if rule.alpha is None and kind is None:
        raise _CliError("--alpha-opt needs --family to calibrate the reference")
    alpha = rule.alpha if rule.alpha is not None else rule.resolve(kind, zeta, m)
    result = fdr_threshold(pvalues, alpha)
    labels = (pvalues <= result.value).astype(int)

    print(f"# m = {m}")
    print(f"# alpha = {_fmt(alpha)} [{rule.label()}]")
    print(f"# k_hat = {result.k_hat}")
    print(f"# threshold_pvalue = {_fmt(result.value)}")
    if kind is not None:
        stat = statistic_scale(kind, zeta, result.value)
        print(f"# threshold_statistic = {_fmt(stat)}")
    rows = ["index,value,pvalue,label"]
    rows += [
        f"{i},{_fmt(v)},{_fmt(p)},{label}"
        for i, (v, p, label) in enumerate(zip(data, pvalues, labels))
    ]
    text = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


# -------------------------------------------------------------------- risk


def _maybe(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except FdrThreshError:
        return None


def cmd_risk(args) -> int:
    family, kind, zeta = _resolve_family(args.family, args.zeta)
    if args.m is None:
        raise _CliError("--m is required")
    m = int(args.m)
    params = _canonical_params(args)
    rule = _level_choice(args)
    model = calibrate(kind, zeta, params, m)
    alpha = rule.resolve(kind, zeta, m)
    bayes = risk_det(model, model.bayes_threshold)
    bounds = BoundParams(epsilon=args.epsilon, nu=args.nu, case_a=args.case_a)

    t_star = _maybe(lambda: bfdr_threshold(model, alpha).value)
    risk_bfdr = None if t_star is None else risk_det(model, t_star)
    if m <= EXACT_RISK_CAP:
        report_fdr = exact_fdr_risk(model, m, alpha)
    elif args.exact_fdr:
        raise CapacityError(
            f"exact FDR risk is capped at m = {EXACT_RISK_CAP} (requested {m})"
        )
    else:
        report_fdr = None

    lines = [
        f"family = {family}",
        f"zeta = {_fmt(zeta)}",
        f"kind = {kind.value}",
        f"m = {m}",
        f"tau = {_fmt(model.tau)}",
        f"effect {'mu' if kind is Kind.LOCATION else 'sigma'} = {_fmt(model.effect)}",
        f"power C_m = {_fmt(model.power)}",
        f"bayes_threshold = {_fmt(model.bayes_threshold)}",
        f"q_opt = {_fmt(q_opt(model))}",
        f"alpha = {_fmt(alpha)} [{rule.label()}]",
        f"bfdr_threshold = {_fmt(t_star)}",
        f"risk_bayes = {_fmt(bayes)}",
        f"risk_bfdr = {_fmt(risk_bfdr)}",
        "excess_rel_bfdr = "
        + _fmt(None if risk_bfdr is None else (risk_bfdr - bayes) / bayes),
        f"risk_fdr_exact = {_fmt(None if report_fdr is None else report_fdr.risk)}",
        "excess_rel_fdr = "
        + _fmt(None if report_fdr is None else report_fdr.excess_rel),
        f"bound_bfdr_excess = {_fmt(_maybe(bfdr_excess_bound, model, alpha))}",
        f"bound_bfdr_ratio_floor = {_fmt(_maybe(bfdr_ratio_floor, model, alpha))}",
        f"bound_fdr_excess = {_fmt(_maybe(fdr_excess_bound, model, m, alpha, bounds))}",
        "bound_explicit_bfdr = "
        + _fmt(_maybe(explicit_excess_bound, model, m, alpha, "bfdr", bounds)),
        "bound_explicit_fdr = "
        + _fmt(_maybe(explicit_excess_bound, model, m, alpha, "fdr", bounds)),
        "rho_rate = "
        + _fmt(_maybe(rho_rate, m, alpha, _rho_gamma(kind, zeta))),
    ]
    print("\n".join(lines))

    if args.out:
        rows = [GRID_HEADER]
        fdr_risk = None if report_fdr is None else report_fdr.risk
        for procedure, risk in (("bfdr", risk_bfdr), ("fdr", fdr_risk)):
            excess_rel = None if risk is None else (risk - bayes) / bayes
            rows.append(
                ",".join(
                    [
                        family,
                        _fmt(zeta),
                        str(m),
                        _fmt(params.beta) if params.beta is not None else "NA",
                        _fmt(model.power),
                        procedure,
                        rule.label(),
                        _fmt(alpha),
                        _fmt(risk),
                        _fmt(bayes),
                        _fmt(excess_rel),
                    ]
                )
            )
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write("\n".join(rows) + "\n")
    return 0


# -------------------------------------------------------------------- grid


@dataclass(frozen=True)
class GridConfig:
    """A grid sweep request: models on a (beta, power) lattice.

    ``procedures`` may contain ``bayes0`` (the fixed threshold calibrated
    at ``bayes0_reference``), ``bfdr``, and ``fdr`` (exact inductive
    risk); every (m, beta, C, procedure, rule) combination yields one CSV
    row, in row-major order over the declared grids.
    """

    family: str
    zeta: float
    kind: Kind
    m_list: tuple
    beta_grid: tuple
    power_grid: tuple
    procedures: tuple = ("bayes0", "bfdr", "fdr")
    rules: tuple = (LevelChoice.opt_at(0.5, 0.5),)
    bayes0_reference: tuple = (0.5, 0.5)
    excess_level: float = 0.1

    def __post_init__(self):
        for name in ("m_list", "beta_grid", "power_grid", "procedures", "rules"):
            seq = tuple(getattr(self, name))
            object.__setattr__(self, name, seq)
            if not seq:
                raise DomainError(f"{name} must be nonempty")
        for name in ("m_list", "beta_grid", "power_grid"):
            seq = getattr(self, name)
            if any(b <= a for a, b in zip(seq, seq[1:])):
                raise DomainError(f"{name} must be strictly increasing")
        for m in self.m_list:
            if int(m) != m or m < 2:
                raise DomainError(f"grid m values must be integers >= 2, got {m!r}")
            if m > EXACT_RISK_CAP and "fdr" in self.procedures:
                raise CapacityError(
                    f"exact FDR cells are capped at m = {EXACT_RISK_CAP}"
                )
        if not all(0.0 < b <= 1.0 for b in self.beta_grid):
            raise DomainError("beta grid must lie in (0, 1]")
        if not all(0.0 < c < 1.0 for c in self.power_grid):
            raise DomainError("power grid must lie in (0, 1)")
        for proc in self.procedures:
            if proc not in ("bayes0", "bfdr", "fdr"):
                raise DomainError(f"unknown procedure {proc!r}")
        if not (0.0 < self.excess_level):
            raise DomainError("excess_level must be positive")


def _grid_cell(task):
    """All rows of one (m, beta, C) cell; runs inside worker processes."""
    kind, zeta, m, beta, power, procedures, rules, reference = task
    out = []
    try:
        model = calibrate(kind, zeta, CanonicalParams(power=power, beta=beta), m)
        bayes = risk_det(model, model.bayes_threshold)
    except FdrThreshError:
        model = bayes = None
    t0 = None
    if model is not None and "bayes0" in procedures:
        try:
            b0, c0 = reference
            t0 = calibrate(
                kind, zeta, CanonicalParams(power=c0, beta=b0), m
            ).bayes_threshold
        except FdrThreshError:
            t0 = None
    for procedure in procedures:
        for rule in rules:
            alpha = risk = None
            if model is not None:
                try:
                    if procedure == "bayes0":
                        if t0 is not None:
                            risk = risk_det(model, t0)
                    else:
                        alpha = rule.resolve(kind, zeta, m)
                        if procedure == "bfdr":
                            risk = risk_det(model, bfdr_threshold(model, alpha).value)
                        else:
                            risk = exact_fdr_risk(model, m, alpha).risk
                except FdrThreshError:
                    risk = None
            excess_rel = None if risk is None else (risk - bayes) / bayes
            out.append((procedure, rule.label(), alpha, risk, bayes, excess_rel))
    return out


def run_grid(config: GridConfig, threads: int = 1):
    """Evaluate every cell; returns ``(rows, summary)``.

    ``rows`` are per-(m, beta, C, procedure, rule) tuples mirroring the
    CSV schema; ``summary`` maps (m, procedure, rule label) to the
    fraction of cells at or below ``config.excess_level`` plus cell and
    failure counts.  Cells are computed in parallel when ``threads > 1``
    but rows always come back in declared row-major order.
    """
    tasks = [
        (config.kind, config.zeta, int(m), beta, power,
         config.procedures, config.rules, config.bayes0_reference)
        for m in config.m_list
        for beta in config.beta_grid
        for power in config.power_grid
    ]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            cell_rows = list(pool.map(_grid_cell, tasks))
    else:
        cell_rows = [_grid_cell(task) for task in tasks]

    rows = []
    tally = {}
    for task, cell in zip(tasks, cell_rows):
        _, _, m, beta, power, _, _, _ = task
        for procedure, rule_label, alpha, risk, bayes, excess_rel in cell:
            rows.append(
                (config.family, config.zeta, m, beta, power,
                 procedure, rule_label, alpha, risk, bayes, excess_rel)
            )
            entry = tally.setdefault((m, procedure, rule_label), [0, 0, 0])
            entry[2] += 1
            if excess_rel is None:
                entry[1] += 1
            elif excess_rel <= config.excess_level:
                entry[0] += 1
    summary = [
        {
            "m": m,
            "procedure": procedure,
            "rule": rule_label,
            "fraction": hits / cells,
            "cells": cells,
            "failures": failures,
        }
        for (m, procedure, rule_label), (hits, failures, cells) in tally.items()
    ]
    return rows, summary


def _write_grid_csv(path: str, rows) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(GRID_HEADER.split(","))
            for family, zeta, m, beta, power, proc, rule_label, alpha, risk, bayes, excess in rows:
                writer.writerow(
                    [family, _fmt(zeta), str(m), _fmt(beta), _fmt(power),
                     proc, rule_label, _fmt(alpha), _fmt(risk), _fmt(bayes),
                     _fmt(excess)]
                )
    except OSError as exc:
        raise _CliError(f"cannot write {path}: {exc}") from None


def _parse_grid_axis(spec, name) -> tuple:
    if spec is None:
        spec = "21"
    text = str(spec).strip()
    if "," not in text and "." not in text:
        count = int(text)
        if count < 2:
            raise _CliError(f"{name} needs at least 2 points, got {count}")
        return tuple(np.linspace(0.025, 0.975, count))
    return tuple(float(v) for v in text.split(","))


def cmd_grid(args) -> int:
    family, kind, zeta = _resolve_family(args.family, args.zeta)
    if args.out is None:
        raise _CliError("grid requires --out for the CSV file")
    m_list = tuple(int(v) for v in str(args.m or "25,100,1000").split(","))
    rules = []
    if args.alpha is not None:
        rules.append(LevelChoice.fixed(args.alpha))
    if args.alpha_opt is not None:
        rules.append(LevelChoice.opt_at(*args.alpha_opt))
    reference = tuple(args.alpha_opt) if args.alpha_opt is not None else (0.5, 0.5)
    config = GridConfig(
        family=family,
        zeta=zeta,
        kind=kind,
        m_list=m_list,
        beta_grid=_parse_grid_axis(args.beta_grid, "--beta-grid"),
        power_grid=_parse_grid_axis(args.power_grid, "--power-grid"),
        procedures=tuple(str(args.procedures or "bayes0,bfdr,fdr").split(",")),
        rules=tuple(rules) or (LevelChoice.opt_at(0.5, 0.5),),
        bayes0_reference=reference,
        excess_level=args.excess_level if args.excess_level is not None else 0.1,
    )
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    rows, summary = run_grid(config, threads=threads)
    _write_grid_csv(args.out, rows)
    print(f"# wrote {len(rows)} rows to {args.out}")
    for entry in summary:
        print(
            f"m={entry['m']} procedure={entry['procedure']} rule={entry['rule']} "
            f"fraction_excess_le_{config.excess_level:g}={entry['fraction']:.6f} "
            f"cells={entry['cells']} failures={entry['failures']}"
        )
    return 0


# ---------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    family, kind, zeta = _resolve_family(args.family, args.zeta)
    if args.m is None:
        raise _CliError("--m is required")
    m = int(args.m)
    params = _canonical_params(args)
    rule = _level_choice(args)
    model = calibrate(kind, zeta, params, m)
    alpha = rule.resolve(kind, zeta, m)
    seed = args.seed if args.seed is not None else 0
    replicates = args.replicates if args.replicates is not None else 1000
    risk_kind = RiskKind(args.risk) if args.risk else RiskKind.INDUCTIVE

    lines = [
        f"# seed = {seed}",
        f"# family={family} zeta={_fmt(zeta)} m={m} replicates={replicates}",
        f"# alpha = {_fmt(alpha)} [{rule.label()}] risk_kind={risk_kind.value}",
        "quantity,value,se",
    ]
    if args.fixed_threshold is not None:
        t = float(args.fixed_threshold)
        tra = mc_risk(SimConfig(model, m, replicates, seed, RiskKind.TRANSDUCTIVE), t)
        ind = mc_risk(SimConfig(model, m, replicates, seed, RiskKind.INDUCTIVE), t)
        lines.append(f"risk_transductive,{_fmt(tra.mean)},{_fmt(tra.se)}")
        lines.append(f"risk_inductive,{_fmt(ind.mean)},{_fmt(ind.se)}")
        gap = abs(tra.mean - ind.mean)
        slack = 3.0 * math.hypot(tra.se if tra.se == tra.se else 0.0,
                                 ind.se if ind.se == ind.se else 0.0)
        verdict = "PASS" if gap <= max(slack, 1e-15) else "FAIL"
        lines.append(
            f"# agreement: {verdict} |R_T - R_I| = {gap:.6g} <= 3 se = {slack:.6g}"
        )
    else:
        cfg = SimConfig(model, m, replicates, seed, risk_kind)
        est = mc_risk(cfg, fdr_rule(alpha))
        lines.append(f"risk_mc,{_fmt(est.mean)},{_fmt(est.se)}")
        if args.check_exact:
            want = exact_fdr_risk(model, m, alpha).risk
            gap = abs(est.mean - want)
            slack = 3.0 * est.se
            verdict = "PASS" if gap <= max(slack, 1e-15) else "FAIL"
            lines.append(f"risk_exact,{_fmt(want)},NA")
            lines.append(
                f"# check_exact: {verdict} |mc - exact| = {gap:.6g} <= 3 se = {slack:.6g}"
            )
        if args.profile:
            prof = concentration_profile(cfg, alpha)
            lines.append(f"threshold_q05,{_fmt(prof.quantile_05)},NA")
            lines.append(f"threshold_median,{_fmt(prof.median)},NA")
            lines.append(f"threshold_q95,{_fmt(prof.quantile_95)},NA")
            lines.append(f"threshold_bfdr_reference,{_fmt(prof.bfdr_reference)},NA")
            lines.append(f"threshold_floor_reference,{_fmt(prof.floor_reference)},NA")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as exc:
            raise _CliError(f"cannot write {args.out}: {exc}") from None
    return 0


# -------------------------------------------------------------------- main


def _add_model_flags(parser):
    parser.add_argument("--family", help="gaussian-location, gaussian-scale, "
                        "laplace-scale, or generic location/scale with --zeta")
    parser.add_argument("--zeta", type=float, help="Subbotin shape exponent")
    parser.add_argument("--beta", type=float, help="sparsity exponent: tau = m**beta")
    parser.add_argument("--tau", type=float, help="sparsity ratio pi0/pi1")
    parser.add_argument("--power", type=float, help="target power C of the Bayes rule")


def _add_level_flags(parser):
    parser.add_argument("--alpha", type=float, help="fixed nominal level")
    parser.add_argument("--alpha-opt", nargs=2, type=float, metavar=("B0", "C0"),
                        help="use the optimal level of the (B0, C0) reference model")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fdrthresh", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="INI config file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="label a file of statistics or p-values")
    p.add_argument("input", help="newline-delimited numeric file")
    p.add_argument("--pvalues", action="store_true", default=None,
                   help="input holds p-values, skip standardization")
    _add_model_flags(p)
    _add_level_flags(p)
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("risk", help="thresholds, risks, and bounds for one model")
    _add_model_flags(p)
    _add_level_flags(p)
    p.add_argument("--m", type=int, help="number of observations")
    p.add_argument("--exact-fdr", action="store_true", default=None,
                   help="fail instead of skipping exact FDR risk past the cap")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--nu", type=float, default=0.25)
    p.add_argument("--case-a", type=int, default=1, choices=(1, 2))
    p.add_argument("--out", help="also write the risk rows as CSV")
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser("grid", help="sweep a (beta, power) lattice to CSV")
    _add_model_flags(p)
    _add_level_flags(p)
    p.add_argument("--m", help="comma-separated m values (default 25,100,1000)")
    p.add_argument("--beta-grid", help="comma-separated betas, or a point count")
    p.add_argument("--power-grid", help="comma-separated powers, or a point count")
    p.add_argument("--procedures", help="subset of bayes0,bfdr,fdr")
    p.add_argument("--excess-level", type=float, help="summary threshold (default 0.1)")
    p.add_argument("--threads", type=int, help="worker processes (default: all cores)")
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("simulate", help="Monte Carlo risk and concentration")
    _add_model_flags(p)
    _add_level_flags(p)
    p.add_argument("--m", type=int, help="observations per replicate")
    p.add_argument("--replicates", type=int, help="number of replicates (default 1000)")
    p.add_argument("--seed", type=int, help="base seed (default 0)")
    p.add_argument("--risk", choices=("transductive", "inductive"),
                   help="which risk to estimate (default inductive)")
    p.add_argument("--check-exact", action="store_true", default=None,
                   help="cross-check against the exact FDR risk formula")
    p.add_argument("--fixed-threshold", type=float,
                   help="deterministic-threshold mode: report both risks")
    p.add_argument("--profile", action="store_true", default=None,
                   help="also report FDR-threshold concentration quantiles")
    p.add_argument("--out", help="also write the report to a file")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _apply_config(args)
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FdrThreshError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
