"""Command-line front end.

Subcommands cover the full pipeline: ingest + descriptive tables
(``describe``), normality and unit-root tests (``test``), two-stage
volatility/correlation fits (``fit``), the risk report (``risk``), all of
the above (``report``), and seeded panel generation (``simulate``).  Runs
are driven by a YAML config; a fixed config + seed gives byte-identical
outputs.  Logging goes to stderr (level via VOLRISK_LOG); data only to
files and stdout.

Exit codes: 0 success, 1 model non-convergence (outputs still written),
2 input error, 3 config error.
"""
from __future__ import annotations

import argparse
import datetime
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date as Date
from pathlib import Path

import numpy as np
import yaml

from .dcc import DccParams, fit_dcc, simulate_dcc_panel
from .distributions import FAMILIES, InnovationDist
from .egarch import EgarchFit, EgarchParams, MeanParams, MeanSpec, fit_egarch
from .market_data import (
    DataError,
    ReturnPanel,
    adf_test,
    align_panel,
    describe,
    jarque_bera,
    kpss_test,
    load_price_series,
    log_returns,
    pearson_correlation,
)
from .risk import RiskSpec, drawdown, risk_report

__all__ = ["ConfigError", "RunConfig", "load_run_config", "main"]

log = logging.getLogger("volrisk.cli")

EXIT_OK = 0
EXIT_NONCONVERGED = 1
EXIT_INPUT = 2
EXIT_CONFIG = 3

# two-sided normal critical values at the 1 / 5 / 10 percent levels
_STARS = ((2.5758293035489004, "***"), (1.959963984540054, "**"), (1.6448536269514722, "*"))

_DEFAULT_LEVELS = (0.90, 0.95, 0.99)


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class AssetConfig:
    symbol: str
    source: str
    columns: "dict | None" = None
    mean: MeanSpec = field(default_factory=MeanSpec)


@dataclass(frozen=True)
class RunConfig:
    assets: tuple
    periods: tuple = (("full", None, None),)
    family: str = "student_t"
    levels: tuple = _DEFAULT_LEVELS
    amount: float = 1.0
    out_dir: str = "out"
    seed: int = 0
    risk_free: "float | None" = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "assets", tuple(self.assets))
        object.__setattr__(self, "periods", tuple(tuple(p) for p in self.periods))
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.assets:
            raise ConfigError("at least one asset required")
        symbols = [a.symbol for a in self.assets]
        if len(set(symbols)) != len(symbols):
            raise ConfigError(f"duplicate asset symbols: {symbols}")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown distribution {self.family!r}; expected one of {FAMILIES}")
        for lv in self.levels:
            if not 0.0 < lv < 1.0:
                raise ConfigError(f"levels must lie strictly in (0, 1), got {lv}")
        if not (math.isfinite(self.amount) and self.amount > 0.0):
            raise ConfigError(f"portfolio amount must be > 0, got {self.amount}")


def _as_date(v, where: str) -> "Date | None":
    if v is None:
        return None
    if isinstance(v, datetime.datetime):
        return v.date()
    if isinstance(v, Date):
        return v
    if isinstance(v, str):
        try:
            return Date.fromisoformat(v)
        except ValueError:
            pass
    raise ConfigError(f"{where}: expected an ISO date, got {v!r}")


def _check_keys(section: dict, allowed: set, where: str) -> None:
    extra = set(section) - allowed
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")


def _parse_asset(raw, idx: int) -> AssetConfig:
    where = f"assets[{idx}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a mapping")
    _check_keys(raw, {"symbol", "source", "columns", "mean"}, where)
    for key in ("symbol", "source"):
        if not isinstance(raw.get(key), str) or not raw[key]:
            raise ConfigError(f"{where}: {key!r} is required")
    columns = raw.get("columns")
    if columns is not None:
        if not isinstance(columns, dict):
            raise ConfigError(f"{where}: columns must be a mapping")
        columns = {str(k): str(v) for k, v in columns.items()}
    mean_raw = raw.get("mean") or {}
    if not isinstance(mean_raw, dict):
        raise ConfigError(f"{where}: mean must be a mapping")
    _check_keys(mean_raw, {"ar", "ma", "constant"}, f"{where}.mean")
    try:
        mean = MeanSpec(
            ar_order=int(mean_raw.get("ar", 0)),
            ma_order=int(mean_raw.get("ma", 0)),
            include_constant=bool(mean_raw.get("constant", True)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}.mean: {exc}") from exc
    return AssetConfig(symbol=raw["symbol"], source=raw["source"], columns=columns, mean=mean)


def _parse_periods(raw) -> tuple:
    if raw is None:
        return (("full", None, None),)
    if not isinstance(raw, dict) or not raw:
        raise ConfigError("periods: expected a non-empty mapping of name -> {start, end}")
    periods = []
    for name, bounds in raw.items():
        where = f"periods[{name}]"
        bounds = bounds or {}
        if not isinstance(bounds, dict):
            raise ConfigError(f"{where}: expected a mapping with start/end")
        _check_keys(bounds, {"start", "end"}, where)
        start = _as_date(bounds.get("start"), where)
        end = _as_date(bounds.get("end"), where)
        if start is not None and end is not None and start > end:
            raise ConfigError(f"{where}: start {start} after end {end}")
        periods.append((str(name), start, end))
    return tuple(periods)


_TOP_KEYS = {
    "assets", "periods", "distribution", "levels", "portfolio_amount",
    "output_dir", "seed", "risk_free_rate",
}


def load_run_config(path: "str | None", overrides: "dict | None" = None) -> RunConfig:
    """Parse and validate a YAML run config; ``overrides`` (from CLI flags)
    replace the corresponding config fields."""
    if path is None:
        raise ConfigError("--config is required for this command")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path}: expected a top-level mapping")
    _check_keys(raw, _TOP_KEYS, "config")
    assets_raw = raw.get("assets")
    if not isinstance(assets_raw, list) or not assets_raw:
        raise ConfigError("config: 'assets' must be a non-empty list")
    assets = tuple(_parse_asset(a, i) for i, a in enumerate(assets_raw))
    levels = raw.get("levels", _DEFAULT_LEVELS)
    if not isinstance(levels, (list, tuple)) or not levels:
        raise ConfigError("config: 'levels' must be a non-empty list")
    try:
        levels = tuple(float(v) for v in levels)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: bad levels: {exc}") from exc
    risk_free = raw.get("risk_free_rate")
    if risk_free is not None:
        try:
            risk_free = float(risk_free)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"config: bad risk_free_rate: {exc}") from exc
    try:
        seed = int(raw.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: bad seed: {exc}") from exc
    fields = {
        "assets": assets,
        "periods": _parse_periods(raw.get("periods")),
        "family": str(raw.get("distribution", "student_t")),
        "levels": levels,
        "amount": float(raw.get("portfolio_amount", 1.0)),
        "out_dir": str(raw.get("output_dir", "out")),
        "seed": seed,
        "risk_free": risk_free,
    }
    fields.update(overrides or {})
    return RunConfig(**fields)


# ---------------------------------------------------------------------------
# output plumbing

class OutputCollector:
    """Buffers every file for a command and writes them in one pass, so
    parallel workers never interleave writes."""

    def __init__(self) -> None:
        self._files: dict = {}

    def add(self, name: str, content: str) -> None:
        self._files[name] = content

    def write(self, out_dir: str) -> list:
        root = Path(out_dir)
        try:
            root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"output directory {out_dir}: {exc}") from exc
        names = sorted(self._files)
        for name in names:
            try:
                (root / name).write_text(self._files[name], encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot write {root / name}: {exc}") from exc
            log.info("wrote %s", root / name)
        return names


def _sanitize(obj):
    # non-finite floats have no strict-JSON encoding
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _json(obj) -> str:
    return json.dumps(_sanitize(obj), sort_keys=True, indent=2) + "\n"


def _slug(symbol: str) -> str:
    return "".join(c if c.isalnum() or c in "-." else "_" for c in symbol)


def _fmt(v: float, places: int = 6) -> str:
    if not math.isfinite(v):
        return "nan"
    return f"{v:.{places}f}"


# ---------------------------------------------------------------------------
# shared pipeline steps

def _load_panel(cfg: RunConfig) -> ReturnPanel:
    series = []
    for a in cfg.assets:
        try:
            prices = load_price_series(a.source, a.columns, symbol=a.symbol)
        except DataError as exc:
            raise DataError(f"{a.symbol}: {exc}") from exc
        series.append(log_returns(prices))
        log.info("loaded %s: %d returns", a.symbol, len(series[-1]))
    if len(series) == 1:
        only = series[0]
        return ReturnPanel(series=(only,), dates=only.dates)
    return align_panel(series)


def _stats_tables(panel: ReturnPanel, risk_free: "float | None") -> tuple:
    stats = {s.symbol: describe(s, risk_free) for s in panel.series}
    header = ["symbol", "n", "mean", "std", "min", "max",
              "skewness", "excess_kurtosis", "q25", "q75"]
    if risk_free is not None:
        header.append("sharpe")
    lines = [",".join(header)]
    for s in panel.series:
        d = stats[s.symbol]
        row = [s.symbol, str(d.n)] + [
            _fmt(v) for v in (d.mean, d.std, d.min, d.max,
                              d.skewness, d.excess_kurtosis, d.q25, d.q75)
        ]
        if risk_free is not None:
            row.append(_fmt(d.sharpe))
        lines.append(",".join(row))
    csv = "\n".join(lines) + "\n"
    js = _json({sym: st.to_dict() for sym, st in stats.items()})
    return csv, js, stats


def _correlation_tables(panel: ReturnPanel) -> tuple:
    symbols = list(panel.symbols)
    if len(symbols) >= 2:
        C = pearson_correlation(panel)
    else:
        C = np.ones((1, 1))
    lines = [",".join(["symbol"] + symbols)]
    for i, sym in enumerate(symbols):
        lines.append(",".join([sym] + [_fmt(C[i, j]) for j in range(len(symbols))]))
    csv = "\n".join(lines) + "\n"
    js = _json({"symbols": symbols, "matrix": [[float(v) for v in row] for row in C]})
    return csv, js


def _jb_tables(panel: ReturnPanel, stats: dict) -> tuple:
    results = {sym: jarque_bera(stats[sym]) for sym in panel.symbols}
    lines = ["symbol,statistic,crit_0.01,crit_0.05,crit_0.10,reject_0.05"]
    for sym in panel.symbols:
        t = results[sym]
        crits = t.decision_inputs["critical_values"]
        lines.append(",".join([
            sym, _fmt(t.statistic),
            _fmt(crits["0.01"]), _fmt(crits["0.05"]), _fmt(crits["0.10"]),
            str(t.reject_null).lower(),
        ]))
    csv = "\n".join(lines) + "\n"
    js = _json({sym: t.to_dict() for sym, t in results.items()})
    return csv, js


def _unit_root_tables(panel: ReturnPanel) -> tuple:
    rows = {}
    for s in panel.series:
        rows[s.symbol] = (adf_test(s), kpss_test(s))
    lines = ["symbol,adf_statistic,adf_reject_0.05,kpss_statistic,kpss_reject_0.05"]
    for sym in panel.symbols:
        adf, kpss = rows[sym]
        lines.append(",".join([
            sym,
            _fmt(adf.statistic), str(adf.reject_null).lower(),
            _fmt(kpss.statistic), str(kpss.reject_null).lower(),
        ]))
    csv = "\n".join(lines) + "\n"
    js = _json({sym: {"adf": a.to_dict(), "kpss": k.to_dict()}
                for sym, (a, k) in rows.items()})
    return csv, js


# ---------------------------------------------------------------------------
# commands

def cmd_describe(cfg: RunConfig) -> int:
    panel = _load_panel(cfg)
    out = OutputCollector()
    stats_csv, stats_json, stats = _stats_tables(panel, cfg.risk_free)
    corr_csv, corr_json = _correlation_tables(panel)
    jb_csv, jb_json = _jb_tables(panel, stats)
    ur_csv, ur_json = _unit_root_tables(panel)
    out.add("stats.csv", stats_csv)
    out.add("stats.json", stats_json)
    out.add("correlation.csv", corr_csv)
    out.add("correlation.json", corr_json)
    out.add("jarque_bera.csv", jb_csv)
    out.add("jarque_bera.json", jb_json)
    out.add("unit_root.csv", ur_csv)
    out.add("unit_root.json", ur_json)
    out.write(cfg.out_dir)
    return EXIT_OK


def cmd_test(cfg: RunConfig) -> int:
    panel = _load_panel(cfg)
    out = OutputCollector()
    _, _, stats = _stats_tables(panel, cfg.risk_free)
    jb_csv, jb_json = _jb_tables(panel, stats)
    ur_csv, ur_json = _unit_root_tables(panel)
    out.add("jarque_bera.csv", jb_csv)
    out.add("jarque_bera.json", jb_json)
    out.add("unit_root.csv", ur_csv)
    out.add("unit_root.json", ur_json)
    out.write(cfg.out_dir)
    return EXIT_OK


def _stars(estimate: float, se: float) -> str:
    if not (math.isfinite(se) and se > 0.0):
        return ""
    t = abs(estimate / se)
    for crit, mark in _STARS:
        if t >= crit:
            return mark
    return ""


def _summary_block(fit: EgarchFit) -> list:
    lines = [
        f"{fit.symbol}  {fit.model}-{fit.params.dist.family}  "
        f"n={fit.n_obs}  converged={'yes' if fit.converged else 'NO'}",
        f"  {'param':<12}{'estimate':>14}{'std.err':>14}",
    ]
    for name, est in zip(fit.param_names, fit.estimates):
        se = fit.std_errors[name]
        se_txt = _fmt(se) if math.isfinite(se) else "n/a"
        lines.append(f"  {name:<12}{_fmt(est):>14}{se_txt:>14}  {_stars(est, se)}".rstrip())
    lines.append(
        f"  loglik {_fmt(fit.loglik, 4)}   aic {_fmt(fit.aic, 4)}"
        f"   aic/obs {_fmt(fit.aic_per_obs)}"
    )
    return lines


def _fit_stage1(cfg: RunConfig, panel: ReturnPanel) -> list:
    means = {a.symbol: a.mean for a in cfg.assets}

    def fit_one(series):
        log.info("fitting %s", series.symbol)
        return fit_egarch(series, mean=means[series.symbol], family=cfg.family)

    # per-asset likelihoods release no GIL during the variance loop, but
    # fits are small; threads keep ordering deterministic via map
    with ThreadPoolExecutor(max_workers=min(8, len(panel.series))) as pool:
        return list(pool.map(fit_one, panel.series))


def cmd_fit(cfg: RunConfig) -> int:
    panel = _load_panel(cfg)
    out = OutputCollector()
    fits = _fit_stage1(cfg, panel)
    summary = ["model fit summary", "================="]
    code = EXIT_OK
    for fit in fits:
        out.add(f"fit_{_slug(fit.symbol)}.json", _json(fit.to_dict(include_paths=True)))
        summary.append("")
        summary.extend(_summary_block(fit))
        if not fit.converged:
            code = EXIT_NONCONVERGED
            log.warning("%s: fit did not converge", fit.symbol)
    if len(fits) >= 2:
        joint = fit_dcc(fits, family=cfg.family)
        out.add("dcc.json", _json(joint.to_dict(include_paths=False)))
        summary.append("")
        summary.append(
            f"joint dcc(1,1)  assets={','.join(joint.symbols)}  "
            f"n={joint.n_obs}  converged={'yes' if joint.converged else 'NO'}"
        )
        summary.append(f"  {'param':<12}{'estimate':>14}{'std.err':>14}")
        for name, est in (
            ("alpha", joint.params.alpha),
            ("beta", joint.params.beta),
            ("joint_shape", joint.params.joint_shape),
        ):
            se = joint.std_errors[name]
            se_txt = _fmt(se) if math.isfinite(se) else "n/a"
            summary.append(f"  {name:<12}{_fmt(est):>14}{se_txt:>14}  {_stars(est, se)}".rstrip())
        summary.append(
            f"  loglik {_fmt(joint.loglik_joint, 4)}   aic {_fmt(joint.aic_joint, 4)}"
            f"   aic/obs {_fmt(joint.aic_joint_per_obs)}"
        )
        if not joint.converged:
            code = EXIT_NONCONVERGED
            log.warning("joint correlation fit did not converge")
    else:
        log.info("single asset: skipping the correlation stage")
    out.add("summary.txt", "\n".join(summary) + "\n")
    out.write(cfg.out_dir)
    return code


def cmd_risk(cfg: RunConfig) -> int:
    panel = _load_panel(cfg)
    spec = RiskSpec(levels=cfg.levels, amount=cfg.amount, periods=cfg.periods)
    report = risk_report(panel, spec)
    out = OutputCollector()
    out.add("risk.csv", report.to_csv())
    out.add("risk.json", _json(report.to_dict()))
    for s in panel.series:
        series, _ = drawdown(s)
        lines = ["date,drawdown"]
        lines.extend(f"{d.isoformat()},{v:.8f}" for d, v in series)
        out.add(f"drawdown_{_slug(s.symbol)}.csv", "\n".join(lines) + "\n")
    out.write(cfg.out_dir)
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    code = cmd_describe(cfg)
    code = max(code, cmd_fit(cfg))
    code = max(code, cmd_risk(cfg))
    return code


def _simulation_dgp(k: int) -> tuple:
    dist = InnovationDist("student_t", shape=8.0)
    assets = []
    for i in range(k):
        b = 0.95 - 0.01 * i
        assets.append(EgarchParams(
            mean=MeanParams(),
            omega=-0.25 * (1.0 - b),
            a_mag=0.15,
            xi=-0.08 + 0.01 * i,
            b_pers=b,
            dist=dist,
        ))
    Qbar = np.full((k, k), 0.5)
    np.fill_diagonal(Qbar, 1.0)
    dcc = DccParams(alpha=0.05, beta=0.90, joint_shape=8.0)
    return assets, dcc, Qbar


def cmd_simulate(out_dir: str, seed: int, n_assets: int, length: int, start: Date) -> int:
    if n_assets < 2:
        raise ConfigError(f"simulate needs at least 2 assets, got {n_assets}")
    if length < 50:
        raise ConfigError(f"simulate needs length >= 50, got {length}")
    assets, dcc, Qbar = _simulation_dgp(n_assets)
    returns, _ = simulate_dcc_panel(assets, dcc, Qbar, n=length, seed=seed)
    # unit-scale DGP mapped onto a 1%-vol price tape
    scale = 0.01
    symbols = [f"SIM{i + 1}" for i in range(n_assets)]
    dates = []
    d = start
    while len(dates) < length + 1:
        if d.weekday() < 5:
            dates.append(d)
        d += datetime.timedelta(days=1)
    out = OutputCollector()
    for j, sym in enumerate(symbols):
        prices = 100.0 * np.exp(np.concatenate(([0.0], np.cumsum(scale * returns[:, j]))))
        lines = ["date,close"]
        lines.extend(f"{dt.isoformat()},{p:.10f}" for dt, p in zip(dates, prices))
        out.add(f"sim_{sym}.csv", "\n".join(lines) + "\n")
    root = Path(out_dir).resolve()
    cfg_doc = {
        "seed": seed,
        "output_dir": str(root / "results"),
        "distribution": "student_t",
        "levels": [0.90, 0.95, 0.99],
        "assets": [
            {"symbol": sym, "source": str(root / f"sim_{sym}.csv")}
            for sym in symbols
        ],
        "periods": {
            "full": {"start": dates[1].isoformat(), "end": dates[-1].isoformat()},
        },
    }
    out.add("sim_config.yaml", yaml.safe_dump(cfg_doc, sort_keys=True))
    truth = {
        "seed": seed,
        "length": length,
        "return_scale": scale,
        "assets": {
            sym: {
                "omega": p.omega, "a_mag": p.a_mag, "xi": p.xi, "b_pers": p.b_pers,
                "shape": p.dist.shape,
            }
            for sym, p in zip(symbols, assets)
        },
        "dcc": {"alpha": dcc.alpha, "beta": dcc.beta, "joint_shape": dcc.joint_shape},
        "Qbar": [[float(v) for v in row] for row in Qbar],
    }
    out.add("sim_truth.json", _json(truth))
    out.write(out_dir)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing and dispatch

def _parse_levels(text: str) -> tuple:
    try:
        levels = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --levels {text!r}: {exc}") from exc
    if not levels:
        raise ConfigError(f"bad --levels {text!r}: empty")
    return levels


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML run config")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
    common.add_argument("--seed", type=int, metavar="N", help="seed (overrides config)")
    common.add_argument("--levels", metavar="L1,L2,...",
                        help="confidence levels (overrides config)")
    common.add_argument("--portfolio-amount", type=float, metavar="W",
                        dest="portfolio_amount", help="portfolio amount (overrides config)")
    common.add_argument("--validate", action="store_true",
                        help="parse and validate the config, then exit")
    parser = argparse.ArgumentParser(
        prog="volrisk",
        description="volatility, correlation, and downside-risk toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("describe", parents=[common],
                   help="descriptive stats, correlation, JB, and unit-root tables")
    sub.add_parser("test", parents=[common],
                   help="normality and unit-root tables only")
    sub.add_parser("fit", parents=[common],
                   help="per-asset volatility fits plus the joint correlation fit")
    sub.add_parser("risk", parents=[common],
                   help="VaR variants and drawdowns per asset/period/level")
    sub.add_parser("report", parents=[common], help="describe + fit + risk")
    sim = sub.add_parser("simulate", parents=[common],
                         help="generate a seeded correlated panel for testing")
    sim.add_argument("--assets", type=int, default=3, metavar="K")
    sim.add_argument("--length", type=int, default=1000, metavar="T")
    sim.add_argument("--start", default="2019-01-01", metavar="DATE")
    return parser


def _setup_logging() -> None:
    name = os.environ.get("VOLRISK_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def _overrides(args) -> dict:
    ov: dict = {}
    if args.out is not None:
        ov["out_dir"] = args.out
    if args.seed is not None:
        ov["seed"] = args.seed
    if args.levels is not None:
        ov["levels"] = _parse_levels(args.levels)
    if args.portfolio_amount is not None:
        ov["amount"] = args.portfolio_amount
    return ov


def main(argv=None) -> int:
    _setup_logging()
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate" and args.config is None and not args.validate:
            return cmd_simulate(
                out_dir=args.out or "out",
                seed=args.seed if args.seed is not None else 0,
                n_assets=args.assets,
                length=args.length,
                start=_as_date(args.start, "--start"),
            )
        cfg = load_run_config(args.config, _overrides(args))
        if args.validate:
            print(f"config ok: {len(cfg.assets)} asset(s), "
                  f"{len(cfg.periods)} period(s), output to {cfg.out_dir}")
            return EXIT_OK
        if args.command == "describe":
            return cmd_describe(cfg)
        if args.command == "test":
            return cmd_test(cfg)
        if args.command == "fit":
            return cmd_fit(cfg)
        if args.command == "risk":
            return cmd_risk(cfg)
        if args.command == "report":
            return cmd_report(cfg)
        if args.command == "simulate":
            return cmd_simulate(
                out_dir=args.out or cfg.out_dir,
                seed=args.seed if args.seed is not None else cfg.seed,
                n_assets=args.assets,
                length=args.length,
                start=_as_date(args.start, "--start"),
            )
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
