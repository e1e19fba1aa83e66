"""Downside-risk measures: parametric, moment-corrected, and empirical
value-at-risk plus drawdown paths, over named sub-periods and levels.

Sign convention throughout: a positive VaR is a loss magnitude.  The
moment-corrected quantile is evaluated at the negative lower-tail normal
quantile, which makes the corrected measure collapse to the parametric one
when skewness and excess kurtosis vanish.  Negative outputs are allowed
(a strongly positive mean can push the quantile into gain territory).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .market_data import (
    DataError,
    DegenerateSeriesError,
    DescriptiveStats,
    ReturnPanel,
    ReturnSeries,
    describe,
)

__all__ = [
    "RiskSpec",
    "RiskReport",
    "gaussian_var",
    "cornish_fisher_z",
    "cf_var",
    "empirical_var",
    "drawdown",
    "risk_report",
]

log = logging.getLogger("volrisk.risk")


@dataclass(frozen=True)
class RiskSpec:
    """Confidence levels, portfolio amount, and named date ranges.

    ``periods`` entries are (name, start, end); either bound may be None
    for an open side.
    """

    levels: tuple = (0.90, 0.95, 0.99)
    amount: float = 1.0
    periods: tuple = (("full", None, None),)

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))
        object.__setattr__(self, "periods", tuple(tuple(p) for p in self.periods))
        if not self.levels:
            raise ValueError("at least one confidence level required")
        for lv in self.levels:
            if not 0.0 < lv < 1.0:
                raise ValueError(f"levels must lie strictly in (0, 1), got {lv}")
        if not (math.isfinite(self.amount) and self.amount > 0.0):
            raise ValueError(f"amount must be > 0, got {self.amount}")
        if not self.periods:
            raise ValueError("at least one period required")
        names = [p[0] for p in self.periods]
        if len(set(names)) != len(names):
            raise ValueError("duplicate period names")
        for name, start, end in self.periods:
            if start is not None and end is not None and start > end:
                raise ValueError(f"period {name!r}: start {start} after end {end}")


@dataclass(frozen=True)
class RiskReport:
    """Keyed risk results.

    ``var`` maps (symbol, period, level) to a dict with the three
    variants; ``drawdowns`` maps (symbol, period) to (dated series,
    max_drawdown); ``stats`` holds the per-cell moments the parametric
    measures were computed from.
    """

    spec: RiskSpec
    symbols: tuple
    var: dict
    drawdowns: dict
    stats: dict

    def to_dict(self) -> dict:
        assets: dict = {}
        for symbol in self.symbols:
            per: dict = {}
            for name, start, end in self.spec.periods:
                series, max_dd = self.drawdowns[(symbol, name)]
                per[name] = {
                    "start": None if start is None else start.isoformat(),
                    "end": None if end is None else end.isoformat(),
                    "stats": self.stats[(symbol, name)].to_dict(),
                    "var": {
                        f"{lv:g}": self.var[(symbol, name, lv)]
                        for lv in self.spec.levels
                    },
                    "max_drawdown": max_dd,
                }
            assets[symbol] = per
        return {
            "amount": self.spec.amount,
            "levels": [f"{lv:g}" for lv in self.spec.levels],
            "periods": [p[0] for p in self.spec.periods],
            "assets": assets,
        }

    def to_csv(self) -> str:
        """Asset rows with level sub-rows and period column groups, 3-decimal."""
        period_names = [p[0] for p in self.spec.periods]
        header = ["symbol", "level"]
        for name in period_names:
            header += [f"{name}_var", f"{name}_cfvar", f"{name}_empvar"]
        lines = [",".join(header)]
        for symbol in self.symbols:
            for lv in self.spec.levels:
                row = [symbol, f"{lv:g}"]
                for name in period_names:
                    cell = self.var[(symbol, name, lv)]
                    row += [
                        f"{cell['gaussian']:.3f}",
                        f"{cell['cornish_fisher']:.3f}",
                        f"{cell['empirical']:.3f}",
                    ]
                lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def _check_level(level: float) -> None:
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie strictly in (0, 1), got {level}")


def _check_stats(stats: DescriptiveStats) -> None:
    if not stats.std > 0.0:
        raise DegenerateSeriesError("degenerate: zero variance")


def gaussian_var(stats: DescriptiveStats, level: float, amount: float = 1.0) -> float:
    """-(mu + Z_alpha sigma) W with Z_alpha the lower-tail normal quantile."""
    _check_level(level)
    _check_stats(stats)
    z = float(ndtri(1.0 - level))
    return -(stats.mean + z * stats.std) * amount


def cornish_fisher_z(z_c: float, S: float, K: float) -> float:
    """Moment-corrected quantile:
    z + (z^2 - 1) S/6 + (z^3 - 3z) K/24 - (2z^3 - 5z) S^2/36."""
    return (
        z_c
        + (z_c * z_c - 1.0) * S / 6.0
        + (z_c ** 3 - 3.0 * z_c) * K / 24.0
        - (2.0 * z_c ** 3 - 5.0 * z_c) * S * S / 36.0
    )


def cf_var(stats: DescriptiveStats, level: float, amount: float = 1.0) -> float:
    """Moment-corrected VaR; equals gaussian_var when S = K = 0.

    K is the excess kurtosis carried by the stats.  Negative outputs are
    permitted.
    """
    _check_level(level)
    _check_stats(stats)
    z_c = float(ndtri(1.0 - level))
    z_cf = cornish_fisher_z(z_c, stats.skewness, stats.excess_kurtosis)
    return -(stats.mean + z_cf * stats.std) * amount


def empirical_var(r: ReturnSeries, level: float, amount: float = 1.0) -> float:
    """-(empirical (1-level)-quantile of returns) W, linear interpolation
    between order statistics."""
    _check_level(level)
    n = len(r)
    if n < 10:
        raise DataError(f"{r.symbol}: need at least 10 observations, got {n}")
    needed = 1.0 / (1.0 - level)
    if n < needed:
        log.warning(
            "%s: %d observations is thin for level %g (want >= %.0f)",
            r.symbol, n, level, needed,
        )
    q = float(np.quantile(r.values, 1.0 - level))
    return -q * amount


def drawdown(r: ReturnSeries) -> tuple:
    """Drawdown path and its minimum.

    Wealth is exp of the running return sum; the drawdown at t is wealth
    relative to its running peak, minus one.  Returns (series, max_dd)
    where series is a tuple of (date, dd) pairs.
    """
    wealth = np.exp(np.cumsum(r.values))
    peak = np.maximum.accumulate(wealth)
    dd = wealth / peak - 1.0
    series = tuple(zip(r.dates, (float(v) for v in dd)))
    return series, float(dd.min())


def _restrict(r: ReturnSeries, start, end) -> "ReturnSeries | None":
    idx = [
        i
        for i, d in enumerate(r.dates)
        if (start is None or d >= start) and (end is None or d <= end)
    ]
    if not idx:
        return None
    return ReturnSeries(
        symbol=r.symbol,
        dates=tuple(r.dates[i] for i in idx),
        values=r.values[idx],
    )


def risk_report(panel: ReturnPanel, spec: RiskSpec) -> RiskReport:
    """All three VaR variants plus drawdown per (asset, period, level).

    Moments are recomputed on each restricted sample.  An empty period is
    an error naming the period and asset.
    """
    var: dict = {}
    dds: dict = {}
    stats: dict = {}
    for s in panel.series:
        for name, start, end in spec.periods:
            sub = _restrict(s, start, end)
            if sub is None:
                raise DataError(f"period {name!r}: no observations for {s.symbol}")
            cell_stats = describe(sub)
            stats[(s.symbol, name)] = cell_stats
            dds[(s.symbol, name)] = drawdown(sub)
            for lv in spec.levels:
                var[(s.symbol, name, lv)] = {
                    "gaussian": gaussian_var(cell_stats, lv, spec.amount),
                    "cornish_fisher": cf_var(cell_stats, lv, spec.amount),
                    "empirical": empirical_var(sub, lv, spec.amount),
                }
    return RiskReport(
        spec=spec,
        symbols=panel.symbols,
        var=var,
        drawdowns=dds,
        stats=stats,
    )
