"""Dynamic conditional correlation over a panel of standardized residuals.

Stage 2 of the two-stage estimator.  Stage-1 volatility fits supply
standardized residuals z_t; here a single (alpha, beta) pair drives the
correlation recursion

    Q_t = Qbar (1 - alpha - beta) + alpha z_{t-1} z_{t-1}' + beta Q_{t-1}
    R_t = diag(Q_t)^{-1/2} Q_t diag(Q_t)^{-1/2}

with Q_0 = Qbar and Qbar fixed at its sample value (covariance
targeting).  The joint likelihood is the standardized multivariate t with
one shape parameter, maximized while stage-1 results stay frozen.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special as _special

from . import optimize as opt_mod
from .egarch import EgarchFit, EgarchParams, _cascade, _std_errors, aic
from .market_data import DataError, DegenerateSeriesError

__all__ = [
    "DccParams",
    "DccFit",
    "unconditional_corr",
    "dcc_filter",
    "dcc_loglik",
    "fit_dcc",
    "conditional_covariance",
    "dynamic_correlation",
    "simulate_dcc_panel",
]


@dataclass(frozen=True)
class DccParams:
    alpha: float
    beta: float
    joint_shape: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not (math.isfinite(self.beta) and self.beta >= 0.0):
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not self.alpha + self.beta < 1.0:
            raise ValueError(f"alpha + beta must be < 1, got {self.alpha + self.beta}")
        if not (math.isfinite(self.joint_shape) and self.joint_shape > 2.0):
            raise ValueError(f"joint_shape must be > 2, got {self.joint_shape}")


@dataclass(frozen=True)
class DccFit:
    params: DccParams
    Qbar: np.ndarray
    Q_path: np.ndarray
    R_path: np.ndarray
    loglik_joint: float
    aic_joint: float
    aic_joint_per_obs: float
    std_errors: dict
    converged: bool
    symbols: tuple
    dates: tuple
    n_obs: int
    k_stage1: int
    k_stage2: int

    @property
    def k_total(self) -> int:
        # joint parameter count: every stage-1 parameter plus (alpha, beta, shape)
        return self.k_stage1 + self.k_stage2

    def to_dict(self, include_paths: bool = False) -> dict:
        k = len(self.symbols)
        corr = {}
        for i in range(k):
            for j in range(i + 1, k):
                key = f"{self.symbols[i]}/{self.symbols[j]}"
                corr[key] = [float(v) for v in self.R_path[:, i, j]]
        d = {
            "symbols": list(self.symbols),
            "params": {
                "alpha": self.params.alpha,
                "beta": self.params.beta,
                "joint_shape": self.params.joint_shape,
            },
            "std_errors": dict(self.std_errors),
            "converged": self.converged,
            "n_obs": self.n_obs,
            "k_stage1": self.k_stage1,
            "k_stage2": self.k_stage2,
            "k_total": self.k_total,
            "loglik_joint": self.loglik_joint,
            "aic_joint": self.aic_joint,
            "aic_joint_per_obs": self.aic_joint_per_obs,
            "dates": [dt.isoformat() for dt in self.dates],
            "dynamic_correlation": corr,
        }
        if include_paths:
            d["Q_path"] = self.Q_path.tolist()
            d["R_path"] = self.R_path.tolist()
        return d


def _as_panel(Z) -> np.ndarray:
    if isinstance(Z, np.ndarray) and Z.ndim == 2:
        return np.asarray(Z, dtype=float)
    cols = [np.asarray(c, dtype=float) for c in Z]
    lengths = {c.shape[0] for c in cols}
    if len(lengths) != 1:
        raise DataError(f"residual series lengths differ: {sorted(lengths)}")
    return np.column_stack(cols)


def unconditional_corr(Z) -> np.ndarray:
    """Qbar = (1/n) sum_t z_t z_t', exactly symmetric."""
    Z = _as_panel(Z)
    n, k = Z.shape
    if n < k + 10:
        raise DataError(f"need at least k + 10 = {k + 10} observations, got {n}")
    for i in range(k):
        if float(Z[:, i].var()) == 0.0:
            raise DegenerateSeriesError(f"residual column {i}: degenerate: zero variance")
    Q = Z.T @ Z / n
    return 0.5 * (Q + Q.T)


def _filter_core(Z: np.ndarray, alpha: float, beta: float, Qbar: np.ndarray):
    T, k = Z.shape
    O = np.einsum("ti,tj->tij", Z, Z)
    Q = np.empty((T, k, k))
    C = Qbar * (1.0 - alpha - beta)
    Q[0] = Qbar
    for t in range(1, T):
        Q[t] = C + alpha * O[t - 1] + beta * Q[t - 1]
    d = np.sqrt(np.diagonal(Q, axis1=1, axis2=2))
    R = Q / (d[:, :, None] * d[:, None, :])
    idx = np.arange(k)
    R[:, idx, idx] = 1.0
    return Q, R


def dcc_filter(Z, params: DccParams, Qbar) -> tuple:
    """Run the correlation recursion; returns (Q_path, R_path).

    Positive definiteness of every R_t is checked defensively via the same
    factorization the likelihood uses.
    """
    Z = _as_panel(Z)
    Qbar = np.asarray(Qbar, dtype=float)
    k = Z.shape[1]
    if Qbar.shape != (k, k):
        raise ValueError(f"Qbar has shape {Qbar.shape}, expected ({k}, {k})")
    Q, R = _filter_core(Z, params.alpha, params.beta, Qbar)
    try:
        np.linalg.cholesky(R)
    except np.linalg.LinAlgError as exc:
        raise ValueError("correlation path left the positive-definite cone; "
                         "check Qbar comes from the same Z") from exc
    Q.setflags(write=False)
    R.setflags(write=False)
    return Q, R


def dcc_loglik(Z, params: DccParams, Qbar) -> float:
    """Sum over t of the standardized multivariate-t log density at z_t
    under R_t; non-finite trial values collapse to -inf."""
    Z = _as_panel(Z)
    nu = params.joint_shape
    _, R = _filter_core(Z, params.alpha, params.beta, np.asarray(Qbar, dtype=float))
    if not np.all(np.isfinite(R)):
        return -math.inf
    try:
        L = np.linalg.cholesky(R)
    except np.linalg.LinAlgError:
        return -math.inf
    T, k = Z.shape
    w = np.linalg.solve(L, Z[:, :, None])[:, :, 0]
    q = np.einsum("ti,ti->t", w, w)
    logdet = 2.0 * np.log(np.diagonal(L, axis1=1, axis2=2)).sum(axis=1)
    const = (
        _special.gammaln((nu + k) / 2.0)
        - _special.gammaln(nu / 2.0)
        - 0.5 * k * math.log((nu - 2.0) * math.pi)
    )
    ll = float(T * const - 0.5 * logdet.sum() - (nu + k) / 2.0 * np.log1p(q / (nu - 2.0)).sum())
    return ll if math.isfinite(ll) else -math.inf


def fit_dcc(fits: Sequence[EgarchFit], family: str = "student_t") -> DccFit:
    """Maximize the joint likelihood over (alpha, beta, shape) with Qbar
    fixed by covariance targeting.  Stage-1 fits are read, never mutated."""
    if family != "student_t":
        raise ValueError(f"joint density supports family 'student_t', got {family!r}")
    if len(fits) < 2:
        raise DataError(f"need at least 2 stage-1 fits, got {len(fits)}")
    dates = fits[0].dates
    for f in fits[1:]:
        if f.dates != dates:
            raise DataError(f"{f.symbol}: calendar differs from {fits[0].symbol}")
    Z = np.column_stack([f.z for f in fits])
    Qbar = unconditional_corr(Z)

    space = opt_mod.ParamSpace((
        ("alpha", ("pair_sum_lt_one", "beta")),
        ("beta", ("pair_sum_lt_one", "alpha")),
        ("joint_shape", ("interval", 2.0, 500.0)),
    ))

    def neg(x):
        try:
            params = DccParams(alpha=float(x[0]), beta=float(x[1]), joint_shape=float(x[2]))
        except ValueError:
            return math.inf
        return -dcc_loglik(Z, params, Qbar)

    best, _, converged = _cascade(neg, space, [0.05, 0.90, 8.0])
    params = DccParams(*map(float, best.x_opt))
    Q_path, R_path = dcc_filter(Z, params, Qbar)
    ll = dcc_loglik(Z, params, Qbar)
    k_stage1 = sum(f.k_params for f in fits)
    k_total = k_stage1 + space.dimension
    a = aic(ll, k_total)
    n = Z.shape[0]
    Qbar.setflags(write=False)
    return DccFit(
        params=params,
        Qbar=Qbar,
        Q_path=Q_path,
        R_path=R_path,
        loglik_joint=ll,
        aic_joint=a,
        aic_joint_per_obs=a / n,
        std_errors=_std_errors(neg, space, best.x_opt),
        converged=converged,
        symbols=tuple(f.symbol for f in fits),
        dates=dates,
        n_obs=n,
        k_stage1=k_stage1,
        k_stage2=space.dimension,
    )


def conditional_covariance(fit: DccFit, h_paths, t: int) -> np.ndarray:
    """H_t = D_t R_t D_t with D_t = diag(sqrt(h_t)); diagonal equals the
    per-asset variances exactly."""
    if isinstance(h_paths, np.ndarray) and h_paths.ndim == 2:
        H_all = np.asarray(h_paths, dtype=float)
    else:
        H_all = np.column_stack([np.asarray(h, dtype=float) for h in h_paths])
    T = fit.R_path.shape[0]
    if H_all.shape != (T, fit.R_path.shape[1]):
        raise ValueError(
            f"h_paths shape {H_all.shape} does not match panel ({T}, {fit.R_path.shape[1]})"
        )
    if not 0 <= t < T:
        raise IndexError(f"t = {t} out of range [0, {T})")
    s = np.sqrt(H_all[t])
    H = fit.R_path[t] * np.outer(s, s)
    return H


def dynamic_correlation(fit: DccFit, i: int, j: int) -> list:
    """Dated series of rho_ij,t extracted from the correlation path."""
    k = fit.R_path.shape[1]
    if not (0 <= i < k and 0 <= j < k):
        raise IndexError(f"indices ({i}, {j}) out of range for {k} assets")
    if i == j:
        raise ValueError("diagonal is identically one; use i != j")
    return list(zip(fit.dates, (float(v) for v in fit.R_path[:, i, j])))


def simulate_dcc_panel(
    asset_params: Sequence[EgarchParams],
    dcc_params: DccParams,
    Qbar: np.ndarray,
    n: int,
    seed: int,
    burn: int = 500,
) -> tuple:
    """Jointly simulate a return panel under per-asset log-variance
    recursions and the correlation recursion.

    Innovations are standardized multivariate t: z_t = L_t g sqrt((nu-2)/W)
    with g standard normal, W chi-square(nu), L_t the factor of R_t.
    Returns (returns, innovations), each (n, k).
    """
    from . import distributions as dist_mod

    k = len(asset_params)
    if k < 2:
        raise ValueError(f"panel simulation needs >= 2 assets, got {k}")
    for p in asset_params:
        if p.mean.ar or p.mean.ma:
            raise NotImplementedError("panel simulation supports constant-mean assets only")
    Qbar = np.asarray(Qbar, dtype=float)
    if Qbar.shape != (k, k):
        raise ValueError(f"Qbar has shape {Qbar.shape}, expected ({k}, {k})")
    nu = dcc_params.joint_shape
    alpha, beta = dcc_params.alpha, dcc_params.beta
    rng = np.random.default_rng(seed)
    total = n + burn

    ez = [dist_mod.abs_moment(p.dist) for p in asset_params]
    logh = [p.omega / (1.0 - p.b_pers) for p in asset_params]
    Q = Qbar.copy()
    C = Qbar * (1.0 - alpha - beta)
    scale = math.sqrt(nu - 2.0)

    Z = np.empty((total, k))
    returns = np.empty((total, k))
    for t in range(total):
        d = np.sqrt(np.diagonal(Q))
        R = Q / np.outer(d, d)
        np.fill_diagonal(R, 1.0)
        L = np.linalg.cholesky(R)
        g = rng.standard_normal(k)
        w = rng.chisquare(nu)
        z = (L @ g) * (scale / math.sqrt(w))
        Z[t] = z
        for i, p in enumerate(asset_params):
            h = math.exp(logh[i])
            returns[t, i] = p.mean.mu + z[i] * math.sqrt(h)
            logh[i] = (p.omega + p.a_mag * (abs(z[i]) - ez[i])
                       + p.xi * z[i] + p.b_pers * logh[i])
        Q = C + alpha * np.outer(z, z) + beta * Q
    return returns[burn:], Z[burn:]
