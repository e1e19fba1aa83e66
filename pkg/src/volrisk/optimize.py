"""Parameter transforms and unconstrained minimization.

Constrained likelihood parameters are mapped to an open unconstrained
space (log for positivity, scaled logistic for intervals, a joint logistic
pair for two nonnegative parameters summing below one) and the search runs
there.  Objectives must be pure; a non-finite value at a trial point is
treated as a rejected step, never an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize as _sopt
from scipy.special import expit, logit

__all__ = [
    "ParamSpace",
    "OptResult",
    "minimize",
    "finite_diff_gradient",
    "finite_diff_hessian",
]

# large finite stand-in for +inf: rejects the step without breaking line searches
_BIG = 1e100

# logistic outputs clipped into the open unit interval so inverse transforms
# always land strictly inside the feasible region
_P_LO = 1e-15
_P_HI = 1.0 - 1e-15


def _clip01(p):
    return np.minimum(np.maximum(p, _P_LO), _P_HI)


@dataclass(frozen=True)
class ParamSpace:
    """Named parameter vector with per-coordinate constraint kinds.

    Each entry of ``params`` is ``(name, kind)`` where kind is one of::

        "free"
        "positive"
        ("interval", lo, hi)
        ("pair_sum_lt_one", partner_name)

    A pair constraint must be declared symmetrically on both members; the
    pair jointly satisfies x_i > 0, x_j > 0, x_i + x_j < 1.  The
    first-listed member is the one whose share of the sum is transformed.
    """

    params: tuple

    def __post_init__(self) -> None:
        names = [p[0] for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names")
        for name, kind in self.params:
            if kind == "free" or kind == "positive":
                continue
            if isinstance(kind, tuple) and kind[0] == "interval":
                lo, hi = kind[1], kind[2]
                if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                    raise ValueError(f"bad interval for {name!r}: ({lo}, {hi})")
            elif isinstance(kind, tuple) and kind[0] == "pair_sum_lt_one":
                partner = kind[1]
                if partner not in names or partner == name:
                    raise ValueError(f"pair partner {partner!r} of {name!r} not in space")
                pk = dict(self.params)[partner]
                if not (isinstance(pk, tuple) and pk[0] == "pair_sum_lt_one" and pk[1] == name):
                    raise ValueError(f"pair constraint on {name!r} not declared symmetrically")
            else:
                raise ValueError(f"unknown constraint kind {kind!r} for {name!r}")

    @property
    def names(self) -> tuple:
        return tuple(p[0] for p in self.params)

    @property
    def dimension(self) -> int:
        return len(self.params)

    def _index(self, name: str) -> int:
        return self.names.index(name)

    def to_unconstrained(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            raise ValueError(f"expected {self.dimension} parameters, got shape {x.shape}")
        y = np.empty_like(x)
        for i, (name, kind) in enumerate(self.params):
            v = x[i]
            if kind == "free":
                y[i] = v
            elif kind == "positive":
                if v <= 0.0:
                    raise ValueError(f"{name!r} must be positive, got {v}")
                y[i] = math.log(v)
            elif kind[0] == "interval":
                lo, hi = kind[1], kind[2]
                if not lo < v < hi:
                    raise ValueError(f"{name!r} must lie in ({lo}, {hi}), got {v}")
                y[i] = logit((v - lo) / (hi - lo))
            else:  # pair_sum_lt_one
                j = self._index(kind[1])
                if i < j:
                    a, b = x[i], x[j]
                    s = a + b
                    if not (a > 0.0 and b > 0.0 and s < 1.0):
                        raise ValueError(
                            f"pair ({name!r}, {kind[1]!r}) must satisfy "
                            f"a > 0, b > 0, a + b < 1, got ({a}, {b})"
                        )
                    y[i] = logit(s)
                    y[j] = logit(a / s)
        return y

    def from_unconstrained(self, y: Sequence[float]) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.dimension,):
            raise ValueError(f"expected {self.dimension} parameters, got shape {y.shape}")
        x = np.empty_like(y)
        for i, (name, kind) in enumerate(self.params):
            if kind == "free":
                x[i] = y[i]
            elif kind == "positive":
                x[i] = math.exp(min(max(y[i], -700.0), 700.0))
            elif kind[0] == "interval":
                lo, hi = kind[1], kind[2]
                x[i] = lo + (hi - lo) * _clip01(expit(y[i]))
            else:  # pair_sum_lt_one
                j = self._index(kind[1])
                if i < j:
                    s = _clip01(expit(y[i]))
                    frac = _clip01(expit(y[j]))
                    x[i] = s * frac
                    x[j] = s * (1.0 - frac)
        return x


@dataclass(frozen=True)
class OptResult:
    x_opt: np.ndarray
    f_opt: float
    iterations: int
    converged: bool
    gradient_norm: "float | None" = None


def _wrap(objective: Callable, space: ParamSpace) -> Callable:
    def wrapped(y: np.ndarray) -> float:
        v = objective(space.from_unconstrained(y))
        v = float(v)
        if not math.isfinite(v):
            return _BIG
        return v

    return wrapped


def minimize(
    objective: Callable,
    space: ParamSpace,
    x0: Sequence[float],
    method: str = "simplex",
    *,
    max_iter: "int | None" = None,
    f_tol: float = 1e-8,
    x_tol: float = 1e-8,
    g_tol: float = 1e-8,
) -> OptResult:
    """Minimize a pure objective over the constrained space.

    ``method`` is ``"simplex"`` (derivative-free) or ``"quasi_newton"``
    (BFGS with finite-difference gradients).  The iteration cap is returned
    as ``converged = False``, never raised.
    """
    if method not in ("simplex", "quasi_newton"):
        raise ValueError(f"unknown method {method!r}")
    x0 = np.asarray(x0, dtype=float)
    f0 = float(objective(x0))
    if not math.isfinite(f0):
        raise ValueError("objective is non-finite at x0")
    y0 = space.to_unconstrained(x0)
    wrapped = _wrap(objective, space)

    if method == "simplex":
        cap = 2000 if max_iter is None else max_iter
        res = _sopt.minimize(
            wrapped,
            y0,
            method="Nelder-Mead",
            options={"maxiter": cap, "xatol": x_tol, "fatol": f_tol},
        )
        grad_norm = None
    else:
        cap = 500 if max_iter is None else max_iter
        res = _sopt.minimize(
            wrapped,
            y0,
            method="BFGS",
            jac=lambda y: finite_diff_gradient(wrapped, y),
            options={"maxiter": cap, "gtol": g_tol},
        )
        grad_norm = float(np.max(np.abs(res.jac))) if res.jac is not None else None

    y_opt, f_opt = res.x, float(res.fun)
    if f_opt > f0:  # optimizer never reports a point worse than the start
        y_opt, f_opt = y0, f0
    x_opt = space.from_unconstrained(y_opt)
    x_opt.setflags(write=False)
    return OptResult(
        x_opt=x_opt,
        f_opt=f_opt,
        iterations=max(1, int(res.nit)),
        converged=bool(res.success) and math.isfinite(f_opt),
        gradient_norm=grad_norm,
    )


def finite_diff_gradient(
    objective: Callable,
    x: Sequence[float],
    rel_step: "float | None" = None,
    floor: float = 1.0,
    scheme: str = "central",
) -> np.ndarray:
    """Finite-difference gradient with per-coordinate relative steps.

    Step for coordinate i is ``rel_step * max(floor, |x_i|)``; the floor
    keeps near-zero coordinates measurable.  ``scheme`` is ``"central"``
    (default) or ``"forward"`` for cross-checking.
    """
    if scheme not in ("central", "forward"):
        raise ValueError(f"unknown scheme {scheme!r}")
    x = np.asarray(x, dtype=float)
    eta = rel_step if rel_step is not None else np.finfo(float).eps ** (1.0 / 3.0)
    g = np.empty_like(x)
    f0 = None
    if scheme == "forward":
        f0 = float(objective(x))
        if not math.isfinite(f0):
            raise ValueError("objective is non-finite at x")
    for i in range(x.size):
        h = eta * max(floor, abs(x[i]))
        xp = x.copy()
        xp[i] += h
        fp = float(objective(xp))
        if scheme == "central":
            xm = x.copy()
            xm[i] -= h
            fm = float(objective(xm))
            if not (math.isfinite(fp) and math.isfinite(fm)):
                raise ValueError(f"objective is non-finite near x (coordinate {i})")
            g[i] = (fp - fm) / (2.0 * h)
        else:
            if not math.isfinite(fp):
                raise ValueError(f"objective is non-finite near x (coordinate {i})")
            g[i] = (fp - f0) / h
    return g


def finite_diff_hessian(
    objective: Callable,
    x: Sequence[float],
    rel_step: "float | None" = None,
    floor: float = 0.1,
) -> np.ndarray:
    """Central-difference Hessian; used for asymptotic standard errors."""
    x = np.asarray(x, dtype=float)
    n = x.size
    eta = rel_step if rel_step is not None else np.finfo(float).eps ** 0.25
    steps = np.array([eta * max(floor, abs(x[i])) for i in range(n)])
    f0 = float(objective(x))
    H = np.empty((n, n))

    def at(delta):
        return float(objective(x + delta))

    for i in range(n):
        ei = np.zeros(n)
        ei[i] = steps[i]
        H[i, i] = (at(ei) - 2.0 * f0 + at(-ei)) / (steps[i] * steps[i])
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = steps[j]
            H[i, j] = H[j, i] = (
                at(ei + ej) - at(ei - ej) - at(-ei + ej) + at(-ei - ej)
            ) / (4.0 * steps[i] * steps[j])
    return H
