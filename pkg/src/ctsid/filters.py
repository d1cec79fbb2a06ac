"""Filter-function families for producing filtered data.

Four concrete families are shipped, all parameterized by a gain rho > 0 and
the sampling period T, with M filters over the horizon N*T:

  poly_test  : rho * (t - (l-1)T)^2 * (lT - t)^2     on [(l-1)T, lT)
  bump_test  : exp(-rho T^2 / (T^2 - (t-(l-1)T)^2))  on [(l-1)T, lT)
  laguerre   : sqrt(2 rho) * exp(rho((l-1)T - t))    on [(l-1)T, N*T)
  lowpass    : exp(rho (t - lT))                     on [0, lT)

Each g_l is continuously differentiable between consecutive multiples of T
inside its support and has a finite left limit at every breakpoint, which
is exactly what the integration-by-parts formula for derivative-free
filtered data needs.

All four families decompose as g_l(tau + jT) = g(tau) * f_l(jT), which is
what ties the filtered data to the sampled data through the N x M
coefficient matrix F_bar = [f_l(jT)].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError

FAMILIES = ("poly_test", "bump_test", "laguerre", "lowpass")

# exp(x) underflows to 0 well before x = -700; treat anything below as 0
_EXP_UNDERFLOW = -700.0


@dataclass(frozen=True)
class FilterBank:
    """M filter functions g_1..g_M of one family on the horizon [0, N*T)."""

    family: str
    rho: float
    T: float
    M: int
    N: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown filter family {self.family!r}")
        if self.rho <= 0 or self.T <= 0:
            raise ValidationError("rho and T must be positive")
        if self.M < 1 or self.N < 1:
            raise ValidationError("M and N must be >= 1")

    @property
    def horizon(self) -> float:
        return self.N * self.T

    def support_intervals(self, ell: int) -> range:
        """Indices j such that [jT, (j+1)T) lies inside supp(g_ell)."""
        self._check_ell(ell)
        if self.family in ("poly_test", "bump_test"):
            return range(ell - 1, ell)
        if self.family == "laguerre":
            return range(ell - 1, self.N)
        return range(0, min(ell, self.N))  # lowpass

    def breakpoints(self, ell: int) -> np.ndarray:
        """Multiples of T bounding the smooth pieces of g_ell, support edges included."""
        j = self.support_intervals(ell)
        return np.arange(j.start, j.stop + 1) * self.T

    def _check_ell(self, ell: int):
        if not 1 <= ell <= self.M:
            raise ValidationError(f"filter index {ell} outside 1..{self.M}")


@dataclass(frozen=True)
class Decomposition:
    """The pair (g, f_l) with g_l(tau + jT) = g(tau) f_l(jT).

    g is nonnegative on [0, T) with positive integral; f_l is evaluated on
    the sampling grid jT when assembling F_bar.
    """

    bank: FilterBank
    g: Callable[[np.ndarray], np.ndarray]
    g_deriv: Callable[[np.ndarray], np.ndarray]
    f: Callable[[int, np.ndarray], np.ndarray]  # (ell, t) -> f_ell(t)


def make_filter_bank(
    family: str, rho: float, T: float, M: int, N: int
) -> FilterBank:
    return FilterBank(family=family, rho=rho, T=T, M=M, N=N)


def _in_support(bank: FilterBank, ell: int, t: np.ndarray) -> np.ndarray:
    lo = (ell - 1) * bank.T
    if bank.family in ("poly_test", "bump_test"):
        return (t >= lo) & (t < ell * bank.T)
    if bank.family == "laguerre":
        return (t >= lo) & (t < bank.horizon)
    return (t >= 0) & (t < ell * bank.T)  # lowpass


def _bump_core(rho: float, T: float, tp: np.ndarray) -> np.ndarray:
    # tp = t - (l-1)T in [0, T); exponent -> -inf as tp -> T, return exact 0 there
    with np.errstate(divide="ignore", over="ignore"):
        denom = T * T - tp * tp
        expo = np.where(denom > 0, -rho * T * T / np.where(denom > 0, denom, 1.0), -np.inf)
    return np.where(expo > _EXP_UNDERFLOW, np.exp(np.maximum(expo, _EXP_UNDERFLOW)), 0.0)


def eval_g(bank: FilterBank, ell: int, t) -> np.ndarray | float:
    """Closed-form value of g_ell at time(s) t in [0, N*T)."""
    bank._check_ell(ell)
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    if np.any(t_arr < 0) or np.any(t_arr >= bank.horizon):
        raise ValidationError("t outside [0, N*T)")
    rho, T = bank.rho, bank.T
    lo = (ell - 1) * T
    mask = _in_support(bank, ell, t_arr)
    if bank.family == "poly_test":
        vals = rho * (t_arr - lo) ** 2 * (ell * T - t_arr) ** 2
    elif bank.family == "bump_test":
        vals = _bump_core(rho, T, np.clip(t_arr - lo, 0.0, T))
    elif bank.family == "laguerre":
        vals = np.sqrt(2 * rho) * np.exp(rho * (lo - t_arr) * mask)
    else:  # lowpass
        vals = np.exp(rho * (t_arr - ell * T) * mask)
    out = np.where(mask, vals, 0.0)
    return float(out[0]) if scalar else out


def eval_g_deriv(bank: FilterBank, ell: int, t) -> np.ndarray | float:
    """Analytic derivative of g_ell on its smooth pieces.

    At a breakpoint the right-sided derivative is returned, matching the
    half-open pieces [t_{j-1}, t_j) the filters are defined on.
    """
    bank._check_ell(ell)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    scalar = np.asarray(t, dtype=float).ndim == 0
    if np.any(t_arr < 0) or np.any(t_arr >= bank.horizon):
        raise ValidationError("t outside [0, N*T)")
    rho, T = bank.rho, bank.T
    lo = (ell - 1) * T
    mask = _in_support(bank, ell, t_arr)
    if bank.family == "poly_test":
        a, b = t_arr - lo, ell * T - t_arr
        vals = rho * (2 * a * b * b - 2 * a * a * b)
    elif bank.family == "bump_test":
        tp = np.clip(t_arr - lo, 0.0, T)
        g = _bump_core(rho, T, tp)
        with np.errstate(divide="ignore", over="ignore"):
            denom = T * T - tp * tp
            chain = np.where(denom > 0, -2 * rho * T * T * tp / np.where(denom > 0, denom, 1.0) ** 2, 0.0)
        vals = g * chain
    elif bank.family == "laguerre":
        vals = -rho * np.sqrt(2 * rho) * np.exp(rho * (lo - t_arr) * mask)
    else:  # lowpass: g' = rho * g on the support
        vals = rho * np.exp(rho * (t_arr - ell * T) * mask)
    out = np.where(mask, vals, 0.0)
    return float(out[0]) if scalar else out


def left_limit_g(bank: FilterBank, ell: int, t_j: float) -> float:
    """Left limit g_ell(t_j^-) at a breakpoint t_j (a positive multiple of T)."""
    bank._check_ell(ell)
    T = bank.T
    j = t_j / T
    if t_j <= 0 or t_j > bank.horizon + 1e-12 or abs(j - round(j)) > 1e-9:
        raise ValidationError(f"{t_j} is not a breakpoint")
    j = int(round(j))
    support = bank.support_intervals(ell)
    if j < support.start + 1 or j > support.stop:
        # approaching from outside the support (or from a zero piece)
        return 0.0
    rho = bank.rho
    lo = (ell - 1) * T
    if bank.family == "poly_test":
        return float(rho * (j * T - lo) ** 2 * (ell * T - j * T) ** 2)
    if bank.family == "bump_test":
        tp = j * T - lo
        return float(_bump_core(rho, T, np.array([tp]))[0]) if tp < T else 0.0
    if bank.family == "laguerre":
        return float(np.sqrt(2 * rho) * np.exp(rho * (lo - j * T)))
    return float(np.exp(rho * (j * T - ell * T)))  # lowpass; equals 1 at j = ell


def decompose(bank: FilterBank, N: int | None = None) -> Decomposition:
    """The (g, f_l) pair with g_l(tau + jT) = g(tau) f_l(jT); needs N >= M."""
    N = bank.N if N is None else N
    if N < bank.M:
        raise ValidationError(f"decomposition requires N >= M (N={N}, M={bank.M})")
    rho, T = bank.rho, bank.T

    if bank.family == "poly_test":

        def g(tau):
            tau = np.asarray(tau, dtype=float)
            return rho * tau**2 * (T - tau) ** 2

        def g_deriv(tau):
            tau = np.asarray(tau, dtype=float)
            return rho * (2 * tau * (T - tau) ** 2 - 2 * tau**2 * (T - tau))

        def f(ell, t):
            t = np.asarray(t, dtype=float)
            return np.where((t >= (ell - 1) * T) & (t < ell * T), 1.0, 0.0)

    elif bank.family == "bump_test":

        def g(tau):
            return _bump_core(rho, T, np.asarray(tau, dtype=float))

        def g_deriv(tau):
            tau = np.asarray(tau, dtype=float)
            gv = _bump_core(rho, T, tau)
            with np.errstate(divide="ignore", over="ignore"):
                denom = T * T - tau * tau
                chain = np.where(
                    denom > 0, -2 * rho * T * T * tau / np.where(denom > 0, denom, 1.0) ** 2, 0.0
                )
            return gv * chain

        def f(ell, t):
            t = np.asarray(t, dtype=float)
            return np.where((t >= (ell - 1) * T) & (t < ell * T), 1.0, 0.0)

    elif bank.family == "laguerre":

        def g(tau):
            tau = np.asarray(tau, dtype=float)
            return np.sqrt(2 * rho) * np.exp(-rho * tau)

        def g_deriv(tau):
            tau = np.asarray(tau, dtype=float)
            return -rho * np.sqrt(2 * rho) * np.exp(-rho * tau)

        def f(ell, t):
            t = np.asarray(t, dtype=float)
            mask = (t >= (ell - 1) * T) & (t < N * T)
            return np.where(mask, np.exp(rho * ((ell - 1) * T - t) * mask), 0.0)

    else:  # lowpass

        def g(tau):
            tau = np.asarray(tau, dtype=float)
            return np.exp(rho * tau)

        def g_deriv(tau):
            tau = np.asarray(tau, dtype=float)
            return rho * np.exp(rho * tau)

        def f(ell, t):
            t = np.asarray(t, dtype=float)
            mask = (t >= 0) & (t < ell * T)
            return np.where(mask, np.exp(rho * (t - ell * T) * mask), 0.0)

    return Decomposition(bank=bank, g=g, g_deriv=g_deriv, f=f)


def build_F_bar(decomp: Decomposition, N: int | None = None, M: int | None = None) -> np.ndarray:
    """N x M matrix with entry (j, l) = f_l(jT), j = 0..N-1, l = 1..M."""
    bank = decomp.bank
    N = bank.N if N is None else N
    M = bank.M if M is None else M
    grid = np.arange(N) * bank.T
    cols = [np.atleast_1d(decomp.f(ell, grid)) for ell in range(1, M + 1)]
    return np.column_stack(cols)
