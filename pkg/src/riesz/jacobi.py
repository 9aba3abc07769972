"""Jacobi polynomials, normalization constants and quadrature.

All integrals are taken against the probability measure

    dnu(t) = (1 - t)^alpha (1 + t)^beta dt / c_{alpha,beta},
    c_{alpha,beta} = 2^(alpha+beta+1) B(alpha+1, beta+1).

Two engines are provided.  ``gauss_jacobi`` is a Golub-Welsch rule for
smooth integrands.  ``singular_integrate`` works in the angle variable
``phi = arccos t`` with a tanh-sinh transform and copes with algebraic or
logarithmic blow-up at ``phi = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import linalg, special

from .errors import DomainError, QuadratureError

DEFAULT_TOL = 1e-11
DEFAULT_NODES = 128


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (a > -1 and b > -1):
            raise DomainError(f"Jacobi parameters must exceed -1, got ({a}, {b})")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def from_space(cls, space) -> "JacobiParams":
        return cls(float(space.alpha), float(space.beta))


def norm_constant_c(params: JacobiParams) -> float:
    """``c_{alpha,beta}``, the total mass of the unnormalized weight."""
    a, b = params.alpha, params.beta
    return 2.0 ** (a + b + 1) * special.beta(a + 1, b + 1)


def jacobi_at_one(params: JacobiParams, n: int) -> float:
    """``P_n(1) = binom(n + alpha, n)``."""
    return float(special.binom(n + params.alpha, n))


def _poch(x, n):
    return math.prod(x + i for i in range(n))


def _log_poch(x, n):
    return special.gammaln(x + n) - special.gammaln(x)


def norm_constant_m(params: JacobiParams, n: int) -> float:
    """``m_n`` with ``int P_n^2 dnu = P_n(1)^2 / m_n``.

    Written as ``(2n+a+b+1) (a+b+2)_{n-1} (a+1)_n / (n! (b+1)_n)`` so the
    0/0 at ``a + b + 1 = 0`` (Chebyshev weights) never appears.
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n == 0:
        return 1.0
    a, b = params.alpha, params.beta
    lead = 2 * n + a + b + 1
    if n * max(abs(a), abs(b), 1.0) <= 30:
        return lead * _poch(a + b + 2, n - 1) * _poch(a + 1, n) / (math.factorial(n) * _poch(b + 1, n))
    logv = _log_poch(a + b + 2, n - 1) + _log_poch(a + 1, n) - special.gammaln(n + 1) - _log_poch(b + 1, n)
    return float(lead * np.exp(logv))


def jacobi_table(params: JacobiParams, n_max: int, t) -> np.ndarray:
    """Values ``P_0(t), ..., P_{n_max}(t)`` stacked along a new leading axis."""
    a, b = params.alpha, params.beta
    t = np.asarray(t, dtype=float)
    out = np.empty((n_max + 1,) + t.shape)
    out[0] = 1.0
    if n_max == 0:
        return out
    out[1] = (a + 1) + (a + b + 2) * (t - 1) / 2
    ab2 = a * a - b * b
    for n in range(2, n_max + 1):
        s = 2 * n + a + b
        c0 = 2 * n * (n + a + b) * (s - 2)
        c1 = (s - 1) * (s * (s - 2) * t + ab2)
        c2 = 2 * (n + a - 1) * (n + b - 1) * s
        out[n] = (c1 * out[n - 1] - c2 * out[n - 2]) / c0
    return out


def jacobi_eval(params: JacobiParams, n: int, t):
    """``P_n^{(alpha,beta)}(t)`` by the three-term recurrence."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    v = jacobi_table(params, n, t)[n]
    return float(v) if v.ndim == 0 else v


# ---------------------------------------------------------------------------
# Gauss-Jacobi


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for the probability measure ``nu^{(alpha,beta)}``."""

    nodes: np.ndarray
    weights: np.ndarray
    params: JacobiParams
    normalization: str = "probability"

    def integrate(self, f: Callable) -> float:
        return self.weights @ f(self.nodes)

    def to_csv(self) -> str:
        lines = ["node,weight"]
        lines += [f"{x!r},{w!r}" for x, w in zip(self.nodes.tolist(), self.weights.tolist())]
        return "\n".join(lines) + "\n"


def recurrence_coefficients(params: JacobiParams, K: int):
    """Diagonal and off-diagonal of the Jacobi matrix of the monic recurrence."""
    a, b = params.alpha, params.beta
    k = np.arange(K, dtype=float)
    s = 2 * k + a + b
    diag = np.empty(K)
    diag[0] = (b - a) / (a + b + 2)
    if K > 1:
        diag[1:] = (b * b - a * a) / (s[1:] * (s[1:] + 2))
    k = np.arange(1, K, dtype=float)
    s = 2 * k + a + b
    off2 = np.empty(K - 1)
    if K > 1:
        # k = 1 written with the factor (a+b+1) cancelled
        off2[0] = 4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b))
        kk, ss = k[1:], s[1:]
        off2[1:] = 4 * kk * (kk + a) * (kk + b) * (kk + a + b) / (ss**2 * (ss + 1) * (ss - 1))
    return diag, np.sqrt(off2)


def gauss_jacobi(params: JacobiParams, K: int = DEFAULT_NODES) -> QuadratureRule:
    """K-point Gauss rule (Golub-Welsch), weights summing to one."""
    if K < 1:
        raise DomainError("node count must be >= 1")
    diag, off = recurrence_coefficients(params, K)
    try:
        nodes, vecs = linalg.eigh_tridiagonal(diag, off)
    except linalg.LinAlgError as exc:
        raise QuadratureError(f"tridiagonal eigensolver failed for K={K}, {params}: {exc}") from exc
    weights = vecs[0] ** 2
    order = np.argsort(nodes)
    nodes, weights = nodes[order], weights[order]
    return QuadratureRule(nodes, weights / weights.sum(), params)


# ---------------------------------------------------------------------------
# tanh-sinh in the angle variable

_T_MAX = 6.0  # nodes beyond this sit closer than ~1e-270 to an endpoint
_MAX_LEVEL = 11
_MIN_LEVEL = 3


def _ts_abscissae(level: int):
    if level == 0:
        t = np.arange(-int(_T_MAX), int(_T_MAX) + 1, dtype=float)
    else:
        h = 2.0**-level
        m = int(_T_MAX / h)
        j = np.arange(-m + 1, m, 2)
        t = j * h
    u = 0.5 * np.pi * np.sinh(t)
    e = np.exp(-2 * np.abs(u))
    # weight dx/dt / half-length, via 1/cosh^2 = 4e^{-2|u|}/(1+e^{-2|u|})^2
    w = 0.5 * np.pi * np.cosh(t) * 4 * e / (1 + e) ** 2
    # distances to the left/right endpoint / half-length
    dl = 2.0 / (1.0 + np.exp(-2 * u))
    dr = 2.0 / (1.0 + np.exp(2 * u))
    return w, dl, dr


def _log_angle_weight(params, half_lo, half_hi):
    """Log density of nu in phi, given phi/2 and (pi - phi)/2 separately."""
    a, b = params.alpha, params.beta
    return (
        (2 * a + 1) * np.log(np.sin(half_lo))
        + (2 * b + 1) * np.log(np.sin(half_hi))
        - special.betaln(a + 1, b + 1)
    )


def singular_integrate(
    integrand: Callable[[np.ndarray], np.ndarray],
    params: JacobiParams,
    tol: float = DEFAULT_TOL,
    breakpoints: Sequence[float] = (),
    max_level: int = _MAX_LEVEL,
    power=None,
):
    """Integrate ``g(phi)`` against ``nu`` written in the angle variable.

    Computes ``int_0^pi g(phi) (1-cos phi)^a (1+cos phi)^b sin phi dphi / c``
    by tanh-sinh on each piece of ``(0, pi)`` cut at ``breakpoints``.

    Parameters
    ----------
    integrand : callable
        Vectorized in ``phi``.  May return shape ``(m,)`` or ``(m, k)``;
        in the latter case ``k`` integrals are computed at once.
    params : JacobiParams
    tol : float
        Target for the level-to-level difference, applied as
        ``tol * max(1, |value|)`` per component.
    breakpoints : sequence of float
        Interior points where the integrand has a kink.
    power : float or array_like, optional
        If given, the integrand is ``phi**(-power) * integrand(phi)``.  The
        power is folded into the weight in log space, so that strongly
        singular integrands do not overflow next to ``phi = 0``.  An array
        gives one power per output component.

    Returns
    -------
    value, error : float or ndarray
    """
    edges = [0.0] + sorted(float(b) for b in breakpoints if 0.0 < b < np.pi) + [np.pi]
    pieces = list(zip(edges[:-1], edges[1:]))
    pw = None if power is None else np.asarray(power, dtype=float)

    def level_sum(level):
        w, dl, dr = _ts_abscissae(level)
        total, absum = 0.0, 0.0
        for lo, hi in pieces:
            hl = 0.5 * (hi - lo)
            from_lo = hl * dl
            from_hi = hl * dr
            keep = (from_lo > 0) & (from_hi > 0)
            from_lo, from_hi, ww = from_lo[keep], from_hi[keep], w[keep] * hl
            phi = np.where(from_lo <= from_hi, lo + from_lo, hi - from_hi)
            half_lo = 0.5 * (lo + from_lo)
            half_hi = 0.5 * ((np.pi - hi) + from_hi)
            g = np.asarray(integrand(phi), dtype=float)
            logw = _log_angle_weight(params, half_lo, half_hi)
            if pw is not None and pw.ndim:
                dens = np.exp(logw[:, None] - np.log(phi)[:, None] * pw) * ww[:, None]
            else:
                if pw is not None:
                    logw = logw - pw * np.log(phi)
                dens = np.exp(logw) * ww
                if g.ndim > 1:
                    dens = dens[:, None]
            terms = g * dens
            if not np.all(np.isfinite(terms)):
                finite = np.isfinite(terms)
                if finite.ndim > 1:
                    finite = finite.all(axis=1)
                bad = phi[~finite]
                raise DomainError(f"integrand not finite at phi={bad[:3]}")
            total = total + terms.sum(axis=0)
            absum = absum + np.abs(terms).sum(axis=0)
        return total, absum

    h = 1.0
    s0, a0 = level_sum(0)
    value, absum = s0 * h, a0 * h
    err = np.inf
    for level in range(1, max_level + 1):
        h = 2.0**-level
        add, aadd = level_sum(level)
        new = 0.5 * value + h * add
        absum = 0.5 * absum + h * aadd
        err = np.abs(new - value)
        value = new
        floor = 64 * np.finfo(float).eps * absum
        if level >= _MIN_LEVEL and np.all(err <= np.maximum(tol * np.maximum(1.0, np.abs(value)), floor)):
            return value, np.maximum(err, floor) + np.finfo(float).tiny
    raise QuadratureError(
        f"tanh-sinh did not converge to tol={tol:g} after {max_level} levels "
        f"(last error estimate {np.max(err):.3g})",
        value=value,
        error=err,
    )
