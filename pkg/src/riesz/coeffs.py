"""Jacobi coefficients of radial kernels and what is built on them.

The coefficient of ``P_n`` in the expansion of ``f`` is

    fhat_n = m_n / P_n(1)^2 * int f(t) P_n(t) dnu(t).

All coefficients up to ``n_max`` come out of a single vector-valued
tanh-sinh pass in the angle variable.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .errors import BracketError, DomainError, ResourceError
from .jacobi import (
    DEFAULT_TOL,
    JacobiParams,
    jacobi_at_one,
    jacobi_table,
    norm_constant_m,
    singular_integrate,
)
from .kernels import (
    AcuteAnglePower,
    GeodesicLog,
    GeodesicRiesz,
    RadialKernel,
    derivative_expansion,
    kernel_family,
)
from .spaces import Family, SpaceDescriptor

log = logging.getLogger(__name__)

DEFAULT_N_MAX = 50
SIGN_MARGIN = 1e-9
RODRIGUES_MAX_N = 10


def coefficient_scale(params: JacobiParams, n_max: int) -> np.ndarray:
    """``m_n / P_n(1)^2`` for ``n = 0..n_max``."""
    return np.array([norm_constant_m(params, n) / jacobi_at_one(params, n) ** 2 for n in range(n_max + 1)])


def analysis_space(space: SpaceDescriptor, kernel: RadialKernel) -> SpaceDescriptor:
    """Space whose Jacobi coefficients decide the sign questions for ``kernel``.

    The acute-angle kernel on ``S^d`` is even, so its Gegenbauer expansion
    has vanishing odd coefficients.  Its even part is the expansion on
    ``RP^d`` of the same kernel, which is where the signs are read off.
    """
    if isinstance(kernel, AcuteAnglePower) and space.family is Family.SPHERE:
        return SpaceDescriptor(Family.REAL, space.d)
    return space


@dataclass(frozen=True)
class CoefficientTable:
    space: SpaceDescriptor
    kernel: RadialKernel
    values: np.ndarray
    errors: np.ndarray
    tol: float = DEFAULT_TOL

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    @property
    def entries(self):
        return [(n, float(v), float(e)) for n, (v, e) in enumerate(zip(self.values, self.errors))]

    def signs(self, margin: float = SIGN_MARGIN) -> list[str]:
        out = []
        for v in self.values:
            out.append("positive" if v > margin else "negative" if v < -margin else "indeterminate")
        return out

    def to_dict(self, margin: float = SIGN_MARGIN) -> dict:
        return {
            "space": str(self.space),
            "kernel": self.kernel.spec,
            "n_max": self.n_max,
            "tol": self.tol,
            "sign_margin": margin,
            "entries": [
                {"n": n, "coefficient": v, "error": e, "sign": sg}
                for (n, v, e), sg in zip(self.entries, self.signs(margin))
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), indent=2, **kw)

    def to_csv(self) -> str:
        rows = ["n,coefficient,error"] + [f"{n},{v!r},{e!r}" for n, v, e in self.entries]
        return "\n".join(rows) + "\n"


def jacobi_coefficients(
    space: SpaceDescriptor, kernel: RadialKernel, n_max: int = DEFAULT_N_MAX, tol: float = DEFAULT_TOL
) -> CoefficientTable:
    """All coefficients ``fhat_0 .. fhat_{n_max}`` of ``kernel`` on ``space``."""
    kernel.check_integrable(space)
    params = JacobiParams.from_space(space)
    scale = coefficient_scale(params, n_max)
    regular, power, bps = kernel.integration_form(space)

    def integrand(phi):
        P = jacobi_table(params, n_max, np.cos(phi)).T
        return P * scale * np.asarray(regular(phi))[:, None]

    value, err = singular_integrate(integrand, params, tol=tol, breakpoints=bps, power=power)
    return CoefficientTable(space, kernel, np.asarray(value), np.asarray(err), tol)


def jacobi_coefficient(space, kernel, n: int, tol: float = DEFAULT_TOL):
    """``(fhat_n, error_estimate)``."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    table = jacobi_coefficients(space, kernel, n, tol)
    return float(table.values[n]), float(table.errors[n])


# ---------------------------------------------------------------------------
# Rodrigues route


@dataclass(frozen=True)
class RodriguesTerm:
    C: float
    s: float
    b: float
    c: int
    integral: float
    error: float


def rodrigues_terms(space: SpaceDescriptor, s: float, n: int, tol: float = DEFAULT_TOL):
    """Term integrals ``int t^c (1-t^2)^(n-b) F_{s_i,0,0}-part dnu`` of the expansion.

    Returns the expansion terms with their integrals against ``nu``.
    """
    if n > RODRIGUES_MAX_N:
        raise ResourceError(f"Rodrigues route is limited to n <= {RODRIGUES_MAX_N} (3^n terms)")
    if n < 0:
        raise DomainError("n must be nonnegative")
    kern = GeodesicLog() if s == 0 else GeodesicRiesz(s)
    kern.check_integrable(space)
    params = JacobiParams.from_space(space)
    expn = derivative_expansion(s, n)
    si = np.array([tm.s for tm in expn.terms])
    bi = np.array([float(tm.b) for tm in expn.terms])
    ci = np.array([tm.c for tm in expn.terms])
    expo = 2.0 * (n - bi)

    if n == 0:
        # single term, sign-adjusted F_{s,0,0}
        def integrand(phi):
            if s > 0:
                return np.ones_like(phi)
            if s == 0:
                return -np.log(phi)
            return -np.power(phi, -s)

        power = s if s > 0 else None
    else:

        # sin(phi)^e phi^(-s_i) = (sin(phi)/phi)^e phi^(e - s_i); the pure power
        # goes to the quadrature so the cancellation near phi = 0 is exact
        def integrand(phi):
            cphi = np.cos(phi)[:, None]
            return cphi**ci * np.sinc(phi / np.pi)[:, None] ** expo

        power = si - expo

    vals, errs = singular_integrate(integrand, params, tol=tol, power=power)
    vals, errs = np.atleast_1d(vals), np.atleast_1d(errs)
    return [
        RodriguesTerm(tm.C, tm.s, float(tm.b), tm.c, float(v), float(e))
        for tm, v, e in zip(expn.terms, vals, errs)
    ]


def coefficient_via_rodrigues(space: SpaceDescriptor, kernel: RadialKernel, n: int, tol: float = DEFAULT_TOL):
    """``(fhat_n, error_estimate)`` of ``F_s`` after ``n`` integrations by parts."""
    if isinstance(kernel, GeodesicLog):
        s = 0.0
    elif isinstance(kernel, GeodesicRiesz):
        s = kernel.s
    else:
        raise DomainError("the Rodrigues route is implemented for geodesic Riesz kernels only")
    if not s > -1:
        raise DomainError("the Rodrigues route needs s > -1")
    params = JacobiParams.from_space(space)
    terms = rodrigues_terms(space, s, n, tol)
    fac = norm_constant_m(params, n) / (jacobi_at_one(params, n) ** 2 * 2.0**n * math.factorial(n))
    contrib = np.array([tm.C * tm.integral for tm in terms])
    value = fac * contrib.sum()
    err = fac * (sum(tm.C * tm.error for tm in terms) + 8 * np.finfo(float).eps * np.abs(contrib).sum())
    return float(value), float(err)


# ---------------------------------------------------------------------------
# scans and transitions


@dataclass(frozen=True)
class PositivityScan:
    min_value: float
    argmin: int
    table: CoefficientTable
    margin: float

    @property
    def all_positive(self) -> bool:
        return self.min_value > self.margin

    @property
    def indeterminate(self) -> list[int]:
        return [n for n, sg in enumerate(self.table.signs(self.margin)) if n >= 1 and sg == "indeterminate"]


def positivity_scan(
    space, kernel, n_max: int = DEFAULT_N_MAX, tol: float = DEFAULT_TOL, margin: float = SIGN_MARGIN
) -> PositivityScan:
    """Smallest coefficient over ``1 <= n <= n_max``."""
    table = jacobi_coefficients(space, kernel, n_max, tol)
    body = table.values[1:]
    i = int(np.argmin(body))
    return PositivityScan(float(body[i]), i + 1, table, margin)


def extremal_coefficient(space, kernel, n_max=DEFAULT_N_MAX, tol=DEFAULT_TOL):
    """``(value, n)`` of the max coefficient for maximization kernels, else the min."""
    space = analysis_space(space, kernel)
    table = jacobi_coefficients(space, kernel, n_max, tol)
    body = table.values[1:]
    i = int(np.argmax(body) if kernel.maximize else np.argmin(body))
    return float(body[i]), i + 1


@dataclass
class TransitionReport:
    space: SpaceDescriptor
    family: str
    axis: str
    initial_bracket: tuple[float, float]
    bracket: tuple[float, float]
    estimate: float
    n_max: int
    tol: float
    end_signs: tuple[int, int]
    end_values: tuple[float, float]
    history: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "space": str(self.space),
            "family": self.family,
            "axis": self.axis,
            "initial_bracket": list(self.initial_bracket),
            "bracket": list(self.bracket),
            "estimate": self.estimate,
            "n_max": self.n_max,
            "tol": self.tol,
            "end_signs": list(self.end_signs),
            "end_values": list(self.end_values),
            "history": self.history,
        }


def find_transition(
    space: SpaceDescriptor,
    family: str | Callable[[float], RadialKernel],
    bracket: tuple[float, float],
    n_max: int = DEFAULT_N_MAX,
    tol: float = 1e-3,
    coef_tol: float = DEFAULT_TOL,
) -> TransitionReport:
    """Bisect on the kernel parameter for a sign change of the extremal coefficient.

    ``family`` is ``"geo"``, ``"chord"``, ``"acute"`` or a callable mapping the
    parameter to a kernel.  Only the sign of the statistic is used.
    """
    name = family if isinstance(family, str) else getattr(family, "__name__", "custom")
    make = kernel_family(family) if isinstance(family, str) else family
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise DomainError("bracket must satisfy lo < hi")
    axis = "lambda" if isinstance(make(hi), AcuteAnglePower) else "s"
    history = []

    def stat(p):
        v, n = extremal_coefficient(space, make(p), n_max, coef_tol)
        history.append({"param": p, "statistic": v, "n": n})
        log.debug("transition %s %s=%.6g stat=%.3e at n=%d", space, axis, p, v, n)
        return v

    v_lo, v_hi = stat(lo), stat(hi)
    sg_lo, sg_hi = int(np.sign(v_lo)), int(np.sign(v_hi))
    if sg_lo == sg_hi or sg_lo == 0 or sg_hi == 0:
        raise BracketError(
            f"no sign change on [{lo:g}, {hi:g}]: statistic {v_lo:.6e} at lo, {v_hi:.6e} at hi",
            lo_value=v_lo,
            hi_value=v_hi,
        )
    a, b = lo, hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        sg = int(np.sign(stat(mid)))
        if sg == sg_lo:
            a = mid
        else:
            b = mid
    return TransitionReport(
        space, name, axis, (lo, hi), (a, b), 0.5 * (a + b), n_max, tol, (sg_lo, sg_hi), (v_lo, v_hi), history
    )


# ---------------------------------------------------------------------------
# Cesaro means


def cesaro_numbers(delta: float, n: int) -> np.ndarray:
    """``A_k^delta = (delta+1)_k / k!`` for ``k = 0..n``."""
    if not delta > -1:
        raise DomainError("Cesaro order must exceed -1")
    A = np.ones(n + 1)
    for k in range(1, n + 1):
        A[k] = A[k - 1] * (k + delta) / k
    return A


def cesaro_coefficients(table: CoefficientTable, delta: float, n: int) -> np.ndarray:
    """Coefficients ``A_{n-k}/A_n * fhat_k`` of the mean ``S_n^delta f``."""
    if n > table.n_max:
        raise DomainError(f"n={n} exceeds the table size {table.n_max}")
    A = cesaro_numbers(delta, n)
    return A[::-1] / A[n] * table.values[: n + 1]


def cesaro_eval(table: CoefficientTable, delta: float, n: int, t):
    """``S_n^delta f(t)``."""
    params = JacobiParams.from_space(table.space)
    c = cesaro_coefficients(table, delta, n)
    P = jacobi_table(params, n, t)
    v = np.tensordot(c, P, axes=1)
    return float(v) if np.ndim(v) == 0 else v


def cesaro_l1_error(table: CoefficientTable, delta: float, n: int, panels: int = 400, order: int = 16) -> float:
    """``int |S_n^delta f - f| dnu`` by composite Gauss-Legendre in the angle.

    Panels are graded geometrically toward ``phi = 0`` where ``f`` may blow up.
    """
    params = JacobiParams.from_space(table.space)
    a, b = params.alpha, params.beta
    graded = np.pi * np.geomspace(1e-12, 1.0, panels // 4)
    edges = np.unique(np.concatenate([[0.0], graded, np.linspace(0.0, np.pi, panels - panels // 4)]))
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    phi = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    ww = (0.5 * (hi - lo) * w).ravel()
    dens = np.sin(phi / 2) ** (2 * a + 1) * np.cos(phi / 2) ** (2 * b + 1) / special.beta(a + 1, b + 1)
    f = table.kernel.of_angle(phi, table.space)
    diff = np.abs(cesaro_eval(table, delta, n, np.cos(phi)) - f)
    return float(np.sum(ww * dens * diff))
