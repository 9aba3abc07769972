"""Radial kernels, the derivative expansion of F_s, and auxiliary functions.

A radial kernel is a function ``f(t)`` of ``t = cos(dist(x, y))``.  Every
kernel can also be evaluated directly in the angle ``phi = dist(x, y)``,
which is what quadrature and the optimizer use; this avoids the loss of
precision in ``arccos`` near coincident points.

The acute-angle kernel depends on the space.  On spheres it is
``arccos(|t|)**lam``.  On projective spaces the acute angle between
representers is half the projective distance, so it is ``(phi/2)**lam``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .errors import DivergentEnergyError, DomainError, ResourceError
from .spaces import Family, SpaceDescriptor

MAX_DERIVATIVE_ORDER = 12


def _is_sphere(space):
    return space is None or space.family is Family.SPHERE


class RadialKernel:
    """Base class.  Subclasses implement ``of_angle`` and ``angle_derivative``."""

    maximize = False  # optimization direction of the energy

    def of_angle(self, phi, space: SpaceDescriptor | None = None):
        raise NotImplementedError

    def angle_derivative(self, phi, space: SpaceDescriptor | None = None):
        """Derivative of the kernel with respect to the angle ``phi``."""
        raise NotImplementedError

    def __call__(self, t, space=None):
        return eval_kernel(self, t, space)

    # hooks for quadrature; see coeffs.jacobi_coefficients
    def integration_form(self, space):
        """Return ``(regular, power, breakpoints)`` with ``f = phi**-power * regular``."""
        return (lambda phi: self.of_angle(phi, space)), None, ()

    def check_integrable(self, space):
        pass

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.spec


@dataclass(frozen=True)
class GeodesicRiesz(RadialKernel):
    """``F_s(t) = (arccos t)**(-s) / s``, ``s != 0``."""

    s: float

    def __post_init__(self):
        if self.s == 0:
            raise DomainError("s = 0 is the logarithmic kernel; use GeodesicLog")
        object.__setattr__(self, "s", float(self.s))

    def of_angle(self, phi, space=None):
        phi = np.asarray(phi, dtype=float)
        with np.errstate(divide="ignore"):
            return np.power(phi, -self.s) / self.s

    def angle_derivative(self, phi, space=None):
        phi = np.asarray(phi, dtype=float)
        with np.errstate(divide="ignore"):
            return -np.power(phi, -self.s - 1)

    def integration_form(self, space):
        s = self.s
        return (lambda phi: np.full_like(phi, 1.0 / s)), s, ()

    def check_integrable(self, space):
        if self.s >= space.D:
            raise DivergentEnergyError(f"geodesic Riesz kernel with s={self.s} >= D={space.D} on {space}")

    @property
    def spec(self):
        return f"geo:{self.s:g}"


@dataclass(frozen=True)
class GeodesicLog(RadialKernel):
    """``F_0(t) = -log(arccos t)``."""

    s = 0.0

    def of_angle(self, phi, space=None):
        with np.errstate(divide="ignore"):
            return -np.log(np.asarray(phi, dtype=float))

    def angle_derivative(self, phi, space=None):
        with np.errstate(divide="ignore"):
            return -1.0 / np.asarray(phi, dtype=float)

    @property
    def spec(self):
        return "geolog"


@dataclass(frozen=True)
class ChordalRiesz(RadialKernel):
    """``R_s(t) = rho**(-s) / s`` with ``rho = sqrt((1 - t)/2) = sin(phi/2)``."""

    s: float

    def __post_init__(self):
        if self.s == 0:
            raise DomainError("s = 0 is the logarithmic kernel; use ChordalLog")
        object.__setattr__(self, "s", float(self.s))

    def of_angle(self, phi, space=None):
        rho = np.sin(np.asarray(phi, dtype=float) / 2)
        with np.errstate(divide="ignore"):
            return np.power(rho, -self.s) / self.s

    def angle_derivative(self, phi, space=None):
        half = np.asarray(phi, dtype=float) / 2
        with np.errstate(divide="ignore"):
            return -0.5 * np.power(np.sin(half), -self.s - 1) * np.cos(half)

    def integration_form(self, space):
        s = self.s

        def regular(phi):
            # (sin(phi/2)/phi)^(-s) stays bounded at phi = 0
            return np.power(np.sinc(phi / (2 * np.pi)) / 2, -s) / s

        return regular, s, ()

    def check_integrable(self, space):
        if self.s >= space.D:
            raise DivergentEnergyError(f"chordal Riesz kernel with s={self.s} >= D={space.D} on {space}")

    @property
    def spec(self):
        return f"chord:{self.s:g}"


@dataclass(frozen=True)
class ChordalLog(RadialKernel):
    """``-log sqrt((1 - t)/2)``."""

    s = 0.0

    def of_angle(self, phi, space=None):
        with np.errstate(divide="ignore"):
            return -np.log(np.sin(np.asarray(phi, dtype=float) / 2))

    def angle_derivative(self, phi, space=None):
        half = np.asarray(phi, dtype=float) / 2
        with np.errstate(divide="ignore"):
            return -0.5 / np.tan(half)

    @property
    def spec(self):
        return "chordlog"


@dataclass(frozen=True)
class AcuteAnglePower(RadialKernel):
    """``theta**lam`` with ``theta`` the acute angle between representers."""

    lam: float
    maximize = True

    def __post_init__(self):
        if not self.lam >= 0:
            raise DomainError("acute-angle exponent must be nonnegative")
        object.__setattr__(self, "lam", float(self.lam))

    def acute_angle(self, phi, space=None):
        phi = np.asarray(phi, dtype=float)
        if _is_sphere(space):
            return np.minimum(phi, np.pi - phi)
        return phi / 2

    def of_angle(self, phi, space=None):
        return np.power(self.acute_angle(phi, space), self.lam)

    def angle_derivative(self, phi, space=None):
        theta = self.acute_angle(phi, space)
        with np.errstate(divide="ignore"):
            # at the kink phi = pi/2 take the midpoint of the one-sided slopes
            dtheta = np.sign(np.pi / 2 - np.asarray(phi, dtype=float)) if _is_sphere(space) else 0.5
            return self.lam * np.power(theta, self.lam - 1) * dtheta

    def integration_form(self, space):
        bps = (np.pi / 2,) if _is_sphere(space) else ()
        return (lambda phi: self.of_angle(phi, space)), None, bps

    @property
    def spec(self):
        return f"acute:{self.lam:g}"


@dataclass(frozen=True)
class Custom(RadialKernel):
    """User kernel given as a vectorized function of ``t``."""

    func: Callable = field(compare=False)
    name: str = "custom"

    def of_angle(self, phi, space=None):
        return np.asarray(self.func(np.cos(np.asarray(phi, dtype=float))), dtype=float)

    def angle_derivative(self, phi, space=None, h=1e-6):
        phi = np.asarray(phi, dtype=float)
        return (self.of_angle(phi + h) - self.of_angle(phi - h)) / (2 * h)

    @property
    def spec(self):
        return self.name


def geodesic_riesz(s: float) -> RadialKernel:
    """``F_s`` including the logarithmic case ``s = 0``."""
    return GeodesicLog() if s == 0 else GeodesicRiesz(s)


def chordal_riesz(s: float) -> RadialKernel:
    return ChordalLog() if s == 0 else ChordalRiesz(s)


_KERNEL_RE = re.compile(r"^\s*(geo|chord|acute)\s*:\s*([-+0-9.eE]+)\s*$")


def parse_kernel(spec: str) -> RadialKernel:
    """Parse ``geo:<s>``, ``geolog``, ``chord:<s>``, ``chordlog``, ``acute:<lam>``."""
    spec_s = spec.strip()
    if spec_s == "geolog":
        return GeodesicLog()
    if spec_s == "chordlog":
        return ChordalLog()
    m = _KERNEL_RE.match(spec_s)
    if m is None:
        raise ValueError(f"bad kernel spec {spec!r}")
    kind, val = m.group(1), float(m.group(2))
    if kind == "geo":
        return geodesic_riesz(val)
    if kind == "chord":
        return chordal_riesz(val)
    return AcuteAnglePower(val)


def kernel_family(name: str) -> Callable[[float], RadialKernel]:
    """Map ``geo``/``chord``/``acute`` onto a one-parameter kernel constructor."""
    families = {"geo": geodesic_riesz, "chord": chordal_riesz, "acute": AcuteAnglePower}
    if name not in families:
        raise ValueError(f"unknown kernel family {name!r}; expected one of {sorted(families)}")
    return families[name]


def eval_kernel(kernel: RadialKernel, t, space: SpaceDescriptor | None = None):
    """Evaluate ``f(t)``; singular points give ``inf``.

    ``space`` only matters for the acute-angle kernel (see module notes).
    """
    t = np.asarray(t, dtype=float)
    if np.any((t < -1) | (t > 1)):
        raise DomainError("kernel argument must lie in [-1, 1]")
    out = kernel.of_angle(np.arccos(t), space)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# derivative expansion


class Term(NamedTuple):
    C: float
    s: float  # s_i
    b: Fraction
    c: int


@dataclass(frozen=True)
class DerivativeExpansion:
    """``d^k/dt^k F_s = sum_i C_i F_{s_i, b_i, c_i}``.

    ``offsets`` holds the exact ``s_i - s`` used as merge keys.
    """

    s: float
    k: int
    terms: tuple[Term, ...]
    offsets: tuple[Fraction, ...]

    def __call__(self, t):
        return sum(tm.C * F_sbc(tm.s, tm.b, tm.c, t) for tm in self.terms)

    def __len__(self):
        return len(self.terms)


def F_sbc(s: float, b, c: int, t):
    """Three-branch ``F_{s,b,c}(t)`` on ``(-1, 1)``."""
    t = np.asarray(t, dtype=float)
    phi = np.arccos(t)
    b = float(b)
    base = t**c / (1.0 - t * t) ** b
    if s > 0:
        return base * phi ** (-s)
    if s == 0:
        return -base * np.log(phi)
    return -base * phi ** (-s)


def derivative_expansion(s: float, k: int) -> DerivativeExpansion:
    """Symbolic ``k``-th derivative of ``F_s`` for ``s > -1``.

    For ``k = 0`` the single term carries ``C = 1/|s|`` (``1`` at ``s = 0``)
    so the expansion evaluates to ``F_s`` itself.  From ``k = 1`` on, the
    expansion starts from ``F_{s+1,1/2,0}`` and applies
    ``F'_{g,b,c} = g F_{g+1,b+1/2,c} + 2b F_{g,b+1,c+1} + c F_{g,b,c-1}``.
    """
    if not s > -1:
        raise DomainError("derivative expansion requires s > -1")
    if k < 0:
        raise DomainError("order must be nonnegative")
    if k > MAX_DERIVATIVE_ORDER:
        raise ResourceError(f"order {k} exceeds the guard {MAX_DERIVATIVE_ORDER} (3^k terms)")
    s = float(s)
    if k == 0:
        C = 1.0 if s == 0 else 1.0 / abs(s)
        return DerivativeExpansion(s, 0, (Term(C, s, Fraction(0), 0),), (Fraction(0),))
    half = Fraction(1, 2)
    terms: dict[tuple[Fraction, Fraction, int], float] = {(Fraction(1), half, 0): 1.0}
    for _ in range(k - 1):
        nxt: dict[tuple[Fraction, Fraction, int], float] = {}
        for (off, b, c), C in terms.items():
            g = s + float(off)
            for key, w in (
                ((off + 1, b + half, c), g),
                ((off, b + 1, c + 1), 2 * float(b)),
                ((off, b, c - 1), float(c)),
            ):
                if w != 0:
                    nxt[key] = nxt.get(key, 0.0) + w * C
        terms = nxt
    keys = sorted(terms)
    return DerivativeExpansion(
        s,
        k,
        tuple(Term(terms[key], s + float(key[0]), key[1], key[2]) for key in keys),
        tuple(key[0] for key in keys),
    )


def eval_derivative(s: float, k: int, t):
    """``d^k/dt^k F_s(t)`` from the expansion; ``t`` strictly inside ``(-1, 1)``."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) >= 1):
        raise DomainError("derivative expansion is evaluated on the open interval (-1, 1)")
    v = derivative_expansion(s, k)(t)
    return float(v) if np.ndim(v) == 0 else v


# ---------------------------------------------------------------------------
# auxiliary functions


def aux_h(t):
    """``sqrt((1-t)/2) - arccos(t)/pi``; vanishes at both endpoints."""
    t = np.asarray(t, dtype=float)
    return np.sqrt((1 - t) / 2) - np.arccos(t) / math.pi


def aux_p(alpha, beta, s_i, t):
    """Odd-part function ``(1-t)^(a-b)/arccos(t)^s - (1+t)^(a-b)/arccos(-t)^s``."""
    t = np.asarray(t, dtype=float)
    e = float(alpha) - float(beta)
    return (1 - t) ** e / np.arccos(t) ** s_i - (1 + t) ** e / np.arccos(-t) ** s_i
