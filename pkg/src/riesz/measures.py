"""Measures and their energies.

``I_f(mu) = sum_{i,j} w_i w_j f(cos dist(x_i, x_j))`` for discrete measures,
``I_f(sigma) = int f dnu`` for the uniform measure, closed forms for the
pole-equator family on ``S^2``, and Monte Carlo for the cap-averaged kernel.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import optimize, special

from .coeffs import analysis_space, jacobi_coefficients
from .errors import DomainError, SamplingError
from .jacobi import DEFAULT_TOL
from .kernels import AcuteAnglePower, GeodesicRiesz, RadialKernel
from .spaces import (
    Family,
    SpaceDescriptor,
    geodesic_distance,
    normalize,
    pairwise_distances,
    point_at_distance,
    point_from_flat,
    point_to_flat,
    random_orthogonal_unit,
    random_point,
    standard_basis,
)

S2 = SpaceDescriptor(Family.SPHERE, 2)


@dataclass
class DiscreteMeasure:
    space: SpaceDescriptor
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points)
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.points) != len(self.weights):
            raise DomainError("points and weights differ in length")
        if np.any(self.weights < 0):
            raise DomainError("weights must be nonnegative")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise DomainError(f"weights sum to {self.weights.sum()!r}, not 1")

    @classmethod
    def uniform_weights(cls, space, points):
        points = np.asarray(points)
        return cls(space, points, np.full(len(points), 1.0 / len(points)))

    @classmethod
    def onb(cls, space: SpaceDescriptor) -> "DiscreteMeasure":
        """Equal weights on ``e_0, ..., e_d``."""
        return cls.uniform_weights(space, standard_basis(space))

    def to_dict(self) -> dict:
        return {
            "space": str(self.space),
            "points": [point_to_flat(self.space, p) for p in self.points],
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteMeasure":
        space = SpaceDescriptor.parse(data["space"])
        pts = np.array([point_from_flat(space, p) for p in data["points"]])
        return cls(space, pts, np.asarray(data["weights"], dtype=float))

    @classmethod
    def load(cls, path) -> "DiscreteMeasure":
        return cls.from_dict(json.loads(Path(path).read_text()))


def energy_discrete(space: SpaceDescriptor, kernel: RadialKernel, measure: DiscreteMeasure) -> float:
    """Double sum including the diagonal; ``inf`` if a weighted pair is singular."""
    A = pairwise_distances(space, measure.points)
    W = np.outer(measure.weights, measure.weights)
    mask = W > 0
    F = kernel.of_angle(A[mask], space)
    if np.any(np.isposinf(F)):
        return math.inf
    return float(np.sum(W[mask] * F))


def energy_uniform(space: SpaceDescriptor, kernel: RadialKernel, tol: float = DEFAULT_TOL, return_error=False):
    """``I_f(sigma) = int f dnu``.

    The acute-angle kernel on a sphere is integrated on the matching real
    projective space, where it reads ``(phi/2)**lam``.
    """
    table = jacobi_coefficients(analysis_space(space, kernel), kernel, 0, tol)
    value, err = float(table.values[0]), float(table.errors[0])
    return (value, err) if return_error else value


def energy_uniform_mc(space, kernel, n_samples: int, rng: np.random.Generator):
    """Monte Carlo estimate of ``I_f(sigma)`` from independent uniform pairs."""
    x = random_point(space, rng, n_samples)
    y = random_point(space, rng, n_samples)
    vals = kernel.of_angle(geodesic_distance(space, x, y), space)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_samples))


# ---------------------------------------------------------------------------
# pole-equator measures on S^2

EQUATORS = ("uniform", "pair")


@dataclass
class PoleEquatorMeasure:
    """``w delta_p + (1 - w) nu`` with ``nu`` carried by the great circle ``p^perp``.

    ``equatorial`` is ``"uniform"``, ``"pair"`` (two orthogonal points) or an
    array of points on the circle taken with equal weights.
    """

    w: float
    equatorial: object = "uniform"
    pole: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        if not 0.0 <= self.w <= 1.0:
            raise DomainError("pole weight must lie in [0, 1]")
        self.pole = normalize(S2, np.asarray(self.pole, dtype=float))
        if isinstance(self.equatorial, str):
            if self.equatorial not in EQUATORS:
                raise DomainError(f"equatorial must be one of {EQUATORS} or an array of points")
        else:
            pts = np.asarray(self.equatorial, dtype=float)
            if np.any(np.abs(pts @ self.pole) > 1e-12):
                raise DomainError("equatorial points must be orthogonal to the pole")
            self.equatorial = pts

    def equator_basis(self):
        a = np.eye(3)[np.argmin(np.abs(self.pole))]
        e1 = normalize(S2, a - (a @ self.pole) * self.pole)
        return e1, np.cross(self.pole, e1)

    def sample(self, n_points: int) -> DiscreteMeasure:
        """Equal-weight ``n_points`` approximation: ``round(w n)`` copies of the pole."""
        k = int(round(self.w * n_points))
        e1, e2 = self.equator_basis()
        m = n_points - k
        if isinstance(self.equatorial, str) and self.equatorial == "pair":
            ang = np.tile([0.0, np.pi / 2], m // 2 + 1)[:m]
        elif isinstance(self.equatorial, str):
            ang = np.arange(m) * np.pi / max(m, 1)
        else:
            pts = self.equatorial
            eq = pts[np.arange(m) % len(pts)]
            return DiscreteMeasure.uniform_weights(S2, np.vstack([np.tile(self.pole, (k, 1)), eq]))
        eq = np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2
        return DiscreteMeasure.uniform_weights(S2, np.vstack([np.tile(self.pole, (k, 1)), eq]))


def equator_energy(lam: float, equatorial) -> float:
    """Acute-angle energy of the equatorial part alone."""
    half = (np.pi / 2) ** lam
    if isinstance(equatorial, str):
        if equatorial == "uniform":
            return half / (lam + 1)
        if equatorial == "pair":
            return half / 2
        raise DomainError(f"unknown equatorial measure {equatorial!r}")
    pts = np.asarray(equatorial, dtype=float)
    return energy_discrete(S2, AcuteAnglePower(lam), DiscreteMeasure.uniform_weights(S2, pts))


def energy_pole_equator(lam: float, pe: PoleEquatorMeasure) -> float:
    """``2w(1-w)(pi/2)^lam + (1-w)^2 I(nu)``; pole-pole pairs contribute nothing."""
    w = pe.w
    return 2 * w * (1 - w) * (np.pi / 2) ** lam + (1 - w) ** 2 * equator_energy(lam, pe.equatorial)


def optimal_pole_weight(lam: float):
    """``(w*, I(w*))`` with ``w* = lam/(2 lam + 1)`` and a uniform equator."""
    if not 0 < lam <= 1:
        raise DomainError("the optimal pole weight is stated for 0 < lam <= 1")
    w = lam / (2 * lam + 1)
    return w, energy_pole_equator(lam, PoleEquatorMeasure(w))


def golden_pole_weight(lam: float, tol: float = 1e-10) -> float:
    """Maximize ``I(w)`` over ``[0, 1]`` by golden-section search.

    A coarse grid supplies the bracketing triple.
    """

    def neg(w):
        return -energy_pole_equator(lam, PoleEquatorMeasure(min(max(w, 0.0), 1.0)))

    grid = np.linspace(0.0, 1.0, 101)
    i = int(np.argmin([neg(w) for w in grid]))
    i = min(max(i, 1), len(grid) - 2)
    res = optimize.minimize_scalar(neg, bracket=(grid[i - 1], grid[i], grid[i + 1]), method="golden", tol=tol)
    return float(res.x)


def pole_equator_advantage(lam: float, tol: float = DEFAULT_TOL) -> float:
    """Optimal pole-equator energy minus ``I_lam(sigma)`` on ``S^2``."""
    return optimal_pole_weight(lam)[1] - energy_uniform(S2, AcuteAnglePower(lam), tol)


# ---------------------------------------------------------------------------
# cap-averaged kernel


def sample_cap(space: SpaceDescriptor, center, radius: float, n: int, rng: np.random.Generator):
    """Uniform points in the geodesic ball ``B_radius(center)``.

    Under the uniform measure ``(1 - cos dist)/2`` is Beta(alpha+1, beta+1)
    distributed and the direction is isotropic.  The radius is drawn by the
    truncated inverse CDF, the direction from the orthogonal complement.
    """
    a, b = float(space.alpha) + 1, float(space.beta) + 1
    umax = math.sin(radius / 2) ** 2
    pmax = special.betainc(a, b, umax)
    if not pmax > 0:
        raise SamplingError(f"cap of radius {radius:g} has numerically zero mass on {space}")
    u = special.betaincinv(a, b, rng.uniform(0.0, pmax, n))
    phi = np.minimum(2 * np.arcsin(np.sqrt(u)), radius)
    c = np.broadcast_to(center, (n,) + np.shape(center))
    v = random_orthogonal_unit(space, c, rng)
    return point_at_distance(space, c, phi, v)


def averaged_kernel_mc(
    space: SpaceDescriptor,
    kernel: RadialKernel,
    epsilon: float,
    theta0: float,
    n_samples: int,
    rng: np.random.Generator,
):
    """Monte Carlo ``f^(eps)`` at two points ``theta0`` apart.

    Returns ``(estimate, standard_error)``.
    """
    if not 0 < epsilon < np.pi / 8:
        raise DomainError("epsilon must lie in (0, pi/8)")
    if not 0 <= theta0 <= np.pi:
        raise DomainError("theta0 must lie in [0, pi]")
    x = standard_basis(space)[0]
    v = random_orthogonal_unit(space, x, rng)
    y = point_at_distance(space, x, theta0, v)
    X = sample_cap(space, x, epsilon, n_samples, rng)
    Y = sample_cap(space, y, epsilon, n_samples, rng)
    vals = kernel.of_angle(geodesic_distance(space, X, Y), space)
    if np.any(np.isposinf(vals)):
        return math.inf, math.inf
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_samples))


# ---------------------------------------------------------------------------
# diametral configurations


def jensen_redistribution_check(d: int, weights, s: float, atoms=None, family: Family = Family.REAL):
    """Energy of weighted diametral atoms versus equal weights on all ``d + 1``.

    Returns ``(energy, energy_equalized)`` and raises if equalizing would
    not be the minimum.
    """
    if not s < 0:
        raise DomainError("the redistribution argument applies to s < 0")
    space = SpaceDescriptor(family, d)
    w = np.asarray(weights, dtype=float)
    if len(w) > d + 1:
        raise DomainError(f"at most {d + 1} mutually diametral atoms exist")
    basis = standard_basis(space)
    pts = basis[: len(w)] if atoms is None else np.asarray(atoms)
    A = pairwise_distances(space, pts)
    off = ~np.eye(len(pts), dtype=bool)
    if np.any(np.abs(A[off] - np.pi) > 1e-12):
        raise DomainError("atoms are not pairwise diametral")
    kern = GeodesicRiesz(s)
    e = energy_discrete(space, kern, DiscreteMeasure(space, pts, w))
    e_eq = energy_discrete(space, kern, DiscreteMeasure.onb(space))
    if e_eq > e + 1e-12:
        raise ArithmeticError(f"equalized energy {e_eq} exceeds {e}")
    return e, e_eq
