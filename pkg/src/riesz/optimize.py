"""Multi-start Riemannian gradient optimization of discrete energies.

Configurations are ``N`` unit vectors in ``R^{d+1}`` with equal weights
``1/N``.  On ``S:d`` they are the points themselves; on ``RP:d`` they are
sphere representers, and the kernel sees the projective distance
``2 arccos|x.y|``.  Steps move along the tangent gradient, are retracted by
normalization, and are accepted by an Armijo test.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateStartError, DomainError, UnsupportedSpaceError
from .kernels import AcuteAnglePower, RadialKernel, parse_kernel
from .spaces import Family, SpaceDescriptor, pairwise_distances

log = logging.getLogger(__name__)

GRAD_CAP = 1e8
JITTER = 1e-9


def _check_space(space):
    if space.family not in (Family.SPHERE, Family.REAL):
        raise UnsupportedSpaceError(f"optimization runs on S:d and RP:d (sphere representers), not {space}")


def _angles(space, X):
    if space.family is Family.SPHERE:
        return pairwise_distances(space, X)
    # representers of RP^d: projective distance is twice the acute angle
    return pairwise_distances(SpaceDescriptor(Family.REAL, space.d), X)


def configuration_energy(space: SpaceDescriptor, kernel: RadialKernel, X, weights=None) -> float:
    """Weighted double sum over sphere representers (diagonal included)."""
    _check_space(space)
    X = np.asarray(X, dtype=float)
    w = np.full(len(X), 1.0 / len(X)) if weights is None else np.asarray(weights, dtype=float)
    F = kernel.of_angle(_angles(space, X), space)
    W = np.outer(w, w)
    if np.any(np.isposinf(F[W > 0])):
        return math.inf
    return float(np.sum(W * np.where(W > 0, F, 0.0)))


def energy_gradient(space: SpaceDescriptor, kernel: RadialKernel, points, weights=None, return_flag=False):
    """Tangent gradient of the energy at each point.

    Pair derivatives are clamped at ``GRAD_CAP`` in magnitude; ``flag`` is
    true when that happened.
    """
    _check_space(space)
    X = np.asarray(points, dtype=float)
    n = len(X)
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
    A = _angles(space, X)
    U = X @ X.T
    off = ~np.eye(n, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        dK = kernel.angle_derivative(A, space)
        if space.family is Family.SPHERE:
            dphi = -1.0 / np.sin(A)
        else:
            sgn = np.where(U >= 0, 1.0, -1.0)
            dphi = -2.0 * sgn / np.sin(A / 2)
        M = 2.0 * np.outer(w, w) * dK * dphi
    M = np.where(off, M, 0.0)
    bad = ~np.isfinite(M) | (np.abs(M) > GRAD_CAP)
    flag = bool(np.any(bad & off))
    if flag:
        big = np.where(np.isnan(M), 0.0, np.sign(M)) * GRAD_CAP
        M = np.where(bad, big, M)
    G = M @ X
    G -= np.sum(G * X, axis=1, keepdims=True) * X
    return (G, flag) if return_flag else G


@dataclass
class OptimizationConfig:
    space: SpaceDescriptor
    kernel: RadialKernel
    N: int
    restarts: int = 10
    max_iters: int = 2000
    initial_step: float = 0.5
    shrink: float = 0.5
    armijo_c: float = 1e-4
    max_backtracks: int = 40
    seed: int = 0
    direction: str | None = None
    gtol: float = 1e-10

    def __post_init__(self):
        _check_space(self.space)
        if self.N < 1:
            raise DomainError("N must be >= 1")
        if self.restarts < 1:
            raise DomainError("restarts must be >= 1")
        natural = "maximize" if self.kernel.maximize else "minimize"
        if self.direction is None:
            self.direction = natural
        if self.direction != natural:
            raise DomainError(f"{self.kernel.spec} energies are optimized with direction {natural!r}")
        if not (0 < self.shrink < 1 and self.initial_step > 0 and 0 < self.armijo_c < 1):
            raise DomainError("invalid Armijo parameters")

    @property
    def sign(self) -> float:
        return 1.0 if self.direction == "maximize" else -1.0

    def to_dict(self) -> dict:
        return {
            "space": str(self.space),
            "kernel": self.kernel.spec,
            "N": self.N,
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "initial_step": self.initial_step,
            "shrink": self.shrink,
            "armijo_c": self.armijo_c,
            "max_backtracks": self.max_backtracks,
            "seed": self.seed,
            "direction": self.direction,
            "gtol": self.gtol,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OptimizationConfig":
        data = dict(data)
        data["space"] = SpaceDescriptor.parse(data["space"])
        data["kernel"] = parse_kernel(data["kernel"])
        return cls(**data)


@dataclass
class RestartResult:
    points: np.ndarray
    energy: float
    trace: list
    iterations: int
    flagged: bool
    failed_immediately: bool


@dataclass
class OptimizationRun:
    config: OptimizationConfig
    best_points: np.ndarray
    best_energy: float
    final_energies: list
    trace: list
    iterations: list
    best_restart: int
    flagged: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "best_energy": self.best_energy,
            "best_restart": self.best_restart,
            "final_energies": self.final_energies,
            "iterations": self.iterations,
            "flagged": self.flagged,
            "trace": self.trace,
            "best_points": self.best_points.tolist(),
        }

    def trace_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["iteration", "energy"])
        for i, e in enumerate(self.trace):
            wr.writerow([i, repr(e)])
        return buf.getvalue()


def _run_restart(cfg: OptimizationConfig, r: int) -> RestartResult:
    rng = np.random.default_rng([cfg.seed, r])
    m = cfg.space.d + 1
    X = rng.standard_normal((cfg.N, m))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    sgn = cfg.sign
    E = configuration_energy(cfg.space, cfg.kernel, X)
    trace = [E]
    flagged = False
    step = cfg.initial_step
    it = 0
    failed_first = False
    for it in range(1, cfg.max_iters + 1):
        G, fl = energy_gradient(cfg.space, cfg.kernel, X, return_flag=True)
        flagged |= fl
        # per-point forces carry a 1/N weight; rescale so steps are O(1) in angle
        D = sgn * cfg.N * G
        slope = float(np.sum(G * D)) * sgn
        if math.sqrt(max(slope, 0.0) / cfg.N) < cfg.gtol:
            it -= 1
            break
        alpha = min(cfg.initial_step, 2 * step)
        accepted = False
        for _ in range(cfg.max_backtracks):
            noise = rng.standard_normal(X.shape) * JITTER
            Y = X + alpha * D + noise
            Y /= np.linalg.norm(Y, axis=1, keepdims=True)
            EY = configuration_energy(cfg.space, cfg.kernel, Y)
            if sgn * EY >= sgn * E + cfg.armijo_c * alpha * slope and sgn * EY > sgn * E:
                accepted = True
                break
            alpha *= cfg.shrink
        if not accepted:
            failed_first = it == 1
            it -= 1
            break
        X, E, step = Y, EY, alpha
        trace.append(E)
    return RestartResult(X, E, trace, it, flagged, failed_first)


def optimize_configuration(config: OptimizationConfig, threads: int | None = None) -> OptimizationRun:
    """Best of ``config.restarts`` independent runs; deterministic per seed.

    Restarts run on up to ``threads`` workers (default ``RIESZ_THREADS`` or 1).
    Each restart draws from its own generator seeded with ``(seed, index)``.
    """
    if threads is None:
        threads = int(os.environ.get("RIESZ_THREADS", "1") or 1)
    threads = max(1, min(threads, config.restarts))
    if threads == 1:
        results = [_run_restart(config, r) for r in range(config.restarts)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda r: _run_restart(config, r), range(config.restarts)))
    if all(res.failed_immediately for res in results):
        raise DegenerateStartError("every restart failed its first line search")
    finals = [res.energy for res in results]
    key = np.asarray(finals) * config.sign
    best = int(np.argmax(key))
    res = results[best]
    log.info("optimize %s %s N=%d best=%.12g (restart %d)", config.space, config.kernel.spec, config.N, res.energy, best)
    return OptimizationRun(
        config,
        res.points,
        res.energy,
        finals,
        res.trace,
        [r.iterations for r in results],
        best,
        any(r.flagged for r in results),
    )


def acute_angles(points) -> np.ndarray:
    """Matrix of ``arccos|x.y|`` between representers."""
    X = np.asarray(points, dtype=float)
    A = pairwise_distances(SpaceDescriptor(Family.REAL, X.shape[1] - 1), X) / 2
    return A


@dataclass(frozen=True)
class ConfigurationStats:
    histogram: np.ndarray
    bin_edges: np.ndarray
    max_cap_mass: float
    pole: np.ndarray
    band_mass: float
    radius: float

    def histogram_csv(self) -> str:
        rows = ["lo,hi,fraction"]
        rows += [f"{a!r},{b!r},{c!r}" for a, b, c in zip(self.bin_edges[:-1], self.bin_edges[1:], self.histogram)]
        return "\n".join(rows) + "\n"


def configuration_stats(points, radius: float = 0.3, bins: int = 18) -> ConfigurationStats:
    """Summary of a point cloud in terms of acute angles between representers.

    The pole is the configuration point whose cap of acute radius ``radius``
    holds the most points; the band is ``{x : |x.p| <= sin(radius)}``.
    """
    X = np.asarray(points, dtype=float)
    if len(X) == 0:
        raise DomainError("empty configuration")
    A = acute_angles(X)
    iu = np.triu_indices(len(X), 1)
    edges = np.linspace(0.0, np.pi / 2, bins + 1)
    if len(iu[0]):
        hist, _ = np.histogram(A[iu], bins=edges)
        hist = hist / len(iu[0])
    else:
        hist = np.zeros(bins)
    mass = np.mean(A <= radius, axis=1)
    k = int(np.argmax(mass))
    pole = X[k]
    band = float(np.mean(np.abs(X @ pole) <= np.sin(radius)))
    return ConfigurationStats(hist, edges, float(mass[k]), pole, band, radius)
