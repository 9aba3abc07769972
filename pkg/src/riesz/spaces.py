"""Compact two-point homogeneous spaces and their point geometry.

Points are stored as plain numpy arrays of unit norm:

* sphere ``S:d`` and real projective ``RP:d``: real arrays of shape ``(d+1,)``
* complex projective ``CP:d``: complex arrays of shape ``(d+1,)``
* quaternionic projective ``HP:d``: real arrays of shape ``(d+1, 4)``,
  one quaternion ``(w, i, j, k)`` per coordinate

Projective points are identified under right multiplication by unit
scalars, ``x ~ x a``.  Leading batch axes are allowed everywhere.
Octonionic spaces exist only at the parameter level.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, UnsupportedSpaceError


class Family(enum.Enum):
    SPHERE = "S"
    REAL = "RP"
    COMPLEX = "CP"
    QUAT = "HP"
    OCTO = "OP"


# real dimension of the base field
FIELD_DIM = {
    Family.SPHERE: 1,
    Family.REAL: 1,
    Family.COMPLEX: 2,
    Family.QUAT: 4,
    Family.OCTO: 8,
}

FIELDS = {"R": Family.REAL, "C": Family.COMPLEX, "H": Family.QUAT, "O": Family.OCTO}

_SPEC_RE = re.compile(r"^\s*(S|RP|CP|HP|OP)\s*:\s*(\d+)\s*$")


@dataclass(frozen=True)
class SpaceDescriptor:
    """One admissible space together with its Jacobi parameters.

    Parameters
    ----------
    family : Family
    d : int
        Sphere dimension for ``Family.SPHERE``, projective dimension otherwise.
    """

    family: Family
    d: int

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or isinstance(self.d, bool):
            raise DomainError(f"dimension must be an integer, got {self.d!r}")
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d}")
        if self.family is Family.OCTO and self.d > 2:
            raise DomainError("octonionic projective space exists only for d in {1, 2}")
        object.__setattr__(self, "d", int(self.d))

    @classmethod
    def parse(cls, spec: str) -> "SpaceDescriptor":
        """Parse a spec string such as ``"RP:2"`` or ``"S:3"``."""
        m = _SPEC_RE.match(spec)
        if m is None:
            raise ValueError(f"bad space spec {spec!r}; expected e.g. 'S:2' or 'RP:3'")
        return cls(Family(m.group(1)), int(m.group(2)))

    def __str__(self):
        return f"{self.family.value}:{self.d}"

    @property
    def alpha(self) -> Fraction:
        if self.family is Family.SPHERE:
            return Fraction(self.d, 2) - 1
        return Fraction(self.d * FIELD_DIM[self.family], 2) - 1

    @property
    def beta(self) -> Fraction:
        if self.family is Family.SPHERE:
            return self.alpha
        return Fraction(FIELD_DIM[self.family], 2) - 1

    @property
    def D(self) -> int:
        return int(2 * self.alpha + 2)

    @property
    def is_projective(self) -> bool:
        return self.family is not Family.SPHERE

    @property
    def field_dim(self) -> int:
        return FIELD_DIM[self.family]

    @property
    def diameter(self) -> float:
        return np.pi


def space_params(space: SpaceDescriptor) -> tuple[Fraction, Fraction, int]:
    """Return ``(alpha, beta, D)`` as exact rationals."""
    return space.alpha, space.beta, space.D


def _require_points(space: SpaceDescriptor):
    if space.family is Family.OCTO:
        raise UnsupportedSpaceError("point-level operations are not available for OP spaces")


# ---------------------------------------------------------------------------
# quaternions


@dataclass(frozen=True)
class Quaternion:
    w: float
    i: float = 0.0
    j: float = 0.0
    k: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float)
        return cls(*map(float, a))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.i, self.j, self.k])

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(qmul(self.as_array(), other.as_array()))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.as_array() + other.as_array())

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.i, -self.j, -self.k)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


def qmul(p, q):
    """Hamilton product of quaternion arrays with trailing axis of length 4."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, pi, pj, pk = np.moveaxis(p, -1, 0)
    qw, qi, qj, qk = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            pw * qw - pi * qi - pj * qj - pk * qk,
            pw * qi + pi * qw + pj * qk - pk * qj,
            pw * qj - pi * qk + pj * qw + pk * qi,
            pw * qk + pi * qj - pj * qi + pk * qw,
        ],
        axis=-1,
    )


def qconj(q):
    q = np.array(q, dtype=float)
    q[..., 1:] *= -1
    return q


# ---------------------------------------------------------------------------
# inner products and distances


def _sqnorm(space, x):
    if space.family is Family.QUAT:
        return np.sum(x * x, axis=(-2, -1))
    return np.sum(np.abs(x) ** 2, axis=-1)


def inner(space: SpaceDescriptor, x, y):
    """Hermitian inner product ``sum conj(x_k) y_k`` (quaternion-valued for HP)."""
    _require_points(space)
    if space.family is Family.QUAT:
        return np.sum(qmul(qconj(x), y), axis=-2)
    if space.family is Family.COMPLEX:
        return np.sum(np.conj(x) * y, axis=-1)
    return np.sum(x * y, axis=-1)


def _abs_field(space, c):
    if space.family is Family.QUAT:
        return np.linalg.norm(c, axis=-1)
    return np.abs(c)


def _scale_right(space, x, c):
    """Return ``x c`` for a field scalar ``c`` (batched)."""
    if space.family is Family.QUAT:
        return qmul(x, np.asarray(c)[..., None, :])
    return x * np.asarray(c)[..., None]


def inner_modulus(space, x, y):
    return _abs_field(space, inner(space, x, y))


def geodesic_distance(space: SpaceDescriptor, x, y):
    """Geodesic distance with diameter ``pi``.

    Mathematically this is ``arccos(2|<x,y>|^2 - 1)`` on projective spaces
    and ``arccos(x.y)`` on spheres.  Both are evaluated through ``arctan2``
    of orthogonal and parallel components, which keeps full relative
    accuracy near coincident and antipodal pairs.
    """
    _require_points(space)
    x = np.asarray(x)
    y = np.asarray(y)
    if space.family is Family.SPHERE:
        return 2.0 * np.arctan2(np.linalg.norm(x - y, axis=-1), np.linalg.norm(x + y, axis=-1))
    # both orderings, averaged, so that the result is exactly symmetric
    c_xy, c_yx = inner(space, x, y), inner(space, y, x)
    r_xy = np.sqrt(_sqnorm(space, y - _scale_right(space, x, c_xy)))
    r_yx = np.sqrt(_sqnorm(space, x - _scale_right(space, y, c_yx)))
    par = _abs_field(space, c_xy) + _abs_field(space, c_yx)
    return 2.0 * np.arctan2(r_xy + r_yx, par)


def cos_distance(space, x, y):
    """``t = cos(geodesic distance)``, the argument of radial kernels."""
    return np.cos(geodesic_distance(space, x, y))


def pairwise_distances(space: SpaceDescriptor, points) -> np.ndarray:
    """Matrix of geodesic distances; the diagonal is exactly zero."""
    P = np.asarray(points)
    if space.family is Family.QUAT:
        A = geodesic_distance(space, P[:, None, :, :], P[None, :, :, :])
    else:
        A = geodesic_distance(space, P[:, None, :], P[None, :, :])
    np.fill_diagonal(A, 0.0)
    return A


def chordal_distance(space: SpaceDescriptor, x, y):
    scale = 2.0 if space.family is Family.SPHERE else 1.0
    return scale * np.sin(geodesic_distance(space, x, y) / 2.0)


# ---------------------------------------------------------------------------
# construction, sampling, serialization


def _batch_shape(space, x):
    return x.shape[:-2] if space.family is Family.QUAT else x.shape[:-1]


def _gaussian(space, rng, size):
    if size is None:
        shape = ()
    elif np.isscalar(size):
        shape = (int(size),)
    else:
        shape = tuple(size)
    n = space.d + 1
    if space.family is Family.QUAT:
        return rng.standard_normal(shape + (n, 4))
    if space.family is Family.COMPLEX:
        g = rng.standard_normal(shape + (n, 2))
        return g[..., 0] + 1j * g[..., 1]
    return rng.standard_normal(shape + (n,))


def normalize(space, x):
    x = np.asarray(x)
    nrm = np.sqrt(_sqnorm(space, x))
    if space.family is Family.QUAT:
        return x / nrm[..., None, None]
    return x / nrm[..., None]


def canonicalize(space: SpaceDescriptor, x, tiny: float = 1e-14):
    """Canonical representative of a projective point.

    The first coordinate with modulus above ``tiny`` is rotated onto the
    positive real axis.  Spheres are returned unchanged.
    """
    _require_points(space)
    x = np.array(x)
    if space.family is Family.SPHERE:
        return x
    single = x.ndim == (2 if space.family is Family.QUAT else 1)
    if single:
        x = x[None]
    mods = np.linalg.norm(x, axis=-1) if space.family is Family.QUAT else np.abs(x)
    idx = np.argmax(mods > tiny, axis=-1)
    rows = np.arange(x.shape[0])
    lead = x[rows, idx]
    lead_mod = mods[rows, idx]
    if space.family is Family.QUAT:
        u = qconj(lead) / lead_mod[:, None]
        x = qmul(x, u[:, None, :])
    elif space.family is Family.COMPLEX:
        x = x * (np.conj(lead) / lead_mod)[:, None]
    else:
        x = x * np.sign(lead)[:, None]
    return x[0] if single else x


def make_point(space: SpaceDescriptor, coords, atol: float = 1e-12):
    """Validate coordinates as a point of ``space``.

    Raises DomainError if the shape is wrong or the norm is off by more
    than ``atol``.
    """
    _require_points(space)
    if space.family is Family.COMPLEX:
        x = np.asarray(coords, dtype=complex)
    else:
        x = np.asarray(coords, dtype=float)
    want = (space.d + 1, 4) if space.family is Family.QUAT else (space.d + 1,)
    if x.shape[-len(want):] != want:
        raise DomainError(f"expected coordinate shape {want}, got {x.shape}")
    if np.any(np.abs(np.sqrt(_sqnorm(space, x)) - 1.0) > atol):
        raise DomainError("point is not of unit norm")
    return canonicalize(space, x)


def random_point(space: SpaceDescriptor, rng: np.random.Generator, size=None):
    """Uniformly distributed point(s); Gaussian over the field, normalized."""
    _require_points(space)
    return canonicalize(space, normalize(space, _gaussian(space, rng, size)))


def random_orthogonal_unit(space: SpaceDescriptor, x, rng: np.random.Generator):
    """Uniform unit vector in the (field-)orthogonal complement of ``x``."""
    _require_points(space)
    x = np.asarray(x)
    g = _gaussian(space, rng, _batch_shape(space, x))
    v = g - _scale_right(space, x, inner(space, x, g))
    return normalize(space, v)


def point_at_distance(space: SpaceDescriptor, x, angle, v):
    """Point at geodesic distance ``angle`` from ``x`` along unit ``v`` orthogonal to ``x``."""
    a = np.asarray(angle, dtype=float)
    if space.is_projective:
        a = a / 2.0
    ca, sa = np.cos(a), np.sin(a)
    if space.family is Family.QUAT:
        ca, sa = ca[..., None, None], sa[..., None, None]
    else:
        ca, sa = ca[..., None], sa[..., None]
    return ca * x + sa * v


def point_to_flat(space: SpaceDescriptor, x) -> list[float]:
    """Flat real coordinates: C interleaved re/im, H as consecutive 4-tuples."""
    x = np.asarray(x)
    if space.family is Family.COMPLEX:
        return np.stack([x.real, x.imag], axis=-1).reshape(-1).tolist()
    return x.reshape(-1).astype(float).tolist()


def point_from_flat(space: SpaceDescriptor, flat) -> np.ndarray:
    a = np.asarray(flat, dtype=float)
    n = space.d + 1
    if space.family is Family.COMPLEX:
        a = a.reshape(n, 2)
        return make_point(space, a[:, 0] + 1j * a[:, 1])
    if space.family is Family.QUAT:
        return make_point(space, a.reshape(n, 4))
    return make_point(space, a.reshape(n))


def standard_basis(space: SpaceDescriptor) -> np.ndarray:
    """The points ``e_0, ..., e_d``; mutually diametral on projective spaces."""
    _require_points(space)
    n = space.d + 1
    if space.family is Family.QUAT:
        E = np.zeros((n, n, 4))
        E[np.arange(n), np.arange(n), 0] = 1.0
        return E
    E = np.eye(n)
    return E.astype(complex) if space.family is Family.COMPLEX else E


# ---------------------------------------------------------------------------
# the isometry FP^1 -> S^D


def isometry_tau(field: str, a, b) -> np.ndarray:
    """Map ``[(a, b)]`` in FP^1 to the sphere ``S^{dim_R F}``.

    For ``a != 0`` the point is ``[(1, x)]`` with ``x = b a^{-1}`` and the
    image is ``(1 - |x|^2, 2x) / (1 + |x|^2)``.  Written with ``b conj(a)``
    the same formula covers ``a = 0``, which lands on ``(-1, 0, ..., 0)``.
    """
    field = field.upper()
    if field not in ("R", "C", "H"):
        raise UnsupportedSpaceError(f"isometry not available for field {field!r}")
    if field == "H":
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        na, nb = np.sum(a * a, axis=-1), np.sum(b * b, axis=-1)
        prod = qmul(b, qconj(a))
    elif field == "C":
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        na, nb = np.abs(a) ** 2, np.abs(b) ** 2
        z = b * np.conj(a)
        prod = np.stack([z.real, z.imag], axis=-1)
    else:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        na, nb = a * a, b * b
        prod = (a * b)[..., None]
    total = na + nb
    if np.any(total == 0):
        raise DomainError("zero vector does not represent a projective point")
    head = ((na - nb) / total)[..., None]
    return np.concatenate([head, 2.0 * prod / total[..., None]], axis=-1)
