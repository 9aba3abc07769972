from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riesz.errors import DomainError, UnsupportedSpaceError
from riesz.spaces import (
    Family,
    Quaternion,
    SpaceDescriptor,
    canonicalize,
    chordal_distance,
    geodesic_distance,
    isometry_tau,
    make_point,
    pairwise_distances,
    point_from_flat,
    point_to_flat,
    qmul,
    random_point,
    space_params,
    standard_basis,
)

ALL_SPACES = [
    SpaceDescriptor(fam, d)
    for fam in (Family.SPHERE, Family.REAL, Family.COMPLEX, Family.QUAT)
    for d in (1, 2, 3, 5)
] + [SpaceDescriptor(Family.OCTO, 1), SpaceDescriptor(Family.OCTO, 2)]
POINT_SPACES = [sp for sp in ALL_SPACES if sp.family is not Family.OCTO]

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def _unit_scalar(space, rng):
    if space.family is Family.QUAT:
        q = rng.standard_normal(4)
        return q / np.linalg.norm(q)
    if space.family is Family.COMPLEX:
        return np.exp(1j * rng.uniform(0, 2 * np.pi))
    return -1.0


def _times_scalar(space, x, c):
    if space.family is Family.QUAT:
        return qmul(x, np.broadcast_to(c, x.shape))
    return x * c


@pytest.mark.parametrize(
    "spec, expected",
    [
        ("S:2", (0, 0, 2)),
        ("RP:2", (0, Fraction(-1, 2), 2)),
        ("OP:2", (7, 3, 16)),
        ("OP:1", (3, 3, 8)),
        ("CP:2", (1, 0, 4)),
        ("HP:2", (3, 1, 8)),
        ("S:3", (Fraction(1, 2), Fraction(1, 2), 3)),
    ],
)
def test_space_params_table(spec, expected):
    assert space_params(SpaceDescriptor.parse(spec)) == expected


@pytest.mark.parametrize("space", ALL_SPACES, ids=str)
def test_params_structure(space):
    a, b, D = space_params(space)
    assert isinstance(a, Fraction) and isinstance(b, Fraction)
    assert D == 2 * a + 2
    assert a >= Fraction(-1, 2) and b >= Fraction(-1, 2)
    if space.is_projective:
        assert D == space.d * space.field_dim
    assert SpaceDescriptor.parse(str(space)) == space


@pytest.mark.parametrize("bad", [(Family.OCTO, 3), (Family.REAL, 0), (Family.SPHERE, -1)])
def test_rejects_inadmissible(bad):
    with pytest.raises(DomainError):
        SpaceDescriptor(*bad)


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        SpaceDescriptor.parse("XP:2")


def test_distance_examples():
    rp2 = SpaceDescriptor.parse("RP:2")
    e = standard_basis(rp2)
    assert geodesic_distance(rp2, e[0], e[0]) == 0.0
    assert geodesic_distance(rp2, e[0], e[1]) == pytest.approx(np.pi, abs=1e-15)
    cp1 = SpaceDescriptor.parse("CP:1")
    x = np.array([1, 0], dtype=complex)
    y = np.array([1, 1j]) / np.sqrt(2)
    assert geodesic_distance(cp1, x, y) == pytest.approx(np.pi / 2, abs=1e-15)


@pytest.mark.parametrize("space", POINT_SPACES, ids=str)
def test_identity_distance_is_zero(space):
    x = random_point(space, np.random.default_rng(3))
    assert geodesic_distance(space, x, x) == pytest.approx(0.0, abs=1e-14)
    assert chordal_distance(space, x, x) == pytest.approx(0.0, abs=1e-14)


def test_chordal_examples():
    rp2 = SpaceDescriptor.parse("RP:2")
    e = standard_basis(rp2)
    assert chordal_distance(rp2, e[0], e[1]) == pytest.approx(1.0, abs=1e-15)
    s2 = SpaceDescriptor.parse("S:2")
    x = np.array([0.0, 0.0, 1.0])
    assert chordal_distance(s2, x, -x) == pytest.approx(2.0, abs=1e-15)


def test_octonionic_points_unsupported():
    op = SpaceDescriptor.parse("OP:2")
    with pytest.raises(UnsupportedSpaceError):
        random_point(op, np.random.default_rng(0))
    with pytest.raises(UnsupportedSpaceError):
        geodesic_distance(op, np.zeros(3), np.zeros(3))


@pytest.mark.parametrize(
    "field, a, b, expected",
    [
        ("R", 0.0, 1.0, [-1, 0]),
        ("R", 1.0, 0.0, [1, 0]),
        ("R", 1 / np.sqrt(2), 1 / np.sqrt(2), [0, 1]),
        ("C", 0.0, 1.0, [-1, 0, 0]),
        ("C", 1.0, 0.0, [1, 0, 0]),
        ("H", [0, 0, 0, 0], [1, 0, 0, 0], [-1, 0, 0, 0, 0]),
    ],
)
def test_isometry_tau_examples(field, a, b, expected):
    np.testing.assert_allclose(isometry_tau(field, a, b), expected, atol=1e-15)


def test_isometry_tau_errors():
    with pytest.raises(DomainError):
        isometry_tau("R", 0.0, 0.0)
    with pytest.raises(UnsupportedSpaceError):
        isometry_tau("O", 1.0, 0.0)


@pytest.mark.parametrize("field", ["R", "C", "H"])
def test_isometry_preserves_distance(field):
    rng = np.random.default_rng(11)
    line = SpaceDescriptor(
        {"R": Family.REAL, "C": Family.COMPLEX, "H": Family.QUAT}[field], 1
    )
    sphere = SpaceDescriptor(Family.SPHERE, line.field_dim)
    P = random_point(line, rng, 1000)
    Q = random_point(line, rng, 1000)
    tp = isometry_tau(field, P[:, 0], P[:, 1])
    tq = isometry_tau(field, Q[:, 0], Q[:, 1])
    np.testing.assert_allclose(np.linalg.norm(tp, axis=-1), 1.0, atol=1e-14)
    dev = np.abs(geodesic_distance(line, P, Q) - geodesic_distance(sphere, tp, tq))
    assert dev.max() < 1e-10


def test_random_point_basics():
    s2 = SpaceDescriptor.parse("S:2")
    rng = np.random.default_rng(5)
    x, y = random_point(s2, rng), random_point(s2, rng)
    assert not np.allclose(x, y)
    assert np.linalg.norm(x) == pytest.approx(1.0, abs=1e-12)
    again = random_point(s2, np.random.default_rng(5))
    np.testing.assert_array_equal(again, x)


def test_random_point_moments():
    rng = np.random.default_rng(2024)
    s2 = SpaceDescriptor.parse("S:2")
    X = random_point(s2, rng, 10_000)
    e = np.array([0.0, 0.6, 0.8])
    assert abs(np.mean(X @ e)) < 3 / np.sqrt(10_000)
    rp2 = SpaceDescriptor.parse("RP:2")
    Y = random_point(rp2, rng, 10_000)
    t = np.cos(geodesic_distance(rp2, Y, standard_basis(rp2)[0]))
    assert np.mean(t) == pytest.approx(-1 / 3, abs=0.05)


@pytest.mark.parametrize("space", POINT_SPACES, ids=str)
def test_unit_norm_and_canonical(space):
    X = random_point(space, np.random.default_rng(8), 50)
    flat = np.array([point_to_flat(space, x) for x in X])
    np.testing.assert_allclose(np.linalg.norm(flat, axis=1), 1.0, atol=1e-12)
    back = np.array([point_from_flat(space, f) for f in flat])
    np.testing.assert_allclose(back, X, atol=1e-15)


@pytest.mark.parametrize("space", [sp for sp in POINT_SPACES if sp.is_projective], ids=str)
def test_phase_equivalent_points_canonicalize_equal(space):
    rng = np.random.default_rng(9)
    x = random_point(space, rng)
    y = _times_scalar(space, x, _unit_scalar(space, rng))
    np.testing.assert_allclose(canonicalize(space, y), x, atol=1e-12)
    np.testing.assert_allclose(make_point(space, y), x, atol=1e-12)


def test_make_point_validates():
    s2 = SpaceDescriptor.parse("S:2")
    with pytest.raises(DomainError):
        make_point(s2, [1.0, 1.0, 0.0])
    with pytest.raises(DomainError):
        make_point(s2, [1.0, 0.0])


def test_pairwise_diagonal_exact():
    rp3 = SpaceDescriptor.parse("RP:3")
    A = pairwise_distances(rp3, random_point(rp3, np.random.default_rng(1), 7))
    assert np.all(np.diag(A) == 0.0)
    np.testing.assert_array_equal(A, A.T)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, which=st.sampled_from(POINT_SPACES))
def test_distance_symmetry_and_triangle(seed, which):
    rng = np.random.default_rng(seed)
    x, y, z = (random_point(which, rng) for _ in range(3))
    dxy = geodesic_distance(which, x, y)
    assert dxy == geodesic_distance(which, y, x)
    assert 0.0 <= dxy <= np.pi
    assert dxy <= geodesic_distance(which, x, z) + geodesic_distance(which, z, y) + 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=seeds, which=st.sampled_from([sp for sp in POINT_SPACES if sp.is_projective]))
def test_phase_invariance(seed, which):
    rng = np.random.default_rng(seed)
    x, y = random_point(which, rng), random_point(which, rng)
    y2 = _times_scalar(which, y, _unit_scalar(which, rng))
    assert abs(geodesic_distance(which, x, y) - geodesic_distance(which, x, y2)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=seeds)
def test_rp1_distance_is_twice_acute_angle(seed):
    rng = np.random.default_rng(seed)
    s1 = SpaceDescriptor.parse("S:1")
    x, y = random_point(s1, rng), random_point(s1, rng)
    u = float(x @ y)
    twice_acute = 2 * np.arccos(abs(u))
    rp1 = SpaceDescriptor.parse("RP:1")
    assert abs(np.arccos(np.clip(2 * u * u - 1, -1, 1)) - twice_acute) < 1e-12
    assert abs(geodesic_distance(rp1, x, y) - twice_acute) < 1e-12


finite = st.floats(min_value=-10, max_value=10, allow_nan=False)
quats = st.tuples(finite, finite, finite, finite).map(lambda a: Quaternion(*a))


@given(p=quats, q=quats)
def test_quaternion_norm_multiplicative(p, q):
    assert abs((p * q).norm() - p.norm() * q.norm()) <= 1e-12 * max(1.0, p.norm() * q.norm())


@given(p=quats, q=quats, r=quats)
def test_quaternion_associative(p, q, r):
    lhs = ((p * q) * r).as_array()
    rhs = (p * (q * r)).as_array()
    scale = max(1.0, p.norm() * q.norm() * r.norm())
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


def test_quaternion_units():
    i, j, k = Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1)
    assert (i * j).as_array().tolist() == k.as_array().tolist()
    assert (j * i).as_array().tolist() == (-k.as_array()).tolist()
    assert (i * i).as_array().tolist() == [-1, 0, 0, 0]
