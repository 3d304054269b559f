from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfcurves import exact
from pfcurves.exact import UniPoly
from pfcurves.interp import (
    CurveMap,
    FibreKind,
    MarkedConfig,
    RankPreconditionError,
    alternating_config,
    build_rescaled_skew,
    cauchy_pfaffian,
    interpolate_pn,
    kernel_via_pfaffians,
    lagrange_basis,
    node_products,
    pn_fibre,
    solve_quadric_fibre,
    verify_on_quadric,
    wedge_condition_matrix,
)
from pfcurves.quadrics import ProjPoint, make_rng, sample_quadric_point, split_quadric

from conftest import (
    augmented_pn_system,
    derivative_condition_matrix,
    random_skew_of_rank,
    rationals,
    skew_matrices,
)

Q3 = split_quadric(3)


def e(i, size=5):
    return tuple(Fraction(int(k == i)) for k in range(size))


def config(z, pts):
    return MarkedConfig(exact.vector(z), tuple(exact.vector(p) for p in pts))


def random_quadric_config(quad, d, seed, box=1000):
    rng = make_rng([seed, d])
    z = []
    while len(z) < d + 1:
        x = Fraction(int(rng.integers(-box, box + 1)), int(rng.integers(1, box + 1)))
        if x not in z:
            z.append(x)
    pts = tuple(sample_quadric_point(quad, rng, box).primitive() for _ in range(d + 1))
    return MarkedConfig(tuple(z), pts)


# ---------------------------------------------------------------------------
# Lagrange interpolation


def test_lagrange_examples():
    assert lagrange_basis([0, 1], 0) == UniPoly((1, -1))
    assert lagrange_basis([0, 1, 2], 1) == UniPoly((0, 2, -1))
    total = sum((lagrange_basis([0, 1, 2, 3], i) for i in range(4)), UniPoly())
    assert total == UniPoly.constant(1)
    with pytest.raises(ValueError):
        lagrange_basis([0, 0], 0)


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals, min_size=1, max_size=6, unique=True))
def test_lagrange_kronecker_property(z):
    for i in range(len(z)):
        li = lagrange_basis(z, i)
        assert li.degree == len(z) - 1 or len(z) == 1
        assert [li(x) for x in z] == [int(i == j) for j in range(len(z))]


def test_marked_config_validation():
    with pytest.raises(ValueError):
        config([0, 0], [[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        config([0, 1], [[1, 0]])
    with pytest.raises(ValueError):
        config([0, 1], [[1, 0], [0, 0]])
    with pytest.raises(ValueError):
        MarkedConfig.from_json({"z": ["inf", "0"], "points": [["1"], ["1"]]})
    c = config([0, "1/2"], [[1, 2], [3, 4]])
    assert MarkedConfig.from_json(json.loads(json.dumps(c.to_json()))) == c
    assert node_products(c.z) == (Fraction(-1, 2), Fraction(1, 2))


def test_interpolate_conic_through_coordinate_points():
    c = config([0, 1, 2], [e(i, 3) for i in range(3)])
    curve = interpolate_pn(c, [1, 1, 1])
    assert curve.components == tuple(lagrange_basis([0, 1, 2], i) for i in range(3))
    with pytest.raises(ValueError):
        interpolate_pn(c, [1, 1])


def test_degenerate_member_misses_its_point():
    c = config([0, 1, 2], [e(i, 3) for i in range(3)])
    curve = interpolate_pn(c, [0, 1, 1])
    assert not curve.passes_through_all()
    assert exact.is_zero_vector(tuple(p(0) for p in curve.components))


def test_line_through_two_points():
    c = config([0, 1], [[1, 0, 2], [0, 1, 1]])
    line = interpolate_pn(c, [1, 1])
    assert line.degree == 1
    assert line("1/2").coords == (1, 1, 3)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_interpolated_curves_pass_through_marks(data):
    d = data.draw(st.integers(1, 4))
    z = data.draw(st.lists(rationals, min_size=d + 1, max_size=d + 1, unique=True))
    pts = [data.draw(st.lists(st.integers(-5, 5), min_size=3, max_size=3).filter(any)) for _ in range(d + 1)]
    lam = data.draw(st.lists(rationals.filter(bool), min_size=d + 1, max_size=d + 1))
    curve = interpolate_pn(config(z, pts), lam)
    assert all(p.degree <= d for p in curve.components)
    for zi, vi in zip(z, pts):
        assert curve(zi) == ProjPoint(exact.vector(vi))
    assert CurveMap.from_json(json.loads(json.dumps(curve.to_json()))) == curve


# ---------------------------------------------------------------------------
# P^n fibres


def test_pn_fibre_without_extra_points():
    for d in range(1, 5):
        c = config(list(range(d + 1)), [[1, i, i * i] for i in range(d + 1)])
        fd = pn_fibre(c)
        assert fd.dim == d
        assert fd.kind is (FibreKind.PENCIL if d == 1 else FibreKind.FAMILY)


def test_pn_worked_conic():
    c = config([0, 1, 2], [e(i, 3) for i in range(3)])
    extra = config([3], [[1, 1, 1]])
    fd = pn_fibre(c, extra)
    assert fd.kind is FibreKind.UNIQUE_CURVE
    (lam,) = fd.kernel
    assert exact.same_span([lam], [exact.vector([1, "-1/3", "1/3"])])
    assert fd.hypotheses == {"degree_bound": True, "wedge_rank": True}
    # oracle: the augmented system has a one-dimensional solution space
    assert len(exact.kernel_basis(augmented_pn_system(c, extra))) == 1


def test_pn_no_line_through_three_general_points():
    c = config([0, 1], [[1, 0, 0], [0, 1, 0]])
    fd = pn_fibre(c, config([2], [[0, 0, 1]]))
    assert fd.kind is FibreKind.EMPTY
    assert fd.dim is None


def test_pn_rejects_shared_parameters():
    c = config([0, 1], [[1, 0, 0], [0, 1, 0]])
    with pytest.raises(ValueError):
        pn_fibre(c, config([1], [[0, 0, 1]]))


@pytest.mark.parametrize("seed", range(40))
def test_pn_fibre_matches_augmented_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    m = rng.randint(0, 2)
    d = max(1, n * m + rng.randint(0, 2))
    z = rng.sample(range(-30, 30), d + 1 + m)
    pts = [[rng.randint(-4, 4) or 1 for _ in range(n + 1)] for _ in range(d + 1 + m)]
    c = config(z[: d + 1], pts[: d + 1])
    extra = config(z[d + 1 :], pts[d + 1 :])
    fd = pn_fibre(c, extra)
    nullity = len(exact.kernel_basis(augmented_pn_system(c, extra))) if m else d + 1
    assert fd.kernel_dim == nullity
    if m:
        assert fd.kernel_dim == d + 1 - exact.rank(wedge_condition_matrix(c, extra))
    assert fd.hypotheses["degree_bound"] == (d >= n * m)


# ---------------------------------------------------------------------------
# rescaled skew matrix and Pfaffian kernels


def test_build_skew_examples():
    a = build_rescaled_skew(Q3, config([0, 1], [e(0), e(1)])).matrix
    assert a == exact.matrix([[0, 1], [-1, 0]])
    a = build_rescaled_skew(Q3, config([0, 1, 2, 3], [e(0), e(1), e(0), e(1)])).matrix
    assert (a[0][1], a[0][3], a[1][2], a[2][3]) == (1, Fraction(1, 3), 1, 1)
    assert a[0][2] == 0 and a[1][3] == 0
    a = build_rescaled_skew(Q3, config([0, 1, 5], [e(0)] * 3)).matrix
    assert a == exact.zeros(3, 3)


def test_kernel_via_pfaffians_examples():
    (v,) = kernel_via_pfaffians(exact.skew_from_upper(3, [1, 2, 3]))
    assert v == exact.vector([-3, 2, -1])
    basis = kernel_via_pfaffians(exact.skew_from_upper(4, [1, 0, 0, 0, 0, 0]))
    assert exact.same_span(basis, [e(2, 4), e(3, 4)])
    with pytest.raises(RankPreconditionError, match="corank 0"):
        kernel_via_pfaffians(exact.skew_from_upper(2, [1]))


@pytest.mark.parametrize("size", range(3, 10))
def test_kernel_via_pfaffians_spans_kernel(size):
    rng = random.Random(size)
    r = size - 1 if size % 2 else size - 2
    for _ in range(6):
        a = random_skew_of_rank(rng, size, r)
        ours = kernel_via_pfaffians(a)
        for v in ours:
            assert exact.is_zero_vector(exact.matvec(a, v))
        assert exact.same_span(ours, exact.kernel_basis(a))


@settings(max_examples=60, deadline=None)
@given(skew_matrices(min_size=1, max_size=7))
def test_kernel_via_pfaffians_precondition(a):
    size = len(a)
    corank = size - exact.rank(a)
    if corank == (1 if size % 2 else 2):
        assert exact.same_span(kernel_via_pfaffians(a), exact.kernel_basis(a))
    else:
        with pytest.raises(RankPreconditionError):
            kernel_via_pfaffians(a)


# ---------------------------------------------------------------------------
# quadric fibres


def test_no_line_through_two_general_points():
    fd = solve_quadric_fibre(Q3, config([0, 1], [e(0), e(1)]))
    assert fd.kind is FibreKind.EMPTY
    assert fd.witnesses == []


def test_line_on_quadric_gives_a_pencil_of_parametrizations():
    fd = solve_quadric_fibre(Q3, config([0, 1], [e(0), e(2)]))
    assert fd.kernel_dim == 2
    assert fd.kind is FibreKind.PENCIL
    assert fd.witnesses == [[]]
    assert all(verify_on_quadric(Q3, c) for c in fd.representatives)


def test_general_conic_is_unique():
    fd = solve_quadric_fibre(Q3, random_quadric_config(Q3, 2, seed=1))
    assert fd.kind is FibreKind.UNIQUE_CURVE
    (curve,) = fd.representatives
    assert verify_on_quadric(Q3, curve)
    assert curve.passes_through_all()


def test_off_quadric_point_rejected():
    with pytest.raises(ValueError, match="point 1"):
        solve_quadric_fibre(Q3, config([0, 1], [e(0), e(4)]))


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("d", range(1, 7))
def test_fibre_agrees_with_derivative_oracle(n, d):
    quad = split_quadric(n)
    cfg = random_quadric_config(quad, d, seed=100 * n + d)
    fd = solve_quadric_fibre(quad, cfg)
    m = derivative_condition_matrix(quad, cfg)
    oracle = exact.kernel_basis(m)
    assert fd.kernel_dim == len(oracle)
    zeta = cfg.zeta
    assert exact.same_span([tuple(a * b for a, b in zip(zeta, mu)) for mu in fd.kernel], oracle)
    assert fd.kind is (FibreKind.EMPTY if d % 2 else FibreKind.UNIQUE_CURVE)
    for curve in fd.representatives:
        assert exact.is_zero_vector(exact.matvec(m, curve.lam))
        assert verify_on_quadric(quad, curve)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_kind_matches_kernel_data(seed, d):
    cfg = random_quadric_config(Q3, d, seed)
    # force some structure: repeat a point so the rank drops sometimes
    if seed % 3 == 0 and d >= 2:
        cfg = MarkedConfig(cfg.z, (cfg.v[0],) + cfg.v[:-1])
    fd = solve_quadric_fibre(Q3, cfg)
    if fd.kind is FibreKind.EMPTY:
        assert fd.kernel_dim == 0 or not fd.nonvanishing_ok
    else:
        assert fd.nonvanishing_ok
        assert fd.kind is {1: FibreKind.UNIQUE_CURVE, 2: FibreKind.PENCIL}.get(fd.kernel_dim, FibreKind.FAMILY)
        assert fd.dim == fd.kernel_dim - 1
        assert any(c.passes_through_all() for c in fd.representatives)
    for c in fd.representatives:
        assert verify_on_quadric(Q3, c)


def test_verify_on_quadric_examples():
    q1 = split_quadric(1)
    c = config([0, 1, 2], [[1, 1, 1], [1, 2, 3], [2, 1, 5]])
    assert not verify_on_quadric(q1, interpolate_pn(c, [1, 1, 1]))
    constant = interpolate_pn(config([0, 1], [e(0), e(0)]), [1, 1])
    assert verify_on_quadric(Q3, constant)
    with pytest.raises(ValueError):
        verify_on_quadric(q1, constant)


def test_fibre_json_shape():
    fd = solve_quadric_fibre(Q3, random_quadric_config(Q3, 2, seed=3))
    doc = json.loads(json.dumps(fd.to_json()))
    assert doc["kind"] == "UniqueCurve"
    assert doc["kernel_dim"] == 1 and doc["dim"] == 0
    assert doc["witnesses"] == {"vanishing_minors": []}
    assert all(isinstance(x, str) for x in doc["lambda"][0])


# ---------------------------------------------------------------------------
# closed-form Pfaffian


def test_cauchy_small_values():
    assert cauchy_pfaffian([0, 1]) == 1
    assert cauchy_pfaffian([0, 1, 2, 3]) == Fraction(4, 3)
    with pytest.raises(ValueError):
        cauchy_pfaffian([0, 1, 2])
    with pytest.raises(ValueError):
        cauchy_pfaffian([0, 0])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(lambda k: st.lists(rationals, min_size=2 * k, max_size=2 * k, unique=True)))
def test_cauchy_matches_direct_pfaffian(z):
    a = build_rescaled_skew(Q3, alternating_config(Q3, z)).matrix
    assert exact.pfaffian(a) == cauchy_pfaffian(z)


def test_alternating_config_requires_hyperbolic_pair():
    with pytest.raises(ValueError):
        alternating_config(Q3, [0, 1], u=e(0), v=e(2))


@pytest.mark.parametrize("d", range(1, 10))
def test_alternating_configuration_has_maximal_rank(d):
    rng = random.Random(d)
    for _ in range(5):
        z = rng.sample(range(-100, 100), d + 1)
        a = build_rescaled_skew(Q3, alternating_config(Q3, z)).matrix
        assert exact.rank(a) == (d + 1 if d % 2 else d)
