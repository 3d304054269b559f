"""Interpolation of rational curves through marked points.

A degree-d map P^1 -> P^n sending ``[z_i : 1]`` to ``[v_i]`` for
``i = 0..d`` is ``P(z) = sum_i lam_i L_i(z) v_i`` with every ``lam_i``
nonzero, where ``L_i`` is the Lagrange basis on the nodes ``z``.

On a quadric, ``q(P(z))`` vanishes identically exactly when the points lie
on the quadric and ``mu = (lam_i / zeta_i)_i`` is in the kernel of the
rescaled skew matrix ``A_ij = B(v_i, v_j) / (z_j - z_i)``, where
``zeta_i = prod_{k != i} (z_i - z_k)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from . import exact
from .exact import Matrix, RatLike, UniPoly, Vector, vector, vector_to_json
from .quadrics import QuadSpace, curve_point, on_quadric


class FibreKind(str, enum.Enum):
    EMPTY = "Empty"
    UNIQUE_CURVE = "UniqueCurve"
    PENCIL = "Pencil"
    FAMILY = "Family"


class RankPreconditionError(ValueError):
    """The Pfaffian kernel formulas need corank 1 (odd) or 2 (even)."""

    def __init__(self, size: int, corank: int) -> None:
        expected = 1 if size % 2 else 2
        super().__init__(
            f"skew matrix of size {size} has corank {corank}; Pfaffian kernel formula needs corank {expected}"
        )
        self.size = size
        self.corank = corank


@dataclass(frozen=True)
class MarkedConfig:
    """Affine parameters ``z`` paired with representative vectors ``v``."""

    z: tuple[Fraction, ...]
    v: tuple[Vector, ...]

    def __post_init__(self) -> None:
        z = vector(self.z)
        v = tuple(vector(x) for x in self.v)
        if len(z) != len(v):
            raise ValueError(f"{len(z)} parameters but {len(v)} points")
        if len(set(z)) != len(z):
            raise ValueError("marked parameters must be pairwise distinct")
        if v and any(len(x) != len(v[0]) for x in v):
            raise ValueError("points must share one ambient dimension")
        if any(exact.is_zero_vector(x) for x in v):
            raise ValueError("zero vector does not represent a point")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "v", v)

    def __len__(self) -> int:
        return len(self.z)

    @property
    def ambient_len(self) -> int:
        return len(self.v[0]) if self.v else 0

    @property
    def zeta(self) -> tuple[Fraction, ...]:
        return node_products(self.z)

    def to_json(self) -> dict:
        return {"z": vector_to_json(self.z), "points": [vector_to_json(x) for x in self.v]}

    @classmethod
    def from_json(cls, data: dict) -> MarkedConfig:
        if not isinstance(data, dict) or "z" not in data or "points" not in data:
            raise ValueError('configuration JSON needs "z" and "points"')
        for z in data["z"]:
            if isinstance(z, str) and z.strip().lower() in {"inf", "infinity", "oo"}:
                raise ValueError("the point at infinity is not allowed; re-coordinate first")
        return cls(vector(data["z"]), tuple(vector(p) for p in data["points"]))


def node_products(z: Sequence[Fraction]) -> tuple[Fraction, ...]:
    out = []
    for i, zi in enumerate(z):
        prod = Fraction(1)
        for k, zk in enumerate(z):
            if k != i:
                prod *= zi - zk
        out.append(prod)
    return tuple(out)


@dataclass(frozen=True)
class CurveMap:
    """A parametrized degree-``degree`` curve ``P(z) = sum lam_i L_i(z) v_i``."""

    degree: int
    lam: tuple[Fraction, ...]
    config: MarkedConfig
    components: tuple[UniPoly, ...]

    def __call__(self, t: RatLike):
        return curve_point(self, t)

    def passes_through_all(self) -> bool:
        return all(l != 0 for l in self.lam)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "lambda": vector_to_json(self.lam),
            "config": self.config.to_json(),
            "components": [p.to_json() for p in self.components],
        }

    @classmethod
    def from_json(cls, data: dict) -> CurveMap:
        config = MarkedConfig.from_json(data["config"])
        return interpolate_pn(config, vector(data["lambda"]))


@dataclass
class FibreDescription:
    """Classified solution set of an interpolation problem.

    ``kernel`` holds the basis of admissible coefficient vectors (``mu`` for
    quadric fibres, ``lam`` for P^n fibres). ``witnesses`` records Pfaffian
    minors that vanished although the generic case predicts otherwise, as
    lists of removed indices; ``[]`` means the full Pfaffian.
    """

    kind: FibreKind
    kernel_dim: int
    nonvanishing_ok: bool
    kernel: list[Vector]
    representatives: list[CurveMap] = field(default_factory=list)
    violating_members: list[int] = field(default_factory=list)
    witnesses: list[list[int]] = field(default_factory=list)
    rank: int | None = None
    hypotheses: dict | None = None

    @property
    def dim(self) -> int | None:
        if self.kind is FibreKind.EMPTY:
            return None
        return self.kernel_dim - 1

    def to_json(self) -> dict:
        out = {
            "kind": self.kind.value,
            "kernel_dim": self.kernel_dim,
            "dim": self.dim,
            "rank": self.rank,
            "nonvanishing_ok": self.nonvanishing_ok,
            "kernel": [vector_to_json(v) for v in self.kernel],
            "lambda": [vector_to_json(c.lam) for c in self.representatives],
            "violating_members": self.violating_members,
            "witnesses": {"vanishing_minors": self.witnesses},
        }
        if self.hypotheses is not None:
            out["hypotheses"] = self.hypotheses
        return out


# ---------------------------------------------------------------------------
# P^n


def lagrange_basis(z: Sequence[RatLike], i: int) -> UniPoly:
    """``L_i(z) = prod_{j != i} (z - z_j) / (z_i - z_j)``."""
    nodes = vector(z)
    if len(set(nodes)) != len(nodes):
        raise ValueError("Lagrange nodes must be pairwise distinct")
    if not 0 <= i < len(nodes):
        raise IndexError(f"basis index {i} out of range")
    poly = UniPoly.constant(1)
    denom = Fraction(1)
    for j, zj in enumerate(nodes):
        if j == i:
            continue
        poly = poly * UniPoly.linear_root(zj)
        denom *= nodes[i] - zj
    return poly * (1 / denom)


def interpolate_pn(config: MarkedConfig, lam: Sequence[RatLike]) -> CurveMap:
    lam = vector(lam)
    if len(lam) != len(config):
        raise ValueError(f"need {len(config)} coefficients, got {len(lam)}")
    basis = [lagrange_basis(config.z, i) for i in range(len(config))]
    components = []
    for coord in range(config.ambient_len):
        poly = UniPoly()
        for i, (li, vi) in enumerate(zip(basis, config.v)):
            c = lam[i] * vi[coord]
            if c != 0:
                poly = poly + li * c
        components.append(poly)
    return CurveMap(len(config) - 1, lam, config, tuple(components))


def _wedge_rows(u: Sequence[Fraction], w: Sequence[Fraction]) -> list[Fraction]:
    return [u[a] * w[b] - u[b] * w[a] for a, b in combinations(range(len(u)), 2)]


def wedge_condition_matrix(config: MarkedConfig, extra: MarkedConfig) -> Matrix:
    """Linear conditions on ``lam`` forcing ``P(z_j)`` parallel to ``v_j``.

    One block of C(n+1, 2) rows per extra point: the Pluecker coordinates
    of ``P(z_j) ^ v_j``, each linear in ``lam``.
    """
    rows: list[list[Fraction]] = []
    for zj, vj in zip(extra.z, extra.v):
        cols = []
        for i, vi in enumerate(config.v):
            li = lagrange_basis(config.z, i)(zj)
            cols.append([li * x for x in _wedge_rows(vi, vj)])
        rows.extend(list(r) for r in zip(*cols))
    return tuple(tuple(r) for r in rows)


def _wedge_rank_condition(config: MarkedConfig, extra: MarkedConfig) -> bool:
    d1 = len(config)
    for vj in extra.v:
        cols = [_wedge_rows(vi, vj) for vi in config.v]
        full = exact.rank(exact.transpose(tuple(map(tuple, cols))))
        for i in range(d1):
            rest = [c for k, c in enumerate(cols) if k != i]
            if not rest:
                if full != 0:
                    return False
                continue
            if exact.rank(exact.transpose(tuple(map(tuple, rest)))) != full:
                return False
    return True


def _interior_combination(basis: Sequence[Vector]) -> Vector | None:
    """A combination of ``basis`` with no zero coordinate, found deterministically.

    Each coordinate of ``sum_k t**k b_k`` is a polynomial of degree below
    ``len(basis)``, so scanning ``t = 1, 2, ...`` succeeds within
    ``len(b) * len(basis)`` steps unless a coordinate vanishes on the span.
    """
    if not basis:
        return None
    length = len(basis[0])
    if any(all(b[i] == 0 for b in basis) for i in range(length)):
        return None
    for t in range(1, length * len(basis) + 2):
        v = tuple(sum((Fraction(t) ** k * b[i] for k, b in enumerate(basis)), Fraction(0)) for i in range(length))
        if all(x != 0 for x in v):
            return v
    raise AssertionError("interior combination search exhausted")  # unreachable by the degree bound


def _classify(kernel_dim: int, ok: bool) -> FibreKind:
    if not ok or kernel_dim == 0:
        return FibreKind.EMPTY
    if kernel_dim == 1:
        return FibreKind.UNIQUE_CURVE
    if kernel_dim == 2:
        return FibreKind.PENCIL
    return FibreKind.FAMILY


def _representative_coefficients(kernel: list[Vector]) -> tuple[list[Vector], list[int]]:
    reps = []
    violating = []
    for k, b in enumerate(kernel):
        if all(x != 0 for x in b):
            reps.append(b)
        else:
            violating.append(k)
    if violating:
        interior = _interior_combination(kernel)
        if interior is not None:
            reps.append(interior)
    return reps, violating


def pn_fibre(config: MarkedConfig, extra: MarkedConfig | None = None, n: int | None = None) -> FibreDescription:
    """Degree-d curves through d+1 base points and m' extra points of P^n.

    ``d`` is ``len(config) - 1``. The hypotheses ``d >= n m'`` and the
    wedge-rank condition are evaluated and reported, not enforced.
    """
    extra = extra or MarkedConfig((), ())
    if n is None:
        n = config.ambient_len - 1
    if config.ambient_len != n + 1 or (len(extra) and extra.ambient_len != n + 1):
        raise ValueError(f"points must have {n + 1} coordinates")
    if set(config.z) & set(extra.z):
        raise ValueError("extra parameters must differ from the base parameters")
    d = len(config) - 1
    d1 = d + 1
    if len(extra):
        conditions = wedge_condition_matrix(config, extra)
        kernel = exact.kernel_basis(conditions)
        rk = exact.rank(conditions)
    else:
        kernel = [tuple(Fraction(int(i == j)) for i in range(d1)) for j in range(d1)]
        rk = 0
    ok = bool(kernel) and all(any(b[i] != 0 for b in kernel) for i in range(d1))
    kind = _classify(len(kernel), ok)
    reps, violating = _representative_coefficients(kernel) if ok else ([], list(range(len(kernel))))
    return FibreDescription(
        kind=kind,
        kernel_dim=len(kernel),
        nonvanishing_ok=ok,
        kernel=kernel,
        representatives=[interpolate_pn(config, lam) for lam in reps],
        violating_members=violating,
        rank=rk,
        hypotheses={
            "degree_bound": d >= n * len(extra),
            "wedge_rank": _wedge_rank_condition(config, extra),
        },
    )


# ---------------------------------------------------------------------------
# Quadrics


@dataclass(frozen=True)
class RescaledSkew:
    matrix: Matrix
    source: MarkedConfig
    quad: QuadSpace

    def to_json(self) -> dict:
        return {"matrix": exact.matrix_to_json(self.matrix)}


def build_rescaled_skew(quad: QuadSpace, config: MarkedConfig) -> RescaledSkew:
    if config.ambient_len != quad.dim_ambient and len(config):
        raise ValueError(f"points must have {quad.dim_ambient} coordinates")
    m = len(config)
    rows = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            a = quad.bilinear(config.v[i], config.v[j]) / (config.z[j] - config.z[i])
            rows[i][j] = a
            rows[j][i] = -a
    return RescaledSkew(tuple(map(tuple, rows)), config, quad)


def kernel_via_pfaffians(a: Sequence[Sequence[RatLike]]) -> list[Vector]:
    """Kernel of a skew matrix from its Pfaffian minors.

    Odd size with corank 1: the vector ``((-1)**(i+1) pf(A(i)))_i``.
    Even size with corank 2: the vectors
    ``N_i = ((-1)**(i+j+[j<i]) pf(A(i,j)))_j``, reduced to a basis of two.
    """
    m = exact.skew(a)
    size = len(m)
    corank = size - exact.rank(m)
    if size % 2:
        if corank != 1:
            raise RankPreconditionError(size, corank)
        return [tuple((-1) ** (i + 1) * exact.pfaffian_minor(m, [i]) for i in range(size))]
    if corank != 2:
        raise RankPreconditionError(size, corank)
    spanning = []
    for i in range(size):
        n_i = []
        for j in range(size):
            if i == j:
                n_i.append(Fraction(0))
                continue
            sign = (-1) ** (i + j + (1 if j < i else 0))
            n_i.append(sign * exact.pfaffian_minor(m, [i, j]))
        spanning.append(tuple(n_i))
    basis: list[Vector] = []
    for v in spanning:
        if exact.is_zero_vector(v):
            continue
        if exact.rank(tuple(basis + [v])) > len(basis):
            basis.append(v)
        if len(basis) == 2:
            break
    return basis


def verify_on_quadric(quad: QuadSpace, curve: CurveMap) -> bool:
    """Expand ``q(P(z))`` exactly and test that it is the zero polynomial."""
    comps = curve.components
    if len(comps) != quad.dim_ambient:
        raise ValueError(f"curve has {len(comps)} components, quadric needs {quad.dim_ambient}")
    total = UniPoly()
    g = quad.gram
    for a in range(len(comps)):
        if comps[a].is_zero():
            continue
        for b in range(a, len(comps)):
            if g[a][b] == 0 or comps[b].is_zero():
                continue
            coeff = g[a][b] if a == b else 2 * g[a][b]
            total = total + comps[a] * comps[b] * coeff
    return total.is_zero()


def _generic_minor_witnesses(a: Matrix) -> list[list[int]]:
    size = len(a)
    if size % 2 == 0:
        return [[]] if exact.pfaffian(a) == 0 else []
    return [[i] for i in range(size) if exact.pfaffian_minor(a, [i]) == 0]


def solve_quadric_fibre(quad: QuadSpace, config: MarkedConfig) -> FibreDescription:
    """Degree-d curves on the quadric through the d+1 marked points.

    The admissible coefficients are ``lam_i = zeta_i mu_i`` with ``mu`` in
    the kernel of the rescaled skew matrix and every ``mu_i`` nonzero.
    Every returned curve is re-checked with :func:`verify_on_quadric`.
    """
    for i, v in enumerate(config.v):
        if not on_quadric(quad, v):
            raise ValueError(f"point {i} is not on the quadric")
    a = build_rescaled_skew(quad, config).matrix
    size = len(a)
    kernel = exact.kernel_basis(a)
    corank = len(kernel)
    if (size % 2 == 1 and corank == 1) or (size % 2 == 0 and corank == 2):
        if not exact.same_span(kernel, kernel_via_pfaffians(a)):
            raise AssertionError("Pfaffian kernel disagrees with elimination kernel")
    ok = bool(kernel) and all(any(b[i] != 0 for b in kernel) for i in range(size))
    kind = _classify(corank, ok)
    reps, violating = _representative_coefficients(kernel) if ok else ([], list(range(corank)))
    zeta = config.zeta
    curves = [interpolate_pn(config, tuple(z * m for z, m in zip(zeta, mu))) for mu in reps]
    for c in curves:
        if not verify_on_quadric(quad, c):
            raise AssertionError("solver produced a curve off the quadric")
    return FibreDescription(
        kind=kind,
        kernel_dim=corank,
        nonvanishing_ok=ok,
        kernel=kernel,
        representatives=curves,
        violating_members=violating,
        witnesses=_generic_minor_witnesses(a),
        rank=size - corank,
    )


def cauchy_pfaffian(z: Sequence[RatLike]) -> Fraction:
    """Closed-form Pfaffian of the alternating two-vector configuration.

    ``prod_{i<j, i+j even}(z_j - z_i) / prod_{i<j, i+j odd}(z_j - z_i)``.
    """
    nodes = vector(z)
    if len(nodes) % 2 or not nodes:
        raise ValueError("need an even, positive number of nodes")
    if len(set(nodes)) != len(nodes):
        raise ValueError("nodes must be pairwise distinct")
    num = Fraction(1)
    den = Fraction(1)
    for i, j in combinations(range(len(nodes)), 2):
        diff = nodes[j] - nodes[i]
        if (i + j) % 2:
            den *= diff
        else:
            num *= diff
    return num / den


def alternating_config(quad: QuadSpace, z: Sequence[RatLike], u: Sequence[RatLike] | None = None,
                       v: Sequence[RatLike] | None = None) -> MarkedConfig:
    """Points alternating between isotropic ``u`` and ``v`` with ``B(u, v) = 1``.

    Defaults to ``e0, e1``, which satisfy this for the split form.
    """
    size = quad.dim_ambient
    u = vector(u) if u is not None else tuple(Fraction(int(k == 0)) for k in range(size))
    v = vector(v) if v is not None else tuple(Fraction(int(k == 1)) for k in range(size))
    if quad.q(u) != 0 or quad.q(v) != 0 or quad.bilinear(u, v) != 1:
        raise ValueError("need isotropic u, v with B(u, v) = 1")
    nodes = vector(z)
    return MarkedConfig(nodes, tuple(u if i % 2 == 0 else v for i in range(len(nodes))))

