"""Quadratic spaces, projective points, and seeded rational point sampling."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import (
    Matrix,
    RatLike,
    Vector,
    det,
    format_rat,
    identity,
    is_zero_vector,
    matmul,
    matrix,
    matrix_to_json,
    primitive_integer_vector,
    rat,
    vector,
    vector_to_json,
)

DEFAULT_BOX = 10**6
DEFAULT_MAX_ATTEMPTS = 32


class SamplingError(RuntimeError):
    """A genericity condition kept failing past the resampling cap."""


def max_attempts() -> int:
    """Resampling cap, overridable through ``PFCURVES_MAX_ATTEMPTS``."""
    raw = os.environ.get("PFCURVES_MAX_ATTEMPTS")
    if raw is None:
        return DEFAULT_MAX_ATTEMPTS
    value = int(raw)
    if value < 1:
        raise ValueError("PFCURVES_MAX_ATTEMPTS must be positive")
    return value


@dataclass(frozen=True)
class ProjPoint:
    """A point of projective space, stored with first nonzero coordinate 1."""

    coords: Vector

    def __post_init__(self) -> None:
        v = vector(self.coords)
        if is_zero_vector(v):
            raise ValueError("the zero vector is not a projective point")
        lead = next(x for x in v if x != 0)
        object.__setattr__(self, "coords", tuple(x / lead for x in v))

    @property
    def ambient_dim(self) -> int:
        return len(self.coords) - 1

    def primitive(self) -> Vector:
        """Coprime integer representative."""
        return primitive_integer_vector(self.coords)

    def to_json(self) -> list[str]:
        return vector_to_json(self.coords)

    @classmethod
    def from_json(cls, data: Sequence) -> ProjPoint:
        return cls(vector(data))


@dataclass(frozen=True)
class QuadSpace:
    """A vector space with a nondegenerate symmetric bilinear form.

    ``q(v) = B(v, v)`` cuts out the quadric of isotropic lines. The
    sampler projects from ``base_point``, which must be isotropic.
    """

    gram: Matrix
    base_point: Vector | None = None

    def __post_init__(self) -> None:
        g = matrix(self.gram)
        n = len(g)
        if any(len(r) != n for r in g):
            raise ValueError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix must be symmetric")
        if det(g) == 0:
            raise ValueError("bilinear form is degenerate")
        object.__setattr__(self, "gram", g)
        if self.base_point is not None:
            bp = vector(self.base_point)
            if len(bp) != n or is_zero_vector(bp):
                raise ValueError("base point has wrong length or is zero")
            object.__setattr__(self, "base_point", bp)
            if self.q(bp) != 0:
                raise ValueError("base point is not on the quadric")

    @property
    def dim_ambient(self) -> int:
        """Dimension of the underlying vector space (n + 2 for Q_n)."""
        return len(self.gram)

    @property
    def n(self) -> int:
        """Dimension of the quadric hypersurface."""
        return self.dim_ambient - 2

    def bilinear(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
        if len(u) != self.dim_ambient or len(v) != self.dim_ambient:
            raise ValueError(f"vectors must have length {self.dim_ambient}")
        total = Fraction(0)
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            row = self.gram[i]
            total += ui * sum((row[j] * vj for j, vj in enumerate(v) if vj != 0), Fraction(0))
        return total

    def q(self, v: Sequence[Fraction]) -> Fraction:
        return self.bilinear(v, v)

    def to_json(self) -> dict:
        out = {"gram": matrix_to_json(self.gram)}
        if self.base_point is not None:
            out["base_point"] = vector_to_json(self.base_point)
        return out

    @classmethod
    def from_json(cls, data) -> QuadSpace:
        if isinstance(data, list):
            return cls(matrix(data), _find_isotropic_basis_vector(matrix(data)))
        bp = data.get("base_point")
        g = matrix(data["gram"])
        return cls(g, vector(bp) if bp is not None else _find_isotropic_basis_vector(g))


def _find_isotropic_basis_vector(g: Matrix) -> Vector | None:
    for i in range(len(g)):
        if g[i][i] == 0:
            return tuple(Fraction(int(k == i)) for k in range(len(g)))
    return None


def split_quadric(n: int) -> QuadSpace:
    """Split form of rank n + 2 defining Q_n: hyperbolic planes, plus <1> if n is odd.

    ``e0`` and ``e1`` are isotropic with ``B(e0, e1) = 1``.
    """
    if n < 1:
        raise ValueError("quadric dimension must be at least 1")
    size = n + 2
    rows = [[0] * size for _ in range(size)]
    for k in range(0, size - 1, 2):
        rows[k][k + 1] = rows[k + 1][k] = 1
    if size % 2:
        rows[-1][-1] = 1
    base = tuple(Fraction(int(i == 0)) for i in range(size))
    return QuadSpace(matrix(rows), base)


def parse_quadric(text: str) -> QuadSpace:
    """Parse ``split:n`` or a path to a JSON Gram-matrix file."""
    if text.startswith("split:"):
        return split_quadric(int(text.split(":", 1)[1]))
    with open(text) as fh:
        return QuadSpace.from_json(json.load(fh))


def bilinear(quad: QuadSpace, u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return quad.bilinear(vector(u), vector(v))


def on_quadric(quad: QuadSpace, p: ProjPoint | Sequence) -> bool:
    coords = p.coords if isinstance(p, ProjPoint) else vector(p)
    return quad.q(coords) == 0


# ---------------------------------------------------------------------------
# Sampling


def make_rng(seed: int | Sequence[int]) -> np.random.Generator:
    """Deterministic generator; a sequence seed derives an independent stream."""
    return np.random.default_rng(seed)


def random_rational(rng: np.random.Generator, box: int = DEFAULT_BOX) -> Fraction:
    num = int(rng.integers(-box, box + 1))
    den = int(rng.integers(1, box + 1))
    return Fraction(num, den)


def random_vector(rng: np.random.Generator, length: int, box: int = DEFAULT_BOX) -> Vector:
    return tuple(random_rational(rng, box) for _ in range(length))


def distinct_rationals(rng: np.random.Generator, count: int, box: int = DEFAULT_BOX) -> tuple[Fraction, ...]:
    out: list[Fraction] = []
    while len(out) < count:
        x = random_rational(rng, box)
        if x not in out:
            out.append(x)
    return tuple(out)


def stereographic(quad: QuadSpace, w: Sequence[Fraction]) -> Vector:
    """Second intersection of the line through the base point along ``w``.

    Returns ``w - q(w) / (2 B(e, w)) * e`` for base point ``e``.
    """
    e = quad.base_point
    if e is None:
        raise ValueError("quadric has no rational base point")
    b = quad.bilinear(e, w)
    if b == 0:
        raise ValueError("direction is tangent at the base point")
    s = -quad.q(w) / (2 * b)
    return tuple(wi + s * ei for wi, ei in zip(w, e))


def sample_quadric_point(
    quad: QuadSpace,
    rng: np.random.Generator,
    box: int = DEFAULT_BOX,
    attempts: int | None = None,
) -> ProjPoint:
    """Random rational point of the quadric via stereographic projection.

    Tangent directions, and outputs with a zero coordinate, are resampled.
    """
    if quad.base_point is None:
        raise ValueError("quadric has no rational base point")
    cap = attempts or max_attempts()
    for _ in range(cap):
        w = random_vector(rng, quad.dim_ambient, box)
        if quad.bilinear(quad.base_point, w) == 0:
            continue
        p = stereographic(quad, w)
        if any(x == 0 for x in p):
            continue
        return ProjPoint(p)
    raise SamplingError(f"no admissible quadric point after {cap} attempts")


def curve_point(curve, t: RatLike) -> ProjPoint:
    """Evaluate a parametrized curve (anything with ``components``) at ``t``."""
    t = rat(t)
    values = tuple(p(t) for p in curve.components)
    if is_zero_vector(values):
        raise ValueError(f"parameter {format_rat(t)} is a base point of the parametrization")
    return ProjPoint(values)


def reflection(quad: QuadSpace, w: Sequence[Fraction]) -> Matrix:
    """Matrix of the orthogonal reflection in the anisotropic vector ``w``."""
    qw = quad.q(w)
    if qw == 0:
        raise ValueError("cannot reflect in an isotropic vector")
    n = quad.dim_ambient
    gw = [sum((quad.gram[k][j] * w[k] for k in range(n)), Fraction(0)) for j in range(n)]
    return tuple(
        tuple(Fraction(int(i == j)) - 2 * w[i] * gw[j] / qw for j in range(n)) for i in range(n)
    )


def random_isometry(quad: QuadSpace, rng: np.random.Generator, count: int = 3, box: int = 50) -> Matrix:
    """Product of ``count`` random reflections, an isometry of ``quad``."""
    m = identity(quad.dim_ambient)
    done = 0
    while done < count:
        w = random_vector(rng, quad.dim_ambient, box)
        if quad.q(w) == 0:
            continue
        m = matmul(reflection(quad, w), m)
        done += 1
    return m

