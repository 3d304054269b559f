"""Exact rational linear algebra: scalars, univariate polynomials, dense
matrices, and Pfaffians of skew-symmetric matrices.

Scalars are :class:`fractions.Fraction`; matrices are tuples of row tuples.
Every routine here is exact, so results can be compared with ``==``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import zip_longest
from math import gcd, lcm
from typing import Iterable, Sequence, Union

Rat = Fraction
RatLike = Union[Fraction, int, str]
Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]

_RAT_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")

# Below this size the memoized cofactor expansion is used; above it, elimination.
EXPANSION_MAX_SIZE = 8


def rat(x: RatLike) -> Fraction:
    """Coerce ``x`` to an exact rational.

    Strings must be ``"p"`` or ``"p/q"``; floats are refused because their
    binary expansion is almost never what the caller meant.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        if not _RAT_RE.match(x):
            raise ValueError(f"not a rational literal: {x!r}")
        value = Fraction(x.replace(" ", ""))
        return value
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational")


def format_rat(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def vector(xs: Iterable[RatLike]) -> Vector:
    return tuple(rat(x) for x in xs)


def matrix(rows: Iterable[Iterable[RatLike]]) -> Matrix:
    """Build a matrix from nested iterables, checking that it is rectangular."""
    out = tuple(vector(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise ValueError("ragged matrix rows")
    return out


def shape(m: Matrix) -> tuple[int, int]:
    return (len(m), len(m[0]) if m else 0)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def zeros(rows: int, cols: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if shape(a)[1] != shape(b)[0]:
        raise ValueError(f"shape mismatch {shape(a)} x {shape(b)}")
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def is_zero_vector(v: Sequence[Fraction]) -> bool:
    return all(x == 0 for x in v)


def primitive_integer_vector(v: Sequence[Fraction]) -> Vector:
    """Rescale a nonzero vector to coprime integers with first nonzero entry positive."""
    if is_zero_vector(v):
        raise ValueError("zero vector has no primitive representative")
    den = lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = gcd(*ints)
    first = next(x for x in ints if x != 0)
    if first < 0:
        g = -g
    return tuple(Fraction(x // g) for x in ints)


# ---------------------------------------------------------------------------
# Gaussian elimination


def rref(m: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    rows = [list(r) for r in m]
    n_rows, n_cols = shape(m)
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(m: Matrix) -> int:
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> list[Vector]:
    """Basis of the right kernel, one vector per free column.

    Each basis vector has a 1 in its free column and zeros in the other
    free columns, so the basis is canonical for a given matrix.
    """
    n_cols = shape(m)[1]
    if not m:
        return [tuple(Fraction(int(i == j)) for i in range(n_cols)) for j in range(n_cols)]
    rows, pivots = rref(m)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][f]
        basis.append(tuple(v))
    return basis


def det(m: Matrix) -> Fraction:
    n, c = shape(m)
    if n != c:
        raise ValueError("determinant of a non-square matrix")
    rows = [list(r) for r in m]
    result = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if rows[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            rows[k], rows[p] = rows[p], rows[k]
            result = -result
        pivot = rows[k][k]
        result *= pivot
        for i in range(k + 1, n):
            if rows[i][k] != 0:
                f = rows[i][k] / pivot
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[k])]
    return result


def same_span(vs: Sequence[Sequence[Fraction]], ws: Sequence[Sequence[Fraction]]) -> bool:
    """True iff the two families span the same subspace."""
    if not vs and not ws:
        return True
    rv = rank(tuple(map(tuple, vs))) if vs else 0
    rw = rank(tuple(map(tuple, ws))) if ws else 0
    if rv != rw:
        return False
    return rank(tuple(map(tuple, list(vs) + list(ws)))) == rv


# ---------------------------------------------------------------------------
# Skew-symmetric matrices and Pfaffians


def is_skew(m: Matrix) -> bool:
    n, c = shape(m)
    if n != c:
        return False
    return all(m[i][j] == -m[j][i] for i in range(n) for j in range(i, n))


def skew(m: Iterable[Iterable[RatLike]]) -> Matrix:
    """Coerce to a matrix and reject anything that is not skew-symmetric."""
    out = matrix(m)
    if not is_skew(out):
        raise ValueError("matrix is not skew-symmetric")
    return out


def skew_from_upper(size: int, upper: Sequence[RatLike]) -> Matrix:
    """Skew matrix from its strict upper triangle listed row by row."""
    expected = size * (size - 1) // 2
    if len(upper) != expected:
        raise ValueError(f"need {expected} upper entries for size {size}, got {len(upper)}")
    rows = [[Fraction(0)] * size for _ in range(size)]
    it = iter(upper)
    for i in range(size):
        for j in range(i + 1, size):
            x = rat(next(it))
            rows[i][j] = x
            rows[j][i] = -x
    return tuple(map(tuple, rows))


def submatrix(m: Matrix, keep: Sequence[int]) -> Matrix:
    return tuple(tuple(m[i][j] for j in keep) for i in keep)


def _pf_expand(m: Matrix) -> Fraction:
    n = len(m)

    @lru_cache(maxsize=None)
    def pf(mask: int) -> Fraction:
        if mask == 0:
            return Fraction(1)
        idx = [i for i in range(n) if mask >> i & 1]
        if len(idx) % 2:
            return Fraction(0)
        first, rest = idx[0], idx[1:]
        total = Fraction(0)
        for pos, j in enumerate(rest):
            a = m[first][j]
            if a == 0:
                continue
            term = a * pf(mask & ~(1 << first) & ~(1 << j))
            total += term if pos % 2 == 0 else -term
        return total

    return pf((1 << n) - 1)


def _pf_eliminate(m: Matrix) -> Fraction:
    # Pairwise Schur reduction: pf(A) = a01 * pf(C + (A1 x A0 - A0 x A1)/a01).
    rows = [list(r) for r in m]
    result = Fraction(1)
    while rows:
        n = len(rows)
        j = next((k for k in range(1, n) if rows[0][k] != 0), None)
        if j is None:
            return Fraction(0)
        if j != 1:
            for r in rows:
                r[1], r[j] = r[j], r[1]
            rows[1], rows[j] = rows[j], rows[1]
            result = -result
        a = rows[0][1]
        result *= a
        r0, r1 = rows[0], rows[1]
        rows = [
            [rows[i][k] + (r1[i] * r0[k] - r0[i] * r1[k]) / a for k in range(2, n)]
            for i in range(2, n)
        ]
    return result


def pfaffian(m: Iterable[Iterable[RatLike]]) -> Fraction:
    """Pfaffian of a skew-symmetric matrix; 0 for odd size, 1 for size 0.

    Small matrices use cofactor expansion along the first row (division
    free, memoized over index subsets); larger ones use exact pairwise
    elimination.
    """
    a = skew(m)
    n = len(a)
    if n % 2:
        return Fraction(0)
    if n <= EXPANSION_MAX_SIZE:
        return _pf_expand(a)
    return _pf_eliminate(a)


def perfect_matchings(indices: Sequence[int]):
    """Yield the (2k-1)!! perfect matchings of ``indices`` as lists of pairs.

    Pairs are ordered as in the flattened permutations ``i1 < j1``,
    ``i1 < i2 < ...`` so the permutation sign can be read off directly.
    """
    if not indices:
        yield []
        return
    first, rest = indices[0], indices[1:]
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1 :]
        for tail in perfect_matchings(remaining):
            yield [(first, partner)] + tail


def permutation_sign(seq: Sequence[int]) -> int:
    sign = 1
    seen = list(seq)
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    return sign


def pfaffian_by_pairings(m: Iterable[Iterable[RatLike]]) -> Fraction:
    """The defining signed sum over perfect matchings. Exponential; oracle use only."""
    a = skew(m)
    n = len(a)
    if n % 2:
        return Fraction(0)
    total = Fraction(0)
    for matching in perfect_matchings(list(range(n))):
        flat = [x for pair in matching for x in pair]
        term = Fraction(permutation_sign(flat))
        for i, j in matching:
            term *= a[i][j]
        total += term
    return total


def pfaffian_minor(m: Iterable[Iterable[RatLike]], removed: Iterable[int]) -> Fraction:
    """Pfaffian of ``m`` with the listed rows and columns deleted."""
    a = skew(m)
    n = len(a)
    gone = set(removed)
    for i in gone:
        if not 0 <= i < n:
            raise IndexError(f"index {i} out of range for size {n}")
    keep = [i for i in range(n) if i not in gone]
    return pfaffian(submatrix(a, keep))


# ---------------------------------------------------------------------------
# Univariate polynomials


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial; ``coeffs[k]`` multiplies ``z**k``.

    The coefficient tuple is trimmed so the leading entry is nonzero; the
    zero polynomial has no coefficients and degree -1.
    """

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        cs = [rat(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def constant(cls, c: RatLike) -> UniPoly:
        return cls((rat(c),))

    @classmethod
    def linear_root(cls, root: RatLike) -> UniPoly:
        """The monic polynomial ``z - root``."""
        return cls((-rat(root), Fraction(1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, z: RatLike) -> Fraction:
        z = rat(z)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def __add__(self, other: UniPoly) -> UniPoly:
        return UniPoly(tuple(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=Fraction(0))))

    def __neg__(self) -> UniPoly:
        return UniPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: UniPoly) -> UniPoly:
        return self + (-other)

    def __mul__(self, other: UniPoly | RatLike) -> UniPoly:
        if not isinstance(other, UniPoly):
            s = rat(other)
            return UniPoly(tuple(c * s for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(tuple(out))

    __rmul__ = __mul__

    def derivative(self) -> UniPoly:
        return UniPoly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def to_json(self) -> list[str]:
        return [format_rat(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[RatLike]) -> UniPoly:
        return cls(tuple(rat(c) for c in data))


# ---------------------------------------------------------------------------
# JSON helpers shared by every module


def vector_to_json(v: Sequence[Fraction]) -> list[str]:
    return [format_rat(x) for x in v]


def matrix_to_json(m: Matrix) -> list[list[str]]:
    return [vector_to_json(r) for r in m]


def matrix_from_json(data) -> Matrix:
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ValueError("matrix JSON must be a list of rows")
    return matrix(data)
