"""Closed-form numerology: expected dimensions, covering-degree bounds,
del Pezzo lattice arithmetic, and bisecant counts."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from .exact import format_rat, rat


class SpaceKind(str, enum.Enum):
    PROJECTIVE_SPACE = "ProjectiveSpace"
    QUADRIC = "Quadric"


class ConePosition(str, enum.Enum):
    NOT_NEF = "NotNef"
    NEF_NOT_AMPLE = "NefNotAmple"
    AMPLE = "Ample"


@dataclass(frozen=True)
class BoundPair:
    lower: int
    upper: int

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")


def expected_dim(dim_x: int, minus_k_dot_beta: int, m: int) -> int:
    """Expected dimension of the space of m-pointed genus-0 stable maps."""
    return dim_x + minus_k_dot_beta + m - 3


def covering_bounds(kind: SpaceKind | str, n: int, m: int) -> BoundPair:
    """Lower and upper bounds on the minimal rational m-connecting degree."""
    kind = SpaceKind(kind)
    if n < 2:
        raise ValueError("n must be at least 2")
    if m < 2:
        raise ValueError("m must be at least 2")
    if kind is SpaceKind.PROJECTIVE_SPACE:
        return BoundPair(m - 1 - (2 * (m - 2)) // (n + 1), m - 1 - (m - 1) // (n + 1))
    if m == 2:
        return BoundPair(2, 2)
    return BoundPair(m - 1 - (m - 3) // n, m - 1)


def bisecant_count(d: int, g: int) -> int:
    """Expected number of bisecant lines to a degree-d, genus-g curve on V_5."""
    if d < 2:
        raise ValueError("degree must be at least 2")
    return comb(d - 2, 2) - 3 * g


# ---------------------------------------------------------------------------
# del Pezzo surfaces


@dataclass(frozen=True)
class DPClass:
    """``a H - sum b_i E_i`` on the blow-up of P^2 in ``9 - delta`` points."""

    delta: int
    a: Fraction
    b: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.delta <= 9:
            raise ValueError(f"degree {self.delta} outside [1, 9]")
        b = tuple(rat(x) for x in self.b)
        if len(b) != 9 - self.delta:
            raise ValueError(f"degree {self.delta} needs {9 - self.delta} exceptional coefficients, got {len(b)}")
        object.__setattr__(self, "a", rat(self.a))
        object.__setattr__(self, "b", b)

    @property
    def b_sum(self) -> Fraction:
        return sum(self.b, Fraction(0))

    def __add__(self, other: DPClass) -> DPClass:
        _same_surface(self, other)
        return DPClass(self.delta, self.a + other.a, tuple(x + y for x, y in zip(self.b, other.b)))

    def __neg__(self) -> DPClass:
        return DPClass(self.delta, -self.a, tuple(-x for x in self.b))

    def __sub__(self, other: DPClass) -> DPClass:
        return self + (-other)

    def __str__(self) -> str:
        return f"{self.delta}:{format_rat(self.a)}:{','.join(format_rat(x) for x in self.b)}"

    def to_json(self) -> dict:
        return {"delta": self.delta, "a": format_rat(self.a), "b": [format_rat(x) for x in self.b]}

    @classmethod
    def parse(cls, text: str) -> DPClass:
        """Parse ``"delta:a:b1,b2,..."``; the b-list may be empty for delta 9."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected delta:a:b1,...; got {text!r}")
        delta = int(parts[0])
        bs = [x for x in parts[2].split(",") if x.strip()]
        return cls(delta, rat(parts[1].strip()), tuple(rat(x.strip()) for x in bs))

    @classmethod
    def anticanonical(cls, delta: int) -> DPClass:
        return cls(delta, Fraction(3), (Fraction(1),) * (9 - delta))

    @classmethod
    def canonical(cls, delta: int) -> DPClass:
        return -cls.anticanonical(delta)

    @classmethod
    def hyperplane(cls, delta: int) -> DPClass:
        return cls(delta, Fraction(1), (Fraction(0),) * (9 - delta))

    @classmethod
    def exceptional(cls, delta: int, i: int) -> DPClass:
        """The class ``E_i`` (0-based), written ``(0; 0,..,-1,..,0)``."""
        return cls(delta, Fraction(0), tuple(Fraction(-int(k == i)) for k in range(9 - delta)))


def _same_surface(x: DPClass, y: DPClass) -> None:
    if x.delta != y.delta:
        raise ValueError(f"classes live on different surfaces (degrees {x.delta} and {y.delta})")


def dp_pair(x: DPClass, y: DPClass) -> Fraction:
    _same_surface(x, y)
    return x.a * y.a - sum((p * q for p, q in zip(x.b, y.b)), Fraction(0))


def dp_genus(c: DPClass) -> Fraction:
    """Arithmetic genus from adjunction, ``(C^2 + C.K) / 2 + 1``."""
    return (dp_pair(c, c) + dp_pair(c, DPClass.canonical(c.delta))) / 2 + 1


def minus_one_curves(delta: int) -> list[DPClass]:
    """The (-1)-curves for delta >= 5: the E_i and the lines H - E_i - E_j."""
    if delta < 5 or delta > 8:
        raise ValueError("(-1)-curves are only enumerated for delta in 5..8")
    k = 9 - delta
    out = [DPClass.exceptional(delta, i) for i in range(k)]
    for i, j in combinations(range(k), 2):
        out.append(DPClass(delta, Fraction(1), tuple(Fraction(int(t in (i, j))) for t in range(k))))
    return out


def dp_cone_position(c: DPClass) -> ConePosition:
    """Position of ``c`` relative to the nef and ample cones (delta 5..8).

    delta 7, 8: nef iff ``a >= b >= 0`` (with each b_i >= 0 at delta 7).
    delta 5, 6: nef iff every ``b_i >= 0`` and ``a >= b_i + b_j`` for i != j.
    Ample iff the same inequalities hold strictly.
    """
    if c.delta not in (5, 6, 7, 8):
        raise ValueError(f"cone description unsupported for delta={c.delta}")
    if c.delta >= 7:
        values = [c.a - c.b_sum] + list(c.b)
    else:
        values = list(c.b) + [c.a - x - y for x, y in combinations(c.b, 2)]
    if any(v < 0 for v in values):
        return ConePosition.NOT_NEF
    if all(v > 0 for v in values):
        return ConePosition.AMPLE
    return ConePosition.NEF_NOT_AMPLE


def dp_t2009_condition(c: DPClass) -> bool:
    """The numerical hypothesis ``3a >= 2b`` for unirationality of the moduli spaces."""
    return 3 * c.a >= 2 * c.b_sum


def dp_m_d(delta: int, d: int) -> int:
    """Number of general marked points imposed in degree ``d``: floor((2 delta - 9) d / 2) + 1."""
    if delta < 5:
        raise ValueError("m_d is only defined for delta >= 5")
    if d < 1:
        raise ValueError("d must be positive")
    return ((2 * delta - 9) * d) // 2 + 1


@dataclass(frozen=True)
class P2Reduction:
    p2_degree: Fraction
    total_marks: Fraction
    base_points: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "p2_degree": format_rat(self.p2_degree),
            "total_marks": format_rat(self.total_marks),
            "base_points": list(self.base_points),
        }


def dp_reduce_to_p2(c: DPClass, d: int, m: int) -> P2Reduction:
    """Marked-point bookkeeping when pushing curves of class ``d c`` down to P^2.

    ``base_points`` lists the 1-based index of each blow-up centre once per
    required passage, i.e. ``p_i`` repeated ``d b_i`` times.
    """
    mult = []
    for i, bi in enumerate(c.b, start=1):
        reps = d * bi
        if reps.denominator != 1 or reps < 0:
            raise ValueError(f"d * b_{i} = {format_rat(reps)} is not a nonnegative integer")
        mult.extend([i] * int(reps))
    return P2Reduction(d * c.a, m + d * c.b_sum, tuple(mult))


def dp5_roots() -> list[DPClass]:
    """The 20 roots of the degree-5 lattice: ±(E_i - E_j), ±(H - E_i - E_j - E_k)."""
    roots = []
    for i, j in combinations(range(4), 2):
        r = DPClass.exceptional(5, i) - DPClass.exceptional(5, j)
        roots.extend([r, -r])
    for trio in combinations(range(4), 3):
        r = DPClass(5, Fraction(1), tuple(Fraction(int(t in trio)) for t in range(4)))
        roots.extend([r, -r])
    return roots


def is_dp_root(alpha: DPClass) -> bool:
    return dp_pair(alpha, alpha) == -2 and dp_pair(alpha, DPClass.canonical(alpha.delta)) == 0


def dp5_line_pairings(root: DPClass) -> list[tuple[str, Fraction]]:
    """Intersections of the quintic class ``root - K`` with the ten lines."""
    if root.delta != 5:
        raise ValueError("quintic table lives on the degree-5 surface")
    if not is_dp_root(root):
        raise ValueError(f"{root} is not a root (need alpha^2 = -2 and alpha.K = 0)")
    c = root + DPClass.anticanonical(5)
    labels = [f"e{i + 1}" for i in range(4)] + [f"h-e{i + 1}-e{j + 1}" for i, j in combinations(range(4), 2)]
    return [(label, dp_pair(c, line)) for label, line in zip(labels, minus_one_curves(5))]


def dp5_quintic_table(root: DPClass) -> list[int]:
    """Sorted multiset of ``C . l`` over the ten lines, for ``C = root - K``."""
    return sorted(int(v) for _, v in dp5_line_pairings(root))


def multiset_counts(values: Sequence[int]) -> dict[int, int]:
    return dict(sorted(Counter(values).items()))


def parse_kind(text: str) -> SpaceKind:
    aliases = {"pn": SpaceKind.PROJECTIVE_SPACE, "projective": SpaceKind.PROJECTIVE_SPACE,
               "quadric": SpaceKind.QUADRIC, "qn": SpaceKind.QUADRIC}
    key = text.strip().lower()
    if key in aliases:
        return aliases[key]
    return SpaceKind(text)

