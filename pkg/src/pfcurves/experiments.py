"""Seeded randomized probes of the fibre structure on split quadrics.

Each trial draws from its own stream, derived from ``(seed, trial_index)``,
so reports do not depend on trial order and trials can run in parallel.
A trial whose outcome differs from the generic prediction is acceptable
only when it carries a witness: a Pfaffian minor that vanished although
the generic case predicts it nonzero.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from itertools import combinations
from math import ceil
from typing import Callable, Sequence

import numpy as np

from . import exact
from .exact import UniPoly, Vector
from .interp import (
    CurveMap,
    FibreKind,
    MarkedConfig,
    build_rescaled_skew,
    solve_quadric_fibre,
)
from .quadrics import (
    DEFAULT_BOX,
    QuadSpace,
    SamplingError,
    distinct_rationals,
    max_attempts,
    random_isometry,
    random_rational,
    reflection,
    sample_quadric_point,
    split_quadric,
)


@dataclass
class ProbeReport:
    probe_name: str
    parameters: dict
    histogram: dict[str, int]
    witnesses: list[dict] = field(default_factory=list)
    conforming: bool = True
    details: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "probe": self.probe_name,
            "conforming": self.conforming,
            "trials": self.parameters.get("trials"),
            "histogram": self.histogram,
            "witnessed_exceptions": sum(1 for w in self.witnesses if w.get("vanishing_minors")),
        }

    def to_json(self) -> dict:
        return {
            "summary": self.summary(),
            "probe_name": self.probe_name,
            "parameters": self.parameters,
            "histogram": self.histogram,
            "details": self.details,
            "witnesses": self.witnesses,
            "conforming": self.conforming,
        }


def trial_rng(seed: int, trial: int | str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{trial}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:16], "big"))


def config_digest(config: MarkedConfig) -> str:
    payload = json.dumps(config.to_json(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _run_trials(fn: Callable[[int], dict], trials: int, jobs: int) -> list[dict]:
    if jobs <= 1 or trials <= 1:
        return [fn(t) for t in range(trials)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, range(trials)))


def _histogram(labels: Sequence[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for label in labels:
        out[label] = out.get(label, 0) + 1
    return dict(sorted(out.items()))


def _fold(name: str, parameters: dict, outcomes: list[dict], details: dict | None = None) -> ProbeReport:
    """Assemble a report; conforming iff every off-prediction trial is witnessed."""
    witnesses = []
    conforming = True
    for o in outcomes:
        off = o["expected"] is not None and o["kind"] != o["expected"]
        if off or o["vanishing_minors"]:
            witnesses.append({k: o[k] for k in ("trial", "digest", "kind", "rank", "kernel_dim", "vanishing_minors")})
        if off and not o["vanishing_minors"]:
            conforming = False
    return ProbeReport(
        probe_name=name,
        parameters=parameters,
        histogram=_histogram([o["kind"] for o in outcomes]),
        witnesses=witnesses,
        conforming=conforming,
        details=details or {},
    )


def _curve_points(curve: CurveMap | Sequence[UniPoly], rng: np.random.Generator, count: int, box: int) -> list[Vector]:
    comps = curve.components if isinstance(curve, CurveMap) else tuple(curve)
    out: list[Vector] = []
    used: set[Fraction] = set()
    while len(out) < count:
        s = random_rational(rng, box)
        if s in used:
            continue
        values = tuple(p(s) for p in comps)
        if exact.is_zero_vector(values):
            continue
        used.add(s)
        out.append(exact.primitive_integer_vector(values))
    return out


def _pencil_witnesses(a: exact.Matrix) -> list[list[int]]:
    """Minors explaining a failed corank-2 prediction for an even skew matrix.

    Empty when the rank is ``size - 2`` and no coordinate vanishes on the
    kernel; otherwise the pairs ``(i, j)`` with ``pf(A(i, j)) = 0`` for each
    offending coordinate ``j`` (or for all pairs if the rank dropped).
    """
    size = len(a)
    minors = {(i, j): exact.pfaffian_minor(a, [i, j]) for i, j in combinations(range(size), 2)}
    if all(v == 0 for v in minors.values()):
        return [list(p) for p in minors]
    out: list[list[int]] = []
    for j in range(size):
        pairs = [sorted((i, j)) for i in range(size) if i != j]
        if all(minors[tuple(p)] == 0 for p in pairs):
            out.extend(p for p in pairs if p not in out)
    return out


# ---------------------------------------------------------------------------
# General fibres


def _general_fibre_trial(t: int, *, n: int, d: int, seed: int, box: int) -> dict:
    quad = split_quadric(n)
    rng = trial_rng(seed, t)
    z = distinct_rationals(rng, d + 1, box)
    pts = tuple(sample_quadric_point(quad, rng, box).primitive() for _ in range(d + 1))
    config = MarkedConfig(z, pts)
    fd = solve_quadric_fibre(quad, config)
    return {
        "trial": t,
        "digest": config_digest(config),
        "kind": fd.kind.value,
        "expected": (FibreKind.EMPTY if d % 2 else FibreKind.UNIQUE_CURVE).value,
        "rank": fd.rank,
        "kernel_dim": fd.kernel_dim,
        "vanishing_minors": fd.witnesses,
        "curves": len(fd.representatives),
    }


def probe_general_fibre(n: int, d: int, trials: int, seed: int, box: int = DEFAULT_BOX, jobs: int = 1) -> ProbeReport:
    """Degree-d curves through d+1 general points of split Q_n at general parameters.

    Predicted: no curve for odd d, exactly one for even d.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if d < 1:
        raise ValueError("d must be positive")
    fn = partial(_general_fibre_trial, n=n, d=d, seed=seed, box=box)
    outcomes = _run_trials(fn, trials, jobs)
    params = {"n": n, "d": d, "trials": trials, "seed": seed, "box": box}
    details = {"curves_verified": sum(o["curves"] for o in outcomes)}
    return _fold("general-fibre", params, outcomes, details)


# ---------------------------------------------------------------------------
# Curves inside Q_3


def twisted_cubic(quad: QuadSpace, rng: np.random.Generator) -> tuple[tuple[UniPoly, ...], exact.Matrix]:
    """A twisted cubic on split Q_3 moved by a random isometry.

    Starts from ``t -> (1, t^3, t, -t^2, 0)``, on which
    ``2 x0 x1 + 2 x2 x3 + x4^2`` vanishes identically. Returns the
    components and the isometry used.
    """
    if quad.dim_ambient != 5:
        raise ValueError("twisted cubic construction is for Q_3")
    base = (
        UniPoly((1,)),
        UniPoly((0, 0, 0, 1)),
        UniPoly((0, 1)),
        UniPoly((0, 0, -1)),
        UniPoly(),
    )
    iso = random_isometry(quad, rng)
    comps = tuple(
        sum((base[j] * iso[i][j] for j in range(5) if iso[i][j] != 0), UniPoly()) for i in range(5)
    )
    return comps, iso


def _components_on_quadric(quad: QuadSpace, comps: Sequence[UniPoly]) -> bool:
    total = UniPoly()
    for a in range(len(comps)):
        for b in range(len(comps)):
            if quad.gram[a][b] != 0:
                total = total + comps[a] * comps[b] * quad.gram[a][b]
    return total.is_zero()


def span_dimension(comps: Sequence[UniPoly]) -> int:
    """Projective dimension of the linear span of a parametrized curve."""
    width = max((len(p.coeffs) for p in comps), default=0)
    rows = tuple(tuple(p.coeffs[k] if k < len(p.coeffs) else Fraction(0) for k in range(width)) for p in comps)
    return exact.rank(rows) - 1


def nondegenerate_quartic(quad: QuadSpace, rng: np.random.Generator, box: int = DEFAULT_BOX) -> CurveMap:
    """Rational quartic through five sampled points of Q_3 that spans P^4."""
    cap = max_attempts()
    for _ in range(cap):
        z = distinct_rationals(rng, 5, box)
        pts = tuple(sample_quadric_point(quad, rng, box).primitive() for _ in range(5))
        fd = solve_quadric_fibre(quad, MarkedConfig(z, pts))
        if fd.kind is FibreKind.UNIQUE_CURVE and span_dimension(fd.representatives[0].components) == 4:
            return fd.representatives[0]
    raise SamplingError(f"no spanning quartic after {cap} attempts")


def _certificate(a: exact.Matrix, r: int) -> list[int]:
    """Indices of a principal submatrix of size ``r`` with nonzero Pfaffian."""
    if r == 0:
        return []
    for keep in combinations(range(len(a)), r):
        if exact.pfaffian(exact.submatrix(a, keep)) != 0:
            return list(keep)
    raise AssertionError("skew rank not certified by a principal Pfaffian")


def _rank_trial(t: int, *, comps: tuple[UniPoly, ...], d: int, seed: int, box: int) -> dict:
    quad = split_quadric(3)
    rng = trial_rng(seed, t)
    pts = tuple(_curve_points(comps, rng, d + 1, box))
    z = distinct_rationals(rng, d + 1, box)
    config = MarkedConfig(z, pts)
    a = build_rescaled_skew(quad, config).matrix
    return {"trial": t, "digest": config_digest(config), "rank": exact.rank(a), "matrix": a}


def probe_rank_on_curve(d: int, trials: int, seed: int, curve: str = "quartic", box: int = DEFAULT_BOX,
                        jobs: int = 1) -> ProbeReport:
    """Ranks of the rescaled skew matrix for marked points on a fixed curve of Q_3.

    ``curve="quartic"`` uses a rational quartic spanning P^4; ``"cubic"``
    a twisted cubic spanning only a hyperplane. Conforming iff the largest
    observed rank reaches ``2 ceil((d - 1) / 2)``.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    quad = split_quadric(3)
    curve_rng = trial_rng(seed, "curve")
    if curve == "quartic":
        comps = nondegenerate_quartic(quad, curve_rng, box).components
    elif curve == "cubic":
        comps, _ = twisted_cubic(quad, curve_rng)
    else:
        raise ValueError(f"unknown curve type {curve!r}")
    if not _components_on_quadric(quad, comps):
        raise AssertionError("probe curve is not on the quadric")
    fn = partial(_rank_trial, comps=comps, d=d, seed=seed, box=box)
    outcomes = _run_trials(fn, trials, jobs)
    bound = 2 * ceil((d - 1) / 2)
    best = max(outcomes, key=lambda o: (o["rank"], -o["trial"]))
    conforming = best["rank"] >= bound
    witness = {
        "trial": best["trial"],
        "digest": best["digest"],
        "rank": best["rank"],
        "nonvanishing_principal_pfaffian": _certificate(best["matrix"], best["rank"]),
    }
    return ProbeReport(
        probe_name="rank-on-curve",
        parameters={"d": d, "trials": trials, "seed": seed, "curve": curve, "box": box},
        histogram=_histogram([str(o["rank"]) for o in outcomes]),
        witnesses=[witness],
        conforming=conforming,
        details={
            "bound": bound,
            "max_rank": best["rank"],
            "curve_degree": max(p.degree for p in comps),
            "curve_span_dim": span_dimension(comps),
            "curve_components": [p.to_json() for p in comps],
        },
    )


# ---------------------------------------------------------------------------
# Q_3 side of the V_5 fibre argument


def random_line(quad: QuadSpace, rng: np.random.Generator) -> tuple[Vector, Vector]:
    """Spanning vectors of a random line on split Q_3, the image of <e0, e2>."""
    iso = random_isometry(quad, rng)
    e0 = tuple(iso[i][0] for i in range(5))
    e2 = tuple(iso[i][2] for i in range(5))
    return e0, e2


def _point_killing_pfaffian(quad: QuadSpace, z: Sequence[Fraction], fixed: Sequence[Vector], slot: int,
                            a: Vector, b: Vector) -> Vector | None:
    """The point of the line <a, b> that, placed in ``slot``, makes pf(A) vanish.

    pf(A) is linear in the vector at ``slot``, so ``f(b) a - f(a) b`` works.
    """

    def pf_with(x: Vector) -> Fraction:
        pts = list(fixed)
        pts.insert(slot, x)
        return exact.pfaffian(build_rescaled_skew(quad, MarkedConfig(z, tuple(pts))).matrix)

    fa, fb = pf_with(a), pf_with(b)
    p = tuple(fb * x - fa * y for x, y in zip(a, b))
    if exact.is_zero_vector(p):
        return None
    return exact.primitive_integer_vector(p)


def _v5_trial(t: int, *, comps: tuple[UniPoly, ...], d: int, seed: int, box: int, variant: str) -> dict:
    quad = split_quadric(3)
    rng = trial_rng(seed, t)
    for _ in range(max_attempts()):
        if variant == "rat-comp":
            m = d + 1
            on_curve = _curve_points(comps, rng, d, box)
            z = distinct_rationals(rng, m, box)
            if d % 2:
                a, b = random_line(quad, rng)
                free = _point_killing_pfaffian(quad, z, on_curve, d, a, b)
                if free is None:
                    continue
            else:
                free = sample_quadric_point(quad, rng, box).primitive()
            pts = tuple(on_curve) + (free,)
            expected = FibreKind.PENCIL if d % 2 else FibreKind.UNIQUE_CURVE
        else:
            # degree d-1 through d marks: d-2 on the cubic, one on a line
            # meeting it, one general point
            m = d
            on_curve = _curve_points(comps, rng, d - 2, box)
            z = distinct_rationals(rng, m, box)
            anchor = _curve_points(comps, rng, 1, box)[0]
            a, b = _line_through(quad, anchor, rng)
            free = sample_quadric_point(quad, rng, box).primitive()
            if d % 2 == 0:
                on_line = _point_killing_pfaffian(quad, z, list(on_curve) + [free], d - 2, a, b)
                if on_line is None:
                    continue
            else:
                s = random_rational(rng, box)
                on_line = exact.primitive_integer_vector(tuple(x + s * y for x, y in zip(a, b)))
            pts = tuple(on_curve) + (on_line, free)
            expected = FibreKind.UNIQUE_CURVE if d % 2 else FibreKind.PENCIL
        config = MarkedConfig(z, pts)
        break
    else:
        raise SamplingError("could not build a configuration on the pfaffian locus")
    fd = solve_quadric_fibre(quad, config)
    a_mat = build_rescaled_skew(quad, config).matrix
    if expected is FibreKind.PENCIL:
        minors = _pencil_witnesses(a_mat)
    else:
        minors = fd.witnesses
    return {
        "trial": t,
        "digest": config_digest(config),
        "kind": fd.kind.value,
        "expected": expected.value if d >= 3 else None,
        "rank": fd.rank,
        "kernel_dim": fd.kernel_dim,
        "vanishing_minors": minors,
        "curves": len(fd.representatives),
    }


def _line_through(quad: QuadSpace, p: Vector, rng: np.random.Generator) -> tuple[Vector, Vector]:
    """A random line of split Q_3 through the point ``p``.

    Pulls ``p`` back to ``e0`` with an isometry built from reflections,
    takes the line ``<e0, (r, 0, 2, -s^2, 2s)>``, and pushes it forward.
    """
    e0 = tuple(Fraction(int(i == 0)) for i in range(5))
    iso = _isometry_sending(quad, e0, p, rng)
    while True:
        r, s = random_rational(rng, 1000), random_rational(rng, 1000)
        if s != 0:
            break
    w = (r, Fraction(0), Fraction(2), -s * s, 2 * s)
    return exact.primitive_integer_vector(exact.matvec(iso, e0)), exact.primitive_integer_vector(exact.matvec(iso, w))


def _isometry_sending(quad: QuadSpace, src: Vector, dst: Vector, rng: np.random.Generator) -> exact.Matrix:
    """An isometry mapping the isotropic line ``[src]`` onto ``[dst]``.

    Rescales ``dst`` so that ``src - dst`` is anisotropic, then reflects;
    the reflection in ``src - c dst`` swaps ``src`` and ``c dst`` whenever
    both are isotropic.
    """
    for _ in range(max_attempts()):
        c = random_rational(rng, 1000)
        if c == 0:
            continue
        w = tuple(x - c * y for x, y in zip(src, dst))
        if quad.q(w) == 0:
            continue
        return reflection(quad, w)
    raise SamplingError("no anisotropic difference vector found")


def probe_v5_fibre(d: int, trials: int, seed: int, variant: str = "rat-comp", box: int = DEFAULT_BOX,
                   jobs: int = 1) -> ProbeReport:
    """Fibres over configurations supported on a twisted cubic in Q_3.

    ``variant="rat-comp"``: degree ``d`` through ``d`` points of the cubic
    and one more point (on the pf(A) = 0 locus when ``d`` is odd); predicted
    a single curve for even ``d`` and a pencil for odd ``d``.

    ``variant="main"``: degree ``d - 1`` through ``d - 2`` points of the
    cubic, a point of a line meeting it, and a general point; predicted a
    single curve for odd ``d`` and a pencil for even ``d``.

    For ``d < 3`` the outcome is reported without a prediction.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    if variant not in ("rat-comp", "main"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "main" and d < 3:
        raise ValueError("the two-point variant needs d >= 3")
    quad = split_quadric(3)
    comps, _ = twisted_cubic(quad, trial_rng(seed, "curve"))
    fn = partial(_v5_trial, comps=comps, d=d, seed=seed, box=box, variant=variant)
    outcomes = _run_trials(fn, trials, jobs)
    params = {"d": d, "trials": trials, "seed": seed, "variant": variant, "box": box}
    details = {
        "curves_verified": sum(o["curves"] for o in outcomes),
        "cubic_components": [p.to_json() for p in comps],
        "prediction_asserted": d >= 3,
    }
    return _fold("v5-fibre", params, outcomes, details)
