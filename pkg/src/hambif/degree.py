"""Topological index of an isolated zero of a planar polynomial map.

The index is the winding number of the map around a small circle. Circle
points are exact rationals from the tangent-half-angle parametrisation, so
each component's sign at a sample is decided exactly. An arc between two
samples is accepted only when an interval enclosure shows that one
component keeps a fixed sign along it: the image then stays in a
half-plane and the endpoint quadrants determine the contribution. Other
arcs are bisected. The winding number is the sum of quadrant steps over 4.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polyalg import MultiPoly, interval_eval_float, jacobian2, parse_poly

log = logging.getLogger(__name__)

DEFAULT_SAMPLES = 64
MAX_DEPTH = 24
MAX_RADIUS_RETRIES = 8


class DegreeError(RuntimeError):
    """Base class for index computation failures."""


class ZeroOnCircle(DegreeError):
    """The map vanishes at a sample point even after perturbing the radius."""


class RefinementExhausted(DegreeError):
    """An arc is still uncertified at the maximum bisection depth."""


class RadiiDisagree(DegreeError):
    """Winding numbers at different radii differ; the radius is too large."""

    def __init__(self, values):
        self.values = values
        text = ", ".join(f"r={r}: {v}" for r, v in values)
        super().__init__(f"winding numbers disagree across radii ({text})")


@dataclass(frozen=True)
class PlanarMap:
    """Polynomial map (u, v) of two variables, studied around ``center``."""

    u: MultiPoly
    v: MultiPoly
    center: tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))

    def __post_init__(self):
        if self.u.num_vars != 2 or self.v.num_vars != 2:
            raise ValueError("planar maps need both components in exactly two variables")
        object.__setattr__(self, "center", tuple(Fraction(c) for c in self.center))

    def signs_at(self, point) -> tuple[int, int]:
        return self.u.sign_at(point), self.v.sign_at(point)


@dataclass
class IndexResult:
    value: int
    radius: Fraction
    samples: int
    max_quadrant_step: int = 1
    certified_nonvanishing: bool = True
    radii_agreeing: list = field(default_factory=list)
    max_depth: int = 0
    transitions: int = 0

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "radius": str(self.radius),
            "samples": self.samples,
            "max_quadrant_step": self.max_quadrant_step,
            "certified_nonvanishing": self.certified_nonvanishing,
            "max_depth": self.max_depth,
            "radii": [{"radius": str(r), "value": v} for r, v in self.radii_agreeing],
        }


@dataclass
class AdmissibilityReport:
    singular_points_found: list
    origin_isolated: bool
    scan_resolution: int
    radius: float
    heuristic: bool = True


def h_map(g: MultiPoly, F: MultiPoly, center=(0, 0)) -> PlanarMap:
    """The map (Jac(g, F), F)."""
    if g.num_vars != 2 or F.num_vars != 2:
        raise ValueError("h_map needs two-variable polynomials")
    return PlanarMap(jacobian2(g, F), F, center)


def standard_test_functions() -> tuple[MultiPoly, MultiPoly, MultiPoly, MultiPoly]:
    """g1 = l1^2 + l2^2, g2 = l1, g3 = l2, g4 = l1*l2."""
    v = ["l1", "l2"]
    return (
        parse_poly("l1^2 + l2^2", v),
        parse_poly("l1", v),
        parse_poly("l2", v),
        parse_poly("l1*l2", v),
    )


TEST_FUNCTION_NAMES = ("g1", "g2", "g3", "g4")


def test_function(name: str) -> MultiPoly:
    try:
        return standard_test_functions()[TEST_FUNCTION_NAMES.index(name)]
    except ValueError:
        raise ValueError(f"unknown test function {name!r}; expected one of {TEST_FUNCTION_NAMES}") from None


# ---------------------------------------------------------------------------
# exact circle points
# ---------------------------------------------------------------------------

def circle_point(s: Fraction, radius: Fraction, center=(0, 0)) -> tuple[Fraction, Fraction]:
    """Rational point at parameter s in [0, 4), counterclockwise from (0, -r).

    s in [0, 2) uses t = s - 1 in (1-t^2, 2t)/(1+t^2); s in [2, 4) is the
    antipodal chart -P(s - 3). Both charts are exact rationals.
    """
    if s < 2:
        t = s - 1
        sign = 1
    else:
        t = s - 3
        sign = -1
    d = 1 + t * t
    x = sign * radius * (1 - t * t) / d
    y = sign * radius * 2 * t / d
    return center[0] + x, center[1] + y


def quadrant(su: int, sv: int) -> int:
    """Half-open quadrant index 0..3 of a nonzero sign pair."""
    if su > 0 and sv >= 0:
        return 0
    if su <= 0 and sv > 0:
        return 1
    if su < 0 and sv <= 0:
        return 2
    if su >= 0 and sv < 0:
        return 3
    raise ZeroOnCircle("both components vanish")


def _step(qa: int, qb: int) -> int | None:
    d = (qb - qa) % 4
    return {0: 0, 1: 1, 3: -1}.get(d)


def _arc_boxes(arcs, radius: Fraction, center, points):
    """Float boxes (with outward margin) that contain each circle arc.

    An arc lies within its sagitta of the chord, and the chord lies in the
    box of its endpoints. With t = tan(theta/2) the angle moves at most
    2 per unit of parameter, so the sagitta is at most r*ds^2/2.
    """
    r = float(radius)
    ax = np.array([float(points[a][0]) for a, _ in arcs])
    ay = np.array([float(points[a][1]) for a, _ in arcs])
    bx = np.array([float(points[b][0]) for _, b in arcs])
    by = np.array([float(points[b][1]) for _, b in arcs])
    ds = np.array([float(b - a) for a, b in arcs])
    sag = r * ds * ds / 2.0
    pad = sag + 4e-16 * (r + abs(float(center[0])) + abs(float(center[1]))) + 1e-300
    lo = (np.minimum(ax, bx) - pad, np.minimum(ay, by) - pad)
    hi = (np.maximum(ax, bx) + pad, np.maximum(ay, by) + pad)
    return lo, hi


def _sign_certified(p: MultiPoly, grads, lo, hi):
    """Per box: +1 / -1 if p keeps that sign on the box, 0 if undecided."""
    if p.is_zero():
        return np.zeros(lo[0].shape, dtype=int)
    nlo, nhi = interval_eval_float(p, lo, hi)
    mid = [(a + b) / 2 for a, b in zip(lo, hi)]
    half = [(b - a) / 2 for a, b in zip(lo, hi)]
    val, absval = p.eval_float(*mid)
    spread = absval * (p.error_factor() + 4.0 * max(p.total_degree(), 1) * 2.0**-53)
    for d, w in zip(grads, half):
        if d.is_zero():
            continue
        dlo, dhi = interval_eval_float(d, lo, hi)
        spread = spread + np.maximum(np.abs(dlo), np.abs(dhi)) * w
    clo = np.maximum(nlo, val - spread)
    chi = np.minimum(nhi, val + spread)
    return np.where(clo > 0, 1, np.where(chi < 0, -1, 0))


def _winding_once(pmap: PlanarMap, radius: Fraction, samples: int, max_depth: int):
    points: dict[Fraction, tuple] = {}
    quads: dict[Fraction, int] = {}

    def visit(s: Fraction):
        if s not in quads:
            pt = circle_point(s % 4, radius, pmap.center)
            su, sv = pmap.signs_at(pt)
            if su == 0 and sv == 0:
                raise ZeroOnCircle(f"map vanishes at {pt}")
            points[s] = pt
            quads[s] = quadrant(su, sv)

    grads_u = pmap.u.gradient()
    grads_v = pmap.v.gradient()
    total = 0
    deepest = 0
    arcs = [(Fraction(4 * i, samples), Fraction(4 * (i + 1), samples)) for i in range(samples)]
    depth = 0
    while arcs:
        for a, b in arcs:
            visit(a)
            visit(b)
        lo, hi = _arc_boxes(arcs, radius, pmap.center, points)
        cu = _sign_certified(pmap.u, grads_u, lo, hi)
        cv = _sign_certified(pmap.v, grads_v, lo, hi)
        pending = []
        for (a, b), su, sv in zip(arcs, cu, cv):
            st = _step(quads[a], quads[b])
            if (su or sv) and st is not None:
                # the image stays in a half-plane, so the endpoint quadrants decide the step
                total += st
                deepest = max(deepest, depth)
            else:
                pending.append((a, b))
        if pending and depth >= max_depth:
            a, b = pending[0]
            raise RefinementExhausted(
                f"{len(pending)} arc(s) uncertified at depth {depth}, first [{float(a):.6g}, {float(b):.6g}]"
            )
        arcs = [half for a, b in pending for half in ((a, (a + b) / 2), ((a + b) / 2, b))]
        depth += 1
    if total % 4:
        raise DegreeError(f"quadrant transitions sum to {total}, not a multiple of 4")
    return total // 4, len(quads), deepest, total


def _perturbed(radius: Fraction, attempt: int) -> Fraction:
    # small rational nudges alternating in sign: r*(1 + 1/97), r*(1 - 1/89), ...
    primes = [97, 89, 83, 79, 73, 71, 67, 61]
    p = primes[attempt % len(primes)]
    sign = 1 if attempt % 2 == 0 else -1
    return radius * (1 + Fraction(sign, p))


def winding_at_radius(
    pmap: PlanarMap, radius, samples: int = DEFAULT_SAMPLES, max_depth: int = MAX_DEPTH
) -> IndexResult:
    """Winding number on one circle; the radius is nudged if a sample is a zero."""
    radius = Fraction(radius)
    if radius <= 0:
        raise ValueError("radius must be positive")
    r = radius
    for attempt in range(MAX_RADIUS_RETRIES + 1):
        try:
            value, count, depth, trans = _winding_once(pmap, r, samples, max_depth)
            return IndexResult(value, r, count, 1, True, [(r, value)], depth, trans)
        except ZeroOnCircle:
            if attempt == MAX_RADIUS_RETRIES:
                raise
            log.info("zero on circle of radius %s; retrying with a perturbed radius", r)
            r = _perturbed(radius, attempt)
    raise AssertionError("unreachable")


def default_radii(radius) -> list[Fraction]:
    r = Fraction(radius)
    return [r, 2 * r, 5 * r]


def winding_index(
    pmap: PlanarMap,
    radius=Fraction(1, 100),
    radii: Sequence | None = None,
    samples: int = DEFAULT_SAMPLES,
    max_depth: int = MAX_DEPTH,
) -> IndexResult:
    """Index of the zero at the centre, confirmed on several radii.

    With ``radii`` omitted, the circles r, 2r and 5r are used (one decade
    for r = 1/100 gives 1/100, 1/50, 1/20). All must give the same value.
    """
    rs = sorted(Fraction(r) for r in radii) if radii is not None else default_radii(radius)
    if not rs:
        raise ValueError("at least one radius is required")
    results = [winding_at_radius(pmap, r, samples, max_depth) for r in rs]
    values = [(res.radius, res.value) for res in results]
    if len({v for _, v in values}) != 1:
        raise RadiiDisagree(values)
    first = results[0]
    return IndexResult(
        value=first.value,
        radius=first.radius,
        samples=sum(r.samples for r in results),
        max_quadrant_step=1,
        certified_nonvanishing=True,
        radii_agreeing=values,
        max_depth=max(r.max_depth for r in results),
        transitions=first.transitions,
    )


def index_of(g: MultiPoly, F: MultiPoly, radius=Fraction(1, 100), radii=None) -> IndexResult:
    """ind(h(g, F)) at the origin."""
    return winding_index(h_map(g, F), radius, radii)


# ---------------------------------------------------------------------------
# admissibility (heuristic)
# ---------------------------------------------------------------------------

def _relative_residual(F: MultiPoly, grads, x, y):
    parts = []
    for p in (F, *grads):
        val, absval = p.eval_float(x, y)
        parts.append(val / (absval + 1e-300))
    return parts


def admissibility_scan(
    F: MultiPoly,
    radius=0.3,
    center=(0.0, 0.0),
    resolution: int = 96,
    tol: float = 1e-7,
) -> AdmissibilityReport:
    """Heuristic search for singular zeros of F in the punctured disk.

    Residuals are scaled by the absolute term sums, so the test has the same
    meaning close to the origin, where F and its gradient are tiny, as
    farther out. Grid minima are polished with a bounded least-squares solve.
    """
    from scipy.optimize import least_squares

    if F.num_vars != 2:
        raise ValueError("admissibility_scan needs a two-variable polynomial")
    radius = float(radius)
    cx, cy = (float(c) for c in center)
    grads = F.gradient()
    inner = radius / resolution
    rr = np.linspace(inner, radius, resolution)
    th = np.linspace(0.0, 2 * np.pi, 4 * resolution, endpoint=False)
    R, T = np.meshgrid(rr, th, indexing="ij")
    X, Y = cx + R * np.cos(T), cy + R * np.sin(T)
    parts = _relative_residual(F, grads, X, Y)
    rho = np.sqrt(sum(p * p for p in parts))
    # local minima over the polar grid (periodic in angle)
    padded = np.pad(rho, ((1, 1), (0, 0)), mode="edge")
    neigh = np.stack(
        [
            np.roll(padded, s, axis=1)[1 + dr : padded.shape[0] - 1 + dr]
            for dr in (-1, 0, 1)
            for s in (-1, 0, 1)
            if (dr, s) != (0, 0)
        ]
    )
    minima = (rho <= neigh.min(axis=0)) & (rho < 0.5)
    idx = np.argwhere(minima)
    order = np.argsort(rho[minima])[:64]
    found = []

    def resid(z):
        return np.array([float(p) for p in _relative_residual(F, grads, np.array(z[0]), np.array(z[1]))])

    for i, jdx in idx[order]:
        z0 = np.array([X[i, jdx], Y[i, jdx]])
        lo = np.array([cx - radius, cy - radius])
        hi = np.array([cx + radius, cy + radius])
        try:
            sol = least_squares(resid, z0, bounds=(lo, hi), xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
        except ValueError:
            continue
        z = sol.x
        dist = math.hypot(z[0] - cx, z[1] - cy)
        if dist <= inner or dist > radius:
            continue
        if np.max(np.abs(resid(z))) < tol:
            if all(math.hypot(z[0] - p[0], z[1] - p[1]) > 1e-6 for p in found):
                found.append((float(z[0]), float(z[1])))
    found.sort()
    return AdmissibilityReport(found, not found, resolution, radius)


__all__ = [
    "PlanarMap",
    "IndexResult",
    "AdmissibilityReport",
    "DegreeError",
    "ZeroOnCircle",
    "RefinementExhausted",
    "RadiiDisagree",
    "h_map",
    "standard_test_functions",
    "test_function",
    "TEST_FUNCTION_NAMES",
    "circle_point",
    "quadrant",
    "winding_at_radius",
    "winding_index",
    "index_of",
    "admissibility_scan",
]
