"""Branch counts at an isolated singular zero, line tests and disk classification.

For a planar function F with an isolated singular zero at the origin and a
test function g, the numbers b+ and b- of zero-set branches on which g is
positive or negative satisfy b+ - b- = 2 ind(h(g, F)). With g1 = l1^2 + l2^2
this gives the total count, and the four test functions g1..g4 together
give the count in every quadrant.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .degree import (
    TEST_FUNCTION_NAMES,
    IndexResult,
    admissibility_scan,
    index_of,
    standard_test_functions,
)
from .detect import (
    Box,
    HessianModel,
    candidate_js,
    detecting_poly,
    local_index_at,
)
from .linalg import build_qj, morse_indices
from .polyalg import MultiPoly, count_real_roots, product, univariate_restriction, upoly_eval

log = logging.getLogger(__name__)

LINE_RETRIES = 20


class BranchError(RuntimeError):
    """Counts derived from the indices are inconsistent."""


class AxisZeroError(BranchError):
    """F vanishes on a coordinate axis near the origin, so quadrants are not defined."""


class LineTestError(RuntimeError):
    """No nonzero pair of values found on the line after all retries."""


@dataclass
class BranchCounts:
    total: int
    per_quadrant: tuple[int, int, int, int] | None = None
    signed: dict[str, tuple[int, int]] = field(default_factory=dict)
    indices: dict[str, int] = field(default_factory=dict)

    def check(self):
        for name, (bp, bm) in self.signed.items():
            if bp + bm != self.total:
                raise BranchError(f"b+ + b- = {bp + bm} differs from b = {self.total} for {name}")
        if self.per_quadrant is not None and sum(self.per_quadrant) != self.total:
            raise BranchError(f"quadrant counts {self.per_quadrant} do not sum to {self.total}")


@dataclass
class EtaIndex:
    j: int
    value: int
    epsilon: Fraction
    local_index_left: int
    local_index_right: int
    morse_left: int
    morse_right: int


@dataclass
class FrequencyReport:
    j: int
    period: str
    branch_total: int | None
    quadrants: tuple | None
    indices: dict
    signed: dict
    global_bifurcation: bool | None
    route: str
    axis_ok: bool | None = None
    admissible: bool | None = None
    singular_points: list = field(default_factory=list)
    sphere_sign_change: bool | None = None
    traced: dict | None = None
    cone_ok: bool | None = None
    index_details: dict = field(default_factory=dict)
    # ZeroSet2D or Mesh3D from tracing; not serialised
    geometry: object = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        out = {
            "j": self.j,
            "period": self.period,
            "branch_total": self.branch_total,
            "quadrants": list(self.quadrants) if self.quadrants is not None else None,
            "indices": dict(self.indices),
            "signed_counts": {k: list(v) for k, v in self.signed.items()},
            "global_bifurcation": self.global_bifurcation,
            "route": self.route,
            "axis_condition": self.axis_ok,
            "admissible_heuristic": self.admissible,
        }
        if self.sphere_sign_change is not None:
            out["sphere_sign_change"] = self.sphere_sign_change
        if self.traced is not None:
            out["traced"] = self.traced
        if self.cone_ok is not None:
            out["cone_condition"] = self.cone_ok
        return out


@dataclass
class ClassificationReport:
    model: str
    box: Box
    disk_radius: Fraction
    candidates: list[int]
    f0_identically_zero: bool
    route: str
    frequencies: list[FrequencyReport]
    symmetry_breaking: bool
    symmetry_breaking_reason: str
    strict_count_condition: bool | None
    total_branches: int | None
    product_index: int | None
    origin_label: str
    caveats: list[str]
    consistent: bool
    index_radii: list[Fraction]

    def to_json(self) -> dict:
        return {
            "model": self.model,
            "box": self.box.to_json(),
            "disk_radius": str(self.disk_radius),
            "candidates": list(self.candidates),
            "f0_identically_zero": self.f0_identically_zero,
            "route": self.route,
            "frequencies": [f.to_json() for f in self.frequencies],
            "total_branches": self.total_branches,
            "origin": self.origin_label,
            "symmetry_breaking": self.symmetry_breaking,
            "symmetry_breaking_reason": self.symmetry_breaking_reason,
            "strict_count_condition": self.strict_count_condition,
            "index_radii": [str(r) for r in self.index_radii],
            "consistent": self.consistent,
            "caveats": list(self.caveats),
        }


# ---------------------------------------------------------------------------
# counts from indices
# ---------------------------------------------------------------------------

def _index(g, F, radius, radii) -> IndexResult:
    return index_of(g, F, radius, radii)


def _index_task(args):
    gi, F, radius, radii = args
    return _index(standard_test_functions()[gi], F, radius, radii)


def compute_indices(F: MultiPoly, which=(0, 1, 2, 3), radius=Fraction(1, 100), radii=None, jobs: int = 1):
    """Indices ind(h(g_i, F)) for the selected standard test functions."""
    tasks = [(gi, F, radius, radii) for gi in which]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_index_task, tasks))
    else:
        results = [_index_task(t) for t in tasks]
    return {TEST_FUNCTION_NAMES[gi]: r for gi, r in zip(which, results)}


def branch_count(F: MultiPoly, radius=Fraction(1, 100), radii=None) -> int:
    """b(F) = 2 ind(h(g1, F)) with the nonnegative test function g1."""
    if F.is_zero():
        raise BranchError("the zero polynomial has no isolated zero")
    g1 = standard_test_functions()[0]
    value = index_of(g1, F, radius, radii).value
    if value < 0:
        raise BranchError(f"index {value} with a nonnegative test function is negative")
    return 2 * value


def signed_branch_counts(F: MultiPoly, g: MultiPoly, radius=Fraction(1, 100), radii=None, total=None):
    """(b+, b-) from b+ - b- = 2 ind(h(g, F)) and b+ + b- = b(F)."""
    b = branch_count(F, radius, radii) if total is None else total
    diff = 2 * index_of(g, F, radius, radii).value
    return _solve_signed(b, diff)


def _solve_signed(b: int, diff: int) -> tuple[int, int]:
    if (b + diff) % 2:
        raise BranchError(f"b={b} and b+ - b- = {diff} have different parity")
    bp, bm = (b + diff) // 2, (b - diff) // 2
    if bp < 0 or bm < 0:
        raise BranchError(f"negative branch count (b+={bp}, b-={bm})")
    return bp, bm


def solve_quadrants(i1: int, i2: int, i3: int, i4: int) -> tuple[int, int, int, int]:
    """Invert the four-equation system relating quadrant counts and indices.

    b1+b2+b3+b4 = 2 i1, b1-b2-b3+b4 = 2 i2, b1+b2-b3-b4 = 2 i3,
    b1-b2+b3-b4 = 2 i4. Quadrants are numbered counterclockwise from the
    open positive quadrant.
    """
    nums = (
        i1 + i2 + i3 + i4,
        i1 - i2 + i3 - i4,
        i1 - i2 - i3 + i4,
        i1 + i2 - i3 - i4,
    )
    if any(n % 2 for n in nums):
        raise BranchError(f"indices {(i1, i2, i3, i4)} give non-integer quadrant counts")
    counts = tuple(n // 2 for n in nums)
    if any(c < 0 for c in counts):
        raise BranchError(f"indices {(i1, i2, i3, i4)} give negative quadrant counts {counts}")
    return counts


def axis_condition(F: MultiPoly, rho) -> bool:
    """True when F has no zero on either coordinate axis for 0 < |t| <= rho.

    Checked exactly on the univariate restrictions with Sturm sequences.
    """
    rho = Fraction(rho)
    for axis in range(F.num_vars):
        coeffs = univariate_restriction(F, axis)
        if not coeffs:
            return False
        # divide out the power of t, leaving a polynomial with no root at 0
        m = next(i for i, c in enumerate(coeffs) if c != 0)
        coeffs = coeffs[m:]
        roots = count_real_roots(coeffs, -rho, rho)
        # (-rho, rho] misses a root at -rho itself
        if upoly_eval(coeffs, -rho) == 0:
            roots += 1
        if roots:
            return False
    return True


def quadrant_counts(F: MultiPoly, radius=Fraction(1, 100), radii=None, rho=None, indices=None):
    """Per-quadrant branch counts (b1, b2, b3, b4).

    ``rho`` is the neighbourhood in which the axis condition is verified
    (defaults to the largest index radius).
    """
    if rho is None:
        rs = radii if radii is not None else [radius, 2 * Fraction(radius), 5 * Fraction(radius)]
        rho = max(Fraction(r) for r in rs)
    if not axis_condition(F, rho):
        raise AxisZeroError("F vanishes on a coordinate axis near the origin")
    if indices is None:
        indices = {k: v.value for k, v in compute_indices(F, radius=radius, radii=radii).items()}
    return solve_quadrants(*(indices[n] for n in TEST_FUNCTION_NAMES))


def counts_from_indices(indices: dict[str, int], with_quadrants: bool = True) -> BranchCounts:
    b = 2 * indices["g1"]
    if b < 0:
        raise BranchError(f"negative total branch count {b}")
    signed = {"g1": (b, 0)}
    for name in TEST_FUNCTION_NAMES[1:]:
        if name in indices:
            signed[name] = _solve_signed(b, 2 * indices[name])
    quads = solve_quadrants(*(indices[n] for n in TEST_FUNCTION_NAMES)) if with_quadrants else None
    bc = BranchCounts(b, quads, signed, dict(indices))
    bc.check()
    return bc


# ---------------------------------------------------------------------------
# one-parameter tests
# ---------------------------------------------------------------------------

def sign_change_on_line(F: MultiPoly, point, direction, eps=Fraction(3, 100)) -> bool:
    """Whether F takes opposite exact signs at point +- eps*direction.

    If either value is zero, eps is halved (at most 20 times).
    """
    point = [Fraction(x) for x in point]
    direction = [Fraction(x) for x in direction]
    eps = Fraction(eps)
    if len(point) != F.num_vars or len(direction) != F.num_vars:
        raise ValueError("dimension mismatch")
    if not any(direction):
        raise ValueError("direction must be nonzero")
    for _ in range(LINE_RETRIES + 1):
        plus = F.sign_at([p + eps * d for p, d in zip(point, direction)])
        minus = F.sign_at([p - eps * d for p, d in zip(point, direction)])
        if plus and minus:
            return plus != minus
        eps /= 2
    raise LineTestError("F vanishes on one side at every tried step; the zero may not be isolated")


def eta_index(model: HessianModel, j: int, point, direction, eps=Fraction(1, 1000)) -> EtaIndex:
    """Bifurcation index across ``point`` along ``direction``.

    For j >= 1 the value is
    ind_right * m-(Q_j)_right / 2 - ind_left * m-(Q_j)_left / 2;
    for j = 0 it is ind_right - ind_left.
    """
    eps = Fraction(eps)
    point = [Fraction(x) for x in point]
    direction = [Fraction(x) for x in direction]
    left = [p - eps * d for p, d in zip(point, direction)]
    right = [p + eps * d for p, d in zip(point, direction)]
    li_l = local_index_at(model, left)
    li_r = local_index_at(model, right)
    if li_l is None or li_r is None:
        raise ValueError("local index unknown on one side; supply local_index in the model file")
    if j == 0:
        ml = morse_indices(build_qj(model.hessian_float([float(x) for x in left]), 0)).m_minus
        mr = morse_indices(build_qj(model.hessian_float([float(x) for x in right]), 0)).m_minus
        return EtaIndex(0, li_r - li_l, eps, li_l, li_r, ml, mr)
    ml = morse_indices(build_qj(model.hessian_float([float(x) for x in left]), j)).m_minus
    mr = morse_indices(build_qj(model.hessian_float([float(x) for x in right]), j)).m_minus
    if ml % 2 or mr % 2:
        raise ArithmeticError(f"odd Morse index ({ml}, {mr}) for Q_{j}; eigenvalues failed to pair")
    return EtaIndex(j, li_r * mr // 2 - li_l * ml // 2, eps, li_l, li_r, ml, mr)


# ---------------------------------------------------------------------------
# geometric checks
# ---------------------------------------------------------------------------

def cone_check_details(F: MultiPoly, samples, tol: float = 1e-6):
    """(ok, worst_sine, singular_samples) for the tangency condition.

    At each zero sample the gradient must not be parallel to the position
    vector; the sine of the angle between them must exceed ``tol``.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.size == 0:
        return True, 1.0, []
    pts = pts.reshape(-1, F.num_vars)
    coords = [pts[:, i] for i in range(F.num_vars)]
    grads = []
    scale = np.zeros(len(pts))
    for d in F.gradient():
        val, absval = d.eval_float(*coords)
        grads.append(val)
        scale = np.maximum(scale, absval)
    G = np.stack(grads, axis=1)
    gn = np.linalg.norm(G, axis=1)
    pn = np.linalg.norm(pts, axis=1)
    singular = [tuple(p) for p, g, s in zip(pts, gn, scale) if g <= 1e-12 * s or g == 0.0]
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = np.abs(np.sum(G * pts, axis=1)) / (gn * pn)
    sine = np.sqrt(np.clip(1.0 - cos * cos, 0.0, 1.0))
    sine = np.where((gn > 0) & (pn > 0), sine, 0.0)
    worst = float(sine.min())
    return (not singular) and worst > tol, worst, singular


def cone_check(F: MultiPoly, zero_samples, tol: float = 1e-6) -> bool:
    ok, worst, singular = cone_check_details(F, zero_samples, tol)
    if singular:
        log.warning("gradient vanishes at %d sample(s); cone condition fails", len(singular))
    return ok


def _fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    phi = np.arccos(1 - 2 * i / count)
    theta = np.pi * (1 + 5**0.5) * i
    return np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=1)


def sphere_sign_check(F: MultiPoly, radius=Fraction(1, 10), sample_count: int = 2000) -> bool:
    """Whether F takes both signs on the sphere of the given radius (heuristic).

    Signs are exact at the sampled points (the six axis points and a
    Fibonacci lattice, rounded to nearby rationals).
    """
    if F.num_vars != 3:
        raise ValueError("sphere_sign_check needs a three-variable polynomial")
    r = Fraction(radius)
    seen = set()
    for axis in range(3):
        for s in (1, -1):
            pt = [Fraction(0)] * 3
            pt[axis] = s * r
            seen.add(F.sign_at(pt))
    if 1 in seen and -1 in seen:
        return True
    pts = _fibonacci_sphere(sample_count) * float(r)
    val, absval = F.eval_float(pts[:, 0], pts[:, 1], pts[:, 2])
    bound = absval * F.error_factor() * 4
    sure = np.abs(val) > bound
    seen.update(np.sign(val[sure]).astype(int).tolist())
    for p in pts[~sure]:
        seen.add(F.sign_at([Fraction(float(x)) for x in p]))
    return 1 in seen and -1 in seen


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def period_label(j: int) -> str:
    """Minimal period 2*pi/j as text; j = 0 means stationary."""
    if j == 0:
        return "stationary"
    f = Fraction(2, j)
    num = "" if f.numerator == 1 else str(f.numerator)
    return f"{num}π" if f.denominator == 1 else f"{num}π/{f.denominator}"


ROUTE_ISOLATED = "isolated stationary branch (nonzero local index)"
ROUTE_STATIONARY = "stationary bifurcation allowed"
ROUTE_NECESSARY = "necessary condition only"


def choose_route(model: HessianModel, f0_zero: bool) -> str:
    if model.trivial_stationary_only and model.local_index not in (None, 0):
        return ROUTE_ISOLATED
    if not f0_zero:
        return ROUTE_STATIONARY
    return ROUTE_NECESSARY


def classify_disk(
    model: HessianModel,
    disk_radius=None,
    index_radius=Fraction(1, 100),
    radii: Sequence | None = None,
    box: Box | None = None,
    trace_resolution: int | None = 256,
    jobs: int = 1,
    admissibility_resolution: int = 64,
) -> ClassificationReport:
    """Classify the bifurcation points of the trivial branch over a disk.

    Block-diagonal models only. With two parameters every candidate
    frequency gets branch and quadrant counts from winding-number indices;
    with three parameters the sphere sign test and the cone condition on
    traced surfaces replace the counts.
    """
    model._require_block()
    box = box or model.default_box()
    r = Fraction(disk_radius if disk_radius is not None else (model.disk_radius or Fraction(3, 10)))
    if not box.contains_disk(r):
        raise ValueError(f"disk of radius {r} is not inside the candidate box")
    radii_list = sorted(Fraction(x) for x in radii) if radii is not None else [
        Fraction(index_radius), 2 * Fraction(index_radius), 5 * Fraction(index_radius)
    ]
    if radii_list[-1] > r:
        raise ValueError("index radii must lie inside the disk")
    cand = candidate_js(model, box)
    route = choose_route(model, cand.f0_identically_zero)
    caveats = []
    if cand.uncertified:
        caveats.append(f"frequencies {cand.uncertified} kept as candidates without a nonvanishing proof")
    if route == ROUTE_ISOLATED:
        freqs = [j for j in cand.candidates if j > 0]
        caveats.append(
            "isolation of the stationary branch and the local index are taken from the model flags, not verified"
        )
    elif route == ROUTE_STATIONARY:
        freqs = list(cand.candidates)
    else:
        freqs = list(cand.candidates)
        caveats.append("hypotheses of the counting results do not hold; frequencies are necessary-condition candidates only")
    if model.k == 2:
        caveats.append("admissibility (isolated singular zero at the origin) is checked heuristically")
        report = _classify_planar(model, box, r, radii_list, cand, route, freqs, caveats, trace_resolution, jobs, admissibility_resolution)
    elif model.k == 3:
        caveats.append("three-parameter counts are replaced by a sampled sphere sign test (heuristic)")
        report = _classify_spatial(model, box, r, radii_list, cand, route, freqs, caveats, trace_resolution)
    else:
        raise ValueError("classification is implemented for two and three parameters")
    _compare_expected(model, report)
    return report


def _classify_planar(model, box, r, radii, cand, route, freqs, caveats, trace_resolution, jobs, adm_res):
    from .trace import trace2d

    reports = []
    consistent = True
    polys = {j: detecting_poly(model, j) for j in freqs}
    for j in freqs:
        F = polys[j]
        idx = compute_indices(F, radius=radii[0], radii=radii, jobs=jobs)
        values = {k: v.value for k, v in idx.items()}
        axis_ok = axis_condition(F, r)
        try:
            counts = counts_from_indices(values, with_quadrants=axis_ok)
        except BranchError as exc:
            consistent = False
            caveats.append(f"j={j}: {exc}")
            counts = None
        if not axis_ok:
            caveats.append(f"j={j}: F_j vanishes on a coordinate axis; quadrant counts omitted")
        adm = admissibility_scan(F, float(r), resolution=adm_res)
        if not adm.origin_isolated:
            caveats.append(f"j={j}: possible singular zeros away from the origin at {adm.singular_points_found[:3]}")
        fr = FrequencyReport(
            j=j,
            period=period_label(j),
            branch_total=counts.total if counts else None,
            quadrants=counts.per_quadrant if counts else None,
            indices=values,
            signed=counts.signed if counts else {},
            global_bifurcation=(counts.total > 0) if counts and route != ROUTE_NECESSARY else None,
            route=route,
            axis_ok=axis_ok,
            admissible=adm.origin_isolated,
            singular_points=adm.singular_points_found,
            index_details={k: v.to_json() for k, v in idx.items()},
        )
        if trace_resolution:
            zs = trace2d(F, box, trace_resolution, disk_radius=r, label=fr.period, j=j)
            per_q = zs.quadrant_counts()
            fr.geometry = zs
            fr.traced = {
                "components": len(zs.components),
                "per_quadrant": list(per_q),
                "resolution": trace_resolution,
                "exclusion_radius": zs.exclusion_radius,
            }
            fr.cone_ok = cone_check(F, zs.vertices_array())
            if fr.quadrants is not None and tuple(per_q) != tuple(fr.quadrants):
                consistent = False
                caveats.append(f"j={j}: traced components per quadrant {per_q} differ from index counts {fr.quadrants}")
            if not fr.cone_ok:
                caveats.append(f"j={j}: tangency condition fails at traced samples; components may miss the origin")
        reports.append(fr)
    total = None
    prod_index = None
    if freqs:
        F = product([polys[j] for j in freqs], 2)
        prod = compute_indices(F, which=(0,), radius=radii[0], radii=radii)["g1"]
        prod_index = prod.value
        total = 2 * prod.value
        parts = [fr.branch_total for fr in reports]
        if None not in parts and sum(parts) != total:
            consistent = False
            caveats.append(f"sum of per-frequency counts {sum(parts)} differs from the product count {total}")
    positive = [fr.j for fr in reports if fr.branch_total]
    sb = len(positive) >= 2 and route != ROUTE_NECESSARY
    reason = (
        f"branches of {len(positive)} distinct minimal-period classes ({', '.join(period_label(j) for j in positive)}) meet at the origin"
        if sb
        else "fewer than two frequency classes have branches at the origin"
    )
    literal = None
    if total is not None:
        literal = any(fr.branch_total and fr.branch_total != total for fr in reports)
    origin = _origin_label(positive)
    return ClassificationReport(
        model.name, box, r, list(cand.candidates), cand.f0_identically_zero, route, reports, sb, reason,
        literal, total, prod_index, origin, caveats, consistent, radii,
    )


def _classify_spatial(model, box, r, radii, cand, route, freqs, caveats, trace_resolution):
    from .trace import trace3d

    reports = []
    for j in freqs:
        F = detecting_poly(model, j)
        sphere = sphere_sign_check(F, radii[-1] * 2)
        fr = FrequencyReport(
            j=j, period=period_label(j), branch_total=None, quadrants=None, indices={}, signed={},
            global_bifurcation=sphere if route != ROUTE_NECESSARY else None, route=route,
            sphere_sign_change=sphere,
        )
        if trace_resolution:
            mesh = trace3d(F, box, min(trace_resolution, 64), j=j)
            fr.geometry = mesh
            fr.traced = {"vertices": len(mesh.vertices), "triangles": len(mesh.triangles)}
            # the origin itself is a singular zero; sample outside two grid cells of it
            cell = max(float(hi - lo) for lo, hi in box.bounds) / mesh.resolution
            fr.cone_ok = cone_check(F, mesh.vertices_in_ball(float(r), 2 * cell))
            if not fr.cone_ok:
                caveats.append(f"j={j}: tangency condition fails at traced samples")
        reports.append(fr)
    positive = [fr.j for fr in reports if fr.sphere_sign_change]
    sb = len(positive) >= 2 and route != ROUTE_NECESSARY
    reason = (
        f"zero sets of {len(positive)} frequency classes reach the sampled sphere"
        if sb
        else "fewer than two frequency classes change sign on the sampled sphere"
    )
    return ClassificationReport(
        model.name, box, r, list(cand.candidates), cand.f0_identically_zero, route, reports, sb, reason,
        None, None, None, _origin_label(positive), caveats, True, radii,
    )


def _origin_label(positive: list[int]) -> str:
    if not positive:
        return "no bifurcation detected at the origin"
    return "cluster point of periods {" + ", ".join(period_label(j) for j in positive) + "}"


def _compare_expected(model: HessianModel, report: ClassificationReport):
    exp = model.expected or {}
    if "candidates" in exp and sorted(exp["candidates"]) != sorted(report.candidates):
        report.caveats.append(f"candidate set {report.candidates} differs from reference {sorted(exp['candidates'])}")
    if "branch_total" in exp and report.total_branches is not None and exp["branch_total"] != report.total_branches:
        report.caveats.append(f"total branch count {report.total_branches} differs from reference {exp['branch_total']}")
    by_j = {fr.j: fr for fr in report.frequencies}
    for key, ref in sorted((exp.get("branch_totals") or {}).items()):
        fr = by_j.get(int(key))
        if fr is None or fr.branch_total is None or fr.branch_total == ref:
            continue
        note = ""
        quads = (exp.get("quadrants") or {}).get(key)
        if fr.quadrants is not None and quads is not None and sum(quads) == fr.branch_total:
            note = f"; the reference quadrant counts {quads} sum to {fr.branch_total}, so the reference total is treated as a typo"
        report.caveats.append(
            f"reference value b(F_{key})={ref} disagrees with computed {fr.branch_total} = 2*ind(h(g1,F_{key})){note}"
        )
    for key, ref in sorted((exp.get("quadrants") or {}).items()):
        fr = by_j.get(int(key))
        if fr is not None and fr.quadrants is not None and tuple(fr.quadrants) != tuple(ref):
            report.caveats.append(f"quadrant counts {fr.quadrants} for j={key} differ from reference {ref}")


__all__ = [
    "BranchCounts",
    "EtaIndex",
    "FrequencyReport",
    "ClassificationReport",
    "BranchError",
    "AxisZeroError",
    "LineTestError",
    "branch_count",
    "signed_branch_counts",
    "solve_quadrants",
    "quadrant_counts",
    "axis_condition",
    "counts_from_indices",
    "compute_indices",
    "sign_change_on_line",
    "eta_index",
    "cone_check",
    "cone_check_details",
    "sphere_sign_check",
    "period_label",
    "classify_disk",
]
