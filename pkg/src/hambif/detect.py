"""Hessian models, detecting functions and candidate frequencies.

A model describes the Hessian of a Hamiltonian at a stationary point as a
polynomial matrix in the parameters, either as two symmetric n x n blocks
A, B (the Hessian is diag(A, B)) or as a full symmetric 2n x 2n matrix K.

For block-diagonal models the detecting function of frequency j has the
closed form F_j = det(A B - j^2 I). For any model, the product of the
eigenvalues of Q_j(K(lambda)) taken with half their multiplicity is a
pointwise detecting value with the same zeros and signs; for block models
it equals F_j / (1 + j^2)^(2n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .linalg import build_qj, pair_eigenvalues, sym_eigen
from .polyalg import (
    MultiPoly,
    PolyMatrix,
    PolySyntaxError,
    default_vars,
    interval_eval,
    parse_poly,
    poly_det,
    sign_grid,
    certified_min_abs,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

FIXTURES = ("exdeg", "exstat", "surfdeg", "surfstat")


class ModelError(ValueError):
    """Invalid model file or model definition; ``where`` locates the problem."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box; bounds are exact rationals."""

    bounds: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if not self.bounds:
            raise ValueError("box must have at least one axis")
        fixed = []
        for lo, hi in self.bounds:
            lo, hi = Fraction(lo), Fraction(hi)
            if lo > hi:
                raise ValueError(f"empty box axis [{lo}, {hi}]")
            fixed.append((lo, hi))
        object.__setattr__(self, "bounds", tuple(fixed))

    @classmethod
    def cube(cls, halfwidth, k: int) -> "Box":
        h = Fraction(halfwidth)
        return cls(tuple((-h, h) for _ in range(k)))

    @property
    def dim(self) -> int:
        return len(self.bounds)

    def is_degenerate(self) -> bool:
        return any(lo == hi for lo, hi in self.bounds)

    def grid_axes(self, points: int) -> list[list[Fraction]]:
        axes = []
        for lo, hi in self.bounds:
            if points < 2 or lo == hi:
                axes.append([lo])
            else:
                step = (hi - lo) / (points - 1)
                axes.append([lo + i * step for i in range(points)])
        return axes

    def cell_diagonal(self, points: int) -> Fraction:
        """Upper bound (rational) for the diagonal of one grid cell."""
        sq = sum(((hi - lo) / max(points - 1, 1)) ** 2 for lo, hi in self.bounds)
        return _sqrt_upper(sq)

    def split(self) -> tuple["Box", "Box"]:
        """Bisect along the longest axis."""
        widths = [hi - lo for lo, hi in self.bounds]
        axis = widths.index(max(widths))
        lo, hi = self.bounds[axis]
        mid = (lo + hi) / 2
        a = list(self.bounds)
        b = list(self.bounds)
        a[axis] = (lo, mid)
        b[axis] = (mid, hi)
        return Box(tuple(a)), Box(tuple(b))

    def contains_disk(self, radius) -> bool:
        r = Fraction(radius)
        return all(lo <= -r and r <= hi for lo, hi in self.bounds)

    def to_json(self) -> list[list[str]]:
        return [[str(lo), str(hi)] for lo, hi in self.bounds]


def _sqrt_upper(x: Fraction) -> Fraction:
    """A rational >= sqrt(x)."""
    if x <= 0:
        return Fraction(0)
    # integer square root on a scaled value, rounded up
    scale = 10**12
    n = math.isqrt(math.ceil(x * scale * scale)) + 1
    return Fraction(n, scale)


@dataclass(frozen=True, eq=False)
class HessianModel:
    """Parametrised Hessian at a stationary point plus analyst-supplied flags."""

    n: int
    k: int
    form: str
    A: PolyMatrix | None = None
    B: PolyMatrix | None = None
    K: PolyMatrix | None = None
    local_index: int | None = None
    trivial_stationary_only: bool = False
    name: str = "model"
    box: Box | None = None
    disk_radius: Fraction | None = None
    expected: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ModelError("n and k must be positive")
        if self.form == "block-diagonal":
            for label, m in (("A", self.A), ("B", self.B)):
                if m is None:
                    raise ModelError(f"block {label} missing", "[blocks]")
                if m.shape != (self.n, self.n):
                    raise ModelError(f"block {label} has shape {m.shape}, expected {(self.n, self.n)}", "[blocks]")
                if m.num_vars != self.k:
                    raise ModelError(f"block {label} uses {m.num_vars} variables, expected {self.k}", "[blocks]")
                if not m.is_symmetric():
                    raise ModelError(f"block {label} is not symmetric", "[blocks]")
        elif self.form == "general":
            if self.K is None:
                raise ModelError("matrix K missing", "[blocks]")
            if self.K.shape != (2 * self.n, 2 * self.n):
                raise ModelError(f"K has shape {self.K.shape}, expected {(2 * self.n, 2 * self.n)}", "[blocks]")
            if self.K.num_vars != self.k:
                raise ModelError(f"K uses {self.K.num_vars} variables, expected {self.k}", "[blocks]")
            if not self.K.is_symmetric():
                raise ModelError("K is not symmetric", "[blocks]")
        else:
            raise ModelError(f"unknown form {self.form!r}", "[model].form")
        if self.local_index is not None and not isinstance(self.local_index, int):
            raise ModelError("local_index must be an integer or 'unknown'", "[flags]")

    @property
    def variables(self) -> list[str]:
        return default_vars(self.k)

    @property
    def is_block(self) -> bool:
        return self.form == "block-diagonal"

    def default_box(self) -> Box:
        return self.box if self.box is not None else Box.cube(Fraction(31, 100), self.k)

    def hessian(self) -> PolyMatrix:
        """The full 2n x 2n Hessian as a polynomial matrix."""
        if self.K is not None:
            return self.K
        from .polyalg import block_diag

        return block_diag(self.A, self.B)

    def hessian_float(self, point: Sequence[float]) -> np.ndarray:
        return np.array(self.hessian().eval_float(*[np.float64(x) for x in point]), dtype=float)

    def ab_product(self) -> PolyMatrix:
        if "AB" not in self._cache:
            self._require_block()
            self._cache["AB"] = self.A @ self.B
        return self._cache["AB"]

    def _require_block(self):
        if not self.is_block:
            raise ModelError("operation needs a block-diagonal model; use detecting_value_general")


@dataclass
class DetectingSequence:
    """Closed-form detecting polynomials for a set of frequencies."""

    model: HessianModel
    polys: dict[int, MultiPoly]
    f0_identically_zero: bool

    def __getitem__(self, j: int) -> MultiPoly:
        return self.polys[j]

    def value_general(self, j: int, point) -> float:
        return detecting_value_general(self.model, j, point)


@dataclass
class CandidateSet:
    """Result of the candidate-frequency scan over a box."""

    candidates: list[int]
    f0_identically_zero: bool
    n_grid: int
    n_cert: int
    grid_points: int
    # j -> how the frequency was decided
    evidence: dict[int, str] = field(default_factory=dict)
    uncertified: list[int] = field(default_factory=list)

    def __iter__(self):
        return iter(self.candidates)

    def __contains__(self, j):
        return j in self.candidates


@dataclass
class NecessaryCondition:
    point: tuple
    frequencies: list[int]
    minimal_period_candidates: list[int]
    solution_frequencies: list[int]
    stationary: bool


# ---------------------------------------------------------------------------
# model loading
# ---------------------------------------------------------------------------

def _parse_matrix(raw, size: int, variables: list[str], where: str) -> PolyMatrix:
    if isinstance(raw, list) and raw and all(isinstance(r, list) for r in raw):
        rows = raw
    elif isinstance(raw, list):
        if len(raw) != size * size:
            raise ModelError(f"flat list has {len(raw)} entries, expected {size * size}", where)
        rows = [raw[i * size : (i + 1) * size] for i in range(size)]
    else:
        raise ModelError("expected a list of rows of expression strings", where)
    if len(rows) != size or any(len(r) != size for r in rows):
        raise ModelError(f"expected a {size}x{size} matrix", where)
    out = []
    for i, row in enumerate(rows):
        prow = []
        for j, expr in enumerate(row):
            loc = f"{where}[{i}][{j}]"
            if isinstance(expr, int) and not isinstance(expr, bool):
                expr = str(expr)
            if not isinstance(expr, str):
                raise ModelError("entries must be expression strings", loc)
            try:
                prow.append(parse_poly(expr, variables))
            except PolySyntaxError as exc:
                raise ModelError(str(exc), loc) from exc
        out.append(prow)
    return PolyMatrix(out, len(variables))


def _need(table: dict, key: str, where: str):
    if key not in table:
        raise ModelError(f"missing key {key!r}", where)
    return table[key]


def model_from_dict(data: dict, source: str = "<model>") -> HessianModel:
    """Build a model from the parsed key-value structure of a model file."""
    m = data.get("model")
    if not isinstance(m, dict):
        raise ModelError("missing [model] section", source)
    n = _need(m, "n", f"{source} [model]")
    k = _need(m, "k", f"{source} [model]")
    if not isinstance(n, int) or not isinstance(k, int) or n < 1 or k < 1:
        raise ModelError("n and k must be positive integers", f"{source} [model]")
    form = m.get("form", "block-diagonal")
    variables = default_vars(k)
    blocks = data.get("blocks")
    if not isinstance(blocks, dict):
        raise ModelError("missing [blocks] section", source)
    kwargs = {}
    if form == "block-diagonal":
        kwargs["A"] = _parse_matrix(_need(blocks, "A", f"{source} [blocks]"), n, variables, f"{source} [blocks].A")
        kwargs["B"] = _parse_matrix(_need(blocks, "B", f"{source} [blocks]"), n, variables, f"{source} [blocks].B")
    elif form == "general":
        kwargs["K"] = _parse_matrix(_need(blocks, "K", f"{source} [blocks]"), 2 * n, variables, f"{source} [blocks].K")
    else:
        raise ModelError(f"unknown form {form!r}", f"{source} [model].form")
    flags = data.get("flags", {})
    li = flags.get("local_index", "unknown")
    if li == "unknown":
        li = None
    elif isinstance(li, bool) or not isinstance(li, int):
        raise ModelError("local_index must be an integer or \"unknown\"", f"{source} [flags]")
    tso = flags.get("trivial_stationary_only", False)
    if not isinstance(tso, bool):
        raise ModelError("trivial_stationary_only must be true or false", f"{source} [flags]")
    dom = data.get("domain", {})
    box = None
    if "box_halfwidth" in dom:
        box = Box.cube(Fraction(str(dom["box_halfwidth"])), k)
    elif "box" in dom:
        box = Box(tuple((Fraction(str(a)), Fraction(str(b))) for a, b in dom["box"]))
        if box.dim != k:
            raise ModelError(f"box has {box.dim} axes, expected {k}", f"{source} [domain]")
    disk = Fraction(str(dom["disk_radius"])) if "disk_radius" in dom else None
    try:
        return HessianModel(
            n=n,
            k=k,
            form=form,
            local_index=li,
            trivial_stationary_only=tso,
            name=m.get("name", Path(source).stem),
            box=box,
            disk_radius=disk,
            expected=dict(data.get("expected", {})),
            **kwargs,
        )
    except ModelError as exc:
        if exc.where and not exc.where.startswith(source):
            raise ModelError(str(exc).split(": ", 1)[-1], f"{source} {exc.where}") from exc
        raise


def load_model(path) -> HessianModel:
    """Load a model file; bare fixture names ("exdeg", ...) resolve to bundled files."""
    p = Path(path)
    if not p.exists() and str(path) in FIXTURES:
        text = resources.files("hambif").joinpath("models").joinpath(f"{path}.toml").read_text()
        source = f"{path}.toml"
    else:
        try:
            text = p.read_text()
        except OSError as exc:
            raise ModelError(f"cannot read model file: {exc.strerror}", str(path)) from exc
        source = str(path)
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ModelError(f"malformed model file: {exc}", source) from exc
    return model_from_dict(data, source)


def zero_model(n: int = 1, k: int = 2) -> HessianModel:
    """Completely degenerate model A = B = 0."""
    z = [[MultiPoly.zero(k)] * n for _ in range(n)]
    return HessianModel(n=n, k=k, form="block-diagonal", A=PolyMatrix(z, k), B=PolyMatrix(z, k), name="zero")


def constant_model(A, B, k: int = 2, **kw) -> HessianModel:
    """Model with constant rational blocks (for tests and demos)."""
    n = len(A)
    pa = PolyMatrix([[MultiPoly.constant(k, Fraction(x)) for x in row] for row in A], k)
    pb = PolyMatrix([[MultiPoly.constant(k, Fraction(x)) for x in row] for row in B], k)
    return HessianModel(n=n, k=k, form="block-diagonal", A=pa, B=pb, **kw)


# ---------------------------------------------------------------------------
# detecting functions
# ---------------------------------------------------------------------------

def detecting_poly(model: HessianModel, j: int) -> MultiPoly:
    """F_j = det(A B - j^2 I), exact."""
    model._require_block()
    if j < 0:
        raise ValueError("j must be nonnegative")
    key = ("F", j)
    if key not in model._cache:
        m = model.ab_product()
        if j:
            m = m - PolyMatrix.identity(model.n, model.k, j * j)
        model._cache[key] = poly_det(m)
    return model._cache[key]


def detecting_sequence(model: HessianModel, js: Sequence[int]) -> DetectingSequence:
    polys = {j: detecting_poly(model, j) for j in sorted(set(js))}
    return DetectingSequence(model, polys, detecting_poly(model, 0).is_zero())


def detecting_value_general(model: HessianModel, j: int, point) -> float:
    """Product of the eigenvalues of Q_j(K(point)), each with half its multiplicity.

    For j = 0 the full product det(-K) is returned, which is the determinant
    of the Hessian and matches F_0 for block models.
    """
    if len(point) != model.k:
        raise ValueError(f"point has {len(point)} coordinates, model has {model.k} parameters")
    K = model.hessian_float([float(x) for x in point])
    q = build_qj(K, j)
    eig = sym_eigen(q)
    if j == 0:
        return float(np.prod(eig))
    try:
        half = pair_eigenvalues(eig)
    except ValueError as exc:
        raise ArithmeticError(f"eigenvalues of Q_{j} failed to pair: {exc}") from exc
    return float(np.prod(half))


def ratio_factor(model: HessianModel, j: int) -> Fraction:
    """Factor c with detecting_value_general = c * F_j for block models."""
    return Fraction(1) if j == 0 else Fraction(1, (1 + j * j) ** (2 * model.n))


def hessian_determinant_sign(model: HessianModel, point) -> int:
    model._require_block()
    da = poly_det(model.A).sign_at(point)
    db = poly_det(model.B).sign_at(point)
    return da * db


def local_index_at(model: HessianModel, point) -> int | None:
    """Local index of the gradient at the stationary point.

    Determined by the Hessian determinant sign when it is nonzero, otherwise
    taken from the model flag (None when unknown).
    """
    if model.is_block:
        s = hessian_determinant_sign(model, point)
    else:
        s = poly_det(model.K).sign_at(point)
    if s:
        return s
    return model.local_index


# ---------------------------------------------------------------------------
# candidate frequencies
# ---------------------------------------------------------------------------

def _frobenius_sup_sq(m: PolyMatrix, box: Box) -> Fraction:
    total = Fraction(0)
    for row in m.entries:
        for p in row:
            if p:
                total += max(abs(x) for x in interval_eval(p, box.bounds)) ** 2
    return total


def _certify_by_intervals(p: MultiPoly, box: Box, budget: int = 4096) -> bool:
    """True when interval enclosures over a subdivision exclude zero everywhere."""
    stack = [box]
    used = 0
    while stack:
        b = stack.pop()
        used += 1
        if used > budget:
            return False
        lo, hi = interval_eval(p, b.bounds)
        if lo > 0 or hi < 0:
            continue
        if p.sign_at([(a + c) / 2 for a, c in b.bounds]) == 0:
            return False
        stack.extend(b.split())
    return True


def _lipschitz_bound(p: MultiPoly, box: Box) -> float:
    sq = Fraction(0)
    for d in p.gradient():
        if d:
            sq += max(abs(x) for x in interval_eval(d, box.bounds)) ** 2
    return math.sqrt(float(sq)) * (1 + 1e-12)


def spectral_grid_bound(model: HessianModel, box: Box, points: int = 41, inflation: float = 1.1) -> int:
    """floor(sqrt(inflation * max positive real eigenvalue of A B)) over a grid."""
    axes = [np.array([float(x) for x in a]) for a in box.grid_axes(points)]
    mesh = np.meshgrid(*axes, indexing="ij")
    ab = model.ab_product().eval_float(*mesh).reshape(-1, model.n, model.n)
    eig = np.linalg.eigvals(ab)
    real = np.abs(eig.imag) <= 1e-9 * (1.0 + np.abs(eig.real))
    pos = eig.real[real & (eig.real > 0)]
    if pos.size == 0:
        return 0
    return int(math.floor(math.sqrt(inflation * float(pos.max()))))


def certified_bound(model: HessianModel, box: Box) -> int:
    """Every j > this value has F_j nonvanishing on the box.

    Uses |eigenvalue(AB)| <= ||A||_2 ||B||_2 <= ||A||_F ||B||_F with the
    Frobenius norms bounded by exact interval enclosures.
    """
    sq = _frobenius_sup_sq(model.A, box) * _frobenius_sup_sq(model.B, box)
    # j^4 <= ||A||_F^2 ||B||_F^2
    j = 0
    while Fraction((j + 1) ** 4) <= sq:
        j += 1
    return j


def candidate_js(model: HessianModel, box: Box | None = None, points: int = 41) -> CandidateSet:
    """Frequencies j whose detecting function may vanish on the box.

    j = 0 is a candidate when F_0 vanishes somewhere in the box and the
    model does not declare the stationary branch to be the only stationary
    solution. For j >= 1 a frequency is a candidate when F_j has a sign change
    or an exact zero on the grid; otherwise its exclusion is certified by a
    Lipschitz argument or by interval subdivision. Frequencies that can be
    neither detected nor certified are kept and listed as uncertified.
    """
    model._require_block()
    box = box or model.default_box()
    if box.dim != model.k:
        raise ValueError(f"box has {box.dim} axes, model has {model.k} parameters")
    if box.is_degenerate():
        raise ValueError("box is empty (an axis has zero width)")
    axes = box.grid_axes(points)
    n_grid = spectral_grid_bound(model, box, points)
    n_cert = max(certified_bound(model, box), n_grid)
    f0 = detecting_poly(model, 0)
    f0_zero = f0.is_zero()
    result = CandidateSet([], f0_zero, n_grid, n_cert, points)
    cell = float(box.cell_diagonal(points))
    for j in range(0, n_cert + 1):
        F = detecting_poly(model, j)
        if F.is_zero():
            vanishes = True
            how = "identically zero"
        else:
            signs = sign_grid(F, axes)
            has_zero = bool((signs == 0).any())
            change = bool((signs > 0).any() and (signs < 0).any())
            vanishes = has_zero or change
            how = "exact zero on grid" if has_zero else "sign change on grid"
        if j == 0:
            if not vanishes and not f0_zero:
                vanishes, how = _decide_nonvanishing(F, box, axes, cell, result, j)
            if vanishes and model.trivial_stationary_only:
                result.evidence[0] = f"{how}; excluded: stationary branch is the only stationary solution"
                continue
            if vanishes:
                result.candidates.append(0)
                result.evidence[0] = how
            continue
        if vanishes:
            result.candidates.append(j)
            result.evidence[j] = how
            continue
        vanishes, how = _decide_nonvanishing(F, box, axes, cell, result, j)
        if vanishes:
            result.candidates.append(j)
        result.evidence[j] = how
    return result


def _decide_nonvanishing(F, box, axes, cell, result: CandidateSet, j: int):
    lip = _lipschitz_bound(F, box)
    mn = certified_min_abs(F, axes)
    if mn > lip * cell:
        return False, "certified nonvanishing (grid minimum exceeds Lipschitz bound)"
    if _certify_by_intervals(F, box):
        return False, "certified nonvanishing (interval subdivision)"
    result.uncertified.append(j)
    return True, "uncertified: no zero found but nonvanishing not proven"


# ---------------------------------------------------------------------------
# pointwise necessary condition
# ---------------------------------------------------------------------------

def necessary_filter(model: HessianModel, point) -> NecessaryCondition:
    """X(point) = {j : F_j(point) = 0} with the derived period information."""
    model._require_block()
    point = tuple(Fraction(x) for x in point)
    if len(point) != model.k:
        raise ValueError(f"point has {len(point)} coordinates, model has {model.k} parameters")
    a = model.A.evaluate(point)
    b = model.B.evaluate(point)
    fa = sum(x * x for row in a for x in row)
    fb = sum(x * x for row in b for x in row)
    jmax = 0
    while Fraction((jmax + 1) ** 4) <= fa * fb:
        jmax += 1
    freqs = [j for j in range(0, jmax + 1) if detecting_poly(model, j).sign_at(point) == 0]
    positive = [j for j in freqs if j > 0]
    divisors = sorted({d for j in positive for d in range(1, j + 1) if j % d == 0})
    return NecessaryCondition(point, freqs, positive, divisors, 0 in freqs)


__all__ = [
    "Box",
    "HessianModel",
    "DetectingSequence",
    "CandidateSet",
    "NecessaryCondition",
    "ModelError",
    "FIXTURES",
    "load_model",
    "model_from_dict",
    "zero_model",
    "constant_model",
    "detecting_poly",
    "detecting_sequence",
    "detecting_value_general",
    "ratio_factor",
    "local_index_at",
    "candidate_js",
    "certified_bound",
    "spectral_grid_bound",
    "necessary_filter",
]
