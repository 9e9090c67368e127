"""Command-line front end: ``hambif detect|index|branches|classify|trace``.

Every subcommand prints (or writes with --out) one JSON document. Output is
byte-stable: keys are in a fixed order, and timings stay empty unless
--timings is given. Figures are written only after all computation has
succeeded, so a failed run never leaves partial output behind.

Exit status: 0 for a complete and consistent report, 3 when the report is
complete but internally inconsistent, 1 for model, input or computation
errors, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import __version__
from .branches import BranchError, classify_disk, period_label
from .degree import DegreeError, PlanarMap, TEST_FUNCTION_NAMES, index_of, test_function, winding_index
from .detect import Box, ModelError, candidate_js, detecting_poly, load_model
from .linalg import EigenError
from .polyalg import PolySyntaxError, parse_poly
from .trace import TraceError, _atomic_write, emit_obj, emit_svg, trace2d, trace3d

log = logging.getLogger("hambif")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONSISTENT = 3


@dataclass
class RunConfig:
    command: str
    model_path: str | None = None
    box_spec: object = None  # half-width or per-axis bounds, from --box
    box: Box | None = None
    disk_radius: Fraction | None = None
    radii: list[Fraction] | None = None
    grid: int | None = None
    out: str | None = None
    svg: str | None = None
    obj: str | None = None
    png: str | None = None
    jobs: int = 1
    g: str = "g1"
    js: list[int] | None = None
    self_test: bool = False
    timings: bool = False
    _clock: dict = field(default_factory=dict)

    def tick(self, name: str, start: float):
        if self.timings:
            self._clock[name] = round(time.perf_counter() - start, 3)


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _positive_fraction(text: str) -> Fraction:
    v = _fraction(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _radii(text: str) -> list[Fraction]:
    vals = [_positive_fraction(t) for t in text.split(",") if t.strip()]
    if not vals:
        raise argparse.ArgumentTypeError("need at least one radius")
    if len(set(vals)) != len(vals):
        raise argparse.ArgumentTypeError("radii must be distinct")
    return sorted(vals)


def _box_spec(text: str):
    """Either a half-width ("31/100") or per-axis bounds ("-31/100:31/100,-1/5:1/5")."""
    if ":" not in text:
        return _positive_fraction(text)
    bounds = []
    for part in text.split(","):
        lo, sep, hi = part.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"bad box axis {part!r}; expected lo:hi")
        bounds.append((_fraction(lo), _fraction(hi)))
    return bounds


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None
    if any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("frequencies must be nonnegative")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model TOML file, or the name of a bundled model (exdeg, exstat, surfdeg, surfstat)")
    common.add_argument("--box", type=_box_spec, help="candidate box: half-width, or lo:hi per axis separated by commas")
    common.add_argument("--disk-radius", type=_positive_fraction, help="radius of the classification disk")
    common.add_argument("--radii", type=_radii, help="winding radii, comma separated (default r, 2r, 5r with r=1/100)")
    common.add_argument("--grid", type=int, help="grid size: sample points per axis (detect) or trace resolution")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--svg", help="write traced curves as SVG")
    common.add_argument("--obj", help="write traced surfaces as Wavefront OBJ")
    common.add_argument("--png", help="write a matplotlib PNG of the traced zero sets")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for index computations")
    common.add_argument("--timings", action="store_true", help="record wall-clock timings in the report")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="hambif", description="Bifurcation of periodic solutions from a stationary point of a parametrised Hamiltonian system.")
    p.add_argument("--version", action="version", version=f"hambif {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("detect", parents=[common], help="candidate frequencies and detecting polynomials")
    ip = sub.add_parser("index", parents=[common], help="winding index of h(g, F_j) at the origin")
    ip.add_argument("--g", default="g1", choices=TEST_FUNCTION_NAMES, help="test function")
    ip.add_argument("--j", type=int, help="frequency")
    ip.add_argument("--self-test", action="store_true", help="index of the identity map (expected 1)")
    bp = sub.add_parser("branches", parents=[common], help="branch and quadrant counts per frequency")
    bp.add_argument("--j", type=_int_list, help="restrict to these frequencies")
    sub.add_parser("classify", parents=[common], help="full classification report over the disk")
    tp = sub.add_parser("trace", parents=[common], help="trace zero sets of the detecting functions")
    tp.add_argument("--j", type=_int_list, help="restrict to these frequencies")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    js = getattr(args, "j", None)
    if isinstance(js, int):
        js = [js]
    cfg = RunConfig(
        command=args.command,
        model_path=args.model,
        disk_radius=args.disk_radius,
        radii=args.radii,
        grid=args.grid,
        out=args.out,
        svg=args.svg,
        obj=args.obj,
        png=args.png,
        jobs=args.jobs,
        g=getattr(args, "g", "g1"),
        js=js,
        self_test=getattr(args, "self_test", False),
        timings=args.timings,
        box_spec=args.box,
    )
    if cfg.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    if cfg.grid is not None and cfg.grid < 2:
        raise UsageError("--grid must be at least 2")
    if cfg.model_path is None and not cfg.self_test:
        raise UsageError("--model is required")
    return cfg


def _resolve(cfg: RunConfig):
    """Load the model and fix the box and disk; checks disk inside box."""
    model = load_model(cfg.model_path)
    spec = cfg.box_spec
    if spec is None:
        box = model.default_box()
    elif isinstance(spec, Fraction):
        box = Box.cube(spec, model.k)
    else:
        if len(spec) != model.k:
            raise UsageError(f"--box has {len(spec)} axes but the model has {model.k} parameters")
        box = Box(tuple(spec))
    cfg.box = box
    if cfg.disk_radius is None:
        cfg.disk_radius = model.disk_radius or Fraction(3, 10)
    if not box.contains_disk(cfg.disk_radius):
        raise UsageError(f"disk of radius {cfg.disk_radius} does not fit inside the box")
    if cfg.radii is not None and cfg.radii[-1] > cfg.disk_radius:
        raise UsageError("winding radii must not exceed the disk radius")
    return model


def _digest(p) -> dict:
    text = p.to_string()
    return {
        "degree": p.total_degree(),
        "terms": len(p.terms),
        "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest()[:16],
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_detect(cfg: RunConfig) -> tuple[dict, int]:
    model = _resolve(cfg)
    t = time.perf_counter()
    cand = candidate_js(model, cfg.box, points=cfg.grid or 41)
    cfg.tick("candidates", t)
    polys = {}
    if model.is_block:
        for j in cand.candidates:
            polys[str(j)] = _digest(detecting_poly(model, j))
    report = {
        "model": model.name,
        "box": cfg.box.to_json(),
        "candidates": list(cand.candidates),
        "f0_identically_zero": cand.f0_identically_zero,
        "periods": {str(j): period_label(j) for j in cand.candidates},
        "bounds": {"grid": cand.n_grid, "certified": cand.n_cert, "grid_points": cand.grid_points},
        "evidence": {str(j): cand.evidence[j] for j in sorted(cand.evidence)},
        "uncertified": list(cand.uncertified),
        "polynomials": polys,
    }
    caveats = []
    if cand.uncertified:
        caveats.append(f"frequencies {cand.uncertified} kept without a nonvanishing proof")
    report["caveats"] = caveats
    return report, EXIT_OK


def cmd_index(cfg: RunConfig) -> tuple[dict, int]:
    radii = cfg.radii
    if cfg.self_test:
        x = parse_poly("l1", ["l1", "l2"])
        y = parse_poly("l2", ["l1", "l2"])
        res = winding_index(PlanarMap(x, y, (0, 0)), radii[0] if radii else Fraction(1, 100), radii)
        return {"self_test": True, "map": ["l1", "l2"], "value": res.value, "index": res.to_json()}, (
            EXIT_OK if res.value == 1 else EXIT_INCONSISTENT
        )
    model = _resolve(cfg)
    if model.k != 2:
        raise UsageError("index needs a two-parameter model")
    if not cfg.js:
        raise UsageError("index needs --j")
    j = cfg.js[0]
    F = detecting_poly(model, j)
    t = time.perf_counter()
    res = index_of(test_function(cfg.g), F, radii[0] if radii else Fraction(1, 100), radii)
    cfg.tick("index", t)
    return {
        "model": model.name,
        "j": j,
        "g": cfg.g,
        "value": res.value,
        "index": res.to_json(),
        "caveats": [],
    }, EXIT_OK


def _classify(cfg: RunConfig, trace_resolution):
    model = _resolve(cfg)
    t = time.perf_counter()
    kw = {} if cfg.radii is None else {"radii": cfg.radii}
    rep = classify_disk(
        model,
        disk_radius=cfg.disk_radius,
        box=cfg.box,
        trace_resolution=trace_resolution,
        jobs=cfg.jobs,
        **kw,
    )
    cfg.tick("classify", t)
    return model, rep


def cmd_branches(cfg: RunConfig) -> tuple[dict, int]:
    model, rep = _classify(cfg, None)
    data = rep.to_json()
    if cfg.js is not None:
        data["frequencies"] = [f for f in data["frequencies"] if f["j"] in cfg.js]
    return data, EXIT_OK if rep.consistent else EXIT_INCONSISTENT


def cmd_classify(cfg: RunConfig) -> tuple[dict, int]:
    model, rep = _classify(cfg, cfg.grid or 256)
    geoms = [f.geometry for f in rep.frequencies if f.geometry is not None]
    _emit_figures(cfg, model, geoms)
    return rep.to_json(), EXIT_OK if rep.consistent else EXIT_INCONSISTENT


def cmd_trace(cfg: RunConfig) -> tuple[dict, int]:
    model = _resolve(cfg)
    cand = candidate_js(model, cfg.box)
    js = cfg.js if cfg.js is not None else list(cand.candidates)
    t = time.perf_counter()
    geoms = []
    entries = []
    for j in js:
        F = detecting_poly(model, j)
        label = period_label(j)
        if model.k == 2:
            zs = trace2d(F, cfg.box, cfg.grid or 256, disk_radius=cfg.disk_radius, label=label, j=j)
            geoms.append(zs)
            entries.append({
                "j": j,
                "period": label,
                "components": len(zs.components),
                "per_quadrant": list(zs.quadrant_counts()),
                "closed": sum(1 for c in zs.components if c.closed),
                "max_residual": float(f"{zs.max_residual:.3e}"),
            })
        elif model.k == 3:
            mesh = trace3d(F, cfg.box, cfg.grid or 48, j=j, label=label)
            geoms.append(mesh)
            entries.append({
                "j": j,
                "period": label,
                "vertices": len(mesh.vertices),
                "triangles": len(mesh.triangles),
                "open_edges": mesh.open_interior_edges(),
                "max_residual": float(f"{mesh.max_residual:.3e}"),
            })
        else:
            raise UsageError("trace handles two or three parameters")
    cfg.tick("trace", t)
    _emit_figures(cfg, model, geoms)
    return {
        "model": model.name,
        "box": cfg.box.to_json(),
        "disk_radius": str(cfg.disk_radius),
        "candidates": list(cand.candidates),
        "traced": entries,
        "caveats": [],
    }, EXIT_OK


def _emit_figures(cfg: RunConfig, model, geoms):
    planar = [g for g in geoms if hasattr(g, "components")]
    spatial = [g for g in geoms if hasattr(g, "triangles")]
    title = f"{model.name}: zero sets of the detecting functions"
    if cfg.svg:
        if model.k != 2:
            raise UsageError("--svg needs a two-parameter model")
        emit_svg(planar, cfg.svg, float(cfg.disk_radius), title=title)
    if cfg.obj:
        if model.k != 3:
            raise UsageError("--obj needs a three-parameter model")
        emit_obj(spatial, cfg.obj, comment=title)
    if cfg.png:
        from .plotting import plot_curves, plot_surfaces

        if model.k == 2:
            plot_curves(planar, cfg.png, float(cfg.disk_radius), title=title)
        else:
            plot_surfaces(spatial, cfg.png, title=title)


COMMANDS = {
    "detect": cmd_detect,
    "index": cmd_index,
    "branches": cmd_branches,
    "classify": cmd_classify,
    "trace": cmd_trace,
}


def run(cfg: RunConfig) -> tuple[dict, int]:
    report, status = COMMANDS[cfg.command](cfg)
    report["timings"] = dict(cfg._clock) if cfg.timings else {}
    return report, status


def render(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        report, status = run(cfg)
    except UsageError as exc:
        parser.error(str(exc))
    except (ModelError, PolySyntaxError, OSError, DegreeError, BranchError, TraceError, EigenError, ValueError) as exc:
        print(f"hambif: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = render(report)
    if cfg.out:
        _atomic_write(cfg.out, text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
