"""Command-line front end.

    curvdev perimeter   --scene S.json
    curvdev deviate     --scene S.json
    curvdev approximate --scene S.json --n 3 --mode free --seed 42
    curvdev dowker      --scene S.json --n-min 3 --n-max 8
    curvdev expansion   --scene S.json
    curvdev sphere-cex  --r 1.4707963 --d-min 1.4707963 --d-max 1.52 --steps 2000

CSV goes to stdout unless ``--csv`` names a file; ``--svg`` adds a figure.
A short human-readable summary goes to stderr.  Exit status is 0 on
success, 2 for invalid input and 1 when a numerical step fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import approximator, deviation, sphere_cex, verification
from .discs import Circle, DiscError, KleinSmooth, Polygon, PolygonDisc, regular_polygon
from .geom_core import Geometry, GeometryError

EXIT_OK, EXIT_NUMERIC, EXIT_INVALID = 0, 1, 2


class SceneError(ValueError):
    """Scene text that does not describe a valid configuration."""


# -- scenes -----------------------------------------------------------------

def load_schema() -> dict:
    return json.loads(resources.files("curvdev").joinpath("scene.schema.json").read_text())


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


@dataclass
class Scene:
    geometry: Geometry
    disc_kind: str
    disc: dict
    polygon_kind: str | None = None
    polygon: dict | None = None
    run: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"geometry": self.geometry.label, "disc": {self.disc_kind: self.disc}}
        if self.polygon_kind is not None:
            out["polygon"] = {self.polygon_kind: self.polygon}
        if self.run:
            out["run"] = dict(self.run)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _default_center(g: Geometry) -> list:
    return [0.0, 0.0, 1.0] if g is Geometry.SPHERICAL else [0.0, 0.0]


def parse_scene(text: str) -> Scene:
    """Parse and validate scene JSON.  Defaults are filled in, so a dumped
    scene parses back to an equal one."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SceneError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    validator = jsonschema.Draft202012Validator(load_schema())
    err = jsonschema.exceptions.best_match(validator.iter_errors(raw))
    if err is not None:
        raise SceneError(f"{_json_path(err.absolute_path)}: {err.message}")
    g = Geometry.from_name(raw["geometry"])
    (disc_kind, disc), = raw["disc"].items()
    disc = json.loads(json.dumps(disc))
    if disc_kind == "circle":
        disc.setdefault("center", _default_center(g))
        disc["center"] = [float(v) for v in disc["center"]]
        disc["radius"] = float(disc["radius"])
    elif disc_kind == "smooth":
        disc = {"c0": float(disc["c0"]), "cos": [float(v) for v in disc.get("cos", [])],
                "sin": [float(v) for v in disc.get("sin", [])]}
    else:
        disc = {"vertices": [[float(v) for v in p] for p in disc["vertices"]]} \
            if "vertices" in disc else _regular_defaults(g, disc["regular"], True)
    pkind, poly = None, None
    if "polygon" in raw:
        (pkind, poly), = raw["polygon"].items()
        if pkind == "vertices":
            poly = [[float(v) for v in p] for p in poly]
        else:
            poly = _regular_defaults(g, poly, False)
    run = dict(raw.get("run", {}))
    if "tol" in run:
        run["tol"] = float(run["tol"])
    if "t" in run:
        run["t"] = float(run["t"])
    scene = Scene(g, disc_kind, disc, pkind, poly, run)
    build_disc(scene)
    if pkind is not None:
        build_polygon(scene)
    return scene


def _regular_defaults(g, entry, wrap):
    out = {"n": int(entry["n"]), "circumradius": float(entry["circumradius"]),
           "center": [float(v) for v in entry.get("center", _default_center(g))],
           "phase": float(entry.get("phase", 0.0))}
    return {"regular": out} if wrap else out


def _polygon_from(g, kind, entry, where) -> Polygon:
    try:
        if kind == "vertices":
            return Polygon(g, np.array(entry, dtype=float))
        return regular_polygon(g, entry["n"], entry["circumradius"], entry["center"], entry["phase"])
    except (DiscError, GeometryError) as e:
        raise SceneError(f"{where}: {e}") from None


def build_disc(scene: Scene):
    g, d = scene.geometry, scene.disc
    where = f"$.disc.{scene.disc_kind}"
    try:
        if scene.disc_kind == "circle":
            return Circle(g, d["center"], d["radius"])
        if scene.disc_kind == "smooth":
            return KleinSmooth(d["c0"], tuple(d["cos"]), tuple(d["sin"]), g)
    except (DiscError, GeometryError) as e:
        raise SceneError(f"{where}: {e}") from None
    (kind, entry), = d.items()
    return PolygonDisc(_polygon_from(g, kind, entry, f"{where}.{kind}"))


def build_polygon(scene: Scene):
    if scene.polygon_kind is None:
        return None
    return _polygon_from(scene.geometry, scene.polygon_kind, scene.polygon,
                         f"$.polygon.{scene.polygon_kind}")


def read_scene(path: str) -> Scene:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_scene(fh.read())
    except OSError as e:
        raise SceneError(f"cannot read scene {path}: {e.strerror}") from None


# -- output -----------------------------------------------------------------

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def write_csv(rows, header, dest):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    text = buf.getvalue()
    if dest:
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def note(msg: str):
    print(msg, file=sys.stderr)


def _coords(p):
    p = list(map(float, p))
    return p + [None] * (3 - len(p))


def _disc_outline(k, count=400):
    ts = k.period * np.arange(count) / count
    return k.boundary_points(ts)


# -- subcommands ------------------------------------------------------------

def cmd_perimeter(args, scene):
    k = build_disc(scene)
    p = build_polygon(scene)
    rows = [("disc", k.perimeter())]
    if p is not None:
        rows.append(("polygon", p.perimeter()))
    write_csv(rows, ["shape", "perimeter"], args.csv)
    if args.svg:
        from . import plotting
        plotting.shape_plot(args.svg, k.geometry, _disc_outline(k),
                            None if p is None else p.vertices, title="perimeter")


def cmd_deviate(args, scene):
    k = build_disc(scene)
    p = build_polygon(scene)
    if p is None:
        raise SceneError("$.polygon: deviate needs a polygon")
    res = deviation.dev(k, p, perspective=args.perspective)
    write_csv([(res.dev, res.per_K, res.per_P, res.per_intersection, res.crossing_count)],
              ["dev", "per_K", "per_P", "per_intersection", "crossings"], args.csv)
    note(f"dev = {res.dev:.10g} ({res.crossing_count} crossings)")
    if args.svg:
        from . import plotting
        from .geom_core import points_along
        inner = []
        for pc in res.decomposition:
            if pc.kind == "edge":
                inner.append(points_along(k.geometry, pc.start, pc.end, np.linspace(0, 1, 20)))
            else:
                t0, t1 = k.param_of(pc.start), k.param_of(pc.end)
                span = (t1 - t0) % k.period or k.period
                inner.append(k.boundary_points(t0 + span * np.linspace(0, 1, 60)))
        plotting.shape_plot(args.svg, k.geometry, _disc_outline(k), p.vertices, inner,
                            title=f"dev = {res.dev:.6g}")


def _run_value(args, scene, name, default):
    v = getattr(args, name, None)
    if v is not None:
        return v
    return scene.run.get(name, default)


def cmd_approximate(args, scene):
    k = build_disc(scene)
    n = _run_value(args, scene, "n", None)
    if n is None:
        raise approximator.UsageError("--n is required (or run.n in the scene)")
    mode = _run_value(args, scene, "mode", "inscribed")
    seed = _run_value(args, scene, "seed", 0)
    tol = _run_value(args, scene, "tol", 1e-12)
    starts = _run_value(args, scene, "starts", None)
    if mode == "inscribed":
        rep = approximator.best_inscribed(k, n, seed=seed, tol=tol,
                                          starts=starts or approximator.INSCRIBED_STARTS)
    else:
        ins = approximator.best_inscribed(k, n, seed=seed)
        rep = approximator.best_free(k, n, seed=seed, tol=tol,
                                     starts=starts or approximator.FREE_STARTS,
                                     workers=approximator.default_workers(), inscribed=ins)
    rows = [(rep.mode, rep.n_vertices, seed, rep.dev_value, i, *_coords(v), sd)
            for i, (v, sd) in enumerate(zip(rep.best_polygon.vertices, rep.vertex_signed_distances))]
    write_csv(rows, ["mode", "n", "seed", "dev", "vertex", "x", "y", "z", "signed_distance"],
              args.csv)
    off = max(abs(s) for s in rep.vertex_signed_distances)
    note(f"{rep.mode}: dev = {rep.dev_value:.10g}, max |vertex offset| = {off:.3g}, "
         f"converged = {rep.converged}")
    if args.svg:
        from . import plotting
        plotting.shape_plot(args.svg, k.geometry, _disc_outline(k), rep.best_polygon.vertices,
                            title=f"{rep.mode} n={n}: dev = {rep.dev_value:.6g}")


def cmd_dowker(args, scene):
    k = build_disc(scene)
    n_min = _run_value(args, scene, "n_min", 3)
    n_max = _run_value(args, scene, "n_max", 8)
    rows = approximator.dowker_table(k, n_min, n_max, seed=_run_value(args, scene, "seed", 0))
    write_csv([(r.n, r.p_inscribed, r.delta, r.d2_p, r.d2_delta) for r in rows],
              ["n", "p_inscribed", "delta", "d2_p", "d2_delta"], args.csv)
    d2p = [r.d2_p for r in rows if r.d2_p is not None]
    d2d = [r.d2_delta for r in rows if r.d2_delta is not None]
    note(f"max second difference of p(n): {max(d2p):.3g} (concave if <= 0)")
    note(f"min second difference of delta(n): {min(d2d):.3g} "
         "(delta = per K - p is convex wherever p is concave)")
    if args.svg:
        from . import plotting
        plotting.line_plot(args.svg, [r.n for r in rows],
                           {"p_inscribed": [r.p_inscribed for r in rows],
                            "delta": [r.delta for r in rows]},
                           "n", "length", title="inscribed perimeter and deviation")


def cmd_expansion(args, scene):
    k = build_disc(scene)
    t = _run_value(args, scene, "t", 0.0)
    nd = verification.prepare(k, t)
    fits = [verification.arc_coefficient_fit(nd), verification.parallel_defect_fit(nd),
            verification.oblique_defect_fit(nd)]
    rows = []
    for f in fits:
        rows += [(f.kind, *r) for r in verification.expansion_rows(f)]
    write_csv(rows, ["probe", "param", "s", "s_l", "defect", "estimate"], args.csv)
    note(f"curvature at the base point: {nd.kappa:.10g}")
    for f in fits:
        note(f"{f.kind}: exponent {f.exponent:.6g}, coefficient {f.coefficient:.8g}, "
             f"predicted {f.expected:.8g} (rel. error {f.relative_error:.2e})")
    note(f"oblique crossing: x(theta)/tan(theta) = {verification.crossing_ratio(fits[2]):.8g}, "
         f"predicted {2 / nd.kappa:.8g}")
    if args.svg:
        from . import plotting
        series = {f.kind: (list(f.grid), [pr.defect for pr in f.probes]) for f in fits}
        plotting.loglog_series(args.svg, series, "probe parameter (x, delta or theta)",
                               "arc minus chord", title="chord-arc defects")


def cmd_sphere_cex(args, scene):
    r = args.r if args.r is not None else sphere_cex.DEFAULT_R
    d_min = args.d_min if args.d_min is not None else r
    d_max = args.d_max if args.d_max is not None else sphere_cex.DEFAULT_D_MAX
    steps = args.steps if args.steps is not None else sphere_cex.DEFAULT_STEPS
    cfg = sphere_cex.CexConfig(r, d_min, d_max, steps)
    scan = sphere_cex.f_scan(cfg)
    write_csv(sphere_cex.csv_rows(scan), ["d", "l", "m", "s", "alpha", "f"], args.csv)
    cmp = sphere_cex.compare(r, steps)
    note(f"d* = {scan.d_star:.10g}, f(d*) = {scan.f_star:.10g}, interior = {scan.interior}")
    note(f"inscribed f = {cmp['f_inscribed']:.10g}; circumscribed f = {cmp['f_circumscribed']:.10g} "
         f"at d = {cmp['d_circumscribed']:.10g}")
    note("ordering (best first): " + " < ".join(cmp["ordering"]))
    if args.svg:
        from . import plotting
        plotting.line_plot(args.svg, scan.d, {"f": scan.f}, "circumradius d", "deviation f(r, d)",
                           title=f"r = {r:.6g}", mark=(scan.d_star, scan.f_star, "minimum"))


COMMANDS = {
    "perimeter": (cmd_perimeter, True),
    "deviate": (cmd_deviate, True),
    "approximate": (cmd_approximate, True),
    "dowker": (cmd_dowker, True),
    "expansion": (cmd_expansion, True),
    "sphere-cex": (cmd_sphere_cex, False),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--csv", metavar="FILE", help="write CSV here instead of stdout")
    common.add_argument("--svg", metavar="FILE", help="also render a figure")
    common.add_argument("--dump-scene", metavar="FILE",
                        help="write the validated scene, with defaults filled in")

    parser = argparse.ArgumentParser(prog="curvdev",
                                     description="Perimeter deviation of polygons from convex discs "
                                                 "in the plane, the hyperbolic plane and the sphere.")
    sub = parser.add_subparsers(dest="command", required=True)

    def scene_cmd(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--scene", metavar="FILE", required=True, help="scene JSON")
        return p

    scene_cmd("perimeter", "perimeter of the disc (and polygon)")
    p = scene_cmd("deviate", "perimeter deviation between the disc and the polygon")
    p.add_argument("--perspective", choices=["polygon", "disc"], default="polygon")
    p = scene_cmd("approximate", "best approximating n-gon")
    p.add_argument("--n", type=int)
    p.add_argument("--mode", choices=["inscribed", "free"])
    p.add_argument("--seed", type=int)
    p.add_argument("--starts", type=int)
    p.add_argument("--tol", type=float)
    p = scene_cmd("dowker", "maximum inscribed perimeter as a function of n")
    p.add_argument("--n-min", type=int, dest="n_min")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--seed", type=int)
    p = scene_cmd("expansion", "chord-arc expansions at a boundary point")
    p.add_argument("--t", type=float, help="boundary parameter of the base point")
    p = sub.add_parser("sphere-cex", parents=[common],
                       help="regular triangles around a spherical circle")
    p.add_argument("--r", type=float)
    p.add_argument("--d-min", type=float, dest="d_min")
    p.add_argument("--d-max", type=float, dest="d_max")
    p.add_argument("--steps", type=int)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID
    func, needs_scene = COMMANDS[args.command]
    try:
        scene = read_scene(args.scene) if needs_scene else None
        if args.dump_scene:
            if scene is None:
                raise SceneError("--dump-scene needs --scene")
            with open(args.dump_scene, "w", encoding="utf-8") as fh:
                fh.write(scene.dumps())
        func(args, scene)
    except verification.VerificationError as e:
        note(f"error: {e}")
        return EXIT_NUMERIC
    except (ValueError, OSError) as e:
        note(f"error: {e}")
        return EXIT_INVALID
    except (ArithmeticError, RuntimeError, np.linalg.LinAlgError) as e:
        note(f"numerical failure: {e}")
        return EXIT_NUMERIC
    return EXIT_OK


def main():
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error of ours
        sys.stderr.close()
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
