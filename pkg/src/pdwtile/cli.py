"""Command line: ``pdwtile {gen,classify,realize,render}``.

Exit status 0 on completion, 1 on bad usage or unusable input, 2 when a
self-check fails (replay mismatch, a known chart lost, a realization that
does not close).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass

from . import __version__

log = logging.getLogger("pdwtile")

CONFIG_SCHEMA = "pdwtile.config/1"


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    faces: int | None = None
    pdw: int | None = None
    cls: str = "Q2"
    tile_type: int = 2
    convex: bool = False
    all_maps: bool = False
    tolerance: float = 1e-9
    workers: int = 1
    out: str | None = None
    replay: str | None = None
    seed_face: int = 0

    def validate(self) -> "RunConfig":
        for name in ("faces", "pdw"):
            F = getattr(self, name)
            if F is not None and (F < 6 or F % 2):
                raise UsageError(f"--{name.replace('_', '-')} must be even and at least 6, got {F}")
        if self.tile_type not in (2, 4):
            raise UsageError("--type is 2 or 4")
        if self.workers < 1:
            raise UsageError("--workers must be positive")
        if not self.tolerance > 0:
            raise UsageError("--tolerance must be positive")
        return self

    def to_json(self) -> dict:
        return {"schema": CONFIG_SCHEMA, "version": __version__, **asdict(self)}


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=False, separators=(",", ":"))


def _write_lines(path, lines) -> None:
    if path is None:
        for line in lines:
            print(line)
        return
    with open(path, "w") as fh:
        for line in lines:
            fh.write(line + "\n")


# ---------------------------------------------------------------------------
# gen


def cmd_gen(cfg: RunConfig, verify: str | None = None) -> int:
    from .maps import to_planar_code
    from .quadgen import degree_class_count, enumerate_quadrangulations, verify_planar_code

    if verify:
        with open(verify, "rb") as fh:
            rep = verify_planar_code(fh.read(), cfg.cls)
        print(_dump({"schema": "pdwtile.verify/1", **{k: v for k, v in rep.items()}}))
        return 0 if not rep["invalid"] and not rep["duplicates"] else 2
    if cfg.faces is None:
        raise UsageError("gen needs --faces")
    maps = enumerate_quadrangulations(cfg.faces, cfg.cls, cfg.workers)
    counts = degree_class_count(cfg.faces, maps)
    if cfg.out:
        with open(cfg.out, "wb") as fh:
            fh.write(to_planar_code(maps))
    print(f"F={cfg.faces} {cfg.cls}: {len(maps)} maps")
    print(", ".join(f"Δ={d}: {n}" for d, n in counts.items() if n))
    return 0


# ---------------------------------------------------------------------------
# classify


def cmd_classify(cfg: RunConfig) -> int:
    from . import pipeline as pp

    if cfg.replay:
        return _replay(cfg.replay)
    if cfg.all_maps:
        if cfg.faces is None:
            raise UsageError("--all-maps needs --faces")
        res = pp.classify_all_maps(cfg.faces, cfg.convex, cfg.tile_type, cfg.workers)
        summary = {k: v for k, v in res.items() if k != "records"}
        lines = [_dump(cfg.to_json())] + [_dump(r) for r in res["records"]] + [_dump(summary)]
        if cfg.out:
            _write_lines(cfg.out, lines)
        print(
            f"F={cfg.faces}: {res['excluded']}/{res['maps']} maps excluded "
            f"(fraction {res['fraction']:.4f}); by forbidden patterns alone "
            f"{res['excluded_by_pattern']}/{res['maps']} (fraction {res['pattern_fraction']:.4f})"
        )
        return 0
    if cfg.pdw is None:
        raise UsageError("classify needs --pdw F, --all-maps --faces F, or --replay FILE")
    rep = pp.classify_pdw(cfg.pdw, cfg.tile_type, cfg.convex, cfg.workers)
    summary = rep.summary()
    classes = rep.survivor_classes()
    summary["isohedral"] = {name: list(pp.is_isohedral_chart(C)) for name, C in sorted(classes.values(), key=lambda x: x[0])}
    lines = [_dump(cfg.to_json())] + [_dump(r.to_json()) for r in rep.records] + [_dump(summary)]
    if cfg.out:
        _write_lines(cfg.out, lines)
    print(f"F={cfg.pdw} type {cfg.tile_type} {'convex' if cfg.convex else 'concave allowed'}: "
          f"{len(rep.records)} candidates, stages {summary['stages']}")
    for name, (iso, k) in summary["isohedral"].items():
        print(f"survivor {name}: {'isohedral' if iso else 'non-isohedral'} ({k} tile orbit{'s' if k > 1 else ''})")
    if cfg.convex and f"P_{cfg.pdw}" not in rep.survivor_names():
        raise InvariantError(f"P_{cfg.pdw} did not survive")
    return 0


def _replay(path: str) -> int:
    from .pipeline import replay_record

    bad = 0
    n = 0
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{path}:{lineno}: not JSON ({exc})")
            n += 1
            if rec.get("schema") in ("pdwtile.verdict/1", "pdwtile.exclusion/1"):
                records.append(rec)
            elif rec.get("schema") == "pdwtile.summary/1":
                problems = _check_summary(rec, records)
                if problems:
                    bad += 1
                    print(f"line {lineno}: {'; '.join(problems)}")
                continue
            problems = replay_record(rec)
            if problems:
                bad += 1
                print(f"line {lineno}: {'; '.join(problems)}")
    print(f"replayed {n} lines, {bad} mismatches")
    return 2 if bad else 0


def _check_summary(summary: dict, records: list) -> list[str]:
    stages: dict[str, int] = {}
    for r in records:
        stages[r["stage"]] = stages.get(r["stage"], 0) + 1
    out = []
    if dict(sorted(stages.items())) != summary["stages"]:
        out.append("stage counts differ")
    names = sorted({r["name"] for r in records if r["stage"] == "survivor"})
    if names != summary["survivors"]:
        out.append("survivor names differ")
    return out


# ---------------------------------------------------------------------------
# realize / render


def _named_chart(name: str):
    from .chart import build_A, build_P, build_Q

    head, _, tail = name.partition("_")
    try:
        if head == "P":
            return build_P(int(tail), 2)
        if head == "P4":
            return build_P(int(tail), 4)
        if head == "Q":
            return build_Q(int(tail))
        if head == "A":
            return build_A(int(tail) if tail else 12)
    except ValueError as exc:
        raise UsageError(str(exc))
    raise UsageError(f"unknown chart name {name!r} (use P_F, P4_F, Q_F or A)")


def _load_chart(args):
    from .chart import ChartError, chart_from_json

    if args.named:
        return _named_chart(args.named)
    if args.chart:
        try:
            with open(args.chart) as fh:
                return chart_from_json(fh.read())
        except (OSError, ChartError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read chart {args.chart}: {exc}")
    raise UsageError("give --named NAME or --chart FILE")


def _parse_fix(items):
    out = {}
    for it in items or []:
        k, _, v = it.partition("=")
        try:
            out[int(k)] = float(v)
        except ValueError:
            raise UsageError(f"--fix expects INDEX=VALUE, got {it!r}")
    return out


def cmd_realize(cfg: RunConfig, args) -> int:
    from . import geom

    C = _load_chart(args)
    F = len(C.map.faces())
    if C.name.startswith("Q_"):
        rep = geom.reject_Q(F)
        out = {k: v for k, v in rep.items() if k != "records"}
        out["schema"] = "pdwtile.rejection/1"
        out["branches"] = ["concave: delta forced below 1", "convex: pole sum (F/4)(beta+gamma) exceeds 2"]
        print(_dump(out))
        if cfg.out:
            with open(cfg.out + ".json", "w") as fh:
                json.dump(rep, fh, indent=1)
        return 0 if rep["rejected_all"] else 2
    angles = [float(x) for x in args.angles.split(",")] if args.angles else None
    if angles is not None and len(angles) != 4:
        raise UsageError("--angles needs four comma-separated values (units of pi)")
    try:
        T = geom.realize_chart(C, angles=angles, fix=_parse_fix(args.fix), seed_face=cfg.seed_face,
                               convex=True if cfg.convex else None)
    except ValueError as exc:
        fail = {"schema": "pdwtile.realize-failure/1", "chart": C.name, "error": str(exc)}
        if angles is not None:
            fail["residual"] = geom.closure_defect(angles, C.tile_type)
        print(_dump(fail))
        return 1
    summary = {
        "schema": "pdwtile.realize/1",
        "chart": C.name,
        "tile_angles_pi": [float(x) for x in T.tile.angles],
        "lengths": list(T.tile.lengths),
        "concave": T.concave(),
        "closure_residual": T.closure_residual,
        "max_vertex_angle_error": T.max_vertex_error(),
        "max_gauss_bonnet_error": max(T.gauss_bonnet_errors),
        "corner_error": T.corner_error,
        "ok": T.closure_residual < cfg.tolerance and T.ok,
    }
    if summary["ok"]:
        from .pipeline import is_isohedral_chart

        iso, k = is_isohedral_chart(C)
        summary["chart_isohedral"] = {"isohedral": iso, "orbit_count": k}
        summary["geometric_isohedral"] = geom.geometric_isohedrality(T)
    print(_dump(summary))
    if cfg.out:
        with open(cfg.out + ".json", "w") as fh:
            json.dump(T.to_json(), fh, indent=1)
        with open(cfg.out + ".svg", "w") as fh:
            fh.write(geom.tiling_svg(T))
    if not summary["ok"]:
        print(f"residual {T.closure_residual:.3e} exceeds tolerance {cfg.tolerance:.1e}", file=sys.stderr)
        return 1 if angles is not None else 2
    return 0


def cmd_render(cfg: RunConfig, args) -> int:
    from .geom import tiling_from_json
    from .render import chart_svg, tiling_svg

    if args.tiling:
        try:
            with open(args.tiling) as fh:
                svg = tiling_svg(tiling_from_json(fh.read()))
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read tiling {args.tiling}: {exc}")
    else:
        svg = chart_svg(_load_chart(args))
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pdwtile", description="Quadrangulations, charts and spherical tilings.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out")
        sp.add_argument("--tolerance", type=float, default=1e-9)

    g = sub.add_parser("gen", help="enumerate quadrangulations, print p(F, Delta)")
    g.add_argument("--faces", type=int)
    g.add_argument("--class", dest="cls", choices=("Q2", "Q3"), default="Q2")
    g.add_argument("--verify", metavar="FILE", help="check an external planar-code file instead")
    common(g)

    c = sub.add_parser("classify", help="run the classification pipeline")
    c.add_argument("--pdw", type=int)
    c.add_argument("--faces", type=int)
    c.add_argument("--type", dest="tile_type", type=int, choices=(2, 4), default=2)
    c.add_argument("--convex", action="store_true")
    c.add_argument("--all-maps", action="store_true")
    c.add_argument("--replay", metavar="FILE")
    common(c)

    r = sub.add_parser("realize", help="solve a tile and place it on every face")
    r.add_argument("--named")
    r.add_argument("--chart")
    r.add_argument("--angles", help="alpha,beta,gamma,delta in units of pi")
    r.add_argument("--fix", action="append", metavar="INDEX=VALUE", help="pin a free parameter")
    r.add_argument("--convex", action="store_true")
    r.add_argument("--seed-face", type=int, default=0)
    common(r)

    d = sub.add_parser("render", help="draw a chart or a realized tiling as SVG")
    d.add_argument("--named")
    d.add_argument("--chart")
    d.add_argument("--tiling")
    common(d)
    return p


def _config(ns) -> RunConfig:
    return RunConfig(
        command=ns.command,
        faces=getattr(ns, "faces", None),
        pdw=getattr(ns, "pdw", None),
        cls=getattr(ns, "cls", "Q2"),
        tile_type=getattr(ns, "tile_type", 2),
        convex=getattr(ns, "convex", False),
        all_maps=getattr(ns, "all_maps", False),
        tolerance=ns.tolerance,
        workers=ns.workers,
        out=ns.out,
        replay=getattr(ns, "replay", None),
        seed_face=getattr(ns, "seed_face", 0),
    ).validate()


def main(argv=None) -> int:
    level = os.environ.get("PDW_CLASSIFY_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        cfg = _config(ns)
        if ns.command == "gen":
            return cmd_gen(cfg, ns.verify)
        if ns.command == "classify":
            return cmd_classify(cfg)
        if ns.command == "realize":
            return cmd_realize(cfg, ns)
        return cmd_render(cfg, ns)
    except UsageError as exc:
        print(f"pdwtile: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"pdwtile: self-check failed: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"pdwtile: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
