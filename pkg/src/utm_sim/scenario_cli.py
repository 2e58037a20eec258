"""Scenario files, result export, and the `utm-sim` command line.

A scenario is a single JSON document: workspace bounds, rectangle obstacles,
UAV missions, and one flat `params` table. Parameter keys shared by several
components (kp, dt, dist_wp, dist_uav, dist_obs) fan out to every component
that has the field, so a file cannot drive two components with divergent
values. Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Sequence

from .apf_core import ApfParams
from .geom2d import Bounds, Vec2, point_rect_distance
from .metrics import COLLISION_MARKER, RunReport, build_report, pairwise_distances
from .obstacle_field import (DEFAULT_CIRCLE_RADIUS, DEFAULT_CIRCLE_SPACING,
                             RectObstacle)
from .rrt_planner import PlannerParams, PlanningError
from .sim_engine import (DEFAULT_UAV_RADIUS, SimParams, SimResult, plan_paths,
                         run, run_planned)
from .vo_core import VoParams


class ScenarioError(Exception):
    """Scenario file is malformed or semantically invalid."""


_ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")

_TOP_KEYS = {"name", "bounds", "rectangles", "uavs", "params"}
_BOUNDS_KEYS = {"min_x", "min_y", "max_x", "max_y"}
_RECT_KEYS = {"id", "center", "width", "height"}
_UAV_KEYS = {"id", "start", "goal"}
_PARAM_KEYS = {
    "kp", "dt", "dist_wp", "dist_uav", "dist_obs", "max_steps",
    "theta_step", "mag_step", "k_att", "k_rep",
    "step_size", "goal_bias", "max_iters", "goal_radius", "inflation",
    "uav_radius", "obstacle_circle_radius", "circle_spacing",
}
_INT_PARAMS = {"max_steps", "max_iters"}


@dataclass(frozen=True)
class UavSpec:
    id: str
    start: Vec2
    goal: Vec2


@dataclass
class Scenario:
    name: str
    bounds: Bounds
    rectangles: tuple[RectObstacle, ...]
    uavs: tuple[UavSpec, ...]
    sim: SimParams
    vo: VoParams
    apf: ApfParams
    planner: PlannerParams
    uav_radius: float
    circle_radius: float
    circle_spacing: float


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ScenarioError(msg)


def _check_keys(obj: dict, allowed: set[str], ctx: str) -> None:
    unknown = set(obj) - allowed
    _require(not unknown, f"{ctx}: unknown fields {sorted(unknown)}")


def _num(value: Any, ctx: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{ctx} must be a number, got {value!r}")
    v = float(value)
    if not math.isfinite(v):
        raise ScenarioError(f"{ctx} must be finite, got {value!r}")
    return v


def _int_value(value: Any, ctx: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{ctx} must be an integer, got {value!r}")
    return value


def _vec(value: Any, ctx: str) -> Vec2:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise ScenarioError(f"{ctx} must be a two-element [x, y] list")
    return Vec2(_num(value[0], f"{ctx}[0]"), _num(value[1], f"{ctx}[1]"))


def _id(value: Any, ctx: str) -> str:
    _require(isinstance(value, str) and bool(_ID_RE.match(value)),
             f"{ctx} must be a non-empty string of [A-Za-z0-9_-], got {value!r}")
    return value


def load_scenario(path: str | Path) -> Scenario:
    """Parse and fully validate one scenario file.

    Raises ScenarioError for malformed JSON or any semantic problem; raises
    OSError when the file cannot be read.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON: {exc}") from exc
    _require(isinstance(doc, dict), f"{path}: top level must be a JSON object")
    _check_keys(doc, _TOP_KEYS, str(path))

    name = doc.get("name", path.stem)
    _require(isinstance(name, str) and name != "", "name must be a non-empty string")

    bdoc = doc.get("bounds", {"min_x": 0.0, "min_y": 0.0, "max_x": 400.0, "max_y": 400.0})
    _require(isinstance(bdoc, dict), "bounds must be an object")
    _check_keys(bdoc, _BOUNDS_KEYS, "bounds")
    _require(set(bdoc) == _BOUNDS_KEYS, "bounds needs min_x, min_y, max_x, max_y")
    try:
        bounds = Bounds(*(_num(bdoc[k], f"bounds.{k}") for k in ("min_x", "min_y", "max_x", "max_y")))
    except ValueError as exc:
        raise ScenarioError(f"bounds: {exc}") from exc

    rects: list[RectObstacle] = []
    rdocs = doc.get("rectangles", [])
    _require(isinstance(rdocs, list), "rectangles must be a list")
    for i, rdoc in enumerate(rdocs):
        ctx = f"rectangles[{i}]"
        _require(isinstance(rdoc, dict), f"{ctx} must be an object")
        _check_keys(rdoc, _RECT_KEYS, ctx)
        _require(set(rdoc) == _RECT_KEYS, f"{ctx} needs id, center, width, height")
        try:
            rects.append(RectObstacle(
                center=_vec(rdoc["center"], f"{ctx}.center"),
                width=_num(rdoc["width"], f"{ctx}.width"),
                height=_num(rdoc["height"], f"{ctx}.height"),
                id=_id(rdoc["id"], f"{ctx}.id"),
            ))
        except ValueError as exc:
            raise ScenarioError(f"{ctx}: {exc}") from exc
    rect_ids = [r.id for r in rects]
    _require(len(set(rect_ids)) == len(rect_ids), "rectangle ids must be unique")

    udocs = doc.get("uavs")
    _require(isinstance(udocs, list) and len(udocs) > 0,
             "uavs must be a non-empty list")
    uavs: list[UavSpec] = []
    for i, udoc in enumerate(udocs):
        ctx = f"uavs[{i}]"
        _require(isinstance(udoc, dict), f"{ctx} must be an object")
        _check_keys(udoc, _UAV_KEYS, ctx)
        _require(set(udoc) == _UAV_KEYS, f"{ctx} needs id, start, goal")
        uavs.append(UavSpec(
            id=_id(udoc["id"], f"{ctx}.id"),
            start=_vec(udoc["start"], f"{ctx}.start"),
            goal=_vec(udoc["goal"], f"{ctx}.goal"),
        ))
    uav_ids = [u.id for u in uavs]
    _require(len(set(uav_ids)) == len(uav_ids), "uav ids must be unique")

    pdoc = doc.get("params", {})
    _require(isinstance(pdoc, dict), "params must be an object")
    _check_keys(pdoc, _PARAM_KEYS, "params")
    p: dict[str, float | int] = {}
    for key, raw in pdoc.items():
        p[key] = (_int_value(raw, f"params.{key}") if key in _INT_PARAMS
                  else _num(raw, f"params.{key}"))

    uav_radius = float(p.get("uav_radius", DEFAULT_UAV_RADIUS))
    circle_radius = float(p.get("obstacle_circle_radius", DEFAULT_CIRCLE_RADIUS))
    circle_spacing = float(p.get("circle_spacing", DEFAULT_CIRCLE_SPACING))
    _require(uav_radius > 0.0, "params.uav_radius must be > 0")
    _require(circle_radius > 0.0, "params.obstacle_circle_radius must be > 0")
    _require(circle_spacing < 2.0 * circle_radius,
             "params.circle_spacing must be < 2 * obstacle_circle_radius")

    try:
        sim = SimParams(
            dt=float(p.get("dt", 0.1)),
            kp=float(p.get("kp", 0.2)),
            dist_wp=float(p.get("dist_wp", 10.0)),
            max_steps=int(p.get("max_steps", 20_000)),
        )
        vo = VoParams(
            theta_step=float(p.get("theta_step", 0.2)),
            mag_step=float(p.get("mag_step", 0.2)),
            dist_uav=float(p.get("dist_uav", 50.0)),
            dist_obs=float(p.get("dist_obs", 20.0)),
            kp=float(p.get("kp", 0.2)),
        )
        apf = ApfParams(
            k_att=float(p.get("k_att", 8.0)),
            k_rep=float(p.get("k_rep", 15.0)),
            dt=float(p.get("dt", 0.1)),
            dist_wp=float(p.get("dist_wp", 10.0)),
            dist_uav=float(p.get("dist_uav", 50.0)),
            dist_obs=float(p.get("dist_obs", 20.0)),
        )
        planner = PlannerParams(
            step_size=float(p.get("step_size", 10.0)),
            goal_bias=float(p.get("goal_bias", 0.05)),
            max_iters=int(p.get("max_iters", 10_000)),
            goal_radius=float(p.get("goal_radius", 10.0)),
            inflation=float(p.get("inflation", uav_radius)),
            bounds=bounds,
        )
    except ValueError as exc:
        raise ScenarioError(f"params: {exc}") from exc

    for u in uavs:
        for label, pt in (("start", u.start), ("goal", u.goal)):
            _require(bounds.contains(pt),
                     f"uav '{u.id}' {label} {pt} lies outside the workspace bounds")
            for r in rects:
                _require(point_rect_distance(pt, r) > planner.inflation,
                         f"uav '{u.id}' {label} {pt} lies within the inflated "
                         f"obstacle '{r.id}'")

    return Scenario(
        name=name,
        bounds=bounds,
        rectangles=tuple(rects),
        uavs=tuple(uavs),
        sim=sim,
        vo=vo,
        apf=apf,
        planner=planner,
        uav_radius=uav_radius,
        circle_radius=circle_radius,
        circle_spacing=circle_spacing,
    )


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    """Write a scenario as JSON with every parameter explicit.

    Loading the written file reproduces the scenario exactly (round-trip).
    """
    doc = {
        "name": scenario.name,
        "bounds": {
            "min_x": scenario.bounds.min_x,
            "min_y": scenario.bounds.min_y,
            "max_x": scenario.bounds.max_x,
            "max_y": scenario.bounds.max_y,
        },
        "rectangles": [
            {"id": r.id, "center": [r.center.x, r.center.y],
             "width": r.width, "height": r.height}
            for r in scenario.rectangles
        ],
        "uavs": [
            {"id": u.id, "start": [u.start.x, u.start.y], "goal": [u.goal.x, u.goal.y]}
            for u in scenario.uavs
        ],
        "params": {
            "kp": scenario.sim.kp,
            "dt": scenario.sim.dt,
            "dist_wp": scenario.sim.dist_wp,
            "max_steps": scenario.sim.max_steps,
            "dist_uav": scenario.vo.dist_uav,
            "dist_obs": scenario.vo.dist_obs,
            "theta_step": scenario.vo.theta_step,
            "mag_step": scenario.vo.mag_step,
            "k_att": scenario.apf.k_att,
            "k_rep": scenario.apf.k_rep,
            "step_size": scenario.planner.step_size,
            "goal_bias": scenario.planner.goal_bias,
            "max_iters": scenario.planner.max_iters,
            "goal_radius": scenario.planner.goal_radius,
            "inflation": scenario.planner.inflation,
            "uav_radius": scenario.uav_radius,
            "obstacle_circle_radius": scenario.circle_radius,
            "circle_spacing": scenario.circle_spacing,
        },
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def export_result(result: SimResult, report: RunReport, out_dir: str | Path) -> None:
    """Write trajectories.csv, distances.csv, events.json, and report.json.

    Output is byte-deterministic for identical results: fixed 6-decimal CSV
    formatting, sorted JSON keys.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    lines = ["t,uav_id,x,y,vx,vy"]
    ids = list(result.trajectories)
    n_samples = len(result.trajectories[ids[0]]) if ids else 0
    for i in range(n_samples):
        for uid in ids:
            s = result.trajectories[uid][i]
            lines.append(",".join((
                _fmt(s.t), uid, _fmt(s.position.x), _fmt(s.position.y),
                _fmt(s.velocity.x), _fmt(s.velocity.y),
            )))
    (out / "trajectories.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    positions = {uid: [s.position for s in samples]
                 for uid, samples in result.trajectories.items()}
    series, _ = pairwise_distances(positions)
    header = ["t"] + [f"{a}-{b}" for (a, b) in series]
    rows = [",".join(header)]
    times = [s.t for s in result.trajectories[ids[0]]] if ids else []
    for i, t in enumerate(times):
        rows.append(",".join([_fmt(t)] + [_fmt(ds[i]) for ds in series.values()]))
    (out / "distances.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    events = [
        {"t": ev.t, "kind": ev.kind, "details": ev.details} for ev in result.events
    ]
    (out / "events.json").write_text(
        json.dumps(events, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    rep = {
        "algorithm": report.algorithm,
        "completed": report.completed,
        "steps": report.steps,
        "path_lengths": {
            uid: ("collision" if length is None else length)
            for uid, length in report.path_lengths.items()
        },
        "pair_min_distances": {
            f"{a}-{b}": d for (a, b), d in report.pair_min_distances.items()
        },
        "collision_counts": report.collision_counts,
        "empty_feasible_set_events": report.empty_feasible_set_events,
        "event_counts": report.event_counts,
    }
    (out / "report.json").write_text(
        json.dumps(rep, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _parse_seed_range(text: str) -> list[int]:
    m = re.fullmatch(r"(-?\d+)(?:\.\.(-?\d+))?", text)
    if m is None:
        raise ScenarioError(f"bad seed range {text!r}; expected N or N0..N1")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) is not None else lo
    if hi < lo:
        raise ScenarioError(f"bad seed range {text!r}: end below start")
    return list(range(lo, hi + 1))


def _path_cell(length: float | None) -> str:
    return COLLISION_MARKER if length is None else f"{length:.2f}"


def _cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    sim = replace(scenario.sim, algorithm=args.algo)
    if args.max_steps is not None:
        sim = replace(sim, max_steps=args.max_steps)
    result = run(scenario, sim, args.seed)
    report = build_report(result)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_scenario(scenario, out / "scenario.json")
    export_result(result, report, out)

    status = "completed" if result.completed else "max-steps cutoff"
    print(f"scenario '{scenario.name}' algo={args.algo} seed={args.seed}: "
          f"{status} after {result.steps} steps (t={result.steps * sim.dt:.1f} s)")
    print(f"collisions: uav-uav {report.collision_counts['uav_uav_collision']}, "
          f"uav-obstacle {report.collision_counts['uav_obstacle_collision']}; "
          f"empty feasible sets: {report.empty_feasible_set_events}")
    for uid, length in report.path_lengths.items():
        print(f"  {uid}: path {_path_cell(length)} m")
    print(f"wrote {out}/{{trajectories.csv,distances.csv,events.json,report.json,scenario.json}}")
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    paths = plan_paths(scenario, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["uav_id,waypoint_index,x,y"]
    for uid, path in paths.items():
        for i, wp in enumerate(path.waypoints):
            lines.append(f"{uid},{i},{_fmt(wp.x)},{_fmt(wp.y)}")
    (out / "waypoints.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for uid, path in paths.items():
        print(f"{uid}: {len(path)} waypoints, {path.length():.2f} m")
    print(f"wrote {out}/waypoints.csv")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    seeds = _parse_seed_range(args.seeds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_lines = ["seed,uav_id,vo_path_length,apf_path_length"]
    for seed in seeds:
        paths = plan_paths(scenario, seed)
        reports: dict[str, RunReport] = {}
        for algo in ("vo", "apf"):
            result = run_planned(scenario, replace(scenario.sim, algorithm=algo), paths)
            reports[algo] = build_report(result)
            export_result(result, reports[algo], out / f"seed_{seed}" / algo)
        print(f"seed {seed}:")
        print(f"  {'uav':<12}{'vo_path_m':>12}{'apf_path_m':>12}")
        for u in scenario.uavs:
            vo_len = reports["vo"].path_lengths[u.id]
            apf_len = reports["apf"].path_lengths[u.id]
            print(f"  {u.id:<12}{_path_cell(vo_len):>12}{_path_cell(apf_len):>12}")
            csv_lines.append(f"{seed},{u.id},{_path_cell(vo_len)},{_path_cell(apf_len)}")
    (out / "compare.csv").write_text("\n".join(csv_lines) + "\n", encoding="utf-8")
    print(f"wrote {out}/compare.csv")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="utm-sim",
        description="Plan, simulate, and compare multi-UAV collision avoidance runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="plan paths and simulate one algorithm")
    p_run.add_argument("--scenario", required=True, help="scenario JSON file")
    p_run.add_argument("--algo", required=True, choices=["vo", "apf"])
    p_run.add_argument("--seed", required=True, type=int)
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--max-steps", type=int, default=None,
                       help="override the scenario step budget")
    p_run.set_defaults(func=_cmd_run)

    p_plan = sub.add_parser("plan", help="plan waypoint paths only")
    p_plan.add_argument("--scenario", required=True)
    p_plan.add_argument("--seed", required=True, type=int)
    p_plan.add_argument("--out", required=True)
    p_plan.set_defaults(func=_cmd_plan)

    p_cmp = sub.add_parser("compare",
                           help="run both algorithms over shared plans and seeds")
    p_cmp.add_argument("--scenario", required=True)
    p_cmp.add_argument("--seeds", required=True,
                       help="seed range N0..N1 (inclusive) or a single seed")
    p_cmp.add_argument("--out", required=True)
    p_cmp.set_defaults(func=_cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except PlanningError as exc:
        print(f"planning error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
