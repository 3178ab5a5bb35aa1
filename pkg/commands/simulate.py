import sys
from functools import partial
from multiprocessing import Pool

from commands.common import (
    add_problem_arguments,
    add_start_arguments,
    branch_path,
    check_outputs,
    finite_float,
    positive_float,
    positive_int,
    resolve_problem,
    resolve_start,
)
from utils.export.csv_exporter import export_json, export_trajectory_csv
from utils.export.svg_exporter import render_trajectory_svg
from utils.physics.classify import classify_point
from utils.physics.dynamics import drift_summary, integrate_window
from utils.physics.initcond import initial_states
from utils.physics.model import COLLISION_RADIUS
from utils.system.errors import OutsideAllowedRegion, ValidationError
from utils.system.logger import get_logger

logger = get_logger()

HELP = "integrate the full two-particle system from one or all velocity branches"


def add_arguments(parser):
    add_problem_arguments(parser)
    add_start_arguments(parser)
    parser.add_argument("--branch", default="0", help="branch index or 'all'")
    parser.add_argument("--t-max", dest="t_max", type=finite_float, required=True)
    parser.add_argument("--t-min", dest="t_min", type=finite_float, default=0.0, help="<= 0; integrates backwards from t = 0")
    parser.add_argument("--samples", type=positive_int, default=1000)
    parser.add_argument("--tol", type=positive_float, default=1e-10)
    parser.add_argument("--collision-radius", dest="collision_radius", type=positive_float, default=COLLISION_RADIUS)
    parser.add_argument("--csv", help="trajectory CSV (suffixed _b<i> with --branch all)")
    parser.add_argument("--svg", help="orbit plot (suffixed _b<i> with --branch all)")
    parser.add_argument("--workers", type=positive_int, default=1, help="process pool size for --branch all")


def parse_branch(text):
    if text == "all":
        return None
    try:
        index = int(text)
    except ValueError:
        raise ValidationError(f"--branch must be an integer or 'all', got '{text}'")
    if index < 0:
        raise ValidationError(f"--branch must be >= 0, got {index}")
    return index


def _integrate(state, cfg, args):
    return integrate_window(state, cfg, args["t_min"], args["t_max"], args["tol"], args["samples"], args["collision_radius"])


def run(args):
    wanted = parse_branch(args.branch)
    if args.t_min > 0 or args.t_max < 0 or args.t_max == args.t_min:
        raise ValidationError(f"need t_min <= 0 <= t_max with t_min < t_max, got [{args.t_min}, {args.t_max}]")
    check_outputs(args.csv, args.svg)
    cfg, mc = resolve_problem(args)
    q, X0, Y0 = resolve_start(args)

    states = initial_states(X0, Y0, q, mc, cfg)
    if not states:
        raise OutsideAllowedRegion(f"no velocity branch at q = ({q.q1}, {q.q2}) for h = {mc.h}, lambda = {mc.lam}")
    if wanted is not None and wanted >= len(states):
        raise ValidationError(f"--branch {wanted} requested but only {len(states)} branches exist")
    selected = states if wanted is None else [states[wanted]]

    window = {
        "t_min": args.t_min,
        "t_max": args.t_max,
        "tol": args.tol,
        "samples": args.samples,
        "collision_radius": args.collision_radius,
    }
    job = partial(_integrate, cfg=cfg, args=window)
    if args.workers > 1 and len(selected) > 1:
        with Pool(min(args.workers, len(selected))) as pool:
            trajectories = pool.map(job, [state for _, state in selected])
    else:
        trajectories = [job(state) for _, state in selected]

    report = classify_point(mc, cfg)
    summaries = []
    for (branch, _), traj in zip(selected, trajectories):
        csv_path, svg_path = args.csv, args.svg
        if wanted is None:
            csv_path = csv_path and branch_path(csv_path, branch.branch_index)
            svg_path = svg_path and branch_path(svg_path, branch.branch_index)
        if csv_path:
            export_trajectory_csv(traj, csv_path)
        if svg_path:
            render_trajectory_svg(traj, svg_path, report=report, title=f"branch {branch.branch_index}: {traj.termination}")

        summaries.append(
            {
                "branch": branch.branch_index,
                "qdot1": branch.qdot1,
                "qdot2": branch.qdot2,
                "termination": traj.termination,
                "t_start": float(traj.t[0]),
                "t_end": float(traj.t[-1]),
                "samples": len(traj),
                "max_drift": traj.max_drift(),
                "center_of_mass": drift_summary(traj).as_dict(),
            }
        )
        logger.info(f"Branch {branch.branch_index}: {traj.termination} after {len(traj)} samples")

    sys.stdout.write(export_json(summaries) + "\n")
    return f"{len(summaries)} trajectories"
