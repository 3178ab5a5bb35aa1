import sys

from commands.common import (
    add_problem_arguments,
    add_start_arguments,
    check_outputs,
    finite_float,
    positive_float,
    positive_int,
    resolve_problem,
    resolve_start,
)
from utils.export.csv_exporter import export_json
from utils.physics.dynamics import cross_check
from utils.physics.initcond import initial_states
from utils.physics.model import COLLISION_RADIUS
from utils.system.errors import OutsideAllowedRegion, ValidationError

HELP = "compare the full and the separated integrations in (u, v)"


def add_arguments(parser):
    add_problem_arguments(parser)
    add_start_arguments(parser)
    parser.add_argument("--branch", type=int, default=0)
    parser.add_argument("--t-max", dest="t_max", type=finite_float, required=True)
    parser.add_argument("--samples", type=positive_int, default=201)
    parser.add_argument("--tol", type=positive_float, default=1e-10)
    parser.add_argument("--collision-radius", dest="collision_radius", type=positive_float, default=COLLISION_RADIUS)
    parser.add_argument("--json", help="also write the report to this file")


def run(args):
    if args.t_max < 0:
        raise ValidationError("--t-max must be >= 0")
    if args.branch < 0:
        raise ValidationError("--branch must be >= 0")
    check_outputs(args.json)
    cfg, mc = resolve_problem(args)
    q, X0, Y0 = resolve_start(args)

    states = initial_states(X0, Y0, q, mc, cfg)
    if not states:
        raise OutsideAllowedRegion(f"no velocity branch at q = ({q.q1}, {q.q2})")
    if args.branch >= len(states):
        raise ValidationError(f"--branch {args.branch} requested but only {len(states)} branches exist")

    branch, state = states[args.branch]
    report = cross_check(state, cfg, mc, args.t_max, args.tol, args.samples, args.collision_radius)
    payload = {"branch": branch.branch_index, **report.as_dict()}
    sys.stdout.write(export_json(payload, args.json) + "\n")
    return f"max |du| = {report.max_du:.3e}, max |dv| = {report.max_dv:.3e}"
