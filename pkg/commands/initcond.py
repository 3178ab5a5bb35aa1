import sys

from commands.common import add_problem_arguments, add_start_arguments, check_outputs, resolve_problem, resolve_start
from utils.export.csv_exporter import export_json
from utils.physics.initcond import initial_states

HELP = "every velocity branch and the matching two-particle initial state"


def add_arguments(parser):
    add_problem_arguments(parser)
    add_start_arguments(parser)
    parser.add_argument("--json", help="also write the records to this file")


def branch_records(states):
    return [{**branch.as_dict(), **state.as_dict()} for branch, state in states]


def run(args):
    check_outputs(args.json)
    cfg, mc = resolve_problem(args)
    q, X0, Y0 = resolve_start(args)

    records = branch_records(initial_states(X0, Y0, q, mc, cfg))
    sys.stdout.write(export_json(records, args.json) + "\n")
    return f"{len(records)} branches"
