import sys

from commands.common import add_problem_arguments, check_outputs, resolve_problem
from utils.export.csv_exporter import export_json
from utils.physics.classify import classify_point
from utils.physics.quartic import discriminant, params_for

HELP = "orbit type, allowed intervals and caustics of one (h, lambda) point"


def add_arguments(parser):
    add_problem_arguments(parser)
    parser.add_argument("--json", help="also write the report to this file")


def run(args):
    check_outputs(args.json)
    cfg, mc = resolve_problem(args)

    report = classify_point(mc, cfg)
    payload = {
        "config": cfg.as_dict(),
        "constants": mc.as_dict(),
        **report.as_dict(),
        "discriminant": discriminant(params_for(mc, cfg)),
    }
    sys.stdout.write(export_json(payload, args.json) + "\n")
    return ", ".join(payload["labels"])
