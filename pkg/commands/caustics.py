import sys

from commands.common import add_problem_arguments, check_outputs, resolve_problem
from utils.export.csv_exporter import export_json
from utils.export.svg_exporter import render_region_svg
from utils.physics.classify import caustics, classify_point

HELP = "caustic curves of the allowed region, optionally drawn as SVG"


def add_arguments(parser):
    add_problem_arguments(parser)
    parser.add_argument("--svg", help="region plot with caustics and the Coulomb centre")
    parser.add_argument("--json", help="also write the curves to this file")


def run(args):
    check_outputs(args.svg, args.json)
    cfg, mc = resolve_problem(args)

    curves = caustics(mc, cfg)
    payload = [curve.as_dict() for curve in curves]
    if args.svg:
        render_region_svg(classify_point(mc, cfg), mc, cfg, args.svg)
    sys.stdout.write(export_json(payload, args.json) + "\n")
    return f"{len(curves)} caustics"
