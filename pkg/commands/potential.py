from commands.common import add_problem_arguments, check_outputs, positive_float, resolve_config
from utils.export.svg_exporter import render_potential_svg

HELP = "contour plot of the reduced potential in the q-plane"


def add_arguments(parser):
    add_problem_arguments(parser, constants=False)
    parser.add_argument("--svg", required=True, help="output SVG")
    parser.add_argument("--extent", type=positive_float, help="half-width of the plotted square (default 2.5 max(a, 1))")


def run(args):
    check_outputs(args.svg)
    cfg = resolve_config(args)
    render_potential_svg(cfg, args.svg, extent=args.extent)
    return args.svg
