import sys
from collections import Counter

from commands.common import check_outputs, finite_float, positive_int
from utils.data.config_utils import parse_range
from utils.export.csv_exporter import export_diagram_csv, export_json
from utils.export.svg_exporter import render_diagram_svg
from utils.physics.classify import scan_diagram
from utils.physics.model import config_from_scaled

HELP = "label a grid of the (h_a, lambda_a) plane at fixed alpha_a"


def add_arguments(parser):
    parser.add_argument("--alpha-a", dest="alpha_a", type=finite_float, required=True)
    parser.add_argument("--h-a", dest="h_range", default="-2:3:201", help="start:stop:count, endpoints included")
    parser.add_argument("--lambda-a", dest="lam_range", default="-2:4:241", help="start:stop:count, endpoints included")
    parser.add_argument("--svg", help="diagram plot")
    parser.add_argument("--csv", help="one row per cell: h_a, lambda_a, label")
    parser.add_argument("--workers", type=positive_int, default=1, help="process pool size")
    parser.add_argument("--progress", action="store_true", help="progress bar on stderr")


def run(args):
    h_values = parse_range("--h-a", args.h_range)
    lam_values = parse_range("--lambda-a", args.lam_range)
    config_from_scaled(args.alpha_a)
    check_outputs(args.svg, args.csv)

    scan = scan_diagram(args.alpha_a, h_values, lam_values, workers=args.workers, progress=args.progress)
    if args.csv:
        export_diagram_csv(scan, args.csv)
    if args.svg:
        render_diagram_svg(scan, args.svg)

    counts = Counter(key for row in scan.labels for key in row)
    summary = {
        "alpha_a": args.alpha_a,
        "cells": int(len(h_values) * len(lam_values)),
        "labels": scan.distinct_labels(),
        "counts": dict(sorted(counts.items())),
        "delta_zero_points": len(scan.delta_zero),
    }
    sys.stdout.write(export_json(summary) + "\n")
    return f"{summary['cells']} cells"
