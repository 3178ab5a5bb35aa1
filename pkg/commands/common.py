"""Argument groups and problem resolution shared by the commands."""

import argparse
import math
import os

from utils.data.config_utils import read_config
from utils.physics.coords import QPoint
from utils.physics.model import config_from_scaled, constants_from_scaled, derive_config, scale_constants
from utils.system.errors import ValidationError


def finite_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a number")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"'{text}' is not finite")
    return value


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"'{text}' must be at least 1")
    return value


def positive_float(text):
    value = finite_float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"'{text}' must be positive")
    return value


# ===== Argument Groups =====
def add_problem_arguments(parser, constants=True):
    group = parser.add_argument_group("problem")
    group.add_argument("--config", help="key = value file with alpha, x0, y0, h, lambda (and optionally q1, q2, X0, Y0)")
    group.add_argument("--alpha", type=finite_float, help="coupling alpha (dimensionless)")
    group.add_argument("--x0", type=finite_float, help="oscillator-centre offset x0")
    group.add_argument("--y0", type=finite_float, help="oscillator-centre offset y0")
    group.add_argument("--alpha-a", dest="alpha_a", type=finite_float, help="scaled coupling alpha / a^3")
    if constants:
        group.add_argument("--h", type=finite_float, help="reduced energy h")
        group.add_argument("--lambda", dest="lam", type=finite_float, help="second invariant lambda")
        group.add_argument("--h-a", dest="h_a", type=finite_float, help="scaled energy h / a^2")
        group.add_argument("--lambda-a", dest="lam_a", type=finite_float, help="scaled invariant lambda / a^2")


def add_start_arguments(parser):
    group = parser.add_argument_group("starting point")
    group.add_argument("--q1", type=finite_float, help="initial relative position, q-frame")
    group.add_argument("--q2", type=finite_float)
    group.add_argument("--X0", type=finite_float, help="initial centre of mass (default 0)")
    group.add_argument("--Y0", type=finite_float)


# ===== Resolution =====
def _file_values(args):
    path = getattr(args, "config", None)
    if not path:
        return {}
    return read_config(path, required=("alpha", "x0", "y0"))


def _pick(args, attr, values, key):
    flag = getattr(args, attr, None)
    return flag if flag is not None else values.get(key)


def resolve_config(args):
    values = _file_values(args)
    alpha = _pick(args, "alpha", values, "alpha")
    x0 = _pick(args, "x0", values, "x0")
    y0 = _pick(args, "y0", values, "y0")

    if args.alpha_a is not None:
        if args.alpha is not None:
            raise ValidationError("give either --alpha or --alpha-a, not both")
        return config_from_scaled(args.alpha_a, 0.0 if x0 is None else x0, 1.0 if y0 is None else y0)

    missing = [name for name, value in (("alpha", alpha), ("x0", x0), ("y0", y0)) if value is None]
    if missing:
        raise ValidationError(f"missing problem parameters: {', '.join(missing)} (or use --alpha-a)")
    return derive_config(alpha, x0, y0)


def resolve_constants(args, cfg):
    values = _file_values(args)
    h = _pick(args, "h", values, "h")
    lam = _pick(args, "lam", values, "lambda")

    if args.h_a is not None or args.lam_a is not None:
        if args.h_a is None or args.lam_a is None:
            raise ValidationError("--h-a and --lambda-a go together")
        if args.h is not None or args.lam is not None:
            raise ValidationError("give either --h/--lambda or --h-a/--lambda-a, not both")
        return constants_from_scaled(args.h_a, args.lam_a, cfg)

    if h is None or lam is None:
        raise ValidationError("missing motion constants: give --h and --lambda, --h-a and --lambda-a, or a config file")
    return scale_constants(h, lam, cfg)


def resolve_problem(args):
    cfg = resolve_config(args)
    return cfg, resolve_constants(args, cfg)


def resolve_start(args):
    values = _file_values(args)
    q1 = _pick(args, "q1", values, "q1")
    q2 = _pick(args, "q2", values, "q2")
    if q1 is None or q2 is None:
        raise ValidationError("missing starting point: give --q1 and --q2 (or q1, q2 in the config file)")
    X0 = _pick(args, "X0", values, "X0")
    Y0 = _pick(args, "Y0", values, "Y0")
    return QPoint(q1, q2), 0.0 if X0 is None else X0, 0.0 if Y0 is None else Y0


def check_outputs(*paths):
    """Reject unwritable output paths before any work is done."""
    for path in paths:
        if not path:
            continue
        folder = os.path.dirname(os.path.abspath(path))
        if not os.path.isdir(folder):
            raise ValidationError(f"output directory does not exist: {folder}")
        if os.path.isdir(path):
            raise ValidationError(f"output path is a directory: {path}")


def branch_path(path, index):
    root, ext = os.path.splitext(path)
    return f"{root}_b{index}{ext}"
