import math

import numpy as np

from utils.system.errors import ConfigError, ValidationError

REQUIRED_KEYS = ("alpha", "x0", "y0", "h", "lambda")
OPTIONAL_KEYS = ("q1", "q2", "X0", "Y0")


def parse_number(name, text):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise ValidationError(f"{name}: '{text}' is not a number")
    if not math.isfinite(value):
        raise ValidationError(f"{name}: {text} is not finite")
    return value


def read_config(path, required=REQUIRED_KEYS):
    """Read a `key = value` problem file into a dict of floats."""
    values = {}
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ConfigError(f"Could not read config file {path}: {e}")

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got '{raw.strip()}'")

        key, text = (part.strip() for part in line.split("=", 1))
        if key not in REQUIRED_KEYS + OPTIONAL_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key '{key}'")
        try:
            values[key] = parse_number(key, text)
        except ValidationError as e:
            raise ConfigError(f"{path}:{lineno}: {e}")

    missing = [key for key in required if key not in values]
    if missing:
        raise ConfigError(f"{path}: missing required keys: {', '.join(missing)}")
    return values


def parse_range(name, text):
    """`start:stop:count` with both endpoints included; a bare number is a one-point grid."""
    parts = str(text).split(":")
    if len(parts) == 1:
        return np.array([parse_number(name, parts[0])])
    if len(parts) != 3:
        raise ValidationError(f"{name}: expected start:stop:count, got '{text}'")

    start = parse_number(name, parts[0])
    stop = parse_number(name, parts[1])
    try:
        count = int(parts[2])
    except ValueError:
        raise ValidationError(f"{name}: count '{parts[2]}' is not an integer")
    if count < 1:
        raise ValidationError(f"{name}: count must be at least 1, got {count}")
    if count == 1 and start != stop:
        raise ValidationError(f"{name}: a one-point grid needs start == stop")
    return np.linspace(start, stop, count)
