# app.py

import argparse
import importlib
import os
import sys
import uuid

from dotenv import load_dotenv

from utils.system.errors import EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION, PairOrbitsError, exit_code_for
from utils.system.logger import LOG_LEVEL_ENV, get_logger, log_action, set_level


# =========================================================
# Command registry
# =========================================================

COMMANDS_PACKAGE = "commands"
APP_VERSION = "1.0"

COMMAND_GROUPS = {
    "Bifurcation Diagram": {
        "classify": "classify",
        "diagram": "diagram",
        "caustics": "caustics",
        "potential": "potential",
    },
    "Orbits": {
        "initcond": "initcond",
        "simulate": "simulate",
        "xcheck": "xcheck",
    },
}

ALLOWED_COMMANDS = {
    command: module
    for commands in COMMAND_GROUPS.values()
    for command, module in commands.items()
}

logger = get_logger()


# =========================================================
# Command loader
# =========================================================

def import_command_module(command: str):
    """Import one registered command module."""

    if command not in ALLOWED_COMMANDS:
        raise ImportError(f"The command '{command}' is not registered.")

    module = importlib.import_module(f"{COMMANDS_PACKAGE}.{ALLOWED_COMMANDS[command]}")

    for required in ("add_arguments", "run"):
        if not hasattr(module, required):
            raise AttributeError(f"The command '{command}' does not define {required}().")

    return module


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pair-orbits",
        description="Electron-positron orbits in a constant magnetic field.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="default from PAIR_ORBITS_LOG_LEVEL",
    )
    parser.add_argument("--audit-log", help="append one CSV row per run to this file")

    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    for group, commands in COMMAND_GROUPS.items():
        for command in commands:
            module = import_command_module(command)
            sub = subparsers.add_parser(
                command,
                help=getattr(module, "HELP", None),
                description=f"[{group}] {getattr(module, 'HELP', '')}",
            )
            module.add_arguments(sub)
            sub.set_defaults(handler=module.run)

    return parser


# =========================================================
# Run one command
# =========================================================

def run(argv=None) -> int:
    load_dotenv()
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        # argparse exits 2 on usage errors and 0 for --help / --version.
        code = exit_request.code
        return code if isinstance(code, int) else EXIT_VALIDATION

    level = args.log_level or os.environ.get(LOG_LEVEL_ENV, "INFO")
    try:
        set_level(level)
    except ValueError:
        logger.warning(f"Ignoring unknown log level {level!r}")

    try:
        details = args.handler(args)

    except PairOrbitsError as error:
        code = exit_code_for(error)
        error_reference = uuid.uuid4().hex[:8].upper()
        kind = "invalid input" if code == EXIT_VALIDATION else "run failed"

        sys.stderr.write(f"{args.command}: {kind}: {error} (error reference {error_reference})\n")
        logger.debug(f"Error reference {error_reference}", exc_info=True)
        log_action(args.command, f"exit {code}", f"{error_reference}: {error}", args.audit_log)
        return code

    except Exception as error:
        error_reference = uuid.uuid4().hex[:8].upper()

        sys.stderr.write(f"{args.command}: internal error: {error} (error reference {error_reference})\n")
        logger.error(
            f"Internal error in '{args.command}' (error reference {error_reference}): "
            f"{type(error).__name__}: {error}",
            exc_info=True,
        )
        log_action(
            args.command,
            f"exit {EXIT_RUNTIME} (internal)",
            f"{error_reference}: {type(error).__name__}: {error}",
            args.audit_log,
        )
        return EXIT_RUNTIME

    log_action(args.command, "ok", details or "", args.audit_log)
    return EXIT_OK


# =========================================================
# Entry point
# =========================================================

if __name__ == "__main__":
    sys.exit(run())
