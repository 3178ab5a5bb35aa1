import csv
import logging
import os
from datetime import datetime

LOGGER_NAME = "PairOrbits"
LOG_LEVEL_ENV = "PAIR_ORBITS_LOG_LEVEL"
AUDIT_LOG_ENV = "PAIR_ORBITS_AUDIT_LOG"

AUDIT_COLUMNS = ["Timestamp", "Command", "Status", "Details"]


# ===== Logger Setup =====
def get_logger():
    logger = logging.getLogger(LOGGER_NAME)
    if not logger.handlers:
        handler = logging.StreamHandler()
        formatter = logging.Formatter('%(asctime)s %(levelname)s - %(message)s')
        handler.setFormatter(formatter)
        logger.addHandler(handler)
        level = os.environ.get(LOG_LEVEL_ENV, "INFO").upper()
        logger.setLevel(level if isinstance(logging.getLevelName(level), int) else "INFO")
    return logger


def set_level(level):
    get_logger().setLevel(str(level).upper())


# ===== Run Audit Trail =====
def log_action(command, status, details="", log_file=None):
    """Append one row to the audit CSV. Does nothing when no file is configured."""
    log_file = log_file or os.environ.get(AUDIT_LOG_ENV)
    if not log_file:
        return False

    timestamp = datetime.now().isoformat()
    log_entry = [timestamp, command, status, details]

    try:
        file_exists = os.path.isfile(log_file)
        with open(log_file, mode="a", newline="") as f:
            writer = csv.writer(f)
            if not file_exists:
                writer.writerow(AUDIT_COLUMNS)
            writer.writerow(log_entry)
    except OSError as e:
        get_logger().warning(f"Could not write audit log {log_file}: {e}")
        return False
    return True
