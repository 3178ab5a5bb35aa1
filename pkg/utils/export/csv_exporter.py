import json

import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"


def export_frame_csv(frame, output_path):
    frame.to_csv(output_path, index=False, float_format=FLOAT_FORMAT)
    return output_path


def export_trajectory_csv(trajectory, output_path):
    """One row per sample: t,x1,y1,x2,y2,X,Y,q1,q2,u,v,H,Lambda,KX,KY,LZ."""
    return export_frame_csv(trajectory.to_frame(), output_path)


def diagram_frame(scan):
    h_grid, lam_grid = np.meshgrid(scan.h_values, scan.lambda_values, indexing="ij")
    return pd.DataFrame(
        {
            "h_a": h_grid.ravel(),
            "lambda_a": lam_grid.ravel(),
            "label": [key for row in scan.labels for key in row],
        }
    )


def export_diagram_csv(scan, output_path):
    return export_frame_csv(diagram_frame(scan), output_path)


def _plain(value):
    if isinstance(value, dict):
        return {key: _plain(v) for key, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


def to_json(payload):
    # float repr is the shortest string that round-trips, never more than 17 digits
    return json.dumps(_plain(payload), indent=2, sort_keys=False)


def export_json(payload, output_path=None):
    text = to_json(payload)
    if output_path:
        with open(output_path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    return text
