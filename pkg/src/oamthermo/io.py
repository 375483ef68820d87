"""Number formatting and small CSV/JSON helpers shared by the file writers.

All numeric output goes through :func:`fmt`, which prints 12 significant
digits so files are byte-identical across runs and platforms.
"""

import csv
import io
import json

import numpy as np

SIG_DIGITS = 12


def fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        # collapse -0.0
        return "0"
    return format(x, f".{SIG_DIGITS}g")


def rows_to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def read_csv(text):
    return list(csv.reader(io.StringIO(text)))


def _round_floats(obj):
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round_floats(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    return obj


def dumps_json(obj):
    """JSON text with floats rounded to 12 significant digits."""
    return json.dumps(_round_floats(obj), indent=2, sort_keys=True) + "\n"
