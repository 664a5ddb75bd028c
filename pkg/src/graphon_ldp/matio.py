"""Dense-matrix CSV format and multigraph text serialization.

Matrix files are row-major CSV with a leading header line carrying the
dimensions: ``n=<n>`` for square matrices, ``n=<n1>,<n2>`` for rectangular
ones.  Comma separator, '.' decimal, LF line endings.
"""

from pathlib import Path

import numpy as np


def format_value(x) -> str:
    xf = float(x)
    if xf.is_integer():
        return str(int(xf))
    return repr(xf)


def save_matrix_csv(path, M) -> None:
    M = np.asarray(M)
    if M.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    r, c = M.shape
    header = f"n={r}" if r == c else f"n={r},{c}"
    lines = [header]
    for row in M:
        lines.append(",".join(format_value(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_matrix_csv(path) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not text or not text[0].startswith("n="):
        raise ValueError(f"{path}: missing 'n=<n>' header row")
    dims = text[0][2:].split(",")
    if len(dims) == 1:
        r = c = int(dims[0])
    else:
        r, c = int(dims[0]), int(dims[1])
    rows = [[float(v) for v in line.split(",")] for line in text[1:] if line]
    M = np.array(rows, dtype=float)
    if M.shape != (r, c):
        raise ValueError(f"{path}: header says {r}x{c}, data is {M.shape}")
    return M


def save_multigraphs(path, graphs) -> None:
    """One graph per line in the sorted 'i-j:m' edge-list format."""
    lines = [g.to_text() for g in graphs]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
