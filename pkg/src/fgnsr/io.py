"""Matrix files.

Two formats are understood:

* CSV: one matrix row per line (rows = dimensions, columns = data points),
  comma separated, optionally preceded by a ``# m n`` header line.
* Binary: the 4 magic bytes ``FGNM``, then ``m`` and ``n`` as little-endian
  uint64, then ``m * n`` little-endian float64 values in column-major order.

Reading sniffs the magic bytes; writing picks the format from the file
extension (``.csv`` for text, anything else binary).
"""

import json
import struct
import sys

import numpy as np

__all__ = [
    "MatrixFormatError",
    "MAGIC",
    "read_matrix",
    "write_matrix",
    "read_vector",
    "write_json",
    "format_float",
]

MAGIC = b"FGNM"
_HEADER = struct.Struct("<4sQQ")


class MatrixFormatError(ValueError):
    pass


def format_float(x):
    """Shortest round-trip decimal form, never locale dependent."""
    return repr(float(x))


def read_matrix(path):
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return _read_binary(path)
    return _read_csv(path)


def _read_binary(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise MatrixFormatError(f"{path}: truncated header")
    _, m, n = _HEADER.unpack_from(data)
    payload = data[_HEADER.size:]
    if len(payload) != 8 * m * n:
        raise MatrixFormatError(f"{path}: declared {m}x{n} but payload holds {len(payload) // 8} values")
    if m < 1 or n < 1:
        raise MatrixFormatError(f"{path}: empty matrix")
    A = np.frombuffer(payload, dtype="<f8").reshape((m, n), order="F").astype(np.float64)
    if not np.all(np.isfinite(A)):
        raise MatrixFormatError(f"{path}: non-finite values")
    return A


def _read_csv(path):
    declared = None
    rows = []
    try:
        with open(path, encoding="ascii") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    parts = line[1:].split()
                    if rows or declared is not None or len(parts) != 2:
                        raise MatrixFormatError(f"{path}:{lineno}: unexpected header line")
                    declared = (int(parts[0]), int(parts[1]))
                    continue
                rows.append([float(v) for v in line.split(",")])
    except UnicodeDecodeError as exc:
        raise MatrixFormatError(f"{path}: not a matrix file ({exc})") from None
    except ValueError as exc:
        if isinstance(exc, MatrixFormatError):
            raise
        raise MatrixFormatError(f"{path}: {exc}") from None
    if not rows:
        raise MatrixFormatError(f"{path}: no data")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise MatrixFormatError(f"{path}: ragged rows")
    A = np.array(rows, dtype=np.float64)
    if declared is not None and declared != A.shape:
        raise MatrixFormatError(f"{path}: header says {declared[0]}x{declared[1]}, data is {A.shape[0]}x{A.shape[1]}")
    if not np.all(np.isfinite(A)):
        raise MatrixFormatError(f"{path}: non-finite values")
    return A


def read_vector(path):
    """Read a vector stored as a one-row or one-column matrix."""
    A = read_matrix(path)
    if min(A.shape) != 1:
        raise MatrixFormatError(f"{path}: expected a vector, got {A.shape[0]}x{A.shape[1]}")
    return A.ravel()


def write_matrix(path, A, fmt=None):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if fmt is None:
        fmt = "csv" if str(path).lower().endswith(".csv") else "binary"
    if fmt == "csv":
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(f"# {A.shape[0]} {A.shape[1]}\n")
            for row in A:
                fh.write(",".join(format_float(v) for v in row))
                fh.write("\n")
    elif fmt == "binary":
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, A.shape[0], A.shape[1]))
            fh.write(np.asarray(A, dtype="<f8").tobytes(order="F"))
    else:
        raise ValueError(f"unknown format {fmt!r}")


def write_json(path, obj):
    text = json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
