"""Matrix Market coordinate I/O (real/complex, general/symmetric).

Hand-rolled instead of scipy.io so that parse failures carry line
numbers and the writer controls the header and precision exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import ParseError, UnsupportedField

HEADER_PREFIX = "%%MatrixMarket"


def load_matrix_market(path) -> np.ndarray:
    """Read a coordinate-format .mtx file into a dense array.

    Symmetric storage is expanded; pattern and integer fields are
    rejected with UnsupportedField.
    """
    with open(path, "r") as fh:
        lines = fh.readlines()
    if not lines:
        raise ParseError("empty file", 1)
    header = lines[0].strip().split()
    if len(header) != 5 or header[0] != HEADER_PREFIX:
        raise ParseError("malformed MatrixMarket header", 1)
    _, obj, fmt, fld, symm = (tok.lower() for tok in header)
    if obj != "matrix" or fmt != "coordinate":
        raise ParseError(f"unsupported object/format '{obj} {fmt}'", 1)
    if fld in ("pattern", "integer"):
        raise UnsupportedField(f"field '{fld}' is not supported")
    if fld not in ("real", "complex"):
        raise ParseError(f"unknown field '{fld}'", 1)
    if symm not in ("general", "symmetric"):
        raise UnsupportedField(f"symmetry '{symm}' is not supported")

    line_no = 1
    it = iter(range(1, len(lines)))
    size_line = None
    for k in it:
        line_no = k + 1
        s = lines[k].strip()
        if s and not s.startswith("%"):
            size_line = s
            break
    if size_line is None:
        raise ParseError("missing size line", line_no)
    parts = size_line.split()
    if len(parts) != 3:
        raise ParseError("size line must have 'rows cols nnz'", line_no)
    try:
        nrows, ncols, nnz = (int(p) for p in parts)
    except ValueError:
        raise ParseError("non-integer size entry", line_no)

    dtype = complex if fld == "complex" else float
    A = np.zeros((nrows, ncols), dtype=dtype)
    count = 0
    for k in range(line_no, len(lines)):
        s = lines[k].strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        want = 4 if fld == "complex" else 3
        if len(parts) != want:
            raise ParseError(f"expected {want} tokens, got {len(parts)}", k + 1)
        try:
            i, j = int(parts[0]), int(parts[1])
            if fld == "complex":
                v = complex(float(parts[2]), float(parts[3]))
            else:
                v = float(parts[2])
        except ValueError:
            raise ParseError("malformed entry", k + 1)
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise ParseError(f"index ({i}, {j}) out of range", k + 1)
        A[i - 1, j - 1] = v
        if symm == "symmetric" and i != j:
            A[j - 1, i - 1] = v
        count += 1
    if count != nnz:
        raise ParseError(f"declared {nnz} entries but found {count}", len(lines))
    return A


def save_matrix_market(A: np.ndarray, path, symmetric: bool = False) -> None:
    """Write a dense matrix in coordinate format with 17 significant digits."""
    A = np.asarray(A)
    is_complex = np.iscomplexobj(A) and np.any(A.imag != 0)
    fld = "complex" if is_complex else "real"
    symm = "symmetric" if symmetric else "general"
    nrows, ncols = A.shape
    entries = []
    for i in range(nrows):
        cols = range(0, i + 1) if symmetric else range(ncols)
        for j in cols:
            v = A[i, j]
            if v != 0:
                if is_complex:
                    entries.append(
                        f"{i + 1} {j + 1} {v.real:.16e} {v.imag:.16e}"
                    )
                else:
                    entries.append(f"{i + 1} {j + 1} {v.real:.16e}")
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{HEADER_PREFIX} matrix coordinate {fld} {symm}\n")
        fh.write(f"{nrows} {ncols} {len(entries)}\n")
        for e in entries:
            fh.write(e + "\n")
