# ===========================================================
# Grid Text Format Reader / Writer
# -----------------------------------------------------------
# - Header line "rows cols", then one line of values per row
# - Rows run bottom to top (row 0 is y = 0), values left to right
# - Cell fields: n_fine x n_fine, node fields: (n_fine+1)^2
# - Ingestion errors carry the offending line number
# ===========================================================

import logging
from pathlib import Path

import numpy as np

from signms.coeffs.fields import CoefficientField, SourceField
from signms.errors import ConfigurationError, IngestionError

logger = logging.getLogger(__name__)


def read_grid(path, expected_shape=None):
    return _read_rows(path, expected_shape)[0]


def _read_rows(path, expected_shape=None):
    # (values, file line number of each grid row)
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise IngestionError(f"cannot read grid file: {e}", path=path)

    # Blank lines are skipped; errors keep the physical line number
    numbered = [(no, line) for no, line in enumerate(lines, start=1) if line.strip()]
    if not numbered:
        raise IngestionError("empty grid file", path=path, line=1)

    header_no, header = numbered[0]
    parts = header.split()
    if len(parts) != 2:
        raise IngestionError(f"header must be 'rows cols', got {header!r}", path=path, line=header_no)
    try:
        rows, cols = int(parts[0]), int(parts[1])
    except ValueError:
        raise IngestionError(f"header must hold two integers, got {header!r}", path=path, line=header_no)
    if rows < 1 or cols < 1:
        raise IngestionError(f"invalid grid size {rows}x{cols}", path=path, line=header_no)
    if expected_shape is not None and (rows, cols) != tuple(expected_shape):
        raise IngestionError(
            f"grid is {rows}x{cols} but {expected_shape[0]}x{expected_shape[1]} was expected",
            path=path, line=header_no,
        )

    data = np.empty((rows, cols))
    row_lines = np.zeros(rows, dtype=np.int64)
    body = numbered[1:]
    for r, (no, line) in enumerate(body):
        if r >= rows:
            raise IngestionError(
                f"entry count mismatch: more than {rows} rows of values", path=path, line=no
            )
        row_lines[r] = no
        tokens = line.split()
        if len(tokens) != cols:
            raise IngestionError(
                f"entry count mismatch: row has {len(tokens)} values, expected {cols}",
                path=path, line=no,
            )
        for col, token in enumerate(tokens):
            try:
                data[r, col] = float(token)
            except ValueError:
                raise IngestionError(f"unparsable value {token!r}", path=path, line=no)
    if len(body) < rows:
        last = body[-1][0] if body else header_no
        raise IngestionError(
            f"entry count mismatch: {len(body) * cols} values for a {rows}x{cols} grid",
            path=path, line=last,
        )
    return data, row_lines


def write_grid(path, values):
    values = np.asarray(values, dtype=float)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows, cols = values.shape
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{rows} {cols}\n")
        for row in values:
            f.write(" ".join(repr(float(v)) for v in row))
            f.write("\n")
    return path


# =====================================================
# COEFFICIENT FIELDS
# =====================================================
def _zero_free(grid, row_lines, path):
    zeros = np.argwhere(grid == 0.0)
    if zeros.size:
        r, col = int(zeros[0][0]), int(zeros[0][1])
        raise IngestionError(f"zero coefficient value in column {col + 1}", path=path, line=int(row_lines[r]))


def load_field(sigma_path, c_path=None, n_fine=None):
    shape = None if n_fine is None else (n_fine, n_fine)
    sigma, sigma_lines = _read_rows(sigma_path, shape)
    _zero_free(sigma, sigma_lines, sigma_path)
    if sigma.shape[0] != sigma.shape[1]:
        raise IngestionError(f"coefficient grid must be square, got {sigma.shape}", path=sigma_path)

    if c_path is None:
        c = sigma.copy()
    else:
        c, c_lines = _read_rows(c_path, sigma.shape)
        _zero_free(c, c_lines, c_path)

    try:
        field = CoefficientField(sigma.ravel(), c.ravel())
    except ConfigurationError as e:
        raise IngestionError(str(e), path=sigma_path)
    logger.info("loaded %dx%d coefficient field from %s", sigma.shape[0], sigma.shape[1], sigma_path)
    return field


def save_field(field, sigma_path, c_path=None):
    n = field.n_fine
    write_grid(sigma_path, field.sigma.reshape(n, n))
    if c_path is not None:
        write_grid(c_path, field.c.reshape(n, n))


# =====================================================
# NODE FIELDS
# =====================================================
def save_node_field(path, mesh, values):
    n = mesh.n_fine + 1
    return write_grid(path, np.asarray(values, dtype=float).reshape(n, n))


def load_source(path, mesh):
    n = mesh.n_fine + 1
    return SourceField(read_grid(path, (n, n)).ravel())
