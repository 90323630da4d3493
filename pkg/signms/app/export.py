# ====================================================
# Result Export
# ----------------------------------------------------
# - errors.csv: one row per (H, m, l*) run, numbers in
#   scientific notation with 4 significant digits
# - timings.csv: wall-clock seconds, same row keys
# - decay.csv: per sampled basis function and m
# - Field dumps in the grid text format
# ====================================================

import os

import numpy as np
import pandas as pd

from signms.coeffs import save_field, save_node_field

ERROR_COLUMNS = [
    "experiment", "method", "H", "m", "l_star", "k", "n_fine", "seed",
    "energy_rel", "l2_rel", "energy_rel_exact", "l2_rel_exact",
    "lambda", "upsilon", "rho", "rho_flagged", "f_sinv_norm", "decay_rate", "fine_rtol",
    "status", "error",
]

_TEXT = {"experiment", "method", "status", "error", "rho_flagged"}
_INTEGER = {"m", "l_star", "n_fine", "seed"}


def format_number(value):
    if value is None:
        return ""
    value = float(value)
    if np.isnan(value):
        return "nan"
    if np.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.3e}"


def _row_sort_key(row):
    return (row["method"] != "q1", row["H"] * -1, row["l_star"], row["m"])


def errors_frame(reports):
    rows = sorted((r.as_row() for r in reports), key=_row_sort_key)
    df = pd.DataFrame(rows, columns=ERROR_COLUMNS)
    for column in df.columns:
        if column in _TEXT:
            df[column] = df[column].astype(str)
        elif column in _INTEGER:
            df[column] = df[column].astype(int)
        else:
            df[column] = df[column].map(format_number)
    return df


def timings_frame(reports):
    rows = sorted((r.timing_row() for r in reports), key=_row_sort_key)
    return pd.DataFrame(rows)


def write_tables(reports, out_dir, decay_rows=None):
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    paths["errors"] = os.path.join(out_dir, "errors.csv")
    errors_frame(reports).to_csv(paths["errors"], index=False, lineterminator="\n")

    paths["timings"] = os.path.join(out_dir, "timings.csv")
    timings_frame(reports).to_csv(paths["timings"], index=False, lineterminator="\n")

    if decay_rows:
        paths["decay"] = os.path.join(out_dir, "decay.csv")
        df = pd.DataFrame(decay_rows).sort_values(["H", "l_star", "element", "index", "m"])
        for column in ("difference_energy", "tail_energy", "theta"):
            df[column] = df[column].map(format_number)
        df.to_csv(paths["decay"], index=False, lineterminator="\n")
    return paths


# =====================================================
# FIELD DUMPS
# =====================================================
def dump_fields(out_dir, tag, mesh, u_ms, u_ref, field=None, basis=None, basis_pairs=()):
    folder = os.path.join(out_dir, "fields")
    os.makedirs(folder, exist_ok=True)
    written = []

    for name, values in (("u_ms", u_ms), ("u_ref", u_ref), ("abs_error", np.abs(u_ms - u_ref))):
        path = os.path.join(folder, f"{name}_{tag}.txt")
        save_node_field(path, mesh, values)
        written.append(path)

    if field is not None:
        path = os.path.join(folder, f"sigma_n{mesh.n_fine}.txt")
        if not os.path.exists(path):
            save_field(field, path)
            written.append(path)

    for i, j in basis_pairs or ():
        if basis is None or not (0 <= i < mesh.n_elements and 0 <= j < basis.l_star):
            continue
        path = os.path.join(folder, f"phi_{i}_{j}_{tag}.txt")
        save_node_field(path, mesh, basis.column(i, j))
        written.append(path)
    return written
