"""Text file formats: complexes, point clouds, distance matrices,
rectangle barcodes, and plain value lists.

All writers emit UTF-8, LF-terminated files with 17 significant digits;
parsers report the offending file and line on bad input.
"""

from __future__ import annotations

import numpy as np

from .bifilt import BifilteredComplex, Simplex
from .errors import InputError

_FMT = ".17g"


def _fmt(x: float) -> str:
    return format(float(x), _FMT)


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield ln, line


def write_complex(path, cx: BifilteredComplex) -> None:
    """One simplex per line: `v0 v1 ... vk ; a1 a2 [; a1' a2' ...]`."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# bifiltered complex: {cx.n_vertices} vertices, {len(cx)} simplices\n")
        for i in range(len(cx)):
            vs = " ".join(str(v) for v in cx.simplex_vertices(i))
            gs = " ; ".join(f"{_fmt(a)} {_fmt(b)}" for a, b in cx.simplex_grades(i))
            fh.write(f"{vs} ; {gs}\n")


def read_complex(path) -> BifilteredComplex:
    simplices = []
    n_vertices = 0
    for ln, line in _data_lines(path):
        parts = [p.strip() for p in line.split(";")]
        if len(parts) < 2:
            raise InputError(f"{path}:{ln}: expected `vertices ; grade [; grade ...]`")
        try:
            verts = tuple(int(v) for v in parts[0].split())
            grades = []
            for g in parts[1:]:
                a, b = g.split()
                grades.append((float(a), float(b)))
            simplices.append(Simplex(verts, tuple(grades)))
        except (ValueError, InputError) as exc:
            raise InputError(f"{path}:{ln}: {exc}") from exc
        n_vertices = max(n_vertices, verts[-1] + 1)
    return BifilteredComplex(n_vertices, simplices)


def write_point_cloud(path, points, values=None) -> None:
    """CSV with header; coordinate columns, optional final `f` column."""
    points = np.asarray(points, np.float64)
    header = [f"x{c + 1}" for c in range(points.shape[1])]
    if values is not None:
        header.append("f")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i, p in enumerate(points):
            row = [_fmt(c) for c in p]
            if values is not None:
                row.append(_fmt(values[i]))
            fh.write(",".join(row) + "\n")


def read_point_cloud(path) -> tuple[np.ndarray, np.ndarray | None]:
    """Returns (points, values) where values is None without an f column."""
    rows = list(_data_lines(path))
    if not rows:
        raise InputError(f"{path}: empty point cloud")
    ln0, header = rows[0]
    names = [h.strip() for h in header.split(",")]
    has_f = names[-1] == "f"
    n_coord = len(names) - (1 if has_f else 0)
    if n_coord < 1:
        raise InputError(f"{path}:{ln0}: no coordinate columns")
    pts, vals = [], []
    for ln, line in rows[1:]:
        cells = line.split(",")
        if len(cells) != len(names):
            raise InputError(f"{path}:{ln}: expected {len(names)} columns, got {len(cells)}")
        try:
            nums = [float(c) for c in cells]
        except ValueError as exc:
            raise InputError(f"{path}:{ln}: {exc}") from exc
        pts.append(nums[:n_coord])
        if has_f:
            vals.append(nums[-1])
    if not pts:
        raise InputError(f"{path}: no data rows")
    return np.array(pts), (np.array(vals) if has_f else None)


def write_distance_matrix(path, distances) -> None:
    """Lower-triangular text: row i lists d(i, 0..i-1); row 0 is blank."""
    d = np.asarray(distances, np.float64)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# lower-triangular distance matrix, n={d.shape[0]}\n")
        for i in range(d.shape[0]):
            fh.write(" ".join(_fmt(d[i, j]) for j in range(i)) + "\n")


def read_distance_matrix(path) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for ln, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].rstrip("\n")
            if raw.startswith("#") and not line.strip():
                continue
            rows.append((ln, line.split()))
    # drop trailing all-empty lines; a leading empty row 0 is optional
    while rows and not rows[-1][1]:
        rows.pop()
    if rows and not rows[0][1]:
        rows = rows[1:]
    n = len(rows) + 1
    d = np.zeros((n, n))
    for r, (ln, cells) in enumerate(rows, start=1):
        if len(cells) != r:
            raise InputError(f"{path}:{ln}: expected {r} entries in row {r}, got {len(cells)}")
        try:
            vals = [float(c) for c in cells]
        except ValueError as exc:
            raise InputError(f"{path}:{ln}: {exc}") from exc
        for c, v in enumerate(vals):
            if v < 0:
                raise InputError(f"{path}:{ln}: negative distance {v}")
            d[r, c] = d[c, r] = v
    return d


def write_rects(path, rects) -> None:
    """One `a1 a2 b1 b2` line per rectangle."""
    from .rectangles import as_rect_array

    arr = as_rect_array(rects)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# rectangle barcode: a1 a2 b1 b2\n")
        for a1, a2, b1, b2 in arr:
            fh.write(f"{_fmt(a1)} {_fmt(a2)} {_fmt(b1)} {_fmt(b2)}\n")


def read_rects(path) -> np.ndarray:
    from .rectangles import as_rect_array

    rows = []
    for ln, line in _data_lines(path):
        cells = line.split()
        if len(cells) != 4:
            raise InputError(f"{path}:{ln}: expected 4 numbers, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise InputError(f"{path}:{ln}: {exc}") from exc
    try:
        return as_rect_array(np.array(rows).reshape(-1, 4))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc


def write_values(path, values) -> None:
    """Plain list: one value per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in values:
            fh.write(_fmt(v) + "\n")


def read_values(path) -> np.ndarray:
    vals = []
    for ln, line in _data_lines(path):
        for cell in line.split():
            try:
                vals.append(float(cell))
            except ValueError as exc:
                raise InputError(f"{path}:{ln}: {exc}") from exc
    if not vals:
        raise InputError(f"{path}: no values found")
    return np.array(vals)
