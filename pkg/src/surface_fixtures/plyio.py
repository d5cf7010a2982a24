"""PLY reading/writing and trajectory CSV export.

Supported PLY flavors: ascii and binary_little_endian, vertex element only.
Recognized per-vertex properties: x,y,z (float32/float64, required),
nx,ny,nz, red,green,blue (uint8), region (int32; -1 or absent means the
free region 0), and the field properties u / gx,gy,gz / defined written by
write_field. Binary mode round-trips positions and field values bit-exactly.
"""

import csv

import numpy as np

from .errors import BadLabelRange, MissingProperty, ParseError

_PLY_TYPES = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2",
    "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4",
    "uint": "u4", "uint32": "u4",
    "float": "f4", "float32": "f4",
    "double": "f8", "float64": "f8",
}


def read_ply(path):
    """Parse a PLY file into a dict property-name -> numpy column."""
    with open(path, "rb") as f:
        data = f.read()

    lines = []
    offset = 0
    while True:
        end = data.find(b"\n", offset)
        if end < 0:
            raise ParseError("no end_header found", line=len(lines) + 1)
        line = data[offset:end].decode("ascii", errors="replace").strip()
        offset = end + 1
        lines.append(line)
        if line == "end_header":
            break

    if not lines or lines[0] != "ply":
        raise ParseError("not a PLY file (missing 'ply' magic)", line=1)

    fmt = None
    n_vertices = None
    properties = []
    in_vertex_element = False
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if not tokens or tokens[0] == "comment":
            continue
        if tokens[0] == "format":
            if len(tokens) < 2 or tokens[1] not in ("ascii", "binary_little_endian"):
                raise ParseError(f"unsupported format '{line}'", line=lineno)
            fmt = tokens[1]
        elif tokens[0] == "element":
            if tokens[1] == "vertex":
                in_vertex_element = True
                n_vertices = int(tokens[2])
            else:
                in_vertex_element = False
        elif tokens[0] == "property" and in_vertex_element:
            if tokens[1] == "list":
                raise ParseError("list properties are not supported", line=lineno)
            if tokens[1] not in _PLY_TYPES:
                raise ParseError(f"unknown property type '{tokens[1]}'", line=lineno)
            properties.append((tokens[2], _PLY_TYPES[tokens[1]]))
        elif tokens[0] == "end_header":
            break

    if fmt is None:
        raise ParseError("missing format line")
    if n_vertices is None or n_vertices <= 0:
        raise ParseError("missing or empty vertex element")
    names = [name for name, _ in properties]
    for required in ("x", "y", "z"):
        if required not in names:
            raise MissingProperty(required)

    if fmt == "ascii":
        body = data[offset:].decode("ascii", errors="replace").splitlines()
        rows = []
        for i, line in enumerate(body):
            if len(rows) == n_vertices:
                break
            if not line.strip():
                continue
            tokens = line.split()
            if len(tokens) != len(properties):
                raise ParseError(
                    f"expected {len(properties)} values, got {len(tokens)}",
                    line=len(lines) + i + 1,
                )
            rows.append(tokens)
        if len(rows) != n_vertices:
            raise ParseError(
                f"expected {n_vertices} vertex rows, got {len(rows)}"
            )
        columns = {}
        for j, (name, dtype) in enumerate(properties):
            try:
                columns[name] = np.array([row[j] for row in rows]).astype(dtype)
            except ValueError as exc:
                raise ParseError(f"bad value in column '{name}': {exc}")
    else:
        dtype = np.dtype([(name, "<" + code) for name, code in properties])
        expected = dtype.itemsize * n_vertices
        if len(data) - offset < expected:
            raise ParseError(
                f"truncated binary body: need {expected} bytes, "
                f"have {len(data) - offset}",
                offset=offset,
            )
        records = np.frombuffer(data, dtype=dtype, count=n_vertices, offset=offset)
        columns = {name: records[name].copy() for name, _ in properties}

    return columns


def read_cloud(path):
    """Read positions, region labels, and colors from a PLY file.

    Returns (positions (n,3) float64, labels (n,) int64, colors (n,3) uint8
    or None). A region value of -1 and a missing region property both map
    to the free region 0.
    """
    columns = read_ply(path)
    positions = np.column_stack(
        [columns["x"], columns["y"], columns["z"]]
    ).astype(np.float64)

    if "region" in columns:
        labels = columns["region"].astype(np.int64)
        if (labels < -1).any():
            raise BadLabelRange(
                f"region labels must be >= -1, found {labels.min()}"
            )
        labels[labels == -1] = 0
    else:
        labels = np.zeros(len(positions), dtype=np.int64)

    colors = None
    if all(c in columns for c in ("red", "green", "blue")):
        colors = np.column_stack(
            [columns["red"], columns["green"], columns["blue"]]
        ).astype(np.uint8)

    return positions, labels, colors


def _write_ply(path, columns, binary):
    """columns: ordered list of (name, ply_type, numpy array)."""
    n = len(columns[0][2])
    header = ["ply"]
    header.append(
        "format binary_little_endian 1.0" if binary else "format ascii 1.0"
    )
    header.append(f"element vertex {n}")
    for name, ply_type, _ in columns:
        header.append(f"property {ply_type} {name}")
    header.append("end_header")

    inv = {v: k for k, v in _PLY_TYPES.items()}
    with open(path, "wb") as f:
        f.write(("\n".join(header) + "\n").encode("ascii"))
        if binary:
            dtype = np.dtype(
                [(name, "<" + _PLY_TYPES[t]) for name, t, _ in columns]
            )
            records = np.empty(n, dtype=dtype)
            for name, t, arr in columns:
                records[name] = arr
            f.write(records.tobytes())
        else:
            arrays = [arr for _, _, arr in columns]
            kinds = [arr.dtype.kind for arr in arrays]
            for i in range(n):
                parts = []
                for arr, kind in zip(arrays, kinds):
                    v = arr[i]
                    parts.append(repr(float(v)) if kind == "f" else str(int(v)))
                f.write((" ".join(parts) + "\n").encode("ascii"))


def write_cloud(path, positions, labels=None, colors=None, normals=None, binary=True):
    """Write a cloud PLY; lossless round-trip with read_cloud in binary mode."""
    positions = np.asarray(positions, dtype=np.float64)
    columns = [
        ("x", "double", positions[:, 0]),
        ("y", "double", positions[:, 1]),
        ("z", "double", positions[:, 2]),
    ]
    if normals is not None:
        normals = np.asarray(normals, dtype=np.float64)
        columns += [
            ("nx", "double", normals[:, 0]),
            ("ny", "double", normals[:, 1]),
            ("nz", "double", normals[:, 2]),
        ]
    if colors is not None:
        colors = np.asarray(colors, dtype=np.uint8)
        columns += [
            ("red", "uchar", colors[:, 0]),
            ("green", "uchar", colors[:, 1]),
            ("blue", "uchar", colors[:, 2]),
        ]
    if labels is not None:
        columns.append(("region", "int32", np.asarray(labels, dtype=np.int32)))
    _write_ply(path, columns, binary)


def write_field(path, cloud, result, labels=None, binary=True):
    """Write a solved field PLY: scalar as 'u', vectors as 'gx,gy,gz'.

    Undefined points carry NaN plus a 'defined' uint8 mask property.
    Accepts a ScalarField or TangentVectorField.
    """
    n = cloud.point_count
    positions = cloud.positions
    columns = [
        ("x", "double", positions[:, 0]),
        ("y", "double", positions[:, 1]),
        ("z", "double", positions[:, 2]),
    ]
    mask = result.defined_mask(n)
    if hasattr(result, "values"):
        u = result.values.astype(np.float64).copy()
        u[~mask] = np.nan
        columns.append(("u", "double", u))
    else:
        vectors = result.vectors.astype(np.float64).copy()
        vectors[~mask] = np.nan
        columns += [
            ("gx", "double", vectors[:, 0]),
            ("gy", "double", vectors[:, 1]),
            ("gz", "double", vectors[:, 2]),
        ]
    if labels is not None:
        columns.append(("region", "int32", np.asarray(labels, dtype=np.int32)))
    columns.append(("defined", "uchar", mask.astype(np.uint8)))
    _write_ply(path, columns, binary)


def write_trajectories(path, trajectories):
    """CSV export: agent_id, step, x, y, z, outcome (one row per sample)."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["agent_id", "step", "x", "y", "z", "outcome"])
        for agent_id, traj in enumerate(trajectories):
            for step, p in enumerate(traj.points):
                writer.writerow(
                    [agent_id, step, repr(p[0]), repr(p[1]), repr(p[2]), traj.outcome]
                )
