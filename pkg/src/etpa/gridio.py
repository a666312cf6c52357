"""Serialization of grids, maps and reports.

File formats:

* CSV: first row is the column axis, first cell of every further row the row
  axis value, remaining cells the grid; floats are written with 17 significant
  digits so values round-trip exactly.
* binary: 16-byte header (magic "ETPA", u32 row count, u32 column count, u32
  reserved, all little-endian) followed by the row-major little-endian f64
  payload. Bit-exact round trip.
* PGM: 16-bit binary (P5), values mapped linearly from [min, max] to
  [0, 65535]; an all-equal grid maps to 0 by rule.
* PNG: 8-bit RGB heatmap through a fixed 256-entry viridis-like lookup table,
  written with the standard library only.

Every saved grid gets a JSON metadata sidecar carrying the axes, the
normalization record and the configuration digest; re-running the same
configuration reproduces the CSV byte for byte.
"""

from __future__ import annotations

import base64
import json
import os
import struct
import zlib

import numpy as np

from .core import SignalNormalization
from .tpa import SignalGrid
from .analysis import SpectrumMap

__all__ = [
    "GridFormatError",
    "save_grid",
    "load_grid",
    "save_spectrum_map",
    "load_spectrum_map",
    "save_matrix_csv",
    "write_report",
]

_MAGIC = b"ETPA"
_FORMAT_VERSION = 1

# fixed 256-entry viridis-like colormap, RGB8 rows
_COLORMAP_B64 = (
    "RAFURAJWRQRXRQVZRgdaRghcRgpdRgteRw1gRw5hRxBjRxFkRxNlSBRnSBZoSBdpSBhqSBpsSBtt"
    "SBxuSB1vSB9wSCBxSCFzSCN0SCR1SCV2SCZ3SCh4SCl5Ryp6Ryx6Ry17Ry58Ry99RjB+RjJ+RjN/"
    "RjSARTWBRTeBRTiCRDmDRDqDRDuEQz2EQz6FQj+FQkCGQkGGQUKHQUSHQEWIQEaIP0eIP0iJPkmJ"
    "PkqJPkyKPU2KPU6KPE+KPFCLO1GLO1KLOlOLOlSMOVWMOVaMOFiMOFmMN1qMN1uNNlyNNl2NNV6N"
    "NV+NNGCNNGGNM2KNM2ONMmSOMmWOMWaOMWeOMWiOMGmOMGqOL2uOL2yOLm2OLm6OLm+OLXCOLXGO"
    "LHGOLHKOLHOOK3SOK3WOKnaOKneOKniOKXmOKXqOKXuOKHyOKH2OJ36OJ3+OJ4COJoGOJoKOJoKO"
    "JYOOJYSOJYWOJIaOJIeOI4iOI4mOI4qNIouNIoyNIo2NIY6NIY+NIZCNIZGMIJKMIJKMIJOMH5SM"
    "H5WLH5aLH5eLH5iLH5mKH5qKHpuKHpyJHp2JH56JH5+IH6CIH6GIH6GHH6KHIKOGIKSGIaWFIaaF"
    "IqeFIqiEI6mDJKqDJauCJayCJq2BJ62BKK6AKa9/KrB/LLF+LbJ9LrN8L7R8MbV7MrZ6NLZ5Nbd5"
    "N7h4OLl3Orp2O7t1Pbx0P7xzQL1yQr5xRL9wRsBvSMFuSsFtTMJsTsNrUMRqUsVpVMVoVsZnWMdl"
    "WshkXMhjXsliYMpgY8tfZcteZ8xcac1bbM1abs5YcM9Xc9BWddBUd9FTetFRfNJQf9NOgdNNhNRL"
    "htVJidVIi9ZGjtZFkNdDk9dBldhAmNg+m9k8ndk7oNo5oto3pds2qNs0qtwyrdwwsN0vst0ttd4r"
    "uN4put4ovd8mwN8lwt8jxeAhyOAgyuEfzeEd0OEc0uIb1eIa2OIZ2uMZ3eMY3+MY4uQY5eQZ5+QZ"
    "6uUa7OUb7+Uc8eUd9OYe9uYg+OYh++cj/ecl"
)
COLORMAP = np.frombuffer(base64.b64decode(_COLORMAP_B64), dtype=np.uint8).reshape(256, 3)


class GridFormatError(ValueError):
    """A grid file is malformed or inconsistent with its metadata."""


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def save_matrix_csv(path, values: np.ndarray, row_axis: np.ndarray, col_axis: np.ndarray, corner: str = "") -> None:
    """Rectangular CSV: first row = column axis, first column = row axis."""
    values = np.asarray(values)
    if values.shape != (row_axis.size, col_axis.size):
        raise GridFormatError(
            f"matrix shape {values.shape} does not match axes ({row_axis.size}, {col_axis.size})"
        )
    with open(path, "w", newline="") as fh:
        fh.write(corner + "," + ",".join(_fmt(v) for v in col_axis) + "\n")
        for i in range(row_axis.size):
            fh.write(_fmt(row_axis[i]) + "," + ",".join(_fmt(v) for v in values[i]) + "\n")


def _load_matrix_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if len(lines) < 2:
        raise GridFormatError(f"{path}: too few rows for a grid file")
    header = lines[0].split(",")
    col_axis = np.array([float(x) for x in header[1:]], dtype=float)
    row_axis = []
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != col_axis.size + 1:
            raise GridFormatError(f"{path}: ragged row with {len(parts) - 1} cells, expected {col_axis.size}")
        row_axis.append(float(parts[0]))
        rows.append([float(x) for x in parts[1:]])
    values = np.array(rows, dtype=float)
    if not np.all(np.isfinite(values)):
        raise GridFormatError(f"{path}: grid contains non-finite cells")
    return values, np.array(row_axis), col_axis


def _save_binary(path, values: np.ndarray) -> None:
    values = np.ascontiguousarray(values, dtype="<f8")
    header = _MAGIC + struct.pack("<III", values.shape[0], values.shape[1], 0)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(values.tobytes())


def _load_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:4] != _MAGIC:
            raise GridFormatError(f"{path}: bad magic; not a grid binary")
        rows, cols, _ = struct.unpack("<III", header[4:])
        payload = fh.read()
    expected = rows * cols * 8
    if len(payload) != expected:
        raise GridFormatError(f"{path}: payload is {len(payload)} bytes, expected {expected}")
    return np.frombuffer(payload, dtype="<f8").reshape(rows, cols).astype(float)


def _to_levels(values: np.ndarray, maxval: int) -> np.ndarray:
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        return np.zeros(values.shape, dtype=np.uint32)
    scaled = (values - lo) / (hi - lo) * maxval
    return (scaled + 0.5).astype(np.uint32).clip(0, maxval)


def _save_pgm(path, values: np.ndarray) -> None:
    levels = _to_levels(values, 65535).astype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{values.shape[1]} {values.shape[0]}\n65535\n".encode())
        fh.write(levels.tobytes())


def _png_chunk(tag: bytes, payload: bytes) -> bytes:
    body = tag + payload
    return struct.pack(">I", len(payload)) + body + struct.pack(">I", zlib.crc32(body) & 0xFFFFFFFF)


def _save_png(path, values: np.ndarray) -> None:
    idx = _to_levels(values, 255)
    rgb = COLORMAP[idx]
    h, w = idx.shape
    raw = b"".join(b"\x00" + rgb[i].tobytes() for i in range(h))
    with open(path, "wb") as fh:
        fh.write(b"\x89PNG\r\n\x1a\n")
        fh.write(_png_chunk(b"IHDR", struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)))
        fh.write(_png_chunk(b"IDAT", zlib.compress(raw, 9)))
        fh.write(_png_chunk(b"IEND", b""))


def _meta_path(base: str) -> str:
    return base + ".meta.json"


def _write_meta(base: str, meta: dict) -> None:
    with open(_meta_path(base), "w") as fh:
        json.dump(meta, fh, sort_keys=True, indent=1)
        fh.write("\n")


def save_grid(grid: SignalGrid, base_path, formats=("csv",), config_digest: str | None = None) -> list:
    """Write a signal grid under base_path.{csv,bin,pgm,png} plus metadata."""
    base = os.fspath(base_path)
    written = []
    if not np.all(np.isfinite(grid.values)):
        raise GridFormatError("refusing to serialize a grid with non-finite cells")
    for fmt in formats:
        path = f"{base}.{fmt}"
        if fmt == "csv":
            save_matrix_csv(path, grid.values, grid.temp_axis, grid.tau_axis, corner="temperature_c\\tau_ps")
        elif fmt == "bin":
            _save_binary(path, grid.values)
        elif fmt == "pgm":
            _save_pgm(path, grid.values)
        elif fmt == "png":
            _save_png(path, grid.values)
        else:
            raise GridFormatError(f"unknown output format {fmt!r}")
        written.append(path)
    meta = {
        "kind": "signal_grid",
        "format_version": _FORMAT_VERSION,
        "tau_axis_ps": [float(v) for v in grid.tau_axis],
        "temp_axis_c": [float(v) for v in grid.temp_axis],
        "normalization": grid.normalization.as_dict(),
        "raw_max": grid.raw_max,
        "provenance": grid.provenance,
        "config_digest": config_digest,
    }
    _write_meta(base, meta)
    written.append(_meta_path(base))
    return written


def load_grid(path) -> SignalGrid:
    """Load a signal grid from its CSV or binary file (metadata sidecar aware)."""
    path = os.fspath(path)
    base, ext = os.path.splitext(path)
    meta = None
    if os.path.exists(_meta_path(base)):
        with open(_meta_path(base)) as fh:
            meta = json.load(fh)
        if meta.get("kind") != "signal_grid":
            raise GridFormatError(f"{path}: metadata sidecar describes {meta.get('kind')!r}, not a signal grid")
    if ext == ".csv":
        values, row_axis, col_axis = _load_matrix_csv(path)
    elif ext == ".bin":
        if meta is None:
            raise GridFormatError(f"{path}: binary grids need their metadata sidecar for the axes")
        values = _load_binary(path)
        row_axis = np.array(meta["temp_axis_c"], dtype=float)
        col_axis = np.array(meta["tau_axis_ps"], dtype=float)
        if values.shape != (row_axis.size, col_axis.size):
            raise GridFormatError(f"{path}: payload shape {values.shape} disagrees with metadata axes")
    else:
        raise GridFormatError(f"cannot load grid from {ext!r} files; use .csv or .bin")
    norm = SignalNormalization()
    raw_max = float(values.max())
    provenance = {}
    if meta is not None:
        norm = SignalNormalization(**meta["normalization"])
        raw_max = meta.get("raw_max", raw_max)
        provenance = meta.get("provenance", {})
    return SignalGrid(
        values=values,
        tau_axis=col_axis,
        temp_axis=row_axis,
        normalization=norm,
        raw_max=raw_max,
        provenance=provenance,
    )


def save_spectrum_map(spectrum: SpectrumMap, base_path, formats=("csv",), config_digest: str | None = None) -> list:
    """Write a spectrum map under base_path.{csv,bin,pgm,png} plus metadata.

    Rows are temperatures, columns frequencies (the transpose of the in-memory
    layout) so the rectangular file shape matches the signal grid's.
    """
    base = os.fspath(base_path)
    values = spectrum.magnitudes.T
    written = []
    for fmt in formats:
        path = f"{base}.{fmt}"
        if fmt == "csv":
            save_matrix_csv(path, values, spectrum.temp_axis, spectrum.freq_axis, corner="temperature_c\\freq_rad_per_ps")
        elif fmt == "bin":
            _save_binary(path, values)
        elif fmt == "pgm":
            _save_pgm(path, values)
        elif fmt == "png":
            _save_png(path, values)
        else:
            raise GridFormatError(f"unknown output format {fmt!r}")
        written.append(path)
    meta = {
        "kind": "spectrum_map",
        "format_version": _FORMAT_VERSION,
        "freq_axis_rad_per_ps": [float(v) for v in spectrum.freq_axis],
        "temp_axis_c": [float(v) for v in spectrum.temp_axis],
        "window": spectrum.window,
        "config_digest": config_digest,
    }
    _write_meta(base, meta)
    written.append(_meta_path(base))
    return written


def load_spectrum_map(path) -> SpectrumMap:
    path = os.fspath(path)
    base, ext = os.path.splitext(path)
    meta = None
    if os.path.exists(_meta_path(base)):
        with open(_meta_path(base)) as fh:
            meta = json.load(fh)
        if meta.get("kind") != "spectrum_map":
            raise GridFormatError(f"{path}: metadata sidecar describes {meta.get('kind')!r}, not a spectrum map")
    if ext == ".csv":
        values, row_axis, col_axis = _load_matrix_csv(path)
    elif ext == ".bin":
        if meta is None:
            raise GridFormatError(f"{path}: binary maps need their metadata sidecar for the axes")
        values = _load_binary(path)
        row_axis = np.array(meta["temp_axis_c"], dtype=float)
        col_axis = np.array(meta["freq_axis_rad_per_ps"], dtype=float)
    else:
        raise GridFormatError(f"cannot load spectrum map from {ext!r} files; use .csv or .bin")
    window = meta.get("window", "hann") if meta else "hann"
    return SpectrumMap(magnitudes=values.T, freq_axis=col_axis, temp_axis=row_axis, window=window)


def write_report(report: dict, base_path, text: str) -> list:
    """Dual-emit a report: machine-readable JSON plus a human text rendering."""
    base = os.fspath(base_path)
    json_path = base + ".json"
    txt_path = base + ".txt"
    with open(json_path, "w") as fh:
        json.dump(report, fh, sort_keys=True, indent=1)
        fh.write("\n")
    with open(txt_path, "w") as fh:
        fh.write(text)
        if not text.endswith("\n"):
            fh.write("\n")
    return [json_path, txt_path]
