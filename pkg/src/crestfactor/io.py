"""Atomic file output and the field snapshot format."""

from __future__ import annotations

import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .spectral import PeriodicGrid, SpectralField, to_physical, to_spectral


def atomic_write_text(path, text: str):
    """Write to a temporary sibling then rename, so readers never see partial files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render(writer) -> str:
    """Collect the output of ``writer(fh)`` into a string."""
    buf = io.StringIO()
    writer(buf)
    return buf.getvalue()


def write_json(path, obj):
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serialisable: {type(x)}")


def snapshot_text(f: SpectralField) -> str:
    """Header ``d,L,N,components`` then one row per grid point in C order."""
    g = f.grid
    samples = to_physical(f).reshape(f.components, -1).T
    lines = [f"{g.d},{g.L!r},{g.N},{f.components}"]
    lines += [",".join(repr(float(v)) for v in row) for row in samples]
    return "\n".join(lines) + "\n"


def write_snapshot(path, f: SpectralField):
    atomic_write_text(path, snapshot_text(f))


def read_snapshot(path) -> SpectralField:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        try:
            d, L, N, c = int(header[0]), float(header[1]), int(header[2]), int(header[3])
        except (IndexError, ValueError) as exc:
            raise ConfigurationError(f"bad snapshot header in {path}: {header}") from exc
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    grid = PeriodicGrid(d, L, N)
    if data.shape != (N**d, c):
        raise ConfigurationError(f"snapshot {path} holds {data.shape}, expected {(N**d, c)}")
    return to_spectral(grid, data.T.reshape((c,) + grid.shape))
