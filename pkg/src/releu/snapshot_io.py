"""Flat binary snapshot files.

Layout (all integers u32 little-endian, all floats f64 little-endian):

    magic    8 bytes  b"RELEUv1\\0"
    n1 n2 n3 3 x u32
    tau      f64
    count    u32      number of named fields
    then per field:
      name_len u32, name bytes (utf-8),
      ncomp    u32   leading component count (1 for scalars),
      data     ncomp * n1 * n2 * n3 f64 values, i1 fastest, then i2,
               then i3, components contiguous.

The format is deliberately dumb so an independent reader fits in a page of
any language. Readers here validate the magic, every size against the
header, and that the file ends exactly where the payload does.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"RELEUv1\0"


class SnapshotFormatError(RuntimeError):
    """The bytes are not a well-formed snapshot."""


class SnapshotMagicError(SnapshotFormatError):
    """Leading bytes are not the format magic."""


class SnapshotTruncationError(SnapshotFormatError):
    """The file ends before the declared payload does."""


class SnapshotDimensionError(SnapshotFormatError):
    """Declared or expected dimensions are inconsistent with the payload."""


@dataclass(frozen=True)
class Snapshot:
    n1: int
    n2: int
    n3: int
    tau: float
    fields: dict[str, np.ndarray]

    @property
    def shape(self):
        return (self.n1, self.n2, self.n3)


def _payload_bytes(arr: np.ndarray, shape) -> tuple[int, bytes]:
    if arr.ndim == 3:
        components = arr[None]
    elif arr.ndim == 4:
        components = arr
    else:
        raise ValueError(f"snapshot fields are 3- or 4-dimensional, got {arr.ndim}")
    if components.shape[1:] != shape:
        raise SnapshotDimensionError(
            f"field shape {components.shape[1:]} does not match grid {shape}"
        )
    # i1 fastest: reverse the grid axes, keep components outermost
    ordered = np.ascontiguousarray(
        components.transpose(0, 3, 2, 1).astype("<f8", copy=False)
    )
    return components.shape[0], ordered.tobytes()


def write_snapshot(path, shape, tau: float, fields: dict[str, np.ndarray]) -> None:
    """Serialize named fields on a grid of the given (n1, n2, n3) shape.

    Scalar fields may be passed with 3 axes; component fields with a leading
    component axis. Insertion order of `fields` is preserved on disk.
    """
    n1, n2, n3 = shape
    chunks = [MAGIC, struct.pack("<3I", n1, n2, n3)]
    chunks.append(struct.pack("<d", float(tau)))
    chunks.append(struct.pack("<I", len(fields)))
    for name, arr in fields.items():
        encoded = name.encode("utf-8")
        ncomp, payload = _payload_bytes(np.asarray(arr), tuple(shape))
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", ncomp))
        chunks.append(payload)
    blob = b"".join(chunks)
    with open(path, "wb") as fh:
        fh.write(blob)


class _Cursor:
    def __init__(self, blob: bytes, path):
        self.blob = blob
        self.path = path
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.blob):
            raise SnapshotTruncationError(
                f"{self.path}: truncated while reading {what} "
                f"(needed {n} bytes at offset {self.pos}, "
                f"file has {len(self.blob)})"
            )
        out = self.blob[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def f64(self, what: str) -> float:
        return struct.unpack("<d", self.take(8, what))[0]


def read_snapshot(path, expect_shape=None) -> Snapshot:
    """Parse one snapshot file; no partial state escapes on any failure.

    Args:
        path: file to read.
        expect_shape: optional (n1, n2, n3) the header must match.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    cur = _Cursor(blob, path)
    magic = cur.take(len(MAGIC), "magic")
    if magic != MAGIC:
        raise SnapshotMagicError(
            f"{path}: bad magic {magic!r} (expected {MAGIC!r}); not a "
            f"snapshot or not little-endian"
        )
    n1 = cur.u32("n1")
    n2 = cur.u32("n2")
    n3 = cur.u32("n3")
    if expect_shape is not None and (n1, n2, n3) != tuple(expect_shape):
        raise SnapshotDimensionError(
            f"{path}: grid ({n1}, {n2}, {n3}) does not match expected "
            f"{tuple(expect_shape)}"
        )
    tau = cur.f64("tau")
    count = cur.u32("field count")
    fields: dict[str, np.ndarray] = {}
    node_count = n1 * n2 * n3
    for i in range(count):
        name_len = cur.u32(f"name length of field {i}")
        name = cur.take(name_len, f"name of field {i}").decode("utf-8")
        ncomp = cur.u32(f"component count of '{name}'")
        if ncomp == 0 or ncomp > 64:
            raise SnapshotDimensionError(
                f"{path}: implausible component count {ncomp} for '{name}'"
            )
        raw = cur.take(8 * ncomp * node_count, f"data of '{name}'")
        flat = np.frombuffer(raw, dtype="<f8").astype(np.float64, copy=False)
        arr = flat.reshape(ncomp, n3, n2, n1).transpose(0, 3, 2, 1)
        fields[name] = np.ascontiguousarray(arr[0] if ncomp == 1 else arr)
    if cur.pos != len(blob):
        raise SnapshotFormatError(
            f"{path}: {len(blob) - cur.pos} trailing bytes after declared "
            f"payload"
        )
    return Snapshot(n1=n1, n2=n2, n3=n3, tau=tau, fields=fields)


def read_series(paths, expect_shape=None) -> list[Snapshot]:
    """Read many snapshots and return them sorted by tau."""
    snaps = [read_snapshot(p, expect_shape=expect_shape) for p in paths]
    snaps.sort(key=lambda s: s.tau)
    if len({s.shape for s in snaps}) > 1:
        raise SnapshotDimensionError("snapshot series mixes grid shapes")
    return snaps
