"""Reader/writer for .fpc intensity cubes and the corpus manifest.

Used by the Python side (network training, predictions) to exchange data
with the C++ tools. Layout, little-endian:

    magic b"FPCUBE1\\0" | u32 version | u32 side | u32 channels | u32 flags
    | u64 metadata length | metadata JSON | float32 payload | u64 CRC-64/XZ

The checksum covers the payload only. flags bit 0 marks an upsampled cube.
"""

import csv
import json
import struct

import numpy as np

MAGIC = b"FPCUBE1\0"
VERSION = 1
MANIFEST_HEADER = ["cube_path", "source", "overlap", "noise_std", "seed", "checksum"]

_POLY = 0xC96C5795D7870F42  # reflected 0x42F0E1EBA9EA3693


def _table():
    t = []
    for i in range(256):
        c = i
        for _ in range(8):
            c = (c >> 1) ^ _POLY if c & 1 else c >> 1
        t.append(c)
    return t


_TABLE = _table()


def crc64(data: bytes) -> int:
    c = 0xFFFFFFFFFFFFFFFF
    for b in data:
        c = _TABLE[(c ^ b) & 0xFF] ^ (c >> 8)
    return c ^ 0xFFFFFFFFFFFFFFFF


class FormatError(ValueError):
    pass


def read_cube(path):
    """Returns (data[channels, side, side] float32, meta dict, upsampled)."""
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:8] != MAGIC:
        raise FormatError("bad magic")
    if len(raw) < 32:
        raise FormatError("truncated header")
    version, side, channels, flags, meta_len = struct.unpack_from("<IIIIQ", raw, 8)
    if version != VERSION:
        raise FormatError(f"version {version}, expected {VERSION}")
    payload_len = side * side * channels * 4
    end = 32 + meta_len + payload_len + 8
    if len(raw) < end:
        raise FormatError("truncated")
    if len(raw) > end:
        raise FormatError("trailing data")
    meta = json.loads(raw[32:32 + meta_len].decode("utf-8"))
    payload = raw[32 + meta_len:32 + meta_len + payload_len]
    (stored,) = struct.unpack_from("<Q", raw, end - 8)
    if crc64(payload) != stored:
        raise FormatError("checksum mismatch")
    data = np.frombuffer(payload, dtype="<f4").reshape(channels, side, side)
    return data, meta, bool(flags & 1)


def write_cube(path, data, meta=None, upsampled=False):
    """Writes data[channels, side, side] (or one [side, side] image)."""
    data = np.asarray(data, dtype="<f4")
    if data.ndim == 2:
        data = data[None]
    channels, side, side2 = data.shape
    if side != side2:
        raise ValueError("channels must be square")
    m = {
        "spacing": 0.0, "pupil_radius": 0.0, "overlap_achieved": 0.0, "noise_std": 0.0,
        "shuffle_seed": 0, "permutation": list(range(channels)), "norm": [1.0] * channels,
        "source_id": "", "ground_truth": "",
    }
    m.update(meta or {})
    text = json.dumps(m).encode("utf-8")
    payload = np.ascontiguousarray(data).tobytes()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<IIIIQ", VERSION, side, channels, 1 if upsampled else 0, len(text)))
        f.write(text)
        f.write(payload)
        f.write(struct.pack("<Q", crc64(payload)))


def prediction_path(cube_path, shuffled=False):
    """Where the evaluator looks for a network prediction of `cube_path`."""
    stem = str(cube_path)[:-len(".fpc")] if str(cube_path).endswith(".fpc") else str(cube_path)
    return stem + (".fpnet-r.fpc" if shuffled else ".fpnet.fpc")


def read_manifest(path):
    rows, skipped = [], []
    with open(path, newline="") as f:
        lines = [ln for ln in f if ln.strip()]
    if not lines or lines[0].strip().split(",") != MANIFEST_HEADER:
        raise FormatError("manifest header")
    body = []
    for ln in lines[1:]:
        if ln.startswith("# skipped: "):
            skipped.append(ln[len("# skipped: "):].rstrip("\n"))
        elif not ln.startswith("#"):
            body.append(ln)
    for r in csv.reader(body):
        rows.append({
            "cube_path": r[0], "source": r[1], "overlap": float(r[2]),
            "noise_std": float(r[3]), "seed": int(r[4]), "checksum": int(r[5], 16),
        })
    return rows, skipped
