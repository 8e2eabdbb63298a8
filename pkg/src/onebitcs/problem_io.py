"""Problem serialization: a small binary container plus a CSV export.

Binary container layout (all integers little-endian):

    offset 0   magic bytes  b"OB1T"
    offset 4   version      u8   (currently 1)
    offset 5   flags        u8   (bit 0: truth block present)
    offset 6   m            u64
    offset 14  n            u64
    offset 22  psi          m*n float64, row-major
    ...        y            m int8 (+1 / -1)

    optional truth block (when flags bit 0 is set):
        s          u64
        support    s   u64
        x_star     n   float64
        c_scale    float64
        nu         float64
        sigma      float64
        flip_prob  float64
        seed       u64

Floats are raw IEEE-754 bytes, so save/load round-trips exactly.

The CSV export is one row per measurement: ``y`` first, then the ``n``
sensing-row entries, with 17-significant-digit reals.  It carries no truth
block; it exists for interop with tools that cannot read the container.
"""

from __future__ import annotations

import struct

import numpy as np

from .sensing import GroundTruth, ModelParams, SensingProblem

__all__ = ["MAGIC", "VERSION", "save_problem", "load_problem", "export_csv"]

MAGIC = b"OB1T"
VERSION = 1

_FLAG_TRUTH = 0x01


def save_problem(problem, path):
    """Write a problem (and its truth, if present) to the binary container."""
    psi = np.ascontiguousarray(problem.psi, dtype="<f8")
    m, n = psi.shape
    y = np.asarray(problem.y)
    if y.shape != (m,):
        raise ValueError(f"y has shape {y.shape}, expected ({m},)")
    y8 = np.where(y >= 0, 1, -1).astype(np.int8)

    flags = _FLAG_TRUTH if problem.truth is not None else 0
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BBQQ", VERSION, flags, m, n))
        fh.write(psi.tobytes())
        fh.write(y8.tobytes())
        if problem.truth is not None:
            t = problem.truth
            support = np.asarray(t.support, dtype="<u8")
            fh.write(struct.pack("<Q", support.size))
            fh.write(support.tobytes())
            fh.write(np.ascontiguousarray(t.x_star, dtype="<f8").tobytes())
            p = t.params
            fh.write(struct.pack("<dddd", t.c_scale, p.nu, p.sigma, p.flip_prob))
            fh.write(struct.pack("<Q", p.seed))


def load_problem(path):
    """Read a problem from the binary container written by save_problem."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: bad magic {data[:4]!r}, expected {MAGIC!r}")
    version, flags, m, n = struct.unpack_from("<BBQQ", data, 4)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported container version {version}")
    off = 22
    psi = np.frombuffer(data, dtype="<f8", count=m * n, offset=off).reshape(m, n)
    off += 8 * m * n
    y = np.frombuffer(data, dtype=np.int8, count=m, offset=off).astype(float)
    off += m

    truth = None
    if flags & _FLAG_TRUTH:
        (s,) = struct.unpack_from("<Q", data, off)
        off += 8
        support = np.frombuffer(data, dtype="<u8", count=s, offset=off).astype(int)
        off += 8 * s
        x_star = np.frombuffer(data, dtype="<f8", count=n, offset=off).copy()
        off += 8 * n
        c_scale, nu, sigma, flip_prob = struct.unpack_from("<dddd", data, off)
        off += 32
        (seed,) = struct.unpack_from("<Q", data, off)
        params = ModelParams(
            m=m, n=n, s=s, nu=nu, sigma=sigma, flip_prob=flip_prob, seed=seed
        )
        truth = GroundTruth(
            x_star=x_star, support=support, c_scale=c_scale, params=params
        )
    return SensingProblem(psi=psi.copy(), y=y, truth=truth)


def export_csv(problem, path):
    """Write (y, psi) as CSV, one measurement per row."""
    n = problem.psi.shape[1]
    header = "y," + ",".join(f"psi_{j}" for j in range(n))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for yi, row in zip(problem.y, problem.psi):
            cells = [f"{yi:.0f}"] + [f"{v:.17g}" for v in row]
            fh.write(",".join(cells) + "\n")
