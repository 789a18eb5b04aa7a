"""Deterministic rasterizer for the three-channel visual representation.

Channel 0 is the quiver plot (Bresenham segments scaled by the cloud's max
vector norm), channel 1 the streamline plot (binary RK4 trajectory
occupancy) and channel 2 the speed heatmap (per-pixel |X| normalized by its
grid maximum).  Rendering is a pure function of its inputs; no plotting
library is involved so output bytes are platform independent.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, asdict

import numpy as np

from .cloud import DOMAIN_HALF
from .field import FieldExpr, FieldSample

__all__ = ["RenderConfig", "Raster", "render", "export_png", "export_tensor",
           "load_tensor", "TensorFormatError"]

TENSOR_MAGIC = b"SYMF"
TENSOR_VERSION = 1
_SPEED_EPS = 1e-9


@dataclass(frozen=True)
class RenderConfig:
    resolution: int = 128
    stream_seeds: int = 7
    rk4_step: float = 0.2
    max_steps: int = 300

    def __post_init__(self):
        if not 32 <= self.resolution <= 1024:
            raise ValueError("resolution must be in [32, 1024]")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Raster:
    channels: np.ndarray  # (3, R, R) float32 in [0, 1]; row 0 is y = -10

    def __post_init__(self):
        self.channels.setflags(write=False)

    @property
    def resolution(self) -> int:
        return self.channels.shape[1]


def _to_pixel(coord: float, resolution: int) -> int:
    return int(math.floor((coord + DOMAIN_HALF) / (2 * DOMAIN_HALF) * resolution))


def _bresenham(ch: np.ndarray, x0: int, y0: int, x1: int, y1: int) -> None:
    """Stamp the integer segment (x0,y0)-(x1,y1); out-of-range pixels skipped."""
    res = ch.shape[0]
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        if 0 <= x0 < res and 0 <= y0 < res:
            ch[y0, x0] = 1.0
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def _quiver_channel(sample: FieldSample, resolution: int) -> np.ndarray:
    ch = np.zeros((resolution, resolution), dtype=np.float32)
    valid = ~sample.nan_mask
    if not valid.any():
        return ch
    vecs = sample.vectors[valid]
    pts = sample.cloud.points[valid]
    norms = np.hypot(vecs[:, 0], vecs[:, 1])
    vmax = float(norms.max())
    if vmax == 0.0:
        return ch
    side = round(math.sqrt(sample.cloud.n))
    pitch = 2 * DOMAIN_HALF / max(side - 1, 1)
    scale = 0.9 * pitch / vmax
    ends = pts + scale * vecs
    for (px, py), (qx, qy) in zip(pts, ends):
        _bresenham(ch,
                   _to_pixel(px, resolution), _to_pixel(py, resolution),
                   _to_pixel(qx, resolution), _to_pixel(qy, resolution))
    return ch


def _stamp(ch: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> None:
    res = ch.shape[0]
    ix = np.floor((xs + DOMAIN_HALF) / (2 * DOMAIN_HALF) * res).astype(np.int64)
    iy = np.floor((ys + DOMAIN_HALF) / (2 * DOMAIN_HALF) * res).astype(np.int64)
    keep = (ix >= 0) & (ix < res) & (iy >= 0) & (iy < res)
    ch[iy[keep], ix[keep]] = 1.0


def _streamline_channel(fx, fy, cfg: RenderConfig) -> np.ndarray:
    res = cfg.resolution
    ch = np.zeros((res, res), dtype=np.float32)
    k = cfg.stream_seeds
    axis = -DOMAIN_HALF + (np.arange(k) + 0.5) * (2 * DOMAIN_HALF / k)
    sy, sx = np.meshgrid(axis, axis, indexing="ij")
    seeds = np.column_stack([sx.ravel(), sy.ravel()])
    # one trajectory per seed per time direction
    pos = np.concatenate([seeds, seeds])
    steps = np.concatenate([np.full(len(seeds), cfg.rk4_step),
                            np.full(len(seeds), -cfg.rk4_step)])
    for _ in range(cfg.max_steps):
        x, y = pos[:, 0], pos[:, 1]
        k1x, k1y = fx(x, y), fy(x, y)
        speed = np.hypot(k1x, k1y)
        alive = np.isfinite(speed) & (speed >= _SPEED_EPS)
        if not alive.any():
            break
        pos, steps = pos[alive], steps[alive]
        # stamp before moving so only trajectories that flow mark pixels
        _stamp(ch, pos[:, 0], pos[:, 1])
        k1 = np.column_stack([k1x[alive], k1y[alive]])
        h = steps[:, None]
        p2 = pos + 0.5 * h * k1
        k2 = np.column_stack([fx(p2[:, 0], p2[:, 1]), fy(p2[:, 0], p2[:, 1])])
        p3 = pos + 0.5 * h * k2
        k3 = np.column_stack([fx(p3[:, 0], p3[:, 1]), fy(p3[:, 0], p3[:, 1])])
        p4 = pos + h * k3
        k4 = np.column_stack([fx(p4[:, 0], p4[:, 1]), fy(p4[:, 0], p4[:, 1])])
        new = pos + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        inside = (np.isfinite(new).all(axis=1)
                  & (np.abs(new) <= DOMAIN_HALF).all(axis=1))
        if not inside.any():
            break
        pos, steps = new[inside], steps[inside]
    return ch


def _heatmap_channel(fx, fy, cfg: RenderConfig) -> np.ndarray:
    res = cfg.resolution
    centers = -DOMAIN_HALF + (np.arange(res) + 0.5) * (2 * DOMAIN_HALF / res)
    gy, gx = np.meshgrid(centers, centers, indexing="ij")
    mag = np.hypot(fx(gx, gy), fy(gx, gy))
    finite = np.isfinite(mag)
    if not finite.any():
        return np.zeros((res, res), dtype=np.float32)
    m = float(mag[finite].max())
    if m == 0.0:
        return np.zeros((res, res), dtype=np.float32)
    out = np.where(finite, mag / m, 0.0)
    return out.astype(np.float32)


def render(sample: FieldSample, X: FieldExpr, cfg: RenderConfig) -> Raster:
    """Render (quiver, streamline, heatmap) channels; pure and deterministic."""
    fx, fy = X.compiled()
    ch = np.stack([
        _quiver_channel(sample, cfg.resolution),
        _streamline_channel(fx, fy, cfg),
        _heatmap_channel(fx, fy, cfg),
    ])
    return Raster(np.clip(ch, 0.0, 1.0).astype(np.float32))


# ---------------------------------------------------------------------------
# export

PNG_SUFFIXES = ("_q", "_s", "_h")


def export_png(r: Raster, path_stem) -> list[str]:
    """Write one 8-bit grayscale PNG per channel; returns the written paths."""
    from PIL import Image

    paths = []
    for suffix, ch in zip(PNG_SUFFIXES, r.channels):
        img = np.rint(255.0 * ch[::-1]).astype(np.uint8)  # y axis up
        p = f"{path_stem}{suffix}.png"
        Image.fromarray(img, mode="L").save(p)
        paths.append(p)
    return paths


class TensorFormatError(ValueError):
    pass


def export_tensor(r: Raster, path) -> None:
    c, h, w = r.channels.shape
    header = TENSOR_MAGIC + struct.pack("<IIII", TENSOR_VERSION, h, w, c)
    data = np.ascontiguousarray(r.channels, dtype="<f4")
    with open(path, "wb") as f:
        f.write(header)
        f.write(data.tobytes())


def tensor_bytes(r: Raster) -> bytes:
    c, h, w = r.channels.shape
    return (TENSOR_MAGIC + struct.pack("<IIII", TENSOR_VERSION, h, w, c)
            + np.ascontiguousarray(r.channels, dtype="<f4").tobytes())


def load_tensor(path) -> Raster:
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < 20 or blob[:4] != TENSOR_MAGIC:
        raise TensorFormatError(f"{path}: not a SYMF tensor file")
    version, h, w, c = struct.unpack("<IIII", blob[4:20])
    if version != TENSOR_VERSION:
        raise TensorFormatError(f"{path}: unsupported version {version}")
    expected = 20 + 4 * c * h * w
    if len(blob) != expected:
        raise TensorFormatError(f"{path}: truncated payload "
                                f"({len(blob)} bytes, expected {expected})")
    data = np.frombuffer(blob, dtype="<f4", offset=20).reshape(c, h, w)
    return Raster(data.astype(np.float32))
