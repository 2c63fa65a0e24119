"""Binary PPM (P6) output: heatmaps for 2-D fields, line plots for 1-D ones."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def palette() -> np.ndarray:
    """256 RGB entries running blue -> white -> red."""
    t = np.arange(256) / 255.0
    lo = np.clip(t / 0.5, 0.0, 1.0)  # 0 at blue end, 1 at white
    hi = np.clip((t - 0.5) / 0.5, 0.0, 1.0)  # 0 at white, 1 at red end
    r = np.where(t <= 0.5, lo, 1.0)
    g = np.where(t <= 0.5, lo, 1.0 - hi)
    b = np.where(t <= 0.5, 1.0, 1.0 - hi)
    return np.round(np.stack([r, g, b], axis=1) * 255).astype(np.uint8)


def normalize(values: np.ndarray) -> np.ndarray:
    vmin, vmax = float(values.min()), float(values.max())
    if vmax <= vmin:
        return np.zeros(values.shape, dtype=np.int64)
    idx = np.floor((values - vmin) / (vmax - vmin) * 255.0 + 0.5)
    return np.clip(idx, 0, 255).astype(np.int64)


def write_ppm(path, rgb: np.ndarray) -> None:
    h, w, _ = rgb.shape
    Path(path).write_bytes(b"P6\n%d %d\n255\n" % (w, h) + rgb.astype(np.uint8).tobytes())


def read_ppm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    parts = raw.split(maxsplit=4)
    if parts[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4], dtype=np.uint8, count=w * h * 3).reshape(h, w, 3)


def heatmap(x: np.ndarray, values: np.ndarray, scale: int = 4) -> np.ndarray:
    """Image of a field sampled on a square tensor grid (first coordinate slowest).

    The first coordinate runs left to right and the second bottom to top.
    """
    n = values.shape[0]
    res = int(round(np.sqrt(n)))
    if res * res != n or res < 2:
        raise ValueError(f"{n} rows do not form a square grid")
    order = np.lexsort((x[:, 1], x[:, 0]))
    img = values[order].reshape(res, res)  # [i0, i1]
    img = img.T[::-1]  # rows: second coordinate descending
    rgb = palette()[normalize(img)]
    return np.repeat(np.repeat(rgb, scale, axis=0), scale, axis=1)


def _line(canvas: np.ndarray, r0: int, c0: int, r1: int, c1: int, color) -> None:
    steps = max(abs(r1 - r0), abs(c1 - c0), 1)
    rr = np.round(np.linspace(r0, r1, steps + 1)).astype(int)
    cc = np.round(np.linspace(c0, c1, steps + 1)).astype(int)
    canvas[rr, cc] = color


def line_plot(t: np.ndarray, values: np.ndarray, width: int = 640, height: int = 240, margin: int = 8) -> np.ndarray:
    order = np.argsort(t, kind="stable")
    t, values = t[order], values[order]
    canvas = np.full((height, width, 3), 255, dtype=np.uint8)
    span_t = max(float(t.max() - t.min()), 1e-300)
    vmin, vmax = float(values.min()), float(values.max())
    span_v = vmax - vmin if vmax > vmin else 1.0
    cols = margin + np.round((t - t.min()) / span_t * (width - 1 - 2 * margin)).astype(int)
    rows = height - 1 - margin - np.round((values - vmin) / span_v * (height - 1 - 2 * margin)).astype(int)
    if vmin < 0 < vmax:  # zero axis
        r0 = height - 1 - margin - int(round(-vmin / span_v * (height - 1 - 2 * margin)))
        canvas[r0, margin : width - margin] = (200, 200, 200)
    color = palette()[0]
    for i in range(len(t) - 1):
        _line(canvas, rows[i], cols[i], rows[i + 1], cols[i + 1], color)
    if len(t) == 1:
        canvas[rows[0], cols[0]] = color
    return canvas


def render_field(x: np.ndarray, values: np.ndarray, out) -> None:
    rgb = heatmap(x, values) if x.shape[1] == 2 else line_plot(x[:, 0], values)
    write_ppm(out, rgb)
