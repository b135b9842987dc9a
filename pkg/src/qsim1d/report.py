"""Run artifacts: delimited tables, a deterministic SVG heatmap, and figures.

All floats are written with 17 significant digits so that reading them back
reproduces the doubles exactly, and all text files use LF line endings.
The SVG path builds the document by hand from integers and fixed-format
numbers, so identical tables yield byte-identical files.  The PNG figures
are rendered with the Agg backend.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .grid import GridSpec

__all__ = [
    "format_float",
    "write_probabilities_csv",
    "write_rms_csv",
    "write_spectrum_csv",
    "read_probabilities_csv",
    "render_heatmap_svg",
    "save_heatmap_png",
    "save_rms_png",
]


def format_float(x: float) -> str:
    return f"{x:.17g}"


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_probabilities_csv(path, grid: GridSpec, table: np.ndarray) -> None:
    """Write the site-by-step table as rows of ``step,j,x,probability``."""
    xs = grid.positions()
    buf = io.StringIO()
    buf.write("step,j,x,probability\n")
    for m in range(table.shape[1]):
        for j in range(table.shape[0]):
            buf.write(f"{m},{j},{format_float(xs[j])},{format_float(table[j, m])}\n")
    _write_text(path, buf.getvalue())


def write_rms_csv(path, rms_values) -> None:
    buf = io.StringIO()
    buf.write("step,rms\n")
    for m, value in enumerate(rms_values):
        buf.write(f"{m},{format_float(value)}\n")
    _write_text(path, buf.getvalue())


def write_spectrum_csv(path, lines) -> None:
    """Write ancilla SpectrumLine records sorted by register state."""
    n_bits = max(1, max(line.neighbor_state for line in lines).bit_length())
    n_bits = max(n_bits, 4) if len(lines) >= 16 else n_bits
    buf = io.StringIO()
    buf.write("register_state,frequency_hz,intensity\n")
    for line in sorted(lines, key=lambda rec: rec.neighbor_state):
        buf.write(
            f"{line.neighbor_state:0{n_bits}b},"
            f"{format_float(line.frequency_hz)},{format_float(line.intensity)}\n"
        )
    _write_text(path, buf.getvalue())


def read_probabilities_csv(path) -> np.ndarray:
    """Read ``step,j,x,probability`` rows back into a site-by-step table."""
    steps: list[int] = []
    sites: list[int] = []
    probs: list[float] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["step", "j", "x", "probability"]:
            raise ValueError(f"unexpected probabilities header: {header}")
        for row in reader:
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"malformed probabilities row: {row}")
            try:
                steps.append(int(row[0]))
                sites.append(int(row[1]))
                float(row[2])
                probs.append(float(row[3]))
            except ValueError as exc:
                raise ValueError(f"malformed probabilities row: {row}") from exc
    if not probs:
        raise ValueError("probability table is empty")
    n_cols = max(steps) + 1
    n_rows = max(sites) + 1
    if len(probs) != n_cols * n_rows:
        raise ValueError("probability table is not a complete step-by-site grid")
    table = np.full((n_rows, n_cols), np.nan)
    for m, j, p in zip(steps, sites, probs):
        table[j, m] = p
    if np.any(np.isnan(table)):
        raise ValueError("probability table has missing entries")
    return table


_CELL = 24
_LEFT = 64
_TOP = 18
_RIGHT = 18
_BOTTOM = 46


def render_heatmap_svg(table: np.ndarray) -> str:
    """Site-by-step heatmap as a standalone SVG document.

    One grayscale rectangle per (step, site) cell with probability 1 black
    and probability 0 white; the x axis counts steps, the y axis shows the
    position in units of dx (site index minus center), increasing upward.
    """
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.size == 0:
        raise ValueError("expected a non-empty 2-D probability table")
    n_sites, n_cols = table.shape
    width = _LEFT + n_cols * _CELL + _RIGHT
    height = _TOP + n_sites * _CELL + _BOTTOM
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    for m in range(n_cols):
        for j in range(n_sites):
            p = min(max(float(table[j, m]), 0.0), 1.0)
            gray = 255 - round(255 * p)
            x = _LEFT + m * _CELL
            y = _TOP + (n_sites - 1 - j) * _CELL
            out.append(
                f'<rect x="{x}" y="{y}" width="{_CELL}" height="{_CELL}" '
                f'fill="rgb({gray},{gray},{gray})"/>'
            )
    stride = max(1, n_sites // 16)
    center = (n_sites - 1) / 2.0
    for j in range(0, n_sites, stride):
        y = _TOP + (n_sites - 1 - j) * _CELL + _CELL // 2 + 4
        out.append(
            f'<text x="{_LEFT - 6}" y="{y}" font-size="11" text-anchor="end" '
            f'font-family="monospace">{j - center:g}</text>'
        )
    for m in range(n_cols):
        x = _LEFT + m * _CELL + _CELL // 2
        out.append(
            f'<text x="{x}" y="{_TOP + n_sites * _CELL + 14}" font-size="11" '
            f'text-anchor="middle" font-family="monospace">{m}</text>'
        )
    out.append(
        f'<text x="{_LEFT + n_cols * _CELL // 2}" y="{height - 8}" font-size="12" '
        f'text-anchor="middle" font-family="monospace">time step</text>'
    )
    out.append(
        f'<text x="14" y="{_TOP + n_sites * _CELL // 2}" font-size="12" '
        f'text-anchor="middle" font-family="monospace" '
        f'transform="rotate(-90 14 {_TOP + n_sites * _CELL // 2})">position (dx units)</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_heatmap_png(path, grid: GridSpec, table: np.ndarray, title: str = "") -> None:
    """Probability heatmap over (step, position) rendered with matplotlib."""
    plt = _pyplot()
    n_cols = table.shape[1]
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    extent = (-0.5, n_cols - 0.5, -grid.center - 0.5, grid.center + 0.5)
    im = ax.imshow(
        table,
        origin="lower",
        aspect="auto",
        cmap="Greys",
        vmin=0.0,
        vmax=1.0,
        extent=extent,
        interpolation="nearest",
    )
    ax.set_xlabel("time step")
    ax.set_ylabel("position (dx units)")
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, label="probability")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_rms_png(path, rms_values, title: str = "") -> None:
    """Per-step RMS error against the dense-propagator baseline."""
    plt = _pyplot()
    rms_values = np.asarray(rms_values, dtype=float)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(np.arange(rms_values.size), rms_values, marker="o", color="tab:blue")
    ax.set_xlabel("time step")
    ax.set_ylabel("rms probability error")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
