"""Stand-alone matplotlib scripts that render the CSV outputs.

The package itself never imports matplotlib; the emitted scripts do, so
plotting stays optional and the CSV remains the artifact of record.
"""

from __future__ import annotations

from pathlib import Path

_HEADER = '''#!/usr/bin/env python3
"""Render {csv_name}. Generated by qrws; requires matplotlib."""
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent
SRC = HERE / {csv_name!r}
OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else SRC.with_suffix(".png")


def columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {{k: np.array([float(r[k]) if r[k] != "" else np.nan for r in rows]) for k in rows[0]}}


cols = columns(SRC)
fig, ax = plt.subplots(figsize=(6, 4.5))
'''

_FOOTER = '''ax.set_title({title!r})
fig.tight_layout()
fig.savefig(OUT, dpi=150)
print(OUT)
'''

_HEATMAP = '''x, y, c = cols[{x!r}], cols[{y!r}], cols[{c!r}]
xs, ys = np.unique(x), np.unique(y)
if len(xs) * len(ys) == len(c):
    grid = np.full((len(ys), len(xs)), np.nan)
    grid[np.searchsorted(ys, y), np.searchsorted(xs, x)] = c
    im = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap="jet")
else:
    im = ax.scatter(x, y, c=c, s=2, cmap="jet")
fig.colorbar(im, ax=ax, label={c!r})
ax.set_xlabel({x!r})
ax.set_ylabel({y!r})
'''

_LINES = '''for name in {ys!r}:
    ax.plot(cols[{x!r}], cols[name], label=name)
ax.set_xlabel({x!r})
if len({ys!r}) > 1:
    ax.legend()
{extra}
'''


def _write(csv_path, body: str, title: str) -> Path:
    csv_path = Path(csv_path)
    script = csv_path.with_suffix(".plot.py")
    text = _HEADER.format(csv_name=csv_path.name) + body + _FOOTER.format(title=title)
    script.write_text(text, encoding="utf-8")
    return script


def heatmap_script(csv_path, x: str, y: str, c: str, title: str) -> Path:
    """Script drawing ``c`` over the ``(x, y)`` plane (regular grid or scatter)."""
    return _write(csv_path, _HEATMAP.format(x=x, y=y, c=c), title)


def line_script(csv_path, x: str, ys: list[str], title: str, log_y: bool = False) -> Path:
    """Script drawing each column of ``ys`` against ``x``."""
    extra = 'ax.set_yscale("log")' if log_y else ""
    return _write(csv_path, _LINES.format(x=x, ys=list(ys), extra=extra), title)
