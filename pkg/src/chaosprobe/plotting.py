"""Log-log SVG plots of G(t) curves (matplotlib, Agg backend)."""
from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

log = logging.getLogger(__name__)


def render_plot(curves, path, title: str | None = None) -> Path:
    """Write a log-log plot of labeled ``(label, t, G)`` series to an SVG file.

    Points with t <= 0 or G <= 0 cannot sit on log axes and are dropped
    (logged).  Output is deterministic: fixed SVG id salt, no date stamp.
    """
    curves = list(curves)
    if not curves:
        raise ValueError("no series to plot")
    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "chaosprobe", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.4))
        try:
            for label, t, g in curves:
                t = np.asarray(t, dtype=float)
                g = np.asarray(g, dtype=float)
                if t.shape != g.shape or t.size == 0:
                    raise ValueError(f"series {label!r} is empty or has mismatched lengths")
                keep = (t > 0) & (g > 0)
                if not keep.all():
                    log.info("series %r: dropped %d non-positive points for log axes", label, int((~keep).sum()))
                if not keep.any():
                    raise ValueError(f"series {label!r} has no positive points")
                ax.loglog(t[keep], g[keep], label=str(label), lw=1.2)
            ax.set_xlabel("t")
            ax.set_ylabel(r"$\langle G(t)\rangle$")
            if title:
                ax.set_title(title)
            ax.legend(frameon=False, fontsize="small")
            fig.tight_layout()
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return path
