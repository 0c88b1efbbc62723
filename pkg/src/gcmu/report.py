"""Runtime plots for benchmark sweeps."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402

from gcmu.bench import BenchRecord, parse_params  # noqa: E402

_MARKERS = {"Sat": "o", "Unsat": "s", "timeout": "x"}


def plot_runtime(records: list[BenchRecord], path: str, param: str = "n",
                 title: str | None = None) -> str:
    """Log-scale runtime against ``param``, one line per family and config.

    Timeouts are drawn at their measured wall time with an ``x`` marker.
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    groups: dict[tuple[str, str], list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.family, r.config), []).append(r)
    for (family, config), rs in groups.items():
        pts = sorted((parse_params(r.params).get(param, 0), max(r.time_ms, 0.01) / 1000.0, r.verdict)
                     for r in rs)
        label = family if len(groups) == 1 or len({c for _, c in groups}) == 1 else f"{family} [{config}]"
        line, = ax.plot([p[0] for p in pts], [p[1] for p in pts], "-", lw=1, label=label)
        for x, y, verdict in pts:
            ax.plot(x, y, _MARKERS.get(verdict, "."), color=line.get_color(), ms=5)
    ax.set_yscale("log")
    ax.xaxis.set_major_locator(MaxNLocator(integer=True))
    ax.set_xlabel(f"value of {param}")
    ax.set_ylabel("runtime (s)")
    if title:
        ax.set_title(title)
    if records:
        ax.legend(fontsize=8)
    ax.grid(True, which="both", lw=0.3, alpha=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
