"""Figure output for the benchmark harness.

Two render paths serve different needs:

* ``cost_curve_svg`` builds a log-scale cost chart as plain SVG text with
  fixed-precision coordinates, so identical inputs give identical bytes
  (useful for regression-diffing run artifacts).
* ``save_cost_png`` / ``save_histogram_png`` render matplotlib figures
  next to the CSV output for human consumption.
"""

import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")

LOG_FLOOR = 1e-16

_WIDTH, _HEIGHT = 640.0, 440.0
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70.0, 20.0, 20.0, 45.0


def _clamped_log10(values) -> np.ndarray:
    return np.log10(np.maximum(np.asarray(values, dtype=float), LOG_FLOOR))


def cost_curve_svg(histories: dict[str, list]) -> str | None:
    """Deterministic SVG text of log-scale cost curves, one polyline per
    series; None (with a warning) when there is nothing to draw."""
    series = {name: list(h) for name, h in histories.items() if len(h) > 0}
    if not series:
        warnings.warn("no cost histories to plot; skipping SVG output")
        return None
    logs = {name: _clamped_log10(h) for name, h in series.items()}
    lo = float(np.floor(min(l.min() for l in logs.values())))
    hi = float(np.ceil(max(l.max() for l in logs.values())))
    if hi <= lo:
        hi = lo + 1.0
    n_max = max(len(h) for h in series.values())
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def x_at(i: int) -> float:
        if n_max == 1:
            return _MARGIN_L
        return _MARGIN_L + plot_w * i / (n_max - 1)

    def y_at(logv: float) -> float:
        return _MARGIN_T + plot_h * (hi - logv) / (hi - lo)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:.0f}" '
        f'height="{_HEIGHT:.0f}" viewBox="0 0 {_WIDTH:.0f} {_HEIGHT:.0f}">',
        f'<rect width="{_WIDTH:.0f}" height="{_HEIGHT:.0f}" fill="white"/>',
        f'<line x1="{_MARGIN_L:.2f}" y1="{_MARGIN_T:.2f}" x2="{_MARGIN_L:.2f}" '
        f'y2="{_HEIGHT - _MARGIN_B:.2f}" stroke="black" stroke-width="1"/>',
        f'<line x1="{_MARGIN_L:.2f}" y1="{_HEIGHT - _MARGIN_B:.2f}" '
        f'x2="{_WIDTH - _MARGIN_R:.2f}" y2="{_HEIGHT - _MARGIN_B:.2f}" '
        f'stroke="black" stroke-width="1"/>',
    ]
    decades = int(hi - lo)
    step = max(1, decades // 10)
    for p in range(int(lo), int(hi) + 1, step):
        y = y_at(float(p))
        parts.append(f'<line x1="{_MARGIN_L - 4:.2f}" y1="{y:.2f}" '
                     f'x2="{_MARGIN_L:.2f}" y2="{y:.2f}" stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{_MARGIN_L - 8:.2f}" y="{y + 4:.2f}" '
                     f'font-size="12" text-anchor="end">1e{p}</text>')
    for i in sorted({0, (n_max - 1) // 2, n_max - 1}):
        x = x_at(i)
        parts.append(f'<text x="{x:.2f}" y="{_HEIGHT - _MARGIN_B + 18:.2f}" '
                     f'font-size="12" text-anchor="middle">{i}</text>')
    parts.append(f'<text x="{(_MARGIN_L + _WIDTH - _MARGIN_R) / 2:.2f}" '
                 f'y="{_HEIGHT - 8:.2f}" font-size="13" text-anchor="middle">iteration</text>')
    for idx, (name, logv) in enumerate(sorted(logs.items())):
        color = PALETTE[idx % len(PALETTE)]
        points = " ".join(f"{x_at(i):.2f},{y_at(v):.2f}" for i, v in enumerate(logv))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                     f'points="{points}"/>')
        parts.append(f'<text x="{_WIDTH - _MARGIN_R - 6:.2f}" '
                     f'y="{_MARGIN_T + 16 + 16 * idx:.2f}" font-size="13" '
                     f'text-anchor="end" fill="{color}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_cost_curve_svg(histories: dict[str, list], path) -> bool:
    text = cost_curve_svg(histories)
    if text is None:
        return False
    with open(path, "w") as handle:
        handle.write(text)
    return True


def save_cost_png(histories: dict[str, list], path, title: str = "",
                  ylabel: str = "cost") -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for idx, (name, history) in enumerate(sorted(histories.items())):
        ax.semilogy(np.maximum(np.asarray(history, dtype=float), LOG_FLOOR),
                    label=name, color=PALETTE[idx % len(PALETTE)])
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_histogram_png(samples: dict[str, np.ndarray], path,
                       xlabel: str = "state fidelity", bins: int = 50) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    for idx, (name, values) in enumerate(sorted(samples.items())):
        ax.hist(np.asarray(values, dtype=float), bins=bins, alpha=0.6,
                label=name, color=PALETTE[idx % len(PALETTE)])
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
