"""Figure rendering for the report command.

Each function takes the same row dicts the CSV writers consume and saves a
PNG next to them. Matplotlib runs on the Agg backend so reports work
headless; figures aim for readable defaults, not publication styling.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

plt.rcParams.update(
    {
        "figure.figsize": (6.0, 6.0 * _GOLDEN),
        "figure.dpi": 110,
        "savefig.dpi": 150,
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "legend.fontsize": 8,
    }
)


def save_raf_figure(curves: dict, path) -> None:
    """Read amplification vs alignment, one line per graph, log2 x-axis."""
    fig, ax = plt.subplots()
    for label, rows in curves.items():
        xs = [r["alignment_bytes"] for r in rows]
        ys = [r["raf"] for r in rows]
        ax.plot(xs, ys, marker="o", label=label)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("alignment size (bytes)")
    ax.set_ylabel("read amplification D/E")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_runtime_curve_figure(rows: list, path) -> None:
    """Fetched bytes, throughput, and runtime vs transfer size, stacked."""
    xs = [r["d_bytes"] for r in rows]
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(6.0, 7.2))
    axes[0].plot(xs, [r["total_bytes_D"] / 1e9 for r in rows], marker="o", color="tab:blue")
    axes[0].set_ylabel("data read D (GB)")
    axes[1].plot(xs, [r["throughput_Bps"] / 1e6 for r in rows], marker="o", color="tab:green")
    axes[1].set_ylabel("throughput T (MB/s)")
    axes[2].plot(xs, [r["runtime_s"] for r in rows], marker="o", color="tab:red")
    axes[2].set_ylabel("runtime t (s)")
    axes[2].set_xlabel("transfer size d (bytes)")
    best = min(rows, key=lambda r: r["runtime_s"])
    axes[2].axvline(best["d_bytes"], linestyle="--", color="gray", alpha=0.7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_latency_sweep_figure(rows: list, path) -> None:
    """Throughput bars and implied outstanding requests vs added latency."""
    xs = [r["delta_latency_ns"] / 1000 for r in rows]
    fig, ax = plt.subplots()
    width = 0.6 * (min(b - a for a, b in zip(xs, xs[1:])) if len(xs) > 1 else 1.0)
    ax.bar(xs, [r["throughput_Bps"] / 1e6 for r in rows], width=width, color="tab:blue", alpha=0.7)
    ax.set_xlabel("added latency (us)")
    ax.set_ylabel("throughput (MB/s)", color="tab:blue")
    ax2 = ax.twinx()
    ax2.plot(xs, [r["eq3_outstanding"] for r in rows], marker="o", color="tab:red")
    ax2.set_ylabel("outstanding reads (T*L/d)", color="tab:red")
    ax2.grid(False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_latency_knee_figure(rows: list, path) -> None:
    """Normalized runtime vs observed latency: model line, simulation markers."""
    fig, ax = plt.subplots()
    for source, style in (("predicted", "-"), ("simulated", "o")):
        sel = [r for r in rows if r["source"] == source]
        if not sel:
            continue
        xs = [r["gpu_latency_ns"] / 1000 for r in sel]
        ys = [r["normalized_runtime"] for r in sel]
        if style == "-":
            ax.plot(xs, ys, style, label=source)
        else:
            ax.plot(xs, ys, style, linestyle="none", label=source)
    ax.axhline(1.0, color="gray", linestyle=":", alpha=0.7)
    ax.set_xlabel("memory latency seen by the consumer (us)")
    ax.set_ylabel("runtime normalized to host-memory baseline")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
