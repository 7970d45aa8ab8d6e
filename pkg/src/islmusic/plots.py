"""Figure rendering for spectra, sweeps, and timing studies.

Every report path can drop a PNG next to its delimited output; rendering is
headless (Agg) and safe on machines without a display.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .music import DetectionResult, Pseudospectrum
from .scenarios import ComputeTimeSummary, SweepResult, format_swept_value


def save_spectrum_plot(spectrum: Pseudospectrum, path,
                       detection: DetectionResult | None = None) -> None:
    """Pseudospectrum in dB over azimuth, with detections and truth marked."""
    angles = spectrum.grid.angles()
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.plot(angles, spectrum.values_db, lw=1.2, color="tab:blue", label="PMUSIC")
    if detection is not None:
        if detection.truth_azimuths_deg:
            for i, az in enumerate(detection.truth_azimuths_deg):
                ax.axvline(az, color="tab:green", alpha=0.35, lw=0.8,
                           label="truth" if i == 0 else None)
        if detection.detected_azimuths_deg:
            ax.plot(detection.detected_azimuths_deg, detection.peak_db, "v",
                    color="tab:red", ms=6, label="detected")
    ax.set_xlabel("azimuth [deg]")
    ax.set_ylabel("PMUSIC [dB]")
    ax.set_title("MUSIC pseudospectrum")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_plot(sweep: SweepResult, path) -> None:
    """Accuracy and mean peak level against the swept parameter."""
    labels = [format_swept_value(pt.value) for pt in sweep.points]
    x = np.arange(len(labels))
    accuracy = [pt.mean_accuracy for pt in sweep.points]
    peak_db = [pt.mean_peak_db for pt in sweep.points]

    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    ax.plot(x, accuracy, "o-", color="tab:blue", label="mean accuracy")
    ax.set_ylim(-0.02, 1.05)
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30 if len(labels) > 8 else 0)
    ax.set_xlabel(sweep.swept_axis)
    ax.set_ylabel("mean accuracy")
    ax.grid(True, alpha=0.3)

    ax2 = ax.twinx()
    ax2.plot(x, peak_db, "s--", color="tab:orange", label="mean peak [dB]")
    ax2.set_ylabel("mean peak PMUSIC [dB]")

    lines = ax.get_lines() + ax2.get_lines()
    ax.legend(lines, [ln.get_label() for ln in lines], loc="best")
    ax.set_title(f"sweep: {sweep.scenario}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_timing_plot(sweeps: dict, summary: ComputeTimeSummary, path) -> None:
    """Mean pipeline time per swept point for each axis, with the deadline."""
    fig, ax = plt.subplots(figsize=(8.0, 4.5))
    for axis, sweep in sweeps.items():
        labels = [format_swept_value(pt.value) for pt in sweep.points]
        means = [pt.mean_time_s for pt in sweep.points]
        ax.plot(range(len(means)), means, "o-",
                label=f"{axis} ({', '.join(labels)})")
    ax.axhline(summary.verdict.deadline_s, color="tab:red", ls="--",
               label=f"orbit deadline {summary.verdict.deadline_s:.2f} s")
    ax.set_yscale("log")
    ax.set_xlabel("sweep point index")
    ax.set_ylabel("mean pipeline time [s]")
    ax.set_title("computation time vs orbit interval")
    ax.grid(True, alpha=0.3, which="both")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
