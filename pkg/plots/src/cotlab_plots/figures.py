"""Render figures from cotlab CSV reports.

This layer consumes only the CSV contract of the computation package:
the report schema (name, empirical, target, abs_gap, rel_gap, n, q,
runtime_ms), the sample schema (series, value), and the ratio-sweep
schema (q, max_ratio, mean_ratio, p95_ratio, trials).  It never
recomputes number-theoretic quantities; it re-derives only summary
statistics (KS distances, means) as cross-layer consistency checks.

All output is deterministic: fixed style, fixed dpi, pinned image
metadata, seeded nothing.  Rendering the same CSV twice yields
byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

matplotlib.rcParams["svg.hashsalt"] = "cotlab-plots"

REPORT_COLUMNS = ["name", "empirical", "target", "abs_gap", "rel_gap", "n", "q", "runtime_ms"]
SAMPLE_COLUMNS = ["series", "value"]
RATIO_COLUMNS = ["q", "max_ratio", "mean_ratio", "p95_ratio", "trials"]

FIGURE_KINDS = ("hist-overlay", "cdf-overlay", "ladder", "ratio-scatter")

_PNG_METADATA = {"Software": "cotlab-plots"}
_SVG_METADATA = {"Date": None, "Creator": "cotlab-plots"}


class SchemaMismatchError(ValueError):
    """Input CSV columns do not match the expected fixed schema."""

    def __init__(self, path: str, missing: list[str]):
        self.missing = missing
        super().__init__(f"{path}: missing column(s) {', '.join(missing)}")


class EmptyDataError(ValueError):
    """Input parses but contains no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure: kind, input CSV path(s), output image path, labels."""

    kind: str
    inputs: tuple[str, ...]
    output: str
    title: str = ""
    series: str = ""  # sample-series / record-name selector where relevant
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("at least one input CSV required")


def read_csv(path: str, expected_columns: list[str]) -> list[dict]:
    """Parse a cotlab CSV, skipping '#' config-echo lines, schema-checked."""
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    header = reader.fieldnames or []
    missing = [c for c in expected_columns if c not in header]
    if missing:
        raise SchemaMismatchError(path, missing)
    rows = list(reader)
    if not rows:
        raise EmptyDataError(f"{path}: no data rows")
    return rows


def load_samples(path: str) -> dict[str, np.ndarray]:
    rows = read_csv(path, SAMPLE_COLUMNS)
    series: dict[str, list[float]] = {}
    for row in rows:
        series.setdefault(row["series"], []).append(float(row["value"]))
    return {name: np.sort(np.asarray(vals)) for name, vals in series.items()}


def ks_statistic(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample sup-distance of empirical CDFs, evaluated at every jump."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def _save(fig, output: str) -> None:
    ext = os.path.splitext(output)[1].lower()
    if ext == ".svg":
        fig.savefig(output, metadata=_SVG_METADATA)
    elif ext == ".png":
        fig.savefig(output, metadata=_PNG_METADATA)
    else:
        raise ValueError(f"unsupported image format {ext!r} (use .png or .svg)")
    plt.close(fig)


def _new_axes(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=100)
    if spec.title:
        ax.set_title(spec.title)
    if spec.xlabel:
        ax.set_xlabel(spec.xlabel)
    if spec.ylabel:
        ax.set_ylabel(spec.ylabel)
    return fig, ax


def _marginal_and_reference(spec: FigureSpec) -> tuple[np.ndarray, np.ndarray, str]:
    samples = load_samples(spec.inputs[0])
    if "g_samples" not in samples:
        raise EmptyDataError(f"{spec.inputs[0]}: no g_samples series")
    marg_names = [s for s in samples if s != "g_samples"]
    if not marg_names:
        raise EmptyDataError(f"{spec.inputs[0]}: no marginal series")
    name = spec.series or marg_names[0]
    if name not in samples:
        raise EmptyDataError(f"{spec.inputs[0]}: no series {name!r}")
    return samples[name], samples["g_samples"], name


def render_hist_overlay(spec: FigureSpec) -> None:
    marginal, reference, name = _marginal_and_reference(spec)
    fig, ax = _new_axes(spec)
    lo = min(marginal.min(), reference.min())
    hi = max(marginal.max(), reference.max())
    bins = np.linspace(lo, hi, 41)
    ax.hist(marginal, bins=bins, density=True, alpha=0.55, label=name, color="#33658a")
    centers = (bins[:-1] + bins[1:]) / 2
    ref_density, _ = np.histogram(reference, bins=bins, density=True)
    ax.plot(centers, ref_density, color="#e4572e", lw=1.6, label="sawtooth-series sample")
    ax.legend(frameon=False)
    _save(fig, spec.output)


def render_cdf_overlay(spec: FigureSpec) -> float:
    """CDF overlay with the KS distance recomputed here and, when a report
    CSV is supplied as a second input, cross-checked against its KS row."""
    marginal, reference, name = _marginal_and_reference(spec)
    ks = ks_statistic(marginal, reference)
    if len(spec.inputs) > 1:
        report = read_csv(spec.inputs[1], REPORT_COLUMNS)
        suffix = name.rsplit("=", 1)[-1] if "=" in name else "1"
        want = f"marginal_ks_l={suffix}"
        ks_rows = [row for row in report if row["name"] == want]
        if not ks_rows:
            raise EmptyDataError(f"{spec.inputs[1]}: no record {want!r}")
        reported = float(ks_rows[0]["empirical"])
        if abs(reported - ks) > 1e-12:
            raise ValueError(
                f"KS mismatch: report says {reported!r}, recomputed {ks!r}"
            )
    fig, ax = _new_axes(spec)
    for arr, label, color in (
        (marginal, name, "#33658a"),
        (reference, "sawtooth-series sample", "#e4572e"),
    ):
        ax.step(arr, np.arange(1, arr.size + 1) / arr.size, where="post", label=label, color=color, lw=1.4)
    ax.annotate(f"KS = {ks:.6f}", xy=(0.04, 0.92), xycoords="axes fraction")
    ax.set_ylim(0, 1.02)
    ax.legend(frameon=False, loc="lower right")
    _save(fig, spec.output)
    return ks


def render_ladder(spec: FigureSpec) -> None:
    rows = read_csv(spec.inputs[0], REPORT_COLUMNS)
    if spec.series:
        rows = [row for row in rows if row["name"] == spec.series]
    if not rows:
        raise EmptyDataError(f"{spec.inputs[0]}: no rows for series {spec.series!r}")
    rows.sort(key=lambda row: int(row["q"]))
    qs = np.array([int(row["q"]) for row in rows])
    emp = np.array([float(row["empirical"]) for row in rows])
    target = float(rows[-1]["target"])
    fig, ax = _new_axes(spec)
    ax.plot(qs, emp, "o-", color="#33658a", label="empirical")
    ax.axhline(target, color="#e4572e", ls="--", lw=1.2, label=f"target {target:.6f}")
    ax.set_xscale("log")
    if not spec.xlabel:
        ax.set_xlabel("q")
    ax.legend(frameon=False)
    _save(fig, spec.output)


def render_ratio_scatter(spec: FigureSpec) -> None:
    rows = read_csv(spec.inputs[0], RATIO_COLUMNS)
    qs = np.array([int(row["q"]) for row in rows])
    max_r = np.array([float(row["max_ratio"]) for row in rows])
    p95 = np.array([float(row["p95_ratio"]) for row in rows])
    fig, ax = _new_axes(spec)
    ax.scatter(qs, max_r, s=9, color="#33658a", label="max ratio")
    ax.scatter(qs, p95, s=9, color="#86bbd8", label="p95 ratio")
    ax.set_xscale("log")
    if not spec.xlabel:
        ax.set_xlabel("q")
    ax.legend(frameon=False)
    _save(fig, spec.output)


_RENDERERS = {
    "hist-overlay": render_hist_overlay,
    "cdf-overlay": render_cdf_overlay,
    "ladder": render_ladder,
    "ratio-scatter": render_ratio_scatter,
}


def render(spec: FigureSpec) -> str:
    """Render one figure; returns the output path."""
    _RENDERERS[spec.kind](spec)
    return spec.output


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        digest.update(fh.read())
    return digest.hexdigest()


def render_all(specs: list[FigureSpec], manifest_path: str | None = None) -> dict:
    """Render a batch and write a manifest of outputs with content hashes."""
    entries = []
    for spec in specs:
        render(spec)
        entries.append(
            {
                "kind": spec.kind,
                "inputs": list(spec.inputs),
                "output": spec.output,
                "sha256": _sha256(spec.output),
            }
        )
    manifest = {"figures": entries}
    if manifest_path:
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return manifest
