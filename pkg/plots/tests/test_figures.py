import json
import os
import shutil

import numpy as np
import pytest

from cotlab_plots.cli import main
from cotlab_plots.figures import (
    EmptyDataError,
    FigureSpec,
    SchemaMismatchError,
    ks_statistic,
    load_samples,
    read_csv,
    render,
    render_all,
    REPORT_COLUMNS,
)

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fixture(name: str) -> str:
    return os.path.join(FIXTURES, name)


def test_read_csv_skips_config_echo():
    rows = read_csv(fixture("theorem_report.csv"), REPORT_COLUMNS)
    assert any(row["name"] == "marginal_ks_l=1" for row in rows)


def test_schema_mismatch_lists_missing_columns(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("name,value\nx,1\n")
    with pytest.raises(SchemaMismatchError) as exc:
        read_csv(str(bad), REPORT_COLUMNS)
    assert "empirical" in str(exc.value)
    assert "target" in exc.value.missing


def test_empty_rows_rejected(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(REPORT_COLUMNS) + "\n")
    with pytest.raises(EmptyDataError):
        read_csv(str(empty), REPORT_COLUMNS)


def test_ks_statistic_basics():
    assert ks_statistic(np.array([0.0, 1.0]), np.array([0.0, 0.0, 1.0, 1.0])) == 0.0
    assert ks_statistic(np.array([0.0, 0.1]), np.array([5.0, 6.0])) == 1.0


def test_cdf_overlay_ks_matches_report_column(tmp_path):
    out = tmp_path / "cdf.png"
    spec = FigureSpec(
        kind="cdf-overlay",
        inputs=(fixture("theorem_samples.csv"), fixture("theorem_report.csv")),
        output=str(out),
        title="marginal vs sawtooth sample",
    )
    from cotlab_plots.figures import render_cdf_overlay

    ks = render_cdf_overlay(spec)
    rows = read_csv(fixture("theorem_report.csv"), REPORT_COLUMNS)
    reported = float(next(r["empirical"] for r in rows if r["name"] == "marginal_ks_l=1"))
    assert abs(ks - reported) <= 1e-12
    assert out.exists() and out.stat().st_size > 0


def test_cdf_overlay_detects_tampered_report(tmp_path):
    # corrupting the KS row must make the cross-check fail
    rows = open(fixture("theorem_report.csv"), encoding="utf-8").read().splitlines()
    tampered = [
        row.replace(row.split(",")[1], "0.5", 1) if row.startswith("marginal_ks_l=1") else row
        for row in rows
    ]
    bad = tmp_path / "tampered.csv"
    bad.write_text("\n".join(tampered) + "\n")
    spec = FigureSpec(
        kind="cdf-overlay",
        inputs=(fixture("theorem_samples.csv"), str(bad)),
        output=str(tmp_path / "x.png"),
    )
    with pytest.raises(ValueError, match="KS mismatch"):
        render(spec)


@pytest.mark.parametrize(
    "kind,inputs,ext",
    [
        ("hist-overlay", ("theorem_samples.csv",), "png"),
        ("hist-overlay", ("theorem_samples.csv",), "svg"),
        ("cdf-overlay", ("theorem_samples.csv", "theorem_report.csv"), "png"),
        ("ladder", ("ladder_report.csv",), "png"),
        ("ladder", ("ladder_report.csv",), "svg"),
        ("ratio-scatter", ("ratio_sweep.csv",), "png"),
    ],
)
def test_byte_identical_re_render(tmp_path, kind, inputs, ext):
    series = "c0-moments_k=2" if kind == "ladder" else ""
    out_a = tmp_path / f"a.{ext}"
    out_b = tmp_path / f"b.{ext}"
    for out in (out_a, out_b):
        render(
            FigureSpec(
                kind=kind,
                inputs=tuple(fixture(name) for name in inputs),
                output=str(out),
                title="fixture",
                series=series,
            )
        )
    assert out_a.read_bytes() == out_b.read_bytes()


def test_ladder_requires_matching_series(tmp_path):
    spec = FigureSpec(
        kind="ladder",
        inputs=(fixture("ladder_report.csv"),),
        output=str(tmp_path / "l.png"),
        series="nonexistent",
    )
    with pytest.raises(EmptyDataError):
        render(spec)


def test_render_all_manifest(tmp_path):
    specs = [
        FigureSpec(
            kind="hist-overlay",
            inputs=(fixture("theorem_samples.csv"),),
            output=str(tmp_path / "hist.png"),
        ),
        FigureSpec(
            kind="ratio-scatter",
            inputs=(fixture("ratio_sweep.csv"),),
            output=str(tmp_path / "ratio.svg"),
        ),
    ]
    manifest = render_all(specs, manifest_path=str(tmp_path / "manifest.json"))
    assert len(manifest["figures"]) == 2
    data = json.loads((tmp_path / "manifest.json").read_text())
    for entry in data["figures"]:
        assert os.path.exists(entry["output"])
        assert len(entry["sha256"]) == 64


def test_cli_render(tmp_path):
    out = tmp_path / "hist.png"
    code = main(
        [
            "render",
            "--kind", "hist-overlay",
            "--input", fixture("theorem_samples.csv"),
            "--output", str(out),
            "--title", "scaled cotangent values",
        ]
    )
    assert code == 0
    assert out.exists()


def test_cli_schema_error_exit_1(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    code = main(
        ["render", "--kind", "ladder", "--input", str(bad), "--output", str(tmp_path / "x.png")]
    )
    assert code == 1


def test_cli_batch_manifest(tmp_path):
    spec_file = tmp_path / "figs.json"
    spec_file.write_text(
        json.dumps(
            [
                {
                    "kind": "cdf-overlay",
                    "inputs": [fixture("theorem_samples.csv"), fixture("theorem_report.csv")],
                    "output": str(tmp_path / "cdf.svg"),
                    "title": "CDF overlay",
                }
            ]
        )
    )
    code = main(["batch", "--spec", str(spec_file), "--manifest", str(tmp_path / "m.json")])
    assert code == 0
    manifest = json.loads((tmp_path / "m.json").read_text())
    assert manifest["figures"][0]["kind"] == "cdf-overlay"


def test_samples_fixture_well_formed():
    samples = load_samples(fixture("theorem_samples.csv"))
    assert set(samples) == {"g_samples", "marginal_l=1"}
    for arr in samples.values():
        assert np.all(np.diff(arr) >= 0)
