"""Series report rendering: figures plus the delimited table, written to disk.

The report directory ends up with `series.csv` (machine-readable) and two
PNG figures (human-readable): the calibration line over the sample points
and a bar chart of leave-one-out prediction errors.
"""

from __future__ import annotations

from pathlib import Path

from .export import write_series_csv


def render_series_report(report, out_dir) -> list:
    """Write series.csv and the report figures; returns the written paths."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = out / "series.csv"
    csv_path.write_text(write_series_csv(report), encoding="utf-8")
    written.append(csv_path)

    concentrations = [row.concentration for row in report.rows]
    fit = report.fit

    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=150)
    fig_x = [0.0, max(concentrations)]
    ax.plot(fig_x, [fit.absorbance_for(x) for x in fig_x], "-",
            color="#cc2222", label=f"{fit.mode} fit")
    ax.plot(concentrations, [row.absorbance for row in report.rows], "o",
            color="#2222cc", label="samples")
    ax.set_xlabel("concentration")
    ax.set_ylabel("absorbance")
    ax.set_title(f"calibration line, r^2 = {fit.r_squared:.6g}")
    ax.legend()
    fig.tight_layout()
    line_path = out / "calibration_line.png"
    fig.savefig(line_path)
    plt.close(fig)
    written.append(line_path)

    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=150)
    errors = [row.relative_error * 100.0 for row in report.rows]
    ax.bar(range(len(errors)), errors, color="#448844")
    ax.set_xticks(range(len(errors)))
    ax.set_xticklabels([f"{c:g}" for c in concentrations])
    ax.set_xlabel("concentration")
    ax.set_ylabel("leave-one-out error / %")
    ax.set_title(f"prediction errors at {report.analysis_wavelength_nm:.1f} nm")
    fig.tight_layout()
    err_path = out / "prediction_errors.png"
    fig.savefig(err_path)
    plt.close(fig)
    written.append(err_path)

    return written
