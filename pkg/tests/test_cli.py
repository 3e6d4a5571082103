import numpy as np
import pytest

from photospec.image import decode_image, encode_png, RasterImage
from photospec.session import load_session
from photospec.absorption import lambda_max
from photospec.synth import DEFAULT_LAMP, LampModel, RenderConfig, render_blank

import kit
from kit import (
    BENCH_ANCHORS,
    BENCH_BAND,
    BENCH_COLS,
    BENCH_CONFIG,
    BENCH_ROW,
    cli_ok,
    parse_record,
    run_cli,
)


def write_png(path, pixels):
    path.write_bytes(encode_png(RasterImage(pixels=pixels)))
    return path


@pytest.fixture(scope="module")
def pipeline(bench_images, tmp_path_factory):
    """One full scripted run; artifacts shared read-only by the tests."""
    image_dir = bench_images["blank"].parent
    work = tmp_path_factory.mktemp("cli-pipeline")
    artifacts = kit.run_cli_pipeline(image_dir, work)
    return image_dir, work, artifacts


class TestExtract:
    def test_uniform_white_gives_all_ones(self, tmp_path):
        image = write_png(tmp_path / "white.png",
                          np.full((8, 12, 3), 255, dtype=np.uint8))
        out = cli_ok("extract", "--image", image, "--row", 4, "--band", 2,
                     "--cols", "0:11", "--session", tmp_path / "s.specsession")
        lines = out.splitlines()
        assert lines[0] == "pixel,r,g,b,combined"
        assert len(lines) == 13
        for line in lines[1:]:
            assert [float(v) for v in line.split(",")[1:]] == [1.0] * 4

    def test_smooth_one_equals_no_flag(self, tmp_path, bench_images):
        common = ("--image", bench_images["blank"], "--row", BENCH_ROW,
                  "--band", BENCH_BAND, "--cols", BENCH_COLS)
        plain = cli_ok("extract", *common, "--session", tmp_path / "a.specsession")
        smoothed = cli_ok("extract", *common, "--smooth", 1,
                          "--session", tmp_path / "b.specsession")
        assert plain == smoothed

    def test_extraction_matches_forward_model_within_quantization(
            self, tmp_path, bench_images):
        out = cli_ok("extract", "--image", bench_images["blank"],
                     "--row", BENCH_ROW, "--band", BENCH_BAND,
                     "--cols", BENCH_COLS,
                     "--session", tmp_path / "s.specsession")
        combined = np.array([float(line.split(",")[4])
                             for line in out.splitlines()[1:]])
        expected = DEFAULT_LAMP.intensity(
            BENCH_CONFIG.wavelength_of_column(np.arange(BENCH_CONFIG.width)))
        assert np.max(np.abs(combined - expected)) <= 1.0 / 255.0

    def test_rerun_leaves_session_bytes_identical(self, tmp_path, bench_images):
        session = tmp_path / "s.specsession"
        argv = ("extract", "--image", bench_images["blank"], "--row", BENCH_ROW,
                "--band", BENCH_BAND, "--cols", BENCH_COLS,
                "--session", session)
        cli_ok(*argv)
        first = session.read_bytes()
        cli_ok(*argv)
        assert session.read_bytes() == first

    def test_out_of_bounds_geometry_exits_2(self, tmp_path, bench_images):
        code, _, err = run_cli("extract", "--image", bench_images["blank"],
                               "--row", 999, "--band", 0, "--cols", BENCH_COLS,
                               "--session", tmp_path / "s.specsession")
        assert code == 2
        assert "geometry-out-of-bounds" in err

    def test_unreadable_image_exits_3(self, tmp_path):
        code, _, err = run_cli("extract", "--image", tmp_path / "missing.png",
                               "--row", 0, "--band", 0, "--cols", "0:5",
                               "--session", tmp_path / "s.specsession")
        assert code == 3

    def test_corrupt_image_exits_2(self, tmp_path):
        bad = tmp_path / "bad.png"
        bad.write_bytes(b"not a png at all")
        code, _, err = run_cli("extract", "--image", bad, "--row", 0,
                               "--band", 0, "--cols", "0:5",
                               "--session", tmp_path / "s.specsession")
        assert code == 2
        assert "malformed-image" in err

    def test_auto_orient_recovers_rotated_bench(self, tmp_path, bench_images):
        upright = decode_image(bench_images["blank"].read_bytes())
        sideways = np.rot90(upright.pixels, 1)
        image = write_png(tmp_path / "sideways.png", sideways)
        plain = cli_ok("extract", "--image", bench_images["blank"],
                       "--row", BENCH_ROW, "--band", BENCH_BAND,
                       "--cols", BENCH_COLS,
                       "--session", tmp_path / "a.specsession")
        oriented = cli_ok("extract", "--image", image, "--auto-orient",
                          "--row", BENCH_ROW, "--band", BENCH_BAND,
                          "--cols", BENCH_COLS,
                          "--session", tmp_path / "b.specsession")
        # the axis is realigned; the two quarter-turn candidates tie, so the
        # recovered profile is the original or its mirror image
        plain_values = [line.split(",")[4] for line in plain.splitlines()[1:]]
        got = [line.split(",")[4] for line in oriented.splitlines()[1:]]
        assert got == plain_values or got == plain_values[::-1]


class TestCalibrate:
    def test_two_anchor_record(self, tmp_path):
        out = cli_ok("calibrate", "--anchor", "100:400", "--anchor", "500:700",
                     "--session", tmp_path / "s.specsession")
        record = parse_record(out)
        assert float(record["slope_nm_per_px"]) == 0.75
        assert float(record["intercept_nm"]) == 325.0
        assert float(record["p1"]) == 100.0
        assert float(record["lambda2"]) == 700.0

    def test_single_anchor_is_usage_error(self, tmp_path):
        code, _, err = run_cli("calibrate", "--anchor", "100:400",
                               "--session", tmp_path / "s.specsession")
        assert code == 1
        assert "two --anchor" in err

    def test_coincident_anchors_exit_2(self, tmp_path):
        code, _, err = run_cli("calibrate", "--anchor", "100:400",
                               "--anchor", "100:700",
                               "--session", tmp_path / "s.specsession")
        assert code == 2
        assert "coincident-anchors" in err

    def test_anchors_from_rendered_peaks_recover_mapping(self, tmp_path):
        # two sharp emission lines at known wavelengths; their detected
        # columns must calibrate the axis to within one column's nm width
        lamp = LampModel(peaks=((450.0, 15.0, 0.45), (650.0, 15.0, 0.45)),
                         baseline=0.05, lambda_lo=380.0, lambda_hi=740.0)
        cfg = BENCH_CONFIG
        image = write_png(tmp_path / "lines.png",
                          render_blank(lamp, cfg).pixels)
        out = cli_ok("extract", "--image", image, "--row", BENCH_ROW,
                     "--band", BENCH_BAND, "--cols", BENCH_COLS,
                     "--session", tmp_path / "s.specsession")
        combined = np.array([float(line.split(",")[4])
                             for line in out.splitlines()[1:]])
        mid = len(combined) // 2
        p_blue = int(np.argmax(combined[:mid]))
        p_red = mid + int(np.argmax(combined[mid:]))
        record = parse_record(cli_ok(
            "calibrate", "--anchor", f"{p_blue}:450", "--anchor", f"{p_red}:650",
            "--session", tmp_path / "s.specsession"))
        slope = float(record["slope_nm_per_px"])
        intercept = float(record["intercept_nm"])
        step = (cfg.lambda_max - cfg.lambda_min) / (cfg.width - 1)
        for p in range(0, cfg.width, 10):
            assert abs((slope * p + intercept) - cfg.wavelength_of_column(p)) <= step


class TestBlankAndMeasure:
    def test_blank_before_calibrate_exits_2(self, tmp_path, bench_images):
        session = tmp_path / "s.specsession"
        cli_ok("extract", "--image", bench_images["blank"], "--row", BENCH_ROW,
               "--band", BENCH_BAND, "--cols", BENCH_COLS, "--session", session)
        code, _, err = run_cli("blank", "--image", bench_images["blank"],
                               "--session", session)
        assert code == 2
        assert "no-calibration" in err

    def test_blank_before_extract_exits_2(self, tmp_path, bench_images):
        session = tmp_path / "s.specsession"
        cli_ok("calibrate", "--anchor", BENCH_ANCHORS[0],
               "--anchor", BENCH_ANCHORS[1], "--session", session)
        code, _, err = run_cli("blank", "--image", bench_images["blank"],
                               "--session", session)
        assert code == 2
        assert "no-geometry" in err

    def test_measure_before_blank_exits_2(self, tmp_path, bench_images):
        session = tmp_path / "s.specsession"
        cli_ok("extract", "--image", bench_images["blank"], "--row", BENCH_ROW,
               "--band", BENCH_BAND, "--cols", BENCH_COLS, "--session", session)
        cli_ok("calibrate", "--anchor", BENCH_ANCHORS[0],
               "--anchor", BENCH_ANCHORS[1], "--session", session)
        code, _, err = run_cli("measure", "--image", bench_images["1"],
                               "--session", session)
        assert code == 2
        assert "no-blank" in err

    def test_measurement_csv_flags_column(self, pipeline):
        _, _, artifacts = pipeline
        lines = artifacts["measurement_1.csv"].splitlines()
        assert lines[0] == "wavelength_nm,transmittance,absorbance,flag"
        assert all(line.rsplit(",", 1)[1] in ("ok", "floored", "saturated")
                   for line in lines[1:])

    def test_blank_csv_is_calibrated_spectrum(self, pipeline):
        _, _, artifacts = pipeline
        lines = artifacts["blank.csv"].splitlines()
        assert lines[0] == "wavelength_nm,r,g,b,combined"
        wavelengths = [float(line.split(",")[0]) for line in lines[1:]]
        assert wavelengths[0] == 380.0
        assert wavelengths[-1] == 740.0


class TestAddSample:
    def setup_session(self, tmp_path, bench_images, name="1"):
        session = tmp_path / "s.specsession"
        cli_ok("extract", "--image", bench_images["blank"], "--row", BENCH_ROW,
               "--band", BENCH_BAND, "--cols", BENCH_COLS,
               "--smooth", kit.BENCH_SMOOTH, "--session", session)
        cli_ok("calibrate", "--anchor", BENCH_ANCHORS[0],
               "--anchor", BENCH_ANCHORS[1], "--session", session)
        cli_ok("blank", "--image", bench_images["blank"],
               "--smooth", kit.BENCH_SMOOTH, "--session", session)
        cli_ok("measure", "--image", bench_images[name],
               "--smooth", kit.BENCH_SMOOTH, "--session", session)
        return session

    def test_auto_lambda_max_reads_peak(self, tmp_path, bench_images):
        session = self.setup_session(tmp_path, bench_images)
        record = parse_record(cli_ok("add-sample", "--concentration", "1.0",
                                     "--session", session))
        stored = load_session(session)
        expected_nm = lambda_max(stored.measurement)
        assert float(record["wavelength_nm"]) == expected_nm
        assert stored.samples[0].wavelength_nm == expected_nm
        assert float(record["index"]) == 0

    def test_explicit_wavelength(self, tmp_path, bench_images):
        session = self.setup_session(tmp_path, bench_images)
        record = parse_record(cli_ok("add-sample", "--concentration", "0.5",
                                     "--at", "560", "--label", "rep 1",
                                     "--session", session))
        assert float(record["wavelength_nm"]) == 560.0
        stored = load_session(session)
        assert stored.samples[0].label == "rep 1"
        assert stored.samples[0].image_id is not None

    def test_duplicate_concentrations_accepted(self, tmp_path, bench_images):
        session = self.setup_session(tmp_path, bench_images)
        cli_ok("add-sample", "--concentration", "0.5", "--at", "560",
               "--session", session)
        record = parse_record(cli_ok("add-sample", "--concentration", "0.5",
                                     "--at", "560", "--session", session))
        assert float(record["index"]) == 1
        assert len(load_session(session).samples) == 2

    def test_zero_concentration_exits_2(self, tmp_path, bench_images):
        session = self.setup_session(tmp_path, bench_images)
        code, _, err = run_cli("add-sample", "--concentration", "0",
                               "--at", "560", "--session", session)
        assert code == 2

    def test_without_measurement_exits_2(self, tmp_path):
        session = tmp_path / "s.specsession"
        cli_ok("calibrate", "--anchor", "0:400", "--anchor", "10:700",
               "--session", session)
        code, _, err = run_cli("add-sample", "--concentration", "1",
                               "--session", session)
        assert code == 2
        assert "no-measurement" in err

    def test_adding_sample_invalidates_stored_fit(self, tmp_path, bench_images):
        session = self.setup_session(tmp_path, bench_images)
        cli_ok("add-sample", "--concentration", "1.0", "--at", "560",
               "--session", session)
        cli_ok("add-sample", "--concentration", "0.5", "--at", "560",
               "--session", session)
        cli_ok("fit", "--session", session)
        assert load_session(session).fit is not None
        cli_ok("add-sample", "--concentration", "0.25", "--at", "560",
               "--session", session)
        assert load_session(session).fit is None


class TestFitAndPredict:
    def test_fit_record_on_pipeline(self, pipeline):
        _, work, artifacts = pipeline
        record = parse_record(artifacts["fit.txt"])
        assert record["mode"] == "with-intercept"
        assert record["n_samples"] == "5"
        assert float(record["analysis_wavelength_nm"]) == 560.0
        assert float(record["r_squared"]) > 0.999
        stored = load_session(work / "bench.specsession")
        assert stored.fit.slope == float(record["slope"])

    def test_predict_record_on_pipeline(self, pipeline):
        _, _, artifacts = pipeline
        record = parse_record(artifacts["predict.txt"])
        assert record["below_range"] == "false"
        assert float(record["absorbance"]) == 0.25
        assert float(record["concentration"]) > 0

    def test_fit_with_too_few_samples_exits_2(self, tmp_path):
        session = tmp_path / "s.specsession"
        cli_ok("calibrate", "--anchor", "0:400", "--anchor", "10:700",
               "--session", session)
        code, _, err = run_cli("fit", "--session", session)
        assert code == 2
        assert "too-few-samples" in err

    def test_predict_below_range_flagged(self, pipeline, tmp_path):
        _, work, _ = pipeline
        record = parse_record(cli_ok(
            "predict", "--absorbance", "-1.0",
            "--session", work / "bench.specsession"))
        assert record["below_range"] == "true"
        assert float(record["concentration"]) < 0

    def test_predict_without_session_exits_3(self, tmp_path):
        code, _, err = run_cli("predict", "--absorbance", "0.5",
                               "--session", tmp_path / "missing.specsession")
        assert code == 3

    def test_predict_without_fit_exits_2(self, tmp_path):
        session = tmp_path / "s.specsession"
        cli_ok("calibrate", "--anchor", "0:400", "--anchor", "10:700",
               "--session", session)
        code, _, err = run_cli("predict", "--absorbance", "0.5",
                               "--session", session)
        assert code == 2
        assert "no-fit" in err

    def test_predict_from_image_matches_direct_reading(
            self, pipeline, bench_images):
        _, work, _ = pipeline
        record = parse_record(cli_ok(
            "predict", "--image", bench_images["0.5"],
            "--smooth", kit.BENCH_SMOOTH,
            "--session", work / "bench.specsession"))
        # the measured 0.5 dilution must predict close to its true value
        assert float(record["concentration"]) == pytest.approx(0.5, rel=0.05)


class TestPlot:
    def test_same_session_twice_byte_identical(self, pipeline, tmp_path):
        _, work, _ = pipeline
        session = work / "bench.specsession"
        a = tmp_path / "a.svg"
        b = tmp_path / "b.svg"
        cli_ok("plot", "--what", "measurement", "--out", a, "--session", session)
        cli_ok("plot", "--what", "measurement", "--out", b, "--session", session)
        assert a.read_bytes() == b.read_bytes()

    def test_empty_samples_calibration_line_exits_2(self, tmp_path):
        session = tmp_path / "s.specsession"
        cli_ok("calibrate", "--anchor", "0:400", "--anchor", "10:700",
               "--session", session)
        code, _, err = run_cli("plot", "--what", "calibration-line",
                               "--out", tmp_path / "x.svg", "--session", session)
        assert code == 2
        assert "too-few-samples" in err

    def test_plot_without_spectrum_exits_2(self, tmp_path):
        session = tmp_path / "s.specsession"
        cli_ok("calibrate", "--anchor", "0:400", "--anchor", "10:700",
               "--session", session)
        code, _, err = run_cli("plot", "--what", "spectrum",
                               "--out", tmp_path / "x.svg", "--session", session)
        assert code == 2
        assert "no-spectrum" in err

    def test_spectrum_vertices_match_affine_transform(self, pipeline):
        _, work, artifacts = pipeline
        import re

        from photospec.svgplot import (
            MARGIN_LEFT, MARGIN_TOP, PLOT_HEIGHT, PLOT_WIDTH)
        svg = artifacts["spectrum.svg"]
        stored = load_session(work / "bench.specsession")
        from photospec.wavelength import apply_calibration
        spectrum = apply_calibration(stored.raw_spectrum, stored.wavelength_cal)
        all_values = np.concatenate(
            [spectrum.r, spectrum.g, spectrum.b, spectrum.combined])
        y_lo, y_hi = float(all_values.min()), float(all_values.max())
        w = spectrum.wavelengths
        points_attr = re.search(r'points="([^"]*)"', svg).group(1)
        points = [tuple(float(v) for v in pair.split(","))
                  for pair in points_attr.split()]
        for (px, py), wavelength, value in zip(points, w, spectrum.r):
            expect_x = MARGIN_LEFT + (wavelength - w[0]) * PLOT_WIDTH / (w[-1] - w[0])
            expect_y = MARGIN_TOP + (y_hi - value) * PLOT_HEIGHT / (y_hi - y_lo)
            assert px == pytest.approx(expect_x, abs=5e-6)
            assert py == pytest.approx(expect_y, abs=5e-6)


class TestSynthCommands:
    def test_render_blank_writes_decodable_png(self, tmp_path):
        out = tmp_path / "blank.png"
        cli_ok("synth", "render-blank", "--out", out, "--width", "120",
               "--height", "20", "--band-top", "6", "--band-bottom", "13")
        image = decode_image(out.read_bytes())
        assert image.width == 120 and image.height == 20

    def test_render_sample_darker_than_blank(self, tmp_path):
        blank_path = tmp_path / "blank.png"
        sample_path = tmp_path / "sample.png"
        args = ("--width", "120", "--height", "20", "--band-top", "6",
                "--band-bottom", "13")
        cli_ok("synth", "render-blank", "--out", blank_path, *args)
        cli_ok("synth", "render-sample", "--concentration", "1.0",
               "--out", sample_path, *args)
        blank = decode_image(blank_path.read_bytes())
        sample = decode_image(sample_path.read_bytes())
        assert sample.pixels.sum() < blank.pixels.sum()

    def test_paper_series_csv(self):
        out = cli_ok("synth", "paper-series")
        head, _, record_text = out.partition("\n\n")
        lines = head.splitlines()
        assert lines[0] == "concentration,predicted,relative_error"
        assert len(lines) == 6
        record = parse_record(record_text)
        assert record["mode"] == "through-origin"
        assert record["n_samples"] == "5"

    def test_report_dir_writes_figures(self, tmp_path):
        report_dir = tmp_path / "report"
        code, out, err = run_cli("synth", "paper-series",
                                 "--report-dir", report_dir)
        assert code == 0
        assert (report_dir / "series.csv").exists()
        assert (report_dir / "calibration_line.png").exists()
        assert (report_dir / "prediction_errors.png").exists()
        assert (report_dir / "series.csv").read_text(encoding="utf-8") == out

    def test_emit_images_writes_ladder(self, tmp_path):
        emit = tmp_path / "frames"
        cli_ok("synth", "paper-series", "--emit-images", emit)
        names = sorted(p.name for p in emit.iterdir())
        assert names == ["blank.png", "sample_0.0625.png", "sample_0.12.png",
                         "sample_0.25.png", "sample_0.5.png", "sample_1.png"]


class TestUsageContract:
    def test_unknown_subcommand_exits_1(self):
        code, _, _ = run_cli("frobnicate")
        assert code == 1

    def test_missing_required_flag_exits_1(self, tmp_path):
        code, _, _ = run_cli("extract", "--session", tmp_path / "s")
        assert code == 1

    def test_no_arguments_exits_1(self):
        code, _, _ = run_cli()
        assert code == 1

    def test_help_exits_0(self):
        code, out, _ = run_cli("--help")
        assert code == 0
        for name in ("extract", "calibrate", "blank", "measure", "add-sample",
                     "fit", "predict", "plot", "synth", "serve"):
            assert name in out
