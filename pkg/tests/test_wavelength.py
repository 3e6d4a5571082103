import math

import numpy as np
import pytest

from photospec.errors import CoincidentAnchors, GridOutOfRange
from photospec.spectrum import ExtractionGeometry, RawSpectrum
from photospec.wavelength import (
    CalibratedSpectrum,
    WavelengthCalibration,
    apply_calibration,
    make_wavelength_calibration,
    resample,
)

from kit import make_spectrum


def raw(values, col_start=0) -> RawSpectrum:
    v = np.asarray(values, dtype=np.float64)
    g = ExtractionGeometry(row=0, band_half_width=0, col_start=col_start,
                           col_end=col_start + len(v) - 1,
                           orientation="left-to-right")
    return RawSpectrum(r=v, g=v, b=v, combined=(v + v + v) / 3.0,
                       source_geometry=g)


class TestWavelengthCalibration:
    def test_integer_anchor_pair_maps_exactly(self):
        cal = make_wavelength_calibration((100.0, 400.0), (500.0, 700.0))
        assert cal.map(300.0) == 550.0
        assert cal.map(100.0) == 400.0
        assert cal.map(500.0) == 700.0
        assert cal.slope == 0.75
        assert cal.intercept == 325.0

    def test_fractional_anchors_from_bench_notes(self):
        cal = make_wavelength_calibration((120.5, 435.83), (410.25, 546.07))
        # midpoint query: exact value in real arithmetic is
        # 435.83 + (546.07 - 435.83) / 2 = 490.95
        assert cal.map(265.375) == pytest.approx(490.95, abs=1e-9)

    def test_anchors_reproduced_within_one_ulp(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            p1 = float(rng.uniform(-1e3, 1e3))
            p2 = p1 + float(rng.uniform(1e-3, 2e3)) * (1 if rng.random() < 0.5 else -1)
            l1 = float(rng.uniform(200, 900))
            l2 = float(rng.uniform(200, 900))
            cal = make_wavelength_calibration((p1, l1), (p2, l2))
            for p, lam in ((p1, l1), (p2, l2)):
                got = cal.map(p)
                assert got == lam or math.nextafter(got, lam) == lam

    def test_affine_consistency_against_slope_intercept(self):
        cal = make_wavelength_calibration((12.0, 420.5), (250.0, 683.25))
        rng = np.random.default_rng(3)
        for p in rng.uniform(-50, 300, 200):
            assert cal.map(p) == pytest.approx(
                cal.slope * p + cal.intercept, rel=1e-14)

    def test_coincident_anchor_pixels_rejected(self):
        with pytest.raises(CoincidentAnchors):
            make_wavelength_calibration((10.0, 400.0), (10.0, 500.0))

    def test_coincident_anchor_wavelengths_rejected(self):
        with pytest.raises(CoincidentAnchors):
            make_wavelength_calibration((10.0, 400.0), (90.0, 400.0))

    def test_vectorized_matches_scalar(self):
        cal = WavelengthCalibration(p1=20.0, lambda1=420.0, p2=160.0, lambda2=700.0)
        pixels = np.linspace(0, 180, 37)
        mapped = cal.map(pixels)
        for p, lam in zip(pixels, mapped):
            assert lam == cal.map(float(p))


class TestCalibratedSpectrum:
    def test_requires_strictly_increasing_wavelengths(self):
        w = np.array([400.0, 500.0, 500.0])
        v = np.array([0.1, 0.2, 0.3])
        with pytest.raises(ValueError):
            CalibratedSpectrum(wavelengths=w, r=v, g=v, b=v, combined=v)

    def test_intensities_may_leave_unit_range(self):
        # calibrated views are not clamped: resampled or synthetic data may
        # legitimately exceed the raw [0, 1] scale
        w = np.array([400.0, 500.0])
        v = np.array([-0.25, 1.75])
        spectrum = CalibratedSpectrum(wavelengths=w, r=v, g=v, b=v, combined=v)
        assert spectrum.n == 2


class TestApplyCalibration:
    def test_two_point_example(self):
        cal = make_wavelength_calibration((0.0, 400.0), (1.0, 700.0))
        calibrated = apply_calibration(raw([0.25, 0.75]), cal)
        np.testing.assert_array_equal(calibrated.wavelengths, [400.0, 700.0])
        np.testing.assert_array_equal(calibrated.combined, [0.25, 0.75])

    def test_decreasing_map_reverses_to_ascending(self):
        cal = make_wavelength_calibration((0.0, 700.0), (3.0, 400.0))
        calibrated = apply_calibration(raw([0.1, 0.2, 0.3, 0.4]), cal)
        assert np.all(np.diff(calibrated.wavelengths) > 0)
        np.testing.assert_array_equal(calibrated.wavelengths, [400.0, 500.0, 600.0, 700.0])
        np.testing.assert_array_equal(calibrated.r, [0.4, 0.3, 0.2, 0.1])
        np.testing.assert_array_equal(calibrated.g, [0.4, 0.3, 0.2, 0.1])

    def test_eleven_column_grid_is_exact(self):
        cal = make_wavelength_calibration((0.0, 400.0), (10.0, 700.0))
        calibrated = apply_calibration(raw(np.linspace(0, 1, 11)), cal)
        # (4000 + 300 p) / 10 is exact in binary floating point
        np.testing.assert_array_equal(
            calibrated.wavelengths, np.array([400.0 + 30.0 * p for p in range(11)]))

    def test_uses_geometry_pixel_axis(self):
        cal = make_wavelength_calibration((5.0, 500.0), (7.0, 600.0))
        calibrated = apply_calibration(raw([0.1, 0.2, 0.3], col_start=5), cal)
        np.testing.assert_array_equal(calibrated.wavelengths, [500.0, 550.0, 600.0])


class TestResample:
    def test_identity_grid_returns_same_object(self):
        spectrum = make_spectrum([400.0, 500.0, 600.0], [0.1, 0.2, 0.3])
        assert resample(spectrum, spectrum.wavelengths) is spectrum

    def test_midpoint_interpolates_linearly(self):
        spectrum = make_spectrum([400.0, 500.0], [0.0, 1.0])
        out = resample(spectrum, np.array([450.0]))
        assert out.combined[0] == 0.5

    def test_out_of_range_grid_rejected(self):
        spectrum = make_spectrum([400.0, 500.0], [0.0, 1.0])
        for grid in ([399.9, 450.0], [450.0, 500.1]):
            with pytest.raises(GridOutOfRange):
                resample(spectrum, np.array(grid))

    def test_matches_scalar_interpolation_oracle(self):
        rng = np.random.default_rng(17)
        w = np.cumsum(rng.uniform(1, 10, 20)) + 400.0
        values = rng.uniform(0, 1, 20)
        spectrum = make_spectrum(w, values)
        grid = np.sort(rng.uniform(w[0], w[-1], 50))
        out = resample(spectrum, grid)

        def scalar(x):
            j = int(np.searchsorted(w, x, side="right"))
            j = min(max(j, 1), len(w) - 1)
            t = (x - w[j - 1]) / (w[j] - w[j - 1])
            return values[j - 1] * (1 - t) + values[j] * t

        for x, got in zip(grid, out.combined):
            assert got == pytest.approx(scalar(float(x)), abs=1e-12)

    def test_channels_resampled_independently(self):
        w = np.array([400.0, 500.0])
        spectrum = CalibratedSpectrum(
            wavelengths=w,
            r=np.array([0.0, 1.0]),
            g=np.array([1.0, 0.0]),
            b=np.array([0.5, 0.5]),
            combined=np.array([0.5, 0.5]),
        )
        out = resample(spectrum, np.array([425.0]))
        assert out.r[0] == 0.25
        assert out.g[0] == 0.75
        assert out.b[0] == 0.5
