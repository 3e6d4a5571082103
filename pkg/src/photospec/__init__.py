"""Turn photographs of a projected spectrum into concentration readings.

The pipeline: decode an image, average a pixel band into a raw spectrum,
map pixels to wavelengths with a two-point calibration, compare a sample
against a blank to get transmittance and absorbance, then fit absorbance
against known concentrations and invert the line for unknowns.
"""

from .absorption import (
    DEFAULT_INTENSITY_FLOOR,
    FLAG_FLOORED,
    FLAG_OK,
    FLAG_SATURATED,
    AbsorptionMeasurement,
    absorbance_at,
    lambda_max,
    measure_absorption,
    transmittance_to_absorbance,
)
from .beer_lambert import (
    MODE_THROUGH_ORIGIN,
    MODE_WITH_INTERCEPT,
    MODES,
    SLOPE_FLOOR,
    BeerLambertFit,
    CalibrationSample,
    ConcentrationPrediction,
    fit_beer_lambert,
    predict_concentration,
)
from .errors import IoFailure, SpectraError
from .image import (
    ROTATIONS,
    RasterImage,
    auto_orient,
    decode_image,
    encode_png,
    rotate,
)
from .spectrum import (
    ORIENTATIONS,
    ExtractionGeometry,
    RawSpectrum,
    extract_raw_spectrum,
    smooth,
)
from .wavelength import (
    CalibratedSpectrum,
    WavelengthCalibration,
    apply_calibration,
    make_wavelength_calibration,
    resample,
)

__version__ = "0.1.0"

__all__ = [
    "AbsorptionMeasurement",
    "BeerLambertFit",
    "CalibratedSpectrum",
    "CalibrationSample",
    "ConcentrationPrediction",
    "DEFAULT_INTENSITY_FLOOR",
    "ExtractionGeometry",
    "FLAG_FLOORED",
    "FLAG_OK",
    "FLAG_SATURATED",
    "IoFailure",
    "MODES",
    "MODE_THROUGH_ORIGIN",
    "MODE_WITH_INTERCEPT",
    "ORIENTATIONS",
    "ROTATIONS",
    "RasterImage",
    "RawSpectrum",
    "SLOPE_FLOOR",
    "SpectraError",
    "WavelengthCalibration",
    "absorbance_at",
    "apply_calibration",
    "auto_orient",
    "decode_image",
    "encode_png",
    "extract_raw_spectrum",
    "fit_beer_lambert",
    "lambda_max",
    "make_wavelength_calibration",
    "measure_absorption",
    "predict_concentration",
    "resample",
    "rotate",
    "smooth",
    "transmittance_to_absorbance",
]
