"""Beer-Lambert calibration line: least-squares fit and inversion.

The fitted slope is the merged extinction-times-path-length coefficient;
concentrations are relative dilutions, so the slope carries units of
absorbance per unit concentration fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegenerateDesign, SlopeTooSmall, TooFewSamples

MODE_WITH_INTERCEPT = "with-intercept"
MODE_THROUGH_ORIGIN = "through-origin"
MODES = (MODE_WITH_INTERCEPT, MODE_THROUGH_ORIGIN)

# Below this slope magnitude the line carries no concentration information.
SLOPE_FLOOR = 1e-9


@dataclass(frozen=True)
class CalibrationSample:
    """One known dilution and its measured absorbance."""

    concentration: float
    absorbance: float
    label: str = ""

    def __post_init__(self):
        if not self.concentration > 0:
            raise ValueError(f"concentration must be > 0, got {self.concentration}")


@dataclass(frozen=True)
class BeerLambertFit:
    """Least-squares absorbance-vs-concentration line.

    In through-origin mode r_squared uses the uncentered total sum of
    squares (sum of A_i^2); conventions differ, this one is documented.
    """

    slope: float
    intercept: float
    r_squared: float
    n_samples: int
    mode: str
    analysis_wavelength_nm: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == MODE_THROUGH_ORIGIN and self.intercept != 0.0:
            raise ValueError("through-origin fit must have intercept exactly 0")

    def absorbance_for(self, concentration: float) -> float:
        return self.slope * concentration + self.intercept


@dataclass(frozen=True)
class ConcentrationPrediction:
    """Inverted line readout; below_range marks a negative concentration."""

    concentration: float
    below_range: bool = field(default=False)


def fit_beer_lambert(samples, mode: str = MODE_WITH_INTERCEPT,
                     analysis_wavelength_nm: float | None = None) -> BeerLambertFit:
    """Ordinary least squares of absorbance against concentration.

    with-intercept needs n >= 2 and at least two distinct concentrations;
    through-origin needs n >= 1.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    samples = list(samples)
    n = len(samples)
    c = [s.concentration for s in samples]
    a = [s.absorbance for s in samples]

    if mode == MODE_THROUGH_ORIGIN:
        if n < 1:
            raise TooFewSamples("through-origin fit needs at least 1 sample")
        scc = math.fsum(ci * ci for ci in c)
        sca = math.fsum(ci * ai for ci, ai in zip(c, a))
        slope = sca / scc
        intercept = 0.0
        ss_tot = math.fsum(ai * ai for ai in a)
    else:
        if n < 2:
            raise TooFewSamples("with-intercept fit needs at least 2 samples")
        if all(ci == c[0] for ci in c):
            raise DegenerateDesign("all concentrations identical; slope is unidentifiable")
        c_mean = math.fsum(c) / n
        a_mean = math.fsum(a) / n
        sxx = math.fsum((ci - c_mean) ** 2 for ci in c)
        sxy = math.fsum((ci - c_mean) * (ai - a_mean) for ci, ai in zip(c, a))
        slope = sxy / sxx
        intercept = a_mean - slope * c_mean
        ss_tot = math.fsum((ai - a_mean) ** 2 for ai in a)

    ss_res = math.fsum((ai - (slope * ci + intercept)) ** 2 for ci, ai in zip(c, a))
    if ss_tot > 0.0:
        r_squared = 1.0 - ss_res / ss_tot
    else:
        # all responses identical (or zero, through origin): the flat line
        # either fits exactly or explains nothing
        r_squared = 1.0 if ss_res == 0.0 else float("nan")
    return BeerLambertFit(
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        n_samples=n,
        mode=mode,
        analysis_wavelength_nm=analysis_wavelength_nm,
    )


def predict_concentration(fit: BeerLambertFit, absorbance: float) -> ConcentrationPrediction:
    """Invert the calibration line: c = (A - b) / m.

    Negative concentrations are returned unclamped with below_range set.
    """
    if abs(fit.slope) < SLOPE_FLOOR:
        raise SlopeTooSmall(
            f"slope magnitude {abs(fit.slope)} below {SLOPE_FLOOR}; "
            "the fit carries no concentration information"
        )
    c = (absorbance - fit.intercept) / fit.slope
    return ConcentrationPrediction(concentration=c, below_range=c < 0)
