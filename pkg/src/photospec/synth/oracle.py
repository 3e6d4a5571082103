"""Independent least-squares oracle for cross-checking the calibration fit.

Deliberately shares no code with the engine's fit: it assembles the normal
equations on the raw (uncentered) moments and solves them with numpy,
whereas the engine uses the mean-centered closed form.
"""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateDesign, TooFewSamples


def oracle_ols(points, mode: str = "with-intercept"):
    """Closed-form OLS of y on x returning (slope, intercept, r_squared).

    ``points`` is a sequence of (x, y) pairs. Modes match the engine:
    "with-intercept" and "through-origin".
    """
    pts = [(float(x), float(y)) for x, y in points]
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    n = x.shape[0]

    if mode == "through-origin":
        if n < 1:
            raise TooFewSamples("need at least 1 point through the origin")
        slope = float(x @ y) / float(x @ x)
        intercept = 0.0
        ss_tot = float(y @ y)
    elif mode == "with-intercept":
        if n < 2:
            raise TooFewSamples("need at least 2 points for an intercept fit")
        if np.all(x == x[0]):
            raise DegenerateDesign("design matrix is rank deficient")
        gram = np.array([[float(x @ x), float(x.sum())],
                         [float(x.sum()), float(n)]])
        rhs = np.array([float(x @ y), float(y.sum())])
        slope, intercept = np.linalg.solve(gram, rhs)
        slope, intercept = float(slope), float(intercept)
        ss_tot = float(((y - y.mean()) ** 2).sum())
    else:
        raise ValueError(f"unknown mode {mode!r}")

    residuals = y - (slope * x + intercept)
    ss_res = float((residuals ** 2).sum())
    if ss_tot > 0.0:
        r_squared = 1.0 - ss_res / ss_tot
    else:
        r_squared = 1.0 if ss_res == 0.0 else float("nan")
    return slope, intercept, r_squared
