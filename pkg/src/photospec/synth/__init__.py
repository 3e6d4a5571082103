"""Synthetic optical bench: forward-model image rendering and oracles."""

from .models import DyeModel, LampModel, RenderConfig
from .oracle import oracle_ols
from .render import render_blank, render_sample
from .series import (
    DEFAULT_CONFIG,
    DEFAULT_DYE,
    DEFAULT_LAMP,
    DEFAULT_SMOOTH_WINDOW,
    PAPER_CONCENTRATIONS,
    SeriesReport,
    SeriesRow,
    run_paper_series,
)

__all__ = [
    "DEFAULT_CONFIG",
    "DEFAULT_DYE",
    "DEFAULT_LAMP",
    "DEFAULT_SMOOTH_WINDOW",
    "DyeModel",
    "LampModel",
    "RenderConfig",
    "oracle_ols",
    "render_blank",
    "render_sample",
    "run_paper_series",
    "SeriesReport",
    "SeriesRow",
    "PAPER_CONCENTRATIONS",
]
