"""Decay-law fits on energy traces and comparison against predicted rates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .resolvent import DecayPrediction

__all__ = ["DecayFit", "Verdict", "fit_polynomial_rate", "fit_exponential_rate",
           "compare_to_prediction"]


@dataclass(frozen=True)
class DecayFit:
    model: str           # "polynomial" | "exponential"
    rate: float          # r in E ~ (1+t)^-r, or mu in E ~ e^(-mu t)
    goodness: float      # rms residual of the fit in log-energy
    window: tuple
    confidence: float = 0.0  # worst-case slope shift consistent with the residual level


@dataclass(frozen=True)
class Verdict:
    fit_rate: float
    predicted: Optional[float]
    deviation: Optional[float]
    passed: bool
    mismatch: bool = False
    note: str = ""


def _window_arrays(trace: Sequence, t_min: float):
    t = np.array([r.t for r in trace], dtype=float)
    e = np.array([r.E for r in trace], dtype=float)
    keep = t >= t_min
    if np.count_nonzero(keep) < 4:
        raise ValueError("window too short: fewer than 4 samples past t_min")
    t, e = t[keep], e[keep]
    if np.any(e <= 0.0):
        raise ValueError("energy trace must be strictly positive on the fit window")
    return t, e


def fit_polynomial_rate(trace: Sequence, t_min: Optional[float] = None) -> DecayFit:
    """Slope of log E against log(1+t); rate is the positive decay exponent.

    Requires at least one decade of 1+t past the transient cutoff (default
    one tenth of the horizon).
    """
    if t_min is None:
        t_min = 0.1 * max(r.t for r in trace)
    t, e = _window_arrays(trace, t_min)
    span = np.log10((1.0 + t[-1]) / (1.0 + t[0]))
    if span < 0.95:  # one decade of 1+t, with rounding slack
        raise ValueError(f"polynomial fit needs about a decade of 1+t, window has {span:.2f}")
    x = np.log1p(t)
    y = np.log(e)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    width = resid * np.sqrt(12.0) / (x[-1] - x[0])
    return DecayFit("polynomial", float(-slope), resid, (float(t[0]), float(t[-1])),
                    float(width))


def fit_exponential_rate(trace: Sequence, t_min: Optional[float] = None) -> DecayFit:
    """Slope of log E against t; rate mu in E ~ e^(-mu t)."""
    if t_min is None:
        t_min = 0.1 * max(r.t for r in trace)
    t, e = _window_arrays(trace, t_min)
    y = np.log(e)
    slope, intercept = np.polyfit(t, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * t + intercept)) ** 2)))
    width = resid * np.sqrt(12.0) / (t[-1] - t[0])
    return DecayFit("exponential", float(-slope), resid, (float(t[0]), float(t[-1])),
                    float(width))


def compare_to_prediction(fit: DecayFit, predicted: DecayPrediction, tol: float) -> Verdict:
    """Relative deviation |rate - predicted| / predicted with pass/fail at tol.

    Model families must agree; a logarithmic prediction compared against a
    polynomial or exponential fit is a mismatch, reported rather than coerced.
    """
    if predicted.kind == "logarithmic" or fit.model not in ("polynomial", "exponential"):
        return Verdict(fit.rate, None, None, False, mismatch=True,
                       note=f"cannot score a {fit.model} fit against a {predicted.kind} prediction")
    if predicted.kind == "polynomial" and fit.model != "polynomial":
        return Verdict(fit.rate, predicted.energy_exponent, None, False, mismatch=True,
                       note="prediction is polynomial, fit is not")
    dev = abs(fit.rate - predicted.energy_exponent) / abs(predicted.energy_exponent)
    return Verdict(fit.rate, predicted.energy_exponent, float(dev), bool(dev <= tol))
