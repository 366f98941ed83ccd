"""Empirical degrees-of-freedom estimation from high-SNR rate curves.

The degrees of freedom of a network is the high-SNR growth rate of its
sum rate.  Since every rate in this package is in bits per real use,
curves are regressed against x = (1/2)log2(SNR): a point-to-point real
Gaussian link then reads slope 1, and the built-in counterexample's
joint scheme reads 3/2.  Bounded offsets (the o(log SNR) part) wash out
as the fitting window moves up in SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class DofEstimate:
    """Fitted slope (the DoF estimate), fit quality, and the dB window used."""

    slope: float
    r_squared: float
    snr_db_range: tuple


def estimate_dof(
    rate_fn: Callable[[float], float],
    snr_db_lo: float = 40.0,
    snr_db_hi: float = 80.0,
    n_points: int = 21,
) -> DofEstimate:
    """Least-squares slope of rate_fn(SNR) against (1/2)log2(SNR).

    Parameters
    ----------
    rate_fn : callable
        Maps linear SNR to a rate in bits per real use (per carrier).
    snr_db_lo, snr_db_hi : float
        Fitting window in dB; must satisfy snr_db_hi > snr_db_lo >= 30
        so the window sits in the high-SNR regime.
    n_points : int
        Grid size, at least 5.

    Raises
    ------
    ValueError
        On a bad window/grid, or if rate_fn returns a non-finite value.
    """
    if not snr_db_lo >= 30.0:
        raise ValueError("snr_db_lo must be at least 30 dB (high-SNR regime)")
    if not snr_db_hi > snr_db_lo:
        raise ValueError("snr_db_hi must exceed snr_db_lo")
    if n_points < 5:
        raise ValueError("need at least 5 grid points")

    dbs = np.linspace(snr_db_lo, snr_db_hi, n_points)
    snrs = 10.0 ** (dbs / 10.0)
    x = 0.5 * np.log2(snrs)
    y = np.array([float(rate_fn(float(s))) for s in snrs])
    if not np.all(np.isfinite(y)):
        bad = int(np.flatnonzero(~np.isfinite(y))[0])
        raise ValueError(f"rate_fn returned a non-finite value at {dbs[bad]:.6g} dB")

    xm = x - x.mean()
    ym = y - y.mean()
    slope = float(np.dot(xm, ym) / np.dot(xm, xm))
    ss_res = float(np.sum((ym - slope * xm) ** 2))
    ss_tot = float(np.dot(ym, ym))
    r_squared = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return DofEstimate(slope, r_squared, (float(snr_db_lo), float(snr_db_hi)))
