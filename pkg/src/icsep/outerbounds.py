"""Sum-capacity outerbounds for the 3-user interference channel.

Two bound families are computable here:

* the equal-magnitude family: carriers whose nine gains share one
  magnitude c and whose sign pattern is user-relabeling / sign-flip
  equivalent to one of the built-in counterexample carriers.  For those,
  one receiver can decode all three messages with no noise reduction and
  the sum capacity is at most (1/2)log2(1 + c^2 SNR);
* the genie-aided MAC bound for the perfectly symmetric channel (unit
  direct gains, cross gains h > 1): a genie hands receiver 1 the side
  signal a1*X1 + (1-h)*X2 + X3 + Z~, turning the network into a 3-user
  MAC with a two-antenna receiver whose sum capacity is a log-det ratio.
  The genie gain a1 and the noise statistics (sigma, rho) are free
  parameters, constrained so Z1 + Z~ is no stronger than the original
  unit noise, and the bound is minimized over them.

The separate-encoding outerbound composes per-carrier bounds with an
optimal power allocation across carriers; it limits any scheme that uses
independent codebooks per carrier, with arbitrary decoding inside each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from . import channel as chan
from .rates import allocate_power

#: slack allowed on the noise-enhancement constraint E[(Z1+Z~)^2] <= 1
CONSTRAINT_TOL = 1e-12

#: relative spread allowed when checking the all-gains-equal-magnitude family
MAGNITUDE_RTOL = 1e-9


class InfeasibleGenieParamsError(ValueError):
    """Genie parameters violate the noise constraint or make K_z singular."""


class NoSeparateBoundError(ValueError):
    """No finite-SNR per-carrier bound in this library applies to the channel."""


@dataclass(frozen=True)
class GenieParams:
    """Genie side-signal parameters: gain on X1, noise std, correlation with Z1."""

    a1: float
    sigma: float
    rho: float

    def noise_enhancement(self) -> float:
        """E[(Z1 + Z~)^2]; must stay at or below the unit noise power."""
        return 1.0 + self.sigma**2 + 2.0 * self.rho * self.sigma

    def covariance(self) -> np.ndarray:
        """Covariance of the stacked noise [Z1, Z~]."""
        c = self.rho * self.sigma
        return np.array([[1.0, c], [c, self.sigma**2]])

    def feasible(self, tol: float = CONSTRAINT_TOL) -> bool:
        return (
            self.sigma > 0
            and abs(self.rho) < 1.0
            and self.noise_enhancement() <= 1.0 + tol
        )


@dataclass(frozen=True)
class MacBoundResult:
    """Minimized MAC bound value (bits per real use) and the minimizing params."""

    value: float
    params: GenieParams
    h: float


@dataclass(frozen=True)
class MacSearchConfig:
    """Search box and resolution for :func:`mac_bound_optimize`.

    The genie gain is scanned over [-a1_box_factor*h, a1_box_factor*h],
    sigma over (0, sigma_max], rho over (-1, 1), all restricted to the
    feasible set; the best grid point seeds a simplex refinement with
    parameters clipped back into the feasible box at every evaluation.
    """

    a1_box_factor: float = 4.0
    sigma_max: float = 2.0
    a1_points: int = 33
    sigma_points: int = 24
    rho_points: int = 25
    refine: bool = True
    refine_maxiter: int = 500


def example1_bound(snr: float) -> float:
    """Per-carrier sum-capacity bound (1/2)log2(1 + SNR) for the
    equal-magnitude family with unit gains.

    The caller asserts the carrier belongs to the family (as both
    counterexample carriers do); for magnitude c, pass c^2 * snr.
    """
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    return 0.5 * math.log2(1.0 + snr)


def mac_bound_eval(h: float, snr: float, params: GenieParams) -> float:
    """Evaluate the genie MAC bound at fixed parameters.

    Builds the 2x3 effective MAC matrix H = [[1, h, h], [a1, 1-h, 0]] and
    returns (1/2)log2 det(K_z + (snr/3) H H^T) / det(K_z), the sum
    capacity of the two-antenna MAC halved into real-channel units.
    """
    if h <= 1:
        raise ValueError("the symmetric-channel bound requires cross gain h > 1")
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    a1, sigma, rho = params.a1, params.sigma, params.rho
    if sigma <= 0 or abs(rho) >= 1.0 - 1e-12:
        raise InfeasibleGenieParamsError(
            f"noise covariance is singular for sigma={sigma:.6g}, rho={rho:.6g}"
        )
    if params.noise_enhancement() > 1.0 + CONSTRAINT_TOL:
        raise InfeasibleGenieParamsError(
            f"E[(Z1+Z~)^2] = {params.noise_enhancement():.6g} exceeds 1"
        )
    t = snr / 3.0
    c = rho * sigma
    g11 = 1.0 + 2.0 * h * h
    g12 = a1 + h * (1.0 - h)
    g22 = a1 * a1 + (1.0 - h) ** 2
    det_a = (1.0 + t * g11) * (sigma * sigma + t * g22) - (c + t * g12) ** 2
    det_k = sigma * sigma - c * c
    return max(0.0, 0.5 * math.log2(det_a / det_k))


def _clip_params(h, x, cfg) -> GenieParams:
    box = cfg.a1_box_factor * h
    a1 = min(max(float(x[0]), -box), box)
    sigma = min(max(float(x[1]), 1e-6), min(cfg.sigma_max, 2.0 - 1e-6))
    # rho <= -sigma/2 keeps E[(Z1+Z~)^2] at 1 up to an ulp, inside the slack
    rho = min(max(float(x[2]), -1.0 + 1e-9), -0.5 * sigma)
    return GenieParams(a1, sigma, rho)


def mac_bound_optimize(
    h: float,
    snr: float,
    search_cfg: Optional[MacSearchConfig] = None,
) -> MacBoundResult:
    """Minimize the genie MAC bound over feasible (a1, sigma, rho).

    A coarse feasible grid is scanned first (deterministic order, strict
    improvement, so ties go to the lowest lexicographic grid index), then
    a Nelder-Mead refinement runs from the best grid point with every
    candidate clipped into the feasible box.
    """
    if h <= 1:
        raise ValueError("the symmetric-channel bound requires cross gain h > 1")
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    cfg = search_cfg or MacSearchConfig()

    box = cfg.a1_box_factor * h
    a1s = np.linspace(-box, box, cfg.a1_points)
    sigmas = np.linspace(cfg.sigma_max / cfg.sigma_points, cfg.sigma_max, cfg.sigma_points)
    rhos = np.linspace(-1.0 + 1e-6, 1.0 - 1e-6, cfg.rho_points)

    best_val = None
    best = None
    for a1 in a1s:
        for sigma in sigmas:
            for rho in rhos:
                params = GenieParams(float(a1), float(sigma), float(rho))
                if not params.feasible():
                    continue
                val = mac_bound_eval(h, snr, params)
                if best_val is None or val < best_val:
                    best_val, best = val, params
    if best is None:
        raise ValueError("search configuration produced an empty feasible grid")

    if cfg.refine:
        res = minimize(
            lambda x: mac_bound_eval(h, snr, _clip_params(h, x, cfg)),
            x0=np.array([best.a1, best.sigma, best.rho]),
            method="Nelder-Mead",
            options=dict(
                xatol=1e-9, fatol=1e-12, maxiter=cfg.refine_maxiter, maxfev=2 * cfg.refine_maxiter
            ),
        )
        cand = _clip_params(h, res.x, cfg)
        val = mac_bound_eval(h, snr, cand)
        if val < best_val:
            best_val, best = val, cand

    return MacBoundResult(best_val, best, h)


def mac_bound_grid_min(
    h: float,
    snr: float,
    step: float = 0.01,
    a1_box_factor: float = 4.0,
    sigma_max: float = 2.0,
) -> float:
    """Dense-grid reference minimum of the genie MAC bound.

    Exhaustively evaluates the bound on a regular feasible grid with the
    given step on every axis (vectorized, sweeping one sigma slice at a
    time).  Slow but search-free; used to cross-check the optimizer.
    """
    if h <= 1:
        raise ValueError("the symmetric-channel bound requires cross gain h > 1")
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    box = a1_box_factor * h
    a1 = np.arange(-box, box + step / 2, step)[:, None]
    rhos = np.arange(-1.0 + step, 1.0 - step + step / 2, step)
    t = snr / 3.0
    g11 = 1.0 + 2.0 * h * h
    best = math.inf
    for sigma in np.arange(step, sigma_max + step / 2, step):
        rho = rhos[(sigma * sigma + 2.0 * rhos * sigma) <= CONSTRAINT_TOL]
        if rho.size == 0:
            continue
        c = (rho * sigma)[None, :]
        g12 = a1 + h * (1.0 - h)
        g22 = a1 * a1 + (1.0 - h) ** 2
        det_a = (1.0 + t * g11) * (sigma * sigma + t * g22) - (c + t * g12) ** 2
        det_k = sigma * sigma - c * c
        val = 0.5 * np.log2(det_a / det_k)
        best = min(best, float(val.min()))
    if not math.isfinite(best):
        raise ValueError("grid contains no feasible point")
    return max(0.0, best)


# sign patterns (as int matrices) of the two counterexample carriers
_SIGN_TARGETS = tuple(
    np.sign(c.as_array()).astype(int) for c in chan.make_counterexample().carriers
)


def _sign_equivalent(s: np.ndarray, target: np.ndarray) -> bool:
    # look for row signs r and column signs t with r_a t_b s[a,b] == target
    for r0 in (1, -1):
        t = target[0] * r0 * s[0]
        r = target[:, 0] * t[0] * s[:, 0]
        if np.array_equal(np.outer(r, t) * s, target):
            return True
    return False


def equal_magnitude_gain(carrier: chan.SingleCarrierChannel) -> Optional[float]:
    """Return the common gain magnitude c if the carrier belongs to the
    equal-magnitude bound family, else None.

    Family membership: all nine |h| agree (relative spread below 1e-9)
    and the sign pattern is equivalent, under a simultaneous user
    relabeling plus per-receiver/per-transmitter sign flips (all isomorphisms
    of the channel), to one of the counterexample carriers.
    """
    a = np.abs(carrier.as_array())
    c = float(a.max())
    if c == 0 or (a.max() - a.min()) > MAGNITUDE_RTOL * c:
        return None
    s = np.sign(carrier.as_array()).astype(int)
    for perm in permutations(range(3)):
        sp = s[np.ix_(perm, perm)]
        if any(_sign_equivalent(sp, target) for target in _SIGN_TARGETS):
            return c
    return None


def separate_outerbound(channel: chan.ParallelChannel, snr: float) -> float:
    """Outerbound on any separate-encoding scheme's sum rate per carrier.

    Each carrier must admit a finite-SNR bound known to this library
    (the equal-magnitude family); the per-carrier bounds are then
    combined through the optimal power allocation:
    (1/M) max sum_m bound_m(SNR_m) over sum_m SNR_m <= snr.

    Raises
    ------
    NoSeparateBoundError
        If some carrier has no applicable bound.  A carrier that is
        merely singular pins its high-SNR slope but not a finite-SNR
        constant, so it is rejected too (with a distinct message).
    """
    chan.ensure_parallel_valid(channel)
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    fns = []
    for m, carrier in enumerate(channel.carriers, start=1):
        c = equal_magnitude_gain(carrier)
        if c is None:
            if chan.singularity_check(carrier) is not None:
                detail = (
                    "is singular (1 degree of freedom) but no finite-SNR "
                    "constant is available for it"
                )
            else:
                detail = "matches no bound family known to this library"
            raise NoSeparateBoundError(f"carrier {m} {detail}")
        c_sq = c * c
        fns.append(lambda p, c_sq=c_sq: 0.5 * math.log2(1.0 + c_sq * p))
    if snr == 0:
        return 0.0
    alloc = allocate_power(fns, snr)
    return sum(f(p) for f, p in zip(fns, alloc.per_carrier)) / channel.n_carriers
