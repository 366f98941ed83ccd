"""Achievable rates and power allocation for parallel 3-user interference channels.

Rates are in bits per real channel use, normalized per carrier (a factor
1/M in front of every sum over carriers) and use the real-channel form
(1/2)log2(1 + SINR).  Powers are linear; ``db_to_linear`` converts from dB.

The joint-coding inner bound here is linear beamforming across carriers
with interference treated as noise: each transmitter j sends along a unit
vector v_j with power p_j, each receiver i projects onto a unit combiner
u_i, and user i's SINR is p_i g_ii^2 / (1 + sum_{j != i} p_j g_ij^2) with
g_ij = u_i . (H_ij v_j).  On the built-in counterexample the alignment
scheme makes every cross gain g_ij (j != i) exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import channel as chan

#: relative tolerance for "the alignment map is a multiple of identity"
ALIGNMENT_TOL = 1e-9

#: a desired gain below this (absolute) makes an alignment scheme useless
DESIRED_GAIN_TOL = 1e-9

#: unit-norm check tolerance for scheme vectors
UNIT_NORM_TOL = 1e-6

_WATERFILL_ITERS = 200
_ALLOC_OUTER_ITERS = 200
_ALLOC_INNER_ITERS = 60
_ALLOC_BUDGET_RTOL = 1e-9


class AllocationError(RuntimeError):
    """Power allocation failed to converge (is every bound concave?)."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class BeamformingScheme:
    """Per-user transmit directions, receive combiners and powers.

    ``v[j]`` and ``u[i]`` are unit vectors of length M (one entry per
    carrier); ``p[j]`` is user j's transmit power in linear units.
    """

    v: tuple
    u: tuple
    p: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(tuple(float(x) for x in vec) for vec in self.v))
        object.__setattr__(self, "u", tuple(tuple(float(x) for x in vec) for vec in self.u))
        object.__setattr__(self, "p", tuple(float(x) for x in self.p))
        if len(self.v) != 3 or len(self.u) != 3 or len(self.p) != 3:
            raise ValueError("a scheme needs 3 transmit vectors, 3 combiners and 3 powers")

    @property
    def n_carriers(self) -> int:
        return len(self.v[0])

    def v_vec(self, j: int) -> np.ndarray:
        """Transmit direction of user j (1-based)."""
        return np.array(self.v[j - 1])

    def u_vec(self, i: int) -> np.ndarray:
        """Receive combiner of user i (1-based)."""
        return np.array(self.u[i - 1])

    def with_powers(self, p) -> "BeamformingScheme":
        return replace(self, p=tuple(float(x) for x in p))

    def with_equal_power(self, total_snr: float) -> "BeamformingScheme":
        """Split a total power budget equally across the three users."""
        return self.with_powers((total_snr / 3.0,) * 3)


@dataclass(frozen=True)
class RateReport:
    """Per-user and sum rates (bits per real use per carrier) at total power ``snr``."""

    per_user_rate: tuple
    sum_rate: float
    snr: float


@dataclass(frozen=True)
class PowerAllocation:
    """Per-carrier linear powers; their sum stays within the total budget."""

    per_carrier: tuple


@dataclass(frozen=True)
class SweepResult:
    """One SNR point of the joint-vs-separate comparison sweep."""

    snr_db: float
    joint_tin: float
    separate_outer: Optional[float]
    tdma: float
    scheme_note: str


def _check_scheme(channel: chan.ParallelChannel, scheme: BeamformingScheme) -> None:
    m = channel.n_carriers
    for name, vecs in (("v", scheme.v), ("u", scheme.u)):
        for idx, vec in enumerate(vecs, start=1):
            if len(vec) != m:
                raise ValueError(
                    f"scheme {name}[{idx}] has length {len(vec)}, channel has {m} carriers"
                )
            norm = math.sqrt(sum(x * x for x in vec))
            if abs(norm - 1.0) > UNIT_NORM_TOL:
                raise ValueError(f"scheme {name}[{idx}] is not unit norm (|v| = {norm:.6g})")
    if any(p < 0 for p in scheme.p):
        raise ValueError("powers must be nonnegative")


def effective_gains(channel: chan.ParallelChannel, scheme: BeamformingScheme) -> np.ndarray:
    """The 3x3 matrix of projected link gains g_ij = u_i . (H_ij v_j).

    The diagonal holds the desired gains, off-diagonal entries are the
    residual interference amplitudes after combining (exactly zero for a
    perfectly aligned scheme).  The dot products are summed sequentially
    in plain float arithmetic: a combiner orthogonal to the interference
    by sign symmetry then cancels exactly, which BLAS fused
    multiply-adds would not guarantee.
    """
    out = np.empty((3, 3))
    for i in chan.USERS:
        u = scheme.u[i - 1]
        for j in chan.USERS:
            w = channel.link_gains(i, j) * scheme.v_vec(j)
            out[i - 1, j - 1] = float(sum(ux * wx for ux, wx in zip(u, w)))
    return out


def tin_rate(channel: chan.ParallelChannel, scheme: BeamformingScheme) -> RateReport:
    """Sum rate of the beamforming scheme with interference treated as noise.

    Returns per-user rates (1/M)(1/2)log2(1 + SINR_i) with unit noise
    power after combining (the combiners are unit norm).

    Raises
    ------
    ValueError
        On a carrier-count mismatch between scheme and channel, or a
        scheme violating its unit-norm/nonnegative-power invariants.
    """
    chan.ensure_parallel_valid(channel)
    _check_scheme(channel, scheme)
    m = channel.n_carriers
    g = effective_gains(channel, scheme)
    rates = []
    for i in range(3):
        signal = scheme.p[i] * g[i, i] ** 2
        noise = 1.0 + sum(scheme.p[j] * g[i, j] ** 2 for j in range(3) if j != i)
        rates.append(0.5 / m * math.log2(1.0 + signal / noise))
    rates = tuple(rates)
    return RateReport(rates, sum(rates), sum(scheme.p))


def _water_fill(gains_sq: np.ndarray, budget: float) -> np.ndarray:
    """Optimal power split for sum of (1/2)log2(1 + g_m p_m) under a total budget.

    Bisects the water level, then solves the active set in closed form so
    symmetric instances split exactly.
    """
    floors = 1.0 / gains_sq
    if budget <= 0:
        return np.zeros_like(floors)
    lo = float(np.min(floors))
    hi = float(np.max(floors)) + budget
    for _ in range(_WATERFILL_ITERS):
        mid = 0.5 * (lo + hi)
        if np.sum(np.maximum(0.0, mid - floors)) >= budget:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-16 * hi:
            break
    active = hi - floors > 0
    # exact water level on the bisected active set; drop any carrier that
    # the closed form pushes negative
    while True:
        level = (budget + floors[active].sum()) / active.sum()
        alloc = np.where(active, np.maximum(0.0, level - floors), 0.0)
        still = alloc > 0
        if np.array_equal(still, active):
            return alloc
        active = still


def tdma_rate(channel: chan.ParallelChannel, active_user: int, snr: float) -> RateReport:
    """Best single-user rate: water-fill the whole budget over the carriers.

    Only ``active_user`` (1-based) transmits; everyone else is silent, so
    there is no interference and the problem is a parallel point-to-point
    link with per-carrier gains h_m[i][i].
    """
    chan.ensure_parallel_valid(channel)
    if active_user not in chan.USERS:
        raise ValueError(f"active_user must be in {chan.USERS}")
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    gains_sq = channel.link_gains(active_user, active_user) ** 2
    alloc = _water_fill(gains_sq, snr)
    m = channel.n_carriers
    rate = sum(0.5 * math.log2(1.0 + g * p) for g, p in zip(gains_sq, alloc)) / m
    per_user = tuple(rate if i == active_user else 0.0 for i in chan.USERS)
    return RateReport(per_user, rate, snr)


def _marginal(f: Callable[[float], float], p: float) -> float:
    # central difference, one-sided at the p = 0 boundary
    step = 1e-6 * (1.0 + abs(p))
    lo = max(0.0, p - step)
    return (f(p + step) - f(lo)) / (p + step - lo)


def allocate_power(
    per_carrier_bound: Sequence[Callable[[float], float]],
    total_snr: float,
) -> PowerAllocation:
    """Maximize sum_m f_m(p_m) subject to sum_m p_m <= total_snr, p_m >= 0.

    Every ``f_m`` must be concave and nondecreasing.  The allocator
    bisects the common marginal-value multiplier, with per-carrier
    marginals estimated by numerical differentiation; the returned
    allocation meets the budget within 1e-9 relative (with slack only
    when every marginal is exhausted first).

    Raises
    ------
    AllocationError
        If the multiplier bisection cannot meet the budget, which signals
        a non-concave input.
    """
    fns = list(per_carrier_bound)
    if not fns:
        raise ValueError("need at least one per-carrier bound")
    if total_snr < 0:
        raise ValueError("total_snr must be nonnegative")
    if total_snr == 0:
        return PowerAllocation((0.0,) * len(fns))

    marg0 = [max(0.0, _marginal(f, 0.0)) for f in fns]
    marg_cap = [_marginal(f, total_snr) for f in fns]

    def p_of(idx: int, lam: float) -> float:
        if marg0[idx] <= lam:
            return 0.0
        if marg_cap[idx] >= lam:
            return total_snr
        lo, hi = 0.0, total_snr
        f = fns[idx]
        for _ in range(_ALLOC_INNER_ITERS):
            mid = 0.5 * (lo + hi)
            if _marginal(f, mid) > lam:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def total_of(lam: float) -> tuple:
        alloc = [p_of(i, lam) for i in range(len(fns))]
        return sum(alloc), alloc

    lam_lo = 0.0
    spent, alloc = total_of(lam_lo)
    if spent <= total_snr * (1.0 + _ALLOC_BUDGET_RTOL):
        # marginals exhausted before the budget; leaving slack is optimal
        return PowerAllocation(tuple(alloc))
    lam_hi = max(marg0)

    best_over = (spent, alloc)
    for _ in range(_ALLOC_OUTER_ITERS):
        lam_mid = 0.5 * (lam_lo + lam_hi)
        spent, alloc = total_of(lam_mid)
        if spent >= total_snr:
            lam_lo = lam_mid
            best_over = (spent, alloc)
        else:
            lam_hi = lam_mid
        if lam_hi - lam_lo <= 1e-15 * max(lam_hi, 1e-300):
            break

    spent, alloc = best_over
    if spent > total_snr * (1.0 + 1e-6):
        raise AllocationError(
            f"allocation overshoots the budget by {spent - total_snr:.3g}; "
            "per-carrier bounds do not look concave"
        )
    if spent > total_snr:
        scale = total_snr / spent
        alloc = [p * scale for p in alloc]
    return PowerAllocation(tuple(alloc))


def ia_feasibility(channel: chan.ParallelChannel) -> Optional[BeamformingScheme]:
    """Try to align all interference on a two-carrier channel.

    Solves the alignment chain v3 ~ H23^-1 H21 v1, v2 ~ H32^-1 H31 v1;
    closing the chain at receiver 1 requires v1 to be an eigenvector of
    the diagonal map T = (H13 H23^-1 H21)^-1 H12 H32^-1 H31.  When T is a
    multiple of the identity (within a relative tolerance) any direction
    works and v1 = [1, 1]/sqrt(2) is picked; each combiner u_i is then
    the unit vector orthogonal to the aligned interference at receiver i,
    sign-fixed so the desired gain is positive.

    Returns None when T has distinct eigenvalues (the only eigenvectors
    are the coordinate axes, which collapse one carrier) or when some
    desired gain u_i . (H_ii v_i) vanishes.
    """
    chan.ensure_parallel_valid(channel)
    if channel.n_carriers != 2:
        raise ValueError("alignment feasibility is implemented for 2-carrier channels")

    d = {(i, j): channel.link_gains(i, j) for i in chan.USERS for j in chan.USERS}
    t = (d[(1, 2)] * d[(3, 1)] / d[(3, 2)]) * d[(2, 3)] / (d[(1, 3)] * d[(2, 1)])
    if abs(t[0] - t[1]) > ALIGNMENT_TOL * max(abs(t[0]), abs(t[1])):
        return None

    v1 = np.array([1.0, 1.0]) / np.sqrt(2.0)
    v2 = d[(3, 1)] / d[(3, 2)] * v1
    v2 = v2 / np.linalg.norm(v2)
    v3 = d[(2, 1)] / d[(2, 3)] * v1
    v3 = v3 / np.linalg.norm(v3)
    v = (v1, v2, v3)

    u = []
    for i in chan.USERS:
        j = min(x for x in chan.USERS if x != i)
        w = d[(i, j)] * v[j - 1]
        ui = np.array([-w[1], w[0]])
        ui = ui / np.linalg.norm(ui)
        gain = float(np.dot(ui, d[(i, i)] * v[i - 1]))
        if abs(gain) <= DESIRED_GAIN_TOL:
            return None
        if gain < 0:
            ui = -ui
        u.append(ui)

    return BeamformingScheme(tuple(tuple(x) for x in v), tuple(tuple(x) for x in u))


def sweep(channel: chan.ParallelChannel, snr_db_grid: Sequence[float]) -> list:
    """Joint TIN rate vs separate-encoding outerbound vs TDMA over an SNR grid.

    The joint curve uses the alignment scheme (when feasible) with an
    equal power split p_j = SNR/3, and falls back to the best TDMA rate
    otherwise.  If no separate-encoding bound applies to the channel the
    separate column is None and the note says so.
    """
    grid = [float(x) for x in snr_db_grid]
    if not grid:
        raise ValueError("snr_db_grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("snr_db_grid must be strictly increasing")

    # imported here: outerbounds builds on allocate_power from this module
    from .outerbounds import NoSeparateBoundError, separate_outerbound

    scheme = ia_feasibility(channel) if channel.n_carriers == 2 else None
    results = []
    for db in grid:
        snr = db_to_linear(db)
        tdma = max(tdma_rate(channel, i, snr).sum_rate for i in chan.USERS)
        if scheme is not None:
            joint = tin_rate(channel, scheme.with_equal_power(snr)).sum_rate
            note = "ia-zf-tin equal-power"
        else:
            joint = tdma
            note = "tdma-fallback no-ia"
        try:
            separate = separate_outerbound(channel, snr)
        except NoSeparateBoundError:
            separate = None
            note += " no-separate-bound"
        results.append(SweepResult(db, joint, separate, tdma, note))
    return results
