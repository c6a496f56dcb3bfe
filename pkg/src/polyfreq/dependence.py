"""Coupled-trajectory construction and dependence-decay estimation.

The dependence of a stationary causal process on a single innovation is
measured by coupling: run the process to time -1, then branch into two
trajectories that share every innovation except the one at time 0, which
the coupled copy replaces with an independent draw.  The lag-k dependence
coefficient is the standard deviation of the difference between the two
trajectories at time k; summability of these coefficients over k is the
short-range dependence certificate the estimators in this package rely on.

Replications are independent streams seeded ``base + index``, and all
aggregation is a fixed-order reduction, so results do not depend on how
replications are scheduled or batched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import signal

from .models import (
    ArmaModel,
    LinearProcess,
    Model,
    NlarModel,
    TarModel,
    default_burn_in,
    make_rng,
    require_valid,
    tar_transition,
)

__all__ = [
    "CoupledPair",
    "DeltaEstimate",
    "SummabilityReport",
    "simulate_coupled",
    "coupled_paths",
    "estimate_delta",
    "estimate_delta_profile",
    "check_summability",
    "deltas_to_csv",
]


@dataclass(frozen=True)
class CoupledPair:
    """Two trajectories over times 0..lag sharing all innovations but the first.

    ``path[j]`` and ``coupled_path[j]`` hold the original and coupled values
    at time ``j``; they are driven by identical innovations at times 1..lag
    and differ only through the time-0 innovation.
    """

    lag: int
    path: np.ndarray
    coupled_path: np.ndarray

    def difference(self, k: int | None = None) -> float:
        k = self.lag if k is None else k
        return float(self.path[k] - self.coupled_path[k])


@dataclass(frozen=True)
class DeltaEstimate:
    """Monte Carlo estimate of one lag's dependence coefficient."""

    lag: int
    delta_hat: float
    std_error: float
    replications: int


def _coupled_batch(model: Model, lag: int, seeds: Sequence[int],
                   burn_in: int | None, swap: bool) -> tuple[np.ndarray, np.ndarray]:
    """Coupled trajectories for many replications; rows follow ``seeds`` order.

    Stream layout per replication: one initial variate, ``burn_in - 1``
    burn-in innovations (reaching the shared time -1 state), the time-0
    innovation, its independent replacement, then the shared innovations
    for times 1..lag.  The layout's dependence on ``lag`` sits entirely at
    the tail, so trajectories for smaller lags are prefixes of larger ones.
    """
    require_valid(model)
    if lag < 0:
        raise ValueError(f"lag must be nonnegative, got {lag}")
    floor = default_burn_in(model) if not isinstance(model, LinearProcess) else 0
    if burn_in is None:
        burn_in = max(floor, 1)
    elif burn_in < floor:
        raise ValueError(f"burn_in {burn_in} is below the model's default {floor}")

    reps = len(seeds)
    if isinstance(model, LinearProcess):
        k_ma = model.order
        width = k_ma + lag + 2
    else:
        width = burn_in + lag + 2
    draws = np.empty((reps, width))
    for i, s in enumerate(seeds):
        draws[i] = model.noise.sample(make_rng(s), width)

    if isinstance(model, LinearProcess):
        # columns: [eps_{-order}..eps_{-1} | eps_0 | eps_0' | eps_1..eps_lag]
        base, alt = draws[:, k_ma], draws[:, k_ma + 1]
        if swap:
            base, alt = alt, base
        shared = draws[:, k_ma + 2 :]
        eps_a = np.concatenate([draws[:, :k_ma], base[:, None], shared], axis=1)
        eps_b = np.concatenate([draws[:, :k_ma], alt[:, None], shared], axis=1)
        coeffs = np.asarray(model.coeffs)[::-1]
        win_a = np.lib.stride_tricks.sliding_window_view(eps_a, k_ma + 1, axis=1)
        win_b = np.lib.stride_tricks.sliding_window_view(eps_b, k_ma + 1, axis=1)
        return model.mean + win_a @ coeffs, model.mean + win_b @ coeffs

    # columns: [initial | burn-in eps (burn_in - 1) | eps_0 | eps_0' | eps_1..eps_lag]
    e0, e0p = draws[:, burn_in].copy(), draws[:, burn_in + 1].copy()
    if swap:
        e0, e0p = e0p, e0
    shared = draws[:, burn_in + 2 :]

    if isinstance(model, ArmaModel):
        mean = model.intercept / (1.0 - sum(model.ar)) if model.p else model.intercept
        if max(model.p, model.q) == 0:
            path_a = mean + np.concatenate([e0[:, None], shared], axis=1)
            path_b = mean + np.concatenate([e0p[:, None], shared], axis=1)
            return path_a, path_b
        b_poly = np.array([1.0, *model.ma])
        a_poly = np.array([1.0, *(-a for a in model.ar)])
        zi_unit = signal.lfiltic(b_poly, a_poly, [1.0])
        zi = (draws[:, 0] - mean)[:, None] * zi_unit[None, :]
        _, z_shared = signal.lfilter(b_poly, a_poly, draws[:, 1:burn_in], axis=1, zi=zi)
        ya, _ = signal.lfilter(
            b_poly, a_poly, np.concatenate([e0[:, None], shared], axis=1), axis=1, zi=z_shared
        )
        yb, _ = signal.lfilter(
            b_poly, a_poly, np.concatenate([e0p[:, None], shared], axis=1), axis=1, zi=z_shared
        )
        return ya + mean, yb + mean

    r = tar_transition(model) if isinstance(model, TarModel) else model.transition
    state = draws[:, 0]
    for t in range(1, burn_in):
        state = np.asarray(r(state), dtype=float) + draws[:, t]
    path_a = np.empty((reps, lag + 1))
    path_b = np.empty((reps, lag + 1))
    drift = np.asarray(r(state), dtype=float)
    path_a[:, 0] = drift + e0
    path_b[:, 0] = drift + e0p
    for j in range(1, lag + 1):
        e = shared[:, j - 1]
        path_a[:, j] = np.asarray(r(path_a[:, j - 1]), dtype=float) + e
        path_b[:, j] = np.asarray(r(path_b[:, j - 1]), dtype=float) + e
    return path_a, path_b


def coupled_paths(model: Model, lag: int, seeds: Sequence[int],
                  burn_in: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Batched coupled trajectories, one row per replication seed."""
    return _coupled_batch(model, lag, seeds, burn_in, swap=False)


def simulate_coupled(model: Model, lag: int, seed: int = 0, burn_in: int | None = None,
                     swap_innovations: bool = False) -> CoupledPair:
    """One coupled trajectory pair.

    With ``swap_innovations`` the time-0 innovation and its replacement
    trade places while every other draw stays put, exactly exchanging the
    roles of the two trajectories.
    """
    a, b = _coupled_batch(model, lag, [seed], burn_in, swap=swap_innovations)
    return CoupledPair(lag=lag, path=a[0], coupled_path=b[0])


def _delta_from_diffs(lag: int, diffs: np.ndarray) -> DeltaEstimate:
    # two-pass (mean-subtracted) variance: the coefficients span many orders
    # of magnitude and a streaming sum of squares would lose the small ones.
    reps = diffs.size
    centered = diffs - diffs.mean()
    var = float(centered @ centered) / (reps - 1)
    delta = math.sqrt(var)
    m4 = float(np.mean(centered**4))
    se_var = math.sqrt(max(m4 - var**2, 0.0) / reps)
    se = se_var / (2.0 * delta) if delta > 0 else 0.0
    return DeltaEstimate(lag=lag, delta_hat=delta, std_error=se, replications=reps)


def estimate_delta(model: Model, lag: int, replications: int, seed: int = 0,
                   burn_in: int | None = None) -> DeltaEstimate:
    """Dependence coefficient at one lag from independent coupled replications."""
    if replications < 100:
        raise ValueError(f"need at least 100 replications, got {replications}")
    seeds = [seed + i for i in range(replications)]
    a, b = _coupled_batch(model, lag, seeds, burn_in, swap=False)
    return _delta_from_diffs(lag, a[:, lag] - b[:, lag])


def estimate_delta_profile(model: Model, max_lag: int, replications: int, seed: int = 0,
                           burn_in: int | None = None) -> list[DeltaEstimate]:
    """Dependence coefficients for all lags 0..max_lag from one batch.

    Because the coupled stream layout is lag-extensible, entry ``k`` equals
    ``estimate_delta(model, k, replications, seed)`` exactly.
    """
    if replications < 100:
        raise ValueError(f"need at least 100 replications, got {replications}")
    seeds = [seed + i for i in range(replications)]
    a, b = _coupled_batch(model, max_lag, seeds, burn_in, swap=False)
    diffs = a - b
    return [_delta_from_diffs(k, diffs[:, k]) for k in range(max_lag + 1)]


@dataclass(frozen=True)
class SummabilityReport:
    """Evidence that the dependence coefficients are geometrically summable.

    ``slope`` is the least-squares decay rate of ``log(delta_hat)`` over the
    lags whose estimates clear the noise floor (5 standard errors); the
    certificate total combines the measured partial sum with a geometric
    tail bound driven by the supplied contraction rate.
    """

    slope: float | None
    slope_target: float | None
    slope_tolerance: float
    decay_ok: bool | None
    used_lags: tuple[int, ...]
    partial_sum: float
    tail_bound: float | None
    certificate_total: float | None
    conclusive: bool


def check_summability(deltas: Sequence[DeltaEstimate], contraction: float,
                      slope_tolerance: float = 0.05) -> SummabilityReport:
    """Fit the decay rate of estimated dependence coefficients.

    ``deltas`` must cover consecutive lags starting at 0.  Lags whose
    estimates sit below 5 standard errors are excluded from the log-linear
    fit; if no lag beyond 0 clears the floor the report is inconclusive
    (an i.i.d.-like outcome, not an error).
    """
    if not deltas or any(d.lag != k for k, d in enumerate(deltas)):
        raise ValueError("deltas must cover consecutive lags starting at 0")
    if not (0.0 <= contraction < 1.0):
        raise ValueError(f"contraction must lie in [0, 1), got {contraction}")

    usable = [d for d in deltas if d.delta_hat > 5.0 * d.std_error and d.delta_hat > 0.0]
    used_lags = tuple(d.lag for d in usable)
    last = max(used_lags, default=0)
    partial = float(sum(d.delta_hat for d in deltas if d.lag <= last))
    delta_last = deltas[last].delta_hat
    tail = delta_last * contraction / (1.0 - contraction)

    slope = None
    decay_ok = None
    target = math.log(contraction) if contraction > 0.0 else None
    if len(usable) >= 2:
        ks = np.array([d.lag for d in usable], dtype=float)
        logs = np.log([d.delta_hat for d in usable])
        slope = float(np.polyfit(ks, logs, 1)[0])
        if target is not None:
            decay_ok = slope <= target + slope_tolerance
    conclusive = any(k >= 1 for k in used_lags) and len(usable) >= 2
    return SummabilityReport(
        slope=slope,
        slope_target=target,
        slope_tolerance=slope_tolerance,
        decay_ok=decay_ok,
        used_lags=used_lags,
        partial_sum=partial,
        tail_bound=tail,
        certificate_total=partial + tail,
        conclusive=conclusive,
    )


def deltas_to_csv(deltas: Sequence[DeltaEstimate]) -> str:
    """Serialize estimates as ``k, delta_hat, std_error, replications`` rows."""
    lines = ["k,delta_hat,std_error,replications"]
    for d in deltas:
        lines.append(
            f"{d.lag},{format(d.delta_hat, '.17g')},{format(d.std_error, '.17g')},{d.replications}"
        )
    return "\n".join(lines) + "\n"
