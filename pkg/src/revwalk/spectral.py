"""Spectral gaps, mixing times, and the reversibility-on-average sweep.

The pseudo-spectral gap max_k gamma(P^k (P*)^k)/k is evaluated through the
pi-symmetrized conjugate of P^k (P*)^k, which equals C C^T for C the curved
discriminant of P^k, so only a symmetric eigensolver is ever needed.

Worst-case total-variation and Hellinger distances to pi are non-increasing
in t, which lets mixing times be located by power doubling plus binary search
on exact dense matrix powers instead of a step-by-step scan; both searches
evaluate the same quantities and agree wherever the scan is feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discriminants import (
    Discriminant,
    flat_discriminant_of_power,
    geometric_rev_of,
    pi_average,
)
from .errors import (
    CriterionNotMet,
    DimensionMismatch,
    InvalidParameter,
    NotMixedWithin,
    NotPrimitive,
    NotReversible,
)
from .markov import Distribution, Kernel, check_stationary, classify

REVERSIBLE_TOL = 1e-8


@dataclass(frozen=True)
class SpectralReport:
    """Pseudo-spectral-gap summary; ``gamma`` is the gap of the multiplicative
    reversibilization at the maximizing power ``tau_rev``."""

    gamma: float
    gamma_inf: float
    tau_rev: int
    eigenvalues: np.ndarray
    saturated: bool


@dataclass(frozen=True)
class SweepRow:
    """One row of the reversibility sweep; spectral fields are None when the
    flat discriminant at this j is not primitive (ratio sentinel)."""

    j: int
    gamma_Q: float | None
    one_minus_piDpi: float
    lambda_max: float | None
    overlap: float | None
    ratio: float | None


def _gap_from_symmetric_eigenvalues(vals: np.ndarray) -> float:
    """1 - max |lambda| after removing one occurrence of the top eigenvalue."""
    mods = np.abs(vals)
    top = int(np.argmax(vals))
    rest = np.delete(mods, top)
    return float(1.0 - rest.max(initial=0.0))


def spectral_gap(P: Kernel, pi: Distribution) -> float:
    """Spectral gap of a reversible kernel, from diag(sqrt(pi)) P diag(sqrt(pi))^-1."""
    flux = pi.probs[:, None] * P.rows
    worst = np.abs(flux - flux.T).max()
    if worst > REVERSIBLE_TOL:
        raise NotReversible(f"detailed balance fails by {worst:.3e}")
    amp = pi.amp
    sym = (amp[:, None] * P.rows) / amp[None, :]
    sym = (sym + sym.T) / 2.0
    return _gap_from_symmetric_eigenvalues(np.linalg.eigvalsh(sym))


def pseudo_spectral_gap(P: Kernel, pi: Distribution, k_max: int = 64) -> SpectralReport:
    """max over 1 <= k <= k_max of gamma(P^k (P*)^k)/k and the smallest
    maximizing k; flags saturation when the maximizer sits at k_max."""
    if k_max < 1:
        raise InvalidParameter("k_max must be at least 1")
    check_stationary(P, pi)
    amp = pi.amp
    conj = (amp[:, None] * P.rows) / amp[None, :]
    power = np.eye(P.n)
    best_value, best_k, best_gamma, best_vals = -1.0, 1, 0.0, None
    for k in range(1, k_max + 1):
        power = power @ conj
        sym = power @ power.T
        sym = (sym + sym.T) / 2.0
        vals = np.linalg.eigvalsh(sym)
        gamma_k = _gap_from_symmetric_eigenvalues(vals)
        if gamma_k / k > best_value:
            best_value, best_k, best_gamma, best_vals = gamma_k / k, k, gamma_k, vals
    return SpectralReport(
        gamma=best_gamma,
        gamma_inf=best_value,
        tau_rev=best_k,
        eigenvalues=np.sort(best_vals)[::-1],
        saturated=best_k == k_max,
    )


def tv_distance(a: Distribution, b: Distribution) -> float:
    if a.n != b.n:
        raise DimensionMismatch("distributions live on different state spaces")
    return float(np.abs(a.probs - b.probs).sum() / 2.0)


def hellinger_affinity(a: Distribution, b: Distribution) -> float:
    """Sum of sqrt(a(x) b(x)); the Hellinger distance is sqrt(1 - affinity)."""
    if a.n != b.n:
        raise DimensionMismatch("distributions live on different state spaces")
    return float(np.sqrt(a.probs * b.probs).sum())


def _worst_tv(power: np.ndarray, pi: np.ndarray) -> float:
    return float(np.abs(power - pi[None, :]).sum(axis=1).max() / 2.0)


def _worst_hellinger(power: np.ndarray, pi: np.ndarray) -> float:
    affinity = np.sqrt(power * pi[None, :]).sum(axis=1)
    return float(np.sqrt(np.clip(1.0 - affinity, 0.0, None).max()))


def _first_time_below(P: Kernel, pi: Distribution, eps: float, t_max: int, worst) -> int:
    """Least t <= t_max with worst(P^t, pi) <= eps; worst is non-increasing in t."""
    if not 0.0 < eps < 1.0:
        raise InvalidParameter("eps must lie in (0, 1)")
    if t_max < 1:
        raise InvalidParameter("t_max must be at least 1")
    check_stationary(P, pi)
    rows, target = P.rows, pi.probs
    if worst(np.eye(P.n), target) <= eps:
        return 0
    # exponential doubling on cached squarings, then binary search
    squarings = [rows]
    t = 1
    while worst(squarings[-1], target) > eps:
        if t >= t_max:
            raise NotMixedWithin(t_max)
        squarings.append(squarings[-1] @ squarings[-1])
        t *= 2
    lo, hi = t // 2, t  # worst(lo) > eps >= worst(hi)

    def power_of(steps: int) -> np.ndarray:
        acc = None
        for bit, square in enumerate(squarings):
            if steps >> bit & 1:
                acc = square if acc is None else acc @ square
        return acc

    while hi - lo > 1:
        mid = (lo + hi) // 2
        if worst(power_of(mid), target) <= eps:
            hi = mid
        else:
            lo = mid
    if hi > t_max:
        raise NotMixedWithin(t_max)
    return hi


def mixing_time(P: Kernel, pi: Distribution, eps: float, t_max: int) -> int:
    """Least t with max-over-rows total-variation distance to pi at most eps."""
    return _first_time_below(P, pi, eps, t_max, _worst_tv)


def hellinger_mixing_time(P: Kernel, pi: Distribution, eps: float, t_max: int) -> int:
    """Least t with max-over-rows Hellinger distance to pi at most eps."""
    return _first_time_below(P, pi, eps, t_max, _worst_hellinger)


def mixing_gap_bounds_check(
    P: Kernel, pi: Distribution, eps: float, t_max: int, k_max: int = 64
) -> tuple[float, int, float]:
    """((1 - eps)/gamma_inf, tau(eps), (1 - ln(2 eps pi_min))/gamma_inf)."""
    report = pseudo_spectral_gap(P, pi, k_max)
    tau = mixing_time(P, pi, eps, t_max)
    lower = (1.0 - eps) / report.gamma_inf
    upper = (1.0 - math.log(2.0 * eps * pi.probs.min())) / report.gamma_inf
    return lower, tau, upper


def _sweep_row(j: int, D: Discriminant, pi: Distribution) -> SweepRow:
    one_minus = 1.0 - pi_average(D, pi)
    try:
        rev = geometric_rev_of(D)
    except NotPrimitive:
        return SweepRow(j, None, one_minus, None, None, None)
    vals = np.linalg.eigvalsh(D.entries)
    gamma_q = _gap_from_symmetric_eigenvalues(vals / rev.lambda_max)
    overlap = float(np.sqrt(pi.probs * rev.mu.probs).sum() ** 2)
    return SweepRow(j, gamma_q, one_minus, rev.lambda_max, overlap, one_minus / gamma_q)


def sweep(P: Kernel, pi: Distribution, j_max: int) -> list[SweepRow]:
    """Rows for j = 1..j_max: gap of Q_j, 1 - <pi|D_j|pi>, <mu|D_j|mu>, and
    the squared amplitude overlap of pi with mu_j; P^j is grown incrementally."""
    if j_max < 1:
        raise InvalidParameter("j_max must be at least 1")
    check_stationary(P, pi)
    rows = []
    power = P.rows
    for j in range(1, j_max + 1):
        rows.append(_sweep_row(j, flat_discriminant_of_power(power), pi))
        if j < j_max:
            power = power @ P.rows
    return rows


def reversibility_time(
    P: Kernel, pi: Distribution, rho: float, j_max: int
) -> tuple[int, list[SweepRow]]:
    """Least j <= j_max with D_j primitive and 1 - <pi|D_j|pi> <= rho * gamma(Q_j),
    together with every sweep row computed on the way there."""
    if not 0.0 < rho < 1.0:
        raise InvalidParameter("rho must lie in (0, 1)")
    if j_max < 1:
        raise InvalidParameter("j_max must be at least 1")
    check_stationary(P, pi)
    rows = []
    power = P.rows
    for j in range(1, j_max + 1):
        row = _sweep_row(j, flat_discriminant_of_power(power), pi)
        rows.append(row)
        if row.ratio is not None and row.ratio <= rho:
            return j, rows
        power = power @ P.rows
    raise CriterionNotMet(j_max)
