"""Discriminant matrices and the additive, multiplicative, and geometric
reversibilizations of a Markov kernel.

The flat discriminant sqrt(P(x,y) P(y,x)) is symmetric and shared by a kernel
and its time-reversal; the curved discriminant sqrt(P(x,y) P*(y,x)) is the
diag(sqrt(pi)) conjugate of P and therefore shares its spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidParameter, NotPrimitive
from .markov import (
    Distribution,
    Kernel,
    check_stationary,
    kernel_power,
    time_reversal,
)

SYMMETRY_TOL = 1e-12
EIGENVALUE_CROSSCHECK_TOL = 1e-10


@dataclass(frozen=True)
class Discriminant:
    """Nonnegative matrix with entries in [0, 1] and spectral norm at most 1."""

    n: int
    entries: np.ndarray
    flavor: str  # "flat" | "curved" | "cross"
    symmetric: bool

    def __post_init__(self):
        e = self.entries
        if e.max(initial=0.0) > 1.0 + SYMMETRY_TOL:
            raise InvalidParameter("discriminant entries must lie in [0, 1]")
        e.flags.writeable = False


@dataclass(frozen=True)
class GeometricRev:
    """Geometric reversibilization Q, its stationary law mu, and <mu|D|mu>."""

    Q: Kernel
    mu: Distribution
    lambda_max: float


def _make_discriminant(entries: np.ndarray, flavor: str) -> Discriminant:
    entries = np.clip(entries, 0.0, 1.0)
    symmetric = bool(np.abs(entries - entries.T).max() <= SYMMETRY_TOL)
    return Discriminant(entries.shape[0], entries, flavor, symmetric)


def cross_discriminant(P1: Kernel, P2: Kernel) -> Discriminant:
    """Entries sqrt(P1(x, y) P2(y, x))."""
    if P1.n != P2.n:
        raise DimensionMismatch("kernels must share a state space")
    return _make_discriminant(np.sqrt(P1.rows * P2.rows.T), "cross")


def flat_discriminant(P: Kernel, j: int = 1) -> Discriminant:
    """Flat discriminant of P^j; symmetric by construction."""
    Pj = kernel_power(P, j)
    d = cross_discriminant(Pj, Pj)
    return Discriminant(d.n, d.entries, "flat", True)


def flat_discriminant_of_power(power: np.ndarray) -> Discriminant:
    """Flat discriminant built from an already-computed dense kernel power."""
    return Discriminant(
        power.shape[0], np.clip(np.sqrt(power * power.T), 0.0, 1.0), "flat", True
    )


def curved_discriminant(P: Kernel, pi: Distribution, j: int = 1) -> Discriminant:
    """Curved discriminant of P^j, equal to diag(sqrt(pi)) P^j diag(sqrt(pi))^-1."""
    check_stationary(P, pi)
    Pj = kernel_power(P, j)
    d = cross_discriminant(Pj, time_reversal(Pj, pi))
    return Discriminant(d.n, d.entries, "curved", d.symmetric)


def additive_rev(P: Kernel, pi: Distribution) -> Kernel:
    """(P + P*) / 2: forward or backward in time with equal probabilities."""
    return Kernel((P.rows + time_reversal(P, pi).rows) / 2.0)


def multiplicative_rev(P: Kernel, pi: Distribution) -> Kernel:
    """P P*: one forward step followed by one backward step."""
    return Kernel(P.rows @ time_reversal(P, pi).rows)


def is_primitive(D: Discriminant) -> bool:
    """Wielandt test: the boolean support raised to (n-1)^2 + 1 is positive."""
    if not D.symmetric:
        raise InvalidParameter("primitivity is tested on flat (symmetric) discriminants")
    n = D.n
    power = (n - 1) ** 2 + 1
    acc = None
    base = (D.entries > 0.0).astype(float)
    e = power
    while e:
        if e & 1:
            acc = base if acc is None else ((acc @ base) > 0.0).astype(float)
        e >>= 1
        if e:
            base = ((base @ base) > 0.0).astype(float)
    return bool((acc > 0.0).all())


def most_reversible_distribution(D: Discriminant) -> tuple[Distribution, float]:
    """Squared Perron eigenvector of a primitive flat discriminant, with the
    top eigenvalue recomputed as a quadratic form and cross-checked."""
    if not is_primitive(D):
        raise NotPrimitive("the flat discriminant is not primitive")
    vals, vecs = np.linalg.eigh(D.entries)
    v = vecs[:, -1]
    if v.sum() < 0.0:
        v = -v
    if v.min() <= 0.0:
        raise NotPrimitive("Perron vector is not strictly positive")
    lam = float(v @ D.entries @ v)
    if abs(lam - vals[-1]) > EIGENVALUE_CROSSCHECK_TOL:
        raise NotPrimitive(
            f"quadratic form and eigenvalue disagree by {abs(lam - vals[-1]):.3e}"
        )
    return Distribution(v * v), lam


def geometric_rev(P: Kernel, j: int = 1) -> GeometricRev:
    """Q(x, y) = sqrt(mu(y)/mu(x)) D(x, y) / <mu|D|mu> for D the flat
    discriminant of P^j; Q is reversible with stationary distribution mu."""
    D = flat_discriminant(P, j)
    return geometric_rev_of(D)


def geometric_rev_of(D: Discriminant) -> GeometricRev:
    mu, lam = most_reversible_distribution(D)
    amp = mu.amp
    rows = (D.entries * (amp[None, :] / amp[:, None])) / lam
    return GeometricRev(Kernel(rows), mu, lam)


def pi_average(D: Discriminant, pi: Distribution) -> float:
    """<pi|D|pi> with |pi> the amplitude vector sqrt(pi)."""
    if pi.n != D.n:
        raise DimensionMismatch("distribution and discriminant sizes differ")
    amp = pi.amp
    return float(amp @ D.entries @ amp)


def group_deviation(P: Kernel) -> tuple[float, float]:
    """For a group walk: spectral-norm distance between the flat discriminant
    and the curved discriminant of the additive reversibilization, next to the
    matching quantity 1 - <pi|D|pi>; the two agree for random walks on groups."""
    if P.origin != "group":
        raise InvalidParameter("group deviation is defined for group walks")
    pi = Distribution(np.full(P.n, 1.0 / P.n))
    D = flat_discriminant(P, 1)
    DA = curved_discriminant(additive_rev(P, pi), pi, 1)
    lhs = float(np.linalg.norm(D.entries - DA.entries, 2))
    rhs = 1.0 - pi_average(D, pi)
    return lhs, rhs
