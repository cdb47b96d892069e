"""Finite Markov kernels, probability distributions, and their classification.

All quantities are dense numpy arrays; nothing here samples trajectories.
Kernels are immutable after construction and cache the classification flags
that do not depend on a stationary distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidParameter,
    InvalidProbability,
    NotAGroup,
    NotErgodic,
    NotStationary,
    NotStochastic,
    TooLarge,
)

ROW_SUM_TOL = 1e-9
NEG_ENTRY_TOL = 1e-12
STATIONARY_TOL = 1e-8
STATIONARY_RESIDUAL = 1e-10
DETAILED_BALANCE_TOL = 1e-10
MAX_KERNEL_N = 4096


def _clean_nonnegative(a: np.ndarray, what: str) -> np.ndarray:
    """Clamp float dust in [-NEG_ENTRY_TOL, 0) to zero; reject anything below."""
    if a.min(initial=0.0) < -NEG_ENTRY_TOL:
        raise NotStochastic(f"{what} has an entry below {-NEG_ENTRY_TOL}")
    return np.where(a < 0.0, 0.0, a)


class Kernel:
    """Row-stochastic transition matrix over n >= 2 states."""

    __slots__ = ("n", "rows", "origin", "_flags")

    def __init__(self, rows, origin: str | None = None):
        rows = np.array(rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {rows.shape}")
        n = rows.shape[0]
        if n < 2:
            raise InvalidParameter("a kernel needs at least 2 states")
        if n > MAX_KERNEL_N:
            raise TooLarge(f"n={n} exceeds the dense kernel cap {MAX_KERNEL_N}")
        rows = _clean_nonnegative(rows, "kernel")
        sums = rows.sum(axis=1)
        worst = np.abs(sums - 1.0).max()
        if worst > ROW_SUM_TOL:
            raise NotStochastic(f"row sums deviate from 1 by {worst:.3e}")
        rows.flags.writeable = False
        self.n = n
        self.rows = rows
        self.origin = origin
        self._flags = None

    def __repr__(self):
        return f"Kernel(n={self.n}, origin={self.origin!r})"


class Distribution:
    """Probability vector; ``amp`` is the entrywise square root."""

    __slots__ = ("n", "probs")

    def __init__(self, probs):
        probs = np.array(probs, dtype=float)
        if probs.ndim != 1:
            raise DimensionMismatch("a distribution must be a vector")
        probs = _clean_nonnegative(probs, "distribution")
        total = probs.sum()
        if abs(total - 1.0) > ROW_SUM_TOL:
            raise InvalidParameter(f"probabilities sum to {total}, not 1")
        probs = probs / total
        probs.flags.writeable = False
        self.n = probs.shape[0]
        self.probs = probs

    @property
    def amp(self) -> np.ndarray:
        return np.sqrt(self.probs)

    def __repr__(self):
        return f"Distribution(n={self.n})"


@dataclass(frozen=True)
class KernelClass:
    """Classification flags; ``aperiodic`` and ``reversible`` may be undefined (None)."""

    irreducible: bool
    aperiodic: bool | None
    ergodic: bool
    reversible: bool | None
    lazy: bool


def kernel_from_rows(matrix) -> Kernel:
    """Validate a raw matrix into a Kernel."""
    return Kernel(matrix)


def circle_walk(n: int, p_forward: float, p_backward: float) -> Kernel:
    """Walk on the n-point discrete circle: forward, backward, or stay."""
    if n < 3:
        raise InvalidParameter("circle walks need n >= 3")
    if min(p_forward, p_backward) < 0.0:
        raise InvalidProbability("step probabilities must be nonnegative")
    if p_forward + p_backward > 1.0 + 1e-12:
        raise InvalidProbability("p_forward + p_backward exceeds 1")
    stay = max(1.0 - p_forward - p_backward, 0.0)
    rows = np.zeros((n, n))
    idx = np.arange(n)
    rows[idx, (idx + 1) % n] += p_forward
    rows[idx, (idx - 1) % n] += p_backward
    rows[idx, idx] += stay
    return Kernel(rows, origin="circle")


def bottleneck_graph(N: int) -> Kernel:
    """Two biased circles of odd size N joined through a rarely-visited bridge state.

    States are ordered (0..N-1, bridge, N..2N-1): circle one occupies indices
    0..N-1, the bridge sits at index N, circle two at indices N+1..2N.  Interior
    circle states move forward with probability 3/4 and backward with 1/4; the
    two gateway states (index 0 and index N+1) send 1/N^3 to the bridge and
    scale their circle moves by (1 - 1/N^3); the bridge jumps to either gateway
    with probability 1/2.
    """
    if N < 3 or N % 2 == 0:
        raise InvalidParameter("bottleneck graphs need odd N >= 3")
    n = 2 * N + 1
    bridge = N
    leak = 1.0 / N**3
    rows = np.zeros((n, n))

    def circle_index(which: int, x: int) -> int:
        return x % N if which == 0 else N + 1 + (x % N)

    for which in (0, 1):
        gate = circle_index(which, 0)
        for x in range(N):
            i = circle_index(which, x)
            fwd, bwd = circle_index(which, x + 1), circle_index(which, x - 1)
            if i == gate:
                rows[i, bridge] = leak
                rows[i, fwd] += (1.0 - leak) * 0.75
                rows[i, bwd] += (1.0 - leak) * 0.25
            else:
                rows[i, fwd] += 0.75
                rows[i, bwd] += 0.25
    rows[bridge, circle_index(0, 0)] = 0.5
    rows[bridge, circle_index(1, 0)] = 0.5
    return Kernel(rows, origin="bottleneck")


def _check_group_table(table: np.ndarray) -> int:
    """Verify group axioms on a multiplication table; return the identity index."""
    n = table.shape[0]
    if table.ndim != 2 or table.shape[1] != n:
        raise NotAGroup("multiplication table must be square")
    if table.min() < 0 or table.max() >= n:
        raise NotAGroup("table entries must index group elements")
    idx = np.arange(n)
    identity = None
    for e in range(n):
        if np.array_equal(table[e], idx) and np.array_equal(table[:, e], idx):
            identity = e
            break
    if identity is None:
        raise NotAGroup("no identity element")
    for i in range(n):
        j = np.where(table[i] == identity)[0]
        if j.size == 0 or table[j[0], i] != identity:
            raise NotAGroup(f"element {i} has no two-sided inverse")
    if n <= 64:
        left = table[table]            # [a, b, c] -> (a o b) o c
        right = table[:, table]        # [a, b, c] -> a o (b o c)
        if not np.array_equal(left, right):
            raise NotAGroup("associativity fails")
    else:
        rng = np.random.default_rng(0)
        a, b, c = rng.integers(0, n, size=(3, 10000))
        if not np.array_equal(table[table[a, b], c], table[a, table[b, c]]):
            raise NotAGroup("associativity fails on sampled triples")
    return identity


def group_walk(multiplication_table, increment_law: Distribution) -> Kernel:
    """Random walk on a finite group: P(x, y) = increment_law(y o x^-1)."""
    table = np.asarray(multiplication_table, dtype=int)
    identity = _check_group_table(table)
    n = table.shape[0]
    if increment_law.n != n:
        raise DimensionMismatch("increment law size must match the group order")
    inv = np.empty(n, dtype=int)
    for i in range(n):
        inv[i] = np.where(table[i] == identity)[0][0]
    nu = increment_law.probs
    rows = np.empty((n, n))
    for x in range(n):
        rows[x] = nu[table[:, inv[x]]]
    return Kernel(rows, origin="group")


def cyclic_group_table(n: int) -> np.ndarray:
    """Multiplication table of the cyclic group Z_n."""
    idx = np.arange(n)
    return (idx[:, None] + idx[None, :]) % n


def cyclic_walk(n: int, increments: dict[int, float]) -> Kernel:
    """Walk on Z_n with the given signed-increment law, e.g. {1: 3/4, -1: 1/4}."""
    if n < 2:
        raise InvalidParameter("cyclic walks need n >= 2")
    nu = np.zeros(n)
    for step, p in increments.items():
        nu[int(step) % n] += p
    return group_walk(cyclic_group_table(n), Distribution(nu))


def perfectly_mixed(pi: Distribution) -> Kernel:
    """Kernel whose every row equals pi; one step lands exactly at pi."""
    if pi.probs.min() <= 0.0:
        raise InvalidParameter("perfectly mixed kernels need strictly positive pi")
    rows = np.tile(pi.probs, (pi.n, 1))
    return Kernel(rows, origin="mixed")


def lazy(P: Kernel) -> Kernel:
    """(I + P) / 2, which stays put with probability at least 1/2."""
    return Kernel((np.eye(P.n) + P.rows) / 2.0, origin=P.origin)


def kernel_power(P: Kernel, j: int) -> Kernel:
    """Exact dense j-th power via repeated squaring; never renormalized."""
    if j < 1:
        raise InvalidParameter("kernel powers need j >= 1")
    if j == 1:
        return P
    return Kernel(np.linalg.matrix_power(P.rows, j))


def _support_flags(P: Kernel) -> tuple[bool, bool | None, bool]:
    """(irreducible, aperiodic-or-None, lazy), cached on the kernel."""
    if P._flags is not None:
        return P._flags
    support = P.rows > 0.0
    n = P.n
    reach = support | np.eye(n, dtype=bool)
    # boolean transitive closure by repeated squaring
    for _ in range(max(1, math.ceil(math.log2(n)))):
        nxt = reach | (reach.astype(float) @ reach.astype(float) > 0.0)
        if np.array_equal(nxt, reach):
            break
        reach = nxt
    irreducible = bool(reach.all())
    aperiodic: bool | None
    if irreducible:
        # period = gcd over support edges (u, v) of dist[u] + 1 - dist[v],
        # with dist the BFS levels from state 0
        dist = np.full(n, -1, dtype=int)
        dist[0] = 0
        frontier = np.array([0])
        while frontier.size:
            hit = support[frontier].any(axis=0) & (dist < 0)
            dist[hit] = dist[frontier[0]] + 1
            frontier = np.nonzero(hit)[0]
        us, vs = np.nonzero(support)
        aperiodic = int(np.gcd.reduce(dist[us] + 1 - dist[vs])) == 1
    else:
        aperiodic = None
    lazy_flag = bool(np.diag(P.rows).min() >= 0.5 - 1e-12)
    P._flags = (irreducible, aperiodic, lazy_flag)
    return P._flags


def classify(P: Kernel, pi: Distribution | None = None) -> KernelClass:
    """Irreducibility, aperiodicity (undefined for reducible kernels),
    ergodicity, laziness, and detailed balance when pi is supplied."""
    irreducible, aperiodic, lazy_flag = _support_flags(P)
    ergodic = irreducible and aperiodic is True
    reversible: bool | None = None
    if pi is not None:
        flux = pi.probs[:, None] * P.rows
        reversible = bool(np.abs(flux - flux.T).max() <= DETAILED_BALANCE_TOL)
    return KernelClass(irreducible, aperiodic, ergodic, reversible, lazy_flag)


def is_ergodic(P: Kernel) -> bool:
    irreducible, aperiodic, _ = _support_flags(P)
    return irreducible and aperiodic is True


def stationary_distribution(P: Kernel) -> Distribution:
    """Solve pi P = pi, sum(pi) = 1 by a direct dense solve plus one
    iterative-refinement step; raises NotErgodic when the chain is not ergodic."""
    if not is_ergodic(P):
        raise NotErgodic("stationary distributions are computed for ergodic kernels only")
    n = P.n
    M = P.rows.T - np.eye(n)
    M[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    x = np.linalg.solve(M, b)
    x += np.linalg.solve(M, b - M @ x)
    x = x / x.sum()
    residual = np.abs(x @ P.rows - x).max()
    if residual > STATIONARY_RESIDUAL or x.min() <= 0.0:
        raise NotErgodic(f"stationary solve failed (residual {residual:.3e})")
    return Distribution(x)


def check_stationary(P: Kernel, pi: Distribution, tol: float = STATIONARY_TOL) -> None:
    """Raise NotStationary unless ||pi P - pi||_inf <= tol."""
    if pi.n != P.n:
        raise DimensionMismatch("distribution and kernel sizes differ")
    residual = np.abs(pi.probs @ P.rows - pi.probs).max()
    if residual > tol:
        raise NotStationary(f"pi is not stationary (residual {residual:.3e})")


def time_reversal(P: Kernel, pi: Distribution) -> Kernel:
    """Adjoint kernel P*(x, y) = pi(y) P(y, x) / pi(x)."""
    if pi.probs.min() <= 0.0:
        raise InvalidParameter("time reversal needs strictly positive pi")
    check_stationary(P, pi)
    rows = (P.rows.T * pi.probs[None, :]) / pi.probs[:, None]
    return Kernel(rows)
