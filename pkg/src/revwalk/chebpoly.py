"""Chebyshev-basis polynomial algebra for eigenvalue and singular value filters.

Compositions and argument scalings are expanded with exact coefficient algebra
on the product rule T_m T_n = (T_{m+n} + T_{|m-n|})/2 (numpy's Chebyshev
arithmetic), never by sampling.  The leading-eigenvalue-selection polynomial is
the one construction fitted numerically: a linear program picks the smallest
degree whose two-band minimax error clears the requested level, and a dense
grid check is the acceptance oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from scipy.optimize import linprog

from .errors import (
    ConstructionFailed,
    DomainError,
    InvalidParameter,
    NormTooLarge,
    NotEvenParity,
    NotSymmetric,
)

COEFF_TOL = 1e-14
VERIFY_GRID = 10_000


@dataclass(frozen=True)
class ChebyshevPoly:
    """Real polynomial sum_n coeffs[n] T_n(x) with degree and parity metadata."""

    coeffs: np.ndarray
    degree: int
    parity: str  # "even" | "odd" | "mixed"

    def __call__(self, x):
        return cheb_eval(self, x)


def cheb_poly(coeffs) -> ChebyshevPoly:
    """Normalize raw coefficients: trim trailing dust, detect parity."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    last = len(c) - 1
    while last > 0 and abs(c[last]) <= COEFF_TOL:
        last -= 1
    c = c[: last + 1].copy()
    even_part = np.abs(c[0::2]).max(initial=0.0)
    odd_part = np.abs(c[1::2]).max(initial=0.0)
    if odd_part <= COEFF_TOL:
        parity = "even"
    elif even_part <= COEFF_TOL:
        parity = "odd"
    else:
        parity = "mixed"
    c.flags.writeable = False
    return ChebyshevPoly(c, len(c) - 1, parity)


def chebyshev_t(n: int) -> ChebyshevPoly:
    """The basis polynomial T_n."""
    if n < 0:
        raise DomainError("T_n needs n >= 0")
    c = np.zeros(n + 1)
    c[n] = 1.0
    return cheb_poly(c)


def cheb_eval(p: ChebyshevPoly, x):
    """Clenshaw evaluation; the recurrence is valid for all real x."""
    return _cheb.chebval(x, p.coeffs)


def cheb_compose(outer: ChebyshevPoly, inner: ChebyshevPoly) -> ChebyshevPoly:
    """Chebyshev coefficients of outer(inner(x)) via the T_k(inner) ladder."""
    oc, ic = outer.coeffs, inner.coeffs
    t_prev = np.array([1.0])
    acc = oc[0] * t_prev
    if len(oc) > 1:
        t_cur = ic.copy()
        acc = _cheb.chebadd(acc, oc[1] * t_cur)
        for k in range(2, len(oc)):
            t_next = _cheb.chebsub(2.0 * _cheb.chebmul(ic, t_cur), t_prev)
            acc = _cheb.chebadd(acc, oc[k] * t_next)
            t_prev, t_cur = t_cur, t_next
    return cheb_poly(acc)


def cheb_T_fractional(y: float, x) -> float:
    """T_y(x) = cosh(y * arccosh(x)) for x >= 1 and 0 < y <= 1."""
    if not 0.0 < y <= 1.0:
        raise DomainError("fractional order must lie in (0, 1]")
    if np.min(x) < 1.0:
        raise DomainError("fractional Chebyshev values need x >= 1")
    return np.cosh(y * np.arccosh(x))


def delta_k(eps: float, k: int) -> float:
    """(T_{1/k}(1/eps) - 1) / T_{1/k}(1/eps); strictly decreasing in k."""
    if not 0.0 < eps < 1.0:
        raise DomainError("eps must lie in (0, 1)")
    if k < 1:
        raise DomainError("k must be a positive integer")
    t = float(cheb_T_fractional(1.0 / k, 1.0 / eps))
    return (t - 1.0) / t


def degree_for_gap(eps: float, gap: float) -> int:
    """Least degree d with delta_k(eps, d) <= gap, so the flat band of the
    fast-forwarding polynomial reaches up to 1 - gap."""
    if not 0.0 < eps < 1.0:
        raise DomainError("eps must lie in (0, 1)")
    if gap <= 0.0:
        raise DomainError("gap must be positive")
    if gap >= delta_k(eps, 1):
        return 1
    guess = math.acosh(1.0 / eps) / math.acosh(1.0 / (1.0 - gap))
    d = max(1, math.ceil(guess) - 1)
    while delta_k(eps, d) > gap:
        d += 1
    return d


def fast_forward_poly(eps: float, d: int) -> ChebyshevPoly:
    """eps * T_d(x * T_{1/d}(1/eps)): value 1 at x = 1, at most eps on the wide
    inner interval [-1 + delta_d, 1 - delta_d], and max 1 on [-1, 1]."""
    if not 0.0 < eps <= 1.0:
        raise DomainError("eps must lie in (0, 1]")
    if d < 1:
        raise DomainError("degree must be at least 1")
    t = float(np.cosh(np.arccosh(1.0 / eps) / d)) if eps < 1.0 else 1.0
    scaled = cheb_compose(chebyshev_t(d), cheb_poly([0.0, t]))
    return cheb_poly(eps * scaled.coeffs)


def _golden_max(f, lo: float, hi: float, iters: int = 80) -> float:
    """Golden-section polish for a local maximum of f on [lo, hi]."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return max(fc, fd, f((a + b) / 2.0))


def scaling_factor(p: ChebyshevPoly, grid_size: int = 8192) -> float:
    """Unit-circle maximum of the signal polynomial sum a_n z^n divided by the
    [-1, 1] maximum of p, with both grid maxima refined locally."""
    grid_size = max(int(grid_size), 1024)
    coeffs = p.coeffs

    def circle_mod(theta):
        z = np.exp(1j * np.asarray(theta, dtype=float))
        return np.abs(np.polynomial.polynomial.polyval(z, coeffs))

    thetas = np.linspace(0.0, 2.0 * math.pi, grid_size, endpoint=False)
    mods = circle_mod(thetas)
    best = int(np.argmax(mods))
    h = 2.0 * math.pi / grid_size
    circle_max = _golden_max(lambda t: float(circle_mod(t)), thetas[best] - h, thetas[best] + h)

    xs = np.linspace(-1.0, 1.0, grid_size + 1)
    vals = np.abs(_cheb.chebval(xs, coeffs))
    best = int(np.argmax(vals))
    h = 2.0 / grid_size
    lo, hi = max(-1.0, xs[best] - h), min(1.0, xs[best] + h)
    interval_max = _golden_max(lambda x: abs(float(_cheb.chebval(x, coeffs))), lo, hi)
    return circle_max / interval_max


def _selection_lp(degree: int, eps: float) -> tuple[np.ndarray, float] | None:
    """Minimax fit of the two-band step at a fixed degree: |q| minimal on
    [-1, 1/4], q within the same distance of 1 on [3/4, 1], |q| <= 1 overall.
    Returns (coefficients, achieved level) or None when the LP fails."""

    def cos_grid(a: float, b: float, m: int) -> np.ndarray:
        return (a + b) / 2.0 + (b - a) / 2.0 * np.cos(np.linspace(0.0, math.pi, m))

    m = 6 * (degree + 8)
    low = _cheb.chebvander(cos_grid(-1.0, 0.25, m), degree)
    high = _cheb.chebvander(cos_grid(0.75, 1.0, m), degree)
    full = _cheb.chebvander(cos_grid(-1.0, 1.0, 2 * m), degree)
    blocks = [
        np.hstack([low, -np.ones((m, 1))]),        # q <= t on the low band
        np.hstack([-low, -np.ones((m, 1))]),       # -q <= t
        np.hstack([-high, -np.ones((m, 1))]),      # 1 - q <= t on the high band
        np.hstack([full, np.zeros((2 * m, 1))]),   # q <= 1 everywhere
        np.hstack([-full, np.zeros((2 * m, 1))]),  # -q <= 1
    ]
    b_ub = np.concatenate(
        [np.zeros(m), np.zeros(m), -np.ones(m), np.ones(2 * m), np.ones(2 * m)]
    )
    c = np.zeros(degree + 2)
    c[-1] = 1.0
    res = linprog(
        c,
        A_ub=np.vstack(blocks),
        b_ub=b_ub,
        bounds=[(None, None)] * (degree + 1) + [(0.0, None)],
        method="highs",
    )
    if not res.success:
        return None
    return res.x[:-1], float(res.x[-1])


def _verify_selection(coeffs: np.ndarray, eps: float) -> bool:
    xs = np.linspace(-1.0, 1.0, VERIFY_GRID)
    vals = _cheb.chebval(xs, coeffs)
    if np.abs(vals).max() > 1.0:
        return False
    if np.abs(vals[xs <= 0.25]).max() > eps:
        return False
    return bool(vals[xs >= 0.75].min() >= 1.0 - eps)


def selection_poly(eps: float) -> ChebyshevPoly:
    """Smallest-degree polynomial with |q| <= 1 on [-1, 1], |q| <= eps on
    [-1, 1/4], and q >= 1 - eps on [3/4, 1], verified on a dense grid."""
    if not 0.0 < eps < 0.5:
        raise DomainError("eps must lie in (0, 1/2)")
    cap = 48
    for _ in range(5):
        for degree in range(1, cap + 1):
            fit = _selection_lp(degree, eps)
            if fit is None or fit[1] > 0.92 * eps:
                continue
            if _verify_selection(fit[0], eps):
                return cheb_poly(fit[0])
        cap *= 2
    raise ConstructionFailed(f"no selection polynomial found for eps={eps}")


def selection_window(k: int) -> tuple[float, float, float]:
    """For the degree-k fast-forwarding polynomial at eps = 1/4: its band
    half-width delta_k, the largest preimage y_k of 3/4, and the measured
    constant c_k = (1 - y_k)/delta_k."""
    if k < 1 or k % 2 == 0:
        raise InvalidParameter("the selection window is measured for odd k")
    dk = delta_k(0.25, k)
    upsilon = fast_forward_poly(0.25, k)
    lo, hi = 1.0 - dk, 1.0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if cheb_eval(upsilon, mid) < 0.75:
            lo = mid
        else:
            hi = mid
    y_k = (lo + hi) / 2.0
    return dk, y_k, (1.0 - y_k) / dk


def compose_selection(k: int, eps: float) -> ChebyshevPoly:
    """q_eps composed with the degree-k fast-forwarding polynomial at 1/4:
    bounded by 1 on [-1, 1], by eps on [-1, 1 - delta_k], and at least
    1 - eps on [1 - c_k delta_k, 1] for the measured constant c_k."""
    if k < 1 or k % 2 == 0:
        raise InvalidParameter("composition is defined for odd k")
    if not 0.0 < eps < 0.5:
        raise DomainError("eps must lie in (0, 1/2)")
    dk, y_k, _ = selection_window(k)
    q = selection_poly(eps)
    r = cheb_compose(q, fast_forward_poly(0.25, k))
    xs = np.linspace(-1.0, 1.0, VERIFY_GRID)
    vals = cheb_eval(r, xs)
    ok = (
        np.abs(vals).max() <= 1.0 + 1e-12
        and np.abs(vals[xs <= 1.0 - dk]).max() <= eps
        and cheb_eval(r, np.linspace(y_k, 1.0, 512)).min() >= 1.0 - eps
    )
    if not ok:
        raise ConstructionFailed(f"composite selection failed grid checks (k={k}, eps={eps})")
    return r


def apply_to_symmetric(p: ChebyshevPoly, M: np.ndarray) -> np.ndarray:
    """V p(Lambda) V^T from a symmetric eigendecomposition of M."""
    M = np.asarray(M, dtype=float)
    if np.abs(M - M.T).max() > 1e-10:
        raise NotSymmetric("matrix is not symmetric within 1e-10")
    vals, vecs = np.linalg.eigh((M + M.T) / 2.0)
    if np.abs(vals).max() > 1.0 + 1e-10:
        raise NormTooLarge("spectral norm exceeds 1")
    return (vecs * cheb_eval(p, vals)[None, :]) @ vecs.T


def apply_to_singular(p: ChebyshevPoly, A: np.ndarray) -> np.ndarray:
    """V^T p(Sigma) V on the right-singular basis of A; p must be even."""
    if p.parity != "even":
        raise NotEvenParity("singular value transforms need an even polynomial")
    A = np.asarray(A, dtype=float)
    _, s, vh = np.linalg.svd(A)
    if s.max(initial=0.0) > 1.0 + 1e-10:
        raise NormTooLarge("largest singular value exceeds 1")
    return (vh.T * cheb_eval(p, s)[None, :]) @ vh


def poly_to_text(p: ChebyshevPoly) -> str:
    """Serialize degree and coefficients at 17 significant digits."""
    lines = [f"degree {p.degree}"]
    lines += [f"{c:.17g}" for c in p.coeffs]
    return "\n".join(lines) + "\n"


def poly_from_text(text: str) -> ChebyshevPoly:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 2 or head[0] != "degree":
        raise InvalidParameter("polynomial text must start with 'degree <d>'")
    degree = int(head[1])
    coeffs = np.array([float(ln) for ln in lines[1:]])
    if len(coeffs) != degree + 1:
        raise InvalidParameter("coefficient count does not match the declared degree")
    return cheb_poly(coeffs)
