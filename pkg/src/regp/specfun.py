"""Special functions and quadrature kernels.

Everything here is a thin, validated layer over ``scipy.special`` and
``scipy.integrate`` plus a few things scipy does not ship in the form we need
(Laguerre tables by recurrence, vectorised monotone bisection, composite
Gauss-Legendre panels for oscillatory radial integrals).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, special

from .errors import BracketError, QuadratureError, RangeError

LAGUERRE_MAX_ORDER = 10_000

# erf(z) itself overflows once Im(z)^2 - Re(z)^2 exceeds ~709.
ERF_MAX_IMAG = 50.0
_ERF_MAX_EXPONENT = 700.0
_ERF_SERIES_RADIUS = 1.0
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)

DECAY_FLOOR = 1e-16


@dataclass(frozen=True)
class QuadratureRule:
    """Adaptive quadrature settings.

    ``kind`` is ``"finite"`` for integrals on a bounded interval or
    ``"semi-infinite"`` for integrals whose integrand decays at large argument;
    the latter are cut off by :func:`decay_cutoff` before integration.
    """

    kind: str = "finite"
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if self.kind not in ("finite", "semi-infinite"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def integrate(
        self,
        f: Callable[[float], float],
        a: float,
        b: float,
        points: Sequence[float] | None = None,
    ) -> float:
        """Integrate ``f`` over ``[a, b]``; raise QuadratureError on failure."""
        if a == b:
            return 0.0
        pts = None
        if points is not None:
            lo, hi = min(a, b), max(a, b)
            pts = sorted(p for p in points if lo < p < hi) or None
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(
                    f,
                    a,
                    b,
                    epsabs=self.abs_tol,
                    epsrel=self.rel_tol,
                    limit=self.max_subdivisions,
                    points=pts,
                )
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(str(exc).splitlines()[0], interval=(a, b)) from exc
        tol = max(self.abs_tol, self.rel_tol * abs(val))
        if not math.isfinite(val) or err > 10 * tol:
            raise QuadratureError(
                "quadrature did not converge", estimate=val, error=err, interval=(a, b)
            )
        return val


DEFAULT_RULE = QuadratureRule()


def decay_cutoff(envelope: Callable[[float], float], start: float, peak: float | None = None,
                 floor: float = DECAY_FLOOR) -> float:
    """Smallest radius (to bisection accuracy) beyond which ``envelope`` < floor * peak.

    ``envelope`` must be nonincreasing beyond ``start``.
    """
    if peak is None:
        peak = envelope(start)
    target = floor * peak
    hi = max(start, 1.0)
    while envelope(hi) > target:
        hi *= 2.0
        if hi > 1e12:
            raise RangeError("envelope does not decay")
    lo = start
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if envelope(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-9 * hi:
            break
    return hi


@lru_cache(maxsize=32)
def _leggauss(order: int):
    return leggauss(order)


def gl_panels(a: float, b: float, n_panels: int, order: int = 16,
              breaks: Sequence[float] | None = None):
    """Nodes and weights of composite Gauss-Legendre quadrature on [a, b].

    The interval is split into ``n_panels`` equal panels; ``breaks`` adds extra
    panel boundaries (e.g. at a kink of the integrand).
    """
    x0, w0 = _leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    if breaks is not None:
        extra = [p for p in breaks if a < p < b]
        edges = np.unique(np.concatenate([edges, extra]))
    left, right = edges[:-1], edges[1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    weights = (half[:, None] * w0[None, :]).ravel()
    return nodes, weights


def bessel_j(nu: int, x):
    """Bessel function of the first kind, orders 0 and 1 only."""
    if nu == 0:
        return special.j0(x)
    if nu == 1:
        return special.j1(x)
    raise ValueError(f"only orders 0 and 1 are supported, got {nu}")


def laguerre(n: int, x):
    """Laguerre polynomial L_n(x) by the three-term recurrence."""
    if n < 0:
        raise ValueError("Laguerre order must be nonnegative")
    if n > LAGUERRE_MAX_ORDER:
        raise RangeError(f"Laguerre order {n} exceeds {LAGUERRE_MAX_ORDER}")
    return laguerre_table(n, x)[n]


def laguerre_table(n_max: int, x, max_order: int = LAGUERRE_MAX_ORDER):
    """Array ``L[k] = L_k(x)`` for k = 0..n_max (x may be an array).

    ``max_order`` caps the table size; the recurrence itself stays accurate
    to ~1e-10 relative up to n = 1e5 for 0 < x <= 16.
    """
    if n_max > max_order:
        raise RangeError(f"Laguerre order {n_max} exceeds {max_order}")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 - x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 - x) * out[k] - k * out[k - 1]) / (k + 1)
    return out


def _erf_series(z):
    # Maclaurin series, used near the origin where 1 - exp(-z^2) w(iz) cancels.
    z2 = z * z
    term = z
    total = z.copy()
    for n in range(1, 60):
        term = -term * z2 / n
        contrib = term / (2 * n + 1)
        total += contrib
        if np.all(np.abs(contrib) <= 1e-17 * np.abs(total)):
            break
    return _TWO_OVER_SQRT_PI * total


def erf_complex(z):
    """Error function of complex argument via the Faddeeva function.

    Uses erf(z) = 1 - exp(-z^2) w(iz) on the right half plane and oddness on
    the left; a Maclaurin series is used for |z| <= 1.  Validated for
    |Im z| <= 50 wherever the result itself is representable
    (Im(z)^2 - Re(z)^2 <= 700).
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    x, y = z.real, z.imag
    if np.any(~np.isfinite(z)):
        raise RangeError("erf_complex requires finite arguments")
    if np.any(np.abs(y) > ERF_MAX_IMAG) or np.any(y * y - x * x > _ERF_MAX_EXPONENT):
        raise RangeError(
            f"erf_complex argument outside validated region |Im z| <= {ERF_MAX_IMAG}"
        )
    sign = np.where(x < 0, -1.0, 1.0)
    zr = z * sign
    out = np.empty_like(zr)
    small = np.abs(zr) <= _ERF_SERIES_RADIUS
    if np.any(small):
        out[small] = _erf_series(zr[small])
    big = ~small
    if np.any(big):
        zb = zr[big]
        out[big] = 1.0 - np.exp(-zb * zb) * special.wofz(1j * zb)
    out *= sign
    return out[0] if scalar else out


def erf_real(x):
    return special.erf(x)


def gamma_fn(x):
    """Gamma function for positive real arguments."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise RangeError("gamma_fn is defined here for x > 0 only")
    out = special.gamma(x)
    return float(out) if out.ndim == 0 else out


def find_root_monotone(f: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-12) -> float:
    """Bisection for a monotone ``f`` with a sign change on [lo, hi]."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo:.3g}, {fhi:.3g}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_increasing(f: Callable[[np.ndarray], np.ndarray], targets, lo: float, hi: float,
                      tol: float = 1e-12) -> np.ndarray:
    """Vectorised bisection solving ``f(t) = target`` for nondecreasing ``f``.

    Returns, for each target, the left edge of the final bracket midpoint, so
    plateaus of ``f`` resolve to their left end.
    """
    targets = np.asarray(targets, dtype=float)
    a = np.full(targets.shape, float(lo))
    b = np.full(targets.shape, float(hi))
    n_iter = max(1, int(math.ceil(math.log2((hi - lo) / tol))))
    for _ in range(n_iter):
        mid = 0.5 * (a + b)
        below = f(mid) < targets
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return 0.5 * (a + b)
