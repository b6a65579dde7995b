"""Nonclassicality filters and their Fourier transforms.

All filters here are radial, so every two-dimensional transform reduces to a
one-dimensional Hankel-type integral.  Conventions:

* ``Omega(beta)`` is the filter acting on the characteristic function,
  normalised so that ``Omega(0) = 1``.
* ``Omega~(gamma) = (1/pi^2) int d^2beta Omega(beta) exp(gamma beta* - gamma* beta)``
  is its transform, a probability density in the complex plane.

The exponent ``q`` of the filter family is a float in ``[2, inf)``; the limit
``q -> inf`` is encoded as :data:`INF` and always takes its own closed-form
code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import special

from .specfun import DEFAULT_RULE, QuadratureRule, gamma_fn, gl_panels

INF = math.inf

# below this |gamma| * w the J1(2w gamma)/gamma quotient uses its limit
_SMALL_ARG = 1e-8
_LOG_FLOOR = -math.log(1e-16)


@dataclass(frozen=True)
class FilterSpec:
    """Filter family selector: exponent ``q`` and width ``w``."""

    q: float
    w: float

    def __post_init__(self):
        if not self.w > 0:
            raise ValueError(f"filter width must be positive, got w={self.w}")
        if not self.q >= 2:
            raise ValueError(f"filter exponent must satisfy q >= 2, got q={self.q}")

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.q)

    @property
    def kind(self) -> str:
        return "gaussian" if self.q == 2 else "nonclassicality"

    def with_width(self, w: float) -> "FilterSpec":
        return FilterSpec(self.q, w)

    def to_dict(self):
        return {"q": "inf" if self.is_infinite else self.q, "w": self.w}


@dataclass(frozen=True)
class SParam:
    """Ordering parameter of the s-parametrized quasiprobabilities."""

    s: float

    def __post_init__(self):
        if self.s > 1:
            raise ValueError(f"s must satisfy s <= 1, got {self.s}")


@dataclass(frozen=True)
class MultimodeFilterSpec:
    per_mode: tuple

    def __init__(self, per_mode: Sequence[FilterSpec]):
        per_mode = tuple(per_mode)
        if not per_mode:
            raise ValueError("at least one mode is required")
        object.__setattr__(self, "per_mode", per_mode)

    @property
    def n_modes(self) -> int:
        return len(self.per_mode)


def parse_q(value) -> float:
    """Accept ``"inf"`` (any case) or a number >= 2."""
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "∞"):
        return INF
    return float(value)


def _require_finite(spec: FilterSpec, name: str):
    if spec.is_infinite:
        raise ValueError(f"{name} needs a finite q; use the q=INF closed forms instead")


def _omega_prefactor(q: float) -> float:
    return 2 ** (1 / q) * math.sqrt(q / (2 * math.pi * gamma_fn(2 / q)))


def omega_small(beta_abs, spec: FilterSpec):
    """Generating function omega_w^(q)(|beta|) whose autocorrelation is the filter."""
    _require_finite(spec, "omega_small")
    b = np.asarray(beta_abs, dtype=float)
    return _omega_prefactor(spec.q) / spec.w * np.exp(-((b / spec.w) ** spec.q))


def omega_support(spec: FilterSpec) -> float:
    """Radius beyond which omega_small drops below 1e-16 of its peak."""
    return spec.w * _LOG_FLOOR ** (1 / spec.q)


def filter_autocorr(beta_abs: float, spec: FilterSpec, rule: QuadratureRule = DEFAULT_RULE):
    """Filter Omega_w^(q)(|beta|) as the 2-D autocorrelation of omega_small.

    Evaluated in polar coordinates around the origin:
    ``2 int_0^R dr r omega(r) int_0^pi dtheta omega(|r e^{i theta} + beta|)``.
    Slow (nested adaptive quadrature); use :func:`filter_table` for many points.
    """
    _require_finite(spec, "filter_autocorr")
    beta = float(beta_abs)
    w, q = spec.w, spec.q
    c = _omega_prefactor(q) / w
    R = omega_support(spec)

    def om(rho):
        return c * math.exp(-((rho / w) ** q))

    def inner(r):
        if beta == 0.0 or r == 0.0:
            return math.pi * om(math.hypot(r, beta))
        pts = []
        # the steep edge of omega sits where |r e^{i theta} + beta| = w
        cos_edge = (w * w - r * r - beta * beta) / (2 * r * beta)
        if -1 < cos_edge < 1:
            pts.append(math.acos(cos_edge))
        return rule.integrate(
            lambda th: om(math.sqrt(max(r * r + beta * beta + 2 * r * beta * math.cos(th), 0.0))),
            0.0,
            math.pi,
            points=pts,
        )

    edges = [w, abs(w - beta), w + beta]
    val = rule.integrate(lambda r: r * om(r) * inner(r), 0.0, R + beta, points=edges)
    return 2.0 * val


def filter_infty(beta_abs, w: float):
    """Closed form of the q -> inf filter (normalised overlap of two disks)."""
    b = np.asarray(beta_abs, dtype=float)
    x = np.clip(b / (2 * w), 0.0, 1.0)
    val = (2 / np.pi) * (np.arccos(x) - x * np.sqrt(1 - x * x))
    out = np.where(b <= 2 * w, val, 0.0)
    return float(out) if out.ndim == 0 else out


def ft_filter_infty(gamma_abs, w: float):
    """(1/pi) J1(2 w |gamma|)^2 / |gamma|^2, with limit w^2/pi at the origin."""
    g = np.asarray(gamma_abs, dtype=float)
    small = g * w < _SMALL_ARG
    gs = np.where(small, 1.0, g)
    val = special.j1(2 * w * gs) ** 2 / (np.pi * gs * gs)
    out = np.where(small, w * w / np.pi, val)
    return float(out) if out.ndim == 0 else out


def _omega_hankel(gamma, spec: FilterSpec, order: int = 20):
    """h(gamma) = int_0^inf db b omega(b) J0(2 gamma b) by composite Gauss-Legendre."""
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    B = omega_support(spec)
    gmax = float(np.max(g)) if g.size else 0.0
    n_panels = max(32, int(math.ceil(2 * gmax * B / 1.5)))
    # geometric refinement near 0 handles the |b|^q cusp of non-even q
    breaks = B * np.exp2(-np.arange(1, 24))
    nodes, weights = gl_panels(0.0, B, n_panels, order, breaks=breaks)
    kernel = weights * nodes * omega_small(nodes, spec)
    out = np.empty_like(g)
    chunk = max(1, 2_000_000 // nodes.size)
    for i in range(0, g.size, chunk):
        gi = g[i:i + chunk]
        out[i:i + chunk] = special.j0(2 * np.outer(gi, nodes)) @ kernel
    return out


def ft_filter_q(gamma_abs, spec: FilterSpec):
    """Omega~_w^(q)(|gamma|) = 4 (int_0^inf db b omega(b) J0(2|gamma| b))^2."""
    _require_finite(spec, "ft_filter_q")
    g = np.asarray(gamma_abs, dtype=float)
    out = 4.0 * _omega_hankel(g.ravel(), spec) ** 2
    return float(out[0]) if g.ndim == 0 else out.reshape(g.shape)


def ft_filter_q_quad(gamma_abs: float, spec: FilterSpec, rule: QuadratureRule = DEFAULT_RULE):
    """Scalar adaptive-quadrature version of :func:`ft_filter_q`."""
    _require_finite(spec, "ft_filter_q_quad")
    g = float(gamma_abs)
    c = _omega_prefactor(spec.q) / spec.w
    B = omega_support(spec)
    h = rule.integrate(
        lambda b: b * c * math.exp(-((b / spec.w) ** spec.q)) * special.j0(2 * g * b),
        0.0,
        B,
        points=[spec.w],
    )
    return 4.0 * h * h


def ft_filter(gamma_abs, spec: FilterSpec):
    """Fourier transform of the selected filter (dispatch on q)."""
    if spec.is_infinite:
        return ft_filter_infty(gamma_abs, spec.w)
    return ft_filter_q(gamma_abs, spec)


def gaussian_ft_closed(gamma_abs, w: float):
    """Closed form of the q = 2 transform: (2 w^2/pi) exp(-2 w^2 |gamma|^2)."""
    g = np.asarray(gamma_abs, dtype=float)
    return 2 * w * w / np.pi * np.exp(-2 * w * w * g * g)


@lru_cache(maxsize=64)
def _ft_cutoff(q: float, w: float) -> float:
    """Radius past which Omega~^(q) stays below 1e-15 of its peak."""
    spec = FilterSpec(q, w)
    peak = float(ft_filter_q(0.0, spec))
    R = 4.0 / w
    while R < 1e4 / w:
        probe = np.linspace(R, 2 * R, 400)
        if np.max(ft_filter_q(probe, spec)) < 1e-15 * peak:
            return R
        R *= 2
    return R


def ft_mass(spec: FilterSpec, radius: float | None = None) -> float:
    """Probability mass 2 pi int_0^radius r Omega~(r) dr (radius None = inf).

    For q = INF and an infinite radius the integral is carried to
    ``R = 1e4 / w`` and the remaining tail is added from the large-argument
    Bessel asymptote 2/(pi X), X = 2 w R, accurate to O(1/X^2).
    """
    w = spec.w
    if spec.is_infinite:
        R = 1e4 / w if radius is None else float(radius)
        # J1^2 oscillates with period pi/(2w) in r
        n_panels = max(8, int(math.ceil(2 * w * R / 2.0)))
        nodes, weights = gl_panels(0.0, R, n_panels, 16)
        mass = 2 * np.pi * np.sum(weights * nodes * ft_filter_infty(nodes, w))
        if radius is None:
            mass += 2.0 / (np.pi * 2 * w * R)
        return float(mass)
    R = 2 * _ft_cutoff(spec.q, w) if radius is None else float(radius)
    n_panels = max(16, int(math.ceil(2 * omega_support(spec) * R / 1.5)))
    nodes, weights = gl_panels(0.0, R, n_panels, 20)
    return float(2 * np.pi * np.sum(weights * nodes * ft_filter_q(nodes, spec)))


def ft_moment2(spec: FilterSpec, radius: float) -> float:
    """Unnormalised second moment 2 pi int_0^radius r^3 Omega~(r) dr."""
    w = spec.w
    R = float(radius)
    if spec.is_infinite:
        n_panels = max(8, int(math.ceil(2 * w * R / 2.0)))
        nodes, weights = gl_panels(0.0, R, n_panels, 16)
        return float(2 * np.pi * np.sum(weights * nodes**3 * ft_filter_infty(nodes, w)))
    n_panels = max(16, int(math.ceil(2 * omega_support(spec) * R / 1.5)))
    nodes, weights = gl_panels(0.0, R, n_panels, 20)
    return float(2 * np.pi * np.sum(weights * nodes**3 * ft_filter_q(nodes, spec)))


@lru_cache(maxsize=64)
def _inverse_kernel(q: float, w: float, n_panels: int):
    spec = FilterSpec(q, w)
    nodes, weights = gl_panels(0.0, 2 * _ft_cutoff(q, w), n_panels, 20)
    return nodes, 2 * np.pi * weights * nodes * ft_filter_q(nodes, spec)


def filter_table(beta_abs, spec: FilterSpec):
    """Vectorised filter values Omega(|beta|).

    q = INF and q = 2 use closed forms; other q invert the transform,
    ``Omega(beta) = 2 pi int_0^inf r Omega~(r) J0(2 |beta| r) dr``.
    The inversion has an absolute noise floor near 1e-16.
    """
    b = np.asarray(beta_abs, dtype=float)
    if spec.is_infinite:
        return filter_infty(b, spec.w)
    if spec.q == 2:
        # exact Gaussian; keeps the far tail free of quadrature noise
        out = np.exp(-b * b / (2 * spec.w**2))
        return float(out) if b.ndim == 0 else out
    R = 2 * _ft_cutoff(spec.q, spec.w)
    bmax = float(np.max(b)) if b.size else 0.0
    # span bucketed to powers of two of the support so scalar calls share a kernel
    support = omega_support(spec)
    span = support * 2.0 ** math.ceil(math.log2(max(1.0, bmax / support)))
    n_panels = max(16, int(math.ceil(2 * span * R / 1.5)))
    nodes, kernel = _inverse_kernel(spec.q, spec.w, n_panels)
    flat = b.ravel()
    out = np.empty_like(flat)
    chunk = max(1, 2_000_000 // nodes.size)
    for i in range(0, flat.size, chunk):
        out[i:i + chunk] = special.j0(2 * np.outer(flat[i:i + chunk], nodes)) @ kernel
    return float(out[0]) if b.ndim == 0 else out.reshape(b.shape)


def gaussian_kernel(gamma_abs, s: SParam | float):
    """Gaussian smoothing kernel G~_s of the s-parametrized quasiprobabilities."""
    s_val = s.s if isinstance(s, SParam) else SParam(float(s)).s
    if s_val == 1:
        raise ValueError("s = 1 gives a delta kernel, not a function")
    g = np.asarray(gamma_abs, dtype=float)
    out = 2 / (np.pi * (1 - s_val)) * np.exp(-2 * g * g / (1 - s_val))
    return float(out) if out.ndim == 0 else out


def ft_multimode(gammas: Sequence[float], spec: MultimodeFilterSpec) -> float:
    """Product-form multimode transform, one factor per mode."""
    gammas = list(gammas)
    if len(gammas) != spec.n_modes:
        raise ValueError(f"expected {spec.n_modes} amplitudes, got {len(gammas)}")
    val = 1.0
    for g, s in zip(gammas, spec.per_mode):
        val *= float(ft_filter(g, s))
    return val


def rect_post_filter(beta_abs, b_c: float):
    """Phase-independent rectangular filter: 1 on |beta| <= b_c (closed), else 0."""
    b = np.asarray(beta_abs, dtype=float)
    out = np.where(b <= b_c, 1.0, 0.0)
    return float(out) if out.ndim == 0 else out
