"""Engineered classical field (ECF): the random displacements that realise a filter.

A laser of amplitude ``gamma_L = tr_ratio * gamma_c`` passes an amplitude/phase
modulator with random transmission ``tau`` in [0, 1] and a uniformly random
phase.  After the signal beam splitter this yields coherent displacements
``gamma = gamma_c * tau * exp(i phi)`` whose radial law is the filter
transform truncated at ``|gamma| <= gamma_c``.  Only the product
``w * gamma_c`` enters the transmission statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import special

from .errors import RangeError
from .filters import FilterSpec, SParam, ft_filter, ft_filter_q, ft_mass, rect_post_filter
from .specfun import bisect_increasing

DEFAULT_W_GAMMA_C = 100.0
CDF_TABLE_SIZE = 4096
TAU_TOL = 1e-12


@dataclass(frozen=True)
class ECFConfig:
    filter: FilterSpec
    gamma_c: float
    tr_ratio: float = 100.0

    def __post_init__(self):
        if not self.gamma_c > 0:
            raise ValueError("gamma_c must be positive")
        if not self.tr_ratio > 0:
            raise ValueError("tr_ratio must be positive")

    @classmethod
    def from_product(cls, spec: FilterSpec, w_gamma_c: float = DEFAULT_W_GAMMA_C,
                     tr_ratio: float = 100.0) -> "ECFConfig":
        return cls(spec, w_gamma_c / spec.w, tr_ratio)

    @property
    def w_gamma_c(self) -> float:
        return self.filter.w * self.gamma_c

    @property
    def laser_amplitude(self) -> float:
        return self.tr_ratio * self.gamma_c

    def to_dict(self):
        return {
            "filter": self.filter.to_dict(),
            "gamma_c": self.gamma_c,
            "w_gamma_c": self.w_gamma_c,
            "tr_ratio": self.tr_ratio,
        }


class DisplacementSample(NamedTuple):
    gamma: complex


def _check_tau(tau):
    t = np.asarray(tau, dtype=float)
    if np.any(t < 0) or np.any(t > 1):
        raise RangeError("transmission tau must lie in [0, 1]")
    return t


def transmission_pdf(tau, cfg: ECFConfig):
    """Unnormalised amplitude-transmission density of the modulator."""
    t = _check_tau(tau)
    X = cfg.w_gamma_c
    if cfg.filter.is_infinite:
        small = 2 * X * t < 1e-8
        ts = np.where(small, 1.0, t)
        out = np.where(small, 2 * X * X * t, 2.0 / ts * special.j1(2 * X * ts) ** 2)
    else:
        unit = cfg.filter.with_width(1.0)
        out = 2 * np.pi * X * X * t * ft_filter_q(X * t, unit)
    return float(out) if out.ndim == 0 else out


def transmission_cdf(tau, cfg: ECFConfig):
    """Closed-form unnormalised CDF for q = INF: 1 - J0(2X tau)^2 - J1(2X tau)^2."""
    if not cfg.filter.is_infinite:
        raise ValueError("closed-form CDF exists only for q = INF; use TransmissionCDF")
    t = _check_tau(tau)
    x = 2 * cfg.w_gamma_c * t
    out = 1.0 - special.j0(x) ** 2 - special.j1(x) ** 2
    return float(out) if out.ndim == 0 else out


def truncation_error(w_gamma_c: float, q: float = math.inf) -> float:
    """Probability mass of the filter transform lost beyond the cutoff gamma_c."""
    X = float(w_gamma_c)
    if math.isinf(q):
        return float(special.j0(2 * X) ** 2 + special.j1(2 * X) ** 2)
    return 1.0 - ft_mass(FilterSpec(q, 1.0), X)


def truncation_error_asymptote(w_gamma_c: float) -> float:
    """Large-cutoff approximation 1/(pi w gamma_c) of the q = INF truncation error."""
    return 1.0 / (math.pi * w_gamma_c)


@lru_cache(maxsize=16)
def _finite_q_table(q: float, X: float, size: int):
    # cumulative integral of the pdf, 4-point Gauss-Legendre per grid interval
    cfg = ECFConfig(FilterSpec(q, 1.0), X)
    grid = np.linspace(0.0, 1.0, size)
    x0, w0 = np.polynomial.legendre.leggauss(4)
    left, right = grid[:-1], grid[1:]
    half = 0.5 * (right - left)
    nodes = 0.5 * (left + right)[:, None] + half[:, None] * x0[None, :]
    pdf = transmission_pdf(nodes.ravel(), cfg).reshape(nodes.shape)
    steps = (pdf * w0[None, :]).sum(axis=1) * half
    cdf = np.concatenate([[0.0], np.cumsum(steps)])
    return grid, np.maximum.accumulate(cdf)


class TransmissionCDF:
    """Unnormalised CDF F(tau) of the modulator transmission, any q.

    q = INF evaluates the closed form; finite q interpolates a cumulative
    quadrature table on a 4096-point tau grid.
    """

    def __init__(self, cfg: ECFConfig, table_size: int = CDF_TABLE_SIZE):
        self.cfg = cfg
        if cfg.filter.is_infinite:
            self._grid = None
            self.total = transmission_cdf(1.0, cfg)
        else:
            self._grid, self._vals = _finite_q_table(cfg.filter.q, cfg.w_gamma_c, table_size)
            self.total = float(self._vals[-1])

    def __call__(self, tau):
        if self._grid is None:
            return transmission_cdf(tau, self.cfg)
        return np.interp(tau, self._grid, self._vals)

    @property
    def truncation_error(self) -> float:
        return 1.0 - self.total

    def inverse(self, u, method: str = "bisect"):
        """Transmissions with normalised CDF F(tau)/(1 - E) = u."""
        targets = np.asarray(u, dtype=float) * self.total
        if method == "bisect":
            return bisect_increasing(self, targets, 0.0, 1.0, TAU_TOL)
        if method == "table":
            # inverse tabulated on a grid uniform in probability, then linear interpolation
            levels = np.linspace(0.0, self.total, CDF_TABLE_SIZE)
            knots = bisect_increasing(self, levels, 0.0, 1.0, TAU_TOL)
            knots[0], knots[-1] = 0.0, 1.0
            return np.interp(targets, levels, knots)
        raise ValueError(f"unknown inversion method {method!r}")


def sample_transmissions(cfg: ECFConfig, n: int, seed, method: str = "bisect") -> np.ndarray:
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    return TransmissionCDF(cfg).inverse(u, method)


def sample_displacements(cfg: ECFConfig, n: int, seed, method: str = "bisect") -> np.ndarray:
    """Draw ``n`` ECF displacements ``gamma_c tau e^{i phi}`` (complex array).

    tau follows the truncated transmission law renormalised by 1/(1 - E);
    phi is uniform on [0, 2 pi).
    """
    if n < 0:
        raise ValueError("event count must be nonnegative")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    phi = rng.uniform(0.0, 2 * math.pi, n)
    tau = TransmissionCDF(cfg).inverse(u, method)
    return cfg.gamma_c * tau * np.exp(1j * phi)


def thermal_ecf_params(s: SParam | float, tr_ratio: float) -> float:
    """Mean photon number of the thermal ECF realising Gaussian smoothing."""
    s_val = s.s if isinstance(s, SParam) else SParam(float(s)).s
    return (1 - s_val) / 2 * tr_ratio**2


def sample_gaussian_displacements(s: SParam | float, n: int, seed) -> np.ndarray:
    """Displacements distributed as the Gaussian kernel G~_s (thermal ECF)."""
    s_val = s.s if isinstance(s, SParam) else SParam(float(s)).s
    rng = np.random.default_rng(seed)
    sd = math.sqrt((1 - s_val) / 4)
    return sd * rng.standard_normal(n) + 1j * sd * rng.standard_normal(n)


def effective_filter_ft(gamma_abs, spec: FilterSpec, gamma_c: float):
    """Filter transform as realised by the truncated ECF (hard cut at gamma_c)."""
    g = np.asarray(gamma_abs, dtype=float)
    out = ft_filter(g, spec) * rect_post_filter(g, gamma_c)
    return float(out) if np.ndim(out) == 0 else out
