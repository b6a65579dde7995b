"""Gaussian signal states: quadrature statistics, sampling and P-function oracles.

Quadrature convention: ``x_phi = a e^{i phi} + a^dagger e^{-i phi}``, so the
vacuum has unit quadrature variance and a phase-space point ``alpha``
projects onto ``x = 2 Re(alpha e^{i phi})``.  Squeezing is along Re(alpha)
(the quadrature at phi = 0 is squeezed), i.e. Im(alpha) is the antisqueezed
axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate

from .errors import DivergenceError, NonclassicalInputError
from .filters import FilterSpec, filter_table, omega_support, rect_post_filter

TWO_PI = 2.0 * math.pi

# integrand of the Gaussian-filtered integral is cut where it falls below e^-40
_GAUSS_DECADES = 40.0

CLASSICAL = "classical"
NONCLASSICAL = "nonclassical"


class StateModel:
    """Gaussian state described by its Wigner mean and axis variances."""

    def wigner_mean(self) -> complex:
        return 0j

    def wigner_variances(self) -> tuple[float, float]:
        """Variances of Re(alpha) and Im(alpha) under the Wigner function."""
        raise NotImplementedError

    def classify(self) -> str:
        return CLASSICAL

    def sample_p(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw coherent amplitudes from the (non-negative) P function."""
        raise NonclassicalInputError(f"{self!r} has no non-negative P function")

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Vacuum(StateModel):
    def wigner_variances(self):
        return 0.25, 0.25

    def sample_p(self, rng, n):
        return np.zeros(n, dtype=complex)

    def to_dict(self):
        return {"state": "vacuum"}


@dataclass(frozen=True)
class Coherent(StateModel):
    alpha0: complex

    def wigner_mean(self):
        return complex(self.alpha0)

    def wigner_variances(self):
        return 0.25, 0.25

    def sample_p(self, rng, n):
        return np.full(n, complex(self.alpha0))

    def to_dict(self):
        a = complex(self.alpha0)
        return {"state": "coherent", "alpha0_re": a.real, "alpha0_im": a.imag}


@dataclass(frozen=True)
class Thermal(StateModel):
    nbar: float

    def __post_init__(self):
        if self.nbar < 0:
            raise ValueError(f"thermal occupation must be >= 0, got {self.nbar}")

    def wigner_variances(self):
        v = (2 * self.nbar + 1) / 4
        return v, v

    def sample_p(self, rng, n):
        # P(gamma) = exp(-|gamma|^2/nbar)/(pi nbar): each component has variance nbar/2
        sd = math.sqrt(self.nbar / 2)
        return sd * rng.standard_normal(n) + 1j * sd * rng.standard_normal(n)

    def to_dict(self):
        return {"state": "thermal", "nbar": self.nbar}


@dataclass(frozen=True)
class SqueezedVacuum(StateModel):
    """Squeezed vacuum with real squeezing parameter xi (squeezed along phi = 0)."""

    xi: float

    def wigner_variances(self):
        return math.exp(-2 * self.xi) / 4, math.exp(2 * self.xi) / 4

    def classify(self):
        return CLASSICAL if self.xi == 0 else NONCLASSICAL

    def sample_p(self, rng, n):
        if self.xi == 0:
            return np.zeros(n, dtype=complex)
        return super().sample_p(rng, n)

    def to_dict(self):
        return {"state": "squeezed", "xi": self.xi}


def state_from_dict(d: dict) -> StateModel:
    kind = d["state"]
    if kind == "vacuum":
        return Vacuum()
    if kind == "coherent":
        return Coherent(complex(d["alpha0_re"], d.get("alpha0_im", 0.0)))
    if kind == "thermal":
        return Thermal(float(d["nbar"]))
    if kind == "squeezed":
        return SqueezedVacuum(float(d["xi"]))
    raise ValueError(f"unknown state {kind!r}")


class QuadratureSample(NamedTuple):
    x: float
    phi: float


@dataclass
class QuadratureData:
    """Balanced-homodyne events stored column-wise."""

    x: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.phi = np.asarray(self.phi, dtype=float)
        if self.x.shape != self.phi.shape or self.x.ndim != 1:
            raise ValueError("x and phi must be 1-D arrays of equal length")

    def __len__(self):
        return self.x.size

    def __getitem__(self, i):
        if isinstance(i, (int, np.integer)):
            return QuadratureSample(float(self.x[i]), float(self.phi[i]))
        return QuadratureData(self.x[i], self.phi[i])

    @classmethod
    def from_samples(cls, samples: Sequence[QuadratureSample]):
        if not samples:
            return cls(np.empty(0), np.empty(0))
        x, phi = zip(*samples)
        return cls(np.array(x), np.array(phi))

    @classmethod
    def concat(cls, parts: Sequence["QuadratureData"]):
        return cls(np.concatenate([p.x for p in parts]), np.concatenate([p.phi for p in parts]))


def quad_variance(state: StateModel, phi: float) -> float:
    """Variance of x_phi (vacuum = 1)."""
    v_re, v_im = state.wigner_variances()
    c, s = math.cos(phi), math.sin(phi)
    return 4 * (v_re * c * c + v_im * s * s)


def sample_quadratures(state: StateModel, n: int, seed, phase: float | None = None) -> QuadratureData:
    """Simulate ``n`` balanced-homodyne events by sampling the Wigner function.

    ``phase=None`` draws phases uniformly from [0, 2 pi); a float fixes the
    phase for every event.  ``seed`` is anything accepted by
    ``numpy.random.default_rng``.
    """
    if n < 0:
        raise ValueError("event count must be nonnegative")
    rng = np.random.default_rng(seed)
    if phase is None:
        phi = rng.uniform(0.0, TWO_PI, n)
    else:
        phi = np.full(n, float(phase) % TWO_PI)
    v_re, v_im = state.wigner_variances()
    m = state.wigner_mean()
    a_re = m.real + math.sqrt(v_re) * rng.standard_normal(n)
    a_im = m.imag + math.sqrt(v_im) * rng.standard_normal(n)
    x = 2.0 * (a_re * np.cos(phi) - a_im * np.sin(phi))
    return QuadratureData(x, phi)


def char_fn_P(state: StateModel, beta):
    """Normally ordered characteristic function Tr[rho e^{beta a^dag} e^{-beta* a}].

    For a Gaussian state with Wigner mean m and Re/Im variances (v_r, v_i):
    ``exp(beta m* - beta* m) exp(|beta|^2/2 - 2 v_i Re(beta)^2 - 2 v_r Im(beta)^2)``.
    This gives 1 for the vacuum, exp(beta alpha0* - beta* alpha0) for a
    coherent state and exp(-nbar |beta|^2) for a thermal state.
    """
    return np.exp(_char_exponent(state, np.asarray(beta, dtype=complex)))


def _char_exponent(state: StateModel, beta: np.ndarray) -> np.ndarray:
    m = state.wigner_mean()
    v_re, v_im = state.wigner_variances()
    br, bi = beta.real, beta.imag
    return (beta * np.conj(m) - np.conj(beta) * m) + (
        0.5 * (br * br + bi * bi) - 2 * v_im * br * br - 2 * v_re * bi * bi
    )


def _char_growth_rate(state: StateModel) -> float:
    # largest c with |char_fn_P(beta)| ~ exp(c |beta|^2)
    v_re, v_im = state.wigner_variances()
    return 0.5 - 2 * min(v_re, v_im)


def reference_Pw(
    state: StateModel,
    alpha,
    spec: FilterSpec,
    post_bc: float | None = None,
    filter_fn=None,
    b_max: float | None = None,
    tol: float = 1e-10,
):
    """Brute-force regularized P function by quadrature of its Fourier integral.

    ``P_w(alpha) = (1/pi^2) int d^2beta char_fn_P(beta) Omega(|beta|) e^{alpha beta* - alpha* beta}``

    The angular integral uses the periodic trapezoidal rule, the radial one
    adaptive vector quadrature over all ``alpha`` at once.  ``filter_fn``
    overrides the filter (vectorised callable of |beta|); then ``b_max`` or
    ``post_bc`` must bound the support.
    """
    alpha = np.asarray(alpha, dtype=complex)
    flat = np.atleast_1d(alpha).ravel()

    # a Gaussian filter is folded into the exponent so neither factor overflows alone
    gaussian = filter_fn is None and spec.q == 2
    if filter_fn is None:
        def filter_fn(b):
            return filter_table(b, spec)

        # beyond twice the omega support the filter is below 1e-16 of its peak; going
        # further only integrates the table's noise floor times the state's growth
        support = 2 * spec.w if spec.is_infinite else 2 * omega_support(spec)
        if spec.q == 2:
            rate = 1 / (2 * spec.w**2) - max(_char_growth_rate(state), 0.0)
            if rate > 0:
                support = max(support, math.sqrt(_GAUSS_DECADES / rate))
    else:
        support = b_max if b_max is not None else math.inf
    upper = min(support, post_bc) if post_bc is not None else support
    if not math.isfinite(upper):
        raise ValueError("a custom filter needs b_max or post_bc to bound the integral")
    if spec.q == 2 and post_bc is None:
        # Gaussian filter exp(-b^2/(2w^2)) against a char. function growing like exp(c b^2)
        if _char_growth_rate(state) >= 1 / (2 * spec.w**2):
            raise DivergenceError(
                "Gaussian filter too wide for this squeezed state: P_w is singular"
            )

    amax = float(np.max(np.abs(flat))) if flat.size else 0.0
    v_re, v_im = state.wigner_variances()
    # angular nodes follow the phase rate and the spread of the exponent around the ring
    spread = 2 * abs(v_im - v_re) * upper * upper
    m_ang = 128 + 8 * int(math.ceil((amax + abs(state.wigner_mean())) * upper)) + 2 * int(math.ceil(spread))
    theta = TWO_PI * np.arange(m_ang) / m_ang
    e_theta = np.exp(1j * theta)

    def integrand(b):
        beta = b * e_theta
        phase = np.exp(np.outer(flat, np.conj(beta)) - np.outer(np.conj(flat), beta))
        if gaussian:
            ang = phase @ np.exp(_char_exponent(state, beta) - b * b / (2 * spec.w**2)) / m_ang
            weight = b
        else:
            ang = phase @ char_fn_P(state, beta) / m_ang
            weight = b * float(filter_fn(b))
        if post_bc is not None:
            weight *= float(rect_post_filter(b, post_bc))
        return (2.0 / math.pi) * weight * ang.real

    pts = [p for p in (2 * spec.w, post_bc) if p is not None and 0 < p < upper]
    edges = [0.0] + sorted(pts) + [upper]
    total = np.zeros(flat.size)
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad_vec(integrand, lo, hi, epsabs=tol, epsrel=1e-10, limit=4000)
        total += val
    return float(total[0]) if alpha.ndim == 0 else total.reshape(alpha.shape)
