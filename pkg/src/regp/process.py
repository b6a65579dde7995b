"""The regularizing process: signal mixed with an engineered classical field.

With a highly transmissive beam splitter the ECF acts as a random coherent
displacement of the signal.  Balanced detection sees shifted quadratures,
unbalanced detection sees photon counts of the displaced field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ecf import ECFConfig, sample_displacements
from .errors import NonclassicalInputError, SeedError
from .filters import FilterSpec
from .specfun import gamma_fn
from .states import CLASSICAL, QuadratureData, StateModel, sample_quadratures


@dataclass(frozen=True)
class ProcessConfig:
    """ECF settings plus detection efficiency ``eta``; ``per_mode`` for multimode runs."""

    ecf: ECFConfig
    eta: float = 1.0
    per_mode: tuple[ECFConfig, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not 0 < self.eta <= 1:
            raise ValueError(f"efficiency must lie in (0, 1], got {self.eta}")

    @property
    def modes(self) -> int:
        return max(1, len(self.per_mode))


def apply_loss(signal: QuadratureData, eta: float, seed) -> QuadratureData:
    """Attenuate by a beam splitter of transmissivity ``eta``.

    ``x -> sqrt(eta) x + sqrt(1 - eta) x_vac`` with unit-variance vacuum noise,
    which rescales the P function as P(alpha/sqrt(eta))/eta.
    """
    if not 0 < eta <= 1:
        raise ValueError(f"efficiency must lie in (0, 1], got {eta}")
    if eta == 1:
        return signal
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(len(signal))
    return QuadratureData(math.sqrt(eta) * signal.x + math.sqrt(1 - eta) * noise, signal.phi)


def apply_process_bhd(signal: QuadratureData, displacements, eta: float = 1.0,
                      seed=None) -> QuadratureData:
    """Displace each homodyne event by its own ECF amplitude.

    ``x' = sqrt(eta) x + 2 |gamma| cos(arg gamma + phi)`` (plus the loss
    vacuum noise when ``eta < 1``, drawn from ``seed``); phases are unchanged.
    """
    gamma = np.asarray(displacements, dtype=complex)
    if gamma.shape != (len(signal),):
        raise ValueError(f"{len(signal)} events but {gamma.size} displacements")
    if eta < 1 and seed is None:
        raise SeedError("a seed is required for the loss noise when eta < 1")
    lossy = apply_loss(signal, eta, seed)
    shift = 2.0 * (gamma * np.exp(1j * signal.phi)).real
    return QuadratureData(lossy.x + shift, signal.phi)


def apply_process_uhd(signal: StateModel, displacements, alpha: complex, seed) -> np.ndarray:
    """Photon counts of the signal displaced by ``gamma - alpha``.

    Each event draws a coherent amplitude from the signal's P function and a
    Poisson count with mean ``|gamma_s + gamma - alpha|^2``.  Only classical
    signals can be simulated this way.
    """
    if signal.classify() != CLASSICAL:
        raise NonclassicalInputError(
            "unbalanced detection can only be simulated for classical input states"
        )
    gamma = np.asarray(displacements, dtype=complex)
    rng = np.random.default_rng(seed)
    amp = signal.sample_p(rng, gamma.size) + gamma - complex(alpha)
    return rng.poisson(np.abs(amp) ** 2)


def _added_variance_coeff(q: float) -> float:
    return q * q * 2 ** (2 / q - 3) / gamma_fn(2 / q)


def output_min_variance(v_in: float, spec: FilterSpec) -> float:
    """Minimal quadrature variance after regularizing with a finite-q filter."""
    if spec.is_infinite:
        raise ValueError("the output variance is undefined for q = INF")
    if v_in <= 0:
        raise ValueError("input variance must be positive")
    return v_in + _added_variance_coeff(spec.q) / spec.w**2


def critical_width(q: float, v_in: float) -> float:
    """Width below which the regularized state loses its squeezing."""
    if math.isinf(q):
        raise ValueError("the critical width is undefined for q = INF")
    if q < 2:
        raise ValueError("q must be >= 2")
    if not 0 < v_in < 1:
        raise ValueError(f"input is not squeezed (variance {v_in})")
    return q * 2 ** (1 / q - 1.5) / math.sqrt(gamma_fn(2 / q) * (1 - v_in))


def loss_compensated_width(w: float, eta: float) -> float:
    """Filter width to use on data attenuated by ``eta`` to recover width ``w``."""
    if not 0 < eta <= 1:
        raise ValueError(f"efficiency must lie in (0, 1], got {eta}")
    return w / math.sqrt(eta)


def simulate_bhd(state: StateModel, cfg: ProcessConfig, n: int, seed,
                 method: str = "bisect") -> QuadratureData:
    """Full balanced pipeline: signal events, loss, ECF displacements.

    Independent child streams for signal, loss and ECF are spawned from ``seed``.
    """
    if n <= 0:
        raise ValueError("event count must be positive")
    s_sig, s_loss, s_ecf = np.random.SeedSequence(seed).spawn(3)
    data = sample_quadratures(state, n, s_sig)
    gamma = sample_displacements(cfg.ecf, n, s_ecf, method)
    return apply_process_bhd(data, gamma, cfg.eta, s_loss)


def _seed_key(seed):
    if isinstance(seed, np.random.SeedSequence):
        return ("ss", repr(seed.entropy), tuple(seed.spawn_key))
    return ("raw", repr(seed))


def apply_process_multimode(signals: Sequence[QuadratureData], per_mode_ecf: Sequence[ECFConfig],
                            seeds: Sequence, method: str = "bisect") -> list[QuadratureData]:
    """Process each mode with its own, statistically independent ECF."""
    if not (len(signals) == len(per_mode_ecf) == len(seeds)):
        raise ValueError("need one ECF config and one seed per mode")
    keys = [_seed_key(s) for s in seeds]
    if len(set(keys)) != len(keys):
        raise SeedError("per-mode ECF seeds must differ: the mode ECFs must be statistically independent")
    out = []
    for data, cfg, seed in zip(signals, per_mode_ecf, seeds):
        gamma = sample_displacements(cfg, len(data), seed, method)
        out.append(apply_process_bhd(data, gamma))
    return out
