"""One-tap MMSE for OFDM and the CD-MAMP iterative detector for WHTDM.

CD-MAMP alternates a gradient step on the banded equivalent channel with the
separable QPSK posterior-mean denoiser, then damps the update. The memory
variant replaces the residual in the gradient by a recursively filtered
residual ``gamma``. All detector routines accept a stack of blocks with shape
``(..., N)`` and matching channel matrices ``(..., N, N)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .channel import EquivalentChannel, band_truncate, gram_lambda_max
from .waveforms import RxObservation

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class DetectorParams:
    iterations: int = 50
    damping: float = 0.6
    band_half_width: int = 8
    variance_floor: float = 1e-8
    memory_enabled: bool = False
    early_stop_tol: float | None = None
    # literal transpose instead of conjugate transpose, for comparison only
    hermitian: bool = True
    # divide tau by two before the denoiser (per-real-dimension reading)
    tau_per_real_dim: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if not 0.0 < self.damping < 1.0:
            raise ValueError("damping must lie strictly between 0 and 1")
        if self.variance_floor <= 0.0:
            raise ValueError("variance_floor must be positive")
        if self.band_half_width < 0:
            raise ValueError("band_half_width must be non-negative")
        if self.early_stop_tol is not None and self.early_stop_tol <= 0.0:
            raise ValueError("early_stop_tol must be positive when set")


@dataclass
class DetectorState:
    iteration: int
    x_hat: np.ndarray
    gamma: np.ndarray
    residual: np.ndarray
    tau: np.ndarray
    theta: np.ndarray
    theta_m: np.ndarray
    # denoiser input and undamped output of this iteration
    p: np.ndarray
    x_undamped: np.ndarray
    active: np.ndarray

    @property
    def residual_power(self) -> np.ndarray:
        return np.mean(np.abs(self.residual) ** 2, axis=-1)


def mmse_one_tap(z, H_diag, sigma2: float) -> np.ndarray:
    """Per-subcarrier conj(H) z / (|H|^2 + sigma2); zero where the denominator vanishes."""
    z = np.asarray(z)
    h = np.asarray(H_diag)
    if z.shape != h.shape:
        raise ValueError(f"observation and channel differ in shape: {z.shape} vs {h.shape}")
    if sigma2 < 0:
        raise ValueError("sigma2 must be non-negative")
    denom = np.abs(h) ** 2 + sigma2
    num = (np.conj(h) * z).astype(complex)
    return np.divide(num, denom, out=np.zeros_like(num), where=denom > 0)


def qpsk_denoiser(p, tau) -> np.ndarray:
    """Posterior mean of a unit-energy QPSK symbol observed in noise of variance tau."""
    p = np.asarray(p)
    tau = np.asarray(tau, dtype=float)
    return (np.tanh(_SQRT2 * p.real / tau) + 1j * np.tanh(_SQRT2 * p.imag / tau)) / _SQRT2


def _matvec(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    return (A @ x[..., None])[..., 0]


def _channel_terms(G, b: int):
    if isinstance(G, EquivalentChannel):
        full = G.full
        banded = G.banded if G.band_half_width == b else band_truncate(full, b)
        fro, lam = G.frobenius_norm_sq, G.lambda_max
    else:
        full = np.asarray(G, dtype=complex)
        banded = band_truncate(full, b)
        fro = np.sum(np.abs(full) ** 2, axis=(-2, -1))
        lam = gram_lambda_max(full)
    return full, banded, np.asarray(fro, dtype=float), np.asarray(lam, dtype=float)


def cdmamp_iterations(z, G, params: DetectorParams | None = None, sigma2: float | None = None,
                      x_init=None, memory: bool | None = None) -> Iterator[DetectorState]:
    """Run CD-MAMP, yielding the detector state after every iteration.

    ``z`` is an :class:`RxObservation` or an array; ``sigma2`` defaults to the
    observation's noise variance. ``memory`` overrides ``params.memory_enabled``.
    """
    params = params or DetectorParams()
    if isinstance(z, RxObservation):
        if sigma2 is None:
            sigma2 = z.noise_variance
        z = z.z
    z = np.asarray(z, dtype=complex)
    sigma2 = 0.0 if sigma2 is None else float(sigma2)
    use_memory = params.memory_enabled if memory is None else memory
    n = z.shape[-1]
    b = min(params.band_half_width, n - 1)
    full, GB, fro, lam = _channel_terms(G, b)
    if full.shape[-2:] != (n, n) or full.shape[:-2] != z.shape[:-1]:
        raise ValueError(f"channel of shape {full.shape} does not match observation {z.shape}")
    if not (np.isfinite(z).all() and np.isfinite(full).all() and np.isfinite(sigma2)):
        raise ValueError("non-finite observation, channel or noise variance")

    GBt = np.swapaxes(GB, -1, -2)
    if params.hermitian:
        GBt = np.conj(GBt)
    theta = np.divide(n, fro, out=np.zeros_like(fro), where=fro > 0)
    theta_m = np.divide(1.0, lam, out=np.zeros_like(lam), where=lam > 0)
    th = theta[..., None]
    thm = theta_m[..., None]

    x = np.zeros_like(z) if x_init is None else np.array(x_init, dtype=complex)
    gamma = np.zeros_like(z)
    active = np.ones(z.shape[:-1], dtype=bool)
    alpha = params.damping
    for t in range(params.iterations):
        r = z - _matvec(GB, x)
        res_pow = np.mean(np.abs(r) ** 2, axis=-1)
        if params.early_stop_tol is not None:
            active = active & (res_pow >= params.early_stop_tol)
            if not active.any():
                return
        if use_memory:
            gamma_new = gamma - thm * _matvec(GB, _matvec(GBt, gamma)) + thm * r
            p = x + th * _matvec(GBt, gamma_new)
        else:
            gamma_new = gamma
            p = x + th * _matvec(GBt, r)
        tau = np.maximum(sigma2 + res_pow, params.variance_floor)
        tau_eff = tau / 2.0 if params.tau_per_real_dim else tau
        x_und = qpsk_denoiser(p, tau_eff[..., None])
        x_new = alpha * x_und + (1.0 - alpha) * x
        mask = active[..., None]
        x = np.where(mask, x_new, x)
        gamma = np.where(mask, gamma_new, gamma)
        yield DetectorState(t, x, gamma, r, tau, theta, theta_m, p, x_und, active)


def cdmamp_detect(z, G, params: DetectorParams | None = None, sigma2: float | None = None,
                  memory: bool | None = None) -> np.ndarray:
    """Soft symbol estimate after the configured number of CD-MAMP iterations."""
    z_arr = z.z if isinstance(z, RxObservation) else np.asarray(z, dtype=complex)
    x = np.zeros_like(z_arr)
    for state in cdmamp_iterations(z, G, params, sigma2, memory=memory):
        x = state.x_hat
    return x


def cdmamp_detect_memory(z, G, params: DetectorParams | None = None,
                         sigma2: float | None = None) -> np.ndarray:
    """CD-MAMP with the memory (filtered residual) linear step."""
    return cdmamp_detect(z, G, params, sigma2, memory=True)
