"""CP-based block transmission for WHTDM and OFDM.

SNR is defined per complex sample: with unit-energy symbols and unitary
transforms the noise variance is 10**(-snr_db/10) in both the time and the
transform domain. CP samples are sent but do not enter the SNR.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, check_cp
from .modem import SymbolFrame
from .scheme import Scheme
from .transforms import dft, fwht, is_power_of_two


@dataclass(frozen=True)
class TxBlock:
    scheme: Scheme
    payload_symbols: np.ndarray
    time_samples: np.ndarray
    cp_len: int

    @property
    def core(self) -> np.ndarray:
        return self.time_samples[self.cp_len:]


@dataclass(frozen=True)
class RxObservation:
    scheme: Scheme
    z: np.ndarray
    noise_variance: float


def noise_variance(snr_db: float) -> float:
    return 0.0 if np.isposinf(snr_db) else float(10.0 ** (-snr_db / 10.0))


def awgn(shape, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian noise with variance ``sigma2`` per complex sample."""
    if sigma2 == 0.0:
        return np.zeros(shape, dtype=complex)
    scale = np.sqrt(sigma2 / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def transform_to_time(scheme, x, axis: int = -1) -> np.ndarray:
    scheme = Scheme.parse(scheme)
    return fwht(x, axis=axis) if scheme is Scheme.WHTDM else dft(x, "inverse", axis=axis)


def transform_from_time(scheme, y, axis: int = -1) -> np.ndarray:
    scheme = Scheme.parse(scheme)
    return fwht(y, axis=axis) if scheme is Scheme.WHTDM else dft(y, "forward", axis=axis)


def modulate(scheme, frame, cp_len: int) -> TxBlock:
    """Transform one block of symbols to time and prepend the cyclic prefix."""
    scheme = Scheme.parse(scheme)
    x = frame.symbols if isinstance(frame, SymbolFrame) else np.asarray(frame, dtype=complex)
    n = x.shape[-1]
    if not is_power_of_two(n):
        raise ValueError(f"block size must be a power of two, got {n}")
    if not 0 <= cp_len <= n:
        raise ValueError(f"cyclic prefix length must lie in [0, {n}], got {cp_len}")
    s = transform_to_time(scheme, x)
    tx = np.concatenate((s[..., n - cp_len:], s), axis=-1)
    return TxBlock(scheme, x, tx, int(cp_len))


def propagate(tx: TxBlock, ch: ChannelRealization, tx_start: int, snr_db: float,
              rng: np.random.Generator | None = None) -> np.ndarray:
    """Send one CP-extended block through the channel; return the N post-CP samples.

    ``tx_start`` is the realization sample at which the first CP sample leaves
    the transmitter. Each received sample uses the tap gains at its own instant.
    """
    check_cp(ch.max_delay_samples, tx.cp_len)
    s = tx.time_samples
    total = s.shape[-1]
    if tx_start < 0 or tx_start + total > ch.num_samples:
        raise ValueError(f"block [{tx_start}, {tx_start + total}) exceeds the realization "
                         f"of {ch.num_samples} samples")
    gains = ch.taps[:, tx_start:tx_start + total]
    y = np.zeros(total, dtype=complex)
    for lag in range(ch.num_taps):
        y[lag:] += gains[lag, lag:] * s[:total - lag]
    y = y[tx.cp_len:]
    sigma2 = noise_variance(snr_db)
    if sigma2 > 0.0:
        if rng is None:
            raise ValueError("an rng is required at finite SNR")
        y = y + awgn(y.shape, sigma2, rng)
    return y


def demodulate(scheme, y, sigma2: float = 0.0) -> RxObservation:
    scheme = Scheme.parse(scheme)
    y = np.asarray(y, dtype=complex)
    if not is_power_of_two(y.shape[-1]):
        raise ValueError(f"block size must be a power of two, got {y.shape[-1]}")
    return RxObservation(scheme, transform_from_time(scheme, y), float(sigma2))
