"""Gray-mapped QPSK and bit error counting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SCALE = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class SymbolFrame:
    symbols: np.ndarray
    source_bits: np.ndarray

    def __len__(self) -> int:
        return self.symbols.shape[-1]


def _as_bits(bits) -> np.ndarray:
    b = np.asarray(bits)
    if b.size and not np.isin(b, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    return b.astype(np.uint8)


def map_qpsk(bits) -> SymbolFrame:
    """Map bit pairs to unit-energy QPSK: first bit sets the real sign, second the imaginary."""
    b = _as_bits(bits)
    if b.shape[-1] % 2:
        raise ValueError(f"QPSK mapping needs an even number of bits, got {b.shape[-1]}")
    re = 1.0 - 2.0 * b[..., 0::2]
    im = 1.0 - 2.0 * b[..., 1::2]
    return SymbolFrame(symbols=(re + 1j * im) * _SCALE, source_bits=b)


def demap_qpsk_hard(symbols) -> np.ndarray:
    """Sign decisions; an exactly-zero component decodes as bit 0."""
    x = np.asarray(symbols)
    out = np.empty(x.shape[:-1] + (2 * x.shape[-1],), dtype=np.uint8)
    out[..., 0::2] = np.real(x) < 0
    out[..., 1::2] = np.imag(x) < 0
    return out


def count_bit_errors(a, b) -> int:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"bit blocks differ in shape: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))


def random_bits(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, 2, size=n, dtype=np.uint8)
