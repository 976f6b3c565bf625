"""Walsh-Hadamard and Fourier transforms used by every waveform.

All transforms are unitary (scaled by 1/sqrt(N)) and operate along a chosen
axis, so stacks of blocks or whole matrices can be transformed in one call.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

ORDERINGS = ("natural", "sequency")


class InvalidSizeError(ValueError):
    """Transform length is not a power of two."""


def _log2(n: int) -> int:
    n = int(n)
    if n < 1 or n & (n - 1):
        raise InvalidSizeError(f"size must be a power of two, got {n}")
    return n.bit_length() - 1


def is_power_of_two(n: int) -> bool:
    return n >= 1 and not n & (n - 1)


def _sign_changes(row: np.ndarray) -> int:
    return int(np.count_nonzero(np.diff(np.sign(row)) != 0))


def sylvester_hadamard(n: int) -> np.ndarray:
    """Unnormalized +/-1 Hadamard matrix in natural (Sylvester) order."""
    _log2(n)
    h = np.ones((1, 1))
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return h


@lru_cache(maxsize=None)
def _sequency_permutation(n: int) -> tuple[int, ...]:
    k = _log2(n)
    s = np.arange(n)
    gray = s ^ (s >> 1)
    perm = np.zeros(n, dtype=np.int64)
    for bit in range(k):
        perm |= ((gray >> bit) & 1) << (k - 1 - bit)
    if __debug__ and n <= 1024:
        h = sylvester_hadamard(n)
        assert all(_sign_changes(h[perm[q]]) == q for q in range(n)), n
    return tuple(int(p) for p in perm)


def sequency_permutation(n: int) -> np.ndarray:
    """Natural-order row index for each sequency index.

    Entry ``s`` is the Sylvester row with exactly ``s`` sign changes, obtained
    as the bit reversal of the Gray code of ``s``.
    """
    perm = np.array(_sequency_permutation(int(n)), dtype=np.int64)
    perm.setflags(write=False)
    return perm


def _check_ordering(ordering: str) -> None:
    if ordering not in ORDERINGS:
        raise ValueError(f"ordering must be one of {ORDERINGS}, got {ordering!r}")


def dense_walsh_matrix(n: int, ordering: str = "sequency") -> np.ndarray:
    """Normalized Walsh-Hadamard matrix built from the Sylvester recursion."""
    _check_ordering(ordering)
    h = sylvester_hadamard(n) / np.sqrt(n)
    if ordering == "sequency":
        h = h[sequency_permutation(n)]
    return h


def _butterflies(x: np.ndarray) -> np.ndarray:
    # x is real with the transform axis last; log2(N) add/subtract stages.
    n = x.shape[-1]
    lead = x.shape[:-1]
    h = 1
    while h < n:
        y = x.reshape(*lead, n // (2 * h), 2, h)
        a = y[..., 0, :]
        b = y[..., 1, :]
        x = np.stack((a + b, a - b), axis=-2).reshape(*lead, n)
        h *= 2
    return x


def fwht(v, ordering: str = "sequency", axis: int = -1) -> np.ndarray:
    """Fast unitary Walsh-Hadamard transform along ``axis``.

    Real and imaginary parts go through the butterflies separately, so a
    complex transform costs exactly two real transforms and no multiplies
    before the final 1/sqrt(N) scaling. The transform is its own inverse.
    """
    _check_ordering(ordering)
    v = np.asarray(v)
    n = v.shape[axis]
    _log2(n)
    x = np.moveaxis(v, axis, -1)
    if np.iscomplexobj(x):
        out = _butterflies(x.real.astype(float)) + 1j * _butterflies(x.imag.astype(float))
    else:
        out = _butterflies(x.astype(float))
    if ordering == "sequency":
        out = out[..., sequency_permutation(n)]
    out = out / np.sqrt(n)
    return np.moveaxis(out, -1, axis)


def dft(v, direction: str = "forward", axis: int = -1) -> np.ndarray:
    """Unitary DFT (1/sqrt(N) both ways) along ``axis``."""
    v = np.asarray(v)
    _log2(v.shape[axis])
    if direction == "forward":
        return np.fft.fft(v, axis=axis, norm="ortho")
    if direction == "inverse":
        return np.fft.ifft(v, axis=axis, norm="ortho")
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def dense_dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix F with F[k, m] = exp(-2j*pi*k*m/N)/sqrt(N)."""
    _log2(n)
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)
