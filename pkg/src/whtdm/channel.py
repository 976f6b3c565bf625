"""Doubly-selective tapped-delay-line channel and equivalent channel matrices.

Each path of the delay profile is an independent sum-of-sinusoids Rayleigh
process with a Jakes Doppler spectrum. Path delays are rounded onto the sample
grid, and paths that land on the same sample are summed into one tap.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .scheme import Scheme
from .transforms import dft, fwht, is_power_of_two

SPEED_OF_LIGHT = 299_792_458.0
N_OSCILLATORS = 32


class ConfigurationError(ValueError):
    """Channel and waveform parameters are inconsistent."""


@dataclass(frozen=True)
class DelayProfile:
    """Power delay profile with delays normalized to the RMS delay spread."""

    name: str
    delays: np.ndarray
    powers_db: np.ndarray
    rms_delay_spread_ns: float = 100.0

    def __post_init__(self):
        delays = np.asarray(self.delays, dtype=float)
        powers = np.asarray(self.powers_db, dtype=float)
        if delays.ndim != 1 or delays.shape != powers.shape or delays.size == 0:
            raise ValueError("delays and powers must be equal-length non-empty 1-D arrays")
        if (delays < 0).any() or (np.diff(delays) < 0).any():
            raise ValueError(f"profile {self.name!r}: delays must be non-negative and non-decreasing")
        if self.rms_delay_spread_ns < 0:
            raise ValueError("rms_delay_spread_ns must be non-negative")
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "powers_db", powers)

    def linear_powers(self) -> np.ndarray:
        p = 10.0 ** (self.powers_db / 10.0)
        return p / p.sum()

    def delays_seconds(self) -> np.ndarray:
        return self.delays * self.rms_delay_spread_ns * 1e-9

    def sample_delays(self, sample_rate_hz: float) -> np.ndarray:
        # np.rint rounds half to even; exact .5 delays are measure-zero in practice
        return np.rint(self.delays_seconds() * sample_rate_hz).astype(np.int64)

    def with_delay_spread(self, rms_delay_spread_ns: float) -> "DelayProfile":
        return dataclasses.replace(self, rms_delay_spread_ns=float(rms_delay_spread_ns))


def parse_profile(text: str, name: str = "custom", rms_delay_spread_ns: float = 100.0) -> DelayProfile:
    delays, powers = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ValueError(f"profile {name!r} line {lineno}: expected 'normalized_delay power_db'")
        delays.append(float(fields[0]))
        powers.append(float(fields[1]))
    return DelayProfile(name, np.array(delays), np.array(powers), rms_delay_spread_ns)


def load_profile(name_or_path: str | Path = "tdl_c", rms_delay_spread_ns: float = 100.0) -> DelayProfile:
    """Load a bundled profile by name (``tdl_c``) or a profile file by path."""
    path = Path(name_or_path)
    if path.suffix or path.exists():
        text = path.read_text()
        name = path.stem
    else:
        name = str(name_or_path).lower().replace("-", "_")
        try:
            text = resources.files("whtdm.profiles").joinpath(f"{name}.txt").read_text()
        except FileNotFoundError:
            raise ValueError(f"no bundled delay profile named {name_or_path!r}") from None
    return parse_profile(text, name, rms_delay_spread_ns)


def flat_profile() -> DelayProfile:
    return DelayProfile("flat", np.zeros(1), np.zeros(1), 0.0)


@dataclass(frozen=True)
class ChannelRealization:
    """Per-sample complex tap gains ``taps[l, n]`` for delay ``l`` samples."""

    taps: np.ndarray
    sample_rate: float
    doppler_hz: float

    @property
    def num_taps(self) -> int:
        return self.taps.shape[0]

    @property
    def max_delay_samples(self) -> int:
        return self.taps.shape[0] - 1

    @property
    def num_samples(self) -> int:
        return self.taps.shape[1]

    @classmethod
    def static(cls, taps, num_samples: int, sample_rate: float = 7.68e6) -> "ChannelRealization":
        """Time-invariant realization with the given tap vector."""
        taps = np.asarray(taps, dtype=complex).reshape(-1, 1)
        return cls(np.repeat(taps, num_samples, axis=1), sample_rate, 0.0)


def doppler_frequency(speed_kmh: float, carrier_hz: float) -> float:
    """Maximum Doppler shift in Hz."""
    return speed_kmh / 3.6 * carrier_hz / SPEED_OF_LIGHT


def check_cp(max_delay_samples: int, cp_len: int) -> None:
    if max_delay_samples > cp_len:
        raise ConfigurationError(
            f"channel memory of {max_delay_samples} samples exceeds the cyclic prefix of {cp_len}")


def _phasors(omega: np.ndarray, t: np.ndarray, chunk: int = 64) -> np.ndarray:
    # exp(j*w*t) with t split as coarse + fine offsets: two small exp tables
    # and one product instead of a full-size exp
    n = t.size
    n_coarse = -(-n // chunk)
    dt = t[1] - t[0] if n > 1 else 0.0
    fine = np.exp(1j * omega[..., None] * (np.arange(chunk) * dt))
    coarse = np.exp(1j * omega[..., None] * (t[0] + np.arange(n_coarse) * chunk * dt))
    out = coarse[..., :, None] * fine[..., None, :]
    return out.reshape(omega.shape + (n_coarse * chunk,))[..., :n]


def realize_taps(profile: DelayProfile, speed_kmh: float, carrier_hz: float, sample_rate_hz: float,
                 num_samples: int, rng_seed=None, cp_len: int | None = None,
                 n_oscillators: int = N_OSCILLATORS) -> ChannelRealization:
    """Draw one time-varying realization of ``profile``.

    Every path is sum_m exp(j(2*pi*f_d*cos(a_m)*t + phi_m)) over ``n_oscillators``
    terms with uniform arrival angles a_m and phases phi_m, scaled to the path
    power. At zero speed this collapses to one constant Rayleigh gain per path.
    """
    if speed_kmh < 0:
        raise ValueError("speed must be non-negative")
    if num_samples < 1:
        raise ValueError("num_samples must be positive")
    rng = np.random.default_rng(rng_seed)
    delay_idx = profile.sample_delays(sample_rate_hz)
    max_delay = int(delay_idx.max())
    if cp_len is not None:
        check_cp(max_delay, cp_len)
    fd = doppler_frequency(speed_kmh, carrier_hz)
    powers = profile.linear_powers()
    n_paths = powers.size

    angles = rng.uniform(0.0, 2.0 * np.pi, size=(n_paths, n_oscillators))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(n_paths, n_oscillators))
    t = np.arange(num_samples) / sample_rate_hz
    if fd == 0.0:
        gains = np.exp(1j * phases).sum(axis=1)[:, None] * np.ones(num_samples)
    else:
        omega = 2.0 * np.pi * fd * np.cos(angles)
        gains = np.einsum("pm,pmn->pn", np.exp(1j * phases), _phasors(omega, t))
    gains *= np.sqrt(powers / n_oscillators)[:, None]

    taps = np.zeros((max_delay + 1, num_samples), dtype=complex)
    np.add.at(taps, delay_idx, gains)
    return ChannelRealization(taps, float(sample_rate_hz), fd)


def build_channel_matrix(ch: ChannelRealization, n: int, core_start) -> np.ndarray:
    """Cyclic (CP-absorbed) time-varying channel matrix of one block.

    ``H[k, (k - l) % n] += taps[l, core_start + k]``: each tap is sampled at the
    receive instant. ``core_start`` is the first post-CP sample; an array of
    starts yields a stack of matrices.
    """
    starts = np.asarray(core_start, dtype=np.int64)
    if (starts < ch.max_delay_samples).any() or (starts + n > ch.num_samples).any():
        raise ValueError(f"block at {core_start} (size {n}) lies outside the realization "
                         f"of {ch.num_samples} samples with memory {ch.max_delay_samples}")
    rows = np.arange(n)
    idx = starts[..., None] + rows
    H = np.zeros(starts.shape + (n, n), dtype=complex)
    for lag in range(ch.num_taps):
        H[..., rows, (rows - lag) % n] += ch.taps[lag][idx]
    return H


@dataclass(frozen=True)
class EquivalentChannel:
    """Transform-domain channel of one block (or a stack of blocks)."""

    scheme: Scheme
    full: np.ndarray
    banded: np.ndarray
    band_half_width: int
    frobenius_norm_sq: np.ndarray | float
    lambda_max: np.ndarray | float

    @property
    def n(self) -> int:
        return self.full.shape[-1]

    @property
    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.full, axis1=-2, axis2=-1)


def gram_lambda_max(G: np.ndarray, max_iter: int = 100, rtol: float = 1e-6):
    """Largest eigenvalue of G^H G by power iteration from the all-ones vector."""
    G = np.asarray(G)
    n = G.shape[-1]
    gram = np.conj(np.swapaxes(G, -1, -2)) @ G
    v = np.ones(G.shape[:-1], dtype=complex) / np.sqrt(n)
    lam = np.zeros(G.shape[:-2])
    done = np.zeros(G.shape[:-2], dtype=bool)
    for it in range(max_iter):
        w = (gram @ v[..., None])[..., 0]
        lam_new = np.real(np.sum(np.conj(v) * w, axis=-1))
        norm = np.linalg.norm(w, axis=-1, keepdims=True)
        v = np.divide(w, norm, out=np.zeros_like(w), where=norm > 0)
        # converged members are frozen so a stack matches separate calls
        lam_new = np.where(done, lam, lam_new)
        if it > 0:
            done = done | (np.abs(lam_new - lam) <= rtol * np.abs(lam_new))
        lam = lam_new
        if done.all():
            break
    return float(lam) if lam.ndim == 0 else lam


def _band_mask(n: int, b: int) -> np.ndarray:
    i, j = np.indices((n, n))
    return np.abs(i - j) <= b


def band_truncate(G, b: int) -> np.ndarray:
    """Zero every entry with |i - j| > b; no cyclic wrap-around."""
    full = G.full if isinstance(G, EquivalentChannel) else np.asarray(G)
    n = full.shape[-1]
    if not 0 <= b <= n - 1:
        raise ValueError(f"band half-width must lie in [0, {n - 1}], got {b}")
    return np.where(_band_mask(n, b), full, 0)


def frobenius_capture(G, b: int):
    """||G_B||_F / ||G||_F, defined as 1.0 for a zero matrix."""
    full = G.full if isinstance(G, EquivalentChannel) else np.asarray(G)
    kept = np.linalg.norm(band_truncate(full, b), axis=(-2, -1))
    total = np.linalg.norm(full, axis=(-2, -1))
    ratio = np.divide(kept, total, out=np.ones_like(total), where=total > 0)
    return float(ratio) if ratio.ndim == 0 else ratio


def equivalent_channel(H, scheme, band_half_width: int = 8) -> EquivalentChannel:
    """W^T H W (sequency WHT) for WHTDM or F H F^H for OFDM, with band and spectral data."""
    scheme = Scheme.parse(scheme)
    H = np.asarray(H, dtype=complex)
    if H.ndim < 2 or H.shape[-1] != H.shape[-2] or not is_power_of_two(H.shape[-1]):
        raise ValueError(f"channel matrix must be square with power-of-two size, got {H.shape}")
    n = H.shape[-1]
    band_half_width = min(int(band_half_width), n - 1)
    if scheme is Scheme.WHTDM:
        # W symmetric: W H W = transform columns, then rows
        full = fwht(fwht(H, axis=-2), axis=-1)
    else:
        full = dft(dft(H, "forward", axis=-2), "inverse", axis=-1)
    fro = np.sum(np.abs(full) ** 2, axis=(-2, -1))
    return EquivalentChannel(
        scheme=scheme,
        full=full,
        banded=band_truncate(full, band_half_width),
        band_half_width=band_half_width,
        frobenius_norm_sq=float(fro) if fro.ndim == 0 else fro,
        lambda_max=gram_lambda_max(full),
    )
