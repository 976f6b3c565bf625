"""Sweep configuration: flat ``key = value`` text with dotted keys.

Lists are comma-separated, ``#`` starts a comment, and any key may be
overridden with ``key=value`` strings (the CLI's ``--set``).
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .equalizer import DetectorParams
from .scheme import Scheme

CHANNEL_MODELS = ("tdl", "identity")
OFDM_CSI_MODES = ("block", "frame")


@dataclass(frozen=True)
class SweepConfig:
    schemes: tuple[Scheme, ...] = (Scheme.WHTDM, Scheme.OFDM)
    snr_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    speeds_kmh: tuple[float, ...] = (0.0, 120.0, 500.0)
    delay_spreads_ns: tuple[float, ...] = (30.0, 100.0, 300.0)
    seeds: int = 10
    frames_per_seed: int = 300
    detector: DetectorParams = field(default_factory=DetectorParams)
    profile: str = "tdl_c"
    carrier_hz: float = 28e9
    subcarrier_spacing_hz: float = 120e3
    N: int = 64
    L_cp: int = 32
    blocks_per_frame: int = 16
    master_seed: int = 0
    # "identity" replaces the fading channel by a unit single tap
    channel: str = "tdl"
    # "frame" reuses the mid-frame channel for every OFDM block's one-tap equalizer
    ofdm_csi: str = "block"

    def __post_init__(self):
        for name in ("seeds", "frames_per_seed", "N", "blocks_per_frame"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.L_cp < 0:
            raise ValueError("L_cp must be non-negative")
        if any(s < 0 for s in self.speeds_kmh):
            raise ValueError("speeds must be non-negative")
        if any(d < 0 for d in self.delay_spreads_ns):
            raise ValueError("delay spreads must be non-negative")
        if not self.schemes:
            raise ValueError("at least one scheme is required")
        if self.channel not in CHANNEL_MODELS:
            raise ValueError(f"channel must be one of {CHANNEL_MODELS}")
        if self.ofdm_csi not in OFDM_CSI_MODES:
            raise ValueError(f"ofdm_csi must be one of {OFDM_CSI_MODES}")

    @property
    def sample_rate_hz(self) -> float:
        return self.N * self.subcarrier_spacing_hz

    @property
    def frame_samples(self) -> int:
        return self.blocks_per_frame * (self.N + self.L_cp)

    def replace(self, **changes) -> "SweepConfig":
        return dataclasses.replace(self, **changes)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _optional_float(text: str) -> float | None:
    return None if text.strip().lower() in ("", "none", "off") else float(text)


_TOP = {
    "schemes": lambda t: tuple(Scheme.parse(v) for v in t.split(",") if v.strip()),
    "snr_db": _floats,
    "speeds_kmh": _floats,
    "delay_spreads_ns": _floats,
    "seeds": int,
    "frames_per_seed": int,
    "profile": str.strip,
    "carrier_hz": float,
    "subcarrier_spacing_hz": float,
    "N": int,
    "L_cp": int,
    "blocks_per_frame": int,
    "master_seed": int,
    "channel": lambda t: t.strip().lower(),
    "ofdm_csi": lambda t: t.strip().lower(),
}
_DETECTOR = {
    "iterations": int,
    "damping": float,
    "band_half_width": int,
    "variance_floor": float,
    "memory_enabled": _bool,
    "early_stop_tol": _optional_float,
    "hermitian": _bool,
    "tau_per_real_dim": _bool,
}


def parse_assignments(lines) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def config_from_mapping(values: dict[str, str], base: SweepConfig | None = None) -> SweepConfig:
    base = base or SweepConfig()
    top, det = {}, {}
    for key, text in values.items():
        if key.startswith("detector."):
            sub = key.split(".", 1)[1]
            if sub not in _DETECTOR:
                raise ValueError(f"unknown config key {key!r}")
            det[sub] = _DETECTOR[sub](text)
        elif key in _TOP:
            top[key] = _TOP[key](text)
        else:
            raise ValueError(f"unknown config key {key!r}")
    if det:
        top["detector"] = dataclasses.replace(base.detector, **det)
    return dataclasses.replace(base, **top)


def load_config(path: str | Path | None = None, overrides=()) -> SweepConfig:
    values = {}
    if path is not None:
        values.update(parse_assignments(Path(path).read_text().splitlines()))
    values.update(parse_assignments(overrides))
    return config_from_mapping(values)


def config_to_text(cfg: SweepConfig) -> str:
    def fmt(v):
        if isinstance(v, tuple):
            return ", ".join(fmt(x) for x in v)
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, Scheme):
            return v.value
        return "none" if v is None else str(v)

    lines = [f"{k} = {fmt(getattr(cfg, k))}" for k in _TOP]
    lines += [f"detector.{k} = {fmt(getattr(cfg.detector, k))}" for k in _DETECTOR]
    return "\n".join(lines) + "\n"
