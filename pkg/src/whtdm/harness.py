"""Monte Carlo BER cells and sweeps.

A cell is one (scheme, SNR, speed, delay spread, seed) point. Every frame of
every cell draws from its own generator, keyed by hashing the master seed and
the full cell coordinates, so results do not depend on scheduling.
"""
from __future__ import annotations

import csv
import hashlib
import io
import itertools
import logging
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .channel import ChannelRealization, build_channel_matrix, equivalent_channel, load_profile, realize_taps
from .config import SweepConfig
from .equalizer import cdmamp_detect, mmse_one_tap
from .modem import count_bit_errors, demap_qpsk_hard, map_qpsk, random_bits
from .scheme import Scheme
from .waveforms import demodulate, modulate, noise_variance, propagate

log = logging.getLogger(__name__)

CSV_HEADER = ["scheme", "snr_db", "speed_kmh", "delay_spread_ns", "seed",
              "bits_total", "bits_error", "ber"]


class SweepError(RuntimeError):
    """A sweep cell failed."""


@dataclass(frozen=True)
class BerRecord:
    scheme: str
    snr_db: float
    speed_kmh: float
    delay_spread_ns: float
    seed: int
    bits_total: int
    bits_error: int

    def __post_init__(self):
        if not 0 <= self.bits_error <= self.bits_total:
            raise ValueError(f"inconsistent counts {self.bits_error}/{self.bits_total}")

    @property
    def ber(self) -> float:
        return self.bits_error / self.bits_total if self.bits_total else 0.0

    @property
    def cell(self) -> tuple:
        return (self.scheme, self.snr_db, self.speed_kmh, self.delay_spread_ns)

    def sort_key(self) -> tuple:
        return self.cell + (self.seed,)


def frame_rng(master_seed: int, scheme, snr_db: float, speed_kmh: float,
              delay_spread_ns: float, seed: int, frame: int) -> np.random.Generator:
    key = f"{master_seed}|{Scheme.parse(scheme).value}|{float(snr_db)!r}|{float(speed_kmh)!r}|" \
          f"{float(delay_spread_ns)!r}|{int(seed)}|{int(frame)}"
    digest = hashlib.blake2b(key.encode(), digest_size=16).digest()
    return np.random.default_rng(np.random.SeedSequence(int.from_bytes(digest, "little")))


@lru_cache(maxsize=32)
def _profile(name: str, delay_spread_ns: float):
    return load_profile(name, delay_spread_ns)


def simulate_frame(cfg: SweepConfig, scheme, snr_db: float, speed_kmh: float,
                   delay_spread_ns: float, rng: np.random.Generator) -> tuple[int, int]:
    """Simulate one frame; returns (bit errors, bits sent)."""
    scheme = Scheme.parse(scheme)
    n, cp, nb = cfg.N, cfg.L_cp, cfg.blocks_per_frame
    block_len = n + cp
    if cfg.channel == "identity":
        ch = ChannelRealization.static([1.0], cfg.frame_samples, cfg.sample_rate_hz)
    else:
        ch = realize_taps(_profile(cfg.profile, float(delay_spread_ns)), speed_kmh, cfg.carrier_hz,
                          cfg.sample_rate_hz, cfg.frame_samples, rng, cp_len=cp)
    sigma2 = noise_variance(snr_db)
    bits = random_bits(rng, 2 * n * nb)
    x = map_qpsk(bits).symbols.reshape(nb, n)

    z = np.empty((nb, n), dtype=complex)
    for b in range(nb):
        tx = modulate(scheme, x[b], cp)
        y = propagate(tx, ch, b * block_len, snr_db, rng)
        z[b] = demodulate(scheme, y, sigma2).z

    H = build_channel_matrix(ch, n, np.arange(nb) * block_len + cp)
    eq = equivalent_channel(H, scheme, cfg.detector.band_half_width)
    if scheme is Scheme.OFDM:
        h_diag = eq.diagonal
        if cfg.ofdm_csi == "frame":
            h_diag = np.broadcast_to(h_diag[nb // 2], h_diag.shape)
        x_hat = mmse_one_tap(z, h_diag, sigma2)
    else:
        x_hat = cdmamp_detect(z, eq, cfg.detector, sigma2)
    return count_bit_errors(demap_qpsk_hard(x_hat).reshape(-1), bits), bits.size


def run_cell(cfg: SweepConfig, scheme, snr_db: float, speed_kmh: float,
             delay_spread_ns: float, seed: int) -> BerRecord:
    scheme = Scheme.parse(scheme)
    errors = total = 0
    for frame in range(cfg.frames_per_seed):
        rng = frame_rng(cfg.master_seed, scheme, snr_db, speed_kmh, delay_spread_ns, seed, frame)
        e, t = simulate_frame(cfg, scheme, snr_db, speed_kmh, delay_spread_ns, rng)
        errors += e
        total += t
    return BerRecord(scheme.value, float(snr_db), float(speed_kmh), float(delay_spread_ns),
                     int(seed), total, errors)


def sweep_cells(cfg: SweepConfig) -> list[tuple]:
    return list(itertools.product(cfg.schemes, cfg.snr_db, cfg.speeds_kmh,
                                  cfg.delay_spreads_ns, range(cfg.seeds)))


def _run_cell_args(args):
    cfg, cell = args
    try:
        return run_cell(cfg, *cell)
    except Exception as exc:
        scheme, snr, speed, spread, seed = cell
        raise SweepError(f"cell scheme={scheme} snr_db={snr} speed_kmh={speed} "
                         f"delay_spread_ns={spread} seed={seed} failed: {exc!r}") from exc


def run_sweep(cfg: SweepConfig, workers: int = 1) -> list[BerRecord]:
    """Run every grid cell and seed; records are returned in canonical order."""
    cells = sweep_cells(cfg)
    log.info("running %d cells with %d worker(s)", len(cells), workers)
    jobs = [(cfg, c) for c in cells]
    records = []
    if workers <= 1:
        for i, job in enumerate(jobs, 1):
            records.append(_run_cell_args(job))
            log.debug("cell %d/%d done", i, len(jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, rec in enumerate(pool.map(_run_cell_args, jobs), 1):
                records.append(rec)
                log.debug("cell %d/%d done", i, len(jobs))
    return sorted(records, key=BerRecord.sort_key)


def _g(x: float) -> str:
    return format(x, ".6g")


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(records, key=BerRecord.sort_key):
        w.writerow([r.scheme, _g(r.snr_db), _g(r.speed_kmh), _g(r.delay_spread_ns), r.seed,
                    r.bits_total, r.bits_error, _g(r.ber)])
    return buf.getvalue()


def write_csv(records, path: str | Path) -> None:
    path = Path(path)
    try:
        path.write_text(records_to_csv(records))
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def parse_csv(text: str) -> list[BerRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError("missing or unexpected CSV header")
    return [BerRecord(row[0], float(row[1]), float(row[2]), float(row[3]), int(row[4]),
                      int(row[5]), int(row[6])) for row in rows[1:] if row]


def read_csv(path: str | Path) -> list[BerRecord]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read results from {path}: {exc}") from exc
    return parse_csv(text)


@dataclass(frozen=True)
class SummaryRow:
    scheme: str
    snr_db: float
    speed_kmh: float
    delay_spread_ns: float
    n_seeds: int
    mean_ber: float
    min_ber: float
    max_ber: float
    bits_total: int
    bits_error: int
    complete: bool

    @property
    def pooled_ber(self) -> float:
        return self.bits_error / self.bits_total if self.bits_total else 0.0

    @property
    def cell(self) -> tuple:
        return (self.scheme, self.snr_db, self.speed_kmh, self.delay_spread_ns)

    def std_error(self) -> float:
        p = self.pooled_ber
        return math.sqrt(p * (1 - p) / self.bits_total) if self.bits_total else 0.0


def summarize(records, expected_seeds: int | None = None) -> list[SummaryRow]:
    """Seed-mean BER per cell; cells with a short seed count are flagged incomplete."""
    groups = defaultdict(list)
    for r in records:
        groups[r.cell].append(r)
    if expected_seeds is None:
        expected_seeds = max((len(v) for v in groups.values()), default=0)
    rows = []
    for cell in sorted(groups):
        recs = groups[cell]
        bers = [r.ber for r in recs]
        n_seeds = len({r.seed for r in recs})
        rows.append(SummaryRow(*cell, n_seeds=n_seeds, mean_ber=float(np.mean(bers)),
                               min_ber=min(bers), max_ber=max(bers),
                               bits_total=sum(r.bits_total for r in recs),
                               bits_error=sum(r.bits_error for r in recs),
                               complete=n_seeds == expected_seeds and n_seeds == len(recs)))
    return rows


SUMMARY_HEADER = ["scheme", "snr_db", "speed_kmh", "delay_spread_ns", "n_seeds", "mean_ber",
                  "min_ber", "max_ber", "pooled_ber", "bits_total", "bits_error", "complete"]


def summary_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for s in rows:
        w.writerow([s.scheme, _g(s.snr_db), _g(s.speed_kmh), _g(s.delay_spread_ns), s.n_seeds,
                    _g(s.mean_ber), _g(s.min_ber), _g(s.max_ber), _g(s.pooled_ber),
                    s.bits_total, s.bits_error, int(s.complete)])
    return buf.getvalue()


def summary_to_text(rows) -> str:
    lines = [f"{'scheme':<7}{'snr_db':>8}{'speed':>8}{'spread':>8}{'seeds':>7}"
             f"{'mean_ber':>12}{'min_ber':>12}{'max_ber':>12}"]
    for s in rows:
        flag = "" if s.complete else "  INCOMPLETE"
        lines.append(f"{s.scheme:<7}{_g(s.snr_db):>8}{_g(s.speed_kmh):>8}{_g(s.delay_spread_ns):>8}"
                     f"{s.n_seeds:>7}{s.mean_ber:>12.3e}{s.min_ber:>12.3e}{s.max_ber:>12.3e}{flag}")
    return "\n".join(lines)


def snr_monotonicity_violations(rows, k: float = 2.0) -> list[tuple]:
    """Adjacent SNR pairs where BER rises by more than k combined binomial standard errors."""
    series = defaultdict(list)
    for s in rows:
        series[(s.scheme, s.speed_kmh, s.delay_spread_ns)].append(s)
    bad = []
    for key, cells in series.items():
        cells.sort(key=lambda s: s.snr_db)
        for lo, hi in zip(cells, cells[1:]):
            slack = k * math.hypot(lo.std_error(), hi.std_error())
            if hi.mean_ber - lo.mean_ber > slack:
                bad.append(key + (lo.snr_db, hi.snr_db))
    return bad
