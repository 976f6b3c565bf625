"""Real-operation counts of each scheme's transmitter transform stage.

Conventions: radix-2 butterflies without twiddle pruning, one complex multiply
= 4 real multiplies + 2 real adds, one complex add = 2 real adds, and the
1/sqrt(N) WHT normalization folded into the downstream gain.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .transforms import _log2

SCHEMES = ("WHTDM", "OFDM", "OTFS", "OTSM", "AFDM")

# per 1024-symbol block, M = 64, N = 16
PUBLISHED = {
    "WHTDM": (0, 12288),
    "OFDM": (12288, 18432),
    "OTFS": (32768, 49152),
    "OTSM": (0, 8192),
    "AFDM": (20480, 22528),
}
# no single counting convention reproduces the published AFDM row
UNVERIFIED = frozenset({"AFDM"})


@dataclass(frozen=True)
class OpCount:
    real_mults: int = 0
    real_adds: int = 0

    def __post_init__(self):
        if self.real_mults < 0 or self.real_adds < 0:
            raise ValueError("operation counts must be non-negative")

    @property
    def total(self) -> int:
        return self.real_mults + self.real_adds

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(self.real_mults + other.real_mults, self.real_adds + other.real_adds)

    def __rmul__(self, k: int) -> "OpCount":
        return OpCount(k * self.real_mults, k * self.real_adds)

    __mul__ = __rmul__


def complex_ops(mults: int = 0, adds: int = 0) -> OpCount:
    return OpCount(4 * mults, 2 * mults + 2 * adds)


def fft_op_count(n: int) -> OpCount:
    """Radix-2 FFT: (n/2) log2 n complex multiplies and n log2 n complex adds."""
    k = _log2(n)
    return complex_ops(mults=n // 2 * k, adds=n * k)


def fwht_op_count(n: int, complex_input: bool = True) -> OpCount:
    """FWHT: n log2 n real adds per real transform, no multiplies."""
    k = _log2(n)
    adds = n * k
    return OpCount(0, 2 * adds if complex_input else adds)


def scheme_tx_ops(scheme: str, M: int = 64, N: int = 16) -> OpCount:
    """Transform-stage cost of one M x N symbol block."""
    scheme = str(scheme).upper()
    if scheme == "WHTDM":
        return N * fwht_op_count(M)
    if scheme == "OFDM":
        return N * fft_op_count(M)
    if scheme == "OTSM":
        return M * fwht_op_count(N)
    if scheme == "OTFS":
        return fft_op_count(M * N) + N * fft_op_count(M)
    if scheme == "AFDM":
        # one (MN)-point DFT plus two length-MN chirp multiplications
        return fft_op_count(M * N) + complex_ops(mults=2 * M * N)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


@dataclass(frozen=True)
class ComplexityRow:
    scheme: str
    derived: OpCount
    published: OpCount
    ratio_vs_whtdm: float
    matches_published: bool
    verified: bool


def complexity_table(M: int = 64, N: int = 16) -> list[ComplexityRow]:
    base = scheme_tx_ops("WHTDM", M, N).total
    rows = []
    for s in SCHEMES:
        derived = scheme_tx_ops(s, M, N)
        published = OpCount(*PUBLISHED[s]) if (M, N) == (64, 16) else derived
        rows.append(ComplexityRow(s, derived, published, derived.total / base,
                                  derived == published, s not in UNVERIFIED))
    return rows


def format_table_text(rows: list[ComplexityRow]) -> str:
    head = (f"{'scheme':<7}{'real_mults':>12}{'real_adds':>12}{'vs_WHTDM':>10}"
            f"{'pub_mults':>13}{'pub_adds':>12}  note")
    lines = [head]
    for r in rows:
        if r.matches_published:
            note = "matches"
        elif r.verified:
            note = "MISMATCH"
        else:
            note = "differs from published row (convention unknown)"
        lines.append(f"{r.scheme:<7}{r.derived.real_mults:>12,}{r.derived.real_adds:>12,}"
                     f"{r.ratio_vs_whtdm:>9.1f}x{r.published.real_mults:>13,}"
                     f"{r.published.real_adds:>12,}  {note}")
    return "\n".join(lines)


def format_table_csv(rows: list[ComplexityRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme", "real_mults", "real_adds", "ratio_vs_whtdm",
                "published_mults", "published_adds", "matches_published"])
    for r in rows:
        w.writerow([r.scheme, r.derived.real_mults, r.derived.real_adds, f"{r.ratio_vs_whtdm:.6g}",
                    r.published.real_mults, r.published.real_adds, int(r.matches_published)])
    return buf.getvalue()
