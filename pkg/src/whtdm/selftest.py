"""Quick oracle checks shipped with the package (``whtdm selftest``)."""
from __future__ import annotations

import numpy as np

from . import channel, complexity, equalizer, modem, transforms


def _sign_change_order(n):
    h = transforms.sylvester_hadamard(n)
    counts = [int(np.count_nonzero(np.diff(np.sign(r)))) for r in h]
    return np.argsort(counts, kind="stable")


def check_sequency():
    for n in (1, 2, 4, 8, 16, 32, 64):
        assert np.array_equal(transforms.sequency_permutation(n), _sign_change_order(n)), n


def check_fwht_dense():
    rng = np.random.default_rng(1)
    for n in (2, 4, 8, 16, 64, 128):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        for ordering in transforms.ORDERINGS:
            ref = transforms.dense_walsh_matrix(n, ordering) @ v
            assert np.max(np.abs(transforms.fwht(v, ordering) - ref)) < 1e-10


def check_dft_naive():
    rng = np.random.default_rng(2)
    n = 64
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    k = np.arange(n)
    naive = np.array([np.sum(v * np.exp(-2j * np.pi * q * k / n)) for q in k]) / np.sqrt(n)
    assert np.max(np.abs(transforms.dft(v) - naive)) < 1e-10


def check_circulant_diagonal():
    rng = np.random.default_rng(3)
    taps = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    ch = channel.ChannelRealization.static(taps, 256)
    H = channel.build_channel_matrix(ch, 64, 32)
    D = channel.equivalent_channel(H, "OFDM").full
    off = D - np.diag(np.diag(D))
    assert np.max(np.abs(off)) < 1e-10
    padded = np.zeros(64, complex)
    padded[:3] = taps
    assert np.allclose(np.diag(D), np.fft.fft(padded), atol=1e-10)


def check_modem_roundtrip():
    bits = np.array([[a, b] for a in (0, 1) for b in (0, 1)]).ravel()
    assert np.array_equal(modem.demap_qpsk_hard(modem.map_qpsk(bits).symbols), bits)


def check_denoiser():
    assert abs(equalizer.qpsk_denoiser(0.5, 1.0).real - np.tanh(np.sqrt(2) * 0.5) / np.sqrt(2)) < 1e-12


def check_table():
    for scheme in ("WHTDM", "OFDM", "OTSM", "OTFS"):
        got = complexity.scheme_tx_ops(scheme)
        assert (got.real_mults, got.real_adds) == complexity.PUBLISHED[scheme], scheme


CHECKS = {
    "sequency permutation vs sign changes": check_sequency,
    "fwht vs dense matrix": check_fwht_dense,
    "dft vs direct summation": check_dft_naive,
    "static OFDM channel is diagonal": check_circulant_diagonal,
    "qpsk round trip": check_modem_roundtrip,
    "denoiser scalar value": check_denoiser,
    "complexity table rows": check_table,
}


def run(out=print) -> bool:
    ok = True
    for name, fn in CHECKS.items():
        try:
            fn()
        except AssertionError as exc:
            ok = False
            out(f"FAIL  {name} {exc}")
        else:
            out(f"PASS  {name}")
    return ok
