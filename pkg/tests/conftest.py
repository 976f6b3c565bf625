import itertools

import numpy as np
import pytest

from whtdm.channel import build_channel_matrix, equivalent_channel, load_profile, realize_taps
from whtdm.waveforms import noise_variance

QPSK = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2)


def sign_change_order(n):
    """Sylvester row indices sorted by sign-change count, built without the Gray code."""
    h = np.array([[1.0]])
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    counts = [int(np.sum(r[1:] != r[:-1])) for r in h]
    return np.argsort(counts, kind="stable"), counts


def random_qpsk(rng, n):
    bits = rng.integers(0, 2, 2 * n)
    return ((1 - 2 * bits[0::2]) + 1j * (1 - 2 * bits[1::2])) / np.sqrt(2), bits


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def well_conditioned(rng, n=8, max_cond=10.0):
    while True:
        G = np.eye(n) + 0.5 * crandn(rng, n, n) / np.sqrt(n)
        if np.linalg.cond(G) <= max_cond:
            return G


def ml_detect(z, G):
    """Exhaustive search over every QPSK vector of length len(z)."""
    n = len(z)
    cands = np.array(list(itertools.product(QPSK, repeat=n)))
    cost = np.sum(np.abs(z[None, :] - cands @ G.T) ** 2, axis=1)
    return cands[np.argmin(cost)]


def hard(x):
    return np.sign(x.real) + 1j * np.sign(x.imag)


def whtdm_instance(seed, snr_db=20.0, speed=120.0):
    r = np.random.default_rng(seed)
    ch = realize_taps(load_profile("tdl_c", 100.0), speed, 28e9, 7.68e6, 96, r)
    eq = equivalent_channel(build_channel_matrix(ch, 64, 32), "WHTDM")
    x, _ = random_qpsk(r, 64)
    s2 = noise_variance(snr_db)
    z = eq.full @ x + np.sqrt(s2 / 2) * (r.standard_normal(64) + 1j * r.standard_normal(64))
    return eq, x, z, s2


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


# acceptance verdicts, echoed in the terminal summary
ACCEPTANCE = []


def report(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
