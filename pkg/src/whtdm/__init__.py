"""WHTDM and CP-OFDM link simulation with CD-MAMP detection."""
from .channel import (
    ChannelRealization,
    ConfigurationError,
    DelayProfile,
    EquivalentChannel,
    band_truncate,
    build_channel_matrix,
    doppler_frequency,
    equivalent_channel,
    frobenius_capture,
    load_profile,
    realize_taps,
)
from .complexity import OpCount, fft_op_count, fwht_op_count, scheme_tx_ops
from .config import SweepConfig, load_config
from .equalizer import (
    DetectorParams,
    cdmamp_detect,
    cdmamp_detect_memory,
    mmse_one_tap,
    qpsk_denoiser,
)
from .harness import BerRecord, run_cell, run_sweep, summarize, write_csv
from .modem import SymbolFrame, count_bit_errors, demap_qpsk_hard, map_qpsk
from .scheme import Scheme
from .transforms import InvalidSizeError, dense_walsh_matrix, dft, fwht, sequency_permutation
from .waveforms import RxObservation, TxBlock, demodulate, modulate, propagate

__version__ = "0.1.0"
