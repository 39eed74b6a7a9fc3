"""MFCC extraction and per-song mean fingerprints."""
from dataclasses import dataclass
import csv
import io

import numpy as np
from scipy.fft import dct

from .audio_io import frame_signal
from .errors import EmptyInput, InvalidBand

MGB = "MGB"
OTHER = "Other"
LABELS = (MGB, OTHER)

N_COEFFS = 20
COEFF_NAMES = tuple(f"C{i:02d}" for i in range(1, N_COEFFS + 1))
CSV_HEADER = ("source_id", "label") + COEFF_NAMES

PRE_EMPHASIS = 0.97
LOG_FLOOR = 1e-10


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True, eq=False)
class MelFilterbank:
    weights: np.ndarray  # (n_filters, fft_size // 2 + 1)
    centers: np.ndarray  # Hz
    f_min: float
    f_max: float
    sample_rate: int
    fft_size: int

    @property
    def n_filters(self):
        return self.weights.shape[0]


def build_filterbank(sample_rate, fft_size, n_filters, f_min=0.0, f_max=None):
    """Triangular filters with centers evenly spaced on the mel scale.

    Filter ``i`` rises from center ``i-1`` to center ``i`` and falls to
    center ``i+1``; ``f_min`` and ``f_max`` act as the outer edges.
    """
    if f_max is None:
        f_max = sample_rate / 2.0
    if not 0.0 <= f_min < f_max <= sample_rate / 2.0:
        raise InvalidBand(
            f"need 0 <= f_min < f_max <= sample_rate/2, got f_min={f_min}, "
            f"f_max={f_max}, sample_rate={sample_rate}")
    if n_filters < 1:
        raise InvalidBand(f"n_filters must be >= 1, got {n_filters}")
    if fft_size < 1 or fft_size & (fft_size - 1):
        raise InvalidBand(f"fft_size must be a power of two, got {fft_size}")

    edges = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_filters + 2))
    freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (freqs[None, :] - lo) / (mid - lo)
    falling = (hi - freqs[None, :]) / (hi - mid)
    weights = np.maximum(0.0, np.minimum(rising, falling))
    empty = np.flatnonzero(weights.max(axis=1) <= 0.0)
    if empty.size:
        raise InvalidBand(
            f"filters {empty.tolist()} cover no FFT bin; use fewer filters or a larger fft_size")
    weights.setflags(write=False)
    return MelFilterbank(weights, edges[1:-1], float(f_min), float(f_max),
                         int(sample_rate), int(fft_size))


@dataclass(frozen=True, eq=False)
class MfccMatrix:
    rows: np.ndarray  # (n_frames, n_coeffs)
    source_id: str = ""

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[0] == 0:
            raise EmptyInput("MFCC matrix needs at least one row")

    @property
    def n_coeffs(self):
        return self.rows.shape[1]


def log_mel_energies(frames, bank, pre_emphasis=PRE_EMPHASIS):
    x = np.asarray(frames.frames if hasattr(frames, "frames") else frames, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyInput("no frames to analyse")
    frame_len = x.shape[1]
    if bank.fft_size < frame_len:
        raise ValueError(f"fft_size {bank.fft_size} shorter than frame_len {frame_len}")
    y = x.copy()
    y[:, 1:] -= pre_emphasis * x[:, :-1]
    y *= np.hamming(frame_len)
    spectrum = np.fft.rfft(y, n=bank.fft_size, axis=1)
    power = spectrum.real ** 2 + spectrum.imag ** 2
    energies = power @ bank.weights.T
    return np.log(energies + LOG_FLOOR)


def mfcc(frames, bank, n_coeffs=N_COEFFS, pre_emphasis=PRE_EMPHASIS,
         include_energy=False, source_id=""):
    """Per-frame cepstral coefficients.

    Pre-emphasis, Hamming window, zero-padded power spectrum, mel
    filterbank, natural log with a 1e-10 floor, orthonormal DCT-II.  By
    default DCT indices 1..n_coeffs are kept; ``include_energy`` keeps
    0..n_coeffs-1 instead.
    """
    if n_coeffs > bank.n_filters:
        raise ValueError(f"n_coeffs={n_coeffs} exceeds n_filters={bank.n_filters}")
    cep = dct(log_mel_energies(frames, bank, pre_emphasis), type=2, norm="ortho", axis=1)
    start = 0 if include_energy else 1
    rows = cep[:, start:start + n_coeffs]
    if rows.shape[1] < n_coeffs:
        raise ValueError(f"only {rows.shape[1]} coefficients available after dropping C0")
    return MfccMatrix(np.ascontiguousarray(rows), source_id)


@dataclass(frozen=True, eq=False)
class Fingerprint:
    coeffs: np.ndarray
    label: str = None
    source_id: str = ""

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=np.float64)
        if coeffs.shape != (N_COEFFS,):
            raise ValueError(f"fingerprint needs exactly {N_COEFFS} coefficients, got {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError(f"fingerprint {self.source_id!r} has non-finite coefficients")
        if self.label is not None and self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS} or None, got {self.label!r}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def with_label(self, label):
        return Fingerprint(self.coeffs, label, self.source_id)

    def __eq__(self, other):
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return (self.label == other.label and self.source_id == other.source_id
                and np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None


def mean_fingerprint(m, label=None):
    rows = m.rows
    if rows.shape[0] == 0:
        raise EmptyInput("cannot average an empty MFCC matrix")
    if rows.shape[1] != N_COEFFS:
        raise ValueError(f"mean fingerprint needs {N_COEFFS} coefficients, got {rows.shape[1]}")
    return Fingerprint(rows.mean(axis=0), label, m.source_id)


@dataclass(frozen=True)
class MfccSettings:
    frame_len: int = 1024
    hop: int = 512
    fft_size: int = 1024
    n_filters: int = 40
    n_coeffs: int = N_COEFFS
    pre_emphasis: float = PRE_EMPHASIS
    f_min: float = 0.0
    f_max: float = None  # None means Nyquist
    include_energy: bool = False


def extract_fingerprint(clip, settings=MfccSettings(), label=None, bank=None):
    """Whole-file pipeline: frame, MFCC, time average."""
    if bank is None or bank.sample_rate != clip.sample_rate:
        bank = build_filterbank(clip.sample_rate, settings.fft_size, settings.n_filters,
                                settings.f_min, settings.f_max)
    frames = frame_signal(clip, settings.frame_len, settings.hop)
    m = mfcc(frames, bank, settings.n_coeffs, settings.pre_emphasis,
             settings.include_energy, source_id=clip.source_id)
    return mean_fingerprint(m, label)


def format_real(x):
    return f"{x:.9g}"


def write_fingerprints(fingerprints, dest):
    """Write the fingerprint CSV to a path or text stream."""
    if isinstance(dest, io.TextIOBase):
        _write_rows(fingerprints, dest)
        return
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        _write_rows(fingerprints, fh)


def _write_rows(fingerprints, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for fp in fingerprints:
        w.writerow([fp.source_id, fp.label or ""] + [format_real(v) for v in fp.coeffs])


def read_fingerprints(src):
    if isinstance(src, io.TextIOBase):
        return _read_rows(src)
    with open(src, encoding="utf-8", newline="") as fh:
        return _read_rows(fh)


def _read_rows(fh):
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise ValueError("not a fingerprint CSV: header must be source_id,label,C01..C20")
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise ValueError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        out.append(Fingerprint([float(v) for v in row[2:]], row[1] or None, row[0]))
    return out
