"""WAV decoding and analysis framing.

Only 16-bit signed little-endian mono PCM is accepted, which is the format
the song recordings are distributed in.
"""
from dataclasses import dataclass
import struct

import numpy as np

from .errors import MalformedContainer, SignalTooShort, UnsupportedFormat

PCM_SCALE = 32768.0
WAVE_FORMAT_PCM = 1


@dataclass(frozen=True, eq=False)
class AudioClip:
    samples: np.ndarray
    sample_rate: int
    source_id: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("AudioClip needs a non-empty 1-D sample array")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if np.any(np.abs(samples) > 1.0):
            raise ValueError("samples must lie in [-1, 1]")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self):
        return self.samples.shape[0] / self.sample_rate


@dataclass(frozen=True, eq=False)
class FrameSequence:
    frames: np.ndarray  # (n_frames, frame_len)
    frame_len: int
    hop: int
    sample_rate: int

    def __len__(self):
        return self.frames.shape[0]


def _chunks(data):
    """Yield (chunk_id, payload) pairs of a RIFF/WAVE body."""
    pos = 12
    while pos < len(data):
        if pos + 8 > len(data):
            raise MalformedContainer("chunk header", f"truncated at byte {pos}")
        cid, size = struct.unpack_from("<4sI", data, pos)
        start = pos + 8
        end = start + size
        if end > len(data):
            raise MalformedContainer(cid.decode("latin-1"),
                                     f"chunk declares {size} bytes, {len(data) - start} present")
        yield cid, data[start:end]
        pos = end + (size & 1)


def decode_wav(data, source_id=""):
    """Decode a 16-bit mono PCM WAV byte string into an :class:`AudioClip`.

    Samples are scaled by 1/32768 so that -32768 maps exactly to -1.0.
    """
    data = bytes(data)
    if len(data) < 12:
        raise MalformedContainer("RIFF header", f"only {len(data)} bytes")
    riff, _, wave = struct.unpack_from("<4sI4s", data, 0)
    if riff != b"RIFF":
        raise MalformedContainer("RIFF magic", f"got {riff!r}")
    if wave != b"WAVE":
        raise MalformedContainer("WAVE magic", f"got {wave!r}")

    fmt = None
    payload = None
    for cid, body in _chunks(data):
        if cid == b"fmt ":
            if len(body) < 16:
                raise MalformedContainer("fmt ", f"chunk is {len(body)} bytes, need 16")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif cid == b"data" and payload is None:
            payload = body
    if fmt is None:
        raise MalformedContainer("fmt ", "chunk missing")
    if payload is None:
        raise MalformedContainer("data", "chunk missing")

    format_tag, channels, rate, _, block_align, bits = fmt
    if format_tag != WAVE_FORMAT_PCM:
        raise UnsupportedFormat("format_tag", format_tag, "1 (PCM)")
    if bits != 16:
        raise UnsupportedFormat("bits_per_sample", bits, 16)
    if channels != 1:
        raise UnsupportedFormat("channels", channels, 1)
    if rate == 0:
        raise MalformedContainer("sample_rate", "zero")
    if len(payload) % 2:
        raise MalformedContainer("data", "odd byte count for 16-bit samples")
    if not payload:
        raise MalformedContainer("data", "no samples")

    pcm = np.frombuffer(payload, dtype="<i2")
    return AudioClip(pcm.astype(np.float64) / PCM_SCALE, int(rate), source_id)


def read_wav(path):
    with open(path, "rb") as fh:
        return decode_wav(fh.read(), source_id=str(path))


def to_pcm16(samples):
    """Inverse of the decode scaling (values clipped to the int16 range)."""
    q = np.round(np.asarray(samples, dtype=np.float64) * PCM_SCALE)
    return np.clip(q, -32768, 32767).astype("<i2")


def encode_wav(samples, sample_rate):
    """Encode float samples in [-1, 1] as a canonical 44-byte-header PCM WAV."""
    payload = to_pcm16(samples).tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, WAVE_FORMAT_PCM, 1, sample_rate, sample_rate * 2, 2, 16,
        b"data", len(payload),
    )
    return header + payload


def write_wav(path, samples, sample_rate):
    with open(path, "wb") as fh:
        fh.write(encode_wav(samples, sample_rate))


def frame_count(n_samples, frame_len, hop):
    if n_samples < frame_len:
        return 0
    return (n_samples - frame_len) // hop + 1


def frame_signal(clip, frame_len, hop):
    """Cut ``clip`` into frames ``[i*hop, i*hop + frame_len)``; the ragged tail is dropped."""
    if frame_len <= 0:
        raise ValueError(f"frame_len must be positive, got {frame_len}")
    if not 0 < hop <= frame_len:
        raise ValueError(f"hop must satisfy 0 < hop <= frame_len, got {hop}")
    x = clip.samples
    if x.shape[0] < frame_len:
        raise SignalTooShort(
            f"{clip.source_id or 'clip'} has {x.shape[0]} samples, frame needs {frame_len}")
    n = frame_count(x.shape[0], frame_len, hop)
    starts = np.arange(n) * hop
    frames = x[starts[:, None] + np.arange(frame_len)[None, :]]
    frames.setflags(write=False)
    return FrameSequence(frames, frame_len, hop, clip.sample_rate)
