"""Deterministic synthetic song corpus standing in for the field recordings.

Seven "MGB-like" songs share one harmonic syllable template and differ
only by small pitch, tempo and noise jitter; seventeen "Other" songs each
draw their own template from a much wider family (tones, trills, sweeps,
noisy calls) placed away from the MGB band.
"""
from dataclasses import dataclass
import csv
from pathlib import Path

import numpy as np

from .audio_io import write_wav
from .features import MGB, OTHER

SAMPLE_RATE = 44100
N_MGB = 7
N_OTHER = 17


@dataclass(frozen=True)
class SongTemplate:
    f_start: float  # Hz, syllable start pitch
    f_end: float  # Hz, syllable end pitch
    harmonics: tuple  # relative amplitudes of harmonics 1, 2, ...
    n_syllables: int
    syllable_s: float
    gap_s: float
    vibrato_hz: float = 0.0
    vibrato_depth: float = 0.0
    noise: float = 0.01


MGB_TEMPLATE = SongTemplate(f_start=2200.0, f_end=3100.0, harmonics=(1.0, 0.45, 0.2),
                            n_syllables=5, syllable_s=0.12, gap_s=0.06,
                            vibrato_hz=30.0, vibrato_depth=0.03)


def render(template, rng, duration=1.0, sample_rate=SAMPLE_RATE):
    n = int(round(duration * sample_rate))
    out = np.zeros(n)
    syl = int(template.syllable_s * sample_rate)
    gap = int(template.gap_s * sample_rate)
    t = np.arange(syl) / sample_rate
    env = np.sin(np.pi * np.arange(syl) / syl) ** 2
    sweep = template.f_start + (template.f_end - template.f_start) * t / template.syllable_s
    inst = sweep * (1.0 + template.vibrato_depth * np.sin(2 * np.pi * template.vibrato_hz * t))
    phase = 2 * np.pi * np.cumsum(inst) / sample_rate
    nyquist = sample_rate / 2
    syllable = np.zeros(syl)
    for h, amp in enumerate(template.harmonics, start=1):
        if np.max(inst) * h < nyquist:
            syllable += amp * np.sin(h * phase)
    syllable *= env
    pos = int(0.05 * sample_rate)
    for _ in range(template.n_syllables):
        if pos + syl > n:
            break
        out[pos:pos + syl] += syllable
        pos += syl + gap
    out += template.noise * rng.standard_normal(n)
    return 0.8 * out / np.max(np.abs(out))


def jitter(template, rng):
    scale = 1.0 + 0.02 * rng.uniform(-1, 1)
    tempo = 1.0 + 0.05 * rng.uniform(-1, 1)
    return SongTemplate(template.f_start * scale, template.f_end * scale, template.harmonics,
                        template.n_syllables, template.syllable_s * tempo,
                        template.gap_s * tempo, template.vibrato_hz, template.vibrato_depth,
                        template.noise * (1.0 + 0.5 * rng.uniform(-1, 1)))


def other_template(rng, k):
    # Alternate low and high registers so no "Other" song sits in the MGB band.
    if k % 2 == 0:
        base = rng.uniform(500.0, 1300.0)
    else:
        base = rng.uniform(5000.0, 9000.0)
    style = k % 4
    if style == 0:    # steady tone
        f0, f1 = base, base
    elif style == 1:  # downsweep
        f0, f1 = base * 1.4, base * 0.8
    elif style == 2:  # upsweep
        f0, f1 = base * 0.8, base * 1.3
    else:             # trill
        f0, f1 = base, base * 1.05
    n_h = int(rng.integers(1, 5))
    harmonics = tuple(float(a) for a in rng.uniform(0.1, 1.0, n_h))
    return SongTemplate(f0, f1, (1.0,) + harmonics[1:], int(rng.integers(2, 9)),
                        float(rng.uniform(0.04, 0.2)), float(rng.uniform(0.02, 0.1)),
                        vibrato_hz=float(rng.uniform(0, 60)) if style == 3 else 0.0,
                        vibrato_depth=0.08 if style == 3 else 0.0,
                        noise=float(rng.uniform(0.005, 0.08)))


def generate_corpus(seed=0, duration=1.0):
    """Return ``[(filename, label, samples)]`` for the 24-song corpus."""
    rng = np.random.default_rng(seed)
    songs = []
    for i in range(N_MGB):
        songs.append((f"mgb_{i:02d}.wav", MGB, render(jitter(MGB_TEMPLATE, rng), rng, duration)))
    for k in range(N_OTHER):
        songs.append((f"other_{k:02d}.wav", OTHER, render(other_template(rng, k), rng, duration)))
    return songs


def write_corpus(out_dir, seed=0, duration=1.0):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    songs = generate_corpus(seed, duration)
    for name, _, samples in songs:
        write_wav(out_dir / name, samples, SAMPLE_RATE)
    with open(out_dir / "labels.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["file", "label"])
        for name, label, _ in songs:
            w.writerow([name, label])
    return [(name, label) for name, label, _ in songs]


def two_cluster_fingerprints(n_pos=7, n_neg=17, seed=0, separation=100.0, spread=1.0):
    """Fingerprint coefficient matrices for two well-separated Gaussian clusters."""
    rng = np.random.default_rng(seed)
    center = rng.uniform(-20, 20, 20)
    pos = center + spread * rng.standard_normal((n_pos, 20))
    neg = center + separation + spread * rng.standard_normal((n_neg, 20))
    return pos, neg
