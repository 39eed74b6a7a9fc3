"""Naive reference implementations used only by the tests.

Everything here is written from the defining formulas with plain Python
loops and the math module, sharing no code with the package.
"""
import itertools
import math


def mel(f):
    return 2595.0 * math.log10(1.0 + f / 700.0)


def inv_mel(m):
    return 700.0 * (10.0 ** (m / 2595.0) - 1.0)


def mel_centers(f_min, f_max, n_filters):
    lo, hi = mel(f_min), mel(f_max)
    step = (hi - lo) / (n_filters + 1)
    return [inv_mel(lo + step * (i + 1)) for i in range(n_filters)]


def filterbank(sample_rate, fft_size, n_filters, f_min, f_max):
    lo, hi = mel(f_min), mel(f_max)
    step = (hi - lo) / (n_filters + 1)
    edges = [inv_mel(lo + step * i) for i in range(n_filters + 2)]
    bank = []
    for j in range(n_filters):
        a, c, b = edges[j], edges[j + 1], edges[j + 2]
        row = []
        for k in range(fft_size // 2 + 1):
            f = k * sample_rate / fft_size
            if a < f <= c:
                row.append((f - a) / (c - a))
            elif c < f < b:
                row.append((b - f) / (b - c))
            else:
                row.append(0.0)
        bank.append(row)
    return bank


def power_spectrum(x, n_fft):
    x = list(x) + [0.0] * (n_fft - len(x))
    out = []
    for k in range(n_fft // 2 + 1):
        re = sum(x[t] * math.cos(2 * math.pi * k * t / n_fft) for t in range(n_fft))
        im = -sum(x[t] * math.sin(2 * math.pi * k * t / n_fft) for t in range(n_fft))
        out.append(re * re + im * im)
    return out


def dct2_ortho(v):
    n = len(v)
    out = []
    for k in range(n):
        s = sum(v[i] * math.cos(math.pi * k * (2 * i + 1) / (2 * n)) for i in range(n))
        scale = math.sqrt(1.0 / n) if k == 0 else math.sqrt(2.0 / n)
        out.append(scale * s)
    return out


def idct2_ortho(c):
    n = len(c)
    out = []
    for i in range(n):
        s = c[0] * math.sqrt(1.0 / n)
        s += sum(c[k] * math.sqrt(2.0 / n) * math.cos(math.pi * k * (2 * i + 1) / (2 * n))
                 for k in range(1, n))
        out.append(s)
    return out


def frame_mfcc(frame, bank, n_fft, n_coeffs, pre=0.97, floor=1e-10):
    n = len(frame)
    y = [frame[0]] + [frame[t] - pre * frame[t - 1] for t in range(1, n)]
    w = [0.54 - 0.46 * math.cos(2 * math.pi * t / (n - 1)) for t in range(n)]
    power = power_spectrum([a * b for a, b in zip(y, w)], n_fft)
    energies = [sum(wk * pk for wk, pk in zip(row, power)) for row in bank]
    logs = [math.log(e + floor) for e in energies]
    return dct2_ortho(logs)[1:n_coeffs + 1], energies


def mfcc_matrix(signal, sample_rate, frame_len, hop, n_fft, n_filters, n_coeffs):
    bank = filterbank(sample_rate, n_fft, n_filters, 0.0, sample_rate / 2)
    rows = []
    start = 0
    while start + frame_len <= len(signal):
        rows.append(frame_mfcc(signal[start:start + frame_len], bank, n_fft, n_coeffs)[0])
        start += hop
    return rows


def warping_paths(n, m):
    """All monotone paths from (0,0) to (n-1,m-1) with unit steps incl. diagonal."""
    def walk(i, j):
        if (i, j) == (n - 1, m - 1):
            yield ((i, j),)
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            a, b = i + di, j + dj
            if a < n and b < m:
                for rest in walk(a, b):
                    yield ((i, j),) + rest
    return list(walk(0, 0))


def brute_force_dtw(a, b):
    return min(sum(abs(a[i] - b[j]) for i, j in p) for p in warping_paths(len(a), len(b)))


def entropy(counts):
    n = sum(counts)
    return -sum(c / n * math.log2(c / n) for c in counts if c)


def threshold_candidates(values, labels, min_leaf):
    """(threshold, gain, gain_ratio) for every midpoint split of one attribute."""
    pairs = sorted(zip(values, labels))
    n = len(pairs)
    classes = sorted(set(labels))
    parent = entropy([labels.count(c) for c in classes])
    out = []
    for p in range(1, n):
        if pairs[p - 1][0] == pairs[p][0] or p < min_leaf or n - p < min_leaf:
            continue
        left = [lab for _, lab in pairs[:p]]
        right = [lab for _, lab in pairs[p:]]
        gain = (parent - p / n * entropy([left.count(c) for c in classes])
                - (n - p) / n * entropy([right.count(c) for c in classes]))
        out.append(((pairs[p - 1][0] + pairs[p][0]) / 2, gain, gain / entropy([p, n - p])))
    return out


def all_combinations(n, k):
    return list(itertools.combinations(range(n), k))


def segment_parameter(s, nb, p, tol=1e-9):
    """``u`` with p == s + u * (nb - s) componentwise within ``tol``, or None."""
    seg = [b - a for a, b in zip(s, nb)]
    norm2 = sum(v * v for v in seg)
    if norm2 == 0:
        return 0.0 if all(abs(x - a) <= tol for x, a in zip(p, s)) else None
    u = sum((x - a) * v for x, a, v in zip(p, s, seg)) / norm2
    if all(abs(a + u * v - x) <= tol for a, v, x in zip(s, seg, p)):
        return u
    return None


def k_nearest_indices(points, i, k):
    d = sorted((math.dist(points[i], points[j]), j) for j in range(len(points)) if j != i)
    return [j for _, j in d[:k]]
