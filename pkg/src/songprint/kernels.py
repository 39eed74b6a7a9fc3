"""Hot numeric kernels.

Every kernel exists twice: a loop-level version compiled with numba
(``*_nb``) and a vectorized numpy version (``*_np``).  The unsuffixed name
is bound to one of them at import time, see :mod:`songprint._accel`.
Both versions consume and produce identical array layouts so callers never
know which one ran.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit

LEAF = -1
_GAIN_EPS = 1e-12


# ---------------------------------------------------------------------------
# DTW cumulative cost
# ---------------------------------------------------------------------------

@njit
def dtw_cost_nb(a, b):
    n = a.shape[0]
    m = b.shape[0]
    D = np.empty((n, m))
    D[0, 0] = abs(a[0] - b[0])
    for j in range(1, m):
        D[0, j] = abs(a[0] - b[j]) + D[0, j - 1]
    for i in range(1, n):
        D[i, 0] = abs(a[i] - b[0]) + D[i - 1, 0]
        for j in range(1, m):
            best = D[i - 1, j - 1]
            if D[i - 1, j] < best:
                best = D[i - 1, j]
            if D[i, j - 1] < best:
                best = D[i, j - 1]
            D[i, j] = abs(a[i] - b[j]) + best
    return D


def dtw_cost_np(a, b):
    # Sweep anti-diagonals: every cell on diagonal k depends only on k-1, k-2.
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n, m = a.shape[0], b.shape[0]
    cost = np.abs(a[:, None] - b[None, :])
    D = np.full((n + 1, m + 1), np.inf)
    D[0, 0] = 0.0
    for k in range(2, n + m + 1):
        i = np.arange(max(1, k - m), min(n, k - 1) + 1)
        j = k - i
        prev = np.minimum(np.minimum(D[i - 1, j - 1], D[i - 1, j]), D[i, j - 1])
        D[i, j] = cost[i - 1, j - 1] + prev
    return D[1:, 1:].copy()


@njit
def dtw_to_reference_nb(X, ref):
    out = np.empty(X.shape[0])
    for r in range(X.shape[0]):
        D = dtw_cost_nb(X[r], ref)
        out[r] = D[D.shape[0] - 1, D.shape[1] - 1]
    return out


def dtw_to_reference_np(X, ref):
    return np.array([dtw_cost_np(row, ref)[-1, -1] for row in X])


# ---------------------------------------------------------------------------
# Decision tree growth (shared by C4.5 and the forest's trees)
# ---------------------------------------------------------------------------
#
# Output layout, one slot per node in creation order (root = 0):
#   feature[k]   attribute tested, or LEAF
#   threshold[k] go left when x[feature] <= threshold
#   left/right   child ids
#   counts[k]    training (n_other, n_mgb) reaching the node
#   label[k]     majority class (1 = MGB, 0 = Other)
# Children are allocated when their parent splits, and the left subtree is
# finished before the right one, so numbering is backend independent.


@njit
def _entropy2(a, b):
    n = a + b
    h = 0.0
    if a > 0:
        p = a / n
        h -= p * math.log2(p)
    if b > 0:
        p = b / n
        h -= p * math.log2(p)
    return h


@njit
def _pick_features(keys_row, mtry):
    chosen = np.argsort(keys_row, kind="mergesort")[:mtry]
    return np.sort(chosen)


@njit
def grow_tree_nb(X, y, min_leaf, mtry, feature_keys):
    n, d = X.shape
    cap = 2 * n + 1
    feature = np.full(cap, LEAF, dtype=np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    counts = np.zeros((cap, 2), dtype=np.int64)
    label = np.zeros(cap, dtype=np.int64)

    idx = np.arange(n)
    buf = np.empty(n, dtype=np.int64)
    st_node = np.empty(cap, dtype=np.int64)
    st_lo = np.empty(cap, dtype=np.int64)
    st_hi = np.empty(cap, dtype=np.int64)
    st_parent_label = np.empty(cap, dtype=np.int64)

    cand_gain = np.empty(d * n)
    cand_ratio = np.empty(d * n)
    cand_feat = np.empty(d * n, dtype=np.int64)
    cand_thr = np.empty(d * n)

    top = 0
    st_node[0] = 0
    st_lo[0] = 0
    st_hi[0] = n
    st_parent_label[0] = 0
    n_nodes = 1

    while top >= 0:
        node = st_node[top]
        lo = st_lo[top]
        hi = st_hi[top]
        plabel = st_parent_label[top]
        top -= 1

        m = hi - lo
        n_pos = 0
        for t in range(lo, hi):
            n_pos += y[idx[t]]
        n_neg = m - n_pos
        counts[node, 0] = n_neg
        counts[node, 1] = n_pos
        if n_pos > n_neg:
            label[node] = 1
        elif n_neg > n_pos:
            label[node] = 0
        else:
            label[node] = plabel

        if n_pos == 0 or n_neg == 0 or m < 2 * min_leaf:
            continue

        h_parent = _entropy2(n_neg, n_pos)
        if mtry >= d:
            feats = np.arange(d)
        else:
            feats = _pick_features(feature_keys[node], mtry)
        n_cand = 0
        vals = np.empty(m)
        ys = np.empty(m, dtype=np.int64)
        for fi in range(feats.shape[0]):
            f = feats[fi]
            for t in range(m):
                vals[t] = X[idx[lo + t], f]
            order = np.argsort(vals, kind="mergesort")
            sv = vals[order]
            for t in range(m):
                ys[t] = y[idx[lo + order[t]]]
            left_pos = 0
            for p in range(1, m):
                left_pos += ys[p - 1]
                if sv[p - 1] == sv[p]:
                    continue
                if p < min_leaf or m - p < min_leaf:
                    continue
                left_neg = p - left_pos
                right_pos = n_pos - left_pos
                right_neg = n_neg - left_neg
                gain = (h_parent
                        - (p / m) * _entropy2(left_neg, left_pos)
                        - ((m - p) / m) * _entropy2(right_neg, right_pos))
                split_info = _entropy2(p, m - p)
                thr = 0.5 * (sv[p - 1] + sv[p])
                if not thr < sv[p]:
                    thr = sv[p - 1]
                cand_gain[n_cand] = gain
                cand_ratio[n_cand] = gain / split_info
                cand_feat[n_cand] = f
                cand_thr[n_cand] = thr
                n_cand += 1

        if n_cand == 0:
            continue
        mean_gain = 0.0
        for c in range(n_cand):
            mean_gain += cand_gain[c]
        mean_gain /= n_cand
        best = -1
        for c in range(n_cand):
            g = cand_gain[c]
            if g <= _GAIN_EPS or g < mean_gain - _GAIN_EPS:
                continue
            if best < 0 or cand_ratio[c] > cand_ratio[best]:
                best = c
        if best < 0:
            continue

        f = cand_feat[best]
        thr = cand_thr[best]
        # stable partition of idx[lo:hi] into <= thr | > thr
        nl = 0
        for t in range(lo, hi):
            if X[idx[t], f] <= thr:
                buf[nl] = idx[t]
                nl += 1
        nr = nl
        for t in range(lo, hi):
            if X[idx[t], f] > thr:
                buf[nr] = idx[t]
                nr += 1
        for t in range(m):
            idx[lo + t] = buf[t]

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[node] = f
        threshold[node] = thr
        left[node] = lid
        right[node] = rid
        top += 1
        st_node[top] = rid
        st_lo[top] = lo + nl
        st_hi[top] = hi
        st_parent_label[top] = label[node]
        top += 1
        st_node[top] = lid
        st_lo[top] = lo
        st_hi[top] = lo + nl
        st_parent_label[top] = label[node]

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(),
            left[:n_nodes].copy(), right[:n_nodes].copy(),
            counts[:n_nodes].copy(), label[:n_nodes].copy())


def _entropy2_np(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        pa = a / n
        pb = b / n
        ta = np.where(a > 0, pa * np.log2(np.where(a > 0, pa, 1.0)), 0.0)
        tb = np.where(b > 0, pb * np.log2(np.where(b > 0, pb, 1.0)), 0.0)
    return -(ta + tb)


def _best_split_np(Xs, ys, feats, min_leaf):
    m = ys.shape[0]
    n_pos = int(ys.sum())
    n_neg = m - n_pos
    h_parent = float(_entropy2_np(n_neg, n_pos))
    gains, ratios, fs, thrs = [], [], [], []
    for f in feats:
        order = np.argsort(Xs[:, f], kind="mergesort")
        sv = Xs[order, f]
        sy = ys[order]
        p = np.arange(1, m)
        left_pos = np.cumsum(sy)[:-1]
        ok = (sv[:-1] != sv[1:]) & (p >= min_leaf) & (m - p >= min_leaf)
        if not ok.any():
            continue
        p = p[ok]
        left_pos = left_pos[ok]
        left_neg = p - left_pos
        gain = (h_parent
                - (p / m) * _entropy2_np(left_neg, left_pos)
                - ((m - p) / m) * _entropy2_np(n_neg - left_neg, n_pos - left_pos))
        split_info = _entropy2_np(p, m - p)
        a, b = sv[p - 1], sv[p]
        thr = 0.5 * (a + b)
        thr = np.where(thr < b, thr, a)
        gains.append(gain)
        ratios.append(gain / split_info)
        fs.append(np.full(p.shape[0], f))
        thrs.append(thr)
    if not gains:
        return None
    gains = np.concatenate(gains)
    ratios = np.concatenate(ratios)
    fs = np.concatenate(fs)
    thrs = np.concatenate(thrs)
    mean_gain = gains.sum() / gains.shape[0]
    ok = (gains > _GAIN_EPS) & (gains >= mean_gain - _GAIN_EPS)
    if not ok.any():
        return None
    # first maximal ratio in candidate order
    masked = np.where(ok, ratios, -np.inf)
    best = int(np.argmax(masked))
    return int(fs[best]), float(thrs[best])


def grow_tree_np(X, y, min_leaf, mtry, feature_keys):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d = X.shape
    feature, threshold, left, right, counts, label = [], [], [], [], [], []

    def new_node():
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append((0, 0))
        label.append(0)
        return len(feature) - 1

    new_node()
    stack = [(0, np.arange(n), 0)]
    while stack:
        node, rows, plabel = stack.pop()
        ys = y[rows]
        n_pos = int(ys.sum())
        n_neg = rows.shape[0] - n_pos
        counts[node] = (n_neg, n_pos)
        label[node] = 1 if n_pos > n_neg else 0 if n_neg > n_pos else plabel
        if n_pos == 0 or n_neg == 0 or rows.shape[0] < 2 * min_leaf:
            continue
        if mtry >= d:
            feats = np.arange(d)
        else:
            feats = np.sort(np.argsort(feature_keys[node], kind="mergesort")[:mtry])
        split = _best_split_np(X[rows], ys, feats, min_leaf)
        if split is None:
            continue
        f, thr = split
        go_left = X[rows, f] <= thr
        lid, rid = new_node(), new_node()
        feature[node] = f
        threshold[node] = thr
        left[node] = lid
        right[node] = rid
        stack.append((rid, rows[~go_left], label[node]))
        stack.append((lid, rows[go_left], label[node]))

    return (np.array(feature, dtype=np.int64), np.array(threshold),
            np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
            np.array(counts, dtype=np.int64).reshape(-1, 2),
            np.array(label, dtype=np.int64))


@njit
def tree_predict_nb(feature, threshold, left, right, label, X):
    out = np.empty(X.shape[0], dtype=np.int64)
    for r in range(X.shape[0]):
        k = 0
        while feature[k] != LEAF:
            if X[r, feature[k]] <= threshold[k]:
                k = left[k]
            else:
                k = right[k]
        out[r] = label[k]
    return out


def tree_predict_np(feature, threshold, left, right, label, X):
    X = np.asarray(X, dtype=np.float64)
    node = np.zeros(X.shape[0], dtype=np.int64)
    rows = np.arange(X.shape[0])
    while True:
        f = feature[node]
        active = f != LEAF
        if not active.any():
            return label[node].astype(np.int64)
        a = rows[active]
        go_left = X[a, f[active]] <= threshold[node[active]]
        node[a] = np.where(go_left, left[node[a]], right[node[a]])


# ---------------------------------------------------------------------------
# MLP per-example backpropagation
# ---------------------------------------------------------------------------

@njit
def _sigmoid(z):
    return 1.0 / (1.0 + math.exp(-z))


@njit
def mlp_train_nb(X, T, W1, b1, W2, b2, lr, momentum, epochs, cross_entropy):
    n, d = X.shape
    H = W1.shape[1]
    K = W2.shape[1]
    W1 = W1.copy()
    b1 = b1.copy()
    W2 = W2.copy()
    b2 = b2.copy()
    vW1 = np.zeros_like(W1)
    vb1 = np.zeros_like(b1)
    vW2 = np.zeros_like(W2)
    vb2 = np.zeros_like(b2)
    h = np.empty(H)
    o = np.empty(K)
    do = np.empty(K)
    dh = np.empty(H)
    losses = np.empty(epochs)
    for ep in range(epochs):
        total = 0.0
        for r in range(n):
            for j in range(H):
                z = b1[j]
                for i in range(d):
                    z += X[r, i] * W1[i, j]
                h[j] = _sigmoid(z)
            for k in range(K):
                z = b2[k]
                for j in range(H):
                    z += h[j] * W2[j, k]
                o[k] = _sigmoid(z)
            for k in range(K):
                diff = o[k] - T[r, k]
                if cross_entropy:
                    if T[r, k] > 0.5:
                        total -= math.log(o[k])
                    else:
                        total -= math.log(1.0 - o[k])
                    do[k] = diff
                else:
                    total += 0.5 * diff * diff
                    do[k] = diff * o[k] * (1.0 - o[k])
            for j in range(H):
                s = 0.0
                for k in range(K):
                    s += W2[j, k] * do[k]
                dh[j] = s * h[j] * (1.0 - h[j])
            for j in range(H):
                for k in range(K):
                    vW2[j, k] = momentum * vW2[j, k] - lr * h[j] * do[k]
                    W2[j, k] += vW2[j, k]
            for k in range(K):
                vb2[k] = momentum * vb2[k] - lr * do[k]
                b2[k] += vb2[k]
            for i in range(d):
                for j in range(H):
                    vW1[i, j] = momentum * vW1[i, j] - lr * X[r, i] * dh[j]
                    W1[i, j] += vW1[i, j]
            for j in range(H):
                vb1[j] = momentum * vb1[j] - lr * dh[j]
                b1[j] += vb1[j]
        losses[ep] = total
    return W1, b1, W2, b2, losses


def _sigmoid_np(z):
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-z))


def mlp_train_np(X, T, W1, b1, W2, b2, lr, momentum, epochs, cross_entropy):
    W1, b1, W2, b2 = W1.copy(), b1.copy(), W2.copy(), b2.copy()
    vW1, vb1 = np.zeros_like(W1), np.zeros_like(b1)
    vW2, vb2 = np.zeros_like(W2), np.zeros_like(b2)
    losses = np.empty(epochs)
    for ep in range(epochs):
        total = 0.0
        for x, t in zip(X, T):
            h = _sigmoid_np(x @ W1 + b1)
            o = _sigmoid_np(h @ W2 + b2)
            diff = o - t
            if cross_entropy:
                with np.errstate(divide="ignore"):
                    total -= float(np.sum(np.where(t > 0.5, np.log(o), np.log(1.0 - o))))
                do = diff
            else:
                total += 0.5 * float(diff @ diff)
                do = diff * o * (1.0 - o)
            dh = (W2 @ do) * h * (1.0 - h)
            vW2 = momentum * vW2 - lr * np.outer(h, do)
            W2 += vW2
            vb2 = momentum * vb2 - lr * do
            b2 += vb2
            vW1 = momentum * vW1 - lr * np.outer(x, dh)
            W1 += vW1
            vb1 = momentum * vb1 - lr * dh
            b1 += vb1
        losses[ep] = total
    return W1, b1, W2, b2, losses


if USE_NUMBA:
    dtw_cost = dtw_cost_nb
    dtw_to_reference = dtw_to_reference_nb
    grow_tree = grow_tree_nb
    tree_predict = tree_predict_nb
    mlp_train = mlp_train_nb
else:
    dtw_cost = dtw_cost_np
    dtw_to_reference = dtw_to_reference_np
    grow_tree = grow_tree_np
    tree_predict = tree_predict_np
    mlp_train = mlp_train_np
