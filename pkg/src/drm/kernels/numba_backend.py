"""Numba-compiled versions of the hot kernels.

Loops are written explicitly so the fused passes avoid the temporaries
the numpy backend allocates. Signatures and semantics match
``numpy_backend`` exactly; parity is enforced by tests.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def softmax_rows(logits):
    n, c = logits.shape
    out = np.empty((n, c))
    for i in range(n):
        m = logits[i, 0]
        for j in range(1, c):
            if logits[i, j] > m:
                m = logits[i, j]
        z = 0.0
        for j in range(c):
            e = np.exp(logits[i, j] - m)
            out[i, j] = e
            z += e
        for j in range(c):
            out[i, j] /= z
    return out


@njit(cache=True)
def softmax_xent(logits, targets):
    n, c = logits.shape
    dlogits = np.empty((n, c))
    loss = 0.0
    for i in range(n):
        m = logits[i, 0]
        for j in range(1, c):
            if logits[i, j] > m:
                m = logits[i, j]
        z = 0.0
        for j in range(c):
            e = np.exp(logits[i, j] - m)
            dlogits[i, j] = e
            z += e
        logz = np.log(z)
        for j in range(c):
            loss -= targets[i, j] * ((logits[i, j] - m) - logz)
            dlogits[i, j] = (dlogits[i, j] / z - targets[i, j]) / n
    return loss / n, dlogits


@njit(cache=True)
def adamw_update(p, g, m, v, step, lr, beta1, beta2, eps, weight_decay):
    bc1 = 1.0 - beta1**step
    bc2 = 1.0 - beta2**step
    flat_p = p.ravel()
    flat_g = g.ravel()
    flat_m = m.ravel()
    flat_v = v.ravel()
    for k in range(flat_p.size):
        flat_m[k] = beta1 * flat_m[k] + (1.0 - beta1) * flat_g[k]
        flat_v[k] = beta2 * flat_v[k] + (1.0 - beta2) * flat_g[k] * flat_g[k]
        mhat = flat_m[k] / bc1
        vhat = flat_v[k] / bc2
        flat_p[k] -= lr * (mhat / (np.sqrt(vhat) + eps) + weight_decay * flat_p[k])


@njit(cache=True)
def minmax_gamma(xi, labels, n_classes):
    n = xi.shape[0]
    gamma = np.empty((n, n_classes))
    for y in range(n_classes):
        lo = np.inf
        hi = -np.inf
        for i in range(n):
            if labels[i] == y:
                if xi[i, y] < lo:
                    lo = xi[i, y]
                if xi[i, y] > hi:
                    hi = xi[i, y]
        if hi > lo:
            span = hi - lo
            for i in range(n):
                g = (xi[i, y] - lo) / span
                if g < 0.0:
                    g = 0.0
                elif g > 1.0:
                    g = 1.0
                gamma[i, y] = g
        else:
            for i in range(n):
                gamma[i, y] = 1.0 if labels[i] == y else 0.0
    return gamma


@njit(cache=True)
def proxy_rows(gamma, labels):
    n, c = gamma.shape
    probs = np.zeros((n, c))
    for i in range(n):
        y = labels[i]
        gy = gamma[i, y]
        probs[i, y] = gy
        rest = 0.0
        for yy in range(c):
            rest += gamma[i, yy]
        rest -= gy
        if rest > 0.0:
            scale = (1.0 - gy) / rest
            for yy in range(c):
                if yy != y:
                    probs[i, yy] = gamma[i, yy] * scale
        elif gy < 1.0:
            fill = (1.0 - gy) / (c - 1)
            for yy in range(c):
                if yy != y:
                    probs[i, yy] = fill
    return probs
