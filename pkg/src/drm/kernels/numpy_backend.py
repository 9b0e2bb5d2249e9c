"""Pure-numpy reference implementations of the hot kernels.

These are the semantics of record; the numba backend must agree with them
to float64 round-off. Everything works on C-contiguous float64 arrays.
"""
from __future__ import annotations

import numpy as np


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-subtraction, float64 accumulation."""
    m = logits.max(axis=1, keepdims=True)
    e = np.exp(logits - m)
    return e / e.sum(axis=1, keepdims=True)


def softmax_xent(logits: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy of softmax(logits) rows against target rows.

    Returns (loss, dlogits) with dlogits = (softmax - targets) / n_rows,
    the exact gradient of the mean loss w.r.t. the logits.
    """
    n = logits.shape[0]
    m = logits.max(axis=1, keepdims=True)
    e = np.exp(logits - m)
    z = e.sum(axis=1, keepdims=True)
    logp = (logits - m) - np.log(z)
    loss = float(-(targets * logp).sum() / n)
    dlogits = (e / z - targets) / n
    return loss, dlogits


def adamw_update(
    p: np.ndarray,
    g: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    step: int,
    lr: float,
    beta1: float,
    beta2: float,
    eps: float,
    weight_decay: float,
) -> None:
    """One AdamW step in place (decoupled weight decay, bias correction)."""
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * (g * g)
    mhat = m / (1.0 - beta1**step)
    vhat = v / (1.0 - beta2**step)
    p -= lr * (mhat / (np.sqrt(vhat) + eps) + weight_decay * p)


def minmax_gamma(xi: np.ndarray, labels: np.ndarray, n_classes: int) -> np.ndarray:
    """Per-class min-max normalization of a score matrix.

    For each class y the min/max are taken over in-class rows only; the
    resulting affine map is applied to the whole column and clamped to
    [0, 1]. A degenerate in-class range maps in-class rows to 1 and the
    rest to 0.
    """
    n = xi.shape[0]
    gamma = np.empty_like(xi)
    for y in range(n_classes):
        mask = labels == y
        col = xi[:, y]
        lo = col[mask].min()
        hi = col[mask].max()
        if hi > lo:
            gamma[:, y] = np.clip((col - lo) / (hi - lo), 0.0, 1.0)
        else:
            gamma[:, y] = np.where(mask, 1.0, 0.0)
    assert gamma.shape == (n, n_classes)
    return gamma


def proxy_rows(gamma: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Turn normalized-affinity rows into target distributions.

    The true-class entry keeps gamma; the residual mass is split over the
    other classes proportionally to their gamma, or uniformly when all of
    them are zero.
    """
    n, c = gamma.shape
    probs = np.zeros_like(gamma)
    for i in range(n):
        y = labels[i]
        gy = gamma[i, y]
        probs[i, y] = gy
        rest = gamma[i].sum() - gy
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
