"""Affinity computation and the temperature-scaled softmax classifier.

An affinity is the inner product between an image embedding and a text
embedding; for unit vectors it is the cosine similarity in [-1, 1].
"""
from __future__ import annotations

import numpy as np

from . import kernels
from .core import ClassifierHead, EmbeddingBank
from .errors import NumericError, ShapeError

# CLIP-convention logit scale 100 <=> temperature 0.01
DEFAULT_TAU = 0.01


def affinity(image_emb: np.ndarray, text_emb: np.ndarray) -> float:
    """Inner product of two equal-dimension embeddings."""
    a = np.asarray(image_emb, dtype=np.float64)
    b = np.asarray(text_emb, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(a @ b)


def affinity_matrix(images: EmbeddingBank, head: ClassifierHead) -> np.ndarray:
    """All image/class affinities as an (N, C) float64 matrix."""
    if images.dim != head.dim:
        raise ShapeError(f"bank dim {images.dim} != head dim {head.dim}")
    return images.as_f64() @ head.class_rows.T


def softmax_probabilities(affinities: np.ndarray, tau: float) -> np.ndarray:
    """Row-wise softmax of affinities / tau, max-subtracted, float64."""
    aff = np.ascontiguousarray(affinities, dtype=np.float64)
    if not np.isfinite(aff).all():
        raise NumericError("non-finite affinity")
    squeeze = aff.ndim == 1
    if squeeze:
        aff = aff[None, :]
    probs = kernels.softmax_rows(aff / tau)
    return probs[0] if squeeze else probs


def class_probabilities(image_emb: np.ndarray, head: ClassifierHead) -> np.ndarray:
    """Softmax class probabilities of one image under a head."""
    a = np.asarray(image_emb, dtype=np.float64)
    if a.shape != (head.dim,):
        raise ShapeError(f"embedding shape {a.shape} does not match head dim {head.dim}")
    return softmax_probabilities(head.class_rows @ a, head.temperature)
