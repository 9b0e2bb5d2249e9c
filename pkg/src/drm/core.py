"""Domain types, the EMB1 container format, and vector utilities.

Embeddings are stored unit-normalized at ingestion; downstream code can
then treat every inner product as a cosine similarity in [-1, 1].
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import CorruptionError, DataError, FormatError, ShapeError

MAGIC = b"EMB1"

# |norm - 1| above this triggers re-normalization at ingestion
RENORM_TOL = 1e-6
# |norm - 1| above this is an invariant violation
NORM_TOL = 1e-4

VALID_SPLITS = ("train", "id_val", "id_test", "ood_test")


def l2_normalize(v: np.ndarray) -> np.ndarray:
    """Scale a vector to unit L2 norm. Raises DataError on a zero vector."""
    v = np.asarray(v, dtype=np.float64)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise DataError("cannot normalize a zero vector")
    return v / n


def _normalize_rows_f32(vectors: np.ndarray, ids: list[str]) -> np.ndarray:
    """Ingestion normalization: renormalize rows whose norm is off by > 1e-6."""
    out = np.ascontiguousarray(vectors, dtype=np.float32)
    norms = np.linalg.norm(out.astype(np.float64), axis=1)
    zero = norms == 0.0
    if zero.any():
        bad = ids[int(np.argmax(zero))]
        raise DataError(f"zero-norm embedding row (id={bad!r})")
    fix = np.abs(norms - 1.0) > RENORM_TOL
    if fix.any():
        fixed = out[fix].astype(np.float64) / norms[fix, None]
        out[fix] = fixed.astype(np.float32)
    return out


@dataclass(frozen=True, eq=False)
class EmbeddingBank:
    """Unit-norm embedding rows with opaque string ids.

    ``vectors`` keeps the float32 wire dtype so file roundtrips are
    bit-exact; numerical code promotes to float64 at the point of use.
    """

    dim: int
    vectors: np.ndarray
    ids: list[str]

    def __post_init__(self):
        if self.dim < 1:
            raise DataError(f"dim must be >= 1, got {self.dim}")
        if self.vectors.ndim != 2 or self.vectors.shape[1] != self.dim:
            raise ShapeError(
                f"vectors must be (N, {self.dim}), got {self.vectors.shape}"
            )
        if len(self.ids) != self.vectors.shape[0]:
            raise DataError("ids length does not match vector count")
        if len(set(self.ids)) != len(self.ids):
            raise DataError("ids must be unique")
        norms = np.linalg.norm(self.vectors.astype(np.float64), axis=1)
        if np.abs(norms - 1.0).max(initial=0.0) > NORM_TOL:
            raise DataError("bank rows must be unit-norm within 1e-4")
        self.vectors.flags.writeable = False

    @classmethod
    def from_rows(cls, vectors: np.ndarray, ids: list[str] | None = None) -> EmbeddingBank:
        """Build a bank from arbitrary rows, normalizing them at ingestion."""
        vectors = np.atleast_2d(np.asarray(vectors))
        if ids is None:
            ids = [str(i) for i in range(vectors.shape[0])]
        return cls(
            dim=vectors.shape[1],
            vectors=_normalize_rows_f32(vectors, list(ids)),
            ids=list(ids),
        )

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def as_f64(self) -> np.ndarray:
        return self.vectors.astype(np.float64)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """An embedding bank with dense integer class labels.

    Labels are indices 0..C-1; class names live in a sidecar table so the
    class order (softmax columns, report columns) is fixed.
    """

    bank: EmbeddingBank
    labels: np.ndarray
    split: str
    n_classes: int = 0
    domain_tags: list[str] | None = None
    class_names: list[str] | None = None

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if self.split not in VALID_SPLITS:
            raise DataError(f"split must be one of {VALID_SPLITS}, got {self.split!r}")
        if labels.shape != (len(self.bank),):
            raise ShapeError("labels length must equal bank row count")
        if self.n_classes == 0:
            inferred = len(self.class_names) if self.class_names else int(labels.max(initial=-1)) + 1
            object.__setattr__(self, "n_classes", inferred)
        if self.n_classes < 1:
            raise DataError("dataset must have at least one class")
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_classes):
            raise DataError("labels must lie in [0, n_classes)")
        if self.domain_tags is not None and len(self.domain_tags) != len(self.bank):
            raise DataError("domain_tags length must equal bank row count")
        labels.flags.writeable = False

    def __len__(self) -> int:
        return len(self.bank)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)


@dataclass(frozen=True, eq=False)
class ClassifierHead:
    """Per-class text-embedding rows acting as a linear head, plus temperature."""

    class_rows: np.ndarray
    temperature: float
    prompt_kind: str

    def __post_init__(self):
        rows = np.ascontiguousarray(self.class_rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] < 2:
            raise DataError("head needs at least 2 class rows")
        if self.temperature <= 0:
            raise DataError(f"temperature must be > 0, got {self.temperature}")
        if self.prompt_kind not in ("df", "cd"):
            raise DataError(f"prompt_kind must be 'df' or 'cd', got {self.prompt_kind!r}")
        norms = np.linalg.norm(rows, axis=1)
        if (norms == 0.0).any():
            raise DataError("zero-norm head row")
        off = np.abs(norms - 1.0) > RENORM_TOL
        if off.any():
            rows[off] /= norms[off, None]
        rows.flags.writeable = False
        object.__setattr__(self, "class_rows", rows)

    @property
    def n_classes(self) -> int:
        return self.class_rows.shape[0]

    @property
    def dim(self) -> int:
        return self.class_rows.shape[1]


@dataclass
class ValidationReport:
    per_class_counts: list[int]
    empty_classes: list[int]
    norm_violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.empty_classes and not self.norm_violations

    def to_dict(self) -> dict:
        return {
            "per_class_counts": self.per_class_counts,
            "empty_classes": self.empty_classes,
            "norm_violations": self.norm_violations,
            "ok": self.ok,
        }


def validate_dataset(ds: LabeledDataset) -> ValidationReport:
    """Report per-class counts, empty classes, and norm violations."""
    counts = ds.class_counts()
    norms = np.linalg.norm(ds.bank.as_f64(), axis=1)
    bad = np.abs(norms - 1.0) > NORM_TOL
    return ValidationReport(
        per_class_counts=[int(c) for c in counts],
        empty_classes=[y for y in range(ds.n_classes) if counts[y] == 0],
        norm_violations=[ds.bank.ids[i] for i in np.flatnonzero(bad)],
    )


# ---------------------------------------------------------------------------
# EMB1 container
#
# Layout (little-endian):
#   magic "EMB1" | u32 N | u32 D | N*D float32 row-major
#   | u64 trailer byte length | UTF-8 JSON trailer
# The trailer always carries "ids"; "labels", "class_names", "domain_tags"
# and "split" are optional. Unknown trailer keys are preserved on rewrite.
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<4sII")
_U64 = struct.Struct("<Q")


def write_emb1(path, vectors: np.ndarray, trailer: dict) -> None:
    """Write raw float32 rows plus a canonical-JSON trailer."""
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    n, d = vectors.shape
    body = json.dumps(trailer, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, n, d))
        fh.write(vectors.tobytes())
        fh.write(_U64.pack(len(body)))
        fh.write(body)


def read_emb1(path) -> tuple[np.ndarray, dict]:
    """Read an EMB1 file into (float32 rows, trailer dict)."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise FormatError(f"{path}: truncated header")
        magic, n, d = _HEADER.unpack(head)
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        payload = fh.read(n * d * 4)
        if len(payload) != n * d * 4:
            raise CorruptionError(
                f"{path}: header claims {n}x{d} float32 but payload is short"
            )
        raw_len = fh.read(_U64.size)
        if len(raw_len) < _U64.size:
            raise CorruptionError(f"{path}: missing trailer length")
        (tlen,) = _U64.unpack(raw_len)
        body = fh.read(tlen)
        if len(body) != tlen:
            raise CorruptionError(f"{path}: truncated trailer")
    try:
        trailer = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptionError(f"{path}: trailer is not valid JSON: {exc}") from exc
    vectors = np.frombuffer(payload, dtype="<f4").reshape(n, d).copy()
    return vectors, trailer


def save_embedding_bank(bank: EmbeddingBank, path, extra_trailer: dict | None = None) -> None:
    trailer = dict(extra_trailer or {})
    trailer["ids"] = bank.ids
    write_emb1(path, bank.vectors, trailer)


def load_embedding_bank(path) -> EmbeddingBank:
    """Load a bank, re-normalizing any row whose norm is off by > 1e-6."""
    vectors, trailer = read_emb1(path)
    ids = trailer.get("ids") or [str(i) for i in range(vectors.shape[0])]
    if len(ids) != vectors.shape[0]:
        raise CorruptionError(f"{path}: trailer ids disagree with payload row count")
    return EmbeddingBank(
        dim=vectors.shape[1],
        vectors=_normalize_rows_f32(vectors, ids),
        ids=list(ids),
    )


def save_labeled_dataset(ds: LabeledDataset, path) -> None:
    trailer: dict = {
        "ids": ds.bank.ids,
        "labels": [int(y) for y in ds.labels],
        "split": ds.split,
    }
    if ds.class_names is not None:
        trailer["class_names"] = ds.class_names
    if ds.domain_tags is not None:
        trailer["domain_tags"] = ds.domain_tags
    write_emb1(path, ds.bank.vectors, trailer)


def load_labeled_dataset(path, split: str | None = None) -> LabeledDataset:
    vectors, trailer = read_emb1(path)
    if "labels" not in trailer:
        raise DataError(f"{path}: trailer has no labels")
    ids = trailer.get("ids") or [str(i) for i in range(vectors.shape[0])]
    bank = EmbeddingBank(
        dim=vectors.shape[1],
        vectors=_normalize_rows_f32(vectors, ids),
        ids=list(ids),
    )
    class_names = trailer.get("class_names")
    return LabeledDataset(
        bank=bank,
        labels=np.asarray(trailer["labels"], dtype=np.int64),
        split=split or trailer.get("split", "train"),
        n_classes=len(class_names) if class_names else 0,
        domain_tags=trailer.get("domain_tags"),
        class_names=class_names,
    )


def save_classifier_head(head: ClassifierHead, path, class_names: list[str] | None = None) -> None:
    names = class_names or [str(i) for i in range(head.n_classes)]
    write_emb1(
        path,
        head.class_rows.astype(np.float32),
        {
            "ids": names,
            "prompt_kind": head.prompt_kind,
            "temperature": head.temperature,
        },
    )


def load_classifier_head(path) -> ClassifierHead:
    vectors, trailer = read_emb1(path)
    if "prompt_kind" not in trailer or "temperature" not in trailer:
        raise DataError(f"{path}: trailer is not a classifier head")
    return ClassifierHead(
        class_rows=vectors.astype(np.float64),
        temperature=float(trailer["temperature"]),
        prompt_kind=trailer["prompt_kind"],
    )
