"""Accuracy, Cohen's d and meta-AUC estimated from per-item prediction logs.

A log is a sequence of ``(correct, confidence)`` pairs exported from a model
run. CSV files carry the columns ``correct`` (0/1) and ``confidence``; the
header row is optional. JSON files hold an array of objects with the same
two keys.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

__all__ = [
    "CLAMP_EPS",
    "LogFormatError",
    "UndefinedEstimateError",
    "PredictionLog",
    "EstimateReport",
    "load_log",
    "estimate_meta_auc",
    "pairwise_meta_auc",
    "estimate_d",
    "report",
]

CLAMP_EPS = 1e-6


class LogFormatError(ValueError):
    """A prediction log could not be parsed; the message names the line."""


class UndefinedEstimateError(ValueError):
    """The requested statistic is undefined for this log (e.g. one class only)."""


@dataclass
class PredictionLog:
    correct: np.ndarray
    confidence: np.ndarray
    source_label: str = ""
    clamp_warnings: int = 0

    def __post_init__(self):
        self.correct = np.asarray(self.correct, dtype=bool)
        self.confidence = np.asarray(self.confidence, dtype=float)
        if self.correct.shape != self.confidence.shape or self.correct.ndim != 1:
            raise ValueError("correct and confidence must be 1-D arrays of equal length")
        if self.correct.size == 0:
            raise ValueError("prediction log is empty")
        if np.any((self.confidence < 0.0) | (self.confidence > 1.0)) or np.any(np.isnan(self.confidence)):
            raise ValueError("confidences must lie in [0, 1]")

    @classmethod
    def from_records(cls, records: Iterable[Sequence], source_label: str = "") -> "PredictionLog":
        """Build a log from ``(correct, confidence)`` pairs, clamping 0 and 1."""
        rows = list(records)
        correct = np.array([bool(r[0]) for r in rows], dtype=bool)
        conf = np.array([float(r[1]) for r in rows], dtype=float)
        conf, n_clamped = _clamp(conf)
        return cls(correct, conf, source_label, n_clamped)

    def __len__(self):
        return self.correct.size

    @property
    def n_correct(self) -> int:
        return int(self.correct.sum())

    def concat(self, other: "PredictionLog") -> "PredictionLog":
        label = "+".join(s for s in (self.source_label, other.source_label) if s)
        return PredictionLog(
            np.concatenate([self.correct, other.correct]),
            np.concatenate([self.confidence, other.confidence]),
            label,
            self.clamp_warnings + other.clamp_warnings,
        )


def _clamp(conf: np.ndarray):
    mask = (conf <= 0.0) | (conf >= 1.0)
    n = int(mask.sum())
    if n:
        warnings.warn(f"{n} confidence value(s) at 0 or 1 clamped to [{CLAMP_EPS}, 1 - {CLAMP_EPS}]")
        conf = np.clip(conf, CLAMP_EPS, 1.0 - CLAMP_EPS)
    return conf, n


def _parse_row(correct_raw, conf_raw, where: str):
    try:
        correct = int(str(correct_raw).strip())
        conf = float(str(conf_raw).strip())
    except (TypeError, ValueError):
        raise LogFormatError(f"{where}: cannot parse correct={correct_raw!r}, confidence={conf_raw!r}") from None
    if correct not in (0, 1):
        raise LogFormatError(f"{where}: correct must be 0 or 1, got {correct}")
    if not 0.0 <= conf <= 1.0:
        raise LogFormatError(f"{where}: confidence must lie in [0, 1], got {conf}")
    return correct, conf


def _read_csv(path: Path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        cols = (0, 1)
        for lineno, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if lineno == 1 and not rows:
                names = [cell.strip().lower() for cell in row]
                if "correct" in names or "confidence" in names:
                    try:
                        cols = (names.index("correct"), names.index("confidence"))
                    except ValueError:
                        raise LogFormatError(
                            "line 1: header must name both 'correct' and 'confidence'"
                        ) from None
                    continue
            if len(row) <= max(cols):
                raise LogFormatError(f"line {lineno}: expected at least {max(cols) + 1} fields, got {len(row)}")
            rows.append(_parse_row(row[cols[0]], row[cols[1]], f"line {lineno}"))
    return rows


def _read_json(path: Path):
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise LogFormatError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, list):
        raise LogFormatError("JSON log must be an array of {correct, confidence} objects")
    rows = []
    for i, obj in enumerate(data):
        where = f"record {i}"
        if not isinstance(obj, dict) or "correct" not in obj or "confidence" not in obj:
            raise LogFormatError(f"{where}: expected an object with 'correct' and 'confidence'")
        rows.append(_parse_row(obj["correct"], obj["confidence"], where))
    return rows


def load_log(path, format: Optional[str] = None, source_label: Optional[str] = None) -> PredictionLog:
    """Read and validate a prediction log.

    Args:
        path: CSV or JSON file.
        format: ``"csv"`` or ``"json"``; inferred from the suffix if omitted.
        source_label: defaults to the file name.

    Raises:
        LogFormatError: malformed or out-of-domain rows (message carries the
            line number), or an empty file.
    """
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".") or "csv").lower()
    if fmt == "csv":
        rows = _read_csv(path)
    elif fmt == "json":
        rows = _read_json(path)
    else:
        raise ValueError(f"unsupported log format {fmt!r}")
    if not rows:
        raise LogFormatError(f"{path}: log contains no records")
    return PredictionLog.from_records(rows, source_label if source_label is not None else path.name)


def _split(log_or_correct, confidence=None):
    if confidence is None:
        log = log_or_correct
        correct, conf = log.correct, log.confidence
    else:
        correct = np.asarray(log_or_correct, dtype=bool)
        conf = np.asarray(confidence, dtype=float)
    return conf[correct], conf[~correct]


def estimate_meta_auc(log, confidence=None) -> float:
    """Mann-Whitney estimate of P(conf | correct > conf | incorrect), ties scored 1/2.

    Accepts a :class:`PredictionLog` or a pair of arrays ``(correct, confidence)``.
    Rank-based, O(n log n); equals the pairwise definition exactly.

    Raises:
        UndefinedEstimateError: if either class is empty.
    """
    pos, neg = _split(log, confidence)
    n1, n0 = pos.size, neg.size
    if n1 == 0 or n0 == 0:
        raise UndefinedEstimateError("meta-AUC is undefined unless both correct and incorrect records exist")
    ranks = rankdata(np.concatenate([pos, neg]))
    # Midranks are multiples of 1/2, so this sum is exact in double precision.
    u = ranks[:n1].sum() - n1 * (n1 + 1) / 2.0
    return float(u / (n1 * n0))


def pairwise_meta_auc(log, confidence=None) -> float:
    """O(n^2) definition of the meta-AUC; for verification on small logs."""
    pos, neg = _split(log, confidence)
    if pos.size == 0 or neg.size == 0:
        raise UndefinedEstimateError("meta-AUC is undefined unless both classes are present")
    diff = pos[:, None] - neg[None, :]
    wins = np.count_nonzero(diff > 0)
    ties = np.count_nonzero(diff == 0)
    return float((wins + 0.5 * ties) / (pos.size * neg.size))


def estimate_d(log, confidence=None) -> float:
    """Cohen's d of logit confidences, correct minus incorrect, pooled SD.

    Raises:
        UndefinedEstimateError: fewer than two records in a class, or a class
            whose logit confidences have zero variance.
    """
    pos, neg = _split(log, confidence)
    if pos.size < 2 or neg.size < 2:
        raise UndefinedEstimateError("Cohen's d needs at least two records in each class")
    pos = np.clip(pos, CLAMP_EPS, 1.0 - CLAMP_EPS)
    neg = np.clip(neg, CLAMP_EPS, 1.0 - CLAMP_EPS)
    lp = np.log(pos) - np.log1p(-pos)
    ln = np.log(neg) - np.log1p(-neg)
    vp = lp.var(ddof=1)
    vn = ln.var(ddof=1)
    if vp == 0.0 or vn == 0.0:
        raise UndefinedEstimateError("Cohen's d is undefined for a zero-variance class")
    pooled = math.sqrt(((pos.size - 1) * vp + (neg.size - 1) * vn) / (pos.size + neg.size - 2))
    return float((lp.mean() - ln.mean()) / pooled)


@dataclass
class EstimateReport:
    n: int
    n_correct: int
    accuracy: float
    auc_hat: Optional[float]
    d_hat: Optional[float]
    clamp_warnings: int
    source_label: str = ""
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def report(log: PredictionLog) -> EstimateReport:
    """All estimates for one log; undefined statistics become ``None`` plus a flag."""
    flags = []
    try:
        auc = estimate_meta_auc(log)
    except UndefinedEstimateError as exc:
        auc = None
        flags.append(f"auc_undefined: {exc}")
    try:
        d = estimate_d(log)
    except UndefinedEstimateError as exc:
        d = None
        flags.append(f"d_undefined: {exc}")
    n = len(log)
    return EstimateReport(
        n=n,
        n_correct=log.n_correct,
        accuracy=log.n_correct / n,
        auc_hat=auc,
        d_hat=d,
        clamp_warnings=log.clamp_warnings,
        source_label=log.source_label,
        flags=flags,
    )
