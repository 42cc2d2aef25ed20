"""Trial-level Monte Carlo of a human deciding whether to adopt AI advice.

Each trial draws the human's confidence (constant or logit-normal), the
human's correctness as Bernoulli(c_h), the AI's correctness and confidence
from its logit-normal model, applies a reliance policy and scores the final
answer. Trials are generated in fixed-size blocks, each with its own random
stream keyed by ``(seed, block)``, so results are bit-identical for any
number of workers.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterator, NamedTuple, Optional

import numpy as np

from .confidence import AiSpec, canonical_spec, d_from_auc, sample_ai_logits
from .empirical import estimate_meta_auc
from .numerics import logit, rng_stream, sigmoid
from .policy import Action, switch_logit_from_logit
from .team import HumanSpec

__all__ = [
    "HumanPolicy",
    "TrialRecord",
    "TrialLog",
    "SimSummary",
    "STUDY_CONDITIONS",
    "run_trials",
    "replicate_experiment_conditions",
]

DEFAULT_BLOCK = 1 << 16

# (label, AI accuracy, meta-AUC) of the five assistants in the behavioural study.
STUDY_CONDITIONS = (
    ("A", 0.66, 0.50),
    ("B", 0.66, 0.76),
    ("C", 0.66, 0.89),
    ("D", 0.66, 0.99),
    ("E", 0.55, 0.99),
)


@dataclass(frozen=True)
class HumanPolicy:
    """How the simulated human chooses between own answer and AI answer.

    ``kind`` is one of ``ideal-observer``, ``fixed-threshold`` (adopt the AI
    when its confidence is at least ``threshold``), ``always-self`` or
    ``always-ai``.
    """

    kind: str = "ideal-observer"
    threshold: Optional[float] = None

    KINDS = ("ideal-observer", "fixed-threshold", "always-self", "always-ai")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown policy {self.kind!r}")
        if self.kind == "fixed-threshold":
            if self.threshold is None or not 0.0 < self.threshold < 1.0:
                raise ValueError("fixed-threshold policy needs a threshold in (0, 1)")
        elif self.threshold is not None:
            raise ValueError(f"{self.kind} policy takes no threshold")

    @classmethod
    def ideal_observer(cls):
        return cls("ideal-observer")

    @classmethod
    def fixed_threshold(cls, t: float):
        return cls("fixed-threshold", float(t))

    @classmethod
    def always_self(cls):
        return cls("always-self")

    @classmethod
    def always_ai(cls):
        return cls("always-ai")


class TrialRecord(NamedTuple):
    y_h: int
    c_h: float
    y_m: int
    c_m: float
    action: Action
    y_final: int


@dataclass
class TrialLog:
    """Column-oriented trial data; ``rely`` is True where the AI was adopted."""

    y_h: np.ndarray
    c_h: np.ndarray
    y_m: np.ndarray
    c_m: np.ndarray
    rely: np.ndarray
    y_final: np.ndarray

    CSV_HEADER = ("y_h", "c_h", "y_m", "c_m", "action", "y_final")

    def __len__(self):
        return self.y_h.size

    def __getitem__(self, i) -> TrialRecord:
        return TrialRecord(
            int(self.y_h[i]),
            float(self.c_h[i]),
            int(self.y_m[i]),
            float(self.c_m[i]),
            Action.M if self.rely[i] else Action.H,
            int(self.y_final[i]),
        )

    def records(self) -> Iterator[TrialRecord]:
        for i in range(len(self)):
            yield self[i]

    def to_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        actions = np.where(self.rely, "M", "H")
        for row in zip(
            self.y_h.astype(int),
            self.c_h,
            self.y_m.astype(int),
            self.c_m,
            actions,
            self.y_final.astype(int),
        ):
            writer.writerow((row[0], f"{row[1]:.10g}", row[2], f"{row[3]:.10g}", row[4], row[5]))


@dataclass
class SimSummary:
    n_trials: int
    accuracy_before: float
    accuracy_after: float
    ai_accuracy_observed: float
    ai_auc_observed: float
    reliance_rate: float
    standard_error: float
    label: str = ""

    def to_dict(self) -> dict:
        out = asdict(self)
        if math.isnan(out["ai_auc_observed"]):
            out["ai_auc_observed"] = None
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _simulate_block(ai: AiSpec, human: HumanSpec, policy: HumanPolicy, size: int, rng):
    if human.is_constant:
        z_h = np.full(size, float(logit(human.c_h)))
        c_h = np.full(size, human.c_h)
    else:
        z_h = rng.normal(human.mu_h, human.sigma_h, size)
        c_h = sigmoid(z_h)
    y_h = rng.random(size) < c_h
    y_m, z_m = sample_ai_logits(ai, rng, size)

    if policy.kind == "ideal-observer":
        if ai.mu1 == ai.mu0:
            rely = ai.theta_m >= c_h
        else:
            rely = z_m >= switch_logit_from_logit(z_h, ai)
    elif policy.kind == "fixed-threshold":
        rely = z_m >= float(logit(policy.threshold))
    elif policy.kind == "always-ai":
        rely = np.ones(size, dtype=bool)
    else:
        rely = np.zeros(size, dtype=bool)
    y_final = np.where(rely, y_m, y_h)
    return y_h, c_h, y_m, z_m, rely, y_final


def run_trials(
    ai: AiSpec,
    human: HumanSpec,
    policy: HumanPolicy,
    n: int,
    seed: int,
    *,
    stream: tuple = (),
    block_size: int = DEFAULT_BLOCK,
    workers: int = 1,
    keep_trials: bool = True,
    label: str = "",
):
    """Simulate ``n`` trials.

    Args:
        stream: extra stream-key prefix, so several runs can share one seed
            without sharing random numbers.
        block_size: trials per random stream. Changing it changes the draws.
        workers: thread count; has no effect on the output.
        keep_trials: when False the returned log is ``None`` and only the AI
            outcome and logit are held per trial, for the meta-AUC.

    Returns:
        ``(TrialLog or None, SimSummary)``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    sizes = [block_size] * (n // block_size)
    if n % block_size:
        sizes.append(n % block_size)

    def work(i):
        cols = _simulate_block(ai, human, policy, sizes[i], rng_stream(seed, (*stream, i)))
        if keep_trials:
            return cols
        y_h, _, y_m, z_m, rely, y_final = cols
        # only the AUC needs per-trial data; everything else reduces to exact counts
        return int(y_h.sum()), y_m, z_m, int(rely.sum()), int(y_final.sum())

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(workers) as pool:
            blocks = list(pool.map(work, range(len(sizes))))
    else:
        blocks = [work(i) for i in range(len(sizes))]

    if keep_trials:
        y_h, c_h, y_m, z_m, rely, y_final = (np.concatenate(cols) for cols in zip(*blocks))
        n_h, n_rely, n_final = int(y_h.sum()), int(rely.sum()), int(y_final.sum())
    else:
        n_h = sum(b[0] for b in blocks)
        n_rely = sum(b[3] for b in blocks)
        n_final = sum(b[4] for b in blocks)
        y_m = np.concatenate([b[1] for b in blocks])
        z_m = np.concatenate([b[2] for b in blocks])
        del blocks
    acc_after = n_final / n
    try:
        # meta-AUC is rank based, so logits give the same value without saturation ties
        auc = estimate_meta_auc(y_m, z_m)
    except ValueError:
        auc = math.nan
    summary = SimSummary(
        n_trials=n,
        accuracy_before=n_h / n,
        accuracy_after=acc_after,
        ai_accuracy_observed=int(y_m.sum()) / n,
        ai_auc_observed=auc,
        reliance_rate=n_rely / n,
        standard_error=math.sqrt(acc_after * (1.0 - acc_after) / n),
        label=label,
    )
    log = TrialLog(y_h, c_h, y_m, sigmoid(z_m), rely, y_final) if keep_trials else None
    return log, summary


def replicate_experiment_conditions(
    seed: int,
    n_per_condition: int,
    *,
    mu_h: float = float(logit(0.55)),
    sigma_h: float = 0.5,
    policy: HumanPolicy = HumanPolicy(),
    workers: int = 1,
) -> list:
    """Simulate the five assistants of the behavioural study with one human model.

    The human's confidence is logit-normal around the observed pre-advice
    accuracy of 0.55; ``sigma_h`` is a free parameter because the study does
    not report the confidence spread. Condition ``i`` uses stream prefix
    ``(i,)`` under the shared seed.
    """
    human = HumanSpec.logit_normal(mu_h, sigma_h)
    out = []
    for i, (label, theta, auc) in enumerate(STUDY_CONDITIONS):
        ai = canonical_spec(theta, d_from_auc(auc))
        _, summary = run_trials(
            ai, human, policy, n_per_condition, seed,
            stream=(i,), workers=workers, keep_trials=False, label=label,
        )
        out.append(summary)
    return out
