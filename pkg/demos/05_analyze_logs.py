"""Measuring accuracy and metacognitive sensitivity from a prediction log.

A log is a list of (correct, confidence) records, from a CSV or JSON file or
built in memory.
"""

# %%
import tempfile
from pathlib import Path

from metasense import load_log, report

tmp = Path(tempfile.mkdtemp())
(tmp / "sample.csv").write_text("correct,confidence\n1,0.8\n1,0.5\n0,0.5\n0,0.2\n")
log = load_log(tmp / "sample.csv")
# four correct/incorrect pairs: three won outright and one tie counted as half
print(report(log).to_json(indent=2))

# %%
# A synthetic log drawn from a known AI recovers its accuracy and meta-AUC.
from metasense import PredictionLog, canonical_spec, d_from_auc, rng_stream, sample_ai_trials

y, c = sample_ai_trials(canonical_spec(0.66, d_from_auc(0.89)), rng_stream(5), 100_000)
r = report(PredictionLog.from_records(zip(y, c), "synthetic"))
print(f"accuracy {r.accuracy:.4f} (0.66), meta-AUC {r.auc_hat:.4f} (0.89), d {r.d_hat:.4f} ({d_from_auc(0.89):.4f})")

# %%
# Confidences of exactly 0 or 1 are pulled just inside the interval, with a
# warning, so that logits stay finite.
import warnings

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    clamped = PredictionLog.from_records([(1, 1.0), (0, 0.0), (1, 0.7)])
print(f"clamped {clamped.clamp_warnings} values; warning: {caught[0].message}")

# %%
# Undefined estimates are reported as nulls with a flag rather than raised.
print(report(PredictionLog.from_records([(1, 0.9)])).to_dict())
