import io
import itertools
import math

import numpy as np
import pytest

from metasense.confidence import canonical_spec, d_from_auc
from metasense.numerics import logit
from metasense.policy import Action
from metasense.simulator import (
    STUDY_CONDITIONS,
    HumanPolicy,
    TrialRecord,
    replicate_experiment_conditions,
    run_trials,
)
from metasense.team import HumanSpec, combined_constant, combined_variable_exact

AI = canonical_spec(0.66, d_from_auc(0.89))
CONST = HumanSpec.constant(0.55)


def test_policy_validation():
    with pytest.raises(ValueError):
        HumanPolicy("fixed-threshold")
    with pytest.raises(ValueError):
        HumanPolicy.fixed_threshold(1.0)
    with pytest.raises(ValueError):
        HumanPolicy("always-ai", 0.5)
    with pytest.raises(ValueError):
        HumanPolicy("coin-flip")


def test_rejects_empty_run():
    with pytest.raises(ValueError):
        run_trials(AI, CONST, HumanPolicy(), 0, 1)


def test_records_consistent():
    log, summary = run_trials(AI, HumanSpec.logit_normal(0.2, 0.5), HumanPolicy(), 5000, 3)
    assert len(log) == 5000 == summary.n_trials
    for rec in itertools.islice(log.records(), 500):
        assert isinstance(rec, TrialRecord)
        assert rec.y_final == (rec.y_h if rec.action is Action.H else rec.y_m)
        assert 0 < rec.c_h < 1 and 0 < rec.c_m < 1


def test_summary_fields():
    log, s = run_trials(AI, CONST, HumanPolicy(), 20_000, 5)
    assert s.accuracy_after == log.y_final.mean()
    assert s.accuracy_before == log.y_h.mean()
    assert s.reliance_rate == log.rely.mean()
    assert s.standard_error == pytest.approx(math.sqrt(s.accuracy_after * (1 - s.accuracy_after) / 20_000))
    for v in (s.accuracy_before, s.accuracy_after, s.ai_accuracy_observed, s.ai_auc_observed, s.reliance_rate):
        assert 0 <= v <= 1


def test_determinism_across_workers_and_keep_flag():
    kw = dict(block_size=1000)
    log1, s1 = run_trials(AI, HumanSpec.logit_normal(0.1, 0.7), HumanPolicy(), 10_500, 9, **kw)
    log2, s2 = run_trials(AI, HumanSpec.logit_normal(0.1, 0.7), HumanPolicy(), 10_500, 9, workers=4, **kw)
    _, s3 = run_trials(AI, HumanSpec.logit_normal(0.1, 0.7), HumanPolicy(), 10_500, 9, keep_trials=False, **kw)
    assert s1 == s2 == s3
    for a, b in zip((log1.y_h, log1.c_h, log1.c_m, log1.rely), (log2.y_h, log2.c_h, log2.c_m, log2.rely)):
        np.testing.assert_array_equal(a, b)


def test_seed_and_stream_change_draws():
    _, a = run_trials(AI, CONST, HumanPolicy(), 10_000, 1)
    _, b = run_trials(AI, CONST, HumanPolicy(), 10_000, 2)
    _, c = run_trials(AI, CONST, HumanPolicy(), 10_000, 1, stream=(3,))
    assert a != b and a != c


def test_always_self():
    _, s = run_trials(AI, CONST, HumanPolicy.always_self(), 100_000, 12)
    assert s.accuracy_after == s.accuracy_before
    assert s.reliance_rate == 0.0


@pytest.mark.slow
def test_always_ai():
    _, s = run_trials(AI, CONST, HumanPolicy.always_ai(), 1_000_000, 13, keep_trials=False)
    assert abs(s.accuracy_after - 0.66) <= 3 * s.standard_error
    assert s.accuracy_after == s.ai_accuracy_observed


@pytest.mark.slow
def test_ideal_observer_matches_closed_form():
    _, s = run_trials(AI, CONST, HumanPolicy(), 1_000_000, 14, keep_trials=False)
    expected = combined_constant(0.55, 0.66, d_from_auc(0.89)).value
    assert expected == pytest.approx(0.758, abs=5e-4)
    assert abs(s.accuracy_after - expected) <= 0.003
    assert abs(s.accuracy_after - expected) <= 3 * s.standard_error


@pytest.mark.slow
def test_ideal_observer_convergence_grid():
    for i, (c_h, theta, d) in enumerate(itertools.product([0.2, 0.55, 0.85], [0.3, 0.6, 0.9], [0.5, 1.5, 3.0])):
        _, s = run_trials(canonical_spec(theta, d), HumanSpec.constant(c_h), HumanPolicy(), 1_000_000, 15,
                          stream=(i,), keep_trials=False)
        expected = combined_constant(c_h, theta, d).value
        assert abs(s.accuracy_after - expected) <= 3 * s.standard_error, (c_h, theta, d)
        assert s.accuracy_after >= max(s.accuracy_before, s.ai_accuracy_observed) - 3 * s.standard_error


def test_variable_human_matches_quadrature():
    human = HumanSpec.logit_normal(0.4, 0.8)
    _, s = run_trials(AI, human, HumanPolicy(), 400_000, 16, keep_trials=False)
    expected = combined_variable_exact(human, AI.theta_m, AI.d).value
    assert abs(s.accuracy_after - expected) <= 3 * s.standard_error


def test_reliance_increases_with_ai_accuracy():
    rates = []
    for i, theta in enumerate([0.3, 0.5, 0.7, 0.9]):
        _, s = run_trials(canonical_spec(theta, 1.5), CONST, HumanPolicy(), 200_000, 17, stream=(i,),
                          keep_trials=False)
        rates.append(s.reliance_rate)
    assert all(b - a > 3 * math.sqrt(0.25 / 200_000) for a, b in zip(rates, rates[1:]))


def test_fixed_threshold_policy():
    log, s = run_trials(AI, CONST, HumanPolicy.fixed_threshold(0.6), 50_000, 18)
    np.testing.assert_array_equal(log.rely, log.c_m >= 0.6)


def test_uninformative_ai_follows_better_agent():
    _, s = run_trials(canonical_spec(0.66, 0.0), CONST, HumanPolicy(), 10_000, 19)
    assert s.reliance_rate == 1.0
    _, s = run_trials(canonical_spec(0.4, 0.0), CONST, HumanPolicy(), 10_000, 19)
    assert s.reliance_rate == 0.0


def test_trial_csv():
    log, _ = run_trials(AI, CONST, HumanPolicy(), 20, 20)
    buf = io.StringIO()
    log.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "y_h,c_h,y_m,c_m,action,y_final"
    assert len(lines) == 21
    first = lines[1].split(",")
    assert first[4] in ("H", "M") and first[0] in ("0", "1")


@pytest.fixture(scope="module")
def summaries():
    return replicate_experiment_conditions(7, 1_000_000)


class TestStudyConditions:
    @pytest.mark.slow
    def test_observed_targets(self, summaries):
        assert [s.label for s in summaries] == list("ABCDE")
        for s, (_, theta, auc) in zip(summaries, STUDY_CONDITIONS):
            assert s.ai_auc_observed == pytest.approx(auc, abs=0.002)
            assert s.ai_accuracy_observed == pytest.approx(theta, abs=0.0015)

    @pytest.mark.slow
    def test_orderings(self, summaries):
        a, b, c, d, e = summaries
        assert e.accuracy_after > a.accuracy_after
        for lo, hi in ((a, b), (b, c), (c, d)):
            assert hi.accuracy_after >= lo.accuracy_after - 3 * max(lo.standard_error, hi.standard_error)

    def test_human_matches_pre_advice_accuracy(self):
        (s, *_) = replicate_experiment_conditions(1, 50_000)
        # logit-normal mean sits slightly below sigmoid(mu_h) = 0.55 for mu_h > 0
        assert 0.53 < s.accuracy_before < 0.56

    def test_custom_sigma(self):
        out = replicate_experiment_conditions(1, 1000, sigma_h=0.1, mu_h=float(logit(0.6)))
        assert len(out) == 5
