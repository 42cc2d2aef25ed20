"""Simulating the five assistants of the behavioural study.

Each assistant has an accuracy and a meta-AUC. The simulated human starts at
about 55% and follows the ideal reliance rule, so the numbers are upper
bounds on what real participants could reach.
"""

# %%
from metasense import HumanPolicy, STUDY_CONDITIONS, replicate_experiment_conditions

summaries = replicate_experiment_conditions(seed=7, n_per_condition=200_000)
print("cond  AI acc  meta-AUC (target / observed)  human before  team after  relied on AI")
for s, (label, theta, auc) in zip(summaries, STUDY_CONDITIONS):
    print(f"  {label}    {s.ai_accuracy_observed:.3f}   {auc:.2f} / {s.ai_auc_observed:.3f}"
          f"               {s.accuracy_before:.3f}        {s.accuracy_after:.3f}       {s.reliance_rate:.2f}")

# %%
# Assistant E is less accurate than A but far better at flagging its own
# mistakes, and the team does better with it.
a, e = summaries[0], summaries[4]
print(f"E - A = {e.accuracy_after - a.accuracy_after:+.4f} (SE {max(a.standard_error, e.standard_error):.4f})")

# %%
# Reliance policies other than the ideal observer, for comparison on assistant C.
from metasense import HumanSpec, canonical_spec, d_from_auc, logit, run_trials

ai = canonical_spec(0.66, d_from_auc(0.89))
human = HumanSpec.logit_normal(float(logit(0.55)), 0.5)
for policy in (HumanPolicy.ideal_observer(), HumanPolicy.fixed_threshold(0.7),
               HumanPolicy.always_self(), HumanPolicy.always_ai()):
    _, s = run_trials(ai, human, policy, 200_000, seed=3, keep_trials=False)
    print(f"{policy.kind:>15}{'' if policy.threshold is None else f' @ {policy.threshold}':<7}: {s.accuracy_after:.4f}")

# %%
# Individual trials can be kept and written out for other tools.
import io

log, _ = run_trials(ai, human, HumanPolicy(), 5, seed=3)
buf = io.StringIO()
log.to_csv(buf)
print(buf.getvalue())
