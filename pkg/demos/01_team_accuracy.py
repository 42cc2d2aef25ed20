"""Combined accuracy of a human who listens to an AI's confidence.

Run with ``python3 demos/01_team_accuracy.py``.
"""

# %%
# An AI is described by its accuracy and by how well its confidence separates
# right answers from wrong ones. That separation is a meta-AUC, or equivalently
# Cohen's d between the logit confidences of correct and incorrect answers.
from metasense import auc_from_d, canonical_spec, d_from_auc

d = d_from_auc(0.89)
print(f"meta-AUC 0.89 corresponds to d = {d:.4f}; back again: {float(auc_from_d(d)):.4f}")
ai = canonical_spec(theta_m=0.66, d=d)
print(ai)

# %%
# The calibration curve says how often the AI is right at a given confidence.
# A human whose own confidence is 0.55 should take the AI's answer whenever
# the AI's calibrated accuracy at its stated confidence beats 0.55.
from metasense import calibration_curve, switch_point

sp = switch_point(0.55, ai)
print(f"switch point c* = {sp.c_star:.4f}")
for c in (0.2, 0.4, sp.c_star, 0.6, 0.9):
    print(f"  AI says {c:.3f} -> right with probability {float(calibration_curve(ai, c)):.3f}")

# %%
# Averaging that rule over the AI's confidence distribution gives the team's
# expected accuracy in closed form. The quadrature route integrates the same
# rule numerically and the simulator plays it out trial by trial.
from metasense import HumanSpec, combined_accuracy

human = HumanSpec.constant(0.55)
for method in ("closed-form", "quadrature", "monte-carlo"):
    res = combined_accuracy(human, 0.66, d, method, n=400_000, seed=1)
    print(f"{method:>12}: {res.value:.5f} (+/- {res.error_bound:.1e})")

# %%
# Two limits frame the result. With an uninformative AI (d = 0) the human can
# only pick the better agent on average. With perfect sensitivity the human
# keeps every answer the AI gets wrong and gains c_h (1 - theta_m).
for dd in (0.0, 0.5, 1.0, 2.0, 4.0, 40.0):
    print(f"d = {dd:>4}: {combined_accuracy(human, 0.66, dd).value:.4f}")
print("ceiling 0.66 + 0.34 * 0.55 =", 0.66 + 0.34 * 0.55)
