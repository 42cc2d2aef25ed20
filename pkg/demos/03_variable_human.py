"""A human whose own confidence varies from trial to trial.

Human confidence is logit-normal. The exact answer needs one numerical
integral; a probit substitution turns it into bivariate normal CDFs.
"""

# %%
from metasense import HumanSpec, combined_variable_approx, combined_variable_exact, d_from_auc, logit

human = HumanSpec.logit_normal(mu_h=float(logit(0.55)), sigma_h=0.5)
d = d_from_auc(0.89)
exact = combined_variable_exact(human, 0.66, d)
approx = combined_variable_approx(human, 0.66, d)
print(f"exact  {exact.value:.6f}  (quadrature error {exact.error_bound:.1e})")
print(f"approx {approx.value:.6f}  (relative gap {abs(approx.value - exact.value) / exact.value:.3%})")

# %%
# Where does the approximation drift? The substitution sigmoid(x) ~ Phi(0.6267 x)
# is worst a few logits from zero, so confident, consistent humans paired with
# weak AIs show the largest gap.
import itertools

rows = []
for acc, s, th, auc in itertools.product([0.2, 0.55, 0.9], [0.1, 0.8, 1.5], [0.3, 0.6, 0.9], [0.55, 0.9, 0.995]):
    h = HumanSpec.logit_normal(float(logit(acc)), s)
    dd = d_from_auc(auc)
    e = combined_variable_exact(h, th, dd).value
    a = combined_variable_approx(h, th, dd).value
    rows.append((abs(a - e) / e, acc, s, th, auc))
rows.sort(reverse=True)
print("largest relative gaps (rel, sigmoid(mu_h), sigma_h, theta, auc):")
for r in rows[:5]:
    print("  " + ", ".join(f"{v:.4f}" for v in r))
print(f"cells above 1%: {sum(r[0] > 0.01 for r in rows)} of {len(rows)}")

# %%
# As sigma_h shrinks the exact value approaches the constant-confidence answer.
from metasense import combined_constant

for s in (1.0, 0.3, 0.1, 1e-3):
    v = combined_variable_exact(HumanSpec.logit_normal(float(logit(0.55)), s), 0.66, d).value
    print(f"sigma_h = {s:<6} -> {v:.6f}")
print(f"constant c_h = 0.55 -> {combined_constant(0.55, 0.66, d).value:.6f}")
