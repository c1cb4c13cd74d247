# %% [markdown]
# # Stress-testing the inequalities behind the bounds
#
# Each estimate of the skew information is a chain of elementary steps: an
# exponential lemma, a Hermite-Hadamard estimate, a commutator relaxation
# and a few identities in the eigenbasis of ``ρS``. ``thermoqsl.ineqlab``
# samples random inputs for each step, keeps the worst slack and stores the
# offending inputs so they can be replayed exactly.

# %%
import json

from thermoqsl import ineqlab

reports = ineqlab.run_suite(seed=0, trials={"lemma": 20_000, "proof_chain": 200,
                                             "commutator_relaxation": 2_000})
for r in reports:
    print(f"{'PASS' if r.passed else 'FAIL'} {r.name:32s} trials={r.trials:6d} "
          f"min slack={r.min_slack:.3e}")

# %% [markdown]
# A deliberately flipped inequality fails, and its worst case can be
# replayed from JSON bit-for-bit.

# %%
(bad,) = ineqlab.run_check(ineqlab.NEGATIVE_CONTROL, seed=0)
case = json.loads(json.dumps(bad.worst_case))
print(bad.passed, bad.min_slack, ineqlab.replay(case) == bad.min_slack)
