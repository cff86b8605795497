"""
How often does a random translate break the intersection bound?
===============================================================

Runs the translation, rigid-motion and packing-side campaigns on the
order-6 Koch snowflake for several seeds and pools the samples, giving a
violation rate with a binomial error bar.  With a true rate p near 5%,
a single 100-sample campaign lands above 5 violations with probability
P(X > 5), printed at the end.
"""

import sys

from scipy.stats import binom

from fractaldim.experiments import CampaignParams, intersection_campaign, motion_campaign, packing_intersection_campaign
from fractaldim.generators import koch_snowflake

SEEDS = range(int(sys.argv[1]) if len(sys.argv) > 1 else 30)
K = koch_snowflake(6)

kinds = {
    "translation": intersection_campaign,
    "motion": motion_campaign,
    "packing": packing_intersection_campaign,
}
for name, run in kinds.items():
    bad = total = 0
    for seed in SEEDS:
        rep = run(K, K, count=100, params=CampaignParams(seed=seed))
        bad += rep.violations
        total += rep.samples
    p = bad / total
    err = (p * (1 - p) / total) ** 0.5
    print(f"{name:12s} {bad}/{total} = {p:.4f} +- {err:.4f}   P(>5 of 100) = {binom.sf(5, 100, p):.2f}")
