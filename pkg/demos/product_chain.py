"""
Product inequalities on a Cantor square
=======================================

The dyadic grid of E x F is the product of the grids of E and F, so the
cell counts multiply exactly.  The lower/upper slope bands then give the
finite chain of product inequalities.
"""

from fractaldim.experiments import CampaignParams, product_campaign
from fractaldim.generators import cantor_ifs, cantor_set, koch_snowflake, moran_dimension

C = cantor_set(1 / 3, 8)
oracle = 2 * moran_dimension(cantor_ifs())
rep = product_campaign(C, C, oracle=oracle)
for name, value in rep.checks["rungs"].items():
    print(f"{name:20s} {value:.4f}")
print(f"oracle {oracle:.4f}, largest deviation {rep.checks['max_rung_deviation']:.4f}")
print("count identity holds on every scale:", rep.checks["count_identity_ok"])

# a mixed product in R^3: about 3 million points
rep = product_campaign(koch_snowflake(6), C, CampaignParams(r_min=3, r_max=8, allowed_fraction=0.0))
print("Koch x Cantor lower slope:", round(rep.checks["ExF"]["lower"], 4))
