"""
Compression densities of single points
======================================

The code length of the first r bits of a point, divided by r, is a
computable stand-in for its effective dimension.  Dyadic rationals
compress to almost nothing, pseudorandom expansions do not compress at
all, and conditioning a point on itself removes nearly all of its cost.
"""

from fractaldim.algodim import (
    cdim_estimate,
    chain_rule_residuals,
    dim_estimate,
    dyadic_point,
    load_calibration,
    mdim_estimate,
    periodic_point,
    prng_point,
)

rs = [2048, 2560, 3072, 3584, 4096]
points = {
    "3/8": dyadic_point(["3/8"]),
    "0110...": periodic_point("0110"),
    "prng": prng_point(1),
    "prng in R^2": prng_point(1, 2),
}
for name, x in points.items():
    est = dim_estimate(x, rs)
    print(f"{name:12s} lower={est.lower:.4f} upper={est.upper:.4f}")

x, y = prng_point(2), prng_point(3)
print("mdim(x:x)", mdim_estimate(x, x, rs))
print("mdim(x:y)", mdim_estimate(x, y, rs))
print("dim(x|x) ", cdim_estimate(x, x, rs))

# the four chain-rule links, each with its slack sigma(r)/r
res = chain_rule_residuals(x, y, 4096, load_calibration())
print("residuals", [round(v, 4) for v in res.residuals], "slack", round(res.slack, 4), "ok", res.ok)
