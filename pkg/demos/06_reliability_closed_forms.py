"""
Closed-form reliability, from stripes to placement
===================================================

Mean times to data loss for repairable stripes, the effect of latent sector
errors and scrubbing, mirrored-organization coefficients, the epsilon
shortcut for quick rankings, and uneven parity aging on solid-state arrays.
"""

import math

from raidlab.reliability import (LseParams, PlacementParams,
                                 ReliabilityParams, angus_mttdl, chen_mttdl,
                                 diffraid_aging, diffraid_replacement_ages,
                                 eafdl, mirrored_coefficients, mttdl_with_lse,
                                 p_uf, pseg, raid5_closed_form, scrub_model,
                                 shortcut_compare, tmr)

HOURS_PER_YEAR = 24 * 365.25

# %% A repairable single-parity stripe of eight disks.
params = ReliabilityParams(disks=8, delta=1e-6, mu=1 / 17.8)
_, mttdl, _ = raid5_closed_form(params)
print("single parity, 8 disks: MTTDL %.2e hours (%.0f years)"
      % (mttdl, mttdl / HOURS_PER_YEAR))

# %% Fixed-rate versus per-failure repair approximations.
print("chen  (10 disks, 2 parities): %.3e h" % chen_mttdl(10, 2, 1e6, 17.8))
print("angus (10 disks, 2 parities): %.3e h" % angus_mttdl(10, 8, 1e6, 17.8))

# %% Latent sector errors dominate rebuild failures: interleaved parity
# inside each segment buys ten orders of magnitude.
lse = LseParams(p_bit=1e-14, length=128, interleaves=8,
                capacity_bytes=300 * 2 ** 30)
for scheme in ("none", "spc", "ipc", "rs"):
    seg = pseg(scheme, "independent", lse)
    puf = p_uf(lse, 8, 1, seg)
    m = mttdl_with_lse("raid5", params, lse, scheme)
    print("%-4s  P_seg %9.2e  P_uf %9.2e  MTTDL %9.3e h"
          % (scheme, seg, puf, m))

# %% Scrubbing: deterministic periods beat exponential ones by half.
for mode in ("deterministic", "exponential"):
    out = scrub_model(1e-9, 0.3, 50.0, 3600.0, mode)
    print("scrub %-13s P_s = %.3e" % (mode, out["P_s"]))

# %% Mirrored organizations: how many i-failure sets survive.
print("survivable 2-failure sets of 8 disks: "
      "pairs %d, chained %d, rotated %d, interleaved %d"
      % (mirrored_coefficients("bm", 8, 2),
         mirrored_coefficients("cd", 8, 2),
         mirrored_coefficients("grd", 8, 2),
         mirrored_coefficients("id", 8, 2)))

# %% The epsilon shortcut ranks organizations without plotting curves.
print("ranking at eps = 0.025 (three years of a 114-year disk):")
for org, coeff, power, term in shortcut_compare(
        ["raid5", "bm", "cd", "grd", "id", "raid6", "lsi", "raid7",
         "sspiral"], 8, 0.025):
    print("  %-8s 1-R ~ %.4g eps^%d = %.3e" % (org, coeff, power, term))

# %% Voted triples: a TMR module beats a simplex only before the mission
# time ln2/delta.
out = tmr(1e-4, "tmr")
print("tmr: MTTF %.0f h, mission time %.0f h"
      % (out["mttf"], out["mission_time"]))
print("tmr/simplex MTTF %.0f h" % tmr(1e-4, "tmr_simplex")["mttf"])

# %% Replica placement: declustering spreads rebuild load and, from
# three-way replication up, stretches the time to data loss.
for r in (2, 3):
    p = PlacementParams(n=20, c=1e12, r=r, b=1e11, lam=1e-4)
    cp = eafdl(p, "cp")
    dp = eafdl(p, "dp")
    print("r=%d  clustered MTTDL %.2e h (EAFDL %.2e)   "
          "declustered %.2e h (EAFDL %.2e)"
          % (r, cp[0], cp[1], dp[0], dp[1]))

# %% Uneven parity ages flash devices apart so they stop wearing out
# together; replacement ages converge to a staggered ladder.
print("aging ratio of (70,10,10,10):",
      diffraid_aging([70, 10, 10, 10])[0][1])
ages = diffraid_replacement_ages([80, 5, 5, 5, 5], 10_000.0)
print("converged replacement ages:", ["%.1f" % a for a in ages])
