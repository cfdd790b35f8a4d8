"""
Erasure codes as equation systems
=================================

Every construction here is a plain list of parity equations over a small
field, so recoverability, repair cost and fault-tolerance classification
all reduce to rank computations that can be enumerated exhaustively.
"""

from itertools import combinations

import numpy as np

from raidlab import builders, codes

rng = np.random.default_rng(7)

# %% Double parity, two ways: rotated diagonals and the vertical code.
rdp = builders.rdp(5)
print("rdp(5): %d symbols over %d disks, %d XORs per stripe"
      % (rdp.n, len(rdp.columns()), codes.encode_xor_count(rdp)))
pairs = list(combinations(rdp.columns(), 2))
print("  column pairs recoverable: %d/%d"
      % (sum(codes.is_recoverable(rdp, p, "column") for p in pairs),
         len(pairs)))

xcode = builders.xcode(7)
print("xcode(7) column tolerance: %d"
      % codes.erasure_tolerance(xcode, "column"))

# %% Local reconstruction: most repairs touch three disks instead of six.
azure = builders.azure_lrc(10, 6, 3)
metrics = codes.repair_metrics(azure)
print("azure(10,6,3)  ARC %.1f  NRC %.1f  DRC %.1f"
      % (metrics["ARC"], metrics["NRC"], metrics["DRC"]))
plan = codes.repair_plan(azure, ["d0"])
print("  repairing d0 reads:", ", ".join(plan.reads))

# %% The two-group code with searched coefficients decodes every
# information-theoretically decodable four-failure pattern.
was = builders.was_lrc_6_2_2()
frac3 = codes.recoverable_fraction(was, 3)[0]
frac4, exact, _ = codes.recoverable_fraction(was, 4)
print("two-group LRC: 3-failures %.0f%%, 4-failures %.1f%% (%s)"
      % (100 * frac3, 100 * frac4, exact))

# %% The split-parity pyramid decodes fewer patterns than joint elimination
# would, because its decoder works group-locally before falling back to the
# base code.
pyr = builders.pyramid_8_2_2()
basic = codes.recoverable_fraction(pyr, 4, decoder="local-global")[2]
joint = codes.recoverable_fraction(pyr, 4, decoder="joint")[2]
print("pyramid 4-failures: basic decoder %d/%d, joint %d/%d"
      % (basic[0], basic[1], joint[0], joint[1]))

# %% Grid composition: row and column single-parity codes tolerate any
# three erasures and fail exactly on rectangles.
grid = builders.hvpc(4, 4)
print("4x4 grid tolerance:", codes.erasure_tolerance(grid))
print("  2x2 rectangle recoverable?",
      codes.is_recoverable(grid, ["s0_0", "s0_1", "s1_0", "s1_1"]))

# %% Sector/disk fault models: the same layout is PMDS or merely SD
# depending on the global-parity coefficients.
for variant in ("pmds", "sd"):
    code = builders.pmds_fig(variant)
    cls = codes.classify_array_code(code, n=7, m=1, r=4, s=2)
    print("pmds_fig(%s) classifies as %s" % (variant, cls))

# %% Encode-erase-decode round trip on random data.
values = codes.encode(was, None, rng)
erased = {"x0", "y1", "p0"}
recovered = codes.decode(was, {s: v for s, v in values.items()
                               if s not in erased}, erased)
print("round trip exact:", all(recovered[s] == values[s] for s in erased))
