"""
Spreading parity groups over more disks
=======================================

Declustering trades extra parity-group spread for a smaller degraded-mode
load and a parallel rebuild; copyset replication trades recovery spread
against the frequency of whole-copyset loss.
"""

from raidlab.declustering import (CopysetScheme, bibd_10_4_2,
                                  clustered_utilizations, copyset_pdl,
                                  nrp_layout, parity_columns, rebuild_reads,
                                  scatter_widths, shifted_layout, verify_bibd)

# %% The balanced design: 15 groups of 4 over 10 disks, every pair of disks
# sharing exactly 2 groups, so a rebuild reads exactly 2 strips per
# survivor.
layout = bibd_10_4_2()
report = verify_bibd(layout)
print("design identities hold:", report["ok"],
      "(b=%d, r=%d, L=%d)" % (report["b"], report["r"], report["L"]))
print("reads per survivor when disk 3 dies:", rebuild_reads(layout, 3))

# %% Nearly-random permutation: row-major groups, then one permutation per
# gcd(N,G)-row batch.
nrp = nrp_layout(10, 4, rows=4, seed=11)
print("nrp(10,4) distinct-disk violations:",
      len(nrp.distinct_disk_violations()))
print("parity per disk:", nrp.parity_counts())

# %% Shifted placement balances parity deterministically; coprime sizes need
# no shifting at all and the parity column walks i*G mod N.
sh = shifted_layout(10, 3)
print("shifted(10,3) parity columns:",
      [c + 1 for c in parity_columns(sh)[:10]])
sh2 = shifted_layout(10, 4)
print("shifted(10,4) parity imbalance:",
      max(sh2.parity_counts()) - min(sh2.parity_counts()))

# %% Degraded load: the declustering ratio (G-1)/(N-1) is the read
# amplification survivors see.
for g in (4, 6, 10):
    rr, rw, alpha = clustered_utilizations(10, g, 500.0, 0.7, 8.0, 8.0, 12.0)
    print("G=%2d  alpha %.2f  degraded rho_read %.2f  rho_write %.2f"
          % (g, alpha, rr / 1000, rw / 1000))

# %% Copysets: chopping two permutations into triples leaves only six node
# sets whose joint failure can lose data, versus 54 for windowed random
# placement.
random_scheme = CopysetScheme(9, 3, 4, scheme="random")
copyset_scheme = CopysetScheme(9, 3, 4, scheme="copyset", seed=1)
for scheme, label in ((random_scheme, "random"), (copyset_scheme, "copyset")):
    p, count = copyset_pdl(scheme)
    print("%-8s #copysets %2d  P(loss | 3 nodes down) = %s = %.2f"
          % (label, count, p, float(p)))
print("scatter width per node (copyset scheme):",
      sorted(set(scatter_widths(copyset_scheme))))
