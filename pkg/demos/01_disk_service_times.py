"""
Disk service-time anatomy
=========================

Walks from a drive's geometry to the moments that feed every queueing and
rebuild model: the seek-distance distribution, the seek/latency/transfer
split, and the exact transform values used by the vacation analysis.
"""

import numpy as np

from raidlab.disk import (cheetah_15k5, kway_seek_expectations,
                          seek_distance_pmf, seek_time_moments,
                          service_time_moments, transform_eval, DiskProfile)

# %% The worked 15k RPM drive: 72170 cylinders, 146 GB.
prof = cheetah_15k5()
print("profile:", prof.name)
print("  cylinders        %d" % prof.cylinders)
print("  rotation         %.3f ms" % prof.rotation_time)
print("  capacity         %.1f GB" % (prof.capacity_bytes / 1e9))

# %% Seek distances: the arm does not move with probability 1/C, and the
# remaining mass decays linearly with distance; the mean lands near C/3.
pmf = seek_distance_pmf(prof)
print("mean seek distance %.0f cylinders (C/3 = %.0f)"
      % (pmf.moment(1), prof.cylinders / 3))

seek = seek_time_moments(pmf, prof.seek_time)
print("seek time          %.3f ms (sigma %.3f)"
      % (seek.m1, seek.variance ** 0.5))

# %% Full service time for 4 KB requests: seek + half a rotation + transfer.
svc = service_time_moments(prof, block_sectors=8)
print("service mean       %.3f ms, cv^2 %.3f" % (svc.m1, svc.cv2))

# %% A 7200 RPM drive pays 4.17 ms of latency alone.
slow = DiskProfile(cylinders=50_000, rotation_time=60000.0 / 7200,
                   seek_char=(1.0, 0.02))
print("7200 rpm latency   %.2f ms" % (slow.rotation_time / 2))

# %% Replication lets reads pick the closer arm: the expected minimum of k
# uniform seeks shrinks as C/(2k+1), writes pay the maximum.
for k in (1, 2, 3):
    mn, mx = kway_seek_expectations(prof.cylinders, k)
    print("k=%d  E[min] %.0f   E[max] %.0f cylinders" % (k, mn, mx))

# %% Exact transform values over the discrete seek distribution: these are
# the probabilities that an idle-time rebuild read escapes interception.
dist = pmf.map(prof.seek_time)
for rate_per_sec in (20.0, 50.0, 100.0):
    s = rate_per_sec / 1000.0
    print("P(no arrival during a seek) at %3.0f/s: %.4f"
          % (rate_per_sec, transform_eval(dist, s)))
