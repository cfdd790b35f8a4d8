"""
Rebuild under load
==================

The vacationing-server view of rebuild: the disk reads rebuild tracks only
while idle, external requests pay a residual-vacation penalty, and rebuild
time stretches as load rises.  A bandwidth-based estimate and the
permanent-customer alternative round out the picture.
"""

from raidlab.disk import Deterministic, cheetah_15k5, seek_time_dist, \
    service_time_moments
from raidlab.queueing import MS_PER_S, WorkloadSpec, mg1_wait
from raidlab.rebuild import (RebuildConfig, degraded_load_increase,
                             pcm_interception, rebuild_time_bandwidth,
                             rebuild_time_vsm, vacation_stats, vsm_wait)

prof = cheetah_15k5()
svc = service_time_moments(prof)
cfg = RebuildConfig(utilized_fraction=1.0)

# %% Rebuild time versus the pre-failure load.  The staged estimate walks
# the load down from doubled (just failed, read-only) to normal as
# redirection takes over; the shortcut divides the idle-disk time by
# (1 - 1.75 rho).
print("rebuild time (hours) vs normal-mode utilization")
for rho in (0.0, 0.1, 0.2, 0.3, 0.4):
    lam = rho / (svc.m1 / MS_PER_S)
    wl = WorkloadSpec(arrival_rate=lam)
    staged = rebuild_time_vsm(prof, wl, cfg) / 3.6e6
    shortcut = rebuild_time_vsm(prof, wl, cfg, mode="shortcut") / 3.6e6
    bandwidth = rebuild_time_bandwidth(prof, wl, cfg) / 3.6e6
    print("  rho %.1f   staged %6.2f   shortcut %6.2f   bandwidth %6.2f"
          % (rho, staged, shortcut, bandwidth))

# %% What rebuild does to the users: the extra wait is the mean residual of
# the track read in progress when a request arrives.
lam = 0.25 / (svc.m1 / MS_PER_S)
track = prof.track_time()
v1 = seek_time_dist(prof).shift(track)
v2 = Deterministic(track)
vac = vacation_stats(v1, v2, lam)
plain = mg1_wait(lam, svc)
with_rebuild = vsm_wait(lam, svc, vac)
print("wait without rebuild %.2f ms, during rebuild %.2f ms"
      % (plain.wait, with_rebuild.wait))
print("tracks read per idle period: %.2f" % vac.n_track)

# %% Keeping the rebuild reader in the ordinary queue (the permanent
# customer) gets it intercepted far more often than idle-time reading.
p_vsm, p_pcm = pcm_interception(100.0, 8.33, 10.0)
print("interception probability: idle-time %.3f, queued %.3f"
      % (p_vsm, p_pcm))

# %% Losing one disk raises the surviving disks' load between 4/3 (pure
# writes) and 2x (pure reads).
for f_r in (0.0, 0.5, 1.0):
    print("read fraction %.1f -> load increase %.3f"
          % (f_r, degraded_load_increase(8, f_r)))
