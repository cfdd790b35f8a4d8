"""raidlab: storage reliability and performance engineering toolkit.

Analytic queueing and rebuild models for disk arrays, erasure codes as
explicit parity-equation systems, declustered and replicated placement
schemes, a finite CTMC engine, closed-form reliability metrics, and the
Monte-Carlo simulators that validate them.
"""

from . import (builders, codes, config, ctmc, declustering, disk, gf,
               queueing, rebuild, reliability, sim)

__version__ = "0.1.0"

__all__ = [
    "builders", "codes", "config", "ctmc", "declustering", "disk", "gf",
    "queueing", "rebuild", "reliability", "sim",
]
