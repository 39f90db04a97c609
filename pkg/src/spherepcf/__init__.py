"""Pair correlation statistics of random and structured point sets on spheres."""

from .eq import EqPartition, RegionId, build_eq_partition
from .ensembles import IID, Harmonic, Jittered, Spherical
from .errors import DomainError, QuadratureError, SamplingError
from .pcf import SGrid, compare_to_oracle, g_statistic, pcf_curve

__version__ = "0.1.0"

__all__ = [
    "EqPartition", "RegionId", "build_eq_partition",
    "IID", "Harmonic", "Jittered", "Spherical",
    "DomainError", "QuadratureError", "SamplingError",
    "SGrid", "compare_to_oracle", "g_statistic", "pcf_curve",
]
