"""A Lattès map of the sphere, its derived-from-Anosov surgery and the
indecomposable repeller it leaves behind."""

from .lattice import A, IntMatrix2, NotHyperbolic, RationalTorusPoint, eigenframe
from .pillowcase import SpherePoint, periodic_census, project, verify_lattes
from .surgery import PerturbedMap, SurgeryProfile, find_saddles
from .repeller import BasinLabel, compute_basins, trace_unstable_leaf
from .lamination import H_SYSTEM, SHIFT_SYSTEM, indecomposability_verdict

__all__ = [
    "A",
    "IntMatrix2",
    "NotHyperbolic",
    "RationalTorusPoint",
    "eigenframe",
    "SpherePoint",
    "periodic_census",
    "project",
    "verify_lattes",
    "PerturbedMap",
    "SurgeryProfile",
    "find_saddles",
    "BasinLabel",
    "compute_basins",
    "trace_unstable_leaf",
    "H_SYSTEM",
    "SHIFT_SYSTEM",
    "indecomposability_verdict",
]
