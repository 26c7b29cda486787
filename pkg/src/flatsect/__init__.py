from ._connectable import Resource, ResourceProtocol
from ._injector import ResourceInjector
from .densities import DistanceFamily, RadialDensity, WeightProfile
from .specfun import CaseTriple, hit_probability
from .subspaces import AffineFlat, LinearSubspace

__all__ = (
    "AffineFlat",
    "CaseTriple",
    "DistanceFamily",
    "LinearSubspace",
    "RadialDensity",
    "Resource",
    "ResourceInjector",
    "ResourceProtocol",
    "WeightProfile",
    "hit_probability",
)
