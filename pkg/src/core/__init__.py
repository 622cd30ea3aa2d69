"""Core engine for T(A, δ)"""

from .backends import (
    CapabilityError,
    CompositionError,
    DegreeFunctionError,
    FinSetCategory,
    OpSetCategory,
    RegularCategory,
    SizeGuardError,
    get_backend,
)
from .engine import Engine, open_engine
from .lattice import LatticeError, SubLattice
from .maltsev import MaltsevCalculus
from .models import CanonicalFormError, CoRel, DegreeFn, Flavor, Mor, Obj, Rel, StarMor, Sub, TMor
from .projectors import NotSurjectiveError, ProjectorCalculus
from .relcat import RelationCategory
from .scalars import Poly
from .settings import EngineSettings, get_settings, load_settings
from .starbasis import BlockMap, ProjectionError, StarBasis, TensorDecompositionError
from .verification import SUITES, SuiteReport, run_suites

__all__ = [
    "BlockMap",
    "CanonicalFormError",
    "CapabilityError",
    "CompositionError",
    "CoRel",
    "DegreeFn",
    "DegreeFunctionError",
    "Engine",
    "EngineSettings",
    "FinSetCategory",
    "Flavor",
    "LatticeError",
    "MaltsevCalculus",
    "Mor",
    "NotSurjectiveError",
    "Obj",
    "OpSetCategory",
    "Poly",
    "ProjectionError",
    "ProjectorCalculus",
    "RegularCategory",
    "Rel",
    "RelationCategory",
    "SUITES",
    "SizeGuardError",
    "StarBasis",
    "StarMor",
    "Sub",
    "SuiteReport",
    "TMor",
    "TensorDecompositionError",
    "get_backend",
    "get_settings",
    "load_settings",
    "open_engine",
    "run_suites",
]
