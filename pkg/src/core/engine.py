"""Engine - one backend and one degree function wired through every layer"""

from dataclasses import dataclass
from typing import Optional

from .backends import RegularCategory, get_backend
from .cache import PureCache
from .maltsev import MaltsevCalculus
from .models import FINSET, OPSET, DegreeFn, Obj
from .projectors import ProjectorCalculus
from .relcat import RelationCategory
from .settings import EngineSettings
from .starbasis import StarBasis


DEFAULT_DEGREE = {FINSET: DegreeFn.ONE, OPSET: DegreeFn.T_POWER}


@dataclass
class Engine:
    """The layers of T(A, δ) for a fixed A and δ"""
    category: RegularCategory
    relations: RelationCategory
    projectors: ProjectorCalculus
    star: StarBasis
    maltsev: MaltsevCalculus

    @property
    def backend(self) -> str:
        return self.category.name

    @property
    def degree(self) -> DegreeFn:
        return self.relations.degree

    def obj(self, size: int) -> Obj:
        return self.category.obj(size)

    def describe(self) -> dict:
        return {
            "backend": self.backend,
            "degree": self.degree.cli_name,
            "capabilities": self.category.capabilities.to_dict(),
        }


_engines: PureCache[Engine] = PureCache("engines")


def build_engine(category: RegularCategory, degree: DegreeFn) -> Engine:
    relations = RelationCategory(category, degree)
    projectors = ProjectorCalculus(relations)
    star = StarBasis(projectors)
    return Engine(category, relations, projectors, star, MaltsevCalculus(star))


def open_engine(
    backend: str = OPSET,
    degree: "Optional[str | DegreeFn]" = None,
    settings: Optional[EngineSettings] = None,
) -> Engine:
    """
    Get the engine for a backend and degree function.

    Engines are cached per (backend, degree, settings). Without explicit
    settings the shared backend and the process settings are used; equal
    explicit settings share one engine with their own caches and guards.

    Raises:
        CapabilityError: For an unknown backend
        DegreeFunctionError: If the degree function is unavailable on the backend
    """
    d = DegreeFn.parse(degree) if degree is not None else DEFAULT_DEGREE.get(backend, DegreeFn.ONE)

    def build() -> Engine:
        category = get_backend(backend, settings)
        category.check_degree(d)
        return build_engine(category, d)

    key = None if settings is None else settings.model_dump_json()
    return _engines.get_or_compute((backend, d, key), build)
