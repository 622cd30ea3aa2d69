"""Projectors - subobject idempotents p_u, p_u*, the ω invariant and [x] = ⊕ [u]*"""

import logging
from dataclasses import dataclass, field

from .cache import PureCache
from .lattice import SubLattice
from .models import Mor, Obj, Sub, TMor
from .relcat import RelationCategory
from .scalars import Poly


logger = logging.getLogger(__name__)


class NotSurjectiveError(ValueError):
    """Raised when ω is requested for a morphism that is not surjective"""
    pass


class ProjectorError(Exception):
    """Raised when a projector family fails its decomposition identities"""
    pass


@dataclass
class ProjectorFamily:
    """All p_u and p_u* of one object"""
    x: Obj
    lattice: SubLattice
    p: dict[Sub, TMor] = field(default_factory=dict)
    p_star: dict[Sub, TMor] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "x": self.x.to_dict(),
            "summands": [
                {
                    "sub": u.as_list(),
                    "object_size": u.size,
                    "p": self.p[u].terms_to_list(),
                    "p_star": self.p_star[u].terms_to_list(),
                }
                for u in self.lattice.elements
            ],
        }


class ProjectorCalculus:
    """Subobject idempotents of T⁰(A, δ) and the transport identities they obey"""

    def __init__(self, relations: RelationCategory):
        self.relations = relations
        self.category = relations.category
        self._p: PureCache[TMor] = PureCache("projectors.p")
        self._p_star: PureCache[TMor] = PureCache("projectors.p_star")
        self._omega: PureCache[Poly] = PureCache("projectors.omega")
        self._families: PureCache[ProjectorFamily] = PureCache("projectors.families")

    def _check(self, x: Obj, u: Sub) -> None:
        if u.obj != x:
            raise ValueError(f"{u.text} is not a subobject of {x}")

    def p_sub(self, x: Obj, u: Sub) -> TMor:
        """p_u = [i][i]∨ as the single relation ⟨im(i, i)⟩"""
        self._check(x, u)
        return self._p.get_or_compute(u, lambda: self._compute_p(u))

    def _compute_p(self, u: Sub) -> TMor:
        incl = self.category.inclusion(u)
        return self.relations.basis(self.relations.rel_from_span(incl, incl)[1])

    def p_star(self, x: Obj, u: Sub) -> TMor:
        """p_u* = Σ_{v≤u} μ(v,u) p_v"""
        self._check(x, u)
        return self._p_star.get_or_compute(u, lambda: self._compute_p_star(x, u))

    def _compute_p_star(self, x: Obj, u: Sub) -> TMor:
        lattice = self.category.subobject_lattice(x)
        result = self.relations.zero(x, x)
        for v, mu in lattice.mobius_to(u).items():
            if mu:
                result = result + self.p_sub(x, v).scale(Poly.const(mu))
        return result

    def p_star_recursive(self, x: Obj, u: Sub) -> TMor:
        """p_u* from p_u = Σ_{v≤u} p_v*, by recursion on the down-set"""
        self._check(x, u)
        lattice = self.category.subobject_lattice(x)
        result = self.p_sub(x, u)
        for v in lattice.down_set(u):
            if v != u:
                result = result - self.p_star_recursive(x, v)
        return result

    def p_star_top(self, x: Obj) -> TMor:
        """p_x*, the idempotent cutting out [x]*"""
        return self.p_star(x, self.category.top(x))

    def omega(self, e: Mor) -> Poly:
        """
        ω_e = Σ μ(u, x)·δ(u ↠ y) over u ⊆ x with e(u) = y.

        Args:
            e: A surjective morphism x ↠ y

        Returns:
            The polynomial ω_e

        Raises:
            NotSurjectiveError: If e is not surjective
        """
        if not self.category.is_surjective(e):
            raise NotSurjectiveError(f"{e.text} is not surjective {e.dom} -> {e.cod}")
        return self._omega.get_or_compute(e, lambda: self._compute_omega(e))

    def _compute_omega(self, e: Mor) -> Poly:
        cat = self.category
        lattice = cat.subobject_lattice(e.dom)
        target = cat.top(e.cod)
        total = Poly.zero()
        for u, mu in lattice.mobius_to(lattice.top).items():
            if mu and cat.sub_image(e, u) == target:
                total = total + Poly.const(mu) * self.relations.delta(
                    cat.compose(e, cat.inclusion(u))
                )
        return total

    def subobject_decomposition(self, x: Obj, verify: bool = True) -> ProjectorFamily:
        """
        The family realizing [x] = ⊕_{u⊆x} [u]*.

        Raises:
            SizeGuardError: If the lattice of x is too large
            ProjectorError: If verification finds a failed identity
        """
        family = self._families.get_or_compute(x, lambda: self._build_family(x))
        if verify:
            failures = self.family_failures(family)
            if failures:
                raise ProjectorError("; ".join(failures))
        return family

    def _build_family(self, x: Obj) -> ProjectorFamily:
        lattice = self.category.subobject_lattice(x)
        family = ProjectorFamily(x=x, lattice=lattice)
        for u in lattice.elements:
            family.p[u] = self.p_sub(x, u)
            family.p_star[u] = self.p_star(x, u)
        logger.debug("projector family of %s: %d summands", x, len(lattice))
        return family

    def family_failures(self, family: ProjectorFamily) -> list[str]:
        """Check Σ p_u* = id and p_u* p_v* = [u=v] p_u*"""
        rel = self.relations
        failures = []
        total = rel.zero(family.x, family.x)
        for u in family.lattice.elements:
            total = total + family.p_star[u]
        if total != rel.identity(family.x):
            failures.append(f"sum of p* on {family.x} is not the identity")
        for u in family.lattice.elements:
            for v in family.lattice.elements:
                product = rel.compose(family.p_star[u], family.p_star[v])
                expected = family.p_star[u] if u == v else rel.zero(family.x, family.x)
                if product != expected:
                    failures.append(f"p*[{u.text}] p*[{v.text}] is wrong")
        return failures
