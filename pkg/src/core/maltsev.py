"""Maltsev - gluings (co-relations), the push-pull bijection and the gluing product"""

import itertools
import logging

from .backends import CapabilityError, CompositionError
from .cache import PureCache
from .lattice import SubLattice
from .models import CoRel, Flavor, Mor, Obj, Rel, StarMor, accumulate
from .scalars import Poly
from .starbasis import StarBasis


logger = logging.getLogger(__name__)


class MaltsevCalculus:
    """
    Co-relation picture of Hom([x]*, [y]*) on exact Mal'tsev backends.

    Every public operation checks the backend capability first, so FinSet
    callers fail fast with CapabilityError.
    """

    def __init__(self, star: StarBasis):
        self.star = star
        self.projectors = star.projectors
        self.relations = star.relations
        self.category = star.category
        self._corels: PureCache[tuple[CoRel, ...]] = PureCache("maltsev.corels")
        self._lattices: PureCache[SubLattice] = PureCache("maltsev.lattices")

    def _require(self) -> None:
        if not self.category.capabilities.is_exact_maltsev:
            raise CapabilityError(
                f"{self.category.name} is not an exact Mal'tsev category; gluings need opset"
            )

    # Gluings and cospans

    def corel_set(self, x: Obj, y: Obj) -> tuple[CoRel, ...]:
        """All gluings of x and y, ordered by size then pairs"""
        self._require()
        return self._corels.get_or_compute((x, y), lambda: self._enumerate(x, y))

    @staticmethod
    def _enumerate(x: Obj, y: Obj) -> tuple[CoRel, ...]:
        result = []
        for k in range(min(x.size, y.size) + 1):
            for xs in itertools.combinations(range(x.size), k):
                for ys in itertools.permutations(range(y.size), k):
                    result.append(CoRel(x, y, tuple(zip(xs, ys))))
        return tuple(sorted(result, key=CoRel.sort_key))

    def cospan(self, u: CoRel) -> tuple[Obj, Mor, Mor]:
        """The canonical cospan x ↠ u ↞ y of a gluing"""
        self._require()
        glued = self.category.obj(u.size)
        return (
            glued,
            Mor(u.x, glued, tuple(i for i, _ in u.pairs)),
            Mor(u.y, glued, tuple(j for _, j in u.pairs)),
        )

    def gluing_from_cospan(self, a: Mor, b: Mor) -> CoRel:
        """Canonical gluing of a cospan x ↠ u ↞ y"""
        self._require()
        if a.cod != b.cod:
            raise CompositionError("cospan legs have different targets")
        return CoRel(a.dom, b.dom, tuple(sorted(zip(a.table, b.table))))

    def quot_lattice(self, x: Obj, y: Obj) -> SubLattice:
        """
        R_q(x,y) ordered by u ≤ v iff the gluing v is contained in u.

        The top element is the empty gluing x, y ↠ 1.
        """
        self._require()
        return self._lattices.get_or_compute((x, y), lambda: self._build_quot_lattice(x, y))

    def _build_quot_lattice(self, x: Obj, y: Obj) -> SubLattice:
        def leq(u: CoRel, v: CoRel) -> bool:
            return set(v.pairs) <= set(u.pairs)

        def meet(u: CoRel, v: CoRel):
            pairs = sorted(set(u.pairs) | set(v.pairs))
            xs = [i for i, _ in pairs]
            ys = [j for _, j in pairs]
            if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
                return None
            return CoRel(x, y, tuple(pairs))

        return SubLattice(
            self.corel_set(x, y),
            leq=leq,
            rank=lambda u: -u.size,
            top=CoRel(x, y, ()),
            meet=meet,
            name=f"R_q({x},{y})",
        )

    # The push-pull bijection

    def push_pull(self, u: CoRel) -> Rel:
        """x ×_u y as a relation"""
        _, a, b = self.cospan(u)
        _, p1, p2 = self.category.pullback(a, b)
        return self.relations.rel_from_span(p1, p2)[1]

    def pull_push(self, r: Rel) -> CoRel:
        """x ⨿_r y as a gluing"""
        self._require()
        a, b = self.relations.legs(r)
        _, qx, qy = self.category.pushout(a, b)
        return self.gluing_from_cospan(qx, qy)

    def order_isomorphic(self, x: Obj, y: Obj) -> bool:
        """push_pull is a bijection onto R(x,y), inverse to pull_push, preserving order"""
        gluings = self.corel_set(x, y)
        images = [self.push_pull(u) for u in gluings]
        if sorted(images, key=lambda r: r.label) != list(self.star.r_set(x, y)):
            return False
        if any(self.pull_push(r) != u for u, r in zip(gluings, images)):
            return False
        lattice = self.quot_lattice(x, y)
        for u, r in zip(gluings, images):
            for v, s in zip(gluings, images):
                if lattice.leq(u, v) != self.category.sub_leq(r.sub, s.sub):
                    return False
        return True

    # Morphisms {u}'

    def curly_prime(self, u: CoRel) -> StarMor:
        """{u}' = {x ×_u y}"""
        return StarMor.basis(self.push_pull(u), Flavor.CURLY)

    def curly_prime_from_word(self, u: CoRel) -> StarMor:
        """{u}' read off p_y*[b]∨[a]p_x*"""
        _, a, b = self.cospan(u)
        rc, pr = self.relations, self.projectors
        word = rc.compose_all(pr.p_star_top(u.y), rc.cograph(b), rc.graph(a), pr.p_star_top(u.x))
        return self.star.project(word, u.x, u.y, Flavor.CURLY)

    def gluing_terms(self, phi: StarMor) -> list[tuple[CoRel, Poly]]:
        """A curly morphism rewritten as Σ c·{u}'"""
        self._require()
        if phi.flavor is not Flavor.CURLY:
            phi = self.star.basis_convert(phi, Flavor.CURLY)
        terms = [(self.pull_push(r), c) for r, c in phi.terms]
        return sorted(terms, key=lambda item: item[0].sort_key())

    def from_gluing_terms(self, x: Obj, y: Obj, terms: dict) -> StarMor:
        result: dict = {}
        for u, c in terms.items():
            accumulate(result, self.push_pull(u), c)
        return StarMor.build(x, y, Flavor.CURLY, result)

    def round_in_gluing_basis(self, r: Rel) -> dict:
        """(r) = Σ_{u ≤ x⨿_r y} μ_q(u, x⨿_r y){u}'"""
        top = self.pull_push(r)
        lattice = self.quot_lattice(r.x, r.y)
        return {u: Poly.const(mu) for u, mu in lattice.mobius_to(top).items() if mu}

    def malcev_compose(self, v: CoRel, u: CoRel) -> StarMor:
        """
        {v}'{u}' = ω_{y↠ȳ} Σ_{t ≤ w} μ_q(t, w){t}' with w = u ⨿_y v.

        Args:
            v: Gluing of y and z
            u: Gluing of x and y

        Returns:
            The product as a curly morphism [x]* -> [z]*

        Raises:
            CapabilityError: On backends without the exact Mal'tsev property
            CompositionError: If u and v do not share y
        """
        self._require()
        if u.y != v.x:
            raise CompositionError(f"gluings do not share a middle object ({u.y} vs {v.x})")
        cat = self.category
        u_obj, a, b = self.cospan(u)
        v_obj, c, d = self.cospan(v)
        f, _ = self.relations.rel_from_span(b, c)
        scale = self.projectors.omega(f)
        _, wa, wb = cat.pushout(b, c)
        w = self.gluing_from_cospan(wa, wb)
        result: dict = {}
        if not scale.is_zero():
            for t, mu in self.quot_lattice(u_obj, v_obj).mobius_to(w).items():
                if not mu:
                    continue
                _, ta, tb = self.cospan(t)
                glued = self.gluing_from_cospan(cat.compose(ta, a), cat.compose(tb, d))
                accumulate(result, self.push_pull(glued), scale * Poly.const(mu))
        logger.debug("gluing product %s * %s: %d terms", v.text, u.text, len(result))
        return StarMor.build(u.x, v.y, Flavor.CURLY, result)

    # Witnesses

    def _reflexive_relations(self, max_size: int):
        rc = self.relations
        for x in self.category.objects(max_size):
            diagonal = rc.diagonal_rel(x)
            square = self.category.product(x, x)[0]
            for sub in self.category.subobjects(square):
                if self.category.sub_leq(diagonal.sub, sub):
                    yield Rel(x, x, sub)

    def maltsev_witness(self, max_size: int) -> tuple[int, list[str]]:
        """
        Every reflexive relation on objects up to max_size is an equivalence.

        Returns:
            (relations checked, failure descriptions)
        """
        self._require()
        rc = self.relations
        checked, failures = 0, []
        for r in self._reflexive_relations(max_size):
            checked += 1
            if rc.transpose_rel(r) != r:
                failures.append(f"{r.text} on {r.x} is not symmetric")
            square = rc.rel_compose(r, r)
            if square is None or not self.category.sub_leq(square[0].sub, r.sub):
                failures.append(f"{r.text} on {r.x} is not transitive")
        return checked, failures

    def exactness_witness(self, max_size: int) -> tuple[int, list[str]]:
        """Every equivalence relation is the kernel pair of its quotient"""
        self._require()
        cat, rc = self.category, self.relations
        checked, failures = 0, []
        for r in self._reflexive_relations(max_size):
            checked += 1
            a, b = rc.legs(r)
            quotient = cat.coequalizer(a, b)
            _, p1, p2 = cat.pullback(quotient, quotient)
            if rc.rel_from_span(p1, p2)[1] != r:
                failures.append(f"{r.text} on {r.x} is not a kernel pair")
        return checked, failures
