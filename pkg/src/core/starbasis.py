"""Star basis - Hom([x]*, [y]*) in the (r) and {r} bases, products and tensor blocks"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .backends import CompositionError
from .cache import PureCache
from .models import CanonicalFormError, Flavor, Mor, Obj, Rel, StarMor, Sub, Summand, TMor, accumulate
from .projectors import ProjectorCalculus
from .scalars import Poly


logger = logging.getLogger(__name__)


class ProjectionError(Exception):
    """Raised when a conjugated morphism does not re-expand in the curly basis"""
    pass


class TensorDecompositionError(Exception):
    """Raised when a tensor identity or an injectivity claim fails"""
    pass


@dataclass(frozen=True)
class SummandPermutation:
    """A bijection between tensor summands induced by an isomorphism of A"""
    source: Obj
    target: Obj
    mapping: tuple[tuple[Sub, Sub], ...]

    def as_dict(self) -> dict[Sub, Sub]:
        return dict(self.mapping)

    def then(self, other: "SummandPermutation") -> "SummandPermutation":
        """Apply self, then other"""
        if other.source != self.target:
            raise CompositionError("summand permutations do not compose")
        step = other.as_dict()
        return SummandPermutation(
            self.source, other.target, tuple((u, step[v]) for u, v in self.mapping)
        )

    def inverse(self) -> "SummandPermutation":
        return SummandPermutation(
            self.target, self.source, tuple(sorted(((v, u) for u, v in self.mapping), key=lambda p: p[0].label))
        )

    def is_identity(self) -> bool:
        return self.source == self.target and all(u == v for u, v in self.mapping)

    def to_dict(self) -> dict:
        return {
            "source": self.source.to_dict(),
            "target": self.target.to_dict(),
            "mapping": [[u.as_list(), v.as_list()] for u, v in self.mapping],
        }


@dataclass
class BlockMap:
    """
    A morphism ⊕_u [u]* -> ⊕_v [v]* between tensor decompositions.

    Blocks are keyed (dst summand, src summand); absent keys are zero.
    """
    flavor: Flavor
    src_summands: tuple[Rel, ...]
    dst_summands: tuple[Rel, ...]
    blocks: dict[tuple[Rel, Rel], StarMor] = field(default_factory=dict)
    flagged: set[tuple[Rel, Rel]] = field(default_factory=set)

    def add(self, dst: Rel, src: Rel, value: StarMor) -> None:
        current = self.blocks.get((dst, src))
        total = value if current is None else current + value
        if total.is_zero():
            self.blocks.pop((dst, src), None)
        else:
            self.blocks[(dst, src)] = total

    def block(self, dst: Rel, src: Rel) -> Optional[StarMor]:
        return self.blocks.get((dst, src))

    def is_zero(self) -> bool:
        return not self.blocks

    def to_dict(self) -> dict:
        src_index = {u: i for i, u in enumerate(self.src_summands)}
        dst_index = {v: i for i, v in enumerate(self.dst_summands)}
        matrix = []
        for v in self.dst_summands:
            row = []
            for u in self.src_summands:
                entry = self.blocks.get((v, u))
                row.append(entry.terms_to_list() if entry is not None else [])
            matrix.append(row)
        return {
            "flavor": self.flavor.value,
            "summands_src": [u.to_dict() for u in self.src_summands],
            "summands_dst": [v.to_dict() for v in self.dst_summands],
            "blocks": matrix,
            "flagged": sorted([dst_index[v], src_index[u]] for v, u in self.flagged),
        }


class StarBasis:
    """
    The generators [x]* = p_x*[x] and their Hom spaces.

    Every closed-form product has an oracle counterpart (embed into T⁰,
    compose there, project back) which the verification suites compare
    against.
    """

    def __init__(self, projectors: ProjectorCalculus):
        self.projectors = projectors
        self.relations = projectors.relations
        self.category = projectors.category
        self._r_sets: PureCache[tuple[Rel, ...]] = PureCache("star.r_set")
        self._embeds: PureCache[TMor] = PureCache("star.embed")
        self._round: PureCache[dict] = PureCache("star.round")
        self._curly: PureCache[dict] = PureCache("star.curly")
        self._curly_round: PureCache[dict] = PureCache("star.curly_round")

    # Basis index sets

    def r_set(self, x: Obj, y: Obj) -> tuple[Rel, ...]:
        """R(x,y): relations whose both projections are surjective, label order"""
        return self._r_sets.get_or_compute((x, y), lambda: self._compute_r_set(x, y))

    def _compute_r_set(self, x: Obj, y: Obj) -> tuple[Rel, ...]:
        cat = self.category
        product = cat.product(x, y)[0]
        result = []
        for u in cat.subobjects(product):
            rel = Rel(x, y, u)
            a, b = self.relations.legs(rel)
            if cat.is_surjective(a) and cat.is_surjective(b):
                result.append(rel)
        return tuple(result)

    def in_r_set(self, rel: Rel) -> bool:
        a, b = self.relations.legs(rel)
        return self.category.is_surjective(a) and self.category.is_surjective(b)

    def star_hom_dim(self, x: Obj, y: Obj) -> int:
        return len(self.r_set(x, y))

    def summand_object(self, rel: Rel) -> Obj:
        return self.category.sub_object(rel.sub)

    def _validate(self, phi: StarMor) -> None:
        for rel, _ in phi.terms:
            if not self.in_r_set(rel):
                raise CanonicalFormError(f"{rel.text} is not in R({phi.x},{phi.y})")

    # Basis change, embedding and projection

    def basis_convert(self, phi: StarMor, target: Flavor) -> StarMor:
        """
        Change between {r} = Σ_{s⊆r} (s) and (r) = Σ_{s⊆r} μ(s,r){s}.

        R(x,y) is an up-set of O(x×y), so the Möbius values of the full
        lattice restrict correctly to it.
        """
        target = Flavor(target)
        if phi.flavor is target:
            return phi
        rels = self.r_set(phi.x, phi.y)
        result: dict = {}
        if phi.flavor is Flavor.CURLY:
            for r, c in phi.terms:
                for s in rels:
                    if self.category.sub_leq(s.sub, r.sub):
                        accumulate(result, s, c)
        else:
            lattice = self.category.subobject_lattice(self.category.product(phi.x, phi.y)[0])
            members = set(rels)
            for r, c in phi.terms:
                for s_sub, mu in lattice.mobius_to(r.sub).items():
                    s = Rel(phi.x, phi.y, s_sub)
                    if mu and s in members:
                        accumulate(result, s, c * Poly.const(mu))
        return StarMor.build(phi.x, phi.y, target, result)

    def embed_basis(self, rel: Rel, flavor: Flavor) -> TMor:
        """(r) = p_y*[b]p_r*[a]∨p_x* or {r} = p_y*⟨r⟩p_x* in the relation basis"""
        flavor = Flavor(flavor)
        return self._embeds.get_or_compute((rel, flavor), lambda: self._compute_embed(rel, flavor))

    def _compute_embed(self, rel: Rel, flavor: Flavor) -> TMor:
        rc, pr = self.relations, self.projectors
        if flavor is Flavor.CURLY:
            middle = rc.basis(rel)
        else:
            a, b = rc.legs(rel)
            middle = rc.compose_all(
                rc.graph(b), pr.p_star_top(self.summand_object(rel)), rc.cograph(a)
            )
        return rc.compose_all(pr.p_star_top(rel.y), middle, pr.p_star_top(rel.x))

    def embed_round_short(self, rel: Rel) -> TMor:
        """[b]p_r*[a]∨, equal to (r) without the outer projectors"""
        rc = self.relations
        a, b = rc.legs(rel)
        return rc.compose_all(rc.graph(b), self.projectors.p_star_top(self.summand_object(rel)), rc.cograph(a))

    def embed(self, phi: StarMor) -> TMor:
        self._validate(phi)
        result = self.relations.zero(phi.x, phi.y)
        for rel, c in phi.terms:
            result = result + self.embed_basis(rel, phi.flavor).scale(c)
        return result

    def project(self, psi: TMor, x: Obj, y: Obj, flavor: Flavor = Flavor.CURLY) -> StarMor:
        """
        Conjugate by p_y*, p_x* and read off the curly coefficients.

        Raises:
            CompositionError: If psi does not map [x] -> [y]
            ProjectionError: If the conjugate is not the embedding of its reading
        """
        if psi.dom != x or psi.cod != y:
            raise CompositionError(f"projecting a morphism {psi.dom} -> {psi.cod} onto {x} -> {y}")
        pr = self.projectors
        conjugate = self.relations.compose_all(pr.p_star_top(y), psi, pr.p_star_top(x))
        curly = StarMor.build(
            x, y, Flavor.CURLY, {r: conjugate.coefficient(r) for r in self.r_set(x, y)}
        )
        if self.embed(curly) != conjugate:
            raise ProjectionError(f"conjugated morphism {x} -> {y} leaves the span of the curly basis")
        return self.basis_convert(curly, flavor)

    def star_adjoint(self, phi: StarMor) -> StarMor:
        """(r)∨ = (r∨) and {r}∨ = {r∨}"""
        return StarMor.build(
            phi.y, phi.x, phi.flavor,
            {self.relations.transpose_rel(r): c for r, c in phi.terms},
        )

    def basis_independent(self, x: Obj, y: Obj) -> bool:
        """Each {r} has coefficient matrix on R(x,y) equal to the identity"""
        rels = self.r_set(x, y)
        for r in rels:
            embedded = self.embed_basis(r, Flavor.CURLY)
            for s in rels:
                expected = Poly.one() if r == s else Poly.zero()
                if embedded.coefficient(s) != expected:
                    return False
        return True

    # Products

    def _check_composable(self, sigma: StarMor, rho: StarMor, flavor: Flavor) -> None:
        if rho.y != sigma.x:
            raise CompositionError(f"star morphisms do not share a middle object ({rho.y} vs {sigma.x})")
        if rho.flavor is not flavor or sigma.flavor is not flavor:
            raise CanonicalFormError(f"expected {flavor.value} morphisms")

    def _bilinear(self, sigma: StarMor, rho: StarMor, flavor: Flavor, product) -> StarMor:
        result: dict = {}
        for r, c in rho.terms:
            for s, d in sigma.terms:
                for rel, coeff in product(r, s).items():
                    accumulate(result, rel, c * d * coeff)
        return StarMor.build(rho.x, sigma.y, flavor, result)

    def compose_round(self, sigma: StarMor, rho: StarMor) -> StarMor:
        """(s)(r) = Σ_u ω_{u↠ū}(ū) over u ⊆ r×_y s surjecting onto r and s"""
        self._check_composable(sigma, rho, Flavor.ROUND)
        return self._bilinear(sigma, rho, Flavor.ROUND, self._round_product)

    def _round_product(self, r: Rel, s: Rel) -> dict:
        return self._round.get_or_compute((r, s), lambda: self._compute_round(r, s))

    def _compute_round(self, r: Rel, s: Rel) -> dict:
        cat, rc = self.category, self.relations
        a_r, b_r = rc.legs(r)
        a_s, b_s = rc.legs(s)
        span = cat.pullback(b_r, a_s)
        if span is None:
            return {}
        t, q_r, q_s = span
        result: dict = {}
        for u in cat.subobjects(t):
            incl = cat.inclusion(u)
            to_r, to_s = cat.compose(q_r, incl), cat.compose(q_s, incl)
            if not (cat.is_surjective(to_r) and cat.is_surjective(to_s)):
                continue
            f, image = rc.rel_from_span(cat.compose(a_r, to_r), cat.compose(b_s, to_s))
            accumulate(result, image, self.projectors.omega(f))
        return result

    def compose_curly(self, sigma: StarMor, rho: StarMor) -> StarMor:
        """{s}{r} = Σ_{y'⊆y} μ(y',y)·δ·{r∘_{y'}s}"""
        self._check_composable(sigma, rho, Flavor.CURLY)
        return self._bilinear(sigma, rho, Flavor.CURLY, self._curly_product)

    def _curly_product(self, r: Rel, s: Rel) -> dict:
        return self._curly.get_or_compute((r, s), lambda: self._compute_curly(r, s))

    def _compute_curly(self, r: Rel, s: Rel) -> dict:
        cat, rc = self.category, self.relations
        a_r, b_r = rc.legs(r)
        a_s, b_s = rc.legs(s)
        lattice = cat.subobject_lattice(r.y)
        result: dict = {}
        for y_sub, mu in lattice.mobius_to(lattice.top).items():
            if not mu:
                continue
            j = cat.inclusion(y_sub)
            left = cat.pullback(b_r, j)
            right = cat.pullback(j, a_s)
            if left is None or right is None:
                continue
            _, c1, d1 = left
            _, d2, c2 = right
            to_x, to_z = cat.compose(a_r, c1), cat.compose(b_s, c2)
            if not (cat.is_surjective(to_x) and cat.is_surjective(to_z)):
                continue
            middle = cat.pullback(d1, d2)
            if middle is None:
                continue
            _, e1, e2 = middle
            f, image = rc.rel_from_span(cat.compose(to_x, e1), cat.compose(to_z, e2))
            accumulate(result, image, Poly.const(mu) * rc.delta(f))
        return result

    def compose_curly_as_round(self, sigma: StarMor, rho: StarMor) -> StarMor:
        """{s}{r} = Σ_u ω_{u↠ū}(ū) over u ⊆ r×_y s surjecting onto x, y and z"""
        self._check_composable(sigma, rho, Flavor.CURLY)
        return self._bilinear(sigma, rho, Flavor.ROUND, self._curly_round_product)

    def _curly_round_product(self, r: Rel, s: Rel) -> dict:
        return self._curly_round.get_or_compute((r, s), lambda: self._compute_curly_round(r, s))

    def _compute_curly_round(self, r: Rel, s: Rel) -> dict:
        cat, rc = self.category, self.relations
        a_r, b_r = rc.legs(r)
        a_s, b_s = rc.legs(s)
        span = cat.pullback(b_r, a_s)
        if span is None:
            return {}
        t, q_r, q_s = span
        result: dict = {}
        for u in cat.subobjects(t):
            incl = cat.inclusion(u)
            to_r, to_s = cat.compose(q_r, incl), cat.compose(q_s, incl)
            to_x, to_z = cat.compose(a_r, to_r), cat.compose(b_s, to_s)
            legs = (to_x, cat.compose(b_r, to_r), to_z)
            if not all(cat.is_surjective(leg) for leg in legs):
                continue
            f, image = rc.rel_from_span(to_x, to_z)
            accumulate(result, image, self.projectors.omega(f))
        return result

    def compose(self, sigma: StarMor, rho: StarMor) -> StarMor:
        """σ∘ρ by the closed formula of their (shared) flavor"""
        if rho.flavor is Flavor.ROUND:
            return self.compose_round(sigma, rho)
        return self.compose_curly(sigma, rho)

    def compose_oracle(self, sigma: StarMor, rho: StarMor) -> StarMor:
        """σ∘ρ computed in T⁰ and projected back, in ρ's flavor"""
        if rho.y != sigma.x:
            raise CompositionError("star morphisms do not share a middle object")
        composite = self.relations.compose(self.embed(sigma), self.embed(rho))
        return self.project(composite, rho.x, sigma.y, rho.flavor)

    def identity(self, x: Obj, flavor: Flavor = Flavor.CURLY) -> StarMor:
        """{Δx}, which is also (Δx)"""
        return StarMor.basis(self.relations.diagonal_rel(x), flavor)

    # Tensor decomposition

    def summands_of(self, product: Obj, projections: Sequence[Mor]) -> list[Sub]:
        cat = self.category
        result = []
        for u in cat.subobjects(product):
            incl = cat.inclusion(u)
            if all(cat.is_surjective(cat.compose(p, incl)) for p in projections):
                result.append(u)
        return result

    def tensor_decompose(self, x: Obj, y: Obj) -> list[Summand]:
        """
        [x]*⊗[y]* = ⊕_{r∈R(x,y)} [r]*, checked as p_x*⊗p_y* = Σ p_r*.

        Raises:
            SizeGuardError: If O(x×y) is too large
            TensorDecompositionError: If the projector identity fails
        """
        pr, rc = self.projectors, self.relations
        product = self.category.product(x, y)[0]
        summands = [
            Summand(r.sub, pr.p_star(product, r.sub)) for r in self.r_set(x, y)
        ]
        self._check_sum(rc.tensor(pr.p_star_top(x), pr.p_star_top(y)), summands)
        return summands

    def multi_tensor_decompose(self, xs: Sequence[Obj]) -> list[Summand]:
        """
        The n-fold decomposition over the left-nested product.

        Summands are the subobjects surjecting onto every factor.
        """
        if len(xs) < 2:
            raise ValueError("a tensor decomposition needs at least two factors")
        pr, rc = self.projectors, self.relations
        product, projections = self.nested_product(xs)
        lhs = pr.p_star_top(xs[0])
        for x in xs[1:]:
            lhs = rc.tensor(lhs, pr.p_star_top(x))
        summands = [
            Summand(u, pr.p_star(product, u))
            for u in self.summands_of(product, projections)
        ]
        self._check_sum(lhs, summands)
        return summands

    def nested_product(self, xs: Sequence[Obj]) -> tuple[Obj, list[Mor]]:
        """((x1×x2)×x3)×... with its projections onto every factor"""
        cat = self.category
        product = xs[0]
        projections = [cat.identity(xs[0])]
        for x in xs[1:]:
            product, p1, p2 = cat.product(product, x)
            projections = [cat.compose(p, p1) for p in projections] + [p2]
        return product, projections

    def _check_sum(self, expected: TMor, summands: list[Summand]) -> None:
        total = self.relations.zero(expected.dom, expected.cod)
        for summand in summands:
            total = total + summand.projector
        if total != expected:
            raise TensorDecompositionError(f"tensor projectors on {expected.dom} do not add up")

    # Coherence

    def transport(self, iso: Mor, summands: Sequence[Sub]) -> SummandPermutation:
        """Move summands of dom(iso) to summands of cod(iso)"""
        if not self.category.is_iso(iso):
            raise CompositionError(f"{iso.text} is not an isomorphism")
        return SummandPermutation(
            iso.dom, iso.cod, tuple((u, self.category.sub_image(iso, u)) for u in summands)
        )

    def assoc_constraint(self, x: Obj, y: Obj, z: Obj) -> SummandPermutation:
        """Summands of (x×y)×z matched with those of x×(y×z)"""
        alpha = self.category.associator(x, y, z)
        product, projections = self.nested_product([x, y, z])
        return self.transport(alpha, self.summands_of(product, projections))

    def comm_constraint(self, x: Obj, y: Obj) -> SummandPermutation:
        """R(x,y) matched with R(y,x) through the swap"""
        return self.transport(
            self.category.swap(x, y), [r.sub for r in self.r_set(x, y)]
        )

    def pentagon_holds(self, w: Obj, x: Obj, y: Obj, z: Obj) -> bool:
        """Both reassociations ((wx)y)z -> w(x(yz)) move summands identically"""
        cat = self.category
        wx = cat.product(w, x)[0]
        xy = cat.product(x, y)[0]
        yz = cat.product(y, z)[0]
        source, projections = self.nested_product([w, x, y, z])
        start = self.summands_of(source, projections)

        short = self.transport(cat.associator(wx, y, z), start)
        short = short.then(self.transport(cat.associator(w, x, yz), [v for _, v in short.mapping]))

        long = self.transport(cat.product_map(cat.associator(w, x, y), cat.identity(z)), start)
        long = long.then(self.transport(cat.associator(w, xy, z), [v for _, v in long.mapping]))
        long = long.then(
            self.transport(
                cat.product_map(cat.identity(w), cat.associator(x, y, z)),
                [v for _, v in long.mapping],
            )
        )
        return short.target == long.target and short.mapping == long.mapping

    def hexagon_holds(self, x: Obj, y: Obj, z: Obj) -> bool:
        """α∘σ∘α and (1×σ)∘α∘(σ×1) agree on the summands of (x×y)×z"""
        cat = self.category
        source, projections = self.nested_product([x, y, z])
        start = self.summands_of(source, projections)
        yz = cat.product(y, z)[0]

        first = self.transport(cat.associator(x, y, z), start)
        first = first.then(self.transport(cat.swap(x, yz), [v for _, v in first.mapping]))
        first = first.then(self.transport(cat.associator(y, z, x), [v for _, v in first.mapping]))

        second = self.transport(cat.product_map(cat.swap(x, y), cat.identity(z)), start)
        second = second.then(self.transport(cat.associator(y, x, z), [v for _, v in second.mapping]))
        second = second.then(
            self.transport(
                cat.product_map(cat.identity(y), cat.swap(x, z)),
                [v for _, v in second.mapping],
            )
        )
        return first.target == second.target and first.mapping == second.mapping

    def unit_holds(self, x: Obj, y: Obj) -> bool:
        """(1×λ)∘α = ρ×1 on the summands of (x×1)×y"""
        cat = self.category
        unit = cat.terminal()
        source, projections = self.nested_product([x, unit, y])
        start = self.summands_of(source, projections)
        via_assoc = self.transport(cat.associator(x, unit, y), start)
        via_assoc = via_assoc.then(
            self.transport(
                cat.product_map(cat.identity(x), cat.left_unitor(y)),
                [v for _, v in via_assoc.mapping],
            )
        )
        direct = self.transport(cat.product_map(cat.right_unitor(x), cat.identity(y)), start)
        return via_assoc.target == direct.target and via_assoc.mapping == direct.mapping

    # Tensor products of star morphisms

    def tensor_round(self, rho: StarMor, rho2: StarMor) -> BlockMap:
        """
        (r)⊗(r') = Σ_{w∈R(r,r')} τ_w with τ_w the block [r_w]* -> [r'_w]* given by (w).

        Raises:
            TensorDecompositionError: If some w -> r_w × r'_w fails to be injective
        """
        if rho.flavor is not Flavor.ROUND or rho2.flavor is not Flavor.ROUND:
            raise CanonicalFormError("tensor_round needs round morphisms")
        cat, rc = self.category, self.relations
        blocks = BlockMap(
            Flavor.ROUND, self.r_set(rho.x, rho2.x), self.r_set(rho.y, rho2.y)
        )
        for r, c in rho.terms:
            a, b = rc.legs(r)
            for r2, c2 in rho2.terms:
                a2, b2 = rc.legs(r2)
                for w in self.r_set(self.summand_object(r), self.summand_object(r2)):
                    wa, wb = rc.legs(w)
                    e_src, src = rc.rel_from_span(cat.compose(a, wa), cat.compose(a2, wb))
                    e_dst, dst = rc.rel_from_span(cat.compose(b, wa), cat.compose(b2, wb))
                    if not cat.is_injective(cat.pair(e_src, e_dst)):
                        raise TensorDecompositionError(f"{w.text} does not embed into r_w × r'_w")
                    inner = rc.rel_from_span(e_src, e_dst)[1]
                    blocks.add(dst, src, StarMor.build(inner.x, inner.y, Flavor.ROUND, {inner: c * c2}))
        return blocks

    def tensor_curly(self, rho: StarMor, rho2: StarMor) -> BlockMap:
        """
        {r}⊗{r'}: block (u, v) given by {w} with w = u ×_{x×x'} (r×r') ×_{y×y'} v.

        A block whose w is not in R(u,v) is read by projector conjugation and
        listed in `flagged`.
        """
        if rho.flavor is not Flavor.CURLY or rho2.flavor is not Flavor.CURLY:
            raise CanonicalFormError("tensor_curly needs curly morphisms")
        cat, rc = self.category, self.relations
        sources = self.r_set(rho.x, rho2.x)
        targets = self.r_set(rho.y, rho2.y)
        blocks = BlockMap(Flavor.CURLY, sources, targets)
        for r, c in rho.terms:
            for r2, c2 in rho2.terms:
                rr = rc.tensor_rel(r, r2)
                big_a, big_b = rc.legs(rr)
                for u in sources:
                    first = cat.pullback(cat.inclusion(u.sub), big_a)
                    if first is None:
                        continue
                    _, q_u, q_rr = first
                    for v in targets:
                        second = cat.pullback(cat.compose(big_b, q_rr), cat.inclusion(v.sub))
                        if second is None:
                            continue
                        _, s1, s2 = second
                        to_u = cat.compose(q_u, s1)
                        if not cat.is_injective(cat.pair(to_u, s2)):
                            raise TensorDecompositionError("w_{u,v} does not embed into u × v")
                        w = rc.rel_from_span(to_u, s2)[1]
                        if self.in_r_set(w):
                            value = StarMor.build(w.x, w.y, Flavor.CURLY, {w: c * c2})
                        else:
                            value = self.project(rc.basis(w, c * c2), w.x, w.y, Flavor.CURLY)
                            blocks.flagged.add((v, u))
                        blocks.add(v, u, value)
        return blocks

    def tensor(self, rho: StarMor, rho2: StarMor) -> BlockMap:
        if rho.flavor is Flavor.ROUND:
            return self.tensor_round(rho, rho2)
        return self.tensor_curly(rho, rho2)

    def block_oracle(
        self, psi: TMor, x: Obj, x2: Obj, y: Obj, y2: Obj, flavor: Flavor
    ) -> BlockMap:
        """Blocks p*[i_v]∨ ψ [i_u]p* of a T⁰ morphism [x×x'] -> [y×y']"""
        rc = self.relations
        sources, targets = self.r_set(x, x2), self.r_set(y, y2)
        blocks = BlockMap(Flavor(flavor), sources, targets)
        for u in sources:
            into = rc.compose(psi, rc.graph(self.category.inclusion(u.sub)))
            for v in targets:
                block = rc.compose(rc.cograph(self.category.inclusion(v.sub)), into)
                blocks.add(v, u, self.project(block, self.summand_object(u), self.summand_object(v), flavor))
        return blocks

    def tensor_oracle(self, rho: StarMor, rho2: StarMor) -> BlockMap:
        psi = self.relations.tensor(self.embed(rho), self.embed(rho2))
        return self.block_oracle(psi, rho.x, rho2.x, rho.y, rho2.y, rho.flavor)

    def compose_blocks(self, second: BlockMap, first: BlockMap) -> BlockMap:
        """second∘first, blockwise: Σ_v B2[w,v]∘B1[v,u]"""
        if first.dst_summands != second.src_summands or first.flavor is not second.flavor:
            raise CompositionError("block maps do not compose")
        result = BlockMap(first.flavor, first.src_summands, second.dst_summands)
        for (v, u), lower in first.blocks.items():
            for (w, v2), upper in second.blocks.items():
                if v2 == v:
                    result.add(w, u, self.compose(upper, lower))
        return result

    def convert_blocks(self, blocks: BlockMap, flavor: Flavor) -> BlockMap:
        result = BlockMap(Flavor(flavor), blocks.src_summands, blocks.dst_summands, flagged=set(blocks.flagged))
        for (v, u), value in blocks.blocks.items():
            result.add(v, u, self.basis_convert(value, flavor))
        return result
