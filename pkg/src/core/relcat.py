"""Relcat - relations, the linearized category T⁰(A, δ) and word normal forms"""

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .backends import CompositionError, RegularCategory
from .cache import PureCache
from .models import DegreeFn, Mor, Obj, Rel, TMor, accumulate
from .scalars import Poly


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Letter:
    """A generator [f] or, with dual=True, [f]∨"""
    mor: Mor
    dual: bool = False

    @property
    def dom(self) -> Obj:
        return self.mor.cod if self.dual else self.mor.dom

    @property
    def cod(self) -> Obj:
        return self.mor.dom if self.dual else self.mor.cod

    def __str__(self) -> str:
        return f"[{self.mor.text}]" + ("∨" if self.dual else "")


class RelationCategory:
    """
    T⁰(A, δ): formal linear combinations of relations with δ-twisted composition.

    Composition of basis relations is memoized; every other operation is
    derived from it, so one instance per (backend, degree) is enough.
    """

    def __init__(self, category: RegularCategory, degree: DegreeFn):
        self.category = category
        self.degree = category.check_degree(degree)
        self._legs: PureCache[tuple[Mor, Mor]] = PureCache("relcat.legs")
        self._products: PureCache[Optional[tuple[Rel, Poly]]] = PureCache("relcat.compose")

    def __repr__(self) -> str:
        return f"RelationCategory({self.category.name}, {self.degree.value})"

    def delta(self, f: Mor) -> Poly:
        return self.category.delta(self.degree, f)

    # Relations

    def rel_object(self, r: Rel) -> Obj:
        return self.category.sub_object(r.sub)

    def legs(self, r: Rel) -> tuple[Mor, Mor]:
        """The jointly injective pair a: r -> x, b: r -> y"""
        return self._legs.get_or_compute(r, lambda: self._compute_legs(r))

    def _compute_legs(self, r: Rel) -> tuple[Mor, Mor]:
        cat = self.category
        _, p1, p2 = cat.product(r.x, r.y)
        incl = cat.inclusion(r.sub)
        return cat.compose(p1, incl), cat.compose(p2, incl)

    def rel_from_span(self, f: Mor, g: Mor) -> tuple[Mor, Rel]:
        """Image of (f, g): u -> x×y, returned with the epi part u ↠ r"""
        e, m = self.category.image(self.category.pair(f, g))
        return e, Rel(f.cod, g.cod, m)

    def diagonal_rel(self, x: Obj) -> Rel:
        ident = self.category.identity(x)
        return self.rel_from_span(ident, ident)[1]

    def graph_rel(self, f: Mor) -> Rel:
        return self.rel_from_span(self.category.identity(f.dom), f)[1]

    def transpose_rel(self, r: Rel) -> Rel:
        """r∨ ⊆ y×x"""
        swap = self.category.swap(r.x, r.y)
        return Rel(r.y, r.x, self.category.sub_image(swap, r.sub))

    def rel_compose(self, r: Rel, s: Rel) -> Optional[tuple[Rel, Poly]]:
        """
        The product s∘r of relations r ⊆ x×y and s ⊆ y×z.

        Returns:
            (image of r×_y s in x×z, δ(r×_y s ↠ image)), or None when the
            fiber product does not exist

        Raises:
            CompositionError: If the middle objects differ
        """
        if r.y != s.x:
            raise CompositionError(f"relations do not share a middle object ({r.y} vs {s.x})")
        return self._products.get_or_compute((r, s), lambda: self._compose_basis(r, s))

    def _compose_basis(self, r: Rel, s: Rel) -> Optional[tuple[Rel, Poly]]:
        cat = self.category
        a_r, b_r = self.legs(r)
        a_s, b_s = self.legs(s)
        span = cat.pullback(b_r, a_s)
        if span is None:
            return None
        _, q1, q2 = span
        e, composite = self.rel_from_span(cat.compose(a_r, q1), cat.compose(b_s, q2))
        return composite, self.delta(e)

    def tensor_rel(self, r: Rel, s: Rel) -> Rel:
        """r×s ⊆ (x×y)×(x'×y') for r ⊆ x×x', s ⊆ y×y'"""
        cat = self.category
        a_r, b_r = self.legs(r)
        a_s, b_s = self.legs(s)
        _, p1, p2 = cat.product(self.rel_object(r), self.rel_object(s))
        source = cat.pair(cat.compose(a_r, p1), cat.compose(a_s, p2))
        target = cat.pair(cat.compose(b_r, p1), cat.compose(b_s, p2))
        return self.rel_from_span(source, target)[1]

    # Morphisms of T⁰

    def zero(self, x: Obj, y: Obj) -> TMor:
        return TMor.build(x, y)

    def basis(self, r: Rel, coeff: Optional[Poly] = None) -> TMor:
        return TMor.build(r.x, r.y, {r: coeff if coeff is not None else Poly.one()})

    def identity(self, x: Obj) -> TMor:
        return self.basis(self.diagonal_rel(x))

    def compose(self, psi: TMor, phi: TMor) -> TMor:
        """
        ψ∘φ, bilinear in the relation basis.

        Raises:
            CompositionError: If cod(φ) differs from dom(ψ)
        """
        if phi.cod != psi.dom:
            raise CompositionError(f"cannot compose: {phi.cod} is not {psi.dom}")
        result: dict = {}
        for r, c in phi.terms:
            for s, d in psi.terms:
                product = self.rel_compose(r, s)
                if product is not None:
                    rel, factor = product
                    accumulate(result, rel, c * d * factor)
        return TMor.build(phi.dom, psi.cod, result)

    def compose_all(self, *maps: TMor) -> TMor:
        """Compose right to left: compose_all(f, g, h) = f∘g∘h"""
        result = maps[-1]
        for f in reversed(maps[:-1]):
            result = self.compose(f, result)
        return result

    def adjoint(self, phi: TMor) -> TMor:
        return TMor.build(
            phi.cod, phi.dom, {self.transpose_rel(r): c for r, c in phi.terms}
        )

    def graph(self, f: Mor) -> TMor:
        """[f]"""
        return self.basis(self.graph_rel(f))

    def cograph(self, f: Mor) -> TMor:
        """[f]∨"""
        return self.adjoint(self.graph(f))

    def tensor(self, phi: TMor, psi: TMor) -> TMor:
        """φ⊗ψ: [x×y] -> [x'×y']"""
        cat = self.category
        dom = cat.product(phi.dom, psi.dom)[0]
        cod = cat.product(phi.cod, psi.cod)[0]
        result: dict = {}
        for r, c in phi.terms:
            for s, d in psi.terms:
                accumulate(result, self.tensor_rel(r, s), c * d)
        return TMor.build(dom, cod, result)

    def ev(self, x: Obj) -> TMor:
        """Evaluation [x×x] -> [1]"""
        cat = self.category
        rel = self.rel_from_span(cat.diagonal(x), cat.to_terminal(x))[1]
        return self.basis(rel)

    def coev(self, x: Obj) -> TMor:
        """Coevaluation [1] -> [x×x]"""
        return self.adjoint(self.ev(x))

    def snake_composites(self, x: Obj) -> tuple[TMor, TMor]:
        """
        Both zig-zag composites [x] -> [x], each expected to be the identity.

        Unit and associativity isomorphisms enter as graphs of the explicit
        maps of A.
        """
        cat = self.category
        ident = self.identity(x)
        assoc = cat.associator(x, x, x)
        left = self.compose_all(
            self.graph(cat.left_unitor(x)),
            self.tensor(self.ev(x), ident),
            self.cograph(assoc),
            self.tensor(ident, self.coev(x)),
            self.cograph(cat.right_unitor(x)),
        )
        right = self.compose_all(
            self.graph(cat.right_unitor(x)),
            self.tensor(ident, self.ev(x)),
            self.graph(assoc),
            self.tensor(self.coev(x), ident),
            self.cograph(cat.left_unitor(x)),
        )
        return left, right

    # Words in the generators

    def _check_word(self, word: Sequence[Letter], obj: Optional[Obj]) -> None:
        if not word and obj is None:
            raise CompositionError("the empty word needs an object")
        for left, right in zip(word, word[1:]):
            if right.cod != left.dom:
                raise CompositionError(f"word is not composable at {right} {left}")

    def word_to_tmor(self, word: Sequence[Letter], obj: Optional[Obj] = None) -> TMor:
        """Direct composition of the letters (leftmost applied last)"""
        self._check_word(word, obj)
        if not word:
            return self.identity(obj)
        return self.compose_all(
            *[self.cograph(l.mor) if l.dual else self.graph(l.mor) for l in word]
        )

    def word_normalize(
        self, word: Iterable[Letter], obj: Optional[Obj] = None
    ) -> tuple[Poly, Optional[Rel]]:
        """
        Reduce a word in [f] and [f]∨ to κ·⟨r⟩.

        Adjacent graphs and adjacent cographs are fused, [a']∨[b'] is
        rewritten through the pullback of b' and a' as [b][a]∨, and the
        final [g][f]∨ becomes δ(u ↠ r)·⟨r⟩ with r the image of (f, g).

        Args:
            word: Letters in written order
            obj: Object for the empty word

        Returns:
            (κ, r), or (0, None) when the word vanishes

        Raises:
            CompositionError: If the word is not composable
        """
        cat = self.category
        letters = list(word)
        self._check_word(letters, obj)
        if not letters:
            return Poly.one(), self.diagonal_rel(obj)

        changed = True
        while changed:
            changed = False
            for i in range(len(letters) - 1):
                left, right = letters[i], letters[i + 1]
                if not left.dual and not right.dual:
                    replacement = [Letter(cat.compose(left.mor, right.mor))]
                elif left.dual and right.dual:
                    replacement = [Letter(cat.compose(right.mor, left.mor), dual=True)]
                elif left.dual:
                    span = cat.pullback(right.mor, left.mor)
                    if span is None:
                        return Poly.zero(), None
                    _, a, b = span
                    replacement = [Letter(b), Letter(a, dual=True)]
                else:
                    continue
                logger.debug("rewrite %s %s -> %s", left, right, " ".join(map(str, replacement)))
                letters[i:i + 2] = replacement
                changed = True
                break

        if len(letters) == 1:
            letter = letters[0]
            rel = self.graph_rel(letter.mor)
            return Poly.one(), self.transpose_rel(rel) if letter.dual else rel
        g, f = letters[0].mor, letters[1].mor
        e, rel = self.rel_from_span(f, g)
        kappa = self.delta(e)
        if kappa.is_zero():
            return Poly.zero(), None
        return kappa, rel
