"""Backends - finite regular categories with degree functions (FinSet, OpSet)"""

import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterator, Optional

from sympy.utilities.iterables import multiset_partitions

from .cache import PureCache
from .lattice import SubLattice
from .models import FINSET, OPSET, DegreeFn, Mor, Obj, Sub, product_object
from .scalars import Poly
from .settings import EngineSettings, get_settings


logger = logging.getLogger(__name__)

Span = tuple[Obj, Mor, Mor]


class CapabilityError(Exception):
    """Raised when an operation needs a capability the backend lacks"""
    pass


class DegreeFunctionError(CapabilityError):
    """Raised when a degree function is not available on a backend"""
    pass


class SizeGuardError(Exception):
    """Raised when a lattice or sweep would exceed the configured size bound"""
    pass


class CompositionError(ValueError):
    """Raised when endpoints of composed or paired morphisms do not match"""
    pass


@dataclass(frozen=True)
class Capabilities:
    """Structural features a backend guarantees"""
    has_all_pullbacks: bool
    is_exact_maltsev: bool

    def to_dict(self) -> dict:
        return {
            "has_all_pullbacks": self.has_all_pullbacks,
            "is_exact_maltsev": self.is_exact_maltsev,
        }


def _classes(n: int, unions) -> list[int]:
    """Union-find over 0..n-1; class ids numbered by minimal element"""
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in unions:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    ids: dict[int, int] = {}
    return [ids.setdefault(find(i), len(ids)) for i in range(n)]


def _blocks(labels: list[int]) -> tuple[tuple[int, ...], ...]:
    grouped: dict[int, list[int]] = {}
    for i, c in enumerate(labels):
        grouped.setdefault(c, []).append(i)
    return tuple(tuple(block) for block in grouped.values())


class RegularCategory(ABC):
    """
    A finite regular category A with products, images and (possibly partial)
    pullbacks, together with its subobject lattices and degree functions.

    Concrete backends implement the table-level primitives; everything
    derived from them (sub_image, preimage, structural isomorphisms, δ)
    lives here so another backend only has to supply the primitives.
    """

    name: str = ""
    capabilities = Capabilities(has_all_pullbacks=False, is_exact_maltsev=False)
    degree_functions: tuple[DegreeFn, ...] = (DegreeFn.ONE,)
    min_size: int = 1

    def __init__(self, settings: Optional[EngineSettings] = None):
        self.settings = settings or get_settings()
        self._lattices: PureCache[SubLattice] = PureCache(f"{self.name}.lattices")

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"

    # Objects

    def obj(self, size: int) -> Obj:
        return Obj(self.name, size)

    def objects(self, max_size: int) -> list[Obj]:
        return [self.obj(n) for n in range(self.min_size, max_size + 1)]

    @abstractmethod
    def terminal(self) -> Obj:
        ...

    def _own(self, *objects: Obj) -> None:
        for x in objects:
            if x.backend != self.name:
                raise CompositionError(f"{x.backend} object passed to the {self.name} backend")

    # Morphisms

    def identity(self, x: Obj) -> Mor:
        self._own(x)
        return Mor(x, x, tuple(range(x.size)))

    def compose(self, f: Mor, g: Mor) -> Mor:
        """
        The composite f∘g.

        Raises:
            CompositionError: If cod(g) differs from dom(f)
        """
        if g.cod != f.dom:
            raise CompositionError(f"cannot compose: codomain {g.cod} is not domain {f.dom}")
        return self._compose_tables(f, g)

    def compose_all(self, *maps: Mor) -> Mor:
        """f1∘f2∘...∘fn, written in application order right to left"""
        result = maps[-1]
        for f in reversed(maps[:-1]):
            result = self.compose(f, result)
        return result

    @abstractmethod
    def _compose_tables(self, f: Mor, g: Mor) -> Mor:
        ...

    @abstractmethod
    def is_injective(self, f: Mor) -> bool:
        ...

    @abstractmethod
    def is_surjective(self, f: Mor) -> bool:
        ...

    def is_iso(self, f: Mor) -> bool:
        return self.is_injective(f) and self.is_surjective(f)

    @abstractmethod
    def to_terminal(self, x: Obj) -> Mor:
        ...

    def morphisms(self, x: Obj, y: Obj) -> Iterator[Mor]:
        """
        Every morphism x -> y, in lexicographic table order.

        Raises:
            SizeGuardError: If there are more tables than sweep_table_limit
        """
        self._own(x, y)
        source, target = self._table_shape(x, y)
        count = target ** source
        if count > self.settings.sweep_table_limit:
            logger.warning("refusing sweep of %d tables %s -> %s", count, x, y)
            raise SizeGuardError(
                f"{count} morphisms {x} -> {y} exceed the sweep limit "
                f"{self.settings.sweep_table_limit}"
            )
        for table in itertools.product(range(target), repeat=source):
            yield Mor(x, y, table)

    @abstractmethod
    def _table_shape(self, x: Obj, y: Obj) -> tuple[int, int]:
        ...

    # Products

    @abstractmethod
    def product(self, x: Obj, y: Obj) -> Span:
        """The product object with its two projections"""

    @abstractmethod
    def pair(self, f: Mor, g: Mor) -> Mor:
        """The induced map (f, g): w -> x×y"""

    def _check_pair(self, f: Mor, g: Mor) -> None:
        if f.dom != g.dom:
            raise CompositionError("pairing morphisms with different domains")

    def product_map(self, f: Mor, g: Mor) -> Mor:
        """f×g: x×y -> x'×y'"""
        _, p1, p2 = self.product(f.dom, g.dom)
        return self.pair(self.compose(f, p1), self.compose(g, p2))

    def swap(self, x: Obj, y: Obj) -> Mor:
        _, p1, p2 = self.product(x, y)
        return self.pair(p2, p1)

    def associator(self, x: Obj, y: Obj, z: Obj) -> Mor:
        """(x×y)×z -> x×(y×z)"""
        xy, p1, p2 = self.product(x, y)
        _, q1, q2 = self.product(xy, z)
        return self.pair(self.compose(p1, q1), self.pair(self.compose(p2, q1), q2))

    def left_unitor(self, x: Obj) -> Mor:
        """1×x -> x"""
        return self.product(self.terminal(), x)[2]

    def right_unitor(self, x: Obj) -> Mor:
        """x×1 -> x"""
        return self.product(x, self.terminal())[1]

    def diagonal(self, x: Obj) -> Mor:
        ident = self.identity(x)
        return self.pair(ident, ident)

    # Images and pullbacks

    @abstractmethod
    def image(self, f: Mor) -> tuple[Mor, Sub]:
        """Factor f = m∘e with e surjective and m the canonical subobject"""

    @abstractmethod
    def pullback(self, f: Mor, g: Mor) -> Optional[Span]:
        """Span (P, p1: P -> dom f, p2: P -> dom g), None when it does not exist"""

    def _check_cospan(self, f: Mor, g: Mor) -> None:
        if f.cod != g.cod:
            raise CompositionError(f"pullback of maps into {f.cod} and {g.cod}")

    def pushout(self, f: Mor, g: Mor) -> Span:
        raise CapabilityError(f"{self.name} has no pushouts of surjections")

    def coequalizer(self, f: Mor, g: Mor) -> Mor:
        raise CapabilityError(f"{self.name} is not an exact category")

    # Subobjects

    @abstractmethod
    def _enumerate_subobjects(self, x: Obj) -> list[Sub]:
        ...

    @abstractmethod
    def sub_leq(self, u: Sub, v: Sub) -> bool:
        ...

    @abstractmethod
    def sub_meet(self, u: Sub, v: Sub) -> Optional[Sub]:
        ...

    @abstractmethod
    def top(self, x: Obj) -> Sub:
        ...

    @abstractmethod
    def inclusion(self, u: Sub) -> Mor:
        """The monomorphism u -> x representing the subobject"""

    def sub_object(self, u: Sub) -> Obj:
        return Obj(self.name, u.size)

    def sub_rank(self, u: Sub) -> int:
        return u.size

    def subobject_lattice(self, x: Obj) -> SubLattice:
        """
        The poset O(x) in canonical label order.

        Raises:
            SizeGuardError: If the carrier exceeds the backend's size bound
        """
        self._own(x)
        bound = self.settings.max_size(self.name)
        if x.size > bound:
            logger.warning("refusing %s subobject lattice of size-%d carrier", self.name, x.size)
            raise SizeGuardError(
                f"{self.name} carrier {x.size} exceeds the subobject lattice bound {bound}"
            )
        return self._lattices.get_or_compute(x, lambda: self._build_lattice(x))

    def _build_lattice(self, x: Obj) -> SubLattice:
        return SubLattice(
            sorted(self._enumerate_subobjects(x), key=lambda u: u.label),
            leq=self.sub_leq,
            rank=self.sub_rank,
            top=self.top(x),
            meet=self.sub_meet,
            name=f"O({self.name} {x})",
        )

    def subobjects(self, x: Obj) -> tuple[Sub, ...]:
        return self.subobject_lattice(x).elements

    def sub_image(self, f: Mor, u: Sub) -> Sub:
        """f(u): the image of u -> x -> y"""
        if u.obj != f.dom:
            raise CompositionError("subobject is not a subobject of the domain")
        return self.image(self.compose(f, self.inclusion(u)))[1]

    def preimage(self, f: Mor, z: Sub) -> Optional[Sub]:
        """f^-1(z), None when the pullback does not exist"""
        if z.obj != f.cod:
            raise CompositionError("subobject is not a subobject of the codomain")
        span = self.pullback(f, self.inclusion(z))
        if span is None:
            return None
        return self.image(span[1])[1]

    # Degree functions

    def check_degree(self, d: DegreeFn) -> DegreeFn:
        d = DegreeFn.parse(d)
        if d not in self.degree_functions:
            raise DegreeFunctionError(f"degree function {d.cli_name} is not available on {self.name}")
        return d

    def delta(self, d: DegreeFn, f: Mor) -> Poly:
        """
        δ of the epi part of f.

        Args:
            d: Degree function selector
            f: Any morphism; δ is taken of dom(f) ↠ im(f)

        Returns:
            1, 0/1, or t^(|dom| - |image|) depending on the selector
        """
        d = self.check_degree(d)
        _, m = self.image(f)
        exponent = f.dom.size - m.size
        if d is DegreeFn.ONE:
            return Poly.one()
        if d is DegreeFn.ZERO_NONISO:
            return Poly.one() if exponent == 0 else Poly.zero()
        return Poly.t_power(exponent)


class FinSetCategory(RegularCategory):
    """Nonempty finite sets; empty fiber products are reported as missing"""

    name = FINSET
    capabilities = Capabilities(has_all_pullbacks=False, is_exact_maltsev=False)
    # zero-noniso is not pullback-stable here: 3 ↠ 2 pulled back along a point can be an iso
    degree_functions = (DegreeFn.ONE,)
    min_size = 1

    def terminal(self) -> Obj:
        return self.obj(1)

    def _compose_tables(self, f: Mor, g: Mor) -> Mor:
        return Mor(g.dom, f.cod, tuple(f.table[i] for i in g.table))

    def is_injective(self, f: Mor) -> bool:
        return len(set(f.table)) == len(f.table)

    def is_surjective(self, f: Mor) -> bool:
        return len(set(f.table)) == f.cod.size

    def to_terminal(self, x: Obj) -> Mor:
        return Mor(x, self.terminal(), (0,) * x.size)

    def _table_shape(self, x: Obj, y: Obj) -> tuple[int, int]:
        return x.size, y.size

    def product(self, x: Obj, y: Obj) -> Span:
        self._own(x, y)
        p = product_object(x, y)
        n = y.size
        p1 = Mor(p, x, tuple(k // n for k in range(p.size)))
        p2 = Mor(p, y, tuple(k % n for k in range(p.size)))
        return p, p1, p2

    def pair(self, f: Mor, g: Mor) -> Mor:
        self._check_pair(f, g)
        p = product_object(f.cod, g.cod)
        n = g.cod.size
        return Mor(f.dom, p, tuple(a * n + b for a, b in zip(f.table, g.table)))

    def image(self, f: Mor) -> tuple[Mor, Sub]:
        values = sorted(set(f.table))
        m = Sub(f.cod, tuple(values))
        position = {v: i for i, v in enumerate(values)}
        e = Mor(f.dom, self.sub_object(m), tuple(position[v] for v in f.table))
        return e, m

    def pullback(self, f: Mor, g: Mor) -> Optional[Span]:
        self._check_cospan(f, g)
        pairs = [
            (i, j)
            for i in range(f.dom.size)
            for j in range(g.dom.size)
            if f.table[i] == g.table[j]
        ]
        if not pairs:
            return None
        p = self.obj(len(pairs))
        return p, Mor(p, f.dom, tuple(i for i, _ in pairs)), Mor(p, g.dom, tuple(j for _, j in pairs))

    def _enumerate_subobjects(self, x: Obj) -> list[Sub]:
        return [
            Sub(x, combo)
            for k in range(1, x.size + 1)
            for combo in itertools.combinations(range(x.size), k)
        ]

    def sub_leq(self, u: Sub, v: Sub) -> bool:
        return u.members <= v.members

    def sub_meet(self, u: Sub, v: Sub) -> Optional[Sub]:
        common = sorted(u.members & v.members)
        return Sub(u.obj, tuple(common)) if common else None

    def top(self, x: Obj) -> Sub:
        return Sub(x, tuple(range(x.size)))

    def inclusion(self, u: Sub) -> Mor:
        return Mor(self.sub_object(u), u.obj, u.label)


class OpSetCategory(RegularCategory):
    """
    The opposite of finite sets.

    Tables are the underlying set maps (codomain carrier -> domain carrier),
    subobjects are partitions ordered coarse-to-fine, the product is the
    disjoint union and pullbacks are pushouts of sets.
    """

    name = OPSET
    capabilities = Capabilities(has_all_pullbacks=True, is_exact_maltsev=True)
    degree_functions = (DegreeFn.ONE, DegreeFn.ZERO_NONISO, DegreeFn.T_POWER)
    min_size = 0

    def terminal(self) -> Obj:
        return self.obj(0)

    def _compose_tables(self, f: Mor, g: Mor) -> Mor:
        return Mor(g.dom, f.cod, tuple(g.table[k] for k in f.table))

    def is_injective(self, f: Mor) -> bool:
        return len(set(f.table)) == f.dom.size

    def is_surjective(self, f: Mor) -> bool:
        return len(set(f.table)) == len(f.table)

    def to_terminal(self, x: Obj) -> Mor:
        return Mor(x, self.terminal(), ())

    def _table_shape(self, x: Obj, y: Obj) -> tuple[int, int]:
        return y.size, x.size

    def product(self, x: Obj, y: Obj) -> Span:
        self._own(x, y)
        p = product_object(x, y)
        p1 = Mor(p, x, tuple(range(x.size)))
        p2 = Mor(p, y, tuple(x.size + j for j in range(y.size)))
        return p, p1, p2

    def pair(self, f: Mor, g: Mor) -> Mor:
        self._check_pair(f, g)
        return Mor(f.dom, product_object(f.cod, g.cod), f.table + g.table)

    def image(self, f: Mor) -> tuple[Mor, Sub]:
        fibers: dict[int, list[int]] = {}
        for k, v in enumerate(f.table):
            fibers.setdefault(v, []).append(k)
        m = Sub(f.cod, tuple(tuple(block) for block in fibers.values()))
        e = Mor(f.dom, self.sub_object(m), tuple(fibers.keys()))
        return e, m

    def pullback(self, f: Mor, g: Mor) -> Span:
        self._check_cospan(f, g)
        a = f.dom.size
        labels = _classes(
            a + g.dom.size, ((f.table[k], a + g.table[k]) for k in range(f.cod.size))
        )
        p = self.obj(len(set(labels)))
        return p, Mor(p, f.dom, tuple(labels[:a])), Mor(p, g.dom, tuple(labels[a:]))

    def pushout(self, f: Mor, g: Mor) -> Span:
        """
        Pushout of x <- r -> y: the fiber product of the carrier maps.

        Returns:
            (Q, qx: x -> Q, qy: y -> Q)
        """
        if f.dom != g.dom:
            raise CompositionError("pushout of maps out of different objects")
        pairs = [
            (i, j)
            for i in range(f.cod.size)
            for j in range(g.cod.size)
            if f.table[i] == g.table[j]
        ]
        q = self.obj(len(pairs))
        return q, Mor(f.cod, q, tuple(i for i, _ in pairs)), Mor(g.cod, q, tuple(j for _, j in pairs))

    def coequalizer(self, f: Mor, g: Mor) -> Mor:
        """The quotient x ↠ q of a parallel pair r ⇉ x: the equalizer of the carrier maps"""
        if f.dom != g.dom or f.cod != g.cod:
            raise CompositionError("coequalizer of non-parallel maps")
        kept = tuple(i for i in range(f.cod.size) if f.table[i] == g.table[i])
        return Mor(f.cod, self.obj(len(kept)), kept)

    def _enumerate_subobjects(self, x: Obj) -> list[Sub]:
        if x.size == 0:
            return [Sub(x, ())]
        return [
            Sub(x, tuple(sorted(tuple(sorted(block)) for block in partition)))
            for partition in multiset_partitions(x.size)
        ]

    def sub_leq(self, u: Sub, v: Sub) -> bool:
        coarse = u.assignment
        return all(len({coarse[i] for i in block}) == 1 for block in v.label)

    def sub_meet(self, u: Sub, v: Sub) -> Sub:
        unions = [(block[0], i) for w in (u, v) for block in w.label for i in block[1:]]
        return Sub(u.obj, _blocks(_classes(u.obj.size, unions)))

    def top(self, x: Obj) -> Sub:
        return Sub(x, tuple((i,) for i in range(x.size)))

    def inclusion(self, u: Sub) -> Mor:
        return Mor(self.sub_object(u), u.obj, u.assignment)


BACKEND_TYPES: dict[str, type[RegularCategory]] = {
    FINSET: FinSetCategory,
    OPSET: OpSetCategory,
}

_shared: PureCache[RegularCategory] = PureCache("backends")


def get_backend(name: str, settings: Optional[EngineSettings] = None) -> RegularCategory:
    """
    Look up a backend by name.

    Without explicit settings a shared instance is returned, so lattices
    and other caches are reused across callers.
    """
    try:
        backend_type = BACKEND_TYPES[name]
    except KeyError:
        raise CapabilityError(f"unknown backend '{name}' (finset, opset)") from None
    if settings is not None:
        return backend_type(settings)
    return _shared.get_or_compute(name, lambda: backend_type())
