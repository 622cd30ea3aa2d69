"""Finite posets of canonical subobjects with meets, intervals and Möbius values"""

import logging
from typing import Callable, Generic, Hashable, Iterator, Optional, Sequence, TypeVar

from .cache import PureCache


logger = logging.getLogger(__name__)

E = TypeVar("E", bound=Hashable)


class LatticeError(ValueError):
    """Raised for unknown elements or incomparable pairs"""
    pass


class SubLattice(Generic[E]):
    """
    A finite graded poset with an optional partial meet.

    Elements keep the order they are given in; backends hand them over in
    canonical label order so every matrix indexed by a lattice is
    reproducible. `rank` must be strictly monotone along the order.
    """

    def __init__(
        self,
        elements: Sequence[E],
        leq: Callable[[E, E], bool],
        rank: Callable[[E], int],
        top: E,
        meet: Optional[Callable[[E, E], Optional[E]]] = None,
        name: str = "lattice",
    ):
        self.elements: tuple[E, ...] = tuple(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if top not in self.index:
            raise LatticeError(f"{name}: top element is not among the elements")
        self.top = top
        self.name = name
        self._leq = leq
        self._rank = rank
        self._meet = meet
        self._down_sets: PureCache[tuple] = PureCache(f"{name}.down")
        self._mobius: PureCache[dict] = PureCache(f"{name}.mobius")
        logger.debug("materialized %s with %d elements", name, len(self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[E]:
        return iter(self.elements)

    def __contains__(self, e: E) -> bool:
        return e in self.index

    def _check(self, e: E) -> None:
        if e not in self.index:
            raise LatticeError(f"{self.name}: {e!r} is not an element")

    def leq(self, u: E, v: E) -> bool:
        self._check(u)
        self._check(v)
        return u == v or self._leq(u, v)

    def rank(self, e: E) -> int:
        return self._rank(e)

    def meet(self, u: E, v: E) -> Optional[E]:
        """Greatest lower bound, None where it does not exist"""
        self._check(u)
        self._check(v)
        if self._meet is not None:
            return self._meet(u, v)
        lower = [z for z in self.elements if self.leq(z, u) and self.leq(z, v)]
        for z in lower:
            if all(self.leq(other, z) for other in lower):
                return z
        return None

    def down_set(self, w: E) -> tuple[E, ...]:
        """All v ≤ w, in element order"""
        self._check(w)
        return self._down_sets.get_or_compute(
            w, lambda: tuple(v for v in self.elements if self.leq(v, w))
        )

    def interval(self, u: E, w: E) -> list[E]:
        """
        All v with u ≤ v ≤ w, in element order.

        Raises:
            LatticeError: If u is not below w
        """
        if not self.leq(u, w):
            raise LatticeError(f"{self.name}: {u!r} and {w!r} are not comparable")
        return [v for v in self.down_set(w) if self.leq(u, v)]

    def mobius_to(self, w: E) -> dict:
        """
        Möbius values μ(v, w) for every v ≤ w.

        Filled top-down from μ(w,w) = 1 and Σ_{v≤v'≤w} μ(v',w) = 0 for v < w.
        """
        self._check(w)
        return self._mobius.get_or_compute(w, lambda: self._mobius_column(w))

    def _mobius_column(self, w: E) -> dict:
        below = sorted(self.down_set(w), key=lambda v: (-self._rank(v), self.index[v]))
        column: dict = {}
        for v in below:
            if v == w:
                column[v] = 1
                continue
            column[v] = -sum(
                mu for above, mu in column.items() if above != v and self.leq(v, above)
            )
        return column

    def mobius(self, u: E, w: E) -> int:
        """
        Möbius value μ(u, w).

        Raises:
            LatticeError: If u is not below w
        """
        if not self.leq(u, w):
            raise LatticeError(f"{self.name}: {u!r} and {w!r} are not comparable")
        return self.mobius_to(w)[u]

    def covers(self) -> list[tuple[int, int]]:
        """Index pairs (i, j) with elements[i] covered by elements[j]"""
        result = []
        for j, v in enumerate(self.elements):
            strictly_below = [u for u in self.down_set(v) if u != v]
            for u in strictly_below:
                if not any(z != u and self.leq(u, z) for z in strictly_below):
                    result.append((self.index[u], j))
        return sorted(result)

    def to_dict(self, label: Callable[[E], object] = lambda e: e, with_mobius: bool = False) -> dict:
        data = {
            "size": len(self.elements),
            "elements": [label(e) for e in self.elements],
            "top": self.index[self.top],
            "covers": [list(pair) for pair in self.covers()],
        }
        if with_mobius:
            table = []
            for w in self.elements:
                column = self.mobius_to(w)
                table.extend(
                    [self.index[v], self.index[w], column[v]]
                    for v in self.down_set(w)
                )
            data["mobius"] = sorted(table)
        return data
