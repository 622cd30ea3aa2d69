"""Data models for tensor-envelope"""

import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Mapping, Optional

from .scalars import Poly


FINSET = "finset"
OPSET = "opset"
BACKENDS = (FINSET, OPSET)


class CanonicalFormError(ValueError):
    """Raised when a label, table or gluing is not in canonical form"""
    pass


def compact(value) -> str:
    """Canonical text form used on the command line, e.g. [[0,1],[2]]"""
    return json.dumps(value, separators=(",", ":"))


class DegreeFn(str, Enum):
    """The degree functions in scope"""
    ONE = "one"
    ZERO_NONISO = "zero_noniso"
    T_POWER = "t_power"

    @classmethod
    def parse(cls, text: "str | DegreeFn") -> "DegreeFn":
        if isinstance(text, DegreeFn):
            return text
        try:
            return cls(str(text).strip().lower().replace("-", "_"))
        except ValueError:
            raise CanonicalFormError(
                f"unknown degree function '{text}' (one, zero-noniso, t-power)"
            ) from None

    @property
    def cli_name(self) -> str:
        return self.value.replace("_", "-")


class Flavor(str, Enum):
    """Basis flavor of a star morphism: (r) or {r}"""
    ROUND = "round"
    CURLY = "curly"

    def other(self) -> "Flavor":
        return Flavor.CURLY if self is Flavor.ROUND else Flavor.ROUND


@dataclass(frozen=True)
class Obj:
    """An object of A: a carrier 0..size-1, plus factor metadata for products"""
    backend: str
    size: int
    factors: tuple["Obj", ...] = ()

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise CanonicalFormError(f"unknown backend '{self.backend}'")
        minimum = 1 if self.backend == FINSET else 0
        if self.size < minimum:
            raise CanonicalFormError(
                f"{self.backend} objects need size >= {minimum}, got {self.size}"
            )
        if self.factors and product_size(*self.factors) != self.size:
            raise CanonicalFormError("factor metadata does not match the carrier size")

    @property
    def is_product(self) -> bool:
        return bool(self.factors)

    def to_dict(self) -> dict:
        data = {"backend": self.backend, "size": self.size}
        if self.factors:
            data["factors"] = [f.to_dict() for f in self.factors]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Obj":
        factors = tuple(cls.from_dict(f) for f in data.get("factors", []))
        return cls(backend=data["backend"], size=data["size"], factors=factors)

    def __str__(self) -> str:
        if self.factors:
            return "(" + "×".join(str(f) for f in self.factors) + ")"
        return str(self.size)


def product_size(x: Obj, y: Obj) -> int:
    if x.backend != y.backend:
        raise CanonicalFormError("objects from different backends")
    if x.backend == FINSET:
        return x.size * y.size
    return x.size + y.size


def product_object(x: Obj, y: Obj) -> Obj:
    """The product object with recorded factors (carrier layout per backend)"""
    return Obj(x.backend, product_size(x, y), (x, y))


@dataclass(frozen=True)
class Mor:
    """
    A morphism of A as a function table.

    FinSet tables map the domain carrier to the codomain carrier; OpSet
    tables are the underlying set maps, codomain carrier to domain carrier.
    """
    dom: Obj
    cod: Obj
    table: tuple[int, ...]

    def __post_init__(self):
        if self.dom.backend != self.cod.backend:
            raise CanonicalFormError("morphism between different backends")
        if self.dom.backend == FINSET:
            source, target = self.dom.size, self.cod.size
        else:
            source, target = self.cod.size, self.dom.size
        if len(self.table) != source or any(not 0 <= v < target for v in self.table):
            raise CanonicalFormError(
                f"table {list(self.table)} is not a map {source} -> {target}"
            )

    @property
    def backend(self) -> str:
        return self.dom.backend

    @property
    def text(self) -> str:
        return compact(list(self.table))

    def to_dict(self) -> dict:
        return {"dom": self.dom.to_dict(), "cod": self.cod.to_dict(), "table": list(self.table)}

    @classmethod
    def from_dict(cls, data: dict) -> "Mor":
        return cls(Obj.from_dict(data["dom"]), Obj.from_dict(data["cod"]), tuple(data["table"]))


@dataclass(frozen=True)
class Sub:
    """
    Canonical representative of a subobject.

    FinSet: a nonempty strictly increasing index tuple. OpSet: a partition
    of the carrier as blocks, each sorted, blocks ordered by minimum.
    """
    obj: Obj
    label: tuple

    def __post_init__(self):
        n = self.obj.size
        if self.obj.backend == FINSET:
            ok = (
                len(self.label) > 0
                and all(isinstance(i, int) and 0 <= i < n for i in self.label)
                and all(a < b for a, b in zip(self.label, self.label[1:]))
            )
            if not ok:
                raise CanonicalFormError(f"{compact(list(self.label))} is not a canonical subset of {n}")
            return
        flat = [i for block in self.label for i in block]
        ok = (
            all(len(block) > 0 for block in self.label)
            and sorted(flat) == list(range(n))
            and all(list(block) == sorted(block) for block in self.label)
            and [block[0] for block in self.label] == sorted(block[0] for block in self.label)
        )
        if not ok:
            raise CanonicalFormError(
                f"{compact([list(b) for b in self.label])} is not a canonical partition of {n}"
            )

    @property
    def size(self) -> int:
        """Carrier size of the subobject itself"""
        return len(self.label)

    @cached_property
    def assignment(self) -> tuple[int, ...]:
        """OpSet: block index of each carrier element"""
        blocks = [0] * self.obj.size
        for b, block in enumerate(self.label):
            for i in block:
                blocks[i] = b
        return tuple(blocks)

    @cached_property
    def members(self) -> frozenset:
        return frozenset(self.label)

    def as_list(self) -> list:
        if self.obj.backend == FINSET:
            return list(self.label)
        return [list(block) for block in self.label]

    @property
    def text(self) -> str:
        return compact(self.as_list())

    def to_dict(self) -> dict:
        key = "indices" if self.obj.backend == FINSET else "blocks"
        return {"backend": self.obj.backend, "size": self.obj.size, key: self.as_list()}

    @classmethod
    def from_list(cls, obj: Obj, value: list) -> "Sub":
        if obj.backend == FINSET:
            return cls(obj, tuple(value))
        return cls(obj, tuple(tuple(block) for block in value))

    @classmethod
    def parse(cls, obj: Obj, text: str) -> "Sub":
        try:
            value = json.loads(text)
        except json.JSONDecodeError as e:
            raise CanonicalFormError(f"cannot parse subobject '{text}': {e}") from None
        if not isinstance(value, list):
            raise CanonicalFormError(f"subobject '{text}' must be a list")
        try:
            return cls.from_list(obj, value)
        except TypeError:
            raise CanonicalFormError(f"subobject '{text}' has the wrong shape") from None


@dataclass(frozen=True)
class Rel:
    """A relation: a canonical subobject of the product x×y"""
    x: Obj
    y: Obj
    sub: Sub

    def __post_init__(self):
        if self.sub.obj.factors != (self.x, self.y):
            raise CanonicalFormError("relation is not a subobject of x×y")

    @property
    def label(self) -> tuple:
        return self.sub.label

    @property
    def text(self) -> str:
        return self.sub.text

    def to_dict(self) -> list:
        return self.sub.as_list()

    @classmethod
    def from_list(cls, x: Obj, y: Obj, value: list) -> "Rel":
        return cls(x, y, Sub.from_list(product_object(x, y), value))

    @classmethod
    def parse(cls, x: Obj, y: Obj, text: str) -> "Rel":
        return cls(x, y, Sub.parse(product_object(x, y), text))


def normalize_terms(mapping: Mapping[Rel, Poly]) -> tuple[tuple[Rel, Poly], ...]:
    """Drop zero coefficients and sort by canonical label"""
    return tuple(
        sorted(
            ((rel, coeff) for rel, coeff in mapping.items() if not coeff.is_zero()),
            key=lambda item: item[0].label,
        )
    )


def accumulate(target: dict, rel: Rel, coeff: Poly) -> None:
    target[rel] = target.get(rel, Poly.zero()) + coeff


class LinearTerms:
    """Linear structure shared by TMor and StarMor (sparse Rel -> Poly maps)"""

    terms: tuple[tuple[Rel, Poly], ...]

    def _space(self) -> tuple:
        raise NotImplementedError

    def _check_space(self, other: "LinearTerms") -> None:
        if type(self) is not type(other) or self._space() != other._space():
            raise CanonicalFormError("adding morphisms between different objects")

    def as_dict(self) -> dict:
        return dict(self.terms)

    def coefficient(self, rel: Rel) -> Poly:
        return self.as_dict().get(rel, Poly.zero())

    def support(self) -> list[Rel]:
        return [rel for rel, _ in self.terms]

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        self._check_space(other)
        merged = self.as_dict()
        for rel, coeff in other.terms:
            accumulate(merged, rel, coeff)
        return replace(self, terms=normalize_terms(merged))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return replace(self, terms=tuple((rel, -coeff) for rel, coeff in self.terms))

    def scale(self, coeff: Poly):
        return replace(
            self, terms=normalize_terms({rel: coeff * c for rel, c in self.terms})
        )

    def terms_to_list(self) -> list[dict]:
        return [{"rel": rel.to_dict(), "poly": coeff.to_json()} for rel, coeff in self.terms]


@dataclass(frozen=True)
class TMor(LinearTerms):
    """A morphism of the linearized relation category: Σ coeff·⟨rel⟩"""
    dom: Obj
    cod: Obj
    terms: tuple[tuple[Rel, Poly], ...] = ()

    def __post_init__(self):
        for rel, _ in self.terms:
            if rel.x != self.dom or rel.y != self.cod:
                raise CanonicalFormError("term endpoints do not match the morphism")

    @classmethod
    def build(cls, dom: Obj, cod: Obj, mapping: Optional[Mapping[Rel, Poly]] = None) -> "TMor":
        return cls(dom, cod, normalize_terms(mapping or {}))

    def _space(self) -> tuple:
        return (self.dom, self.cod)

    def to_dict(self) -> dict:
        return {"dom": self.dom.to_dict(), "cod": self.cod.to_dict(), "terms": self.terms_to_list()}

    @classmethod
    def from_dict(cls, data: dict) -> "TMor":
        dom, cod = Obj.from_dict(data["dom"]), Obj.from_dict(data["cod"])
        mapping = {
            Rel.from_list(dom, cod, term["rel"]): Poly.from_json(term["poly"])
            for term in data.get("terms", [])
        }
        return cls.build(dom, cod, mapping)


@dataclass(frozen=True)
class StarMor(LinearTerms):
    """A morphism [x]* -> [y]* in the (r) or {r} basis"""
    x: Obj
    y: Obj
    flavor: Flavor
    terms: tuple[tuple[Rel, Poly], ...] = ()

    def __post_init__(self):
        for rel, _ in self.terms:
            if rel.x != self.x or rel.y != self.y:
                raise CanonicalFormError("term endpoints do not match the morphism")

    @classmethod
    def build(
        cls, x: Obj, y: Obj, flavor: Flavor, mapping: Optional[Mapping[Rel, Poly]] = None
    ) -> "StarMor":
        return cls(x, y, Flavor(flavor), normalize_terms(mapping or {}))

    @classmethod
    def basis(cls, rel: Rel, flavor: Flavor) -> "StarMor":
        return cls.build(rel.x, rel.y, flavor, {rel: Poly.one()})

    def _space(self) -> tuple:
        return (self.x, self.y, self.flavor)

    def to_dict(self) -> dict:
        return {
            "x": self.x.to_dict(),
            "y": self.y.to_dict(),
            "flavor": self.flavor.value,
            "terms": self.terms_to_list(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StarMor":
        x, y = Obj.from_dict(data["x"]), Obj.from_dict(data["y"])
        mapping = {
            Rel.from_list(x, y, term["rel"]): Poly.from_json(term["poly"])
            for term in data.get("terms", [])
        }
        return cls.build(x, y, Flavor(data["flavor"]), mapping)

    def __str__(self) -> str:
        left, right = ("(", ")") if self.flavor is Flavor.ROUND else ("{", "}")
        if not self.terms:
            return "0"
        parts = []
        for rel, coeff in self.terms:
            scalar = "" if coeff == 1 else f"({coeff})·"
            parts.append(f"{scalar}{left}{rel.text}{right}")
        return " + ".join(parts)


_GLUING_KEYS = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*:")


@dataclass(frozen=True)
class CoRel:
    """
    A gluing x ↠ u ↞ y of OpSet objects: a partial bijection between carriers.

    Stored as the sorted list of glued pairs (i in X, j in Y).
    """
    x: Obj
    y: Obj
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        xs = [i for i, _ in self.pairs]
        ys = [j for _, j in self.pairs]
        ok = (
            xs == sorted(set(xs))
            and len(set(ys)) == len(ys)
            and all(0 <= i < self.x.size for i in xs)
            and all(0 <= j < self.y.size for j in ys)
        )
        if not ok:
            raise CanonicalFormError(f"{compact([list(p) for p in self.pairs])} is not a canonical gluing")

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def x0(self) -> list[int]:
        return [i for i, _ in self.pairs]

    @property
    def y0(self) -> list[int]:
        return sorted(j for _, j in self.pairs)

    def sort_key(self) -> tuple:
        return (len(self.pairs), self.pairs)

    def to_dict(self) -> dict:
        return {"x0": self.x0, "y0": self.y0, "bij": [list(p) for p in self.pairs]}

    @property
    def text(self) -> str:
        return "{" + f"x0:{compact(self.x0)},y0:{compact(self.y0)},bij:{compact([list(p) for p in self.pairs])}" + "}"

    @classmethod
    def from_dict(cls, x: Obj, y: Obj, data: dict) -> "CoRel":
        pairs = tuple(sorted(tuple(p) for p in data.get("bij", [])))
        gluing = cls(x, y, pairs)
        if "x0" in data and sorted(data["x0"]) != gluing.x0:
            raise CanonicalFormError("x0 does not match the bijection")
        if "y0" in data and sorted(data["y0"]) != gluing.y0:
            raise CanonicalFormError("y0 does not match the bijection")
        return gluing

    @classmethod
    def parse(cls, x: Obj, y: Obj, text: str) -> "CoRel":
        try:
            data = json.loads(_GLUING_KEYS.sub(r'"\1":', text))
        except json.JSONDecodeError as e:
            raise CanonicalFormError(f"cannot parse gluing '{text}': {e}") from None
        return cls.from_dict(x, y, data)


@dataclass
class Summand:
    """One summand of a decomposition: the indexing subobject and its idempotent"""
    sub: Sub
    projector: TMor

    def to_dict(self) -> dict:
        return {
            "sub": self.sub.as_list(),
            "object_size": self.sub.size,
            "projector": self.projector.to_dict()["terms"],
        }
