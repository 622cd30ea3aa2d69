"""Tests for subobject projectors and the ω invariant"""

import pytest
from functools import reduce
from pathlib import Path

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.engine import open_engine
from src.core.models import FINSET, OPSET, DegreeFn, Mor
from src.core.projectors import NotSurjectiveError
from src.core.scalars import Poly


@pytest.fixture
def opset():
    return open_engine(OPSET, DegreeFn.T_POWER)


@pytest.fixture
def finset():
    return open_engine(FINSET, DegreeFn.ONE)


def falling(k: int, n: int) -> Poly:
    """(t-k)(t-k-1)...(t-n+1)"""
    return reduce(lambda acc, i: acc * Poly.from_json([-i, 1]), range(k, n), Poly.one())


def surjections(engine, n: int, k: int):
    cat = engine.category
    return [e for e in cat.morphisms(engine.obj(n), engine.obj(k)) if cat.is_surjective(e)]


class TestOmega:
    """Tests for ω_e"""

    @pytest.mark.parametrize("n,k", [(1, 0), (2, 1), (3, 1), (3, 2), (4, 2)])
    def test_falling_factorial(self, opset, n, k):
        """Test ω of an OpSet surjection n ↠ k"""
        e = Mor(opset.obj(n), opset.obj(k), tuple(range(k)))
        assert opset.projectors.omega(e) == falling(k, n)

    def test_depends_only_on_sizes(self, opset):
        """Test that every surjection 3 ↠ 1 has the same ω"""
        values = {opset.projectors.omega(e) for e in surjections(opset, 3, 1)}
        assert values == {falling(1, 3)}

    def test_identity(self, opset, finset):
        """Test ω(id) = 1"""
        for engine in (opset, finset):
            x = engine.obj(2)
            assert engine.projectors.omega(engine.category.identity(x)) == Poly.one()

    def test_finset_values(self, finset):
        """Test ω of the folds 2 ↠ 1 and 3 ↠ 1 on FinSet"""
        fold = Mor(finset.obj(2), finset.obj(1), (0, 0))
        assert finset.projectors.omega(fold) == Poly.const(-1)
        three = Mor(finset.obj(3), finset.obj(1), (0, 0, 0))
        assert finset.projectors.omega(three) == Poly.const(1)

    @pytest.mark.parametrize("degree,point", [(DegreeFn.ONE, 1), (DegreeFn.ZERO_NONISO, 0)])
    def test_specializations(self, opset, degree, point):
        """Test that the constant degrees agree with t-power at t = 1 and t = 0"""
        engine = open_engine(OPSET, degree)
        for n, k in ((2, 1), (3, 1), (3, 2)):
            for e in surjections(engine, n, k):
                expected = opset.projectors.omega(e).evaluate(point)
                assert engine.projectors.omega(e) == Poly.const(int(expected))

    def test_not_surjective(self, opset):
        """Test that ω refuses non-surjections"""
        m = Mor(opset.obj(1), opset.obj(2), (0, 0))
        with pytest.raises(NotSurjectiveError):
            opset.projectors.omega(m)


class TestProjectors:
    """Tests for p_u, p_u* and the subobject decomposition"""

    @pytest.mark.parametrize("backend,size,count", [(OPSET, 2, 2), (OPSET, 3, 5), (FINSET, 2, 3)])
    def test_family(self, backend, size, count):
        """Test that the family decomposes the identity"""
        engine = open_engine(backend)
        family = engine.projectors.subobject_decomposition(engine.obj(size))
        assert len(family.lattice) == count
        assert engine.projectors.family_failures(family) == []
        assert len(family.to_dict()["summands"]) == count

    def test_top_projector(self, opset):
        """Test p_x = id"""
        x = opset.obj(2)
        top = opset.category.top(x)
        assert opset.projectors.p_sub(x, top) == opset.relations.identity(x)

    @pytest.mark.parametrize("backend,size", [(OPSET, 3), (FINSET, 2)])
    def test_recursive_inversion(self, backend, size):
        """Test that Möbius inversion matches the recursive definition"""
        engine = open_engine(backend)
        x = engine.obj(size)
        for u in engine.category.subobjects(x):
            assert engine.projectors.p_star_recursive(x, u) == engine.projectors.p_star(x, u)

    def test_empty_object(self, opset):
        """Test [0] = [0]*"""
        x = opset.obj(0)
        assert opset.projectors.p_star_top(x) == opset.relations.identity(x)

    def test_foreign_subobject(self, opset):
        """Test that p_u needs u ⊆ x"""
        u = opset.category.top(opset.obj(1))
        with pytest.raises(ValueError):
            opset.projectors.p_sub(opset.obj(2), u)

    def test_broken_family(self, opset):
        """Test that verification reports a corrupted family"""
        x = opset.obj(2)
        family = opset.projectors.subobject_decomposition(x)
        broken = type(family)(x=x, lattice=family.lattice, p=dict(family.p), p_star=dict(family.p))
        assert opset.projectors.family_failures(broken)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
