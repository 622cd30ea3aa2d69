"""Tests for exact polynomial scalars"""

import pytest
from fractions import Fraction
from pathlib import Path

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.scalars import Poly, poly_arith, poly_eval, to_fraction


class TestPoly:
    """Tests for Poly"""

    def test_canonical_form_strips_zeros(self):
        """Test that trailing zero coefficients are dropped"""
        assert Poly([1, 2, 0, 0]).coeffs == [1, 2]
        assert Poly([0, 0]).is_zero()
        assert Poly([0, 0]).degree == -1
        assert Poly([5]).degree == 0

    def test_arithmetic(self):
        """Test ring operations"""
        t = Poly.t_power(1)
        assert (t - 1) * (t - 2) == Poly([2, -3, 1])
        assert Poly([1, 1]) + Poly([-1, 1]) == Poly([0, 2])
        assert -Poly([1, -1]) == Poly([-1, 1])
        assert 1 - t == Poly([1, -1])
        assert 2 * t == Poly([0, 2])
        assert Poly.one() + 2 == 3

    def test_big_integer_coefficients(self):
        """Test that coefficients do not overflow"""
        big = Poly([10 ** 40])
        assert (big * big).coeffs == [10 ** 80]

    def test_equality_with_int_and_hash(self):
        """Test comparisons against integers and hashing"""
        assert Poly.one() == 1
        assert Poly.zero() == 0
        assert hash(Poly([1, 2])) == hash(Poly([1, 2]))
        assert {Poly([1, 2]): "a"}[Poly([1, 2])] == "a"

    def test_bool(self):
        """Test truthiness follows zero-ness"""
        assert not Poly.zero()
        assert Poly.t_power(3)

    def test_text_form(self):
        """Test the human-readable rendering"""
        assert str(Poly([-2, 1])) == "-2 + t"
        assert str(Poly([2, -3, 1])) == "2 - 3*t + t^2"
        assert str(Poly([0, -1])) == "-t"
        assert str(Poly.zero()) == "0"

    def test_parse(self):
        """Test parsing the text form back"""
        assert Poly.parse("2 - 3*t + t^2") == Poly([2, -3, 1])
        assert Poly.parse("(t-1)*(t-2)") == Poly([2, -3, 1])
        assert Poly.parse("7") == Poly([7])

    def test_t_power(self):
        """Test monomials"""
        assert Poly.t_power(0) == 1
        assert Poly.t_power(2).coeffs == [0, 0, 1]
        with pytest.raises(ValueError):
            Poly.t_power(-1)

    def test_json_round_trip(self):
        """Test the lowest-degree-first JSON form"""
        p = Poly([2, -3, 1])
        assert p.to_json() == [2, -3, 1]
        assert Poly.from_json(p.to_json()) == p
        assert Poly.zero().to_json() == []

    def test_rejects_non_integers(self):
        """Test that floats are not coerced"""
        with pytest.raises(TypeError):
            Poly.one() + 1.5


class TestEvaluation:
    """Tests for exact evaluation"""

    def test_integer_point(self):
        """Test evaluation at integers"""
        assert Poly([2, -3, 1]).evaluate(3) == 2
        assert poly_eval(Poly([-2, 1]), 2) == 0

    def test_rational_point(self):
        """Test evaluation at a rational given as text"""
        assert Poly([2, -3, 1]).evaluate("1/2") == Fraction(3, 4)
        assert poly_eval(Poly.zero(), "5/7") == 0

    def test_to_fraction(self):
        """Test rational parsing"""
        assert to_fraction("3/4") == Fraction(3, 4)
        assert to_fraction(2) == Fraction(2)
        with pytest.raises(ValueError):
            to_fraction("three")


class TestPolyArith:
    """Tests for poly_arith"""

    def test_operations(self):
        """Test each named operation"""
        a, b = Poly([1, 1]), Poly([-1, 1])
        assert poly_arith(a, b, "add") == Poly([0, 2])
        assert poly_arith(a, b, "sub") == Poly([2])
        assert poly_arith(a, b, "mul") == Poly([-1, 0, 1])

    def test_unknown_operation(self):
        """Test that unknown operations are rejected"""
        with pytest.raises(ValueError):
            poly_arith(Poly.one(), Poly.one(), "div")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
