"""Tests for the star basis: Hom([x]*, [y]*), products and tensor blocks"""

import itertools

import pytest
from pathlib import Path

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.backends import CompositionError
from src.core.engine import open_engine
from src.core.models import FINSET, OPSET, CanonicalFormError, DegreeFn, Flavor, Rel, StarMor
from src.core.scalars import Poly
from src.core.verification import evaluate_fixture, load_fixtures


DISC = "[[0],[1]]"
JOINED = "[[0,1]]"


@pytest.fixture
def opset():
    return open_engine(OPSET, DegreeFn.T_POWER)


@pytest.fixture
def finset():
    return open_engine(FINSET, DegreeFn.ONE)


def star_pairs(engine, sizes):
    x, y, z = (engine.obj(n) for n in sizes)
    return itertools.product(engine.star.r_set(x, y), engine.star.r_set(y, z))


class TestRSet:
    """Tests for R(x,y) and the Hom dimensions"""

    @pytest.mark.parametrize("m,n,dim", [(0, 0, 1), (0, 2, 1), (1, 1, 2), (1, 2, 3), (2, 2, 7), (2, 3, 13)])
    def test_opset_dimensions(self, opset, m, n, dim):
        """Test that OpSet dimensions count partial bijections"""
        assert opset.star.star_hom_dim(opset.obj(m), opset.obj(n)) == dim

    @pytest.mark.parametrize("m,n,dim", [(1, 1, 1), (1, 2, 1), (2, 2, 7)])
    def test_finset_dimensions(self, finset, m, n, dim):
        """Test FinSet dimensions count relations with full projections"""
        assert finset.star.star_hom_dim(finset.obj(m), finset.obj(n)) == dim

    def test_membership(self, opset):
        """Test that a block containing two points of y is not in R"""
        one, two = opset.obj(1), opset.obj(2)
        assert not opset.star.in_r_set(Rel.parse(one, two, "[[0,1,2]]"))
        assert opset.star.in_r_set(Rel.parse(one, two, "[[0,1],[2]]"))

    def test_label_order(self, opset):
        """Test that R(1,1) lists the discrete relation first"""
        one = opset.obj(1)
        assert [r.text for r in opset.star.r_set(one, one)] == [DISC, JOINED]


class TestBasisChange:
    """Tests for basis_convert, embed and project"""

    def test_curly_to_round(self, opset):
        """Test {disc} = (disc) + (joined)"""
        one = opset.obj(1)
        disc, joined = Rel.parse(one, one, DISC), Rel.parse(one, one, JOINED)
        converted = opset.star.basis_convert(StarMor.basis(disc, Flavor.CURLY), Flavor.ROUND)
        assert converted == StarMor.build(one, one, Flavor.ROUND, {disc: Poly.one(), joined: Poly.one()})

    def test_round_to_curly(self, opset):
        """Test (disc) = {disc} - {joined}"""
        one = opset.obj(1)
        disc, joined = Rel.parse(one, one, DISC), Rel.parse(one, one, JOINED)
        converted = opset.star.basis_convert(StarMor.basis(disc, Flavor.ROUND), Flavor.CURLY)
        assert converted == StarMor.build(one, one, Flavor.CURLY, {disc: Poly.one(), joined: Poly.const(-1)})

    @pytest.mark.parametrize("backend", [OPSET, FINSET])
    def test_conversions_invert(self, backend):
        """Test that both conversions undo each other on R(2,2)"""
        engine = open_engine(backend)
        star = engine.star
        two = engine.obj(2)
        for r in star.r_set(two, two):
            for flavor in Flavor:
                phi = StarMor.basis(r, flavor)
                assert star.basis_convert(star.basis_convert(phi, flavor.other()), flavor) == phi

    def test_project_inverts_embed(self, opset):
        """Test project(embed(φ)) = φ in both flavors"""
        star = opset.star
        x, y = opset.obj(1), opset.obj(2)
        for r in star.r_set(x, y):
            for flavor in Flavor:
                phi = StarMor.basis(r, flavor)
                assert star.project(star.embed(phi), x, y, flavor) == phi

    def test_project_endpoints(self, opset):
        """Test that project checks the Hom space"""
        one, two = opset.obj(1), opset.obj(2)
        with pytest.raises(CompositionError):
            opset.star.project(opset.relations.identity(one), one, two)

    def test_embed_rejects_outside_r(self, opset):
        """Test that basis elements must lie in R(x,y)"""
        one, two = opset.obj(1), opset.obj(2)
        phi = StarMor.basis(Rel.parse(one, two, "[[0,1,2]]"), Flavor.CURLY)
        with pytest.raises(CanonicalFormError):
            opset.star.embed(phi)

    def test_short_round_embedding(self, opset):
        """Test that the outer projectors on (r) are redundant"""
        star = opset.star
        for m, n in ((1, 1), (1, 2), (2, 2)):
            for r in star.r_set(opset.obj(m), opset.obj(n)):
                assert star.embed_round_short(r) == star.embed_basis(r, Flavor.ROUND)

    def test_adjoint(self, opset):
        """Test that star_adjoint matches the adjoint of the embedding"""
        star = opset.star
        for r in star.r_set(opset.obj(1), opset.obj(2)):
            for flavor in Flavor:
                phi = StarMor.basis(r, flavor)
                assert star.embed(star.star_adjoint(phi)) == opset.relations.adjoint(star.embed(phi))

    @pytest.mark.parametrize("backend", [OPSET, FINSET])
    def test_basis_independent(self, backend):
        """Test that the curly basis is linearly independent"""
        engine = open_engine(backend)
        assert engine.star.basis_independent(engine.obj(2), engine.obj(2))


class TestProducts:
    """Tests for the closed-form products"""

    @pytest.mark.parametrize("case", load_fixtures(), ids=lambda case: case["name"])
    def test_structure_constants(self, case):
        """Test pinned structure constants"""
        assert evaluate_fixture(case) == case["expected"]

    @pytest.mark.parametrize("backend,sizes", [
        (OPSET, (1, 1, 1)),
        (OPSET, (1, 2, 1)),
        (OPSET, (2, 1, 0)),
        (FINSET, (1, 2, 1)),
    ])
    def test_oracle_agreement(self, backend, sizes):
        """Test both closed forms against embed, compose, project"""
        engine = open_engine(backend)
        star = engine.star
        for r, s in star_pairs(engine, sizes):
            for flavor in Flavor:
                rho, sigma = StarMor.basis(r, flavor), StarMor.basis(s, flavor)
                assert star.compose(sigma, rho) == star.compose_oracle(sigma, rho)

    def test_curly_product_in_round_basis(self, opset):
        """Test the curly product read directly in the round basis"""
        star = opset.star
        for r, s in star_pairs(opset, (1, 2, 1)):
            rho, sigma = StarMor.basis(r, Flavor.CURLY), StarMor.basis(s, Flavor.CURLY)
            expected = star.basis_convert(star.compose_curly(sigma, rho), Flavor.ROUND)
            assert star.compose_curly_as_round(sigma, rho) == expected

    def test_identity(self, opset):
        """Test that {Δ} = (Δ) is a two-sided unit"""
        star = opset.star
        x, y = opset.obj(1), opset.obj(2)
        for r in star.r_set(x, y):
            for flavor in Flavor:
                phi = StarMor.basis(r, flavor)
                assert star.compose(star.identity(y, flavor), phi) == phi
                assert star.compose(phi, star.identity(x, flavor)) == phi

    def test_degree_one(self):
        """Test {disc}{disc} = {disc} when δ = 1"""
        engine = open_engine(OPSET, DegreeFn.ONE)
        one = engine.obj(1)
        disc = StarMor.basis(Rel.parse(one, one, DISC), Flavor.CURLY)
        assert engine.star.compose(disc, disc) == disc

    def test_flavor_mismatch(self, opset):
        """Test that products need a common flavor"""
        one = opset.obj(1)
        rel = Rel.parse(one, one, DISC)
        with pytest.raises(CanonicalFormError):
            opset.star.compose_round(StarMor.basis(rel, Flavor.ROUND), StarMor.basis(rel, Flavor.CURLY))

    def test_middle_mismatch(self, opset):
        """Test that products need a common middle object"""
        one, two = opset.obj(1), opset.obj(2)
        rho = StarMor.basis(opset.relations.diagonal_rel(one), Flavor.CURLY)
        sigma = StarMor.basis(opset.relations.diagonal_rel(two), Flavor.CURLY)
        with pytest.raises(CompositionError):
            opset.star.compose(sigma, rho)


class TestTensor:
    """Tests for tensor decompositions, coherence and tensor blocks"""

    @pytest.mark.parametrize("backend,sizes,count", [
        (OPSET, (1, 1), 2),
        (OPSET, (2, 1), 3),
        (OPSET, (0, 2), 1),
        (FINSET, (1, 1), 1),
        (FINSET, (2, 2), 7),
    ])
    def test_decompose(self, backend, sizes, count):
        """Test that [x]*⊗[y]* has one summand per element of R(x,y)"""
        engine = open_engine(backend)
        summands = engine.star.tensor_decompose(*(engine.obj(n) for n in sizes))
        assert len(summands) == count
        for summand in summands:
            assert summand.to_dict().keys() == {"sub", "object_size", "projector"}
            assert summand.to_dict()["object_size"] == summand.sub.size

    def test_threefold(self, opset, finset):
        """Test [1]*⊗[1]*⊗[1]*"""
        for engine, count in ((opset, 5), (finset, 1)):
            one = engine.obj(1)
            assert len(engine.star.multi_tensor_decompose([one, one, one])) == count
        with pytest.raises(ValueError):
            opset.star.multi_tensor_decompose([opset.obj(1)])

    @pytest.mark.parametrize("backend", [OPSET, FINSET])
    def test_coherence(self, backend):
        """Test pentagon, hexagon, unit and symmetry"""
        engine = open_engine(backend)
        star = engine.star
        one, two = engine.obj(1), engine.obj(2)
        assert star.pentagon_holds(one, one, one, one)
        assert star.hexagon_holds(one, one, one)
        assert star.hexagon_holds(one, two, one)
        assert star.unit_holds(one, two)
        assert star.comm_constraint(one, two).then(star.comm_constraint(two, one)).is_identity()

    def test_transport_needs_iso(self, opset):
        """Test that summands only move along isomorphisms"""
        e = opset.category.to_terminal(opset.obj(1))
        with pytest.raises(CompositionError):
            opset.star.transport(e, [])

    def test_identity_blocks(self, opset):
        """Test {Δ}⊗{Δ} is the identity on every summand"""
        star = opset.star
        one, two = opset.obj(1), opset.obj(2)
        blocks = star.tensor(star.identity(one), star.identity(two))
        assert len(blocks.blocks) == len(blocks.src_summands) == 3
        for u in blocks.src_summands:
            assert blocks.block(u, u) == star.identity(star.summand_object(u))
        assert not blocks.flagged

    @pytest.mark.parametrize("backend", [OPSET, FINSET])
    def test_oracle_agreement(self, backend):
        """Test tensor blocks against the embedded tensor product"""
        engine = open_engine(backend)
        star = engine.star
        one = engine.obj(1)
        for r, r2 in itertools.product(star.r_set(one, one), repeat=2):
            for flavor in Flavor:
                rho, rho2 = StarMor.basis(r, flavor), StarMor.basis(r2, flavor)
                assert star.tensor(rho, rho2).blocks == star.tensor_oracle(rho, rho2).blocks

    def test_block_conversion(self, opset):
        """Test that converting blocks matches the tensor of converted factors"""
        star = opset.star
        one = opset.obj(1)
        for r, r2 in itertools.product(star.r_set(one, one), repeat=2):
            curly = star.tensor(StarMor.basis(r, Flavor.CURLY), StarMor.basis(r2, Flavor.CURLY))
            via_round = star.tensor(
                star.basis_convert(StarMor.basis(r, Flavor.CURLY), Flavor.ROUND),
                star.basis_convert(StarMor.basis(r2, Flavor.CURLY), Flavor.ROUND),
            )
            assert star.convert_blocks(curly, Flavor.ROUND).blocks == via_round.blocks

    def test_blocks_compose(self, opset):
        """Test that identity blocks are neutral for compose_blocks"""
        star = opset.star
        one = opset.obj(1)
        ident = star.tensor(star.identity(one), star.identity(one))
        for r, r2 in itertools.product(star.r_set(one, one), repeat=2):
            phi = star.tensor(StarMor.basis(r, Flavor.CURLY), StarMor.basis(r2, Flavor.CURLY))
            assert star.compose_blocks(ident, phi).blocks == phi.blocks
            assert star.compose_blocks(phi, ident).blocks == phi.blocks

    def test_to_dict(self, opset):
        """Test the block matrix layout"""
        star = opset.star
        one = opset.obj(1)
        data = star.tensor(star.identity(one), star.identity(one)).to_dict()
        assert data["flavor"] == "curly"
        assert len(data["blocks"]) == 2
        assert data["blocks"][0][1] == []
        assert data["flagged"] == []


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
