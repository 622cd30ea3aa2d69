"""Verification suites - exhaustive small-case checks of every identity the engine relies on"""

import itertools
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb, factorial
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

from sympy import bell

from .backends import CapabilityError, get_backend
from .engine import Engine, open_engine
from .models import FINSET, OPSET, CoRel, DegreeFn, Flavor, Mor, Obj, Rel, StarMor
from .scalars import Poly
from .settings import EngineSettings, get_settings


logger = logging.getLogger(__name__)

FIXTURES = Path(__file__).parent.parent.parent / "data" / "fixtures" / "structure_constants.json"

MAX_REPORTED_FAILURES = 25


@dataclass
class SuiteReport:
    """Outcome of one suite"""
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return not self.failures and self.error is None

    def check(self, condition: bool, message: str) -> None:
        self.checks += 1
        if not condition:
            self.failures.append(message)

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "failure_count": len(self.failures),
            "failures": self.failures[:MAX_REPORTED_FAILURES],
            "error": self.error,
        }


def partial_bijections(m: int, n: int) -> int:
    """Σ_k C(m,k)C(n,k)k!, the size of R(m,n) in OpSet"""
    return sum(comb(m, k) * comb(n, k) * factorial(k) for k in range(min(m, n) + 1))


def engines(settings: EngineSettings, backends: Sequence[str] = (FINSET, OPSET)) -> Iterator[Engine]:
    for backend in backends:
        for degree in get_backend(backend).degree_functions:
            yield open_engine(backend, degree, settings)


def _tag(engine: Engine) -> str:
    return f"{engine.backend}/{engine.degree.cli_name}"


def size_tuples(count: int, low: int, high: int, total: Optional[int] = None) -> list[tuple[int, ...]]:
    return [
        sizes
        for sizes in itertools.product(range(low, high + 1), repeat=count)
        if total is None or sum(sizes) <= total
    ]


# Relation axioms


def suite_rel_axioms(settings: EngineSettings, max_size: int) -> SuiteReport:
    report = SuiteReport("rel-axioms")
    for engine in engines(settings):
        _rel_axioms(engine, max_size, report)
    return report


def _rel_axioms(engine: Engine, max_size: int, report: SuiteReport) -> None:
    cat, rc = engine.category, engine.relations
    tag = _tag(engine)
    objects = cat.objects(max_size)
    for x in objects:
        report.check(rc.delta(cat.identity(x)) == 1, f"{tag}: δ(id) != 1 on {x}")
        left, right = rc.snake_composites(x)
        ident = rc.identity(x)
        report.check(left == ident and right == ident, f"{tag}: snake identity fails on {x}")

    for a, b, c in itertools.product(objects, repeat=3):
        for g in cat.morphisms(a, b):
            for f in cat.morphisms(b, c):
                fg = cat.compose(f, g)
                report.check(
                    rc.compose(rc.graph(f), rc.graph(g)) == rc.graph(fg),
                    f"{tag}: [f][g] != [fg] for f={f.text}, g={g.text}",
                )
                report.check(
                    rc.compose(rc.cograph(g), rc.cograph(f)) == rc.cograph(fg),
                    f"{tag}: [g]∨[f]∨ != [fg]∨ for f={f.text}, g={g.text}",
                )
                if cat.is_surjective(g) or cat.is_injective(f):
                    report.check(
                        rc.delta(fg) == rc.delta(f) * rc.delta(g),
                        f"{tag}: δ(fg) != δ(f)δ(g) for f={f.text}, g={g.text}",
                    )

    for a, b in itertools.product(objects, repeat=2):
        for f in cat.morphisms(a, b):
            report.check(rc.adjoint(rc.adjoint(rc.graph(f))) == rc.graph(f), f"{tag}: adjoint is not an involution")
            if cat.is_surjective(f):
                report.check(
                    rc.compose(rc.graph(f), rc.cograph(f)) == rc.identity(b).scale(rc.delta(f)),
                    f"{tag}: [e][e]∨ != δ(e) id for {f.text}",
                )

    for a, b, c in itertools.product(objects, repeat=3):
        for f in cat.morphisms(a, c):
            image = cat.image(f)[1]
            for g in cat.morphisms(b, c):
                span = cat.pullback(f, g)
                lhs = rc.compose(rc.cograph(g), rc.graph(f))
                if span is None:
                    report.check(lhs.is_zero(), f"{tag}: [g]∨[f] is not zero over an empty pullback for {f.text}, {g.text}")
                else:
                    _, p1, p2 = span
                    report.check(
                        lhs == rc.compose(rc.graph(p2), rc.cograph(p1)),
                        f"{tag}: [g]∨[f] != [p2][p1]∨ for {f.text}, {g.text}",
                    )
                    if cat.is_surjective(f):
                        report.check(
                            cat.is_surjective(p2) and rc.delta(p2) == rc.delta(f),
                            f"{tag}: δ is not stable under pulling {f.text} back along {g.text}",
                        )
                expected = None if span is None else cat.image(span[2])[1]
                report.check(
                    cat.preimage(g, image) == expected,
                    f"{tag}: images do not commute with pullback for {f.text}, {g.text}",
                )


# Projectors


def suite_projectors(settings: EngineSettings, max_size: int) -> SuiteReport:
    report = SuiteReport("projectors")
    for engine in engines(settings):
        _projectors(engine, max_size, report)
    return report


def _projectors(engine: Engine, max_size: int, report: SuiteReport) -> None:
    cat, rc, pr = engine.category, engine.relations, engine.projectors
    tag = _tag(engine)
    objects = cat.objects(max_size)
    for x in objects:
        family = pr.subobject_decomposition(x, verify=False)
        for failure in pr.family_failures(family):
            report.check(False, f"{tag}: {failure}")
        report.check(True, "family checked")
        report.check(pr.omega(cat.identity(x)) == 1, f"{tag}: ω(id) != 1 on {x}")
        for u in family.lattice:
            report.check(
                pr.p_star(x, u) == pr.p_star_recursive(x, u),
                f"{tag}: p* by Möbius inversion differs from the recursion at {u.text}",
            )
            for v in family.lattice:
                expected = pr.p_star(x, u) if family.lattice.leq(u, v) else rc.zero(x, x)
                report.check(
                    rc.compose(pr.p_star(x, u), pr.p_sub(x, v)) == expected,
                    f"{tag}: p*[{u.text}] p[{v.text}] is wrong",
                )

    for x, y in itertools.product(objects, repeat=2):
        subs_x = cat.subobjects(x)
        subs_y = cat.subobjects(y)
        for f in cat.morphisms(x, y):
            gf = rc.graph(f)
            dual = rc.cograph(f)
            for z in subs_y:
                pre = cat.preimage(f, z)
                rhs = rc.zero(x, y) if pre is None else rc.compose(gf, pr.p_sub(x, pre))
                report.check(rc.compose(pr.p_sub(y, z), gf) == rhs, f"{tag}: p_z[f] transport fails for {f.text}")

                left = rc.compose(pr.p_star(y, z), gf)
                spread = rc.zero(x, y)
                for u in subs_x:
                    fu = cat.sub_image(f, u)
                    moved = rc.compose(gf, pr.p_star(x, u))
                    hit = moved if fu == z else rc.zero(x, y)
                    report.check(
                        rc.compose(left, pr.p_star(x, u)) == hit,
                        f"{tag}: p_z*[f]p_u* fails for {f.text} at {u.text}, {z.text}",
                    )
                    dual_hit = rc.compose(pr.p_star(x, u), dual) if fu == z else rc.zero(y, x)
                    report.check(
                        rc.compose_all(pr.p_star(x, u), dual, pr.p_star(y, z)) == dual_hit,
                        f"{tag}: adjoint transport fails for {f.text} at {u.text}, {z.text}",
                    )
                    if fu == z:
                        spread = spread + moved
                report.check(left == spread, f"{tag}: p_z*[f] expansion fails for {f.text} at {z.text}")

            for u in subs_x:
                target = cat.sub_image(f, u)
                complement = rc.identity(y) - pr.p_star(y, target)
                report.check(
                    rc.compose_all(complement, gf, pr.p_star(x, u)).is_zero(),
                    f"{tag}: [f] does not map [u]* into [f(u)]* for {f.text}",
                )
            if cat.is_surjective(f):
                lhs = rc.compose_all(gf, pr.p_star_top(x), dual)
                report.check(
                    lhs == pr.p_star_top(y).scale(pr.omega(f)),
                    f"{tag}: [e]p*[e]∨ != ω p* for {f.text}",
                )


# Oracle equivalence


def oracle_total(engine: Engine, settings: EngineSettings) -> int:
    """OpSet total-carrier bound; constant degrees sweep the smaller bound"""
    if engine.degree is DegreeFn.T_POWER:
        return settings.oracle_total_size
    return min(settings.oracle_total_size, settings.oracle_constant_total_size)


def _oracle_instances(engine: Engine, settings: EngineSettings) -> list[tuple[int, ...]]:
    if engine.backend == OPSET:
        total = oracle_total(engine, settings)
        return size_tuples(3, 0, total, total)
    return size_tuples(3, 1, settings.finset_oracle_size)


def suite_oracle(settings: EngineSettings, max_size: int) -> SuiteReport:
    report = SuiteReport("oracle")
    for engine in engines(settings):
        star = engine.star
        tag = _tag(engine)
        for sizes in _oracle_instances(engine, settings):
            x, y, z = (engine.obj(n) for n in sizes)
            for r in star.r_set(x, y):
                for s in star.r_set(y, z):
                    compare_products(star, r, s, report, tag)
        for sizes in _tensor_instances(engine, settings):
            x, x2, y, y2 = (engine.obj(n) for n in sizes)
            for r in star.r_set(x, y):
                for r2 in star.r_set(x2, y2):
                    compare_tensors(star, r, r2, report, tag)
    return report


def _tensor_instances(engine: Engine, settings: EngineSettings) -> list[tuple[int, ...]]:
    if engine.backend == OPSET:
        total = oracle_total(engine, settings)
        return size_tuples(4, 0, total, total)
    return [
        sizes
        for sizes in size_tuples(4, 1, settings.finset_oracle_size)
        if sizes[0] * sizes[1] * sizes[2] * sizes[3] <= settings.finset_max_size
    ]


def compare_products(star, r: Rel, s: Rel, report: SuiteReport, tag: str) -> None:
    label = f"{tag}: {s.text}∘{r.text}"
    for flavor in Flavor:
        rho, sigma = StarMor.basis(r, flavor), StarMor.basis(s, flavor)
        report.check(
            star.compose(sigma, rho) == star.compose_oracle(sigma, rho),
            f"{label} ({flavor.value}) disagrees with the oracle",
        )
    rho, sigma = StarMor.basis(r, Flavor.CURLY), StarMor.basis(s, Flavor.CURLY)
    report.check(
        star.compose_curly_as_round(sigma, rho)
        == star.basis_convert(star.compose_curly(sigma, rho), Flavor.ROUND),
        f"{label}: curly product in the round basis disagrees",
    )


def compare_tensors(star, r: Rel, r2: Rel, report: SuiteReport, tag: str) -> None:
    for flavor in Flavor:
        rho, rho2 = StarMor.basis(r, flavor), StarMor.basis(r2, flavor)
        report.check(
            star.tensor(rho, rho2).blocks == star.tensor_oracle(rho, rho2).blocks,
            f"{tag}: {r.text}⊗{r2.text} ({flavor.value}) disagrees with the oracle",
        )


# Dimensions


def suite_dimensions(settings: EngineSettings, max_size: int) -> SuiteReport:
    report = SuiteReport("dimensions")
    engine = open_engine(OPSET, settings=settings)
    cat, star = engine.category, engine.star
    bound = min(max_size, 3)
    for m, n in itertools.product(range(bound + 1), repeat=2):
        x, y = engine.obj(m), engine.obj(n)
        report.check(
            star.star_hom_dim(x, y) == partial_bijections(m, n),
            f"opset: dim Hom([{m}]*,[{n}]*) != {partial_bijections(m, n)}",
        )
        report.check(star.basis_independent(x, y), f"opset: curly basis of ({m},{n}) is not unitriangular")
        summed = sum(star.star_hom_dim(cat.terminal(), star.summand_object(r)) for r in star.r_set(x, y))
        report.check(summed == star.star_hom_dim(x, y), f"opset: self-duality count fails at ({m},{n})")
    for total in range(0, 7):
        for m in range(total + 1):
            product = cat.product(engine.obj(m), engine.obj(total - m))[0]
            report.check(
                len(cat.subobjects(product)) == int(bell(total)),
                f"opset: dim Hom([{m}],[{total - m}]) != Bell({total})",
            )
    for n in range(1, bound + 1):
        report.check(
            star.star_hom_dim(cat.terminal(), engine.obj(n)) == 1,
            f"opset: dim Hom(1,[{n}]*) != 1",
        )
    finset = open_engine(FINSET, settings=settings)
    one = finset.obj(1)
    report.check(finset.star.star_hom_dim(one, one) == 1, "finset: dim Hom([1]*,[1]*) != 1")
    return report


# Pinned structure constants


def load_fixtures(path: Path = FIXTURES) -> list[dict]:
    with open(path) as f:
        return json.load(f)["cases"]


def evaluate_fixture(case: dict, settings: Optional[EngineSettings] = None):
    """Compute the value a fixture case pins, in its JSON form"""
    engine = open_engine(case["backend"], case["degree"], settings)
    objs = [engine.obj(n) for n in case["sizes"]]
    op = case["op"]
    if op == "homdim":
        return engine.star.star_hom_dim(*objs)
    if op == "omega":
        x, y = objs
        return engine.projectors.omega(Mor(x, y, tuple(case["table"]))).to_json()
    if op == "compose":
        x, y, z = objs
        flavor = Flavor(case["flavor"])
        rho = StarMor.basis(Rel.parse(x, y, case["f"]), flavor)
        sigma = StarMor.basis(Rel.parse(y, z, case["g"]), flavor)
        return engine.star.compose(sigma, rho).terms_to_list()
    if op == "malcev":
        x, y, z = objs
        u = CoRel.parse(x, y, case["f"])
        v = CoRel.parse(y, z, case["g"])
        return engine.maltsev.malcev_compose(v, u).terms_to_list()
    raise ValueError(f"unknown fixture operation '{op}'")


def suite_structure_constants(settings: EngineSettings, max_size: int) -> SuiteReport:
    report = SuiteReport("structure-constants")
    for case in load_fixtures():
        report.check(evaluate_fixture(case, settings) == case["expected"], f"{case['name']} differs from its pinned value")
    return report


# Mal'tsev


def suite_maltsev(settings: EngineSettings, max_size: int) -> SuiteReport:
    report = SuiteReport("maltsev")
    engine = open_engine(OPSET, settings=settings)
    ml, star = engine.maltsev, engine.star
    for m, n in itertools.product(range(3), repeat=2):
        x, y = engine.obj(m), engine.obj(n)
        gluings = ml.corel_set(x, y)
        report.check(len(gluings) == partial_bijections(m, n), f"gluing count wrong at ({m},{n})")
        report.check(ml.order_isomorphic(x, y), f"push-pull is not an order isomorphism at ({m},{n})")
        for u in gluings:
            report.check(ml.curly_prime_from_word(u) == ml.curly_prime(u), f"{{{u.text}}}' differs from its word")
            lower = {}
            for t in ml.quot_lattice(x, y).down_set(u):
                rel = ml.push_pull(t)
                lower[rel] = lower.get(rel, Poly.zero()) + Poly.one()
            round_sum = StarMor.build(x, y, Flavor.ROUND, lower)
            report.check(
                star.basis_convert(ml.curly_prime(u), Flavor.ROUND) == round_sum,
                f"{{{u.text}}}' is not the sum of the round elements below it",
            )
        for r in star.r_set(x, y):
            terms = ml.round_in_gluing_basis(r)
            report.check(
                ml.from_gluing_terms(x, y, terms) == star.basis_convert(StarMor.basis(r, Flavor.ROUND), Flavor.CURLY),
                f"({r.text}) in the gluing basis is wrong",
            )

    total = settings.oracle_total_size
    for sizes in size_tuples(3, 0, total, total):
        x, y, z = (engine.obj(n) for n in sizes)
        for u in ml.corel_set(x, y):
            for v in ml.corel_set(y, z):
                expected = star.compose_curly(ml.curly_prime(v), ml.curly_prime(u))
                report.check(
                    ml.malcev_compose(v, u) == expected,
                    f"gluing product {v.text}·{u.text} on {sizes} disagrees with the curly product",
                )

    checked, failures = ml.maltsev_witness(max_size)
    report.check(not failures and checked > 0, "; ".join(failures) or "no reflexive relations checked")
    checked, failures = ml.exactness_witness(max_size)
    report.check(not failures and checked > 0, "; ".join(failures) or "no equivalence relations checked")

    finset = open_engine(FINSET, settings=settings)
    try:
        finset.maltsev.corel_set(finset.obj(1), finset.obj(1))
        report.check(False, "finset gluings did not raise a capability error")
    except CapabilityError:
        report.check(True, "finset refused")
    return report


# Tensor decomposition and coherence


def suite_tensor(settings: EngineSettings, max_size: int) -> SuiteReport:
    report = SuiteReport("tensor")
    for backend, low in ((OPSET, 0), (FINSET, 1)):
        engine = open_engine(backend, settings=settings)
        star = engine.star
        for m, n in itertools.product(range(low, 3), repeat=2):
            x, y = engine.obj(m), engine.obj(n)
            summands = star.tensor_decompose(x, y)
            report.check(len(summands) == star.star_hom_dim(x, y), f"{backend}: summand count at ({m},{n})")
        one = engine.obj(1)
        expected = 2 if backend == OPSET else 1
        report.check(len(star.tensor_decompose(one, one)) == expected, f"{backend}: [1]*⊗[1]* summands")
        report.check(star.comm_constraint(one, one).then(star.comm_constraint(one, one)).is_identity(),
                     f"{backend}: comm∘comm is not the identity")
        report.check(star.pentagon_holds(one, one, one, one), f"{backend}: pentagon fails")
        report.check(star.hexagon_holds(one, one, one), f"{backend}: hexagon fails")
        report.check(star.unit_holds(one, one), f"{backend}: unit coherence fails")
        report.check(star.unit_holds(one, engine.obj(2)), f"{backend}: unit coherence fails on (1,2)")
        assoc = star.assoc_constraint(one, one, one)
        report.check(
            len(assoc.mapping) == len(star.multi_tensor_decompose([one, one, one])),
            f"{backend}: triple decomposition does not match the reassociated one",
        )
        cat = engine.category
        inner, q1, q2 = cat.product(one, one)
        target, t1, t2 = cat.product(one, inner)
        expected_summands = set(star.summands_of(target, [t1, cat.compose(q1, t2), cat.compose(q2, t2)]))
        report.check(
            {v for _, v in assoc.mapping} == expected_summands,
            f"{backend}: reassociated summands are not the summands of x×(y×z)",
        )
        r_set = star.r_set(one, one)
        for flavor in Flavor:
            for a, b, c, d in itertools.product(r_set, repeat=4):
                phi, phi2 = StarMor.basis(a, flavor), StarMor.basis(b, flavor)
                psi, psi2 = StarMor.basis(c, flavor), StarMor.basis(d, flavor)
                lhs = star.compose_blocks(star.tensor(phi, psi), star.tensor(phi2, psi2))
                rhs = star.tensor(star.compose(phi, phi2), star.compose(psi, psi2))
                report.check(lhs.blocks == rhs.blocks, f"{backend}: interchange law fails ({flavor.value})")
    opset = open_engine(OPSET, settings=settings)
    one = opset.obj(1)
    report.check(len(opset.star.multi_tensor_decompose([one, one, one])) == 5, "opset: [1]*⊗3 summands != 5")
    return report


# Associativity


def suite_associativity(settings: EngineSettings, max_size: int) -> SuiteReport:
    report = SuiteReport("associativity")
    for degree in (DegreeFn.T_POWER, DegreeFn.ONE, DegreeFn.ZERO_NONISO):
        engine = open_engine(OPSET, degree, settings)
        star = engine.star
        one = engine.obj(1)
        rels = star.r_set(one, one)
        for flavor in Flavor:
            for r, s, q in itertools.product(rels, repeat=3):
                a, b, c = (StarMor.basis(rel, flavor) for rel in (r, s, q))
                report.check(
                    star.compose(c, star.compose(b, a)) == star.compose(star.compose(c, b), a),
                    f"{_tag(engine)}: products of {r.text}, {s.text}, {q.text} are not associative ({flavor.value})",
                )
    return report


SUITES: dict[str, Callable[[EngineSettings, int], SuiteReport]] = {
    "rel-axioms": suite_rel_axioms,
    "projectors": suite_projectors,
    "oracle": suite_oracle,
    "dimensions": suite_dimensions,
    "structure-constants": suite_structure_constants,
    "maltsev": suite_maltsev,
    "tensor": suite_tensor,
    "associativity": suite_associativity,
}


def run_suite(name: str, settings: EngineSettings, max_size: int) -> SuiteReport:
    start = time.perf_counter()
    try:
        report = SUITES[name](settings, max_size)
    except Exception as e:
        logger.exception("suite %s crashed", name)
        report = SuiteReport(name, error=f"{type(e).__name__}: {e}")
    report.seconds = time.perf_counter() - start
    logger.info(
        "suite %s: %d checks, %d failures in %.2fs",
        name, report.checks, len(report.failures), report.seconds,
    )
    return report


def run_suites(
    names: Sequence[str],
    settings: Optional[EngineSettings] = None,
    max_size: Optional[int] = None,
    workers: Optional[int] = None,
) -> list[SuiteReport]:
    """
    Run suites concurrently, returning reports in the requested order.

    Args:
        names: Suite names (see SUITES)
        settings: Bounds; defaults to the process settings
        max_size: Carrier bound for the sweeping suites
        workers: Thread count; defaults to settings.workers()

    Raises:
        KeyError: For an unknown suite name
    """
    settings = settings or get_settings()
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    bound = max_size or settings.verify_max_size
    with ThreadPoolExecutor(max_workers=workers or settings.workers()) as pool:
        futures = [pool.submit(run_suite, name, settings, bound) for name in names]
        return [future.result() for future in futures]
