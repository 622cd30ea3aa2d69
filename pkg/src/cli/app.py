"""Command-line interface for tensor-envelope"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from ..core.backends import BACKEND_TYPES, CapabilityError, CompositionError, SizeGuardError
from ..core.engine import Engine, open_engine
from ..core.lattice import LatticeError
from ..core.models import FINSET, OPSET, CanonicalFormError, CoRel, DegreeFn, Flavor, Mor, Obj, Rel, StarMor, Sub
from ..core.projectors import NotSurjectiveError
from ..core.scalars import Poly, poly_eval, to_fraction
from ..core.settings import EngineSettings, get_settings
from ..core.verification import SUITES, run_suites


SCHEMA = "tensor-envelope/1"

COMMANDS = ("homdim", "compose", "tensor", "convert", "omega", "mobius", "decompose", "table", "verify")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_CAPABILITY = 3
EXIT_SIZE_GUARD = 4
EXIT_VERIFY_FAILED = 5

logger = logging.getLogger(__name__)


class RequestError(ValueError):
    """Raised when a request is missing or misuses an argument"""
    pass


class Request(BaseModel):
    """One CLI invocation, validated before dispatch"""
    command: Literal[COMMANDS]
    backend: Literal["finset", "opset"] = OPSET
    degree: Optional[DegreeFn] = None
    basis: Literal["rel", "round", "curly", "gluing"] = "curly"
    x: Optional[int] = Field(default=None, ge=0)
    y: Optional[int] = Field(default=None, ge=0)
    z: Optional[int] = Field(default=None, ge=0)
    x2: Optional[int] = Field(default=None, ge=0)
    y2: Optional[int] = Field(default=None, ge=0)
    f: Optional[str] = None
    g: Optional[str] = None
    u: Optional[str] = None
    w: Optional[str] = None
    sizes: Optional[list[int]] = None
    eval_at: Optional[str] = None
    format: Literal["json", "text"] = "json"
    suites: list[str] = Field(default_factory=list)
    all_suites: bool = False
    max_size: Optional[int] = Field(default=None, ge=1)
    workers: Optional[int] = Field(default=None, ge=1)
    with_mobius: bool = False

    @field_validator("degree", mode="before")
    @classmethod
    def parse_degree(cls, value):
        if value is None or isinstance(value, DegreeFn):
            return value
        return DegreeFn.parse(value)

    @field_validator("sizes", mode="before")
    @classmethod
    def parse_sizes(cls, value):
        if isinstance(value, str):
            try:
                return [int(part) for part in value.split(",") if part.strip()]
            except ValueError:
                raise ValueError(f"sizes must be comma-separated integers, got '{value}'") from None
        return value

    @field_validator("eval_at")
    @classmethod
    def check_eval_at(cls, value):
        if value is not None:
            try:
                to_fraction(value)
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"'{value}' is not an exact rational") from None
        return value

    @field_validator("suites")
    @classmethod
    def check_suites(cls, value):
        unknown = [name for name in value if name not in SUITES]
        if unknown:
            raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
        return value

    @model_validator(mode="after")
    def check_combination(self):
        if self.degree is not None and self.degree not in BACKEND_TYPES[self.backend].degree_functions:
            raise ValueError(f"the {self.degree.cli_name} degree function is not available on {self.backend}")
        if self.command == "verify" and not (self.suites or self.all_suites):
            raise ValueError("verify needs --suite NAME or --all")
        return self


# Argument helpers


def _need(request: Request, *names: str) -> None:
    missing = [name for name in names if getattr(request, name) is None]
    if missing:
        flags = ", ".join(f"--{name.replace('_', '-')}" for name in missing)
        raise RequestError(f"{request.command} needs {flags}")


def _flavor(request: Request) -> Flavor:
    if request.basis not in ("round", "curly"):
        raise RequestError(f"{request.command} does not accept the '{request.basis}' basis here")
    return Flavor(request.basis)


def _star_rel(engine: Engine, x: Obj, y: Obj, text: str) -> Rel:
    rel = Rel.parse(x, y, text)
    if not engine.star.in_r_set(rel):
        raise CanonicalFormError(f"{rel.text} is not in R({x},{y}): a projection is not surjective")
    return rel


def _context(request: Request, engine: Engine) -> dict:
    return {
        "schema": SCHEMA,
        "command": request.command,
        "backend": engine.backend,
        "degree": engine.degree.cli_name,
    }


def _gluing_terms(engine: Engine, phi: StarMor) -> list[dict]:
    return [
        {"gluing": u.to_dict(), "poly": c.to_json()}
        for u, c in engine.maltsev.gluing_terms(phi)
    ]


# Commands


def cmd_homdim(request: Request, engine: Engine) -> dict:
    _need(request, "x", "y")
    x, y = engine.obj(request.x), engine.obj(request.y)
    if request.basis == "rel":
        dim = len(engine.category.subobjects(engine.category.product(x, y)[0]))
    elif request.basis == "gluing":
        dim = len(engine.maltsev.corel_set(x, y))
    else:
        dim = engine.star.star_hom_dim(x, y)
    return {"basis": request.basis, "x": x.size, "y": y.size, "dim": dim}


def cmd_compose(request: Request, engine: Engine) -> dict:
    _need(request, "x", "y", "z", "f", "g")
    x, y, z = (engine.obj(n) for n in (request.x, request.y, request.z))
    if request.basis == "rel":
        rc = engine.relations
        first = rc.basis(Rel.parse(x, y, request.f))
        second = rc.basis(Rel.parse(y, z, request.g))
        return {"basis": "rel", "result": rc.compose(second, first).to_dict()}
    if request.basis == "gluing":
        first, second = CoRel.parse(x, y, request.f), CoRel.parse(y, z, request.g)
        product = engine.maltsev.malcev_compose(second, first)
        return {
            "basis": "gluing",
            "result": product.to_dict(),
            "gluing_terms": _gluing_terms(engine, product),
        }
    flavor = _flavor(request)
    rho = StarMor.basis(_star_rel(engine, x, y, request.f), flavor)
    sigma = StarMor.basis(_star_rel(engine, y, z, request.g), flavor)
    return {"basis": flavor.value, "result": engine.star.compose(sigma, rho).to_dict()}


def cmd_tensor(request: Request, engine: Engine) -> dict:
    _need(request, "x", "y", "x2", "y2", "f", "g")
    x, y, x2, y2 = (engine.obj(n) for n in (request.x, request.y, request.x2, request.y2))
    if request.basis == "rel":
        rc = engine.relations
        left = rc.basis(Rel.parse(x, y, request.f))
        right = rc.basis(Rel.parse(x2, y2, request.g))
        return {"basis": "rel", "result": rc.tensor(left, right).to_dict()}
    flavor = _flavor(request)
    rho = StarMor.basis(_star_rel(engine, x, y, request.f), flavor)
    rho2 = StarMor.basis(_star_rel(engine, x2, y2, request.g), flavor)
    return {"basis": flavor.value, "result": engine.star.tensor(rho, rho2).to_dict()}


def cmd_convert(request: Request, engine: Engine) -> dict:
    _need(request, "x", "y", "f")
    x, y = engine.obj(request.x), engine.obj(request.y)
    rel = _star_rel(engine, x, y, request.f)
    if request.basis == "gluing":
        terms = engine.maltsev.round_in_gluing_basis(rel)
        return {
            "basis": "gluing",
            "source": StarMor.basis(rel, Flavor.ROUND).to_dict(),
            "gluing": engine.maltsev.pull_push(rel).to_dict(),
            "result": [
                {"gluing": u.to_dict(), "poly": c.to_json()}
                for u, c in sorted(terms.items(), key=lambda item: item[0].sort_key())
            ],
        }
    flavor = _flavor(request)
    source = StarMor.basis(rel, flavor)
    return {
        "basis": flavor.value,
        "source": source.to_dict(),
        "result": engine.star.basis_convert(source, flavor.other()).to_dict(),
    }


def cmd_omega(request: Request, engine: Engine) -> dict:
    _need(request, "x", "y", "f")
    x, y = engine.obj(request.x), engine.obj(request.y)
    try:
        table = tuple(json.loads(request.f))
    except (json.JSONDecodeError, TypeError):
        raise CanonicalFormError(f"cannot parse table '{request.f}'") from None
    e = Mor(x, y, table)
    return {"morphism": e.to_dict(), "omega": {"poly": engine.projectors.omega(e).to_json()}}


def cmd_mobius(request: Request, engine: Engine) -> dict:
    _need(request, "x")
    cat = engine.category
    x = engine.obj(request.x)
    lattice = cat.subobject_lattice(x)
    if request.u is None and request.w is None:
        return {"x": x.size, "lattice": lattice.to_dict(label=Sub.as_list, with_mobius=request.with_mobius)}
    _need(request, "u", "w")
    u, w = Sub.parse(x, request.u), Sub.parse(x, request.w)
    return {"x": x.size, "u": u.as_list(), "w": w.as_list(), "mu": lattice.mobius(u, w)}


def cmd_decompose(request: Request, engine: Engine) -> dict:
    star = engine.star
    if request.sizes:
        if len(request.sizes) < 2:
            raise RequestError("--sizes needs at least two factors")
        objs = [engine.obj(n) for n in request.sizes]
        summands = star.multi_tensor_decompose(objs)
        return {"kind": "tensor", "sizes": list(request.sizes), "summands": [s.to_dict() for s in summands]}
    _need(request, "x")
    x = engine.obj(request.x)
    if request.y is not None:
        y = engine.obj(request.y)
        summands = star.tensor_decompose(x, y)
        return {"kind": "tensor", "sizes": [x.size, y.size], "summands": [s.to_dict() for s in summands]}
    family = engine.projectors.subobject_decomposition(x)
    return {"kind": "subobject", **family.to_dict()}


def cmd_table(request: Request, engine: Engine) -> dict:
    """End([x]*) structure constants: entries[i][j] is basis[i]∘basis[j]"""
    _need(request, "x")
    x = engine.obj(request.x)
    if request.basis == "gluing":
        ml = engine.maltsev
        gluings = ml.corel_set(x, x)
        entries = [[ml.malcev_compose(v, u).terms_to_list() for u in gluings] for v in gluings]
        return {"basis": "gluing", "x": x.size, "elements": [u.to_dict() for u in gluings], "entries": entries}
    flavor = _flavor(request)
    rels = engine.star.r_set(x, x)
    bases = [StarMor.basis(r, flavor) for r in rels]
    entries = [[engine.star.compose(s, r).terms_to_list() for r in bases] for s in bases]
    return {"basis": flavor.value, "x": x.size, "elements": [r.to_dict() for r in rels], "entries": entries}


def cmd_verify(request: Request, settings: EngineSettings) -> tuple[dict, int]:
    names = list(SUITES) if request.all_suites else request.suites
    reports = run_suites(names, settings, request.max_size, request.workers)
    passed = all(report.passed for report in reports)
    doc = {
        "schema": SCHEMA,
        "command": "verify",
        "passed": passed,
        "checks": sum(report.checks for report in reports),
        "failures": sum(len(report.failures) for report in reports),
        "suites": [report.to_dict() for report in reports],
    }
    return doc, EXIT_OK if passed else EXIT_VERIFY_FAILED


HANDLERS = {
    "homdim": cmd_homdim,
    "compose": cmd_compose,
    "tensor": cmd_tensor,
    "convert": cmd_convert,
    "omega": cmd_omega,
    "mobius": cmd_mobius,
    "decompose": cmd_decompose,
    "table": cmd_table,
}


# Output


def attach_values(doc, point: Fraction):
    """Add an exact "value" next to every "poly" entry"""
    if isinstance(doc, list):
        return [attach_values(item, point) for item in doc]
    if not isinstance(doc, dict):
        return doc
    result = {key: attach_values(value, point) for key, value in doc.items()}
    if isinstance(doc.get("poly"), list):
        result["value"] = str(poly_eval(Poly.from_json(doc["poly"]), point))
    return result


def error_document(code: str, message: str) -> dict:
    return {"schema": SCHEMA, "error": {"code": code, "message": message}}


def classify(error: Exception) -> tuple[str, int]:
    """Error code and exit status for an exception"""
    if isinstance(error, CapabilityError):
        return "capability", EXIT_CAPABILITY
    if isinstance(error, SizeGuardError):
        return "size_guard", EXIT_SIZE_GUARD
    if isinstance(error, (RequestError, ValidationError)):
        return "invalid_request", EXIT_INVALID
    if isinstance(error, (CanonicalFormError, LatticeError, CompositionError, NotSurjectiveError)):
        return "parse", EXIT_INVALID
    return "engine", EXIT_ERROR


def run(request: Request, settings: Optional[EngineSettings] = None) -> tuple[dict, int]:
    """
    Execute one request.

    Args:
        request: Validated request
        settings: Engine settings; explicit settings get an engine built with their guards

    Returns:
        (output document, exit code)
    """
    try:
        if request.command == "verify":
            return cmd_verify(request, settings or get_settings())
        engine = open_engine(request.backend, request.degree, settings)
        doc = {**_context(request, engine), **HANDLERS[request.command](request, engine)}
    except Exception as e:
        code, status = classify(e)
        if status == EXIT_ERROR:
            logger.exception("%s failed", request.command)
        else:
            logger.info("%s refused: %s", request.command, e)
        return error_document(code, str(e)), status
    if request.eval_at is not None:
        doc = attach_values(doc, to_fraction(request.eval_at))
        doc["eval_at"] = request.eval_at
    return doc, EXIT_OK


def render_json(doc: dict) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def _inline(value) -> str:
    return json.dumps(value, ensure_ascii=False, separators=(",", ":"))


def _is_poly(value) -> bool:
    return isinstance(value, dict) and isinstance(value.get("poly"), list)


def _is_flat(value) -> bool:
    """Scalars and lists of scalars print on one line"""
    if isinstance(value, dict):
        return False
    if isinstance(value, list):
        return all(_is_flat(item) for item in value)
    return True


def _poly_line(term: dict) -> str:
    line = str(Poly.from_json(term["poly"]))
    if "value" in term:
        line += f" (= {term['value']})"
    labels = [f"{key}={_inline(value)}" for key, value in term.items() if key not in ("poly", "value")]
    return "  ".join([line] + labels)


def render_text(doc, indent: int = 0) -> str:
    """Plain indented text; polynomials are written in t"""
    pad = "  " * indent
    if _is_poly(doc):
        return f"{pad}{_poly_line(doc)}\n"
    if isinstance(doc, dict):
        lines = []
        for key, value in doc.items():
            if _is_flat(value):
                lines.append(f"{pad}{key}: {_inline(value)}\n")
            elif _is_poly(value):
                lines.append(f"{pad}{key}: {_poly_line(value)}\n")
            else:
                lines.append(f"{pad}{key}:\n{render_text(value, indent + 1)}")
        return "".join(lines)
    if isinstance(doc, list):
        lines = []
        for item in doc:
            if _is_flat(item):
                lines.append(f"{pad}- {_inline(item)}\n")
            elif _is_poly(item):
                lines.append(f"{pad}- {_poly_line(item)}\n")
            else:
                lines.append(f"{pad}-\n{render_text(item, indent + 1)}")
        return "".join(lines)
    return f"{pad}{_inline(doc)}\n"


# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensor-envelope",
        description="Exact computations in the tensor envelope T(A, δ) of a finite regular category",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--backend", default=OPSET, choices=(FINSET, OPSET))
    parser.add_argument("--degree", help="one, zero-noniso or t-power; finset only has one (default: t-power on opset, one on finset)")
    parser.add_argument("--basis", default="curly", choices=("rel", "round", "curly", "gluing"))
    for name in ("x", "y", "z", "x2", "y2"):
        parser.add_argument(f"--{name}", type=int, help=f"carrier size of {name}")
    parser.add_argument("--f", help="first relation, subobject, table or gluing in canonical text form")
    parser.add_argument("--g", help="second relation or gluing in canonical text form")
    parser.add_argument("--u", help="lower subobject for mobius")
    parser.add_argument("--w", help="upper subobject for mobius")
    parser.add_argument("--sizes", help="comma-separated factor sizes for decompose, e.g. 1,1,1")
    parser.add_argument("--eval-at", dest="eval_at", help="exact rational at which to evaluate every polynomial")
    parser.add_argument("--format", default="json", choices=("json", "text"))
    parser.add_argument("--out", type=Path, help="write the document to FILE instead of stdout")
    parser.add_argument("--suite", dest="suites", action="append", default=[], help="verification suite (repeatable)")
    parser.add_argument("--all", dest="all_suites", action="store_true", help="run every verification suite")
    parser.add_argument("--max-size", dest="max_size", type=int, help="carrier bound for verify sweeps")
    parser.add_argument("--workers", type=int, help="worker threads for verify")
    parser.add_argument("--with-mobius", dest="with_mobius", action="store_true", help="include the Möbius table")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def configure_logging(settings: EngineSettings, verbose: int) -> None:
    level = logging.DEBUG if verbose > 1 else logging.INFO if verbose == 1 else getattr(logging, settings.log_level)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[list[str]] = None) -> int:
    """Console entry point"""
    args = build_parser().parse_args(argv)
    settings = get_settings()
    configure_logging(settings, args.verbose)
    fields = {k: v for k, v in vars(args).items() if k not in ("out", "verbose") and v is not None}
    try:
        request = Request(**fields)
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        doc, status = error_document("invalid_request", messages), EXIT_INVALID
        fmt = args.format
    else:
        doc, status = run(request)
        fmt = request.format
    text = render_text(doc) if fmt == "text" else render_json(doc)
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
