"""Tests for the command-line interface"""

import json

import pytest
from pathlib import Path

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from pydantic import ValidationError

from src.cli.app import (
    EXIT_CAPABILITY,
    EXIT_INVALID,
    EXIT_OK,
    EXIT_SIZE_GUARD,
    SCHEMA,
    Request,
    main,
    render_text,
    run,
)
from src.core.models import DegreeFn
from src.core.settings import EngineSettings
from src.core.verification import SUITES


def invoke(capsys, *argv) -> tuple[dict, int]:
    """Run main and parse the JSON it prints"""
    status = main(list(argv))
    return json.loads(capsys.readouterr().out), status


class TestRequest:
    """Tests for request validation"""

    def test_defaults(self):
        """Test default backend and basis"""
        request = Request(command="homdim", x=1, y=1)
        assert request.backend == "opset"
        assert request.basis == "curly"
        assert request.degree is None

    def test_t_power_needs_opset(self):
        """Test that t-power is refused on FinSet"""
        with pytest.raises(ValidationError):
            Request(command="homdim", backend="finset", degree="t-power", x=1, y=1)

    def test_zero_noniso_needs_opset(self):
        """Test that zero-noniso is refused on FinSet and accepted on OpSet"""
        with pytest.raises(ValidationError):
            Request(command="omega", backend="finset", degree="zero-noniso", x=2, y=1, f="[0,0]")
        request = Request(command="omega", backend="opset", degree="zero-noniso", x=2, y=1, f="[0]")
        assert request.degree is DegreeFn.ZERO_NONISO

    def test_sizes_string(self):
        """Test comma-separated sizes"""
        assert Request(command="decompose", sizes="1,2,1").sizes == [1, 2, 1]

    def test_invalid_values(self):
        """Test rejected field values"""
        with pytest.raises(ValidationError):
            Request(command="homdim", x=-1, y=1)
        with pytest.raises(ValidationError):
            Request(command="homdim", x=1, y=1, eval_at="1/0")
        with pytest.raises(ValidationError):
            Request(command="verify", suites=["nonsense"])
        with pytest.raises(ValidationError):
            Request(command="verify")


class TestRun:
    """Tests for run()"""

    def test_homdim(self):
        """Test Hom dimensions in the star, relation and gluing bases"""
        doc, status = run(Request(command="homdim", x=2, y=2))
        assert status == EXIT_OK
        assert doc["schema"] == SCHEMA
        assert doc["degree"] == "t-power"
        assert doc["dim"] == 7
        assert run(Request(command="homdim", basis="rel", x=1, y=1))[0]["dim"] == 2
        assert run(Request(command="homdim", basis="gluing", x=2, y=2))[0]["dim"] == 7

    def test_compose(self):
        """Test {disc}{disc} = t{disc}"""
        doc, status = run(Request(command="compose", x=1, y=1, z=1, f="[[0],[1]]", g="[[0],[1]]"))
        assert status == EXIT_OK
        assert doc["result"]["terms"] == [{"rel": [[0], [1]], "poly": [0, 1]}]

    def test_compose_round(self):
        """Test (disc)(disc) in the round basis"""
        doc, _ = run(Request(command="compose", basis="round", x=1, y=1, z=1, f="[[0],[1]]", g="[[0],[1]]"))
        assert doc["result"]["terms"] == [
            {"rel": [[0], [1]], "poly": [-2, 1]},
            {"rel": [[0, 1]], "poly": [-1, 1]},
        ]

    def test_compose_gluing(self):
        """Test the gluing product with its reading in gluings"""
        doc, status = run(Request(
            command="compose", basis="gluing", x=1, y=1, z=1,
            f="{x0:[],y0:[],bij:[]}", g="{x0:[],y0:[],bij:[]}",
        ))
        assert status == EXIT_OK
        assert doc["result"]["terms"] == [{"rel": [[0], [1]], "poly": [0, 1]}]
        assert doc["gluing_terms"] == [{"gluing": {"x0": [], "y0": [], "bij": []}, "poly": [0, 1]}]

    def test_eval_at(self):
        """Test that every polynomial gains an exact value"""
        doc, _ = run(Request(
            command="compose", x=1, y=1, z=1, f="[[0],[1]]", g="[[0],[1]]", eval_at="1/2",
        ))
        assert doc["result"]["terms"][0]["value"] == "1/2"
        assert doc["eval_at"] == "1/2"

    def test_table(self):
        """Test End([1]*) in the curly basis"""
        doc, _ = run(Request(command="table", x=1))
        assert doc["elements"] == [[[0], [1]], [[0, 1]]]
        assert doc["entries"] == [
            [[{"rel": [[0], [1]], "poly": [0, 1]}], [{"rel": [[0], [1]], "poly": [1]}]],
            [[{"rel": [[0], [1]], "poly": [1]}], [{"rel": [[0, 1]], "poly": [1]}]],
        ]

    def test_convert(self):
        """Test {disc} = (disc) + (joined) and (disc) in gluings"""
        doc, _ = run(Request(command="convert", x=1, y=1, f="[[0],[1]]"))
        assert doc["result"]["flavor"] == "round"
        assert doc["result"]["terms"] == [
            {"rel": [[0], [1]], "poly": [1]},
            {"rel": [[0, 1]], "poly": [1]},
        ]
        doc, _ = run(Request(command="convert", basis="gluing", x=1, y=1, f="[[0],[1]]"))
        assert doc["result"] == [
            {"gluing": {"x0": [], "y0": [], "bij": []}, "poly": [1]},
            {"gluing": {"x0": [0], "y0": [0], "bij": [[0, 0]]}, "poly": [-1]},
        ]

    def test_tensor(self):
        """Test {Δ}⊗{Δ} on [1]*⊗[1]*"""
        doc, status = run(Request(command="tensor", x=1, y=1, x2=1, y2=1, f="[[0,1]]", g="[[0,1]]"))
        assert status == EXIT_OK
        assert len(doc["result"]["summands_src"]) == 2
        assert doc["result"]["blocks"][0][1] == []

    def test_capability(self):
        """Test that FinSet gluings exit with the capability code"""
        doc, status = run(Request(command="homdim", backend="finset", basis="gluing", x=1, y=1))
        assert status == EXIT_CAPABILITY
        assert doc["error"]["code"] == "capability"

    def test_size_guard(self):
        """Test that oversized lattices exit with the size guard code"""
        doc, status = run(Request(command="homdim", backend="finset", x=4, y=4))
        assert status == EXIT_SIZE_GUARD
        assert doc["error"]["code"] == "size_guard"

    def test_private_settings(self):
        """Test that explicit settings apply their own guards"""
        _, status = run(Request(command="homdim", x=2, y=2), EngineSettings(opset_max_size=3))
        assert status == EXIT_SIZE_GUARD

    def test_parse_errors(self):
        """Test malformed and out-of-basis arguments"""
        doc, status = run(Request(command="compose", x=1, y=2, z=1, f="[[0,1,2]]", g="[[0,1],[2]]"))
        assert status == EXIT_INVALID
        assert doc["error"]["code"] == "parse"
        _, status = run(Request(command="omega", x=1, y=2, f="[0,0]"))
        assert status == EXIT_INVALID
        _, status = run(Request(command="compose", x=1, y=1, z=1, f="[[0],[1]]"))
        assert status == EXIT_INVALID


class TestMain:
    """Tests for main()"""

    def test_deterministic(self, capsys):
        """Test that repeated runs print identical documents"""
        argv = ["table", "--x", "1", "--basis", "round"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first

    def test_missing_arguments(self, capsys):
        """Test exit code 2 for missing flags"""
        doc, status = invoke(capsys, "compose", "--x", "1")
        assert status == EXIT_INVALID
        assert doc["error"]["code"] == "invalid_request"

    def test_invalid_request(self, capsys):
        """Test exit code 2 for a request pydantic rejects"""
        doc, status = invoke(capsys, "homdim", "--backend", "finset", "--degree", "t-power", "--x", "1", "--y", "1")
        assert status == EXIT_INVALID
        assert "t-power" in doc["error"]["message"]

    def test_omega(self, capsys):
        """Test ω of 3 ↠ 1"""
        doc, status = invoke(capsys, "omega", "--x", "3", "--y", "1", "--f", "[0]")
        assert status == EXIT_OK
        assert doc["omega"]["poly"] == [2, -3, 1]

    def test_mobius(self, capsys):
        """Test μ from the coarsest to the finest partition of 3"""
        doc, _ = invoke(capsys, "mobius", "--x", "3", "--u", "[[0,1,2]]", "--w", "[[0],[1],[2]]")
        assert doc["mu"] == 2
        doc, _ = invoke(capsys, "mobius", "--x", "3", "--with-mobius")
        assert doc["lattice"]["size"] == 5
        assert "mobius" in doc["lattice"]

    def test_decompose(self, capsys):
        """Test [1]*⊗[1]*⊗[1]* and [2] = ⊕[u]*"""
        doc, _ = invoke(capsys, "decompose", "--sizes", "1,1,1")
        assert len(doc["summands"]) == 5
        doc, _ = invoke(capsys, "decompose", "--x", "2")
        assert doc["kind"] == "subobject"
        assert len(doc["summands"]) == 2

    def test_verify(self, capsys):
        """Test a passing verification run"""
        doc, status = invoke(capsys, "verify", "--suite", "structure-constants", "--workers", "1")
        assert status == EXIT_OK
        assert doc["passed"] is True
        assert doc["suites"][0]["suite"] == "structure-constants"

    def test_verify_deterministic(self, capsys):
        """Test that repeated verify runs print identical documents"""
        argv = ["verify", "--suite", "structure-constants", "--suite", "dimensions", "--workers", "2"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first
        assert all("seconds" not in suite for suite in json.loads(first)["suites"])

    @pytest.mark.slow
    def test_verify_all(self, capsys):
        """Test that every suite passes at the configured bounds"""
        doc, status = invoke(capsys, "verify", "--all")
        assert doc["failures"] == 0, doc["suites"]
        assert status == EXIT_OK
        assert doc["passed"] is True
        assert [suite["suite"] for suite in doc["suites"]] == list(SUITES)

    def test_text_format(self, capsys):
        """Test the plain text rendering"""
        status = main(["compose", "--x", "1", "--y", "1", "--z", "1", "--f", "[[0],[1]]", "--g", "[[0],[1]]", "--format", "text"])
        out = capsys.readouterr().out
        assert status == EXIT_OK
        assert "command: \"compose\"" in out
        assert "t  rel=[[0],[1]]" in out

    def test_out_file(self, capsys, tmp_path):
        """Test writing the document to a file"""
        target = tmp_path / "homdim.json"
        status = main(["homdim", "--x", "1", "--y", "1", "--out", str(target)])
        assert status == EXIT_OK
        assert capsys.readouterr().out == ""
        assert json.loads(target.read_text(encoding="utf-8"))["dim"] == 2


class TestRenderText:
    """Tests for render_text"""

    def test_nested(self):
        """Test nesting and polynomial lines"""
        text = render_text({"a": 1, "b": {"poly": [-1, 1], "value": "2"}, "c": [{"d": [1, 2]}]})
        assert text == "a: 1\nb: -1 + t (= 2)\nc:\n  -\n    d: [1,2]\n"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
