"""
Tests for the JSON input parsers.
"""

import json
from fractions import Fraction

import pytest

from padic_polygon.arith.ratfun import DenseRatFun, FactoredRatFun
from padic_polygon.config import PolygonConfig
from padic_polygon.core.radii_engine import RadiiEngine
from padic_polygon.geometry.line import AffinoidDomain
from padic_polygon.parsers import (
    DomainParser,
    MatrixParser,
    OperatorParser,
    ParserError,
    ProfileParser,
    SchemaError,
    parse_inputs,
    read_prime,
)
from padic_polygon.parsers.system_parser import system_parser
from padic_polygon.storage import render_json


class TestSchemaError:
    """Test diagnostics."""

    def test_message_with_field(self):
        """Test path and field appear in the message."""
        err = SchemaError("missing required field", "op.json", "p")
        assert str(err) == "op.json [p]: missing required field"
        assert err.field == "p"

    def test_message_with_line(self):
        """Test the line number follows the path."""
        err = SchemaError("Expecting value", "op.json", line=3)
        assert str(err) == "op.json:3: Expecting value"

    def test_in_memory(self):
        """Test documents without a path."""
        assert str(SchemaError("bad", field="rank")) == "<memory> [rank]: bad"

    def test_hierarchy(self):
        """Test SchemaError is a ParserError."""
        assert issubclass(SchemaError, ParserError)


class TestReadPrime:
    """Test the residue characteristic lookup."""

    def test_from_document(self):
        """Test the "p" field."""
        assert read_prime({"p": 3}) == 3

    def test_override(self):
        """Test the override wins."""
        assert read_prime({"p": 3}, override=5) == 5

    def test_missing(self):
        """Test a document without p."""
        with pytest.raises(SchemaError) as excinfo:
            read_prime({}, "op.json")
        assert excinfo.value.field == "p"

    def test_not_prime(self):
        """Test composite p."""
        with pytest.raises(SchemaError, match="Not a prime"):
            read_prime({"p": 4})

    def test_not_a_number(self):
        """Test non-numeric p."""
        with pytest.raises(SchemaError):
            read_prime({"p": "three"})


class TestOperatorParser:
    """Test operator documents."""

    def test_parse(self, operator_payload):
        """Test the factored form."""
        op = OperatorParser(PolygonConfig()).parse(operator_payload)
        assert op.rank == 1
        assert op.g(1) == FactoredRatFun.const("-1/3")

    def test_dense_coefficient(self):
        """Test num/den coefficients."""
        op = OperatorParser().parse({"coeffs": [{"num": "-1", "den": "2*T"}]})
        assert op.g(1) == DenseRatFun.parse("-1", "2*T")

    def test_rank_mismatch(self, operator_payload):
        """Test the declared rank must match."""
        operator_payload["rank"] = 2
        with pytest.raises(SchemaError) as excinfo:
            OperatorParser().parse(operator_payload)
        assert excinfo.value.field == "rank"

    def test_empty(self):
        """Test an operator needs coefficients."""
        with pytest.raises(SchemaError):
            OperatorParser().parse({"coeffs": []})

    def test_bad_coefficient(self):
        """Test the offending coefficient is named."""
        with pytest.raises(SchemaError) as excinfo:
            OperatorParser().parse({"coeffs": [{"constant": "1"}, "x"]})
        assert excinfo.value.field == "coeffs[1]"

    def test_bad_rational(self):
        """Test malformed rationals are schema errors."""
        with pytest.raises(SchemaError) as excinfo:
            OperatorParser().parse({"coeffs": [{"constant": "one"}]})
        assert excinfo.value.field == "coeffs[0]"


class TestMatrixParser:
    """Test matrix documents."""

    def test_parse(self):
        """Test a rank-one matrix."""
        G = MatrixParser().parse({"rank": 1, "entries": [["1", "3"]]})
        assert G.entry(0, 0) == DenseRatFun.const("1/3")

    def test_missing_rank(self):
        """Test rank is required."""
        with pytest.raises(SchemaError) as excinfo:
            MatrixParser().parse({"entries": [["1", "3"]]})
        assert excinfo.value.field == "rank"

    def test_wrong_count(self):
        """Test the entry count is checked."""
        with pytest.raises(SchemaError) as excinfo:
            MatrixParser().parse({"rank": 2, "entries": [["1", "3"]]})
        assert excinfo.value.field == "entries"

    def test_dispatch(self):
        """Test the parser is picked from the keys."""
        assert isinstance(system_parser({"coeffs": []}), OperatorParser)
        assert isinstance(system_parser({"entries": []}), MatrixParser)
        with pytest.raises(SchemaError):
            system_parser({"rank": 1})


class TestDomainParser:
    """Test domain documents."""

    def test_disk(self):
        """Test a domain without holes."""
        X = DomainParser().parse({"outer": {"center": "0", "log_radius": "0"}})
        assert X == AffinoidDomain.disk()

    def test_annulus(self, fixtures_dir):
        """Test the annulus fixture."""
        X = DomainParser().load_and_parse(fixtures_dir / "annulus.json")
        assert X.holes == ((Fraction(0), Fraction(-1)),)

    def test_missing_outer(self):
        """Test the outer disk is required."""
        with pytest.raises(SchemaError) as excinfo:
            DomainParser().parse({"holes": []})
        assert excinfo.value.field == "outer"

    def test_incomplete_hole(self):
        """Test holes need both fields."""
        with pytest.raises(SchemaError) as excinfo:
            DomainParser().parse(
                {"outer": {"center": "0", "log_radius": "0"}, "holes": [{"center": "0"}]}
            )
        assert excinfo.value.field == "holes[0]"

    def test_hole_outside(self):
        """Test holes are validated once p is known."""
        data = {
            "outer": {"center": "0", "log_radius": "0"},
            "holes": [{"center": "1/3", "log_radius": "-2"}],
        }
        with pytest.raises(SchemaError, match="outside the outer disk"):
            DomainParser().parse(data, p=3)


class TestLoading:
    """Test reading files."""

    def test_missing_file(self, temp_dir):
        """Test a missing file is a ParserError, not a schema error."""
        with pytest.raises(ParserError) as excinfo:
            OperatorParser().load(temp_dir / "absent.json")
        assert not isinstance(excinfo.value, SchemaError)

    def test_invalid_json(self, temp_dir):
        """Test syntax errors carry the line number."""
        path = temp_dir / "broken.json"
        path.write_text('{\n  "p": 3,\n  "coeffs": [\n}\n', encoding="utf-8")
        with pytest.raises(SchemaError) as excinfo:
            OperatorParser().load(path)
        assert excinfo.value.line == 4

    def test_top_level_list(self, write_json):
        """Test documents must be objects."""
        with pytest.raises(SchemaError):
            OperatorParser().load(write_json("list.json", [1, 2]))


class TestParseInputs:
    """Test assembling a run's inputs."""

    def test_default_domain(self, fixtures_dir):
        """Test the unit disk is used when no domain is given."""
        inputs = parse_inputs(fixtures_dir / "operator.json", config=PolygonConfig())
        assert inputs.is_operator
        assert inputs.p == 3
        assert inputs.domain == AffinoidDomain.disk()
        assert inputs.paths == {"input": str(fixtures_dir / "operator.json")}

    def test_domain_file(self, fixtures_dir):
        """Test the domain file is read and recorded."""
        inputs = parse_inputs(
            fixtures_dir / "operator.json", fixtures_dir / "annulus.json", PolygonConfig()
        )
        assert len(inputs.domain.holes) == 1
        assert "domain" in inputs.paths

    def test_embedded_domain(self, write_json, operator_payload):
        """Test a "domain" field of the input file."""
        operator_payload["domain"] = {
            "outer": {"center": "0", "log_radius": "0"},
            "holes": [{"center": "0", "log_radius": "-1"}],
        }
        inputs = parse_inputs(write_json("op.json", operator_payload), config=PolygonConfig())
        assert inputs.domain.holes == ((Fraction(0), Fraction(-1)),)

    def test_prime_override(self, fixtures_dir):
        """Test the configured prime replaces the file's."""
        inputs = parse_inputs(fixtures_dir / "operator.json", config=PolygonConfig(prime=5))
        assert inputs.p == 5

    def test_missing_p(self, fixtures_dir):
        """Test a file without p and no override."""
        with pytest.raises(SchemaError) as excinfo:
            parse_inputs(fixtures_dir / "missing_p.json", config=PolygonConfig())
        assert excinfo.value.field == "p"

    def test_matrix(self, fixtures_dir):
        """Test matrices are accepted but are not operators."""
        inputs = parse_inputs(fixtures_dir / "matrix.json", config=PolygonConfig())
        assert not inputs.is_operator
        with pytest.raises(SchemaError, match="needs an operator"):
            inputs.operator()


class TestProfileParser:
    """Test reading profiles back."""

    def test_round_trip(self, write_json, constant_operator, annulus):
        """Test a written profile reads back with the same values."""
        profile = RadiiEngine().build_profile(constant_operator, annulus, 3)
        path = write_json("profile.json", json.loads(render_json(profile.to_dict())))
        clone = ProfileParser().load_and_parse(path)
        assert clone.rank == 1
        assert clone.vertices == profile.vertices

    def test_missing_field(self):
        """Test profile fields are required."""
        with pytest.raises(SchemaError) as excinfo:
            ProfileParser().parse({"p": 3, "rank": 1})
        assert excinfo.value.field == "domain"
