"""
Tests for operators, spectral polygons, the radius oracle and cyclic vectors.
"""

from fractions import Fraction

import pytest

from padic_polygon.arith.ratfun import DenseRatFun, FactoredRatFun, Poly
from padic_polygon.arith.scalars import NEG_INF, POS_INF
from padic_polygon.errors import CyclicVectorError, PreconditionError
from padic_polygon.geometry.line import Point
from padic_polygon.polygons.spectral import (
    ConnectionMatrix,
    DifferentialOperator,
    certify_slopes_along,
    companion_matrix,
    cyclic_operator,
    direct_sum_matrix,
    direct_sum_operator,
    direct_sum_radii,
    radius_oracle,
    small_radius_certify,
    spectral_polygon_at,
    spectral_profile_along,
    spectral_radii_at,
    spectral_slopes_along,
    spectral_values,
    taylor_matrix_seq,
    verify_cyclic,
)


@pytest.fixture
def rank_two_operator() -> DifferentialOperator:
    """d^2 - d - 1/2, spectral at x_{0,0} for p = 2."""
    return DifferentialOperator.build([FactoredRatFun.const(-1), FactoredRatFun.const("-1/2")])


class TestDifferentialOperator:
    """Test operator construction and conversion."""

    def test_rank_and_coefficients(self, rank_two_operator):
        """Test g_i lookup."""
        assert rank_two_operator.rank == 2
        assert rank_two_operator.g(2).constant == Fraction(-1, 2)

    def test_empty_rejected(self):
        """Test rank 0 is rejected."""
        with pytest.raises(PreconditionError):
            DifferentialOperator.build([])

    def test_roots(self, fuchsian_operator):
        """Test zeros and poles of the coefficients."""
        assert fuchsian_operator.roots() == [Fraction(0)]

    def test_factored_from_dense(self):
        """Test dense coefficients are split over Q."""
        op = DifferentialOperator.build([DenseRatFun.parse("-1", "2T")]).factored()
        assert op.is_factored
        assert op.g(1) == FactoredRatFun.build("-1/2", [(0, -1)])

    def test_factored_rejects_irrational_roots(self):
        """Test a coefficient with no rational splitting."""
        op = DifferentialOperator.build([DenseRatFun.parse("1", "T^2 + 1")])
        with pytest.raises(PreconditionError):
            op.factored()

    def test_dict_form(self, constant_operator):
        """Test the JSON shape."""
        data = constant_operator.to_dict()
        assert data == {"rank": 1, "coeffs": [{"constant": "-1/3", "factors": []}]}
        assert DifferentialOperator.from_dict(data) == constant_operator

    def test_rank_mismatch(self):
        """Test the declared rank must match the coefficients."""
        with pytest.raises(PreconditionError):
            DifferentialOperator.from_dict({"rank": 2, "coeffs": [{"constant": "1"}]})

    def test_dense_dict(self):
        """Test dense coefficients read from num/den."""
        op = DifferentialOperator.from_dict({"coeffs": [{"num": "1", "den": "T"}]})
        assert op.g(1) == DenseRatFun.parse("1", "T")


class TestConnectionMatrix:
    """Test matrix construction."""

    def test_flat_entries(self):
        """Test the flat [num, den] list."""
        G = ConnectionMatrix.from_dict({"rank": 2, "entries": [["0", "1"], ["1", "1"], ["1", "T"], ["0", "1"]]})
        assert G.entry(0, 1) == DenseRatFun.const(1)
        assert G.entry(1, 0) == DenseRatFun.parse("1", "T")

    def test_nested_entries(self):
        """Test the row-by-row form."""
        G = ConnectionMatrix.from_dict(
            {"rank": 2, "entries": [[["0", "1"], ["1", "1"]], [["1", "T"], ["0", "1"]]]}
        )
        assert G.entry(1, 0) == DenseRatFun.parse("1", "T")

    def test_wrong_entry_count(self):
        """Test the entry count must be rank squared."""
        with pytest.raises(PreconditionError):
            ConnectionMatrix.from_dict({"rank": 2, "entries": [["0", "1"]]})

    def test_not_square(self):
        """Test ragged rows are rejected."""
        with pytest.raises(PreconditionError):
            ConnectionMatrix.from_rows([[0, 1], [1]])

    def test_companion(self, rank_two_operator):
        """Test the companion layout."""
        G = companion_matrix(rank_two_operator)
        assert G.entry(0, 0).is_zero
        assert G.entry(0, 1) == DenseRatFun.const(1)
        assert G.entry(1, 0) == DenseRatFun.const("1/2")
        assert G.entry(1, 1) == DenseRatFun.const(1)


class TestSpectralPolygon:
    """Test the spectral polygon at a point."""

    def test_values(self, rank_two_operator):
        """Test v_i = i·log ω - log|g_i|."""
        assert spectral_values(rank_two_operator, Point.of(0, 0), 2) == [0, -1, -3]

    def test_polygon_and_certification(self, rank_two_operator):
        """Test both slopes lie in Young's range."""
        x = Point.of(0, 0)
        np_ = spectral_polygon_at(rank_two_operator, x, 2)
        radii = small_radius_certify(np_, x, 2)
        assert radii.values == (Fraction(-3, 2), Fraction(-3, 2))
        assert radii.statuses() == ["certified", "certified"]
        assert radii.heights() == [0, Fraction(-3, 2), -3]

    def test_constant_operator(self, constant_operator):
        """Test log R = log ω - log|1/3| for p = 3."""
        radii = spectral_radii_at(constant_operator, Point.of(0, 0), 3)
        assert radii.values == (Fraction(-3, 2),)
        assert radii.all_certified

    def test_truncated_value(self):
        """Test a slope at the Young bound stays uncertified."""
        op = DifferentialOperator.build([FactoredRatFun.const(-1)])
        radii = spectral_radii_at(op, Point.of(0, 0), 3)
        assert radii.values == (Fraction(-1, 2),)
        assert radii.statuses() == ["undetermined"]
        assert radii.certified_prefix() == 0

    def test_zero_coefficient(self):
        """Test an infinite slope is certified solvable at r(x)."""
        op = DifferentialOperator.build([FactoredRatFun.zero()])
        radii = spectral_radii_at(op, Point.of(0, -1), 3)
        assert radii.values == (-1,)
        assert radii.statuses() == ["solvable"]

    def test_pole_rejected(self, fuchsian_operator):
        """Test type-1 poles have no polygon."""
        with pytest.raises(PreconditionError):
            spectral_values(fuchsian_operator, Point.type1(0), 2)

    def test_type1_certification_rejected(self, constant_operator):
        """Test Young needs a positive radius."""
        np_ = spectral_polygon_at(constant_operator, Point.type1(1), 3)
        with pytest.raises(PreconditionError):
            small_radius_certify(np_, Point.type1(1), 3)

    def test_dict_form(self, constant_operator):
        """Test the JSON shape of a radii list."""
        data = spectral_radii_at(constant_operator, Point.of(0, 0), 3).to_dict()
        assert data == {
            "at": {"center": "0", "log_radius": "0"},
            "values": ["-3/2"],
            "status": ["certified"],
        }


class TestSpectralProfiles:
    """Test slope profiles along a segment."""

    def test_constant_profile(self, constant_operator):
        """Test the slope is constant and certified on [-1, 0]."""
        interval = (Fraction(-1), Fraction(0))
        raw = spectral_slopes_along(constant_operator, 0, interval, 3)
        (s,) = certify_slopes_along(raw, interval, 3)
        assert s.is_exact
        assert s.eval(Fraction(-1, 2)) == Fraction(-3, 2)

    def test_branch_profile(self, fuchsian_operator):
        """Test s_1 = L - 2 down to the pole."""
        interval = (NEG_INF, Fraction(0))
        raw = spectral_slopes_along(fuchsian_operator, 0, interval, 2)
        (s,) = certify_slopes_along(raw, interval, 2)
        assert s.is_exact
        assert s.eval(Fraction(-1)) == -3
        assert s.eval(NEG_INF) == NEG_INF

    def test_truncated_profile(self):
        """Test slopes at the Young bound are replaced by min(s, L), inexact."""
        op = DifferentialOperator.build([FactoredRatFun.const(-1)])
        interval = (Fraction(-1), Fraction(0))
        (s,) = certify_slopes_along(spectral_slopes_along(op, 0, interval, 3), interval, 3)
        assert not s.is_exact
        assert s.eval(Fraction(-1)) == -1
        assert s.eval(Fraction(0)) == Fraction(-1, 2)

    def test_zero_coefficient_profile(self):
        """Test infinite slopes give the diagonal."""
        op = DifferentialOperator.build([FactoredRatFun.zero()])
        interval = (Fraction(-1), Fraction(0))
        (s,) = certify_slopes_along(spectral_slopes_along(op, 0, interval, 3), interval, 3)
        assert s.eval(Fraction(-1, 2)) == Fraction(-1, 2)
        assert s.is_exact

    def test_partial_heights(self, constant_operator):
        """Test h_1 = s_1 for a rank-one operator."""
        (h,) = spectral_profile_along(constant_operator, 0, (Fraction(-1), Fraction(0)), 3)
        assert h.is_exact
        assert h.eval(Fraction(-1)) == Fraction(-3, 2)
        assert h.eval(Fraction(0)) == Fraction(-3, 2)


class TestDirectSums:
    """Test direct sums of systems and operators."""

    def test_block_matrix(self):
        """Test the blocks sit on the diagonal."""
        G = direct_sum_matrix(ConnectionMatrix.from_rows([["1/3"]]), ConnectionMatrix.from_rows([["1/2"]]))
        assert G.rank == 2
        assert G.entry(0, 0) == DenseRatFun.const("1/3")
        assert G.entry(1, 1) == DenseRatFun.const("1/2")
        assert G.entry(0, 1).is_zero
        assert G.entry(1, 0).is_zero

    def test_radii_union(self):
        """Test radii merge with multiplicities."""
        merged = direct_sum_radii([Fraction(-1), Fraction(0)], [Fraction(-1), NEG_INF])
        assert merged == [NEG_INF, Fraction(-1), Fraction(-1), Fraction(0)]

    def test_operator(self):
        """Test (d - 1/3) ⊕ (d - 1/2) is (d - 1/3)(d - 1/2)."""
        op = direct_sum_operator(
            DifferentialOperator.build([FactoredRatFun.const("-1/3")]),
            DifferentialOperator.build([FactoredRatFun.const("-1/2")]),
        )
        assert op.rank == 2
        assert op.g(1) == FactoredRatFun.const("-5/6")
        assert op.g(2) == FactoredRatFun.const("1/6")


class TestRadiusOracle:
    """Test the Taylor-coefficient estimate."""

    def test_taylor_sequence(self):
        """Test G_n for a constant matrix."""
        seq = taylor_matrix_seq(ConnectionMatrix.from_rows([["1/3"]]), 2)
        assert len(seq) == 3
        assert seq[0].entry(0, 0) == DenseRatFun.const(1)
        assert seq[2].entry(0, 0) == DenseRatFun.const("1/9")

    def test_window_minimum(self):
        """Test the tail minimum over n in [2, 4]."""
        G = ConnectionMatrix.from_rows([["1/3"]])
        assert radius_oracle(G, Point.of(0, 0), 4, 3) == Fraction(-4, 3)

    def test_estimate_above_true_radius(self):
        """Test the estimate never undershoots log R = -3/2."""
        G = ConnectionMatrix.from_rows([["1/3"]])
        assert radius_oracle(G, Point.of(0, 0), 20, 3) >= Fraction(-3, 2)

    def test_zero_matrix(self):
        """Test a vanishing tail gives +inf."""
        assert radius_oracle(ConnectionMatrix.zero(1), Point.of(0, 0), 4, 3) == POS_INF

    def test_pole(self):
        """Test a type-1 pole is rejected."""
        G = ConnectionMatrix.from_rows([[DenseRatFun.parse("1", "T")]])
        with pytest.raises(PreconditionError):
            radius_oracle(G, Point.type1(0), 4, 3)

    def test_pole_inside_disk(self):
        """Test a pole at T = 1 inside D^+(0, 3) is rejected."""
        G = ConnectionMatrix.from_rows([[DenseRatFun.parse("1", "3T - 3")]])
        with pytest.raises(PreconditionError):
            radius_oracle(G, Point.of(0, 1), 8, 3)

    def test_pole_outside_disk(self):
        """Test a pole at T = 1 outside D^+(0, |3|) is accepted."""
        G = ConnectionMatrix.from_rows([[DenseRatFun.parse("1", "3T - 3")]])
        assert radius_oracle(G, Point.of(0, -1), 8, 3) > NEG_INF


class TestCyclicVector:
    """Test the cyclic-vector transform."""

    def test_rank_one(self):
        """Test Y' = (1/3)Y gives d - 1/3."""
        G = ConnectionMatrix.from_rows([["1/3"]])
        op, cert = cyclic_operator(G)
        assert op.g(1) == DenseRatFun.const("-1/3")
        assert cert.attempt == 0
        assert verify_cyclic(G, op, cert)

    def test_companion_round_trip(self, rank_two_operator):
        """Test the first unit vector recovers the operator."""
        G = companion_matrix(rank_two_operator)
        op, cert = cyclic_operator(G)
        assert op.g(1) == DenseRatFun.const(-1)
        assert op.g(2) == DenseRatFun.const("-1/2")
        assert verify_cyclic(G, op, cert)

    def test_schedule_exhausted(self):
        """Test constant vectors are never cyclic for the zero connection."""
        with pytest.raises(CyclicVectorError):
            cyclic_operator(ConnectionMatrix.zero(2), max_attempts=2)

    def test_later_candidate(self):
        """Test (1, T) is found for the zero connection."""
        op, cert = cyclic_operator(ConnectionMatrix.zero(2))
        assert cert.attempt == 3
        assert cert.vector == (DenseRatFun.const(1), DenseRatFun.build(Poly.of(0, 1)))
        assert all(g.is_zero for g in op.coefficients)

    def test_rational_round_trip(self):
        """Test entries with poles go through the cleared-denominator rows."""
        source = DifferentialOperator.build([DenseRatFun.parse("1", "T"), DenseRatFun.parse("-1", "T^2")])
        G = companion_matrix(source)
        op, cert = cyclic_operator(G)
        assert cert.attempt == 0
        assert op.g(1) == DenseRatFun.parse("1", "T")
        assert op.g(2) == DenseRatFun.parse("-1", "T^2")
        assert verify_cyclic(G, op, cert)

    def test_preferred_vector_first(self):
        """Test a preferred vector is tried before the schedule."""
        op, cert = cyclic_operator(ConnectionMatrix.zero(2), preferred=[Poly.one(), Poly.of(0, 1)])
        assert cert.attempt == 0
        assert cert.vector == (DenseRatFun.const(1), DenseRatFun.build(Poly.of(0, 1)))

    def test_preferred_vector_not_cyclic(self):
        """Test the schedule still runs after a preferred vector that is not cyclic."""
        op, cert = cyclic_operator(ConnectionMatrix.zero(2), preferred=[Poly.one(), Poly()])
        assert cert.attempt == 3
        assert verify_cyclic(ConnectionMatrix.zero(2), op, cert)

    def test_rank_cap(self):
        """Test the rank cap."""
        with pytest.raises(PreconditionError):
            cyclic_operator(ConnectionMatrix.zero(5), rank_cap=4)
