"""
Tests for the radii profile audit.
"""

from fractions import Fraction

import pytest

from padic_polygon.arith.scalars import NEG_INF
from padic_polygon.core.audit import CHECKS, audit_main_theorem
from padic_polygon.core.radii_engine import RadiiEngine
from padic_polygon.geometry.line import Point
from padic_polygon.geometry.piecewise import PAF, Piece


@pytest.fixture
def engine() -> RadiiEngine:
    """Engine with default configuration."""
    return RadiiEngine()


class TestAudit:
    """Test the structural checks on engine output."""

    def test_disk(self, engine, constant_operator, unit_disk):
        """Test a single-vertex profile passes."""
        profile = engine.build_profile(constant_operator, unit_disk, 3)
        report = audit_main_theorem(profile)
        assert report.passed
        assert report.violations == 0
        assert report.exceptional == {1: []}

    def test_annulus(self, engine, constant_operator, annulus):
        """Test a constant radius along the skeleton passes."""
        profile = engine.build_profile(constant_operator, annulus, 3)
        assert audit_main_theorem(profile, annulus, 3).passed

    def test_branch_to_pole(self, engine, fuchsian_operator, unit_disk):
        """Test the solvable end point goes into the exceptional set."""
        profile = engine.build_profile(fuchsian_operator, unit_disk, 2)
        report = audit_main_theorem(profile)
        assert report.passed
        assert report.exceptional[1] == [Point.type1(0)]
        assert report.nu == 1

    def test_radius_above_maximal_disk(self, engine, constant_operator, annulus):
        """Test a radius larger than the maximal disk is reported."""
        profile = engine.build_profile(constant_operator, annulus, 3)
        profile.vertices[Point.of(0, -1)].radii = [Fraction(1, 2)]
        report = audit_main_theorem(profile)
        assert not report.passed
        assert not report.checks["sandwich"].passed
        assert not report.checks["spectral_agreement"].passed
        assert report.violations >= 2

    def test_dict_form(self, engine, constant_operator, unit_disk):
        """Test the JSON shape."""
        data = audit_main_theorem(engine.build_profile(constant_operator, unit_disk, 3)).to_dict()
        assert data["passed"] is True
        assert data["violations"] == 0
        assert data["exceptional"] == {"1": []}
        assert list(data["checks"]) == list(CHECKS)

    def test_branch_kink_at_subtree_level(self, engine, fuchsian_operator, unit_disk):
        """Test a convex kink on a branch fails even where a subtree vertex has the same radius."""
        profile = engine.build_profile(fuchsian_operator, unit_disk, 2)
        profile.singular = []
        (edge,) = [e for e, data in profile.edges.items() if not data.skeletal]
        profile.vertices[edge.lower].radii = [Fraction(-1)]
        profile.edges[edge].heights = [
            PAF((
                Piece(NEG_INF, Fraction(-1), Fraction(1), Fraction(-2), True),
                Piece(Fraction(-1), Fraction(0), Fraction(2), Fraction(-1), True),
            ))
        ]
        report = audit_main_theorem(profile)
        assert not report.checks["concavity_branches"].passed
