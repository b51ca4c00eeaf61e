"""
Tests for Berkovich points, affinoid domains and skeleton graphs.
"""

from fractions import Fraction

import pytest

from padic_polygon.arith.scalars import NEG_INF
from padic_polygon.errors import DomainMembershipError, PreconditionError
from padic_polygon.geometry.line import (
    INFINITY,
    AffinoidDomain,
    DirectionId,
    Edge,
    Point,
    SkeletonGraph,
    canonical_point,
    canonical_residue,
    candidate_graph,
    direction_of,
    dominates,
    generic_radius,
    is_member,
    lambda_point,
    maximal_radius,
    minimal_triangulation,
    on_skeleton,
    point_eq,
    skeleton,
    skeleton_valence,
)


@pytest.fixture
def two_holes() -> AffinoidDomain:
    """Unit disk minus two disjoint holes meeting at x_{0,-1} for p = 3."""
    return AffinoidDomain.build(("0", "0"), [("0", "-2"), ("3", "-2")])


class TestPoint:
    """Test Point construction and labels."""

    def test_label(self):
        """Test the x_{c,L} label."""
        assert Point.of("1/2", -1).label == "x_{1/2,-1}"
        assert Point.type1(0).label == "x_{0,-inf}"

    def test_type1(self):
        """Test type-1 detection."""
        assert Point.type1(3).is_type1
        assert not Point.of(3, 0).is_type1

    def test_dict_form(self):
        """Test the JSON shape."""
        x = Point.of(3, "-1/2")
        assert x.to_dict() == {"center": "3", "log_radius": "-1/2"}
        assert Point.from_dict(x.to_dict()) == x

    def test_point_eq(self):
        """Test equality of closed disks."""
        assert point_eq(Point.of(0, -1), Point.of(3, -1), 3)
        assert not point_eq(Point.of(0, -1), Point.of(1, -1), 3)
        assert not point_eq(Point.of(0, -1), Point.of(0, -2), 3)

    def test_dominates(self):
        """Test disk inclusion."""
        assert dominates(Point.of(0, 0), Point.of(1, -1), 3)
        assert not dominates(Point.of(0, -1), Point.of(1, -2), 3)
        assert dominates(Point.of(0, 0), Point.type1(5), 3)

    def test_canonical_residue(self):
        """Test representatives modulo p^k."""
        assert canonical_residue(3, 2, 3) == 3
        assert canonical_residue(5, 1, 3) == 2
        assert canonical_residue(9, 2, 3) == 0

    def test_canonical_point(self):
        """Test equal disks get the same representative."""
        assert canonical_point(Point.of(4, 0), 3) == canonical_point(Point.of(1, 0), 3)
        assert canonical_point(Point.type1(7), 3) == Point.type1(7)

    def test_lambda_point(self):
        """Test λ_x moves up the segment and stops at x."""
        assert lambda_point(Point.of(0, -2), Fraction(-1)) == Point.of(0, -1)
        assert lambda_point(Point.of(0, -2), Fraction(-3)) == Point.of(0, -2)
        assert lambda_point(Point.type1(1), Fraction(0)) == Point.of(1, 0)

    def test_generic_radius(self):
        """Test r(x) for rational centers."""
        assert generic_radius(Point.of(2, "-1/2")) == Fraction(-1, 2)
        assert generic_radius(Point.type1(2)) == NEG_INF


class TestAffinoidDomain:
    """Test domain construction, validation and membership."""

    def test_disk(self, unit_disk):
        """Test the closed disk has no holes."""
        assert unit_disk.root == Point.of(0, 0)
        assert unit_disk.holes == ()

    def test_dict_form(self, annulus):
        """Test the JSON shape."""
        data = annulus.to_dict()
        assert data["outer"] == {"center": "0", "log_radius": "0"}
        assert data["holes"] == [{"center": "0", "log_radius": "-1"}]
        assert AffinoidDomain.from_dict(data) == annulus

    def test_validate_large_hole(self):
        """Test a hole larger than the outer disk is rejected."""
        X = AffinoidDomain.build(("0", "0"), [("0", "1")])
        with pytest.raises(DomainMembershipError):
            X.validate(3)

    def test_validate_hole_outside(self):
        """Test a hole centred outside the outer disk is rejected."""
        X = AffinoidDomain.build(("0", "-1"), [("1", "-2")])
        with pytest.raises(DomainMembershipError):
            X.validate(3)

    def test_validate_overlapping_holes(self):
        """Test overlapping holes are rejected."""
        X = AffinoidDomain.build(("0", "0"), [("0", "-1"), ("9", "-2")])
        with pytest.raises(DomainMembershipError):
            X.validate(3)

    def test_membership(self, annulus):
        """Test points in and out of the annulus."""
        assert is_member(Point.of(0, "-1/2"), annulus, 3)
        assert is_member(Point.of(0, -1), annulus, 3)
        assert not is_member(Point.of(0, -2), annulus, 3)
        assert is_member(Point.type1(3), annulus, 3)
        assert not is_member(Point.of(0, 1), annulus, 3)

    def test_maximal_radius(self, annulus):
        """Test the largest open disk around a point."""
        assert maximal_radius(Point.of(0, "-1/2"), annulus, 3) == Fraction(-1, 2)
        assert maximal_radius(Point.of(1, -1), annulus, 3) == 0

    def test_maximal_radius_outside(self, annulus):
        """Test points outside X are rejected."""
        with pytest.raises(DomainMembershipError):
            maximal_radius(Point.of(0, -2), annulus, 3)


class TestSkeleton:
    """Test the analytic skeleton and its triangulation."""

    def test_on_skeleton(self, annulus):
        """Test membership in Γ_X."""
        assert on_skeleton(Point.of(0, "-1/2"), annulus, 3)
        assert on_skeleton(Point.of(0, 0), annulus, 3)
        assert not on_skeleton(Point.of(1, -1), annulus, 3)

    def test_valence(self, annulus):
        """Test N_X on the annulus."""
        assert skeleton_valence(Point.of(0, "-1/2"), annulus, 3) == 2
        assert skeleton_valence(Point.of(0, 0), annulus, 3) == 1
        assert skeleton_valence(Point.of(0, -1), annulus, 3) == 1
        assert skeleton_valence(Point.of(1, -1), annulus, 3) == 0

    def test_valence_at_meeting_point(self, two_holes):
        """Test a bifurcation of Γ_X."""
        assert skeleton_valence(Point.of(0, -1), two_holes, 3) == 3

    def test_triangulation(self, annulus, two_holes):
        """Test S_X lists boundary and meeting points."""
        assert minimal_triangulation(annulus, 3) == [Point.of(0, -1), Point.of(0, 0)]
        assert minimal_triangulation(two_holes, 3) == [
            Point.of(0, -2),
            Point.of(3, -2),
            Point.of(0, -1),
            Point.of(0, 0),
        ]

    def test_skeleton_graph(self, two_holes):
        """Test the saturated tree."""
        graph = skeleton(two_holes, 3)
        assert graph.is_tree()
        assert len(graph.vertices()) == 4
        assert len(graph.edges()) == 3
        assert graph.bifurcations() == [Point.of(0, -1)]
        assert graph.leaves() == [Point.of(0, -2), Point.of(3, -2)]
        assert graph.parent(Point.of(0, -1)) == Point.of(0, 0)

    def test_disk_skeleton_is_a_point(self, unit_disk):
        """Test Γ_X of a disk has no edges."""
        graph = skeleton(unit_disk, 3)
        assert graph.vertices() == [Point.of(0, 0)]
        assert graph.edges() == []


class TestDirections:
    """Test tangent directions."""

    def test_down_direction(self):
        """Test a residue disk below x_{0,0}."""
        assert direction_of(Point.of(0, 0), 5, 3) == DirectionId("down", Fraction(2), Fraction(0))

    def test_infinity_direction(self):
        """Test targets outside the disk."""
        assert direction_of(Point.of(0, 0), Fraction(1, 3), 3) == INFINITY
        assert direction_of(Point.of(0, 0), "inf", 3) == INFINITY

    def test_type1_self_direction(self):
        """Test a type-1 point has no direction to itself."""
        with pytest.raises(PreconditionError):
            direction_of(Point.type1(0), 0, 3)

    def test_str(self):
        """Test printed forms."""
        assert str(INFINITY) == "inf"
        assert str(DirectionId("down", Fraction(2), Fraction(0))) == "down(2@0)"


class TestSkeletonGraph:
    """Test graph queries and edits."""

    def test_candidate_graph(self, unit_disk):
        """Test a root adds a type-1 leaf."""
        graph = candidate_graph(unit_disk, [Fraction(0)], 3)
        assert graph.edges() == [Edge(Point.type1(0), Point.of(0, 0))]

    def test_candidate_graph_skips_outside_roots(self, unit_disk):
        """Test roots outside X are ignored."""
        graph = candidate_graph(unit_disk, [Fraction(1, 3)], 3)
        assert graph.edges() == []

    def test_locate(self, unit_disk):
        """Test finding points on the graph."""
        graph = candidate_graph(unit_disk, [Fraction(0)], 3)
        edge = graph.edges()[0]
        assert graph.locate(Point.of(0, -1)) == (edge, Fraction(-1))
        assert graph.locate(Point.of(0, 0)) == Point.of(0, 0)
        assert graph.locate(Point.of(1, -1)) is None

    def test_retraction_radius(self, unit_disk):
        """Test the first graph point towards infinity."""
        graph = candidate_graph(unit_disk, [Fraction(0)], 3)
        assert graph.retraction_radius(Point.of(1, -1)) == 0
        assert graph.retraction_radius(Point.of(3, -2)) == -1
        assert graph.retraction_radius(Point.of(0, -5)) == -5

    def test_split_edge(self, unit_disk):
        """Test inserting a vertex inside an edge."""
        graph = candidate_graph(unit_disk, [Fraction(0)], 3)
        edge = graph.edges()[0]
        mid = graph.split_edge(edge, Fraction(-1))
        assert mid == Point.of(0, -1)
        assert len(graph.edges()) == 2
        assert graph.subtree(mid) == {mid, Point.type1(0)}

    def test_split_edge_outside(self, unit_disk):
        """Test splitting at an end point is rejected."""
        graph = candidate_graph(unit_disk, [Fraction(0)], 3)
        with pytest.raises(PreconditionError):
            graph.split_edge(graph.edges()[0], Fraction(0))

    def test_edge_geometry(self):
        """Test edge bounds and labels."""
        edge = Edge(Point.type1(0), Point.of(0, 0))
        assert edge.lo == NEG_INF
        assert edge.hi == 0
        assert edge.point_at(Fraction(-2)) == Point.of(0, -2)
        assert edge.label == "x_{0,-inf}--x_{0,0}"

    def test_dict_form(self, two_holes):
        """Test graphs reload from their JSON shape."""
        graph = skeleton(two_holes, 3)
        clone = SkeletonGraph.from_dict(graph.to_dict(), 3)
        assert clone.vertices() == graph.vertices()
        assert clone.edges() == graph.edges()
