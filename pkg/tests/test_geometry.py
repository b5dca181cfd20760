"""
Tests for the geometry of square-type subspaces.
"""

import math

import pytest
from oracles import collinearity_diameter, f9_collinearity_diameter, point_census

from orthoverify.config import DEFAULT_CONFIG
from orthoverify.errors import (
    BudgetExceededError,
    EmptyFlagError,
    EvenCharacteristicError,
    FlagNotInGeometryError,
    InvalidPrimeError,
    UsageError,
)
from orthoverify.geometry import (
    Flag,
    build_geometry,
    build_geometry_on,
    collinearity_degree_check,
    collinearity_graph,
    connectivity,
    incidence_connectivity,
    incident,
    invariants,
    is_transversal,
    residual_connectivity,
    residue,
)
from orthoverify.ortho import SQUARE, classify, enumerate_subspaces, perp, span


class TestBuildGeometry:
    """Test geometry construction."""

    def test_planes_are_square_planes(self, geometry_2_5):
        """Test type-2 objects are exactly the square-type planes of F_5^3."""
        expected = enumerate_subspaces(geometry_2_5.ambient, 2, SQUARE)
        assert list(geometry_2_5.objects[2]) == expected

    def test_point_count_matches_oracle(self, geometry_3_5):
        """Test the point count against brute-force classification of all 156 points."""
        census = point_census(5, 4)
        assert sum(census.values()) == 156
        assert geometry_3_5.counts()[1] == census["square"]

    def test_perp_bijection(self, geometry_3_5):
        """Test square 3-spaces are the perps of square points."""
        assert geometry_3_5.counts()[3] == geometry_3_5.counts()[1]
        hyperplanes = set(geometry_3_5.objects[3])
        assert all(perp(p) in hyperplanes for p in geometry_3_5.objects[1])

    def test_every_object_is_square(self, geometry_3_5):
        """Test objects classify Square and have type equal to dimension."""
        for t, objects in geometry_3_5.objects.items():
            for w in objects:
                assert w.dim == t
                assert classify(w) == SQUARE

    def test_three_mod_four_needs_override(self):
        """Test q = 7 is refused without the override."""
        with pytest.raises(UsageError):
            build_geometry(2, 7)

    def test_three_mod_four_with_override(self):
        """Test the override is recorded in provenance."""
        g = build_geometry(2, 7, allow_minus_one_nonsquare=True)
        assert any("-1" in line for line in g.provenance)

    def test_even_characteristic(self):
        """Test even q is rejected."""
        with pytest.raises(EvenCharacteristicError):
            build_geometry(2, 4)

    def test_not_a_prime_power(self):
        """Test q = 21 is rejected."""
        with pytest.raises(InvalidPrimeError):
            build_geometry(2, 21)

    def test_rank_too_small(self):
        """Test n = 1 is rejected."""
        with pytest.raises(UsageError):
            build_geometry(1, 5)

    def test_budget(self):
        """Test construction above the subspace budget raises."""
        with pytest.raises(BudgetExceededError):
            build_geometry(3, 5, config=DEFAULT_CONFIG.override(max_subspaces=100))

    def test_summary(self, geometry_2_5):
        """Test the summary record."""
        summary = geometry_2_5.summary()
        assert summary["n"] == 2
        assert summary["q"] == 5
        assert set(summary["counts_per_type"]) == {"1", "2"}

    def test_chambers_of_plane_geometry(self, geometry_2_5):
        """Test every square line carries (q - 1)/2 = 2 square points."""
        chambers = list(geometry_2_5.chambers())
        assert len(chambers) == 2 * len(geometry_2_5.objects[2])


class TestIncidence:
    """Test incidence and flags."""

    def test_point_on_line(self, v5_3):
        """Test containment is incidence."""
        p = span(v5_3, [(1, 0, 0)])
        line = span(v5_3, [(1, 0, 0), (0, 1, 0)])
        assert incident(p, line)
        assert incident(line, p)
        assert incident(p, p)

    def test_distinct_points(self, v5_3):
        """Test two distinct points are not incident."""
        assert not incident(span(v5_3, [(1, 0, 0)]), span(v5_3, [(0, 1, 0)]))

    def test_point_off_line(self, v5_3):
        """Test a point outside a line is not incident to it."""
        assert not incident(span(v5_3, [(0, 0, 1)]), span(v5_3, [(1, 0, 0), (0, 1, 0)]))

    def test_flag_must_be_a_chain(self, v5_3):
        """Test flags reject non-nested members."""
        with pytest.raises(FlagNotInGeometryError):
            Flag((span(v5_3, [(0, 0, 1)]), span(v5_3, [(1, 0, 0), (0, 1, 0)])))

    def test_flag_sorted_by_type(self, v5_3):
        """Test flag members are ordered by dimension."""
        line = span(v5_3, [(1, 0, 0), (0, 1, 0)])
        point = span(v5_3, [(1, 0, 0)])
        assert Flag((line, point)).types == (1, 2)


class TestResidue:
    """Test residues and their comparison geometries."""

    def test_point_residue_counts(self, geometry_3_5):
        """Test every point residue matches the geometry on its perp."""
        for p in geometry_3_5.objects[1]:
            res = residue(geometry_3_5, Flag((p,)))
            assert len(res.factors) == 1
            factor = res.factors[0]
            on_perp = build_geometry_on(perp(p))
            assert factor.shifted_counts() == on_perp.counts()
            assert factor.matches_comparison()

    def test_line_residue_is_a_product(self, geometry_3_5):
        """Test a line splits its residue into points below and 3-spaces above."""
        line = geometry_3_5.objects[2][0]
        res = residue(geometry_3_5, Flag((line,)))
        assert [factor.types for factor in res.factors] == [(1,), (3,)]
        below, above = res.factors
        assert all(line.contains(p) for p in below.objects[1])
        assert all(w.contains(line) for w in above.objects[3])
        assert all(factor.matches_comparison() for factor in res.factors)

    def test_chamber_residue_is_empty(self, geometry_3_5):
        """Test the residue of a chamber has no objects."""
        chamber = next(geometry_3_5.chambers())
        res = residue(geometry_3_5, geometry_3_5.flag(chamber), with_comparison=False)
        assert res.is_empty

    def test_empty_flag(self, geometry_3_5):
        """Test the empty flag is rejected."""
        with pytest.raises(EmptyFlagError):
            residue(geometry_3_5, Flag(()))

    def test_flag_outside_geometry(self, geometry_3_5):
        """Test a nonsquare point is not a flag of the geometry."""
        nonsquare = span(geometry_3_5.ambient, [(1, 1, 0, 0)])
        with pytest.raises(FlagNotInGeometryError):
            residue(geometry_3_5, Flag((nonsquare,)))

    @pytest.mark.slow
    def test_point_residue_counts_over_f9(self):
        """Test the residue count identity for n = 3, q = 9."""
        g = build_geometry(3, 9)
        for p in g.objects[1]:
            factor = residue(g, Flag((p,))).factors[0]
            assert factor.shifted_counts() == factor.comparison.counts()

    def test_invariants(self, geometry_2_5):
        """Test invariants carry counts and a degree multiset."""
        result = invariants(geometry_2_5)
        assert result["counts"] == geometry_2_5.counts()
        assert len(result["degrees"]) == len(geometry_2_5.vertices)


class TestCollinearity:
    """Test the collinearity graph, connectivity and diameter."""

    def test_diameter_two_for_n3(self, geometry_3_5):
        """Test n = 3, q = 5 is connected of diameter 2."""
        result = connectivity(collinearity_graph(geometry_3_5))
        assert result.connected
        assert result.diameter == 2 == collinearity_diameter(5, 4)

    @pytest.mark.parametrize("q", [9, 13])
    def test_diameter_bound_for_n2(self, q):
        """Test n = 2 is connected of diameter at most 3 for q = 9, 13."""
        result = connectivity(collinearity_graph(build_geometry(2, q)))
        assert result.connected
        assert result.diameter <= 3

    def test_diameter_against_oracle(self):
        """Test n = 2, q = 13 against the brute-force BFS."""
        result = connectivity(collinearity_graph(build_geometry(2, 13)))
        assert result.diameter == collinearity_diameter(13, 3)

    def test_extension_field_against_oracle(self):
        """Test n = 2, q = 9 against a BFS over Z_3[i]."""
        result = connectivity(collinearity_graph(build_geometry(2, 9)))
        assert result.diameter == f9_collinearity_diameter(3)

    def test_small_field_matches_oracle(self, geometry_2_5):
        """Test n = 2, q = 5, where only the computed value is recorded."""
        result = connectivity(collinearity_graph(geometry_2_5))
        oracle = collinearity_diameter(5, 3)
        assert result.diameter == oracle
        assert result.connected == (not math.isinf(oracle))

    def test_degree_cross_check(self, geometry_2_5, geometry_3_5):
        """Test degrees agree with counts through square lines."""
        assert collinearity_degree_check(geometry_2_5).consistent
        assert collinearity_degree_check(geometry_3_5).consistent

    def test_adjacency_is_square_span(self, geometry_2_5):
        """Test adjacent points span a type-2 object."""
        graph = collinearity_graph(geometry_2_5)
        for v, nbrs in enumerate(graph.adjacency):
            for u in nbrs:
                line = span(geometry_2_5.ambient, [graph.vertices[v].basis[0], graph.vertices[u].basis[0]])
                assert line in geometry_2_5

    def test_incidence_connected(self, geometry_3_5):
        """Test the incidence graph over all types is connected."""
        assert incidence_connectivity(geometry_3_5).connected


class TestTransversality:
    """Test flag extension and residual connectivity."""

    def test_plane_geometry(self, geometry_2_5):
        """Test n = 2, q = 5 is transversal."""
        assert is_transversal(geometry_2_5).transversal

    def test_space_geometry(self, geometry_3_5):
        """Test n = 3, q = 5 is transversal."""
        result = is_transversal(geometry_3_5)
        assert result.transversal
        assert result.counterexample is None

    def test_rank_one(self, geometry_2_5):
        """Test a rank-1 structure is trivially transversal."""
        line = geometry_2_5.objects[2][0]
        assert is_transversal(build_geometry_on(line)).transversal

    def test_residual_connectivity_counts_residues(self, geometry_3_5):
        """Test n = 3 checks the residue of every single object."""
        result = residual_connectivity(geometry_3_5)
        assert result.residues_checked == len(geometry_3_5.vertices)
