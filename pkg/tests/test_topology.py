"""
Tests for the incidence complex, homology, presentations and coset enumeration.
"""

import pytest

from orthoverify.config import DEFAULT_CONFIG
from orthoverify.cosets import OutcomeKind, coset_enumerate
from orthoverify.errors import (
    BudgetExceededError,
    DisconnectedComplexError,
    NotATriangleError,
    UsageError,
)
from orthoverify.geometry import build_geometry, collinearity_graph
from orthoverify.ortho import SQUARE, classify, join
from orthoverify.snf import invariant_factors, smith_normal_form
from orthoverify.topology import (
    GroupPresentation,
    TwoComplex,
    abelianization,
    betti_numbers,
    boundary_composition_vanishes,
    embed_in_square_object,
    homology_h1,
    incidence_complex,
    parse_presentation,
    pi1_presentation,
    pi1_presentations,
    sample_collinear_triples,
    seven_vertex_torus,
    simplify_presentation,
    six_vertex_projective_plane,
    survey_triangles,
    tetrahedron_boundary,
    triangle_geometric,
)

FIXTURES = {
    "tetrahedron": tetrahedron_boundary,
    "torus": seven_vertex_torus,
    "projective_plane": six_vertex_projective_plane,
}


class TestSmithNormalForm:
    """Test Smith normal form."""

    def test_coprime_diagonal(self):
        """Test diag(2, 3) has invariant factors 1, 6."""
        assert smith_normal_form([[2, 0], [0, 3]]) == [1, 6]

    def test_rank_deficient(self):
        """Test zeros come last."""
        assert smith_normal_form([[1, 0], [0, 0]]) == [1, 0]

    def test_gcd_first(self):
        """Test [[2, 4], [6, 8]] gives 2, 4."""
        assert smith_normal_form([[2, 4], [6, 8]]) == [2, 4]

    def test_divisor_chain(self):
        """Test each factor divides the next on a 3x3 example."""
        diagonal = smith_normal_form([[4, 6, 8], [2, 10, 12], [6, 0, 2]])
        nonzero = [d for d in diagonal if d]
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))

    def test_sparse_path_agrees(self):
        """Test unit elimination then dense SNF finds the torsion of diag(1, 2, 6)."""
        columns = [{0: 1}, {1: 2}, {2: 6}]
        result = invariant_factors(columns)
        assert result.rank == 3
        assert result.torsion == [2, 6]
        assert result.exact

    def test_fallback_flags_caveat(self):
        """Test a remainder above the dense limit reports sampled primes only."""
        columns = [{0: 2, 1: 2}, {1: 2, 2: 2}, {0: 2, 2: 2}]
        result = invariant_factors(columns, dense_limit=1)
        assert not result.exact
        assert result.rank == 3
        assert 2 in result.torsion_primes
        assert result.notes


class TestTwoComplex:
    """Test complexes and boundary maps."""

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_boundary_composition(self, name):
        """Test d1 o d2 = 0 on the fixtures."""
        assert boundary_composition_vanishes(FIXTURES[name]())

    def test_missing_edge(self):
        """Test a triangle needs its edges."""
        with pytest.raises(ValueError):
            TwoComplex(3, [(0, 1), (1, 2)], [(0, 1, 2)])

    def test_fixture_cell_counts(self):
        """Test the Euler characteristics 2, 0 and 1."""
        assert tetrahedron_boundary().euler_characteristic() == 2
        assert seven_vertex_torus().euler_characteristic() == 0
        assert six_vertex_projective_plane().euler_characteristic() == 1

    def test_plane_geometry_has_no_triangles(self, geometry_2_5):
        """Test two types give a bipartite complex without triangles."""
        c = incidence_complex(geometry_2_5)
        assert c.triangles == []
        assert boundary_composition_vanishes(c)

    def test_triangles_are_chains(self, geometry_3_5):
        """Test every triangle is point < line < 3-space."""
        c = incidence_complex(geometry_3_5)
        assert c.triangles
        for i, j, k in c.triangles:
            a, b, w = (geometry_3_5.vertices[v] for v in (i, j, k))
            assert (a.dim, b.dim, w.dim) == (1, 2, 3)
            assert b.contains(a) and w.contains(b)
        assert boundary_composition_vanishes(c)

    def test_cell_budget(self, geometry_3_5):
        """Test the triangle budget is enforced."""
        with pytest.raises(BudgetExceededError):
            incidence_complex(geometry_3_5, DEFAULT_CONFIG.override(max_cells=1))


class TestHomology:
    """Test H1 over the integers and Betti numbers."""

    def test_sphere(self):
        """Test the tetrahedron boundary has trivial H1."""
        h1 = homology_h1(tetrahedron_boundary())
        assert h1.is_trivial
        assert str(h1) == "0"

    def test_torus(self):
        """Test the torus has H1 = Z^2."""
        h1 = homology_h1(seven_vertex_torus())
        assert (h1.free_rank, h1.torsion) == (2, ())
        assert str(h1) == "Z^2"

    def test_projective_plane(self):
        """Test the projective plane has H1 = Z/2."""
        h1 = homology_h1(six_vertex_projective_plane())
        assert (h1.free_rank, h1.torsion) == (0, (2,))
        assert str(h1) == "Z/2"

    def test_graph_complex(self, geometry_2_5):
        """Test H1 of a graph is free of rank |E| - |V| + components."""
        c = incidence_complex(geometry_2_5)
        h1 = homology_h1(c)
        assert h1.torsion == ()
        assert h1.free_rank == len(c.edges) - c.vertex_count + c.component_count()

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_betti_agrees(self, name):
        """Test rational Betti numbers agree with H1 and the Euler characteristic."""
        c = FIXTURES[name]()
        betti = betti_numbers(c)
        assert betti.b1 == homology_h1(c).free_rank
        assert betti.euler_characteristic() == c.euler_characteristic()

    def test_betti_of_incidence_complex(self, geometry_3_5):
        """Test Betti numbers and H1 of the n = 3, q = 5 complex agree."""
        c = incidence_complex(geometry_3_5)
        betti = betti_numbers(c)
        assert betti.b0 == c.component_count()
        assert betti.b1 == homology_h1(c).free_rank
        assert betti.euler_characteristic() == c.euler_characteristic()

    def test_homology_budget(self):
        """Test the cell budget applies to homology."""
        with pytest.raises(BudgetExceededError):
            homology_h1(seven_vertex_torus(), DEFAULT_CONFIG.override(max_cells=10))


class TestPresentations:
    """Test fundamental group presentations."""

    def test_filled_triangle(self):
        """Test one filled triangle presents the trivial group."""
        p = pi1_presentation(TwoComplex.from_triangles([(0, 1, 2)]))
        assert p.generator_count == 1
        assert p.relators == ((1,),)
        assert coset_enumerate(p.generator_count, p.relators).kind is OutcomeKind.TRIVIAL_GROUP

    def test_four_cycle(self):
        """Test a 4-cycle without triangles is free of rank 1."""
        p = pi1_presentation(TwoComplex(4, [(0, 1), (1, 2), (2, 3), (0, 3)]))
        assert p.generator_count == 1
        assert p.relators == ()

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_abelianization_matches_h1(self, name):
        """Test the abelianized presentation equals H1."""
        c = FIXTURES[name]()
        ab = abelianization(pi1_presentation(c))
        h1 = homology_h1(c)
        assert (ab.free_rank, ab.torsion) == (h1.free_rank, h1.torsion)

    def test_projective_plane_group_order(self):
        """Test the projective plane presentation enumerates two cosets."""
        p = pi1_presentation(six_vertex_projective_plane())
        outcome = coset_enumerate(p.generator_count, p.relators)
        assert outcome.kind is OutcomeKind.FINITE_INDEX
        assert outcome.index == 2

    def test_relators_freely_reduced(self):
        """Test no relator contains a letter next to its inverse."""
        p = pi1_presentation(seven_vertex_torus())
        for relator in p.relators:
            assert relator
            assert all(a != -b for a, b in zip(relator, relator[1:]))

    def test_disconnected_strict(self):
        """Test strict mode refuses a disconnected complex."""
        c = TwoComplex(4, [(0, 1), (2, 3)])
        with pytest.raises(DisconnectedComplexError):
            pi1_presentation(c, strict=True)
        assert pi1_presentation(c).disconnected
        assert len(pi1_presentations(c)) == 2

    def test_text_form(self):
        """Test the generators line and inverse letters."""
        p = GroupPresentation(2, ((1, -2), (2, 2)))
        assert p.to_text() == "generators: g1,g2\ng1 G2\ng2 g2\n"
        assert parse_presentation(p.to_text()) == p

    def test_simplify_eliminates_generators(self):
        """Test length-1 and length-2 relators remove generators."""
        p = GroupPresentation(3, ((1,), (2, -3), (2, 3, 2)))
        simplified = simplify_presentation(p)
        assert simplified.generator_count == 1
        assert simplified.relators == ((1, 1, 1),)
        outcome = coset_enumerate(simplified.generator_count, simplified.relators)
        assert outcome.index == 3

    def test_simplify_keeps_group(self):
        """Test simplification keeps the projective plane group of order 2."""
        p = simplify_presentation(pi1_presentation(six_vertex_projective_plane()))
        assert coset_enumerate(p.generator_count, p.relators).index == 2
        assert abelianization(p).torsion == (2,)

    def test_simplify_trivial(self):
        """Test a filled triangle simplifies to no generators."""
        p = simplify_presentation(pi1_presentation(TwoComplex.from_triangles([(0, 1, 2)])))
        assert p.generator_count == 0
        assert p.relators == ()


class TestCosetEnumeration:
    """Test Todd-Coxeter coset enumeration."""

    def test_cyclic(self):
        """Test <a | a^3> has index 3."""
        outcome = coset_enumerate(1, [(1, 1, 1)])
        assert outcome.kind is OutcomeKind.FINITE_INDEX
        assert outcome.index == 3

    def test_symmetric_group(self):
        """Test <a, b | a^2, b^2, (ab)^3> has index 6."""
        outcome = coset_enumerate(2, [(1, 1), (2, 2), (1, 2, 1, 2, 1, 2)])
        assert outcome.index == 6

    def test_trivial(self):
        """Test <a | a> is trivial."""
        assert coset_enumerate(1, [(1,)]).kind is OutcomeKind.TRIVIAL_GROUP

    def test_quaternion(self):
        """Test <a, b | a^4, a^2 b^-2, b^-1 a b a> has order 8."""
        outcome = coset_enumerate(2, [(1, 1, 1, 1), (1, 1, -2, -2), (-2, 1, 2, 1)])
        assert outcome.index == 8

    def test_free_group_exceeds(self):
        """Test an infinite group runs out of budget."""
        outcome = coset_enumerate(2, [], budget=10)
        assert outcome.kind is OutcomeKind.EXCEEDED
        assert outcome.cosets_defined == 10

    def test_bad_budget(self):
        """Test a nonpositive budget is a usage error."""
        with pytest.raises(UsageError):
            coset_enumerate(1, [(1,)], budget=0)

    def test_certification_soundness(self, geometry_3_5):
        """Test a trivial group is only reported together with trivial H1."""
        c = incidence_complex(geometry_3_5)
        p = simplify_presentation(pi1_presentation(c))
        outcome = coset_enumerate(p.generator_count, p.relators, budget=20000)
        if outcome.kind is OutcomeKind.TRIVIAL_GROUP:
            assert homology_h1(c).is_trivial


class TestTriangles:
    """Test the triangle geometricity decision."""

    def test_n3_triangles(self, geometry_3_5):
        """Test a triangle is geometric in n = 3 iff it is collinear or spans a square object."""
        graph = collinearity_graph(geometry_3_5)
        triples = sample_collinear_triples(geometry_3_5, graph, 200, seed=3)
        assert triples
        for a, b, c in triples:
            verdict = triangle_geometric(geometry_3_5, a, b, c)
            span = join(a, b, c)
            assert verdict.geometric == (span.dim == 2 or classify(span) == SQUARE)
            if verdict.geometric:
                assert verdict.witness == span

    def test_not_a_triangle(self, geometry_3_5):
        """Test repeated points are rejected."""
        p, q = geometry_3_5.objects[1][:2]
        with pytest.raises(NotATriangleError):
            triangle_geometric(geometry_3_5, p, p, q)

    def test_sampling_is_reproducible(self, geometry_3_5):
        """Test the same seed samples the same triples."""
        graph = collinearity_graph(geometry_3_5)
        first = sample_collinear_triples(geometry_3_5, graph, 20, seed=11)
        second = sample_collinear_triples(geometry_3_5, graph, 20, seed=11)
        assert first == second

    @pytest.mark.slow
    def test_every_triangle_geometric_for_n4(self):
        """Test 1000 sampled triangles of n = 4, q = 5 are geometric."""
        g = build_geometry(4, 5)
        graph = collinearity_graph(g)
        survey = survey_triangles(g, graph, 1000, seed=0)
        assert survey.sampled == 1000
        assert survey.all_geometric

    @pytest.mark.slow
    def test_three_spaces_embed_for_n4(self):
        """Test sampled 3-spaces spanned by triangles embed in square objects."""
        g = build_geometry(4, 5)
        graph = collinearity_graph(g)
        for a, b, c in sample_collinear_triples(g, graph, 100, seed=1):
            w = join(a, b, c)
            if w.dim != 3:
                continue
            target = embed_in_square_object(g, w)
            assert target is not None
            assert target in g
            assert target.contains(w)
