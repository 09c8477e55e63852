"""Convex cells over the simplex: vertices, feasibility, decompositions."""

from fractions import Fraction

from zspersuasion.affine import AffineForm, Constraint
from zspersuasion.beliefs import Belief
from zspersuasion.geometry import (
    cell_is_nonempty,
    closure_vertices,
    complement_cells,
    piece_regions,
    polytope_vertices,
    strictly_feasible_point,
    subsimplex_constraints,
)
from zspersuasion.utilities import Piece, PiecewiseAffineUtility


def half(n, l, op, bound=Fraction(1, 2)):
    coeffs = tuple(
        Fraction(1) if m == l else Fraction(0) for m in range(n)
    )
    return Constraint(AffineForm(-bound, coeffs), op)


class TestVertices:
    def test_whole_simplex(self):
        vs = set(polytope_vertices(3, ()))
        assert vs == {
            (Fraction(1), Fraction(0), Fraction(0)),
            (Fraction(0), Fraction(1), Fraction(0)),
            (Fraction(0), Fraction(0), Fraction(1)),
        }

    def test_halfspace_cut(self):
        vs = set(polytope_vertices(2, (half(2, 1, "<="),)))
        assert vs == {
            (Fraction(1), Fraction(0)),
            (Fraction(1, 2), Fraction(1, 2)),
        }

    def test_face_equality(self):
        face = tuple(subsimplex_constraints(3, (1, 2)))
        vs = set(closure_vertices(3, face))
        assert vs == {
            (Fraction(0), Fraction(1), Fraction(0)),
            (Fraction(0), Fraction(0), Fraction(1)),
        }


class TestFeasibility:
    def test_strict_cell_nonempty(self):
        cell = (half(2, 1, "<"), half(2, 1, ">", Fraction(1, 4)))
        assert cell_is_nonempty(2, cell)
        p = strictly_feasible_point(2, cell)
        assert all(c.holds_at(p) for c in cell)

    def test_degenerate_strict_cell_empty(self):
        cell = (half(2, 1, "<"), half(2, 1, ">"))
        assert not cell_is_nonempty(2, cell)
        assert strictly_feasible_point(2, cell) is None

    def test_point_cell(self):
        cell = (half(2, 1, "<="), half(2, 1, ">="))
        assert cell_is_nonempty(2, cell)
        assert strictly_feasible_point(2, cell) == (
            Fraction(1, 2),
            Fraction(1, 2),
        )


class TestDecompositions:
    def test_complement_covers_without_overlap(self):
        guard = (half(3, 0, "<="), half(3, 1, "<", Fraction(1, 3)))
        cells = complement_cells(guard)
        # sample a few beliefs: exactly one region (guard or a complement
        # cell) should contain each
        probe = [
            Belief((Fraction(a, 4), Fraction(b, 4), Fraction(4 - a - b, 4)))
            for a in range(5)
            for b in range(5 - a)
        ]
        for b in probe:
            in_guard = all(c.holds(b) for c in guard)
            hits = sum(
                1 for cell in cells if all(c.holds(b) for c in cell)
            )
            assert hits == (0 if in_guard else 1)

    def test_piece_regions_partition(self):
        u = PiecewiseAffineUtility(
            (
                Piece((half(2, 1, "<"),), AffineForm(Fraction(1), (Fraction(0), Fraction(0)))),
                Piece((), AffineForm(Fraction(2), (Fraction(0), Fraction(0)))),
            )
        )
        regions = piece_regions(u.pieces)
        for k in range(9):
            b = Belief((Fraction(k, 8), Fraction(8 - k, 8)))
            matches = [
                form
                for cell, form in regions
                if all(c.holds(b) for c in cell)
            ]
            assert len(matches) == 1
            assert matches[0].at_point(b.probs) == u(b)
