"""Exact polyhedral computations on the belief simplex.

Cells are conjunctions of affine constraints (strict or weak) intersected
with the simplex.  Everything here is rational: vertex enumeration via
Gaussian elimination over Fraction, emptiness tests that handle strict
constraints exactly, strictly feasible interior points, and disjoint
first-match decompositions of piecewise utilities.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .affine import AffineForm, Constraint

Point = tuple[Fraction, ...]

# A linear equation coeffs . beta + const = 0
_Equation = tuple[tuple[Fraction, ...], Fraction]


def _row_reduce(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], bool]:
    """Reduced row echelon form of an augmented matrix [A | b] for A x = b.
    Returns (reduced rows, consistent)."""
    rows = [row[:] for row in rows]
    n_cols = len(rows[0]) - 1 if rows else 0
    pivot_row = 0
    for col in range(n_cols):
        pivot = None
        for r in range(pivot_row, len(rows)):
            if rows[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        rows[pivot_row], rows[pivot] = rows[pivot], rows[pivot_row]
        factor = rows[pivot_row][col]
        rows[pivot_row] = [v / factor for v in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[pivot_row])]
        pivot_row += 1
        if pivot_row == len(rows):
            break
    consistent = all(
        any(v != 0 for v in row[:-1]) or row[-1] == 0 for row in rows
    )
    return rows, consistent


def solve_unique(equations: Sequence[_Equation], n: int) -> Optional[Point]:
    """The unique solution of coeffs.x + const = 0 for all equations, or None
    if the system is inconsistent or underdetermined."""
    rows = [[*coeffs, -const] for coeffs, const in equations]
    if not rows:
        return None
    reduced, consistent = _row_reduce(rows)
    if not consistent:
        return None
    solution: list[Optional[Fraction]] = [None] * n
    rank = 0
    for row in reduced:
        lead = next((c for c in range(n) if row[c] != 0), None)
        if lead is None:
            continue
        rank += 1
        if any(row[c] != 0 for c in range(lead + 1, n)):
            return None  # free variable in this row
        solution[lead] = row[n]
    if rank != n:
        return None
    return tuple(v for v in solution)  # type: ignore[misc]


def _as_equation(form: AffineForm) -> _Equation:
    return (form.coeffs, form.const)


def _simplex_equations(n: int) -> list[_Equation]:
    return [(tuple(Fraction(1) for _ in range(n)), Fraction(-1))]


def polytope_vertices(n: int, constraints: Sequence[Constraint]) -> list[Point]:
    """Vertices of the closed polytope cut from the simplex by weak
    constraints (strict ops are rejected; weaken first).

    Every vertex is the unique solution of the equality constraints plus a
    set of inequalities made active, so enumerating active sets of the
    complementary size finds them all.
    """
    equalities = _simplex_equations(n)
    inequalities: list[Constraint] = [
        Constraint(
            AffineForm(
                Fraction(0),
                tuple(Fraction(-1 if i == j else 0) for i in range(n)),
            ),
            "<=",
        )
        for j in range(n)
    ]
    for c in constraints:
        if c.is_strict:
            raise ValueError("polytope_vertices needs weak constraints")
        if c.op == "==":
            equalities.append(_as_equation(c.expr))
        elif c.op == "<=":
            inequalities.append(c)
        else:  # ">="
            inequalities.append(Constraint(-c.expr, "<="))

    rows = [[*coeffs, -const] for coeffs, const in equalities]
    reduced, consistent = _row_reduce(rows)
    if not consistent:
        return []
    rank = sum(1 for row in reduced if any(v != 0 for v in row[:-1]))
    free = n - rank
    vertices: set[Point] = set()
    for active in itertools.combinations(inequalities, free):
        eqs = equalities + [_as_equation(c.expr) for c in active]
        point = solve_unique(eqs, n)
        if point is None:
            continue
        if all(c.holds_at(point) for c in inequalities):
            vertices.add(point)
    return sorted(vertices)


def closure_vertices(n: int, constraints: Sequence[Constraint]) -> list[Point]:
    """Vertices of the closure of a cell: weaken every strict constraint.
    For a nonempty convex cell this is exactly the topological closure."""
    return polytope_vertices(n, [c.weakened() for c in constraints])


def cell_is_nonempty(n: int, constraints: Sequence[Constraint]) -> bool:
    """Exact emptiness test for a cell with strict and weak constraints.

    The cell is nonempty iff its weak relaxation has a vertex and, for every
    strict constraint, some vertex of the relaxation satisfies it strictly
    (then the average of such witnesses lies in the cell).
    """
    vertices = closure_vertices(n, constraints)
    if not vertices:
        return False
    for c in constraints:
        if c.is_strict and not any(c.holds_at(v) for v in vertices):
            return False
    return True


def strictly_feasible_point(
    n: int, constraints: Sequence[Constraint]
) -> Optional[Point]:
    """A point of the cell itself (not just its closure), or None if empty.

    Averages the centroid of the closure's vertices with one witness vertex
    per strict constraint; weak constraints survive averaging by convexity
    and each strict one is negative somewhere in the average.
    """
    vertices = closure_vertices(n, constraints)
    if not vertices:
        return None
    centroid = tuple(
        sum((v[i] for v in vertices), Fraction(0)) / len(vertices)
        for i in range(n)
    )
    points: list[Point] = [centroid]
    for c in constraints:
        if not c.is_strict:
            continue
        witness = next((v for v in vertices if c.holds_at(v)), None)
        if witness is None:
            return None
        points.append(witness)
    return tuple(
        sum((p[i] for p in points), Fraction(0)) / len(points) for i in range(n)
    )


def negate_constraint(c: Constraint) -> list[Constraint]:
    """The complement of one constraint as a disjunction (list) of cells of
    one constraint each; equalities split into two strict sides."""
    if c.op == "==":
        return [Constraint(c.expr, "<"), Constraint(c.expr, ">")]
    return [c.negated()]


def complement_cells(
    guard: Sequence[Constraint],
) -> list[tuple[Constraint, ...]]:
    """Disjoint cover of NOT(c_1 and ... and c_m):
    (not c_1) | (c_1 and not c_2) | ... — each disjunct a conjunction."""
    out: list[tuple[Constraint, ...]] = []
    prefix: list[Constraint] = []
    for c in guard:
        for neg in negate_constraint(c):
            out.append(tuple(prefix) + (neg,))
        prefix.append(c)
    return out


def subsimplex_constraints(n: int, omega: Sequence[int]) -> list[Constraint]:
    """Equalities pinning beta to the face spanned by the states in omega."""
    inside = set(omega)
    out = []
    for j in range(n):
        if j not in inside:
            out.append(
                Constraint(
                    AffineForm(
                        Fraction(0),
                        tuple(Fraction(1 if i == j else 0) for i in range(n)),
                    ),
                    "==",
                )
            )
    return out


def piece_regions(pieces) -> list[tuple[tuple[Constraint, ...], AffineForm]]:
    """Disjoint decomposition of a first-match piecewise utility.

    Each returned (constraints, form) cell is nonempty, the cells are
    pairwise disjoint, and on each cell the utility equals the affine form.
    Pieces are anything with .guard and .form, processed in match order.
    """
    n = pieces[0].form.n_states
    regions: list[tuple[tuple[Constraint, ...], AffineForm]] = []
    remainder: list[tuple[Constraint, ...]] = [()]
    for piece in pieces:
        next_remainder: list[tuple[Constraint, ...]] = []
        for cell in remainder:
            covered = cell + tuple(piece.guard)
            if cell_is_nonempty(n, covered):
                regions.append((covered, piece.form))
            for tail in complement_cells(piece.guard):
                candidate = cell + tail
                if cell_is_nonempty(n, candidate):
                    next_remainder.append(candidate)
        remainder = next_remainder
    return regions


def overlay_regions(utilities):
    """Common refinement of several piecewise utilities' first-match regions.

    Yields (constraints, closure vertices, summed form) for every nonempty
    intersection of one region per utility; on that cell the sum of the
    utilities equals the summed affine form.
    """
    n = utilities[0].pieces[0].form.n_states
    decomposed = [piece_regions(u.pieces) for u in utilities]
    for combo in itertools.product(*decomposed):
        constraints = tuple(c for cell, _ in combo for c in cell)
        if len(decomposed) > 1 and not cell_is_nonempty(n, constraints):
            continue
        total = combo[0][1]
        for _, form in combo[1:]:
            total = total + form
        yield constraints, closure_vertices(n, constraints), total
