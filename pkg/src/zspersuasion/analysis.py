"""Classifiers for pooling and revelation.

Decides whether utilities vanish on sub-simplices, which state subsets can be
pooled in some equilibrium, whether every equilibrium fully reveals the
state, which subsets are minimal carriers of advantage, which subsets a
given profile pools, the edge-slope sufficient condition for the
infinite-signal case, and the strict-surplus sufficient condition for
non-zero-sum games.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .beliefs import Belief, degenerate, state_set
from .exceptions import NotNormalized
from .experiments import StrategyProfile, product
from .geometry import (
    cell_is_nonempty,
    closure_vertices,
    piece_regions,
    strictly_feasible_point,
    subsimplex_constraints,
    overlay_regions,
)
from .affine import AffineForm, Constraint
from .utilities import GamePayoffs, PiecewiseAffineUtility, edge_restriction


def _require_normalized(utilities: Sequence[PiecewiseAffineUtility]) -> None:
    n = utilities[0].n_states
    for i, u in enumerate(utilities):
        for l in range(n):
            if u(degenerate(n, l)) != 0:
                raise NotNormalized(
                    f"utility {i} is {u(degenerate(n, l))} at state {l}; "
                    "normalize_payoffs first"
                )


def _edge_belief(n: int, l: int, k: int, t: Fraction) -> Belief:
    probs = [Fraction(0)] * n
    probs[l] = 1 - t
    probs[k] = t
    return Belief(tuple(probs))


@dataclass(frozen=True)
class ZeroCheck:
    """zero is exact; the sampled flag is reserved for configurations where
    the test had to fall back to sampling (never set by the current exact
    cell decomposition)."""

    zero: bool
    witness: Optional[Belief]
    sampled: bool = False


def is_zero_on_subsimplex(
    u: PiecewiseAffineUtility, omega: Sequence[int]
) -> ZeroCheck:
    """Is a normalized utility identically zero on the face spanned by the
    states in omega?

    Since a normalized utility vanishes at every vertex, being affine on the
    face is the same as being zero there, so this is also the operative
    "linear on the sub-simplex" test.  Two-state faces go through the exact
    edge restriction; larger faces through the disjoint first-match cell
    decomposition (zero on a cell iff zero at all closure vertices).
    """
    n = u.n_states
    omega = state_set(omega, n)
    _require_normalized([u])
    if len(omega) == 1:
        return ZeroCheck(True, None)
    if len(omega) == 2:
        l, k = omega
        f = edge_restriction(u, l, k)
        t = f.nonzero_witness()
        if t is None:
            return ZeroCheck(True, None)
        return ZeroCheck(False, _edge_belief(n, l, k, t))
    face = subsimplex_constraints(n, omega)
    for cell, form in piece_regions(u.pieces):
        constraints = cell + tuple(face)
        if not cell_is_nonempty(n, constraints):
            continue
        vertices = closure_vertices(n, constraints)
        bad = next((v for v in vertices if form.at_point(v) != 0), None)
        if bad is None:
            continue
        p = strictly_feasible_point(n, constraints)
        assert p is not None
        if form.at_point(p) != 0:
            return ZeroCheck(False, Belief(p))
        # midway between an interior point and the nonzero closure vertex:
        # still in the cell, and the form is half the vertex value there
        mid = tuple((a + b) / 2 for a, b in zip(p, bad))
        return ZeroCheck(False, Belief(mid))
    return ZeroCheck(True, None)


@dataclass(frozen=True)
class PoolingVerdict:
    """never_pooled means no equilibrium keeps all of omega unrevealed; the
    witness sender then has a strictly positive payoff somewhere on the
    face, which is what powers the exploiting deviation."""

    omega: tuple[int, ...]
    never_pooled: bool
    witness_sender: Optional[int] = None
    witness_belief: Optional[Belief] = None


def classify_pooling(g: GamePayoffs, omega: Sequence[int]) -> PoolingVerdict:
    """No equilibrium pools omega iff some sender's normalized utility is
    nonzero on the face over omega; otherwise pooling equilibria exist."""
    _require_normalized(g.utilities)
    omega = state_set(omega, g.n_states)
    for u in g.utilities:
        check = is_zero_on_subsimplex(u, omega)
        if check.zero:
            continue
        b = check.witness
        assert b is not None
        # zero-sum: somebody is strictly positive wherever somebody is nonzero
        for i, ui in enumerate(g.utilities):
            if ui(b) > 0:
                return PoolingVerdict(omega, True, i, b)
        raise AssertionError("nonzero witness but no positive sender; not zero-sum?")
    return PoolingVerdict(omega, False)


@dataclass(frozen=True)
class RevelationReport:
    edges: tuple[PoolingVerdict, ...]
    full_revelation: bool
    counterexample: Optional[tuple[int, int]] = None


def classify_full_revelation(g: GamePayoffs) -> RevelationReport:
    """Every equilibrium fully reveals the state iff every two-state face has
    a sender with nonzero utility on it."""
    n = g.n_states
    verdicts = []
    counterexample = None
    for l in range(n):
        for k in range(l + 1, n):
            v = classify_pooling(g, (l, k))
            verdicts.append(v)
            if counterexample is None and not v.never_pooled:
                counterexample = (l, k)
    return RevelationReport(tuple(verdicts), counterexample is None, counterexample)


def minimal_subsets(g: GamePayoffs) -> list[tuple[int, ...]]:
    """State subsets carrying an advantage whose proper subsets carry none.

    A subset qualifies when some sender's normalized utility is nonzero on
    its face; minimality is by set inclusion.  Enumerated in increasing
    size, so any qualifying set either appears or contains one that does.
    """
    _require_normalized(g.utilities)
    n = g.n_states
    found: list[tuple[int, ...]] = []
    for size in range(2, n + 1):
        for omega in itertools.combinations(range(n), size):
            if any(set(m) < set(omega) for m in found):
                continue
            if any(
                not is_zero_on_subsimplex(u, omega).zero for u in g.utilities
            ):
                found.append(omega)
    return found


@dataclass(frozen=True)
class PooledSets:
    """All state subsets (size >= 2) that the profile keeps unrevealed with
    positive probability, plus the inclusion-maximal ones."""

    sets: tuple[tuple[int, ...], ...]
    maximal: tuple[tuple[int, ...], ...]


def detect_pooled_sets(profile: StrategyProfile) -> PooledSets:
    """A subset is pooled when some posterior atom of the joint experiment
    puts positive probability on all its states at once."""
    joint = product(profile)
    supports = {frozenset(b.support) for b, _ in joint.atoms}
    maximal = [
        s for s in supports
        if len(s) >= 2 and not any(s < other for other in supports)
    ]
    all_sets = {
        subset
        for s in supports
        for size in range(2, len(s) + 1)
        for subset in itertools.combinations(sorted(s), size)
    }
    return PooledSets(
        tuple(sorted(all_sets, key=lambda s: (len(s), s))),
        tuple(sorted((tuple(sorted(s)) for s in maximal), key=lambda s: (len(s), s))),
    )


@dataclass(frozen=True)
class Condition1Report:
    """Edge-slope sufficient condition for full revelation that remains valid
    when senders may use infinitely many signals.  A negative overall
    verdict is inconclusive, not a pooling prediction."""

    edges: tuple[tuple[tuple[int, int], bool], ...]
    overall: bool
    note: str = (
        "a failing edge is inconclusive for infinite-signal strategies; "
        "the condition is sufficient, not necessary"
    )


def condition1_report(g: GamePayoffs) -> Condition1Report:
    """An edge qualifies when some sender's utility has a nonzero one-sided
    slope along the edge at either endpoint (with normalized utilities the
    endpoint values themselves are zero)."""
    _require_normalized(g.utilities)
    n = g.n_states
    edges = []
    for l in range(n):
        for k in range(l + 1, n):
            ok = False
            for u in g.utilities:
                f = edge_restriction(u, l, k)
                if f.start_slope != 0 or f.end_slope != 0:
                    ok = True
                    break
            edges.append(((l, k), ok))
    return Condition1Report(tuple(edges), all(ok for _, ok in edges))


@dataclass(frozen=True)
class SurplusSufficiency:
    """holds means the pooled sum of utilities is strictly negative
    everywhere except at degenerate beliefs, which forces full revelation
    even without zero-sum.  Exactly zero-sum games are always inconclusive
    (the sum vanishes everywhere)."""

    holds: bool
    witness: Optional[Belief] = None


def strict_surplus_sufficiency(g: GamePayoffs) -> SurplusSufficiency:
    _require_normalized(g.utilities)
    n = g.n_states
    nonneg_witness = None
    for cell, _, form in overlay_regions(g.utilities):
        bad = cell + (Constraint(-form, "<="),)  # points with sum >= 0
        if not cell_is_nonempty(n, bad):
            continue
        vertices = closure_vertices(n, bad)
        if len(vertices) == 1 and Belief(vertices[0]).is_degenerate():
            continue  # the only offending point is a simplex vertex
        p = strictly_feasible_point(n, bad)
        assert p is not None
        witness = Belief(p)
        if witness.is_degenerate():
            # slide toward another closure vertex to leave the corner
            other = next(v for v in vertices if v != p)
            witness = Belief(tuple((a + b) / 2 for a, b in zip(p, other)))
        return SurplusSufficiency(False, witness)
    return SurplusSufficiency(True, None)
