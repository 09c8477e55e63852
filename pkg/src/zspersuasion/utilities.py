"""Piecewise-affine sender utilities on the belief simplex.

Provides first-match piecewise evaluation, payoff normalization so that every
utility vanishes at degenerate beliefs, zero-sum verification, exact expected
and conditional payoffs against strategy profiles, one-dimensional edge
restrictions with one-sided vertex derivatives, and the maximum total surplus
of a game.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .affine import AffineForm, Constraint
from .beliefs import Belief, as_fraction, combine, degenerate
from .exceptions import NoPieceMatches
from .experiments import Experiment, StrategyProfile, conditional_dist, product

DEFAULT_COVERAGE_SAMPLES = 200
DEFAULT_ZERO_SUM_SAMPLES = 200
_SAMPLE_DENOMINATOR = 997


@dataclass(frozen=True)
class Piece:
    """A guarded affine piece: the form applies where every guard constraint
    holds."""

    guard: tuple[Constraint, ...]
    form: AffineForm

    def matches(self, b: Belief) -> bool:
        return all(c.holds(b) for c in self.guard)


@dataclass(frozen=True)
class PiecewiseAffineUtility:
    """Ordered pieces with first-match semantics.

    Piece order is meaningful: the first piece whose guard holds at a belief
    determines the value there, which pins down boundary values exactly.
    """

    pieces: tuple[Piece, ...]

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("utility needs at least one piece")
        n = self.pieces[0].form.n_states
        for p in self.pieces:
            if p.form.n_states != n:
                raise ValueError("piece dimension mismatch")
            for c in p.guard:
                if c.expr.n_states != n:
                    raise ValueError("guard dimension mismatch")

    @property
    def n_states(self) -> int:
        return self.pieces[0].form.n_states

    def __call__(self, b: Belief) -> Fraction:
        for p in self.pieces:
            if p.matches(b):
                return p.form(b)
        raise NoPieceMatches(f"no piece covers belief {b.probs}")

    def shifted(self, delta: AffineForm) -> "PiecewiseAffineUtility":
        return PiecewiseAffineUtility(
            tuple(replace(p, form=p.form + delta) for p in self.pieces)
        )


def constant_utility(n_states: int, value=Fraction(0)) -> PiecewiseAffineUtility:
    form = AffineForm(as_fraction(value), tuple(Fraction(0) for _ in range(n_states)))
    return PiecewiseAffineUtility((Piece((), form),))


def eval_utility(u: PiecewiseAffineUtility, b: Belief) -> Fraction:
    return u(b)


def _random_belief(n_states: int, rng: random.Random) -> Belief:
    while True:
        weights = [rng.randint(0, _SAMPLE_DENOMINATOR) for _ in range(n_states)]
        total = sum(weights)
        if total > 0:
            return Belief(tuple(Fraction(w, total) for w in weights))


def check_coverage(
    u: PiecewiseAffineUtility,
    samples: int = DEFAULT_COVERAGE_SAMPLES,
    seed: int = 0,
) -> None:
    """Checks the first-match coverage invariant: every simplex vertex, every
    pairwise-edge breakpoint, and a random rational sample must hit a piece.

    Raises NoPieceMatches at the first uncovered belief found.
    """
    n = u.n_states
    for l in range(n):
        u(degenerate(n, l))
    for l in range(n):
        for k in range(l + 1, n):
            edge_restriction(u, l, k)  # evaluates at every breakpoint/midpoint
    rng = random.Random(seed)
    for _ in range(samples):
        u(_random_belief(n, rng))


@dataclass(frozen=True)
class GamePayoffs:
    """One utility per sender over a common state space."""

    utilities: tuple[PiecewiseAffineUtility, ...]
    normalized: bool = False

    def __post_init__(self):
        if not self.utilities:
            raise ValueError("game needs at least one sender")
        n = self.utilities[0].n_states
        if any(u.n_states != n for u in self.utilities):
            raise ValueError("utilities disagree on the number of states")

    @property
    def n_states(self) -> int:
        return self.utilities[0].n_states

    @property
    def n_senders(self) -> int:
        return len(self.utilities)


def normalize_payoffs(g: GamePayoffs) -> GamePayoffs:
    """Shifts each utility by the affine correction -sum_l beta_l u_i(delta_l)
    so every sender's utility is 0 at every degenerate belief.

    The correction has the same expectation under every Bayes-plausible
    experiment, so senders' rankings over strategy profiles are unchanged,
    and an exactly zero-sum game stays exactly zero-sum.  Idempotent.
    """
    n = g.n_states
    out = []
    for u in g.utilities:
        vertex_values = tuple(u(degenerate(n, l)) for l in range(n))
        if all(v == 0 for v in vertex_values):
            out.append(u)
            continue
        alpha = AffineForm(Fraction(0), tuple(-v for v in vertex_values))
        out.append(u.shifted(alpha))
    return GamePayoffs(tuple(out), normalized=True)


# ---------------------------------------------------------------------------
# Edge restrictions


@dataclass(frozen=True)
class EdgeFunction:
    """A utility restricted to the edge beta(t) = (1-t) delta_l + t delta_k.

    Stored as breakpoints 0 = t_0 < ... < t_J = 1 with an affine
    (constant, slope) form on each *open* interval (t_j, t_{j+1}) and an
    explicit value at each breakpoint.  Point values are kept separately
    because first-match guards can single out isolated edge points whose
    value differs from both neighbouring intervals.
    """

    breakpoints: tuple[Fraction, ...]
    interval_forms: tuple[tuple[Fraction, Fraction], ...]
    point_values: tuple[Fraction, ...]

    def __post_init__(self):
        bp = self.breakpoints
        if len(bp) < 2 or bp[0] != 0 or bp[-1] != 1:
            raise ValueError("breakpoints must run from 0 to 1")
        if any(a >= b for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(self.interval_forms) != len(bp) - 1:
            raise ValueError("need one form per open interval")
        if len(self.point_values) != len(bp):
            raise ValueError("need one value per breakpoint")

    def __call__(self, t) -> Fraction:
        t = as_fraction(t)
        if not 0 <= t <= 1:
            raise ValueError("edge parameter must lie in [0, 1]")
        for j, b in enumerate(self.breakpoints):
            if t == b:
                return self.point_values[j]
            if t < b:
                c, s = self.interval_forms[j - 1]
                return c + s * t
        raise AssertionError("unreachable")

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.point_values) and all(
            c == 0 and s == 0 for c, s in self.interval_forms
        )

    @property
    def start_slope(self) -> Fraction:
        return self.interval_forms[0][1]

    @property
    def end_slope(self) -> Fraction:
        return self.interval_forms[-1][1]

    def supremum(self) -> Fraction:
        """sup over [0, 1]; the sup of each open interval is approached at its
        ends, so it is the max of end limits and breakpoint values."""
        best = max(self.point_values)
        for (c, s), a, b in zip(
            self.interval_forms, self.breakpoints, self.breakpoints[1:]
        ):
            best = max(best, c + s * a, c + s * b)
        return best

    def nonzero_witness(self) -> Optional[Fraction]:
        """Some t with value != 0, or None if the function is identically 0."""
        for t, v in zip(self.breakpoints, self.point_values):
            if v != 0:
                return t
        for (c, s), a, b in zip(
            self.interval_forms, self.breakpoints, self.breakpoints[1:]
        ):
            if c == 0 and s == 0:
                continue
            mid = (a + b) / 2
            if c + s * mid != 0:
                return mid
            return (3 * a + b) / 4  # midpoint is the root of a nonzero form
        return None


def _merge_edge(
    breakpoints: list[Fraction],
    forms: list[tuple[Fraction, Fraction]],
    values: list[Fraction],
) -> EdgeFunction:
    # drop interior breakpoints where the two sides share a form and the
    # point value agrees with it
    j = 1
    while j < len(breakpoints) - 1:
        c, s = forms[j - 1]
        if forms[j] == (c, s) and values[j] == c + s * breakpoints[j]:
            del breakpoints[j], forms[j], values[j]
        else:
            j += 1
    return EdgeFunction(tuple(breakpoints), tuple(forms), tuple(values))


def edge_restriction(u: PiecewiseAffineUtility, l: int, k: int) -> EdgeFunction:
    """Exact restriction of a utility to the (l, k) edge of the simplex.

    Substitutes beta(t) = (1-t) delta_l + t delta_k into every guard and form;
    guard boundaries become the candidate breakpoints, and first-match
    evaluation on each open interval (constant piece choice there) and at
    each breakpoint fills in forms and point values.
    """
    if l == k:
        raise ValueError("edge endpoints must differ")
    cuts = {Fraction(0), Fraction(1)}
    for p in u.pieces:
        for cons in p.guard:
            c, s = cons.expr.on_edge(l, k)
            if s != 0:
                t = -c / s
                if 0 < t < 1:
                    cuts.add(t)
    breakpoints = sorted(cuts)

    def first_match(t: Fraction) -> tuple[tuple[Fraction, Fraction], Fraction]:
        for p in u.pieces:
            ok = True
            for cons in p.guard:
                c, s = cons.expr.on_edge(l, k)
                if not cons.holds_value(c + s * t):
                    ok = False
                    break
            if ok:
                fc, fs = p.form.on_edge(l, k)
                return (fc, fs), fc + fs * t
        raise NoPieceMatches(f"no piece covers edge ({l},{k}) at t={t}")

    forms = []
    for a, b in zip(breakpoints, breakpoints[1:]):
        form, _ = first_match((a + b) / 2)
        forms.append(form)
    values = [first_match(t)[1] for t in breakpoints]
    return _merge_edge(breakpoints, forms, values)


def combine_edge_functions(fns: Sequence[EdgeFunction]) -> EdgeFunction:
    """Pointwise-exact sum via common refinement of breakpoints."""
    if not fns:
        raise ValueError("need at least one edge function")
    cuts = sorted({t for f in fns for t in f.breakpoints})
    forms = []
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2
        const = Fraction(0)
        slope = Fraction(0)
        for f in fns:
            # locate the open interval of f containing (a, b)
            for j, t in enumerate(f.breakpoints):
                if mid < t:
                    c, s = f.interval_forms[j - 1]
                    const += c
                    slope += s
                    break
        forms.append((const, slope))
    values = [sum((f(t) for f in fns), Fraction(0)) for t in cuts]
    return _merge_edge(cuts, forms, values)


def edge_derivative_at_vertex(
    u: PiecewiseAffineUtility, l: int, k: int, end: str
) -> Fraction:
    """One-sided derivative along the edge direction delta_l -> delta_k:
    the right derivative at delta_l ("AtL") or left derivative at delta_k
    ("AtK"), both measured in the edge parameter t."""
    f = edge_restriction(u, l, k)
    if end == "AtL":
        return f.start_slope
    if end == "AtK":
        return f.end_slope
    raise ValueError("end must be 'AtL' or 'AtK'")


# ---------------------------------------------------------------------------
# Zero-sum verification


@dataclass(frozen=True)
class ZeroSumResult:
    """witness is None when the pooled sum was exactly zero on every pairwise
    edge and at every sampled interior point."""

    witness: Optional[Belief]
    samples: int

    @property
    def ok(self) -> bool:
        return self.witness is None


def check_zero_sum(
    g: GamePayoffs, samples: int = DEFAULT_ZERO_SUM_SAMPLES, seed: int = 0
) -> ZeroSumResult:
    """Verifies sum_i u_i == 0: exactly on every pairwise edge (including the
    degenerate single-state case), probabilistically at random rational
    interior points."""
    n = g.n_states
    if n == 1:
        b = degenerate(1, 0)
        total = sum((u(b) for u in g.utilities), Fraction(0))
        return ZeroSumResult(None if total == 0 else b, samples)
    for l in range(n):
        for k in range(l + 1, n):
            total = combine_edge_functions(
                [edge_restriction(u, l, k) for u in g.utilities]
            )
            t = total.nonzero_witness()
            if t is not None:
                probs = [Fraction(0)] * n
                probs[l] = 1 - t
                probs[k] = t
                return ZeroSumResult(Belief(tuple(probs)), samples)
    rng = random.Random(seed)
    for _ in range(samples):
        b = _random_belief(n, rng)
        if sum((u(b) for u in g.utilities), Fraction(0)) != 0:
            return ZeroSumResult(b, samples)
    return ZeroSumResult(None, samples)


# ---------------------------------------------------------------------------
# Payoffs against strategy profiles


def expected_utility(g: GamePayoffs, profile: StrategyProfile, i: int) -> Fraction:
    """Ex-ante expected payoff of sender i: the utility integrated against
    the posterior distribution induced by all senders jointly."""
    joint = product(profile)
    u = g.utilities[i]
    return sum((m * u(b) for b, m in joint.atoms), Fraction(0))


def conditional_payoff_against(
    u: PiecewiseAffineUtility, others: Experiment, x: Belief
) -> Fraction:
    """Expected utility conditional on independently generating interim
    belief x while opponents jointly generate ``others``."""
    prior = others.prior
    total = Fraction(0)
    for y, p in conditional_dist(others, x):
        total += p * u(combine(prior, (x, y)))
    return total


def conditional_payoff(
    g: GamePayoffs, profile: StrategyProfile, i: int, x: Belief
) -> Fraction:
    """Sender i's expected payoff conditional on generating interim belief x
    against the product of the other senders' experiments.  With a single
    sender this is just u_i(x)."""
    u = g.utilities[i]
    others = profile.without(i)
    if not others:
        return u(x)
    return conditional_payoff_against(u, product(others), x)


# ---------------------------------------------------------------------------
# Maximum total surplus


@dataclass(frozen=True)
class SurplusBound:
    """value is the exact supremum when exact is True; otherwise a certified
    lower bound from edge suprema and interior sampling."""

    value: Fraction
    exact: bool


def max_total_surplus(
    g: GamePayoffs, samples: int = DEFAULT_ZERO_SUM_SAMPLES, seed: int = 0
) -> SurplusBound:
    """sup over the simplex of the pooled sum of utilities.

    Exact for up to three states via the overlay of the senders' first-match
    piece regions (the sup over each overlay cell of the summed affine form
    is attained at a vertex of the cell's closure).  For more states,
    returns the best of edge suprema and random interior samples, flagged
    as inexact.
    """
    from .geometry import overlay_regions

    n = g.n_states
    if n == 1:
        b = degenerate(1, 0)
        return SurplusBound(sum((u(b) for u in g.utilities), Fraction(0)), True)
    best: Optional[Fraction] = None
    for l in range(n):
        for k in range(l + 1, n):
            total = combine_edge_functions(
                [edge_restriction(u, l, k) for u in g.utilities]
            )
            s = total.supremum()
            best = s if best is None else max(best, s)
    assert best is not None
    if n <= 3:
        for _, vertices, form in overlay_regions(g.utilities):
            for v in vertices:
                best = max(best, form.at_point(v))
        return SurplusBound(best, True)
    rng = random.Random(seed)
    for _ in range(samples):
        b = _random_belief(n, rng)
        best = max(best, sum((u(b) for u in g.utilities), Fraction(0)))
    return SurplusBound(best, False)
