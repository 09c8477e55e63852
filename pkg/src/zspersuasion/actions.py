"""Finite receiver-action microfoundation.

A receiver picks one of finitely many actions after seeing the posterior,
breaking ties toward the lowest-index action.  Senders' induced utilities
over posteriors are then piecewise affine, with one piece per action, and
plug directly into the rest of the library.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .affine import AffineForm, Constraint
from .beliefs import Belief, as_fraction, degenerate
from .exceptions import InvariantViolation
from .experiments import StrategyProfile, product
from .utilities import GamePayoffs, Piece, PiecewiseAffineUtility


@dataclass(frozen=True)
class ActionGame:
    """Finite action set with rational payoff tables.

    ``receiver[a][l]`` and ``senders[i][a][l]`` give the payoff of action
    ``a`` in state ``l``.  Sender payoffs must sum to zero at every (a, l);
    to keep best-action regions well behaved, no agent may be indifferent
    between two actions at any single state.
    """

    actions: tuple[str, ...]
    receiver: tuple[tuple[Fraction, ...], ...]
    senders: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def __post_init__(self):
        receiver = tuple(
            tuple(as_fraction(v) for v in row) for row in self.receiver
        )
        senders = tuple(
            tuple(tuple(as_fraction(v) for v in row) for row in table)
            for table in self.senders
        )
        object.__setattr__(self, "receiver", receiver)
        object.__setattr__(self, "senders", senders)
        a = len(self.actions)
        if a == 0 or len(receiver) != a:
            raise ValueError("need one receiver row per action")
        n = len(receiver[0])
        if any(len(row) != n for row in receiver):
            raise ValueError("receiver rows must share one state count")
        if not senders:
            raise ValueError("need at least one sender table")
        for i, table in enumerate(senders):
            if len(table) != a or any(len(row) != n for row in table):
                raise ValueError(f"sender {i} table shape mismatch")
        for l in range(n):
            for b in range(a):
                total = sum((t[b][l] for t in senders), Fraction(0))
                if total != 0:
                    raise InvariantViolation(
                        f"sender payoffs sum to {total} at action {b}, state {l}"
                    )
        for l in range(n):
            for b in range(a):
                for c in range(b + 1, a):
                    if receiver[b][l] == receiver[c][l]:
                        raise InvariantViolation(
                            f"receiver indifferent between actions {b} and "
                            f"{c} at state {l}"
                        )
                    for i, t in enumerate(senders):
                        if t[b][l] == t[c][l]:
                            raise InvariantViolation(
                                f"sender {i} indifferent between actions "
                                f"{b} and {c} at state {l}"
                            )

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def n_states(self) -> int:
        return len(self.receiver[0])

    @property
    def n_senders(self) -> int:
        return len(self.senders)


def best_action(ag: ActionGame, b: Belief) -> int:
    """Index of the receiver's expected-payoff-maximizing action at belief
    b, lowest index first on ties."""
    best = None
    best_value = None
    for a in range(ag.n_actions):
        value = sum(
            (c * p for c, p in zip(ag.receiver[a], b.probs)), Fraction(0)
        )
        if best_value is None or value > best_value:
            best, best_value = a, value
    return best


def induced_payoff(ag: ActionGame, i: int, b: Belief) -> Fraction:
    """Sender i's expected payoff at belief b given the receiver's choice."""
    a = best_action(ag, b)
    return sum((c * p for c, p in zip(ag.senders[i][a], b.probs)), Fraction(0))


def induced_utility(ag: ActionGame, i: int) -> PiecewiseAffineUtility:
    """Sender i's utility over posteriors as an explicit piecewise-affine
    function: one piece per action, guarded by that action being weakly
    best.  Listing pieces in action order makes first-match evaluation
    reproduce the lowest-index tie-break exactly."""
    n = ag.n_states
    pieces = []
    for a in range(ag.n_actions):
        guard = []
        for c in range(ag.n_actions):
            if c == a:
                continue
            diff = tuple(
                ag.receiver[c][l] - ag.receiver[a][l] for l in range(n)
            )
            guard.append(Constraint(AffineForm(Fraction(0), diff), "<="))
        form = AffineForm(Fraction(0), tuple(ag.senders[i][a]))
        pieces.append(Piece(tuple(guard), form))
    return PiecewiseAffineUtility(tuple(pieces))


def induced_game(ag: ActionGame) -> GamePayoffs:
    """All senders' induced utilities; zero-sum by construction but not yet
    normalized (vertex values are raw table entries)."""
    return GamePayoffs(
        tuple(induced_utility(ag, i) for i in range(ag.n_senders))
    )


@dataclass(frozen=True)
class ActionClassification:
    """vertex_actions[l] is the receiver's action under certainty of state
    l.  Full revelation in every equilibrium of the induced persuasion game
    is equivalent to those actions being pairwise distinct; a repeated pair
    supports a non-revealing equilibrium pooling it."""

    vertex_actions: tuple[int, ...]
    full_revelation: bool
    counterexample: Optional[tuple[int, int]]

    @property
    def first_best_statement(self) -> str:
        if self.full_revelation:
            return (
                "every equilibrium fully reveals the state; the receiver "
                "always takes the full-information action"
            )
        return (
            "equilibria may pool states with a shared best action; the "
            "receiver still takes the full-information action almost surely"
        )


def classify_action_game(ag: ActionGame) -> ActionClassification:
    n = ag.n_states
    vertex_actions = tuple(best_action(ag, degenerate(n, l)) for l in range(n))
    pair = None
    for l in range(n):
        for k in range(l + 1, n):
            if vertex_actions[l] == vertex_actions[k]:
                pair = (l, k)
                break
        if pair:
            break
    return ActionClassification(vertex_actions, pair is None, pair)


@dataclass(frozen=True)
class FirstBestResult:
    """ok means every realized posterior leads the receiver to the same
    action they would take knowing any state in the posterior's support."""

    ok: bool
    posterior: Optional[Belief] = None
    state: Optional[int] = None


def first_best_check(ag: ActionGame, profile: StrategyProfile) -> FirstBestResult:
    """Does the receiver always end up taking their full-information action?

    True for equilibrium profiles of the induced game; pooling states with
    different best actions is the canonical failure."""
    n = ag.n_states
    vertex_actions = tuple(best_action(ag, degenerate(n, l)) for l in range(n))
    joint = product(profile.experiments)
    for b, _ in joint.atoms:
        a = best_action(ag, b)
        for l in sorted(b.support):
            if a != vertex_actions[l]:
                return FirstBestResult(False, b, l)
    return FirstBestResult(True)
