"""Exact simplex geometry: beliefs, state subsets, ratio representations,
and Bayesian combination of conditionally independent interim beliefs.

All arithmetic is over ``fractions.Fraction``; nothing in this module touches
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .exceptions import NotOnSubsimplex, UndefinedPosterior

Rational = Fraction


class _Infinity:
    """Tag for an infinite ratio-representation entry (degenerate belief)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Infinity"


INFINITY = _Infinity()

RatioEntry = Union[Fraction, _Infinity]


def as_fraction(value) -> Fraction:
    """Coerce ints, strings like ``"3/5"``, and Fractions to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not allowed in exact belief arithmetic")
    return Fraction(value)


@dataclass(frozen=True)
class Belief:
    """A rational point of the probability simplex over N states."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(as_fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise ValueError("belief needs at least one state")
        if any(p < 0 for p in probs):
            raise ValueError(f"negative probability in {probs}")
        if sum(probs) != 1:
            raise ValueError(f"probabilities sum to {sum(probs)}, not 1")

    @property
    def n_states(self) -> int:
        return len(self.probs)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(l for l, p in enumerate(self.probs) if p > 0)

    def has_full_support(self) -> bool:
        return all(p > 0 for p in self.probs)

    def is_degenerate(self) -> bool:
        return any(p == 1 for p in self.probs)

    def __getitem__(self, l: int) -> Fraction:
        return self.probs[l]

    def __len__(self) -> int:
        return len(self.probs)

    def __iter__(self):
        return iter(self.probs)


def belief(values: Iterable) -> Belief:
    """Build a Belief from any iterable of rational-like values."""
    return Belief(tuple(as_fraction(v) for v in values))


def degenerate(n_states: int, l: int) -> Belief:
    """The belief putting probability one on state ``l``."""
    return Belief(tuple(Fraction(1 if i == l else 0) for i in range(n_states)))


def uniform(n_states: int) -> Belief:
    return Belief(tuple(Fraction(1, n_states) for _ in range(n_states)))


def state_set(members: Iterable[int], n_states: int) -> tuple[int, ...]:
    """Normalize a non-empty set of state indices to a sorted tuple."""
    omega = tuple(sorted(set(members)))
    if not omega:
        raise ValueError("state set must be non-empty")
    if omega[0] < 0 or omega[-1] >= n_states:
        raise ValueError(f"state indices {omega} out of range for N={n_states}")
    return omega


@dataclass(frozen=True)
class RatioRep:
    """Successive-ratio coordinates of a belief on the sub-simplex over an
    ordered state subset of size K: K-1 entries, each a nonnegative rational
    or INFINITY."""

    ratios: tuple[RatioEntry, ...]
    states: tuple[int, ...]

    def __post_init__(self):
        if len(self.ratios) != len(self.states) - 1:
            raise ValueError("need exactly K-1 ratios for K states")
        for r in self.ratios:
            if r is INFINITY:
                continue
            if not isinstance(r, Fraction) or r < 0:
                raise ValueError(f"ratio entries must be >= 0 or Infinity, got {r!r}")


def combine(prior: Belief, interim: Sequence[Belief]) -> Belief:
    """Posterior from conditionally independent interim beliefs.

    The posterior weight of state l is (prod_i x^i_l) / prior_l^(T-1); the
    result's support is the intersection of the interim supports.

    Raises UndefinedPosterior when that intersection is empty (the interim
    beliefs contradict each other; probability-zero on valid profiles).
    """
    if not prior.has_full_support():
        raise ValueError("prior must have full support")
    interim = list(interim)
    if not interim:
        return prior
    n = prior.n_states
    for x in interim:
        if x.n_states != n:
            raise ValueError("state-count mismatch between prior and interim beliefs")
    t = len(interim)
    weights = []
    for l in range(n):
        w = Fraction(1)
        for x in interim:
            w *= x[l]
        weights.append(w / prior[l] ** (t - 1))
    total = sum(weights)
    if total == 0:
        raise UndefinedPosterior("interim beliefs have disjoint supports")
    return Belief(tuple(w / total for w in weights))


def ratio_rep(b: Belief, omega: tuple[int, ...]) -> RatioRep:
    """Ratio representation of ``b`` relative to the ordered subset ``omega``.

    Entry k is gamma_k / (mass on later states); 0 or INFINITY when the
    denominator vanishes, depending on the numerator.
    """
    omega = state_set(omega, b.n_states)
    if not b.support <= set(omega):
        raise NotOnSubsimplex(f"support {sorted(b.support)} not within {omega}")
    gammas = [b[l] for l in omega]
    ratios: list[RatioEntry] = []
    for k in range(len(omega) - 1):
        tail = sum(gammas[k + 1:])
        if tail > 0:
            ratios.append(gammas[k] / tail)
        elif gammas[k] > 0:
            ratios.append(INFINITY)
        else:
            ratios.append(Fraction(0))
    return RatioRep(tuple(ratios), omega)


def belief_from_ratio_rep(r: RatioRep, n_states: int) -> Belief:
    """The unique belief on the sub-simplex with the given ratio
    representation (back-substitution)."""
    omega = r.states
    gammas = [Fraction(0)] * len(omega)
    remaining = Fraction(1)
    exhausted = False
    for k, entry in enumerate(r.ratios):
        if exhausted:
            if entry != 0:
                raise ValueError("nonzero ratio after an Infinity entry")
            continue
        if entry is INFINITY:
            gammas[k] = remaining
            remaining = Fraction(0)
            exhausted = True
        else:
            # entry = gamma_k / (remaining - gamma_k)
            gammas[k] = entry * remaining / (1 + entry)
            remaining -= gammas[k]
    if not exhausted:
        gammas[-1] = remaining
    probs = [Fraction(0)] * n_states
    for l, g in zip(omega, gammas):
        probs[l] = g
    return Belief(tuple(probs))
