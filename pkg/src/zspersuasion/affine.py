"""Affine forms and affine constraints over belief coordinates."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .beliefs import Belief, as_fraction

OPS = ("<", "<=", ">", ">=", "==")

_NEGATED = {"<": ">=", "<=": ">", ">": "<=", ">=": "<"}
_WEAKENED = {"<": "<=", "<=": "<=", ">": ">=", ">=": ">=", "==": "=="}


@dataclass(frozen=True)
class AffineForm:
    """const + sum_l coeffs[l] * beta_l."""

    const: Fraction
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "const", as_fraction(self.const))
        object.__setattr__(
            self, "coeffs", tuple(as_fraction(c) for c in self.coeffs)
        )

    @property
    def n_states(self) -> int:
        return len(self.coeffs)

    def __call__(self, b: Belief) -> Fraction:
        return self.const + sum(
            (c * p for c, p in zip(self.coeffs, b.probs)), Fraction(0)
        )

    def at_point(self, point: tuple[Fraction, ...]) -> Fraction:
        return self.const + sum(
            (c * p for c, p in zip(self.coeffs, point)), Fraction(0)
        )

    def __add__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(
            self.const + other.const,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __neg__(self) -> "AffineForm":
        return AffineForm(-self.const, tuple(-c for c in self.coeffs))

    def scale(self, factor: Fraction) -> "AffineForm":
        factor = as_fraction(factor)
        return AffineForm(self.const * factor, tuple(c * factor for c in self.coeffs))

    def is_zero(self) -> bool:
        return self.const == 0 and all(c == 0 for c in self.coeffs)

    def on_edge(self, l: int, k: int) -> tuple[Fraction, Fraction]:
        """Restrict to beta(t) = (1-t) delta_l + t delta_k; returns
        (constant, slope) in the edge parameter t."""
        return (self.const + self.coeffs[l], self.coeffs[k] - self.coeffs[l])

    @staticmethod
    def zero(n_states: int) -> "AffineForm":
        return AffineForm(Fraction(0), tuple(Fraction(0) for _ in range(n_states)))


@dataclass(frozen=True)
class Constraint:
    """The affine inequality or equality ``expr op 0``."""

    expr: AffineForm
    op: str

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown constraint op {self.op!r}")

    def holds(self, b: Belief) -> bool:
        return self.holds_value(self.expr(b))

    def holds_at(self, point: tuple[Fraction, ...]) -> bool:
        return self.holds_value(self.expr.at_point(point))

    def holds_value(self, v: Fraction) -> bool:
        if self.op == "<":
            return v < 0
        if self.op == "<=":
            return v <= 0
        if self.op == ">":
            return v > 0
        if self.op == ">=":
            return v >= 0
        return v == 0

    def negated(self) -> "Constraint":
        if self.op == "==":
            raise ValueError("cannot negate an equality into one constraint")
        return Constraint(self.expr, _NEGATED[self.op])

    def weakened(self) -> "Constraint":
        return Constraint(self.expr, _WEAKENED[self.op])

    @property
    def is_strict(self) -> bool:
        return self.op in ("<", ">")
