"""Exception types shared across the package."""


class UndefinedPosterior(ArithmeticError):
    """Bayesian update attempted on interim beliefs with disjoint supports."""


class NotOnSubsimplex(ValueError):
    """Belief has support outside the requested state subset."""


class NoPieceMatches(ValueError):
    """A piecewise utility has a coverage gap at the evaluated belief."""


class NotNormalized(ValueError):
    """Operation requires payoffs normalized to vanish at degenerate beliefs."""


class NotPoolable(ValueError):
    """Some sender's utility is nonzero on the sub-simplex, so no pooling
    equilibrium over it exists."""


class PreconditionFailed(ValueError):
    """Input profile does not satisfy the operation's precondition."""


class SearchBudgetExceeded(RuntimeError):
    """Exploit search exhausted its perturbation budget without producing an
    exactly verified certificate."""


class EnumerationTooLarge(RuntimeError):
    """Grid enumeration would exceed the configured cap."""


class ZeroProbabilityEvent(ArithmeticError):
    """Conditioning on a signal tuple with zero joint likelihood."""


class InvariantViolation(ValueError):
    """A declared model invariant (zero-sum, genericity, ...) fails."""


class ScenarioError(ValueError):
    """Malformed scenario, profile, or fixture input."""
