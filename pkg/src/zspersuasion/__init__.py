"""Exact analysis of zero-sum multi-sender persuasion games.

Computes, constructs, classifies, and verifies equilibria of zero-sum
Bayesian persuasion games in which several senders run conditionally
independent experiments.  All arithmetic is exact over rationals.
"""

__version__ = "0.1.0"
