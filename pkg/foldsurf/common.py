"""
Module with functions, values and exceptions shared across the library.
"""

import math
from typing import Iterable

import numpy as np

# Probabilities are clamped to this range before being turned into weights
PROBABILITY_FLOOR = 1e-12
PROBABILITY_CEILING = 0.5 - 1e-9

# Relative likelihood defining the reported confidence intervals
LIKELIHOOD_FACTOR = 1000


class FoldSurfError(Exception):
    """
    Base class for all errors raised by `foldsurf`.
    """


class CircuitError(FoldSurfError, ValueError):
    """
    Invalid parameters for a layout, a circuit or a noise model.
    """


class DetectorError(FoldSurfError):
    """
    Failure to build a detector or to cover a measurement.
    """


class DecompositionError(FoldSurfError):
    """
    Error location that cannot be expressed with the retained edges.
    """


class MatchingError(FoldSurfError):
    """
    Matching problem without a solution, or a malformed matching graph.
    """


class NondeterminismError(FoldSurfError):
    """
    Random measurement outcome where a fixed one is expected.
    """


class FormatError(FoldSurfError, ValueError):
    """
    Malformed text input.
    """


class PlanError(FoldSurfError, ValueError):
    """
    Reflection that cannot be planned for the given sites and axis.
    """


def xor_prob(p: float, q: float) -> float:
    """
    Probability that exactly one of two independent events happens.

    Parameters
    ----------
    p : float
        Probability of the first event.
    q : float
        Probability of the second event.

    Returns
    -------
    prob : float
        The combined probability `p(1-q) + q(1-p)`.
    """

    return p * (1.0 - q) + q * (1.0 - p)


def xor_probs(probs: Iterable[float]) -> float:
    """
    Fold `xor_prob` over a collection of probabilities.
    """

    ret = 0.0
    for prob in probs:
        ret = xor_prob(ret, prob)

    return ret


def clamp_probability(p: float) -> float:
    """
    Clamp a probability to the range accepted by `weight_from_probability`.
    """

    return min(max(p, PROBABILITY_FLOOR), PROBABILITY_CEILING)


def weight_from_probability(p: float) -> float:
    """
    Return the log-likelihood weight `ln((1-p)/p)` of a (clamped) probability.
    """

    p = clamp_probability(p)
    return math.log((1.0 - p) / p)


def gf2_rank(matrix) -> int:
    """
    Rank of a binary matrix over GF(2), by Gaussian elimination.
    """

    rows = np.array(matrix, dtype=np.uint8) % 2
    if rows.size == 0:
        return 0

    rank = 0
    n_rows, n_cols = rows.shape
    for col in range(n_cols):
        pivots = np.nonzero(rows[rank:, col])[0]
        if pivots.size == 0:
            continue
        pivot = rank + pivots[0]
        if pivot != rank:
            rows[[rank, pivot]] = rows[[pivot, rank]]
        others = np.nonzero(rows[:, col])[0]
        others = others[others != rank]
        rows[others] ^= rows[rank]
        rank += 1
        if rank == n_rows:
            break

    return rank
