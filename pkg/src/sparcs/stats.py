"""Nonparametric comparison of method groups (Kruskal-Wallis H-test)."""

from __future__ import annotations

import numpy as np
from scipy.special import gammaincc

from .errors import SparcsError


class DegenerateGroups(SparcsError):
    """Groups unusable for a rank test (empty or fewer than two)."""


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Midranks: tied values share the average of their rank positions."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def kruskal_wallis(groups) -> tuple:
    """(H statistic with tie correction, chi-square p-value, k-1 dof).

    Returns (0.0, 1.0) when every value across every group is identical.
    """
    groups = [np.asarray(list(g), dtype=float) for g in groups]
    if len(groups) < 2:
        raise DegenerateGroups("need at least two groups")
    if any(len(g) == 0 for g in groups):
        raise DegenerateGroups("groups must be nonempty")
    pooled = np.concatenate(groups)
    n_total = len(pooled)
    ranks = _average_ranks(pooled)
    h = 0.0
    start = 0
    for g in groups:
        r_sum = float(ranks[start : start + len(g)].sum())
        h += r_sum * r_sum / len(g)
        start += len(g)
    h = 12.0 / (n_total * (n_total + 1)) * h - 3.0 * (n_total + 1)

    # tie correction
    _, counts = np.unique(pooled, return_counts=True)
    correction = 1.0 - float(np.sum(counts**3 - counts)) / (n_total**3 - n_total)
    if correction <= 0.0:
        return 0.0, 1.0
    h /= correction
    dof = len(groups) - 1
    p = float(gammaincc(dof / 2.0, max(h, 0.0) / 2.0))
    return float(h), p
