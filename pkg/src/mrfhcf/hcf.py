"""Serial highest-confidence-first relaxation driven by an indexed min-heap.

Every site starts uncommitted and carries a stability value: for an
uncommitted site the (non-positive) negated gap between its best and
second-best local energies, for a committed site the gap between its
current label and the best alternative (negative exactly when a strictly
better label exists). Stabilities are ordered lexicographically with a
per-site rank as tie-break, and the site with the minimum ordered
stability acts first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import UNCOMMITTED, _as_labels, _check_problem, _local_row, validate_field
from .heap import IndexedMinHeap


@dataclass(frozen=True)
class HCFStep:
    step: int
    site: int
    label: int
    stability: float
    energy_after: float
    committed_after: int


@dataclass(frozen=True)
class HCFTrace:
    steps: tuple[HCFStep, ...]


def _argmin_row(row):
    # smallest index wins ties
    best = 0
    best_val = row[0]
    for l in range(1, len(row)):
        if row[l] < best_val:
            best = l
            best_val = row[l]
    return best, best_val


def _row_stats(row, current):
    """(best label, best value, stability) for one site's local energy row.

    ``current`` is the site's committed label or UNCOMMITTED. Needs at
    least two labels.
    """
    best, best_val = _argmin_row(row)
    if current == UNCOMMITTED:
        second = min(row[l] for l in range(len(row)) if l != best)
        return best, best_val, -(second - best_val)
    alt = min(row[l] for l in range(len(row)) if l != current)
    return best, best_val, alt - row[current]


def best_label(field, data, config, site: int) -> tuple[int, float]:
    """Committed label with the lowest local energy at ``site`` and that energy.

    Ties go to the smallest label index; the site's own current label does
    not influence the result.
    """
    _check_problem(field, data)
    cfg = _as_labels(config)
    if not 0 <= site < field.num_sites:
        raise ValueError(f"site {site} out of range")
    row = _local_row(field, data, cfg, site)
    best, best_val = _argmin_row(row)
    return best, best_val


def stability(field, data, config, site: int) -> float:
    """Stability of one site under the current configuration.

    Uncommitted sites get the negated best-versus-second-best gap (always
    <= 0); committed sites get the best-alternative gap relative to their
    current label (negative iff a strictly better label exists).
    """
    _check_problem(field, data)
    if field.num_labels < 2:
        raise ValueError("stability needs at least two labels")
    cfg = _as_labels(config)
    if not 0 <= site < field.num_sites:
        raise ValueError(f"site {site} out of range")
    row = _local_row(field, data, cfg, site)
    return _row_stats(row, cfg[site])[2]


def _check_runnable(field, data):
    problems = validate_field(field)
    if problems:
        raise ValueError("invalid field: " + "; ".join(problems[:3]))
    if field.num_labels < 2:
        raise ValueError("estimators need at least two labels")
    _check_problem(field, data)


def _check_ranks(field, ranks):
    if ranks is None:
        return list(range(field.num_sites))
    arr = np.asarray(ranks)
    if arr.shape != (field.num_sites,) or not np.array_equal(
            np.sort(arr), np.arange(field.num_sites)):
        raise ValueError("ranks must be a permutation of the site indices")
    return [int(r) for r in arr]


def hcf_run(field, data, ranks=None, max_steps: int | None = None):
    """Run serial HCF from the all-uncommitted configuration.

    Repeatedly takes the site with the minimum ordered stability off the
    heap while that stability is negative, moves it to its best label, and
    refreshes the stabilities of the site and its neighbors. Uncommitted
    sites whose labels tie exactly (stability 0) are committed once no
    negative stability remains, lowest ordered stability first, so the
    result is always fully committed.

    Returns (configuration, HCFTrace). The trace's energy entries are the
    augmented energy maintained incrementally from the exact per-step
    deltas; each change of an already committed site lowers it by exactly
    the magnitude of that site's stability.
    """
    _check_runnable(field, data)
    n = field.num_sites
    rank = _check_ranks(field, ranks)
    cap = max_steps if max_steps is not None else 100 * n * field.num_labels

    cfg = [UNCOMMITTED] * n
    stab = [0.0] * n
    for s in range(n):
        row = _local_row(field, data, cfg, s)
        stab[s] = _row_stats(row, UNCOMMITTED)[2]
    heap = IndexedMinHeap((stab[s], rank[s]) for s in range(n))

    steps = []
    aug = 0.0
    committed = 0

    def refresh(t):
        row = _local_row(field, data, cfg, t)
        g = _row_stats(row, cfg[t])[2]
        stab[t] = g
        heap.update(t, (g, rank[t]))

    def change(s, g_at_pop):
        nonlocal aug, committed
        if len(steps) >= cap:
            raise RuntimeError(f"HCF exceeded its step cap ({cap}); "
                               "check the inputs for pathological values")
        row = _local_row(field, data, cfg, s)
        best, best_val = _argmin_row(row)
        prev = cfg[s]
        delta = best_val if prev == UNCOMMITTED else best_val - row[prev]
        cfg[s] = best
        if prev == UNCOMMITTED:
            committed += 1
        aug += delta
        refresh(s)
        for r in field.adjacency[s]:
            refresh(r)
        steps.append(HCFStep(len(steps), s, best, g_at_pop, aug, committed))

    while True:
        (g, _rk), s = heap.peek()
        if g < 0:
            change(s, g)
            continue
        if committed == n:
            break
        # Exact-tie degenerate case: every remaining uncommitted site has
        # stability 0. Commit them lowest ordered stability first so the
        # run still ends fully committed.
        s = min((t for t in range(n) if cfg[t] == UNCOMMITTED),
                key=lambda t: (stab[t], rank[t]))
        change(s, stab[s])

    return np.array(cfg, dtype=np.int64), HCFTrace(tuple(steps))
