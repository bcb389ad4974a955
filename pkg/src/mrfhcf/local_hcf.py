"""Synchronous, locally parallel HCF with a bit-exact determinism contract.

Each iteration reads every site's stability from the pre-iteration
configuration, then changes all eligible sites at once. A site is eligible
when its ordered stability (stability, rank) is strictly below the minimum
ordered stability over all of its neighbors, and either its stability is
negative or it is uncommitted with stability exactly 0. Two neighbors can
never change in the same iteration, so the sweep is safe to evaluate in
parallel; any thread count produces bit-identical results.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import UNCOMMITTED, _local_row, augmented_energy
from .hcf import _check_ranks, _check_runnable, _row_stats
from .trace import RunTrace, TraceRow


@dataclass(frozen=True)
class StepResult:
    changed_sites: tuple[int, ...]
    new_commits: int
    energy_after: float
    any_change: bool


def assign_ranks(field, mode: str = "site-index", seed: int | None = None) -> np.ndarray:
    """Distinct per-site ranks used to break stability ties.

    ``site-index`` ranks sites by their index; ``seeded-permutation`` draws
    a reproducible random permutation for experiments with tie-break order.
    """
    n = field.num_sites
    if mode == "site-index":
        return np.arange(n, dtype=np.int64)
    if mode == "seeded-permutation":
        if seed is None:
            raise ValueError("seeded-permutation rank mode needs a seed")
        return np.random.default_rng(seed).permutation(n).astype(np.int64)
    raise ValueError(f"unknown rank mode: {mode!r}")


def _read_range(field, data, cfg, lo, hi, g_out, best_out):
    for s in range(lo, hi):
        row = _local_row(field, data, cfg, s)
        b, _bv, g = _row_stats(row, cfg[s])
        best_out[s] = b
        g_out[s] = g


def local_hcf_step(field, data, config, ranks, threads: int = 1):
    """One synchronous iteration; returns (new configuration, StepResult).

    Reads all stabilities and best labels from ``config``, then writes the
    changes of every eligible site. The input configuration is not
    modified. ``energy_after`` is the augmented energy of the returned
    configuration.
    """
    cfg_arr = np.asarray(config)
    cfg = cfg_arr.tolist()
    n = field.num_sites
    rank = _check_ranks(field, ranks)

    g = [0.0] * n
    best = [0] * n
    if threads <= 1 or n < 2 * threads:
        _read_range(field, data, cfg, 0, n, g, best)
    else:
        # disjoint per-site writes keep any chunking bit-identical
        step = (n + threads - 1) // threads
        spans = [(lo, min(lo + step, n)) for lo in range(0, n, step)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda span: _read_range(field, data, cfg, span[0], span[1],
                                                   g, best), spans))

    adjacency = field.adjacency
    changed = []
    commits = 0
    for s in range(n):
        gs = g[s]
        if gs < 0 or (gs == 0 and cfg[s] == UNCOMMITTED):
            rs = rank[s]
            eligible = True
            for r in adjacency[s]:
                gr = g[r]
                if not (gs < gr or (gs == gr and rs < rank[r])):
                    eligible = False
                    break
            if eligible:
                changed.append(s)
                if cfg[s] == UNCOMMITTED:
                    commits += 1

    new_cfg = np.array(cfg_arr, dtype=np.int64)
    for s in changed:
        new_cfg[s] = best[s]
    energy_after = augmented_energy(field, data, new_cfg)
    return new_cfg, StepResult(tuple(changed), commits, energy_after, bool(changed))


def local_hcf_run(field, data, ranks=None, max_iterations: int | None = None,
                  threads: int = 1):
    """Iterate synchronous sweeps from all-uncommitted until nothing changes.

    Returns (configuration, RunTrace). Trace row 0 describes the initial
    all-uncommitted state; each subsequent row records one sweep with the
    augmented energy of the configuration it produced. The returned
    configuration is fully committed; output and trace are bit-identical
    across repeated runs and across thread counts.
    """
    _check_runnable(field, data)
    n = field.num_sites
    if ranks is None:
        ranks = assign_ranks(field)
    rank = _check_ranks(field, ranks)
    cap = max_iterations if max_iterations is not None else 100 * n * field.num_labels

    cfg = np.full(n, UNCOMMITTED, dtype=np.int64)
    rows = [TraceRow(0, 0.0, 0, 0)]
    committed = 0
    iteration = 0

    while True:
        while True:
            iteration += 1
            if iteration > cap:
                raise RuntimeError(f"local HCF exceeded its iteration cap ({cap}); "
                                   "check the inputs for pathological values")
            cfg, result = local_hcf_step(field, data, cfg, ranks, threads=threads)
            committed += result.new_commits
            rows.append(TraceRow(iteration, result.energy_after, committed,
                                 len(result.changed_sites)))
            if not result.any_change:
                break
        leftovers = [s for s in range(n) if cfg[s] == UNCOMMITTED]
        if not leftovers:
            break
        # Exact-tie degenerate case: a zero-stability uncommitted site can
        # be blocked forever by a committed neighbor of equal stability and
        # lower rank. Commit the lowest ordered stability by hand, then
        # resume the synchronous sweeps.
        iteration += 1
        if iteration > cap:
            raise RuntimeError(f"local HCF exceeded its iteration cap ({cap})")
        cfg_list = cfg.tolist()
        ordered = []
        for s in leftovers:
            row = _local_row(field, data, cfg_list, s)
            b, _bv, g = _row_stats(row, UNCOMMITTED)
            ordered.append(((g, rank[s]), s, b))
        ordered.sort()
        _key, s, b = ordered[0]
        cfg = cfg.copy()
        cfg[s] = b
        committed += 1
        rows.append(TraceRow(iteration, augmented_energy(field, data, cfg), committed, 1))

    return cfg, RunTrace(tuple(rows))
