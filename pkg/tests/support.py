"""Shared builders for randomized test instances."""

import numpy as np

from mrfhcf import Clique, DataTerm, Field


def random_field(seed, max_sites=12, labels=None):
    """Small random field: random graph, pair cliques on every edge.

    Potentials are drawn from U[-1, 1] and data terms from U[-2, 2], the
    same ranges the oracle-equivalence checks use, so energies stay well
    away from float trouble.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_sites + 1))
    num_labels = int(rng.choice([2, 3])) if labels is None else labels

    neighbor_sets = [set() for _ in range(n)]
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.4:
                neighbor_sets[a].add(b)
                neighbor_sets[b].add(a)
                edges.append((a, b))
    adjacency = [tuple(sorted(s)) for s in neighbor_sets]

    cliques = []
    for a, b in edges:
        table = rng.uniform(-1.0, 1.0, (num_labels, num_labels))
        cliques.append(Clique((a, b), table))
    if rng.random() < 0.5:
        site = int(rng.integers(n))
        cliques.append(Clique((site,), rng.uniform(-1.0, 1.0, num_labels)))

    data = DataTerm(rng.uniform(-2.0, 2.0, (n, num_labels)))
    return Field(n, num_labels, adjacency, cliques), data


def random_chain(seed, max_sites=10, shuffle_ids=True):
    """Random path-shaped field, optionally with scrambled site ids.

    Consecutive path positions are neighbors; pair potentials U[-1, 1],
    data U[-2, 2], and sometimes a unary clique, matching the ranges of
    the oracle-equivalence checks.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_sites + 1))
    num_labels = int(rng.choice([2, 3]))

    order = rng.permutation(n).tolist() if shuffle_ids and n > 1 else list(range(n))
    neighbor_sets = [set() for _ in range(n)]
    for i in range(n - 1):
        a, b = order[i], order[i + 1]
        neighbor_sets[a].add(b)
        neighbor_sets[b].add(a)
    adjacency = [tuple(sorted(s)) for s in neighbor_sets]

    cliques = []
    for i in range(n - 1):
        table = rng.uniform(-1.0, 1.0, (num_labels, num_labels))
        cliques.append(Clique((order[i], order[i + 1]), table))
    if rng.random() < 0.5:
        site = int(rng.integers(n))
        cliques.append(Clique((site,), rng.uniform(-1.0, 1.0, num_labels)))

    data = DataTerm(rng.uniform(-2.0, 2.0, (n, num_labels)))
    return Field(n, num_labels, adjacency, cliques), data


def exact_marginals(field, data):
    """Per-site Boltzmann marginals at unit temperature by full enumeration."""
    from mrfhcf import energy

    n = field.num_sites
    num_labels = field.num_labels
    weights = np.zeros((n, num_labels))
    total = 0.0
    config = [0] * n
    while True:
        w = np.exp(-energy(field, data, config))
        total += w
        for s in range(n):
            weights[s, config[s]] += w
        # odometer increment over configurations
        pos = 0
        while pos < n:
            config[pos] += 1
            if config[pos] < num_labels:
                break
            config[pos] = 0
            pos += 1
        if pos == n:
            break
    return weights / total
