"""Clique decision through backbone-retaining spanning k-tree search.

A k-clique query on G becomes an optimization instance on the complete
graph with 0/1 pair weights (1 on edges of G), the identity-order
Hamiltonian path as backbone, and order k-1. Clique scores multiply
their pair weights, so the optimum reaches the threshold 1 exactly
when some clique of the (k-1)-tree lies entirely inside G. For k >= 3
that happens iff G has a k-clique; k = 2 degenerates (the only 1-tree
retaining the path is the path itself) and the decision is only
meaningful for k >= 3.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .graphs import BackboneTree, UndirectedGraph, path_backbone
from .information import WeightProductOracle
from .solver import solve_retaining_mskt


@dataclass(frozen=True, eq=False)
class HMsktInstance:
    """Reduced instance: complete weighted host, path backbone,
    order kprime = k-1, and score threshold sigma = 1."""

    gprime: UndirectedGraph
    h: BackboneTree
    kprime: int
    sigma: float


def reduce_kclique(g: UndirectedGraph, k: int) -> HMsktInstance:
    """Build the spanning-k-tree instance deciding a k-clique in g."""
    if not 2 <= k <= g.n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={g.n}")
    weights = {e: (1.0 if e in g.edges else 0.0)
               for e in itertools.combinations(range(g.n), 2)}
    gprime = UndirectedGraph.complete(g.n, weights)
    return HMsktInstance(gprime, path_backbone(g.n), k - 1, 1.0)


def decide_kclique(g: UndirectedGraph, k: int) -> bool:
    """Decide whether g has a k-clique by solving the reduced instance."""
    inst = reduce_kclique(g, k)
    oracle = WeightProductOracle(inst.gprime)
    result = solve_retaining_mskt(inst.gprime, inst.h, inst.kprime, oracle)
    return result.score >= inst.sigma
