"""Exhaustive reference implementations: k-tree enumeration, rooted
rescoring, KL minimization, and clique search.

The search here is deliberately independent of the dynamic program in
solver.py; only the shared graph types and the objective evaluator
score_ktree are reused. Hard size guards keep the exponential routines
at desk scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InfeasibleError, InstanceTooLargeError
from .graphs import (
    BackboneTree,
    Clique,
    KTree,
    UndirectedGraph,
    build_tree_decomposition,
    iter_bits,
    mask_of,
    normalize_edge,
    require_retaining,
    reroot,
    validate_backbone,
    validate_ktree,
)
from .information import JointTable, kl_divergence, markov_ktree_distribution
from .solver import score_ktree

ENUM_MAX_N = 9
ENUM_MAX_K = 3
CLIQUE_MAX_N = 20
CLIQUE_MAX_K = 6


@dataclass
class EnumerationReport:
    """Outcome of exhaustive k-tree enumeration.

    instances hold one witness KTree per distinct edge set, sorted by
    edge list. best and best_score stay None until brute_max_score
    fills them in.
    """

    instances: tuple
    best: KTree | None = None
    best_score: float | None = None


def enumerate_retaining_ktrees(g: UndirectedGraph, h, k: int) -> EnumerationReport:
    """All spanning k-trees of g that contain h (all k-trees when h is None).

    Breadth-first over partial constructions deduplicated by (vertex
    set, edge set); a new vertex must immediately receive every
    backbone edge to already-present vertices, since rule 2 never adds
    an edge between two existing vertices later.
    """
    n = g.n
    if n > ENUM_MAX_N or k > ENUM_MAX_K:
        raise InstanceTooLargeError(
            f"enumeration guarded to n <= {ENUM_MAX_N}, k <= {ENUM_MAX_K}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if h is not None:
        err = validate_backbone(g, h)
        if err is not None:
            raise ValueError(f"invalid backbone: {err}")
    hadj = h.adj if h is not None else [0] * n
    pair_pos = {p: i for i, p in enumerate(itertools.combinations(range(n), 2))}
    full = (1 << n) - 1
    parents = {}
    frontier = []
    for seed in itertools.combinations(range(n), k):
        if not g.is_clique(seed):
            continue
        ebits = 0
        for p in itertools.combinations(seed, 2):
            ebits |= 1 << pair_pos[p]
        state = (mask_of(seed), ebits)
        if state not in parents:
            parents[state] = (None, seed, None)
            frontier.append(state)
    while frontier:
        nxt = []
        for state in frontier:
            cmask, ebits = state
            if cmask == full:
                continue
            created = tuple(iter_bits(cmask))
            for base in itertools.combinations(created, k):
                if any(not ebits >> pair_pos[p] & 1
                       for p in itertools.combinations(base, 2)):
                    continue
                bmask = mask_of(base)
                for v in iter_bits(full & ~cmask):
                    if bmask & ~g.adj[v]:
                        continue
                    if hadj[v] & cmask & ~bmask:
                        continue
                    nbits = ebits
                    for b in base:
                        nbits |= 1 << pair_pos[normalize_edge(v, b)]
                    nstate = (cmask | 1 << v, nbits)
                    if nstate not in parents:
                        parents[nstate] = (state, v, base)
                        nxt.append(nstate)
        frontier = nxt
    instances = []
    for state in parents:
        if state[0] != full:
            continue
        entries = []
        cur = state
        while True:
            prev, v, base = parents[cur]
            if prev is None:
                seed = v
                break
            entries.append((v, base))
            cur = prev
        entries.reverse()
        order = [(s, seed[:j]) for j, s in enumerate(seed)] + entries
        t = KTree.from_creation_order(n, k, order)
        err = validate_ktree(t)
        if err is not None:
            raise RuntimeError(f"enumeration produced an invalid k-tree: {err}")
        if h is not None:
            require_retaining(t, h)
        instances.append(t)
    instances.sort(key=lambda t: tuple(sorted(t.edges)))
    return EnumerationReport(tuple(instances))


def best_rooted_score(t: KTree, h: BackboneTree, oracle):
    """Best construction score of the fixed k-tree t.

    The same edge set admits many creation orders, and scores depend on
    which vertex acts as pivot for each clique, so an edge set alone
    does not determine a score. Any (k+1)-clique of t can serve as the
    root of a rewritten creation order, and the score is a function of
    (edge set, root) only, so trying every clique as root via reroot
    covers every achievable score. Returns (score, witness KTree) for
    the best construction, or (None, None) when every one is forbidden.
    """
    err = validate_ktree(t)
    if err is not None:
        raise ValueError(f"invalid k-tree: {err}")
    require_retaining(t, h)
    if t.n == t.k:
        raise ValueError("k-tree equals its seed clique, nothing to score")
    best = None
    winner = None
    for node in sorted(c.members for c in build_tree_decomposition(t).nodes):
        rooted = reroot(t, Clique.of(node))
        val = score_ktree(rooted, h, oracle)
        if val is None:
            continue
        if best is None or val > best:
            best = val
            winner = rooted
    if best is None:
        return None, None
    return best, winner


def brute_max_score(report: EnumerationReport, h: BackboneTree, oracle):
    """Maximum construction score over all enumerated instances.

    Instances are scanned in sorted-edge-list order, so ties keep the
    lexicographically least edge set. Fills report.best and
    report.best_score; returns (ktree, score).
    """
    best = None
    winner = None
    for t in report.instances:
        val, witness = best_rooted_score(t, h, oracle)
        if val is None:
            continue
        if best is None or val > best:
            best = val
            winner = witness
    if winner is None:
        raise InfeasibleError("no enumerated k-tree has a defined score")
    report.best = winner
    report.best_score = best
    return winner, best


def brute_min_kl(p: JointTable, g: UndirectedGraph, h: BackboneTree, k: int):
    """Optimal projection by enumeration: returns the retaining k-tree
    whose induced distribution minimizes D(p || .), with the value."""
    report = enumerate_retaining_ktrees(g, h, k)
    best = None
    winner = None
    for t in report.instances:
        d = kl_divergence(p, markov_ktree_distribution(t, p))
        if best is None or d < best:
            best = d
            winner = t
    if winner is None:
        raise InfeasibleError("no spanning k-tree retains the backbone")
    return winner, best


def max_clique_exists(g: UndirectedGraph, k: int) -> bool:
    """Does g contain a clique on k vertices? Plain subset scan."""
    if g.n > CLIQUE_MAX_N or k > CLIQUE_MAX_K:
        raise InstanceTooLargeError(
            f"clique scan guarded to n <= {CLIQUE_MAX_N}, k <= {CLIQUE_MAX_K}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    return any(g.is_clique(c) for c in itertools.combinations(range(g.n), k))
