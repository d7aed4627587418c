"""Separator components of the backbone tree.

Removing a candidate clique from the backbone leaves a forest. Each
connected component is a region the construction must still cover, and
is named by its smallest vertex. Bounded backbone degree caps how many
regions a separator can create, which is what keeps the search state
space polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InconsistentPartitionError
from .graphs import BackboneTree, Clique, iter_bits, mask_of


def component_count_bound(degree_bound: int, k: int) -> int:
    """Most components removing k+1 vertices can leave in a tree of
    maximum degree degree_bound."""
    if degree_bound < 1 or k < 1:
        raise ValueError("need degree_bound >= 1 and k >= 1")
    return degree_bound * (k + 1) - k


def components_masks(adj, n: int, sep_mask: int):
    """Connected components after deleting sep_mask, as bitmasks.

    adj is a per-vertex neighbor bitmask list. Returns a list of
    (min_vertex, component_mask) pairs ascending by min_vertex.
    """
    remaining = ((1 << n) - 1) & ~sep_mask
    out = []
    while remaining:
        low = remaining & -remaining
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= adj[v]
            frontier = nxt & remaining & ~comp
            comp |= frontier
        out.append((low.bit_length() - 1, comp))
        remaining &= ~comp
    return out


@dataclass(frozen=True, eq=False)
class ComponentMap:
    """Components of the backbone minus a separator.

    components are frozensets ordered by smallest member. A component
    is named by its smallest vertex; ids maps that canonical id to the
    component's index in the components tuple.
    """

    separator: Clique
    components: tuple
    ids: dict

    def component_of(self, cid: int) -> frozenset:
        return self.components[self.ids[cid]]


def separate(h: BackboneTree, sep: Clique) -> ComponentMap:
    """Split the backbone by removing the separator's vertices."""
    for v in sep:
        if not 0 <= v < h.n:
            raise ValueError(f"separator vertex {v} out of range for n={h.n}")
    comps = components_masks(h.adj, h.n, mask_of(sep))
    ids = {cid: i for i, (cid, _) in enumerate(comps)}
    return ComponentMap(sep, tuple(frozenset(iter_bits(m)) for _, m in comps), ids)


def _as_mask(region) -> int:
    return region if isinstance(region, int) else mask_of(region)


def feasible_drop(h: BackboneTree, parent: Clique, drop: int, region) -> bool:
    """May `drop` leave the separator while the search enters `region`?

    Separators below this point never contain drop again, so any
    backbone edge from drop into the region would become uncoverable.
    Feasible iff drop has no backbone neighbor inside the region, which
    is passed as a vertex set or bitmask.
    """
    if drop not in parent:
        raise ValueError(f"vertex {drop} not in separator {parent.members}")
    return h.adj[drop] & _as_mask(region) == 0


def child_id_set(h: BackboneTree, child: Clique, region, pivot: int) -> frozenset:
    """Component ids the child separator still has to resolve.

    region is the slice of the parent's territory this branch enters,
    either one component of backbone minus parent or a union of several.
    The components of the backbone minus the child that lie inside
    region - {pivot} must partition it exactly; anything else means the
    transition itself was malformed.
    """
    rmask = _as_mask(region) & ~(1 << pivot)
    ids = []
    covered = 0
    for cid, m in components_masks(h.adj, h.n, mask_of(child)):
        if m & rmask:
            if m & ~rmask:
                raise InconsistentPartitionError(
                    f"component {sorted(iter_bits(m))} of child separator "
                    f"{child.members} straddles the region boundary")
            ids.append(cid)
            covered |= m
    if covered != rmask:
        raise InconsistentPartitionError(
            f"child separator {child.members} leaves region vertices "
            f"{sorted(iter_bits(rmask & ~covered))} unreachable")
    return frozenset(ids)
