"""Backbone separation: components, feasibility, child id sets."""

import itertools

import numpy as np
import pytest

from ktspan import (
    BackboneTree,
    Clique,
    child_id_set,
    component_count_bound,
    feasible_drop,
    path_backbone,
    separate,
)
from ktspan.errors import InconsistentPartitionError
from ktspan.generate import random_backbone
from ktspan.separation import components_masks


def star5():
    # center 2 over vertices 0..4
    return BackboneTree(5, [(0, 2), (1, 2), (2, 3), (2, 4)], 4)


def test_component_count_bound_values():
    assert component_count_bound(2, 2) == 4
    assert component_count_bound(1, 1) == 1
    assert component_count_bound(3, 3) == 9
    with pytest.raises(ValueError):
        component_count_bound(0, 2)
    with pytest.raises(ValueError):
        component_count_bound(2, 0)


def test_separate_path_interior():
    cm = separate(path_backbone(5), Clique.of(1, 2))
    assert cm.components == (frozenset({0}), frozenset({3, 4}))
    assert set(cm.ids) == {0, 3}
    assert cm.component_of(3) == frozenset({3, 4})


def test_separate_path_endpoints():
    cm = separate(path_backbone(5), Clique.of(0, 4))
    assert cm.components == (frozenset({1, 2, 3}),)
    assert set(cm.ids) == {1}


def test_separate_star_center():
    cm = separate(star5(), Clique.of(2, 0))
    assert cm.components == (frozenset({1}), frozenset({3}), frozenset({4}))


def test_separate_out_of_range():
    with pytest.raises(ValueError):
        separate(path_backbone(4), Clique.of(2, 5))


def test_components_masks_named_by_minimum():
    h = path_backbone(6)
    comps = components_masks(h.adj, 6, 0b001100)  # remove {2, 3}
    assert comps == [(0, 0b000011), (4, 0b110000)]
    # ids come out ascending
    assert [cid for cid, _ in comps] == sorted(cid for cid, _ in comps)


def test_feasible_drop_examples():
    h = path_backbone(4)
    parent = Clique.of(0, 1, 2)
    assert not feasible_drop(h, parent, 2, {3})  # backbone edge (2, 3)
    assert feasible_drop(h, parent, 0, {3})
    h5 = path_backbone(5)
    assert feasible_drop(h5, Clique.of(1, 2, 3), 1, {4})
    # region may be a bitmask too
    assert feasible_drop(h5, Clique.of(1, 2, 3), 1, 0b10000)


def test_feasible_drop_requires_membership():
    with pytest.raises(ValueError):
        feasible_drop(path_backbone(4), Clique.of(0, 1, 2), 3, {3})


def test_child_id_set_path_examples():
    h = path_backbone(5)
    ids = child_id_set(h, Clique.of(1, 2, 3), frozenset({3, 4}), 3)
    assert ids == frozenset({4})
    h6 = path_backbone(6)
    ids = child_id_set(h6, Clique.of(2, 3, 4), frozenset({4, 5}), 4)
    assert ids == frozenset({5})


def test_child_id_set_singleton_region():
    ids = child_id_set(path_backbone(4), Clique.of(1, 2, 3), frozenset({3}), 3)
    assert ids == frozenset()


def test_child_id_set_union_region():
    """A branch may take over several components at once; the child ids
    then partition the union minus the pivot."""
    h = star5()
    parent = Clique.of(1, 2)  # k=1 style separator
    region = frozenset({3, 4})  # two components of H - parent, bridged below
    ids = child_id_set(h, Clique.of(2, 3), region, 3)
    assert ids == frozenset({4})


def test_child_id_set_straddle_is_rejected():
    # star center 0: dropping the center strands its far leaves, the
    # resulting component crosses the region boundary
    h = BackboneTree(5, [(0, 1), (0, 2), (0, 3), (0, 4)], 4)
    region = frozenset({3, 4})
    assert not feasible_drop(h, Clique.of(0, 1, 2), 0, region)
    with pytest.raises(InconsistentPartitionError, match="straddles"):
        child_id_set(h, Clique.of(1, 2, 3), region, 3)


def test_separation_bound_random_trees():
    rng = np.random.default_rng(7)
    for _ in range(200):
        d = int(rng.integers(2, 4))
        k = int(rng.integers(1, 4))
        n = int(rng.integers(k + 2, 14))
        h = random_backbone(n, d, rng)
        sep = rng.choice(n, size=k + 1, replace=False)
        cm = separate(h, Clique.of(*(int(v) for v in sep)))
        assert len(cm.components) <= component_count_bound(d, k)
        # components partition the leftover vertices
        rest = set(range(n)) - set(int(v) for v in sep)
        assert set().union(*cm.components) == rest
