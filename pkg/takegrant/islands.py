import collections
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

import numpy as np

from takegrant.exceptions import IslandError, VertexKindError
from takegrant.graph import ProtectionGraph, build_island_view

logger = logging.getLogger(__name__)

DSU = 'dsu'
FLOYD = 'floyd'


@dataclass(frozen=True)
class Island:
    """Maximal set of subjects joined by tg-paths that run through subjects only."""
    id: int
    members: FrozenSet[str]

    def __contains__(self, name):
        return name in self.members

    def sorted_members(self):
        return sorted(self.members)

    def __str__(self):
        return '{}: {{{}}}'.format(self.id, ', '.join(self.sorted_members()))


class DisjointSet:
    """Union-find with union by rank and path compression."""

    def __init__(self, elements=()):
        self.parent = {}
        self.rank = {}
        for element in elements:
            self.make_set(element)

    def make_set(self, e):
        if e in self.parent:
            return
        self.parent[e] = e
        self.rank[e] = 0

    def find(self, e):
        self.make_set(e)
        root = e
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[e] != root:
            self.parent[e], e = root, self.parent[e]
        return root

    def union(self, x, y):
        x_root = self.find(x)
        y_root = self.find(y)
        if x_root == y_root:
            return
        if self.rank[x_root] < self.rank[y_root]:
            x_root, y_root = y_root, x_root
        self.parent[y_root] = x_root
        if self.rank[x_root] == self.rank[y_root]:
            self.rank[x_root] += 1

    def sets(self) -> List[FrozenSet]:
        groups = collections.defaultdict(set)
        for e in self.parent:
            groups[self.find(e)].add(e)
        return [frozenset(group) for group in groups.values()]


def _number(groups) -> List[Island]:
    ordered = sorted(groups, key=min)
    return [Island(index, frozenset(group)) for index, group in enumerate(ordered)]


def _islands_dsu(g):
    view = build_island_view(g)
    components = DisjointSet(g.subjects)
    for vertex in g.subjects:
        for neighbor in view.adjacency[vertex]:
            components.union(vertex, neighbor)
    return _number(components.sets())


def island_distances(g: ProtectionGraph) -> Tuple[Tuple[str, ...], np.ndarray]:
    """
    Floyd's all-pairs shortest paths over the island view, restricted to subjects, with unit weights.

    :param g: Protection graph.
    :return: (subject names, distance matrix); unreachable pairs hold numpy.inf.
    """
    names = g.subjects
    index = {name: i for i, name in enumerate(names)}
    view = build_island_view(g)
    dist = np.full((len(names), len(names)), np.inf)
    np.fill_diagonal(dist, 0.0)
    for name in names:
        for neighbor in view.adjacency[name]:
            dist[index[name], index[neighbor]] = 1.0
    for k in range(len(names)):
        np.minimum(dist, dist[:, k, None] + dist[None, k, :], out=dist)
    return names, dist


def _islands_floyd(g):
    names, dist = island_distances(g)
    assigned = set()
    groups = []
    for i, name in enumerate(names):
        if name in assigned:
            continue
        group = {names[j] for j in np.flatnonzero(np.isfinite(dist[i]))}
        assigned |= group
        groups.append(group)
    return _number(groups)


def compute_islands(g: ProtectionGraph, method=DSU) -> List[Island]:
    """
    Partition the subjects into islands, numbered in order of their smallest member.

    :param g: Protection graph.
    :param method: 'dsu' (union-find over the island view) or 'floyd' (read off Floyd's all-pairs distances).
    :return: List of Island.
    """
    if method == DSU:
        islands = _islands_dsu(g)
    elif method == FLOYD:
        islands = _islands_floyd(g)
    else:
        raise ValueError("Unknown island method '{}'.".format(method))
    logger.debug('%d islands over %d subjects (%s)', len(islands), len(g.subjects), method)
    return islands


class IslandIndex:
    """Islands of one graph with a vertex lookup. Built once per graph, see island_index."""

    def __init__(self, g: ProtectionGraph):
        self.graph = g
        self.islands = tuple(compute_islands(g))
        self._by_vertex: Dict[str, Island] = {name: island for island in self.islands for name in island.members}

    def island_of(self, name) -> Island:
        if not self.graph.is_subject(name):
            raise VertexKindError("Vertex '{}' is an object; only subjects belong to islands.".format(name))
        return self._by_vertex[name]

    def __getitem__(self, island_id) -> Island:
        return self.islands[island_id]

    def __len__(self):
        return len(self.islands)

    def check(self, island: Island):
        if not (0 <= island.id < len(self.islands)) or self.islands[island.id] != island:
            raise IslandError('Island {} is not an island of this graph.'.format(island))


def island_index(g: ProtectionGraph) -> IslandIndex:
    return g.memo('islands', lambda: IslandIndex(g))


def same_island(g: ProtectionGraph, u, v) -> bool:
    """
    :param g: Protection graph.
    :param u: Subject.
    :param v: Subject.
    :return: True if u and v belong to the same island.
    """
    g.require(u, v)
    index = island_index(g)
    return index.island_of(u) is index.island_of(v)
