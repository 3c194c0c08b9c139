import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple, Union

import numpy as np

from takegrant.exceptions import GraphValidationError, UnknownVertexError

logger = logging.getLogger(__name__)

TAKE = 't'
GRANT = 'g'
TG_RIGHTS = frozenset({TAKE, GRANT})
RESERVED_PREFIX = 'n$'

NAME_PATTERN = re.compile(r'[A-Za-z0-9_]+\Z')
RESERVED_NAME_PATTERN = re.compile(r'n\$[0-9]+\Z')
RIGHT_PATTERN = re.compile(r'[a-z][a-z0-9_]*\Z')


class VertexKind(str, Enum):
    SUBJECT = 'subject'
    OBJECT = 'object'


class ViewMode(str, Enum):
    SUBJECT_VIEW = 'subject-view'
    ISLAND_VIEW = 'island-view'


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    rights: FrozenSet[str]

    @property
    def pair(self):
        return self.source, self.target

    def sorted_rights(self):
        return sorted(self.rights)

    def __str__(self):
        return '{} -> {} {{{}}}'.format(self.source, self.target, ','.join(self.sorted_rights()))


EdgeLike = Union[Edge, Tuple[str, str, Iterable[str]]]


def check_right(right):
    if not isinstance(right, str) or not RIGHT_PATTERN.match(right):
        raise GraphValidationError("Right '{}' is not a lowercase token.".format(right))
    return right


def is_reserved(name):
    return name.startswith(RESERVED_PREFIX)


class ProtectionGraph:
    """
    Immutable protection graph: subjects and objects joined by directed edges that carry nonempty
    right sets. Vertices iterate in name order and edges in (source, target) order.

    Edges given more than once for the same ordered pair are merged into one record.
    """

    def __init__(self, vertices=None, edges=()):
        """
        :param vertices: Mapping of vertex name to VertexKind (or its string value).
        :param edges: Iterable of Edge records or (source, target, rights) tuples.
        """
        kinds = {}
        for name, kind in (vertices or {}).items():
            if not isinstance(name, str) or not (NAME_PATTERN.match(name) or RESERVED_NAME_PATTERN.match(name)):
                raise GraphValidationError("Vertex name '{}' is not a valid token.".format(name))
            try:
                kinds[name] = VertexKind(kind)
            except ValueError:
                raise GraphValidationError("Vertex '{}' has unknown kind '{}'.".format(name, kind))

        rights = {}
        for edge in edges:
            source, target, edge_rights = (edge.source, edge.target, edge.rights) if isinstance(edge, Edge) else edge
            edge_rights = frozenset(edge_rights)
            for endpoint in (source, target):
                if endpoint not in kinds:
                    raise GraphValidationError("Edge {} -> {} names undeclared vertex '{}'.".format(
                        source, target, endpoint))
            if not edge_rights:
                raise GraphValidationError('Edge {} -> {} has an empty rights set.'.format(source, target))
            for right in edge_rights:
                check_right(right)
            rights[source, target] = rights.get((source, target), frozenset()) | edge_rights

        self._init_trusted(kinds, rights)

    @classmethod
    def _trusted(cls, kinds, rights):
        """Build from already validated parts, used for derived graphs."""
        graph = cls.__new__(cls)
        graph._init_trusted(kinds, rights)
        return graph

    def _init_trusted(self, kinds, rights):
        self._kinds = MappingProxyType({name: kinds[name] for name in sorted(kinds)})
        self._rights = MappingProxyType(dict(rights))
        self._edges = tuple(Edge(source, target, rights[source, target]) for source, target in sorted(rights))
        out_edges = {name: [] for name in self._kinds}
        in_edges = {name: [] for name in self._kinds}
        for edge in self._edges:
            out_edges[edge.source].append(edge)
            in_edges[edge.target].append(edge)
        self._out = {name: tuple(edges) for name, edges in out_edges.items()}
        self._in = {name: tuple(edges) for name, edges in in_edges.items()}
        self._cache = {}

    @property
    def vertices(self) -> Mapping[str, VertexKind]:
        return self._kinds

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    @property
    def subjects(self):
        return tuple(name for name, kind in self._kinds.items() if kind is VertexKind.SUBJECT)

    @property
    def objects(self):
        return tuple(name for name, kind in self._kinds.items() if kind is VertexKind.OBJECT)

    def __len__(self):
        return len(self._kinds)

    def __contains__(self, name):
        return name in self._kinds

    def __iter__(self):
        return iter(self._kinds)

    def require(self, *names):
        for name in names:
            if name not in self._kinds:
                raise UnknownVertexError(name)

    def kind(self, name) -> VertexKind:
        try:
            return self._kinds[name]
        except KeyError:
            raise UnknownVertexError(name)

    def is_subject(self, name):
        return self.kind(name) is VertexKind.SUBJECT

    def rights(self, source, target) -> FrozenSet[str]:
        return self._rights.get((source, target), frozenset())

    def has_right(self, source, target, right):
        return right in self._rights.get((source, target), ())

    def edge(self, source, target) -> Optional[Edge]:
        rights = self._rights.get((source, target))
        return Edge(source, target, rights) if rights else None

    def out_edges(self, name):
        self.require(name)
        return self._out[name]

    def in_edges(self, name):
        self.require(name)
        return self._in[name]

    def with_vertex(self, name, kind):
        """Return a copy of the graph with one more vertex."""
        if name in self._kinds:
            raise GraphValidationError("Vertex '{}' already exists.".format(name))
        if not (NAME_PATTERN.match(name) or RESERVED_NAME_PATTERN.match(name)):
            raise GraphValidationError("Vertex name '{}' is not a valid token.".format(name))
        kinds = dict(self._kinds)
        kinds[name] = VertexKind(kind)
        return self._trusted(kinds, self._rights)

    def with_rights(self, source, target, rights):
        """Return a copy of the graph where edge source -> target also carries the given rights."""
        self.require(source, target)
        rights = frozenset(rights)
        if not rights:
            raise GraphValidationError('Edge {} -> {} has an empty rights set.'.format(source, target))
        for right in rights:
            check_right(right)
        merged = dict(self._rights)
        merged[source, target] = merged.get((source, target), frozenset()) | rights
        return self._trusted(self._kinds, merged)

    def restricted_to(self, rights):
        """Return a copy keeping only the given rights; edges left empty are dropped."""
        rights = frozenset(rights)
        kept = {}
        for pair, edge_rights in self._rights.items():
            remaining = edge_rights & rights
            if remaining:
                kept[pair] = remaining
        return self._trusted(self._kinds, kept)

    def canonical_key(self):
        """Hashable canonical form; equal keys mean structurally equal graphs."""
        return (tuple((name, kind.value) for name, kind in self._kinds.items()),
                tuple((edge.source, edge.target, tuple(edge.sorted_rights())) for edge in self._edges))

    def memo(self, key, build):
        """
        Per-graph memoization for derived structures. The graph never changes, so a cached value is
        always valid; two racing builders compute the same value.
        """
        try:
            return self._cache[key]
        except KeyError:
            return self._cache.setdefault(key, build())

    def __eq__(self, other):
        if not isinstance(other, ProtectionGraph):
            return NotImplemented
        return dict(self._kinds) == dict(other._kinds) and self._edges == other._edges

    def __hash__(self):
        return hash(self.canonical_key())

    def __repr__(self):
        return 'ProtectionGraph(vertices={}, edges={})'.format(len(self._kinds), len(self._edges))


@dataclass(frozen=True)
class DerivedView:
    """
    Undirected, unlabeled view of a protection graph. SUBJECT_VIEW keeps every pair joined by a t or g
    edge; ISLAND_VIEW keeps only those whose endpoints are both subjects.
    """
    base: ProtectionGraph = field(repr=False)
    mode: ViewMode
    adjacency: Mapping[str, FrozenSet[str]]
    dropped: Tuple[Edge, ...] = ()
    edge_visits: int = 0

    def neighbors(self, name):
        try:
            return self.adjacency[name]
        except KeyError:
            raise UnknownVertexError(name)

    def is_adjacent(self, u, v):
        return v in self.neighbors(u)

    def pairs(self):
        return {frozenset((u, v)) for u, neighbors in self.adjacency.items() for v in neighbors}


def _build_view(g, mode):
    adjacency = {name: set() for name in g.vertices}
    dropped = []
    visits = 0
    for edge in g.edges:
        visits += 1
        keep = edge.source != edge.target and bool(edge.rights & TG_RIGHTS)
        if keep and mode is ViewMode.ISLAND_VIEW:
            keep = g.is_subject(edge.source) and g.is_subject(edge.target)
        if not keep:
            dropped.append(edge)
            continue
        adjacency[edge.source].add(edge.target)
        adjacency[edge.target].add(edge.source)
    logger.debug('%s built: %d vertices, %d edges visited, %d dropped', mode.value, len(adjacency), visits,
                 len(dropped))
    return DerivedView(base=g,
                       mode=mode,
                       adjacency=MappingProxyType({name: frozenset(n) for name, n in adjacency.items()}),
                       dropped=tuple(dropped),
                       edge_visits=visits)


def build_subject_view(g: ProtectionGraph) -> DerivedView:
    """
    Orientation-erased graph of every t/g edge. One pass over the edges.

    :param g: Protection graph.
    :return: DerivedView in SUBJECT_VIEW mode.
    """
    return _build_view(g, ViewMode.SUBJECT_VIEW)


def build_island_view(g: ProtectionGraph) -> DerivedView:
    """
    Orientation-erased graph of every t/g edge between two subjects. One pass over the edges.

    :param g: Protection graph.
    :return: DerivedView in ISLAND_VIEW mode.
    """
    return _build_view(g, ViewMode.ISLAND_VIEW)


def gen_random(n, density, alphabet=('t', 'g', 'r'), subject_fraction=0.5, seed=0) -> ProtectionGraph:
    """
    Random protection graph. Every ordered pair of distinct vertices gets an edge with probability
    density; its rights are a uniformly chosen nonempty subset of the alphabet.

    :param n: Number of vertices, named v0 .. v{n-1} (zero padded).
    :param density: Edge probability in [0, 1].
    :param alphabet: Rights to draw from.
    :param subject_fraction: Probability that a vertex is a subject.
    :param seed: Seed for numpy's generator; equal arguments give equal graphs.
    :return: ProtectionGraph.
    """
    if n < 0:
        raise ValueError('Vertex count must be non-negative, got {}.'.format(n))
    if not 0.0 <= density <= 1.0:
        raise ValueError('Density must be within [0, 1], got {}.'.format(density))
    if not 0.0 <= subject_fraction <= 1.0:
        raise ValueError('Subject fraction must be within [0, 1], got {}.'.format(subject_fraction))
    letters = sorted(set(alphabet))
    if not letters:
        raise ValueError('Alphabet must not be empty.')
    for right in letters:
        check_right(right)

    rng = np.random.default_rng(seed)
    width = len(str(max(n - 1, 0)))
    names = ['v{:0{}d}'.format(i, width) for i in range(n)]
    is_subject = rng.random(n) < subject_fraction
    kinds = {name: VertexKind.SUBJECT if is_subject[i] else VertexKind.OBJECT for i, name in enumerate(names)}

    subsets = [frozenset(letter for bit, letter in enumerate(letters) if mask >> bit & 1)
               for mask in range(1 << len(letters))]
    rights: Dict[Tuple[str, str], FrozenSet[str]] = {}
    for i in range(n):
        hits = np.flatnonzero(rng.random(n) < density)
        hits = hits[hits != i]
        masks = rng.integers(1, 1 << len(letters), size=len(hits))
        for j, mask in zip(hits, masks):
            rights[names[i], names[j]] = subsets[mask]
    logger.debug('gen_random(n=%d, density=%s, seed=%s): %d edges', n, density, seed, len(rights))
    return ProtectionGraph._trusted(kinds, rights)
