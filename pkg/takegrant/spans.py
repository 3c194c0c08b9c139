"""
Bridges and spans.

A walk is read as a word over four oriented symbols: t> / g> when the step follows an edge that points
the way the walk goes, <t / <g when it follows an edge pointing back. Bridges join subjects of two
islands through objects, with a word in one of

    B1: t>*    B2: <t*    B3: t>* g> <t*    B4: t>* <g <t*

An initial span runs from a subject to a vertex through objects with a word in t>* g>, a terminal span
with a word in t>*.

Existence is decided by breadth-first search over pairs (vertex, automaton state) where the automaton
holds one branch per pattern. Walks may revisit objects and may step along self-loops of objects.
"""
import collections
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from takegrant.exceptions import IslandError
from takegrant.graph import GRANT, TAKE, ProtectionGraph
from takegrant.islands import Island, island_index

logger = logging.getLogger(__name__)


class Orientation(str, Enum):
    FORWARD = 'forward'
    REVERSE = 'reverse'


class EdgeSymbol(Enum):
    T_FORWARD = (TAKE, Orientation.FORWARD)
    T_REVERSE = (TAKE, Orientation.REVERSE)
    G_FORWARD = (GRANT, Orientation.FORWARD)
    G_REVERSE = (GRANT, Orientation.REVERSE)

    @property
    def right(self):
        return self.value[0]

    @property
    def orientation(self):
        return self.value[1]

    def render(self):
        if self.orientation is Orientation.FORWARD:
            return self.right + '>'
        return '<' + self.right

    @classmethod
    def parse(cls, text):
        for symbol in cls:
            if symbol.render() == text:
                return symbol
        raise ValueError("'{}' is not an edge symbol.".format(text))

    def __str__(self):
        return self.render()


PathWord = Tuple[EdgeSymbol, ...]

T_FWD = EdgeSymbol.T_FORWARD
T_REV = EdgeSymbol.T_REVERSE
G_FWD = EdgeSymbol.G_FORWARD
G_REV = EdgeSymbol.G_REVERSE


class BridgePattern(str, Enum):
    B1 = 'B1'
    B2 = 'B2'
    B3 = 'B3'
    B4 = 'B4'


class SpanKind(str, Enum):
    INITIAL = 'initial'
    TERMINAL = 'terminal'


BRIDGE_PATTERNS = frozenset(BridgePattern)

# Automaton states are named '<pattern>.<phase>'. Every pattern is deterministic on its own.
TRANSITIONS = {
    'B1.0': {T_FWD: 'B1.0'},
    'B2.0': {T_REV: 'B2.0'},
    'B3.0': {T_FWD: 'B3.0', G_FWD: 'B3.1'},
    'B3.1': {T_REV: 'B3.1'},
    'B4.0': {T_FWD: 'B4.0', G_REV: 'B4.1'},
    'B4.1': {T_REV: 'B4.1'},
    'initial.0': {T_FWD: 'initial.0', G_FWD: 'initial.1'},
    'initial.1': {},
    'terminal.0': {T_FWD: 'terminal.0'},
}
STATE_PATTERN = {
    'B1.0': BridgePattern.B1, 'B2.0': BridgePattern.B2,
    'B3.0': BridgePattern.B3, 'B3.1': BridgePattern.B3,
    'B4.0': BridgePattern.B4, 'B4.1': BridgePattern.B4,
    'initial.0': SpanKind.INITIAL, 'initial.1': SpanKind.INITIAL,
    'terminal.0': SpanKind.TERMINAL,
}
START = {
    BridgePattern.B1: 'B1.0', BridgePattern.B2: 'B2.0', BridgePattern.B3: 'B3.0', BridgePattern.B4: 'B4.0',
    SpanKind.INITIAL: 'initial.0', SpanKind.TERMINAL: 'terminal.0',
}
ACCEPT = {
    BridgePattern.B1: 'B1.0', BridgePattern.B2: 'B2.0', BridgePattern.B3: 'B3.1', BridgePattern.B4: 'B4.1',
    SpanKind.INITIAL: 'initial.1', SpanKind.TERMINAL: 'terminal.0',
}
ACCEPTING = frozenset(ACCEPT.values())
BRIDGE_STARTS = tuple(START[pattern] for pattern in BridgePattern)

REVERSE_TRANSITIONS: Dict[str, Dict[EdgeSymbol, List[str]]] = collections.defaultdict(dict)
for _state, _moves in TRANSITIONS.items():
    for _symbol, _next in _moves.items():
        REVERSE_TRANSITIONS[_next].setdefault(_symbol, []).append(_state)


def classify_word(word: Iterable[EdgeSymbol]) -> Set:
    """
    Every bridge pattern and span kind the word belongs to.

    :param word: Sequence of EdgeSymbol.
    :return: Set of BridgePattern and SpanKind members.
    """
    word = tuple(word)
    matches = set()
    for pattern, state in START.items():
        for symbol in word:
            state = TRANSITIONS[state].get(symbol)
            if state is None:
                break
        if state == ACCEPT[pattern]:
            matches.add(pattern)
    return matches


def bridge_patterns(word) -> List[BridgePattern]:
    """Bridge patterns matched by a nonempty word, in B1..B4 order."""
    if not word:
        return []
    matches = classify_word(word)
    return [pattern for pattern in BridgePattern if pattern in matches]


def format_word(word):
    return ' '.join(symbol.render() for symbol in word)


def walk_symbols(g: ProtectionGraph, u, v) -> List[EdgeSymbol]:
    """Symbols under which one step from u to v is possible."""
    forward = g.rights(u, v)
    backward = g.rights(v, u)
    symbols = []
    for symbol in EdgeSymbol:
        rights = forward if symbol.orientation is Orientation.FORWARD else backward
        if symbol.right in rights:
            symbols.append(symbol)
    return symbols


def _step_tables(g: ProtectionGraph):
    """
    For every vertex the steps leaving it (next vertex, symbol) and the steps arriving at it
    (previous vertex, symbol), in name order. A self-loop gives both a forward and a reverse step.
    """
    def build():
        leaving = {name: [] for name in g.vertices}
        arriving = {name: [] for name in g.vertices}
        for edge in g.edges:
            for right, forward, reverse in ((TAKE, T_FWD, T_REV), (GRANT, G_FWD, G_REV)):
                if right in edge.rights:
                    leaving[edge.source].append((edge.target, forward))
                    arriving[edge.target].append((edge.source, forward))
                    leaving[edge.target].append((edge.source, reverse))
                    arriving[edge.source].append((edge.target, reverse))
        order = {symbol: i for i, symbol in enumerate(EdgeSymbol)}
        key = lambda step: (step[0], order[step[1]])
        return ({name: tuple(sorted(steps, key=key)) for name, steps in leaving.items()},
                {name: tuple(sorted(steps, key=key)) for name, steps in arriving.items()})
    return g.memo('steps', build)


@dataclass(frozen=True)
class Walk:
    """Walk with the symbol used for each step; len(vertices) == len(word) + 1."""
    vertices: Tuple[str, ...]
    word: PathWord

    @property
    def start(self):
        return self.vertices[0]

    @property
    def end(self):
        return self.vertices[-1]

    def __len__(self):
        return len(self.word)

    def sort_key(self):
        return len(self.word), self.vertices, tuple(symbol.render() for symbol in self.word)

    def reversed(self):
        """The same walk read from the other end; t> and <t swap, as do g> and <g."""
        flip = {T_FWD: T_REV, T_REV: T_FWD, G_FWD: G_REV, G_REV: G_FWD}
        return Walk(tuple(reversed(self.vertices)), tuple(flip[symbol] for symbol in reversed(self.word)))

    def problems(self, g: ProtectionGraph, role) -> List[str]:
        """
        Everything wrong with this walk as a bridge or span of g.

        :param g: Protection graph.
        :param role: 'bridge', SpanKind.INITIAL or SpanKind.TERMINAL.
        :return: Empty list when the walk is valid.
        """
        found = []
        if len(self.vertices) != len(self.word) + 1:
            return ['walk has {} vertices for {} steps'.format(len(self.vertices), len(self.word))]
        for name in self.vertices:
            if name not in g:
                return ["walk names unknown vertex '{}'".format(name)]
        if not self.word:
            found.append('walk is empty')
        for i, symbol in enumerate(self.word):
            if symbol not in walk_symbols(g, self.vertices[i], self.vertices[i + 1]):
                found.append('step {} {} {} has no matching edge'.format(
                    self.vertices[i], symbol.render(), self.vertices[i + 1]))
        for name in self.vertices[1:-1]:
            if g.is_subject(name):
                found.append("interior vertex '{}' is a subject".format(name))
        if not g.is_subject(self.start):
            found.append("walk starts at object '{}'".format(self.start))
        matches = classify_word(self.word)
        if role == 'bridge':
            if not g.is_subject(self.end):
                found.append("bridge ends at object '{}'".format(self.end))
            if not matches & BRIDGE_PATTERNS:
                found.append('word {} matches no bridge pattern'.format(format_word(self.word)))
        elif role in (SpanKind.INITIAL, SpanKind.TERMINAL):
            if role not in matches:
                found.append('word {} is not a {} span'.format(format_word(self.word), role.value))
        else:
            raise ValueError("Unknown walk role '{}'.".format(role))
        return found

    def validate(self, g: ProtectionGraph, role) -> bool:
        return not self.problems(g, role)

    def __str__(self):
        return format_walk(self)


def format_walk(walk: Walk, label=None) -> str:
    parts = [walk.vertices[0]]
    for symbol, name in zip(walk.word, walk.vertices[1:]):
        parts.append('-({})-'.format(symbol.render()))
        parts.append(name)
    text = ' '.join(parts)
    if label is None:
        patterns = bridge_patterns(walk.word)
        label = ','.join(pattern.value for pattern in patterns) if patterns else None
    return '{} : {}'.format(text, label) if label else text


class ProductSearch:
    """
    Breadth-first search over (vertex, state) pairs. Objects are expanded, subjects end a walk.

    Forward searches start at subjects and follow leaving steps; backward searches start at the last
    vertex of the walks sought and follow arriving steps against the automaton. The visited set and
    parent links persist across run() calls, so later runs skip pairs already explored.
    """

    def __init__(self, g: ProtectionGraph, backward=False):
        self.graph = g
        self.backward = backward
        leaving, arriving = _step_tables(g)
        self.steps = arriving if backward else leaving
        self.parents: Dict[Tuple[str, str], Optional[Tuple[Tuple[str, str], EdgeSymbol]]] = {}

    def _moves(self, state, symbol):
        if self.backward:
            return REVERSE_TRANSITIONS[state].get(symbol, ())
        following = TRANSITIONS[state].get(symbol)
        return (following,) if following else ()

    def run(self, starts):
        """
        :param starts: (vertex, state) pairs the walks begin from.
        :return: Generator of arrivals (subject, state, previous pair, symbol), in breadth-first order.
        """
        queue = collections.deque()
        for node in starts:
            if node not in self.parents:
                self.parents[node] = None
                queue.append(node)
        while queue:
            node = queue.popleft()
            vertex, state = node
            for neighbor, symbol in self.steps[vertex]:
                for following in self._moves(state, symbol):
                    if self.graph.is_subject(neighbor):
                        yield neighbor, following, node, symbol
                        continue
                    pair = (neighbor, following)
                    if pair not in self.parents:
                        self.parents[pair] = (node, symbol)
                        queue.append(pair)

    def walk(self, end, previous, symbol) -> Walk:
        """Rebuild the walk that arrived at end from the parent links."""
        vertices = [end]
        word = [symbol]
        node = previous
        while True:
            vertices.append(node[0])
            link = self.parents[node]
            if link is None:
                break
            node, step = link
            word.append(step)
        if self.backward:
            return Walk(tuple(vertices), tuple(word))
        return Walk(tuple(reversed(vertices)), tuple(reversed(word)))


def find_bridges(g: ProtectionGraph, a: Island, b: Island) -> List[Walk]:
    """
    Bridges from a subject of island a to a subject of island b: for every connected pair of endpoints
    and every pattern one shortest walk.

    :param g: Protection graph.
    :param a: Island of g.
    :param b: Another island of g.
    :return: List of Walk, sorted by endpoints then length; empty when no bridge exists.
    """
    index = island_index(g)
    index.check(a)
    index.check(b)
    if a.id == b.id:
        raise IslandError('A bridge joins two different islands; got island {} twice.'.format(a.id))
    found = {}
    for start in a.sorted_members():
        search = ProductSearch(g)
        for end, state, previous, symbol in search.run([(start, state) for state in BRIDGE_STARTS]):
            if end in b and state in ACCEPTING:
                found.setdefault((start, end, STATE_PATTERN[state]), search.walk(end, previous, symbol))
    walks = sorted(set(found.values()), key=lambda walk: (walk.start, walk.end, walk.sort_key()))
    logger.debug('bridges %d -> %d: %d walks', a.id, b.id, len(walks))
    return walks


def bridge_exists(g: ProtectionGraph, a: Island, b: Island, pattern: BridgePattern) -> bool:
    """True if some walk of the given pattern bridges island a to island b."""
    return any(pattern in classify_word(walk.word) for walk in find_bridges(g, a, b))


def _find_spans(g, vertex, kind):
    g.require(vertex)
    search = ProductSearch(g, backward=True)
    found = {}
    for start, state, previous, symbol in search.run([(vertex, ACCEPT[kind])]):
        if state == START[kind] and start != vertex and start not in found:
            found[start] = search.walk(start, previous, symbol)
    return sorted(found.items(), key=lambda item: (item[0], item[1].sort_key()))


def find_initial_spans(g: ProtectionGraph, p) -> List[Tuple[str, Walk]]:
    """
    Subjects that initially span to p (word t>* g>, objects inside), each with one shortest walk.

    :param g: Protection graph.
    :param p: Vertex the spans end at.
    :return: Sorted list of (subject, walk); p itself is never listed.
    """
    return _find_spans(g, p, SpanKind.INITIAL)


def find_terminal_spans(g: ProtectionGraph, s) -> List[Tuple[str, Walk]]:
    """
    Subjects that terminally span to s (word t>*, at least one step, objects inside), each with one
    shortest walk.

    :param g: Protection graph.
    :param s: Vertex the spans end at.
    :return: Sorted list of (subject, walk); s itself is never listed.
    """
    return _find_spans(g, s, SpanKind.TERMINAL)


def enumerate_walks(g: ProtectionGraph, start, max_length) -> Iterable[Walk]:
    """
    Every walk from a subject through objects up to max_length steps, ending at a subject (bridge
    shaped) or anywhere (span shaped). Exponential; meant for cross-checking small graphs.
    """
    leaving, _ = _step_tables(g)
    stack = [((start,), ())]
    while stack:
        vertices, word = stack.pop()
        if word:
            yield Walk(vertices, word)
            if g.is_subject(vertices[-1]):
                continue
        if len(word) == max_length:
            continue
        for neighbor, symbol in reversed(leaving[vertices[-1]]):
            stack.append((vertices + (neighbor,), word + (symbol,)))


def bridge_pairs_by_enumeration(g: ProtectionGraph, max_length) -> FrozenSet[Tuple[str, str, BridgePattern]]:
    """(start, end, pattern) for every bridge found by exhaustive walk enumeration."""
    index = island_index(g)
    found = set()
    for start in g.subjects:
        for walk in enumerate_walks(g, start, max_length):
            end = walk.end
            if not g.is_subject(end) or index.island_of(end) is index.island_of(start):
                continue
            for pattern in bridge_patterns(walk.word):
                found.add((start, end, pattern))
    return frozenset(found)


def bridge_pairs_by_automaton(g: ProtectionGraph, max_length=None) -> FrozenSet[Tuple[str, str, BridgePattern]]:
    """
    (start, end, pattern) for every bridge found by the product search, over all island pairs.

    :param g: Protection graph.
    :param max_length: When given, keep only triples whose shortest bridge has at most this many steps.
    :return: Frozen set of triples.
    """
    index = island_index(g)
    found = set()
    for a, b in itertools.permutations(index.islands, 2):
        for walk in find_bridges(g, a, b):
            if max_length is not None and len(walk) > max_length:
                continue
            for pattern in bridge_patterns(walk.word):
                found.add((walk.start, walk.end, pattern))
    return frozenset(found)
