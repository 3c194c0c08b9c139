"""
can_share(alpha, p, q): can some sequence of take, grant and create rules give p an alpha edge to q?

It can exactly when p already holds alpha over q, or when there is a vertex s with an alpha edge to q
and subjects p' and s' such that

* p' is p (p a subject) or p' initially spans to p,
* s' is s (s a subject) or s' terminally spans to s,
* p' and s' lie on islands I1 .. Ik where each consecutive pair is joined by a bridge.

The search runs in waves over islands: wave 0 holds the islands of every p' candidate, each later wave
the islands first reached by a bridge from the wave before. One product search shared by all waves
keeps the total work linear in the size of the graph times the automaton.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Tuple

from takegrant.exceptions import UnknownVertexError, VertexKindError
from takegrant.graph import Edge, ProtectionGraph
from takegrant.islands import compute_islands, island_index
from takegrant.pathfinding import tg_path
from takegrant.spans import (ACCEPTING, BRIDGE_STARTS, ProductSearch, SpanKind, Walk, find_initial_spans,
                             find_terminal_spans, format_walk)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Query:
    alpha: str
    source: str
    target: str
    graph: ProtectionGraph

    def __str__(self):
        return 'can_share({}, {}, {})'.format(self.alpha, self.source, self.target)


@dataclass(frozen=True)
class Witness:
    """
    Proof of a positive can_share answer: either the direct edge, or the alpha source, both spans, the
    island chain and one bridge per consecutive pair of islands. A span of None stands for the
    degenerate case p' = source (initial) or s' = alpha_source (terminal).
    """
    direct: Optional[Edge] = None
    alpha_source: Optional[str] = None
    initial_subject: Optional[str] = None
    initial_span: Optional[Walk] = None
    terminal_subject: Optional[str] = None
    terminal_span: Optional[Walk] = None
    island_chain: Tuple[int, ...] = ()
    bridges: Tuple[Walk, ...] = ()

    @property
    def is_direct(self):
        return self.direct is not None


class Decision(NamedTuple):
    answer: bool
    witness: Optional[Witness]


@dataclass(frozen=True)
class SafetyReport:
    """Forbidden (alpha, source, target) triples checked against one graph."""
    results: Tuple[Tuple[Tuple[str, str, str], Decision], ...]

    @property
    def violations(self):
        return [triple for triple, decision in self.results if decision.answer]

    @property
    def safe(self):
        return not self.violations


def _direct(q: Query) -> Optional[Decision]:
    g = q.graph
    g.require(q.source, q.target)
    if g.has_right(q.source, q.target, q.alpha):
        return Decision(True, Witness(direct=g.edge(q.source, q.target)))
    return None


def _alpha_sources(q: Query) -> List[str]:
    return sorted(edge.source for edge in q.graph.in_edges(q.target) if q.alpha in edge.rights)


def _initial_candidates(g, source) -> Dict[str, Optional[Walk]]:
    candidates: Dict[str, Optional[Walk]] = {}
    if g.is_subject(source):
        candidates[source] = None
    for subject, walk in find_initial_spans(g, source):
        candidates.setdefault(subject, walk)
    return candidates


def _terminal_candidates(g, alpha_sources) -> Dict[str, Tuple[str, Optional[Walk]]]:
    """For every s' the alpha source it reaches, preferring itself, then the shortest span."""
    candidates: Dict[str, Tuple[str, Optional[Walk]]] = {}
    for s in alpha_sources:
        if g.is_subject(s):
            candidates[s] = (s, None)
    for s in alpha_sources:
        for subject, walk in find_terminal_spans(g, s):
            known = candidates.get(subject)
            if known is None or (known[1] is not None and len(walk) < len(known[1])):
                candidates[subject] = (s, walk)
    return candidates


def _span_length(walk):
    return len(walk) if walk is not None else 0


def can_share(q: Query) -> Decision:
    """
    Decide whether q.source can obtain q.alpha over q.target.

    :param q: Query.
    :return: Decision(answer, witness); the witness is None when the answer is False.
    """
    direct = _direct(q)
    if direct is not None:
        return direct
    g = q.graph
    alpha_sources = _alpha_sources(q)
    if not alpha_sources:
        logger.debug('%s: no vertex holds %s over %s', q, q.alpha, q.target)
        return Decision(False, None)
    initial = _initial_candidates(g, q.source)
    terminal = _terminal_candidates(g, alpha_sources)
    if not initial or not terminal:
        logger.debug('%s: %d initial and %d terminal candidates', q, len(initial), len(terminal))
        return Decision(False, None)

    index = island_index(g)
    island_initial: Dict[int, List[str]] = {}
    for subject in sorted(initial, key=lambda name: (_span_length(initial[name]), name)):
        island_initial.setdefault(index.island_of(subject).id, []).append(subject)
    island_terminal: Dict[int, List[str]] = {}
    for subject in sorted(terminal, key=lambda name: (_span_length(terminal[name][1]), name)):
        island_terminal.setdefault(index.island_of(subject).id, []).append(subject)

    # reached island id -> (previous island id, bridge) ; wave 0 islands have no predecessor
    reached: Dict[int, Optional[Tuple[int, Walk]]] = {island_id: None for island_id in sorted(island_initial)}
    wave = sorted(island_initial)
    search = ProductSearch(g)
    waves = 0
    goal = _first_goal(wave, island_terminal)
    while goal is None and wave:
        waves += 1
        starts = [(subject, state) for island_id in wave for subject in index[island_id].sorted_members()
                  for state in BRIDGE_STARTS]
        following = []
        for end, state, previous, symbol in search.run(starts):
            if state not in ACCEPTING:
                continue
            island_id = index.island_of(end).id
            if island_id not in reached:
                bridge = search.walk(end, previous, symbol)
                reached[island_id] = (index.island_of(bridge.start).id, bridge)
                following.append(island_id)
        wave = following
        goal = _first_goal(wave, island_terminal)
    logger.debug('%s: %d islands reached in %d waves', q, len(reached), waves)
    if goal is None:
        return Decision(False, None)

    chain = [goal]
    bridges = []
    while reached[chain[-1]] is not None:
        previous_island, bridge = reached[chain[-1]]
        bridges.append(bridge)
        chain.append(previous_island)
    chain.reverse()
    bridges.reverse()

    p_prime = island_initial[chain[0]][0]
    s_prime = island_terminal[chain[-1]][0]
    alpha_source, terminal_span = terminal[s_prime]
    witness = Witness(alpha_source=alpha_source,
                      initial_subject=p_prime,
                      initial_span=initial[p_prime],
                      terminal_subject=s_prime,
                      terminal_span=terminal_span,
                      island_chain=tuple(chain),
                      bridges=tuple(bridges))
    return Decision(True, witness)


def _first_goal(wave, island_terminal):
    for island_id in wave:
        if island_id in island_terminal:
            return island_id
    return None


def can_share_subject_only(q: Query) -> Decision:
    """
    can_share for graphs made of subjects only: source must be tg-connected to a vertex holding alpha
    over target.

    :param q: Query on an all-subject graph.
    :return: Decision equal to can_share(q).
    """
    g = q.graph
    if g.objects:
        raise VertexKindError('Graph holds objects ({}); the subject-only procedure needs subjects only.'.format(
            ', '.join(g.objects)))
    direct = _direct(q)
    if direct is not None:
        return direct
    best = None
    for s in _alpha_sources(q):
        path = tg_path(g, q.source, s)
        if path is not None and (best is None or path.length < best[1].length):
            best = (s, path)
    if best is None:
        return Decision(False, None)
    s = best[0]
    island = island_index(g).island_of(q.source)
    return Decision(True, Witness(alpha_source=s, initial_subject=q.source, terminal_subject=s,
                                  island_chain=(island.id,)))


def check_witness(q: Query, w: Witness) -> bool:
    """
    Check a witness against the query's graph alone.

    :param q: Query.
    :param w: Witness to check.
    :return: True if the witness proves q.
    """
    g = q.graph
    try:
        g.require(q.source, q.target)
        if w.is_direct:
            edge = w.direct
            return (edge.pair == (q.source, q.target) and q.alpha in edge.rights
                    and edge.rights <= g.rights(q.source, q.target) and w == Witness(direct=edge))
        return _check_composite(q, w)
    except (UnknownVertexError, VertexKindError):
        return False


def _check_composite(q, w):
    g = q.graph
    s, p_prime, s_prime = w.alpha_source, w.initial_subject, w.terminal_subject
    if s is None or p_prime is None or s_prime is None:
        return False
    g.require(s, p_prime, s_prime)
    if not g.has_right(s, q.target, q.alpha):
        return False
    if not (g.is_subject(p_prime) and g.is_subject(s_prime)):
        return False

    if w.initial_span is None:
        if p_prime != q.source:
            return False
    elif (w.initial_span.start, w.initial_span.end) != (p_prime, q.source) \
            or not w.initial_span.validate(g, SpanKind.INITIAL):
        return False
    if w.terminal_span is None:
        if s_prime != s:
            return False
    elif (w.terminal_span.start, w.terminal_span.end) != (s_prime, s) \
            or not w.terminal_span.validate(g, SpanKind.TERMINAL):
        return False

    islands = compute_islands(g)
    chain = w.island_chain
    if not chain or len(w.bridges) != len(chain) - 1:
        return False
    if any(not 0 <= island_id < len(islands) for island_id in chain):
        return False
    if p_prime not in islands[chain[0]] or s_prime not in islands[chain[-1]]:
        return False
    for i, bridge in enumerate(w.bridges):
        if not bridge.validate(g, 'bridge'):
            return False
        if bridge.start not in islands[chain[i]] or bridge.end not in islands[chain[i + 1]]:
            return False
    return True


def check_safety(g: ProtectionGraph, forbidden) -> SafetyReport:
    """
    A state is safe when no forbidden (alpha, source, target) triple can be shared.

    :param g: Protection graph.
    :param forbidden: Iterable of (alpha, source, target).
    :return: SafetyReport with one Decision per triple.
    """
    results = []
    for alpha, source, target in forbidden:
        results.append(((alpha, source, target), can_share(Query(alpha, source, target, g))))
    return SafetyReport(tuple(results))


def witness_to_dict(w: Optional[Witness]):
    if w is None:
        return None
    if w.is_direct:
        return {'direct': {'from': w.direct.source, 'to': w.direct.target, 'rights': w.direct.sorted_rights()}}

    def walk(value):
        if value is None:
            return None
        return {'vertices': list(value.vertices), 'word': [symbol.render() for symbol in value.word]}

    return {
        'alpha_source': w.alpha_source,
        'initial_subject': w.initial_subject,
        'initial_span': walk(w.initial_span),
        'terminal_subject': w.terminal_subject,
        'terminal_span': walk(w.terminal_span),
        'island_chain': list(w.island_chain),
        'bridges': [walk(bridge) for bridge in w.bridges],
    }


def format_witness(q: Query, w: Optional[Witness]) -> str:
    """Indented proof tree."""
    if w is None:
        return '{}: false\n  no witness\n'.format(q)
    lines = ['{}: true'.format(q)]
    if w.is_direct:
        lines.append('  direct edge {}'.format(w.direct))
        return '\n'.join(lines) + '\n'
    lines.append('  alpha source {} ({} -> {} carries {})'.format(w.alpha_source, w.alpha_source, q.target, q.alpha))
    if w.initial_span is None:
        lines.append("  initial span: p' = {}".format(w.initial_subject))
    else:
        lines.append("  initial span: {}".format(format_walk(w.initial_span, label='t>* g>')))
    if w.terminal_span is None:
        lines.append("  terminal span: s' = {}".format(w.terminal_subject))
    else:
        lines.append("  terminal span: {}".format(format_walk(w.terminal_span, label='t>*')))
    islands = island_index(q.graph)
    lines.append('  islands: {}'.format(' -> '.join(str(islands[i]) for i in w.island_chain)))
    for i, bridge in enumerate(w.bridges):
        lines.append('    bridge {} -> {}: {}'.format(w.island_chain[i], w.island_chain[i + 1], format_walk(bridge)))
    return '\n'.join(lines) + '\n'
