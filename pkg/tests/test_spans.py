import itertools
import re

import numpy as np
import pytest

from takegrant.exceptions import IslandError, UnknownVertexError
from takegrant.graph import ProtectionGraph, gen_random
from takegrant.islands import Island, island_index
from takegrant.spans import G_FWD, G_REV, T_FWD, T_REV, BridgePattern, EdgeSymbol, SpanKind, Walk, \
    bridge_exists, bridge_pairs_by_automaton, bridge_pairs_by_enumeration, bridge_patterns, classify_word, \
    enumerate_walks, find_bridges, find_initial_spans, find_terminal_spans, format_walk, walk_symbols

S = 'subject'
O = 'object'

# Independent regular expressions over the rendered word, one letter per symbol.
LETTERS = {T_FWD: 'T', T_REV: 't', G_FWD: 'G', G_REV: 'g'}
PATTERN_REGEX = {
    BridgePattern.B1: re.compile(r'T*\Z'),
    BridgePattern.B2: re.compile(r't*\Z'),
    BridgePattern.B3: re.compile(r'T*Gt*\Z'),
    BridgePattern.B4: re.compile(r'T*gt*\Z'),
}


def island(g, name):
    return island_index(g).island_of(name)


def test_symbols_render_and_parse():
    assert [symbol.render() for symbol in EdgeSymbol] == ['t>', '<t', 'g>', '<g']
    assert EdgeSymbol.parse('<g') is G_REV
    with pytest.raises(ValueError):
        EdgeSymbol.parse('r>')


def test_classify_empty_word():
    assert classify_word([]) == {BridgePattern.B1, BridgePattern.B2, SpanKind.TERMINAL}
    assert bridge_patterns(()) == []


def test_classify_words():
    assert classify_word([T_FWD, G_FWD, T_REV]) == {BridgePattern.B3}
    assert classify_word([T_FWD, T_REV]) == set()
    assert classify_word([T_FWD, G_FWD]) == {BridgePattern.B3, SpanKind.INITIAL}
    assert classify_word([G_REV]) == {BridgePattern.B4}
    assert classify_word([T_FWD, T_FWD]) == {BridgePattern.B1, SpanKind.TERMINAL}
    assert classify_word([T_REV, T_REV]) == {BridgePattern.B2}


def test_classify_agrees_with_regex():
    for length in range(5):
        for word in _words(length):
            text = ''.join(LETTERS[symbol] for symbol in word)
            expected = {pattern for pattern, regex in PATTERN_REGEX.items() if regex.match(text)}
            assert classify_word(word) & set(BridgePattern) == expected


def _words(length):
    if length == 0:
        yield ()
        return
    for prefix in _words(length - 1):
        for symbol in EdgeSymbol:
            yield prefix + (symbol,)


def test_walk_symbols():
    g = ProtectionGraph({'u': S, 'o': O}, [('u', 'o', {'t', 'r'}), ('o', 'u', {'g'})])
    assert walk_symbols(g, 'u', 'o') == [T_FWD, G_REV]
    assert walk_symbols(g, 'o', 'u') == [T_REV, G_FWD]


def test_b3_bridge(b3_graph):
    bridges = find_bridges(b3_graph, island(b3_graph, 'u'), island(b3_graph, 'v'))
    expected = Walk(('u', 'o', 'w', 'v'), (T_FWD, G_FWD, T_REV))
    assert expected in bridges
    assert bridge_patterns(expected.word) == [BridgePattern.B3]
    assert format_walk(expected) == 'u -(t>)- o -(g>)- w -(<t)- v : B3'
    assert bridge_exists(b3_graph, island(b3_graph, 'u'), island(b3_graph, 'v'), BridgePattern.B3)
    assert not bridge_exists(b3_graph, island(b3_graph, 'u'), island(b3_graph, 'v'), BridgePattern.B1)


def test_no_bridge_through_common_object(common_object_graph):
    g = common_object_graph
    assert find_bridges(g, island(g, 'u'), island(g, 'v')) == []
    assert find_bridges(g, island(g, 'v'), island(g, 'u')) == []


def test_bridges_are_symmetric(b3_graph):
    g = b3_graph
    forward = find_bridges(g, island(g, 'u'), island(g, 'v'))
    backward = find_bridges(g, island(g, 'v'), island(g, 'u'))
    assert {walk.reversed() for walk in forward} == set(backward)


def test_bridge_through_object_self_loop():
    g = ProtectionGraph({'u': S, 'v': S, 'x': O}, [('u', 'x', {'t'}), ('v', 'x', {'t'}), ('x', 'x', {'g'})])
    bridges = find_bridges(g, island(g, 'u'), island(g, 'v'))
    assert Walk(('u', 'x', 'x', 'v'), (T_FWD, G_REV, T_REV)) in bridges


def test_bridge_errors(b3_graph):
    a = island(b3_graph, 'u')
    with pytest.raises(IslandError):
        find_bridges(b3_graph, a, a)
    with pytest.raises(IslandError):
        find_bridges(b3_graph, a, Island(7, frozenset({'x'})))


def test_bridges_validate_on_random_graphs():
    for seed in range(20):
        g = gen_random(8, 0.3, seed=seed)
        islands = island_index(g).islands
        for a in islands:
            for b in islands:
                if a is b:
                    continue
                for walk in find_bridges(g, a, b):
                    assert walk.problems(g, 'bridge') == []
                    assert walk.start in a and walk.end in b


def test_initial_spans():
    g = ProtectionGraph({'x': S, 'o': O, 'p': O}, [('x', 'o', {'t'}), ('o', 'p', {'g'})])
    assert find_initial_spans(g, 'p') == [('x', Walk(('x', 'o', 'p'), (T_FWD, G_FWD)))]
    direct = ProtectionGraph({'x': S, 'p': S}, [('x', 'p', {'g'})])
    assert find_initial_spans(direct, 'p') == [('x', Walk(('x', 'p'), (G_FWD,)))]
    no_grant = ProtectionGraph({'x': S, 'p': O}, [('x', 'p', {'t'})])
    assert find_initial_spans(no_grant, 'p') == []


def test_terminal_spans():
    g = ProtectionGraph({'x': S, 'o': O, 's': O}, [('x', 'o', {'t'}), ('o', 's', {'t'})])
    assert find_terminal_spans(g, 's') == [('x', Walk(('x', 'o', 's'), (T_FWD, T_FWD)))]
    direct = ProtectionGraph({'x': S, 's': S}, [('x', 's', {'t'})])
    assert find_terminal_spans(direct, 's') == [('x', Walk(('x', 's'), (T_FWD,)))]
    grants = ProtectionGraph({'x': S, 's': O}, [('x', 's', {'g'})])
    assert find_terminal_spans(grants, 's') == []


def test_spans_pass_only_through_objects():
    g = ProtectionGraph({'x': S, 'y': S, 's': O}, [('x', 'y', {'t'}), ('y', 's', {'t'})])
    assert [subject for subject, _ in find_terminal_spans(g, 's')] == ['y']


def test_span_of_unknown_vertex():
    with pytest.raises(UnknownVertexError):
        find_initial_spans(ProtectionGraph(), 'p')


def test_spans_validate_on_random_graphs():
    for seed in range(20):
        g = gen_random(8, 0.3, seed=seed)
        for vertex in g:
            for subject, walk in find_initial_spans(g, vertex):
                assert walk.start == subject and walk.end == vertex
                assert walk.problems(g, SpanKind.INITIAL) == []
            for subject, walk in find_terminal_spans(g, vertex):
                assert walk.start == subject and walk.end == vertex
                assert walk.problems(g, SpanKind.TERMINAL) == []


def test_walk_problems():
    g = ProtectionGraph({'u': S, 'v': S, 'o': O}, [('u', 'o', {'t'}), ('v', 'o', {'t'})])
    assert Walk(('u', 'o', 'v'), (T_FWD, T_REV)).problems(g, 'bridge') == ['word t> <t matches no bridge pattern']
    assert not Walk(('u', 'o', 'v'), (T_FWD, G_REV)).validate(g, 'bridge')
    assert not Walk(('u', 'v'), (T_FWD,)).validate(g, 'bridge')
    assert not Walk(('u', 'z'), (T_FWD,)).validate(g, 'bridge')
    assert not Walk(('u',), ()).validate(g, SpanKind.TERMINAL)


MIRROR = {BridgePattern.B1: BridgePattern.B2, BridgePattern.B2: BridgePattern.B1,
          BridgePattern.B3: BridgePattern.B4, BridgePattern.B4: BridgePattern.B3}


def bridge_triples(walks):
    return {(walk.start, walk.end, pattern, len(walk)) for walk in walks for pattern in bridge_patterns(walk.word)}


def test_bridges_are_symmetric_on_random_graphs():
    for seed in range(30):
        g = gen_random(7, 0.25, seed=seed)
        islands = island_index(g).islands
        for a, b in itertools.permutations(islands, 2):
            forward = find_bridges(g, a, b)
            backward = find_bridges(g, b, a)
            assert bool(forward) == bool(backward)
            for walk in forward:
                assert walk.reversed().problems(g, 'bridge') == []
            mirrored = {(end, start, MIRROR[pattern], length)
                        for start, end, pattern, length in bridge_triples(forward)}
            assert mirrored == bridge_triples(backward)


def test_walk_monotone_under_added_rights(b3_graph):
    g = b3_graph.with_rights('o', 'w', {'t'})
    assert find_bridges(g, island(g, 'u'), island(g, 'v'))


def test_bridges_and_spans_monotone_on_random_graphs():
    rng = np.random.default_rng(5)
    for seed in range(30):
        g = gen_random(7, 0.25, seed=seed)
        names = list(g)
        source, target = (names[i] for i in rng.integers(0, len(names), size=2))
        richer = g.with_rights(source, target, {str(rng.choice(['t', 'g']))})
        index = island_index(richer)
        kept = bridge_pairs_by_automaton(richer)
        for start, end, pattern in bridge_pairs_by_automaton(g):
            assert (start, end, pattern) in kept or index.island_of(start) is index.island_of(end)
        for vertex in names:
            assert {s for s, _ in find_initial_spans(g, vertex)} <= {s for s, _ in find_initial_spans(richer, vertex)}
            assert {s for s, _ in find_terminal_spans(g, vertex)} <= {s for s, _ in find_terminal_spans(richer, vertex)}


def test_enumerate_walks_bounded():
    g = ProtectionGraph({'u': S, 'o': O}, [('u', 'o', {'t'}), ('o', 'o', {'t'})])
    walks = list(enumerate_walks(g, 'u', 3))
    assert max(len(walk) for walk in walks) == 3
    assert all(walk.start == 'u' for walk in walks)


def test_automaton_agrees_with_enumeration_on_examples(b3_graph, common_object_graph, chain_graph):
    for g in (b3_graph, common_object_graph, chain_graph):
        assert bridge_pairs_by_automaton(g, 6) == bridge_pairs_by_enumeration(g, 6)
        assert bridge_pairs_by_automaton(g) >= bridge_pairs_by_enumeration(g, 6)
