import itertools

import pytest

from takegrant.graph import ProtectionGraph

S = 'subject'
O = 'object'


@pytest.fixture
def direct_graph():
    return ProtectionGraph({'p': S, 'q': S}, [('p', 'q', {'r'})])


@pytest.fixture
def take_chain_graph():
    return ProtectionGraph({'p': S, 's': S, 'q': O}, [('p', 's', {'t'}), ('s', 'q', {'r'})])


@pytest.fixture
def common_object_graph():
    """Two subjects taking over the same object: no bridge between them."""
    return ProtectionGraph({'u': S, 'v': S, 'o': O, 'q': O},
                           [('u', 'o', {'t'}), ('v', 'o', {'t'}), ('v', 'q', {'r'})])


@pytest.fixture
def b3_graph():
    """u -t> o -g> w <t v, a B3 bridge between the islands {u} and {v}."""
    return ProtectionGraph({'u': S, 'v': S, 'o': O, 'w': O, 'q': O},
                           [('u', 'o', {'t'}), ('o', 'w', {'g'}), ('v', 'w', {'t'}), ('v', 'q', {'r'})])


@pytest.fixture
def chain_graph():
    """Three islands in a row joined by a B1 and a B2 bridge, alpha held at the far end."""
    return ProtectionGraph(
        {'a': S, 'b': S, 'c': S, 'd': S, 'e': S, 'o1': O, 'o2': O, 'q': O},
        [('a', 'b', {'g'}), ('b', 'o1', {'t'}), ('o1', 'c', {'t'}), ('d', 'c', {'t'}),
         ('o2', 'd', {'t'}), ('e', 'o2', {'t'}), ('e', 'q', {'r'})])


@pytest.fixture(scope='session')
def two_vertex_graphs():
    """Every graph over a pair p, q of either kind with rights from {t, g, r} in each direction."""
    subsets = [frozenset(rights) for size in range(4) for rights in itertools.combinations('gtr', size)]
    graphs = []
    for kinds in itertools.product((S, O), repeat=2):
        vertices = dict(zip(('p', 'q'), kinds))
        for forward, backward in itertools.product(subsets, repeat=2):
            edges = []
            if forward:
                edges.append(('p', 'q', forward))
            if backward:
                edges.append(('q', 'p', backward))
            graphs.append(ProtectionGraph(vertices, edges))
    return graphs
