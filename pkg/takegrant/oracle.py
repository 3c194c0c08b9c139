"""
Brute-force ground truth for can_share: apply take, grant and create rules to the graph and look for
the alpha edge.

Every rule precondition asks for rights to be present, never absent, so applying a rule never disables
another one. Remove is left out for that reason: it cannot help reach an edge.
"""
import collections
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from takegrant.decision import Query, Witness, check_witness
from takegrant.exceptions import RuleError, WitnessError
from takegrant.graph import GRANT, RESERVED_PREFIX, TAKE, ProtectionGraph, VertexKind, build_island_view, is_reserved
from takegrant.pathfinding import shortest_path
from takegrant.spans import BridgePattern, EdgeSymbol, bridge_patterns

logger = logging.getLogger(__name__)

DEFAULT_CREATE_BUDGET = 4
DEFAULT_STEP_LIMIT = 10 ** 6
PROGRESS_EVERY = 10000

INTERLEAVE = 'interleave'
SATURATE = 'saturate'
STRATEGIES = (INTERLEAVE, SATURATE)


class RuleKind(str, Enum):
    TAKE = 'take'
    GRANT = 'grant'
    CREATE = 'create'


@dataclass(frozen=True)
class RuleInstance:
    """
    One de jure rule application.

    take:   actor -t-> via, via -right-> obj        gives actor -right-> obj
    grant:  actor -g-> to, actor -right-> obj       gives to -right-> obj
    create: actor makes vertex new_name of new_kind and gets actor -rights-> new_name
    """
    kind: RuleKind
    actor: str
    via: Optional[str] = None
    to: Optional[str] = None
    obj: Optional[str] = None
    right: Optional[str] = None
    new_kind: Optional[VertexKind] = None
    new_name: Optional[str] = None
    rights: FrozenSet[str] = frozenset()

    @classmethod
    def take(cls, actor, via, obj, right):
        return cls(RuleKind.TAKE, actor, via=via, obj=obj, right=right)

    @classmethod
    def grant(cls, actor, to, obj, right):
        return cls(RuleKind.GRANT, actor, to=to, obj=obj, right=right)

    @classmethod
    def create(cls, actor, new_kind, new_name, rights=frozenset({TAKE, GRANT})):
        return cls(RuleKind.CREATE, actor, new_kind=VertexKind(new_kind), new_name=new_name,
                   rights=frozenset(rights))

    @property
    def effect(self) -> Tuple[str, str, FrozenSet[str]]:
        """The edge this rule adds to: (source, target, rights)."""
        if self.kind is RuleKind.TAKE:
            return self.actor, self.obj, frozenset({self.right})
        if self.kind is RuleKind.GRANT:
            return self.to, self.obj, frozenset({self.right})
        return self.actor, self.new_name, self.rights

    def __str__(self):
        if self.kind is RuleKind.TAKE:
            return 'take({}, via={}, obj={}, right={})'.format(self.actor, self.via, self.obj, self.right)
        if self.kind is RuleKind.GRANT:
            return 'grant({}, to={}, obj={}, right={})'.format(self.actor, self.to, self.obj, self.right)
        return 'create({}, {} {}, rights={})'.format(self.actor, self.new_kind.value, self.new_name,
                                                     ','.join(sorted(self.rights)))


@dataclass(frozen=True)
class SearchBounds:
    """
    :param create_budget: Most Create rules along one sequence.
    :param step_limit: Most states expanded before giving up.
    :param strategy: 'saturate' or 'interleave', see oracle_can_share.
    :param prune_object_creates: Saturating search only creates subjects. A created subject can do
        everything a created object can, so this loses no answer.
    """
    create_budget: int = DEFAULT_CREATE_BUDGET
    step_limit: int = DEFAULT_STEP_LIMIT
    strategy: str = SATURATE
    prune_object_creates: bool = True

    def __post_init__(self):
        if self.create_budget < 0 or self.step_limit < 0:
            raise ValueError('Search bounds must be non-negative.')
        if self.strategy not in STRATEGIES:
            raise ValueError("Unknown search strategy '{}'.".format(self.strategy))


@dataclass(frozen=True)
class SearchStats:
    states_explored: int = 0
    frontier_peak: int = 0
    step_limited: bool = False
    budget_pruned: bool = False

    @property
    def exhausted(self):
        """The frontier emptied before the step limit."""
        return not self.step_limited


@dataclass(frozen=True)
class OracleAnswer:
    found: bool
    rules: Tuple[RuleInstance, ...] = ()
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def outcome(self):
        return 'found' if self.found else 'not-found-within-bounds'


def created_count(g: ProtectionGraph):
    return sum(1 for name in g.vertices if is_reserved(name))


def next_name(vertices):
    numbers = [int(name[len(RESERVED_PREFIX):]) for name in vertices if is_reserved(name)]
    return '{}{}'.format(RESERVED_PREFIX, max(numbers, default=0) + 1)


def rule_problems(g: ProtectionGraph, r: RuleInstance) -> List[str]:
    """Every unmet condition of r in g; empty when r is applicable."""
    problems = []
    if r.actor not in g:
        return ["actor '{}' is not a vertex".format(r.actor)]
    if not g.is_subject(r.actor):
        problems.append('actor must be a subject')
    if r.kind is RuleKind.CREATE:
        if not r.new_name or not is_reserved(r.new_name):
            problems.append("created vertex name must start with '{}'".format(RESERVED_PREFIX))
        elif r.new_name in g:
            problems.append("vertex '{}' already exists".format(r.new_name))
        if not r.rights:
            problems.append('created edge needs at least one right')
        return problems
    other = r.via if r.kind is RuleKind.TAKE else r.to
    for role, name in (('via' if r.kind is RuleKind.TAKE else 'to', other), ('obj', r.obj)):
        if name not in g:
            problems.append("{} '{}' is not a vertex".format(role, name))
    if problems:
        return problems
    if r.kind is RuleKind.TAKE:
        if not g.has_right(r.actor, r.via, TAKE):
            problems.append('{} -> {} lacks t'.format(r.actor, r.via))
        if not g.has_right(r.via, r.obj, r.right):
            problems.append('{} -> {} lacks {}'.format(r.via, r.obj, r.right))
    else:
        if not g.has_right(r.actor, r.to, GRANT):
            problems.append('{} -> {} lacks g'.format(r.actor, r.to))
        if not g.has_right(r.actor, r.obj, r.right):
            problems.append('{} -> {} lacks {}'.format(r.actor, r.obj, r.right))
    return problems


def apply_rule(g: ProtectionGraph, r: RuleInstance) -> ProtectionGraph:
    """
    :param g: Graph the rule applies to; left unchanged.
    :param r: Rule instance.
    :return: New graph with the rule's effect.
    """
    problems = rule_problems(g, r)
    if problems:
        raise RuleError(r, problems)
    if r.kind is RuleKind.CREATE:
        g = g.with_vertex(r.new_name, r.new_kind)
    source, target, rights = r.effect
    return g.with_rights(source, target, rights)


def _grows(before: ProtectionGraph, after: ProtectionGraph):
    return (set(before.vertices) <= set(after.vertices)
            and all(edge.rights <= after.rights(edge.source, edge.target) for edge in before.edges))


def replay(g: ProtectionGraph, rules: Sequence[RuleInstance]) -> ProtectionGraph:
    """Apply rules in order. Rights and vertices only ever grow along the way."""
    for rule in rules:
        following = apply_rule(g, rule)
        assert _grows(g, following), 'rule {} removed rights'.format(rule)
        g = following
    return g


def enumerate_rules(g: ProtectionGraph, bounds: SearchBounds, created=None,
                    closure=frozenset({TAKE, GRANT})) -> List[RuleInstance]:
    """
    Every applicable take and grant, then creates of both kinds while the budget lasts.

    :param g: Graph.
    :param bounds: Search bounds; create_budget limits creates.
    :param created: Creates already spent; counted from the graph's reserved names when None.
    :param closure: Rights a created vertex's edge carries.
    :return: List of RuleInstance, ordered by actor.
    """
    if created is None:
        created = created_count(g)
    rules = []
    name = next_name(g.vertices)
    for actor in g.subjects:
        for held in g.out_edges(actor):
            if TAKE in held.rights:
                for edge in g.out_edges(held.target):
                    for right in edge.sorted_rights():
                        rules.append(RuleInstance.take(actor, held.target, edge.target, right))
        for held in g.out_edges(actor):
            if GRANT in held.rights:
                for edge in g.out_edges(actor):
                    for right in edge.sorted_rights():
                        rules.append(RuleInstance.grant(actor, held.target, edge.target, right))
        if created < bounds.create_budget:
            for kind in (VertexKind.SUBJECT, VertexKind.OBJECT):
                rules.append(RuleInstance.create(actor, kind, name, closure))
    return rules


def oracle_can_share(q: Query, bounds: SearchBounds = SearchBounds()) -> OracleAnswer:
    """
    Search the graphs reachable by rule application for an alpha edge source -> target.

    'interleave' explores single rule applications breadth first. 'saturate' explores sequences of
    creates breadth first and applies every take and grant to a fixpoint after each create; since
    rules never disable each other the saturated graph contains every graph reachable with the same
    creates, so both strategies answer alike for equal budgets. Both drop rights other than t, g and
    alpha first: such rights never enable a rule and are never the goal.

    :param q: Query.
    :param bounds: Search bounds.
    :return: OracleAnswer with the rule sequence when found.
    """
    g = q.graph
    g.require(q.source, q.target)
    if g.has_right(q.source, q.target, q.alpha):
        return OracleAnswer(True, (), SearchStats(0, 1))
    closure = frozenset({TAKE, GRANT, q.alpha})
    start = g.restricted_to(closure)
    if bounds.strategy == INTERLEAVE:
        answer = _interleave(q, start, bounds, closure)
    else:
        answer = _saturate_search(q, start, bounds, closure)
    logger.debug('%s: %s after %d states', q, answer.outcome, answer.stats.states_explored)
    return answer


class _State:
    """Mutable working copy of a graph for both search strategies."""

    def __init__(self, kinds, rights, rules):
        self.kinds: Dict[str, VertexKind] = kinds
        self.rights: Dict[str, Dict[str, set]] = rights
        self.rules: List[RuleInstance] = rules

    @classmethod
    def of(cls, g: ProtectionGraph):
        rights = {name: {} for name in g.vertices}
        for edge in g.edges:
            rights[edge.source][edge.target] = set(edge.rights)
        return cls(dict(g.vertices), rights, [])

    def copy(self):
        return _State(dict(self.kinds), {name: {target: set(held) for target, held in out.items()}
                                         for name, out in self.rights.items()}, list(self.rules))

    def key(self):
        return (tuple(sorted((name, kind.value) for name, kind in self.kinds.items())),
                tuple(sorted((source, target, tuple(sorted(held)))
                             for source, out in self.rights.items() for target, held in out.items())))

    def holds(self, source, target, right):
        return right in self.rights[source].get(target, ())

    def add(self, rule, source, target, right):
        self.rights[source].setdefault(target, set()).add(right)
        self.rules.append(rule)

    def saturate(self, goal):
        """Apply takes and grants until nothing changes or goal (source, target, right) holds."""
        changed = True
        while changed:
            changed = False
            for actor in sorted(self.kinds):
                if self.kinds[actor] is not VertexKind.SUBJECT:
                    continue
                for via in sorted(self.rights[actor]):
                    if TAKE not in self.rights[actor][via]:
                        continue
                    for obj, held in sorted(self.rights[via].items()):
                        for right in sorted(held):
                            if not self.holds(actor, obj, right):
                                self.add(RuleInstance.take(actor, via, obj, right), actor, obj, right)
                                changed = True
                                if self.holds(*goal):
                                    return True
                for to in sorted(self.rights[actor]):
                    if GRANT not in self.rights[actor][to]:
                        continue
                    for obj, held in sorted(self.rights[actor].items()):
                        for right in sorted(held):
                            if not self.holds(to, obj, right):
                                self.add(RuleInstance.grant(actor, to, obj, right), to, obj, right)
                                changed = True
                                if self.holds(*goal):
                                    return True
        return self.holds(*goal)

    def create(self, actor, kind, closure):
        name = next_name(self.kinds)
        self.kinds[name] = kind
        self.rights[name] = {}
        self.rights[actor][name] = set(closure)
        self.rules.append(RuleInstance.create(actor, kind, name, closure))

    def moves(self, closure, create_kinds):
        """Single rules that add something, in actor order; creates only for the given kinds."""
        name = next_name(self.kinds)
        for actor in sorted(self.kinds):
            if self.kinds[actor] is not VertexKind.SUBJECT:
                continue
            out = self.rights[actor]
            for via in sorted(out):
                if TAKE in out[via]:
                    for obj, held in sorted(self.rights[via].items()):
                        for right in sorted(held - out.get(obj, set())):
                            yield RuleInstance.take(actor, via, obj, right)
            for to in sorted(out):
                if GRANT in out[to]:
                    for obj, held in sorted(out.items()):
                        for right in sorted(held - self.rights[to].get(obj, set())):
                            yield RuleInstance.grant(actor, to, obj, right)
            for kind in create_kinds:
                yield RuleInstance.create(actor, kind, name, closure)

    def apply(self, rule):
        following = self.copy()
        if rule.kind is RuleKind.CREATE:
            following.kinds[rule.new_name] = rule.new_kind
            following.rights[rule.new_name] = {}
        source, target, rights = rule.effect
        following.rights[source].setdefault(target, set()).update(rights)
        following.rules.append(rule)
        return following


def _interleave(q, start, bounds, closure):
    goal = (q.source, q.target, q.alpha)
    root = _State.of(start)
    seen = {root.key()}
    queue = collections.deque([(root, 0)])
    explored = 0
    peak = 1
    budget_pruned = False
    while queue:
        if explored >= bounds.step_limit:
            return OracleAnswer(False, (), SearchStats(explored, peak, True, budget_pruned))
        state, created = queue.popleft()
        explored += 1
        if explored % PROGRESS_EVERY == 0:
            logger.debug('interleave: %d states explored, %d queued', explored, len(queue))
        create_kinds = (VertexKind.SUBJECT, VertexKind.OBJECT)
        if created >= bounds.create_budget:
            budget_pruned = budget_pruned or any(kind is VertexKind.SUBJECT for kind in state.kinds.values())
            create_kinds = ()
        for rule in state.moves(closure, create_kinds):
            following = state.apply(rule)
            if following.holds(*goal):
                return OracleAnswer(True, tuple(following.rules),
                                    SearchStats(explored, max(peak, len(queue)), False, budget_pruned))
            key = following.key()
            if key not in seen:
                seen.add(key)
                queue.append((following, created + (rule.kind is RuleKind.CREATE)))
        peak = max(peak, len(queue))
    return OracleAnswer(False, (), SearchStats(explored, peak, False, budget_pruned))


def _saturate_search(q, start, bounds, closure):
    goal = (q.source, q.target, q.alpha)
    root = _State.of(start)
    if root.saturate(goal):
        return OracleAnswer(True, tuple(root.rules), SearchStats(1, 1))
    kinds = (VertexKind.SUBJECT,) if bounds.prune_object_creates else (VertexKind.SUBJECT, VertexKind.OBJECT)
    seen = {root.key()}
    queue = collections.deque([(root, 0)])
    explored = 0
    peak = 1
    budget_pruned = False
    while queue:
        if explored >= bounds.step_limit:
            return OracleAnswer(False, (), SearchStats(explored, peak, True, budget_pruned))
        state, created = queue.popleft()
        explored += 1
        if explored % PROGRESS_EVERY == 0:
            logger.debug('saturate: %d states explored, %d queued', explored, len(queue))
        actors = sorted(name for name, kind in state.kinds.items() if kind is VertexKind.SUBJECT)
        if created >= bounds.create_budget:
            budget_pruned = budget_pruned or bool(actors)
            continue
        for actor in actors:
            for kind in kinds:
                following = state.copy()
                following.create(actor, kind, closure)
                if following.saturate(goal):
                    return OracleAnswer(True, tuple(following.rules),
                                        SearchStats(explored, max(peak, len(queue)), False, budget_pruned))
                key = following.key()
                if key not in seen:
                    seen.add(key)
                    queue.append((following, created + 1))
        peak = max(peak, len(queue))
    return OracleAnswer(False, (), SearchStats(explored, peak, False, budget_pruned))


class _RuleBuilder:
    """Turns a witness into rules, applying each one as it goes."""

    def __init__(self, q: Query):
        self.query = q
        self.graph = q.graph
        self.rules: List[RuleInstance] = []
        self.closure = frozenset({TAKE, GRANT, q.alpha})

    def apply(self, rule):
        following = apply_rule(self.graph, rule)
        assert _grows(self.graph, following), 'rule {} removed rights'.format(rule)
        self.graph = following
        self.rules.append(rule)

    def take(self, actor, via, obj, right):
        self.apply(RuleInstance.take(actor, via, obj, right))

    def grant(self, actor, to, obj, right):
        self.apply(RuleInstance.grant(actor, to, obj, right))

    def create(self, actor):
        name = next_name(self.graph.vertices)
        self.apply(RuleInstance.create(actor, VertexKind.OBJECT, name, self.closure))
        return name

    def take_along(self, actor, vertices):
        """actor -t-> vertices[1] -t-> ... -t-> vertices[-1]; leaves actor -t-> vertices[-1]."""
        for i in range(1, len(vertices) - 1):
            self.take(actor, vertices[i], vertices[i + 1], TAKE)

    def pass_right(self, holder, receiver):
        """Copy alpha over the target from one subject to an adjacent subject of the same island."""
        alpha, target = self.query.alpha, self.query.target
        g = self.graph
        if holder == receiver:
            return
        if g.has_right(receiver, holder, TAKE):
            self.take(receiver, holder, target, alpha)
        elif g.has_right(holder, receiver, GRANT):
            self.grant(holder, receiver, target, alpha)
        elif g.has_right(holder, receiver, TAKE):
            spare = self.create(receiver)
            self.take(holder, receiver, spare, GRANT)
            self.grant(holder, spare, target, alpha)
            self.take(receiver, spare, target, alpha)
        elif g.has_right(receiver, holder, GRANT):
            spare = self.create(receiver)
            self.grant(receiver, holder, spare, GRANT)
            self.grant(holder, spare, target, alpha)
            self.take(receiver, spare, target, alpha)
        else:
            raise WitnessError('{} and {} share no t or g edge.'.format(holder, receiver))

    def move_within_island(self, holder, receiver, view):
        path = shortest_path(view, holder, receiver)
        if path is None:
            raise WitnessError('{} and {} are not on one island.'.format(holder, receiver))
        for a, b in zip(path, path[1:]):
            self.pass_right(a, b)

    def cross_bridge(self, bridge):
        """Move alpha over the target from the bridge's end subject back to its start subject."""
        alpha, target = self.query.alpha, self.query.target
        u, v = bridge.start, bridge.end
        vertices, word = bridge.vertices, bridge.word
        pattern = bridge_patterns(word)[0]
        if pattern is BridgePattern.B1:
            self.take_along(u, vertices)
            self.take(u, v, target, alpha)
        elif pattern is BridgePattern.B2:
            self.take_along(v, tuple(reversed(vertices)))
            self.pass_right(v, u)
        elif pattern is BridgePattern.B3:
            k = word.index(EdgeSymbol.G_FORWARD)
            x, y = vertices[k], vertices[k + 1]
            self.take_along(u, vertices[:k + 1])
            if x != u:
                self.take(u, x, y, GRANT)
            self.take_along(v, tuple(reversed(vertices[k + 1:])))
            spare = self.create(u)
            self.grant(u, y, spare, GRANT)
            if y != v:
                self.take(v, y, spare, GRANT)
            self.grant(v, spare, target, alpha)
            self.take(u, spare, target, alpha)
        else:
            k = word.index(EdgeSymbol.G_REVERSE)
            x, y = vertices[k], vertices[k + 1]
            self.take_along(u, vertices[:k + 1])
            self.take_along(v, tuple(reversed(vertices[k + 1:])))
            if y != v:
                self.take(v, y, x, GRANT)
            self.grant(v, x, target, alpha)
            if x != u:
                self.take(u, x, target, alpha)


def witness_to_rules(q: Query, w: Witness) -> Tuple[RuleInstance, ...]:
    """
    Rule sequence that realises a witness: the terminal span hands alpha to s', every island passes it
    along its tg-paths, every bridge carries it back one island, and the initial span grants it to the
    source.

    :param q: Query.
    :param w: Witness for q.
    :return: Rules that, replayed from q.graph, give q.source an alpha edge to q.target.
    """
    if not check_witness(q, w):
        raise WitnessError('Witness does not prove {}.'.format(q))
    if w.is_direct:
        return ()
    builder = _RuleBuilder(q)
    alpha, target = q.alpha, q.target
    view = q.graph.memo('island-view', lambda: build_island_view(q.graph))
    holder = w.terminal_subject
    if w.terminal_span is not None:
        builder.take_along(holder, w.terminal_span.vertices)
        builder.take(holder, w.alpha_source, target, alpha)
    for bridge in reversed(w.bridges):
        builder.move_within_island(holder, bridge.end, view)
        builder.cross_bridge(bridge)
        holder = bridge.start
    builder.move_within_island(holder, w.initial_subject, view)
    if w.initial_span is not None:
        span = w.initial_span.vertices
        builder.take_along(w.initial_subject, span[:-1])
        if len(span) > 2:
            builder.take(w.initial_subject, span[-2], q.source, GRANT)
        builder.grant(w.initial_subject, q.source, target, alpha)

    if not builder.graph.has_right(q.source, target, alpha):
        raise WitnessError('Rules built from the witness do not reach {}.'.format(q))
    logger.debug('%s: witness over %d islands became %d rules', q, len(w.island_chain), len(builder.rules))
    return tuple(builder.rules)
