"""
Command line front end.

Exit codes: 0 the answer is true or the command succeeded, 1 the answer is false (analyze, path,
oracle-check, safety), 2 usage or input error, 3 can_share and the oracle disagree (oracle-check).
"""
import argparse
import itertools
import json
import logging
import sys

from takegrant.decision import Query, can_share, check_safety, format_witness, witness_to_dict
from takegrant.document import FORMATS, STRUCTURED, TEXT, export_dot, read_graph, serialize_graph
from takegrant.exceptions import TakeGrantError
from takegrant.graph import gen_random
from takegrant.islands import compute_islands, island_index
from takegrant.oracle import DEFAULT_CREATE_BUDGET, DEFAULT_STEP_LIMIT, STRATEGIES, SATURATE, SearchBounds, \
    oracle_can_share
from takegrant.pathfinding import tg_path
from takegrant.spans import bridge_patterns, find_bridges, find_initial_spans, find_terminal_spans, format_walk

logger = logging.getLogger(__name__)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_ERROR = 2
EXIT_DISAGREE = 3


def _walk_dict(walk, label=None):
    entry = {'vertices': list(walk.vertices), 'word': [symbol.render() for symbol in walk.word]}
    if label is not None:
        entry['pattern'] = label
    return entry


def _report(args, text, structured, code=EXIT_TRUE):
    if args.format == STRUCTURED:
        output = json.dumps(structured, indent=2) + '\n'
    else:
        output = text
    if args.output:
        with open(args.output, 'w', encoding='utf-8') as handle:
            handle.write(output)
    else:
        sys.stdout.write(output)
    return code


def _graph(args):
    return read_graph(args.input, args.input_format)


def cmd_analyze(args):
    query = Query(args.alpha, args.source, args.target, _graph(args))
    answer, witness = can_share(query)
    structured = {'query': {'alpha': query.alpha, 'from': query.source, 'to': query.target},
                  'answer': answer, 'witness': witness_to_dict(witness)}
    return _report(args, format_witness(query, witness), structured, EXIT_TRUE if answer else EXIT_FALSE)


def cmd_islands(args):
    islands = compute_islands(_graph(args))
    text = ''.join('{}\n'.format(' '.join(island.sorted_members())) for island in islands)
    structured = {'islands': [island.sorted_members() for island in islands]}
    return _report(args, text, structured)


def cmd_bridges(args):
    g = _graph(args)
    index = island_index(g)
    pairs = itertools.permutations(index.islands, 2)
    if args.source is not None:
        pairs = [(a, b) for a, b in pairs if a is index.island_of(args.source)]
    if args.target is not None:
        pairs = [(a, b) for a, b in pairs if b is index.island_of(args.target)]
    lines = []
    entries = []
    for a, b in pairs:
        for walk in find_bridges(g, a, b):
            label = ','.join(pattern.value for pattern in bridge_patterns(walk.word))
            lines.append('{} -> {}: {}\n'.format(a.id, b.id, format_walk(walk, label)))
            entries.append(dict(_walk_dict(walk, label), islands=[a.id, b.id]))
    return _report(args, ''.join(lines), {'bridges': entries})


def cmd_spans(args):
    g = _graph(args)
    lines = []
    structured = {}
    for kind, finder, label in (('initial', find_initial_spans, 't>* g>'), ('terminal', find_terminal_spans, 't>*')):
        spans = finder(g, args.target)
        structured[kind] = [dict(_walk_dict(walk, label), subject=subject) for subject, walk in spans]
        lines.extend('{} {}: {}\n'.format(kind, subject, format_walk(walk, label)) for subject, walk in spans)
    return _report(args, ''.join(lines), structured)


def cmd_path(args):
    path = tg_path(_graph(args), args.source, args.target)
    if path is None:
        return _report(args, 'no tg-path\n', {'path': None}, EXIT_FALSE)
    return _report(args, '{}\n'.format(path), {'path': list(path.vertices)})


def cmd_oracle_check(args):
    query = Query(args.alpha, args.source, args.target, _graph(args))
    bounds = SearchBounds(create_budget=args.create_budget, step_limit=args.step_limit, strategy=args.strategy)
    answer, witness = can_share(query)
    oracle = oracle_can_share(query, bounds)
    agree = answer == oracle.found
    stats = oracle.stats
    lines = ['{}: can_share {}, oracle {}'.format(query, str(answer).lower(), oracle.outcome),
             'agreement: {}'.format('yes' if agree else 'NO'),
             'bounds: create_budget={} step_limit={} strategy={}'.format(
                 bounds.create_budget, bounds.step_limit, bounds.strategy),
             'stats: states_explored={} frontier_peak={} step_limited={} budget_pruned={}'.format(
                 stats.states_explored, stats.frontier_peak, stats.step_limited, stats.budget_pruned)]
    lines.extend('  {}'.format(rule) for rule in oracle.rules)
    structured = {
        'query': {'alpha': query.alpha, 'from': query.source, 'to': query.target},
        'can_share': answer,
        'witness': witness_to_dict(witness),
        'oracle': {'outcome': oracle.outcome, 'rules': [str(rule) for rule in oracle.rules]},
        'agreement': agree,
        'bounds': {'create_budget': bounds.create_budget, 'step_limit': bounds.step_limit,
                   'strategy': bounds.strategy},
        'stats': {'states_explored': stats.states_explored, 'frontier_peak': stats.frontier_peak,
                  'step_limited': stats.step_limited, 'budget_pruned': stats.budget_pruned},
    }
    if not agree:
        logger.warning('%s: decision procedure and oracle disagree', query)
        code = EXIT_DISAGREE
    else:
        code = EXIT_TRUE if answer else EXIT_FALSE
    return _report(args, '\n'.join(lines) + '\n', structured, code)


def cmd_export_dot(args):
    dot = export_dot(_graph(args))
    if args.output:
        with open(args.output, 'w', encoding='utf-8') as handle:
            handle.write(dot)
    else:
        sys.stdout.write(dot)
    return EXIT_TRUE


def cmd_gen_random(args):
    g = gen_random(args.n, args.density, args.alphabet.split(','), args.subject_fraction, args.seed)
    document = serialize_graph(g, args.format)
    if args.output:
        with open(args.output, 'w', encoding='utf-8') as handle:
            handle.write(document)
    else:
        sys.stdout.write(document)
    return EXIT_TRUE


def _forbidden(text):
    parts = text.split(':')
    if len(parts) != 3 or not all(parts):
        raise argparse.ArgumentTypeError("expected alpha:source:target, got '{}'".format(text))
    return tuple(parts)


def cmd_safety(args):
    report = check_safety(_graph(args), args.forbid)
    lines = []
    for (alpha, source, target), decision in report.results:
        lines.append('{} {} -> {}: {}\n'.format(alpha, source, target,
                                                'shareable' if decision.answer else 'not shareable'))
    lines.append('state is {}\n'.format('safe' if report.safe else 'unsafe'))
    structured = {'safe': report.safe,
                  'results': [{'alpha': alpha, 'from': source, 'to': target, 'shareable': decision.answer,
                               'witness': witness_to_dict(decision.witness)}
                              for (alpha, source, target), decision in report.results]}
    return _report(args, ''.join(lines), structured, EXIT_TRUE if report.safe else EXIT_FALSE)


COMMANDS = {
    'analyze': cmd_analyze,
    'islands': cmd_islands,
    'bridges': cmd_bridges,
    'spans': cmd_spans,
    'path': cmd_path,
    'oracle-check': cmd_oracle_check,
    'export-dot': cmd_export_dot,
    'gen-random': cmd_gen_random,
    'safety': cmd_safety,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-o', '--output', help='write the report to this file instead of standard output')
    common.add_argument('--format', choices=FORMATS, default=TEXT, help='report format')
    common.add_argument('-v', '--verbose', action='count', default=0, help='log more (repeat for debug)')

    graph_input = argparse.ArgumentParser(add_help=False)
    graph_input.add_argument('-i', '--input', default='-', help="graph document, '-' for standard input")
    graph_input.add_argument('--input-format', choices=FORMATS, default=None,
                             help='document format; detected from the extension (.tg, .json) when omitted')

    parser = argparse.ArgumentParser(prog='takegrant', description='Take-Grant protection graph analysis.')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    def query_flags(sub, alpha_required):
        sub.add_argument('--alpha', required=alpha_required, help='right sought')
        sub.add_argument('--from', dest='source', required=True, help='vertex seeking the right')
        sub.add_argument('--to', dest='target', required=True, help='vertex the right is over')

    query_flags(commands.add_parser('analyze', parents=[common, graph_input], help='decide can_share'), True)
    commands.add_parser('islands', parents=[common, graph_input], help='list islands')
    bridges = commands.add_parser('bridges', parents=[common, graph_input], help='list bridges between islands')
    bridges.add_argument('--from', dest='source', help='only bridges leaving the island of this subject')
    bridges.add_argument('--to', dest='target', help='only bridges entering the island of this subject')
    spans = commands.add_parser('spans', parents=[common, graph_input], help='list spans ending at a vertex')
    spans.add_argument('--to', dest='target', required=True, help='vertex the spans end at')
    query_flags(commands.add_parser('path', parents=[common, graph_input], help='shortest tg-path'), False)

    oracle = commands.add_parser('oracle-check', parents=[common, graph_input],
                                 help='compare can_share with brute-force rule search')
    query_flags(oracle, True)
    oracle.add_argument('--create-budget', type=int, default=DEFAULT_CREATE_BUDGET)
    oracle.add_argument('--step-limit', type=int, default=DEFAULT_STEP_LIMIT)
    oracle.add_argument('--strategy', choices=STRATEGIES, default=SATURATE)

    commands.add_parser('export-dot', parents=[common, graph_input], help='Graphviz rendering of the graph')

    generate = commands.add_parser('gen-random', parents=[common], help='random graph document')
    generate.add_argument('--n', type=int, required=True, help='number of vertices')
    generate.add_argument('--density', type=float, default=0.1)
    generate.add_argument('--subject-fraction', type=float, default=0.5)
    generate.add_argument('--alphabet', default='t,g,r', help='comma separated rights')
    generate.add_argument('--seed', type=int, default=0)

    safety = commands.add_parser('safety', parents=[common, graph_input],
                                 help='check that forbidden rights can never be shared')
    safety.add_argument('--forbid', type=_forbidden, action='append', required=True,
                        help='alpha:source:target, repeatable')
    return parser


def run(argv=None):
    """
    :param argv: Argument list without the program name.
    :return: Exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return error.code if isinstance(error.code, int) else EXIT_ERROR
    logging.basicConfig(level=max(logging.DEBUG, logging.WARNING - 10 * args.verbose),
                        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (TakeGrantError, OSError, ValueError) as error:
        sys.stderr.write('error: {}\n'.format(error))
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
