"""
Graph documents.

Text form, one statement per line, declarations before edges:

    # comment
    subject p
    object o
    edge p o r,t

Structured form (JSON):

    {"vertices": [{"name": "p", "kind": "subject"}], "edges": [{"from": "p", "to": "o", "rights": ["r"]}]}
"""
import json
import logging
import sys
from typing import List

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from takegrant.exceptions import GraphFormatError, GraphValidationError
from takegrant.graph import NAME_PATTERN, ProtectionGraph, VertexKind, check_right, is_reserved

logger = logging.getLogger(__name__)

TEXT = 'text'
STRUCTURED = 'structured'
FORMATS = (TEXT, STRUCTURED)
EXTENSIONS = {'.tg': TEXT, '.json': STRUCTURED}


class VertexEntry(BaseModel):
    model_config = ConfigDict(extra='forbid')

    name: str
    kind: VertexKind


class EdgeEntry(BaseModel):
    model_config = ConfigDict(extra='forbid', populate_by_name=True)

    source: str = Field(alias='from')
    target: str = Field(alias='to')
    rights: List[str]


class GraphDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    vertices: List[VertexEntry] = []
    edges: List[EdgeEntry] = []


def detect_format(path, default=TEXT):
    """Pick the document format from a file extension ('.tg' text, '.json' structured)."""
    for extension, fmt in EXTENSIONS.items():
        if str(path).endswith(extension):
            return fmt
    return default


def _declare(kinds, name, kind, line=None, column=None):
    if is_reserved(name):
        raise GraphValidationError("Vertex name '{}' uses the reserved prefix 'n$'.".format(name))
    if not NAME_PATTERN.match(name):
        raise GraphFormatError("Vertex name '{}' may only hold letters, digits and '_'.".format(name), line, column)
    previous = kinds.get(name)
    if previous is not None and previous is not kind:
        raise GraphValidationError("Vertex '{}' is declared both as {} and as {}.".format(
            name, previous.value, kind.value))
    kinds[name] = kind


def parse_text(text) -> ProtectionGraph:
    """
    Parse the line-oriented text form.

    :param text: Document text.
    :return: Validated ProtectionGraph.
    """
    kinds = {}
    edges = []
    for line_no, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split('#', 1)[0]
        if not line.strip():
            continue
        column = len(line) - len(line.lstrip()) + 1
        tokens = line.split()
        keyword = tokens[0]
        if keyword in ('subject', 'object'):
            if edges:
                raise GraphFormatError('Vertex declarations must come before edges.', line_no, column)
            if len(tokens) != 2:
                raise GraphFormatError("'{}' takes exactly one vertex name.".format(keyword), line_no, column)
            _declare(kinds, tokens[1], VertexKind(keyword), line_no, column)
        elif keyword == 'edge':
            if len(tokens) == 3:
                raise GraphValidationError('Edge {} -> {} has an empty rights set.'.format(tokens[1], tokens[2]))
            if len(tokens) != 4:
                raise GraphFormatError("'edge' takes a source, a target and a rights list.", line_no, column)
            rights = tokens[3].split(',')
            if tokens[3] in ('{}', ''):
                raise GraphValidationError('Edge {} -> {} has an empty rights set.'.format(tokens[1], tokens[2]))
            if any(not right for right in rights):
                raise GraphFormatError("Rights list '{}' has an empty entry.".format(tokens[3]), line_no,
                                       line.index(tokens[3], column - 1) + 1)
            for name in tokens[1:3]:
                if name not in kinds:
                    raise GraphValidationError("Edge {} -> {} names undeclared vertex '{}'.".format(
                        tokens[1], tokens[2], name))
            for right in rights:
                check_right(right)
            edges.append((tokens[1], tokens[2], rights))
        else:
            raise GraphFormatError("Unknown statement '{}'.".format(keyword), line_no, column)
    return ProtectionGraph(kinds, edges)


def parse_structured(text) -> ProtectionGraph:
    """
    Parse the structured (JSON) form.

    :param text: Document text.
    :return: Validated ProtectionGraph.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as error:
        raise GraphFormatError(error.msg, error.lineno, error.colno)
    try:
        document = GraphDocument.model_validate(raw)
    except ValidationError as error:
        first = error.errors()[0]
        where = '.'.join(str(part) for part in first['loc'])
        raise GraphFormatError('{} at {}.'.format(first['msg'], where or 'document root'))

    kinds = {}
    for vertex in document.vertices:
        _declare(kinds, vertex.name, vertex.kind)
    for edge in document.edges:
        for right in edge.rights:
            check_right(right)
    return ProtectionGraph(kinds, [(edge.source, edge.target, edge.rights) for edge in document.edges])


def parse_graph(text, fmt=TEXT) -> ProtectionGraph:
    """
    :param text: Graph document.
    :param fmt: 'text' or 'structured'.
    :return: Validated ProtectionGraph.
    """
    if fmt == TEXT:
        graph = parse_text(text)
    elif fmt == STRUCTURED:
        graph = parse_structured(text)
    else:
        raise ValueError("Unknown document format '{}'.".format(fmt))
    logger.debug('parsed %s document: %d vertices, %d edges', fmt, len(graph), len(graph.edges))
    return graph


def read_graph(path, fmt=None) -> ProtectionGraph:
    """Read a graph document from a file path, or standard input for '-'."""
    if path == '-':
        text = sys.stdin.read()
    else:
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
    return parse_graph(text, fmt or detect_format(path))


def graph_to_document(g: ProtectionGraph) -> GraphDocument:
    return GraphDocument(
        vertices=[VertexEntry(name=name, kind=kind) for name, kind in g.vertices.items()],
        edges=[EdgeEntry(source=edge.source, target=edge.target, rights=edge.sorted_rights()) for edge in g.edges])


def serialize_graph(g: ProtectionGraph, fmt=TEXT) -> str:
    """
    Canonical document for a graph: vertices by name, edges by (source, target), rights sorted.

    :param g: Protection graph.
    :param fmt: 'text' or 'structured'.
    :return: Document text; parse_graph gives back an equal graph.
    """
    if fmt == STRUCTURED:
        document = graph_to_document(g)
        return json.dumps(document.model_dump(mode='json', by_alias=True), indent=2) + '\n'
    if fmt != TEXT:
        raise ValueError("Unknown document format '{}'.".format(fmt))
    lines = ['# vertices']
    lines.extend('{} {}'.format(kind.value, name) for name, kind in g.vertices.items())
    lines.append('# edges')
    lines.extend('edge {} {} {}'.format(edge.source, edge.target, ','.join(edge.sorted_rights()))
                 for edge in g.edges)
    return '\n'.join(lines) + '\n'


def export_dot(g: ProtectionGraph) -> str:
    """Graphviz digraph: subjects as boxes, objects as ellipses, edges labelled with sorted rights."""
    lines = ['digraph protection {']
    for name, kind in g.vertices.items():
        lines.append('  "{}" [shape={}];'.format(name, 'box' if kind is VertexKind.SUBJECT else 'ellipse'))
    for edge in g.edges:
        lines.append('  "{}" -> "{}" [label="{}"];'.format(edge.source, edge.target, ','.join(edge.sorted_rights())))
    lines.append('}')
    return '\n'.join(lines) + '\n'
