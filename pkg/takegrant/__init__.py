from takegrant.exceptions import *
from takegrant.graph import Edge, ProtectionGraph, VertexKind, build_island_view, build_subject_view, gen_random
from takegrant.document import export_dot, parse_graph, read_graph, serialize_graph
from takegrant.pathfinding import TgPath, tg_path
from takegrant.islands import Island, compute_islands, same_island
from takegrant.spans import BridgePattern, EdgeSymbol, Walk, bridge_exists, find_bridges, find_initial_spans, \
    find_terminal_spans
from takegrant.decision import Decision, Query, Witness, can_share, can_share_subject_only, check_safety, \
    check_witness, format_witness
from takegrant.oracle import RuleInstance, SearchBounds, apply_rule, oracle_can_share, replay, witness_to_rules
