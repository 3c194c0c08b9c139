import heapq
import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from takegrant.graph import DerivedView, ProtectionGraph, build_subject_view

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TgPath:
    """Simple path of the subject view; consecutive vertices share a t or g edge in some direction."""
    vertices: Tuple[str, ...]

    @property
    def source(self):
        return self.vertices[0]

    @property
    def destination(self):
        return self.vertices[-1]

    @property
    def length(self):
        return len(self.vertices) - 1

    def __str__(self):
        return ' - '.join(self.vertices)


def shortest_path(view: DerivedView, src, dst) -> Optional[Tuple[str, ...]]:
    """
    Dijkstra over a unit-weight view. The heap is keyed by (distance, vertex sequence), so among the
    shortest paths the lexicographically smallest one is settled first.

    :param view: Subject or island view.
    :param src: Start vertex.
    :param dst: End vertex.
    :return: Tuple of vertices from src to dst, or None when they are not connected.
    """
    view.neighbors(src)
    view.neighbors(dst)
    heap = [(0, (src,))]
    settled = set()
    while heap:
        distance, path = heapq.heappop(heap)
        vertex = path[-1]
        if vertex in settled:
            continue
        if vertex == dst:
            return path
        settled.add(vertex)
        for neighbor in view.adjacency[vertex]:
            if neighbor not in settled:
                heapq.heappush(heap, (distance + 1, path + (neighbor,)))
    return None


def bfs_distances(view: DerivedView, src) -> Dict[str, int]:
    """Hop counts from src to every vertex it reaches, by plain breadth-first search."""
    distances = {src: 0}
    queue = deque([src])
    while queue:
        vertex = queue.popleft()
        for neighbor in view.neighbors(vertex):
            if neighbor not in distances:
                distances[neighbor] = distances[vertex] + 1
                queue.append(neighbor)
    return distances


def tg_path(g: ProtectionGraph, src, dst) -> Optional[TgPath]:
    """
    Shortest tg-path between two vertices, edge directions ignored.

    :param g: Protection graph.
    :param src: Start vertex.
    :param dst: End vertex.
    :return: TgPath (a single vertex when src == dst), or None when no tg-path exists.
    """
    g.require(src, dst)
    path = shortest_path(build_subject_view(g), src, dst)
    logger.debug('tg_path(%s, %s): %s', src, dst, path)
    return TgPath(path) if path is not None else None
