"""Per-document argument graph: nodes mirror graph-tagged spans, annotators
draw directed edges, acyclicity is enforced on every insert, and the
transitive closure is materialized into span attributes for the XML output.
"""

from __future__ import annotations

from collections import deque
from dataclasses import replace
from typing import TYPE_CHECKING

from .core import AnnotationSet, GraphMeta
from .errors import (
    CycleDetected,
    DanglingGraphNode,
    DuplicateEdge,
    SelfLoop,
    UnknownEdge,
    UnknownNode,
)

if TYPE_CHECKING:
    from .schema import TagSet


class ArgumentGraph:
    """Directed acyclic graph over span ids. Mutations keep every invariant:
    edge endpoints are nodes, no self-loops or duplicates, no cycles."""

    def __init__(self, document_id: str = "", annotator_id: str = ""):
        self.document_id = document_id
        self.annotator_id = annotator_id
        self.nodes: set[str] = set()
        self.edges: set[tuple[str, str]] = set()

    def sync_nodes(self, annotation_set: AnnotationSet, tagset: "TagSet") -> ArgumentGraph:
        """Make the node set exactly the graph-tagged span ids; edges that
        lost an endpoint are dropped (no reconnection — the annotator can
        redraw). Idempotent."""
        self.nodes = {
            span.id
            for span in annotation_set
            if span.tag in tagset.tags and tagset.tags[span.tag].is_graph
        }
        self.edges = {
            (src, dst)
            for (src, dst) in self.edges
            if src in self.nodes and dst in self.nodes
        }
        return self

    def _require_node(self, node: str) -> None:
        if node not in self.nodes:
            raise UnknownNode(f"no graph node {node!r}", node=node)

    def add_edge(self, src: str, dst: str) -> ArgumentGraph:
        self._require_node(src)
        self._require_node(dst)
        if src == dst:
            raise SelfLoop(f"self-loop on {src!r}", node=src)
        if (src, dst) in self.edges:
            raise DuplicateEdge(f"edge {src!r} -> {dst!r} already present",
                                src=src, dst=dst)
        path = self._find_path(dst, src)
        if path is not None:
            cycle = path + [dst]
            raise CycleDetected(
                "edge {!r} -> {!r} would close the cycle {}".format(
                    src, dst, " -> ".join(cycle)
                ),
                cycle=cycle,
            )
        self.edges.add((src, dst))
        return self

    def remove_edge(self, src: str, dst: str) -> ArgumentGraph:
        if (src, dst) not in self.edges:
            raise UnknownEdge(f"no edge {src!r} -> {dst!r}", src=src, dst=dst)
        self.edges.remove((src, dst))
        return self

    def _successors(self, node: str) -> list[str]:
        return sorted(dst for (src, dst) in self.edges if src == node)

    def _predecessors(self, node: str) -> list[str]:
        return sorted(src for (src, dst) in self.edges if dst == node)

    def _find_path(self, start: str, goal: str) -> list[str] | None:
        """Shortest directed path start -> goal as a node list, or None.
        Breadth-first with sorted expansion, so reported cycles are stable."""
        if start == goal:
            return [start]
        parent: dict[str, str] = {}
        queue = deque([start])
        while queue:
            current = queue.popleft()
            for nxt in self._successors(current):
                if nxt in parent or nxt == start:
                    continue
                parent[nxt] = current
                if nxt == goal:
                    path = [goal]
                    while path[-1] != start:
                        path.append(parent[path[-1]])
                    return path[::-1]
                queue.append(nxt)
        return None

    def _reachable(self, node: str, forward: bool) -> set[str]:
        step = self._successors if forward else self._predecessors
        seen: set[str] = set()
        queue = deque([node])
        while queue:
            for nxt in step(queue.popleft()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        seen.discard(node)
        return seen

    def ancestors(self, node: str) -> list[str]:
        """All nodes with a directed path to ``node``, sorted by id."""
        self._require_node(node)
        return sorted(self._reachable(node, forward=False))

    def descendants(self, node: str) -> list[str]:
        """All nodes reachable from ``node``, sorted by id."""
        self._require_node(node)
        return sorted(self._reachable(node, forward=True))

    def to_payload(self, annotation_set: AnnotationSet | None = None) -> dict:
        """JSON shape served to clients. Ancestor/descendant closures ride
        along so the UI can display them without deriving graph state."""
        spans = {span.id: span for span in annotation_set} if annotation_set else {}
        nodes = []
        for node_id in sorted(self.nodes):
            entry: dict = {
                "id": node_id,
                "ancestors": self.ancestors(node_id),
                "descendants": self.descendants(node_id),
            }
            span = spans.get(node_id)
            if span is not None:
                entry.update(tag=span.tag, start=span.start, end=span.end)
            nodes.append(entry)
        return {
            "nodes": nodes,
            "edges": [
                {"src": src, "dst": dst} for (src, dst) in sorted(self.edges)
            ],
        }


def inject_graph_attributes(
    graph: ArgumentGraph, annotation_set: AnnotationSet
) -> AnnotationSet:
    """Return a copy of the set whose graph-node spans carry their node id
    and sorted ancestor/descendant lists; other spans lose any stale
    metadata. Deterministic and idempotent."""
    missing = sorted(graph.nodes - {span.id for span in annotation_set})
    if missing:
        raise DanglingGraphNode(
            f"graph node(s) without a span: {', '.join(missing)}", nodes=missing
        )
    enriched = []
    for span in annotation_set:
        if span.id in graph.nodes:
            meta = GraphMeta(
                node_id=span.id,
                ancestors=tuple(graph.ancestors(span.id)),
                descendants=tuple(graph.descendants(span.id)),
            )
            enriched.append(replace(span, graph_meta=meta))
        else:
            enriched.append(replace(span, graph_meta=None))
    return annotation_set.copy_with_spans(enriched)
