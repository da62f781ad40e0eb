"""Source-to-impact pathway graphs over significant impact records.

Nodes are impact records whose ``|score|`` exceeds a tolerance. An edge
``a -> b`` requires that

* ``b`` starts inside ``a`` (``a.start <= b.start <= a.end + slack``),
* the two regions are equal or adjacent,
* ``a.variable -> b.variable`` is a declared dependency, and
* ``a`` precedes ``b`` in the canonical order
  ``(start, variable rank, region rank, end)``, which keeps the graph acyclic.
"""

from __future__ import annotations

import enum
import heapq
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core import ZONAL_REGIONS, zonal_adjacency
from .exceptions import ConfigError, DataError, PathNotFoundError, UnknownNodeError
from .stats import ImpactRecord

__all__ = [
    "SURFACE_COOLING_DEPS",
    "GraphKind",
    "PathwayConstraints",
    "PathwayGraph",
    "build_full_dag",
    "impact_dag",
    "source_impact_path",
    "source_impact_dag",
    "default_source",
    "find_node",
    "export_dot",
    "graph_to_json",
]

SURFACE_COOLING_DEPS = frozenset({
    ("AEROD_v", "AEROD_v"),
    ("AEROD_v", "FSDSC"),
    ("FSDSC", "FSDSC"),
    ("FSDSC", "TREFHT"),
    ("TREFHT", "TREFHT"),
})


class GraphKind(str, enum.Enum):
    FULL = "full"
    IMPACT = "impact"
    SOURCE_IMPACT = "source_impact"


def _variable_ranks(deps: Iterable[tuple[str, str]]) -> dict[str, int]:
    """Deterministic topological ranks of the variable dependency relation (self-loops ignored)."""
    succ: dict[str, set[str]] = {}
    indeg: dict[str, int] = {}
    for a, b in deps:
        succ.setdefault(a, set())
        succ.setdefault(b, set())
        indeg.setdefault(a, 0)
        indeg.setdefault(b, 0)
        if a != b and b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    ready = sorted(v for v, d in indeg.items() if d == 0)
    ranks = {}
    while ready:
        v = ready.pop(0)
        ranks[v] = len(ranks)
        for w in sorted(succ[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
        ready.sort()
    if len(ranks) != len(indeg):
        cyc = sorted(set(indeg) - set(ranks))
        raise ConfigError(f"variable dependencies contain a cycle through {cyc}")
    return ranks


@dataclass(frozen=True)
class PathwayConstraints:
    """Variable dependencies, region adjacency and the node significance tolerance.

    ``slack_days`` extends each node's end when looking for successors.
    """

    variable_deps: frozenset = SURFACE_COOLING_DEPS
    region_adjacency: Mapping[str, frozenset] = field(default_factory=zonal_adjacency)
    epsilon: float = 1.0
    slack_days: int = 0
    region_order: tuple[str, ...] = ZONAL_REGIONS

    def __post_init__(self):
        deps = frozenset((str(a), str(b)) for a, b in self.variable_deps)
        object.__setattr__(self, "variable_deps", deps)
        object.__setattr__(self, "_ranks", _variable_ranks(deps))
        adj: dict[str, set[str]] = {}
        for r, near in self.region_adjacency.items():
            adj.setdefault(r, {r})
            for q in near:
                adj[r].add(q)
                adj.setdefault(q, {q}).add(r)
        object.__setattr__(self, "region_adjacency", {r: frozenset(v) for r, v in adj.items()})
        order = tuple(self.region_order)
        extra = sorted(set(adj) - set(order))
        object.__setattr__(self, "region_order", order + tuple(extra))
        if self.epsilon < 0:
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.slack_days < 0:
            raise ConfigError(f"slack_days must be >= 0, got {self.slack_days}")

    def variable_rank(self, variable: str) -> int:
        return self._ranks.get(variable, len(self._ranks))

    def region_rank(self, region: str) -> int:
        try:
            return self.region_order.index(region)
        except ValueError:
            return len(self.region_order)

    def adjacent(self, a: str, b: str) -> bool:
        return a == b or b in self.region_adjacency.get(a, ())

    def depends(self, a: str, b: str) -> bool:
        return (a, b) in self.variable_deps


def _start(rec: ImpactRecord) -> int:
    iv = rec.interval
    return iv.start_date.toordinal() if iv.start_date is not None else iv.start_index


def _end(rec: ImpactRecord) -> int:
    iv = rec.interval
    return iv.end_date.toordinal() if iv.end_date is not None else iv.end_index


def canonical_key(rec: ImpactRecord, constraints: PathwayConstraints):
    return (_start(rec), constraints.variable_rank(rec.variable), constraints.region_rank(rec.region),
            _end(rec), rec.variable, rec.region)


def edge_allowed(a: ImpactRecord, b: ImpactRecord, constraints: PathwayConstraints) -> bool:
    """All edge rules for ``a -> b``, including canonical precedence."""
    return (
        _start(a) <= _start(b) <= _end(a) + constraints.slack_days
        and constraints.adjacent(a.region, b.region)
        and constraints.depends(a.variable, b.variable)
        and canonical_key(a, constraints) < canonical_key(b, constraints)
    )


@dataclass(frozen=True, eq=False)
class PathwayGraph:
    """Nodes keyed by :attr:`ImpactRecord.node_id` (canonical order) and directed edges."""

    kind: GraphKind
    nodes: Mapping[str, ImpactRecord]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        for a, b in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise UnknownNodeError(f"edge {a!r} -> {b!r} refers to a missing node")

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, node_id):
        return node_id in self.nodes

    def predecessors(self) -> dict[str, list[str]]:
        pred = {n: [] for n in self.nodes}
        for a, b in self.edges:
            pred[b].append(a)
        return pred

    def successors(self) -> dict[str, list[str]]:
        succ = {n: [] for n in self.nodes}
        for a, b in self.edges:
            succ[a].append(b)
        return succ

    def ancestors(self, node_id: str) -> set[str]:
        if node_id not in self.nodes:
            raise UnknownNodeError(f"unknown node {node_id!r}")
        pred = self.predecessors()
        seen: set[str] = set()
        stack = [node_id]
        while stack:
            for q in pred[stack.pop()]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen

    def topological_order(self) -> list[str]:
        """Kahn's algorithm; raises :class:`DataError` if the graph has a cycle."""
        succ = self.successors()
        indeg = {n: 0 for n in self.nodes}
        for _, b in self.edges:
            indeg[b] += 1
        position = {n: k for k, n in enumerate(self.nodes)}
        ready = [position[n] for n, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        names = list(self.nodes)
        order = []
        while ready:
            n = names[heapq.heappop(ready)]
            order.append(n)
            for m in succ[n]:
                indeg[m] -= 1
                if indeg[m] == 0:
                    heapq.heappush(ready, position[m])
        if len(order) != len(self.nodes):
            raise DataError("pathway graph contains a cycle")
        return order

    def subgraph(self, node_ids: Iterable[str], kind: GraphKind) -> "PathwayGraph":
        keep = set(node_ids)
        nodes = {n: r for n, r in self.nodes.items() if n in keep}
        edges = tuple((a, b) for a, b in self.edges if a in keep and b in keep)
        return PathwayGraph(kind, nodes, edges)


def build_full_dag(impacts: Iterable[ImpactRecord], constraints: PathwayConstraints | None = None) -> PathwayGraph:
    """Full pathway DAG: every record with ``|score| > epsilon`` and all admissible edges."""
    constraints = constraints or PathwayConstraints()
    recs = [r for r in impacts if abs(r.score) > constraints.epsilon]
    recs.sort(key=lambda r: canonical_key(r, constraints))
    nodes: dict[str, ImpactRecord] = {}
    for r in recs:
        if r.node_id in nodes:
            raise DataError(f"duplicate impact record {r.node_id}")
        nodes[r.node_id] = r

    edges = []
    starts = [_start(r) for r in recs]
    for k, a in enumerate(recs):
        horizon = _end(a) + constraints.slack_days
        for b in recs[k + 1:]:
            if _start(b) > horizon:
                break
            if edge_allowed(a, b, constraints):
                edges.append((a.node_id, b.node_id))
    del starts
    return PathwayGraph(GraphKind.FULL, nodes, tuple(edges))


def impact_dag(full: PathwayGraph, final_node: str) -> PathwayGraph:
    """The final node and all of its ancestors, with the induced edges."""
    keep = full.ancestors(final_node) | {final_node}
    return full.subgraph(keep, GraphKind.IMPACT)


def find_node(graph: PathwayGraph, variable: str, region: str, date) -> str:
    """Node of ``(variable, region)`` whose interval contains ``date``."""
    for n, r in graph.nodes.items():
        iv = r.interval
        if r.variable == variable and r.region == region and iv.start_date <= date <= iv.end_date:
            return n
    raise UnknownNodeError(f"no {variable}/{region} node contains {date}")


def default_source(graph: PathwayGraph, variable: str = "AEROD_v", region: str = "Tropical") -> str:
    """Earliest-starting node of ``(variable, region)``."""
    for n, r in graph.nodes.items():
        if r.variable == variable and r.region == region:
            return n
    raise PathNotFoundError(f"graph has no {variable}/{region} node to use as source")


def source_impact_path(impact: PathwayGraph, source_node: str, final_node: str) -> list[str]:
    """Greedy best-first search from ``final_node`` back to ``source_node``.

    The frontier is ordered by ``|score|`` (ties by canonical position); each
    expanded node's unexpanded predecessors join the frontier. Returns the
    node ids from source to final.
    """
    for n in (source_node, final_node):
        if n not in impact.nodes:
            raise UnknownNodeError(f"unknown node {n!r}")
    pred = impact.predecessors()
    position = {n: k for k, n in enumerate(impact.nodes)}

    def priority(n):
        return (-abs(impact.nodes[n].score), position[n])

    came_from: dict[str, str | None] = {final_node: None}
    frontier = [(priority(final_node), final_node)]
    expanded: set[str] = set()
    while frontier:
        _, n = heapq.heappop(frontier)
        if n in expanded:
            continue
        if n == source_node:
            path = [n]
            while came_from[path[-1]] is not None:
                path.append(came_from[path[-1]])
            return path
        expanded.add(n)
        for q in pred[n]:
            if q not in came_from:
                came_from[q] = n
                heapq.heappush(frontier, (priority(q), q))
    raise PathNotFoundError(f"no path from {source_node!r} to {final_node!r}")


def source_impact_dag(impact: PathwayGraph, path: Sequence[str]) -> PathwayGraph:
    """The path's nodes with the edges between consecutive path nodes."""
    nodes = {n: r for n, r in impact.nodes.items() if n in set(path)}
    steps = set(zip(path, path[1:]))
    edges = tuple(e for e in impact.edges if e in steps)
    return PathwayGraph(GraphKind.SOURCE_IMPACT, nodes, edges)


def _span(rec: ImpactRecord) -> str:
    iv = rec.interval
    if iv.start_date is not None:
        return f"{iv.start_date.isoformat()}..{iv.end_date.isoformat()}"
    return f"{iv.start_index}..{iv.end_index}"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: PathwayGraph, comments: Sequence[str] = ()) -> str:
    """Deterministic Graphviz DOT text; nodes in canonical order, edges sorted likewise."""
    lines = [f"// {c}" for c in comments]
    lines.append(f"// pathway graph kind={graph.kind.value} nodes={len(graph.nodes)} edges={len(graph.edges)}")
    if not graph.nodes:
        lines.append("digraph pathway {}")
        return "\n".join(lines) + "\n"
    lines.append("digraph pathway {")
    lines.append("  rankdir=LR;")
    for n, r in graph.nodes.items():
        label = f"{r.variable}|{r.region}|{_span(r)}|{r.score:.3f}"
        lines.append(f"  {_quote(n)} [label={_quote(label)}];")
    position = {n: k for k, n in enumerate(graph.nodes)}
    for a, b in sorted(graph.edges, key=lambda e: (position[e[0]], position[e[1]])):
        lines.append(f"  {_quote(a)} -> {_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _finite(x: float):
    return x if x == x and abs(x) != float("inf") else str(x)


def graph_to_json(graph: PathwayGraph, config_hash: str | None = None) -> str:
    """JSON document ``{kind, nodes: [...], edges: [[id, id], ...]}``."""
    doc = {}
    if config_hash is not None:
        doc["config_hash"] = config_hash
    doc["kind"] = graph.kind.value
    doc["nodes"] = [
        {"id": n, "variable": r.variable, "region": r.region,
         "start_date": r.start_date.isoformat() if r.start_date else None,
         "end_date": r.end_date.isoformat() if r.end_date else None,
         "start_index": r.interval.start_index, "end_index": r.interval.end_index,
         "mean_diff": _finite(r.mean_diff), "ci_low": _finite(r.ci_low), "ci_high": _finite(r.ci_high),
         "score": _finite(r.score)}
        for n, r in graph.nodes.items()
    ]
    doc["edges"] = [list(e) for e in graph.edges]
    return json.dumps(doc, indent=2) + "\n"
