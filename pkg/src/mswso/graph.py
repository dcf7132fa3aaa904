"""The oriented graph of fixed points and its lambda-decompositions.

Vertices are fixed points weighted by ``|a(F)|``.  An edge ``(j, k)`` means
some orbit has backward limit ``F_j`` and forward limit ``F_k``.

Orientation convention: a decomposition is *right oriented* when every edge
crossing between ``G-`` (weights below ``|lambda|``) and ``G+`` (above) runs
from ``G-`` into ``G+``, and *left oriented* when every crossing edge runs
from ``G+`` into ``G-``.  With this convention the block operator on an edge
from ``F_j`` to ``F_k`` is right invertible exactly when
``|a(F_j)| < |lambda| < |a(F_k)|``.
"""
from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, replace

from .dynamics import limits, sample_points
from .errors import ValidationError

log = logging.getLogger(__name__)

CIRCLE_TOL = 1e-12


@dataclass(frozen=True)
class Vertex:
    id: int
    kind: str
    weight: float


@dataclass(frozen=True)
class MSGraph:
    vertices: tuple[Vertex, ...]
    edges: frozenset[tuple[int, int]]
    density_flag: bool = False
    # Edge whose orbit set is dense in X (drives kernel/denseness refinements).
    dense_edge: tuple[int, int] | None = None
    family: str | None = None

    def __post_init__(self):
        ids = {v.id for v in self.vertices}
        for j, k in self.edges:
            if j == k:
                raise ValidationError(f"self-loop at F{j}")
            if j not in ids or k not in ids:
                raise ValidationError(f"edge ({j}, {k}) references an unknown vertex")

    @property
    def weights(self) -> dict[int, float]:
        return {v.id: v.weight for v in self.vertices}

    def with_weights(self, weights) -> "MSGraph":
        weights = list(weights)
        if len(weights) != len(self.vertices):
            raise ValidationError(f"expected {len(self.vertices)} weights, got {len(weights)}")
        verts = tuple(replace(v, weight=float(abs(w))) for v, w in zip(self.vertices, weights))
        return replace(self, vertices=verts)

    def reversed(self) -> "MSGraph":
        de = self.dense_edge[::-1] if self.dense_edge else None
        return replace(self, edges=frozenset((k, j) for j, k in self.edges), dense_edge=de)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_dict(self) -> dict:
        return {
            "vertices": [{"id": v.id, "kind": v.kind, "weight": v.weight} for v in self.vertices],
            "edges": [list(e) for e in self.sorted_edges()],
            "density_flag": self.density_flag,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "MSGraph":
        verts = tuple(Vertex(int(v["id"]), str(v["kind"]), float(v["weight"])) for v in data["vertices"])
        return cls(verts, frozenset((int(j), int(k)) for j, k in data["edges"]), bool(data["density_flag"]))


def _simplex_kind(k: int, m: int) -> str:
    return "Repelling" if k == 0 else "Attracting" if k == m else "Saddle"


def simplex_graph(m: int, weights) -> MSGraph:
    """Graph of the simplex model: the transitive tournament ``{(j, k) : j < k}``."""
    weights = list(weights)
    if m < 1:
        raise ValidationError("m must be >= 1")
    if len(weights) != m + 1:
        raise ValidationError(f"simplex of dimension {m} needs {m + 1} weights, got {len(weights)}")
    verts = tuple(Vertex(k, _simplex_kind(k, m), float(abs(w))) for k, w in enumerate(weights))
    edges = frozenset((j, k) for j in range(m + 1) for k in range(j + 1, m + 1))
    return MSGraph(verts, edges, density_flag=True, dense_edge=(0, m), family="simplex")


def discover_edges(model, fixed_points, sample_count: int, rng) -> MSGraph:
    """Monte-Carlo edge discovery: sample points, record (backward, forward) limit pairs."""
    verts = tuple(Vertex(f.id, f.kind.value if hasattr(f.kind, "value") else str(f.kind), 0.0)
                  for f in fixed_points)
    if sample_count <= 0:
        log.warning("discover_edges: no samples drawn; the edge set is empty")
        return MSGraph(verts, frozenset())
    F = [f.point for f in fixed_points]
    X = sample_points(model, sample_count, rng)
    bwd = limits(model, X, -1, F)
    fwd = limits(model, X, +1, F)
    ids = [f.id for f in fixed_points]
    edges = frozenset((ids[j], ids[k]) for j, k in zip(bwd, fwd) if j != k)
    return MSGraph(verts, edges)


@dataclass(frozen=True)
class Decomposition:
    lambda_modulus: float
    g_minus: frozenset[int]
    g_plus: frozenset[int]
    circle_hits: frozenset[int]

    @property
    def valid(self) -> bool:
        return not self.circle_hits

    def side(self, v: int) -> str:
        return "-" if v in self.g_minus else "+" if v in self.g_plus else "0"


def decompose(graph: MSGraph, lambda_modulus: float, tol: float = CIRCLE_TOL) -> Decomposition:
    """Split vertices by ``|a(F)|`` vs ``|lambda|`` with a relative circle band."""
    if lambda_modulus < 0:
        raise ValidationError("lambda_modulus must be non-negative")
    lm = float(lambda_modulus)
    minus, plus, hits = set(), set(), set()
    for v in graph.vertices:
        w = v.weight
        if abs(w - lm) <= tol * max(w, lm):
            hits.add(v.id)
        elif w < lm:
            minus.add(v.id)
        else:
            plus.add(v.id)
    return Decomposition(lm, frozenset(minus), frozenset(plus), frozenset(hits))


class Orientation(str, enum.Enum):
    RIGHT = "RightOriented"
    LEFT = "LeftOriented"
    MIXED = "Mixed"
    NO_CROSS = "NoCross"


class InvalidDecomposition(ValidationError):
    pass


def cross_edges(graph: MSGraph, dec: Decomposition) -> list[tuple[int, int]]:
    return [(j, k) for j, k in graph.sorted_edges()
            if {dec.side(j), dec.side(k)} == {"-", "+"}]


def orientation(graph: MSGraph, dec: Decomposition) -> Orientation:
    if not dec.valid:
        raise InvalidDecomposition(f"|lambda| lies on the circles of vertices {sorted(dec.circle_hits)}")
    cross = cross_edges(graph, dec)
    if not cross:
        return Orientation.NO_CROSS
    into_plus = [dec.side(j) == "-" for j, _ in cross]
    if all(into_plus):
        return Orientation.RIGHT
    if not any(into_plus):
        return Orientation.LEFT
    return Orientation.MIXED


def _fmt(w: float) -> str:
    return f"{w:.6g}"


def to_dot(graph: MSGraph, dec: Decomposition | None = None) -> str:
    lines = ["digraph G {"]
    if dec is not None:
        lines.append("  node [style=filled];")
    for v in graph.vertices:
        attrs = [f'label="F{v.id} (w={_fmt(v.weight)})"']
        if dec is not None:
            if v.id in dec.g_minus:
                attrs.append("fillcolor=lightblue")
            elif v.id in dec.g_plus:
                attrs.append("fillcolor=salmon")
        lines.append(f"  F{v.id} [{', '.join(attrs)}];")
    cross = set(cross_edges(graph, dec)) if dec is not None else set()
    for j, k in graph.sorted_edges():
        suffix = " [penwidth=2]" if (j, k) in cross else ""
        lines.append(f"  F{j} -> F{k}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"
