"""Finite subgraphs of Z^d and of general finite graphs.

Two domain kinds share one small interface (``omega``, ``neighbors``,
``degree``, ``index``) so that boundary layers, padding and operator
assembly never need to know which one they are looking at:

* :class:`LatticeDomain` - a vertex set in Z^d, vertices are integer tuples.
* :class:`AmbientGraph` - a finite simple graph with a designated subset,
  vertices are ints ``0..n-1``.

Subgraphs are always vertex-induced.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Sequence

MAX_AMBIENT_VERTICES = 100_000
MAX_SPECTRUM_VERTICES = 10_000


class DomainError(ValueError):
    """Malformed domain description."""


@dataclass(frozen=True)
class IntegerLattice:
    """The Cayley graph Z^d with generators +-e_i (2d-regular)."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d}")

    def neighbors(self, x: tuple) -> list[tuple]:
        out = []
        for i in range(self.d):
            for step in (-1, 1):
                y = list(x)
                y[i] += step
                out.append(tuple(y))
        return out

    def degree(self, x=None) -> int:
        return 2 * self.d

    def is_regular(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class LatticeDomain:
    """Finite vertex set Omega in Z^d, stored in lexicographic order."""

    d: int
    vertices: tuple
    index: dict = field(repr=False)

    @classmethod
    def from_vertices(cls, d: int, vertices: Iterable[Sequence[int]]) -> "LatticeDomain":
        pts = set()
        for v in vertices:
            v = tuple(int(c) for c in v)
            if len(v) != d:
                raise DomainError(f"vertex {v} has {len(v)} coordinates, expected {d}")
            pts.add(v)
        if not pts:
            raise DomainError("domain must contain at least one vertex")
        ordered = tuple(sorted(pts))
        return cls(d, ordered, {v: i for i, v in enumerate(ordered)})

    @property
    def ambient(self) -> IntegerLattice:
        return IntegerLattice(self.d)

    @property
    def omega(self) -> tuple:
        return self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v) -> bool:
        return v in self.index

    def neighbors(self, v) -> list:
        return self.ambient.neighbors(v)

    def degree(self, v) -> int:
        return 2 * self.d

    def is_regular(self) -> bool:
        return True

    def extent(self) -> int:
        """Largest coordinate spread max_i (max x_i - min x_i)."""
        spans = []
        for i in range(self.d):
            coords = [v[i] for v in self.vertices]
            spans.append(max(coords) - min(coords))
        return max(spans)

    def is_connected(self) -> bool:
        return _is_connected(self.vertices, lambda v: (y for y in self.neighbors(v) if y in self.index))

    def to_dict(self) -> dict:
        return {"kind": "explicit", "d": self.d, "vertices": [list(v) for v in self.vertices]}


@dataclass(frozen=True, eq=False)
class AmbientGraph:
    """Finite simple undirected graph on ``0..n-1`` with a subset ``omega``."""

    n: int
    edges: tuple
    omega: tuple
    adjacency: tuple = field(repr=False)
    index: dict = field(repr=False)

    @classmethod
    def build(cls, n: int, edges: Iterable[Sequence[int]], omega: Iterable[int]) -> "AmbientGraph":
        if not 1 <= n <= MAX_AMBIENT_VERTICES:
            raise DomainError(f"ambient vertex count must be in [1, {MAX_AMBIENT_VERTICES}], got {n}")
        adj = [set() for _ in range(n)]
        canon = set()
        for e in edges:
            if len(e) != 2:
                raise DomainError(f"edge {e} does not have two endpoints")
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge {e} out of range for n={n}")
            if u == v:
                raise DomainError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in canon:
                raise DomainError(f"multi-edge {key}")
            canon.add(key)
            adj[u].add(v)
            adj[v].add(u)
        om = sorted({int(x) for x in omega})
        if not om:
            raise DomainError("omega must be nonempty")
        if om[0] < 0 or om[-1] >= n:
            raise DomainError("omega indices out of range")
        adjacency = tuple(tuple(sorted(s)) for s in adj)
        return cls(n, tuple(sorted(canon)), tuple(om), adjacency, {v: i for i, v in enumerate(om)})

    @property
    def ambient(self) -> "AmbientGraph":
        return self

    @property
    def vertices(self) -> tuple:
        return self.omega

    def __len__(self) -> int:
        return len(self.omega)

    def __contains__(self, v) -> bool:
        return v in self.index

    def neighbors(self, v: int) -> tuple:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def is_regular(self) -> bool:
        return len({len(a) for a in self.adjacency}) == 1

    def is_connected(self) -> bool:
        """Connectivity of the subgraph induced on omega."""
        return _is_connected(self.omega, lambda v: (y for y in self.adjacency[v] if y in self.index))

    def to_dict(self) -> dict:
        return {"kind": "ambient", "n": self.n, "edges": [list(e) for e in self.edges],
                "omega": list(self.omega)}


def _is_connected(vertices, inner_neighbors) -> bool:
    if not vertices:
        return True
    seen = {vertices[0]}
    queue = deque([vertices[0]])
    while queue:
        v = queue.popleft()
        for y in inner_neighbors(v):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == len(vertices)


# --- constructors ---------------------------------------------------------

def make_box(d: int, lo: Sequence[int], hi: Sequence[int]) -> LatticeDomain:
    lo, hi = _as_tuple(lo), _as_tuple(hi)
    if len(lo) != d or len(hi) != d:
        raise DomainError(f"box corners {lo}, {hi} do not match dimension {d}")
    if any(a > b for a, b in zip(lo, hi)):
        raise DomainError(f"empty box: lo={lo} hi={hi}")
    ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
    return LatticeDomain.from_vertices(d, itertools.product(*ranges))


def make_ball(d: int, center: Sequence[int], r: int) -> LatticeDomain:
    """Graph ball B(center, r) in Z^d, i.e. the l1 ball."""
    center = _as_tuple(center)
    if len(center) != d:
        raise DomainError(f"center {center} does not match dimension {d}")
    if r < 0:
        raise DomainError(f"radius must be >= 0, got {r}")
    pts = []
    for off in itertools.product(range(-r, r + 1), repeat=d):
        if sum(abs(c) for c in off) <= r:
            pts.append(tuple(c + o for c, o in zip(center, off)))
    return LatticeDomain.from_vertices(d, pts)


def cycle_graph(n: int, omega: Iterable[int]) -> AmbientGraph:
    return AmbientGraph.build(n, [(i, (i + 1) % n) for i in range(n)], omega)


def _as_tuple(x) -> tuple:
    if isinstance(x, int):
        return (x,)
    return tuple(int(c) for c in x)


def parse_domain(spec) -> LatticeDomain | AmbientGraph:
    """Build a domain from its JSON description (dict, JSON text or file path)."""
    if isinstance(spec, (str, Path)):
        text = str(spec)
        if not text.lstrip().startswith("{"):
            try:
                text = Path(text).read_text()
            except OSError as exc:
                raise DomainError(f"cannot read domain file {spec}: {exc}") from exc
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"invalid domain JSON: {exc}") from exc
    if not isinstance(spec, dict):
        raise DomainError("domain description must be a JSON object")
    kind = spec.get("kind")
    try:
        if kind == "box":
            return make_box(int(spec["d"]), spec["lo"], spec["hi"])
        if kind == "ball":
            return make_ball(int(spec["d"]), spec["center"], int(spec["r"]))
        if kind == "explicit":
            return LatticeDomain.from_vertices(int(spec["d"]), spec["vertices"])
        if kind == "ambient":
            return AmbientGraph.build(int(spec["n"]), spec["edges"], spec["omega"])
    except KeyError as exc:
        raise DomainError(f"domain of kind {kind!r} is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"bad domain field: {exc}") from exc
    raise DomainError(f"unknown domain kind {kind!r}")


# --- boundary layers and counts -------------------------------------------

@dataclass(frozen=True)
class BoundaryLayers:
    layers: tuple  # tuple of frozensets [delta_1, ..., delta_L]

    def __getitem__(self, j: int) -> frozenset:
        """1-based access: ``layers[1]`` is the outer vertex boundary."""
        return self.layers[j - 1]

    def __len__(self) -> int:
        return len(self.layers)

    def sizes(self) -> list[int]:
        return [len(s) for s in self.layers]


def boundary_layers(domain, L: int) -> BoundaryLayers:
    """delta_j = delta(Omega u delta_1 u ... u delta_{j-1}) for j = 1..L."""
    if L < 1:
        raise ValueError(f"layer count must be >= 1, got {L}")
    covered = set(domain.omega)
    front = list(domain.omega)
    layers = []
    for _ in range(L):
        new = set()
        for v in front:
            for y in domain.neighbors(v):
                if y not in covered:
                    new.add(y)
        covered |= new
        layers.append(frozenset(new))
        front = sorted(new)
    return BoundaryLayers(tuple(layers))


@dataclass(frozen=True)
class EdgeCounts:
    e1: int  # |E(delta Omega, Omega)|
    e2: int  # |E(delta Omega)|, edges with both ends in delta Omega
    e3: int  # |E(delta Omega, delta_2 Omega)|


def edge_counts(domain) -> EdgeCounts:
    bl = boundary_layers(domain, 2)
    d1, d2 = bl[1], bl[2]
    inner = set(domain.omega)
    e1 = e2 = e3 = 0
    for x in d1:
        for y in domain.neighbors(x):
            if y in inner:
                e1 += 1
            elif y in d1:
                e2 += 1
            elif y in d2:
                e3 += 1
    # edges inside delta Omega were seen from both ends
    return EdgeCounts(e1, e2 // 2, e3)


def _graph_of(graph):
    if isinstance(graph, LatticeDomain):
        return graph.ambient
    return graph


def count_paths(graph, x, y, m: int) -> int:
    """Number of walks of length m from x to y, i.e. (A^m)_{xy}.

    Propagates exact integer walk counts from x; only B(x, m) is touched.
    """
    if m < 0:
        raise ValueError(f"path length must be >= 0, got {m}")
    g = _graph_of(graph)
    counts = {x: 1}
    for step in range(m):
        nxt: dict[Hashable, int] = {}
        remaining = m - step - 1
        for v, c in counts.items():
            for w in g.neighbors(v):
                nxt[w] = nxt.get(w, 0) + c
        if isinstance(g, IntegerLattice):
            # prune vertices that can no longer reach y
            nxt = {v: c for v, c in nxt.items()
                   if sum(abs(a - b) for a, b in zip(v, y)) <= remaining}
        counts = nxt
    return counts.get(y, 0)


def graph_distance(graph, x, y) -> float:
    """Breadth-first shortest path length; ``math.inf`` if unreachable."""
    g = _graph_of(graph)
    if x == y:
        return 0
    seen = {x}
    front = [x]
    dist = 0
    while front:
        dist += 1
        nxt = []
        for v in front:
            for w in g.neighbors(v):
                if w == y:
                    return dist
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        front = nxt
    return math.inf
