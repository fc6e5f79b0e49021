import numpy as np
import pytest
from scipy import sparse

from polylap.eigen import eigen_sym
from polylap.lattice import AmbientGraph, LatticeDomain


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    # compile (or load from cache) the eigensolver kernels once per session
    eigen_sym(np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]), want_vectors=True)
    eigen_sym(np.eye(3))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_animal(rng, d, size, span=None):
    """Connected lattice domain grown by random neighbour accretion."""
    if span is not None and size > (2 * span + 1) ** d:
        raise ValueError("span too small for the requested size")
    pts = {(0,) * d}
    frontier = [(0,) * d]
    while len(pts) < size:
        base = list(pts)[rng.integers(len(pts))] if rng.random() < 0.3 else frontier[rng.integers(len(frontier))]
        axis = rng.integers(d)
        step = 1 if rng.random() < 0.5 else -1
        y = list(base)
        y[axis] += step
        y = tuple(y)
        if span is not None and any(abs(c) > span for c in y):
            continue
        if y not in pts:
            pts.add(y)
            frontier.append(y)
    return LatticeDomain.from_vertices(d, pts)


def grow(rng, domain, extra):
    """A connected superset of ``domain`` with ``extra`` more vertices."""
    pts = set(domain.vertices)
    target = len(pts) + extra
    while len(pts) < target:
        base = list(pts)[rng.integers(len(pts))]
        nb = domain.ambient.neighbors(base)
        y = nb[rng.integers(len(nb))]
        pts.add(y)
    return LatticeDomain.from_vertices(domain.d, pts)


def random_ambient(rng, n, omega_size, extra_edges):
    """Connected random graph on n vertices with a connected omega of the given size."""
    order = rng.permutation(n)
    edges = set()
    for i in range(1, n):
        j = order[rng.integers(i)]
        u, v = int(order[i]), int(j)
        edges.add((min(u, v), max(u, v)))
    tries = 0
    while len(edges) < n - 1 + extra_edges and tries < 10 * extra_edges + 10:
        u, v = (int(x) for x in rng.integers(n, size=2))
        tries += 1
        if u != v:
            edges.add((min(u, v), max(u, v)))
    adj = {i: set() for i in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    start = int(rng.integers(n))
    omega = {start}
    frontier = [start]
    while len(omega) < omega_size and frontier:
        v = frontier[rng.integers(len(frontier))]
        cand = [w for w in adj[v] if w not in omega]
        if not cand:
            frontier.remove(v)
            continue
        w = cand[rng.integers(len(cand))]
        omega.add(w)
        frontier.append(w)
    return AmbientGraph.build(n, sorted(edges), sorted(omega))


def dense_power_oracle(domain, l):
    """Independent assembly: (D - A)^l by explicit sparse matrix products on
    an enclosing region, then restricted to Omega rows/columns.

    Returns (M, exact boundary measure). For lattice domains the region is
    every lattice point within distance l + 1 of Omega, carrying the true Z^d
    degree 2d on the diagonal; for ambient graphs it is the whole graph.
    """
    if isinstance(domain, AmbientGraph):
        verts = list(range(domain.n))
        deg = [domain.degree(v) for v in verts]
        nbrs = domain.neighbors
        omega = list(domain.omega)
    else:
        nbrs = domain.ambient.neighbors
        omega = list(domain.vertices)
        verts = sorted(_bfs_distances(omega, nbrs, None, l + 1))
        deg = [2 * domain.d] * len(verts)
    idx = {v: i for i, v in enumerate(verts)}
    r, c, vals = [], [], []
    for v in verts:
        i = idx[v]
        r.append(i)
        c.append(i)
        vals.append(float(deg[i]))
        for w in nbrs(v):
            if w in idx:
                r.append(i)
                c.append(idx[w])
                vals.append(-1.0)
    n = len(verts)
    lap = sparse.csr_matrix((vals, (r, c)), shape=(n, n))
    rows = [idx[v] for v in omega]
    cols = lap[:, rows].toarray()
    for _ in range(l - 1):
        cols = lap @ cols
    m = cols[rows]
    # layer vertices are exactly those at graph distance 1..l from omega
    dist = _bfs_distances(omega, nbrs, idx, l)
    layer_rows = [idx[v] for v, dv in dist.items() if 1 <= dv <= l]
    exact = float(np.abs(cols[layer_rows]).sum()) if layer_rows else 0.0
    return m, exact


def _bfs_distances(sources, nbrs, idx, limit):
    dist = {v: 0 for v in sources}
    front = list(sources)
    for step in range(1, limit + 1):
        nxt = []
        for v in front:
            for w in nbrs(v):
                if (idx is None or w in idx) and w not in dist:
                    dist[w] = step
                    nxt.append(w)
        front = nxt
    return dist


def path_dirichlet_eigs(m):
    """2 - 2 cos(j pi / (m + 1)), j = 1..m, ascending."""
    j = np.arange(1, m + 1)
    return np.sort(2.0 - 2.0 * np.cos(j * np.pi / (m + 1)))
