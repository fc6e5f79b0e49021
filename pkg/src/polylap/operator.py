"""Dirichlet poly-Laplace operator on a finite domain.

The order-l operator is ``f -> (-Delta)^l f* |_Omega`` with ``f*`` the zero
extension of ``f``. It is assembled column by column: each vertex indicator
is pushed through ``l`` stencil applications on Omega padded by ``l``
boundary layers, which is exact because ``(-Delta)^m`` of a point mass lives
in the radius-m ball around it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .lattice import LatticeDomain, boundary_layers, count_paths


class AssemblyError(RuntimeError):
    """Assembled matrix failed its symmetry check."""


@dataclass(frozen=True, eq=False)
class PaddedDomain:
    """Omega followed by boundary layers delta_1..delta_width.

    ``neighbors`` is a (size, max_degree) table of row indices into
    ``vertices``; slots pointing outside the padding hold ``size`` (a
    sentinel row that always carries zeros).
    """

    domain: object
    width: int
    vertices: tuple
    index: dict
    layer_sizes: tuple
    neighbors: np.ndarray
    degree: np.ndarray

    @property
    def n_omega(self) -> int:
        return len(self.domain)

    @property
    def size(self) -> int:
        return len(self.vertices)


def pad(domain, width: int) -> PaddedDomain:
    bl = boundary_layers(domain, width) if width >= 1 else None
    verts = list(domain.omega)
    sizes = []
    if bl is not None:
        for layer in bl.layers:
            verts.extend(sorted(layer))
            sizes.append(len(layer))
    index = {v: i for i, v in enumerate(verts)}
    size = len(verts)
    degs = np.array([domain.degree(v) for v in verts], dtype=np.int64)
    width_tab = int(degs.max()) if size else 0
    nbr = np.full((size, width_tab), size, dtype=np.int64)
    for i, v in enumerate(verts):
        for j, w in enumerate(domain.neighbors(v)):
            nbr[i, j] = index.get(w, size)
    return PaddedDomain(domain, width, tuple(verts), index, tuple(sizes), nbr, degs.astype(np.float64))


def _minus_laplacian(padded: PaddedDomain, x: np.ndarray) -> np.ndarray:
    # (-Delta) x on the padded set; x has one row per padded vertex.
    ext = np.zeros((padded.size + 1,) + x.shape[1:], dtype=x.dtype)
    ext[:-1] = x
    out = padded.degree.reshape((-1,) + (1,) * (x.ndim - 1)) * x
    for j in range(padded.neighbors.shape[1]):
        out -= ext[padded.neighbors[:, j]]
    return out


def apply_laplacian(graph, f: dict) -> dict:
    """Delta f(x) = sum_{y~x} (f(y) - f(x)) on supp f and its neighbours.

    ``f`` maps vertices to values and is zero off its keys. ``graph`` is an
    :class:`IntegerLattice`, a :class:`LatticeDomain` (its ambient Z^d is
    used) or an :class:`AmbientGraph` (its whole vertex set).
    """
    g = graph.ambient if isinstance(graph, LatticeDomain) else graph
    support = set(f)
    for v in f:
        support.update(g.neighbors(v))
    out = {}
    for x in sorted(support):
        fx = f.get(x, 0)
        out[x] = sum(f.get(y, 0) - fx for y in g.neighbors(x))
    return out


def zero_extend(padded: PaddedDomain, f) -> np.ndarray:
    """Values of f on Omega, zeros on the padding layers."""
    f = np.asarray(f)
    n = padded.n_omega
    if f.shape[0] != n:
        raise ValueError(f"function has {f.shape[0]} values, domain has {n} vertices")
    out = np.zeros((padded.size,) + f.shape[1:], dtype=np.result_type(f, np.float64))
    out[:n] = f
    return out


@dataclass(frozen=True)
class BoundaryMeasure:
    l: int
    exact: float
    crude: float


@dataclass(frozen=True, eq=False)
class PolyLaplaceOperator:
    order: int
    matrix: np.ndarray
    domain: object
    boundary: BoundaryMeasure

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _power_columns(domain, l: int):
    padded = pad(domain, l)
    n = padded.n_omega
    cols = np.zeros((padded.size, n))
    cols[np.arange(n), np.arange(n)] = 1.0
    for _ in range(l):
        cols = _minus_laplacian(padded, cols)
    return padded, cols


def _crude_boundary(padded: PaddedDomain, l: int) -> float:
    # sum_y ((D + A)^l)_{xy} <= (2 max deg)^l; on Z^d this is 4^l d^l
    max_deg = float(max(padded.domain.degree(v) for v in padded.vertices)) if padded.size else 0.0
    return (2.0 * max_deg) ** l * sum(padded.layer_sizes)


def assemble(domain, l: int) -> PolyLaplaceOperator:
    """Matrix of (-1)^l Delta_Omega^{l,D} in the domain's vertex order."""
    if l < 1:
        raise ValueError(f"order must be >= 1, got {l}")
    padded, cols = _power_columns(domain, l)
    n = padded.n_omega
    m = cols[:n]
    scale = float(np.abs(m).max())
    defect = float(np.abs(m - m.T).max())
    if defect > 1e-13 * scale:
        raise AssemblyError(f"symmetry defect {defect:.3e} exceeds 1e-13 * {scale:.3e}")
    m = 0.5 * (m + m.T)
    exact = float(np.abs(cols[n:]).sum())
    bm = BoundaryMeasure(l, exact, _crude_boundary(padded, l))
    return PolyLaplaceOperator(l, np.ascontiguousarray(m), domain, bm)


def boundary_measure(domain, l: int) -> BoundaryMeasure:
    """|d^l Omega| from the operator rows at layer vertices, plus the crude bound."""
    if l < 1:
        raise ValueError(f"order must be >= 1, got {l}")
    padded, cols = _power_columns(domain, l)
    exact = float(np.abs(cols[padded.n_omega:]).sum())
    return BoundaryMeasure(l, exact, _crude_boundary(padded, l))


def coeff_axy(graph, x, y, l: int) -> int:
    """a^l_{xy} = sum_m C(l,m) (-1)^m deg(y)^(l-m) p_m(x,y) on a regular graph."""
    g = graph.ambient if isinstance(graph, LatticeDomain) else graph
    if not g.is_regular():
        raise ValueError("the binomial path-count formula needs a regular ambient graph")
    deg = g.degree(y)
    return sum(math.comb(l, m) * (-1) ** m * deg ** (l - m) * count_paths(g, x, y, m)
               for m in range(l + 1))


def quadratic_form(op: PolyLaplaceOperator, f) -> float:
    """<M f, f> with the conjugate on the second slot."""
    f = np.asarray(f)
    val = np.vdot(f, op.matrix @ f)
    scale = max(float(np.vdot(f, f).real) * float(np.abs(op.matrix).max()), 1e-300)
    if abs(val.imag) > 1e-12 * scale:
        raise ArithmeticError(f"quadratic form has imaginary part {val.imag:.3e}")
    return float(val.real)


def dump_matrix_market(op: PolyLaplaceOperator, fh: IO[str]) -> None:
    """Write the lower triangle in Matrix Market coordinate/symmetric format."""
    m = op.matrix
    n = m.shape[0]
    rows, cols = np.nonzero(np.tril(m))
    fh.write("%%MatrixMarket matrix coordinate real symmetric\n")
    fh.write(f"% polylap order={op.order}\n")
    fh.write(f"{n} {n} {len(rows)}\n")
    for i, j in zip(rows, cols):
        fh.write(f"{i + 1} {j + 1} {m[i, j]:.17g}\n")


def load_matrix_market(fh: IO[str]) -> np.ndarray:
    lines = [ln for ln in fh.read().splitlines() if ln and not ln.startswith("%")]
    n, _, nnz = (int(t) for t in lines[0].split())
    m = np.zeros((n, n))
    for ln in lines[1:1 + nnz]:
        i, j, v = ln.split()
        i, j = int(i) - 1, int(j) - 1
        m[i, j] = m[j, i] = float(v)
    return m

