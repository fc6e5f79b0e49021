"""Lattice Fourier identities checked by exact trigonometric quadrature.

For f supported on a finite Omega in Z^d, z -> |<f, h_z>|^2 and
z -> Phi(z)^l |<f, h_z>|^2 are trigonometric polynomials. The uniform grid on
[-pi, pi)^d integrates e^{i<m,z>} exactly whenever every |m_i| < N, so with
N = 2 (extent + l) + 1 nodes per axis the checks below are exact up to
rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import eigen_sym
from .lattice import LatticeDomain, make_box
from .operator import assemble

CHUNK = 4096


class CertificateError(ValueError):
    """Grid too coarse for exact quadrature of the requested integrand."""


def phi(z) -> float | np.ndarray:
    """Fourier symbol of -Delta: sum_i (2 - 2 cos z_i). Accepts (..., d) arrays."""
    z = np.asarray(z, dtype=np.float64)
    return np.sum(2.0 - 2.0 * np.cos(z), axis=-1)


@dataclass(frozen=True)
class FourierGrid:
    d: int
    points_per_dim: int
    certified_degree: int  # largest frequency extent this grid integrates exactly

    @property
    def weight(self) -> float:
        return (2 * np.pi / self.points_per_dim) ** self.d

    @property
    def size(self) -> int:
        return self.points_per_dim ** self.d

    def axis(self) -> np.ndarray:
        n = self.points_per_dim
        return -np.pi + 2 * np.pi * np.arange(n) / n

    def nodes(self) -> np.ndarray:
        ax = self.axis()
        mesh = np.meshgrid(*([ax] * self.d), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def certifies(self, extent: int, l: int = 0) -> bool:
        return self.points_per_dim > 2 * (extent + l)


def required_points(extent: int, l: int = 0) -> int:
    return 2 * (extent + l) + 1


def make_grid(domain: LatticeDomain, l: int = 0, points: int | None = None) -> FourierGrid:
    n = required_points(domain.extent(), l) if points is None else int(points)
    if n < 1:
        raise ValueError("grid needs at least one point per axis")
    return FourierGrid(domain.d, n, (n - 1) // 2)


def _coords(domain: LatticeDomain) -> np.ndarray:
    return np.array(domain.vertices, dtype=np.float64)


def hz_inner(domain: LatticeDomain, f, z) -> complex:
    """<f, h_z>_Omega = sum_x f(x) e^{-i<x,z>}."""
    z = np.asarray(z, dtype=np.float64).reshape(domain.d)
    phase = np.exp(-1j * (_coords(domain) @ z))
    return complex(np.dot(np.asarray(f), phase))


def _transform_on_grid(domain, f, grid):
    # yields (nodes_chunk, <f, h_z> for z in chunk)
    x = _coords(domain)
    f = np.asarray(f)
    nodes = grid.nodes()
    for start in range(0, len(nodes), CHUNK):
        z = nodes[start:start + CHUNK]
        yield z, np.exp(-1j * (z @ x.T)) @ f


def _check_certificate(domain, grid, l, strict):
    ok = grid.certifies(domain.extent(), l)
    if strict and not ok:
        raise CertificateError(
            f"grid with N={grid.points_per_dim} is not exact here; "
            f"need N >= {required_points(domain.extent(), l)}")
    return ok


@dataclass(frozen=True)
class FourierCheck:
    lhs: float
    rhs: float
    rel_err: float
    grid_n: int
    certificate_ok: bool

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "rel_err": self.rel_err,
                "grid_n": self.grid_n, "certificate_ok": self.certificate_ok}


def _result(lhs, rhs, grid, ok):
    rel = abs(lhs - rhs) / max(abs(lhs), np.finfo(float).tiny)
    return FourierCheck(float(lhs), float(rhs), float(rel), grid.points_per_dim, ok)


def plancherel_check(domain: LatticeDomain, f, grid: FourierGrid | None = None,
                     strict: bool = True) -> FourierCheck:
    """<f,f>_Omega against (2 pi)^-d times the grid integral of |<f,h_z>|^2."""
    grid = make_grid(domain, 0) if grid is None else grid
    ok = _check_certificate(domain, grid, 0, strict)
    f = np.asarray(f)
    lhs = float(np.vdot(f, f).real)
    acc = 0.0
    for _, tr in _transform_on_grid(domain, f, grid):
        acc += float(np.sum(np.abs(tr) ** 2))
    rhs = acc * grid.weight / (2 * np.pi) ** domain.d
    return _result(lhs, rhs, grid, ok)


def polylaplace_fourier_check(domain: LatticeDomain, f, l: int, grid: FourierGrid | None = None,
                              strict: bool = True, op=None) -> FourierCheck:
    """<f, M_l f>_Omega against (2 pi)^-d times the grid integral of Phi^l |<f,h_z>|^2."""
    grid = make_grid(domain, l) if grid is None else grid
    ok = _check_certificate(domain, grid, l, strict)
    op = assemble(domain, l) if op is None else op
    f = np.asarray(f)
    lhs = float(np.vdot(f, op.matrix @ f).real)
    acc = 0.0
    for z, tr in _transform_on_grid(domain, f, grid):
        acc += float(np.sum(phi(z) ** l * np.abs(tr) ** 2))
    rhs = acc * grid.weight / (2 * np.pi) ** domain.d
    return _result(lhs, rhs, grid, ok)


@dataclass(frozen=True)
class HzBoundCheck:
    max_slack: float  # max_z |<h_z, M h_z>| - Phi(z)^l |Omega| - |d^l Omega|
    scale: float
    argmax: tuple
    nodes: int

    @property
    def ok(self) -> bool:
        return self.max_slack <= 1e-9 * self.scale


def hz_operator_bound_check(domain: LatticeDomain, l: int, grid: FourierGrid | None = None,
                            op=None) -> HzBoundCheck:
    """Sweep the pointwise bound |<h_z, M h_z>| <= Phi(z)^l |Omega| + |d^l Omega| over a grid."""
    grid = make_grid(domain, l) if grid is None else grid
    op = assemble(domain, l) if op is None else op
    x = _coords(domain)
    n = len(domain)
    nodes = grid.nodes()
    best = -np.inf
    arg = None
    scale = 0.0
    for start in range(0, len(nodes), CHUNK):
        z = nodes[start:start + CHUNK]
        h = np.exp(1j * (z @ x.T))  # rows are h_z restricted to Omega
        mh = h @ op.matrix
        lhs = np.abs(np.sum(h * np.conj(mh), axis=1))
        rhs = phi(z) ** l * n + op.boundary.exact
        slack = lhs - rhs
        i = int(np.argmax(slack))
        if slack[i] > best:
            best = float(slack[i])
            arg = tuple(float(c) for c in z[i])
        scale = max(scale, float(rhs.max()))
    return HzBoundCheck(best, scale, arg, len(nodes))


@dataclass(frozen=True)
class DecayRow:
    size: int
    n: int
    restricted_residual: float  # min over unit f of ||(M_l - lam) f|| on Omega
    ambient_residual: float  # min over unit f of ||((-Delta)^l - lam) f*|| on Z^d


def _box(d: int, size: int) -> LatticeDomain:
    return make_box(d, (0,) * d, (size - 1,) * d)


def no_l2_eigenfunction_demo(l: int, lam: float, box_sizes, d: int = 1) -> list[DecayRow]:
    """Residual table for near-eigenfunctions supported in growing boxes.

    Diagnostic only: the absence of an l^2 eigenfunction is an exact
    statement that no finite computation can settle.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    rows = []
    for size in box_sizes:
        dom = _box(d, size)
        m_l = assemble(dom, l).matrix
        m_2l = assemble(dom, 2 * l).matrix
        restricted = float(np.min(np.abs(eigen_sym(m_l).eigenvalues - lam)))
        # ||((-Delta)^l - lam) f*||^2 = <f, (M_2l - 2 lam M_l + lam^2) f>
        gram = m_2l - 2 * lam * m_l + lam ** 2 * np.eye(len(dom))
        smallest = float(eigen_sym(gram).eigenvalues[0])
        rows.append(DecayRow(size, len(dom), restricted, float(np.sqrt(max(smallest, 0.0)))))
    return rows


def quadrature_of_exponential(m, grid: FourierGrid) -> complex:
    """Grid quadrature of e^{i<m,z>} over [-pi, pi)^d."""
    m = np.asarray(m, dtype=np.float64).reshape(grid.d)
    ax = grid.axis()
    total = 1.0 + 0j
    for mi in m:
        total *= np.sum(np.exp(1j * mi * ax))
    return complex(total * grid.weight)

