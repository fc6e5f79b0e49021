"""Dense symmetric eigensolver.

Householder reduction to tridiagonal form followed by implicit-shift QL
iteration on the tridiagonal matrix. Both stages are compiled with numba and
run without the GIL, so independent decompositions can share a thread pool.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np

MAX_SWEEPS = 50


class EigensolverError(RuntimeError):
    """QL iteration failed to converge."""

    def __init__(self, index: int, fingerprint: str):
        super().__init__(
            f"QL iteration did not converge for eigenvalue {index} after "
            f"{MAX_SWEEPS} sweeps (matrix sha256 {fingerprint})"
        )
        self.index = index
        self.fingerprint = fingerprint


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None
    residuals: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def residual_max(self) -> Optional[float]:
        if self.residuals is None:
            return None
        return float(self.residuals.max()) if len(self.residuals) else 0.0

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "residual_max": self.residual_max,
        }


@numba.njit(cache=True, nogil=True)
def _tridiagonalize(a, want_q):
    # In-place Householder reduction working on the upper triangle, row-wise.
    # Returns diagonal d, off-diagonal e (e[i] couples d[i] and d[i+1],
    # e[n-1] = 0) and the orthogonal factor q with q.T @ A @ q = T.
    n = a.shape[0]
    d = np.zeros(n)
    e = np.zeros(n)
    q = np.eye(n) if want_q else np.zeros((1, 1))
    v = np.zeros(n)
    p = np.zeros(n)
    for k in range(n - 2):
        m = n - k - 1
        o = k + 1
        scale = 0.0
        for i in range(m):
            scale += abs(a[k, o + i])
        d[k] = a[k, k]
        if scale == 0.0:
            e[k] = 0.0
            continue
        sigma = 0.0
        for i in range(m):
            v[i] = a[k, o + i] / scale
            sigma += v[i] * v[i]
        norm = math.sqrt(sigma)
        alpha = -norm if v[0] >= 0.0 else norm
        tail = sigma - v[0] * v[0]
        if tail == 0.0:
            # column already reduced; a reflection would only flip a sign
            e[k] = a[k, o]
            continue
        v[0] -= alpha
        vnorm = math.sqrt(tail + v[0] * v[0])
        for i in range(m):
            v[i] /= vnorm
        e[k] = alpha * scale
        # p = 2 A22 v from the upper triangle
        for i in range(m):
            p[i] = 0.0
        for j in range(m):
            vj = v[j]
            s = a[o + j, o + j] * vj
            for i in range(j + 1, m):
                aji = a[o + j, o + i]
                p[i] += aji * vj
                s += aji * v[i]
            p[j] += s
        kk = 0.0
        for i in range(m):
            p[i] *= 2.0
            kk += v[i] * p[i]
        for i in range(m):
            p[i] -= kk * v[i]
        for j in range(m):
            vj = v[j]
            pj = p[j]
            for i in range(j, m):
                a[o + j, o + i] -= vj * p[i] + pj * v[i]
        if want_q:
            for r in range(n):
                s = 0.0
                for i in range(m):
                    s += q[r, o + i] * v[i]
                s *= 2.0
                for i in range(m):
                    q[r, o + i] -= s * v[i]
    if n >= 2:
        d[n - 2] = a[n - 2, n - 2]
        e[n - 2] = a[n - 2, n - 1]
    d[n - 1] = a[n - 1, n - 1]
    return d, e, q


@numba.njit(cache=True, nogil=True)
def _implicit_ql(d, e, zt, want_z, max_sweeps):
    # Returns -1 on success, else the index whose iteration stalled.
    n = d.shape[0]
    eps = np.finfo(np.float64).eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_sweeps:
                return l
            it += 1
            # shift from the leading 2x2 block
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_z:
                    # zt holds eigenvectors as rows
                    for k in range(zt.shape[1]):
                        f = zt[i + 1, k]
                        zt[i + 1, k] = s * zt[i, k] + c * f
                        zt[i, k] = c * zt[i, k] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def matrix_fingerprint(matrix: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(matrix, dtype=np.float64).tobytes()).hexdigest()[:16]


def eigen_sym(matrix, want_vectors: bool = False) -> Spectrum:
    """Full spectrum of a dense real symmetric matrix, ascending.

    Only the lower triangle is read. With ``want_vectors`` the result also
    carries orthonormal eigenvectors (as columns) and per-pair residual norms
    ``||M v - lambda v||``.
    """
    m = np.array(matrix, dtype=np.float64, order="C")
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n == 0:
        empty = np.zeros(0)
        return Spectrum(empty, np.zeros((0, 0)) if want_vectors else None,
                        empty if want_vectors else None)
    work = np.ascontiguousarray(m.T)
    d, e, q = _tridiagonalize(work, want_vectors)
    zt = np.ascontiguousarray(q.T) if want_vectors else np.zeros((1, 1))
    failed = _implicit_ql(d, e, zt, want_vectors, MAX_SWEEPS)
    if failed >= 0:
        raise EigensolverError(int(failed), matrix_fingerprint(m))
    order = np.argsort(d, kind="stable")
    vals = d[order]
    if not want_vectors:
        return Spectrum(vals)
    vecs = np.ascontiguousarray(zt[order].T)
    full = np.tril(m) + np.tril(m, -1).T
    res = np.linalg.norm(full @ vecs - vecs * vals, axis=0)
    return Spectrum(vals, vecs, res)


def eigenvalues(matrix) -> np.ndarray:
    return eigen_sym(matrix).eigenvalues


def partial_sums(spectrum, k_max: int) -> list[float]:
    """Prefix sums of the ascending eigenvalues, k = 1..k_max.

    Accumulated with Neumaier's compensated summation.
    """
    vals = spectrum.eigenvalues if isinstance(spectrum, Spectrum) else np.asarray(spectrum)
    if k_max > len(vals):
        raise ValueError(f"k_max={k_max} exceeds spectrum size {len(vals)}")
    out = []
    total = 0.0
    comp = 0.0
    for x in vals[:k_max]:
        x = float(x)
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        total = t
        out.append(total + comp)
    return out


def rayleigh_ritz_check(matrix, g, k: int, spectrum: Spectrum) -> float:
    """Slack of gamma_{k+1}<g,g> <= <g,Lg> + sum_{j<=k} (gamma_{k+1}-gamma_j)|<g,f_j>|^2.

    Returns RHS - LHS. ``gamma_{n+1}`` is taken as 0 when ``k == n``.
    """
    if spectrum.eigenvectors is None:
        raise ValueError("rayleigh_ritz_check needs a spectrum with eigenvectors")
    vals = spectrum.eigenvalues
    n = len(vals)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    m = np.asarray(matrix, dtype=np.float64)
    g = np.asarray(g)
    gamma_next = float(vals[k]) if k < n else 0.0
    gg = float(np.vdot(g, g).real)
    glg = float(np.vdot(g, m @ g).real)
    coeffs = spectrum.eigenvectors[:, :k].T @ g
    proj = np.abs(coeffs) ** 2
    rhs = glg + float(np.sum((gamma_next - vals[:k]) * proj))
    return rhs - gamma_next * gg
