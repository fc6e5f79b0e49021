"""Sweeps over growing domains: exhaustion runs and the path-graph ratio study."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Optional, Sequence

from .eigen import eigen_sym
from .lattice import make_ball, make_box
from .operator import assemble

MAX_PATH_N = 2000


def pool_size() -> int:
    """Worker count, capped by the POLYLAP_THREADS environment variable."""
    n = os.cpu_count() or 1
    cap = os.environ.get("POLYLAP_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Order-stable map over a thread pool (eigen_sym releases the GIL)."""
    items = list(items)
    workers = min(pool_size(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def exhaustion_domain(shape: str, d: int, size: int):
    """Member of a nested family: box [-s//2, s - s//2]^d or l1 ball of radius s."""
    if shape == "box":
        lo = -(size // 2)
        return make_box(d, (lo,) * d, (lo + size,) * d)
    if shape == "ball":
        return make_ball(d, (0,) * d, size)
    raise ValueError(f"unknown exhaustion shape {shape!r}")


@dataclass
class ExhaustionStep:
    size: int
    n: int
    lam: Optional[float]  # lambda_k^l(W_i)
    lam1_pow: Optional[float]  # (lambda_k^1(W_i))^l


@dataclass
class ExhaustionResult:
    shape: str
    d: int
    l: int
    k: int
    steps: list

    @property
    def monotone(self) -> bool:
        vals = [s.lam for s in self.steps if s.lam is not None]
        return all(b <= a + 1e-12 * abs(a) for a, b in zip(vals, vals[1:]))

    def to_dict(self) -> dict:
        return {"shape": self.shape, "d": self.d, "l": self.l, "k": self.k,
                "monotone": self.monotone, "steps": [asdict(s) for s in self.steps]}


def run_exhaustion(shape: str, d: int, l: int, k: int, sizes: Iterable[int]) -> ExhaustionResult:
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ValueError("need at least one size")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError(f"sizes must be strictly increasing for nested domains, got {sizes}")
    if l < 1 or k < 1:
        raise ValueError("order and k must be >= 1")

    def step(size):
        dom = exhaustion_domain(shape, d, size)
        if k > len(dom):
            return ExhaustionStep(size, len(dom), None, None)
        lam = float(eigen_sym(assemble(dom, l).matrix).eigenvalues[k - 1])
        lam1 = lam if l == 1 else float(eigen_sym(assemble(dom, 1).matrix).eigenvalues[k - 1])
        return ExhaustionStep(size, len(dom), lam, lam1 ** l)

    return ExhaustionResult(shape, d, l, k, parallel_map(step, sizes))


def _beam_residual(beta: float) -> float:
    # cos(b) - 1/cosh(b): same roots as cos(b) cosh(b) - 1, bounded scale
    return math.cos(beta) - 1.0 / math.cosh(beta)


def clamped_beam_root(k: int, tol: float = 1e-12) -> float:
    """k-th positive root of cos(b) cosh(b) = 1 by bisection polished with Newton."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a = (k + 0.5) * math.pi - 1.0
    b = (k + 0.5) * math.pi + 1.0
    fa = _beam_residual(a)
    if fa * _beam_residual(b) > 0:
        raise ArithmeticError(f"bracket [{a}, {b}] does not straddle a root")
    while b - a > 1e-6:
        mid = 0.5 * (a + b)
        fm = _beam_residual(mid)
        if fa * fm <= 0:
            b = mid
        else:
            a, fa = mid, fm
    x = 0.5 * (a + b)
    for _ in range(50):
        deriv = -math.sin(x) + math.tanh(x) / math.cosh(x)
        step = _beam_residual(x) / deriv
        x -= step
        if abs(step) <= tol * x:
            break
    else:
        raise ArithmeticError(f"Newton iteration for beam root {k} did not converge")
    return x


def clamped_beam_constant(k: int) -> float:
    """(k pi)^4 / beta_k^4: squared membrane over clamped-beam eigenvalue on (0, 1)."""
    beta = clamped_beam_root(k)
    return (k * math.pi) ** 4 / beta ** 4


def path_ratio(n: int, k: int) -> float:
    """(lambda_k^1)^2 / lambda_k^2 on the path [0, n]."""
    dom = make_box(1, (0,), (n,))
    lam1 = eigen_sym(assemble(dom, 1).matrix).eigenvalues[k - 1]
    lam2 = eigen_sym(assemble(dom, 2).matrix).eigenvalues[k - 1]
    return float(lam1 ** 2 / lam2)


@dataclass
class RatioSeries:
    k: int
    entries: list  # [{"n": n, "ratio": r}]
    reference: float

    @property
    def ratios(self) -> list[float]:
        return [e["ratio"] for e in self.entries]

    def richardson(self) -> Optional[float]:
        """2 r(2n) - r(n) from the last two entries, which must be a doubling."""
        if len(self.entries) < 2:
            return None
        a, b = self.entries[-2], self.entries[-1]
        if b["n"] != 2 * a["n"]:
            return None
        return 2.0 * b["ratio"] - a["ratio"]

    def successive_differences(self) -> list[float]:
        r = self.ratios
        return [abs(y - x) for x, y in zip(r, r[1:])]

    def to_dict(self) -> dict:
        return {"k": self.k, "reference": self.reference, "extrapolated": self.richardson(),
                "entries": self.entries}


def run_appendix_fig1(k: int = 1, n_list: Sequence[int] = (25, 50, 100, 200, 400)) -> RatioSeries:
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError(f"n_list must be increasing, got {n_list}")
    if n_list and n_list[-1] > MAX_PATH_N:
        raise ValueError(f"path length {n_list[-1]} exceeds cap {MAX_PATH_N}")
    if any(n + 1 < k for n in n_list):
        raise ValueError(f"path [0, n] has fewer than k={k} vertices")
    ratios = parallel_map(lambda n: path_ratio(n, k), n_list)
    entries = [{"n": n, "ratio": r} for n, r in zip(n_list, ratios)]
    return RatioSeries(k, entries, clamped_beam_constant(k))
