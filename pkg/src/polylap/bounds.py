"""Closed-form eigenvalue bounds on lattice domains and their verification.

All bound functions return ``None`` when k falls outside the range on which
the bound is proven. No extrapolated values are ever reported.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from .eigen import eigen_sym, partial_sums
from .lattice import boundary_layers, edge_counts
from .operator import BoundaryMeasure, assemble

SLACK = 1e-9


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d via V_d = V_{d-2} * 2 pi / d."""
    if d < 0:
        raise ValueError(f"dimension must be >= 0, got {d}")
    v = 1.0 if d % 2 == 0 else 2.0
    for j in range(2 if d % 2 == 0 else 3, d + 1, 2):
        v *= 2.0 * math.pi / j
    return v


def upper_mean_cap(d: int) -> float:
    return min(1.0, unit_ball_volume(d) / 2 ** d)


def upper_next_cap(d: int) -> float:
    return min(1.0, unit_ball_volume(d) / 2 ** (d + 1))


def lower_mean_cap(d: int) -> float:
    return min(1.0, (math.sqrt(6.0) / (2 * math.pi)) ** d * unit_ball_volume(d))


def _in_range(k: int, cap: float, omega_size: int) -> bool:
    return 1 <= k <= cap * omega_size


def _weyl_term(d: int, power: int, k: int, omega_size: int) -> float:
    # (2 pi)^power * d / (d + power) * (k / (V_d |Omega|))^(power / d)
    return ((2 * math.pi) ** power * d / (d + power)
            * (k / (unit_ball_volume(d) * omega_size)) ** (power / d))


def upper_bound_mean(d: int, l: int, k: int, omega_size: int, boundary_exact: float) -> Optional[float]:
    """Upper bound on (1/k) sum_{j<=k} lambda_j^l, valid for k <= min(1, V_d/2^d)|Omega|."""
    if not _in_range(k, upper_mean_cap(d), omega_size):
        return None
    return _weyl_term(d, 2 * l, k, omega_size) + boundary_exact / omega_size


def upper_bound_next(d: int, l: int, k: int, omega_size: int, boundary_exact: float) -> Optional[float]:
    """Upper bound on lambda_{k+1}^l, valid for k <= min(1, V_d/2^(d+1))|Omega|."""
    if not _in_range(k, upper_next_cap(d), omega_size):
        return None
    return (2.0 ** ((d + 2 * l) / d) * _weyl_term(d, 2 * l, k, omega_size)
            + 2.0 * boundary_exact / omega_size)


def lower_bound_mean(d: int, l: int, k: int, omega_size: int) -> Optional[float]:
    """Li-Yau type lower bound on (1/k) sum_{j<=k} lambda_j^l.

    Alternating series sum_m C(l,m) (-1/12)^m (2pi)^{2(l+m)} d/(d+2(l+m))
    (k/(V_d|Omega|))^{2(l+m)/d}, valid for k <= min(1, (sqrt6/2pi)^d V_d)|Omega|.
    """
    if l < 1:
        raise ValueError(f"order must be >= 1, got {l}")
    if not _in_range(k, lower_mean_cap(d), omega_size):
        return None
    terms = [math.comb(l, m) * (-1.0 / 12.0) ** m * _weyl_term(d, 2 * (l + m), k, omega_size)
             for m in range(l + 1)]
    value = math.fsum(terms)
    assert value > 0.0, f"lower bound not positive inside its validity range: {value}"
    return value


def refined_boundary_l1(domain) -> int:
    """|E(Omega, delta Omega)|, which equals |d^1 Omega| exactly."""
    return edge_counts(domain).e1


def refined_boundary_l2(domain) -> int:
    """4d E1 + (E1 + 2 E2 + E3) N + E3 E1 with N = max_{x in delta Omega} 2 deg_in(x).

    ``d`` is half the ambient degree (the lattice dimension on Z^d).
    """
    ec = edge_counts(domain)
    inner = set(domain.omega)
    outer = boundary_layers(domain, 1)[1]
    n_factor = max((2 * sum(1 for y in domain.neighbors(x) if y in inner) for x in outer), default=0)
    half_deg = max(domain.degree(v) for v in domain.omega) / 2
    return int(4 * half_deg * ec.e1 + (ec.e1 + 2 * ec.e2 + ec.e3) * n_factor + ec.e3 * ec.e1)


@dataclass
class BoundsRow:
    k: int
    mean_eigs: float
    upper_mean: Optional[float]
    next_eig: Optional[float]
    upper_next: Optional[float]
    lower_mean: Optional[float]
    eig_k: float
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v for v in self.verdicts.values() if v is not None)


@dataclass
class BoundsReport:
    d: int
    l: int
    omega_size: int
    boundary: BoundaryMeasure
    rows: list

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "l": self.l,
            "omega_size": self.omega_size,
            "boundary": asdict(self.boundary),
            "all_pass": self.all_pass,
            "rows": [asdict(r) for r in self.rows],
        }


def _leq(a: float, b: float) -> bool:
    return a <= b + SLACK * abs(b)


def evaluate_bounds(eigs, d: int, l: int, boundary: BoundaryMeasure, k_max: int) -> BoundsReport:
    """Compare a precomputed ascending spectrum against every bound."""
    n = len(eigs)
    k_top = min(k_max, n)
    sums = partial_sums(eigs, k_top)
    rows = []
    for k in range(1, k_top + 1):
        mean = sums[k - 1] / k
        nxt = float(eigs[k]) if k < n else None
        um = upper_bound_mean(d, l, k, n, boundary.exact)
        un = upper_bound_next(d, l, k, n, boundary.exact)
        lm = lower_bound_mean(d, l, k, n)
        verdicts = {
            "upper_mean": None if um is None else _leq(mean, um),
            "upper_next": None if un is None or nxt is None else _leq(nxt, un),
            "lower_mean": None if lm is None else (_leq(lm, mean) and lm > 0.0),
            "lower_eig": None if lm is None else _leq(lm, float(eigs[k - 1])),
        }
        rows.append(BoundsRow(k, mean, um, nxt, un, lm, float(eigs[k - 1]), verdicts))
    return BoundsReport(d, l, n, boundary, rows)


def verify_bounds(domain, l: int, k_max: int) -> BoundsReport:
    """Assemble, solve and check both parts of the sum bounds for k = 1..k_max."""
    op = assemble(domain, l)
    eigs = eigen_sym(op.matrix).eigenvalues
    d = getattr(domain, "d", None)
    if d is None:
        raise ValueError("bound verification needs a lattice domain in Z^d")
    return evaluate_bounds(eigs, d, l, op.boundary, k_max)


@dataclass
class OrderRow:
    k: int
    lam_l_sq: float
    lam_2l: float
    gap: float


@dataclass
class OrderComparison:
    l: int
    rows: list

    def min_relative_gap(self) -> float:
        return min(r.gap / r.lam_2l for r in self.rows)

    @property
    def all_pass(self) -> bool:
        return all(r.gap >= -SLACK * r.lam_2l for r in self.rows)

    def to_dict(self) -> dict:
        return {"l": self.l, "all_pass": self.all_pass, "rows": [asdict(r) for r in self.rows]}


def compare_spectra(low, high, l: int, k_max: Optional[int] = None) -> OrderComparison:
    n = len(low)
    k_top = n if k_max is None else min(k_max, n)
    rows = []
    for k in range(1, k_top + 1):
        a = float(low[k - 1]) ** 2
        b = float(high[k - 1])
        rows.append(OrderRow(k, a, b, b - a))
    return OrderComparison(l, rows)


def compare_orders(domain, l: int, k_max: Optional[int] = None, pool=None) -> OrderComparison:
    """(lambda_k^l)^2 against lambda_k^{2l} for k = 1..k_max.

    ``pool`` (an executor) lets the two decompositions run concurrently.
    """
    def spectrum(order):
        return eigen_sym(assemble(domain, order).matrix).eigenvalues

    if pool is None:
        low, high = spectrum(l), spectrum(2 * l)
    else:
        f_low, f_high = pool.submit(spectrum, l), pool.submit(spectrum, 2 * l)
        low, high = f_low.result(), f_high.result()
    return compare_spectra(low, high, l, k_max)
