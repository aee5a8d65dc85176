"""Piecewise-linear threshold curves over coefficient lists.

The generalized threshold function minimizes per-node storage alpha subject
to the cut constraint sum_i min(L[i] * beta_e, alpha) >= M. Knees sit at
f(i) = M / (L[i] * (k - i) + g(i)) with g(i) the prefix sum of L. The same
machinery also produces the two earlier reference models (uniform-bandwidth
and static-cost) and the closed-form special case for adjacent-degree racks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .config import SystemConfig
from .errors import BelowMBR, EmptyCoeffList, InvalidModelParams, PreconditionUnmet
from .incomes import CoeffList, rack_coeff_list, trim_bound

__all__ = [
    "ThresholdSegment",
    "ThresholdCurve",
    "TradeoffPoint",
    "threshold_curve",
    "alpha_star",
    "extremal_points",
    "repair_metrics",
    "basic_reference_curve",
    "static_reference_curve",
    "static_coeff_list",
    "reference_curve",
    "rack_curve",
    "special_case_curve",
    "special_case_knees",
]

_ZERO = Fraction(0)


@dataclass(frozen=True)
class ThresholdSegment:
    """One affine piece: alpha = (M - g * beta) / (k - i) on [beta_lo, beta_hi)."""

    index: int
    coeff: Fraction
    g: Fraction
    beta_lo: Fraction
    beta_hi: Optional[Fraction]  # None = unbounded plateau side
    k: int
    M: Fraction

    @property
    def is_empty(self) -> bool:
        return self.beta_hi is not None and self.beta_lo >= self.beta_hi

    def alpha_at(self, beta_e: Fraction) -> Fraction:
        return (self.M - self.g * beta_e) / (self.k - self.index)

    def contains(self, beta_e: Fraction) -> bool:
        if beta_e < self.beta_lo:
            return False
        return self.beta_hi is None or beta_e < self.beta_hi


@dataclass(frozen=True)
class TradeoffPoint:
    """A point on the tradeoff curve with per-rack repair metrics."""

    beta_e: Fraction
    alpha: Optional[Fraction]
    gamma: tuple[Fraction, ...]
    cost: tuple[Fraction, ...]


@dataclass(frozen=True)
class ThresholdCurve:
    """Threshold function alpha*(beta_e) for one coefficient list."""

    M: Fraction
    k: int
    L: CoeffList
    segments: tuple[ThresholdSegment, ...]  # exposed: empty intervals removed

    @property
    def knees(self) -> tuple[tuple[int, Fraction, Fraction], ...]:
        """(segment index, beta_e, alpha) at each exposed segment's low end."""
        return tuple((s.index, s.beta_lo, s.alpha_at(s.beta_lo)) for s in self.segments)

    @property
    def msr_beta(self) -> Fraction:
        return self.segments[0].beta_lo

    @property
    def mbr_beta(self) -> Fraction:
        return self.segments[-1].beta_lo


def _knee_beta(L: tuple[Fraction, ...], k: int, M: Fraction, i: int, g: Fraction) -> Optional[Fraction]:
    denom = L[i] * (k - i) + g
    if denom == 0:
        return None  # leading zero coefficients push the knee to infinity
    return M / denom


def threshold_curve(L: CoeffList, k: int, M: Fraction) -> ThresholdCurve:
    """Build the threshold curve for an ascending coefficient list.

    Duplicate coefficients produce empty intervals, which are constructed for
    the prefix-sum bookkeeping and then dropped from the exposed segments.
    """
    if M <= 0:
        raise InvalidModelParams("file size must be positive")
    values = L.values
    if not values:
        raise EmptyCoeffList("coefficient list is empty")
    m = len(values)
    segments: list[ThresholdSegment] = []
    g = _ZERO
    prev_beta: Optional[Fraction] = None  # None = +inf on the first segment
    for i in range(m):
        beta = _knee_beta(values, k, M, i, g)
        if beta is None:
            g += values[i]
            continue
        segments.append(
            ThresholdSegment(index=i, coeff=values[i], g=g, beta_lo=beta, beta_hi=prev_beta, k=k, M=M)
        )
        g += values[i]
        prev_beta = beta
    exposed = tuple(s for s in segments if not s.is_empty)
    return ThresholdCurve(M=M, k=k, L=L, segments=exposed)


def alpha_star(curve: ThresholdCurve, beta_e: Fraction) -> Fraction:
    """Evaluate the threshold function; below the last knee there is no value."""
    if beta_e < curve.mbr_beta:
        raise BelowMBR(f"beta_e = {beta_e} below the curve domain [{curve.mbr_beta}, inf)")
    for segment in curve.segments:
        if segment.contains(beta_e):
            return segment.alpha_at(beta_e)
    raise AssertionError("exposed segments do not cover the domain")


def repair_metrics(cfg: SystemConfig, beta_e: Fraction) -> TradeoffPoint:
    """Per-rack repair bandwidth and repair cost at a given beta_e."""
    gamma = tuple(
        (Fraction(dc) * cfg.tau + de) * beta_e
        for dc, de in zip(cfg.cheap_degrees, cfg.expensive_degrees)
    )
    cost = tuple(
        (cfg.cheap_cost * dc * cfg.tau + cfg.expensive_cost * de) * beta_e
        for dc, de in zip(cfg.cheap_degrees, cfg.expensive_degrees)
    )
    return TradeoffPoint(beta_e=beta_e, alpha=None, gamma=gamma, cost=cost)


def _point(cfg: SystemConfig, beta_e: Fraction, alpha: Fraction) -> TradeoffPoint:
    metrics = repair_metrics(cfg, beta_e)
    return TradeoffPoint(beta_e=beta_e, alpha=alpha, gamma=metrics.gamma, cost=metrics.cost)


def extremal_points(curve: ThresholdCurve, cfg: SystemConfig) -> tuple[TradeoffPoint, TradeoffPoint]:
    """Minimum-storage and minimum-bandwidth extremes of the curve."""
    msr = _point(cfg, curve.msr_beta, curve.M / curve.k)
    last = curve.segments[-1]
    mbr = _point(cfg, last.beta_lo, last.alpha_at(last.beta_lo))
    return msr, mbr


def basic_reference_curve(k: int, d: int, M: Fraction) -> ThresholdCurve:
    """Uniform-bandwidth model: coefficients d, d-1, ..., d-k+1.

    Every knee is cross-checked against the model's published closed form
    (in terms of total repair bandwidth gamma = d * beta); a mismatch means
    the generic engine is broken, so it fails hard.
    """
    if not 1 <= k <= d:
        raise InvalidModelParams(f"need 1 <= k <= d, got k={k}, d={d}")
    L = CoeffList(values=tuple(Fraction(d - k + 1 + i) for i in range(k)), k=k)
    curve = threshold_curve(L, k, M)
    for segment in curve.segments:
        i = segment.index
        closed_gamma = 2 * M * d / Fraction((2 * k - i - 1) * i + 2 * k * (d - k + 1))
        if segment.beta_lo * d != closed_gamma:
            raise AssertionError(
                f"basic-model knee {i}: engine {segment.beta_lo * d} != closed form {closed_gamma}"
            )
        closed_g = Fraction((2 * d - 2 * k + i + 1) * i, 2 * d)
        if segment.g != closed_g * d:
            raise AssertionError(f"basic-model prefix sum {i}: {segment.g} != {closed_g * d}")
    return curve


def static_coeff_list(k: int, d_c: int, d_e: int, tau: Fraction) -> CoeffList:
    """Static-cost model coefficients, clamped at zero and sorted."""
    coeffs = [Fraction(d_c - i) * tau + d_e for i in range(min(d_c, k - 1) + 1)]
    coeffs += [max(Fraction(d_e - i), _ZERO) for i in range(1, k - d_c)]
    return CoeffList(values=tuple(sorted(coeffs)), k=k)


def static_reference_curve(k: int, d_c: int, d_e: int, tau: Fraction, M: Fraction) -> ThresholdCurve:
    """Static cheap/expensive node-set model via the generic engine."""
    if k < 1 or d_c < 0 or d_e < 0 or d_c + d_e < k:
        raise InvalidModelParams(f"need 1 <= k <= d_c + d_e, got k={k}, d_c={d_c}, d_e={d_e}")
    if tau < 1:
        raise InvalidModelParams("tau must be at least 1")
    return threshold_curve(static_coeff_list(k, d_c, d_e, tau), k, M)


def reference_curve(model: str, cfg: SystemConfig) -> ThresholdCurve:
    """Reference curve for a config: 'basic' uses (k, d); 'static' the first rack."""
    if model == "basic":
        return basic_reference_curve(cfg.k, cfg.d, cfg.file_size)
    if model == "static":
        return static_reference_curve(
            cfg.k, cfg.cheap_degrees[0], cfg.d - cfg.cheap_degrees[0], cfg.tau, cfg.file_size
        )
    raise InvalidModelParams(f"unknown reference model {model!r}")


def rack_curve(cfg: SystemConfig) -> ThresholdCurve:
    """Rack-model curve: minimum incomes, feasibility trim, threshold function."""
    return threshold_curve(rack_coeff_list(cfg), cfg.k, cfg.file_size)


def _special_case_check(cfg: SystemConfig) -> None:
    if cfg.num_racks != 2:
        raise PreconditionUnmet("special case needs exactly 2 racks")
    dc1, dc2 = cfg.cheap_degrees
    de1, de2 = cfg.expensive_degrees
    if de1 != dc2 + 1 or de2 != dc1 + 1:
        raise PreconditionUnmet("special case needs d_e^1 = d_c^2 + 1 and d_e^2 = d_c^1 + 1")
    if Fraction(de1) < Fraction(dc2) * cfg.tau:
        raise PreconditionUnmet("special case needs d_e^1 >= d_c^2 * tau")
    if cfg.k <= dc1 + 1:
        raise PreconditionUnmet("special case needs k > d_c^1 + 1")


def special_case_knees(cfg: SystemConfig) -> list[tuple[int, Fraction, Fraction]]:
    """Closed-form knees (index, beta, prefix-weight) for the adjacent-degree case.

    Index i carries the knee of segment i; the prefix weight is the closed
    form's accumulated coefficient sum, comparable to the generic g(i).
    """
    _special_case_check(cfg)
    k, M, tau = cfg.k, cfg.file_size, cfg.tau
    dc1 = cfg.cheap_degrees[0]
    de1 = cfg.expensive_degrees[0]
    d = cfg.d
    q = k - dc1 - 1

    def g1(i: int) -> Fraction:
        return Fraction(i, 2) * (2 * d - 2 * k + i + 1)

    def g2(i: int) -> Fraction:
        return Fraction(i, 2) * (2 * de1 + tau * i - tau)

    def f1(i: int) -> Fraction:
        return 2 * M / (tau * (2 * k * (d - k) + (i + 1) * (2 * k - i)))

    def f2(i: int) -> Fraction:
        return 2 * M / (
            2 * de1
            + 2 * de1 * dc1
            - tau * (i * (i - 2 * k + 1) + 2 * (k * k - k - k * d + de1 + de1 * dc1))
        )

    knees: list[tuple[int, Fraction, Fraction]] = []
    for i in range(k):
        if i < q:
            beta = f1(i)
            g = g1(i) * tau
        else:
            beta = f2(i)
            g = g1(q) * tau + g2(i - q)
        knees.append((i, beta, g))
    return knees


def special_case_curve(cfg: SystemConfig) -> ThresholdCurve:
    """Closed-form curve for d_e^1 >= d_c^2 * tau with adjacent rack degrees.

    Built from the printed closed-form knees and prefix weights; every value
    is compared against the generic engine and any discrepancy is reported as
    a warning (the generic engine stays authoritative).
    """
    generic = rack_curve(cfg)
    k, M = cfg.k, cfg.file_size
    closed = special_case_knees(cfg)

    by_index = {s.index: s for s in generic.segments}
    segments: list[ThresholdSegment] = []
    prev_beta: Optional[Fraction] = None
    for i, beta, g in closed:
        seg = ThresholdSegment(
            index=i, coeff=generic.L.values[i], g=g, beta_lo=beta, beta_hi=prev_beta, k=k, M=M
        )
        generic_seg = by_index.get(i)
        if generic_seg is not None and (generic_seg.beta_lo != beta or generic_seg.g != g):
            warnings.warn(
                f"closed form disagrees with generic engine at segment {i}: "
                f"knee {beta} vs {generic_seg.beta_lo}, prefix {g} vs {generic_seg.g}",
                RuntimeWarning,
                stacklevel=2,
            )
        if not seg.is_empty:
            segments.append(seg)
        prev_beta = beta
    return ThresholdCurve(M=M, k=k, L=generic.L, segments=tuple(segments))
