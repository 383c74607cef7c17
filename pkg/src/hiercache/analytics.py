"""Closed-form memory/rate algebra for the layered scheme, memory sharing,
coding delay, and the alpha-region classifier.

Everything here is exact rational arithmetic; floats appear only when the
caller formats output.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DegenerateError, HullError, RangeError, ScopeError
from .model import HierConfig, binom

Pair = tuple[Fraction, Fraction]


# Aggregates (global memory, composite rate) need K1 and K2; carrying them
# on every point keeps RatePoint self-describing for CSV emission.
@dataclass(frozen=True)
class RatePoint:
    """One achievable operating point: per-cache memories, per-hop rates,
    and the derived aggregate metrics."""

    m1: Fraction
    m2: Fraction
    r1: Fraction
    r2: Fraction
    k1: int
    k2: int
    scheme_tag: str = ""

    def __post_init__(self) -> None:
        for val in (self.m1, self.m2, self.r1, self.r2):
            if val < 0:
                raise RangeError("rate point fields must be non-negative")

    @property
    def m_bar(self) -> Fraction:
        return self.k1 * self.m1 + self.k1 * self.k2 * self.m2

    @property
    def r_bar(self) -> Fraction:
        return self.r1 + self.k1 * self.r2

    @property
    def r_sum(self) -> Fraction:
        return self.r1 + self.r2

    @property
    def t_concurrent(self) -> Fraction:
        return max(self.r1, self.r2)

    @property
    def t_sequential(self) -> Fraction:
        return self.r1 + self.r2


@dataclass(frozen=True)
class ConvexWeights:
    """Barycentric weights (xi, eta) with xi, eta >= 0 and xi + eta <= 1."""

    xi: Fraction
    eta: Fraction

    def __post_init__(self) -> None:
        if not (0 <= self.xi <= 1 and 0 <= self.eta <= 1 and self.xi + self.eta <= 1):
            raise HullError("weights (%s, %s) are not barycentric" % (self.xi, self.eta))


@dataclass(frozen=True)
class RegionReport:
    """Constants and verdict of the three-way alpha-range classification
    applied at t = K2."""

    region_a: Fraction
    region_b: Fraction
    alpha_threshold: Fraction
    region: str  # "I" | "II" | "III"
    many_mirrors_implies_ii: bool
    balanced_avoids_iii: bool


def memory_point(cfg: HierConfig) -> Pair:
    """Exact (M1, M2) of the placement, in file units per cache."""
    k, t, n = cfg.k, cfg.t, cfg.n_files
    a = cfg.alpha
    c_kt = binom(k, t)
    covered = binom(k - cfg.k2, t - cfg.k2)
    m1 = a * cfg.k2 / k + (1 - a) * covered * n / c_kt
    m2 = (1 - a) * (binom(k - 1, t - 1) - covered) * n / c_kt
    return Fraction(m1), Fraction(m2)


def m2_from_m1(k1: int, k2: int, n_files: int, t: int, m1: Fraction) -> Fraction:
    """User-cache memory as the linear function of mirror memory along one
    t-line (alpha eliminated)."""
    k = k1 * k2
    if not 1 <= t <= k:
        raise RangeError("t=%d outside [1, %d]" % (t, k))
    c_kt = binom(k, t)
    covered = binom(k - k2, t - k2)
    end_coded = Fraction(1, k1)  # alpha = 1
    end_uncoded = Fraction(covered * n_files, c_kt)  # alpha = 0
    lo, hi = min(end_coded, end_uncoded), max(end_coded, end_uncoded)
    if not lo <= m1 <= hi:
        raise RangeError("M1=%s outside [%s, %s] for t=%d" % (m1, lo, hi, t))
    span = binom(k - 1, t - 1) - covered
    if end_uncoded == end_coded:
        return Fraction(0)  # degenerate line: M2 vanishes identically
    return (m1 - end_coded) * span * n_files / ((end_uncoded - end_coded) * c_kt)


def global_memory(cfg: HierConfig) -> Fraction:
    m1, m2 = memory_point(cfg)
    return cfg.k1 * m1 + cfg.k * m2


def rate_r1(cfg: HierConfig) -> Fraction:
    """Server-to-mirror rate for worst-case (all-files-covered) demands."""
    k, t, n = cfg.k, cfg.t, cfg.n_files
    a = cfg.alpha
    return Fraction(a * n * (k - 1) / k + (1 - a) * Fraction(k - t, t + 1))


def rate_r2(cfg: HierConfig, t_m: int) -> Fraction:
    """Rate from a mirror whose users demand t_m distinct files."""
    if not 1 <= t_m <= cfg.k2:
        raise RangeError("t_m=%d outside [1, %d]" % (t_m, cfg.k2))
    k, t = cfg.k, cfg.t
    a = cfg.alpha
    c_kt = binom(k, t)
    body = Fraction(k - t, t + 1) - Fraction(binom(k - cfg.k2, t + 1) - binom(k - cfg.k2, t - cfg.k2) * t_m, c_kt)
    return Fraction(a * t_m + (1 - a) * body)


def rate_r2_worst(cfg: HierConfig) -> Fraction:
    return rate_r2(cfg, cfg.k2)


def concurrent_r2(cfg: HierConfig, t_m: int) -> Fraction:
    """Mirror rate when cache-resident sends overlap the server slot.

    The chunks a mirror sends straight from its cache can go out while the
    server is still transmitting, so they drop out of the mirror's own slot.
    No-op when t < K2 (nothing is cache-resident).
    """
    saved = (1 - cfg.alpha) * t_m * Fraction(binom(cfg.k - cfg.k2, cfg.t - cfg.k2), binom(cfg.k, cfg.t))
    return rate_r2(cfg, t_m) - saved


def coding_delay(r1: Fraction, r2: Fraction, concurrent: bool) -> Fraction:
    """Normalized delivery duration: max of the hops when they overlap,
    their sum when the mirror waits for the server."""
    return max(r1, r2) if concurrent else r1 + r2


def composite(cfg: HierConfig, scheme_tag: str = "hiercache") -> RatePoint:
    """The full operating point of the layered scheme at (t, alpha)."""
    m1, m2 = memory_point(cfg)
    return RatePoint(
        m1=m1,
        m2=m2,
        r1=rate_r1(cfg),
        r2=rate_r2_worst(cfg),
        k1=cfg.k1,
        k2=cfg.k2,
        scheme_tag=scheme_tag,
    )


def _mix(points: Sequence[RatePoint], weights: Sequence[Fraction], tag: str) -> RatePoint:
    m1 = sum(w * p.m1 for w, p in zip(weights, points))
    m2 = sum(w * p.m2 for w, p in zip(weights, points))
    r1 = sum(w * p.r1 for w, p in zip(weights, points))
    r2 = sum(w * p.r2 for w, p in zip(weights, points))
    return RatePoint(Fraction(m1), Fraction(m2), Fraction(r1), Fraction(r2), points[0].k1, points[0].k2, tag)


def memory_share(points: Sequence[RatePoint], target: Pair) -> tuple[RatePoint, ConvexWeights]:
    """Achieve an intermediate (M1, M2) by splitting every file across the
    three given operating points with barycentric weights.

    Rates combine with the same weights (each split runs its own scheme on
    its share of every file). Collinear triples degrade to interpolation
    along the segment; a fully coincident triple is rejected.
    """
    if len(points) != 3:
        raise RangeError("memory sharing needs exactly three anchor points")
    a, b, c = points
    tx, ty = Fraction(target[0]), Fraction(target[1])
    det = (a.m1 - c.m1) * (b.m2 - c.m2) - (b.m1 - c.m1) * (a.m2 - c.m2)
    if det != 0:
        xi = ((tx - c.m1) * (b.m2 - c.m2) - (b.m1 - c.m1) * (ty - c.m2)) / det
        eta = ((a.m1 - c.m1) * (ty - c.m2) - (tx - c.m1) * (a.m2 - c.m2)) / det
        weights = ConvexWeights(Fraction(xi), Fraction(eta))  # raises HullError outside
        mixed = _mix((a, b, c), (weights.xi, weights.eta, 1 - weights.xi - weights.eta), "memory-share")
        return mixed, weights
    # collinear anchors: interpolate along the segment between the two most
    # separated distinct points
    distinct: list[RatePoint] = []
    for p in points:
        if all(q.m1 != p.m1 or q.m2 != p.m2 for q in distinct):
            distinct.append(p)
    if len(distinct) == 1:
        raise DegenerateError("all three anchor points coincide")
    ends = max(
        ((p, q) for i, p in enumerate(distinct) for q in distinct[i + 1 :]),
        key=lambda pq: (pq[0].m1 - pq[1].m1) ** 2 + (pq[0].m2 - pq[1].m2) ** 2,
    )
    p, q = ends
    if p.m1 != q.m1:
        lam = (tx - q.m1) / (p.m1 - q.m1)
    else:
        lam = (ty - q.m2) / (p.m2 - q.m2)
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise HullError("target %s outside the anchor segment" % (target,))
    if (lam * p.m1 + (1 - lam) * q.m1, lam * p.m2 + (1 - lam) * q.m2) != (tx, ty):
        raise HullError("target %s is off the collinear anchor line" % (target,))
    mixed = _mix((p, q), (lam, 1 - lam), "memory-share")
    return mixed, ConvexWeights(lam, 1 - lam)


def region_constants(k1: int, k2: int) -> tuple[Fraction, Fraction, Fraction]:
    """(A, B, alpha threshold) of the three-region classification."""
    k = k1 * k2
    c = binom(k, k2)
    a_const = Fraction(k2 * k2) - Fraction(k * (k2 - 1), c)
    b_const = Fraction(k * k1, 4) * Fraction(c - 4, c - k * k1)
    threshold = (a_const - k) / (a_const - Fraction(1, k1))
    return a_const, b_const, threshold


def region_classify(cfg: HierConfig) -> RegionReport:
    """Classify the scheme's memory point at t = K2 into region I, II or III
    of the split-parameter baseline family."""
    if cfg.t != cfg.k2:
        raise ScopeError("region classification is defined for t = K2 only")
    a_const, b_const, threshold = region_constants(cfg.k1, cfg.k2)
    alpha = cfg.alpha
    if alpha > threshold:
        region = "II"
    elif alpha <= b_const:
        region = "I"
    else:
        region = "III"
    many_mirrors = cfg.k1 <= cfg.k2 or region == "II"
    balanced = not (cfg.k1 <= cfg.k2 and not (cfg.k1 == 2 and cfg.k2 == 2)) or region != "III"
    return RegionReport(
        region_a=a_const,
        region_b=b_const,
        alpha_threshold=threshold,
        region=region,
        many_mirrors_implies_ii=many_mirrors,
        balanced_avoids_iii=balanced,
    )
