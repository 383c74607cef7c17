"""Rate calculators for the six published comparison schemes.

These are formula evaluators, not simulators: each scheme is represented by
its closed-form (R1, R2) at a given memory point, plus the tuple-selection
rules its authors prescribe. The split parameters are named alpha_p (KNMD),
alpha_pp (ZWXWLL) and alpha_ppp (WWCY) to keep them apart from the layered
scheme's own alpha.

A prescribed beta of exactly zero makes the decentralized building block
r(q, k) singular; following the published comparisons, such tuples are
evaluated at a small positive floor (default 1/100) instead, and the
substitution is flagged.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .analytics import RatePoint
from .errors import HullError, RangeError, ScopeError, SingularError
from .model import HierConfig, binom, validate_config
from . import analytics

DEFAULT_BETA_FLOOR = Fraction(1, 100)


class Scheme(str, Enum):
    KNMD = "knmd"
    ZWXWL = "zwxwl"
    ZWXWLL = "zwxwll"
    WWCY = "wwcy"
    KWC = "kwc"
    LZX = "lzx"


@dataclass(frozen=True)
class SplitChoice:
    """A (split, beta) pair actually used in an evaluation, with a flag for
    a floored beta and the region/regime label that prescribed it."""

    alpha: Fraction
    beta: Fraction
    region: str
    floored: bool = False


def r_decentralized(q: Fraction, k: int) -> Fraction:
    """Rate of the decentralized building block at cache fraction q.

    [(1-q)/q * (1 - (1-q)^k)]^+; q = 0 is rejected rather than taken to its
    analytic limit k, because the published comparison tables were computed
    via a small positive floor.
    """
    q = Fraction(q)
    if q == 0:
        raise SingularError("decentralized rate is singular at q = 0")
    if q < 0 or q > 1:
        raise RangeError("cache fraction %s outside (0, 1]" % q)
    if q == 1:
        return Fraction(0)
    val = (1 - q) / q * (1 - (1 - q) ** k)
    return max(val, Fraction(0))


def _checked(*values) -> list[Fraction]:
    out = [Fraction(v) for v in values]
    if any(v < 0 for v in out):
        raise RangeError("memory and split parameters must be non-negative")
    return out


def knmd_rates(
    k1: int,
    k2: int,
    n_files: int,
    m1,
    m2,
    alpha_p,
    beta,
    beta_floor: Fraction = DEFAULT_BETA_FLOOR,
) -> tuple[Fraction, Fraction]:
    """Two-subsystem decentralized scheme: the alpha_p share runs one
    decentralized instance per layer, the rest a single K1*K2-user instance
    ignoring mirror caches."""
    m1, m2, a, b = _checked(m1, m2, alpha_p, beta)
    if b == 0:
        b = Fraction(beta_floor)
    k = k1 * k2
    n = Fraction(n_files)
    r1 = Fraction(0)
    r2 = Fraction(0)
    if a > 0:
        r1 += a * k2 * r_decentralized(m1 / (a * n), k1)
        r2 += a * r_decentralized(b * m2 / (a * n), k2)
    if a < 1:
        tail = (1 - b) * m2 / ((1 - a) * n)
        r1 += (1 - a) * r_decentralized(tail, k)
        r2 += (1 - a) * r_decentralized(tail, k2)
    return r1, r2


def knmd_optimal_tuple(k1: int, k2: int, n_files: int, m1, m2, beta_floor: Fraction = DEFAULT_BETA_FLOOR) -> SplitChoice:
    """Region-prescribed (alpha_p, beta) for a memory point.

    Region I: M1 + K2*M2 >= N and M1 <= N/4 -> (M1/N, M1/N);
    Region II: M1 + K2*M2 < N            -> (M1/(M1+K2*M2), 0 -> floor);
    Region III: the remainder             -> (M1/N, 1/4).
    """
    m1, m2 = _checked(m1, m2)
    n = Fraction(n_files)
    if not (0 <= m1 <= n):
        raise RangeError("M1 outside [0, N]")
    if m1 + m2 * k2 < n:
        denom = m1 + m2 * k2
        alpha = m1 / denom if denom else Fraction(0)
        return SplitChoice(alpha, Fraction(beta_floor), "II", floored=True)
    if m1 <= n / 4:
        return SplitChoice(m1 / n, m1 / n, "I")
    return SplitChoice(m1 / n, Fraction(1, 4), "III")


def zwxwl_rates(k1: int, k2: int, n_files: int, m1, m2) -> tuple[Fraction, Fraction]:
    """Joint-caching scheme rates at an on-grid memory point."""
    m1, m2 = _checked(m1, m2)
    n = Fraction(n_files)
    k = k1 * k2
    r1 = k * (1 - m1 / n) * (1 - m2 / n) / (1 + k1 * m1 / n)
    r2 = k2 * (1 - m2 / n) / (1 + k2 * m2 / n)
    return Fraction(r1), Fraction(r2)


def zwxwl_point(k1: int, k2: int, n_files: int, m1, m2) -> RatePoint:
    r1, r2 = zwxwl_rates(k1, k2, n_files, m1, m2)
    return RatePoint(Fraction(m1), Fraction(m2), r1, r2, k1, k2, Scheme.ZWXWL.value)


def zwxwl_envelope(points: Sequence[RatePoint], target_m_bar) -> RatePoint:
    """Memory-share along the lower hull of (global memory, composite rate)
    grid points; all RatePoint fields are mixed with the same weights."""
    target = Fraction(target_m_bar)
    pts = sorted(points, key=lambda p: (p.m_bar, p.r_bar))
    if not pts:
        raise HullError("no grid points supplied")
    if not pts[0].m_bar <= target <= pts[-1].m_bar:
        raise HullError("target %s outside the grid span [%s, %s]" % (target, pts[0].m_bar, pts[-1].m_bar))
    hull: list[RatePoint] = []
    for p in pts:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or above segment a-p
            lhs = (b.r_bar - a.r_bar) * (p.m_bar - a.m_bar)
            rhs = (p.r_bar - a.r_bar) * (b.m_bar - a.m_bar)
            if lhs >= rhs:
                hull.pop()
            else:
                break
        if hull and hull[-1].m_bar == p.m_bar:
            continue  # keep the lower of duplicate abscissae (sorted order)
        hull.append(p)
    for a, b in zip(hull, hull[1:]):
        if a.m_bar <= target <= b.m_bar:
            lam = (b.m_bar - target) / (b.m_bar - a.m_bar) if b.m_bar != a.m_bar else Fraction(1)
            mix = lambda x, y: Fraction(lam * x + (1 - lam) * y)
            return RatePoint(
                mix(a.m1, b.m1),
                mix(a.m2, b.m2),
                mix(a.r1, b.r1),
                mix(a.r2, b.r2),
                a.k1,
                a.k2,
                Scheme.ZWXWL.value,
            )
    return hull[-1]


def zwxwll_rates(
    k1: int,
    k2: int,
    n_files: int,
    m1,
    m2,
    alpha_pp,
    beta,
    beta_floor: Fraction = DEFAULT_BETA_FLOOR,
) -> tuple[Fraction, Fraction]:
    """Correlation-aware variant: like the two-subsystem scheme but with the
    first-layer rate discounted by the share of layer-2 content the users
    already hold.

    beta = 0 is only singular in the second-layer expression; the floor is
    applied there alone, keeping the first layer exact.
    """
    m1, m2, a, b = _checked(m1, m2, alpha_pp, beta)
    k = k1 * k2
    n = Fraction(n_files)
    b_r2 = Fraction(beta_floor) if b == 0 else b

    def head_r1() -> Fraction:
        if a == 0 or m1 == 0:
            return Fraction(0)
        q = m1 / (a * n)
        if q >= 1:
            return Fraction(0)
        discount = 1 - b * m2 / (a * n)
        return a * k2 * max(discount, Fraction(0)) * (1 - q) / q * (1 - (1 - q) ** k1)

    def tail(kk: int, beta_val: Fraction) -> Fraction:
        if a == 1:
            return Fraction(0)
        q = (1 - beta_val) * m2 / ((1 - a) * n)
        if q == 0:
            raise SingularError("second-subsystem cache share is zero")
        if q >= 1:
            return Fraction(0)
        return (1 - a) * (1 - q) / q * (1 - (1 - q) ** kk)

    def head_r2() -> Fraction:
        if a == 0:
            return Fraction(0)
        q = b_r2 * m2 / (a * n)
        if q == 0:
            raise SingularError("first-subsystem user cache share is zero")
        if q >= 1:
            return Fraction(0)
        return a * (1 - q) / q * (1 - (1 - q) ** k2)

    r1 = head_r1() + tail(k, b)
    r2 = head_r2() + tail(k2, b_r2)
    return Fraction(r1), Fraction(r2)


def zwxwll_tuples(k1: int, k2: int, n_files: int, m1, m2) -> list[SplitChoice]:
    """The prescribed tuple menu for the regime of the memory point."""
    m1, m2 = _checked(m1, m2)
    n = Fraction(n_files)
    if m1 + k2 * m2 >= n:  # regime I
        return [
            SplitChoice(m1 / n, m1 / n, "I"),
            SplitChoice(m1 / (m1 + k2 * m2), Fraction(0), "I", floored=True),
            SplitChoice(Fraction(1), Fraction(1), "I"),
        ]
    return [
        SplitChoice(m1 / n, m1 / n, "II"),
        SplitChoice(m1 / n, Fraction(1, 2), "II"),
    ]


def zwxwll_best(
    k1: int,
    k2: int,
    n_files: int,
    m1,
    m2,
    beta_floor: Fraction = DEFAULT_BETA_FLOOR,
) -> tuple[Fraction, Fraction, SplitChoice]:
    """Lowest-composite tuple of the regime menu.

    Tuples prescribing beta = 0 are evaluated through the floor, which makes
    them numerical patches rather than achievable operating points; they are
    skipped during selection (evaluate them explicitly via zwxwll_rates).
    """
    best: tuple[Fraction, Fraction, SplitChoice] | None = None
    for choice in zwxwll_tuples(k1, k2, n_files, m1, m2):
        if choice.floored:
            continue
        r1, r2 = zwxwll_rates(k1, k2, n_files, m1, m2, choice.alpha, choice.beta, beta_floor)
        if best is None or r1 + k1 * r2 < best[0] + k1 * best[1]:
            best = (r1, r2, choice)
    assert best is not None
    return best


def wwcy_rates(
    k1: int,
    k2: int,
    n_files: int,
    m1,
    m2,
    alpha_ppp,
    beta,
    beta_floor: Fraction = DEFAULT_BETA_FLOOR,
) -> tuple[Fraction, Fraction]:
    """Concurrent-transmission variant: first-layer head term is the product
    of the per-layer decentralized rates; second layer matches the
    two-subsystem scheme."""
    m1, m2, a, b = _checked(m1, m2, alpha_ppp, beta)
    if b == 0:
        b = Fraction(beta_floor)
    k = k1 * k2
    n = Fraction(n_files)
    r1 = Fraction(0)
    r2 = Fraction(0)
    if a > 0:
        head_users = r_decentralized(b * m2 / (a * n), k2)
        r1 += a * r_decentralized(m1 / (a * n), k1) * head_users
        r2 += a * head_users
    if a < 1:
        tail = (1 - b) * m2 / ((1 - a) * n)
        r1 += (1 - a) * r_decentralized(tail, k)
        r2 += (1 - a) * r_decentralized(tail, k2)
    return r1, r2


def wwcy_best(
    k1: int,
    k2: int,
    n_files: int,
    m1,
    m2,
    beta_floor: Fraction = DEFAULT_BETA_FLOOR,
) -> tuple[Fraction, Fraction, SplitChoice]:
    """Regime-prescribed tuple: (M1/N, M1/N) when M1 + K2*M2 >= N, else
    (M1/(M1+K2*M2), 0 -> floor)."""
    m1, m2 = _checked(m1, m2)
    n = Fraction(n_files)
    if m1 + k2 * m2 >= n:
        choice = SplitChoice(m1 / n, m1 / n, "I")
    else:
        choice = SplitChoice(m1 / (m1 + k2 * m2), Fraction(0), "II", floored=True)
    beta = Fraction(beta_floor) if choice.floored else choice.beta
    r1, r2 = wwcy_rates(k1, k2, n_files, m1, m2, choice.alpha, beta, beta_floor)
    return r1, r2, choice


def kwc_rates(k1: int, k2: int, n_files: int, t: int) -> RatePoint:
    """Array-construction scheme: identical to the layered scheme at
    alpha = 0 for K2 < t < K."""
    k = k1 * k2
    if not 1 <= t <= k:
        raise RangeError("t=%d outside [1, %d]" % (t, k))
    c_kt = binom(k, t)
    covered = binom(k - k2, t - k2)
    n = Fraction(n_files)
    m1 = n * covered / c_kt
    m2 = n * (binom(k - 1, t - 1) - covered) / c_kt
    r1 = Fraction(k - t, t + 1)
    r2 = r1 - Fraction(binom(k - k2, t + 1), c_kt) + Fraction(covered * k2, c_kt)
    return RatePoint(Fraction(m1), Fraction(m2), r1, Fraction(r2), k1, k2, Scheme.KWC.value)


def lzx_rates(n_files: int, m1, m2) -> tuple[Fraction, Fraction]:
    """Two-user single-mirror scheme, four memory regimes, for 2*M2 <= N."""
    m1, m2 = _checked(m1, m2)
    n = Fraction(n_files)
    if 2 * m2 > n:
        raise ScopeError("defined for 2*M2 <= N only")
    a = m2 / n
    b = 1 - 2 * m2 / n
    nsq = n * n
    if m1 <= n * b:
        r1 = ((2 * n - 1) * (n - m1) - (3 * n - 2) * m2) / nsq
        r2 = ((2 * n - 1) * n - (3 * n - 2) * m2) / nsq
    elif m1 <= n * b + n * a:
        r1 = 1 - (m1 + m2) / n
        r2 = (n * (n - m2) + (n - 1) * m1) / nsq
    elif m1 < n * b + (2 * n - 1) * a:
        r1 = Fraction(0)
        r2 = ((3 * n - 1) * (n - m2) - n * m1) / nsq
    else:
        r1 = Fraction(0)
        r2 = (n * (2 * n - 1) - (3 * n - 2) * m2) / nsq
    return Fraction(r1), Fraction(r2)


def scheme_alpha0_point(k1: int, k2: int, n_files: int, t: int) -> RatePoint:
    """The layered scheme's own alpha = 0 point, for identity checks."""
    cfg: HierConfig = validate_config(k1, k2, n_files, t, 0)
    return analytics.composite(cfg)
