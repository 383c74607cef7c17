from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiercache import (
    DegenerateError,
    HullError,
    RangeError,
    ScopeError,
    analytics,
    validate_config,
)
from hiercache.analytics import (
    RatePoint,
    coding_delay,
    composite,
    concurrent_r2,
    global_memory,
    m2_from_m1,
    memory_point,
    memory_share,
    rate_r1,
    rate_r2,
    rate_r2_worst,
    region_classify,
)
from hiercache.baselines import kwc_rates


def cfg_of(k1, k2, n, t, alpha):
    return validate_config(k1, k2, n, t, alpha)


def test_memory_point_reference_values():
    assert memory_point(cfg_of(3, 2, 6, 2, "1/2")) == (F(11, 30), F(4, 5))
    assert memory_point(cfg_of(3, 2, 6, 2, "18/49")) == (F(92, 245), F(248, 245))
    assert memory_point(cfg_of(2, 3, 6, 3, "1/5")) == (F(17, 50), F(54, 25))


def test_global_memory_and_rates():
    cfg = cfg_of(3, 2, 6, 2, "1/2")
    assert global_memory(cfg) == F(59, 10)
    assert rate_r1(cfg) == F(19, 6)
    assert rate_r2_worst(cfg) == F(8, 5)
    point = composite(cfg)
    assert point.r_bar == F(239, 30)  # 7.9667
    assert point.m_bar == F(59, 10)
    table_point = composite(cfg_of(3, 2, 6, 2, "18/49"))
    assert table_point.m_bar == F(36, 5)
    assert table_point.r1 == F(394, 147)  # 2.680
    assert table_point.r2 == F(366, 245)  # 1.494
    assert rate_r2(cfg_of(3, 2, 3, 2, "1/2"), 1) == F(16, 15)


def test_rate_r2_monotone_in_tm():
    cfg = cfg_of(3, 2, 6, 2, "1/2")
    values = [rate_r2(cfg, tm) for tm in range(1, 3)]
    assert values == sorted(values)
    assert values[-1] == rate_r2_worst(cfg)
    with pytest.raises(RangeError):
        rate_r2(cfg, 3)


def test_m2_from_m1_line():
    assert m2_from_m1(3, 2, 6, 2, F(11, 30)) == F(4, 5)
    assert m2_from_m1(3, 2, 6, 2, F(1, 3)) == 0  # alpha = 1 endpoint
    assert m2_from_m1(3, 2, 6, 2, F(2, 5)) == memory_point(cfg_of(3, 2, 6, 2, 0))[1]
    with pytest.raises(RangeError):
        m2_from_m1(3, 2, 6, 2, F(1, 2))


def test_m2_from_m1_matches_memory_point_on_alpha_grid():
    for alpha in (F(0), F(1, 4), F(1, 2), F(3, 4), F(1)):
        m1, m2 = memory_point(cfg_of(3, 2, 6, 4, alpha))
        assert m2_from_m1(3, 2, 6, 4, m1) == m2


def test_concurrent_r2():
    assert concurrent_r2(cfg_of(3, 2, 6, 2, "1/2"), 2) == F(23, 15)
    # t < K2: nothing is cache-resident, rate unchanged
    cfg = cfg_of(2, 3, 6, 2, "1/2")
    assert concurrent_r2(cfg, 2) == rate_r2(cfg, 2)
    assert concurrent_r2(cfg_of(2, 3, 6, 3, "1/5"), 3) == F(6, 5)


def test_coding_delay():
    assert coding_delay(F(19, 6), F(23, 15), concurrent=True) == F(19, 6)
    assert coding_delay(F(3264, 1000), F(162, 100), concurrent=True) == F(3264, 1000)
    assert coding_delay(F(5), F(0), concurrent=False) == F(5)


def test_alpha_endpoints():
    for t in range(1, 7):
        cfg = cfg_of(3, 2, 6, t, 1)
        assert memory_point(cfg) == (F(1, 3), F(0))
        assert rate_r1(cfg) == F(5)  # N (K-1) / K
        assert rate_r2_worst(cfg) == 2
    cfg0 = cfg_of(3, 2, 6, 3, 0)
    m1, m2 = memory_point(cfg0)
    assert m1 == F(6 * 4, 20) and m2 == F(6 * (10 - 4), 20)


def test_alpha0_matches_array_scheme():
    for k1 in (2, 3):
        for k2 in (2, 3):
            k = k1 * k2
            for t in range(k2 + 1, k):
                mine = composite(cfg_of(k1, k2, k, t, 0))
                other = kwc_rates(k1, k2, k, t)
                assert (mine.m1, mine.m2, mine.r1, mine.r2) == (
                    other.m1,
                    other.m2,
                    other.r1,
                    other.r2,
                )


def test_memory_share_two_point_segment():
    a = composite(cfg_of(2, 3, 6, 2, 0))
    b = composite(cfg_of(2, 3, 6, 3, 0))
    assert (a.m_bar, a.r_bar) == (F(12), F(58, 15))
    assert (b.m_bar, b.r_bar) == (F(84, 5), F(51, 20))
    w = F(41, 120)  # weight on b, solving m_bar = 13.64
    target = ((1 - w) * a.m1 + w * b.m1, (1 - w) * a.m2 + w * b.m2)
    mixed, weights = memory_share([a, b, b], target)
    assert mixed.m_bar == F(1364, 100)
    assert mixed.r1 == (1 - w) * a.r1 + w * b.r1
    assert mixed.r2 == (1 - w) * a.r2 + w * b.r2
    assert mixed.r_bar == (1 - w) * a.r_bar + w * b.r_bar


def test_memory_share_vertex_and_errors():
    a = composite(cfg_of(3, 2, 6, 1, 0))
    b = composite(cfg_of(3, 2, 6, 2, 0))
    c = composite(cfg_of(3, 2, 6, 2, 1))
    mixed, weights = memory_share([a, b, c], (a.m1, a.m2))
    assert weights.xi == 1 and weights.eta == 0
    assert (mixed.r1, mixed.r2) == (a.r1, a.r2)
    with pytest.raises(HullError):
        memory_share([a, b, c], (F(10), F(10)))
    with pytest.raises(DegenerateError):
        memory_share([a, a, a], (a.m1, a.m2))


def test_memory_share_inside_triangle():
    a = composite(cfg_of(3, 2, 6, 1, 0))
    b = composite(cfg_of(3, 2, 6, 2, 0))
    c = composite(cfg_of(3, 2, 6, 2, 1))
    xi, eta = F(1, 4), F(1, 3)
    target = (
        xi * a.m1 + eta * b.m1 + (1 - xi - eta) * c.m1,
        xi * a.m2 + eta * b.m2 + (1 - xi - eta) * c.m2,
    )
    mixed, weights = memory_share([a, b, c], target)
    assert (weights.xi, weights.eta) == (xi, eta)
    assert mixed.r1 == xi * a.r1 + eta * b.r1 + (1 - xi - eta) * c.r1


@given(st.integers(1, 5), st.sampled_from([F(0), F(1, 4), F(1, 2), F(3, 4), F(1)]))
@settings(max_examples=40, deadline=None)
def test_composite_affine_in_alpha(t, alpha):
    # three points on one t-line are collinear in (m_bar, r_bar)
    pts = [composite(validate_config(3, 2, 6, t, a)) for a in (F(0), alpha, F(1))]
    (x0, y0), (x1, y1), (x2, y2) = [(p.m_bar, p.r_bar) for p in pts]
    assert (x1 - x0) * (y2 - y0) == (y1 - y0) * (x2 - x0)


def test_region_reference_cases():
    report = region_classify(cfg_of(2, 3, 6, 3, "1/5"))
    assert report.region_a == F(42, 5)
    assert report.alpha_threshold == F(12, 5) / F(79, 10)
    assert report.region == "I"
    assert region_classify(cfg_of(3, 2, 6, 2, "1/2")).region == "II"
    wide = region_classify(cfg_of(5, 2, 10, 2, "1/4"))
    assert wide.region == "II"
    assert wide.alpha_threshold < 0
    with pytest.raises(ScopeError):
        region_classify(cfg_of(2, 3, 6, 2, "1/5"))


def test_rate_point_aggregates():
    p = RatePoint(F(1), F(2), F(3), F(4), k1=2, k2=3, scheme_tag="x")
    assert p.m_bar == 2 * 1 + 6 * 2
    assert p.r_bar == 3 + 2 * 4
    assert p.r_sum == 7
    assert p.t_concurrent == 4
    assert p.t_sequential == 7
    with pytest.raises(RangeError):
        RatePoint(F(-1), F(0), F(0), F(0), 1, 1)
