from fractions import Fraction as F

import pytest

from hiercache import RangeError, ScopeError, SingularError, validate_config
from hiercache.analytics import composite
from hiercache.baselines import (
    knmd_optimal_tuple,
    knmd_rates,
    kwc_rates,
    lzx_rates,
    r_decentralized,
    wwcy_best,
    wwcy_rates,
    zwxwl_envelope,
    zwxwl_point,
    zwxwl_rates,
    zwxwll_best,
    zwxwll_rates,
    zwxwll_tuples,
)

# the two published comparison points and the region-I example points:
# the scheme's own point S and the shared-memory point T on its hull
TAB1 = dict(k1=3, k2=2, n_files=6, m1=F(92, 245), m2=F(248, 245))
TAB2 = dict(k1=3, k2=2, n_files=3, m1=F(4, 15), m2=F(2, 5))
EX3 = dict(k1=2, k2=3, n_files=6, m1=F(17, 50), m2=F(54, 25))
EX3_T = dict(k1=2, k2=3, n_files=6, m1=F(21, 200), m2=F(449, 200))


def close(value, target, tol=2e-3):
    return abs(float(value) - target) <= tol


def test_r_decentralized_values():
    assert r_decentralized(F(2, 5), 3) == F(147, 125)  # 1.176
    assert r_decentralized(F(1), 7) == 0
    assert close(r_decentralized(F(99, 500), 6), 2.9726623, 1e-6)
    with pytest.raises(SingularError):
        r_decentralized(F(0), 3)
    with pytest.raises(RangeError):
        r_decentralized(F(3, 2), 3)


def test_knmd_optimal_tuple_regions():
    choice = knmd_optimal_tuple(**TAB1)
    assert choice.region == "II" and choice.floored
    assert choice.alpha == F(23, 147)
    assert choice.beta == F(1, 100)
    ex3 = knmd_optimal_tuple(**EX3)
    assert ex3.region == "I" and not ex3.floored
    assert ex3.alpha == ex3.beta == F(17, 300)
    corner = knmd_optimal_tuple(2, 2, 4, 4, 1)
    assert corner.region == "III"
    assert (corner.alpha, corner.beta) == (F(1), F(1, 4))


def test_knmd_rates_reference_points():
    c = knmd_optimal_tuple(**TAB1)
    r1, r2 = knmd_rates(**TAB1, alpha_p=c.alpha, beta=c.beta)
    assert close(r1, 2.8756, 1e-4) and close(r2, 1.5270, 1e-4)
    c = knmd_optimal_tuple(**TAB2)
    r1, r2 = knmd_rates(**TAB2, alpha_p=c.alpha, beta=c.beta)
    assert close(r1, 3.076) and close(r2, 1.623)
    c = knmd_optimal_tuple(**EX3)
    r1, r2 = knmd_rates(**EX3, alpha_p=c.alpha, beta=c.beta)
    assert close(r1, 1.56) and close(r2, 1.312)


def test_zwxwl_grid_and_envelope():
    p = zwxwl_point(3, 2, 6, 2, 0)
    assert (p.r1, p.r2, p.m_bar, p.r_bar) == (F(2), F(2), F(6), F(8))
    grid = [zwxwl_point(3, 2, 6, 0, 0), p, zwxwl_point(3, 2, 6, 0, 3)]
    assert [(q.m_bar, q.r_bar) for q in grid] == [(0, 12), (6, 8), (18, F(9, 2))]
    env = zwxwl_envelope(grid, F(36, 5))
    assert env.r_bar == F(153, 20)  # 7.65 exactly
    assert (env.m1, env.m2) == (F(9, 5), F(3, 10))
    grid2 = [zwxwl_point(3, 2, 3, 1, 0), zwxwl_point(3, 2, 3, 0, F(3, 2))]
    assert [(q.m_bar, q.r_bar) for q in grid2] == [(3, 8), (9, F(9, 2))]
    env2 = zwxwl_envelope(grid2, F(16, 5))
    assert env2.r_bar == F(473, 60)  # 7.8833
    assert (float(env2.r1), float(env2.r2)) == (pytest.approx(2.0333, abs=1e-4), 1.95)
    from hiercache import HullError

    with pytest.raises(HullError):
        zwxwl_envelope(grid2, F(100))


def test_zwxwll_tuple_menus():
    regime2 = zwxwll_tuples(**TAB1)
    assert [c.region for c in regime2] == ["II", "II"]
    regime1 = zwxwll_tuples(**EX3)
    assert [c.region for c in regime1] == ["I", "I", "I"]
    assert regime1[2].alpha == regime1[2].beta == 1


def test_zwxwll_reference_points():
    r1, r2 = zwxwll_rates(**TAB2, alpha_pp=F(4, 45), beta=F(4, 45))
    assert close(r1, 3.413) and close(r2, 1.618)
    b1, b2, choice = zwxwll_best(**TAB2)
    assert (b1, b2) == (r1, r2)
    e1, e2, echoice = zwxwll_best(**EX3_T)
    assert close(e1, 1.5445) and close(e2, 1.2626)
    assert echoice.alpha == echoice.beta == F(7, 400)
    t1, t2, _ = zwxwll_best(**TAB1)
    assert close(t1, 3.0947, 1e-4) and close(t2, 1.5223, 1e-4)


def test_zwxwll_best_never_above_menu():
    for point in (TAB1, TAB2, EX3, EX3_T):
        k1 = point["k1"]
        best_r1, best_r2, _ = zwxwll_best(**point)
        for choice in zwxwll_tuples(**point):
            if choice.floored:
                continue
            r1, r2 = zwxwll_rates(**point, alpha_pp=choice.alpha, beta=choice.beta)
            assert best_r1 + k1 * best_r2 <= r1 + k1 * r2


def test_wwcy_reference_points():
    r1, r2, choice = wwcy_best(**TAB2)
    assert choice.region == "II" and choice.floored
    assert close(r1, 3.07) and close(r2, 1.623)
    e1, e2, echoice = wwcy_best(**EX3_T)
    assert echoice.region == "I"
    assert close(e1, 1.5445) and close(e2, 1.2626)
    # at the shared point the correlation-aware scheme coincides
    z1, z2, _ = zwxwll_best(**EX3_T)
    assert (e1, e2) == (z1, z2)
    t1, t2, _ = wwcy_best(**TAB1)
    assert close(t1, 2.8696, 1e-4) and close(t2, 1.5270, 1e-4)


def test_wwcy_second_layer_matches_two_subsystem_scheme():
    for m1_num in range(1, 4):
        for m2_num in range(1, 4):
            m1, m2 = F(m1_num, 3), F(m2_num, 2)
            for a, b in ((F(1, 4), F(1, 8)), (F(1, 2), F(1, 3)), (F(2, 3), F(1, 100))):
                _, knmd_r2 = knmd_rates(2, 3, 6, m1, m2, a, b)
                _, wwcy_r2 = wwcy_rates(2, 3, 6, m1, m2, a, b)
                assert knmd_r2 == wwcy_r2


def test_kwc_matches_layered_scheme_at_alpha_zero():
    for k1 in (2, 3, 4):
        for k2 in (2, 3, 4):
            k = k1 * k2
            for t in range(k2 + 1, k):
                mine = composite(validate_config(k1, k2, k, t, 0))
                ref = kwc_rates(k1, k2, k, t)
                assert (ref.m1, ref.m2, ref.r1, ref.r2) == (mine.m1, mine.m2, mine.r1, mine.r2)


def test_kwc_tail_rate():
    assert kwc_rates(3, 2, 6, 5).r1 == F(1, 6)
    assert kwc_rates(2, 2, 4, 3).r1 == F(1, 4)


def test_lzx_cases():
    # alpha = 1 endpoint of the single-mirror scheme: both schemes give 2
    r1, r2 = lzx_rates(2, 0, F(1, 2))
    assert (r1, r2) == (F(1), F(1))
    r1, r2 = lzx_rates(2, F(1, 2), F(1, 2))
    assert (r1, r2) == (F(5, 8), F(1))
    # saturated mirror memory: nothing left on the first hop
    r1, r2 = lzx_rates(2, F(7, 2), F(1, 2))
    assert r1 == 0
    assert r2 == (2 * (2 * 2 - 1) - (3 * 2 - 2) * F(1, 2)) / F(4)
    with pytest.raises(ScopeError):
        lzx_rates(2, 0, F(3, 2))


def test_lzx_case_boundaries_cover_memory_axis():
    n = F(3)
    m2 = F(1, 2)
    last_r1 = None
    for m1 in [F(0), F(1), F(2), F(5, 2), F(3)]:
        r1, r2 = lzx_rates(3, m1, m2)
        assert r1 >= 0 and r2 >= 0
        if last_r1 is not None:
            assert r1 <= last_r1  # weakly decreasing in mirror memory
        last_r1 = r1


def test_rates_nonnegative_and_monotone_in_memory():
    for m1 in (F(1, 2), F(1), F(2)):
        rates = []
        for m2 in (F(1, 4), F(1, 2), F(1), F(3, 2)):
            c = knmd_optimal_tuple(3, 2, 6, m1, m2)
            r1, r2 = knmd_rates(3, 2, 6, m1, m2, c.alpha, c.beta)
            assert r1 >= 0 and r2 >= 0
            rates.append(r2)
        assert all(a >= b for a, b in zip(rates, rates[1:]))
