"""Executable invariant suite: decode totality, measured-vs-closed-form rate
agreement, cache budgets, and the combinatorial region predicates.

Shared by the test suite and the `verify` CLI subcommand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Sequence

from . import analytics
from .analytics import region_constants
from .hierarchy import PreparedInstance, deliver_and_decode, make_library, prepare_instance
from .model import HierConfig, binom, min_file_bytes, validate_config

DEFAULT_ALPHAS = (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1))
DEFAULT_SEED = 0x5EED_CAFE_F00D


def surjective_demands(k: int, n_files: int) -> Iterator[tuple[int, ...]]:
    """All length-k demand vectors covering every file in 1..n_files."""
    for vec in product(range(1, n_files + 1), repeat=k):
        if len(set(vec)) == n_files:
            yield vec


def count_surjective(k: int, n_files: int) -> int:
    """Inclusion-exclusion count of surjective demand vectors."""
    total = 0
    for j in range(n_files + 1):
        total += (-1) ** j * binom(n_files, j) * (n_files - j) ** k
    return total


@dataclass
class VerifySummary:
    instances: int = 0
    demand_vectors: int = 0
    decodes: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_instance(
    inst: PreparedInstance,
    demands: Sequence[int],
    library: Sequence[bytes],
    summary: VerifySummary,
) -> None:
    """Run one end-to-end delivery round and record any broken invariant."""
    cfg = inst.cfg
    sim = deliver_and_decode(inst, demands)
    summary.demand_vectors += 1
    for user, payload in enumerate(sim.decoded, start=1):
        summary.decodes += 1
        if payload != library[sim.profile.demand_of(user) - 1]:
            summary.failures.append("decode mismatch: cfg=%s demands=%s user=%d" % (cfg, demands, user))
    if sim.rates.r1 != analytics.rate_r1(cfg):
        summary.failures.append("R1 mismatch: cfg=%s demands=%s" % (cfg, demands))
    for m, r2 in enumerate(sim.rates.r2_per_mirror, start=1):
        expect = analytics.rate_r2(cfg, sim.profile.mirror_counts[m - 1])
        if r2 != expect:
            summary.failures.append("R2 mismatch: cfg=%s demands=%s mirror=%d" % (cfg, demands, m))


def check_cache_budgets(cfg: HierConfig, library: Sequence[bytes], summary: VerifySummary) -> None:
    """Placement must hit the closed-form memories exactly, byte for byte."""
    from .hierarchy import make_partition, place

    partition = make_partition(cfg, len(library[0]))
    placement = place(cfg, library, partition)
    m1, m2 = analytics.memory_point(cfg)
    f = partition.file_bytes
    for m, cache in enumerate(placement.mirror_caches, start=1):
        cache_bytes = sum(len(sym.payload) for sym in cache)
        if Fraction(cache_bytes, f) != m1:
            summary.failures.append("mirror %d cache holds %s files, expected %s" % (m, Fraction(cache_bytes, f), m1))
    for user, cache in enumerate(placement.user_caches, start=1):
        cache_bytes = sum(len(sym.payload) for sym in cache)
        if Fraction(cache_bytes, f) != m2:
            summary.failures.append("user %d cache holds %s files, expected %s" % (user, Fraction(cache_bytes, f), m2))


def verify_configs(
    configs: Iterable[tuple[int, int, int]],
    alphas: Sequence[Fraction] = DEFAULT_ALPHAS,
    t_values: Sequence[int] | None = None,
    seed: int = DEFAULT_SEED,
) -> VerifySummary:
    """Exhaustive decode/rate verification over surjective demand vectors.

    configs yields (k1, k2, n_files); every t (or the given list) and every
    feasible alpha is exercised with a fresh deterministic library.
    """
    summary = VerifySummary()
    for k1, k2, n_files in configs:
        k = k1 * k2
        for t in t_values if t_values is not None else range(1, k + 1):
            for alpha in alphas:
                if n_files > k and alpha != 0:
                    continue
                cfg = validate_config(k1, k2, n_files, t, alpha)
                library = make_library(cfg, min_file_bytes(cfg), seed)
                summary.instances += 1
                check_cache_budgets(cfg, library, summary)
                inst = prepare_instance(cfg, library)
                for demands in surjective_demands(k, n_files):
                    check_instance(inst, demands, library, summary)
    return summary


def default_config_grid(max_users: int) -> list[tuple[int, int, int]]:
    """All (k1, k2, n) with k1*k2 <= max_users and n <= k1*k2."""
    out = []
    for k1 in range(1, max_users + 1):
        for k2 in range(1, max_users // k1 + 1):
            k = k1 * k2
            for n in range(1, k + 1):
                out.append((k1, k2, n))
    return out


def lemma_subset_growth(k1_max: int = 12, k2_max: int = 12) -> list[str]:
    """C(K, K2) > K*K2 for all 2 <= K1, K2 <= bound except K1 = K2 = 2."""
    failures = []
    for k1 in range(2, k1_max + 1):
        for k2 in range(2, k2_max + 1):
            if k1 == k2 == 2:
                continue
            k = k1 * k2
            if not binom(k, k2) > k * k2:
                failures.append("C(%d,%d) <= %d*%d" % (k, k2, k, k2))
    return failures


def region_predicates(k_max: int = 10, alphas: Sequence[Fraction] = DEFAULT_ALPHAS) -> list[str]:
    """Region never III on the balanced grid, always II with more mirrors."""
    failures = []
    for k1 in range(2, k_max + 1):
        for k2 in range(2, k_max + 1):
            if k1 == k2 == 2:
                continue
            for alpha in alphas:
                cfg = validate_config(k1, k2, k1 * k2, k2, alpha)
                report = analytics.region_classify(cfg)
                if k1 > k2 and report.region != "II":
                    failures.append("K1=%d K2=%d alpha=%s: region %s, expected II" % (k1, k2, alpha, report.region))
                if k1 <= k2 and report.region == "III":
                    failures.append("K1=%d K2=%d alpha=%s: landed in region III" % (k1, k2, alpha))
    return failures


def threshold_signs(k_max: int = 10) -> list[str]:
    """Sign facts behind the predicates: threshold < 0 when K1 > K2, and
    B > 1 when K1 <= K2 (excluding the 2x2 corner)."""
    failures = []
    for k1 in range(2, k_max + 1):
        for k2 in range(2, k_max + 1):
            if k1 == k2 == 2:
                continue
            _, b_const, threshold = region_constants(k1, k2)
            if k1 > k2 and not threshold < 0:
                failures.append("threshold >= 0 at K1=%d K2=%d" % (k1, k2))
            if k1 <= k2 and not b_const > 1:
                failures.append("B <= 1 at K1=%d K2=%d" % (k1, k2))
    return failures
