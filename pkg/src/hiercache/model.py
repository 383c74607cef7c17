"""Core domain model: system configuration, chunk identities, exact file
partitioning, and demand analysis.

Conventions used throughout the package:

* users are numbered 1..K (K = K1*K2), mirrors 1..K1, files 1..N;
* mirror m serves the user block S_m = {(m-1)*K2+1, ..., m*K2};
* every file of F bytes is split into a layer-1 block of alpha*F bytes
  (K chunks, one per user slot) and a layer-2 block of (1-alpha)*F bytes
  (one chunk per t-subset of users, in lexicographic subset order);
* all sizes and rates are exact `fractions.Fraction` values in file units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence, Union

from .errors import ConstraintError, DemandError, DivisibilityError, RangeError

AlphaLike = Union[Fraction, int, str]


def binom(n: int, k: int) -> int:
    """Binomial coefficient, zero when k is negative or exceeds n."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=None)
def subsets(k: int, size: int) -> tuple[tuple[int, ...], ...]:
    """All `size`-subsets of {1..k} as sorted tuples, lexicographic order."""
    return tuple(combinations(range(1, k + 1), size))


@lru_cache(maxsize=None)
def subset_sets(k: int, size: int) -> tuple[frozenset[int], ...]:
    """Frozenset view of subsets(k, size), index-aligned with it."""
    return tuple(frozenset(group) for group in subsets(k, size))


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError("payload length mismatch: %d vs %d" % (len(a), len(b)))
    n = len(a)
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).to_bytes(n, "big")


@dataclass(frozen=True)
class HierConfig:
    """Validated parameters of a (K1, K2; M1, M2; N) two-layer network.

    alpha is the exact fraction of each file handled by the coded layer-1
    machinery; t is the layer-2 subset-size parameter.
    """

    k1: int
    k2: int
    n_files: int
    t: int
    alpha: Fraction

    def __post_init__(self) -> None:
        if self.k1 < 1 or self.k2 < 1 or self.n_files < 1:
            raise RangeError("k1, k2 and n_files must all be >= 1")
        k = self.k1 * self.k2
        if not 1 <= self.t <= k:
            raise RangeError("t=%d outside [1, %d]" % (self.t, k))
        if not 0 <= self.alpha <= 1:
            raise RangeError("alpha=%s outside [0, 1]" % (self.alpha,))
        if self.n_files > k and self.alpha != 0:
            raise ConstraintError(
                "alpha must be 0 when n_files exceeds the user count "
                "(N=%d > K=%d)" % (self.n_files, k)
            )

    @property
    def k(self) -> int:
        """Total number of users K1*K2."""
        return self.k1 * self.k2


def validate_config(k1: int, k2: int, n_files: int, t: int, alpha: AlphaLike) -> HierConfig:
    """Build a HierConfig from raw values; alpha accepts 'p/q' strings."""
    try:
        frac = Fraction(alpha)
    except (ValueError, ZeroDivisionError) as exc:
        raise RangeError("alpha %r is not a rational" % (alpha,)) from exc
    return HierConfig(int(k1), int(k2), int(n_files), int(t), frac)


def users_of_mirror(cfg: HierConfig, m: int) -> frozenset[int]:
    """The user block S_m attached to mirror m; the blocks partition {1..K}."""
    if not 1 <= m <= cfg.k1:
        raise RangeError("mirror index %d outside [1, %d]" % (m, cfg.k1))
    base = (m - 1) * cfg.k2
    return frozenset(range(base + 1, base + cfg.k2 + 1))


def mirror_of_user(cfg: HierConfig, user: int) -> int:
    """Index of the mirror serving the given user."""
    if not 1 <= user <= cfg.k:
        raise RangeError("user index %d outside [1, %d]" % (user, cfg.k))
    return (user - 1) // cfg.k2 + 1


class ChunkId(NamedTuple):
    """Identity of one mini-chunk: layer-1 slot (file, user index) or
    layer-2 slot (file, t-subset stored as a sorted tuple).

    Construct through l1()/l2(), which validate and canonicalize; the bare
    constructor is the unchecked fast path for internal loops that already
    hold sorted tuples.
    """

    layer: int
    file: int
    slot: Union[int, tuple[int, ...]]

    @classmethod
    def l1(cls, file: int, user: int) -> "ChunkId":
        if not isinstance(user, int):
            raise RangeError("layer-1 slot must be a single user index")
        return cls(1, file, user)

    @classmethod
    def l2(cls, file: int, group: Iterable[int]) -> "ChunkId":
        slot = tuple(sorted(group))
        if not slot:
            raise RangeError("layer-2 slot needs at least one index")
        return cls(2, file, slot)


@dataclass(frozen=True)
class FilePartition:
    """Exact byte sizes of the two chunk layers for one file size.

    A zero chunk size means the corresponding layer is absent (alpha 0 or 1).
    """

    file_bytes: int
    l1_chunk_bytes: int
    l2_chunk_bytes: int


def make_partition(cfg: HierConfig, file_bytes: int) -> FilePartition:
    """Split `file_bytes` exactly; refuses to round.

    Layer 1 needs alpha*F/K integral, layer 2 needs (1-alpha)*F/C(K,t)
    integral (in bytes).
    """
    if file_bytes <= 0:
        raise RangeError("file_bytes must be positive")
    k = cfg.k
    n_groups = binom(k, cfg.t)
    l1 = Fraction(cfg.alpha * file_bytes, k)
    l2 = Fraction((1 - cfg.alpha) * file_bytes, n_groups)
    if l1.denominator != 1:
        raise DivisibilityError(
            "layer-1 chunk size %s bytes is not integral (F=%d, K=%d)" % (l1, file_bytes, k)
        )
    if l2.denominator != 1:
        raise DivisibilityError(
            "layer-2 chunk size %s bytes is not integral (F=%d, C(K,t)=%d)"
            % (l2, file_bytes, n_groups)
        )
    return FilePartition(file_bytes, int(l1), int(l2))


def min_file_bytes(cfg: HierConfig) -> int:
    """Smallest file size in bytes that partitions exactly for cfg."""
    k = cfg.k
    c = binom(k, cfg.t)
    p, q = cfg.alpha.numerator, cfg.alpha.denominator
    need = 1
    if p:
        need = math.lcm(need, q * k // math.gcd(p, q * k))
    if q - p:
        need = math.lcm(need, q * c // math.gcd(q - p, q * c))
    return need


class CodedSymbol(NamedTuple):
    """XOR of equal-sized chunk payloads, tagged with its generator set and
    its size in file units."""

    generators: frozenset[ChunkId]
    payload: bytes
    size_files: Fraction


def uncoded(cid: ChunkId, payload: bytes, size_files: Fraction) -> CodedSymbol:
    return CodedSymbol(frozenset((cid,)), payload, size_files)


def xor_symbols(pairs: Sequence[tuple[ChunkId, bytes]], size_files: Fraction) -> CodedSymbol:
    """Combine (chunk id, payload) pairs into one XOR symbol."""
    ids = frozenset(cid for cid, _ in pairs)
    if len(ids) != len(pairs):
        raise RangeError("duplicate generator in coded symbol")
    acc = pairs[0][1]
    for _, payload in pairs[1:]:
        acc = xor_bytes(acc, payload)
    return CodedSymbol(ids, acc, size_files)


@dataclass(frozen=True)
class DemandProfile:
    """Demand vector plus the derived structure the delivery phase needs.

    base_set is a set of users jointly demanding every file, chosen as the
    lowest-index first occurrence of each file. mirror_files[m-1] is the set
    of distinct files demanded under mirror m; demanders[n-1] the users
    demanding file n.
    """

    demands: tuple[int, ...]
    base_set: frozenset[int]
    mirror_files: tuple[frozenset[int], ...]
    mirror_counts: tuple[int, ...]
    demanders: tuple[frozenset[int], ...]

    def demand_of(self, user: int) -> int:
        return self.demands[user - 1]


def build_demand_profile(cfg: HierConfig, demands: Sequence[int]) -> DemandProfile:
    """Validate a demand vector and derive base set and per-mirror structure.

    With alpha > 0 every file must be demanded at least once (the coded
    layer-1 placement relies on it); with alpha = 0 any demand vector is
    accepted and the base set simply anchors the files actually demanded.
    """
    demands = tuple(int(d) for d in demands)
    if len(demands) != cfg.k:
        raise DemandError("demand vector has length %d, expected K=%d" % (len(demands), cfg.k))
    for d in demands:
        if not 1 <= d <= cfg.n_files:
            raise RangeError("demand %d outside [1, %d]" % (d, cfg.n_files))
    seen = set(demands)
    if cfg.alpha > 0 and len(seen) != cfg.n_files:
        missing = sorted(set(range(1, cfg.n_files + 1)) - seen)
        raise DemandError("alpha > 0 requires every file demanded; missing %s" % missing)
    first = {}
    for i, d in enumerate(demands, start=1):
        first.setdefault(d, i)
    base_set = frozenset(first.values())
    mirror_files = tuple(
        frozenset(demands[u - 1] for u in sorted(users_of_mirror(cfg, m)))
        for m in range(1, cfg.k1 + 1)
    )
    demanders = tuple(
        frozenset(i for i, d in enumerate(demands, start=1) if d == n)
        for n in range(1, cfg.n_files + 1)
    )
    return DemandProfile(
        demands=demands,
        base_set=base_set,
        mirror_files=mirror_files,
        mirror_counts=tuple(len(s) for s in mirror_files),
        demanders=demanders,
    )
