"""Single-mirror variant: all coded placement lives in user caches, the
mirror holds a prefix fraction of each layer-2 subfile.

Each user caches exactly one symbol, the N-fold XOR of its layer-1 slot
across all files (M2 = alpha/K). The mirror caches the first theta-fraction
of every layer-2 subfile, theta = M1 / ((1-alpha) N). Delivery sends the
layer-1 singles/pairs of the two-hop scheme on both hops, the server tops up
the missing (1-theta) suffixes, and the mirror forwards every layer-2
subfile whole.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import DecodeError, DivisibilityError, RangeError
from .model import (
    ChunkId,
    CodedSymbol,
    DemandProfile,
    HierConfig,
    build_demand_profile,
    uncoded,
    validate_config,
    xor_bytes,
    xor_symbols,
)
from .analytics import RatePoint


@dataclass(frozen=True)
class SingleMirrorConfig:
    """Parameters of the one-mirror network: K users, N files, layer split
    alpha, and the mirror memory M1 (user memory is pinned to alpha/K)."""

    k: int
    n_files: int
    alpha: Fraction
    m1: Fraction

    def __post_init__(self) -> None:
        if self.k < 1 or self.n_files < 1:
            raise RangeError("k and n_files must be >= 1")
        if not 0 <= self.alpha <= 1:
            raise RangeError("alpha outside [0, 1]")
        if not 0 <= self.m1 <= (1 - self.alpha) * self.n_files:
            raise RangeError(
                "M1=%s outside [0, %s]" % (self.m1, (1 - self.alpha) * self.n_files)
            )

    @property
    def m2(self) -> Fraction:
        return Fraction(self.alpha, self.k)

    @property
    def theta(self) -> Fraction:
        """Cached fraction of each layer-2 subfile; zero when there is no
        layer-2 content to cache."""
        denom = (1 - self.alpha) * self.n_files
        if denom == 0:
            return Fraction(0)
        return Fraction(self.m1 / denom)

    def as_hier(self, t: int | None = None) -> HierConfig:
        """The equivalent two-hop configuration (K1 = 1)."""
        return validate_config(1, self.k, self.n_files, t if t is not None else self.k, self.alpha)


def single_config(k: int, n_files: int, alpha, m1) -> SingleMirrorConfig:
    try:
        a = Fraction(alpha)
        m = Fraction(m1)
    except (ValueError, ZeroDivisionError) as exc:
        raise RangeError("alpha/m1 must be rationals") from exc
    return SingleMirrorConfig(int(k), int(n_files), a, m)


class SubfilePart(NamedTuple):
    """A contiguous byte range of one layer-2 subfile."""

    file: int
    kind: str  # "prefix" | "suffix" | "full"
    payload: bytes
    size_files: Fraction


@dataclass(frozen=True)
class SinglePlacement:
    mirror_cache: tuple[SubfilePart, ...]
    user_caches: tuple[CodedSymbol, ...]


@dataclass(frozen=True)
class SingleLog:
    server_l1: tuple[CodedSymbol, ...]
    server_l2: tuple[SubfilePart, ...]
    mirror_l1: tuple[CodedSymbol, ...]
    mirror_l2: tuple[SubfilePart, ...]

    @property
    def r1(self) -> Fraction:
        return sum((s.size_files for s in self.server_l1), Fraction(0)) + sum(
            (p.size_files for p in self.server_l2), Fraction(0)
        )

    @property
    def r2(self) -> Fraction:
        return sum((s.size_files for s in self.mirror_l1), Fraction(0)) + sum(
            (p.size_files for p in self.mirror_l2), Fraction(0)
        )


def _byte_layout(cfg: SingleMirrorConfig, file_bytes: int) -> tuple[int, int]:
    """(layer-1 chunk bytes, theta-prefix bytes); both must be integral."""
    l1 = Fraction(cfg.alpha * file_bytes, cfg.k)
    if l1.denominator != 1:
        raise DivisibilityError("layer-1 chunk size %s bytes not integral" % l1)
    prefix = Fraction(cfg.m1 * file_bytes, cfg.n_files)
    if prefix.denominator != 1:
        raise DivisibilityError("theta prefix size %s bytes not integral" % prefix)
    l2_total = file_bytes - int(cfg.alpha * file_bytes)
    if Fraction(cfg.alpha * file_bytes).denominator != 1 or int(prefix) > l2_total:
        raise DivisibilityError("file of %d bytes does not fit the split" % file_bytes)
    return int(l1), int(prefix)


def min_file_bytes_single(cfg: SingleMirrorConfig) -> int:
    """Smallest file size in bytes that splits exactly for cfg."""
    import math

    p, q = cfg.alpha.numerator, cfg.alpha.denominator
    need = 1
    if p:
        need = math.lcm(need, q * cfg.k // math.gcd(p, q * cfg.k))
    else:
        need = math.lcm(need, q // math.gcd(1, q))
    pre = Fraction(cfg.m1, cfg.n_files)
    if pre:
        need = math.lcm(need, pre.denominator)
    return need


def place_single(cfg: SingleMirrorConfig, library: Sequence[bytes], file_bytes: int) -> SinglePlacement:
    """Mirror takes the theta prefix of every layer-2 subfile; each user
    caches the N-fold XOR of its layer-1 slot."""
    l1, prefix = _byte_layout(cfg, file_bytes)
    l1_total = l1 * cfg.k
    mirror: list[SubfilePart] = []
    for n, payload in enumerate(library, start=1):
        if len(payload) != file_bytes:
            raise RangeError("file %d has %d bytes, expected %d" % (n, len(payload), file_bytes))
        if prefix:
            mirror.append(
                SubfilePart(n, "prefix", payload[l1_total : l1_total + prefix], Fraction(cfg.m1, cfg.n_files))
            )
    users: list[CodedSymbol] = []
    if l1:
        size = Fraction(l1, file_bytes)
        for k in range(1, cfg.k + 1):
            pairs = [
                (ChunkId.l1(n, k), library[n - 1][(k - 1) * l1 : k * l1])
                for n in range(1, cfg.n_files + 1)
            ]
            users.append(xor_symbols(pairs, size))
    else:
        users = []
    return SinglePlacement(tuple(mirror), tuple(users))


def _l1_messages(
    cfg: SingleMirrorConfig, library: Sequence[bytes], profile: DemandProfile, l1: int, file_bytes: int
) -> tuple[CodedSymbol, ...]:
    """Layer-1 singles and base-set pairs, shared by both hops."""
    if not l1:
        return ()
    size = Fraction(l1, file_bytes)
    chunk = lambda n, i: library[n - 1][(i - 1) * l1 : i * l1]
    out: list[CodedSymbol] = []
    for n in range(1, cfg.n_files + 1):
        for i in range(1, cfg.k + 1):
            if profile.demand_of(i) != n:
                out.append(uncoded(ChunkId.l1(n, i), chunk(n, i), size))
    anchor = {profile.demand_of(i): i for i in sorted(profile.base_set)}
    outside = [i for i in range(1, cfg.k + 1) if i not in profile.base_set]
    for i in sorted(outside, key=lambda i: (profile.demand_of(i), i)):
        n = profile.demand_of(i)
        partner = anchor[n]
        out.append(
            xor_symbols(
                [(ChunkId.l1(n, i), chunk(n, i)), (ChunkId.l1(n, partner), chunk(n, partner))], size
            )
        )
    return tuple(out)


def deliver_single(
    cfg: SingleMirrorConfig,
    placement: SinglePlacement,
    library: Sequence[bytes],
    profile: DemandProfile,
    file_bytes: int,
) -> SingleLog:
    """Both hops: server tops up suffixes, mirror relays layer-1 verbatim
    and sends every layer-2 subfile whole (prefix from cache, suffix from
    the server hop)."""
    l1, prefix = _byte_layout(cfg, file_bytes)
    l1_total = l1 * cfg.k
    l1_msgs = _l1_messages(cfg, library, profile, l1, file_bytes)
    l2_total = file_bytes - l1_total
    suffix_size = Fraction(l2_total - prefix, file_bytes)
    server_l2 = tuple(
        SubfilePart(n, "suffix", library[n - 1][l1_total + prefix :], suffix_size)
        for n in range(1, cfg.n_files + 1)
        if l2_total - prefix > 0
    )
    cached = {part.file: part.payload for part in placement.mirror_cache}
    received = {part.file: part.payload for part in server_l2}
    mirror_l2 = tuple(
        SubfilePart(n, "full", cached.get(n, b"") + received.get(n, b""), Fraction(l2_total, file_bytes))
        for n in range(1, cfg.n_files + 1)
        if l2_total > 0
    )
    return SingleLog(server_l1=l1_msgs, server_l2=server_l2, mirror_l1=l1_msgs, mirror_l2=mirror_l2)


def decode_single(
    cfg: SingleMirrorConfig,
    user: int,
    user_cache: Sequence[CodedSymbol],
    log: SingleLog,
    profile: DemandProfile,
    file_bytes: int,
) -> bytes:
    """Rebuild the demanded file from the mirror hop plus the cached XOR."""
    if not 1 <= user <= cfg.k:
        raise RangeError("user index %d outside [1, %d]" % (user, cfg.k))
    wanted = profile.demand_of(user)
    l1, _ = _byte_layout(cfg, file_bytes)
    parts: list[bytes] = []
    if l1:
        known: dict[ChunkId, bytes] = {}
        pairs: list[CodedSymbol] = []
        for symbol in log.mirror_l1:
            if len(symbol.generators) == 1:
                (cid,) = symbol.generators
                known[cid] = symbol.payload
            else:
                pairs.append(symbol)
        own = ChunkId.l1(wanted, user)
        if own not in known:
            # cancel the cached N-fold XOR with the received singles
            (row,) = user_cache
            acc = row.payload
            for n in range(1, cfg.n_files + 1):
                if n != wanted:
                    cid = ChunkId.l1(n, user)
                    if cid not in known:
                        raise DecodeError("user %d missing %s for cache cancel" % (user, cid))
                    acc = xor_bytes(acc, known[cid])
            known[own] = acc
        progress = True
        while progress:
            progress = False
            for symbol in pairs:
                gens = [c for c in symbol.generators if c not in known]
                if len(gens) == 1:
                    acc = symbol.payload
                    for c in symbol.generators:
                        if c in known:
                            acc = xor_bytes(acc, known[c])
                    known[gens[0]] = acc
                    progress = True
        for i in range(1, cfg.k + 1):
            cid = ChunkId.l1(wanted, i)
            if cid not in known:
                raise DecodeError("user %d missing layer-1 chunk %s" % (user, cid))
            parts.append(known[cid])
    if file_bytes - l1 * cfg.k > 0:
        full = {part.file: part.payload for part in log.mirror_l2}
        if wanted not in full:
            raise DecodeError("user %d missing layer-2 subfile %d" % (user, wanted))
        parts.append(full[wanted])
    payload = b"".join(parts)
    if len(payload) != file_bytes:
        raise DecodeError("user %d rebuilt %d bytes, expected %d" % (user, len(payload), file_bytes))
    return payload


def run_single_simulation(
    cfg: SingleMirrorConfig, library: Sequence[bytes], demands: Sequence[int]
) -> tuple[SinglePlacement, SingleLog, tuple[bytes, ...], DemandProfile]:
    file_bytes = len(library[0])
    profile = build_demand_profile(cfg.as_hier(), demands)
    placement = place_single(cfg, library, file_bytes)
    log = deliver_single(cfg, placement, library, profile, file_bytes)
    decoded = tuple(
        decode_single(cfg, user, placement.user_caches[user - 1 : user] or [], log, profile, file_bytes)
        for user in range(1, cfg.k + 1)
    )
    return placement, log, decoded, profile


def closed_form_rates(cfg: SingleMirrorConfig) -> tuple[Fraction, Fraction]:
    """(R1, R2) = (N (1 - alpha/K) - M1, N (1 - alpha/K))."""
    base = cfg.n_files * (1 - Fraction(cfg.alpha, cfg.k))
    return Fraction(base - cfg.m1), Fraction(base)


def rate_point(cfg: SingleMirrorConfig) -> RatePoint:
    r1, r2 = closed_form_rates(cfg)
    return RatePoint(m1=cfg.m1, m2=cfg.m2, r1=r1, r2=r2, k1=1, k2=cfg.k, scheme_tag="hiercache-single")


def dominance_gap(k: int, n_files: int, alpha) -> Fraction:
    """Composite-rate gap between the two-hop scheme at K1 = 1 and this
    scheme at the matching memory point M1 = (1 - alpha) N.

    Both sides evaluated independently from their closed forms; equals
    alpha*N/K for every alpha.
    """
    a = Fraction(alpha)
    n = Fraction(n_files)
    hier = a * n * (1 - Fraction(1, k)) + n  # R1 + R2 of the two-hop scheme at t = K
    here_r1, here_r2 = closed_form_rates(single_config(k, n_files, a, (1 - a) * n))
    return Fraction(hier - (here_r1 + here_r2))
