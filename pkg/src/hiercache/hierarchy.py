"""Byte-level placement and two-hop delivery for the layered scheme.

Layer 1 (a CFL-style coded placement over the alpha-fraction of each file)
stores one N-file XOR per served user slot in each mirror; layer 2 (an
MN-style placement over the remainder) spreads t-subset chunks over user
caches, with the chunks whose subset covers a whole user block promoted to
that block's mirror when t >= K2.

Delivery steps, in the order they are emitted:

* SM1  server -> mirrors: every layer-1 chunk W1[n, i] with n != d_i;
* SM2  server -> mirrors: for each user i outside the base set, the pair
  W1[d_i, i] xor W1[d_i, i'] with i' the base-set holder of the same file;
* SM3  server -> mirrors: for every (t+1)-subset S, the multicast
  xor_{s in S} W2[d_s, S \\ {s}];
* MU1  mirror m -> users: every layer-1 chunk of every file demanded below m;
* MU2  mirror m -> users: the SM3 multicast for every S meeting S_m, with
  the generators already present in the mirror's cache XORed out (the
  attached users cannot cancel those terms themselves, the mirror can);
* MU3  mirror m -> users: cached layer-2 chunks W2[n, S] with S covering
  S_m, for demanded n.

SM1, SM2 and MU1 are skipped entirely at alpha = 0; SM3, MU2 and MU3 are
skipped at alpha = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

from .errors import DecodeError, RangeError, ReconstructError
from .model import (
    ChunkId,
    CodedSymbol,
    DemandProfile,
    FilePartition,
    HierConfig,
    build_demand_profile,
    make_partition,
    mirror_of_user,
    subset_sets,
    subsets,
    uncoded,
    users_of_mirror,
    xor_bytes,
    xor_symbols,
)


class Message(NamedTuple):
    step: str  # SM1 | SM2 | SM3 | MU1 | MU2 | MU3
    symbol: CodedSymbol


@dataclass(frozen=True)
class Placement:
    """Per-mirror and per-user cache contents after the placement phase."""

    mirror_caches: tuple[tuple[CodedSymbol, ...], ...]
    user_caches: tuple[tuple[CodedSymbol, ...], ...]


@dataclass(frozen=True)
class TransmissionLog:
    """Everything sent during delivery: server messages and, per mirror,
    the messages relayed to its attached users."""

    server_msgs: tuple[Message, ...]
    mirror_msgs: tuple[tuple[Message, ...], ...]


@dataclass(frozen=True)
class MirrorPlan:
    """What one mirror has derived for its own delivery: decoded layer-1
    chunks, peeled multicasts to forward, and cached chunks to send."""

    l1_chunks: dict[ChunkId, bytes]
    l2_forward: dict[tuple[int, ...], CodedSymbol]
    l2_cached: dict[ChunkId, bytes]


class MeasuredRates(NamedTuple):
    r1: Fraction
    r2_per_mirror: tuple[Fraction, ...]
    r2_worst: Fraction


def chunk_table(cfg: HierConfig, library: Sequence[bytes], partition: FilePartition) -> dict[ChunkId, bytes]:
    """Ground-truth payload of every chunk, keyed by ChunkId."""
    if len(library) != cfg.n_files:
        raise RangeError("library holds %d files, expected %d" % (len(library), cfg.n_files))
    k = cfg.k
    l1, l2 = partition.l1_chunk_bytes, partition.l2_chunk_bytes
    table: dict[ChunkId, bytes] = {}
    for n, payload in enumerate(library, start=1):
        if len(payload) != partition.file_bytes:
            raise RangeError("file %d has %d bytes, expected %d" % (n, len(payload), partition.file_bytes))
        if l1:
            for i in range(1, k + 1):
                table[ChunkId(1, n, i)] = payload[(i - 1) * l1 : i * l1]
        if l2:
            base = k * l1
            for j, group in enumerate(subsets(k, cfg.t)):
                table[ChunkId(2, n, group)] = payload[base + j * l2 : base + (j + 1) * l2]
    return table


def _l1_size(cfg: HierConfig, partition: FilePartition) -> Fraction:
    return Fraction(partition.l1_chunk_bytes, partition.file_bytes)


def _l2_size(cfg: HierConfig, partition: FilePartition) -> Fraction:
    return Fraction(partition.l2_chunk_bytes, partition.file_bytes)


@lru_cache(maxsize=None)
def _covering_groups(k: int, size: int, block: frozenset) -> tuple[tuple[int, ...], ...]:
    """size-subsets of {1..k} containing the whole block, lex order."""
    return tuple(g for g, gs in zip(subsets(k, size), subset_sets(k, size)) if block <= gs)


@lru_cache(maxsize=None)
def _covering_set(k: int, size: int, block: frozenset) -> frozenset[tuple[int, ...]]:
    return frozenset(_covering_groups(k, size, block))


@lru_cache(maxsize=None)
def _touched_groups(k: int, size: int, block: frozenset) -> tuple[tuple[int, ...], ...]:
    """size-subsets meeting the block, lex order (the multicast relay set)."""
    return tuple(g for g, gs in zip(subsets(k, size), subset_sets(k, size)) if block & gs)


@lru_cache(maxsize=None)
def _member_groups(k: int, size: int, user: int) -> tuple[tuple[int, ...], ...]:
    """size-subsets containing the user, lex order."""
    return tuple(g for g, gs in zip(subsets(k, size), subset_sets(k, size)) if user in gs)


def place(cfg: HierConfig, library: Sequence[bytes], partition: FilePartition) -> Placement:
    """Fill every mirror and user cache.

    Mirrors hold one N-fold layer-1 XOR per attached user slot, plus (for
    t >= K2) every layer-2 chunk whose subset covers their block. Users hold
    the layer-2 chunks of every file whose subset contains them, minus the
    block-covering ones their mirror already holds.
    """
    chunks = chunk_table(cfg, library, partition)
    k = cfg.k
    s1 = _l1_size(cfg, partition)
    s2 = _l2_size(cfg, partition)
    mirror_caches = []
    for m in range(1, cfg.k1 + 1):
        block = users_of_mirror(cfg, m)
        entries: list[CodedSymbol] = []
        if partition.l1_chunk_bytes:
            for slot in sorted(block):
                pairs = [(ChunkId(1, n, slot), chunks[ChunkId(1, n, slot)]) for n in range(1, cfg.n_files + 1)]
                entries.append(xor_symbols(pairs, s1))
        if partition.l2_chunk_bytes and cfg.t >= cfg.k2:
            for n in range(1, cfg.n_files + 1):
                for group in _covering_groups(k, cfg.t, block):
                    cid = ChunkId(2, n, group)
                    entries.append(CodedSymbol(frozenset((cid,)), chunks[cid], s2))
        mirror_caches.append(tuple(entries))
    user_caches = []
    for user in range(1, k + 1):
        block = users_of_mirror(cfg, mirror_of_user(cfg, user))
        entries = []
        if partition.l2_chunk_bytes:
            mine = _member_groups(k, cfg.t, user)
            if cfg.t >= cfg.k2:
                cover = _covering_set(k, cfg.t, block)
                mine = tuple(g for g in mine if g not in cover)
            for n in range(1, cfg.n_files + 1):
                for group in mine:
                    cid = ChunkId(2, n, group)
                    entries.append(CodedSymbol(frozenset((cid,)), chunks[cid], s2))
        user_caches.append(tuple(entries))
    return Placement(tuple(mirror_caches), tuple(user_caches))


def server_deliver(
    cfg: HierConfig,
    chunks: dict[ChunkId, bytes],
    profile: DemandProfile,
    partition: FilePartition,
) -> tuple[Message, ...]:
    """Messages broadcast by the server, in deterministic emission order."""
    k = cfg.k
    s1 = _l1_size(cfg, partition)
    s2 = _l2_size(cfg, partition)
    out: list[Message] = []
    if partition.l1_chunk_bytes:
        for n in range(1, cfg.n_files + 1):
            for i in range(1, k + 1):
                if profile.demand_of(i) != n:
                    cid = ChunkId(1, n, i)
                    out.append(Message("SM1", uncoded(cid, chunks[cid], s1)))
        anchor = {profile.demand_of(i): i for i in sorted(profile.base_set)}
        outside = [i for i in range(1, k + 1) if i not in profile.base_set]
        for i in sorted(outside, key=lambda i: (profile.demand_of(i), i)):
            n = profile.demand_of(i)
            partner = anchor[n]
            pairs = [
                (ChunkId(1, n, i), chunks[ChunkId(1, n, i)]),
                (ChunkId(1, n, partner), chunks[ChunkId(1, n, partner)]),
            ]
            out.append(Message("SM2", xor_symbols(pairs, s1)))
    if partition.l2_chunk_bytes:
        for group in subsets(k, cfg.t + 1):
            pairs = []
            for s in group:
                rest = tuple(x for x in group if x != s)
                cid = ChunkId(2, profile.demand_of(s), rest)
                pairs.append((cid, chunks[cid]))
            out.append(Message("SM3", xor_symbols(pairs, s2)))
    return tuple(out)


def _multicast_set(symbol: CodedSymbol) -> tuple[int, ...]:
    """Recover the (t+1)-subset that generated an SM3 multicast."""
    users: set[int] = set()
    for cid in symbol.generators:
        users.update(cid.slot)  # type: ignore[arg-type]
    return tuple(sorted(users))


def mirror_reconstruct(
    cfg: HierConfig,
    m: int,
    mirror_cache: Sequence[CodedSymbol],
    server_msgs: Sequence[Message],
    profile: DemandProfile,
    partition: FilePartition,
) -> MirrorPlan:
    """Derive everything mirror m must relay, combining received messages
    with cache entries.

    Layer-1 chunks of each locally demanded file are rebuilt in three moves:
    the mirror's own XOR row yields W1[n, lam] for an attached demander lam;
    the base-set pair of lam (if lam sits outside the base set) yields the
    base-set holder's chunk; every other demander's pair then peels against
    the base-set holder. Multicasts are forwarded after XORing out cached
    generators.
    """
    block = users_of_mirror(cfg, m)
    sm1: dict[ChunkId, bytes] = {}
    sm2: dict[int, CodedSymbol] = {}
    sm3_list: list[CodedSymbol] = []
    for step, symbol in server_msgs:
        if step == "SM1":
            (cid,) = symbol.generators
            sm1[cid] = symbol.payload
        elif step == "SM2":
            slots = sorted(cid.slot for cid in symbol.generators)  # type: ignore[arg-type]
            non_anchor = [s for s in slots if s not in profile.base_set]
            sm2[non_anchor[0]] = symbol
        else:
            sm3_list.append(symbol)
    # multicasts arrive in lexicographic subset order
    sm3 = dict(zip(subsets(cfg.k, cfg.t + 1), sm3_list))

    cache_rows: dict[int, CodedSymbol] = {}
    cache_l2: dict[ChunkId, bytes] = {}
    for symbol in mirror_cache:
        first = next(iter(symbol.generators))
        if first.layer == 1:
            cache_rows[first.slot] = symbol  # type: ignore[index]
        else:
            cache_l2[first] = symbol.payload

    l1_chunks: dict[ChunkId, bytes] = {}
    if partition.l1_chunk_bytes:
        demanded = sorted(profile.mirror_files[m - 1])
        decoded_own: dict[int, bytes] = {}
        for lam in sorted(block):
            n = profile.demand_of(lam)
            acc = cache_rows[lam].payload
            for other in range(1, cfg.n_files + 1):
                if other != n:
                    acc = xor_bytes(acc, sm1[ChunkId(1, other, lam)])
            decoded_own[lam] = acc
        for n in demanded:
            for i in range(1, cfg.k + 1):
                if profile.demand_of(i) != n:
                    l1_chunks[ChunkId(1, n, i)] = sm1[ChunkId(1, n, i)]
            holders = sorted(profile.demanders[n - 1])
            anchor = min(u for u in holders if u in block)
            l1_chunks[ChunkId(1, n, anchor)] = decoded_own[anchor]
            (rep,) = [u for u in holders if u in profile.base_set]
            if rep != anchor:
                l1_chunks[ChunkId(1, n, rep)] = xor_bytes(sm2[anchor].payload, decoded_own[anchor])
            for j in holders:
                if j in (anchor, rep):
                    continue
                l1_chunks[ChunkId(1, n, j)] = xor_bytes(sm2[j].payload, l1_chunks[ChunkId(1, n, rep)])
            missing = [i for i in range(1, cfg.k + 1) if ChunkId(1, n, i) not in l1_chunks]
            if missing:
                raise ReconstructError("mirror %d cannot rebuild file %d slots %s" % (m, n, missing))

    covering = _covering_set(cfg.k, cfg.t, block)
    l2_forward: dict[tuple[int, ...], CodedSymbol] = {}
    if partition.l2_chunk_bytes:
        for group in _touched_groups(cfg.k, cfg.t + 1, block):
            symbol = sm3[group]
            kept: list[ChunkId] = []
            acc = symbol.payload
            for cid in symbol.generators:
                if cid.slot in covering:
                    if cid not in cache_l2:
                        raise ReconstructError("mirror %d lacks cached chunk %s" % (m, cid))
                    acc = xor_bytes(acc, cache_l2[cid])
                else:
                    kept.append(cid)
            l2_forward[group] = CodedSymbol(frozenset(kept), acc, symbol.size_files)

    l2_cached: dict[ChunkId, bytes] = {}
    if partition.l2_chunk_bytes and cfg.t >= cfg.k2:
        for n in sorted(profile.mirror_files[m - 1]):
            for group in _covering_groups(cfg.k, cfg.t, block):
                cid = ChunkId(2, n, group)
                if cid not in cache_l2:
                    raise ReconstructError("mirror %d lacks cached chunk %s" % (m, cid))
                l2_cached[cid] = cache_l2[cid]

    return MirrorPlan(l1_chunks, l2_forward, l2_cached)


def mirror_deliver(
    cfg: HierConfig,
    m: int,
    plan: MirrorPlan,
    profile: DemandProfile,
    partition: FilePartition,
) -> tuple[Message, ...]:
    """Messages mirror m broadcasts to its user block."""
    block = users_of_mirror(cfg, m)
    s1 = _l1_size(cfg, partition)
    s2 = _l2_size(cfg, partition)
    out: list[Message] = []
    if partition.l1_chunk_bytes:
        for n in sorted(profile.mirror_files[m - 1]):
            for i in range(1, cfg.k + 1):
                cid = ChunkId(1, n, i)
                out.append(Message("MU1", uncoded(cid, plan.l1_chunks[cid], s1)))
    if partition.l2_chunk_bytes:
        for group in _touched_groups(cfg.k, cfg.t + 1, block):
            out.append(Message("MU2", plan.l2_forward[group]))
        for n in sorted(profile.mirror_files[m - 1]):
            for group in _covering_groups(cfg.k, cfg.t, block):
                cid = ChunkId(2, n, group)
                out.append(Message("MU3", uncoded(cid, plan.l2_cached[cid], s2)))
    return tuple(out)


def user_decode(
    cfg: HierConfig,
    user: int,
    user_cache: Sequence[CodedSymbol],
    mirror_msgs: Sequence[Message],
    profile: DemandProfile,
    partition: FilePartition,
) -> bytes:
    """Reassemble the user's demanded file, byte for byte.

    Layer-1 chunks arrive uncoded. A layer-2 chunk indexed by a subset not
    containing the user is peeled out of the multicast for that subset plus
    the user, cancelling every other generator from cache or relayed chunks;
    the remaining subsets are covered by the cache and the mirror's cached
    sends.
    """
    if not 1 <= user <= cfg.k:
        raise RangeError("user index %d outside [1, %d]" % (user, cfg.k))
    wanted = profile.demand_of(user)
    block = users_of_mirror(cfg, mirror_of_user(cfg, user))
    known: dict[ChunkId, bytes] = {}
    for symbol in user_cache:
        (cid,) = symbol.generators
        known[cid] = symbol.payload
    mu2: list[CodedSymbol] = []
    for step, symbol in mirror_msgs:
        if step == "MU2":
            mu2.append(symbol)
        else:
            (cid,) = symbol.generators
            known[cid] = symbol.payload
    # relayed multicasts arrive in lexicographic subset order
    relay_groups = _touched_groups(cfg.k, cfg.t + 1, block)
    if len(mu2) != len(relay_groups):
        raise DecodeError("user %d saw %d multicasts, expected %d" % (user, len(mu2), len(relay_groups)))
    multicasts = dict(zip(relay_groups, mu2))

    parts: list[bytes] = []
    if partition.l1_chunk_bytes:
        for i in range(1, cfg.k + 1):
            cid = ChunkId(1, wanted, i)
            if cid not in known:
                raise DecodeError("user %d missing layer-1 chunk %s" % (user, cid))
            parts.append(known[cid])
    if partition.l2_chunk_bytes:
        for group in subsets(cfg.k, cfg.t):
            cid = ChunkId(2, wanted, group)
            if cid in known:
                parts.append(known[cid])
                continue
            if user in group:
                raise DecodeError("user %d missing cached chunk %s" % (user, cid))
            key = tuple(sorted(group + (user,)))
            symbol = multicasts.get(key)
            if symbol is None or cid not in symbol.generators:
                raise DecodeError("user %d has no multicast covering %s" % (user, cid))
            acc = symbol.payload
            for other in symbol.generators:
                if other == cid:
                    continue
                if other not in known:
                    raise DecodeError(
                        "user %d cannot cancel %s while peeling %s" % (user, other, cid)
                    )
                acc = xor_bytes(acc, known[other])
            parts.append(acc)
    payload = b"".join(parts)
    if len(payload) != partition.file_bytes:
        raise DecodeError("user %d rebuilt %d bytes, expected %d" % (user, len(payload), partition.file_bytes))
    return payload


def measured_rates(log: TransmissionLog) -> MeasuredRates:
    """Exact transmitted volume, in file units, per hop."""
    r1 = sum((msg.symbol.size_files for msg in log.server_msgs), Fraction(0))
    per_mirror = tuple(
        sum((msg.symbol.size_files for msg in msgs), Fraction(0)) for msgs in log.mirror_msgs
    )
    worst = max(per_mirror, default=Fraction(0))
    return MeasuredRates(r1, per_mirror, worst)


@dataclass(frozen=True)
class SimulationResult:
    cfg: HierConfig
    partition: FilePartition
    profile: DemandProfile
    placement: Placement
    log: TransmissionLog
    rates: MeasuredRates
    decoded: tuple[bytes, ...]


@dataclass(frozen=True)
class PreparedInstance:
    """Demand-independent state (partition, chunk table, placement), ready
    to run many delivery rounds against one library."""

    cfg: HierConfig
    partition: FilePartition
    chunks: dict[ChunkId, bytes]
    placement: Placement


def prepare_instance(cfg: HierConfig, library: Sequence[bytes]) -> PreparedInstance:
    partition = make_partition(cfg, len(library[0]))
    chunks = chunk_table(cfg, library, partition)
    return PreparedInstance(cfg, partition, chunks, place(cfg, library, partition))


def deliver_and_decode(inst: PreparedInstance, demands: Sequence[int]) -> SimulationResult:
    """Both delivery hops plus every user's decode for one demand vector."""
    cfg, partition = inst.cfg, inst.partition
    profile = build_demand_profile(cfg, demands)
    server_msgs = server_deliver(cfg, inst.chunks, profile, partition)
    mirror_msgs = []
    for m in range(1, cfg.k1 + 1):
        plan = mirror_reconstruct(cfg, m, inst.placement.mirror_caches[m - 1], server_msgs, profile, partition)
        mirror_msgs.append(mirror_deliver(cfg, m, plan, profile, partition))
    log = TransmissionLog(server_msgs, tuple(mirror_msgs))
    decoded = tuple(
        user_decode(
            cfg,
            user,
            inst.placement.user_caches[user - 1],
            log.mirror_msgs[mirror_of_user(cfg, user) - 1],
            profile,
            partition,
        )
        for user in range(1, cfg.k + 1)
    )
    return SimulationResult(cfg, partition, profile, inst.placement, log, rates=measured_rates(log), decoded=decoded)


def run_simulation(cfg: HierConfig, library: Sequence[bytes], demands: Sequence[int]) -> SimulationResult:
    """Execute placement, both delivery hops and every user's decode."""
    return deliver_and_decode(prepare_instance(cfg, library), demands)


def make_library(cfg: HierConfig, file_bytes: int, seed: int) -> tuple[bytes, ...]:
    """Deterministic pseudorandom library from a 64-bit seed."""
    import random

    rng = random.Random(seed & 0xFFFFFFFFFFFFFFFF)
    return tuple(rng.randbytes(file_bytes) for _ in range(cfg.n_files))
