"""GF(2) linear-span helpers over int bitsets.

Each chunk is one bit position; a received XOR is the int with the bits of
its generators set. Used as the independent oracle against which the
constructive decoders are checked.
"""

from __future__ import annotations

from typing import Iterable, Sequence


def span_basis(rows: Iterable[int]) -> list[int]:
    """Row-reduce into a basis keyed by leading bit."""
    basis: dict[int, int] = {}
    for row in rows:
        cur = row
        while cur:
            lead = cur.bit_length() - 1
            if lead in basis:
                cur ^= basis[lead]
            else:
                basis[lead] = cur
                break
    return sorted(basis.values(), reverse=True)


def reduce_vector(vec: int, basis: Sequence[int]) -> int:
    """Remainder of vec modulo the (reduced) basis."""
    by_lead = {b.bit_length() - 1: b for b in basis}
    cur = vec
    while cur:
        lead = cur.bit_length() - 1
        if lead not in by_lead:
            return cur
        cur ^= by_lead[lead]
    return 0


def in_span(vec: int, basis: Sequence[int]) -> bool:
    return reduce_vector(vec, basis) == 0


def decodable_units(rows: Iterable[int], n_bits: int) -> set[int]:
    """Bit positions whose unit vector lies in the span (full elimination)."""
    basis = span_basis(rows)
    return {j for j in range(n_bits) if in_span(1 << j, basis)}


def peeled_units(rows: Iterable[int]) -> set[int]:
    """Bit positions recoverable by iterated single-unknown peeling.

    Starts from the supplied rows, repeatedly cancels known bits out of each
    row and absorbs rows reduced to a single unknown. This mirrors what the
    constructive decoders do, without Gaussian elimination.
    """
    eqs = list(rows)
    known_mask = 0
    progress = True
    while progress:
        progress = False
        for eq in eqs:
            rem = eq & ~known_mask
            if rem and rem & (rem - 1) == 0:  # exactly one unknown bit
                known_mask |= rem
                progress = True
    return {j for j in range(known_mask.bit_length()) if known_mask >> j & 1}
