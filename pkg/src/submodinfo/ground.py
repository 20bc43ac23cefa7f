"""Finite ground sets and immutable bitmask subsets.

Every set manipulated by this package is a ``SubsetMask``: an integer bitmask
paired with the ``GroundSet`` it lives in. Python integers are arbitrary
width, so the same representation serves word-sized and larger universes.
Mixing masks from different ground sets raises ``GroundSetMismatchError``.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence, Tuple

from .errors import GroundSetMismatchError, ValidationError


def bit_indices(bits: int) -> Tuple[int, ...]:
    """Indices of the set bits of ``bits``, ascending."""
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(out)


class GroundSet:
    """Universe of ``size`` elements indexed ``0 .. size - 1``.

    Labels are optional display names; indices are the identity used
    everywhere else. Instances compare by value (size and labels).
    """

    __slots__ = ("size", "labels", "full_bits", "_hash")

    def __init__(self, size: int, labels: Optional[Sequence[str]] = None):
        if not isinstance(size, int) or isinstance(size, bool) or size < 1:
            raise ValidationError(f"ground set size must be a positive integer, got {size!r}")
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != size:
                raise ValidationError(f"expected {size} labels, got {len(labels)}")
            if len(set(labels)) != size:
                raise ValidationError("ground set labels must be distinct")
        self.size = size
        self.labels = labels
        self.full_bits = (1 << size) - 1
        self._hash = hash((size, labels))

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, GroundSet)
            and self.size == other.size
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if self.labels is not None:
            return f"GroundSet(size={self.size}, labels={list(self.labels)!r})"
        return f"GroundSet(size={self.size})"

    def empty(self) -> "SubsetMask":
        return SubsetMask(self, 0)

    def full(self) -> "SubsetMask":
        return SubsetMask(self, self.full_bits)

    def subset(self, indices: Iterable[int]) -> "SubsetMask":
        return SubsetMask.from_indices(self, indices)

    def singleton(self, index: int) -> "SubsetMask":
        return SubsetMask.from_indices(self, (index,))

    def subsets(self) -> Iterator["SubsetMask"]:
        """All 2^n subsets in ascending mask order. Intended for small n."""
        for bits in range(self.full_bits + 1):
            yield SubsetMask(self, bits)


class SubsetMask:
    """Immutable subset of a ground set, stored as a bitmask."""

    __slots__ = ("ground", "bits")

    def __init__(self, ground: GroundSet, bits: int = 0):
        if bits < 0 or bits > ground.full_bits:
            raise ValidationError(
                f"bitmask {bits:#x} does not fit a ground set of size {ground.size}"
            )
        self.ground = ground
        self.bits = bits

    @classmethod
    def from_indices(cls, ground: GroundSet, indices: Iterable[int]) -> "SubsetMask":
        bits = 0
        for i in indices:
            if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < ground.size:
                raise ValidationError(f"element index {i!r} out of range for n={ground.size}")
            bits |= 1 << i
        return cls(ground, bits)

    def _require_same(self, other: "SubsetMask") -> None:
        if self.ground is not other.ground and self.ground != other.ground:
            raise GroundSetMismatchError(
                f"operands live in different ground sets: {self.ground!r} vs {other.ground!r}"
            )

    # -- set algebra ---------------------------------------------------

    def union(self, other: "SubsetMask") -> "SubsetMask":
        self._require_same(other)
        return SubsetMask(self.ground, self.bits | other.bits)

    def intersection(self, other: "SubsetMask") -> "SubsetMask":
        self._require_same(other)
        return SubsetMask(self.ground, self.bits & other.bits)

    def difference(self, other: "SubsetMask") -> "SubsetMask":
        self._require_same(other)
        return SubsetMask(self.ground, self.bits & ~other.bits)

    def symmetric_difference(self, other: "SubsetMask") -> "SubsetMask":
        self._require_same(other)
        return SubsetMask(self.ground, self.bits ^ other.bits)

    def complement(self) -> "SubsetMask":
        return SubsetMask(self.ground, self.bits ^ self.ground.full_bits)

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __xor__ = symmetric_difference
    __invert__ = complement

    def add(self, index: int) -> "SubsetMask":
        if not 0 <= index < self.ground.size:
            raise ValidationError(f"element index {index} out of range for n={self.ground.size}")
        return SubsetMask(self.ground, self.bits | (1 << index))

    def remove(self, index: int) -> "SubsetMask":
        if not 0 <= index < self.ground.size:
            raise ValidationError(f"element index {index} out of range for n={self.ground.size}")
        return SubsetMask(self.ground, self.bits & ~(1 << index))

    def isdisjoint(self, other: "SubsetMask") -> bool:
        self._require_same(other)
        return (self.bits & other.bits) == 0

    def issubset(self, other: "SubsetMask") -> bool:
        self._require_same(other)
        return (self.bits & ~other.bits) == 0

    __le__ = issubset

    # -- inspection ----------------------------------------------------

    def indices(self) -> Tuple[int, ...]:
        return bit_indices(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __contains__(self, index: int) -> bool:
        return 0 <= index < self.ground.size and bool(self.bits >> index & 1)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SubsetMask)
            and self.bits == other.bits
            and (self.ground is other.ground or self.ground == other.ground)
        )

    def __lt__(self, other: "SubsetMask") -> bool:
        self._require_same(other)
        return self.bits < other.bits

    def __hash__(self) -> int:
        return hash((self.ground._hash, self.bits))

    def __repr__(self) -> str:
        return f"SubsetMask({set(self.indices()) if self.bits else '{}'} of n={self.ground.size})"
