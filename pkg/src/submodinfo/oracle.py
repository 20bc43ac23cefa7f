"""The set-function evaluation contract.

A ``ValueOracle`` wraps a callable ``f: SubsetMask -> float`` together with
the ground set it is defined over, structural claims made by the provider,
and a bounded LRU memo of previously evaluated subsets. Evaluation must be
deterministic: the same subset always yields the bit-identical value, which
the cache enforces by construction.

The metadata flags are *claims*. ``analysis`` can certify or refute them;
optimizers that need a property either trust an explicit claim or verify it
at desk scale, but never assume it silently.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Callable

from .errors import GroundSetMismatchError, ValidationError
from .ground import GroundSet, SubsetMask

DEFAULT_CACHE_SIZE = 1 << 20


@dataclass(frozen=True)
class OracleFlags:
    """Structural properties claimed by the oracle's provider."""

    normalized: bool = False
    monotone: bool = False
    submodular: bool = False
    second_order_supermodular: bool = False


#: Claims of a normalized monotone submodular ("polymatroid") function.
POLYMATROID = OracleFlags(normalized=True, monotone=True, submodular=True)


class ValueOracle:
    """Memoizing wrapper around a deterministic set function."""

    def __init__(
        self,
        fn: Callable[[SubsetMask], float],
        ground: GroundSet,
        flags: OracleFlags | None = None,
        cache_size: int = DEFAULT_CACHE_SIZE,
        name: str = "",
    ):
        if cache_size < 1:
            raise ValidationError("cache_size must be at least 1")
        self._fn = fn
        self.ground = ground
        self.flags = flags if flags is not None else OracleFlags()
        self.name = name
        self._cache: OrderedDict[int, float] = OrderedDict()
        self._cache_size = cache_size
        self._lock = threading.Lock()
        self._misses = 0

    @property
    def evaluations(self) -> int:
        """Number of distinct underlying function evaluations so far."""
        return self._misses

    def evaluate(self, subset: SubsetMask) -> float:
        if subset.ground is not self.ground and subset.ground != self.ground:
            raise GroundSetMismatchError(
                f"subset over {subset.ground!r} passed to an oracle over {self.ground!r}"
            )
        return self.evaluate_bits(subset.bits)

    __call__ = evaluate

    def evaluate_bits(self, bits: int) -> float:
        """Evaluate by raw bitmask. Hot path used by the measures."""
        cache = self._cache
        with self._lock:
            if bits in cache:
                cache.move_to_end(bits)
                return cache[bits]
        value = float(self._fn(SubsetMask(self.ground, bits)))
        with self._lock:
            if bits not in cache:
                self._misses += 1
                cache[bits] = value
                if len(cache) > self._cache_size:
                    cache.popitem(last=False)
            # under a concurrent race, return the first stored value
            return cache.get(bits, value)

    def gain_bits(self, element: int, base_bits: int) -> float:
        """First-order gain f(element | base)."""
        return self.evaluate_bits(base_bits | (1 << element)) - self.evaluate_bits(base_bits)

    def gain(self, element: int, base: SubsetMask) -> float:
        if not 0 <= element < self.ground.size:
            raise ValidationError(f"element index {element} out of range for n={self.ground.size}")
        if base.ground is not self.ground and base.ground != self.ground:
            raise GroundSetMismatchError("gain base lives in a different ground set")
        return self.gain_bits(element, base.bits)

    # -- derived oracles -------------------------------------------------

    def conditioned(self, conditioning: SubsetMask) -> "ValueOracle":
        """The conditional function g(A) = f(A | C) = f(A ∪ C) − f(C).

        If ``f`` is normalized, monotone and submodular then so is ``g``,
        and non-negative third-order differences are preserved; the claimed
        flags carry over. Evaluations route through this oracle's cache.
        """
        if conditioning.ground is not self.ground and conditioning.ground != self.ground:
            raise GroundSetMismatchError("conditioning set lives in a different ground set")
        return self.conditioned_bits(conditioning.bits)

    def conditioned_bits(self, cond_bits: int) -> "ValueOracle":
        if cond_bits == 0:
            return self
        base_value = self.evaluate_bits(cond_bits)
        parent = self

        def fn(subset: SubsetMask) -> float:
            return parent.evaluate_bits(subset.bits | cond_bits) - base_value

        return ValueOracle(
            fn,
            self.ground,
            flags=OracleFlags(
                normalized=True,
                monotone=self.flags.monotone,
                submodular=self.flags.submodular,
                second_order_supermodular=self.flags.second_order_supermodular,
            ),
            name=f"{self.name}|conditioned" if self.name else "conditioned",
        )

    def scaled(self, factor: float) -> "ValueOracle":
        """The oracle for factor * f; positive scaling preserves all claims."""
        if not factor > 0.0:
            raise ValidationError("scaling factor must be positive")
        parent = self

        def fn(subset: SubsetMask) -> float:
            return factor * parent.evaluate_bits(subset.bits)

        return ValueOracle(
            fn,
            self.ground,
            flags=self.flags,
            name=f"{self.name}*{factor:g}" if self.name else f"scaled*{factor:g}",
        )

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"ValueOracle(n={self.ground.size}{tag}, evaluations={self._misses})"
