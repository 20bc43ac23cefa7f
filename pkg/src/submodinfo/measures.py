"""Combinatorial information measures computed through oracle calls alone.

These are the generic paths: they touch the set function only as a black
box, so they work for any oracle. Family-specific closed forms live in
``functions`` and must agree with these within 1e-9.

Definitions, for a normalized monotone submodular f:

* conditional gain          f(A|B)   = f(A ∪ B) − f(B)
* mutual information        I(A;B)   = f(A) + f(B) − f(A ∪ B)
* conditional MI            I(A;B|C) = I_g(A;B) with g = f(·|C)
* multi-set MI              I(A_1;…;A_k) = −Σ_{∅≠T⊆[k]} (−1)^{|T|} f(∪_{i∈T} A_i)
* total correlation         C(A_1,…,A_k) = Σ_i f(A_i) − f(∪_i A_i)
* variation of information  D(A,B)   = f(A|B) + f(B|A)

Arguments of symmetric measures are ordered by mask value before any
arithmetic, so floating-point summation order is fixed and symmetry is
bit-exact. Reductions (k=1, k=2, empty conditioning set) are exact, not
merely within tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Tuple

from .errors import GroundSetMismatchError, ResourceLimitError, ValidationError
from .ground import SubsetMask
from .oracle import ValueOracle

#: Largest k accepted by the generic multi-set path (2^k oracle calls).
MULTISET_MAX_SETS = 20

DEFAULT_TOL = 1e-9


class MeasureKind(str, Enum):
    INFO = "information"
    COND_GAIN = "conditional_gain"
    MI = "mutual_information"
    CMI = "conditional_mutual_information"
    MULTI_MI = "multiset_mutual_information"
    COND_MULTI_MI = "conditional_multiset_mutual_information"
    TOTAL_CORR = "total_correlation"
    COND_TOTAL_CORR = "conditional_total_correlation"
    VAR_INFO = "variation_of_information"


class MeasurePath(str, Enum):
    GENERIC = "generic"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class MeasureResult:
    """A measure value together with its provenance."""

    value: float
    kind: MeasureKind
    oracle_calls: int
    path: MeasurePath


def _check_ground(f: ValueOracle, *masks: SubsetMask) -> None:
    for m in masks:
        if m.ground is not f.ground and m.ground != f.ground:
            raise GroundSetMismatchError(
                f"set over {m.ground!r} passed to a measure over {f.ground!r}"
            )


def _canonical_bits(f: ValueOracle, sets: Sequence[SubsetMask]) -> Tuple[int, ...]:
    _check_ground(f, *sets)
    return tuple(sorted(m.bits for m in sets))


# ---------------------------------------------------------------------------
# bits-level kernels (shared with analysis/optimize)
# ---------------------------------------------------------------------------


def _cg_bits(f: ValueOracle, a: int, b: int) -> float:
    return f.evaluate_bits(a | b) - f.evaluate_bits(b)


def _mi_bits(f: ValueOracle, a: int, b: int) -> float:
    if a > b:
        a, b = b, a
    return (f.evaluate_bits(a) + f.evaluate_bits(b)) - f.evaluate_bits(a | b)


def _cmi_bits(f: ValueOracle, a: int, b: int, c: int) -> float:
    if c == 0:
        return _mi_bits(f, a, b)
    if a > b:
        a, b = b, a
    fc = f.evaluate_bits(c)
    ga = f.evaluate_bits(a | c) - fc
    gb = f.evaluate_bits(b | c) - fc
    gu = f.evaluate_bits(a | b | c) - fc
    return (ga + gb) - gu


def _voi_bits(f: ValueOracle, a: int, b: int) -> float:
    if a > b:
        a, b = b, a
    fu = f.evaluate_bits(a | b)
    return (fu - f.evaluate_bits(b)) + (fu - f.evaluate_bits(a))


def _multiset_bits(f: ValueOracle, bits: Sequence[int]) -> float:
    k = len(bits)
    unions = [0] * (1 << k)
    for t in range(1, 1 << k):
        low = t & -t
        unions[t] = unions[t ^ low] | bits[low.bit_length() - 1]
    total = 0.0
    for t in range(1, 1 << k):
        v = f.evaluate_bits(unions[t])
        if t.bit_count() & 1:
            total += v
        else:
            total -= v
    return total


def _tc_bits(f: ValueOracle, bits: Sequence[int]) -> float:
    total = 0.0
    union = 0
    for b in bits:
        total += f.evaluate_bits(b)
        union |= b
    return total - f.evaluate_bits(union)


# ---------------------------------------------------------------------------
# public measures
# ---------------------------------------------------------------------------


def information(f: ValueOracle, a: SubsetMask) -> float:
    """I_f(A) = f(A); the information-function view of a polymatroid f."""
    _check_ground(f, a)
    return f.evaluate_bits(a.bits)


def conditional_gain(f: ValueOracle, a: SubsetMask, b: SubsetMask) -> float:
    """f(A|B) = f(A ∪ B) − f(B). Non-negative for monotone f."""
    _check_ground(f, a, b)
    return _cg_bits(f, a.bits, b.bits)


def mutual_information(f: ValueOracle, a: SubsetMask, b: SubsetMask) -> float:
    """I_f(A;B) = f(A) + f(B) − f(A ∪ B).

    Symmetric (bit-exactly, via canonical argument ordering); for monotone
    submodular f the value lies in [f(A ∩ B), min(f(A), f(B))].
    """
    _check_ground(f, a, b)
    return _mi_bits(f, a.bits, b.bits)


def conditional_mutual_information(
    f: ValueOracle, a: SubsetMask, b: SubsetMask, c: SubsetMask
) -> float:
    """I_f(A;B|C), the mutual information of the conditional g = f(·|C).

    Equals f(A∪C) + f(B∪C) − f(A∪B∪C) − f(C); with C = ∅ this reduces to
    ``mutual_information`` exactly.
    """
    _check_ground(f, a, b, c)
    return _cmi_bits(f, a.bits, b.bits, c.bits)


def multiset_mutual_information(f: ValueOracle, sets: Sequence[SubsetMask]) -> float:
    """Inclusion–exclusion multi-set mutual information I_f(A_1;…;A_k).

    k=1 gives f(A_1) and k=2 gives ``mutual_information`` exactly. The value
    may be negative for k ≥ 3. The generic path spends at most 2^k − 1
    distinct oracle evaluations, so k is capped at ``MULTISET_MAX_SETS``.
    """
    bits = _canonical_bits(f, sets)
    k = len(bits)
    if k == 0:
        raise ValidationError("multi-set mutual information needs at least one set")
    if k > MULTISET_MAX_SETS:
        raise ResourceLimitError(
            f"generic multi-set path is exponential in k; got k={k} > {MULTISET_MAX_SETS}"
        )
    return _multiset_bits(f, bits)


def conditional_multiset_mi(
    f: ValueOracle, sets: Sequence[SubsetMask], c: SubsetMask
) -> float:
    """Multi-set mutual information of the conditional function f(·|C)."""
    bits = _canonical_bits(f, sets)
    _check_ground(f, c)
    k = len(bits)
    if k == 0:
        raise ValidationError("multi-set mutual information needs at least one set")
    if k > MULTISET_MAX_SETS:
        raise ResourceLimitError(
            f"generic multi-set path is exponential in k; got k={k} > {MULTISET_MAX_SETS}"
        )
    if c.bits == 0:
        return _multiset_bits(f, bits)
    return _multiset_bits(f.conditioned_bits(c.bits), bits)


def total_correlation(f: ValueOracle, sets: Sequence[SubsetMask]) -> float:
    """C_f(A_1,…,A_k) = Σ_i f(A_i) − f(∪_i A_i); k=2 equals the MI exactly.

    Non-negative and monotone in each argument for monotone submodular f.
    """
    bits = _canonical_bits(f, sets)
    if not bits:
        raise ValidationError("total correlation needs at least one set")
    return _tc_bits(f, bits)


def conditional_total_correlation(
    f: ValueOracle, sets: Sequence[SubsetMask], c: SubsetMask
) -> float:
    """Total correlation of the conditional function f(·|C)."""
    bits = _canonical_bits(f, sets)
    _check_ground(f, c)
    if not bits:
        raise ValidationError("total correlation needs at least one set")
    if c.bits == 0:
        return _tc_bits(f, bits)
    return _tc_bits(f.conditioned_bits(c.bits), bits)


def variation_of_information(f: ValueOracle, a: SubsetMask, b: SubsetMask) -> float:
    """D_f(A,B) = f(A|B) + f(B|A) = f(A ∪ B) − I_f(A;B).

    A pseudo-metric on subsets for monotone submodular f; a metric when the
    curvature of f is positive. D_f(A,A) = 0 exactly.
    """
    _check_ground(f, a, b)
    return _voi_bits(f, a.bits, b.bits)


def is_independent(
    f: ValueOracle, a: SubsetMask, b: SubsetMask, tol: float = DEFAULT_TOL
) -> bool:
    """A ⊥_f B, read as |I_f(A;B)| ≤ tol."""
    if tol < 0:
        raise ValidationError("tolerance must be non-negative")
    return abs(mutual_information(f, a, b)) <= tol


# ---------------------------------------------------------------------------
# dispatcher with provenance
# ---------------------------------------------------------------------------

_CONDITIONAL_KINDS = {
    MeasureKind.CMI,
    MeasureKind.COND_MULTI_MI,
    MeasureKind.COND_TOTAL_CORR,
}

_ARITY = {
    MeasureKind.INFO: 1,
    MeasureKind.COND_GAIN: 2,
    MeasureKind.MI: 2,
    MeasureKind.CMI: 2,
    MeasureKind.VAR_INFO: 2,
}


def measure(
    f: ValueOracle,
    kind: MeasureKind,
    sets: Sequence[SubsetMask],
    conditioning: SubsetMask | None = None,
) -> MeasureResult:
    """Compute one measure on the generic path, counting distinct oracle calls."""
    kind = MeasureKind(kind)
    expected = _ARITY.get(kind)
    if expected is not None and len(sets) != expected:
        raise ValidationError(f"{kind.value} takes exactly {expected} set(s), got {len(sets)}")
    if kind in _CONDITIONAL_KINDS:
        if conditioning is None:
            raise ValidationError(f"{kind.value} requires a conditioning set")
    elif conditioning is not None:
        raise ValidationError(f"{kind.value} does not take a conditioning set")

    before = f.evaluations
    if kind is MeasureKind.INFO:
        value = information(f, sets[0])
    elif kind is MeasureKind.COND_GAIN:
        value = conditional_gain(f, sets[0], sets[1])
    elif kind is MeasureKind.MI:
        value = mutual_information(f, sets[0], sets[1])
    elif kind is MeasureKind.CMI:
        value = conditional_mutual_information(f, sets[0], sets[1], conditioning)
    elif kind is MeasureKind.MULTI_MI:
        value = multiset_mutual_information(f, sets)
    elif kind is MeasureKind.COND_MULTI_MI:
        value = conditional_multiset_mi(f, sets, conditioning)
    elif kind is MeasureKind.TOTAL_CORR:
        value = total_correlation(f, sets)
    elif kind is MeasureKind.COND_TOTAL_CORR:
        value = conditional_total_correlation(f, sets, conditioning)
    elif kind is MeasureKind.VAR_INFO:
        value = variation_of_information(f, sets[0], sets[1])
    else:  # pragma: no cover - enum is closed
        raise ValidationError(f"unknown measure kind {kind!r}")
    return MeasureResult(value, kind, f.evaluations - before, MeasurePath.GENERIC)
