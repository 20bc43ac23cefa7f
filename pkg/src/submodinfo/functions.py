"""Concrete submodular function families and their closed-form measures.

Seven families ship here, each a normalized monotone submodular function:

* ``Modular``               f(A) = w(A)
* ``SetCover``              f(A) = w(γ(A)), concepts covered by A
* ``ProbabilisticSetCover`` f(A) = Σ_i w_i (1 − P_i(A)), P_i(A) = Π_{a∈A}(1 − p_ia)
* ``FacilityLocation``      f(A) = Σ_i max_{a∈A} s_ia
* ``GraphCut``              f(A) = λ Σ_i Σ_{a∈A} s_ia − Σ_{a,a'∈A} s_aa', λ ≥ 2
* ``Truncation``            f(A) = min(|A|, c)
* ``ConcavePowerModular``   f(A) = w(A)^a, a ∈ (0, 1]

plus ``Mixture``, a non-negative weighted sum of family members. Every
information measure is linear in f, so closed forms distribute over sums.

Each family implements whatever closed forms it admits; requesting a missing
one raises ``ClosedFormUnavailable``. Closed forms must agree with the
generic oracle paths in ``measures`` within 1e-9 (exactly, for families with
integer weights) — that equivalence is the library's core test gate.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    ClosedFormUnavailable,
    PreconditionError,
    ValidationError,
)
from .ground import GroundSet, SubsetMask, bit_indices
from .measures import (
    MeasureKind,
    MeasurePath,
    MeasureResult,
    measure as generic_measure,
)
from .oracle import DEFAULT_CACHE_SIZE, OracleFlags, ValueOracle

# probabilities this close to 1 trigger the log-space product
_LOG_SPACE_THRESHOLD = 1.0 - 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


class SimilarityKernel:
    """n × n similarity matrix with entries in [0, 1].

    ``diagonal_is_one`` asserts s_ii = 1 (self-similarity is maximal), the
    standard facility-location assumption.
    """

    __slots__ = ("matrix", "diagonal_is_one")

    def __init__(self, matrix, diagonal_is_one: bool = True):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValidationError("similarity kernel must be a non-empty square matrix")
        if not np.all(np.isfinite(m)):
            raise ValidationError("similarity kernel entries must be finite")
        if m.min() < 0.0 or m.max() > 1.0:
            raise ValidationError("similarity kernel entries must lie in [0, 1]")
        if diagonal_is_one and np.max(np.abs(np.diagonal(m) - 1.0)) > 1e-12:
            raise ValidationError("similarity kernel diagonal must equal 1")
        self.matrix = _readonly(m)
        self.diagonal_is_one = diagonal_is_one

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.T)) <= tol)


class FunctionSpec:
    """Base class: a parameterized set function plus its closed forms.

    Subclasses define ``_value`` (the family formula on an index tuple) and
    override the ``cf_*_bits`` hooks they have closed forms for. Instances
    are immutable after construction and freely shareable across threads.
    """

    family = "abstract"
    #: whether cf_multiset_mi_bits exists for k >= 3
    multiset_closed = False

    n: int
    flags: OracleFlags

    # -- evaluation ------------------------------------------------------

    def _value(self, idx: Tuple[int, ...]) -> float:
        raise NotImplementedError

    def evaluate_bits(self, bits: int) -> float:
        return self._value(bit_indices(bits))

    def evaluate(self, subset: SubsetMask) -> float:
        self._check_subset(subset)
        return self.evaluate_bits(subset.bits)

    def ground(self, labels: Optional[Sequence[str]] = None) -> GroundSet:
        return GroundSet(self.n, labels)

    def oracle(
        self,
        ground: Optional[GroundSet] = None,
        cache_size: int = DEFAULT_CACHE_SIZE,
    ) -> ValueOracle:
        if ground is None:
            ground = self.ground()
        elif ground.size != self.n:
            raise ValidationError(
                f"{self.family} is over n={self.n} elements, ground set has {ground.size}"
            )
        return ValueOracle(
            lambda s: self.evaluate_bits(s.bits),
            ground,
            flags=self.flags,
            cache_size=cache_size,
            name=self.family,
        )

    def _check_subset(self, subset: SubsetMask) -> None:
        if subset.ground.size != self.n:
            raise ValidationError(
                f"{self.family} is over n={self.n} elements, subset ground has {subset.ground.size}"
            )

    # -- closed-form hooks (bits level) -----------------------------------

    def _no_closed_form(self, what: str) -> ClosedFormUnavailable:
        return ClosedFormUnavailable(f"{self.family} has no closed form for {what}")

    def cf_conditional_gain_bits(self, a: int, b: int) -> float:
        raise self._no_closed_form("the conditional gain")

    def cf_mutual_information_bits(self, a: int, b: int) -> float:
        raise self._no_closed_form("the mutual information")

    def cf_multiset_mi_bits(self, bits: Sequence[int]) -> float:
        if len(bits) == 1:
            return self.evaluate_bits(bits[0])
        if len(bits) == 2:
            return self.cf_mutual_information_bits(bits[0], bits[1])
        raise self._no_closed_form("the multi-set mutual information at k >= 3")

    def cf_metric_bits(self, a: int, b: int) -> float:
        raise self._no_closed_form("the variation-of-information metric")

    def cf_conditional_mi_bits(self, a: int, b: int, c: int) -> float:
        raise self._no_closed_form("the conditional mutual information")

    # -- serialization -----------------------------------------------------

    def payload(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n})"


def _check_weights(w, what: str = "weights") -> np.ndarray:
    arr = np.asarray(w, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValidationError(f"{what} must be a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} must be finite")
    if arr.min() < 0.0:
        raise ValidationError(f"{what} must be non-negative")
    return _readonly(arr)


class Modular(FunctionSpec):
    """f(A) = Σ_{a ∈ A} w_a with non-negative weights."""

    family = "modular"
    multiset_closed = True

    def __init__(self, weights):
        self.weights = _check_weights(weights)
        self.n = int(self.weights.size)
        self.flags = OracleFlags(True, True, True, True)

    def _w_bits(self, bits: int) -> float:
        if bits == 0:
            return 0.0
        return float(self.weights[list(bit_indices(bits))].sum())

    def _value(self, idx):
        if not idx:
            return 0.0
        return float(self.weights[list(idx)].sum())

    def cf_conditional_gain_bits(self, a, b):
        return self._w_bits(a & ~b)  # w(A \ B)

    def cf_mutual_information_bits(self, a, b):
        return self._w_bits(a & b)  # w(A ∩ B)

    def cf_multiset_mi_bits(self, bits):
        inter = bits[0]
        for b in bits[1:]:
            inter &= b
        return self._w_bits(inter)  # w(∩ A_i)

    def cf_metric_bits(self, a, b):
        return self._w_bits(a ^ b)  # w(A Δ B)

    def payload(self) -> dict:
        return {"family": self.family, "weights": self.weights.tolist()}


class SetCover(FunctionSpec):
    """f(A) = w(γ(A)): total weight of concepts covered by A.

    ``concepts_per_element`` maps each element to the concept indices it
    covers; ``concept_weights`` is non-negative, one entry per concept.
    """

    family = "set_cover"
    multiset_closed = True

    def __init__(self, concepts_per_element: Sequence[Iterable[int]], concept_weights):
        self.concept_weights = _check_weights(concept_weights, "concept weights")
        n_concepts = self.concept_weights.size
        masks = []
        for j, concepts in enumerate(concepts_per_element):
            mask = 0
            for c in concepts:
                if not isinstance(c, int) or isinstance(c, bool) or not 0 <= c < n_concepts:
                    raise ValidationError(
                        f"element {j} covers concept {c!r}, outside the {n_concepts}-concept universe"
                    )
                mask |= 1 << c
            masks.append(mask)
        if not masks:
            raise ValidationError("set cover needs at least one element")
        self.element_concepts = tuple(masks)
        self.n = len(masks)
        self.flags = OracleFlags(True, True, True, True)

    @property
    def n_concepts(self) -> int:
        return int(self.concept_weights.size)

    def concept_bits(self, bits: int) -> int:
        mask = 0
        for j in bit_indices(bits):
            mask |= self.element_concepts[j]
        return mask

    def weight_of_concepts(self, concept_bits: int) -> float:
        if concept_bits == 0:
            return 0.0
        return float(self.concept_weights[list(bit_indices(concept_bits))].sum())

    def _value(self, idx):
        mask = 0
        for j in idx:
            mask |= self.element_concepts[j]
        return self.weight_of_concepts(mask)

    def cf_conditional_gain_bits(self, a, b):
        return self.weight_of_concepts(self.concept_bits(a) & ~self.concept_bits(b))

    def cf_mutual_information_bits(self, a, b):
        return self.weight_of_concepts(self.concept_bits(a) & self.concept_bits(b))

    def cf_multiset_mi_bits(self, bits):
        inter = self.concept_bits(bits[0])
        for b in bits[1:]:
            inter &= self.concept_bits(b)
        return self.weight_of_concepts(inter)

    def cf_metric_bits(self, a, b):
        return self.weight_of_concepts(self.concept_bits(a) ^ self.concept_bits(b))

    def payload(self) -> dict:
        return {
            "family": self.family,
            "concepts_per_element": [list(bit_indices(m)) for m in self.element_concepts],
            "concept_weights": self.concept_weights.tolist(),
        }


class ProbabilisticSetCover(FunctionSpec):
    """f(A) = Σ_i w_i (1 − P_i(A)) with P_i(A) = Π_{a∈A} (1 − p_ai).

    ``probabilities`` has shape (n, n_concepts): p[a, i] is the probability
    that element a covers concept i. The multi-set MI and conditional MI
    closed forms are derived under pairwise disjointness and enforce it.
    """

    family = "probabilistic_set_cover"
    multiset_closed = True

    def __init__(self, probabilities, concept_weights):
        p = np.asarray(probabilities, dtype=float)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValidationError("probabilities must be a non-empty n x n_concepts matrix")
        if not np.all(np.isfinite(p)) or p.min() < 0.0 or p.max() > 1.0:
            raise ValidationError("coverage probabilities must lie in [0, 1]")
        self.probabilities = _readonly(p)
        self.concept_weights = _check_weights(concept_weights, "concept weights")
        if self.concept_weights.size != p.shape[1]:
            raise ValidationError(
                f"got {self.concept_weights.size} concept weights for {p.shape[1]} concepts"
            )
        self.n = int(p.shape[0])
        self.flags = OracleFlags(True, True, True, True)

    def p_none(self, bits: int) -> np.ndarray:
        """P_i(A) per concept: probability that no element of A covers i."""
        if bits == 0:
            return np.ones(self.probabilities.shape[1])
        rows = self.probabilities[list(bit_indices(bits)), :]
        q = 1.0 - rows
        if not (rows > _LOG_SPACE_THRESHOLD).any():
            return q.prod(axis=0)
        # log-space to dodge cancellation when some probability is ~1
        zero = (q <= 0.0).any(axis=0)
        out = np.exp(np.log(np.where(q > 0.0, q, 1.0)).sum(axis=0))
        out[zero] = 0.0
        return out

    def _value(self, idx):
        if not idx:
            return 0.0
        bits = 0
        for j in idx:
            bits |= 1 << j
        return float(self.concept_weights @ (1.0 - self.p_none(bits)))

    @staticmethod
    def _require_disjoint(bits: Sequence[int], what: str) -> None:
        seen = 0
        for b in bits:
            if seen & b:
                raise PreconditionError(
                    f"probabilistic_set_cover {what} closed form requires pairwise-disjoint sets"
                )
            seen |= b

    def cf_conditional_gain_bits(self, a, b):
        pb = self.p_none(b)
        return float(self.concept_weights @ (pb * (1.0 - self.p_none(a & ~b))))

    def cf_mutual_information_bits(self, a, b):
        pa, pb, pu = self.p_none(a), self.p_none(b), self.p_none(a | b)
        return float(self.concept_weights @ (1.0 - (pa + pb - pu)))

    def cf_multiset_mi_bits(self, bits):
        self._require_disjoint(bits, "multi-set mutual information")
        covered = 1.0 - self.p_none(bits[0])
        for b in bits[1:]:
            covered = covered * (1.0 - self.p_none(b))
        return float(self.concept_weights @ covered)

    def cf_metric_bits(self, a, b):
        pa, pb = self.p_none(a), self.p_none(b)
        gain_ab = pb * (1.0 - self.p_none(a & ~b))
        gain_ba = pa * (1.0 - self.p_none(b & ~a))
        return float(self.concept_weights @ (gain_ab + gain_ba))

    def cf_conditional_mi_bits(self, a, b, c):
        self._require_disjoint((a, b, c), "conditional mutual information")
        value = (1.0 - self.p_none(a)) * (1.0 - self.p_none(b)) * self.p_none(c)
        return float(self.concept_weights @ value)

    def payload(self) -> dict:
        return {
            "family": self.family,
            "probabilities": self.probabilities.tolist(),
            "concept_weights": self.concept_weights.tolist(),
        }


class FacilityLocation(FunctionSpec):
    """f(A) = Σ_{i ∈ Ω} max_{a ∈ A} s_ia; the max over the empty set is 0."""

    family = "facility_location"
    multiset_closed = True

    def __init__(self, kernel: Union[SimilarityKernel, np.ndarray, Sequence]):
        if not isinstance(kernel, SimilarityKernel):
            kernel = SimilarityKernel(kernel)
        self.kernel = kernel
        self.n = kernel.n
        self.flags = OracleFlags(True, True, True, True)

    def coverage(self, bits: int) -> np.ndarray:
        """Per-row best similarity max_{a∈A} s_ia (zeros for the empty set)."""
        if bits == 0:
            return np.zeros(self.n)
        return self.kernel.matrix[:, list(bit_indices(bits))].max(axis=1)

    def _value(self, idx):
        if not idx:
            return 0.0
        return float(self.kernel.matrix[:, list(idx)].max(axis=1).sum())

    def cf_conditional_gain_bits(self, a, b):
        return float(np.maximum(self.coverage(a) - self.coverage(b), 0.0).sum())

    def cf_mutual_information_bits(self, a, b):
        return float(np.minimum(self.coverage(a), self.coverage(b)).sum())

    def cf_multiset_mi_bits(self, bits):
        best = self.coverage(bits[0])
        for b in bits[1:]:
            best = np.minimum(best, self.coverage(b))
        return float(best.sum())

    def cf_metric_bits(self, a, b):
        return float(np.abs(self.coverage(a) - self.coverage(b)).sum())

    def payload(self) -> dict:
        return {
            "family": self.family,
            "kernel": self.kernel.matrix.tolist(),
            "diagonal_is_one": self.kernel.diagonal_is_one,
        }


class GraphCut(FunctionSpec):
    """f(A) = λ Σ_{i∈Ω} Σ_{a∈A} s_ia − Σ_{a,a'∈A} s_aa' over a symmetric kernel.

    The quadratic term runs over ordered pairs including the diagonal;
    λ ≥ 2 keeps f monotone (and submodularity comes from s ≥ 0).
    """

    family = "graph_cut"

    def __init__(self, kernel: Union[SimilarityKernel, np.ndarray, Sequence], scale: float = 2.0):
        if not isinstance(kernel, SimilarityKernel):
            kernel = SimilarityKernel(kernel)
        if not kernel.is_symmetric():
            raise ValidationError("graph cut requires a symmetric kernel (within 1e-12)")
        if not np.isfinite(scale) or scale < 2.0:
            raise ValidationError(f"graph cut scale must be >= 2, got {scale!r}")
        self.kernel = kernel
        self.scale = float(scale)
        self.n = kernel.n
        self._column_totals = _readonly(kernel.matrix.sum(axis=0))
        self.flags = OracleFlags(True, True, True, True)

    def _cross(self, a: int, b: int) -> float:
        """Σ_{x∈A, y∈B} s_xy (ordered pairs)."""
        if a == 0 or b == 0:
            return 0.0
        ai = list(bit_indices(a))
        bi = list(bit_indices(b))
        return float(self.kernel.matrix[np.ix_(ai, bi)].sum())

    def _value(self, idx):
        if not idx:
            return 0.0
        ids = list(idx)
        linear = float(self._column_totals[ids].sum())
        quad = float(self.kernel.matrix[np.ix_(ids, ids)].sum())
        return self.scale * linear - quad

    def cf_conditional_gain_bits(self, a, b):
        lead = a & ~b
        return self.evaluate_bits(lead) - 2.0 * self._cross(lead, b)

    def cf_mutual_information_bits(self, a, b):
        inter = a & b
        return (
            self.evaluate_bits(inter)
            + 2.0 * self._cross(a, b)
            - 2.0 * self._cross(a | b, inter)
        )

    def cf_metric_bits(self, a, b):
        return self.cf_conditional_gain_bits(a, b) + self.cf_conditional_gain_bits(b, a)

    def payload(self) -> dict:
        return {
            "family": self.family,
            "kernel": self.kernel.matrix.tolist(),
            "diagonal_is_one": self.kernel.diagonal_is_one,
            "scale": self.scale,
        }


class Truncation(FunctionSpec):
    """Uniform matroid rank f(A) = min(|A|, cap).

    Monotone submodular, but its third-order differences change sign, so the
    mutual information it parameterizes is neither submodular nor
    supermodular; the claimed flags record that.
    """

    family = "truncation"

    def __init__(self, cap: int, n: int):
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValidationError(f"ground size must be a positive integer, got {n!r}")
        if not isinstance(cap, int) or isinstance(cap, bool) or not 1 <= cap <= n:
            raise ValidationError(f"cap must satisfy 1 <= cap <= {n}, got {cap!r}")
        self.cap = cap
        self.n = n
        self.flags = OracleFlags(True, True, True, False)

    def _value(self, idx):
        return float(min(len(idx), self.cap))

    def _f(self, bits: int) -> float:
        return float(min(bits.bit_count(), self.cap))

    def cf_conditional_gain_bits(self, a, b):
        return self._f(a | b) - self._f(b)

    def cf_mutual_information_bits(self, a, b):
        if a > b:
            a, b = b, a
        return (self._f(a) + self._f(b)) - self._f(a | b)

    def cf_metric_bits(self, a, b):
        return self.cf_conditional_gain_bits(a, b) + self.cf_conditional_gain_bits(b, a)

    def payload(self) -> dict:
        return {"family": self.family, "cap": self.cap, "n": self.n}


class ConcavePowerModular(FunctionSpec):
    """f(A) = w(A)^a for non-negative weights and exponent a ∈ (0, 1]."""

    family = "concave_power_modular"

    def __init__(self, weights, exponent: float):
        self.weights = _check_weights(weights)
        if not np.isfinite(exponent) or not 0.0 < exponent <= 1.0:
            raise ValidationError(f"exponent must lie in (0, 1], got {exponent!r}")
        self.exponent = float(exponent)
        self.n = int(self.weights.size)
        self.flags = OracleFlags(True, True, True, True)

    def _wsum(self, bits: int) -> float:
        if bits == 0:
            return 0.0
        return float(self.weights[list(bit_indices(bits))].sum())

    def _pow(self, x: float) -> float:
        return float(np.power(x, self.exponent))

    def _value(self, idx):
        if not idx:
            return 0.0
        return self._pow(float(self.weights[list(idx)].sum()))

    def cf_conditional_gain_bits(self, a, b):
        return self._pow(self._wsum(a | b)) - self._pow(self._wsum(b))

    def cf_mutual_information_bits(self, a, b):
        if a > b:
            a, b = b, a
        return (self._pow(self._wsum(a)) + self._pow(self._wsum(b))) - self._pow(self._wsum(a | b))

    def cf_metric_bits(self, a, b):
        return self.cf_conditional_gain_bits(a, b) + self.cf_conditional_gain_bits(b, a)

    def payload(self) -> dict:
        return {
            "family": self.family,
            "weights": self.weights.tolist(),
            "exponent": self.exponent,
        }


class Mixture(FunctionSpec):
    """Non-negative weighted sum of family members over one ground set.

    All measures are linear in f, so each closed form is the weighted sum of
    the component closed forms and exists iff every component has it.
    """

    family = "mixture"

    def __init__(self, components: Sequence[Tuple[float, FunctionSpec]]):
        comps: List[Tuple[float, FunctionSpec]] = []
        for coefficient, spec in components:
            c = float(coefficient)
            if not np.isfinite(c) or c < 0.0:
                raise ValidationError(f"mixture coefficients must be non-negative, got {coefficient!r}")
            if not isinstance(spec, FunctionSpec):
                raise ValidationError("mixture components must be FunctionSpec instances")
            comps.append((c, spec))
        if not comps:
            raise ValidationError("mixture needs at least one component")
        sizes = {spec.n for _, spec in comps}
        if len(sizes) != 1:
            raise ValidationError(f"mixture components disagree on ground size: {sorted(sizes)}")
        self.components = tuple(comps)
        self.n = comps[0][1].n
        self.multiset_closed = all(spec.multiset_closed for _, spec in comps)
        self.flags = OracleFlags(
            normalized=all(s.flags.normalized for _, s in comps),
            monotone=all(s.flags.monotone for _, s in comps),
            submodular=all(s.flags.submodular for _, s in comps),
            second_order_supermodular=all(
                s.flags.second_order_supermodular for _, s in comps
            ),
        )

    def _value(self, idx):
        bits = 0
        for j in idx:
            bits |= 1 << j
        return sum(c * spec.evaluate_bits(bits) for c, spec in self.components)

    def evaluate_bits(self, bits: int) -> float:
        return sum(c * spec.evaluate_bits(bits) for c, spec in self.components)

    def cf_conditional_gain_bits(self, a, b):
        return sum(c * s.cf_conditional_gain_bits(a, b) for c, s in self.components)

    def cf_mutual_information_bits(self, a, b):
        return sum(c * s.cf_mutual_information_bits(a, b) for c, s in self.components)

    def cf_multiset_mi_bits(self, bits):
        return sum(c * s.cf_multiset_mi_bits(bits) for c, s in self.components)

    def cf_metric_bits(self, a, b):
        return sum(c * s.cf_metric_bits(a, b) for c, s in self.components)

    def cf_conditional_mi_bits(self, a, b, c):
        return sum(w * s.cf_conditional_mi_bits(a, b, c) for w, s in self.components)

    def payload(self) -> dict:
        return {
            "family": self.family,
            "components": [
                {"coefficient": c, "function": s.payload()} for c, s in self.components
            ],
        }


# ---------------------------------------------------------------------------
# module-level closed-form operations
# ---------------------------------------------------------------------------


def _check_pair(spec: FunctionSpec, *masks: SubsetMask) -> None:
    first = masks[0]
    for m in masks[1:]:
        first._require_same(m)
    spec._check_subset(first)


def evaluate(spec: FunctionSpec, subset: SubsetMask) -> float:
    """The family formula f(A); ∅ evaluates to 0 for every family."""
    return spec.evaluate(subset)


def closed_form_conditional_gain(spec: FunctionSpec, a: SubsetMask, b: SubsetMask) -> float:
    """Family formula for f(A|B); all seven families have one."""
    _check_pair(spec, a, b)
    return spec.cf_conditional_gain_bits(a.bits, b.bits)


def closed_form_mutual_information(spec: FunctionSpec, a: SubsetMask, b: SubsetMask) -> float:
    """Family formula for I_f(A;B)."""
    _check_pair(spec, a, b)
    x, y = sorted((a.bits, b.bits))
    return spec.cf_mutual_information_bits(x, y)


def closed_form_multiset_mi(spec: FunctionSpec, sets: Sequence[SubsetMask]) -> float:
    """Family formula for I_f(A_1;…;A_k), avoiding the 2^k generic blowup.

    Available for modular, set cover, and facility location on any sets and
    for probabilistic set cover on pairwise-disjoint sets; other families
    only reduce at k ≤ 2.
    """
    if not sets:
        raise ValidationError("multi-set mutual information needs at least one set")
    _check_pair(spec, *sets)
    bits = tuple(sorted(m.bits for m in sets))
    return spec.cf_multiset_mi_bits(bits)


def closed_form_metric(spec: FunctionSpec, a: SubsetMask, b: SubsetMask) -> float:
    """Family formula for D_f(A,B)."""
    _check_pair(spec, a, b)
    x, y = sorted((a.bits, b.bits))
    return spec.cf_metric_bits(x, y)


def closed_form_conditional_mi_prob_cover(
    spec: FunctionSpec, a: SubsetMask, b: SubsetMask, c: SubsetMask
) -> float:
    """Σ_i w_i (1 − P_i(A))(1 − P_i(B)) P_i(C) for pairwise-disjoint A, B, C."""
    _check_pair(spec, a, b, c)
    x, y = sorted((a.bits, b.bits))
    return spec.cf_conditional_mi_bits(x, y, c.bits)


# ---------------------------------------------------------------------------
# measure dispatcher with closed/generic path selection
# ---------------------------------------------------------------------------


def compute_measure(
    spec: FunctionSpec,
    kind: MeasureKind,
    sets: Sequence[SubsetMask],
    conditioning: Optional[SubsetMask] = None,
    path: str = "auto",
    oracle: Optional[ValueOracle] = None,
) -> MeasureResult:
    """Compute one measure for a function family.

    ``path`` is ``"auto"`` (closed form when the family has one, generic
    otherwise), ``"closed_form"`` (error when unavailable), or
    ``"generic"``. The closed path spends zero oracle calls.
    """
    kind = MeasureKind(kind)
    if path not in ("auto", "closed_form", "generic"):
        raise ValidationError(f"unknown path {path!r}")

    if path in ("auto", "closed_form"):
        try:
            value = _closed_value(spec, kind, sets, conditioning)
            return MeasureResult(value, kind, 0, MeasurePath.CLOSED_FORM)
        except ClosedFormUnavailable:
            if path == "closed_form":
                raise
        except PreconditionError:
            if path == "closed_form":
                raise
            # auto falls back to the generic path

    if oracle is None:
        ground = sets[0].ground if sets else spec.ground()
        oracle = spec.oracle(ground)
    return generic_measure(oracle, kind, sets, conditioning)


def _closed_value(
    spec: FunctionSpec,
    kind: MeasureKind,
    sets: Sequence[SubsetMask],
    conditioning: Optional[SubsetMask],
) -> float:
    if kind is MeasureKind.INFO:
        if len(sets) != 1:
            raise ValidationError("information takes exactly one set")
        return evaluate(spec, sets[0])
    if kind is MeasureKind.COND_GAIN:
        if len(sets) != 2:
            raise ValidationError("conditional gain takes exactly two sets")
        return closed_form_conditional_gain(spec, sets[0], sets[1])
    if kind is MeasureKind.MI:
        if len(sets) != 2:
            raise ValidationError("mutual information takes exactly two sets")
        return closed_form_mutual_information(spec, sets[0], sets[1])
    if kind is MeasureKind.MULTI_MI:
        return closed_form_multiset_mi(spec, sets)
    if kind is MeasureKind.VAR_INFO:
        if len(sets) != 2:
            raise ValidationError("variation of information takes exactly two sets")
        return closed_form_metric(spec, sets[0], sets[1])
    if kind is MeasureKind.CMI:
        if len(sets) != 2:
            raise ValidationError("conditional mutual information takes exactly two sets")
        if conditioning is None:
            raise ValidationError("conditional mutual information requires a conditioning set")
        return closed_form_conditional_mi_prob_cover(spec, sets[0], sets[1], conditioning)
    raise ClosedFormUnavailable(f"no closed form is defined for {kind.value}")


# ---------------------------------------------------------------------------
# payload (de)serialization
# ---------------------------------------------------------------------------

FAMILIES: Dict[str, type] = {
    cls.family: cls
    for cls in (
        Modular,
        SetCover,
        ProbabilisticSetCover,
        FacilityLocation,
        GraphCut,
        Truncation,
        ConcavePowerModular,
        Mixture,
    )
}


def _get(payload: dict, key: str, family: str):
    if key not in payload:
        raise ValidationError(f"function.{key}: required for family {family!r}")
    return payload[key]


def family_from_payload(payload: dict) -> FunctionSpec:
    """Build a FunctionSpec from its JSON payload (see ``payload`` methods)."""
    if not isinstance(payload, dict):
        raise ValidationError("function: expected an object")
    family = payload.get("family")
    if family not in FAMILIES:
        raise ValidationError(
            f"function.family: unknown family {family!r}; expected one of {sorted(FAMILIES)}"
        )
    try:
        if family == "modular":
            return Modular(_get(payload, "weights", family))
        if family == "set_cover":
            return SetCover(
                _get(payload, "concepts_per_element", family),
                _get(payload, "concept_weights", family),
            )
        if family == "probabilistic_set_cover":
            return ProbabilisticSetCover(
                _get(payload, "probabilities", family),
                _get(payload, "concept_weights", family),
            )
        if family == "facility_location":
            return FacilityLocation(
                SimilarityKernel(
                    _get(payload, "kernel", family),
                    payload.get("diagonal_is_one", True),
                )
            )
        if family == "graph_cut":
            return GraphCut(
                SimilarityKernel(
                    _get(payload, "kernel", family),
                    payload.get("diagonal_is_one", True),
                ),
                payload.get("scale", 2.0),
            )
        if family == "truncation":
            return Truncation(_get(payload, "cap", family), _get(payload, "n", family))
        if family == "concave_power_modular":
            return ConcavePowerModular(
                _get(payload, "weights", family), _get(payload, "exponent", family)
            )
        components = []
        for i, entry in enumerate(_get(payload, "components", family)):
            if not isinstance(entry, dict) or "coefficient" not in entry or "function" not in entry:
                raise ValidationError(
                    f"function.components[{i}]: expected an object with coefficient and function"
                )
            components.append((entry["coefficient"], family_from_payload(entry["function"])))
        return Mixture(components)
    except (TypeError, KeyError) as exc:
        raise ValidationError(f"function payload for {family!r} is malformed: {exc}") from exc
