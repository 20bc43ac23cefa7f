"""Certify or refute structural claims, curvature, and brute-force oracles.

The checkers are exhaustive-or-nothing: they enumerate every subset below a
size guard and report the worst margin seen, not just a verdict, so near
violations stay visible. A ``Violated`` report always carries a witness that
reproduces the violation when re-evaluated (``reevaluate_witness``).

The enumeration space may be partitioned across worker threads; reports are
merged by an ordered reduction (worst margin, first witness in mask order),
so results are identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DegenerateInstanceError,
    ResourceLimitError,
    ValidationError,
)
from .ground import SubsetMask, bit_indices
from .measures import DEFAULT_TOL, _voi_bits
from .oracle import ValueOracle

#: exhaustive subset enumeration is refused beyond this many elements
DEFAULT_CHECK_LIMIT = 16
BRUTE_FORCE_LIMIT = 20


class Property(str, Enum):
    NORMALIZED = "normalized"
    MONOTONE = "monotone"
    SUBMODULAR = "submodular"
    SECOND_ORDER_SUPERMODULAR = "second_order_supermodular"
    PSEUDO_METRIC_AXIOMS = "pseudo_metric_axioms"


class Verdict(str, Enum):
    HOLDS = "holds"
    VIOLATED = "violated"


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of one exhaustive structural check.

    ``worst_margin`` is the extreme value of the checked quantity: the
    minimum gain (monotone), maximum second difference (submodular), minimum
    third difference (second-order supermodular), f(∅) (normalized), or the
    maximum triangle slack (pseudo-metric axioms).
    """

    property: Property
    verdict: Verdict
    witness: Optional[dict]
    pairs_checked: int
    worst_margin: float
    tol: float


def _require_limit(f: ValueOracle, n_limit: int, what: str) -> int:
    n = f.ground.size
    if n > n_limit:
        raise ResourceLimitError(
            f"{what} enumerates all 2^{n} subsets; n={n} exceeds the limit {n_limit}"
        )
    return n


def _scan_chunks(
    total_masks: int,
    workers: Optional[int],
    scan: Callable[[int, int], Tuple[float, Optional[dict], int]],
    combine: Callable[[float, float], float],
) -> Tuple[float, Optional[dict], int]:
    """Run ``scan`` over [0, total_masks) in contiguous chunks and merge."""
    if not workers or workers <= 1:
        parts = [scan(0, total_masks)]
    else:
        n_chunks = min(workers, total_masks)
        bounds = np.linspace(0, total_masks, n_chunks + 1, dtype=int)
        ranges = [(int(bounds[i]), int(bounds[i + 1])) for i in range(n_chunks)]
        with ThreadPoolExecutor(max_workers=n_chunks) as pool:
            parts = list(pool.map(lambda lohi: scan(*lohi), ranges))
    margin = parts[0][0]
    witness = None
    checked = 0
    for m, w, c in parts:
        margin = combine(margin, m)
        if witness is None and w is not None:
            witness = w
        checked += c
    return margin, witness, checked


def check_normalized(f: ValueOracle, tol: float = DEFAULT_TOL) -> PropertyReport:
    """f(∅) must be exactly zero."""
    value = f.evaluate_bits(0)
    holds = value == 0.0
    return PropertyReport(
        Property.NORMALIZED,
        Verdict.HOLDS if holds else Verdict.VIOLATED,
        None if holds else {"empty_value": value},
        1,
        value,
        tol,
    )


def check_monotone(
    f: ValueOracle,
    n_limit: int = DEFAULT_CHECK_LIMIT,
    tol: float = DEFAULT_TOL,
    workers: Optional[int] = None,
) -> PropertyReport:
    """f(j|S) ≥ −tol for every S and j ∉ S."""
    n = _require_limit(f, n_limit, "monotonicity check")
    full = (1 << n) - 1

    def scan(lo: int, hi: int):
        worst = np.inf
        witness = None
        count = 0
        for mask in range(lo, hi):
            base = f.evaluate_bits(mask)
            missing = full & ~mask
            while missing:
                low = missing & -missing
                j = low.bit_length() - 1
                missing ^= low
                gain = f.evaluate_bits(mask | low) - base
                count += 1
                if gain < worst:
                    worst = gain
                if witness is None and gain < -tol:
                    witness = {"base": list(bit_indices(mask)), "element": j, "gain": gain}
        return worst, witness, count

    worst, witness, checked = _scan_chunks(full + 1, workers, scan, min)
    holds = worst >= -tol
    return PropertyReport(
        Property.MONOTONE,
        Verdict.HOLDS if holds else Verdict.VIOLATED,
        witness if not holds else None,
        checked,
        float(worst),
        tol,
    )


def _second_difference(f: ValueOracle, j: int, k: int, base: int) -> float:
    """f^(2)(j,k;S) = f(S∪{j,k}) − f(S∪j) − f(S∪k) + f(S)."""
    bj, bk = 1 << j, 1 << k
    return (
        f.evaluate_bits(base | bj | bk)
        - f.evaluate_bits(base | bj)
        - f.evaluate_bits(base | bk)
        + f.evaluate_bits(base)
    )


def check_submodular(
    f: ValueOracle,
    n_limit: int = DEFAULT_CHECK_LIMIT,
    tol: float = DEFAULT_TOL,
    workers: Optional[int] = None,
) -> PropertyReport:
    """Second-order differences f^(2)(j,k;S) ≤ tol for all S and j,k ∉ S."""
    n = _require_limit(f, n_limit, "submodularity check")
    full = (1 << n) - 1

    def scan(lo: int, hi: int):
        worst = -np.inf
        witness = None
        count = 0
        for mask in range(lo, hi):
            outside = bit_indices(full & ~mask)
            for x in range(len(outside)):
                for y in range(x + 1, len(outside)):
                    j, k = outside[x], outside[y]
                    d2 = _second_difference(f, j, k, mask)
                    count += 1
                    if d2 > worst:
                        worst = d2
                    if witness is None and d2 > tol:
                        witness = {
                            "base": list(bit_indices(mask)),
                            "j": j,
                            "k": k,
                            "second_difference": d2,
                        }
        return worst, witness, count

    worst, witness, checked = _scan_chunks(full + 1, workers, scan, max)
    holds = worst <= tol
    return PropertyReport(
        Property.SUBMODULAR,
        Verdict.HOLDS if holds else Verdict.VIOLATED,
        witness if not holds else None,
        checked,
        float(worst),
        tol,
    )


def check_second_order_supermodular(
    f: ValueOracle,
    n_limit: int = DEFAULT_CHECK_LIMIT,
    tol: float = DEFAULT_TOL,
    workers: Optional[int] = None,
) -> PropertyReport:
    """Third-order differences f^(3)(i,j,k;A) ≥ −tol for all A, distinct i,j,k ∉ A.

    Equivalently, f^(2)(j,k;·) is monotone non-decreasing, which is exactly
    the condition under which A ↦ I_f(A;B) is submodular for every fixed B.
    """
    n = _require_limit(f, n_limit, "second-order supermodularity check")
    full = (1 << n) - 1

    def scan(lo: int, hi: int):
        worst = np.inf
        witness = None
        count = 0
        for mask in range(lo, hi):
            outside = bit_indices(full & ~mask)
            for i in outside:
                with_i = mask | (1 << i)
                rest = [e for e in outside if e != i]
                for x in range(len(rest)):
                    for y in range(x + 1, len(rest)):
                        j, k = rest[x], rest[y]
                        d3 = _second_difference(f, j, k, with_i) - _second_difference(
                            f, j, k, mask
                        )
                        count += 1
                        if d3 < worst:
                            worst = d3
                        if witness is None and d3 < -tol:
                            witness = {
                                "base": list(bit_indices(mask)),
                                "i": i,
                                "j": j,
                                "k": k,
                                "third_difference": d3,
                            }
        return worst, witness, count

    worst, witness, checked = _scan_chunks(full + 1, workers, scan, min)
    holds = worst >= -tol
    return PropertyReport(
        Property.SECOND_ORDER_SUPERMODULAR,
        Verdict.HOLDS if holds else Verdict.VIOLATED,
        witness if not holds else None,
        checked,
        float(worst),
        tol,
    )


def check_pseudometric_axioms(
    f: ValueOracle,
    n_limit: int = 8,
    tol: float = DEFAULT_TOL,
) -> PropertyReport:
    """Non-negativity, symmetry, zero self-distance, and the triangle
    inequality of D_f over every subset pair/triple."""
    n = _require_limit(f, n_limit, "pseudo-metric check")
    m = 1 << n
    table = np.zeros((m, m))
    for a in range(m):
        for b in range(a + 1, m):
            table[a, b] = table[b, a] = _voi_bits(f, a, b)
    worst_negative = float(table.min())
    worst_diagonal = float(np.abs(np.diagonal(table)).max())
    checked = m * m

    worst_triangle = -np.inf
    witness = None
    for a in range(m):
        # slack[b, c] = D(a,c) − D(a,b) − D(b,c)
        slack = table[a][None, :] - table[a][:, None] - table
        checked += m * m
        peak = float(slack.max())
        if peak > worst_triangle:
            worst_triangle = peak
        if witness is None and peak > tol:
            b, c = np.argwhere(slack > tol)[0]
            witness = {
                "a": list(bit_indices(a)),
                "b": list(bit_indices(int(b))),
                "c": list(bit_indices(int(c))),
                "axiom": "triangle",
                "slack": float(slack[b, c]),
            }

    if worst_negative < -tol and witness is None:
        a, b = np.argwhere(table < -tol)[0]
        witness = {
            "a": list(bit_indices(int(a))),
            "b": list(bit_indices(int(b))),
            "axiom": "non_negativity",
            "slack": float(-table[a, b]),
        }
    if worst_diagonal > tol and witness is None:
        a = int(np.argmax(np.abs(np.diagonal(table))))
        witness = {"a": list(bit_indices(a)), "axiom": "identity", "slack": worst_diagonal}

    holds = worst_triangle <= tol and worst_negative >= -tol and worst_diagonal <= tol
    return PropertyReport(
        Property.PSEUDO_METRIC_AXIOMS,
        Verdict.HOLDS if holds else Verdict.VIOLATED,
        witness if not holds else None,
        checked,
        float(worst_triangle),
        tol,
    )


def reevaluate_witness(f: ValueOracle, report: PropertyReport) -> float:
    """Recompute a violated report's witnessed quantity from scratch."""
    if report.witness is None:
        raise ValidationError("report carries no witness")
    w = report.witness
    to_bits = lambda ids: sum(1 << i for i in ids)
    if report.property is Property.NORMALIZED:
        return f.evaluate_bits(0)
    if report.property is Property.MONOTONE:
        return f.gain_bits(w["element"], to_bits(w["base"]))
    if report.property is Property.SUBMODULAR:
        return _second_difference(f, w["j"], w["k"], to_bits(w["base"]))
    if report.property is Property.SECOND_ORDER_SUPERMODULAR:
        base = to_bits(w["base"])
        return _second_difference(f, w["j"], w["k"], base | (1 << w["i"])) - _second_difference(
            f, w["j"], w["k"], base
        )
    if report.property is Property.PSEUDO_METRIC_AXIOMS:
        a, b = to_bits(w["a"]), to_bits(w["b"])
        if w["axiom"] == "triangle":
            c = to_bits(w["c"])
            return _voi_bits(f, a, c) - _voi_bits(f, a, b) - _voi_bits(f, b, c)
        if w["axiom"] == "non_negativity":
            return -_voi_bits(f, a, b)
        return abs(_voi_bits(f, a, a))
    raise ValidationError(f"unknown property {report.property!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------


@dataclass
class CurvatureReport:
    """Curvature quantities of a monotone submodular oracle.

    * ``kappa_global``: κ = 1 − min_j f(j | Ω∖j) / f(j)
    * ``kappa_at(A)``:  1 − min_{j∈A} f(j | A∖j) / f(j)
    * ``sym_kappa_at(A)``: max_{j∉A} f(j | Ω∖(A∪j)) / f(j), the slack rate of
      the symmetric-MI objective's approximate monotonicity.

    Dummy elements (f(j) = 0, hence f(j|X) = 0 everywhere) are excluded from
    every min/max; a subset with no usable elements gets value 0. Maps are
    filled on demand and memoized.
    """

    kappa_global: float
    dummies: Tuple[int, ...]
    kappa_at_map: Dict[int, float] = field(default_factory=dict)
    sym_kappa_at_map: Dict[int, float] = field(default_factory=dict)
    _f: ValueOracle = field(default=None, repr=False)
    _singletons: Tuple[float, ...] = field(default=(), repr=False)

    def kappa_at(self, subset: SubsetMask) -> float:
        bits = subset.bits if isinstance(subset, SubsetMask) else int(subset)
        if bits not in self.kappa_at_map:
            self.kappa_at_map[bits] = self._kappa_at_bits(bits)
        return self.kappa_at_map[bits]

    def sym_kappa_at(self, subset: SubsetMask) -> float:
        bits = subset.bits if isinstance(subset, SubsetMask) else int(subset)
        if bits not in self.sym_kappa_at_map:
            self.sym_kappa_at_map[bits] = self._sym_kappa_at_bits(bits)
        return self.sym_kappa_at_map[bits]

    def _kappa_at_bits(self, bits: int) -> float:
        best = None
        for j in bit_indices(bits):
            fj = self._singletons[j]
            if fj == 0.0:
                continue
            ratio = self._f.gain_bits(j, bits & ~(1 << j)) / fj
            if best is None or ratio < best:
                best = ratio
        return 0.0 if best is None else 1.0 - best

    def _sym_kappa_at_bits(self, bits: int) -> float:
        full = self._f.ground.full_bits
        worst = None
        for j in bit_indices(full & ~bits):
            fj = self._singletons[j]
            if fj == 0.0:
                continue
            ratio = self._f.gain_bits(j, full & ~(bits | (1 << j))) / fj
            if worst is None or ratio > worst:
                worst = ratio
        return 0.0 if worst is None else worst


def curvature(f: ValueOracle) -> CurvatureReport:
    """Compute curvature for a monotone oracle (n gains per quantity)."""
    n = f.ground.size
    singletons = tuple(f.evaluate_bits(1 << j) for j in range(n))
    dummies = tuple(j for j, v in enumerate(singletons) if v == 0.0)
    if len(dummies) == n:
        raise DegenerateInstanceError(
            "every element has f(j) = 0; curvature is undefined on an all-dummy instance"
        )
    report = CurvatureReport(0.0, dummies, _f=f, _singletons=singletons)
    report.kappa_global = report.kappa_at(f.ground.full_bits)
    return report


# ---------------------------------------------------------------------------
# brute-force oracles
# ---------------------------------------------------------------------------


def brute_force_max(objective: ValueOracle, k: int) -> Tuple[SubsetMask, float]:
    """Exact argmax of the objective over subsets of size ≤ k.

    Enumerates masks in ascending order and keeps strict improvements, so
    ties resolve to the smallest mask value.
    """
    n = objective.ground.size
    if n > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(f"brute force enumerates 2^{n} subsets; limit is n <= {BRUTE_FORCE_LIMIT}")
    if k < 0:
        raise ValidationError("budget must be non-negative")
    best_bits = 0
    best_value = objective.evaluate_bits(0)
    for bits in range(1, (1 << n)):
        if bits.bit_count() > k:
            continue
        value = objective.evaluate_bits(bits)
        if value > best_value:
            best_bits, best_value = bits, value
    return SubsetMask(objective.ground, best_bits), best_value


def brute_force_min_metric_sum(
    f: ValueOracle, anchors: Sequence[SubsetMask]
) -> Tuple[SubsetMask, float]:
    """Exact minimizer of Σ_i D_f(A, S_i) over all subsets A.

    Ties resolve to the smallest mask value.
    """
    if not anchors:
        raise ValidationError("at least one anchor set is required")
    for s in anchors:
        if s.ground is not f.ground and s.ground != f.ground:
            raise ValidationError("anchors must live in the oracle's ground set")
    n = f.ground.size
    if n > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(f"brute force enumerates 2^{n} subsets; limit is n <= {BRUTE_FORCE_LIMIT}")
    anchor_bits = [s.bits for s in anchors]
    best_bits = 0
    best_value = sum(_voi_bits(f, 0, s) for s in anchor_bits)
    for bits in range(1, (1 << n)):
        value = sum(_voi_bits(f, bits, s) for s in anchor_bits)
        if value < best_value:
            best_bits, best_value = bits, value
    return SubsetMask(f.ground, best_bits), best_value
