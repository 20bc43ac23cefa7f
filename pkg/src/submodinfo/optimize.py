"""Greedy-family optimizers and application drivers.

Selection drivers (budgeted subset choice):

* ``greedy_max``             accelerated (lazy) greedy for monotone submodular objectives
* ``randomized_greedy_max``  randomized greedy for possibly non-monotone submodular
                             objectives; exactly-k candidate pools with zero-gain
                             dummy pads, giving OPT/e in expectation
* ``symmetric_mi_select``    maximize I_f(A; Ω∖A) under a cardinality budget
* ``smi_max``                maximize I_f(A;Q) + λ·g(A)          (query-driven)
* ``cg_max``                 maximize λ·g(A) + f(A|P)            (privacy-driven)
* ``csmi_max``               maximize I_f(A;Q|P) + λ·g(A)        (both)
* ``nsmi_max``               documented rejection path, see its docstring

Partitioning and metric drivers:

* ``partition_total_correlation``  greedy welfare (max) / multiway-style (min)
* ``partition_multiset_mi_max``    greedy seeding plus exchange local search
* ``minimize_metric_sum``          exact or additive-Hamming-surrogate centroid

Structural requirements are controlled by ``OptimizerConfig.guard``: trust
explicit oracle claims, verify them exhaustively at desk scale, or skip the
check. They are never assumed silently.

Determinism: a fixed seed and instance yield byte-identical reports. Ties in
every greedy loop break toward the smallest element index; randomness comes
from one seeded generator consumed in a fixed sequence.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .analysis import (
    check_monotone,
    check_second_order_supermodular,
    check_submodular,
    curvature,
)
from .errors import (
    DegenerateInstanceError,
    ResourceLimitError,
    StructuralError,
    ValidationError,
)
from .functions import FunctionSpec
from .ground import GroundSet, SubsetMask, bit_indices
from .measures import _cg_bits, _cmi_bits, _mi_bits, _multiset_bits, _tc_bits, _voi_bits
from .measures import MULTISET_MAX_SETS
from .oracle import OracleFlags, ValueOracle

GREEDY_FACTOR = 1.0 - 1.0 / math.e
#: strict improvement threshold for the exchange local search
LOCAL_SEARCH_EPS = 1e-12


class Guard(str, Enum):
    TRUST_FLAGS = "trust_flags"
    VERIFY_AT_DESK_SCALE = "verify_at_desk_scale"
    UNCHECKED = "unchecked"


class Direction(str, Enum):
    MAX = "max"
    MIN = "min"


@dataclass(frozen=True)
class OptimizerConfig:
    """Budget, seed, and structural-verification policy for one run."""

    k: int
    seed: int = 0
    lazy: bool = True
    guard: Guard = Guard.TRUST_FLAGS
    verify_limit: int = 16

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise ValidationError(f"budget k must be a positive integer, got {self.k!r}")
        if self.verify_limit < 1:
            raise ValidationError("verify_limit must be positive")


@dataclass(frozen=True)
class SelectionReport:
    """Output of a selection driver.

    ``gain_trace`` records (element, marginal gain) per step; a ``None``
    element marks a dummy (no-op) step of the randomized greedy. The
    ``guarantee`` record carries the approximation factor and any slack
    terms; entries are indicative when they depend on the selected rather
    than the optimal set.
    """

    chosen: SubsetMask
    objective_value: float
    gain_trace: Tuple[Tuple[Optional[int], float], ...]
    guarantee: Optional[dict]
    oracle_calls: int
    seed: Optional[int] = None
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PartitionReport:
    """Output of a partitioning driver: disjoint blocks covering the ground set."""

    blocks: Tuple[SubsetMask, ...]
    objective: float
    objective_kind: str
    direction: Direction
    seed: Optional[int] = None
    oracle_calls: int = 0
    extras: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# structural guard
# ---------------------------------------------------------------------------

_CHECKERS = {
    "monotone": (check_monotone, "monotone"),
    "submodular": (check_submodular, "submodular"),
    "second_order_supermodular": (
        check_second_order_supermodular,
        "second-order supermodular",
    ),
}


def _ensure_structure(
    f: ValueOracle, cfg: OptimizerConfig, required: Sequence[str], role: str
) -> None:
    if cfg.guard is Guard.UNCHECKED:
        return
    if cfg.guard is Guard.TRUST_FLAGS:
        missing = [name for name in required if not getattr(f.flags, name)]
        if missing:
            raise StructuralError(
                f"{role} does not claim {', '.join(missing)}; claim the flags, "
                "verify at desk scale, or run unchecked"
            )
        return
    n = f.ground.size
    if n > cfg.verify_limit:
        raise ResourceLimitError(
            f"cannot verify {role} exhaustively at n={n} (limit {cfg.verify_limit}); "
            "trust the flags or run unchecked"
        )
    for name in required:
        checker, label = _CHECKERS[name]
        report = checker(f, n_limit=cfg.verify_limit)
        if report.verdict.value != "holds":
            raise StructuralError(
                f"{role} is not {label}; witness: {report.witness}"
            )


def _validate_budget(f: ValueOracle, cfg: OptimizerConfig) -> int:
    n = f.ground.size
    if cfg.k > n:
        raise ValidationError(f"budget k={cfg.k} exceeds the ground-set size n={n}")
    return n


# ---------------------------------------------------------------------------
# core greedy loops
# ---------------------------------------------------------------------------


def greedy_max(objective: ValueOracle, cfg: OptimizerConfig) -> SelectionReport:
    """Greedy maximization of a monotone submodular objective.

    Runs the accelerated variant by default: a max-heap of stale upper
    bounds, re-validated on pop, which is sound exactly because marginal
    gains of a submodular function only shrink. Stops early once the best
    available gain is non-positive, so |chosen| = min(k, #elements with
    positive gain at selection time). Achieves a 1 − 1/e factor under the
    guard-checked hypotheses.
    """
    _ensure_structure(objective, cfg, ("monotone", "submodular"), "objective")
    n = _validate_budget(objective, cfg)
    before = objective.evaluations
    if cfg.lazy:
        chosen_bits, trace = _lazy_greedy(objective, cfg.k, n)
    else:
        chosen_bits, trace = _plain_greedy(objective, cfg.k, n)
    value = objective.evaluate_bits(chosen_bits)
    return SelectionReport(
        chosen=SubsetMask(objective.ground, chosen_bits),
        objective_value=value,
        gain_trace=tuple(trace),
        guarantee={"factor": GREEDY_FACTOR},
        oracle_calls=objective.evaluations - before,
        seed=None,
    )


def _lazy_greedy(objective: ValueOracle, k: int, n: int):
    base = objective.evaluate_bits(0)
    heap = []
    for j in range(n):
        heap.append((-(objective.evaluate_bits(1 << j) - base), j, 0))
    heapq.heapify(heap)
    chosen = 0
    current = base
    trace: List[Tuple[int, float]] = []
    while len(trace) < k and heap:
        neg_gain, j, stamp = heapq.heappop(heap)
        if stamp == len(trace):
            gain = -neg_gain
            if gain <= 0.0:
                break
            chosen |= 1 << j
            current = objective.evaluate_bits(chosen)
            trace.append((j, gain))
        else:
            gain = objective.evaluate_bits(chosen | (1 << j)) - current
            heapq.heappush(heap, (-gain, j, len(trace)))
    return chosen, trace


def _plain_greedy(objective: ValueOracle, k: int, n: int):
    chosen = 0
    current = objective.evaluate_bits(0)
    remaining = list(range(n))
    trace: List[Tuple[int, float]] = []
    for _ in range(k):
        best_j = None
        best_gain = 0.0
        for j in remaining:
            gain = objective.evaluate_bits(chosen | (1 << j)) - current
            if gain > best_gain:
                best_gain, best_j = gain, j
        if best_j is None:
            break
        chosen |= 1 << best_j
        remaining.remove(best_j)
        current = objective.evaluate_bits(chosen)
        trace.append((best_j, best_gain))
    return chosen, trace


def randomized_greedy_max(objective: ValueOracle, cfg: OptimizerConfig) -> SelectionReport:
    """Randomized greedy for cardinality-constrained submodular maximization.

    Each of the k steps ranks the remaining elements by marginal gain, keeps
    the positive-gain candidates, pads the pool with dummy (zero-gain)
    elements up to exactly k entries, and samples one uniformly. A sampled
    dummy consumes the step without selecting anything. The exactly-k pool
    is what yields the 1/e expectation for non-monotone objectives.
    """
    _ensure_structure(objective, cfg, ("submodular",), "objective")
    n = _validate_budget(objective, cfg)
    before = objective.evaluations
    rng = np.random.default_rng(cfg.seed)
    chosen = 0
    current = objective.evaluate_bits(0)
    remaining = list(range(n))
    trace: List[Tuple[Optional[int], float]] = []
    for _ in range(cfg.k):
        pool = []
        for j in remaining:
            gain = objective.evaluate_bits(chosen | (1 << j)) - current
            if gain > 0.0:
                pool.append((-gain, j))
        pool.sort()
        pool = pool[: cfg.k]
        draw = int(rng.integers(cfg.k))
        if draw < len(pool):
            neg_gain, j = pool[draw]
            chosen |= 1 << j
            remaining.remove(j)
            current = objective.evaluate_bits(chosen)
            trace.append((j, -neg_gain))
        else:
            trace.append((None, 0.0))
    return SelectionReport(
        chosen=SubsetMask(objective.ground, chosen),
        objective_value=current,
        gain_trace=tuple(trace),
        guarantee={"expected_factor": 1.0 / math.e},
        oracle_calls=objective.evaluations - before,
        seed=cfg.seed,
    )


# ---------------------------------------------------------------------------
# objective builders (exposed for exhaustive reduction tests)
# ---------------------------------------------------------------------------


def _diversity_term(diversity: Optional[ValueOracle], tradeoff: float):
    if tradeoff < 0.0:
        raise ValidationError("tradeoff weight must be non-negative")
    if tradeoff > 0.0 and diversity is None:
        raise ValidationError("a diversity function is required when the tradeoff weight is positive")


def symmetric_mi_objective(f: ValueOracle) -> ValueOracle:
    """g(A) = I_f(A; Ω∖A); submodular, non-monotone, g(∅) = g(Ω) = 0."""
    full = f.ground.full_bits

    def fn(subset: SubsetMask) -> float:
        return _mi_bits(f, subset.bits, full ^ subset.bits)

    return ValueOracle(
        fn,
        f.ground,
        flags=OracleFlags(normalized=True, submodular=True),
        name="symmetric_mi",
    )


def smi_objective(
    f: ValueOracle,
    query: SubsetMask,
    diversity: Optional[ValueOracle] = None,
    tradeoff: float = 0.0,
) -> ValueOracle:
    """h(A) = I_f(A;Q) + λ·g(A)."""
    _diversity_term(diversity, tradeoff)
    qbits = query.bits

    def fn(subset: SubsetMask) -> float:
        value = _mi_bits(f, subset.bits, qbits)
        extra = tradeoff * diversity.evaluate_bits(subset.bits) if diversity is not None else 0.0
        return value + extra

    return ValueOracle(
        fn, f.ground, flags=OracleFlags(normalized=True, monotone=True, submodular=True), name="smi"
    )


def cg_objective(
    f: ValueOracle,
    private: SubsetMask,
    diversity: Optional[ValueOracle] = None,
    tradeoff: float = 0.0,
) -> ValueOracle:
    """h(A) = λ·g(A) + f(A|P)."""
    _diversity_term(diversity, tradeoff)
    pbits = private.bits

    def fn(subset: SubsetMask) -> float:
        extra = tradeoff * diversity.evaluate_bits(subset.bits) if diversity is not None else 0.0
        return extra + _cg_bits(f, subset.bits, pbits)

    return ValueOracle(
        fn, f.ground, flags=OracleFlags(normalized=True, monotone=True, submodular=True), name="cg"
    )


def csmi_objective(
    f: ValueOracle,
    query: SubsetMask,
    private: SubsetMask,
    diversity: Optional[ValueOracle] = None,
    tradeoff: float = 0.0,
) -> ValueOracle:
    """h(A) = I_f(A;Q|P) + λ·g(A).

    When Q ∪ P = Ω the conditional mutual information collapses to f(A|P)
    identically, and the builder applies that identity so the reduction to
    the conditional-gain objective is bit-exact; with P = ∅ the conditional
    measure itself reduces exactly to I_f(A;Q).
    """
    _diversity_term(diversity, tradeoff)
    qbits, pbits = query.bits, private.bits
    collapses_to_gain = (qbits | pbits) == f.ground.full_bits

    def fn(subset: SubsetMask) -> float:
        if collapses_to_gain:
            value = _cg_bits(f, subset.bits, pbits)
        else:
            value = _cmi_bits(f, subset.bits, qbits, pbits)
        extra = tradeoff * diversity.evaluate_bits(subset.bits) if diversity is not None else 0.0
        return value + extra

    return ValueOracle(
        fn, f.ground, flags=OracleFlags(normalized=True, monotone=True, submodular=True), name="csmi"
    )


# ---------------------------------------------------------------------------
# application drivers
# ---------------------------------------------------------------------------


def _inner(cfg: OptimizerConfig) -> OptimizerConfig:
    # driver-level guards already ran; composite objectives carry derived claims
    return replace(cfg, guard=Guard.TRUST_FLAGS)


def _check_masks(f: ValueOracle, *masks: SubsetMask) -> None:
    for m in masks:
        if m.ground is not f.ground and m.ground != f.ground:
            raise ValidationError("driver sets must live in the oracle's ground set")


def symmetric_mi_select(f: ValueOracle, cfg: OptimizerConfig) -> SelectionReport:
    """Maximize I_f(A; Ω∖A) for |A| ≤ k with the randomized greedy.

    The objective is submodular but not monotone, so the randomized greedy
    supplies the 1/e expectation. The approximate-monotonicity analysis
    assumes f(j) ≤ 1 per element; the driver notes the rescaling factor that
    makes it hold (chosen sets are invariant to positive scaling because
    I_{c·f} = c·I_f) and reports the curvature slack k·κ_f(Â) at the
    selected set — indicative, since the optimum's curvature is unknowable
    at runtime.
    """
    _ensure_structure(f, cfg, ("monotone", "submodular"), "base function")
    n = _validate_budget(f, cfg)
    singletons = [f.evaluate_bits(1 << j) for j in range(n)]
    scale = max(1.0, max(singletons))
    report = randomized_greedy_max(symmetric_mi_objective(f), _inner(cfg))
    try:
        kappa = curvature(f).sym_kappa_at(report.chosen)
    except DegenerateInstanceError:
        kappa = 0.0
    guarantee = {
        "factor": GREEDY_FACTOR,
        "expected_factor": 1.0 / math.e,
        "sym_kappa_at_selected": kappa,
        "slack_scaled_units": cfg.k * kappa,
        "scale": scale,
    }
    return replace(report, guarantee=guarantee, extras={"scale": scale})


def smi_max(
    f: ValueOracle,
    g: Optional[ValueOracle],
    query: SubsetMask,
    tradeoff: float,
    cfg: OptimizerConfig,
) -> SelectionReport:
    """Query-driven selection: maximize I_f(A;Q) + λ·g(A).

    Requires second-order supermodular f (so I_f(·;Q) is submodular) and
    monotone submodular g; the composite is then monotone submodular and the
    lazy greedy earns 1 − 1/e.
    """
    _check_masks(f, query)
    _ensure_structure(
        f, cfg, ("monotone", "submodular", "second_order_supermodular"), "information function"
    )
    if g is not None:
        _ensure_structure(g, cfg, ("monotone", "submodular"), "diversity function")
    objective = smi_objective(f, query, g, tradeoff)
    report = greedy_max(objective, _inner(cfg))
    return replace(report, extras={"tradeoff": tradeoff, "query": list(query.indices())})


def cg_max(
    f: ValueOracle,
    g: Optional[ValueOracle],
    private: SubsetMask,
    tradeoff: float,
    cfg: OptimizerConfig,
) -> SelectionReport:
    """Privacy-driven selection: maximize λ·g(A) + f(A|P).

    The conditional gain is monotone submodular in A whenever f is, so this
    needs no third-order condition and always earns 1 − 1/e.
    """
    _check_masks(f, private)
    _ensure_structure(f, cfg, ("monotone", "submodular"), "information function")
    if g is not None:
        _ensure_structure(g, cfg, ("monotone", "submodular"), "diversity function")
    objective = cg_objective(f, private, g, tradeoff)
    report = greedy_max(objective, _inner(cfg))
    return replace(report, extras={"tradeoff": tradeoff, "private": list(private.indices())})


def csmi_max(
    f: ValueOracle,
    g: Optional[ValueOracle],
    query: SubsetMask,
    private: SubsetMask,
    tradeoff: float,
    cfg: OptimizerConfig,
) -> SelectionReport:
    """Joint query/privacy selection: maximize I_f(A;Q|P) + λ·g(A).

    Reductions hold exactly: Q = Ω gives the conditional-gain objective,
    P = ∅ gives the query objective, and both give f(A) + λ·g(A).
    """
    _check_masks(f, query, private)
    _ensure_structure(
        f, cfg, ("monotone", "submodular", "second_order_supermodular"), "information function"
    )
    if g is not None:
        _ensure_structure(g, cfg, ("monotone", "submodular"), "diversity function")
    objective = csmi_objective(f, query, private, g, tradeoff)
    report = greedy_max(objective, _inner(cfg))
    return replace(
        report,
        extras={
            "tradeoff": tradeoff,
            "query": list(query.indices()),
            "private": list(private.indices()),
        },
    )


def nsmi_max(
    f: ValueOracle,
    g: Optional[ValueOracle],
    private: SubsetMask,
    tradeoff: float,
    cfg: OptimizerConfig,
) -> SelectionReport:
    """Rejected formulation: maximize λ·g(A) − I_f(A;P).

    For every function family shipped here the third-order differences are
    non-negative, which makes I_f(·;P) submodular and this objective a
    difference of submodular functions — a problem with no polynomial-time
    approximation factor in the worst case. The driver therefore refuses to
    run and points at the conditional-gain formulation, which pursues the
    same goal (a selection unlike P) with a 1 − 1/e guarantee.
    """
    raise StructuralError(
        "maximizing tradeoff*g(A) - I_f(A;P) is a difference of submodular functions "
        "whenever f has non-negative third-order differences (true for every shipped "
        "family); no constant-factor algorithm exists in the worst case. Use cg_max, "
        "which maximizes tradeoff*g(A) + f(A|P) with a 1-1/e guarantee."
    )


# ---------------------------------------------------------------------------
# partitioning
# ---------------------------------------------------------------------------


def _validate_parts(n: int, k_parts: int) -> None:
    if not isinstance(k_parts, int) or isinstance(k_parts, bool) or k_parts < 2:
        raise ValidationError(f"k_parts must be an integer >= 2, got {k_parts!r}")
    if k_parts > n:
        raise ValidationError(f"k_parts={k_parts} exceeds the ground-set size n={n}")


def partition_total_correlation(
    f: ValueOracle,
    k_parts: int,
    direction: Union[Direction, str] = Direction.MAX,
    seed: int = 0,
    guard: Guard = Guard.TRUST_FLAGS,
    verify_limit: int = 16,
) -> PartitionReport:
    """Greedy partition heuristics for the total correlation C_f.

    Maximizing C_f over partitions is the welfare problem shifted by the
    constant f(Ω); the driver assigns elements in seeded random order to the
    block with the largest marginal gain (≥ 1/2 of the optimal welfare).
    Minimizing assigns to the smallest marginal gain instead (multiway-
    partition flavor, shipped as a heuristic with no factor asserted).
    """
    direction = Direction(direction)
    cfg = OptimizerConfig(k=1, seed=seed, guard=guard, verify_limit=verify_limit)
    _ensure_structure(f, cfg, ("monotone", "submodular"), "partition objective")
    n = f.ground.size
    _validate_parts(n, k_parts)
    before = f.evaluations
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    blocks = [0] * k_parts
    for j in order:
        j = int(j)
        best_t = 0
        best_gain = f.gain_bits(j, blocks[0])
        for t in range(1, k_parts):
            gain = f.gain_bits(j, blocks[t])
            if (direction is Direction.MAX and gain > best_gain) or (
                direction is Direction.MIN and gain < best_gain
            ):
                best_gain, best_t = gain, t
        blocks[best_t] |= 1 << j
    objective = _tc_bits(f, sorted(blocks))
    return PartitionReport(
        blocks=tuple(SubsetMask(f.ground, b) for b in blocks),
        objective=objective,
        objective_kind="total_correlation",
        direction=direction,
        seed=seed,
        oracle_calls=f.evaluations - before,
    )


def partition_multiset_mi_max(
    f: Union[FunctionSpec, ValueOracle],
    k_parts: int,
    seed: int = 0,
    max_moves_factor: int = 10,
) -> PartitionReport:
    """Maximize the multi-set mutual information over partitions (robust
    partitioning flavor): seeded greedy assignment of each element to the
    block whose MI increase is largest, then single-element exchange local
    search until no move improves (capped at ``max_moves_factor``·n moves).

    Uses the family's multi-set closed form when available (modular, set
    cover, facility location, and probabilistic set cover — partition blocks
    are always disjoint); otherwise the generic path, which caps k_parts at
    the exponential-enumeration limit. Heuristic: no factor is asserted.
    """
    spec: Optional[FunctionSpec] = None
    if isinstance(f, FunctionSpec):
        spec = f
        oracle = f.oracle()
    else:
        oracle = f
    n = oracle.ground.size
    _validate_parts(n, k_parts)
    use_closed = spec is not None and spec.multiset_closed
    if not use_closed and k_parts > MULTISET_MAX_SETS:
        raise ResourceLimitError(
            f"generic multi-set objective is exponential in k_parts; got {k_parts} > {MULTISET_MAX_SETS}"
        )
    before = oracle.evaluations

    if use_closed:
        evaluate = lambda blocks: spec.cf_multiset_mi_bits(tuple(sorted(blocks)))
    else:
        evaluate = lambda blocks: _multiset_bits(oracle, tuple(sorted(blocks)))

    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    blocks = [0] * k_parts
    current = evaluate(blocks)
    for j in order:
        j = int(j)
        bit = 1 << j
        best = None  # (delta, block size, index)
        for t in range(k_parts):
            trial = list(blocks)
            trial[t] |= bit
            delta = evaluate(trial) - current
            key = (-delta, blocks[t].bit_count(), t)
            if best is None or key < best[0]:
                best = (key, t)
        t = best[1]
        blocks[t] |= bit
        current = evaluate(blocks)

    # first-improvement exchange local search
    moves = 0
    move_cap = max_moves_factor * n
    improved = True
    while improved and moves < move_cap:
        improved = False
        for j in range(n):
            bit = 1 << j
            home = next(t for t in range(k_parts) if blocks[t] & bit)
            for t in range(k_parts):
                if t == home:
                    continue
                trial = list(blocks)
                trial[home] &= ~bit
                trial[t] |= bit
                value = evaluate(trial)
                if value > current + LOCAL_SEARCH_EPS:
                    blocks = trial
                    current = value
                    moves += 1
                    improved = True
                    break
            if moves >= move_cap:
                break
    return PartitionReport(
        blocks=tuple(SubsetMask(oracle.ground, b) for b in blocks),
        objective=current,
        objective_kind="multiset_mutual_information",
        direction=Direction.MAX,
        seed=seed,
        oracle_calls=oracle.evaluations - before,
        extras={"local_search_moves": moves, "closed_form": use_closed},
    )


# ---------------------------------------------------------------------------
# metric-sum minimization
# ---------------------------------------------------------------------------

METRIC_MIN_LIMIT = 20


def minimize_metric_sum(
    f: Union[FunctionSpec, ValueOracle],
    anchors: Sequence[SubsetMask],
    mode: str = "surrogate",
) -> SelectionReport:
    """Find A minimizing Σ_i D_f(A, S_i) over all subsets.

    ``mode="exact"`` enumerates the true objective. ``mode="surrogate"``
    enumerates the additive submodular Hamming sum Σ_i f(A∖S_i) + f(S_i∖A),
    whose exact minimizer carries a 1/(1−κ_f) factor for the true objective
    when the curvature κ_f < 1; with κ_f = 1 the factor is vacuous and the
    report flags it. Both enumerations are exhaustive at desk scale, which
    is all the factor's proof needs (exact minimization of the surrogate);
    plugging in a general submodular-function minimizer is an extension
    point, not a requirement, at n ≤ 20.
    """
    if mode not in ("exact", "surrogate"):
        raise ValidationError(f"mode must be 'exact' or 'surrogate', got {mode!r}")
    spec: Optional[FunctionSpec] = None
    if isinstance(f, FunctionSpec):
        spec = f
        oracle = f.oracle()
    else:
        oracle = f
    if not anchors:
        raise ValidationError("at least one anchor set is required")
    _check_masks(oracle, *anchors)
    n = oracle.ground.size
    if n > METRIC_MIN_LIMIT:
        raise ResourceLimitError(
            f"metric minimization enumerates 2^{n} subsets; limit is n <= {METRIC_MIN_LIMIT}"
        )
    anchor_bits = [s.bits for s in anchors]
    before = oracle.evaluations

    if spec is not None:
        metric = lambda a, s: spec.cf_metric_bits(*sorted((a, s)))
    else:
        metric = lambda a, s: _voi_bits(oracle, a, s)

    def true_sum(bits: int) -> float:
        return sum(metric(bits, s) for s in anchor_bits)

    def surrogate_sum(bits: int) -> float:
        return sum(
            oracle.evaluate_bits(bits & ~s) + oracle.evaluate_bits(s & ~bits)
            for s in anchor_bits
        )

    score = true_sum if mode == "exact" else surrogate_sum
    best_bits = 0
    best_score = score(0)
    for bits in range(1, 1 << n):
        value = score(bits)
        if value < best_score:
            best_bits, best_score = bits, value

    try:
        kappa = curvature(oracle).kappa_global
    except DegenerateInstanceError:
        kappa = 0.0
    vacuous = kappa >= 1.0 - 1e-12
    guarantee = {
        "mode": mode,
        "kappa": kappa,
        "factor": None if (vacuous or mode == "exact") else 1.0 / (1.0 - kappa),
        "vacuous": vacuous,
    }
    if mode == "exact":
        guarantee["factor"] = 1.0
    if vacuous and mode == "surrogate":
        guarantee["note"] = "curvature is 1, so the 1/(1-kappa) factor is vacuous"
    extras = {}
    if mode == "surrogate":
        extras["surrogate_value"] = best_score
    return SelectionReport(
        chosen=SubsetMask(oracle.ground, best_bits),
        objective_value=true_sum(best_bits),
        gain_trace=(),
        guarantee=guarantee,
        oracle_calls=oracle.evaluations - before,
        seed=None,
        extras=extras,
    )
