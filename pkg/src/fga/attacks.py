"""Attack algorithms against the goodness score, plus an exhaustive tiny-scale solver.

The move model: an attacker either adds an edge it does not have yet or
updates the weight of one it does, always within [-1, 1]. Direct attacks rate
the target itself with -1. Indirect attacks rate successors of the target's
predecessors, corrupting predecessor fairness; the greedy variants commit,
per step, whichever candidate edge lowers the target's recomputed goodness
the most. Candidate scores within 1e-9 count as tied (fixed-point residual
noise) and resolve to the smallest successor id, positive weight first, so
runs are deterministic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .engine import FgaConfig, FgaScores, FlatEdges, compute_fga, recompute_after, recompute_flat
from .graph import Wsn

#: Measurement-grade settings; attack deltas are asserted at 1e-9 downstream.
ATTACK_CONFIG = FgaConfig(max_iterations=400, residual_tolerance=1e-12)

#: Candidate scores closer than this are treated as equal when ranking moves.
TIE_TOLERANCE = 1e-9

KIND_ADD = "edge-addition"
KIND_UPDATE = "weight-update"


class InsufficientCandidatesError(RuntimeError):
    """Fewer qualifying nodes than requested."""


class InstanceTooLargeError(RuntimeError):
    """The exhaustive solver refuses instances beyond its enumeration guard."""


@dataclass(frozen=True)
class AttackMove:
    kind: str
    attacker: int
    rated: int
    weight: float


@dataclass
class AttackOutcome:
    """Before/after scores and the committed move log of one attack."""

    moves: list[AttackMove]
    scores_before: FgaScores
    scores_after: FgaScores
    graph_after: Wsn
    targets: tuple[int, ...]
    delta_goodness: dict[int, float]
    exhausted: bool = False
    success: dict[int, bool] | None = None


@dataclass
class MixedAttackOutcome:
    """Decomposition of a combined direct + indirect attack on one target.

    delta_direct is measured after applying only the direct edges;
    delta_indirect is defined as delta_total - delta_direct.
    """

    target: int
    direct_moves: list[AttackMove]
    indirect_moves: list[AttackMove]
    scores_before: FgaScores
    scores_after: FgaScores
    graph_after: Wsn
    delta_direct: float
    delta_indirect: float
    delta_total: float


@dataclass(frozen=True)
class SelectionCriteria:
    """Node filters used to sample targets and attacker pools.

    Targets: 0 < indeg < target_max_indeg and goodness >= target_min_goodness.
    Established attackers: outdeg > established_min_outdeg and fairness >
    established_min_fairness. Fresh attackers: 0 < indeg < fresh_max_indeg
    and outdeg == 0.
    """

    target_max_indeg: int = 10
    target_min_goodness: float = 0.5
    established_min_outdeg: int = 5
    established_min_fairness: float = 0.7
    fresh_max_indeg: int = 10


@dataclass
class AttackProblem:
    """A budgeted threshold-reaching instance over node targets or unlinked pairs."""

    graph: Wsn
    attackers: tuple[int, ...]
    intermediaries: tuple[int, ...]
    budget: int
    threshold: float
    direction: str = "decrease"
    targets: tuple[int, ...] | None = None
    target_pairs: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        if self.direction not in ("decrease", "increase"):
            raise ValueError(f"direction must be decrease or increase, got {self.direction!r}")
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if not -1.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [-1, 1]")
        if (self.targets is None) == (self.target_pairs is None):
            raise ValueError("exactly one of targets / target_pairs must be given")
        attackers = set(self.attackers)
        if self.targets is not None:
            if not self.targets:
                raise ValueError("target set must be non-empty")
            if attackers & set(self.targets):
                raise ValueError("attackers and targets must be disjoint")
        if self.target_pairs is not None:
            if not self.target_pairs:
                raise ValueError("target pair set must be non-empty")
            for u, v in self.target_pairs:
                if u == v:
                    raise ValueError(f"degenerate pair ({u}, {v})")
                if u in attackers or v in attackers:
                    raise ValueError("pair members must not be attackers")
                if self.graph.has_edge(u, v) or self.graph.has_edge(v, u):
                    raise ValueError(f"pair ({u}, {v}) is already linked")


@dataclass
class ExhaustiveSearchResult:
    feasible: bool
    objective_value: float
    moves: tuple[AttackMove, ...]
    outcome: AttackOutcome
    sets_enumerated: int


# -- shared internals ------------------------------------------------------


def _apply_rating(graph: Wsn, attacker: int, rated: int, weight: float) -> tuple[AttackMove, float | None]:
    """Rate and return the move plus the previous weight (None for a new edge)."""
    previous = graph.weight(attacker, rated) if graph.has_edge(attacker, rated) else None
    kind = graph.rate(attacker, rated, weight)
    return AttackMove(kind=kind, attacker=attacker, rated=rated, weight=weight), previous


def _revert_rating(graph: Wsn, attacker: int, rated: int, previous: float | None) -> None:
    if previous is None:
        graph.remove_edge(attacker, rated)
    else:
        graph.update_weight(attacker, rated, previous)


def _by_descending_fairness(attackers, scores: FgaScores) -> list[int]:
    return sorted(set(attackers), key=lambda a: (-scores.fairness[a], a))


def _indirect_candidates(graph: Wsn, target: int, attacker: int) -> list[int]:
    candidates: set[int] = set()
    for n1 in graph.pred(target):
        candidates.update(graph.succ(n1))
    candidates.discard(target)
    candidates.discard(attacker)
    return sorted(candidates)


def _best_candidate(
    graph: Wsn, scores: FgaScores, attacker: int, target: int, config: FgaConfig
) -> tuple[int, float, float] | None:
    """Scan (successor, +-1) candidates; return (rated, weight, goodness after) or None.

    Iteration runs in ascending id with +1 before -1, and a replacement must
    beat the incumbent by more than TIE_TOLERANCE, which implements the
    deterministic tie-break. Candidates are scored on single-edit views of
    the flattened edge list, so the graph itself is never touched.
    """
    flat = FlatEdges.from_graph(graph)
    best: tuple[int, float, float] | None = None
    for rated in _indirect_candidates(graph, target, attacker):
        for weight in (1.0, -1.0):
            after = recompute_flat(flat.with_rating(attacker, rated, weight), scores, config)
            value = float(after.goodness[target])
            if best is None or value < best[2] - TIE_TOLERANCE:
                best = (rated, weight, value)
    return best


def _outcome(
    moves: list[AttackMove],
    before: FgaScores,
    after: FgaScores,
    graph_after: Wsn,
    targets: tuple[int, ...],
    exhausted: bool = False,
) -> AttackOutcome:
    delta = {t: float(after.goodness[t] - before.goodness[t]) for t in targets}
    return AttackOutcome(
        moves=moves,
        scores_before=before,
        scores_after=after,
        graph_after=graph_after,
        targets=targets,
        delta_goodness=delta,
        exhausted=exhausted,
    )


# -- attack algorithms -------------------------------------------------------


def direct_attack(
    graph: Wsn, attackers, target: int, config: FgaConfig | None = None
) -> AttackOutcome:
    """Every attacker rates the target with the worst possible weight -1.

    An attacker that already rates the target degrades its move to a weight
    update; either way one budget unit is spent per attacker.
    """
    config = config or ATTACK_CONFIG
    attackers = sorted(set(attackers))
    if target in attackers:
        raise ValueError("the target cannot attack itself")
    before = compute_fga(graph, config)
    work = graph.copy()
    moves = []
    for attacker in attackers:
        move, _ = _apply_rating(work, attacker, target, -1.0)
        moves.append(move)
    after = recompute_after(work, before, config) if moves else before
    return _outcome(moves, before, after, work, (target,))


def indirect_attack_greedy(
    graph: Wsn, attackers, target: int, config: FgaConfig | None = None
) -> AttackOutcome:
    """One edge per attacker, highest-fairness attackers first.

    Each attacker rates the successor of one of the target's predecessors with
    whichever of +1 / -1 lowers the target's recomputed goodness the most.
    Running out of eligible successors reports exhaustion, not failure.
    """
    config = config or ATTACK_CONFIG
    before = compute_fga(graph, config)
    ordered = _by_descending_fairness(attackers, before)
    if target in ordered:
        raise ValueError("the target cannot attack itself")
    work = graph.copy()
    current = before
    moves: list[AttackMove] = []
    exhausted = False
    for attacker in ordered:
        best = _best_candidate(work, current, attacker, target, config)
        if best is None:
            exhausted = True
            break
        rated, weight, _ = best
        move, _ = _apply_rating(work, attacker, rated, weight)
        moves.append(move)
        current = recompute_after(work, current, config)
    return _outcome(moves, before, current, work, (target,), exhausted=exhausted)


def indirect_attack_scaled(
    graph: Wsn,
    attackers,
    target: int,
    scale: int = 5,
    max_edges: int = 10,
    config: FgaConfig | None = None,
) -> AttackOutcome:
    """Greedy pick as above, but each pick is amplified into a batch of edges.

    The batch size is min(scale * indeg(rated), max_edges, attackers left),
    drawn from the fairness-sorted attacker list at the running cursor; all
    batch members rate the picked node with the picked weight.
    """
    if scale < 1 or max_edges < 1:
        raise ValueError("scale and max_edges must be >= 1")
    config = config or ATTACK_CONFIG
    before = compute_fga(graph, config)
    ordered = _by_descending_fairness(attackers, before)
    if target in ordered:
        raise ValueError("the target cannot attack itself")
    work = graph.copy()
    current = before
    moves: list[AttackMove] = []
    exhausted = False
    i = 0
    while i < len(ordered):
        best = _best_candidate(work, current, ordered[i], target, config)
        if best is None:
            exhausted = True
            break
        rated, weight, _ = best
        batch_size = min(scale * work.indeg(rated), max_edges, len(ordered) - i)
        for attacker in ordered[i : i + batch_size]:
            if attacker == rated:
                continue
            move, _ = _apply_rating(work, attacker, rated, weight)
            moves.append(move)
        current = recompute_after(work, current, config)
        i += batch_size
    return _outcome(moves, before, current, work, (target,), exhausted=exhausted)


def mixed_attack(
    graph: Wsn,
    attackers,
    target: int,
    k1: int,
    k2: int,
    config: FgaConfig | None = None,
) -> MixedAttackOutcome:
    """k1 attackers rate the target directly, then k2 run the greedy indirect attack.

    The attacker pool is split disjointly in descending-fairness order, so no
    attacker is assigned twice.
    """
    config = config or ATTACK_CONFIG
    if k1 < 0 or k2 < 0:
        raise ValueError("k1 and k2 must be >= 0")
    pool = set(attackers)
    if target in pool:
        raise ValueError("the target cannot attack itself")
    if k1 + k2 > len(pool):
        raise ValueError(f"need {k1 + k2} distinct attackers, have {len(pool)}")
    before = compute_fga(graph, config)
    ordered = _by_descending_fairness(pool, before)
    direct_set = ordered[:k1]
    indirect_set = ordered[k1 : k1 + k2]

    work = graph.copy()
    direct_moves = []
    for attacker in direct_set:
        move, _ = _apply_rating(work, attacker, target, -1.0)
        direct_moves.append(move)
    mid = recompute_after(work, before, config) if direct_moves else before
    delta_direct = float(mid.goodness[target] - before.goodness[target])

    current = mid
    indirect_moves: list[AttackMove] = []
    for attacker in indirect_set:
        best = _best_candidate(work, current, attacker, target, config)
        if best is None:
            break
        rated, weight, _ = best
        move, _ = _apply_rating(work, attacker, rated, weight)
        indirect_moves.append(move)
        current = recompute_after(work, current, config)

    delta_total = float(current.goodness[target] - before.goodness[target])
    return MixedAttackOutcome(
        target=target,
        direct_moves=direct_moves,
        indirect_moves=indirect_moves,
        scores_before=before,
        scores_after=current,
        graph_after=work,
        delta_direct=delta_direct,
        delta_indirect=delta_total - delta_direct,
        delta_total=delta_total,
    )


def inject_sybil(graph: Wsn, rated: int, weight: float, label: str | None = None) -> tuple[Wsn, int]:
    """Return a copy of the graph plus a fresh fake identity with one outgoing rating."""
    work = graph.copy()
    if label is None:
        base = f"sybil{work.node_count}"
        label = base
        suffix = 0
        while label in work.labels():
            suffix += 1
            label = f"{base}_{suffix}"
    sybil = work.add_node(label)
    work.add_edge(sybil, rated, weight)
    return work, sybil


# -- exhaustive oracle -------------------------------------------------------


def _objective(problem: AttackProblem, scores: FgaScores) -> float:
    f = scores.fairness
    g = scores.goodness
    if problem.targets is not None:
        values = [float(g[t]) for t in problem.targets]
        return max(values) if problem.direction == "decrease" else min(values)
    assert problem.target_pairs is not None
    per_pair = []
    for u, v in problem.target_pairs:
        predictions = (float(f[u] * g[v]), float(f[v] * g[u]))
        # Either direction of the potential link may satisfy the goal.
        per_pair.append(min(predictions) if problem.direction == "decrease" else max(predictions))
    return max(per_pair) if problem.direction == "decrease" else min(per_pair)


def _meets_threshold(problem: AttackProblem, value: float) -> bool:
    if problem.direction == "decrease":
        return value <= problem.threshold
    return value >= problem.threshold


def solve_exhaustive(
    problem: AttackProblem,
    weight_grid: tuple[float, ...] = (-1.0, 1.0),
    config: FgaConfig | None = None,
    max_sets: int = 1_000_000,
) -> ExhaustiveSearchResult:
    """Enumerate every move set within budget and return the extremal outcome.

    Feasible means some enumerated set pushes every target (or one prediction
    per pair) past the threshold. The returned outcome is the best found by
    the objective whether or not it is feasible. Instances whose move-set
    count exceeds ``max_sets`` are rejected outright.
    """
    config = config or ATTACK_CONFIG
    graph = problem.graph
    pool: list[tuple[int, int, float]] = []
    for attacker in sorted(set(problem.attackers)):
        for rated in sorted(set(problem.intermediaries)):
            if attacker == rated:
                continue
            existing = graph.weight(attacker, rated) if graph.has_edge(attacker, rated) else None
            for weight in weight_grid:
                if existing is not None and existing == weight:
                    continue  # updating to the same value is a null move
                pool.append((attacker, rated, float(weight)))

    total_sets = sum(math.comb(len(pool), size) for size in range(0, problem.budget + 1))
    if total_sets > max_sets:
        raise InstanceTooLargeError(
            f"{total_sets} candidate move sets exceed the {max_sets} limit"
        )

    base = compute_fga(graph, config)
    work = graph.copy()
    best_value = _objective(problem, base)
    best_combo: tuple[tuple[int, int, float], ...] = ()
    enumerated = 1
    minimize = problem.direction == "decrease"
    for size in range(1, problem.budget + 1):
        for combo in itertools.combinations(pool, size):
            touched = {(a, v) for a, v, _ in combo}
            if len(touched) < size:
                continue  # two moves on one edge collapse to the later one
            undo = []
            for attacker, rated, weight in combo:
                _, previous = _apply_rating(work, attacker, rated, weight)
                undo.append((attacker, rated, previous))
            try:
                value = _objective(problem, recompute_after(work, base, config))
            finally:
                for attacker, rated, previous in reversed(undo):
                    _revert_rating(work, attacker, rated, previous)
            enumerated += 1
            if (value < best_value) if minimize else (value > best_value):
                best_value = value
                best_combo = combo

    final_graph = graph.copy()
    moves = []
    for attacker, rated, weight in best_combo:
        move, _ = _apply_rating(final_graph, attacker, rated, weight)
        moves.append(move)
    final = compute_fga(final_graph, config)
    targets = problem.targets if problem.targets is not None else tuple(
        node for pair in problem.target_pairs for node in pair
    )
    outcome = _outcome(moves, base, final, final_graph, tuple(targets))
    if problem.targets is not None:
        outcome.success = {
            t: _meets_threshold(problem, float(final.goodness[t])) for t in problem.targets
        }
    feasible = _meets_threshold(problem, best_value)
    return ExhaustiveSearchResult(
        feasible=feasible,
        objective_value=best_value,
        moves=tuple(moves),
        outcome=outcome,
        sets_enumerated=enumerated,
    )


# -- target / attacker selection ----------------------------------------------


def qualifying_targets(graph: Wsn, scores: FgaScores, criteria: SelectionCriteria) -> list[int]:
    return [
        v
        for v in graph.nodes()
        if 0 < graph.indeg(v) < criteria.target_max_indeg
        and scores.goodness[v] >= criteria.target_min_goodness
    ]


def qualifying_attackers(
    graph: Wsn, scores: FgaScores, criteria: SelectionCriteria, attacker_class: str
) -> list[int]:
    if attacker_class == "established":
        return [
            v
            for v in graph.nodes()
            if graph.outdeg(v) > criteria.established_min_outdeg
            and scores.fairness[v] > criteria.established_min_fairness
        ]
    if attacker_class == "fresh":
        return [
            v
            for v in graph.nodes()
            if 0 < graph.indeg(v) < criteria.fresh_max_indeg and graph.outdeg(v) == 0
        ]
    raise ValueError(f"unknown attacker class {attacker_class!r}")


def _sample(pool: list[int], count: int, rng: np.random.Generator, what: str) -> list[int]:
    if count < 0:
        raise ValueError("count must be >= 0")
    if len(pool) < count:
        raise InsufficientCandidatesError(
            f"requested {count} {what} but only {len(pool)} qualify"
        )
    picks = rng.choice(len(pool), size=count, replace=False)
    return [pool[i] for i in picks]


def select_targets(
    graph: Wsn,
    scores: FgaScores,
    criteria: SelectionCriteria,
    count: int,
    rng: np.random.Generator,
) -> list[int]:
    """Seeded uniform sample from the nodes matching the target rule."""
    return _sample(qualifying_targets(graph, scores, criteria), count, rng, "targets")


def select_attackers(
    graph: Wsn,
    scores: FgaScores,
    criteria: SelectionCriteria,
    count: int,
    rng: np.random.Generator,
    attacker_class: str = "established",
    exclude=(),
) -> list[int]:
    """Seeded uniform sample from the requested attacker pool."""
    excluded = set(exclude)
    pool = [v for v in qualifying_attackers(graph, scores, criteria, attacker_class) if v not in excluded]
    return _sample(pool, count, rng, f"{attacker_class} attackers")
