"""Synthetic network generators: dense-minimum-degree digraphs, stars, random graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import gadgets
from .graph import Wsn


def generate_min_k_neighbour(
    n: int,
    k: int,
    seed: int = 0,
    weight_range: tuple[float, float] = (-1.0, 1.0),
) -> Wsn:
    """Random digraph where every node has exactly k in- and out-edges.

    With |weight| <= 1 each node's incoming absolute-weight mass is at most k
    automatically, so the minimum-k-neighbour certificate holds by
    construction. Starts from k cyclic shifts and randomizes with
    degree-preserving edge swaps.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < k + 1:
        raise ValueError(f"infeasible: need n >= k + 1, got n={n}, k={k}")
    lo, hi = weight_range
    if not -1.0 <= lo <= hi <= 1.0:
        raise ValueError(f"weight range {weight_range} outside [-1, 1]")

    rng = np.random.default_rng([seed, n, k])
    edges = [(u, (u + shift) % n) for shift in range(1, k + 1) for u in range(n)]
    present = set(edges)
    swaps = 10 * len(edges)
    for _ in range(swaps):
        i, j = rng.integers(0, len(edges), size=2)
        if i == j:
            continue
        (u1, v1), (u2, v2) = edges[i], edges[j]
        if u1 == v2 or u2 == v1:
            continue
        if (u1, v2) in present or (u2, v1) in present:
            continue
        present.discard((u1, v1))
        present.discard((u2, v2))
        present.add((u1, v2))
        present.add((u2, v1))
        edges[i] = (u1, v2)
        edges[j] = (u2, v1)

    graph = Wsn()
    for _ in range(n):
        graph.add_node()
    for u, v in sorted(present):
        graph.add_edge(u, v, float(rng.uniform(lo, hi)))
    return graph


def generate_complete_positive(n: int) -> Wsn:
    """Every ordered pair rated with the maximum weight 1.0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    graph = Wsn()
    for _ in range(n):
        graph.add_node()
    for u in range(n):
        for v in range(n):
            if u != v:
                graph.add_edge(u, v, 1.0)
    return graph


def generate_random_graph(
    n: int,
    avg_out_degree: float = 3.0,
    seed: int = 0,
    positive_fraction: float = 0.9,
) -> Wsn:
    """Sparse random digraph with rating-like weights.

    ``positive_fraction`` of the edges get weights in (0, 1], the rest in
    [-1, 0); trust networks are predominantly positive.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= positive_fraction <= 1.0:
        raise ValueError("positive_fraction must be in [0, 1]")
    target_edges = min(int(round(n * avg_out_degree)), n * (n - 1))
    rng = np.random.default_rng([seed, n])
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < target_edges:
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u != v:
            chosen.add((u, v))
    graph = Wsn()
    for _ in range(n):
        graph.add_node()
    for u, v in sorted(chosen):
        magnitude = float(rng.uniform(0.05, 1.0))
        sign = 1.0 if rng.random() < positive_fraction else -1.0
        graph.add_edge(u, v, sign * magnitude)
    return graph


def generate_stabilised_star(
    k: int, l: int, influencer_fairness: float = 1.0
) -> tuple[Wsn, int, list[int], list[int]]:
    return gadgets.stabilised_star(k, l, influencer_fairness)


@dataclass(frozen=True)
class GeneratorSpec:
    """Named generator plus parameters, for configs and the CLI."""

    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def build(self) -> Wsn:
        return generate_gadget(self.kind, dict(self.params), self.seed)


def generate_gadget(kind: str, params: dict[str, Any], seed: int = 0) -> Wsn:
    """Dispatch by generator kind; see the individual builders for parameters."""
    if kind == "min-k-neighbour":
        return generate_min_k_neighbour(int(params["n"]), int(params["k"]), seed=seed)
    if kind == "complete-positive":
        return generate_complete_positive(int(params["n"]))
    if kind == "random-erdos":
        return generate_random_graph(
            int(params["n"]),
            avg_out_degree=float(params.get("avg_out_degree", 3.0)),
            seed=seed,
            positive_fraction=float(params.get("positive_fraction", 0.9)),
        )
    if kind == "stabilised-star":
        graph, _, _, _ = generate_stabilised_star(
            int(params["k"]),
            int(params["l"]),
            influencer_fairness=float(params.get("influencer_fairness", 1.0)),
        )
        return graph
    if kind == "goodness-gadget":
        graph, _, _ = gadgets.goodness_star(
            [(int(params.get("raters", 2)), float(params["fairness"]), float(params["rating"]))]
        )
        return graph
    if kind == "fairness-gadget":
        graph, _, _ = gadgets.fairness_fan([float(d) for d in params["errors"]])
        return graph
    raise ValueError(f"unknown generator kind {kind!r}")
