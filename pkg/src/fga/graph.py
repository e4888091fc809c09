"""Weighted signed network data model: dense-id directed graphs with weights in [-1, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

NodeId = int


class InvariantViolationError(RuntimeError):
    """A structural invariant of the network no longer holds."""


@dataclass(frozen=True)
class RatingScale:
    """Half-width of a raw rating scale, e.g. 10.0 for integer ratings in [-10, 10]."""

    r_max: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise ValueError(f"r_max must be a positive finite number, got {self.r_max}")

    def normalize(self, raw: float) -> float:
        """Map a raw rating linearly onto [-1, 1]."""
        if not math.isfinite(raw) or abs(raw) > self.r_max:
            raise ValueError(f"raw rating {raw} outside [-{self.r_max}, {self.r_max}]")
        return raw / self.r_max

    def denormalize(self, weight: float) -> float:
        return weight * self.r_max


def normalize_rating(raw: float, scale: RatingScale) -> float:
    return scale.normalize(raw)


class Neighbourhood(NamedTuple):
    pred: frozenset[int]
    succ: frozenset[int]
    indeg: int
    outdeg: int


class Wsn:
    """Directed weighted signed network.

    Every weight lies in [-1, 1], there is at most one edge per ordered pair,
    and self-loops are rejected. Node ids are dense non-negative integers
    assigned at creation; external string labels map bijectively to ids.

    A graph handed out for reading must not be mutated concurrently; mutation
    belongs to whoever holds the only handle. ``copy()`` is cheap and the copy
    is fully independent.
    """

    __slots__ = ("_succ", "_pred", "_labels", "_ids", "_edge_count")

    def __init__(self) -> None:
        self._succ: list[dict[int, float]] = []
        self._pred: list[set[int]] = []
        self._labels: list[str] = []
        self._ids: dict[str, int] = {}
        self._edge_count = 0

    # -- nodes ---------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._succ)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def add_node(self, label: str | None = None) -> int:
        node = len(self._succ)
        if label is None:
            label = str(node)
        if label in self._ids:
            raise ValueError(f"duplicate node label {label!r}")
        self._succ.append({})
        self._pred.append(set())
        self._labels.append(label)
        self._ids[label] = node
        return node

    def ensure_node(self, label: str) -> int:
        """Return the id for ``label``, creating the node on first sight."""
        existing = self._ids.get(label)
        if existing is not None:
            return existing
        return self.add_node(label)

    def has_node(self, node: int) -> bool:
        return 0 <= node < len(self._succ)

    def id_of(self, label: str) -> int:
        try:
            return self._ids[label]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    def label_of(self, node: int) -> str:
        self._check_node(node)
        return self._labels[node]

    def labels(self) -> list[str]:
        return list(self._labels)

    def nodes(self) -> range:
        return range(len(self._succ))

    def _check_node(self, node: int) -> None:
        if not (isinstance(node, int) and 0 <= node < len(self._succ)):
            raise KeyError(f"unknown node {node}")

    # -- edges ---------------------------------------------------------

    @staticmethod
    def _check_weight(weight: float) -> float:
        weight = float(weight)
        if not math.isfinite(weight) or weight < -1.0 or weight > 1.0:
            raise ValueError(f"weight {weight} outside [-1, 1]")
        return weight

    def add_edge(self, u: int, v: int, weight: float) -> None:
        """Add the edge (u, v). Rejects duplicates; re-rating goes through update_weight."""
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise ValueError(f"self-loop ({u}, {v}) not allowed")
        weight = self._check_weight(weight)
        if v in self._succ[u]:
            raise ValueError(f"edge ({u}, {v}) already present; use update_weight")
        self._succ[u][v] = weight
        self._pred[v].add(u)
        self._edge_count += 1

    def update_weight(self, u: int, v: int, weight: float) -> None:
        self._check_node(u)
        self._check_node(v)
        weight = self._check_weight(weight)
        if v not in self._succ[u]:
            raise KeyError(f"edge ({u}, {v}) does not exist")
        self._succ[u][v] = weight

    def rate(self, u: int, v: int, weight: float) -> str:
        """Add-or-update semantics used by loaders and attack moves.

        Returns "edge-addition" or "weight-update" describing what happened.
        """
        if self.has_edge(u, v):
            self.update_weight(u, v, weight)
            return "weight-update"
        self.add_edge(u, v, weight)
        return "edge-addition"

    def remove_edge(self, u: int, v: int) -> None:
        """Internal undo primitive; edge deletion is not part of the attack move model."""
        self._check_node(u)
        self._check_node(v)
        if v not in self._succ[u]:
            raise KeyError(f"edge ({u}, {v}) does not exist")
        del self._succ[u][v]
        self._pred[v].discard(u)
        self._edge_count -= 1

    def has_edge(self, u: int, v: int) -> bool:
        self._check_node(u)
        self._check_node(v)
        return v in self._succ[u]

    def weight(self, u: int, v: int) -> float:
        self._check_node(u)
        self._check_node(v)
        try:
            return self._succ[u][v]
        except KeyError:
            raise KeyError(f"edge ({u}, {v}) does not exist") from None

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Yield (u, v, weight) in ascending (u, v) order."""
        for u, targets in enumerate(self._succ):
            for v in sorted(targets):
                yield u, v, targets[v]

    # -- neighbourhood queries ------------------------------------------

    def pred(self, v: int) -> set[int]:
        self._check_node(v)
        return set(self._pred[v])

    def succ(self, u: int) -> set[int]:
        self._check_node(u)
        return set(self._succ[u])

    def indeg(self, v: int) -> int:
        self._check_node(v)
        return len(self._pred[v])

    def outdeg(self, u: int) -> int:
        self._check_node(u)
        return len(self._succ[u])

    def neighbourhood(self, v: int) -> Neighbourhood:
        self._check_node(v)
        return Neighbourhood(
            pred=frozenset(self._pred[v]),
            succ=frozenset(self._succ[v]),
            indeg=len(self._pred[v]),
            outdeg=len(self._succ[v]),
        )

    # -- whole-graph operations ------------------------------------------

    def copy(self) -> "Wsn":
        dup = Wsn.__new__(Wsn)
        dup._succ = [dict(targets) for targets in self._succ]
        dup._pred = [set(sources) for sources in self._pred]
        dup._labels = list(self._labels)
        dup._ids = dict(self._ids)
        dup._edge_count = self._edge_count
        return dup

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Wsn):
            return NotImplemented
        return self._labels == other._labels and self._succ == other._succ

    def __hash__(self) -> None:  # type: ignore[override]
        raise TypeError("Wsn is mutable and unhashable")

    def __repr__(self) -> str:
        return f"Wsn(nodes={self.node_count}, edges={self.edge_count})"

    def validate(self) -> None:
        """Full-scan check of the structural invariants; raises on any violation."""
        problems: list[str] = []
        seen_edges = 0
        for u, targets in enumerate(self._succ):
            for v, w in targets.items():
                seen_edges += 1
                if u == v:
                    problems.append(f"self-loop at {u}")
                if not (math.isfinite(w) and -1.0 <= w <= 1.0):
                    problems.append(f"weight {w} on ({u}, {v}) outside [-1, 1]")
                if u not in self._pred[v]:
                    problems.append(f"predecessor index missing ({u}, {v})")
        for v, sources in enumerate(self._pred):
            for u in sources:
                if v not in self._succ[u]:
                    problems.append(f"stale predecessor entry ({u}, {v})")
        if seen_edges != self._edge_count:
            problems.append(f"edge count {self._edge_count} != {seen_edges} stored edges")
        if len(self._ids) != len(self._labels) or any(
            self._ids.get(label) != node for node, label in enumerate(self._labels)
        ):
            problems.append("label index is not a bijection")
        if problems:
            raise InvariantViolationError("; ".join(problems))
