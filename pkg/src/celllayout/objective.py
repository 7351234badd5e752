"""Weighted QAP cost of a cell-to-location assignment.

For a permutation ``perm`` (``perm[i]`` is the location of cell ``i``)::

    flow_term      = sum_ik Nf[i, k] * d[perm[i], perm[k]]
    closeness_term = sum_ik Nr[i, k] * d[perm[i], perm[k]]
    total          = flow_term + w * closeness_term
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, IndexOutOfRange, InvalidPermutation, SameIndex
from .instance import CellLayoutInstance


@dataclass(frozen=True)
class Assignment:
    """Cell-to-location bijection, ``perm[i] = j`` meaning cell i sits at location j."""

    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        n = len(perm)
        seen = {}
        for cell, loc in enumerate(perm):
            if not 0 <= loc < n:
                raise InvalidPermutation(
                    f"cell {cell}: location {loc} is out of range [0, {n})", index=cell
                )
            if loc in seen:
                raise InvalidPermutation(
                    f"cell {cell}: location {loc} already taken by cell {seen[loc]}", index=cell
                )
            seen[loc] = cell
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, n: int) -> Assignment:
        return cls(tuple(range(n)))

    @classmethod
    def parse(cls, text: str) -> Assignment:
        """Parse a comma-joined permutation such as ``"2,0,1"``."""
        items = [t.strip() for t in text.split(",")] if text.strip() else []
        perm = []
        for index, item in enumerate(items):
            try:
                perm.append(int(item))
            except ValueError:
                raise InvalidPermutation(f"entry {index} ({item!r}) is not an integer", index=index) from None
        return cls(tuple(perm))

    def __len__(self):
        return len(self.perm)

    def __iter__(self):
        return iter(self.perm)

    def __getitem__(self, i):
        return self.perm[i]

    def __str__(self):
        return ",".join(map(str, self.perm))

    def to_array(self) -> np.ndarray:
        return np.array(self.perm, dtype=np.int64)


AssignmentLike = Union[Assignment, Sequence[int], np.ndarray]


def as_assignment(value: AssignmentLike) -> Assignment:
    return value if isinstance(value, Assignment) else Assignment(tuple(value))


@dataclass(frozen=True)
class CostBreakdown:
    flow_term: float
    closeness_term: float
    total: float


def _checked(instance: CellLayoutInstance, assignment: AssignmentLike) -> Assignment:
    assignment = as_assignment(assignment)
    if len(assignment) != instance.n:
        raise DimensionMismatch(f"assignment has {len(assignment)} cells, instance has {instance.n}")
    return assignment


def evaluate(instance: CellLayoutInstance, assignment: AssignmentLike) -> CostBreakdown:
    assignment = _checked(instance, assignment)
    if instance.n == 1:
        return CostBreakdown(0.0, 0.0, 0.0)
    p = assignment.to_array()
    placed = instance.distance[np.ix_(p, p)]
    flow_term = float(np.sum(instance.normalized_flow * placed))
    closeness_term = float(np.sum(instance.normalized_closeness * placed))
    return CostBreakdown(flow_term, closeness_term, flow_term + instance.w * closeness_term)


def _check_pair(n: int, a: int, b: int):
    for idx in (a, b):
        if not 0 <= idx < n:
            raise IndexOutOfRange(f"cell index {idx} is out of range [0, {n})")
    if a == b:
        raise SameIndex(f"cannot swap cell {a} with itself")


def swap_delta(instance: CellLayoutInstance, assignment: AssignmentLike, a: int, b: int) -> float:
    """Change in ``total`` if cells ``a`` and ``b`` exchange locations, in O(n)."""
    assignment = _checked(instance, assignment)
    _check_pair(instance.n, a, b)
    return float(_kernels.swap_delta(instance.weights, instance.distance, assignment.to_array(), a, b))


def apply_swap(assignment: AssignmentLike, a: int, b: int) -> Assignment:
    assignment = as_assignment(assignment)
    _check_pair(len(assignment), a, b)
    perm = list(assignment.perm)
    perm[a], perm[b] = perm[b], perm[a]
    return Assignment(tuple(perm))
