"""Weighted sampling of attachment targets by degree class.

The probability that a new edge attaches to *some* node of in-degree ``k`` is proportional to the
class weight ``w(k) = n(k) * A(k)``. A :class:`DegreeClassSampler` draws the class from a
:class:`FenwickTree` of class weights and then picks a uniform member of that class, so both
draws and degree updates take logarithmic time in the number of classes.
"""

from __future__ import annotations

import math
from collections.abc import Iterator

from prefattach.attachment import AttachmentFunction


class FenwickTree:
    """Prefix sums over non-negative weights with logarithmic updates and searches.

    Examples:

        >>> tree = FenwickTree.from_values([1.0, 0.0, 3.0])
        >>> tree.total
        4.0
        >>> tree.find(0.5), tree.find(1.0), tree.find(3.9)
        (0, 2, 2)
    """

    def __init__(self, capacity: int = 64) -> None:
        self.capacity = 1 << max(capacity - 1, 1).bit_length()
        self._tree = [0.0] * (self.capacity + 1)

    @classmethod
    def from_values(cls, values: list[float], capacity: int = 0) -> FenwickTree:
        tree = cls(max(capacity, len(values), 1))
        nodes = tree._tree
        for index in range(1, tree.capacity + 1):
            if index <= len(values):
                nodes[index] += values[index - 1]
            parent = index + (index & -index)
            if parent <= tree.capacity:
                nodes[parent] += nodes[index]
        return tree

    def add(self, index: int, delta: float) -> None:
        position = index + 1
        nodes = self._tree
        while position <= self.capacity:
            nodes[position] += delta
            position += position & -position

    def prefix(self, index: int) -> float:
        """Sum of the weights at positions ``0..index-1``."""
        total = 0.0
        position = min(index, self.capacity)
        while position > 0:
            total += self._tree[position]
            position -= position & -position
        return total

    @property
    def total(self) -> float:
        return self._tree[self.capacity]

    def find(self, target: float) -> int:
        """The smallest position whose inclusive prefix sum exceeds ``target``."""
        position = 0
        step = self.capacity
        nodes = self._tree
        while step:
            following = position + step
            if following <= self.capacity and nodes[following] <= target:
                position = following
                target -= nodes[following]
            step >>= 1
        return position


class ClassPool:
    """Members of one degree class with constant time insertion, removal and indexing."""

    __slots__ = ("_index", "_items")

    def __init__(self) -> None:
        self._index: dict[int, int] = {}
        self._items: list[int] = []

    def add(self, node: int) -> None:
        self._index[node] = len(self._items)
        self._items.append(node)

    def remove(self, node: int) -> None:
        i = self._index.pop(node)
        replacer = self._items.pop()
        if i < len(self._items):
            self._items[i] = replacer
            self._index[replacer] = i

    def __getitem__(self, i: int) -> int:
        return self._items[i]

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, node: object) -> bool:
        return node in self._index

    def __iter__(self) -> Iterator[int]:
        return iter(self._items)


class DegreeClassSampler:
    """Sample existing nodes with probability proportional to ``A(k)`` of their in-degree.

    Nodes are identified by consecutive integers starting at zero in the order of
    :meth:`add_node`. The class weights are maintained incrementally; :meth:`recompute` derives
    them from scratch and :meth:`rebuild` resets the prefix-sum tree to the exact values, which is
    done automatically every ``rebuild_every`` degree updates.

    Args:
        attachment (AttachmentFunction): The attachment function ``A(k)``.
        rebuild_every (int): Number of degree updates after which the prefix sums are rebuilt.
    """

    def __init__(self, attachment: AttachmentFunction, rebuild_every: int = 1 << 16) -> None:
        self.attachment = attachment
        self.rebuild_every = rebuild_every
        self.degree: list[int] = []
        self._a: list[float] = []
        self._counts: list[int] = []
        self._weights: list[float] = []
        self._pools: list[ClassPool] = []
        self._tree = FenwickTree()
        self._updates = 0

    def __len__(self) -> int:
        return len(self.degree)

    @property
    def total(self) -> float:
        """The running total ``S`` of all class weights."""
        return self._tree.total

    @property
    def counts(self) -> dict[int, int]:
        return {k: n for k, n in enumerate(self._counts) if n}

    @property
    def weights(self) -> dict[int, float]:
        return {k: w for k, w in enumerate(self._weights) if self._counts[k]}

    def _ensure_class(self, k: int) -> None:
        while len(self._counts) <= k:
            self._a.append(self.attachment(len(self._a)))
            self._counts.append(0)
            self._weights.append(0.0)
            self._pools.append(ClassPool())
        if k >= self._tree.capacity:
            self._tree = FenwickTree.from_values(self._weights, capacity=2 * (k + 1))

    def _set_count(self, k: int, count: int) -> None:
        self._counts[k] = count
        weight = count * self._a[k]
        self._tree.add(k, weight - self._weights[k])
        self._weights[k] = weight

    def add_node(self) -> int:
        node = len(self.degree)
        self.degree.append(0)
        self._ensure_class(0)
        self._pools[0].add(node)
        self._set_count(0, self._counts[0] + 1)
        return node

    def increment(self, node: int) -> None:
        k = self.degree[node]
        self._ensure_class(k + 1)
        self.degree[node] = k + 1
        self._pools[k].remove(node)
        self._pools[k + 1].add(node)
        self._set_count(k, self._counts[k] - 1)
        self._set_count(k + 1, self._counts[k + 1] + 1)
        self._updates += 1
        if self._updates % self.rebuild_every == 0:
            self.rebuild()

    def sample(self, u_class: float, u_member: float) -> int:
        """Map two uniform variates in ``[0, 1)`` to a node.

        ``u_class`` selects the degree class through the prefix sums, ``u_member`` a member of
        that class.
        """
        if not self.degree:
            raise IndexError("Cannot sample from an empty network")
        k = self._tree.find(u_class * self._tree.total)
        if k >= len(self._counts) or self._counts[k] == 0:
            k = self._nearest_populated(k)
        pool = self._pools[k]
        return pool[min(int(u_member * len(pool)), len(pool) - 1)]

    def _nearest_populated(self, k: int) -> int:
        # only reachable through rounding at the boundary of an empty class
        k = min(k, len(self._counts) - 1)
        for candidate in range(k, -1, -1):
            if self._counts[candidate]:
                return candidate
        return next(c for c in range(k, len(self._counts)) if self._counts[c])

    def class_of(self, node: int) -> int:
        """The degree class whose pool currently holds ``node``."""
        return next(k for k, pool in enumerate(self._pools) if node in pool)

    def probabilities(self) -> dict[int, float]:
        """Exact class probabilities ``w(k) / S`` derived from the current counts."""
        total, weights = self.recompute()
        return {k: w / total for k, w in weights.items()}

    def recompute(self) -> tuple[float, dict[int, float]]:
        """Class weights and their total computed from scratch."""
        weights = {k: n * self.attachment(k) for k, n in enumerate(self._counts) if n}
        return math.fsum(weights.values()), weights

    def rebuild(self) -> None:
        self._weights = [n * a for n, a in zip(self._counts, self._a)]
        self._tree = FenwickTree.from_values(self._weights, capacity=self._tree.capacity)
