"""Union-find over the coupon graph, keeping the class profile (s, p, l).

s counts singleton components, p counts size-2 components and l is the
number of coupons in components of size >= 3. Labels are deducible exactly
for coupons in components of size >= 3, so all four stopping rules are
functions of (s, p):

    covered          s == 0
    almost covered   s <= 1
    variant II done  s == 0 and p == 0
    variant I done   s <= 1 and p == 0
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ClassTransition:
    before: tuple[int, int]
    after: tuple[int, int]
    merged: bool


class ComponentTracker:
    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"tracker needs n >= 1, got {n}")
        self.n = n
        self.parent = list(range(n))
        self.size = [1] * n
        self.s = n
        self.p = 0
        self.edges = 0

    @property
    def large_mass(self) -> int:
        return self.n - self.s - 2 * self.p

    def find(self, x: int) -> int:
        root = x
        parent = self.parent
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def add_edge(self, u: int, v: int) -> ClassTransition:
        if u == v:
            raise ValueError(f"self-loop {u}-{v}: a group has distinct coupons")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"coupon ids out of range for n={self.n}: {u}, {v}")
        before = (self.s, self.p)
        self.edges += 1
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return ClassTransition(before, before, False)

        for size in (self.size[ru], self.size[rv]):
            if size == 1:
                self.s -= 1
            elif size == 2:
                self.p -= 1
        merged_size = self.size[ru] + self.size[rv]
        if merged_size == 2:
            self.p += 1

        # union by size; ties go to the lower root id
        if (self.size[ru], -ru) < (self.size[rv], -rv):
            ru, rv = rv, ru
        self.parent[rv] = ru
        self.size[ru] = merged_size
        assert self.s >= 0 and self.p >= 0 and self.large_mass not in (1, 2)
        return ClassTransition(before, (self.s, self.p), True)

    def class_profile(self) -> tuple[int, int, int]:
        return self.s, self.p, self.large_mass

    def is_covered(self) -> bool:
        return self.s == 0

    def is_almost_covered(self) -> bool:
        return self.s <= 1

    def is_variant2_done(self) -> bool:
        return self.s == 0 and self.p == 0

    def is_variant1_done(self) -> bool:
        return self.s <= 1 and self.p == 0

    def components(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for x in range(self.n):
            groups.setdefault(self.find(x), []).append(x)
        return sorted(groups.values())

    def dump(self) -> str:
        """One component per line, ids ascending, lines ordered by smallest id."""
        return "".join(" ".join(map(str, comp)) + "\n" for comp in self.components())


def new_tracker(n: int) -> ComponentTracker:
    return ComponentTracker(n)
