"""Pure-Python versions of the table kernels (fallback when the extension is absent)."""

from __future__ import annotations

from collections import deque
from typing import Sequence


def _rows(table) -> list[list[int]]:
    return table.tolist() if hasattr(table, "tolist") else [list(r) for r in table]


def find_nonassociative(table) -> tuple[int, int, int] | None:
    t = _rows(table)
    n = len(t)
    for a in range(n):
        ta = t[a]
        for b in range(n):
            tab = t[ta[b]]
            tb = t[b]
            for c in range(n):
                if tab[c] != ta[tb[c]]:
                    return (a, b, c)
    return None


def closure(table, gens: Sequence[int], identity: int) -> list[int]:
    t = _rows(table)
    seen = {identity}
    queue = deque([identity])
    while queue:
        row = t[queue.popleft()]
        for g in gens:
            y = row[g]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen)


def find_nonnormal(table, inverse, members: Sequence[int], conjugators: Sequence[int]):
    t = _rows(table)
    inv = list(inverse)
    mask = set(members)
    for g in conjugators:
        row, gi = t[g], inv[g]
        for h in members:
            if t[row[h]][gi] not in mask:
                return (g, h)
    return None


def find_nonhomomorphic(src, tgt, images):
    s, t = _rows(src), _rows(tgt)
    im = list(images)
    n = len(s)
    for a in range(n):
        sa, ta = s[a], t[im[a]]
        for b in range(n):
            if im[sa[b]] != ta[im[b]]:
                return (a, b)
    return None
