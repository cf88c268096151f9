"""Row reduction over F_p.

Pivots are chosen deterministically: scan columns left to right and take
the first row (top to bottom) with a nonzero entry.
"""
from __future__ import annotations

from itertools import product
from typing import Iterator, Sequence

__all__ = ["rank_mod_p", "solve_mod_p", "AffineSolutionSpace"]


def _reduce(rows: list[list[int]], p: int, ncols: int) -> tuple[list[list[int]], list[int]]:
    rows = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank_mod_p(matrix: Sequence[Sequence[int]], p: int) -> int:
    if not matrix:
        return 0
    _, pivots = _reduce([list(r) for r in matrix], p, len(matrix[0]))
    return len(pivots)


class AffineSolutionSpace:
    """Solutions ``v0 + span(basis)`` of a consistent linear system over F_p."""

    def __init__(self, particular: list[int], basis: list[list[int]], p: int):
        self.particular = particular
        self.basis = basis
        self.p = p

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return self.p ** len(self.basis)

    def __iter__(self) -> Iterator[list[int]]:
        p = self.p
        n = len(self.particular)
        # lexicographic in the free coordinates
        for coeffs in product(range(p), repeat=len(self.basis)):
            v = list(self.particular)
            for c, b in zip(coeffs, self.basis):
                if c:
                    for i in range(n):
                        v[i] = (v[i] + c * b[i]) % p
            yield v


def solve_mod_p(matrix: Sequence[Sequence[int]], rhs: Sequence[int], p: int, ncols: int | None = None):
    """Solve ``matrix @ v = rhs`` over F_p.

    Returns ``(rank, space)`` where ``space`` is None when the system is
    inconsistent.
    """
    if ncols is None:
        ncols = len(matrix[0]) if matrix else 0
    if not matrix:
        basis = [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
        return 0, AffineSolutionSpace([0] * ncols, basis, p)
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = _reduce(aug, p, ncols)
    rank = len(pivots)
    for r in rows[rank:]:
        if r[ncols] % p:
            return rank, None
    particular = [0] * ncols
    for r, c in enumerate(pivots):
        particular[c] = rows[r][ncols]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, c in enumerate(pivots):
            v[c] = (-rows[r][f]) % p
        basis.append(v)
    return rank, AffineSolutionSpace(particular, basis, p)
