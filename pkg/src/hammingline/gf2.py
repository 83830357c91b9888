"""Dense GF(2) linear algebra on uint8 numpy matrices."""

from __future__ import annotations

import numpy as np


def rref(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Row-reduced echelon form; returns (reduced copy, pivot column list)."""
    a = (np.asarray(mat, dtype=np.uint8) & 1).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        hit = np.flatnonzero(a[r:, c]) + r
        if len(hit) == 0:
            continue
        if hit[0] != r:
            a[[r, hit[0]]] = a[[hit[0], r]]
        elim = np.flatnonzero(a[:, c])
        for e in elim:
            if e != r:
                a[e] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(mat: np.ndarray) -> int:
    if mat.size == 0:
        return 0
    _, pivots = rref(mat)
    return len(pivots)


def nullspace(mat: np.ndarray) -> np.ndarray:
    """Basis (rows) of the right nullspace of mat over GF(2)."""
    a, pivots = rref(mat)
    rows, cols = a.shape
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            if a[r, f]:
                basis[i, p] = 1
    return basis


def solve(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    """One solution x of mat @ x = rhs over GF(2), or None if inconsistent."""
    a = (np.asarray(mat, dtype=np.uint8) & 1).copy()
    b = (np.asarray(rhs, dtype=np.uint8) & 1).copy()
    rows, cols = a.shape
    aug = np.concatenate([a, b.reshape(rows, 1)], axis=1)
    red, pivots = rref(aug)
    x = np.zeros(cols, dtype=np.uint8)
    for r, p in enumerate(pivots):
        if p == cols:
            return None  # pivot in the rhs column: inconsistent
        x[p] = red[r, cols]
    return x


class SpanChecker:
    """Membership tests against the row space of a fixed generator matrix."""

    def __init__(self, generators: np.ndarray):
        gens = np.asarray(generators, dtype=np.uint8) & 1
        if gens.size == 0:
            self._basis = np.zeros((0, gens.shape[1] if gens.ndim == 2 else 0), dtype=np.uint8)
            self._pivots: list[int] = []
            return
        self._basis, self._pivots = rref(gens)
        self._basis = self._basis[: len(self._pivots)]

    def contains(self, vec: np.ndarray) -> bool:
        v = (np.asarray(vec, dtype=np.uint8) & 1).copy()
        for row, p in zip(self._basis, self._pivots):
            if v[p]:
                v ^= row
        return not v.any()

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        """Canonical coset representative of vec modulo the row space."""
        v = (np.asarray(vec, dtype=np.uint8) & 1).copy()
        for row, p in zip(self._basis, self._pivots):
            if v[p]:
                v ^= row
        return v
