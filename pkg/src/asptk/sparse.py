"""Immutable sparse matrices in canonical CSR form.

The arrays are kept as plain numpy (sorted columns per row, no duplicates,
no stored value below PRUNE_TOL); a scipy view is built on first use for
products with large operands.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

PRUNE_TOL = 1e-14
_SMALL = 64  # below this many rows products go through dense numpy


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    shape: tuple[int, int]
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray

    # constructors

    @classmethod
    def from_coo(cls, shape, rows, cols, vals) -> "SparseMatrix":
        nr, nc = int(shape[0]), int(shape[1])
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.asarray(vals, dtype=complex).ravel()
        if rows.size and (rows.min() < 0 or rows.max() >= nr or cols.min() < 0 or cols.max() >= nc):
            raise ValueError(f"index out of range for shape {(nr, nc)}")
        key = rows * nc + cols
        order = np.argsort(key, kind="stable")
        key, vals = key[order], vals[order]
        if key.size:
            uniq, start = np.unique(key, return_index=True)
            if uniq.size != key.size:
                vals = np.add.reduceat(vals, start)
            key = uniq
        keep = np.abs(vals) >= PRUNE_TOL
        key, vals = key[keep], vals[keep]
        r = key // nc if nc else key
        indptr = np.searchsorted(r, np.arange(nr + 1), side="left").astype(np.int64)
        return cls((nr, nc), _frozen(indptr), _frozen((key - r * nc).astype(np.int64)), _frozen(vals))

    @classmethod
    def from_scipy(cls, m) -> "SparseMatrix":
        c = sp.coo_array(m)
        return cls.from_coo(c.shape, c.row, c.col, c.data)

    @classmethod
    def from_dense(cls, a: np.ndarray, tol: float = PRUNE_TOL) -> "SparseMatrix":
        a = np.atleast_2d(np.asarray(a, dtype=complex))
        r, c = np.nonzero(np.abs(a) >= tol)
        return cls.from_coo(a.shape, r, c, a[r, c])

    @classmethod
    def from_triples(cls, shape: tuple[int, int], triples: Iterable[tuple[int, int, complex]]) -> "SparseMatrix":
        t = list(triples)
        if not t:
            return cls.from_coo(shape, [], [], [])
        r, c, v = zip(*t)
        return cls.from_coo(shape, r, c, v)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls.permutation(range(n))

    @classmethod
    def permutation(cls, cols: Sequence[int]) -> "SparseMatrix":
        """Row r has a single 1 in column cols[r]."""
        cols = np.asarray(list(cols), dtype=np.int64)
        n = cols.size
        if not np.array_equal(np.sort(cols), np.arange(n)):
            raise ValueError("not a permutation")
        return cls((n, n), _frozen(np.arange(n + 1, dtype=np.int64)), _frozen(cols), _frozen(np.ones(n, dtype=complex)))

    @classmethod
    def diag(cls, values: Sequence[complex]) -> "SparseMatrix":
        v = np.asarray(values, dtype=complex)
        return cls.from_coo((v.size, v.size), np.arange(v.size), np.arange(v.size), v)

    # views

    @property
    def nnz(self) -> int:
        return int(self.data.size)

    @cached_property
    def rows(self) -> np.ndarray:
        return np.repeat(np.arange(self.shape[0]), np.diff(self.indptr))

    @cached_property
    def csr(self) -> sp.csr_array:
        return sp.csr_array((self.data, self.indices, self.indptr), shape=self.shape)

    @cached_property
    def triples(self) -> tuple[tuple[int, int, complex], ...]:
        return tuple((int(r), int(c), complex(v)) for r, c, v in zip(self.rows, self.indices, self.data))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=complex)
        out[self.rows, self.indices] = self.data
        return out

    def max_row_nnz(self) -> int:
        return int(np.max(np.diff(self.indptr), initial=0))

    def is_permutation(self) -> bool:
        n, m = self.shape
        if n != m or self.nnz != n:
            return False
        return bool(
            np.all(self.data == 1)
            and np.all(np.diff(self.indptr) == 1)
            and np.array_equal(np.sort(self.indices), np.arange(n))
        )

    def is_identity(self) -> bool:
        n, m = self.shape
        return n == m and self.nnz == n and bool(np.all(self.indices == np.arange(n)) and np.all(self.data == 1))

    def __matmul__(self, other):
        if isinstance(other, SparseMatrix):
            if self.shape[1] != other.shape[0]:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            if max(self.shape[0], other.shape[1]) <= _SMALL:
                return SparseMatrix.from_dense(self.to_dense() @ other.to_dense())
            return SparseMatrix.from_scipy(self.csr @ other.csr)
        other = np.asarray(other)
        if self.shape[0] <= _SMALL:
            return self.to_dense() @ other
        return self.csr @ other

    def __repr__(self):
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz})"


def block_diag(blocks: Sequence[SparseMatrix | np.ndarray]) -> SparseMatrix:
    mats = [b if isinstance(b, SparseMatrix) else SparseMatrix.from_dense(b) for b in blocks]
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    indptr, indices = [np.zeros(1, dtype=np.int64)], []
    c0 = nz = 0
    for m in mats:
        indptr.append(m.indptr[1:] + nz)
        indices.append(m.indices + c0)
        nz += m.nnz
        c0 += m.shape[1]
    data = np.concatenate([m.data for m in mats]) if mats else np.zeros(0, complex)
    idx = np.concatenate(indices) if indices else np.zeros(0, np.int64)
    return SparseMatrix((rows, cols), _frozen(np.concatenate(indptr)), _frozen(idx), _frozen(data))


def hstack(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    rows = blocks[0].shape[0]
    if any(b.shape[0] != rows for b in blocks):
        raise ValueError("hstack needs equal row counts")
    r, c, v, c0 = [], [], [], 0
    for b in blocks:
        r.append(b.rows)
        c.append(b.indices + c0)
        v.append(b.data)
        c0 += b.shape[1]
    return SparseMatrix.from_coo((rows, c0), np.concatenate(r), np.concatenate(c), np.concatenate(v))
