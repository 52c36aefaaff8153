"""Exact matrix rank over GF(p^k).

Matrices store element *indices* (the base-p encoding of coefficient
vectors) in a dense numpy array.  Rank dispatches to one of three exact
kernels:

* GF(2): rows packed into bytes, elimination by vectorized XOR -- the
  fast path that carries the characteristic-2 workload;
* GF(p), p odd: integer elimination with outer-product updates and lazy
  modular reduction (only pivot row/column are reduced each step; entry
  growth is bounded, so the dtype is chosen once up front);
* GF(p^k), k >= 2: restriction of scalars -- each entry is replaced by the
  k x k multiplication matrix of the element over GF(p), and the prime
  field kernels finish the job (the GF(p)-rank is exactly k times the
  GF(p^k)-rank).

A pure-Python elimination over FieldElement values (`rank_generic`) is
kept as the reference implementation for differential testing.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .gf import FieldElement, FieldSpec


def _index_dtype(order: int):
    if order <= 256:
        return np.uint8
    if order <= 65536:
        return np.uint16
    return np.int64


class FpkMatrix:
    """Dense matrix over GF(p^k), entries stored as element indices."""

    __slots__ = ("field", "idx")

    def __init__(self, field: FieldSpec, idx: np.ndarray):
        if idx.ndim != 2:
            raise ValueError("matrix data must be 2-dimensional")
        self.field = field
        self.idx = idx

    @property
    def nrows(self) -> int:
        return self.idx.shape[0]

    @property
    def ncols(self) -> int:
        return self.idx.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.idx.shape

    @classmethod
    def zeros(cls, field: FieldSpec, nrows: int, ncols: int) -> "FpkMatrix":
        return cls(field, np.zeros((nrows, ncols), dtype=_index_dtype(field.order)))

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence[FieldElement]]) -> "FpkMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        m = cls.zeros(field, nrows, ncols)
        for i, row in enumerate(rows):
            for j, e in enumerate(row):
                m.idx[i, j] = e.index()
        return m

    def get(self, i: int, j: int) -> FieldElement:
        return self.field.from_index(int(self.idx[i, j]))

    def set(self, i: int, j: int, e: FieldElement) -> None:
        self.idx[i, j] = e.index()

    def transpose(self) -> "FpkMatrix":
        return FpkMatrix(self.field, self.idx.T.copy())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FpkMatrix)
            and self.field == other.field
            and self.idx.shape == other.idx.shape
            and bool(np.array_equal(self.idx, other.idx))
        )

    def __repr__(self) -> str:
        return f"FpkMatrix({self.nrows}x{self.ncols} over {self.field})"

    def rank(self) -> int:
        return rank(self)


def rank(m: FpkMatrix) -> int:
    """Exact rank over GF(p^k); 0 for empty shapes."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    field = m.field
    if field.k == 1:
        if field.p == 2:
            return rank_gf2(m.idx != 0)
        return rank_modp(m.idx, field.p)
    blown = restrict_scalars(m.idx, field)
    if field.p == 2:
        r = rank_gf2(blown != 0)
    else:
        r = rank_modp(blown, field.p)
    if r % field.k:  # pragma: no cover - mathematically impossible
        raise AssertionError("restriction-of-scalars rank not divisible by k")
    return r // field.k


def rank_gf2(mat: np.ndarray) -> int:
    """Rank of a boolean/0-1 matrix over GF(2) via byte-packed elimination."""
    m, n = mat.shape
    if m == 0 or n == 0:
        return 0
    work = np.packbits(mat.astype(bool), axis=1)
    r = 0
    for c in range(n):
        byte, bit = c >> 3, 0x80 >> (c & 7)
        col = work[r:, byte] & bit
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            work[[r, piv]] = work[[piv, r]]
        below = work[r + 1:, byte] & bit
        hits = np.nonzero(below)[0]
        if hits.size:
            work[r + 1 + hits] ^= work[r]
        r += 1
        if r == m:
            break
    return r


def _elim_dtype(p: int, mindim: int):
    bound = (p - 1) + (mindim + 1) * (p - 1) ** 2
    if bound < 30000:
        return np.int16
    if bound < 2**31 - 1:
        return np.int32
    return np.int64


def rank_modp(mat: np.ndarray, p: int) -> int:
    """Rank over GF(p), p odd (works for p = 2 as well, only slower).

    Entries grow between reductions; only the pivot row and column are
    reduced mod p at each step, and the dtype is sized so the accumulated
    magnitude (p-1) + min(m,n)*(p-1)^2 never overflows.
    """
    m, n = mat.shape
    if m == 0 or n == 0:
        return 0
    work = mat.astype(_elim_dtype(p, min(m, n)))
    r = 0
    for c in range(n):
        col = work[r:, c]
        np.remainder(col, p, out=col)
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            work[[r, piv]] = work[[piv, r]]
        row = work[r, c:]
        np.remainder(row, p, out=row)
        inv = pow(int(work[r, c]), p - 2, p)
        fac = work[r + 1:, c] * inv % p
        if fac.size and n - c > 1:
            work[r + 1:, c + 1:] -= fac[:, None] * work[r, c + 1:][None, :]
        r += 1
        if r == m:
            break
    return r


@lru_cache(maxsize=None)
def _companion_table(field: FieldSpec) -> np.ndarray:
    """(order, k, k) array: slice e is the GF(p)-matrix of multiplication by
    the element with index e, columns indexed by the basis 1, t, ..., t^(k-1)."""
    k, order = field.k, field.order
    table = np.zeros((order, k, k), dtype=np.uint8)
    for e in range(order):
        elem = field.from_index(e)
        basis = field.one()
        t = field.gen()
        for j in range(k):
            prod = elem * basis
            for i in range(k):
                table[e, i, j] = prod.coeffs[i]
            basis = basis * t
    return table


def restrict_scalars(idx: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Blow an index matrix over GF(p^k) up to a (km) x (kn) matrix over GF(p)."""
    m, n = idx.shape
    k = field.k
    table = _companion_table(field)
    blocks = table[idx]  # (m, n, k, k)
    return np.ascontiguousarray(blocks.transpose(0, 2, 1, 3).reshape(m * k, n * k))


# ---------------------------------------------------------------------------
# index arithmetic tables (used by the engine's staircase path for k >= 2)
# ---------------------------------------------------------------------------

_TABLE_LIMIT = 1024


@lru_cache(maxsize=None)
def index_tables(field: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    """(add, mul) tables over element indices; capped at order 1024."""
    order = field.order
    if order > _TABLE_LIMIT:
        raise ValueError(f"index tables capped at order {_TABLE_LIMIT}, got {order}")
    dtype = _index_dtype(order)
    add = np.zeros((order, order), dtype=dtype)
    mul = np.zeros((order, order), dtype=dtype)
    elems = [field.from_index(i) for i in range(order)]
    for a in range(order):
        ea = elems[a]
        for b in range(a, order):
            s = (ea + elems[b]).index()
            add[a, b] = s
            add[b, a] = s
            pr = (ea * elems[b]).index()
            mul[a, b] = pr
            mul[b, a] = pr
    return add, mul


def rank_generic(m: FpkMatrix) -> int:
    """Reference Gaussian elimination on FieldElement values.

    Partial pivoting means "first nonzero entry" -- there is no magnitude
    to compare in exact arithmetic.  Quadratic-ish Python speed; meant for
    cross-checking the packed kernels, not production sizes.
    """
    field = m.field
    rows = [[m.get(i, j) for j in range(m.ncols)] for i in range(m.nrows)]
    nrows, ncols = m.nrows, m.ncols
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        prow = rows[r]
        for i in range(r + 1, nrows):
            lead = rows[i][c]
            if lead:
                factor = lead * inv
                rows[i] = [a - factor * b for a, b in zip(rows[i], prow)]
        r += 1
        if r == nrows:
            break
    return r


def random_matrix(field: FieldSpec, nrows: int, ncols: int, rng) -> FpkMatrix:
    idx = rng.integers(0, field.order, size=(nrows, ncols))
    return FpkMatrix(field, idx.astype(_index_dtype(field.order)))


def matmul(a: FpkMatrix, b: FpkMatrix) -> FpkMatrix:
    """Exact product, used only by small property tests."""
    if a.field != b.field or a.ncols != b.nrows:
        raise ValueError("shape or field mismatch")
    field = a.field
    out = FpkMatrix.zeros(field, a.nrows, b.ncols)
    for i in range(a.nrows):
        for j in range(b.ncols):
            acc = field.zero()
            for t in range(a.ncols):
                acc = acc + a.get(i, t) * b.get(t, j)
            out.set(i, j, acc)
    return out


__all__ = [
    "FpkMatrix",
    "rank",
    "rank_gf2",
    "rank_modp",
    "rank_generic",
    "restrict_scalars",
    "index_tables",
    "random_matrix",
    "matmul",
]
