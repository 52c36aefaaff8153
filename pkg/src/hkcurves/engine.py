"""Hilbert-Kunz engine for plane-curve cones.

Computes HK(q) = len(S/(f, x^q, y^q, z^q)) for S = GF(p^k)[x, y, z] and
q = p^n.  The quotient splits along the grading: writing T(j) for the
number of degree-j monomials with all exponents < q, the degree-j piece
has dimension T(j) - rank(B_{j-d}) where B_n is the multiplication-by-f
map from the truncated degree-n piece to the truncated degree-(n+d)
piece.  Summing over j and using sum_j T(j) = q^3 recovers
HK(q) = q^3 - sum_n rank(B_n).

Two exact structural facts keep the work proportional to the interesting
transition zone instead of the whole q^3 space:

* low degrees (j < q): no monomial of f*m can overflow the q-box, so the
  block is the untruncated multiplication map and is injective --
  rank(B_n) = T(n) with no elimination;
* once some degree-j piece of the quotient vanishes, every higher piece
  vanishes too (the quotient is generated in degree 1 over the field), so
  the degree loop stops at the first zero cokernel.

Within the zone, block ranks use a staircase decomposition: domain
monomials m whose whole translate m + supp(f) stays inside the q-box give
exact product columns f*m with pairwise distinct lex-leading monomials --
an upper-staircase family that is independent for free.  Only the O(d*q)
boundary columns are reduced against that staircase (a normal-form table
filled in one ascending-lex sweep), and a small residual matrix is
eliminated by the dense kernels.  A plain dense block path is kept for
small sizes and for differential tests, and `colength_naive` provides the
grading-free oracle: one rank of the full q^3 x q^3 multiplication matrix.
"""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .gf import FieldSpec
from .linalg import FpkMatrix, index_tables, rank_gf2, rank_modp
from .poly import HomogeneousPoly, Monomial, PlaneCurve, Poly, partial

log = logging.getLogger(__name__)

# blocks with at most this many cells are eliminated densely
DENSE_CELL_LIMIT = 250_000

# naive-oracle guards, keyed by characteristic
ORACLE_CUTOFF = {2: 8, 3: 9}
ORACLE_CUTOFF_DEFAULT = 5


class EngineError(RuntimeError):
    pass


class ResourceLimitError(EngineError):
    """Raised when a guard trips; carries whatever samples were finished."""

    def __init__(self, message: str, partial: list["HKSample"] | None = None):
        super().__init__(message)
        self.partial = partial or []


@dataclass(frozen=True)
class HKSample:
    """One Hilbert-Kunz function value: colength of (f) + (x^q, y^q, z^q)."""

    n: int
    q: int
    colength: int


@dataclass
class GradedBlock:
    """Degree-n piece of multiplication by f on the truncated monomial space."""

    degree: int
    domain_basis: list[Monomial]
    codomain_basis: list[Monomial]
    matrix: FpkMatrix


def truncated_basis(n: int, q: int) -> list[Monomial]:
    """Monomials x^a y^b z^c with a+b+c = n and a, b, c < q, ascending lex."""
    if n < 0:
        return []
    out: list[Monomial] = []
    a_lo = max(0, n - 2 * (q - 1))
    a_hi = min(n, q - 1)
    for a in range(a_lo, a_hi + 1):
        rem = n - a
        b_lo = max(0, rem - (q - 1))
        b_hi = min(rem, q - 1)
        for b in range(b_lo, b_hi + 1):
            out.append((a, b, rem - b))
    return out


def truncated_count(n: int, q: int) -> int:
    """Closed-form |truncated_basis(n, q)|: coefficient of t^n in ((1-t^q)/(1-t))^3."""
    if n < 0:
        return 0
    total = 0
    sign = 1
    for i in range(4):
        m = n - i * q
        if m >= 0:
            total += sign * math.comb(3, i) * math.comb(m + 2, 2)
        sign = -sign
    return max(total, 0)


def _sorted_terms(f: HomogeneousPoly):
    return sorted(f.terms.items(), key=lambda kv: kv[0], reverse=True)


def graded_block(f: HomogeneousPoly, n: int, q: int) -> GradedBlock:
    """Materialize block n as an explicit |codomain| x |domain| matrix."""
    dom = truncated_basis(n, q)
    cod = truncated_basis(n + f.d, q)
    mat = FpkMatrix.zeros(f.spec, len(cod), len(dom))
    row_of = {mu: i for i, mu in enumerate(cod)}
    for col, m in enumerate(dom):
        for t, coeff in f.terms.items():
            mu = (m[0] + t[0], m[1] + t[1], m[2] + t[2])
            if mu[0] < q and mu[1] < q and mu[2] < q:
                mat.idx[row_of[mu], col] = coeff.index()
    return GradedBlock(n, dom, cod, mat)


def block_rank(f: HomogeneousPoly, n: int, q: int, method: str = "auto") -> int:
    """Rank of the degree-n graded block; `method` in {auto, dense, staircase}."""
    n_dom = truncated_count(n, q)
    n_cod = truncated_count(n + f.d, q)
    if n_dom == 0 or n_cod == 0:
        return 0
    if method == "dense" or (method == "auto" and n_dom * n_cod <= DENSE_CELL_LIMIT):
        return graded_block(f, n, q).matrix.rank()
    if method not in ("auto", "staircase"):
        raise ValueError(f"unknown block rank method {method!r}")
    return _block_rank_staircase(f, n, q)


def _block_rank_staircase(f: HomogeneousPoly, n: int, q: int) -> int:
    """Staircase-pivot rank of block n.

    Exact-product columns (domain monomials whose full f-translate avoids
    truncation) are independent with known distinct leads; every other
    column is rewritten to a normal form supported off the staircase, and
    the surviving small matrix is eliminated densely.
    """
    spec = f.spec
    p = spec.p
    dom = truncated_basis(n, q)
    cod = truncated_basis(n + f.d, q)
    terms = _sorted_terms(f)
    lt = terms[0][0]
    box = tuple(q - max(t[i] for t, _ in terms) for i in range(3))

    hard = [m for m in dom if not (m[0] < box[0] and m[1] < box[1] and m[2] < box[2])]
    n_c0 = len(dom) - len(hard)
    if not hard:
        return n_c0

    row_of = {mu: i for i, mu in enumerate(cod)}
    # remainder coordinates: codomain monomials that are not staircase leads
    def _lead_of_exact(mu: Monomial) -> bool:
        a, b, c = mu[0] - lt[0], mu[1] - lt[1], mu[2] - lt[2]
        return a >= 0 and b >= 0 and c >= 0 and a < box[0] and b < box[1] and c < box[2]

    rem_col: dict[Monomial, int] = {}
    for mu in cod:
        if not _lead_of_exact(mu):
            rem_col[mu] = len(rem_col)
    width = len(rem_col)

    if spec.k == 1:
        nf = _nf_table_prime(cod, row_of, rem_col, terms, box, p)
        residual = np.zeros((width, len(hard)), dtype=np.int64)
        acc = np.empty(width, dtype=np.int64)
        tmp = np.empty(width, dtype=np.int64)
        for col, h in enumerate(hard):
            acc[:] = 0
            for t, coeff in terms:
                mu = (h[0] + t[0], h[1] + t[1], h[2] + t[2])
                if mu[0] < q and mu[1] < q and mu[2] < q:
                    np.multiply(nf[row_of[mu]], int(coeff.index()), out=tmp, dtype=np.int64)
                    acc += tmp
            residual[:, col] = acc % p
        if p == 2:
            res_rank = rank_gf2(residual != 0)
        else:
            res_rank = rank_modp(residual, p)
    else:
        add_t, mul_t = index_tables(spec)
        nf = _nf_table_ext(cod, row_of, rem_col, terms, box, spec, add_t, mul_t)
        residual = np.zeros((width, len(hard)), dtype=nf.dtype)
        for col, h in enumerate(hard):
            acc = np.zeros(width, dtype=nf.dtype)
            for t, coeff in terms:
                mu = (h[0] + t[0], h[1] + t[1], h[2] + t[2])
                if mu[0] < q and mu[1] < q and mu[2] < q:
                    acc = add_t[acc, mul_t[coeff.index()][nf[row_of[mu]]]]
            residual[:, col] = acc
        res_rank = FpkMatrix(spec, residual).rank()
    return n_c0 + res_rank


def _nf_table_prime(cod, row_of, rem_col, terms, box, p):
    """Normal forms of all codomain monomials w.r.t. the staircase, GF(p)."""
    lt, c_lt = terms[0]
    rest = terms[1:]
    scale = (-pow(int(c_lt.index()), p - 2, p)) % p
    nf = np.zeros((len(cod), len(rem_col)), dtype=np.uint8)
    width = len(rem_col)
    acc = np.empty(width, dtype=np.int64)
    tmp = np.empty(width, dtype=np.int64)
    for i, mu in enumerate(cod):  # ascending lex: all rewrites point backwards
        a, b, c = mu[0] - lt[0], mu[1] - lt[1], mu[2] - lt[2]
        if a >= 0 and b >= 0 and c >= 0 and a < box[0] and b < box[1] and c < box[2]:
            if p == 2:
                row = nf[i]
                for t, _ in rest:
                    row ^= nf[row_of[(a + t[0], b + t[1], c + t[2])]]
            else:
                acc[:] = 0
                for t, coeff in rest:
                    np.multiply(
                        nf[row_of[(a + t[0], b + t[1], c + t[2])]],
                        int(coeff.index()),
                        out=tmp,
                        dtype=np.int64,
                    )
                    acc += tmp
                acc *= scale
                nf[i] = acc % p
        else:
            nf[i, rem_col[mu]] = 1
    return nf


def _nf_table_ext(cod, row_of, rem_col, terms, box, spec, add_t, mul_t):
    """Normal-form table over GF(p^k), k >= 2, via index-arithmetic tables."""
    lt, c_lt = terms[0]
    rest = terms[1:]
    scale_idx = (-(c_lt.inverse())).index()
    scale_row = mul_t[scale_idx]
    nf = np.zeros((len(cod), len(rem_col)), dtype=add_t.dtype)
    one_idx = spec.one().index()
    for i, mu in enumerate(cod):
        a, b, c = mu[0] - lt[0], mu[1] - lt[1], mu[2] - lt[2]
        if a >= 0 and b >= 0 and c >= 0 and a < box[0] and b < box[1] and c < box[2]:
            acc = np.zeros(len(rem_col), dtype=add_t.dtype)
            for t, coeff in rest:
                contrib = mul_t[coeff.index()][nf[row_of[(a + t[0], b + t[1], c + t[2])]]]
                acc = add_t[acc, contrib]
            nf[i] = scale_row[acc]
        else:
            nf[i, rem_col[mu]] = one_idx
    return nf


def _validate_q(spec: FieldSpec, q: int) -> int:
    """Return n with q = p^n, or raise."""
    if q < 1:
        raise EngineError(f"q must be positive, got {q}")
    n = 0
    qq = q
    while qq % spec.p == 0:
        qq //= spec.p
        n += 1
    if qq != 1:
        raise EngineError(f"q = {q} is not a power of the characteristic {spec.p}")
    return n


def colength(
    f: HomogeneousPoly,
    q: int,
    *,
    method: str = "auto",
    threads: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> HKSample:
    """len(S/(f, x^q, y^q, z^q)) as an exact integer, q a power of char.

    Equals q^3 minus the summed ranks of the graded multiplication-by-f
    blocks for 0 <= n <= 3(q-1) - d.
    """
    n_frob = _validate_q(f.spec, q)
    d = f.d
    j_max = 3 * (q - 1)
    total = 0
    j = 0
    # closed-form zone: either no map lands in degree j, or the block is the
    # untruncated multiplication map, which is injective
    while j <= j_max:
        if j < d:
            total += truncated_count(j, q)
        elif j < q:
            total += truncated_count(j, q) - truncated_count(j - d, q)
        else:
            break
        j += 1
    if progress:
        progress(j, j_max + 1)

    workers = max(1, int(threads))
    if workers > 1:
        pool = ThreadPoolExecutor(max_workers=workers)
    else:
        pool = None
    try:
        while j <= j_max:
            batch = list(range(j, min(j + max(workers, 1), j_max + 1)))
            if pool is not None:
                ranks = list(pool.map(lambda jj: block_rank(f, jj - d, q, method), batch))
            else:
                ranks = [block_rank(f, jj - d, q, method) for jj in batch]
            stop = False
            for jj, r in zip(batch, ranks):
                dim_q = truncated_count(jj, q) - r
                if dim_q < 0:  # pragma: no cover - internal sanity
                    raise AssertionError("block rank exceeded codomain dimension")
                if dim_q == 0:
                    # the quotient algebra is standard graded: a zero piece
                    # forces every higher piece to vanish
                    stop = True
                    break
                total += dim_q
            if stop:
                break
            j = batch[-1] + 1
            if progress:
                progress(min(j, j_max + 1), j_max + 1)
    finally:
        if pool is not None:
            pool.shutdown(wait=False)
    return HKSample(n_frob, q, total)


def oracle_cutoff(p: int) -> int:
    return ORACLE_CUTOFF.get(p, ORACLE_CUTOFF_DEFAULT)


def colength_naive(f: HomogeneousPoly, q: int) -> HKSample:
    """Grading-free oracle: rank of the whole q^3 x q^3 multiplication map.

    Same contract as `colength`; refuses q beyond a per-characteristic
    cutoff so the dense matrix stays desk-sized.
    """
    spec = f.spec
    n_frob = _validate_q(spec, q)
    cutoff = oracle_cutoff(spec.p)
    if q > cutoff:
        raise ResourceLimitError(
            f"naive oracle refuses q = {q} > cutoff {cutoff} for p = {spec.p}"
        )
    basis = [(a, b, c) for a in range(q) for b in range(q) for c in range(q)]
    pos = {m: i for i, m in enumerate(basis)}
    size = len(basis)
    mat = FpkMatrix.zeros(spec, size, size)
    for col, m in enumerate(basis):
        for t, coeff in f.terms.items():
            mu = (m[0] + t[0], m[1] + t[1], m[2] + t[2])
            if mu[0] < q and mu[1] < q and mu[2] < q:
                mat.idx[pos[mu], col] = coeff.index()
    return HKSample(n_frob, q, size - mat.rank())


def hk_sequence(
    curve: PlaneCurve | HomogeneousPoly,
    n_max: int,
    *,
    cache: "SampleCache | None" = None,
    method: str = "auto",
    threads: int = 1,
    max_q: int | None = None,
    progress: Callable[[HKSample], None] | None = None,
) -> list[HKSample]:
    """HK samples for n = 0..n_max, smallest q first; deterministic.

    With a cache, previously computed colengths are reused and new ones
    appended, so an extended re-run only pays for the new depths.  A
    `max_q` guard raises ResourceLimitError carrying the finished samples.
    """
    f = curve.f if isinstance(curve, PlaneCurve) else curve
    if n_max < 0:
        raise EngineError("n_max must be >= 0")
    samples: list[HKSample] = []
    for n in range(n_max + 1):
        q = f.spec.p ** n
        if max_q is not None and q > max_q:
            raise ResourceLimitError(
                f"q = {q} exceeds the configured limit {max_q}", partial=samples
            )
        cached = cache.get(f, q) if cache is not None else None
        if cached is not None:
            sample = HKSample(n, q, cached)
        else:
            sample = colength(f, q, method=method, threads=threads)
            if cache is not None:
                cache.put(f, sample)
        samples.append(sample)
        log.debug("HK(%s) q=%d colength=%d", f, q, sample.colength)
        if progress:
            progress(sample)
    return samples


def smooth_check(curve: PlaneCurve) -> bool:
    """Certify smoothness over the algebraic closure by one rank.

    True iff the degree-N piece of (f, f_x, f_y, f_z) fills all of S_N for
    N = 3d - 3: the Jacobian ideal then has no projective zeros, so the
    curve has no singular points over any extension.  A full piece in one
    degree propagates upward, and N = 3d - 3 dominates the socle degree of
    a regular sequence of three forms of degree <= d, so a False answer is
    definitive rather than a too-small-N artifact.
    """
    f = curve.f
    spec = f.spec
    d = f.d
    big_n = 3 * d - 3
    target = [m for m in _degree_basis(big_n)]
    row_of = {mu: i for i, mu in enumerate(target)}
    gens: list[tuple[Poly, int]] = [(f, big_n - d)]
    for v in ("x", "y", "z"):
        pf = partial(f, v)
        if pf is not None:
            gens.append((pf, big_n - d + 1))
    rows: list[np.ndarray] = []
    for g, cof_deg in gens:
        for m in _degree_basis(cof_deg):
            row = np.zeros(len(target), dtype=np.int64)
            for t, coeff in g.terms.items():
                mu = (m[0] + t[0], m[1] + t[1], m[2] + t[2])
                row[row_of[mu]] = coeff.index()
            rows.append(row)
    dt = np.uint8 if spec.order <= 256 else (np.uint16 if spec.order <= 65536 else np.int64)
    mat = FpkMatrix(spec, np.array(rows, dtype=dt))
    return mat.rank() == len(target)


def _degree_basis(n: int) -> list[Monomial]:
    out = []
    for a in range(n + 1):
        for b in range(n - a + 1):
            out.append((a, b, n - a - b))
    return out


# ---------------------------------------------------------------------------
# emission and caching
# ---------------------------------------------------------------------------

def samples_to_csv(samples: Iterable[HKSample]) -> str:
    lines = ["n,q,colength"]
    for s in samples:
        lines.append(f"{s.n},{s.q},{s.colength}")
    return "\n".join(lines) + "\n"


def samples_to_json(samples: Iterable[HKSample]) -> str:
    return json.dumps(
        [{"n": s.n, "q": s.q, "colength": s.colength} for s in samples], indent=2
    ) + "\n"


class SampleCache:
    """Line-oriented JSON cache keyed by (field, canonical polynomial, q)."""

    def __init__(self, path: str):
        self.path = path
        self._data: dict[tuple[str, str, int], int] = {}
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    key = (rec["field"], rec["poly"], int(rec["q"]))
                    self._data[key] = int(rec["colength"])

    @staticmethod
    def _key(f: HomogeneousPoly, q: int) -> tuple[str, str, int]:
        return (str(f.spec), str(f), q)

    def get(self, f: HomogeneousPoly, q: int) -> int | None:
        return self._data.get(self._key(f, q))

    def put(self, f: HomogeneousPoly, sample: HKSample) -> None:
        key = self._key(f, sample.q)
        if key in self._data:
            return
        self._data[key] = sample.colength
        rec = {
            "field": key[0],
            "poly": key[1],
            "n": sample.n,
            "q": sample.q,
            "colength": sample.colength,
        }
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec) + "\n")
