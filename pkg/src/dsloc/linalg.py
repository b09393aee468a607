"""Sparse exact linear algebra over the rationals.

Vectors are ``dict[int, Fraction]`` with zero entries omitted.  All routines
are exact; nothing here touches floating point.

Pivot rule (both backends): columns are scanned in the requested order and,
within a column, the candidate row whose entry has the smallest bit size
(``|num| * den``) is chosen, ties going to the lower row index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import ContainmentError, DslocError


def _bitsize(x: Fraction) -> int:
    return (abs(x.numerator) * x.denominator).bit_length()


def _clean(v: dict) -> dict:
    return {k: c for k, c in v.items() if c}


@dataclass
class SparseMatrix:
    rows: int
    cols: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise IndexError(f"entry ({r}, {c}) outside a {self.rows}x{self.cols} matrix")
            if v:
                clean[(r, c)] = Fraction(v)
        self.entries = clean

    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> "SparseMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, {(i, j): x for i, row in enumerate(data) for j, x in enumerate(row) if x})

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[dict]) -> "SparseMatrix":
        return cls(rows, len(columns), {(r, j): x for j, col in enumerate(columns) for r, x in col.items()})

    def row_dicts(self) -> list:
        out = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def column_dicts(self) -> list:
        out = [dict() for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            out[c][r] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def to_dense(self) -> list:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def apply(self, v: dict) -> dict:
        out: dict = {}
        for (r, c), x in self.entries.items():
            if c in v:
                out[r] = out.get(r, 0) + x * v[c]
        return _clean(out)


# --- elimination kernels ------------------------------------------------------------


def rref(vectors: Iterable[dict], order: Sequence[int] | None = None) -> list:
    """Reduced row echelon form of a list of sparse row vectors.

    ``order`` ranks the columns (earlier = pivots preferred); by default the
    natural integer order.  Returns ``[(pivot_col, row)]`` with ``row[pivot] == 1``
    and every other returned row zero at that column, sorted by pivot rank.
    """
    rows = {i: {k: Fraction(x) for k, x in v.items() if x} for i, v in enumerate(vectors)}
    rows = {i: r for i, r in rows.items() if r}
    if not rows:
        return []
    by_col: dict = {}
    for i, r in rows.items():
        for k in r:
            by_col.setdefault(k, set()).add(i)
    if order is None:
        order = sorted(by_col)
    else:
        rank_of = {c: n for n, c in enumerate(order)}
        missing = [c for c in by_col if c not in rank_of]
        if missing:
            order = list(order) + sorted(missing)
    pivots = []
    for col in order:
        cands = by_col.get(col)
        if not cands:
            continue
        best = min(cands, key=lambda i: (_bitsize(rows[i][col]), i))
        prow = rows.pop(best)
        for k in prow:
            by_col[k].discard(best)
        inv = 1 / prow[col]
        prow = {k: x * inv for k, x in prow.items()}
        for i in list(by_col.get(col, ())):
            r = rows[i]
            f = r[col]
            for k, x in prow.items():
                nv = r.get(k, 0) - f * x
                if nv:
                    if k not in r:
                        by_col.setdefault(k, set()).add(i)
                    r[k] = nv
                else:
                    if k in r:
                        del r[k]
                        by_col[k].discard(i)
            if not r:
                del rows[i]
        pivots.append((col, prow))
    # back substitution
    for n in range(len(pivots) - 1, -1, -1):
        col, prow = pivots[n]
        for m in range(n):
            other = pivots[m][1]
            f = other.get(col)
            if f:
                for k, x in prow.items():
                    nv = other.get(k, 0) - f * x
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
    return pivots


def _integer_rows(M: SparseMatrix) -> list:
    out = []
    for r in M.row_dicts():
        if not r:
            continue
        den = lcm(*(x.denominator for x in r.values()))
        out.append({k: int(x * den) for k, x in r.items()})
    return out


def rank_fraction_free(M: SparseMatrix) -> int:
    """Rank by integer (fraction-free) elimination with content removal."""
    rows = _integer_rows(M)
    rank = 0
    for col in range(M.cols):
        cands = [i for i, r in enumerate(rows) if r.get(col)]
        if not cands:
            continue
        best = min(cands, key=lambda i: (abs(rows[i][col]).bit_length(), i))
        p = rows.pop(best)
        a = p[col]
        rank += 1
        new_rows = []
        for r in rows:
            b = r.get(col)
            if b:
                keys = set(r) | set(p)
                r = {k: a * r.get(k, 0) - b * p.get(k, 0) for k in keys}
                r = {k: x for k, x in r.items() if x}
                if r:
                    g = 0
                    for x in r.values():
                        g = gcd(g, x)
                    r = {k: x // g for k, x in r.items()}
            if r:
                new_rows.append(r)
        rows = new_rows
    return rank


def rank_naive(M: SparseMatrix) -> int:
    """Dense Gaussian elimination over Fraction; independent cross-check backend."""
    A = M.to_dense()
    rank = 0
    for col in range(M.cols):
        piv = next((i for i in range(rank, M.rows) if A[i][col]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for i in range(rank + 1, M.rows):
            if A[i][col]:
                f = A[i][col] / A[rank][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank


def rank(M: SparseMatrix) -> int:
    return rank_fraction_free(M)


# --- subspaces --------------------------------------------------------------------------


class SubspaceBasis:
    """Subspace of Q^n held as reduced echelon rows (pivots strictly increasing)."""

    def __init__(self, ambient: int, vectors: Iterable[dict] = ()):
        self.ambient = ambient
        for v in vectors:
            for k in v:
                if not 0 <= k < ambient:
                    raise IndexError(f"coordinate {k} outside ambient dimension {ambient}")
        piv = rref(vectors)
        self.pivots = [p for p, _ in piv]
        self.vectors = [r for _, r in piv]
        self._pivot_rows = dict(piv)

    @classmethod
    def full(cls, ambient: int) -> "SubspaceBasis":
        return cls(ambient, [{i: Fraction(1)} for i in range(ambient)])

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self):
        return self.dim

    def reduce(self, v: dict) -> dict:
        """Remainder of ``v`` after eliminating every pivot column."""
        v = {k: Fraction(x) for k, x in v.items() if x}
        for p in self.pivots:
            f = v.get(p)
            if f:
                for k, x in self._pivot_rows[p].items():
                    nv = v.get(k, 0) - f * x
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        return v

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)

    def contains_subspace(self, other: "SubspaceBasis") -> bool:
        return all(self.contains(v) for v in other.vectors)

    def __eq__(self, other):
        if not isinstance(other, SubspaceBasis):
            return NotImplemented
        return self.ambient == other.ambient and self.pivots == other.pivots and self.vectors == other.vectors

    def __add__(self, other: "SubspaceBasis") -> "SubspaceBasis":
        _check_ambient(self, other)
        return SubspaceBasis(self.ambient, self.vectors + other.vectors)


def _check_ambient(A: SubspaceBasis, B: SubspaceBasis):
    if A.ambient != B.ambient:
        raise DslocError(f"ambient dimensions differ: {A.ambient} vs {B.ambient}")


def contains(A: SubspaceBasis, v: dict) -> bool:
    return A.contains(v)


def intersect(A: SubspaceBasis, B: SubspaceBasis) -> SubspaceBasis:
    """Zassenhaus: echelonise rows (a|a) and (b|0); rows vanishing on the left block span A∩B."""
    _check_ambient(A, B)
    n = A.ambient
    rows = []
    for a in A.vectors:
        row = dict(a)
        row.update({k + n: x for k, x in a.items()})
        rows.append(row)
    rows += [dict(b) for b in B.vectors]
    out = []
    for p, r in rref(rows):
        if p >= n:
            out.append({k - n: x for k, x in r.items()})
    return SubspaceBasis(n, out)


def restrict_to_coordinates(vectors: Iterable[dict], keep: Iterable[int], ambient: int) -> SubspaceBasis:
    """span(vectors) ∩ span(e_k : k in keep).

    Columns outside ``keep`` are ranked first, so echelon rows whose pivot
    lies in ``keep`` vanish on every other coordinate and span the intersection.
    """
    keep = set(keep)
    vectors = list(vectors)
    cols = set()
    for v in vectors:
        cols.update(v)
    outside = sorted(c for c in cols if c not in keep)
    inside = sorted(c for c in cols if c in keep)
    out = [r for p, r in rref(vectors, outside + inside) if p in keep]
    return SubspaceBasis(ambient, out)


def quotient_dim(A: SubspaceBasis, B: SubspaceBasis) -> int:
    _check_ambient(A, B)
    for b in B.vectors:
        if not A.contains(b):
            raise ContainmentError(f"subspace is not contained in the ambient subspace (witness {b})")
    return A.dim - B.dim


def kernel_basis(M: SparseMatrix) -> SubspaceBasis:
    piv = rref(M.row_dicts())
    pivot_cols = {p for p, _ in piv}
    vectors = []
    for f in range(M.cols):
        if f in pivot_cols:
            continue
        v = {f: Fraction(1)}
        for p, r in piv:
            x = r.get(f)
            if x:
                v[p] = -x
        vectors.append(v)
    return SubspaceBasis(M.cols, vectors)


def image_basis(M: SparseMatrix) -> SubspaceBasis:
    return SubspaceBasis(M.rows, M.column_dicts())


def solve(M: SparseMatrix, b: dict):
    """One solution x of M x = b (free variables set to 0), or None if inconsistent."""
    rows = M.row_dicts()
    aug = M.cols
    for r, x in b.items():
        if x:
            rows[r] = dict(rows[r])
            rows[r][aug] = Fraction(x)
    x = {}
    for p, r in rref(rows):
        if p == aug:
            return None
        val = r.get(aug)
        if val:
            x[p] = val
    return x


def extend_basis(base: SubspaceBasis, candidates: Iterable[dict]) -> list:
    """Pick candidates in order that are independent modulo ``base`` (and each other)."""
    current = SubspaceBasis(base.ambient, base.vectors)
    chosen = []
    for v in candidates:
        if not current.contains(v):
            chosen.append(v)
            current = SubspaceBasis(base.ambient, current.vectors + [v])
    return chosen
