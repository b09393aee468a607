"""Windowed DS cohomology.

The algebra is infinite dimensional, so every computation happens on a
finite slice of monomials cut out by a :class:`DegreeWindow`.  Kernels are
computed on the report window W.  Images are computed from the inflated
window W+M and then intersected with span(W).  A result counts as stable
only if a strictly larger margin reproduces the same dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from .algebra import Monomial, Presentation, SuperPoly
from .derivation import Derivation, weights_of
from .errors import DerivationError, DslocError, UnstableResultError, WindowTooSmallError
from .linalg import (SparseMatrix, SubspaceBasis, extend_basis, kernel_basis, quotient_dim,
                     restrict_to_coordinates)
from .parser import monomial_sort_key, render, render_monomial

DEFAULT_MARGIN = 2


# --- windows and slices ---------------------------------------------------------------


@dataclass(frozen=True)
class DegreeWindow:
    """Exponent bounds per even variable plus an optional cap on sum |e_i|.

    Non-laurent variables without explicit bounds range over [0, cap].
    Odd variables are unconstrained (every subset is allowed).
    """

    bounds: tuple = ()  # ((name, lo, hi), ...)
    cap: int | None = None

    @classmethod
    def make(cls, bounds: Mapping[str, tuple] | None = None, cap: int | None = None) -> "DegreeWindow":
        items = []
        for name, (lo, hi) in sorted((bounds or {}).items()):
            if lo > hi:
                raise DslocError(f"window bound for {name!r} has lo > hi ({lo} > {hi})")
            items.append((name, int(lo), int(hi)))
        if cap is not None and cap < 0:
            raise DslocError("total degree cap must be non-negative")
        return cls(tuple(items), cap)

    @classmethod
    def symmetric(cls, presentation: Presentation, width: int, cap: int | None = None) -> "DegreeWindow":
        """|e| <= width on laurent variables, 0 <= e <= width on the others."""
        b = {v.name: ((-width if v.laurent else 0), width) for v in presentation.even}
        return cls.make(b, cap)

    def bound_map(self) -> dict:
        return {n: (lo, hi) for n, lo, hi in self.bounds}

    def ranges(self, presentation: Presentation) -> list:
        given = self.bound_map()
        for name in given:
            v = presentation.variable(name)
            if v.odd:
                raise DslocError(f"window bounds given for odd variable {name!r}")
        out = []
        for v in presentation.even:
            if v.name in given:
                lo, hi = given[v.name]
                if lo < 0 and not v.laurent:
                    raise DslocError(f"negative lower bound for non-laurent variable {v.name!r}")
            elif v.laurent:
                if self.cap is None:
                    raise DslocError(f"window is unbounded for laurent variable {v.name!r}")
                lo, hi = -self.cap, self.cap
            else:
                if self.cap is None:
                    raise DslocError(f"window is unbounded for variable {v.name!r}")
                lo, hi = 0, self.cap
            if self.cap is not None:
                lo, hi = max(lo, -self.cap), min(hi, self.cap)
            out.append((lo, hi))
        return out

    def inflate(self, margin: int, presentation: Presentation | None = None) -> "DegreeWindow":
        if margin < 0:
            raise DslocError("margin must be non-negative")
        laurent = set()
        if presentation is not None:
            laurent = {v.name for v in presentation.even if v.laurent}
        bounds = {}
        for n, lo, hi in self.bounds:
            if n in laurent or lo < 0:
                lo -= margin
            bounds[n] = (lo, hi + margin)
        cap = None if self.cap is None else self.cap + margin
        return DegreeWindow.make(bounds, cap)

    def contains(self, presentation: Presentation, m: Monomial) -> bool:
        for (lo, hi), e in zip(self.ranges(presentation), m.exps):
            if not lo <= e <= hi:
                return False
        return self.cap is None or sum(abs(e) for e in m.exps) <= self.cap

    def describe(self) -> str:
        parts = [f"{n} in [{lo}, {hi}]" for n, lo, hi in self.bounds]
        if self.cap is not None:
            parts.append(f"cap {self.cap}")
        return ", ".join(parts) or "(empty window)"


@dataclass(frozen=True)
class Slice:
    presentation: Presentation
    basis: tuple
    index: dict = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "index", {m: i for i, m in enumerate(self.basis)})

    def __len__(self):
        return len(self.basis)

    def vector(self, f: SuperPoly) -> dict:
        out = {}
        for m, c in f.terms.items():
            if m not in self.index:
                raise WindowTooSmallError(
                    f"monomial {render_monomial(m, self.presentation) or '1'} lies outside the slice", m)
            out[self.index[m]] = c
        return out

    def element(self, vec: Mapping[int, Fraction]) -> SuperPoly:
        return SuperPoly(self.presentation, {self.basis[i]: c for i, c in vec.items()})


def _exponent_vectors(ranges: list, cap: int | None):
    n = len(ranges)
    out = []

    def rec(i, prefix, used):
        if i == n:
            out.append(tuple(prefix))
            return
        lo, hi = ranges[i]
        for e in range(lo, hi + 1):
            u = used + abs(e)
            if cap is not None and u > cap:
                continue
            prefix.append(e)
            rec(i + 1, prefix, u)
            prefix.pop()

    rec(0, [], 0)
    return out


def _odd_subsets(n: int) -> list:
    from itertools import combinations

    return [c for k in range(n + 1) for c in combinations(range(n), k)]


def enumerate_slice(presentation: Presentation, window: DegreeWindow,
                    weight_filter: tuple | None = None) -> Slice:
    """All window monomials, optionally only those of a given Q^2-weight."""
    ranges = window.ranges(presentation)
    subsets = _odd_subsets(len(presentation.odd))
    table, target = weight_filter if weight_filter else (None, None)
    if table is not None and table.presentation != presentation:
        raise DslocError("weight table belongs to another presentation")
    basis = []
    for exps in _exponent_vectors(ranges, window.cap):
        for odd in subsets:
            m = Monomial(exps, odd)
            if table is not None and table.monomial_weight(m) != target:
                continue
            basis.append(m)
    basis.sort(key=monomial_sort_key)
    return Slice(presentation, tuple(basis))


def assemble(Q: Derivation, slice_in: Slice, slice_out: Slice) -> SparseMatrix:
    """Matrix of Q from span(slice_in) to span(slice_out)."""
    entries = {}
    for j, m in enumerate(slice_in.basis):
        for k, c in Q.apply_monomial(m).items():
            i = slice_out.index.get(k)
            if i is None:
                raise WindowTooSmallError(
                    f"Q({render_monomial(m, Q.presentation) or '1'}) has the term "
                    f"{render_monomial(k, Q.presentation) or '1'} outside the target slice", k)
            entries[(i, j)] = c
    return SparseMatrix(len(slice_out), len(slice_in), entries)


# --- gradings -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Grading:
    """Integer linear functionals on exponent vectors (odd variables count 0 or 1)."""

    labels: tuple
    functionals: tuple  # one ((varname, weight), ...) per label

    @classmethod
    def make(cls, functionals: Mapping[str, Mapping[str, int]]) -> "Grading":
        labels = tuple(functionals)
        return cls(labels, tuple(tuple(sorted(functionals[l].items())) for l in labels))

    @classmethod
    def trivial(cls) -> "Grading":
        return cls((), ())

    @classmethod
    def total_degree(cls, presentation: Presentation) -> "Grading":
        """Sum of even exponents (signed for laurent variables) plus the number of odd factors."""
        return cls.make({"deg": {v.name: 1 for v in presentation.variables}})

    def key_function(self, presentation: Presentation) -> Callable[[Monomial], tuple]:
        rows = []
        for f in self.functionals:
            w = dict(f)
            for n in w:
                presentation.variable(n)
            ev = tuple(w.get(v.name, 0) for v in presentation.even)
            od = tuple(w.get(v.name, 0) for v in presentation.odd)
            rows.append((ev, od))

        def key(m: Monomial) -> tuple:
            return tuple(sum(a * e for a, e in zip(ev, m.exps)) + sum(od[i] for i in m.odd)
                         for ev, od in rows)

        return key


def derivation_shift(Q: Derivation, grading: Grading):
    """The common key shift of Q if Q is homogeneous for the grading, else None."""
    key = grading.key_function(Q.presentation)
    shift = None
    for v in Q.presentation.variables:
        img = Q.image(v.name)
        base = key(Q.presentation.monomial({v.name: 1}))
        for m in img.terms:
            s = tuple(a - b for a, b in zip(key(m), base))
            if shift is None:
                shift = s
            elif s != shift:
                return None
    return shift if shift is not None else tuple(0 for _ in grading.labels)


def _add_keys(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub_keys(a, b):
    return tuple(x - y for x, y in zip(a, b))


# --- reports --------------------------------------------------------------------------------


@dataclass(frozen=True)
class KeyDims:
    kernel: int
    image: int
    cohomology: int


@dataclass
class DSReport:
    """Per-(grading key, parity) dimensions of kernel, image and cohomology."""

    grading: tuple  # labels of the key components
    dims: dict  # (key, parity) -> KeyDims
    representatives: dict  # (key, parity) -> list[SuperPoly]
    stable: bool
    window: DegreeWindow | None
    margin: int
    notes: list = field(default_factory=list)
    presentation: Presentation | None = None

    def keys(self) -> list:
        return sorted(self.dims)

    def cohomology_dims(self) -> dict:
        return {k: d.cohomology for k, d in self.dims.items()}

    def nonzero(self) -> dict:
        return {k: d.cohomology for k, d in sorted(self.dims.items()) if d.cohomology}

    def totals(self) -> tuple:
        even = sum(d.cohomology for (_, p), d in self.dims.items() if p == 0)
        odd = sum(d.cohomology for (_, p), d in self.dims.items() if p == 1)
        return even, odd

    def is_zero(self) -> bool:
        return self.totals() == (0, 0)

    def same_dims(self, other: "DSReport") -> bool:
        return self.nonzero() == other.nonzero()


def superdimension(report: DSReport) -> tuple:
    if not report.stable:
        raise UnstableResultError(
            "refusing the superdimension of an unstable report; enlarge the window or the margin")
    return report.totals()


# --- the block engine --------------------------------------------------------------------


class _Complex:
    """A parity-reversing operator on monomial-like basis items, split into key blocks."""

    def __init__(self, apply_item, key, parity, shift, render_item):
        self.apply_item = apply_item
        self.key = key
        self.parity = parity
        self.shift = shift
        self.render_item = render_item

    def blocks(self, items) -> dict:
        out: dict = {}
        for m in items:
            out.setdefault((self.key(m), self.parity(m)), []).append(m)
        return out


def _block_cohomology(cx: _Complex, small: dict, big: dict, want_reps: bool, check=None):
    dims, reps = {}, {}
    for (k, p), dom in sorted(small.items()):
        local = {m: i for i, m in enumerate(dom)}
        # kernel of Q on span(dom)
        out_index: dict = {}
        entries = {}
        for j, m in enumerate(dom):
            img = cx.apply_item(m)
            if check:
                check(m, img)
            for t, c in img.items():
                i = out_index.setdefault(t, len(out_index))
                entries[(i, j)] = c
        ker = kernel_basis(SparseMatrix(len(out_index), len(dom), entries))
        # image of the inflated block that lands in span(dom)
        src = big.get((_sub_keys(k, cx.shift), 1 - p), [])
        coords = dict(local)
        vectors = []
        for m in src:
            img = cx.apply_item(m)
            if check:
                check(m, img)
            vec = {}
            for t, c in img.items():
                i = coords.setdefault(t, len(coords))
                vec[i] = c
            if vec:
                vectors.append(vec)
        im = restrict_to_coordinates(vectors, range(len(dom)), len(coords))
        im = SubspaceBasis(len(dom), im.vectors)
        h = quotient_dim(ker, im)
        dims[(k, p)] = KeyDims(ker.dim, im.dim, h)
        if want_reps and h:
            chosen = extend_basis(im, ker.vectors)
            reps[(k, p)] = [{dom[i]: c for i, c in v.items()} for v in chosen]
    return dims, reps


def _compare(a: dict, b: dict) -> bool:
    return {k: d.cohomology for k, d in a.items()} == {k: d.cohomology for k, d in b.items() if k in a}


def resolve_grading(Q: Derivation, grading: Grading | None):
    """Pick the grading for Q: the requested one, else total degree, else trivial."""
    notes = []
    if grading is not None:
        shift = derivation_shift(Q, grading)
        if shift is None:
            raise DerivationError(f"Q is not homogeneous for the grading {grading.labels}")
        return grading, shift, notes
    g = Grading.total_degree(Q.presentation)
    shift = derivation_shift(Q, g)
    if shift is not None:
        return g, shift, notes
    notes.append("Q is not homogeneous for total degree; using the trivial grading")
    return Grading.trivial(), (), notes


def ds_cohomology(presentation: Presentation, Q: Derivation, window: DegreeWindow,
                  margin: int = DEFAULT_MARGIN, grading: Grading | None = None,
                  check_stability: bool = True, representatives: bool = True) -> DSReport:
    """DS cohomology of Q on the weight-0 part of the window, split by (key, parity)."""
    if Q.presentation != presentation:
        raise DslocError("Q is defined over another presentation")
    if Q.parity != 1:
        raise DerivationError("ds_cohomology needs an odd derivation")
    table = weights_of(Q)
    grading, shift, notes = resolve_grading(Q, grading)
    key = grading.key_function(presentation)

    def check(m, img):
        for t in img:
            if table.monomial_weight(t) != 0:
                raise DslocError(f"Q leaves the weight-0 slice at {render_monomial(t, presentation)}")

    cx = _Complex(Q.apply_monomial, key, lambda m: m.parity, shift,
                  lambda m: render_monomial(m, presentation) or "1")
    flt = (table, Fraction(0))

    def run(marg, reps):
        small = cx.blocks(enumerate_slice(presentation, window, flt).basis)
        big = cx.blocks(enumerate_slice(presentation, window.inflate(marg, presentation), flt).basis)
        return _block_cohomology(cx, small, big, reps, check)

    dims, reps = run(margin, representatives)
    stable = True
    if check_stability:
        wider, _ = run(margin + max(margin, 1), False)
        stable = _compare(dims, wider)
        if not stable:
            notes.append(f"dimensions change when the margin grows from {margin} to {margin + max(margin, 1)}")
    rep_polys = {k: [SuperPoly(presentation, v) for v in vs] for k, vs in reps.items()}
    return DSReport(grading.labels, dims, rep_polys, stable, window, margin, notes, presentation)


# --- module operators -----------------------------------------------------------------------


@dataclass(frozen=True)
class ModuleOperator:
    """Odd operator on a free rank-one module: left multiplication by ``factor``,
    or an explicit matrix on a fixed finite slice."""

    presentation: Presentation
    factor: SuperPoly | None = None
    matrix: SparseMatrix | None = None
    slice: Slice | None = None

    @classmethod
    def multiplication(cls, f: SuperPoly) -> "ModuleOperator":
        if not f.is_zero() and f.parity() != 1:
            raise DerivationError(f"multiplication operator must be odd, got {f}")
        return cls(f.presentation, factor=f)

    @classmethod
    def explicit(cls, slc: Slice, matrix: SparseMatrix) -> "ModuleOperator":
        n = len(slc)
        if matrix.rows != n or matrix.cols != n:
            raise DslocError("explicit operator must be a square matrix on the slice")
        for (r, c) in matrix.entries:
            if slc.basis[r].parity == slc.basis[c].parity:
                raise DerivationError("explicit operator does not reverse parity")
        return cls(slc.presentation, matrix=matrix, slice=slc)


def ds_module(op: ModuleOperator, window: DegreeWindow | None = None, margin: int = DEFAULT_MARGIN,
              grading: Grading | None = None, check_stability: bool = True) -> DSReport:
    pres = op.presentation
    notes = []
    if op.matrix is not None:
        sq = {}
        cols = op.matrix.column_dicts()
        for j in range(op.matrix.cols):
            acc: dict = {}
            for r, c in cols[j].items():
                for r2, c2 in cols[r].items():
                    acc[r2] = acc.get(r2, 0) + c * c2
            acc = {k: v for k, v in acc.items() if v}
            if set(acc) - {j}:
                raise DerivationError("operator squared is not diagonal on the slice")
            sq[j] = acc.get(j, 0)
        items = [j for j in range(op.matrix.cols) if not sq[j]]
        allowed = set(items)

        def apply_item(j):
            return cols[j]

        def check(j, img):
            if set(img) - allowed:
                raise DslocError("operator leaves the square-zero part of the slice")

        cx = _Complex(apply_item, lambda j: (), lambda j: op.slice.basis[j].parity, (),
                      lambda j: render_monomial(op.slice.basis[j], pres) or "1")
        blocks = cx.blocks(items)
        dims, reps = _block_cohomology(cx, blocks, blocks, True, check)
        rep_polys = {k: [SuperPoly(pres, {op.slice.basis[i]: c for i, c in vec.items()}) for vec in vs]
                     for k, vs in reps.items()}
        return DSReport((), dims, rep_polys, True, None, 0, notes, pres)
    if window is None:
        raise DslocError("a multiplication operator needs a window")
    f = op.factor
    if grading is None:
        g = Grading.total_degree(pres)
        keys = {g.key_function(pres)(m) for m in f.terms}
        if len(keys) > 1:
            g = Grading.trivial()
            notes.append("operator is not homogeneous for total degree; using the trivial grading")
    else:
        g = grading
    key = g.key_function(pres)
    shifts = {key(m) for m in f.terms}
    if len(shifts) > 1:
        raise DerivationError(f"operator is not homogeneous for the grading {g.labels}")
    shift = shifts.pop() if shifts else tuple(0 for _ in g.labels)
    cache: dict = {}

    def apply_item(m):
        hit = cache.get(m)
        if hit is None:
            hit = (f * SuperPoly(pres, {m: Fraction(1)})).terms
            cache[m] = hit
        return hit

    cx = _Complex(apply_item, key, lambda m: m.parity, shift, lambda m: render_monomial(m, pres) or "1")

    def run(marg, reps):
        small = cx.blocks(enumerate_slice(pres, window).basis)
        big = cx.blocks(enumerate_slice(pres, window.inflate(marg, pres)).basis)
        return _block_cohomology(cx, small, big, reps)

    dims, reps = run(margin, True)
    stable = True
    if check_stability:
        wider, _ = run(margin + max(margin, 1), False)
        stable = _compare(dims, wider)
    rep_polys = {k: [SuperPoly(pres, v) for v in vs] for k, vs in reps.items()}
    return DSReport(g.labels, dims, rep_polys, stable, window, margin, notes, pres)


def report_summary(report: DSReport) -> str:
    lines = []
    for (k, p), d in sorted(report.dims.items()):
        reps = ", ".join(render(r) for r in report.representatives.get((k, p), []))
        lines.append(f"{k} {'odd' if p else 'even'}: ker {d.kernel} im {d.image} H {d.cohomology} {reps}")
    return "\n".join(lines)
