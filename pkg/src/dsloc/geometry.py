"""Geometric procedures on (algebra, Q) pairs.

Subvarieties are coordinate subvarieties V(S) for a set S of non-laurent
variables.  Points are rational points with odd coordinates zero.  The
vanishing locus of Q is only ever probed at user-supplied points, so every
hypothesis report is labelled "probed, not proven".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import (AlgebraMap, Monomial, Presentation, SuperPoly, Variable, as_fraction,
                      evaluate_body, partial, substitute_zero, transfer)
from .cohomology import (DEFAULT_MARGIN, DegreeWindow, DSReport, Grading, ds_cohomology,
                         enumerate_slice)
from .derivation import (Derivation, HDecomposition, h_decompose, square, weights_of)
from .errors import DslocError, HypothesisFailure, NotInvertibleError, PresentationError
from .linalg import SparseMatrix, rank, solve
from .parser import render

PROBED_LABEL = "probed, not proven"


# --- basic objects ------------------------------------------------------------------------


@dataclass(frozen=True)
class CoordinateSubvariety:
    ambient: Presentation
    vanishing: tuple

    def __post_init__(self):
        seen = set()
        for n in self.vanishing:
            v = self.ambient.variable(n)
            if v.laurent:
                raise PresentationError(f"laurent variable {n!r} is a unit; V({n}) is empty")
            if n in seen:
                raise PresentationError(f"variable {n!r} listed twice")
            seen.add(n)

    @classmethod
    def of(cls, ambient: Presentation, names) -> "CoordinateSubvariety":
        if isinstance(names, str):
            names = names.replace(",", " ").split()
        return cls(ambient, tuple(names))

    @property
    def even(self) -> tuple:
        return tuple(n for n in self.vanishing if not self.ambient.variable(n).odd)

    @property
    def odd(self) -> tuple:
        return tuple(n for n in self.vanishing if self.ambient.variable(n).odd)

    def contains_point(self, p: "RationalPoint") -> bool:
        return all(p.value(n) == 0 for n in self.even)


@dataclass(frozen=True)
class RationalPoint:
    """Values of even variables; variables not listed are 0."""

    values: tuple  # ((name, Fraction), ...)

    @classmethod
    def of(cls, values: Mapping[str, object] | None = None) -> "RationalPoint":
        return cls(tuple(sorted((k, as_fraction(v)) for k, v in (values or {}).items())))

    def value(self, name: str) -> Fraction:
        return dict(self.values).get(name, Fraction(0))

    def as_dict(self) -> dict:
        return dict(self.values)

    def validate(self, presentation: Presentation):
        for n, _ in self.values:
            if presentation.variable(n).odd:
                raise PresentationError(f"point assigns a value to odd variable {n!r}")
        for v in presentation.even:
            if v.laurent and self.value(v.name) == 0:
                raise PresentationError(f"laurent variable {v.name!r} must be nonzero at a point")

    def __str__(self):
        return "{" + ", ".join(f"{n}: {v}" for n, v in self.values) + "}"


def vanishes_at(Q: Derivation, p: RationalPoint) -> bool:
    p.validate(Q.presentation)
    vals = p.as_dict()
    return all(evaluate_body(img, vals) == 0 for img in Q.images.values())


@dataclass(frozen=True)
class Check:
    """Boolean outcome with an optional witness; truthy iff ``ok``."""

    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok


def _s_order(pres: Presentation, m: Monomial, even_idx: set, odd_idx: set) -> int:
    return sum(e for i, e in enumerate(m.exps) if i in even_idx) + sum(1 for i in m.odd if i in odd_idx)


def _index_sets(Y: CoordinateSubvariety):
    pres = Y.ambient
    return ({pres.even_index(n) for n in Y.even}, {pres.odd_index(n) for n in Y.odd})


def ideal_stable(Q: Derivation, Y: CoordinateSubvariety) -> Check:
    """Q(I_Y) in I_Y, checked term by term on the generators of I_Y."""
    if Y.ambient != Q.presentation:
        raise PresentationError("subvariety and Q live over different presentations")
    ev, od = _index_sets(Y)
    for n in Y.vanishing:
        for m, c in Q.image(n).terms.items():
            if _s_order(Y.ambient, m, ev, od) == 0:
                term = SuperPoly(Y.ambient, {m: c})
                return Check(False, (n, render(term)))
    return Check(True)


def restrict(Q: Derivation, Y: CoordinateSubvariety):
    """The induced derivation on k[Y] = k[X]/I_Y."""
    st = ideal_stable(Q, Y)
    if not st:
        n, term = st.witness
        raise HypothesisFailure(f"Q does not preserve the ideal of Y: Q({n}) contains {term}", st.witness)
    target = Y.ambient.without(Y.vanishing)
    images = {}
    for v in target.variables:
        images[v.name] = transfer(substitute_zero(Q.image(v.name), Y.vanishing), target)
    return target, Derivation(target, images, Q.parity)


def restrict_element(f: SuperPoly, Y: CoordinateSubvariety) -> SuperPoly:
    target = Y.ambient.without(Y.vanishing)
    return transfer(substitute_zero(f, Y.vanishing), target)


@dataclass(frozen=True)
class ConormalCheck:
    ok: bool
    matrix: tuple  # rows and columns follow ``order``
    order: tuple
    block: tuple  # odd -> even block: rows even vanishing vars, cols odd ones
    reason: str = ""

    def __bool__(self):
        return self.ok


def conormal_fiber_check(Q: Derivation, Y: CoordinateSubvariety, z: RationalPoint) -> ConormalCheck:
    """Linearise Q on I_Y/I_Y^2 at z and test the odd-to-even block for invertibility."""
    pres = Q.presentation
    z.validate(pres)
    if not vanishes_at(Q, z):
        raise HypothesisFailure(f"Q does not vanish at {z}", z)
    if not Y.contains_point(z):
        raise HypothesisFailure(f"point {z} does not lie on Y", z)
    ev, od = _index_sets(Y)
    order = Y.even + Y.odd
    vals = z.as_dict()
    mat = []
    for ni in order:
        row = []
        for nj in order:
            img = Q.image(nj)
            lin = SuperPoly(pres, {m: c for m, c in img.terms.items() if _s_order(pres, m, ev, od) == 1})
            row.append(evaluate_body(partial(lin, ni), vals))
        mat.append(tuple(row))
    ne = len(Y.even)
    block = tuple(tuple(mat[i][ne + j] for j in range(len(Y.odd))) for i in range(ne))
    if len(Y.even) != len(Y.odd):
        return ConormalCheck(False, tuple(mat), order, block,
                             f"odd-to-even block is {len(Y.even)}x{len(Y.odd)}, not square")
    r = rank(SparseMatrix.from_dense(block)) if block else 0
    ok = r == ne
    return ConormalCheck(ok, tuple(mat), order, block, "" if ok else f"block has rank {r} < {ne}")


# --- localization ----------------------------------------------------------------------------


@dataclass
class HypothesisReport:
    ideal_stable: Check
    vanishing: dict  # point -> bool
    on_y: dict  # point -> bool, recorded where Q vanishes
    conormal: dict  # point -> ConormalCheck, only where Q vanishes and the point is on Y
    label: str = PROBED_LABEL

    @property
    def all_pass(self) -> bool:
        if not self.ideal_stable:
            return False
        for p, v in self.vanishing.items():
            if v and not (self.on_y.get(p) and self.conormal.get(p)):
                return False
        return True

    def failures(self) -> list:
        out = []
        if not self.ideal_stable:
            out.append(f"ideal not stable: {self.ideal_stable.witness}")
        for p, v in self.vanishing.items():
            if not v:
                continue
            if not self.on_y.get(p):
                out.append(f"Q vanishes at {p}, which is not on Y")
            elif not self.conormal.get(p):
                out.append(f"conormal map not an isomorphism at {p}: {self.conormal[p].reason}")
        return out


@dataclass
class LocalizationResult:
    hypotheses: HypothesisReport
    ds_x: DSReport
    ds_y: DSReport
    agree: bool


def restrict_grading(grading: Grading, Y: CoordinateSubvariety) -> Grading:
    drop = set(Y.vanishing)
    return Grading(grading.labels, tuple(tuple((n, w) for n, w in f if n not in drop)
                                         for f in grading.functionals))


def restrict_window(window: DegreeWindow, Y: CoordinateSubvariety) -> DegreeWindow:
    drop = set(Y.vanishing)
    return DegreeWindow(tuple(b for b in window.bounds if b[0] not in drop), window.cap)


def localization_check(Q: Derivation, Y: CoordinateSubvariety, points: Sequence[RationalPoint],
                       window: DegreeWindow, margin: int = DEFAULT_MARGIN,
                       grading: Grading | None = None) -> LocalizationResult:
    st = ideal_stable(Q, Y)
    van, on_y, con = {}, {}, {}
    for p in points:
        v = vanishes_at(Q, p)
        van[p] = v
        if v:
            on_y[p] = Y.contains_point(p)
            if on_y[p]:
                con[p] = conormal_fiber_check(Q, Y, p)
    hyp = HypothesisReport(st, van, on_y, con)
    ds_x = ds_cohomology(Q.presentation, Q, window, margin, grading)
    if not st:
        empty = DSReport((), {}, {}, False, None, margin, ["Y is not Q-stable; no restriction"])
        return LocalizationResult(hyp, ds_x, empty, False)
    pres_y, q_y = restrict(Q, Y)
    g_y = restrict_grading(grading, Y) if grading is not None else None
    ds_y = ds_cohomology(pres_y, q_y, restrict_window(window, Y), margin, g_y)
    agree = ds_x.grading == ds_y.grading and ds_x.nonzero() == ds_y.nonzero()
    return LocalizationResult(hyp, ds_x, ds_y, agree)


# --- Im Q^2 -------------------------------------------------------------------------------------


def im_q2_reduction(Q: Derivation):
    """Y = V(variables of nonzero Q^2-weight) together with the restricted field."""
    table = weights_of(Q)
    nonzero = table.nonzero()
    for n in nonzero:
        if Q.presentation.variable(n).laurent:
            raise DslocError(f"laurent variable {n!r} has nonzero weight; V(Im Q^2) is empty")
    Y = CoordinateSubvariety(Q.presentation, tuple(nonzero))
    pres, q = restrict(Q, Y)
    if not square(q).is_zero():
        raise DslocError("restricted field does not square to zero")
    return Y, pres, q


# --- Koszul complexes ----------------------------------------------------------------------------


@dataclass(frozen=True)
class KoszulScenario:
    presentation: Presentation
    Q: Derivation
    t_names: tuple
    xi_names: tuple
    base_names: tuple


def _fresh(names: set, stem: str, i: int) -> str:
    n = f"{stem}{i}"
    while n in names:
        n = n + "_"
    return n


def koszul_build(t_names, base_even=(), base_laurent=()) -> KoszulScenario:
    """k[base, t_1..t_n] with fresh odd xi_i and Q = sum t_i d/dxi_i."""
    if isinstance(t_names, str):
        t_names = t_names.replace(",", " ").split()
    if isinstance(base_even, str):
        base_even = base_even.replace(",", " ").split()
    t_names = tuple(t_names)
    if len(set(t_names)) != len(t_names):
        raise DslocError(f"duplicate Koszul variables: {t_names}")
    bad = set(t_names) & set(base_laurent)
    if bad:
        raise DslocError(f"Koszul variables must not be laurent: {sorted(bad)}")
    if set(t_names) & set(base_even):
        raise DslocError("Koszul variables overlap the base variables")
    used = set(t_names) | set(base_even)
    xi = []
    for i in range(1, len(t_names) + 1):
        n = _fresh(used, "xi", i)
        used.add(n)
        xi.append(n)
    pres = Presentation.build(even=list(base_even) + list(t_names), odd=xi, laurent=list(base_laurent))
    Q = Derivation(pres, {x: pres.var(t) for t, x in zip(t_names, xi)})
    return KoszulScenario(pres, Q, t_names, tuple(xi), tuple(base_even))


@dataclass
class KoszulCheck:
    ok: bool
    report: DSReport
    expected: dict  # key -> dim in xi-degree 0
    mismatches: list

    def __bool__(self):
        return self.ok


def koszul_grading(scn: KoszulScenario) -> Grading:
    pres = scn.presentation
    return Grading.make({
        "xideg": {n: 1 for n in scn.xi_names},
        "deg": {v.name: 1 for v in pres.variables},
    })


def koszul_default_window(scn: KoszulScenario, cap: int = 3) -> DegreeWindow:
    bounds = {v.name: ((-cap if v.laurent else 0), cap) for v in scn.presentation.even}
    return DegreeWindow.make(bounds, cap)


def koszul_verify(scn: KoszulScenario, window: DegreeWindow | None = None,
                  margin: int = DEFAULT_MARGIN) -> KoszulCheck:
    """Cohomology sits in xi-degree 0 with dims of A_0/(t), counted monomial by monomial."""
    window = window or koszul_default_window(scn)
    g = koszul_grading(scn)
    rep = ds_cohomology(scn.presentation, scn.Q, window, margin, g)
    pres = scn.presentation
    key = g.key_function(pres)
    t_idx = {pres.even_index(t) for t in scn.t_names}
    expected: dict = {}
    for m in enumerate_slice(pres, window).basis:
        if m.odd or any(m.exps[i] for i in t_idx):
            continue
        k = key(m)
        expected[k] = expected.get(k, 0) + 1
    mismatches = []
    for (k, p), d in sorted(rep.dims.items()):
        want = expected.get(k, 0) if (k[0] == 0 and p == 0) else 0
        if d.cohomology != want:
            mismatches.append((k, p, d.cohomology, want))
    for k, n in expected.items():
        if (k, 0) not in rep.dims:
            mismatches.append((k, 0, 0, n))
    ok = rep.stable and not mismatches
    return KoszulCheck(ok, rep, expected, mismatches)


# --- non-vanishing primitive --------------------------------------------------------------------


def weight_zero_part(f: SuperPoly, table) -> SuperPoly:
    return SuperPoly(f.presentation, {m: c for m, c in f.terms.items() if table.monomial_weight(m) == 0})


def find_primitive(Q: Derivation, certificate: Sequence[tuple]) -> SuperPoly:
    """Odd xi with Q(xi) = 1, built from sum g_i Q(xi_i) = 1."""
    pres = Q.presentation
    total = pres.zero()
    for g, x in certificate:
        if not g.is_zero() and g.parity() != 0:
            raise HypothesisFailure(f"certificate coefficient {g} is not even", g)
        if not x.is_zero() and x.parity() != 1:
            raise HypothesisFailure(f"certificate element {x} is not odd", x)
        total = total + g * Q(x)
    if total != pres.const(1):
        raise HypothesisFailure(f"certificate does not sum to 1 (got {render(total)})", total)
    table = weights_of(Q)
    eta = pres.zero()
    for g, x in certificate:
        eta = eta + g * x
    eta0 = weight_zero_part(eta, table)
    alpha = Q(eta0)
    r0 = alpha - pres.const(1)
    bound = len(pres.odd) // 2 + 1
    power = pres.const(1)
    inverse = pres.const(1)
    for k in range(1, bound + 1):
        power = power * (-r0)
        if power.is_zero():
            break
        inverse = inverse + power
    else:
        if not power.is_zero():
            raise DslocError(f"alpha - 1 = {render(r0)} is not nilpotent")
    xi = eta0 * inverse
    if Q(xi) != pres.const(1):
        raise DslocError("constructed primitive fails Q(xi) = 1")
    return xi


# --- odd coordinate changes ------------------------------------------------------------------------


def _det(mat: list, one: SuperPoly) -> SuperPoly:
    n = len(mat)
    if n == 0:
        return one
    if n == 1:
        return mat[0][0]
    out = one.presentation.zero()
    for j in range(n):
        if mat[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _det(minor, one)
        out = out + term if j % 2 == 0 else out - term
    return out


@dataclass(frozen=True)
class OddCoordinateChange:
    old: Presentation
    new: Presentation
    forward: AlgebraMap  # old -> new
    backward: AlgebraMap  # new -> old
    matrix: tuple  # new_j = sum_i matrix[j][i] * old_i (coefficients in the even subring)
    determinant: SuperPoly


def change_odd_coordinates(presentation: Presentation, new_odd: Mapping[str, SuperPoly]) -> OddCoordinateChange:
    """Replace the odd generators by even-coefficient linear combinations of them."""
    olds = presentation.odd_names
    news = tuple(new_odd)
    if len(news) != len(olds):
        raise DslocError(f"need {len(olds)} new odd coordinates, got {len(news)}")
    even_only = Presentation(tuple(presentation.even))
    mat = []
    for name in news:
        f = new_odd[name]
        if f.presentation != presentation:
            raise PresentationError(f"new coordinate {name!r} is not in the given presentation")
        row = [even_only.zero() for _ in olds]
        for m, c in f.terms.items():
            if len(m.odd) != 1:
                raise DslocError(f"new coordinate {name!r} is not linear in the odd variables")
            i = m.odd[0]
            row[i] = row[i] + SuperPoly(even_only, {Monomial(m.exps, ()): c})
        mat.append(row)
    det = _det(mat, even_only.const(1))
    try:
        det_inv = det.inverse()
    except NotInvertibleError:
        raise DslocError(f"coordinate change is not invertible: determinant {render(det)} is not a unit") from None
    n = len(olds)
    inv = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:i] + row[i + 1:] for k, row in enumerate(mat) if k != j]
            cof = _det(minor, even_only.const(1))
            if (i + j) % 2:
                cof = -cof
            inv[i][j] = cof * det_inv  # inverse[i][j] = adj[i][j] / det = C[j][i] / det
    variables = tuple(presentation.even) + tuple(Variable(nm, odd=True) for nm in news)
    for nm in news:
        if nm in presentation and not presentation.variable(nm).odd:
            raise PresentationError(f"new odd name {nm!r} clashes with an even variable")
    new = Presentation(variables)
    # old_i = sum_j inv[i][j] new_j
    fwd = {}
    for i, o in enumerate(olds):
        acc = new.zero()
        for j, nm in enumerate(news):
            if not inv[i][j].is_zero():
                acc = acc + transfer(inv[i][j], new) * new.var(nm)
        fwd[o] = acc
    for v in presentation.even:
        fwd[v.name] = new.var(v.name)
    forward = AlgebraMap(presentation, new, fwd)
    bwd = {nm: new_odd[nm] for nm in news}
    for v in presentation.even:
        bwd[v.name] = presentation.var(v.name)
    backward = AlgebraMap(new, presentation, bwd)
    for o in olds:
        if backward(forward(presentation.var(o))) != presentation.var(o):
            raise DslocError("coordinate change maps are not mutually inverse")
    for nm in news:
        if forward(backward(new.var(nm))) != new.var(nm):
            raise DslocError("coordinate change maps are not mutually inverse")
    return OddCoordinateChange(presentation, new, forward, backward,
                               tuple(tuple(r) for r in mat), det)


# --- inductive solving along the h-grading ------------------------------------------------------------


@dataclass
class LemmaSolve:
    ok: bool
    solution: SuperPoly | None
    obstruction: SuperPoly | None
    steps: int

    def __bool__(self):
        return self.ok


def technical_lemma_solve(Q: Derivation, odd_coords, v: SuperPoly, window: DegreeWindow,
                          margin: int = DEFAULT_MARGIN, max_steps: int | None = None) -> LemmaSolve:
    """Find v' with Q(v') = v by peeling off the lowest h-component and solving against Q_{-1}."""
    pres = Q.presentation
    if not Q(v).is_zero():
        raise HypothesisFailure("v is not Q-closed", v)
    hd: HDecomposition = h_decompose(Q, odd_coords)
    q_low = hd.component(-1)
    idx = frozenset(pres.odd_index(n) for n in hd.odd_coords)

    def hdeg(m):
        return sum(1 for i in m.odd if i in idx)

    big = enumerate_slice(pres, window.inflate(margin, pres)).basis
    by_deg: dict = {}
    for m in big:
        by_deg.setdefault((hdeg(m), m.parity), []).append(m)
    limit = max_steps if max_steps is not None else len(idx) + 2
    vp = pres.zero()
    r = v
    steps = 0
    while not r.is_zero():
        if steps > limit:
            raise DslocError("technical lemma iteration did not terminate")
        low = min(hdeg(m) for m in r.terms)
        ri = SuperPoly(pres, {m: c for m, c in r.terms.items() if hdeg(m) == low})
        par = ri.parity()
        if par is None:
            raise HypothesisFailure("v is not homogeneous in parity", v)
        cols = by_deg.get((low + 1, 1 - par), [])
        rows: dict = {}
        entries = {}
        for j, m in enumerate(cols):
            for t, c in q_low.apply_monomial(m).items():
                entries[(rows.setdefault(t, len(rows)), j)] = c
        rhs = {}
        for t, c in ri.terms.items():
            rhs[rows.setdefault(t, len(rows))] = c
        x = solve(SparseMatrix(len(rows), len(cols), entries), rhs)
        if x is None:
            return LemmaSolve(False, None, ri, steps)
        w = SuperPoly(pres, {cols[j]: c for j, c in x.items()})
        vp = vp + w
        r = v - Q(vp)
        steps += 1
    return LemmaSolve(True, vp, None, steps)
