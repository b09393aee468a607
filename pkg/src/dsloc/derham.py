"""Odd tangent bundles and algebraic de Rham cohomology via the DS engine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebra import Presentation, Variable, evaluate_body, partial
from .cohomology import DEFAULT_MARGIN, DegreeWindow, DSReport, Grading, ds_cohomology
from .derivation import Derivation, square
from .errors import DslocError
from .geometry import RationalPoint
from .linalg import SparseMatrix, rank
from .parser import render


@dataclass(frozen=True)
class PiTangentScenario:
    base: Presentation
    lifted: Presentation
    d: Derivation
    pairs: tuple  # ((x, dx), ...)


def _diff_name(name: str, taken: set) -> str:
    n = "d" + name
    while n in taken:
        n = n + "_"
    return n


def build_pi_tangent(base: Presentation) -> PiTangentScenario:
    """Functions on the odd tangent bundle: one odd dx per even x, with d(x) = dx."""
    if base.odd:
        raise DslocError(f"base must be purely even; odd variables {base.odd_names}")
    taken = set(base.names)
    pairs = []
    for v in base.even:
        dn = _diff_name(v.name, taken)
        taken.add(dn)
        pairs.append((v.name, dn))
    lifted = Presentation(tuple(base.even) + tuple(Variable(dn, odd=True) for _, dn in pairs))
    d = Derivation(lifted, {x: lifted.var(dx) for x, dx in pairs})
    if not square(d).is_zero():
        raise DslocError("de Rham differential does not square to zero")
    return PiTangentScenario(base, lifted, d, tuple(pairs))


def torus_and_affine(n_torus: int, n_affine: int) -> Presentation:
    """Base (k^x)^a x A^b with variables x1.. (laurent) and t1.."""
    xs = [f"x{i}" for i in range(1, n_torus + 1)]
    ts = [f"t{i}" for i in range(1, n_affine + 1)]
    return Presentation.build(even=xs + ts, laurent=xs)


def de_rham_grading(scn: PiTangentScenario) -> Grading:
    """Form degree plus one multidegree per base variable (x^e dx counts e + 1)."""
    fn = {"form": {dx: 1 for _, dx in scn.pairs}}
    for x, dx in scn.pairs:
        fn[x] = {x: 1, dx: 1}
    return Grading.make(fn)


def default_window(base: Presentation, width: int = 2) -> DegreeWindow:
    return DegreeWindow.symmetric(base, width)


@dataclass
class DeRhamDims:
    dims: tuple  # index = form degree
    report: DSReport

    @property
    def stable(self) -> bool:
        return self.report.stable


def de_rham_dims(scn: PiTangentScenario, window: DegreeWindow | None = None,
                 margin: int = DEFAULT_MARGIN) -> DeRhamDims:
    window = window or default_window(scn.base)
    rep = ds_cohomology(scn.lifted, scn.d, window, margin, de_rham_grading(scn))
    dims = [0] * (len(scn.pairs) + 1)
    for (key, _parity), d in rep.dims.items():
        dims[key[0]] += d.cohomology
    return DeRhamDims(tuple(dims), rep)


def convolve(a: Sequence[int], b: Sequence[int]) -> tuple:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


@dataclass(frozen=True)
class Recognition:
    ok: bool
    witness: dict | None  # even name -> rendered u(x): the new odd coordinate
    reasons: tuple = ()

    def __bool__(self):
        return self.ok


def odd_cotangent_recognize(presentation: Presentation, u: Derivation,
                            points: Sequence[RationalPoint]) -> Recognition:
    """Check at probe points that u kills odd cotangent directions and maps even ones
    isomorphically onto odd ones."""
    if u.presentation != presentation:
        raise DslocError("u lives over another presentation")
    ev, od = presentation.even_names, presentation.odd_names
    if len(ev) != len(od):
        return Recognition(False, None, (f"{len(ev)} even vs {len(od)} odd variables",))
    reasons = []
    for p in points:
        p.validate(presentation)
        vals = p.as_dict()
        for n in od + ev:
            if evaluate_body(u.image(n), vals) != 0:
                reasons.append(f"u does not vanish at {p} (u({n}) != 0)")
                break
        else:
            for o in od:
                img = u.image(o)
                for x in ev:
                    if evaluate_body(partial(img, x), vals) != 0:
                        reasons.append(f"u({o}) has a nonzero d{x} component at {p}")
            block = [[evaluate_body(partial(u.image(x), o), vals) for o in od] for x in ev]
            if block and rank(SparseMatrix.from_dense(block)) < len(ev):
                reasons.append(f"u on even cotangent directions is singular at {p}")
    if reasons:
        return Recognition(False, None, tuple(reasons))
    return Recognition(True, {x: render(u.image(x)) for x in ev})
