"""Derivations of free supercommutative algebras, given by generator images.

A derivation of parity p satisfies the super Leibniz rule

    D(f g) = D(f) g + (-1)^(p |f|) f D(g)

and is therefore determined by its values on generators.  On a Laurent
generator the rule forces D(x^e) = e x^(e-1) D(x) for every integer e.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .algebra import EVEN, ODD, Monomial, Presentation, SuperPoly, merge_odd
from .errors import DerivationError, PresentationError


class Derivation:
    """A homogeneous derivation; ``parity`` is 1 for odd vector fields."""

    def __init__(self, presentation: Presentation, images: Mapping[str, SuperPoly], parity: int = ODD):
        self.presentation = presentation
        self.parity = parity
        full = {}
        for name, img in images.items():
            v = presentation.variable(name)
            if img.presentation != presentation:
                raise PresentationError(f"image of {name!r} lives in another presentation")
            if not img.is_zero() and img.parity() != (v.parity + parity) % 2:
                kind = "odd" if parity else "even"
                raise DerivationError(f"{kind} derivation: image of {name!r} has the wrong parity ({img})")
            if not img.is_zero():
                full[name] = img
        self.images = full
        zero = presentation.zero()
        self._even = [full.get(v.name, zero) for v in presentation.even]
        self._odd = [full.get(v.name, zero) for v in presentation.odd]
        self._cache: dict = {}

    @classmethod
    def from_strings(cls, presentation: Presentation, images: Mapping[str, str], parity: int = ODD):
        from .parser import parse_expression

        return cls(presentation, {k: parse_expression(v, presentation) for k, v in images.items()}, parity)

    def image(self, name: str) -> SuperPoly:
        self.presentation.variable(name)
        return self.images.get(name, self.presentation.zero())

    def is_zero(self) -> bool:
        return not self.images

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return (self.presentation == other.presentation and self.parity == other.parity
                and self.images == other.images)

    def __hash__(self):
        return hash((self.presentation, self.parity, frozenset(self.images.items())))

    def __repr__(self):
        body = ", ".join(f"{k} -> {v}" for k, v in self.images.items())
        kind = "odd" if self.parity else "even"
        return f"Derivation[{kind}]({body or '0'})"

    # --- linear structure on derivations of equal parity ---------------------------
    def __add__(self, other: "Derivation") -> "Derivation":
        self._check_compatible(other)
        names = set(self.images) | set(other.images)
        return Derivation(self.presentation, {n: self.image(n) + other.image(n) for n in names}, self.parity)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "Derivation":
        return Derivation(self.presentation, {n: img.scale(c) for n, img in self.images.items()}, self.parity)

    def _check_compatible(self, other):
        if other.presentation != self.presentation:
            raise PresentationError("derivations over different presentations")
        if other.parity != self.parity:
            raise DerivationError("cannot add derivations of different parity")

    # --- application -------------------------------------------------------------
    def apply_monomial(self, m: Monomial) -> dict:
        """D(m) as a term dictionary (cached)."""
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        out: dict = {}
        # even block first: m = x^a * xi_I, D(x^a xi_I) = D(x^a) xi_I + x^a D(xi_I)
        for i, e in enumerate(m.exps):
            if not e:
                continue
            img = self._even[i]
            if img.is_zero():
                continue
            exps = list(m.exps)
            exps[i] -= 1
            for t, c in img.terms.items():
                merged = merge_odd(t.odd, m.odd)
                if merged is None:
                    continue
                sign, odd = merged
                key = Monomial(tuple(a + b for a, b in zip(exps, t.exps)), odd)
                out[key] = out.get(key, 0) + sign * e * c
        word = m.odd
        for pos, k in enumerate(word):
            img = self._odd[k]
            if img.is_zero():
                continue
            prefix, suffix = word[:pos], word[pos + 1:]
            # sign of moving D past the prefix
            base_sign = -1 if (self.parity and pos % 2) else 1
            for t, c in img.terms.items():
                left = merge_odd(prefix, t.odd)
                if left is None:
                    continue
                s1, w1 = left
                right = merge_odd(w1, suffix)
                if right is None:
                    continue
                s2, w2 = right
                key = Monomial(tuple(a + b for a, b in zip(m.exps, t.exps)), w2)
                out[key] = out.get(key, 0) + base_sign * s1 * s2 * c
        out = {k: v for k, v in out.items() if v}
        self._cache[m] = out
        return out

    def __call__(self, f: SuperPoly) -> SuperPoly:
        if f.presentation != self.presentation:
            raise PresentationError("argument lives in another presentation")
        out: dict = {}
        for m, c in f.terms.items():
            for k, v in self.apply_monomial(m).items():
                out[k] = out.get(k, 0) + c * v
        return SuperPoly(self.presentation, out)

    apply = __call__


def apply(D: Derivation, f: SuperPoly) -> SuperPoly:
    return D(f)


def odd_derivation(presentation: Presentation, images: Mapping[str, object]) -> Derivation:
    """Odd derivation from images given as SuperPoly or expression strings."""
    from .parser import parse_expression

    parsed = {k: (v if isinstance(v, SuperPoly) else parse_expression(str(v), presentation))
              for k, v in images.items()}
    return Derivation(presentation, parsed, ODD)


def square(Q: Derivation) -> Derivation:
    """Q^2 = 1/2 [Q, Q], an even derivation; on generators it is Q applied twice."""
    if Q.parity != ODD:
        raise DerivationError("square() expects an odd derivation")
    return Derivation(Q.presentation, {n: Q(img) for n, img in Q.images.items()}, EVEN)


def bracket(A: Derivation, B: Derivation) -> Derivation:
    """Supercommutator [A, B] = AB - (-1)^(|A||B|) BA, evaluated on generators."""
    if A.presentation != B.presentation:
        raise PresentationError("derivations over different presentations")
    sign = -1 if (A.parity and B.parity) else 1
    pres = A.presentation
    images = {}
    for v in pres.variables:
        val = A(B.image(v.name)) - B(A.image(v.name)).scale(sign)
        images[v.name] = val
    return Derivation(pres, images, (A.parity + B.parity) % 2)


def compose_apply(A: Derivation, B: Derivation, f: SuperPoly) -> SuperPoly:
    return A(B(f))


# --- weights -----------------------------------------------------------------------


@dataclass(frozen=True)
class WeightTable:
    """Eigenvalues of a diagonal even derivation on the generators."""

    presentation: Presentation
    weights: tuple  # aligned with presentation.variables

    def weight_of(self, name: str) -> Fraction:
        return self.weights[self.presentation.names.index(name)]

    def as_dict(self) -> dict:
        return dict(zip(self.presentation.names, self.weights))

    def __post_init__(self):
        d = dict(zip(self.presentation.names, self.weights))
        object.__setattr__(self, "_even_w", tuple(d[v.name] for v in self.presentation.even))
        object.__setattr__(self, "_odd_w", tuple(d[v.name] for v in self.presentation.odd))

    def monomial_weight(self, m: Monomial) -> Fraction:
        w = Fraction(0)
        for e, x in zip(m.exps, self._even_w):
            if e:
                w += e * x
        for i in m.odd:
            w += self._odd_w[i]
        return w

    def nonzero(self) -> list:
        return [n for n, w in zip(self.presentation.names, self.weights) if w]


@dataclass(frozen=True)
class NonDiagonalReport:
    offending: tuple  # names of generators that are not eigenvectors

    def __bool__(self):
        return False


def check_diagonal(C: Derivation):
    """WeightTable if every generator is an eigenvector of ``C``, else a NonDiagonalReport."""
    if C.parity != EVEN:
        raise DerivationError("check_diagonal expects an even derivation")
    pres = C.presentation
    weights = []
    bad = []
    for v in pres.variables:
        img = C.image(v.name)
        gen = pres.var(v.name)
        if img.is_zero():
            weights.append(Fraction(0))
            continue
        (m, c), = list(gen.terms.items())
        if len(img) == 1 and m in img.terms:
            weights.append(img.terms[m] / c)
        else:
            bad.append(v.name)
            weights.append(None)
    if bad:
        return NonDiagonalReport(tuple(bad))
    return WeightTable(pres, tuple(weights))


def weights_of(Q: Derivation) -> WeightTable:
    table = check_diagonal(square(Q))
    if not table:
        raise DerivationError(f"Q^2 is not diagonal on generators: {', '.join(table.offending)}")
    return table


# --- h-grading ---------------------------------------------------------------------


@dataclass(frozen=True)
class HDecomposition:
    """Q = sum_i Q_i with [h, Q_i] = i Q_i for h the Euler field of ``odd_coords``."""

    odd_coords: tuple
    components: dict  # int -> Derivation

    def component(self, i: int) -> Derivation:
        some = next(iter(self.components.values()))
        return self.components.get(i, Derivation(some.presentation, {}, ODD))

    def total(self) -> Derivation:
        parts = list(self.components.values())
        out = parts[0]
        for p in parts[1:]:
            out = out + p
        return out


def euler_field(presentation: Presentation, odd_coords) -> Derivation:
    """h = sum xi d/dxi over the chosen odd coordinates (an even derivation)."""
    return Derivation(presentation, {n: presentation.var(n) for n in odd_coords}, EVEN)


def h_degree(presentation: Presentation, m: Monomial, odd_idx: frozenset) -> int:
    return sum(1 for i in m.odd if i in odd_idx)


def h_decompose(Q: Derivation, odd_coords) -> HDecomposition:
    pres = Q.presentation
    odd_coords = tuple(odd_coords)
    for n in odd_coords:
        if not pres.variable(n).odd:
            raise DerivationError(f"h-grading coordinate {n!r} is not odd")
    idx = frozenset(pres.odd_index(n) for n in odd_coords)
    pieces: dict = {}
    for name, img in Q.images.items():
        own = 1 if name in odd_coords else 0
        for m, c in img.terms.items():
            i = h_degree(pres, m, idx) - own
            if not -1 <= i <= len(odd_coords):
                raise DerivationError(f"component index {i} outside [-1, {len(odd_coords)}]")
            pieces.setdefault(i, {}).setdefault(name, {})[m] = c
    if not pieces:
        pieces[0] = {}
    comps = {i: Derivation(pres, {n: SuperPoly(pres, t) for n, t in imgs.items()}, Q.parity)
             for i, imgs in sorted(pieces.items())}
    return HDecomposition(odd_coords, comps)


def transport(D: Derivation, forward, backward) -> Derivation:
    """Conjugate a derivation along an algebra isomorphism: forward . D . backward."""
    target = forward.target
    images = {v.name: forward(D(backward(target.var(v.name)))) for v in target.variables}
    return Derivation(target, images, D.parity)
