"""Free supercommutative algebras k[t, x^{+-1}] (x) Lambda(xi) over the rationals.

A :class:`Presentation` fixes the generators: even variables (optionally
Laurent, i.e. invertible) and odd variables with a fixed total order.  A
:class:`SuperPoly` is a finite rational combination of :class:`Monomial`
objects in canonical form: odd indices strictly increasing, so every product
is normalised by counting inversions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple

from .errors import NotInvertibleError, PresentationError

EVEN = 0
ODD = 1


def as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"expected an exact rational, got {type(c).__name__}")


@dataclass(frozen=True)
class Variable:
    name: str
    odd: bool = False
    laurent: bool = False

    def __post_init__(self):
        if self.odd and self.laurent:
            raise PresentationError(f"odd variable {self.name!r} cannot be Laurent")

    @property
    def parity(self) -> int:
        return ODD if self.odd else EVEN


class Monomial(NamedTuple):
    """Exponents of the even variables plus the sorted tuple of odd indices."""

    exps: tuple
    odd: tuple

    @property
    def parity(self) -> int:
        return len(self.odd) % 2


@lru_cache(maxsize=1 << 16)
def merge_odd(a: tuple, b: tuple):
    """Return ``(sign, merged)`` for the product of two sorted odd words, or None if it vanishes."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    if set(a).intersection(b):
        return None
    inversions = 0
    for j in b:
        for i in a:
            if i > j:
                inversions += 1
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


@dataclass(frozen=True)
class Presentation:
    """Generators of a free supercommutative algebra.

    ``eliminated`` records substitutions that produced this presentation from
    a larger one; it is bookkeeping only and does not take part in equality.
    """

    variables: tuple
    eliminated: tuple = field(default=(), compare=False)

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise PresentationError(f"duplicate variable names in {names}")
        even = tuple(v for v in self.variables if not v.odd)
        odd = tuple(v for v in self.variables if v.odd)
        object.__setattr__(self, "even", even)
        object.__setattr__(self, "odd", odd)
        object.__setattr__(self, "_even_index", {v.name: i for i, v in enumerate(even)})
        object.__setattr__(self, "_odd_index", {v.name: i for i, v in enumerate(odd)})
        object.__setattr__(self, "_by_name", {v.name: v for v in self.variables})

    @classmethod
    def build(cls, even=(), odd=(), laurent=()) -> "Presentation":
        """Convenience constructor: ``Presentation.build(even="t x", odd="xi", laurent="x")``."""
        even, odd, laurent = (_names(x) for x in (even, odd, laurent))
        unknown = set(laurent) - set(even)
        if unknown:
            raise PresentationError(f"laurent variables must be even: {sorted(unknown)}")
        variables = [Variable(n, laurent=n in laurent) for n in even]
        variables += [Variable(n, odd=True) for n in odd]
        return cls(tuple(variables))

    # --- lookup -------------------------------------------------------------
    @property
    def names(self) -> tuple:
        return tuple(v.name for v in self.variables)

    @property
    def even_names(self) -> tuple:
        return tuple(v.name for v in self.even)

    @property
    def odd_names(self) -> tuple:
        return tuple(v.name for v in self.odd)

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise PresentationError(f"unknown variable {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def even_index(self, name: str) -> int:
        return self._even_index[name]

    def odd_index(self, name: str) -> int:
        return self._odd_index[name]

    def without(self, names: Iterable[str], record=None) -> "Presentation":
        drop = set(names)
        for n in drop:
            self.variable(n)
        extra = self.eliminated + (tuple(record) if record else ())
        return Presentation(tuple(v for v in self.variables if v.name not in drop), extra)

    # --- element constructors -----------------------------------------------
    def zero(self) -> "SuperPoly":
        return SuperPoly(self, {})

    def const(self, c) -> "SuperPoly":
        c = as_fraction(c)
        return SuperPoly(self, {self.unit_monomial(): c} if c else {})

    def unit_monomial(self) -> Monomial:
        return Monomial((0,) * len(self.even), ())

    def var(self, name: str) -> "SuperPoly":
        return SuperPoly(self, {self.monomial({name: 1}): Fraction(1)})

    def vars(self, names) -> list:
        return [self.var(n) for n in _names(names)]

    def monomial(self, powers: Mapping[str, int]) -> Monomial:
        """Build a monomial; odd variables are taken in presentation order (sign +1)."""
        exps = [0] * len(self.even)
        odd = []
        for name, e in powers.items():
            v = self.variable(name)
            if v.odd:
                if e not in (0, 1):
                    raise PresentationError(f"odd variable {name!r} with exponent {e}")
                if e:
                    odd.append(self._odd_index[name])
            else:
                if e < 0 and not v.laurent:
                    raise PresentationError(f"negative exponent on non-laurent variable {name!r}")
                exps[self._even_index[name]] = e
        return Monomial(tuple(exps), tuple(sorted(odd)))

    def check_monomial(self, m: Monomial):
        if len(m.exps) != len(self.even):
            raise PresentationError("monomial does not match presentation")
        for v, e in zip(self.even, m.exps):
            if e < 0 and not v.laurent:
                raise PresentationError(f"negative exponent on non-laurent variable {v.name!r}")

    def monomial_powers(self, m: Monomial) -> dict:
        out = {self.even[i].name: e for i, e in enumerate(m.exps) if e}
        for i in m.odd:
            out[self.odd[i].name] = 1
        return out

    def __str__(self):
        parts = []
        for v in self.variables:
            tag = "odd" if v.odd else ("laurent" if v.laurent else "even")
            parts.append(f"{v.name}:{tag}")
        return "Presentation(" + ", ".join(parts) + ")"


def _names(x) -> tuple:
    if isinstance(x, str):
        return tuple(x.replace(",", " ").split())
    return tuple(x)


class SuperPoly:
    """Immutable element of a free supercommutative algebra."""

    __slots__ = ("presentation", "terms", "_hash")

    def __init__(self, presentation: Presentation, terms: Mapping[Monomial, Fraction]):
        self.presentation = presentation
        self.terms = {m: c for m, c in terms.items() if c}
        self._hash = None

    # --- basic protocol -------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, SuperPoly):
            return self.presentation == other.presentation and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.presentation.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        from .parser import render

        return f"SuperPoly({render(self)!r})"

    def __str__(self):
        from .parser import render

        return render(self)

    def _coerce(self, other) -> "SuperPoly":
        if isinstance(other, SuperPoly):
            if other.presentation != self.presentation:
                raise PresentationError("operands belong to different presentations")
            return other
        if isinstance(other, (int, Fraction)):
            return self.presentation.const(other)
        raise TypeError(f"cannot combine SuperPoly with {type(other).__name__}")

    # --- linear structure -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return SuperPoly(self.presentation, out)

    __radd__ = __add__

    def __neg__(self):
        return SuperPoly(self.presentation, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "SuperPoly":
        c = as_fraction(c)
        if not c:
            return self.presentation.zero()
        return SuperPoly(self.presentation, {m: c * v for m, v in self.terms.items()})

    # --- multiplication -----------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                merged = merge_odd(m1.odd, m2.odd)
                if merged is None:
                    continue
                sign, odd = merged
                exps = tuple(a + b for a, b in zip(m1.exps, m2.exps))
                key = Monomial(exps, odd)
                out[key] = out.get(key, 0) + (c1 * c2 if sign > 0 else -c1 * c2)
        return SuperPoly(self.presentation, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / as_fraction(other))
        return self * self._coerce(other).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.presentation.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # --- structure ------------------------------------------------------------
    def parity(self):
        """0 or 1 for homogeneous elements, None for mixed ones.  Zero counts as even."""
        parities = {m.parity for m in self.terms}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else EVEN

    def constant_term(self) -> Fraction:
        return self.terms.get(self.presentation.unit_monomial(), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def body(self) -> "SuperPoly":
        """The part free of odd variables (reduction modulo the nilpotent ideal)."""
        return SuperPoly(self.presentation, {m: c for m, c in self.terms.items() if not m.odd})

    def inverse(self) -> "SuperPoly":
        """Inverse of a unit: the body must be c * (Laurent monomial); the rest is nilpotent."""
        pres = self.presentation
        body = [(m, c) for m, c in self.terms.items() if not m.odd]
        if len(body) != 1:
            raise NotInvertibleError(f"{self} is not a unit")
        m, c = body[0]
        for v, e in zip(pres.even, m.exps):
            if e and not v.laurent:
                raise NotInvertibleError(f"{self} is not a unit: {v.name!r} is not invertible")
        unit_inv = SuperPoly(pres, {Monomial(tuple(-e for e in m.exps), ()): 1 / c})
        nil = (self - SuperPoly(pres, {m: c})) * unit_inv
        if nil.is_zero():
            return unit_inv
        # (1 + n)^-1 = sum (-n)^k, finite because n is nilpotent
        total = pres.const(1)
        power = pres.const(1)
        for _ in range(len(pres.odd) + 1):
            power = power * (-nil)
            if power.is_zero():
                break
            total = total + power
        else:
            raise NotInvertibleError("nilpotent part failed to vanish")
        return total * unit_inv

    def monomials(self) -> list:
        return list(self.terms)

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def homogeneous_part(self, parity: int) -> "SuperPoly":
        return SuperPoly(self.presentation, {m: c for m, c in self.terms.items() if m.parity == parity})


def parity_of(f: SuperPoly) -> str:
    p = f.parity()
    if p is None:
        return "inhomogeneous"
    return "odd" if p else "even"


def mul(f: SuperPoly, g: SuperPoly) -> SuperPoly:
    return f * g


def add(f: SuperPoly, g: SuperPoly) -> SuperPoly:
    return f + g


def scale(c, f: SuperPoly) -> SuperPoly:
    return f.scale(c)


def _involves(pres: Presentation, m: Monomial, even_idx: set, odd_idx: set) -> bool:
    if any(m.exps[i] for i in even_idx):
        return True
    return any(i in odd_idx for i in m.odd)


def _split_names(pres: Presentation, names) -> tuple:
    even_idx, odd_idx = set(), set()
    for n in names:
        v = pres.variable(n)
        if v.odd:
            odd_idx.add(pres.odd_index(n))
        else:
            even_idx.add(pres.even_index(n))
    return even_idx, odd_idx


def substitute_zero(f: SuperPoly, names) -> SuperPoly:
    """Set the given variables to zero, i.e. drop every term that contains one."""
    pres = f.presentation
    names = _names(names)
    for n in names:
        if pres.variable(n).laurent:
            raise PresentationError(f"laurent variable {n!r} is a unit and cannot vanish")
    even_idx, odd_idx = _split_names(pres, names)
    return SuperPoly(pres, {m: c for m, c in f.terms.items() if not _involves(pres, m, even_idx, odd_idx)})


def transfer(f: SuperPoly, target: Presentation) -> SuperPoly:
    """Re-express ``f`` in another presentation that contains all of its variables.

    Odd words are re-sorted according to the target order, with the matching sign.
    """
    src = f.presentation
    if src == target:
        return f
    even_map = {}
    for i, v in enumerate(src.even):
        if v.name in target:
            tv = target.variable(v.name)
            if tv.odd or (v.laurent and not tv.laurent):
                raise PresentationError(f"variable {v.name!r} changes type in target")
            even_map[i] = target.even_index(v.name)
    odd_map = {}
    for i, v in enumerate(src.odd):
        if v.name in target:
            if not target.variable(v.name).odd:
                raise PresentationError(f"variable {v.name!r} changes type in target")
            odd_map[i] = target.odd_index(v.name)
    out: dict = {}
    for m, c in f.terms.items():
        exps = [0] * len(target.even)
        for i, e in enumerate(m.exps):
            if e:
                if i not in even_map:
                    raise PresentationError(f"variable {src.even[i].name!r} missing from target")
                exps[even_map[i]] = e
        word = []
        for i in m.odd:
            if i not in odd_map:
                raise PresentationError(f"variable {src.odd[i].name!r} missing from target")
            word.append(odd_map[i])
        sign = 1
        for a in range(len(word)):
            for b in range(a + 1, len(word)):
                if word[a] > word[b]:
                    sign = -sign
        key = Monomial(tuple(exps), tuple(sorted(word)))
        out[key] = out.get(key, 0) + (c if sign > 0 else -c)
    return SuperPoly(target, out)


def partial(f: SuperPoly, name: str) -> SuperPoly:
    """Partial derivative; for an odd variable this is the left derivative."""
    pres = f.presentation
    v = pres.variable(name)
    out: dict = {}
    if v.odd:
        k = pres.odd_index(name)
        for m, c in f.terms.items():
            if k in m.odd:
                pos = m.odd.index(k)
                key = Monomial(m.exps, m.odd[:pos] + m.odd[pos + 1:])
                out[key] = out.get(key, 0) + (-c if pos % 2 else c)
    else:
        k = pres.even_index(name)
        for m, c in f.terms.items():
            e = m.exps[k]
            if e:
                exps = list(m.exps)
                exps[k] -= 1
                key = Monomial(tuple(exps), m.odd)
                out[key] = out.get(key, 0) + e * c
    return SuperPoly(pres, out)


def evaluate_body(f: SuperPoly, values: Mapping[str, Fraction]) -> Fraction:
    """Evaluate at a closed point: odd variables are 0, even ones take ``values``."""
    pres = f.presentation
    point = []
    for v in pres.even:
        val = as_fraction(values.get(v.name, 0))
        if v.laurent and val == 0:
            raise PresentationError(f"laurent variable {v.name!r} evaluated at 0")
        point.append(val)
    total = Fraction(0)
    for m, c in f.terms.items():
        if m.odd:
            continue
        term = c
        for val, e in zip(point, m.exps):
            if e:
                term *= val**e
        total += term
    return total


class AlgebraMap:
    """Algebra homomorphism determined by images of generators.

    Generators missing from ``images`` map to the variable of the same name
    in the target.  Laurent generators must map to units.
    """

    def __init__(self, source: Presentation, target: Presentation, images: Mapping[str, SuperPoly]):
        self.source = source
        self.target = target
        full = {}
        for v in source.variables:
            if v.name in images:
                img = images[v.name]
                if img.presentation != target:
                    raise PresentationError(f"image of {v.name!r} is not in the target presentation")
            else:
                img = target.var(v.name)
            p = img.parity()
            if not img.is_zero() and p != v.parity:
                raise PresentationError(f"image of {v.name!r} has the wrong parity")
            full[v.name] = img
        self.images = full
        self._even = [full[v.name] for v in source.even]
        self._odd = [full[v.name] for v in source.odd]
        self._inverses: dict = {}
        self._cache: dict = {}

    def _inverse(self, i: int) -> SuperPoly:
        if i not in self._inverses:
            self._inverses[i] = self._even[i].inverse()
        return self._inverses[i]

    def image_of_monomial(self, m: Monomial) -> SuperPoly:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        out = self.target.const(1)
        for i, e in enumerate(m.exps):
            if e > 0:
                out = out * self._even[i] ** e
            elif e < 0:
                out = out * self._inverse(i) ** (-e)
        for i in m.odd:
            out = out * self._odd[i]
        self._cache[m] = out
        return out

    def __call__(self, f: SuperPoly) -> SuperPoly:
        if f.presentation != self.source:
            raise PresentationError("argument is not in the source presentation")
        out: dict = {}
        for m, c in f.terms.items():
            for m2, c2 in self.image_of_monomial(m).terms.items():
                out[m2] = out.get(m2, 0) + c * c2
        return SuperPoly(self.target, out)

    def compose(self, first: "AlgebraMap") -> "AlgebraMap":
        """``self . first``."""
        if first.target != self.source:
            raise PresentationError("maps are not composable")
        return AlgebraMap(first.source, self.target, {n: self(img) for n, img in first.images.items()})

    def is_identity_on(self, names) -> bool:
        return all(self.images[n] == self.target.var(n) for n in _names(names))


def eliminate_unit_monomial(presentation: Presentation, relation: SuperPoly, solve_for: str):
    """Quotient by ``1 - m`` for a unit monomial ``m``, solving for one Laurent variable.

    Returns ``(smaller presentation, map)`` where the map sends ``solve_for``
    to the monomial forced by the relation and fixes the other generators.
    """
    if relation.presentation != presentation:
        raise PresentationError("relation is not in the given presentation")
    one = presentation.unit_monomial()
    if relation.coefficient(one) != 1 or len(relation) != 2:
        raise PresentationError(f"relation must have the shape 1 - m, got {relation}")
    (m, c), = [(k, v) for k, v in relation.terms.items() if k != one]
    if c != -1 or m.odd:
        raise PresentationError(f"relation must have the shape 1 - m with m an even monomial, got {relation}")
    var = presentation.variable(solve_for)
    if var.odd or not var.laurent:
        raise PresentationError(f"can only solve for a laurent variable, not {solve_for!r}")
    k = presentation.even_index(solve_for)
    e = m.exps[k]
    if e not in (1, -1):
        raise PresentationError(f"{solve_for!r} occurs in the relation with exponent {e}, need +-1")
    # x^e * rest = 1  =>  x = rest^(-e)
    target = presentation.without([solve_for])
    powers = {}
    for i, v in enumerate(presentation.even):
        if i == k or not m.exps[i]:
            continue
        p = -e * m.exps[i]
        if p < 0 and not v.laurent:
            raise PresentationError(f"solving for {solve_for!r} needs {v.name!r} to be invertible")
        powers[v.name] = p
    image = SuperPoly(target, {target.monomial(powers): Fraction(1)})
    from .parser import render

    target = presentation.without([solve_for], record=[(solve_for, render(image))])
    image = SuperPoly(target, image.terms)
    images = {solve_for: image}
    return target, AlgebraMap(presentation, target, images)
