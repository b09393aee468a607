"""Independent derivation of the adjoint fields from the coproduct.

For an odd u in the Lie superalgebra, u_e is the odd functional "differentiate along u at the
identity".  The adjoint field is (1 (x) u_e - u_e (x) 1) . Delta, where the tensor product of
the coordinate ring with itself is modelled as one free algebra on L_ and R_ copies of the
generators (the odd L_ variables precede the odd R_ ones, which gives the Koszul sign).
"""

from fractions import Fraction

import pytest

from dsloc.algebra import AlgebraMap, Presentation
from dsloc.derivation import Derivation
from dsloc.scenarios import gl11_field, q1_field


def tensor_square(P: Presentation) -> Presentation:
    even = [f"L_{v.name}" for v in P.even] + [f"R_{v.name}" for v in P.even]
    odd = [f"L_{n}" for n in P.odd_names] + [f"R_{n}" for n in P.odd_names]
    laurent = [f"{s}_{v.name}" for s in "LR" for v in P.even if v.laurent]
    return Presentation.build(even=even, odd=odd, laurent=laurent)


def adjoint(P, coproduct, tangent, identity):
    """coproduct: name -> list of (left name, right name); tangent: odd name -> value of u_e;
    identity: even name -> coordinate of the unit element."""
    T = tensor_square(P)
    delta = {n: sum((T.var(f"L_{l}") * T.var(f"R_{r}") for l, r in terms), T.zero())
             for n, terms in coproduct.items()}
    # 1 (x) u_e and u_e (x) 1 as odd derivations with constant values on generators
    d_right = Derivation(T, {f"R_{n}": T.const(c) for n, c in tangent.items()})
    d_left = Derivation(T, {f"L_{n}": T.const(c) for n, c in tangent.items()})

    def counit(side):
        other = "R" if side == "L" else "L"
        images = {}
        for v in P.variables:
            images[f"{side}_{v.name}"] = P.var(v.name)
            images[f"{other}_{v.name}"] = P.const(identity.get(v.name, 0))
        return AlgebraMap(T, P, images)

    keep_left, keep_right = counit("L"), counit("R")
    return Derivation(P, {n: keep_left(d_right(delta[n])) - keep_right(d_left(delta[n])) for n in coproduct})


def gl11_coproduct():
    # x_ij with a = x11, beta = x12, gamma = x21, d = x22; Delta(x_ij) = sum_k x_ik (x) x_kj
    name = {(1, 1): "a", (1, 2): "beta", (2, 1): "gamma", (2, 2): "d"}
    return {name[(i, j)]: [(name[(i, k)], name[(k, j)]) for k in (1, 2)] for (i, j) in name}


@pytest.mark.parametrize("lam", [0, 1, 2, Fraction(-3, 5)])
def test_gl11_field_matches_coproduct(lam):
    P, Q = gl11_field(lam)
    # u = [[0, 1], [lam, 0]]
    derived = adjoint(P, gl11_coproduct(), {"beta": 1, "gamma": lam}, {"a": 1, "d": 1})
    assert derived == Q


def test_q1_field_matches_coproduct():
    P, Q = q1_field()
    # Q(1) = {[[x, xi], [xi, x]]}: Delta(x) = x (x) x + xi (x) xi, Delta(xi) = x (x) xi + xi (x) x
    cop = {"x": [("x", "x"), ("xi", "xi")], "xi": [("x", "xi"), ("xi", "x")]}
    derived = adjoint(P, cop, {"xi": 1}, {"x": 1})
    assert derived == Q

