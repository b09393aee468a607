from math import comb

import pytest

from dsloc.algebra import Presentation
from dsloc.cohomology import DegreeWindow, ds_cohomology, superdimension
from dsloc.derham import (build_pi_tangent, convolve, de_rham_dims, odd_cotangent_recognize,
                          torus_and_affine)
from dsloc.derivation import odd_derivation, square
from dsloc.errors import DslocError
from dsloc.geometry import RationalPoint
from dsloc.parser import parse_expression as pe
from dsloc.parser import render
from dsloc.scenarios import q1_field


class TestBuild:
    def test_affine_line(self):
        scn = build_pi_tangent(Presentation.build(even="t"))
        assert scn.lifted.names == ("t", "dt")
        assert scn.d(scn.lifted.var("t")) == scn.lifted.var("dt")

    def test_punctured_line_inverse_rule(self):
        scn = build_pi_tangent(Presentation.build(even="x", laurent="x"))
        L = scn.lifted
        assert scn.d(pe("x^-1", L)) == pe("-x^-2*dx", L)

    def test_torus2_square_zero(self):
        scn = build_pi_tangent(torus_and_affine(2, 0))
        assert len(scn.lifted.odd) == 2 and square(scn.d).is_zero()

    def test_odd_base_rejected(self):
        with pytest.raises(DslocError):
            build_pi_tangent(Presentation.build(even="t", odd="xi"))


class TestDims:
    def test_affine_line(self):
        out = de_rham_dims(build_pi_tangent(torus_and_affine(0, 1)))
        assert out.dims == (1, 0) and out.stable

    def test_punctured_line(self):
        out = de_rham_dims(build_pi_tangent(torus_and_affine(1, 0)))
        assert out.dims == (1, 1) and out.stable
        reps = sorted(render(r) for rs in out.report.representatives.values() for r in rs)
        assert reps == ["1", "x1^-1*dx1"]

    def test_torus2(self):
        assert de_rham_dims(build_pi_tangent(torus_and_affine(2, 0))).dims == (1, 2, 1)

    def test_exactness_oracle(self):
        # x^e dx is exact iff e != -1: check directly against d(x^(e+1)) / (e+1)
        scn = build_pi_tangent(torus_and_affine(1, 0))
        L = scn.lifted
        for e in range(-3, 3):
            form = pe(f"x1^{e}*dx1", L) if e >= 0 else pe(f"x1^-{-e}*dx1", L)
            if e != -1:
                k = e + 1
                prim = pe(f"x1^{k}", L) if k >= 0 else pe(f"x1^-{-k}", L)
                assert scn.d(prim).scale(1) == form.scale(k)

    @pytest.mark.parametrize("a,b", [(a, b) for a in range(4) for b in range(4) if 1 <= a + b <= 3])
    def test_kuenneth(self, a, b):
        out = de_rham_dims(build_pi_tangent(torus_and_affine(a, b)))
        want = (1,)
        for _ in range(a):
            want = convolve(want, (1, 1))
        for _ in range(b):
            want = convolve(want, (1, 0))
        assert out.stable and out.dims == want

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_torus_superdimension(self, n):
        out = de_rham_dims(build_pi_tangent(torus_and_affine(n, 0)))
        assert out.dims == tuple(comb(n, k) for k in range(n + 1))
        assert superdimension(out.report) == (2 ** (n - 1), 2 ** (n - 1))


def test_convolve():
    assert convolve((1, 1), (1, 1)) == (1, 2, 1)
    assert convolve((1, 0), (1, 1)) == (1, 1, 0)


class TestRecognize:
    def test_de_rham(self):
        P = Presentation.build(even="t", odd="xi")
        rec = odd_cotangent_recognize(P, odd_derivation(P, {"t": "xi"}), [RationalPoint.of({"t": 0})])
        assert rec.ok and rec.witness == {"t": "xi"}

    def test_koszul_fails(self):
        P = Presentation.build(even="t", odd="xi")
        rec = odd_cotangent_recognize(P, odd_derivation(P, {"xi": "t"}), [RationalPoint.of({"t": 0})])
        assert not rec.ok and rec.reasons

    def test_count_mismatch(self):
        P = Presentation.build(even="t s", odd="xi")
        rec = odd_cotangent_recognize(P, odd_derivation(P, {"t": "xi"}), [])
        assert not rec.ok and "2 even vs 1 odd" in rec.reasons[0]

    def test_q1(self):
        P, Q = q1_field()
        rec = odd_cotangent_recognize(P, Q, [RationalPoint.of({"x": 1}), RationalPoint.of({"x": -3})])
        assert rec.ok and rec.witness == {"x": "-2*xi"}
        assert superdimension(ds_cohomology(P, Q, DegreeWindow.symmetric(P, 2))) == (1, 1)
