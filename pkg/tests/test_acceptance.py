"""The nine acceptance criteria, each at exact (zero) tolerance and within its time limit."""

import test_properties
from conftest import criterion
from dsloc.cohomology import DegreeWindow, ds_cohomology, superdimension
from dsloc.derham import build_pi_tangent, convolve, de_rham_dims, torus_and_affine
from dsloc.derivation import odd_derivation
from dsloc.geometry import (CoordinateSubvariety, RationalPoint, find_primitive, im_q2_reduction,
                            koszul_build, koszul_default_window, koszul_verify, localization_check,
                            restrict_window)
from dsloc.algebra import Presentation
from dsloc.scenarios import (appendix_d21a, appendix_surrogate, gl11_adjoint, q1_adjoint, random_diagonal,
                             random_nonvanishing, sheaf_counterexample)


def test_criterion_1_non_vanishing():
    with criterion(1, "non-vanishing primitive <=> DS = 0 on 10 random scenarios", 10):
        for seed in range(10):
            scn = random_nonvanishing(seed)
            p = find_primitive(scn.Q, scn.certificate)
            assert scn.Q(p) == scn.presentation.const(1)
            rep = ds_cohomology(scn.presentation, scn.Q, scn.window)
            assert rep.stable and rep.is_zero(), (seed, rep.nonzero())


def test_criterion_2_koszul():
    with criterion(2, "Koszul acyclicity, n = 1..3, base dimension 0..2", 30):
        for n in (1, 2, 3):
            for nb in range(3):
                scn = koszul_build([f"t{i}" for i in range(1, n + 1)], [f"s{i}" for i in range(1, nb + 1)])
                chk = koszul_verify(scn, koszul_default_window(scn, 3 if n + nb <= 4 else 2))
                assert chk.ok and chk.report.stable, (n, nb, chk.mismatches)


def test_criterion_3_localization():
    with criterion(3, "localization on A^{2|2} at the origin", 5):
        P = Presentation.build(even="t1 t2", odd="xi1 xi2")
        Q = odd_derivation(P, {"xi1": "t1", "t1": "xi1"})
        Y = CoordinateSubvariety.of(P, ["t1", "xi1"])
        res = localization_check(Q, Y, [RationalPoint.of({})], DegreeWindow.make(cap=3))
        hyp = res.hypotheses
        assert hyp.ideal_stable.ok
        assert all(hyp.vanishing.values()) and all(hyp.on_y.values())
        assert all(c.ok for c in hyp.conormal.values()) and len(hyp.conormal) == 1
        assert res.ds_x.stable and res.ds_y.stable
        assert res.ds_x.cohomology_dims() == {k: v for k, v in res.ds_y.cohomology_dims().items()}
        assert res.agree


def test_criterion_4_imq2():
    with criterion(4, "Im Q^2 reduction on 10 random diagonal-Q^2 scenarios", 20):
        for seed in range(10):
            scn = random_diagonal(seed)
            Y, R, q = im_q2_reduction(scn.Q)
            x = ds_cohomology(scn.presentation, scn.Q, scn.window)
            y = ds_cohomology(R, q, restrict_window(scn.window, Y))
            assert x.stable and y.stable
            assert x.nonzero() == y.nonzero(), (seed, x.nonzero(), y.nonzero())


def test_criterion_5_appendix():
    with criterion(5, "appendix: k[z^+-1, zeta] at m/n = 1/1, k[zeta] for the surrogate", 60):
        res = appendix_d21a(1, 1, 2)
        assert res.passed, [c for c in res.checks if not c[1]]
        labels = {label for label, ok, _ in res.checks if ok}
        assert "[D1, D2] = 0" in labels
        for rep in (res.reports["full"], res.reports["reduced"]):
            assert rep.stable
            assert rep.nonzero() == {((k, 0), p): 1 for k in range(-2, 3) for p in (0, 1)}
        m, n = appendix_surrogate(2)
        sur = appendix_d21a(m, n, 2)
        assert sur.passed
        assert superdimension(sur.reports["full"]) == (1, 1)
        assert superdimension(sur.reports["reduced"]) == (1, 1)


def test_criterion_6_adjoint_rows():
    with criterion(6, "GL(1|1) (lambda = 0, 1, 2) and Q(1) adjoint fields give 1|1", 30):
        for lam in (0, 1, 2):
            res = gl11_adjoint(lam)
            assert res.passed and superdimension(res.reports["ds"]) == (1, 1)
        res = q1_adjoint()
        assert res.passed and superdimension(res.reports["ds"]) == (1, 1)


def test_criterion_7_de_rham():
    with criterion(7, "de Rham dims and Kuenneth for products of <= 3 factors", 30):
        assert de_rham_dims(build_pi_tangent(torus_and_affine(0, 1))).dims == (1, 0)
        assert de_rham_dims(build_pi_tangent(torus_and_affine(1, 0))).dims == (1, 1)
        assert de_rham_dims(build_pi_tangent(torus_and_affine(2, 0))).dims == (1, 2, 1)
        for a in range(4):
            for b in range(4 - a):
                if a + b == 0:
                    continue
                out = de_rham_dims(build_pi_tangent(torus_and_affine(a, b)))
                want = (1,)
                for f in [(1, 1)] * a + [(1, 0)] * b:
                    want = convolve(want, f)
                assert out.stable and out.dims == want, (a, b, out.dims)


def test_criterion_8_sheaf_counterexample():
    with criterion(8, "multiplication by xi on k[t, xi] has DS = 0", 5):
        res = sheaf_counterexample()
        assert res.passed and res.stable and res.reports["ds"].is_zero()


PROPERTY_SUITES = [
    "test_supercommutativity", "test_leibniz", "test_even_leibniz", "test_square_commutes_with_q",
    "test_h_decomposition", "test_restrict_commutes_with_apply", "test_window_monotonicity",
]


def test_criterion_9_property_suites():
    with criterion(9, "property suites, 200 cases each, zero failures", None):
        for name in PROPERTY_SUITES:
            fn = getattr(test_properties, name)
            assert fn.hypothesis.inner_test is not None
            assert fn._hypothesis_internal_use_settings.max_examples >= 200
            fn()
