from fractions import Fraction

import pytest

from dsloc.cohomology import DegreeWindow, ds_cohomology, superdimension
from dsloc.derivation import square
from dsloc.errors import DslocError
from dsloc.geometry import find_primitive, im_q2_reduction, restrict_window
from dsloc.scenarios import (appendix_d21a, appendix_expected, appendix_field, appendix_surrogate,
                             catalog_names, derham_scenario, gl11_field, q1_field, random_diagonal,
                             random_nonvanishing, run_catalog, sheaf_counterexample)

NAMES = ["appendix-d21a", "gl11-adjoint", "q1-adjoint", "sheaf-counterexample", "koszul-n1", "koszul-n2",
         "koszul-n3", "derham-torus1", "derham-torus2", "derham-torus3", "derham-affine1", "derham-affine2",
         "localization-basic", "imq2-reduction"]


def test_catalog_names():
    assert catalog_names() == NAMES


@pytest.mark.parametrize("name", NAMES)
def test_catalog_entry_passes(name):
    res, = run_catalog([name])
    assert res.passed, [c for c in res.checks if not c[1]]
    assert res.stable


def test_unknown_name_lists_available():
    with pytest.raises(DslocError, match="available: appendix-d21a"):
        run_catalog(["nope"])


def test_small_margin_is_not_a_pass():
    res = derham_scenario("derham-torus1", margin=0)
    assert not res.stable and not res.passed


class TestAppendix:
    def test_square_zero_for_several_ratios(self):
        for m, n in [(1, 1), (2, 3), (-1, 2), (1, 5)]:
            A, Q = appendix_field(m, n)
            assert square(Q).is_zero()

    def test_ratio_2_3(self):
        res = appendix_d21a(2, 3, 3)
        assert res.passed
        assert sorted({key[0] for (key, _p) in appendix_expected(2, 3, 3)}) == [-1, 0, 1]
        ks = sorted({key[0] for (key, _p) in res.reports["reduced"].nonzero()})
        assert ks == [-1, 0, 1]

    def test_surrogate(self):
        m, n = appendix_surrogate(2)
        assert n > 2 and Fraction(m, n) == Fraction(1, 5)
        res = appendix_d21a(m, n, 2)
        assert res.passed
        assert superdimension(res.reports["full"]) == (1, 1)
        assert superdimension(res.reports["reduced"]) == (1, 1)

    def test_gcd_precondition(self):
        with pytest.raises(DslocError):
            appendix_d21a(2, 4)


class TestAdjointScaling:
    @pytest.mark.parametrize("lam", [0, 1, 2, Fraction(-1, 3)])
    def test_gl11_rescaling(self, lam):
        P, Q = gl11_field(lam)
        w = DegreeWindow.symmetric(P, 2)
        base = ds_cohomology(P, Q, w)
        for c in (2, Fraction(-1, 2)):
            assert ds_cohomology(P, Q.scale(c), w).cohomology_dims() == base.cohomology_dims()
        assert base.stable and superdimension(base) == (1, 1)

    def test_q1_rescaling(self):
        P, Q = q1_field()
        w = DegreeWindow.symmetric(P, 2)
        base = ds_cohomology(P, Q, w)
        assert ds_cohomology(P, Q.scale(Fraction(3, 7)), w).cohomology_dims() == base.cohomology_dims()


def test_sheaf_counterexample_windows():
    for cap in (1, 2, 4):
        res = sheaf_counterexample(cap)
        assert res.passed and res.stable


@pytest.mark.parametrize("seed", range(5))
def test_random_nonvanishing(seed):
    scn = random_nonvanishing(seed)
    p = find_primitive(scn.Q, scn.certificate)
    assert scn.Q(p) == scn.presentation.const(1)
    rep = ds_cohomology(scn.presentation, scn.Q, scn.window)
    assert rep.stable and rep.is_zero()


@pytest.mark.parametrize("seed", range(5))
def test_random_diagonal(seed):
    scn = random_diagonal(seed)
    Y, R, q = im_q2_reduction(scn.Q)
    x = ds_cohomology(scn.presentation, scn.Q, scn.window)
    y = ds_cohomology(R, q, restrict_window(scn.window, Y))
    assert x.stable and y.stable and x.nonzero() == y.nonzero()
