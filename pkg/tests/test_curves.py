import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import count_points_naive
from wildcovers import curves
from wildcovers.arith import GF
from wildcovers.curves import (
    EllipticFunction,
    EllipticMarkedCurve,
    H1Class,
    ProjectiveLine,
    elliptic_verdict,
    frobenius_on_h1,
    hasse_deuring,
    injectivity_counterexample,
    injectivity_probe,
    is_anomalous,
    nonsingular_curves,
    point_count,
    reduce_matrix_global,
    reduce_principal_part,
    rr_basis,
    split_elliptic,
    split_residual,
    weierstrass_expand,
    wp_star_on_h1,
)
from wildcovers.errors import AnomalousCurveError, IntegrityError, PrecisionError, UsageError
from wildcovers.series import LaurentSeries, wp_apply, wp_solve_local, wp_solve_tail
from wildcovers.unipotent import LaurentRing, P1GlobalRing, UnipotentMatrix, positions

E_ORD = EllipticMarkedCurve(5, 1, 0)   # #E = 4, alpha = 2
E_SS = EllipticMarkedCurve(5, 0, 1)    # #E = 6, alpha = 0
E_AN = EllipticMarkedCurve(5, 3, 2)    # #E = 5, alpha = 1
E_ODD = EllipticMarkedCurve(5, 3, 0)   # #E = 10, alpha = 1


def mono(F, k, c=1, prec=None):
    return LaurentSeries.monomial(F, c, k, prec)


def random_series(rng, F, lo, hi, prec):
    terms = {k: F.element([rng.randrange(F.p) for _ in range(F.e)]) for k in range(lo, hi + 1)}
    return LaurentSeries.from_terms(F, terms, prec)


def random_curve(rng, primes=(5, 7, 11, 13)):
    while True:
        p = rng.choice(primes)
        A, B = rng.randrange(p), rng.randrange(p)
        if (4 * A**3 + 27 * B**2) % p:
            return EllipticMarkedCurve(p, A, B)


# -- curve models --------------------------------------------------------

def test_curve_validation():
    with pytest.raises(UsageError):
        EllipticMarkedCurve(5, 0, 0)
    with pytest.raises(UsageError):
        EllipticMarkedCurve(3, 1, 0)
    with pytest.raises(UsageError):
        EllipticMarkedCurve(9, 1, 0)
    assert EllipticMarkedCurve(5, 6, -3) == EllipticMarkedCurve(5, 1, 2)
    assert sum(1 for _ in nonsingular_curves(5)) == 20


def test_function_arithmetic():
    x = EllipticFunction.monomial(E_ORD, 1, 0)
    y = EllipticFunction.monomial(E_ORD, 0, 1)
    assert y * y == x * x * x + x
    assert (y * y).pole_order == 6
    assert (x + 1 - 1) == x
    assert y.frobenius() == y * y * y * y * y
    prec = 30
    assert (x * y).expand(prec).agrees_with(x.expand(prec) * y.expand(prec))


# -- expansion -------------------------------------------------------------

def test_weierstrass_expansion_example():
    x, y = weierstrass_expand(E_ORD, 20)
    # x = t^-2 - A t^2 + O(t^3) with A = 1
    assert x.val == -2
    assert x.terms().get(-1) is None and x[0].is_zero() and x[1].is_zero()
    assert x[2] == GF(5)(-1)
    assert y.val == -3 and y[-3] == GF(5)(-1)


def test_weierstrass_expand_needs_precision():
    with pytest.raises(PrecisionError):
        weierstrass_expand(E_ORD, 5)


@pytest.mark.parametrize("seed", range(50))
def test_weierstrass_residual(seed):
    rng = random.Random(seed)
    E = random_curve(rng)
    prec = rng.randrange(10, 40)
    x, y = weierstrass_expand(E, prec)
    residual = y * y - x * x * x - x.scale(E.A) - E.B
    assert residual.prec >= prec - 9
    assert residual.is_zero()
    # t = -x/y
    assert (-(x / y)).agrees_with(mono(E.field, 1))
    # leading behaviour x = t^-2 (1 + O(t^4)), y = -t^-3 (1 + O(t^4))
    for k in (-1, 0, 1):
        assert x[k].is_zero()
    for k in (-2, -1, 0):
        assert y[k].is_zero()


# -- Riemann-Roch and principal parts ---------------------------------------

def test_rr_basis_examples():
    assert [(f.i, f.j) for f in rr_basis(E_ORD, 0, 10)] == [(0, 0)]
    assert [(f.i, f.j) for f in rr_basis(E_ORD, 1, 10)] == [(0, 0)]
    assert [(f.i, f.j) for f in rr_basis(E_ORD, 3, 10)] == [(0, 0), (1, 0), (0, 1)]
    with pytest.raises(UsageError):
        rr_basis(E_ORD, -1, 10)


@pytest.mark.parametrize("m", range(1, 15))
def test_rr_basis_count_and_valuations(m):
    basis = rr_basis(E_SS, m, 12)
    assert len(basis) == m
    orders = [f.pole_order for f in basis]
    assert 1 not in orders and sorted(set(orders)) == orders
    for f in basis:
        assert f.expansion.val == -f.pole_order


def test_reduce_principal_part_examples():
    F = E_ORD.field
    x = EllipticFunction.monomial(E_ORD, 1, 0)
    red = reduce_principal_part(E_ORD, x.expand(20))
    assert red.g == x and red.c == 0 and red.tail.is_zero()
    red = reduce_principal_part(E_ORD, mono(F, -1, prec=20))
    assert red.g.is_zero() and red.c == 1 and red.tail.is_zero()
    red = reduce_principal_part(E_ORD, mono(F, -2, prec=20))
    assert red.c == 0
    assert red.g.b == () and len(red.g.a) <= 2
    with pytest.raises(PrecisionError):
        reduce_principal_part(E_ORD, mono(F, -2))
    with pytest.raises(UsageError):
        reduce_principal_part(E_ORD, mono(F, -2, prec=-3))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_reduce_principal_part_reconstructs(seed):
    rng = random.Random(seed)
    E = random_curve(rng, (5, 7))
    f = random_series(rng, E.field, -12, 20, 20)
    red = reduce_principal_part(E, f)
    assert red.tail.is_zero() or red.tail.val >= 1
    rebuilt = red.g.expand(20) + mono(E.field, -1, red.c) + red.tail
    assert rebuilt.agrees_with(f)


# -- invariants ----------------------------------------------------------

@pytest.mark.parametrize("E,count,alpha", [(E_ORD, 4, 2), (E_SS, 6, 0), (E_AN, 5, 1), (E_ODD, 10, 1)])
def test_invariant_examples(E, count, alpha):
    assert point_count(E) == count == count_points_naive(E.p, E.A, E.B)
    assert frobenius_on_h1(E) == alpha == hasse_deuring(E)
    assert is_anomalous(E) == (count == 5)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_point_count_matches_oracle(p):
    for E in nonsingular_curves(p):
        assert point_count(E) == count_points_naive(p, E.A, E.B)
        assert abs(p + 1 - point_count(E)) ** 2 <= 4 * p


def test_wp_star_examples():
    assert wp_star_on_h1(E_ORD, H1Class(5, 0)).c == 0
    assert wp_star_on_h1(E_ORD, H1Class(5, 1)).c == 1
    assert all(wp_star_on_h1(E_AN, H1Class(5, c)).c == 0 for c in range(5))
    assert wp_star_on_h1(E_SS, H1Class(5, 2)).c == 3


def test_verdict_examples():
    v = elliptic_verdict(E_ORD)
    assert (v.injective, v.surjective, v.equivalence) == (True, True, True)
    assert not v.discrepancy
    v = elliptic_verdict(E_AN)
    assert (v.count, v.alpha, v.anomalous) == (5, 1, True)
    assert not (v.injective or v.surjective or v.equivalence)
    v = elliptic_verdict(E_SS)
    assert v.alpha == 0 and v.injective
    v = elliptic_verdict(E_ODD)
    assert v.discrepancy and not v.anomalous and not v.injective


def test_verdict_integrity_guard(monkeypatch):
    monkeypatch.setattr(curves, "hasse_deuring", lambda E: (frobenius_on_h1(E) + 1) % E.p)
    with pytest.raises(IntegrityError):
        elliptic_verdict(E_ORD)


# -- splitting -------------------------------------------------------------

def test_split_elliptic_examples():
    F = E_ORD.field
    f = mono(F, -1, prec=20)
    sp = split_elliptic(E_ORD, f)
    assert sp.obstruction == 0
    assert split_residual(E_ORD, f, sp).is_zero()
    assert split_elliptic(E_AN, mono(F, -1, prec=20)).obstruction == 1
    y = EllipticFunction.monomial(E_ORD, 2, 1)
    sp = split_elliptic(E_ORD, y.expand(20))
    assert sp.b.is_zero() and sp.g == y and sp.obstruction == 0


def test_split_elliptic_precision_guard():
    with pytest.raises(PrecisionError) as info:
        split_elliptic(E_ORD, mono(E_ORD.field, -1, prec=6))
    assert info.value.required == 7


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_split_elliptic_reconstruction(seed):
    rng = random.Random(seed)
    E = random_curve(rng, (5, 7, 11))
    f = random_series(rng, E.field, -10, 25, 25)
    sp = split_elliptic(E, f)
    assert split_residual(E, f, sp).is_zero()
    if frobenius_on_h1(E) != 1:
        assert sp.obstruction == 0


@pytest.mark.parametrize("p", [5, 7])
def test_verdict_matches_obstruction(p):
    for E in nonsingular_curves(p):
        sp = split_elliptic(E, mono(E.field, -1, prec=p + 2))
        assert (sp.obstruction != 0) == (not elliptic_verdict(E).surjective)


# -- matrix globalization ------------------------------------------------------

def test_reduce_p1_entry_t():
    F = GF(2)
    L = LaurentRing(F)
    M = UnipotentMatrix(2, L, {(1, 2): mono(F, 1, prec=40)})
    red = reduce_matrix_global(ProjectiveLine(F), M)
    assert red.M_global.is_identity()
    assert red.B[1, 2].agrees_with(-wp_solve_tail(mono(F, 1, prec=40)))
    assert red.verify(ProjectiveLine(F), M)


def test_reduce_global_input_is_fixed():
    F = GF(3)
    M = UnipotentMatrix(3, P1GlobalRing(F), {(1, 2): mono(F, -2), (1, 3): 1, (2, 3): mono(F, -1, 2)})
    red = reduce_matrix_global(ProjectiveLine(F), M)
    assert red.B.is_identity()
    assert all(red.M_global[pos] == M[pos] for pos in positions(3))
    x = EllipticFunction.monomial(E_ORD, 1, 0)
    L = LaurentRing(E_ORD.field)
    M = UnipotentMatrix(2, L, {(1, 2): x.expand(40)})
    red = reduce_matrix_global(E_ORD, M)
    assert red.M_global[1, 2] == x
    assert red.B[1, 2].is_zero()


@pytest.mark.parametrize("p,e", [(2, 1), (3, 1), (2, 2), (5, 1)])
def test_reduce_p1_random(p, e):
    F = GF(p, e)
    L = LaurentRing(F)
    model = ProjectiveLine(F)
    rng = random.Random(p * 7 + e)
    for _ in range(5):
        n = rng.randint(2, 4)
        M = UnipotentMatrix(n, L, {pos: L.random(rng, pole=10, prec=40) for pos in positions(n)})
        red = reduce_matrix_global(model, M)
        assert red.verify(model, M)
        for pos in positions(n):
            assert model.is_global(red.M_global[pos])


@pytest.mark.parametrize("A,B", [(1, 0), (0, 1), (2, 3)])
def test_reduce_elliptic_random(A, B):
    E = EllipticMarkedCurve(7, A, B) if (A, B) == (2, 3) else EllipticMarkedCurve(5, A, B)
    L = LaurentRing(E.field)
    rng = random.Random(A + 10 * B)
    if frobenius_on_h1(E) == 1:
        pytest.skip("anomalous-type curve")
    for _ in range(3):
        M = UnipotentMatrix(3, L, {pos: L.random(rng, pole=8, prec=40) for pos in positions(3)})
        red = reduce_matrix_global(E, M)
        assert red.verify(E, M)


def test_reduce_refuses_on_anomalous_curve():
    F = E_AN.field
    M = UnipotentMatrix(2, LaurentRing(F), {(1, 2): mono(F, -1, prec=40)})
    with pytest.raises(AnomalousCurveError) as info:
        reduce_matrix_global(E_AN, M)
    assert info.value.witness == {"entry": "1,2", "obstruction": 1}
    assert info.value.exit_code == 4


def test_reduce_rejects_wrong_ring():
    from wildcovers.unipotent import FqRing
    with pytest.raises(UsageError):
        reduce_matrix_global(ProjectiveLine(GF(2)), UnipotentMatrix.identity(2, FqRing(GF(2))))
    with pytest.raises(UsageError):
        reduce_matrix_global(ProjectiveLine(GF(3)), UnipotentMatrix.identity(2, LaurentRing(GF(2))))


# -- injectivity -------------------------------------------------------------

def test_injectivity_probe_p1():
    F = GF(2)
    model = ProjectiveLine(F)
    h = mono(F, -3) + mono(F, -1) + 1
    assert injectivity_probe(model, h).affirmative
    with pytest.raises(UsageError):
        injectivity_probe(model, wp_solve_tail(mono(F, 1, prec=30)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([(2, 1), (3, 1), (2, 2), (5, 1)]))
def test_injectivity_p1_random(seed, pe):
    F = GF(*pe)
    rng = random.Random(seed)
    h = random_series(rng, F, -8, 0, None)
    target = wp_apply(h).truncate(30)
    b = wp_solve_local(target)
    assert b is not None
    assert injectivity_probe(ProjectiveLine(F), b).affirmative
    d = b - h
    assert d.restrict(hi=-1).is_zero() and d.restrict(lo=1).is_zero() and d[0].in_prime_field()


def test_injectivity_elliptic():
    x = EllipticFunction.monomial(E_ORD, 1, 0)
    assert injectivity_probe(E_ORD, x.expand(30)).affirmative
    assert injectivity_counterexample(E_ORD, 30) is None
    b = injectivity_counterexample(E_AN, 30)
    verdict = injectivity_probe(E_AN, b)
    assert not verdict.affirmative and verdict.h1_class == 1
    assert E_AN.is_global(wp_apply(b))
    with pytest.raises(UsageError):
        injectivity_probe(E_ORD, mono(E_ORD.field, -1, prec=30))
