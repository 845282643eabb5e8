import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from grassfree import linalg
from grassfree.grassmann import (
    HEIGHT_ONE,
    ell_at_least,
    ell_at_most,
    enumerate_points,
    freeness,
    lemma_m1_check,
    max_slope_at_most,
    normalized_tangent_stats,
    orthogonal_point,
    phi_tilde,
    point_from_basis,
    point_from_json,
    small_s1_check,
    tangent,
    tangent_slopes,
    unfree_family,
    unfree_through_flag,
)
from grassfree.lattice import Lattice
from grassfree.slopes import slope_table, successive_minima
from oracles import naive_points, plucker


def test_point_from_basis():
    P = point_from_basis(((1,), (0,)), 1, 2)
    assert P.H_sq == 1
    assert point_from_basis(((2,), (4,)), 1, 2) == point_from_basis(((1,), (2,)), 1, 2)
    Q = point_from_basis(((3, 0), (1, 0), (0, 1), (0, 0)), 2, 4)
    assert Q == unfree_family(2, 4, 3)
    with pytest.raises(linalg.RankDeficientError, match="rank deficient"):
        point_from_basis(((1, 2), (2, 4), (0, 0)), 2, 3)


def test_json_roundtrip():
    P = unfree_family(2, 5, 4)
    assert point_from_json(P.to_json()) == P


def test_tangent_examples():
    P = point_from_basis(((1, 0), (0, 1), (0, 0), (0, 0)), 2, 4)
    assert tangent(P).T.covol_sq == 1
    P = unfree_family(2, 4, 3)
    td = tangent(P)
    assert td.T.covol_sq * P.covol_sq ** 4 == 1
    e3e4 = tuple(int(i == 2) * int(j == 3) for i in range(4) for j in range(4))
    C = td.T_dual.coordinates(tuple((x,) for x in e3e4))
    assert all(Fraction(x[0]).denominator == 1 for x in C)


def test_freeness_examples():
    for P in enumerate_points(1, 2, 50):
        ell = freeness(P).ell
        assert ell == (HEIGHT_ONE if P.covol_sq == 1 else 1.0)
    for q in (2, 3, 7):
        assert freeness(unfree_family(2, 4, q)).ell == 0.0
    assert freeness(unfree_family(2, 5, 10)).ell == 0.0
    rep = freeness(unfree_family(2, 4, 3))
    assert rep.witness_covol_sq == 1 and rep.witness.rank == 1
    assert isinstance(freeness(unfree_family(2, 4, 1)).ell, (float, str))


def test_unfree_family_range():
    with pytest.raises(ValueError, match="1 < m < n-1"):
        unfree_family(1, 4, 3)
    with pytest.raises(ValueError, match="1 < m < n-1"):
        unfree_family(3, 4, 3)


def test_gr13_freeness_threshold():
    for P in enumerate_points(1, 3, 200):
        if P.covol_sq > 1:
            assert freeness(P).ell >= 2 / 3 - 1e-9


def test_exact_eps_tests_agree_with_float_ell():
    for P in enumerate_points(2, 4, 150):
        ell = freeness(P).ell
        if ell == HEIGHT_ONE:
            assert ell_at_least(P, Fraction(1, 2)) and not ell_at_most(P, 0)
            continue
        for eps in (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(3, 4)):
            if abs(ell - eps) > 1e-9:
                assert ell_at_least(P, eps) == (ell >= eps)
                assert ell_at_most(P, eps) == (ell <= eps)
        assert ell_at_most(P, 0) == (ell == 0.0)


def test_flag_construction():
    seed = point_from_basis(((2,), (3,)), 1, 2)
    P = unfree_through_flag((1, 0, 0, 0), (0, 0, 0, 1), seed)
    assert P.lattice.equals(Lattice.from_columns([(1, 0, 0, 0), (0, 2, 3, 0)]))
    with pytest.raises(ValueError, match="orthogonal"):
        unfree_through_flag((1, 0, 0, 1), (0, 0, 0, 1), seed)


def test_flag_construction_general():
    u, v = (1, 1, 0, 0, 0), (1, -1, 2, 0, 0)
    seed = point_from_basis(((1,), (2,), (5,)), 1, 3)
    P = unfree_through_flag(u, v, seed)
    assert (P.m, P.n) == (2, 5)
    C = P.lattice.coordinates(tuple((x,) for x in u))
    assert all(Fraction(x[0]).denominator == 1 for x in C)
    assert all(x == 0 for x in linalg.matmul((v,), P.basis)[0])
    assert successive_minima(P.lattice).s_sq[0] <= sum(x * x for x in u)


def test_flag_fibonacci_freeness_decreases():
    fib = [1, 2]
    while len(fib) < 10:
        fib.append(fib[-1] + fib[-2])
    ells = []
    for F in fib[2::2]:
        seed = point_from_basis(((1,), (F,)), 1, 2)
        P = unfree_through_flag((1, 0, 0, 0), (0, 0, 0, 1), seed)
        ells.append(freeness(P).ell)
    assert all(b <= a + 1e-12 for a, b in zip(ells, ells[1:]))
    assert ells[-1] < 0.2


def test_small_s1_direction():
    seed = point_from_basis(((1,), (21,)), 1, 2)
    P = unfree_through_flag((1, 0, 0, 0), (0, 0, 0, 1), seed)
    eps = 0.5
    assert freeness(P).ell < eps
    lhs, rhs, ok = small_s1_check(P, eps, 1)
    assert ok and lhs == 1


def test_normalized_stats():
    P = point_from_basis(((1, 0), (0, 1), (0, 0), (0, 0)), 2, 4)
    mmu, logs = normalized_tangent_stats(P, minima=True)
    assert mmu == 0 and logs == [0.0] * 4
    P = unfree_family(2, 4, 3)
    mmu, logs = normalized_tangent_stats(P, minima=True)
    mu_T, mmax, _ = tangent_slopes(P)
    T = tangent(P).T
    direct = slope_table(T)
    assert abs(mmax - direct.mu_max) < 1e-9 and abs(mu_T - direct.mu) < 1e-9
    assert abs(mmu - (direct.mu_max - direct.mu)) < 1e-9 and mmu > 0
    # unimodular rescaling: minima of u(T) multiply to at least covolume 1
    assert sum(logs) >= -1e-9


def test_normalized_stats_nonnegative():
    for P in enumerate_points(2, 4, 60):
        assert normalized_tangent_stats(P)[0] >= 0


def test_max_slope_filter_matches_float():
    for P in enumerate_points(2, 4, 100):
        _, mmax, _ = tangent_slopes(P)
        for B in (Fraction(3, 2), 2, 3):
            if abs(mmax - math.log(B)) > 1e-9:
                assert max_slope_at_most(P, B) == (mmax <= math.log(B))


def test_enumerate_small_examples():
    assert len(enumerate_points(1, 2, 1)) == 2
    assert len(enumerate_points(1, 2, 2)) == 4
    assert len(enumerate_points(2, 3, 1)) == 3
    pts = enumerate_points(2, 4, 30)
    assert pts == sorted(pts, key=lambda P: P.sort_key())
    assert all(P.H_sq <= 900 for P in pts)
    assert len({P.key for P in pts}) == len(pts)


def test_enumerate_workers_deterministic():
    a = enumerate_points(2, 4, 40, workers=1)
    b = enumerate_points(2, 4, 40, workers=2)
    assert [P.key for P in a] == [P.key for P in b]


@pytest.mark.parametrize("m,n,B", [(1, 2, 100), (1, 3, 64), (2, 3, 64), (2, 4, 81),
                                   (1, 4, 30)])
def test_enumerate_against_naive_oracle(m, n, B):
    got = {plucker(P.lattice.columns)[0]: P.covol_sq
           for P in enumerate_points(m, n, B)}
    assert got == naive_points(m, n, B)


def test_orthogonal_point_involution():
    pts = enumerate_points(2, 4, 40)
    for P in pts:
        Q = orthogonal_point(P)
        assert Q.H_sq == P.H_sq and orthogonal_point(Q) == P


def test_phi_tilde_examples():
    I3 = linalg.identity(3)
    for m in (1, 2):
        want = Lattice(linalg.kronecker(tuple(r[:m] for r in I3), tuple(r[m:] for r in I3)))
        assert phi_tilde(I3, m).equals(want)
    g = ((3, 1), (2, 1))
    L = Lattice.from_columns([(3, 2)])
    assert phi_tilde(g, 1).equals(L.dual().tensor(L.factor()))
    g2 = linalg.matmul(g, ((1, 5), (0, 1)))
    assert phi_tilde(g2, 1).equals(phi_tilde(g, 1))
    with pytest.raises(ValueError):
        phi_tilde(((1, 2), (2, 4)), 1)


@pytest.mark.parametrize("x", [(1, 0, 0), (1, 2, 2), (3, 4), (2, 3, 6), (1, 1, 1, 1)])
def test_lemma_m1(x):
    assert lemma_m1_check(x)


def test_lemma_m1_rejects_imprimitive():
    with pytest.raises(ValueError):
        lemma_m1_check((2, 4))


@given(st.lists(st.floats(1, 50), min_size=1, max_size=6),
       st.lists(st.floats(0, 3), min_size=6, max_size=6))
def test_linear_program_inequality(xi, al):
    xi = sorted(xi)
    al = sorted(al[:len(xi)], reverse=True)
    r = len(xi)
    lhs = math.fsum(a * math.log(x) for a, x in zip(al, xi))
    rhs = math.fsum(al) / r * math.fsum(math.log(x) for x in xi)
    assert lhs <= rhs + 1e-9
