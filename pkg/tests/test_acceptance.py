"""Acceptance criteria AC1-AC11.

Each test tags itself with ``criterion`` (and a ``detail`` string); the
conftest prints one PASS/FAIL line per criterion after the run.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from grassfree import linalg
from grassfree.experiments import (
    IDENTITY_CHECKS,
    INEQUALITY_CHECKS,
    constant_cmn,
    count_by_max_slope,
    count_free,
    count_points,
    equi_table,
    verify_suite,
)
from grassfree.grassmann import (
    ell_at_most,
    enumerate_points,
    freeness,
    lemma_m1_check,
    phi_tilde,
    tangent,
    unfree_family,
)
from grassfree.lattice import Lattice
from grassfree.reduction import primitive_vector
from grassfree.slopes import min_covol_sublattice, minkowski_sq_upper
from oracles import brute_min_covol, gram, laplace_det, naive_points, plucker, short_coefficients
from test_linalg import random_unimodular

TOL = 1e-9
TIME_LIMIT = 300.0


@pytest.fixture(scope="module")
def gr24_points():
    """Gr(2,4) up to H = 8^4, shared so cached tangent tables are reused."""
    return enumerate_points(2, 4, 8 ** 4)


def tag(record_property, criterion, detail=None):
    record_property("criterion", criterion)
    if detail is not None:
        record_property("detail", detail)


# ---------------------------------------------------------------- AC1, AC2

AC1 = "AC1 exact identity suite"
AC2 = "AC2 inequality suite"
SUITE = [(1, 3, 64), (2, 3, 64), (2, 4, 256)]
IDENTITIES = [c for c in IDENTITY_CHECKS if c != "freeness-bounds"]


@pytest.mark.parametrize("m,n,B", SUITE)
def test_ac1_identities(record_property, m, n, B):
    t0 = time.perf_counter()
    rep = verify_suite(m, n, B, checks=IDENTITIES)
    dt = time.perf_counter() - t0
    failed = [c.name for c in rep.checks.values() if not c.passed]
    counts = {c.name: c.checked for c in rep.checks.values()}
    tag(record_property, AC1, f"Gr({m},{n})@{B}: {counts['detT']} points, "
        f"failed={failed}, {dt:.1f}s")
    assert set(counts) == set(IDENTITIES)
    assert counts["detT"] > 0
    assert not failed, rep.to_dict()
    assert dt < TIME_LIMIT


@pytest.mark.parametrize("m,n,B", SUITE)
def test_ac2_inequalities(record_property, m, n, B):
    rep = verify_suite(m, n, B, checks=INEQUALITY_CHECKS, n_random=20)
    failed = [c.name for c in rep.checks.values() if not c.passed]
    tag(record_property, AC2, f"Gr({m},{n})@{B}: "
        f"chen={rep.check('chen-tensor').checked} lin-prog={rep.check('lin-prog').checked} "
        f"failed={failed}")
    assert rep.check("lin-prog").checked == 1000
    assert rep.check("chen-tensor").checked > 0
    assert not failed, rep.to_dict()


# ---------------------------------------------------------------- AC3

AC3 = "AC3 leading constant reproduction"


@pytest.mark.parametrize("m,n,B,tol", [(1, 2, 10 ** 4, 0.03), (1, 3, 10 ** 4, 0.05),
                                       (2, 4, 2000, 0.10)])
def test_ac3_counts(record_property, m, n, B, tol):
    t0 = time.perf_counter()
    rep = count_points(m, n, B)
    dt = time.perf_counter() - t0
    tag(record_property, AC3, f"Gr({m},{n})@{B}: N={rep.N_B} ratio={rep.ratio:.4f} "
        f"tol={tol} {dt:.1f}s")
    if (m, n) == (1, 2):
        assert abs(rep.c_mn - 3 / math.pi) < 1e-12
    assert abs(rep.ratio - 1) <= tol
    assert dt < TIME_LIMIT


# ---------------------------------------------------------------- AC4

AC4 = "AC4 unfree family"


def _is_norm_one_elementary_tensor(v, n):
    M = [list(v[i * n:(i + 1) * n]) for i in range(n)]
    return sum(x * x for x in v) == 1 and linalg.rank(M) == 1


@pytest.mark.parametrize("n", [4, 5])
def test_ac4_unfree_family(record_property, n):
    bad = []
    for q in range(2, 51):
        P = unfree_family(2, n, q)
        rep = freeness(P)
        # the shortest vector of T* is a unit elementary tensor
        W, c1 = min_covol_sublattice(tangent(P).T_dual, 1)
        ok = (rep.ell == 0.0 and ell_at_most(P, 0) and rep.mu_min_T <= 0
              and rep.witness_covol_sq == 1 and c1 == 1
              and _is_norm_one_elementary_tensor(W.columns[0], n))
        if not ok:
            bad.append(q)
    tag(record_property, AC4, f"Gr(2,{n}) q=2..50: failures={bad}")
    assert not bad


# ---------------------------------------------------------------- AC5

AC5 = "AC5 freeness trend"
AC5_B = (250, 500, 1000, 2000)


def _ac5_fractions(points):
    out = []
    for B in AC5_B:
        rep = count_free(2, 4, B, Fraction(1, 2), points=points)
        out.append(rep.E_eps / rep.N_B)
    return out


def test_ac5_trend_nonincreasing(record_property, gr24_points):
    fr = _ac5_fractions(gr24_points)
    tag(record_property, AC5, "E/N=" + ",".join(f"{x:.4f}" for x in fr))
    assert all(b <= a for a, b in zip(fr, fr[1:]))


def test_ac5_final_value(record_property, gr24_points):
    final = _ac5_fractions(gr24_points)[-1]
    tag(record_property, AC5, f"final={final:.4f} (< 0.15 required)")
    assert final < 0.15


# ---------------------------------------------------------------- AC6

AC6 = "AC6 projective-space threshold"


@pytest.mark.parametrize("n", [3, 4])
def test_ac6_projective_threshold(record_property, n):
    pts = enumerate_points(1, n, 10 ** 4)
    worst, bad, checked = 1.0, 0, 0
    for P in pts:
        if P.covol_sq == 1:
            continue
        ell = freeness(P).ell
        checked += 1
        worst = min(worst, ell)
        if ell < (n - 1) / n - TOL:
            bad += 1
    tag(record_property, AC6, f"Gr(1,{n})@1e4: {checked} points, min ell={worst:.6f}, "
        f"bound={(n - 1) / n:.6f}, violations={bad}")
    assert checked > 0 and bad == 0


# ---------------------------------------------------------------- AC7

AC7 = "AC7 line tangent lattices"


def _primitive_up_to_sign(n, bound):
    t = math.isqrt(bound)
    for x in itertools.product(range(-t, t + 1), repeat=n):
        if any(x) and next(v for v in x if v) > 0 and sum(v * v for v in x) <= bound:
            if primitive_vector(x):
                yield x


@pytest.mark.parametrize("n,bound", [(3, 100), (4, 50)])
def test_ac7_lemma_m1(record_property, n, bound):
    xs = list(_primitive_up_to_sign(n, bound))
    bad = [x for x in xs if not lemma_m1_check(x)]
    tag(record_property, AC7, f"Z^{n}, |x|^2<={bound}: {len(xs)} vectors, failures={len(bad)}")
    assert xs and not bad, bad[:5]


# ---------------------------------------------------------------- AC8

AC8 = "AC8 tangent construction from a matrix"


def test_ac8_phi_tilde(record_property):
    rng = random.Random(8)
    bad, done = [], 0
    for trial in range(100):
        n = 3 + trial % 2
        g = random_unimodular([rng.randrange(10 ** 6) for _ in range(12)], n)
        assert abs(linalg.det(g)) == 1
        for m in range(1, n):
            L = Lattice(tuple(row[:m] for row in g))
            want = L.dual().tensor(L.factor())
            got = phi_tilde(g, m)
            U = [[int(i == j) if i >= j else rng.randint(-3, 3) for j in range(n)]
                 for i in range(n)]
            moved = phi_tilde(linalg.matmul(g, U), m)
            done += 1
            if got.canonical_form() != want.canonical_form() or not moved.equals(got):
                bad.append((g, m))
    tag(record_property, AC8, f"{done} (g, m) cases, failures={len(bad)}")
    assert not bad, bad[:3]


# ---------------------------------------------------------------- AC9

AC9 = "AC9 counting by maximal slope"


def _ac9(m, n, Bs, points):
    reps = [count_by_max_slope(m, n, B, points=points) for B in Bs]
    ratios = [r.ratio for r in reps]
    d = [b - a for a, b in zip(ratios, ratios[1:])]
    return reps, ratios, d


@pytest.fixture(scope="module")
def gr12_points():
    return enumerate_points(1, 2, 10 ** 4)


AC9_CASES = {"gr24": (2, 4, (2, 4, 8)), "gr12": (1, 2, (2500, 5000, 10000))}


def _ac9_points(case, gr24_points, gr12_points):
    return gr24_points if case == "gr24" else gr12_points


@pytest.mark.parametrize("case", ["gr24", "gr12"])
def test_ac9_stabilization(record_property, case, gr24_points, gr12_points):
    m, n, Bs = AC9_CASES[case]
    _, ratios, d = _ac9(m, n, Bs, _ac9_points(case, gr24_points, gr12_points))
    tag(record_property, AC9, f"Gr({m},{n}) B={Bs}: ratios="
        + ",".join(f"{x:.4f}" for x in ratios) + " |d|=" + ",".join(f"{abs(x):.4f}" for x in d))
    assert all(abs(b) <= abs(a) for a, b in zip(d, d[1:]))


@pytest.mark.parametrize("case", ["gr24", "gr12"])
def test_ac9_constant_strictly_inside(record_property, case, gr24_points, gr12_points):
    m, n, Bs = AC9_CASES[case]
    reps, _, _ = _ac9(m, n, Bs[-1:], _ac9_points(case, gr24_points, gr12_points))
    cp, c = reps[-1].c_prime_estimate, constant_cmn(m, n)
    tag(record_property, AC9, f"Gr({m},{n}): c'={cp:.6f} c={c:.6f}")
    assert 0 < cp < c


# ---------------------------------------------------------------- AC10

AC10 = "AC10 equidistribution stabilization"


def test_ac10_exp_slope_means(record_property, gr24_points):
    rows = equi_table(2, 4, 2000, 4, "exp-slope", points=gr24_points)
    assert [r.B for r in rows] == [250, 500, 1000, 2000]
    means = [r.mean for r in rows]
    tag(record_property, AC10, "means=" + ",".join(f"{x:.4f}" for x in means))
    assert abs(means[3] - means[2]) <= abs(means[2] - means[1])


# ---------------------------------------------------------------- AC11

AC11 = "AC11 oracle equivalence"


@pytest.mark.parametrize("m,n,B", [(1, 2, 100), (1, 3, 64), (2, 3, 64), (2, 4, 81)])
def test_ac11_enumeration_oracle(record_property, m, n, B):
    naive = naive_points(m, n, B)
    mismatches = []
    for b in sorted({1, 2, 3, 5, 10, B // 2, B}):
        got = {plucker(P.lattice.columns)[0]: P.covol_sq for P in enumerate_points(m, n, b)}
        want = {k: v for k, v in naive.items() if Fraction(v) ** n <= b * b}
        if got != want:
            mismatches.append(b)
    tag(record_property, AC11, f"Gr({m},{n}) B<={B}: {len(naive)} points, "
        f"mismatched B={mismatches}")
    assert not mismatches


def _random_int_lattice(rng):
    while True:
        r = rng.randint(1, 3)
        N = rng.randint(r, 4)
        cols = [tuple(rng.randint(-4, 4) for _ in range(N)) for _ in range(r)]
        if linalg.rank(cols) == r:
            return cols


def test_ac11_min_covol_oracle(record_property):
    rng = random.Random(11)
    bad, used, skipped, compared = [], 0, 0, 0
    while used < 200:
        cols = _random_int_lattice(rng)
        L = Lattice.from_columns(cols)
        r = L.rank
        short = short_coefficients(cols, 50)
        s1 = min((nv for nv, _ in short), default=None)
        found = [min_covol_sublattice(L, k) for k in range(1, r + 1)]
        for W, c in found:
            C = L.coordinates(W.basis)
            assert W.covol_sq == c and all(Fraction(x).denominator == 1 for row in C for x in row)
        # c is attained, so the true minimum is <= c; a minimal rank-k
        # sublattice (k <= 3) has a basis of minima witnesses of squared norm
        # <= g_k c / s1^(k-1), so the k-subset scan is complete when that is <= 50
        if s1 is None or any(minkowski_sq_upper(k) * c / Fraction(s1) ** (k - 1) > 50
                             for k, (_, c) in enumerate(found, 1)):
            skipped += 1
            continue
        used += 1
        for k, (_, c) in enumerate(found, 1):
            # full rank: any r independent vectors span a sublattice of
            # covolume >= covol(L), attained by a basis
            want = laplace_det(gram(cols)) if k == r else brute_min_covol(cols, k)[0]
            compared += 1
            if want != c:
                bad.append((cols, k, c, want))
    tag(record_property, AC11, f"200 lattices ({compared} ranks) match the brute scan, "
        f"{skipped} resampled (scan not provably complete), failures={len(bad)}")
    assert not bad, bad[:3]
