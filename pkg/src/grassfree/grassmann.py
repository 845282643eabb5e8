"""Rational points of Gr(m, n) as primitive lattices in Z^n.

A point is a primitive integral rank-``m`` lattice ``L`` in ``Z^n``; its
height is ``H = covol(L)^n`` (stored squared as the exact rational ``H_sq``).

Tangent lattice ``T = L^* (x) L^pi`` has rank ``r = m(n-m)`` and
``covol(T) = covol(L)^(-n)``.  Its dual is the integral lattice
``T^* = L (x) L^perp`` whose Gram matrix is ``kron(G_L, G_perp)``; every slope
quantity is computed from the exact minimal-covolume table ``c_k`` of that
integral Gram matrix:

* ``mu_min(T) = -mu_max(T^*) = min_k log(c_k) / (2k)``;
* ``c_k(T) = c_{r-k}(T^*) / covol_sq(T^*)`` (annihilator duality, ``c_0 = 1``).

Because ``T^*`` is integral every ``c_k`` is an integer ``>= 1``; hence
``mu_min(T) >= 0`` and the freeness ``ell = mu_min(T) / mu(T)`` is exactly 0
precisely when some ``c_k = 1``.  The test "ell >= p/q" is decided exactly as
``c_k^(r q) >= covol_sq(L)^(p n k)`` for all ``k``.
"""

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import linalg
from .config import settings
from .lattice import Lattice, LatticeError
from .reduction import (
    primitive_vector,
    saturate_columns,
    short_vectors_gram,
)
from .slopes import (
    GramSlopes,
    log_rat,
    minkowski_sq_upper,
    slopes_from_table,
    successive_minima,
    successive_minima_gram,
)

HEIGHT_ONE = "undefined-height-one"


def _as_int_matrix(M):
    out = []
    for row in M:
        r = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise LatticeError("basis must be integral")
            r.append(x.numerator)
        out.append(tuple(r))
    return tuple(out)


@dataclass(frozen=True)
class GrassmannPoint:
    """A point of Gr(m, n); ``basis`` is the ``n x m`` Hermite basis."""

    m: int
    n: int
    basis: tuple
    covol_sq: int = field(compare=False)

    @property
    def key(self):
        return self.basis

    @property
    def H_sq(self):
        return Fraction(self.covol_sq) ** self.n

    @property
    def h(self):
        """Logarithmic height ``log H = (n/2) log covol_sq``."""
        return self.n * log_rat(self.covol_sq) / 2

    @property
    def rank_T(self):
        return self.m * (self.n - self.m)

    @cached_property
    def lattice(self):
        return Lattice(self.basis)

    @cached_property
    def orth_basis(self):
        return linalg.int_kernel(linalg.transpose(self.basis))

    @cached_property
    def tangent_dual_gram(self):
        Gl = linalg.gram(self.basis)
        Go = linalg.gram(self.orth_basis)
        return linalg.kronecker(Gl, Go)

    @cached_property
    def tangent_dual_slopes(self):
        return GramSlopes(self.tangent_dual_gram)

    @cached_property
    def tangent_dual_table(self):
        """Exact ``c_k(T^*)`` for ``k = 1..r``."""
        return tuple(self.tangent_dual_slopes.table())

    @cached_property
    def tangent_table(self):
        """Exact ``c_k(T)`` for ``k = 1..r``."""
        cd = self.tangent_dual_table
        r = len(cd)
        cs = Fraction(cd[-1])
        full = [Fraction(1)] + [Fraction(c) for c in cd]
        return tuple(full[r - k] / cs for k in range(1, r + 1))

    def sort_key(self):
        return (self.H_sq, self.basis)

    def to_json(self):
        H = self.H_sq
        return json.dumps({"m": self.m, "n": self.n,
                           "basis": [list(row) for row in self.basis],
                           "H2": f"{H.numerator}/{H.denominator}"})


def _make_point(H, m, n, covol_sq=None):
    if covol_sq is None:
        covol_sq = linalg.det(linalg.gram(H))
    return GrassmannPoint(m, n, H, int(covol_sq))


def point_from_basis(M, m, n):
    """The point whose lattice is the saturation of the column span of ``M``."""
    M = _as_int_matrix(M)
    if linalg.shape(M) != (n, m):
        raise LatticeError(f"expected an {n}x{m} basis matrix, got {linalg.shape(M)}")
    if not 1 <= m <= n - 1:
        raise LatticeError(f"need 1 <= m <= n-1, got m={m}, n={n}")
    if linalg.rank(M) < m:
        raise linalg.RankDeficientError("rank deficient")
    S = saturate_columns(M)
    return _make_point(linalg.hnf(S)[0], m, n)


def point_from_json(line):
    d = json.loads(line)
    return point_from_basis(d["basis"], d["m"], d["n"])


def orthogonal_point(P):
    """The point of Gr(n-m, n) given by the orthogonal lattice; same height."""
    return _make_point(P.orth_basis, P.n - P.m, P.n)


@dataclass(frozen=True)
class TangentData:
    T: Lattice
    T_dual: Lattice
    H_sq: Fraction
    h: float


def tangent(P):
    L = P.lattice
    T = L.dual().tensor(L.factor())
    Td = L.tensor(Lattice(P.orth_basis))
    return TangentData(T, Td, P.H_sq, P.h)


@dataclass(frozen=True)
class FreenessReport:
    """``ell`` is a float in [0, 1] or the string ``HEIGHT_ONE``.

    ``witness`` is a sublattice of ``T^* = L (x) L^perp`` of maximal slope
    (so its slope is ``-mu_min_T``), ``witness_covol_sq`` its exact squared
    covolume.
    """

    ell: object
    mu_min_T: float
    mu_T: float
    witness: Lattice
    witness_covol_sq: Fraction
    min_covol_sq_dual: tuple


def freeness(P):
    cd = P.tangent_dual_table
    r = len(cd)
    mu_star, mmax_star, am, _, _ = slopes_from_table(cd, cd[-1])
    mu_min_T = -mmax_star + 0.0
    mu_T = P.n * log_rat(P.covol_sq) / (2 * r)
    if P.covol_sq == 1:
        ell = HEIGHT_ONE
    elif min(cd) == 1:
        ell = 0.0
    elif am == r:
        ell = 1.0  # T^* and hence T semistable
    else:
        ell = min(max(mu_min_T, 0.0) / mu_T, 1.0)
    C = P.tangent_dual_slopes.min_covol(am)[1]
    Td = Lattice(linalg.kronecker(P.basis, P.orth_basis))
    return FreenessReport(ell, mu_min_T, mu_T, Td.sublattice(C), Fraction(cd[am - 1]), cd)


def ell_at_least(P, eps):
    """Exact test of ``ell(P) >= eps``; height-one points count as free."""
    eps = Fraction(eps)
    if P.covol_sq == 1 or eps <= 0:
        return True
    r, p, q = P.rank_T, eps.numerator, eps.denominator
    return all(c ** (r * q) >= P.covol_sq ** (p * P.n * k)
               for k, c in enumerate(P.tangent_dual_table, 1))


def ell_at_most(P, eps):
    """Exact test of ``ell(P) <= eps``; false for height-one points."""
    eps = Fraction(eps)
    if P.covol_sq == 1:
        return False
    r, p, q = P.rank_T, eps.numerator, eps.denominator
    return any(c ** (r * q) <= P.covol_sq ** (p * P.n * k)
               for k, c in enumerate(P.tangent_dual_table, 1))


def tangent_slopes(P):
    """``(mu(T), mu_max(T), argmax rank)`` from the exact tangent table."""
    cT = P.tangent_table
    mu_T, mmax, am, _, _ = slopes_from_table(cT, cT[-1])
    return mu_T, mmax, am


def max_slope_at_most(P, B):
    """Exact test of ``mu_max(T) <= log B``: ``c_k(T) B^(2k) >= 1`` for all k."""
    B = Fraction(B)
    return all(c * B ** (2 * k) >= 1 for k, c in enumerate(P.tangent_table, 1))


def normalized_tangent_stats(P, minima=False):
    """``(mu_max_u, log_minima_u)`` for the covolume-one rescaling u(T).

    ``mu_max_u = mu_max(T) - mu(T)`` (exactly 0 for semistable ``T``) and
    ``log_minima_u[i] = log s_i(T) - log(covol(T)) / r``.  The minima are
    only computed when asked for.
    """
    mu_T, mmax, am = tangent_slopes(P)
    r = P.rank_T
    mmu = 0.0 if am == r else mmax - mu_T
    logs = None
    if minima:
        GT = linalg.inverse(P.tangent_dual_gram)
        s, _ = successive_minima_gram(GT)
        lc = -log_rat(P.tangent_dual_table[-1])
        logs = [log_rat(x) / 2 - lc / (2 * r) for x in s]
    return mmu, logs


# ---------------------------------------------------------------- enumeration

def root_bound(B, n):
    """A small rational ``R2`` with ``R2^n >= B^2`` and ``R2`` close to ``B^(2/n)``."""
    B = Fraction(B)
    x = Fraction(float(B) ** (2 / n) * (1 + 1e-12)).limit_denominator(10**9)
    while x ** n < B * B:
        x *= Fraction(1000001, 1000000)
    return x


def _sqrt_upper(x):
    y = Fraction(math.sqrt(float(x)) * (1 + 1e-12)).limit_denominator(10**9)
    while y * y < x:
        y *= Fraction(1000001, 1000000)
    return y


def _completions(Mp, t, n, bound):
    """Rank-``(t+1)`` primitive lattices containing the primitive ``Mp`` as a
    primitive sublattice, of squared covolume ``<= bound``, as
    ``(covol_sq, C)`` pairs."""
    D = linalg.complete_to_unimodular(Mp)
    P = tuple(Mp[i] + D[i] for i in range(n))
    Gp = linalg.gram(P)
    GCC = tuple(row[:t] for row in Gp[:t])
    GCD = tuple(row[t:] for row in Gp[:t])
    GDD = tuple(row[t:] for row in Gp[t:])
    dM = Fraction(linalg.det(GCC))
    corr = linalg.matmul(linalg.transpose(GCD), linalg.matmul(linalg.inverse(GCC), GCD))
    S = tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(GDD, corr))
    out = []
    for lam, y in short_vectors_gram(S, bound / dM):
        if not primitive_vector(y):
            continue
        w = linalg.matvec(D, y)
        out.append((dM * lam, tuple(Mp[i] + (w[i],) for i in range(n))))
    return out


def _enum_chunk(args):
    m, n, R2, B2, V, firsts = args
    found = {}
    if m == 1:
        for idx in firsts:
            nx, x = V[idx]
            if primitive_vector(x) and Fraction(nx) ** n <= B2:
                found[linalg.hnf(tuple((v,) for v in x))[0]] = nx
        return found
    t = m - 1
    g = minkowski_sq_upper(m) * R2
    seen = set()

    def process(chosen):
        if t == 1:
            Mp = tuple((v,) for v in chosen[0])
        else:
            Mp = saturate_columns(linalg.transpose(chosen))
            key = linalg.hnf(Mp)[0]
            if key in seen:
                return
            seen.add(key)
        for c, C in _completions(Mp, t, n, R2):
            if c ** n <= B2:
                key = linalg.hnf(C)[0]
                if key not in found:
                    found[key] = c

    def extend(chosen, prod, start, stop):
        j = len(chosen)
        if j == t:
            process(chosen)
            return
        for idx in range(start, stop):
            nx, x = V[idx]
            if prod * nx ** (m - j) > g:
                break
            if j and linalg.rank(chosen + [x]) < j + 1:
                continue
            extend(chosen + [x], prod * nx, idx + 1, len(V))

    for idx in firsts:
        nx, x = V[idx]
        if nx ** m > g:
            break
        if primitive_vector(x):
            extend([x], Fraction(nx), idx + 1, len(V))
    return found


def enumerate_points(m, n, B, workers=None, budget=None):
    """All points of Gr(m, n) with ``H <= B``, sorted by ``(H_sq, basis)``.

    Every primitive ``L`` with ``covol(L)^2 <= R2`` has successive-minima
    witnesses with ``prod |v_i|^2 <= g_m R2`` (Minkowski, ``g_m =
    (2^m/V(m))^2``) and ``|v_i| >= 1``.  The first ``m-1`` witnesses are
    found among short integer vectors; ``L`` contains the saturation ``M'``
    of their span as a primitive sublattice, so ``L`` is recovered from a
    primitive vector of the projection of ``Z^n`` orthogonally to ``M'``
    with squared length ``<= R2 / covol(M')^2``.
    """
    if not 1 <= m <= n - 1:
        raise ValueError(f"need 1 <= m <= n-1, got m={m}, n={n}")
    B = Fraction(B)
    if B < 1:
        raise ValueError("height bound must be at least 1")
    workers = settings.workers if workers is None else workers
    R2 = root_bound(B, n)
    B2 = B * B
    if m == 1:
        vmax = R2
    else:
        vmax = _sqrt_upper(minkowski_sq_upper(m) * R2)
    V = short_vectors_gram(linalg.identity(n), vmax, budget=budget)
    idxs = list(range(len(V)))
    if workers <= 1:
        found = _enum_chunk((m, n, R2, B2, V, idxs))
    else:
        chunks = [idxs[i::workers] for i in range(workers)]
        found = {}
        with ProcessPoolExecutor(max_workers=workers) as ex:
            for part in ex.map(_enum_chunk, [(m, n, R2, B2, V, c) for c in chunks]):
                found.update(part)
    pts = [_make_point(H, m, n, c) for H, c in found.items()]
    pts.sort(key=GrassmannPoint.sort_key)
    return pts


# ------------------------------------------------------- explicit constructions

def unfree_family(m, n, q):
    """``Z(q,1,0,...,0) + Z e_3 + ... + Z e_{m+1}``; not free for ``q >= 2``."""
    if not 1 < m < n - 1:
        raise ValueError(f"unfree family needs 1 < m < n-1, got m={m}, n={n}")
    if q < 1:
        raise ValueError("q must be a positive integer")
    cols = [(q, 1) + (0,) * (n - 2)]
    for i in range(2, m + 1):
        cols.append(tuple(int(j == i) for j in range(n)))
    return point_from_basis(linalg.transpose(cols), m, n)


def unfree_through_flag(u, v, seed):
    """A point ``L`` of Gr(m, n) with ``u in L`` and ``L`` inside ``v^perp``.

    ``seed`` is a point of Gr(m-1, n-2).  With ``K`` the Hermite basis of
    ``Z^n`` intersected with ``v^perp`` and ``c`` the coordinates of ``u`` in
    ``K``, complete ``c`` to a unimodular ``[c | W]``; then
    ``L = Z u + K W seed``.
    """
    u, v = tuple(int(x) for x in u), tuple(int(x) for x in v)
    m, n = seed.m + 1, seed.n + 2
    if len(u) != n or len(v) != n:
        raise ValueError(f"u and v must have length {n}")
    if not (primitive_vector(u) and primitive_vector(v)):
        raise ValueError("u and v must be primitive")
    if sum(a * b for a, b in zip(u, v)):
        raise ValueError("u and v must be orthogonal")
    if not 1 < m < n - 1:
        raise ValueError(f"flag construction needs 1 < m < n-1, got m={m}, n={n}")
    K = linalg.int_kernel((v,))
    c = Lattice(K).coordinates(tuple((x,) for x in u))
    c = tuple((int(row[0]),) for row in c)
    W = linalg.complete_to_unimodular(c)
    S = linalg.matmul(linalg.matmul(K, W), seed.basis)
    M = tuple((u[i],) + S[i] for i in range(n))
    return point_from_basis(M, m, n)


def small_s1_check(P, eps, C=None):
    """``(lhs, rhs, holds)`` for ``s_1(L)^2 s_1(L^perp)^2 <= C^2 covol(L)^(2 eps n / r)``."""
    C = Fraction(settings.small_s1_constant if C is None else C)
    s = successive_minima_gram(linalg.gram(P.basis))[0][0]
    so = successive_minima_gram(linalg.gram(P.orth_basis))[0][0]
    lhs = s * so
    rhs = float(C * C) * math.exp(float(eps) * P.n * log_rat(P.covol_sq) / P.rank_T)
    return lhs, rhs, float(lhs) <= rhs * (1 + 1e-9)


def phi_tilde(g, m):
    """Lattice spanned by ``kron(A~, B~)``: ``A`` the first ``m`` columns of
    ``g``, ``A~ = A (A^t A)^-1``, ``B~`` the last columns projected
    orthogonally to the span of ``A``."""
    g = linalg.freeze(g)
    n = len(g)
    if linalg.det(g) == 0:
        raise LatticeError("singular matrix")
    if not 1 <= m <= n - 1:
        raise ValueError(f"need 1 <= m <= n-1, got m={m}, n={n}")
    A = tuple(row[:m] for row in g)
    Bl = tuple(row[m:] for row in g)
    AtAi = linalg.inverse(linalg.gram(A))
    At = linalg.matmul(A, AtAi)
    Pr = linalg.matmul(At, linalg.transpose(A))
    Proj = tuple(tuple(int(i == j) - Pr[i][j] for j in range(n)) for i in range(n))
    Bt = linalg.matmul(Proj, Bl)
    return Lattice(linalg.kronecker(At, Bt))


def lemma_m1_check(x):
    """Compare ``T`` for the line ``Z x`` with ``|x|^-1 (Z^n cap x^perp)^*``
    through exact isometry invariants."""
    x = tuple(int(v) for v in x)
    if not primitive_vector(x):
        raise ValueError("x must be primitive")
    n = len(x)
    P = point_from_basis(tuple((v,) for v in x), 1, n)
    T = tangent(P).T
    K = Lattice(P.orth_basis).dual()
    nx = Fraction(sum(v * v for v in x))
    if T.covol_sq != K.covol_sq / nx ** (n - 1):
        return False
    sT = successive_minima(T).s_sq
    sK = successive_minima(K).s_sq
    if any(a != b / nx for a, b in zip(sT, sK)):
        return False
    top = sT[-1]
    cT, cK = {}, {}
    for nv, _ in short_vectors_gram(T.gram, top):
        cT[nv] = cT.get(nv, 0) + 1
    for nv, _ in short_vectors_gram(K.gram, top * nx):
        cK[nv / nx] = cK.get(nv / nx, 0) + 1
    return cT == cK

