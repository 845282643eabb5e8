"""Exact lattice reduction and short-vector enumeration on Gram matrices.

Everything here works in coefficient space: a lattice of rank ``r`` is given
by its ``r x r`` Gram matrix ``G`` and a lattice vector by its integer
coefficient vector ``x`` (squared norm ``x^t G x``).  Callers map
coefficients back to ambient vectors themselves.

Fincke-Pohst enumeration walks the tree with floating-point centres and radii
(on an LLL-reduced basis, with a relative slack of ``1e-9`` so no candidate is
lost to rounding) and accepts a leaf only after an exact integer evaluation of
its squared norm.  Every answer is therefore decided in exact arithmetic.
"""

from fractions import Fraction
from math import ceil, floor, gcd, sqrt

from . import linalg
from .config import BudgetExceeded, settings

DELTA = Fraction(3, 4)
_SLACK = 1e-9


def lll_gram(G, delta=DELTA, barrier=None):
    """LLL-reduce the basis with Gram matrix ``G``.

    Returns ``(Gr, U, mu, Bs)``: the reduced Gram ``Gr = U^t G U``, the
    unimodular change of basis ``U`` (columns are new basis vectors in old
    coordinates), and the Gram-Schmidt data of the reduced basis
    (``mu[i][j]`` for ``j < i`` and squared lengths ``Bs``).

    With ``barrier=j`` no swap ever crosses position ``j``, so the span of
    the first ``j`` basis vectors is preserved.
    """
    r = len(G)
    G = [[Fraction(x) for x in row] for row in G]
    U = [[int(i == j) for j in range(r)] for i in range(r)]  # rows of U^t
    mu = [[Fraction(0)] * r for _ in range(r)]
    Bs = [Fraction(0)] * r
    if r == 0:
        return (), (), mu, Bs
    Bs[0] = G[0][0]
    kmax = 0
    k = 1

    def red(k, l):
        m = mu[k][l]
        if 2 * abs(m) <= 1:
            return
        q = floor(m + Fraction(1, 2))
        # b_k -= q b_l, as a row operation then a column operation on G
        rowk, rowl = G[k], G[l]
        for t in range(r):
            rowk[t] -= q * rowl[t]
        for t in range(r):
            G[t][k] -= q * G[t][l]
        U[k] = [a - q * b for a, b in zip(U[k], U[l])]
        mu[k][l] -= q
        for i in range(l):
            mu[k][i] -= q * mu[l][i]

    def swap(k):
        G[k], G[k - 1] = G[k - 1], G[k]
        for row in G:
            row[k], row[k - 1] = row[k - 1], row[k]
        U[k], U[k - 1] = U[k - 1], U[k]
        for j in range(k - 1):
            mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
        m = mu[k][k - 1]
        Bn = Bs[k] + m * m * Bs[k - 1]
        mu[k][k - 1] = m * Bs[k - 1] / Bn
        Bs[k] = Bs[k - 1] * Bs[k] / Bn
        Bs[k - 1] = Bn
        for i in range(k + 1, kmax + 1):
            t = mu[i][k]
            mu[i][k] = mu[i][k - 1] - m * t
            mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]

    while k < r:
        if k > kmax:
            kmax = k
            for j in range(k):
                s = G[k][j]
                for i in range(j):
                    s -= mu[j][i] * mu[k][i] * Bs[i]
                mu[k][j] = s / Bs[j]
            s = G[k][k]
            for j in range(k):
                s -= mu[k][j] * mu[k][j] * Bs[j]
            Bs[k] = s
            if Bs[k] <= 0:
                raise linalg.RankDeficientError("Gram matrix is not positive definite")
        red(k, k - 1)
        if k != barrier and Bs[k] < (delta - mu[k][k - 1] ** 2) * Bs[k - 1]:
            swap(k)
            k = max(1, k - 1)
            continue
        for l in range(k - 2, -1, -1):
            red(k, l)
        k += 1
    return linalg.freeze(G), linalg.transpose(U), mu, Bs


def _int_gram(G):
    d = linalg.lcm_denominator(x for row in G for x in row)
    return [[int(x * d) for x in row] for row in G], d


def _sign_normalize(x):
    for v in x:
        if v:
            return x if v > 0 else tuple(-t for t in x)
    return x


def enumerate_gram(Gr, mu, Bs, bound, nonzero_from=0, budget=None):
    """All coefficient vectors ``x`` (one per +/- pair) with
    ``x^t Gr x <= bound`` and ``x[i] != 0`` for some ``i >= nonzero_from``.

    ``mu``/``Bs`` must be the Gram-Schmidt data of ``Gr``.  Returns a list of
    ``(norm, x)`` with exact ``norm``.
    """
    r = len(Gr)
    if budget is None:
        budget = settings.budget_vectors
    bound = Fraction(bound)
    if bound <= 0 or r == 0:
        return []
    Gi, den = _int_gram(Gr)
    lim = bound * den
    muf = [[float(v) for v in row] for row in mu]
    Bf = [float(b) for b in Bs]
    bf = float(bound) * (1 + _SLACK) + 1e-300
    x = [0] * r
    out = []

    def leaf():
        n = 0
        for i in range(r):
            xi = x[i]
            if xi:
                row = Gi[i]
                n += xi * sum(row[j] * x[j] for j in range(r) if x[j])
        if n <= lim:
            out.append((n if den == 1 else Fraction(n, den), tuple(x)))
            if len(out) > budget:
                raise BudgetExceeded(
                    f"enumeration budget exceeded ({budget} vectors, bound {bound})")

    def rec(i, partial, top_zero):
        # top_zero: every coordinate above i is zero
        c = 0.0
        for j in range(i + 1, r):
            if x[j]:
                c -= muf[j][i] * x[j]
        rem = bf - partial
        if rem < 0:
            return
        rad = sqrt(rem / Bf[i]) * (1 + _SLACK) + 1e-12
        lo = ceil(c - rad)
        hi = floor(c + rad)
        if top_zero:
            if i < nonzero_from:
                return
            lo = max(lo, 0)
        for xi in range(lo, hi + 1):
            t = Bf[i] * (xi - c) ** 2
            if partial + t > bf:
                continue
            x[i] = xi
            if i == 0:
                if not (top_zero and xi == 0):
                    leaf()
            else:
                rec(i - 1, partial + t, top_zero and xi == 0)
        x[i] = 0

    rec(r - 1, 0.0, True)
    return out


def short_vectors_gram(G, bound, budget=None):
    """Nonzero lattice vectors of squared norm ``<= bound``, one per +/- pair.

    Returns ``(norm, x)`` pairs sorted by norm then coefficients, where ``x``
    is in the coordinates of ``G`` and its first nonzero entry is positive.
    """
    r = len(G)
    if r == 0:
        return []
    Gr, U, mu, Bs = lll_gram(G)
    raw = enumerate_gram(Gr, mu, Bs, bound, budget=budget)
    out = [(n, _sign_normalize(linalg.matvec(U, y))) for n, y in raw]
    out.sort()
    return out


def shortest_vector_gram(G):
    """``(norm, x)`` of a shortest nonzero vector (smallest coefficients on ties)."""
    Gr, U, mu, Bs = lll_gram(G)
    bound = min(Gr[i][i] for i in range(len(Gr)))
    raw = enumerate_gram(Gr, mu, Bs, bound)
    n, y = min((n, _sign_normalize(linalg.matvec(U, y))) for n, y in raw)
    return n, y


def _gram_in_basis(G, P):
    return linalg.matmul(linalg.matmul(linalg.transpose(P), G), P)


def saturate_columns(C):
    """Basis (Hermite form) of ``span_Q(C) ∩ Z^r`` for integer columns ``C``."""
    r = len(C)
    K = linalg.int_kernel(linalg.transpose(C))
    if not K[0]:
        return linalg.identity(r)
    return linalg.int_kernel(linalg.transpose(K))


def successive_minima_gram(G):
    """Exact squared successive minima with witnesses.

    The ``k``-th witness is a shortest vector outside the span of the earlier
    ones (greedy extraction).  Each step enumerates, in a basis adapted to
    that span, only vectors with a nonzero component off the span, up to the
    length of the shortest reduced basis vector off the span.
    """
    r = len(G)
    norms, wits = [], []
    for k in range(r):
        if k == 0:
            P = linalg.identity(r)
        else:
            C = saturate_columns(linalg.transpose(wits))
            D = linalg.complete_to_unimodular(C)
            P = tuple(C[i] + D[i] for i in range(r))
        Gp = _gram_in_basis(G, P)
        Gr, U, mu, Bs = lll_gram(Gp, barrier=k)
        bound = min(Gr[i][i] for i in range(k, r))
        raw = enumerate_gram(Gr, mu, Bs, bound, nonzero_from=k)
        PU = linalg.matmul(P, U)
        n, w = min((n, _sign_normalize(linalg.matvec(PU, y))) for n, y in raw)
        norms.append(n)
        wits.append(w)
    return norms, wits


def primitive_vector(x):
    g = 0
    for v in x:
        g = gcd(g, v)
    return g == 1
