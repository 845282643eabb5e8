"""Successive minima, minimal-covolume sublattices and slopes.

Exact rationals (squared covolumes, squared minima) are the source of truth;
logarithms only appear in the derived slope values.

Minimal covolume in rank ``k``
------------------------------
Let ``M`` be a rank-``k`` sublattice of ``L`` of least covolume and let
``D^2`` be any known upper bound for ``covol(M)^2``.

(a) ``M`` is primitive in ``L``: saturating a non-primitive lattice divides
    its covolume by the index.
(b) Let ``v_1, ..., v_k`` be successive-minima witnesses of ``M``, and
    ``M' = saturation of span(v_1, ..., v_{k-1})`` in ``L``.  ``M'`` is
    primitive of rank ``k-1`` and contained in ``M``, so ``M`` is the
    preimage of a primitive vector of the projection ``pi(L)`` of ``L``
    orthogonally to ``M'``, and ``covol(M) = covol(M') * |pi(w)|``.  Hence
    ``covol(M) = covol(M') * s_1(pi(L))``: given ``M'`` the minimum is one
    shortest-vector problem in rank ``r-k+1``.
(c) ``M'`` is found among saturations of ``(k-1)``-tuples of short vectors:
    Minkowski's second theorem gives ``prod_i s_i(M)^2 <= g_k D^2`` with
    ``g_k = (2^k / V(k))^2``, and ``s_i(M) >= s_i(L)`` because ``M`` is a
    sublattice.  So for every ``j < k``::

        |v_1|^2 ... |v_j|^2 * prod_{i>j} max(|v_j|^2, s_i(L)^2) <= g_k D^2,

    which bounds every ``|v_j|`` and prunes the tuple search.  ``D^2`` starts
    at the covolume of the first ``k`` vectors of an LLL-reduced basis and
    shrinks as better candidates appear.  The lower bounds ``s_i(L)`` are
    read off short-vector lists of growing radius, stopping once the radius
    covers every admissible ``|v_j|``.

For ``k > r/2`` the search runs on the dual: primitive rank-``k`` sublattices
of ``L`` correspond to their annihilators, primitive of rank ``r-k`` in
``L^*``, with ``covol(M) = covol(L) * covol(annihilator)``.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .config import BudgetExceeded, settings
from .reduction import (
    _gram_in_basis,
    _sign_normalize,
    enumerate_gram,
    lll_gram,
    primitive_vector,
    saturate_columns,
    short_vectors_gram,
    successive_minima_gram,
)


def ball_volume(k):
    return math.pi ** (k / 2) / math.gamma(k / 2 + 1)


def minkowski_sq_upper(k):
    """Rational upper bound for ``(2^k / V(k))^2``."""
    v = (2.0 ** k / ball_volume(k)) ** 2
    return Fraction(v * (1 + 1e-12))


def log_rat(x):
    x = Fraction(x)
    return math.log(x.numerator) - math.log(x.denominator)


def _prod(xs):
    p = Fraction(1)
    for x in xs:
        p *= x
    return p


def _hnf_key(C):
    return linalg.hnf(C)[0]


class GramSlopes:
    """Per-rank minimal covolumes of the lattice with Gram matrix ``G``.

    Coefficient matrices are ``r x k`` with columns in the coordinates of
    ``G``.  Results are cached; ``dual`` is the same object for ``G^{-1}``.
    """

    def __init__(self, G, _dual=None):
        self.G = linalg.freeze(G)
        self.r = len(G)
        if self.r > settings.max_rank:
            raise BudgetExceeded(f"rank {self.r} exceeds the configured maximum {settings.max_rank}")
        self._minima = None
        self._reduced = None
        self._dual = _dual
        self._cache = {}
        self.covol_sq = Fraction(linalg.det(self.G))

    @property
    def minima(self):
        if self._minima is None:
            self._minima = successive_minima_gram(self.G)
        return self._minima

    @property
    def reduced(self):
        if self._reduced is None:
            self._reduced = lll_gram(self.G)
        return self._reduced

    def short_vectors(self, bound):
        """``(norm, x)`` pairs as in ``short_vectors_gram``, reusing the LLL basis."""
        Gr, U, mu, Bs = self.reduced
        raw = enumerate_gram(Gr, mu, Bs, bound)
        out = [(n, _sign_normalize(linalg.matvec(U, y))) for n, y in raw]
        out.sort()
        return out

    def shortest(self):
        Gr = self.reduced[0]
        return self.short_vectors(min(Gr[i][i] for i in range(self.r)))[0]

    @property
    def dual(self):
        if self._dual is None:
            self._dual = GramSlopes(linalg.inverse(self.G), _dual=self)
        return self._dual

    def min_covol(self, k):
        """``(covol_sq, C)`` for a minimal-covolume rank-``k`` sublattice."""
        if not 1 <= k <= self.r:
            raise ValueError(f"rank k={k} out of range 1..{self.r}")
        if k not in self._cache:
            c, C = self._search(k)
            self._cache[k] = (Fraction(c), C)
        return self._cache[k]

    def table(self):
        return [self.min_covol(k)[0] for k in range(1, self.r + 1)]

    def _search(self, k):
        r = self.r
        if k == r:
            return self.covol_sq, linalg.identity(r)
        if k > r - k:
            c, Cd = self.dual.min_covol(r - k)
            return self.covol_sq * c, linalg.int_kernel(linalg.transpose(Cd))
        s1, w = self.shortest()
        if k == 1:
            return s1, tuple((x,) for x in w)
        return self._tuple_search(k, s1)

    def _minima_bounds(self, k, s1, limit):
        """Lower bounds ``s`` for ``s_1(L)^2..s_k(L)^2`` and the short vectors
        up to the largest admissible ``|v_j|^2`` (``limit`` bounds the
        product of the ``k`` squared minima of the sought sublattice)."""
        s = [s1] * k
        radius = 4 * s1
        while True:
            # largest admissible |v_j|^2 over positions j <= k-1
            xmax = limit / _prod(s[i] for i in range(k) if i != k - 2)
            b = min(radius, xmax)
            V = self.short_vectors(b)
            found = []
            for n, x in V:
                if linalg.rank(found + [x]) > len(found):
                    found.append(x)
                    s[len(found) - 1] = max(s[len(found) - 1], n)
                    if len(found) == k:
                        break
            for i in range(len(found), k):
                # s_i(L) exceeds the enumerated radius
                s[i] = max(s[i], b)
            xmax = limit / _prod(s[i] for i in range(k) if i != k - 2)
            if xmax <= b:
                return s, [(n, x) for n, x in V if n <= xmax]
            if len(found) == k:
                return s, self.short_vectors(xmax)
            radius *= 4

    def _tuple_search(self, k, s1):
        G, r, t = self.G, self.r, k - 1
        Gr, U = self.reduced[:2]
        # the first k reduced vectors seed D^2
        C0 = tuple(row[:k] for row in U)
        best = [Fraction(linalg.det(tuple(row[:k] for row in Gr[:k]))), None, C0]
        g = minkowski_sq_upper(k)
        s, V = self._minima_bounds(k, s1, g * best[0])
        seen = set()

        def consider(c, C):
            if c > best[0]:
                return
            key = _hnf_key(C)
            if c == best[0]:
                if best[1] is None:
                    best[1] = _hnf_key(best[2])
                if key >= best[1]:
                    return
            best[:] = [c, key, C]

        def process(chosen):
            if t == 1:
                Mp = tuple((x,) for x in chosen[0])
            else:
                Mp = saturate_columns(linalg.transpose(chosen))
                key = _hnf_key(Mp)
                if key in seen:
                    return
                seen.add(key)
            D = linalg.complete_to_unimodular(Mp)
            P = tuple(Mp[i] + D[i] for i in range(r))
            Gp = _gram_in_basis(G, P)
            GCC = tuple(row[:t] for row in Gp[:t])
            GCD = tuple(row[t:] for row in Gp[:t])
            GDD = tuple(row[t:] for row in Gp[t:])
            dM = Fraction(linalg.det(GCC))
            corr = linalg.matmul(linalg.transpose(GCD), linalg.matmul(linalg.inverse(GCC), GCD))
            S = tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(GDD, corr))
            lam, y = GramSlopes(S).shortest()
            w = linalg.matvec(D, y)
            C = tuple(Mp[i] + (w[i],) for i in range(r))
            consider(dM * lam, C)

        def extend(chosen, norms, start):
            j = len(chosen)
            if j == t:
                process(chosen)
                return
            P = _prod(norms)
            for idx in range(start, len(V)):
                n, x = V[idx]
                tail = _prod(max(n, s[i]) for i in range(j + 1, k))
                if P * n * tail > g * best[0]:
                    break
                if n < s[j]:
                    continue
                if j == 0 and not primitive_vector(x):
                    continue
                if j and linalg.rank(chosen + [x]) < j + 1:
                    continue
                extend(chosen + [x], norms + [n], idx + 1)

        extend([], [], 0)
        return best[0], best[2]


@dataclass(frozen=True)
class MinimaProfile:
    s_sq: tuple
    witnesses: tuple


@dataclass(frozen=True)
class SlopeTable:
    """Per-rank minimal squared covolumes (index ``k-1``) with witness
    sublattices, and the derived slopes.

    ``argmax_rank`` is the largest rank attaining ``mu_max``; ``argmin_rank``
    is the rank of the sublattice whose quotient attains ``mu_min`` (the
    smallest such rank, ``0`` meaning the whole lattice).
    """

    min_covol_sq: tuple
    witnesses: tuple
    mu: float
    mu_max: float
    mu_min: float
    argmax_rank: int
    argmin_rank: int


def slopes_from_table(c, covol_sq):
    """``(mu, mu_max, argmax, mu_min, argmin)`` from exact minimal squared
    covolumes ``c[k-1]``; comparisons between ranks are exact."""
    r = len(c)
    covol_sq = Fraction(covol_sq)
    am = 1
    for k in range(2, r + 1):
        # slope_k >= slope_am  <=>  c_k^am <= c_am^k
        if c[k - 1] ** am <= c[am - 1] ** k:
            am = k
    quot = [covol_sq] + [covol_sq / c[k - 1] for k in range(1, r)]
    an = 0
    for k in range(1, r):
        # quotient slope_k < slope_an  <=>  q_k^(r-an) > q_an^(r-k)
        if quot[k] ** (r - an) > quot[an] ** (r - k):
            an = k
    # "+ 0.0" turns a negative zero into zero
    mu = -log_rat(covol_sq) / (2 * r) + 0.0
    mu_max = -log_rat(c[am - 1]) / (2 * am) + 0.0
    mu_min = -log_rat(quot[an]) / (2 * (r - an)) + 0.0
    return mu, mu_max, am, mu_min, an


def short_vectors(L, bound_sq, budget=None):
    """Nonzero vectors of ``L`` with squared norm ``<= bound_sq``, one per
    +/- pair, sorted by norm."""
    return [L.vector(x) for _, x in short_vectors_gram(L.gram, bound_sq, budget=budget)]


def successive_minima(L):
    s, W = successive_minima_gram(L.gram)
    return MinimaProfile(tuple(Fraction(x) for x in s), tuple(L.vector(w) for w in W))


def min_covol_sublattice(L, k):
    if not 1 <= k <= L.rank:
        raise ValueError(f"rank k={k} out of range 1..{L.rank}")
    c, C = GramSlopes(L.gram).min_covol(k)
    return L.sublattice(C), c


def slope_table(L):
    gs = GramSlopes(L.gram)
    pairs = [gs.min_covol(k) for k in range(1, L.rank + 1)]
    c = [p[0] for p in pairs]
    mu, mmax, am, mmin, an = slopes_from_table(c, L.covol_sq)
    return SlopeTable(tuple(c), tuple(L.sublattice(p[1]) for p in pairs), mu, mmax, mmin, am, an)


def mu(L):
    return -log_rat(L.covol_sq) / (2 * L.rank)


def mu_max(L):
    return slope_table(L).mu_max


def mu_min(L):
    return slope_table(L).mu_min


def mu_min_by_duality(L):
    """``-mu_max`` of the dual lattice, computed on the dual's own Gram matrix."""
    return -slope_table(L.dual()).mu_max
