"""Counting experiments, equidistribution tables and the invariant suite."""

import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import linalg
from .grassmann import (
    HEIGHT_ONE,
    ell_at_least,
    ell_at_most,
    enumerate_points,
    freeness,
    max_slope_at_most,
    normalized_tangent_stats,
    orthogonal_point,
    tangent,
)
from .lattice import Lattice
from .slopes import GramSlopes, ball_volume, log_rat, minkowski_sq_upper, slopes_from_table
from .reduction import successive_minima_gram


# ------------------------------------------------------------------ constants

def zeta(s, precision=1e-9):
    """Riemann zeta for real ``s > 1``: a direct partial sum plus the
    Euler-Maclaurin tail, with the cut-off chosen so the first omitted tail
    term is below ``precision``."""
    if s <= 1:
        raise ValueError("zeta needs s > 1")
    K = 10
    while s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * K ** (-s - 5) / 30240 > precision / 10:
        K *= 2
    head = math.fsum(k ** -s for k in range(1, K))
    tail = (K ** (1 - s) / (s - 1) + K ** -s / 2 + s * K ** (-s - 1) / 12
            - s * (s + 1) * (s + 2) * K ** (-s - 3) / 720)
    return head + tail


def constant_cmn(m, n, precision=1e-9):
    """Leading constant of the point count ``N(B) ~ c_{m,n} B`` on Gr(m, n)."""
    if not 1 <= m <= n - 1:
        raise ValueError(f"need 1 <= m <= n-1, got m={m}, n={n}")
    c = math.comb(n, m) / n
    for i in range(m):
        c *= ball_volume(n - i) / ball_volume(i + 1)
    for k in range(2, m + 1):
        c *= zeta(k, precision / 100)
    for k in range(n - m + 1, n + 1):
        c /= zeta(k, precision / 100)
    return c


# ------------------------------------------------------------------- counting

@dataclass
class CountReport:
    m: int
    n: int
    B: Fraction
    N_B: int
    c_mn: float
    ratio: float
    epsilon: Fraction = None
    E_eps: int = None
    E_eps_closed: int = None
    free: int = None
    N_mu: int = None
    c_prime_estimate: float = None

    def to_dict(self):
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, Fraction):
                d[k] = str(v)
        return {k: v for k, v in d.items() if v is not None}


def _points(m, n, B, points):
    if points is None:
        return enumerate_points(m, n, B)
    B2 = Fraction(B) ** 2
    return [P for P in points if P.H_sq <= B2]


def count_points(m, n, B, points=None):
    pts = _points(m, n, B, points)
    c = constant_cmn(m, n)
    return CountReport(m, n, Fraction(B), len(pts), c, len(pts) / (c * float(B)))


def count_free(m, n, B, eps, points=None):
    """``E_eps`` counts points with ``ell < eps``; ``E_eps_closed`` those
    with ``ell <= eps``.  Height-one points count as free."""
    eps = Fraction(eps)
    if not 0 <= eps < 1:
        raise ValueError("epsilon must lie in [0, 1)")
    rep = count_points(m, n, B, points)
    pts = _points(m, n, B, points)
    free = sum(1 for P in pts if ell_at_least(P, eps))
    rep.epsilon = eps
    rep.free = free
    rep.E_eps = len(pts) - free
    rep.E_eps_closed = sum(1 for P in pts if ell_at_most(P, eps))
    return rep


def exp_slope(P):
    return math.exp(-P.rank_T * normalized_tangent_stats(P)[0])


def count_by_max_slope(m, n, B, points=None):
    """Points with ``mu_max(T) <= log B``.  Such points have height at most
    ``B^r`` (``r = m(n-m)``), so the enumeration runs to that height.
    ``c_prime_estimate`` is ``c_{m,n}`` times the mean of
    ``exp(-r mu_max_u)`` over the enumerated sample."""
    B = Fraction(B)
    if B <= 1:
        raise ValueError("B must exceed 1")
    r = m * (n - m)
    pts = _points(m, n, B ** r, points)
    c = constant_cmn(m, n)
    N_mu = sum(1 for P in pts if max_slope_at_most(P, B))
    mean = math.fsum(exp_slope(P) for P in pts) / len(pts)
    return CountReport(m, n, B, len(pts), c, N_mu / float(B) ** r,
                       N_mu=N_mu, c_prime_estimate=c * mean)


# ------------------------------------------------------------ equidistribution

@dataclass
class EquiRow:
    level: int
    B: Fraction
    sample_size: int
    mean: float
    statistic: str


def _statistic(name, m, n):
    """Map a statistic id to ``(ids, f)`` with ``f(P)`` a list of floats."""
    if name == "exp-slope":
        return [name], lambda P: [exp_slope(P)]
    if name == "mu-max-u":
        return [name], lambda P: [normalized_tangent_stats(P)[0]]
    if name == "one":
        return [name], lambda P: [1.0]
    if name == "minima":
        r = m * (n - m)
        return ([f"minima[{i}]" for i in range(1, r + 1)],
                lambda P: normalized_tangent_stats(P, minima=True)[1])
    if name.startswith("indicator:"):
        t = float(name.split(":", 1)[1])
        return [name], lambda P: [1.0 if normalized_tangent_stats(P)[0] <= t else 0.0]
    raise ValueError(f"unknown statistic {name!r}")


def equi_table(m, n, B, levels, statistic, points=None):
    """Empirical means of ``statistic`` over points with ``H <= B_i`` where
    ``B_i = B / 2^(levels - i)``, ``i = 1..levels``."""
    if levels < 1:
        raise ValueError("levels must be positive")
    B = Fraction(B)
    pts = _points(m, n, B, points)
    ids, f = _statistic(statistic, m, n)
    vals = [(P.H_sq, f(P)) for P in pts]
    rows = []
    for i in range(1, levels + 1):
        Bi = B / 2 ** (levels - i)
        sample = [v for h, v in vals if h <= Bi * Bi]
        for j, sid in enumerate(ids):
            xs = sorted(v[j] for v in sample)
            mean = math.fsum(xs) / len(xs) if xs else float("nan")
            rows.append(EquiRow(i, Bi, len(sample), mean, sid))
    return rows


# ------------------------------------------------------------ minima boxes

def count_minima_ranges(r, n, ranges_sq, R, points=None):
    """Primitive rank-``r`` lattices in ``Z^n`` with ``covol <= R`` and
    ``lo_i <= s_i^2 < hi_i`` for the given squared half-open ranges."""
    R = Fraction(R)
    if len(ranges_sq) != r:
        raise ValueError(f"need {r} ranges")
    pts = points if points is not None else enumerate_points(r, n, R ** n)
    count = 0
    for P in pts:
        if P.covol_sq > R * R:
            continue
        s, _ = successive_minima_gram(linalg.gram(P.basis))
        if all(lo <= x < hi for x, (lo, hi) in zip(s, ranges_sq)):
            count += 1
    return count


def probe_minima_boxes(r, n, s_box, R, points=None):
    """Count for the dyadic box ``s_i in [a_i, 2 a_i)`` with ``s_box = (a_i)``."""
    a = [Fraction(x) for x in s_box]
    if any(x > y for x, y in zip(a, a[1:])):
        raise ValueError("box lower endpoints must be nondecreasing")
    return count_minima_ranges(r, n, [(x * x, 4 * x * x) for x in a], R, points)


# ------------------------------------------------------------ invariant suite

TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    failures: int = 0
    counterexample: object = None

    @property
    def passed(self):
        return self.failures == 0

    def record(self, ok, example=None):
        self.checked += 1
        if not ok:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = example


@dataclass
class VerifyReport:
    m: int
    n: int
    B: Fraction
    checks: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(c.passed for c in self.checks.values())

    def check(self, name):
        if name not in self.checks:
            self.checks[name] = CheckResult(name)
        return self.checks[name]

    def to_dict(self):
        return {"m": self.m, "n": self.n, "B": str(self.B), "ok": self.ok,
                "checks": [{"name": c.name, "passed": c.passed, "checked": c.checked,
                            "failures": c.failures, "counterexample": c.counterexample}
                           for c in self.checks.values()]}


IDENTITY_CHECKS = ("detT", "tangent-dual", "factor", "double-dual", "double-orthogonal",
                   "duality-count", "slope-height", "freeness-bounds")
INEQUALITY_CHECKS = ("minkowski", "banaszczyk", "slope-duality", "borek", "chen-tensor",
                     "scaling", "lin-prog")


def _show(M):
    return [[str(x) for x in row] for row in M]


def _slopes(G):
    gs = GramSlopes(G)
    c = gs.table()
    mu, mmax, _, mmin, _ = slopes_from_table(c, gs.covol_sq)
    return mu, mmax, mmin, c


def _lattice_inequalities(rep, L, dual, label):
    """Minkowski, Banaszczyk, slope duality and Borek on one lattice."""
    r = L.rank
    s, _ = successive_minima_gram(L.gram)
    prod = 1
    for x in s:
        prod *= x
    ex = {"lattice": label, "basis": _show(L.basis)}
    g = minkowski_sq_upper(r)
    rep.check("minkowski").record(
        L.covol_sq <= prod and float(prod) <= float(g * L.covol_sq) * (1 + TOL), ex)
    D = dual(L)
    sd, _ = successive_minima_gram(D.gram)
    ok = all(1 <= s[k] * sd[r - 1 - k] <= r * r for k in range(r))
    rep.check("banaszczyk").record(ok, dict(ex, s_sq=[str(x) for x in s],
                                            dual_s_sq=[str(x) for x in sd]))
    _, mmax, mmin, _ = _slopes(L.gram)
    _, dmax, _, _ = _slopes(D.gram)
    rep.check("slope-duality").record(abs(dmax + mmin) < TOL,
                                      dict(ex, mu_min=mmin, mu_max_dual=dmax))
    rep.check("borek").record(
        log_rat(s[-1]) / 2 + mmin >= -TOL and log_rat(s[0]) / 2 + mmax >= -TOL, ex)
    return mmax


def _random_lattice(rng, r, N=None, size=6):
    N = r if N is None else N
    while True:
        B = [[Fraction(rng.randint(-size, size), rng.randint(1, 3)) for _ in range(r)]
             for _ in range(N)]
        if linalg.rank(B) == r:
            return Lattice(B)


def verify_suite(m, n, B, dual=None, n_random=20, seed=0, checks=None, points=None):
    """Run the invariant checks over every point of Gr(m, n) with ``H <= B``
    and over ``n_random`` random lattices.  ``dual`` overrides the dual map
    (for fault injection); ``checks`` restricts which checks run."""
    dual = dual or (lambda L: L.dual())
    want = set(checks) if checks else set(IDENTITY_CHECKS + INEQUALITY_CHECKS)
    B = Fraction(B)
    rep = VerifyReport(m, n, B)
    pts = points if points is not None else enumerate_points(m, n, B)
    ineq = want & set(INEQUALITY_CHECKS[:5])

    for P in pts:
        L = P.lattice
        ex = {"point": _show(P.basis)}
        if want & {"detT", "tangent-dual", "slope-height", "double-dual"}:
            td = tangent(P)
            T = td.T
            if "detT" in want:
                rep.check("detT").record(T.covol_sq * P.covol_sq ** n == 1, ex)
            if "tangent-dual" in want:
                rep.check("tangent-dual").record(dual(T).equals(td.T_dual), ex)
            if "slope-height" in want:
                mu_T = -log_rat(T.covol_sq) / (2 * P.rank_T)
                rep.check("slope-height").record(abs(mu_T - P.h / P.rank_T) < TOL, ex)
            if "double-dual" in want:
                rep.check("double-dual").record(dual(dual(L)).equals(L)
                                                and dual(dual(T)).equals(T), ex)
        if "factor" in want:
            rep.check("factor").record(L.factor().equals(dual(L.orthogonal())), ex)
        if "double-orthogonal" in want:
            O = L.orthogonal()
            rep.check("double-orthogonal").record(
                O.orthogonal().equals(L) and O.covol_sq == L.covol_sq, ex)
        if "freeness-bounds" in want:
            ell = freeness(P).ell
            if ell == HEIGHT_ONE:
                ok = P.covol_sq == 1
            else:
                ok = 0 <= ell <= 1
                if m in (1, n - 1):
                    ok = ok and ell >= (n - 1) / n - TOL
            rep.check("freeness-bounds").record(ok, dict(ex, ell=ell))
        if ineq:
            Lp = Lattice(P.orth_basis)
            Td = L.tensor(Lp)
            _lattice_inequalities(rep, L, dual, "L")
            mmax_T = _lattice_inequalities(rep, Td, dual, "T*")
            if "chen-tensor" in want:
                a = _slopes(L.gram)[1]
                b = _slopes(Lp.gram)[1]
                ok = a + b <= mmax_T + TOL and mmax_T <= a + b + L.rank + Lp.rank + TOL
                rep.check("chen-tensor").record(ok, dict(ex, mu_max=[a, b, mmax_T]))

    if "duality-count" in want:
        other = enumerate_points(n - m, n, B)
        keys = {P.key: P.H_sq for P in other}
        mapped = {}
        for P in pts:
            Q = orthogonal_point(P)
            mapped[Q.key] = Q.H_sq
        ok = len(other) == len(pts) and mapped == keys
        rep.check("duality-count").record(ok, {"count": len(pts), "dual_count": len(other)})

    rng = random.Random(seed)
    if want & {"minkowski", "banaszczyk", "slope-duality", "borek", "scaling"}:
        for i in range(n_random):
            r = rng.randint(1, 3)
            L = _random_lattice(rng, r, r + rng.randint(0, 1))
            if ineq:
                _lattice_inequalities(rep, L, dual, f"random-{i}")
            if "scaling" in want:
                alpha = Fraction(rng.randint(1, 5), rng.randint(1, 5))
                c = GramSlopes(L.gram).table()
                cs = GramSlopes(L.scale(alpha).gram).table()
                ok = all(cs[k - 1] == alpha ** (2 * k) * c[k - 1] for k in range(1, r + 1))
                rep.check("scaling").record(ok, {"basis": _show(L.basis), "alpha": str(alpha)})
    if want & {"chen-tensor"}:
        for i in range(n_random):
            r1 = rng.randint(1, 3)
            r2 = rng.randint(1, 6 // r1)
            L1, L2 = _random_lattice(rng, r1), _random_lattice(rng, r2)
            a, b = _slopes(L1.gram)[1], _slopes(L2.gram)[1]
            c = _slopes(L1.tensor(L2).gram)[1]
            ok = a + b <= c + TOL and c <= a + b + r1 + r2 + TOL
            rep.check("chen-tensor").record(ok, {"L1": _show(L1.basis), "L2": _show(L2.basis)})
    if "lin-prog" in want:
        for _ in range(1000):
            r = rng.randint(1, 6)
            xi = sorted(1 + rng.random() * 10 for _ in range(r))
            al = sorted((rng.random() for _ in range(r)), reverse=True)
            lhs = math.fsum(a * math.log(x) for a, x in zip(al, xi))
            rhs = math.fsum(al) / r * math.fsum(math.log(x) for x in xi)
            rep.check("lin-prog").record(lhs <= rhs + TOL, {"xi": xi, "alpha": al})
    return rep
