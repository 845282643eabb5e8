"""Exact integer and rational matrices.

Matrices are plain nested sequences in row-major order (``M[i][j]`` is row
``i``, column ``j``) holding ``int`` or ``fractions.Fraction`` entries.  All
public functions return tuples of tuples so results can be hashed and shared
freely; nothing here ever rounds.

Hermite normal form convention (column style, lower triangular): for an
``n x r`` matrix ``M`` of full column rank, ``hnf(M)`` returns ``(H, U)`` with
``H = M U``, ``U`` unimodular, and ``H`` such that

* column ``j`` has its pivot (first nonzero entry, strictly positive) in row
  ``p_j`` with ``p_0 < p_1 < ...``;
* every entry of row ``p_j`` to the left of the pivot lies in
  ``[0, H[p_j][j])``.

``H`` depends only on the lattice spanned by the columns of ``M``.
"""

from fractions import Fraction
from math import gcd


class RankDeficientError(ValueError):
    pass


def xgcd(a, b):
    """Return ``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def freeze(M):
    return tuple(tuple(row) for row in M)


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(M):
    return tuple(zip(*M))


def matmul(A, B):
    Bt = tuple(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A, v):
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def shape(M):
    rows = len(M)
    cols = len(M[0]) if rows else 0
    return rows, cols


def gram(B):
    """``B^t B`` for a matrix whose columns are basis vectors."""
    cols = tuple(zip(*B))
    r = len(cols)
    G = [[0] * r for _ in range(r)]
    for i in range(r):
        ci = cols[i]
        for j in range(i, r):
            v = sum(a * b for a, b in zip(ci, cols[j]))
            G[i][j] = G[j][i] = v
    return freeze(G)


def kronecker(A, B):
    """Kronecker product; with columns as basis vectors, column ``i*rB + j``
    is ``a_i (x) b_j``."""
    return tuple(
        tuple(a * b for a in arow for b in brow)
        for arow in A
        for brow in B
    )


def lcm_denominator(entries):
    d = 1
    for x in entries:
        if isinstance(x, Fraction):
            q = x.denominator
            d = d * q // gcd(d, q)
    return d


def _bareiss(M):
    """Fraction-free determinant of a square integer matrix."""
    n = len(M)
    A = [list(row) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1] if n else 1


def det(M):
    """Exact determinant.  Rational input is cleared to an integer matrix
    first, then Bareiss elimination keeps every intermediate integral."""
    n, c = shape(M)
    if n != c:
        raise ValueError(f"det needs a square matrix, got {n}x{c}")
    if n == 0:
        return 1
    d = lcm_denominator(x for row in M for x in row)
    if d == 1:
        return _bareiss([[int(x) for x in row] for row in M])
    D = _bareiss([[int(x * d) for x in row] for row in M])
    return Fraction(D, d ** n)


def inverse(M):
    """Exact rational inverse by Gauss-Jordan elimination."""
    n, c = shape(M)
    if n != c:
        raise ValueError("inverse needs a square matrix")
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        A[k], A[p] = A[p], A[k]
        inv = 1 / A[k][k]
        A[k] = [x * inv for x in A[k]]
        for i in range(n):
            if i != k and A[i][k] != 0:
                f = A[i][k]
                rk = A[k]
                A[i] = [x - f * y for x, y in zip(A[i], rk)]
    return tuple(tuple(row[n:]) for row in A)


def rank(M):
    rows, cols = shape(M)
    A = [[Fraction(x) for x in row] for row in M]
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(r + 1, rows):
            if A[i][c] != 0:
                f = A[i][c] / A[r][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
        if r == rows:
            break
    return r


def column_echelon(M, want_inverse=False):
    """Integral column reduction to lower-triangular Hermite shape.

    Returns ``(H, U, rk)`` (plus ``Uinv`` when requested) with ``H = M U``,
    ``U`` unimodular, the first ``rk`` columns of ``H`` in Hermite form and
    the remaining columns zero.  Works for any rank.
    """
    rows, cols = shape(M)
    # operate on columns stored as lists
    A = [[int(M[i][j]) for i in range(rows)] for j in range(cols)]
    U = [[int(i == j) for i in range(cols)] for j in range(cols)]
    # inverse tracked by rows: U^{-1} undergoes the inverse row operations
    Ui = [[int(i == j) for j in range(cols)] for i in range(cols)] if want_inverse else None
    j = 0
    for i in range(rows):
        if j == cols:
            break
        for c in range(j + 1, cols):
            b = A[c][i]
            if b == 0:
                continue
            a = A[j][i]
            g, x, y = xgcd(a, b)
            p, q = -b // g, a // g
            # (col_j, col_c) <- (x col_j + y col_c, p col_j + q col_c)
            for X in (A, U):
                cj, cc = X[j], X[c]
                X[j] = [x * u + y * v for u, v in zip(cj, cc)]
                X[c] = [p * u + q * v for u, v in zip(cj, cc)]
            if Ui is not None:
                # inverse of [[x, p], [y, q]] (det 1) is [[q, -p], [-y, x]]
                rj, rc = Ui[j], Ui[c]
                Ui[j] = [q * u - p * v for u, v in zip(rj, rc)]
                Ui[c] = [-y * u + x * v for u, v in zip(rj, rc)]
        piv = A[j][i]
        if piv == 0:
            continue
        if piv < 0:
            A[j] = [-v for v in A[j]]
            U[j] = [-v for v in U[j]]
            if Ui is not None:
                Ui[j] = [-v for v in Ui[j]]
            piv = -piv
        for c in range(j):
            f = A[c][i] // piv
            if f:
                A[c] = [u - f * v for u, v in zip(A[c], A[j])]
                U[c] = [u - f * v for u, v in zip(U[c], U[j])]
                if Ui is not None:
                    Ui[j] = [v + f * u for u, v in zip(Ui[c], Ui[j])]
        j += 1
    H = tuple(tuple(A[c][i] for c in range(cols)) for i in range(rows))
    Um = tuple(tuple(U[c][i] for c in range(cols)) for i in range(cols))
    if want_inverse:
        return H, Um, j, freeze(Ui)
    return H, Um, j


def hnf(M):
    """Column-style Hermite normal form ``(H, U)`` with ``H = M U``."""
    rows, cols = shape(M)
    H, U, rk = column_echelon(M)
    if rk < cols:
        raise RankDeficientError("rank deficient")
    return H, U


def hnf_basis(M):
    """Hermite basis of the column span (tolerates rank deficiency)."""
    H, _, rk = column_echelon(M)
    return tuple(row[:rk] for row in H)


def int_kernel(M):
    """Saturated basis (columns, in Hermite form) of ``{x in Z^cols : M x = 0}``."""
    rows, cols = shape(M)
    if rows == 0:
        return identity(cols)
    _, U, rk = column_echelon(M)
    K = tuple(row[rk:] for row in U)
    if rk == cols:
        return tuple(() for _ in range(cols))
    return hnf(K)[0]


def snf(M):
    """Elementary divisors ``d_1 | d_2 | ...`` of an integer matrix (nonzero
    ones only; their count is the rank)."""
    A = [[int(x) for x in row] for row in M]
    rows, cols = shape(A)
    out = []
    t = 0
    while t < min(rows, cols):
        nz = [(abs(A[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if A[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        A[t], A[pi] = A[pi], A[t]
        for row in A:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, rows):
                if A[i][t]:
                    q = A[i][t] // p
                    A[i] = [u - q * v for u, v in zip(A[i], A[t])]
                    if A[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if A[t][j]:
                    q = A[t][j] // p
                    for row in A:
                        row[j] -= q * row[t]
                    if A[t][j]:
                        done = False
            if done:
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if A[i][j] % p), None)
                if bad is None:
                    break
                A[t] = [u + v for u, v in zip(A[t], A[bad[0]])]
                continue
            # move the smallest remaining entry of row/column t to the pivot
            nz = [(abs(A[i][t]), i, t) for i in range(t, rows) if A[i][t]]
            nz += [(abs(A[t][j]), t, j) for j in range(t, cols) if A[t][j]]
            _, pi, pj = min(nz)
            A[t], A[pi] = A[pi], A[t]
            for row in A:
                row[t], row[pj] = row[pj], row[t]
        out.append(abs(A[t][t]))
        t += 1
    return out


def complete_to_unimodular(C):
    """Given an ``r x j`` integer matrix whose columns span a primitive
    sublattice of ``Z^r``, return ``D`` (``r x (r-j)``) with ``[C | D]``
    unimodular."""
    r, j = len(C), len(C[0]) if C and C[0] else 0
    if j == 0:
        return identity(r)
    Ct = transpose(C)
    H, _, rk, Ui = column_echelon(Ct, want_inverse=True)
    if rk < j or any(H[i][i] != 1 for i in range(j)):
        raise ValueError("columns do not span a primitive sublattice")
    # C^t U = [L | 0] with L unit lower triangular, so C^t = L (U^{-1})_top
    # and [C | D] = (U^{-1})^t with C replaced by its own columns.
    Vt = transpose(Ui)
    return tuple(row[j:] for row in Vt)


def is_unimodular(M):
    n, c = shape(M)
    return n == c and abs(det(M)) == 1
