"""Lattices with exact rational bases.

A ``Lattice`` is stored as an ``N x r`` basis matrix whose columns are the
basis vectors; the inner product is the standard one on ``Q^N``.  Equality of
the underlying point sets is decided by :meth:`Lattice.canonical_form`
(``==`` on the dataclass compares bases, not point sets).

Text format (one lattice per file)::

    N r
    <N rationals>      # basis vector 1
    ...
    <N rationals>      # basis vector r
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

from . import linalg
from .reduction import saturate_columns


class LatticeError(ValueError):
    pass


class CanonicalForm(NamedTuple):
    denominator: int
    hnf: tuple


def _clean(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


@dataclass(frozen=True)
class Lattice:
    basis: tuple

    def __post_init__(self):
        B = tuple(tuple(_clean(x) for x in row) for row in self.basis)
        if not B or not B[0]:
            raise LatticeError("a lattice needs at least one basis vector")
        if len({len(row) for row in B}) != 1:
            raise LatticeError("ragged basis matrix")
        object.__setattr__(self, "basis", B)
        if linalg.det(self.gram) == 0:
            raise LatticeError("basis vectors are linearly dependent")

    @classmethod
    def from_columns(cls, cols):
        return cls(linalg.transpose(cols))

    @property
    def dim(self):
        return len(self.basis)

    @property
    def rank(self):
        return len(self.basis[0])

    @property
    def columns(self):
        return linalg.transpose(self.basis)

    @cached_property
    def gram(self):
        return linalg.gram(self.basis)

    @cached_property
    def covol_sq(self):
        return Fraction(linalg.det(self.gram))

    @property
    def is_integral(self):
        return all(isinstance(x, int) for row in self.basis for x in row)

    def vector(self, coeffs):
        """Ambient vector with the given integer coordinates."""
        return linalg.matvec(self.basis, coeffs)

    def sublattice(self, C):
        """Sublattice spanned by the columns of the ``r x k`` coefficient matrix ``C``."""
        return Lattice(linalg.matmul(self.basis, C))

    def scale(self, alpha):
        alpha = Fraction(alpha)
        return Lattice(tuple(tuple(alpha * x for x in row) for row in self.basis))

    def coordinates(self, M):
        """Rational coefficients ``C`` with ``basis @ C == M`` for an ambient
        matrix ``M`` (columns are vectors); raise if ``M`` leaves the span."""
        Bt = linalg.transpose(self.basis)
        C = linalg.matmul(linalg.inverse(self.gram), linalg.matmul(Bt, M))
        if linalg.matmul(self.basis, C) != linalg.freeze(
                tuple(tuple(Fraction(x) for x in row) for row in M)):
            raise LatticeError("vectors do not lie in the span of the lattice")
        return C

    def dual(self):
        return Lattice(linalg.matmul(self.basis, linalg.inverse(self.gram)))

    def _require_primitive_integral(self):
        if not self.is_integral or not self.is_primitive():
            raise LatticeError("requires primitive integral lattice")

    def orthogonal(self):
        self._require_primitive_integral()
        K = linalg.int_kernel(linalg.transpose(self.basis))
        if not K[0]:
            raise LatticeError("full-rank lattice has no orthogonal lattice")
        return Lattice(K)

    def factor(self):
        """Orthogonal projection of ``Z^N`` off the span of the lattice."""
        self._require_primitive_integral()
        if self.rank == self.dim:
            raise LatticeError("full-rank lattice has no factor lattice")
        B = self.basis
        Pr = linalg.matmul(linalg.matmul(B, linalg.inverse(self.gram)), linalg.transpose(B))
        N = self.dim
        gens = tuple(tuple(int(i == j) - Pr[i][j] for j in range(N)) for i in range(N))
        d = linalg.lcm_denominator(x for row in gens for x in row)
        H = linalg.hnf_basis(tuple(tuple(int(x * d) for x in row) for row in gens))
        return Lattice(tuple(tuple(Fraction(x, d) for x in row) for row in H))

    def saturate(self):
        if not self.is_integral:
            raise LatticeError("saturation requires an integral lattice")
        K = linalg.int_kernel(linalg.transpose(self.basis))
        if not K[0]:
            return Lattice(linalg.identity(self.dim))
        return Lattice(linalg.int_kernel(linalg.transpose(K)))

    def is_primitive(self):
        if not self.is_integral:
            raise LatticeError("primitivity is defined for integral lattices")
        d = linalg.snf(self.basis)
        return len(d) == self.rank and all(x == 1 for x in d)

    def tensor(self, other):
        return Lattice(linalg.kronecker(self.basis, other.basis))

    @cached_property
    def _canonical(self):
        d = linalg.lcm_denominator(x for row in self.basis for x in row)
        M = tuple(tuple(int(x * d) for x in row) for row in self.basis)
        return CanonicalForm(d, linalg.hnf(M)[0])

    def canonical_form(self):
        return self._canonical

    def equals(self, other):
        return self.dim == other.dim and self._canonical == other._canonical

    def to_text(self):
        B = self.canonical_basis().columns
        lines = [f"{self.dim} {self.rank}"]
        lines += [" ".join(str(x) for x in col) for col in B]
        return "\n".join(lines) + "\n"

    def canonical_basis(self):
        d, H = self._canonical
        return Lattice(tuple(tuple(Fraction(x, d) for x in row) for row in H))

    @classmethod
    def from_text(cls, text):
        rows = [ln.split("#")[0].split() for ln in text.splitlines()]
        rows = [r for r in rows if r]
        try:
            N, r = int(rows[0][0]), int(rows[0][1])
            cols = [[Fraction(t) for t in row] for row in rows[1:]]
        except (IndexError, ValueError) as exc:
            raise LatticeError(f"malformed lattice text: {exc}") from None
        if len(cols) != r or any(len(c) != N for c in cols):
            raise LatticeError(f"expected {r} vectors of length {N}")
        return cls.from_columns(cols)


def tensor(L1, L2):
    return L1.tensor(L2)


def equals(L1, L2):
    return L1.equals(L2)


def saturate_in(M, L):
    """Smallest sublattice of ``L`` that contains ``M`` and is primitive in ``L``."""
    try:
        C = L.coordinates(M.basis)
    except LatticeError:
        raise LatticeError("not a sublattice") from None
    if any(Fraction(x).denominator != 1 for row in C for x in row):
        raise LatticeError("not a sublattice")
    S = saturate_columns(tuple(tuple(int(x) for x in row) for row in C))
    return L.sublattice(S)


def integer_lattice(n):
    return Lattice(linalg.identity(n))
