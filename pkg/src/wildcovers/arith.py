"""Exact arithmetic in F_p and its extensions F_q = F_p[z]/(f).

Elements are immutable.  Every F_p-linear map that the series code needs
(Frobenius, its inverse, multiplication by a fixed element) is also
available as an integer matrix acting on coefficient rows, so that whole
arrays of coefficients can be transformed at once with numpy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import _poly
from .errors import DomainError, UsageError

MAX_PRIME = 97

# Conway polynomials, low-to-high.
DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (5, 4): (2, 4, 4, 0, 1),
    (7, 2): (3, 6, 1),
    (7, 3): (4, 0, 6, 1),
    (7, 4): (3, 4, 5, 0, 1),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def _solve_mod_p(A: np.ndarray, b: np.ndarray, p: int):
    """Solve A x = b over F_p; returns one solution or None."""
    rows, cols = A.shape
    aug = np.concatenate([A % p, (b % p).reshape(-1, 1)], axis=1).astype(np.int64)
    pivots = []
    r = 0
    for c in range(cols):
        nz = [i for i in range(r, rows) if aug[i, c]]
        if not nz:
            continue
        aug[[r, nz[0]]] = aug[[nz[0], r]]
        aug[r] = aug[r] * pow(int(aug[r, c]), -1, p) % p
        for i in range(rows):
            if i != r and aug[i, c]:
                aug[i] = (aug[i] - aug[i, c] * aug[r]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if any(aug[i, -1] for i in range(r, rows)):
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = aug[i, -1]
    return x


@dataclass(frozen=True)
class FieldDescriptor:
    """The finite field F_p[z]/(modulus); ``e = 1`` means the prime field."""

    p: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        p = self.p
        if not isinstance(p, int) or not is_prime(p) or p > MAX_PRIME:
            raise UsageError(f"characteristic must be a prime <= {MAX_PRIME}, got {p!r}")
        mod = tuple(int(c) % p for c in self.modulus)
        object.__setattr__(self, "modulus", mod)
        if len(mod) < 2 or mod[-1] != 1:
            raise UsageError(f"modulus {mod} is not monic of degree >= 1")
        if len(mod) == 2 and mod != (0, 1):
            raise UsageError("prime fields use the canonical modulus z")
        if not _poly.is_irreducible(mod, p):
            raise UsageError(f"modulus {mod} is reducible over F_{p}")

    @property
    def e(self) -> int:
        return len(self.modulus) - 1

    @property
    def q(self) -> int:
        return self.p**self.e

    def __repr__(self):
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.e}, modulus={list(self.modulus)})"

    # -- elements --------------------------------------------------------
    def __call__(self, value) -> FqElement:
        return self.element(value)

    def element(self, value) -> FqElement:
        if isinstance(value, FqElement):
            if value.field != self:
                raise UsageError("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            coeffs = [int(value) % self.p] + [0] * (self.e - 1)
        else:
            coeffs = [int(c) % self.p for c in value]
            if len(coeffs) > self.e:
                coeffs = list(_poly.mod(coeffs, self.modulus, self.p))
            coeffs += [0] * (self.e - len(coeffs))
        return FqElement(self, tuple(coeffs))

    @property
    def zero(self) -> FqElement:
        return FqElement(self, (0,) * self.e)

    @property
    def one(self) -> FqElement:
        return self.element(1)

    @property
    def gen(self) -> FqElement:
        """The class of z (equal to 0 in a prime field)."""
        return self.element((0, 1))

    def elements(self):
        """All q elements, in lexicographic order of coefficient tuples."""
        for coeffs in itertools.product(range(self.p), repeat=self.e):
            yield FqElement(self, coeffs)

    def prime_subfield(self):
        return [self.element(k) for k in range(self.p)]

    def from_row(self, row) -> FqElement:
        return FqElement(self, tuple(int(c) for c in row))

    # -- linear-algebra views -------------------------------------------
    @cached_property
    def reduction_matrix(self) -> np.ndarray:
        """Row k holds z^k mod f, for k < 2e - 1."""
        rows = []
        for k in range(2 * self.e - 1):
            mono = (0,) * k + (1,)
            r = _poly.mod(mono, self.modulus, self.p)
            rows.append(list(r) + [0] * (self.e - len(r)))
        return np.array(rows, dtype=np.int64)

    def mul_matrix(self, a: FqElement) -> np.ndarray:
        """Matrix of x -> a x acting on coefficient rows."""
        return np.array([(self.gen**i * a).coeffs for i in range(self.e)], dtype=np.int64)

    @cached_property
    def frob_matrix(self) -> np.ndarray:
        return np.array([((self.gen**i) ** self.p).coeffs for i in range(self.e)], dtype=np.int64)

    @cached_property
    def inv_frob_matrix(self) -> np.ndarray:
        m = np.eye(self.e, dtype=np.int64)
        for _ in range(self.e - 1):
            m = m @ self.frob_matrix % self.p
        return m

    def mul_rows(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Elementwise product of two stacks of elements, shape (..., e)."""
        e, p = self.e, self.p
        full = np.zeros(A.shape[:-1] + (2 * e - 1,), dtype=np.int64)
        for i in range(e):
            for j in range(e):
                full[..., i + j] += A[..., i] * B[..., j]
        return (full % p) @ self.reduction_matrix % p

    @cached_property
    def _wp_system(self) -> np.ndarray:
        # x -> x^p - x restricted to span(z, ..., z^{e-1}); its image is all of
        # wp(F_q) because the kernel is F_p = span(1).
        w = (self.frob_matrix - np.eye(self.e, dtype=np.int64)) % self.p
        return w[1:].T.copy()


@dataclass(frozen=True)
class FqElement:
    field: FieldDescriptor
    coeffs: tuple[int, ...]

    def _coerce(self, other) -> FqElement:
        if isinstance(other, FqElement):
            if other.field != self.field:
                raise UsageError(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, (int, np.integer)):
            return self.field.element(int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.field.p
        return FqElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FqElement(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.field
        p, e = F.p, F.e
        if e == 1:
            return FqElement(F, ((self.coeffs[0] * other.coeffs[0]) % p,))
        full = [0] * (2 * e - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    full[i + j] += a * b
        red = F.reduction_matrix
        out = [0] * e
        for k, c in enumerate(full):
            c %= p
            if c:
                row = red[k]
                for m in range(e):
                    out[m] += c * int(row[m])
        return FqElement(F, tuple(v % p for v in out))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> FqElement:
        if self.is_zero():
            raise DomainError("inverse of zero in " + repr(self.field))
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def in_prime_field(self) -> bool:
        return not any(self.coeffs[1:])

    def __int__(self):
        if not self.in_prime_field():
            raise UsageError(f"{self} is not in the prime field")
        return self.coeffs[0]

    def __lt__(self, other):
        return self.coeffs < other.coeffs

    def row(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    def frobenius(self) -> FqElement:
        return self ** self.field.p

    def pth_root(self) -> FqElement:
        return self ** (self.field.p ** (self.field.e - 1))

    def trace(self) -> int:
        """Absolute trace to F_p, returned as a residue."""
        total = self.field.zero
        x = self
        for _ in range(self.field.e):
            total = total + x
            x = x.frobenius()
        return int(total)

    def __repr__(self):
        if self.field.e == 1:
            return str(self.coeffs[0])
        terms = []
        for k in range(self.field.e - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms) or "0"


def GF(p: int, e: int = 1, modulus=None) -> FieldDescriptor:
    """Field descriptor for F_{p^e}; picks a default modulus when none is given."""
    if modulus is None:
        modulus = default_modulus(p, e)
    return FieldDescriptor(p, tuple(modulus))


@lru_cache(maxsize=None)
def default_modulus(p: int, e: int) -> tuple[int, ...]:
    if e < 1:
        raise UsageError(f"extension degree must be >= 1, got {e}")
    if e == 1:
        return (0, 1)
    if (p, e) in DEFAULT_MODULI:
        return DEFAULT_MODULI[(p, e)]
    return find_irreducible(p, e)


def find_irreducible(p: int, e: int) -> tuple[int, ...]:
    """First monic irreducible of degree e, scanning lower coefficients as base-p digits."""
    for k in range(1, p**e):
        low = [(k // p**i) % p for i in range(e)]
        if low[0] == 0:
            continue
        f = tuple(low) + (1,)
        if _poly.is_irreducible(f, p):
            return f
    raise UsageError(f"no irreducible polynomial of degree {e} over F_{p}")


# -- Artin-Schreier over F_q ---------------------------------------------

def frobenius_fq(a: FqElement) -> FqElement:
    return a.frobenius()


def pth_root(a: FqElement) -> FqElement:
    return a.pth_root()


def trace_to_prime(a: FqElement) -> int:
    return a.trace()


def artin_schreier_solve_fq(a: FqElement) -> FqElement | None:
    """A root of x^p - x = a in F_q, or None.

    Solutions form a coset b + F_p; the returned one has constant
    coefficient 0, which makes it the lexicographically least.
    """
    F = a.field
    if F.e == 1:
        return F.zero if a.is_zero() else None
    x = _solve_mod_p(F._wp_system, a.row(), F.p)
    if x is None:
        return None
    return FqElement(F, (0,) + tuple(int(c) for c in x))


# -- extensions ----------------------------------------------------------

@dataclass(frozen=True)
class FieldEmbedding:
    """F_p-algebra map from ``source`` into ``target`` sending z to ``image_of_gen``."""

    source: FieldDescriptor
    target: FieldDescriptor
    image_of_gen: FqElement

    @cached_property
    def matrix(self) -> np.ndarray:
        powers = [self.image_of_gen**i for i in range(self.source.e)]
        return np.array([x.coeffs for x in powers], dtype=np.int64)

    def __call__(self, a: FqElement) -> FqElement:
        if a.field != self.source:
            raise UsageError("element is not in the embedding's source field")
        return self.target.from_row(a.row() @ self.matrix % self.target.p)

    def map_rows(self, rows: np.ndarray) -> np.ndarray:
        return rows @ self.matrix % self.target.p

    def compose(self, other: FieldEmbedding) -> FieldEmbedding:
        """self after other."""
        return FieldEmbedding(other.source, self.target, self(other.image_of_gen))


def identity_embedding(F: FieldDescriptor) -> FieldEmbedding:
    return FieldEmbedding(F, F, F.gen if F.e > 1 else F.zero)


def find_roots_brute(f: tuple[int, ...], F: FieldDescriptor, first_only=False):
    """Roots in F of an F_p-polynomial, found by evaluating at every element."""
    e, p = F.e, F.p
    digits = np.array(list(itertools.product(range(p), repeat=e)), dtype=np.int64)
    acc = np.zeros_like(digits)
    for c in reversed(f):
        acc = F.mul_rows(acc, digits)
        acc[:, 0] = (acc[:, 0] + c) % p
    hits = np.flatnonzero(~acc.any(axis=1))
    if first_only:
        hits = hits[:1]
    return [F.from_row(digits[i]) for i in hits]


def extend_field(F: FieldDescriptor, k: int) -> FieldEmbedding:
    """Embedding of F into its degree-k extension, built as a prime-field extension."""
    target = GF(F.p, F.e * k)
    if F.e == 1:
        return FieldEmbedding(F, target, target.zero)
    if target.q > 2**22:
        raise UsageError(f"extension {target} too large for root search")
    roots = find_roots_brute(F.modulus, target, first_only=True)
    return FieldEmbedding(F, target, roots[0])
