"""Unipotent upper-triangular groups U_n(R), the Lang map and p-conjugation.

Matrices are indexed 1-based, ``M[i, j]`` with i < j; the diagonal is
implicitly 1.  Positions are always visited by diagonal d = j - i, smallest
first, so that every correction term only involves entries that are already
settled.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass

from .arith import FieldDescriptor, FieldEmbedding, FqElement, artin_schreier_solve_fq, extend_field
from .errors import UsageError
from .series import LaurentSeries, is_p1_global, wp_solve_local

MAX_N = 6
ORBIT_LIMIT = 10**6


# -- coefficient rings ---------------------------------------------------

class FqRing:
    tag = "fq"

    def __init__(self, field: FieldDescriptor):
        self.field = field

    def __eq__(self, other):
        return type(other) is type(self) and other.field == self.field

    def __hash__(self):
        return hash((self.tag, self.field))

    def __repr__(self):
        return f"FqRing({self.field!r})"

    def zero(self):
        return self.field.zero

    def one(self):
        return self.field.one

    def coerce(self, x):
        return self.field.element(x)

    def contains(self, x) -> bool:
        return isinstance(x, FqElement) and x.field == self.field

    def agree(self, x, y) -> bool:
        return x == y

    def wp_solve(self, a):
        return artin_schreier_solve_fq(a)

    def constants(self):
        return self.field.prime_subfield()

    def random(self, rng: random.Random):
        return self.field.element([rng.randrange(self.field.p) for _ in range(self.field.e)])


class LaurentRing:
    """F_q((t)) realized by truncated series; exact series are allowed as entries."""

    tag = "laurent"

    def __init__(self, field: FieldDescriptor):
        self.field = field

    def __eq__(self, other):
        return type(other) is type(self) and other.field == self.field

    def __hash__(self):
        return hash((self.tag, self.field))

    def __repr__(self):
        return f"{type(self).__name__}({self.field!r})"

    def zero(self):
        return LaurentSeries.zero(self.field)

    def one(self):
        return LaurentSeries.one(self.field)

    def coerce(self, x):
        if isinstance(x, LaurentSeries):
            if x.field != self.field:
                raise UsageError("series over the wrong field")
            return x
        return LaurentSeries(self.field, 0, [self.field.element(x)])

    def contains(self, x) -> bool:
        return isinstance(x, LaurentSeries) and x.field == self.field

    def agree(self, x, y) -> bool:
        return x.agrees_with(y)

    def wp_solve(self, a):
        return wp_solve_local(a)

    def constants(self):
        return [LaurentSeries(self.field, 0, [c]) for c in self.field.prime_subfield()]

    def random(self, rng: random.Random, pole=4, prec=20):
        F = self.field
        terms = {k: F.element([rng.randrange(F.p) for _ in range(F.e)]) for k in range(-pole, prec + 1)}
        return LaurentSeries.from_terms(F, terms, prec)


class P1GlobalRing(LaurentRing):
    """k[1/t]: regular functions on the projective line away from t = 0."""

    tag = "p1"

    def coerce(self, x):
        x = super().coerce(x)
        if not is_p1_global(x):
            raise UsageError(f"{x!r} is not a polynomial in 1/t")
        return x

    def contains(self, x) -> bool:
        return super().contains(x) and is_p1_global(x)

    def random(self, rng: random.Random, pole=4, prec=None):
        F = self.field
        terms = {k: F.element([rng.randrange(F.p) for _ in range(F.e)]) for k in range(-pole, 1)}
        return LaurentSeries.from_terms(F, terms)


# -- matrices ------------------------------------------------------------

def positions(n: int):
    """Strictly upper positions (i, j), ordered by diagonal then row."""
    for d in range(1, n):
        for i in range(1, n - d + 1):
            yield (i, i + d)


class UnipotentMatrix:
    """Element of U_n(R): unit diagonal, entries above it in ``ring``."""

    __slots__ = ("n", "ring", "_e")

    def __init__(self, n: int, ring, entries=None):
        if not 2 <= n <= MAX_N:
            raise UsageError(f"dimension must be between 2 and {MAX_N}, got {n}")
        self.n = n
        self.ring = ring
        given = dict(entries or {})
        e = {}
        for pos in positions(n):
            e[pos] = ring.coerce(given.pop(pos)) if pos in given else ring.zero()
        if given:
            raise UsageError(f"entries outside the strict upper triangle: {sorted(given)}")
        self._e = e

    @classmethod
    def identity(cls, n, ring) -> UnipotentMatrix:
        return cls(n, ring)

    @classmethod
    def elementary(cls, n, ring, i, j, value) -> UnipotentMatrix:
        return cls(n, ring, {(i, j): value})

    def __getitem__(self, pos):
        i, j = pos
        if i == j:
            return self.ring.one()
        if i > j:
            return self.ring.zero()
        return self._e[pos]

    @property
    def entries(self) -> dict:
        return dict(self._e)

    def key(self):
        """Hashable key; only meaningful for exact rings."""
        return tuple(self._e[pos] for pos in positions(self.n))

    def map(self, fn, ring) -> UnipotentMatrix:
        return UnipotentMatrix(self.n, ring, {pos: fn(v) for pos, v in self._e.items()})

    def _check(self, other):
        if not isinstance(other, UnipotentMatrix):
            raise UsageError(f"expected a UnipotentMatrix, got {type(other).__name__}")
        if other.n != self.n or other.ring != self.ring:
            raise UsageError(f"shape/ring mismatch: U_{self.n}({self.ring}) vs U_{other.n}({other.ring})")

    def __mul__(self, other):
        return umul(self, other)

    def inverse(self):
        return uinv(self)

    def frobenius(self):
        return frobenius_entrywise(self)

    def agrees_with(self, other) -> bool:
        if other.n != self.n:
            return False
        return all(_agree(self._e[pos], other[pos]) for pos in positions(self.n))

    def is_identity(self) -> bool:
        return all(_is_zero(v) for v in self._e.values())

    def __eq__(self, other):
        if not isinstance(other, UnipotentMatrix):
            return NotImplemented
        return self.n == other.n and self.ring == other.ring and self.key() == other.key()

    def __hash__(self):
        return hash((self.n, self.key()))

    def __repr__(self):
        body = ", ".join(f"{i}{j}: {v!r}" for (i, j), v in self._e.items() if not _is_zero(v))
        return f"U{self.n}[{body}]"


def _is_zero(x) -> bool:
    return x.is_zero()


def _agree(x, y) -> bool:
    if isinstance(x, LaurentSeries) or isinstance(y, LaurentSeries):
        return (x - y).is_zero()
    return x == y


def umul(W: UnipotentMatrix, Z: UnipotentMatrix) -> UnipotentMatrix:
    """(WZ)_ij = z_ij + w_ij + sum over i < k < j of w_ik z_kj."""
    W._check(Z)
    out = {}
    for i, j in positions(W.n):
        s = W[i, j] + Z[i, j]
        for k in range(i + 1, j):
            s = s + W[i, k] * Z[k, j]
        out[i, j] = s
    return UnipotentMatrix(W.n, W.ring, out)


def uinv(W: UnipotentMatrix) -> UnipotentMatrix:
    """Back-substitution: v_ij = -w_ij - sum over i < k < j of w_ik v_kj."""
    v = {}
    for i, j in positions(W.n):
        s = -W[i, j]
        for k in range(i + 1, j):
            s = s - W[i, k] * v[k, j]
        v[i, j] = s
    return UnipotentMatrix(W.n, W.ring, v)


def frobenius_entrywise(M: UnipotentMatrix) -> UnipotentMatrix:
    return M.map(lambda x: x.frobenius(), M.ring)


def lang_map(B: UnipotentMatrix) -> UnipotentMatrix:
    """B -> B^(p) B^(-1)."""
    return umul(frobenius_entrywise(B), uinv(B))


def p_conjugate(C: UnipotentMatrix, M: UnipotentMatrix) -> UnipotentMatrix:
    """C^(p) M C^(-1)."""
    C._check(M)
    return umul(umul(frobenius_entrywise(C), M), uinv(C))


def entry_correction_check(B: UnipotentMatrix, Mp: UnipotentMatrix, d: int, trials: int = 4,
                           rng: random.Random | None = None) -> bool:
    """Check that each diagonal-d entry of B^(p) M' B^(-1) is wp(b_ij) + m'_ij + Corr,
    with Corr unaffected by re-randomizing every entry of B and M' on diagonals >= d.
    """
    n = B.n
    if not 1 <= d <= n - 1:
        raise UsageError(f"diagonal index must lie in 1..{n - 1}")
    rng = rng or random.Random(0)
    ring = B.ring

    def residuals(Bx, Mx):
        P = p_conjugate(Bx, Mx)
        out = {}
        for i in range(1, n - d + 1):
            j = i + d
            out[i, j] = P[i, j] - (Bx[i, j].frobenius() - Bx[i, j]) - Mx[i, j]
        return out

    base = residuals(B, Mp)
    for _ in range(trials):
        Bx = dict(B.entries)
        Mx = dict(Mp.entries)
        for (i, j) in positions(n):
            if j - i >= d:
                Bx[i, j] = _random_like(ring, B[i, j], rng)
                Mx[i, j] = _random_like(ring, Mp[i, j], rng)
        res = residuals(UnipotentMatrix(n, ring, Bx), UnipotentMatrix(n, ring, Mx))
        if not all(_agree(base[k], res[k]) for k in base):
            return False
    return True


def _random_like(ring, x, rng):
    if ring.tag == "laurent":
        prec = x.prec if x.prec is not None else 20
        return ring.random(rng, pole=2, prec=max(prec, 0))
    return ring.random(rng)


def _rhs(M, Mp, C, i, j):
    """wp(c_ij) must equal this for C^(p) M' = M C to hold at (i, j)."""
    s = M[i, j] - Mp[i, j]
    for k in range(i + 1, j):
        s = s + M[i, k] * C[k, j] - C[i, k].frobenius() * Mp[k, j]
    return s


def p_equiv_decide(M: UnipotentMatrix, Mp: UnipotentMatrix) -> UnipotentMatrix | None:
    """A C with C^(p) M' C^(-1) = M, or None when M and M' are not p-equivalent.

    Diagonals are solved in order; each entry is determined up to F_p, and the
    choices on one diagonal are searched exhaustively (ascending) before
    backtracking to the previous one.
    """
    M._check(Mp)
    ring = M.ring
    if ring.tag not in ("fq", "laurent", "p1"):
        raise UsageError(f"p_equiv_decide does not support ring {ring.tag!r}")
    n = M.n
    consts = ring.constants()
    C = {pos: ring.zero() for pos in positions(n)}

    class _View:
        def __getitem__(self, pos):
            i, j = pos
            if i == j:
                return ring.one()
            return C[pos]

    view = _View()

    def solve(d):
        if d == n:
            return True
        diag = [(i, i + d) for i in range(1, n - d + 1)]
        bases = []
        for i, j in diag:
            b = ring.wp_solve(_rhs(M, Mp, view, i, j))
            if b is None:
                return False
            bases.append(b)
        if d == n - 1:
            C[diag[0]] = bases[0]
            return True
        for shift in itertools.product(consts, repeat=len(diag)):
            for pos, b, c in zip(diag, bases, shift):
                C[pos] = b + c
            if solve(d + 1):
                return True
        return False

    if not solve(1):
        return None
    return UnipotentMatrix(n, ring, C)


# -- orbit classification ------------------------------------------------

@dataclass
class OrbitReport:
    n: int
    q: int
    class_count: int
    representatives: list
    class_sizes: list


def all_matrices(n: int, field: FieldDescriptor):
    ring = FqRing(field)
    pos = list(positions(n))
    elems = list(field.elements())
    for combo in itertools.product(elems, repeat=len(pos)):
        yield UnipotentMatrix(n, ring, dict(zip(pos, combo)))


def orbit_classes(n: int, field: FieldDescriptor) -> OrbitReport:
    """Partition U_n(F_q) into orbits of M -> C^(p) M C^(-1) by breadth-first closure."""
    size = field.q ** (n * (n - 1) // 2)
    if size > ORBIT_LIMIT:
        raise UsageError(f"|U_{n}(F_{field.q})| = {size} exceeds the enumeration bound {ORBIT_LIMIT}")
    ring = FqRing(field)
    basis = [field.gen**k for k in range(field.e)]
    gens = [UnipotentMatrix.elementary(n, ring, i, j, b) for (i, j) in positions(n) for b in basis]
    seen = set()
    reps, sizes = [], []
    for M in all_matrices(n, field):
        if M in seen:
            continue
        seen.add(M)
        orbit = 1
        queue = deque([M])
        while queue:
            X = queue.popleft()
            for g in gens:
                Y = p_conjugate(g, X)
                if Y not in seen:
                    seen.add(Y)
                    orbit += 1
                    queue.append(Y)
        reps.append(M)
        sizes.append(orbit)
    return OrbitReport(n, field.q, len(reps), reps, sizes)


# -- Lang sections -------------------------------------------------------

@dataclass
class LangSection:
    B: UnipotentMatrix
    s: int
    embedding: FieldEmbedding

    @property
    def field(self):
        return self.embedding.target


def lang_section(M: UnipotentMatrix) -> LangSection:
    """B over some F_{q^s} with B^(p) B^(-1) = M.

    Solves wp(b_ij) = m_ij + sum m_ik b_kj diagonal by diagonal; when a right-hand
    side has nonzero trace the field is enlarged by degree p, after which every
    entry of that diagonal is solvable.
    """
    if M.ring.tag != "fq":
        raise UsageError("lang_section works over finite fields")
    base = M.ring.field
    p = base.p
    n = M.n
    emb = FieldEmbedding(base, base, base.gen if base.e > 1 else base.zero)
    s = 1
    Mx = M
    I = UnipotentMatrix.identity(n, M.ring)
    Bx = {pos: M.ring.zero() for pos in positions(n)}
    for d in range(1, n):
        diag = [(i, i + d) for i in range(1, n - d + 1)]
        view = UnipotentMatrix(n, Mx.ring, Bx)
        rhs = [_rhs(Mx, I, view, i, j) for i, j in diag]
        if any(r.trace() for r in rhs):
            step = extend_field(Mx.ring.field, p)
            new_ring = FqRing(step.target)
            emb = step.compose(emb)
            s *= p
            Mx = Mx.map(step, new_ring)
            I = UnipotentMatrix.identity(n, new_ring)
            Bx = {pos: step(v) for pos, v in Bx.items()}
            rhs = [step(r) for r in rhs]
        for pos, r in zip(diag, rhs):
            Bx[pos] = artin_schreier_solve_fq(r)
    return LangSection(UnipotentMatrix(n, Mx.ring, Bx), s, emb)


# -- n = 2 -----------------------------------------------------------------

@dataclass
class ArtinSchreierDatum:
    """The cover x^p - x = value attached to a 2x2 unipotent matrix."""

    value: object
    split: bool

    def equation(self) -> str:
        return f"x^p - x = {self.value!r}"


def as_polynomial_n2(M: UnipotentMatrix) -> ArtinSchreierDatum:
    if M.n != 2:
        raise UsageError("as_polynomial_n2 needs n = 2")
    m = M[1, 2]
    return ArtinSchreierDatum(m, M.ring.wp_solve(m) is not None)
