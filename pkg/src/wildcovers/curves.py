"""Curve models Y with a marked point y, and globalization of local cover data.

Two models are provided:

* :class:`ProjectiveLine` over any F_q, marked at t = 0, where the regular
  functions away from the mark are k[1/t];
* :class:`EllipticMarkedCurve` y^2 = x^3 + Ax + B over F_p (p >= 5), marked at
  the origin O with local parameter t = -x/y, where the regular functions
  away from O are F_p[x, y]/(y^2 - x^3 - Ax - B).

Both expose ``split(f)`` returning f = wp(b) + g + obstruction * t^(-1).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from . import _poly
from .arith import GF, FieldDescriptor, is_prime
from .errors import AnomalousCurveError, IntegrityError, PrecisionError, UsageError
from .series import LaurentSeries, is_p1_global, split_p1, t_series, wp_apply, wp_solve_tail
from .unipotent import LaurentRing, P1GlobalRing, UnipotentMatrix, p_conjugate, positions


DEFAULT_PREC = 40


class GlobalSplit(NamedTuple):
    """f = wp(b) + g + obstruction * t^(-1), to precision ``prec``."""

    b: LaurentSeries
    g: object
    obstruction: int
    prec: int


# -- projective line -----------------------------------------------------

class ProjectiveLine:
    tag = "p1"

    def __init__(self, field: FieldDescriptor):
        self.field = field
        self.global_ring = P1GlobalRing(field)

    def __repr__(self):
        return f"ProjectiveLine({self.field!r})"

    def split(self, f: LaurentSeries) -> GlobalSplit:
        b, h = split_p1(f)
        return GlobalSplit(b, h, 0, f.prec)

    def expand(self, g, prec=None) -> LaurentSeries:
        return g if prec is None else g.truncate(prec)

    def is_global(self, f: LaurentSeries) -> bool:
        """f has no positive powers of t, to its precision."""
        return f.restrict(lo=1).is_zero()


# -- elliptic curves -----------------------------------------------------

@dataclass(frozen=True)
class EllipticMarkedCurve:
    p: int
    A: int
    B: int
    field: FieldDescriptor = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not is_prime(self.p) or self.p < 5:
            raise UsageError(f"elliptic models need a prime p >= 5, got {self.p}")
        object.__setattr__(self, "A", self.A % self.p)
        object.__setattr__(self, "B", self.B % self.p)
        if self.discriminant == 0:
            raise UsageError(f"y^2 = x^3 + {self.A}x + {self.B} is singular over F_{self.p}")
        object.__setattr__(self, "field", GF(self.p))

    tag = "elliptic"

    @property
    def discriminant(self) -> int:
        return (-16 * (4 * self.A**3 + 27 * self.B**2)) % self.p

    @property
    def cubic(self) -> tuple[int, ...]:
        return _poly.trim((self.B, self.A, 0, 1))

    @property
    def global_ring(self):
        return EllipticGlobalRing(self)

    def __str__(self):
        return f"y^2 = x^3 + {self.A}x + {self.B} over F_{self.p}"

    def split(self, f: LaurentSeries) -> GlobalSplit:
        return split_elliptic(self, f)

    def expand(self, g, prec) -> LaurentSeries:
        return g.expand(prec)

    def is_global(self, f: LaurentSeries) -> bool:
        red = reduce_principal_part(self, f)
        return red.c == 0 and red.tail.is_zero()


def nonsingular_curves(p: int):
    for A in range(p):
        for B in range(p):
            if (4 * A**3 + 27 * B**2) % p:
                yield EllipticMarkedCurve(p, A, B)


class EllipticFunction:
    """a(x) + b(x) y, a regular function on E away from O; coefficients in F_p."""

    __slots__ = ("curve", "a", "b")

    def __init__(self, curve: EllipticMarkedCurve, a=(), b=()):
        p = curve.p
        self.curve = curve
        self.a = _poly.trim(int(c) % p for c in a)
        self.b = _poly.trim(int(c) % p for c in b)

    @classmethod
    def monomial(cls, curve, i: int, j: int, coeff: int = 1):
        poly = (0,) * i + (coeff,)
        return cls(curve, poly, ()) if j == 0 else cls(curve, (), poly)

    @classmethod
    def constant(cls, curve, c: int):
        return cls(curve, (c,))

    def _coerce(self, other):
        if isinstance(other, EllipticFunction):
            if other.curve != self.curve:
                raise UsageError("functions on different curves")
            return other
        return EllipticFunction(self.curve, (int(other),))

    def __add__(self, other):
        o = self._coerce(other)
        p = self.curve.p
        return EllipticFunction(self.curve, _poly.add(self.a, o.a, p), _poly.add(self.b, o.b, p))

    __radd__ = __add__

    def __neg__(self):
        p = self.curve.p
        return EllipticFunction(self.curve, _poly.scale(self.a, -1, p), _poly.scale(self.b, -1, p))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        o = self._coerce(other)
        p, g = self.curve.p, self.curve.cubic
        a = _poly.add(_poly.mul(self.a, o.a, p), _poly.mul(_poly.mul(self.b, o.b, p), g, p), p)
        b = _poly.add(_poly.mul(self.a, o.b, p), _poly.mul(self.b, o.a, p), p)
        return EllipticFunction(self.curve, a, b)

    __rmul__ = __mul__

    def frobenius(self):
        """f^p; y^p = y (x^3 + Ax + B)^((p-1)/2)."""
        p = self.curve.p
        gp = _poly.power(self.curve.cubic, (p - 1) // 2, p)
        return EllipticFunction(self.curve, _poly.compose_xp(self.a, p),
                                _poly.mul(_poly.compose_xp(self.b, p), gp, p))

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def __eq__(self, other):
        if not isinstance(other, EllipticFunction):
            return NotImplemented
        return self.curve == other.curve and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.curve, self.a, self.b))

    @property
    def pole_order(self) -> int:
        orders = [2 * i for i, c in enumerate(self.a) if c] + [2 * i + 3 for i, c in enumerate(self.b) if c]
        return max(orders, default=0)

    def expand(self, prec: int) -> LaurentSeries:
        """Laurent expansion in t = -x/y, known modulo t^(prec+1)."""
        F = self.curve.field
        if self.is_zero():
            return LaurentSeries.zero(F, prec)
        work = prec + self.pole_order + 8
        while True:
            x, y = weierstrass_expand(self.curve, work)
            out = _horner(F, self.a, x) + _horner(F, self.b, x) * y
            if out.prec is None or out.prec >= prec:
                return out.truncate(prec)
            work += 8

    def __repr__(self):
        def fmt(poly):
            parts = []
            for i, c in enumerate(poly):
                if c:
                    mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                    parts.append(f"{c}" if not mono else (mono if c == 1 else f"{c}*{mono}"))
            return " + ".join(parts)
        a, b = fmt(self.a), fmt(self.b)
        if b:
            b = f"({b})*y" if " + " in b else (f"{b}*y" if b != "1" else "y")
        return " + ".join(s for s in (a, b) if s) or "0"


def _horner(F, poly, x):
    acc = LaurentSeries.zero(F)
    for c in reversed(poly):
        acc = acc * x + c
    return acc


class EllipticGlobalRing:
    tag = "elliptic"

    def __init__(self, curve: EllipticMarkedCurve):
        self.curve = curve
        self.field = curve.field

    def __eq__(self, other):
        return type(other) is type(self) and other.curve == self.curve

    def __hash__(self):
        return hash((self.tag, self.curve))

    def __repr__(self):
        return f"EllipticGlobalRing({self.curve})"

    def zero(self):
        return EllipticFunction(self.curve)

    def one(self):
        return EllipticFunction.constant(self.curve, 1)

    def coerce(self, x):
        if isinstance(x, EllipticFunction):
            return x
        return EllipticFunction.constant(self.curve, int(x))

    def contains(self, x) -> bool:
        return isinstance(x, EllipticFunction) and x.curve == self.curve

    def agree(self, x, y) -> bool:
        return x == y

    def random(self, rng: random.Random, pole=6):
        p = self.curve.p
        g = EllipticFunction(self.curve)
        for i, j in _rr_exponents(pole):
            g = g + EllipticFunction.monomial(self.curve, i, j, rng.randrange(p))
        return g


@lru_cache(maxsize=256)
def weierstrass_expand(E: EllipticMarkedCurve, prec: int) -> tuple[LaurentSeries, LaurentSeries]:
    """x(t), y(t) at O, both known modulo t^(prec+1).

    With w = -1/y and z = t, w is the fixed point of w = z^3 + A z w^2 + B w^3;
    then x = z/w and y = -1/w.
    """
    if prec < 6:
        raise PrecisionError("weierstrass_expand needs prec >= 6", 6)
    F = E.field
    K = prec + 6
    z = t_series(F)
    w = LaurentSeries.zero(F, K)
    for _ in range(K + 2):
        new = (z**3 + (z * w * w).scale(E.A) + (w * w * w).scale(E.B)).truncate(K)
        if new == w:
            break
        w = new
    else:
        raise IntegrityError("formal expansion of w did not stabilize")
    inv_w = w.inverse()
    return (z * inv_w).truncate(prec), (-inv_w).truncate(prec)


@dataclass
class RRFunction:
    i: int
    j: int
    expansion: LaurentSeries

    @property
    def pole_order(self) -> int:
        return 2 * self.i + 3 * self.j


def _rr_exponents(m: int):
    out = [(0, 0)]
    for k in range(2, m + 1):
        out.append((k // 2, 0) if k % 2 == 0 else ((k - 3) // 2, 1))
    return out


def rr_basis(E: EllipticMarkedCurve, m: int, prec: int) -> list[RRFunction]:
    """x^i y^j (j <= 1) with pole order 2i + 3j <= m, by increasing pole order."""
    if m < 0:
        raise UsageError("pole bound must be >= 0")
    return [RRFunction(i, j, EllipticFunction.monomial(E, i, j).expand(prec)) for i, j in _rr_exponents(m)]


class PrincipalPartReduction(NamedTuple):
    g: EllipticFunction
    c: int
    tail: LaurentSeries


def reduce_principal_part(E: EllipticMarkedCurve, f: LaurentSeries) -> PrincipalPartReduction:
    """f = g + c t^(-1) + tail with g global (constants included) and tail in t k[[t]].

    Poles of order >= 2 are removed greedily from the most negative one
    upward, using the basis function of exactly that pole order.  The residue
    c is the class of f in H^1(E, O_E) with respect to [t^(-1)].
    """
    if f.field != E.field:
        raise UsageError("series field does not match the curve")
    if f.prec is None:
        raise PrecisionError("reduce_principal_part needs a truncated series")
    N = f.prec
    if N < 0:
        raise PrecisionError("reduce_principal_part needs precision >= 0", 0)
    F = E.field
    g = EllipticFunction(E)
    cur = f
    m = -f.val if not f.is_zero() and f.val < 0 else 0
    for k in range(m, 1, -1):
        c = int(cur.coefficient(-k))
        if not c:
            continue
        i, j = (k // 2, 0) if k % 2 == 0 else ((k - 3) // 2, 1)
        lead = 1 if j == 0 else -1
        s = c * lead % E.p
        phi = EllipticFunction.monomial(E, i, j, s)
        g = g + phi
        cur = cur - phi.expand(N)
    c1 = int(cur.coefficient(-1))
    c0 = int(cur.coefficient(0))
    g = g + c0
    cur = cur - LaurentSeries.from_terms(F, {-1: c1, 0: c0})
    return PrincipalPartReduction(g, c1, cur)


def point_count(E: EllipticMarkedCurve) -> int:
    p = E.p
    roots = [0] * p
    for y in range(p):
        roots[y * y % p] += 1
    return 1 + sum(roots[(x**3 + E.A * x + E.B) % p] for x in range(p))


@lru_cache(maxsize=None)
def frobenius_on_h1(E: EllipticMarkedCurve) -> int:
    """alpha with F*[t^(-1)] = [t^(-p)] = alpha [t^(-1)]."""
    f = LaurentSeries.monomial(E.field, 1, -E.p, prec=0)
    return reduce_principal_part(E, f).c


def hasse_deuring(E: EllipticMarkedCurve) -> int:
    """Coefficient of x^(p-1) in (x^3 + Ax + B)^((p-1)/2)."""
    p = E.p
    h = _poly.power(E.cubic, (p - 1) // 2, p)
    return h[p - 1] if len(h) > p - 1 else 0


def is_anomalous(E: EllipticMarkedCurve) -> bool:
    return point_count(E) == E.p


@dataclass(frozen=True)
class H1Class:
    """c [t^(-1)] in the one-dimensional H^1(E, O_E)."""

    p: int
    c: int

    def __post_init__(self):
        object.__setattr__(self, "c", self.c % self.p)


def wp_star_on_h1(E: EllipticMarkedCurve, cls: H1Class) -> H1Class:
    return H1Class(E.p, (frobenius_on_h1(E) - 1) * cls.c)


@dataclass
class EllipticVerdict:
    count: int
    alpha: int
    deuring: int
    anomalous: bool
    injective: bool
    surjective: bool
    equivalence: bool

    @property
    def discrepancy(self) -> bool:
        """The literal point-count reading and the alpha reading disagree."""
        return self.anomalous != (self.alpha == 1)


def elliptic_verdict(E: EllipticMarkedCurve) -> EllipticVerdict:
    """Injectivity/surjectivity of globalization over E, decided by alpha != 1."""
    count = point_count(E)
    alpha = frobenius_on_h1(E)
    deuring = hasse_deuring(E)
    trace = (E.p + 1 - count) % E.p
    if not alpha == deuring == trace:
        raise IntegrityError(
            f"{E}: H^1 Frobenius {alpha}, Hasse-Deuring {deuring}, p+1-#E = {trace} disagree")
    ok = alpha != 1
    return EllipticVerdict(count, alpha, deuring, count == E.p, ok, ok, ok)


def split_elliptic(E: EllipticMarkedCurve, f: LaurentSeries) -> GlobalSplit:
    """f = wp(b) + g + obstruction t^(-1) with g regular on E - O.

    The H^1 class c of f is removed by subtracting wp(d t^(-1)) with
    d (alpha - 1) = c, which is possible exactly when alpha != 1.
    """
    p = E.p
    if f.prec is None or f.prec < p + 2:
        raise PrecisionError(f"split_elliptic needs precision >= {p + 2}", p + 2)
    N = f.prec
    alpha = frobenius_on_h1(E)
    b = LaurentSeries.zero(E.field)
    g = EllipticFunction(E)
    cur = f
    for _ in range(3):
        red = reduce_principal_part(E, cur)
        g = g + red.g
        b = b + wp_solve_tail(red.tail)
        if red.c == 0:
            return GlobalSplit(b, g, 0, N)
        if alpha == 1:
            return GlobalSplit(b, g, red.c, N)
        d = red.c * pow(alpha - 1, -1, p) % p
        beta = LaurentSeries.monomial(E.field, d, -1)
        b = b + beta
        cur = (LaurentSeries.monomial(E.field, red.c, -1) - wp_apply(beta)).truncate(N)
    raise IntegrityError("H^1 class survived after it was solved for")


def split_residual(model, f: LaurentSeries, split: GlobalSplit) -> LaurentSeries:
    """f - wp(b) - g - obstruction t^(-1); zero to precision for a correct split."""
    g = model.expand(split.g, split.prec)
    r = f - wp_apply(split.b) - g
    if split.obstruction:
        r = r - LaurentSeries.monomial(f.field, split.obstruction, -1)
    return r


# -- globalization of matrices --------------------------------------------

@dataclass
class GlobalReduction:
    B: UnipotentMatrix
    M_global: UnipotentMatrix

    def verify(self, model, M: UnipotentMatrix) -> bool:
        P = p_conjugate(self.B, M)
        for pos in positions(M.n):
            e = P[pos]
            prec = e.prec if e.prec is not None else max(e.top, 0) + DEFAULT_PREC
            if not (e - model.expand(self.M_global[pos], prec)).is_zero():
                return False
        return True


def reduce_matrix_global(model, M: UnipotentMatrix, prec: int = DEFAULT_PREC) -> GlobalReduction:
    """(B, M') with B^(p) M B^(-1) = M' and every entry of M' regular away from the mark.

    Diagonals are swept upward.  At (i, j) the current entry f is split as
    wp(b) + h and the elementary conjugator with -b at (i, j) replaces it by h;
    this only disturbs entries on larger diagonals.  Exact entries that are not
    already global are truncated at ``prec`` first.
    """
    if M.ring.tag not in ("laurent", "p1"):
        raise UsageError("reduce_matrix_global expects a matrix over the Laurent ring")
    if M.ring.field != model.field:
        raise UsageError("matrix field does not match the curve model")
    n = M.n
    ring = LaurentRing(model.field)
    cur = M if type(M.ring) is LaurentRing else M.map(lambda v: v, ring)
    B = UnipotentMatrix.identity(n, ring)
    out = {}
    for pos in positions(n):
        f = cur[pos]
        if f.is_exact:
            if f.is_zero():
                out[pos] = model.global_ring.zero()
                continue
            if isinstance(model, ProjectiveLine) and is_p1_global(f):
                out[pos] = f
                continue
            f = f.truncate(max(f.top, prec))
        sp = model.split(f)
        if sp.obstruction:
            i, j = pos
            raise AnomalousCurveError(
                f"entry ({i},{j}) carries an H^1 obstruction {sp.obstruction} that wp cannot remove",
                {"entry": f"{i},{j}", "obstruction": int(sp.obstruction)},
            )
        Ei = UnipotentMatrix.elementary(n, ring, *pos, -sp.b)
        cur = p_conjugate(Ei, cur)
        B = Ei * B
        out[pos] = sp.g
    return GlobalReduction(B, UnipotentMatrix(n, model.global_ring, out))


# -- injectivity ---------------------------------------------------------

@dataclass
class ProbeVerdict:
    """Whether b is global (up to F_p) given that wp(b) is."""

    affirmative: bool
    h1_class: int = 0


def injectivity_probe(model, b: LaurentSeries) -> ProbeVerdict:
    wb = wp_apply(b)
    if isinstance(model, ProjectiveLine):
        if not model.is_global(wb):
            raise UsageError("wp(b) is not a polynomial in 1/t")
        return ProbeVerdict(model.is_global(b))
    red = reduce_principal_part(model, wb)
    if red.c or not red.tail.is_zero():
        raise UsageError("wp(b) is not regular away from O")
    rb = reduce_principal_part(model, b)
    return ProbeVerdict(rb.c == 0 and rb.tail.is_zero(), rb.c)


def injectivity_counterexample(E: EllipticMarkedCurve, prec: int) -> LaurentSeries | None:
    """For alpha = 1: b = t^(-1) - wp^(-1)(tail of t^(-p)) is not global but wp(b) is."""
    if frobenius_on_h1(E) != 1:
        return None
    red = reduce_principal_part(E, LaurentSeries.monomial(E.field, 1, -E.p, prec=prec))
    return LaurentSeries.monomial(E.field, 1, -1) - wp_solve_tail(red.tail)
