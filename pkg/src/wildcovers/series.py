"""Truncated Laurent series over F_q and the Artin-Schreier map on them.

A :class:`LaurentSeries` is either *truncated* (``prec = N`` means it is
known modulo t^(N+1)) or *exact* (``prec = None``, a Laurent polynomial).
Exact series realize the ring of regular functions k[1/t] on the affine line
and keep membership tests honest; truncated ones realize k((t)).

Coefficients are held as an integer array of shape (length, e), row k being
the coefficient of t^(val + k).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .arith import FieldDescriptor, FqElement, artin_schreier_solve_fq
from .errors import DomainError, PrecisionError, UsageError


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _conv(F: FieldDescriptor, A: np.ndarray, B: np.ndarray, length: int | None = None) -> np.ndarray:
    """Product of coefficient arrays, optionally keeping only the first ``length`` rows."""
    if length is not None:
        A, B = A[:length], B[:length]
    if len(A) == 0 or len(B) == 0:
        return np.zeros((0, F.e), dtype=np.int64)
    p, e = F.p, F.e
    if e == 1:
        out = (np.convolve(A[:, 0], B[:, 0]) % p).reshape(-1, 1)
    else:
        full = np.zeros((len(A) + len(B) - 1, 2 * e - 1), dtype=np.int64)
        for i in range(e):
            if not A[:, i].any():
                continue
            for j in range(e):
                full[:, i + j] += np.convolve(A[:, i], B[:, j])
        out = (full % p) @ F.reduction_matrix % p
    if length is not None:
        out = out[:length]
    return out


class LaurentSeries:
    """Element of F_q((t)) known to a stated precision, or an exact Laurent polynomial."""

    __slots__ = ("field", "val", "prec", "_c")

    def __init__(self, field: FieldDescriptor, val: int, coeffs, prec: int | None = None):
        p, e = field.p, field.e
        if isinstance(coeffs, np.ndarray):
            arr = coeffs.astype(np.int64, copy=True).reshape(-1, e)
        else:
            rows = []
            for c in coeffs:
                if isinstance(c, FqElement):
                    rows.append(field.element(c).coeffs)
                else:
                    rows.append(field.element(c).coeffs)
            arr = np.array(rows, dtype=np.int64).reshape(-1, e)
        arr %= p
        if prec is not None:
            width = prec - val + 1
            if width <= 0:
                arr = arr[:0]
            elif len(arr) >= width:
                arr = arr[:width]
            else:
                arr = np.concatenate([arr, np.zeros((width - len(arr), e), dtype=np.int64)])
        nz = np.flatnonzero(arr.any(axis=1))
        if nz.size == 0:
            arr = arr[:0]
            val = prec + 1 if prec is not None else 0
        else:
            first = int(nz[0])
            last = len(arr) - 1 if prec is not None else int(nz[-1])
            arr = arr[first:last + 1]
            val += first
        self.field = field
        self.val = int(val)
        self.prec = prec
        self._c = arr

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, field, prec=None) -> LaurentSeries:
        return cls(field, 0 if prec is None else prec + 1, [], prec)

    @classmethod
    def one(cls, field) -> LaurentSeries:
        return cls(field, 0, [1])

    @classmethod
    def monomial(cls, field, coeff, exponent: int, prec=None) -> LaurentSeries:
        return cls(field, exponent, [coeff], prec)

    @classmethod
    def from_terms(cls, field, terms: dict, prec=None) -> LaurentSeries:
        """Build from a mapping exponent -> coefficient."""
        terms = {int(k): v for k, v in terms.items()}
        if not terms:
            return cls.zero(field, prec)
        lo, hi = min(terms), max(terms)
        rows = [field.zero] * (hi - lo + 1)
        for k, v in terms.items():
            rows[k - lo] = field.element(v)
        return cls(field, lo, rows, prec)

    def _new(self, val, arr, prec) -> LaurentSeries:
        return LaurentSeries(self.field, val, arr, prec)

    # -- inspection -------------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        """Zero to the known precision (or exactly zero)."""
        return len(self._c) == 0

    @property
    def valuation(self):
        if self.is_zero():
            return math.inf if self.prec is None else self.prec + 1
        return self.val

    @property
    def top(self) -> int:
        """Largest exponent with stored data."""
        if self.prec is not None:
            return self.prec
        return self.val + len(self._c) - 1

    def coefficient(self, k: int) -> FqElement:
        if self.prec is not None and k > self.prec:
            raise PrecisionError(f"coefficient of t^{k} unknown beyond precision {self.prec}", k)
        i = k - self.val
        if self.is_zero() or i < 0 or i >= len(self._c):
            return self.field.zero
        return self.field.from_row(self._c[i])

    __getitem__ = coefficient

    @property
    def coeffs(self) -> list[FqElement]:
        return [self.field.from_row(r) for r in self._c]

    def terms(self) -> dict[int, FqElement]:
        return {self.val + i: self.field.from_row(r) for i, r in enumerate(self._c) if r.any()}

    def rows(self, lo: int, hi: int) -> np.ndarray:
        """Dense coefficient rows for exponents lo..hi (zeros outside storage)."""
        out = np.zeros((hi - lo + 1, self.field.e), dtype=np.int64)
        if self.is_zero() or hi < lo:
            return out
        a = max(lo, self.val)
        b = min(hi, self.val + len(self._c) - 1)
        if a <= b:
            out[a - lo:b - lo + 1] = self._c[a - self.val:b - self.val + 1]
        return out

    def restrict(self, lo=None, hi=None) -> LaurentSeries:
        """Terms with lo <= exponent <= hi; exact when hi is within the known range."""
        if self.is_zero():
            if hi is not None and (self.prec is None or hi <= self.prec):
                return LaurentSeries.zero(self.field)
            return LaurentSeries.zero(self.field, self.prec)
        lo = self.val if lo is None else max(lo, self.val)
        if hi is None:
            hi, prec = self.top, self.prec
        elif self.prec is not None and hi > self.prec:
            hi, prec = self.prec, self.prec
        else:
            prec = None
        if hi < lo:
            return LaurentSeries.zero(self.field, prec)
        return self._new(lo, self.rows(lo, hi), prec)

    def principal_part(self) -> LaurentSeries:
        return self.restrict(hi=-1)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.field == other.field and self.val == other.val and self.prec == other.prec
                and np.array_equal(self._c, other._c))

    __hash__ = None

    def agrees_with(self, other) -> bool:
        """Equal as far as both operands are known."""
        return (self - _as_series(self.field, other)).is_zero()

    def __repr__(self):
        parts = []
        for k, c in self.terms().items():
            cs = repr(c)
            if " + " in cs:
                cs = f"({cs})"
            if k == 0:
                parts.append(cs)
            else:
                mono = "t" if k == 1 else f"t^{k}"
                parts.append(mono if cs == "1" else f"{cs}*{mono}")
        if self.prec is not None:
            parts.append(f"O(t^{self.prec + 1})")
        return " + ".join(parts) or "0"

    # -- arithmetic -------------------------------------------------------
    def _check(self, other) -> LaurentSeries:
        other = _as_series(self.field, other)
        if other.field != self.field:
            raise UsageError(f"field mismatch: {self.field} vs {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return _linear_combination(self.field, [(self, 1), (other, 1)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return _linear_combination(self.field, [(self, 1), (other, -1)])

    def __rsub__(self, other):
        return self._check(other) - self

    def __neg__(self):
        return self._new(self.val, -self._c, self.prec)

    def scale(self, c) -> LaurentSeries:
        c = self.field.element(c)
        return self._new(self.val, self._c @ self.field.mul_matrix(c) % self.field.p, self.prec)

    def shift(self, k: int) -> LaurentSeries:
        """Multiply by t^k."""
        return self._new(self.val + k, self._c, None if self.prec is None else self.prec + k)

    def __mul__(self, other):
        if isinstance(other, (FqElement, int, np.integer)):
            return self.scale(other)
        other = self._check(other)
        F = self.field
        if (self.is_zero() and self.is_exact) or (other.is_zero() and other.is_exact):
            return LaurentSeries.zero(F)
        if self.prec is None and other.prec is None:
            prec = None
        else:
            prec = _min_prec(
                None if other.prec is None else self.val + other.prec,
                None if self.prec is None else other.val + self.prec,
            )
        val = self.val + other.val
        length = None if prec is None else max(prec - val + 1, 0)
        return self._new(val, _conv(F, self._c, other._c, length), prec)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = LaurentSeries.one(self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def truncate(self, N: int) -> LaurentSeries:
        return self._new(self.val, self._c, _min_prec(self.prec, N))

    def frobenius(self) -> LaurentSeries:
        """sum a_i t^i -> sum a_i^p t^(ip)."""
        F = self.field
        p = F.p
        prec = None if self.prec is None else p * self.prec + p - 1
        if self.is_zero():
            return LaurentSeries.zero(F, prec)
        n = len(self._c)
        arr = np.zeros(((n - 1) * p + 1, F.e), dtype=np.int64)
        arr[::p] = self._c @ F.frob_matrix % p
        return self._new(self.val * p, arr, prec)

    def inverse(self) -> LaurentSeries:
        F = self.field
        if self.is_zero():
            raise DomainError("inverse of a series that is zero to precision")
        v = self.val
        if self.prec is None:
            if len(self._c) != 1:
                raise PrecisionError("inverse of an exact non-monomial needs a precision; truncate first")
            c = F.from_row(self._c[0]).inverse()
            return LaurentSeries.monomial(F, c, -v)
        rel = self.prec - v  # unit part known to t^rel
        u = self._c
        g = np.array([F.from_row(u[0]).inverse().coeffs], dtype=np.int64)
        m = 1
        while m < rel + 1:
            m2 = min(2 * m, rel + 1)
            ug = _conv(F, u[:m2], g, m2)
            corr = -ug % F.p
            corr[0, 0] = (corr[0, 0] + 2) % F.p
            g = _conv(F, g, corr, m2)
            m = m2
        return self._new(-v, g, rel - v)

    def __truediv__(self, other):
        if isinstance(other, (FqElement, int, np.integer)):
            return self.scale(self.field.element(other).inverse())
        return self * self._check(other).inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()


def _as_series(field, x) -> LaurentSeries:
    if isinstance(x, LaurentSeries):
        return x
    if isinstance(x, (FqElement, int, np.integer)):
        return LaurentSeries(field, 0, [field.element(x)])
    raise UsageError(f"cannot interpret {x!r} as a Laurent series")


def _linear_combination(F, items) -> LaurentSeries:
    prec = None
    for s, _ in items:
        prec = _min_prec(prec, s.prec)
    live = [(s, c) for s, c in items if not s.is_zero()]
    if not live:
        return LaurentSeries.zero(F, prec)
    lo = min(s.val for s, _ in live)
    hi = prec if prec is not None else max(s.top for s, _ in live)
    if hi < lo:
        return LaurentSeries.zero(F, prec)
    arr = np.zeros((hi - lo + 1, F.e), dtype=np.int64)
    for s, c in live:
        n = min(len(s._c), hi - s.val + 1)
        if n <= 0:
            continue
        arr[s.val - lo:s.val - lo + n] += c * s._c[:n]
    return LaurentSeries(F, lo, arr, prec)


def t_series(field: FieldDescriptor) -> LaurentSeries:
    return LaurentSeries.monomial(field, 1, 1)


# -- the Artin-Schreier map and its solvers ------------------------------

def wp_apply(f: LaurentSeries) -> LaurentSeries:
    """f^p - f."""
    return f.frobenius() - f


def wp_solve_tail(l: LaurentSeries, prec: int | None = None) -> LaurentSeries:
    """The unique b in t*k[[t]] with b^p - b = l, to the precision of l.

    b_i = -a_i for p not dividing i, and b_{np} = b_n^p - a_{np}.
    """
    F = l.field
    if not l.is_zero() and l.val < 1:
        raise UsageError(f"wp_solve_tail needs valuation >= 1, got {l.val}")
    if l.prec is None:
        if l.is_zero():
            return LaurentSeries.zero(F)
        if prec is None:
            raise PrecisionError("an exact nonzero tail has an infinite preimage; pass a precision")
        l = l.truncate(prec)
    N = l.prec
    if N < 1:
        return LaurentSeries.zero(F, N)
    p = F.p
    a = l.rows(0, N)
    b = np.zeros_like(a)
    frob = F.frob_matrix
    for i in range(1, N + 1):
        if i % p:
            b[i] = -a[i] % p
        else:
            b[i] = (b[i // p] @ frob - a[i]) % p
    return LaurentSeries(F, 0, b, N)


def wp_solve_local(g: LaurentSeries, prec: int | None = None) -> LaurentSeries | None:
    """Some b with b^p - b = g in F_q((t)), or None when g is not in the image.

    The returned solution has constant term with zero constant coefficient;
    all others are b + c for c in F_p.
    """
    F = g.field
    p = F.p
    if g.prec is not None and g.prec < 0:
        raise PrecisionError("wp_solve_local needs the constant term (precision >= 0)", 0)
    cur = g
    b = LaurentSeries.zero(F)
    while not cur.is_zero() and cur.val < 0:
        m = -cur.val
        if m % p:
            return None
        c = cur.coefficient(cur.val)
        beta = LaurentSeries.monomial(F, c.pth_root(), -(m // p))
        cur = cur - wp_apply(beta)
        b = b + beta
    const = cur.coefficient(0)
    s = artin_schreier_solve_fq(const)
    if s is None:
        return None
    if s:
        b = b + s
        cur = cur - const
    return b + wp_solve_tail(cur.restrict(lo=1), prec)


class P1Split(NamedTuple):
    b: LaurentSeries
    h: LaurentSeries


def split_p1(f: LaurentSeries) -> P1Split:
    """f = wp(b) + h with b in t*k[[t]] and h an exact polynomial in 1/t."""
    if f.prec is not None and f.prec < 0:
        raise PrecisionError("split_p1 needs the constant term (precision >= 0)", 0)
    h = f.restrict(hi=0)
    b = wp_solve_tail(f.restrict(lo=1))
    return P1Split(b, h)


def is_p1_global(f: LaurentSeries) -> bool:
    """Exact and free of positive powers of t, i.e. an element of k[1/t]."""
    return f.is_exact and (f.is_zero() or f.top <= 0)
