"""Dense polynomials over F_p as tuples of residues, lowest degree first."""

from itertools import zip_longest


def trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def degree(a):
    return len(trim(a)) - 1


def add(a, b, p):
    return trim((x + y) % p for x, y in zip_longest(a, b, fillvalue=0))


def sub(a, b, p):
    return trim((x - y) % p for x, y in zip_longest(a, b, fillvalue=0))


def scale(a, c, p):
    return trim((c * x) % p for x in a)


def mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(v % p for v in out)


def divmod_(a, m, p):
    a = list(trim(a))
    m = trim(m)
    if not m:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(m[-1], -1, p)
    dm = len(m) - 1
    quot = [0] * max(len(a) - dm, 0)
    for k in range(len(a) - 1, dm - 1, -1):
        c = a[k] * inv_lead % p
        if c:
            quot[k - dm] = c
            for i, y in enumerate(m):
                a[k - dm + i] = (a[k - dm + i] - c * y) % p
    return trim(quot), trim(a[:dm])


def mod(a, m, p):
    return divmod_(a, m, p)[1]


def gcd(a, b, p):
    a, b = trim(a), trim(b)
    while b:
        a, b = b, mod(a, b, p)
    if a:
        a = scale(a, pow(a[-1], -1, p), p)
    return a


def powmod(a, k, m, p):
    result = (1,)
    base = mod(a, m, p)
    while k:
        if k & 1:
            result = mod(mul(result, base, p), m, p)
        base = mod(mul(base, base, p), m, p)
        k >>= 1
    return mod(result, m, p)


def power(a, k, p):
    result = (1,)
    for _ in range(k):
        result = mul(result, a, p)
    return result


def compose_xp(a, k):
    """Substitute x -> x^k."""
    if not a:
        return ()
    out = [0] * ((len(a) - 1) * k + 1)
    for i, c in enumerate(a):
        out[i * k] = c
    return tuple(out)


def is_irreducible(f, p):
    """Rabin-style test: f has no factor of degree <= deg(f)/2."""
    f = trim(f)
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = (0, 1)
    xp = x
    for _ in range(d // 2):
        xp = powmod(xp, p, f, p)
        if degree(gcd(sub(xp, x, p), f, p)) > 0:
            return False
    return True
