"""Univariate polynomials with exact rational coefficients.

Coefficients are stored lowest degree first as reduced ``Fraction`` values,
with trailing zeros stripped, so two polynomials are equal exactly when their
coefficient tuples are equal.  Heavier operations (gcd, resultant, rational
roots) work on primitive integer coefficient lists internally.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

__all__ = [
    "RatPoly",
    "as_fraction",
    "compose",
    "resultant",
    "squarefree_part",
    "rational_roots",
    "poly_gcd",
    "parse_poly",
    "format_poly",
]


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and ``"n/d"`` strings to a ``Fraction``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().replace("−", "-")
        if not text:
            raise ValueError("empty rational literal")
        return Fraction(text)
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact coefficients; use 'n/d' strings")
    # gmpy2.mpq and friends expose numerator/denominator
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def _strip(coeffs: list) -> tuple:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class RatPoly:
    """Immutable polynomial over Q, coefficients lowest degree first."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _strip([as_fraction(c) for c in coeffs])
        self._hash = None

    # -- constructors ----------------------------------------------------
    @classmethod
    def _raw(cls, coeffs: tuple) -> "RatPoly":
        obj = cls.__new__(cls)
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, c) -> "RatPoly":
        return cls([c])

    @classmethod
    def x(cls) -> "RatPoly":
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "RatPoly":
        out = cls([1])
        for r in roots:
            out = out * cls([-as_fraction(r), 1])
        return out

    # -- basic properties ------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; the zero polynomial has degree -1."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, RatPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RatPoly([other]).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self) -> str:
        return f"RatPoly([{', '.join(str(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if mono and abs(c) == 1:
                body = mono
            else:
                cs = str(abs(c))
                if "/" in cs and mono:
                    cs = f"({cs})"
                body = cs + ("*" + mono if mono else "")
            terms.append(("-" if c < 0 else "+", body))
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    # -- arithmetic ------------------------------------------------------
    def _coerce(self, other) -> "RatPoly":
        if isinstance(other, RatPoly):
            return other
        return RatPoly([other])

    def __add__(self, other) -> "RatPoly":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RatPoly._raw(_strip(out))

    __radd__ = __add__

    def __neg__(self) -> "RatPoly":
        return RatPoly._raw(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "RatPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RatPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RatPoly":
        if not isinstance(other, RatPoly):
            c = as_fraction(other)
            if c == 0:
                return RatPoly._raw(())
            return RatPoly._raw(tuple(x * c for x in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return RatPoly._raw(())
        if min(len(a), len(b)) >= _KRONECKER_MIN:
            (ia, da), (ib, db) = _scaled_ints(a), _scaled_ints(b)
            den = da * db
            return RatPoly._raw(_strip([Fraction(v, den) for v in _zmul(ia, ib)]))
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return RatPoly._raw(_strip(out))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RatPoly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = RatPoly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __divmod__(self, other) -> tuple["RatPoly", "RatPoly"]:
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        if len(rem) - 1 < db:
            return RatPoly._raw(()), self
        inv = 1 / other.lc
        quot = [Fraction(0)] * (len(rem) - db)
        b = other.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            q = c * inv
            quot[k - db] = q
            for j in range(db + 1):
                rem[k - db + j] -= q * b[j]
        return RatPoly._raw(_strip(quot)), RatPoly._raw(_strip(rem[:db]))

    def __floordiv__(self, other) -> "RatPoly":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "RatPoly":
        return divmod(self, other)[1]

    def exact_div(self, other) -> "RatPoly":
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def divides(self, other: "RatPoly") -> bool:
        """True when ``self`` divides ``other`` exactly."""
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()

    # -- calculus / evaluation -------------------------------------------
    def derivative(self) -> "RatPoly":
        return RatPoly._raw(_strip([k * c for k, c in enumerate(self.coeffs)][1:]))

    def __call__(self, x):
        """Horner evaluation; works for Fractions, ints, RatPolys, mpmath values."""
        if isinstance(x, RatPoly):
            return compose(self, x)
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> "RatPoly":
        if not self.coeffs:
            return self
        lc = self.lc
        if lc == 1:
            return self
        return RatPoly._raw(tuple(c / lc for c in self.coeffs))

    def scale_var(self, a) -> "RatPoly":
        """Return p(a z)."""
        a = as_fraction(a)
        return RatPoly._raw(_strip([c * a**k for k, c in enumerate(self.coeffs)]))

    def shift(self, a) -> "RatPoly":
        """Return p(z + a) by Taylor shift."""
        a = as_fraction(a)
        c = list(self.coeffs)
        n = len(c)
        for i in range(n - 1):
            for k in range(n - 2, i - 1, -1):
                c[k] += a * c[k + 1]
        return RatPoly._raw(_strip(c))

    # -- integer views ---------------------------------------------------
    def integer_coeffs(self) -> list[int]:
        """Primitive integer coefficient list with positive leading coefficient."""
        if not self.coeffs:
            return []
        den = reduce(math.lcm, (c.denominator for c in self.coeffs), 1)
        ints = [int(c * den) for c in self.coeffs]
        g = reduce(math.gcd, ints, 0)
        if ints[-1] < 0:
            g = -g
        return [v // g for v in ints]

    def to_text(self) -> str:
        return format_poly(self)


# ---------------------------------------------------------------------------
# composition


def compose(p: RatPoly, q: RatPoly) -> RatPoly:
    """Return p(q(z)); deg = deg p * deg q for nonconstant inputs."""
    if not isinstance(q, RatPoly):
        q = RatPoly([q])
    if not p.coeffs or q.degree < 1:
        return RatPoly([p(q.coeffs[0] if q.coeffs else 0)])
    # Horner over integers: p(qi/dq) = sum p_i qi^i dq^(n-i) / dq^n
    pi, dp = _scaled_ints(p.coeffs)
    qi, dq = _scaled_ints(q.coeffs)
    n = len(pi) - 1
    acc = [pi[n]]
    scale = 1
    for k in range(n - 1, -1, -1):
        scale *= dq
        acc = _zmul_any(acc, qi)
        acc[0] += pi[k] * scale
    den = dp * scale
    return RatPoly._raw(_strip([Fraction(v, den) for v in acc]))


# ---------------------------------------------------------------------------
# integer polynomial helpers (lowest degree first, lists of int)


def _ztrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _zcontent(a: Sequence[int]) -> int:
    return reduce(math.gcd, a, 0)


def _zprimitive(a: Sequence[int]) -> list[int]:
    g = _zcontent(a)
    if g == 0:
        return []
    if a[-1] < 0:
        g = -g
    return [v // g for v in a]


def _zeval(a: Sequence[int], x: int) -> int:
    if len(a) <= 32:
        acc = 0
        for c in reversed(a):
            acc = acc * x + c
        return acc
    # split in halves so the big multiplications are balanced
    m = len(a) // 2
    return _zeval(a[:m], x) + _zeval(a[m:], x) * x**m


# below this length schoolbook Fraction products are faster than packing
_KRONECKER_MIN = 24


def _scaled_ints(coeffs: Sequence[Fraction]) -> tuple[list[int], int]:
    den = reduce(math.lcm, (c.denominator for c in coeffs), 1)
    return [c.numerator * (den // c.denominator) for c in coeffs], den


def _pack(a: Sequence[int], nbytes: int) -> int:
    pos = b"".join((v if v > 0 else 0).to_bytes(nbytes, "little") for v in a)
    neg = b"".join((-v if v < 0 else 0).to_bytes(nbytes, "little") for v in a)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _zmul_any(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if min(len(a), len(b)) >= _KRONECKER_MIN:
        return _zmul(a, b)
    out = [0] * (len(a) + len(b) - 1)
    for j, y in enumerate(b):
        if y:
            for i, v in enumerate(a):
                out[i + j] += v * y
    return out


def _zmul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Integer polynomial product by Kronecker substitution."""
    n = len(a) + len(b) - 1
    bound = max(abs(v) for v in a) * max(abs(v) for v in b) * min(len(a), len(b))
    nbytes = (bound.bit_length() + 2) // 8 + 1  # room for the sign offset below
    offset = 1 << (8 * nbytes - 1)
    packed = _pack(a, nbytes) * _pack(b, nbytes)
    # adding offset to every digit makes all digits non-negative
    bias = int.from_bytes(offset.to_bytes(nbytes, "little") * n, "little")
    raw = (packed + bias).to_bytes(nbytes * n, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - offset for i in range(n)]


def _zdivexact(a: Sequence[int], b: Sequence[int]) -> list[int] | None:
    """Exact division over Z; None if b does not divide a in Z[x]."""
    rem = list(a)
    db = len(b) - 1
    if len(rem) - 1 < db:
        return None if any(rem) else []
    lb = b[-1]
    quot = [0] * (len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k]
        if c == 0:
            continue
        q, r = divmod(c, lb)
        if r:
            return None
        quot[k - db] = q
        for j in range(db + 1):
            rem[k - db + j] -= q * b[j]
    if any(rem[:db]):
        return None
    return _ztrim(quot)


def _heu_gcd(f: list[int], g: list[int]) -> list[int] | None:
    """Heuristic integer-polynomial gcd by evaluation at a large integer."""
    nf = max(abs(c) for c in f)
    ng = max(abs(c) for c in g)
    b = 2 * min(nf, ng) + 29
    x = max(min(b, 99 * math.isqrt(b)), 2 * min(nf // abs(f[-1]), ng // abs(g[-1])) + 2)
    # a power of 256 lets the balanced digits of the gcd be read off its bytes
    nbytes = (x.bit_length() + 7) // 8
    for _ in range(8):
        x = 1 << (8 * nbytes)
        ff, gg = _zeval(f, x), _zeval(g, x)
        if ff and gg:
            cand = _zprimitive(_ztrim(_balanced_digits(math.gcd(ff, gg), nbytes)))
            if cand and _zdivexact(f, cand) is not None and _zdivexact(g, cand) is not None:
                return cand
        nbytes += max(1, nbytes // 2)
    return None


def _balanced_digits(h: int, nbytes: int) -> list[int]:
    """Digits of h >= 0 in base 256^nbytes, each in (-base/2, base/2]."""
    base = 1 << (8 * nbytes)
    raw = h.to_bytes((h.bit_length() + 7) // 8 + nbytes, "little")
    out, carry = [], 0
    for i in range(0, len(raw), nbytes):
        digit = int.from_bytes(raw[i:i + nbytes], "little") + carry
        carry = 0
        if digit > base // 2:
            digit -= base
            carry = 1
        out.append(digit)
    return out


def poly_gcd(p: RatPoly, q: RatPoly) -> RatPoly:
    """Monic gcd over Q (zero if both inputs are zero)."""
    if p.is_zero():
        return q.monic()
    if q.is_zero():
        return p.monic()
    if p.degree == 0 or q.degree == 0:
        return RatPoly([1])
    f, g = p.integer_coeffs(), q.integer_coeffs()
    h = _heu_gcd(f, g)
    if h is not None:
        return RatPoly(h).monic()
    a, b = p.monic(), q.monic()
    while b:
        a, b = b, (a % b).monic()
    return a.monic()


# ---------------------------------------------------------------------------
# resultant


def resultant(p: RatPoly, q: RatPoly) -> Fraction:
    """Res(p, q) = lc(p)^deg(q) * prod q(a) over the roots a of p."""
    if p.is_zero() and q.is_zero():
        raise ValueError("resultant of two zero polynomials is undefined")
    if p.is_zero() or q.is_zero():
        return Fraction(0)
    n, m = p.degree, q.degree
    if n == 0:
        return p.lc**m
    if m == 0:
        return q.lc**n
    dp = reduce(math.lcm, (c.denominator for c in p.coeffs), 1)
    dq = reduce(math.lcm, (c.denominator for c in q.coeffs), 1)
    f = [int(c * dp) for c in p.coeffs]
    g = [int(c * dq) for c in q.coeffs]
    r = _zresultant(f, g)
    return Fraction(r, dp**m * dq**n)


def _zprem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b."""
    db = len(b) - 1
    lb = b[-1]
    r = list(a)
    e = len(a) - 1 - db + 1
    while r and len(r) - 1 >= db:
        c = r[-1]
        shift = len(r) - 1 - db
        r = [lb * v for v in r]
        for j in range(db + 1):
            r[shift + j] -= c * b[j]
        r.pop()
        _ztrim(r)
        e -= 1
    if e > 0 and r:
        s = lb**e
        r = [v * s for v in r]
    return r


def _zresultant(f: list[int], g: list[int]) -> int:
    """Fraction-free resultant of integer polynomials (subresultant PRS)."""
    n, m = len(f) - 1, len(g) - 1
    if n < m:
        r = _zresultant(g, f)
        return -r if (n * m) % 2 else r
    if m == 0:
        return g[0] ** n
    ca, cb = _zcontent(f), _zcontent(g)
    a = [v // ca for v in f]
    b = [v // cb for v in g]
    t = ca**m * cb**n
    s = 1
    gg, hh = 1, 1
    while True:
        da, db = len(a) - 1, len(b) - 1
        delta = da - db
        if da % 2 and db % 2:
            s = -s
        r = _zprem(a, b)
        if not r:
            return 0
        div = gg * hh**delta
        a, b = b, [v // div for v in r]
        gg = a[-1]
        hh = gg**delta // hh ** (delta - 1) if delta >= 1 else hh
        if len(b) == 1:
            da = len(a) - 1
            hh = b[0] ** da // hh ** (da - 1) if da >= 1 else 1
            return s * t * hh


# ---------------------------------------------------------------------------
# squarefree part and rational roots


def squarefree_part(p: RatPoly) -> RatPoly:
    """Monic p / gcd(p, p'): same roots, all simple."""
    if p.is_zero():
        raise ValueError("squarefree part of the zero polynomial is undefined")
    if p.degree <= 0:
        return RatPoly([1])
    g = poly_gcd(p, p.derivative())
    return (p // g).monic()


_SMALL_PRIMES = [q for q in range(3, 20000) if all(q % d for d in range(2, math.isqrt(q) + 1))]


def _gfp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _gfp_rem(a: list[int], b: list[int], p: int) -> list[int]:
    a = list(a)
    inv = pow(b[-1], -1, p)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - db
        for j in range(db + 1):
            a[shift + j] = (a[shift + j] - c * b[j]) % p
        _gfp_trim(a)
    return a


def _gfp_is_squarefree(a: list[int], p: int) -> bool:
    da = [k * c % p for k, c in enumerate(a)][1:]
    da = _gfp_trim(da)
    if not da:
        return False
    x, y = list(a), da
    while y:
        x, y = y, _gfp_rem(x, y, p)
    return len(x) == 1


def _ratrecon(u: int, m: int, bound_num: int, bound_den: int) -> Fraction | None:
    """Rational reconstruction of u mod m with |num| <= bound_num, 0 < den <= bound_den."""
    r0, r1 = m, u % m
    s0, s1 = 0, 1
    while r1 > bound_num:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound_den:
        return None
    if math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _distinct_rational_roots(f: list[int]) -> list[Fraction]:
    """Rational roots of a squarefree primitive integer polynomial (p-adic lifting)."""
    roots: list[Fraction] = []
    if f[0] == 0:
        roots.append(Fraction(0))
        k = 0
        while f[k] == 0:
            k += 1
        f = f[k:]
    if len(f) <= 1:
        return roots
    if len(f) == 2:
        return roots + [Fraction(-f[0], f[1])]
    a0, an = abs(f[0]), abs(f[-1])
    for p in _SMALL_PRIMES:
        if an % p == 0:
            continue
        fp = [c % p for c in f]
        if not _gfp_is_squarefree(fp, p):
            continue
        break
    else:  # pragma: no cover - needs an astronomically bad polynomial
        raise ArithmeticError("no lucky prime found for rational root search")
    df = [k * c for k, c in enumerate(f)][1:]
    residues = [r for r in range(p) if _zeval(fp, r) % p == 0]
    bound = 2 * a0 * an + 1
    for r in residues:
        mod = p
        x = r
        while mod <= bound:
            mod2 = mod * mod
            fx = _zeval(f, x) % mod2
            dfx = _zeval(df, x) % mod2
            x = (x - fx * pow(dfx, -1, mod2)) % mod2
            mod = mod2
        cand = _ratrecon(x, mod, a0, an)
        if cand is None:
            continue
        num, den = cand.numerator, cand.denominator
        if _zeval_homog(f, num, den) == 0:
            roots.append(cand)
    return roots


def _zeval_homog(f: Sequence[int], num: int, den: int) -> int:
    """den^n * f(num/den) as an integer."""
    n = len(f) - 1
    acc = f[n]
    dpow = 1
    for k in range(n - 1, -1, -1):
        dpow *= den
        acc = acc * num + f[k] * dpow
    return acc


def rational_roots(p: RatPoly) -> tuple[list[Fraction], RatPoly]:
    """All rational roots (with multiplicity, ascending) and the monic rational-root-free cofactor."""
    if p.is_zero():
        raise ValueError("rational roots of the zero polynomial are undefined")
    cof = p.monic()
    if cof.degree <= 0:
        return [], RatPoly([1])
    sqf = squarefree_part(cof)
    distinct = sorted(_distinct_rational_roots(sqf.integer_coeffs()))
    roots: list[Fraction] = []
    for r in distinct:
        lin = RatPoly([-r, 1])
        while True:
            q, rem = divmod(cof, lin)
            if rem:
                break
            roots.append(r)
            cof = q
    return roots, cof.monic()


# ---------------------------------------------------------------------------
# text / JSON formats


def parse_poly(text) -> RatPoly:
    """Parse ``"c0,c1,..."`` (lowest degree first) or a JSON array of coefficients."""
    if isinstance(text, RatPoly):
        return text
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        s = str(text).strip()
        if s.startswith("["):
            try:
                items = json.loads(s.replace("−", "-"))
            except json.JSONDecodeError as exc:
                raise ValueError(f"bad polynomial JSON at position {exc.pos}: {exc.msg}") from None
        else:
            items = [tok for tok in s.split(",")]
    coeffs = []
    for pos, tok in enumerate(items):
        if isinstance(tok, float):
            raise ValueError(f"coefficient {pos} ({tok!r}) must be an integer or an 'n/d' string")
        try:
            coeffs.append(as_fraction(tok))
        except (ValueError, ZeroDivisionError, TypeError):
            raise ValueError(f"bad rational coefficient {tok!r} at position {pos}") from None
    return RatPoly(coeffs)


def format_poly(p: RatPoly) -> str:
    return ",".join(str(c) for c in p.coeffs) if p.coeffs else "0"
