"""Finite fields GF(p^h) with q <= 2**16 and integer-coded elements.

An element sum c_i x^i of F_p[x]/(m) is stored as the integer sum c_i p^i.
Quadratic extensions of a non-prime field use the same packing with the
subfield order as radix, so the subfield sits inside as the codes below q.
Multiplication goes through exp/log tables for a fixed primitive element.
"""
from __future__ import annotations

import functools
import math

import numpy as np

from .errors import DivisionByZero, FieldMismatch, NotPrime, OrderTooLarge

MAX_ORDER = 1 << 16
_ADD_TABLE_LIMIT = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Split q into (p, h) with q == p**h."""
    if q < 2:
        raise NotPrime(f"{q} is not a prime power")
    ps = prime_factors(q)
    if len(ps) != 1:
        raise NotPrime(f"{q} is not a prime power")
    p = ps[0]
    h = round(math.log(q, p))
    while p**h < q:
        h += 1
    while p**h > q:
        h -= 1
    return p, h


class GF:
    """A finite field. Build instances with :func:`field_create`."""

    def __init__(self, p: int, h: int, modulus=(0, 1), base: GF | None = None):
        self.p = p
        self.h = h
        self.q = p**h
        self.base = base
        self.modulus = tuple(int(c) for c in modulus)
        self.degree = len(self.modulus) - 1
        self._radix = base.q if base is not None else p
        self._build_tables()

    # construction -----------------------------------------------------

    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, self._radix)
            out.append(r)
        return out

    def _undigits(self, ds) -> int:
        a = 0
        for d in reversed(ds):
            a = a * self._radix + int(d)
        return a

    def _vdigits(self, A: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        out = np.empty(A.shape + (self.degree,), dtype=np.int64)
        for i in range(self.degree):
            A, out[..., i] = np.divmod(A, self._radix)
        return out

    def _vundigits(self, D: np.ndarray) -> np.ndarray:
        A = np.zeros(D.shape[:-1], dtype=np.int64)
        for i in reversed(range(self.degree)):
            A = A * self._radix + D[..., i]
        return A

    def _slow_mul(self, a: int, b: int) -> int:
        if self.base is None:
            return a * b % self.p
        B, m = self.base, self.degree
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = B.add(prod[i + j], B.mul(x, y))
        for d in range(2 * m - 2, m - 1, -1):
            c = prod[d]
            if c:
                for j in range(m):
                    prod[d - m + j] = B.sub(prod[d - m + j], B.mul(c, self.modulus[j]))
                prod[d] = 0
        return self._undigits(prod[:m])

    def _slow_vmul(self, A: np.ndarray, b: int) -> np.ndarray:
        """Multiply every code in A by the single element b (table bootstrap)."""
        if self.base is None:
            return A * b % self.p
        B, m = self.base, self.degree
        DA = self._vdigits(A)
        db = self._digits(b)
        prod = np.zeros(A.shape + (2 * m - 1,), dtype=np.int64)
        for i in range(m):
            for j, y in enumerate(db):
                if y:
                    prod[..., i + j] = B.vadd(prod[..., i + j], B.vmul(DA[..., i], y))
        for d in range(2 * m - 2, m - 1, -1):
            c = prod[..., d]
            for j in range(m):
                if self.modulus[j]:
                    prod[..., d - m + j] = B.vsub(prod[..., d - m + j], B.vmul(c, self.modulus[j]))
        return self._vundigits(prod[..., :m])

    def _slow_pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._slow_mul(result, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return result

    def _build_tables(self) -> None:
        q = self.q
        if self.base is None and self.degree != 1:
            raise ValueError("prime fields have degree 1")
        # additive structure first: the multiplicative bootstrap needs it
        codes = np.arange(q, dtype=np.int64)
        if self.p == 2:
            self._neg = codes.copy()
        elif self.base is None:
            self._neg = (-codes) % self.p
        else:
            self._neg = self._vundigits(self.base.vneg(self._vdigits(codes)))
        self._neg_list = self._neg.tolist()
        self._add_table = None
        if q <= _ADD_TABLE_LIMIT and self.p != 2 and self.base is not None:
            self._add_table = self._vadd_digits(codes[:, None], codes[None, :])

        factors = prime_factors(q - 1) if q > 2 else []
        for g in range(1, q):
            if all(self._slow_pow(g, (q - 1) // r) != 1 for r in factors):
                break
        self.primitive = g
        exp = np.ones(1, dtype=np.int64)
        while len(exp) < q - 1:
            step = self._slow_mul(int(exp[-1]), g)
            exp = np.concatenate([exp, self._slow_vmul(exp, step)])
        exp = exp[: q - 1]
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        if len(set(exp.tolist())) != q - 1:
            raise RuntimeError("primitive element search failed")
        self._exp = np.concatenate([exp, exp])
        self._log = log
        self._exp_list = self._exp.tolist()
        self._log_list = log.tolist()

    # scalar arithmetic on codes ------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.base is None:
            return (a + b) % self.p
        if self._add_table is not None:
            return int(self._add_table[a, b])
        B = self.base
        return self._undigits([B.add(x, y) for x, y in zip(self._digits(a), self._digits(b))])

    def neg(self, a: int) -> int:
        return self._neg_list[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg_list[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp_list[self._log_list[a] + self._log_list[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return self._exp_list[(self.q - 1 - self._log_list[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e > 0:
                return 0
            if e == 0:
                return 1
            raise DivisionByZero("negative power of zero")
        return self._exp_list[(self._log_list[a] * e) % (self.q - 1)]

    def log(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("log of zero")
        return self._log_list[a]

    def exp(self, i: int) -> int:
        return self._exp_list[i % (self.q - 1)]

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime subfield."""
        return n % self.p

    # vectorized arithmetic on code arrays --------------------------------

    def _vadd_digits(self, A, B):
        A, B = np.broadcast_arrays(np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64))
        return self._vundigits(self.base.vadd(self._vdigits(A), self._vdigits(B)))

    def vadd(self, A, B) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if self.p == 2:
            return A ^ B
        if self.base is None:
            return (A + B) % self.p
        if self._add_table is not None:
            return self._add_table[A, B]
        return self._vadd_digits(A, B)

    def vneg(self, A) -> np.ndarray:
        return self._neg[np.asarray(A, dtype=np.int64)]

    def vsub(self, A, B) -> np.ndarray:
        return self.vadd(A, self.vneg(B))

    def vmul(self, A, B) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        r = self._exp[self._log[A] + self._log[B]]
        return np.where((A == 0) | (B == 0), 0, r)

    def vinv(self, A) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        if np.any(A == 0):
            raise DivisionByZero("inverse of zero")
        return self._exp[(self.q - 1 - self._log[A]) % (self.q - 1)]

    def vpow(self, A, e: int) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        if e < 0:
            return self.vpow(self.vinv(A), -e)
        r = self._exp[(self._log[A] * e) % (self.q - 1)]
        if e == 0:
            return np.ones_like(A)
        return np.where(A == 0, 0, r)

    def matmul(self, A, B) -> np.ndarray:
        """Matrix product over the field of code arrays A (m x k) and B (k x n)."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if A.shape[-1] != B.shape[0]:
            raise ValueError("inner dimensions differ")
        if self.base is None:
            return (A @ B) % self.p
        acc = np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
        for c in range(A.shape[-1]):
            acc = self.vadd(acc, self.vmul(A[..., c, None], B[c]))
        return acc

    def mul_table(self) -> np.ndarray:
        c = np.arange(self.q)
        return self.vmul(c[:, None], c[None, :])

    def add_table(self) -> np.ndarray:
        c = np.arange(self.q)
        return self.vadd(c[:, None], c[None, :])

    # elements -------------------------------------------------------------

    def __call__(self, n: int) -> FieldElement:
        return FieldElement(self, self.from_int(n))

    def element(self, code: int) -> FieldElement:
        return FieldElement(self, code)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, c) for c in range(self.q)]

    def _key(self):
        return (self.p, self.h, self.modulus, None if self.base is None else self.base._key())

    def __eq__(self, other):
        return isinstance(other, GF) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.base is not None and self.base.base is not None:
            return f"GF({self.q}) over GF({self.base.q})"
        return f"GF({self.q})"


class FieldElement:
    __slots__ = ("field", "code")

    def __init__(self, field: GF, code: int):
        code = int(code)
        if not 0 <= code < field.q:
            raise ValueError(f"code {code} out of range for {field!r}")
        self.field = field
        self.code = code

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.field.from_int(int(other))
        return NotImplemented

    def _wrap(self, code):
        return FieldElement(self.field, code)

    def __add__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.add(self.code, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.sub(self.code, b))

    def __rsub__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.sub(b, self.code))

    def __neg__(self):
        return self._wrap(self.field.neg(self.code))

    def __mul__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.div(self.code, b))

    def __rtruediv__(self, other):
        b = self._other(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.field.div(b, self.code))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.code, int(e)))

    def inverse(self) -> FieldElement:
        return self._wrap(self.field.inv(self.code))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == self.field.from_int(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.field._key(), self.code))

    def __int__(self):
        return self.code

    def __index__(self):
        return self.code

    def __repr__(self):
        return f"{self.field!r}[{self.code}]"


# polynomials over a field: coefficient lists of codes, lowest degree first

def poly_trim(f) -> list[int]:
    f = [int(c) for c in f]
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_eval(F: GF, f, x: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = F.add(F.mul(acc, x), c)
    return acc


def poly_eval_all(F: GF, f) -> np.ndarray:
    """Values of f at every field code 0..q-1."""
    xs = np.arange(F.q, dtype=np.int64)
    acc = np.zeros(F.q, dtype=np.int64)
    for c in reversed(f):
        acc = F.vadd(F.vmul(acc, xs), c)
    return acc


def poly_mul(F: GF, f, g) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = F.add(out[i + j], F.mul(a, b))
    return poly_trim(out)


def poly_divmod(F: GF, f, g) -> tuple[list[int], list[int]]:
    g = poly_trim(g)
    if not g:
        raise DivisionByZero("polynomial division by zero")
    r = poly_trim(f)
    inv_lead = F.inv(g[-1])
    quot = [0] * max(len(r) - len(g) + 1, 0)
    while len(r) >= len(g):
        c = F.mul(r[-1], inv_lead)
        shift = len(r) - len(g)
        quot[shift] = c
        for j, b in enumerate(g):
            r[shift + j] = F.sub(r[shift + j], F.mul(c, b))
        r = poly_trim(r)
    return poly_trim(quot), r


def poly_monic(F: GF, f) -> list[int]:
    f = poly_trim(f)
    if not f:
        return f
    inv = F.inv(f[-1])
    return [F.mul(c, inv) for c in f]


def poly_gcd(F: GF, f, g) -> list[int]:
    f, g = poly_trim(f), poly_trim(g)
    while g:
        f, g = g, poly_divmod(F, f, g)[1]
    return poly_monic(F, f)


def poly_powmod(F: GF, f, e: int, m) -> list[int]:
    result = [1]
    base = poly_divmod(F, f, m)[1]
    while e:
        if e & 1:
            result = poly_divmod(F, poly_mul(F, result, base), m)[1]
        base = poly_divmod(F, poly_mul(F, base, base), m)[1]
        e >>= 1
    return result


def has_root(F: GF, f) -> bool:
    return bool(np.any(poly_eval_all(F, f) == 0))


def is_irreducible(F: GF, f) -> bool:
    """Irreducibility over F: root scan up to degree 3, Ben-Or gcd test above."""
    f = poly_trim(f)
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    if has_root(F, f):
        return False
    if d <= 3:
        return True
    f = poly_monic(F, f)
    x = [0, 1]
    xp = x
    for _ in range(d // 2):
        xp = poly_powmod(F, xp, F.q, f)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = F.sub(diff[1], 1)
        if len(poly_gcd(F, f, diff)) > 1:
            return False
    return True


def find_irreducible(F: GF, d: int) -> list[int]:
    """Smallest monic irreducible of degree d over F.

    Candidates X^d + c_{d-1}X^{d-1} + ... + c_0 are ranked by the integer
    sum c_i q^i, so c_{d-1} is the most significant coefficient. Over F_5
    this picks X^2+2 rather than X^2+X+1. Returns (c_0, ..., c_{d-1}, 1).
    """
    if d < 1:
        raise ValueError("degree must be positive")
    for n in range(F.q**d):
        tail = []
        for _ in range(d):
            n, r = divmod(n, F.q)
            tail.append(r)
        if d > 1 and tail[0] == 0:
            continue
        f = tail + [1]
        if is_irreducible(F, f):
            return f
    raise RuntimeError("no irreducible polynomial found")


@functools.lru_cache(maxsize=None)
def _prime_field(p: int) -> GF:
    return GF(p, 1)


@functools.lru_cache(maxsize=None)
def field_create(p: int, h: int = 1) -> GF:
    """The field of order p**h, modulus chosen lex-smallest irreducible."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if h < 1:
        raise ValueError("h must be positive")
    if p**h > MAX_ORDER:
        raise OrderTooLarge(f"{p}^{h} exceeds {MAX_ORDER}")
    prime = _prime_field(p)
    if h == 1:
        return prime
    return GF(p, h, find_irreducible(prime, h), base=prime)


def field_of_order(q: int) -> GF:
    if q > MAX_ORDER:
        raise OrderTooLarge(f"{q} exceeds {MAX_ORDER}")
    return field_create(*prime_power(q))


@functools.lru_cache(maxsize=None)
def quadratic_extension(F: GF) -> GF:
    """F[Y]/(g) with g the lex-smallest monic irreducible quadratic over F.

    Codes a + b*q for a + bY, so elements of F keep their codes.
    """
    if F.q * F.q > MAX_ORDER:
        raise OrderTooLarge(f"{F.q}^2 exceeds {MAX_ORDER}")
    return GF(F.p, 2 * F.h, find_irreducible(F, 2), base=F)
