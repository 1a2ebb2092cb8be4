"""Exact arithmetic in GF(p^h) over a polynomial basis.

Elements are stored as integers ``v = c_0 + c_1 p + ... + c_{h-1} p^{h-1}``
where ``c_i`` is the coefficient of ``t^i`` in the polynomial basis (``t`` is
the class of the indeterminate modulo the field modulus).  That integer is
the element's *index*; it is the encoding used in every export.  The
canonical total order on elements is lexicographic on the coefficient vector
read constant term first, which is generally *not* the numeric order of the
index (see :attr:`Field.rank`).

Scalar arithmetic goes through :class:`FieldElement`; bulk arithmetic on
numpy index arrays goes through the ``v*`` methods of :class:`Field`.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CardinalityCapExceeded,
    DivisionByZero,
    FieldMismatch,
    LambdaDivisibleByCharacteristic,
    LambdaNotDividingGroupOrder,
    NotPrime,
    ReducibleModulus,
    UnsupportedLHS,
)

DEFAULT_CAP = 1 << 16
# dense q x q add/mul tables are built only up to this size
_DENSE_TABLE_MAX = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    return all(n % d for d in range(3, r + 1, 2))


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


# -- polynomials over GF(p), coefficient lists constant term first ----------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_rem(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bc) % p
        _trim(a)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_rem(poly, list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, h: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree ``h`` (constant term first)."""
    for low in itertools.product(range(p), repeat=h):
        cand = tuple(low) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise AssertionError("an irreducible polynomial exists in every degree")


# -- the field ---------------------------------------------------------------

class Field:
    """The finite field GF(p^h) with a fixed polynomial-basis modulus.

    Construct through :func:`make_field`, which validates the parameters and
    caches instances so that equal parameters give the same object.
    """

    def __init__(self, p: int, h: int, modulus: tuple[int, ...]):
        self.p = p
        self.h = h
        self.modulus = tuple(modulus)
        self.q = p ** h
        self._build_tables()

    # identity ---------------------------------------------------------------
    def _key(self):
        return (self.p, self.h, self.modulus)

    def __eq__(self, other):
        return isinstance(other, Field) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Field(p={self.p}, h={self.h}, modulus={list(self.modulus)})"

    def to_dict(self) -> dict:
        return {"p": self.p, "h": self.h, "modulus": list(self.modulus)}

    # table construction -------------------------------------------------------
    def _mulmod_int(self, a: int, b: int) -> int:
        p, h = self.p, self.h
        if h == 1:
            return a * b % p
        ca, cb = self._digits(a), self._digits(b)
        prod = [0] * (2 * h - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % p
        rem = _poly_rem(prod, self.modulus, p)
        return self._undigits(rem)

    def _digits(self, v: int) -> list[int]:
        out = []
        for _ in range(self.h):
            v, r = divmod(v, self.p)
            out.append(r)
        return out

    def _undigits(self, coeffs: Iterable[int]) -> int:
        v, w = 0, 1
        for c in coeffs:
            v += (c % self.p) * w
            w *= self.p
        return v

    def _build_tables(self):
        p, q = self.p, self.q
        self._weights = np.array([p ** i for i in range(self.h)], dtype=np.int64)
        values = np.arange(q, dtype=np.int64)
        digits = (values[:, None] // self._weights[None, :]) % p
        self._digit_table = digits
        # canonical order: lexicographic on (c_0, c_1, ...)
        keys = [tuple(row) for row in digits.tolist()]
        order = sorted(range(q), key=keys.__getitem__)
        self.canonical = np.array(order, dtype=np.int64)
        self.rank = np.empty(q, dtype=np.int64)
        self.rank[self.canonical] = np.arange(q)
        self._neg = ((-digits) % p) @ self._weights
        self._neg_list = self._neg.tolist()

        group = q - 1
        factors = prime_factors(group) if group > 1 else []
        gen = None
        for cand in self.canonical.tolist():
            if cand == 0:
                continue
            if all(self._slow_pow(cand, group // r) != 1 for r in factors):
                gen = cand
                break
        self.generator = gen
        exp = [1] * max(group, 1)
        for i in range(1, group):
            exp[i] = self._mulmod_int(exp[i - 1], gen)
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        self._exp_list = exp
        self._log_list = log
        self._exp = np.array(exp + exp, dtype=np.int64)
        self._log = np.array(log, dtype=np.int64)
        self._add_tab = None
        self._mul_tab = None
        if q <= _DENSE_TABLE_MAX:
            a = values[:, None]
            b = values[None, :]
            self._add_tab = self._vadd_digits(a, b)
            self._mul_tab = self._vmul_log(a, b)

    def _slow_pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._mulmod_int(result, a)
            a = self._mulmod_int(a, a)
            e >>= 1
        return result

    # scalar integer arithmetic ------------------------------------------------
    def iadd(self, a: int, b: int) -> int:
        if self.h == 1:
            return (a + b) % self.p
        if self._add_tab is not None:
            return int(self._add_tab[a, b])
        p, w, s = self.p, 1, 0
        for _ in range(self.h):
            s += ((a % p + b % p) % p) * w
            a //= p
            b //= p
            w *= p
        return s

    def ineg(self, a: int) -> int:
        return self._neg_list[a]

    def isub(self, a: int, b: int) -> int:
        return self.iadd(a, self._neg_list[b])

    def imul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp_list[(self._log_list[a] + self._log_list[b]) % (self.q - 1)]

    def iinv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return self._exp_list[(-self._log_list[a]) % (self.q - 1)]

    def ipow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise DivisionByZero("negative power of zero")
            return 1 if e == 0 else 0
        return self._exp_list[(self._log_list[a] * e) % (self.q - 1)]

    # vectorised arithmetic on index arrays -----------------------------------
    def _vadd_digits(self, a, b):
        p = self.p
        s = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for w in self._weights.tolist():
            s += ((a // w % p + b // w % p) % p) * w
        return s

    def _vmul_log(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vadd(self, a, b):
        if self.h == 1:
            return (np.asarray(a) + np.asarray(b)) % self.p
        if self._add_tab is not None:
            return self._add_tab[a, b]
        return self._vadd_digits(np.asarray(a), np.asarray(b))

    def vneg(self, a):
        return self._neg[a]

    def vsub(self, a, b):
        return self.vadd(a, self._neg[b])

    def vmul(self, a, b):
        if self._mul_tab is not None:
            return self._mul_tab[a, b]
        return self._vmul_log(a, b)

    def vinv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def vpow(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        if e < 0 and np.any(a == 0):
            raise DivisionByZero("negative power of zero")
        out = self._exp[(self._log[a] * e) % (self.q - 1)]
        return np.where(a == 0, 0, out)

    def digits(self, a) -> np.ndarray:
        """Coefficient vectors (constant term first) of an index array; shape ``a.shape + (h,)``."""
        return self._digit_table[a]

    # element access -------------------------------------------------------
    def __call__(self, value) -> "FieldElement":
        return self.element(value)

    def element(self, value) -> "FieldElement":
        """Coerce an index, a coefficient vector or an element into this field."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch(f"{value!r} does not belong to {self!r}")
            return value
        if isinstance(value, (list, tuple)):
            if len(value) > self.h:
                raise ValueError(f"coefficient vector longer than h={self.h}")
            return FieldElement(self, self._undigits(int(c) for c in value))
        if isinstance(value, (int, np.integer)):
            v = int(value)
            if not 0 <= v < self.q:
                raise ValueError(f"index {v} out of range for GF({self.q})")
            return FieldElement(self, v)
        raise TypeError(f"cannot interpret {value!r} as an element of GF({self.q})")

    def from_int(self, n: int) -> "FieldElement":
        """Image of the integer ``n`` under Z -> GF(p)."""
        return FieldElement(self, n % self.p)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> list["FieldElement"]:
        """All elements in canonical order."""
        return [FieldElement(self, v) for v in self.canonical.tolist()]


@dataclass(frozen=True, eq=True)
class FieldElement:
    """An element of GF(p^h), immutable; ``value`` is its index."""

    field: Field
    value: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.field._digits(self.value))

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch("operands belong to different fields")
            return other.value
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return int(other) % self.field.p
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.iadd(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.isub(self.value, b))

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.isub(b, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.ineg(self.value))

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.imul(self.value, b))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.iinv(self.value))

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.imul(self.value, self.field.iinv(b)))

    def __rtruediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.imul(b, self.field.iinv(self.value)))

    def __pow__(self, e: int):
        if self.value == 0 and e < 0:
            raise DivisionByZero("negative power of zero")
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = self.field.one
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def sort_key(self) -> int:
        return int(self.field.rank[self.value])

    def __lt__(self, other: "FieldElement"):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        return f"GF({self.field.q})({list(self.coeffs)})"

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "t" if i == 1 else f"t^{i}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(reversed(terms)) or "0"


@functools.lru_cache(maxsize=None)
def _make_field(p: int, h: int, modulus: tuple[int, ...] | None, cap: int) -> Field:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if h < 1:
        raise ValueError("extension degree h must be >= 1")
    if p ** h > cap:
        raise CardinalityCapExceeded(f"q = {p}^{h} exceeds the enumeration cap {cap}")
    if modulus is None:
        modulus = smallest_irreducible(p, h)
    else:
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != h + 1 or modulus[-1] != 1 or any(not 0 <= c < p for c in modulus):
            raise ReducibleModulus(f"modulus {list(modulus)} is not a monic degree-{h} polynomial over GF({p})")
        if not is_irreducible(modulus, p):
            raise ReducibleModulus(f"modulus {list(modulus)} is reducible over GF({p})")
    return Field(p, h, modulus)


def make_field(p: int, h: int = 1, modulus: Sequence[int] | None = None, cap: int = DEFAULT_CAP) -> Field:
    """Return GF(p^h); without ``modulus`` the lexicographically smallest monic irreducible is used."""
    return _make_field(int(p), int(h), None if modulus is None else tuple(modulus), int(cap))


def field_of_order(q: int, cap: int = DEFAULT_CAP) -> Field:
    """GF(q) for a prime power ``q`` with the default modulus."""
    for p in prime_factors(q)[:1]:
        h = round(math.log(q, p))
        if p ** h == q:
            return make_field(p, h, cap=cap)
    raise NotPrime(f"{q} is not a prime power")


# -- root solving -----------------------------------------------------------

def has_primitive_root_of_unity(field: Field, lam: int) -> bool:
    if lam < 1:
        raise ValueError("lambda must be positive")
    if math.gcd(lam, field.p) != 1:
        raise LambdaDivisibleByCharacteristic(f"gcd({lam}, {field.p}) != 1")
    return (field.q - 1) % lam == 0


@dataclass(frozen=True)
class AdditiveLHS:
    """Left-hand side ``L(y) = y^exponent + sign * y``.

    Only ``y^p - y`` and ``y^e + y`` with ``e`` a power of p are supported.
    """

    exponent: int
    sign: int = -1

    @classmethod
    def artin_schreier(cls, p: int) -> "AdditiveLHS":
        return cls(p, -1)

    @classmethod
    def trace_like(cls, e: int) -> "AdditiveLHS":
        return cls(e, +1)

    def check(self, field: Field) -> None:
        e = self.exponent
        if self.sign == -1:
            if e != field.p:
                raise UnsupportedLHS(f"y^{e} - y is only supported with exponent p = {field.p}")
        elif self.sign == +1:
            k = 0
            while e > 1 and e % field.p == 0:
                e //= field.p
                k += 1
            if e != 1 or k == 0 or k > field.h:
                raise UnsupportedLHS(f"y^{self.exponent} + y needs a power of {field.p} not exceeding q")
        else:
            raise UnsupportedLHS(f"sign must be +1 or -1, got {self.sign}")

    def evaluate(self, field: Field, y):
        """Vectorised ``L(y)`` on an index array."""
        ye = field.vpow(y, self.exponent)
        if self.sign == -1:
            return field.vsub(ye, y)
        return field.vadd(ye, y)

    def __str__(self):
        return f"y^{self.exponent} {'-' if self.sign < 0 else '+'} y"


@dataclass(frozen=True)
class _Preimages:
    """CSR table: solutions of ``map(y) = c`` are ``sols[start[c]:start[c] + count[c]]``."""

    start: np.ndarray
    count: np.ndarray
    sols: np.ndarray


def _preimage_table(field: Field, image: np.ndarray) -> _Preimages:
    ys = field.canonical  # scan in canonical order so each solution list is sorted
    img = image[ys]
    order = np.argsort(img, kind="stable")
    sols = ys[order]
    count = np.bincount(img, minlength=field.q)
    start = np.concatenate(([0], np.cumsum(count)[:-1]))
    return _Preimages(start, count, sols)


@functools.lru_cache(maxsize=None)
def additive_preimages(field: Field, lhs: AdditiveLHS) -> _Preimages:
    lhs.check(field)
    return _preimage_table(field, lhs.evaluate(field, np.arange(field.q)))


@functools.lru_cache(maxsize=None)
def kummer_preimages(field: Field, lam: int) -> _Preimages:
    if not has_primitive_root_of_unity(field, lam):
        raise LambdaNotDividingGroupOrder(f"{lam} does not divide q - 1 = {field.q - 1}")
    return _preimage_table(field, field.vpow(np.arange(field.q), lam))


def _lookup(field: Field, table: _Preimages, c: FieldElement) -> list[FieldElement]:
    c = field.element(c)
    s, n = int(table.start[c.value]), int(table.count[c.value])
    return [FieldElement(field, v) for v in table.sols[s:s + n].tolist()]


def solve_additive(field: Field, lhs: AdditiveLHS, c) -> list[FieldElement]:
    """All ``y`` in the field with ``L(y) = c``, in canonical order (brute-force scan)."""
    return _lookup(field, additive_preimages(field, lhs), c)


def solve_kummer_root(field: Field, lam: int, c) -> list[FieldElement]:
    """All ``y`` with ``y^lam = c``, in canonical order (brute-force scan)."""
    return _lookup(field, kummer_preimages(field, lam), c)


def kernel_size(field: Field, lhs: AdditiveLHS) -> int:
    return int(additive_preimages(field, lhs).count[0])
