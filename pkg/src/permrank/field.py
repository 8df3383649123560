"""Arithmetic in GF(p^m) for odd primes p.

Elements are encoded as integers in ``[0, q)``: the coefficient vector of
the polynomial-basis representation read as a base-p number, least
significant coefficient first.  All array-level routines on
:class:`FieldSpec` operate on these encodings and accept either Python ints
or numpy integer arrays (broadcasting as numpy does).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

MAX_ORDER = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a by the monic polynomial b (coefficients low first)."""
    a = _trim(list(a))
    db = len(b) - 1
    while len(a) - 1 >= db:
        c = a[-1]
        shift = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return a


def _poly_mulmod(a: list[int], b: list[int], modulus: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_mod(out, modulus, p)


def _digits(x: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        out.append(x % p)
        x //= p
    return out


def _undigits(d: list[int], p: int) -> int:
    x = 0
    for c in reversed(d):
        x = x * p + c
    return x


def _is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    m = len(poly) - 1
    if m <= 1:
        return m == 1
    if poly[0] == 0:
        return False
    # a root in GF(p) is the cheap common failure
    for r in range(p):
        if sum(c * pow(r, i, p) for i, c in enumerate(poly)) % p == 0:
            return False
    for deg in range(2, m // 2 + 1):
        for low in range(p**deg):
            divisor = _digits(low, p, deg) + [1]
            if not _poly_mod(poly, divisor, p):
                return False
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _poly_pow(a: list[int], e: int, modulus: list[int], p: int) -> list[int]:
    result = [1]
    while e:
        if e & 1:
            result = _poly_mulmod(result, a, modulus, p)
        a = _poly_mulmod(a, a, modulus, p)
        e >>= 1
    return result


def _find_generator(p: int, m: int, modulus: list[int]) -> int:
    """Least encoding whose multiplicative order is q - 1."""
    q1 = p**m - 1
    factors = _prime_factors(q1)
    for g in range(1, p**m):
        gd = _digits(g, p, m)
        if all(_trim(_poly_pow(gd, q1 // r, modulus, p)) != [1] for r in factors):
            return g
    raise AssertionError("multiplicative group has no generator")


def _power_table(g: int, p: int, m: int, modulus: list[int]) -> list[int]:
    gd = _digits(g, p, m)
    out = [1]
    cur = [1]
    for _ in range(p**m - 2):
        cur = _poly_mulmod(cur, gd, modulus, p)
        out.append(_undigits(cur + [0] * (m - len(cur)), p))
    return out


def least_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible polynomial of degree m.

    Candidates ``x^m + c_{m-1} x^{m-1} + ... + c_0`` are ordered by the
    integer ``sum c_i p^i``, i.e. lexicographically on ``(c_{m-1}, ..., c_0)``.
    For m = 1 this is ``x``.
    """
    for low in range(p**m):
        poly = _digits(low, p, m) + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError(f"no irreducible polynomial of degree {m} over GF({p})")


@dataclass(frozen=True)
class FieldSpec:
    """The field GF(p^m) with a fixed reduction polynomial.

    Construct through :func:`field_new` (or :func:`field_from_order`), which
    validates the parameters and caches instances.
    """

    p: int
    m: int
    modulus: tuple[int, ...]
    _exp: np.ndarray = field(init=False, repr=False, compare=False)
    _log: np.ndarray = field(init=False, repr=False, compare=False)
    _neg: np.ndarray = field(init=False, repr=False, compare=False)
    _digit_table: np.ndarray = field(init=False, repr=False, compare=False)
    _powers: np.ndarray = field(init=False, repr=False, compare=False)
    _exp_list: list = field(init=False, repr=False, compare=False)
    _log_list: list = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        p, m, q = self.p, self.m, self.q
        mod = list(self.modulus)
        exp = _power_table(_find_generator(p, m, mod), p, m, mod)
        log = [-1] * q
        for i, code in enumerate(exp):
            log[code] = i
        exp_arr = np.array(exp + exp, dtype=np.int64)
        log_arr = np.array(log, dtype=np.int64)
        digit_table = np.array([_digits(x, p, m) for x in range(q)], dtype=np.int64).reshape(q, m)
        powers = p ** np.arange(m, dtype=np.int64)
        neg = ((-digit_table) % p) @ powers
        for name, value in (
            ("_exp", exp_arr),
            ("_log", log_arr),
            ("_neg", neg),
            ("_digit_table", digit_table),
            ("_powers", powers),
            ("_exp_list", exp + exp),
            ("_log_list", log),
        ):
            if isinstance(value, np.ndarray):
                value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __reduce__(self):
        return (field_new, (self.p, self.m))

    def __repr__(self) -> str:
        return f"GF({self.q})" if self.m == 1 else f"GF({self.p}^{self.m})"

    @property
    def q(self) -> int:
        return self.p**self.m

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def __call__(self, x: int) -> FieldElement:
        """Element from an encoding; negative ``-c`` means the negation of ``c``.

        For encodings below p this coincides with the integer embedding, so
        ``F(-1)`` is minus one in every field.
        """
        x = int(x)
        if 0 <= x < self.q:
            return FieldElement(self, x)
        if -self.q < x < 0:
            return FieldElement(self, int(self._neg[-x]))
        raise ValueError(f"{x} is not an element encoding of {self}")

    def from_int(self, n: int) -> int:
        """Encoding of the integer n viewed in the prime subfield."""
        return int(n) % self.p

    def encode(self, values) -> np.ndarray:
        """Array of encodings from ints, allowing ``-c`` for negation of c."""
        arr = np.asarray(values, dtype=np.int64)
        if arr.size and (arr.min() <= -self.q or arr.max() >= self.q):
            raise ValueError(f"entries out of range for {self}")
        return np.where(arr < 0, self._neg[np.abs(arr)], arr)

    # -- coefficient vectors ------------------------------------------------
    def digits(self, a) -> np.ndarray:
        """Coefficient vectors, shape ``a.shape + (m,)``."""
        a = np.asarray(a, dtype=np.int64)
        if self.m == 1:
            return a[..., None]
        return self._digit_table[a]

    def from_digits(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=np.int64) % self.p
        if self.m == 1:
            return d[..., 0]
        return d @ self._powers

    # -- arithmetic -----------------------------------------------------------
    def add(self, a, b):
        p = self.p
        if type(a) is int and type(b) is int:
            if self.m == 1:
                return (a + b) % p
            s = 0
            f = 1
            for _ in range(self.m):
                s += ((a % p + b % p) % p) * f
                a //= p
                b //= p
                f *= p
            return s
        if self.m == 1:
            return _scalarize((np.asarray(a) + np.asarray(b)) % p)
        return _scalarize(self.from_digits(self.digits(a) + self.digits(b)))

    def neg(self, a):
        if type(a) is int:
            return (-a) % self.p if self.m == 1 else int(self._neg[a])
        return _scalarize(self._neg[np.asarray(a, dtype=np.int64)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        q1 = self.q - 1
        if type(a) is int and type(b) is int:
            if self.m == 1:
                return a * b % self.p
            if a == 0 or b == 0:
                return 0
            return self._exp_list[self._log_list[a] + self._log_list[b]]
        if self.m == 1:
            return _scalarize(np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64) % self.p)
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self._exp[(self._log[a] + self._log[b]) % q1]
        return _scalarize(np.where((a == 0) | (b == 0), 0, out))

    def inv(self, a):
        q1 = self.q - 1
        if type(a) is int:
            if a == 0:
                raise ZeroDivisionError(f"inverse of 0 in {self}")
            return self._exp_list[(q1 - self._log_list[a]) % q1]
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError(f"inverse of 0 in {self}")
        return _scalarize(self._exp[(q1 - self._log[a]) % q1])

    def pow(self, a, e: int):
        e = int(e)
        q1 = self.q - 1
        if e < 0:
            return self.pow(self.inv(a), -e)
        if type(a) is int:
            if a == 0:
                return 1 if e == 0 else 0
            return self._exp_list[self._log_list[a] * e % q1]
        a = np.asarray(a, dtype=np.int64)
        out = self._exp[(self._log[a] * (e % q1)) % q1]
        if e == 0:
            return _scalarize(np.ones_like(a))
        return _scalarize(np.where(a == 0, 0, out))

    def sum(self, a, axis=None):
        """Field sum of array entries along ``axis``."""
        a = np.asarray(a, dtype=np.int64)
        if self.m == 1:
            return _scalarize(a.sum(axis=axis) % self.p)
        d = self.digits(a)
        if axis is None:
            d = d.reshape(-1, self.m)
            axis = 0
        elif axis < 0:
            axis = a.ndim + axis
        return _scalarize(self.from_digits(d.sum(axis=axis)))

    def prod(self, a, axis=None):
        """Field product of array entries along ``axis`` (empty product is 1)."""
        a = np.asarray(a, dtype=np.int64)
        logs = self._log[a]
        zero = (a == 0).any(axis=axis)
        out = self._exp[logs.sum(axis=axis) % (self.q - 1)]
        return _scalarize(np.where(zero, 0, out))

    def dot(self, a, b) -> np.ndarray:
        """Matrix product over the field."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a @ b) % self.p
        if a.ndim == 1:
            return self.dot(a[None, :], b)[0]
        if b.ndim == 1:
            return self.dot(a, b[:, None])[..., 0]
        return self.sum(self.mul(a[..., :, :, None], b[..., None, :, :]), axis=-2)

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)


def _scalarize(x):
    if isinstance(x, np.ndarray) and x.ndim == 0:
        return int(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


@dataclass(frozen=True)
class FieldElement:
    """A single element of a :class:`FieldSpec`, stored by its encoding."""

    spec: FieldSpec
    value: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.spec.q:
            raise ValueError(f"{self.value} is not an element encoding of {self.spec}")

    @property
    def coefficients(self) -> tuple[int, ...]:
        return tuple(_digits(self.value, self.spec.p, self.spec.m))

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise ValueError(f"cannot combine elements of {self.spec} and {other.spec}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return self.spec(int(other)).value
        return NotImplemented

    def _wrap(self, v: int) -> FieldElement:
        return FieldElement(self.spec, v)

    def __add__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.sub(b, self.value))

    def __mul__(self, other):
        b = self._coerce(other)
        return NotImplemented if b is NotImplemented else self._wrap(self.spec.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self._wrap(self.spec.mul(self.value, self.spec.inv(b)))

    def __neg__(self):
        return self._wrap(self.spec.neg(self.value))

    def __pow__(self, e: int):
        return self._wrap(self.spec.pow(self.value, e))

    def inverse(self) -> FieldElement:
        return self._wrap(self.spec.inv(self.value))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.value == other.value
        if isinstance(other, (int, np.integer)):
            try:
                return self.spec(int(other)).value == self.value
            except ValueError:
                return False
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.spec.p, self.spec.m, self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.spec!r}({self.value})"


@functools.lru_cache(maxsize=None)
def field_new(p: int, m: int = 1) -> FieldSpec:
    """Return GF(p^m) with the lexicographically least reduction polynomial.

    Raises ValueError for p = 2, non-prime p, m < 1, or orders above
    ``MAX_ORDER`` (the log/antilog tables would be too large).
    """
    p, m = int(p), int(m)
    if p == 2:
        raise ValueError("even characteristic unsupported")
    if not is_prime(p):
        raise ValueError(f"characteristic {p} is not prime")
    if m < 1:
        raise ValueError(f"extension degree must be >= 1, got {m}")
    if p**m > MAX_ORDER:
        raise ValueError(f"field order {p}^{m} exceeds {MAX_ORDER}")
    return FieldSpec(p, m, least_irreducible(p, m))


def field_from_order(q: int) -> FieldSpec:
    """Factor q = p^m and return :func:`field_new` (p, m)."""
    q = int(q)
    if q < 3:
        raise ValueError(f"no odd-characteristic field of order {q}")
    if q % 2 == 0:
        raise ValueError("even characteristic unsupported")
    p = next(f for f in range(3, q + 1, 2) if q % f == 0)
    m = 0
    r = q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return field_new(p, m)


def enumerate_field(spec: FieldSpec) -> list[FieldElement]:
    """All q elements in encoding order (0 first, 1 second)."""
    return [FieldElement(spec, v) for v in range(spec.q)]
