"""Exact arithmetic in F_q (q = p^s, p > 3) and in small extensions of it.

A field is a :class:`GF` instance; elements are :class:`FieldElement` values
holding a packed integer.  The packing is little-endian in the base field:
an element ``c_0 + c_1 x + ... + c_{d-1} x^{d-1}`` of ``base[x]/(f)`` is stored
as ``sum c_i * |base|**i``.  For F_q over F_p this is exactly the JSON
encoding ``sum coeffs[i] * p**i``; for F_{q^2} = F_q(beta) it is ``c0 + c1*q``.

Integer order of packed values coincides with lexicographic order of the
coefficient vectors read most-significant first, which is the canonical
element ordering used wherever a deterministic choice is needed.

Besides scalar elements, every prime field and every extension of a prime
field exposes vectorised ``v*`` operations on numpy arrays of packed values;
the geometry verifiers run on those.
"""
from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParameters, NotInMu, ZeroInput

# Extension fields with at most this many elements get log/exp tables.
TABLE_LIMIT = 1 << 18


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    # deterministic for n < 3.3e24
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


# --- polynomials over a field, as lists of packed values (low degree first) ---

def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj:
                out[i + j] = F._add(out[i + j], F._mul(ai, bj))
    return _ptrim(out)


def _pmod(F: GF, a: Sequence[int], f: Sequence[int]) -> list[int]:
    a = list(a)
    _ptrim(a)
    df = len(f) - 1
    lead_inv = F._inv(f[-1])
    while len(a) - 1 >= df:
        c = F._mul(a[-1], lead_inv)
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            if fi:
                a[shift + i] = F._sub(a[shift + i], F._mul(c, fi))
        _ptrim(a)
    return a


def _ppowmod(F: GF, a: Sequence[int], e: int, f: Sequence[int]) -> list[int]:
    result = [1]
    base = _pmod(F, a, f)
    while e:
        if e & 1:
            result = _pmod(F, _pmul(F, result, base), f)
        base = _pmod(F, _pmul(F, base, base), f)
        e >>= 1
    return result


def _pgcd(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod(F, a, b)
    return a


def is_irreducible(F: GF, f: Sequence[int]) -> bool:
    """Ben-Or test for a monic polynomial f over F (list low degree first)."""
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    xq = x
    for _ in range(d // 2):
        xq = _ppowmod(F, xq, F.order, f)
        diff = list(xq) + [0] * max(0, 2 - len(xq))
        diff[1] = F._sub(diff[1], 1)
        if len(_pgcd(F, f, _ptrim(diff))) != 1:
            return False
    return True


def least_irreducible(F: GF, degree: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible polynomial of given degree.

    Non-leading coefficients are enumerated as base-|F| digits of a counter,
    so the counter order equals most-significant-first lexicographic order.
    """
    Q = F.order
    for k in range(Q ** degree):
        coeffs = []
        for _ in range(degree):
            k, c = divmod(k, Q)
            coeffs.append(c)
        f = coeffs + [1]
        if degree > 1 and f[0] == 0:
            continue
        if is_irreducible(F, f):
            return tuple(f)
    raise InvalidParameters(f"no irreducible polynomial of degree {degree}")


class GF:
    """A finite field: prime F_p, or ``base[x]/(modulus)``.

    Use :meth:`prime_power` for F_{p^s} and :meth:`extension` /
    :func:`quadratic_extension` for fields over a non-prime base.
    """

    def __init__(self, p: int, base: GF | None = None,
                 modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise InvalidParameters(f"{p} is not prime")
        self.p = p
        self.base = base
        if base is None:
            self.modulus: tuple[int, ...] = ()
            self.degree = 1
            self.order = p
            self.s = 1
        else:
            modulus = tuple(int(c) for c in modulus)
            if modulus[-1] != 1 or len(modulus) < 2:
                raise InvalidParameters("modulus must be monic of degree >= 1")
            self.modulus = modulus
            self.degree = len(modulus) - 1
            self.order = base.order ** self.degree
            self.s = base.s * self.degree
        self._exp: list[int] | None = None
        self._log: dict[int, int] | None = None
        # set by quadratic_extension
        self.beta: FieldElement | None = None
        self.beta_sq: FieldElement | None = None
        if base is not None and self.order <= TABLE_LIMIT:
            self._build_tables()

    # --- constructors ---

    @classmethod
    def prime_power(cls, p: int, s: int = 1, modulus: Sequence[int] | None = None) -> GF:
        if p <= 3:
            raise InvalidParameters("characteristic must exceed 3")
        if s < 1:
            raise InvalidParameters("s must be positive")
        prime = cls(p)
        if s == 1:
            return prime
        if modulus is None:
            modulus = least_irreducible(prime, s)
        elif len(modulus) != s + 1 or not is_irreducible(prime, list(modulus)):
            raise InvalidParameters("modulus is not a monic irreducible of degree s")
        return cls(p, prime, modulus)

    @classmethod
    def extension(cls, base: GF, degree: int, modulus: Sequence[int] | None = None) -> GF:
        if degree == 1 and modulus is None:
            return base
        if modulus is None:
            modulus = least_irreducible(base, degree)
        elif not is_irreducible(base, list(modulus)):
            raise InvalidParameters("extension modulus is reducible")
        return cls(base.p, base, modulus)

    # --- packing ---

    @property
    def q(self) -> int:
        return self.order

    def digits(self, v: int) -> list[int]:
        Q = self.base.order
        out = []
        for _ in range(self.degree):
            v, c = divmod(v, Q)
            out.append(c)
        return out

    def pack(self, digits: Iterable[int]) -> int:
        Q = self.base.order
        v = 0
        for c in reversed(list(digits)):
            v = v * Q + c
        return v

    # --- scalar arithmetic on packed ints ---

    def _add(self, a: int, b: int) -> int:
        if self.base is None:
            return (a + b) % self.p
        B = self.base
        return self.pack(B._add(x, y) for x, y in zip(self.digits(a), self.digits(b)))

    def _neg(self, a: int) -> int:
        if self.base is None:
            return -a % self.p
        B = self.base
        return self.pack(B._neg(x) for x in self.digits(a))

    def _sub(self, a: int, b: int) -> int:
        return self._add(a, self._neg(b))

    def _mul_poly(self, a: int, b: int) -> int:
        prod = _pmul(self.base, self.digits(a), self.digits(b))
        r = _pmod(self.base, prod, self.modulus)
        return self.pack(r + [0] * (self.degree - len(r)))

    def _mul(self, a: int, b: int) -> int:
        if self.base is None:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]
        return self._mul_poly(a, b)

    def _inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.base is None:
            return pow(a, -1, self.p)
        if self._exp is not None:
            return self._exp[-self._log[a] % (self.order - 1)]
        return self._pow(a, self.order - 2)

    def _pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self._inv(a), -e
        if self.base is None:
            return pow(a, e, self.p)
        if self._exp is not None:
            if a == 0:
                return 0 if e else 1
            return self._exp[self._log[a] * e % (self.order - 1)]
        result = 1
        while e:
            if e & 1:
                result = self._mul(result, a)
            a = self._mul(a, a)
            e >>= 1
        return result

    def _element_order(self, a: int) -> int:
        n = self.order - 1
        order = n
        for r in prime_factors(n):
            while order % r == 0 and self._pow(a, order // r) == 1:
                order //= r
        return order

    def _build_tables(self) -> None:
        n = self.order - 1
        factors = prime_factors(n)
        g = next(v for v in range(1, self.order)
                 if all(self._pow_slow(v, n // r) != 1 for r in factors))
        exp = [1] * (n + 1)
        for i in range(1, n + 1):
            exp[i] = self._mul_poly(exp[i - 1], g)
        self._exp = exp
        self._log = {v: i for i, v in enumerate(exp[:n])}
        self._primitive = g

    def _pow_slow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._mul_poly(result, a)
            a = self._mul_poly(a, a)
            e >>= 1
        return result

    # --- elements ---

    def __call__(self, value: int) -> FieldElement:
        value = int(value)
        if not 0 <= value < self.order:
            raise InvalidParameters(f"packed value {value} outside [0, {self.order})")
        return FieldElement(self, value)

    def from_int(self, n: int) -> FieldElement:
        """The image of the integer n under Z -> F."""
        return FieldElement(self, n % self.p)

    def embed(self, x: FieldElement) -> FieldElement:
        """Map an element of the base field into this field."""
        if x.field is not self.base:
            raise InvalidParameters("element is not from the base field")
        return FieldElement(self, x.value)

    def from_components(self, comps: Sequence[FieldElement | int]) -> FieldElement:
        vals = [c.value if isinstance(c, FieldElement) else int(c) for c in comps]
        vals += [0] * (self.degree - len(vals))
        return FieldElement(self, self.pack(vals))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, v) for v in range(self.order)]

    def primitive_element(self) -> FieldElement:
        """Least element (canonical order) generating the multiplicative group."""
        if self._exp is not None:
            return FieldElement(self, self._primitive)
        n = self.order - 1
        factors = prime_factors(n)
        for v in range(1, self.order):
            if all(self._pow(v, n // r) != 1 for r in factors):
                return FieldElement(self, v)
        raise AssertionError("unreachable: every finite field has a primitive element")

    def descriptor(self) -> dict:
        """JSON field descriptor; the modulus is omitted for prime fields."""
        if self.base is None:
            return {"p": self.p, "s": 1}
        if self.base.base is not None:
            return {"base": self.base.descriptor(), "degree": self.degree,
                    "modulus": list(self.modulus)}
        return {"p": self.p, "s": self.s, "modulus": list(self.modulus)}

    def __repr__(self) -> str:
        if self.base is None:
            return f"GF({self.p})"
        return f"GF({self.order}; base={self.base!r}, modulus={self.modulus})"

    # --- vectorised arithmetic (prime fields and extensions of them) ---

    def _require_vector(self) -> None:
        if self.base is not None and (self.base.base is not None or self._exp is None):
            raise NotImplementedError("vector arithmetic needs a prime base and tables")

    @cached_property
    def _pow_p(self) -> np.ndarray:
        return self.p ** np.arange(self.degree, dtype=np.int64)

    def _vdigits(self, a: np.ndarray) -> np.ndarray:
        return (a[..., None] // self._pow_p) % self.p

    def vadd(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.base is None:
            return (a + b) % self.p
        self._require_vector()
        return (((self._vdigits(a) + self._vdigits(b)) % self.p) * self._pow_p).sum(-1)

    def vneg(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if self.base is None:
            return (-a) % self.p
        self._require_vector()
        return (((-self._vdigits(a)) % self.p) * self._pow_p).sum(-1)

    def vsub(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.base is None:
            return (a - b) % self.p
        return self.vadd(a, self.vneg(b))

    @cached_property
    def _log_arr(self) -> np.ndarray:
        arr = np.zeros(self.order, dtype=np.int64)
        for v, i in self._log.items():
            arr[v] = i
        return arr

    @cached_property
    def _exp_arr(self) -> np.ndarray:
        return np.asarray(self._exp[:-1], dtype=np.int64)

    def vmul(self, a, b) -> np.ndarray:
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.base is None:
            return (a * b) % self.p
        self._require_vector()
        out = self._exp_arr[(self._log_arr[a] + self._log_arr[b]) % (self.order - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    @cached_property
    def inv_table(self) -> np.ndarray:
        """inv_table[v] = 1/v, with inv_table[0] = 0 as a sentinel."""
        if self.base is None:
            return np.array([0] + [pow(v, -1, self.p) for v in range(1, self.p)],
                            dtype=np.int64)
        self._require_vector()
        t = self._exp_arr[(-self._log_arr) % (self.order - 1)]
        t[0] = 0
        return t

    def vinv(self, a) -> np.ndarray:
        return self.inv_table[np.asarray(a, dtype=np.int64)]

    @cached_property
    def square_table(self) -> np.ndarray:
        """Boolean table: square_table[v] is True iff v is a non-zero square."""
        t = np.zeros(self.order, dtype=bool)
        x = np.arange(1, self.order, dtype=np.int64)
        t[self.vmul(x, x)] = True
        return t


class FieldElement:
    """An element of a :class:`GF`; immutable, hashable, totally ordered."""

    __slots__ = ("field", "value")

    def __init__(self, field: GF, value: int):
        self.field = field
        self.value = value

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is self.field:
                return other.value
            if other.field is self.field.base:
                return other.value
            raise TypeError(f"cannot mix {other.field!r} and {self.field!r}")
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field._add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field._sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field._sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field._mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field._mul(self.value, self.field._inv(o)))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field._mul(o, self.field._inv(self.value)))

    def __neg__(self):
        return FieldElement(self.field, self.field._neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field._pow(self.value, e))

    def inverse(self) -> FieldElement:
        return FieldElement(self.field, self.field._inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field is other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((id(self.field), self.value))

    def __lt__(self, other: FieldElement):
        return self.value < other.value

    def __le__(self, other: FieldElement):
        return self.value <= other.value

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        if self.field.base is None:
            return f"{self.value}"
        return f"{self.field.order}:{self.coeffs}"

    @property
    def coeffs(self) -> tuple[int, ...]:
        """Coefficient digits over the base field (little-endian packed values)."""
        if self.field.base is None:
            return (self.value,)
        return tuple(self.field.digits(self.value))

    def components(self) -> tuple[FieldElement, ...]:
        B = self.field.base
        if B is None:
            return (self,)
        return tuple(FieldElement(B, c) for c in self.field.digits(self.value))

    @property
    def c0(self) -> FieldElement:
        return self.components()[0]

    @property
    def c1(self) -> FieldElement:
        return self.components()[1]

    def in_base(self) -> bool:
        """True iff the element lies in the base field (all higher digits zero)."""
        return self.field.base is not None and self.value < self.field.base.order

    def to_base(self) -> FieldElement:
        if not self.in_base():
            raise InvalidParameters(f"{self!r} does not lie in the base field")
        return FieldElement(self.field.base, self.value)

    def encode(self):
        """JSON encoding: int for F_q, [c0, c1] for a quadratic extension."""
        if self.field.beta is not None:
            return list(self.coeffs)
        return self.value


# --- the quadratic extension F_q(beta) and the group mu_{q+1} ---

def is_square(x: FieldElement) -> bool:
    """Euler's criterion; zero is rejected rather than classified."""
    if x.value == 0:
        raise ZeroInput("zero is neither a square nor a non-square here")
    F = x.field
    return F._pow(x.value, (F.order - 1) // 2) == 1


def find_nonsquare(F: GF) -> FieldElement:
    """Least non-square of F in the canonical element order."""
    if F.order % 2 == 0:
        raise InvalidParameters("field order must be odd")
    e = (F.order - 1) // 2
    for v in range(1, F.order):
        if F._pow(v, e) != 1:
            return FieldElement(F, v)
    raise AssertionError("unreachable for odd q")


def sqrt(x: FieldElement) -> FieldElement:
    """A square root of x (Tonelli-Shanks); the smaller of the two roots."""
    F = x.field
    if x.value == 0:
        return x
    if not is_square(x):
        raise InvalidParameters(f"{x!r} is not a square")
    n = F.order - 1
    s, Q = 0, n
    while Q % 2 == 0:
        Q //= 2
        s += 1
    z = find_nonsquare(F)
    M, c, t, r = s, z ** Q, x ** Q, x ** ((Q + 1) // 2)
    while t != F.one:
        i, t2 = 0, t
        while t2 != F.one:
            t2 = t2 * t2
            i += 1
        b = c ** (1 << (M - i - 1))
        M, c = i, b * b
        t, r = t * c, r * b
    return min(r, -r)


def quadratic_extension(Fq: GF, beta_sq: FieldElement | int | None = None) -> GF:
    """F_{q^2} = F_q(beta) with beta^2 = beta_sq (default: least non-square).

    The returned field carries ``beta`` and ``beta_sq`` attributes.
    """
    if beta_sq is None:
        n = find_nonsquare(Fq)
    elif isinstance(beta_sq, FieldElement):
        n = beta_sq
    else:
        n = Fq(beta_sq)
    if n.value == 0 or is_square(n):
        raise InvalidParameters(f"beta^2 = {n!r} must be a non-square of F_q")
    F2 = GF(Fq.p, Fq, (Fq._neg(n.value), 0, 1))
    F2.beta_sq = n
    F2.beta = F2.from_components([0, 1])
    return F2


def mu_generator(F2: GF) -> FieldElement:
    """Generator of mu_{q+1}: the least primitive element of F_{q^2} to the (q-1)."""
    q = F2.base.order
    return F2.primitive_element() ** (q - 1)


def in_mu(v: FieldElement) -> bool:
    q = v.field.base.order
    return v.value != 0 and (v ** (q + 1)) == v.field.one


def is_mth_power_in_mu(v: FieldElement, m: int) -> bool:
    """True iff v = w^m for some w in mu_{q+1}."""
    q = v.field.base.order
    if not in_mu(v):
        raise NotInMu(f"{v!r} is not in mu_{q + 1}")
    if m <= 0 or (q + 1) % m:
        raise InvalidParameters(f"m = {m} does not divide q+1 = {q + 1}")
    return v ** ((q + 1) // m) == v.field.one


def multiplicative_order(x: FieldElement) -> int:
    if x.value == 0:
        raise ZeroInput("zero has no multiplicative order")
    return x.field._element_order(x.value)
