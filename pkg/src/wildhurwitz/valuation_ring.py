"""Truncated arithmetic in ramified discrete valuation rings.

Two coefficient regimes are supported:

* ``Mode.MIXED``: ``Z_p[pi]`` with ``pi**N == p`` (so ``pi`` is an ``N``-th
  root of ``p``), known modulo ``pi**M``.
* ``Mode.EQUAL``: ``F_p[[t**(1/N)]]`` with ``pi = t**(1/N)``, known modulo
  ``pi**M``.

Elements are presented as little-endian digit sequences: digit ``q`` is the
coefficient of ``pi**q`` and lies in ``[0, p)``.  In the mixed regime an
overflow of ``p`` at position ``q`` carries to position ``q + N``; in the
equal regime digits are reduced mod ``p`` without carry.

Internally a mixed element is stored as ``N`` integers ``c_s`` with
``x = sum(c_s * pi**s)``, which is exactly the carry rule in disguise (digit
``s + N*k`` is the ``k``-th base-``p`` digit of ``c_s``).

Every equality is *equality at precision M*: an element whose digits all
vanish is "zero at precision", and its valuation is reported as ``None``
(bottom) rather than infinity, keeping infinity free for earnestness degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import IncompatibleRamification, NotAUnit, SchemaError, SpecMismatch

INF = math.inf
"""Distinguished value ``r = infinity`` (ordered above every rational)."""

RationalLike = Union[Fraction, int, float]


class Mode(str, Enum):
    MIXED = "mixed"
    EQUAL = "equal"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def nu_p(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("nu_p(0) is infinite")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def parse_rational(value) -> RationalLike:
    """Parse ``"1/2"``, ``"inf"``, ints or Fractions into a Fraction or ``INF``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SchemaError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if value == INF:
            return INF
        raise SchemaError(f"floats are not exact rationals: {value!r}")
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "oo", "∞"):
            return INF
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"not a rational: {value!r}") from exc
    raise SchemaError(f"not a rational: {value!r}")


def format_rational(value) -> str:
    if value == INF:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class RingSpec:
    """Coefficient ring: prime ``p``, regime, ramification ``N``, precision ``M``."""

    p: int
    mode: Mode = Mode.MIXED
    N: int = 1
    M: int = 16

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.N < 1 or self.M < 1:
            raise ValueError("N and M must be positive")

    @property
    def is_mixed(self) -> bool:
        return self.mode is Mode.MIXED

    def to_json(self) -> dict:
        return {"p": self.p, "mode": self.mode.value, "N": self.N, "M": self.M}

    @classmethod
    def from_json(cls, data: dict) -> "RingSpec":
        try:
            return cls(int(data["p"]), Mode(data.get("mode", "mixed")),
                       int(data.get("N", 1)), int(data.get("M", 16)))
        except KeyError as exc:
            raise SchemaError(f"spec: missing field {exc}") from exc
        except ValueError as exc:
            raise SchemaError(f"spec: {exc}") from exc


def _mixed_moduli(spec: RingSpec) -> tuple[int, ...]:
    # c_s carries the digits at positions s, s+N, s+2N, ... below M
    return tuple(spec.p ** max(0, -(-(spec.M - s) // spec.N)) for s in range(spec.N))


_MODULI_CACHE: dict[RingSpec, tuple[int, ...]] = {}


def _moduli(spec: RingSpec) -> tuple[int, ...]:
    mods = _MODULI_CACHE.get(spec)
    if mods is None:
        mods = _MODULI_CACHE[spec] = _mixed_moduli(spec)
    return mods


class RingElement:
    """Immutable truncated element of a ``RingSpec`` ring."""

    __slots__ = ("spec", "_rep", "_digits")

    def __init__(self, spec: RingSpec, rep: tuple[int, ...]):
        # rep is assumed normalized; use make() from outside
        self.spec = spec
        self._rep = rep
        self._digits = None

    # construction -------------------------------------------------------
    @classmethod
    def make(cls, spec: RingSpec, digits: Sequence[int]) -> "RingElement":
        if len(digits) > spec.M:
            raise ValueError(f"{len(digits)} digits exceed precision M={spec.M}")
        p, N = spec.p, spec.N
        if spec.is_mixed:
            mods = _moduli(spec)
            rep = []
            for s in range(N):
                c = 0
                for k, d in enumerate(digits[s::N]):
                    c += d * p ** k
                rep.append(c % mods[s])
            return cls(spec, tuple(rep))
        rep = [d % p for d in digits] + [0] * (spec.M - len(digits))
        return cls(spec, tuple(rep))

    @classmethod
    def from_int(cls, spec: RingSpec, n: int) -> "RingElement":
        if spec.is_mixed:
            mods = _moduli(spec)
            return cls(spec, (n % mods[0],) + (0,) * (spec.N - 1))
        return cls(spec, (n % spec.p,) + (0,) * (spec.M - 1))

    @classmethod
    def zero(cls, spec: RingSpec) -> "RingElement":
        return cls.from_int(spec, 0)

    @classmethod
    def one(cls, spec: RingSpec) -> "RingElement":
        return cls.from_int(spec, 1)

    @classmethod
    def uniformizer(cls, spec: RingSpec) -> "RingElement":
        return cls.pi_power(spec, 1)

    @classmethod
    def pi_power(cls, spec: RingSpec, q: int) -> "RingElement":
        """``pi**q`` for an integer ``q >= 0`` (zero at precision once q >= M)."""
        if q < 0:
            raise ValueError("negative power of the uniformizer")
        if q >= spec.M:
            return cls.zero(spec)
        digits = [0] * (q + 1)
        digits[q] = 1
        return cls.make(spec, digits)

    # views ----------------------------------------------------------------
    @property
    def digits(self) -> tuple[int, ...]:
        if self._digits is None:
            spec = self.spec
            if not spec.is_mixed:
                self._digits = self._rep
            else:
                p, N = spec.p, spec.N
                out = [0] * spec.M
                for s, c in enumerate(self._rep):
                    q = s
                    while c and q < spec.M:
                        c, out[q] = divmod(c, p)
                        q += N
                self._digits = tuple(out)
        return self._digits

    def is_zero(self) -> bool:
        """True when the element is zero at precision M."""
        return not any(self._rep)

    def is_unit(self) -> bool:
        return self.digits[0] != 0

    def order(self) -> int | None:
        """Index of the first nonzero digit, or None when zero at precision."""
        for q, d in enumerate(self.digits):
            if d:
                return q
        return None

    def valuation(self) -> Fraction | None:
        q = self.order()
        return None if q is None else Fraction(q, self.spec.N)

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "RingElement") -> "RingElement":
        if isinstance(other, int):
            return RingElement.from_int(self.spec, other)
        if not isinstance(other, RingElement):
            return NotImplemented
        if other.spec != self.spec:
            raise SpecMismatch(f"{self.spec} vs {other.spec}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if self.spec.is_mixed:
            mods = _moduli(self.spec)
            rep = tuple((a + b) % m for a, b, m in zip(self._rep, other._rep, mods))
        else:
            p = self.spec.p
            rep = tuple((a + b) % p for a, b in zip(self._rep, other._rep))
        return RingElement(self.spec, rep)

    __radd__ = __add__

    def __neg__(self):
        if self.spec.is_mixed:
            rep = tuple(-a % m for a, m in zip(self._rep, _moduli(self.spec)))
        else:
            p = self.spec.p
            rep = tuple(-a % p for a in self._rep)
        return RingElement(self.spec, rep)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        spec = self.spec
        if spec.is_mixed:
            N, p = spec.N, spec.p
            if N == 1:
                return RingElement(spec, ((self._rep[0] * other._rep[0]) % _moduli(spec)[0],))
            acc = [0] * N
            for a, x in enumerate(self._rep):
                if not x:
                    continue
                for b, y in enumerate(other._rep):
                    s = a + b
                    if s >= N:
                        acc[s - N] += p * x * y
                    else:
                        acc[s] += x * y
            mods = _moduli(spec)
            return RingElement(spec, tuple(c % m for c, m in zip(acc, mods)))
        return RingElement(spec, _poly_mul_mod(self._rep, other._rep, spec.p, spec.M))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.invert_unit() ** (-k)
        result = RingElement.one(self.spec)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = RingElement.from_int(self.spec, other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.spec == other.spec and self._rep == other._rep

    def __hash__(self):
        return hash((self.spec, self._rep))

    def __repr__(self):
        return f"RingElement(p={self.spec.p}, {self.spec.mode.value}, N={self.spec.N}, digits={list(self.digits)})"

    def shift(self, q: int) -> "RingElement":
        """Multiply by ``pi**q`` (q >= 0)."""
        return self * RingElement.pi_power(self.spec, q)

    def divide_by_pi(self, q: int) -> "RingElement":
        """Exact division by ``pi**q``.

        The top ``q`` digits of the quotient are unknown at precision M and are
        filled with zeros.  Raises ArithmeticError if ``pi**q`` does not divide.
        """
        if q == 0:
            return self
        digits = self.digits
        if any(digits[:q]):
            raise ArithmeticError(f"pi^{q} does not divide {self!r}")
        return RingElement.make(self.spec, list(digits[q:]))

    def truncate(self, q: int) -> "RingElement":
        """Reduce modulo ``pi**q`` (keep digits below q)."""
        if q >= self.spec.M:
            return self
        return RingElement.make(self.spec, list(self.digits[:max(q, 0)]))

    def invert_unit(self) -> "RingElement":
        if not self.is_unit():
            raise NotAUnit(f"valuation {self.valuation()} != 0: {self!r}")
        spec = self.spec
        if spec.is_mixed and spec.N == 1:
            mod = _moduli(spec)[0]
            return RingElement(spec, (pow(self._rep[0], -1, mod),))
        y = RingElement.from_int(spec, pow(self.digits[0], -1, spec.p))
        two = RingElement.from_int(spec, 2)
        correct = 1
        while correct < spec.M:
            y = y * (two - self * y)
            correct *= 2
        return y

    # serialization -------------------------------------------------------
    def to_json(self) -> dict:
        out = self.spec.to_json()
        out["digits"] = list(self.digits)
        return out

    @classmethod
    def from_json(cls, data, spec: RingSpec | None = None) -> "RingElement":
        """Accept a full element dict, a bare digit list, or an int."""
        if isinstance(data, bool):
            raise SchemaError(f"not a ring element: {data!r}")
        if isinstance(data, int):
            if spec is None:
                raise SchemaError("integer element needs an enclosing spec")
            return cls.from_int(spec, data)
        if isinstance(data, list):
            if spec is None:
                raise SchemaError("digit list needs an enclosing spec")
            return cls._from_digit_list(spec, data)
        if isinstance(data, dict):
            own = RingSpec.from_json(data) if "p" in data else spec
            if own is None:
                raise SchemaError("element without spec")
            if spec is not None and own != spec:
                raise SchemaError(f"element spec {own} differs from {spec}")
            if "digits" not in data:
                raise SchemaError("element: missing field 'digits'")
            return cls._from_digit_list(own, data["digits"])
        raise SchemaError(f"not a ring element: {data!r}")

    @classmethod
    def _from_digit_list(cls, spec, digits) -> "RingElement":
        if not all(isinstance(d, int) and not isinstance(d, bool) for d in digits):
            raise SchemaError(f"digits must be integers: {digits!r}")
        if len(digits) > spec.M:
            raise SchemaError(f"{len(digits)} digits exceed precision M={spec.M}")
        return cls.make(spec, digits)


def _poly_mul_mod(a: Sequence[int], b: Sequence[int], p: int, M: int) -> tuple[int, ...]:
    """Product of two digit polynomials over F_p, truncated at degree M.

    Uses Kronecker substitution: pack into big integers, multiply once.
    """
    bits = (M * (p - 1) ** 2).bit_length() + 1
    mask = (1 << bits) - 1
    A = 0
    for d in reversed(a):
        A = (A << bits) | d
    B = 0
    for d in reversed(b):
        B = (B << bits) | d
    C = A * B
    out = []
    for _ in range(M):
        out.append((C & mask) % p)
        C >>= bits
    return tuple(out)


# module-level functional API ------------------------------------------------

def make(spec: RingSpec, digits: Sequence[int]) -> RingElement:
    return RingElement.make(spec, digits)


def add(x: RingElement, y: RingElement) -> RingElement:
    return x + y


def mul(x: RingElement, y: RingElement) -> RingElement:
    return x * y


def valuation(x: RingElement) -> Fraction | None:
    return x.valuation()


def invert_unit(x: RingElement) -> RingElement:
    return x.invert_unit()


def p_power(spec: RingSpec, r) -> RingElement:
    """The element ``p**r``.

    In the mixed regime this is ``pi**(r*N)``.  In the equal regime ``p`` is
    zero, so ``p**0 = 1`` and ``p**r = 0`` for every ``r > 0``.  ``r = INF``
    gives zero in both regimes.
    """
    if r == INF:
        return RingElement.zero(spec)
    r = Fraction(r)
    if r < 0:
        raise ValueError(f"negative exponent {r}")
    q = r * spec.N
    if q.denominator != 1:
        raise IncompatibleRamification(f"denominator of r={r} does not divide N={spec.N}")
    if not spec.is_mixed:
        return RingElement.one(spec) if r == 0 else RingElement.zero(spec)
    return RingElement.pi_power(spec, int(q))


def check_ramification(spec: RingSpec, r) -> None:
    if r == INF:
        return
    if (Fraction(r) * spec.N).denominator != 1:
        raise IncompatibleRamification(f"denominator of r={r} does not divide N={spec.N}")


def elements(spec: RingSpec, values: Iterable[int]) -> list[RingElement]:
    return [RingElement.from_int(spec, v) for v in values]
