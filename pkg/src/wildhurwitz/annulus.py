"""Formal annuli ``R[[u, v]]/(uv - c)`` and degree-n covers between them.

Elements are stored in the canonical basis ``{u^i : i >= 0} U {v^j : j >= 1}``
and known modulo the ideal ``J = (u^T, v^T, pi^M)``.  Inside ``J`` we have
``c^j u^(T-j) = u^T v^j``, so the coefficient of ``u^i`` (or ``v^i``) is only
meaningful modulo ``c^(T-i)``; the canonical form reduces it there.  With
this convention the truncated ring is an honest quotient ring, so products
are associative and "equal at precision" is well defined.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    AlternativeViolated,
    NoNormalForm,
    NotAUnit,
    NotDecomposable,
    SpecMismatch,
)
from .power_series import Series
from .valuation_ring import RingElement, RingSpec, _moduli, nu_p


class Side(str, Enum):
    U = "u"
    V = "v"


# fast coefficient kernels ------------------------------------------------
#
# Annulus products need ~3T^2 coefficient multiplications.  At desk sizes they
# run as FFT convolutions of pi-adic digits (_digit_product); when digit sums
# could outgrow exact float range they fall back to Kronecker-packed integers
# below, reduced once per output coefficient.

def _conv_int(P, Q):
    """Product of polynomials with non-negative integer coefficients."""
    L = len(P) + len(Q) - 1
    top = max(x.bit_length() for x in P) + max(y.bit_length() for y in Q)
    if top == 0:
        return [0] * L
    w = (top + min(len(P), len(Q)).bit_length() + 8) // 8
    a = int.from_bytes(b"".join(x.to_bytes(w, "little") for x in P), "little")
    b = int.from_bytes(b"".join(y.to_bytes(w, "little") for y in Q), "little")
    raw = (a * b).to_bytes(w * L, "little")
    return [int.from_bytes(raw[k * w:(k + 1) * w], "little") for k in range(L)]


class _Kernel:
    """Packs a ring element into one non-negative integer.

    Mixed, N = 1: the integer itself.  Mixed, N > 1: the components of
    ``sum c_s pi^s`` in fixed-width byte slots, folded with ``pi^N = p`` when
    lowered.  Equal: the t-digits in fixed-width slots.  Slots are wide enough
    for every sum formed inside one annulus product, so nothing carries over.
    """

    def __init__(self, spec: RingSpec):
        self.spec = spec
        self.p, self.N, self.M = spec.p, spec.N, spec.M
        if spec.is_mixed:
            top = -(-spec.M // spec.N) * spec.p.bit_length()
            self.wb = (3 * top + (5 * 65536 * spec.N ** 2).bit_length() + 8) // 8
        else:
            self.wb = ((4 * 256 * spec.M * (spec.p - 1) ** 2).bit_length() + 8) // 8

    def lift(self, x: RingElement) -> int:
        if self.spec.is_mixed and self.N == 1:
            return x._rep[0]
        wb = self.wb
        return int.from_bytes(b"".join(d.to_bytes(wb, "little") for d in x._rep), "little")

    @staticmethod
    def zero() -> int:
        return 0

    @staticmethod
    def mul(a: int, b: int) -> int:
        return a * b

    @staticmethod
    def add(a: int, b: int) -> int:
        return a + b

    @staticmethod
    def conv(P, Q):
        return _conv_int(P, Q)

    def _slots(self, a: int):
        wb = self.wb
        raw = a.to_bytes(wb * max(1, -(-a.bit_length() // (8 * wb))), "little")
        return [int.from_bytes(raw[q:q + wb], "little") for q in range(0, len(raw), wb)]

    def lower(self, a: int, rho: int) -> RingElement:
        """Reduce a packed accumulator modulo ``pi^rho`` (rho <= M)."""
        spec, p = self.spec, self.p
        if spec.is_mixed:
            if self.N == 1:
                return RingElement(spec, (a % p ** rho,))
            N = self.N
            comp = [0] * N
            for s, z in enumerate(self._slots(a)):
                if z:
                    comp[s % N] += z * p ** (s // N)
            mods = tuple(p ** max(0, -(-(rho - s) // N)) for s in range(N))
            return RingElement(spec, tuple(x % m for x, m in zip(comp, mods)))
        slots = self._slots(a)[:self.M]
        out = [z % p if q < rho else 0 for q, z in enumerate(slots)]
        return RingElement(spec, tuple(out + [0] * (self.M - len(out))))

    def scaled_reducer(self, c: RingElement):
        """Cheapest exact way to shrink ``lift(x) * lift(c^i)`` before convolving."""
        spec = self.spec
        if spec.is_mixed:
            if self.N == 1:
                mod = spec.p ** spec.M
                return lambda z: z % mod
            return lambda z: z
        if _is_t_power(c):
            # digits stay below p; only the slots past M need dropping
            mask = (1 << (8 * self.wb * spec.M)) - 1
            return lambda z: z & mask
        return self.reduce_lifted

    def reduce_lifted(self, a: int) -> int:
        """Fully reduce an accumulator and lift again (keeps integers small)."""
        return self.lift(self.lower(a, self.M))


_KERNELS: dict[RingSpec, _Kernel] = {}


def _kernel(spec: RingSpec) -> _Kernel:
    k = _KERNELS.get(spec)
    if k is None:
        k = _KERNELS[spec] = _Kernel(spec)
    return k


def _divide(x: RingElement, c: RingElement) -> RingElement:
    """Exact quotient ``x / c`` in the DVR; ArithmeticError if ``c`` does not divide."""
    if x.is_zero():
        return x
    k = c.order()
    if k is None:
        raise ArithmeticError("division by zero at precision")
    return x.divide_by_pi(k) * _unit_inverse(c, k)


_INV_CACHE: dict = {}


def _unit_inverse(c: RingElement, k: int) -> RingElement:
    key = (c.spec, c._rep)
    inv = _INV_CACHE.get(key)
    if inv is None:
        if len(_INV_CACHE) > 4096:
            _INV_CACHE.clear()
        inv = _INV_CACHE[key] = c.divide_by_pi(k).invert_unit()
    return inv


def _is_t_power(c: RingElement) -> bool:
    nz = [d for d in c._rep if d]
    return nz == [1] or not nz


def _divides(d: RingElement, x: RingElement) -> bool:
    if x.is_zero():
        return True
    kd, kx = d.order(), x.order()
    return kd is not None and kx >= kd


@dataclass(frozen=True, eq=False)
class AnnulusElement:
    """``sum u_coeffs[i] u^i + sum v_coeffs[j-1] v^j`` in ``R[[u,v]]/(uv - c)`` mod J."""

    spec: RingSpec
    c: RingElement
    T: int
    u_coeffs: tuple[RingElement, ...]
    v_coeffs: tuple[RingElement, ...]

    def __post_init__(self):
        if len(self.u_coeffs) != self.T or len(self.v_coeffs) != self.T - 1:
            raise ValueError("need T u-coefficients and T-1 v-coefficients")
        if self.c.spec != self.spec:
            raise SpecMismatch("thickness over a different ring")

    # construction -----------------------------------------------------------
    @classmethod
    def build(cls, spec: RingSpec, c: RingElement, T: int,
              u: Sequence = (), v: Sequence = ()) -> "AnnulusElement":
        """``u`` lists a_0, a_1, ...; ``v`` lists b_1, b_2, ... (ints or elements)."""
        def elt(x):
            return x if isinstance(x, RingElement) else RingElement.from_int(spec, x)
        zero = RingElement.zero(spec)
        uu = [elt(x) for x in list(u)[:T]] + [zero] * max(0, T - len(u))
        vv = [elt(x) for x in list(v)[:T - 1]] + [zero] * max(0, T - 1 - len(v))
        return cls(spec, c, T, tuple(uu), tuple(vv)).canonical()

    @classmethod
    def constant(cls, spec, c, T, value) -> "AnnulusElement":
        return cls.build(spec, c, T, [value])

    @classmethod
    def monomial(cls, spec, c, T, side: Side, k: int, coeff=1) -> "AnnulusElement":
        if k == 0:
            return cls.build(spec, c, T, [coeff])
        if k >= T:
            return cls.build(spec, c, T)
        terms = [0] * k + [coeff]
        if Side(side) is Side.U:
            return cls.build(spec, c, T, u=terms)
        return cls.build(spec, c, T, v=terms[1:])

    def like(self, u, v) -> "AnnulusElement":
        return AnnulusElement(self.spec, self.c, self.T, tuple(u), tuple(v)).canonical()

    def _rho(self, i: int) -> int:
        k = self.c.order()
        if k is None:
            return self.spec.M
        return min(self.spec.M, (self.T - i) * k)

    def canonical(self) -> "AnnulusElement":
        u = tuple(a.truncate(self._rho(i)) for i, a in enumerate(self.u_coeffs))
        v = tuple(b.truncate(self._rho(j)) for j, b in enumerate(self.v_coeffs, start=1))
        if u == self.u_coeffs and v == self.v_coeffs:
            return self
        return AnnulusElement(self.spec, self.c, self.T, u, v)

    # access -----------------------------------------------------------------
    @property
    def constant_term(self) -> RingElement:
        return self.u_coeffs[0]

    def coeff(self, side: Side, k: int) -> RingElement:
        if k == 0:
            return self.u_coeffs[0]
        return self.u_coeffs[k] if Side(side) is Side.U else self.v_coeffs[k - 1]

    def all_coeffs(self) -> list[RingElement]:
        return list(self.u_coeffs) + list(self.v_coeffs)

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.all_coeffs())

    def is_unit(self) -> bool:
        return self.u_coeffs[0].is_unit()

    # arithmetic -----------------------------------------------------------
    def _same(self, other: "AnnulusElement"):
        if other.spec != self.spec or other.c != self.c or other.T != self.T:
            raise SpecMismatch("annulus elements differ in spec, thickness or truncation")

    def __eq__(self, other):
        if not isinstance(other, AnnulusElement):
            return NotImplemented
        return (self.spec == other.spec and self.c == other.c and self.T == other.T
                and self.u_coeffs == other.u_coeffs and self.v_coeffs == other.v_coeffs)

    def __hash__(self):
        return hash((self.spec, self.T, self.u_coeffs, self.v_coeffs))

    def __add__(self, other: "AnnulusElement") -> "AnnulusElement":
        self._same(other)
        return self.like([a + b for a, b in zip(self.u_coeffs, other.u_coeffs)],
                         [a + b for a, b in zip(self.v_coeffs, other.v_coeffs)])

    def __neg__(self) -> "AnnulusElement":
        return self.like([-a for a in self.u_coeffs], [-b for b in self.v_coeffs])

    def __sub__(self, other: "AnnulusElement") -> "AnnulusElement":
        self._same(other)
        return self.like([a - b for a, b in zip(self.u_coeffs, other.u_coeffs)],
                         [a - b for a, b in zip(self.v_coeffs, other.v_coeffs)])

    def scale(self, s: RingElement | int) -> "AnnulusElement":
        return self.like([a * s for a in self.u_coeffs], [b * s for b in self.v_coeffs])

    def __mul__(self, other):
        if isinstance(other, (RingElement, int)):
            return self.scale(other)
        self._same(other)
        if _fft_exact(self.spec, self.T):
            return self._mul_digits(other)
        K = _kernel(self.spec)
        T = self.T
        cp = _c_powers(self.c, T)  # lifted c^k, k < T
        A, B = self._lifted(K)
        A2, B2 = other._lifted(K)
        red = K.scaled_reducer(self.c)
        # every piece is a convolution: u*u, v*v, and the two cross terms, where
        # u^i v^j = c^j u^(i-j) (i >= j) or c^i v^(j-i) is a correlation
        U = K.conv(A, A2)[:T]
        V = K.conv(B, B2)[:T]
        for X, Y in ((A, B2), (A2, B)):
            Xc = [red(K.mul(x, k)) for x, k in zip(X, cp)]
            Yc = [red(K.mul(y, k)) for y, k in zip(Y, cp)]
            lo = K.conv(X[::-1], Yc)
            hi = K.conv(Xc[::-1], Y)
            U = [K.add(U[k], lo[T - 1 - k]) for k in range(T)]
            V = [V[0]] + [K.add(V[k], hi[T - 1 + k]) for k in range(1, T)]
        u = [K.lower(U[i], self._rho(i)) for i in range(T)]
        v = [K.lower(V[j], self._rho(j)) for j in range(1, T)]
        return AnnulusElement(self.spec, self.c, T, tuple(u), tuple(v))

    __rmul__ = __mul__

    def _digit_arrays(self):
        """pi-adic digits as (T, M) arrays for the u-side and v-side (row 0 of v is empty)."""
        cached = self.__dict__.get("_digit_cache")
        if cached is None:
            M = self.spec.M
            U = np.array([a.digits for a in self.u_coeffs], dtype=np.float64).reshape(self.T, M)
            V = np.zeros_like(U)
            if self.T > 1:
                V[1:] = np.array([b.digits for b in self.v_coeffs], dtype=np.float64)
            cached = (U, V)
            object.__setattr__(self, "_digit_cache", cached)
        return cached

    def _mul_digits(self, other: "AnnulusElement") -> "AnnulusElement":
        T = self.T
        D = _digit_product(self._digit_arrays(), other._digit_arrays(),
                           _c_digit_powers(self.c, T), T, self.spec.M)
        out = _elements_from_digit_sums(self.spec, D, self._rho_rows())
        return AnnulusElement(self.spec, self.c, T, tuple(out[:T]), tuple(out[T:]))

    def _rho_rows(self) -> list[int]:
        """Precision of each coefficient: u^0..u^(T-1), then v^1..v^(T-1)."""
        return [self._rho(i) for i in range(self.T)] + [self._rho(j) for j in range(1, self.T)]

    def _lifted(self, K):
        cached = self.__dict__.get("_lift_cache")
        if cached is None:
            cached = ([K.lift(x) for x in self.u_coeffs],
                      [K.zero()] + [K.lift(x) for x in self.v_coeffs])
            object.__setattr__(self, "_lift_cache", cached)
        return cached

    def __pow__(self, k: int) -> "AnnulusElement":
        result = AnnulusElement.constant(self.spec, self.c, self.T, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def invert_unit(self) -> "AnnulusElement":
        """Newton iteration ``y <- y (2 - x y)``; (u, v) is nilpotent mod J."""
        if not self.is_unit():
            raise NotAUnit("constant term is not a unit")
        if _fft_exact(self.spec, self.T):
            return self._invert_digits()
        y = AnnulusElement.constant(self.spec, self.c, self.T, self.u_coeffs[0].invert_unit())
        one = AnnulusElement.constant(self.spec, self.c, self.T, 1)
        # error is (u, v)-adic of order >= 1, nilpotent of index <= 2T - 1
        order = 1
        while order < 2 * self.T - 1:
            e = one - self * y
            if e.is_zero():
                break
            y = y + y * e
            order *= 2
        return y

    def _invert_digits(self) -> "AnnulusElement":
        # the same Newton iteration, kept on normalized digit arrays throughout
        spec, T, M = self.spec, self.T, self.spec.M
        rho = self._rho_rows()
        C = _c_digit_powers(self.c, T)
        x = self._digit_arrays()
        one = np.zeros((2 * T - 1, M), dtype=np.int64)
        one[0, 0] = 1
        y = np.zeros_like(one)
        y[0] = self.u_coeffs[0].invert_unit().digits
        order = 1
        while order < 2 * T - 1:
            e = _carry(spec, one - _digit_product(x, _split_rows(y, T), C, T, M), rho)
            if not e.any():
                break
            y = _carry(spec, y + _digit_product(_split_rows(y, T), _split_rows(e, T), C, T, M), rho)
            order *= 2
        out = _elements_from_digit_sums(spec, y, rho)
        return AnnulusElement(spec, self.c, T, tuple(out[:T]), tuple(out[T:]))

    def log_derivative_v(self) -> "AnnulusElement":
        """``v d/dv`` applied termwise (``u = c/v`` gives ``u^i -> -i u^i``)."""
        return self.like([a * (-i) for i, a in enumerate(self.u_coeffs)],
                         [b * j for j, b in enumerate(self.v_coeffs, start=1)])

    def shift_u(self, k: int) -> "AnnulusElement":
        """Multiply by ``u^k``."""
        return self._shift(k, Side.U)

    def shift_v(self, k: int) -> "AnnulusElement":
        """Multiply by ``v^k``."""
        return self._shift(k, Side.V)

    def _shift(self, k: int, side: Side) -> "AnnulusElement":
        # own side moves up by k; the other side meets it through c^min(j, k)
        T = self.T
        zero = RingElement.zero(self.spec)
        own = list(self.u_coeffs) if side is Side.U else [self.u_coeffs[0]] + list(self.v_coeffs)
        other = [zero] + (list(self.v_coeffs) if side is Side.U else list(self.u_coeffs[1:]))
        new_own = [zero] * T
        new_other = [zero] * T
        for i, a in enumerate(own):
            if i + k < T:
                new_own[i + k] = a
        ck = [RingElement.one(self.spec)]
        for _ in range(min(k, T)):
            ck.append(ck[-1] * self.c)
        for j in range(1, T):
            b = other[j]
            if b.is_zero():
                continue
            if j <= k:
                if k - j >= T:
                    continue
                new_own[k - j] = new_own[k - j] + b * ck[j]
            else:
                new_other[j - k] = new_other[j - k] + b * ck[k]
        if side is Side.U:
            return self.like(new_own, new_other[1:])
        return self.like([new_own[0]] + new_other[1:], new_own[1:])

    def divide_monomial(self, side: Side) -> "AnnulusElement":
        """Exact division by ``u`` (or ``v``): ``a_0 -> a_0 v / c``, ``b_j v^j -> b_j v^(j+1) / c``.

        Raises ArithmeticError when ``c`` fails to divide a required coefficient.
        """
        side = Side(side)
        own = list(self.u_coeffs) if side is Side.U else [self.u_coeffs[0]] + list(self.v_coeffs)
        other = list(self.v_coeffs) if side is Side.U else list(self.u_coeffs[1:])
        zero = RingElement.zero(self.spec)
        new_own = own[1:] + [zero]
        new_other = [_divide(own[0], self.c)] + [_divide(x, self.c) for x in other[:-1]]
        if side is Side.U:
            return self.like(new_own, new_other)
        return self.like([new_own[0]] + new_other, new_own[1:])

    def to_json(self) -> dict:
        return {"u": [list(a.digits) for a in self.u_coeffs],
                "v": [list(b.digits) for b in self.v_coeffs]}


_CP_CACHE: dict = {}
_CD_CACHE: dict = {}

# float64 FFT convolution is exact after rounding while partial sums stay far
# below 2^53; the largest sum in a product is about 5 T M^2 (p-1)^3
_FFT_LIMIT = 2 ** 40


def _fft_exact(spec: RingSpec, T: int) -> bool:
    return 5 * T * spec.M ** 2 * (spec.p - 1) ** 3 < _FFT_LIMIT


def _digit_product(xa, ya, C, T: int, M: int):
    """Raw digit sums of an annulus product, rows u^0..u^(T-1), v^1..v^(T-1).

    A product in the DVR is a convolution of pi-adic digits followed by
    carries, so the annulus product is a handful of 2-D convolutions over
    (monomial index, digit index), done by FFT and rounded back to exact
    integers.  ``xa``/``ya`` are (u-digits, v-digits) pairs of (T, M) arrays
    with an empty row 0 on the v-side; ``C`` holds the digits of ``c^i``.
    """
    A, B = xa
    A2, B2 = ya
    shape = (2 * T, 2 * M)
    # rows scaled by c^i, truncated below pi^M, for B2, B, A, A2
    fC = np.fft.rfft(C, 2 * M, axis=1)
    S = np.fft.irfft(np.fft.rfft(np.stack([B2, B, A, A2]), 2 * M, axis=2) * fC, 2 * M, axis=2)
    S = np.rint(S[:, :, :M])
    F = np.fft.rfft2(np.stack([A, A2, B, B2, A[::-1], A2[::-1], S[0], S[1], S[2][::-1], S[3][::-1]]),
                     shape)
    # u*u, v*v, then the cross terms: u^i v^j = c^j u^(i-j) or c^i v^(j-i),
    # which are correlations
    P = np.fft.irfft2(np.stack([F[0] * F[1], F[2] * F[3], F[4] * F[6] + F[5] * F[7],
                                F[8] * F[3] + F[9] * F[2]]), shape)
    U = P[0, :T, :M] + P[2, T - 1::-1, :M]
    V = P[1, :T, :M] + P[3, T - 1:2 * T - 1, :M]
    return np.rint(np.concatenate([U, V[1:]])).astype(np.int64)


def _carry(spec: RingSpec, D, rho):
    """Normalize rows of digit sums (any sign) to digits in [0, p), zero from ``rho`` on."""
    p, N, M = spec.p, spec.N, spec.M
    D = D.copy()
    if spec.is_mixed:
        for q in range(M):
            up = D[:, q] // p
            D[:, q] -= up * p
            if q + N < M:
                D[:, q + N] += up
    else:
        D %= p
    D[np.arange(M)[None, :] >= np.asarray(rho)[:, None]] = 0
    return D


def _split_rows(D, T: int):
    """(2T-1, M) rows back to the (u-digits, v-digits) pair used by _digit_product."""
    V = np.zeros((T, D.shape[1]), dtype=np.float64)
    V[1:] = D[T:]
    return D[:T].astype(np.float64), V


def _elements_from_digit_sums(spec: RingSpec, D, rho) -> list[RingElement]:
    """Carry rows of raw digit sums into ring elements known modulo ``pi^rho``."""
    p, N, M = spec.p, spec.N, spec.M
    rows = len(rho)
    q = np.arange(M)
    keep = q[None, :] < np.asarray(rho)[:, None]
    if not spec.is_mixed:
        digits = np.where(keep, D % p, 0).tolist()
        out = []
        for d in digits:
            x = RingElement(spec, tuple(d))
            x._digits = x._rep
            out.append(x)
        return out
    K = -(-M // N)
    if int(D.max(initial=0)) * p ** K >= 2 ** 62:
        return [RingElement.make(spec, row).truncate(r) for row, r in zip(D.tolist(), rho)]
    # component s of sum d_q pi^q collects d_(s + kN) p^k
    Dp = np.zeros((rows, K * N), dtype=np.int64)
    Dp[:, :M] = D
    comp = (Dp.reshape(rows, K, N) * (p ** np.arange(K, dtype=np.int64))[None, :, None]).sum(axis=1)
    need = np.maximum(0, -(-(np.asarray(rho)[:, None] - np.arange(N)[None, :]) // N))
    comp %= p ** need
    # read back digits in [0, p) so later products skip the conversion
    dig = np.zeros((rows, K, N), dtype=np.int64)
    rest = comp.copy()
    for k in range(K):
        dig[:, k, :] = rest % p
        rest //= p
    dig = dig.reshape(rows, K * N)[:, :M].tolist()
    out = []
    for rep, d in zip(comp.tolist(), dig):
        x = RingElement(spec, tuple(rep))
        x._digits = tuple(d)
        out.append(x)
    return out


def _c_digit_powers(c: RingElement, T: int):
    key = (c.spec, c._rep, T)
    out = _CD_CACHE.get(key)
    if out is None:
        powers = [RingElement.one(c.spec)]
        for _ in range(1, T):
            powers.append(powers[-1] * c)
        out = _CD_CACHE[key] = np.array([x.digits for x in powers], dtype=np.float64)
    return out


def _c_powers(c: RingElement, T: int):
    key = (c.spec, c._rep, T)
    out = _CP_CACHE.get(key)
    if out is None:
        K = _kernel(c.spec)
        powers = [RingElement.one(c.spec)]
        for _ in range(1, T):
            powers.append(powers[-1] * c)
        out = _CP_CACHE[key] = [K.lift(x) for x in powers]
    return out


# functional API -------------------------------------------------------------

def ann_add(x: AnnulusElement, y: AnnulusElement) -> AnnulusElement:
    return x + y


def ann_mul(x: AnnulusElement, y: AnnulusElement) -> AnnulusElement:
    return x * y


def ann_invert_unit(x: AnnulusElement) -> AnnulusElement:
    return x.invert_unit()


@dataclass(frozen=True)
class AnnulusCover:
    """``x -> u^n alpha``, ``y -> v^n alpha^-1`` over base thickness ``b = c^n``."""

    n: int
    alpha: AnnulusElement
    alpha_inv: AnnulusElement
    x_image: AnnulusElement
    y_image: AnnulusElement
    base_thickness: RingElement

    @property
    def spec(self) -> RingSpec:
        return self.alpha.spec

    def relation_holds(self) -> bool:
        b = AnnulusElement.constant(self.spec, self.alpha.c, self.alpha.T, self.base_thickness)
        return self.x_image * self.y_image == b


def make_cover(n: int, alpha: AnnulusElement) -> AnnulusCover:
    if n < 1:
        raise ValueError("cover degree must be positive")
    alpha_inv = alpha.invert_unit()
    x = alpha.shift_u(n)
    y = alpha_inv.shift_v(n)
    cover = AnnulusCover(n, alpha, alpha_inv, x, y, alpha.c ** n)
    if not cover.relation_holds():
        raise ArithmeticError("x * y != c^n at precision")
    return cover


def log_differential(cover: AnnulusCover) -> AnnulusElement:
    """``h`` with ``dy/y = h dv/v`` for ``y = v^n alpha^-1``.

    ``h = n - alpha^-1 * (v d/dv) alpha`` in the canonical basis.
    """
    alpha = cover.alpha
    n = AnnulusElement.constant(alpha.spec, alpha.c, alpha.T, cover.n)
    return n - cover.alpha_inv * alpha.log_derivative_v()


@dataclass(frozen=True)
class NodeInvariants:
    """Normal form ``h = d * (u or v)^m * beta`` with ``beta`` a unit."""

    m: int
    side: Side
    d: RingElement
    beta: AnnulusElement
    n: int | None = None

    @property
    def val_d(self) -> Fraction | None:
        return self.d.valuation()

    def to_json(self) -> dict:
        from .valuation_ring import format_rational
        v = self.val_d
        return {"m": self.m, "side": self.side.value,
                "val_d": None if v is None else format_rational(v)}


def _content_split(q: AnnulusElement):
    d = q.constant_term
    if d.is_zero():
        return None
    coeffs = q.all_coeffs()
    if not all(_divides(d, x) for x in coeffs):
        return None
    beta = q.like([_divide(a, d) for a in q.u_coeffs], [_divide(b, d) for b in q.v_coeffs])
    return d, beta


def extract_m_d(h: AnnulusElement, n: int | None = None) -> NodeInvariants:
    """Scan ``m = 0, 1, ...`` (side U before V) for ``h = d * monomial^m * unit``."""
    if h.is_zero():
        raise NoNormalForm("h vanishes at precision")
    current = {Side.U: h, Side.V: h}
    for m in range(h.T):
        for side in (Side.U, Side.V):
            q = current[side]
            if q is None:
                continue
            if m > 0:
                try:
                    q = current[side] = q.divide_monomial(side)
                except ArithmeticError:
                    current[side] = None
                    continue
            if q.is_zero():
                current[side] = None
                continue
            split = _content_split(q)
            if split is not None:
                d, beta = split
                return NodeInvariants(m, side if m else Side.U, d, beta, n)
    raise NoNormalForm("no (side, m) normal form within truncation")


@dataclass(frozen=True)
class AlternativeReport:
    ok: bool
    reasons: tuple[str, ...] = ()


def check_alternative_A(inv: NodeInvariants, n: int, spec: RingSpec,
                        raise_on_fail: bool = False) -> AlternativeReport:
    """Constraint on the conductor: prime to p (equal char), or
    ``nu_p(m) < nu_p(n)`` with ``m = 0`` iff ``(d) = (n)`` (mixed char)."""
    p = spec.p
    if n % p:
        raise ValueError(f"alternative (A) needs p | n; got n={n}, p={p}")
    reasons = []
    m = inv.m
    if not spec.is_mixed:
        if m != 0 and m % p == 0:
            reasons.append(f"m={m} is not prime to p={p}")
    else:
        if m != 0 and nu_p(m, p) >= nu_p(n, p):
            reasons.append(f"nu_p(m)={nu_p(m, p)} >= nu_p(n)={nu_p(n, p)}")
        vd = inv.val_d
        same_ideal = vd is not None and vd == nu_p(n, p)
        if (m == 0) != same_ideal:
            reasons.append(f"m={m} but nu(d)={vd} vs nu(n)={nu_p(n, p)}")
    report = AlternativeReport(not reasons, tuple(reasons))
    if raise_on_fail and reasons:
        raise AlternativeViolated("; ".join(reasons))
    return report


def decompose_uP_cP(x: AnnulusElement) -> tuple[Series, Series]:
    """``x = u P_u(u) + c P_v(v)``; the constant term goes into ``c P_v`` (``P_v(0) = a_0 / c``)."""
    spec, T = x.spec, x.T
    try:
        pv = [_divide(x.u_coeffs[0], x.c)] + [_divide(b, x.c) for b in x.v_coeffs]
    except ArithmeticError:
        raise NotDecomposable("c does not divide the constant or v-part of x") from None
    pu = list(x.u_coeffs[1:]) + [RingElement.zero(spec)]
    return Series(spec, tuple(pu)), Series(spec, tuple(pv))


@dataclass(frozen=True)
class CompatibilityReport:
    ok: bool
    first_failure: tuple[str, int] | None = None


def node_compatibility_check(alpha: AnnulusElement, beta: AnnulusElement, d: RingElement,
                             m: int, side: Side = Side.U, n: int | None = None) -> CompatibilityReport:
    """Check ``sum zeta_i (n+i) u^i + sum eta_j (n-j) v^j == d * monomial^m * alpha * beta``.

    ``n`` defaults to ``p``; ``alpha = sum zeta_i u^i + sum eta_j v^j``.
    """
    spec = alpha.spec
    n = spec.p if n is None else n
    lhs = alpha.like([z * (n + i) for i, z in enumerate(alpha.u_coeffs)],
                     [e * (n - j) for j, e in enumerate(alpha.v_coeffs, start=1)])
    mono = AnnulusElement.monomial(spec, alpha.c, alpha.T, side, m, d)
    rhs = mono * (alpha * beta)
    for i, (a, b) in enumerate(zip(lhs.u_coeffs, rhs.u_coeffs)):
        if a != b:
            return CompatibilityReport(False, ("u", i))
    for j, (a, b) in enumerate(zip(lhs.v_coeffs, rhs.v_coeffs), start=1):
        if a != b:
            return CompatibilityReport(False, ("v", j))
    return CompatibilityReport(True)


def analyze(n: int, alpha: AnnulusElement) -> tuple[AnnulusCover, NodeInvariants, AlternativeReport]:
    """Full pipeline: cover, log differential, normal form, alternative (A)."""
    cover = make_cover(n, alpha)
    inv = extract_m_d(log_differential(cover), n)
    if n % alpha.spec.p == 0:
        report = check_alternative_A(inv, n, alpha.spec)
    else:
        report = AlternativeReport(True, ("tame: p does not divide n",))
    return cover, inv, report
