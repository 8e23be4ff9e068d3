"""Truncated power series, p^r-earnestness and local exactness.

Indexing convention (important, both branch tests depend on it): for a
morphism ``f(x) = sum a_i u^i`` and ``delta(dx) = (sum_j b_{j+1} u^j) du``, the
coefficient ``b_i`` is stored at index ``i - 1`` of the differential form.
So ``b_i`` pairs with ``a_i`` and, for ``delta = df``, ``b_i = i * a_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    IncompatibleRamification,
    NotABasis,
    NotConjugate,
    NotExact,
    SchemaError,
    SpecMismatch,
    WrongCharacteristic,
)
from .valuation_ring import (
    INF,
    RingElement,
    RingSpec,
    check_ramification,
    nu_p,
    p_power,
)


@dataclass(frozen=True)
class Series:
    """``sum coeffs[i] * u**i`` known modulo ``u**T``."""

    spec: RingSpec
    coeffs: tuple[RingElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.coeffs:
            raise ValueError("truncation T must be positive")
        for c in self.coeffs:
            if c.spec != self.spec:
                raise SpecMismatch(f"coefficient over {c.spec}, series over {self.spec}")

    @property
    def T(self) -> int:
        return len(self.coeffs)

    @classmethod
    def zero(cls, spec: RingSpec, T: int) -> "Series":
        z = RingElement.zero(spec)
        return cls(spec, (z,) * T)

    @classmethod
    def from_ints(cls, spec: RingSpec, values: Sequence[int], T: int | None = None) -> "Series":
        T = len(values) if T is None else T
        values = list(values) + [0] * (T - len(values))
        return cls(spec, tuple(RingElement.from_int(spec, v) for v in values[:T]))

    @classmethod
    def from_terms(cls, spec: RingSpec, T: int, terms: Mapping[int, RingElement | int]) -> "Series":
        """Build from a sparse ``{exponent: coefficient}`` map; exponents >= T drop."""
        coeffs = [RingElement.zero(spec)] * T
        for i, c in terms.items():
            if i < T:
                coeffs[i] = c if isinstance(c, RingElement) else RingElement.from_int(spec, c)
        return cls(spec, tuple(coeffs))

    def __getitem__(self, i: int) -> RingElement:
        return self.coeffs[i]

    def _same(self, other: "Series"):
        if other.spec != self.spec or other.T != self.T:
            raise SpecMismatch("series differ in spec or truncation")

    def __add__(self, other: "Series") -> "Series":
        self._same(other)
        return Series(self.spec, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Series") -> "Series":
        self._same(other)
        return Series(self.spec, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Series":
        return Series(self.spec, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (RingElement, int)):
            return Series(self.spec, tuple(a * other for a in self.coeffs))
        self._same(other)
        T = self.T
        out = [RingElement.zero(self.spec)] * T
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j in range(T - i):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return Series(self.spec, tuple(out))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def support(self) -> list[int]:
        return [i for i, c in enumerate(self.coeffs) if not c.is_zero()]

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "T": self.T,
            "coeffs": [list(c.digits) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict, spec: RingSpec | None = None) -> "Series":
        if not isinstance(data, dict):
            raise SchemaError("series must be an object")
        if "spec" in data:
            spec = RingSpec.from_json(data["spec"])
        if spec is None:
            raise SchemaError("series: missing field 'spec'")
        if "coeffs" not in data:
            raise SchemaError("series: missing field 'coeffs'")
        raw = data["coeffs"]
        T = int(data.get("T", len(raw)))
        if len(raw) > T:
            raise SchemaError(f"series: {len(raw)} coefficients exceed T={T}")
        coeffs = [RingElement.from_json(c, spec) for c in raw]
        coeffs += [RingElement.zero(spec)] * (T - len(coeffs))
        return cls(spec, tuple(coeffs))


@dataclass(frozen=True)
class DifferentialForm:
    """``h(u) du``; ``coefficient_series[j]`` is ``b_{j+1}``."""

    coefficient_series: Series

    @property
    def spec(self) -> RingSpec:
        return self.coefficient_series.spec

    @property
    def T(self) -> int:
        return self.coefficient_series.T

    def b(self, i: int) -> RingElement:
        """The coefficient paired with ``a_i`` (``i >= 1``)."""
        return self.coefficient_series.coeffs[i - 1]

    @classmethod
    def from_b(cls, spec: RingSpec, T: int, b: Mapping[int, RingElement | int]) -> "DifferentialForm":
        """Build from ``{i: b_i}`` in the paired indexing."""
        return cls(Series.from_terms(spec, T, {i - 1: v for i, v in b.items() if i >= 1}))

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        return DifferentialForm(self.coefficient_series + other.coefficient_series)

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return DifferentialForm(self.coefficient_series - other.coefficient_series)

    def __mul__(self, scalar) -> "DifferentialForm":
        return DifferentialForm(self.coefficient_series * scalar)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.coefficient_series.is_zero()


@dataclass(frozen=True)
class Failure:
    index: int
    branch: str
    lhs: tuple[int, ...]
    rhs: tuple[int, ...]

    def describe(self) -> str:
        return f"{self.branch} failure at i={self.index}: lhs={list(self.lhs)} rhs={list(self.rhs)}"


@dataclass(frozen=True)
class EarnestnessVerdict:
    ok: bool
    first_failure: Failure | None = None
    precision: int = 0
    checked: int = 0

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        out = {"ok": self.ok, "precision": self.precision, "checked": self.checked}
        if self.first_failure is not None:
            f = self.first_failure
            out["first_failure"] = {"index": f.index, "branch": f.branch,
                                    "lhs": list(f.lhs), "rhs": list(f.rhs)}
        return out


def derivative(f: Series) -> DifferentialForm:
    """``df``: output index ``i - 1`` holds ``i * a_i``; the top slot is zero."""
    spec = f.spec
    coeffs = [f.coeffs[i] * i for i in range(1, f.T)]
    coeffs.append(RingElement.zero(spec))
    return DifferentialForm(Series(spec, tuple(coeffs)))


def _prime_to_p_inverse(spec: RingSpec, i: int) -> RingElement:
    return RingElement.from_int(spec, i).invert_unit()


def i_over_p_r(spec: RingSpec, i: int, r) -> RingElement:
    """``i / p**r`` for ``p | i`` and ``r <= 1 <= nu_p(i)``.

    Computed as ``p**(nu_p(i) - r) * (i / p**nu_p(i))``.
    """
    k = nu_p(i, spec.p)
    rest = i // spec.p ** k
    return p_power(spec, Fraction(k) - Fraction(r)) * rest


def _check_r(spec: RingSpec, r) -> Fraction:
    if r == INF:
        raise ValueError("use is_pinf_earnest for r = infinity")
    r = Fraction(r)
    if not 0 <= r <= 1:
        raise ValueError(f"earnestness degree r={r} outside [0, 1]")
    check_ramification(spec, r)
    return r


def is_pr_earnest(f: Series, delta: DifferentialForm, r) -> EarnestnessVerdict:
    """Check both branch equations of p^r-earnestness for ``1 <= i < T``.

    * ``i`` prime to ``p``: ``a_i == p**r * b_i / i``
    * ``p | i``: ``b_i == (i / p**r) * a_i``
    """
    spec = f.spec
    if delta.spec != spec:
        raise SpecMismatch("f and delta live over different rings")
    r = _check_r(spec, r)
    T = min(f.T, delta.T + 1)
    pr = p_power(spec, r)
    for i in range(1, T):
        a, b = f.coeffs[i], delta.b(i)
        if i % spec.p:
            lhs, rhs, branch = a, pr * b * _prime_to_p_inverse(spec, i), "branch-1"
        else:
            lhs, rhs, branch = b, i_over_p_r(spec, i, r) * a, "branch-2"
        if lhs != rhs:
            return EarnestnessVerdict(False, Failure(i, branch, lhs.digits, rhs.digits),
                                      spec.M, i)
    return EarnestnessVerdict(True, None, spec.M, T - 1)


def is_pinf_earnest(f: Series, delta: DifferentialForm, g: RingElement) -> EarnestnessVerdict:
    """p^infinity-earnestness for the scalar ``g`` (equal characteristic)."""
    spec = f.spec
    if spec.is_mixed:
        raise WrongCharacteristic("p^inf-earnestness needs an equal-characteristic ring")
    T = min(f.T, delta.T + 1)
    for i in range(1, T):
        a, b = f.coeffs[i], delta.b(i)
        if i % spec.p:
            lhs, rhs, branch = a, g * b * _prime_to_p_inverse(spec, i), "branch-1"
        else:
            lhs, rhs, branch = b, RingElement.zero(spec), "branch-2"
        if lhs != rhs:
            return EarnestnessVerdict(False, Failure(i, branch, lhs.digits, rhs.digits),
                                      spec.M, i)
    return EarnestnessVerdict(True, None, spec.M, T - 1)


def lift_earnest(delta: DifferentialForm, p_part: Mapping[int, RingElement | int] | None, r) -> Series:
    """Explicit lift: ``a_i = p**r b_i / i`` off p-multiples, ``a_i = p_part[i]`` on them."""
    spec = delta.spec
    r = _check_r(spec, r)
    p_part = dict(p_part or {})
    for i in p_part:
        if i % spec.p:
            raise ValueError(f"p_part index {i} is not a multiple of p={spec.p}")
    pr = p_power(spec, r)
    T = delta.T
    coeffs = [RingElement.zero(spec)] * T
    if 0 in p_part:
        coeffs[0] = _element(spec, p_part[0])
    for i in range(1, T):
        if i % spec.p:
            coeffs[i] = pr * delta.b(i) * _prime_to_p_inverse(spec, i)
        elif i in p_part:
            coeffs[i] = _element(spec, p_part[i])
    return Series(spec, tuple(coeffs))


def augment_delta(delta: DifferentialForm, f: Series, r) -> DifferentialForm:
    """Replace ``b_i`` on p-multiples by ``(i / p**r) a_i``."""
    spec = delta.spec
    r = _check_r(spec, r)
    coeffs = list(delta.coefficient_series.coeffs)
    for i in range(spec.p, delta.T + 1, spec.p):
        if i < f.T:
            coeffs[i - 1] = i_over_p_r(spec, i, r) * f.coeffs[i]
    return DifferentialForm(Series(spec, tuple(coeffs)))


def _element(spec, value) -> RingElement:
    return value if isinstance(value, RingElement) else RingElement.from_int(spec, value)


def _require_equal_char(spec: RingSpec):
    if spec.is_mixed:
        raise WrongCharacteristic("the exactness criterion is stated in characteristic p")


def is_exact(omega: DifferentialForm) -> bool:
    """A form ``h du`` over ``F_p[[t^(1/N)]][[u]]`` is exact iff every
    coefficient of ``u^i`` with ``i = -1 mod p`` vanishes."""
    spec = omega.spec
    _require_equal_char(spec)
    h = omega.coefficient_series.coeffs
    return all(h[i].is_zero() for i in range(spec.p - 1, len(h), spec.p))


def antiderivative(omega: DifferentialForm) -> Series:
    """``F`` with ``F(0) = 0`` and ``dF = omega`` (the top term of ``omega`` is lost)."""
    spec = omega.spec
    if not is_exact(omega):
        bad = [i for i in range(spec.p - 1, omega.T, spec.p)
               if not omega.coefficient_series.coeffs[i].is_zero()]
        raise NotExact(f"coefficient of u^{bad[0]} du is nonzero and {bad[0] + 1} = 0 mod {spec.p}")
    h = omega.coefficient_series.coeffs
    coeffs = [RingElement.zero(spec)] * omega.T
    for i in range(omega.T - 1):
        if (i + 1) % spec.p:
            coeffs[i + 1] = h[i] * _prime_to_p_inverse(spec, i + 1)
    return Series(spec, tuple(coeffs))


def frobenius_conjugator(f1: Series, f2: Series, eps_index: int) -> Series:
    """Return ``mu`` with ``f1 - f2 = pi**eps_index * mu`` and ``mu`` a series in ``u^p``.

    Such a ``mu`` is the coefficient of the vector field conjugating the two
    lifts.  Raises NotConjugate if the lifts disagree below ``pi**eps_index`` or
    if ``mu`` has a term at an exponent prime to ``p`` (``d mu != 0``).
    """
    spec = f1.spec
    _require_equal_char(spec)
    if f2.spec != spec or f2.T != f1.T:
        raise SpecMismatch("lifts differ in spec or truncation")
    if eps_index < 1:
        raise ValueError("eps_index must be positive")
    diff = f1 - f2
    mu = []
    for i, c in enumerate(diff.coeffs):
        try:
            q = c.divide_by_pi(eps_index)
        except ArithmeticError:
            raise NotConjugate(f"f1 and f2 differ modulo pi^{eps_index} at u^{i}") from None
        if i % spec.p and not q.is_zero():
            raise NotConjugate(f"mu has a term at u^{i}, so d(mu) != 0")
        mu.append(q)
    return Series(spec, tuple(mu))


@dataclass(frozen=True)
class FrobeniusChart:
    """Local presentation ``X = B[u]/(u^(p^(l+1)) - v)``, ``Y = B[x]/(x^(p^l) - v)``."""

    p: int
    level: int
    x_exponent: int
    y_exponent: int
    identity: bool = field(default=False)

    @property
    def x_presentation(self) -> str:
        return f"B[u]/(u^{self.x_exponent} - v)"

    @property
    def y_presentation(self) -> str:
        if self.y_exponent == 1:
            return "B[x]/(x - v)"
        return f"B[x]/(x^{self.y_exponent} - v)"

    def check(self, f: Series, delta: DifferentialForm, r) -> EarnestnessVerdict:
        """Run the coefficient test on ``0 <= i < p^(l+1)`` in this chart."""
        T = min(self.x_exponent, f.T)
        f_t = Series(f.spec, f.coeffs[:T])
        d_t = DifferentialForm(Series(f.spec, delta.coefficient_series.coeffs[:T]))
        return is_pr_earnest(f_t, d_t, r)


def global_frobenius_form(v: Series, level: int = 0) -> tuple[str, str, FrobeniusChart]:
    """Presentation data for the relative Frobenius chart attached to ``v``.

    ``dv`` must be a basis, i.e. the linear coefficient of ``v`` is a unit.
    """
    spec = v.spec
    if v.T < 2 or not v.coeffs[1].is_unit():
        raise NotABasis("dv is not a basis: linear coefficient of v is not a unit")
    identity = (v.coeffs[1] == RingElement.one(spec)
                and all(c.is_zero() for i, c in enumerate(v.coeffs) if i != 1))
    chart = FrobeniusChart(spec.p, level, spec.p ** (level + 1), spec.p ** level, identity)
    return chart.x_presentation, chart.y_presentation, chart
