"""Truncated Laurent series with exact rational coefficients.

A QSeries stores its valuation (lowest exponent), a coefficient list indexed
from the valuation, and an exclusive truncation order.  Arithmetic never
fabricates terms past the truncation: the order of a product or inverse is
the smallest order the inputs support.  Everything is exact -- coefficients
are Python ints or Fractions, never floats -- so the trace-formula
integrality check below is a hard assertion rather than a tolerance.
"""

from fractions import Fraction
from functools import lru_cache
from math import isqrt


class QSeries:
    __slots__ = ("valuation", "coeffs", "truncation_order")

    def __init__(self, valuation, coeffs, truncation_order):
        if truncation_order != valuation + len(coeffs):
            raise ValueError("coefficient list does not span valuation..truncation")
        self.valuation = valuation
        self.coeffs = list(coeffs)
        self.truncation_order = truncation_order

    @classmethod
    def from_dict(cls, data, truncation_order):
        if not data:
            return cls(truncation_order, [], truncation_order)
        v = min(data)
        coeffs = [data.get(i, 0) for i in range(v, truncation_order)]
        return cls(v, coeffs, truncation_order)

    def coefficient(self, n):
        """Coefficient of q^n; raises for exponents past the truncation."""
        if n >= self.truncation_order:
            raise IndexError(f"exponent {n} is beyond truncation {self.truncation_order}")
        if n < self.valuation:
            return 0
        return self.coeffs[n - self.valuation]

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        lo = min(self.valuation, other.valuation)
        hi = min(self.truncation_order, other.truncation_order)
        return all(self.coefficient(n) == other.coefficient(n) for n in range(lo, hi))

    def __repr__(self):
        head = ", ".join(
            f"q^{n}: {self.coefficient(n)}"
            for n in range(self.valuation, min(self.valuation + 4, self.truncation_order))
        )
        return f"QSeries({head}, ... O(q^{self.truncation_order}))"

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            if self.truncation_order <= 0:
                raise ValueError("cannot add a constant below the truncation order")
            other = QSeries.from_dict({0: other}, self.truncation_order)
        order = min(self.truncation_order, other.truncation_order)
        v = min(self.valuation, other.valuation)
        coeffs = [self.coefficient(n) + other.coefficient(n) for n in range(v, order)]
        return QSeries(v, coeffs, order).trimmed()

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.valuation, [-c for c in self.coeffs], self.truncation_order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QSeries(
                self.valuation, [c * other for c in self.coeffs], self.truncation_order
            )
        # relative precisions add up at the valuations
        order = min(
            self.truncation_order + other.valuation,
            other.truncation_order + self.valuation,
        )
        v = self.valuation + other.valuation
        n = order - v
        out = [0] * n
        for i, ci in enumerate(self.coeffs):
            if ci == 0 or i >= n:
                continue
            for j, cj in enumerate(other.coeffs[: n - i]):
                if cj:
                    out[i + j] += ci * cj
        return QSeries(v, out, order)

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse; needs a nonzero leading coefficient."""
        if not self.coeffs or self.coeffs[0] == 0:
            raise ZeroDivisionError("series inversion needs a nonzero leading coefficient")
        lead = self.coeffs[0]
        n = self.truncation_order - self.valuation
        inv0 = Fraction(1, lead) if not (isinstance(lead, int) and abs(lead) == 1) else (1 if lead == 1 else -1)
        out = [0] * n
        out[0] = inv0
        for k in range(1, n):
            acc = 0
            for j in range(1, k + 1):
                cj = self.coeffs[j] if j < len(self.coeffs) else 0
                if cj:
                    acc += cj * out[k - j]
            out[k] = -inv0 * acc
        return QSeries(-self.valuation, out, n - self.valuation)

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        n = self.truncation_order - self.valuation
        result = QSeries(0, [1] + [0] * (n - 1), n)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, m):
        """Multiply by q^m."""
        return QSeries(self.valuation + m, self.coeffs, self.truncation_order + m)

    def trimmed(self):
        """Drop leading zero coefficients (normalizes the valuation)."""
        i = 0
        while i < len(self.coeffs) and self.coeffs[i] == 0:
            i += 1
        return QSeries(self.valuation + i, self.coeffs[i:], self.truncation_order)

    def substitute_power(self, m, order):
        """The series in q^m (exponents scaled by m), truncated at `order`."""
        data = {}
        for i, c in enumerate(self.coeffs):
            e = (self.valuation + i) * m
            if e < order and c:
                data[e] = c
        if self.truncation_order * m < order:
            raise ValueError("input series is too short for the requested order")
        out = QSeries.from_dict(data, order)
        if not out.coeffs:
            return QSeries(0, [0] * order, order)
        return out


def one(order):
    return QSeries(0, [1] + [0] * (order - 1), order)


@lru_cache(maxsize=None)
def euler_product(order: int) -> QSeries:
    """prod_{n>=1} (1 - q^n), expanded by the pentagonal-number theorem."""
    coeffs = [0] * order
    coeffs[0] = 1
    k = 1
    while True:
        e1 = k * (3 * k - 1) // 2
        e2 = k * (3 * k + 1) // 2
        if e1 >= order and e2 >= order:
            break
        sign = -1 if k % 2 else 1
        if e1 < order:
            coeffs[e1] = sign
        if e2 < order:
            coeffs[e2] = sign
        k += 1
    return QSeries(0, coeffs, order)


def delta_series(order: int) -> QSeries:
    """q prod (1 - q^n)^24; the coefficient of q^n is tau(n)."""
    if order < 2:
        raise ValueError("order must be at least 2")
    return (euler_product(order - 1) ** 24).shift(1)


def inverse_delta_series(order: int) -> QSeries:
    """1/Delta = q^-1 + 24 + 324 q + ...; valuation -1."""
    return delta_series(order + 2).inverse()


def _sigma_table(order: int, power: int):
    sig = [0] * order
    for d in range(1, order):
        dp = d**power
        for m in range(d, order, d):
            sig[m] += dp
    return sig


def eisenstein_E2(order: int) -> QSeries:
    """E2 = 1 - 24 sum sigma_1(n) q^n (quasimodular)."""
    if order < 1:
        raise ValueError("order must be at least 1")
    sig = _sigma_table(order, 1)
    return QSeries(0, [1] + [-24 * s for s in sig[1:]], order)


def eisenstein_E4(order: int) -> QSeries:
    """E4 = 1 + 240 sum sigma_3(n) q^n."""
    if order < 1:
        raise ValueError("order must be at least 1")
    sig = _sigma_table(order, 3)
    return QSeries(0, [1] + [240 * s for s in sig[1:]], order)


def j_series(order: int) -> QSeries:
    """Klein j = E4^3 / Delta = q^-1 + 744 + 196884 q + ..."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    e4 = eisenstein_E4(order + 2)
    return (e4**3) * inverse_delta_series(order)


def partition_numbers(nmax: int):
    """p(0..nmax) by the pentagonal-number recurrence."""
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    p = [1] + [0] * nmax
    for n in range(1, nmax + 1):
        total = 0
        k = 1
        while True:
            g1 = k * (3 * k - 1) // 2
            g2 = k * (3 * k + 1) // 2
            if g1 > n and g2 > n:
                break
            sign = -1 if k % 2 == 0 else 1
            if g1 <= n:
                total += sign * p[n - g1]
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return p


def pk_coefficient(k: int, t: int, n: int) -> int:
    """Coefficient of x^(k-2) in 1/(1 - t x + n x^2).

    Computed by the recurrence P_0 = 1, P_1 = t, P_i = t P_{i-1} - n P_{i-2}.
    """
    if k < 4 or k % 2 != 0:
        raise ValueError("weight must be an even integer >= 4")
    prev, cur = 1, t
    for _ in range(k - 3):
        prev, cur = cur, t * cur - n * prev
    return cur


def hecke_trace(k: int, n: int) -> int:
    """Trace of the n-th Hecke operator on weight-k cusp forms for SL2(Z).

    -(1/2) sum_{t^2 <= 4n} P_k(t, n) H(t^2 - 4n) - (1/2) sum_{dd'=n} min(d, d')^(k-1),
    with H the stabilizer-weighted count from quadforms.hurwitz (H(0) = -1/12).
    The result must be an integer; a non-integer signals a broken H convention.
    """
    from .quadforms import hurwitz

    if k < 4 or k % 2 != 0:
        raise ValueError("weight must be an even integer >= 4")
    if n < 1:
        raise ValueError("index must be positive")
    tmax = isqrt(4 * n)
    elliptic = Fraction(0)
    for t in range(-tmax, tmax + 1):
        h = hurwitz(t * t - 4 * n)
        if h:
            elliptic += pk_coefficient(k, t, n) * h
    boundary = sum(min(d, n // d) ** (k - 1) for d in _divisors(n))
    total = -elliptic / 2 - Fraction(boundary, 2)
    if total.denominator != 1:
        raise ArithmeticError(f"trace came out non-integral: {total}")
    return int(total)


def _divisors(n: int):
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def tau_prime_display(p: int) -> Fraction:
    """One-sided variant of the weight-12 trace at a prime, evaluated verbatim:

    -(1/2) sum_{t=0}^{floor(sqrt p)} (t^10 - 9pt^8 + 28p^2t^6 - 35p^3t^4
    + 15p^4t^2 - p^5) H(t^2 - 4p) - (1/2) sum_{dd'=p} min(d,d')^11.

    The one-sided, sqrt(p)-bounded t-sum disagrees with the two-sided
    2 sqrt(n) window of hecke_trace; this function exists so the discrepancy
    can be reported.  hecke_trace(12, p) is the value to trust.
    """
    from .quadforms import hurwitz

    total = Fraction(0)
    for t in range(0, isqrt(p) + 1):
        poly = (
            t**10
            - 9 * p * t**8
            + 28 * p**2 * t**6
            - 35 * p**3 * t**4
            + 15 * p**4 * t**2
            - p**5
        )
        total += poly * hurwitz(t * t - 4 * p)
    boundary = sum(min(d, p // d) ** 11 for d in _divisors(p))
    return -total / 2 - Fraction(boundary, 2)
