"""Kloosterman sums, Bessel kernels, and Rademacher-type expansions.

The c-sums here are truncated at params.cmax and evaluated with mpmath at a
configurable working precision.  The weight-12 sum for the cusp-form
coefficients converges only conditionally, so its partial sums are tail-
averaged; the positive-weight kernels (I-Bessel) converge absolutely and
need no such treatment.

The second half of the module evaluates the weight -2 level-6 function G and
its weight-0 completion P on CM points, and sums P over the level-6 classes
of forms of discriminant 1 - 24n.  That trace is an integer multiple of the
partition number p(n), which is the acceptance check for all of it.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, log, pi, sqrt

import mpmath as mp

from .quadforms import Form, apply_sl2, enumerate_reduced
from . import qseries

_LN2 = log(2.0)


class PrecisionError(ArithmeticError):
    """Requested tolerance cannot be met; carries the achieved residual."""


@dataclass(frozen=True)
class RademacherParams:
    cmax: int = 30
    precision_digits: int = 30

    def __post_init__(self):
        if self.cmax < 1:
            raise ValueError("cmax must be at least 1")
        if self.precision_digits < 15:
            raise ValueError("precision_digits must be at least 15")


def kloosterman(m: int, n: int, c: int, precision_digits: int = 30) -> float:
    """K(m, n; c) = sum over units d mod c of exp(2 pi i (m dbar + n d)/c).

    The sum is real (d and its inverse pair off); the imaginary part is
    checked to vanish to 1e-10 relative.  K(m, n; 1) = 1: the unit group mod
    1 is the single degenerate residue with an empty exponent.
    """
    return float(_kloosterman_mpf(m, n, c, precision_digits))


def _kloosterman_mpf(m: int, n: int, c: int, precision_digits: int):
    if c < 1:
        raise ValueError("modulus must be positive")
    if c == 1:
        return mp.mpf(1)
    with mp.workdps(precision_digits):
        total = mp.mpc(0)
        for d in range(1, c):
            if gcd(d, c) != 1:
                continue
            dbar = pow(d, -1, c)
            total += mp.expjpi(2 * ((m * dbar + n * d) % c) / mp.mpf(c))
        re, im = total.real, total.imag
        if abs(im) > 1e-10 * max(1.0, abs(re)):
            raise ArithmeticError(f"K({m},{n};{c}) has stray imaginary part {im}")
        return re


def bessel_I(order: int, x, precision_digits: int = 30) -> float:
    """Modified Bessel I_order(x) by the ascending series, x > 0."""
    return float(_bessel_mpf(order, x, precision_digits, signed=False))


def bessel_J(order: int, x, precision_digits: int = 30) -> float:
    """Bessel J_order(x) by the (alternating) ascending series, x > 0."""
    return float(_bessel_mpf(order, x, precision_digits, signed=True))


def _bessel_mpf(nu: int, x, precision_digits: int, signed: bool):
    if nu < 0:
        raise ValueError("order must be a nonnegative integer")
    if x <= 0:
        raise ValueError("argument must be positive")
    if x > 1e5:
        raise OverflowError("argument exceeds the configured evaluation range")
    with mp.workdps(precision_digits + 10):
        half = mp.mpf(x) / 2
        term = half**nu / mp.factorial(nu)
        total = term
        k = 1
        tol = mp.mpf(10) ** (-(precision_digits + 5))
        while True:
            ratio = half * half / (k * (k + nu))
            term = term * ratio
            total += -term if (signed and k % 2) else term
            # once the terms decay geometrically the tail is below the last term
            if ratio < mp.mpf("0.5") and abs(term) < tol * max(mp.mpf(1), abs(total)):
                break
            k += 1
            if k > 10_000_000:
                raise ArithmeticError("Bessel series failed to converge")
        return total


def rademacher_inv_delta_partials(n: int, params: RademacherParams):
    """Cumulative truncations of the 1/Delta coefficient sum, c = 1..cmax.

    Returned as mpf values at the working precision so convergence is
    observable beneath double-precision granularity.
    """
    if n < 1:
        raise ValueError("n must be positive")
    with mp.workdps(params.precision_digits):
        prefactor = 2 * mp.pi / mp.mpf(n) ** mp.mpf("6.5")
        arg = 4 * mp.pi * mp.sqrt(n)
        partials = []
        acc = mp.mpf(0)
        for c in range(1, params.cmax + 1):
            k = _kloosterman_mpf(-1, n, c, params.precision_digits)
            acc += k / c * _bessel_mpf(13, arg / c, params.precision_digits, signed=False)
            partials.append(prefactor * acc)
    return partials


def rademacher_inv_delta(n: int, params: RademacherParams = RademacherParams()) -> float:
    """Truncated sum converging to the q^n coefficient of 1/Delta."""
    return float(rademacher_inv_delta_partials(n, params)[-1])


def rademacher_tau_partials(n: int, params: RademacherParams):
    """Partial sums (before tail averaging) of the weight-12 coefficient sum,
    without the calibration constant: 2 pi n^(11/2) sum K(1,n;c)/c J_11(4 pi sqrt(n)/c)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    with mp.workdps(params.precision_digits):
        prefactor = 2 * mp.pi * mp.mpf(n) ** mp.mpf("5.5")
        arg = 4 * mp.pi * mp.sqrt(n)
        partials = []
        acc = mp.mpf(0)
        for c in range(1, params.cmax + 1):
            k = _kloosterman_mpf(1, n, c, params.precision_digits)
            acc += k / c * _bessel_mpf(11, arg / c, params.precision_digits, signed=True)
            partials.append(float(prefactor * acc))
    return partials


def _tail_average(partials, window: int = 10) -> float:
    """Average of the last few partial sums; damps conditional oscillation."""
    w = min(window, len(partials))
    return sum(partials[-w:]) / w


def calibrate_beta(params: RademacherParams = RademacherParams(cmax=200)) -> float:
    """Fit the normalization of the weight-12 sum from tau(2) = -24.

    The reference value 2.840... is a norm ratio not derivable from the
    truncated sum itself, so it is calibrated once here and frozen; the test
    suite checks the same constant fits other indices.
    """
    target = qseries.delta_series(4).coefficient(2)  # -24
    raw = _tail_average(rademacher_tau_partials(2, params))
    return raw / target


@lru_cache(maxsize=8)
def _beta_cached(cmax: int, precision_digits: int) -> float:
    return calibrate_beta(RademacherParams(cmax, precision_digits))


def rademacher_tau(n: int, params: RademacherParams = RademacherParams(cmax=200),
                   beta: float | None = None) -> float:
    """Tail-averaged weight-12 Rademacher sum for tau(n), n >= 2."""
    if beta is None:
        beta = _beta_cached(params.cmax, params.precision_digits)
    return _tail_average(rademacher_tau_partials(n, params)) / beta


def rd_partials(d: int, n: int, params: RademacherParams):
    """Partial sums of r_{d,n} = 2 pi sqrt(d/n) sum K(-d,n;c)/c I_1(4 pi sqrt(dn)/c)."""
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    with mp.workdps(params.precision_digits):
        prefactor = 2 * mp.pi * mp.sqrt(mp.mpf(d) / n)
        arg = 4 * mp.pi * mp.sqrt(mp.mpf(d) * n)
        partials = []
        acc = mp.mpf(0)
        for c in range(1, params.cmax + 1):
            k = _kloosterman_mpf(-d, n, c, params.precision_digits)
            acc += k / c * _bessel_mpf(1, arg / c, params.precision_digits, signed=False)
            partials.append(float(prefactor * acc))
    return partials


def rd_coefficient(d: int, n: int, params: RademacherParams = RademacherParams(cmax=200)) -> float:
    """Coefficient r_{d,n} of the principal-part-q^(-d) Rademacher series."""
    return rd_partials(d, n, params)[-1]


# ---------------------------------------------------------------------------
# the weight -2 / weight 0 pair on level 6, and traces over CM points
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4)
def _g2_coefficients(order: int):
    """Integer coefficients of 2*G from exponent -1 up to `order` (exclusive).

    G = (1/2) (E2(q) - 2 E2(q^2) - 3 E2(q^3) + 6 E2(q^6)) / (eta-quotient of
    squares at levels 1,2,3,6), and the eta quotient contributes exactly q^1
    times an integer series with unit leading coefficient, so 2G has integer
    coefficients starting at q^-1.
    """
    n = order + 1
    e2 = qseries.eisenstein_E2(n)
    num = (
        e2
        - 2 * e2.substitute_power(2, n)
        - 3 * e2.substitute_power(3, n)
        + 6 * e2.substitute_power(6, n)
    )
    den = qseries.euler_product(n)
    for m in (2, 3, 6):
        den = den * qseries.euler_product((n + m - 1) // m).substitute_power(m, n)
    den = den * den
    series = num * den.inverse()
    return [int(series.coefficient(k)) for k in range(0, order + 1)]  # exponent k-1


def eval_G(tau, order: int = 400, precision_digits: int = 40):
    """Value of G at tau (upper half-plane) from its q-expansion."""
    if not _im_positive(tau):
        raise ValueError("tau must lie in the upper half-plane")
    g2 = _g2_coefficients(order)
    with mp.workdps(precision_digits):
        t = mp.mpc(tau)
        q = mp.expjpi(2 * t)
        _check_tail(g2, abs(q), order, precision_digits)
        qpow = 1 / q
        total = mp.mpc(0)
        for m in range(-1, order):
            total += g2[m + 1] * qpow
            qpow *= q
        return complex(total / 2)


def eval_P(tau, order: int = 400, precision_digits: int = 40) -> float:
    """The weight-0 completion at tau: -(sum of m g_m q^m) - G(tau)/(2 pi Im tau).

    Real when the class of tau is its own inverse; a residual imaginary part
    above 1e-8 relative raises PrecisionError.  Values at a general CM point
    come in conjugate pairs (use eval_P_complex), and only their sum over a
    full discriminant is real.
    """
    val = eval_P_complex(tau, order, precision_digits)
    re, im = val.real, val.imag
    if abs(im) > 1e-8 * max(1.0, abs(re)):
        raise PrecisionError(f"P(tau) has imaginary residual {im}")
    return re


def eval_P_complex(tau, order: int = 400, precision_digits: int = 40):
    """The weight-0 completion without the realness assertion."""
    if not _im_positive(tau):
        raise ValueError("tau must lie in the upper half-plane")
    g2 = _g2_coefficients(order)
    with mp.workdps(precision_digits):
        t = mp.mpc(tau)
        q = mp.expjpi(2 * t)
        _check_tail(g2, abs(q), order, precision_digits)
        qpow = 1 / q
        g_val = mp.mpc(0)
        dg_val = mp.mpc(0)
        for m in range(-1, order):
            c = g2[m + 1]
            if c:
                g_val += c * qpow
                dg_val += m * c * qpow
            qpow *= q
        g_val /= 2
        dg_val /= 2
        y = t.imag
        total = -dg_val - g_val / (2 * mp.pi * y)
        return complex(total)


def _check_tail(g2, qabs, order, tail_tol: float = 1e-9):
    # log-scale estimate: the last kept term, with a factor `order` of slack
    c = abs(g2[-1])
    log10_tail = (
        (c.bit_length() * _LN2 if c else -1e9) + (order - 1) * log(float(qabs)) + log(order)
    ) / log(10.0)
    if log10_tail > log(tail_tol) / log(10.0):
        raise PrecisionError(
            f"truncation order {order} leaves tail ~1e{log10_tail:.0f} at |q|={float(qabs):.4f}"
        )


def _im_positive(tau) -> bool:
    return complex(tau).imag > 0


@dataclass(frozen=True)
class CMPoint:
    """A form [a,b,c] with 6 | a, b = 1 mod 12, and its upper-half-plane root."""

    form: Form

    @property
    def tau(self) -> complex:
        a, b, c = self.form
        disc = b * b - 4 * a * c
        return complex(-b, (-disc) ** 0.5) / (2 * a)

    def tau_mp(self, precision_digits: int):
        a, b, c = self.form
        disc = b * b - 4 * a * c
        with mp.workdps(precision_digits):
            return mp.mpc(-b, mp.sqrt(-disc)) / (2 * a)


def _unimodular_completion(x: int, y: int):
    # returns ((x, u), (y, v)) with x v - y u = 1
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    if old_r == -1:
        old_s, old_t = -old_s, -old_t
    # x*old_s + y*old_t = 1
    return ((x, -old_t), (y, old_s))


def _level_rep(f: Form, search_limit: int = 48):
    """An equivalent form with 6 | a and b = 1 mod 12, minimizing a.

    b mod 12 is rigid under completion choice and translation once (x, y) is
    fixed (both move b by multiples of 2a, and 12 | 2a), so each coprime pair
    with 6 | f(x, y) is tested for the b = 1 residue directly.
    """
    best = None
    for limit in (6, 12, 24, search_limit):
        for x in range(-limit, limit + 1):
            for y in range(-limit, limit + 1):
                if gcd(x, y) != 1:
                    continue
                a2 = f(x, y)
                if a2 % 6 != 0:
                    continue
                if best is not None and a2 >= best.a:
                    continue
                g = apply_sl2(f, _unimodular_completion(x, y))
                if g.b % 12 != 1:
                    continue
                b2 = g.b % (2 * g.a)
                c2 = (b2 * b2 - g.discriminant()) // (4 * g.a)
                cand = Form(g.a, b2, c2)
                if best is None or (cand.a, cand.b) < (best.a, best.b):
                    best = cand
        if best is not None:
            return best
    raise ArithmeticError(f"no level-6 representative found for {f} within {search_limit}")


def enumerate_QD(n: int):
    """Representatives of the level-6 classes of discriminant 1 - 24n.

    One representative per SL2(Z) class, normalized to 6 | a, b = 1 mod 12,
    with minimal a over the searched window; distinct SL2(Z) classes can
    never be identified by the smaller group, so the list is pairwise
    inequivalent.  Its length is recorded by callers and expected (not
    required) to be the class number h(1 - 24n).
    """
    if n < 1:
        raise ValueError("n must be positive")
    D0 = 1 - 24 * n
    points = [CMPoint(_level_rep(f)) for f in enumerate_reduced(D0, primitive_only=False)]
    points.sort(key=lambda p: (p.form.a, p.form.b, p.form.c))
    return points


def gamma0_equivalent(f, g, level: int = 6, bound: int = 50) -> bool:
    """Bounded search for a level-`level` matrix taking f to g.

    Certifies inequivalence only up to the entry bound; used as a desk-scale
    certificate on the enumerated representatives.
    """
    f = Form(*f)
    g = Form(*g)
    if f.discriminant() != g.discriminant():
        return False
    for ga in range(-bound, bound + 1):
        if ga % level != 0:
            continue
        for al in range(-bound, bound + 1):
            if ga == 0:
                if abs(al) != 1:
                    continue
                for be in range(-bound, bound + 1):
                    if apply_sl2(f, ((al, be), (0, al))) == g:
                        return True
                continue
            # al*de - be*ga = 1 with be integral
            for de in range(-bound, bound + 1):
                if (al * de - 1) % ga != 0:
                    continue
                be = (al * de - 1) // ga
                if abs(be) > bound:
                    continue
                if apply_sl2(f, ((al, be), (ga, de))) == g:
                    return True
    return False


def trace_singular_moduli(n: int, order: int | None = None,
                          precision_digits: int | None = None) -> float:
    """Sum of P over the level-6 CM points of discriminant 1 - 24n.

    Converges to (24n - 1) p(n) as order and precision grow; the defaults
    are chosen adaptively from the lowest CM point so the tail sits below
    1e-10.  Individual summands are complex (conjugate-paired across inverse
    classes); only the full sum is real, and that realness is asserted to
    1e-8.  PrecisionError carries the residual when the tolerance is missed.
    """
    points = enumerate_QD(n)
    qabs_max = max(_qabs(p) for p in points)
    if order is None:
        order = _auto_order(qabs_max)
    g2 = _g2_coefficients(order)
    if precision_digits is None:
        # largest intermediate term sets the cancellation budget
        peak = max(
            (abs(c).bit_length() * _LN2 if c else 0.0) + m * log(qabs_max)
            for m, c in enumerate(g2, start=-1)
        )
        precision_digits = 30 + max(0, int(peak / log(10.0)) + 5)
    total = complex(0)
    for p in points:
        total += eval_P_complex(p.tau_mp(precision_digits), order, precision_digits)
    if abs(total.imag) > 1e-8 * max(1.0, abs(total.real)):
        raise PrecisionError(f"trace has imaginary residual {total.imag}")
    return total.real


def _qabs(p: CMPoint) -> float:
    a = p.form.a
    disc = p.form.discriminant()
    return float(mp.e ** (-mp.pi * mp.sqrt(-disc) / a))


def _auto_order(qabs: float, tail_log10: float = -14.0) -> int:
    ln_q = log(qabs)
    order = 200
    while order < 40000:
        # coefficient growth of a pole-order-one negative-weight form
        if 4 * pi * sqrt(order) + order * ln_q < tail_log10 * log(10.0):
            return order
        order *= 2
    raise PrecisionError(f"no workable truncation order for |q| = {qabs}")
