"""Positive definite binary quadratic forms.

A form [a, b, c] stands for a*x^2 + b*x*y + c*y^2 with integer coefficients.
This module covers reduction, enumeration of reduced representatives, class
numbers, and the two square-divisor class-number sums (the stabilizer-weighted
one with weights 1/2 and 1/3 at discriminants -4 and -3, and the unweighted
one used for curve counts).  Everything here is a pure function on values.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt


@dataclass(frozen=True, order=True)
class Form:
    a: int
    b: int
    c: int

    def __iter__(self):
        yield self.a
        yield self.b
        yield self.c

    def __repr__(self):
        return f"[{self.a},{self.b},{self.c}]"

    def discriminant(self):
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self):
        return gcd(gcd(self.a, self.b), self.c) == 1

    def is_positive_definite(self):
        return self.a > 0 and self.discriminant() < 0

    def __call__(self, x, y):
        return self.a * x * x + self.b * x * y + self.c * y * y


def as_form(f) -> Form:
    """Coerce a Form or any (a, b, c) triple to a Form."""
    if isinstance(f, Form):
        return f
    a, b, c = f
    return Form(int(a), int(b), int(c))


def discriminant(f) -> int:
    return as_form(f).discriminant()


def _require_positive_definite(f: Form):
    if not f.is_positive_definite():
        raise ValueError(f"form {f} is not positive definite")


def is_fundamental(D: int) -> bool:
    """Whether D is the discriminant of an imaginary quadratic field.

    True iff D < 0 and either D = 1 (mod 4) square-free, or D = 0 (mod 4)
    with D/4 square-free and congruent to 2 or 3 mod 4.
    """
    if D >= 0:
        raise ValueError("only negative discriminants are supported")
    m = -D
    if m % 4 == 3:
        return _is_squarefree(m)
    if m % 4 == 0:
        m4 = m // 4
        return m4 % 4 in (1, 2) and _is_squarefree(m4)
    return False


def _is_squarefree(n: int) -> bool:
    if n % 4 == 0:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


def is_reduced(f) -> bool:
    """Reduced means -a < b <= a < c, or 0 <= b <= a = c."""
    f = as_form(f)
    _require_positive_definite(f)
    a, b, c = f
    return (-a < b <= a < c) or (0 <= b <= a == c)


def reduce(f) -> Form:
    """The unique reduced form equivalent to f.

    Alternates a translation normalizing b into (-a, a] with the swap
    (a,b,c) -> (c,-b,a) whenever a > c; ends by fixing the b >= 0 boundary
    convention when a = c.  Discriminant is preserved and the map is
    idempotent.
    """
    f = as_form(f)
    _require_positive_definite(f)
    a, b, c = f
    while True:
        if not (-a < b <= a):
            r = (a - b) // (2 * a)
            b, c = b + 2 * r * a, a * r * r + b * r + c
        if a > c:
            a, b, c = c, -b, a
            continue
        break
    if a == c and b < 0:
        b = -b
    return Form(a, b, c)


def apply_sl2(f, m) -> Form:
    """Transform f by M = ((alpha, beta), (gamma, delta)) in SL2(Z).

    Returns the form g with g(x, y) = f(alpha*x + beta*y, gamma*x + delta*y).
    """
    f = as_form(f)
    (al, be), (ga, de) = m
    if al * de - be * ga != 1:
        raise ValueError("matrix is not unimodular")
    a, b, c = f
    a2 = a * al * al + b * al * ga + c * ga * ga
    b2 = 2 * a * al * be + b * (al * de + be * ga) + 2 * c * ga * de
    c2 = a * be * be + b * be * de + c * de * de
    return Form(a2, b2, c2)


def _check_disc(D: int):
    if D >= 0:
        raise ValueError("discriminant must be negative")
    if D % 4 not in (0, 1):
        raise ValueError("discriminant must be 0 or 1 mod 4")


def enumerate_reduced(D: int, primitive_only: bool = True):
    """All reduced forms of discriminant D < 0, sorted by (a, b, c).

    3a^2 <= |D| bounds the search, so the scan terminates.  By default only
    primitive forms are listed (their count is the class number h(D)); with
    primitive_only=False imprimitive forms are included as well, which is
    the population the weighted class-number sum counts.
    """
    _check_disc(D)
    forms = []
    amax = isqrt(-D // 3)
    for a in range(1, amax + 1):
        # b matches the parity of D and lies in (-a, a]
        b0 = -a + 1
        if (b0 - D) % 2 != 0:
            b0 += 1
        for b in range(b0, a + 1, 2):
            num = b * b - D
            if num % (4 * a) != 0:
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if c == a and b < 0:
                continue
            if primitive_only and gcd(gcd(a, b), c) != 1:
                continue
            forms.append(Form(a, b, c))
    forms.sort(key=lambda f: (f.a, f.b, f.c))
    return forms


@lru_cache(maxsize=None)
def class_number(D: int) -> int:
    """h(D): the number of classes of primitive reduced forms."""
    return len(enumerate_reduced(D))


def stabilizer_weight(f) -> Fraction:
    """1/3 for the shape [a,a,a], 1/2 for [a,0,a], 1 otherwise.

    The denominators count the nontrivial stabilizer of the form; among
    reduced forms only those two shapes have one.
    """
    f = as_form(f)
    if not is_reduced(f):
        raise ValueError(f"{f} is not reduced")
    a, b, c = f
    if a == b == c:
        return Fraction(1, 3)
    if b == 0 and a == c:
        return Fraction(1, 2)
    return Fraction(1)


@lru_cache(maxsize=None)
def hurwitz(n: int) -> Fraction:
    """Stabilizer-weighted class-number sum H(n).

    H(0) = -1/12, H(n) = 0 for n > 0 and for n = 2, 3 (mod 4).  Otherwise
    H(n) = sum over d^2 | n of h(n/d^2) weighted by 1/3 when the inner
    discriminant is -3 and by 1/2 when it is -4.  Equivalently: the count of
    all (not necessarily primitive) reduced forms of discriminant n, with
    forms of shape [a,a,a] and [a,0,a] counted 1/3 and 1/2.  12*H(n) is
    always an integer.
    """
    if n > 0:
        return Fraction(0)
    if n == 0:
        return Fraction(-1, 12)
    if n % 4 not in (0, 1):
        return Fraction(0)
    total = Fraction(0)
    d = 1
    while d * d <= -n:
        if n % (d * d) == 0:
            inner = n // (d * d)
            if inner % 4 in (0, 1):
                if inner == -3:
                    total += Fraction(1, 3)
                elif inner == -4:
                    total += Fraction(1, 2)
                else:
                    total += class_number(inner)
        d += 1
    return total


@lru_cache(maxsize=None)
def kronecker_class_number(n: int) -> int:
    """Unweighted square-divisor sum: sum of h(n/d^2) over d^2 | n.

    Unlike hurwitz(), every class counts 1 (so the value at -3 and -4 is 1,
    not 1/3 or 1/2).  This is the count that matches censuses of elliptic
    curves per trace; the two sums differ exactly when n/d^2 hits -3 or -4.
    """
    if n >= 0 or n % 4 not in (0, 1):
        return 0
    total = 0
    d = 1
    while d * d <= -n:
        if n % (d * d) == 0:
            inner = n // (d * d)
            if inner % 4 in (0, 1):
                total += class_number(inner)
        d += 1
    return total
