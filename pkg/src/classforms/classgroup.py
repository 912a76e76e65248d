"""Composition of binary quadratic forms and class-group structure.

Composition follows Dirichlet: the composite of [a,b,c] and [a',b',c'] has
leading coefficient a*a' and middle coefficient the unique N mod 2aa' with
N = b (mod 2a), N = b' (mod 2a'), N^2 = D (mod 4aa').  When the gcd
precondition gcd(a, a', (b+b')/2) = 1 fails, the second form is first moved
to an equivalent one whose leading coefficient is coprime to 2aD, which makes
the operation total on classes.

Also here: elementary-divisor structure, the 2-torsion count, the form-to-
ideal map, and the class-number statistics and growth-bound evaluations.
"""

from dataclasses import dataclass
from math import gcd, isqrt, log, pi

from . import tables
from .quadforms import Form, apply_sl2, as_form, class_number, enumerate_reduced, reduce

_TABLE_CUTOFF = 512


def _check_disc(D: int):
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError("discriminant must be negative and 0 or 1 mod 4")


def identity(D: int) -> Form:
    """The principal form: [1,0,-D/4] or [1,1,(1-D)/4] by residue of D."""
    _check_disc(D)
    if D % 4 == 0:
        return Form(1, 0, -D // 4)
    return Form(1, 1, (1 - D) // 4)


def inverse(f) -> Form:
    """Reduced representative of the inverse class, via [a,b,c] -> [a,-b,c]."""
    f = as_form(f)
    return reduce(Form(f.a, -f.b, f.c))


def _coprime_representative(g: Form, modulus: int) -> Form:
    """An equivalent form whose leading coefficient is coprime to modulus.

    Searches small coprime (x, y); g(x, y) is then the leading coefficient of
    the transformed form under a unimodular completion of (x, y).
    """
    for radius in range(1, 40):
        for x in range(-radius, radius + 1):
            for y in range(-radius, radius + 1):
                if max(abs(x), abs(y)) != radius and radius > 1:
                    continue
                if gcd(x, y) != 1:
                    continue
                if gcd(g(x, y), modulus) == 1:
                    # complete (x, y) to a determinant-one matrix
                    u, v = _complete_unimodular(x, y)
                    return apply_sl2(g, ((x, u), (y, v)))
    raise ArithmeticError(f"no coprime representative found for {g} mod {modulus}")


def _complete_unimodular(x: int, y: int):
    """(u, v) with x*v - y*u = 1."""
    g0, s, t = _xgcd(x, y)
    assert g0 == 1
    # x*s + y*t = 1  ->  columns (x, y), (-t, s)
    return -t, s


def _xgcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _crt_pair(r1: int, m1: int, r2: int, m2: int):
    """x = r1 (mod m1), x = r2 (mod m2); returns (x, lcm) or None."""
    g, s, _ = _xgcd(m1, m2)
    if (r2 - r1) % g != 0:
        return None
    lcm = m1 // g * m2
    x = (r1 + (r2 - r1) // g * s % (m2 // g) * m1) % lcm
    return x, lcm


def compose(f, g) -> Form:
    """Reduced Dirichlet composite of two primitive forms of equal discriminant."""
    f = as_form(f)
    g = as_form(g)
    D = f.discriminant()
    if D != g.discriminant():
        raise ValueError(f"discriminant mismatch: {D} vs {g.discriminant()}")
    _check_disc(D)
    if not (f.is_primitive() and g.is_primitive()):
        raise ValueError("composition requires primitive forms")
    if gcd(gcd(f.a, g.a), (f.b + g.b) // 2) != 1:
        g = _coprime_representative(g, 2 * f.a * D)
    a1, b1 = f.a, f.b
    a2, b2 = g.a, g.b
    res = _crt_pair(b1, 2 * a1, b2, 2 * a2)
    if res is None:
        raise ArithmeticError("congruences for the middle coefficient are unsolvable")
    x0, lcm = res
    modulus = 4 * a1 * a2
    candidates = [
        n for n in range(x0, x0 + 2 * a1 * a2, lcm) if (n * n - D) % modulus == 0
    ]
    if len(candidates) != 1:
        # the gcd precondition was not actually satisfied
        raise ArithmeticError(f"middle coefficient not unique: {candidates}")
    n = candidates[0]
    return reduce(Form(a1 * a2, n, (n * n - D) // modulus))


def power(f, k: int) -> Form:
    """k-th composition power of the class of f (k >= 0)."""
    f = as_form(f)
    result = identity(f.discriminant())
    base = reduce(f)
    while k > 0:
        if k & 1:
            result = compose(result, base)
        k >>= 1
        if k:
            base = compose(base, base)
    return result


def element_order(f) -> int:
    """Least k >= 1 with the k-th power of f principal; divides h(D)."""
    f = reduce(as_form(f))
    D = f.discriminant()
    e = identity(D)
    acc = f
    k = 1
    h = class_number(D)
    while acc != e:
        acc = compose(acc, f)
        k += 1
        if k > h:
            raise ArithmeticError(f"order of {f} exceeds the class number {h}")
    return k


@dataclass(frozen=True)
class ClassGroupDescription:
    D: int
    representatives: tuple
    elementary_divisors: tuple

    @property
    def order(self):
        out = 1
        for d in self.elementary_divisors:
            out *= d
        return out


def _structure_from_orders(orders):
    """Elementary divisors of a finite abelian group from its order statistics.

    For each prime p, the count of elements killed by p^k is p raised to
    sum_i min(k, lambda_i), which pins down the partition (lambda_i) of
    p-exponents; the per-prime cyclic factors are then aligned largest-first
    across primes and the divisors returned smallest-first.
    """
    if len(orders) == 1:
        return ()
    primes = set()
    for o in orders:
        primes.update(_prime_divisors(o))
    partitions = {}
    for p in sorted(primes):
        exps = [0]
        k = 1
        while True:
            pk = p**k
            count = sum(1 for o in orders if pk % o == 0)
            e = count.bit_length() - 1 if p == 2 else round(log(count) / log(p))
            if p**e != count:
                raise ArithmeticError("kill counts are not a p-group filtration")
            if e == exps[-1] and k > 1:
                break
            exps.append(e)
            k += 1
        # mu_k = exps[k] - exps[k-1] = number of parts >= k
        mu = [exps[k] - exps[k - 1] for k in range(1, len(exps))]
        parts = []
        for k in range(1, len(mu) + 1):
            nxt = mu[k] if k < len(mu) else 0
            parts.extend([k] * (mu[k - 1] - nxt))
        partitions[p] = sorted((p**k for k in parts), reverse=True)
    width = max(len(v) for v in partitions.values())
    divisors = []
    for i in range(width):
        d = 1
        for parts in partitions.values():
            if i < len(parts):
                d *= parts[i]
        divisors.append(d)
    return tuple(sorted(divisors))


def group_structure(D: int) -> ClassGroupDescription:
    """Representatives plus elementary divisors d1 | d2 | ... with product h(D).

    For h up to 512 the full composition table is built first and checked to
    be a commutative group with the expected identity and inverses; element
    orders are then read off the table.  Beyond that size orders are computed
    by direct powering.
    """
    reps = enumerate_reduced(D)
    h = len(reps)
    if h <= _TABLE_CUTOFF:
        orders = _orders_via_table(D, reps)
    else:
        orders = [element_order(f) for f in reps]
    return ClassGroupDescription(D, tuple(reps), _structure_from_orders(orders))


def _orders_via_table(D: int, reps):
    e = identity(D)
    e = reduce(e)
    index = {f: i for i, f in enumerate(reps)}
    table = [[None] * len(reps) for _ in reps]
    for i, f in enumerate(reps):
        for j in range(i, len(reps)):
            fg = compose(f, reps[j])
            if fg not in index:
                raise ArithmeticError(f"composition left the reduced system: {fg}")
            table[i][j] = table[j][i] = index[fg]
    ei = index[e]
    # identity law and inverse existence
    for i in range(len(reps)):
        if table[ei][i] != i:
            raise ArithmeticError("identity law fails in the composition table")
        if not any(table[i][j] == ei for j in range(len(reps))):
            raise ArithmeticError("a class has no inverse in the composition table")
    orders = []
    for i in range(len(reps)):
        k, acc = 1, i
        while acc != ei:
            acc = table[acc][i]
            k += 1
        orders.append(k)
    return orders


def two_torsion_order(D: int) -> int:
    """Number of classes f with f*f principal (equals 2^(g-1), g = #primes | D).

    A reduced form is its own inverse exactly when b = 0, b = a, or a = c, so
    the count is read off the reduced representatives directly; this matches
    counting fixed points of compose(f, f) and is fast enough for scans.
    """
    if not _is_fundamental_int(D):
        raise ValueError("two-torsion count by genus theory needs a fundamental discriminant")
    return sum(1 for f in enumerate_reduced(D) if f.b == 0 or f.b == f.a or f.a == f.c)


def _is_fundamental_int(D: int) -> bool:
    from .quadforms import is_fundamental

    try:
        return is_fundamental(D)
    except ValueError:
        return False


@dataclass(frozen=True)
class IdealDescription:
    """The ideal (a, (-b + sqrt(D))/2) attached to the form [a,b,c]."""

    generator_a: int
    minus_b: int
    D: int

    def __repr__(self):
        return f"({self.generator_a}, ({self.minus_b}+sqrt({self.D}))/2)"


def ideal_from_form(f) -> IdealDescription:
    f = as_form(f)
    D = f.discriminant()
    if not _is_fundamental_int(D):
        raise ValueError("the ideal map is stated for fundamental discriminants")
    if not f.is_primitive():
        raise ValueError("the ideal map needs a primitive form")
    return IdealDescription(f.a, -f.b, D)


def ggz_lower_bound(D: int) -> float:
    """(1/7000) log|D| times the product of (1 - [2 sqrt p]/(p+1)) over p | D, p != |D|."""
    _check_disc(D)
    n = -D
    value = log(n) / 7000.0
    for p in _prime_divisors(n):
        if p == n:
            continue
        value *= 1.0 - isqrt(4 * p) / (p + 1.0)
    return value


def _prime_divisors(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def siegel_reference_curve(D: int, eps: float) -> float:
    """|D|^(1/2 - eps), the comparison curve for class-number growth plots."""
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    return float((-D) ** (0.5 - eps))


def cohen_lenstra_prediction(p: int) -> float:
    """prod_{n>=1} (1 - p^-n), truncated once the tail is below 1e-12."""
    if p == 2:
        raise ValueError("p = 2 is governed by genus theory, not this heuristic")
    if p < 3 or not _is_prime(p):
        raise ValueError("p must be an odd prime")
    value = 1.0
    n = 1
    while True:
        t = float(p) ** -n
        value *= 1.0 - t
        if t < 1e-13:
            return value
        n += 1


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def cl_statistics(p: int, N: int):
    """(count, proportion) of fundamental -N < D < 0 with p not dividing h(D)."""
    if p == 2 or not _is_prime(p):
        raise ValueError("p must be an odd prime")
    limit = N - 1
    if limit < 3:
        return 0, 0.0
    h = tables.class_number_table(limit)
    fund = tables.fundamental_mask(limit)
    total = int(fund.sum())
    count = int((fund & (h % p != 0)).sum())
    return count, count / total


def cg_constant(g: int) -> float:
    """(6/pi^2) (1 - prod_{i>=1} (1 - g^-i))."""
    if g < 2:
        raise ValueError("g must be at least 2")
    prod = 1.0
    i = 1
    while True:
        t = float(g) ** -i
        prod *= 1.0 - t
        if t < 1e-13:
            break
        i += 1
    return 6.0 / pi**2 * (1.0 - prod)


def ng_count(g: int, x: int) -> int:
    """Square-free D <= x whose class group C(-D) has an element of order g.

    C(-D) is read as the class group of Q(sqrt(-D)), i.e. of discriminant -D
    or -4D as forced by the residue of D mod 4.  An abelian group has an
    element of order g iff g divides its exponent.
    """
    if g < 2 or x < 1:
        raise ValueError("need g >= 2 and x >= 1")
    sf = tables.squarefree_mask(x)
    count = 0
    for d in range(1, x + 1):
        if not sf[d]:
            continue
        disc = -d if d % 4 == 3 else -4 * d
        desc = group_structure(disc)
        exponent = desc.elementary_divisors[-1] if desc.elementary_divisors else 1
        if exponent % g == 0:
            count += 1
    return count
