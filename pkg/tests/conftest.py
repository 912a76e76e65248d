"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the code paths they check: class
counting by orbit closure under the raw generators, composition checked
through ideal-lattice multiplication and through represented values, point
counts by a direct (x, y) scan.
"""

import random
from math import gcd, isqrt

import pytest

from classforms.quadforms import Form


def xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def random_sl2(rng: random.Random, bound: int = 10):
    """A determinant-one integer matrix with entries of modest size."""
    while True:
        alpha = rng.randint(-bound, bound)
        gamma = rng.randint(-bound, bound)
        if gcd(alpha, gamma) != 1:
            continue
        g, s, t = xgcd(alpha, gamma)
        if g == -1:
            s, t = -s, -t
        # alpha*s + gamma*t = 1 -> matrix ((alpha, -t), (gamma, s))
        beta, delta = -t, s
        shift = rng.randint(-bound, bound)
        # shear keeps det = 1 and varies the completion
        return ((alpha, beta + shift * alpha), (gamma, delta + shift * gamma))


@pytest.fixture
def rng():
    return random.Random(20260808)


# --- orbit-closure class counting oracle -------------------------------------


def class_count_by_orbit_closure(D: int) -> int:
    """Number of classes of primitive forms of discriminant D, by partitioning
    a window of forms into components under the translation and swap moves."""
    amax = isqrt(-D) + 3
    bmax = 2 * amax
    forms = []
    index = {}
    for a in range(1, amax + 1):
        for b in range(-bmax, bmax + 1):
            if (b * b - D) % (4 * a) != 0:
                continue
            c = (b * b - D) // (4 * a)
            if gcd(gcd(a, b), c) != 1:
                continue
            index[(a, b, c)] = len(forms)
            forms.append((a, b, c))
    parent = list(range(len(forms)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    for (a, b, c), i in index.items():
        for b2 in (b + 2 * a, b - 2 * a):
            if abs(b2) <= bmax:
                c2 = (b2 * b2 - D) // (4 * a)
                union(i, index[(a, b2, c2)])
        if c <= amax:
            union(i, index[(c, -b, a)])
    return len({find(i) for i in range(len(forms))})


# --- ideal-lattice multiplication oracle --------------------------------------


def _lattice_from_form(f):
    a, b, _ = f
    return [(2 * a, 0), (-b, 1)]


def _hnf_basis(vectors):
    """Basis ((A, 0), (X2, Y2)) of the lattice spanned by (X, Y) pairs."""
    vecs = [v for v in vectors if v != (0, 0)]
    e2 = None
    zeros = []
    for v in vecs:
        if v[1] == 0:
            zeros.append(v[0])
        elif e2 is None:
            e2 = v
        else:
            g, s, t = xgcd(e2[1], v[1])
            new = (s * e2[0] + t * v[0], g)
            # the combination leftover has Y = 0
            zeros.append((e2[1] // g) * v[0] - (v[1] // g) * e2[0])
            e2 = new
    if e2 is None:
        raise ValueError("rank-deficient lattice")
    A = 0
    for z in zeros:
        A = gcd(A, z)
    if e2[1] < 0:
        e2 = (-e2[0], -e2[1])
    return abs(A), e2


def ideal_product_form(f, g) -> Form:
    """Reduced norm form of the product of the ideals attached to f and g.

    Multiplies the module generators, row-reduces to a two-element basis,
    and reads off the norm form scaled by the ideal norm.  Completely
    independent of the composition code path.
    """
    from classforms.quadforms import reduce as reduce_form

    D = Form(*f).discriminant()
    assert D == Form(*g).discriminant()
    prods = []
    for x1, y1 in _lattice_from_form(f):
        for x2, y2 in _lattice_from_form(g):
            X = (x1 * x2 + y1 * y2 * D) // 2
            Y = (x1 * y2 + y1 * x2) // 2
            prods.append((X, Y))
    A, (X2, Y2) = _hnf_basis(prods)
    # norm of the module, relative to the maximal order's covolume
    norm2 = A * Y2  # = 2 * N(module)
    assert A * A % (2 * norm2) == 0 and (X2 * X2 - D * Y2 * Y2) % (2 * norm2) == 0
    assert (A * X2) % norm2 == 0
    aa = A * A // (2 * norm2)
    # minus sign: the (a, (-b+sqrt D)/2) correspondence pairs the form with the
    # conjugate-oriented basis, otherwise every product lands in the inverse class
    bb = -(A * X2 // norm2)
    cc = (X2 * X2 - D * Y2 * Y2) // (2 * norm2)
    return reduce_form(Form(aa, bb, cc))


def represents(f, value: int) -> bool:
    """Exact check that f(x, y) = value has an integer solution.

    y is bounded by 4a*value/|D| for a positive definite form, and x then
    solves a quadratic with integer discriminant.
    """
    f = Form(*f)
    a, b, c = f
    D = f.discriminant()
    if value < 0:
        return False
    ymax = isqrt(4 * a * value // (-D)) + 1
    for y in range(-ymax, ymax + 1):
        disc = (b * y) ** 2 - 4 * a * (c * y * y - value)
        if disc < 0:
            continue
        s = isqrt(disc)
        if s * s != disc:
            continue
        if (-b * y + s) % (2 * a) == 0 or (-b * y - s) % (2 * a) == 0:
            return True
    return False


# --- direct point-count oracle -------------------------------------------------


def naive_point_count(q: int, a: int, b: int) -> int:
    """Count points of y^2 = x^3 + ax + b over F_q by scanning all (x, y)."""
    count = 1  # point at infinity
    for x in range(q):
        rhs = (x * x * x + a * x + b) % q
        for y in range(q):
            if y * y % q == rhs:
                count += 1
    return count
