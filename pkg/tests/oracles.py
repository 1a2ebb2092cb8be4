"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here imports the package's arithmetic: elements are digit tuples
(constant term first) and multiplication is schoolbook polynomial product
followed by reduction.
"""

import itertools


def poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_divmod_rem(a, b, p):
    a = poly_trim(a)
    b = poly_trim(b)
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a = poly_trim(a)
    return a


def naive_irreducible(poly, p):
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not poly_divmod_rem(poly, list(low) + [1], p):
                return False
    return True


def naive_smallest_irreducible(p, h):
    if h == 1:
        return (0, 1)
    # lexicographic on (c0, c1, ..., c_{h-1}): itertools.product varies the last slot fastest
    for low in itertools.product(range(p), repeat=h):
        cand = list(low) + [1]
        if naive_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial")


class NaiveField:
    def __init__(self, p, h, modulus):
        self.p, self.h, self.modulus = p, h, list(modulus)
        self.q = p ** h

    def digits(self, v):
        return tuple((v // self.p ** i) % self.p for i in range(self.h))

    def index(self, d):
        return sum(c * self.p ** i for i, c in enumerate(d))

    def add(self, a, b):
        return self.index([(x + y) % self.p for x, y in zip(self.digits(a), self.digits(b))])

    def neg(self, a):
        return self.index([(-x) % self.p for x in self.digits(a)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.h)
        for i, x in enumerate(da):
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % self.p
        rem = poly_divmod_rem(prod, self.modulus, self.p) if self.h > 1 else [prod[0] % self.p]
        rem = list(rem) + [0] * (self.h - len(rem))
        return self.index(rem[: self.h])

    def pow(self, a, e):
        out = 1
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def inv(self, a):
        for b in range(1, self.q):
            if self.mul(a, b) == 1:
                return b
        raise ZeroDivisionError


def naive_poly_eval(F, coeffs, x):
    out, power = 0, 1
    for c in coeffs:
        out = F.add(out, F.mul(c, power))
        power = F.mul(power, x)
    return out


def naive_lagrange(F, nodes, values, at):
    """Solve the Vandermonde system by Gaussian elimination, then evaluate."""
    m = len(nodes)
    rows = [[F.pow(x, j) for j in range(m)] + [v] for x, v in zip(nodes, values)]
    for c in range(m):
        piv = next(r for r in range(c, m) if rows[r][c])
        rows[c], rows[piv] = rows[piv], rows[c]
        inv = F.inv(rows[c][c])
        rows[c] = [F.mul(inv, e) for e in rows[c]]
        for r in range(m):
            if r != c and rows[r][c]:
                f = rows[r][c]
                rows[r] = [F.sub(e, F.mul(f, g)) for e, g in zip(rows[r], rows[c])]
    coeffs = [rows[j][m] for j in range(m)]
    return naive_poly_eval(F, coeffs, at)


def as_example_points(F, eta):
    """Evaluation set of ``y^p - y = x^{p+1} z^2 + x^2 z^{p+1}`` by triple enumeration.

    Returns ``(gammas, points)`` with points ordered by (gamma, x, y) using the
    constant-first lexicographic order on digit tuples.
    """
    p = F.p
    key = lambda v: F.digits(v)
    fibers = {}
    for z in range(F.q):
        pts = []
        for x in range(F.q):
            rhs = F.add(F.mul(F.pow(x, p + 1), F.pow(z, 2)), F.mul(F.pow(x, 2), F.pow(z, p + 1)))
            for y in range(F.q):
                if F.sub(F.pow(y, p), y) == rhs:
                    pts.append((x, y, z))
        fibers[z] = pts
    gammas = []
    for z in sorted(range(F.q), key=key):
        if z == 0:
            continue  # deg_x f(x, 0) drops
        if len({x for x, _, _ in fibers[z]}) >= eta:
            gammas.append(z)
    points = []
    for z in gammas:
        points += sorted(fibers[z], key=lambda t: (key(t[0]), key(t[1])))
    return gammas, points


def kummer_points(F, lam, c, h, nu, roots, eta):
    """Evaluation set of ``y^lam = c x^h z^nu prod(x - a z)`` without ramified points."""
    key = lambda v: F.digits(v)
    fibers = {}
    for z in range(1, F.q):
        pts = []
        for x in range(F.q):
            rhs = F.mul(F.mul(c, F.pow(x, h)), F.pow(z, nu))
            for a in roots:
                rhs = F.mul(rhs, F.sub(x, F.mul(a, z)))
            if rhs == 0:
                continue  # ramified: only y = 0 lies over it
            for y in range(F.q):
                if F.pow(y, lam) == rhs:
                    pts.append((x, y, z))
        fibers[z] = pts
    gammas = [z for z in sorted(fibers, key=key) if len({x for x, _, _ in fibers[z]}) >= eta]
    points = []
    for z in gammas:
        points += sorted(fibers[z], key=lambda t: (key(t[0]), key(t[1])))
    return gammas, points


def naive_generator(F, triples, points):
    return [[F.mul(F.mul(F.pow(x, i), F.pow(y, j)), F.pow(z, k)) for x, y, z in points]
            for i, j, k in triples]


def naive_min_distance(F, rows):
    """Minimum weight over every nonzero message (no scalar normalization)."""
    k, n = len(rows), len(rows[0])
    best = n + 1
    for msg in itertools.product(range(F.q), repeat=k):
        if not any(msg):
            continue
        word = [0] * n
        for c, row in zip(msg, rows):
            if c:
                word = [F.add(w, F.mul(c, g)) for w, g in zip(word, row)]
        best = min(best, sum(1 for w in word if w))
    return best
