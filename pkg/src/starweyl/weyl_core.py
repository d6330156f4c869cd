"""Exact K-ordered star products on the Weyl algebra.

Coefficients live in the Gaussian rationals adjoined with a formal
polynomial variable for hbar, so every identity in this module is checked
with exact equality.  The regulator nu of the Heisenberg algebra is the
degree one monomial in hbar.

Generator ordering: position i (0-based, i < m) is u_{i+1}, position m + i
is v_{i+1}, so that [u_i, v_j] = -i hbar delta_ij.
"""

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

ZERO = QQ_I(0, 0)
ONE = QQ_I(1, 0)
I = QQ_I(0, 1)


class DimensionError(ValueError):
    pass


def cq(z):
    """Coerce ints, Fractions, (re, im) pairs and complex numbers to QQ_I."""
    if isinstance(z, type(ONE)):
        return z
    if isinstance(z, tuple):
        return QQ_I(QQ(*_frac_pair(z[0])), QQ(*_frac_pair(z[1])))
    if isinstance(z, complex):
        return QQ_I(QQ(*_frac_pair(z.real)), QQ(*_frac_pair(z.imag)))
    return QQ_I(QQ(*_frac_pair(z)), QQ(0))


def _frac_pair(x):
    f = Fraction(x)
    return f.numerator, f.denominator


def conj(z):
    return QQ_I(z.x, -z.y)


def to_complex(z):
    return complex(float(z.x), float(z.y))


class HBarScalar:
    """Polynomial in hbar with Gaussian-rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {h: cq(c) for h, c in (coeffs or {}).items() if cq(c) != ZERO}

    @classmethod
    def const(cls, c, hpow=0):
        return cls({hpow: c})

    def __add__(self, other):
        out = dict(self.coeffs)
        for h, c in other.coeffs.items():
            out[h] = out.get(h, ZERO) + c
        return HBarScalar(out)

    def __neg__(self):
        return HBarScalar({h: -c for h, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, HBarScalar):
            other = HBarScalar.const(other)
        out = {}
        for h1, c1 in self.coeffs.items():
            for h2, c2 in other.coeffs.items():
                out[h1 + h2] = out.get(h1 + h2, ZERO) + c1 * c2
        return HBarScalar(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, HBarScalar) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def is_zero(self):
        return not self.coeffs

    def conjugate(self):
        return HBarScalar({h: conj(c) for h, c in self.coeffs.items()})

    def evaluate(self, hbar):
        return sum(to_complex(c) * hbar**h for h, c in self.coeffs.items())

    def __repr__(self):
        return "HBarScalar(%r)" % {h: str(c) for h, c in sorted(self.coeffs.items())}


def _clean(flat):
    return {k: c for k, c in flat.items() if c != ZERO}


def _add_into(out, key, c):
    v = out.get(key, ZERO) + c
    if v == ZERO:
        out.pop(key, None)
    else:
        out[key] = v


class WeylElement:
    """Polynomial in 2m generators with hbar-polynomial coefficients.

    Stored flat as {(multi_index, hbar_power): coefficient}; ``terms`` gives
    the grouped view multi_index -> HBarScalar.
    """

    __slots__ = ("m", "flat")

    def __init__(self, m, flat=None):
        self.m = m
        self.flat = _clean(flat or {})
        for idx, _ in self.flat:
            if len(idx) != 2 * m:
                raise DimensionError("multi-index %r has wrong length for m=%d" % (idx, m))

    @classmethod
    def from_terms(cls, m, terms):
        flat = {}
        for idx, s in terms.items():
            for h, c in s.coeffs.items():
                flat[(tuple(idx), h)] = c
        return cls(m, flat)

    @classmethod
    def scalar(cls, m, c=1, hpow=0):
        return cls(m, {((0,) * (2 * m), hpow): cq(c)})

    @classmethod
    def generator(cls, m, pos, c=1):
        idx = [0] * (2 * m)
        idx[pos] = 1
        return cls(m, {(tuple(idx), 0): cq(c)})

    @classmethod
    def u(cls, m, i):
        return cls.generator(m, i - 1)

    @classmethod
    def v(cls, m, i):
        return cls.generator(m, m + i - 1)

    @classmethod
    def linear(cls, coeffs):
        m = len(coeffs) // 2
        out = cls(m)
        for pos, c in enumerate(coeffs):
            out = out + cls.generator(m, pos, c)
        return out

    @property
    def terms(self):
        grouped = {}
        for (idx, h), c in self.flat.items():
            grouped.setdefault(idx, {})[h] = c
        return {idx: HBarScalar(cs) for idx, cs in grouped.items()}

    def _check(self, other):
        if self.m != other.m:
            raise DimensionError("dimension mismatch: m=%d vs m=%d" % (self.m, other.m))

    def __add__(self, other):
        if not isinstance(other, WeylElement):
            other = WeylElement.scalar(self.m, other)
        self._check(other)
        out = dict(self.flat)
        for k, c in other.flat.items():
            _add_into(out, k, c)
        return WeylElement(self.m, out)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement(self.m, {k: -c for k, c in self.flat.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c, hpow=0):
        c = cq(c)
        return WeylElement(self.m, {(idx, h + hpow): v * c for (idx, h), v in self.flat.items()})

    def times(self, other):
        """Commutative (pointwise) product of the polynomial expressions."""
        self._check(other)
        out = {}
        for (i1, h1), c1 in self.flat.items():
            for (i2, h2), c2 in other.flat.items():
                key = (tuple(a + b for a, b in zip(i1, i2)), h1 + h2)
                _add_into(out, key, c1 * c2)
        return WeylElement(self.m, out)

    def diff(self, pos):
        out = {}
        for (idx, h), c in self.flat.items():
            if idx[pos]:
                new = list(idx)
                new[pos] -= 1
                _add_into(out, (tuple(new), h), c * idx[pos])
        return WeylElement(self.m, out)

    def degree(self):
        return max((sum(idx) for idx, _ in self.flat), default=0)

    def hbar_degree(self):
        return max((h for _, h in self.flat), default=0)

    def is_zero(self):
        return not self.flat

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.m == other.m and self.flat == other.flat

    def __hash__(self):
        return hash((self.m, tuple(sorted(self.flat.items()))))

    def evaluate(self, point, hbar):
        total = 0j
        for (idx, h), c in self.flat.items():
            term = to_complex(c) * hbar**h
            for p, e in zip(point, idx):
                term *= p**e
            total += term
        return total

    def to_json(self):
        rows = []
        for idx, s in sorted(self.terms.items()):
            coeff = []
            for h, c in sorted(s.coeffs.items()):
                coeff.append({
                    "hpow": h,
                    "re_num": int(c.x.numerator), "re_den": int(c.x.denominator),
                    "im_num": int(c.y.numerator), "im_den": int(c.y.denominator),
                })
            rows.append({"idx": list(idx), "coeff": coeff})
        return {"m": self.m, "terms": rows}

    @classmethod
    def from_json(cls, data):
        flat = {}
        for row in data["terms"]:
            for c in row["coeff"]:
                flat[(tuple(row["idx"]), c["hpow"])] = QQ_I(
                    QQ(c["re_num"], c["re_den"]), QQ(c["im_num"], c["im_den"]))
        return cls(data["m"], flat)

    def __repr__(self):
        parts = []
        for (idx, h), c in sorted(self.flat.items()):
            parts.append("(%s)*hbar^%d*%s" % (c, h, idx))
        return "WeylElement(m=%d: %s)" % (self.m, " + ".join(parts) or "0")


def standard_J(m):
    """Skew matrix with -I_m upper right and I_m lower left."""
    n = 2 * m
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(m):
        rows[i][m + i] = -ONE
        rows[m + i][i] = ONE
    return tuple(tuple(r) for r in rows)


def _as_matrix(K, n):
    rows = tuple(tuple(cq(x) for x in row) for row in K)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise DimensionError("matrix must be %dx%d" % (n, n))
    return rows


def zero_matrix(m):
    return tuple(tuple(ZERO for _ in range(2 * m)) for _ in range(2 * m))


@dataclass(frozen=True)
class ExpressionContext:
    """Ordering data: dimension m, symmetric K and a numeric hbar."""

    m: int
    K: tuple = None
    hbar_numeric: float = 1.0
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        n = 2 * self.m
        K = zero_matrix(self.m) if self.K is None else _as_matrix(self.K, n)
        for i in range(n):
            for j in range(n):
                if K[i][j] != K[j][i]:
                    raise ValueError("K must be symmetric")
        if self.hbar_numeric <= 0:
            raise ValueError("hbar must be positive")
        object.__setattr__(self, "K", K)

    @property
    def J(self):
        return standard_J(self.m)

    @property
    def Lam(self):
        J = self.J
        n = 2 * self.m
        return tuple(tuple(self.K[i][j] + J[i][j] for j in range(n)) for i in range(n))

    def with_K(self, K):
        return ExpressionContext(self.m, K, self.hbar_numeric)

    def to_json(self):
        def enc(z):
            return [str(z.x), str(z.y)]
        return {"m": self.m, "hbar": self.hbar_numeric,
                "K": [[enc(z) for z in row] for row in self.K]}


def _mono_star(a, b, lam_nz):
    """u^a * u^b as {(idx, hbar_power): coeff}, summing the bidifferential series."""
    out = {}
    layer = {(a, b): ONE}
    k = 0
    half_i = I * QQ_I(QQ(1, 2), 0)
    while layer:
        scale = half_i**k * QQ_I(QQ(1, math.factorial(k)), 0)
        for (p, q), c in layer.items():
            _add_into(out, (tuple(x + y for x, y in zip(p, q)), k), c * scale)
        nxt = {}
        for (p, q), c in layer.items():
            for i, j, L in lam_nz:
                if p[i] and q[j]:
                    p2 = p[:i] + (p[i] - 1,) + p[i + 1:]
                    q2 = q[:j] + (q[j] - 1,) + q[j + 1:]
                    _add_into(nxt, (p2, q2), c * L * (p[i] * q[j]))
        layer = nxt
        k += 1
    return out


def star_product(f, g, ctx):
    """f *_K g via the terminating bidifferential series with Lambda = K + J."""
    if f.m != g.m or f.m != ctx.m:
        raise DimensionError("dimension mismatch among f (m=%d), g (m=%d), ctx (m=%d)"
                             % (f.m, g.m, ctx.m))
    cache = ctx._cache.setdefault("mono", {})
    lam_nz = ctx._cache.get("lam_nz")
    if lam_nz is None:
        Lam = ctx.Lam
        n = 2 * ctx.m
        lam_nz = [(i, j, Lam[i][j]) for i in range(n) for j in range(n) if Lam[i][j] != ZERO]
        ctx._cache["lam_nz"] = lam_nz
    out = {}
    for (a, h1), c1 in f.flat.items():
        for (b, h2), c2 in g.flat.items():
            prod = cache.get((a, b))
            if prod is None:
                prod = _mono_star(a, b, lam_nz)
                cache[(a, b)] = prod
            c12 = c1 * c2
            for (idx, h), c in prod.items():
                _add_into(out, (idx, h + h1 + h2), c * c12)
    return WeylElement(f.m, out)


def commutator(f, g, ctx):
    return star_product(f, g, ctx) - star_product(g, f, ctx)


def intertwine(f, K, Kp):
    """exp((i hbar/4) sum (K'-K)^{ij} d_i d_j) applied to f."""
    n = 2 * f.m
    K = _as_matrix(K, n)
    Kp = _as_matrix(Kp, n)
    D = [(i, j, Kp[i][j] - K[i][j]) for i in range(n) for j in range(n)
         if Kp[i][j] != K[i][j]]
    out = dict(f.flat)
    term = f.flat
    k = 0
    quarter_i = I * QQ_I(QQ(1, 4), 0)
    while term:
        k += 1
        nxt = {}
        for (idx, h), c in term.items():
            for i, j, d in D:
                if idx[i] and idx[j] and (i != j or idx[i] > 1):
                    new = list(idx)
                    mult = new[i]
                    new[i] -= 1
                    mult *= new[j]
                    new[j] -= 1
                    _add_into(nxt, (tuple(new), h + 1), c * d * mult)
        scale = quarter_i * QQ_I(QQ(1, k), 0)
        term = {key: c * scale for key, c in nxt.items()}
        for key, c in term.items():
            _add_into(out, key, c)
    return WeylElement(f.m, out)


def expansive_automorphism(f, lam=None):
    """E_t with lambda = e^t kept formal.

    Returns {weight: piece} where weight = generator degree + 2 * hbar degree,
    or, if ``lam`` is an exact number, the evaluated sum of lam**weight * piece.
    """
    graded = {}
    for (idx, h), c in f.flat.items():
        w = sum(idx) + 2 * h
        graded.setdefault(w, {})[(idx, h)] = c
    graded = {w: WeylElement(f.m, fl) for w, fl in graded.items()}
    if lam is None:
        return graded
    lam = cq(lam)
    out = WeylElement(f.m)
    for w, piece in graded.items():
        out = out + piece.scale(lam**w)
    return out


def hermitian_conjugate(f, K=None):
    """Anti-automorphism fixing generators and hbar, conjugating i.

    On Weyl-ordered (K = 0) expressions this is coefficient conjugation.  For
    other orderings the expression is moved to Weyl ordering and back.
    """
    def cc(g):
        return WeylElement(g.m, {k: conj(c) for k, c in g.flat.items()})

    if K is None:
        return cc(f)
    zero = zero_matrix(f.m)
    return intertwine(cc(intertwine(f, K, zero)), zero, K)


def random_exact_K(m, rng, bound=3):
    n = 2 * m
    K = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            z = QQ_I(QQ(rng.randint(-bound, bound), rng.randint(1, bound)),
                     QQ(rng.randint(-bound, bound), rng.randint(1, bound)))
            K[i][j] = K[j][i] = z
    return tuple(tuple(r) for r in K)


def random_element(m, rng, max_degree=4, n_terms=4, max_hpow=1, bound=3):
    flat = {}
    for _ in range(n_terms):
        d = rng.randint(0, max_degree)
        idx = [0] * (2 * m)
        for _ in range(d):
            idx[rng.randrange(2 * m)] += 1
        c = QQ_I(QQ(rng.randint(-bound, bound), rng.randint(1, bound)),
                 QQ(rng.randint(-bound, bound), rng.randint(1, bound)))
        _add_into(flat, (tuple(idx), rng.randint(0, max_hpow)), c)
    return WeylElement(m, flat)


def monomials(m, max_degree):
    n = 2 * m
    for d in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            idx = [0] * n
            for p in combo:
                idx[p] += 1
            yield tuple(idx)


# ---- mu-regulated axioms ----------------------------------------------------

def _mu_divides(x, mu, times=1):
    """True if x lies in mu^times * A, for a central monomial regulator c*hbar^p."""
    if mu.is_zero():
        return x.is_zero()
    return all(h >= mu._p * times for _, h in x.flat)


class _Regulator(WeylElement):
    __slots__ = ("_p",)


def _make_regulator(m, mu):
    if isinstance(mu, HBarScalar):
        if len(mu.coeffs) > 1:
            raise ValueError("regulator must be a single hbar monomial")
        (p, c), = mu.coeffs.items() if mu.coeffs else ((0, ZERO),)
        reg = _Regulator(m, {((0,) * (2 * m), p): c} if c != ZERO else {})
        reg._p = p
        return reg
    raise TypeError("regulator must be an HBarScalar")


def _rank(elements, keys):
    if not elements:
        return 0
    index = {k: i for i, k in enumerate(keys)}
    rows = [[ZERO] * len(keys) for _ in elements]
    for r, e in enumerate(elements):
        for k, c in e.flat.items():
            rows[r][index[k]] = c
    return DomainMatrix(rows, (len(elements), len(keys)), QQ_I).rank()


def check_mu_regulated_axioms(ctx, max_degree, mu=None, max_hpow=1):
    """Check (A.1)-(A.4) on all monomials up to ``max_degree`` times hbar^h, h <= max_hpow.

    The default regulator is nu = hbar.  Returns {axiom: {"pass", "witness"}}.
    """
    m = ctx.m
    mu = _make_regulator(m, HBarScalar.const(1, 1) if mu is None else mu)
    monos = list(monomials(m, max_degree))
    basis = [WeylElement(m, {(idx, h): ONE}) for idx in monos for h in range(max_hpow + 1)]
    gens = [WeylElement(m, {(idx, 0): ONE}) for idx in monos]
    report = {}

    witness = None
    for f in basis:
        c = commutator(mu, f, ctx)
        if not _mu_divides(c, mu, times=2):
            witness = f
            break
    report["A.1"] = {"pass": witness is None, "witness": _wit(witness)}

    witness, sample = None, None
    for f, g in itertools.product(gens, repeat=2):
        c = commutator(f, g, ctx)
        if not _mu_divides(c, mu):
            witness = (f, g)
            break
        if sample is None and not c.is_zero():
            sample = (f, g, c)
    report["A.2"] = {"pass": witness is None,
                     "witness": _wit(witness) if witness else _wit(sample)}

    # B = hbar-free polynomials; need A = B (+) mu*A with trivial intersection.
    witness = None
    for f in basis:
        f0 = WeylElement(m, {k: c for k, c in f.flat.items() if k[1] == 0})
        rest = f - f0
        if rest.is_zero():
            continue
        if mu.is_zero():
            witness = f
            break
        f1 = WeylElement(m, {(idx, h - mu._p): c / mu.flat[((0,) * (2 * m), mu._p)]
                             for (idx, h), c in rest.flat.items()})
        if f0 + star_product(mu, f1, ctx) != f:
            witness = f
            break
    if witness is None and not mu.is_zero():
        for f in basis:
            img = star_product(mu, f, ctx)
            if any(h == 0 for _, h in img.flat):
                witness = f
                break
    report["A.3"] = {"pass": witness is None, "witness": _wit(witness)}

    left = [star_product(mu, f, ctx) for f in basis]
    right = [star_product(f, mu, ctx) for f in basis]
    keys = sorted({k for e in left + right for k in e.flat})
    rl, rr = _rank(left, keys), _rank(right, keys)
    both = _rank(left + right, keys)
    ok = rl == len(basis) and rr == len(basis) and both == rl
    report["A.4"] = {"pass": ok,
                     "witness": {"basis": len(basis), "rank_left": rl, "rank_right": rr,
                                 "rank_joint": both}}
    return report


def _wit(w):
    if w is None:
        return None
    if isinstance(w, tuple):
        return [x.to_json() for x in w]
    return w.to_json()


def random_rng(seed):
    return random.Random(seed)
