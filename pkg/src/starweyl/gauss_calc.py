"""Gaussian-type elements P(u) exp(alpha + <l,u> + u^T Q u) under the K-ordered product.

The product of two such elements is computed in closed form: the
bidifferential operator exp((i hbar/2) d_u Lambda d_w) is a heat operator on
the doubled variables z = (u, w), so it acts on Gaussians by a matrix
inversion and on polynomial prefactors by a Wick contraction.  Branches of the
square-root prefactor are fixed by continuity in the deformation parameter,
which is what the formal hbar-series would produce.
"""

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .poly import Poly, wick_substitute


class BranchSingularityError(ArithmeticError):
    def __init__(self, message, determinant=None):
        super().__init__(message)
        self.determinant = determinant


class ConsistencyError(ArithmeticError):
    pass


class DomainError(ValueError):
    pass


def standard_J(m):
    J = np.zeros((2 * m, 2 * m))
    J[:m, m:] = -np.eye(m)
    J[m:, :m] = np.eye(m)
    return J


SHELL = np.array([0.0, 1.3 + 0.4j, -0.7 + 0.9j, 0.5 - 1.6j, -1.9 + 0.2j])


def default_grid(n, values=SHELL):
    """Cartesian grid with the same complex sample values on every coordinate."""
    mesh = np.meshgrid(*([values] * n), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=-1)


@dataclass
class NumericContext:
    m: int
    K: np.ndarray = None
    hbar: float = 1.0
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    grid_values: np.ndarray = field(default_factory=lambda: SHELL.copy())

    def __post_init__(self):
        n = 2 * self.m
        self.K = np.zeros((n, n), dtype=complex) if self.K is None else np.asarray(self.K, dtype=complex)
        if self.K.shape != (n, n):
            raise ValueError("K must be %dx%d" % (n, n))
        if not np.allclose(self.K, self.K.T, atol=1e-14):
            raise ValueError("K must be symmetric")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @property
    def n(self):
        return 2 * self.m

    @property
    def J(self):
        return standard_J(self.m)

    @property
    def Lam(self):
        return self.K + self.J

    def grid(self):
        return default_grid(self.n, self.grid_values)

    def with_K(self, K):
        return replace(self, K=np.asarray(K, dtype=complex))

    def block(self, k):
        """2x2 sub-block of K on the pair (x_k, y_k)."""
        i, j = k, self.m + k
        return self.K[np.ix_([i, j], [i, j])]

    @classmethod
    def from_exact(cls, ctx, **kw):
        from .weyl_core import to_complex
        K = np.array([[to_complex(z) for z in row] for row in ctx.K])
        return cls(ctx.m, K, ctx.hbar_numeric, **kw)


def random_generic_K(n, rng, radius=1.0, margin=1e-3, real=False):
    """Random complex symmetric K with entries in the unit disk, away from singular."""
    while True:
        r = radius * np.sqrt(rng.uniform(0, 1, (n, n)))
        th = rng.uniform(0, 2 * np.pi, (n, n)) if not real else rng.choice([0, np.pi], (n, n))
        A = r * np.exp(1j * th)
        K = np.triu(A) + np.triu(A, 1).T
        if abs(np.linalg.det(K + standard_J(n // 2))) > margin and abs(np.linalg.det(K)) > margin:
            return K


@dataclass
class GaussianElement:
    """prefactor(u) * exp(alpha + <l,u> + u^T Q u)."""

    m: int
    prefactor: Poly
    alpha: complex
    l: np.ndarray
    Q: np.ndarray
    sheet: int = 0

    def __post_init__(self):
        n = 2 * self.m
        self.l = np.asarray(self.l, dtype=complex).reshape(n)
        self.Q = np.asarray(self.Q, dtype=complex).reshape(n, n)
        self.Q = 0.5 * (self.Q + self.Q.T)
        self.alpha = complex(self.alpha)

    @property
    def n(self):
        return 2 * self.m

    @classmethod
    def from_poly(cls, m, P):
        n = 2 * m
        return cls(m, P, 0.0, np.zeros(n), np.zeros((n, n)))

    @classmethod
    def one(cls, m):
        return cls.from_poly(m, Poly.const(2 * m, 1.0))

    @classmethod
    def generator(cls, m, pos, coeff=1.0):
        return cls.from_poly(m, Poly.var(2 * m, pos, coeff))

    def evaluate(self, points):
        points = np.asarray(points, dtype=complex)
        expo = self.alpha + points @ self.l + np.einsum("...i,ij,...j->...", points, self.Q, points)
        return self.prefactor.evaluate(points) * np.exp(expo)

    def scale(self, c):
        return replace(self, prefactor=self.prefactor * complex(c))

    def times_poly(self, P):
        return replace(self, prefactor=self.prefactor * P)

    def deriv(self, i):
        grad = Poly.linear(2 * self.Q[i], self.l[i])
        return replace(self, prefactor=self.prefactor.diff(i) + self.prefactor * grad)

    def same_exponent(self, other, tol=1e-13):
        return (np.allclose(self.Q, other.Q, atol=tol, rtol=0)
                and np.allclose(self.l, other.l, atol=tol, rtol=0))

    def to_json(self):
        def c2(z):
            return [float(np.real(z)), float(np.imag(z))]
        return {
            "m": self.m,
            "alpha": c2(self.alpha),
            "l": [c2(z) for z in self.l],
            "Q": [[c2(z) for z in row] for row in self.Q],
            "prefactor": [{"idx": list(k), "coeff": c2(v)}
                          for k, v in sorted(self.prefactor.terms().items())],
            "sheet": self.sheet,
        }


class GaussSum:
    """Finite linear combination of GaussianElements (merged by exponent)."""

    def __init__(self, terms):
        merged = []
        for t in terms:
            for k, s in enumerate(merged):
                if s.same_exponent(t):
                    ratio = cmath.exp(t.alpha - s.alpha)
                    merged[k] = replace(s, prefactor=s.prefactor + t.prefactor * ratio)
                    break
            else:
                merged.append(t)
        self.terms = merged

    @property
    def m(self):
        return self.terms[0].m

    def evaluate(self, points):
        return sum(t.evaluate(points) for t in self.terms)

    def scale(self, c):
        return GaussSum([t.scale(c) for t in self.terms])

    def __add__(self, other):
        return GaussSum(self.terms + as_sum(other).terms)

    def __sub__(self, other):
        return self + as_sum(other).scale(-1.0)


def as_sum(x):
    return x if isinstance(x, GaussSum) else GaussSum([x])


def _log_det_continued(MA, tol=1e-12):
    """log det(I - MA) continued from the identity along s -> I - s MA."""
    lam = np.linalg.eigvals(MA)
    factors = 1.0 - lam
    worst = np.min(np.abs(factors)) if len(factors) else 1.0
    if worst < tol:
        raise BranchSingularityError(
            "singular composition: det(I - M A) ~ %.3e" % abs(np.prod(factors)),
            determinant=complex(np.prod(factors)))
    return complex(np.sum(np.log(factors)))


def _heat(M, A, b, tol=1e-12):
    """exp(1/2 d^T M d) applied to P(z) exp(1/2 z^T A z + b^T z).

    Returns (log_scale, A_new, N, const, C) where the result equals
    exp(log_scale + const) * Wick_C(P)(N z + C b) * exp(1/2 z^T A_new z + b^T N z).
    """
    d = A.shape[0]
    MA = M @ A
    logdet = _log_det_continued(MA, tol)
    N = np.linalg.inv(np.eye(d) - MA)
    A_new = A @ N
    A_new = 0.5 * (A_new + A_new.T)
    C = N @ M
    C = 0.5 * (C + C.T)
    const = 0.5 * b @ C @ b
    return -0.5 * logdet, A_new, N, const, C


def gauss_product(A, B, ctx):
    """Closed form of A *_K B for GaussianElements (or sums of them)."""
    if isinstance(A, GaussSum) or isinstance(B, GaussSum):
        return GaussSum([gauss_product(a, b, ctx) for a in as_sum(A).terms for b in as_sum(B).terms])
    if A.m != ctx.m or B.m != ctx.m:
        raise ValueError("dimension mismatch")
    n = ctx.n
    Lam = ctx.Lam
    h = ctx.hbar
    M = np.zeros((2 * n, 2 * n), dtype=complex)
    M[:n, n:] = 0.5j * h * Lam
    M[n:, :n] = 0.5j * h * Lam.T
    Aq = np.zeros((2 * n, 2 * n), dtype=complex)
    Aq[:n, :n] = 2 * A.Q
    Aq[n:, n:] = 2 * B.Q
    b = np.concatenate([A.l, B.l])
    log_scale, A_new, N, const, C = _heat(M, Aq, b)
    S = np.vstack([np.eye(n), np.eye(n)])
    Q = 0.5 * S.T @ A_new @ S
    l = S.T @ N.T @ b
    alpha = A.alpha + B.alpha + const + log_scale
    P = A.prefactor.outer(B.prefactor)
    if P.is_constant():
        pref = Poly.const(n, P.constant_value())
    else:
        pref = wick_substitute(P, C, N @ S, C @ b)
    return GaussianElement(n // 2, pref, alpha, l, Q, sheet=(A.sheet + B.sheet) % 2)


def star(*elems, ctx):
    out = elems[0]
    for e in elems[1:]:
        out = gauss_product(out, e, ctx)
    return out


def commutator(A, B, ctx):
    return as_sum(gauss_product(A, B, ctx)) - as_sum(gauss_product(B, A, ctx))


def intertwine_gauss(G, K, Kp, hbar):
    """exp((i hbar/4) sum (K'-K)^{ij} d_i d_j) applied to a Gaussian element."""
    if isinstance(G, GaussSum):
        return GaussSum([intertwine_gauss(t, K, Kp, hbar) for t in G.terms])
    D = np.asarray(Kp, dtype=complex) - np.asarray(K, dtype=complex)
    M = 0.5j * hbar * D
    log_scale, A_new, N, const, C = _heat(M, 2 * G.Q, G.l)
    pref = G.prefactor
    if not pref.is_constant():
        pref = wick_substitute(pref, C, N, C @ G.l)
    return GaussianElement(G.m, pref, G.alpha + const + log_scale, N.T @ G.l, 0.5 * A_new, G.sheet)


def hermitian_conjugate(G, ctx):
    """Anti-automorphism: conjugate the Weyl-ordered expression's coefficients."""
    if isinstance(G, GaussSum):
        return GaussSum([hermitian_conjugate(t, ctx) for t in G.terms])
    zero = np.zeros_like(ctx.K)
    W = intertwine_gauss(G, ctx.K, zero, ctx.hbar)
    Wc = GaussianElement(W.m, Poly(np.conj(W.prefactor.c)), np.conj(W.alpha),
                         np.conj(W.l), np.conj(W.Q), W.sheet)
    return intertwine_gauss(Wc, zero, ctx.K, ctx.hbar)


def embed(G, ctx, pairs):
    """Embed an element on pairs (x_k, y_k), k in ``pairs``, into ctx's generators."""
    M = ctx.m
    pos = [k for k in pairs] + [M + k for k in pairs]
    n = 2 * M
    l = np.zeros(n, dtype=complex)
    Q = np.zeros((n, n), dtype=complex)
    l[pos] = G.l
    Q[np.ix_(pos, pos)] = G.Q
    return GaussianElement(M, G.prefactor.embed(n, pos), G.alpha, l, Q, G.sheet)


def sub_context(ctx, pairs):
    M = ctx.m
    pos = [k for k in pairs] + [M + k for k in pairs]
    return replace(ctx, m=len(pairs), K=ctx.K[np.ix_(pos, pos)])


# ---- independent oracle ------------------------------------------------------

def truncated_series_oracle(A, B, ctx, order, points=None):
    """Sum of the bidifferential series up to ``order``, evaluated at points.

    Uses (x^T Lambda y)^k = sum_b k!/b! y^b prod_j ((Lambda^T x)_j)^{b_j} so the
    A-side carries directional derivatives sum_i Lambda^{ij} d_i.
    """
    if order > 16:
        raise ValueError("order must be <= 16")
    points = ctx.grid() if points is None else points
    n = ctx.n
    Lam = ctx.Lam
    coef = 0.5j * ctx.hbar
    total = np.zeros(points.shape[:-1], dtype=complex)

    def dirderiv(G, j):
        out = None
        for i in range(n):
            if Lam[i, j] != 0:
                piece = G.deriv(i).scale(Lam[i, j])
                out = piece if out is None else replace(out, prefactor=out.prefactor + piece.prefactor)
        return out if out is not None else G.scale(0.0)

    def walk(Ga, Gb, start, depth, weight):
        nonlocal total
        total = total + weight * Ga.evaluate(points) * Gb.evaluate(points)
        if depth == order:
            return
        for j in range(start, n):
            # weight picks up coef and the 1/b! factor incrementally
            counts = walk.counts
            counts[j] += 1
            walk(dirderiv(Ga, j), Gb.deriv(j), j, depth + 1, weight * coef / counts[j])
            counts[j] -= 1

    walk.counts = [0] * n
    walk(A, B, 0, 0, 1.0)
    return total


# ---- star exponentials ---------------------------------------------------------

def star_exp_linear(a, ctx):
    """:exp_*((1/i hbar) <a,u>):_K = exp((1/4 i hbar) aKa + (1/i hbar) <a,u>)."""
    a = np.asarray(a, dtype=complex)
    h = ctx.hbar
    alpha = (a @ ctx.K @ a) / (4j * h)
    return GaussianElement(ctx.m, Poly.const(ctx.n, 1.0), alpha, a / (1j * h), np.zeros((ctx.n, ctx.n)))


def exp_linear(c, ctx):
    """:exp_*(<c,u>):_K, i.e. star_exp_linear with a = i hbar c."""
    return star_exp_linear(1j * ctx.hbar * np.asarray(c, dtype=complex), ctx)


def _continued_sqrt(fun, path, steps=400, tol=1e-10):
    """sqrt(fun(t)) continued along a polyline starting with sqrt(fun(path[0])) principal.

    Returns (value, sheet, crossings): sheet is 1 when the continued root is
    minus the principal root, and crossings lists parameter values where the
    continued root changed sheets.
    """
    prev = cmath.sqrt(fun(path[0]))
    crossings = []
    sheet = 0
    for p0, p1 in zip(path[:-1], path[1:]):
        for s in np.linspace(0, 1, steps + 1)[1:]:
            t = p0 + s * (p1 - p0)
            v = fun(t)
            if abs(v) < tol:
                raise BranchSingularityError("branch point on the continuation path at t=%s" % t, v)
            r = cmath.sqrt(v)
            new_sheet = 0 if abs(r - prev) <= abs(r + prev) else 1
            if new_sheet != sheet:
                crossings.append(complex(t))
                sheet = new_sheet
            prev = r if sheet == 0 else -r
    return prev, sheet, crossings


def _path(t, path):
    if path is None:
        return [0.0, complex(t)]
    return [complex(p) for p in path]


def star_exp_hyperbolic(t, ctx, path=None):
    """:exp_*(t (1/i hbar) 2 x o y):_K for m = 1, K = [[d, c], [c, d']]."""
    if ctx.m != 1:
        raise ValueError("star_exp_hyperbolic needs m = 1")
    d, c, dp = ctx.K[0, 0], ctx.K[0, 1], ctx.K[1, 1]
    h = ctx.hbar

    def parts(t):
        ep, em = cmath.exp(t), cmath.exp(-t)
        Delta = ep + em - c * (ep - em)
        return ep - em, Delta, Delta**2 - (ep - em) ** 2 * d * dp

    pts = _path(t, path)
    root, sheet, _ = _continued_sqrt(lambda s: parts(s)[2], pts)
    sh, Delta, D = parts(pts[-1])
    f = sh / (1j * h * D)
    Q = np.array([[f * sh * dp, f * Delta], [f * Delta, f * sh * d]])
    return GaussianElement(1, Poly.const(2, 2.0 / root), 0.0, np.zeros(2), Q, sheet)


def star_exp_harmonic(t, ctx, path=None):
    """:exp_*(t (1/hbar)(x^2 + y^2)):_K for m = 1."""
    if ctx.m != 1:
        raise ValueError("star_exp_harmonic needs m = 1")
    d, c, dp = ctx.K[0, 0], ctx.K[0, 1], ctx.K[1, 1]
    h = ctx.hbar

    def Delta(t):
        ch, sh = cmath.cosh(t), cmath.sinh(t)
        return ch**2 - (d + dp) * 1j * sh * ch + (c**2 - d * dp) * sh**2

    pts = _path(t, path)
    root, sheet, _ = _continued_sqrt(Delta, pts)
    tt = pts[-1]
    ch, sh = cmath.cosh(tt), cmath.sinh(tt)
    f = 1j * sh / (1j * h * Delta(tt))
    Q = np.array([[f * (ch - dp * 1j * sh), f * c * 1j * sh],
                  [f * c * 1j * sh, f * (ch - d * 1j * sh)]])
    return GaussianElement(1, Poly.const(2, 1.0 / root), 0.0, np.zeros(2), Q, sheet)


def hyperbolic_thresholds(ctx):
    """Thresholds a < b for the (b,1)/(b,2) periodicity classification."""
    d, c, dp = ctx.K[0, 0], ctx.K[0, 1], ctx.K[1, 1]
    rho = cmath.sqrt(d * dp)
    roots = [-(1 + c - rho) / (1 - c + rho), -(1 + c + rho) / (1 - c - rho)]
    a, b = sorted(0.5 * math.log(abs(r)) for r in roots)
    return a, b


def _sqrt_linear_factors(vals0, vals1):
    """prod sqrt(f_k) continued along straight segments from f_k = vals0 to vals1."""
    out = 1.0 + 0j
    for v0, v1 in zip(vals0, vals1):
        if abs(v1) < 1e-14:
            raise BranchSingularityError("vacuum limit diverges for this K", v1)
        r = cmath.sqrt(v0) * cmath.sqrt(v1 / v0)
        p = cmath.sqrt(v1)
        # prefer the principal root when the continuation lands on it (keeps exact values exact)
        out *= p if abs(r - p) <= abs(r + p) else -p
    return out


def _pair_vacuum(Kb, hbar, bar=False):
    d, c, dp = Kb[0, 0], Kb[0, 1], Kb[1, 1]
    rho = cmath.sqrt(d * dp)
    s = -1.0 if bar else 1.0
    cc = s * c
    # factors of e^{-2|t|} D(t) along the ray, from value 2 at t = 0 to the limit
    root = _sqrt_linear_factors([2.0, 2.0], [1 + cc - rho, 1 + cc + rho])
    den = (1 + cc) ** 2 - d * dp
    f = 1.0 / (1j * hbar * den)
    Q = np.array([[f * dp, -s * f * (1 + cc)], [-s * f * (1 + cc), f * d]])
    return GaussianElement(1, Poly.const(2, 2.0 / root), 0.0, np.zeros(2), Q, 0)


def vacuum(ctx, pair=0):
    """varpi_00 = lim_{t -> -inf} e^{-t} exp_*(t (1/i hbar) 2 x o y) on (x_pair, y_pair)."""
    return embed(_pair_vacuum(ctx.block(pair), ctx.hbar), ctx, [pair])


def bar_vacuum(ctx, pair=0):
    """lim_{t -> +inf} e^{t} exp_*(t (1/i hbar) 2 x o y) on (x_pair, y_pair)."""
    return embed(_pair_vacuum(ctx.block(pair), ctx.hbar, bar=True), ctx, [pair])


def complex_vacuum(ctx, pair=0):
    """lim_{t -> -inf} e^{-t} exp_*(t (1/hbar) w o wbar), w = x + i y."""
    Kb = ctx.block(pair)
    d, c, dp = Kb[0, 0], Kb[0, 1], Kb[1, 1]
    # 4 e^{2t} Delta_K(t) as a quadratic in z = e^{2t}, continued from z = 1 to z = 0
    a2 = 1 - 1j * (d + dp) + (c**2 - d * dp)
    a1 = 2 - 2 * (c**2 - d * dp)
    a0 = 1 + 1j * (d + dp) + (c**2 - d * dp)
    if abs(a2) > 1e-14:
        r = np.roots([a2, a1, a0])
        root = 2.0 * _sqrt_linear_factors([1.0, 1.0], [(0 - r[0]) / (1 - r[0]), (0 - r[1]) / (1 - r[1])])
    else:
        r = -a0 / a1
        root = 2.0 * _sqrt_linear_factors([1.0], [(0 - r) / (1 - r)])
    Dinf = a0
    f = -1.0 / (ctx.hbar * Dinf)
    Q = np.array([[f * (1 + 1j * dp), f * (-1j * c)], [f * (-1j * c), f * (1 + 1j * d)]])
    return embed(GaussianElement(1, Poly.const(2, 2.0 / root), 0.0, np.zeros(2), Q, 0), ctx, [pair])


# ---- embedded Heisenberg algebra -----------------------------------------------

def x_gen(ctx, k):
    return GaussianElement.generator(ctx.m, k)


def y_gen(ctx, k):
    return GaussianElement.generator(ctx.m, ctx.m + k)


def exp_y0(t, ctx):
    """:exp_*(t y_0):_K."""
    c = np.zeros(ctx.n, dtype=complex)
    c[ctx.m] = t
    return exp_linear(c, ctx)


def embedded_generators(ctx):
    """mu, tau, tau_hat, u~_i, v~_i of the Heisenberg algebra embedded in 2m+2 generators."""
    h = ctx.hbar
    e2 = exp_y0(-2.0, ctx)
    e1 = exp_y0(-1.0, ctx)
    x0 = x_gen(ctx, 0)
    mu = e2.scale(h)
    tau = (as_sum(gauss_product(e2, x0, ctx)) + as_sum(gauss_product(x0, e2, ctx))).scale(0.5)
    tau_hat = gauss_product(e2, x0, ctx)
    ut = [gauss_product(e1, x_gen(ctx, i), ctx) for i in range(1, ctx.m)]
    vt = [gauss_product(e1, y_gen(ctx, i), ctx) for i in range(1, ctx.m)]
    mu_inv = exp_y0(2.0, ctx).scale(1.0 / h)
    return {"mu": mu, "mu_inv": mu_inv, "tau": tau, "tau_hat": tau_hat, "u": ut, "v": vt}


def heisenberg_vacuum_factor(s, ctx):
    """exp_*(-i s tau) * varpi_00 as a Gaussian, valid for 1 + 2 hbar s > 0.

    Weyl-ordered form (1+2 hbar s)^{-1/2} e^{-i (x0/hbar) log(1+2 hbar s)} 2 e^{-(2/i hbar) x0 y0},
    moved to K-ordering by the intertwiner.
    """
    h = ctx.hbar
    q = 1 + 2 * h * s
    if q <= 0:
        raise DomainError("exp(-i s tau) * varpi_00 vanishes for 1 + 2 hbar s <= 0")
    zero = np.zeros_like(ctx.K)
    w = replace(ctx, K=zero)
    base = vacuum(w)
    l = base.l.copy()
    l[0] += -1j * math.log(q) / h
    G = replace(base, l=l, prefactor=base.prefactor * q**-0.5)
    return intertwine_gauss(G, zero, ctx.K, h)


def product_vacuum(kind, ctx, s=0.0):
    """Factorwise products of pair vacuums.

    kind: "L0" (varpi_00 on every pair), "L0bar" (bar vacuum on pair 0),
    "y0" (exp_*(y0) * L0bar) or "H" (exp_*(-i s tau) * L0).
    """
    pairs = range(1, ctx.m)
    if kind in ("L0", "H"):
        first = heisenberg_vacuum_factor(s, ctx) if kind == "H" else vacuum(ctx, 0)
    elif kind in ("L0bar", "y0"):
        first = bar_vacuum(ctx, 0)
    else:
        raise ValueError("unknown product vacuum %r" % kind)
    out = first
    for k in pairs:
        out = gauss_product(out, vacuum(ctx, k), ctx)
    if kind == "y0":
        out = gauss_product(exp_y0(1.0, ctx), out, ctx)
    return out


def scalar_multiple(F, G, points, tol=1e-8):
    """c with F = c G on the grid; raises ConsistencyError if F is not a multiple of G."""
    fv, gv = np.asarray(F.evaluate(points)), np.asarray(G.evaluate(points))
    k = np.argmax(np.abs(gv))
    c = fv[k] / gv[k]
    resid = np.max(np.abs(fv - c * gv)) / max(np.max(np.abs(fv)), np.max(np.abs(c * gv)), 1e-300)
    if resid > tol:
        raise ConsistencyError("non-scalar residual %.3e" % resid)
    return c, resid


def vacuum_sandwich_tau(s, n_max, ctx, points=None):
    """Terms varpi_00 * (-i s tau)^n * varpi_00 / n! as multiples of varpi_00, and partial sums."""
    h = ctx.hbar
    points = ctx.grid() if points is None else points
    vac = vacuum(ctx)
    gens = embedded_generators(ctx)
    tau = gens["tau"]
    right = vac
    terms = []
    fact = 1.0
    for n in range(n_max + 1):
        if n > 0:
            right = gauss_product(tau, right, ctx)
            right = as_sum(right).terms[0] if len(as_sum(right).terms) == 1 else right
            fact *= n
        sandwich = gauss_product(vac, right, ctx)
        c, _ = scalar_multiple(sandwich, vac, points, tol=1e-6)
        terms.append(complex(c * (-1j * s) ** n / fact))
    partial = np.cumsum(terms)
    closed = (1 + 2 * s * h) ** -0.5
    return {"terms": terms, "partial_sums": partial, "closed_form": closed}


def pochhammer_term(n, s, hbar):
    """(1/2)_n (-2 s hbar)^n / n!, the n-th sandwich coefficient."""
    out = 1.0
    for k in range(n):
        out *= (0.5 + k) * (-2 * s * hbar) / (k + 1)
    return out


# ---- vacuum representations ------------------------------------------------------

def apply_heisenberg_rep(generator, f, hbar, s_sym, u_syms, k=None):
    """Action on f(s, u~) * varpi_s(H), with f a sympy expression.

    generator in {"mu", "u", "v", "X", "itau"}; k selects the component for
    u/v.  Returns the new coefficient function, except for "itau", which also
    differentiates the vacuum family and returns (coefficient, vacuum_coefficient)
    meaning coefficient * varpi_s + vacuum_coefficient * d/ds varpi_s.
    """
    import sympy as sp
    a = hbar / (1 + 2 * hbar * s_sym)
    euler = sum(u * sp.diff(f, u) for u in u_syms)
    if generator == "mu":
        return a * f
    if generator == "u":
        return u_syms[k] * f
    if generator == "v":
        return sp.I * a * sp.diff(f, u_syms[k])
    if generator == "X":
        return euler
    if generator == "itau":
        return -a * euler, -f
    raise ValueError("unknown generator %r" % generator)


def check_heisenberg_domain(s, hbar):
    if 1 + 2 * hbar * s <= 0:
        raise DomainError("s = %g is at or past the pole s = -1/(2 hbar)" % s)


def apply_bar_vacuum_rep(generator, f, minv_sym, u_syms, k=None):
    """Action on f(mu^{-1}, u~) * varpi_{y0}(L0bar) (sympy expressions).

    tau acts as -i (2 d/d(mu^{-1}) + mu sum u~_k d/du~_k), consistent with
    [i tau, mu^{-1}] = 2 and [i tau, u~_k] = -mu u~_k.
    """
    import sympy as sp
    mu = 1 / minv_sym
    if generator == "mu_inv":
        return minv_sym * f
    if generator == "u":
        return u_syms[k] * f
    if generator == "tau":
        euler = sum(u * sp.diff(f, u) for u in u_syms)
        return -sp.I * (2 * sp.diff(f, minv_sym) - mu * euler)
    raise ValueError("unknown generator %r" % generator)
