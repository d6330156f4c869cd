"""Transcendental elements defined by integrals over one-parameter families.

Integrals such as int_0^inf e_*^{-t rho^2} dt are realised as weighted sums of
Gaussian elements.  Node products are the expensive part, so nodes are stored
in batches: stacked exponents (alpha, l, Q) and prefactors written as sums of
products of affine forms.  With that representation the K-product of two
batches is a batched matrix inversion plus a sum over partial matchings of the
affine forms (Wick's theorem), so double and triple quadratures stay cheap.
"""

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np
from scipy.special import roots_genlaguerre, roots_legendre

from .gauss_calc import (
    BranchSingularityError, GaussianElement, GaussSum, NumericContext, as_sum,
    complex_vacuum, embedded_generators, exp_linear, gauss_product, heisenberg_vacuum_factor,
    scalar_multiple, sub_context, vacuum, exp_y0,
)
from .poly import Poly


class ConvergenceError(ArithmeticError):
    pass


class PreconditionError(ValueError):
    pass


LADDER = (64, 128, 256)


# ---- batched Gaussian elements -------------------------------------------------

@lru_cache(maxsize=None)
def _matchings(d):
    """All partial matchings of range(d): tuples (pairs, unmatched)."""
    if d == 0:
        return (((), ()),)
    out = []
    for pairs, rest in _matchings(d - 1):
        last = d - 1
        out.append((pairs, rest + (last,)))
        for k, j in enumerate(rest):
            out.append((pairs + ((j, last),), rest[:k] + rest[k + 1:]))
    return tuple(out)


@lru_cache(maxsize=None)
def _monomial_tables(n, D):
    """Exponents of degree <= D (graded) and, per variable i, the index pairs mu -> mu + e_i."""
    mons = []
    for d in range(D + 1):
        for combo in combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            mons.append(tuple(e))
    index = {e: k for k, e in enumerate(mons)}
    up = []
    for i in range(n):
        src, dst = [], []
        for k, e in enumerate(mons):
            if sum(e) < D:
                f = list(e)
                f[i] += 1
                src.append(k)
                dst.append(index[tuple(f)])
        up.append((np.array(src, dtype=int), np.array(dst, dtype=int)))
    return mons, up


@dataclass
class GaussBatch:
    """B elements sum_r coef_r prod_j (F_rj . u + c_rj) * exp(alpha + l.u + u^T Q u).

    ``terms`` is a list of (coef (B,), F (B, d, n), c (B, d)); the degree d
    may differ between terms but is shared across the batch.
    """

    m: int
    alpha: np.ndarray
    l: np.ndarray
    Q: np.ndarray
    terms: list

    @property
    def n(self):
        return 2 * self.m

    @property
    def size(self):
        return self.alpha.shape[0]

    @property
    def signature(self):
        return tuple(F.shape[1] for _, F, _ in self.terms)

    @classmethod
    def from_element(cls, G):
        n = G.n
        terms = {}
        for idx, c in G.prefactor.terms().items():
            slots = [i for i, k in enumerate(idx) for _ in range(k)]
            F = np.zeros((1, len(slots), n), dtype=complex)
            for j, i in enumerate(slots):
                F[0, j, i] = 1.0
            terms.setdefault(len(slots), []).append((np.array([c], dtype=complex), F,
                                                     np.zeros((1, len(slots)), dtype=complex)))
        const = sum(t[0] for t in terms.pop(0, [])) if 0 in terms else None
        flat = _merge_low([t for d in sorted(terms) for t in terms[d]], const, 1, n)
        return cls(G.m, np.array([G.alpha]), G.l[None, :].copy(), G.Q[None, :, :].copy(), flat)

    @classmethod
    def from_any(cls, x, m=None):
        if isinstance(x, GaussBatch):
            return [x]
        if isinstance(x, QuadratureElement):
            return list(x.blocks)
        if isinstance(x, GaussSum):
            return [cls.from_element(t) for t in x.terms]
        if isinstance(x, GaussianElement):
            return [cls.from_element(x)]
        if isinstance(x, Poly):
            return [cls.from_element(GaussianElement.from_poly(x.n // 2, x))]
        raise TypeError("cannot batch %r" % type(x))

    def scale(self, c):
        c = np.asarray(c, dtype=complex)
        return GaussBatch(self.m, self.alpha, self.l, self.Q,
                          [(coef * c, F, s) for coef, F, s in self.terms])

    def take(self, idx):
        return GaussBatch(self.m, self.alpha[idx], self.l[idx], self.Q[idx],
                          [(coef[idx], F[idx], s[idx]) for coef, F, s in self.terms])

    def max_degree(self):
        return max(F.shape[1] for _, F, _ in self.terms)

    def dense_prefactor(self, rows=slice(None)):
        """Monomial coefficients (rows, len(monomials)) of the prefactors."""
        D = self.max_degree()
        mons, up = _monomial_tables(self.n, D)
        nb = self.alpha[rows].shape[0]
        out = np.zeros((nb, len(mons)), dtype=complex)
        for coef, F, s in self.terms:
            poly = np.zeros((nb, len(mons)), dtype=complex)
            poly[:, 0] = coef[rows]
            Fr, sr = F[rows], s[rows]
            for j in range(F.shape[1]):
                nxt = poly * sr[:, j, None]
                for i in range(self.n):
                    src, dst = up[i]
                    nxt[:, dst] += poly[:, src] * Fr[:, j, i, None]
                poly = nxt
            out += poly
        return mons, out

    def evaluate(self, points, chunk=4096):
        points = np.asarray(points, dtype=complex)
        lead = points.shape[:-1]
        pts = points.reshape(-1, self.n)
        mons, _ = _monomial_tables(self.n, self.max_degree())
        monvals = np.prod(pts[None, :, :] ** np.array(mons)[:, None, :], axis=2)
        total = np.zeros(pts.shape[0], dtype=complex)
        for lo in range(0, self.size, chunk):
            b = slice(lo, lo + chunk)
            Qb = self.Q[b]
            nb = Qb.shape[0]
            quad = (pts @ Qb.transpose(1, 0, 2).reshape(self.n, nb * self.n)).reshape(-1, nb, self.n)
            expo = self.alpha[b, None] + self.l[b] @ pts.T + np.einsum("pbi,pi->bp", quad, pts, optimize=True)
            _, dense = self.dense_prefactor(b)
            total += np.sum((dense @ monvals) * np.exp(expo), axis=0)
        return total.reshape(lead)

    def element(self, k):
        """The k-th batch entry as a GaussianElement (dense prefactor)."""
        n = self.n
        pref = Poly.const(n, 0.0)
        for coef, F, s in self.terms:
            p = Poly.const(n, coef[k])
            for j in range(F.shape[1]):
                p = p * Poly.linear(F[k, j], s[k, j])
            pref = pref + p
        return GaussianElement(self.m, pref, self.alpha[k], self.l[k], self.Q[k])


def _merge_low(terms, const_coef, size, n):
    """Fold all degree-1 terms into one affine form and all constants into one term."""
    lin = [t for t in terms if t[1].shape[1] == 1]
    rest = [t for t in terms if t[1].shape[1] > 1]
    out = []
    if const_coef is not None or not terms:
        c0 = const_coef if const_coef is not None else np.zeros(size, dtype=complex)
        out.append((c0, np.zeros((size, 0, n), dtype=complex), np.zeros((size, 0), dtype=complex)))
    if lin:
        F = sum(c[:, None, None] * F for c, F, _ in lin)
        sh = sum(c[:, None] * s for c, _, s in lin)
        out.append((np.ones(size, dtype=complex), F, sh))
    return out + rest


def _concat(blocks):
    """Merge blocks with identical prefactor signatures."""
    groups = {}
    for b in blocks:
        groups.setdefault(b.signature, []).append(b)
    out = []
    for sig, bs in groups.items():
        if len(bs) == 1:
            out.append(bs[0])
            continue
        terms = []
        for r in range(len(sig)):
            terms.append(tuple(np.concatenate([b.terms[r][i] for b in bs]) for i in range(3)))
        out.append(GaussBatch(bs[0].m, np.concatenate([b.alpha for b in bs]),
                              np.concatenate([b.l for b in bs]),
                              np.concatenate([b.Q for b in bs]), terms))
    return out


def batch_product(A, B, ctx, mode="outer", tol=1e-12):
    """K-product of two batches: all pairs (outer) or entrywise (zip)."""
    if mode == "outer":
        ia = np.repeat(np.arange(A.size), B.size)
        ib = np.tile(np.arange(B.size), A.size)
    elif mode == "zip":
        if A.size != B.size:
            raise ValueError("zip product needs equal batch sizes")
        ia = ib = np.arange(A.size)
    else:
        raise ValueError(mode)
    n = ctx.n
    h = ctx.hbar
    Lam = ctx.Lam
    M = np.zeros((2 * n, 2 * n), dtype=complex)
    M[:n, n:] = 0.5j * h * Lam
    M[n:, :n] = 0.5j * h * Lam.T
    size = len(ia)
    Aq = np.zeros((size, 2 * n, 2 * n), dtype=complex)
    Aq[:, :n, :n] = 2 * A.Q[ia]
    Aq[:, n:, n:] = 2 * B.Q[ib]
    b = np.concatenate([A.l[ia], B.l[ib]], axis=1)
    MA = M[None] @ Aq
    factors = 1.0 - np.linalg.eigvals(MA)
    if np.min(np.abs(factors)) < tol:
        raise BranchSingularityError("singular composition in batch product",
                                     determinant=complex(np.prod(factors[np.argmin(np.min(np.abs(factors), axis=1))])))
    logdet = np.sum(np.log(factors), axis=1)
    N = np.linalg.inv(np.eye(2 * n)[None] - MA)
    A_new = Aq @ N
    A_new = 0.5 * (A_new + np.swapaxes(A_new, 1, 2))
    C = N @ M[None]
    C = 0.5 * (C + np.swapaxes(C, 1, 2))
    Cb = np.einsum("bij,bj->bi", C, b)
    const = 0.5 * np.einsum("bi,bi->b", b, Cb)
    Q = 0.5 * (A_new[:, :n, :n] + A_new[:, :n, n:] + A_new[:, n:, :n] + A_new[:, n:, n:])
    Ntb = np.einsum("bji,bj->bi", N, b)
    l = Ntb[:, :n] + Ntb[:, n:]
    alpha = A.alpha[ia] + B.alpha[ib] + const - 0.5 * logdet
    NS = N[:, :, :n] + N[:, :, n:]

    const_coef = None
    terms = []
    for ca, Fa, sa in A.terms:
        for cb, Fb, sb in B.terms:
            da, db = Fa.shape[1], Fb.shape[1]
            d = da + db
            coef = ca[ia] * cb[ib]
            if d == 0:
                const_coef = coef if const_coef is None else const_coef + coef
                continue
            F = np.zeros((size, d, 2 * n), dtype=complex)
            F[:, :da, :n] = Fa[ia]
            F[:, da:, n:] = Fb[ib]
            s = np.concatenate([sa[ia], sb[ib]], axis=1)
            gram = np.einsum("bdi,bij,bej->bde", F, C, F, optimize=True)
            Fnew = np.einsum("bdi,bij->bdj", F, NS)
            snew = np.einsum("bdi,bi->bd", F, Cb) + s
            for pairs, rest in _matchings(d):
                w = coef
                for p, q in pairs:
                    w = w * gram[:, p, q]
                if not np.any(w):
                    continue
                if not rest:
                    const_coef = w if const_coef is None else const_coef + w
                    continue
                rest = list(rest)
                terms.append((w, Fnew[:, rest], snew[:, rest]))
    terms = _merge_low(terms, const_coef, size, n)
    return GaussBatch(A.m, alpha, l, Q, terms)


# ---- quadrature elements ---------------------------------------------------------

@dataclass
class QuadratureElement:
    """sum_j w_j G_j with the weights folded into the batch coefficients."""

    m: int
    blocks: list
    scheme: dict = field(default_factory=dict)
    certificate: dict = field(default_factory=dict)

    @classmethod
    def wrap(cls, x, m=None):
        if isinstance(x, QuadratureElement):
            return x
        blocks = GaussBatch.from_any(x)
        return cls(blocks[0].m, blocks)

    @property
    def size(self):
        return sum(b.size for b in self.blocks)

    def evaluate(self, points):
        return sum(b.evaluate(points) for b in self.blocks)

    def scale(self, c):
        return QuadratureElement(self.m, [b.scale(c) for b in self.blocks], self.scheme, self.certificate)

    def __add__(self, other):
        other = QuadratureElement.wrap(other)
        return QuadratureElement(self.m, _concat(self.blocks + other.blocks))

    def __sub__(self, other):
        return self + QuadratureElement.wrap(other).scale(-1.0)

    def __neg__(self):
        return self.scale(-1.0)


def qstar(*elems, ctx):
    """K-product of any mix of GaussianElement, GaussSum, Poly and QuadratureElement."""
    out = QuadratureElement.wrap(elems[0])
    for e in elems[1:]:
        e = QuadratureElement.wrap(e)
        blocks = [batch_product(a, b, ctx) for a in out.blocks for b in e.blocks]
        out = QuadratureElement(ctx.m, _concat(blocks))
    return out


def qcommutator(A, B, ctx):
    return qstar(A, B, ctx=ctx) - qstar(B, A, ctx=ctx)


def rel_sup(a, b):
    """max|a - b| / max(|b|) (scaled sup norm)."""
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


def certified(build, points, ladder=LADDER, rel_tol=1e-7):
    """Run ``build(n)`` up the node ladder until doubling changes values by < rel_tol.

    The coarser rule of the accepted pair is returned: its error is bounded by
    the measured change, and it keeps nested products of quadratures small.
    """
    prev = prev_q = None
    history = []
    for n in ladder:
        q = build(n)
        vals = q.evaluate(points)
        if prev is not None:
            change = rel_sup(prev, vals)
            history.append((n, change))
            if change < rel_tol:
                prev_q.certificate = {"nodes": prev_q.scheme.get("nodes"), "checked_against": n,
                                      "rel_change": change, "rel_tol": rel_tol,
                                      "history": history, "converged": True}
                return prev_q
        prev, prev_q = vals, q
    raise ConvergenceError("quadrature did not converge: %s" % history)


# ---- two inverses of a linear element ----------------------------------------------

def _linear_nodes(a, ts, ctx):
    """Batch of :exp_*(t (1/i hbar) <a,u>):_K over the nodes ts."""
    a = np.asarray(a, dtype=complex)
    h = ctx.hbar
    n = ctx.n
    ts = np.asarray(ts, dtype=float)
    aKa = a @ ctx.K @ a
    alpha = ts**2 * aKa / (4j * h)
    l = ts[:, None] * (a / (1j * h))[None, :]
    Q = np.zeros((len(ts), n, n), dtype=complex)
    ones = np.ones(len(ts), dtype=complex)
    return GaussBatch(ctx.m, alpha.astype(complex), l, Q, [(ones, np.zeros((len(ts), 0, n)), np.zeros((len(ts), 0)))])


def _linear_cutoff(a, ctx, points):
    h = ctx.hbar
    gamma = -np.imag(a @ ctx.K @ a) / (4 * h)
    beta = float(np.max(np.abs(np.imag(points @ a)))) / h
    budget = 40.0 + beta**2 / (4 * gamma)
    return (beta + math.sqrt(beta**2 + 4 * gamma * budget)) / (2 * gamma)


def star_inverse_linear(a, side, ctx, points=None, ladder=LADDER, rel_tol=1e-7):
    """inv_+ = (1/i hbar) int_{-inf}^0 E_t dt, inv_- = -(1/i hbar) int_0^inf E_t dt.

    E_t = :exp_*(t (1/i hbar) <a,u>):_K decays like a Gaussian in t exactly
    when Im <aK,a> < 0.  The half-line is truncated where the integrand has
    dropped below e^-40 of its peak on the check points and integrated by
    Gauss-Legendre (the integrand is entire in t, so convergence is spectral).
    """
    a = np.asarray(a, dtype=complex)
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    if not np.imag(a @ ctx.K @ a) < 0:
        raise PreconditionError("need Im<aK,a> < 0, got %r" % complex(a @ ctx.K @ a))
    points = ctx.grid() if points is None else points
    T = _linear_cutoff(a, ctx, points)
    h = ctx.hbar

    def build(nn):
        x, w = roots_legendre(nn)
        if side == "plus":
            ts, pref = -0.5 * T * (x + 1), 1.0 / (1j * h)
        else:
            ts, pref = 0.5 * T * (x + 1), -1.0 / (1j * h)
        batch = _linear_nodes(a, ts, ctx).scale(pref * 0.5 * T * w)
        return QuadratureElement(ctx.m, [batch], {"rule": "gauss-legendre", "nodes": nn, "T": T, "side": side})

    return certified(build, points, ladder, rel_tol)


def linear_form(a, ctx):
    """<a,u> as a GaussianElement."""
    return GaussianElement.from_poly(ctx.m, Poly.linear(np.asarray(a, dtype=complex)))


def inverse_difference_closed_form(a, ctx):
    """inv_+ - inv_- = (1/i hbar) int_R E_t dt, a Gaussian integral in t."""
    a = np.asarray(a, dtype=complex)
    h = ctx.hbar
    c2 = (a @ ctx.K @ a) / (4j * h)
    lin = a / (1j * h)
    # int exp(c2 t^2 + t L) dt = sqrt(pi / -c2) exp(-L^2 / (4 c2)), L = <lin, u>
    Q = -np.outer(lin, lin) / (4 * c2)
    alpha = cmath.log(cmath.sqrt(math.pi / -c2) / (1j * h))
    return GaussianElement(ctx.m, Poly.const(ctx.n, 1.0), alpha, np.zeros(ctx.n), Q)


def theta_truncated(a, N, ctx, points=None):
    """sum_{|n| <= N} :exp_*(n (1/i hbar) <a,u>):_K on points, with the size of the last terms."""
    a = np.asarray(a, dtype=complex)
    if not np.imag(a @ ctx.K @ a) < 0:
        raise PreconditionError("need Im<aK,a> < 0")
    points = ctx.grid() if points is None else points
    ns = np.arange(-N, N + 1)
    batch = _linear_nodes(a, ns.astype(float), ctx)
    per_term = np.array([np.max(np.abs(batch.take([k]).evaluate(points))) for k in range(len(ns))])
    return batch.evaluate(points), {"n": ns, "term_size": per_term, "tail": float(per_term[[0, -1]].max())}


# ---- sphere: harmonic exponentials along the decaying ray ------------------------

def _harmonic_ray_pair(taus, Kb, hbar):
    """:exp_*(tau (1/hbar)(x*x + y*y)):_K for real tau <= 0 on one pair.

    With z = e^{2 tau} in (0, 1], 4 z Delta_K(tau) = q(z) is a quadratic; the
    continued square root from z = 1 is 2 prod sqrt((z - r)/(1 - r)) with
    principal branches, valid as long as no root r lies in [0, 1].
    """
    taus = np.asarray(taus, dtype=float)
    if np.any(taus > 0):
        raise ValueError("ray nodes must have tau <= 0")
    d, c, dp = Kb[0, 0], Kb[0, 1], Kb[1, 1]
    a2 = 1 - 1j * (d + dp) + (c**2 - d * dp)
    a1 = 2 - 2 * (c**2 - d * dp)
    a0 = 1 + 1j * (d + dp) + (c**2 - d * dp)
    roots = np.roots([a2, a1, a0]) if abs(a2) > 1e-14 else np.array([-a0 / a1])
    for r in roots:
        if abs(r.imag) < 1e-9 and -1e-9 <= r.real <= 1 + 1e-9:
            raise BranchSingularityError("Delta_K vanishes on the decaying ray (z = %s)" % r, determinant=r)
    z = np.exp(2 * taus)
    logroot = sum(0.5 * np.log((z - r) / (1 - r)) for r in roots)
    q = a2 * z**2 + a1 * z + a0
    alpha = taus - logroot
    f = (z - 1) / (hbar * q)
    Q = np.empty((len(taus), 2, 2), dtype=complex)
    Q[:, 0, 0] = f * ((1 + z) - 1j * dp * (z - 1))
    Q[:, 1, 1] = f * ((1 + z) - 1j * d * (z - 1))
    Q[:, 0, 1] = Q[:, 1, 0] = f * 1j * c * (z - 1)
    return alpha.astype(complex), Q


def _embed_pair_batch(alpha, Qp, ctx, pair):
    n = ctx.n
    size = len(alpha)
    pos = [pair, ctx.m + pair]
    Q = np.zeros((size, n, n), dtype=complex)
    Q[np.ix_(range(size), pos, pos)] = Qp
    ones = np.ones(size, dtype=complex)
    return GaussBatch(ctx.m, alpha, np.zeros((size, n), dtype=complex), Q,
                      [(ones, np.zeros((size, 0, n)), np.zeros((size, 0)))])


def rho2_exp_nodes(ts, ctx, pairs=None):
    """Batch of e_*^{-t rho^2} (rho^2 summed over ``pairs``) for t >= 0.

    The factors on different pairs commute, so the exponential is the
    K-product of the per-pair harmonic exponentials at tau = -t hbar.
    """
    pairs = range(ctx.m) if pairs is None else pairs
    ts = np.asarray(ts, dtype=float)
    out = None
    for k in pairs:
        alpha, Qp = _harmonic_ray_pair(-ts * ctx.hbar, ctx.block(k), ctx.hbar)
        piece = _embed_pair_batch(alpha, Qp, ctx, k)
        out = piece if out is None else batch_product(out, piece, ctx, mode="zip")
    return out


def rho2(ctx, pairs=None):
    """rho^2 = sum (u_k * u_k + v_k * v_k) as a K-ordered polynomial."""
    pairs = range(ctx.m) if pairs is None else pairs
    terms = []
    for k in pairs:
        for pos in (k, ctx.m + k):
            g = GaussianElement.generator(ctx.m, pos)
            terms.append(gauss_product(g, g, ctx))
    pref = sum((t.prefactor for t in terms[1:]), terms[0].prefactor)
    return GaussianElement.from_poly(ctx.m, pref)


def zeta(ctx, k, bar=False):
    """zeta_k = u_k + i v_k, or its conjugate."""
    coeffs = np.zeros(ctx.n, dtype=complex)
    coeffs[k] = 1.0
    coeffs[ctx.m + k] = -1j if bar else 1j
    return GaussianElement.from_poly(ctx.m, Poly.linear(coeffs))


def laplace_transform(node_fn, rate, power, ctx, points=None, extra_rate=0.0,
                      scale=1.0, ladder=LADDER, rel_tol=1e-7, label="laplace", resolution=8.0):
    """scale * int_0^inf t^power e^{-extra_rate t} node_fn(t) dt by generalized Gauss-Laguerre.

    ``rate`` is the decay rate of node_fn.  The integrand has O(1)-scale
    structure near t = 0 (a bump of size |varpi_C(u)| at large |u|) while
    decaying slowly, so the rule is scaled to ``resolution`` times the decay
    rate: scaling to the decay rate itself puts only ~10 nodes in the bump.
    Nodes whose weights underflow carry negligible mass and are dropped.
    """
    points = ctx.grid() if points is None else points
    kappa = resolution * (rate + extra_rate)

    def build(nn):
        s, w = roots_genlaguerre(nn, power)
        keep = (w > 0) & np.isfinite(w)
        s, w = s[keep], w[keep]
        ts = s / kappa
        batch = node_fn(ts)
        logw = np.log(w) + s - extra_rate * ts - (1 + power) * math.log(kappa)
        batch = GaussBatch(batch.m, batch.alpha + logw, batch.l, batch.Q, batch.terms).scale(scale)
        return QuadratureElement(ctx.m, [batch], {"rule": "gen-laguerre", "power": power, "nodes": nn,
                                                  "rate": kappa, "label": label})

    return certified(build, points, ladder, rel_tol)


def star_inverse_quadratic(ctx, points=None, extra_rate=0.0, **kw):
    """rho^{-2} = int_0^inf e_*^{-t rho^2} dt; extra_rate c gives (rho^2 + c)^{-1}."""
    return laplace_transform(lambda ts: rho2_exp_nodes(ts, ctx), ctx.m * ctx.hbar, 0.0, ctx,
                             points, extra_rate=extra_rate, label="rho^-2", **kw)


def star_sqrt_inverse(ctx, points=None, **kw):
    """rho^{-1} = pi^{-1/2} int_0^inf t^{-1/2} e_*^{-t rho^2} dt."""
    return laplace_transform(lambda ts: rho2_exp_nodes(ts, ctx), ctx.m * ctx.hbar, -0.5, ctx,
                             points, scale=1 / math.sqrt(math.pi), label="rho^-1", **kw)


def complex_vacuum_all(ctx):
    """Product over all pairs of the complex vacuums."""
    out = complex_vacuum(ctx, 0)
    for k in range(1, ctx.m):
        out = gauss_product(out, complex_vacuum(ctx, k), ctx)
    return out


def sphere_generators(ctx, points=None, **kw):
    """mu = nu rho^{-2}, xi_k = rho^{-1} zeta_k, xibar_k = zetabar_k rho^{-1}, nu = hbar.

    mu^{-1} = nu^{-1} rho^2 is kept as the exact polynomial.
    """
    nu = ctx.hbar
    rinv2 = star_inverse_quadratic(ctx, points, **kw)
    rinv = star_sqrt_inverse(ctx, points, **kw)
    xi = [qstar(rinv, zeta(ctx, k), ctx=ctx) for k in range(ctx.m)]
    xibar = [qstar(zeta(ctx, k, bar=True), rinv, ctx=ctx) for k in range(ctx.m)]
    return {
        "mu": rinv2.scale(nu),
        "mu_inv": rho2(ctx).scale(1.0 / nu),
        "rho_inv": rinv,
        "rho_inv2": rinv2,
        "xi": xi,
        "xibar": xibar,
    }


def sphere_relations(ctx, gens=None, points=None):
    """Residuals of the sphere relations, in the literal displayed form and the derived form.

    Derived (nu = hbar): [mu^{-1}, xi_k] = 2 xi_k, sum xi_k xibar_k = 1 - m mu and
    (rho^2 + 2 nu) [xi_k, xibar_l] = 2 nu (xi_k xibar_l - delta_kl); the last is
    [xi_k, xibar_l] = -(1 + 2 mu)^{-1} 2 mu (delta_kl - xi_k xibar_l) multiplied on the
    left by the polynomial rho^2 + 2 nu.
    """
    points = ctx.grid() if points is None else points
    g = sphere_generators(ctx, points) if gens is None else gens
    m, nu = ctx.m, ctx.hbar
    one = QuadratureElement.wrap(GaussianElement.one(m))
    out = {}
    # [mu^{-1}, xi_k]
    for k in range(m):
        lhs = qcommutator(g["mu_inv"], g["xi"][k], ctx).evaluate(points)
        xi = g["xi"][k].evaluate(points)
        out["[mu^-1,xi_%d] = xi (literal)" % k] = rel_sup(lhs, xi)
        out["[mu^-1,xi_%d] = 2 xi (derived)" % k] = rel_sup(lhs, 2 * xi)
    # sum xi xibar
    pairs_prod = {(k, l): qstar(g["xi"][k], g["xibar"][l], ctx=ctx) for k in range(m) for l in range(m)}
    s = sum(pairs_prod[(k, k)].evaluate(points) for k in range(m))
    mu = g["mu"].evaluate(points)
    onev = one.evaluate(points)
    out["sum xi xibar = 1 - 2m mu (literal)"] = rel_sup(s, onev - 2 * m * mu)
    out["sum xi xibar = 1 - m mu (derived)"] = rel_sup(s, onev - m * mu)
    # commutators [xi_k, xibar_l]
    shifted = QuadratureElement.wrap(rho2(ctx)) + one.scale(2 * nu)
    for k in range(m):
        for l in range(m):
            comm = qstar(g["xi"][k], g["xibar"][l], ctx=ctx) - qstar(g["xibar"][l], g["xi"][k], ctx=ctx)
            delta = 1.0 if k == l else 0.0
            xx = pairs_prod[(k, l)]
            lhs = qstar(shifted, comm, ctx=ctx).evaluate(points)
            rhs = 2 * nu * (xx.evaluate(points) - delta * onev)
            out["(rho^2+2nu)[xi_%d,xibar_%d] (derived)" % (k, l)] = rel_sup(lhs, rhs)
            # literal form times (rho^2 + 2 nu), using (rho^2 + 2 nu)(1 + 2 mu)^{-1} = rho^2
            lit = -(2 * nu * delta * onev + qstar(rho2(ctx), xx, ctx=ctx).evaluate(points))
            out["(rho^2+2nu)[xi_%d,xibar_%d] (literal)" % (k, l)] = rel_sup(lhs, lit)
    return out


def eigenspace_probe(ctx, gens=None, points=None):
    """Grading by ad(mu^{-1}) on sample monomials.

    With mu = nu rho^{-2} and nu = hbar, ad(mu^{-1}) has eigenvalue 2l on the
    degree-l part (xi counts +1, xibar counts -1); the residuals against the
    unscaled eigenvalue l are reported next to the derived ones.
    """
    points = ctx.grid() if points is None else points
    g = sphere_generators(ctx, points) if gens is None else gens
    minv = g["mu_inv"]
    xi, xib = g["xi"][0], g["xibar"][0]
    samples = {
        "mu (l=0)": (g["mu"], 0),
        "xi_0 (l=1)": (xi, 1),
        "xi_0^2 (l=2)": (qstar(xi, xi, ctx=ctx), 2),
        "xibar_0 (l=-1)": (xib, -1),
        "xi_0 xibar_0 (l=0)": (qstar(xi, xib, ctx=ctx), 0),
    }
    out = {}
    for name, (A, ell) in samples.items():
        lhs = qcommutator(minv, A, ctx).evaluate(points)
        a = A.evaluate(points)
        scale = max(np.max(np.abs(a)), 1e-300)
        out[name] = {
            "degree": ell,
            "derived_residual": float(np.max(np.abs(lhs - 2 * ell * a)) / scale),
            "literal_residual": float(np.max(np.abs(lhs - ell * a)) / scale),
        }
    return out


def associativity_probe(t, ctx, points=None):
    """Both groupings of varpi_00 * e_*^{y0} * (e_*^{-i t tau} * varpi_00), on the 2m generators of ctx.

    ``ratio`` is right/left as computed.  ``expected_ratio`` is sqrt(1 + 2 hbar t),
    the value obtained by cancelling e_*^{y0} against the vacuum on one side only.
    ``justext`` is the scalar c with varpi_00 * W = c varpi_00, W = e_*^{-i t tau} * varpi_00.
    """
    points = ctx.grid() if points is None else points
    h = ctx.hbar
    vac = vacuum(ctx)
    W = heisenberg_vacuum_factor(t, ctx)
    ey = exp_y0(1.0, ctx)
    left = gauss_product(gauss_product(vac, ey, ctx), W, ctx)
    right = gauss_product(vac, gauss_product(ey, W, ctx), ctx)
    ratio, resid = scalar_multiple(right, left, points, tol=1e-6)
    lv, rv = left.evaluate(points), right.evaluate(points)
    c_just, resid_just = scalar_multiple(gauss_product(vac, W, ctx), vac, points, tol=1e-6)
    ey_on_W, _ = scalar_multiple(gauss_product(ey, W, ctx), W, points, tol=1e-6)
    return {
        "t": t,
        "lhs": lv,
        "rhs": rv,
        "ratio": complex(ratio),
        "ratio_residual": float(resid),
        "expected_ratio": math.sqrt(1 + 2 * h * t),
        "exp_y0_on_W": complex(ey_on_W),
        "justext": complex(c_just),
        "justext_expected": (1 + 2 * h * t) ** -0.5,
        "justext_residual": float(resid_just),
    }


def divisor_inverse(ctx, pair=0, points=None, ladder=(32, 64, 128)):
    """(zetabar zeta)_+^{-1} = int_0^inf e_*^{-t zetabar zeta} dt on one pair, zetabar zeta = rho^2 + hbar."""
    h = ctx.hbar
    return laplace_transform(lambda ts: rho2_exp_nodes(ts, ctx, pairs=[pair]), h, 0.0, ctx, points,
                             extra_rate=h, ladder=ladder, resolution=4.0, label="divisor")


def divisor_generators(ctx, points=None):
    """w = zeta_1 D, mu = nu w^2, tau = zeta_1^2 D / 2, eta_k = zeta_k w, etabar_k = w zetabar_k (pair 0 is zeta_1)."""
    nu = ctx.hbar
    D = divisor_inverse(ctx, 0, points)
    z1 = QuadratureElement.wrap(zeta(ctx, 0))
    w = qstar(z1, D, ctx=ctx)
    return {
        "D": D,
        "w": w,
        "mu": qstar(w, w, ctx=ctx).scale(nu),
        "tau": qstar(z1, z1, D, ctx=ctx).scale(0.5),
        "eta": [qstar(QuadratureElement.wrap(zeta(ctx, k)), w, ctx=ctx) for k in range(1, ctx.m)],
        "etabar": [qstar(w, QuadratureElement.wrap(zeta(ctx, k, bar=True)), ctx=ctx) for k in range(1, ctx.m)],
    }


def divisor_relations(ctx, points=None):
    """Residuals of the divisor relations, displayed coefficients next to derived ones.

    Derived at nu = hbar: [mu, tau] = -2 mu^2 and [eta_k, etabar_k] = -2 mu, while
    [tau, eta_k] = mu eta_k and [tau, etabar_k] = mu etabar_k hold as displayed.  The pair-0 relations are computed on
    the one-pair subalgebra, which is exact because pair 0 commutes with the rest.
    """
    points = ctx.grid() if points is None else points
    out = {}
    one_ctx = sub_context(ctx, [0])
    p1 = one_ctx.grid()
    g1 = divisor_generators(one_ctx, p1)
    mu, tau, w = g1["mu"], g1["tau"], g1["w"]
    one = QuadratureElement.wrap(GaussianElement.one(1))
    zb = QuadratureElement.wrap(zeta(one_ctx, 0, bar=True))
    out["zetabar w = 1 (left inverse)"] = rel_sup(qstar(zb, w, ctx=one_ctx).evaluate(p1), one.evaluate(p1))
    defect = one.evaluate(p1) - complex_vacuum(one_ctx, 0).evaluate(p1)
    out["w zetabar = 1 - partial complex vacuum"] = rel_sup(qstar(w, zb, ctx=one_ctx).evaluate(p1), defect)
    comm = qcommutator(mu, tau, one_ctx).evaluate(p1)
    mu2 = qstar(mu, mu, ctx=one_ctx).evaluate(p1)
    out["[mu,tau] = 2 mu^2 (literal)"] = rel_sup(comm, 2 * mu2)
    out["[mu,tau] = -2 mu^2 (derived)"] = rel_sup(comm, -2 * mu2)
    if ctx.m > 1:
        g = divisor_generators(ctx, points)
        mu_v = g["mu"]
        for k, (eta, etab) in enumerate(zip(g["eta"], g["etabar"]), start=1):
            c = qcommutator(eta, etab, ctx).evaluate(points)
            m_v = mu_v.evaluate(points)
            out["[eta_%d,etabar_%d] = mu (literal)" % (k, k)] = rel_sup(c, m_v)
            out["[eta_%d,etabar_%d] = -2 mu (derived)" % (k, k)] = rel_sup(c, -2 * m_v)
            te = qcommutator(g["tau"], eta, ctx).evaluate(points)
            me = qstar(mu_v, eta, ctx=ctx).evaluate(points)
            out["[tau,eta_%d] = mu eta" % k] = rel_sup(te, me)
            tb = qcommutator(g["tau"], etab, ctx).evaluate(points)
            mb = qstar(mu_v, etab, ctx=ctx).evaluate(points)
            out["[tau,etabar_%d] = mu etabar" % k] = rel_sup(tb, mb)
    return out


def nongo_divergence(ctx, Ts=(1.0, 2.0, 4.0, 8.0), n_nodes=64, points=None):
    """Pi(T) = int_{-T}^0 2 s c(s) ds with varpi_00 * e_*^{s x0} * varpi_00 = c(s) varpi_00.

    The sandwich scalar is 1 for every s, so Pi(T) = -T^2 grows without bound.
    """
    points = ctx.grid() if points is None else points
    vac = vacuum(ctx)
    x, w = roots_legendre(n_nodes)
    out = []
    for T in Ts:
        ss = 0.5 * T * (x - 1)
        cs = []
        for s_ in ss:
            a = np.zeros(ctx.n, dtype=complex)
            a[0] = s_
            sand = gauss_product(gauss_product(vac, exp_linear(a, ctx), ctx), vac, ctx)
            c, _ = scalar_multiple(sand, vac, points, tol=1e-8)
            cs.append(c)
        out.append((T, complex(np.sum(0.5 * T * w * 2 * ss * np.array(cs)))))
    return out
