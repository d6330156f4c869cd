"""Dense multivariate polynomials with complex float coefficients.

Coefficient array ``c`` has one axis per variable; ``c[i, j, ...]`` is the
coefficient of x0^i x1^j ...  Shapes are per-axis so that variables of low
degree stay cheap.
"""

import itertools

import numpy as np
from scipy.signal import convolve


class Poly:
    __slots__ = ("c",)

    def __init__(self, c):
        self.c = np.asarray(c, dtype=complex)

    @property
    def n(self):
        return self.c.ndim

    @classmethod
    def const(cls, n, value=1.0):
        return cls(np.full((1,) * n, value, dtype=complex))

    @classmethod
    def var(cls, n, i, coeff=1.0):
        shape = [1] * n
        shape[i] = 2
        c = np.zeros(shape, dtype=complex)
        idx = [0] * n
        idx[i] = 1
        c[tuple(idx)] = coeff
        return cls(c)

    @classmethod
    def linear(cls, coeffs, const=0.0):
        n = len(coeffs)
        out = cls.const(n, const)
        for i, a in enumerate(coeffs):
            if a != 0:
                out = out + cls.var(n, i, a)
        return out

    @classmethod
    def from_terms(cls, n, terms):
        """terms: {multi_index: coefficient}."""
        if not terms:
            return cls.const(n, 0.0)
        shape = [max(idx[k] for idx in terms) + 1 for k in range(n)]
        c = np.zeros(shape, dtype=complex)
        for idx, v in terms.items():
            c[tuple(idx)] += v
        return cls(c)

    def terms(self):
        return {tuple(int(i) for i in idx): complex(self.c[tuple(idx)])
                for idx in np.argwhere(self.c != 0)}

    def is_constant(self):
        return all(s == 1 for s in self.c.shape)

    def constant_value(self):
        return complex(self.c[(0,) * self.n])

    def degree(self):
        nz = np.argwhere(self.c != 0)
        return int(nz.sum(axis=1).max()) if len(nz) else 0

    def _padded(self, shape):
        pad = [(0, s - t) for s, t in zip(shape, self.c.shape)]
        return np.pad(self.c, pad)

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(self.n, other)
        shape = [max(a, b) for a, b in zip(self.c.shape, other.c.shape)]
        return Poly(self._padded(shape) + other._padded(shape))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self.c)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Poly):
            if other.is_constant():
                return Poly(self.c * other.constant_value())
            if self.is_constant():
                return Poly(other.c * self.constant_value())
            return Poly(convolve(self.c, other.c, method="direct"))
        return Poly(self.c * other)

    __rmul__ = __mul__

    def diff(self, i):
        k = self.c.shape[i]
        if k == 1:
            shape = list(self.c.shape)
            return Poly(np.zeros(shape, dtype=complex))
        w = np.arange(1, k, dtype=float).reshape([-1 if a == i else 1 for a in range(self.n)])
        sl = [slice(None)] * self.n
        sl[i] = slice(1, None)
        return Poly(self.c[tuple(sl)] * w)

    def outer(self, other):
        """Tensor product: variables of ``other`` appended after ours."""
        return Poly(np.multiply.outer(self.c, other.c))

    def trim(self, tol=0.0):
        c = self.c
        scale = np.abs(c).max() if c.size else 0.0
        for axis in range(c.ndim):
            while c.shape[axis] > 1:
                sl = [slice(None)] * c.ndim
                sl[axis] = -1
                if np.all(np.abs(c[tuple(sl)]) <= tol * scale):
                    sl[axis] = slice(0, -1)
                    c = c[tuple(sl)]
                else:
                    break
        return Poly(c)

    def evaluate(self, points):
        """Evaluate at points of shape (..., n)."""
        points = np.asarray(points, dtype=complex)
        lead = points.shape[:-1]
        pts = points.reshape(-1, self.n)
        out = self.c
        # Horner along the last axis repeatedly, broadcasting over points.
        vals = np.broadcast_to(out, (pts.shape[0],) + out.shape)
        for axis in reversed(range(self.n)):
            x = pts[:, axis].reshape((-1,) + (1,) * axis)
            acc = vals[..., -1]
            for k in range(vals.shape[-1] - 2, -1, -1):
                acc = acc * x + vals[..., k]
            vals = acc
        return np.asarray(vals).reshape(lead)

    def substitute_affine(self, L, shift):
        """P(L u + shift) as a polynomial in u; L has shape (n, n_out)."""
        L = np.asarray(L, dtype=complex)
        shift = np.asarray(shift, dtype=complex)
        n_out = L.shape[1]
        forms = [Poly.linear(L[i], shift[i]) for i in range(self.n)]
        return _horner(self.c, forms, n_out)

    def wick(self, C):
        """exp(1/2 sum C_ij d_i d_j) P, a finite sum on polynomials."""
        C = np.asarray(C, dtype=complex)
        pairs = [(i, j, C[i, j]) for i in range(self.n) for j in range(self.n) if C[i, j] != 0]
        out = self
        term = self
        k = 0
        while True:
            k += 1
            nxt = None
            for i, j, cij in pairs:
                piece = term.diff(i).diff(j) * (0.5 * cij)
                nxt = piece if nxt is None else nxt + piece
            if nxt is None or not np.any(nxt.c):
                return out
            term = nxt * (1.0 / k)
            out = out + term

    def embed(self, n_big, positions):
        """Place our variables at ``positions`` of an n_big-variable polynomial."""
        shape = [1] * n_big
        for k, p in enumerate(positions):
            shape[p] = self.c.shape[k]
        order = np.argsort(positions)
        c = np.transpose(self.c, order)
        return Poly(c.reshape(shape))

    def restrict(self, positions):
        """Drop variables not in ``positions`` (they must appear with degree 0)."""
        others = [a for a in range(self.n) if a not in positions]
        for a in others:
            if self.c.shape[a] != 1:
                raise ValueError("variable %d is present" % a)
        c = self.c.reshape([self.c.shape[p] for p in sorted(positions)])
        inv = np.argsort(np.argsort(positions))
        return Poly(np.transpose(c, inv))


def _horner(c, forms, n_out):
    if c.ndim == 0:
        return Poly.const(n_out, complex(c))
    first, rest = forms[0], forms[1:]
    acc = None
    for k in range(c.shape[0] - 1, -1, -1):
        piece = _horner(c[k], rest, n_out) if rest else Poly.const(n_out, complex(c[k]))
        acc = piece if acc is None else acc * first + piece
    return acc


def multi_indices(n, max_total):
    for d in range(max_total + 1):
        for combo in itertools.combinations_with_replacement(range(n), d):
            idx = [0] * n
            for p in combo:
                idx[p] += 1
            yield tuple(idx)


# ---- symmetric-tensor form, used for fast Wick contraction + affine maps ----

_EXP_CACHE = {}


def _exponent_table(n, r):
    key = (n, r)
    if key not in _EXP_CACHE:
        if r == 0:
            tab = np.zeros((1, n), dtype=int)
        else:
            idx = np.indices((n,) * r).reshape(r, -1).T
            tab = np.stack([(idx == v).sum(axis=1) for v in range(n)], axis=1)
        _EXP_CACHE[key] = tab
    return _EXP_CACHE[key]


def to_tensors(P):
    """Symmetric tensors T_k with P(z) = sum_k T_k[z, ..., z]."""
    n = P.n
    d = P.degree()
    out = [np.zeros((n,) * k, dtype=complex) for k in range(d + 1)]
    for idx, c in P.terms().items():
        k = sum(idx)
        tab = _exponent_table(n, k)
        hits = np.all(tab == np.asarray(idx), axis=1)
        flat = out[k].reshape(-1)
        flat[hits] += c / hits.sum()
    return out


def from_tensors(T, n):
    d = len(T) - 1
    c = np.zeros((d + 1,) * n, dtype=complex) if n else np.zeros((), dtype=complex)
    for r, t in enumerate(T):
        tab = _exponent_table(n, r)
        np.add.at(c, tuple(tab.T), t.reshape(-1))
    return Poly(c).trim()


def _contract_last_two(t, C):
    k = t.ndim
    return np.tensordot(t, C, axes=([k - 2, k - 1], [0, 1]))


def wick_substitute(P, C, L, shift):
    """Wick_C(P)(L u + shift), as a polynomial in u.  L has shape (n, n_out)."""
    from math import comb, factorial

    if P.n ** P.degree() > 50000:
        return P.wick(C).substitute_affine(L, shift)
    T = to_tensors(P)
    d = len(T) - 1
    C = np.asarray(C, dtype=complex)
    # Wick: T_k contributes to rank k - 2j
    W = [np.zeros((P.n,) * k, dtype=complex) for k in range(d + 1)]
    for k, t in enumerate(T):
        cur = t
        j = 0
        while True:
            W[k - 2 * j] = W[k - 2 * j] + cur * (factorial(k) / (factorial(k - 2 * j) * factorial(j) * 2 ** j))
            if k - 2 * j < 2:
                break
            cur = _contract_last_two(cur, C)
            j += 1
    L = np.asarray(L, dtype=complex)
    shift = np.asarray(shift, dtype=complex)
    n_out = L.shape[1]
    R = [np.zeros((n_out,) * r, dtype=complex) for r in range(d + 1)]
    for k, t in enumerate(W):
        cur = t
        # peel off shifts one slot at a time: cur has rank k - s after s shifts
        for s in range(k + 1):
            r = k - s
            u = cur
            for _ in range(r):
                u = np.tensordot(u, L, axes=([0], [0]))
            R[r] = R[r] + comb(k, s) * u
            if r:
                cur = np.tensordot(cur, shift, axes=([cur.ndim - 1], [0]))
    return from_tensors(R, n_out)
