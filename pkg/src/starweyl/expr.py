"""Small expression language over the Weyl generators.

Syntax is a subset of Python expressions, parsed with ``ast``:

    u1, v1, ...       generators with [u_i, v_j] = -i hbar delta_ij
    x0, y0, x1, ...   the same generators indexed from 0 (x_k = u_{k+1}, y_k = v_{k+1})
    hbar, i           the Planck constant (numeric value from the config) and sqrt(-1)
    a * b, a + b, a - b, -a, a ** n     star product, sums, integer star powers
    comm(a, b)        a * b - b * a
    expstar(a)        star exponential of a linear or single-pair quadratic element
    vacuum, bar_vacuum, complex_vacuum   named vacuums on pair 0; vacuum(k) etc. on pair k

Polynomial expressions are computed exactly when K has rational entries;
anything containing a transcendental factor is computed with the Gaussian
calculus.
"""

import ast
import cmath
from fractions import Fraction

import numpy as np

from . import gauss_calc as gc
from . import weyl_core as wc
from .poly import Poly


class ParseError(ValueError):
    def __init__(self, msg, position):
        super().__init__("%s at position %d" % (msg, position))
        self.position = position


class UnsupportedError(ValueError):
    pass


NAMED = {"vacuum": gc.vacuum, "bar_vacuum": gc.bar_vacuum, "complex_vacuum": gc.complex_vacuum}


def _gen_position(name, m):
    """Generator position for u1/v1/x0/y0 style names, or None."""
    if len(name) < 2 or name[0] not in "uvxy" or not name[1:].isdigit():
        return None
    k = int(name[1:])
    if name[0] in "uv":
        if k < 1:
            return None
        k -= 1
    if k >= m:
        raise UnsupportedError("generator %s needs m > %d" % (name, k))
    return k if name[0] in "ux" else m + k


def required_m(text):
    """Smallest m that contains every generator named in ``text``."""
    tree = _parse(text)
    need = 1
    for node in ast.walk(tree):
        if isinstance(node, ast.Name) and len(node.id) >= 2 and node.id[0] in "uvxy" and node.id[1:].isdigit():
            k = int(node.id[1:])
            need = max(need, k if node.id[0] in "uv" else k + 1)
    return need


def _parse(text):
    try:
        return ast.parse(text.strip(), mode="eval")
    except SyntaxError as e:
        raise ParseError("syntax error: %s" % e.msg, max((e.offset or 1) - 1, 0)) from None


class Evaluator:
    """Evaluates expressions in a numeric context and, when K is exact, an exact one."""

    def __init__(self, m, hbar, K_exact=None, K_numeric=None):
        self.m = m
        self.hbar = hbar
        self.exact = wc.ExpressionContext(m, K_exact, hbar) if K_exact is not None else None
        if K_numeric is None:
            K_numeric = gc.NumericContext.from_exact(self.exact).K if self.exact else None
        self.ctx = gc.NumericContext(m, K_numeric, hbar)

    # values: complex scalars, WeylElement (exact), GaussSum (numeric)
    def __call__(self, text):
        tree = _parse(text)
        return self._eval(tree.body)

    def _err(self, node, msg):
        raise ParseError(msg, getattr(node, "col_offset", 0))

    def _eval(self, node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, (int, float, complex)):
                self._err(node, "unsupported literal %r" % (node.value,))
            return node.value
        if isinstance(node, ast.Name):
            return self._name(node)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = self._eval(node.operand)
            return self._scale(v, -1) if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a = self._eval(node.left)
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)
                        and node.right.value >= 0):
                    self._err(node.right, "exponent must be a non-negative integer")
                out = 1
                for _ in range(node.right.value):
                    out = self._mul(out, a)
                return out
            b = self._eval(node.right)
            if isinstance(node.op, ast.Add):
                return self._add(a, b)
            if isinstance(node.op, ast.Sub):
                return self._add(a, self._scale(b, -1))
            if isinstance(node.op, ast.Mult):
                return self._mul(a, b)
            if isinstance(node.op, ast.Div):
                if not _is_scalar(b):
                    self._err(node, "division only by scalars")
                return self._scale(a, 1 / b if not isinstance(b, int) else Fraction(1, b))
            self._err(node, "unsupported operator")
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            name = node.func.id
            args = [self._eval(a) for a in node.args]
            if node.keywords:
                self._err(node, "keyword arguments are not supported")
            if name == "comm" and len(args) == 2:
                return self._add(self._mul(args[0], args[1]), self._scale(self._mul(args[1], args[0]), -1))
            if name == "expstar" and len(args) == 1:
                return self._expstar(args[0])
            if name in NAMED and len(args) == 1 and isinstance(args[0], int):
                if not 0 <= args[0] < self.m:
                    self._err(node, "pair index out of range")
                return gc.as_sum(NAMED[name](self.ctx, args[0]))
            self._err(node, "unknown function or wrong arity: %s" % name)
        self._err(node, "unsupported syntax %s" % type(node).__name__)

    def _name(self, node):
        n = node.id
        if n == "hbar":
            return self.hbar
        if n in ("i", "I"):
            return 1j
        if n in NAMED:
            return gc.as_sum(NAMED[n](self.ctx, 0))
        pos = _gen_position(n, self.m)
        if pos is None:
            self._err(node, "unknown name %r" % n)
        if self.exact is not None:
            return wc.WeylElement.generator(self.m, pos)
        return gc.as_sum(gc.GaussianElement.generator(self.m, pos))

    # ---- arithmetic across the three value kinds ----

    def _scale(self, v, c):
        if _is_scalar(v):
            return v * c
        if isinstance(v, wc.WeylElement):
            if _exactable(c):
                return v.scale(wc.cq(_to_exact(c)))
            v = self._numeric(v)
        return v.scale(complex(c))

    def _add(self, a, b):
        if _is_scalar(a) and _is_scalar(b):
            return a + b
        a, b = self._lift(a), self._lift(b)
        if isinstance(a, wc.WeylElement) and isinstance(b, wc.WeylElement):
            return a + b
        return self._numeric(a) + self._numeric(b)

    def _mul(self, a, b):
        if _is_scalar(a):
            return self._scale(b, a)
        if _is_scalar(b):
            return self._scale(a, b)
        if isinstance(a, wc.WeylElement) and isinstance(b, wc.WeylElement):
            return wc.star_product(a, b, self.exact)
        a, b = self._numeric(a), self._numeric(b)
        terms = []
        for s in a.terms:
            for t in b.terms:
                terms.extend(gc.as_sum(gc.gauss_product(s, t, self.ctx)).terms)
        return gc.GaussSum(terms)

    def _lift(self, v):
        if not _is_scalar(v):
            return v
        if self.exact is not None and _exactable(v):
            return wc.WeylElement.scalar(self.m, _to_exact(v))
        return gc.as_sum(gc.GaussianElement.one(self.m).scale(complex(v)))

    def _numeric(self, v):
        if isinstance(v, gc.GaussSum):
            return v
        if _is_scalar(v):
            return self._lift(complex(v)) if self.exact is None else gc.as_sum(
                gc.GaussianElement.one(self.m).scale(complex(v)))
        terms = {}
        for (idx, h), c in v.flat.items():
            terms[idx] = terms.get(idx, 0) + wc.to_complex(c) * self.hbar ** h
        return gc.as_sum(gc.GaussianElement.from_poly(self.m, Poly.from_terms(2 * self.m, terms)))

    def _weyl_symbol(self, v):
        """Weyl-ordered polynomial coefficients {multi_index: complex} of a polynomial value."""
        n = 2 * self.m
        if _is_scalar(v):
            return {(0,) * n: complex(v)}
        if isinstance(v, wc.WeylElement):
            w = wc.intertwine(v, self.exact.K, wc.zero_matrix(self.m))
            out = {}
            for (idx, h), c in w.flat.items():
                out[idx] = out.get(idx, 0) + wc.to_complex(c) * self.hbar ** h
            return out
        if len(v.terms) != 1:
            raise UnsupportedError("expstar needs a polynomial argument")
        G = v.terms[0]
        if np.any(G.Q != 0) or np.any(G.l != 0):
            raise UnsupportedError("expstar of a transcendental element is not supported")
        W = gc.intertwine_gauss(G, self.ctx.K, np.zeros_like(self.ctx.K), self.hbar)
        scale = cmath.exp(W.alpha)
        return {k: c * scale for k, c in W.prefactor.terms().items()}

    def _expstar(self, arg):
        sym = {k: c for k, c in self._weyl_symbol(arg).items() if abs(c) > 1e-15}
        n = 2 * self.m
        deg = max((sum(k) for k in sym), default=0)
        c0 = sym.pop((0,) * n, 0)
        if deg <= 1:
            c = np.zeros(n, dtype=complex)
            for k, v in sym.items():
                c[k.index(1)] = v
            return gc.as_sum(gc.exp_linear(c, self.ctx).scale(cmath.exp(c0)))
        if deg > 2 or any(sum(k) == 1 for k in sym):
            raise UnsupportedError("expstar supports linear forms and pure quadratics on one pair")
        pairs = {p % self.m for k in sym for p, e in enumerate(k) if e}
        if len(pairs) != 1:
            raise UnsupportedError("quadratic exponent must involve a single pair")
        p = pairs.pop()
        xx = sym.pop(_mono(n, {p: 2}), 0)
        yy = sym.pop(_mono(n, {self.m + p: 2}), 0)
        xy = sym.pop(_mono(n, {p: 1, self.m + p: 1}), 0)
        sub = gc.sub_context(self.ctx, [p])
        if sym:
            raise UnsupportedError("unsupported quadratic exponent")
        if abs(xx) < 1e-15 and abs(yy) < 1e-15:
            G = gc.star_exp_hyperbolic(xy * 1j * self.hbar / 2, sub)
        elif abs(xy) < 1e-15 and abs(xx - yy) < 1e-15:
            G = gc.star_exp_harmonic(xx * self.hbar, sub)
        else:
            raise UnsupportedError("quadratic exponent must be a multiple of x*y or x^2 + y^2")
        return gc.as_sum(gc.embed(G, self.ctx, [p]).scale(cmath.exp(c0)))


def _mono(n, powers):
    idx = [0] * n
    for p, e in powers.items():
        idx[p] = e
    return tuple(idx)


def _is_scalar(v):
    return isinstance(v, (int, float, complex, Fraction))


def _exactable(c):
    if isinstance(c, (int, Fraction)):
        return True
    if isinstance(c, float):
        return c == c and abs(c) != float("inf") and Fraction(c).denominator <= 2**20
    if isinstance(c, complex):
        return _exactable(c.real) and _exactable(c.imag)
    return False


def _to_exact(c):
    if isinstance(c, complex):
        return (Fraction(c.real), Fraction(c.imag))
    return Fraction(c)


def serialize(value, m):
    if isinstance(value, wc.WeylElement):
        return {"kind": "exact", "element": value.to_json()}
    if _is_scalar(value):
        z = complex(value)
        return {"kind": "scalar", "value": [z.real, z.imag]}
    return {"kind": "gaussian", "terms": [t.to_json() for t in value.terms]}


def evaluate_on(value, ev, points):
    if _is_scalar(value):
        return np.full(len(points), complex(value))
    if isinstance(value, wc.WeylElement):
        value = ev._numeric(value)
    return value.evaluate(points)
