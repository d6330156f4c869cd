"""Berezin operators on the Poincare disk as truncated matrices.

Operators act on the holomorphic space H^s(D) with orthonormal basis
e^m = c_m w^m, c_m^2 = Gamma(s+m+2) / (pi Gamma(m+1) Gamma(s+1)).  A matrix
stores the coefficient of e^k in P_s(a) e^m at row k, column m, so the disk
star product is the matrix product.  Compressing to N basis vectors corrupts
the top rows of products; identities are asserted on an interior block only.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, expm
from scipy.special import betaln, gammaln, roots_jacobi


class ParameterError(ValueError):
    pass


class TruncationError(ArithmeticError):
    pass


class QuadratureError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DiskParameter:
    s: float
    N: int = 64
    buffer: int = 8

    def __post_init__(self):
        if not self.s > -1:
            raise ParameterError("s must exceed -1, got %r" % self.s)
        if self.N <= 2 * self.buffer:
            raise ParameterError("N must exceed twice the buffer width")


@dataclass(frozen=True)
class TruncatedOperator:
    entries: np.ndarray
    param: DiskParameter
    label: str = ""

    @property
    def N(self):
        return self.entries.shape[0]

    def __matmul__(self, other):
        return disk_star_product(self, other)

    def __add__(self, other):
        _same_size(self, other)
        return TruncatedOperator(self.entries + other.entries, self.param)

    def __sub__(self, other):
        _same_size(self, other)
        return TruncatedOperator(self.entries - other.entries, self.param)

    def scale(self, c):
        return TruncatedOperator(c * self.entries, self.param, self.label)

    def interior(self, depth=1):
        n = self.N - self.param.buffer * max(depth, 1)
        return self.entries[:n, :n]

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh)
            wr.writerow(["row", "col", "re", "im"])
            for k, m in zip(*np.nonzero(self.entries)):
                z = self.entries[k, m]
                wr.writerow([int(k), int(m), repr(float(z.real)), repr(float(z.imag))])


def _same_size(a, b):
    if a.entries.shape != b.entries.shape:
        raise ValueError("size mismatch: %s vs %s" % (a.entries.shape, b.entries.shape))


def identity(p):
    return TruncatedOperator(np.eye(p.N, dtype=complex), p, "1")


def log_norm_const(s, m):
    """log c_m for the orthonormal basis of H^s(D)."""
    m = np.asarray(m, dtype=float)
    return 0.5 * (gammaln(s + m + 2) - math.log(math.pi) - gammaln(m + 1) - gammaln(s + 1))


def berezin_matrix(p_deg, q_deg, param, weight=0):
    """P_s(w^p wbar^q (1 - w wbar)^(-weight)) from the closed Beta-function form.

    The disk integral of v^(m+p) vbar^(k+q) (1-|v|^2)^(s-weight) against area is
    pi B(m+p+1, s-weight+1) when k = m+p-q and zero otherwise.
    """
    s = param.s
    if not s - weight > -1:
        raise ParameterError("symbol weight %d needs s > %d" % (weight, weight - 1))
    N = param.N
    out = np.zeros((N, N), dtype=complex)
    m = np.arange(N)
    k = m + p_deg - q_deg
    ok = (k >= 0) & (k < N)
    m, k = m[ok], k[ok]
    logv = (log_norm_const(s, m) + log_norm_const(s, k)
            + math.log(math.pi) + betaln(m + p_deg + 1, s - weight + 1))
    out[k, m] = np.exp(logv)
    return TruncatedOperator(out, param, "w^%d wbar^%d" % (p_deg, q_deg))


def disk_star_product(a, b):
    _same_size(a, b)
    return TruncatedOperator(a.entries @ b.entries, a.param)


def w_op(param):
    return berezin_matrix(1, 0, param)


def wbar_op(param):
    return berezin_matrix(0, 1, param)


def derivative_op(param):
    """d/dw in the orthonormal basis: e^m -> m c_m / c_(m-1) e^(m-1)."""
    N = param.N
    m = np.arange(1, N)
    out = np.zeros((N, N), dtype=complex)
    out[m - 1, m] = m * np.exp(log_norm_const(param.s, m) - log_norm_const(param.s, m - 1))
    return TruncatedOperator(out, param, "d/dw")


def inverse(a):
    return TruncatedOperator(np.linalg.inv(a.entries), a.param)


def _defect(label, A, B, param, depth=1):
    n = param.N - param.buffer * max(depth, 1)
    d = np.abs(A[:n, :n] - B[:n, :n])
    loc = np.unravel_index(int(np.argmax(d)), d.shape)
    return {"identity": label, "N": param.N, "s": param.s, "buffer": param.buffer,
            "max_defect": float(d[loc]), "location": [int(loc[0]), int(loc[1])]}


# ---- disk quadrature ----------------------------------------------------------

def disk_rule(s, n_r=48, n_theta=128):
    """Nodes and weights for int_D g(v) (1-|v|^2)^s dA(v).

    Gauss-Jacobi in t = r^2 carries the weight (1-t)^s exactly and the angle is
    sampled by the trapezoid rule, which is exact for trigonometric degree < n_theta.
    """
    x, wx = roots_jacobi(n_r, s, 0.0)
    t = 0.5 * (1 + x)
    wt = wx * 0.5 ** (s + 1)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    v = np.sqrt(t)[:, None] * np.exp(1j * theta)[None, :]
    w = 0.5 * wt[:, None] * np.full(n_theta, 2 * np.pi / n_theta)[None, :]
    if not np.all(np.isfinite(w)):
        raise QuadratureError("non-finite Jacobi weights at n_r=%d" % n_r)
    return v.ravel(), w.ravel()


def quadrature_matrix_entry(p_deg, q_deg, m, k, s, weight=0, n_r=48, n_theta=128):
    v, w = disk_rule(s - weight, n_r, n_theta)
    integral = np.sum(w * v ** (m + p_deg) * np.conj(v) ** (k + q_deg))
    return integral * math.exp(log_norm_const(s, m) + log_norm_const(s, k))


def matrix_vs_quadrature(s_values=(0.5, 1.0, 2.0), max_deg=4, max_index=12, n_r=48):
    """Max deviation between closed-form entries and direct disk quadrature."""
    worst = {"max_defect": 0.0, "cell": None}
    for s in s_values:
        param = DiskParameter(s, N=max_index + max_deg + 2, buffer=0)
        v, w = disk_rule(s, n_r, 4 * (max_index + max_deg) + 8)
        vb = np.conj(v)
        for p in range(max_deg + 1):
            for q in range(max_deg + 1 - p):
                A = berezin_matrix(p, q, param).entries
                for m in range(max_index + 1):
                    col = v ** (m + p)
                    for k in range(max_index + 1):
                        val = np.sum(w * col * vb ** (k + q))
                        val *= math.exp(log_norm_const(s, m) + log_norm_const(s, k))
                        d = abs(val - A[k, m])
                        if d > worst["max_defect"]:
                            worst = {"max_defect": float(d), "cell": [s, p, q, m, k]}
    return worst


def beta_check(m=2, s=1.0, n_r=32):
    v, w = disk_rule(s, n_r, 16)
    val = float(np.real(np.sum(w * np.abs(v) ** (2 * m))))
    closed = math.pi * math.exp(betaln(m + 1, s + 1))
    return {"quadrature": val, "closed_form": closed, "defect": abs(val - closed)}


def reproducing_check(coeffs, s, points, n_r=64, n_theta=256):
    """Apply the Bergman-type kernel (s+1)/pi (1-|v|^2)^s / (1 - w vbar)^(s+2) to f."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if not s > -1:
        raise ParameterError("s must exceed -1")
    points = np.asarray(points, dtype=complex)
    v, w = disk_rule(s, n_r, n_theta)
    fv = np.polynomial.polynomial.polyval(v, coeffs)
    kern = (s + 1) / np.pi / (1 - points[:, None] * np.conj(v)[None, :]) ** (s + 2)
    got = kern @ (w * fv)
    want = np.polynomial.polynomial.polyval(points, coeffs)
    err = np.abs(got - want)
    # a coarser rule must agree too, otherwise the quadrature has not converged
    v2, w2 = disk_rule(s, n_r // 2, n_theta // 2)
    kern2 = (s + 1) / np.pi / (1 - points[:, None] * np.conj(v2)[None, :]) ** (s + 2)
    got2 = kern2 @ (w2 * np.polynomial.polynomial.polyval(v2, coeffs))
    spread = float(np.max(np.abs(got2 - got)))
    if spread > 1e-3:
        raise QuadratureError("disk quadrature not converged (spread %.2e)" % spread)
    return {"max_error": float(np.max(err)), "values": got, "expected": want,
            "refinement_spread": spread}


# ---- operator identities ------------------------------------------------------

def diagonal_report(param, k_max=None):
    """Diagonal of P_s(wbar * w) against (k+1)/(s+k+2)."""
    A = (wbar_op(param) @ w_op(param)).entries
    k = np.arange(param.N if k_max is None else k_max)
    k = k[k < param.N - param.buffer]
    want = (k + 1) / (param.s + k + 2)
    diag = np.diag(A)[k]
    off = A - np.diag(np.diag(A))
    n = param.N - param.buffer
    return {"max_defect": float(np.max(np.abs(diag - want))),
            "offdiag": float(np.max(np.abs(off[:n, :n]))), "checked": int(len(k))}


def canonical_conjugate(param):
    """w^* = (1 - wbar*w)^(-1) * wbar."""
    one = identity(param)
    return inverse(one - wbar_op(param) @ w_op(param)) @ wbar_op(param)


def left_inverse(param):
    """w^bullet = (wbar*w)^(-1) * wbar.

    The compressed product wbar @ w loses its last diagonal entry, so the
    inverse is taken of the compression of P_s(|w|^2), which equals wbar*w.
    """
    return inverse(berezin_matrix(1, 1, param)) @ wbar_op(param)


def vacuum_projector(param, t=None):
    """varpi_0 as the large-t limit of exp(-t w * wbar/(1 - w wbar)) = exp(-(t/s) w d/dw)."""
    if param.s <= 0:
        raise ParameterError("the vacuum limit uses P_s(wbar/(1-w wbar)), defined for s > 0")
    gen = w_op(param) @ berezin_matrix(0, 1, param, weight=1)
    t = 60.0 * param.s if t is None else t
    return TruncatedOperator(expm(-t * gen.entries), param, "varpi0")


def disk_commutators(param):
    if param.s <= 0:
        raise ParameterError("disk commutators need s > 0")
    s = param.s
    one = identity(param)
    w, wb = w_op(param), wbar_op(param)
    ws = canonical_conjugate(param)
    reports = []
    c1 = ws @ w - w @ ws
    reports.append(_defect("[w*,w] = 1/(s+1)", c1.entries, one.entries / (s + 1), param, 2))
    lhs = w @ wb - wb @ w
    rhs = ((one - w @ wb) @ (one - wb @ w)).scale(-1 / (s + 1))
    reports.append(_defect("[w,wbar] = -(1/(s+1))(1-w*wbar)(1-wbar*w)", lhs.entries, rhs.entries, param, 2))
    P0 = vacuum_projector(param)
    e0 = np.zeros((param.N, param.N), dtype=complex)
    e0[0, 0] = 1
    reports.append(_defect("varpi0 = f -> f(0)", P0.entries, e0, param))
    reports.append(_defect("varpi0 idempotent", (P0 @ P0).entries, P0.entries, param))
    lb = left_inverse(param)
    reports.append(_defect("w^bullet * w = 1", (lb @ w).entries, one.entries, param, 2))
    reports.append(_defect("w * w^bullet = 1 - varpi0", (w @ lb).entries, one.entries - e0, param, 2))
    D = derivative_op(param)
    reports.append(_defect("(1-wbar*w)^-1 * wbar = (1/(s+1)) d/dw", ws.entries, D.entries / (s + 1), param, 2))
    reports.append(_defect("P_s(wbar/(1-w wbar)) = (1/s) d/dw",
                           berezin_matrix(0, 1, param, weight=1).entries, D.entries / s, param))
    hol = max(np.max(np.abs((berezin_matrix(p, 0, param) @ berezin_matrix(q, 0, param)).entries
                            - berezin_matrix(p + q, 0, param).entries)[:param.N - param.buffer])
              for p in range(3) for q in range(3))
    reports.append({"identity": "P_s(w^p) P_s(w^q) = P_s(w^(p+q))", "N": param.N, "s": s,
                    "buffer": param.buffer, "max_defect": float(hol), "location": None})
    return reports


def poisson_limit(s, N=64, buffer=8, k_max=8):
    """(s+1)[w,wbar] against -P_s((1-|w|^2)^2) on the low modes; the gap is O(1/s)."""
    param = DiskParameter(s, N, buffer)
    w, wb = w_op(param), wbar_op(param)
    q = ((w @ wb - wb @ w).scale(s + 1)).entries
    k = np.arange(k_max)
    classical = -(s + 2) * (s + 1) / ((s + k + 3) * (s + k + 2))
    return float(np.max(np.abs(np.diag(q)[:k_max] - classical)))


# ---- embedding through a number-basis matrix model ----------------------------

def fock_embedding(N, hbar, buffer=8, shift=1.0):
    """Truncated matrix model of z = x + i y, zbar = x - i y with [zbar, z] = 2 hbar.

    z raises the number basis, so zbar * z = 2 hbar (n+1) is positive.  The disk
    generators are w = z (shift + zbar z)^(-1/2) and wbar = (shift + zbar z)^(-1/2) zbar.
    shift = 0 is the bare square root of zbar*z; it makes w an isometry and the
    commutator identity fails at the vacuum row.
    """
    if N < 16:
        raise ParameterError("fock embedding needs N >= 16")
    if hbar <= 0:
        raise ParameterError("hbar must be positive")
    n = np.arange(N)
    z = np.zeros((N, N))
    z[n[1:], n[:-1]] = np.sqrt(2 * hbar * n[1:])
    zb = z.T.copy()
    zz = zb @ z
    lam, vec = eigh(shift * np.eye(N) + zz)
    interior = N - buffer
    weight_top = np.sum(np.abs(vec[interior:, :]) ** 2, axis=0)
    bad = lam <= 0
    if np.any(bad & (weight_top < 0.5)):
        raise TruncationError("non-positive spectrum inside the interior block; increase N")
    clamped = int(np.sum(bad))
    lam = np.where(bad, 1.0, lam)
    root_inv = (vec / np.sqrt(lam)) @ vec.T
    w = z @ root_inv
    wb = root_inv @ zb
    one = np.eye(N)
    nu = hbar
    lhs = w @ wb - wb @ w
    rhs = -2 * nu * (one - w @ wb) @ (one - wb @ w)
    d = np.abs(lhs - rhs)[: interior - 2, : interior - 2]
    loc = np.unravel_index(int(np.argmax(d)), d.shape)

    # fit s from the diagonal of wbar*w against (k+1)/(s+k+2)
    k = np.arange(interior - 2)
    diag = np.diag(wb @ w)[: interior - 2]
    s_k = (k + 1) / diag - k - 2
    s_fit = float(np.mean(s_k))
    fit_spread = float(np.max(np.abs(s_k - s_fit)))
    s_pred = (1 - 2 * hbar) / (2 * hbar)
    return {
        "identity": "[w,wbar] = -2 nu (1-w*wbar)(1-wbar*w)",
        "N": N, "hbar": hbar, "buffer": buffer,
        "model": "z raises the number basis with |z e_n| = sqrt(2 hbar (n+1)); "
                 "root taken of %g + zbar*z by eigendecomposition" % shift,
        "max_defect": float(d[loc]), "location": [int(loc[0]), int(loc[1])],
        "clamped_eigenvalues": clamped,
        "wbar_w_diagonal_in_unit_interval": bool(np.all((diag > 0) & (diag < 1))),
        "s_fit": s_fit, "s_fit_spread": fit_spread,
        "s_predicted": s_pred, "dictionary": "1/(s+1) = 2 hbar",
        "berezin_match": float(np.max(np.abs(
            w[:interior, :interior] - w_op(DiskParameter(s_fit, N, buffer)).entries.real[:interior, :interior]))),
    }
