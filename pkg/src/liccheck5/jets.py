"""Truncated Taylor jets (order <= 3) with batched numpy storage.

A Jet carries the value and the plain (non-factorial) partial derivatives of a
scalar field up to a truncation order, at a batch of points.  Arrays:

    val   (...,)          field value
    grad  (..., n)        first partials
    hess  (..., n, n)     second partials, symmetric
    third (..., n, n, n)  third partials, symmetric

Arithmetic propagates derivatives by the Leibniz rule; unary functions go
through the chain rule (Faa di Bruno through order 3).  The ``order``
attribute tracks how many derivative levels are trustworthy; differentiating
drops it by one.  Batch shapes broadcast like numpy arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, OrderError, SingularMetricError

__all__ = [
    "Jet",
    "seed",
    "constant",
    "extract",
    "jmat_mul",
    "jmat_vec",
    "jmat_inv",
    "central_diff",
]


class Jet:
    __slots__ = ("val", "grad", "hess", "third", "order", "dim")

    def __init__(self, val, grad=None, hess=None, third=None, order=None, dim=None):
        self.val = np.asarray(val)
        self.grad = None if grad is None else np.asarray(grad)
        self.hess = None if hess is None else np.asarray(hess)
        self.third = None if third is None else np.asarray(third)
        if order is None:
            order = 0
            if self.grad is not None:
                order = 1
            if self.hess is not None:
                order = 2
            if self.third is not None:
                order = 3
        self.order = order
        if dim is not None:
            self.dim = dim
        elif self.grad is not None:
            self.dim = self.grad.shape[-1]
        else:
            self.dim = 0
        if order >= 1 and self.grad is None:
            raise OrderError("order %d jet is missing grad" % order)
        if order >= 2 and self.hess is None:
            raise OrderError("order %d jet is missing hess" % order)
        if order >= 3 and self.third is None:
            raise OrderError("order %d jet is missing third" % order)

    # -- helpers -------------------------------------------------------

    def _coerce(self, other):
        """Turn a scalar/ndarray operand into (val, None-derivs) pseudo-jet."""
        if isinstance(other, Jet):
            return other
        return Jet(np.asarray(other), order=0, dim=self.dim)

    def copy(self):
        g = None if self.grad is None else self.grad.copy()
        h = None if self.hess is None else self.hess.copy()
        t = None if self.third is None else self.third.copy()
        return Jet(self.val.copy(), g, h, t, order=self.order, dim=self.dim)

    def astype(self, dtype):
        g = None if self.grad is None else self.grad.astype(dtype)
        h = None if self.hess is None else self.hess.astype(dtype)
        t = None if self.third is None else self.third.astype(dtype)
        return Jet(self.val.astype(dtype), g, h, t, order=self.order, dim=self.dim)

    def conj(self):
        g = None if self.grad is None else self.grad.conj()
        h = None if self.hess is None else self.hess.conj()
        t = None if self.third is None else self.third.conj()
        return Jet(self.val.conj(), g, h, t, order=self.order, dim=self.dim)

    @property
    def real(self):
        g = None if self.grad is None else self.grad.real
        h = None if self.hess is None else self.hess.real
        t = None if self.third is None else self.third.real
        return Jet(self.val.real, g, h, t, order=self.order, dim=self.dim)

    @property
    def imag(self):
        g = None if self.grad is None else self.grad.imag
        h = None if self.hess is None else self.hess.imag
        t = None if self.third is None else self.third.imag
        return Jet(self.val.imag, g, h, t, order=self.order, dim=self.dim)

    # -- ring operations ------------------------------------------------

    def __add__(self, other):
        b = self._coerce(other)
        order = min(self.order, b.order) if isinstance(other, Jet) else self.order
        out = Jet(self.val + b.val, order=0, dim=max(self.dim, b.dim))
        if order >= 1:
            out.grad = _nadd(self.grad, b.grad)
        if order >= 2:
            out.hess = _nadd(self.hess, b.hess)
        if order >= 3:
            out.third = _nadd(self.third, b.third)
        out.order = order
        return out

    __radd__ = __add__

    def __neg__(self):
        g = None if self.grad is None else -self.grad
        h = None if self.hess is None else -self.hess
        t = None if self.third is None else -self.third
        return Jet(-self.val, g, h, t, order=self.order, dim=self.dim)

    def __sub__(self, other):
        if isinstance(other, Jet):
            return self + (-other)
        return self + (-np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        b = self._coerce(other)
        order = min(self.order, b.order) if isinstance(other, Jet) else self.order
        av, bv = self.val, b.val
        out = Jet(av * bv, order=0, dim=max(self.dim, b.dim))
        ag, bg = self.grad, b.grad
        if order >= 1:
            out.grad = _nadd(None if ag is None else ag * _pad(bv, 1),
                             None if bg is None else bg * _pad(av, 1))
        if order >= 2:
            cross = None
            if ag is not None and bg is not None:
                cross = ag[..., :, None] * bg[..., None, :]
                cross = cross + np.swapaxes(cross, -1, -2)
            out.hess = _nadd(_nadd(
                None if self.hess is None else self.hess * _pad(bv, 2),
                None if b.hess is None else b.hess * _pad(av, 2)), cross)
        if order >= 3:
            t = _nadd(None if self.third is None else self.third * _pad(bv, 3),
                      None if b.third is None else b.third * _pad(av, 3))
            if self.hess is not None and bg is not None:
                t = _nadd(t, _sym_gh(bg, self.hess))
            if b.hess is not None and ag is not None:
                t = _nadd(t, _sym_gh(ag, b.hess))
            out.third = t
        out.order = order
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        return self.pow_int(p)

    # -- chain rule ------------------------------------------------------

    def compose(self, f0, f1=None, f2=None, f3=None):
        """Jet of f(self) given derivatives f', f'', f''' of f at self.val."""
        out = Jet(f0, order=0, dim=self.dim)
        order = self.order
        g = self.grad
        if order >= 1:
            out.grad = f1[..., None] * g
        if order >= 2:
            gg = g[..., :, None] * g[..., None, :]
            out.hess = f1[..., None, None] * self.hess + f2[..., None, None] * gg
        if order >= 3:
            ggg = g[..., :, None, None] * g[..., None, :, None] * g[..., None, None, :]
            out.third = (
                f1[..., None, None, None] * self.third
                + f2[..., None, None, None] * _sym_gh(g, self.hess)
                + f3[..., None, None, None] * ggg
            )
        out.order = order
        return out

    def sqrt(self):
        v = self.val
        if np.iscomplexobj(v):
            raise DomainError("sqrt of a complex jet is not supported")
        if np.any(v <= 0):
            raise DomainError("sqrt needs strictly positive values")
        f0 = np.sqrt(v)
        return self.compose(f0, 0.5 / f0, -0.25 / (f0 * v), 0.375 / (f0 * v * v))

    def ln(self):
        v = self.val
        if np.iscomplexobj(v):
            raise DomainError("ln of a complex jet is not supported")
        if np.any(v <= 0):
            raise DomainError("ln needs strictly positive values")
        iv = 1.0 / v
        return self.compose(np.log(v), iv, -iv * iv, 2.0 * iv * iv * iv)

    def reciprocal(self):
        v = self.val
        if np.any(v == 0):
            raise DomainError("reciprocal of zero")
        iv = 1.0 / v
        i2 = iv * iv
        return self.compose(iv, -i2, 2.0 * i2 * iv, -6.0 * i2 * i2)

    def pow_int(self, p):
        if not isinstance(p, (int, np.integer)):
            raise DomainError("pow_int exponent must be an integer")
        p = int(p)
        if p < 0:
            return self.reciprocal().pow_int(-p)
        v = self.val
        zero = np.zeros_like(v)

        def term(k):
            c = 1
            for t in range(k):
                c *= p - t
            # nonzero falling factorial implies p - k >= 0, so no 0**negative
            return c * np.power(v, p - k) if c else zero

        return self.compose(np.power(v, p), term(1), term(2), term(3))

    # -- differentiation ---------------------------------------------------

    def partial(self, i):
        """The i-th partial derivative as a jet one order lower."""
        if self.order < 1:
            raise OrderError("cannot differentiate an order-0 jet")
        g = None if self.order < 2 else self.hess[..., i, :]
        h = None if self.order < 3 else self.third[..., i, :, :]
        return Jet(self.grad[..., i], g, h, None, order=self.order - 1, dim=self.dim)


def _nadd(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _pad(scal, k):
    """Append k broadcast axes so a value array lines up with derivative axes."""
    return np.asarray(scal)[(...,) + (None,) * k]


def _sym_gh(g, h):
    """Symmetrized g_i h_jk + g_j h_ik + g_k h_ij."""
    return (
        g[..., :, None, None] * h[..., None, :, :]
        + g[..., None, :, None] * h[..., :, None, :]
        + g[..., None, None, :] * h[..., :, :, None]
    )


def seed(points, order=3):
    """Coordinate jets at a batch of points; points shape (..., n)."""
    points = np.asarray(points, dtype=float)
    n = points.shape[-1]
    base = points.shape[:-1]
    out = []
    for i in range(n):
        g = np.zeros(base + (n,))
        g[..., i] = 1.0
        j = Jet(points[..., i], g,
                np.zeros(base + (n, n)) if order >= 2 else None,
                np.zeros(base + (n, n, n)) if order >= 3 else None,
                order=order, dim=n)
        out.append(j)
    return out


def constant(value, dim, order=3, shape=()):
    """A jet with the given value and vanishing derivatives."""
    value = np.asarray(value)
    base = np.broadcast_shapes(value.shape, shape)
    val = np.broadcast_to(value, base).copy()
    dt = val.dtype if val.dtype.kind == "c" else float
    g = np.zeros(base + (dim,), dtype=dt) if order >= 1 else None
    h = np.zeros(base + (dim, dim), dtype=dt) if order >= 2 else None
    t = np.zeros(base + (dim, dim, dim), dtype=dt) if order >= 3 else None
    return Jet(val, g, h, t, order=order, dim=dim)


def extract(jet, alpha):
    """Plain partial derivative for the multi-index alpha (tuple, len n)."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != jet.dim and jet.dim > 0:
        raise OrderError("multi-index length %d does not match dim %d" % (len(alpha), jet.dim))
    if any(a < 0 for a in alpha):
        raise OrderError("negative entry in multi-index")
    k = sum(alpha)
    if k > jet.order:
        raise OrderError("order %d partial requested from an order-%d jet" % (k, jet.order))
    idx = []
    for i, a in enumerate(alpha):
        idx.extend([i] * a)
    if k == 0:
        return jet.val
    if k == 1:
        return jet.grad[..., idx[0]]
    if k == 2:
        return jet.hess[..., idx[0], idx[1]]
    return jet.third[..., idx[0], idx[1], idx[2]]


# -- jet-valued matrices (object arrays) -------------------------------------


def jmat_values(A):
    """Stack the value arrays of a jet matrix into (..., n, m)."""
    n, m = A.shape
    vals = [[np.asarray(A[i, j].val) for j in range(m)] for i in range(n)]
    base = np.broadcast_shapes(*[v.shape for row in vals for v in row])
    dt = complex if any(v.dtype.kind == "c" for row in vals for v in row) else float
    out = np.empty(base + (n, m), dtype=dt)
    for i in range(n):
        for j in range(m):
            out[..., i, j] = vals[i][j]
    return out


def jmat_mul(A, B):
    n, m = A.shape
    m2, k = B.shape
    out = np.empty((n, k), dtype=object)
    for i in range(n):
        for j in range(k):
            s = A[i, 0] * B[0, j]
            for l in range(1, m):
                s = s + A[i, l] * B[l, j]
            out[i, j] = s
    return out


def jmat_vec(A, v):
    n, m = A.shape
    out = np.empty(n, dtype=object)
    for i in range(n):
        s = A[i, 0] * v[0]
        for l in range(1, m):
            s = s + A[i, l] * v[l]
        out[i] = s
    return out


def jmat_inv(A):
    """Inverse of a jet matrix via a Neumann series around the pointwise value.

    With A = A0 + N (A0 the plain value, N vanishing at the points), the
    inverse through third order is sum_k (-A0^-1 N)^k A0^-1, k <= 3.
    """
    n = A.shape[0]
    order = min(A[i, j].order for i in range(n) for j in range(n))
    dim = max(A[i, j].dim for i in range(n) for j in range(n))
    vals = [[np.asarray(A[i, j].val) for j in range(n)] for i in range(n)]
    base = np.broadcast_shapes(*[v.shape for row in vals for v in row])
    dt = complex if any(v.dtype.kind == "c" for row in vals for v in row) else float
    val = np.empty(base + (n, n), dtype=dt)
    for i in range(n):
        for j in range(n):
            val[..., i, j] = vals[i][j]
    try:
        inv0 = np.linalg.inv(val)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError(str(exc)) from None
    if not np.all(np.isfinite(inv0)):
        raise SingularMetricError("metric value matrix is singular")
    A0i = np.empty((n, n), dtype=object)
    N = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            A0i[i, j] = constant(inv0[..., i, j], dim, order=order)
            a = A[i, j]
            N[i, j] = Jet(np.zeros_like(a.val), a.grad, a.hess, a.third,
                          order=a.order, dim=a.dim)
    M = jmat_mul(A0i, N)   # A0^-1 N, vanishing value: series terminates exactly
    out = A0i.copy()
    term = A0i
    sign = -1
    for _ in range(min(order, 3)):
        term = jmat_mul(M, term)
        for i in range(n):
            for j in range(n):
                if sign > 0:
                    out[i, j] = out[i, j] + term[i, j]
                else:
                    out[i, j] = out[i, j] - term[i, j]
        sign = -sign
    return out


# -- finite differences (oracle support) --------------------------------------


def central_diff(f, x, alpha, h):
    """Central finite difference of a scalar callable for multi-index alpha.

    f maps an (..., n) point array to values; nested first differences with
    step h are applied once per derivative.
    """
    x = np.asarray(x, dtype=float)
    idx = []
    for i, a in enumerate(alpha):
        idx.extend([i] * int(a))
    if not idx:
        return f(x)
    i, rest = idx[0], idx[1:]
    rest_alpha = [0] * len(alpha)
    for j in rest:
        rest_alpha[j] += 1
    xp = x.copy()
    xm = x.copy()
    xp[..., i] += h
    xm[..., i] -= h
    return (central_diff(f, xp, rest_alpha, h) - central_diff(f, xm, rest_alpha, h)) / (2 * h)
