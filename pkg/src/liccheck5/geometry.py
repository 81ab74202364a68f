"""Regions, radial functions, invariant forms and the metric family on R^5.

Coordinates are (x0, x1, x2, x3, x4) with r = |(x1..x4)|.  The closed solid
cone L is {r <= |x0|}, its boundary L_o = {r = |x0|}; the exterior shell
B_a = {0 < r_o < 1/a} uses the odd radial coordinate r_o = (r^2 - x0^2)/r,
extended by zero on L.  The metric family:

    g0       flat diag(-1,1,1,1,1)
    ga       g0 - r^2 (a r_o)^4 sigma3^2 + a^4 (r beta)^-2 r_o^2 alpha^2
             on the exterior side, g0 on L
    gatilde  (r^2 - x0^2)^-2 ga
    ha       4d: dr^2/(1-(ar)^4) + r^2(sigma1^2+sigma2^2+(1-(ar)^4) sigma3^2)
    eh       4d: dR^2/(1-(a/R)^4) + R^2(sigma1^2+sigma2^2+(1-(a/R)^4) sigma3^2)

with beta = sqrt(1 - (a r_o)^4) and alpha = (r^2+x0^2) dr - 2 x0 r dx0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets as J
from .errors import AmbiguousError, DimensionError, DomainError, SingularError

ETA = np.diag([-1.0, 1.0, 1.0, 1.0, 1.0])

REGION_TAGS = ("L_interior", "L_boundary", "B_a", "OutsideClosure", "AxisRzero")

_FAMILIES = ("g0", "ga", "gatilde", "ha", "eh")
_ALIASES = {
    "minkowski_g0": "g0",
    "ga": "ga",
    "gatilde": "gatilde",
    "ha": "ha",
    "eguchihanson": "eh",
}


@dataclass(frozen=True)
class Region:
    tag: str
    on_axis_r0: bool = False
    at_origin: bool = False


@dataclass(frozen=True)
class MetricSpec:
    family: str
    a: float = 1.0

    def __post_init__(self):
        fam = self.family.lower()
        fam = _ALIASES.get(fam, fam)
        if fam not in _FAMILIES:
            raise ValueError("unknown metric family %r" % (self.family,))
        object.__setattr__(self, "family", fam)
        if fam != "g0" and not self.a > 0:
            raise ValueError("family %r needs a > 0" % fam)

    @property
    def dim(self):
        return 4 if self.family in ("ha", "eh") else 5


def classify(p, a):
    """Region of a single point p = (x0, x1, x2, x3, x4)."""
    p = np.asarray(p, dtype=float)
    if p.shape != (5,):
        raise DimensionError("classify expects a single 5d point")
    x0 = p[0]
    r = float(np.sqrt(np.sum(p[1:] ** 2)))
    on_axis = r == 0.0
    origin = on_axis and x0 == 0.0
    if r < abs(x0):
        return Region("L_interior", on_axis_r0=on_axis)
    if r == abs(x0):
        return Region("L_boundary", on_axis_r0=on_axis, at_origin=origin)
    ro = (r * r - x0 * x0) / r
    if ro < 1.0 / a:
        return Region("B_a")
    return Region("OutsideClosure")


def _vals(xj):
    return [np.asarray(j.val) for j in xj]


def radial_r(xj):
    """r = |spatial part| as a jet; xj is the list of 5 coordinate jets."""
    r2 = xj[1] * xj[1] + xj[2] * xj[2] + xj[3] * xj[3] + xj[4] * xj[4]
    return r2.sqrt()


def _branch(xj):
    """+1 exterior (r > |x0|), -1 inside L, raises on the cone itself."""
    v = _vals(xj)
    r = np.sqrt(v[1] ** 2 + v[2] ** 2 + v[3] ** 2 + v[4] ** 2)
    d = r - np.abs(v[0])
    if np.any(d == 0.0):
        raise AmbiguousError("point(s) on the cone boundary r = |x0|")
    if np.all(d > 0):
        return 1
    if np.all(d < 0):
        return -1
    raise AmbiguousError("batch mixes the two sides of the cone")


def radial_ro(xj):
    """Odd radial coordinate r_o as a jet: (r^2-x0^2)/r off L, 0 on L."""
    if _branch(xj) < 0:
        return J.constant(0.0, dim=xj[0].dim, order=xj[0].order,
                          shape=np.shape(xj[0].val))
    r = radial_r(xj)
    d = r * r - xj[0] * xj[0]
    return d / r


def sigma_forms(spatial):
    """The three invariant coframes as covector component jets.

    ``spatial`` is the list of 4 jets for (x1, x2, x3, x4); components refer to
    the same four slots.  sigma_i = (1/r^2) * (linear coefficients).
    """
    s1, s2, s3, s4 = spatial
    ir2 = (s1 * s1 + s2 * s2 + s3 * s3 + s4 * s4).reciprocal()
    sig1 = [(-1.0) * s2 * ir2, s1 * ir2, (-1.0) * s4 * ir2, s3 * ir2]
    sig2 = [(-1.0) * s3 * ir2, s4 * ir2, s1 * ir2, (-1.0) * s2 * ir2]
    sig3 = [(-1.0) * s4 * ir2, (-1.0) * s3 * ir2, s2 * ir2, s1 * ir2]
    return sig1, sig2, sig3


def sigma_dual_vectors(spatial):
    """Vector fields dual to the sigma coframe (tangent to the 3-spheres)."""
    s1, s2, s3, s4 = spatial
    k1 = [(-1.0) * s2, s1, (-1.0) * s4, s3]
    k2 = [(-1.0) * s3, s4, s1, (-1.0) * s2]
    k3 = [(-1.0) * s4, (-1.0) * s3, s2, s1]
    return k1, k2, k3


def alpha_form(xj):
    """alpha = (r^2+x0^2) dr - 2 x0 r dx0 as a 5-slot covector of jets."""
    r = radial_r(xj)
    ir = r.reciprocal()
    w = (r * r + xj[0] * xj[0]) * ir
    a0 = (-2.0) * xj[0] * r
    return [a0, w * xj[1], w * xj[2], w * xj[3], w * xj[4]]


def beta_jet(xj, a):
    """beta = sqrt(1 - (a r_o)^4); equals 1 identically on L."""
    ro = radial_ro(xj)
    u = (float(a) ** 4) * ro.pow_int(4)
    return ((-1.0) * u + 1.0).sqrt()


def _eta_jets(dim, order, shape, values=None):
    g = np.empty((dim, dim), dtype=object)
    vals = values if values is not None else (ETA if dim == 5 else np.eye(4))
    for i in range(dim):
        for j in range(dim):
            g[i, j] = J.constant(vals[i, j], dim=dim, order=order, shape=shape)
    return g


def _sigma3_block(spatial, coeff, offset, g):
    """g[offset+i, offset+j] += coeff * sigma3_i sigma3_j."""
    _, _, sig3 = sigma_forms(spatial)
    for i in range(4):
        for j in range(i, 4):
            term = coeff * sig3[i] * sig3[j]
            g[offset + i, offset + j] = g[offset + i, offset + j] + term
            if i != j:
                g[offset + j, offset + i] = g[offset + j, offset + i] + term
    return g


def metric_jets(spec: MetricSpec, x, order=3):
    """Metric components as a (dim x dim) object array of jets.

    For family 'ga'/'gatilde' the batch must lie entirely on one side of the
    cone (AmbiguousError otherwise); the L side returns the exact flat branch.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != spec.dim:
        raise DimensionError("family %r needs %dd points, got %dd"
                             % (spec.family, spec.dim, x.shape[-1]))
    xj = J.seed(x, order=order)
    shape = x.shape[:-1]

    if spec.family == "g0":
        return _eta_jets(5, order, shape)

    if spec.family in ("ga", "gatilde"):
        g = _metric_ga(spec, xj, order, shape)
        if spec.family == "gatilde":
            d = radial_r(xj)
            d = d * d - xj[0] * xj[0]
            conf = (d * d).reciprocal()
            for i in range(5):
                for j in range(5):
                    g[i, j] = g[i, j] * conf
        return g

    # 4d families
    n = x.shape[-1]
    rad2 = xj[0] * xj[0] + xj[1] * xj[1] + xj[2] * xj[2] + xj[3] * xj[3]
    rv = np.sqrt(np.sum(x * x, axis=-1))
    a = spec.a
    if spec.family == "ha":
        if np.any(a * rv >= 1.0):
            raise DomainError("ha needs r < 1/a")
        u = (a ** 4) * rad2.pow_int(2)
    else:
        if np.any(rv <= a):
            raise DomainError("eh needs R > a")
        u = (a ** 4) * rad2.pow_int(-2)
    g = _eta_jets(4, order, shape)
    irad2 = rad2.reciprocal()
    w = u * ((-1.0) * u + 1.0).reciprocal() * irad2
    for i in range(4):
        for j in range(i, 4):
            term = w * xj[i] * xj[j]
            g[i, j] = g[i, j] + term
            if i != j:
                g[j, i] = g[j, i] + term
    return _sigma3_block(xj, (-1.0) * u * rad2, 0, g)


def _metric_ga(spec, xj, order, shape):
    if _branch(xj) < 0:
        return _eta_jets(5, order, shape)
    a = spec.a
    r2 = xj[1] * xj[1] + xj[2] * xj[2] + xj[3] * xj[3] + xj[4] * xj[4]
    r = r2.sqrt()
    ro = (r2 - xj[0] * xj[0]) / r
    ro2 = ro * ro
    u = (a ** 4) * ro2 * ro2          # (a r_o)^4
    bsq = (-1.0) * u + 1.0            # beta^2; DomainError outside the shell
    if np.any(bsq.val <= 0.0):
        raise DomainError("point(s) outside the closure of B_a (r_o >= 1/a)")
    g = _eta_jets(5, order, shape)
    g = _sigma3_block(xj[1:], (-1.0) * u * r2, 1, g)
    alpha = alpha_form(xj)
    c = (a ** 4) * ro2 * (r2 * bsq).reciprocal()
    for i in range(5):
        for j in range(i, 5):
            term = c * alpha[i] * alpha[j]
            g[i, j] = g[i, j] + term
            if i != j:
                g[j, i] = g[j, i] + term
    return g


def decompose_ga(x, a, order=3):
    """ga = g0 - omega + rho as three (5,5) jet matrices (exterior side)."""
    x = np.asarray(x, dtype=float)
    xj = J.seed(x, order=order)
    shape = x.shape[:-1]
    g0 = _eta_jets(5, order, shape)
    zero = lambda: J.constant(0.0, dim=5, order=order, shape=shape)
    omega = np.empty((5, 5), dtype=object)
    rho = np.empty((5, 5), dtype=object)
    for i in range(5):
        for j in range(5):
            omega[i, j] = zero()
            rho[i, j] = zero()
    if _branch(xj) < 0:
        return g0, omega, rho
    r2 = xj[1] * xj[1] + xj[2] * xj[2] + xj[3] * xj[3] + xj[4] * xj[4]
    r = r2.sqrt()
    ro = (r2 - xj[0] * xj[0]) / r
    ro2 = ro * ro
    u = (a ** 4) * ro2 * ro2
    bsq = (-1.0) * u + 1.0
    if np.any(bsq.val <= 0.0):
        raise DomainError("point(s) outside the closure of B_a")
    _sigma3_block(xj[1:], u * r2, 1, omega)
    alpha = alpha_form(xj)
    c = (a ** 4) * ro2 * (r2 * bsq).reciprocal()
    for i in range(5):
        for j in range(i, 5):
            term = c * alpha[i] * alpha[j]
            rho[i, j] = rho[i, j] + term
            if i != j:
                rho[j, i] = term + rho[j, i]
    return g0, omega, rho


# ---------------------------------------------------------------- psi map

def _dfield(xj):
    return xj[1] * xj[1] + xj[2] * xj[2] + xj[3] * xj[3] + xj[4] * xj[4] - xj[0] * xj[0]


def psi_map(x):
    """Psi(x) = (-x0, x1..x4)/(r^2 - x0^2); involutive chart swap."""
    x = np.asarray(x, dtype=float)
    d = np.sum(x[..., 1:] ** 2, axis=-1) - x[..., 0] ** 2
    if np.any(d == 0.0):
        raise SingularError("psi is singular on the cone r = |x0|")
    out = x / d[..., None]
    out[..., 0] = -out[..., 0]
    return out


def psi_jets(x, order=3):
    """Component jets of the psi map."""
    x = np.asarray(x, dtype=float)
    xj = J.seed(x, order=order)
    d = _dfield(xj)
    if np.any(d.val == 0.0):
        raise SingularError("psi is singular on the cone r = |x0|")
    idet = d.reciprocal()
    comps = [(-1.0) * xj[0] * idet]
    comps += [xj[i] * idet for i in range(1, 5)]
    return comps


def psi_pushforward(x):
    """Jacobian of psi as a (..., 5, 5) array, J[i, j] = d psi_i / d x_j."""
    comps = psi_jets(x, order=1)
    return np.stack([c.grad for c in comps], axis=-2)


# ------------------------------------------------------------ scalar helpers

def s_R_values(x):
    """The chart pair (s, R) = (-x0/(r^2-x0^2), r/(r^2-x0^2)) as plain arrays."""
    x = np.asarray(x, dtype=float)
    r = np.sqrt(np.sum(x[..., 1:] ** 2, axis=-1))
    d = r * r - x[..., 0] ** 2
    if np.any(d == 0.0):
        raise SingularError("chart singular on the cone")
    return -x[..., 0] / d, r / d


def mu_jet(xj):
    """mu = ln|r^2 - x0^2| as a jet (single-signed batch)."""
    d = _dfield(xj)
    if np.all(d.val > 0):
        return d.ln()
    if np.all(d.val < 0):
        return ((-1.0) * d).ln()
    raise AmbiguousError("mu undefined / mixed sign across the cone")
