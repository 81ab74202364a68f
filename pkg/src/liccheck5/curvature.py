"""Curvature stack for the metric family: Christoffel symbols, Riemann,
Ricci, scalar and Weyl curvature, frame connection/curvature forms, the 4d
(anti-)self-dual split, Lie derivatives, Hessians, and the conformal identity
linking the deformed metric to its Ricci-flat rescaling.

Conventions, fixed once and used everywhere:

    R(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]
    riemann[l, k, i, j]  =  component along d_l of R(d_i, d_j) d_k
    ricci[k, j]          =  sum_i riemann[i, k, i, j]
    lowered[i, j, k, l]  =  sum_m g[l, m] riemann[m, k, i, j]

The first/third Ricci contraction makes round spheres come out positive
(Ric = 3 g for the unit 4-sphere, see the stereographic test).  In the
lowered slot layout above the trace removal reads weyl = lowered + P * g
(Kulkarni-Nomizu product of the Schouten tensor with the metric).

Everything is computed per batch from a single jet evaluation of the metric
at the requested points; there is no global state, so point batches can be
mapped in parallel and results merged in any order.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import geometry as geo
from . import jets as J
from .errors import (DimensionError, DomainError, FrameMismatchError,
                     NonTransversalError, OrderError, SingularError)

# ------------------------------------------------------------------ types


@dataclass
class CurvatureBundle:
    spec: geo.MetricSpec
    christoffel: np.ndarray      # (n, n, n) object jets, [k, i, j]
    riemann: np.ndarray          # (n, n, n, n) object jets, [l, k, i, j]
    ricci: np.ndarray            # (..., n, n) values
    scalar: np.ndarray           # (...) values
    weyl: np.ndarray             # (..., n, n, n, n) values, indices lowered


@dataclass
class ConnectionForms:
    frame_id: str
    eps: np.ndarray              # frame signature, diag of the Gram matrix
    omega: np.ndarray            # (n, n, n) object jets, [i, j, mu]:
                                 # coordinate components of omega_ij (lowered)
    omega_frame: np.ndarray      # (..., n, n, n) values, [i,j,k] = omega_ij(f_k)
    curvature_frame: np.ndarray  # (..., n, n, n, n) values,
                                 # [i,j,k,l] = Omega_ij(f_k, f_l)


@dataclass
class ASDBasis:
    lminus: np.ndarray           # (3, 4, 4) frame components of the basis


def asd_basis():
    """Basis of the anti-self-dual 2-forms in an oriented orthonormal 4-frame."""
    lam = np.zeros((3, 4, 4))
    for n, (i, j, k, l) in enumerate(((0, 1, 2, 3), (0, 2, 3, 1), (0, 3, 1, 2))):
        lam[n, i, j], lam[n, j, i] = 1.0, -1.0
        lam[n, k, l], lam[n, l, k] = -1.0, 1.0
    return ASDBasis(lminus=lam)


# ------------------------------------------------------------- raw pieces


def _tensor_values(T):
    """Object array of jets -> plain ndarray with the tensor axes trailing."""
    flat = T.reshape(-1)
    base = np.broadcast_shapes(*[np.shape(j.val) for j in flat])
    dt = complex if any(np.asarray(j.val).dtype.kind == "c" for j in flat) else float
    out = np.empty(base + T.shape, dtype=dt)
    for idx in np.ndindex(T.shape):
        out[(Ellipsis,) + idx] = np.broadcast_to(T[idx].val, base)
    return out


def _trunc(j, order):
    if j.order <= order:
        return j
    return J.Jet(j.val, j.grad if order >= 1 else None,
                 j.hess if order >= 2 else None,
                 j.third if order >= 3 else None, order=order, dim=j.dim)


def christoffel_from_jets(g):
    """Levi-Civita symbols as jets, [k, i, j] = Gamma^k_ij, from metric jets."""
    n = g.shape[0]
    ginv = J.jmat_inv(g)
    dg = np.empty((n, n, n), dtype=object)      # dg[l, i, j] = d_l g_ij
    for i in range(n):
        for j in range(n):
            for l in range(n):
                dg[l, i, j] = g[i, j].partial(l)
    gam = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                s = None
                for l in range(n):
                    term = ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                    s = term if s is None else s + term
                s = 0.5 * s
                gam[k, i, j] = s
                if i != j:
                    gam[k, j, i] = s
    return gam


def riemann_from_christoffel(gam, order=1):
    """R^l_kij jets from Christoffel jets (one derivative is spent)."""
    n = gam.shape[0]
    g1 = np.empty_like(gam)
    for idx in np.ndindex(gam.shape):
        g1[idx] = _trunc(gam[idx], order)
    sample = gam[0, 0, 0]
    zero = J.constant(np.zeros(np.shape(sample.val)), dim=sample.dim, order=order)
    R = np.empty((n, n, n, n), dtype=object)
    for i in range(n):
        for l in range(n):
            for k in range(n):
                R[l, k, i, i] = zero
        for j in range(i + 1, n):
            for l in range(n):
                for k in range(n):
                    t = gam[l, j, k].partial(i) - gam[l, i, k].partial(j)
                    for m in range(n):
                        t = t + g1[l, i, m] * g1[m, j, k] - g1[l, j, m] * g1[m, i, k]
                    R[l, k, i, j] = t
                    R[l, k, j, i] = -t
    return R


def _curvature_pieces(g, order=0):
    """Everything derivable from one metric jet matrix, values where possible."""
    n = g.shape[0]
    gam = christoffel_from_jets(g)
    R = riemann_from_christoffel(gam, order=order)
    gv = _tensor_values(g).real
    V = _tensor_values(R)
    ginv = np.linalg.inv(gv)
    ric = np.einsum('...ikij->...kj', V)
    sc = np.einsum('...kj,...kj->...', ginv, ric)
    low = np.einsum('...lm,...mkij->...ijkl', gv, V)
    P = (ric - sc[..., None, None] * gv / (2.0 * (n - 1))) / (n - 2)
    kn = (np.einsum('...ik,...jl->...ijkl', P, gv)
          + np.einsum('...jl,...ik->...ijkl', P, gv)
          - np.einsum('...il,...jk->...ijkl', P, gv)
          - np.einsum('...jk,...il->...ijkl', P, gv))
    return {"gam": gam, "R": R, "gv": gv, "ginv": ginv, "ric": ric,
            "scalar": sc, "lowered": low, "weyl": low + kn}


# ------------------------------------------------------------ public ops


def christoffel(spec, x, order=2):
    """Gamma^k_ij jets for a metric family at a point batch."""
    if not 1 <= order <= 2:
        raise OrderError("christoffel supports jet orders 1 and 2")
    g = geo.metric_jets(spec, x, order=order + 1)
    return christoffel_from_jets(g)


def riemann(spec, x, order=1):
    """R^l_kij jets; order 0 gives plain values, order 1 adds first partials."""
    if not 0 <= order <= 1:
        raise OrderError("riemann supports jet orders 0 and 1")
    g = geo.metric_jets(spec, x, order=order + 2)
    return riemann_from_christoffel(christoffel_from_jets(g), order=order)


def ricci(spec, x):
    g = geo.metric_jets(spec, x, order=2)
    return _curvature_pieces(g)["ric"]


def scalar(spec, x):
    g = geo.metric_jets(spec, x, order=2)
    return _curvature_pieces(g)["scalar"]


def riemann_lowered(spec, x):
    g = geo.metric_jets(spec, x, order=2)
    return _curvature_pieces(g)["lowered"]


def weyl(spec, x):
    """Weyl tensor values with all indices lowered, layout [i, j, k, l]."""
    g = geo.metric_jets(spec, x, order=2)
    return _curvature_pieces(g)["weyl"]


def bundle(spec, x, order=1):
    g = geo.metric_jets(spec, x, order=min(order + 2, 3))
    p = _curvature_pieces(g, order=order)
    return CurvatureBundle(spec=spec, christoffel=p["gam"], riemann=p["R"],
                           ricci=p["ric"], scalar=p["scalar"], weyl=p["weyl"])


def bianchi_residual(spec, x):
    """(sup |cyclic sum|, sup |riemann|) for the first Bianchi identity."""
    V = _tensor_values(riemann(spec, x, order=0))
    cyc = V + np.einsum('...lijk->...lkij', V) + np.einsum('...ljki->...lkij', V)
    return float(np.max(np.abs(cyc))), float(np.max(np.abs(V)))


# -------------------------------------------------------- connection forms


def connection_forms(frame, spec, x, tol=1e-8):
    """Frame connection forms omega_ij = g(nabla f_i, f_j) and the curvature
    2-forms Omega_ij(X, Y) = g(R(X, Y) f_i, f_j), both with lowered indices."""
    n = spec.dim
    F = frame.vectors
    if F.shape != (n, n):
        raise DimensionError("frame is %s but the metric is %dd" % (F.shape, n))
    g = geo.metric_jets(spec, x, order=3)
    return forms_from_jets(frame.id, F, g, label=spec.family, tol=tol)


def forms_from_jets(frame_id, F, g, label="custom", tol=1e-8):
    """connection_forms for an explicit (frame jets, metric jets) pair."""
    n = F.shape[0]
    Fv = _tensor_values(F).real
    gv = _tensor_values(g).real
    gram = np.einsum('...mn,...mi,...nj->...ij', gv, Fv, Fv)
    eps = np.sign(np.mean(gram.reshape(-1, n, n), axis=0).diagonal())
    target = np.zeros((n, n))
    np.fill_diagonal(target, eps)
    if np.max(np.abs(gram - target)) > tol:
        raise FrameMismatchError("frame fails the Gram check for %s" % (label,))
    gam = christoffel_from_jets(g)
    omega = np.empty((n, n, n), dtype=object)
    for i in range(n):
        low = np.empty((n, n), dtype=object)    # low[m, mu] = g(nabla_mu f_i, d_m)
        for m in range(n):
            for mu in range(n):
                s = None
                for l in range(n):
                    cov = F[l, i].partial(mu)
                    for nu in range(n):
                        cov = cov + gam[l, mu, nu] * F[nu, i]
                    term = g[l, m] * cov
                    s = term if s is None else s + term
                low[m, mu] = s
        for j in range(n):
            for mu in range(n):
                s = None
                for m in range(n):
                    term = low[m, mu] * F[m, j]
                    s = term if s is None else s + term
                omega[i, j, mu] = s
    ov = _tensor_values(omega).real
    omega_frame = np.einsum('...ijm,...mk->...ijk', ov, Fv)
    pieces = _curvature_pieces(g)
    curv = np.einsum('...abcd,...ak,...bl,...ci,...dj->...ijkl',
                     pieces["lowered"], Fv, Fv, Fv, Fv)
    return ConnectionForms(frame_id=frame_id, eps=eps, omega=omega,
                           omega_frame=omega_frame, curvature_frame=curv)


def structure_residuals(forms, frame, spec, x):
    """Sup residuals of the two structure equations on frame pairs.

    First:  d f^i = sum_k omega^i_k wedge f^k, checked in lowered form
    d theta_i = sum_k eps_k omega_ik wedge theta_k.  Second:  Omega_ij =
    d omega_ij - sum_k eps_k omega_ik wedge omega_kj.
    """
    n = spec.dim
    g = geo.metric_jets(spec, x, order=2)
    F = frame.vectors
    Fv = _tensor_values(F).real
    eps = forms.eps
    theta = np.empty((n, n), dtype=object)      # theta[i, mu]: lowered coframe
    for i in range(n):
        for mu in range(n):
            s = None
            for nu in range(n):
                term = g[mu, nu] * F[nu, i]
                s = term if s is None else s + term
            theta[i, mu] = s
    tv = _tensor_values(theta).real
    base = tv.shape[:-2]
    dth = np.empty(base + (n, n, n))
    dom = np.empty(base + (n, n, n, n))
    for i in range(n):
        for mu in range(n):
            for nu in range(n):
                dth[..., i, mu, nu] = (theta[i, nu].grad[..., mu]
                                       - theta[i, mu].grad[..., nu])
                for j in range(n):
                    dom[..., i, j, mu, nu] = (forms.omega[i, j, nu].grad[..., mu]
                                              - forms.omega[i, j, mu].grad[..., nu])
    ov = _tensor_values(forms.omega).real
    wedge1 = (np.einsum('k,...ikm,...kn->...imn', eps, ov, tv)
              - np.einsum('k,...ikn,...km->...imn', eps, ov, tv))
    res1 = np.einsum('...imn,...ma,...nb->...iab', dth - wedge1, Fv, Fv)
    wedge2 = (np.einsum('k,...ikm,...kjn->...ijmn', eps, ov, ov)
              - np.einsum('k,...ikn,...kjm->...ijmn', eps, ov, ov))
    rhs2 = np.einsum('...ijmn,...ma,...nb->...ijab', dom - wedge2, Fv, Fv)
    res2 = forms.curvature_frame - rhs2
    return float(np.max(np.abs(res1))), float(np.max(np.abs(res2)))


# ------------------------------------------------------------- ASD split

_LEVI4 = np.zeros((4, 4, 4, 4))
for _p in permutations(range(4)):
    _s = 1.0
    _l = list(_p)
    for _i in range(4):
        for _j in range(_i + 1, 4):
            if _l[_i] > _l[_j]:
                _s = -_s
    _LEVI4[_p] = _s
_LEVI4.setflags(write=False)


def asd_project(two_forms, orientation=1.0):
    """Split frame-component 2-forms (..., i, j, k, l) into (SD, ASD) parts.

    The Hodge star acts on the argument slots (k, l) of an orthonormal
    4-frame; ``orientation`` (+-1, broadcastable) says whether the frame
    order agrees with the reference orientation."""
    two_forms = np.asarray(two_forms)
    if two_forms.shape[-1] != 4:
        raise DimensionError("self-dual split needs 4d frame components")
    star = 0.5 * np.einsum('klmn,...ijmn->...ijkl', _LEVI4, two_forms)
    star = star * np.asarray(orientation)[..., None, None, None, None]
    return 0.5 * (two_forms + star), 0.5 * (two_forms - star)


def asd_split(frame, spec, x, tol=1e-8):
    """(W+, W-) parts of the Weyl curvature 2-forms in an orthonormal 4-frame.

    Duality is taken against the standard coordinate orientation, so frames
    listed in an order of negative determinant get the sign-corrected star."""
    if spec.dim != 4:
        raise DimensionError("self-dual split is a 4d operation")
    n = 4
    g = geo.metric_jets(spec, x, order=2)
    Fv = _tensor_values(frame.vectors).real
    gv = _tensor_values(g).real
    gram = np.einsum('...mn,...mi,...nj->...ij', gv, Fv, Fv)
    if np.max(np.abs(gram - np.eye(n))) > tol:
        raise FrameMismatchError("frame fails the Gram check for %s"
                                 % (spec.family,))
    W = _curvature_pieces(g)["weyl"]
    Wf = np.einsum('...abcd,...ak,...bl,...ci,...dj->...ijkl', W, Fv, Fv, Fv, Fv)
    return asd_project(Wf, orientation=np.sign(np.linalg.det(Fv)))


# ------------------------------------------------- vector fields and Lie


def vector_field_jets(field, x, order=2):
    """Component jets of a named vector field ("V", "T") or a custom one.

    A custom field is a callable mapping the point array to a length-n
    object array of jets (or such an array directly)."""
    if not isinstance(field, str):
        if callable(field):
            field = field(x)
        return np.asarray(field, dtype=object)
    xj = J.seed(np.asarray(x, dtype=float), order=order)
    x0 = xj[0]
    r2 = xj[1] * xj[1] + xj[2] * xj[2] + xj[3] * xj[3] + xj[4] * xj[4]
    w = r2 + x0 * x0
    if field == "V":
        comps = [(-1.0) * w] + [(-2.0) * x0 * xj[m] for m in range(1, 5)]
    elif field == "T":
        if np.any(np.asarray(r2.val) == 0.0):
            raise DomainError("the radial field is singular on the axis r = 0")
        wr = w * r2.sqrt().reciprocal()
        comps = [(-2.0) * x0 * r2.sqrt()] + [(-1.0) * wr * xj[m] for m in range(1, 5)]
    else:
        raise ValueError("unknown vector field tag %r" % (field,))
    out = np.empty(5, dtype=object)
    out[:] = comps
    return out


def lie_derivative_metric(field, spec, x):
    """(L_X g)_ij values: X^k d_k g_ij + g_kj d_i X^k + g_ik d_j X^k."""
    n = spec.dim
    g = geo.metric_jets(spec, x, order=1)
    X = vector_field_jets(field, x, order=1)
    if X.shape != (n,):
        raise DimensionError("field has %s components, metric is %dd"
                             % (X.shape, n))
    gv = _tensor_values(g).real
    base = gv.shape[:-2]
    dg = np.empty(base + (n, n, n))
    for i in range(n):
        for j in range(n):
            dg[..., i, j, :] = np.broadcast_to(g[i, j].grad, base + (n,))
    Xv = _tensor_values(X).real
    dX = np.empty(base + (n, n))
    for k in range(n):
        dX[..., k, :] = np.broadcast_to(X[k].grad, base + (n,))
    return (np.einsum('...k,...ijk->...ij', Xv, dg)
            + np.einsum('...kj,...ki->...ij', gv, dX)
            + np.einsum('...ik,...kj->...ij', gv, dX))


def divergence(field, spec, x):
    """div X = d_i X^i + Gamma^i_im X^m under the given metric, values."""
    n = spec.dim
    gam = christoffel(spec, x, order=1)
    gv = _tensor_values(gam)
    X = vector_field_jets(field, x, order=1)
    Xv = _tensor_values(X).real
    base = np.broadcast_shapes(gv.shape[:-3], Xv.shape[:-1])
    dX = np.zeros(base)
    for i in range(n):
        dX = dX + np.broadcast_to(X[i].grad[..., i], base)
    return dX + np.einsum('...iim,...m->...', gv, Xv)


# --------------------------------------------------- scalars and traces


def hessian_scalar(u, spec, x, gam=None):
    """Covariant Hessian values of a scalar jet: d_i d_j u - Gamma^k_ij d_k u."""
    if u.order < 2:
        raise OrderError("hessian needs a scalar jet of order >= 2")
    if gam is None:
        gam = christoffel(spec, x, order=1)
    gv = _tensor_values(gam)
    return u.hess - np.einsum('...kij,...k->...ij', gv, u.grad)


def laplacian_scalar(u, spec, x):
    H = hessian_scalar(u, spec, x)
    gv = _tensor_values(geo.metric_jets(spec, x, order=0)).real
    return np.einsum('...ij,...ij->...', np.linalg.inv(gv), H)


def trace_free(T, spec, x):
    """Remove the metric trace: T - (tr_g T / n) g, for (..., n, n) values."""
    n = spec.dim
    T = np.asarray(T)
    gv = _tensor_values(geo.metric_jets(spec, x, order=0)).real
    tr = np.einsum('...ij,...ij->...', np.linalg.inv(gv), T)
    return T - tr[..., None, None] * gv / float(n)


# --------------------------------------------------- conformal identities


def conformal_ricci_check(x, a=1.0, flat_variant=False):
    """Residual of the conformal Ricci identity at a single-side point batch.

    The deformed metric is exp(2 mu) times its Ricci-flat rescaling with
    mu = ln|r^2 - x0^2|, so its Ricci tensor must equal
    -3 (Hess(mu) - dmu dmu) - (Lap(mu) + 3 |dmu|^2) gtilde, every piece on
    the right taken with respect to the rescaled metric.  With
    ``flat_variant`` the same identity is run for exp(2 mu) * eta against a
    flat background instead (independent sanity case)."""
    x = np.asarray(x, dtype=float)
    xj = J.seed(x, order=3)
    d = xj[1] * xj[1] + xj[2] * xj[2] + xj[3] * xj[3] + xj[4] * xj[4] - xj[0] * xj[0]
    if np.any(d.val == 0.0):
        raise SingularError("identity breaks down on the cone r = |x0|")
    mu = geo.mu_jet(xj)
    shape = x.shape[:-1]
    if flat_variant:
        ghat = np.empty((5, 5), dtype=object)
        zero = J.constant(np.zeros(shape), dim=5, order=3)
        d2 = d * d
        for i in range(5):
            for j in range(5):
                ghat[i, j] = zero
            ghat[i, i] = d2 if i else (-1.0) * d2
        lhs = _curvature_pieces(ghat)["ric"]
        gt = np.empty((5, 5), dtype=object)
        for i in range(5):
            for j in range(5):
                gt[i, j] = zero
            gt[i, i] = J.constant(np.full(shape, geo.ETA[i, i]), dim=5, order=3)
    else:
        lhs = ricci(geo.MetricSpec("ga", a), x)
        gt = geo.metric_jets(geo.MetricSpec("gatilde", a), x, order=3)
    gam = christoffel_from_jets(gt)
    gv = _tensor_values(gam)
    H = mu.hess - np.einsum('...kij,...k->...ij', gv, mu.grad)
    gtv = _tensor_values(gt).real
    gti = np.linalg.inv(gtv)
    lap = np.einsum('...ij,...ij->...', gti, H)
    grad2 = np.einsum('...ij,...i,...j->...', gti, mu.grad, mu.grad)
    dmu2 = mu.grad[..., :, None] * mu.grad[..., None, :]
    rhs = -3.0 * (H - dmu2) - (lap + 3.0 * grad2)[..., None, None] * gtv
    return lhs - rhs


def product_block_residual(x, a=1.0):
    """(sup, scale) of rescaled-metric curvature fed the d/ds direction.

    The unit timelike coordinate field of the product chart is contracted
    into every slot of the lowered Riemann tensor; on the exterior region
    all such components must vanish."""
    low = riemann_lowered(geo.MetricSpec("gatilde", a), x)
    Vv = _tensor_values(vector_field_jets("V", x, order=0)).real
    res = max(float(np.max(np.abs(np.einsum('...ijkl,...i->...jkl', low, Vv)))),
              float(np.max(np.abs(np.einsum('...ijkl,...k->...ijl', low, Vv)))))
    return res, float(np.max(np.abs(low)))


def weyl_extension_probe(p, a=1.0, direction=None, n_dist=10, t0=0.05,
                         ratio=0.6, fit_tol=0.15):
    """Deformed-metric Weyl size along a transversal approach to the cone.

    Returns (|W| sup per distance, fitted log-log decay exponent) over
    n_dist >= 8 geometrically spaced distances; the two smallest distances
    are dropped from the fit (finite-precision floor).  Asserts the fitted
    exponent stays above the continuous-extension threshold 2 - fit_tol.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (5,):
        raise DimensionError("probe wants a single 5d point")
    if n_dist < 8:
        raise ValueError("need at least 8 distances for the decay fit")
    r = float(np.sqrt(np.sum(p[1:] ** 2)))
    if direction is None:
        if r == 0.0:
            raise DomainError("no radial direction on the axis r = 0")
        direction = np.concatenate(([0.0], p[1:] / r))
    direction = np.asarray(direction, dtype=float)
    nrm = float(np.sqrt(np.sum(direction ** 2)))
    if nrm == 0.0:
        raise NonTransversalError("zero direction")
    direction = direction / nrm
    grad_cone = np.concatenate(([-np.sign(p[0])], p[1:] / max(r, 1e-300)))
    if abs(float(grad_cone @ direction)) < 1e-8:
        raise NonTransversalError("direction is tangent to the cone")
    t = t0 * ratio ** np.arange(n_dist)
    pts = p[None, :] + t[:, None] * direction[None, :]
    for q in pts:
        reg = geo.classify(q, a)
        if reg.tag == "L_boundary":
            raise SingularError("probe point landed on the cone")
        if reg.tag != "B_a":
            raise DomainError("probe left the exterior region (%s)" % reg.tag)
    W = weyl(geo.MetricSpec("ga", a), pts)
    wv = np.max(np.abs(W.reshape(n_dist, -1)), axis=1)
    slope = float(np.polyfit(np.log(t[:-2]), np.log(wv[:-2]), 1)[0])
    assert slope >= 2.0 - fit_tol, (
        "Weyl decay exponent %.3f below the extension threshold" % slope)
    return wv, slope
