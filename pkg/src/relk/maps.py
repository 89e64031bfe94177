"""The explicit maps on representatives: mu, nu, the splitting for a zero
homomorphism, the doubling unitary and projection path, index and exponential
boundary maps, Bott and theta, and the mapping-cone maps.
"""

from dataclasses import dataclass

import numpy as np

from . import matcore as mc
from .algmodel import (
    DEFAULT_GRID,
    FDAlgebra,
    Homomorphism,
    SampledElement,
    UnitizedElement,
    block2,
    cone_element,
    source_fiber,
)
from .errors import (
    LiftInvalid,
    NotFiniteDimensional,
    NotPartialIsometry,
    NotProjection,
    NotUnitary,
    NotZeroHom,
    ScalarClassMismatch,
)
from .triples import K0Triple, K1Triple, arraywise, normalize_k0, validate


def _fiber(alg):
    return source_fiber(alg)


def unit_over(alg, n):
    """1_n over an algebra; function algebras get their sample axes."""
    batch = tuple(alg.grid) if hasattr(alg, "grid") else ()
    return UnitizedElement.identity(_fiber(alg), n, batch)


def scalar_over(alg, lam):
    lam = np.asarray(lam, dtype=complex)
    batch = tuple(alg.grid) if hasattr(alg, "grid") else ()
    return UnitizedElement.scalar_element(_fiber(alg), np.broadcast_to(lam, batch + lam.shape))


def _target_fiber(hom):
    t = hom.target
    return getattr(t, "fiber", t)


def _stack(x, grid):
    """Repeat x along a new leading path axis."""
    return x.map_arrays(lambda a: np.broadcast_to(a, (grid,) + a.shape).copy())


def _coef(t, x):
    """Reshape a 1-d parameter array to multiply elements whose first batch axis it indexes."""
    return t.reshape((-1,) + (1,) * (len(x.batch_shape) + 1))


def _scalar_proj(alg, n, k, batch=()):
    """1_k (+) 0_{n-k} as a scalar element."""
    lam = np.diag([1.0] * k + [0.0] * (n - k)).astype(complex)
    return UnitizedElement.scalar_element(alg, np.broadcast_to(lam, batch + (n, n)))


def _unitary_defect(u):
    one = u.one()
    return max(u.H.__matmul__(u).dist(one), (u @ u.H).dist(one))


def _proj_defect(p):
    return max((p @ p).dist(p), p.H.dist(p))


def exp_2pi(x, t=1.0, tol=mc.DEFAULT_TOL):
    """exp(2 pi i t x) for self-adjoint x, arraywise (closed form on projections)."""
    return arraywise(lambda a: mc.herm_exp_2pi(a, t, tol), x)


def proj_loop(p, grid=DEFAULT_GRID):
    """s -> 1 + (e^{2 pi i s} - 1) p, sampled."""
    s = np.linspace(0.0, 1.0, grid)
    one = _stack(p.one(), grid)
    return SampledElement("interval", one + _stack(p, grid) * _coef(np.exp(2j * np.pi * s) - 1, one))


# mu and nu


def mu0(u, hom, tol=mc.DEFAULT_TOL):
    d = _unitary_defect(u)
    if d > tol.eps:
        raise NotUnitary("unitary defect %.3g" % d)
    one = unit_over(hom.source, u.level)
    return K0Triple(one, one, u, hom, "mu0")


def k0_coordinates(p):
    """[p] - [scalar part of p] in block coordinates (integers)."""
    alg = p.algebra
    if not isinstance(alg, FDAlgebra):
        raise NotFiniteDimensional("K0 coordinates need a finite-dimensional algebra")
    sc = float(np.trace(p.scalar).real)
    out = []
    for b, k in zip(p.blocks, alg.block_sizes):
        r = float(np.trace(b).real) - k * sc
        out.append(int(round(r)))
    return out


def nu0(sigma):
    hom = sigma.hom
    if not isinstance(hom.source, FDAlgebra):
        raise NotFiniteDimensional("nu0 coordinates need a finite-dimensional source")
    x, y = k0_coordinates(sigma.p), k0_coordinates(sigma.q)
    return [a - b for a, b in zip(x, y)]


def mu1(p, q, hom, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
    for name, x in (("p", p), ("q", q)):
        d = _proj_defect(x)
        if d > tol.eps:
            raise NotProjection("%s projection defect %.3g" % (name, d))
    g = proj_loop(p, grid).element @ proj_loop(q, grid).element.H
    one = unit_over(hom.source, p.level)
    return K1Triple(one, one, SampledElement("interval", g, "endpoints-equal"), hom, "mu1")


def nu1(sigma):
    return sigma.u + sigma.u.one() - sigma.p


# splitting for the zero homomorphism


def _check_zero(hom):
    if isinstance(hom, Homomorphism) and not hom.is_zero():
        raise NotZeroHom("splitting needs the zero homomorphism")
    if not isinstance(hom, Homomorphism) and hom.target.num_blocks:
        raise NotZeroHom("splitting needs the zero homomorphism")


def lambda0(p, q, hom, tol=mc.DEFAULT_TOL):
    """[p] - [q] -> (p, q, v) with v a scalar partial isometry from p-dot to q-dot."""
    _check_zero(hom)
    vp = mc.range_basis(p.scalar, tol)
    vq = mc.range_basis(q.scalar, tol)
    if vp.shape[-1] != vq.shape[-1]:
        raise ScalarClassMismatch("scalar parts have ranks %d and %d" % (vp.shape[-1], vq.shape[-1]))
    v = UnitizedElement.scalar_element(_target_fiber(hom), vq @ mc.dagger(vp))
    return K0Triple(p, q, v, hom, "lambda0")


def lambda1(u, hom, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
    """[u] -> (1_n, u, g) with g(t) = exp(t log u-dot)."""
    _check_zero(hom)
    d = _unitary_defect(u)
    if d > tol.eps:
        raise NotUnitary("unitary defect %.3g" % d)
    h = mc.unitary_log(u.scalar, tol)
    w, vecs = mc.herm_eig(h, tol)
    t = np.linspace(0.0, 1.0, grid)
    ph = np.exp(1j * t[:, None] * w[None, :])
    path = (vecs[None] * ph[:, None, :]) @ mc.dagger(vecs)[None]
    g = UnitizedElement.scalar_element(_target_fiber(hom), path)
    one = UnitizedElement.identity(u.algebra, u.level)
    return K1Triple(one, u, SampledElement("interval", g), hom, "lambda1")


# doubling unitary and the projection path


def doubling_unitary(v, tol=mc.DEFAULT_TOL):
    """[[v, 1 - vv*], [1 - v*v, v*]]."""
    src, dst = v.H @ v, v @ v.H
    d = max(_proj_defect(src), _proj_defect(dst))
    if d > tol.eps:
        raise NotPartialIsometry("v*v, vv* projection defect %.3g" % d)
    one = v.one()
    return block2(v, one - dst, one - src, v.H)


def _sa_path(x, t):
    """t -> exp(i pi t (1 - x)/2) = 1 + (e^{i pi t} - 1)(1 - x)/2 for a self-adjoint unitary x."""
    one = _stack(x.one(), len(t))
    half = _stack((x.one() - x) * 0.5, len(t))
    return one + half * _coef(np.exp(1j * np.pi * t) - 1, one)


def _scalar_geodesic(target, t, tol):
    """exp(i t log target) for a scalar unitary, sampled at t."""
    h = mc.unitary_log(target, tol)
    w, vecs = mc.herm_eig(h, tol)
    ph = np.exp(1j * t[:, None] * w[None, :])
    return (vecs[None] * ph[:, None, :]) @ mc.dagger(vecs)[None]


@dataclass
class ProjectionPath:
    path: SampledElement
    w: SampledElement
    n: int
    m: int


def p_v_path(sigma, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
    """w(s)* (1_n (+) 0) w(s) for a triple (p, 1_n (+) 0, v) at level m.

    w(s) is the product of the self-adjoint paths of the swap and of
    [[1 - v*v, v*], [v, 1 - vv*]], followed by a scalar gauge so that the scalar
    part of w is the geodesic from 1 to the scalar doubling unitary.
    """
    v = sigma.v
    m = v.level
    n = _rank_of_scalar_q(sigma, tol)
    t = np.linspace(0.0, 1.0, grid)
    alg = v.algebra
    one = v.one()
    zero = one * 0
    swap = block2(zero, one, one, zero)
    src, dst = v.H @ v, v @ v.H
    refl = block2(one - src, v.H, v, one - dst)
    w = _sa_path(swap, t) @ _sa_path(refl, t)
    # gauge: replace the scalar part of w(s) by the scalar geodesic
    wd = UnitizedElement.scalar_element(alg, w.scalar)
    z = UnitizedElement.scalar_element(alg, _scalar_geodesic(w.scalar[-1], t, tol))
    w = w @ wd.H @ z
    e = _scalar_proj(alg, 2 * m, n)
    pv = w.H @ _stack(e, grid) @ w
    pv = arraywise(lambda a: (a + mc.dagger(a)) / 2, pv)
    return ProjectionPath(SampledElement("interval", pv), SampledElement("interval", w), n, m)


def _rank_of_scalar_q(sigma, tol):
    q = sigma.q
    n = q.level
    k = int(round(float(np.trace(q.scalar).real)))
    if q.dist(_scalar_proj(q.algebra, n, k)) > tol.composite:
        raise LiftInvalid("second entry must be 1_n (+) 0")
    return k


def _ensure_q_unit(sigma, tol):
    try:
        _rank_of_scalar_q(sigma, tol)
        return sigma, []
    except LiftInvalid:
        out, log = normalize_k0(sigma, tol)
        return out, log


# Bott and theta


def bott(sigma, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
    """(p, 1_n, v) -> (1_{2m}, u, g) over the suspension, t on the last path axis."""
    sigma, _ = _ensure_q_unit(sigma, tol)
    pv = p_v_path(sigma, grid, tol)
    m, n = pv.m, pv.n
    t = np.linspace(0.0, 1.0, grid)
    fa = sigma.p.algebra
    fb = sigma.v.algebra
    big = sigma.p.amplify(m)
    ea = _scalar_proj(fa, 2 * m, n)
    eb = _scalar_proj(fb, 2 * m, n)
    zt = np.exp(2j * np.pi * t) - 1
    zc = np.exp(-2j * np.pi * t) - 1
    onea = _stack(ea.one(), grid)
    u = (onea + _stack(big, grid) * _coef(zt, onea)) @ (onea + _stack(ea, grid) * _coef(zc, onea))
    # g(s, t): s on axis 0, t on axis 1
    P = pv.path.element
    ns = pv.path.grid[0]
    oneb = eb.one().map_arrays(lambda a: np.broadcast_to(a, (ns, grid) + a.shape).copy())
    Pst = P.map_arrays(lambda a: np.broadcast_to(a[:, None], (ns, grid) + a.shape[1:]).copy())
    Est = eb.map_arrays(lambda a: np.broadcast_to(a, (ns, grid) + a.shape).copy())
    zt2 = zt.reshape((1, grid, 1, 1))
    zc2 = zc.reshape((1, grid, 1, 1))
    g = (oneb + Pst.map_arrays(lambda a: a * zt2)) @ (oneb + Est.map_arrays(lambda a: a * zc2))
    out = K1Triple(ea.one(), u, SampledElement("square", g), sigma.hom, "bott")
    return out


def theta(sigma, tol=mc.DEFAULT_TOL):
    """(1_n, u, g) -> (w(1+0)w*, 1+0, (g+0) phi(w*)), with w the product of the
    self-adjoint paths of the swap and [[0, u*], [u, 0]]; t runs along g's grid."""
    u, g = sigma.u, sigma.g
    n = u.level
    grid = g.grid[0]
    t = np.linspace(0.0, 1.0, grid)
    one = u.one()
    zero = one * 0
    swap = block2(zero, one, one, zero)
    T = block2(zero, u.H, u, zero)
    w = _sa_path(swap, t) @ _sa_path(T, t)
    e = _scalar_proj(u.algebra, 2 * n, n)
    p = w @ _stack(e, grid) @ w.H
    p = arraywise(lambda a: (a + mc.dagger(a)) / 2, p)
    ge = g.element
    gz = ge.direct_sum(ge * 0)
    v = gz @ sigma.hom(w.H)
    return K0Triple(p, _stack(e, grid), v, sigma.hom, "theta"), SampledElement("interval", w)


# boundary maps


def _hsa(x):
    return arraywise(lambda a: (a + mc.dagger(a)) / 2, x)


def default_unitary_lift(u, ladder, tol=mc.DEFAULT_TOL):
    """w = swap * exp(i pi (1 - T)/2) with T the self-adjoint lift of [[0, u*], [u, 0]];
    it lifts u (+) u*."""
    ut = ladder.lift_to_A(u)
    one = ut.one()
    zero = one * 0
    T = block2(zero, ut.H, ut, zero)
    ex = arraywise(lambda a: mc.herm_func(np.eye(a.shape[-1]) - a, lambda w: np.exp(1j * np.pi * w / 2), tol), T)
    swap = block2(zero, one, one, zero)
    return swap @ ex


@dataclass
class BoundaryResult:
    triple: object
    sign: int
    detail: dict


def index_map(sigma, ladder, l=None, w=None, h=None, tol=mc.DEFAULT_TOL):
    """(1_n, u, g) over gamma -> (w(1+0)w*, 1+0, (h(1)+0) phi(w*)) over psi."""
    u, g = sigma.u, sigma.g
    n = u.level
    if w is None:
        w = default_unitary_lift(u, ladder, tol)
        l = n
    if l is None:
        l = w.level - n
    if h is None:
        h = ladder.lift_path_to_B(g)
    # lift identities
    d = _unitary_defect(w)
    if d > tol.composite:
        raise LiftInvalid("w is not unitary (defect %.3g)" % d)
    fq = _fiber(ladder.Q)
    eq = _scalar_proj(fq, n + l, n)
    lhs = ladder.pi_A(w) @ eq
    rhs = u.pad_to(n + l)
    d = lhs.dist(rhs)
    if d > tol.composite:
        raise LiftInvalid("pi_A(w)(1_n + 0_l) differs from u + 0_l by %.3g" % d)
    d = ladder.pi_B(h.element).dist(g.element)
    if d > tol.composite:
        raise LiftInvalid("pi_B(h) differs from g by %.3g" % d)
    d = h.first().dist(h.first().one())
    if d > tol.composite:
        raise LiftInvalid("h(0) is not 1 (defect %.3g)" % d)
    fa = w.algebra
    e = _scalar_proj(fa, n + l, n)
    p = _hsa(w @ e @ w.H)
    h1 = h.last().pad_to(n + l)
    v = h1 @ ladder.phi(w.H)
    p_i = ladder.to_ideal_A(p, tol.composite, "first entry")
    v_j = ladder.to_ideal_B(v, tol.composite, "third entry")
    q_i = scalar_over(ladder.I, np.diag([1.0] * n + [0.0] * l))
    out = K0Triple(p_i, q_i, v_j, ladder.psi, "index map")
    return BoundaryResult(out, 1, {"w": w, "h": h, "l": l, "p_over_A": p})


def exp_map(sigma, ladder, a=None, f=None, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
    """(p, 1_n, v) over gamma -> -(1_{2m}, exp(2 pi i (a+0)), exp(2 pi i f)) over psi.

    The sign is kept on the result, not applied to the representative.
    """
    sigma, log = _ensure_q_unit(sigma, tol)
    pv = p_v_path(sigma, grid, tol)
    m = pv.m
    if a is None:
        a = _hsa(ladder.lift_to_A(sigma.p))
    d = ladder.pi_A(a).dist(sigma.p)
    if d > tol.composite or a.H.dist(a) > tol.composite:
        raise LiftInvalid("a is not a self-adjoint lift of p (defect %.3g)" % d)
    end = ladder.phi(a).pad_to(2 * m)
    if f is None:
        f = ladder.lift_path_to_B(pv.path, end)
    d = max(ladder.pi_B(f.element).dist(pv.path.element), f.last().dist(end), f.element.H.dist(f.element))
    if d > tol.composite:
        raise LiftInvalid("f is not a self-adjoint lift of p_v ending at phi(a) + 0 (defect %.3g)" % d)
    u = exp_2pi(a.pad_to(2 * m), 1.0, tol)
    gf = exp_2pi(f.element, 1.0, tol)
    u_i = ladder.to_ideal_A(u, tol.composite, "exp(2 pi i a)")
    g_j = ladder.to_ideal_B(gf, tol.composite, "exp(2 pi i f)")
    one = unit_over(ladder.I, 2 * m)
    out = K1Triple(one, u_i, SampledElement("interval", g_j), ladder.psi, "exponential map")
    return BoundaryResult(out, -1, {"a": a, "f": f, "p_v": pv, "normalization": log, "normalized": sigma})


# mapping cone


def cone_delta0(sigma, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
    """(p, 1_n, v) -> ((p + 0_m, p_v), n): the cone projection and the subtracted rank."""
    sigma, _ = _ensure_q_unit(sigma, tol)
    pv = p_v_path(sigma, grid, tol)
    a = sigma.p.amplify(pv.m)
    cone = cone_element(a, pv.path, sigma.hom, tol)
    return cone, pv.n


def cone_delta1(sigma, tol=mc.DEFAULT_TOL):
    bad = validate(sigma, mc.Tolerance(tol.composite, tol.composite))
    if not bad.ok:
        raise LiftInvalid("; ".join(bad.lines()))
    return cone_element(sigma.u, sigma.g, sigma.hom, tol)
