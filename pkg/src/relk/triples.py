"""Relative K-cycles: triple types, validity, sums, inverses, normalization and
certificate checking.

Elements are UnitizedElements (possibly carrying sample axes) and paths are
SampledElements whose first grid axis is the path parameter.
"""

from dataclasses import dataclass, field

import numpy as np

from . import matcore as mc
from .algmodel import SampledElement, UnitizedElement, block2
from .errors import HomMismatch, HypothesisViolated, SingularOnSupport


# arraywise helpers: Ã splits as a product of its block representations and
# the scalar part, so functional calculus is done one array at a time


def arraywise(fn, *xs):
    arrs = [fn(*parts) for parts in zip(*(x.arrays() for x in xs))]
    return UnitizedElement(xs[0].algebra, arrs[0], arrs[1:])


def rho(e, tol=mc.DEFAULT_TOL):
    return arraywise(lambda a: mc.rho_projection(a, tol), e)


def polar(b, src, dst, tol=mc.DEFAULT_TOL):
    return arraywise(lambda x, s, d: mc.polar_partial_isometry(x, s, d, tol), b, src, dst)


def corner_inverse(b, e_img, f_img, tol=mc.DEFAULT_TOL):
    """c = e c f with c b = e, b c = f for b an invertible morphism e -> f (idempotents)."""
    re, rf = rho(e_img, tol), rho(f_img, tol)

    def one(x, e, f, r1, r2):
        c0 = mc.corner_inverse(x @ r1, r1, r2, tol)
        return e @ c0 @ f

    return arraywise(one, b, e_img, f_img, re, rf)


def ident(x):
    return x.one()


def _d(x, y):
    return x.dist(y)


def _proj_defect(p):
    return max(_d(p @ p, p), _d(p.H, p))


def _idem_defect(e):
    return _d(e @ e, e)


def _as_path(x, grid):
    return SampledElement("interval", x.map_arrays(lambda a: np.broadcast_to(a, (grid,) + a.shape).copy()))


@dataclass
class RawK0Triple:
    e: UnitizedElement
    f: UnitizedElement
    b: UnitizedElement
    hom: object

    @property
    def level(self):
        return self.e.level


@dataclass
class K0Triple:
    p: UnitizedElement
    q: UnitizedElement
    v: UnitizedElement
    hom: object
    note: str = ""

    @property
    def level(self):
        return self.p.level


@dataclass
class RawK1Triple:
    e: UnitizedElement
    a: UnitizedElement
    g: SampledElement
    hom: object

    @property
    def level(self):
        return self.e.level


@dataclass
class K1Triple:
    p: UnitizedElement
    u: UnitizedElement
    g: SampledElement
    hom: object
    note: str = ""

    @property
    def level(self):
        return self.p.level


@dataclass
class IsoCertificateK0:
    c: UnitizedElement
    d: UnitizedElement


@dataclass
class HomotopyCertificate:
    """path: samples over t of b_t (K0) or a_t (K1); g_path: samples over (t, s) of g_t(s)."""

    path: SampledElement
    g_path: SampledElement = None
    label: str = ""


@dataclass
class Report:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def add(self, name, value, bound):
        if not value <= bound:
            self.violations.append((name, float(value)))

    def __bool__(self):
        return self.ok

    def lines(self):
        return ["%s defect %.3g" % (n, v) for n, v in self.violations]


# validation


def validate(sigma, tol=mc.DEFAULT_TOL):
    r = Report()
    eps = tol.eps
    phi = sigma.hom
    if isinstance(sigma, K0Triple):
        r.add("p not a projection", _proj_defect(sigma.p), eps)
        r.add("q not a projection", _proj_defect(sigma.q), eps)
        v = sigma.v
        r.add("v*v - phi(p)", _d(v.H @ v, phi(sigma.p)), eps)
        r.add("vv* - phi(q) (range mismatch)", _d(v @ v.H, phi(sigma.q)), eps)
    elif isinstance(sigma, RawK0Triple):
        r.add("e not idempotent", _idem_defect(sigma.e), eps)
        r.add("f not idempotent", _idem_defect(sigma.f), eps)
        pe, pf = phi(sigma.e), phi(sigma.f)
        r.add("b - phi(f) b phi(e)", _d(sigma.b, pf @ sigma.b @ pe), eps)
        try:
            polar(sigma.b @ rho(pe, tol), rho(pe, tol), rho(pf, tol), tol)
        except SingularOnSupport as exc:
            r.violations.append(("b not invertible from phi(e) to phi(f): %s" % exc, float("inf")))
    elif isinstance(sigma, K1Triple):
        p, u, g = sigma.p, sigma.u, sigma.g
        r.add("p not a projection", _proj_defect(p), eps)
        r.add("u*u - p", _d(u.H @ u, p), eps)
        r.add("uu* - p", _d(u @ u.H, p), eps)
        fp = phi(p)
        n = g.grid[0]
        fpb = fp.map_arrays(lambda a: np.broadcast_to(a, (n,) + a.shape))
        ge = g.element
        r.add("g*g - phi(p)", _d(ge.H @ ge, fpb), eps)
        r.add("gg* - phi(p)", _d(ge @ ge.H, fpb), eps)
        r.add("g(0) - phi(p)", _d(g.first(), fp), eps)
        r.add("g(1) - phi(u)", _d(g.last(), phi(u)), tol.composite)
        for name, val in g.validate(tol):
            r.violations.append((name, val))
    elif isinstance(sigma, RawK1Triple):
        e, a, g = sigma.e, sigma.a, sigma.g
        r.add("e not idempotent", _idem_defect(e), eps)
        r.add("a - e a e", _d(a, e @ a @ e), eps)
        try:
            re = rho(e, tol)
            polar(a @ re, re, re, tol)
        except SingularOnSupport as exc:
            r.violations.append(("a not invertible in the corner of e: %s" % exc, float("inf")))
        r.add("g(0) - phi(e)", _d(g.first(), phi(e)), eps)
        r.add("g(1) - phi(a)", _d(g.last(), phi(a)), tol.composite)
    else:
        raise TypeError("not a triple: %r" % (sigma,))
    return r


# group structure


def _same_hom(s, t):
    if s.hom is not t.hom:
        raise HomMismatch("triples over different homomorphisms")


def add(s, t):
    _same_hom(s, t)
    if isinstance(s, K0Triple):
        return K0Triple(s.p.direct_sum(t.p), s.q.direct_sum(t.q), s.v.direct_sum(t.v), s.hom)
    if isinstance(s, RawK0Triple):
        return RawK0Triple(s.e.direct_sum(t.e), s.f.direct_sum(t.f), s.b.direct_sum(t.b), s.hom)
    if isinstance(s, K1Triple):
        return K1Triple(s.p.direct_sum(t.p), s.u.direct_sum(t.u),
                        s.g.with_element(s.g.element.direct_sum(t.g.element)), s.hom)
    raise TypeError("cannot add %r" % (s,))


def negate(s, tol=mc.DEFAULT_TOL):
    if isinstance(s, K0Triple):
        return K0Triple(s.q, s.p, s.v.H, s.hom)
    if isinstance(s, RawK0Triple):
        phi = s.hom
        return RawK0Triple(s.f, s.e, corner_inverse(s.b, phi(s.e), phi(s.f), tol), s.hom)
    if isinstance(s, K1Triple):
        return K1Triple(s.p, s.u.H, s.g.adjoint(), s.hom)
    raise TypeError("cannot negate %r" % (s,))


def zero_triple(hom, algebra_a, algebra_b, kind="k0", grid=None):
    z = UnitizedElement.zero(algebra_a, 0)
    zb = UnitizedElement.zero(algebra_b, 0)
    if kind == "k0":
        return K0Triple(z, z, zb, hom)
    return K1Triple(z, z, _as_path(zb, grid), hom)


def compose_rule(s, t, tol=mc.DEFAULT_TOL):
    """(p, q, v) and (q, q', v') give (p, q', v'v)."""
    _same_hom(s, t)
    if s.q.dist(t.p) > tol.eps:
        raise HypothesisViolated("the second triple must start where the first ends")
    return K0Triple(s.p, t.q, t.v @ s.v, s.hom)


def pad(s, level):
    """Pad a K0 triple with zeros up to the given level."""
    return K0Triple(s.p.pad_to(level), s.q.pad_to(level), s.v.pad_to(level), s.hom, s.note)


# normalization


def _scalar_rotation(target_proj, proj, tol):
    """Scalar unitary s with s proj s* = target_proj (equal ranks)."""
    vp = mc.range_basis(proj, tol)
    vt = mc.range_basis(target_proj, tol)
    if vp.shape[-1] != vt.shape[-1]:
        raise HypothesisViolated("scalar parts have different ranks")
    cp = mc.range_basis(np.eye(proj.shape[-1]) - proj, tol)
    ct = mc.range_basis(np.eye(proj.shape[-1]) - target_proj, tol)
    return np.concatenate([vt, ct], axis=-1) @ mc.dagger(np.concatenate([vp, cp], axis=-1))


def _is_normalized_k0(s, tol):
    n = s.level
    q = s.q.scalar
    k = int(round(float(np.trace(q).real))) if n else 0
    target = np.diag([1.0] * k + [0.0] * (n - k))
    return (
        s.q.dist(UnitizedElement.scalar_element(s.q.algebra, target)) <= tol.eps
        and mc.defect(s.p.scalar - target) <= tol.eps
        and mc.defect(s.v.scalar - target) <= tol.eps
    )


def normalize_k0(sigma, tol=mc.DEFAULT_TOL):
    """Move a triple of idempotents to (p, 1_n (+) 0_n, v) with scalar parts 1_n (+) 0_n.

    Returns (triple, log).
    """
    phi = sigma.hom
    log = []
    if isinstance(sigma, K0Triple) and _is_normalized_k0(sigma, tol):
        return sigma, ["already normalized"]
    if isinstance(sigma, K0Triple):
        p, q, v = sigma.p, sigma.q, sigma.v
        log.append("projections given; polar step skipped")
    else:
        bad = validate(sigma, tol)
        if not bad.ok:
            raise HypothesisViolated("; ".join(bad.lines()))
        p, q = rho(sigma.e, tol), rho(sigma.f, tol)
        fp, fq = phi(p), phi(q)
        b1 = fq @ sigma.b @ fp
        v = polar(b1, fp, fq, tol)
        log.append("rho on both idempotents, polar part of phi(q) b phi(p)")
    n = p.level
    one = UnitizedElement.identity(p.algebra, n)
    oneb = UnitizedElement.identity(v.algebra, n)
    zb = UnitizedElement.zero(v.algebra, n)
    fq = phi(q)
    p1 = p.direct_sum(one - q)
    q1 = one.direct_sum(UnitizedElement.zero(p.algebra, n))
    v1 = block2(v, oneb - fq, zb, zb)
    log.append("added (1-q, 1-q, 1-phi(q)) and rotated q (+) (1-q) onto 1 (+) 0")
    # scalar parts: conjugate by a scalar unitary, then absorb the scalar of v
    s = _scalar_rotation(q1.scalar, p1.scalar, tol)
    sa = UnitizedElement.scalar_element(p.algebra, s)
    sb = UnitizedElement.scalar_element(v.algebra, s)
    p2 = sa @ p1 @ sa.H
    p2 = arraywise(lambda a: (a + mc.dagger(a)) / 2, p2)
    v2 = v1 @ sb.H
    vd = UnitizedElement.scalar_element(v.algebra, v2.scalar)
    v3 = vd.H @ v2
    log.append("scalar unitary conjugation of p, scalar correction of v")
    out = K0Triple(p2, q1, v3, phi, "normalized")
    return out, log


def _polar_invertible(x, tol):
    one = x.one()
    return arraywise(lambda a, i: mc.inv_sqrt_psd(a @ mc.dagger(a), i, tol) @ a, x, one)


def normalize_k1(sigma, tol=mc.DEFAULT_TOL):
    """(e, a, g) with invertibles -> (1_n, u, g) unitary with scalar parts 1_n. Returns (triple, log)."""
    phi = sigma.hom
    if isinstance(sigma, K1Triple):
        e, a, g = sigma.p, sigma.u, sigma.g
    else:
        e, a, g = sigma.e, sigma.a, sigma.g
    log = []
    p = rho(e, tol)
    a1 = a @ p
    fp = phi(p)
    n_grid = g.grid[0]
    fpb = fp.map_arrays(lambda x: np.broadcast_to(x, (n_grid,) + x.shape))
    g1 = g.element @ fpb
    log.append("moved the corner of e to the corner of rho(e)")
    one = p.one()
    a2 = a1 + (one - p)
    g2 = g1 + (fpb.one() - fpb)
    log.append("added the complement 1 - p")
    u = _polar_invertible(a2, tol)
    gu = _polar_invertible(g2, tol)
    log.append("polar parts of a and g")
    ud = UnitizedElement.scalar_element(u.algebra, u.scalar)
    gd = UnitizedElement.scalar_element(gu.algebra, gu.scalar)
    u3 = ud.H @ u
    g3 = gd.H @ gu
    log.append("scalar correction by the scalar parts")
    return K1Triple(one, u3, g.with_element(g3, "none"), phi, "normalized"), log


# certificates


def verify_iso(s, t, cert, tol=mc.DEFAULT_TOL):
    r = Report()
    c, d = cert.c, cert.d
    eps = tol.composite
    r.add("c*c - p", _d(c.H @ c, s.p), eps)
    r.add("cc* - p'", _d(c @ c.H, t.p), eps)
    r.add("d*d - q", _d(d.H @ d, s.q), eps)
    r.add("dd* - q'", _d(d @ d.H, t.q), eps)
    phi = s.hom
    r.add("phi(d) v - v' phi(c)", _d(phi(d) @ s.v, t.v @ phi(c)), eps)
    return r


def _bcast(x, shape):
    return x.map_arrays(lambda a: np.broadcast_to(a, tuple(shape) + a.shape[-2:]).copy())


def _invertible_in_corner(b, corner, tol):
    """Smallest singular value of b on the range of the projection corner, per node."""
    worst = np.inf
    for x, pr in zip(b.arrays(), corner.arrays()):
        if x.shape[-1] == 0:
            continue
        m = mc.dagger(x) @ x + (np.eye(x.shape[-1]) - pr)
        w = np.linalg.eigvalsh(m)
        worst = min(worst, float(np.min(w)))
    return worst


def verify_elementary(sigma, cert, tol=mc.DEFAULT_TOL):
    """Check a homotopy certificate for a K0 or K1 triple being elementary."""
    r = Report()
    phi = sigma.hom
    eps = tol.composite
    path = cert.path
    if isinstance(sigma, (K0Triple, RawK0Triple)):
        e = sigma.p if isinstance(sigma, K0Triple) else sigma.e
        f = sigma.q if isinstance(sigma, K0Triple) else sigma.f
        b = sigma.v if isinstance(sigma, K0Triple) else sigma.b
        r.add("e - f", _d(e, f), tol.eps)
        fe = phi(e)
        r.add("b_0 - phi(e)", _d(path.first(), fe), eps)
        r.add("b_1 - b", _d(path.last(), b), eps)
        n = path.grid[0]
        feb = fe.map_arrays(lambda a: np.broadcast_to(a, (n,) + a.shape))
        bt = path.element
        r.add("b_t outside the corner of phi(e)", _d(bt, feb @ bt @ feb), eps)
        corner = rho(fe, tol).map_arrays(lambda a: np.broadcast_to(a, (n,) + a.shape))
        smin = _invertible_in_corner(bt, corner, tol)
        if not smin > tol.eps:
            r.violations.append(("b_t not invertible on the corner", smin))
        step = path.max_step()
        if step > 0.2:
            r.violations.append(("certificate grid too coarse", step))
        return r
    # K1: pairs (a_t, g_t)
    e = sigma.p if isinstance(sigma, K1Triple) else sigma.e
    a = sigma.u if isinstance(sigma, K1Triple) else sigma.a
    g = sigma.g
    if cert.g_path is None:
        r.violations.append(("K1 certificate needs the g_t family", float("inf")))
        return r
    gp = cert.g_path.element
    r.add("a_0 - e", _d(path.first(), e), eps)
    r.add("a_1 - a", _d(path.last(), a), eps)
    fe = phi(e)
    g0 = gp.take(0)
    ns = g0.batch_shape[0]
    r.add("g_0(s) - phi(e)", _d(g0, fe.map_arrays(lambda x: np.broadcast_to(x, (ns,) + x.shape))), eps)
    r.add("g_1 - g", _d(gp.take(-1), g.element), eps)
    r.add("g_t(0) - phi(e)", _d(gp.take((slice(None), 0)),
                                fe.map_arrays(lambda x: np.broadcast_to(x, (path.grid[0],) + x.shape))), eps)
    r.add("g_t(1) - phi(a_t)", _d(gp.take((slice(None), -1)), phi(path.element)), eps)
    nt = path.grid[0]
    re = rho(e, tol).map_arrays(lambda x: np.broadcast_to(x, (nt,) + x.shape))
    smin = _invertible_in_corner(path.element, re, tol)
    if not smin > tol.eps:
        r.violations.append(("a_t not invertible on the corner", smin))
    rf = rho(fe, tol).map_arrays(lambda x: np.broadcast_to(x, gp.batch_shape + x.shape))
    smin = _invertible_in_corner(gp, rf, tol)
    if not smin > tol.eps:
        r.violations.append(("g_t(s) not invertible on the corner", smin))
    return r


def _tpath(grid):
    return np.linspace(0.0, 1.0, grid)


def rotation_2x2(sigma, grid=257, tol=mc.DEFAULT_TOL):
    """The triple (e+f, e+f, [[0, b^-1], [-b, 0]]) with its elementary homotopy.

    b_t = [[e, t b^-1], [0, f]] [[e, 0], [-t b, f]] [[e, t b^-1], [0, f]] in the images.
    """
    phi = sigma.hom
    if isinstance(sigma, K0Triple):
        e, f, b = sigma.p, sigma.q, sigma.v
    else:
        e, f, b = sigma.e, sigma.f, sigma.b
    bad = validate(RawK0Triple(e, f, b, phi), tol)
    if not bad.ok:
        raise HypothesisViolated("; ".join(bad.lines()))
    fe, ff = phi(e), phi(f)
    binv = corner_inverse(b, fe, ff, tol)
    ef = e.direct_sum(f)
    zero = b * 0
    target = block2(zero, binv, -b, zero)
    t = _tpath(grid)

    def at(x):
        return x.map_arrays(lambda a: np.broadcast_to(a, (grid,) + a.shape))

    T = at(fe)
    upper = block2(T, at(binv) * t, at(zero), at(ff))
    lower = block2(T, at(zero), at(b) * (-t), at(ff))
    path = SampledElement("interval", upper @ lower @ upper)
    return RawK0Triple(ef, ef, target, phi), HomotopyCertificate(path, label="rotation")


def self_adjoint_path(u, grid=257):
    """exp(i pi t (1 - u)/2) = 1 + (e^{i pi t} - 1)(1 - u)/2 for a self-adjoint unitary u."""
    t = _tpath(grid)
    z = np.exp(1j * np.pi * t) - 1
    one = u.one()
    half = (one - u) * 0.5
    halfb = half.map_arrays(lambda a: np.broadcast_to(a, (grid,) + a.shape))
    return one.map_arrays(lambda a: np.broadcast_to(a, (grid,) + a.shape)) + halfb * z


def self_adjoint_unitary_path(u, grid=257, tol=mc.DEFAULT_TOL):
    d = max(_d(u.H, u), _d(u @ u, u.one()))
    if d > tol.eps:
        raise HypothesisViolated("not a self-adjoint unitary (defect %.3g)" % d)
    return HomotopyCertificate(SampledElement("interval", self_adjoint_path(u, grid)), label="self-adjoint")


def whitehead_k1(sigma, grid=65, tol=mc.DEFAULT_TOL):
    """sigma (+) (-sigma) with the six-factor homotopy to the trivial triple.

    Second group of three factors uses +t e where a -t e version would end at
    -(a (+) a^-1); with it the product at t = 1 is a (+) a^-1.
    """
    phi = sigma.hom
    if isinstance(sigma, K1Triple):
        e, a, g = sigma.p, sigma.u, sigma.g
    else:
        e, a, g = sigma.e, sigma.a, sigma.g
    bad = validate(sigma if isinstance(sigma, K1Triple) else RawK1Triple(e, a, g, phi), tol)
    if not bad.ok:
        raise HypothesisViolated("; ".join(bad.lines()))
    ainv = corner_inverse(a, e, e, tol)
    fe = phi(e)
    ns = g.grid[0]
    gel = g.element
    ginv = corner_inverse(gel, _bcast(fe, (ns,)), _bcast(fe, (ns,)), tol)
    t = _tpath(grid)

    def six(x, xinv, ee, shape):
        # x, xinv, ee broadcast to shape (+ matrix axes); t on the first axis
        X, Xi, E = _bcast(x, shape), _bcast(xinv, shape), _bcast(ee, shape)
        Z = E * 0
        tt = t.reshape((grid,) + (1,) * (len(shape) - 1))
        up = block2(E, X * (-tt), Z, E)
        lo = block2(E, Z, Xi * tt, E)
        up2 = block2(E, E * tt, Z, E)
        lo2 = block2(E, Z, E * (-tt), E)
        return up @ lo @ up @ up2 @ lo2 @ up2

    a_t = six(a, ainv, e, (grid,))
    gsh = (grid, ns)
    g_t = six(gel, ginv, _bcast(fe, (ns,)), gsh)
    summed = K1Triple(e.direct_sum(e), a.direct_sum(ainv), g.with_element(gel.direct_sum(ginv)), phi) \
        if isinstance(sigma, K1Triple) else RawK1Triple(e.direct_sum(e), a.direct_sum(ainv),
                                                        g.with_element(gel.direct_sum(ginv)), phi)
    cert = HomotopyCertificate(SampledElement("interval", a_t), SampledElement("square", g_t), "whitehead")
    return summed, cert


def constant_certificate(x, grid=257):
    return HomotopyCertificate(_as_path(x, grid), label="constant")
