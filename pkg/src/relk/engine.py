"""Relative groups of finite-dimensional homomorphisms, class decision, the two
six-term sequences, and the worked-example fixtures.

Classes are only decided where every K1 group in sight vanishes: finite
dimensional algebras, plus the two function-algebra ladders that ship as
fixtures (their K-groups are entered by hand, the maps are computed).
"""

from dataclasses import dataclass, field

import numpy as np

from . import intk
from . import matcore as mc
from .algmodel import (
    DEFAULT_GRID,
    Composite,
    Evaluation,
    FDAlgebra,
    GridAlgebra,
    GridIdentity,
    GridRestriction,
    Homomorphism,
    Ladder,
    Morphism,
    SampledElement,
    ToZero,
    UnitizedElement,
)
from .errors import (
    CertificateInvalid,
    DomainMismatch,
    HypothesisViolated,
    LiftInvalid,
    NotComputable,
    NotFiniteDimensional,
    NotInKernel,
    StepTooCoarse,
)
from .maps import exp_map, index_map, mu1, nu0, unit_over
from .triples import K0Triple, K1Triple, arraywise

PHASE_GUARD = np.pi / 2
RESIDUAL = 0.01


# winding numbers


def _phase_winding(dets, what="loop"):
    """Total phase change of a closed sequence of nonzero complex numbers, in turns."""
    dets = np.asarray(dets, dtype=complex)
    if dets.size < 2:
        return 0
    mags = np.abs(dets)
    if np.min(mags) < 1e-12:
        raise HypothesisViolated("%s: determinant vanishes along the loop" % what)
    steps = np.angle(dets[1:] / dets[:-1])
    big = float(np.max(np.abs(steps)))
    if big >= PHASE_GUARD:
        raise StepTooCoarse("%s: determinant phase jumps by %.3f between nodes" % (what, big))
    total = float(np.sum(steps)) / (2 * np.pi)
    k = int(round(total))
    if abs(total - k) >= RESIDUAL:
        raise StepTooCoarse("%s: winding %.4f is not close to an integer" % (what, total))
    return k


def _dets(a):
    if a.shape[-1] == 0:
        return np.ones(a.shape[:-2], dtype=complex)
    return np.linalg.det(a)


def winding_number(loop, tol=mc.DEFAULT_TOL):
    """Determinant windings of a based loop of unitaries: [scalar part, block 1, ...]."""
    el = loop.element if isinstance(loop, SampledElement) else loop
    if len(el.batch_shape) != 1:
        raise DomainMismatch("winding_number wants a single path axis, got batch %s" % (el.batch_shape,))
    gap = el.take(0).dist(el.take(-1))
    if gap > tol.composite:
        raise HypothesisViolated("loop is not based: g(0) and g(1) differ by %.3g" % gap)
    return [_phase_winding(_dets(a), "array %d" % i) for i, a in enumerate(el.arrays())]


def winding_vector(loop, tol=mc.DEFAULT_TOL):
    """K0 coordinates of the loop class: block winding minus block size times scalar winding."""
    el = loop.element if isinstance(loop, SampledElement) else loop
    w = winding_number(loop, tol)
    return [wb - k * w[0] for wb, k in zip(w[1:], el.algebra.block_sizes)]


# relative groups of a homomorphism between finite-dimensional algebras


@dataclass
class RelativeGroups:
    hom: object
    k0: intk.GroupPresentation
    k1: intk.GroupPresentation
    k0_basis: list
    k1_to_new: list
    k1_reps: list
    k0_generators: list
    k1_generators: list
    phi_star: intk.GroupMap
    grid: int = DEFAULT_GRID

    def k1_coordinates(self, vec):
        """Coordinates in K1 of the class of a K0(B) vector."""
        y = intk.matvec(self.k1_to_new, vec) if self.k1_to_new else []
        return self.k1.reduce(y)

    def k0_coordinates(self, y):
        c = intk.solve_in_lattice(self.k0_basis, list(y), len(y))
        if c is None:
            raise NotInKernel("rank vector %s is not in the kernel of %s" % (list(y), self.phi_star.name))
        return c


def _require_fd(hom):
    for alg in (hom.source, hom.target):
        if not isinstance(alg, FDAlgebra):
            raise NotFiniteDimensional("%s is not finite-dimensional; not computable in this regime" % (alg,))


def _level_for(vecs, sizes):
    n = 1
    for y in vecs:
        for r, k in zip(y, sizes):
            n = max(n, -(-abs(r) // k))
    return n


def realize_k0(hom, y, tol=mc.DEFAULT_TOL):
    """A K0 triple (P, Q, V) with nu0 = y, for y in the kernel of the induced map."""
    A, B = hom.source, hom.target
    pos = [max(v, 0) for v in y]
    neg = [max(-v, 0) for v in y]
    n = _level_for([pos, neg], A.block_sizes)
    P = UnitizedElement.matrix_unit_projection(A, n, pos)
    Q = UnitizedElement.matrix_unit_projection(A, n, neg)
    fp, fq = hom(P), hom(Q)
    blocks = []
    for bp, bq in zip(fp.blocks, fq.blocks):
        vp, vq = mc.range_basis(bp, tol), mc.range_basis(bq, tol)
        if vp.shape[-1] != vq.shape[-1]:
            raise NotInKernel("ranks %d and %d differ in a target block" % (vp.shape[-1], vq.shape[-1]))
        blocks.append(vq @ mc.dagger(vp))
    V = UnitizedElement(B, np.zeros((n, n)), blocks)
    return K0Triple(P, Q, V, hom, "generator %s" % list(y))


def realize_k1(hom, c, grid=DEFAULT_GRID):
    """(1_n, 1_n, f_P f_Q*) whose loop class is the K0(B) vector c."""
    B = hom.target
    pos = [max(v, 0) for v in c]
    neg = [max(-v, 0) for v in c]
    n = _level_for([pos, neg], B.block_sizes)
    P = UnitizedElement.matrix_unit_projection(B, n, pos)
    Q = UnitizedElement.matrix_unit_projection(B, n, neg)
    out = mu1(P, Q, hom, grid)
    out.note = "generator %s" % list(c)
    return out


def _torsion(pres):
    """Order of each generator of a normal-form presentation (0 for free)."""
    out = []
    for i in range(pres.generator_count):
        nz = [v for v in pres.relations[i] if v]
        out.append(abs(nz[0]) if nz else 0)
    return out


def _orient_cokernel(to_new, from_new, orders, nb):
    """Prefer a standard basis vector of K0(B) as each generator's representative,
    with the generator oriented so that it maps to +1."""
    reps = []
    for t in range(len(to_new)):
        rep = None
        for i in range(nb):
            col = [to_new[r][i] for r in range(len(to_new))]
            ok = True
            for r, v in enumerate(col):
                if r == t:
                    continue
                if (orders[r] and v % orders[r]) or (not orders[r] and v):
                    ok = False
                    break
            if not ok:
                continue
            v = col[t]
            d = orders[t]
            if (d and v % d == 1 % d) or (not d and v == 1):
                rep = [1 if k == i else 0 for k in range(nb)]
                break
            if (d and (-v) % d == 1 % d) or (not d and v == -1):
                to_new[t] = [-x for x in to_new[t]]
                rep = [1 if k == i else 0 for k in range(nb)]
                break
        reps.append(rep if rep is not None else list(from_new[t]))
    return to_new, reps


def relative_groups_fd(hom, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
    """K0(phi) = ker phi_*, K1(phi) = coker phi_*, each generator given by a triple."""
    _require_fd(hom)
    k0A, _ = intk.k_groups(hom.source)
    k0B, _ = intk.k_groups(hom.target)
    f = intk.induced_k0(hom, k0A, k0B)
    kpres, inc = intk.kernel(f)
    na, nb = k0A.generator_count, k0B.generator_count
    basis = [[inc.matrix[r][c] for r in range(na)] for c in range(kpres.generator_count)]
    kpres.name = "K0(%s)" % (hom.label or "phi")
    cpres, _ = intk.cokernel(f)
    pres1, to_new, from_new = cpres.normal_form()
    to_new = [list(r) for r in to_new]
    to_new, reps = _orient_cokernel(to_new, from_new, _torsion(pres1), nb)
    pres1.generator_tags = ["loop class %s" % r for r in reps]
    pres1.name = "K1(%s)" % (hom.label or "phi")
    gens0 = [realize_k0(hom, y, tol) for y in basis]
    gens1 = [realize_k1(hom, c, grid) for c in reps]
    kpres.generator_tags = ["[%s] (nu0 = %s)" % (g.note, y) for g, y in zip(gens0, basis)]
    return RelativeGroups(hom, kpres, pres1, basis, to_new, reps, gens0, gens1, f, grid)


# deciding classes


def class_of_k0_triple_fd(sigma, rel):
    _require_fd(sigma.hom)
    return rel.k0_coordinates(nu0(sigma))


def unitary_log_path(u, grid, tol=mc.DEFAULT_TOL):
    """t -> exp(t log u), arraywise, sampled on [0, 1]."""
    t = np.linspace(0.0, 1.0, grid)

    def one(a):
        if a.shape[-1] == 0:
            return np.broadcast_to(a, (grid,) + a.shape).copy()
        h = mc.unitary_log(a, tol)
        w, v = mc.herm_eig(h, tol)
        ph = np.exp(1j * t.reshape((grid,) + (1,) * (w.ndim)) * w[None])
        return (v[None] * ph[..., None, :]) @ mc.dagger(v)[None]

    return SampledElement("interval", arraywise(one, u))


def _to_unitary(sigma):
    """(p, u, g) -> (1, u + 1 - p, g + 1 - phi(p))."""
    p, u, g = sigma.p, sigma.u, sigma.g
    one = p.one()
    if p.dist(one) <= 1e-12:
        return u, g.element
    fp = sigma.hom(p)
    ge = g.element
    fpb = fp.map_arrays(lambda a: np.broadcast_to(a, ge.batch_shape + a.shape[-2:]))
    return u + one - p, ge + fpb.one() - fpb


def _concat_loop(gel, back):
    """g on the first half, the reversed path on the second (first node dropped)."""
    return UnitizedElement(gel.algebra, np.concatenate([gel.scalar, back.scalar[::-1][1:]]),
                           [np.concatenate([x, y[::-1][1:]]) for x, y in zip(gel.blocks, back.blocks)])


def class_of_k1_triple_fd(sigma, rel, cert=None, tol=mc.DEFAULT_TOL):
    """Coordinates in K1(phi) of a unitary-form K1 triple.

    cert (optional) is a path from 1 (or from p) to u over A; without one the
    principal-log path is used, which is legitimate since K1(A) = 0.
    """
    _require_fd(sigma.hom)
    u, gel = _to_unitary(sigma)
    grid = sigma.g.grid[0]
    if cert is None:
        path = unitary_log_path(u, grid, tol)
    else:
        path = cert.path if hasattr(cert, "path") else cert
        pe = path.element
        if sigma.p.dist(sigma.p.one()) > 1e-12 and pe.take(0).dist(sigma.p) <= tol.composite:
            pb = sigma.p.map_arrays(lambda a: np.broadcast_to(a, pe.batch_shape + a.shape[-2:]))
            path = path.with_element(pe + pb.one() - pb)
    pe = path.element
    one = u.one()
    d0, d1 = pe.take(0).dist(one), pe.take(-1).dist(u)
    du = max((pe.H @ pe).dist(pe.one()), (pe @ pe.H).dist(pe.one()))
    if max(d0, d1, du) > tol.composite:
        raise CertificateInvalid("certificate: start %.3g, end %.3g, unitary %.3g" % (d0, d1, du))
    loop = _concat_loop(gel, sigma.hom(pe))
    return rel.k1_coordinates(winding_vector(loop, tol))


# six-term reports


@dataclass
class SixTermReport:
    title: str
    groups: list
    maps: list
    exactness: list
    generators: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def exact(self):
        return all(v["exact"] for v in self.exactness)

    def lines(self):
        out = [self.title]
        for g in self.groups:
            out.append("  %-14s = %s" % (g.name, g.describe()))
        for m in self.maps:
            out.append("  %-6s %s -> %s : %s" % (m.name, m.source.name, m.target.name, m.matrix))
        for v in self.exactness:
            out.append("  at %-14s %s" % (v["node"], "exact" if v["exact"] else "NOT exact: " + v["detail"]))
        out.extend("  note: " + n for n in self.notes)
        return out


def _gmap(src, tgt, cols, name):
    mat = intk.from_columns(cols, tgt.generator_count) if cols else [[] for _ in range(tgt.generator_count)]
    return intk.GroupMap(src, tgt, mat, name)


def _k1_names(alg, label):
    k0, k1 = intk.k_groups(alg)
    k0.name = "K0(%s)" % label
    k1.name = "K1(%s)" % label
    return k0, k1


def six_term_thm1(hom, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
    """K1(B) -> K0(phi) -> K0(A) -> K0(B) -> K1(phi) -> K1(A) -> K1(B) -> ..."""
    rel = relative_groups_fd(hom, grid, tol)
    k0A, k1A = _k1_names(hom.source, "A")
    k0B, k1B = _k1_names(hom.target, "B")
    rel.k0.name, rel.k1.name = "K0(phi)", "K1(phi)"
    nb = k0B.generator_count
    m_mu0 = _gmap(k1B, rel.k0, [], "mu0")
    m_nu0 = _gmap(rel.k0, k0A, [nu0(g) for g in rel.k0_generators], "nu0")
    m_phi0 = intk.GroupMap(k0A, k0B, rel.phi_star.matrix, "phi0")
    cols = []
    for i in range(nb):
        P = UnitizedElement.matrix_unit_projection(hom.target, 1, [1 if k == i else 0 for k in range(nb)])
        Z = UnitizedElement.matrix_unit_projection(hom.target, 1, [0] * nb)
        cols.append(class_of_k1_triple_fd(mu1(P, Z, hom, grid), rel, tol=tol))
    m_mu1 = _gmap(k0B, rel.k1, cols, "mu1")
    m_nu1 = _gmap(rel.k1, k1A, [[] for _ in rel.k1_generators], "nu1")
    m_phi1 = _gmap(k1A, k1B, [], "phi1")
    seq = [m_mu0, m_nu0, m_phi0, m_mu1, m_nu1, m_phi1]
    ex = intk.check_exact(seq, cyclic=True)
    groups = [k1B, rel.k0, k0A, k0B, rel.k1, k1A]
    gens = {"K0(phi)": rel.k0_generators, "K1(phi)": rel.k1_generators}
    return SixTermReport("six-term sequence of %s" % (hom.label or "phi"), groups, seq, ex, gens)


def _push_k0(sigma, a_map, b_map, hom):
    return K0Triple(a_map(sigma.p), a_map(sigma.q), b_map(sigma.v), hom)


def _push_k1(sigma, a_map, b_map, hom):
    return K1Triple(a_map(sigma.p), a_map(sigma.u), sigma.g.with_element(b_map(sigma.g.element)), hom)


def _thm2(ladder, rels, classes, grid, tol, notes=()):
    """Assemble the ladder sequence from relative groups and class functions.

    rels: dict psi/phi/gamma -> RelativeGroups-like objects; classes: dict
    (name, degree) -> function(triple) -> coordinates.
    """
    rp, rf, rg = rels["psi"], rels["phi"], rels["gamma"]
    names = {"psi": "psi", "phi": "phi", "gamma": "gamma"}
    for key, r in rels.items():
        r.k0.name, r.k1.name = "K0(%s)" % names[key], "K1(%s)" % names[key]
    phi, gamma = ladder.phi, ladder.gamma
    i0 = [classes["phi", 0](_push_k0(s, ladder.iota_A, ladder.iota_B, phi)) for s in rp.k0_generators]
    p0 = [classes["gamma", 0](_push_k0(s, ladder.pi_A, ladder.pi_B, gamma)) for s in rf.k0_generators]
    d0 = []
    for s in rg.k0_generators:
        res = exp_map(s, ladder, grid=grid, tol=tol)
        d0.append([res.sign * c for c in classes["psi", 1](res.triple)])
    i1 = [classes["phi", 1](_push_k1(s, ladder.iota_A, ladder.iota_B, phi)) for s in rp.k1_generators]
    p1 = [classes["gamma", 1](_push_k1(s, ladder.pi_A, ladder.pi_B, gamma)) for s in rf.k1_generators]
    d1 = []
    for s in rg.k1_generators:
        res = index_map(s, ladder, tol=tol)
        d1.append([res.sign * c for c in classes["psi", 0](res.triple)])
    seq = [
        _gmap(rp.k0, rf.k0, i0, "iota0"),
        _gmap(rf.k0, rg.k0, p0, "pi0"),
        _gmap(rg.k0, rp.k1, d0, "d0"),
        _gmap(rp.k1, rf.k1, i1, "iota1"),
        _gmap(rf.k1, rg.k1, p1, "pi1"),
        _gmap(rg.k1, rp.k0, d1, "d1"),
    ]
    seq = [intk.GroupMap(m.source, m.target, [[m.target.reduce(c)[r] for c in intk.columns(m.matrix, m.source.generator_count)]
                                              for r in range(m.target.generator_count)], m.name) for m in seq]
    ex = intk.check_exact(seq, cyclic=True)
    groups = [rp.k0, rf.k0, rg.k0, rp.k1, rf.k1, rg.k1]
    gens = {}
    for key, r in rels.items():
        gens["K0(%s)" % key] = r.k0_generators
        gens["K1(%s)" % key] = r.k1_generators
    return SixTermReport("six-term sequence of the ladder %s" % (ladder.label or ""), groups, seq, ex, gens, list(notes))


def six_term_thm2(ladder, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
    """K0(psi) -> K0(phi) -> K0(gamma) -> K1(psi) -> K1(phi) -> K1(gamma) -> ..."""
    if hasattr(ladder, "six_term"):
        return ladder.six_term(grid, tol)
    if not ladder.is_finite_dimensional():
        raise NotComputable("the ladder is not finite-dimensional and no fixture data is known for it")
    problems = ladder.check()
    if problems:
        from .errors import LadderInvalid
        raise LadderInvalid("; ".join(problems))
    rels = {k: relative_groups_fd(getattr(ladder, k), grid, tol) for k in ("psi", "phi", "gamma")}
    classes = {}
    for k, r in rels.items():
        classes[k, 0] = (lambda r: lambda s: class_of_k0_triple_fd(s, r))(r)
        classes[k, 1] = (lambda r: lambda s: class_of_k1_triple_fd(s, r, tol=tol))(r)
    return _thm2(ladder, rels, classes, grid, tol)


# random instances


def random_fd_hom(rng, max_blocks=4, max_size=4):
    na = int(rng.integers(1, max_blocks + 1))
    nb = int(rng.integers(1, max_blocks + 1))
    A = FDAlgebra(tuple(int(x) for x in rng.integers(1, max_size + 1, na)), "A")
    sizes, mult = [], []
    for _ in range(nb):
        m = int(rng.integers(1, max_size + 1))
        row, room = [0] * na, m
        for j in rng.permutation(na):
            k = A.block_sizes[j]
            c = int(rng.integers(0, room // k + 1)) if room >= k else 0
            row[j] = c
            room -= c * k
        sizes.append(m)
        mult.append(row)
    B = FDAlgebra(tuple(sizes), "B")
    us = [_haar(m, rng) if rng.random() < 0.5 else None for m in sizes]
    return Homomorphism.standard(A, B, mult, us, "phi")


def _haar(m, rng):
    z = (rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_ladder(rng, max_blocks=4, max_size=4):
    phi = random_fd_hom(rng, max_blocks, max_size)
    A, B = phi.source, phi.target
    ideal_A = [j for j in range(A.num_blocks) if rng.random() < 0.5]
    need = {i for i, j, _ in phi.pieces if j in ideal_A}
    ideal_B = sorted(need | {i for i in range(B.num_blocks) if rng.random() < 0.4})
    return Ladder.from_ideals(phi, ideal_A, ideal_B, "random")


# function-algebra fixture ladders


class ScalarInclusion(Morphism):
    """The zero algebra into a function algebra: keeps the scalar part."""

    def __init__(self, source, target, label="iota_B"):
        self.source, self.target, self.label = source, target, label

    def apply(self, x):
        grid = tuple(self.target.grid)
        s = x.scalar.reshape(x.batch_shape + (1,) * len(grid) + x.scalar.shape[-2:])
        s = np.broadcast_to(s, x.batch_shape + grid + x.scalar.shape[-2:]).copy()
        return UnitizedElement.scalar_element(self.target.fiber, s)


class _FunctionLadder:
    """Shared plumbing for the sampled ladders; J is the zero algebra and R = B."""

    def is_finite_dimensional(self):
        return False

    def lift_path_to_B(self, path, end=None):
        return path

    def lift_to_B(self, x):
        return x

    def to_ideal_B(self, y, tol=1e-7, what="element"):
        nax = len(self.B.grid) if isinstance(self.B, GridAlgebra) else 0
        for b, k in zip(y.blocks, y.algebra.block_sizes):
            d = mc.defect(b - mc.kron_eye(y.scalar, k))
            if d > tol:
                raise LiftInvalid("%s: not in the ideal J = 0 (defect %.3g)" % (what, d))
        s = y.scalar
        for _ in range(nax):
            s = s[..., 0, :, :]
        return UnitizedElement(self.J, s, [])


class IntervalLadder(_FunctionLadder):
    """C0(R) -> C[0,1] -> C + C over 0 -> M2 -> M2, with evaluation at the endpoints.

    gamma sends (a, b) to diag(a, b).
    """

    def __init__(self, grid=DEFAULT_GRID):
        self.N = grid
        C = FDAlgebra((1,), "C")
        self.A = GridAlgebra(C, "interval", (grid,), "none", "C[0,1]")
        self.I = GridAlgebra(C, "interval", (grid,), "vanishes-at-ends", "C0(R)")
        self.pi_A = Evaluation(self.A, [0, grid - 1], "ev_0,1")
        self.Q = self.pi_A.target
        self.B = FDAlgebra((2,), "M2")
        self.R = self.B
        self.J = FDAlgebra.zero("0")
        self.gamma = Homomorphism.standard(self.Q, self.R, [[1, 1]], label="gamma")
        self.phi = Composite(self.gamma, self.pi_A, "phi")
        self.iota_A = GridIdentity(self.I, self.A, "iota_A")
        self.iota_B = Homomorphism.zero(self.J, self.B, "iota_B")
        self.pi_B = Homomorphism.identity(self.B, "pi_B")
        self.psi = ToZero(self.I, "psi")
        self.label = "interval"

    def x(self):
        return np.linspace(0.0, 1.0, self.N)

    def lift_to_A(self, x):
        """Linear interpolation between the two endpoint values."""
        s = self.x().reshape((self.N, 1, 1))
        b0 = x.blocks[0][..., None, :, :]
        b1 = x.blocks[1][..., None, :, :]
        full = (1 - s) * b0 + s * b1
        sc = np.broadcast_to(x.scalar[..., None, :, :], full.shape).copy()
        return UnitizedElement(self.A.fiber, sc, [full])

    def to_ideal_A(self, y, tol=1e-7, what="element"):
        b = y.blocks[0]
        d = max(mc.defect(b[..., 0, :, :] - y.scalar[..., 0, :, :]),
                mc.defect(b[..., -1, :, :] - y.scalar[..., -1, :, :]))
        if d > tol:
            raise LiftInvalid("%s: not in C0(R) (endpoint defect %.3g)" % (what, d))
        return y

    # K-theory entered by hand: C[0,1] is contractible, C0(R) is the suspension of C

    def groups(self, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
        k0A = intk.free_group(1, ["[1]"], "K0(C[0,1])")
        k0B = intk.free_group(1, ["[e11]"], "K0(M2)")
        f = intk.GroupMap(k0A, k0B, [[2]], "phi_*")
        kp, inc = intk.kernel(f)
        cp, _ = intk.cokernel(f)
        p1, to_new, from_new = cp.normal_form()
        to_new = [list(r) for r in to_new]
        to_new, reps = _orient_cokernel(to_new, from_new, _torsion(p1), 1)
        gens1 = [realize_k1_over(self.phi, self.B, c, grid) for c in reps]
        rf = RelativeGroups(self.phi, kp, p1, [], to_new, reps, [], gens1, f, grid)
        # K(psi) = K(C0(R)): K0 = 0, K1 = Z generated by z = exp(2 pi i x)
        x = self.x()
        u = UnitizedElement(self.I.fiber, np.ones((self.N, 1, 1)), [np.exp(2j * np.pi * x).reshape(self.N, 1, 1)])
        g = SampledElement("interval", UnitizedElement(self.J, np.ones((grid, 1, 1)), []))
        z = K1Triple(unit_over(self.I, 1), u, g, self.psi, "z")
        rp = RelativeGroups(self.psi, intk.free_group(0, [], "K0(psi)"), intk.free_group(1, ["[z]"], "K1(psi)"),
                            [], [[1]], [[1]], [], [z], intk.GroupMap(intk.free_group(0), intk.free_group(0), []), grid)
        rg = relative_groups_fd(self.gamma, grid, tol)
        return {"psi": rp, "phi": rf, "gamma": rg}

    def class_psi_k1(self, sigma, tol=mc.DEFAULT_TOL):
        """Winding of det(u + 1 - p) along the interval, less the scalar contribution."""
        p, u = sigma.p, sigma.u
        w = u + p.one() - p
        b = w.blocks[0]
        if b.ndim != 3:
            raise DomainMismatch("expected a function of x only")
        ends = mc.defect(b[0] - b[-1])
        if ends > tol.composite:
            raise HypothesisViolated("u is not a loop along the interval (defect %.3g)" % ends)
        return [_phase_winding(_dets(b), "det u") - _phase_winding(_dets(w.scalar), "scalar")]

    def class_phi_k1(self, sigma, rel, tol=mc.DEFAULT_TOL):
        """Contract the interval: u_t(x) = u(tx) u(0)^-1 exp(t log u(0)).

        Only the endpoint values enter the loop; u_t(0) = exp(t log u(0)) and
        u_t(1) = u(t) u(0)^-1 exp(t log u(0)).
        """
        u, gel = _to_unitary(sigma)
        n = self.N
        grid = sigma.g.grid[0]
        if grid != n:
            raise DomainMismatch("g must be sampled on the interval grid")
        full = u.blocks[0]
        u0 = full[0]
        c = unitary_log_path(UnitizedElement(FDAlgebra((1,)), u0, [u0]), n, tol).element.scalar
        at1 = full @ np.linalg.inv(u0)[None] @ c
        sc = unitary_log_path(UnitizedElement.scalar_element(FDAlgebra((1,)), u.scalar[0]), n, tol).element.scalar
        endpoint_path = UnitizedElement(self.Q, sc, [c, at1])
        loop = _concat_loop(gel, self.gamma(endpoint_path))
        return rel.k1_coordinates(winding_vector(loop, tol))

    def class_phi_k0(self, sigma, rel):
        y = nu0_at(sigma, 0)
        return rel.k0_coordinates(y)

    def six_term(self, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
        rels = self.groups(grid, tol)
        rg = rels["gamma"]
        classes = {
            ("psi", 0): lambda s: [],
            ("psi", 1): lambda s: self.class_psi_k1(s, tol),
            ("phi", 0): lambda s: self.class_phi_k0(s, rels["phi"]),
            ("phi", 1): lambda s: self.class_phi_k1(s, rels["phi"], tol),
            ("gamma", 0): lambda s: class_of_k0_triple_fd(s, rg),
            ("gamma", 1): lambda s: class_of_k1_triple_fd(s, rg, tol=tol),
        }
        notes = ["K(C[0,1]) and K(C0(R)) are entered by hand; the maps are computed on generators"]
        return _thm2(self, rels, classes, grid, tol, notes)


def nu0_at(sigma, node):
    """nu0 of a triple over a one-axis function algebra, read at one grid node."""
    p, q = sigma.p, sigma.q

    def coords(x):
        sc = float(np.trace(x.scalar[node]).real)
        return [int(round(float(np.trace(b[node]).real) - k * sc)) for b, k in zip(x.blocks, x.algebra.block_sizes)]

    return [a - b for a, b in zip(coords(p), coords(q))]


def realize_k1_over(hom, B, c, grid=DEFAULT_GRID):
    pos = [max(v, 0) for v in c]
    neg = [max(-v, 0) for v in c]
    n = _level_for([pos, neg], B.block_sizes)
    P = UnitizedElement.matrix_unit_projection(B, n, pos)
    Q = UnitizedElement.matrix_unit_projection(B, n, neg)
    out = mu1(P, Q, hom, grid)
    out.note = "generator %s" % list(c)
    return out


class DiskLadder(_FunctionLadder):
    """C0(R^2) -> C(D) -> C(S^1) over 0 -> C[0,1] -> C[0,1].

    The disk is sampled on a polar grid (radius on axis 0, angle on axis 1);
    the circle is the angle parameter and C(S^1) sits in C[0,1] as the
    functions with equal endpoint values.
    """

    def __init__(self, grid=DEFAULT_GRID):
        self.N = grid
        C = FDAlgebra((1,), "C")
        self.A = GridAlgebra(C, "square", (grid, grid), "none", "C(D)")
        self.I = GridAlgebra(C, "square", (grid, grid), "vanishes-on-boundary", "C0(R^2)")
        self.Q = GridAlgebra(C, "circle", (grid,), "endpoints-equal", "C(S^1)")
        self.B = GridAlgebra(C, "interval", (grid,), "none", "C[0,1]")
        self.R = self.B
        self.J = FDAlgebra.zero("0")
        self.pi_A = GridRestriction(self.A, self.Q, 0, -1, "restriction to the circle")
        self.gamma = GridIdentity(self.Q, self.R, "gamma")
        self.phi = Composite(self.gamma, self.pi_A, "phi")
        self.iota_A = GridIdentity(self.I, self.A, "iota_A")
        self.iota_B = ScalarInclusion(self.J, self.B)
        self.pi_B = GridIdentity(self.B, self.R, "pi_B")
        self.psi = ToZero(self.I, "psi")
        self.label = "disk"

    def polar(self):
        r = np.linspace(0.0, 1.0, self.N)[:, None]
        th = np.linspace(0.0, 1.0, self.N)[None, :]
        return r * np.exp(2j * np.pi * th)

    def lift_to_A(self, x):
        """Radial extension from the scalar part at the centre."""
        r = np.linspace(0.0, 1.0, self.N).reshape((self.N, 1, 1, 1))
        blocks = []
        for b, k in zip(x.blocks, x.algebra.block_sizes):
            base = mc.kron_eye(x.scalar, k)
            blocks.append((1 - r) * base[..., None, :, :, :] + r * b[..., None, :, :, :])
        sc = np.broadcast_to(x.scalar[..., None, :, :, :], blocks[0].shape[:-2] + x.scalar.shape[-2:]).copy()
        return UnitizedElement(x.algebra, sc, blocks)

    def to_ideal_A(self, y, tol=1e-7, what="element"):
        for b, k in zip(y.blocks, y.algebra.block_sizes):
            d = mc.defect(b[..., -1, :, :, :] - mc.kron_eye(y.scalar[..., -1, :, :, :], k))
            if d > tol:
                raise LiftInvalid("%s: not in C0(R^2) (boundary defect %.3g)" % (what, d))
        return y

    def input_triple(self):
        """(1, z, g) over gamma with g(t)(s) = exp(2 pi i s t)."""
        n = self.N
        s = np.linspace(0.0, 1.0, n)
        fib = self.Q.fiber
        z = np.exp(2j * np.pi * s).reshape(n, 1, 1)
        u = UnitizedElement(fib, np.ones((n, 1, 1)), [z])
        g = np.exp(2j * np.pi * np.outer(s, s)).reshape(n, n, 1, 1)
        gel = UnitizedElement(fib, np.ones((n, n, 1, 1)), [g])
        return K1Triple(unit_over(self.Q, 1), u, SampledElement("interval", gel), self.gamma, "(1, z, g)")

    def lift_w(self):
        """[[z, -sqrt(1-|z|^2)], [sqrt(1-|z|^2), conj z]] over the disk, scalar part 1."""
        z = self.polar()
        c = np.sqrt(np.clip(1 - np.abs(z) ** 2, 0.0, None))
        w = np.empty(z.shape + (2, 2), dtype=complex)
        w[..., 0, 0], w[..., 0, 1] = z, -c
        w[..., 1, 0], w[..., 1, 1] = c, np.conj(z)
        sc = np.broadcast_to(np.eye(2, dtype=complex), z.shape + (2, 2)).copy()
        return UnitizedElement(self.A.fiber, sc, [w])

    def expected_projection(self):
        """[[|z|^2, z sqrt(1-|z|^2)], [conj z sqrt(1-|z|^2), 1-|z|^2]]."""
        z = self.polar()
        c = np.sqrt(np.clip(1 - np.abs(z) ** 2, 0.0, None))
        out = np.empty(z.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = np.abs(z) ** 2
        out[..., 0, 1] = z * c
        out[..., 1, 0] = np.conj(z) * c
        out[..., 1, 1] = 1 - np.abs(z) ** 2
        return out

    def boundary(self, tol=mc.DEFAULT_TOL):
        """Index map on (1, z, g) with the displayed lift, l = 1 and h = g."""
        sigma = self.input_triple()
        res = index_map(sigma, self, l=1, w=self.lift_w(), h=sigma.g, tol=tol)
        got = res.detail["p_over_A"].blocks[0]
        res.detail["expected_defect"] = float(np.max(np.abs(got - self.expected_projection())))
        return res

    def six_term(self, grid=DEFAULT_GRID, tol=mc.DEFAULT_TOL):
        raise NotComputable("K-theory of the disk ladder is not computed; only the index-map output is checked")


# fixtures


@dataclass
class Fixture:
    name: str
    title: str
    hom: object = None
    ladder: object = None
    triples: dict = field(default_factory=dict)
    expected: dict = field(default_factory=dict)
    note: str = ""


def _ex26():
    A = FDAlgebra((1, 1), "C + C")
    B = FDAlgebra((2,), "M2")
    phi = Homomorphism.standard(A, B, [[1, 1]], label="diag")
    p = UnitizedElement(A, np.zeros((1, 1)), [np.zeros((1, 1)), np.ones((1, 1))])
    q = UnitizedElement(A, np.zeros((1, 1)), [np.ones((1, 1)), np.zeros((1, 1))])
    v = UnitizedElement(B, np.zeros((1, 1)), [np.array([[0, 1], [0, 0]])])
    return phi, K0Triple(p, q, v, phi, "(v*v, vv*, v)")


def _ex27(grid):
    A = FDAlgebra((1,), "C")
    B = FDAlgebra((1, 1), "C + C")
    phi = Homomorphism.standard(A, B, [[1], [1]], label="diagonal")
    p = UnitizedElement(A, np.zeros((1, 1)), [np.ones((1, 1))])
    s = np.linspace(0.0, 1.0, grid)
    g = UnitizedElement(B, np.zeros((grid, 1, 1)), [np.exp(2j * np.pi * s).reshape(grid, 1, 1), np.ones((grid, 1, 1))])
    return phi, K1Triple(p, p, SampledElement("interval", g, "endpoints-equal"), phi, "(p, p, g)")


def fixtures(grid=DEFAULT_GRID):
    out = []
    M2 = FDAlgebra((2,), "M2")
    Z = FDAlgebra.zero("0")
    out.append(Fixture("ex2_5_i", "B with vanishing K-theory: K(phi) = K(A)",
                       hom=Homomorphism.zero(M2, Z, "to 0"), expected={"K0": "Z", "K1": "0"}))
    out.append(Fixture("ex2_5_ii", "A with vanishing K-theory: K_j(phi) = K_{j+1}(B)",
                       hom=Homomorphism.zero(Z, M2, "from 0"), expected={"K0": "0", "K1": "Z"}))
    CM = FDAlgebra((1, 2), "C + M2")
    quo = Homomorphism(CM, M2, [(0, 1, np.eye(2))], "quotient")
    out.append(Fixture("ex2_5_iii", "quotient map: K(phi) = K(I), finite-dimensional instance",
                       hom=quo, expected={"K0": "Z", "K1": "0"},
                       note="the general excision statement is a reference, not a tested claim"))
    C = FDAlgebra((1,), "C")
    inc = Homomorphism(C, CM, [(0, 0, np.eye(1))], "inclusion")
    out.append(Fixture("ex2_5_iv", "ideal inclusion: K_j(phi) = K_{j+1}(A/I), finite-dimensional instance",
                       hom=inc, expected={"K0": "0", "K1": "Z"},
                       note="the general statement is a reference, not a tested claim"))
    phi, t = _ex26()
    out.append(Fixture("ex2_6", "C + C -> M2 diagonal", hom=phi, triples={"generator": t},
                       expected={"K0": "Z", "K1": "0", "generator_class": [1]}))
    phi, t = _ex27(grid)
    out.append(Fixture("ex2_7", "C -> C + C diagonal", hom=phi, triples={"generator": t},
                       expected={"K0": "0", "K1": "Z", "generator_class": [1]},
                       note="the generator has zero scalar part"))
    disk = DiskLadder(grid)
    out.append(Fixture("ex2_8", "disk ladder, index map", ladder=disk, triples={"input": disk.input_triple()},
                       expected={"max_defect": 1e-6},
                       note="that the input generates K1 of the circle map is recorded, not machine-decided"))
    lad = IntervalLadder(grid)
    g_phi, t26 = _ex26()
    gen = K0Triple(t26.p.map_arrays(lambda a: a), t26.q, t26.v, lad.gamma, "(e22, e11, e12)")
    P = UnitizedElement.matrix_unit_projection(lad.B, 1, [1])
    Zp = UnitizedElement.matrix_unit_projection(lad.B, 1, [0])
    one_one_g = mu1(P, Zp, lad.phi, grid)
    one_one_g.note = "(1, 1, g)"
    out.append(Fixture("ex2_9", "interval ladder", ladder=lad,
                       triples={"exp_input": gen, "nontrivial": one_one_g},
                       expected={"K1(phi)": "Z/2", "exp_class": [-2], "nontrivial_class": [1]}))
    return out


def fixture(name, grid=DEFAULT_GRID):
    for f in fixtures(grid):
        if f.name == name:
            return f
    raise KeyError(name)
