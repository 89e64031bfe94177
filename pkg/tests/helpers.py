"""Random instances shared by the test modules."""

import numpy as np

from relk import engine
from relk.algmodel import Homomorphism, UnitizedElement
from relk.triples import K0Triple, RawK0Triple


def haar(m, rng):
    z = (rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_invertible(m, rng):
    while True:
        s = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        if np.linalg.cond(s) < 50:
            return s


def skew_idempotent(rank, m, rng):
    """S diag(1..1, 0..0) S^-1 with a random well-conditioned S."""
    s = random_invertible(m, rng) if m else np.zeros((0, 0))
    d = np.diag([1.0] * rank + [0.0] * (m - rank))
    return s @ d @ np.linalg.inv(s) if m else d.astype(complex)


def idempotent_like(p, rng):
    """An idempotent with the same rank as p in every array."""
    ranks = [int(round(np.trace(a).real)) for a in p.arrays()]
    arrs = [skew_idempotent(r, a.shape[-1], rng) for r, a in zip(ranks, p.arrays())]
    return UnitizedElement(p.algebra, arrs[0], arrs[1:])


def kernel_pair(hom, rng, n_extra=1):
    """Projections P, Q over A with phi(P), phi(Q) of equal ranks and a random
    kernel class, plus nonzero scalar parts of equal rank."""
    rel = engine.relative_groups_fd(hom)
    A = hom.source
    y = [0] * A.num_blocks
    for b in rel.k0_basis:
        c = int(rng.integers(-2, 3))
        y = [a + c * x for a, x in zip(y, b)]
    base = [int(rng.integers(0, 2)) * k for k in A.block_sizes]
    pr = [b + max(v, 0) for b, v in zip(base, y)]
    qr = [b + max(-v, 0) for b, v in zip(base, y)]
    n = max([1] + [-(-r // k) for r, k in zip(pr + qr, A.block_sizes + A.block_sizes)]) + n_extra
    k = int(rng.integers(0, n + 1))
    sc = np.diag([1.0] * k + [0.0] * (n - k)).astype(complex)

    def proj(ranks):
        blocks = []
        for r, size in zip(ranks, A.block_sizes):
            m = n * size
            # scalar part sc (x) 1 plus r more dimensions on the complement
            full = np.kron(sc, np.eye(size))
            free = np.where(np.diag(full).real < 0.5)[0]
            extra = min(r, len(free))
            d = np.diag(full).copy()
            d[free[:extra]] = 1
            u = haar(m, rng)
            blocks.append(u @ np.diag(d) @ u.conj().T)
        return UnitizedElement(A, sc, blocks)

    return proj(pr), proj(qr)


def partial_isometry(hom, p, q, rng, tol=None):
    """v with v*v = phi(p), vv* = phi(q), random inside that freedom."""
    from relk import matcore as mc

    fp, fq = hom(p), hom(q)
    arrs = []
    for a, b in zip(fp.arrays(), fq.arrays()):
        vp, vq = mc.range_basis(a), mc.range_basis(b)
        k = vp.shape[-1]
        if vq.shape[-1] != k:
            raise ValueError("rank mismatch")
        arrs.append(vq @ haar(k, rng) @ vp.conj().T if k else np.zeros_like(a))
    return UnitizedElement(hom.target, arrs[0], arrs[1:])


def random_k0_triple(rng, hom=None):
    hom = hom or engine.random_fd_hom(rng, 3, 3)
    while True:
        try:
            p, q = kernel_pair(hom, rng)
            v = partial_isometry(hom, p, q, rng)
            return K0Triple(p, q, v, hom)
        except ValueError:
            continue


def random_raw_k0_triple(rng, hom=None):
    """Idempotents e, f with b = phi(f) X phi(e) for a random invertible X."""
    s = random_k0_triple(rng, hom)
    hom = s.hom
    e, f = idempotent_like(s.p, rng), idempotent_like(s.q, rng)
    fe, ff = hom(e), hom(f)
    arrs = [y @ random_invertible(a.shape[-1], rng) @ x if a.shape[-1] else a
            for x, y, a in zip(fe.arrays(), ff.arrays(), fe.arrays())]
    b = UnitizedElement(hom.target, arrs[0], arrs[1:])
    return RawK0Triple(e, f, b, hom), s


def zero_hom(rng):
    phi = engine.random_fd_hom(rng, 3, 3)
    return Homomorphism.zero(phi.source, phi.target)
