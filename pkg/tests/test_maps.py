import numpy as np
import pytest

from relk import engine
from relk import matcore as mc
from relk.algmodel import FDAlgebra, Homomorphism, UnitizedElement, constant_path
from relk.errors import LiftInvalid, NotProjection, NotUnitary, NotZeroHom
from relk.maps import (
    bott,
    cone_delta0,
    cone_delta1,
    doubling_unitary,
    exp_map,
    index_map,
    k0_coordinates,
    lambda0,
    lambda1,
    mu0,
    mu1,
    nu0,
    nu1,
    p_v_path,
    theta,
)
from relk.triples import K0Triple, K1Triple, normalize_k0, validate
from helpers import haar, random_k0_triple, zero_hom

LOOSE = mc.Tolerance(1e-7, 1e-7)


def _ex26():
    return engine.fixture("ex2_6").triples["generator"]


def _random_unitary_over(alg, n, rng):
    blocks = [haar(n * k, rng) for k in alg.block_sizes]
    return UnitizedElement(alg, haar(n, rng), blocks)


def _is_projection_path(x, eps=1e-7):
    return all(mc.defect(a @ a - a) <= eps and mc.defect(a - mc.dagger(a)) <= eps for a in x.arrays())


def test_mu0_nu0_vanishes(rng):
    for _ in range(10):
        phi = engine.random_fd_hom(rng, 3, 3)
        u = _random_unitary_over(phi.target, 2, rng)
        t = mu0(u, phi)
        assert validate(t).ok
        assert nu0(t) == [0] * phi.source.num_blocks


def test_mu0_rejects_nonunitary():
    phi = engine.fixture("ex2_6").hom
    u = UnitizedElement.identity(phi.target, 1) * 2
    with pytest.raises(NotUnitary):
        mu0(u, phi)


def test_nu0_lands_in_kernel(rng):
    for _ in range(20):
        s = random_k0_triple(rng)
        m = np.array(s.hom.multiplicity_matrix(), dtype=int).reshape(s.hom.target.num_blocks, -1)
        assert not np.any(m @ np.array(nu0(s), dtype=int))


def test_nu0_example_generator():
    assert nu0(_ex26()) == [-1, 1]


def test_mu1_projection_loop_winds_once():
    M2 = FDAlgebra((2,))
    phi = Homomorphism.identity(M2)
    p = UnitizedElement.scalar_element(M2, np.diag([1.0, 0.0]))
    q = UnitizedElement.zero(M2, 2)
    t = mu1(p, q, phi, grid=129)
    assert validate(t).ok
    dets = np.linalg.det(t.g.element.scalar)
    turns = np.sum(np.angle(dets[1:] / dets[:-1])) / (2 * np.pi)
    assert round(turns) == 1 and abs(turns - 1) < 1e-9
    with pytest.raises(NotProjection):
        mu1(p * 2, q, phi)


def test_mu1_equal_projections_constant():
    M2 = FDAlgebra((2,))
    p = UnitizedElement.scalar_element(M2, np.diag([1.0, 0.0]))
    t = mu1(p, p, Homomorphism.identity(M2), grid=33)
    assert t.g.element.dist(t.g.element.one()) < 1e-12


def test_nu1_cases(rng):
    t = engine.fixture("ex2_7").triples["generator"]
    assert nu1(t).dist(t.u.one()) < 1e-15
    phi = engine.random_fd_hom(rng, 2, 2)
    u = _random_unitary_over(phi.source, 1, rng)
    one = UnitizedElement.identity(phi.source, 1)
    sigma = K1Triple(one, u, constant_path(phi(one), 5), phi)
    assert nu1(sigma).dist(u) < 1e-15


def test_splitting_k0(rng):
    for _ in range(10):
        phi = zero_hom(rng)
        A = phi.source
        n = 3
        k = int(rng.integers(0, n + 1))
        sc = np.diag([1.0] * k + [0.0] * (n - k))
        ranks_p = [int(rng.integers(0, n * s + 1)) for s in A.block_sizes]
        ranks_q = [int(rng.integers(0, n * s + 1)) for s in A.block_sizes]

        def proj(ranks):
            bl = []
            for r, s in zip(ranks, A.block_sizes):
                u = haar(n * s, rng)
                bl.append(u @ np.diag([1.0] * r + [0.0] * (n * s - r)) @ u.conj().T)
            return UnitizedElement(A, sc, bl)

        p, q = proj(ranks_p), proj(ranks_q)
        t = lambda0(p, q, phi)
        assert validate(t).ok
        want = [a - b for a, b in zip(k0_coordinates(p), k0_coordinates(q))]
        assert nu0(t) == want


def test_splitting_k1(rng):
    phi = zero_hom(rng)
    u = _random_unitary_over(phi.source, 2, rng)
    t = lambda1(u, phi, grid=129)
    assert validate(t).ok
    assert nu1(t).dist(u) < 1e-15


def test_splitting_needs_zero_hom():
    phi = engine.fixture("ex2_6").hom
    one = UnitizedElement.identity(phi.source, 1)
    with pytest.raises(NotZeroHom):
        lambda0(one, one, phi)


def test_doubling_unitary_special_cases():
    M2 = FDAlgebra((2,))
    one = UnitizedElement.identity(M2, 1)
    assert doubling_unitary(one).dist(one.direct_sum(one)) < 1e-15
    z = doubling_unitary(one * 0)
    swap = np.array([[0, 1], [1, 0]])
    assert np.allclose(z.scalar, swap)
    shift = UnitizedElement(M2, np.zeros((1, 1)), [np.array([[0, 1], [0, 0]])])
    w = doubling_unitary(shift)
    assert all(mc.classify(a, mc.Tolerance(1e-12, 1e-12)).unitary for a in w.arrays())


def test_p_v_endpoints(rng):
    for _ in range(10):
        s, _ = normalize_k0(random_k0_triple(rng))
        pv = p_v_path(s, grid=65)
        n, m = pv.n, pv.m
        start = s.hom(s.q).pad_to(2 * m)
        assert pv.path.first().dist(start) <= 1e-7
        assert pv.path.last().dist(s.hom(s.p).pad_to(2 * m)) <= 1e-7
        assert _is_projection_path(pv.path.element)
        assert n == int(round(np.trace(s.q.scalar).real))


def test_p_v_trivial_input_constant_ends():
    C = FDAlgebra((1,))
    phi = Homomorphism.identity(C)
    one = UnitizedElement.identity(C, 1)
    pv = p_v_path(K0Triple(one, one, one, phi), grid=33)
    e = one.pad_to(2)
    assert pv.path.first().dist(e) < 1e-12 and pv.path.last().dist(e) < 1e-12
    assert _is_projection_path(pv.path.element)


def test_bott_loops_based():
    for s in (_ex26(), None):
        if s is None:
            C = FDAlgebra((1,))
            one = UnitizedElement.identity(C, 1)
            s = K0Triple(one, one, one, Homomorphism.identity(C))
        t = bott(s, grid=65)
        g = t.g.element
        one = g.one()
        assert g.take((slice(None), 0)).dist(one.take((slice(None), 0))) == 0
        assert g.take((slice(None), -1)).dist(one.take((slice(None), 0))) <= 1e-10
        assert t.u.take(0).dist(t.u.one().take(0)) <= 1e-10
        assert t.u.take(-1).dist(t.u.one().take(0)) <= 1e-10


def test_bott_trivial_cancels():
    C = FDAlgebra((1,))
    one = UnitizedElement.identity(C, 1)
    t = bott(K0Triple(one, one, one, Homomorphism.identity(C)), grid=33)
    assert t.u.dist(t.u.one()) < 1e-12


def test_theta_first_entry_projections():
    for name in ("ex2_7", "ex2_9"):
        fx = engine.fixture(name)
        sigma = fx.triples["generator" if name == "ex2_7" else "nontrivial"]
        if not np.allclose(sigma.p.scalar, np.eye(sigma.p.level)):
            continue
        out, w = theta(sigma)
        assert _is_projection_path(out.p)
        assert validate(out, LOOSE).ok


def test_theta_on_normalized_generator():
    from relk.triples import normalize_k1

    s, _ = normalize_k1(engine.fixture("ex2_7").triples["generator"])
    out, w = theta(s)
    assert _is_projection_path(out.p)
    assert validate(out, LOOSE).ok


def test_index_map_trivial_input(rng):
    for _ in range(5):
        lad = engine.random_ladder(rng, 3, 3)
        one = UnitizedElement.identity(lad.Q, 1)
        sigma = K1Triple(one, one, constant_path(lad.gamma(one), 17), lad.gamma)
        res = index_map(sigma, lad)
        assert validate(res.triple, LOOSE).ok
        rel = engine.relative_groups_fd(lad.psi)
        assert not any(engine.class_of_k0_triple_fd(res.triple, rel))


def test_exp_map_trivial_input(rng):
    for _ in range(5):
        lad = engine.random_ladder(rng, 3, 3)
        one = UnitizedElement.identity(lad.Q, 1)
        sigma = K0Triple(one, one, lad.gamma(one), lad.gamma)
        res = exp_map(sigma, lad, grid=33)
        assert res.sign == -1
        assert validate(res.triple, LOOSE).ok
        assert res.triple.u.dist(res.triple.u.one()) < 1e-9


def test_exp_map_rejects_bad_lift(rng):
    lad = engine.random_ladder(rng, 3, 3)
    one = UnitizedElement.identity(lad.Q, 1)
    sigma = K0Triple(one, one, lad.gamma(one), lad.gamma)
    bad = UnitizedElement.identity(lad.A, 1) * 3
    with pytest.raises(LiftInvalid):
        exp_map(sigma, lad, a=bad, grid=17)


def test_exp_map_interval_generator():
    lad = engine.fixture("ex2_9").ladder
    sigma = engine.fixture("ex2_9").triples["exp_input"]
    res = exp_map(sigma, lad)
    assert res.sign * lad.class_psi_k1(res.triple)[0] == -2


def test_cone_maps():
    s = _ex26()
    cone, n = cone_delta0(s, grid=65)
    norm, _ = normalize_k0(s)
    pv = p_v_path(norm, grid=65)
    assert cone.f.element.dist(pv.path.element) < 1e-12
    assert n == pv.n
    t = engine.fixture("ex2_7").triples["generator"]
    from relk.triples import normalize_k1

    t, _ = normalize_k1(t)
    c = cone_delta1(t)
    assert c.a is t.u and c.f is t.g


def test_cone_delta0_trivial_offset():
    C = FDAlgebra((1,))
    one = UnitizedElement.identity(C, 1)
    cone, n = cone_delta0(K0Triple(one, one, one, Homomorphism.identity(C)), grid=17)
    assert n == 1
    assert cone.f.first().dist(cone.f.last()) < 1e-12


def test_cone_delta1_rejects_invalid():
    t = engine.fixture("ex2_7").triples["generator"]
    broken = K1Triple(t.p, t.u * 2, t.g, t.hom)
    with pytest.raises(LiftInvalid):
        cone_delta1(broken)
