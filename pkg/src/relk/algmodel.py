"""Algebras, unitized elements, homomorphisms, sampled functions, cones, ladders.

A finite-dimensional algebra is a list of block sizes n_1..n_k.  An element
lam*1 + a of M_n of its unitization is stored as the scalar matrix lam
(n x n) together with the full blocks lam (x) 1_{n_i} + a_i, so products and
adjoints are computed blockwise.  All arrays may carry leading batch axes;
function algebras use those axes as their sample grid.
"""

from dataclasses import dataclass, field

import numpy as np

from . import matcore as mc
from .errors import AlgebraMismatch, DomainMismatch, EndpointMismatch, LadderInvalid, LiftInvalid

DOMAINS = ("interval", "circle", "square")
BOUNDARIES = ("none", "endpoints-equal", "vanishes-at-ends", "vanishes-on-boundary")
DEFAULT_GRID = 257
MAX_STEP = 0.2


@dataclass(frozen=True)
class FDAlgebra:
    block_sizes: tuple
    label: str = ""

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        if any(s < 1 for s in sizes):
            raise ValueError("block sizes must be positive")
        object.__setattr__(self, "block_sizes", sizes)

    @classmethod
    def zero(cls, label="0"):
        return cls((), label)

    @property
    def num_blocks(self):
        return len(self.block_sizes)

    def same_as(self, other):
        return isinstance(other, FDAlgebra) and self.block_sizes == other.block_sizes

    def __str__(self):
        if not self.block_sizes:
            return "0"
        return " + ".join("M%d" % s if s > 1 else "C" for s in self.block_sizes)


class UnitizedElement:
    """Element of M_n of the unitization, stored as scalar part plus full blocks."""

    __slots__ = ("algebra", "scalar", "blocks")

    def __init__(self, algebra, scalar, blocks):
        scalar = np.asarray(scalar, dtype=complex)
        blocks = [np.asarray(b, dtype=complex) for b in blocks]
        if len(blocks) != algebra.num_blocks:
            raise AlgebraMismatch("expected %d blocks, got %d" % (algebra.num_blocks, len(blocks)))
        n = scalar.shape[-1]
        if scalar.ndim < 2 or scalar.shape[-2] != n:
            raise ValueError("scalar part must be square")
        batch = np.broadcast_shapes(scalar.shape[:-2], *[b.shape[:-2] for b in blocks])
        for b, k in zip(blocks, algebra.block_sizes):
            if b.shape[-2:] != (n * k, n * k):
                raise ValueError("block of shape %s does not match level %d, size %d" % (b.shape, n, k))
        self.algebra = algebra
        self.scalar = np.broadcast_to(scalar, batch + (n, n)).copy() if scalar.shape[:-2] != batch else scalar
        self.blocks = tuple(
            b if b.shape[:-2] == batch else np.broadcast_to(b, batch + b.shape[-2:]).copy() for b in blocks
        )

    # construction

    @classmethod
    def from_body(cls, algebra, scalar, body):
        scalar = np.asarray(scalar, dtype=complex)
        return cls(algebra, scalar, [np.asarray(b) + mc.kron_eye(scalar, k) for b, k in zip(body, algebra.block_sizes)])

    @classmethod
    def scalar_element(cls, algebra, lam):
        lam = np.asarray(lam, dtype=complex)
        return cls(algebra, lam, [mc.kron_eye(lam, k) for k in algebra.block_sizes])

    @classmethod
    def identity(cls, algebra, n, batch=()):
        return cls.scalar_element(algebra, np.broadcast_to(np.eye(n, dtype=complex), batch + (n, n)))

    @classmethod
    def zero(cls, algebra, n, batch=()):
        return cls.scalar_element(algebra, np.zeros(batch + (n, n), dtype=complex))

    @classmethod
    def matrix_unit_projection(cls, algebra, n, ranks):
        """Projection in M_n(A) whose block i is diag(1,..,1,0,..) of rank ranks[i]."""
        blocks = []
        for r, k in zip(ranks, algebra.block_sizes):
            if not 0 <= r <= n * k:
                raise ValueError("rank %d does not fit at level %d in a block of size %d" % (r, n, k))
            blocks.append(np.diag([1.0] * r + [0.0] * (n * k - r)).astype(complex))
        return cls(algebra, np.zeros((n, n)), blocks)

    # structure

    @property
    def level(self):
        return self.scalar.shape[-1]

    @property
    def batch_shape(self):
        return self.scalar.shape[:-2]

    @property
    def body(self):
        return tuple(b - mc.kron_eye(self.scalar, k) for b, k in zip(self.blocks, self.algebra.block_sizes))

    def arrays(self):
        return (self.scalar,) + self.blocks

    def map_arrays(self, fn):
        return UnitizedElement(self.algebra, fn(self.scalar), [fn(b) for b in self.blocks])

    def dot(self):
        """The scalar part as an element."""
        return UnitizedElement.scalar_element(self.algebra, self.scalar)

    def _check(self, other):
        if not isinstance(other, UnitizedElement):
            raise TypeError("expected UnitizedElement")
        if not self.algebra.same_as(other.algebra):
            raise AlgebraMismatch("%s vs %s" % (self.algebra, other.algebra))
        if self.level != other.level:
            raise AlgebraMismatch("level %d vs %d" % (self.level, other.level))

    def __add__(self, other):
        self._check(other)
        return UnitizedElement(self.algebra, self.scalar + other.scalar, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return UnitizedElement(self.algebra, self.scalar - other.scalar, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return self.map_arrays(lambda a: -a)

    def __mul__(self, c):
        c = np.asarray(c)
        if c.ndim:
            # a coefficient array indexes the leading batch axes
            c = c.reshape(c.shape + (1,) * (len(self.batch_shape) - c.ndim + 2))
        return self.map_arrays(lambda a: c * a)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return UnitizedElement(self.algebra, self.scalar @ other.scalar, [a @ b for a, b in zip(self.blocks, other.blocks)])

    @property
    def H(self):
        return self.map_arrays(mc.dagger)

    def one(self):
        return UnitizedElement.identity(self.algebra, self.level, self.batch_shape)

    def direct_sum(self, other):
        if not self.algebra.same_as(other.algebra):
            raise AlgebraMismatch("%s vs %s" % (self.algebra, other.algebra))
        batch = np.broadcast_shapes(self.batch_shape, other.batch_shape)

        def bd(x, y):
            x = np.broadcast_to(x, batch + x.shape[-2:])
            y = np.broadcast_to(y, batch + y.shape[-2:])
            out = np.zeros(batch + (x.shape[-1] + y.shape[-1],) * 2, dtype=complex)
            out[..., : x.shape[-1], : x.shape[-1]] = x
            out[..., x.shape[-1]:, x.shape[-1]:] = y
            return out

        return UnitizedElement(self.algebra, bd(self.scalar, other.scalar), [bd(x, y) for x, y in zip(self.blocks, other.blocks)])

    def amplify(self, k):
        """self (+) 0_k."""
        return self.direct_sum(UnitizedElement.zero(self.algebra, k))

    def pad_to(self, level):
        if level < self.level:
            raise ValueError("cannot pad down")
        return self if level == self.level else self.amplify(level - self.level)

    def dist(self, other):
        self._check(other)
        return max(mc.defect(a - b) for a, b in zip(self.arrays(), other.arrays()))

    def size(self):
        return max(mc.defect(a) for a in self.arrays())

    def take(self, index):
        """Index the batch axes."""
        return self.map_arrays(lambda a: a[index])

    def classify(self, tol=mc.DEFAULT_TOL):
        flags = [mc.classify(a, tol) for a in self.arrays()]
        return mc.Flags(*[all(getattr(f, name) for f in flags) for name in mc.Flags.__dataclass_fields__])

    def __repr__(self):
        return "UnitizedElement(%s, level=%d, batch=%s)" % (self.algebra, self.level, self.batch_shape)


def block2(a, b, c, d):
    """[[a, b], [c, d]] for elements of a common level.

    Full blocks are ordered level-major, so the split on the level index is a
    plain 2x2 block split of every array.
    """
    for x in (b, c, d):
        a._check(x)

    def asm(p, q, r, s):
        batch = np.broadcast_shapes(p.shape[:-2], q.shape[:-2], r.shape[:-2], s.shape[:-2])
        m = p.shape[-1]
        out = np.zeros(batch + (2 * m, 2 * m), dtype=complex)
        out[..., :m, :m] = p
        out[..., :m, m:] = q
        out[..., m:, :m] = r
        out[..., m:, m:] = s
        return out

    arrays = [asm(*(x.arrays()[i] for x in (a, b, c, d))) for i in range(len(a.arrays()))]
    return UnitizedElement(a.algebra, arrays[0], arrays[1:])


def scalar_matrix_element(algebra, lam):
    return UnitizedElement.scalar_element(algebra, lam)


# homomorphisms


class Morphism:
    """Common interface: source, target, label and apply()."""

    source = None
    target = None
    label = ""

    def apply(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.apply(x)

    def then(self, other):
        return Composite(other, self)


class Composite(Morphism):
    def __init__(self, outer, inner, label=""):
        self.outer = outer
        self.inner = inner
        self.source = inner.source
        self.target = outer.target
        self.label = label or "%s o %s" % (outer.label, inner.label)

    def apply(self, x):
        return self.outer.apply(self.inner.apply(x))


def source_fiber(alg):
    return alg.fiber if isinstance(alg, GridAlgebra) else alg


class Homomorphism(Morphism):
    """*-homomorphism between finite-dimensional algebras.

    pieces is a list of (target block i, source block j, isometry E) and the
    image of a in block i is the sum of E a_j E* over the pieces landing there.
    """

    def __init__(self, source, target, pieces, label=""):
        self.source = source
        self.target = target
        self.label = label
        self.pieces = []
        used = {}
        for i, j, e in pieces:
            e = np.asarray(e, dtype=complex)
            if e.shape != (target.block_sizes[i], source.block_sizes[j]):
                raise ValueError("isometry shape %s does not fit block %d <- %d" % (e.shape, i, j))
            if mc.defect(mc.dagger(e) @ e - np.eye(e.shape[1])) > 1e-9:
                raise ValueError("embedding is not an isometry")
            for f in used.get(i, []):
                if mc.defect(mc.dagger(f) @ e) > 1e-9:
                    raise ValueError("overlapping embeddings into target block %d" % i)
            used.setdefault(i, []).append(e)
            self.pieces.append((i, j, e))

    @classmethod
    def standard(cls, source, target, mult, unitaries=None, label=""):
        """Block embedding with multiplicities mult[i][j], conjugated by unitaries[i]."""
        mult = [[int(x) for x in row] for row in mult]
        if len(mult) != target.num_blocks or any(len(r) != source.num_blocks for r in mult):
            raise ValueError("multiplicity matrix must be %d x %d" % (target.num_blocks, source.num_blocks))
        pieces = []
        for i, m in enumerate(target.block_sizes):
            u = np.eye(m, dtype=complex) if unitaries is None or unitaries[i] is None else np.asarray(unitaries[i], dtype=complex)
            off = 0
            for j, k in enumerate(source.block_sizes):
                if mult[i][j] < 0:
                    raise ValueError("negative multiplicity")
                for _ in range(mult[i][j]):
                    pieces.append((i, j, u[:, off:off + k]))
                    off += k
            if off > m:
                raise ValueError("multiplicities overflow target block %d" % i)
        return cls(source, target, pieces, label)

    @classmethod
    def zero(cls, source, target, label="0"):
        return cls(source, target, [], label)

    @classmethod
    def identity(cls, alg, label="id"):
        return cls.standard(alg, alg, np.eye(alg.num_blocks, dtype=int), label=label)

    def apply(self, x):
        if not isinstance(x, UnitizedElement) or not x.algebra.same_as(self.source):
            raise AlgebraMismatch("%s expects elements over %s" % (self.label or "homomorphism", self.source))
        n = x.level
        body = x.body
        out = [mc.kron_eye(x.scalar, m) for m in self.target.block_sizes]
        for i, j, e in self.pieces:
            k = np.kron(np.eye(n), e)
            out[i] = out[i] + k @ body[j] @ mc.dagger(k)
        return UnitizedElement(self.target, x.scalar, out)

    def multiplicity_matrix(self):
        """Rank of the image of a minimal projection of each source block."""
        mat = [[0] * self.source.num_blocks for _ in range(self.target.num_blocks)]
        for j in range(self.source.num_blocks):
            ranks = [0] * self.source.num_blocks
            ranks[j] = 1
            img = self.apply(UnitizedElement.matrix_unit_projection(self.source, 1, ranks))
            for i, b in enumerate(img.blocks):
                mat[i][j] = int(round(float(np.trace(b).real)))
        return mat

    def compose(self, first):
        """self o first."""
        if not self.source.same_as(first.target):
            raise AlgebraMismatch("cannot compose")
        pieces = [(i, j, f @ e) for (k, j, e) in first.pieces for (i, k2, f) in self.pieces if k2 == k]
        return Homomorphism(first.source, self.target, pieces, "%s o %s" % (self.label, first.label))

    def is_zero(self):
        return not self.pieces


def check_homomorphism(phi, rng, trials=5, tol=1e-8):
    """Largest multiplicativity/adjoint defect on random elements."""
    worst = 0.0
    for _ in range(trials):
        x, y = random_element(phi.source, 2, rng), random_element(phi.source, 2, rng)
        worst = max(worst, phi.apply(x @ y).dist(phi.apply(x) @ phi.apply(y)), phi.apply(x.H).dist(phi.apply(x).H))
    return worst


def random_element(alg, n, rng, scalar=True):
    def rc(shape):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    lam = rc((n, n)) if scalar else np.zeros((n, n))
    return UnitizedElement.from_body(alg, lam, [rc((n * k, n * k)) for k in alg.block_sizes])


def random_unitary(m, rng):
    z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def multiplicity_matrix(phi):
    return phi.multiplicity_matrix()


def apply(phi, x):
    return phi.apply(x)


def amplify(x, k):
    return x.amplify(k)


def direct_sum(x, y):
    return x.direct_sum(y)


# function algebras on sample grids


@dataclass(frozen=True)
class GridAlgebra:
    """C(X, F) or an ideal of it, sampled on a uniform grid.

    Elements are UnitizedElements over the fiber F whose trailing batch axes
    are the grid.  boundary describes the ideal: the body must vanish there.
    """

    fiber: FDAlgebra
    domain: str
    grid: tuple
    boundary: str = "none"
    label: str = ""

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise DomainMismatch("unknown domain %r" % self.domain)
        if self.boundary not in BOUNDARIES:
            raise DomainMismatch("unknown boundary %r" % self.boundary)

    @property
    def axes(self):
        return len(self.grid)

    def nodes(self, axis=0):
        return np.linspace(0.0, 1.0, self.grid[axis])

    def boundary_defect(self, x):
        """How far the body of x is from satisfying the boundary condition."""
        body = x.body
        if not body or self.boundary == "none":
            return 0.0
        if self.boundary == "endpoints-equal":
            return max(mc.defect(b[..., 0, :, :] - b[..., -1, :, :]) for b in x.blocks)
        if self.boundary == "vanishes-at-ends":
            return max(max(mc.defect(b[..., 0, :, :]), mc.defect(b[..., -1, :, :])) for b in body)
        # polar square: radius axis first, vanishing at radius 1
        return max(mc.defect(b[..., -1, :, :, :]) for b in body)

    def __str__(self):
        return self.label or "C(%s)" % self.domain


class GridRestriction(Morphism):
    """Restrict to the slice index along one grid axis (e.g. disk -> boundary circle)."""

    def __init__(self, source, target, axis, index, label=""):
        self.source, self.target, self.axis, self.index, self.label = source, target, axis, index, label

    def apply(self, x):
        k = self.source.axes
        ax = x.scalar.ndim - 2 - k + self.axis
        return x.map_arrays(lambda a: np.take(a, self.index, axis=ax))


class GridIdentity(Morphism):
    """Same samples, different algebra label (ideal inclusions, C(S^1) in C[0,1])."""

    def __init__(self, source, target, label=""):
        self.source, self.target, self.label = source, target, label

    def apply(self, x):
        return x


class Evaluation(Morphism):
    """Evaluate a one-axis grid function at the given node indices.

    The target is the finite-dimensional algebra with one copy of the fiber
    blocks per point.
    """

    def __init__(self, source, points, label=""):
        self.source = source
        self.points = list(points)
        self.target = FDAlgebra(tuple(k for _ in self.points for k in source.fiber.block_sizes), label + " target")
        self.label = label

    def apply(self, x):
        blocks = [b[..., p, :, :] for p in self.points for b in x.blocks]
        return UnitizedElement(self.target, x.scalar[..., 0, :, :], blocks)


class ToZero(Morphism):
    """The zero map into the zero algebra; keeps the scalar part."""

    def __init__(self, source, label="0"):
        self.source = source
        self.target = FDAlgebra.zero()
        self.label = label

    def apply(self, x):
        s = x.scalar
        if isinstance(self.source, GridAlgebra):
            for _ in range(self.source.axes):
                s = s[..., 0, :, :]
        return UnitizedElement(self.target, s, [])


# sampled paths and cones


@dataclass
class SampledElement:
    """Matrix-valued function on a uniform grid over [0,1] or [0,1]^2.

    element carries the samples on its leading batch axes.
    """

    domain: str
    element: UnitizedElement
    boundary: str = "none"

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise DomainMismatch("unknown domain %r" % self.domain)
        if self.boundary not in BOUNDARIES:
            raise DomainMismatch("unknown boundary %r" % self.boundary)
        if len(self.element.batch_shape) < self.axes:
            raise DomainMismatch("samples are missing grid axes")

    @property
    def axes(self):
        return 2 if self.domain == "square" else 1

    @property
    def grid(self):
        return self.element.batch_shape[: self.axes]

    @property
    def level(self):
        return self.element.level

    @property
    def algebra(self):
        return self.element.algebra

    def nodes(self, axis=0):
        return np.linspace(0.0, 1.0, self.grid[axis])

    def at(self, index):
        return self.element.take(index)

    def first(self):
        return self.at(0)

    def last(self):
        return self.at(-1)

    def eval(self, s):
        """Linear interpolation in the first grid axis."""
        if not 0.0 <= s <= 1.0:
            raise DomainMismatch("parameter %r outside [0,1]" % s)
        n = self.grid[0]
        x = s * (n - 1)
        i = min(int(np.floor(x)), n - 2) if n > 1 else 0
        if n == 1:
            return self.at(0)
        w = x - i
        return self.at(i) * (1 - w) + self.at(i + 1) * w

    def with_element(self, element, boundary=None):
        return SampledElement(self.domain, element, self.boundary if boundary is None else boundary)

    def product(self, other):
        self._same_grid(other)
        return self.with_element(self.element @ other.element, "none")

    def adjoint(self):
        return self.with_element(self.element.H)

    def _same_grid(self, other):
        if self.domain != other.domain or self.grid != other.grid:
            raise DomainMismatch("grids differ: %s%s vs %s%s" % (self.domain, self.grid, other.domain, other.grid))

    def max_step(self):
        """Largest operator-norm jump between adjacent nodes along the grid axes."""
        worst = 0.0
        for ax in range(self.axes):
            for a in self.element.arrays():
                if a.shape[ax] < 2 or a.shape[-1] == 0:
                    continue
                d = np.diff(a, axis=ax)
                worst = max(worst, float(np.max(np.linalg.norm(d, ord=2, axis=(-2, -1)))))
        return worst

    def boundary_defect(self):
        e = self.element
        if self.boundary == "none":
            return 0.0
        if self.boundary == "endpoints-equal":
            return e.take(0).dist(e.take(-1))
        z = UnitizedElement.zero(e.algebra, e.level)
        if self.boundary == "vanishes-at-ends":
            return max(e.take(0).dist(z), e.take(-1).dist(z))
        return e.take(-1).dist(z)

    def validate(self, tol=mc.DEFAULT_TOL):
        problems = []
        bd = self.boundary_defect()
        if bd > tol.eps:
            problems.append(("boundary condition %s" % self.boundary, bd))
        step = self.max_step()
        if step > MAX_STEP:
            problems.append(("adjacent samples differ by more than %.2f" % MAX_STEP, step))
        return problems


def sample_path(fn, grid=DEFAULT_GRID, domain="interval", boundary="none"):
    """Build a SampledElement by evaluating fn(s_array) -> batched element."""
    s = np.linspace(0.0, 1.0, grid)
    return SampledElement(domain, fn(s), boundary)


def constant_path(x, grid=DEFAULT_GRID):
    return SampledElement("interval", x.map_arrays(lambda a: np.broadcast_to(a, (grid,) + a.shape).copy()))


def sampled_product(f, g):
    return f.product(g)


def sampled_adjoint(g):
    return g.adjoint()


def sampled_eval(g, s):
    return g.eval(s)


@dataclass
class ConeElement:
    a: UnitizedElement
    f: SampledElement
    hom: Morphism


def cone_element(a, f, hom, tol=mc.DEFAULT_TOL):
    if f.domain != "interval":
        raise DomainMismatch("cone paths live on the interval")
    d = f.last().dist(hom.apply(a))
    if d > tol.composite:
        raise EndpointMismatch("f(1) differs from phi(a) by %.3g" % d)
    return ConeElement(a, f, hom)


# ladders


@dataclass
class Ladder:
    """Two short exact rows I -> A -> A/I and J -> B -> B/J with vertical maps."""

    I: object
    A: object
    Q: object
    J: object
    B: object
    R: object
    iota_A: Morphism
    pi_A: Morphism
    iota_B: Morphism
    pi_B: Morphism
    psi: Morphism
    phi: Morphism
    gamma: Morphism
    label: str = ""
    ideal_A: tuple = field(default=())
    ideal_B: tuple = field(default=())

    @classmethod
    def from_ideals(cls, phi, ideal_A, ideal_B, label=""):
        """Ladder of phi: A -> B where the ideals are the listed block subsets."""
        A, B = phi.source, phi.target
        ideal_A, ideal_B = tuple(sorted(ideal_A)), tuple(sorted(ideal_B))
        rest_A = tuple(j for j in range(A.num_blocks) if j not in ideal_A)
        rest_B = tuple(i for i in range(B.num_blocks) if i not in ideal_B)
        for i, j, _ in phi.pieces:
            if j in ideal_A and i not in ideal_B:
                raise LadderInvalid("phi does not map the ideal of A into the ideal of B")
        I = FDAlgebra(tuple(A.block_sizes[j] for j in ideal_A), "I")
        Q = FDAlgebra(tuple(A.block_sizes[j] for j in rest_A), "A/I")
        J = FDAlgebra(tuple(B.block_sizes[i] for i in ideal_B), "J")
        R = FDAlgebra(tuple(B.block_sizes[i] for i in rest_B), "B/J")

        def sel(src, tgt, pairs, lab):
            return Homomorphism(src, tgt, [(i, j, np.eye(src.block_sizes[j])) for i, j in pairs], lab)

        iota_A = sel(I, A, [(ideal_A[k], k) for k in range(len(ideal_A))], "iota_A")
        pi_A = sel(A, Q, [(k, rest_A[k]) for k in range(len(rest_A))], "pi_A")
        iota_B = sel(J, B, [(ideal_B[k], k) for k in range(len(ideal_B))], "iota_B")
        pi_B = sel(B, R, [(k, rest_B[k]) for k in range(len(rest_B))], "pi_B")
        psi = Homomorphism(I, J, [(ideal_B.index(i), ideal_A.index(j), e) for i, j, e in phi.pieces if j in ideal_A], "psi")
        gamma = Homomorphism(Q, R, [(rest_B.index(i), rest_A.index(j), e) for i, j, e in phi.pieces
                                    if j in rest_A and i in rest_B], "gamma")
        return cls(I, A, Q, J, B, R, iota_A, pi_A, iota_B, pi_B, psi, phi, gamma, label, ideal_A, ideal_B)

    def is_finite_dimensional(self):
        return all(isinstance(x, FDAlgebra) for x in (self.I, self.A, self.Q, self.J, self.B, self.R))

    def check(self, rng=None, trials=100, tol=1e-9):
        """Return a list of problems (empty when the ladder is valid)."""
        problems = []
        if not self.is_finite_dimensional():
            return problems
        rng = rng or np.random.default_rng(0)
        for name, inc, quo in (("top", self.iota_A, self.pi_A), ("bottom", self.iota_B, self.pi_B)):
            mi = np.array(inc.multiplicity_matrix(), dtype=int).reshape(inc.target.num_blocks, inc.source.num_blocks)
            mq = np.array(quo.multiplicity_matrix(), dtype=int).reshape(quo.target.num_blocks, quo.source.num_blocks)
            # ideals are block subsets: inclusion hits distinct blocks once,
            # the quotient keeps exactly the remaining blocks
            hit = mi.sum(axis=1)
            kept = mq.sum(axis=0)
            if mi.size and (np.any(mi.sum(axis=0) != 1) or np.any(hit > 1)):
                problems.append("%s row: inclusion is not a block inclusion" % name)
            if mq.size and (np.any(mq.sum(axis=1) != 1) or np.any(kept > 1)):
                problems.append("%s row: quotient is not a block projection" % name)
            if np.any(hit + kept != 1):
                problems.append("%s row: not exact (ker pi != im iota)" % name)
        worst = 0.0
        for _ in range(trials):
            x = random_element(self.I, 1, rng)
            worst = max(worst, self.phi.apply(self.iota_A.apply(x)).dist(self.iota_B.apply(self.psi.apply(x))))
            y = random_element(self.A, 1, rng)
            worst = max(worst, self.pi_B.apply(self.phi.apply(y)).dist(self.gamma.apply(self.pi_A.apply(y))))
        if worst > tol * 10:
            problems.append("squares commute only up to %.3g" % worst)
        return problems

    # lifting along the quotient maps; ideals are block subsets, so lifting
    # is coordinate insertion with scalar (x) 1 in the ideal blocks

    def _rest(self, alg, ideal):
        return tuple(j for j in range(alg.num_blocks) if j not in ideal)

    def _insert(self, x, alg, ideal, fill):
        rest = self._rest(alg, ideal)
        blocks = []
        for j, k in enumerate(alg.block_sizes):
            blocks.append(x.blocks[rest.index(j)] if j in rest else fill(j, k))
        return UnitizedElement(alg, x.scalar, blocks)

    def lift_to_A(self, x):
        return self._insert(x, self.A, self.ideal_A, lambda j, k: mc.kron_eye(x.scalar, k))

    def lift_to_B(self, x):
        return self._insert(x, self.B, self.ideal_B, lambda j, k: mc.kron_eye(x.scalar, k))

    def lift_path_to_B(self, path, end=None):
        """Lift a path over B/J to B.  Ideal blocks run from scalar (x) 1 at s=0
        to the ideal blocks of end at s=1 (constant scalar (x) 1 without end)."""
        e = path.element
        s = path.nodes().reshape((-1,) + (1,) * (e.scalar.ndim - 1))

        def fill(j, k):
            base = mc.kron_eye(e.scalar, k)
            if end is None:
                return base
            return (1 - s) * base + s * end.blocks[j]

        return path.with_element(self._insert(e, self.B, self.ideal_B, fill), "none")

    def _restrict(self, y, alg, ideal, sub, tol, what):
        for j in self._rest(alg, ideal):
            d = mc.defect(y.blocks[j] - mc.kron_eye(y.scalar, alg.block_sizes[j]))
            if d > tol:
                raise LiftInvalid("%s: quotient image is not scalar (defect %.3g)" % (what, d))
        return UnitizedElement(sub, y.scalar, [y.blocks[j] for j in ideal])

    def to_ideal_A(self, y, tol=1e-7, what="element"):
        return self._restrict(y, self.A, self.ideal_A, self.I, tol, what)

    def to_ideal_B(self, y, tol=1e-7, what="element"):
        return self._restrict(y, self.B, self.ideal_B, self.J, tol, what)
