"""Exact integer engine: Smith normal form, group presentations, kernels,
cokernels and exactness checks.

Matrices are lists of rows of Python ints.  Every intermediate is checked
against the signed 64-bit range so that overflow is reported rather than
silently absorbed by big integers.
"""

from dataclasses import dataclass, field

from .errors import NotComposable, Overflow

LIMIT = 2 ** 63


def _chk(x):
    if x >= LIMIT or x <= -LIMIT:
        raise Overflow("integer %d exceeds 63 bits" % x)
    return x


def zeros(r, c):
    return [[0] * c for _ in range(r)]


def identity(n):
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = 1
    return m


def matmul(a, b, inner=None, cols=None):
    """Product of integer matrices; inner and cols give the dimensions lost by empty operands."""
    rows = len(a)
    k = inner if inner is not None else (len(b) if b else (len(a[0]) if a else 0))
    if cols is None:
        cols = len(b[0]) if b else 0
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        for j in range(cols):
            out[i][j] = _chk(sum(ai[t] * b[t][j] for t in range(k)))
    return out


def matvec(a, x):
    return [_chk(sum(r[t] * x[t] for t in range(len(x)))) for r in a]


def transpose(a, cols=None):
    c = cols if cols is not None else (len(a[0]) if a else 0)
    return [[a[i][j] for i in range(len(a))] for j in range(c)]


def columns(a, ncols=None):
    return transpose(a, ncols)


def from_columns(cols, nrows):
    return [[c[i] for c in cols] for i in range(nrows)]


def hstack(a, b, rows):
    return [(a[i] if a else []) + (b[i] if b else []) for i in range(rows)]


@dataclass
class SNF:
    U: list
    D: list
    V: list
    Uinv: list
    Vinv: list
    rank: int

    @property
    def diagonal(self):
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]


def smith_normal_form(m, ncols=None):
    """U, D, V with U m V = D diagonal, d_1 | d_2 | ..., zeros last.

    Pivot: smallest nonzero absolute value, scanning rows before columns.
    """
    r = len(m)
    c = ncols if ncols is not None else (len(m[0]) if m else 0)
    a = [[_chk(int(x)) for x in row] for row in m]
    U, Uinv, V, Vinv = identity(r), identity(r), identity(c), identity(c)

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            U[i], U[j] = U[j], U[i]
            for row in Uinv:
                row[i], row[j] = row[j], row[i]

    def add_row(i, j, k):  # row_i += k row_j
        if k:
            a[i] = [_chk(x + k * y) for x, y in zip(a[i], a[j])]
            U[i] = [_chk(x + k * y) for x, y in zip(U[i], U[j])]
            for row in Uinv:
                row[j] = _chk(row[j] - k * row[i])

    def neg_row(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]
        for row in Uinv:
            row[i] = -row[i]

    def swap_cols(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]
            Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def add_col(i, j, k):  # col_i += k col_j
        if k:
            for row in a:
                row[i] = _chk(row[i] + k * row[j])
            for row in V:
                row[i] = _chk(row[i] + k * row[j])
            Vinv[j] = [_chk(x - k * y) for x, y in zip(Vinv[j], Vinv[i])]

    t = 0
    while t < min(r, c):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
            # remainders left behind become the next pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t + 1, r) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t + 1, c) if a[t][j]]
            if cand:
                _, i, j = min(cand)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                done = False
            else:
                bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % a[t][t]), None)
                if bad is not None:
                    add_row(t, bad[0], 1)
                    done = False
            if done:
                break
        if a[t][t] < 0:
            neg_row(t)
        t += 1
    return SNF(U, a, V, Uinv, Vinv, t)


def invariant_factors(relations, generator_count):
    """Diagonal of the SNF of the relation matrix, padded with zeros."""
    cols = len(relations[0]) if relations else 0
    s = smith_normal_form(relations, cols) if generator_count else None
    d = [s.D[i][i] for i in range(s.rank)] if s else []
    return d + [0] * (generator_count - len(d))


def describe_factors(factors):
    free = sum(1 for d in factors if d == 0)
    parts = ["Z/%d" % d for d in factors if d > 1]
    if free == 1:
        parts.append("Z")
    elif free > 1:
        parts.append("Z^%d" % free)
    return " + ".join(parts) if parts else "0"


def solve_in_lattice(basis_cols, y, n):
    """Integer c with B c = y where B has the given columns in Z^n, or None."""
    k = len(basis_cols)
    if k == 0:
        return [] if all(v == 0 for v in y) else None
    B = from_columns(basis_cols, n)
    s = smith_normal_form(B, k)
    z = matvec(s.U, y)
    w = []
    for i in range(n):
        if i < s.rank:
            if z[i] % s.D[i][i]:
                return None
            w.append(z[i] // s.D[i][i])
        elif z[i]:
            return None
    w += [0] * (k - len(w))
    return matvec(s.V, w[:k])


def lattice_basis(cols, n):
    """A basis (list of columns) of the sublattice of Z^n spanned by cols."""
    if not cols:
        return []
    s = smith_normal_form(from_columns(cols, n), len(cols))
    return [[s.Uinv[i][t] * s.D[t][t] for i in range(n)] for t in range(s.rank)]


def nullspace(m, ncols):
    """Basis columns of the integer kernel of m (rows x ncols)."""
    if ncols == 0:
        return []
    if not m:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    s = smith_normal_form(m, ncols)
    return [[s.V[i][t] for i in range(ncols)] for t in range(s.rank, ncols)]


@dataclass
class GroupPresentation:
    """Z^g modulo the columns of relations (a g x r integer matrix)."""

    generator_count: int
    relations: list = field(default_factory=list)
    generator_tags: list = field(default_factory=list)
    name: str = ""

    def __post_init__(self):
        if not self.relations:
            self.relations = [[] for _ in range(self.generator_count)]
        if len(self.relations) != self.generator_count:
            raise ValueError("relations must have one row per generator")
        if not self.generator_tags:
            self.generator_tags = ["g%d" % i for i in range(self.generator_count)]

    @property
    def relation_cols(self):
        return columns(self.relations, len(self.relations[0]) if self.relations else 0)

    @property
    def invariant_factors(self):
        return invariant_factors(self.relations, self.generator_count)

    def describe(self):
        return describe_factors(self.invariant_factors)

    def is_trivial(self):
        return all(d == 1 for d in self.invariant_factors)

    def contains_zero(self, x):
        return solve_in_lattice(self.relation_cols, list(x), self.generator_count) is not None

    def equal(self, x, y):
        return self.contains_zero([a - b for a, b in zip(x, y)])

    def same_as(self, other):
        return self.generator_count == other.generator_count and self.relations == other.relations

    def normal_form(self):
        """(presentation in SNF coordinates, to_new, from_new).

        The new generators are the non-unit invariant factors; to_new maps old
        coordinates to new ones, from_new lists each new generator in old
        coordinates.
        """
        g = self.generator_count
        cols = self.relation_cols
        if g == 0:
            return GroupPresentation(0, name=self.name), [], []
        s = smith_normal_form(self.relations, len(cols))
        diag = [s.D[i][i] if i < s.rank else 0 for i in range(g)]
        keep = [i for i in range(g) if diag[i] != 1]
        to_new = [s.U[i][:] for i in keep]
        from_new = [[s.Uinv[r][i] for r in range(g)] for i in keep]
        rel = zeros(len(keep), 0)
        for t, i in enumerate(keep):
            if diag[i]:
                for row in range(len(keep)):
                    rel[row].append(diag[i] if row == t else 0)
        pres = GroupPresentation(len(keep), rel, ["(%s)" % ",".join(map(str, c)) for c in from_new], self.name)
        return pres, to_new, from_new

    def reduce(self, x):
        """Canonical coordinates: torsion parts taken mod their order."""
        out = list(x)
        for i in range(self.generator_count):
            row = self.relations[i]
            nz = [v for v in row if v]
            if len(nz) == 1 and all(self.relations[k][row.index(nz[0])] == 0 for k in range(self.generator_count) if k != i):
                out[i] %= abs(nz[0])
        return out


@dataclass
class GroupMap:
    source: GroupPresentation
    target: GroupPresentation
    matrix: list
    name: str = ""

    def __post_init__(self):
        if len(self.matrix) != self.target.generator_count:
            raise ValueError("map matrix needs %d rows" % self.target.generator_count)
        if any(len(r) != self.source.generator_count for r in self.matrix):
            raise ValueError("map matrix needs %d columns" % self.source.generator_count)

    def __call__(self, x):
        return matvec(self.matrix, x) if self.matrix else []

    def image_cols(self):
        return columns(self.matrix, self.source.generator_count)

    def well_defined(self):
        return all(self.target.contains_zero(self(c)) for c in self.source.relation_cols)

    def compose(self, first):
        return GroupMap(first.source, self.target, matmul(self.matrix, first.matrix, first.target.generator_count,
                                                              first.source.generator_count),
                        "%s o %s" % (self.name, first.name))


def _preimage_lattice(f):
    """Basis of {x : f(x) in relations of the target} (contains the source relations)."""
    a = f.source.generator_count
    b = f.target.generator_count
    rb = f.target.relation_cols
    neg_rb = [[-v for v in col] for col in rb]
    big = hstack(f.matrix, from_columns(neg_rb, b), b)
    null = nullspace(big, a + len(rb)) if b else [[1 if i == j else 0 for i in range(a)] for j in range(a)]
    xs = [col[:a] for col in null]
    return lattice_basis(xs, a)


def kernel(f):
    """(kernel presentation, inclusion map into the source)."""
    a = f.source.generator_count
    basis = _preimage_lattice(f)
    rel_cols = [solve_in_lattice(basis, col, a) for col in f.source.relation_cols]
    r = len(basis)
    pres = GroupPresentation(r, from_columns(rel_cols, r) if rel_cols else [],
                             ["(%s)" % ",".join(map(str, c)) for c in basis], "ker " + f.name)
    inc = GroupMap(pres, f.source, from_columns(basis, a) if basis else [[] for _ in range(a)], "inclusion")
    return pres, inc


def cokernel(f):
    """(cokernel presentation, projection from the target)."""
    b = f.target.generator_count
    rel = hstack(f.target.relations, f.matrix, b)
    pres = GroupPresentation(b, rel, list(f.target.generator_tags), "coker " + f.name)
    return pres, GroupMap(f.target, pres, identity(b), "projection")


def image_contained(cols, lattice_cols, n):
    return all(solve_in_lattice(lattice_cols, c, n) is not None for c in cols)


def check_exact(seq, cyclic=False):
    """Verify im = ker at every interior node (every node if cyclic)."""
    for f, g in zip(seq, seq[1:] + (seq[:1] if cyclic else [])):
        if not f.target.same_as(g.source):
            raise NotComposable("%s does not feed %s" % (f.name, g.name))
    report = []
    pairs = list(zip(seq, seq[1:]))
    if cyclic:
        pairs.append((seq[-1], seq[0]))
    for f, g in pairs:
        mid = f.target
        n = mid.generator_count
        rel = mid.relation_cols
        im = f.image_cols()
        ker = _preimage_lattice(g)
        im_in_ker = all(g.target.contains_zero(g(c)) for c in im)
        ker_in_im = image_contained(ker, im + rel, n)
        ok = im_in_ker and ker_in_im
        if ok:
            note = "exact"
        elif not im_in_ker:
            note = "im %s not inside ker %s" % (f.name, g.name)
        else:
            note = "ker %s larger than im %s" % (g.name, f.name)
        report.append({"node": mid.name, "exact": ok, "detail": note})
    return report


def free_group(rank, tags=None, name=""):
    return GroupPresentation(rank, [], list(tags or []), name)


def k_groups(alg):
    """K_0 = Z^(blocks), K_1 = 0 for a finite-dimensional algebra."""
    k = alg.num_blocks
    k0 = free_group(k, ["minimal projection of block %d" % (j + 1) for j in range(k)], "K0(%s)" % (alg.label or alg))
    k1 = free_group(0, [], "K1(%s)" % (alg.label or alg))
    return k0, k1


def induced_k0(phi, source=None, target=None):
    src = source or k_groups(phi.source)[0]
    tgt = target or k_groups(phi.target)[0]
    mat = phi.multiplicity_matrix()
    if not mat:
        mat = []
    return GroupMap(src, tgt, mat if tgt.generator_count else [], phi.label + "_*")


def zero_map(source, target, name="0"):
    return GroupMap(source, target, zeros(target.generator_count, source.generator_count), name)
