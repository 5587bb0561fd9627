"""Concrete bicategories with shadow, at desk scale.

Three interlocking models:

* integer-matrix 1-cells over finite sets (families of free abelian groups,
  composed by rank matrix multiplication), with the cyclic shadow
  isomorphism as an explicit basis permutation;
* finite groupoids given by full composition tables, their conjugacy
  classes, and representations on free abelian groups;
* group rings of finite groups with the Hattori-Stallings trace.

The verifiers at the bottom evaluate both routes of the trace-comparison
squares independently and report equality with witnesses.

Basis conventions (fixed once, used everywhere): the composite of cells
m: A -|-> B and n: B -|-> C at (a, c) is based by triples (b, i, j) in
lexicographic order, b running over B in declaration order; shadows
concatenate the diagonal cells in declaration order of the indexing set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import permutations

from .errors import ConsistencyError, InputError
from .formal import FormalSum
from .intlinalg import IntMatrix, kron, trace


# ---------------------------------------------------------------------------
# Matrix bicategory: 0-cells, 1-cells, 2-cells


@dataclass(frozen=True)
class FinSet:
    labels: tuple

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise InputError("finite set labels must be distinct")

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"{label!r} is not in the set") from None


STAR = FinSet(("*",))


@dataclass(frozen=True)
class MatCell:
    """1-cell src -|-> tgt: a rank for every (source, target) pair."""

    src: FinSet
    tgt: FinSet
    ranks: tuple  # ranks[i][j] over (src i, tgt j)

    def __post_init__(self):
        if len(self.ranks) != len(self.src):
            raise InputError("rank table must have one row per source element")
        for row in self.ranks:
            if len(row) != len(self.tgt):
                raise InputError("rank table must have one column per target element")
            if any(r < 0 for r in row):
                raise InputError("ranks must be nonnegative")

    def rank(self, a, b) -> int:
        return self.ranks[self.src.index(a)][self.tgt.index(b)]


def unit_cell(a: FinSet) -> MatCell:
    n = len(a)
    return MatCell(a, a, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


@dataclass(frozen=True)
class Mat2:
    """2-cell between parallel 1-cells: a matrix for every index pair."""

    src: MatCell
    tgt: MatCell
    blocks: tuple

    def __post_init__(self):
        if self.src.src != self.tgt.src or self.src.tgt != self.tgt.tgt:
            raise InputError("2-cell endpoints do not match")
        if len(self.blocks) != len(self.src.src):
            raise InputError("2-cell needs one block row per source element")
        for i, row in enumerate(self.blocks):
            if len(row) != len(self.src.tgt):
                raise InputError("2-cell needs one block per index pair")
            for j, m in enumerate(row):
                want = (self.tgt.ranks[i][j], self.src.ranks[i][j])
                if (m.rows, m.cols) != want:
                    raise InputError(
                        f"2-cell block ({i},{j}) has shape {m.rows}x{m.cols}, expected {want}"
                    )

    def block(self, a, b) -> IntMatrix:
        return self.blocks[self.src.src.index(a)][self.src.tgt.index(b)]


def identity_2cell(m: MatCell) -> Mat2:
    return Mat2(
        m, m,
        tuple(tuple(IntMatrix.identity(r) for r in row) for row in m.ranks),
    )


def mat_compose(m: MatCell, n: MatCell) -> MatCell:
    """Composite 1-cell: ranks multiply like matrices."""
    if m.tgt != n.src:
        raise InputError("1-cells do not compose: middle sets differ")
    ranks = tuple(
        tuple(
            sum(m.ranks[i][k] * n.ranks[k][j] for k in range(len(m.tgt)))
            for j in range(len(n.tgt))
        )
        for i in range(len(m.src))
    )
    return MatCell(m.src, n.tgt, ranks)


def vert2(first: Mat2, then: Mat2) -> Mat2:
    """Vertical composite of 2-cells between the same index pairs."""
    if first.tgt != then.src:
        raise InputError("2-cells do not compose vertically")
    blocks = tuple(
        tuple(tb * fb for fb, tb in zip(frow, trow))
        for frow, trow in zip(first.blocks, then.blocks)
    )
    return Mat2(first.src, then.tgt, blocks)


def mat_compose2(u: Mat2, v: Mat2) -> Mat2:
    """Horizontal composite of 2-cells: block-diagonal Kronecker blocks."""
    if u.src.tgt != v.src.src:
        raise InputError("2-cells do not compose: middle sets differ")
    src = mat_compose(u.src, v.src)
    tgt = mat_compose(u.tgt, v.tgt)
    mid = len(u.src.tgt)
    blocks = []
    for i in range(len(src.src)):
        row = []
        for j in range(len(src.tgt)):
            parts = [kron(u.blocks[i][k], v.blocks[k][j]) for k in range(mid)]
            row.append(_block_diag(parts, src.ranks[i][j], tgt.ranks[i][j]))
        blocks.append(tuple(row))
    return Mat2(src, tgt, tuple(blocks))


def _block_diag(parts, src_rank: int, tgt_rank: int) -> IntMatrix:
    grid = [[0] * src_rank for _ in range(tgt_rank)]
    roff = coff = 0
    for p in parts:
        for i in range(p.rows):
            row = p.entries[i]
            out = grid[roff + i]
            for j in range(p.cols):
                if row[j]:
                    out[coff + j] = row[j]
        roff += p.rows
        coff += p.cols
    return IntMatrix(tgt_rank, src_rank, tuple(tuple(r) for r in grid))


# ---------------------------------------------------------------------------
# Shadows


def mat_shadow(m: MatCell) -> int:
    """Rank of the shadow of an endo-1-cell: the diagonal total."""
    if m.src != m.tgt:
        raise InputError("shadow needs an endo-1-cell")
    return sum(m.ranks[i][i] for i in range(len(m.src)))


def shadow_2cell(u: Mat2) -> IntMatrix:
    """The shadow functor on 2-cells: block diagonal of the diagonal blocks."""
    if u.src.src != u.src.tgt:
        raise InputError("shadow needs 2-cells between endo-1-cells")
    parts = [u.blocks[i][i] for i in range(len(u.src.src))]
    return _block_diag(parts, mat_shadow(u.src), mat_shadow(u.tgt))


def _shadow_offsets(m: MatCell):
    offs = []
    total = 0
    for i in range(len(m.src)):
        offs.append(total)
        total += m.ranks[i][i]
    return offs, total


@dataclass(frozen=True)
class BasisPermutation:
    """An explicit basis bijection: position p of the source goes to image[p]."""

    image: tuple

    def __len__(self):
        return len(self.image)

    def compose(self, then: "BasisPermutation") -> "BasisPermutation":
        return BasisPermutation(tuple(then.image[p] for p in self.image))

    def inverse(self) -> "BasisPermutation":
        inv = [0] * len(self.image)
        for src, tgt in enumerate(self.image):
            inv[tgt] = src
        return BasisPermutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(p == i for i, p in enumerate(self.image))

    def as_matrix(self) -> IntMatrix:
        n = len(self.image)
        grid = [[0] * n for _ in range(n)]
        for src, tgt in enumerate(self.image):
            grid[tgt][src] = 1
        return IntMatrix(n, n, tuple(tuple(r) for r in grid))

    def permute_rows(self, m: IntMatrix) -> IntMatrix:
        """The matrix of (this permutation) . m without densifying."""
        if m.rows != len(self.image):
            raise InputError("permutation size does not match row count")
        rows = [None] * m.rows
        for src, tgt in enumerate(self.image):
            rows[tgt] = m.entries[src]
        return IntMatrix(m.rows, m.cols, tuple(rows))


def shadow_theta(m: MatCell, n: MatCell) -> BasisPermutation:
    """The cyclicity isomorphism sh(m . n) -> sh(n . m) as a basis permutation.

    Basis element (a; b, i, j) of sh(m . n) goes to (b; a, j, i) of
    sh(n . m).
    """
    if m.tgt != n.src or n.tgt != m.src:
        raise InputError("shadow cyclicity needs a composable endo-pair")
    mn = mat_compose(m, n)
    nm = mat_compose(n, m)
    offs_mn, total = _shadow_offsets(mn)
    offs_nm, total2 = _shadow_offsets(nm)
    if total != total2:
        raise ConsistencyError("shadow ranks of the two composites differ")
    na, nb = len(m.src), len(m.tgt)
    image = [0] * total
    for ai in range(na):
        pos = offs_mn[ai]
        for bi in range(nb):
            rm = m.ranks[ai][bi]
            rn = n.ranks[bi][ai]
            # offset of the (a)-block inside the (b)-diagonal cell of n . m
            inner = sum(n.ranks[bi][x] * m.ranks[x][bi] for x in range(ai))
            for i in range(rm):
                for j in range(rn):
                    image[pos] = offs_nm[bi] + inner + j * rm + i
                    pos += 1
    return BasisPermutation(tuple(image))


def shadow_assoc(m: MatCell, n: MatCell, p: MatCell) -> BasisPermutation:
    """The canonical bijection sh((m . n) . p) -> sh(m . (n . p))."""
    left, _right, perms = associator(m, n, p)
    offs_left, total = _shadow_offsets(mat_compose(mat_compose(m, n), p))
    offs_right, _ = _shadow_offsets(mat_compose(m, mat_compose(n, p)))
    image = [0] * total
    for a in range(len(m.src)):
        perm = perms[a][a]
        for pos, tgt in enumerate(perm.image):
            image[offs_left[a] + pos] = offs_right[a] + tgt
    return BasisPermutation(tuple(image))


def theta_naturality_holds(u: Mat2, v: Mat2) -> bool:
    """theta . sh(u . v) == sh(v . u) . theta, checked sparsely entrywise."""
    theta_src = shadow_theta(u.src, v.src)
    theta_tgt = shadow_theta(u.tgt, v.tgt)
    lhs = shadow_2cell(mat_compose2(u, v))
    rhs = shadow_2cell(mat_compose2(v, u))
    count_lhs = 0
    for t in range(lhs.rows):
        row = lhs.entries[t]
        ti = theta_tgt.image[t]
        for s in range(lhs.cols):
            if row[s]:
                count_lhs += 1
                if rhs.entries[ti][theta_src.image[s]] != row[s]:
                    return False
    count_rhs = sum(1 for row in rhs.entries for x in row if x)
    return count_lhs == count_rhs


def shadow_hexagon_holds(m: MatCell, n: MatCell, p: MatCell) -> bool:
    """The shadow/cyclicity coherence hexagon as a permutation identity.

    Requires a cyclically composable triple: m: A -|-> B, n: B -|-> C,
    p: C -|-> A.
    """
    mn = mat_compose(m, n)
    np_ = mat_compose(n, p)
    pm = mat_compose(p, m)
    top = shadow_theta(mn, p).compose(shadow_assoc(p, m, n).inverse())
    bottom = (
        shadow_assoc(m, n, p)
        .compose(shadow_theta(m, np_))
        .compose(shadow_assoc(n, p, m))
        .compose(shadow_theta(n, pm))
    )
    return top.image == bottom.image


def shadow_unit_holds(m: MatCell) -> bool:
    """Unit coherence: both cyclicity maps against the unit are the identity
    through the (positional) unitor bijections."""
    if m.src != m.tgt:
        raise InputError("unit coherence applies to endo-1-cells")
    return (
        shadow_theta(m, unit_cell(m.tgt)).is_identity()
        and shadow_theta(unit_cell(m.src), m).is_identity()
    )


def associator(m: MatCell, n: MatCell, p: MatCell):
    """Basis bijections (per index pair) from (m . n) . p to m . (n . p)."""
    left = mat_compose(mat_compose(m, n), p)
    right = mat_compose(m, mat_compose(n, p))
    nb, nc = len(n.src), len(p.src)
    out = []
    for ai in range(len(m.src)):
        row = []
        for di in range(len(p.tgt)):
            image = [0] * left.ranks[ai][di]
            pos = 0
            for ci in range(nc):
                for bi in range(nb):
                    rm, rn, rp = m.ranks[ai][bi], n.ranks[bi][ci], p.ranks[ci][di]
                    base = sum(
                        m.ranks[ai][b2] * sum(n.ranks[b2][c2] * p.ranks[c2][di] for c2 in range(nc))
                        for b2 in range(bi)
                    )
                    inner_np = sum(n.ranks[bi][c2] * p.ranks[c2][di] for c2 in range(ci))
                    rnp = sum(n.ranks[bi][c2] * p.ranks[c2][di] for c2 in range(nc))
                    for i in range(rm):
                        for j in range(rn):
                            for k in range(rp):
                                image[pos] = base + i * rnp + inner_np + j * rp + k
                                pos += 1
            row.append(BasisPermutation(tuple(image)))
        out.append(tuple(row))
    return left, right, tuple(tuple(r) for r in out)


def associator_2cell(m: MatCell, n: MatCell, p: MatCell) -> Mat2:
    """The canonical bijection (m . n) . p -> m . (n . p) as a 2-cell."""
    left, right, perms = associator(m, n, p)
    blocks = tuple(
        tuple(perm.as_matrix() for perm in row) for row in perms
    )
    return Mat2(left, right, blocks)


def dual_pair_triangles(pair: DualPair) -> bool:
    """Both triangle identities for a dual pair, through the canonical
    associativity and unit bijections (which are positional identities)."""
    m, n = pair.cell, pair.dual
    id_m, id_n = identity_2cell(m), identity_2cell(n)
    t1 = vert2(
        vert2(mat_compose2(pair.coev, id_m), associator_2cell(m, n, m)),
        mat_compose2(id_m, pair.ev),
    )
    if t1 != id_m:
        return False
    assoc = associator_2cell(n, m, n)
    assoc_inv = Mat2(
        assoc.tgt, assoc.src,
        tuple(tuple(b.transpose() for b in row) for row in assoc.blocks),
    )
    t2 = vert2(
        vert2(mat_compose2(id_n, pair.coev), assoc_inv),
        mat_compose2(pair.ev, id_n),
    )
    return t2 == id_n


# ---------------------------------------------------------------------------
# Families of free abelian groups over a finite set


@dataclass(frozen=True)
class Family:
    """Finitely supported family of free abelian groups over a finite set."""

    index: FinSet
    ranks: tuple

    def __post_init__(self):
        if len(self.ranks) != len(self.index):
            raise InputError("family needs a rank per index element")
        if any(r < 0 for r in self.ranks):
            raise InputError("ranks must be nonnegative")

    @staticmethod
    def make(index: FinSet, ranks) -> "Family":
        return Family(index, tuple(ranks[a] for a in index.labels))


def family_endo(fam: Family, mats) -> tuple:
    """Validate per-fiber endomorphism matrices, given as a mapping."""
    out = []
    for a, r in zip(fam.index.labels, fam.ranks):
        m = mats[a]
        if (m.rows, m.cols) != (r, r):
            raise InputError(f"fiber endomorphism at {a!r} has shape {m.rows}x{m.cols}, expected {r}x{r}")
        out.append(m)
    return tuple(out)


@dataclass(frozen=True)
class DualPair:
    """A right-dualizable 1-cell with its dual and both structure 2-cells."""

    cell: MatCell
    dual: MatCell
    coev: Mat2   # unit of the source 0-cell -> cell . dual
    ev: Mat2     # dual . cell -> unit of the target 0-cell


def _coev_column(r: int) -> IntMatrix:
    grid = [[0] for _ in range(r * r)]
    for i in range(r):
        grid[i * r + i][0] = 1
    return IntMatrix(r * r, 1, tuple(tuple(row) for row in grid))


def _ev_row(r: int) -> IntMatrix:
    row = [0] * (r * r)
    for i in range(r):
        row[i * r + i] = 1
    return IntMatrix(1, r * r, (tuple(row),))


def hat_cell(fam: Family) -> MatCell:
    """The family as a 1-cell index -|-> point."""
    return MatCell(fam.index, STAR, tuple((r,) for r in fam.ranks))


def check_cell(fam: Family) -> MatCell:
    """The family as a 1-cell point -|-> index."""
    return MatCell(STAR, fam.index, (tuple(fam.ranks),))


def hat_2cell(fam: Family, mats) -> Mat2:
    cell = hat_cell(fam)
    return Mat2(cell, cell, tuple((m,) for m in family_endo(fam, mats)))


def check_2cell(fam: Family, mats) -> Mat2:
    cell = check_cell(fam)
    return Mat2(cell, cell, (tuple(family_endo(fam, mats)),))


def fiberwise_duality(fam: Family) -> DualPair:
    """Right duality data for the hat cell (fiberwise duality)."""
    m = hat_cell(fam)
    n = check_cell(fam)
    mn = mat_compose(m, n)
    ua = unit_cell(fam.index)
    k = len(fam.index)
    coev_blocks = []
    for i in range(k):
        row = []
        for j in range(k):
            if i == j:
                row.append(_coev_column(fam.ranks[i]))
            else:
                row.append(IntMatrix.zeros(mn.ranks[i][j], 0))
        coev_blocks.append(tuple(row))
    coev = Mat2(ua, mn, tuple(coev_blocks))
    nm = mat_compose(n, m)
    ev_row = [0] * nm.ranks[0][0]
    pos = 0
    for r in fam.ranks:
        for j in range(r):
            for i in range(r):
                if i == j:
                    ev_row[pos] = 1
                pos += 1
    ev = Mat2(nm, unit_cell(STAR), ((IntMatrix(1, nm.ranks[0][0], (tuple(ev_row),)),),))
    return DualPair(m, n, coev, ev)


def total_duality(fam: Family) -> DualPair:
    """Right duality data for the check cell (total duality; finite support)."""
    m = check_cell(fam)
    n = hat_cell(fam)
    mn = mat_compose(m, n)
    col = [[0] for _ in range(mn.ranks[0][0])]
    pos = 0
    for r in fam.ranks:
        for i in range(r):
            for j in range(r):
                if i == j:
                    col[pos][0] = 1
                pos += 1
    coev = Mat2(
        unit_cell(STAR), mn,
        ((IntMatrix(mn.ranks[0][0], 1, tuple(tuple(r) for r in col)),),),
    )
    nm = mat_compose(n, m)
    ua = unit_cell(fam.index)
    k = len(fam.index)
    ev_blocks = []
    for i in range(k):
        row = []
        for j in range(k):
            if i == j:
                row.append(_ev_row(fam.ranks[i]))
            else:
                row.append(IntMatrix.zeros(0, nm.ranks[i][j]))
        ev_blocks.append(tuple(row))
    ev = Mat2(nm, ua, tuple(ev_blocks))
    return DualPair(m, n, coev, ev)


def bicat_trace(pair: DualPair, f: Mat2) -> IntMatrix:
    """Trace of an endo-2-cell of a right-dualizable 1-cell.

    The composite sh(unit) -> sh(cell . dual) -> sh(cell . dual) ->
    sh(dual . cell) -> sh(unit), evaluated as matrices; cyclicity is the
    explicit basis permutation.
    """
    if f.src != pair.cell or f.tgt != pair.cell:
        raise InputError("trace requires an endo-2-cell of the dualizable cell")
    start = shadow_2cell(pair.coev)
    step = shadow_2cell(mat_compose2(f, identity_2cell(pair.dual)))
    theta = shadow_theta(pair.cell, pair.dual)
    finish = shadow_2cell(pair.ev)
    return finish * theta.permute_rows(step * start)


def fam_fib_trace(fam: Family, mats):
    """Per-fiber traces and the induced row vector out of the index copower."""
    endos = family_endo(fam, mats)
    traces = tuple(trace(m) for m in endos)
    return traces, IntMatrix(1, len(traces), (traces,))


def fam_tot_trace(fam: Family, mats) -> FormalSum:
    """Total-duality trace of a fiberwise endomorphism, as a formal sum.

    Computed through the bicategorical composite; the closed form (the
    fiber trace at each index) is asserted against it in the verifiers and
    the test suite.
    """
    pair = total_duality(fam)
    f = check_2cell(fam, mats)
    column = bicat_trace(pair, f)
    return FormalSum.from_pairs(
        (a, column.entries[i][0]) for i, a in enumerate(fam.index.labels)
    )


def set_transfer(fs: FinSet, mapping) -> FormalSum:
    """Fixed points of a set endomap, as a formal sum."""
    fixed = []
    for a in fs.labels:
        if a not in mapping:
            raise InputError(f"endomap missing {a!r}")
        b = mapping[a]
        fs.index(b)
        if b == a:
            fixed.append((a, 1))
    return FormalSum.from_pairs(fixed)


# ---------------------------------------------------------------------------
# Finite groupoids by explicit tables


@dataclass(frozen=True)
class FinGroupoid:
    """A finite groupoid as a full composition table.

    ``compose_table[i][j]`` is the index of "morphism i followed by
    morphism j", or None when the endpoints do not match.  Identities and
    inverses are derived and the groupoid laws are checked exhaustively.
    """

    objects: tuple
    morphisms: tuple
    src: tuple
    tgt: tuple
    compose_table: tuple

    def __post_init__(self):
        n = len(self.morphisms)
        if len(set(self.morphisms)) != n:
            raise InputError("morphism labels must be distinct")
        if len(self.src) != n or len(self.tgt) != n:
            raise InputError("src/tgt must cover every morphism")
        if any(not (0 <= x < len(self.objects)) for x in self.src + self.tgt):
            raise InputError("src/tgt indices out of range")
        if len(self.compose_table) != n or any(len(r) != n for r in self.compose_table):
            raise InputError("composition table must be square over the morphisms")
        for i in range(n):
            for j in range(n):
                c = self.compose_table[i][j]
                if (self.tgt[i] == self.src[j]) != (c is not None):
                    raise InputError(f"composability mismatch at ({i},{j})")
                if c is not None:
                    if not (0 <= c < n):
                        raise InputError("composite index out of range")
                    if self.src[c] != self.src[i] or self.tgt[c] != self.tgt[j]:
                        raise InputError(f"composite endpoints wrong at ({i},{j})")
        # identities
        ids = self.identity_indices
        # associativity
        for i in range(n):
            for j in range(n):
                if self.tgt[i] != self.src[j]:
                    continue
                ij = self.compose_table[i][j]
                for k in range(n):
                    if self.tgt[j] != self.src[k]:
                        continue
                    if self.compose_table[ij][k] != self.compose_table[i][self.compose_table[j][k]]:
                        raise InputError(f"associativity fails at ({i},{j},{k})")
        # inverses
        for i in range(n):
            if self.inverse_index(i) is None:
                raise InputError(f"morphism {self.morphisms[i]} has no inverse")
        del ids

    @cached_property
    def identity_indices(self) -> tuple:
        out = []
        n = len(self.morphisms)
        for x in range(len(self.objects)):
            candidates = []
            for e in range(n):
                if self.src[e] != x or self.tgt[e] != x:
                    continue
                ok = True
                for f in range(n):
                    if self.tgt[f] == x and self.compose_table[f][e] != f:
                        ok = False
                        break
                    if self.src[f] == x and self.compose_table[e][f] != f:
                        ok = False
                        break
                if ok:
                    candidates.append(e)
            if len(candidates) != 1:
                raise InputError(f"object {self.objects[x]} needs exactly one identity")
            out.append(candidates[0])
        return tuple(out)

    def inverse_index(self, i: int):
        ids = self.identity_indices
        for j in range(len(self.morphisms)):
            if self.src[j] == self.tgt[i] and self.tgt[j] == self.src[i]:
                if (
                    self.compose_table[i][j] == ids[self.src[i]]
                    and self.compose_table[j][i] == ids[self.tgt[i]]
                ):
                    return j
        return None

    def then(self, i: int, j: int) -> int:
        c = self.compose_table[i][j]
        if c is None:
            raise InputError("morphisms do not compose")
        return c

    def loops(self) -> tuple:
        return tuple(
            i for i in range(len(self.morphisms)) if self.src[i] == self.tgt[i]
        )


def fingpd_conj_classes(gpd: FinGroupoid) -> tuple:
    """Conjugacy classes of automorphism loops, by exhaustive orbits.

    Each class is the tuple of its member labels in declaration order;
    classes are ordered by their smallest member.  The first member is the
    canonical representative.
    """
    loops = gpd.loops()
    seen = set()
    classes = []
    for start in loops:
        if start in seen:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            cur = frontier.pop()
            for alpha in range(len(gpd.morphisms)):
                if gpd.tgt[alpha] != gpd.src[cur]:
                    continue
                conj = gpd.then(gpd.then(alpha, cur), gpd.inverse_index(alpha))
                if conj not in orbit:
                    orbit.add(conj)
                    frontier.append(conj)
        seen |= orbit
        classes.append(tuple(gpd.morphisms[i] for i in sorted(orbit)))
    return tuple(classes)


@dataclass(frozen=True)
class FinGpdRep:
    """Functor to free abelian groups: a rank per object, a matrix per morphism."""

    gpd: FinGroupoid
    ranks: tuple
    mats: tuple

    def __post_init__(self):
        gpd = self.gpd
        if len(self.ranks) != len(gpd.objects):
            raise InputError("representation needs a rank per object")
        if len(self.mats) != len(gpd.morphisms):
            raise InputError("representation needs a matrix per morphism")
        for i, m in enumerate(self.mats):
            want = (self.ranks[gpd.tgt[i]], self.ranks[gpd.src[i]])
            if (m.rows, m.cols) != want:
                raise InputError(f"matrix of {gpd.morphisms[i]} has wrong shape")
        for x, e in enumerate(gpd.identity_indices):
            if self.mats[e] != IntMatrix.identity(self.ranks[x]):
                raise InputError("identity morphisms must act as identity matrices")
        n = len(gpd.morphisms)
        for i in range(n):
            for j in range(n):
                if gpd.tgt[i] != gpd.src[j]:
                    continue
                if self.mats[gpd.then(i, j)] != self.mats[j] * self.mats[i]:
                    raise InputError(
                        f"functoriality fails at {gpd.morphisms[i]} ; {gpd.morphisms[j]}"
                    )


def fingpd_natural_endo(rep: FinGpdRep, mats) -> tuple:
    """Validate a natural endomorphism: per-object squares commuting with the action."""
    gpd = rep.gpd
    out = []
    for x, r in enumerate(rep.ranks):
        m = mats[gpd.objects[x]]
        if (m.rows, m.cols) != (r, r):
            raise InputError(f"endomorphism at {gpd.objects[x]} has wrong shape")
        out.append(m)
    for i in range(len(gpd.morphisms)):
        if out[gpd.tgt[i]] * rep.mats[i] != rep.mats[i] * out[gpd.src[i]]:
            raise InputError(f"naturality fails at morphism {gpd.morphisms[i]}")
    return tuple(out)


def fingpd_fib_trace(rep: FinGpdRep, mats) -> dict:
    """Fiberwise bicategorical trace: each class of loops goes to the trace
    of (loop action followed by the endomorphism) at the loop's object."""
    gpd = rep.gpd
    endos = fingpd_natural_endo(rep, mats)
    label_index = {lab: i for i, lab in enumerate(gpd.morphisms)}
    out = {}
    for cls in fingpd_conj_classes(gpd):
        rep_idx = label_index[cls[0]]
        x = gpd.src[rep_idx]
        out[cls[0]] = trace(endos[x] * rep.mats[rep_idx])
    return out


@dataclass(frozen=True)
class FinSetFunctor:
    """Finite-set-valued functor on a finite groupoid."""

    gpd: FinGroupoid
    sets: tuple   # per object: tuple of element labels
    maps: tuple   # per morphism: tuple of target element indices

    def __post_init__(self):
        gpd = self.gpd
        if len(self.sets) != len(gpd.objects):
            raise InputError("functor needs a set per object")
        if len(self.maps) != len(gpd.morphisms):
            raise InputError("functor needs a map per morphism")
        for i, mp in enumerate(self.maps):
            if len(mp) != len(self.sets[gpd.src[i]]):
                raise InputError("map domain size mismatch")
            nt = len(self.sets[gpd.tgt[i]])
            if any(not (0 <= v < nt) for v in mp):
                raise InputError("map value out of range")
        for x, e in enumerate(gpd.identity_indices):
            if self.maps[e] != tuple(range(len(self.sets[x]))):
                raise InputError("identities must act as identity maps")
        for i in range(len(gpd.morphisms)):
            for j in range(len(gpd.morphisms)):
                if gpd.tgt[i] != gpd.src[j]:
                    continue
                composed = tuple(self.maps[j][v] for v in self.maps[i])
                if self.maps[gpd.then(i, j)] != composed:
                    raise InputError("functoriality fails on the set functor")

    def permutation_matrix(self, i: int) -> IntMatrix:
        n_src = len(self.sets[self.gpd.src[i]])
        n_tgt = len(self.sets[self.gpd.tgt[i]])
        grid = [[0] * n_src for _ in range(n_tgt)]
        for v, w in enumerate(self.maps[i]):
            grid[w][v] = 1
        return IntMatrix(n_tgt, n_src, tuple(tuple(r) for r in grid))


def linearize(functor: FinSetFunctor) -> FinGpdRep:
    """Free abelian groups on the fibers of a set functor."""
    return FinGpdRep(
        functor.gpd,
        tuple(len(s) for s in functor.sets),
        tuple(functor.permutation_matrix(i) for i in range(len(functor.gpd.morphisms))),
    )


def fingpd_fib_transfer(functor: FinSetFunctor, mats) -> dict:
    """Fiberwise transfer: each class goes to the fixed-point formal sum
    (diagonal with multiplicity) of the composite acting on the fiber."""
    gpd = functor.gpd
    rep = linearize(functor)
    endos = fingpd_natural_endo(rep, mats)
    label_index = {lab: i for i, lab in enumerate(gpd.morphisms)}
    out = {}
    for cls in fingpd_conj_classes(gpd):
        rep_idx = label_index[cls[0]]
        x = gpd.src[rep_idx]
        composite = endos[x] * rep.mats[rep_idx]
        labels = functor.sets[x]
        out[cls[0]] = FormalSum.from_pairs(
            (labels[i], composite.entries[i][i]) for i in range(len(labels))
        )
    return out


def group_groupoid(group: "Group", objects) -> FinGroupoid:
    """The connected groupoid with the given objects and isotropy group."""
    objects = tuple(objects)
    morphs = []
    src = []
    tgt = []
    for i in range(len(objects)):
        for j in range(len(objects)):
            for g in group.elements:
                morphs.append(f"{objects[i]}>{objects[j]}:{g}")
                src.append(i)
                tgt.append(j)
    order = len(group.elements)

    def midx(i, j, gi):
        return (i * len(objects) + j) * order + gi

    n = len(morphs)
    table = [[None] * n for _ in range(n)]
    for i in range(len(objects)):
        for j in range(len(objects)):
            for gi in range(order):
                a = midx(i, j, gi)
                for k in range(len(objects)):
                    for hi in range(order):
                        b = midx(j, k, hi)
                        table[a][b] = midx(i, k, group.mult[hi][gi])
    return FinGroupoid(
        objects, tuple(morphs), tuple(src), tuple(tgt),
        tuple(tuple(r) for r in table),
    )


# ---------------------------------------------------------------------------
# Finite groups and Hattori-Stallings traces


@dataclass(frozen=True)
class Group:
    """Finite group by multiplication table: mult[i][j] = index of e_i * e_j."""

    elements: tuple
    mult: tuple

    def __post_init__(self):
        n = len(self.elements)
        if len(set(self.elements)) != n:
            raise InputError("group element labels must be distinct")
        if len(self.mult) != n or any(len(r) != n for r in self.mult):
            raise InputError("multiplication table must be square")
        for row in self.mult:
            if any(not (0 <= v < n) for v in row):
                raise InputError("multiplication table index out of range")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.mult[self.mult[i][j]][k] != self.mult[i][self.mult[j][k]]:
                        raise InputError("multiplication table is not associative")
        _ = self.identity_index
        _ = self.inverses

    @cached_property
    def identity_index(self) -> int:
        n = len(self.elements)
        for e in range(n):
            if all(self.mult[e][i] == i and self.mult[i][e] == i for i in range(n)):
                return e
        raise InputError("group has no identity")

    @cached_property
    def inverses(self) -> tuple:
        n = len(self.elements)
        e = self.identity_index
        out = []
        for i in range(n):
            inv = next((j for j in range(n) if self.mult[i][j] == e and self.mult[j][i] == e), None)
            if inv is None:
                raise InputError(f"element {self.elements[i]} has no inverse")
            out.append(inv)
        return tuple(out)

    def index(self, label) -> int:
        try:
            return self.elements.index(label)
        except ValueError:
            raise InputError(f"{label!r} is not a group element") from None

    @cached_property
    def conj_classes(self) -> tuple:
        n = len(self.elements)
        seen = set()
        classes = []
        for g in range(n):
            if g in seen:
                continue
            orbit = {self.mult[self.mult[self.inverses[h]][g]][h] for h in range(n)}
            seen |= orbit
            classes.append(tuple(sorted(orbit)))
        return tuple(classes)

    @cached_property
    def class_of(self) -> tuple:
        out = [None] * len(self.elements)
        for cls in self.conj_classes:
            label = f"[{self.elements[cls[0]]}]"
            for g in cls:
                out[g] = label
        return tuple(out)


def cyclic_group(n: int) -> Group:
    labels = tuple("e" if i == 0 else f"g{i}" for i in range(n))
    return Group(labels, tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))


def symmetric_group(n: int) -> Group:
    elems = sorted(permutations(range(n)))
    labels = tuple("".join(str(v) for v in p) for p in elems)
    index = {p: i for i, p in enumerate(elems)}
    mult = tuple(
        tuple(index[tuple(p[q[i]] for i in range(n))] for q in elems)
        for p in elems
    )
    return Group(labels, mult)


def gr_mul(group: Group, x: FormalSum, y: FormalSum) -> FormalSum:
    """Product in the integer group ring."""
    pairs = []
    for g, a in x.terms:
        gi = group.index(g)
        for h, b in y.terms:
            hi = group.index(h)
            pairs.append((group.elements[group.mult[gi][hi]], a * b))
    return FormalSum.from_pairs(pairs)


def gr_matmul(group: Group, m, n):
    """Matrix product with group-ring entries (nested tuples of FormalSum)."""
    rows, inner = len(m), len(n)
    if rows and len(m[0]) != inner:
        raise InputError("group-ring matrix product shape mismatch")
    cols = len(n[0]) if inner else 0
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = FormalSum.zero()
            for k in range(inner):
                acc = acc + gr_mul(group, m[i][k], n[k][j])
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def gr_augment_matrix(m) -> IntMatrix:
    """Sum the coefficients of every entry: the augmented integer matrix."""
    return IntMatrix.from_rows([[entry.augment() for entry in row] for row in m])


def class_projection(group: Group, x: FormalSum) -> FormalSum:
    """Push a group-ring element to the free abelian group on conjugacy classes."""
    return x.map_labels(lambda g: group.class_of[group.index(g)])


def hattori_stallings(group: Group, m) -> FormalSum:
    """Class projection of the diagonal sum of a square group-ring matrix."""
    if any(len(row) != len(m) for row in m):
        raise InputError("Hattori-Stallings trace requires a square matrix")
    acc = FormalSum.zero()
    for i in range(len(m)):
        acc = acc + class_projection(group, m[i][i])
    return acc


# ---------------------------------------------------------------------------
# Theorem-square verifiers


@dataclass(frozen=True)
class VerifyResult:
    passed: bool
    description: str
    lhs: str
    rhs: str
    witness: str = ""


def verify_fibtrace4(fam: Family, mats) -> VerifyResult:
    """Both routes of the fiberwise trace square.

    Left-bottom: per-fiber traces followed by the augmentation.
    Top-right: the comparison isomorphism (the identity on the canonical
    bases, diagonals being split monic here) followed by the bicategorical
    trace of the hat cell computed through its duality data.
    """
    traces, _row = fam_fib_trace(fam, mats)
    pair = fiberwise_duality(fam)
    f = hat_2cell(fam, mats)
    tr_row = bicat_trace(pair, f)
    lhs = tuple(traces)
    rhs = tuple(tr_row.entries[0][j] for j in range(tr_row.cols))
    if lhs == rhs:
        return VerifyResult(True, "fiberwise trace square", str(lhs), str(rhs))
    bad = next(j for j in range(len(lhs)) if lhs[j] != rhs[j])
    return VerifyResult(
        False, "fiberwise trace square", str(lhs), str(rhs),
        witness=f"index {fam.index.labels[bad]}: {lhs[bad]} != {rhs[bad]}",
    )


def verify_totaltr(fam: Family, mats) -> VerifyResult:
    """Augmentation of the total-duality trace against the fiber-trace total."""
    total = fam_tot_trace(fam, mats)
    traces, _ = fam_fib_trace(fam, mats)
    lhs = total.augment()
    rhs = sum(traces)
    if lhs == rhs:
        return VerifyResult(True, "total trace triangle", str(lhs), str(rhs))
    return VerifyResult(
        False, "total trace triangle", str(lhs), str(rhs),
        witness=str(total),
    )
