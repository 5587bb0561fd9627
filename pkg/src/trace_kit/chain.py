"""Bounded chain complexes of finitely generated free integer modules.

Homological indexing: the differential lowers degree by one.  Tensor
products follow the Koszul rule: d(x (x) y) = dx (x) y + (-1)^p x (x) dy and
the symmetry x (x) y -> (-1)^{pq} y (x) x.  The dual complex transposes
ranks across degree 0 with the differential sign (-1)^n at source degree n;
the coevaluation/evaluation carry (-1)^p per degree.  These choices make
the triangle identities hold exactly and keep the Lefschetz number, the
alternating sum of degreewise traces, invariant under dualization.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import InputError
from .intlinalg import IntMatrix, kron, trace, cokernel_class, CokernelElement


@dataclass(frozen=True)
class ChainComplex:
    """Free integer chain complex concentrated in degrees [lo, hi].

    ``ranks[i]`` is the rank in degree lo+i; ``diffs[i]`` is the
    differential out of degree lo+i+1, an IntMatrix of shape
    rank(lo+i) x rank(lo+i+1).  Degrees outside [lo, hi] have rank zero.
    ``labels`` optionally names the basis in each degree.
    """

    lo: int
    hi: int
    ranks: tuple
    diffs: tuple
    labels: tuple = None

    def __post_init__(self):
        if self.hi < self.lo:
            raise InputError("chain complex needs lo <= hi")
        n_degrees = self.hi - self.lo + 1
        if len(self.ranks) != n_degrees:
            raise InputError("rank list does not match degree range")
        if any(r < 0 for r in self.ranks):
            raise InputError("ranks must be nonnegative")
        if len(self.diffs) != n_degrees - 1:
            raise InputError("differential list does not match degree range")
        for i, d in enumerate(self.diffs):
            if (d.rows, d.cols) != (self.ranks[i], self.ranks[i + 1]):
                raise InputError(
                    f"differential out of degree {self.lo + i + 1} has shape "
                    f"{d.rows}x{d.cols}, expected {self.ranks[i]}x{self.ranks[i + 1]}"
                )
        if self.labels is not None:
            if len(self.labels) != n_degrees:
                raise InputError("label list does not match degree range")
            for r, labs in zip(self.ranks, self.labels):
                if labs is not None and len(labs) != r:
                    raise InputError("label count does not match rank")
        validate(self)

    def rank(self, n: int) -> int:
        if self.lo <= n <= self.hi:
            return self.ranks[n - self.lo]
        return 0

    def diff(self, n: int) -> IntMatrix:
        """The differential C_n -> C_{n-1} (zero outside the stored range)."""
        if self.lo < n <= self.hi:
            return self.diffs[n - self.lo - 1]
        return IntMatrix.zeros(self.rank(n - 1), self.rank(n))

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def euler_characteristic(self) -> int:
        return sum((-1) ** (n % 2) * self.rank(n) for n in self.degrees())

    def labels_in(self, n: int):
        if self.labels is None or not (self.lo <= n <= self.hi):
            return None
        return self.labels[n - self.lo]


def validate(c: ChainComplex) -> str:
    """Confirm d . d = 0, or raise naming the first violating degree."""
    for n in range(c.lo + 2, c.hi + 1):
        prod = c.diff(n - 1) * c.diff(n)
        if not prod.is_zero():
            bad = next(
                (i, j)
                for i in range(prod.rows)
                for j in range(prod.cols)
                if prod.entries[i][j] != 0
            )
            raise InputError(
                f"d.d != 0 at degree {n}: entry {bad} is {prod.entries[bad[0]][bad[1]]}"
            )
    return "ok"


def unit_complex() -> ChainComplex:
    """Rank one in degree 0: the tensor unit."""
    return ChainComplex(0, 0, (1,), (), (("1",),))


@dataclass(frozen=True)
class ChainMap:
    """Degree-preserving map of complexes; squares with the differentials.

    ``mats`` is aligned with the source's degree range; degrees outside
    either complex act as zero.
    """

    source: ChainComplex
    target: ChainComplex
    mats: tuple

    def __post_init__(self):
        src, tgt = self.source, self.target
        if len(self.mats) != src.hi - src.lo + 1:
            raise InputError("chain map needs one matrix per source degree")
        for i, m in enumerate(self.mats):
            n = src.lo + i
            if (m.rows, m.cols) != (tgt.rank(n), src.rank(n)):
                raise InputError(
                    f"chain map has shape {m.rows}x{m.cols} in degree {n}, "
                    f"expected {tgt.rank(n)}x{src.rank(n)}"
                )
        for n in range(min(src.lo, tgt.lo) + 1, max(src.hi, tgt.hi) + 1):
            lhs = tgt.diff(n) * self.mat(n)
            rhs = self.mat(n - 1) * src.diff(n)
            if lhs != rhs:
                raise InputError(f"chain map square fails at degree {n}")

    def mat(self, n: int) -> IntMatrix:
        if self.source.lo <= n <= self.source.hi:
            return self.mats[n - self.source.lo]
        return IntMatrix.zeros(self.target.rank(n), self.source.rank(n))

    def is_endo(self) -> bool:
        return self.source == self.target


def identity_map(c: ChainComplex) -> ChainMap:
    return ChainMap(c, c, tuple(IntMatrix.identity(r) for r in c.ranks))


def compose_maps(first: ChainMap, then: ChainMap) -> ChainMap:
    """Composite applying ``first`` and then ``then``."""
    if first.target != then.source:
        raise InputError("chain maps do not compose: target != source")
    src = first.source
    mats = tuple(then.mat(n) * first.mat(n) for n in src.degrees())
    return ChainMap(src, then.target, mats)


def add_maps(f: ChainMap, g: ChainMap) -> ChainMap:
    if f.source != g.source or f.target != g.target:
        raise InputError("chain map addition shape mismatch")
    return ChainMap(f.source, f.target, tuple(a + b for a, b in zip(f.mats, g.mats)))


def lefschetz_trace(f: ChainMap) -> int:
    """Alternating sum of degreewise traces of a chain endomorphism."""
    if not f.is_endo():
        raise InputError("Lefschetz trace requires an endomorphism")
    return sum((-1) ** (n % 2) * trace(f.mat(n)) for n in f.source.degrees())


# ---------------------------------------------------------------------------
# Tensor products


def _from_grid(rows: int, cols: int, grid) -> IntMatrix:
    # shape-explicit so zero-row/zero-column matrices keep their dimensions
    return IntMatrix(rows, cols, tuple(tuple(row) for row in grid))


def _tensor_blocks(c: ChainComplex, d: ChainComplex, n: int):
    """Summands (p, q) of degree n, in basis order: ascending p."""
    out = []
    for p in c.degrees():
        q = n - p
        if d.lo <= q <= d.hi and c.rank(p) > 0 and d.rank(q) > 0:
            out.append((p, q))
    return out


def tensor(c: ChainComplex, d: ChainComplex) -> ChainComplex:
    """Tensor product with Koszul signs; basis ordered by (p, i, j)."""
    lo, hi = c.lo + d.lo, c.hi + d.hi
    ranks = []
    for n in range(lo, hi + 1):
        ranks.append(sum(c.rank(p) * d.rank(q) for p, q in _tensor_blocks(c, d, n)))
    diffs = []
    for n in range(lo + 1, hi + 1):
        src_blocks = _tensor_blocks(c, d, n)
        tgt_blocks = _tensor_blocks(c, d, n - 1)
        tgt_offsets = {}
        off = 0
        for p, q in tgt_blocks:
            tgt_offsets[(p, q)] = off
            off += c.rank(p) * d.rank(q)
        rows = ranks[n - 1 - lo]
        cols = ranks[n - lo]
        grid = [[0] * cols for _ in range(rows)]
        coff = 0
        for p, q in src_blocks:
            width = c.rank(p) * d.rank(q)
            parts = []
            if (p - 1, q) in tgt_offsets:
                parts.append((tgt_offsets[(p - 1, q)], kron(c.diff(p), IntMatrix.identity(d.rank(q)))))
            if (p, q - 1) in tgt_offsets:
                parts.append((tgt_offsets[(p, q - 1)], kron(IntMatrix.identity(c.rank(p)), d.diff(q), (-1) ** (p % 2))))
            for roff, block in parts:
                for i in range(block.rows):
                    row = grid[roff + i]
                    brow = block.entries[i]
                    for j in range(block.cols):
                        if brow[j]:
                            row[coff + j] += brow[j]
            coff += width
        diffs.append(_from_grid(rows, cols, grid))
    return ChainComplex(lo, hi, tuple(ranks), tuple(diffs))


def tensor_map(f: ChainMap, g: ChainMap) -> ChainMap:
    """Tensor of degree-zero chain maps (no Koszul sign in this case)."""
    src = tensor(f.source, g.source)
    tgt = tensor(f.target, g.target)
    mats = []
    for n in src.degrees():
        src_blocks = _tensor_blocks(f.source, g.source, n)
        tgt_blocks = _tensor_blocks(f.target, g.target, n)
        tgt_offsets = {}
        off = 0
        for p, q in tgt_blocks:
            tgt_offsets[(p, q)] = off
            off += f.target.rank(p) * g.target.rank(q)
        rows = tgt.rank(n)
        cols = src.rank(n)
        grid = [[0] * cols for _ in range(rows)]
        coff = 0
        for p, q in src_blocks:
            width = f.source.rank(p) * g.source.rank(q)
            if (p, q) in tgt_offsets:
                block = kron(f.mat(p), g.mat(q))
                roff = tgt_offsets[(p, q)]
                for i in range(block.rows):
                    row = grid[roff + i]
                    brow = block.entries[i]
                    for j in range(block.cols):
                        if brow[j]:
                            row[coff + j] += brow[j]
            coff += width
        mats.append(_from_grid(rows, cols, grid))
    return ChainMap(src, tgt, tuple(mats))


def symmetry_map(c: ChainComplex, d: ChainComplex) -> ChainMap:
    """The braiding C (x) D -> D (x) C with sign (-1)^{pq}."""
    src = tensor(c, d)
    tgt = tensor(d, c)
    mats = []
    for n in src.degrees():
        src_blocks = _tensor_blocks(c, d, n)
        tgt_blocks = _tensor_blocks(d, c, n)
        tgt_offsets = {}
        off = 0
        for q, p in tgt_blocks:
            tgt_offsets[(q, p)] = off
            off += d.rank(q) * c.rank(p)
        grid = [[0] * src.rank(n) for _ in range(tgt.rank(n))]
        coff = 0
        for p, q in src_blocks:
            rp, rq = c.rank(p), d.rank(q)
            sign = -1 if (p % 2) and (q % 2) else 1
            roff = tgt_offsets[(q, p)]
            for i in range(rp):
                for j in range(rq):
                    grid[roff + j * rp + i][coff + i * rq + j] = sign
            coff += rp * rq
        mats.append(_from_grid(tgt.rank(n), src.rank(n), grid))
    return ChainMap(src, tgt, tuple(mats))


def associator_map(a: ChainComplex, b: ChainComplex, c: ChainComplex) -> ChainMap:
    """(A (x) B) (x) C -> A (x) (B (x) C): a pure basis reindexing."""
    ab = tensor(a, b)
    bc = tensor(b, c)
    src = tensor(ab, c)
    tgt = tensor(a, bc)
    mats = []
    for n in src.degrees():
        grid = [[0] * src.rank(n) for _ in range(tgt.rank(n))]
        col = 0
        # source basis: (s, (p, i, j), k) with p+q = s, s+r = n
        for s, r in _tensor_blocks(ab, c, n):
            for p, q in _tensor_blocks(a, b, s):
                for i in range(a.rank(p)):
                    for j in range(b.rank(q)):
                        for k in range(c.rank(r)):
                            row = _triple_index_right(a, bc, b, c, n, p, q, r, i, j, k)
                            grid[row][col] = 1
                            col += 1
        mats.append(_from_grid(tgt.rank(n), src.rank(n), grid))
    return ChainMap(src, tgt, tuple(mats))


def _triple_index_right(a, bc, b, c, n, p, q, r, i, j, k):
    """Position of a_i (x) (b_j (x) c_k) inside (A (x) (B (x) C))_n."""
    off = 0
    for pp, w in _tensor_blocks(a, bc, n):
        if pp == p and w == q + r:
            inner_off = 0
            for qq, rr in _tensor_blocks(b, c, q + r):
                if qq == q and rr == r:
                    inner = inner_off + j * c.rank(r) + k
                    return off + i * bc.rank(q + r) + inner
                inner_off += b.rank(qq) * c.rank(rr)
            raise AssertionError("inner tensor block not found")
        off += a.rank(pp) * bc.rank(w)
    raise AssertionError("outer tensor block not found")


def inverse_permutation_map(f: ChainMap) -> ChainMap:
    """Inverse of a chain map whose matrices are signed permutations."""
    return ChainMap(f.target, f.source, tuple(f.mat(n).transpose() for n in f.target.degrees()))


def left_unitor(c: ChainComplex) -> ChainMap:
    """unit (x) C -> C (identity matrices degreewise)."""
    src = tensor(unit_complex(), c)
    return ChainMap(src, c, tuple(IntMatrix.identity(r) for r in src.ranks))


def right_unitor(c: ChainComplex) -> ChainMap:
    """C (x) unit -> C (identity matrices degreewise)."""
    src = tensor(c, unit_complex())
    return ChainMap(src, c, tuple(IntMatrix.identity(r) for r in src.ranks))


# ---------------------------------------------------------------------------
# Duality


@dataclass(frozen=True)
class Duality:
    """Dual complex with explicit coevaluation and evaluation.

    ``coev``: unit -> C (x) C*;  ``ev``: C* (x) C -> unit.  The triangle
    identities hold exactly as matrix equations (see check_triangles).
    """

    primal: ChainComplex
    dual: ChainComplex
    coev: ChainMap
    ev: ChainMap


def dual_complex(c: ChainComplex) -> ChainComplex:
    labels = None
    if c.labels is not None:
        labels = tuple(
            tuple(f"{lab}*" for lab in (c.labels_in(-n) or ())) if c.labels_in(-n) is not None else None
            for n in range(-c.hi, -c.lo + 1)
        )
    return ChainComplex(
        -c.hi,
        -c.lo,
        tuple(c.rank(-n) for n in range(-c.hi, -c.lo + 1)),
        tuple(
            c.diff(1 - n).transpose().scale((-1) ** (n % 2))
            for n in range(-c.hi + 1, -c.lo + 1)
        ),
        labels,
    )


def dual(c: ChainComplex) -> Duality:
    """Dual complex together with its duality data."""
    cd = dual_complex(c)
    cc = tensor(c, cd)
    coev_col = []
    for p, q in _tensor_blocks(c, cd, 0):
        sign = (-1) ** (p % 2)
        r = c.rank(p)
        block = [[0] for _ in range(r * r)]
        for i in range(r):
            block[i * r + i][0] = sign
        coev_col.extend(block)
    coev = ChainMap(
        unit_complex(), cc,
        (IntMatrix.from_rows(coev_col) if coev_col else IntMatrix.zeros(cc.rank(0), 1),),
    )
    dc = tensor(cd, c)
    ev_row = []
    for q, p in _tensor_blocks(cd, c, 0):
        sign = (-1) ** (p % 2)
        r = c.rank(p)
        for j in range(r):
            for i in range(r):
                ev_row.append(sign if i == j else 0)
    mats = []
    for n in dc.degrees():
        if n == 0:
            mats.append(IntMatrix.from_rows([ev_row]) if ev_row else IntMatrix.zeros(1, 0))
        else:
            mats.append(IntMatrix.zeros(0, dc.rank(n)))
    ev = ChainMap(dc, unit_complex(), tuple(mats))
    return Duality(c, cd, coev, ev)


def dual_map(f: ChainMap) -> ChainMap:
    """Transpose of a chain map between the dual complexes."""
    src = dual_complex(f.target)
    tgt = dual_complex(f.source)
    return ChainMap(src, tgt, tuple(f.mat(-n).transpose() for n in src.degrees()))


def check_triangles(d: Duality) -> bool:
    """Both triangle identities for the dual pair, as exact matrix identities."""
    c, cd = d.primal, d.dual
    # C ~ unit (x) C -> (C (x) C*) (x) C -> C (x) (C* (x) C) -> C (x) unit ~ C
    lhs = compose_maps(
        inverse_permutation_map(left_unitor(c)),
        compose_maps(
            tensor_map(d.coev, identity_map(c)),
            compose_maps(
                associator_map(c, cd, c),
                compose_maps(tensor_map(identity_map(c), d.ev), right_unitor(c)),
            ),
        ),
    )
    if lhs != identity_map(c):
        return False
    # C* ~ C* (x) unit -> C* (x) (C (x) C*) -> (C* (x) C) (x) C* -> unit (x) C* ~ C*
    rhs = compose_maps(
        inverse_permutation_map(right_unitor(cd)),
        compose_maps(
            tensor_map(identity_map(cd), d.coev),
            compose_maps(
                inverse_permutation_map(associator_map(cd, c, cd)),
                compose_maps(tensor_map(d.ev, identity_map(cd)), left_unitor(cd)),
            ),
        ),
    )
    return rhs == identity_map(cd)


# ---------------------------------------------------------------------------
# Twisted traces


def twisted_trace(f: ChainMap, p: ChainComplex) -> ChainMap:
    """Trace of f: C -> C (x) P against the duality of C: a map unit -> P.

    Computed by the closed form of the coevaluate/swap/evaluate composite:
    the coefficient of a degree-0 basis vector of P is the alternating sum
    over degrees n of the partial trace of the (C_n (x) P_0)-component of
    f_n.  The explicit composite is exercised against this in the tests.
    """
    c = f.source
    if f.target != tensor(c, p):
        raise InputError("twisted trace requires target == source (x) coefficient complex")
    rp0 = p.rank(0)
    coeffs = [0] * rp0
    for n in c.degrees():
        blocks = _tensor_blocks(c, p, n)
        if (n, 0) not in blocks:
            continue
        off = 0
        for bp, bq in blocks:
            if (bp, bq) == (n, 0):
                break
            off += c.rank(bp) * p.rank(bq)
        m = f.mat(n)
        sign = (-1) ** (n % 2)
        for k in range(rp0):
            coeffs[k] += sign * sum(m.entries[off + i * rp0 + k][i] for i in range(c.rank(n)))
    column = _from_grid(rp0, 1, [[x] for x in coeffs])
    return ChainMap(unit_complex(), p, (column,))


def twisted_trace_composite(f: ChainMap, p: ChainComplex) -> ChainMap:
    """The same trace as an explicit composite of structure maps (oracle)."""
    c = f.source
    if f.target != tensor(c, p):
        raise InputError("twisted trace requires target == source (x) coefficient complex")
    d = dual(c)
    cp = tensor(c, p)
    pipeline = [
        d.coev,                                             # unit -> C (x) C*
        tensor_map(f, identity_map(d.dual)),                # -> (C (x) P) (x) C*
        symmetry_map(cp, d.dual),                           # -> C* (x) (C (x) P)
        inverse_permutation_map(associator_map(d.dual, c, p)),  # -> (C* (x) C) (x) P
        tensor_map(d.ev, identity_map(p)),                  # -> unit (x) P
        left_unitor(p),                                     # -> P
    ]
    out = pipeline[0]
    for step in pipeline[1:]:
        out = compose_maps(out, step)
    return out


# ---------------------------------------------------------------------------
# Degree-zero homology


@dataclass(frozen=True)
class H0Class:
    """A class in coker(d_1) with the degree-0 basis labeling attached."""

    element: CokernelElement
    basis_labels: tuple


def h0_class(c: ChainComplex, cycle) -> H0Class:
    """Class of a degree-0 cycle in H_0 = coker(d_1)."""
    cycle = tuple(int(x) for x in cycle)
    if len(cycle) != c.rank(0):
        raise InputError("degree-0 cycle has wrong length")
    labels = c.labels_in(0)
    return H0Class(cokernel_class(c.diff(1), cycle), tuple(labels) if labels else None)
