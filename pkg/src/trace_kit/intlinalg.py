"""Exact integer matrix arithmetic: Smith normal form, cokernels, signed Kronecker products.

Everything here is dense and exact (arbitrary-precision Python ints).  No
floating point anywhere; instance sizes are small enough that asymptotics
do not matter, determinism and correctness do.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from .errors import InputError


def _check_int(x):
    # bool is an int subclass; keep it out so entries stay honest integers
    if type(x) is not int:
        raise InputError(f"matrix entries must be exact ints, got {x!r}")
    return x


@dataclass(frozen=True)
class IntMatrix:
    """Dense row-major integer matrix with exact arithmetic."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise InputError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows:
            raise InputError("entry row count does not match shape")
        for row in self.entries:
            if len(row) != self.cols:
                raise InputError("entry column count does not match shape")
            for x in row:
                _check_int(x)

    @staticmethod
    def from_rows(rows) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        ncols = len(rows[0]) if rows else 0
        return IntMatrix(len(rows), ncols, rows)

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols, self.rows,
            tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)),
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(-x for x in row) for row in self.entries))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InputError("matrix addition shape mismatch")
        return IntMatrix(
            self.rows, self.cols,
            tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(c * x for x in row) for row in self.entries))

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise InputError(
                f"matrix product shape mismatch: {self.rows}x{self.cols} * {other.rows}x{other.cols}"
            )
        # skip zero entries of the left factor; most matrices here are sparse
        brows = other.entries
        ncols = other.cols
        out = []
        for ra in self.entries:
            acc = [0] * ncols
            for k, a in enumerate(ra):
                if a:
                    brow = brows[k]
                    if a == 1:
                        for j, b in enumerate(brow):
                            if b:
                                acc[j] += b
                    else:
                        for j, b in enumerate(brow):
                            if b:
                                acc[j] += a * b
            out.append(tuple(acc))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def apply(self, vec) -> tuple:
        """Matrix times column vector (given and returned as a tuple)."""
        if len(vec) != self.cols:
            raise InputError("vector length does not match matrix columns")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.entries)

    def __str__(self):
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.entries) + "]"


def trace(a: IntMatrix) -> int:
    """Sum of diagonal entries of a square matrix."""
    if a.rows != a.cols:
        raise InputError(f"trace of non-square {a.rows}x{a.cols} matrix")
    return sum(a.entries[i][i] for i in range(a.rows))


def kron(a: IntMatrix, b: IntMatrix, sign: int = 1) -> IntMatrix:
    """Kronecker product scaled by ``sign`` (carrier for Koszul signs).

    Entry at (i*b.rows + k, j*b.cols + l) is sign * a[i,j] * b[k,l], so
    trace(kron(a, b, s)) = s * trace(a) * trace(b) for square inputs.
    """
    if sign not in (1, -1):
        raise InputError("kron sign must be +1 or -1")
    out = []
    for i in range(a.rows):
        arow = a.entries[i]
        for k in range(b.rows):
            brow = b.entries[k]
            out.append(tuple(sign * arow[j] * brow[l] for j in range(a.cols) for l in range(b.cols)))
    return IntMatrix(a.rows * b.rows, a.cols * b.cols, tuple(out))


def det(a: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if a.rows != a.cols:
        raise InputError("determinant of non-square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = [list(row) for row in a.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if pivot is None:
                return 0
            m[k], m[pivot] = m[pivot], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def is_unimodular(a: IntMatrix) -> bool:
    return a.rows == a.cols and det(a) in (1, -1)


def inverse_unimodular(a: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular matrix (integer by Cramer's rule)."""
    d = det(a)
    if d not in (1, -1):
        raise InputError("matrix is not unimodular")
    n = a.rows
    cof = []
    for i in range(n):
        row = []
        for j in range(n):
            minor_rows = [
                tuple(a.entries[r][c] for c in range(n) if c != j)
                for r in range(n) if r != i
            ]
            mdet = det(IntMatrix.from_rows(minor_rows)) if n > 1 else 1
            row.append((-1) ** (i + j) * mdet)
        cof.append(row)
    # adjugate is the transpose of the cofactor matrix; divide by det (+-1)
    adj = tuple(tuple(cof[j][i] * d for j in range(n)) for i in range(n))
    return IntMatrix(n, n, adj)


@dataclass(frozen=True)
class SnfResult:
    """Smith normal form data: u * a * v == s.

    ``u`` and ``v`` are unimodular; ``s`` is diagonal with nonnegative
    entries in a divisibility chain d1 | d2 | ...
    """

    u: IntMatrix
    s: IntMatrix
    v: IntMatrix

    def diagonal(self) -> tuple:
        n = min(self.s.rows, self.s.cols)
        return tuple(self.s.entries[i][i] for i in range(n))

    def invariant_factors(self) -> tuple:
        return tuple(d for d in self.diagonal() if d != 0)


@lru_cache(maxsize=4096)
def smith_normal_form(a: IntMatrix) -> SnfResult:
    """Diagonalize over the integers with unimodular row/column transforms.

    Pivot choice is the smallest nonzero absolute value, ties broken by
    row-major position, so the output is reproducible.  Results are cached;
    matrices are immutable so this is invisible.
    """
    m, n = a.rows, a.cols
    s = [list(row) for row in a.entries]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):
        # row_i += q * row_j
        si, sj = s[i], s[j]
        for k in range(n):
            si[k] += q * sj[k]
        ui, uj = u[i], u[j]
        for k in range(m):
            ui[k] += q * uj[k]

    def add_col(i, j, q):
        # col_i += q * col_j
        for row in s:
            row[i] += q * row[j]
        for row in v:
            row[i] += q * row[j]

    t = 0
    bound = min(m, n)
    while t < bound:
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                x = s[i][j]
                if x != 0 and (pivot is None or abs(x) < pivot[0]):
                    pivot = (abs(x), i, j)
        if pivot is None:
            break
        _, pi, pj = pivot
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            for i in range(t + 1, m):
                if s[i][t]:
                    add_row(i, t, -(s[i][t] // s[t][t]))
            resid = [i for i in range(t + 1, m) if s[i][t]]
            if resid:
                i = min(resid, key=lambda i: (abs(s[i][t]), i))
                swap_rows(t, i)
                continue
            for j in range(t + 1, n):
                if s[t][j]:
                    add_col(j, t, -(s[t][j] // s[t][t]))
            resid = [j for j in range(t + 1, n) if s[t][j]]
            if resid:
                j = min(resid, key=lambda j: (abs(s[t][j]), j))
                swap_cols(t, j)
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if s[i][j] % s[t][t] != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        t += 1

    for i in range(bound):
        if s[i][i] < 0:
            for k in range(n):
                s[i][k] = -s[i][k]
            for k in range(m):
                u[i][k] = -u[i][k]

    result = SnfResult(IntMatrix.from_rows(u), IntMatrix.from_rows(s), IntMatrix.from_rows(v))
    _check_snf(a, result)
    return result


def _check_snf(a: IntMatrix, r: SnfResult):
    if r.u * a * r.v != r.s:
        raise AssertionError("smith normal form transform identity failed")
    diag = r.diagonal()
    for i in range(r.s.rows):
        for j in range(r.s.cols):
            if i != j and r.s.entries[i][j] != 0:
                raise AssertionError("smith normal form result not diagonal")
    for d1, d2 in zip(diag, diag[1:]):
        if d1 < 0 or d2 < 0 or (d1 == 0 and d2 != 0) or (d1 != 0 and d2 % d1 != 0):
            raise AssertionError("smith normal form divisibility chain failed")


@dataclass(frozen=True)
class CokernelElement:
    """A class in coker(a) presented by residues against the invariant factors.

    ``moduli[i]`` is the i-th diagonal entry of the Smith form (0 for a free
    coordinate); ``residues[i]`` lies in [0, moduli[i]) when the modulus is
    positive and is exact otherwise.
    """

    moduli: tuple
    residues: tuple

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.residues)


def cokernel_class(a: IntMatrix, vec) -> CokernelElement:
    """Class of an integer vector in the cokernel of ``a``.

    Two vectors get equal classes exactly when their difference lies in the
    column span of ``a``.
    """
    vec = tuple(int(x) for x in vec)
    if len(vec) != a.rows:
        raise InputError(f"cokernel vector length {len(vec)} != rows {a.rows}")
    snf = smith_normal_form(a)
    y = snf.u.apply(vec)
    diag = snf.diagonal()
    moduli = []
    residues = []
    for i in range(a.rows):
        d = diag[i] if i < len(diag) else 0
        moduli.append(d)
        residues.append(y[i] % d if d > 0 else y[i])
    return CokernelElement(tuple(moduli), tuple(residues))


def solve_in_column_span(a: IntMatrix, vec) -> tuple | None:
    """Integer solution x of a*x = vec, or None.  SNF back-substitution."""
    vec = tuple(int(x) for x in vec)
    if len(vec) != a.rows:
        raise InputError("vector length does not match matrix rows")
    snf = smith_normal_form(a)
    y = snf.u.apply(vec)
    diag = snf.diagonal()
    z = []
    for i in range(a.cols):
        d = diag[i] if i < len(diag) else 0
        yi = y[i] if i < a.rows else 0
        if d == 0:
            if yi != 0:
                return None
            z.append(0)
        else:
            if yi % d != 0:
                return None
            z.append(yi // d)
    for i in range(a.cols, a.rows):
        if y[i] != 0:
            return None
    x = snf.v.apply(tuple(z))
    return x


def kernel_basis(a: IntMatrix) -> tuple:
    """Basis of the integer kernel {x : a*x = 0}, as column tuples."""
    snf = smith_normal_form(a)
    diag = snf.diagonal()
    cols = []
    for j in range(a.cols):
        d = diag[j] if j < len(diag) else 0
        if d == 0:
            cols.append(tuple(snf.v.entries[i][j] for i in range(a.cols)))
    return tuple(cols)


def gcd_of(values) -> int:
    g = 0
    for x in values:
        g = gcd(g, x)
    return g
