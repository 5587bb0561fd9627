"""Exact integer linear algebra, checked against independent oracles."""

import random
from itertools import combinations
from math import gcd

import pytest

from trace_kit.errors import InputError
from trace_kit.intlinalg import (
    CokernelElement,
    IntMatrix,
    cokernel_class,
    det,
    is_unimodular,
    inverse_unimodular,
    kernel_basis,
    kron,
    smith_normal_form,
    solve_in_column_span,
    trace,
)


def rand_matrix(rng, rows, cols, lo=-9, hi=9):
    return IntMatrix.from_rows(
        [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]
    )


def minor_gcds(a):
    """gcd of all k x k minors, for each k: the classical SNF oracle."""
    out = []
    for k in range(1, min(a.rows, a.cols) + 1):
        g = 0
        for rows in combinations(range(a.rows), k):
            for cols in combinations(range(a.cols), k):
                sub = IntMatrix.from_rows(
                    [[a.entries[i][j] for j in cols] for i in rows]
                )
                g = gcd(g, det(sub))
        out.append(g)
    return out


def check_snf_invariants(a, r):
    assert r.u * a * r.v == r.s
    assert is_unimodular(r.u) and is_unimodular(r.v)
    diag = r.diagonal()
    for i in range(r.s.rows):
        for j in range(r.s.cols):
            if i != j:
                assert r.s.entries[i][j] == 0
    for d1, d2 in zip(diag, diag[1:]):
        assert d1 >= 0 and d2 >= 0
        if d1 == 0:
            assert d2 == 0
        else:
            assert d2 % d1 == 0


def test_snf_identity():
    for n in (1, 2, 5):
        r = smith_normal_form(IntMatrix.identity(n))
        assert r.s == IntMatrix.identity(n)
        check_snf_invariants(IntMatrix.identity(n), r)


def test_snf_single_entry():
    r = smith_normal_form(IntMatrix.from_rows([[2]]))
    assert r.s == IntMatrix.from_rows([[2]])


def test_snf_against_minor_gcd_oracle():
    rng = random.Random(11)
    for _ in range(25):
        a = rand_matrix(rng, 5, 7)
        r = smith_normal_form(a)
        check_snf_invariants(a, r)
        gcds = minor_gcds(a)
        prev = 1
        expected = []
        for g in gcds:
            expected.append(0 if g == 0 else g // prev)
            if g:
                prev = g
        diag = list(r.diagonal())
        # once a minor gcd vanishes all later invariant factors vanish
        for k, e in enumerate(expected):
            assert diag[k] == e


def test_snf_zero_and_empty():
    r = smith_normal_form(IntMatrix.zeros(3, 2))
    assert r.s == IntMatrix.zeros(3, 2)
    r = smith_normal_form(IntMatrix.zeros(0, 4))
    assert r.s.rows == 0 and r.s.cols == 4


def test_cokernel_column_span_is_zero():
    rng = random.Random(5)
    for _ in range(20):
        a = rand_matrix(rng, 4, 3, -4, 4)
        x = [rng.randint(-3, 3) for _ in range(3)]
        v = a.apply(x)
        assert cokernel_class(a, v).is_zero()


def test_cokernel_mod_two():
    c = cokernel_class(IntMatrix.from_rows([[2]]), (1,))
    assert c.moduli == (2,)
    assert c.residues == (1,)


def test_cokernel_equality_matches_lattice_membership():
    rng = random.Random(7)
    for _ in range(40):
        a = rand_matrix(rng, 4, 3, -3, 3)
        v = tuple(rng.randint(-6, 6) for _ in range(4))
        w = tuple(rng.randint(-6, 6) for _ in range(4))
        same = cokernel_class(a, v) == cokernel_class(a, w)
        diff = tuple(x - y for x, y in zip(v, w))
        x = solve_in_column_span(a, diff)
        if x is None:
            assert not same
        else:
            assert a.apply(x) == diff
            assert same


def test_cokernel_congruence():
    rng = random.Random(9)
    for _ in range(20):
        a = rand_matrix(rng, 3, 3, -3, 3)
        v = tuple(rng.randint(-5, 5) for _ in range(3))
        w = tuple(rng.randint(-5, 5) for _ in range(3))
        u = tuple(rng.randint(-5, 5) for _ in range(3))
        if cokernel_class(a, v) == cokernel_class(a, w):
            vu = tuple(x + y for x, y in zip(v, u))
            wu = tuple(x + y for x, y in zip(w, u))
            assert cokernel_class(a, vu) == cokernel_class(a, wu)


def test_cokernel_dimension_mismatch():
    with pytest.raises(InputError):
        cokernel_class(IntMatrix.identity(2), (1,))


def test_trace_examples():
    assert trace(IntMatrix.identity(4)) == 4
    assert trace(IntMatrix.from_rows([[0, 1], [1, 0]])) == 0
    with pytest.raises(InputError):
        trace(IntMatrix.zeros(2, 3))


def test_trace_cyclicity():
    rng = random.Random(13)
    for _ in range(30):
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        a = rand_matrix(rng, n, m, -5, 5)
        b = rand_matrix(rng, m, n, -5, 5)
        assert trace(a * b) == trace(b * a)


def test_kron_examples():
    assert kron(IntMatrix.identity(2), IntMatrix.identity(3)) == IntMatrix.identity(6)
    a = IntMatrix.from_rows([[1, 2], [3, 4]])
    b = IntMatrix.from_rows([[0, 1], [1, 1]])
    assert kron(a, b, -1) == -kron(a, b, 1)


def test_kron_index_formula_and_trace():
    rng = random.Random(17)
    for _ in range(20):
        ra, ca = rng.randint(1, 3), rng.randint(1, 3)
        rb, cb = rng.randint(1, 3), rng.randint(1, 3)
        a = rand_matrix(rng, ra, ca, -4, 4)
        b = rand_matrix(rng, rb, cb, -4, 4)
        s = rng.choice((1, -1))
        k = kron(a, b, s)
        for i in range(ra):
            for j in range(ca):
                for p in range(rb):
                    for q in range(cb):
                        assert k.entries[i * rb + p][j * cb + q] == s * a.entries[i][j] * b.entries[p][q]
    a = rand_matrix(rng, 3, 3)
    b = rand_matrix(rng, 2, 2)
    assert trace(kron(a, b, -1)) == -trace(a) * trace(b)


def test_unimodular_inverse():
    rng = random.Random(19)
    from trace_kit.generate import generate_unimodular
    for _ in range(15):
        n = rng.randint(1, 4)
        u = generate_unimodular(rng, n)
        assert is_unimodular(u)
        assert u * inverse_unimodular(u) == IntMatrix.identity(n)


def test_kernel_basis_spans_kernel():
    rng = random.Random(23)
    for _ in range(15):
        a = rand_matrix(rng, 3, 5, -3, 3)
        basis = kernel_basis(a)
        for vec in basis:
            assert all(x == 0 for x in a.apply(vec))
