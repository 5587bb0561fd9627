"""Randomized theorem-verification suites.

Each suite draws seeded random instances, evaluates an identity by two
independent routes, and collects pass/fail counts.  A failure records the
offending instance as a document so the single check can be re-run.
Reports are deterministic functions of (suite, instances, seed, bound);
wall-clock time is never part of the report body.
"""

from __future__ import annotations

import random
from itertools import product

from .errors import ConsistencyError
from .formal import FormalSum
from . import generate as gen
from .freegpd import collapse_edge, pi0
from .fixpt import (
    lefschetz,
    reidemeister_trace,
    rt_augment,
    rt_project_pi0,
    sigma_complex,
    sigma_map,
    transfer,
)
from .gpdrep import hocolim_endo, rep_total_trace
from .chain import (
    check_triangles,
    dual,
    dual_map,
    lefschetz_trace,
    tensor_map,
    twisted_trace,
    twisted_trace_composite,
    unit_complex,
    tensor,
    ChainMap,
)
from .intlinalg import IntMatrix, trace
from .matbicat import (
    FinSet,
    dual_pair_triangles,
    fiberwise_duality,
    gr_augment_matrix,
    gr_matmul,
    hattori_stallings,
    mat_compose,
    Mat2,
    MatCell,
    set_transfer,
    shadow_hexagon_holds,
    shadow_theta,
    shadow_unit_holds,
    theta_naturality_holds,
    total_duality,
    verify_fibtrace4,
    verify_totaltr,
)

SUITES = (
    "circle",
    "lefschetz",
    "reidemeister",
    "transfer",
    "collapse",
    "chain",
    "gpdrep",
    "matrix",
    "hattori-stallings",
    "set-transfer",
)


class SuiteRun:
    """Pass/fail accumulator for one suite."""

    def __init__(self, name):
        self.name = name
        self.passed = 0
        self.failed = 0
        self.failures = []

    def check(self, ok: bool, witness=None):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if witness is not None and len(self.failures) < 10:
                self.failures.append(witness)

    def report(self) -> dict:
        out = {"passed": self.passed, "failed": self.failed}
        if self.failures:
            out["failures"] = self.failures
        return out


def _suite_circle(run: SuiteRun, rng, instances, bound):
    from .freegpd import Graph, GroupoidEnd, twisted_invariant

    g = Graph.make(["x"], [("a", "x", "x")])
    for d in range(-2, 4):
        if d >= 0:
            image = [("a", 1)] * d
        else:
            image = [("a", -1)] * (-d)
        endo = GroupoidEnd.make(g, {"x": "x"}, {"a": image})
        ok = lefschetz(endo) == 1 - d
        rt = reidemeister_trace(endo, bound)
        ok = ok and rt_augment(rt) == 1 - d
        if d != 1:
            seenv = set()
            for k in range(0, 2 * abs(d - 1) + 1):
                word = g.word([("a", 1)] * k, at="x") if k else g.identity_word("x")
                seenv.add(twisted_invariant(word, endo))
            ok = ok and len(seenv) == abs(d - 1)
        run.check(ok, witness={"degree": d})


def _suite_lefschetz(run, rng, instances, bound):
    for _ in range(instances):
        graph = gen.generate_graph(rng, 6, 8)
        endo = gen.generate_endo(rng, graph, 6)
        try:
            lefschetz(endo)
            run.check(True)
        except ConsistencyError:
            run.check(False, witness=gen.endo_document(endo))


def _suite_reidemeister(run, rng, instances, bound):
    for _ in range(instances):
        graph = gen.generate_graph(rng, 6, 8)
        endo = gen.generate_endo(rng, graph, 6)
        rt = reidemeister_trace(endo, bound)
        run.check(rt_augment(rt) == lefschetz(endo), witness=gen.endo_document(endo))


def _suite_transfer(run, rng, instances, bound):
    for _ in range(instances):
        graph = gen.generate_graph(rng, 6, 8)
        endo = gen.generate_endo(rng, graph, 6)
        rt = reidemeister_trace(endo, bound)
        try:
            ok = rt_project_pi0(rt) == transfer(endo)
        except ConsistencyError:
            ok = False
        run.check(ok, witness=gen.endo_document(endo))


def _suite_collapse(run, rng, instances, bound):
    done = 0
    while done < instances:
        graph = gen.generate_graph(rng, 6, 8)
        edges = [g.name for g in graph.generators if g.src != g.tgt]
        if not edges:
            continue
        endo = gen.generate_endo(rng, graph, 6)
        name = rng.choice(edges)
        collapsed, q = collapse_edge(endo, name)
        part_old = pi0(endo.graph)
        part_new = pi0(collapsed.graph)
        ok = lefschetz(endo) == lefschetz(collapsed)
        rt_old = reidemeister_trace(endo, bound)
        rt_new = reidemeister_trace(collapsed, bound)
        ok = ok and rt_augment(rt_old) == rt_augment(rt_new)
        moved = rt_project_pi0(rt_old).map_labels(
            lambda rep: part_new.representative_of(q(rep))
        )
        ok = ok and moved == rt_project_pi0(rt_new)
        run.check(ok, witness={**gen.endo_document(endo), "collapsed_edge": name})
        done += 1


def _suite_chain(run, rng, instances, bound):
    for _ in range(instances):
        c1, f1 = gen.generate_complex_with_endo(rng)
        c2, f2 = gen.generate_complex_with_endo(rng)
        ok = lefschetz_trace(tensor_map(f1, f2)) == lefschetz_trace(f1) * lefschetz_trace(f2)
        ok = ok and lefschetz_trace(dual_map(f1)) == lefschetz_trace(f1)
        run.check(ok)
    # triangle identities and the twisted-trace composite on small graph complexes
    small = max(3, instances // 10)
    for _ in range(small):
        graph = gen.generate_graph(rng, 3, 4)
        endo = gen.generate_endo(rng, graph, 4)
        c = sigma_complex(graph)
        ok = check_triangles(dual(c))
        composite = sigma_map(endo)
        u = unit_complex()
        cu = tensor(c, u)
        as_twisted = ChainMap(c, cu, composite.mats)
        ok = ok and twisted_trace(as_twisted, u) == twisted_trace_composite(as_twisted, u)
        run.check(ok, witness=gen.endo_document(endo))


def _suite_gpdrep(run, rng, instances, bound):
    for _ in range(instances):
        graph = gen.generate_graph(rng, 4, 5)
        rep = gen.generate_gpd_rep(rng, graph, 3)
        endo = gen.generate_rep_endo(rng, rep)
        try:
            total = rep_total_trace(rep, endo)
            he = hocolim_endo(rep, endo)
            ok = total.augment() == lefschetz_trace(he)
        except ConsistencyError:
            ok = False
        run.check(ok, witness=None if ok else gen.rep_document(rep, endo))


def _suite_matrix(run, rng, instances, bound):
    for _ in range(instances):
        fam, mats = gen.generate_family(rng)
        r1 = verify_fibtrace4(fam, mats)
        r2 = verify_totaltr(fam, mats)
        ok = r1.passed and r2.passed
        ok = ok and dual_pair_triangles(fiberwise_duality(fam))
        ok = ok and dual_pair_triangles(total_duality(fam))
        run.check(ok, witness=None if ok else {"lhs": r1.lhs, "rhs": r1.rhs})
    for _ in range(instances):
        na, nb = rng.randint(1, 4), rng.randint(1, 4)
        a = FinSet(tuple(f"a{i}" for i in range(na)))
        b = FinSet(tuple(f"b{i}" for i in range(nb)))
        m = MatCell(a, b, tuple(tuple(rng.randint(0, 3) for _ in range(nb)) for _ in range(na)))
        n = MatCell(b, a, tuple(tuple(rng.randint(0, 3) for _ in range(na)) for _ in range(nb)))
        ok = shadow_theta(m, n).compose(shadow_theta(n, m)).is_identity()
        ok = ok and theta_naturality_holds(_random_2cell(rng, m), _random_2cell(rng, n))
        p = MatCell(a, a, tuple(tuple(rng.randint(0, 2) for _ in range(na)) for _ in range(na)))
        q = MatCell(a, b, tuple(tuple(rng.randint(0, 2) for _ in range(nb)) for _ in range(na)))
        r = MatCell(b, a, tuple(tuple(rng.randint(0, 2) for _ in range(na)) for _ in range(nb)))
        ok = ok and shadow_hexagon_holds(p, q, r)
        ok = ok and shadow_unit_holds(mat_compose(m, n))
        run.check(ok)


def _random_2cell(rng, cell: MatCell) -> Mat2:
    tgt = MatCell(
        cell.src, cell.tgt,
        tuple(tuple(rng.randint(0, 3) for _ in row) for row in cell.ranks),
    )
    blocks = tuple(
        tuple(
            IntMatrix.from_rows(
                [[rng.randint(-2, 2) for _ in range(cell.ranks[i][j])]
                 for _ in range(tgt.ranks[i][j])]
            ) if tgt.ranks[i][j] else IntMatrix.zeros(0, cell.ranks[i][j])
            for j in range(len(cell.tgt))
        )
        for i in range(len(cell.src))
    )
    return Mat2(cell, tgt, blocks)


def _suite_hattori_stallings(run, rng, instances, bound):
    for name in ("C2", "C3", "S3"):
        group = gen.named_group(name)
        per_group = max(1, instances // 3)
        for _ in range(per_group):
            k, l = rng.randint(1, 3), rng.randint(1, 3)
            m = gen.generate_group_ring_matrix(rng, group, shape=(k, l))
            n = gen.generate_group_ring_matrix(rng, group, shape=(l, k))
            ok = hattori_stallings(group, gr_matmul(group, m, n)) == hattori_stallings(
                group, gr_matmul(group, n, m)
            )
            m = gen.generate_group_ring_matrix(rng, group, 3, 3)
            u, uinv = _elementary_over_group_ring(rng, group, len(m))
            conj = gr_matmul(group, gr_matmul(group, u, m), uinv)
            ok = ok and hattori_stallings(group, conj) == hattori_stallings(group, m)
            ok = ok and hattori_stallings(group, m).augment() == trace(gr_augment_matrix(m))
            run.check(ok, witness={"group": name})


def _elementary_over_group_ring(rng, group, n):
    """A random elementary matrix over the group ring and its exact inverse."""
    identity = tuple(
        tuple(
            FormalSum.single(group.elements[group.identity_index]) if i == j else FormalSum.zero()
            for j in range(n)
        )
        for i in range(n)
    )
    if n == 1:
        g = rng.choice(group.elements)
        sign = rng.choice((1, -1))
        ginv = group.elements[group.inverses[group.index(g)]]
        return ((FormalSum.single(g, sign),),), ((FormalSum.single(ginv, sign),),)
    i = rng.randrange(n)
    j = rng.randrange(n)
    while j == i:
        j = rng.randrange(n)
    r = FormalSum.from_pairs(
        (g, rng.randint(-2, 2)) for g in group.elements if rng.random() < 0.6
    )
    u = [list(row) for row in identity]
    uinv = [list(row) for row in identity]
    u[i][j] = u[i][j] + r
    uinv[i][j] = uinv[i][j] - r
    return tuple(tuple(row) for row in u), tuple(tuple(row) for row in uinv)


def _suite_set_transfer(run, rng, instances, bound):
    limit = 4 if instances <= 100 else 5
    for n in range(0, limit + 1):
        fs = FinSet(tuple(str(i) for i in range(n)))
        for values in product(range(n), repeat=n):
            mapping = {str(i): str(values[i]) for i in range(n)}
            expected = FormalSum.from_pairs(
                (str(i), 1) for i in range(n) if values[i] == i
            )
            run.check(set_transfer(fs, mapping) == expected,
                      witness={"size": n, "map": mapping})


_SUITE_FNS = {
    "circle": _suite_circle,
    "lefschetz": _suite_lefschetz,
    "reidemeister": _suite_reidemeister,
    "transfer": _suite_transfer,
    "collapse": _suite_collapse,
    "chain": _suite_chain,
    "gpdrep": _suite_gpdrep,
    "matrix": _suite_matrix,
    "hattori-stallings": _suite_hattori_stallings,
    "set-transfer": _suite_set_transfer,
}


def run_suites(suite: str, instances: int, seed: int, bound: int) -> dict:
    """Run one suite (or all) and return the deterministic report document."""
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in _SUITE_FNS:
            from .errors import InputError
            raise InputError(f"unknown suite {name!r}; expected one of {('all',) + SUITES}")
    report = {
        "command": "verify",
        "suite": suite,
        "instances": instances,
        "seed": seed,
        "bound": bound,
        "suites": {},
    }
    ok = True
    for name in names:
        rng = random.Random((seed, name).__repr__())
        run = SuiteRun(name)
        _SUITE_FNS[name](run, rng, instances, bound)
        report["suites"][name] = run.report()
        ok = ok and run.failed == 0
    report["ok"] = ok
    return report
