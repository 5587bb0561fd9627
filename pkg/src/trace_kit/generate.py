"""Seeded random instance generators.

Every generator produces data that satisfies the target invariants by
construction: endofunctors map components compatibly and close words along
the spanning forest, representation actions are products of elementary
matrices (hence unimodular), natural endomorphisms are transported from an
integer basis of the commutant at the component root, and random chain
endomorphisms are assembled from atom couplings and conjugated by random
unimodular basis changes.
"""

from __future__ import annotations

import random
from math import gcd

from .errors import InputError
from .freegpd import (
    Graph,
    GroupoidEnd,
    Letter,
    Word,
    compose,
    invert,
    pi0,
    reduce_word,
    spanning_forest,
)
from .gpdrep import GpdRep, RepEndo
from .intlinalg import IntMatrix, kernel_basis
from .chain import ChainComplex, ChainMap
from .matbicat import (
    Family,
    FinSet,
    FinGpdRep,
    FinSetFunctor,
    FormalSum,
    Group,
    cyclic_group,
    group_groupoid,
    symmetric_group,
)

KINDS = (
    "free-groupoid-endo",
    "gpd-rep",
    "matrix-family",
    "finite-groupoid-rep",
    "group-ring-matrix",
)


def generate_graph(rng: random.Random, max_objects: int = 6, max_generators: int = 8) -> Graph:
    n_obj = rng.randint(0, max_objects)
    objects = [f"x{i}" for i in range(n_obj)]
    n_gen = rng.randint(0, max_generators) if n_obj else 0
    generators = []
    for i in range(n_gen):
        generators.append((f"g{i}", rng.choice(objects), rng.choice(objects)))
    return Graph.make(objects, generators)


def _random_reduced_walk(rng, graph, start, length):
    """Reduced random walk from ``start``; returns the word (may be shorter)."""
    word = graph.identity_word(start)
    out_letters = {x: [] for x in graph.objects}
    for gen in graph.generators:
        out_letters[gen.src].append((gen.name, 1))
        out_letters[gen.tgt].append((gen.name, -1))
    for _ in range(length):
        options = list(out_letters[word.tgt])
        if word.letters:
            last = word.letters[-1]
            options = [o for o in options if o != (last.gen, -last.exp)]
        if not options:
            break
        name, exp = rng.choice(options)
        gen = graph.generator(name)
        a, b = (gen.src, gen.tgt) if exp == 1 else (gen.tgt, gen.src)
        word = compose(word, Word(graph, (Letter(name, exp),), a, b))
    return word


def _tree_path(graph, forest, a, b):
    oi = graph.object_index
    return compose(invert(forest.paths[oi[a]]), forest.paths[oi[b]])


def generate_endo(rng: random.Random, graph: Graph, max_word_len: int = 6) -> GroupoidEnd:
    """Random endofunctor: components map to components, words close up
    along the spanning forest so endpoints always match."""
    part = pi0(graph)
    forest = spanning_forest(graph)
    n_comp = part.component_count()
    comp_map = [rng.randrange(n_comp) for _ in range(n_comp)] if n_comp else []
    object_map = {}
    for x in graph.objects:
        target_comp = comp_map[part.component_of(x)]
        object_map[x] = rng.choice(part.members(target_comp))
    generator_map = {}
    for gen in graph.generators:
        u, v = object_map[gen.src], object_map[gen.tgt]
        walk = _random_reduced_walk(rng, graph, u, rng.randint(0, max_word_len))
        word = reduce_word(compose(walk, _tree_path(graph, forest, walk.tgt, v)))
        generator_map[gen.name] = word
    return GroupoidEnd.make(graph, object_map, generator_map)


def generate_unimodular(rng: random.Random, n: int, steps: int = None) -> IntMatrix:
    """Product of random elementary row operations: always determinant +-1."""
    if n == 0:
        return IntMatrix.identity(0)
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    if steps is None:
        steps = rng.randint(0, 2 * n + 2)
    for _ in range(steps):
        op = rng.randrange(3)
        i = rng.randrange(n)
        j = rng.randrange(n)
        if op == 0 and i != j:
            c = rng.choice((-2, -1, 1, 2))
            for k in range(n):
                m[i][k] += c * m[j][k]
        elif op == 1 and i != j:
            m[i], m[j] = m[j], m[i]
        elif op == 2:
            for k in range(n):
                m[i][k] = -m[i][k]
    return IntMatrix.from_rows(m)


def generate_gpd_rep(rng: random.Random, graph: Graph, max_rank: int = 3) -> GpdRep:
    part = pi0(graph)
    comp_rank = [rng.randint(0, max_rank) for _ in range(part.component_count())]
    ranks = {x: comp_rank[part.component_of(x)] for x in graph.objects}
    actions = {}
    for gen in graph.generators:
        actions[gen.name] = generate_unimodular(rng, ranks[gen.src])
    return GpdRep.make(graph, ranks, actions)


def _word_action(rep: GpdRep, word) -> IntMatrix:
    from .intlinalg import inverse_unimodular
    out = IntMatrix.identity(rep.rank_at(word.src))
    for let in word.letters:
        act = rep.action_of(let.gen)
        if let.exp == -1:
            act = inverse_unimodular(act)
        out = act * out
    return out


def generate_rep_endo(rng: random.Random, rep: GpdRep) -> RepEndo:
    """Natural endomorphism: solve the commutant at each component root
    (an integer kernel computation), pick a random combination, transport
    along the spanning forest."""
    graph = rep.graph
    forest = spanning_forest(graph)
    part = forest.partition
    from .freegpd import _realize_root_loop  # deterministic root loops
    from .intlinalg import inverse_unimodular

    mats = {}
    for comp in range(part.component_count()):
        root = part.representatives[comp]
        r = rep.rank_at(root)
        if r == 0:
            base = IntMatrix.identity(0)
        else:
            constraints = []
            for gi in forest.nontree_in_component(comp):
                loop = _realize_root_loop(forest, root, ((gi, 1),))
                hol = _word_action(rep, loop)
                # F*hol - hol*F = 0, unknowns F in row-major order
                for a in range(r):
                    for b in range(r):
                        row = [0] * (r * r)
                        for k in range(r):
                            row[a * r + k] += hol.entries[k][b]
                            row[k * r + b] -= hol.entries[a][k]
                        constraints.append(row)
            if constraints:
                basis = kernel_basis(IntMatrix.from_rows(constraints))
            else:
                basis = kernel_basis(IntMatrix.zeros(1, r * r))
            entries = [0] * (r * r)
            for vec in basis:
                c = rng.randint(-2, 2)
                if c:
                    for i, v in enumerate(vec):
                        entries[i] += c * v
            base = IntMatrix.from_rows([entries[i * r:(i + 1) * r] for i in range(r)])
        for x in part.members(comp):
            path = forest.paths[graph.object_index[x]]
            act = _word_action(rep, path)
            mats[x] = act * base * inverse_unimodular(act)
    return RepEndo.make(rep, mats)


# ---------------------------------------------------------------------------
# Random chain complexes with endomorphisms (atoms + basis change)


def generate_complex_with_endo(rng: random.Random, lo: int = -2, hi: int = 2,
                               max_rank: int = 4):
    """A random valid (complex, endomorphism) pair.

    Atoms are single generators or two-term pieces with a nonzero scalar
    differential; endomorphisms combine all couplings the chain condition
    allows; the whole thing is conjugated by random unimodular basis
    changes per degree so nothing looks special.
    """
    degrees = list(range(lo, hi + 1))
    atoms = []
    budget = {n: max_rank for n in degrees}
    n_atoms = rng.randint(0, 2 * max_rank)
    for _ in range(n_atoms):
        if rng.random() < 0.5:
            n = rng.choice(degrees)
            if budget[n] >= 1:
                atoms.append(("S", 0, n))
                budget[n] -= 1
        else:
            n = rng.choice([d for d in degrees if d > lo])
            if budget[n] >= 1 and budget[n - 1] >= 1:
                k = rng.choice((-3, -2, -1, 1, 2, 3))
                atoms.append(("D", k, n))
                budget[n] -= 1
                budget[n - 1] -= 1

    positions = []  # per atom: {degree: index}
    ranks = {n: 0 for n in degrees}
    for kind, k, n in atoms:
        pos = {n: ranks[n]}
        ranks[n] += 1
        if kind == "D":
            pos[n - 1] = ranks[n - 1]
            ranks[n - 1] += 1
        positions.append(pos)

    diff = {n: [[0] * ranks[n] for _ in range(ranks[n - 1])] for n in degrees if n > lo}
    for (kind, k, n), pos in zip(atoms, positions):
        if kind == "D":
            diff[n][pos[n - 1]][pos[n]] = k

    endo = {n: [[0] * ranks[n] for _ in range(ranks[n])] for n in degrees}

    def add(n, i, j, c):
        endo[n][i][j] += c

    for ai, ((ka, kka, na), pa) in enumerate(zip(atoms, positions)):
        for bi, ((kb, kkb, nb), pb) in enumerate(zip(atoms, positions)):
            s = rng.randint(-2, 2)
            if s == 0:
                continue
            if ka == "S" and kb == "S" and na == nb:
                add(na, pb[nb], pa[na], s)
            elif ka == "S" and kb == "D" and nb == na + 1:
                add(na, pb[nb - 1], pa[na], s)
            elif ka == "D" and kb == "S" and nb == na:
                add(na, pb[nb], pa[na], s)
            elif ka == "D" and kb == "D" and nb == na:
                g = gcd(kka, kkb)
                add(na, pb[nb], pa[na], s * (kka // g))
                add(na - 1, pb[nb - 1], pa[na - 1], s * (kkb // g))
            elif ka == "D" and kb == "D" and nb == na + 1:
                add(na, pb[nb - 1], pa[na], s)

    basis_change = {n: generate_unimodular(rng, ranks[n]) for n in degrees}
    from .intlinalg import inverse_unimodular
    inv_change = {n: inverse_unimodular(basis_change[n]) for n in degrees}

    rank_tuple = tuple(ranks[n] for n in degrees)
    diffs = []
    for n in degrees[1:]:
        d = IntMatrix(ranks[n - 1], ranks[n], tuple(tuple(r) for r in diff[n]))
        diffs.append(basis_change[n - 1] * d * inv_change[n])
    complex_ = ChainComplex(lo, hi, rank_tuple, tuple(diffs))
    mats = []
    for n in degrees:
        f = IntMatrix(ranks[n], ranks[n], tuple(tuple(r) for r in endo[n]))
        mats.append(basis_change[n] * f * inv_change[n])
    return complex_, ChainMap(complex_, complex_, tuple(mats))


# ---------------------------------------------------------------------------
# Matrix families, finite groupoid reps, group-ring matrices


def generate_family(rng: random.Random, max_index: int = 6, max_rank: int = 4):
    n = rng.randint(1, max_index)
    index = FinSet(tuple(f"a{i}" for i in range(n)))
    ranks = {a: rng.randint(0, max_rank) for a in index.labels}
    fam = Family.make(index, ranks)
    mats = {
        a: IntMatrix.from_rows(
            [[rng.randint(-3, 3) for _ in range(ranks[a])] for _ in range(ranks[a])]
        ) if ranks[a] else IntMatrix.identity(0)
        for a in index.labels
    }
    return fam, mats


_SMALL_GROUPS = ("C2", "C3", "C4", "S3")


def named_group(name: str) -> Group:
    if name == "C2":
        return cyclic_group(2)
    if name == "C3":
        return cyclic_group(3)
    if name == "C4":
        return cyclic_group(4)
    if name == "S3":
        return symmetric_group(3)
    raise InputError(f"unknown group name {name!r}")


def generate_fingpd_rep(rng: random.Random, max_objects: int = 3, max_rank: int = 3):
    """A connected finite groupoid with a representation and a natural endo.

    The representation conjugates a permutation representation of the
    isotropy group by random unimodular changes of basis per object; the
    endomorphism transports a random integer matrix commuting with the
    permutation action.
    """
    group = named_group(rng.choice(_SMALL_GROUPS))
    n_obj = rng.randint(1, max_objects)
    gpd = group_groupoid(group, tuple(f"o{i}" for i in range(n_obj)))
    order = len(group.elements)
    r = order  # regular representation rank
    perm = {}
    for gi in range(order):
        grid = [[0] * order for _ in range(order)]
        for hi in range(order):
            grid[group.mult[gi][hi]][hi] = 1
        perm[gi] = IntMatrix.from_rows(grid)
    change = {i: generate_unimodular(rng, r) for i in range(n_obj)}
    from .intlinalg import inverse_unimodular
    inv = {i: inverse_unimodular(change[i]) for i in range(n_obj)}
    mats = []
    for idx, label in enumerate(gpd.morphisms):
        i, j = gpd.src[idx], gpd.tgt[idx]
        gi = label.split(":")[1]
        mats.append(change[j] * perm[group.index(gi)] * inv[i])
    rep = FinGpdRep(gpd, tuple(r for _ in range(n_obj)), tuple(mats))
    # commutant of the regular representation: right multiplications
    entries = [[0] * r for _ in range(r)]
    for hi in range(order):
        c = rng.randint(-2, 2)
        if c:
            for gi in range(order):
                entries[group.mult[gi][hi]][gi] += c
    base = IntMatrix.from_rows(entries)
    endo = {
        gpd.objects[i]: change[i] * base * inv[i] for i in range(n_obj)
    }
    return rep, endo


def generate_group_ring_matrix(rng: random.Random, group: Group, max_size: int = 3,
                               coeff: int = 3, shape: tuple = None):
    if shape is None:
        n = rng.randint(1, max_size)
        shape = (n, n)
    return tuple(
        tuple(
            FormalSum.from_pairs(
                (g, rng.randint(-coeff, coeff)) for g in group.elements
            )
            for _ in range(shape[1])
        )
        for _ in range(shape[0])
    )


# ---------------------------------------------------------------------------
# Document-level entry point


def generate_instance(kind: str, seed: int, **sizes) -> dict:
    """A valid random input document for the CLI of the given kind."""
    rng = random.Random(seed)
    if kind == "free-groupoid-endo":
        graph = generate_graph(rng, sizes.get("max_objects", 4), sizes.get("max_generators", 6))
        endo = generate_endo(rng, graph, sizes.get("max_word_len", 5))
        return endo_document(endo)
    if kind == "gpd-rep":
        graph = generate_graph(rng, sizes.get("max_objects", 3), sizes.get("max_generators", 4))
        rep = generate_gpd_rep(rng, graph, sizes.get("max_rank", 3))
        endo = generate_rep_endo(rng, rep)
        return rep_document(rep, endo)
    if kind == "matrix-family":
        fam, mats = generate_family(rng, sizes.get("max_index", 6), sizes.get("max_rank", 4))
        return {
            "family": {
                "index": list(fam.index.labels),
                "ranks": {a: r for a, r in zip(fam.index.labels, fam.ranks)},
                "endo": {a: [list(row) for row in mats[a].entries] for a in fam.index.labels},
            }
        }
    if kind == "finite-groupoid-rep":
        rep, endo = generate_fingpd_rep(rng, sizes.get("max_objects", 2), sizes.get("max_rank", 3))
        gpd = rep.gpd
        return {
            "finite_groupoid": {
                "objects": list(gpd.objects),
                "morphisms": [
                    {"name": m, "src": gpd.objects[gpd.src[i]], "tgt": gpd.objects[gpd.tgt[i]]}
                    for i, m in enumerate(gpd.morphisms)
                ],
                "compose": [[c for c in row] for row in gpd.compose_table],
            },
            "fingpd_rep": {
                "ranks": {x: rep.ranks[i] for i, x in enumerate(gpd.objects)},
                "action": {m: [list(r) for r in rep.mats[i].entries] for i, m in enumerate(gpd.morphisms)},
            },
            "fingpd_endo": {x: [list(r) for r in endo[x].entries] for x in gpd.objects},
        }
    if kind == "group-ring-matrix":
        name = sizes.get("group", rng.choice(("C2", "C3", "S3")))
        group = named_group(name)
        mat = generate_group_ring_matrix(rng, group, sizes.get("max_size", 3), sizes.get("coeff", 3))
        return {
            "group": {"name": name},
            "group_matrix": [[entry.to_dict() for entry in row] for row in mat],
        }
    raise InputError(f"unknown instance kind {kind!r}; expected one of {KINDS}")


def rep_document(rep: GpdRep, endo: RepEndo = None) -> dict:
    graph = rep.graph
    doc = graph_document(graph)
    doc["rep"] = {
        "ranks": {x: rep.rank_at(x) for x in graph.objects},
        "action": {
            g.name: [list(r) for r in rep.action_of(g.name).entries]
            for g in graph.generators
        },
    }
    if endo is not None:
        doc["rep_endo"] = {x: [list(r) for r in endo.at(x).entries] for x in graph.objects}
    return doc


def graph_document(graph: Graph) -> dict:
    return {
        "graph": {
            "objects": list(graph.objects),
            "generators": [
                {"name": g.name, "src": g.src, "tgt": g.tgt} for g in graph.generators
            ],
        }
    }


def endo_document(endo: GroupoidEnd) -> dict:
    doc = graph_document(endo.graph)
    doc["endo"] = {
        "object_map": {x: endo.apply_object(x) for x in endo.graph.objects},
        "generator_map": {
            g.name: [[let.gen, let.exp] for let in endo.generator_image(g.name).letters]
            for g in endo.graph.generators
        },
    }
    return doc
