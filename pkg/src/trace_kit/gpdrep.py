"""Representations of free groupoids on finitely generated free abelian groups.

A representation assigns a rank to each object and a unimodular integer
matrix to each generator.  A natural endomorphism of such a representation
has a class-function trace: a formal sum of identity classes, one per
connected component, with two closed forms that must agree.  The same data
also feeds a two-term chain complex whose Lefschetz trace must match the
trace's augmentation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConsistencyError, InputError
from .formal import FormalSum
from .freegpd import Graph, GroupoidEnd, collapse_edge, loop_canonical, spanning_forest
from .intlinalg import IntMatrix, inverse_unimodular, is_unimodular, trace
from .chain import ChainComplex, ChainMap, lefschetz_trace


@dataclass(frozen=True)
class GpdRep:
    """Rank per object plus a unimodular action matrix per generator.

    The action matrix of a generator maps coordinates at its source to
    coordinates at its target (columns indexed by the source basis), so
    invertibility forces ranks to be constant on components.
    """

    graph: Graph
    ranks: tuple    # aligned with graph.objects
    actions: tuple  # aligned with graph.generators

    def __post_init__(self):
        g = self.graph
        if len(self.ranks) != len(g.objects):
            raise InputError("representation needs a rank per object")
        if any(r < 0 for r in self.ranks):
            raise InputError("ranks must be nonnegative")
        if len(self.actions) != len(g.generators):
            raise InputError("representation needs an action per generator")
        for gen, m in zip(g.generators, self.actions):
            rs = self.rank_at(gen.src)
            rt = self.rank_at(gen.tgt)
            if (m.rows, m.cols) != (rt, rs):
                raise InputError(
                    f"action of {gen.name} has shape {m.rows}x{m.cols}, expected {rt}x{rs}"
                )
            if not is_unimodular(m):
                raise InputError(f"action of {gen.name} is not invertible over the integers")

    @staticmethod
    def make(graph: Graph, ranks, actions) -> "GpdRep":
        return GpdRep(
            graph,
            tuple(ranks[x] for x in graph.objects),
            tuple(actions[g.name] for g in graph.generators),
        )

    def rank_at(self, obj: str) -> int:
        return self.ranks[self.graph.object_index[obj]]

    def action_of(self, name: str) -> IntMatrix:
        return self.actions[self.graph.generator_index[name]]


@dataclass(frozen=True)
class RepEndo:
    """Per-object square matrices commuting with every generator action."""

    rep: GpdRep
    mats: tuple  # aligned with graph.objects

    def __post_init__(self):
        g = self.rep.graph
        if len(self.mats) != len(g.objects):
            raise InputError("endomorphism needs a matrix per object")
        for x, m in zip(g.objects, self.mats):
            r = self.rep.rank_at(x)
            if (m.rows, m.cols) != (r, r):
                raise InputError(f"endomorphism at {x} has shape {m.rows}x{m.cols}, expected {r}x{r}")
        for gen, act in zip(g.generators, self.rep.actions):
            lhs = self.at(gen.tgt) * act
            rhs = act * self.at(gen.src)
            if lhs != rhs:
                raise InputError(f"naturality fails at generator {gen.name}")

    @staticmethod
    def make(rep: GpdRep, mats) -> "RepEndo":
        return RepEndo(rep, tuple(mats[x] for x in rep.graph.objects))

    def at(self, obj: str) -> IntMatrix:
        return self.mats[self.rep.graph.object_index[obj]]


def _identity_class_label(graph: Graph, obj: str):
    return loop_canonical(graph.identity_word(obj))


def rep_total_trace(rep: GpdRep, endo: RepEndo) -> FormalSum:
    """Trace of a natural endomorphism as a sum of identity classes.

    Route one sums tr(f_x) over objects minus tr(f at target) over
    generators, merging identity classes by component.  Route two is the
    closed form (1 - loops_c) * tr(f at root) per component, where loops_c
    counts the non-tree generators of the component.  Disagreement is a
    hard failure.
    """
    g = rep.graph
    pairs = []
    for x in g.objects:
        pairs.append((_identity_class_label(g, x), trace(endo.at(x))))
    for gen in g.generators:
        pairs.append((_identity_class_label(g, gen.tgt), -trace(endo.at(gen.tgt))))
    per_object_route = FormalSum.from_pairs(pairs)

    forest = spanning_forest(g)
    part = forest.partition
    closed = []
    for comp in range(part.component_count()):
        root = part.representatives[comp]
        loops = len(forest.nontree_in_component(comp))
        coeff = (1 - loops) * trace(endo.at(root))
        closed.append((_identity_class_label(g, root), coeff))
    closed_route = FormalSum.from_pairs(closed)

    if per_object_route != closed_route:
        raise ConsistencyError(
            f"representation trace routes disagree: {per_object_route} vs {closed_route}"
        )
    return per_object_route


def collapse_rep(rep: GpdRep, endo: RepEndo, gen_name: str):
    """Collapse a non-loop edge and transport representation and endomorphism.

    The edge action is absorbed into adjacent generators; a natural
    endomorphism stays natural under the transport.  Returns the new pair
    together with the object rename map.
    """
    g = rep.graph
    edge = g.generator(gen_name)
    if edge.src == edge.tgt:
        raise InputError("cannot collapse a loop edge")
    collapsed_id, q = collapse_edge(GroupoidEnd.identity(g), gen_name)
    g2 = collapsed_id.graph
    v = edge.tgt
    e_act = rep.action_of(gen_name)
    e_inv = inverse_unimodular(e_act)
    ranks = {x: rep.rank_at(x) for x in g2.objects}
    actions = {}
    for gen in g2.generators:
        original = g.generator(gen.name)
        act = rep.action_of(gen.name)
        if original.src == v:
            act = act * e_act
        if original.tgt == v:
            act = e_inv * act
        actions[gen.name] = act
    new_rep = GpdRep.make(g2, ranks, actions)
    new_endo = RepEndo.make(new_rep, {x: endo.at(x) for x in g2.objects})
    return new_rep, new_endo, q


def _hocolim_bases(rep: GpdRep):
    g = rep.graph
    deg0 = [(x, p) for x in g.objects for p in range(rep.rank_at(x))]
    deg1 = [(gen.name, p) for gen in g.generators for p in range(rep.rank_at(gen.src))]
    return deg0, deg1


def hocolim_complex(rep: GpdRep) -> ChainComplex:
    """Two-term complex computing the homotopy colimit of the representation.

    Degree-one basis: (generator, source basis vector); degree zero:
    (object, basis vector).  The differential of (gamma, p) is the signed
    difference of the action against the source inclusion, oriented so that
    the trivial rank-one representation reproduces the graph complex
    exactly (target minus source).
    """
    g = rep.graph
    deg0, deg1 = _hocolim_bases(rep)
    index0 = {key: i for i, key in enumerate(deg0)}
    grid = [[0] * len(deg1) for _ in range(len(deg0))]
    for j, (name, p) in enumerate(deg1):
        gen = g.generator(name)
        act = rep.action_of(name)
        for q in range(rep.rank_at(gen.tgt)):
            if act.entries[q][p]:
                grid[index0[(gen.tgt, q)]][j] += act.entries[q][p]
        grid[index0[(gen.src, p)]][j] -= 1
    d1 = IntMatrix(len(deg0), len(deg1), tuple(tuple(r) for r in grid))
    labels0 = tuple(f"{x}|{p}" for x, p in deg0)
    labels1 = tuple(f"{name}|{p}" for name, p in deg1)
    return ChainComplex(0, 1, (len(deg0), len(deg1)), (d1,), (labels0, labels1))


def hocolim_endo(rep: GpdRep, endo: RepEndo) -> ChainMap:
    """Blockwise action of a natural endomorphism on the colimit complex.

    Its Lefschetz trace must equal the augmentation-style sum
    sum_x tr(f_x) - sum_gamma tr(f at target); disagreement is a hard
    failure.
    """
    c = hocolim_complex(rep)
    g = rep.graph
    deg0, deg1 = _hocolim_bases(rep)
    index0 = {key: i for i, key in enumerate(deg0)}
    index1 = {key: i for i, key in enumerate(deg1)}
    m0 = [[0] * len(deg0) for _ in range(len(deg0))]
    for j, (x, p) in enumerate(deg0):
        f = endo.at(x)
        for q in range(rep.rank_at(x)):
            if f.entries[q][p]:
                m0[index0[(x, q)]][j] = f.entries[q][p]
    m1 = [[0] * len(deg1) for _ in range(len(deg1))]
    for j, (name, p) in enumerate(deg1):
        gen = g.generator(name)
        f = endo.at(gen.src)
        for q in range(rep.rank_at(gen.src)):
            if f.entries[q][p]:
                m1[index1[(name, q)]][j] = f.entries[q][p]
    out = ChainMap(
        c, c,
        (IntMatrix(len(deg0), len(deg0), tuple(tuple(r) for r in m0)),
         IntMatrix(len(deg1), len(deg1), tuple(tuple(r) for r in m1))),
    )
    chain_route = lefschetz_trace(out)
    block_route = sum(trace(endo.at(x)) for x in g.objects) - sum(
        trace(endo.at(gen.tgt)) for gen in g.generators
    )
    if chain_route != block_route:
        raise ConsistencyError(
            f"hocolim trace routes disagree: chain {chain_route}, blockwise {block_route}"
        )
    return out
