"""Fixed-point invariants of free-groupoid endofunctors.

Everything is computed twice, by independent routes that must agree:

* Lefschetz number: fixed objects plus signed self-occurrence counts,
  against the alternating trace of the induced two-term chain map.
* Transfer: the degree-zero homology class of the chain-level trace of the
  diagonal composed with the induced map, against the per-component closed
  form.
* Reidemeister trace: term-by-term contributions (+[id_x] for fixed
  objects, -eps_i [beta_i] per self-occurrence of a generator in its own
  image), merged under certified twisted conjugacy only; its coefficient
  sum must reproduce the Lefschetz number and its component projection the
  transfer.

Twisted class representatives are stored in the orientation x -> phi(x);
raw algorithm terms arrive in the opposite orientation and are inverted on
ingestion.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConsistencyError, InputError
from .formal import FormalSum
from .freegpd import (
    Graph,
    GroupoidEnd,
    Letter,
    Word,
    _ConjugationBall,
    _meet_witness,
    _twisted_engine,
    _witness_from_paths,
    loop_canonical,
    pi0,
    reduce_word,
    twisted_invariant,
)
from .intlinalg import IntMatrix
from .chain import ChainComplex, ChainMap, compose_maps, lefschetz_trace, tensor, twisted_trace


def sigma_complex(g: Graph) -> ChainComplex:
    """Two-term complex of the graph: generators over objects, d = target - source."""
    n0, n1 = len(g.objects), len(g.generators)
    rows = [[0] * n1 for _ in range(n0)]
    for j, gen in enumerate(g.generators):
        rows[g.object_index[gen.tgt]][j] += 1
        rows[g.object_index[gen.src]][j] -= 1
    d1 = IntMatrix(n0, n1, tuple(tuple(r) for r in rows))
    return ChainComplex(
        0, 1, (n0, n1), (d1,),
        (tuple(g.objects), tuple(gen.name for gen in g.generators)),
    )


def _signed_occurrences(endo: GroupoidEnd, gen_name: str, image: Word) -> int:
    return sum(let.exp for let in image.letters if let.gen == gen_name)


def sigma_map(endo: GroupoidEnd) -> ChainMap:
    """Chain map induced by an endofunctor on the graph complex.

    Degree 0 is the object map as a 0/1 matrix; degree 1 counts signed
    occurrences of each generator in each image word.
    """
    g = endo.graph
    c = sigma_complex(g)
    n0, n1 = len(g.objects), len(g.generators)
    m0 = [[0] * n0 for _ in range(n0)]
    for j, x in enumerate(g.objects):
        m0[g.object_index[endo.apply_object(x)]][j] = 1
    m1 = [[0] * n1 for _ in range(n1)]
    for j, gen in enumerate(g.generators):
        image = endo.generator_images[j]
        for let in image.letters:
            m1[g.generator_index[let.gen]][j] += let.exp
    return ChainMap(
        c, c,
        (IntMatrix(n0, n0, tuple(tuple(r) for r in m0)),
         IntMatrix(n1, n1, tuple(tuple(r) for r in m1))),
    )


def _lefschetz_combinatorial(endo: GroupoidEnd) -> int:
    g = endo.graph
    fixed = sum(1 for x in g.objects if endo.apply_object(x) == x)
    swaps = 0
    for gen, image in zip(g.generators, endo.generator_images):
        for let in image.letters:
            if let.gen == gen.name:
                swaps -= let.exp        # inverses count +1, plain occurrences -1
    return fixed + swaps


def lefschetz(endo: GroupoidEnd) -> int:
    """Fixed objects plus signed self-occurrences; checked against the chain trace."""
    combinatorial = _lefschetz_combinatorial(endo)
    chain_route = lefschetz_trace(sigma_map(endo))
    if combinatorial != chain_route:
        raise ConsistencyError(
            f"Lefschetz routes disagree: combinatorial {combinatorial}, "
            f"chain trace {chain_route}"
        )
    return combinatorial


def diagonal_map(g: Graph) -> ChainMap:
    """The diagonal of the graph complex: x -> x(x)x and
    gamma -> gamma(x)src + tgt(x)gamma."""
    c = sigma_complex(g)
    cc = tensor(c, c)
    n0, n1 = len(g.objects), len(g.generators)
    m0 = [[0] * n0 for _ in range(cc.rank(0))]
    for j, x in enumerate(g.objects):
        xi = g.object_index[x]
        m0[xi * n0 + xi][j] = 1
    # degree 1 of the square: block (0,1) then block (1,0)
    m1 = [[0] * n1 for _ in range(cc.rank(1))]
    off10 = n0 * n1
    for j, gen in enumerate(g.generators):
        si, ti = g.object_index[gen.src], g.object_index[gen.tgt]
        m1[ti * n1 + j][j] += 1                  # tgt (x) gamma in block (0,1)
        m1[off10 + j * n0 + si][j] += 1          # gamma (x) src in block (1,0)
    return ChainMap(
        c, cc,
        (IntMatrix(cc.rank(0), n0, tuple(tuple(r) for r in m0)),
         IntMatrix(cc.rank(1), n1, tuple(tuple(r) for r in m1))),
    )


def _component_label(part, obj: str) -> str:
    return part.representative_of(obj)


def transfer(endo: GroupoidEnd) -> FormalSum:
    """Component-refined fixed-point count.

    Route one: Lefschetz trace of the diagonal composed with the induced
    chain map, pushed to degree-zero homology and read in the component
    basis.  Route two: the combinatorial count restricted to each preserved
    component.  The two must agree exactly.
    """
    g = endo.graph
    part = pi0(g)
    c = sigma_complex(g)
    composite = compose_maps(sigma_map(endo), diagonal_map(g))
    cycle_map = twisted_trace(composite, c)
    cycle = tuple(cycle_map.mat(0).entries[i][0] for i in range(c.rank(0)))
    pairs = [
        (_component_label(part, x), cycle[i]) for i, x in enumerate(g.objects)
    ]
    homology_route = FormalSum.from_pairs(pairs)

    closed_pairs = []
    for comp in range(part.component_count()):
        members = set(part.members(comp))
        rep = part.representatives[comp]
        if endo.apply_object(rep) not in members:
            continue
        coeff = sum(1 for x in members if endo.apply_object(x) == x)
        for gen, image in zip(g.generators, endo.generator_images):
            if gen.src in members:
                for let in image.letters:
                    if let.gen == gen.name:
                        coeff -= let.exp
        closed_pairs.append((rep, coeff))
    closed_route = FormalSum.from_pairs(closed_pairs)

    if homology_route != closed_route:
        raise ConsistencyError(
            f"transfer routes disagree: homology {homology_route}, "
            f"closed form {closed_route}"
        )
    return homology_route


# ---------------------------------------------------------------------------
# Reidemeister trace


@dataclass(frozen=True)
class Exact:
    """Every merging decision was certified; the class count is exact."""


@dataclass(frozen=True)
class Bounded:
    """Some pairs stayed unresolved at the recorded witness-search bound."""

    bound: int
    unresolved: tuple  # pairs of representative Words


@dataclass(frozen=True)
class ReidemeisterTrace:
    """Formal sum over twisted-class representatives (orientation x -> phi(x)).

    ``raw_terms`` keeps the unmerged contributions so that a lower-resolution
    merged view never hides information when pairs stay unresolved.
    """

    endo: GroupoidEnd
    bound: int
    terms: FormalSum
    raw_terms: tuple
    classification: object

    def class_count(self) -> int:
        return len(self.terms.terms)


def _raw_reidemeister_terms(endo: GroupoidEnd):
    """Contributions read off the twisted chain map, already reoriented.

    A fixed object x contributes +[id_x].  A generator whose image word
    (application order, letters w_1 .. w_n) has w_i = gamma with exponent
    eps_i contributes -eps_i times the class of the inverse of
    beta_i = w_n^-1 ... w_{i+1}^-1 (prefixed by gamma when eps_i = -1),
    which in the stored orientation is the suffix w_{i+1} .. w_n, preceded
    by gamma^-1 when eps_i = -1.
    """
    g = endo.graph
    terms = []
    for x in g.objects:
        if endo.apply_object(x) == x:
            terms.append((1, g.identity_word(x)))
    for gen, image in zip(g.generators, endo.generator_images):
        letters = image.letters
        for i, let in enumerate(letters):
            if let.gen != gen.name:
                continue
            suffix = letters[i + 1:]
            if let.exp == 1:
                delta = Word(g, suffix, gen.tgt, image.tgt)
            else:
                delta = Word(g, (Letter(gen.name, -1),) + suffix, gen.tgt, image.tgt)
            terms.append((-let.exp, reduce_word(delta)))
    return terms


def reidemeister_trace(endo: GroupoidEnd, bound: int = 8) -> ReidemeisterTrace:
    """Fixed-point classes with their indices.

    Raw terms are accumulated per identical representative, then merged
    under certified twisted equivalence: exactly (via conjugacy canonical
    forms) when the endofunctor is the identity, otherwise by the bounded
    two-sided procedure.  Unresolved pairs are reported, never silently
    merged or cancelled.
    """
    if bound < 1:
        raise InputError("witness search bound must be a positive integer")
    raw = _raw_reidemeister_terms(endo)
    accumulated = {}
    for coeff, word in raw:
        accumulated[word] = accumulated.get(word, 0) + coeff
    entries = [(w, c) for w, c in accumulated.items() if c != 0]
    entries.sort(key=lambda wc: (len(wc[0].letters), str(wc[0])))

    unresolved = []
    if endo.is_identity():
        merged = FormalSum.from_pairs(
            (loop_canonical(w), c) for w, c in entries
        )
        classification = Exact()
        return ReidemeisterTrace(endo, bound, merged, tuple(raw), classification)

    # union-find over the distinct representatives
    parent = list(range(len(entries)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    # bucket by the cheap complete-for-Distinct invariants, then search for
    # witnesses with one lazily grown conjugation ball per term
    part = pi0(endo.graph)
    engine = _twisted_engine(endo)
    buckets = {}
    for i, (word, _) in enumerate(entries):
        key = (part.component_of(word.src), twisted_invariant(word, endo))
        buckets.setdefault(key, []).append(i)
    radius = bound - bound // 2
    balls = {}

    def ball_of(i):
        if i not in balls:
            balls[i] = _ConjugationBall(engine, engine.encode(entries[i][0]))
        return balls[i]

    unresolved_idx = []
    for bucket in buckets.values():
        for ii, i in enumerate(bucket):
            for j in bucket[ii + 1:]:
                if find(i) == find(j):
                    continue
                meet = _meet_witness(engine, ball_of(i), ball_of(j), radius, radius)
                if meet is None:
                    unresolved_idx.append((i, j))
                else:
                    _state, path1, path2 = meet
                    _witness_from_paths(engine, entries[i][0], entries[j][0], path1, path2)
                    parent[find(j)] = find(i)

    groups = {}
    for i, (word, coeff) in enumerate(entries):
        groups.setdefault(find(i), []).append((word, coeff))
    group_rep = {}
    merged_pairs = []
    for root, members in groups.items():
        rep = min((w for w, _ in members), key=lambda w: (len(w.letters), str(w)))
        group_rep[root] = rep
        total = sum(c for _, c in members)
        if total != 0:
            merged_pairs.append((rep, total))
    merged = FormalSum.from_pairs(merged_pairs)
    live = set(merged.labels())
    unresolved = []
    for i, j in unresolved_idx:
        a, b = group_rep[find(i)], group_rep[find(j)]
        if a != b and a in live and b in live and (a, b) not in unresolved:
            unresolved.append((a, b))
    classification = Bounded(bound, tuple(unresolved)) if unresolved else Exact()
    return ReidemeisterTrace(endo, bound, merged, tuple(raw), classification)


def rt_augment(rt: ReidemeisterTrace) -> int:
    """Coefficient sum; merging never changes it, and it must equal the
    Lefschetz number of the endofunctor that produced the trace."""
    return rt.terms.augment()


def rt_project_pi0(rt: ReidemeisterTrace) -> FormalSum:
    """Push every class to the component of its base object."""
    part = pi0(rt.endo.graph)
    return rt.terms.map_labels(lambda w: _component_label(part, w.src))
