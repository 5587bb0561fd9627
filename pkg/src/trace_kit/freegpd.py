"""Finitely generated free groupoids presented by finite directed graphs.

A graph declares objects and generating arrows; morphisms are reduced words
in the generators and their inverses.  Words are stored in application
order: ``letters[0]`` acts first.  (Displayed composites elsewhere read
right-to-left, so transcriptions must reverse.)

The module provides free reduction, composition, endofunctors, connected
components, conjugacy canonical forms via a spanning-forest retraction, and
a sound two-sided semi-decision procedure for twisted conjugacy
(delta2 ~ phi(alpha) . delta1 . alpha^-1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import InputError
from .intlinalg import IntMatrix, cokernel_class, CokernelElement


@dataclass(frozen=True)
class GeneratorArrow:
    name: str
    src: str
    tgt: str


@dataclass(frozen=True)
class Graph:
    """A finite directed graph: the presentation of a free groupoid."""

    objects: tuple
    generators: tuple

    def __post_init__(self):
        names = [g.name for g in self.generators]
        labels = list(self.objects) + names
        if len(set(labels)) != len(labels):
            raise InputError("object and generator labels must be distinct")
        objset = set(self.objects)
        for g in self.generators:
            if g.src not in objset or g.tgt not in objset:
                raise InputError(f"generator {g.name}: endpoints must be declared objects")

    @staticmethod
    def make(objects, generators) -> "Graph":
        gens = tuple(
            g if isinstance(g, GeneratorArrow) else GeneratorArrow(*g) for g in generators
        )
        return Graph(tuple(objects), gens)

    @cached_property
    def object_index(self) -> dict:
        return {x: i for i, x in enumerate(self.objects)}

    @cached_property
    def generator_index(self) -> dict:
        return {g.name: i for i, g in enumerate(self.generators)}

    def generator(self, name: str) -> GeneratorArrow:
        try:
            return self.generators[self.generator_index[name]]
        except KeyError:
            raise InputError(f"unknown generator {name!r}") from None

    def word(self, letters, at=None) -> "Word":
        """Build a word from (name, exp) pairs in application order.

        ``at`` names the base object for the empty word.
        """
        lets = tuple(Letter(name, exp) for name, exp in letters)
        if not lets:
            if at is None:
                raise InputError("empty word needs an explicit base object")
            if at not in self.object_index:
                raise InputError(f"unknown object {at!r}")
            return Word(self, (), at, at)
        src = self.letter_src(lets[0])
        tgt = self.letter_tgt(lets[-1])
        return Word(self, lets, src, tgt)

    def identity_word(self, obj: str) -> "Word":
        return self.word((), at=obj)

    def letter_src(self, letter: "Letter") -> str:
        g = self.generator(letter.gen)
        return g.src if letter.exp == 1 else g.tgt

    def letter_tgt(self, letter: "Letter") -> str:
        g = self.generator(letter.gen)
        return g.tgt if letter.exp == 1 else g.src


@dataclass(frozen=True)
class Letter:
    """A generator or its inverse: exp is +1 or -1."""

    gen: str
    exp: int

    def __post_init__(self):
        if self.exp not in (1, -1):
            raise InputError(f"letter exponent must be +1 or -1, got {self.exp}")

    def inverse(self) -> "Letter":
        return Letter(self.gen, -self.exp)

    def __str__(self):
        return self.gen if self.exp == 1 else f"{self.gen}^-1"


@dataclass(frozen=True)
class Word:
    """A composable path: letters in application order with explicit endpoints."""

    graph: Graph
    letters: tuple
    src: str
    tgt: str

    def __post_init__(self):
        g = self.graph
        if self.src not in g.object_index or self.tgt not in g.object_index:
            raise InputError("word endpoints must be declared objects")
        if not self.letters:
            if self.src != self.tgt:
                raise InputError("empty word must have equal endpoints")
            return
        cur = self.src
        for letter in self.letters:
            if g.letter_src(letter) != cur:
                raise InputError(
                    f"letters do not compose: {letter} starts at "
                    f"{g.letter_src(letter)!r}, expected {cur!r}"
                )
            cur = g.letter_tgt(letter)
        if cur != self.tgt:
            raise InputError("word target does not match last letter")

    def is_loop(self) -> bool:
        return self.src == self.tgt

    def is_reduced(self) -> bool:
        return all(
            not (a.gen == b.gen and a.exp == -b.exp)
            for a, b in zip(self.letters, self.letters[1:])
        )

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        body = "*".join(str(let) for let in self.letters) if self.letters else "id"
        return f"{body}@{self.src}"


def _reduce_letters(letters) -> tuple:
    out = []
    for let in letters:
        if out and out[-1].gen == let.gen and out[-1].exp == -let.exp:
            out.pop()
        else:
            out.append(let)
    return tuple(out)


def reduce_word(w: Word) -> Word:
    """The unique freely reduced word equal to ``w``.  Idempotent."""
    return Word(w.graph, _reduce_letters(w.letters), w.src, w.tgt)


def compose(w1: Word, w2: Word) -> Word:
    """Reduced concatenation: ``w1`` acts first, then ``w2``."""
    if w1.graph != w2.graph:
        raise InputError("cannot compose words over different graphs")
    if w1.tgt != w2.src:
        raise InputError(f"endpoint mismatch: {w1.tgt!r} then {w2.src!r}")
    return Word(w1.graph, _reduce_letters(w1.letters + w2.letters), w1.src, w2.tgt)


def invert(w: Word) -> Word:
    """Reversal with exponents flipped; compose(w, invert(w)) reduces to id."""
    return Word(w.graph, tuple(let.inverse() for let in reversed(w.letters)), w.tgt, w.src)


def conjugate(w: Word, a: Word) -> Word:
    """a^-1 . w . a read right-to-left: apply ``a`` first, then ``w``, then back."""
    return compose(compose(a, w), invert(a))


@dataclass(frozen=True)
class GroupoidEnd:
    """An endofunctor of the free groupoid: object map plus generator images.

    Generator images are stored reduced; signed occurrence counts are
    invariant under reduction, so nothing downstream can tell the
    difference and determinism improves.
    """

    graph: Graph
    object_images: tuple   # aligned with graph.objects
    generator_images: tuple  # aligned with graph.generators, reduced Words

    def __post_init__(self):
        g = self.graph
        if len(self.object_images) != len(g.objects):
            raise InputError("endofunctor must map every object")
        for y in self.object_images:
            if y not in g.object_index:
                raise InputError(f"object image {y!r} is not a declared object")
        if len(self.generator_images) != len(g.generators):
            raise InputError("endofunctor must map every generator")
        for gen, w in zip(g.generators, self.generator_images):
            if w.graph != g:
                raise InputError(f"image of {gen.name} lives on a different graph")
            if not w.is_reduced():
                raise InputError(f"image of {gen.name} must be stored reduced")
            if w.src != self.apply_object(gen.src) or w.tgt != self.apply_object(gen.tgt):
                raise InputError(
                    f"image of {gen.name} has endpoints {w.src!r}->{w.tgt!r}, "
                    f"expected {self.apply_object(gen.src)!r}->{self.apply_object(gen.tgt)!r}"
                )

    @staticmethod
    def make(graph: Graph, object_map, generator_map) -> "GroupoidEnd":
        """Build from mappings; generator images may be Words or letter lists."""
        obj_images = []
        for x in graph.objects:
            if x not in object_map:
                raise InputError(f"object map missing {x!r}")
            obj_images.append(object_map[x])
        gen_images = []
        for g in graph.generators:
            if g.name not in generator_map:
                raise InputError(f"generator map missing {g.name!r}")
            img = generator_map[g.name]
            if not isinstance(img, Word):
                img = graph.word(img, at=object_map[g.src])
            gen_images.append(reduce_word(img))
        return GroupoidEnd(graph, tuple(obj_images), tuple(gen_images))

    @staticmethod
    def identity(graph: Graph) -> "GroupoidEnd":
        return GroupoidEnd(
            graph,
            tuple(graph.objects),
            tuple(graph.word(((g.name, 1),)) for g in graph.generators),
        )

    def apply_object(self, x: str) -> str:
        return self.object_images[self.graph.object_index[x]]

    def generator_image(self, name: str) -> Word:
        return self.generator_images[self.graph.generator_index[name]]

    def is_identity(self) -> bool:
        if self.object_images != self.graph.objects:
            return False
        return all(
            w.letters == (Letter(g.name, 1),)
            for g, w in zip(self.graph.generators, self.generator_images)
        )


def apply_endo(endo: GroupoidEnd, w: Word) -> Word:
    """Letterwise substitution by the endofunctor, then free reduction."""
    if w.graph != endo.graph:
        raise InputError("word and endofunctor live on different graphs")
    letters = []
    for let in w.letters:
        img = endo.generator_image(let.gen)
        if let.exp == 1:
            letters.extend(img.letters)
        else:
            letters.extend(l.inverse() for l in reversed(img.letters))
    return Word(
        endo.graph,
        _reduce_letters(tuple(letters)),
        endo.apply_object(w.src),
        endo.apply_object(w.tgt),
    )


# ---------------------------------------------------------------------------
# Connected components and the spanning forest


@dataclass(frozen=True)
class Pi0Partition:
    """Partition of objects by undirected connectivity."""

    graph: Graph
    component_ids: tuple      # aligned with graph.objects
    representatives: tuple    # one object label per component, by component id

    def component_of(self, obj: str) -> int:
        return self.component_ids[self.graph.object_index[obj]]

    def representative_of(self, obj: str) -> str:
        return self.representatives[self.component_of(obj)]

    def component_count(self) -> int:
        return len(self.representatives)

    def members(self, comp: int) -> tuple:
        return tuple(
            x for x, c in zip(self.graph.objects, self.component_ids) if c == comp
        )


@lru_cache(maxsize=None)
def pi0(graph: Graph) -> Pi0Partition:
    """Connected components, ignoring edge direction.  BFS in declaration order."""
    n = len(graph.objects)
    adj = [[] for _ in range(n)]
    for g in graph.generators:
        si, ti = graph.object_index[g.src], graph.object_index[g.tgt]
        adj[si].append(ti)
        adj[ti].append(si)
    comp = [-1] * n
    reps = []
    for start in range(n):
        if comp[start] != -1:
            continue
        cid = len(reps)
        reps.append(graph.objects[start])
        queue = [start]
        comp[start] = cid
        while queue:
            cur = queue.pop(0)
            for nxt in adj[cur]:
                if comp[nxt] == -1:
                    comp[nxt] = cid
                    queue.append(nxt)
    return Pi0Partition(graph, tuple(comp), tuple(reps))


@dataclass(frozen=True)
class SpanningForest:
    """BFS spanning forest with root paths and the non-tree generator basis.

    ``paths[i]`` is a reduced word from the component root to object i.
    ``nontree`` lists generator indices outside the forest, in declaration
    order; restricted to one component they freely generate its isotropy
    group at the root.
    """

    graph: Graph
    partition: Pi0Partition
    tree_gens: frozenset
    paths: tuple
    nontree: tuple

    def nontree_in_component(self, comp: int) -> tuple:
        part = self.partition
        g = self.graph
        return tuple(
            gi for gi in self.nontree
            if part.component_of(g.generators[gi].src) == comp
        )


@lru_cache(maxsize=None)
def spanning_forest(graph: Graph) -> SpanningForest:
    part = pi0(graph)
    n = len(graph.objects)
    incident = [[] for _ in range(n)]
    for gi, g in enumerate(graph.generators):
        si, ti = graph.object_index[g.src], graph.object_index[g.tgt]
        incident[si].append((gi, 1, ti))
        if ti != si:
            incident[ti].append((gi, -1, si))
    paths = [None] * n
    tree = set()
    for rep in part.representatives:
        ri = graph.object_index[rep]
        paths[ri] = graph.identity_word(rep)
        queue = [ri]
        while queue:
            cur = queue.pop(0)
            for gi, exp, nxt in incident[cur]:
                if paths[nxt] is None:
                    tree.add(gi)
                    step = Word(
                        graph,
                        (Letter(graph.generators[gi].name, exp),),
                        graph.objects[cur],
                        graph.objects[nxt],
                    )
                    paths[nxt] = compose(paths[cur], step)
                    queue.append(nxt)
    nontree = tuple(gi for gi in range(len(graph.generators)) if gi not in tree)
    return SpanningForest(graph, part, frozenset(tree), tuple(paths), nontree)


def _retract_letters(forest: SpanningForest, w: Word) -> tuple:
    """Image of a loop under collapsing the forest: (nontree index, exp) pairs."""
    g = forest.graph
    out = []
    for let in w.letters:
        gi = g.generator_index[let.gen]
        if gi in forest.tree_gens:
            continue
        if out and out[-1][0] == gi and out[-1][1] == -let.exp:
            out.pop()
        else:
            out.append((gi, let.exp))
    return tuple(out)


def _root_loop(forest: SpanningForest, w: Word) -> Word:
    """Conjugate a loop at x to a loop at its component root along the forest."""
    g = forest.graph
    path = forest.paths[g.object_index[w.src]]
    return compose(compose(path, w), invert(path))


def loop_canonical(w: Word) -> Word:
    """Canonical representative of the conjugacy class of a loop.

    Retract along the spanning forest to a free-group word on non-tree
    generators, cyclically reduce, take the lexicographically minimal
    rotation (generators in declaration order, positive exponent first),
    and realize the result as a reduced loop at the component root.  Two
    loops are conjugate in the groupoid iff their canonical forms are equal.
    """
    if not w.is_loop():
        raise InputError("loop_canonical requires src == tgt")
    g = w.graph
    forest = spanning_forest(g)
    letters = list(_retract_letters(forest, _root_loop(forest, reduce_word(w))))
    while len(letters) >= 2 and letters[0][0] == letters[-1][0] and letters[0][1] == -letters[-1][1]:
        letters = letters[1:-1]
    root = forest.partition.representative_of(w.src)
    if not letters:
        return g.identity_word(root)

    def key(seq):
        return tuple((gi, 0 if exp == 1 else 1) for gi, exp in seq)

    best = min(
        (letters[i:] + letters[:i] for i in range(len(letters))),
        key=key,
    )
    return _realize_root_loop(forest, root, best)


def _realize_root_loop(forest: SpanningForest, root: str, pairs) -> Word:
    """Spell a non-tree letter sequence as an honest loop at the root."""
    g = forest.graph
    oi = g.object_index
    word = g.identity_word(root)
    for gi, exp in pairs:
        gen = g.generators[gi]
        a, b = (gen.src, gen.tgt) if exp == 1 else (gen.tgt, gen.src)
        hop = compose(invert(forest.paths[oi[word.tgt]]), forest.paths[oi[a]])
        step = Word(g, (Letter(gen.name, exp),), a, b)
        word = compose(compose(word, hop), step)
    back = compose(invert(forest.paths[oi[word.tgt]]), forest.paths[oi[root]])
    return compose(word, back)


# ---------------------------------------------------------------------------
# Twisted conjugacy


@dataclass(frozen=True)
class Equivalent:
    """The words are twisted-conjugate; the witness satisfies
    delta2 = apply_endo(phi, alpha) . delta1 . alpha^-1 exactly."""

    witness: Word


@dataclass(frozen=True)
class Distinct:
    """The words are provably inequivalent: an invariant differs."""

    reason: str
    left: object = None
    right: object = None


@dataclass(frozen=True)
class Unknown:
    """Neither certificate found searching witnesses of length <= bound."""

    bound: int


def twisted_shape_check(delta: Word, endo: GroupoidEnd):
    if delta.graph != endo.graph:
        raise InputError("twisted loop and endofunctor live on different graphs")
    if delta.tgt != endo.apply_object(delta.src):
        raise InputError(
            f"not a twisted loop: {delta} should run from x to phi(x) = "
            f"{endo.apply_object(delta.src)!r}"
        )


@lru_cache(maxsize=None)
def _twisted_component_data(endo: GroupoidEnd, comp: int):
    """Root transport word, abelianized twist matrix, and its cokernel matrix.

    Only meaningful for components whose root lands back in the component
    under the endofunctor (which holds whenever any twisted loop exists
    there); returns None otherwise.
    """
    g = endo.graph
    forest = spanning_forest(g)
    part = forest.partition
    root = part.representatives[comp]
    if part.component_of(endo.apply_object(root)) != comp:
        return None
    t_word = forest.paths[g.object_index[endo.apply_object(root)]]
    nontree = forest.nontree_in_component(comp)
    pos = {gi: k for k, gi in enumerate(nontree)}
    rank = len(nontree)
    cols = []
    for gi in nontree:
        base_loop = _realize_root_loop(forest, root, ((gi, 1),))
        image = compose(compose(t_word, apply_endo(endo, base_loop)), invert(t_word))
        vec = [0] * rank
        for hj, exp in _retract_letters(forest, image):
            vec[pos[hj]] += exp
        cols.append(vec)
    twist = IntMatrix.from_rows(
        [[cols[j][i] for j in range(rank)] for i in range(rank)]
    )
    return (root, t_word, pos, twist, twist - IntMatrix.identity(rank))


def twisted_invariant(delta: Word, endo: GroupoidEnd) -> CokernelElement:
    """Abelianized twisted-class invariant: the class of ``delta`` in the
    cokernel of (abelianized twist - identity) on its component."""
    twisted_shape_check(delta, endo)
    g = endo.graph
    forest = spanning_forest(g)
    comp = forest.partition.component_of(delta.src)
    data = _twisted_component_data(endo, comp)
    if data is None:
        raise InputError("component admits no twisted loops for this endofunctor")
    root, t_word, pos, _twist, coker_matrix = data
    path = forest.paths[g.object_index[delta.src]]
    root_delta = compose(
        compose(path, delta),
        compose(invert(apply_endo(endo, path)), invert(t_word)),
    )
    vec = [0] * len(pos)
    for gi, exp in _retract_letters(forest, root_delta):
        vec[pos[gi]] += exp
    return cokernel_class(coker_matrix, vec)


class _TwistedEngine:
    """Integer-coded single-letter twisted-conjugation moves.

    Letters are coded 2*generator_index + (0 for +1, 1 for -1), so the
    inverse of a code is code ^ 1.  A state is (object index, code tuple)
    for a reduced twisted loop; one move sends delta to
    phi(letter) . delta . letter^-1.
    """

    def __init__(self, endo: GroupoidEnd):
        g = endo.graph
        self.endo = endo
        self.graph = g
        n = len(g.generators)
        src = []
        tgt = []
        for gen in g.generators:
            si, ti = g.object_index[gen.src], g.object_index[gen.tgt]
            src += [si, ti]
            tgt += [ti, si]
        self.code_src = tuple(src)
        self.code_tgt = tuple(tgt)
        out = [[] for _ in g.objects]
        for code in range(2 * n):
            out[src[code]].append(code)
        self.out_codes = tuple(tuple(o) for o in out)
        img = []
        for w in endo.generator_images:
            codes = tuple(
                2 * g.generator_index[let.gen] + (0 if let.exp == 1 else 1)
                for let in w.letters
            )
            img.append(codes)
            img.append(tuple(c ^ 1 for c in reversed(codes)))
        self.img = tuple(img)

    def encode(self, w: Word):
        g = self.graph
        codes = tuple(
            2 * g.generator_index[let.gen] + (0 if let.exp == 1 else 1)
            for let in w.letters
        )
        return (g.object_index[w.src], codes)

    def decode_path(self, codes, src_obj: str) -> Word:
        g = self.graph
        letters = tuple(
            Letter(g.generators[c >> 1].name, 1 if c % 2 == 0 else -1) for c in codes
        )
        if not letters:
            return g.identity_word(src_obj)
        w = Word(g, letters, g.letter_src(letters[0]), g.letter_tgt(letters[-1]))
        if w.src != src_obj:
            raise AssertionError("decoded path does not start at the expected object")
        return w

    @staticmethod
    def _reduce_codes(codes):
        out = []
        for c in codes:
            if out and out[-1] == c ^ 1:
                out.pop()
            else:
                out.append(c)
        return tuple(out)

    def step(self, state, code):
        _, codes = state
        return (
            self.code_tgt[code],
            self._reduce_codes((code ^ 1,) + codes + self.img[code]),
        )


@lru_cache(maxsize=256)
def _twisted_engine(endo: GroupoidEnd) -> _TwistedEngine:
    return _TwistedEngine(endo)


class _ConjugationBall:
    """Lazily grown breadth-first ball of twisted conjugates of one word."""

    def __init__(self, engine: _TwistedEngine, start_state):
        self.engine = engine
        self.seen = {start_state: ()}
        self.frontier = [start_state]
        self.radius = 0

    def grow_to(self, radius: int):
        """Grow one level at a time; returns the states added last."""
        new_states = []
        while self.radius < radius and self.frontier:
            nxt = []
            step = self.engine.step
            out = self.engine.out_codes
            seen = self.seen
            for state in self.frontier:
                path = seen[state]
                for code in out[state[0]]:
                    new_state = step(state, code)
                    if new_state not in seen:
                        seen[new_state] = path + (code,)
                        nxt.append(new_state)
            self.frontier = nxt
            self.radius += 1
            new_states = nxt
        return new_states


def _meet_witness(engine, ball1, ball2, r1: int, r2: int):
    """Grow two balls alternately up to the given radii; on meeting, return
    the joining state with both paths (smallest state for determinism)."""
    while True:
        common = ball1.seen.keys() & ball2.seen.keys()
        if common:
            state = min(common)
            return state, ball1.seen[state], ball2.seen[state]
        b1_can = ball1.radius < r1 and ball1.frontier
        b2_can = ball2.radius < r2 and ball2.frontier
        if not (b1_can or b2_can):
            return None
        if b1_can and (not b2_can or len(ball1.frontier) <= len(ball2.frontier)):
            ball1.grow_to(ball1.radius + 1)
        else:
            ball2.grow_to(ball2.radius + 1)


def _witness_from_paths(engine, d1: Word, d2: Word, path1, path2) -> Word:
    codes = engine._reduce_codes(path1 + tuple(c ^ 1 for c in reversed(path2)))
    witness = engine.decode_path(codes, d1.src)
    produced = compose(compose(invert(witness), d1), apply_endo(engine.endo, witness))
    if produced != d2 or witness.tgt != d2.src:
        raise AssertionError("twisted witness failed exact verification")
    return witness


def twisted_equiv(delta1: Word, delta2: Word, endo: GroupoidEnd, bound: int = 8):
    """Semi-decide twisted conjugacy of two twisted loops.

    Returns Equivalent with an exact witness, Distinct when the component
    or the abelianized invariant separates the classes, or Unknown after
    exhausting all witness words of length <= bound (meet-in-the-middle
    over single-letter conjugation moves, which generate all of them).
    """
    if bound < 1:
        raise InputError("witness search bound must be a positive integer")
    twisted_shape_check(delta1, endo)
    twisted_shape_check(delta2, endo)
    part = pi0(endo.graph)
    c1, c2 = part.component_of(delta1.src), part.component_of(delta2.src)
    if c1 != c2:
        return Distinct("different connected components", c1, c2)
    inv1 = twisted_invariant(delta1, endo)
    inv2 = twisted_invariant(delta2, endo)
    if inv1 != inv2:
        return Distinct("abelianized twisted invariants differ", inv1, inv2)

    d1 = reduce_word(delta1)
    d2 = reduce_word(delta2)
    engine = _twisted_engine(endo)
    ball1 = _ConjugationBall(engine, engine.encode(d1))
    ball2 = _ConjugationBall(engine, engine.encode(d2))
    meet = _meet_witness(engine, ball1, ball2, bound - bound // 2, bound // 2)
    if meet is None:
        return Unknown(bound)
    _state, path1, path2 = meet
    return Equivalent(_witness_from_paths(engine, d1, d2, path1, path2))


# ---------------------------------------------------------------------------
# Edge collapse (homotopy equivalence used by the invariance checks)


def collapse_edge(endo: GroupoidEnd, gen_name: str):
    """Collapse a non-loop generator and transport the endofunctor.

    The target object of the edge is merged into the source object.  The
    result is a groupoid equivalent to the original, so every invariant
    computed downstream (Lefschetz number, trace augmentations, component
    projections) must be preserved.  Returns (new endo, object rename map).
    """
    g = endo.graph
    edge = g.generator(gen_name)
    if edge.src == edge.tgt:
        raise InputError("cannot collapse a loop edge")
    u, v = edge.src, edge.tgt

    def q(x):
        return u if x == v else x

    new_graph = Graph.make(
        tuple(x for x in g.objects if x != v),
        tuple(
            (gen.name, q(gen.src), q(gen.tgt))
            for gen in g.generators if gen.name != gen_name
        ),
    )

    edge_word = g.word(((gen_name, 1),))

    def include_generator(name: str) -> Word:
        # the collapsed generator, viewed back in the original groupoid:
        # detour through the collapsed edge where an endpoint was merged
        gen = g.generator(name)
        word = Word(g, (Letter(name, 1),), gen.src, gen.tgt)
        if gen.src == v:
            word = compose(edge_word, word)
        if gen.tgt == v:
            word = compose(word, invert(edge_word))
        return word

    def project_word(w: Word, src2: str, tgt2: str) -> Word:
        letters = tuple(let for let in w.letters if let.gen != gen_name)
        return Word(new_graph, _reduce_letters(letters), src2, tgt2)

    new_object_map = {x: q(endo.apply_object(x)) for x in new_graph.objects}
    new_generator_map = {}
    for gen in new_graph.generators:
        image = apply_endo(endo, include_generator(gen.name))
        new_generator_map[gen.name] = project_word(
            image, new_object_map[gen.src], new_object_map[gen.tgt]
        )
    return GroupoidEnd.make(new_graph, new_object_map, new_generator_map), q
