"""JSON input documents: schema validation and object construction.

One wire format for every command.  Top-level blocks:

* "graph":   {"objects": [str], "generators": [{"name","src","tgt"}]}
* "endo":    {"object_map": {obj: obj},
              "generator_map": {gen: [[gen, +1|-1], ...]}}   (application order)
* "rep":     {"ranks": {obj: int}, "action": {gen: [[int]]}}
* "rep_endo": {obj: [[int]]}
* "family":  {"index": [str], "ranks": {a: int}, "endo": {a: [[int]]}}
* "finite_set": {"elements": [str], "map": {a: b}}
* "group":   {"name": "C2"|"C3"|"C4"|"S3"} or {"elements": [str], "mult": [[int]]}
* "group_matrix": [[{element: coeff}]]
* "finite_groupoid": {"objects": [str], "morphisms": [{"name","src","tgt"}],
                      "compose": [[int|null]]}
  with optional "fingpd_rep" {"ranks": {...}, "action": {...}} and
  "fingpd_endo" {obj: [[int]]}

Errors carry the path of the offending field and exit the CLI with code 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import InputError
from .freegpd import Graph, GroupoidEnd
from .gpdrep import GpdRep, RepEndo
from .intlinalg import IntMatrix
from .formal import FormalSum
from .matbicat import Family, FinGroupoid, FinGpdRep, FinSet, Group


def _expect(cond, field, message):
    if not cond:
        raise InputError(message, field=field)


def _as_matrix(rows, field) -> IntMatrix:
    _expect(isinstance(rows, list), field, "expected a list of rows")
    for r in rows:
        _expect(isinstance(r, list), field, "expected a list of rows")
        for x in r:
            _expect(isinstance(x, int) and not isinstance(x, bool), field,
                    f"matrix entries must be integers, got {x!r}")
    if not rows:
        return IntMatrix.identity(0)
    return IntMatrix.from_rows(rows)


@dataclass(frozen=True)
class ParsedDocument:
    graph: object = None
    endo: object = None
    rep: object = None
    rep_endo: object = None
    family: object = None
    family_endo: object = None
    finite_set: object = None
    set_map: object = None
    group: object = None
    group_matrix: object = None
    finite_groupoid: object = None
    fingpd_rep: object = None
    fingpd_endo: object = None


def parse_document(doc) -> ParsedDocument:
    _expect(isinstance(doc, dict), "$", "input document must be a JSON object")
    out = {}

    graph = None
    if "graph" in doc:
        block = doc["graph"]
        _expect(isinstance(block, dict), "graph", "must be an object")
        objs = block.get("objects")
        _expect(isinstance(objs, list) and all(isinstance(x, str) for x in objs),
                "graph.objects", "must be a list of strings")
        gens = block.get("generators", [])
        _expect(isinstance(gens, list), "graph.generators", "must be a list")
        triples = []
        for k, g in enumerate(gens):
            field = f"graph.generators[{k}]"
            _expect(isinstance(g, dict), field, "must be an object")
            for key in ("name", "src", "tgt"):
                _expect(isinstance(g.get(key), str), f"{field}.{key}", "must be a string")
            triples.append((g["name"], g["src"], g["tgt"]))
        try:
            graph = Graph.make(objs, triples)
        except InputError as exc:
            raise InputError(str(exc), field="graph") from None
        out["graph"] = graph

    if "endo" in doc:
        _expect(graph is not None, "endo", "needs a graph block")
        block = doc["endo"]
        _expect(isinstance(block, dict), "endo", "must be an object")
        omap = block.get("object_map")
        _expect(isinstance(omap, dict), "endo.object_map", "must be an object")
        gmap_raw = block.get("generator_map")
        _expect(isinstance(gmap_raw, dict), "endo.generator_map", "must be an object")
        gmap = {}
        for name, letters in gmap_raw.items():
            field = f"endo.generator_map.{name}"
            _expect(isinstance(letters, list), field, "must be a list of [generator, exponent] pairs")
            pairs = []
            for k, pair in enumerate(letters):
                _expect(
                    isinstance(pair, list) and len(pair) == 2
                    and isinstance(pair[0], str) and pair[1] in (1, -1),
                    f"{field}[{k}]", "must be [generator, +1|-1]",
                )
                pairs.append((pair[0], pair[1]))
            gmap[name] = pairs
        try:
            out["endo"] = GroupoidEnd.make(graph, omap, gmap)
        except InputError as exc:
            raise InputError(str(exc), field="endo") from None

    if "rep" in doc:
        _expect(graph is not None, "rep", "needs a graph block")
        block = doc["rep"]
        _expect(isinstance(block, dict), "rep", "must be an object")
        ranks = block.get("ranks")
        _expect(isinstance(ranks, dict), "rep.ranks", "must map objects to ranks")
        action_raw = block.get("action")
        _expect(isinstance(action_raw, dict), "rep.action", "must map generators to matrices")
        action = {name: _as_matrix(rows, f"rep.action.{name}") for name, rows in action_raw.items()}
        for gen in graph.generators:
            _expect(gen.name in action, f"rep.action.{gen.name}", "missing action matrix")
        for x in graph.objects:
            _expect(isinstance(ranks.get(x), int), f"rep.ranks.{x}", "missing or non-integer rank")
        try:
            out["rep"] = GpdRep.make(graph, ranks, action)
        except InputError as exc:
            raise InputError(str(exc), field="rep") from None

    if "rep_endo" in doc:
        _expect(out.get("rep") is not None, "rep_endo", "needs a rep block")
        block = doc["rep_endo"]
        _expect(isinstance(block, dict), "rep_endo", "must map objects to matrices")
        rep = out["rep"]
        mats = {}
        for x in graph.objects:
            _expect(x in block, f"rep_endo.{x}", "missing endomorphism matrix")
            m = _as_matrix(block[x], f"rep_endo.{x}")
            if m.entries == () and rep.rank_at(x) == 0:
                m = IntMatrix.identity(0)
            mats[x] = m
        try:
            out["rep_endo"] = RepEndo.make(rep, mats)
        except InputError as exc:
            raise InputError(str(exc), field="rep_endo") from None

    if "family" in doc:
        block = doc["family"]
        _expect(isinstance(block, dict), "family", "must be an object")
        index = block.get("index")
        _expect(isinstance(index, list) and all(isinstance(x, str) for x in index),
                "family.index", "must be a list of strings")
        ranks = block.get("ranks")
        _expect(isinstance(ranks, dict), "family.ranks", "must map labels to ranks")
        for a in index:
            _expect(isinstance(ranks.get(a), int), f"family.ranks.{a}", "missing or non-integer rank")
        try:
            fam = Family.make(FinSet(tuple(index)), ranks)
        except InputError as exc:
            raise InputError(str(exc), field="family") from None
        out["family"] = fam
        endo_raw = block.get("endo")
        if endo_raw is not None:
            _expect(isinstance(endo_raw, dict), "family.endo", "must map labels to matrices")
            mats = {}
            for a in index:
                _expect(a in endo_raw, f"family.endo.{a}", "missing fiber matrix")
                m = _as_matrix(endo_raw[a], f"family.endo.{a}")
                if m.entries == () and ranks[a] == 0:
                    m = IntMatrix.identity(0)
                mats[a] = m
            out["family_endo"] = mats

    if "finite_set" in doc:
        block = doc["finite_set"]
        _expect(isinstance(block, dict), "finite_set", "must be an object")
        elements = block.get("elements")
        _expect(isinstance(elements, list) and all(isinstance(x, str) for x in elements),
                "finite_set.elements", "must be a list of strings")
        try:
            out["finite_set"] = FinSet(tuple(elements))
        except InputError as exc:
            raise InputError(str(exc), field="finite_set") from None
        if "map" in block:
            mp = block["map"]
            _expect(isinstance(mp, dict), "finite_set.map", "must map elements to elements")
            for a in elements:
                _expect(a in mp, f"finite_set.map.{a}", "missing image")
                _expect(mp[a] in elements, f"finite_set.map.{a}", "image not in the set")
            out["set_map"] = {a: mp[a] for a in elements}

    if "group" in doc:
        block = doc["group"]
        _expect(isinstance(block, dict), "group", "must be an object")
        if "name" in block:
            from .generate import named_group
            try:
                out["group"] = named_group(block["name"])
            except InputError as exc:
                raise InputError(str(exc), field="group.name") from None
        else:
            elements = block.get("elements")
            _expect(isinstance(elements, list) and all(isinstance(x, str) for x in elements),
                    "group.elements", "must be a list of strings")
            mult = block.get("mult")
            _expect(isinstance(mult, list), "group.mult", "must be a table of indices")
            try:
                out["group"] = Group(tuple(elements), tuple(tuple(r) for r in mult))
            except InputError as exc:
                raise InputError(str(exc), field="group") from None

    if "group_matrix" in doc:
        _expect(out.get("group") is not None, "group_matrix", "needs a group block")
        group = out["group"]
        block = doc["group_matrix"]
        _expect(isinstance(block, list), "group_matrix", "must be a matrix of group-ring elements")
        mat = []
        for i, row in enumerate(block):
            _expect(isinstance(row, list), f"group_matrix[{i}]", "must be a list")
            out_row = []
            for j, entry in enumerate(row):
                field = f"group_matrix[{i}][{j}]"
                _expect(isinstance(entry, dict), field, "must map group elements to coefficients")
                pairs = []
                for gname, coeff in entry.items():
                    _expect(isinstance(coeff, int) and not isinstance(coeff, bool),
                            f"{field}.{gname}", "coefficient must be an integer")
                    group.index(gname)
                    pairs.append((gname, coeff))
                out_row.append(FormalSum.from_pairs(pairs))
            mat.append(tuple(out_row))
        out["group_matrix"] = tuple(mat)

    if "finite_groupoid" in doc:
        block = doc["finite_groupoid"]
        _expect(isinstance(block, dict), "finite_groupoid", "must be an object")
        objs = block.get("objects")
        _expect(isinstance(objs, list), "finite_groupoid.objects", "must be a list")
        morphs = block.get("morphisms")
        _expect(isinstance(morphs, list), "finite_groupoid.morphisms", "must be a list")
        names, src, tgt = [], [], []
        oindex = {x: i for i, x in enumerate(objs)}
        for k, m in enumerate(morphs):
            field = f"finite_groupoid.morphisms[{k}]"
            _expect(isinstance(m, dict), field, "must be an object")
            _expect(m.get("src") in oindex and m.get("tgt") in oindex, field,
                    "endpoints must be declared objects")
            names.append(m["name"])
            src.append(oindex[m["src"]])
            tgt.append(oindex[m["tgt"]])
        table = block.get("compose")
        _expect(isinstance(table, list), "finite_groupoid.compose", "must be a table")
        try:
            gpd = FinGroupoid(
                tuple(objs), tuple(names), tuple(src), tuple(tgt),
                tuple(tuple(r) for r in table),
            )
        except InputError as exc:
            raise InputError(str(exc), field="finite_groupoid") from None
        out["finite_groupoid"] = gpd

        if "fingpd_rep" in doc:
            rep_block = doc["fingpd_rep"]
            _expect(isinstance(rep_block, dict), "fingpd_rep", "must be an object")
            ranks = rep_block.get("ranks")
            action = rep_block.get("action")
            _expect(isinstance(ranks, dict), "fingpd_rep.ranks", "must map objects to ranks")
            _expect(isinstance(action, dict), "fingpd_rep.action", "must map morphisms to matrices")
            try:
                out["fingpd_rep"] = FinGpdRep(
                    gpd,
                    tuple(ranks[x] for x in objs),
                    tuple(_as_matrix(action[m], f"fingpd_rep.action.{m}") for m in names),
                )
            except KeyError as exc:
                raise InputError(f"missing entry {exc}", field="fingpd_rep") from None
            except InputError as exc:
                raise InputError(str(exc), field="fingpd_rep") from None
        if "fingpd_endo" in doc:
            endo_block = doc["fingpd_endo"]
            _expect(isinstance(endo_block, dict), "fingpd_endo", "must map objects to matrices")
            out["fingpd_endo"] = {
                x: _as_matrix(endo_block[x], f"fingpd_endo.{x}") for x in endo_block
            }

    return ParsedDocument(**out)


def load_document(path: str) -> ParsedDocument:
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}", field=path) from None
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}", field=path) from None
    return parse_document(doc)
