"""JSON documents for instances, hypergraphs and graphs.

Instance::

    {"variables": [{"name": "x", "domain": [0, 1]}, ...],
     "constraints": [
        {"kind": "table", "scope": ["x", "y"], "rows": [[0, 1], ...]},
        {"kind": "negative", "scope": [...], "forbidden": [[...], ...]},
        {"kind": "egc", "scope": [...], "cardinality": {"0": [0, 2], "1": {"set": [1, 3]}}},
        {"kind": "wtable", "scope": [...], "rows": [[...], ...], "costs": ["1/3", ...],
         "tag": "optional; keeps otherwise identical weighted tables apart"}]}

A two-element cardinality list is an interval ``[lo, hi]``; any other list
is an explicit set, and ``{"set": [...]}`` / ``{"interval": [lo, hi]}``
remove the ambiguity. Costs are ``"p/q"`` strings (plain numbers are also
accepted). Instances with weighted tables must use them throughout.
"""
from __future__ import annotations

import json
from collections.abc import Mapping
from fractions import Fraction

from .apps import Graph
from .constraints import CardinalitySet, EgcConstraint, NegativeConstraint, TableConstraint
from .core import Assignment, CspInstance, Hypergraph, sorted_values
from .errors import ParseError, ValidationError
from .weighted import WcspInstance, WeightedTable


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    return loads(text, path)


def loads(text: str, source: str = "<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _field(obj, key, where):
    if not isinstance(obj, Mapping):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    return obj[key]


def _list(obj, where) -> list:
    if not isinstance(obj, list):
        raise ParseError(f"{where}: expected a list")
    return obj


def _value(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise ParseError(f"{where}: values must be integers or strings")
    return v


def _cardinality(spec, where) -> CardinalitySet:
    if isinstance(spec, Mapping):
        if set(spec) == {"set"}:
            return CardinalitySet.of(_ints(spec["set"], where + ".set"))
        if set(spec) == {"interval"}:
            lo, hi = _pair(spec["interval"], where + ".interval")
            return CardinalitySet.interval(lo, hi)
        raise ParseError(f"{where}: expected {{'set': [...]}} or {{'interval': [lo, hi]}}")
    if isinstance(spec, int) and not isinstance(spec, bool):
        return CardinalitySet.of([spec])
    values = _ints(spec, where)
    if len(values) == 2:
        return CardinalitySet.interval(values[0], values[1])
    return CardinalitySet.of(values)


def _ints(spec, where) -> list:
    values = _list(spec, where)
    if any(isinstance(n, bool) or not isinstance(n, int) or n < 0 for n in values):
        raise ParseError(f"{where}: cardinalities must be nonnegative integers")
    return values


def _pair(spec, where):
    values = _ints(spec, where)
    if len(values) != 2 or values[0] > values[1]:
        raise ParseError(f"{where}: expected [lo, hi] with lo <= hi")
    return values


def _cost(raw, where) -> Fraction:
    try:
        if isinstance(raw, bool):
            raise ValueError
        if isinstance(raw, str):
            return Fraction(raw.strip())
        if isinstance(raw, int):
            return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        pass
    raise ParseError(f"{where}: cost must be an integer or a 'p/q' string, got {raw!r}")


def instance_from_dict(doc) -> CspInstance:
    variables = _list(_field(doc, "variables", "instance"), "variables")
    domains = {}
    for i, entry in enumerate(variables):
        where = f"variables[{i}]"
        name = _field(entry, "name", where)
        if not isinstance(name, str) or not name:
            raise ParseError(f"{where}.name: expected a nonempty string")
        if name in domains:
            raise ParseError(f"{where}: duplicate variable {name!r}")
        dom = _list(_field(entry, "domain", where), where + ".domain")
        domains[name] = frozenset(_value(v, f"{where}.domain") for v in dom)
    constraints = []
    weighted = []
    for i, entry in enumerate(_list(_field(doc, "constraints", "instance"), "constraints")):
        where = f"constraints[{i}]"
        kind = _field(entry, "kind", where)
        scope = _list(_field(entry, "scope", where), where + ".scope")
        unknown = [v for v in scope if v not in domains]
        if unknown:
            raise ValidationError(f"{where}.scope: undeclared variables {unknown}")
        sub = {v: domains[v] for v in scope}
        if kind == "table":
            rows = [_tuple(r, where + ".rows") for r in _list(_field(entry, "rows", where), where + ".rows")]
            constraints.append(TableConstraint(scope, rows, sub))
        elif kind == "negative":
            rows = [
                _tuple(r, where + ".forbidden")
                for r in _list(_field(entry, "forbidden", where), where + ".forbidden")
            ]
            constraints.append(NegativeConstraint(scope, rows, sub))
        elif kind == "egc":
            raw = _field(entry, "cardinality", where)
            if not isinstance(raw, Mapping):
                raise ParseError(f"{where}.cardinality: expected an object keyed by value")
            by_name = {str(a): a for v in scope for a in sub[v]}
            card = {}
            for key, spec in raw.items():
                if key not in by_name:
                    raise ValidationError(f"{where}.cardinality: {key!r} is not a scope value")
                card[by_name[key]] = _cardinality(spec, f"{where}.cardinality.{key}")
            constraints.append(EgcConstraint(scope, card, sub))
        elif kind == "wtable":
            rows = [_tuple(r, where + ".rows") for r in _list(_field(entry, "rows", where), where + ".rows")]
            costs = _list(_field(entry, "costs", where), where + ".costs")
            if len(costs) != len(rows):
                raise ParseError(f"{where}: {len(rows)} rows but {len(costs)} costs")
            pairs = [(r, _cost(q, f"{where}.costs[{j}]")) for j, (r, q) in enumerate(zip(rows, costs))]
            tag = entry.get("tag")
            if tag is not None and not isinstance(tag, (int, str)):
                raise ParseError(f"{where}.tag: expected an integer or a string")
            weighted.append(WeightedTable(scope, pairs, sub, tag))
            continue
        else:
            raise ParseError(f"{where}.kind: unknown constraint kind {kind!r}")
    if weighted and constraints:
        raise ValidationError("weighted and unweighted constraints cannot be mixed")
    if weighted:
        return WcspInstance(domains, weighted)
    return CspInstance(domains, constraints)


def _tuple(row, where) -> tuple:
    return tuple(_value(v, where) for v in _list(row, where))


def _cardinality_to_json(k: CardinalitySet):
    if k.is_interval:
        return [k.lo, k.hi]
    values = sorted(k.values)
    return {"set": values} if len(values) == 2 else values


def instance_to_dict(P: CspInstance) -> dict:
    doc = {
        "variables": [
            {"name": v, "domain": sorted_values(P.domain(v))} for v in sorted(P.variables)
        ],
        "constraints": [],
    }
    for c in P.constraints:
        entry = {"kind": c.kind, "scope": list(c.scope)}
        if isinstance(c, WeightedTable):
            rows = c.sorted_rows()
            entry["rows"] = [[row[v] for v in c.scope] for row, _ in rows]
            entry["costs"] = [str(q) for _, q in rows]
            if c.tag is not None:
                entry["tag"] = c.tag
        elif isinstance(c, TableConstraint):
            entry["rows"] = [[row[v] for v in c.scope] for row in c.sorted_rows()]
        elif isinstance(c, NegativeConstraint):
            entry["forbidden"] = [[row[v] for v in c.scope] for row in sorted(c.forbidden, key=Assignment.sort_key)]
        elif isinstance(c, EgcConstraint):
            entry["cardinality"] = {
                str(a): _cardinality_to_json(k)
                for a, k in c.cardinality.items()
            }
        else:
            raise ValidationError(f"{c.kind} constraints have no file representation")
        doc["constraints"].append(entry)
    return doc


def parse_instance(path: str) -> CspInstance:
    return instance_from_dict(load_json(path))


def dumps(doc, pretty: bool = True) -> str:
    return json.dumps(doc, indent=2 if pretty else None, ensure_ascii=False, sort_keys=False)


def serialize_instance(P: CspInstance) -> str:
    return dumps(instance_to_dict(P))


# hypergraphs and graphs --------------------------------------------------


def hypergraph_from_dict(doc) -> Hypergraph:
    verts = _list(_field(doc, "vertices", "hypergraph"), "vertices")
    edges = _list(_field(doc, "edges", "hypergraph"), "edges")
    return Hypergraph(frozenset(verts), frozenset(frozenset(_list(e, "edges")) for e in edges))


def hypergraph_to_dict(G: Hypergraph) -> dict:
    return G.to_dict()


def graph_from_dict(doc) -> Graph:
    """``{"vertices": [...], "edges": [[u, v], ...]}`` or a bare edge list."""
    if isinstance(doc, list):
        return Graph.from_edges([tuple(_list(e, "edges")) for e in doc])
    edges = [tuple(_list(e, "edges")) for e in _list(_field(doc, "edges", "graph"), "edges")]
    return Graph.from_edges(edges, doc.get("vertices", ()))


def graph_to_dict(G: Graph) -> dict:
    return {"vertices": list(G.vertices), "edges": [list(e) for e in G.sorted_edges()]}
