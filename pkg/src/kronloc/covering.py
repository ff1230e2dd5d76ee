"""The universal abelian covering quiver of K(m) and the fixed-point census.

A vertex of the covering quiver is a source or a sink together with a
weight in Z^m; there is an arrow of colour k from a source at w to a sink
at w + e_k.  A localization datum is a finite set of such vertices with
dimensions, taken up to a common translation.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Iterator, Mapping, Sequence

from .quiver import (
    DEFAULT_SWEEP_CAP,
    BipartiteQuiver,
    QuiverError,
    find_destabilizing,
    kronecker_euler_form,
)

Weight = tuple[int, ...]
Colouring = dict[tuple[str, str], int]

DEFAULT_CENSUS_CAP = 10**7
DEFAULT_MAX_DIM = 12


def unit(m: int, k: int) -> Weight:
    """The basis vector e_k of Z^m, colours counted from 1."""
    return tuple(1 if t == k - 1 else 0 for t in range(m))


def _add(a: Weight, b: Weight) -> Weight:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Weight, b: Weight) -> Weight:
    return tuple(x - y for x, y in zip(a, b))


def arrow_colour(source: Weight, sink: Weight) -> int | None:
    """Colour k if sink - source = e_k, else None."""
    diff = _sub(sink, source)
    hits = [t for t, x in enumerate(diff) if x != 0]
    if len(hits) == 1 and diff[hits[0]] == 1:
        return hits[0] + 1
    return None


# ---------------------------------------------------------------------------
# localization data


@dataclass(frozen=True)
class LocalizationDatum:
    """Vertices of the covering quiver with dimensions.

    ``sources`` and ``sinks`` hold (id, weight, dim) triples.  ``merged``
    records tree vertices that landed on the same weight: each entry is
    (datum id, original ids).
    """

    m: int
    sources: tuple[tuple[str, Weight, int], ...]
    sinks: tuple[tuple[str, Weight, int], ...]
    merged: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def __post_init__(self):
        for kind in (self.sources, self.sinks):
            ws = [w for _, w, _ in kind]
            if len(set(ws)) != len(ws):
                raise QuiverError("two vertices of one kind share a weight")
            if any(len(w) != self.m for w in ws):
                raise QuiverError("weights must have length m")

    @property
    def source_weights(self) -> dict[str, Weight]:
        return {i: w for i, w, _ in self.sources}

    @property
    def sink_weights(self) -> dict[str, Weight]:
        return {j: w for j, w, _ in self.sinks}

    @property
    def dims(self) -> dict[str, int]:
        return {v: d for v, _, d in self.sources + self.sinks}

    @property
    def dimension_type(self) -> tuple[int, int]:
        return sum(d for *_, d in self.sources), sum(d for *_, d in self.sinks)

    def implied_arrows(self) -> list[tuple[str, str, int]]:
        out = []
        for i, wi, _ in self.sources:
            for j, wj, _ in self.sinks:
                k = arrow_colour(wi, wj)
                if k is not None:
                    out.append((i, j, k))
        return out

    def to_quiver(self) -> BipartiteQuiver:
        return BipartiteQuiver(
            self.m,
            [i for i, _, _ in self.sources],
            [j for j, _, _ in self.sinks],
            [(i, j) for i, j, _ in self.implied_arrows()],
            self.dims,
        )

    def translate(self, v: Weight) -> "LocalizationDatum":
        return LocalizationDatum(
            self.m,
            tuple((i, _add(w, v), d) for i, w, d in self.sources),
            tuple((j, _add(w, v), d) for j, w, d in self.sinks),
            self.merged,
        )

    def key(self) -> tuple:
        """Translation-class invariant; equal keys mean equivalent data."""
        c = canonicalize(self)
        return (
            c.m,
            tuple((w, d) for _, w, d in c.sources),
            tuple((w, d) for _, w, d in c.sinks),
        )

    def relabel(self) -> "LocalizationDatum":
        """Canonical form with ids i1.., j1.. in canonical vertex order."""
        c = canonicalize(self)
        return LocalizationDatum(
            c.m,
            tuple((f"i{t}", w, d) for t, (_, w, d) in enumerate(c.sources, 1)),
            tuple((f"j{t}", w, d) for t, (_, w, d) in enumerate(c.sinks, 1)),
        )

    def moduli_dimension(self) -> int:
        """1 - <d, d> over the quiver implied by the weights."""
        dims = self.dims
        diag = sum(x * x for x in dims.values())
        off = sum(dims[i] * dims[j] for i, j, _ in self.implied_arrows())
        return 1 - (diag - off)

    def is_tree(self) -> bool:
        return self.to_quiver().is_tree()

    def digest(self) -> str:
        return hashlib.sha1(repr(self.key()).encode()).hexdigest()[:12]


def canonicalize(x: LocalizationDatum) -> LocalizationDatum:
    """Translate so the lexicographically smallest weight is zero and sort
    the vertices of each kind by weight."""
    weights = [w for _, w, _ in x.sources + x.sinks]
    if not weights:
        return x
    low = min(weights)
    shift = tuple(-t for t in low)
    y = x.translate(shift)
    return LocalizationDatum(
        y.m,
        tuple(sorted(y.sources, key=lambda t: t[1])),
        tuple(sorted(y.sinks, key=lambda t: t[1])),
        y.merged,
    )


# ---------------------------------------------------------------------------
# colourings


def is_stable_colouring(q: BipartiteQuiver, c: Mapping[tuple[str, str], int]) -> bool:
    if set(c) != set(q.arrows):
        return False
    if any(not 1 <= k <= q.m for k in c.values()):
        return False
    for v in q.vertices:
        cols = [k for a, k in c.items() if v in a]
        if len(set(cols)) != len(cols):
            return False
    return True


def stable_colourings(q: BipartiteQuiver) -> list[Colouring]:
    """All colourings injective at every source and every sink, in
    lexicographic order over the sorted arrow list."""
    arrows = list(q.arrows)
    used: dict[str, set[int]] = {v: set() for v in q.vertices}
    out: list[Colouring] = []
    current: list[int] = []

    def rec(t: int) -> None:
        if t == len(arrows):
            out.append(dict(zip(arrows, current)))
            return
        i, j = arrows[t]
        for k in range(1, q.m + 1):
            if k in used[i] or k in used[j]:
                continue
            used[i].add(k)
            used[j].add(k)
            current.append(k)
            rec(t + 1)
            current.pop()
            used[i].discard(k)
            used[j].discard(k)

    rec(0)
    return out


def weights_from_coloured_tree(
    q: BipartiteQuiver, c: Mapping[tuple[str, str], int], root: str | None = None
) -> LocalizationDatum:
    """Propagate weights through a coloured tree from ``root`` (weight 0).

    Tree vertices of the same kind that receive the same weight are merged
    into one datum vertex whose dimension is the sum.
    """
    if not q.is_tree():
        raise QuiverError("weight propagation requires a tree")
    if not is_stable_colouring(q, c):
        raise QuiverError("colouring not stable")
    if root is None:
        root = q.sources[0] if q.sources else q.sinks[0]
    m = q.m
    weight: dict[str, Weight] = {root: (0,) * m}
    adj: dict[str, list[tuple[str, int, int]]] = {v: [] for v in q.vertices}
    for (i, j), k in c.items():
        adj[i].append((j, k, +1))
        adj[j].append((i, k, -1))
    todo = deque([root])
    while todo:
        v = todo.popleft()
        for w, k, sign in adj[v]:
            if w in weight:
                continue
            step = unit(m, k)
            weight[w] = _add(weight[v], step) if sign > 0 else _sub(weight[v], step)
            todo.append(w)
    return _assemble(m, q, weight)


def _assemble(m: int, q: BipartiteQuiver, weight: Mapping[str, Weight]) -> LocalizationDatum:
    merged = []
    parts = []
    for kind in (q.sources, q.sinks):
        groups: dict[Weight, list[str]] = {}
        for v in kind:
            groups.setdefault(weight[v], []).append(v)
        verts = []
        for w, ids in groups.items():
            vid = ids[0]
            verts.append((vid, w, sum(q.dims[v] for v in ids)))
            if len(ids) > 1:
                merged.append((vid, tuple(ids)))
        parts.append(tuple(verts))
    return canonicalize(LocalizationDatum(m, parts[0], parts[1], tuple(merged)))


def induced_arrows(x: LocalizationDatum, q: BipartiteQuiver) -> list[tuple[str, str, int]]:
    """Weight-implied arrows of ``x`` that do not come from arrows of ``q``."""
    rename = {v: v for v in q.vertices}
    for vid, ids in x.merged:
        for v in ids:
            rename[v] = vid
    present = {(rename[i], rename[j]) for i, j in q.arrows}
    return [(i, j, k) for i, j, k in x.implied_arrows() if (i, j) not in present]


# ---------------------------------------------------------------------------
# export


def export_datum(x: LocalizationDatum, fmt: str = "json") -> str:
    x = canonicalize(x)
    if fmt == "json":
        return json.dumps(datum_to_json_obj(x), sort_keys=True)
    if fmt == "dot":
        lines = ["digraph datum {"]
        for v, w, d in x.sources + x.sinks:
            label = f"{v}:{d}@({','.join(str(t) for t in w)})"
            lines.append(f'  "{v}" [label="{label}"];')
        for i, j, k in x.implied_arrows():
            lines.append(f'  "{i}" -> "{j}" [label="{k}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def datum_to_json_obj(x: LocalizationDatum) -> dict:
    def side(vs):
        return [{"id": v, "dim": d, "weight": list(w)} for v, w, d in vs]

    obj = {"m": x.m, "sources": side(x.sources), "sinks": side(x.sinks)}
    if x.merged:
        obj["merged"] = [[vid, list(ids)] for vid, ids in x.merged]
    return obj


def datum_from_json(text: str) -> LocalizationDatum:
    obj = json.loads(text)

    def side(vs):
        return tuple((v["id"], tuple(v["weight"]), v["dim"]) for v in vs)

    merged = tuple((vid, tuple(ids)) for vid, ids in obj.get("merged", []))
    return LocalizationDatum(obj["m"], side(obj["sources"]), side(obj["sinks"]), merged)


# ---------------------------------------------------------------------------
# coloured tree growth


@dataclass
class _Vertex:
    kind: str  # "i" or "j"
    weight: Weight
    parent: int | None
    parent_colour: int | None


class _BudgetOut(Exception):
    pass


def grow_coloured_trees(
    m: int, max_sources: int, max_sinks: int, exact: bool = False,
    budget: list[int] | None = None,
) -> Iterator[list[_Vertex]]:
    """Yield every rooted coloured tree whose root is a source of weight 0.

    Vertices are expanded in breadth-first order; each one picks the set of
    colours used by its children among the colours not already used by the
    arrow to its parent.  That choice data determines the tree, so each
    rooted coloured tree appears once.  With ``exact`` only trees with
    exactly ``max_sources`` sources and ``max_sinks`` sinks are yielded.
    ``budget`` is a one-element counter decremented per search node.

    The yielded list is reused between iterations; copy it to keep it.
    """
    verts = [_Vertex("i", (0,) * m, None, None)]
    counts = {"i": 1, "j": 0}
    cap_of = {"i": max_sources, "j": max_sinks}

    def rec(idx: int) -> Iterator[list[_Vertex]]:
        if budget is not None:
            budget[0] -= 1
            if budget[0] < 0:
                raise _BudgetOut
        if idx == len(verts):
            if not exact or (counts["i"], counts["j"]) == (max_sources, max_sinks):
                yield verts
            return
        v = verts[idx]
        child = "j" if v.kind == "i" else "i"
        free = [k for k in range(1, m + 1) if k != v.parent_colour]
        room = cap_of[child] - counts[child]
        for r in range(0, min(room, len(free)) + 1):
            for cols in itertools.combinations(free, r):
                for k in cols:
                    step = unit(m, k)
                    w = _add(v.weight, step) if child == "j" else _sub(v.weight, step)
                    verts.append(_Vertex(child, w, idx, k))
                counts[child] += r
                yield from rec(idx + 1)
                counts[child] -= r
                del verts[len(verts) - r:]

    yield from rec(0)


@dataclass(frozen=True)
class TreeDatum:
    """A coloured tree with dimensions, i.e. a localization datum on the
    universal covering tree of K(m) (no folding of weights).

    ``vertices`` holds (id, kind, dim) with kind "i" (source) or "j"
    (sink); ``arrows`` holds (source id, sink id, colour).
    """

    m: int
    vertices: tuple[tuple[str, str, int], ...]
    arrows: tuple[tuple[str, str, int], ...]

    def to_quiver(self) -> BipartiteQuiver:
        return BipartiteQuiver(
            self.m,
            [v for v, k, _ in self.vertices if k == "i"],
            [v for v, k, _ in self.vertices if k == "j"],
            [(i, j) for i, j, _ in self.arrows],
            {v: d for v, _, d in self.vertices},
        )

    def colouring(self) -> Colouring:
        return {(i, j): c for i, j, c in self.arrows}

    @property
    def dimension_type(self) -> tuple[int, int]:
        d = sum(x for _, k, x in self.vertices if k == "i")
        return d, sum(x for _, k, x in self.vertices if k == "j")

    def _adjacency(self) -> dict[str, list[tuple[int, str]]]:
        adj: dict[str, list[tuple[int, str]]] = {v: [] for v, _, _ in self.vertices}
        for i, j, c in self.arrows:
            adj[i].append((c, j))
            adj[j].append((c, i))
        return adj

    def _encode(self, root: str) -> tuple:
        adj = self._adjacency()
        info = {v: (k, d) for v, k, d in self.vertices}

        def enc(v: str, parent: str | None) -> tuple:
            kids = sorted((c, enc(w, v)) for c, w in adj[v] if w != parent)
            return info[v] + (tuple(kids),)

        return enc(root, None)

    def key(self) -> tuple:
        """Invariant under relabelling and choice of root."""
        roots = [v for v, k, _ in self.vertices if k == "i"] or [self.vertices[0][0]]
        return (self.m, min(self._encode(r) for r in roots))

    def relabel(self) -> "TreeDatum":
        """Canonical representative: rooted at the source giving the
        smallest encoding, ids assigned breadth first in colour order."""
        roots = [v for v, k, _ in self.vertices if k == "i"] or [self.vertices[0][0]]
        root = min(roots, key=self._encode)
        adj = self._adjacency()
        info = {v: (k, d) for v, k, d in self.vertices}
        names: dict[str, str] = {}
        count = {"i": 0, "j": 0}
        order = [root]
        parent = {root: None}
        for v in order:
            kind = info[v][0]
            count[kind] += 1
            names[v] = f"{kind}{count[kind]}"
            for c, w in sorted(adj[v]):
                if w != parent[v]:
                    parent[w] = v
                    order.append(w)
        verts = tuple((names[v], info[v][0], info[v][1]) for v in order)
        arrows = tuple(sorted((names[i], names[j], c) for i, j, c in self.arrows))
        return TreeDatum(self.m, verts, arrows)

    def weights(self) -> LocalizationDatum:
        """The image in the abelian covering quiver (vertices may merge)."""
        return weights_from_coloured_tree(self.to_quiver(), self.colouring())

    def folds(self) -> bool:
        """True when the weight image is not an isomorphic copy of the tree."""
        x = self.weights()
        return bool(x.merged) or bool(induced_arrows(x, self.to_quiver()))

    def moduli_dimension(self) -> int:
        dims = {v: d for v, _, d in self.vertices}
        diag = sum(x * x for x in dims.values())
        return 1 - (diag - sum(dims[i] * dims[j] for i, j, _ in self.arrows))

    def to_json_obj(self) -> dict:
        w = {}
        x = weights_from_coloured_tree(self.to_quiver(), self.colouring())
        rename = {v: v for v, _, _ in self.vertices}
        for vid, ids in x.merged:
            for v in ids:
                rename[v] = vid
        allw = {**x.source_weights, **x.sink_weights}
        for v, _, _ in self.vertices:
            w[v] = list(allw[rename[v]])
        return {
            "m": self.m,
            "sources": [{"id": v, "dim": d, "weight": w[v]} for v, k, d in self.vertices if k == "i"],
            "sinks": [{"id": v, "dim": d, "weight": w[v]} for v, k, d in self.vertices if k == "j"],
            "arrows": [[i, j, c] for i, j, c in self.arrows],
        }

    def to_dot(self) -> str:
        obj = self.to_json_obj()
        lines = ["digraph datum {"]
        for v in obj["sources"] + obj["sinks"]:
            label = f"{v['id']}:{v['dim']}@({','.join(str(t) for t in v['weight'])})"
            lines.append(f'  "{v["id"]}" [label="{label}"];')
        for i, j, c in self.arrows:
            lines.append(f'  "{i}" -> "{j}" [label="{c}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha1(repr(self.key()).encode()).hexdigest()[:12]


def _tree_from_growth(m: int, verts: Sequence[_Vertex], dims: Sequence[int]) -> TreeDatum:
    vs = tuple((f"{v.kind}{t}", v.kind, dims[t]) for t, v in enumerate(verts))
    arrows = []
    for t, v in enumerate(verts):
        if v.parent is None:
            continue
        if v.kind == "j":
            arrows.append((f"i{v.parent}", f"j{t}", v.parent_colour))
        else:
            arrows.append((f"i{t}", f"j{v.parent}", v.parent_colour))
    return TreeDatum(m, vs, tuple(arrows))


def _compositions(total: int, parts: int, hi: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, min(hi, total - parts + 1) + 1):
        for rest in _compositions(total - first, parts - 1, hi):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# census


@dataclass
class CensusReport:
    m: int
    d: int
    e: int
    type1_only: bool
    data: list[TreeDatum]
    moduli_dims: list[int]
    total_chi: int | None
    positive_dimensional: bool
    folded: list[bool]
    stats: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "m": self.m,
            "d": self.d,
            "e": self.e,
            "type1Only": self.type1_only,
            "totalChi": None if self.total_chi is None else str(self.total_chi),
            "containsPositiveDimensionalComponents": self.positive_dimensional,
            "perDatumModuliDim": self.moduli_dims,
            "foldedInAbelianCover": self.folded,
            "stats": self.stats,
            "data": [x.to_json_obj() for x in self.data],
        }


class CensusCapExceeded(RuntimeError):
    def __init__(self, cap: int, partial: dict):
        super().__init__(f"census exceeded cap {cap}")
        self.cap = cap
        self.partial = partial


def enumerate_localization_data(
    m: int,
    d: int,
    e: int,
    type1_only: bool = False,
    cap: int = DEFAULT_CENSUS_CAP,
    max_dim: int = DEFAULT_MAX_DIM,
) -> CensusReport:
    """Stable tree-shaped localization data of dimension type (d, e) for K(m).

    Rooted coloured trees are grown source first.  Their vertices get
    dimensions (all 1 with ``type1_only``, otherwise every labelling with
    entries in [1, max_dim] summing to d on sources and e on sinks).  Two
    labelled trees give the same datum when they agree after re-rooting,
    so the key is the smallest rooted encoding over all sources.  Keys
    that pass the strict stability test make up the report.  ``cap``
    bounds search nodes plus labellings.
    """
    if m < 1 or d < 0 or e < 0 or d + e == 0:
        raise QuiverError("need m >= 1 and a nonzero (d, e)")
    budget = [cap]
    seen: dict[tuple, TreeDatum | None] = {}
    raw_trees = 0
    labellings = 0

    def partial() -> dict:
        found = sum(1 for v in seen.values() if v is not None)
        return {"visited": cap - max(budget[0], 0), "rawTrees": raw_trees,
                "labellings": labellings, "distinct": len(seen), "stableSoFar": found}

    def consider(x: TreeDatum) -> None:
        k = x.key()
        if k in seen:
            return
        ok = find_destabilizing(x.to_quiver(), True, DEFAULT_SWEEP_CAP) is None
        seen[k] = x if ok else None

    try:
        if d == 0:
            # grown trees start at a source; the lone sink is the only (0, e) tree
            if e == 1:
                consider(TreeDatum(m, (("j0", "j", 1),), ()))
        else:
            for verts in grow_coloured_trees(m, d, e, exact=type1_only, budget=budget):
                raw_trees += 1
                if type1_only:
                    labels: Iterator[tuple[int, ...]] = iter([(1,) * len(verts)])
                else:
                    labels = _labellings([v.kind for v in verts], d, e, max_dim)
                for lab in labels:
                    labellings += 1
                    budget[0] -= 1
                    if budget[0] < 0:
                        raise _BudgetOut
                    consider(_tree_from_growth(m, verts, lab))
    except _BudgetOut:
        raise CensusCapExceeded(cap, partial()) from None

    data = sorted((x.relabel() for x in seen.values() if x is not None), key=lambda x: x.key())
    mdims = [x.moduli_dimension() for x in data]
    positive = any(t != 0 for t in mdims)
    total = None if positive else len(data)
    stats = partial()
    stats["stableData"] = len(data)
    stats["coprime"] = gcd(d, e) == 1
    if type1_only and d >= 1 and e == (m - 1) * d + 1:
        stats["rawTreesEqualsDTimesData"] = raw_trees == d * len(data)
    if total is not None and total > 0 and d > 0 and e > 0 and gcd(d, e) == 1:
        dim = 1 - kronecker_euler_form(m, d, e)
        stats["eulerBoundHolds"] = total >= dim + 1
    return CensusReport(m, d, e, type1_only, data, mdims, total, positive,
                        [x.folds() for x in data], stats)


def _labellings(kinds: Sequence[str], d: int, e: int, hi: int) -> Iterator[tuple[int, ...]]:
    n_i = sum(1 for k in kinds if k == "i")
    n_j = len(kinds) - n_i
    snk = list(_compositions(e, n_j, hi))
    for a in _compositions(d, n_i, hi):
        for b in snk:
            ia, ib = iter(a), iter(b)
            yield tuple(next(ia) if k == "i" else next(ib) for k in kinds)


# ---------------------------------------------------------------------------
# fixed colourings of the three-source caterpillar


def caterpillar(m: int) -> BipartiteQuiver:
    """Three one-dimensional sources chained through shared sinks:
    i1 - j1 - i2 - j2 - i3 with an extra leaf at each end, type (3, 4)."""
    return BipartiteQuiver(
        m,
        ["i1", "i2", "i3"],
        ["j11", "j12", "j22", "j32"],
        [("i1", "j11"), ("i1", "j12"), ("i2", "j12"), ("i2", "j22"), ("i3", "j22"), ("i3", "j32")],
        {"i1": 1, "i2": 1, "i3": 1, "j11": 1, "j12": 1, "j22": 1, "j32": 1},
    )


_CATERPILLAR_ORDER = [("i1", "j11"), ("i1", "j12"), ("i2", "j12"),
                      ("i2", "j22"), ("i3", "j22"), ("i3", "j32")]


def caterpillar_colouring(pattern: Sequence[int]) -> Colouring:
    """Colour the caterpillar's arrows in path order."""
    if len(pattern) != 6:
        raise QuiverError("the caterpillar has six arrows")
    return dict(zip(_CATERPILLAR_ORDER, pattern))


@dataclass(frozen=True)
class ColouringWitness:
    quiver: BipartiteQuiver
    colouring: Colouring
    datum: LocalizationDatum
    induced: list[tuple[str, str, int]]

    @property
    def positive_dimensional(self) -> bool:
        """An induced arrow adds a parameter to the fixed component."""
        return bool(self.induced)


def caterpillar_witness(m: int, pattern: Sequence[int] = (1, 2, 3, 1, 2, 1)) -> ColouringWitness:
    """Weights and induced arrows of a coloured caterpillar.

    The default pattern (i, j, k, i, j, i) makes the last source sit at
    distance e_k from the first leaf, so an arrow (i3, j11) of colour k is
    induced and the fixed component has positive dimension.  The pattern
    (i, j, k, i, j, k) instead sends j11 and j32 to the same weight.
    """
    if m < 3:
        raise QuiverError("the witness needs three colours")
    q = caterpillar(m)
    c = caterpillar_colouring(pattern)
    x = weights_from_coloured_tree(q, c, root="i1")
    return ColouringWitness(q, c, x, induced_arrows(x, q))
