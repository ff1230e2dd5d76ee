"""Glueing of bipartite quivers along sinks and the arithmetic behind it.

A starting vector (d_s, e_s) for a coprime pair (d, e) is the small
companion with e_s d - e d_s = 1; stable quivers of type (d_s, e_s) + k(d, e)
can be glued onto each other, and the recursion of those glueings is
recorded as a tuple (n_k, ..., n_1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, comb, gcd
from typing import Iterable, Sequence

from .quiver import BipartiteQuiver, QuiverError
from .series import lagrange_power_coeff


class GlueError(ValueError):
    pass


# ---------------------------------------------------------------------------
# starting vectors


@dataclass(frozen=True)
class StartVector:
    ds: int
    es: int
    d: int
    e: int

    def identity(self) -> int:
        return self.es * self.d - self.e * self.ds

    def glueing_condition(self) -> list[bool]:
        return glueing_condition(self.d, self.e, self.ds, self.es)

    def check(self) -> None:
        if self.identity() != 1:
            raise GlueError(f"e_s d - e d_s = {self.identity()}, expected 1")
        if not (self.ds <= self.d and self.es <= self.e):
            raise GlueError("starting vector must not exceed (d, e)")
        if not all(self.glueing_condition()):
            raise GlueError(f"glueing condition fails: {self.glueing_condition()}")


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def glueing_condition(d: int, e: int, ds: int, es: int) -> list[bool]:
    """The five conditions a starting vector has to meet, in order.

    The first one is equivalent to 1 < d + d_s, which is an equality for
    d = 1 and (d_s, e_s) = (0, 1); that case is accepted with equality.
    """
    r = Fraction(e + es, d + ds)
    first = r * d < e + 1 if d > 1 else r * d <= e + 1
    second = r * d > e
    if d != 1:
        third = Fraction(es - 1, ds) <= Fraction(e, d) if ds else False
    else:
        third = (es - 1) * d == e * ds
    fourth = all(r * dp < _ceil_frac(Fraction(e * dp, d)) for dp in range(1, d))
    fifth = gcd(d + ds, e + es) == 1
    return [first, second, third, fourth, fifth]


def dvek_conditions(sv: StartVector, k: int, l: int) -> list[bool]:
    """The four inequalities for (d_s + k d, e_s + k e) against (l d, l e).

    Clearing denominators with e_s d - e d_s = 1, the first reads
    l < d_s + k d, so it only holds for small l; the others hold for all
    k, l >= 1.
    """
    d, e, ds, es = sv.d, sv.e, sv.ds, sv.es
    r = Fraction(es + k * e, ds + k * d)
    return [
        r * l * d < l * e + 1,
        r * l * d > l * e,
        Fraction(es + k * e - 1, ds + k * d) <= Fraction(e, d),
        all(r * dp < _ceil_frac(Fraction(e * dp, d)) for dp in range(1, d)),
    ]


def starting_vector(d: int, e: int) -> StartVector:
    if gcd(d, e) != 1:
        raise GlueError("starting vectors need coprime (d, e)")
    if d > e:
        raise GlueError("normalize first: need d <= e")
    if d < 1:
        raise GlueError("need d >= 1")
    if d == 1:
        sv = StartVector(0, 1, d, e)
    else:
        ds = next(x for x in range(1, d + 1) if (1 + e * x) % d == 0)
        sv = StartVector(ds, (1 + ds * e) // d, d, e)
    sv.check()
    return sv


# ---------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class ChainStep:
    """(target) = (ds, es) + k (d, e)."""

    ds: int
    es: int
    d: int
    e: int
    k: int

    @property
    def target(self) -> tuple[int, int]:
        return self.ds + self.k * self.d, self.es + self.k * self.e

    def to_json_obj(self) -> dict:
        return {"ds": self.ds, "es": self.es, "d": self.d, "e": self.e, "k": self.k}


@dataclass(frozen=True)
class GlueChain:
    d: int
    e: int
    tuple: tuple[int, ...]
    chain: tuple[ChainStep, ...]

    @property
    def start(self) -> tuple[int, int]:
        return self.chain[0].ds, self.chain[0].es

    def replay(self) -> tuple[int, int]:
        """Rebuild (d, e) from the innermost step outwards."""
        inner = self.chain[-1]
        cur = inner.target
        for step in reversed(self.chain[:-1]):
            if (step.d, step.e) != cur:
                raise GlueError("chain steps do not nest")
            cur = step.target
        return cur

    def to_json_obj(self) -> dict:
        return {
            "d": self.d,
            "e": self.e,
            "tuple": list(self.tuple),
            "chain": [s.to_json_obj() for s in self.chain],
        }


def decompose(d: int, e: int) -> GlueChain:
    """Split (d, e) = (d_s, e_s) + k (d', e') and recurse on (d', e').

    e' is the least value with e | 1 + d e', d' = (1 + e' d) / e and
    (d_s, e_s) is the starting vector of (d', e').  The recursion stops
    once the starting vector is (0, 1).  The tuple lists the k values
    from the outermost step inwards.
    """
    if d < 1 or gcd(d, e) != 1:
        raise GlueError("decompose needs coprime (d, e) with d >= 1")
    if d > e:
        raise GlueError("normalize first: need d <= e")
    if (d, e) == (1, 1):
        raise GlueError("(1,1) is the glueing unit and has no decomposition")
    steps: list[ChainStep] = []
    cd, ce = d, e
    while True:
        ep = next(x for x in range(0, ce + 1) if (1 + cd * x) % ce == 0)
        dp = (1 + ep * cd) // ce
        sv = starting_vector(dp, ep)
        if (cd - sv.ds) % dp or (ce - sv.es) % ep:
            raise GlueError(f"({cd},{ce}) does not split over ({dp},{ep})")
        k = (cd - sv.ds) // dp
        if k < 1 or sv.es + k * ep != ce:
            raise GlueError(f"({cd},{ce}) does not split over ({dp},{ep})")
        steps.append(ChainStep(sv.ds, sv.es, dp, ep, k))
        if (sv.ds, sv.es) == (0, 1):
            break
        cd, ce = dp, ep
    chain = GlueChain(d, e, tuple(s.k for s in steps), tuple(steps))
    if chain.replay() != (d, e):
        raise GlueError("replay does not reproduce the input")
    return chain


# ---------------------------------------------------------------------------
# glueing quivers


def _prefixed(q: BipartiteQuiver, tag: str, keep: dict[str, str]) -> dict:
    ren = {v: keep.get(v, f"{tag}/{v}") for v in q.vertices}
    return {
        "sources": [ren[i] for i in q.sources],
        "sinks": [ren[j] for j in q.sinks],
        "arrows": [(ren[i], ren[j]) for i, j in q.arrows],
        "dims": {ren[v]: q.dims[v] for v in q.vertices},
    }


def glue(q: BipartiteQuiver, j: str, q2: BipartiteQuiver, j2: str, merged_dim: int) -> BipartiteQuiver:
    """Identify sink ``j`` of ``q`` with sink ``j2`` of ``q2``.

    Vertex ids become "L/<id>" and "R/<id>"; the merged sink is "L/<j>".
    """
    if j not in q.sinks or j2 not in q2.sinks:
        raise GlueError("glueing vertices must be sinks")
    if q.degree(j) + q2.degree(j2) > max(q.m, q2.m):
        raise GlueError("colour capacity exceeded")
    if q.m != q2.m:
        raise GlueError("quivers belong to different K(m)")
    if merged_dim < 1:
        raise GlueError("merged dimension must be positive")
    left = _prefixed(q, "L", {})
    right = _prefixed(q2, "R", {j2: f"L/{j}"})
    dims = {**left["dims"], **right["dims"]}
    dims[f"L/{j}"] = merged_dim
    return BipartiteQuiver(
        q.m,
        left["sources"] + right["sources"],
        left["sinks"] + [s for s in right["sinks"] if s != f"L/{j}"],
        left["arrows"] + right["arrows"],
        dims,
    )


def stable_glue(q: BipartiteQuiver, j: str, q2: BipartiteQuiver, j2: str) -> BipartiteQuiver:
    """Glue with the merged dimension dim(j) + dim(j2) - 1."""
    return glue(q, j, q2, j2, q.dims[j] + q2.dims[j2] - 1)


def modified_variants(t: BipartiteQuiver) -> list[tuple[BipartiteQuiver, str]]:
    """Quivers of type (d, e + 1) made from ``t`` with their modified vertex.

    Three constructions: hang a new one-dimensional sink on a source with
    fewer than m arrows; raise the dimension of a sink with 1 < R_j < m;
    raise the dimension of a sink whose dimension is below the total
    dimension of its neighbours.
    """
    out: list[tuple[BipartiteQuiver, str]] = []
    seen: set[tuple] = set()

    def add(q: BipartiteQuiver, v: str) -> None:
        key = (q.sources, q.sinks, q.arrows, tuple(sorted(q.dims.items())), v)
        if key not in seen:
            seen.add(key)
            out.append((q, v))

    for i in t.sources:
        if t.degree(i) < t.m:
            new = _fresh(t, "n")
            add(BipartiteQuiver(t.m, t.sources, t.sinks + (new,),
                                t.arrows + ((i, new),), {**t.dims, new: 1}), new)
    for j in t.sinks:
        r = t.degree(j)
        if 1 < r < t.m or t.dims[j] < sum(t.dims[i] for i in t.in_neighbours(j)):
            add(BipartiteQuiver(t.m, t.sources, t.sinks, t.arrows,
                                {**t.dims, j: t.dims[j] + 1}), j)
    return out


def _fresh(q: BipartiteQuiver, stem: str) -> str:
    n = 1
    while f"{stem}{n}" in q.dims:
        n += 1
    return f"{stem}{n}"


def lone_sink(m: int) -> BipartiteQuiver:
    """The quiver of type (0, 1)."""
    return BipartiteQuiver(m, [], ["s"], [], {"s": 1})


def glue_schedule(
    m: int, base: Sequence[BipartiteQuiver], start: Sequence[BipartiteQuiver],
    max_total: int,
) -> dict[tuple[int, ...], list[BipartiteQuiver]]:
    """Build the sets T_{n_k,...,n_1} for all tuples with sum <= max_total.

    ``base`` are the stable quivers of the unit type (d, e) and ``start``
    those of its starting type (d_s, e_s).  T_{n_1} glues a modified base
    quiver onto a member of T_{n_1 - 1} (with T_0 = start); deeper tuples
    glue a member of T_{n_{k+1} - 1, n_k, ...} with a modified member of
    T_{n_k, ...}, where T_{0, n_k, ...} = T_{n_k - 1, ...}.  The glueing
    vertex on the modified side is the modified vertex and the merged
    dimension follows the dim(j0) + dim(j1) - 1 rule.
    """
    memo: dict[tuple[int, ...], list[BipartiteQuiver]] = {}

    def hats(tup: tuple[int, ...]) -> list[tuple[BipartiteQuiver, str]]:
        src = base if not tup else members(tup)
        out = []
        for t in src:
            out.extend(modified_variants(t))
        return out

    def members(tup: tuple[int, ...]) -> list[BipartiteQuiver]:
        if tup in memo:
            return memo[tup]
        head, rest = tup[0], tup[1:]
        if head == 0:
            res = list(start) if not rest else members((rest[0] - 1,) + rest[1:])
        else:
            left = members((head - 1,) + rest)
            res = []
            for s in left:
                for t, j1 in hats(rest):
                    for j0 in s.sinks:
                        if s.degree(j0) + t.degree(j1) <= m:
                            res.append(stable_glue(s, j0, t, j1))
        memo[tup] = res
        return res

    out = {}
    for tup in _tuples(max_total):
        out[tup] = members(tup)
    return out


def _tuples(max_total: int) -> Iterable[tuple[int, ...]]:
    def rec(left: int) -> Iterable[tuple[int, ...]]:
        for first in range(1, left + 1):
            yield (first,)
            for rest in rec(left - first):
                yield (first,) + rest
    yield from rec(max_total)


# ---------------------------------------------------------------------------
# knot and count recursions


@dataclass(frozen=True)
class FamilyCount:
    a: int
    K: int
    m: int
    n: int
    tuple: tuple[int, ...]


def family_counts(m: int, n: int, tup: Sequence[int]) -> FamilyCount:
    """Counts a and knot numbers K for the glued family indexed by
    (n_k, ..., n_1), outermost first.

    Base level: a_{n_1} = C(m-1, n) A(C(m-1, n-1), (n-1)(m-1), n(m-1),
    n(m-1) + (n_1-1)(n-1)(m-1)) and K_{n_1} = n(m-1) + (n_1-1)(n-1)(m-1)
    - (n_1-1).  Deeper levels:
        K_{n_{k+1},..} = K_{n_k - 1,..} + n_{k+1} K_{n_k,..} - n_{k+1}
        a_{n_{k+1},..} = a_{n_k - 1,..} A(a_{n_k,..}, K_{n_k,..},
                          K_{n_k - 1,..}, K_{n_k - 1,..} + n_{k+1} K_{n_k,..})
    with the index rule Q_{0, n_k, ..} = Q_{n_k - 1, ..}; a bare zero
    index is the single star of type (1, m), with a = 1 and K = m.
    """
    tup = tuple(int(x) for x in tup)
    if m < 3 or n < 2:
        raise GlueError("need m >= 3 and n >= 2")
    if not tup or any(x < 1 for x in tup):
        raise GlueError("tuple entries must be positive")
    a, K = _counts(m, n, tup)
    return FamilyCount(a, K, m, n, tup)


@lru_cache(maxsize=None)
def _counts(m: int, n: int, tup: tuple[int, ...]) -> tuple[int, int]:
    head, rest = tup[0], tup[1:]
    if head == 0:
        if not rest:
            return 1, m
        return _counts(m, n, (rest[0] - 1,) + rest[1:])
    if not rest:
        n1 = head
        K = n * (m - 1) + (n1 - 1) * (n - 1) * (m - 1) - (n1 - 1)
        a = comb(m - 1, n) * lagrange_power_coeff(
            comb(m - 1, n - 1), (n - 1) * (m - 1), n * (m - 1),
            n * (m - 1) + (n1 - 1) * (n - 1) * (m - 1),
        )
        return a, K
    a_prev, K_prev = _counts(m, n, (rest[0] - 1,) + rest[1:])
    a_cur, K_cur = _counts(m, n, rest)
    K = K_prev + head * K_cur - head
    a = a_prev * lagrange_power_coeff(a_cur, K_cur, K_prev, K_prev + head * K_cur)
    return a, K


def family_type(m: int, n: int, tup: Sequence[int]) -> tuple[int, int]:
    """Dimension type of the glued family indexed by ``tup``.

    The unit is (n-1, m(n-1)-1) on top of the star (1, m); deeper levels
    add the type of Q_{n_k - 1, ..} to n_{k+1} copies of Q_{n_k, ..}.
    """
    tup = tuple(tup)

    def t(tp: tuple[int, ...]) -> tuple[int, int]:
        head, rest = tp[0], tp[1:]
        if head == 0:
            return (1, m) if not rest else t((rest[0] - 1,) + rest[1:])
        if not rest:
            return 1 + head * (n - 1), m + head * (m * (n - 1) - 1)
        pd, pe = t((rest[0] - 1,) + rest[1:])
        cd, ce = t(rest)
        return pd + head * cd, pe + head * ce

    return t(tup)


def family_parameters(m: int, d: int, e: int) -> tuple[int, tuple[int, ...]]:
    """Find (n, tuple) whose glued family has type (d, e).

    Requires m(n-1)-1 <= e/d * (n-1) and e/d <= (mn-1)/n for some n with
    (m+1)/2 <= n <= m-1.  The tuple is read off the decomposition chain:
    its outer k values are kept, and the step splitting over the unit
    (n-1, m(n-1)-1) supplies n_1 from (d', e') = (1, m) + n_1 (unit).
    """
    if gcd(d, e) != 1 or d < 1:
        raise GlueError("need coprime (d, e) with d >= 1")
    r = Fraction(e, d)
    chain = decompose(d, e)
    for n in range(max(2, (m + 2) // 2), m):
        lo = Fraction(m * (n - 1) - 1, n - 1)
        hi = Fraction(m * n - 1, n)
        if not (lo <= r <= hi):
            continue
        unit_v = (n - 1, m * (n - 1) - 1)
        outer: list[int] = []
        for step in chain.chain:
            if (step.d, step.e) == unit_v:
                td, te = step.target
                n1, rem = divmod(td - 1, n - 1)
                if rem or n1 < 1 or te != m + n1 * unit_v[1]:
                    break
                tup = tuple(outer) + (n1,)
                if family_type(m, n, tup) == (d, e):
                    return n, tup
                break
            outer.append(step.k)
    raise GlueError(f"({d},{e}) is not a glued family type for m={m}")


def example_8_13(m: int = 3) -> BipartiteQuiver:
    """A stable tree of type (8, 13) assembled by three glueings from the
    (1,2), (2,3), (3,5) and (5,8) pieces; one source and three sinks have
    dimension 2."""
    sources = {"i1": 1, "i2": 1, "i3": 1, "i4": 1, "i5": 2, "i6": 1, "i7": 1}
    sinks = {"j1": 1, "j2": 2, "j3": 1, "j4": 1, "j5": 1, "j6": 2,
             "j7": 1, "j8": 2, "j9": 1, "j10": 1}
    arrows = [("i1", "j1"), ("i1", "j2"), ("i2", "j2"), ("i2", "j4"), ("i3", "j2"),
              ("i3", "j3"), ("i4", "j3"), ("i4", "j5"), ("i4", "j6"), ("i5", "j6"),
              ("i5", "j7"), ("i5", "j8"), ("i6", "j8"), ("i6", "j10"), ("i7", "j8"),
              ("i7", "j9")]
    return BipartiteQuiver(m, list(sources), list(sinks), arrows, {**sources, **sinks})
