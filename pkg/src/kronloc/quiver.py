"""Quivers, dimension vectors, slope stability and Kronecker roots.

Everything here is exact: slopes are ``Fraction`` values and every
stability comparison is done by cross-multiplying integers.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_SWEEP_CAP = 10**7


class QuiverError(ValueError):
    """Raised on malformed quivers or dimension vectors."""


class SweepCapExceeded(RuntimeError):
    """The sub-dimension sweep would visit more tuples than allowed."""

    def __init__(self, size: int, cap: int):
        super().__init__(f"sub-dimension sweep of size {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


# ---------------------------------------------------------------------------
# generic quivers (vertex list plus arrow list, multiplicities allowed)


@dataclass(frozen=True)
class QuiverShape:
    """A finite quiver: vertex ids plus a list of arrows (repeats allowed)."""

    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("duplicate vertex id")
        known = set(self.vertices)
        for a, b in self.arrows:
            if a not in known or b not in known:
                raise QuiverError(f"arrow {a}->{b} uses an unknown vertex")

    @classmethod
    def kronecker(cls, m: int) -> "QuiverShape":
        return cls(("source", "sink"), (("source", "sink"),) * m)


def _check_vector(q: QuiverShape, d: Mapping[str, int]) -> None:
    if set(d) != set(q.vertices):
        raise QuiverError("dimension vector does not match the vertex set")
    if any(v < 0 for v in d.values()):
        raise QuiverError("dimension vectors are non-negative")


def euler_form(q: QuiverShape, d: Mapping[str, int], e: Mapping[str, int]) -> int:
    """<d, e> = sum_i d_i e_i - sum over arrows a: i -> j of d_i e_j."""
    _check_vector(q, d)
    _check_vector(q, e)
    diag = sum(d[v] * e[v] for v in q.vertices)
    return diag - sum(d[a] * e[b] for a, b in q.arrows)


def moduli_dimension(q: QuiverShape, d: Mapping[str, int]) -> int:
    """Expected dimension 1 - <d, d> of the stable moduli space."""
    entries = [x for x in d.values() if x]
    if entries and gcd(*entries) != 1:
        raise QuiverError("moduli dimension is only used for coprime vectors")
    return 1 - euler_form(q, d, d)


def kronecker_euler_form(m: int, d: int, e: int) -> int:
    return d * d + e * e - m * d * e


def slope(d: Mapping[str, int], theta: Mapping[str, int]) -> Fraction:
    """Theta(d) / dim(d) as an exact rational."""
    if set(theta) < set(k for k, v in d.items() if v):
        raise QuiverError("theta is not defined on every vertex of d")
    total = sum(d.values())
    if total == 0:
        raise QuiverError("zero vector has no slope")
    return Fraction(sum(theta.get(k, 0) * v for k, v in d.items()), total)


def kronecker_slope(d: int, e: int) -> Fraction:
    return slope({"source": d, "sink": e}, {"source": 1, "sink": 0})


# ---------------------------------------------------------------------------
# generic subrepresentations via Schofield's ext recursion


class _GenericSubs:
    """Decide which dimension vectors occur as subrepresentations of a
    general representation.

    beta embeds in alpha iff ext(beta, alpha - beta) = 0, and
    ext(x, y) = max(0, max{-<x', y> : x' embeds in x}).  Both facts are
    Schofield's; the recursion only descends into strictly smaller vectors.
    """

    def __init__(self, n: int, arrows: Sequence[tuple[int, int]]):
        self.n = n
        self.arrows = list(arrows)
        self.memo: dict[tuple[tuple[int, ...], tuple[int, ...]], bool] = {}

    def euler(self, x: Sequence[int], y: Sequence[int]) -> int:
        s = sum(a * b for a, b in zip(x, y))
        return s - sum(x[i] * y[j] for i, j in self.arrows)

    def embeds(self, beta: tuple[int, ...], alpha: tuple[int, ...]) -> bool:
        if not any(beta) or beta == alpha:
            return True
        key = (beta, alpha)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        gamma = tuple(a - b for a, b in zip(alpha, beta))
        ok = True
        for x in itertools.product(*(range(b + 1) for b in beta)):
            if not any(x):
                continue
            if self.euler(x, gamma) < 0 and self.embeds(x, beta):
                ok = False
                break
        self.memo[key] = ok
        return ok


def _destabilizing_general(
    n: int,
    arrows: Sequence[tuple[int, int]],
    alpha: tuple[int, ...],
    theta: Sequence[int],
    strict: bool,
    cap: int,
) -> tuple[int, ...] | None:
    size = prod(a + 1 for a in alpha)
    if size > cap:
        raise SweepCapExceeded(size, cap)
    subs = _GenericSubs(n, arrows)
    top = sum(t * a for t, a in zip(theta, alpha))
    total = sum(alpha)
    candidates = []
    for beta in itertools.product(*(range(a + 1) for a in alpha)):
        tb = sum(beta)
        if tb == 0 or beta == alpha:
            continue
        lhs = sum(t * b for t, b in zip(theta, beta)) * total
        rhs = top * tb
        if lhs > rhs or (strict and lhs == rhs):
            candidates.append(beta)
    # small vectors first: they are cheap and usually decide the question
    candidates.sort(key=sum)
    for beta in candidates:
        if subs.embeds(beta, alpha):
            return beta
    return None


def kronecker_is_stable(m: int, d: int, e: int, strict: bool = True) -> bool:
    """Generic (semi)stability of dimension vector (d, e) for K(m), Theta=(1,0)."""
    if d < 0 or e < 0 or d + e == 0:
        raise QuiverError("need a nonzero dimension vector")
    wit = _destabilizing_general(
        2, [(0, 1)] * m, (d, e), (1, 0), strict, DEFAULT_SWEEP_CAP
    )
    return wit is None


# ---------------------------------------------------------------------------
# bipartite quivers


@dataclass(frozen=True)
class BipartiteQuiver:
    """Sources, sinks, arrows source -> sink (at most one per pair) and dims."""

    m: int
    sources: tuple[str, ...]
    sinks: tuple[str, ...]
    arrows: tuple[tuple[str, str], ...]
    dims: Mapping[str, int] = field(hash=False)

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "sinks", tuple(self.sinks))
        object.__setattr__(self, "arrows", tuple(sorted(tuple(a) for a in self.arrows)))
        object.__setattr__(self, "dims", dict(self.dims))
        ids = self.sources + self.sinks
        if len(set(ids)) != len(ids):
            raise QuiverError("vertex ids must be unique across sources and sinks")
        if set(self.dims) != set(ids):
            raise QuiverError("dims must cover exactly the vertices")
        if any(v < 0 for v in self.dims.values()):
            raise QuiverError("dimensions are non-negative")
        if len(set(self.arrows)) != len(self.arrows):
            raise QuiverError("at most one arrow per (source, sink) pair")
        src, snk = set(self.sources), set(self.sinks)
        for i, j in self.arrows:
            if i not in src or j not in snk:
                raise QuiverError(f"arrow {i}->{j} is not source -> sink")
        for v in ids:
            if self.degree(v) > self.m:
                raise QuiverError(f"vertex {v} has more than m={self.m} arrows")

    # neighbourhoods
    def degree(self, v: str) -> int:
        return sum(1 for a in self.arrows if v in a)

    def out_neighbours(self, i: str) -> list[str]:
        return [j for a, j in self.arrows if a == i]

    def in_neighbours(self, j: str) -> list[str]:
        return [i for i, b in self.arrows if b == j]

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.sources + self.sinks

    @property
    def dimension_type(self) -> tuple[int, int]:
        return (
            sum(self.dims[i] for i in self.sources),
            sum(self.dims[j] for j in self.sinks),
        )

    def shape(self) -> QuiverShape:
        return QuiverShape(self.vertices, self.arrows)

    def is_connected(self) -> bool:
        verts = [v for v in self.vertices]
        if not verts:
            return True
        adj: dict[str, set[str]] = {v: set() for v in verts}
        for i, j in self.arrows:
            adj[i].add(j)
            adj[j].add(i)
        seen = {verts[0]}
        stack = [verts[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(verts)

    def is_tree(self) -> bool:
        return self.is_connected() and len(self.arrows) == len(self.vertices) - 1

    def moduli_dimension(self) -> int:
        return moduli_dimension(self.shape(), self.dims)

    # serialization
    def to_json_obj(self) -> dict:
        return {
            "m": self.m,
            "sources": [{"id": i, "dim": self.dims[i]} for i in self.sources],
            "sinks": [{"id": j, "dim": self.dims[j]} for j in self.sinks],
            "arrows": [[i, j] for i, j in self.arrows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "BipartiteQuiver":
        try:
            m = obj["m"]
            sources = [(str(v["id"]), v["dim"]) for v in obj["sources"]]
            sinks = [(str(v["id"]), v["dim"]) for v in obj["sinks"]]
            arrows = [(str(a), str(b)) for a, b in obj["arrows"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise QuiverError(f"malformed quiver JSON: {exc}") from exc
        for _, dim in sources + sinks:
            if not isinstance(dim, int) or isinstance(dim, bool):
                raise QuiverError("dims must be integers")
        if not isinstance(m, int) or m < 1:
            raise QuiverError("m must be a positive integer")
        dims = dict(sources + sinks)
        return cls(m, [s for s, _ in sources], [s for s, _ in sinks], arrows, dims)

    @classmethod
    def from_json(cls, text: str) -> "BipartiteQuiver":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise QuiverError(f"invalid JSON: {exc}") from exc
        return cls.from_json_obj(obj)

    @classmethod
    def star(cls, m: int, k: int, dim: int = 1, prefix: str = "") -> "BipartiteQuiver":
        """One source joined to k sinks, every vertex of dimension ``dim``."""
        src = f"{prefix}i"
        sinks = [f"{prefix}j{t}" for t in range(1, k + 1)]
        dims = {src: dim, **{j: dim for j in sinks}}
        return cls(m, [src], sinks, [(src, j) for j in sinks], dims)


def kronecker_theta(q: BipartiteQuiver) -> dict[str, int]:
    return {v: (1 if v in q.sources else 0) for v in q.vertices}


def find_destabilizing(
    q: BipartiteQuiver, strict: bool = True, cap: int = DEFAULT_SWEEP_CAP
) -> dict[str, int] | None:
    """Return a destabilizing sub-dimension vector of the general
    representation of ``q``, or None when there is none.

    With Theta = indicator of the sources, the slope of (d, e) is
    d / (d + e).  When every source has dimension at most one, sources
    contribute all-or-nothing and generic lines are in general position,
    so the minimal sink part over a source tuple u is
    min(d_j, sum_{i in A_j} u_i).  Larger source dimensions admit special
    subspaces (kernels, common preimages) whose sink part is smaller; for
    those the same sweep runs, and below the general-position sink part
    each candidate is tested for being a subrepresentation dimension.
    """
    active = [v for v in q.vertices if q.dims[v] > 0]
    if not active:
        raise QuiverError("zero vector has no slope")
    src = [i for i in q.sources if q.dims[i] > 0]
    for i in src:
        if not any(q.dims[j] > 0 for j in q.out_neighbours(i)):
            wit = {v: 0 for v in q.vertices}
            wit[i] = 1
            return wit

    d_tot, e_tot = q.dimension_type
    total = d_tot + e_tot
    sweep = prod(q.dims[i] + 1 for i in src)
    if sweep > cap:
        raise SweepCapExceeded(sweep, cap)

    if all(q.dims[i] <= 1 for i in src):
        sinks = [j for j in q.sinks if q.dims[j] > 0]
        feeders = {j: [i for i in q.in_neighbours(j) if q.dims[i] > 0] for j in sinks}
        for mask in range(1, 1 << len(src)):
            chosen = {src[t] for t in range(len(src)) if mask >> t & 1}
            u = len(chosen)
            part = {j: min(q.dims[j], sum(1 for i in feeders[j] if i in chosen)) for j in sinks}
            w = sum(part.values())
            if u == d_tot and w == e_tot:
                continue
            lhs, rhs = u * total, d_tot * (u + w)
            if lhs > rhs or (strict and lhs == rhs):
                wit = {v: 0 for v in q.vertices}
                for i in chosen:
                    wit[i] = 1
                wit.update(part)
                return wit
        return None

    index = {v: t for t, v in enumerate(active)}
    arrows = [(index[i], index[j]) for i, j in q.arrows if i in index and j in index]
    alpha = tuple(q.dims[v] for v in active)
    src_idx = [index[i] for i in src]
    snk_idx = [index[j] for j in q.sinks if q.dims[j] > 0]
    feeders = {j: [i for i, jj in arrows if jj == j] for j in snk_idx}
    oracle = _HomOracle(len(active), arrows)
    for u in itertools.product(*(range(q.dims[i] + 1) for i in src)):
        us = sum(u)
        if us == 0:
            continue
        beta = [0] * len(active)
        for t, x in zip(src_idx, u):
            beta[t] = x
        # the general-position sink part is always attained; every other
        # attainable sink part lies below it (sinks can always grow)
        top = tuple(min(alpha[j], sum(beta[i] for i in feeders[j])) for j in snk_idx)
        best = _lowest_sink_part(oracle, alpha, beta, snk_idx, top, us, d_tot, total, strict)
        if best is not None:
            wit = {v: 0 for v in q.vertices}
            for t, v in enumerate(active):
                wit[v] = beta[t]
            for j, w in zip(snk_idx, best):
                wit[active[j]] = w
            return wit
    return None


def _destabilizes(us: int, ws: int, d_tot: int, total: int, strict: bool, proper: bool) -> bool:
    if not proper:
        return False
    lhs, rhs = us * total, d_tot * (us + ws)
    return lhs > rhs or (strict and lhs == rhs)


def _lowest_sink_part(oracle, alpha, beta, snk_idx, top, us, d_tot, total, strict):
    """Search attainable sink parts below ``top`` for a destabilizing one."""
    e_tot = sum(alpha[j] for j in snk_idx)
    full_src = us == d_tot

    def proper(w):
        return not (full_src and sum(w) == e_tot)

    if _destabilizes(us, sum(top), d_tot, total, strict, proper(top)):
        return top
    seen = {top}
    stack = [top]
    while stack:
        w = stack.pop()
        for t in range(len(w)):
            if w[t] == 0:
                continue
            v = w[:t] + (w[t] - 1,) + w[t + 1:]
            if v in seen:
                continue
            seen.add(v)
            vec = list(beta)
            for j, x in zip(snk_idx, v):
                vec[j] = x
            if not oracle.embeds(tuple(vec), alpha):
                continue
            if _destabilizes(us, sum(v), d_tot, total, strict, proper(v)):
                return v
            stack.append(v)
    return None


_PRIME = 2_147_483_647


def _rank_mod_p(rows: list[list[int]], ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    mat = np.array(rows, dtype=np.int64) % _PRIME
    rank = 0
    nrows = mat.shape[0]
    for col in range(ncols):
        if rank == nrows:
            break
        nz = np.nonzero(mat[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            mat[[rank, piv]] = mat[[piv, rank]]
        inv = pow(int(mat[rank, col]), _PRIME - 2, _PRIME)
        mat[rank] = (mat[rank] * inv) % _PRIME
        below = mat[rank + 1:, col].copy()
        if below.any():
            mat[rank + 1:] = (mat[rank + 1:] - (below[:, None] * mat[rank]) % _PRIME) % _PRIME
        rank += 1
    return rank


class _HomOracle:
    """beta embeds in alpha iff ext(beta, alpha - beta) = 0 (Schofield), with
    ext = hom - <beta, gamma> and hom read off representations with random
    entries in GF(p).  A random point can only overshoot the generic hom,
    so the smaller of two independent draws is used; draws are seeded by
    the vectors, which keeps every run reproducible.
    """

    def __init__(self, n: int, arrows: Sequence[tuple[int, int]]):
        self.n = n
        self.arrows = list(arrows)
        self.memo: dict[tuple[int, ...], bool] = {}

    def euler(self, x: Sequence[int], y: Sequence[int]) -> int:
        s = sum(a * b for a, b in zip(x, y))
        return s - sum(x[i] * y[j] for i, j in self.arrows)

    def _hom(self, beta, gamma, seed: str) -> int:
        rng = random.Random(seed)
        off, pos = {}, 0
        for v in range(self.n):
            off[v] = pos
            pos += gamma[v] * beta[v]
        rows = []
        for s, t in self.arrows:
            if not (beta[s] and gamma[t]):
                continue
            a = [[rng.randrange(_PRIME) for _ in range(beta[s])] for _ in range(beta[t])]
            c = [[rng.randrange(_PRIME) for _ in range(gamma[s])] for _ in range(gamma[t])]
            # (phi_t A - C phi_s)[r][col] = 0, phi_v stored row-major gamma_v x beta_v
            for r in range(gamma[t]):
                for col in range(beta[s]):
                    row = [0] * pos
                    for k in range(beta[t]):
                        row[off[t] + r * beta[t] + k] += a[k][col]
                    for k in range(gamma[s]):
                        row[off[s] + k * beta[s] + col] -= c[r][k]
                    rows.append(row)
        return pos - _rank_mod_p(rows, pos)

    def embeds(self, beta: tuple[int, ...], alpha: tuple[int, ...]) -> bool:
        hit = self.memo.get(beta)
        if hit is not None:
            return hit
        gamma = tuple(a - b for a, b in zip(alpha, beta))
        target = self.euler(beta, gamma)
        hom = min(self._hom(beta, gamma, f"{beta}|{gamma}|{k}") for k in range(2))
        ok = hom == target
        self.memo[beta] = ok
        return ok


def is_generically_stable(
    q: BipartiteQuiver, strict: bool = True, cap: int = DEFAULT_SWEEP_CAP
) -> bool:
    return find_destabilizing(q, strict, cap) is None


# ---------------------------------------------------------------------------
# Kronecker roots


@dataclass(frozen=True)
class KroneckerPair:
    m: int
    d: int
    e: int

    def __post_init__(self):
        if self.m < 1 or self.d < 0 or self.e < 0:
            raise QuiverError("need m >= 1 and non-negative d, e")

    @property
    def coprime(self) -> bool:
        return gcd(self.d, self.e) == 1


def _as_pair(p: KroneckerPair | tuple[int, int, int]) -> KroneckerPair:
    return p if isinstance(p, KroneckerPair) else KroneckerPair(*p)


def apply_move(m: int, d: int, e: int, move: str) -> tuple[int, int]:
    if move == "swap":
        return e, d
    if move == "reflect":
        return m * e - d, e
    raise QuiverError(f"unknown move {move!r}")


def replay_moves(m: int, d: int, e: int, moves: Iterable[str]) -> tuple[int, int]:
    for mv in moves:
        d, e = apply_move(m, d, e, mv)
    return d, e


def _push(moves: list[str], mv: str) -> None:
    # two swaps in a row cancel
    if mv == "swap" and moves and moves[-1] == "swap":
        moves.pop()
    else:
        moves.append(mv)


def normalize_kronecker(p) -> tuple[KroneckerPair, list[str]]:
    """Reduce (d, e) with the moves swap and reflect.

    Stops in the region d <= e <= (m/2) d, at a simple root (0, 1), or at
    a pair where a further reflection would go negative (then the input
    is not a root).  Every reduction step strictly lowers d + e.
    """
    p = _as_pair(p)
    m, d, e = p.m, p.d, p.e
    if d == 0 and e == 0:
        raise QuiverError("(0, 0) has no normal form")
    moves: list[str] = []
    while True:
        if d > e:
            d, e = e, d
            _push(moves, "swap")
            continue
        if d == 0 or 2 * e <= m * d or e > m * d:
            break
        before = d + e
        # reflection at the sink: swap, reflect, swap
        for mv in ("swap", "reflect", "swap"):
            _push(moves, mv)
        d, e = d, m * d - e
        assert d + e < before, "normal form reduction must shrink d + e"
    return KroneckerPair(m, d, e), moves


def classify_root(p) -> str:
    """'real', 'imaginary' or 'not-a-root' for K(m)."""
    p = _as_pair(p)
    if p.d == 0 and p.e == 0:
        raise QuiverError("(0, 0) is not classified")
    if p.d > 0 and p.e > 0 and kronecker_euler_form(p.m, p.d, p.e) <= 0:
        return "imaginary"
    rep, _ = normalize_kronecker(p)
    if (rep.d, rep.e) == (0, 1):
        return "real"
    return "not-a-root"
