"""Finite game graphs with integer vector weights.

Shared model layer for the whole package: the two-player arena type, parsing
and byte-stable serialization, scalarization, attractors, subgames, the
assumption-normalizing transformation, cycle-sign tests, Karp's maximum cycle
mean, and cycle excision for finite paths. Everything is exact (int/Fraction)
and immutable after construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

P1 = 1
P2 = 2

Scalar = Union[int, Fraction]


class ModelError(ValueError):
    """Malformed model or document (CLI exit code 2)."""


class GuardError(RuntimeError):
    """A desk-scale size guard was exceeded."""


class BudgetError(RuntimeError):
    """A search budget was exhausted without a definitive answer (CLI exit 3)."""


class InvariantError(AssertionError):
    """An internal soundness invariant failed; indicates a bug (CLI exit 4)."""


def vec_add(a: Sequence[Scalar], b: Sequence[Scalar]) -> Tuple[Scalar, ...]:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Sequence[Scalar], b: Sequence[Scalar]) -> Tuple[Scalar, ...]:
    return tuple(x - y for x, y in zip(a, b))


def vec_neg(a: Sequence[Scalar]) -> Tuple[Scalar, ...]:
    return tuple(-x for x in a)


def vec_dot(a: Sequence[Scalar], b: Sequence[Scalar]) -> Scalar:
    if len(a) != len(b):
        raise ValueError("dimension mismatch in dot product")
    return sum(x * y for x, y in zip(a, b))


def vec_zero(k: int) -> Tuple[int, ...]:
    return (0,) * k


def clear_denominators(lam: Sequence[Scalar]) -> Tuple[int, ...]:
    """Scale a rational vector by the lcm of denominators to an integer vector."""
    fracs = [Fraction(x) for x in lam]
    mult = 1
    for f in fracs:
        d = f.denominator
        g = _gcd(mult, d)
        mult = mult // g * d
    out = []
    for f in fracs:
        scaled = f * mult
        assert scaled.denominator == 1
        out.append(int(scaled))
    return tuple(out)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    w: Tuple[int, ...]
    p: Optional[int] = None


class GameGraph:
    """A finite two-player arena with k-dimensional integer edge weights.

    Vertices are string ids with an owner (1 or 2); parallel edges are
    disallowed. Instances are immutable; adjacency maps are precomputed.
    An optional per-edge priority `p` supports parity models.
    """

    __slots__ = ("k", "owners", "edges", "out", "_edge_index")

    def __init__(self, k: int, vertices: Sequence[Tuple[str, int]], edges: Sequence[Edge]):
        if k < 0:
            raise ModelError("dimension k must be >= 0")
        owners: Dict[str, int] = {}
        for vid, owner in vertices:
            if not isinstance(vid, str) or not vid:
                raise ModelError("vertex ids must be nonempty strings")
            if owner not in (P1, P2):
                raise ModelError("vertex owner must be 1 or 2: %r" % (owner,))
            if vid in owners:
                raise ModelError("duplicate vertex id %r" % vid)
            owners[vid] = owner
        out: Dict[str, List[Edge]] = {vid: [] for vid in owners}
        seen = set()
        for e in edges:
            if e.src not in owners or e.dst not in owners:
                raise ModelError("edge endpoint not a vertex: %r -> %r" % (e.src, e.dst))
            if len(e.w) != k:
                raise ModelError("edge weight arity %d != k=%d" % (len(e.w), k))
            if not all(isinstance(x, int) for x in e.w):
                raise ModelError("edge weights must be integers")
            if e.p is not None and (not isinstance(e.p, int) or e.p < 1):
                raise ModelError("edge priority must be an integer >= 1")
            if (e.src, e.dst) in seen:
                raise ModelError("parallel edge %r -> %r" % (e.src, e.dst))
            seen.add((e.src, e.dst))
            out[e.src].append(e)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "owners", dict(owners))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "out", {v: tuple(es) for v, es in out.items()})
        object.__setattr__(self, "_edge_index", {(e.src, e.dst): e for e in edges})

    def __setattr__(self, name, value):
        raise AttributeError("GameGraph is immutable")

    @property
    def n(self) -> int:
        return len(self.owners)

    @property
    def vertices(self) -> Tuple[str, ...]:
        return tuple(self.owners)

    def owner(self, v: str) -> int:
        return self.owners[v]

    def edge(self, src: str, dst: str) -> Edge:
        return self._edge_index[(src, dst)]

    def has_edge(self, src: str, dst: str) -> bool:
        return (src, dst) in self._edge_index

    def max_abs_weight(self) -> int:
        w = 0
        for e in self.edges:
            for x in e.w:
                if abs(x) > w:
                    w = abs(x)
        return w

    def require_total(self) -> None:
        for v in self.owners:
            if not self.out[v]:
                raise ModelError("vertex %r has no outgoing edge" % v)

    def __eq__(self, other):
        return (
            isinstance(other, GameGraph)
            and self.k == other.k
            and self.owners == other.owners
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.k, tuple(self.owners.items()), self.edges))

    def __repr__(self):
        return "GameGraph(k=%d, n=%d, m=%d)" % (self.k, self.n, len(self.edges))


def build_game(k: int, vertices: Sequence[Tuple[str, int]], edges: Iterable[Tuple], total: bool = True) -> GameGraph:
    """Convenience constructor from (src, dst, w) or (src, dst, w, p) tuples."""
    es = []
    for t in edges:
        if len(t) == 3:
            src, dst, w = t
            p = None
        else:
            src, dst, w, p = t
        es.append(Edge(src, dst, tuple(w), p))
    g = GameGraph(k, vertices, es)
    if total:
        g.require_total()
    return g


# ---------------------------------------------------------------------------
# Parsing / serialization


def parse_game(text: str) -> GameGraph:
    """Parse the textual game document into a GameGraph.

    Format: {"k": int, "vertices": [{"id", "owner"}], "edges": [{"src",
    "dst", "w": [ints], "p": optional int}]}.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError("not valid JSON: %s" % exc) from None
    if not isinstance(doc, dict):
        raise ModelError("top-level document must be an object")
    for field_name in ("k", "vertices", "edges"):
        if field_name not in doc:
            raise ModelError("missing field %r" % field_name)
    k = doc["k"]
    if not isinstance(k, int):
        raise ModelError("k must be an integer")
    vertices = []
    for item in doc["vertices"]:
        if not isinstance(item, dict) or "id" not in item or "owner" not in item:
            raise ModelError("vertex entries need id and owner")
        vertices.append((item["id"], item["owner"]))
    edges = []
    for item in doc["edges"]:
        if not isinstance(item, dict):
            raise ModelError("edge entries must be objects")
        try:
            w = tuple(item["w"])
        except (KeyError, TypeError):
            raise ModelError("edge needs a weight array") from None
        edges.append(Edge(item["src"], item["dst"], w, item.get("p")))
    return GameGraph(k, vertices, edges)


def game_to_doc(g: GameGraph) -> dict:
    edges = []
    for e in g.edges:
        item = {"src": e.src, "dst": e.dst, "w": list(e.w)}
        if e.p is not None:
            item["p"] = e.p
        edges.append(item)
    return {
        "k": g.k,
        "vertices": [{"id": v, "owner": o} for v, o in g.owners.items()],
        "edges": edges,
    }


def serialize_game(g: GameGraph) -> str:
    """Byte-stable serialization: sorted keys, insertion-ordered arrays."""
    return canonical_json(game_to_doc(g))


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Scalarization


def scalarize(g: GameGraph, lam: Sequence[Scalar]) -> GameGraph:
    """Dot every edge weight with lam, yielding a 1-dimensional game.

    Rational lam is cleared to integers first (positive scaling preserves
    the sign structure that every caller relies on).
    """
    if len(lam) != g.k:
        raise ModelError("lambda arity %d != k=%d" % (len(lam), g.k))
    ilam = clear_denominators(lam)
    edges = [Edge(e.src, e.dst, (vec_dot(e.w, ilam),), e.p) for e in g.edges]
    return GameGraph(1, list(g.owners.items()), edges)


# ---------------------------------------------------------------------------
# Attractors and subgames


def attractor(g: GameGraph, player: int, targets: Iterable[str]) -> FrozenSet[str]:
    return attractor_with_strategy(g, player, targets)[0]


def attractor_with_strategy(
    g: GameGraph, player: int, targets: Iterable[str]
) -> Tuple[FrozenSet[str], Dict[str, str]]:
    """Backward fixpoint: vertices from which `player` forces reaching targets.

    Also returns a memoryless choice (first attracting edge, deterministic)
    for the attracting player's vertices outside the target set.
    """
    if player not in (P1, P2):
        raise ValueError("player must be 1 or 2")
    targets = [t for t in targets]
    for t in targets:
        if t not in g.owners:
            raise ModelError("target %r not a vertex" % t)
    inside = set(targets)
    strategy: Dict[str, str] = {}
    preds: Dict[str, List[Edge]] = {v: [] for v in g.owners}
    for e in g.edges:
        preds[e.dst].append(e)
    remaining_out = {v: len(g.out[v]) for v in g.owners}
    queue = list(targets)
    qi = 0
    while qi < len(queue):
        u = queue[qi]
        qi += 1
        for e in preds[u]:
            v = e.src
            if v in inside:
                continue
            if g.owners[v] == player:
                inside.add(v)
                strategy[v] = e.dst
                queue.append(v)
            else:
                remaining_out[v] -= 1
                if remaining_out[v] == 0:
                    inside.add(v)
                    queue.append(v)
    return frozenset(inside), strategy


def subgame(g: GameGraph, keep: Iterable[str], require_total: bool = True) -> GameGraph:
    keep_set = set(keep)
    for v in keep_set:
        if v not in g.owners:
            raise ModelError("subgame vertex %r not in graph" % v)
    vertices = [(v, o) for v, o in g.owners.items() if v in keep_set]
    edges = [e for e in g.edges if e.src in keep_set and e.dst in keep_set]
    sub = GameGraph(g.k, vertices, edges)
    if require_total:
        sub.require_total()
    return sub


# ---------------------------------------------------------------------------
# Assumption-normalizing transformation


def transform_assumptions(g: GameGraph) -> GameGraph:
    """Normalize an arena so that (1) player-2 edges lead to player-1 vertices
    and (2) every player-1 vertex carries k penalty loops, one per dimension.

    Both properties are realized with fresh single-successor helper vertices
    to keep the graph simple. Helper ids are prefixed with "__a1:"/"__a2:".
    Winner on the original vertices is preserved (checked against the oracle
    in tests, not proved here).
    """
    vertices: List[Tuple[str, int]] = list(g.owners.items())
    edges: List[Edge] = []
    for e in g.edges:
        if g.owners[e.src] == P2 and g.owners[e.dst] == P2:
            mid = "__a1:%s:%s" % (e.src, e.dst)
            vertices.append((mid, P1))
            edges.append(Edge(e.src, mid, e.w, e.p))
            edges.append(Edge(mid, e.dst, vec_zero(g.k), None))
        else:
            edges.append(e)
    for v, owner in g.owners.items():
        if owner != P1:
            continue
        for i in range(g.k):
            dummy = "__a2:%s:%d" % (v, i)
            vertices.append((dummy, P2))
            w = [0] * g.k
            w[i] = -1
            edges.append(Edge(v, dummy, tuple(w), None))
            edges.append(Edge(dummy, v, vec_zero(g.k), None))
    return GameGraph(g.k, vertices, edges)


# ---------------------------------------------------------------------------
# Strategy restriction and cycle signs


def restrict_strategy(g: GameGraph, player: int, strategy: Mapping[str, str]) -> GameGraph:
    """Fix `player`'s choices to the given memoryless strategy.

    Vertices of the player that have no entry in `strategy` keep all their
    edges (callers that need totality of the strategy check it themselves).
    """
    edges = []
    for e in g.edges:
        if g.owners[e.src] == player and e.src in strategy:
            if strategy[e.src] == e.dst:
                edges.append(e)
        else:
            edges.append(e)
    return GameGraph(g.k, list(g.owners.items()), edges)


def reachable_from(g: GameGraph, start: str) -> FrozenSet[str]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for e in g.out[u]:
            if e.dst not in seen:
                seen.add(e.dst)
                stack.append(e.dst)
    return frozenset(seen)


def reachable_cycles_sign(g: GameGraph, sigma2: Mapping[str, str], v: str):
    """Test whether every cycle reachable from v is strictly negative once
    player 2 plays sigma2 (player-1 choices stay free).

    For a 1-dimensional game. Returns ("all_negative",) or
    ("has_nonnegative", cycle) with a concrete witness cycle (edge list).
    """
    if g.k != 1:
        raise ModelError("reachable_cycles_sign expects a 1-dimensional game")
    restricted = restrict_strategy(g, P2, sigma2)
    reach = reachable_from(restricted, v)
    sub = subgame(restricted, reach, require_total=False)
    cycle = find_nonnegative_cycle(sub)
    if cycle is None:
        return ("all_negative",)
    return ("has_nonnegative", cycle)


def find_nonnegative_cycle(g: GameGraph) -> Optional[List[Edge]]:
    """Find any cycle with total weight >= 0 in a 1-dim graph, or None.

    Scaling trick: under v(e) = n*w(e) + 1 a cycle C has v(C) > 0 iff
    w(C) >= 0, so Bellman-Ford negative-cycle detection on -v does the job.
    """
    n = g.n or 1
    dist = {v: 0 for v in g.owners}
    pred: Dict[str, Optional[Edge]] = {v: None for v in g.owners}
    changed_vertex = None
    for _ in range(n):
        changed_vertex = None
        for e in g.edges:
            cost = -(n * e.w[0] + 1)
            if dist[e.src] + cost < dist[e.dst]:
                dist[e.dst] = dist[e.src] + cost
                pred[e.dst] = e
                changed_vertex = e.dst
    if changed_vertex is None:
        return None
    # Walk predecessors n steps to land inside the cycle, then read it off.
    u = changed_vertex
    for _ in range(n):
        u = pred[u].src  # type: ignore[union-attr]
    cycle = []
    cur = u
    while True:
        e = pred[cur]
        assert e is not None
        cycle.append(e)
        cur = e.src
        if cur == u:
            break
    cycle.reverse()
    total = sum(e.w[0] for e in cycle)
    if total < 0:
        raise InvariantError("extracted cycle has negative weight %d" % total)
    return cycle


# ---------------------------------------------------------------------------
# Karp's maximum cycle mean


def karp_best_mean_cycle(g: GameGraph, v: str) -> Optional[Fraction]:
    """Maximum cycle mean over cycles reachable from v (exact rational).

    One-player view: ownership is ignored. Returns None when no cycle is
    reachable (cannot happen on total graphs; kept for the defensive
    contract).
    """
    if g.k != 1:
        raise ModelError("karp_best_mean_cycle expects a 1-dimensional game")
    reach = reachable_from(g, v)
    succ = {u: [(e.dst, e.w[0]) for e in g.out[u] if e.dst in reach] for u in reach}
    best: Optional[Fraction] = None
    for comp in strongly_connected_components(succ):
        mu = _karp_scc(comp, succ)
        if mu is not None and (best is None or mu > best):
            best = mu
    return best


def strongly_connected_components(succ: Mapping[str, List[Tuple[str, int]]]) -> List[List[str]]:
    """Tarjan's algorithm, iterative, deterministic order."""
    index: Dict[str, int] = {}
    low: Dict[str, int] = {}
    on_stack: Dict[str, bool] = {}
    stack: List[str] = []
    comps: List[List[str]] = []
    counter = [0]

    for root in succ:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            u, it = work[-1]
            advanced = False
            for d, _w in it:
                if d not in index:
                    index[d] = low[d] = counter[0]
                    counter[0] += 1
                    stack.append(d)
                    on_stack[d] = True
                    work.append((d, iter(succ[d])))
                    advanced = True
                    break
                elif on_stack.get(d):
                    if index[d] < low[u]:
                        low[u] = index[d]
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[u] < low[parent]:
                    low[parent] = low[u]
            if low[u] == index[u]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == u:
                        break
                comps.append(comp)
    return comps


def _karp_scc(comp: List[str], succ: Mapping[str, List[Tuple[str, int]]]) -> Optional[Fraction]:
    comp_set = set(comp)
    internal = {u: [(d, w) for d, w in succ[u] if d in comp_set] for u in comp}
    if not any(internal[u] for u in comp):
        return None
    ns = len(comp)
    if ns == 1:
        u = comp[0]
        loops = [w for d, w in internal[u] if d == u]
        if not loops:
            return None
        return Fraction(max(loops))
    source = comp[0]
    NEG = None
    prev = {u: NEG for u in comp}
    prev[source] = 0
    table = [dict(prev)]
    for _t in range(ns):
        cur: Dict[str, Optional[int]] = {u: NEG for u in comp}
        for u in comp:
            pu = prev[u]
            if pu is NEG:
                continue
            for d, w in internal[u]:
                cand = pu + w
                if cur[d] is NEG or cand > cur[d]:  # type: ignore[operator]
                    cur[d] = cand
        table.append(cur)
        prev = cur
    best: Optional[Fraction] = None
    final = table[ns]
    for u in comp:
        fu = final[u]
        if fu is NEG:
            continue
        worst: Optional[Fraction] = None
        for t in range(ns):
            du = table[t][u]
            if du is NEG:
                continue
            val = Fraction(fu - du, ns - t)  # type: ignore[operator]
            if worst is None or val < worst:
                worst = val
        if worst is not None and (best is None or worst > best):
            best = worst
    return best


# ---------------------------------------------------------------------------
# Path decomposition


@dataclass(frozen=True)
class PathDecomposition:
    acyclic: Tuple[Edge, ...]
    cycles: Tuple[Tuple[Edge, ...], ...]

    def weight(self, k: int) -> Tuple[int, ...]:
        total = vec_zero(k)
        for e in self.acyclic:
            total = vec_add(total, e.w)
        for c in self.cycles:
            for e in c:
                total = vec_add(total, e.w)
        return total


def decompose_path(g: GameGraph, path: Sequence[Edge]) -> PathDecomposition:
    """Excise cycles from a finite path, first repeated vertex first.

    The stack-based excision keeps |acyclic| < n and preserves weight and
    length additively (the multiset of excised cycles plus the acyclic rest
    is exactly the input path).
    """
    if not path:
        return PathDecomposition((), ())
    for a, b in zip(path, path[1:]):
        if a.dst != b.src:
            raise ModelError("path edges do not chain: %r then %r" % (a, b))
    for e in path:
        if not g.has_edge(e.src, e.dst):
            raise ModelError("path edge %r -> %r not in graph" % (e.src, e.dst))
    stack_v = [path[0].src]
    stack_e: List[Edge] = []
    cycles: List[Tuple[Edge, ...]] = []
    for e in path:
        if e.dst in stack_v:
            j = stack_v.index(e.dst)
            cycle = tuple(stack_e[j:]) + (e,)
            cycles.append(cycle)
            del stack_v[j + 1 :]
            del stack_e[j:]
        else:
            stack_v.append(e.dst)
            stack_e.append(e)
    if len(stack_e) >= g.n:
        raise InvariantError("acyclic residue too long")
    return PathDecomposition(tuple(stack_e), tuple(cycles))
