"""Weighted pushdown systems with vector weights.

One-player recursion model: configurations are (state, stack), transitions
read the top symbol and either keep the stack (skip), pop the top, or push
one symbol. The distinguished bottom symbol "bot" is never pushed or popped.

The decision procedure asks whether some infinite run has a coordinatewise
nonnegative long-run average (liminf). Machinery, bottom up:

  * summary functions: s_i(q1, gamma, q2) is the maximal weight (under a
    fixed scalarization) of a non-decreasing path that starts and ends at
    stack height 0 relative to a top symbol gamma, using at most i levels of
    extra stack. Computed level by level: each level closes a per-symbol
    matrix over states under skip edges and "bump" edges (push, inner
    connecting path one level down, pop). Values live in
    -infinity < integers < omega, where omega records unbounded weight.
  * the summary graph Gr over heads (gamma, q): skip edges labelled by the
    stabilized summaries, push edges by their own weight. Positive cycles
    through a head's strongly connected component witness pumpable weight.
  * find_positive_pumpable_pair: the exact oracle behind the decision
    procedure's constraint generation. Returns the exact average vector of
    a pumpable pair above a rational threshold, with a replayable pair
    object whenever materialization fits a budget.
  * decide_multidim: per reachable head, alternate lp.min_r over discovered
    average rows with oracle probes until either a separating lambda
    certifies the head dead or Gordan's dichotomy certifies a nonnegative
    combination.

Everything is exact integer / Fraction arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from . import lp
from .core import (
    GameGraph,
    Edge,
    GuardError,
    InvariantError,
    ModelError,
    canonical_json,
    clear_denominators,
)

BOT = "bot"

SKIP = ("skip",)
POP = ("pop",)


def push(sym: str) -> Tuple[str, str]:
    return ("push", sym)


class _Omega:
    __slots__ = ()

    def __repr__(self):
        return "omega"


OMEGA = _Omega()
# -infinity is represented by None.


def v_key(v):
    if v is None:
        return (0, 0)
    if v is OMEGA:
        return (2, 0)
    return (1, v)


def v_max(a, b):
    return a if v_key(a) >= v_key(b) else b


def v_add(a, b):
    if a is None or b is None:
        return None
    if a is OMEGA or b is OMEGA:
        return OMEGA
    return a + b


@dataclass(frozen=True, order=True)
class Transition:
    src: str
    top: str
    dst: str
    cmd: Tuple[str, ...]  # ("skip",) | ("pop",) | ("push", sym)
    w: Tuple[int, ...]


@dataclass(frozen=True)
class Wps:
    k: int
    states: Tuple[str, ...]
    alphabet: Tuple[str, ...]
    initial: str
    transitions: Tuple[Transition, ...]
    has_dimension_selfloops: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ModelError("weight dimension must be >= 1")
        if len(set(self.states)) != len(self.states) or not self.states:
            raise ModelError("states must be nonempty and distinct")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ModelError("alphabet symbols must be distinct")
        if BOT not in self.alphabet:
            raise ModelError('alphabet must contain "%s"' % BOT)
        if self.initial not in self.states:
            raise ModelError("initial state %r unknown" % self.initial)
        seen = set()
        for t in self.transitions:
            if t.src not in self.states or t.dst not in self.states:
                raise ModelError("transition endpoint unknown: %r" % (t,))
            if t.top not in self.alphabet:
                raise ModelError("transition top symbol unknown: %r" % (t,))
            if len(t.w) != self.k or not all(isinstance(x, int) for x in t.w):
                raise ModelError("transition weight arity mismatch: %r" % (t,))
            if t.cmd == POP:
                if t.top == BOT:
                    raise ModelError("the bottom symbol cannot be popped")
            elif t.cmd == SKIP:
                pass
            elif len(t.cmd) == 2 and t.cmd[0] == "push":
                if t.cmd[1] == BOT:
                    raise ModelError("the bottom symbol cannot be pushed")
                if t.cmd[1] not in self.alphabet:
                    raise ModelError("pushed symbol unknown: %r" % (t,))
            else:
                raise ModelError("unknown command %r" % (t.cmd,))
            key = (t.src, t.top, t.dst, t.cmd, t.w)
            if key in seen:
                raise ModelError("duplicate transition %r" % (t,))
            seen.add(key)

    @property
    def W(self) -> int:
        w = 0
        for t in self.transitions:
            for x in t.w:
                w = max(w, abs(x))
        return w

    def from_head(self, q: str, top: str) -> Tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.src == q and t.top == top)


def parse_wps(text: str) -> Wps:
    import json

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError("invalid JSON: %s" % exc) from None
    try:
        k = doc["k"]
        states = tuple(doc["states"])
        alphabet = tuple(doc["alphabet"])
        initial = doc["initial"]
        raw = doc["transitions"]
    except (KeyError, TypeError) as exc:
        raise ModelError("missing field: %s" % exc) from None
    trans = []
    for t in raw:
        try:
            cmd_raw = t["cmd"]
            if cmd_raw == "skip":
                cmd: Tuple[str, ...] = SKIP
            elif cmd_raw == "pop":
                cmd = POP
            elif isinstance(cmd_raw, dict) and set(cmd_raw) == {"push"}:
                cmd = push(cmd_raw["push"])
            else:
                raise ModelError("unknown cmd %r" % (cmd_raw,))
            trans.append(Transition(t["from"], t["top"], t["to"], cmd, tuple(t["w"])))
        except (KeyError, TypeError) as exc:
            raise ModelError("bad transition %r: %s" % (t, exc)) from None
    return Wps(k=k, states=states, alphabet=alphabet, initial=initial, transitions=tuple(trans))


def wps_to_doc(wps: Wps) -> dict:
    out = []
    for t in wps.transitions:
        cmd = "skip" if t.cmd == SKIP else "pop" if t.cmd == POP else {"push": t.cmd[1]}
        out.append({"from": t.src, "top": t.top, "to": t.dst, "cmd": cmd, "w": list(t.w)})
    return {
        "k": wps.k,
        "states": list(wps.states),
        "alphabet": list(wps.alphabet),
        "initial": wps.initial,
        "transitions": out,
    }


def serialize_wps(wps: Wps) -> str:
    return canonical_json(wps_to_doc(wps))


def add_dimension_selfloops(wps: Wps) -> Wps:
    """One skip self-loop per (state, symbol) and dimension, with weight -1
    in that dimension: turns "some nonnegative combination" questions into
    "some zero combination" questions. Not idempotent; reapplication is
    refused."""
    if wps.has_dimension_selfloops:
        raise ModelError("dimension self-loops already added")
    present = {(t.src, t.top, t.dst, t.cmd, t.w) for t in wps.transitions}
    extra = []
    for q in wps.states:
        for g in wps.alphabet:
            for d in range(wps.k):
                w = [0] * wps.k
                w[d] = -1
                t = Transition(q, g, q, SKIP, tuple(w))
                if (t.src, t.top, t.dst, t.cmd, t.w) not in present:
                    extra.append(t)
    return Wps(
        k=wps.k,
        states=wps.states,
        alphabet=wps.alphabet,
        initial=wps.initial,
        transitions=wps.transitions + tuple(extra),
        has_dimension_selfloops=True,
    )


# ---------------------------------------------------------------------------
# Configurations and replay


def step(wps: Wps, state: str, stack: Tuple[str, ...], t: Transition) -> Tuple[str, Tuple[str, ...]]:
    if t.src != state:
        raise ModelError("replay: state %r but transition from %r" % (state, t.src))
    if not stack or stack[-1] != t.top:
        raise ModelError("replay: top %r but transition reads %r" % (stack[-1] if stack else None, t.top))
    if t.cmd == SKIP:
        return t.dst, stack
    if t.cmd == POP:
        if len(stack) == 1:
            raise ModelError("replay: popping the bottom symbol")
        return t.dst, stack[:-1]
    return t.dst, stack + (t.cmd[1],)


def replay(wps: Wps, state: str, stack: Tuple[str, ...], path: Sequence[Transition]) -> Tuple[str, Tuple[str, ...]]:
    for t in path:
        state, stack = step(wps, state, stack, t)
    return state, stack


@dataclass(frozen=True)
class Host:
    start_state: str
    start_stack: Tuple[str, ...]
    path: Tuple[Transition, ...]


@dataclass(frozen=True)
class PumpablePair:
    p1: Tuple[Transition, ...]
    p2: Tuple[Transition, ...]
    # anchors in the host path: p1 = path[a1:b1], p2 = path[a2:b2], b1 <= a2
    a1: int
    b1: int
    a2: int
    b2: int

    def __post_init__(self):
        if len(self.p1) + len(self.p2) < 1:
            raise ModelError("a pumpable pair needs at least one edge")
        if not (0 <= self.a1 <= self.b1 <= self.a2 <= self.b2):
            raise ModelError("pair anchors out of order")


def pump_pair(wps: Wps, host: Host, pair: PumpablePair, j: int) -> Tuple[Transition, ...]:
    """The path with both pair segments repeated j times (j=1 is the host
    itself, j=0 excises them). Replays the result as the validity check."""
    if j < 0:
        raise ModelError("pump count must be >= 0")
    p = host.path
    if p[pair.a1:pair.b1] != pair.p1 or p[pair.a2:pair.b2] != pair.p2:
        raise ModelError("pair anchors do not match the host path")
    pumped = (
        p[: pair.a1]
        + pair.p1 * j
        + p[pair.b1 : pair.a2]
        + pair.p2 * j
        + p[pair.b2 :]
    )
    replay(wps, host.start_state, host.start_stack, pumped)
    return pumped


# ---------------------------------------------------------------------------
# Step graph (height <= 2 window), the public low-level view


def build_step_graph(wps: Wps, lam: Sequence[int]) -> GameGraph:
    """Configurations with stack "bot+gamma" (height one) or
    "bot+gamma1+gamma2" (height two) under the scalarization lam; pushes out
    of height two and pops out of height one are not represented. All
    vertices player-1 (one-player system)."""
    lam = tuple(int(x) for x in lam)
    if len(lam) != wps.k:
        raise ModelError("lambda arity mismatch")

    def wv(t: Transition) -> int:
        return sum(a * b for a, b in zip(t.w, lam))

    def v1(g: str, q: str) -> str:
        return "1|%s|%s" % (g, q)

    def v2(g1: str, g2: str, q: str) -> str:
        return "2|%s|%s|%s" % (g1, g2, q)

    verts = []
    for q in wps.states:
        for g in wps.alphabet:
            verts.append((v1(g, q), 1))
            for g2 in wps.alphabet:
                if g2 != BOT:
                    verts.append((v2(g, g2, q), 1))

    edges: Dict[Tuple[str, str], int] = {}

    def add(src: str, dst: str, w: int):
        if (src, dst) not in edges or edges[(src, dst)] < w:
            edges[(src, dst)] = w

    for t in wps.transitions:
        if t.cmd == SKIP:
            add(v1(t.top, t.src), v1(t.top, t.dst), wv(t))
            if t.top != BOT:
                for g1 in wps.alphabet:
                    add(v2(g1, t.top, t.src), v2(g1, t.top, t.dst), wv(t))
        elif t.cmd == POP:
            for g1 in wps.alphabet:
                add(v2(g1, t.top, t.src), v1(g1, t.dst), wv(t))
        else:
            z = t.cmd[1]
            add(v1(t.top, t.src), v2(t.top, z, t.dst), wv(t))
    return GameGraph(
        1,
        verts,
        [Edge(s, d, (w,), None) for (s, d), w in sorted(edges.items())],
    )


# ---------------------------------------------------------------------------
# Summary engine


@dataclass
class _Closure:
    """One (level, symbol) closure: values, nonempty diagonal, omega masks,
    and enough structure to reconstruct witnesses."""

    nstates: int
    fin_edges: List[Tuple[int, int, int, tuple]]  # (a, b, weight, desc)
    om_edges: List[Tuple[int, int, tuple]]        # (a, b, desc) with omega value
    val: List[List[object]] = field(default_factory=list)       # empty-path inclusive
    ne_diag: List[object] = field(default_factory=list)         # nonempty a -> a
    rounds: List[List[List[object]]] = field(default_factory=list)  # hop-bounded tables
    reach: List[List[bool]] = field(default_factory=list)
    pos_scc: List[Set[int]] = field(default_factory=list)       # SCCs with positive cycles


def _compute_closure(nstates: int, fin_edges, om_edges) -> _Closure:
    c = _Closure(nstates=nstates, fin_edges=sorted(fin_edges), om_edges=sorted(om_edges))
    n = nstates
    # reflexive reachability over all edges
    reach = [[False] * n for _ in range(n)]
    for i in range(n):
        reach[i][i] = True
    for a, b, _w, _d in c.fin_edges:
        reach[a][b] = True
    for a, b, _d in c.om_edges:
        reach[a][b] = True
    for m in range(n):
        rm = reach[m]
        for i in range(n):
            if reach[i][m]:
                ri = reach[i]
                for j in range(n):
                    if rm[j]:
                        ri[j] = True
    c.reach = reach
    # SCCs (mutual reachability on the small closed matrix)
    comp_id = [-1] * n
    comps: List[Set[int]] = []
    for i in range(n):
        if comp_id[i] != -1:
            continue
        comp = {j for j in range(n) if reach[i][j] and reach[j][i]}
        for j in comp:
            comp_id[j] = len(comps)
        comps.append(comp)
    # positive cycle inside an SCC: an omega edge inside, or a positive-mean
    # finite cycle (Karp over the component's finite edges)
    pos = []
    for comp in comps:
        has = any(a in comp and b in comp for a, b, _d in c.om_edges)
        if not has and len(comp) > 0:
            mean = _karp_max_mean(comp, c.fin_edges)
            has = mean is not None and mean > 0
        if has:
            pos.append(comp)
    c.pos_scc = pos
    # omega mask
    om = [[False] * n for _ in range(n)]
    sources: List[Tuple[int, int]] = [(a, b) for a, b, _d in c.om_edges]
    for comp in pos:
        rep = min(comp)
        sources.append((rep, rep))
    for (u, v) in sources:
        for i in range(n):
            if reach[i][u]:
                for j in range(n):
                    if reach[v][j]:
                        om[i][j] = True
    # hop-bounded best weights over finite edges (identity start)
    NEGV = None
    prev = [[NEGV] * n for _ in range(n)]
    for i in range(n):
        prev[i][i] = 0
    rounds = [prev]
    for _t in range(n):
        cur = [row[:] for row in rounds[-1]]
        base = rounds[-1]
        for a, b, w, _d in c.fin_edges:
            for i in range(n):
                via = base[i][a]
                if via is not None:
                    cand = via + w
                    if cur[i][b] is None or cand > cur[i][b]:
                        cur[i][b] = cand
        rounds.append(cur)
    c.rounds = rounds
    final = rounds[-1]
    val: List[List[object]] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if om[i][j]:
                val[i][j] = OMEGA
            else:
                val[i][j] = final[i][j]
    c.val = val
    # nonempty diagonal: one edge then the closed suffix
    ne: List[object] = [None] * n
    for a, b, w, _d in c.fin_edges:
        suf = final[b][a]
        if suf is not None:
            cand = w + suf
            if ne[a] is None or cand > ne[a]:
                ne[a] = cand
    for i in range(n):
        through = False
        for (u, v) in sources:
            if reach[i][u] and reach[v][i]:
                through = True
                break
        if through:
            ne[i] = OMEGA
    c.ne_diag = ne
    return c


def _karp_max_mean(comp: Set[int], fin_edges) -> Optional[Fraction]:
    nodes = sorted(comp)
    idx = {v: i for i, v in enumerate(nodes)}
    ns = len(nodes)
    inside = [(idx[a], idx[b], w) for a, b, w, _d in fin_edges if a in comp and b in comp]
    if not inside:
        return None
    D: List[List[Optional[int]]] = [[None] * ns for _ in range(ns + 1)]
    D[0][0] = 0
    for t in range(1, ns + 1):
        for a, b, w in inside:
            if D[t - 1][a] is not None:
                cand = D[t - 1][a] + w
                if D[t][b] is None or cand > D[t][b]:
                    D[t][b] = cand
    best: Optional[Fraction] = None
    for v in range(ns):
        if D[ns][v] is None:
            continue
        worst: Optional[Fraction] = None
        for t in range(ns):
            if D[t][v] is None:
                continue
            m = Fraction(D[ns][v] - D[t][v], ns - t)
            if worst is None or m < worst:
                worst = m
        if worst is not None and (best is None or worst > best):
            best = worst
    return best


def _positive_cycle(nstates: int, fin_edges) -> Optional[List[Tuple[int, int, int, tuple]]]:
    """A strictly positive finite cycle (as its edge records) or None.
    Scaled weights n*w - 1 make "strictly positive" equal "nonnegative"."""
    n = nstates
    if n == 0:
        return None
    # with scale n+1 a cycle scales to >= 1 iff strictly positive, <= -1
    # otherwise: no zero-weight scaled cycles to stall detection
    scale = n + 1
    dist = [0] * n
    pred: List[Optional[Tuple[int, int, int, tuple]]] = [None] * n
    upd = None
    for _round in range(n + 1):
        upd = None
        for e in fin_edges:
            a, b, w, _d = e
            cand = dist[a] + scale * w - 1
            if cand > dist[b]:
                dist[b] = cand
                pred[b] = e
                upd = b
        if upd is None:
            return None
    v = upd
    for _ in range(n):
        v = pred[v][0]
    cycle = []
    cur = v
    while True:
        e = pred[cur]
        cycle.append(e)
        cur = e[0]
        if cur == v:
            break
    cycle.reverse()
    if sum(e[2] for e in cycle) <= 0:
        raise InvariantError("extracted cycle is not strictly positive")
    return cycle


class SummaryTable:
    """All levels 0..d+1 of the summary functions for one shifted weight
    assignment, with stabilization tracking and witness reconstruction."""

    def __init__(self, wps: Wps, weight: Mapping[Transition, int], guard: int):
        m = len(wps.states) * len(wps.alphabet)
        if m > guard:
            raise GuardError("|Q|*|Gamma| = %d exceeds the summary guard %d" % (m, guard))
        self.wps = wps
        self.weight = dict(weight)
        self.d = m * m
        self.states = list(wps.states)
        self.sidx = {q: i for i, q in enumerate(self.states)}
        self.symbols = list(wps.alphabet)
        self.closures: List[Dict[str, _Closure]] = []
        self.stabilized_at: Optional[int] = None
        self._vect_cache: Dict[Tuple[int, str, int, int], Optional[Tuple[Tuple[int, ...], int]]] = {}
        self._build()

    # -- construction

    def _skip_edges(self, g: str) -> List[Tuple[int, int, int, tuple]]:
        out = []
        for t in self.wps.transitions:
            if t.cmd == SKIP and t.top == g:
                out.append((self.sidx[t.src], self.sidx[t.dst], self.weight[t], ("skip", t)))
        return out

    def _bump_edges(self, g: str, prev: Dict[str, _Closure]):
        fin, om = [], []
        for tp in self.wps.transitions:
            if tp.cmd[0] != "push" or tp.top != g:
                continue
            z = tp.cmd[1]
            cz = prev[z]
            x = self.sidx[tp.dst]
            for tq in self.wps.transitions:
                if tq.cmd != POP or tq.top != z:
                    continue
                y = self.sidx[tq.src]
                inner = cz.val[x][y]
                desc = ("bump", tp, tq, z, x, y)
                a, b = self.sidx[tp.src], self.sidx[tq.dst]
                if inner is None:
                    continue
                if inner is OMEGA:
                    om.append((a, b, desc))
                else:
                    fin.append((a, b, self.weight[tp] + inner + self.weight[tq], desc))
        return fin, om

    def _build(self):
        level0: Dict[str, _Closure] = {}
        n = len(self.states)
        for g in self.symbols:
            level0[g] = _compute_closure(n, self._skip_edges(g), [])
        self.closures.append(level0)
        for i in range(1, self.d + 2):
            prev = self.closures[-1]
            cur: Dict[str, _Closure] = {}
            for g in self.symbols:
                fin, om = self._bump_edges(g, prev)
                cur[g] = _compute_closure(n, self._skip_edges(g) + fin, om)
            if self._levels_equal(prev, cur):
                self.stabilized_at = i - 1
                break
            self.closures.append(cur)
        else:
            self.stabilized_at = None

    def _levels_equal(self, a: Dict[str, _Closure], b: Dict[str, _Closure]) -> bool:
        for g in self.symbols:
            for i in range(len(self.states)):
                if a[g].ne_diag[i] is not b[g].ne_diag[i] and a[g].ne_diag[i] != b[g].ne_diag[i]:
                    return False
                for j in range(len(self.states)):
                    x, y = a[g].val[i][j], b[g].val[i][j]
                    if x is not y and x != y:
                        return False
        return True

    # -- lookups

    def _closure_at(self, level: int, g: str) -> _Closure:
        if level < 0:
            raise InvariantError("negative summary level")
        if level >= len(self.closures):
            return self.closures[-1][g]
        return self.closures[level][g]

    def value(self, level: int, q1: str, g: str, q2: str):
        return self._closure_at(level, g).val[self.sidx[q1]][self.sidx[q2]]

    def nonempty_diag(self, level: int, q: str, g: str):
        return self._closure_at(level, g).ne_diag[self.sidx[q]]

    def s_star_value(self, q1: str, g: str, q2: str):
        """The stabilized summary: level-d value when levels d and d+1 agree
        at the triple, omega otherwise."""
        vd = self.value(self.d, q1, g, q2)
        vd1 = self.value(self.d + 1, q1, g, q2)
        if v_key(vd) == v_key(vd1):
            return vd
        return OMEGA

    def s_star_nonempty(self, q: str, g: str):
        vd = self.nonempty_diag(self.d, q, g)
        vd1 = self.nonempty_diag(self.d + 1, q, g)
        if v_key(vd) == v_key(vd1):
            return vd
        return OMEGA

    # -- witness reconstruction

    def vect(self, level: int, q1: str, g: str, q2: str) -> Optional[Tuple[Tuple[int, ...], int]]:
        """(weight vector, length) of a maximal path for a finite entry;
        None when the entry is not finite."""
        key = (min(level, len(self.closures) - 1), g, self.sidx[q1], self.sidx[q2])
        if key in self._vect_cache:
            return self._vect_cache[key]
        res = self._vect_uncached(*key)
        self._vect_cache[key] = res
        return res

    def _vect_uncached(self, level, g, a, b):
        c = self._closure_at(level, g)
        if c.val[a][b] is None or c.val[a][b] is OMEGA:
            return None
        walk = self._walk(level, g, a, b)
        wvec = [0] * self.wps.k
        length = 0
        for e in walk:
            dv, dl = self._desc_vect(level, e[3])
            wvec = [p + q for p, q in zip(wvec, dv)]
            length += dl
        return tuple(wvec), length

    def _desc_vect(self, level: int, desc) -> Tuple[Tuple[int, ...], int]:
        if desc[0] == "skip":
            t = desc[1]
            return t.w, 1
        _tag, tp, tq, z, x, y = desc
        inner = self.vect(level - 1, self.states[x], z, self.states[y])
        if inner is None:
            raise InvariantError("finite bump over a non-finite inner entry")
        iv, il = inner
        return tuple(p + q + r for p, q, r in zip(tp.w, iv, tq.w)), il + 2

    def _walk(self, level: int, g: str, a: int, b: int) -> List[Tuple[int, int, int, tuple]]:
        """Edge records of a hop-minimal maximal path a -> b at this level."""
        c = self._closure_at(level, g)
        target = c.val[a][b]
        if target is None or target is OMEGA:
            raise InvariantError("walk requested for non-finite entry")
        t = 0
        while c.rounds[t][a][b] != target:
            t += 1
            if t >= len(c.rounds):
                raise InvariantError("hop-bounded tables miss the closed value")
        out = []
        cur = a
        while t > 0:
            if cur == b and c.rounds[0][cur][b] == c.rounds[t][cur][b]:
                break
            found = False
            for e in c.fin_edges:
                ea, eb, ew, _ed = e
                if ea != cur:
                    continue
                rest = c.rounds[t - 1][eb][b]
                if rest is not None and ew + rest == c.rounds[t][cur][b]:
                    out.append(e)
                    cur = eb
                    t -= 1
                    found = True
                    break
            if not found:
                raise InvariantError("walk reconstruction failed")
        if cur != b:
            raise InvariantError("walk did not reach its target")
        return out

    def transitions_of_walk(self, level: int, g: str, a: int, b: int, budget: int) -> Optional[List[Transition]]:
        """Concrete transition sequence of the hop-minimal maximal path, or
        None when it exceeds the budget."""
        try:
            walk = self._walk(level, g, a, b)
        except InvariantError:
            return None
        out: List[Transition] = []
        for e in walk:
            seg = self._desc_transitions(level, e[3], budget - len(out))
            if seg is None:
                return None
            out.extend(seg)
            if len(out) > budget:
                return None
        return out

    def _desc_transitions(self, level: int, desc, budget: int) -> Optional[List[Transition]]:
        if budget < 0:
            return None
        if desc[0] == "skip":
            return [desc[1]]
        _tag, tp, tq, z, x, y = desc
        inner = self.transitions_of_walk(level - 1, z, x, y, budget - 2)
        if inner is None:
            return None
        return [tp] + inner + [tq]


_summary_cache: Dict[Tuple[Wps, Tuple[int, ...]], SummaryTable] = {}

DEFAULT_SUMMARY_GUARD = 20


def _shifted_weights(wps: Wps, lam: Sequence[int], r: Fraction) -> Dict[Transition, int]:
    num, den = r.numerator, r.denominator
    out = {}
    for t in wps.transitions:
        s = sum(a * b for a, b in zip(t.w, lam))
        out[t] = den * s - num
    return out


def _summaries_for(wps: Wps, weight: Dict[Transition, int], guard: int) -> SummaryTable:
    key = (wps, tuple(weight[t] for t in wps.transitions))
    tab = _summary_cache.get(key)
    if tab is None:
        tab = SummaryTable(wps, weight, guard)
        if len(_summary_cache) > 64:
            _summary_cache.clear()
        _summary_cache[key] = tab
    return tab


def compute_summaries(wps: Wps, lam: Sequence[int], guard: int = DEFAULT_SUMMARY_GUARD) -> SummaryTable:
    """Summary functions for the scalarization lam, all levels up to
    (|Q|*|Gamma|)^2 + 1 (with early stop on stabilization, which is exact:
    the level map is a function of the previous level)."""
    lam = tuple(int(x) for x in lam)
    if len(lam) != wps.k:
        raise ModelError("lambda arity mismatch")
    return _summaries_for(wps, _shifted_weights(wps, lam, Fraction(0)), guard)


def build_wps_star(wps: Wps, lam: Sequence[int], guard: int = DEFAULT_SUMMARY_GUARD):
    """The system extended with zero-weight skip transitions at every triple
    whose stabilized summary is omega. Returns (extended system, the table,
    the omega triples)."""
    tab = compute_summaries(wps, lam, guard)
    omega_triples = []
    for q1 in wps.states:
        for g in wps.alphabet:
            for q2 in wps.states:
                if tab.s_star_value(q1, g, q2) is OMEGA:
                    omega_triples.append((q1, g, q2))
    extra = [
        Transition(q1, g, q2, SKIP, tuple([0] * wps.k))
        for (q1, g, q2) in omega_triples
        if not any(t.src == q1 and t.top == g and t.dst == q2 and t.cmd == SKIP and all(x == 0 for x in t.w) for t in wps.transitions)
    ]
    star = Wps(
        k=wps.k,
        states=wps.states,
        alphabet=wps.alphabet,
        initial=wps.initial,
        transitions=wps.transitions + tuple(extra),
        has_dimension_selfloops=wps.has_dimension_selfloops,
    )
    return star, tab, omega_triples


# ---------------------------------------------------------------------------
# Reachable heads


def reachable_heads(wps: Wps) -> FrozenSet[Tuple[str, str]]:
    """All (gamma, q) such that some configuration reachable from the
    initial configuration (state q0, stack just bot) has top gamma and state
    q. Same-level closure saturation plus push closure."""
    states = list(wps.states)
    # SL(a, g, b): a same-level connecting path exists (boolean summaries)
    sl: Set[Tuple[str, str, str]] = {(q, g, q) for q in states for g in wps.alphabet}
    skip = {}
    pushes = {}
    pops = {}
    for t in wps.transitions:
        if t.cmd == SKIP:
            skip.setdefault((t.src, t.top), set()).add(t.dst)
        elif t.cmd == POP:
            pops.setdefault((t.src, t.top), set()).add(t.dst)
        else:
            pushes.setdefault((t.src, t.top), set()).add((t.dst, t.cmd[1]))
    changed = True
    while changed:
        changed = False
        new = set()
        for (a, g, b) in sl:
            for c in skip.get((b, g), ()):
                if (a, g, c) not in sl:
                    new.add((a, g, c))
            for (x, z) in pushes.get((b, g), ()):
                for (x2, z2, y) in [trip for trip in sl if trip[0] == x and trip[1] == z]:
                    for c in pops.get((y, z), ()):
                        if (a, g, c) not in sl:
                            new.add((a, g, c))
        if new:
            sl |= new
            changed = True
    heads: Set[Tuple[str, str]] = {(BOT, wps.initial)}
    changed = True
    while changed:
        changed = False
        for (g, q) in list(heads):
            for (a, g2, b) in sl:
                if g2 == g and a == q and (g, b) not in heads:
                    heads.add((g, b))
                    changed = True
            for (x, z) in pushes.get((q, g), ()):
                if (z, x) not in heads:
                    heads.add((z, x))
                    changed = True
    return frozenset(heads)


# ---------------------------------------------------------------------------
# Summary graph over heads


@dataclass(frozen=True)
class GrEdge:
    src: Tuple[str, str]  # (gamma, q)
    dst: Tuple[str, str]
    kind: str             # "skip" | "push"
    value: object         # int (shifted weight) or OMEGA
    payload: object       # skip: (q1, q2); push: the transition


class SummaryGraph:
    def __init__(self, nodes, edges):
        self.nodes: List[Tuple[str, str]] = nodes
        self.edges: List[GrEdge] = edges
        self.out: Dict[Tuple[str, str], List[GrEdge]] = {v: [] for v in nodes}
        for e in edges:
            self.out[e.src].append(e)


def build_summary_graph(wps: Wps, lam: Sequence[int], tab: Optional[SummaryTable] = None,
                        guard: int = DEFAULT_SUMMARY_GUARD) -> SummaryGraph:
    """Heads (gamma, q) with summary-weighted skip edges and push edges.
    Self-edges carry the nonempty-path diagonal (an empty connecting path
    is not an edge)."""
    if tab is None:
        tab = compute_summaries(wps, lam, guard)
    return _summary_graph_from_table(wps, tab)


def _summary_graph_from_table(wps: Wps, tab: SummaryTable) -> SummaryGraph:
    nodes = [(g, q) for g in wps.alphabet for q in wps.states]
    edges: List[GrEdge] = []
    for g in wps.alphabet:
        for q1 in wps.states:
            for q2 in wps.states:
                if q1 == q2:
                    v = tab.s_star_nonempty(q1, g)
                else:
                    v = tab.s_star_value(q1, g, q2)
                if v is None:
                    continue
                edges.append(GrEdge((g, q1), (g, q2), "skip", v, (q1, q2)))
    for t in wps.transitions:
        if t.cmd[0] == "push":
            edges.append(GrEdge((t.top, t.src), (t.cmd[1], t.dst), "push", tab.weight[t], t))
    return SummaryGraph(nodes, edges)


# ---------------------------------------------------------------------------
# The pumpable-pair oracle


@dataclass(frozen=True)
class PumpFound:
    wvec: Tuple[int, ...]
    length: int
    host: Optional[Host]
    pair: Optional[PumpablePair]

    @property
    def avg(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(x, self.length) for x in self.wvec)


def find_positive_pumpable_pair(
    wps: Wps,
    gamma: str,
    q: str,
    lam: Sequence[int],
    r,
    guard: int = DEFAULT_SUMMARY_GUARD,
    materialize_budget: int = 4000,
) -> Optional[PumpFound]:
    """A pumpable pair on a path from head (gamma, q) back to itself whose
    scalarized average strictly exceeds r; None when no such pair exists.

    The threshold is folded into the weights (w -> den*(w.lam) - num), after
    which the question is a strictly-positive cycle question on the summary
    graph: a finite positive cycle in the head's strongly connected
    component is expanded through the summary witnesses; an omega edge in
    the component is traced to its origin, either a positive proper cycle
    at some summary level or, when the summaries grow strictly at the last
    two levels, a nested push/pop repetition located by the pigeonhole scan.
    """
    lam = tuple(int(x) for x in lam)
    if len(lam) != wps.k:
        raise ModelError("lambda arity mismatch")
    r = Fraction(r)
    if (gamma, q) not in [(g, s) for g in wps.alphabet for s in wps.states]:
        raise ModelError("unknown head (%r, %r)" % (gamma, q))
    weight = _shifted_weights(wps, lam, r)
    tab = _summaries_for(wps, weight, guard)
    gr = _summary_graph_from_table(wps, tab)

    # strongly connected component of the head over all Gr edges
    head = (gamma, q)
    reach_f = _gr_reachable(gr, head, omega_ok=True)
    scc = {v for v in reach_f if head in _gr_reachable(gr, v, omega_ok=True)}
    scc_edges = [e for e in gr.edges if e.src in scc and e.dst in scc]

    fin = [(e.src, e.dst, e.value, e) for e in scc_edges if e.value is not OMEGA]
    om = [e for e in scc_edges if e.value is OMEGA]

    # finite positive cycle in the component
    nodes = sorted(scc)
    nidx = {v: i for i, v in enumerate(nodes)}
    cyc = _positive_cycle(len(nodes), [(nidx[a], nidx[b], w, e) for a, b, w, e in fin])
    if cyc is not None:
        return _expand_gr_cycle(wps, tab, gr, head, [e[3] for e in cyc], materialize_budget)

    if om:
        e = sorted(om, key=lambda e: (e.src, e.dst))[0]
        q1, q2 = e.payload
        return _extract_from_omega(wps, tab, e.src[0], q1, q2, materialize_budget)
    return None


def _gr_reachable(gr: SummaryGraph, start, omega_ok: bool) -> Set[Tuple[str, str]]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for e in gr.out[v]:
            if not omega_ok and e.value is OMEGA:
                continue
            if e.dst not in seen:
                seen.add(e.dst)
                stack.append(e.dst)
    return seen


def _expand_gr_cycle(wps: Wps, tab: SummaryTable, gr: SummaryGraph, head, cycle_edges: List[GrEdge],
                     budget: int) -> PumpFound:
    """Turn a finite positive Gr cycle into a pair: weights and length from
    the witness annotations; a replayable host when small enough. The
    climbing pair has an empty second segment (pushed symbols are never
    popped again on the pumped path)."""
    wvec = [0] * wps.k
    length = 0
    top_level = len(tab.closures) - 1
    pieces: List[Optional[List[Transition]]] = []
    for e in cycle_edges:
        if e.kind == "push":
            t = e.payload
            wvec = [a + b for a, b in zip(wvec, t.w)]
            length += 1
            pieces.append([t])
        else:
            q1, q2 = e.payload
            g = e.src[0]
            a, b = tab.sidx[q1], tab.sidx[q2]
            if q1 == q2:
                vec = _nonempty_diag_vect(tab, top_level, g, a)
                seg = _nonempty_diag_transitions(tab, top_level, g, a, budget)
            else:
                vec = tab.vect(top_level, q1, g, q2)
                seg = tab.transitions_of_walk(top_level, g, a, b, budget)
            if vec is None:
                raise InvariantError("finite Gr edge without witness data")
            wvec = [p + r for p, r in zip(wvec, vec[0])]
            length += vec[1]
            pieces.append(seg)
    host = None
    pair = None
    if all(p is not None for p in pieces) and sum(len(p) for p in pieces) <= budget:
        p1 = tuple(itertools.chain.from_iterable(pieces))
        # approach path from the head to the cycle start over finite edges
        approach = _gr_path_transitions(wps, tab, gr, head, cycle_edges[0].src, budget)
        if approach is not None and len(approach) + len(p1) <= budget:
            g0, q0 = head
            stack = (BOT,) if g0 == BOT else (BOT, g0)
            path = tuple(approach) + p1
            host = Host(q0, stack, path)
            pair = PumpablePair(p1=p1, p2=(), a1=len(approach), b1=len(path), a2=len(path), b2=len(path))
            for j in (0, 1, 2, 3):
                pump_pair(wps, host, pair, j)
    return PumpFound(wvec=tuple(wvec), length=length, host=host, pair=pair)


def _nonempty_diag_vect(tab: SummaryTable, level: int, g: str, a: int) -> Optional[Tuple[Tuple[int, ...], int]]:
    c = tab._closure_at(level, g)
    if c.ne_diag[a] is None or c.ne_diag[a] is OMEGA:
        return None
    target = c.ne_diag[a]
    best = None
    for e in c.fin_edges:
        ea, eb, ew, _d = e
        if ea != a:
            continue
        rest = c.val[eb][a]
        if rest is not None and rest is not OMEGA and ew + rest == target:
            dv, dl = tab._desc_vect(level, e[3])
            suffix = tab.vect(level, tab.states[eb], g, tab.states[a])
            if suffix is None:
                continue
            cand = (tuple(p + q for p, q in zip(dv, suffix[0])), dl + suffix[1])
            if best is None:
                best = cand
                break
    if best is None:
        raise InvariantError("nonempty diagonal without a first edge")
    return best


def _nonempty_diag_transitions(tab: SummaryTable, level: int, g: str, a: int, budget: int) -> Optional[List[Transition]]:
    c = tab._closure_at(level, g)
    target = c.ne_diag[a]
    if target is None or target is OMEGA:
        return None
    for e in c.fin_edges:
        ea, eb, ew, _d = e
        if ea != a:
            continue
        rest = c.val[eb][a]
        if rest is not None and rest is not OMEGA and ew + rest == target:
            first = tab._desc_transitions(level, e[3], budget)
            if first is None:
                return None
            suffix = tab.transitions_of_walk(level, g, eb, a, budget - len(first))
            if suffix is None:
                return None
            return first + suffix
    return None


def _gr_path_transitions(wps: Wps, tab: SummaryTable, gr: SummaryGraph, src, dst, budget: int) -> Optional[List[Transition]]:
    """Expand a finite-edge Gr path src -> dst into concrete transitions
    (empty if src == dst); None if no finite path or budget exceeded."""
    if src == dst:
        return []
    # BFS over finite edges
    prev: Dict[Tuple[str, str], Tuple[Tuple[str, str], GrEdge]] = {}
    seen = {src}
    queue = [src]
    while queue:
        v = queue.pop(0)
        for e in sorted(gr.out[v], key=lambda e: (e.dst, e.kind)):
            if e.value is OMEGA or e.dst in seen:
                continue
            seen.add(e.dst)
            prev[e.dst] = (v, e)
            if e.dst == dst:
                queue = []
                break
            queue.append(e.dst)
    if dst not in prev and src != dst:
        return None
    chain: List[GrEdge] = []
    cur = dst
    while cur != src:
        v, e = prev[cur]
        chain.append(e)
        cur = v
    chain.reverse()
    out: List[Transition] = []
    top_level = len(tab.closures) - 1
    for e in chain:
        if e.kind == "push":
            out.append(e.payload)
        else:
            q1, q2 = e.payload
            g = e.src[0]
            if q1 == q2:
                seg = _nonempty_diag_transitions(tab, top_level, g, tab.sidx[q1], budget - len(out))
            else:
                seg = tab.transitions_of_walk(top_level, g, tab.sidx[q1], tab.sidx[q2], budget - len(out))
            if seg is None:
                return None
            out.extend(seg)
        if len(out) > budget:
            return None
    return out


def _extract_from_omega(wps: Wps, tab: SummaryTable, g: str, q1: str, q2: str, budget: int) -> PumpFound:
    """An omega-valued skip edge: chase the unboundedness to its origin."""
    a, b = tab.sidx[q1], tab.sidx[q2]
    top = len(tab.closures) - 1
    if q1 == q2:
        v_top = tab._closure_at(top, g).ne_diag[a]
    else:
        v_top = tab._closure_at(top, g).val[a][b]
    if v_top is OMEGA:
        return _chase_omega(wps, tab, top, g, a, b, budget)
    # stabilized-omega with finite values: strictly growing summaries
    start = _find_rho_start(tab, g, a, b)
    if start is None:
        raise InvariantError("growing summary entry with no strict start triple")
    return _rho_star_pair(wps, tab, *start, budget=budget)


def _strict_at(tab: SummaryTable, level: int, g: str, x: int, y: int) -> bool:
    if level < 1:
        return False
    now = tab._closure_at(level, g).val[x][y]
    before = tab._closure_at(level - 1, g).val[x][y]
    if now is None or now is OMEGA:
        return False
    return v_key(before) != v_key(now)


def _find_rho_start(tab: SummaryTable, g: str, a: int, b: int):
    """A strict triple (level, symbol, x, y) on the route of the growing
    entry (g, a, b): the entry's own triple when it grows itself (off the
    diagonal), otherwise a growing suffix or a growing bump inner on a
    connecting route a ~> a. Growth somewhere on the route must exist, this
    is where the unboundedness of the original entry comes from."""
    d = tab.d
    # try the triple itself at the last two level pairs
    for level in (d + 1, d):
        if a != b and _strict_at(tab, level, g, a, b):
            return (level, g, a, b)
    # diagonal (or stale) case: localize on the route. Only off-diagonal
    # triples support the split equality the chain relies on (a diagonal
    # value includes its own laps); diagonal growth always traces to an
    # off-diagonal suffix or to a bump inner one level down.
    for level in (d + 1, d):
        c = tab._closure_at(level, g)
        for x in range(len(tab.states)):
            for y in range(len(tab.states)):
                if x == y:
                    continue
                if c.reach[a][x] and c.reach[y][a] and _strict_at(tab, level, g, x, y):
                    return (level, g, x, y)
        for (u, v, w, desc) in c.fin_edges:
            if desc[0] != "bump":
                continue
            if not (c.reach[a][u] and c.reach[v][a]):
                continue
            _tag, tp, tq, z, x, y = desc
            if _strict_at(tab, level - 1, z, x, y):
                return (level - 1, z, x, y)
    return None


def _chase_omega(wps: Wps, tab: SummaryTable, level: int, g: str, a: int, b: int, budget: int) -> PumpFound:
    """Omega table entry: find a positive cycle at this level on a
    connecting route, or descend into an omega bump edge."""
    c = tab._closure_at(level, g)
    # positive component on the route a ~> C ~> b
    for comp in c.pos_scc:
        entry = sorted(x for x in comp if c.reach[a][x] and any(c.reach[y][b] for y in comp))
        if not entry:
            continue
        comp_edges = [(x, y, w, d) for x, y, w, d in c.fin_edges if x in comp and y in comp]
        cyc = _positive_cycle(len(tab.states), comp_edges)
        if cyc is not None:
            return _proper_cycle_pair(wps, tab, level, g, cyc, budget)
        # positivity came from an omega edge inside the component
        inner = sorted((x, y, d) for x, y, d in c.om_edges if x in comp and y in comp)
        if inner:
            x, y, d = inner[0]
            _tag, tp, tq, z, xx, yy = d
            return _chase_omega(wps, tab, level - 1, z, xx, yy, budget)
    # no positive component: an omega bump edge lies on the route
    for (x, y, d) in sorted(c.om_edges):
        if c.reach[a][x] and c.reach[y][b]:
            _tag, tp, tq, z, xx, yy = d
            return _chase_omega(wps, tab, level - 1, z, xx, yy, budget)
    raise InvariantError("omega entry with no traceable origin")


def _proper_cycle_pair(wps: Wps, tab: SummaryTable, level: int, g: str, cyc, budget: int) -> PumpFound:
    """A strictly positive cycle inside one summary level: a proper cycle
    (returns to the identical configuration), usable as a pair with an
    empty second segment."""
    wvec = [0] * wps.k
    length = 0
    pieces: List[Optional[List[Transition]]] = []
    for (x, y, w, d) in cyc:
        dv, dl = tab._desc_vect(level, d)
        wvec = [p + q for p, q in zip(wvec, dv)]
        length += dl
        pieces.append(tab._desc_transitions(level, d, budget))
    host = None
    pair = None
    if all(p is not None for p in pieces) and sum(len(p) for p in pieces) <= budget:
        p1 = tuple(itertools.chain.from_iterable(pieces))
        start_state = tab.states[cyc[0][0]]
        stack = (BOT,) if g == BOT else (BOT, g)
        host = Host(start_state, stack, p1)
        pair = PumpablePair(p1=p1, p2=(), a1=0, b1=len(p1), a2=len(p1), b2=len(p1))
        for j in (0, 1, 2, 3):
            pump_pair(wps, host, pair, j)
    return PumpFound(wvec=tuple(wvec), length=length, host=host, pair=pair)


def _rho_star_pair(wps: Wps, tab: SummaryTable, level: int, g: str, a: int, b: int, budget: int) -> PumpFound:
    """Strictly growing finite summaries: the optimal deep path nests a
    strict bump at every level; by pigeonhole two nesting depths share
    (symbol, push-entry state, pop-exit state), and the segment between them
    forms a matched climb/descent pair whose combined weight is exactly the
    deep path's gain over the excised shallower path, hence positive."""
    chain = []  # per depth: level, symbol, endpoints, split pieces, inner=(z,x,y)
    cg, ca, cb = g, a, b
    while True:
        cur = tab._closure_at(level, cg)
        target = cur.val[ca][cb]
        if target is None or target is OMEGA:
            raise InvariantError("rho* chain on non-finite entry")
        if not _strict_at(tab, level, cg, ca, cb):
            raise InvariantError("rho* chain entered a non-strict triple")
        found = None
        for tp in sorted(wps.transitions, key=lambda t: (t.src, t.top, t.dst, t.cmd, t.w)):
            if tp.cmd[0] != "push" or tp.top != cg:
                continue
            z = tp.cmd[1]
            x = tab.sidx[tp.dst]
            for tq in sorted(wps.transitions, key=lambda t: (t.src, t.top, t.dst, t.cmd, t.w)):
                if tq.cmd != POP or tq.top != z:
                    continue
                y = tab.sidx[tq.src]
                inner_now = tab._closure_at(level - 1, z).val[x][y]
                if inner_now is None or inner_now is OMEGA:
                    continue
                if not _strict_at(tab, level - 1, z, x, y):
                    continue
                u, v = tab.sidx[tp.src], tab.sidx[tq.dst]
                pre = cur.val[ca][u]
                suf = cur.val[v][cb]
                if pre is None or pre is OMEGA or suf is None or suf is OMEGA:
                    continue
                if pre + tab.weight[tp] + inner_now + tab.weight[tq] + suf == target:
                    found = (tp, tq, z, x, y, u, v)
                    break
            if found:
                break
        if found is None:
            raise InvariantError("strictly growing summary without a strict bump decomposition")
        tp, tq, z, x, y, u, v = found
        pre_vect = tab.vect(level, tab.states[ca], cg, tab.states[u])
        suf_vect = tab.vect(level, tab.states[v], cg, tab.states[cb])
        if pre_vect is None or suf_vect is None:
            raise InvariantError("finite decomposition piece without witness data")
        chain.append({
            "level": level, "g": cg, "a": ca, "b": cb,
            "pre": pre_vect, "push": tp, "pop": tq, "suf": suf_vect,
            "inner": (z, x, y),
        })
        level -= 1
        cg, ca, cb = z, x, y
        if level == 0:
            raise InvariantError("rho* chain exhausted all levels without repetition")
        profiles = [(c["inner"][0], c["inner"][1], c["inner"][2]) for c in chain]
        seen: Dict[tuple, int] = {}
        rep = None
        for idx, prof in enumerate(profiles):
            if prof in seen:
                rep = (seen[prof], idx)
                break
            seen[prof] = idx
        if rep is not None:
            i, j = rep
            return _assemble_rho_pair(wps, tab, chain, i, j, budget)


def _assemble_rho_pair(wps: Wps, tab: SummaryTable, chain, i: int, j: int, budget: int) -> PumpFound:
    """chain[i] and chain[j] (i < j) share the inner profile: the climb is
    chain[i+1..j]'s prefixes and pushes, the descent is their pops and
    suffixes in reverse. Weight is positive by the excision argument."""
    climb_w = [0] * wps.k
    climb_len = 0
    descent_w = [0] * wps.k
    descent_len = 0
    climb_pieces: List[Optional[List[Transition]]] = []
    descent_pieces: List[Optional[List[Transition]]] = []
    for t in range(i + 1, j + 1):
        c = chain[t]
        pre_w, pre_l = c["pre"]
        climb_w = [p + q for p, q in zip(climb_w, pre_w)]
        climb_len += pre_l
        climb_w = [p + q for p, q in zip(climb_w, c["push"].w)]
        climb_len += 1
        lvl = c["level"]
        climb_pieces.append(tab.transitions_of_walk(lvl, c["g"], c["a"], tab.sidx[c["push"].src], budget))
        climb_pieces.append([c["push"]])
        descent_w = [p + q for p, q in zip(descent_w, c["pop"].w)]
        descent_len += 1
        suf_w, suf_l = c["suf"]
        descent_w = [p + q for p, q in zip(descent_w, suf_w)]
        descent_len += suf_l
    for t in range(j, i, -1):
        c = chain[t]
        descent_pieces.append([c["pop"]])
        descent_pieces.append(tab.transitions_of_walk(c["level"], c["g"], tab.sidx[c["pop"].dst], c["b"], budget))
    wvec = tuple(p + q for p, q in zip(climb_w, descent_w))
    length = climb_len + descent_len
    # defensive positivity: shifted weight of the pair must be > 0
    shifted = 0
    for t in range(i + 1, j + 1):
        c = chain[t]
        lvl_cl = tab._closure_at(c["level"], c["g"])
        shifted += lvl_cl.val[c["a"]][tab.sidx[c["push"].src]]
        shifted += tab.weight[c["push"]] + tab.weight[c["pop"]]
        shifted += lvl_cl.val[tab.sidx[c["pop"].dst]][c["b"]]
    if shifted <= 0:
        raise InvariantError("rho* pair is not strictly positive")
    host = None
    pair = None
    if all(p is not None for p in climb_pieces + descent_pieces):
        p1 = tuple(itertools.chain.from_iterable(climb_pieces))
        inner_c = chain[j]["inner"]
        mid = tab.transitions_of_walk(chain[j]["level"] - 1, inner_c[0], inner_c[1], inner_c[2], budget)
        p2 = tuple(itertools.chain.from_iterable(descent_pieces))
        if mid is not None and len(p1) + len(mid) + len(p2) <= budget:
            g0 = chain[i + 1]["g"]
            start_state = tab.states[chain[i + 1]["a"]]
            stack = (BOT,) if g0 == BOT else (BOT, g0)
            path = p1 + tuple(mid) + p2
            host = Host(start_state, stack, path)
            pair = PumpablePair(
                p1=p1, p2=p2,
                a1=0, b1=len(p1),
                a2=len(p1) + len(mid), b2=len(path),
            )
            for jj in (0, 1, 2, 3):
                pump_pair(wps, host, pair, jj)
    return PumpFound(wvec=wvec, length=length, host=host, pair=pair)


# ---------------------------------------------------------------------------
# The decision procedure


@dataclass(frozen=True)
class SummaryEntry:
    value: object  # None (-infinity) | int | OMEGA
    vect: Optional[Tuple[Tuple[int, ...], int]] = None  # (weight vector, length)


class SummaryFn:
    """One level of the summary table as a (q1, gamma, q2) -> entry view."""

    def __init__(self, tab: "SummaryTable", level: int):
        self._tab = tab
        self.level = level

    def entry(self, q1: str, g: str, q2: str) -> SummaryEntry:
        v = self._tab.value(self.level, q1, g, q2)
        vect = None
        if v is not None and v is not OMEGA:
            vect = self._tab.vect(self.level, q1, g, q2)
        return SummaryEntry(value=v, vect=vect)

    def value(self, q1: str, g: str, q2: str):
        return self._tab.value(self.level, q1, g, q2)


def summary_levels(tab: "SummaryTable") -> List[SummaryFn]:
    """Views of levels 0..d+1 (entries repeat once the table stabilizes)."""
    return [SummaryFn(tab, i) for i in range(tab.d + 2)]


@dataclass(frozen=True)
class HeadCertificate:
    head: Tuple[str, str]
    status: str  # "separated" | "witness"
    rows: Tuple[Tuple[int, ...], ...]
    lam: Optional[Tuple[int, ...]]          # separated: strictly positive integers
    combination: Optional[Tuple[Fraction, ...]]  # witness: Gordan's x over rows
    # Aligned with rows; entry i is the (host, pair) whose average is rows[i],
    # None for the seeded self-loop rows and for pairs too large to keep.
    pairs: Tuple[Optional[Tuple[Host, PumpablePair]], ...] = ()


@dataclass(frozen=True)
class WpsDecision:
    answer: Optional[bool]
    status: str  # "solved" | "inconclusive"
    witness_head: Optional[Tuple[str, str]]
    heads: Tuple[HeadCertificate, ...]

    def to_doc(self) -> dict:
        certs = []
        for h in self.heads:
            entry = {"head": list(h.head), "status": h.status,
                     "rows": [[[Fraction(x).numerator, Fraction(x).denominator]
                               for x in r] for r in h.rows]}
            if h.lam is not None:
                entry["lambda"] = list(h.lam)
            if h.combination is not None:
                entry["combination"] = [[x.numerator, x.denominator] for x in h.combination]
            certs.append(entry)
        return {
            "answer": self.answer,
            "status": self.status,
            "witness_head": list(self.witness_head) if self.witness_head else None,
            "certificates": certs,
        }


def _unit_neg_rows(k: int) -> List[Tuple[int, ...]]:
    rows = []
    for d in range(k):
        row = [0] * k
        row[d] = -1
        rows.append(tuple(row))
    return rows


def decide_multidim(
    wps: Wps,
    guard: int = DEFAULT_SUMMARY_GUARD,
    row_budget: int = 64,
    materialize_budget: int = 4000,
) -> WpsDecision:
    """Does some infinite run have coordinatewise nonnegative long-run
    average? Adds the per-dimension penalty self-loops, then runs one
    constraint-generation loop per reachable head: the row set starts with
    the self-loop averages; each round solves min_r over the rows, clears
    the optimal lambda to integers, and asks the pair oracle for a pair
    strictly above r*. A fresh row loops; None settles the head: separated
    when r* < 0 (lambda is the certificate), a witness otherwise (Gordan's
    nonnegative combination over the rows is the certificate)."""
    work = add_dimension_selfloops(wps) if not wps.has_dimension_selfloops else wps
    k = work.k
    heads = sorted(reachable_heads(work))
    certs: List[HeadCertificate] = []
    witness: Optional[Tuple[str, str]] = None
    for (g, q) in heads:
        rows: List[Tuple] = list(_unit_neg_rows(k))
        pairs: List[Optional[Tuple[Host, PumpablePair]]] = [None] * k
        while True:
            if len(rows) > row_budget:
                return WpsDecision(answer=None, status="inconclusive",
                                   witness_head=None, heads=tuple(certs))
            status, lam_star, r_star = lp.min_r(rows, k)
            if status != "optimal":
                raise InvariantError("row program degenerate despite self-loop seeding")
            lam_int = clear_denominators(lam_star)
            scale = None
            for li, ls in zip(lam_int, lam_star):
                if ls != 0:
                    scale = Fraction(li, 1) / ls
                    break
            r_scaled = r_star * scale
            found = find_positive_pumpable_pair(
                work, g, q, lam_int, r_scaled,
                guard=guard, materialize_budget=materialize_budget,
            )
            if found is None:
                if r_star < 0:
                    if any(x <= 0 for x in lam_int):
                        raise InvariantError("separator lambda not strictly positive")
                    certs.append(HeadCertificate(
                        head=(g, q), status="separated",
                        rows=tuple(tuple(r) for r in rows),
                        lam=lam_int, combination=None,
                        pairs=tuple(pairs),
                    ))
                else:
                    verdict = lp.gordan([list(r) for r in rows])
                    if verdict[0] != "nonneg_solution":
                        raise InvariantError("nonnegative r* but Gordan found a separator")
                    certs.append(HeadCertificate(
                        head=(g, q), status="witness",
                        rows=tuple(tuple(r) for r in rows),
                        lam=None, combination=tuple(verdict[1]),
                        pairs=tuple(pairs),
                    ))
                    if witness is None:
                        witness = (g, q)
                break
            avg = found.avg
            if avg in [tuple(r) for r in rows]:
                raise InvariantError("oracle returned a known row above the threshold")
            rows.append(avg)
            pairs.append((found.host, found.pair)
                         if found.host is not None and found.pair is not None
                         else None)
    return WpsDecision(
        answer=witness is not None,
        status="solved",
        witness_head=witness,
        heads=tuple(certs),
    )
