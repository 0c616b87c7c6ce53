"""Brute-force reference deciders.

Small, slow, and written directly from the game definitions so the real
solvers have something independent to disagree with. Nothing here
imports solver modules; the only shared machinery is the core graph
toolkit, the exact LP kernel, and the pushdown replay primitives (the
latter ARE the semantics, not an algorithm).

Everything is budget-guarded: these walk strategy products and path
spaces that grow brutally fast, and a silent multi-hour run helps
nobody. Exceeding a budget raises GuardError rather than degrading the
answer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

from .core import (
    GameGraph,
    GuardError,
    ModelError,
    P1,
    P2,
    attractor,
    reachable_from,
    restrict_strategy,
    subgame,
    transform_assumptions,
)
from . import lp
from .reductions import Cnf3, cnf3_eval
from .wps import BOT, Host, PumpablePair, Wps, pump_pair, replay
from .wrg import Wrg, WrgModule

__all__ = [
    "OracleBudget",
    "brute_mmpg",
    "enumerate_pumpable_pairs",
    "PairFinding",
    "find_pair_row_above",
    "BruteWpsResult",
    "brute_wps",
    "BruteWrgResult",
    "brute_wrg",
    "cnf3_satisfiable",
]


@dataclass(frozen=True)
class OracleBudget:
    """Hard ceilings for the brute searches. The defaults fit the test
    corpora (a handful of vertices, strategies in the thousands) with
    slack; anything bigger deserves a conscious override."""

    max_vertices: int = 6          # original arena size for brute_mmpg
    max_strategies: int = 200_000  # strategy products (mmpg and wrg)
    max_candidates: int = 500_000  # pair candidates and path nodes (wps)
    max_height: int = 6            # stack height above the start (wps)
    max_prefix: int = 8            # steps from the head to a pair site
    max_segment: int = 4           # each pair segment and the middle gap
    summary_rounds: int = 64       # relaxation sweeps before divergence


DEFAULT_BUDGET = OracleBudget()


# ---------------------------------------------------------------------------
# Multidimensional mean-payoff arenas


def _simple_cycles(g: GameGraph) -> List[Tuple[FrozenSet[str], Tuple[int, ...]]]:
    """All simple cycles as (vertex set, total weight). Exponential by
    nature; callers keep the graphs tiny."""
    order = sorted(g.owners)
    index = {v: i for i, v in enumerate(order)}
    out: List[Tuple[FrozenSet[str], Tuple[int, ...]]] = []
    k = g.k

    for anchor in order:
        a = index[anchor]
        # DFS over vertices with index >= a, cycle closes at the anchor
        stack: List[Tuple[str, Tuple[str, ...], Tuple[int, ...]]] = [
            (anchor, (anchor,), (0,) * k)]
        while stack:
            v, path, acc = stack.pop()
            for e in g.out[v]:
                if index[e.dst] < a:
                    continue
                w = tuple(x + y for x, y in zip(acc, e.w))
                if e.dst == anchor:
                    out.append((frozenset(path), w))
                elif e.dst not in path:
                    stack.append((e.dst, path + (e.dst,), w))
    return out


def _p2_strategy_space(g: GameGraph) -> List[List[Tuple[str, str]]]:
    space = []
    for v in sorted(g.owners):
        if g.owners[v] == P2:
            space.append([(v, e.dst) for e in g.out[v]])
    return space


def brute_mmpg(g: GameGraph, budget: OracleBudget = DEFAULT_BUDGET
               ) -> Tuple[FrozenSet[str], FrozenSet[str]]:
    """Winner partition of the k-dimensional mean-payoff game with the
    componentwise-nonnegative objective for player 1.

    Direct fixpoint on the normalized arena: a vertex falls when some
    memoryless player-2 strategy admits a weighting lambda >= 1 making
    every reachable simple cycle strictly negative; fallen vertices and
    their player-2 attractor leave, and the loop repeats on the rest.
    The guard is on the ORIGINAL vertex count: normalization adds only
    single-successor helpers, which enlarge the graph but not player
    2's strategy space.
    """
    original = set(g.owners)
    if len(original) > budget.max_vertices:
        raise GuardError(
            "brute force handles up to %d vertices, got %d"
            % (budget.max_vertices, len(original)))
    H = transform_assumptions(g)
    current: Set[str] = set(H.owners)
    unit_rows = [([1 if j == i else 0 for j in range(g.k)], ">=", 1)
                 for i in range(g.k)]

    while current:
        sub = subgame(H, current)
        space = _p2_strategy_space(sub)
        count = 1
        for opts in space:
            count *= len(opts)
            if count > budget.max_strategies:
                raise GuardError("player-2 strategy product exceeds %d"
                                 % budget.max_strategies)
        beaten: Set[str] = set()
        for combo in itertools.product(*space):
            sigma = dict(combo)
            gs = restrict_strategy(sub, P2, sigma)
            cycles = _simple_cycles(gs)
            reach: Dict[str, FrozenSet[str]] = {}
            for v in sorted(current - beaten):
                if v not in reach:
                    reach[v] = reachable_from(gs, v)
                rows = [(list(w), "<=", -1)
                        for verts, w in cycles if verts & reach[v]]
                if not rows:
                    continue
                if lp.feasible(unit_rows + rows) is not None:
                    beaten.add(v)
        if not beaten:
            break
        current -= attractor(sub, P2, beaten)

    win1 = frozenset(original & current)
    return win1, frozenset(original - win1)


# ---------------------------------------------------------------------------
# Weighted pushdown systems


@dataclass(frozen=True)
class PairFinding:
    row: Tuple[int, ...]
    host: Host
    pair: PumpablePair


def _pair_ok(wps: Wps, host: Host, pair: PumpablePair) -> bool:
    # A pair is good when every pump count keeps the path valid and keeps
    # the endpoint fixed.  Checking j in {0, 2, 3} suffices: j=1 is the
    # host itself, and a segment that repeats twice and three times from
    # the same state and top repeats any number of times, since each extra
    # copy sees the configuration the previous copy produced.
    try:
        end = replay(wps, host.start_state, host.start_stack, host.path)
        for j in (0, 2, 3):
            pumped = pump_pair(wps, host, pair, j)
            if replay(wps, host.start_state, host.start_stack,
                      pumped) != end:
                return False
    except ModelError:
        return False
    return True


def _pair_replays(wps: Wps, host: Host, pair: PumpablePair) -> bool:
    # Validation for cone pairs: pumped variants must replay, but the
    # endpoint may drift (a pure push block grows the stack forever, and
    # that is the whole point of exploiting it).
    try:
        for j in (0, 2, 3):
            pump_pair(wps, host, pair, j)
    except ModelError:
        return False
    return True


def enumerate_pumpable_pairs(wps: Wps, start: Tuple[str, Tuple[str, ...]],
                             target: Tuple[str, Tuple[str, ...]],
                             max_host: int = 8,
                             budget: OracleBudget = DEFAULT_BUDGET
                             ) -> List[PairFinding]:
    """Every pumpable pair on every path from the start configuration
    to the target configuration, paths of at most max_host transitions.
    Validation is replay of the double- and triple-pumped variants, which
    must end exactly where the host ends, so membership is definitional,
    not clever."""
    q0, st0 = start
    findings: List[PairFinding] = []
    seen_pairs: Set[Tuple] = set()
    candidates = 0

    # hosts: plain DFS over transition sequences
    hosts: List[Tuple[Tuple, ...]] = []
    stack = [(q0, tuple(st0), ())]
    while stack:
        q, st, path = stack.pop()
        if (q, st) == (target[0], tuple(target[1])) and path:
            hosts.append(path)
        if len(path) >= max_host or len(st) > len(st0) + budget.max_height:
            continue
        for t in wps.from_head(q, st[-1]):
            try:
                q2, st2 = replay(wps, q, st, [t])
            except ModelError:
                continue
            stack.append((q2, st2, path + (t,)))
        candidates += 1
        if candidates > budget.max_candidates:
            raise GuardError("host enumeration exceeds %d nodes"
                             % budget.max_candidates)

    for path in hosts:
        n = len(path)
        host = Host(q0, tuple(st0), path)
        for a1 in range(n + 1):
            for b1 in range(a1, n + 1):
                for a2 in range(b1, n + 1):
                    for b2 in range(a2, n + 1):
                        if (b1 - a1) + (b2 - a2) < 1:
                            continue
                        candidates += 1
                        if candidates > budget.max_candidates:
                            raise GuardError(
                                "pair enumeration exceeds %d candidates"
                                % budget.max_candidates)
                        pair = PumpablePair(path[a1:b1], path[a2:b2],
                                            a1, b1, a2, b2)
                        if not _pair_ok(wps, host, pair):
                            continue
                        row = tuple(
                            sum(t.w[i] for t in pair.p1)
                            + sum(t.w[i] for t in pair.p2)
                            for i in range(wps.k))
                        key = (pair.p1, pair.p2)
                        if key in seen_pairs:
                            continue
                        seen_pairs.add(key)
                        findings.append(PairFinding(row, host, pair))
    findings.sort(key=lambda f: (f.row, len(f.pair.p1) + len(f.pair.p2)))
    return findings


def _head_start(head: Tuple[str, str]) -> Tuple[str, Tuple[str, ...]]:
    sym, q = head
    return q, (BOT,) if sym == BOT else (BOT, sym)


def _pair_rows_from_head(wps: Wps, head: Tuple[str, str],
                         budget: OracleBudget) -> List[PairFinding]:
    """Pumpable pairs on loops at a head: hosts start at the head's
    minimal configuration, never pop below it, and end at a configuration
    with the same head again (a taller stack is fine). The loop shape is
    what lets rows of one head be combined: each host replays from any
    configuration with this head, so excursions chain forever in any
    proportions. Segments are capped at max_segment, approach and gap at
    max_prefix/max_segment."""
    q0, st0 = _head_start(head)
    floor = len(st0)
    cap = floor + budget.max_height
    counter = [0]

    def charge(n: int = 1) -> None:
        counter[0] += n
        if counter[0] > budget.max_candidates:
            raise GuardError("pair search exceeds %d candidates"
                             % budget.max_candidates)

    def moves(q: str, st: Tuple[str, ...]):
        for t in wps.from_head(q, st[-1]):
            try:
                q2, st2 = replay(wps, q, st, [t])
            except ModelError:
                continue
            if floor <= len(st2) <= cap:
                yield t, q2, st2

    # configurations reachable from the head, one shortest witness each
    prefix_of: Dict[Tuple[str, Tuple[str, ...]], Tuple] = {(q0, st0): ()}
    frontier = [(q0, st0)]
    for _ in range(budget.max_prefix):
        nxt = []
        for q, st in frontier:
            path = prefix_of[(q, st)]
            for t, q2, st2 in moves(q, st):
                charge()
                if (q2, st2) not in prefix_of:
                    prefix_of[(q2, st2)] = path + (t,)
                    nxt.append((q2, st2))
        frontier = nxt

    def segments(q: str, st: Tuple[str, ...], limit: int):
        """(path, end state, end stack) with 1..limit steps."""
        work = [((q, st), ())]
        while work:
            (qa, sa), path = work.pop()
            for t, qb, sb in moves(qa, sa):
                charge()
                p2 = path + (t,)
                yield p2, qb, sb
                if len(p2) < limit:
                    work.append(((qb, sb), p2))

    findings: List[PairFinding] = []
    seen_rows: Set[Tuple[Tuple, Tuple]] = set()
    for (q, st), prefix in sorted(prefix_of.items(),
                                  key=lambda kv: (len(kv[1]), kv[0])):
        for p1, q1, st1 in segments(q, st, budget.max_segment):
            if q1 != q or st1[:len(st)] != st:
                continue  # must anchor a repeatable push block
            grow = len(st1) - len(st)
            # lone segment: pumping only p1, p2 stays empty; the host is a
            # loop at the head only when the block ends under its symbol
            a1 = len(prefix)
            host = Host(q0, st0, prefix + p1)
            pair = PumpablePair(p1, (), a1, a1 + len(p1),
                                a1 + len(p1), a1 + len(p1))
            if (q == head[1] and st1[-1] == head[0]
                    and _pair_replays(wps, host, pair)):
                row = tuple(sum(t.w[i] for t in p1) for i in range(wps.k))
                if (row, ("solo",)) not in seen_rows:
                    seen_rows.add((row, ("solo",)))
                    findings.append(PairFinding(row, host, pair))
            if grow == 0:
                continue
            # a popping partner: middle gap, then a state cycle shrinking
            # the stack by exactly the pushed amount
            for mid, qm, stm in itertools.chain(
                    [((), q1, st1)], segments(q1, st1, budget.max_segment)):
                if len(stm) < len(st1):
                    continue
                for p2, qe, ste in segments(qm, stm, budget.max_segment):
                    if qe != qm or len(ste) != len(stm) - grow:
                        continue
                    if qe != head[1] or ste[-1] != head[0]:
                        continue
                    a1 = len(prefix)
                    b1 = a1 + len(p1)
                    a2 = b1 + len(mid)
                    b2 = a2 + len(p2)
                    host = Host(q0, st0, prefix + p1 + mid + p2)
                    pair = PumpablePair(p1, p2, a1, b1, a2, b2)
                    if not _pair_replays(wps, host, pair):
                        continue
                    row = tuple(
                        sum(t.w[i] for t in p1) + sum(t.w[i] for t in p2)
                        for i in range(wps.k))
                    key = (row, (p1, p2))
                    if key in seen_rows:
                        continue
                    seen_rows.add(key)
                    findings.append(PairFinding(row, host, pair))
    return findings


def find_pair_row_above(wps: Wps, head: Tuple[str, str], lam: Sequence[int],
                        budget: OracleBudget = DEFAULT_BUDGET
                        ) -> Optional[PairFinding]:
    """First pumpable pair at the head whose weight row is strictly
    positive under lam, or None when the bounded search space holds
    none. The None is relative to the budget's caps, which is exactly
    the advertised contract."""
    best = None
    for f in _pair_rows_from_head(wps, head, budget):
        s = sum(a * b for a, b in zip(f.row, lam))
        if s > 0:
            if best is None or (len(f.host.path), f.row) < (
                    len(best.host.path), best.row):
                best = f
    return best


@dataclass(frozen=True)
class BruteWpsResult:
    answer: str  # "yes" | "no_up_to"
    head: Tuple[str, str]
    L: int
    rows: Tuple[Tuple[int, ...], ...]
    combination: Optional[Tuple]  # Gordan x over slack rows then data rows
    findings: Tuple[PairFinding, ...]  # one representative per data row


def brute_wps(wps: Wps, head: Tuple[str, str], L: int,
              budget: OracleBudget = DEFAULT_BUDGET) -> BruteWpsResult:
    """Bounded definitional decision at one head: enumerate every
    non-decreasing cyclic path at the head with at most L transitions,
    extract every pumpable pair on every such path by replay, and ask
    Gordan whether the collected average rows combine nonnegatively
    against the per-dimension slack directions. "yes" is sound outright
    (the combination and its pairs are returned); "no_up_to" claims
    nothing beyond the bound."""
    sym, q_h = head
    q0, st0 = _head_start(head)
    floor = len(st0)
    cap = floor + budget.max_height
    candidates = 0

    hosts: List[Tuple[Tuple, ...]] = []
    stack = [(q0, st0, ())]
    while stack:
        q, st, path = stack.pop()
        if path and q == q_h and st[-1] == sym:
            hosts.append(path)
        if len(path) >= L:
            continue
        for t in wps.from_head(q, st[-1]):
            try:
                q2, st2 = replay(wps, q, st, [t])
            except ModelError:
                continue
            if not (floor <= len(st2) <= cap):
                continue
            stack.append((q2, st2, path + (t,)))
        candidates += 1
        if candidates > budget.max_candidates:
            raise GuardError("cyclic path enumeration exceeds %d nodes"
                             % budget.max_candidates)

    by_row: Dict[Tuple[int, ...], PairFinding] = {}
    for path in hosts:
        n = len(path)
        host = Host(q0, st0, path)
        for a1 in range(n + 1):
            for b1 in range(a1, n + 1):
                for a2 in range(b1, n + 1):
                    for b2 in range(a2, n + 1):
                        if (b1 - a1) + (b2 - a2) < 1:
                            continue
                        candidates += 1
                        if candidates > budget.max_candidates:
                            raise GuardError(
                                "pair extraction exceeds %d candidates"
                                % budget.max_candidates)
                        pair = PumpablePair(path[a1:b1], path[a2:b2],
                                            a1, b1, a2, b2)
                        if not _pair_replays(wps, host, pair):
                            continue
                        row = tuple(
                            sum(t.w[i] for t in pair.p1)
                            + sum(t.w[i] for t in pair.p2)
                            for i in range(wps.k))
                        if row not in by_row:
                            by_row[row] = PairFinding(row, host, pair)

    rows = tuple(sorted(by_row))
    findings = tuple(by_row[r] for r in rows)
    unit = [[-1 if j == i else 0 for j in range(wps.k)]
            for i in range(wps.k)]
    if rows:
        kind, vec = lp.gordan(unit + [list(r) for r in rows])
        if kind == "nonneg_solution":
            return BruteWpsResult("yes", head, L, rows, tuple(vec), findings)
    return BruteWpsResult("no_up_to", head, L, rows, None, findings)


# ---------------------------------------------------------------------------
# Recursive game graphs


NEG_INF = "neg_inf"
POS_INF = "pos_inf"


def _tau_space(wrg: Wrg) -> List[Tuple[str, object, List[object]]]:
    """Choice points of a modular memoryless player-1 strategy, each as
    (module, position, destination options) in a fixed order."""
    space = []
    for mod in wrg.modules:
        exit_set = set(mod.exits)
        positions: List[object] = [v for v in sorted(mod.node_ids)
                                   if v not in exit_set
                                   and mod.node_owner(v) == P1]
        for b, owner, callee in mod.boxes:
            if owner != P1:
                continue
            for x in wrg.module(callee).exits:
                positions.append(("ret", b, x))
        for pos in positions:
            opts = [t.dst for t in mod.outgoing(pos)]
            if len(opts) > 1:
                space.append((mod.name, pos, opts))
    return space


def _tau_edges(wrg: Wrg, mod: WrgModule,
               tau: Mapping[Tuple[str, object], object]) -> List[Tuple[object, object, int]]:
    """Module transitions with player-1 choices fixed by tau."""
    edges = []
    for t in mod.transitions:
        choice = tau.get((mod.name, t.src))
        if choice is not None and t.dst != choice:
            continue
        edges.append((t.src, t.dst, t.w[0]))
    return edges


def _summaries(wrg: Wrg, tau: Mapping[Tuple[str, object], object],
               rounds: int) -> Dict[Tuple[str, object], object]:
    """Joint min-weight distances from every module's entry under tau,
    box edges priced by the callee's exit distances. Divergent entries
    collapse to NEG_INF after the sweep cap; unreached stay POS_INF."""
    dist: Dict[Tuple[str, object], object] = {}
    edges_by_mod: Dict[str, List[Tuple[object, object, int]]] = {}
    for mod in wrg.modules:
        edges_by_mod[mod.name] = _tau_edges(wrg, mod, tau)
        for v in mod.node_ids:
            dist[(mod.name, v)] = POS_INF
        for b, _, callee in mod.boxes:
            for x in wrg.module(callee).exits:
                dist[(mod.name, ("ret", b, x))] = POS_INF
        dist[(mod.name, mod.entry)] = 0

    def relax_once(mark_neg: bool) -> bool:
        changed = False
        for mod in wrg.modules:
            for src, dst, w in edges_by_mod[mod.name]:
                d = dist[(mod.name, src)]
                if d is POS_INF:
                    continue
                if isinstance(dst, str):
                    targets = [((mod.name, dst), d, w, None)]
                else:
                    b = dst[1]
                    callee = mod.box_callee(b)
                    targets = []
                    for x in wrg.module(callee).exits:
                        s = dist[(callee, x)]
                        if s is POS_INF:
                            continue
                        targets.append(((mod.name, ("ret", b, x)), d, w, s))
                for key, d0, w0, s in targets:
                    if d0 is NEG_INF or s is NEG_INF:
                        cand: object = NEG_INF
                    else:
                        cand = d0 + w0 + (0 if s is None else s)
                    old = dist[key]
                    better = (old is POS_INF or cand is NEG_INF and old is not NEG_INF
                              or (old is not NEG_INF and cand is not NEG_INF and cand < old))
                    if better:
                        dist[key] = NEG_INF if (mark_neg and cand is not NEG_INF) else cand
                        changed = True
        return changed

    for _ in range(rounds):
        if not relax_once(False):
            return dist
    # still descending: everything that improves now is divergent
    while relax_once(True):
        pass
    return dist


def _negative_cycle(nodes: Sequence, edges: List[Tuple[object, object, object]]
                    ) -> Optional[List[object]]:
    """A cycle with total weight < 0 (NEG_INF edges count as negative),
    as its node list, or None. Bellman-Ford with predecessor walk."""
    order = {v: i for i, v in enumerate(nodes)}
    # a NEG_INF edge lies on a cycle iff its head reaches its tail
    succ: Dict[object, List[object]] = {v: [] for v in nodes}
    for u, v, w in edges:
        succ[u].append(v)
    for u, v, w in edges:
        if w is not NEG_INF:
            continue
        seen = {v}
        bfs = [v]
        while bfs:
            x = bfs.pop()
            if x == u:
                return [u, v] if u != v else [u]
            for y in succ[x]:
                if y not in seen:
                    seen.add(y)
                    bfs.append(y)
    fin = [(u, v, w) for u, v, w in edges if w is not NEG_INF]
    d = {v: 0 for v in nodes}
    pred: Dict[object, object] = {}
    bad = None
    for i in range(len(nodes)):
        changed = False
        for u, v, w in fin:
            if d[u] + w < d[v]:
                d[v] = d[u] + w
                pred[v] = u
                changed = True
                if i == len(nodes) - 1:
                    bad = v
        if not changed:
            return None
    if bad is None:
        return None
    for _ in range(len(nodes)):
        bad = pred[bad]
    cyc = [bad]
    x = pred[bad]
    while x != bad:
        cyc.append(x)
        x = pred[x]
    cyc.reverse()
    return cyc


@dataclass(frozen=True)
class BruteWrgResult:
    winner: str  # "player1" | "player2"
    tau: Optional[Dict[Tuple[str, object], object]]
    refutations: Optional[Tuple[dict, ...]] = None


def _reachable_parts(wrg: Wrg, edges_by_mod, dist) -> Tuple[Set[str], Dict[str, Set[object]]]:
    """Modules entered from the initial one and, per module, positions
    reachable from its entry; box returns traverse only when the callee
    exit is reachable in the callee."""
    pos_reach: Dict[str, Set[object]] = {}
    mod_seen: Set[str] = set()
    work = [wrg.initial]
    while work:
        name = work.pop()
        if name in mod_seen:
            continue
        mod_seen.add(name)
        mod = wrg.module(name)
        seen: Set[object] = {mod.entry}
        stack: List[object] = [mod.entry]
        while stack:
            u = stack.pop()
            for src, dst, w in edges_by_mod[name]:
                if src != u:
                    continue
                if isinstance(dst, str):
                    nxt = [dst]
                else:
                    b = dst[1]
                    callee = mod.box_callee(b)
                    if callee not in mod_seen:
                        work.append(callee)
                    nxt = [("ret", b, x) for x in wrg.module(callee).exits
                           if dist[(callee, x)] is not POS_INF]
                for v in nxt:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
        pos_reach[name] = seen
    return mod_seen, pos_reach


def _refute_tau(wrg: Wrg, tau: Mapping[Tuple[str, object], object],
                budget: OracleBudget) -> Optional[dict]:
    """Evidence that player 2 beats this modular strategy: a reachable
    negative cycle inside one module (box hops priced by callee exit
    summaries), or a negative entry-to-entry descent loop among the
    modules. None when tau withstands both."""
    dist = _summaries(wrg, tau, budget.summary_rounds)
    edges_by_mod = {m.name: _tau_edges(wrg, m, tau) for m in wrg.modules}
    mod_seen, pos_reach = _reachable_parts(wrg, edges_by_mod, dist)

    for name in sorted(mod_seen):
        mod = wrg.module(name)
        keep = pos_reach[name]
        edges: List[Tuple[object, object, object]] = []
        for src, dst, w in edges_by_mod[name]:
            if src not in keep:
                continue
            if isinstance(dst, str):
                if dst in keep:
                    edges.append((src, dst, w))
            else:
                b = dst[1]
                callee = mod.box_callee(b)
                for x in wrg.module(callee).exits:
                    rv = ("ret", b, x)
                    if rv not in keep:
                        continue
                    s = dist[(callee, x)]
                    if s is POS_INF:
                        continue
                    edges.append((src, rv, NEG_INF if s is NEG_INF else w + s))
        cyc = _negative_cycle(sorted(keep, key=repr), edges)
        if cyc is not None:
            return {"kind": "local", "module": name, "cycle": cyc}

    # entry descent graph over the reachable modules
    mod_edges: List[Tuple[object, object, object]] = []
    for name in sorted(mod_seen):
        mod = wrg.module(name)
        best: Dict[str, object] = {}
        for src, dst, w in edges_by_mod[name]:
            if not isinstance(dst, str) and src in pos_reach[name]:
                b = dst[1]
                callee = mod.box_callee(b)
                d = dist[(name, src)]
                if d is POS_INF:
                    continue
                t = NEG_INF if d is NEG_INF else d + w
                old = best.get(callee)
                if (old is None or old is not NEG_INF
                        and (t is NEG_INF or t < old)):
                    best[callee] = t
        for callee, t in best.items():
            mod_edges.append((name, callee, t))
    cyc = _negative_cycle(sorted(mod_seen), mod_edges)
    if cyc is not None:
        return {"kind": "entry", "modules": cyc}
    return None


def brute_wrg(wrg: Wrg, budget: OracleBudget = DEFAULT_BUDGET) -> BruteWrgResult:
    """Winner of the recursive game under modular strategies, by
    enumerating every modular memoryless player-1 strategy and asking
    whether player 2 can still force a negative limit average. Player 1
    wins exactly when some strategy refuses both refutation shapes."""
    if wrg.k != 1:
        raise ModelError("the brute recursive solver handles k=1, got %d" % wrg.k)
    space = _tau_space(wrg)
    count = 1
    for _, _, opts in space:
        count *= len(opts)
        if count > budget.max_strategies:
            raise GuardError("strategy product exceeds %d" % budget.max_strategies)
    npos = sum(len(m.node_ids) + len(m.boxes) for m in wrg.modules)
    if count * npos > budget.max_strategies * 4:
        raise GuardError(
            "strategy product times size (%d * %d) is past the budget"
            % (count, npos))

    refutations: List[dict] = []
    for combo in itertools.product(*(opts for _, _, opts in space)):
        tau = {(m, pos): dst
               for (m, pos, _), dst in zip(space, combo)}
        bad = _refute_tau(wrg, tau, budget)
        if bad is None:
            return BruteWrgResult("player1", tau)
        refutations.append(bad)
    return BruteWrgResult("player2", None, tuple(refutations))


# ---------------------------------------------------------------------------
# Truth tables


def cnf3_satisfiable(phi: Cnf3) -> bool:
    for bits in itertools.product((False, True), repeat=phi.n):
        if cnf3_eval(phi, bits):
            return True
    return False
