"""Multidimensional mean-payoff games: player 1 wants every coordinate of the
long-run average (liminf) to be nonnegative.

The solver alternates two engines on the shrinking game:

  1. a sweep over scalarizing vectors lambda (small sup-norm levels first,
     lexicographic inside a level): any lambda whose one-dimensional game has
     a nonempty player-2 region certifies those vertices as lost, and their
     player-2 attractor is removed;
  2. when the sweep cap runs dry, a certifying exhaustion over player-2
     memoryless strategies: player 1 beats a fixed strategy from v iff some
     strongly connected component reachable from v carries a convex
     combination of its cycle means that is coordinatewise nonnegative
     (checked by the min_r program). If every strategy is beaten from every
     vertex the remainder is certified won; otherwise a bottom component of
     the refuting restriction yields a separating lambda, which feeds engine
     1 with a guaranteed-nonempty removal.

Everything is exact; the theoretical sweep bound M = (k*n*W)^(k+1) is
reported but never walked in full.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from . import lp, mp1
from .core import (
    Edge,
    GameGraph,
    GuardError,
    InvariantError,
    ModelError,
    P1,
    P2,
    attractor,
    clear_denominators,
    decompose_path,
    restrict_strategy,
    scalarize,
    subgame,
    vec_add,
)


def lambda_bound(g: GameGraph) -> int:
    """Sweep bound M = (k*n*W)^(k+1), exact."""
    return (g.k * g.n * g.max_abs_weight()) ** (g.k + 1)


def win2_for_lambda(g: GameGraph, lam: Sequence[int]) -> FrozenSet[str]:
    """Player-2 region of the one-dimensional game scalarized by lam."""
    if len(lam) != g.k:
        raise ModelError("lambda arity mismatch")
    if any(int(x) != x or x <= 0 for x in lam):
        raise ModelError("lambda must be strictly positive integers")
    measure = mp1.lift_fixpoint(scalarize(g, tuple(int(x) for x in lam)))
    return frozenset(v for v in g.vertices if measure.value[v] is None)


def lambda_sweep(k: int, level_cap: int, reverse_within_level: bool = False) -> Iterable[Tuple[int, ...]]:
    """Candidate lambdas by sup-norm level, lexicographic within a level."""
    for level in range(1, level_cap + 1):
        block = [lam for lam in itertools.product(range(1, level + 1), repeat=k)
                 if max(lam) == level]
        if reverse_within_level:
            block.reverse()
        for lam in block:
            yield lam


def enumerate_simple_cycles(g: GameGraph, limit: int) -> List[List[Edge]]:
    """All simple cycles as edge lists, deterministic order, guarded."""
    dg = nx.DiGraph()
    dg.add_nodes_from(g.vertices)
    dg.add_edges_from((e.src, e.dst) for e in g.edges)
    out: List[List[Edge]] = []
    for nodes in nx.simple_cycles(dg):
        cyc = [g.edge(nodes[i], nodes[(i + 1) % len(nodes)]) for i in range(len(nodes))]
        out.append(cyc)
        if len(out) > limit:
            raise GuardError("simple-cycle enumeration exceeded guard")
    out.sort(key=lambda cyc: (len(cyc), [(e.src, e.dst) for e in cyc]))
    return out


def _cycle_mean(cyc: Sequence[Edge], k: int) -> Tuple[Fraction, ...]:
    total = [0] * k
    for e in cyc:
        for d in range(k):
            total[d] += e.w[d]
    return tuple(Fraction(t, len(cyc)) for t in total)


def _unit_negatives(k: int) -> List[Tuple[int, ...]]:
    rows = []
    for d in range(k):
        row = [0] * k
        row[d] = -1
        rows.append(tuple(row))
    return rows


@dataclass(frozen=True)
class TraceStep:
    lam: Tuple[int, ...]
    U: FrozenSet[str]
    removed: FrozenSet[str]


@dataclass(frozen=True)
class MmpgResult:
    win1: FrozenSet[str]
    win2: FrozenSet[str]
    trace: Tuple[TraceStep, ...]
    status: str  # "solved" | "inconclusive"

    def to_doc(self) -> dict:
        return {
            "win1": sorted(self.win1),
            "win2": sorted(self.win2),
            "trace": [
                {"lambda": list(t.lam), "U": sorted(t.U), "removed": sorted(t.removed)}
                for t in self.trace
            ],
            "status": self.status,
        }


def _strategy_space(g: GameGraph) -> Tuple[List[str], List[List[str]], int]:
    verts = [v for v in g.vertices if g.owner(v) == P2]
    choices = [[e.dst for e in g.out[v]] for v in verts]
    count = 1
    for c in choices:
        count *= len(c)
    return verts, choices, count


def _scc_analysis(h: GameGraph, cycle_guard: int):
    """SCCs of h with their cycle-mean rows and the nonneg-combination flag."""
    dg = nx.DiGraph()
    dg.add_nodes_from(h.vertices)
    dg.add_edges_from((e.src, e.dst) for e in h.edges)
    sccs = [sorted(c) for c in nx.strongly_connected_components(dg)]
    sccs.sort(key=lambda c: c[0])
    comp_of = {v: i for i, comp in enumerate(sccs) for v in comp}
    rows_of: List[List[Tuple[Fraction, ...]]] = []
    good: List[bool] = []
    units = _unit_negatives(h.k)
    for comp in sccs:
        inside = frozenset(comp)
        sub = subgame(h, inside, require_total=False)
        rows: List[Tuple[Fraction, ...]] = []
        seen = set()
        for cyc in enumerate_simple_cycles(sub, cycle_guard):
            mean = _cycle_mean(cyc, h.k)
            if mean not in seen:
                seen.add(mean)
                rows.append(mean)
        rows_of.append(rows)
        if rows:
            status, _lam, r = lp.min_r(rows + units, h.k)
            good.append(status == "optimal" and r >= 0)
        else:
            good.append(False)
    # SCC dag edges for bottom detection
    scc_succ: List[set] = [set() for _ in sccs]
    for e in h.edges:
        a, b = comp_of[e.src], comp_of[e.dst]
        if a != b:
            scc_succ[a].add(b)
    return sccs, comp_of, rows_of, good, scc_succ


def _certify(g: GameGraph, strategy_guard: int, cycle_guard: int):
    """Either ("win1",), ("lambda", lam_hat), or ("unknown", reason)."""
    verts, choices, count = _strategy_space(g)
    if count > strategy_guard:
        return ("unknown", "player-2 strategy space of size %d exceeds guard" % count)
    units = _unit_negatives(g.k)
    for combo in itertools.product(*choices) if verts else [()]:
        sigma2 = dict(zip(verts, combo))
        h = restrict_strategy(g, P2, sigma2)
        try:
            sccs, comp_of, rows_of, good, scc_succ = _scc_analysis(h, cycle_guard)
        except GuardError as exc:
            return ("unknown", str(exc))
        # which components can reach a good component (over the SCC dag)
        n_comp = len(sccs)
        reach_good = [good[i] for i in range(n_comp)]
        changed = True
        while changed:
            changed = False
            for i in range(n_comp):
                if not reach_good[i] and any(reach_good[j] for j in scc_succ[i]):
                    reach_good[i] = True
                    changed = True
        failing = [v for v in sorted(g.vertices) if not reach_good[comp_of[v]]]
        if failing:
            v = failing[0]
            # a bottom component reachable from v carries the separator
            target = None
            stack, seen = [comp_of[v]], {comp_of[v]}
            order = []
            while stack:
                c = stack.pop()
                order.append(c)
                for j in sorted(scc_succ[c]):
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
            bottoms = sorted(c for c in order if not scc_succ[c])
            if not bottoms:
                raise InvariantError("total game without a bottom component")
            target = bottoms[0]
            status, lam_star, r = lp.min_r(rows_of[target] + units, g.k)
            if status != "optimal" or r >= 0:
                raise InvariantError("failing vertex but bottom component not separable")
            lam_hat = clear_denominators(lam_star)
            if any(x <= 0 for x in lam_hat):
                raise InvariantError("separator not strictly positive")
            return ("lambda", lam_hat)
    return ("win1",)


def solve_mmpg(
    g: GameGraph,
    lambda_level_cap: int = 2,
    strategy_guard: int = 100000,
    cycle_guard: int = 50000,
    reverse_within_level: bool = False,
) -> MmpgResult:
    """Iterative removal driven by scalarizations, with a certifying
    strategy-exhaustion fallback. status == "solved" carries a full
    correctness certificate in the trace plus (implicitly) the exhaustion;
    status == "inconclusive" claims only the removals."""
    current = frozenset(g.vertices)
    trace: List[TraceStep] = []

    def remove(lam: Tuple[int, ...], U: FrozenSet[str], sub: GameGraph) -> FrozenSet[str]:
        removed = attractor(sub, P2, U)
        trace.append(TraceStep(lam=lam, U=U, removed=removed))
        return current - removed

    while current:
        sub = subgame(g, current)
        found = None
        for lam in lambda_sweep(g.k, lambda_level_cap, reverse_within_level):
            U = win2_for_lambda(sub, lam)
            if U:
                found = (lam, U)
                break
        if found is None:
            verdict = _certify(sub, strategy_guard, cycle_guard)
            if verdict[0] == "win1":
                break
            if verdict[0] == "unknown":
                return MmpgResult(
                    win1=current,
                    win2=frozenset(g.vertices) - current,
                    trace=tuple(trace),
                    status="inconclusive",
                )
            lam_hat = verdict[1]
            U = win2_for_lambda(sub, lam_hat)
            if not U:
                raise InvariantError("certified separator produced an empty region")
            found = (lam_hat, U)
        current = remove(found[0], found[1], sub)
    return MmpgResult(
        win1=current,
        win2=frozenset(g.vertices) - current,
        trace=tuple(trace),
        status="solved",
    )


# ---------------------------------------------------------------------------
# The constructive player-1 strategy, simulated


@dataclass(frozen=True)
class IterationRecord:
    i: int
    lam: Tuple[int, ...]
    b_before: Tuple[int, ...]
    b_after: Tuple[int, ...]
    steps: int
    x_after: Tuple[int, ...]


@dataclass(frozen=True)
class SimulationRecord:
    k: int
    n: int
    W: int
    start: str
    iterations: Tuple[IterationRecord, ...]
    averages: Tuple[Tuple[Fraction, ...], ...]  # running average after every round


AdversaryFn = Callable[[GameGraph, str, "random.Random"], str]


def _random_adversary(g: GameGraph, v: str, rng) -> str:
    return rng.choice(sorted(e.dst for e in g.out[v]))


def make_worst_adversary(scal: GameGraph) -> AdversaryFn:
    """Punishing choices from the one-dimensional solve of the current
    scalarization; arbitrary-but-deterministic where it has no punishment."""
    _w1, _w2, _s1, sigma2 = mp1.solve_mp1(scal)

    def choose(g: GameGraph, v: str, _rng) -> str:
        if v in sigma2:
            return sigma2[v]
        return sorted(e.dst for e in g.out[v])[0]

    return choose


def simulate_player1(
    g: GameGraph,
    start: str,
    iterations: int,
    seed: int = 0,
    adversary: str = "random",
    check_precondition: bool = True,
) -> SimulationRecord:
    """Play the constructive strategy: iteration i scalarizes by -b_{i-1},
    extracts the one-dimensional strategy, plays i rounds, then folds the
    cycles of that segment into b. Records the running average after every
    round."""
    import random

    if start not in g.out:
        raise ModelError("unknown start vertex %r" % start)
    if check_precondition:
        res = solve_mmpg(g)
        if res.status != "solved":
            raise GuardError("cannot check the winning precondition: solver inconclusive")
        if start not in res.win1:
            raise ModelError("start vertex is not won by player 1")

    rng = random.Random(seed)
    k, n, W = g.k, g.n, g.max_abs_weight()
    b = tuple([1] * k)
    x = tuple([0] * k)
    pos = start
    steps_total = 0
    averages: List[Tuple[Fraction, ...]] = []
    records: List[IterationRecord] = []

    for i in range(1, iterations + 1):
        lam = tuple(-c for c in b)
        scal = scalarize(g, lam)
        measure = mp1.lift_fixpoint(scal)
        sigma1 = mp1.sigma1_from_measure(scal, measure)
        if adversary == "random":
            adv: AdversaryFn = _random_adversary
        elif adversary == "worst":
            adv = make_worst_adversary(scal)
        elif callable(adversary):
            adv = adversary
        else:
            raise ModelError("unknown adversary %r" % (adversary,))

        path: List[Edge] = []
        for _round in range(i):
            if g.owner(pos) == P1:
                if pos in sigma1:
                    nxt = sigma1[pos]
                else:
                    # outside the scalarized winning region: least-credit choice
                    cands = sorted(g.out[pos], key=lambda e: (mp1._key(measure.value[e.dst]), e.dst))
                    nxt = cands[0].dst
            else:
                nxt = adv(g, pos, rng)
            e = g.edge(pos, nxt)
            path.append(e)
            x = vec_add(x, e.w)
            steps_total += 1
            averages.append(tuple(Fraction(c, steps_total) for c in x))
            pos = nxt
        dec = decompose_path(g, path)
        cyc_weight = [0] * k
        for cyc in dec.cycles:
            for e in cyc:
                cyc_weight = [a + wd for a, wd in zip(cyc_weight, e.w)]
        b_after = tuple(a + c for a, c in zip(b, cyc_weight))
        records.append(IterationRecord(
            i=i, lam=lam, b_before=b, b_after=b_after, steps=i,
            x_after=tuple(int(c) for c in x),
        ))
        b = b_after

    return SimulationRecord(
        k=k, n=n, W=W, start=start,
        iterations=tuple(records), averages=tuple(averages),
    )


def _le_sqrt_plus_sqrt(value: Fraction, a: int, b: int) -> bool:
    """Exact check of value <= sqrt(a) + sqrt(b) for nonnegative integers."""
    if value <= 0:
        return True
    # value^2 <= a + b + 2*sqrt(a*b)
    t = value * value - a - b
    if t <= 0:
        return True
    return t * t <= 4 * a * b


def x_norm_bound_holds(x: Sequence[int], k: int, n: int, W: int, i: int) -> bool:
    """|x|_2 <= sqrt(k*W^2*i^3) + i*n*W*sqrt(k), checked in exact integers."""
    sq = sum(int(c) * int(c) for c in x)
    a = k * W * W * i ** 3
    b = (i * n * W) ** 2 * k
    # sqrt(sq) <= sqrt(a) + sqrt(b)  <=>  sq <= a + b + 2 sqrt(ab)
    t = sq - a - b
    if t <= 0:
        return True
    return t * t <= 4 * a * b


def average_bound(k: int, n: int, W: int, i: int) -> Tuple[int, int, int]:
    """The certified decay bound at iteration i >= 2, returned in the exact
    form (a, b, denom) meaning (sqrt(a) + sqrt(b)) / denom."""
    a = k * W * W * i ** 3
    b = (i * n * W + i * W) ** 2 * k
    denom = i * (i - 1) // 2
    return a, b, denom


def average_bound_holds(avg: Sequence[Fraction], k: int, n: int, W: int, i: int) -> bool:
    """sup-norm of the average <= (sqrt(kW^2 i^3) + (inW + iW) sqrt(k)) / (i(i-1)/2)."""
    a, b, denom = average_bound(k, n, W, i)
    norm = max(abs(Fraction(c)) for c in avg)
    return _le_sqrt_plus_sqrt(norm * denom, a, b)


def check_simulation_bounds(rec: SimulationRecord) -> List[Tuple[int, bool]]:
    """Per-iteration exact checks of the accumulated-weight norm bound,
    starting at i = 2."""
    out = []
    for it in rec.iterations:
        if it.i < 2:
            continue
        out.append((it.i, x_norm_bound_holds(it.x_after, rec.k, rec.n, rec.W, it.i)))
    return out
