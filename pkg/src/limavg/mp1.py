"""One-dimensional mean-payoff games at threshold zero.

Player 1 wants the long-run average (liminf) of the single weight to be
nonnegative. Solved by energy-game progress measures: f(v) is the least
initial credit that keeps the running sum nonnegative forever, capped at
T = n*W; vertices whose credit exceeds T are lost for player 1.

Player 2's punishing strategy comes from the dual game (owners swapped,
weights -(n*w+1)); in the dual, "all cycles strictly negative" for the
original weights turns into an ordinary nonnegativity objective, so the
same lifting primitive serves both players.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

from .core import (
    Edge,
    GameGraph,
    InvariantError,
    ModelError,
    P1,
    P2,
    build_game,
)

TOP = None  # order: any finite credit < TOP


@dataclass(frozen=True)
class EnergyMeasure:
    """Least credits of the lifting fixpoint; None means unbounded (lost)."""

    value: Mapping[str, Optional[int]]
    cap: int

    def finite(self, v: str) -> bool:
        return self.value[v] is not None


def _key(x: Optional[int]) -> Tuple[int, int]:
    return (1, 0) if x is None else (0, x)


def lift_fixpoint(g: GameGraph) -> EnergyMeasure:
    """Least fixpoint of the credit-lifting operator, worklist order.

    f(v) = min (P1) / max (P2) over successors u of
           cap_T(max(0, f(u) - w(v,u))), with T = n*W and values beyond T
    collapsing to None.
    """
    if g.k != 1:
        raise ModelError("lift_fixpoint needs a one-dimensional game")
    cap = g.n * g.max_abs_weight()
    g.require_total()

    preds: Dict[str, list] = {v: [] for v in g.vertices}
    for e in g.edges:
        preds[e.dst].append(e.src)

    f: Dict[str, Optional[int]] = {v: 0 for v in g.vertices}

    def recompute(v: str) -> Optional[int]:
        best: Optional[Tuple[int, int]] = None
        best_val: Optional[int] = 0
        owner = g.owner(v)
        for e in g.out[v]:
            fu = f[e.dst]
            if fu is None:
                cand: Optional[int] = None
            else:
                c = fu - e.w[0]
                if c < 0:
                    c = 0
                cand = None if c > cap else c
            kk = _key(cand)
            if best is None:
                best, best_val = kk, cand
            elif owner == P1:
                if kk < best:
                    best, best_val = kk, cand
            else:
                if kk > best:
                    best, best_val = kk, cand
        return best_val

    from collections import deque

    queue = deque(g.vertices)
    queued = set(g.vertices)
    while queue:
        v = queue.popleft()
        queued.discard(v)
        new = recompute(v)
        if _key(new) > _key(f[v]):
            f[v] = new
            for u in preds[v]:
                if u not in queued:
                    queued.add(u)
                    queue.append(u)
    return EnergyMeasure(value=f, cap=cap)


def sigma1_from_measure(g: GameGraph, measure: EnergyMeasure) -> Dict[str, str]:
    """Credit-greedy player-1 choices on the finite region; ties broken by
    successor id. Guarantees every cycle closed inside the finite region
    has nonnegative weight."""
    sigma: Dict[str, str] = {}
    f = measure.value
    for v in g.vertices:
        if g.owner(v) != P1 or f[v] is None:
            continue
        best = None
        for e in sorted(g.out[v], key=lambda e: e.dst):
            fu = f[e.dst]
            if fu is None:
                continue
            c = max(0, fu - e.w[0])
            cand = None if c > measure.cap else c
            if cand is None:
                continue
            if best is None or cand < best[0]:
                best = (cand, e.dst)
        if best is None:
            raise InvariantError("finite vertex with no finite successor choice")
        sigma[v] = best[1]
    return sigma


def dual_game(g: GameGraph) -> GameGraph:
    """Owners swapped, weights -(n*w + 1). A cycle has weight <= -1 under w
    exactly when it has nonnegative weight under the dual."""
    n = g.n
    verts = [(v, P2 if g.owner(v) == P1 else P1) for v in g.vertices]
    edges = [(e.src, e.dst, (-(n * e.w[0] + 1),)) for e in g.edges]
    return build_game(1, verts, edges)


def solve_mp1(g: GameGraph) -> Tuple[FrozenSet[str], FrozenSet[str], Dict[str, str], Dict[str, str]]:
    """Winning regions and memoryless strategies for threshold >= 0.

    Returns (win1, win2, sigma1, sigma2). sigma1 covers player-1 vertices in
    win1 and keeps every reachable cycle nonnegative; sigma2 covers player-2
    vertices in win2 and makes every reachable cycle strictly negative.
    """
    if g.k != 1:
        raise ModelError("solve_mp1 needs a one-dimensional game")
    measure = lift_fixpoint(g)
    win1 = frozenset(v for v in g.vertices if measure.value[v] is not None)
    win2 = frozenset(v for v in g.vertices if v not in win1)
    sigma1 = sigma1_from_measure(g, measure)

    dual = dual_game(g)
    dual_measure = lift_fixpoint(dual)
    dual_win1 = frozenset(v for v in dual.vertices if dual_measure.value[v] is not None)
    if dual_win1 != win2:
        raise InvariantError("determinacy breach: dual winning region != complement")
    sigma2 = sigma1_from_measure(dual, dual_measure)
    return win1, win2, sigma1, sigma2


def solve_mp1_strict(g: GameGraph) -> Tuple[FrozenSet[str], FrozenSet[str], Dict[str, str], Dict[str, str]]:
    """Threshold > 0 via the weight shift w -> n*w - 1 (integer cycles have
    weight > 0 iff the shifted cycle weight is >= 0)."""
    if g.k != 1:
        raise ModelError("solve_mp1_strict needs a one-dimensional game")
    n = g.n
    verts = [(v, g.owner(v)) for v in g.vertices]
    edges = [(e.src, e.dst, (n * e.w[0] - 1,)) for e in g.edges]
    shifted = build_game(1, verts, edges)
    return solve_mp1(shifted)
