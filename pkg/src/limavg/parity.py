"""Parity games with priorities on edges.

Player 1 wins a play when the minimum priority occurring infinitely often is
even. The reference solver is the classic recursion on a derived game where
each edge is split through an intermediate vertex carrying the edge's
priority (original vertices get a neutral priority above everything, which
can never be the infinitely-recurring minimum because intermediates are
visited at least as often).

Also here: the translations into mean-payoff form, one per-priority
dimension (weights 0 / -1 / n) and one single-dimension exponential
(weights (-n)^p), plus the specific scalarizing vector that witnesses a
player-2 parity win inside the multidimensional translation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from .core import (
    Edge,
    GameGraph,
    InvariantError,
    ModelError,
    P1,
    P2,
    attractor_with_strategy,
    parse_game,
    reachable_from,
    restrict_strategy,
    subgame,
)
from .mmpg import enumerate_simple_cycles


@dataclass(frozen=True)
class ParityGame:
    graph: GameGraph

    def __post_init__(self):
        self.graph.require_total()
        for e in self.graph.edges:
            if e.p is None:
                raise ModelError("parity edge %r -> %r lacks a priority" % (e.src, e.dst))

    @property
    def kp(self) -> int:
        return max(e.p for e in self.graph.edges)

    @property
    def n(self) -> int:
        return self.graph.n


def parse_parity(text: str) -> ParityGame:
    return ParityGame(parse_game(text))


# ---------------------------------------------------------------------------
# Reference solver


def _split_game(P: ParityGame) -> Tuple[GameGraph, Dict[str, int]]:
    """Edge-split derived game with vertex priorities; intermediates are
    single-successor (owner choice immaterial, P2 by convention)."""
    g = P.graph
    neutral = P.kp + 1
    verts: List[Tuple[str, int]] = [(v, g.owner(v)) for v in g.vertices]
    edges: List[Tuple[str, str, Tuple[int, ...]]] = []
    prio: Dict[str, int] = {v: neutral for v in g.vertices}
    for e in g.edges:
        mid = "__e:%s:%s" % (e.src, e.dst)
        verts.append((mid, P2))
        prio[mid] = e.p
        edges.append((e.src, mid, ()))
        edges.append((mid, e.dst, ()))
    split = GameGraph(0, verts, [Edge(s, d, w, None) for s, d, w in edges])
    return split, prio


def _zielonka_rec(g: GameGraph, prio: Dict[str, int]):
    """Standard recursion on a vertex-priority min-parity game.
    Returns (win1, win2, sigma1, sigma2) with strategies on own winning
    regions only."""
    if g.n == 0:
        return frozenset(), frozenset(), {}, {}
    m = min(prio[v] for v in g.vertices)
    player = P1 if m % 2 == 0 else P2
    opponent = P2 if player == P1 else P1
    target = [v for v in g.vertices if prio[v] == m]
    A, attr_strat = attractor_with_strategy(g, player, target)
    rest = subgame(g, frozenset(g.vertices) - A, require_total=True) if len(A) < g.n else None
    if rest is None:
        w1_, w2_, s1_, s2_ = frozenset(), frozenset(), {}, {}
    else:
        w1_, w2_, s1_, s2_ = _zielonka_rec(rest, prio)
    w_opp_sub = w2_ if player == P1 else w1_
    if not w_opp_sub:
        # player wins everywhere: attractor pull + subgame strategy + free
        # choice on the minimal-priority vertices themselves
        sigma_pl: Dict[str, str] = {}
        sigma_pl.update(s1_ if player == P1 else s2_)
        sigma_pl.update(attr_strat)
        for v in target:
            if g.owner(v) == player and v not in sigma_pl:
                sigma_pl[v] = g.out[v][0].dst
        win = frozenset(g.vertices)
        if player == P1:
            return win, frozenset(), sigma_pl, {}
        return frozenset(), win, {}, sigma_pl
    B, battr = attractor_with_strategy(g, opponent, w_opp_sub)
    rest2 = subgame(g, frozenset(g.vertices) - B, require_total=True) if len(B) < g.n else None
    if rest2 is None:
        w1__, w2__, s1__, s2__ = frozenset(), frozenset(), {}, {}
    else:
        w1__, w2__, s1__, s2__ = _zielonka_rec(rest2, prio)
    sigma_opp: Dict[str, str] = {}
    sigma_opp.update(s2_ if player == P1 else s1_)   # inside their subgame region
    sigma_opp.update(battr)                          # pull towards it
    sigma_opp.update(s2__ if player == P1 else s1__)  # their region of the second recursion
    win_opp = B | (w2__ if player == P1 else w1__)
    win_pl = frozenset(g.vertices) - win_opp
    sigma_pl = dict(s1__ if player == P1 else s2__)
    if player == P1:
        return win_pl, win_opp, sigma_pl, sigma_opp
    return win_opp, win_pl, sigma_opp, sigma_pl


def _verify_parity_strategy(P: ParityGame, region: FrozenSet[str], sigma: Dict[str, str], player: int) -> None:
    """All cycles reachable from the region under the fixed strategy must
    have a minimum priority of the player's parity."""
    if not region:
        return
    g = restrict_strategy(P.graph, player, sigma)
    reach = set()
    for v in region:
        reach |= reachable_from(g, v)
    h = subgame(g, reach, require_total=False)
    want_even = player == P1
    for cyc in enumerate_simple_cycles(h, 200000):
        mp = min(e.p for e in cyc)
        if (mp % 2 == 0) != want_even:
            raise InvariantError(
                "strategy verification failed: cycle with minimum priority %d "
                "reachable from a player-%d region" % (mp, player)
            )


def zielonka(P: ParityGame) -> Tuple[FrozenSet[str], FrozenSet[str], Dict[str, str], Dict[str, str]]:
    """Winning regions over the original vertices, with verified memoryless
    strategies (mapped back from the edge-split derived game)."""
    split, prio = _split_game(P)
    w1, w2, s1, s2 = _zielonka_rec(split, prio)
    originals = set(P.graph.vertices)
    win1 = frozenset(v for v in w1 if v in originals)
    win2 = frozenset(v for v in w2 if v in originals)
    if win1 | win2 != frozenset(originals):
        raise InvariantError("parity regions do not partition the vertices")

    def back(sig: Dict[str, str]) -> Dict[str, str]:
        out: Dict[str, str] = {}
        for v, mid in sig.items():
            if v not in originals:
                continue
            if mid.startswith("__e:"):
                out[v] = mid.split(":", 2)[2]
            else:
                out[v] = mid
        return out

    sigma1 = {v: u for v, u in back(s1).items() if v in win1 and P.graph.owner(v) == P1}
    sigma2 = {v: u for v, u in back(s2).items() if v in win2 and P.graph.owner(v) == P2}
    # every owned vertex of a winning region needs a choice
    for v in win1:
        if P.graph.owner(v) == P1 and v not in sigma1:
            raise InvariantError("missing player-1 choice at %r" % v)
    for v in win2:
        if P.graph.owner(v) == P2 and v not in sigma2:
            raise InvariantError("missing player-2 choice at %r" % v)
    _verify_parity_strategy(P, win1, sigma1, P1)
    _verify_parity_strategy(P, win2, sigma2, P2)
    return win1, win2, sigma1, sigma2


# ---------------------------------------------------------------------------
# Translations


def parity_to_mmpg(P: ParityGame) -> GameGraph:
    """Same arena, one weight dimension per priority level: dimension i
    (1-based) gives an edge 0 if its priority exceeds i, -1 if the priority
    is odd, and n if it is even. A cycle is coordinatewise good exactly when
    its minimum priority is even."""
    g = P.graph
    k = P.kp
    n = g.n
    edges = []
    for e in g.edges:
        w = []
        for i in range(1, k + 1):
            if e.p > i:
                w.append(0)
            elif e.p % 2 == 1:
                w.append(-1)
            else:
                w.append(n)
        edges.append(Edge(e.src, e.dst, tuple(w), None))
    return GameGraph(k, [(v, g.owner(v)) for v in g.vertices], edges)


def player2_parity_lambda(P: ParityGame) -> Tuple[int, ...]:
    """The scalarizer (l^(k-1), ..., l, 1) with l = n^2: when player 2 wins
    the parity game, this vector already separates inside the
    multidimensional translation."""
    ell = P.n ** 2
    k = P.kp
    return tuple(ell ** (k - 1 - i) for i in range(k))


def parity_to_mp1(P: ParityGame) -> GameGraph:
    """Single-dimension translation with weight (-n)^p, arbitrary precision.

    A cycle's sum is dominated by its largest priority (magnitude n^p beats
    any n-1 edges of lower priority), so the sum is positive exactly when the
    maximal priority on the cycle is even. Threshold solving on this image
    therefore decides the game in which the parity of the *maximal*
    recurring priority wins; it is the classic exponential-weight
    translation, not an alternative route to the minimal-priority winner
    computed by zielonka()."""
    g = P.graph
    n = g.n
    edges = [Edge(e.src, e.dst, ((-n) ** e.p,), None) for e in g.edges]
    return GameGraph(1, [(v, g.owner(v)) for v in g.vertices], edges)
