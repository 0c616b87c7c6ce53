"""Certificate documents and their independent checking.

Every definitive answer the command line emits travels with a JSON
certificate, and this module is the sole judge of those documents. A
checker works from the model text plus the certificate alone: it
re-parses the model, rebuilds whatever derived structure the claim
mentions, and tests the claim with the arena primitives and exact
rational arithmetic. Nothing here imports the solving modules, so a
solver and its checker agreeing means two independent computations
matched.

Certificate kinds:

* ``mp1``, ``parity``, ``mmpg``: winning-region partitions of finite
  games, backed by positional strategies on both sides (plus, in the
  vector-payoff case, separating directions per component and convex
  cycle combinations per opposing strategy).
* ``wps-yes``, ``wps-no``: pushdown limit-average claims, backed by
  pumpable path pairs with linking runs, or by per-head separating
  directions.
* ``wrg-modular-p1``, ``wrg-modular-p2``: modular winners of recursive
  game graphs, backed by an exit signature with local strategies, or
  by a refuted walk over the whole signature space.
* ``wrg-brute-p1``, ``wrg-brute-p2``: the enumerating oracle's
  verdicts, backed by a strategy that withstands the refutation
  search, or by one validated refutation per strategy.

A checker accepts by returning and rejects by raising ``_Reject``;
structural nonsense inside a certificate lands on the same rejection
path. Broken *model* text raises ``ModelError`` instead, so callers
can keep "your input is malformed" apart from "your evidence fails".
"""

from __future__ import annotations

import itertools
import json
from contextlib import contextmanager
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from .core import (
    Edge,
    GameGraph,
    ModelError,
    P1,
    P2,
    find_nonnegative_cycle,
    parse_game,
    reachable_from,
    restrict_strategy,
    scalarize,
    strongly_connected_components,
    subgame,
    transform_assumptions,
)

__all__ = ["CERT_KINDS", "verify_certificate"]


class _Reject(Exception):
    """A certificate failed; the message is the reason."""


@contextmanager
def _guard() -> Iterator[None]:
    """Turn structural surprises inside a checker body (missing keys,
    wrong JSON types, stray values) into rejection. Model problems are
    parsed before entering the guard, so an error in here is
    certificate-induced."""
    try:
        yield
    except _Reject:
        raise
    except (ModelError, KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        raise _Reject("malformed certificate: %s" % exc) from None


def _req(cond: bool, reason: str) -> None:
    if not cond:
        raise _Reject(reason)


def _is_int(x: object) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _int(raw: object, what: str) -> int:
    _req(_is_int(raw), "%s must be an integer" % what)
    return raw  # type: ignore[return-value]


def _str(raw: object, what: str) -> str:
    _req(isinstance(raw, str), "%s must be a string" % what)
    return raw  # type: ignore[return-value]


def _frac(raw: object, what: str) -> Fraction:
    _req(isinstance(raw, list) and len(raw) == 2,
         "%s must be a [numerator, denominator] pair" % what)
    num, den = raw  # type: ignore[misc]
    _req(_is_int(num) and _is_int(den), "%s entries must be integers" % what)
    _req(den >= 1, "%s denominator must be >= 1" % what)
    return Fraction(num, den)


def _str_map(raw: object, what: str) -> Dict[str, str]:
    _req(isinstance(raw, dict), "%s must be an object" % what)
    out: Dict[str, str] = {}
    for key, val in raw.items():  # type: ignore[union-attr]
        out[_str(key, what + " key")] = _str(val, what + " value")
    return out


def _str_list(raw: object, what: str) -> List[str]:
    _req(isinstance(raw, list), "%s must be a list" % what)
    return [_str(x, what + " entry") for x in raw]  # type: ignore[union-attr]


# ---------------------------------------------------------------------------
# Finite games: shared pieces


def _partition(g: GameGraph, cert: Mapping) -> Tuple[Set[str], Set[str]]:
    win1 = _str_list(cert["win1"], "win1")
    win2 = _str_list(cert["win2"], "win2")
    s1, s2 = set(win1), set(win2)
    _req(len(s1) == len(win1) and len(s2) == len(win2),
         "winning regions repeat a vertex")
    _req(not (s1 & s2), "winning regions overlap")
    _req(s1 | s2 == set(g.vertices), "winning regions do not cover the arena")
    return s1, s2


def _closed_region(g: GameGraph, region: Set[str], player: int,
                   sigma: Mapping[str, str], label: str) -> Dict[str, str]:
    """The region must be closed when `player` follows sigma and the
    opponent moves freely; returns sigma filtered to the region."""
    kept: Dict[str, str] = {}
    for v in sorted(region):
        if g.owner(v) == player:
            dst = sigma.get(v)
            _req(dst is not None, "%s names no move at %r" % (label, v))
            _req(g.has_edge(v, dst), "%s uses a missing edge %r -> %r" % (label, v, dst))
            _req(dst in region, "%s leaves the region at %r" % (label, v))
            kept[v] = dst
        else:
            for e in g.out[v]:
                _req(e.dst in region, "the %s region is open at %r" % (label, v))
    return kept


def _has_negative_cycle(g: GameGraph) -> bool:
    """Scalar-weight test used on strategy-restricted subgraphs."""
    verts = list(g.vertices)
    if not verts:
        return False
    dist = {v: 0 for v in verts}
    for _ in range(len(verts)):
        changed = False
        for v in verts:
            for e in g.out[v]:
                alt = dist[v] + e.w[0]
                if alt < dist[e.dst]:
                    dist[e.dst] = alt
                    changed = True
        if not changed:
            return False
    return True


# ---------------------------------------------------------------------------
# kind "mp1"


def _check_mp1(model_text: str, cert: Mapping) -> None:
    """Partition plus positional strategies; each side is validated by
    closure and by the cycle signs of its strategy-restricted
    subgraph."""
    g = parse_game(model_text)
    g.require_total()
    if g.k != 1:
        raise ModelError("a one-dimensional certificate needs k=1, got k=%d" % g.k)
    with _guard():
        win1, win2 = _partition(g, cert)
        s1 = _closed_region(g, win1, P1, _str_map(cert["sigma1"], "sigma1"), "sigma1")
        s2 = _closed_region(g, win2, P2, _str_map(cert["sigma2"], "sigma2"), "sigma2")
        if win1:
            h1 = subgame(restrict_strategy(g, P1, s1), win1, require_total=False)
            _req(not _has_negative_cycle(h1),
                 "a negative cycle survives the player-1 strategy")
        if win2:
            h2 = subgame(restrict_strategy(g, P2, s2), win2, require_total=False)
            _req(find_nonnegative_cycle(h2) is None,
                 "a nonnegative cycle survives the player-2 strategy")


# ---------------------------------------------------------------------------
# kind "parity"


def _parity_offender(sub: GameGraph, bad_parity: int) -> Optional[int]:
    """Least priority p of the given parity such that some cycle of
    `sub` has minimal priority exactly p; None when no such cycle
    exists. Works per candidate p on the subgraph of edges with
    priority >= p: a cycle with minimum p survives there iff a p-edge
    connects inside one strongly connected component."""
    edges = [e for v in sub.vertices for e in sub.out[v]]
    for p in sorted({e.p for e in edges}):
        if p % 2 != bad_parity:
            continue
        hi = [e for e in edges if e.p >= p]
        succ: Dict[str, List[Tuple[str, int]]] = {v: [] for v in sub.vertices}
        for e in hi:
            succ[e.src].append((e.dst, 0))
        for comp in strongly_connected_components(succ):
            cset = set(comp)
            for e in hi:
                if e.p == p and e.src in cset and e.dst in cset:
                    return p
    return None


def _check_parity(model_text: str, cert: Mapping) -> None:
    g = parse_game(model_text)
    g.require_total()
    for v in g.vertices:
        for e in g.out[v]:
            if e.p is None:
                raise ModelError("edge %r -> %r carries no priority" % (e.src, e.dst))
    with _guard():
        win1, win2 = _partition(g, cert)
        s1 = _closed_region(g, win1, P1, _str_map(cert["sigma1"], "sigma1"), "sigma1")
        s2 = _closed_region(g, win2, P2, _str_map(cert["sigma2"], "sigma2"), "sigma2")
        if win1:
            sub1 = subgame(restrict_strategy(g, P1, s1), win1, require_total=False)
            p = _parity_offender(sub1, 1)
            _req(p is None, "a cycle of minimal odd priority %s survives sigma1" % p)
        if win2:
            sub2 = subgame(restrict_strategy(g, P2, s2), win2, require_total=False)
            p = _parity_offender(sub2, 0)
            _req(p is None, "a cycle of minimal even priority %s survives sigma2" % p)


# ---------------------------------------------------------------------------
# kind "mmpg"


_MMPG_PRODUCT_GUARD = 300_000


def _cycle_weight(gs: GameGraph, cyc: Sequence[str]) -> Tuple[int, ...]:
    total = [0] * gs.k
    for i in range(len(cyc) - 1):
        u, v = cyc[i], cyc[i + 1]
        _req(gs.has_edge(u, v), "cycle uses a missing edge %r -> %r" % (u, v))
        w = gs.edge(u, v).w
        for d in range(gs.k):
            total[d] += w[d]
    return tuple(total)


def _check_mmpg(model_text: str, cert: Mapping) -> None:
    """Vector-payoff partition.

    Player-2 side: a positional spoiling strategy on win2 plus one
    nonnegative, nonzero direction per strongly connected component of
    the restricted region; every cycle inside a component must be
    strictly negative against its direction, which kills a nonnegative
    limit in all coordinates at once (the set of vertices a play visits
    forever is strongly connected, hence inside one component).

    Player-1 side: the claim is transported to the arena in which the
    standing assumptions are folded in as explicit moves
    (transform_assumptions); the certificate lists the surviving
    vertex set there and, for every positional opposing strategy of
    the closed survivor subgame, a convex combination of reachable
    cycle weights that is componentwise nonnegative for every
    survivor. By linear-programming duality such combinations are
    exactly what rules out a separating hyperplane, and their
    region-universal existence is the winning criterion.
    """
    g = parse_game(model_text)
    g.require_total()
    k = g.k
    with _guard():
        win1, win2 = _partition(g, cert)

        p2doc = cert["p2"]
        s2 = _closed_region(g, win2, P2, _str_map(p2doc["sigma2"], "p2.sigma2"),
                            "p2.sigma2")
        if win2:
            h2 = subgame(restrict_strategy(g, P2, s2), win2, require_total=False)
            succ = {v: [(e.dst, 0) for e in h2.out[v]] for v in h2.vertices}
            comps = strongly_connected_components(succ)
            entries = p2doc["components"]
            _req(isinstance(entries, list) and len(entries) == len(comps),
                 "expected %d component entries" % len(comps))
            by_set: Dict[frozenset, object] = {}
            for entry in entries:
                vs = frozenset(_str_list(entry["vertices"], "component vertices"))
                _req(vs not in by_set, "component listed twice")
                by_set[vs] = entry["lambda"]
            for comp in comps:
                lam_doc = by_set.get(frozenset(comp))
                _req(lam_doc is not None,
                     "no direction for the component containing %r" % comp[0])
                lam = [_int(x, "direction entry") for x in lam_doc]  # type: ignore[union-attr]
                _req(len(lam) == k and all(x >= 0 for x in lam) and any(x > 0 for x in lam),
                     "directions must be nonnegative, nonzero, length k")
                part = subgame(h2, comp, require_total=False)
                _req(find_nonnegative_cycle(scalarize(part, lam)) is None,
                     "a cycle resists the direction on the component of %r" % comp[0])

        p1doc = cert["p1"]
        survivors = _str_list(p1doc["survivors"], "survivors")
        sset = set(survivors)
        _req(len(sset) == len(survivors), "survivors repeat a vertex")
        ht = transform_assumptions(g)
        _req(sset <= set(ht.vertices), "survivors name unknown vertices")
        _req(sset & set(g.vertices) == win1,
             "survivors disagree with win1 on the original vertices")
        for v in sorted(sset):
            if ht.owner(v) == P2:
                for e in ht.out[v]:
                    _req(e.dst in sset, "the survivor set is open at %r" % v)
        strategies = p1doc["strategies"]
        _req(isinstance(strategies, list), "p1.strategies must be a list")
        if not sset:
            _req(not win1, "empty survivor set claims a nonempty win1")
            _req(len(strategies) == 1, "the empty subgame has one opposing strategy")
            entry = strategies[0]
            _req(_str_map(entry["sigma2"], "sigma2") == {}
                 and entry["witnesses"] == {},
                 "the empty-survivor entry must carry no data")
            return
        sub = subgame(ht, sset, require_total=True)
        pverts = sorted(v for v in sub.vertices if sub.owner(v) == P2)
        options = [[e.dst for e in sub.out[v]] for v in pverts]
        count = 1
        for opts in options:
            count *= len(opts)
            _req(count <= _MMPG_PRODUCT_GUARD,
                 "opposing strategy space above the checking guard")
        _req(len(strategies) == count,
             "expected %d opposing strategies, certificate lists %d"
             % (count, len(strategies)))
        for combo, entry in zip(itertools.product(*options), strategies):
            sigma = dict(zip(pverts, combo))
            _req(_str_map(entry["sigma2"], "sigma2") == sigma,
                 "opposing strategies out of order")
            gs = restrict_strategy(sub, P2, sigma)
            wits = entry["witnesses"]
            _req(isinstance(wits, dict), "witnesses must be an object")
            for v in sorted(sset):
                wit = wits.get(v)
                _req(wit is not None, "no witness for %r" % v)
                cycles = wit["cycles"]
                coeffs = [_frac(c, "coefficient") for c in wit["coeffs"]]
                _req(isinstance(cycles, list) and len(cycles) == len(coeffs)
                     and len(cycles) >= 1,
                     "witness for %r needs matching cycles and coefficients" % v)
                _req(all(c >= 0 for c in coeffs) and sum(coeffs) == 1,
                     "coefficients must form a convex combination")
                reach = reachable_from(gs, v)
                total = [Fraction(0)] * k
                for cyc_doc, c in zip(cycles, coeffs):
                    cyc = _str_list(cyc_doc, "cycle")
                    _req(len(cyc) >= 2 and cyc[0] == cyc[-1],
                         "cycles are closed vertex walks")
                    _req(any(u in reach for u in cyc),
                         "cycle not reachable from %r" % v)
                    w = _cycle_weight(gs, cyc)
                    for d in range(k):
                        total[d] += c * w[d]
                _req(all(t >= 0 for t in total),
                     "the combination for %r dips below zero" % v)


# ---------------------------------------------------------------------------
# Pushdown systems: model mirror


_WPS_BOT = "bot"
_WPS_SKIP = ("skip",)
_WPS_POP = ("pop",)

_WpsTr = Tuple[str, str, str, Tuple[str, ...], Tuple[int, ...]]


def _wps_transition(raw: object, k: int, states: Sequence[str],
                    alphabet: Sequence[str]) -> _WpsTr:
    if not isinstance(raw, dict):
        raise ModelError("transitions must be objects")
    src = raw.get("from")
    top = raw.get("top")
    dst = raw.get("to")
    if src not in states or dst not in states:
        raise ModelError("transition endpoint unknown: %r" % (raw,))
    if top not in alphabet:
        raise ModelError("transition top symbol unknown: %r" % (raw,))
    cmd_raw = raw.get("cmd")
    if cmd_raw == "skip":
        cmd: Tuple[str, ...] = _WPS_SKIP
    elif cmd_raw == "pop":
        if top == _WPS_BOT:
            raise ModelError("the bottom symbol cannot be popped")
        cmd = _WPS_POP
    elif (isinstance(cmd_raw, dict) and set(cmd_raw) == {"push"}
          and isinstance(cmd_raw.get("push"), str)):
        sym = cmd_raw["push"]
        if sym == _WPS_BOT or sym not in alphabet:
            raise ModelError("pushed symbol unknown or reserved: %r" % sym)
        cmd = ("push", sym)
    else:
        raise ModelError("unknown cmd %r" % (cmd_raw,))
    w_raw = raw.get("w")
    if (not isinstance(w_raw, list) or len(w_raw) != k
            or not all(isinstance(c, int) for c in w_raw)):
        raise ModelError("transition weight must be a length-%d integer list" % k)
    return (src, top, dst, cmd, tuple(w_raw))


def _wps_model(model_text: str):
    try:
        doc = json.loads(model_text)
    except json.JSONDecodeError as exc:
        raise ModelError("invalid JSON: %s" % exc) from None
    if not isinstance(doc, dict):
        raise ModelError("top level must be an object")
    k = doc.get("k")
    if not _is_int(k) or k < 1:
        raise ModelError("weight dimension must be >= 1")
    states = doc.get("states")
    alphabet = doc.get("alphabet")
    if (not isinstance(states, list) or not states
            or not all(isinstance(q, str) for q in states)):
        raise ModelError("states must be a nonempty list of names")
    if not isinstance(alphabet, list) or not all(isinstance(a, str) for a in alphabet):
        raise ModelError("alphabet must be a list of symbols")
    if len(set(states)) != len(states) or len(set(alphabet)) != len(alphabet):
        raise ModelError("states and alphabet entries must be distinct")
    if _WPS_BOT not in alphabet:
        raise ModelError('alphabet must contain "%s"' % _WPS_BOT)
    initial = doc.get("initial")
    if initial not in states:
        raise ModelError("initial state %r unknown" % (initial,))
    raw_ts = doc.get("transitions")
    if not isinstance(raw_ts, list):
        raise ModelError("transitions must be a list")
    trans = [_wps_transition(raw, k, states, alphabet) for raw in raw_ts]
    return k, tuple(states), tuple(alphabet), initial, trans


def _wps_augment(k: int, states: Sequence[str], alphabet: Sequence[str],
                 trans: Sequence[_WpsTr]) -> List[_WpsTr]:
    """The transition universe certificates run in: the model plus one
    -1 skip self-loop per state, symbol, and dimension (deduplicated),
    matching the self-loop closure the deciders work on."""
    seen = set(trans)
    out = list(trans)
    for q in states:
        for a in alphabet:
            for d in range(k):
                w = tuple(-1 if i == d else 0 for i in range(k))
                t: _WpsTr = (q, a, q, _WPS_SKIP, w)
                if t not in seen:
                    seen.add(t)
                    out.append(t)
    return out


def _wps_heads(states: Sequence[str], alphabet: Sequence[str], initial: str,
               trans: Sequence[_WpsTr]) -> Set[Tuple[str, str]]:
    """Reachable (top symbol, state) heads, by same-level closure
    saturation plus push closure."""
    sl: Set[Tuple[str, str, str]] = {(q, a, q) for q in states for a in alphabet}
    skip: Dict[Tuple[str, str], Set[str]] = {}
    pushes: Dict[Tuple[str, str], Set[Tuple[str, str]]] = {}
    pops: Dict[Tuple[str, str], Set[str]] = {}
    for (src, top, dst, cmd, _w) in trans:
        if cmd == _WPS_SKIP:
            skip.setdefault((src, top), set()).add(dst)
        elif cmd == _WPS_POP:
            pops.setdefault((src, top), set()).add(dst)
        else:
            pushes.setdefault((src, top), set()).add((dst, cmd[1]))
    changed = True
    while changed:
        changed = False
        new = set()
        for (a, sym, b) in sl:
            for c in skip.get((b, sym), ()):
                if (a, sym, c) not in sl:
                    new.add((a, sym, c))
            for (x, z) in pushes.get((b, sym), ()):
                for trip in sl:
                    if trip[0] != x or trip[1] != z:
                        continue
                    for c in pops.get((trip[2], z), ()):
                        if (a, sym, c) not in sl:
                            new.add((a, sym, c))
        if new:
            sl |= new
            changed = True
    heads: Set[Tuple[str, str]] = {(_WPS_BOT, initial)}
    changed = True
    while changed:
        changed = False
        for (sym, q) in list(heads):
            for (a, sym2, b) in sl:
                if sym2 == sym and a == q and (sym, b) not in heads:
                    heads.add((sym, b))
                    changed = True
            for (x, z) in pushes.get((q, sym), ()):
                if (z, x) not in heads:
                    heads.add((z, x))
                    changed = True
    return heads


def _wps_head(raw: object, states: Sequence[str], alphabet: Sequence[str]
              ) -> Tuple[str, str]:
    _req(isinstance(raw, list) and len(raw) == 2
         and all(isinstance(x, str) for x in raw),
         "a head is a [symbol, state] pair")
    sym, q = raw  # type: ignore[misc]
    _req(sym in alphabet and q in states, "head names unknown symbol or state")
    return sym, q


def _wps_canonical(head: Tuple[str, str]) -> Tuple[str, Tuple[str, ...]]:
    """Shortest configuration exposing a head: state over "bot", or
    state over "bot" plus one symbol."""
    sym, q = head
    stack = (_WPS_BOT,) if sym == _WPS_BOT else (_WPS_BOT, sym)
    return q, stack


def _wps_cert_transition(raw: object, k: int, universe: Set[_WpsTr],
                         states: Sequence[str], alphabet: Sequence[str],
                         what: str) -> _WpsTr:
    with _guard():
        t = _wps_transition(raw, k, states, alphabet)
    _req(t in universe, "%s uses a transition outside the system" % what)
    return t


def _wps_replay(q: str, stack: Tuple[str, ...], path: Sequence[_WpsTr],
                what: str) -> Tuple[str, Tuple[str, ...]]:
    """Replay with a hard floor: the stack never gets shorter than it
    started, so the run is insensitive to whatever sits below its
    starting top. Transitions are assumed pre-checked for membership."""
    floor = len(stack)
    for (src, top, dst, cmd, _w) in path:
        _req(src == q, "%s expects state %r but sits in %r" % (what, src, q))
        _req(bool(stack) and stack[-1] == top,
             "%s reads top %r but the stack shows %r"
             % (what, top, stack[-1] if stack else None))
        if cmd == _WPS_POP:
            _req(len(stack) > floor, "%s pops below its floor" % what)
            stack = stack[:-1]
        elif cmd != _WPS_SKIP:
            stack = stack + (cmd[1],)
        q = dst
    return q, stack


def _wps_path_weight(path: Sequence[_WpsTr], k: int) -> List[int]:
    total = [0] * k
    for t in path:
        for d in range(k):
            total[d] += t[4][d]
    return total


def _wps_row(universe: Set[_WpsTr], k: int, states: Sequence[str],
             alphabet: Sequence[str], head: Tuple[str, str],
             row: Mapping) -> Tuple[Fraction, ...]:
    """Validate one pumpable-row entry against the decided head and
    return its weight vector.

    The row ships a host path from its own minimal start configuration,
    two anchored segments inside it, and two linking runs: one from the
    decided head to the host's start head, one from the host's end head
    back to the decided head. Checked here: the host and its pumped
    variants (segment repetition 0, 2, and 3) replay without dipping
    below the start height, repetition does not move the end head, the
    row weight is a positive rational multiple of the combined segment
    weight, and the links land where they claim. Repetition counts
    beyond 3 and the transfer from the self-loop-augmented system back
    to the original are taken on faith; both are exercised against the
    depth-bounded oracle by the test suite.
    """
    w = [_frac(c, "row weight") for c in row["w"]]
    _req(len(w) == k, "row weight must have length k")
    host = row["host"]
    q0 = _str(host["state"], "host state")
    stack = tuple(_str(s, "host stack symbol") for s in host["stack"])
    path = [_wps_cert_transition(t, k, universe, states, alphabet, "host path")
            for t in host["path"]]
    if stack == (_WPS_BOT,):
        start = (_WPS_BOT, q0)
    else:
        _req(len(stack) == 2 and stack[0] == _WPS_BOT and stack[1] != _WPS_BOT,
             "host stack must be a minimal head configuration")
        start = (stack[1], q0)
    anchors = row["anchors"]
    _req(isinstance(anchors, list) and len(anchors) == 4,
         "anchors must be [a1, b1, a2, b2]")
    a1, b1, a2, b2 = (_int(x, "anchor") for x in anchors)
    n = len(path)
    _req(0 <= a1 <= b1 <= a2 <= b2 <= n, "anchors out of order")
    _req((b1 - a1) + (b2 - a2) >= 1, "the pumped segments are empty")
    qe, ste = _wps_replay(q0, stack, path, "host path")
    end = (ste[-1], qe)
    ptot = _wps_path_weight(path[a1:b1] + path[a2:b2], k)
    if all(c == 0 for c in ptot):
        _req(all(c == 0 for c in w),
             "row weight must be proportional to the segment weight")
    else:
        scale: Optional[Fraction] = None
        for d in range(k):
            if ptot[d] != 0:
                scale = w[d] / ptot[d]
                break
        _req(scale is not None and scale > 0,
             "row weight must be a positive multiple of the segment weight")
        for d in range(k):
            _req(w[d] == scale * ptot[d],
                 "row weight must be proportional to the segment weight")
    for j in (0, 2, 3):
        pumped = (path[:a1] + path[a1:b1] * j + path[b1:a2]
                  + path[a2:b2] * j + path[b2:])
        qj, stj = _wps_replay(q0, stack, pumped, "pumped path")
        if j >= 2:
            _req((stj[-1], qj) == end, "pumping moves the end head")
    to = [_wps_cert_transition(t, k, universe, states, alphabet, "approach path")
          for t in row["to"]]
    back = [_wps_cert_transition(t, k, universe, states, alphabet, "return path")
            for t in row["back"]]
    hq, hstack = _wps_canonical(head)
    qt, stt = _wps_replay(hq, hstack, to, "approach path")
    _req((stt[-1], qt) == start, "approach path misses the row's start head")
    eq, estack = _wps_canonical(end)
    qb, stb = _wps_replay(eq, estack, back, "return path")
    _req((stb[-1], qb) == head, "return path misses the decided head")
    return tuple(w)


# ---------------------------------------------------------------------------
# kind "wps-yes"


def _check_wps_yes(model_text: str, cert: Mapping) -> None:
    """A head from which runs of nonnegative limit average exist, shown
    by pumpable path pairs whose weights combine nonnegatively. Scope
    "system" additionally requires the head to be reachable from the
    initial configuration; scope "head" certifies the head-local
    claim only."""
    k, states, alphabet, initial, trans = _wps_model(model_text)
    with _guard():
        universe = set(_wps_augment(k, states, alphabet, trans))
        scope = cert["scope"]
        _req(scope in ("system", "head"), 'scope must be "system" or "head"')
        head = _wps_head(cert["head"], states, alphabet)
        if scope == "system":
            _req(head in _wps_heads(states, alphabet, initial, trans),
                 "the decided head is not reachable from the initial configuration")
        rows = cert["rows"]
        _req(isinstance(rows, list) and len(rows) >= 1, "at least one row is needed")
        comb = [_frac(c, "combination entry") for c in cert["combination"]]
        _req(len(comb) == len(rows), "one combination entry per row")
        _req(all(c >= 0 for c in comb) and any(c > 0 for c in comb),
             "the combination must be nonnegative and nonzero")
        total = [Fraction(0)] * k
        for row, c in zip(rows, comb):
            w = _wps_row(universe, k, states, alphabet, head, row)
            for d in range(k):
                total[d] += c * w[d]
        _req(all(t >= 0 for t in total), "the combined direction dips below zero")


# ---------------------------------------------------------------------------
# kind "wps-no"


def _check_wps_no(model_text: str, cert: Mapping) -> None:
    """No head admits a nonnegative-limit run: every reachable head
    carries a strictly positive direction under which all its listed
    pumpable-pair weights are strictly negative. That the listed rows
    exhaust the pumping behaviors at each head is the search's
    completeness and is cross-checked against the depth-bounded oracle
    by the test suite, not re-derived here."""
    k, states, alphabet, initial, trans = _wps_model(model_text)
    with _guard():
        heads = _wps_heads(states, alphabet, initial, trans)
        entries = cert["heads"]
        _req(isinstance(entries, list), "heads must be a list")
        listed: Set[Tuple[str, str]] = set()
        for entry in entries:
            head = _wps_head(entry["head"], states, alphabet)
            _req(head not in listed, "head listed twice")
            listed.add(head)
            lam = [_int(x, "direction entry") for x in entry["lambda"]]
            _req(len(lam) == k and all(x >= 1 for x in lam),
                 "directions must be strictly positive integer vectors")
            rows = entry["rows"]
            _req(isinstance(rows, list), "rows must be a list")
            for raw in rows:
                _req(isinstance(raw, list) and len(raw) == k, "row arity mismatch")
                row = [_frac(x, "row entry") for x in raw]
                _req(sum(l * x for l, x in zip(lam, row)) < 0,
                     "a row resists its head's direction")
        missing = heads - listed
        _req(not missing,
             "no direction for reachable head %r" % (sorted(missing)[0],))


# ---------------------------------------------------------------------------
# Recursive game graphs: model mirror


_WRG_LOSE = "__lose__"
_WRG_RESERVED = "__"

_WrgSrc = object  # str | ("ret", box, exit)
_WrgDst = object  # str | ("call", box)


def _wrg_dst_key(dst) -> Tuple[int, str]:
    if isinstance(dst, str):
        return (0, dst)
    return (1, dst[1])


class _VMod:
    """Static view of one parsed module."""

    __slots__ = ("name", "entry", "exits", "nodes", "boxes", "transitions",
                 "owner", "box_map", "out")

    def __init__(self, name: str, entry: str, exits: Tuple[str, ...],
                 nodes: Tuple[Tuple[str, int], ...],
                 boxes: Tuple[Tuple[str, int, str], ...],
                 transitions: Tuple[Tuple[object, object, Tuple[int, ...]], ...]):
        self.name = name
        self.entry = entry
        self.exits = exits
        self.nodes = nodes
        self.boxes = boxes
        self.transitions = transitions
        self.owner = {v: o for v, o in nodes}
        self.box_map = {b: (o, c) for b, o, c in boxes}
        outs: Dict[object, List] = {}
        for t in transitions:
            outs.setdefault(t[0], []).append(t)
        self.out = {src: tuple(sorted(ts, key=lambda t: _wrg_dst_key(t[1])))
                    for src, ts in outs.items()}

    def outgoing(self, src) -> Tuple:
        return self.out.get(src, ())


def _wrg_transition(raw: object, k: int):
    if not isinstance(raw, dict):
        raise ModelError("transitions must be objects")
    src_raw = raw.get("src")
    dst_raw = raw.get("dst")
    w_raw = raw.get("w")
    if isinstance(src_raw, str):
        src: object = src_raw
    elif (isinstance(src_raw, list) and len(src_raw) == 2
          and all(isinstance(x, str) for x in src_raw)):
        if src_raw[1] == "en":
            raise ModelError("a transition cannot start at a box entrance")
        src = ("ret", src_raw[0], src_raw[1])
    else:
        raise ModelError("transition src must be a node id or [box, exit]")
    if isinstance(dst_raw, str):
        dst: object = dst_raw
    elif (isinstance(dst_raw, list) and len(dst_raw) == 2
          and all(isinstance(x, str) for x in dst_raw)):
        if dst_raw[1] != "en":
            raise ModelError('transitions into a box must target [box, "en"]')
        dst = ("call", dst_raw[0])
    else:
        raise ModelError('transition dst must be a node id or [box, "en"]')
    if isinstance(w_raw, bool):
        raise ModelError("transition weight must be an integer")
    if isinstance(w_raw, int):
        if k != 1:
            raise ModelError("scalar weight in a %d-dimensional game" % k)
        w: Tuple[int, ...] = (w_raw,)
    elif (isinstance(w_raw, list) and len(w_raw) == k
          and all(isinstance(c, int) and not isinstance(c, bool) for c in w_raw)):
        w = tuple(w_raw)
    else:
        raise ModelError("transition weight must be an int or a length-%d list" % k)
    return (src, dst, w)


def _wrg_src_key(src) -> Tuple[int, str, str]:
    if isinstance(src, str):
        return (0, src, "")
    return (1, src[1], src[2])


def _wrg_model(model_text: str):
    """Parse and validate the recursive-game document the same way the
    model layer does, as a tuple (k, modules, initial, by_name)."""
    try:
        doc = json.loads(model_text)
    except json.JSONDecodeError as exc:
        raise ModelError("invalid JSON: %s" % exc) from None
    if not isinstance(doc, dict):
        raise ModelError("top level must be an object")
    k = doc.get("k", 1)
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ModelError("weight dimension must be >= 1")
    raw_modules = doc.get("modules")
    if not isinstance(raw_modules, list) or not raw_modules:
        raise ModelError('"modules" must be a nonempty list')
    initial = doc.get("initial")
    if not isinstance(initial, str):
        raise ModelError('"initial" must name a module')
    mods: List[_VMod] = []
    for raw in raw_modules:
        if not isinstance(raw, dict):
            raise ModelError("each module must be an object")
        name = raw.get("name")
        entry = raw.get("entry")
        if not isinstance(name, str) or not isinstance(entry, str):
            raise ModelError("module name and entry must be strings")
        exits_raw = raw.get("exits", [])
        if not isinstance(exits_raw, list) or not all(isinstance(x, str) for x in exits_raw):
            raise ModelError("module %r exits must be a list of ids" % name)
        nodes_raw = raw.get("nodes", [])
        if not isinstance(nodes_raw, list):
            raise ModelError("module %r nodes must be a list" % name)
        nodes: List[Tuple[str, int]] = []
        for nr in nodes_raw:
            if (not isinstance(nr, dict) or not isinstance(nr.get("id"), str)
                    or isinstance(nr.get("owner"), bool)
                    or not isinstance(nr.get("owner"), int)):
                raise ModelError("module %r has a malformed node entry" % name)
            nodes.append((nr["id"], nr["owner"]))
        boxes_raw = raw.get("boxes", [])
        if not isinstance(boxes_raw, list):
            raise ModelError("module %r boxes must be a list" % name)
        boxes: List[Tuple[str, int, str]] = []
        for br in boxes_raw:
            if (not isinstance(br, dict) or not isinstance(br.get("id"), str)
                    or isinstance(br.get("owner"), bool)
                    or not isinstance(br.get("owner"), int)
                    or not isinstance(br.get("calls"), str)):
                raise ModelError("module %r has a malformed box entry" % name)
            boxes.append((br["id"], br["owner"], br["calls"]))
        trans_raw = raw.get("transitions", [])
        if not isinstance(trans_raw, list):
            raise ModelError("module %r transitions must be a list" % name)
        transitions = tuple(_wrg_transition(tr, k) for tr in trans_raw)
        mods.append(_VMod(name, entry, tuple(exits_raw), tuple(nodes),
                          tuple(boxes), transitions))
    _wrg_validate(k, mods, initial)
    return k, mods, initial, {m.name: m for m in mods}


def _wrg_validate(k: int, mods: Sequence[_VMod], initial: str) -> None:
    names = [m.name for m in mods]
    if len(set(names)) != len(names):
        raise ModelError("duplicate module names")
    if initial not in set(names):
        raise ModelError("initial module %r is not defined" % initial)
    by_name = {m.name: m for m in mods}
    seen_ids: Set[str] = set()
    for m in mods:
        for ident in [m.name] + [v for v, _ in m.nodes] + [b for b, _, _ in m.boxes]:
            if _WRG_RESERVED in ident:
                raise ModelError("id %r uses the reserved double underscore" % ident)
        for v, owner in m.nodes:
            if not v or owner not in (P1, P2):
                raise ModelError("module %r has a malformed node %r" % (m.name, v))
            if v in seen_ids:
                raise ModelError("id %r reused across modules" % v)
            seen_ids.add(v)
        for b, owner, callee in m.boxes:
            if not b or owner not in (P1, P2):
                raise ModelError("module %r has a malformed box %r" % (m.name, b))
            if b in seen_ids:
                raise ModelError("id %r reused across modules" % b)
            seen_ids.add(b)
            if callee not in by_name:
                raise ModelError("box %r calls unknown module %r" % (b, callee))
            if callee == initial:
                raise ModelError("box %r invokes the initial module" % b)
    for m in mods:
        node_ids = set(m.owner)
        exit_set = set(m.exits)
        if len(exit_set) != len(m.exits):
            raise ModelError("module %r repeats an exit" % m.name)
        if not exit_set <= node_ids:
            raise ModelError("module %r lists a non-node exit" % m.name)
        if m.entry not in node_ids:
            raise ModelError("module %r entry %r is not a node" % (m.name, m.entry))
        if m.entry in exit_set:
            raise ModelError("module %r entry cannot be an exit" % m.name)
        if m.name != initial and not m.exits:
            raise ModelError("non-initial module %r needs at least one exit" % m.name)
        seen_pairs = set()
        for src, dst, w in m.transitions:
            if isinstance(src, str):
                if src not in node_ids:
                    raise ModelError("module %r transition from unknown node %r"
                                     % (m.name, src))
                if src in exit_set:
                    raise ModelError("module %r has a transition out of exit %r"
                                     % (m.name, src))
            else:
                _tag, box, ex = src
                if box not in m.box_map:
                    raise ModelError("module %r transition from unknown return %r"
                                     % (m.name, (box, ex)))
                callee = m.box_map[box][1]
                if ex not in set(by_name[callee].exits):
                    raise ModelError("return (%r, %r) names no exit of callee %r"
                                     % (box, ex, callee))
            if isinstance(dst, str):
                if dst not in node_ids:
                    raise ModelError("module %r transition into unknown node %r"
                                     % (m.name, dst))
            else:
                if dst[1] not in m.box_map:
                    raise ModelError("module %r transition into unknown box %r"
                                     % (m.name, dst[1]))
            pair = (_wrg_src_key(src), _wrg_dst_key(dst))
            if pair in seen_pairs:
                raise ModelError("module %r has parallel transitions" % m.name)
            seen_pairs.add(pair)
        for v in sorted(node_ids - exit_set):
            if not m.outgoing(v):
                raise ModelError("module %r node %r has no outgoing transition"
                                 % (m.name, v))
        for b, _, callee in m.boxes:
            for ex in by_name[callee].exits:
                if not m.outgoing(("ret", b, ex)):
                    raise ModelError("module %r return (%r, %r) has no outgoing "
                                     "transition" % (m.name, b, ex))


def _wrg_prime(k: int, mods: Sequence[_VMod]) -> List[_VMod]:
    """The reentry augmentation: a fresh opening choice at each
    entrance (concede, or assert that this entrance closes a repeat of
    this module) and forwarding of callee assertions up the call
    chain. Derived ids cannot clash because model ids never contain a
    double underscore."""
    names = [m.name for m in mods]
    zero = (0,) * k
    out: List[_VMod] = []
    for m in mods:
        en2 = m.name + "__en"
        reent = [m.name + "__x__" + t for t in names]
        nodes2 = m.nodes + ((en2, P2),) + tuple((r, P1) for r in reent)
        exits2 = m.exits + tuple(reent)
        trans2 = list(m.transitions)
        trans2.append((en2, m.entry, zero))
        trans2.append((en2, m.name + "__x__" + m.name, zero))
        for b, _o, callee in m.boxes:
            for t in names:
                trans2.append((("ret", b, callee + "__x__" + t),
                               m.name + "__x__" + t, zero))
        out.append(_VMod(m.name, en2, exits2, nodes2, m.boxes, tuple(trans2)))
    return out


def _wrg_sigvalues(raw: object, what: str) -> Dict[str, object]:
    _req(isinstance(raw, dict), "%s must be an object" % what)
    out: Dict[str, object] = {}
    for key, val in raw.items():  # type: ignore[union-attr]
        key = _str(key, what + " key")
        if val in ("+inf", "-omega"):
            out[key] = val
        else:
            out[key] = _int(val, what + " value")
    return out


def _wrg_local_game(by_name: Mapping[str, _VMod], mod: _VMod,
                    values: Mapping[str, object], augmented: bool) -> GameGraph:
    """One module's finite game under the exit promises `values`:
    boxes pick a priced callee exit (conceded exits route to a losing
    sink, impossible ones disappear), and module exits either absorb
    (plain) or owe their promise back to the entry (augmented)."""
    verts: List[Tuple[str, int]] = list(mod.nodes)
    for b, _o, callee_name in mod.boxes:
        verts.append((b, P2))
        for x in by_name[callee_name].exits:
            verts.append((b + "__ret__" + x, mod.box_map[b][0]))
    verts.append((_WRG_LOSE, P1))
    edges: List[Tuple[str, str, Tuple[int, ...]]] = []
    for src, dst, w in mod.transitions:
        u = src if isinstance(src, str) else src[1] + "__ret__" + src[2]
        v = dst if isinstance(dst, str) else dst[1]
        edges.append((u, v, w))
    for b, _o, callee_name in mod.boxes:
        any_out = False
        lose = False
        for x in by_name[callee_name].exits:
            fv = values[x]
            if fv == "+inf":
                continue
            if fv == "-omega":
                lose = True
                continue
            edges.append((b, b + "__ret__" + x, (fv,)))  # type: ignore[arg-type]
            any_out = True
        if lose or not any_out:
            edges.append((b, _WRG_LOSE, (0,)))
    for x in mod.exits:
        if not augmented:
            edges.append((x, x, (0,)))
            continue
        fv = values[x]
        if fv == "-omega":
            edges.append((x, x, (0,)))
        elif fv == "+inf":
            edges.append((x, x, (-1,)))
        else:
            edges.append((x, mod.entry, (-fv,)))  # type: ignore[operator]
    return GameGraph(1, verts, [Edge(u, v, w, None) for u, v, w in edges])


def _wrg_tau_subgraph(plain: GameGraph, tau: Mapping[str, str],
                      fixed_exits: Set[str]):
    succ: Dict[str, List[Tuple[str, int]]] = {}
    for v in plain.vertices:
        outs = plain.out[v]
        if plain.owner(v) == P1 and v not in fixed_exits and v != _WRG_LOSE:
            if v in tau:
                outs = tuple(e for e in outs if e.dst == tau[v])
                if not outs:
                    return None
            elif len(outs) > 1:
                return None
        succ[v] = [(e.dst, e.w[0]) for e in outs]
    return succ


def _wrg_bellman(order: Sequence[str], succ: Mapping[str, Sequence[Tuple[str, int]]],
                 source: str) -> Tuple[Dict[str, int], bool]:
    dist: Dict[str, int] = {source: 0}
    for _ in range(max(len(order) - 1, 1)):
        changed = False
        for u in order:
            du = dist.get(u)
            if du is None:
                continue
            for v, w in succ[u]:
                alt = du + w
                if v not in dist or alt < dist[v]:
                    dist[v] = alt
                    changed = True
        if not changed:
            break
    for u in order:
        du = dist.get(u)
        if du is None:
            continue
        for v, w in succ[u]:
            if v in dist and du + w < dist[v]:
                return dist, True
    return dist, False


def _wrg_verify_local(plain: GameGraph, mod_exits: Sequence[str],
                      values: Mapping[str, object], entry: str,
                      tau: Mapping[str, str]) -> Optional[str]:
    """Shortest-path check that tau keeps one module clean: no
    reachable negative cycle, promised-unreachable exits unreachable,
    reachable exits met at no less than their promise."""
    exit_set = set(mod_exits)
    succ = _wrg_tau_subgraph(plain, tau, exit_set)
    if succ is None:
        return "strategy is not total on the module's choices"
    reach = {entry}
    frontier = [entry]
    while frontier:
        u = frontier.pop()
        for v, _w in succ[u]:
            if v not in reach:
                reach.add(v)
                frontier.append(v)
    order = sorted(reach)
    rsucc = {u: [(v, w) for v, w in succ[u] if v in reach] for u in order}
    dist, neg = _wrg_bellman(order, rsucc, entry)
    if neg:
        return "negative cycle reachable under the strategy"
    for x in mod_exits:
        fv = values[x]
        if fv == "+inf":
            if x in reach:
                return "exit %r promised unreachable is reachable" % x
        elif fv == "-omega":
            continue
        elif x in dist and dist[x] < fv:  # type: ignore[operator]
            return "exit %r reachable below its promise" % x
    return None


# ---------------------------------------------------------------------------
# kind "wrg-modular-p1"


def _check_wrg_modular_p1(model_text: str, cert: Mapping) -> None:
    """A feasible exit signature of the reentry augmentation with a
    nonnegative promise on every module's own reentry exit, plus the
    local strategies meeting it. Soundness of the composition (local
    shortest-path feasibility plus nonnegative self-reentries imply a
    winning modular strategy) is the toolkit's core reduction; the
    checker re-derives every local obligation from scratch."""
    k, mods, initial, by_name = _wrg_model(model_text)
    if k != 1:
        raise ModelError("modular certificates need k=1, got k=%d" % k)
    with _guard():
        pm = _wrg_prime(k, mods)
        pby = {m.name: m for m in pm}
        sig = cert["signature"]
        bound = _int(sig["bound"], "signature bound")
        _req(bound >= 0, "signature bound must be nonnegative")
        values = _wrg_sigvalues(sig["values"], "signature values")
        all_exits = [x for m in pm for x in m.exits]
        _req(set(values) == set(all_exits),
             "the signature must cover exactly the augmented exits")
        for val in values.values():
            if _is_int(val):
                _req(abs(val) <= bound, "a finite signature value escapes the bound")  # type: ignore[arg-type]
        strategies = cert["strategies"]
        _req(isinstance(strategies, dict)
             and set(strategies) <= set(pby),  # type: ignore[arg-type]
             "strategies must map known modules")
        for m in pm:
            own = values[m.name + "__x__" + m.name]
            _req(own == "+inf" or (_is_int(own) and own >= 0),  # type: ignore[operator]
                 "module %r does not secure its reentry exit" % m.name)
            tau = _str_map(strategies.get(m.name, {}),  # type: ignore[union-attr]
                           "strategy for %s" % m.name)
            plain = _wrg_local_game(pby, m, values, augmented=False)
            why = _wrg_verify_local(plain, m.exits, values, m.entry, tau)
            _req(why is None, "module %r: %s" % (m.name, why))


# ---------------------------------------------------------------------------
# kind "wrg-modular-p2"


_WRG_WALK_GUARD = 200_000
_WRG_SPACE_GUARD = 2_000_000  # mirrors the enumeration's default budget


def _wrg_candidates(nu_v: object, bound: int) -> List[object]:
    if nu_v == "+inf":
        return ["+inf"]
    vals: List[object] = []
    if nu_v == "-omega":
        vals.append("-omega")
        lo = -bound
    else:
        lo = max(-bound, nu_v)  # type: ignore[type-var]
    vals.extend(range(lo, bound + 1))
    vals.append("+inf")
    return vals


def _wrg_bump(idx: List[int], cands: Sequence[Sequence[object]], at: int) -> bool:
    for j in range(len(idx) - 1, at, -1):
        idx[j] = 0
    i = at
    while i >= 0:
        idx[i] += 1
        if idx[i] < len(cands[i]):
            return True
        idx[i] = 0
        i -= 1
    return False


def _check_wrg_modular_p2(model_text: str, cert: Mapping) -> None:
    """Exhaustion of the whole signature space at the definitive
    bound. The certificate drives the same skipping walk the search
    uses: at each visited candidate it names one module and a
    positional spoiling strategy whose restricted local game (promises
    folded in) traps the play in strictly negative cycles, and the
    walk advances from that module's most significant exit position,
    which leaves every skipped candidate refuted by the same pair.
    The walk must end exactly when the step list does."""
    k, mods, initial, by_name = _wrg_model(model_text)
    if k != 1:
        raise ModelError("modular certificates need k=1, got k=%d" % k)
    with _guard():
        pm = _wrg_prime(k, mods)
        pby = {m.name: m for m in pm}
        bound = _int(cert["bound"], "bound")
        bct = len(pm)
        n_max = max(len(m.nodes) + len(m.boxes) for m in pm)
        e_total = sum(len(m.exits) for m in pm)
        w_max = 0
        for m in pm:
            for _s, _d, w in m.transitions:
                for c in w:
                    w_max = max(w_max, abs(c))
        cap = w_max * (bct * n_max) ** (bct * e_total + 1)
        _req(bound >= cap,
             "bound %d is below the definitive threshold %d" % (bound, cap))
        exit_ids = [x for m in pm for x in m.exits]
        space = (2 * bound + 3) ** len(exit_ids)
        _req(space <= _WRG_SPACE_GUARD, "signature space too large to re-walk")
        nu_keys = {m.name + "__x__" + m.name for m in pm}
        cands = [_wrg_candidates(0 if x in nu_keys else "-omega", bound)
                 for x in exit_ids]
        pos_of = {x: i for i, x in enumerate(exit_ids)}
        rel: Dict[str, List[int]] = {}
        for m in pm:
            own = set(m.exits)
            callee_exits: Set[str] = set()
            for b, _o, callee in m.boxes:
                callee_exits.update(pby[callee].exits)
            rel[m.name] = sorted(pos_of[x] for x in own | callee_exits)
        steps = cert["steps"]
        _req(isinstance(steps, list), "steps must be a list")
        idx = [0] * len(exit_ids)
        si = 0
        visited = 0
        while True:
            visited += 1
            _req(visited <= _WRG_WALK_GUARD,
                 "signature walk above the checking guard")
            _req(si < len(steps),
                 "the walk outruns the certificate at candidate %d" % visited)
            step = steps[si]
            si += 1
            mname = _str(step["module"], "step module")
            m = pby.get(mname)
            _req(m is not None, "step names unknown module %r" % mname)
            values = {x: cands[p][idx[p]] for p, x in enumerate(exit_ids)}
            aug = _wrg_local_game(pby, m, values, augmented=True)
            sigma = _str_map(step["sigma2"], "step sigma2")
            restricted = restrict_strategy(aug, P2, sigma)
            reach = reachable_from(restricted, m.entry)
            for v in sorted(reach):
                _req(len(restricted.out[v]) > 0,
                     "the spoiling strategy strands %r in module %r" % (v, mname))
            sub = subgame(restricted, reach, require_total=False)
            _req(find_nonnegative_cycle(sub) is None,
                 "candidate %d is not refuted in module %r" % (visited, mname))
            at = rel[mname][-1] if rel[mname] else -1
            if not _wrg_bump(idx, cands, at):
                break
        _req(si == len(steps), "certificate lists more steps than the walk visits")


# ---------------------------------------------------------------------------
# Enumerating-oracle mirrors (recursive games)


_NEG = ["neg"]  # compared by identity, like the oracle's markers
_POS = ["pos"]


def _vb_tau_space(mods: Sequence[_VMod], by_name: Mapping[str, _VMod]):
    space = []
    for m in mods:
        exit_set = set(m.exits)
        positions: List[object] = [v for v in sorted(m.owner)
                                   if v not in exit_set and m.owner[v] == P1]
        for b, owner, callee in m.boxes:
            if owner != P1:
                continue
            for x in by_name[callee].exits:
                positions.append(("ret", b, x))
        for pos in positions:
            opts = [t[1] for t in m.outgoing(pos)]
            if len(opts) > 1:
                space.append((m.name, pos, opts))
    return space


def _vb_tau_edges(m: _VMod, tau: Mapping) -> List[Tuple[object, object, int]]:
    edges = []
    for src, dst, w in m.transitions:
        choice = tau.get((m.name, src))
        if choice is not None and dst != choice:
            continue
        edges.append((src, dst, w[0]))
    return edges


def _vb_summaries(mods: Sequence[_VMod], by_name: Mapping[str, _VMod],
                  tau: Mapping, rounds: int):
    """Joint entry-to-position min weights under tau, box hops priced
    by callee exit summaries; descent past the sweep cap collapses to
    the divergence marker."""
    dist: Dict[Tuple[str, object], object] = {}
    edges_by_mod: Dict[str, List[Tuple[object, object, int]]] = {}
    for m in mods:
        edges_by_mod[m.name] = _vb_tau_edges(m, tau)
        for v in m.owner:
            dist[(m.name, v)] = _POS
        for b, _o, callee in m.boxes:
            for x in by_name[callee].exits:
                dist[(m.name, ("ret", b, x))] = _POS
        dist[(m.name, m.entry)] = 0

    def relax_once(mark_neg: bool) -> bool:
        changed = False
        for m in mods:
            for src, dst, w in edges_by_mod[m.name]:
                d = dist[(m.name, src)]
                if d is _POS:
                    continue
                if isinstance(dst, str):
                    targets = [((m.name, dst), d, w, None)]
                else:
                    b = dst[1]
                    callee = m.box_map[b][1]
                    targets = []
                    for x in by_name[callee].exits:
                        s = dist[(callee, x)]
                        if s is _POS:
                            continue
                        targets.append(((m.name, ("ret", b, x)), d, w, s))
                for key, d0, w0, s in targets:
                    if d0 is _NEG or s is _NEG:
                        cand: object = _NEG
                    else:
                        cand = d0 + w0 + (0 if s is None else s)  # type: ignore[operator]
                    old = dist[key]
                    better = (old is _POS or cand is _NEG and old is not _NEG
                              or (old is not _NEG and cand is not _NEG
                                  and cand < old))  # type: ignore[operator]
                    if better:
                        dist[key] = _NEG if (mark_neg and cand is not _NEG) else cand
                        changed = True
        return changed

    for _ in range(rounds):
        if not relax_once(False):
            return dist, edges_by_mod
    while relax_once(True):
        pass
    return dist, edges_by_mod


def _vb_parts(mods: Sequence[_VMod], by_name: Mapping[str, _VMod], initial: str,
              edges_by_mod: Mapping[str, List], dist: Mapping):
    pos_reach: Dict[str, Set[object]] = {}
    mod_seen: Set[str] = set()
    work = [initial]
    while work:
        name = work.pop()
        if name in mod_seen:
            continue
        mod_seen.add(name)
        m = by_name[name]
        seen: Set[object] = {m.entry}
        stack: List[object] = [m.entry]
        while stack:
            u = stack.pop()
            for src, dst, _w in edges_by_mod[name]:
                if src != u:
                    continue
                if isinstance(dst, str):
                    nxt = [dst]
                else:
                    b = dst[1]
                    callee = m.box_map[b][1]
                    if callee not in mod_seen:
                        work.append(callee)
                    nxt = [("ret", b, x) for x in by_name[callee].exits
                           if dist[(callee, x)] is not _POS]
                for v in nxt:
                    if v not in seen:
                        seen.add(v)
                        stack.append(v)
        pos_reach[name] = seen
    return mod_seen, pos_reach


def _vb_neg_cycle(nodes: Sequence, edges: List[Tuple[object, object, object]]):
    """Search mirror: a negative or divergence-marked cycle as a node
    list, or None."""
    succ: Dict[object, List[object]] = {v: [] for v in nodes}
    for u, v, _w in edges:
        succ[u].append(v)
    for u, v, w in edges:
        if w is not _NEG:
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
    fin = [(u, v, w) for u, v, w in edges if w is not _NEG]
    d = {v: 0 for v in nodes}
    pred: Dict[object, object] = {}
    bad = None
    for i in range(len(nodes)):
        changed = False
        for u, v, w in fin:
            if d[u] + w < d[v]:  # type: ignore[operator]
                d[v] = d[u] + w  # type: ignore[operator]
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


def _vb_local_edges(m: _VMod, by_name: Mapping[str, _VMod], dist: Mapping,
                    edges: List, keep: Set) -> List[Tuple[object, object, object]]:
    out: List[Tuple[object, object, object]] = []
    for src, dst, w in edges:
        if src not in keep:
            continue
        if isinstance(dst, str):
            if dst in keep:
                out.append((src, dst, w))
        else:
            b = dst[1]
            callee = m.box_map[b][1]
            for x in by_name[callee].exits:
                rv = ("ret", b, x)
                if rv not in keep:
                    continue
                s = dist[(callee, x)]
                if s is _POS:
                    continue
                out.append((src, rv, _NEG if s is _NEG else w + s))
    return out


def _vb_entry_edges(mods: Sequence[_VMod], by_name: Mapping[str, _VMod],
                    dist: Mapping, edges_by_mod: Mapping[str, List],
                    mod_seen: Set[str], pos_reach: Mapping[str, Set]
                    ) -> List[Tuple[object, object, object]]:
    mod_edges: List[Tuple[object, object, object]] = []
    for name in sorted(mod_seen):
        m = by_name[name]
        best: Dict[str, object] = {}
        for src, dst, w in edges_by_mod[name]:
            if not isinstance(dst, str) and src in pos_reach[name]:
                b = dst[1]
                callee = m.box_map[b][1]
                d = dist[(name, src)]
                if d is _POS:
                    continue
                t = _NEG if d is _NEG else d + w  # type: ignore[operator]
                old = best.get(callee)
                if (old is None or old is not _NEG
                        and (t is _NEG or t < old)):  # type: ignore[operator]
                    best[callee] = t
        for callee, t in best.items():
            mod_edges.append((name, callee, t))
    return mod_edges


def _vb_refute(mods: Sequence[_VMod], by_name: Mapping[str, _VMod], initial: str,
               tau: Mapping, rounds: int) -> Optional[dict]:
    """Full refutation search under tau: a reachable negative cycle
    inside one module, or a negative entry-to-entry descent loop."""
    dist, edges_by_mod = _vb_summaries(mods, by_name, tau, rounds)
    mod_seen, pos_reach = _vb_parts(mods, by_name, initial, edges_by_mod, dist)
    for name in sorted(mod_seen):
        m = by_name[name]
        keep = pos_reach[name]
        edges = _vb_local_edges(m, by_name, dist, edges_by_mod[name], keep)
        cyc = _vb_neg_cycle(sorted(keep, key=repr), edges)
        if cyc is not None:
            return {"kind": "local", "module": name, "cycle": cyc}
    mod_edges = _vb_entry_edges(mods, by_name, dist, edges_by_mod, mod_seen, pos_reach)
    cyc = _vb_neg_cycle(sorted(mod_seen), mod_edges)
    if cyc is not None:
        return {"kind": "entry", "modules": cyc}
    return None


def _pos_from_doc(raw: object, what: str):
    if isinstance(raw, str):
        return raw
    _req(isinstance(raw, list) and len(raw) == 2
         and all(isinstance(x, str) for x in raw),
         "%s must be a node id or [box, exit]" % what)
    return ("ret", raw[0], raw[1])  # type: ignore[index]


def _dst_from_doc(raw: object, what: str):
    if isinstance(raw, str):
        return raw
    _req(isinstance(raw, list) and len(raw) == 2 and isinstance(raw[0], str)
         and raw[1] == "en",
         '%s must be a node id or [box, "en"]' % what)
    return ("call", raw[0])  # type: ignore[index]


# ---------------------------------------------------------------------------
# kind "wrg-brute-p1"


def _check_wrg_brute_p1(model_text: str, cert: Mapping) -> None:
    """One modular strategy, covering exactly the free choice points,
    that the refutation search cannot beat: the checker re-runs the
    full search (summaries, reachable parts, negative-cycle hunts) and
    demands it comes up empty."""
    k, mods, initial, by_name = _wrg_model(model_text)
    if k != 1:
        raise ModelError("enumeration certificates need k=1, got k=%d" % k)
    with _guard():
        rounds = _int(cert["rounds"], "rounds")
        _req(1 <= rounds <= 1024, "rounds out of range")
        space = _vb_tau_space(mods, by_name)
        entries = cert["tau"]
        _req(isinstance(entries, list), "tau must be a list")
        tau: Dict[Tuple[str, object], object] = {}
        for entry in entries:
            mname = _str(entry["module"], "tau module")
            pos = _pos_from_doc(entry["at"], "tau position")
            go = _dst_from_doc(entry["go"], "tau destination")
            key = (mname, pos)
            _req(key not in tau, "tau repeats a position")
            tau[key] = go
        _req(set(tau) == {(mn, pos) for mn, pos, _o in space},
             "tau must decide exactly the free choice points")
        for mn, pos, opts in space:
            _req(tau[(mn, pos)] in opts,
                 "tau picks a missing destination at %r" % (pos,))
        bad = _vb_refute(mods, by_name, initial, tau, rounds)
        if bad is not None:
            raise _Reject("the strategy is refuted (%s, module %r)"
                          % (bad["kind"], bad.get("module", "-")))


# ---------------------------------------------------------------------------
# kind "wrg-brute-p2"


_WRG_TAU_GUARD = 4096


def _vb_cycle_negative(cyc: Sequence, prices: Mapping) -> None:
    """The node list must close into a negative cycle over the priced
    edges, or name a divergence-marked edge that some path closes."""
    closed = []
    complete = True
    for i in range(len(cyc)):
        w = prices.get((cyc[i], cyc[(i + 1) % len(cyc)]))
        if w is None:
            complete = False
            break
        closed.append(w)
    if complete:
        if any(w is _NEG for w in closed):
            return
        if sum(closed) < 0:  # type: ignore[arg-type]
            return
        raise _Reject("the listed cycle is not negative")
    _req(len(cyc) == 2, "the listed cycle uses missing edges")
    u, v = cyc
    _req(prices.get((u, v)) is _NEG, "the listed cycle uses missing edges")
    seen = {v}
    bfs = [v]
    while bfs:
        x = bfs.pop()
        if x == u:
            return
        for (a, b2) in prices:
            if a == x and b2 not in seen:
                seen.add(b2)
                bfs.append(b2)
    raise _Reject("the divergent edge closes no cycle")


def _check_wrg_brute_p2(model_text: str, cert: Mapping) -> None:
    """One refutation per modular strategy, in strategy-product order.
    The checker rebuilds each strategy's summaries and reachable parts
    itself, then validates the named negative cycle or entry descent;
    only the cycle itself is taken from the certificate, never the
    evidence for it."""
    k, mods, initial, by_name = _wrg_model(model_text)
    if k != 1:
        raise ModelError("enumeration certificates need k=1, got k=%d" % k)
    with _guard():
        rounds = _int(cert["rounds"], "rounds")
        _req(1 <= rounds <= 1024, "rounds out of range")
        space = _vb_tau_space(mods, by_name)
        count = 1
        for _mn, _pos, opts in space:
            count *= len(opts)
            _req(count <= _WRG_TAU_GUARD,
                 "strategy product above the checking guard")
        refs = cert["refutations"]
        _req(isinstance(refs, list) and len(refs) == count,
             "expected one refutation per strategy (%d)" % count)
        for combo, ref in zip(itertools.product(*(opts for _mn, _pos, opts in space)),
                              refs):
            tau = {(mn, pos): dst for (mn, pos, _o), dst in zip(space, combo)}
            dist, edges_by_mod = _vb_summaries(mods, by_name, tau, rounds)
            mod_seen, pos_reach = _vb_parts(mods, by_name, initial,
                                            edges_by_mod, dist)
            _req(isinstance(ref, dict), "refutations must be objects")
            kind = ref.get("kind")
            if kind == "local":
                name = _str(ref["module"], "refutation module")
                _req(name in mod_seen, "refutation names an unentered module")
                m = by_name[name]
                keep = pos_reach[name]
                cyc = [_pos_from_doc(p, "cycle position") for p in ref["cycle"]]
                _req(len(cyc) >= 1, "empty refutation cycle")
                for pos in cyc:
                    _req(pos in keep, "refutation cycle leaves the reachable part")
                prices: Dict[Tuple[object, object], object] = {}
                for u, v, w in _vb_local_edges(m, by_name, dist,
                                               edges_by_mod[name], keep):
                    old = prices.get((u, v))
                    if (old is None or (w is _NEG and old is not _NEG)
                            or (old is not _NEG and w is not _NEG and w < old)):  # type: ignore[operator]
                        prices[(u, v)] = w
                _vb_cycle_negative(cyc, prices)
            elif kind == "entry":
                names = [_str(x, "descent module") for x in ref["modules"]]
                _req(len(names) >= 1 and all(nm in mod_seen for nm in names),
                     "the descent must stay among entered modules")
                eprices: Dict[Tuple[object, object], object] = {}
                for u, v, w in _vb_entry_edges(mods, by_name, dist, edges_by_mod,
                                               mod_seen, pos_reach):
                    eprices[(u, v)] = w
                _vb_cycle_negative(names, eprices)
            else:
                raise _Reject("unknown refutation kind %r" % (kind,))


# ---------------------------------------------------------------------------
# Dispatch


_CHECKERS = {
    "mp1": _check_mp1,
    "parity": _check_parity,
    "mmpg": _check_mmpg,
    "wps-yes": _check_wps_yes,
    "wps-no": _check_wps_no,
    "wrg-modular-p1": _check_wrg_modular_p1,
    "wrg-modular-p2": _check_wrg_modular_p2,
    "wrg-brute-p1": _check_wrg_brute_p1,
    "wrg-brute-p2": _check_wrg_brute_p2,
}

CERT_KINDS = tuple(sorted(_CHECKERS))


def verify_certificate(model_text: str, cert: object) -> Tuple[bool, str]:
    """Check one certificate document against one model text.

    Returns (True, "") on acceptance, (False, reason) on rejection.
    Raises ModelError when the model text itself is broken; a bad
    certificate never raises.
    """
    if not isinstance(cert, dict):
        return False, "certificate must be an object"
    kind = cert.get("kind")
    checker = _CHECKERS.get(kind)  # type: ignore[arg-type]
    if checker is None:
        return False, "unknown certificate kind %r" % (kind,)
    try:
        checker(model_text, cert)
    except _Reject as rej:
        return False, str(rej)
    return True, ""
