"""Command-line front end.

Thirteen subcommands over stdin/stdout-friendly JSON documents: five
solvers (`solve-mp1`, `solve-mmpg`, `solve-parity`, `decide-wps`,
`solve-wrg`), three brute-force reference deciders (`oracle-mmpg`,
`oracle-wps`, `oracle-wrg`), four generators (`gen-sat`,
`gen-parity-wrg`, `gen-zk-wrg`, `gen-random`), and `verify`, which
re-checks a certificate document against a model using the independent
checker only.

Generators print bare model documents so they pipe straight into the
solvers. Every other command prints an envelope
``{"command", "answer", "certificate"}``; with ``--format structured``
the envelope is canonical JSON, byte-identical across runs for the
same inputs and seed.

Exit codes: 0 is a definitive answer whose certificate was re-checked
in-process before printing; 2 is a parse or model error; 3 means a
budget ran out (the answer, when one exists, is printed uncertified);
4 is an internal invariant failure or a rejected certificate.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import certs
from .core import (
    BudgetError,
    GameGraph,
    GuardError,
    InvariantError,
    ModelError,
    P2,
    attractor,
    canonical_json,
    clear_denominators,
    find_nonnegative_cycle,
    game_to_doc,
    parse_game,
    reachable_from,
    restrict_strategy,
    strongly_connected_components,
    subgame,
    transform_assumptions,
)
from . import lp
from .mp1 import solve_mp1
from .mmpg import solve_mmpg
from .oracles import (
    _p2_strategy_space,
    _simple_cycles,
    brute_mmpg,
    brute_wps,
    brute_wrg,
)
from .parity import parse_parity, zielonka
from .reductions import (
    Cnf3,
    ZkReachGame,
    parity_to_wrg,
    random_game,
    random_wps,
    random_wrg,
    sat_to_wrg,
    zk_reach_to_wrg,
)
from .wps import BOT, decide_multidim, parse_wps, wps_to_doc
from .wrg import parse_wrg, signature_to_doc, solve_modular, wrg_to_doc

__all__ = ["main"]

EXIT_OK = 0
EXIT_MODEL = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4

_SIGMA_GUARD = 50_000        # opposing-strategy products in certificate builders
_CYCLE_GUARD = 400           # ordered simple cycles per restricted subgraph
_SPOILER_GUARD = 4096        # per-module spoiling strategies (recursive games)
_WALK_STEP_GUARD = 5000      # signature-walk certificate length
_LINK_NODE_GUARD = 20_000    # configuration search for linking runs
_BRUTE_ROUNDS = 64           # relaxation sweeps recorded in enumeration certs


# ---------------------------------------------------------------------------
# Plumbing


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ModelError("cannot read %r: %s" % (path, exc)) from None


def _emit(doc: dict, args: argparse.Namespace) -> None:
    if args.format == "structured":
        text = canonical_json(doc) + "\n"
    else:
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _finish(args: argparse.Namespace, command: str, model_text: str,
            answer: dict, cert: Optional[dict]) -> int:
    """Self-check the certificate, print the envelope, map certificate
    absence to the budget exit code."""
    if cert is not None:
        ok, why = certs.verify_certificate(model_text, cert)
        if not ok:
            raise InvariantError(
                "emitted certificate fails verification: %s" % why)
    _emit({"command": command, "answer": answer, "certificate": cert}, args)
    return EXIT_OK if cert is not None else EXIT_BUDGET


def _fracdoc(x) -> List[int]:
    f = Fraction(x)
    return [f.numerator, f.denominator]


# ---------------------------------------------------------------------------
# Finite-game certificate builders


def _build_mp1_cert(win1, win2, s1, s2) -> dict:
    return {
        "kind": "mp1",
        "win1": sorted(win1),
        "win2": sorted(win2),
        "sigma1": dict(sorted(s1.items())),
        "sigma2": dict(sorted(s2.items())),
    }


def _ordered_cycles(g: GameGraph) -> List[Tuple[List[str], Tuple[int, ...]]]:
    """Simple cycles as closed vertex walks with their total weight."""
    order = sorted(g.vertices)
    index = {v: i for i, v in enumerate(order)}
    out: List[Tuple[List[str], Tuple[int, ...]]] = []
    zero = (0,) * g.k
    for anchor in order:
        a = index[anchor]
        stack: List[Tuple[str, Tuple[str, ...], Tuple[int, ...]]] = [
            (anchor, (anchor,), zero)]
        while stack:
            v, path, acc = stack.pop()
            for e in g.out[v]:
                if index[e.dst] < a:
                    continue
                w = tuple(x + y for x, y in zip(acc, e.w))
                if e.dst == anchor:
                    out.append((list(path) + [anchor], w))
                    if len(out) > _CYCLE_GUARD:
                        raise BudgetError(
                            "cycle census exceeds %d" % _CYCLE_GUARD)
                elif e.dst not in path:
                    stack.append((e.dst, path + (e.dst,), w))
    return out


def _guarded_product(options: Sequence[Sequence], what: str) -> int:
    count = 1
    for opts in options:
        count *= len(opts)
        if count > _SIGMA_GUARD:
            raise BudgetError("%s space exceeds %d" % (what, _SIGMA_GUARD))
    return count


def _mmpg_p2_side(g: GameGraph, win2) -> dict:
    """A spoiling strategy on win2 with one separating direction per
    strongly connected component of the restricted region."""
    k = g.k
    if not win2:
        return {"sigma2": {}, "components": []}
    pverts = [v for v in sorted(win2) if g.owner(v) == P2]
    options = []
    for v in pverts:
        opts = [e.dst for e in g.out[v] if e.dst in win2]
        if not opts:
            raise InvariantError(
                "player-2 vertex %r has no move inside win2" % v)
        options.append(opts)
    _guarded_product(options, "spoiling strategy")
    for combo in itertools.product(*options):
        sigma = dict(zip(pverts, combo))
        h2 = subgame(restrict_strategy(g, P2, sigma), frozenset(win2),
                     require_total=False)
        succ = {v: [(e.dst, 0) for e in h2.out[v]] for v in h2.vertices}
        comps = strongly_connected_components(succ)
        entries = []
        good = True
        for comp in comps:
            part = subgame(h2, frozenset(comp), require_total=False)
            cycles = _ordered_cycles(part)
            if not cycles:
                lam = [1] * k
            else:
                rows: List[Tuple[List[int], str, int]] = []
                for d in range(k):
                    unit = [0] * k
                    unit[d] = 1
                    rows.append((unit, ">=", 0))
                rows.append(([1] * k, ">=", 1))
                for _walk, total in cycles:
                    rows.append((list(total), "<=", -1))
                x = lp.feasible(rows)
                if x is None:
                    good = False
                    break
                lam = list(clear_denominators(x))
            entries.append({"vertices": sorted(comp), "lambda": lam})
        if good:
            return {"sigma2": sigma, "components": entries}
    raise InvariantError("no positional strategy spoils all of win2")


def _mmpg_p1_side(g: GameGraph, win1) -> dict:
    """Survivor set of the assumption-folded arena plus, for every
    positional opposing strategy of the closed survivor subgame, a
    componentwise-nonnegative convex combination of reachable cycle
    weights at every survivor."""
    k = g.k
    ht = transform_assumptions(g)
    current = set(ht.owners)
    unit_rows = [([1 if j == i else 0 for j in range(k)], ">=", 1)
                 for i in range(k)]
    while current:
        sub = subgame(ht, frozenset(current))
        space = _p2_strategy_space(sub)
        _guarded_product(space, "survivor-analysis strategy")
        beaten = set()
        for combo in itertools.product(*space):
            sigma = dict(combo)
            gs = restrict_strategy(sub, P2, sigma)
            cycles = _simple_cycles(gs)
            reach: Dict[str, frozenset] = {}
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
    if current & set(g.vertices) != set(win1):
        raise InvariantError("survivor analysis disagrees with the claimed win1")
    if not current:
        return {"survivors": [], "strategies": [{"sigma2": {}, "witnesses": {}}]}
    sub = subgame(ht, frozenset(current))
    pverts = sorted(v for v in sub.vertices if sub.owner(v) == P2)
    options = [[e.dst for e in sub.out[v]] for v in pverts]
    _guarded_product(options, "witness strategy")
    strategies = []
    for combo in itertools.product(*options):
        sigma = dict(zip(pverts, combo))
        gs = restrict_strategy(sub, P2, sigma)
        cycles = _ordered_cycles(gs)
        wits: Dict[str, dict] = {}
        for v in sorted(current):
            reach_v = reachable_from(gs, v)
            local = [(walk, w) for walk, w in cycles if set(walk) & reach_v]
            if not local:
                raise InvariantError("no cycle reachable from survivor %r" % v)
            m = len(local)
            rows = []
            for j in range(m):
                unit = [0] * m
                unit[j] = 1
                rows.append((unit, ">=", 0))
            for d in range(k):
                rows.append(([w[d] for _walk, w in local], ">=", 0))
            rows.append(([1] * m, "=", 1))
            x = lp.feasible(rows)
            if x is None:
                raise InvariantError(
                    "no nonnegative cycle combination at survivor %r" % v)
            kept_cycles: List[List[str]] = []
            kept_coeffs: List[List[int]] = []
            for (walk, _w), c in zip(local, x):
                if c != 0:
                    kept_cycles.append(list(walk))
                    kept_coeffs.append(_fracdoc(c))
            wits[v] = {"cycles": kept_cycles, "coeffs": kept_coeffs}
        strategies.append({"sigma2": sigma, "witnesses": wits})
    return {"survivors": sorted(current), "strategies": strategies}


def _build_mmpg_cert(g: GameGraph, win1, win2) -> dict:
    return {
        "kind": "mmpg",
        "win1": sorted(win1),
        "win2": sorted(win2),
        "p2": _mmpg_p2_side(g, win2),
        "p1": _mmpg_p1_side(g, win1),
    }


# ---------------------------------------------------------------------------
# Pushdown certificate builders


def _wps_tr_tuple(t) -> Tuple[str, str, str, Tuple[str, ...], Tuple[int, ...]]:
    return (t.src, t.top, t.dst, t.cmd, t.w)


def _wps_trdoc(t: Tuple) -> dict:
    src, top, dst, cmd, w = t
    if cmd == ("skip",):
        c: object = "skip"
    elif cmd == ("pop",):
        c = "pop"
    else:
        c = {"push": cmd[1]}
    return {"from": src, "top": top, "to": dst, "cmd": c, "w": list(w)}


def _wps_seed_row(head: Tuple[str, str], d: int, k: int) -> dict:
    """The per-dimension penalty self-loop at the head, as a one-step
    pumpable row of weight -e_d."""
    sym, q = head
    w = [0] * k
    w[d] = -1
    stack = [BOT] if sym == BOT else [BOT, sym]
    return {
        "w": [[c, 1] for c in w],
        "host": {"state": q, "stack": stack,
                 "path": [{"from": q, "top": sym, "to": q,
                           "cmd": "skip", "w": w}]},
        "anchors": [0, 1, 1, 1],
        "to": [],
        "back": [],
    }


def _wps_find_link(universe: Sequence[Tuple], src_head: Tuple[str, str],
                   dst_head: Tuple[str, str]) -> List[Tuple]:
    """Breadth-first run from src_head's minimal configuration to any
    configuration showing dst_head, never dipping below the start."""
    if src_head == dst_head:
        return []
    q0, st0 = certs._wps_canonical(src_head)
    floor = len(st0)
    seen = {(q0, st0)}
    frontier: List[Tuple[Tuple[str, Tuple[str, ...]], Tuple]] = [((q0, st0), ())]
    visited = 0
    while frontier:
        nxt = []
        for (q, st), path in frontier:
            for t in universe:
                src, top, dst, cmd, _w = t
                if src != q or st[-1] != top:
                    continue
                if cmd == ("pop",):
                    if len(st) <= floor:
                        continue
                    st2 = st[:-1]
                elif cmd == ("skip",):
                    st2 = st
                else:
                    st2 = st + (cmd[1],)
                if len(st2) > floor + 6:
                    continue
                cfg = (dst, st2)
                if cfg in seen:
                    continue
                seen.add(cfg)
                p2 = path + (t,)
                if (st2[-1], dst) == dst_head:
                    return list(p2)
                visited += 1
                if visited > _LINK_NODE_GUARD:
                    raise BudgetError("linking-run search exceeds %d "
                                      "configurations" % _LINK_NODE_GUARD)
                if len(p2) < 40:
                    nxt.append((cfg, p2))
        frontier = nxt
    raise BudgetError("no linking run back to the decided head was found")


def _wps_pair_row(head: Tuple[str, str], host, pair, wrow,
                  universe: Sequence[Tuple]) -> dict:
    path = [_wps_tr_tuple(t) for t in host.path]
    stack = tuple(host.start_stack)
    try:
        qe, ste = certs._wps_replay(host.start_state, stack, path, "host")
    except certs._Reject as rej:
        raise BudgetError("pumpable pair does not replay from its floor: %s"
                          % rej) from None
    end = (ste[-1], qe)
    back = _wps_find_link(universe, end, head)
    return {
        "w": [_fracdoc(c) for c in wrow],
        "host": {"state": host.start_state, "stack": list(stack),
                 "path": [_wps_trdoc(t) for t in path]},
        "anchors": [pair.a1, pair.b1, pair.a2, pair.b2],
        "to": [],
        "back": [_wps_trdoc(t) for t in back],
    }


def _wps_check_rows(model_text: str, head, rows: Sequence[dict]) -> None:
    """Pre-validate built rows with the checker's own row logic, so a
    construction that cannot satisfy it degrades to an uncertified
    answer instead of dying at the final self-check."""
    k, states, alphabet, _initial, trans = certs._wps_model(model_text)
    universe = set(certs._wps_augment(k, states, alphabet, trans))
    for row in rows:
        try:
            certs._wps_row(universe, k, states, alphabet, head, row)
        except certs._Reject as rej:
            raise BudgetError(
                "certificate construction failed: %s" % rej) from None


def _build_wps_yes_from_decide(model_text: str, decision) -> dict:
    k, states, alphabet, _initial, trans = certs._wps_model(model_text)
    universe = sorted(certs._wps_augment(k, states, alphabet, trans))
    head = decision.witness_head
    hc = next(h for h in decision.heads
              if h.status == "witness" and h.head == head)
    rows_doc: List[dict] = []
    comb_doc: List[List[int]] = []
    for i, (rowvec, c) in enumerate(zip(hc.rows, hc.combination)):
        if c == 0:
            continue
        if i < k:
            rows_doc.append(_wps_seed_row(head, i, k))
        else:
            hp = hc.pairs[i]
            if hp is None:
                raise BudgetError(
                    "a pumpable pair needed by the combination was too large "
                    "to materialize")
            host, pair = hp
            rows_doc.append(_wps_pair_row(head, host, pair, rowvec, universe))
        comb_doc.append(_fracdoc(c))
    cert = {"kind": "wps-yes", "scope": "system", "head": list(head),
            "rows": rows_doc, "combination": comb_doc}
    _wps_check_rows(model_text, head, rows_doc)
    return cert


def _build_wps_no(decision) -> dict:
    heads_doc = []
    for h in decision.heads:
        if h.status != "separated" or h.lam is None:
            raise InvariantError("negative decision with a non-separated head")
        heads_doc.append({
            "head": list(h.head),
            "lambda": list(h.lam),
            "rows": [[_fracdoc(x) for x in r] for r in h.rows],
        })
    return {"kind": "wps-no", "heads": heads_doc}


def _build_wps_yes_from_brute(model_text: str, res) -> dict:
    k, states, alphabet, _initial, trans = certs._wps_model(model_text)
    universe = sorted(certs._wps_augment(k, states, alphabet, trans))
    head = res.head
    rows_doc: List[dict] = []
    comb_doc: List[List[int]] = []
    for rowvec, c, finding in zip(res.rows, res.combination[k:], res.findings):
        if c == 0:
            continue
        rows_doc.append(_wps_pair_row(head, finding.host, finding.pair,
                                      rowvec, universe))
        comb_doc.append(_fracdoc(c))
    if not rows_doc:
        raise InvariantError("bounded search accepted with an empty combination")
    cert = {"kind": "wps-yes", "scope": "head", "head": list(head),
            "rows": rows_doc, "combination": comb_doc}
    _wps_check_rows(model_text, head, rows_doc)
    return cert


# ---------------------------------------------------------------------------
# Recursive-game certificate builders


def _build_wrg_modular_p1(decision) -> dict:
    return {
        "kind": "wrg-modular-p1",
        "signature": signature_to_doc(decision.signature),
        "strategies": {m: dict(sorted(t.items()))
                       for m, t in sorted(decision.prime_strategies.items())},
    }


def _wrg_spoiler(aug: GameGraph, entry: str) -> Optional[Dict[str, str]]:
    """A positional strategy trapping every play from the entry in
    strictly negative cycles, or None."""
    pverts = sorted(v for v in aug.vertices if aug.owner(v) == P2)
    options = [[e.dst for e in aug.out[v]] for v in pverts]
    count = 1
    for opts in options:
        count *= len(opts)
        if count > _SPOILER_GUARD:
            raise BudgetError("spoiler search exceeds %d strategies"
                              % _SPOILER_GUARD)
    for combo in itertools.product(*options):
        sigma = dict(zip(pverts, combo))
        restricted = restrict_strategy(aug, P2, sigma)
        reach = reachable_from(restricted, entry)
        if any(len(restricted.out[v]) == 0 for v in reach):
            continue
        sub = subgame(restricted, frozenset(reach), require_total=False)
        if find_nonnegative_cycle(sub) is None:
            return sigma
    return None


def _build_wrg_modular_p2(model_text: str, bound: int) -> dict:
    """Re-walk the signature space, refuting one module per visited
    candidate; advancing from that module's most significant exit
    position also covers every skipped candidate."""
    k, mods, _initial, _by_name = certs._wrg_model(model_text)
    pm = certs._wrg_prime(k, mods)
    pby = {m.name: m for m in pm}
    exit_ids = [x for m in pm for x in m.exits]
    nu_keys = {m.name + "__x__" + m.name for m in pm}
    cands = [certs._wrg_candidates(0 if x in nu_keys else "-omega", bound)
             for x in exit_ids]
    space = 1
    for c in cands:
        space *= len(c)
        if space > 2_000_000:
            raise BudgetError("signature space too large for a walk certificate")
    pos_of = {x: i for i, x in enumerate(exit_ids)}
    rel: Dict[str, List[int]] = {}
    for m in pm:
        own = set(m.exits)
        callee_exits = set()
        for _b, _o, callee in m.boxes:
            callee_exits.update(pby[callee].exits)
        rel[m.name] = sorted(pos_of[x] for x in own | callee_exits)
    order = sorted(range(len(pm)),
                   key=lambda i: (rel[pm[i].name][-1] if rel[pm[i].name] else -1, i))
    idx = [0] * len(exit_ids)
    steps: List[dict] = []
    while True:
        if len(steps) >= _WALK_STEP_GUARD:
            raise BudgetError("signature walk exceeds %d steps" % _WALK_STEP_GUARD)
        values = {x: cands[p][idx[p]] for p, x in enumerate(exit_ids)}
        found = None
        for i in order:
            m = pm[i]
            aug = certs._wrg_local_game(pby, m, values, augmented=True)
            win1, _w2, _s1, _s2 = solve_mp1(aug)
            if m.entry in win1:
                continue
            sigma = _wrg_spoiler(aug, m.entry)
            if sigma is None:
                raise InvariantError(
                    "module %r is infeasible but no positional spoiler exists"
                    % m.name)
            found = (m.name, sigma)
            break
        if found is None:
            raise InvariantError("claimed exhaustion reached a feasible candidate")
        steps.append({"module": found[0], "sigma2": found[1]})
        at = rel[found[0]][-1] if rel[found[0]] else -1
        if not certs._wrg_bump(idx, cands, at):
            break
    return {"kind": "wrg-modular-p2", "bound": bound, "steps": steps}


def _wrg_pos_doc(pos) -> object:
    return pos if isinstance(pos, str) else [pos[1], pos[2]]


def _wrg_dst_doc(dst) -> object:
    return dst if isinstance(dst, str) else [dst[1], "en"]


def _build_wrg_brute_cert(res) -> dict:
    if res.winner == "player1":
        entries = []
        for (mn, pos), dst in sorted(res.tau.items(),
                                     key=lambda kv: (kv[0][0],
                                                     certs._wrg_src_key(kv[0][1]))):
            entries.append({"module": mn, "at": _wrg_pos_doc(pos),
                            "go": _wrg_dst_doc(dst)})
        return {"kind": "wrg-brute-p1", "rounds": _BRUTE_ROUNDS, "tau": entries}
    if len(res.refutations) > _SPOILER_GUARD:
        raise BudgetError("too many strategies for a per-strategy certificate")
    refs = []
    for ref in res.refutations:
        if ref["kind"] == "local":
            refs.append({"kind": "local", "module": ref["module"],
                         "cycle": [_wrg_pos_doc(p) for p in ref["cycle"]]})
        else:
            refs.append({"kind": "entry", "modules": list(ref["modules"])})
    return {"kind": "wrg-brute-p2", "rounds": _BRUTE_ROUNDS,
            "refutations": refs}


# ---------------------------------------------------------------------------
# Solver commands


def _cmd_solve_mp1(args) -> int:
    text = _read_text(args.model)
    g = parse_game(text)
    g.require_total()
    if g.k != 1:
        raise ModelError("solve-mp1 handles one weight dimension, got k=%d" % g.k)
    win1, win2, s1, s2 = solve_mp1(g)
    answer = {"win1": sorted(win1), "win2": sorted(win2)}
    cert = _build_mp1_cert(win1, win2, s1, s2)
    return _finish(args, "solve-mp1", text, answer, cert)


def _cmd_solve_mmpg(args) -> int:
    text = _read_text(args.model)
    g = parse_game(text)
    g.require_total()
    res = solve_mmpg(g, lambda_level_cap=args.lambda_cap)
    answer = {"win1": sorted(res.win1), "win2": sorted(res.win2)}
    if res.status != "solved":
        return _finish(args, "solve-mmpg", text, answer, None)
    try:
        cert = _build_mmpg_cert(g, res.win1, res.win2)
    except BudgetError:
        cert = None
    return _finish(args, "solve-mmpg", text, answer, cert)


def _cmd_solve_parity(args) -> int:
    text = _read_text(args.model)
    P = parse_parity(text)
    win1, win2, s1, s2 = zielonka(P)
    answer = {"win1": sorted(win1), "win2": sorted(win2)}
    cert = {
        "kind": "parity",
        "win1": sorted(win1),
        "win2": sorted(win2),
        "sigma1": dict(sorted(s1.items())),
        "sigma2": dict(sorted(s2.items())),
    }
    return _finish(args, "solve-parity", text, answer, cert)


def _cmd_decide_wps(args) -> int:
    text = _read_text(args.model)
    w = parse_wps(text)
    decision = decide_multidim(w)
    answer = {
        "answer": decision.answer,
        "witness_head": list(decision.witness_head)
        if decision.witness_head else None,
    }
    if decision.status != "solved":
        return _finish(args, "decide-wps", text, answer, None)
    try:
        if decision.answer:
            cert = _build_wps_yes_from_decide(text, decision)
        else:
            cert = _build_wps_no(decision)
    except BudgetError:
        cert = None
    return _finish(args, "decide-wps", text, answer, cert)


def _cmd_solve_wrg(args) -> int:
    text = _read_text(args.model)
    wrg = parse_wrg(text)
    decision = solve_modular(wrg, B_override=args.sig_bound)
    answer = {"winner": decision.winner, "bound": decision.bound,
              "definitive": decision.definitive}
    cert = None
    if decision.definitive and decision.winner == "player1":
        cert = _build_wrg_modular_p1(decision)
    elif decision.definitive and decision.winner == "player2":
        try:
            cert = _build_wrg_modular_p2(text, decision.bound)
        except BudgetError:
            cert = None
    return _finish(args, "solve-wrg", text, answer, cert)


# ---------------------------------------------------------------------------
# Oracle commands


def _cmd_oracle_mmpg(args) -> int:
    text = _read_text(args.model)
    g = parse_game(text)
    g.require_total()
    win1, win2 = brute_mmpg(g)
    answer = {"win1": sorted(win1), "win2": sorted(win2)}
    try:
        cert = _build_mmpg_cert(g, win1, win2)
    except BudgetError:
        cert = None
    return _finish(args, "oracle-mmpg", text, answer, cert)


def _cmd_oracle_wps(args) -> int:
    text = _read_text(args.model)
    w = parse_wps(text)
    if args.head is None:
        head = (BOT, w.initial)
    else:
        sym, q = args.head
        if sym not in w.alphabet or q not in w.states:
            raise ModelError("unknown head (%r, %r)" % (sym, q))
        head = (sym, q)
    res = brute_wps(w, head, L=args.oracle_depth)
    answer = {"answer": res.answer, "head": list(res.head), "L": res.L}
    if res.answer != "yes":
        return _finish(args, "oracle-wps", text, answer, None)
    try:
        cert = _build_wps_yes_from_brute(text, res)
    except BudgetError:
        cert = None
    return _finish(args, "oracle-wps", text, answer, cert)


def _cmd_oracle_wrg(args) -> int:
    text = _read_text(args.model)
    wrg = parse_wrg(text)
    res = brute_wrg(wrg)
    answer = {"winner": res.winner}
    try:
        cert = _build_wrg_brute_cert(res)
    except BudgetError:
        cert = None
    return _finish(args, "oracle-wrg", text, answer, cert)


# ---------------------------------------------------------------------------
# Generator commands


def _parse_cnf_flag(text: str, nvars: Optional[int]) -> Cnf3:
    clauses = []
    for part in text.split(";"):
        lits = part.split(",")
        if len(lits) != 3:
            raise ModelError(
                "every clause needs exactly three comma-separated literals")
        try:
            clauses.append(tuple(int(x) for x in lits))
        except ValueError:
            raise ModelError("literals must be signed integers") from None
    n = nvars if nvars is not None else max(
        abs(l) for cl in clauses for l in cl)
    return Cnf3(n, tuple(clauses))


def _cmd_gen_sat(args) -> int:
    if args.cnf is not None:
        phi = _parse_cnf_flag(args.cnf, args.vars)
    else:
        if args.seed is None:
            raise ModelError("gen-sat needs --cnf or --seed")
        nv = 3 if args.vars is None else args.vars
        nc = 3 if args.clauses is None else args.clauses
        if nv < 1 or nc < 1:
            raise ModelError("--vars and --clauses must be positive")
        rng = random.Random(args.seed)
        clauses = tuple(
            tuple(rng.randint(1, nv) * rng.choice((1, -1)) for _ in range(3))
            for _ in range(nc))
        phi = Cnf3(nv, clauses)
    _emit(wrg_to_doc(sat_to_wrg(phi)), args)
    return EXIT_OK


def _cmd_gen_parity_wrg(args) -> int:
    P = parse_parity(_read_text(args.model))
    _emit(wrg_to_doc(parity_to_wrg(P)), args)
    return EXIT_OK


def _cmd_gen_zk_wrg(args) -> int:
    text = _read_text(args.model)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError("invalid JSON: %s" % exc) from None
    if not isinstance(doc, dict) or not {"game", "nu", "init"} <= set(doc):
        raise ModelError('input needs "game", "nu", and "init"')
    nu = doc["nu"]
    if (not isinstance(nu, list)
            or not all(isinstance(x, int) and not isinstance(x, bool)
                       for x in nu)):
        raise ModelError('"nu" must be a list of integers')
    if not isinstance(doc["init"], str):
        raise ModelError('"init" must name a vertex')
    R = ZkReachGame(parse_game(json.dumps(doc["game"])), tuple(nu), doc["init"])
    _emit(wrg_to_doc(zk_reach_to_wrg(R)), args)
    return EXIT_OK


def _cmd_gen_random(args) -> int:
    if args.kind == "game":
        g = random_game(args.seed,
                        n=4 if args.n is None else args.n,
                        k=2 if args.k is None else args.k,
                        max_w=2 if args.max_w is None else args.max_w)
        _emit(game_to_doc(g), args)
    elif args.kind == "wps":
        w = random_wps(args.seed,
                       n_states=2 if args.n is None else args.n,
                       n_letters=1,
                       k=2 if args.k is None else args.k,
                       max_w=2 if args.max_w is None else args.max_w)
        _emit(wps_to_doc(w), args)
    else:
        if args.k is not None:
            raise ModelError("--k does not apply to random recursive games")
        wrg = random_wrg(args.seed,
                         n_modules=2 if args.n is None else args.n,
                         max_w=1 if args.max_w is None else args.max_w)
        _emit(wrg_to_doc(wrg), args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def _cmd_verify(args) -> int:
    if args.model == "-" and args.cert == "-":
        raise ModelError('at most one of MODEL and CERT may be "-"')
    model_text = _read_text(args.model)
    cert_text = _read_text(args.cert)
    try:
        doc = json.loads(cert_text)
    except json.JSONDecodeError as exc:
        raise ModelError("certificate document is not valid JSON: %s" % exc) from None
    if isinstance(doc, dict) and "kind" not in doc and "certificate" in doc:
        doc = doc["certificate"]
    ok, why = certs.verify_certificate(model_text, doc)
    if ok:
        _emit({"command": "verify",
               "answer": {"accepted": True, "kind": doc["kind"]},
               "certificate": None}, args)
        return EXIT_OK
    _emit({"command": "verify",
           "answer": {"accepted": False, "report": "certificate rejected",
                      "reason": why},
           "certificate": None}, args)
    return EXIT_INVARIANT


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limavg",
        description="Solvers, oracles, and generators for games with "
                    "long-run average objectives, with checkable "
                    "certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str, model: bool = True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if model:
            p.add_argument("model", nargs="?", default="-", metavar="MODEL",
                           help='input document path, or "-" for stdin '
                                "(default)")
        p.add_argument("--format", choices=("human", "structured"),
                       default="human",
                       help="output style: indented or canonical JSON")
        p.add_argument("--out", metavar="PATH",
                       help="write the output document here instead of stdout")
        return p

    add("solve-mp1", _cmd_solve_mp1,
        "winner partition of a one-dimension mean-payoff game")

    p = add("solve-mmpg", _cmd_solve_mmpg,
            "winner partition of a multidimensional mean-payoff game")
    p.add_argument("--lambda-cap", type=int, default=2, dest="lambda_cap",
                   metavar="N",
                   help="coefficient level explored by the direction sweep")

    add("solve-parity", _cmd_solve_parity,
        "winner partition of an edge-priority parity game")

    add("decide-wps", _cmd_decide_wps,
        "nonnegative long-run average run existence in a weighted "
        "pushdown system")

    p = add("solve-wrg", _cmd_solve_wrg,
            "modular winner of a recursive game graph")
    p.add_argument("--sig-bound", type=int, dest="sig_bound", metavar="B",
                   help="cap on finite signature values (default: the "
                        "definitive bound)")

    add("oracle-mmpg", _cmd_oracle_mmpg,
        "brute-force reference partition of a multidimensional "
        "mean-payoff game")

    p = add("oracle-wps", _cmd_oracle_wps,
            "depth-bounded brute-force pushdown decision at one head")
    p.add_argument("--head", nargs=2, metavar=("SYM", "STATE"),
                   help="decide at this head (default: stack bottom and the "
                        "initial state)")
    p.add_argument("--oracle-depth", type=int, default=8, dest="oracle_depth",
                   metavar="L", help="maximum loop length explored")

    add("oracle-wrg", _cmd_oracle_wrg,
        "brute-force reference winner of a recursive game graph")

    p = add("gen-sat", _cmd_gen_sat,
            "three-literal formula to recursive game", model=False)
    p.add_argument("--cnf", metavar="SPEC",
                   help='formula as "1,-2,3;2,-3,-4": clauses split by '
                        "semicolons, three signed literals each")
    p.add_argument("--vars", type=int, metavar="V",
                   help="variable count (default: largest index used, or 3)")
    p.add_argument("--clauses", type=int, metavar="C",
                   help="clause count for the seeded generator (default 3)")
    p.add_argument("--seed", type=int, metavar="N",
                   help="generate a random formula instead of --cnf")

    add("gen-parity-wrg", _cmd_gen_parity_wrg,
        "parity game to recursive game with geometric weights")

    add("gen-zk-wrg", _cmd_gen_zk_wrg,
        "zero-reachability counter game to recursive game")

    p = add("gen-random", _cmd_gen_random,
            "seeded random instance", model=False)
    p.add_argument("--kind", choices=("game", "wps", "wrg"), required=True,
                   help="which model family to generate")
    p.add_argument("--seed", type=int, required=True, metavar="N")
    p.add_argument("--n", type=int, metavar="N",
                   help="vertices, states, or modules")
    p.add_argument("--k", type=int, metavar="K", help="weight dimension")
    p.add_argument("--max-w", type=int, dest="max_w", metavar="W",
                   help="largest absolute weight")

    p = add("verify", _cmd_verify,
            "re-check a certificate document against a model", model=False)
    p.add_argument("model", metavar="MODEL",
                   help='model document path, or "-" for stdin')
    p.add_argument("cert", metavar="CERT",
                   help='certificate document path, or "-" for stdin; result '
                        "envelopes are unwrapped")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return 0 if code is None else int(code)
    try:
        return args.func(args)
    except ModelError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_MODEL
    except (BudgetError, GuardError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except InvariantError as exc:
        print("internal error: %s" % exc, file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
