"""Instance generators: formula and game translations into recursive
games, a counter-reachability translation, and seeded random model
factories for the test corpora.

Everything here is a deterministic function of its inputs (and seed);
outputs are validated before being returned.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .core import Edge, GameGraph, ModelError, P1, P2, build_game
from .parity import ParityGame
from .wps import SKIP, POP, Transition, Wps, push
from .wrg import Wrg, WrgModule, WrgTransition, build_wrg

__all__ = [
    "Cnf3",
    "cnf3_eval",
    "sat_to_wrg",
    "parity_to_wrg",
    "ZkReachGame",
    "zk_reach_to_wrg",
    "module_replay_weight",
    "random_game",
    "random_wps",
    "random_wrg",
]


# ---------------------------------------------------------------------------
# 3SAT


@dataclass(frozen=True)
class Cnf3:
    """CNF with exactly three (possibly repeated) literals per clause.
    Literals are signed 1-based variable indexes."""

    n: int
    clauses: Tuple[Tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise ModelError("variable count must be a positive integer")
        for cl in self.clauses:
            if len(cl) != 3:
                raise ModelError("every clause carries exactly three literals")
            for lit in cl:
                if not isinstance(lit, int) or isinstance(lit, bool) or lit == 0 or abs(lit) > self.n:
                    raise ModelError("literal %r out of range for %d variables" % (lit, self.n))

    def to_doc(self) -> dict:
        return {"n": self.n, "clauses": [list(cl) for cl in self.clauses]}

    @classmethod
    def from_doc(cls, doc: object) -> "Cnf3":
        if (not isinstance(doc, dict) or not isinstance(doc.get("n"), int)
                or not isinstance(doc.get("clauses"), list)):
            raise ModelError("formula document needs \"n\" and \"clauses\"")
        clauses = []
        for cl in doc["clauses"]:
            if not isinstance(cl, list) or len(cl) != 3:
                raise ModelError("clauses are 3-element lists")
            clauses.append((cl[0], cl[1], cl[2]))
        return cls(doc["n"], tuple(clauses))


def cnf3_eval(phi: Cnf3, assignment: Sequence[bool]) -> bool:
    """Evaluate under assignment[i-1] for variable i."""
    if len(assignment) != phi.n:
        raise ModelError("assignment length mismatch")
    for cl in phi.clauses:
        if not any((lit > 0) == assignment[abs(lit) - 1] for lit in cl):
            return False
    return True


def _lit_exit(lit: int) -> str:
    return ("xp%d" if lit > 0 else "xn%d") % abs(lit)


def sat_to_wrg(phi: Cnf3) -> Wrg:
    """Two-module satisfiability game with weights in {0, -1}.

    The assignment module "A1" lets player 2 query any variable at the
    entrance; player 1 answers by leaving through that variable's true
    or false exit. Since modular strategies are memoryless per module,
    the answers are forced to be consistent across all queries, which
    is what makes the translation work. The clause module "A0" chains
    one gadget per clause, three assignment queries per gadget: a
    truthful literal advances to the next clause, a falsified literal
    advances within the gadget, a query about an unrelated variable
    concedes to the harmless sink "r" (0 loop). Falsifying a whole
    gadget reaches "nr" and its -1 loop. Player 1 wins from "A0_en"
    exactly when the formula is satisfiable.
    """
    z = (0,)
    n, m = phi.n, len(phi.clauses)
    exits = []
    for i in range(1, n + 1):
        exits.extend(["xp%d" % i, "xn%d" % i])
    a1_nodes: List[Tuple[str, int]] = [("A1_en", P2)]
    a1_nodes += [("v%d" % i, P1) for i in range(1, n + 1)]
    a1_nodes += [(x, P1) for x in exits]
    a1_trans: List[WrgTransition] = []
    for i in range(1, n + 1):
        a1_trans.append(WrgTransition("A1_en", "v%d" % i, z))
        a1_trans.append(WrgTransition("v%d" % i, "xp%d" % i, z))
        a1_trans.append(WrgTransition("v%d" % i, "xn%d" % i, z))
    a1 = WrgModule("A1", "A1_en", tuple(exits), tuple(a1_nodes), (), tuple(a1_trans))

    a0_nodes: List[Tuple[str, int]] = [("A0_en", P1), ("r", P1), ("nr", P1)]
    boxes: List[Tuple[str, int, str]] = []
    a0_trans: List[WrgTransition] = [
        WrgTransition("r", "r", z),
        WrgTransition("nr", "nr", (-1,)),
    ]
    if m == 0:
        a0_trans.append(WrgTransition("A0_en", "r", z))
    else:
        a0_trans.append(WrgTransition("A0_en", ("call", "c1_1"), z))
    for i in range(1, m + 1):
        for j in range(1, 4):
            box = "c%d_%d" % (i, j)
            boxes.append((box, P1, "A1"))
            lit = phi.clauses[i - 1][j - 1]
            good, bad = _lit_exit(lit), _lit_exit(-lit)
            good_dst: object = "r" if i == m else ("call", "c%d_1" % (i + 1))
            bad_dst: object = "nr" if j == 3 else ("call", "c%d_%d" % (i, j + 1))
            for x in exits:
                if x == good:
                    dst = good_dst
                elif x == bad:
                    dst = bad_dst
                else:
                    dst = "r"
                a0_trans.append(WrgTransition(("ret", box, x), dst, z))
    a0 = WrgModule("A0", "A0_en", (), tuple(a0_nodes), tuple(boxes), tuple(a0_trans))
    return build_wrg(1, [a0, a1], "A0")


# ---------------------------------------------------------------------------
# Parity games


def _unit_chain(name: str, n: int, unit: int) -> WrgModule:
    nodes = [("%ss%d" % (name, t), P1) for t in range(n + 1)]
    trans = [WrgTransition("%ss%d" % (name, t), "%ss%d" % (name, t + 1), (unit,))
             for t in range(n)]
    return WrgModule(name, "%ss0" % name, ("%ss%d" % (name, n),),
                     tuple(nodes), (), tuple(trans))


def _box_chain(name: str, n: int, callee: str, callee_exit: str) -> WrgModule:
    nodes = [("%ss%d" % (name, t), P1) for t in range(n + 1)]
    boxes = [("%sb%d" % (name, t), P1, callee) for t in range(1, n + 1)]
    trans: List[WrgTransition] = []
    for t in range(1, n + 1):
        trans.append(WrgTransition("%ss%d" % (name, t - 1), ("call", "%sb%d" % (name, t)), (0,)))
        trans.append(WrgTransition(("ret", "%sb%d" % (name, t), callee_exit),
                                   "%ss%d" % (name, t), (0,)))
    return WrgModule(name, "%ss0" % name, ("%ss%d" % (name, n),),
                     tuple(nodes), tuple(boxes), tuple(trans))


def parity_to_wrg(P: ParityGame, initial: Optional[str] = None) -> Wrg:
    """Recursive game with 2*kp+1 modules and weights in {-1, 0, +1}.

    Each priority-p edge of the parity game routes through a box that
    invokes the amplifier module "P<p>" (even p) or "N<p>" (odd p);
    replaying amplifier i yields total weight +n^i or -n^i, built from
    unit-weight chains of length n and nested invocation. The dominant
    priority on any cycle then decides the sign of its weight, so the
    mean-payoff winner of the recursive game matches the parity winner
    under the largest-recurring-priority reading. `initial` picks the
    main module's entry vertex (least vertex id by default).
    """
    g = P.graph
    n = g.n
    kp = P.kp
    if initial is None:
        initial = min(g.vertices)
    if initial not in set(g.vertices):
        raise ModelError("initial vertex %r is not in the game" % initial)

    modules: List[WrgModule] = []
    exits_of: Dict[str, str] = {}
    for i in range(1, kp + 1):
        for prefix, unit in (("P", 1), ("N", -1)):
            name = "%s%d" % (prefix, i)
            if i == 1:
                mod = _unit_chain(name, n, unit)
            else:
                callee = "%s%d" % (prefix, i - 1)
                mod = _box_chain(name, n, callee, exits_of[callee])
            exits_of[name] = mod.exits[0]
            modules.append(mod)

    main_nodes = [(v, g.owner(v)) for v in g.vertices]
    main_boxes: List[Tuple[str, int, str]] = []
    main_trans: List[WrgTransition] = []
    ordered = sorted(g.edges, key=lambda e: (e.src, e.dst))
    for j, e in enumerate(ordered):
        callee = ("P%d" if e.p % 2 == 0 else "N%d") % e.p
        box = "eb%d" % j
        main_boxes.append((box, P1, callee))
        main_trans.append(WrgTransition(e.src, ("call", box), (0,)))
        main_trans.append(WrgTransition(("ret", box, exits_of[callee]), e.dst, (0,)))
    main = WrgModule("A0", initial, (), tuple(main_nodes), tuple(main_boxes),
                     tuple(main_trans))
    return build_wrg(1, [main] + modules, "A0")


# ---------------------------------------------------------------------------
# Counter reachability


@dataclass(frozen=True)
class ZkReachGame:
    """Reach the all-zero counter vector: player 1 wins a play iff some
    prefix weight plus the offset nu is the zero vector."""

    graph: GameGraph
    nu: Tuple[int, ...]
    init_vertex: str

    def __post_init__(self) -> None:
        if len(self.nu) != self.graph.k:
            raise ModelError("offset dimension differs from the arena's")
        if self.init_vertex not in set(self.graph.vertices):
            raise ModelError("initial vertex %r missing" % self.init_vertex)


def zk_reach_to_wrg(R: ZkReachGame) -> Wrg:
    """Three modules over 2k+2 dimensions; mean-payoff equivalent of
    zero reachability. The initial module alternates two boxes forever:
    "A1" banks budget in the last two dimensions, "A2" replays the
    counter game with mirrored (+/-) weight copies so that hitting zero
    exactly is the only way to balance every dimension. Not solvable
    here (multidimensional recursion); generator corpus only.
    """
    g = R.graph
    k = g.k
    kk = 2 * k + 2

    def vec(pos: Sequence[int] = (), neg: Sequence[int] = (),
            last2: Tuple[int, int] = (0, 0)) -> Tuple[int, ...]:
        out = [0] * kk
        for i, c in enumerate(pos):
            out[i] = c
        for i, c in enumerate(neg):
            out[k + i] = -c
        out[2 * k], out[2 * k + 1] = last2
        return tuple(out)

    z = vec()
    a0 = WrgModule(
        "A0", "en", (),
        (("en", P1), ("j1", P1), ("j2", P1)),
        (("bA1", P1, "A1"), ("bA2", P1, "A2")),
        (
            WrgTransition("en", "j1", z),
            WrgTransition("j1", ("call", "bA1"), z),
            WrgTransition(("ret", "bA1", "A1ex"), "j2", z),
            WrgTransition("j2", ("call", "bA2"), z),
            WrgTransition(("ret", "bA2", "A2ex"), "j1", z),
        ))
    a1 = WrgModule(
        "A1", "A1en", ("A1ex",),
        (("A1en", P1), ("loop", P1), ("A1ex", P1)),
        (),
        (
            WrgTransition("A1en", "loop", z),
            WrgTransition("loop", "loop", vec(last2=(1, -1))),
            WrgTransition("loop", "A1ex", z),
        ))

    a2_nodes: List[Tuple[str, int]] = [("A2en", P1)]
    a2_nodes += [("g_%s" % v, g.owner(v)) for v in g.vertices]
    a2_nodes += [("vstar", P1), ("A2ex", P1)]
    a2_trans: List[WrgTransition] = [
        WrgTransition("A2en", "g_%s" % R.init_vertex, vec(pos=R.nu, neg=R.nu)),
        WrgTransition("vstar", "vstar", vec(last2=(-1, 1))),
        WrgTransition("vstar", "A2ex", z),
    ]
    for e in sorted(g.edges, key=lambda e: (e.src, e.dst)):
        a2_trans.append(WrgTransition(
            "g_%s" % e.src, "g_%s" % e.dst, vec(pos=e.w, neg=e.w, last2=(-1, 1))))
    for v in g.vertices:
        if g.owner(v) == P1:
            a2_trans.append(WrgTransition("g_%s" % v, "vstar", z))
    a2 = WrgModule("A2", "A2en", ("A2ex",), tuple(a2_nodes), (), tuple(a2_trans))
    return build_wrg(kk, [a0, a1, a2], "A0")


# ---------------------------------------------------------------------------
# Replay


def module_replay_weight(wrg: Wrg, module_name: str,
                         step_guard: int = 100000) -> Tuple[str, Tuple[int, ...]]:
    """Exit and total weight of a module in which every position has a
    single transition, recursing through boxes (memoized). Raises
    ModelError when a choice or a loop blocks deterministic replay."""
    memo: Dict[str, Tuple[str, Tuple[int, ...]]] = {}

    def replay(name: str, active: Tuple[str, ...]) -> Tuple[str, Tuple[int, ...]]:
        if name in memo:
            return memo[name]
        if name in active:
            raise ModelError("module %r recurses into itself during replay" % name)
        mod = wrg.module(name)
        exit_set = set(mod.exits)
        total = [0] * wrg.k
        pos: object = mod.entry
        steps = 0
        while True:
            if isinstance(pos, str) and pos in exit_set:
                memo[name] = (pos, tuple(total))
                return memo[name]
            outs = mod.outgoing(pos)
            if len(outs) != 1:
                raise ModelError(
                    "module %r position %r has %d transitions; replay needs "
                    "exactly one" % (name, pos, len(outs)))
            t = outs[0]
            for i, c in enumerate(t.w):
                total[i] += c
            if isinstance(t.dst, str):
                pos = t.dst
            else:
                box = t.dst[1]
                callee_exit, w = replay(mod.box_callee(box), active + (name,))
                for i, c in enumerate(w):
                    total[i] += c
                pos = ("ret", box, callee_exit)
            steps += 1
            if steps > step_guard:
                raise ModelError("module %r does not replay to an exit" % name)

    return replay(module_name, ())


# ---------------------------------------------------------------------------
# Seeded random factories


def random_game(seed: int, n: int, k: int, max_w: int, max_out: int = 2,
                force_owner: Optional[int] = None,
                priorities: Optional[int] = None) -> GameGraph:
    """Total arena with n vertices, out-degrees 1..max_out, weights in
    [-max_w, max_w]^k; optionally all vertices owned by one player, and
    optionally edge priorities 1..priorities for parity corpora."""
    if n < 1 or k < 1 or max_w < 0 or max_out < 1:
        raise ModelError("sizes must be positive (max_w may be 0)")
    rng = random.Random(seed)
    ids = ["v%d" % i for i in range(n)]
    vertices = [(v, force_owner if force_owner is not None else rng.choice((P1, P2)))
                for v in ids]
    edges = []
    for v in ids:
        deg = rng.randint(1, min(max_out, n))
        for dst in rng.sample(ids, deg):
            w = tuple(rng.randint(-max_w, max_w) for _ in range(k))
            p = rng.randint(1, priorities) if priorities is not None else None
            edges.append((v, dst, w) if p is None else (v, dst, w, p))
    return build_game(k, vertices, edges)


def random_wps(seed: int, n_states: int, n_letters: int, k: int, max_w: int,
               max_transitions: int = 6) -> Wps:
    """Small weighted pushdown system; n_letters counts the pushable
    symbols beside the stack bottom."""
    if n_states < 1 or n_letters < 0 or k < 1 or max_w < 0:
        raise ModelError("sizes must be positive (max_w, n_letters may be 0)")
    rng = random.Random(seed)
    states = tuple("q%d" % i for i in range(n_states))
    letters = tuple("a%d" % i for i in range(n_letters))
    alphabet = ("bot",) + letters
    chosen = {}
    for _ in range(rng.randint(1, max_transitions)):
        src = rng.choice(states)
        top = rng.choice(alphabet)
        dst = rng.choice(states)
        ops = [SKIP]
        if letters:
            ops.append(push(rng.choice(letters)))
        if top != "bot":
            ops.append(POP)
        op = rng.choice(ops)
        w = tuple(rng.randint(-max_w, max_w) for _ in range(k))
        chosen[(src, top, dst, op)] = Transition(src, top, dst, op, w)
    trans = tuple(sorted(chosen.values()))
    return Wps(k=k, states=states, alphabet=alphabet, initial=states[0],
               transitions=trans)


def random_wrg(seed: int, n_modules: int = 2, max_nodes: int = 3, max_w: int = 1,
               max_exits: int = 2, max_boxes: int = 2) -> Wrg:
    """Recursive game over 1 dimension: module "A0" is initial and
    exitless, the others expose 1..max_exits exits; boxes call any
    non-initial module (occasionally recursively). Every non-exit
    position gets 1..2 random transitions, so the output is total."""
    if n_modules < 2 or max_nodes < 2 or max_exits < 1 or max_w < 0:
        raise ModelError("need at least two modules and two nodes")
    rng = random.Random(seed)
    names = ["A%d" % i for i in range(n_modules)]
    callable_names = names[1:]

    modules = []
    for mi, name in enumerate(names):
        n_nodes = rng.randint(2, max_nodes) if mi else rng.randint(1, max_nodes)
        node_ids = ["%sv%d" % (name, i) for i in range(n_nodes)]
        nodes = [(v, rng.choice((P1, P2))) for v in node_ids]
        entry = node_ids[0]
        if mi == 0:
            exits: List[str] = []
        else:
            n_exits = rng.randint(1, min(max_exits, n_nodes - 1))
            exits = node_ids[-n_exits:]
        n_boxes = rng.randint(0, max_boxes) if mi == 0 else (
            1 if rng.random() < 0.25 else 0)
        boxes = []
        for bi in range(n_boxes):
            boxes.append(("%sb%d" % (name, bi), rng.choice((P1, P2)),
                          rng.choice(callable_names)))
        exit_set = set(exits)
        internal = [v for v in node_ids if v not in exit_set]
        targets: List[object] = list(node_ids) + [("call", b) for b, _, _ in boxes]
        modules.append((name, entry, exits, nodes, boxes, internal, targets))

    exits_by_name = {m[0]: m[2] for m in modules}
    built = []
    for name, entry, exits, nodes, boxes, internal, targets in modules:
        sources: List[object] = list(internal)
        for b, _, callee in boxes:
            for x in exits_by_name[callee]:
                sources.append(("ret", b, x))
        trans = []
        seen = set()
        for src in sources:
            for dst in rng.sample(targets, rng.randint(1, min(2, len(targets)))):
                key = (src, dst)
                if key in seen:
                    continue
                seen.add(key)
                trans.append(WrgTransition(src, dst, (rng.randint(-max_w, max_w),)))
        built.append(WrgModule(name, entry, tuple(exits), tuple(nodes),
                               tuple(boxes), tuple(trans)))
    return build_wrg(1, built, "A0")
