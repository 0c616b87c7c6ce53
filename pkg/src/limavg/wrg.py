"""Weighted recursive game graphs with box-structured modules.

A recursive game is a family of modules. Each module owns nodes, boxes
that invoke other modules, a unique entrance, and a set of exit nodes;
transitions carry integer weight vectors. A play starts in the initial
module and treats boxes like procedure calls: entering a box pushes a
frame and jumps to the callee's entrance, leaving the callee through an
exit pops back to the matching return position of the box. Player 1
tries to keep the long-run average weight nonnegative while both
players are restricted to modular strategies, which see only the local
history of the current invocation.

The decision procedure works through exit signatures. A signature
assigns every exit a guarantee in {-omega} U Z U {+inf}: the least
weight player 1 can promise for any same-level play from the module's
entrance to that exit ("-omega" concedes the exit, "+inf" claims it is
never reached). Feasibility of one signature decomposes into one
finite mean-payoff game per module (`build_verification_game`,
`check_signature_feasible`), and the winner of the recursive game is
determined by searching for a feasible signature of the augmented game
produced by `build_wrg_prime` (`enumerate_signatures`,
`solve_modular`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .core import (
    P1,
    P2,
    BudgetError,
    Edge,
    GameGraph,
    InvariantError,
    ModelError,
    canonical_json,
)
from .mp1 import solve_mp1

__all__ = [
    "MINUS_OMEGA",
    "PLUS_INF",
    "SigValue",
    "sig_le",
    "WrgTransition",
    "WrgModule",
    "Wrg",
    "build_wrg",
    "validate_wrg",
    "parse_wrg",
    "wrg_to_doc",
    "serialize_wrg",
    "ell_wrg",
    "full_sig_bound",
    "SignatureFn",
    "signature_to_doc",
    "signature_from_doc",
    "reentry_exit_id",
    "prime_entry_id",
    "return_vertex_id",
    "LOSING_SINK",
    "build_wrg_prime",
    "build_verification_game",
    "FeasibilityResult",
    "check_signature_feasible",
    "FoundSignature",
    "enumerate_signatures",
    "DEFAULT_ENUM_BUDGET",
    "WrgDecision",
    "solve_modular",
    "project_strategies",
]


# ---------------------------------------------------------------------------
# Signature values


class _SigExtreme:
    """Marker for the two non-integer signature values."""

    __slots__ = ("_label",)

    def __init__(self, label: str) -> None:
        self._label = label

    def __repr__(self) -> str:
        return self._label


MINUS_OMEGA = _SigExtreme("-omega")
PLUS_INF = _SigExtreme("+inf")

SigValue = Union[int, _SigExtreme]


def _sig_rank(v: SigValue) -> Tuple[int, int]:
    if v is MINUS_OMEGA:
        return (-1, 0)
    if v is PLUS_INF:
        return (1, 0)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ModelError("signature values must be integers, -omega, or +inf")
    return (0, v)


def sig_le(a: SigValue, b: SigValue) -> bool:
    """Total order on signature values: -omega < integers < +inf."""
    return _sig_rank(a) <= _sig_rank(b)


def _sig_to_json(v: SigValue) -> Union[int, str]:
    if v is MINUS_OMEGA:
        return "-omega"
    if v is PLUS_INF:
        return "+inf"
    return v


def _sig_from_json(raw: object) -> SigValue:
    if raw == "-omega":
        return MINUS_OMEGA
    if raw == "+inf":
        return PLUS_INF
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ModelError("signature entries must be integers, \"-omega\", or \"+inf\"")
    return raw


# ---------------------------------------------------------------------------
# Model


SrcPos = Union[str, Tuple[str, str, str]]  # node id or ("ret", box, exit)
DstPos = Union[str, Tuple[str, str]]  # node id or ("call", box)


@dataclass(frozen=True)
class WrgTransition:
    """One module transition; src is a node or a box-return position,
    dst is a node or a box-call position."""

    src: SrcPos
    dst: DstPos
    w: Tuple[int, ...]


def _src_key(src: SrcPos) -> Tuple[int, str, str]:
    if isinstance(src, str):
        return (0, src, "")
    return (1, src[1], src[2])


def _dst_key(dst: DstPos) -> Tuple[int, str]:
    if isinstance(dst, str):
        return (0, dst)
    return (1, dst[1])


@dataclass(frozen=True)
class WrgModule:
    """One module: nodes and boxes with owners, a unique entrance node,
    exit nodes without outgoing transitions, and weighted transitions."""

    name: str
    entry: str
    exits: Tuple[str, ...]
    nodes: Tuple[Tuple[str, int], ...]
    boxes: Tuple[Tuple[str, int, str], ...]  # (id, owner, callee module)
    transitions: Tuple[WrgTransition, ...]

    def __post_init__(self) -> None:
        out: Dict[SrcPos, List[WrgTransition]] = {}
        for t in self.transitions:
            out.setdefault(t.src, []).append(t)
        frozen = {
            src: tuple(sorted(ts, key=lambda t: _dst_key(t.dst)))
            for src, ts in out.items()
        }
        object.__setattr__(self, "_out", frozen)
        object.__setattr__(self, "_owner", {v: o for v, o in self.nodes})
        object.__setattr__(self, "_box", {b: (o, c) for b, o, c in self.boxes})

    @property
    def node_ids(self) -> FrozenSet[str]:
        return frozenset(self._owner)

    def node_owner(self, node: str) -> int:
        return self._owner[node]

    def box_callee(self, box: str) -> str:
        return self._box[box][1]

    def box_owner(self, box: str) -> int:
        return self._box[box][0]

    def outgoing(self, src: SrcPos) -> Tuple[WrgTransition, ...]:
        return self._out.get(src, ())

    def position_owner(self, pos: SrcPos) -> int:
        """Owner of a decision position: a node's own owner, or the
        owning player of the box for a return position."""
        if isinstance(pos, str):
            return self._owner[pos]
        return self._box[pos[1]][0]

    @property
    def size(self) -> int:
        return len(self.nodes) + len(self.boxes)


@dataclass(frozen=True)
class Wrg:
    """A recursive game: module list (first-class order kept), the
    initial module's name, and the weight dimension k."""

    k: int
    modules: Tuple[WrgModule, ...]
    initial: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_name", {m.name: m for m in self.modules})

    def module(self, name: str) -> WrgModule:
        try:
            return self._by_name[name]
        except KeyError:
            raise ModelError("unknown module %r" % name) from None

    @property
    def module_names(self) -> Tuple[str, ...]:
        return tuple(m.name for m in self.modules)

    @property
    def b(self) -> int:
        """Module count."""
        return len(self.modules)

    @property
    def e(self) -> int:
        """Total exit count across modules."""
        return sum(len(m.exits) for m in self.modules)

    @property
    def n_max(self) -> int:
        """Largest module size (nodes plus boxes)."""
        return max(m.size for m in self.modules)

    @property
    def W(self) -> int:
        w = 0
        for m in self.modules:
            for t in m.transitions:
                for c in t.w:
                    w = max(w, abs(c))
        return w

    def all_exits(self) -> Tuple[str, ...]:
        """Every exit id, module order first, declared exit order inside."""
        out: List[str] = []
        for m in self.modules:
            out.extend(m.exits)
        return tuple(out)


def ell_wrg(wrg: Wrg) -> int:
    """Finite-range radius for signature values: (b*n)^(b*e+1) with b
    modules, n the largest module, e total exits. Any feasible
    signature of a winnable game fits inside [-W*ell, W*ell]."""
    return (wrg.b * wrg.n_max) ** (wrg.b * wrg.e + 1)


def full_sig_bound(wrg: Wrg) -> int:
    """The bound at which an exhausted signature search is definitive."""
    return wrg.W * ell_wrg(wrg)


# ---------------------------------------------------------------------------
# Validation

_RESERVED_MARK = "__"


def _check_ids(kind: str, ident: object) -> str:
    if not isinstance(ident, str) or not ident:
        raise ModelError("%s id must be a nonempty string" % kind)
    return ident


def validate_wrg(wrg: Wrg, allow_reserved: bool = False) -> None:
    """Structural checks; raises ModelError. Reserved double-underscore
    ids are rejected unless allow_reserved (they are claimed by the
    derived constructions in this module)."""
    if wrg.k < 1:
        raise ModelError("weight dimension must be at least 1")
    names = [m.name for m in wrg.modules]
    if len(set(names)) != len(names):
        raise ModelError("duplicate module names")
    if not wrg.modules:
        raise ModelError("a recursive game needs at least one module")
    if wrg.initial not in set(names):
        raise ModelError("initial module %r is not defined" % wrg.initial)

    seen_ids: Dict[str, str] = {}
    for m in wrg.modules:
        for ident in [m.name] + [v for v, _ in m.nodes] + [b for b, _, _ in m.boxes]:
            if not allow_reserved and _RESERVED_MARK in ident:
                raise ModelError(
                    "id %r uses the reserved double underscore" % ident)
        for v, owner in m.nodes:
            _check_ids("node", v)
            if owner not in (P1, P2):
                raise ModelError("node %r has invalid owner %r" % (v, owner))
            if v in seen_ids:
                raise ModelError("id %r used in modules %r and %r" % (v, seen_ids[v], m.name))
            seen_ids[v] = m.name
        for b, owner, callee in m.boxes:
            _check_ids("box", b)
            if owner not in (P1, P2):
                raise ModelError("box %r has invalid owner %r" % (b, owner))
            if b in seen_ids:
                raise ModelError("id %r used in modules %r and %r" % (b, seen_ids[b], m.name))
            seen_ids[b] = m.name
            if callee not in set(names):
                raise ModelError("box %r calls unknown module %r" % (b, callee))
            if callee == wrg.initial:
                raise ModelError(
                    "box %r invokes the initial module; the initial module "
                    "must not be invokable" % b)

    for m in wrg.modules:
        node_ids = m.node_ids
        exit_set = set(m.exits)
        if len(exit_set) != len(m.exits):
            raise ModelError("module %r repeats an exit" % m.name)
        if not exit_set <= node_ids:
            raise ModelError("module %r lists a non-node exit" % m.name)
        if m.entry not in node_ids:
            raise ModelError("module %r entry %r is not a node" % (m.name, m.entry))
        if m.entry in exit_set:
            raise ModelError("module %r entry cannot be an exit" % m.name)
        if m.name != wrg.initial and not m.exits:
            raise ModelError("non-initial module %r needs at least one exit" % m.name)

        seen_pairs = set()
        for t in m.transitions:
            if len(t.w) != wrg.k or not all(
                    isinstance(c, int) and not isinstance(c, bool) for c in t.w):
                raise ModelError(
                    "module %r has a transition whose weight is not a "
                    "%d-vector of integers" % (m.name, wrg.k))
            if isinstance(t.src, str):
                if t.src not in node_ids:
                    raise ModelError("module %r transition from unknown node %r" % (m.name, t.src))
                if t.src in exit_set:
                    raise ModelError("module %r has a transition out of exit %r" % (m.name, t.src))
            else:
                tag, box, ex = t.src
                if tag != "ret" or box not in m._box:
                    raise ModelError("module %r transition from unknown return %r" % (m.name, (box, ex)))
                callee = m.box_callee(box)
                if ex not in set(wrg.module(callee).exits):
                    raise ModelError(
                        "return (%r, %r) names no exit of callee %r" % (box, ex, callee))
            if isinstance(t.dst, str):
                if t.dst not in node_ids:
                    raise ModelError("module %r transition into unknown node %r" % (m.name, t.dst))
            else:
                tag, box = t.dst
                if tag != "call" or box not in m._box:
                    raise ModelError("module %r transition into unknown box %r" % (m.name, box))
            pair = (_src_key(t.src), _dst_key(t.dst))
            if pair in seen_pairs:
                raise ModelError(
                    "module %r has parallel transitions between the same "
                    "positions" % m.name)
            seen_pairs.add(pair)

        # totality: every non-exit node and every return can move
        for v in sorted(node_ids - exit_set):
            if not m.outgoing(v):
                raise ModelError("module %r node %r has no outgoing transition" % (m.name, v))
        for b, _, callee in m.boxes:
            for ex in wrg.module(callee).exits:
                if not m.outgoing(("ret", b, ex)):
                    raise ModelError(
                        "module %r return (%r, %r) has no outgoing transition" % (m.name, b, ex))


def build_wrg(k: int, modules: Sequence[WrgModule], initial: str) -> Wrg:
    """Validating constructor for user-supplied games."""
    wrg = Wrg(k, tuple(modules), initial)
    validate_wrg(wrg)
    return wrg


# ---------------------------------------------------------------------------
# JSON round-trip


def _transition_from_doc(raw: object, k: int) -> WrgTransition:
    if not isinstance(raw, dict):
        raise ModelError("transitions must be objects")
    src_raw = raw.get("src")
    dst_raw = raw.get("dst")
    w_raw = raw.get("w")
    if isinstance(src_raw, str):
        src: SrcPos = src_raw
    elif isinstance(src_raw, list) and len(src_raw) == 2 and all(
            isinstance(x, str) for x in src_raw):
        if src_raw[1] == "en":
            raise ModelError("a transition cannot start at a box entrance")
        src = ("ret", src_raw[0], src_raw[1])
    else:
        raise ModelError("transition src must be a node id or [box, exit]")
    if isinstance(dst_raw, str):
        dst: DstPos = dst_raw
    elif isinstance(dst_raw, list) and len(dst_raw) == 2 and all(
            isinstance(x, str) for x in dst_raw):
        if dst_raw[1] != "en":
            raise ModelError("transitions into a box must target its entrance [box, \"en\"]")
        dst = ("call", dst_raw[0])
    else:
        raise ModelError("transition dst must be a node id or [box, \"en\"]")
    if isinstance(w_raw, bool):
        raise ModelError("transition weight must be an integer")
    if isinstance(w_raw, int):
        if k != 1:
            raise ModelError("scalar weight in a %d-dimensional game" % k)
        w: Tuple[int, ...] = (w_raw,)
    elif isinstance(w_raw, list) and len(w_raw) == k and all(
            isinstance(c, int) and not isinstance(c, bool) for c in w_raw):
        w = tuple(w_raw)
    else:
        raise ModelError("transition weight must be an int or a length-%d list" % k)
    return WrgTransition(src, dst, w)


def parse_wrg(text: str) -> Wrg:
    """Parse the JSON recursive-game format; raises ModelError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError("invalid JSON: %s" % exc) from None
    if not isinstance(doc, dict):
        raise ModelError("top level must be an object")
    k = doc.get("k", 1)
    if isinstance(k, bool) or not isinstance(k, int):
        raise ModelError("k must be an integer")
    raw_modules = doc.get("modules")
    if not isinstance(raw_modules, list) or not raw_modules:
        raise ModelError("\"modules\" must be a nonempty list")
    initial = doc.get("initial")
    if not isinstance(initial, str):
        raise ModelError("\"initial\" must name a module")
    modules: List[WrgModule] = []
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
        transitions = tuple(_transition_from_doc(tr, k) for tr in trans_raw)
        modules.append(WrgModule(name, entry, tuple(exits_raw), tuple(nodes),
                                 tuple(boxes), transitions))
    return build_wrg(k, modules, initial)


def wrg_to_doc(wrg: Wrg) -> dict:
    mods = []
    for m in wrg.modules:
        trans = []
        for t in sorted(m.transitions, key=lambda t: (_src_key(t.src), _dst_key(t.dst))):
            src = t.src if isinstance(t.src, str) else [t.src[1], t.src[2]]
            dst = t.dst if isinstance(t.dst, str) else [t.dst[1], "en"]
            w: Union[int, List[int]] = t.w[0] if wrg.k == 1 else list(t.w)
            trans.append({"src": src, "dst": dst, "w": w})
        mods.append({
            "name": m.name,
            "entry": m.entry,
            "exits": list(m.exits),
            "nodes": [{"id": v, "owner": o} for v, o in m.nodes],
            "boxes": [{"id": b, "owner": o, "calls": c} for b, o, c in m.boxes],
            "transitions": trans,
        })
    return {"k": wrg.k, "initial": wrg.initial, "modules": mods}


def serialize_wrg(wrg: Wrg) -> str:
    return canonical_json(wrg_to_doc(wrg))


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class SignatureFn:
    """Exit guarantees: finite entries confined to [-bound, bound]."""

    items: Tuple[Tuple[str, SigValue], ...]
    bound: int

    def __post_init__(self) -> None:
        for x, v in self.items:
            if v is MINUS_OMEGA or v is PLUS_INF:
                continue
            _sig_rank(v)
            if abs(v) > self.bound:
                raise ModelError(
                    "signature value %d at exit %r escapes bound %d" % (v, x, self.bound))
        object.__setattr__(self, "_map", dict(self.items))

    @classmethod
    def make(cls, values: Mapping[str, SigValue], bound: int) -> "SignatureFn":
        return cls(tuple(sorted(values.items())), bound)

    def __getitem__(self, exit_id: str) -> SigValue:
        return self._map[exit_id]

    def get(self, exit_id: str, default: Optional[SigValue] = None) -> Optional[SigValue]:
        return self._map.get(exit_id, default)

    def as_dict(self) -> Dict[str, SigValue]:
        return dict(self.items)


def signature_to_doc(sig: SignatureFn) -> dict:
    return {
        "bound": sig.bound,
        "values": {x: _sig_to_json(v) for x, v in sig.items},
    }


def signature_from_doc(doc: object) -> SignatureFn:
    if not isinstance(doc, dict) or not isinstance(doc.get("values"), dict):
        raise ModelError("signature document must carry a \"values\" object")
    bound = doc.get("bound")
    if isinstance(bound, bool) or not isinstance(bound, int) or bound < 0:
        raise ModelError("signature bound must be a nonnegative integer")
    values = {}
    for x, raw in doc["values"].items():
        if not isinstance(x, str):
            raise ModelError("signature keys must be exit ids")
        values[x] = _sig_from_json(raw)
    return SignatureFn.make(values, bound)


def _as_sig_map(wrg: Wrg, f: Union[SignatureFn, Mapping[str, SigValue]]) -> Dict[str, SigValue]:
    if isinstance(f, SignatureFn):
        fmap = f.as_dict()
    else:
        fmap = dict(f)
    missing = [x for x in wrg.all_exits() if x not in fmap]
    if missing:
        raise ModelError("signature is not total; missing exits %r" % (missing[:4],))
    for v in fmap.values():
        _sig_rank(v) if not isinstance(v, _SigExtreme) else None
    return fmap


# ---------------------------------------------------------------------------
# Reentry augmentation


def reentry_exit_id(module_name: str, target_module: str) -> str:
    return "%s__x__%s" % (module_name, target_module)


def prime_entry_id(module_name: str) -> str:
    return "%s__en" % module_name


def build_wrg_prime(wrg: Wrg) -> Wrg:
    """Augment every module with one fresh "reentry" exit per module
    name, witnessing that the play has come back to that module's
    entrance without ever popping below its frame.

    Per module A_m: the entrance is split, a new player-2 node becomes
    the entry with a 0-weight edge to the old entrance and a 0-weight
    edge to A_m's own reentry exit (taking it asserts that reaching
    this entrance already closes an entrance-to-entrance repeat of
    A_m). Every box return from a callee reentry exit is forwarded,
    weight 0, to the same-name reentry exit of the containing module,
    so the assertion travels up the call chain and lands on the exit of
    the module it speaks about. Internal transitions still target the
    old entrance node and do not re-offer the assertion; only fresh
    invocations do.

    Adds b*b exits in total. A signature of the result that is feasible
    with value >= 0 on every module's own reentry exit certifies that
    no entrance-to-entrance repeat can be driven negative, which,
    together with per-module negative-cycle-freeness, is exactly
    player 1 winning the recursive game.
    """
    zero = (0,) * wrg.k
    names = wrg.module_names
    used = set()
    for m in wrg.modules:
        used.update(v for v, _ in m.nodes)
        used.update(b for b, _, _ in m.boxes)
    fresh = set()
    for mn in names:
        fresh.add(prime_entry_id(mn))
        for t in names:
            fresh.add(reentry_exit_id(mn, t))
    clash = used & fresh
    if clash:
        raise ModelError("id %r collides with a derived name; rename it" % sorted(clash)[0])

    new_modules: List[WrgModule] = []
    for m in wrg.modules:
        en2 = prime_entry_id(m.name)
        reent = [reentry_exit_id(m.name, t) for t in names]
        nodes2 = m.nodes + ((en2, P2),) + tuple((r, P1) for r in reent)
        exits2 = m.exits + tuple(reent)
        trans2: List[WrgTransition] = list(m.transitions)
        trans2.append(WrgTransition(en2, m.entry, zero))
        trans2.append(WrgTransition(en2, reentry_exit_id(m.name, m.name), zero))
        for b, _, callee in m.boxes:
            for t in names:
                trans2.append(WrgTransition(
                    ("ret", b, reentry_exit_id(callee, t)),
                    reentry_exit_id(m.name, t), zero))
        new_modules.append(WrgModule(m.name, en2, exits2, nodes2, m.boxes,
                                     tuple(trans2)))
    out = Wrg(wrg.k, tuple(new_modules), wrg.initial)
    validate_wrg(out, allow_reserved=True)
    return out


# ---------------------------------------------------------------------------
# Verification games


LOSING_SINK = "__lose__"


def return_vertex_id(box: str, exit_id: str) -> str:
    return "%s__ret__%s" % (box, exit_id)


def _resolve_module(wrg: Wrg, which: Union[int, str]) -> WrgModule:
    if isinstance(which, int):
        try:
            return wrg.modules[which]
        except IndexError:
            raise ModelError("module index %d out of range" % which) from None
    return wrg.module(which)


def _local_game(wrg: Wrg, fmap: Mapping[str, SigValue], mod: WrgModule,
                augmented: bool) -> GameGraph:
    """Finite 1-dim game for one module under exit guarantees fmap.

    Boxes become player-2 vertices choosing the callee exit; each
    chosen exit costs the callee's guarantee and lands on the matching
    return vertex, owned by the box's owner. Conceded (-omega) callee
    exits route to a losing sink, impossible (+inf) ones disappear; a
    box with nothing left keeps a single losing edge so the game stays
    total. Plain mode gives module exits an absorbing 0 self-loop; the
    augmented mode replaces that with the guarantee obligations: a
    back-edge to the entry of weight -f for finite f, a harmless
    terminal for -omega, a losing sink for +inf.
    """
    if wrg.k != 1:
        raise ModelError("verification games need one weight dimension, got k=%d" % wrg.k)
    names = set()
    for v, _ in mod.nodes:
        names.add(v)
    for b, _, _ in mod.boxes:
        names.add(b)
    verts: List[Tuple[str, int]] = list(mod.nodes)
    for b, _, _ in mod.boxes:
        verts.append((b, P2))
        callee = wrg.module(mod.box_callee(b))
        for x in callee.exits:
            rv = return_vertex_id(b, x)
            if rv in names:
                raise ModelError("id %r collides with a derived name; rename it" % rv)
            verts.append((rv, mod.box_owner(b)))
    if LOSING_SINK in names:
        raise ModelError("id %r is reserved" % LOSING_SINK)
    verts.append((LOSING_SINK, P1))

    edges: List[Tuple[str, str, Tuple[int, ...]]] = []
    for t in mod.transitions:
        u = t.src if isinstance(t.src, str) else return_vertex_id(t.src[1], t.src[2])
        v = t.dst if isinstance(t.dst, str) else t.dst[1]
        edges.append((u, v, t.w))
    for b, _, _ in mod.boxes:
        callee = wrg.module(mod.box_callee(b))
        any_out = False
        lose = False
        for x in callee.exits:
            fv = fmap[x]
            if fv is PLUS_INF:
                continue
            if fv is MINUS_OMEGA:
                lose = True
                continue
            edges.append((b, return_vertex_id(b, x), (fv,)))
            any_out = True
        if lose or not any_out:
            edges.append((b, LOSING_SINK, (0,)))
    for x in mod.exits:
        if not augmented:
            edges.append((x, x, (0,)))
            continue
        fv = fmap[x]
        if fv is MINUS_OMEGA:
            edges.append((x, x, (0,)))
        elif fv is PLUS_INF:
            edges.append((x, x, (-1,)))
        else:
            edges.append((x, mod.entry, (-fv,)))
    edges.append((LOSING_SINK, LOSING_SINK, (-1,)))
    return GameGraph(1, verts, [Edge(u, v, w, None) for u, v, w in edges])


def build_verification_game(wrg: Wrg, f: Union[SignatureFn, Mapping[str, SigValue]],
                            module: Union[int, str]) -> GameGraph:
    """The plain per-module game in which the named module's strategies
    are judged; exits are absorbing."""
    mod = _resolve_module(wrg, module)
    fmap = _as_sig_map(wrg, f)
    return _local_game(wrg, fmap, mod, augmented=False)


# ---------------------------------------------------------------------------
# Feasibility


def _bellman_ford(order: Sequence[str], succ: Mapping[str, Sequence[Tuple[str, int]]],
                  source: str) -> Tuple[Dict[str, int], bool]:
    """Min path weights from source; second result reports a reachable
    negative cycle."""
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


def _tau_subgraph(plain: GameGraph, tau: Mapping[str, str],
                  fixed_exits: FrozenSet[str]) -> Optional[Dict[str, List[Tuple[str, int]]]]:
    succ: Dict[str, List[Tuple[str, int]]] = {}
    for v in plain.vertices:
        outs = plain.out[v]
        if plain.owner(v) == P1 and v not in fixed_exits and v != LOSING_SINK:
            if v in tau:
                outs = tuple(e for e in outs if e.dst == tau[v])
                if not outs:
                    return None
            elif len(outs) > 1:
                return None
        succ[v] = [(e.dst, e.w[0]) for e in outs]
    return succ


def _verify_local(plain: GameGraph, mod_exits: Sequence[str],
                  fmap: Mapping[str, SigValue], entry: str,
                  tau: Mapping[str, str]) -> Tuple[bool, str]:
    """Independent check that tau keeps the module game clean: no
    reachable negative cycle, every reachable exit met with at least
    its promised weight, impossible exits unreachable."""
    exit_set = frozenset(mod_exits)
    succ = _tau_subgraph(plain, tau, exit_set)
    if succ is None:
        return False, "strategy is not total on the module's choices"
    reach = {entry}
    frontier = [entry]
    while frontier:
        u = frontier.pop()
        for v, _ in succ[u]:
            if v not in reach:
                reach.add(v)
                frontier.append(v)
    order = sorted(reach)
    rsucc = {u: [(v, w) for v, w in succ[u] if v in reach] for u in order}
    dist, neg = _bellman_ford(order, rsucc, entry)
    if neg:
        return False, "negative cycle reachable under the strategy"
    for x in mod_exits:
        fv = fmap[x]
        if fv is PLUS_INF:
            if x in reach:
                return False, "exit %r promised unreachable is reachable" % x
        elif fv is MINUS_OMEGA:
            continue
        elif x in dist and dist[x] < fv:
            return False, "exit %r reachable with weight %d below promise %d" % (x, dist[x], fv)
    return True, ""


def _extract_local_strategy(plain: GameGraph, mod_exits: Sequence[str],
                            sigma1: Mapping[str, str]) -> Dict[str, str]:
    exit_set = frozenset(mod_exits)
    tau: Dict[str, str] = {}
    for v in plain.vertices:
        if plain.owner(v) != P1 or v in exit_set or v == LOSING_SINK:
            continue
        targets = sorted(e.dst for e in plain.out[v])
        pick = sigma1.get(v)
        if pick not in targets:
            pick = targets[0]
        tau[v] = pick
    return tau


def _module_feasible(wrg: Wrg, fmap: Mapping[str, SigValue],
                     mod: WrgModule) -> Tuple[bool, Optional[Dict[str, str]]]:
    aug = _local_game(wrg, fmap, mod, augmented=True)
    win1, _, sigma1, _ = solve_mp1(aug)
    if mod.entry not in win1:
        return False, None
    plain = _local_game(wrg, fmap, mod, augmented=False)
    tau = _extract_local_strategy(plain, mod.exits, sigma1)
    ok, why = _verify_local(plain, mod.exits, fmap, mod.entry, tau)
    if not ok:
        raise InvariantError(
            "module %r passed the mean-payoff check but its extracted "
            "strategy fails the independent verifier: %s" % (mod.name, why))
    return True, tau


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    strategies: Optional[Dict[str, Dict[str, str]]]
    failing_module: Optional[str] = None

    def __bool__(self) -> bool:
        return self.feasible


def check_signature_feasible(wrg: Wrg,
                             f: Union[SignatureFn, Mapping[str, SigValue]]) -> FeasibilityResult:
    """Decide whether some modular strategy honors every guarantee in f.

    Each module is tested on its own finite game, with exit guarantees
    folded in as entry back-edges; the extracted per-module strategies
    are re-checked by the shortest-path verifier before being reported.
    """
    fmap = _as_sig_map(wrg, f)
    strategies: Dict[str, Dict[str, str]] = {}
    for mod in wrg.modules:
        ok, tau = _module_feasible(wrg, fmap, mod)
        if not ok:
            return FeasibilityResult(False, None, mod.name)
        assert tau is not None
        strategies[mod.name] = tau
    return FeasibilityResult(True, strategies)


# ---------------------------------------------------------------------------
# Enumeration


DEFAULT_ENUM_BUDGET = 2_000_000


@dataclass(frozen=True)
class FoundSignature:
    signature: SignatureFn
    strategies: Dict[str, Dict[str, str]]


class _ModuleOracle:
    """Feasibility cache for one module, exploiting monotonicity: a
    module check only gets harder when its own promises rise and easier
    when callee guarantees rise, so dominance settles most queries
    without solving a game."""

    SOLVE_COST = 40

    def __init__(self, wrg: Wrg, mod: WrgModule, positions: Sequence[int],
                 roles: Sequence[str], cost: List[int]) -> None:
        self.wrg = wrg
        self.mod = mod
        self.positions = tuple(positions)
        self.roles = tuple(roles)
        self.cost = cost
        self.exact: Dict[Tuple[SigValue, ...], bool] = {}
        self.yes_keys: List[Tuple[SigValue, ...]] = []
        self.no_keys: List[Tuple[SigValue, ...]] = []

    def _dominated(self, key: Tuple[SigValue, ...], known: Tuple[SigValue, ...],
                   easier: bool) -> bool:
        # easier=True: key is at most as demanding as a known-feasible key
        for q, k, role in zip(key, known, self.roles):
            rq, rk = _sig_rank(q), _sig_rank(k)
            if role == "both":
                if rq != rk:
                    return False
            elif role == "own":
                if (rq > rk) if easier else (rq < rk):
                    return False
            else:  # callee
                if (rq < rk) if easier else (rq > rk):
                    return False
        return True

    def query(self, values: Sequence[SigValue], fmap: Mapping[str, SigValue],
              prune: bool) -> bool:
        key = tuple(values[p] for p in self.positions)
        hit = self.exact.get(key)
        if hit is not None:
            return hit
        if prune:
            for known in self.yes_keys:
                if self._dominated(key, known, easier=True):
                    self.exact[key] = True
                    return True
            for known in self.no_keys:
                if self._dominated(key, known, easier=False):
                    self.exact[key] = False
                    return False
        self.cost[0] += self.SOLVE_COST
        ok, _ = _module_feasible(self.wrg, fmap, self.mod)
        self.exact[key] = ok
        (self.yes_keys if ok else self.no_keys).append(key)
        return ok


def _candidate_values(nu_v: SigValue, B: int) -> Tuple[SigValue, ...]:
    if nu_v is PLUS_INF:
        return (PLUS_INF,)
    vals: List[SigValue] = []
    if nu_v is MINUS_OMEGA:
        vals.append(MINUS_OMEGA)
        lo = -B
    else:
        lo = max(-B, nu_v)
    vals.extend(range(lo, B + 1))
    vals.append(PLUS_INF)
    return tuple(vals)


def enumerate_signatures(wrg: Wrg, nu: Mapping[str, SigValue], B: int,
                         budget: int = DEFAULT_ENUM_BUDGET,
                         prune: bool = True) -> Optional[FoundSignature]:
    """First feasible signature f >= nu with finite values in [-B, B],
    in the fixed order -omega < ascending integers < +inf, lexicographic
    over the exits in module order. Returns None when the bounded space
    holds no feasible signature; raises BudgetError when the candidate
    space itself is too large to walk, or when the walk costs too much
    (a touched candidate charges one budget unit, a solved module game
    forty, so a runaway search degrades to a budget failure rather than
    an open-ended stall).

    Exits missing from nu are unconstrained (-omega). `prune` enables
    the monotonicity cache; it never changes the result, only the work.
    """
    if isinstance(B, bool) or not isinstance(B, int) or B < 0:
        raise ModelError("signature bound must be a nonnegative integer")
    exit_ids = wrg.all_exits()
    unknown = set(nu) - set(exit_ids)
    if unknown:
        raise ModelError("constraint names unknown exit %r" % sorted(unknown)[0])
    space = (2 * B + 3) ** len(exit_ids)
    if space > budget:
        raise BudgetError(
            "signature space (2*%d+3)^%d = %d exceeds budget %d"
            % (B, len(exit_ids), space, budget))

    pos_of = {x: i for i, x in enumerate(exit_ids)}
    cands = [_candidate_values(nu.get(x, MINUS_OMEGA), B) for x in exit_ids]

    cost = [0]
    oracles: List[_ModuleOracle] = []
    for mod in wrg.modules:
        own = set(mod.exits)
        callee_exits: set = set()
        for b, _, callee in mod.boxes:
            callee_exits.update(wrg.module(callee).exits)
        relevant = sorted(pos_of[x] for x in own | callee_exits)
        roles = []
        for p in relevant:
            x = exit_ids[p]
            if x in own and x in callee_exits:
                roles.append("both")
            elif x in own:
                roles.append("own")
            else:
                roles.append("callee")
        oracles.append(_ModuleOracle(wrg, mod, relevant, roles, cost))
    # fail on the most significant coordinates first for larger skips
    check_order = sorted(range(len(oracles)),
                         key=lambda i: (oracles[i].positions[-1] if oracles[i].positions else -1, i))

    idx = [0] * len(exit_ids)

    def bump(at: int) -> bool:
        for q in range(len(idx) - 1, at, -1):
            idx[q] = 0
        i = at
        while i >= 0:
            idx[i] += 1
            if idx[i] < len(cands[i]):
                return True
            idx[i] = 0
            i -= 1
        return False

    while True:
        cost[0] += 1
        if cost[0] > budget:
            raise BudgetError("signature search exceeded budget %d" % budget)
        values = tuple(cands[p][idx[p]] for p in range(len(exit_ids)))
        fmap = dict(zip(exit_ids, values))
        failed: Optional[_ModuleOracle] = None
        for mi in check_order:
            if not oracles[mi].query(values, fmap, prune):
                failed = oracles[mi]
                break
        if failed is None:
            sig = SignatureFn.make(fmap, B)
            res = check_signature_feasible(wrg, sig)
            if not res.feasible:
                raise InvariantError(
                    "cached module feasibility contradicts the full recheck")
            assert res.strategies is not None
            return FoundSignature(sig, res.strategies)
        at = failed.positions[-1] if failed.positions else -1
        if not bump(at):
            return None


# ---------------------------------------------------------------------------
# The decision procedure


def project_strategies(wrg: Wrg, prime_strategies: Mapping[str, Mapping[str, str]]
                       ) -> Dict[str, Dict[str, str]]:
    """Restrict strategies computed on the reentry augmentation to the
    original modules' player-1 choices (original nodes and returns)."""
    out: Dict[str, Dict[str, str]] = {}
    for mod in wrg.modules:
        tau = prime_strategies.get(mod.name, {})
        keep: Dict[str, str] = {}
        exit_set = set(mod.exits)
        for v, owner in mod.nodes:
            if owner == P1 and v not in exit_set and v in tau:
                keep[v] = tau[v]
        for b, owner, callee in mod.boxes:
            if owner != P1:
                continue
            for x in wrg.module(callee).exits:
                rv = return_vertex_id(b, x)
                if rv in tau:
                    keep[rv] = tau[rv]
        out[mod.name] = keep
    return out


@dataclass(frozen=True)
class WrgDecision:
    winner: str  # "player1" | "player2" | "inconclusive"
    bound: int
    definitive: bool
    signature: Optional[SignatureFn] = None
    strategies: Optional[Dict[str, Dict[str, str]]] = None
    prime_strategies: Optional[Dict[str, Dict[str, str]]] = None

    def to_doc(self) -> dict:
        doc: Dict[str, object] = {
            "winner": self.winner,
            "bound": self.bound,
            "definitive": self.definitive,
        }
        if self.signature is not None:
            doc["signature"] = signature_to_doc(self.signature)
        if self.strategies is not None:
            doc["strategies"] = {m: dict(sorted(t.items()))
                                 for m, t in sorted(self.strategies.items())}
        if self.prime_strategies is not None:
            doc["prime_strategies"] = {m: dict(sorted(t.items()))
                                       for m, t in sorted(self.prime_strategies.items())}
        return doc


def solve_modular(wrg: Wrg, B_override: Optional[int] = None,
                  budget: int = DEFAULT_ENUM_BUDGET) -> WrgDecision:
    """Winner of the recursive game under modular strategies.

    Builds the reentry augmentation, then searches for a feasible
    signature that promises at least 0 on every module's own reentry
    exit. Finding one is a definitive player-1 win at any bound;
    exhausting the space is a definitive player-2 win only at the full
    bound W*ell, otherwise the verdict is inconclusive. A search space
    too large for the budget is also inconclusive.
    """
    if wrg.k != 1:
        raise ModelError(
            "modular solving handles one weight dimension; got k=%d" % wrg.k)
    if B_override is not None and (isinstance(B_override, bool)
                                   or not isinstance(B_override, int) or B_override < 0):
        raise ModelError("signature bound override must be a nonnegative integer")
    prime = build_wrg_prime(wrg)
    nu = {reentry_exit_id(mn, mn): 0 for mn in wrg.module_names}
    cap = full_sig_bound(prime)
    B = cap if B_override is None else B_override
    try:
        found = enumerate_signatures(prime, nu, B, budget=budget)
    except BudgetError:
        return WrgDecision("inconclusive", B, False)
    if found is not None:
        return WrgDecision(
            "player1", B, True,
            signature=found.signature,
            strategies=project_strategies(wrg, found.strategies),
            prime_strategies=found.strategies)
    if B >= cap:
        return WrgDecision("player2", B, True)
    return WrgDecision("inconclusive", B, False)
