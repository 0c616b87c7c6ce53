"""Games with long-run average objectives on finite, pushdown, and
recursive arenas: solvers, brute-force reference deciders, instance
generators, and an independent certificate checker.

The headline entry points are re-exported here; the per-family modules
(`core`, `lp`, `mp1`, `mmpg`, `parity`, `wps`, `wrg`, `reductions`,
`oracles`, `certs`, `cli`) carry the full API.
"""

from .core import (
    BudgetError,
    Edge,
    GameGraph,
    GuardError,
    InvariantError,
    ModelError,
    P1,
    P2,
    canonical_json,
    game_to_doc,
    karp_best_mean_cycle,
    parse_game,
    scalarize,
)
from .mp1 import solve_mp1
from .mmpg import MmpgResult, solve_mmpg, win2_for_lambda
from .parity import ParityGame, parity_to_mmpg, parse_parity, zielonka
from .wps import (
    Wps,
    WpsDecision,
    decide_multidim,
    find_positive_pumpable_pair,
    parse_wps,
    wps_to_doc,
)
from .wrg import (
    Wrg,
    WrgDecision,
    parse_wrg,
    solve_modular,
    wrg_to_doc,
)
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
from .oracles import (
    OracleBudget,
    brute_mmpg,
    brute_wps,
    brute_wrg,
)
from .certs import CERT_KINDS, verify_certificate
from .cli import main

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "CERT_KINDS",
    "Cnf3",
    "Edge",
    "GameGraph",
    "GuardError",
    "InvariantError",
    "MmpgResult",
    "ModelError",
    "OracleBudget",
    "P1",
    "P2",
    "ParityGame",
    "Wps",
    "WpsDecision",
    "Wrg",
    "WrgDecision",
    "ZkReachGame",
    "brute_mmpg",
    "brute_wps",
    "brute_wrg",
    "canonical_json",
    "decide_multidim",
    "find_positive_pumpable_pair",
    "game_to_doc",
    "karp_best_mean_cycle",
    "main",
    "parity_to_mmpg",
    "parity_to_wrg",
    "parse_game",
    "parse_parity",
    "parse_wps",
    "parse_wrg",
    "random_game",
    "random_wps",
    "random_wrg",
    "sat_to_wrg",
    "scalarize",
    "solve_mmpg",
    "solve_modular",
    "solve_mp1",
    "verify_certificate",
    "win2_for_lambda",
    "wps_to_doc",
    "wrg_to_doc",
    "zielonka",
    "zk_reach_to_wrg",
    "__version__",
]
