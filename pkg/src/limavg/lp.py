"""Exact rational linear feasibility and a small LP kernel.

Three entry points, all over Fractions, all certificate-friendly:

  feasible(rows)    Fourier-Motzkin elimination with a strictness bit.
  gordan(A)         the dichotomy: nonneg nontrivial solution of A.x = 0,
                    or a vector y with every row dot y strictly negative.
  min_r(A, k)       minimize r subject to A.lam <= (r,...,r), sum(lam) = 1,
                    lam sign-unconstrained; vertex enumeration in dim k+1.

No floats. No third-party solvers. Dimensions are desk-scale by contract
(arity guard below).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .core import GuardError, InvariantError, Scalar

ARITY_GUARD = 8
ROW_GUARD = 100000

Row = Tuple[Tuple[Fraction, ...], bool, Fraction]  # coeffs, strict, rhs  (c.x < / <= rhs)


def _frac(x: Scalar) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact systems")
    return Fraction(x)


def _normalize(rows: Sequence[Tuple[Sequence[Scalar], str, Scalar]]) -> Tuple[int, List[Row], List[Tuple[Tuple[Fraction, ...], Fraction]]]:
    """Split input rows into inequalities (with strictness bit) and equalities."""
    if not rows:
        raise ValueError("empty system has no defined arity")
    arity = len(rows[0][0])
    if arity < 1:
        raise ValueError("arity must be >= 1")
    if arity > ARITY_GUARD:
        raise GuardError("arity %d exceeds guard %d" % (arity, ARITY_GUARD))
    ineqs: List[Row] = []
    eqs: List[Tuple[Tuple[Fraction, ...], Fraction]] = []
    for coeffs, rel, rhs in rows:
        if len(coeffs) != arity:
            raise ValueError("mixed arities in system")
        c = tuple(_frac(x) for x in coeffs)
        b = _frac(rhs)
        if rel == "<=":
            ineqs.append((c, False, b))
        elif rel == "<":
            ineqs.append((c, True, b))
        elif rel in ("=", "=="):
            eqs.append((c, b))
        elif rel == ">=":
            ineqs.append((tuple(-x for x in c), False, -b))
        elif rel == ">":
            ineqs.append((tuple(-x for x in c), True, -b))
        else:
            raise ValueError("unknown relation %r" % rel)
    return arity, ineqs, eqs


def feasible(rows: Sequence[Tuple[Sequence[Scalar], str, Scalar]]) -> Optional[List[Fraction]]:
    """Exact Fourier-Motzkin feasibility.

    rows: (coeffs, relation, rhs) with relation in {"<=", "<", "=", ">=", ">"}.
    Returns a witness point (list of Fractions) or None if infeasible.
    The witness satisfies every row exactly; callers are encouraged to
    re-substitute (tests do).
    """
    arity, ineqs, eqs = _normalize(rows)

    # Equalities: Gaussian substitution, one variable at a time.
    substitutions: List[Tuple[int, Tuple[Fraction, ...], Fraction]] = []
    while eqs:
        coeffs, rhs = eqs.pop(0)
        pivot = next((i for i, c in enumerate(coeffs) if c != 0), None)
        if pivot is None:
            if rhs != 0:
                return None
            continue
        # x_pivot = (rhs - sum_{j != pivot} c_j x_j) / c_pivot
        cp = coeffs[pivot]
        expr = tuple((-c / cp if j != pivot else Fraction(0)) for j, c in enumerate(coeffs))
        const = rhs / cp
        substitutions.append((pivot, expr, const))
        eqs = [_apply_subst_eq(c, b, pivot, expr, const) for c, b in eqs]
        ineqs = [_apply_subst_ineq(row, pivot, expr, const) for row in ineqs]

    eliminated = {idx for idx, _e, _c in substitutions}

    # Inequalities: eliminate remaining variables from the highest index down,
    # recording each stage for back-substitution.
    order = [i for i in range(arity - 1, -1, -1) if i not in eliminated]
    stages: List[Tuple[int, List[Row]]] = []
    current = _dedup(ineqs)
    if current is None:
        return None
    for var in order:
        with_var = [r for r in current if r[0][var] != 0]
        without = [r for r in current if r[0][var] == 0]
        stages.append((var, with_var))
        uppers = [r for r in with_var if r[0][var] > 0]
        lowers = [r for r in with_var if r[0][var] < 0]
        combined: List[Row] = list(without)
        for cu, su, bu in uppers:
            au = cu[var]
            for cl, sl, bl in lowers:
                al = cl[var]
                # (-al) * upper + au * lower, positive multipliers.
                mu, ml = -al, au
                coeffs = tuple(mu * a + ml * b for a, b in zip(cu, cl))
                rhs = mu * bu + ml * bl
                combined.append((coeffs, su or sl, rhs))
        current = _dedup(combined)
        if current is None:
            return None
        if len(current) > ROW_GUARD:
            raise GuardError("Fourier-Motzkin row blowup")

    for coeffs, strict, rhs in current:
        assert all(c == 0 for c in coeffs)
        if strict:
            if not rhs > 0:
                return None
        else:
            if not rhs >= 0:
                return None

    # Back-substitute stage by stage (reverse of elimination order).
    values: Dict[int, Fraction] = {}
    for var, rows_with in reversed(stages):
        lo: Optional[Fraction] = None
        lo_strict = False
        hi: Optional[Fraction] = None
        hi_strict = False
        for coeffs, strict, rhs in rows_with:
            rest = rhs - sum(c * values.get(j, Fraction(0)) for j, c in enumerate(coeffs) if j != var)
            a = coeffs[var]
            bound = rest / a
            if a > 0:
                if hi is None or bound < hi or (bound == hi and strict):
                    hi, hi_strict = bound, strict
            else:
                if lo is None or bound > lo or (bound == lo and strict):
                    lo, lo_strict = bound, strict
        values[var] = _pick(lo, lo_strict, hi, hi_strict)

    # Substituted (equality) variables, most recent first.
    for idx, expr, const in reversed(substitutions):
        values[idx] = const + sum(c * values.get(j, Fraction(0)) for j, c in enumerate(expr))

    witness = [values.get(i, Fraction(0)) for i in range(arity)]
    return witness


def _apply_subst_eq(coeffs: Tuple[Fraction, ...], rhs: Fraction, pivot: int, expr: Tuple[Fraction, ...], const: Fraction) -> Tuple[Tuple[Fraction, ...], Fraction]:
    a = coeffs[pivot]
    if a == 0:
        return coeffs, rhs
    new_coeffs = tuple((c + a * expr[j]) if j != pivot else Fraction(0) for j, c in enumerate(coeffs))
    return new_coeffs, rhs - a * const


def _apply_subst_ineq(row: Row, pivot: int, expr: Tuple[Fraction, ...], const: Fraction) -> Row:
    coeffs, strict, rhs = row
    new_coeffs, new_rhs = _apply_subst_eq(coeffs, rhs, pivot, expr, const)
    return (new_coeffs, strict, new_rhs)


def _dedup(rows: List[Row]) -> Optional[List[Row]]:
    """Drop satisfied constant rows, canonicalize, keep the tightest per
    coefficient vector. Returns None on an immediately false constant row."""
    best: Dict[Tuple[Fraction, ...], Tuple[bool, Fraction]] = {}
    order: List[Tuple[Fraction, ...]] = []
    for coeffs, strict, rhs in rows:
        if all(c == 0 for c in coeffs):
            if strict:
                if not rhs > 0:
                    return None
            else:
                if not rhs >= 0:
                    return None
            continue
        scale = None
        for c in coeffs:
            if c != 0:
                scale = abs(c)
                break
        canon = tuple(c / scale for c in coeffs)
        key_rhs = rhs / scale
        prev = best.get(canon)
        if prev is None:
            best[canon] = (strict, key_rhs)
            order.append(canon)
        else:
            pstrict, prhs = prev
            if key_rhs < prhs or (key_rhs == prhs and strict and not pstrict):
                best[canon] = (strict, key_rhs)
    return [(c, best[c][0], best[c][1]) for c in order]


def _pick(lo: Optional[Fraction], lo_strict: bool, hi: Optional[Fraction], hi_strict: bool) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        assert hi is not None
        return hi - 1 if hi_strict else hi
    if hi is None:
        return lo + 1 if lo_strict else lo
    if lo > hi:
        raise InvariantError("empty interval after feasible elimination")
    if lo == hi:
        if lo_strict or hi_strict:
            raise InvariantError("point interval with a strict bound after feasible elimination")
        return lo
    return (lo + hi) / 2


# ---------------------------------------------------------------------------
# Gordan's dichotomy


def gordan(matrix: Sequence[Sequence[Scalar]]):
    """Either ("nonneg_solution", x) with x >= 0, x != 0, x.A = 0 (rows
    combined), or ("separator", y) with every row of A dotted with y strictly
    negative. Exactly one branch holds; witnesses are exact."""
    rows = [tuple(int(v) for v in row) for row in matrix]
    if not rows:
        raise ValueError("gordan requires a nonempty matrix")
    k = len(rows[0])
    for row in rows:
        if len(row) != k:
            raise ValueError("ragged matrix")
    sep_system = [(row, "<=", -1) for row in rows]
    y = feasible(sep_system)
    if y is not None:
        return ("separator", tuple(y))
    x = _nonneg_combination(rows, k)
    if x is None:
        raise InvariantError("Gordan dichotomy failed: no separator and no combination")
    return ("nonneg_solution", tuple(x))


def _nonneg_combination(rows: List[Tuple[int, ...]], k: int) -> Optional[List[Fraction]]:
    m = len(rows)
    if m <= ARITY_GUARD:
        sys_rows: List[Tuple[Sequence[Scalar], str, Scalar]] = []
        for j in range(k):
            sys_rows.append(([row[j] for row in rows], "=", 0))
        for i in range(m):
            unit = [0] * m
            unit[i] = 1
            sys_rows.append((unit, ">=", 0))
        sys_rows.append(([1] * m, "=", 1))
        sol = feasible(sys_rows)
        return sol
    # Large row sets: by Caratheodory a minimal positively dependent subset
    # has at most k+1 elements, so subset search stays exact and complete.
    for size in range(1, min(k + 1, m) + 1):
        for subset in itertools.combinations(range(m), size):
            sys_rows = []
            for j in range(k):
                sys_rows.append(([rows[i][j] for i in subset], "=", 0))
            for pos in range(size):
                unit = [0] * size
                unit[pos] = 1
                sys_rows.append((unit, ">=", 1))
            sol = feasible(sys_rows)
            if sol is not None:
                full = [Fraction(0)] * m
                for pos, i in enumerate(subset):
                    full[i] = sol[pos]
                return full
    return None


# ---------------------------------------------------------------------------
# The min-r program


def min_r(matrix: Sequence[Sequence[Scalar]], k: int):
    """Minimize r subject to A.lam <= (r,...,r) and sum(lam) = 1.

    Returns one of
      ("optimal", lam, r)        exact optimum,
      ("unbounded", None, None)  objective unbounded below,
      ("empty", lam, None)       empty matrix sentinel (r = -infinity),
    with lam a tuple of Fractions. lam is sign-unconstrained by design.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k + 1 > ARITY_GUARD:
        raise GuardError("dimension k+1=%d exceeds guard" % (k + 1))
    rows = [tuple(_frac(v) for v in row) for row in matrix]
    for row in rows:
        if len(row) != k:
            raise ValueError("row arity != k")
    if not rows:
        uniform = tuple(Fraction(1, k) for _ in range(k))
        return ("empty", uniform, None)

    # Unboundedness: a recession direction d with sum(d)=0 and A.d <= -1.
    recession = [(row, "<=", -1) for row in rows] + [([1] * k, "=", 0)]
    if feasible(recession) is not None:
        return ("unbounded", None, None)

    m = len(rows)
    best: Optional[Tuple[Fraction, Tuple[Fraction, ...]]] = None
    # Vertex enumeration: sum(lam)=1 is always active; pick k more rows.
    for subset in itertools.combinations(range(m), min(k, m)):
        if len(subset) < k:
            break
        mat = []
        rhs = []
        for i in subset:
            mat.append(list(rows[i]) + [Fraction(-1)])
            rhs.append(Fraction(0))
        mat.append([Fraction(1)] * k + [Fraction(0)])
        rhs.append(Fraction(1))
        point = _solve_square(mat, rhs)
        if point is None:
            continue
        lam, r = tuple(point[:k]), point[k]
        if all(sum(a * l for a, l in zip(row, lam)) <= r for row in rows):
            cand = (r, lam)
            if best is None or cand < best:
                best = cand
    if best is not None:
        r, lam = best
        return ("optimal", lam, r)

    # Degenerate polyhedra without a suitable vertex (dependent or too few
    # rows that are still bounded): fall back to direct projection.
    proj_rows: List[Tuple[Sequence[Scalar], str, Scalar]] = []
    for row in rows:
        proj_rows.append((list(row) + [-1], "<=", 0))
    proj_rows.append(([1] * k + [0], "=", 1))
    r_star = _minimize_last_var(proj_rows, k + 1)
    if r_star is None:
        raise InvariantError("min_r: bounded program with no optimum")
    witness = feasible(proj_rows + [([0] * k + [1], "<=", r_star)])
    if witness is None:
        raise InvariantError("min_r projection produced an infeasible optimum")
    return ("optimal", tuple(witness[:k]), r_star)


def _solve_square(mat: List[List[Fraction]], rhs: List[Fraction]) -> Optional[List[Fraction]]:
    """Gaussian elimination; None when singular."""
    n = len(mat)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def _minimize_last_var(rows: List[Tuple[Sequence[Scalar], str, Scalar]], arity: int) -> Optional[Fraction]:
    """Exact minimum of the last variable over the system, via FM projection
    onto that variable. None if unbounded below (callers pre-check)."""
    _arity, ineqs, eqs = _normalize(rows)
    # Substitute equalities away first (reusing feasible()'s machinery by
    # inlining a simplified pass: all our callers pass a single equality).
    substitutions: List[Tuple[int, Tuple[Fraction, ...], Fraction]] = []
    while eqs:
        coeffs, rhs = eqs.pop(0)
        pivot = next((i for i, c in enumerate(coeffs) if c != 0 and i != arity - 1), None)
        if pivot is None:
            pivot = next((i for i, c in enumerate(coeffs) if c != 0), None)
        if pivot is None:
            if rhs != 0:
                return None
            continue
        cp = coeffs[pivot]
        expr = tuple((-c / cp if j != pivot else Fraction(0)) for j, c in enumerate(coeffs))
        const = rhs / cp
        substitutions.append((pivot, expr, const))
        eqs = [_apply_subst_eq(c, b, pivot, expr, const) for c, b in eqs]
        ineqs = [_apply_subst_ineq(r, pivot, expr, const) for r in ineqs]
    eliminated = {idx for idx, _e, _c in substitutions}
    if arity - 1 in eliminated:
        raise InvariantError("objective variable got substituted")
    current = _dedup(ineqs)
    if current is None:
        return None
    for var in range(arity - 2, -1, -1):
        if var in eliminated:
            continue
        with_var = [r for r in current if r[0][var] != 0]
        without = [r for r in current if r[0][var] == 0]
        uppers = [r for r in with_var if r[0][var] > 0]
        lowers = [r for r in with_var if r[0][var] < 0]
        combined = list(without)
        for cu, su, bu in uppers:
            for cl, sl, bl in lowers:
                mu, ml = -cl[var], cu[var]
                coeffs = tuple(mu * a + ml * b for a, b in zip(cu, cl))
                combined.append((coeffs, su or sl, mu * bu + ml * bl))
        current = _dedup(combined)
        if current is None:
            return None
    lo = None
    for coeffs, strict, rhs in current:
        a = coeffs[arity - 1]
        if a == 0:
            continue
        bound = rhs / a
        if a < 0:
            if strict:
                # Strict lower bounds cannot arise from our non-strict callers.
                raise InvariantError("strict bound while minimizing")
            if lo is None or bound > lo:
                lo = bound
    return lo
