"""Numeric and symbolic checks of identities among T-values.

Each check returns a :class:`VerificationReport`.  Reports carry a
``status`` of ``"theorem"`` (proved identities, gating) or ``"conjecture"``
(numerical evidence only, never gating).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable

import mpmath
from mpmath import mpf

from .indices import (
    LinearCombo,
    binomial_shuffle_formula,
    check_admissible,
    dual,
    enumerate_admissible,
    format_index,
    shuffle_indices,
    stuffle,
)
from .lindep import find_integer_relation, independent_subset, membership_in_Z
from .series_eval import BigReal, precision_for
from .values import T_value, genfun_lhs, genfun_rhs, t_value, zeta_value

DEFAULT_DIGITS = 60
THEOREM = "theorem"
CONJECTURE = "conjecture"


@dataclass
class VerificationReport:
    name: str
    params: dict
    residual: mpf
    tolerance: mpf
    verdict: str
    status: str = THEOREM
    wall_time: float = 0.0
    digits: int = DEFAULT_DIGITS
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "residual": mpmath.nstr(self.residual, 6),
            "tolerance": mpmath.nstr(self.tolerance, 6),
            "verdict": self.verdict,
            "status": self.status,
            "digits": self.digits,
            "wall_time": round(self.wall_time, 4),
            "note": self.note,
            **({"extra": self.extra} if self.extra else {}),
        }


def _numeric_report(name: str, params: dict, residual_fn: Callable[[int], BigReal],
                    digits: int, status: str = THEOREM, note: str = "") -> VerificationReport:
    """Run ``residual_fn`` at ``digits``; on failure retry once at doubled precision."""
    start = time.perf_counter()
    res = residual_fn(digits)
    tol = 10 * res.err
    used = digits
    if not abs(res.value) < tol:
        used = 2 * digits
        res = residual_fn(used)
        tol = 10 * res.err
    verdict = "pass" if abs(res.value) < tol else "fail"
    return VerificationReport(name, params, abs(res.value), tol, verdict, status,
                              time.perf_counter() - start, used, note)


def _symbolic_report(name: str, params: dict, lhs: LinearCombo, rhs: LinearCombo,
                     note: str = "") -> VerificationReport:
    start = time.perf_counter()
    diff = lhs - rhs
    residual = max((abs(c) for _, c in diff.items()), default=Fraction(0))
    res = mpf(residual.numerator) / residual.denominator
    tol = mpf(10) ** -DEFAULT_DIGITS
    verdict = "pass" if res < tol else "fail"
    return VerificationReport(name, params, res, tol, verdict, THEOREM,
                              time.perf_counter() - start, 0, note,
                              {"lhs": str(lhs), "rhs": str(rhs)})


def _T(ix, digits):
    return T_value(tuple(ix), digits)


def combo_value(combo: LinearCombo, digits: int) -> BigReal:
    """Value of a combination of indices interpreted as T-values."""
    total = BigReal.exact(0, precision_for(digits))
    for ix, c in combo.items():
        total = total + _T(ix, digits) * c
    return total


# ---------------------------------------------------------------- duality

def check_duality(weight: int, digits: int = DEFAULT_DIGITS) -> list[VerificationReport]:
    out = []
    for ix in enumerate_admissible(weight):
        dix = dual(ix)
        out.append(_numeric_report(
            "duality", {"index": format_index(ix), "dual": format_index(dix)},
            lambda d, ix=ix, dix=dix: _T(ix, d) - _T(dix, d), digits))
    return out


# ----------------------------------------------------------- sum formulas

def check_sum_formula_depth2(k: int, digits: int = DEFAULT_DIGITS) -> VerificationReport:
    """``sum_{j=2}^{k-1} 2^(j-1) T(k-j, j) = (k-1) T(k)``."""
    if k < 3:
        raise ValueError("k >= 3 required")

    def residual(d):
        lhs = sum((_T((k - j, j), d) * 2 ** (j - 1) for j in range(2, k)), BigReal.exact(0, precision_for(d)))
        return lhs - _T((k,), d) * (k - 1)

    return _numeric_report("sum2", {"k": k}, residual, digits)


def depth3_sum_combo(k: int) -> LinearCombo:
    """Left side of the depth-3 formula as a combination of indices."""
    out = LinearCombo()
    for a in range(1, k):
        for b in range(1, k - a):
            c = k - a - b
            if c >= 2:
                out.add_term((a, b, c), 1)
    for j in range(2, k - 1):
        out.add_term((1, k - 1 - j, j), 1)
    return out


def check_sum_formula_depth3(k: int, digits: int = DEFAULT_DIGITS) -> VerificationReport:
    """``sum_{a+b+c=k} T(a,b,c) + sum_{j=2}^{k-2} T(1,k-1-j,j) = (2/3) T(2) T(k-2)``."""
    if k < 4:
        raise ValueError("k >= 4 required")
    combo = depth3_sum_combo(k)

    def residual(d):
        return combo_value(combo, d) - _T((2,), d) * _T((k - 2,), d) * Fraction(2, 3)

    return _numeric_report("sum3", {"k": k}, residual, digits, note=str(combo))


def check_intermediate_sum(k: int, digits: int = DEFAULT_DIGITS) -> VerificationReport:
    """``sum_{j=2}^{k-1} T(k-j,j) + T(1,k-1) = (k-1)T(k) - 1/2 sum_{j=2}^{k-2} T(j)T(k-j)``."""
    if k < 3:
        raise ValueError("k >= 3 required")

    def residual(d):
        zero = BigReal.exact(0, precision_for(d))
        lhs = sum((_T((k - j, j), d) for j in range(2, k)), zero) + _T((1, k - 1), d)
        prods = sum((_T((j,), d) * _T((k - j,), d) for j in range(2, k - 1)), zero)
        return lhs - _T((k,), d) * (k - 1) + prods * Fraction(1, 2)

    return _numeric_report("interm", {"k": k}, residual, digits)


def check_weighted_dzv(k: int, digits: int = DEFAULT_DIGITS) -> VerificationReport:
    """Double zeta values: ``sum_{j=2}^{k-1} 2^(j-1) zeta(k-j, j) = (k+1)/2 zeta(k)``."""
    if k < 3:
        raise ValueError("k >= 3 required")

    def residual(d):
        zero = BigReal.exact(0, precision_for(d))
        lhs = sum((zeta_value((k - j, j), d) * 2 ** (j - 1) for j in range(2, k)), zero)
        return lhs - zeta_value((k,), d) * Fraction(k + 1, 2)

    return _numeric_report("dzv", {"k": k}, residual, digits)


# ------------------------------------------------------------------ parity

def parity_depth2_terms(p: int, q: int):
    """Right-hand side of the depth-2 parity formula for ``(-1)^q T(p, q)``.

    Returns ``(single, products)``: a coefficient on ``T(p+q)`` and a list of
    ``(coefficient, a, b)`` meaning ``coefficient * T(a) T(b)``.
    """
    single = Fraction(comb(p + q - 1, q))
    products = []
    for mu in range(1, q - 1):
        if (mu - q) % 2 == 0:
            products.append((-Fraction(comb(p + mu - 1, mu), 2 ** (q - mu) - 1), p + mu, q - mu))
    for mu in range(0, p - 1):
        if (mu - p) % 2 == 0:
            products.append((-Fraction(comb(q + mu - 1, mu)), p - mu, q + mu))
    return single, products


def check_parity_depth2(p: int, q: int, digits: int = DEFAULT_DIGITS) -> VerificationReport:
    if p < 1 or q < 2 or (p + q) % 2 == 0:
        raise ValueError("need p >= 1, q >= 2 and p + q odd")
    single, products = parity_depth2_terms(p, q)

    def residual(d):
        rhs = _T((p + q,), d) * single
        for c, a, b in products:
            rhs = rhs + _T((a,), d) * _T((b,), d) * c
        return _T((p, q), d) * (-1) ** q - rhs

    return _numeric_report("parity", {"p": p, "q": q}, residual, digits)


def parity_triple_span(p: int, q: int, r: int, digits: int = 100) -> VerificationReport:
    """Evidence that ``T(2p+1, 2q, 2r+1)`` lies in the span of lower-depth values and products."""
    ix = (2 * p + 1, 2 * q, 2 * r + 1)
    k = sum(ix)
    start = time.perf_counter()
    lower = []
    for jx in enumerate_admissible(k):
        if len(jx) <= 2:
            lower.append((f"T({format_index(jx)})", _T(jx, digits)))
    for a in range(2, k - 1):
        for jx in enumerate_admissible(k - a):
            if len(jx) <= 2 and (len(jx) == 2 or a <= k - a):
                lower.append((f"T({a})T({format_index(jx)})", _T((a,), digits) * _T(jx, digits)))
    for a in range(2, k):
        for b in range(a, k):
            c = k - a - b
            if c >= b:
                lower.append((f"T({a})T({b})T({c})", _T((a,), digits) * _T((b,), digits) * _T((c,), digits)))
    kept, _, _ = independent_subset(lower, digits)
    res = find_integer_relation([_T(ix, digits)] + [v for _, v in kept], digits=digits)
    ok = res is not None and res.accepted and res.coefficients[0] != 0
    residual = res.residual if res is not None else mpf(1)
    tol = mpf(10) ** (-0.6 * digits)
    return VerificationReport(
        "parity3", {"index": format_index(ix)}, residual, tol, "pass" if ok else "fail",
        CONJECTURE, time.perf_counter() - start, digits,
        "numeric span membership (lindep evidence)",
        {"relation": str(res) if res else None, "span": [l for l, _ in kept]})


# ---------------------------------------------------------- shuffle check

def check_shuffle_TT_expansion(j: int, k: int) -> VerificationReport:
    """Exact comparison of ``T(j) T(k-j)`` via word shuffle against the binomial formula."""
    if not 2 <= j <= k - 2:
        raise ValueError("need 2 <= j <= k-2")
    lhs = shuffle_indices((j,), (k - j,))
    rhs = binomial_shuffle_formula(j, k)
    return _symbolic_report("shuffleTT", {"j": j, "k": k}, lhs, rhs)


# -------------------------------------------------- generating series

def check_genfun(X, Y, digits: int = 30) -> VerificationReport:
    X, Y = Fraction(X), Fraction(Y)

    def residual(d):
        return genfun_lhs(X, Y, d) - genfun_rhs(X, Y, d)

    return _numeric_report("genfun", {"X": str(X), "Y": str(Y)}, residual, digits)


# ------------------------------------------------------------ conjectures

def machide_combo(k: int) -> LinearCombo:
    out = LinearCombo()
    for a in range(1, k):
        for b in range(1, k - a):
            c = k - a - b
            if c >= 2:
                out.add_term((a, b, c), 2 ** b * (3 ** (c - 1) - 1))
    return out


def check_machide_conjecture(k: int, digits: int = DEFAULT_DIGITS) -> VerificationReport:
    """``sum 2^b (3^(c-1) - 1) T(a,b,c) = (2/3)(k-1)(k-2) T(k)`` (conjectural)."""
    if k < 4:
        raise ValueError("k >= 4 required")
    combo = machide_combo(k)

    def residual(d):
        return combo_value(combo, d) - _T((k,), d) * Fraction(2 * (k - 1) * (k - 2), 3)

    return _numeric_report("machide", {"k": k}, residual, digits, CONJECTURE)


def binomial_sum_combo(p: int, q: int, m: int) -> LinearCombo:
    out = LinearCombo()
    for i in range(m + 1):
        j = m - i
        out.add_term((p + i, q + j), comb(p + i - 1, i) * comb(q + j - 1, j))
    return out


def check_binomial_sum(p: int, q: int, m: int, digits: int = 100) -> VerificationReport:
    """Is ``s(p,q,m)`` a multiple zeta value?  Evidence by integer-relation search."""
    if m < 1 or p < 1 or q < 2 or (p + q + m) % 2:
        raise ValueError("need m >= 1, p >= 1, q >= 2 and p + q + m even")
    start = time.perf_counter()
    combo = binomial_sum_combo(p, q, m)
    x = combo_value(combo, digits)
    res = membership_in_Z(x, p + q + m, digits, label=f"s({p},{q},{m})")
    ok = res is not None and res.accepted
    residual = res.residual if res is not None else mpf(1)
    return VerificationReport(
        "binomial-sum", {"p": p, "q": q, "m": m}, residual, mpf(10) ** (-0.6 * digits),
        "pass" if ok else "fail", CONJECTURE, time.perf_counter() - start, digits,
        str(combo), {"relation": str(res) if res else None, "labels": res.labels if res else []})


def check_membership(ix, digits: int = 100) -> VerificationReport:
    """Evidence report for ``T(ix)`` lying in the span of multiple zeta values."""
    ix = check_admissible(ix)
    start = time.perf_counter()
    res = membership_in_Z(_T(ix, digits), sum(ix), digits, label=f"T({format_index(ix)})")
    ok = res is not None and res.accepted
    return VerificationReport(
        "inZ", {"index": format_index(ix)}, res.residual if res else mpf(1),
        mpf(10) ** (-0.6 * digits), "pass" if ok else "fail", CONJECTURE,
        time.perf_counter() - start, digits, "",
        {"relation": str(res) if res else None, "labels": res.labels if res else []})


# --------------------------------------------------- low-weight relations

def _lc(pairs) -> LinearCombo:
    return LinearCombo({ix: Fraction(c) for ix, c in pairs})


F = Fraction
# Each entry: (index on the left, right-hand combination).
WEIGHT_LE6_RELATIONS: list[tuple[tuple, LinearCombo]] = [
    ((3, 2), _lc([((1, 4), 6)])),
    ((2, 3), _lc([((5,), 1), ((1, 4), -5)])),
    ((1, 2, 3), _lc([((6,), F(-25, 12)), ((1, 5), 12), ((2, 4), 6), ((3, 3), 2), ((1, 1, 4), -2)])),
    ((1, 3, 2), _lc([((6,), F(55, 12)), ((1, 5), -24), ((2, 4), -12), ((3, 3), -4), ((1, 1, 4), -1)])),
    ((2, 1, 3), _lc([((6,), F(55, 12)), ((1, 5), -24), ((2, 4), -12), ((3, 3), -4), ((1, 1, 4), -1)])),
    ((2, 2, 2), _lc([((6,), F(-35, 4)), ((1, 5), 48), ((2, 4), 24), ((3, 3), 8), ((1, 1, 4), 6)])),
    ((3, 1, 2), _lc([((6,), F(5, 6)), ((1, 1, 4), -1)])),
    ((4, 2), _lc([((6,), F(5, 2)), ((1, 5), -8), ((2, 4), -4), ((3, 3), -2)])),
]


def solve_linear_relations(relations: list[LinearCombo], unknowns: list) -> dict:
    """Solve ``relation == 0`` for the given unknown indices by exact elimination.

    Returns ``{unknown: LinearCombo in the remaining indices}``.
    """
    rows = [r for r in relations]
    solved: dict = {}
    for u in unknowns:
        pivot = next((r for r in rows if r.coeff(u) != 0), None)
        if pivot is None:
            raise ValueError(f"cannot solve for {u}")
        rows.remove(pivot)
        expr = (pivot - LinearCombo.single(u, pivot.coeff(u))) * (-1 / pivot.coeff(u))
        solved[u] = expr
        rows = [_substitute(r, u, expr) for r in rows]
        solved = {v: _substitute(e, u, expr) for v, e in solved.items()}
    return solved


def _substitute(combo: LinearCombo, u, expr: LinearCombo) -> LinearCombo:
    c = combo.coeff(u)
    if not c:
        return combo
    return combo - LinearCombo.single(u, c) + expr * c


def weight5_source_relations() -> list[LinearCombo]:
    """The two weight-5 relations, each written as ``lhs - rhs``.

    The first is the depth-2 sum formula at k=5.  The second is the depth-3
    sum formula at k=5 with duality applied on the left and the shuffle
    product of ``T(2) T(3)`` expanded on the right.
    """
    sf2 = LinearCombo({(5 - j, j): 2 ** (j - 1) for j in range(2, 5)}) - LinearCombo.single((5,), 4)
    left = depth3_sum_combo(5).map_terms(dual)
    right = shuffle_indices((2,), (3,)) * Fraction(2, 3)
    return [sf2, left - right]


def derive_weight5() -> dict:
    return solve_linear_relations(weight5_source_relations(), [(3, 2), (2, 3)])


def reduce_weight_le6(digits: int = DEFAULT_DIGITS) -> list[VerificationReport]:
    out = []
    for lhs_ix, rhs in WEIGHT_LE6_RELATIONS:
        combo = LinearCombo.single(lhs_ix) - rhs
        out.append(_numeric_report(
            "weight6" if sum(lhs_ix) == 6 else "weight5",
            {"relation": f"T({format_index(lhs_ix)}) = {rhs}"},
            lambda d, combo=combo: combo_value(combo, d), digits))
    derived = derive_weight5()
    for lhs_ix, rhs in WEIGHT_LE6_RELATIONS[:2]:
        out.append(_symbolic_report(
            "weight5-derivation", {"index": format_index(lhs_ix)}, derived[lhs_ix], rhs,
            "solved from the depth-2 and depth-3 sum formulas"))
    # weight-6 relation predicted by the s(p,q,m) membership family
    pred = LinearCombo({(2, 4): 3, (3, 3): 2}) + LinearCombo.single((6,), Fraction(15, 7))

    def conj_residual(d):
        return combo_value(pred, d) - _T((3,), d) * _T((3,), d) * Fraction(10, 7)

    out.append(_numeric_report("weight6-binomial-sum", {"relation": "3T(2,4)+2T(3,3) = -15/7 T(6) + 10/7 T(3)^2"},
                               conj_residual, digits, CONJECTURE))
    return out


# ------------------------------------------------------------- stuffle

def t_stuffle_check(a, b, digits: int = DEFAULT_DIGITS) -> VerificationReport:
    """``t(a) t(b)`` against the evaluation of the stuffle product."""
    def residual(d):
        total = t_value(tuple(a), d) * t_value(tuple(b), d)
        for ix, c in stuffle(tuple(a), tuple(b)).items():
            total = total - t_value(ix, d) * c
        return total

    return _numeric_report("stuffle-t", {"a": format_index(a), "b": format_index(b)}, residual, digits)

