"""Integer relations by lattice reduction, and numeric dimension experiments."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mpf

from .indices import compositions, enumerate_admissible, format_index
from .series_eval import LOG2_10, BigReal, precision_for
from .values import T_value, t_value, zeta_value

DEFAULT_DELTA = Fraction(99, 100)
GUARD_DIGITS = 4
STAGE_DIGITS = 20
# minimum / maximum excess, as a fraction of the working digits
SIGNIFICANT_EXCESS = 0.1
GENERIC_EXCESS = 0.05
MAX_WEIGHT = 8
CAVEAT = "conjectural (numeric rank)"

FAMILY_ALIASES = {
    "T": "T", "t": "t", "Z": "zeta", "zeta": "zeta",
    "T+t": "union", "union": "union", "sum": "union",
    "T∩t": "intersection", "intersection": "intersection", "cap": "intersection",
}


# ------------------------------------------------------------------- LLL

def lll_reduce(basis: Sequence[Sequence[int]], delta=DEFAULT_DELTA) -> list[list[int]]:
    """LLL-reduce linearly independent integer rows, in exact integer arithmetic.

    Integral variant: Gram determinants ``d`` and scaled Gram-Schmidt
    coefficients ``lam`` stay integers, so the result is reproducible
    bit-for-bit.
    """
    b = [[int(v) for v in row] for row in basis]
    if not b:
        raise ValueError("empty basis")
    if any(not any(row) for row in b):
        raise ValueError("basis contains a zero row")
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta <= 1:
        raise ValueError("delta must lie in (1/4, 1]")
    p, q = delta.numerator, delta.denominator
    n = len(b)
    if n == 1:
        return b

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    d = [1] + [0] * n          # d[i] = Gram determinant of the first i rows
    lam = [[0] * n for _ in range(n)]
    d[1] = dot(b[0], b[0])

    def reduce_pair(k: int, l: int) -> None:
        dl = d[l + 1]
        if 2 * abs(lam[k][l]) > dl:
            r = (2 * lam[k][l] + dl) // (2 * dl)
            bk, bl = b[k], b[l]
            for i in range(len(bk)):
                bk[i] -= r * bl[i]
            lam[k][l] -= r * dl
            lk, ll = lam[k], lam[l]
            for i in range(l):
                lk[i] -= r * ll[i]

    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = dot(b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                elif u == 0:
                    raise ValueError("rows are linearly dependent")
                else:
                    d[k + 1] = u
        reduce_pair(k, k - 1)
        lk = lam[k][k - 1]
        if q * (d[k + 1] * d[k - 1] + lk * lk) < p * d[k] * d[k]:
            b[k], b[k - 1] = b[k - 1], b[k]
            for j in range(k - 1):
                lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
            B = (d[k - 1] * d[k + 1] + lk * lk) // d[k]
            for i in range(k + 1, kmax + 1):
                t = lam[i][k]
                lam[i][k] = (d[k + 1] * lam[i][k - 1] - lk * t) // d[k]
                lam[i][k - 1] = (B * t + lk * lam[i][k]) // d[k + 1]
            d[k] = B
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                reduce_pair(k, l)
            k += 1
    return b


def is_lll_reduced(basis: Sequence[Sequence[int]], delta=DEFAULT_DELTA) -> bool:
    """Check size reduction and the Lovasz condition with exact rationals."""
    b = [[Fraction(v) for v in row] for row in basis]
    n = len(b)
    bstar: list[list[Fraction]] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms: list[Fraction] = []
    for i in range(n):
        v = list(b[i])
        for j in range(i):
            mu[i][j] = sum(x * y for x, y in zip(b[i], bstar[j])) / norms[j]
            v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
        bstar.append(v)
        norms.append(sum(x * x for x in v))
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    delta = Fraction(delta)
    for i in range(1, n):
        if norms[i] < (delta - mu[i][i - 1] ** 2) * norms[i - 1]:
            return False
    return True


# ------------------------------------------------------- integer relations

@dataclass
class RelationResult:
    coefficients: list[int]
    residual: mpf
    accepted: bool
    status: str = "accepted"
    labels: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["residual"] = mpmath.nstr(self.residual, 5)
        return out

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coefficients)


def default_coeff_digits(n: int, digits: int) -> int:
    """Coefficient size (decimal digits) around which generic short vectors of an
    ``n``-dimensional relation lattice start to appear."""
    return max(1, (digits - GUARD_DIGITS) // (n + 1) + 1)


def _as_bigreal(x, prec: int) -> BigReal:
    if isinstance(x, BigReal):
        return x
    if isinstance(x, (int, Fraction)):
        return BigReal.exact(x, prec)
    with mpmath.workprec(prec):
        return BigReal(mpf(x), prec)


def find_integer_relation(xs: Sequence, coeff_bound_digits: int | None = None,
                          digits: int | None = None, delta=DEFAULT_DELTA) -> RelationResult | None:
    """Search for an integer vector ``a`` with ``sum a_i x_i = 0``.

    Returns an accepted :class:`RelationResult`, an unaccepted one with status
    ``"inconclusive"`` when the best candidate is in the ambiguous band, or
    ``None`` when the data show no relation at this precision.
    """
    big = [x for x in xs if isinstance(x, BigReal)]
    precs = {x.prec for x in big}
    if len(precs) > 1:
        raise ValueError("mixed precisions in relation search")
    if digits is None:
        digits = big[0].digits if big else 60
    if digits < 50:
        raise ValueError("integer relation search needs at least 50 digits")
    prec = precs.pop() if precs else precision_for(digits)
    vals = [_as_bigreal(x, prec) for x in xs]
    n = len(vals)
    if n < 2:
        raise ValueError("need at least two numbers")
    B = default_coeff_digits(n, digits) if coeff_bound_digits is None else coeff_bound_digits
    E = max(1, digits - B - GUARD_DIGITS)

    W = math.ceil((digits + 30) * LOG2_10)
    with mpmath.workprec(prec + 16):
        X = [int(mpmath.nint(mpmath.ldexp(v.value, W))) for v in vals]
        xmax = max(abs(v.value) for v in vals)
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    e = 0
    half = 1 << (W - 1)
    while e < E:
        e = min(E, e + STAGE_DIGITS)
        C = 10 ** e
        rows = [u + [(sum(a * x for a, x in zip(u, X)) * C + half) >> W] for u in U]
        U = [row[:n] for row in lll_reduce(rows, delta)]

    def residual(a):
        with mpmath.workprec(prec):
            return abs(mpmath.fsum(c * v.value for c, v in zip(a, vals)))

    scale = max(mpf(1), xmax)
    accept_res = mpf(10) ** (-0.6 * digits) * scale
    reject_res = mpf(10) ** (-0.3 * digits) * scale
    coeff_bound = 10 ** B

    def candidate(a):
        a = _normalize(a)
        res = residual(a)
        return a, res, relation_excess(a, res / scale)

    accepted = []
    for u in U:
        a, res, excess = candidate(u)
        if (res < accept_res and max(abs(c) for c in a) < coeff_bound
                and excess >= SIGNIFICANT_EXCESS * digits):
            accepted.append((sum(c * c for c in a), a, res))
    if accepted:
        _, a, res = min(accepted)
        return RelationResult(a, res, True, "accepted")
    a, res, excess = candidate(U[0])
    if res > reject_res or excess < GENERIC_EXCESS * digits:
        return None
    return RelationResult(a, res, False, "inconclusive")


def relation_excess(a: Sequence[int], rel_residual) -> float:
    """Decimal digits of cancellation beyond what a generic integer vector of the
    same size achieves (about ``norm**-(n-1)``); near zero for chance relations."""
    norm = math.sqrt(sum(c * c for c in a))
    if rel_residual == 0:
        return math.inf
    return -float(mpmath.log10(rel_residual)) - (len(a) - 1) * math.log10(max(norm, 1.0))


def _normalize(a: list[int]) -> list[int]:
    g = 0
    for c in a:
        g = math.gcd(g, c)
    a = [c // g for c in a] if g > 1 else list(a)
    first = next((c for c in a if c), 0)
    return [-c for c in a] if first < 0 else a


# ---------------------------------------------------------- dimensions

@dataclass
class DimensionReport:
    weight: int
    family: str
    count: int
    relations: int
    dimension: int
    digits: int
    status: str = "ok"
    basis: list[str] = field(default_factory=list)
    caveat: str = CAVEAT

    def to_dict(self) -> dict:
        return asdict(self)


def recommended_digits(k: int) -> int:
    return min(320, max(100, 60 + 15 * 2 ** (k - 4)))


def family_values(family: str, k: int, digits: int) -> list[tuple[str, BigReal]]:
    family = FAMILY_ALIASES.get(family, family)
    ixs = enumerate_admissible(k)
    if family == "T":
        return [(f"T({format_index(ix)})", T_value(ix, digits)) for ix in ixs]
    if family == "t":
        return [(f"t({format_index(ix)})", t_value(ix, digits)) for ix in ixs]
    if family == "zeta":
        return [(f"zeta({format_index(ix)})", zeta_value(ix, digits)) for ix in ixs]
    if family == "union":
        return family_values("T", k, digits) + family_values("t", k, digits)
    raise ValueError(f"unknown family {family!r}")


def independent_subset(values: Sequence[tuple[str, BigReal]], digits: int):
    """Greedy scan: keep a value unless it is an integer combination of the kept ones.

    Returns ``(kept, relations, inconclusive)`` where ``relations`` lists
    ``(label, RelationResult)`` for every dropped value.
    """
    kept: list[tuple[str, BigReal]] = []
    relations = []
    inconclusive = 0
    for label, x in values:
        if not kept:
            if abs(x.value) <= mpf(10) ** (-0.6 * digits):
                relations.append((label, RelationResult([1], abs(x.value), True, labels=[label])))
            else:
                kept.append((label, x))
            continue
        res = find_integer_relation([v for _, v in kept] + [x], digits=digits)
        if res is not None and res.accepted and res.coefficients[-1] != 0:
            res.labels = [l for l, _ in kept] + [label]
            relations.append((label, res))
            continue
        if res is not None:
            inconclusive += 1
        kept.append((label, x))
    return kept, relations, inconclusive


def relation_lattice_rank(family: str, k: int, digits: int | None = None,
                          max_weight: int = MAX_WEIGHT) -> DimensionReport:
    """Numeric dimension of the span of a family at weight ``k``."""
    name = FAMILY_ALIASES.get(family, family)
    if name == "intersection":
        return dims_union_intersection(k, digits, max_weight)[1]
    if k > max_weight:
        raise ValueError(f"weight {k} exceeds the configured maximum {max_weight}")
    if k < 2:
        return DimensionReport(k, name, int(k == 0), 0, int(k == 0), digits or 0)
    digits = recommended_digits(k) if digits is None else digits
    values = family_values(name, k, digits)
    kept, relations, inconclusive = independent_subset(values, digits)
    return DimensionReport(
        weight=k, family=name, count=len(values), relations=len(relations),
        dimension=len(kept), digits=digits,
        status="inconclusive" if inconclusive else "ok",
        basis=[l for l, _ in kept],
    )


def dims_union_intersection(k: int, digits: int | None = None,
                            max_weight: int = MAX_WEIGHT) -> tuple[DimensionReport, DimensionReport]:
    """``dim(T_k + t_k)`` and ``dim(T_k ∩ t_k) = dim T_k + dim t_k - dim(T_k + t_k)``."""
    dT = relation_lattice_rank("T", k, digits, max_weight)
    dt = relation_lattice_rank("t", k, digits, max_weight)
    if k < 2:
        dsum = DimensionReport(k, "union", int(k == 0), 0, int(k == 0), digits or 0)
    else:
        digits = dT.digits
        # T basis first, then every t-value
        values = [(l, v) for l, v in family_values("T", k, digits) if l in dT.basis]
        values += family_values("t", k, digits)
        kept, relations, inconclusive = independent_subset(values, digits)
        count = len(enumerate_admissible(k)) * 2
        dsum = DimensionReport(
            weight=k, family="union", count=count, relations=count - len(kept),
            dimension=len(kept), digits=digits,
            status="inconclusive" if inconclusive or "inconclusive" in (dT.status, dt.status) else "ok",
            basis=[l for l, _ in kept],
        )
    inter = dT.dimension + dt.dimension - dsum.dimension
    dcap = DimensionReport(
        weight=k, family="intersection", count=dT.dimension + dt.dimension,
        relations=dT.dimension + dt.dimension - inter, dimension=inter, digits=dsum.digits,
        status=dsum.status,
    )
    return dsum, dcap


# ------------------------------------------------------- membership in Z

def zeta_spanning_set(k: int) -> list[tuple[int, ...]]:
    """``zeta(k)`` followed by the compositions of ``k`` into 2s and 3s."""
    out = [(k,)]
    for c in sorted(compositions(k, (2, 3)), key=lambda c: (len(c), c)):
        if c != (k,) and set(c) != {2}:
            out.append(c)
    return out


def zeta_basis(k: int, digits: int) -> list[tuple[str, BigReal]]:
    vals = [(f"zeta({format_index(ix)})", zeta_value(ix, digits)) for ix in zeta_spanning_set(k)]
    kept, _, _ = independent_subset(vals, digits)
    return kept


def membership_in_Z(x: BigReal, k: int, digits: int | None = None,
                    label: str = "x") -> RelationResult | None:
    """Look for ``x`` in the span of weight-``k`` multiple zeta values."""
    digits = x.digits if digits is None else digits
    basis = zeta_basis(k, digits)
    res = find_integer_relation([x] + [v for _, v in basis], digits=digits)
    if res is None:
        return None
    res.labels = [label] + [l for l, _ in basis]
    if res.accepted and res.coefficients[0] == 0:
        res.accepted, res.status = False, "inconclusive"
    return res
