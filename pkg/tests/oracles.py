"""Independent reference values: truncated nested sums plus a tail fit.

Nothing here touches the iterated-integral machinery; sums run directly over
``0 < m1 < ... < mr`` in floating point.
"""
import math

import mpmath

CHECKPOINT = 50_000
FIT_POINTS = 4


def _weights(family, signs=None):
    if family == "T":
        # m_i has the parity of i (1-based), each factor carries a 2
        return lambda i, m: 2.0 if m % 2 == (i + 1) % 2 else 0.0
    if family == "t":
        return lambda i, m: 1.0 if m % 2 else 0.0
    if family == "zeta":
        return lambda i, m: 1.0
    if family == "altZ":
        return lambda i, m: float(signs[i]) ** m
    raise ValueError(family)


def nested_partial_sums(ks, weight, checkpoints):
    """Partial sums of ``sum_{m1<...<mr<=M} prod weight(i, m_i) / m_i**k_i`` at each M."""
    r = len(ks)
    acc = [0.0] * r
    out = []
    marks = iter(sorted(checkpoints))
    nxt = next(marks)
    for m in range(1, max(checkpoints) + 1):
        # descending i so acc[i-1] only holds chains with m_{i-1} < m
        for i in range(r - 1, -1, -1):
            w = weight(i, m)
            if w:
                acc[i] += w / m ** ks[i] * (acc[i - 1] if i else 1.0)
        if m == nxt:
            out.append(acc[-1])
            nxt = next(marks, None)
    return out


def nested_sum(family, ks, signs=None, base=CHECKPOINT):
    """Limit of the partial sums, fitting ``S(M) = L + (a log^2 M + b log M + c)/M``."""
    Ms = [base * 2 ** j for j in range(FIT_POINTS)]
    S = nested_partial_sums(tuple(ks), _weights(family, signs), Ms)
    rows, rhs = [], []
    for M, s in zip(Ms, S):
        l = math.log(M)
        rows.append([1.0, -l * l / M, -l / M, -1.0 / M])
        rhs.append(s)
    with mpmath.workdps(30):
        sol = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
    return float(sol[0])


def matching_digits(a, b) -> float:
    a, b = float(a), float(b)
    if a == b:
        return math.inf
    return -math.log10(abs(a - b) / max(abs(a), abs(b)))


def hermite_normal_form(rows):
    """Row-style HNF of a nonsingular square integer matrix (upper triangular, positive pivots)."""
    A = [list(r) for r in rows]
    n = len(A)
    for col in range(n):
        # Euclid on the column below the diagonal
        while True:
            nz = [i for i in range(col, n) if A[i][col]]
            if not nz:
                raise ValueError("singular")
            piv = min(nz, key=lambda i: abs(A[i][col]))
            A[col], A[piv] = A[piv], A[col]
            done = True
            for i in range(col + 1, n):
                q = A[i][col] // A[col][col]
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[col])]
                if A[i][col]:
                    done = False
            if done:
                break
        if A[col][col] < 0:
            A[col] = [-x for x in A[col]]
        for i in range(col):
            q = A[i][col] // A[col][col]
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[col])]
    return A
