"""Arbitrary-precision numeric kernel.

Iterated integrals over ``[0, 1]`` are split at ``1/2`` (Chen's path
composition).  Both halves become integrals over ``[0, 1/2]`` of forms whose
singularities lie at distance at least 1/2, so truncated power series in
``t`` converge like ``2**-n`` there.

Series coefficients are fixed-point Python ints scaled by ``2**prec``.
Values returned to callers are :class:`BigReal`, an ``mpmath.mpf`` tagged
with its working precision and a conservative error estimate.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Mapping, Sequence, Union

import mpmath
from mpmath import mpf

LOG2_10 = 3.3219280948873623
GUARD_BITS = 96
TAIL_TERMS = 64

LETTERS = (0, 1, -1, 2)
# t -> 1 - t sends each letter to another one, up to sign
PATH_MAP = {0: (1, 1), 1: (0, 1), -1: (2, -1), 2: (-1, -1)}


def precision_for(digits: int) -> int:
    return math.ceil(digits * LOG2_10) + GUARD_BITS


def terms_for(digits: int) -> int:
    return math.ceil(digits * LOG2_10) + TAIL_TERMS


# ---------------------------------------------------------------- BigReal

@dataclass(frozen=True)
class BigReal:
    """Real number at ``prec`` bits with an absolute error estimate ``err``."""

    value: mpf
    prec: int
    err: mpf = mpf(0)

    @classmethod
    def exact(cls, x, prec: int) -> "BigReal":
        with mpmath.workprec(prec):
            if isinstance(x, Fraction):
                v = mpf(x.numerator) / x.denominator
            else:
                v = mpf(x)
        return cls(v, prec, mpf(0) if v == x else abs(v) * mpf(2) ** (1 - prec))

    @classmethod
    def from_fixed(cls, n: int, prec: int, err_ulps: int = 0) -> "BigReal":
        """Fixed-point integer ``n / 2**prec``."""
        with mpmath.workprec(max(prec, n.bit_length()) + 8):
            v = mpmath.ldexp(mpf(n), -prec)
        return cls(v, prec, mpmath.ldexp(mpf(err_ulps), -prec))

    def _coerce(self, other) -> "BigReal":
        if isinstance(other, BigReal):
            return other
        if isinstance(other, (int, Fraction)):
            return BigReal.exact(other, self.prec)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        with mpmath.workprec(prec):
            v = self.value + other.value
        return BigReal(v, prec, self.err + other.err + abs(v) * mpf(2) ** (1 - prec))

    __radd__ = __add__

    def __neg__(self):
        with mpmath.workprec(self.prec):
            return BigReal(-self.value, self.prec, self.err)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        with mpmath.workprec(prec):
            v = self.value * other.value
        err = abs(self.value) * other.err + abs(other.value) * self.err + self.err * other.err
        return BigReal(v, prec, err + abs(v) * mpf(2) ** (1 - prec))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        prec = min(self.prec, other.prec)
        with mpmath.workprec(prec):
            v = self.value / other.value
            err = (self.err + abs(v) * other.err) / abs(other.value)
        return BigReal(v, prec, err + abs(v) * mpf(2) ** (1 - prec))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = BigReal.exact(1, self.prec)
        for _ in range(n):
            out = out * self
        return out

    def __abs__(self):
        with mpmath.workprec(self.prec):
            return BigReal(abs(self.value), self.prec, self.err)

    def __float__(self):
        return float(self.value)

    def __lt__(self, other):
        return self.value < (other.value if isinstance(other, BigReal) else other)

    def __gt__(self, other):
        return self.value > (other.value if isinstance(other, BigReal) else other)

    @property
    def digits(self) -> int:
        return int((self.prec - GUARD_BITS) / LOG2_10)

    def to_decimal(self, digits: int | None = None) -> str:
        digits = self.digits if digits is None else digits
        with mpmath.workprec(self.prec):
            return mpmath.nstr(self.value, max(digits, 1), strip_zeros=False,
                               min_fixed=-math.inf, max_fixed=math.inf)

    def __str__(self):
        return self.to_decimal()

    def __repr__(self):
        return f"BigReal({mpmath.nstr(self.value, 20)}, prec={self.prec}, err={mpmath.nstr(self.err, 3)})"


# -------------------------------------------------------------- constants

_CONST_LOCK = threading.Lock()
_CONST_CACHE: dict[int, dict[str, int]] = {}


def _atan_inv(x: int, prec: int) -> int:
    """Fixed-point ``atan(1/x)``."""
    one = 1 << (prec + 16)
    term = one // x
    total, k, x2 = term, 1, x * x
    while term:
        term //= x2
        k += 2
        total += -(term // k) if k % 4 == 3 else term // k
    return total >> 16


def _atanh_inv(x: int, prec: int) -> int:
    one = 1 << (prec + 16)
    term = one // x
    total, k, x2 = term, 1, x * x
    while term:
        term //= x2
        k += 2
        total += term // k
    return total >> 16


def _compute_constants(prec: int) -> dict[str, int]:
    work = prec + 32
    pi = 16 * _atan_inv(5, work) - 4 * _atan_inv(239, work)
    log2 = 2 * _atanh_inv(3, work)
    sqrt2 = math.isqrt(2 << (2 * work))
    return {"pi": pi >> 32, "log2": log2 >> 32, "sqrt2": sqrt2 >> 32}


def _fixed_constants(prec: int) -> dict[str, int]:
    with _CONST_LOCK:
        cached = _CONST_CACHE.get(prec)
        if cached is None:
            cached = _CONST_CACHE[prec] = _compute_constants(prec)
    return cached


def constants(prec: int) -> dict[str, BigReal]:
    """pi (Machin), log 2 (atanh series at 1/3) and sqrt 2 at ``prec`` bits, memoized."""
    fixed = _fixed_constants(prec)
    return {
        "pi_const": BigReal.from_fixed(fixed["pi"], prec, 4),
        "log2_const": BigReal.from_fixed(fixed["log2"], prec, 4),
        "sqrt2_const": BigReal.from_fixed(fixed["sqrt2"], prec, 2),
    }


# ------------------------------------------------------------ power series

@dataclass
class TruncatedSeries:
    """``sum_{n<=N} coeffs[n] t**n`` with fixed-point coefficients at ``prec`` bits."""

    coeffs: list[int]
    prec: int

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, order: int, prec: int) -> "TruncatedSeries":
        return cls([1 << prec] + [0] * order, prec)

    @classmethod
    def from_values(cls, values: Sequence, prec: int) -> "TruncatedSeries":
        out = []
        for v in values:
            if isinstance(v, Fraction):
                out.append((v.numerator << prec) // v.denominator)
            else:
                with mpmath.workprec(prec + 16):
                    out.append(int(mpmath.nint(mpmath.ldexp(mpf(v), prec))))
        return cls(out, prec)

    def coefficient(self, n: int) -> mpf:
        with mpmath.workprec(self.prec + 16):
            return mpmath.ldexp(mpf(self.coeffs[n]), -self.prec)


class DivergenceError(ValueError):
    pass


Form = Mapping[int, Union[int, Fraction]]
WordLike = Sequence[Union[int, Form]]


def _density(f: list[int], letter: int) -> list[int]:
    """Coefficients of ``f(t) * rho(t)`` for the letter's density rho."""
    n_terms = len(f)
    if letter == 0:
        if f[0]:
            raise DivergenceError("logarithmic divergence: letter 0 applied to a series with f0 != 0")
        return f[1:] + [0]
    if letter == 1:
        return list(accumulate(f))
    if letter == -1:
        alt = list(accumulate(c if n % 2 == 0 else -c for n, c in enumerate(f)))
        return [-a if n % 2 == 0 else a for n, a in enumerate(alt)]
    if letter == 2:
        h, acc = [0] * n_terms, 0
        for n, c in enumerate(f):
            acc = (acc + c) >> 1
            h[n] = acc
        return h
    raise ValueError(f"unknown letter {letter!r}")


def _integrate(h: list[int]) -> list[int]:
    return [0] + [h[n - 1] // n for n in range(1, len(h))]


def _as_form(letter) -> tuple[tuple[int, Fraction], ...]:
    if isinstance(letter, Mapping):
        items = tuple((int(l), Fraction(c)) for l, c in letter.items() if c)
    else:
        items = ((int(letter), Fraction(1)),)
    for l, _ in items:
        if l not in LETTERS:
            raise ValueError(f"unknown letter {l!r}")
    return items


def _apply_form(f: list[int], form) -> list[int]:
    if len(form) == 1 and form[0][1] == 1:
        return _integrate(_density(f, form[0][0]))
    den = math.lcm(*(c.denominator for _, c in form))
    total = [0] * len(f)
    for letter, c in form:
        scale = c.numerator * (den // c.denominator)
        h = _density(f, letter)
        total = [a + scale * b for a, b in zip(total, h)]
    if den != 1:
        total = [a // den for a in total]
    return _integrate(total)


def apply_letter(f: TruncatedSeries, letter) -> TruncatedSeries:
    """``g(t) = int_0^t f(s) * form(s)``, truncated at the order of ``f``.

    ``letter`` is one of 0, 1, -1, 2 or a mapping ``{letter: coefficient}``
    for a rational combination of letters.
    """
    return TruncatedSeries(_apply_form(f.coeffs, _as_form(letter)), f.prec)


def _eval_half(coeffs: list[int]) -> tuple[int, int]:
    """Value at 1/2 and a tail estimate, both fixed point."""
    N = len(coeffs) - 1
    total = 0
    for n, c in enumerate(coeffs):
        total += c << (N - n)
    value = total >> N
    tail = (abs(coeffs[-1]) >> (N - 1)) + 2
    return value, tail


def eval_at_half(f: TruncatedSeries) -> BigReal:
    value, tail = _eval_half(f.coeffs)
    return BigReal.from_fixed(value, f.prec, tail + 1)


# ------------------------------------------------------------ Chen split

def _check_evaluable(word) -> None:
    if not word:
        return
    first = dict(word[0])
    if first.get(0):
        raise DivergenceError("word starts with letter 0 (divergent at t = 0)")
    last = dict(word[-1])
    if last.get(1):
        raise DivergenceError("word ends with letter +1 (divergent at t = 1)")


def _mapped(form) -> tuple[tuple[int, Fraction], ...]:
    acc: dict[int, Fraction] = {}
    for letter, c in form:
        image, sign = PATH_MAP[letter]
        acc[image] = acc.get(image, Fraction(0)) + sign * c
    return tuple((l, c) for l, c in acc.items() if c)


def _prefix_values(word, order: int, prec: int) -> tuple[list[int], list[int]]:
    f = [1 << prec] + [0] * order
    values, tails = [1 << prec], [0]
    for form in word:
        f = _apply_form(f, form)
        v, t = _eval_half(f)
        values.append(v)
        tails.append(t)
    return values, tails


def chen_evaluate_fixed(word: WordLike, prec: int, order: int) -> tuple[int, int]:
    """Fixed-point value of ``I(0; word; 1)`` and its error in ulps."""
    forms = [_as_form(letter) for letter in word]
    _check_evaluable(forms)
    k = len(forms)
    pre, pre_tail = _prefix_values(forms, order, prec)
    mapped = [_mapped(form) for form in reversed(forms)]
    suf, suf_tail = _prefix_values(mapped, order, prec)
    total, err = 0, 0
    for j in range(k + 1):
        a, b = pre[j], suf[k - j]
        total += a * b
        err += abs(a) * suf_tail[k - j] + abs(b) * pre_tail[j]
    value = total >> prec
    err = (err >> prec) + 4 * (k + 1) * order + 1
    return value, err


def chen_evaluate(word: WordLike, prec: int | None = None, order: int | None = None,
                  digits: int | None = None) -> BigReal:
    """Iterated integral ``I(0; word; 1)`` over the 4-letter alphabet.

    ``word`` lists letters from the ``t -> 0`` end; entries may be rational
    letter combinations (mappings), which is how T- and t-values avoid the
    ``2**depth`` expansion into single-letter words.
    """
    if digits is None:
        digits = 30
    prec = precision_for(digits) if prec is None else prec
    order = terms_for(digits) if order is None else order
    value, err = chen_evaluate_fixed(word, prec, order)
    return BigReal.from_fixed(value, prec, err)


# -------------------------------------------------------- gamma and 2F1

def _to_mpf(x, prec: int) -> mpf:
    with mpmath.workprec(prec):
        if isinstance(x, BigReal):
            return +x.value
        if isinstance(x, Fraction):
            return mpf(x.numerator) / x.denominator
        return mpf(x)


def _log_big(x: mpf, prec: int) -> mpf:
    with mpmath.workprec(prec):
        return mpmath.log(x)


def gamma(x, prec: int) -> BigReal:
    """Gamma function for ``x > 0`` via Stirling's series after an upward shift."""
    work = prec + 32
    x = _to_mpf(x, work)
    if x <= 0:
        raise ValueError("gamma is only implemented for x > 0")
    consts = constants(work)
    with mpmath.workprec(work):
        shift = max(0, math.ceil(0.35 * prec - float(x)))
        z = x + shift
        lz = _log_big(z, work)
        log_g = (z - mpf(1) / 2) * lz - z + _log_big(2 * consts["pi_const"].value, work) / 2
        eps = mpf(2) ** (-work)
        zpow, z2, k = z, z * z, 1
        while True:
            b = mpmath.bernfrac(2 * k)
            term = mpf(b[0]) / (b[1] * (2 * k) * (2 * k - 1)) / zpow
            log_g += term
            if abs(term) < eps:
                break
            zpow *= z2
            k += 1
        g = mpmath.exp(log_g)
        for i in range(shift):
            g /= x + i
    return BigReal(g, prec, abs(g) * mpf(2) ** (8 - prec))


def hyp2f1_at_minus1(a, b, c, prec: int) -> BigReal:
    """``2F1(a, b; c; -1)`` through Pfaff: ``2**-a * 2F1(a, c-b; c; 1/2)``."""
    work = prec + 32
    a, b, c = (_to_mpf(v, work) for v in (a, b, c))
    if c <= 0 and c == int(c):
        raise ValueError("2F1 has a pole: c is a non-positive integer")
    log2 = constants(work)["log2_const"].value
    with mpmath.workprec(work):
        cb = c - b
        eps = mpf(2) ** (-prec - 8)
        term, total, n, tail = mpf(1), mpf(1), 0, mpf(0)
        while True:
            term = term * (a + n) * (cb + n) / ((c + n) * (n + 1)) / 2
            total += term
            n += 1
            if term == 0:
                break
            ratio = abs((a + n) * (cb + n) / ((c + n) * (n + 1))) / 2
            if abs(term) < eps and ratio < mpf(3) / 4:
                tail = abs(term) * ratio / (1 - ratio)
                break
        value = mpmath.exp(-a * log2) * total
    return BigReal(value, prec, tail + abs(value) * mpf(2) ** (4 - prec))
