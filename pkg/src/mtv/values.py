"""Evaluators for T-, t-, zeta- and alternating zeta values, plus a value cache."""
from __future__ import annotations

import logging
import math
import os
import threading
import zlib
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import mpmath
from mpmath import mpf

from .indices import (
    Index,
    LinearCombo,
    SignedIndex,
    check_admissible,
    expand_T,
    expand_t,
    format_index,
    make_signed,
    signed_index_to_eval_word,
    word_to_index,
)
from .series_eval import (
    BigReal,
    chen_evaluate_fixed,
    gamma,
    hyp2f1_at_minus1,
    precision_for,
    terms_for,
)

log = logging.getLogger(__name__)

FAMILIES = ("T", "t", "zeta", "altZ")
CACHE_ENV = "MTV_CACHE_DIR"
CACHE_FILE = "values.cache"

# 2 dt/(1-t^2), dt/(1-t^2) and t dt/(1-t^2) in the 4-letter alphabet
OMEGA1 = {1: 1, -1: -1}
T_FIRST = {1: Fraction(1, 2), -1: Fraction(-1, 2)}
T_LATER = {1: Fraction(1, 2), -1: Fraction(1, 2)}


@dataclass(frozen=True)
class ValueKey:
    family: str
    index: Index
    signs: tuple[int, ...]
    prec: int
    order: int

    def record_prefix(self) -> str:
        signs = ",".join("+" if s > 0 else "-" for s in self.signs)
        return f"{self.family}|{format_index(self.index)}|{signs}|{self.prec}|{self.order}"


# ------------------------------------------------------------------ cache

class ValueCache:
    """Append-only text cache, one ``family|index|signs|P|N|decimal|crc32`` record per line."""

    def __init__(self, directory: str | os.PathLike):
        self.path = Path(directory) / CACHE_FILE
        self._lock = threading.Lock()
        self._entries: dict[tuple, dict[tuple[int, int], mpf]] | None = None

    def _load(self) -> dict:
        if self._entries is not None:
            return self._entries
        entries: dict = {}
        if self.path.exists():
            for lineno, line in enumerate(self.path.read_text().splitlines(), 1):
                parsed = _parse_record(line)
                if parsed is None:
                    log.warning("skipping corrupted cache record %s:%d", self.path, lineno)
                    continue
                key, value = parsed
                entries.setdefault((key.family, key.index, key.signs), {})[(key.prec, key.order)] = value
        self._entries = entries
        return entries

    def get(self, key: ValueKey) -> BigReal | None:
        with self._lock:
            found = self._load().get((key.family, key.index, key.signs), {})
        best = None
        for (prec, order), value in found.items():
            if prec >= key.prec and order >= key.order and (best is None or prec < best[0]):
                best = (prec, order, value)
        if best is None:
            return None
        prec, _, value = best
        with mpmath.workprec(key.prec):
            v = +value
        # the stored value is accurate to its own guard bits
        return BigReal(v, key.prec, abs(v) * mpf(2) ** (1 - key.prec) + mpf(2) ** (-(prec - 100)))

    def put(self, key: ValueKey, value: BigReal) -> None:
        line = format_record(key, value)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a") as fh:
                fh.write(line + "\n")
            if self._entries is not None:
                self._entries.setdefault((key.family, key.index, key.signs), {})[(key.prec, key.order)] = value.value


def _decimal_digits(prec: int) -> int:
    # enough digits for a bit-exact round trip at prec bits
    return math.ceil(prec * math.log10(2)) + 2


def format_record(key: ValueKey, value: BigReal) -> str:
    with mpmath.workprec(key.prec):
        dec = mpmath.nstr(value.value, _decimal_digits(key.prec), strip_zeros=False)
    body = f"{key.record_prefix()}|{dec}"
    return f"{body}|{zlib.crc32(body.encode()):08x}"


def _parse_record(line: str):
    try:
        body, crc = line.rsplit("|", 1)
        if int(crc, 16) != zlib.crc32(body.encode()):
            return None
        family, ix, signs, prec, order, dec = body.split("|")
        prec, order = int(prec), int(order)
        index = tuple(int(k) for k in ix.split(",")) if ix else ()
        sign_t = tuple(1 if s == "+" else -1 for s in signs.split(",")) if signs else ()
        with mpmath.workprec(prec):
            value = mpf(dec)
    except (ValueError, TypeError):
        return None
    if family not in FAMILIES:
        return None
    return ValueKey(family, index, sign_t, prec, order), value


_default_cache: ValueCache | None = None


def set_cache_dir(directory: str | os.PathLike | None) -> None:
    global _default_cache
    _default_cache = ValueCache(directory) if directory else None


def get_cache() -> ValueCache | None:
    if _default_cache is None and os.environ.get(CACHE_ENV):
        set_cache_dir(os.environ[CACHE_ENV])
    return _default_cache


# ------------------------------------------------------------- evaluators

def _params(digits: int, terms: int | None) -> tuple[int, int]:
    return precision_for(digits), terms_for(digits) if terms is None else terms


@lru_cache(maxsize=200_000)
def _word_value(word: tuple, prec: int, order: int) -> BigReal:
    forms = tuple(dict(f) if isinstance(f, tuple) else f for f in word)
    value, err = chen_evaluate_fixed(forms, prec, order)
    return BigReal.from_fixed(value, prec, err)


def _freeze(form):
    return tuple(sorted(form.items())) if isinstance(form, dict) else form


def _evaluate(key: ValueKey, word: list) -> BigReal:
    cache = get_cache()
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    value = _word_value(tuple(_freeze(f) for f in word), key.prec, key.order)
    if cache is not None:
        cache.put(key, value)
    return value


def T_word(ix: Index) -> list:
    """Letter-form word of ``T(ix)``: each letter 1 is ``letter(+1) - letter(-1)``."""
    word = []
    for k in ix:
        word.append(OMEGA1)
        word.extend([0] * (k - 1))
    return word


def t_word(ix: Index) -> list:
    word = []
    for i, k in enumerate(ix):
        word.append(T_FIRST if i == 0 else T_LATER)
        word.extend([0] * (k - 1))
    return word


def T_value(ix: Index, digits: int = 60, terms: int | None = None, route: str = "forms") -> BigReal:
    """Multiple T-value.

    ``route="forms"`` integrates the letter ``2dt/(1-t^2)`` directly, which is
    the multilinear expansion into ``+1``/``-1`` letters carried out on the
    series; ``route="signed"`` goes through :func:`expand_T` and evaluates each
    alternating MZV separately.
    """
    ix = check_admissible(ix)
    prec, order = _params(digits, terms)
    if route == "signed":
        return evaluate_combo(expand_T(ix), digits, terms)
    if route != "forms":
        raise ValueError(f"unknown route {route!r}")
    return _evaluate(ValueKey("T", ix, (), prec, order), T_word(ix))


def t_value(ix: Index, digits: int = 60, terms: int | None = None, route: str = "forms") -> BigReal:
    """Hoffman's t-value (all summation variables odd)."""
    ix = check_admissible(ix)
    prec, order = _params(digits, terms)
    if route == "signed":
        return evaluate_combo(expand_t(ix), digits, terms)
    if route != "forms":
        raise ValueError(f"unknown route {route!r}")
    return _evaluate(ValueKey("t", ix, (), prec, order), t_word(ix))


def zeta_value(ix: Index, digits: int = 60, terms: int | None = None) -> BigReal:
    ix = check_admissible(ix)
    prec, order = _params(digits, terms)
    word = list(signed_index_to_eval_word(make_signed(ix, [1] * len(ix))))
    return _evaluate(ValueKey("zeta", ix, (), prec, order), word)


def altZ_value(z: SignedIndex, digits: int = 60, terms: int | None = None) -> BigReal:
    z = make_signed(z.parts, z.signs)
    prec, order = _params(digits, terms)
    if not z.parts:
        return BigReal.exact(1, prec)
    word = list(signed_index_to_eval_word(z))
    return _evaluate(ValueKey("altZ", z.parts, z.signs, prec, order), word)


def evaluate_combo(combo: LinearCombo, digits: int = 60, terms: int | None = None,
                   family: str = "altZ") -> BigReal:
    """Evaluate a rational combination of signed indices, indices or T-words."""
    prec, _ = _params(digits, terms)
    total = BigReal.exact(0, prec)
    for term, c in combo.items():
        if isinstance(term, SignedIndex):
            v = altZ_value(term, digits, terms)
        elif isinstance(term, str):
            v = _family_value("T", word_to_index(term), digits, terms)
        elif not term:
            v = BigReal.exact(1, prec)
        else:
            v = _family_value(family, term, digits, terms)
        total = total + v * c
    return total


def _family_value(family: str, ix: Index, digits: int, terms: int | None) -> BigReal:
    if family == "T":
        return T_value(ix, digits, terms)
    if family == "t":
        return t_value(ix, digits, terms)
    if family == "zeta":
        return zeta_value(ix, digits, terms)
    raise ValueError(f"family {family!r} needs signed indices")


def value(family: str, ix, digits: int = 60, terms: int | None = None) -> BigReal:
    if family == "altZ":
        return altZ_value(ix, digits, terms)
    return _family_value(family, tuple(ix), digits, terms)


# --------------------------------------------------- height-one generating series

def _check_box(X: Fraction, Y: Fraction) -> None:
    if abs(X) > Fraction(1, 4) or abs(Y) > Fraction(1, 4):
        raise ValueError("generating series needs |X|, |Y| <= 1/4")
    if Y > 0:
        raise ValueError("generating series needs Y <= 0")


# Assumed uniform bound for height-one T-values; checked by the tail-doubling test.
HEIGHT_ONE_BOUND = 4


def genfun_truncation(X: Fraction, Y: Fraction, digits: int) -> int:
    q = max(abs(X), abs(Y))
    if q == 0:
        return 2
    M = 2
    # tail over m + n > M is at most C * sum_{s > M} (s - 1) q^s
    while HEIGHT_ONE_BOUND * (M + 1) * float(q) ** (M + 1) / (1 - float(q)) ** 2 >= 10.0 ** (-digits - 2):
        M += 1
    return M


def genfun_lhs(X, Y, digits: int = 30, terms: int | None = None, max_total: int | None = None) -> BigReal:
    """``1 - sum_{m,n>=1} T(1,...,1,m+1) X^m Y^n`` (n-1 ones), truncated at ``m + n <= M``."""
    X, Y = Fraction(X), Fraction(Y)
    _check_box(X, Y)
    prec, _ = _params(digits, terms)
    M = genfun_truncation(X, Y, digits) if max_total is None else max_total
    total = BigReal.exact(1, prec)
    if X == 0 or Y == 0:
        return total
    for s in range(2, M + 1):
        for n in range(1, s):
            m = s - n
            ix = (1,) * (n - 1) + (m + 1,)
            total = total - T_value(ix, digits, terms) * (X ** m * Y ** n)
    q = mpf(max(abs(X), abs(Y)).numerator) / max(abs(X), abs(Y)).denominator
    tail = HEIGHT_ONE_BOUND * (M + 1) * q ** (M + 1) / (1 - q) ** 2
    return BigReal(total.value, total.prec, total.err + tail)


def genfun_rhs(X, Y, digits: int = 30) -> BigReal:
    """``2 G(1-X) G(1-Y) / G(1-X-Y) * 2F1(1-X, 1-Y; 1-X-Y; -1)``."""
    X, Y = Fraction(X), Fraction(Y)
    _check_box(X, Y)
    prec = precision_for(digits)
    a, b, c = 1 - X, 1 - Y, 1 - X - Y
    g = gamma(a, prec) * gamma(b, prec) / gamma(c, prec)
    return g * hyp2f1_at_minus1(a, b, c, prec) * 2
