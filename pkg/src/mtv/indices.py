"""Exact combinatorics of indices and iterated-integral words.

Conventions used throughout the package:

* An *index* is a tuple of positive ints ``(k1, ..., kr)`` attached to
  summation variables ``m1 < m2 < ... < mr``.  It is admissible when the
  LAST entry is at least 2.
* A *T-word* is a string over ``"1"`` and ``"0"``; letter 1 stands for the
  form ``2 dt / (1 - t^2)`` and letter 0 for ``dt / t``.  Letters are read
  from the ``t -> 0`` end.
* A *signed index* pairs an index with signs in ``{+1, -1}`` and names the
  alternating sum ``sum prod sign_i**m_i / m_i**k_i``.
* An *evaluation word* is a tuple over ``{0, 1, -1, 2}`` denoting the forms
  ``dt/t``, ``dt/(1-t)``, ``-dt/(1+t)`` and ``dt/(2-t)``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb
from typing import Iterable, Iterator, NamedTuple

Index = tuple[int, ...]


class NotAdmissibleError(ValueError):
    pass


class SignedIndex(NamedTuple):
    parts: Index
    signs: tuple[int, ...]

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def depth(self) -> int:
        return len(self.parts)

    def is_convergent(self) -> bool:
        return not self.parts or (self.parts[-1], self.signs[-1]) != (1, 1)

    def __str__(self) -> str:
        return format_signed_index(self)


def make_signed(parts: Iterable[int], signs: Iterable[int]) -> SignedIndex:
    parts, signs = tuple(int(k) for k in parts), tuple(int(s) for s in signs)
    if len(parts) != len(signs):
        raise ValueError("parts and signs differ in length")
    if any(k < 1 for k in parts):
        raise ValueError("index parts must be positive")
    if any(s not in (1, -1) for s in signs):
        raise ValueError("signs must be +1 or -1")
    return SignedIndex(parts, signs)


# ---------------------------------------------------------------- basics

def weight(ix: Index) -> int:
    return sum(ix)


def depth(ix: Index) -> int:
    return len(ix)


def is_admissible(ix: Index) -> bool:
    return len(ix) >= 1 and ix[-1] >= 2 and all(k >= 1 for k in ix)


def check_admissible(ix: Index) -> Index:
    ix = tuple(int(k) for k in ix)
    if any(k < 1 for k in ix):
        raise ValueError(f"index {ix} has non-positive parts")
    if not is_admissible(ix):
        raise NotAdmissibleError(f"index {format_index(ix)} is not admissible")
    return ix


def index_to_word(ix: Index) -> str:
    """``(k1,...,kr) -> 1 0^(k1-1) 1 0^(k2-1) ... 1 0^(kr-1)``."""
    ix = check_admissible(ix)
    return "".join("1" + "0" * (k - 1) for k in ix)


def word_to_index(w: str) -> Index:
    if not w or w[0] != "1" or w[-1] != "0" or set(w) - {"0", "1"}:
        raise ValueError(f"malformed T-word {w!r}: must start with 1 and end with 0")
    parts = []
    for letter in w:
        if letter == "1":
            parts.append(1)
        else:
            parts[-1] += 1
    return tuple(parts)


def dual(ix: Index) -> Index:
    """Dual index: reverse the word and swap the letters 0 and 1."""
    w = index_to_word(ix)
    return word_to_index("".join("1" if c == "0" else "0" for c in reversed(w)))


def enumerate_admissible(k: int) -> list[Index]:
    """All admissible indices of weight ``k``, ordered by depth, then lexicographically."""
    if k < 0:
        raise ValueError("weight must be non-negative")
    if k == 0:
        return [()]
    out = [ix for ix in compositions(k) if ix[-1] >= 2]
    return sorted(out, key=lambda ix: (len(ix), ix))


def compositions(k: int, parts: Iterable[int] | None = None) -> Iterator[Index]:
    """Compositions of ``k``; optionally restricted to the given part sizes."""
    allowed = None if parts is None else set(parts)
    if k == 0:
        yield ()
        return
    for first in range(1, k + 1):
        if allowed is not None and first not in allowed:
            continue
        for rest in compositions(k - first, allowed):
            yield (first,) + rest


# ---------------------------------------------------------- linear combos

def _term_key(term):
    if isinstance(term, SignedIndex):
        return (term.weight, term.depth, term.parts, tuple(0 if s > 0 else 1 for s in term.signs))
    if isinstance(term, str):
        return (len(term), term)
    return (sum(term), term)


class LinearCombo:
    """Formal Q-linear combination of terms (indices, signed indices or words).

    Zero coefficients are dropped; iteration follows a fixed order (weight,
    then lexicographic).
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        self._terms: dict = {}
        if terms:
            items = terms.items() if hasattr(terms, "items") else terms
            for term, c in items:
                self.add_term(term, c)

    @classmethod
    def single(cls, term, coeff=1) -> "LinearCombo":
        return cls({term: coeff})

    def add_term(self, term, coeff) -> None:
        c = self._terms.get(term, Fraction(0)) + Fraction(coeff)
        if c:
            self._terms[term] = c
        else:
            self._terms.pop(term, None)

    def items(self):
        return sorted(self._terms.items(), key=lambda kv: _term_key(kv[0]))

    def terms(self):
        return [t for t, _ in self.items()]

    def coeff(self, term) -> Fraction:
        return self._terms.get(term, Fraction(0))

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self.terms())

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, LinearCombo):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "LinearCombo") -> "LinearCombo":
        out = LinearCombo(self._terms)
        for t, c in other._terms.items():
            out.add_term(t, c)
        return out

    def __neg__(self):
        return LinearCombo({t: -c for t, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        scalar = Fraction(scalar)
        return LinearCombo({t: c * scalar for t, c in self._terms.items()})

    __rmul__ = __mul__

    def map_terms(self, fn) -> "LinearCombo":
        out = LinearCombo()
        for t, c in self._terms.items():
            out.add_term(fn(t), c)
        return out

    def total_coefficient(self) -> Fraction:
        return sum(self._terms.values(), Fraction(0))

    def __repr__(self):
        return f"LinearCombo({str(self)})"

    def __str__(self):
        if not self._terms:
            return "0"
        pieces = []
        for term, c in self.items():
            if isinstance(term, str):
                name = term or "()"
            elif isinstance(term, SignedIndex):
                name = "Z(" + format_signed_index(term) + ")"
            else:
                name = "(" + format_index(term) + ")"
            pieces.append(f"{_format_fraction(abs(c))}*{name}")
            pieces[-1] = ("-" if c < 0 else "+", pieces[-1])
        head_sign, head = pieces[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text


def _format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ------------------------------------------------------------- products

def shuffle(u: str, v: str) -> LinearCombo:
    """Shuffle product of two words (any alphabet of one-character letters)."""
    return LinearCombo(_shuffle(u, v))


@lru_cache(maxsize=None)
def _shuffle(u: str, v: str) -> tuple:
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    acc: dict[str, int] = {}
    for w, c in _shuffle(u[1:], v):
        acc[u[0] + w] = acc.get(u[0] + w, 0) + c
    for w, c in _shuffle(u, v[1:]):
        acc[v[0] + w] = acc.get(v[0] + w, 0) + c
    return tuple(acc.items())


def stuffle(a: Index, b: Index) -> LinearCombo:
    """Quasi-shuffle (harmonic) product of two indices.

    Recursion peels off the LAST entries, i.e. the largest summation
    variables in the increasing convention.
    """
    return LinearCombo(_stuffle(tuple(a), tuple(b)))


@lru_cache(maxsize=None)
def _stuffle(a: Index, b: Index) -> tuple:
    if not a:
        return ((b, 1),)
    if not b:
        return ((a, 1),)
    x, u = a[-1], a[:-1]
    y, v = b[-1], b[:-1]
    acc: dict[Index, int] = {}
    for head, tail in ((_stuffle(u, b), (x,)), (_stuffle(a, v), (y,)), (_stuffle(u, v), (x + y,))):
        for ix, c in head:
            key = ix + tail
            acc[key] = acc.get(key, 0) + c
    return tuple(acc.items())


def shuffle_indices(a: Index, b: Index) -> LinearCombo:
    """Shuffle product of admissible indices, expressed on indices."""
    return shuffle(index_to_word(a), index_to_word(b)).map_terms(word_to_index)


def product_combo(x: LinearCombo, y: LinearCombo, mult) -> LinearCombo:
    out = LinearCombo()
    for s, c in x.items():
        for t, d in y.items():
            for term, e in mult(s, t).items():
                out.add_term(term, c * d * e)
    return out


# --------------------------------------------- expansion into Euler sums

def _subsets(r: int) -> Iterator[tuple[int, ...]]:
    for bits in product((0, 1), repeat=r):
        yield tuple(i + 1 for i, b in enumerate(bits) if b)


def expand_T(ix: Index) -> LinearCombo:
    """Write ``T(ix)`` as a signed sum of alternating MZVs.

    Uses ``1[m = i mod 2] = (1 + (-1)**i (-1)**m) / 2``; the factor ``2**r``
    of T cancels the halves.
    """
    ix = tuple(ix)
    if ix:
        check_admissible(ix)
    r = len(ix)
    out = LinearCombo()
    for S in _subsets(r):
        signs = tuple(-1 if i + 1 in S else 1 for i in range(r))
        out.add_term(SignedIndex(ix, signs), (-1) ** sum(S))
    return out


def expand_t(ix: Index) -> LinearCombo:
    """Hoffman's t-value as alternating MZVs: ``2**-r sum_S (-1)**|S| Z(ix; sigma_S)``."""
    ix = tuple(ix)
    if ix:
        check_admissible(ix)
    r = len(ix)
    out = LinearCombo()
    scale = Fraction(1, 2 ** r)
    for S in _subsets(r):
        signs = tuple(-1 if i + 1 in S else 1 for i in range(r))
        out.add_term(SignedIndex(ix, signs), (-1) ** len(S) * scale)
    return out


def signed_index_to_eval_word(z: SignedIndex) -> tuple[int, ...]:
    """Evaluation word of an alternating MZV.

    Letter ``c_i = sigma_i * ... * sigma_r`` opens block ``i``; the block is
    padded with ``k_i - 1`` zeros.
    """
    z = make_signed(z.parts, z.signs)
    if not z.is_convergent():
        raise ValueError(f"signed index {format_signed_index(z)} diverges")
    word: list[int] = []
    for i, k in enumerate(z.parts):
        c = 1
        for s in z.signs[i:]:
            c *= s
        word.append(c)
        word.extend([0] * (k - 1))
    return tuple(word)


# ---------------------------------------------------------- formatting

def format_index(ix: Index) -> str:
    return ",".join(str(k) for k in ix)


def parse_index(text: str) -> Index:
    text = text.strip().strip("()")
    if not text:
        return ()
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ValueError(f"cannot parse index {text!r}") from None
    if any(k < 1 for k in parts):
        raise ValueError(f"index {text!r} has non-positive parts")
    return parts


def format_signed_index(z: SignedIndex) -> str:
    return format_index(z.parts) + ";" + ",".join("+" if s > 0 else "-" for s in z.signs)


def parse_signed_index(text: str) -> SignedIndex:
    head, _, tail = text.partition(";")
    parts = parse_index(head)
    if not tail:
        return make_signed(parts, [1] * len(parts))
    signs = []
    for s in tail.split(","):
        s = s.strip()
        if s in ("+", "+1", "1"):
            signs.append(1)
        elif s in ("-", "-1"):
            signs.append(-1)
        else:
            raise ValueError(f"bad sign {s!r} in {text!r}")
    return make_signed(parts, signs)


def binomial_shuffle_formula(j: int, k: int) -> LinearCombo:
    """Closed form for ``T(j) T(k-j)`` as a combination of depth-two indices."""
    out = LinearCombo()
    for nu in range(2, k):
        out.add_term((k - nu, nu), comb(nu - 1, j - 1) + comb(nu - 1, k - j - 1))
    return out
