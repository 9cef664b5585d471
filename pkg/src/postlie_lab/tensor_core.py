"""Exact linear combinations and the shuffle Hopf algebra on words.

A word is a tuple of letters.  Letters are opaque hashable values (usually
positive integers), so the same machinery serves V, its dual, and the
infinite alphabets used elsewhere in the package.  Coefficients are exact:
``int`` or :class:`fractions.Fraction`, never floats.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Iterator, Mapping
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Any, Union

Scalar = Union[int, Fraction]
Word = tuple
EMPTY: Word = ()


def to_scalar(value: Any) -> Scalar:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact scalar."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    if isinstance(value, str):
        return to_scalar(Fraction(value.strip()))
    raise TypeError(f"cannot use {value!r} as an exact scalar")


def format_scalar(c: Scalar) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def sort_key(key: Any) -> tuple:
    """Total order on nested tuples of ints: shorter first, then lexicographic."""
    if isinstance(key, tuple):
        return (1, len(key), tuple(sort_key(k) for k in key))
    if isinstance(key, int):
        return (0, key, ())
    return (2, 0, (repr(key),))


def _clean(c: Scalar) -> Scalar:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def accumulate(target: dict, key: Any, c: Scalar) -> None:
    """``target[key] += c`` dropping zeros; the workhorse of every inner loop."""
    v = target.get(key, 0) + c
    if v:
        target[key] = v
    else:
        target.pop(key, None)


class Lin:
    """Immutable finite linear combination of hashable basis keys.

    Keys are stored in canonical order and zero coefficients are never kept,
    so two combinations are equal exactly when their term lists match.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | Iterable | None = None):
        acc: dict = {}
        if terms is not None:
            pairs = terms.items() if isinstance(terms, Mapping) else terms
            for k, c in pairs:
                accumulate(acc, k, to_scalar(c))
        self._terms = {k: _clean(acc[k]) for k in sorted(acc, key=sort_key)}
        self._hash = None

    @classmethod
    def from_dict(cls, d: dict) -> Lin:
        """Wrap an accumulator dict whose values are already exact and nonzero."""
        obj = cls.__new__(cls)
        obj._terms = {k: _clean(d[k]) for k in sorted(d, key=sort_key)}
        obj._hash = None
        return obj

    @classmethod
    def basis(cls, key: Any, c: Scalar = 1) -> Lin:
        return cls({key: c})

    @classmethod
    def zero(cls) -> Lin:
        return cls()

    def items(self):
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def coeff(self, key: Any) -> Scalar:
        return self._terms.get(key, 0)

    def as_dict(self) -> dict:
        return dict(self._terms)

    def __iter__(self) -> Iterator:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __contains__(self, key: Any) -> bool:
        return key in self._terms

    def __add__(self, other: Lin) -> Lin:
        if not isinstance(other, Lin):
            return NotImplemented
        acc = dict(self._terms)
        for k, c in other._terms.items():
            accumulate(acc, k, c)
        return Lin.from_dict(acc)

    def __sub__(self, other: Lin) -> Lin:
        if not isinstance(other, Lin):
            return NotImplemented
        acc = dict(self._terms)
        for k, c in other._terms.items():
            accumulate(acc, k, -c)
        return Lin.from_dict(acc)

    def __neg__(self) -> Lin:
        return Lin.from_dict({k: -c for k, c in self._terms.items()})

    def __mul__(self, s: Any) -> Lin:
        s = to_scalar(s)
        if not s:
            return Lin()
        return Lin.from_dict({k: c * s for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Lin):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def map(self, fn: Callable[[Any], Any]) -> Lin:
        """Extend ``fn`` (key -> Lin or dict) linearly."""
        acc: dict = {}
        for k, c in self._terms.items():
            image = fn(k)
            for k2, c2 in image.items():
                accumulate(acc, k2, c * c2)
        return Lin.from_dict(acc)

    def __repr__(self) -> str:
        if not self._terms:
            return "Lin(0)"
        return "Lin(" + " + ".join(f"{format_scalar(c)}*{k!r}" for k, c in self._terms.items()) + ")"


def bilinear(f: Lin, g: Lin, fn: Callable[[Any, Any], Any]) -> Lin:
    """Extend ``fn`` on basis pairs to a bilinear map."""
    acc: dict = {}
    for k1, c1 in f.items():
        for k2, c2 in g.items():
            for k, c in fn(k1, k2).items():
                accumulate(acc, k, c1 * c2 * c)
    return Lin.from_dict(acc)


def word(*letters: Any) -> Lin:
    """The basis element of a single word, e.g. ``word(1, 2)`` for x1x2."""
    return Lin.basis(tuple(letters))


def unit() -> Lin:
    return Lin.basis(EMPTY)


def concat(f: Lin, g: Lin) -> Lin:
    return bilinear(f, g, lambda u, v: {u + v: 1})


@lru_cache(maxsize=None)
def shuffle_words(u: Word, v: Word) -> dict:
    """All order-preserving interleavings of two words, with multiplicity."""
    if not u:
        return {v: 1}
    if not v:
        return {u: 1}
    out: dict = {}
    for w, c in shuffle_words(u[1:], v).items():
        accumulate(out, (u[0],) + w, c)
    for w, c in shuffle_words(u, v[1:]).items():
        accumulate(out, (v[0],) + w, c)
    return out


def shuffle(f: Lin, g: Lin) -> Lin:
    return bilinear(f, g, shuffle_words)


@lru_cache(maxsize=None)
def deshuffle_word(w: Word, parts: int) -> dict:
    """Assign each letter position to one of ``parts`` blocks; blocks keep order."""
    out: dict = {}
    for assignment in product(range(parts), repeat=len(w)):
        blocks: list[list] = [[] for _ in range(parts)]
        for letter, b in zip(w, assignment):
            blocks[b].append(letter)
        accumulate(out, tuple(tuple(b) for b in blocks), 1)
    return out


def deshuffle(f: Lin, parts: int = 2) -> Lin:
    """The iterated deshuffling coproduct with ``parts`` tensor factors."""
    if parts < 2:
        raise ValueError("deshuffle needs at least two tensor factors")
    return f.map(lambda w: deshuffle_word(w, parts))


def counit(f: Lin) -> Scalar:
    return f.coeff(EMPTY)


def tensor_apply(t: Lin, position: int, fn: Callable[[Any], Any]) -> Lin:
    """Apply a linear map (key -> Lin/dict) to one factor of a tensor.

    The factor at ``position`` is replaced by each image key.
    """
    acc: dict = {}
    for key, c in t.items():
        for k2, c2 in fn(key[position]).items():
            accumulate(acc, key[:position] + (k2,) + key[position + 1:], c * c2)
    return Lin.from_dict(acc)


def tensor_expand(t: Lin, position: int, fn: Callable[[Any], Any]) -> Lin:
    """Like :func:`tensor_apply` but ``fn`` returns tensors whose factors are spliced in."""
    acc: dict = {}
    for key, c in t.items():
        for k2, c2 in fn(key[position]).items():
            accumulate(acc, key[:position] + tuple(k2) + key[position + 1:], c * c2)
    return Lin.from_dict(acc)


def tensor_multiply(s: Lin, t: Lin, mul: Callable[[Any, Any], Any]) -> Lin:
    """Factorwise product of two tensors of equal rank, ``mul`` on basis keys."""
    acc: dict = {}
    for k1, c1 in s.items():
        for k2, c2 in t.items():
            images = [mul(a, b) for a, b in zip(k1, k2)]
            for combo in product(*(list(im.items()) for im in images)):
                coeff = c1 * c2
                for _, ci in combo:
                    coeff *= ci
                accumulate(acc, tuple(k for k, _ in combo), coeff)
    return Lin.from_dict(acc)


def swap(t: Lin) -> Lin:
    return Lin.from_dict({(k[1], k[0]): c for k, c in t.items()})


def format_word(w: Word, letter: Callable[[Any], str] | None = None) -> str:
    if not w:
        return "e"
    letter = letter or (lambda x: f"x{x}")
    return " ".join(letter(x) for x in w)
