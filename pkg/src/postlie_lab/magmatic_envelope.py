"""Extending a magmatic product from letters to the whole tensor algebra.

The extension is built in two stages.  A single letter acting on a word is
computed by induction on the length of the word; a word of length n acting
on anything is then the sum over n-fold deshufflings of letterwise actions,
concatenated.  The resulting product ``*`` turns primitive elements into a
post-Lie algebra and yields the associative product ``f (*) g``.
"""

from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Mapping
from itertools import product
from typing import Any, NamedTuple

from sympy.utilities.iterables import multiset_partitions

from .tensor_core import (
    EMPTY,
    Lin,
    Word,
    accumulate,
    bilinear,
    concat,
    deshuffle,
    deshuffle_word,
    shuffle_words,
)


class MagTree(NamedTuple):
    """Internal node of a planar binary tree; leaves are bare letters."""

    left: Any
    right: Any


class LieBracket(NamedTuple):
    """Formal Lie bracket of two expressions, evaluated by the target bracket."""

    left: Any
    right: Any


class MagmaticProduct:
    """A bilinear product on letters, given as a table or a callback.

    Values are linear combinations of letters: a mapping ``letter -> coeff``
    or a :class:`Lin` over one-letter words.  The callback must be a pure
    function; results are memoised on the instance.
    """

    def __init__(self, table: Mapping | None = None, *, func: Callable | None = None,
                 alphabet: Iterable | None = None):
        if (table is None) == (func is None):
            raise ValueError("give exactly one of table or func")
        self._table = None
        if table is not None:
            self._table = {pair: self._normalise(v) for pair, v in table.items()}
            letters = {x for pair in self._table for x in pair}
            self.alphabet = frozenset(alphabet) if alphabet is not None else frozenset(letters)
        else:
            self.alphabet = frozenset(alphabet) if alphabet is not None else None
        self._func = func
        self._letter_cache: dict = {}
        self._word_cache: dict = {}
        self._pair_cache: dict = {}

    @staticmethod
    def _normalise(value: Any) -> dict:
        if isinstance(value, Lin):
            out = {}
            for w, c in value.items():
                if not (isinstance(w, tuple) and len(w) == 1):
                    raise ValueError("magmatic values must be combinations of letters")
                out[w[0]] = c
            return out
        return {k: c for k, c in dict(value).items() if c}

    def check_letter(self, x: Hashable) -> None:
        if self.alphabet is not None and x not in self.alphabet:
            raise ValueError(f"unknown letter {x!r}")

    def __call__(self, x: Hashable, y: Hashable) -> dict:
        """The product of two letters as a dict ``letter -> coeff``."""
        key = (x, y)
        hit = self._pair_cache.get(key)
        if hit is not None:
            return hit
        self.check_letter(x)
        self.check_letter(y)
        if self._table is not None:
            val = self._table.get(key, {})
        else:
            val = self._normalise(self._func(x, y))
        self._pair_cache[key] = val
        return val

    # -- stage one: a letter acting on a word
    def letter_action(self, x: Hashable, w: Word) -> dict:
        key = (x, w)
        hit = self._letter_cache.get(key)
        if hit is not None:
            return hit
        if not w:
            out = {x: 1}
        elif len(w) == 1:
            out = dict(self(x, w[0]))
        else:
            head, y = w[:-1], w[-1]
            out = {}
            for z, c in self.letter_action(x, head).items():
                for z2, c2 in self(z, y).items():
                    accumulate(out, z2, c * c2)
            for i, yi in enumerate(head):
                for z, c in self(yi, y).items():
                    for z2, c2 in self.letter_action(x, head[:i] + (z,) + head[i + 1:]).items():
                        accumulate(out, z2, -c * c2)
        self._letter_cache[key] = out
        return out

    # -- stage two: a word acting on a word
    def word_action(self, u: Word, w: Word) -> dict:
        key = (u, w)
        hit = self._word_cache.get(key)
        if hit is not None:
            return hit
        out: dict = {}
        if not u:
            if not w:
                out[EMPTY] = 1
        else:
            for x in u:
                self.check_letter(x)
            for blocks, mult in deshuffle_word(w, len(u)).items():
                factors = [list(self.letter_action(x, b).items()) for x, b in zip(u, blocks)]
                for combo in product(*factors):
                    c = mult
                    for _, ci in combo:
                        c *= ci
                    accumulate(out, tuple(z for z, _ in combo), c)
        self._word_cache[key] = out
        return out


def star_extend(f: Lin, g: Lin, m: MagmaticProduct) -> Lin:
    """The unique extension of the magmatic product to T(V)."""
    return bilinear(f, g, m.word_action)


def circledast(f: Lin, g: Lin, m: MagmaticProduct) -> Lin:
    """f (*) g = sum (f * g1) g2 over the deshuffle of g."""
    def on_words(u: Word, w: Word) -> dict:
        out: dict = {}
        for (w1, w2), mult in deshuffle_word(w, 2).items():
            for v, c in m.word_action(u, w1).items():
                accumulate(out, v + w2, mult * c)
        return out
    return bilinear(f, g, on_words)


def set_partitions(k: int) -> list[list[list[int]]]:
    """Set partitions of {0..k-1}, each block sorted, blocks ordered by minima."""
    if k == 0:
        return [[]]
    parts = (sorted((sorted(b) for b in p), key=lambda b: b[0])
             for p in multiset_partitions(list(range(k))))
    return list(parts)


def _nested(m: MagmaticProduct, letters: list) -> dict:
    acc = {letters[0]: 1}
    for y in letters[1:]:
        nxt: dict = {}
        for z, c in acc.items():
            for z2, c2 in m(z, y).items():
                accumulate(nxt, z2, c * c2)
        acc = nxt
    return acc


def phi_star(w: Word, m: MagmaticProduct) -> Lin:
    """Sum over set partitions of left-nested products, blocks in order of minima."""
    acc: dict = {}
    for partition in set_partitions(len(w)):
        factors = [list(_nested(m, [w[i] for i in block]).items()) for block in partition]
        for combo in product(*factors):
            c = 1
            for _, ci in combo:
                c *= ci
            accumulate(acc, tuple(z for z, _ in combo), c)
    return Lin.from_dict(acc)


def phi_star_inverse(f: Lin, m: MagmaticProduct) -> Lin:
    """Invert phi_star by back-substitution from the longest words down."""
    residual = f
    result: dict = {}
    while residual:
        top = max(len(w) for w in residual.keys())
        layer = [(w, c) for w, c in residual.items() if len(w) == top]
        correction: dict = {}
        for w, c in layer:
            accumulate(result, w, c)
            for v, d in phi_star(w, m).items():
                accumulate(correction, v, c * d)
        residual = residual - Lin.from_dict(correction)
    return Lin.from_dict(result)


def lie_bracket(f: Lin, g: Lin) -> Lin:
    return concat(f, g) - concat(g, f)


def is_primitive(f: Lin) -> bool:
    expected: dict = {}
    for w, c in f.items():
        accumulate(expected, (w, EMPTY), c)
        accumulate(expected, (EMPTY, w), c)
    return deshuffle(f) == Lin.from_dict(expected)


def bracket_star(f: Lin, g: Lin, m: MagmaticProduct) -> Lin:
    """{f, g} = fg - gf + f*g - g*f on primitive elements."""
    if not (is_primitive(f) and is_primitive(g)):
        raise ValueError("bracket_star needs primitive (Lie) inputs")
    return lie_bracket(f, g) + star_extend(f, g, m) - star_extend(g, f, m)


def shuffle_lin(f: Lin, g: Lin) -> Lin:
    return bilinear(f, g, shuffle_words)


def postlie_residuals(x, y, z, bracket: Callable, star: Callable):
    """Left minus right side of both post-Lie axioms."""
    assoc = prelie_residual(x, y, z, star)
    r1 = star(x, bracket(y, z)) - assoc
    r2 = star(bracket(x, y), z) - bracket(star(x, z), y) - bracket(x, star(y, z))
    return r1, r2


def prelie_residual(x, y, z, star: Callable):
    """(x*y)*z - x*(y*z) - (x*z)*y + x*(z*y)"""
    return star(star(x, y), z) - star(x, star(y, z)) - star(star(x, z), y) + star(x, star(z, y))


def eval_postlie_morphism(t: Any, phi: Callable, bracket: Callable, star: Callable):
    """Evaluate a tree/bracket expression in a target post-Lie algebra."""
    if isinstance(t, Lin):
        total = None
        for expr, c in t.items():
            v = eval_postlie_morphism(expr, phi, bracket, star) * c
            total = v if total is None else total + v
        return total if total is not None else Lin()
    if isinstance(t, MagTree):
        return star(eval_postlie_morphism(t.left, phi, bracket, star),
                    eval_postlie_morphism(t.right, phi, bracket, star))
    if isinstance(t, LieBracket):
        return bracket(eval_postlie_morphism(t.left, phi, bracket, star),
                       eval_postlie_morphism(t.right, phi, bracket, star))
    return phi(t)


def free_magmatic_product() -> MagmaticProduct:
    """The free magmatic product: two trees are grafted under a new root.

    Any hashable value is a leaf, and products of trees are again letters.
    """
    return MagmaticProduct(func=lambda s, t: {MagTree(s, t): 1})


def tree_degree(t: Any) -> int:
    if isinstance(t, MagTree):
        return tree_degree(t.left) + tree_degree(t.right)
    return 1
