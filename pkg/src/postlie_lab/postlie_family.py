"""Post-Lie and pre-Lie structures on T(V)^N built from a g_a-module.

A basis element of T(V)^N is a pair ``(word, slot)`` standing for
``word * eps_slot``.  A symmetric monomial in S(T(V)^N) is a sorted tuple of
such pairs; an ordered tuple is a product in the enveloping algebra.
"""

from __future__ import annotations

import json
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Any

import sympy

from . import solvable
from .magmatic_envelope import postlie_residuals, prelie_residual
from .tensor_core import (
    EMPTY,
    Lin,
    Scalar,
    accumulate,
    bilinear,
    deshuffle_word,
    shuffle_words,
    sort_key,
    to_scalar,
)

Key = tuple  # (word, slot)


def smono(factors: Iterable) -> tuple:
    return tuple(sorted(factors, key=sort_key))


def basis_key(letters: Sequence[int], slot: int) -> Key:
    return (tuple(letters), slot)


def elem(letters: Sequence[int], slot: int, c: Scalar = 1) -> Lin:
    """The element c * x_{l1}...x_{lk} eps_slot."""
    return Lin.basis(basis_key(letters, slot), c)


class FamilyConfig:
    """Data (a, F_1..F_N, optional letter degrees) defining one family member.

    Products on basis pairs are memoised on the instance, so reuse one
    config object for a batch of computations.
    """

    def __init__(self, a: Sequence, F: Sequence, letter_degrees: Sequence[int] | None = None):
        self.spec = solvable.ModuleSpec(tuple(a), tuple(F))
        self.a = self.spec.a
        self.F = self.spec.F
        self.N = self.spec.N
        self.dim = self.spec.d
        self.letter_degrees = tuple(int(x) for x in letter_degrees) if letter_degrees is not None else None
        if self.letter_degrees is not None:
            if len(self.letter_degrees) != self.dim or min(self.letter_degrees, default=1) < 1:
                raise ValueError("letter degrees must be positive, one per letter")
            if self.is_standard_a:
                self._check_homogeneous()
        # F_j(x_r) = sum_t F_j[t][r] x_t, letters are 1-based
        self.F_action = tuple(
            tuple({t + 1: m[t][r] for t in range(self.dim) if m[t][r]} for r in range(self.dim))
            for m in self.F)
        self._star_cache: dict = {}
        self._pbw_cache: dict = {}
        self._sym_cache: dict = {}
        self._multi_cache: dict = {}
        self._words_cache: dict = {}

    @property
    def is_standard_a(self) -> bool:
        return tuple(self.a) == (1,) + (0,) * (self.N - 1)

    def _check_homogeneous(self) -> None:
        for j, m in enumerate(self.F, 1):
            shift = 0 if j == 1 else 1
            for t in range(self.dim):
                for r in range(self.dim):
                    if m[t][r] and self.letter_degrees[t] != self.letter_degrees[r] + shift:
                        raise ValueError(f"F_{j} is not homogeneous of degree {shift}")

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, FamilyConfig) and self.a == other.a and self.F == other.F
                and self.letter_degrees == other.letter_degrees)

    def __hash__(self) -> int:
        return hash((self.a, self.F, self.letter_degrees))

    def __repr__(self) -> str:
        return f"FamilyConfig(a={self.a}, F={self.F}, letter_degrees={self.letter_degrees})"

    # -- construction helpers
    @classmethod
    def siso(cls) -> FamilyConfig:
        return cls((1, 0), [[[0, 0], [0, 1]], [[0, 1], [0, 0]]], letter_degrees=(2, 1))

    @classmethod
    def from_json(cls, data: dict | str) -> FamilyConfig:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            N = int(data["N"])
            dim = int(data["dimV"])
            a = [to_scalar(x) for x in data["a"]]
            F = [[[to_scalar(x) for x in row] for row in m] for m in data["F"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed config: {exc}") from exc
        if len(a) != N or len(F) != N:
            raise ValueError("a and F must have N entries")
        if any(len(m) != dim or any(len(r) != dim for r in m) for m in F):
            raise ValueError("each F_i must be dimV x dimV")
        return cls(a, F, data.get("letterDegrees"))

    def to_json(self) -> dict:
        def s(x):
            x = Fraction(x)
            return f"{x.numerator}/{x.denominator}"
        out = {"N": self.N, "a": [s(x) for x in self.a], "dimV": self.dim,
               "F": [[[s(x) for x in row] for row in m] for m in self.F]}
        if self.letter_degrees is not None:
            out["letterDegrees"] = list(self.letter_degrees)
        return out

    def F_multi(self, indices: Sequence[int]):
        key = tuple(sorted(indices))
        hit = self._multi_cache.get(key)
        if hit is None:
            hit = solvable.F_multi(self.spec, key)
            self._multi_cache[key] = hit
        return hit


# ------------------------------------------------------------ shuffles

def _shuffle_kind(kind: str, param, k, l):
    """Return (coefficient, output slot) for the shuffle-type products."""
    if kind == "left":
        return (1 if k == param else 0), l
    if kind == "right":
        return (1 if l == param else 0), k
    if kind == "a_left":
        return param[k - 1], l
    if kind == "a_right":
        return param[l - 1], k
    raise ValueError(f"unknown shuffle kind {kind!r}")


def shuffle_products(f: Lin, g: Lin, kind: str, param) -> Lin:
    """The slot-restricted shuffles: ``left``/``right`` take an index, ``a_left``/``a_right`` a vector."""
    def on_basis(x, y):
        (u, k), (v, l) = x, y
        c, slot = _shuffle_kind(kind, param, k, l)
        if not c:
            return {}
        return {(w, slot): c * m for w, m in shuffle_words(u, v).items()}
    return bilinear(f, g, on_basis)


def shuffle_left(f: Lin, g: Lin, i: int) -> Lin:
    return shuffle_products(f, g, "left", i)


def shuffle_right(f: Lin, g: Lin, j: int) -> Lin:
    return shuffle_products(f, g, "right", j)


def a_shuffle(f: Lin, g: Lin, a: Sequence) -> Lin:
    return shuffle_products(f, g, "a_left", a)


def a_shuffle_right(f: Lin, g: Lin, a: Sequence) -> Lin:
    return shuffle_products(f, g, "a_right", a)


def word_shuffle_action(f: Lin, g: Lin) -> Lin:
    """A word of T(V) shuffled into every slot of an element of T(V)^N."""
    def on_basis(u, y):
        v, l = y
        return {(w, l): m for w, m in shuffle_words(u, v).items()}
    return bilinear(f, g, on_basis)


def bracket_family(f: Lin, g: Lin, a: Sequence) -> Lin:
    return a_shuffle(f, g, a) - a_shuffle(g, f, a)


# ------------------------------------------------------------ star / bullet

def _star_words(cfg: FamilyConfig, w: tuple, v: tuple, j: int) -> dict:
    """Word part of (w eps_i) * (v eps_j); the output slot is always i."""
    key = (w, v, j)
    hit = cfg._star_cache.get(key)
    if hit is not None:
        return hit
    out: dict = {}
    if w:
        x, rest = w[0], w[1:]
        for u, c in _star_words(cfg, rest, v, j).items():
            out[(x,) + u] = c
        images = cfg.F_action[j - 1][x - 1]
        if images:
            for u, m in shuffle_words(rest, v).items():
                for t, c in images.items():
                    accumulate(out, (t,) + u, c * m)
    cfg._star_cache[key] = out
    return out


def star_basis(cfg: FamilyConfig, x: Key, y: Key) -> dict:
    (w, i), (v, j) = x, y
    return {(u, i): c for u, c in _star_words(cfg, w, v, j).items()}


def star_family(f: Lin, g: Lin, cfg: FamilyConfig) -> Lin:
    """The right action * defined by induction on the first letter."""
    return bilinear(f, g, lambda x, y: star_basis(cfg, x, y))


def star_family_closed(f: Lin, g: Lin, cfg: FamilyConfig) -> Lin:
    """The same product summed over interleavings.

    For each interleaving of x_1..x_k with y_1..y_l, let m be the number of
    leading positions held by x_1..x_m; F_j acts on each of those positions.
    """
    def on_basis(x, y):
        (w, i), (v, j) = x, y
        k, l = len(w), len(v)
        out: dict = {}
        for pos in combinations(range(k + l), k):
            pos_set = set(pos)
            inter, xi, yi = [], iter(w), iter(v)
            for p in range(k + l):
                inter.append(next(xi) if p in pos_set else next(yi))
            m = 0
            while m < k + l and m in pos_set:
                m += 1
            for p in range(m):
                for t, c in cfg.F_action[j - 1][inter[p] - 1].items():
                    accumulate(out, (tuple(inter[:p]) + (t,) + tuple(inter[p + 1:]), i), c)
        return out
    return bilinear(f, g, on_basis)


def bullet(f: Lin, g: Lin, cfg: FamilyConfig) -> Lin:
    return star_family(f, g, cfg) + a_shuffle(f, g, cfg.a)


def postlie_family_residuals(x: Lin, y: Lin, z: Lin, cfg: FamilyConfig):
    return postlie_residuals(x, y, z, lambda p, q: bracket_family(p, q, cfg.a),
                             lambda p, q: star_family(p, q, cfg))


def bullet_prelie_residual(x: Lin, y: Lin, z: Lin, cfg: FamilyConfig) -> Lin:
    return prelie_residual(x, y, z, lambda p, q: bullet(p, q, cfg))


# ------------------------------------------------------------ grading

def _require_grading(cfg: FamilyConfig) -> None:
    if cfg.letter_degrees is None or not cfg.is_standard_a:
        raise ValueError("grading needs letter degrees and a = (1, 0, ..., 0)")


def key_degree(key: Key, cfg: FamilyConfig) -> int:
    w, slot = key
    return sum(cfg.letter_degrees[x - 1] for x in w) + (0 if slot == 1 else 1)


def degree(x: Any, cfg: FamilyConfig) -> int:
    """Degree of a basis key or symmetric monomial, or of a homogeneous combination of them."""
    _require_grading(cfg)
    if isinstance(x, Lin):
        degs = {degree(k, cfg) for k in x.keys()}
        if len(degs) != 1:
            raise ValueError("element is zero or not homogeneous")
        return degs.pop()
    if isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], tuple) and isinstance(x[1], int):
        return key_degree(x, cfg)
    return sum(key_degree(k, cfg) for k in x)


def words_of_degree(cfg: FamilyConfig, n: int) -> list[tuple]:
    hit = cfg._words_cache.get(n)
    if hit is not None:
        return hit
    if n < 0:
        out = []
    elif n == 0:
        out = [EMPTY]
    else:
        out = []
        for x in range(1, cfg.dim + 1):
            out.extend((x,) + w for w in words_of_degree(cfg, n - cfg.letter_degrees[x - 1]))
    out.sort(key=sort_key)
    cfg._words_cache[n] = out
    return out


def graded_basis(cfg: FamilyConfig, n: int) -> list[Key]:
    """Basis of the degree-n piece of T(V)^N."""
    _require_grading(cfg)
    keys = [(w, 1) for w in words_of_degree(cfg, n)]
    for slot in range(2, cfg.N + 1):
        keys.extend((w, slot) for w in words_of_degree(cfg, n - 1))
    return sorted(keys, key=sort_key)


def length_basis(cfg: FamilyConfig, n: int) -> list[Key]:
    """Basis elements with words of length exactly n (for ungraded configs)."""
    words = list(product(range(1, cfg.dim + 1), repeat=n))
    return [(tuple(w), s) for w in words for s in range(1, cfg.N + 1)]


def hilbert_series_coeffs(cfg: FamilyConfig, max_deg: int) -> list[int]:
    """Coefficients of (1 + (N-1)X) / (1 - sum_x X^deg(x)) up to X^max_deg."""
    _require_grading(cfg)
    X = sympy.Symbol("X")
    P = sum(X ** d for d in cfg.letter_degrees)
    series = sympy.series((1 + (cfg.N - 1) * X) / (1 - P), X, 0, max_deg + 1).removeO()
    poly = sympy.Poly(series, X)
    return [int(poly.coeff_monomial(X ** n)) for n in range(max_deg + 1)]


def hilbert_coeffs(cfg: FamilyConfig, max_deg: int) -> list[int]:
    """Graded dimensions by enumeration, cross-checked against the series."""
    counted = [len(graded_basis(cfg, n)) for n in range(max_deg + 1)]
    expected = hilbert_series_coeffs(cfg, max_deg)
    if counted != expected:
        raise AssertionError(f"enumeration {counted} disagrees with series {expected}")
    return counted


def sym_basis(cfg: FamilyConfig, n: int) -> list[tuple]:
    """Monomials of S(augmentation ideal) of degree n, excluding the degree-0 generator."""
    pool = [(d, k) for d in range(1, n + 1) for k in graded_basis(cfg, d)]
    out: list[tuple] = []

    def rec(start: int, remaining: int, acc: list):
        if remaining == 0:
            out.append(smono(acc))
            return
        for idx in range(start, len(pool)):
            d, k = pool[idx]
            if d <= remaining:
                acc.append(k)
                rec(idx, remaining - d, acc)
                acc.pop()
    rec(0, n, [])
    return sorted(set(out), key=sort_key)


# ------------------------------------------------------------ enveloping algebra

def _apply_matrix_to_letter(m, x: int) -> dict:
    return {t + 1: m[t][x - 1] for t in range(len(m)) if m[t][x - 1]}


def _compose_letter(cfg: FamilyConfig, slots: Sequence[int], x: int) -> dict:
    """F_{s_l} o ... o F_{s_1} applied to the letter x."""
    cur = {x: 1}
    for s in slots:
        nxt: dict = {}
        for y, c in cur.items():
            for t, d in cfg.F_action[s - 1][y - 1].items():
                accumulate(nxt, t, c * d)
        cur = nxt
        if not cur:
            break
    return cur


def _shuffle_many(u: tuple, words: Sequence[tuple]) -> dict:
    cur = {u: 1}
    for v in words:
        nxt: dict = {}
        for w, c in cur.items():
            for w2, m in shuffle_words(w, v).items():
                accumulate(nxt, w2, c * m)
        cur = nxt
    return cur


def _star_on_monomial(cfg: FamilyConfig, f: Key, m: tuple, symmetric: bool) -> dict:
    cache = cfg._sym_cache if symmetric else cfg._pbw_cache
    key = (f, m)
    hit = cache.get(key)
    if hit is not None:
        return hit
    w, i = f
    out: dict = {}
    if not m:
        out[f] = 1
    elif w:
        x, rest = w[0], (w[1:], i)
        k = len(m)
        for size in range(k + 1):
            for chosen in combinations(range(k), size):
                slots = [m[p][1] for p in chosen]
                if symmetric:
                    head = _apply_matrix_to_letter(cfg.F_multi(slots), x) if size else {x: 1}
                else:
                    head = _compose_letter(cfg, slots, x)
                if not head:
                    continue
                remaining = tuple(m[p] for p in range(k) if p not in chosen)
                inner = _star_on_monomial(cfg, rest, remaining, symmetric)
                words = [m[p][0] for p in chosen]
                for (u, _), c in inner.items():
                    for u2, mult in _shuffle_many(u, words).items():
                        for t, d in head.items():
                            accumulate(out, ((t,) + u2, i), c * mult * d)
    cache[key] = out
    return out


def star_on_pbw(f: Lin, m: Sequence[Key], cfg: FamilyConfig) -> Lin:
    """f * (g_1 <| ... <| g_k) for f in T(V)^N and basis elements g_p."""
    m = tuple(m)
    return f.map(lambda k: _star_on_monomial(cfg, k, m, False))


def star_on_sym(f: Lin, m: Sequence[Key], cfg: FamilyConfig) -> Lin:
    """f * (g_1 ... g_k) for a symmetric monomial of basis elements."""
    m = smono(m)
    return f.map(lambda k: _star_on_monomial(cfg, k, m, True))


def bullet_on_sym_basis(cfg: FamilyConfig, f: Key, m: tuple) -> dict:
    out = dict(_star_on_monomial(cfg, f, m, True))
    for p in range(len(m)):
        rest = m[:p] + m[p + 1:]
        (v, l) = m[p]
        for (u, s), c in _star_on_monomial(cfg, f, rest, True).items():
            coef = cfg.a[s - 1]
            if coef:
                for w, mult in shuffle_words(u, v).items():
                    accumulate(out, (w, l), c * coef * mult)
    return out


def bullet_on_sym(f: Lin, m: Sequence[Key], cfg: FamilyConfig) -> Lin:
    m = smono(m)
    return f.map(lambda k: bullet_on_sym_basis(cfg, k, m))


def sym_mul(p: Lin, q: Lin) -> Lin:
    return bilinear(p, q, lambda m1, m2: {smono(m1 + m2): 1})


def sym_coproduct(p: Lin) -> Lin:
    """Subset-splitting coproduct; keys are pairs of monomials."""
    return p.map(lambda m: deshuffle_word(m, 2))


def blacktriangleleft_env(p: Lin, q: Lin, cfg: FamilyConfig) -> Lin:
    """The enveloping product on S(T(V)^N) coming from the a-weighted shuffle."""
    def prod_(x, y):
        (u, k), (v, l) = x, y
        c = cfg.a[k - 1]
        if not c:
            return {}
        return {(w, l): c * mult for w, mult in shuffle_words(u, v).items()}
    return bilinear(p, q, lambda m1, m2: solvable.blacktriangleleft_general(m1, m2, prod_))


def pbw_to_sym(m: Sequence[Key], cfg: FamilyConfig) -> Lin:
    """Expand g_1 <| ... <| g_k in symmetric monomials."""
    out = Lin.basis(())
    for g in m:
        out = blacktriangleleft_env(out, Lin.basis((g,)), cfg)
    return out


def _extend_left(cfg: FamilyConfig, P: tuple, Q: tuple, action) -> dict:
    """(p_1...p_r) acting on Q: each factor takes one block of a splitting of Q."""
    if not P:
        return {(): 1} if not Q else {}
    out: dict = {}
    for blocks, mult in deshuffle_word(Q, len(P)).items():
        images = [list(action(cfg, p, b).items()) for p, b in zip(P, blocks)]
        for combo in product(*images):
            c = mult
            for _, ci in combo:
                c *= ci
            accumulate(out, smono(k for k, _ in combo), c)
    return out


def star_env(p: Lin, q: Lin, cfg: FamilyConfig) -> Lin:
    return bilinear(p, q, lambda P, Q: _extend_left(
        cfg, P, Q, lambda c, f, b: _star_on_monomial(c, f, b, True)))


def bullet_env(p: Lin, q: Lin, cfg: FamilyConfig) -> Lin:
    return bilinear(p, q, lambda P, Q: _extend_left(cfg, P, Q, bullet_on_sym_basis))


def circledast_env(p: Lin, q: Lin, cfg: FamilyConfig) -> Lin:
    """p (*) q = sum (p * q1) <| q2."""
    acc = Lin()
    for Q, c in q.items():
        for (Q1, Q2), mult in deshuffle_word(Q, 2).items():
            left = star_env(p, Lin.basis(Q1), cfg)
            acc = acc + blacktriangleleft_env(left, Lin.basis(Q2), cfg) * (c * mult)
    return acc


def odot_env(p: Lin, q: Lin, cfg: FamilyConfig) -> Lin:
    """p (.) q = sum (p . q1) q2 with the symmetric product."""
    acc: dict = {}
    for Q, c in q.items():
        for (Q1, Q2), mult in deshuffle_word(Q, 2).items():
            for P, d in p.items():
                for M, e in _extend_left(cfg, P, Q1, bullet_on_sym_basis).items():
                    accumulate(acc, smono(M + Q2), c * d * e * mult)
    return Lin.from_dict(acc)


# ------------------------------------------------------------ random elements

COEFFS = (-2, -1, 1, 2)


def basis_up_to(cfg: FamilyConfig, max_deg: int) -> list[Key]:
    if cfg.letter_degrees is not None and cfg.is_standard_a:
        return [k for n in range(max_deg + 1) for k in graded_basis(cfg, n)]
    return [k for n in range(max_deg + 1) for k in length_basis(cfg, n)]


def size(key: Key, cfg: FamilyConfig) -> int:
    """Degree when a grading exists, otherwise word length."""
    if cfg.letter_degrees is not None and cfg.is_standard_a:
        return key_degree(key, cfg)
    return len(key[0])


def random_element(cfg: FamilyConfig, max_deg: int, rng: random.Random, terms: int = 2) -> Lin:
    """Sum of ``terms`` basis elements drawn uniformly up to ``max_deg``, coefficients in {-2,-1,1,2}."""
    pool = basis_up_to(cfg, max_deg)
    return Lin([(rng.choice(pool), rng.choice(COEFFS)) for _ in range(terms)])


def random_homogeneous(cfg: FamilyConfig, deg: int, rng: random.Random, terms: int = 2) -> Lin:
    pool = graded_basis(cfg, deg) if cfg.letter_degrees is not None else length_basis(cfg, deg)
    return Lin([(rng.choice(pool), rng.choice(COEFFS)) for _ in range(terms)])


# ------------------------------------------------------------ the equivalence checker

@dataclass
class EquivalenceReport:
    prelie_ok: bool
    postlie_ok: bool
    module_ok: bool
    prelie_witness: Any = None
    postlie_witness: Any = None
    module_witness: Any = None
    triples_checked: int = 0
    details: dict = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.prelie_ok == self.postlie_ok == self.module_ok

    @property
    def ok(self) -> bool:
        return self.prelie_ok and self.postlie_ok and self.module_ok


def basis_triples(cfg: FamilyConfig, bound: int):
    """Basis triples whose total size is at most ``bound``."""
    pool = basis_up_to(cfg, bound)
    sized = [(size(k, cfg), k) for k in pool]
    for s1, k1 in sized:
        for s2, k2 in sized:
            if s1 + s2 > bound:
                continue
            for s3, k3 in sized:
                if s1 + s2 + s3 <= bound:
                    yield k1, k2, k3


def equivalence_check(cfg: FamilyConfig, degree_bound: int, trials: int = 0, seed: int = 0,
                    random_bound: int | None = None) -> EquivalenceReport:
    """Evaluate the three equivalent conditions and record witnesses.

    Exhaustive over basis triples of total size <= ``degree_bound``, then
    ``trials`` seeded random triples whose total size is <= ``random_bound``.
    """
    module_ok, module_witness = solvable.is_lie_module(cfg.spec)
    pre_w = post_w = None
    count = 0

    def visit(x: Lin, y: Lin, z: Lin):
        nonlocal pre_w, post_w, count
        count += 1
        if pre_w is None:
            r = bullet_prelie_residual(x, y, z, cfg)
            if r:
                pre_w = (x, y, z, r)
        if post_w is None:
            r1, r2 = postlie_family_residuals(x, y, z, cfg)
            if r1 or r2:
                post_w = (x, y, z, r1, r2)

    for k1, k2, k3 in basis_triples(cfg, degree_bound):
        visit(Lin.basis(k1), Lin.basis(k2), Lin.basis(k3))
    rng = random.Random(seed)
    rb = degree_bound if random_bound is None else random_bound
    for _ in range(trials):
        c1, c2 = sorted(rng.sample(range(rb + 2), 2))
        split = (c1, c2 - c1 - 1, rb + 1 - c2)
        x, y, z = (random_element(cfg, s, rng) for s in split)
        visit(x, y, z)
    return EquivalenceReport(prelie_ok=pre_w is None, postlie_ok=post_w is None, module_ok=module_ok,
                           prelie_witness=pre_w, postlie_witness=post_w,
                           module_witness=module_witness, triples_checked=count)
