"""Coproducts on the graded dual of the family, for a = (1, 0, ..., 0).

Dual basis elements reuse the ``(word, slot)`` keys: the key ``(w, i)``
stands for the functional dual to ``w eps_i``.  The symmetric algebra on the
dual of the augmentation ideal is modelled with the degree-0 element
``(EMPTY, 1)`` identified with the scalar 1, so dual monomials never
contain it.

Two kinds of coproduct values appear:

* ``Lin`` keyed by ``(key, monomial)`` for the reduced coproducts, whose
  left factor is a single dual basis element;
* ``Lin`` keyed by ``(monomial, monomial)`` for full coproducts on dual
  monomials, where the empty monomial is the unit.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial, prod

from . import solvable
from .postlie_family import (
    FamilyConfig,
    Key,
    _star_on_monomial,
    circledast_env,
    graded_basis,
    key_degree,
    smono,
    sym_basis,
)
from .tensor_core import EMPTY, Lin, accumulate, deshuffle_word

UNIT_KEY: Key = (EMPTY, 1)


class UnsupportedConfig(ValueError):
    """The operation is only defined for a = (1, 0, ..., 0) or for the SISO data."""


def _require_standard(cfg: FamilyConfig) -> None:
    if not cfg.is_standard_a:
        raise UnsupportedConfig("dual coproducts need a = (1, 0, ..., 0)")
    if cfg.letter_degrees is None:
        raise UnsupportedConfig("dual coproducts need letter degrees")


def _cache(cfg: FamilyConfig, name: str) -> dict:
    return cfg.__dict__.setdefault("_dual_" + name, {})


def _drop_unit(factors) -> tuple:
    return smono(k for k in factors if k != UNIT_KEY)


def multiplicity_norm(m: tuple) -> int:
    """<m*, m> under the permanent pairing: product of factorials of multiplicities."""
    counts: dict = {}
    for k in m:
        counts[k] = counts.get(k, 0) + 1
    return prod(factorial(c) for c in counts.values())


# ------------------------------------------------------------ pairing

def pair_monomials(d: tuple, p: tuple) -> int:
    """Permanent pairing of two monomials of dual basis / basis keys."""
    if len(d) != len(p):
        return 0
    return multiplicity_norm(d) if smono(d) == smono(p) else 0


def pairing(d: Lin, p: Lin) -> Fraction | int:
    """Bilinear pairing of dual monomial combinations with monomial combinations.

    Keys that are bare ``(word, slot)`` pairs are treated as one-factor monomials.
    """
    def as_mono(k):
        return (k,) if _is_key(k) else k
    total = 0
    for k1, c1 in d.items():
        for k2, c2 in p.items():
            v = pair_monomials(as_mono(k1), as_mono(k2))
            if v:
                total += c1 * c2 * v
    return total


def _is_key(k) -> bool:
    return isinstance(k, tuple) and len(k) == 2 and isinstance(k[0], tuple) and isinstance(k[1], int)


# ------------------------------------------------------------ shuffle coproducts

def delta_shufd(g: Lin, js: Sequence[int]) -> Lin:
    """Deshuffle the word and attach slots (k, j_1, ..., j_l) to the factors."""
    js = tuple(js)
    def on_key(key):
        w, k = key
        slots = (k,) + js
        return {tuple(zip(blocks, slots)): c for blocks, c in deshuffle_word(w, len(slots)).items()}
    return g.map(on_key)


# ------------------------------------------------------------ G matrices

def G_matrix(cfg: FamilyConfig, js: Sequence[int]):
    """G_J = F_J - F_{J,1}, with F of the empty list the identity."""
    js = tuple(js)
    F_J = solvable.identity(cfg.dim) if not js else cfg.F_multi(js)
    return solvable.matadd(F_J, cfg.F_multi(js + (1,)), -1)


def dual_action(m, y: int) -> dict:
    """The transpose of m acting on the dual letter y: sum_s m[y][s] y_s."""
    return {s + 1: m[y - 1][s] for s in range(len(m)) if m[y - 1][s]}


# ------------------------------------------------------------ reduced star coproduct

def _theta_recursion(cfg: FamilyConfig, key: Key, coeff_matrix: Callable, keep_unit_tail: bool,
                     memo: dict) -> dict:
    hit = memo.get(key)
    if hit is not None:
        return hit
    w, k = key
    out: dict = {}
    if not w:
        out[(key, ())] = 1
    else:
        y, rest = w[0], w[1:]
        bound = key_degree(key, cfg)
        for l in range(bound + 1):
            for js in product(range(1, cfg.N + 1), repeat=l):
                m = coeff_matrix(js)
                if m is None:
                    continue
                heads = dual_action(m, y)
                if not heads:
                    continue
                slots = (k,) + js
                for blocks, mult in deshuffle_word(rest, l + 1).items():
                    tail = [(b, s) for b, s in zip(blocks[1:], slots[1:])]
                    if not keep_unit_tail and UNIT_KEY in tail:
                        continue
                    tail_mono = _drop_unit(tail)
                    first = (blocks[0], k)
                    for ((u, slot), S), c in _theta_recursion(cfg, first, coeff_matrix,
                                                              keep_unit_tail, memo).items():
                        right = smono(S + tail_mono)
                        for s, d in heads.items():
                            accumulate(out, (((s,) + u, slot), right), Fraction(c * d * mult, factorial(l)))
    memo[key] = out
    return out


def _nonzero_or_none(m):
    return None if solvable.is_zero(m) else m


def delta_star_recursive(g: Lin, cfg: FamilyConfig, g_transform: Callable | None = None,
                         allow_lie: bool = False) -> Lin:
    """Reduced coproduct dual to the right action, by the theta/G recursion.

    Each step strips the first dual letter y, deshuffles the rest into
    l + 1 blocks carrying slots (k, j_1, ..., j_l), recurses on the first
    block, prepends G_J^T(y) and multiplies the other blocks into the right
    factor, weighted by 1/l!.  Blocks equal to the unit key count as 1.

    The G-matrices telescope correctly only when F_J = 0 for |J| >= 2, which
    holds for associative modules; other modules raise unless ``allow_lie``
    is set, in which case the (generally wrong) truncated sum is returned.
    Use :func:`delta_star_multiindex` for arbitrary Lie modules.
    ``g_transform(js, G)`` may replace G-matrices (negative controls).
    """
    _require_standard(cfg)
    if not allow_lie and not solvable.is_assoc_module(cfg.spec)[0]:
        raise UnsupportedConfig("the G-matrix recursion needs an associative module; "
                                "use delta_star_multiindex")
    if g_transform is None:
        memo = _cache(cfg, "star_rec")
        coeff = _cache(cfg, "G")
        def coeff_matrix(js):
            if js not in coeff:
                coeff[js] = _nonzero_or_none(G_matrix(cfg, js))
            return coeff[js]
    else:
        memo = {}
        def coeff_matrix(js):
            return _nonzero_or_none(g_transform(js, G_matrix(cfg, js)))
    if allow_lie and g_transform is None:
        memo = {}
    return g.map(lambda key: _theta_recursion(cfg, key, coeff_matrix, True, memo))


def delta_star_multiindex(g: Lin, cfg: FamilyConfig) -> Lin:
    """The same coproduct with F_J coefficients, dropping factors equal to the unit key.

    This is the intermediate form before the telescoping into G-matrices; it
    needs no cut-off because every surviving extra factor has positive degree.
    """
    _require_standard(cfg)
    memo = _cache(cfg, "star_multi")
    coeff = _cache(cfg, "Fmulti")
    def coeff_matrix(js):
        if js not in coeff:
            m = solvable.identity(cfg.dim) if not js else cfg.F_multi(js)
            coeff[js] = _nonzero_or_none(m)
        return coeff[js]
    return g.map(lambda key: _theta_recursion(cfg, key, coeff_matrix, False, memo))


def _star_table(cfg: FamilyConfig, n: int) -> dict:
    """For every basis key of degree n: its reduced star coproduct, by transposition."""
    tables = _cache(cfg, "star_oracle")
    if n in tables:
        return tables[n]
    table: dict = {}
    for d in range(1, n + 1):
        for f in graded_basis(cfg, d):
            for m in sym_basis(cfg, n - d) if d < n else [()]:
                norm = multiplicity_norm(m)
                for gkey, c in _star_on_monomial(cfg, f, m, True).items():
                    accumulate(table.setdefault(gkey, {}), (f, m), Fraction(c, norm))
    tables[n] = table
    return table


def delta_star_oracle(g: Lin, cfg: FamilyConfig, max_deg: int) -> Lin:
    """Brute-force transpose of f * m over graded bases."""
    _require_standard(cfg)
    def on_key(key):
        n = key_degree(key, cfg)
        if n > max_deg:
            raise ValueError(f"degree {n} exceeds the bound {max_deg}")
        if key == UNIT_KEY:
            return {}
        return _star_table(cfg, n).get(key, {})
    return g.map(on_key)


# ------------------------------------------------------------ reduced bullet coproduct

def _bullet_basis(cfg: FamilyConfig, key: Key, star: Callable) -> dict:
    w, i = key
    out: dict = {}
    if i != 1:
        for k, c in star(key).items():
            accumulate(out, k, c)
    for (b1, b2), mult in deshuffle_word(w, 2).items():
        first, second = (b1, 1), (b2, i)
        for (left, S), c in star(first).items():
            if left == UNIT_KEY:
                continue
            accumulate(out, (left, _drop_unit(S + (second,))), c * mult)
    return out


def _reduced_star(cfg: FamilyConfig, g_transform: Callable | None):
    if g_transform is None and not solvable.is_assoc_module(cfg.spec)[0]:
        return lambda k: delta_star_multiindex(Lin.basis(k), cfg).as_dict()
    return lambda k: delta_star_recursive(Lin.basis(k), cfg, g_transform).as_dict()


def delta_star(g: Lin, cfg: FamilyConfig) -> Lin:
    """Reduced star coproduct, using the G-matrix recursion when it is exact and multi-indices otherwise."""
    _require_standard(cfg)
    return g.map(_reduced_star(cfg, None))


def delta_bullet_recursive(g: Lin, cfg: FamilyConfig, g_transform: Callable | None = None) -> Lin:
    """Reduced coproduct dual to the enveloping product, built from the star coproduct.

    Deshuffle the word; the first half goes to slot 1 and the second keeps
    the slot i of the input.  Apply the star coproduct to the first half and
    multiply the second half into the right factor (the unit key counts as 1,
    a left factor equal to the unit key is dropped).  For i >= 2 add the star
    coproduct of the input itself.
    """
    _require_standard(cfg)
    memo = {} if g_transform is not None else _cache(cfg, "bullet_rec")
    star = _reduced_star(cfg, g_transform)
    def on_key(key):
        if key not in memo:
            memo[key] = _bullet_basis(cfg, key, star)
        return memo[key]
    return g.map(on_key)


def _bullet_table(cfg: FamilyConfig, n: int) -> dict:
    tables = _cache(cfg, "bullet_oracle")
    if n in tables:
        return tables[n]
    table: dict = {}
    for d in range(1, n + 1):
        for f in graded_basis(cfg, d):
            for m in sym_basis(cfg, n - d) if d < n else [()]:
                norm = multiplicity_norm(m)
                for mono, c in circledast_env(Lin.basis((f,)), Lin.basis(m), cfg).items():
                    if len(mono) == 1:
                        accumulate(table.setdefault(mono[0], {}), (f, m), Fraction(c, norm))
    tables[n] = table
    return table


def delta_bullet_oracle(g: Lin, cfg: FamilyConfig, max_deg: int) -> Lin:
    """Brute-force transpose of the enveloping product f (*) m."""
    _require_standard(cfg)
    def on_key(key):
        n = key_degree(key, cfg)
        if n > max_deg:
            raise ValueError(f"degree {n} exceeds the bound {max_deg}")
        if key == UNIT_KEY:
            return {}
        return _bullet_table(cfg, n).get(key, {})
    return g.map(on_key)


# ------------------------------------------------------------ full coproducts on monomials

def _full_single(reduced: dict, key: Key, unit_term: bool) -> dict:
    out = {((left,), right): c for (left, right), c in reduced.items()}
    if unit_term:
        accumulate(out, ((), (key,)), 1)
    return out


def _multiply_full(factors: list[dict]) -> dict:
    cur = {((), ()): 1}
    for f in factors:
        nxt: dict = {}
        for (l1, r1), c1 in cur.items():
            for (l2, r2), c2 in f.items():
                accumulate(nxt, (smono(l1 + l2), smono(r1 + r2)), c1 * c2)
        cur = nxt
    return cur


def full_coproduct(d: Lin, reduced: Callable, unit_term: bool) -> Lin:
    """Multiplicative extension to dual monomials of ``reduced(key)`` (+ 1 (x) key)."""
    def on_mono(m):
        return _multiply_full([_full_single(reduced(k), k, unit_term) for k in m])
    return d.map(on_mono)


def delta_star_full(d: Lin, cfg: FamilyConfig, g_transform: Callable | None = None,
                    unit_term: bool = False) -> Lin:
    """Transpose of the action of S on itself: the reduced coproduct, multiplicatively extended.

    An element of degree one pairs to zero against 1 * q, so there is no
    1 (x) g term; ``unit_term=True`` adds it anyway (that normalisation breaks
    the coaction identity, which the tests record).
    """
    return full_coproduct(d, _reduced_star(cfg, g_transform), unit_term)


def delta_bullet_full(d: Lin, cfg: FamilyConfig, g_transform: Callable | None = None) -> Lin:
    """Transpose of the enveloping product: reduced bullet coproduct plus 1 (x) g, multiplicative."""
    def reduced(k):
        return delta_bullet_recursive(Lin.basis(k), cfg, g_transform).as_dict()
    return full_coproduct(d, reduced, True)


def dual_basis(cfg: FamilyConfig, max_deg: int) -> list[Key]:
    """Dual basis keys of degrees 1..max_deg (the unit key excluded)."""
    return [k for n in range(1, max_deg + 1) for k in graded_basis(cfg, n)]


@dataclass
class CoactionReport:
    ok: bool
    checked: int
    witness: object = None


def coaction_check(cfg: FamilyConfig, max_deg: int, g_transform: Callable | None = None,
                   unit_term: bool = False) -> CoactionReport:
    """Check (D* x Id) o D* = (Id x D.) o D* on every dual basis element up to max_deg."""
    _require_standard(cfg)
    checked = 0
    for key in dual_basis(cfg, max_deg):
        outer = delta_star_full(Lin.basis((key,)), cfg, g_transform, unit_term)
        lhs: dict = {}
        rhs: dict = {}
        for (L, R), c in outer.items():
            for (L1, L2), c2 in delta_star_full(Lin.basis(L), cfg, g_transform, unit_term).items():
                accumulate(lhs, (L1, L2, R), c * c2)
            for (R1, R2), c2 in delta_bullet_full(Lin.basis(R), cfg, g_transform).items():
                accumulate(rhs, (L, R1, R2), c * c2)
        checked += 1
        if lhs != rhs:
            diff = Lin.from_dict(lhs) - Lin.from_dict(rhs)
            return CoactionReport(False, checked, (key, diff))
    return CoactionReport(True, checked)


# ------------------------------------------------------------ the SISO recursion

def _is_siso(cfg: FamilyConfig) -> bool:
    return cfg == FamilyConfig.siso()


def siso_letter_recursion(g: Lin, which: str = "star") -> Lin:
    """The control-theoretic recursion for the SISO feedback Hopf algebra.

    ``which="star"`` gives the reduced star coproduct through the two
    letter rules; ``which="bullet"`` the reduced bullet coproduct built on it.
    """
    cfg = FamilyConfig.siso()
    if which not in ("star", "bullet"):
        raise ValueError("which must be 'star' or 'bullet'")
    memo = _cache(cfg, "letter_star")

    def star(key: Key) -> dict:
        if key in memo:
            return memo[key]
        w, i = key
        out: dict = {}
        if not w:
            out[(key, ())] = 1
        elif w[0] == 1:
            rest = (w[1:], i)
            for ((u, s), S), c in star(rest).items():
                accumulate(out, (((1,) + u, s), S), c)
            out = _add_theta(out, star, w[1:], i, 2, 2)
        else:
            out = _add_theta(out, star, w[1:], i, 1, 2)
        memo[key] = out
        return out

    if which == "star":
        return g.map(star)
    return g.map(lambda key: _bullet_basis(cfg, key, star))


def _add_theta(out: dict, star: Callable, rest: tuple, i: int, extra_slot: int, letter: int) -> dict:
    """out += (theta_letter x mu)(star x Id)(deshuffle(rest) eps_i x eps_extra_slot)."""
    for (b1, b2), mult in deshuffle_word(rest, 2).items():
        second = (b2, extra_slot)
        for ((u, s), S), c in star((b1, i)).items():
            accumulate(out, (((letter,) + u, s), _drop_unit(S + (second,))), c * mult)
    return out


def check_siso(cfg: FamilyConfig) -> None:
    if not _is_siso(cfg):
        raise UnsupportedConfig("the letter recursion is specific to the SISO data")
