"""The twelve acceptance criteria, one test each.

Each criterion returns a short detail string.  Under pytest a summary line
per criterion is printed at the end of the run; ``python3 tests/test_acceptance.py``
prints the same lines directly.
"""

import random
import sys
import time
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from math import comb, factorial

import pytest

from oracles import brute_shuffle, count_words_of_degree, module_image
from postlie_lab import dual_hopf, solvable
from postlie_lab.magmatic_envelope import (
    MagmaticProduct,
    MagTree as T,
    circledast,
    free_magmatic_product,
    phi_star,
    star_extend,
)
from postlie_lab.postlie_family import (
    FamilyConfig,
    basis_triples,
    basis_up_to,
    circledast_env,
    graded_basis,
    hilbert_coeffs,
    hilbert_series_coeffs,
    odot_env,
    postlie_family_residuals,
    bullet_prelie_residual,
    smono,
    star_family,
    star_family_closed,
    sym_basis,
    equivalence_check,
)
from postlie_lab.tensor_core import Lin, deshuffle, shuffle_words, tensor_multiply, word

SISO = FamilyConfig.siso()


def W(*pairs):
    return Lin([(tuple(p[1:]), p[0]) for p in pairs])


def M(*pairs):
    return Lin([(smono(p[1:]), p[0]) for p in pairs])


def random_rational_a(rng, n):
    return tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 5)) for _ in range(n))


# ---------------------------------------------------------------- criteria

def golden_examples():
    free = free_magmatic_product()

    def st(u, v):
        return star_extend(word(*u), word(*v), free)

    def cd(u, v):
        return circledast(word(*u), word(*v), free)
    checks = [
        st((1, 2), (3,)) == W((1, T(1, 3), 2), (1, 1, T(2, 3))),
        st((1,), (2, 3)) == W((1, T(T(1, 2), 3)), (-1, T(1, T(2, 3)))),
        st((1, 2, 3), (4,)) == W((1, T(1, 4), 2, 3), (1, 1, T(2, 4), 3), (1, 1, 2, T(3, 4))),
        st((1, 2), (3, 4)) == W((1, T(T(1, 3), 4), 2), (-1, T(1, T(3, 4)), 2), (1, 1, T(T(2, 3), 4)),
                                (-1, 1, T(2, T(3, 4))), (1, T(1, 3), T(2, 4)), (1, T(1, 4), T(2, 3))),
        st((1,), (2, 3, 4)) == W((1, T(T(T(1, 2), 3), 4)), (-1, T(T(1, T(2, 3)), 4)),
                                 (-1, T(T(1, T(2, 4)), 3)), (1, T(1, T(T(2, 4), 3))),
                                 (-1, T(T(1, 2), T(3, 4))), (1, T(1, T(2, T(3, 4))))),
        cd((1,), (2,)) == W((1, 1, 2), (1, T(1, 2))),
        cd((1,), (2, 3)) == W((1, 1, 2, 3), (1, T(1, 2), 3), (1, T(1, 3), 2), (1, T(T(1, 2), 3)),
                              (-1, T(1, T(2, 3)))),
        cd((1, 2), (3,)) == W((1, 1, 2, 3), (1, T(1, 3), 2), (1, 1, T(2, 3))),
        phi_star((1,), free) == W((1, 1)),
        phi_star((1, 2), free) == W((1, 1, 2), (1, T(1, 2))),
        phi_star((1, 2, 3), free) == W((1, 1, 2, 3), (1, T(1, 2), 3), (1, T(1, 3), 2), (1, 1, T(2, 3)),
                                       (1, T(T(1, 2), 3))),
    ]

    def tri(m1, m2):
        return solvable.blacktriangleleft_general(m1, m2, lambda x, y: {T(x, y): 1})
    x1, x2, y1, y2 = 1, 2, 3, 4
    checks += [
        tri((x1,), (y1,)) == M((1, x1, y1), (1, T(x1, y1))),
        tri((x1, x2), (y1,)) == M((1, x1, x2, y1), (1, T(x1, y1), x2), (1, x1, T(x2, y1))),
        tri((x1,), (y1, y2)) == M((1, x1, y1, y2), (1, T(x1, y1), y2), (1, T(x1, y2), y1)),
        tri((x1, x2), (y1, y2)) == M((1, x1, x2, y1, y2), (1, T(x1, y1), x2, y2), (1, T(x1, y2), x2, y1),
                                     (1, x1, T(x2, y1), y2), (1, x1, T(x2, y2), y1),
                                     (1, T(x1, y1), T(x2, y2)), (1, T(x1, y2), T(x2, y1))),
    ]
    failed = [i for i, ok in enumerate(checks) if not ok]
    assert not failed, f"examples {failed} differ"
    return f"{len(checks)} examples"


def postlie_axioms_siso():
    rep = equivalence_check(SISO, 5, trials=500, seed=2024, random_bound=6)
    assert rep.postlie_ok, rep.postlie_witness
    assert rep.prelie_ok and rep.module_ok
    return f"{rep.triples_checked} triples (basis up to 5, 500 random up to 6)"


def non_module_detected():
    cfg = FamilyConfig((1, 0), [[[0, 0], [0, 0]], [[1, 0], [0, 1]]])
    ok, witness = solvable.is_lie_module(cfg.spec)
    assert not ok and witness[0] == (1, 2)
    rep = equivalence_check(cfg, 3)
    assert not rep.prelie_ok and not rep.postlie_ok and not rep.module_ok
    for k1, k2, k3 in basis_triples(cfg, 3):
        x, y, z = Lin.basis(k1), Lin.basis(k2), Lin.basis(k3)
        r1, _ = postlie_family_residuals(x, y, z, cfg)
        if r1 and bullet_prelie_residual(x, y, z, cfg):
            return f"module witness (1, 2); triple {k1}, {k2}, {k3}"
    raise AssertionError("no triple with both residuals nonzero")


def hopf_structure():
    rng = random.Random(4)
    letters = (1, 2)
    table = {(x, y): {z: rng.choice([-2, -1, 1, 2]) for z in letters if rng.random() < 0.7}
             for x, y in product(letters, repeat=2)}
    m = MagmaticProduct(table, alphabet=letters)
    words = [w for k in range(5) for w in product(letters, repeat=k)]
    cache = {}

    def C(u, v):
        if (u, v) not in cache:
            cache[(u, v)] = circledast(Lin.basis(u), Lin.basis(v), m)
        return cache[(u, v)]
    one = ()
    for u in words:
        assert C(u, one) == Lin.basis(u) and C(one, u) == Lin.basis(u)
    for u, v in product(words, repeat=2):
        lhs = deshuffle(C(u, v))
        rhs = tensor_multiply(deshuffle(Lin.basis(u)), deshuffle(Lin.basis(v)), C)
        assert lhs == rhs, (u, v)
    for u, v, w in product(words, repeat=3):
        assert C(u, v).map(lambda x: C(x, w)) == C(v, w).map(lambda y: C(u, y)), (u, v, w)
    return f"{len(words)} words, {len(words) ** 3} triples"


def pbw_change():
    for k in range(7):
        for I in combinations(range(1, 7), k):
            total = sum(solvable.lambda_coeff(J) * solvable.mu_coeff(tuple(i for i in I if i not in J))
                        for r in range(k + 1) for J in combinations(I, r))
            assert total == (0 if I else 1), I
    rng = random.Random(5)
    for _ in range(3):
        a = random_rational_a(rng, 3)
        for k in range(6):
            for mono in combinations_with_replacement((1, 2, 3), k):
                back = solvable.monomial_to_pbw(mono, a).map(lambda s: solvable.pbw_to_monomial(s, a))
                assert back == Lin.basis(mono), (a, mono)
    return "64 subsets; 3 random a, 56 monomials each"


def higher_maps_vanish():
    n = 0
    for k in range(2, 5):
        for js in product((1, 2), repeat=k):
            n += 1
            assert solvable.is_zero(SISO.F_multi(js)), js
            assert module_image(SISO.F, js, SISO.a) == [[0, 0], [0, 0]]
    return f"{n} index lists"


def enveloping_products():
    rng = random.Random(34)
    pool = [(n, mono) for n in range(1, 4) for mono in sym_basis(SISO, n)]
    count = 0
    while count < 50:
        (dp, p), (dq, q) = rng.choice(pool), rng.choice(pool)
        if dp + dq > 4:
            continue
        count += 1
        P, Q = Lin.basis(p), Lin.basis(q)
        assert circledast_env(P, Q, SISO) == odot_env(P, Q, SISO), (p, q)
    return "50 pairs"


def graded_dimensions():
    dims = hilbert_coeffs(SISO, 6)
    assert dims == [1, 2, 3, 5, 8, 13, 21]
    assert hilbert_series_coeffs(SISO, 6) == dims
    brute = [count_words_of_degree((2, 1), n) + (count_words_of_degree((2, 1), n - 1) if n else 0)
             for n in range(7)]
    assert brute == dims
    K = lambda w, s: (tuple(w), s)  # noqa: E731
    assert set(graded_basis(SISO, 2)) == {K([1], 1), K([2, 2], 1), K([2], 2)}
    assert set(graded_basis(SISO, 3)) == {K([1, 2], 1), K([2, 1], 1), K([2, 2, 2], 1), K([1], 2), K([2, 2], 2)}
    return "dims 1 2 3 5 8 13 21"


def duality():
    keys = dual_hopf.dual_basis(SISO, 4)
    for k in keys:
        g = Lin.basis(k)
        assert dual_hopf.delta_star_recursive(g, SISO) == dual_hopf.delta_star_oracle(g, SISO, 4), k
        assert dual_hopf.delta_bullet_recursive(g, SISO) == dual_hopf.delta_bullet_oracle(g, SISO, 4), k
    rep = dual_hopf.coaction_check(SISO, 4)
    assert rep.ok, rep.witness
    return f"{len(keys)} dual basis elements"


def letter_recursion():
    keys = dual_hopf.dual_basis(SISO, 4)
    for k in keys:
        g = Lin.basis(k)
        assert dual_hopf.siso_letter_recursion(g, "star") == dual_hopf.delta_star_recursive(g, SISO), k
        assert dual_hopf.siso_letter_recursion(g, "bullet") == dual_hopf.delta_bullet_recursive(g, SISO), k
    return f"{len(keys)} dual basis elements"


def closed_forms():
    pool = basis_up_to(SISO, 5)
    for x, y in product(pool, repeat=2):
        X, Y = Lin.basis(x), Lin.basis(y)
        assert star_family(X, Y, SISO) == star_family_closed(X, Y, SISO), (x, y)
    rng = random.Random(11)
    a = random_rational_a(rng, 3)
    prod_ = lambda i, j: {i: a[j - 1]} if a[j - 1] else {}  # noqa: E731
    for k in range(4):
        for m1 in combinations_with_replacement((1, 2, 3), k):
            for l in range(4):
                for m2 in product((1, 2, 3), repeat=l):
                    assert solvable.blacktriangleleft_ga(m1, m2, a) == \
                        solvable.blacktriangleleft_general(m1, m2, prod_), (m1, m2)
    return f"{len(pool) ** 2} star pairs; a = {tuple(str(x) for x in a)}"


def term_counts():
    for k in range(6):
        for l in range(6):
            u, v = tuple(range(k)), tuple(range(10, 10 + l))
            assert len(shuffle_words(u, v)) == comb(k + l, k) == len(brute_shuffle(u, v))
    tagged = lambda x, y: {("t", x, y): 1}  # noqa: E731
    counts = []
    for k in range(5):
        for l in range(5):
            xs, ys = tuple(range(k)), tuple(range(10, 10 + l))
            expected = sum(comb(l, i) * comb(k, i) * factorial(i) for i in range(min(k, l) + 1))
            got = len(solvable.blacktriangleleft_general(xs, ys, tagged))
            assert got == expected, (k, l)
            counts.append(got)
    # diagonal terms 1, 2, 7, 34, 209
    assert [counts[5 * k + k] for k in range(5)] == [1, 2, 7, 34, 209]
    return "shuffle k,l <= 5; product k,l <= 4"


CRITERIA = [
    (1, "worked examples reproduce exactly", golden_examples),
    (2, "post-Lie axioms for SISO", postlie_axioms_siso),
    (3, "non-module config is detected", non_module_detected),
    (4, "circledast Hopf structure, random 2-letter product", hopf_structure),
    (5, "PBW basis change", pbw_change),
    (6, "higher module maps vanish for SISO", higher_maps_vanish),
    (7, "two enveloping products agree", enveloping_products),
    (8, "graded dimensions and bases", graded_dimensions),
    (9, "dual coproducts and coaction", duality),
    (10, "letter recursion equals generic coproducts", letter_recursion),
    (11, "closed forms match", closed_forms),
    (12, "term counts", term_counts),
]


@pytest.mark.parametrize("number,title,check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check, record_property):
    record_property("criterion", number)
    record_property("title", title)
    detail = check()
    record_property("detail", f"[{detail}]")


def main() -> int:
    failures = 0
    for number, title, check in CRITERIA:
        start = time.perf_counter()
        try:
            detail = check()
            status = "PASS"
        except AssertionError as exc:
            detail, status = f"{exc}", "FAIL"
            failures += 1
        print(f"{status}  criterion {number:>2}: {title} ({time.perf_counter() - start:.2f} s) [{detail}]")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
