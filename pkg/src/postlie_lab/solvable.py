"""The solvable Lie algebras g_a with their enveloping algebras and modules.

Elements of g_a are :class:`Lin` combinations keyed by the index ``i`` of
the basis vector eps_i.  Monomials of S(g_a) are sorted tuples of indices.
Matrices are tuples of rows of exact scalars and act on column vectors.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product
from math import prod

import sympy

from .tensor_core import Lin, Scalar, accumulate, sort_key, to_scalar

Matrix = tuple  # tuple of row tuples


def _monomial(factors: Sequence) -> tuple:
    return tuple(sorted(factors, key=sort_key))


# ---------------------------------------------------------------- g_a itself

def triangleleft(u: Lin, v: Lin, a: Sequence[Scalar]) -> Lin:
    """eps_i <| eps_j = a_j eps_i, extended bilinearly."""
    acc: dict = {}
    for i, c in u.items():
        for j, d in v.items():
            if a[j - 1]:
                accumulate(acc, i, c * d * a[j - 1])
    return Lin.from_dict(acc)


def bracket_a(u: Lin, v: Lin, a: Sequence[Scalar]) -> Lin:
    return triangleleft(u, v, a) - triangleleft(v, u, a)


# ----------------------------------------------------- enveloping products

def blacktriangleleft_general(m1: Sequence, m2: Sequence, prod_: Callable) -> Lin:
    """The enveloping product of two monomials for an associative product.

    Each factor y_i of ``m2`` is either kept or absorbed into a distinct
    factor of ``m1`` through ``prod_``; absorbed factors are injected, not
    repeated.  ``prod_(x, y)`` returns a Lin or dict over basis keys.
    """
    m1, m2 = tuple(m1), tuple(m2)
    k, l = len(m1), len(m2)
    acc: dict = {}
    for size in range(min(k, l) + 1):
        for chosen in combinations(range(l), size):
            kept_y = [m2[j] for j in range(l) if j not in chosen]
            for targets in permutations(range(k), size):
                kept_x = [m1[i] for i in range(k) if i not in targets]
                images = [list(prod_(m1[t], m2[j]).items()) for t, j in zip(targets, chosen)]
                for combo in product(*images):
                    c = prod(cc for _, cc in combo)
                    accumulate(acc, _monomial(kept_x + kept_y + [key for key, _ in combo]), c)
    return Lin.from_dict(acc)


def _falling(k: int, r: int) -> int:
    return prod(range(k - r + 1, k + 1))


def blacktriangleleft_ga(m1: Sequence[int], m2: Sequence[int], a: Sequence[Scalar]) -> Lin:
    """Closed formula for the enveloping product on S(g_a)."""
    k, l = len(m1), len(m2)
    acc: dict = {}
    for size in range(min(k, l) + 1):
        for chosen in combinations(range(l), size):
            c = _falling(k, size) * prod(a[m2[q] - 1] for q in chosen)
            if c:
                rest = [m2[p] for p in range(l) if p not in chosen]
                accumulate(acc, _monomial(list(m1) + rest), c)
    return Lin.from_dict(acc)


def lambda_coeff(positions: Sequence[int]) -> int:
    """lambda(I) = prod_t (i_t - t) for I = {i_1 < ... < i_k}."""
    return prod(i - t for t, i in enumerate(sorted(positions), 1))


def mu_coeff(positions: Sequence[int]) -> int:
    """mu(I) = (-1)^k prod_t (i_t + t - 2), the convolution inverse of lambda."""
    ps = sorted(positions)
    return (-1) ** len(ps) * prod(i + t - 2 for t, i in enumerate(ps, 1))


def inverse_change_coeff(positions: Sequence[int]) -> int:
    """Coefficient expressing a symmetric monomial in the PBW basis.

    Reading the monomial left to right, m eps_j = m <| eps_j - deg(m) a_j m,
    so a dropped factor at position i contributes -(i - 1).
    """
    return (-1) ** len(positions) * prod(i - 1 for i in positions)


def _subsets(n: int):
    for size in range(n + 1):
        yield from combinations(range(1, n + 1), size)


def pbw_to_monomial(seq: Sequence[int], a: Sequence[Scalar]) -> Lin:
    """eps_{i1} <| ... <| eps_{in} expanded in symmetric monomials."""
    n = len(seq)
    acc: dict = {}
    for subset in _subsets(n):
        c = lambda_coeff(subset) * prod(a[seq[p - 1] - 1] for p in subset)
        if c:
            accumulate(acc, tuple(sorted(seq[q - 1] for q in range(1, n + 1) if q not in subset)), c)
    return Lin.from_dict(acc)


def monomial_to_pbw(m: Sequence[int], a: Sequence[Scalar]) -> Lin:
    """A symmetric monomial expanded in ordered <|-products (PBW words)."""
    seq = tuple(sorted(m))
    n = len(seq)
    acc: dict = {}
    for subset in _subsets(n):
        c = inverse_change_coeff(subset) * prod(a[seq[p - 1] - 1] for p in subset)
        if c:
            accumulate(acc, tuple(seq[q - 1] for q in range(1, n + 1) if q not in subset), c)
    return Lin.from_dict(acc)


# ------------------------------------------------------------- matrices

def mat(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(to_scalar(x) for x in row) for row in rows)


def identity(d: int) -> Matrix:
    return tuple(tuple(int(r == c) for c in range(d)) for r in range(d))


def zeros(d: int) -> Matrix:
    return tuple((0,) * d for _ in range(d))


def matmul(x: Matrix, y: Matrix) -> Matrix:
    return tuple(tuple(sum(x[r][t] * y[t][c] for t in range(len(y))) for c in range(len(y[0])))
                 for r in range(len(x)))


def matadd(x: Matrix, y: Matrix, s: Scalar = 1) -> Matrix:
    """x + s*y"""
    return tuple(tuple(p + s * q for p, q in zip(rx, ry)) for rx, ry in zip(x, y))


def is_zero(x: Matrix) -> bool:
    return all(v == 0 for row in x for v in row)


def transpose(x: Matrix) -> Matrix:
    return tuple(zip(*x)) if x else x


# ------------------------------------------------------------- modules

@dataclass(frozen=True)
class ModuleSpec:
    """A linear map eps_i -> F_i from g_a to End(V), dim V = d."""

    a: tuple
    F: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(to_scalar(x) for x in self.a))
        object.__setattr__(self, "F", tuple(mat(m) for m in self.F))
        if len(self.F) != len(self.a):
            raise ValueError("need one matrix per coordinate of a")
        d = len(self.F[0]) if self.F else 0
        for m in self.F:
            if len(m) != d or any(len(row) != d for row in m):
                raise ValueError("all matrices must be square of the same size")

    @property
    def N(self) -> int:
        return len(self.a)

    @property
    def d(self) -> int:
        return len(self.F[0])


def is_assoc_module(spec: ModuleSpec):
    """Check F_i F_j = a_j F_i; returns (ok, witness or None)."""
    for i, j in product(range(1, spec.N + 1), repeat=2):
        res = matadd(matmul(spec.F[i - 1], spec.F[j - 1]), spec.F[i - 1], -spec.a[j - 1])
        if not is_zero(res):
            return False, ((i, j), res)
    return True, None


def is_lie_module(spec: ModuleSpec):
    """Check [F_j, F_k] = a_k F_j - a_j F_k, the image of [eps_j, eps_k]_a."""
    for j, k in combinations(range(1, spec.N + 1), 2):
        Fj, Fk = spec.F[j - 1], spec.F[k - 1]
        comm = matadd(matmul(Fj, Fk), matmul(Fk, Fj), -1)
        target = matadd(tuple(tuple(spec.a[k - 1] * v for v in row) for row in Fj), Fk, -spec.a[j - 1])
        res = matadd(comm, target, -1)
        if not is_zero(res):
            return False, ((j, k), res)
    return True, None


def F_multi(spec: ModuleSpec, indices: Sequence[int]) -> Matrix:
    """The image of the symmetric monomial eps_{i1}...eps_{ik} in End(V)."""
    seq = tuple(sorted(indices))
    out = zeros(spec.d)
    for seq_pbw, c in monomial_to_pbw(seq, spec.a).items():
        comp = identity(spec.d)
        for j in seq_pbw:
            comp = matmul(comp, spec.F[j - 1])
        out = matadd(out, comp, c)
    return out


def _to_sympy(m: Matrix) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in row]
                         for row in m])


def _from_sympy_vec(v) -> tuple:
    return tuple(to_scalar(Fraction(int(x.p), int(x.q))) for x in v)


def decompose_assoc_module(spec: ModuleSpec):
    """Split V into ker F_1 and im F_1 for an associative module with a = (1, 0, ..., 0)."""
    if tuple(spec.a) != (1,) + (0,) * (spec.N - 1):
        raise ValueError("decomposition needs a = (1, 0, ..., 0)")
    ok, witness = is_assoc_module(spec)
    if not ok:
        raise ValueError(f"not an associative module, witness {witness[0]}")
    F1 = _to_sympy(spec.F[0])
    v1 = [_from_sympy_vec(v) for v in F1.columnspace()]
    v0 = [_from_sympy_vec(v) for v in F1.nullspace()]
    return v0, v1


def _span_contains(basis: list, vectors: list) -> bool:
    if not vectors:
        return True
    if not basis:
        return all(all(x == 0 for x in v) for v in vectors)
    B = sympy.Matrix([list(b) for b in basis]).T
    return sympy.Matrix.hstack(B, sympy.Matrix([list(v) for v in vectors]).T).rank() == B.rank()


def _apply(m: Matrix, v: tuple) -> tuple:
    return tuple(sum(m[r][c] * v[c] for c in range(len(v))) for r in range(len(m)))


def validate_decomposition(spec: ModuleSpec, pieces: list[list[tuple]]) -> tuple[bool, str]:
    """Check a user-supplied graded splitting V = V_1 + ... + V_m of a Lie module.

    Pieces are listed by increasing degree: F_1 must preserve each piece and
    F_i (i >= 2) must send V_p into V_{p+1} (and the last piece to zero).
    """
    allv = [v for piece in pieces for v in piece]
    if len(allv) != spec.d or (allv and _to_sympy(tuple(allv)).rank() != spec.d):
        return False, "pieces do not form a basis of V"
    for p, piece in enumerate(pieces):
        if not _span_contains(piece, [_apply(spec.F[0], v) for v in piece]):
            return False, f"F_1 does not preserve piece {p + 1}"
        nxt = pieces[p + 1] if p + 1 < len(pieces) else []
        for i in range(2, spec.N + 1):
            if not _span_contains(nxt, [_apply(spec.F[i - 1], v) for v in piece]):
                return False, f"F_{i} does not shift piece {p + 1} up by one"
    return True, "ok"
