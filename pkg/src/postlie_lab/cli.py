"""Command line front end: parsing expressions, running commands and check suites.

Expressions use the grammar::

    expr   := term (('+' | '-') term)*
    term   := [coeff '*'] factor+
    factor := '[' word ']' '@' INT
    word   := 'e' | ('x' INT)+
    coeff  := INT ['/' INT]

Whitespace is ignored.  A term with several factors is a monomial; its
factors are kept in input order (``phi`` needs that) and sorted whenever a
symmetric monomial is wanted.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

from . import dual_hopf, solvable
from .magmatic_envelope import MagmaticProduct, circledast as word_circledast, phi_star
from .postlie_family import (
    COEFFS,
    FamilyConfig,
    a_shuffle,
    a_shuffle_right,
    bracket_family,
    bullet,
    bullet_on_sym,
    circledast_env,
    hilbert_coeffs,
    odot_env,
    shuffle_left,
    shuffle_right,
    smono,
    star_basis,
    star_family,
    star_on_sym,
    sym_basis,
    equivalence_check,
)
from .tensor_core import Lin, deshuffle, format_scalar, tensor_multiply, to_scalar

PRESETS = {"siso": FamilyConfig.siso}


# ------------------------------------------------------------------ parsing

class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.message = message
        self.pos = pos


@dataclass(frozen=True)
class Term:
    coeff: object
    factors: tuple  # ordered (word, slot) keys


class _Parser:
    def __init__(self, text: str, cfg: FamilyConfig | None):
        self.text = text
        self.pos = 0
        self.cfg = cfg

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch: str):
        if self._peek() != ch:
            found = repr(self._peek()) if self._peek() else "end of input"
            raise ParseError(f"expected {ch!r}, found {found}", self.pos)
        self.pos += 1

    def _int(self) -> tuple[int, int]:
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise ParseError("expected an integer", start)
        return int(self.text[start:self.pos]), start

    def parse(self) -> list[Term]:
        sign = 1
        if self._peek() in ("+", "-"):
            # a leading sign lets printed output parse back
            sign = 1 if self._peek() == "+" else -1
            self.pos += 1
        terms = [self._term(sign)]
        while self._peek() in ("+", "-"):
            sign = 1 if self._peek() == "+" else -1
            self.pos += 1
            terms.append(self._term(sign))
        if self._peek():
            raise ParseError(f"unexpected {self._peek()!r}", self.pos)
        return terms

    def _term(self, sign: int) -> Term:
        coeff: object = sign
        if self._peek().isdigit():
            num, _ = self._int()
            value = Fraction(num)
            if self._peek() == "/":
                self.pos += 1
                den, at = self._int()
                if den == 0:
                    raise ParseError("zero denominator", at)
                value = Fraction(num, den)
            self._expect("*")
            coeff = to_scalar(value * sign)
        factors = [self._factor()]
        while self._peek() == "[":
            factors.append(self._factor())
        return Term(coeff, tuple(factors))

    def _factor(self):
        self._expect("[")
        letters: list[int] = []
        if self._peek() == "e":
            self.pos += 1
        else:
            if self._peek() != "x":
                raise ParseError("expected 'e' or a letter x<n>", self.pos)
            while self._peek() == "x":
                self.pos += 1
                n, at = self._int()
                if n < 1 or (self.cfg is not None and n > self.cfg.dim):
                    raise ParseError(f"letter x{n} out of range", at)
                letters.append(n)
        self._expect("]")
        self._expect("@")
        slot, at = self._int()
        if slot < 1 or (self.cfg is not None and slot > self.cfg.N):
            raise ParseError(f"slot {slot} out of range", at)
        return (tuple(letters), slot)


def parse(text: str, cfg: FamilyConfig | None = None) -> list[Term]:
    """Parse an expression; ``cfg`` enables range checks on letters and slots."""
    return _Parser(text, cfg).parse()


def as_element(terms: list[Term]) -> Lin:
    """An element of T(V)^N; every term must be a single factor."""
    for t in terms:
        if len(t.factors) != 1:
            raise ValueError("expected a sum of single basis elements, got a product")
    return Lin([(t.factors[0], t.coeff) for t in terms])


def as_monomials(terms: list[Term]) -> Lin:
    return Lin([(smono(t.factors), t.coeff) for t in terms])


def as_words(terms: list[Term]) -> Lin:
    return Lin([(t.factors, t.coeff) for t in terms])


def _is_single(terms: list[Term]) -> bool:
    return all(len(t.factors) == 1 for t in terms)


# ------------------------------------------------------------------ printing

def _key_text(key) -> str:
    w, slot = key
    inner = " ".join(f"x{x}" for x in w) if w else "e"
    return f"[{inner}]@{slot}"


def _key_latex(key) -> str:
    w, slot = key
    inner = "".join(f"x_{{{x}}}" for x in w) if w else r"\emptyset"
    return f"{inner}\\varepsilon_{{{slot}}}"


def _mono_text(m, key_fmt, sep: str, one: str) -> str:
    return sep.join(key_fmt(k) for k in m) if m else one


def _tensor_parts(key) -> tuple:
    # reduced coproducts are keyed (key, monomial), full ones (monomial, monomial)
    left, right = key
    if len(left) == 2 and isinstance(left[1], int):
        left = (left,)
    return left, right


def _shape_text(key, shape: str, key_fmt, latex: bool) -> str:
    sep = "" if latex else " "
    if shape == "key":
        return key_fmt(key)
    if shape == "mono":
        return _mono_text(key, key_fmt, sep, "1")
    tensor = r" \otimes " if latex else " (x) "
    return tensor.join(_mono_text(part, key_fmt, sep, "1") for part in _tensor_parts(key))


def render_text(x: Lin, shape: str, latex: bool = False) -> str:
    if not x:
        return "0"
    key_fmt = _key_latex if latex else _key_text
    out = []
    for k, c in x.items():
        body = _shape_text(k, shape, key_fmt, latex)
        c = Fraction(c)
        if c == 1:
            head = "+ "
        elif c == -1:
            head = "- "
        else:
            mag = format_scalar(abs(c))
            if latex and c.denominator != 1:
                mag = f"\\frac{{{abs(c.numerator)}}}{{{c.denominator}}}"
            head = ("+ " if c > 0 else "- ") + mag + ("" if latex else "*")
        out.append(head + body)
    text = " ".join(out)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def _factor_record(key, position=None) -> dict:
    rec = {"word": list(key[0]), "slot": key[1]}
    if position is not None:
        rec["position"] = position
    return rec


def records(x: Lin, shape: str) -> list[dict]:
    """(coefficient, word, slot[, tensor position]) records, one per term."""
    out = []
    for k, c in x.items():
        coeff = format_scalar(c)
        if shape == "key":
            out.append({"coefficient": coeff, **_factor_record(k)})
        elif shape == "mono":
            out.append({"coefficient": coeff, "factors": [_factor_record(f) for f in k]})
        else:
            left, right = _tensor_parts(k)
            factors = [_factor_record(f, 0) for f in left] + [_factor_record(f, 1) for f in right]
            out.append({"coefficient": coeff, "factors": factors})
    return out


# ------------------------------------------------------------------ config

def load_config(args) -> FamilyConfig:
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config is not valid JSON: {exc}") from exc
        try:
            return FamilyConfig.from_json(data)
        except ValueError as exc:
            raise UsageError(f"invalid config: {exc}") from exc
    return PRESETS[args.preset]()


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ algebra commands

_SYMBOLS = {
    "shuffle": (r"\shuffle", "shuffle"),
    "star": (r"\ast", "*"),
    "bullet": (r"\bullet", "."),
    "bracket": (None, None),
    "circledast": (r"\circledast", "(*)"),
}


def _parse_arg(text: str, cfg: FamilyConfig) -> list[Term]:
    try:
        return parse(text, cfg)
    except ParseError as exc:
        raise UsageError(f"{exc}\n  {text}\n  {' ' * exc.pos}^") from exc


def _binary(cmd: str, args, cfg: FamilyConfig) -> tuple[Lin, str]:
    f_terms, g_terms = _parse_arg(args.left, cfg), _parse_arg(args.right, cfg)
    try:
        if cmd == "circledast":
            return circledast_env(as_monomials(f_terms), as_monomials(g_terms), cfg), "mono"
        f = as_element(f_terms)
        if cmd == "shuffle":
            kind = args.kind
            if kind in ("left", "right") and args.index is None:
                raise UsageError(f"--kind {kind} needs --index")
            fn = {"a_left": lambda: a_shuffle(f, as_element(g_terms), cfg.a),
                  "a_right": lambda: a_shuffle_right(f, as_element(g_terms), cfg.a),
                  "left": lambda: shuffle_left(f, as_element(g_terms), args.index),
                  "right": lambda: shuffle_right(f, as_element(g_terms), args.index)}[kind]
            return fn(), "key"
        if cmd == "bracket":
            return bracket_family(f, as_element(g_terms), cfg.a), "key"
        if _is_single(g_terms):
            g = as_element(g_terms)
            return (star_family(f, g, cfg) if cmd == "star" else bullet(f, g, cfg)), "key"
        # a single element acting on symmetric monomials
        acc = Lin()
        for m, c in as_monomials(g_terms).items():
            part = star_on_sym(f, m, cfg) if cmd == "star" else bullet_on_sym(f, m, cfg)
            acc = acc + part * c
        return acc, "key"
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _phi(args, cfg: FamilyConfig) -> tuple[Lin, str]:
    words = as_words(_parse_arg(args.expr, cfg))
    m = MagmaticProduct(func=lambda x, y: star_basis(cfg, x, y))
    acc = Lin()
    for w, c in words.items():
        acc = acc + phi_star(w, m) * c
    return acc, "mono"


def _coproduct(cmd: str, args, cfg: FamilyConfig) -> tuple[Lin, str]:
    terms = _parse_arg(args.expr, cfg)
    try:
        if _is_single(terms) and not args.full:
            g = as_element(terms)
            out = dual_hopf.delta_star(g, cfg) if cmd == "coprod-star" else dual_hopf.delta_bullet_recursive(g, cfg)
            return out, "tensor"
        d = Lin([(dual_hopf._drop_unit(m), c) for m, c in as_monomials(terms).items()])
        out = dual_hopf.delta_star_full(d, cfg) if cmd == "coprod-star" else dual_hopf.delta_bullet_full(d, cfg)
        return out, "tensor"
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _latex_line(cmd: str, args, result: str) -> str:
    if cmd in ("phi", "coprod-star", "coprod-bullet"):
        fn = {"phi": r"\varphi_{\star}", "coprod-star": r"\Delta_{\ast}",
              "coprod-bullet": r"\Delta_{\bullet}"}[cmd]
        arg = render_text(as_words(parse(args.expr)), "mono", latex=True)
        return f"{fn}\\left({arg}\\right) = {result}"
    lhs = render_text(as_words(parse(args.left)), "mono", latex=True)
    rhs = render_text(as_words(parse(args.right)), "mono", latex=True)
    if cmd == "bracket":
        return f"\\{{{lhs}, {rhs}\\}} = {result}"
    sym = _SYMBOLS[cmd][0]
    if cmd == "shuffle":
        sym = {"a_left": r"\shuffle_{a}", "a_right": r"{}_{a}\shuffle",
               "left": rf"\shuffle_{{{args.index}}}", "right": rf"{{}}_{{{args.index}}}\shuffle"}[args.kind]
    return f"\\left({lhs}\\right) {sym} \\left({rhs}\\right) = {result}"


# ------------------------------------------------------------------ check suites

@dataclass
class CheckResult:
    name: str
    ok: bool | None  # None means skipped
    detail: str

    def as_json(self) -> dict:
        status = "skipped" if self.ok is None else ("pass" if self.ok else "fail")
        return {"check": self.name, "status": status, "detail": self.detail}


def _needs_grading(cfg: FamilyConfig) -> str | None:
    if not cfg.is_standard_a:
        return "needs a = (1, 0, ..., 0)"
    if cfg.letter_degrees is None:
        return "needs letterDegrees"
    return None


def suite_postlie(cfg, degree, trials, seed) -> list[CheckResult]:
    rep = equivalence_check(cfg, degree, trials=trials, seed=seed, random_bound=degree + 1)
    out = [CheckResult("module condition", rep.module_ok, _witness(rep.module_witness)),
           CheckResult("pre-Lie residual of bullet", rep.prelie_ok, _witness(rep.prelie_witness)),
           CheckResult("post-Lie axioms", rep.postlie_ok, _witness(rep.postlie_witness)),
           CheckResult("three conditions agree", rep.consistent, f"{rep.triples_checked} triples")]
    return out


def _witness(w) -> str:
    if w is None:
        return "no witness"
    if isinstance(w, tuple) and w and isinstance(w[0], tuple) and len(w[0]) == 2 and isinstance(w[0][0], int):
        return f"indices {w[0]}"
    return "witness: " + " ; ".join(render_text(x, "key") for x in w[:3])


def _random_magma(letters: list[int], rng: random.Random) -> MagmaticProduct:
    table = {}
    for x, y in product(letters, repeat=2):
        table[(x, y)] = {z: rng.choice(COEFFS) for z in letters if rng.random() < 0.7}
    return MagmaticProduct(table, alphabet=letters)


def _words_up_to(letters, n):
    return [w for k in range(n + 1) for w in product(letters, repeat=k)]


def suite_hopf(cfg, degree, trials, seed) -> list[CheckResult]:
    rng = random.Random(seed)
    letters = [1, 2]
    m = _random_magma(letters, rng)
    words = [Lin.basis(w) for w in _words_up_to(letters, degree)]
    lens = [len(next(iter(w.keys()))) for w in words]
    circ = lambda f, g: word_circledast(f, g, m)  # noqa: E731
    one = Lin.basis(())
    assoc = unit_ok = mult = True
    count = 0
    for i, f in enumerate(words):
        unit_ok &= circ(f, one) == f and circ(one, f) == f
        for j, g in enumerate(words):
            if lens[i] + lens[j] > degree:
                continue
            count += 1
            fg = circ(f, g)
            lhs = deshuffle(fg)
            rhs = tensor_multiply(deshuffle(f), deshuffle(g), lambda a, b: circ(Lin.basis(a), Lin.basis(b)))
            mult &= lhs == rhs
            for k, h in enumerate(words):
                if lens[i] + lens[j] + lens[k] <= degree:
                    assoc &= circ(fg, h) == circ(f, circ(g, h))
    out = [CheckResult("circledast associative", assoc, f"random 2-letter magma, degree <= {degree}"),
           CheckResult("circledast unit", unit_ok, f"{len(words)} words"),
           CheckResult("deshuffle multiplicative", mult, f"{count} pairs")]
    reason = _needs_grading(cfg)
    if reason:
        out.append(CheckResult("enveloping products agree", None, reason))
        return out
    pool = [m for n in range(1, degree + 1) for m in sym_basis(cfg, n)]
    bad = 0
    for _ in range(trials):
        p, q = Lin.basis(rng.choice(pool)), Lin.basis(rng.choice(pool))
        bad += circledast_env(p, q, cfg) != odot_env(p, q, cfg)
    out.append(CheckResult("enveloping products agree", bad == 0, f"{trials} random pairs, {bad} mismatches"))
    return out


def suite_pbw(cfg, degree, trials, seed) -> list[CheckResult]:
    out = []
    n = max(degree, 1)
    conv = all(
        sum(solvable.lambda_coeff(J) * solvable.mu_coeff(tuple(i for i in I if i not in J))
            for r in range(len(I) + 1) for J in combinations(I, r)) == (0 if I else 1)
        for k in range(n + 1) for I in combinations(range(1, n + 1), k))
    out.append(CheckResult("lambda/mu convolution", conv, f"all subsets of [{n}]"))
    round_ok = True
    for k in range(degree + 1):
        for m in product(range(1, cfg.N + 1), repeat=k):
            m = tuple(sorted(m))
            back = solvable.monomial_to_pbw(m, cfg.a).map(lambda s: solvable.pbw_to_monomial(s, cfg.a))
            round_ok &= back == Lin.basis(m)
    out.append(CheckResult("PBW round trip", round_ok, f"N = {cfg.N}, degree <= {degree}"))
    formula_ok = True
    for k in range(min(degree, 3) + 1):
        for l in range(min(degree, 3) + 1 - k):
            for m1 in product(range(1, cfg.N + 1), repeat=k):
                for m2 in product(range(1, cfg.N + 1), repeat=l):
                    prod_ = lambda i, j: {i: cfg.a[j - 1]} if cfg.a[j - 1] else {}  # noqa: E731
                    formula_ok &= (solvable.blacktriangleleft_ga(sorted(m1), m2, cfg.a)
                                   == solvable.blacktriangleleft_general(sorted(m1), m2, prod_))
    out.append(CheckResult("enveloping product formula", formula_ok, "monomials of degree <= 3"))
    if solvable.is_assoc_module(cfg.spec)[0]:
        zero = all(solvable.is_zero(cfg.F_multi(js))
                   for k in range(2, degree + 1) for js in product(range(1, cfg.N + 1), repeat=k))
        out.append(CheckResult("higher module maps vanish", zero, f"2 <= k <= {degree}"))
    else:
        out.append(CheckResult("higher module maps vanish", None, "module is not associative"))
    return out


def suite_duality(cfg, degree, trials, seed) -> list[CheckResult]:
    reason = _needs_grading(cfg)
    if reason:
        return [CheckResult("duality", None, reason)]
    keys = dual_hopf.dual_basis(cfg, degree)
    star_bad = bullet_bad = 0
    for k in keys:
        g = Lin.basis(k)
        star_bad += dual_hopf.delta_star(g, cfg) != dual_hopf.delta_star_oracle(g, cfg, degree)
        bullet_bad += dual_hopf.delta_bullet_recursive(g, cfg) != dual_hopf.delta_bullet_oracle(g, cfg, degree)
    co = dual_hopf.coaction_check(cfg, degree)
    return [CheckResult("star coproduct is the transpose", star_bad == 0, f"{len(keys)} elements, {star_bad} mismatches"),
            CheckResult("bullet coproduct is the transpose", bullet_bad == 0,
                        f"{len(keys)} elements, {bullet_bad} mismatches"),
            CheckResult("coaction identity", co.ok, f"{co.checked} elements checked"
                        + ("" if co.ok else f", first failure at {_key_text(co.witness[0])}"))]


def suite_letter_recursion(cfg, degree, trials, seed) -> list[CheckResult]:
    if cfg != FamilyConfig.siso():
        return [CheckResult("letter recursion", None, "only defined for the siso preset")]
    keys = dual_hopf.dual_basis(cfg, degree)
    star_bad = sum(dual_hopf.siso_letter_recursion(Lin.basis(k), "star") != dual_hopf.delta_star(Lin.basis(k), cfg)
                   for k in keys)
    bullet_bad = sum(dual_hopf.siso_letter_recursion(Lin.basis(k), "bullet")
                     != dual_hopf.delta_bullet_recursive(Lin.basis(k), cfg) for k in keys)
    return [CheckResult("letter recursion, star", star_bad == 0, f"{len(keys)} elements"),
            CheckResult("letter recursion, bullet", bullet_bad == 0, f"{len(keys)} elements")]


SUITES = {"postlie": suite_postlie, "hopf": suite_hopf, "pbw": suite_pbw,
          "duality": suite_duality, "gray": suite_letter_recursion}


def run_checks(cfg: FamilyConfig, suite: str, degree: int, trials: int, seed: int) -> list[CheckResult]:
    names = list(SUITES) if suite == "all" else [suite]
    results = []
    for name in names:
        for r in SUITES[name](cfg, degree, trials, seed):
            r.name = f"{name}: {r.name}"
            results.append(r)
    return results


# ------------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="postlie-lab", description="Exact computations in a family of post-Lie algebras.")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted(PRESETS), default="siso")
    src.add_argument("--config", metavar="FILE", help="JSON config with N, a, dimV, F, letterDegrees")
    p.add_argument("--latex", action="store_true", help="print LaTeX instead of JSON")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("star", "bullet", "bracket", "circledast"):
        s = sub.add_parser(name)
        s.add_argument("left")
        s.add_argument("right")
    s = sub.add_parser("shuffle")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--kind", choices=["a_left", "a_right", "left", "right"], default="a_left")
    s.add_argument("--index", type=int)
    sub.add_parser("phi").add_argument("expr")
    for name in ("coprod-star", "coprod-bullet"):
        s = sub.add_parser(name)
        s.add_argument("expr")
        s.add_argument("--full", action="store_true", help="full coproduct on dual monomials")
    s = sub.add_parser("dims")
    s.add_argument("--max-degree", type=int, required=True)
    s = sub.add_parser("check")
    s.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    s.add_argument("--degree", type=int, default=4)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    return p


def _emit(obj) -> None:
    print(json.dumps(obj, ensure_ascii=False))


def run(args) -> int:
    cfg = load_config(args)
    cmd = args.command
    if cmd == "dims":
        if args.max_degree < 0:
            raise UsageError("--max-degree must be non-negative")
        if _needs_grading(cfg):
            raise UsageError("dims " + _needs_grading(cfg))
        dims = hilbert_coeffs(cfg, args.max_degree)
        if args.latex:
            print(" + ".join(f"{d}X^{{{n}}}" if n else str(d) for n, d in enumerate(dims)) + r" + \cdots")
        else:
            _emit(dims)
        return 0
    if cmd == "check":
        if args.degree < 0 or args.trials < 0:
            raise UsageError("--degree and --trials must be non-negative")
        if args.suite != "all":
            skipped = SUITES[args.suite](cfg, 0, 0, args.seed) if args.suite in ("duality", "gray") else []
            if skipped and all(r.ok is None for r in skipped):
                raise UsageError(f"suite {args.suite} does not apply: {skipped[0].detail}")
        results = run_checks(cfg, args.suite, args.degree, args.trials, args.seed)
        failed = any(r.ok is False for r in results)
        if args.latex:
            for r in results:
                print(f"{r.as_json()['status']}: {r.name} ({r.detail})")
        else:
            _emit({"suite": args.suite, "degree": args.degree, "trials": args.trials, "seed": args.seed,
                   "ok": not failed, "results": [r.as_json() for r in results]})
        return 1 if failed else 0
    if cmd == "phi":
        result, shape = _phi(args, cfg)
    elif cmd.startswith("coprod"):
        result, shape = _coproduct(cmd, args, cfg)
    else:
        result, shape = _binary(cmd, args, cfg)
    if args.latex:
        print(_latex_line(cmd, args, render_text(result, shape, latex=True)))
    else:
        _emit({"result": render_text(result, shape), "terms": records(result, shape)})
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
