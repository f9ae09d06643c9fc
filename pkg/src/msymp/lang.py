"""The msymp script language: lexer, parser and static validation.

Grammar (whitespace-insensitive, '#' starts a line comment):

    script    := bundledecl stmt*
    bundledecl:= "bundle" "(" INT "," INT ")"
    stmt      := decl | cmd
    decl      := ("vf" | "hform" | "form") NAME "=" body
    vf body   := "{" ( ("dx"k | "dq"k) ":" poly )* "}"
    hform body:= "{" ( "mu"k ":" poly )* "}"
    form body := "{" ( blade ":" poly )* "}"
    blade     := covector ("^" covector)*        covector: dx k | dq k | dp[i,mu] | dp
    cmd       := cmdname "(" args ")"
    poly      := usual precedence over + - * ^, integers, fractions a/b,
                 variables x<k>, q<k>, p[<i>,<mu>], en

Entries inside a body may optionally be separated by commas.  Every parse or
validation failure produces a Diagnostic with a 1-based (line, column range)
span.  Parsing also performs all static validation (index ranges,
projectability of vf declarations, the affine structure of hform
declarations), so a parsed Script is ready to execute.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .bracket import HamiltonianNm1Form, build_hamiltonian_form
from .exterior import Form
from .phase import (
    Bundle,
    HorizontalNm1Form,
    ProjectableVF,
    make_bundle,
)
from .poly import Coordinate, CoordKind, ENERGY, Poly

COMMANDS = {
    "theta": 0,
    "omega": 0,
    "lift": 1,
    "momentum": 1,
    "hamvf": 1,
    "bracket": 2,
    "bracket-naive": 2,
    "bracket-coords": 2,
    "jacobi": 3,
    "defect": 3,
    "graded-bracket": 2,
    "poisson-check": 1,
    "verify-multisymplectic": 1,
    "eval": 2,
}

_KEYWORDS = {"bundle", "vf", "hform", "form", "rest", "en"}
_RESERVED_PATTERN = re.compile(r"^(x|q|p|v|dx|dq|dp|dv|mu|e)\d*$")
_COMMAND_WORDS = {w for name in COMMANDS for w in name.split("-")}


@dataclass(frozen=True)
class Span:
    line: int
    col_start: int
    col_end: int

    def merge(self, other: "Span") -> "Span":
        if other.line != self.line:
            return self
        return Span(self.line, min(self.col_start, other.col_start),
                    max(self.col_end, other.col_end))


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    span: Span
    message: str

    def render(self) -> str:
        s = self.span
        return f"{self.severity}: {s.line}:{s.col_start}-{s.col_end}: {self.message}"


class ScriptError(Exception):
    """Internal parser control flow; carries one Diagnostic."""

    def __init__(self, diag: Diagnostic):
        super().__init__(diag.message)
        self.diag = diag


# -- lexer ----------------------------------------------------------------------

_PUNCT = {
    "(": "LPAREN", ")": "RPAREN", "{": "LBRACE", "}": "RBRACE",
    "[": "LBRACKET", "]": "RBRACKET", ",": "COMMA", ":": "COLON",
    "=": "EQUALS", "^": "CARET", "*": "STAR", "+": "PLUS",
    "-": "MINUS", "/": "SLASH",
}


@dataclass(frozen=True)
class Token:
    kind: str  # WORD, INT, punctuation kind, EOF
    text: str
    span: Span


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        i = 0
        while i < len(line):
            ch = line[i]
            if ch == "#":
                break
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(line) and line[j].isdigit():
                    j += 1
                tokens.append(Token("INT", line[i:j], Span(line_no, i + 1, j)))
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < len(line) and (line[j].isalnum() or line[j] == "_"):
                    j += 1
                tokens.append(Token("WORD", line[i:j], Span(line_no, i + 1, j)))
                i = j
                continue
            kind = _PUNCT.get(ch)
            if kind is None:
                raise ScriptError(Diagnostic(
                    "error", Span(line_no, i + 1, i + 1),
                    f"unexpected character {ch!r}"))
            tokens.append(Token(kind, ch, Span(line_no, i + 1, i + 1)))
            i += 1
    last_line = text.count("\n") + 1
    tokens.append(Token("EOF", "", Span(last_line, 1, 1)))
    return tokens


# -- AST ------------------------------------------------------------------------


@dataclass
class Command:
    name: str
    args: list  # str idents and/or dict point maps
    rendered: str
    span: Span


@dataclass
class Script:
    """A validated program: the bundle, declared objects and command list."""

    bundle: Bundle
    env: dict[str, object]
    kinds: dict[str, str]  # name -> "vf" | "hform" | "form"
    commands: list[Command]


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.diags: list[Diagnostic] = []
        self.bundle: Bundle | None = None

    # token helpers -------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, kind: str, what: str) -> Token:
        t = self.next()
        if t.kind != kind:
            raise ScriptError(Diagnostic(
                "error", t.span, f"expected {what}, found {t.text!r}" if t.text
                else f"expected {what}, found end of input"))
        return t

    def error(self, span: Span, msg: str) -> ScriptError:
        return ScriptError(Diagnostic("error", span, msg))

    def report(self, span: Span, msg: str) -> None:
        self.diags.append(Diagnostic("error", span, msg))

    # entry point ----------------------------------------------------------

    def parse(self) -> Script | None:
        try:
            script = self._parse_script()
        except ScriptError as e:
            self.diags.append(e.diag)
            return None
        if any(d.severity == "error" for d in self.diags):
            return None
        return script

    def _parse_script(self) -> Script:
        t = self.expect("WORD", "'bundle' declaration")
        if t.text != "bundle":
            raise self.error(t.span, "a script must start with a bundle declaration")
        self.expect("LPAREN", "'('")
        n_tok = self.expect("INT", "base dimension")
        self.expect("COMMA", "','")
        nn_tok = self.expect("INT", "fibre dimension")
        self.expect("RPAREN", "')'")
        n, N = int(n_tok.text), int(nn_tok.text)
        if n < 1:
            raise self.error(n_tok.span, "base dimension must be >= 1")
        if N < 1:
            raise self.error(nn_tok.span, "fibre dimension must be >= 1")
        self.bundle = make_bundle(n, N)
        env: dict[str, object] = {}
        kinds: dict[str, str] = {}
        commands: list[Command] = []
        while self.peek().kind != "EOF":
            t = self.peek()
            if t.kind != "WORD":
                raise self.error(t.span, f"expected a statement, found {t.text!r}")
            if t.text == "bundle":
                raise self.error(t.span, "only one bundle declaration is allowed")
            if t.text in ("vf", "hform", "form"):
                self._parse_decl(env, kinds)
            else:
                cmd = self._parse_command(env, kinds)
                if cmd is not None:
                    commands.append(cmd)
        return Script(self.bundle, env, kinds, commands)

    # declarations ---------------------------------------------------------

    def _parse_decl(self, env: dict, kinds: dict) -> None:
        kw = self.next()
        name_tok = self.expect("WORD", "an identifier")
        name = name_tok.text
        if name in _KEYWORDS or name in _COMMAND_WORDS or name in COMMANDS \
                or _RESERVED_PATTERN.match(name):
            raise self.error(name_tok.span, f"{name!r} is a reserved identifier")
        if name in env:
            raise self.error(name_tok.span, f"{name!r} is already declared")
        self.expect("EQUALS", "'='")
        if kw.text == "vf":
            obj = self._parse_vf_body(name_tok)
        elif kw.text == "hform":
            obj = self._parse_hform_body(name_tok)
        else:
            obj = self._parse_form_body(name_tok)
        if obj is not None:
            env[name] = obj
            kinds[name] = kw.text

    def _body_entries(self):
        """Yield (key tokens up to ':', then let caller parse the value)."""
        self.expect("LBRACE", "'{'")
        while True:
            t = self.peek()
            if t.kind == "RBRACE":
                self.next()
                return
            if t.kind == "COMMA":
                self.next()
                continue
            yield t

    def _parse_vf_body(self, name_tok: Token) -> ProjectableVF | None:
        b = self.bundle
        base: dict[int, Poly] = {}
        fib: dict[int, Poly] = {}
        spans: dict[tuple[str, int], Span] = {}
        uses: dict[tuple[str, int], list] = {}
        for t in self._body_entries():
            key = self.expect("WORD", "a component key like dx1 or dq1")
            m = re.fullmatch(r"(dx|dq)(\d+)", key.text)
            if not m:
                raise self.error(key.span, "vf components must be keyed dx<k> or dq<k>")
            kind, idx = m.group(1), int(m.group(2))
            self.expect("COLON", "':'")
            poly, used = self._parse_poly()
            if kind == "dx":
                if not 1 <= idx <= b.n:
                    self.report(key.span, f"base index {idx} out of range 1..{b.n}")
                    continue
                if idx in base:
                    self.report(key.span, f"duplicate component {key.text}")
                base[idx] = poly
            else:
                if not 1 <= idx <= b.N:
                    self.report(key.span, f"fibre index {idx} out of range 1..{b.N}")
                    continue
                if idx in fib:
                    self.report(key.span, f"duplicate component {key.text}")
                fib[idx] = poly
            spans[(kind, idx)] = key.span
            uses[(kind, idx)] = used
        ok = True
        for (kind, idx), used in uses.items():
            if kind == "dx":
                allowed, what = {CoordKind.BASE}, "base"
            else:
                allowed, what = {CoordKind.BASE, CoordKind.FIBER}, "base and fibre"
            for coord, span in used:
                if coord.kind not in allowed:
                    self.report(span, f"component {kind}{idx} may depend on {what} "
                                f"coordinates only, but uses {coord.name}")
                    ok = False
        if not ok:
            return None
        return ProjectableVF(b, base, fib)

    def _parse_hform_body(self, name_tok: Token) -> HamiltonianNm1Form | None:
        b = self.bundle
        comps: dict[int, Poly] = {}
        spans: dict[int, Span] = {}
        for t in self._body_entries():
            key = self.expect("WORD", "a component key like mu1")
            m = re.fullmatch(r"mu(\d+)", key.text)
            if not m:
                raise self.error(key.span, "hform components must be keyed mu<k>")
            mu = int(m.group(1))
            self.expect("COLON", "':'")
            poly, _ = self._parse_poly()
            if not 1 <= mu <= b.n:
                self.report(key.span, f"base index {mu} out of range 1..{b.n}")
                continue
            if mu in comps:
                self.report(key.span, f"duplicate component mu{mu}")
            comps[mu] = poly
            spans[mu] = key.span
        try:
            return hform_from_components(b, comps)
        except HformStructureError as e:
            self.report(spans.get(e.mu, name_tok.span), str(e))
            return None

    def _parse_form_body(self, name_tok: Token) -> Form | None:
        b = self.bundle
        terms: dict[tuple[int, ...], Poly] = {}
        degree: int | None = None
        for t in self._body_entries():
            blade_coords, blade_span = self._parse_blade()
            self.expect("COLON", "':'")
            poly, _ = self._parse_poly()
            axes = [b.phase.axis(c) for c in blade_coords]
            if len(set(axes)) != len(axes):
                self.report(blade_span, "repeated covector in blade")
                continue
            if degree is None:
                degree = len(axes)
            elif len(axes) != degree:
                self.report(blade_span,
                            f"blade degree {len(axes)} differs from earlier degree "
                            f"{degree}; a form must have uniform degree")
                continue
            # normalize to increasing axis order, tracking the sign
            order = sorted(range(len(axes)), key=lambda k: axes[k])
            sign = _permutation_sign(order)
            key = tuple(sorted(axes))
            add = poly if sign > 0 else -poly
            prev = terms.get(key)
            add = add if prev is None else prev + add
            if add.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = add
        if degree is None:
            degree = 0
            self.report(name_tok.span, "empty form declaration (no blades)")
            return None
        return Form(b.phase, degree, terms)

    def _parse_blade(self) -> tuple[list[Coordinate], Span]:
        coords = []
        first = self.expect("WORD", "a covector like dx1, dq1, dp[1,1] or dp")
        span = first.span
        coords.append(self._covector(first))
        while self.peek().kind == "CARET":
            self.next()
            t = self.expect("WORD", "a covector")
            span = span.merge(t.span)
            coords.append(self._covector(t))
        return coords, span

    def _covector(self, tok: Token) -> Coordinate:
        b = self.bundle
        m = re.fullmatch(r"dx(\d+)", tok.text)
        if m:
            k = int(m.group(1))
            if not 1 <= k <= b.n:
                raise self.error(tok.span, f"base index {k} out of range 1..{b.n}")
            return b.x(k)
        m = re.fullmatch(r"dq(\d+)", tok.text)
        if m:
            k = int(m.group(1))
            if not 1 <= k <= b.N:
                raise self.error(tok.span, f"fibre index {k} out of range 1..{b.N}")
            return b.q(k)
        if tok.text == "dp":
            if self.peek().kind == "LBRACKET":
                self.next()
                i_tok = self.expect("INT", "fibre index")
                self.expect("COMMA", "','")
                mu_tok = self.expect("INT", "base index")
                close = self.expect("RBRACKET", "']'")
                i, mu = int(i_tok.text), int(mu_tok.text)
                if not 1 <= i <= b.N:
                    raise self.error(i_tok.span, f"fibre index {i} out of range 1..{b.N}")
                if not 1 <= mu <= b.n:
                    raise self.error(mu_tok.span, f"base index {mu} out of range 1..{b.n}")
                return b.p(i, mu)
            return ENERGY
        raise self.error(tok.span, f"unknown covector {tok.text!r}")

    # commands ---------------------------------------------------------------

    def _parse_command(self, env: dict, kinds: dict) -> Command | None:
        first = self.next()
        words = [first.text]
        span = first.span
        while self.peek().kind == "MINUS" and self.peek(1).kind == "WORD":
            self.next()
            w = self.next()
            words.append(w.text)
            span = span.merge(w.span)
        name = "-".join(words)
        if name not in COMMANDS:
            raise self.error(span, f"unknown command {name!r}")
        self.expect("LPAREN", "'('")
        args: list = []
        arg_texts: list[str] = []
        if self.peek().kind != "RPAREN":
            while True:
                if self.peek().kind == "LBRACE":
                    pt, text = self._parse_point_map()
                    args.append(pt)
                    arg_texts.append(text)
                else:
                    t = self.expect("WORD", "an identifier")
                    if t.text not in env:
                        raise self.error(t.span, f"{t.text!r} is not declared")
                    args.append(t.text)
                    arg_texts.append(t.text)
                if self.peek().kind == "COMMA":
                    self.next()
                    continue
                break
        self.expect("RPAREN", "')'")
        self._check_command_args(name, args, span, kinds)
        rendered = f"{name}({', '.join(arg_texts)})"
        return Command(name=name, args=args, rendered=rendered, span=span)

    def _check_command_args(self, name: str, args: list, span: Span, kinds: dict):
        arity = COMMANDS[name]
        if len(args) != arity:
            raise self.error(span, f"{name} expects {arity} argument(s), got {len(args)}")
        want = {
            "lift": ("vf",), "momentum": ("vf",), "verify-multisymplectic": ("vf",),
            "hamvf": ("hform", "form"), "poisson-check": ("hform", "form"),
            "bracket": ("hform",), "bracket-naive": ("hform",),
            "bracket-coords": ("hform",), "graded-bracket": ("hform",),
            "jacobi": ("hform",), "defect": ("hform",),
        }.get(name)
        if want is None:
            if name == "eval":
                if not isinstance(args[0], str):
                    raise self.error(span, "eval expects a declared identifier first")
                if not isinstance(args[1], dict):
                    raise self.error(span, "eval expects a point map {x1: 1, ...} second")
            return
        for a in args:
            if not isinstance(a, str):
                raise self.error(span, f"{name} expects identifier arguments")
            if kinds.get(a) not in want:
                raise self.error(
                    span, f"{name} expects {' or '.join(want)} arguments, "
                    f"but {a!r} is a {kinds.get(a)}")

    def _parse_point_map(self) -> tuple[dict, str]:
        b = self.bundle
        self.expect("LBRACE", "'{'")
        assignment: dict[Coordinate, Fraction] = {}
        default: Fraction | None = None
        parts: list[str] = []
        while True:
            t = self.peek()
            if t.kind == "RBRACE":
                self.next()
                break
            if t.kind == "COMMA":
                self.next()
                continue
            key = self.expect("WORD", "a coordinate name or 'rest'")
            coord: Coordinate | None = None
            if key.text == "rest":
                pass
            elif key.text == "en":
                coord = ENERGY
            elif key.text == "p" and self.peek().kind == "LBRACKET":
                self.next()
                i_tok = self.expect("INT", "fibre index")
                self.expect("COMMA", "','")
                mu_tok = self.expect("INT", "base index")
                self.expect("RBRACKET", "']'")
                i, mu = int(i_tok.text), int(mu_tok.text)
                if not (1 <= i <= b.N and 1 <= mu <= b.n):
                    raise self.error(key.span, "momentum index out of range")
                coord = b.p(i, mu)
            else:
                m = re.fullmatch(r"x(\d+)", key.text)
                if m and 1 <= int(m.group(1)) <= b.n:
                    coord = b.x(int(m.group(1)))
                else:
                    m = re.fullmatch(r"q(\d+)", key.text)
                    if m and 1 <= int(m.group(1)) <= b.N:
                        coord = b.q(int(m.group(1)))
                    else:
                        raise self.error(key.span,
                                         f"unknown coordinate {key.text!r}")
            self.expect("COLON", "':'")
            value_poly, _ = self._parse_poly()
            if not value_poly.is_constant():
                raise self.error(key.span, "point values must be constants")
            v = value_poly.constant_value()
            if key.text == "rest":
                default = v
                parts.append(f"rest: {v}")
            else:
                assignment[coord] = v
                parts.append(f"{coord.name}: {v}")
        if default is None:
            missing = [c.name for c in b.phase.coords if c not in assignment]
            if missing:
                raise self.error(
                    t.span, "incomplete point: missing "
                    + ", ".join(missing) + " (or add rest: <value>)")
        return ({"assignment": assignment, "default": default},
                "{" + ", ".join(parts) + "}")

    # polynomial expressions ---------------------------------------------------

    def _parse_poly(self) -> tuple[Poly, list]:
        """Parse a polynomial; returns (Poly, [(Coordinate, Span), ...])."""
        uses: list = []
        poly = self._poly_expr(uses)
        return poly, uses

    def _poly_expr(self, uses) -> Poly:
        acc = self._poly_term(uses)
        while self.peek().kind in ("PLUS", "MINUS"):
            op = self.next()
            rhs = self._poly_term(uses)
            acc = acc + rhs if op.kind == "PLUS" else acc - rhs
        return acc

    def _poly_term(self, uses) -> Poly:
        acc = self._poly_factor(uses)
        while self.peek().kind == "STAR":
            self.next()
            acc = acc * self._poly_factor(uses)
        return acc

    def _poly_factor(self, uses) -> Poly:
        if self.peek().kind == "MINUS":
            self.next()
            return -self._poly_factor(uses)
        return self._poly_power(uses)

    def _poly_power(self, uses) -> Poly:
        atom = self._poly_atom(uses)
        if self.peek().kind == "CARET":
            self.next()
            e = self.expect("INT", "a nonnegative integer exponent")
            return atom ** int(e.text)
        return atom

    def _poly_atom(self, uses) -> Poly:
        sysm = self.bundle.phase
        t = self.next()
        if t.kind == "INT":
            num = int(t.text)
            if self.peek().kind == "SLASH":
                self.next()
                den = self.expect("INT", "a denominator")
                if int(den.text) == 0:
                    raise self.error(den.span, "zero denominator")
                return Poly.const(sysm, Fraction(num, int(den.text)))
            return Poly.const(sysm, num)
        if t.kind == "LPAREN":
            inner = self._poly_expr(uses)
            self.expect("RPAREN", "')'")
            return inner
        if t.kind == "WORD":
            coord = self._variable(t)
            uses.append((coord, t.span))
            return Poly.var(sysm, coord)
        raise self.error(t.span, f"expected a polynomial atom, found {t.text!r}")

    def _variable(self, tok: Token) -> Coordinate:
        b = self.bundle
        if tok.text == "en":
            return ENERGY
        if tok.text == "p":
            self.expect("LBRACKET", "'[' after p")
            i_tok = self.expect("INT", "fibre index")
            self.expect("COMMA", "','")
            mu_tok = self.expect("INT", "base index")
            self.expect("RBRACKET", "']'")
            i, mu = int(i_tok.text), int(mu_tok.text)
            if not 1 <= i <= b.N:
                raise self.error(i_tok.span, f"fibre index {i} out of range 1..{b.N}")
            if not 1 <= mu <= b.n:
                raise self.error(mu_tok.span, f"base index {mu} out of range 1..{b.n}")
            return b.p(i, mu)
        m = re.fullmatch(r"x(\d+)", tok.text)
        if m:
            k = int(m.group(1))
            if not 1 <= k <= b.n:
                raise self.error(tok.span, f"base index {k} out of range 1..{b.n}")
            return b.x(k)
        m = re.fullmatch(r"q(\d+)", tok.text)
        if m:
            k = int(m.group(1))
            if not 1 <= k <= b.N:
                raise self.error(tok.span, f"fibre index {k} out of range 1..{b.N}")
            return b.q(k)
        raise self.error(tok.span, f"unknown variable {tok.text!r}")


def _permutation_sign(order: list[int]) -> int:
    sign = 1
    seen = [False] * len(order)
    for start in range(len(order)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# -- hform structure extraction ---------------------------------------------------


class HformStructureError(ValueError):
    def __init__(self, mu: int, message: str):
        super().__init__(message)
        self.mu = mu


_NONLINEAR = {CoordKind.MOMENTUM, CoordKind.ENERGY}


def hform_from_components(b: Bundle, comps: dict[int, Poly]) -> HamiltonianNm1Form:
    """Interpret mu-keyed polynomials as the dnx_mu components of a Hamiltonian
    (n-1)-form; recover the generator pair (X, f0) and build the full form.

    The components must be affine in the momentum and energy variables with
    the structure p_i^mu X^i(x,q) - p X^mu(x) + f0^mu(x,q); violations raise
    HformStructureError naming the offending component.
    """
    sysm = b.phase
    zero = Poly.zero(sysm)
    f = {mu: comps.get(mu, zero) for mu in range(1, b.n + 1)}
    fiber_comps: dict[int, Poly] = {}
    for i in range(1, b.N + 1):
        candidate: Poly | None = None
        for mu in range(1, b.n + 1):
            d = f[mu].partial(b.p(i, mu))
            if not d.uses_only({CoordKind.BASE, CoordKind.FIBER}):
                raise HformStructureError(
                    mu, f"mu{mu} is not affine in the momentum variables "
                    f"(coefficient of p[{i},{mu}] still involves momenta or en)")
            if candidate is None:
                candidate = d
            elif not (candidate - d).is_zero():
                raise HformStructureError(
                    mu, f"coefficient of p[{i},{mu}] in mu{mu} differs from the "
                    f"coefficient found in other components; the fibre generator "
                    f"component would be ambiguous")
        fiber_comps[i] = candidate if candidate is not None else zero
    base_comps: dict[int, Poly] = {}
    for mu in range(1, b.n + 1):
        d = -f[mu].partial(ENERGY)
        if not d.uses_only({CoordKind.BASE}):
            raise HformStructureError(
                mu, f"the en-coefficient of mu{mu} must depend on base "
                f"coordinates only (projectability)")
        base_comps[mu] = d
        for j in range(1, b.N + 1):
            for nu in range(1, b.n + 1):
                if nu == mu:
                    continue
                if not f[mu].partial(b.p(j, nu)).is_zero():
                    raise HformStructureError(
                        mu, f"mu{mu} involves p[{j},{nu}]; only p[i,{mu}] "
                        f"may appear in the mu{mu} component")
    x = ProjectableVF(b, base_comps, fiber_comps)
    f0_comps: dict[int, Poly] = {}
    for mu in range(1, b.n + 1):
        rest = f[mu] + Poly.var(sysm, ENERGY) * x.base(mu)
        for i in range(1, b.N + 1):
            rest = rest - Poly.var(sysm, b.p(i, mu)) * x.fiber(i)
        if not rest.uses_only({CoordKind.BASE, CoordKind.FIBER}):
            raise HformStructureError(
                mu, f"mu{mu} is not affine in the momentum and energy variables")
        f0_comps[mu] = rest
    f0 = HorizontalNm1Form(b, f0_comps)
    return build_hamiltonian_form(x, f0)


# -- public API --------------------------------------------------------------------


def parse(text: str) -> tuple[Script | None, list[Diagnostic]]:
    """Parse and statically validate a script.  Returns (script, diagnostics);
    script is None whenever any error diagnostic was produced."""
    try:
        parser = Parser(text)
    except ScriptError as e:
        return None, [e.diag]
    script = parser.parse()
    return script, parser.diags
