"""A small first-order expression language and its single-world evaluator.

The plain evaluator is the ground-truth semantics that every lifted mode
must agree with world by world.  Values are 64-bit signed integers and
booleans; division truncates toward zero; overflow and division by zero
are runtime errors; ``&&`` and ``||`` short-circuit.  ``feature("N")``
tests one feature of the active configuration.

Program file grammar (``.mdl``, ``//`` comments):

    program  := fundef* expr
    fundef   := "fun" ID "(" ID ("," ID)* ")" "=" expr ";"
    expr     := INT | "true" | "false" | ID
              | "let" ID "=" expr "in" expr
              | "if" expr "then" expr "else" expr
              | "!" expr | "-" expr | expr OP expr | "(" expr ")"
              | ID "(" expr ("," expr)* ")"
              | "feature" "(" STRING ")"

Precedence, loosest to tightest: ``||``, ``&&``, comparisons
(``<`` ``<=`` ``==``), ``+ -``, ``* /``, unary ``! -``.  All binary
operators associate to the left; unary minus desugars to ``0 - e``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DIV_BY_ZERO,
    OVERFLOW,
    TYPE_MISMATCH,
    CyclicCallError,
    EvalError,
    MissingBinding,
    MissingConfig,
    ParseError,
    ScopeError,
)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

KEYWORDS = {"fun", "let", "in", "if", "then", "else", "true", "false", "feature"}

# lifted-counter names for the built-in operators
OP_NAMES = {
    "+": "add",
    "-": "sub",
    "*": "mul",
    "/": "div",
    "<": "lt",
    "<=": "le",
    "==": "eq",
    "!": "not",
}


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------

class Expr:
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Let(Expr):
    name: str
    bound: Expr
    body: Expr


@dataclass(frozen=True)
class If(Expr):
    guard: Expr
    then: Expr
    orelse: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Not(Expr):
    arg: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    args: tuple


@dataclass(frozen=True)
class Feature(Expr):
    name: str


@dataclass(frozen=True)
class FunDef:
    name: str
    params: tuple
    body: Expr


@dataclass(frozen=True)
class Program:
    fundefs: tuple
    main: Expr


# --------------------------------------------------------------------------
# Tokenizer
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # int | id | kw | string | op | eof
    text: str
    line: int
    col: int


_TWO_CHAR_OPS = ("&&", "||", "<=", "==")
_ONE_CHAR_OPS = "+-*/<!(),;="


def _tokenize(text: str) -> list:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c.isspace():
            i, col = i + 1, col + 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "kw" if word in KEYWORDS else "id"
            tokens.append(_Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise ParseError("unterminated string", start_line, start_col)
                j += 1
            if j >= n:
                raise ParseError("unterminated string", start_line, start_col)
            tokens.append(_Token("string", text[i + 1 : j], start_line, start_col))
            col += j - i + 1
            i = j + 1
            continue
        two = text[i : i + 2]
        if two in _TWO_CHAR_OPS:
            tokens.append(_Token("op", two, start_line, start_col))
            i, col = i + 2, col + 2
            continue
        if c in _ONE_CHAR_OPS:
            tokens.append(_Token("op", c, start_line, start_col))
            i, col = i + 1, col + 1
            continue
        raise ParseError(f"unexpected character {c!r}", start_line, start_col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            got = tok.text or tok.kind
            self.fail(f"expected {want!r}, found {got!r}")
        return self.advance()

    def at_op(self, *texts) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in texts

    def at_kw(self, text) -> bool:
        tok = self.peek()
        return tok.kind == "kw" and tok.text == text

    def program(self) -> Program:
        fundefs = []
        while self.at_kw("fun"):
            fundefs.append(self.fundef())
        main = self.expr()
        if self.peek().kind != "eof":
            self.fail(f"unexpected trailing {self.peek().text!r}")
        return Program(tuple(fundefs), main)

    def fundef(self) -> FunDef:
        self.expect("kw", "fun")
        name = self.expect("id").text
        self.expect("op", "(")
        params = [self.expect("id").text]
        while self.at_op(","):
            self.advance()
            params.append(self.expect("id").text)
        self.expect("op", ")")
        self.expect("op", "=")
        body = self.expr()
        self.expect("op", ";")
        return FunDef(name, tuple(params), body)

    def expr(self) -> Expr:
        return self.or_expr()

    def _binary_left(self, ops, sub):
        node = sub()
        while self.at_op(*ops):
            op = self.advance().text
            node = BinOp(op, node, sub())
        return node

    def or_expr(self) -> Expr:
        return self._binary_left(("||",), self.and_expr)

    def and_expr(self) -> Expr:
        return self._binary_left(("&&",), self.cmp_expr)

    def cmp_expr(self) -> Expr:
        return self._binary_left(("<", "<=", "=="), self.add_expr)

    def add_expr(self) -> Expr:
        return self._binary_left(("+", "-"), self.mul_expr)

    def mul_expr(self) -> Expr:
        return self._binary_left(("*", "/"), self.unary_expr)

    def unary_expr(self) -> Expr:
        if self.at_op("!"):
            self.advance()
            return Not(self.unary_expr())
        if self.at_op("-"):
            self.advance()
            return BinOp("-", IntLit(0), self.unary_expr())
        return self.atom()

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            value = int(tok.text)
            if value > INT64_MAX:
                raise ParseError("integer literal out of range", tok.line, tok.col)
            return IntLit(value)
        if tok.kind == "kw":
            if tok.text == "true":
                self.advance()
                return BoolLit(True)
            if tok.text == "false":
                self.advance()
                return BoolLit(False)
            if tok.text == "let":
                self.advance()
                name = self.expect("id").text
                self.expect("op", "=")
                bound = self.expr()
                self.expect("kw", "in")
                return Let(name, bound, self.expr())
            if tok.text == "if":
                self.advance()
                guard = self.expr()
                self.expect("kw", "then")
                then = self.expr()
                self.expect("kw", "else")
                return If(guard, then, self.expr())
            if tok.text == "feature":
                self.advance()
                self.expect("op", "(")
                name_tok = self.expect("string")
                name = name_tok.text
                if not name or not all(c.isalnum() or c == "_" for c in name) or name[0].isdigit():
                    raise ParseError(
                        f"feature name must be an identifier, got {name!r}",
                        name_tok.line,
                        name_tok.col,
                    )
                self.expect("op", ")")
                return Feature(name)
            self.fail(f"unexpected keyword {tok.text!r}")
        if tok.kind == "id":
            self.advance()
            if self.at_op("("):
                self.advance()
                args = [self.expr()]
                while self.at_op(","):
                    self.advance()
                    args.append(self.expr())
                self.expect("op", ")")
                return Call(tok.text, tuple(args))
            return Var(tok.text)
        if self.at_op("("):
            self.advance()
            inner = self.expr()
            self.expect("op", ")")
            return inner
        self.fail(f"unexpected {tok.text or tok.kind!r}")


def parse(text: str) -> Program:
    """Parse and load-check a program (scoping, arities, acyclic calls)."""
    program = _Parser(text).program()
    load_check(program)
    return program


# --------------------------------------------------------------------------
# Load checks
# --------------------------------------------------------------------------

def _walk(expr: Expr):
    yield expr
    if isinstance(expr, Let):
        yield from _walk(expr.bound)
        yield from _walk(expr.body)
    elif isinstance(expr, If):
        yield from _walk(expr.guard)
        yield from _walk(expr.then)
        yield from _walk(expr.orelse)
    elif isinstance(expr, BinOp):
        yield from _walk(expr.lhs)
        yield from _walk(expr.rhs)
    elif isinstance(expr, Not):
        yield from _walk(expr.arg)
    elif isinstance(expr, Call):
        for a in expr.args:
            yield from _walk(a)


def _check_scope(expr: Expr, bound: set, fundefs: dict, allow_free: bool, free: set):
    if isinstance(expr, Var):
        if expr.name not in bound:
            if not allow_free:
                raise ScopeError(f"unbound variable {expr.name!r}")
            free.add(expr.name)
    elif isinstance(expr, Let):
        _check_scope(expr.bound, bound, fundefs, allow_free, free)
        _check_scope(expr.body, bound | {expr.name}, fundefs, allow_free, free)
    elif isinstance(expr, If):
        for sub in (expr.guard, expr.then, expr.orelse):
            _check_scope(sub, bound, fundefs, allow_free, free)
    elif isinstance(expr, BinOp):
        _check_scope(expr.lhs, bound, fundefs, allow_free, free)
        _check_scope(expr.rhs, bound, fundefs, allow_free, free)
    elif isinstance(expr, Not):
        _check_scope(expr.arg, bound, fundefs, allow_free, free)
    elif isinstance(expr, Call):
        fd = fundefs.get(expr.fn)
        if fd is None:
            raise ScopeError(f"call to undefined function {expr.fn!r}")
        if len(expr.args) != len(fd.params):
            raise ScopeError(
                f"{expr.fn!r} takes {len(fd.params)} argument(s), got {len(expr.args)}"
            )
        for a in expr.args:
            _check_scope(a, bound, fundefs, allow_free, free)


def load_check(program: Program):
    fundefs: dict = {}
    for fd in program.fundefs:
        if fd.name in fundefs:
            raise ScopeError(f"duplicate function {fd.name!r}")
        if len(set(fd.params)) != len(fd.params):
            raise ScopeError(f"duplicate parameter in {fd.name!r}")
        fundefs[fd.name] = fd

    for fd in program.fundefs:
        _check_scope(fd.body, set(fd.params), fundefs, False, set())
    _check_scope(program.main, set(), fundefs, True, set())

    # cycle detection over the call graph (recursion is out of scope)
    edges = {
        fd.name: {e.fn for e in _walk(fd.body) if isinstance(e, Call)}
        for fd in program.fundefs
    }
    state: dict = {}

    def visit(name, trail):
        if state.get(name) == "done":
            return
        if state.get(name) == "active":
            cycle = trail[trail.index(name):] + [name]
            raise CyclicCallError(f"call cycle: {' -> '.join(cycle)}")
        state[name] = "active"
        for callee in sorted(edges[name]):
            visit(callee, trail + [name])
        state[name] = "done"

    for name in edges:
        visit(name, [])


def free_vars(expr: Expr) -> list:
    """Free variables in first-use order (pre-order walk)."""
    out: list = []

    def go(e, bound):
        if isinstance(e, Var):
            if e.name not in bound and e.name not in out:
                out.append(e.name)
        elif isinstance(e, Let):
            go(e.bound, bound)
            go(e.body, bound | {e.name})
        elif isinstance(e, If):
            go(e.guard, bound)
            go(e.then, bound)
            go(e.orelse, bound)
        elif isinstance(e, BinOp):
            go(e.lhs, bound)
            go(e.rhs, bound)
        elif isinstance(e, Not):
            go(e.arg, bound)
        elif isinstance(e, Call):
            for a in e.args:
                go(a, bound)

    go(expr, set())
    return out


def used_features(program: Program) -> set:
    names = set()
    for root in [fd.body for fd in program.fundefs] + [program.main]:
        names |= {e.name for e in _walk(root) if isinstance(e, Feature)}
    return names


# --------------------------------------------------------------------------
# Renderer (round-trips through parse)
# --------------------------------------------------------------------------

def render_expr(e: Expr) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Feature):
        return f'feature("{e.name}")'
    if isinstance(e, Not):
        return "!" + render_expr(e.arg)
    if isinstance(e, BinOp):
        return f"({render_expr(e.lhs)} {e.op} {render_expr(e.rhs)})"
    if isinstance(e, Let):
        return f"(let {e.name} = {render_expr(e.bound)} in {render_expr(e.body)})"
    if isinstance(e, If):
        return (
            f"(if {render_expr(e.guard)} then {render_expr(e.then)}"
            f" else {render_expr(e.orelse)})"
        )
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(render_expr(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


def render_program(p: Program) -> str:
    lines = [
        f"fun {fd.name}({', '.join(fd.params)}) = {render_expr(fd.body)};"
        for fd in p.fundefs
    ]
    lines.append(render_expr(p.main))
    return "\n".join(lines)


# --------------------------------------------------------------------------
# Plain (single-world) evaluation
# --------------------------------------------------------------------------

def _as_int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise EvalError(TYPE_MISMATCH, f"expected an integer, got {v!r}")
    return v


def _as_bool(v):
    if not isinstance(v, bool):
        raise EvalError(TYPE_MISMATCH, f"expected a boolean, got {v!r}")
    return v


def _checked(n: int) -> int:
    if n < INT64_MIN or n > INT64_MAX:
        raise EvalError(OVERFLOW, "64-bit integer overflow")
    return n


def apply_op(op: str, a, b):
    """Apply one binary primitive to plain values, per-world semantics."""
    if op == "+":
        return _checked(_as_int(a) + _as_int(b))
    if op == "-":
        return _checked(_as_int(a) - _as_int(b))
    if op == "*":
        return _checked(_as_int(a) * _as_int(b))
    if op == "/":
        num, den = _as_int(a), _as_int(b)
        if den == 0:
            raise EvalError(DIV_BY_ZERO, "division by zero")
        quot = abs(num) // abs(den)
        if (num >= 0) != (den >= 0):
            quot = -quot
        return _checked(quot)
    if op == "<":
        return _as_int(a) < _as_int(b)
    if op == "<=":
        return _as_int(a) <= _as_int(b)
    if op == "==":
        if isinstance(a, bool) != isinstance(b, bool):
            raise EvalError(TYPE_MISMATCH, "== needs operands of one type")
        return a == b
    raise ValueError(f"unknown operator {op!r}")


def apply_not(a):
    return not _as_bool(a)


def eval_plain(program: Program, env, config=None, stats=None):
    """Strict call-by-value evaluation in a single world.

    ``env`` binds the free variables of ``main`` to plain values; ``config``
    is a feature-to-bool map, required only when the program tests features.
    ``stats``, when given, counts function and operator applications.
    """
    fundefs = {fd.name: fd for fd in program.fundefs}

    def ev(e, scope):
        if isinstance(e, IntLit):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, Var):
            try:
                return scope[e.name]
            except KeyError:
                raise MissingBinding(f"no value bound for {e.name!r}") from None
        if isinstance(e, Let):
            bound = ev(e.bound, scope)
            return ev(e.body, {**scope, e.name: bound})
        if isinstance(e, If):
            guard = _as_bool(ev(e.guard, scope))
            return ev(e.then if guard else e.orelse, scope)
        if isinstance(e, Not):
            if stats is not None:
                stats.applications["not"] += 1
            return apply_not(ev(e.arg, scope))
        if isinstance(e, BinOp):
            if e.op == "&&":
                if not _as_bool(ev(e.lhs, scope)):
                    return False
                return _as_bool(ev(e.rhs, scope))
            if e.op == "||":
                if _as_bool(ev(e.lhs, scope)):
                    return True
                return _as_bool(ev(e.rhs, scope))
            lhs = ev(e.lhs, scope)
            rhs = ev(e.rhs, scope)
            if stats is not None:
                stats.applications[OP_NAMES[e.op]] += 1
            return apply_op(e.op, lhs, rhs)
        if isinstance(e, Call):
            fd = fundefs[e.fn]
            args = [ev(a, scope) for a in e.args]
            if stats is not None:
                stats.applications[e.fn] += 1
            return ev(fd.body, dict(zip(fd.params, args)))
        if isinstance(e, Feature):
            if config is None or e.name not in config:
                raise MissingConfig(f"no configuration value for feature {e.name!r}")
            return bool(config[e.name])
        raise TypeError(f"not an expression: {e!r}")

    return ev(program.main, dict(env))
