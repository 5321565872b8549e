import random

import pytest

from multiworld.errors import (
    CyclicCallError,
    EvalError,
    MissingBinding,
    MissingConfig,
    ParseError,
    ScopeError,
)
from multiworld.lang import (
    BinOp,
    BoolLit,
    Call,
    Feature,
    If,
    IntLit,
    Let,
    Not,
    Var,
    eval_plain,
    parse,
    render_program,
)
from multiworld.lifting import LiftStats
from multiworld.oracle import random_bindings, random_program

DIV_PROGRAM = """
fun foo(x, y) =
  let c = if feature("FA") then 1 else 0 in
  if feature("FB") then (x + y) / c else (x + c) / y;
foo(x, y)
"""


# --- parsing ------------------------------------------------------------------

def test_parse_fundefs_and_call():
    p = parse("fun bar(a, b) = a * b; fun baz(c) = c + 1; fun foo(x, y, z) = bar(x, y) + baz(z); foo(a, b, c)")
    assert [fd.name for fd in p.fundefs] == ["bar", "baz", "foo"]
    assert p.main == Call("foo", (Var("a"), Var("b"), Var("c")))
    assert p.fundefs[2].body == BinOp(
        "+", Call("bar", (Var("x"), Var("y"))), Call("baz", (Var("z"),))
    )


def test_parse_feature_guard():
    p = parse('if feature("FB") then (x + y) / c else (x + c) / y')
    assert isinstance(p.main, If)
    assert p.main.guard == Feature("FB")


def test_precedence_and_associativity():
    assert parse("1 + 2 * 3").main == BinOp("+", IntLit(1), BinOp("*", IntLit(2), IntLit(3)))
    assert parse("1 - 2 - 3").main == BinOp("-", BinOp("-", IntLit(1), IntLit(2)), IntLit(3))
    assert parse("1 < 2 == true").main == BinOp("==", BinOp("<", IntLit(1), IntLit(2)), BoolLit(True))
    assert parse("!a && b").main == BinOp("&&", Not(Var("a")), Var("b"))
    assert parse("a || b && c").main == BinOp("||", Var("a"), BinOp("&&", Var("b"), Var("c")))


def test_unary_minus_desugars():
    assert parse("-7").main == BinOp("-", IntLit(0), IntLit(7))
    assert eval_plain(parse("0 - 7"), {}) == -7
    assert eval_plain(parse("-x * 2"), {"x": 3}) == -6


def test_comments_and_let():
    p = parse("// a comment\nlet x = 1 in // mid\n x + 1")
    assert p.main == Let("x", IntLit(1), BinOp("+", Var("x"), IntLit(1)))


def test_syntax_error_carries_position():
    with pytest.raises(ParseError) as exc:
        parse("let x = (1 +\n2")
    assert exc.value.line == 2


def test_integer_literal_range():
    parse(str(2**63 - 1))
    with pytest.raises(ParseError):
        parse(str(2**63))


def test_scope_and_cycle_errors():
    with pytest.raises(ScopeError):
        parse("fun f(x) = y; f(1)")
    with pytest.raises(ScopeError):
        parse("fun f(x) = x; f(1, 2)")
    with pytest.raises(ScopeError):
        parse("g(1)")
    with pytest.raises(ScopeError):
        parse("fun f(x, x) = x; f(1, 2)")
    with pytest.raises(CyclicCallError):
        parse("fun f(x) = f(x); f(1)")
    with pytest.raises(CyclicCallError):
        parse("fun f(x) = g(x); fun g(x) = f(x); f(1)")


def test_reserved_words_not_identifiers():
    with pytest.raises(ParseError):
        parse("let let = 1 in 2")


def test_render_round_trip_on_random_corpus():
    for seed in range(150):
        rng = random.Random(seed)
        kind = ("feature", "interval", "probability")[seed % 3]
        alg, binds = random_bindings(rng, kind)
        program = random_program(rng, alg, binds)
        assert parse(render_program(program)) == program


def test_render_round_trip_shapes():
    text = 'fun f(a) = (if feature("FA") then a else -a);\nlet x = f(2) in x <= 3 && !false'
    program = parse(text)
    assert parse(render_program(program)) == program


# --- plain evaluation -----------------------------------------------------------

def test_div_program_per_configuration():
    p = parse(DIV_PROGRAM)
    env = {"x": 6, "y": 3}
    with pytest.raises(EvalError) as exc:
        eval_plain(p, env, {"FA": False, "FB": True})
    assert exc.value.kind == "DivByZero"
    assert eval_plain(p, env, {"FA": True, "FB": True}) == 9
    assert eval_plain(p, env, {"FA": True, "FB": False}) == 2
    assert eval_plain(p, env, {"FA": False, "FB": False}) == 2


def test_truncating_division():
    assert eval_plain(parse("7 / 2"), {}) == 3
    assert eval_plain(parse("-7 / 2"), {}) == -3
    assert eval_plain(parse("7 / -2"), {}) == -3
    assert eval_plain(parse("-7 / -2"), {}) == 3


def test_short_circuit():
    assert eval_plain(parse("false && (1 / 0 == 0)"), {}) is False
    assert eval_plain(parse("true || (1 / 0 == 0)"), {}) is True
    with pytest.raises(EvalError):
        eval_plain(parse("true && (1 / 0 == 0)"), {})


def test_overflow_is_an_error():
    big = str(2**62)
    with pytest.raises(EvalError) as exc:
        eval_plain(parse(f"{big} + {big}"), {})
    assert exc.value.kind == "Overflow"
    with pytest.raises(EvalError):
        eval_plain(parse(f"(0 - {2**63 - 1} - 1) / -1"), {})


def test_type_errors():
    with pytest.raises(EvalError) as exc:
        eval_plain(parse("1 + true"), {})
    assert exc.value.kind == "TypeMismatch"
    with pytest.raises(EvalError):
        eval_plain(parse("if 3 then 1 else 2"), {})
    with pytest.raises(EvalError):
        eval_plain(parse("1 == true"), {})
    assert eval_plain(parse("true == true"), {}) is True


def test_missing_binding_and_config():
    with pytest.raises(MissingBinding):
        eval_plain(parse("x + 1"), {})
    with pytest.raises(MissingConfig):
        eval_plain(parse('feature("FA")'), {})


def test_let_shadowing_and_strictness():
    assert eval_plain(parse("let x = 1 in let x = 2 in x"), {}) == 2
    # strict: the bound expression runs even when unused
    with pytest.raises(EvalError):
        eval_plain(parse("let t = 1 / 0 in 5"), {})


def test_eval_is_deterministic():
    p = parse(DIV_PROGRAM)
    outs = {eval_plain(p, {"x": 6, "y": 3}, {"FA": True, "FB": True}) for _ in range(5)}
    assert outs == {9}


def test_stats_count_functions_and_operators():
    p = parse("fun inc(a) = a + 1; inc(1) + inc(2)")
    stats = LiftStats()
    eval_plain(p, {}, stats=stats)
    assert stats.applications["inc"] == 2
    assert stats.applications["add"] == 3


def test_call_arguments_evaluate_before_entry():
    p = parse("fun f(a) = 1; f(1 / 0)")
    stats = LiftStats()
    with pytest.raises(EvalError):
        eval_plain(p, {}, stats=stats)
    assert stats.applications["f"] == 0
