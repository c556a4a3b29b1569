import pytest
from hypothesis import given, settings, strategies as st

from qbailey import catalogue as C
from qbailey import qdsl
from qbailey.qdsl import (
    BinOp,
    EvalDivergence,
    EvalError,
    Inf,
    LexError,
    ManifestError,
    Num,
    ParseError,
    Poch,
    Q,
    Sum,
    evaluate,
    parse,
    parse_manifest,
    to_text,
    tokenize,
)
from qbailey.partitions import p
from qbailey.series import NotInvertible, first_difference, from_coeffs


def kinds(text):
    return [t.text for t in tokenize(text) if t.kind != "eof"]


def test_tokenize_examples():
    assert kinds("poch(q,inf)^3") == ["poch", "(", "q", ",", "inf", ")", "^", "3"]
    assert kinds("1 - q") == ["1", "-", "q"]


def test_lex_error_position():
    with pytest.raises(LexError) as info:
        tokenize("q$")
    assert (info.value.line, info.value.column) == (1, 2)
    with pytest.raises(LexError) as info:
        tokenize("1 +\n  q # 2")
    assert (info.value.line, info.value.column) == (2, 5)


def test_parse_quotient():
    assert parse("1/poch(q,inf)") == BinOp("/", Num(1), Poch(Q(), Inf()))


def test_parse_sum():
    e = parse("sum(n,0,inf, q^(n^2)/(poch(q,n)^2))")
    assert isinstance(e, Sum)
    assert e.index == "n"


@pytest.mark.parametrize("text", ["sum(n,0,)", "1 +", "(q", "poch(q)", "q^", "sum(1, 0, 2, q)", "q q"])
def test_parse_errors(text):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.expected
    assert info.value.column >= 1


def test_precedence_and_associativity():
    assert evaluate("2 - 1 - 1", {}, 5).is_zero()
    assert evaluate("2^3^2 - 512", {}, 5).is_zero()
    assert evaluate("-q^2 + q^2", {}, 5).is_zero()
    # division is exact integer division inside exponents
    assert evaluate("q^(8/2/2) - q^2", {}, 5).is_zero()


def test_evaluate_examples():
    e = evaluate("sum(n,0,inf,q^(n^2)/(poch(q,n)^2))", {}, 10)
    assert [e.coeff(n) for n in range(11)] == [p(n) for n in range(11)]
    assert evaluate("poch(q,3)", {}, 10) == from_coeffs([1, -1, -1, 0, 1, 1, -1], order=10)
    assert evaluate("q^M", {"M": 2}, 10).coeff(2) == 1


def test_bilateral_sum_is_euler_product():
    lhs = evaluate("bsum(j, (-1)^j * q^(j*(3*j-1)/2))", {}, 40)
    rhs = evaluate("poch(q, inf)", {}, 40)
    assert first_difference(lhs, rhs, 40) is None


def test_evaluation_errors():
    with pytest.raises(EvalError):
        evaluate("q^M", {}, 10)
    with pytest.raises(EvalDivergence):
        evaluate("sum(n, 0, inf, 1)", {}, 10, budget=100)
    with pytest.raises(NotInvertible):
        evaluate("1/(2 - q)", {}, 10)
    with pytest.raises(EvalError):
        evaluate("poch(1 + q, inf)", {}, 10)


def test_index_scoping():
    assert first_difference(evaluate("sum(n, 0, 2, q^n) + q^n", {"n": 5}, 10),
                            from_coeffs([1, 1, 1, 0, 0, 1], order=10), 10) is None
    with pytest.raises(EvalError):
        evaluate("sum(n, 0, 2, q) + q^n", {}, 10)


def test_window_ignores_isolated_dips():
    # the n = 3 term vanishes, so a one-term window would stop too early
    text = "sum(n, 0, inf, (n - 3)^2 * q^(n - 3 + 3))"
    e = evaluate(text, {}, 8)
    assert [e.coeff(n) for n in range(9)] == [(n - 3) ** 2 for n in range(9)]


EXPRESSIONS = [
    "1/poch(q,inf)",
    "sum(n, 0, inf, q^(n^2) / poch(q, n)^2)",
    "-q^2*3 - (1 - q)/(1 + q)",
    "bsum(j, (-1)^j * q^(j*(3*j-1)/2))",
    "poch(q^(M+1), inf) * sum(j, 0, N, q^(j*M))",
]


@pytest.mark.parametrize("text", EXPRESSIONS)
def test_print_round_trip(text):
    tree = parse(text)
    printed = to_text(tree)
    assert parse(printed) == tree
    assert to_text(parse(printed)) == printed


@settings(max_examples=100, deadline=None)
@given(st.recursive(
    st.one_of(st.integers(0, 9).map(str), st.just("q"), st.just("M")),
    lambda inner: st.one_of(
        st.tuples(inner, st.sampled_from(["+", "-", "*"]), inner).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        inner.map(lambda s: f"-{s}"),
        inner.map(lambda s: f"{s}^2"),
    ),
    max_leaves=8,
))
def test_print_round_trip_random(text):
    tree = parse(text)
    assert parse(to_text(tree)) == tree
    assert evaluate(tree, {"M": 2}, 8) == evaluate(to_text(tree), {"M": 2}, 8)


EULER_MANIFEST = """
[EULER]
lhs = sum(n, 0, inf, q^(n^2) / poch(q, n)^2)
rhs = 1 / poch(q, inf)
order = 80
"""


def test_manifest_single_check():
    m = parse_manifest(EULER_MANIFEST)
    assert len(m.checks) == 1
    c = m.checks[0]
    assert c.order == 80
    assert qdsl.run_check(c, {}).passed


def test_manifest_duplicate_names():
    with pytest.raises(ManifestError):
        parse_manifest(EULER_MANIFEST + EULER_MANIFEST)


def test_manifest_grid_expansion():
    m = parse_manifest("[A]\nparams = M=0..3\nlhs = q^M\nrhs = q^M\n")
    assert len(m.tasks()) == 4
    m = parse_manifest("[A]\nparams = M=0..1, k=2|5\nlhs = q^M\nrhs = q^M\n")
    assert [p for _, p in m.tasks()] == [
        {"M": 0, "k": 2}, {"M": 0, "k": 5}, {"M": 1, "k": 2}, {"M": 1, "k": 5},
    ]


@pytest.mark.parametrize("text", [
    "[A]\nlhs = q\n",
    "[A]\nlhs = q\nrhs = q\ncolour = red\n",
    "[A]\nlhs = q\nrhs = q\norder = -1\n",
    "[A]\nlhs = q\nrhs = q\norder = ten\n",
    "[A]\nlhs = q +\nrhs = q\n",
    "[A]\nparams = M\nlhs = q\nrhs = q\n",
    "[A]\nparams = q=1\nlhs = q\nrhs = q\n",
    "lhs = q\n",
])
def test_manifest_errors(text):
    with pytest.raises(ManifestError):
        parse_manifest(text)


def test_failing_manifest_check_reports_mismatch():
    m = parse_manifest("[BAD]\nlhs = 1/(1-q)\nrhs = 1 + q + q^2 + 2*q^3\norder = 5\n")
    r = qdsl.run_check(m.checks[0], {})
    assert r.status == "fail"
    assert (r.first_mismatch.exponent, r.first_mismatch.lhs, r.first_mismatch.rhs) == (3, 1, 2)


def _manifest_sides(name, params, T):
    check = parse_manifest(qdsl.shipped_manifest_text()).check(name)
    return evaluate(check.lhs, params, T), evaluate(check.rhs, params, T)


@pytest.mark.parametrize("name, params, catalogue_id, catalogue_params", [
    ("EULER", {}, "EULER", {}),
    ("C4_SPT", {"M": 2}, "C4_SPT", {"M": 2}),
    ("C6_DURFEE_K2", {"M": 1, "k": 2}, "C6_DURFEE", {"k": 2, "M": 1}),
    ("E29_SPLIT", {"n": 4, "M": 2}, "E29_SPLIT", {"n": 4, "M": 2}),
    ("A23_DURFEE_K3", {"m": 2}, "A23_DURFEE", {"k": 3, "m": 2}),
    ("QCHU", {"N": 3, "M": 5}, "QCHU", {"N": 3, "M": 5}),
])
def test_manifest_matches_catalogue(name, params, catalogue_id, catalogue_params):
    T = 30
    lhs, rhs = _manifest_sides(name, params, T)
    task = C.build(catalogue_id, catalogue_params, T)
    assert first_difference(lhs, task.sides[0](T), T) is None
    assert first_difference(rhs, task.sides[-1](T), T) is None


def test_shipped_manifest_is_total_and_passes():
    m = parse_manifest(qdsl.shipped_manifest_text())
    assert all(c.order <= 80 for c in m.checks)
    for check, params in m.tasks():
        T = min(check.order, 60)
        assert qdsl.run_check(check, params, T).passed, (check.name, params)
