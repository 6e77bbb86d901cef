import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvlab.errors import ArityError, ExpressionSyntaxError, FieldDomainError, UnknownIdentifierError
from curvlab.expr import depth, eval_jet2, eval_value, is_constant, parse_field, to_source
from curvlab.jets import Jet2


def fd_jet(node, p, h=1e-3):
    """Central differences with one Richardson step; independent of the jet code."""
    p = np.asarray(p, dtype=float)
    f = lambda q: float(eval_value(node, q))
    E = np.eye(4)

    def grad(h):
        return np.array([(f(p + h * E[i]) - f(p - h * E[i])) / (2 * h) for i in range(4)])

    def hess(h):
        H = np.empty((4, 4))
        for i in range(4):
            for j in range(4):
                H[i, j] = (
                    f(p + h * E[i] + h * E[j]) - f(p + h * E[i] - h * E[j])
                    - f(p - h * E[i] + h * E[j]) + f(p - h * E[i] - h * E[j])
                ) / (4 * h * h)
        return H

    g = (4 * grad(h / 2) - grad(h)) / 3
    H = (4 * hess(h / 2) - hess(h)) / 3
    return f(p), g, H


FIELDS = [
    "1/(1+x1^2+x2^2)^2",
    "exp(2*sin(x1))*cos(x2 - x3)",
    "sqrt(2 + x1*x4) - log(3 + x2^2)",
    "x1^3*x2 - 4*x3/(2 + x4^2)",
    "(x1 - x2)^(-2)",
]


@pytest.mark.parametrize("src", FIELDS)
def test_jet_matches_finite_differences(src):
    node = parse_field(src)
    p = np.array([0.3, -0.7, 0.45, 1.1])
    jet = eval_jet2(node, p)
    v, g, H = fd_jet(node, p)
    assert jet.value == pytest.approx(v, rel=1e-14)
    np.testing.assert_allclose(jet.grad, g, rtol=1e-7, atol=1e-8)
    np.testing.assert_allclose(jet.hess, H, rtol=1e-6, atol=1e-6)
    np.testing.assert_allclose(jet.hess, jet.hess.T, atol=1e-14)


def test_constant_and_polynomial_examples():
    jet = eval_jet2(parse_field("2.5"), np.array([1.0, 2, 3, 4]))
    assert jet.value == 2.5 and not jet.grad.any() and not jet.hess.any()
    jet = eval_jet2(parse_field("x1^2"), np.array([3.0, 0, 0, 0]))
    assert jet.value == 9
    np.testing.assert_array_equal(jet.grad, [6, 0, 0, 0])
    expected = np.zeros((4, 4))
    expected[0, 0] = 2
    np.testing.assert_array_equal(jet.hess, expected)


def test_batch_evaluation_matches_pointwise():
    node = parse_field(FIELDS[1])
    pts = np.random.default_rng(3).normal(size=(2, 5, 4))
    batch = eval_jet2(node, pts)
    assert batch.value.shape == (2, 5) and batch.hess.shape == (2, 5, 4, 4)
    one = eval_jet2(node, pts[1, 2])
    np.testing.assert_allclose(batch.hess[1, 2], one.hess, rtol=1e-15)


def test_jet_arithmetic_product_rule():
    pts = np.array([0.2, 0.4, -0.1, 0.9])
    x, y = Jet2.coordinate(0, pts), Jet2.coordinate(1, pts)
    f = (x * y).sin() / (1 + x * x)
    ref = eval_jet2(parse_field("sin(x1*x2)/(1 + x1*x1)"), pts)
    np.testing.assert_allclose(f.grad, ref.grad, rtol=1e-15)
    np.testing.assert_allclose(f.hess, ref.hess, rtol=1e-15)


def test_parse_depth_and_round_trip():
    node = parse_field("1/(1+x1^2+x2^2)^2")
    assert depth(node) >= 3
    for src in FIELDS + ["-x1^2", "-(x1 - x2)*-3", "((x1)^2)^2", "x1 - (x2 - x3)"]:
        node = parse_field(src)
        assert parse_field(to_source(node)) == node


def test_unary_minus_binds_below_power():
    p = np.array([3.0, 0, 0, 0])
    assert float(eval_value(parse_field("-x1^2"), p)) == -9.0


def test_is_constant():
    assert is_constant(parse_field("2*sin(3) + 4^2"))
    assert not is_constant(parse_field("1 + 0*x3"))


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError):
        parse_field("x5")
    with pytest.raises(UnknownIdentifierError):
        parse_field("tan(x1)")


def test_syntax_error_column():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_field("sin(x1")
    assert info.value.column == 7


def test_arity_error():
    with pytest.raises(ArityError):
        parse_field("sin(x1, x2)")


@pytest.mark.parametrize("src", ["", "1 +", "x1 x2", "2^x1", "((x1)", "x1 * * 2"])
def test_rejects_malformed(src):
    with pytest.raises(ExpressionSyntaxError):
        parse_field(src)


@pytest.mark.parametrize("src,p", [("log(x1)", [-1.0, 0, 0, 0]), ("sqrt(x1 - 2)", [1.0, 0, 0, 0]), ("1/x2", [1.0, 0, 0, 0])])
def test_domain_errors_carry_location(src, p):
    with pytest.raises(FieldDomainError) as info:
        eval_jet2(parse_field(src), np.array(p))
    assert info.value.location is not None


# -- property-based -------------------------------------------------------------------

_leaf = st.one_of(
    st.sampled_from(["x1", "x2", "x3", "x4"]),
    st.integers(1, 9).map(str),
)


def _extend(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        st.tuples(st.sampled_from(["sin", "cos", "exp"]), children).map(lambda t: f"{t[0]}({t[1]})"),
        st.tuples(children, st.integers(2, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
    )


exprs = st.recursive(_leaf, _extend, max_leaves=6)


@settings(max_examples=60, deadline=None)
@given(exprs, st.lists(st.floats(-0.8, 0.8), min_size=4, max_size=4))
def test_property_round_trip_and_fd(src, p):
    node = parse_field(src)
    assert parse_field(to_source(node)) == node
    p = np.array(p)
    jet = eval_jet2(node, p)
    v, g, H = fd_jet(node, p, h=1e-3)
    scale = 1.0 + abs(v) + np.abs(g).max()
    assert abs(jet.value - v) <= 1e-12 * scale
    np.testing.assert_allclose(jet.grad, g, atol=1e-6 * scale * 10)
    np.testing.assert_allclose(jet.hess, H, atol=1e-4 * (scale + np.abs(H).max()))
