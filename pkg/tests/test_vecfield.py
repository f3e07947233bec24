import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rkrelate.errors import EvaluationError, ExpressionSyntaxError
from rkrelate.vecfield import (
    AffineMap,
    VectorField,
    affine_from_dict,
    apply_affine,
    continuous_residual,
    field_from_dict,
    l1,
    linear_field,
    parse_field,
)

DIAG = AffineMap.duplication([0, 0], 1)


def test_apply_affine_examples():
    assert apply_affine(DIAG, [3.0]).tolist() == [3.0, 3.0]
    assert apply_affine(AffineMap.duplication([0, 0], 1, p=[0, 1]), [2.0]).tolist() == [2.0, 3.0]
    a, b = 0.1, -7.25
    assert apply_affine(AffineMap.linear(np.eye(2)), [a, b]).tolist() == [a, b]


def test_apply_affine_dimension_mismatch():
    with pytest.raises(ValueError, match="length 1"):
        apply_affine(DIAG, [1.0, 2.0])


def test_affine_map_validation():
    with pytest.raises(ValueError):
        AffineMap([[1.0, 0.0]], [0.0, 1.0])
    f = affine_from_dict({"L": [[1], [1]], "p": [0, 1]})
    assert (f.m, f.n, f.is_linear) == (2, 1, False)
    assert affine_from_dict(f.to_dict()).L.tolist() == f.L.tolist()
    with pytest.raises(ValueError):
        affine_from_dict({"p": [0]})


def test_duplication_copies_bits():
    f = AffineMap.duplication([2, 0, 2], 3)
    x = np.array([0.1, 1e-300, -np.pi])
    assert f(x).tobytes() == np.array([-np.pi, 0.1, -np.pi]).tobytes()


def test_parse_field_examples():
    assert parse_field(["-3*x1"], 1)([2.0]).tolist() == [-6.0]
    Y = parse_field(["-x1 - 2*x2 + (x1 - x2)*x1^3", "-2*x1 - x2"], 2)
    assert Y([1.0, 1.0]).tolist() == [-3.0, -3.0]
    with pytest.raises(EvaluationError, match="division by zero"):
        # padded to dim 3 so the component count matches
        parse_field(["sin(x1)*x2/x3", "0", "0"], 3)([1.0, 1.0, 0.0])


def test_parse_field_errors():
    with pytest.raises(ValueError, match="1 component expressions for dimension 2"):
        parse_field(["x1"], 2)
    with pytest.raises(ExpressionSyntaxError):
        parse_field(["x1", "x3"], 2)
    with pytest.raises(ExpressionSyntaxError, match="unknown function"):
        parse_field(["log(x1)"], 1)


def test_field_checks_input_shape():
    X = parse_field(["x1", "x2"], 2)
    with pytest.raises(ValueError):
        X([1.0])


def test_field_from_dict():
    X = field_from_dict({"dim": 1, "components": ["-3*x1"]})
    assert X([1.0]).tolist() == [-3.0]
    with pytest.raises(ValueError):
        field_from_dict({"components": ["x1"]})


def test_python_field_overflow_maps_to_evaluation_error():
    X = VectorField(1, lambda xs: [1.0 / xs[0]])
    with pytest.raises(EvaluationError):
        X([0.0])


def test_continuous_residual_examples(zero2):
    X = parse_field(["-3*x1"], 1)
    Y = parse_field(["-x1 - 2*x2 + (x1 - x2)*x1^3", "-2*x1 - x2"], 2)
    assert continuous_residual(DIAG, X, Y, [0.7]) == 0.0

    X5 = linear_field([[0, -1], [-1, 0]])
    Y5 = linear_field([[1, 0], [0, -1]])
    assert continuous_residual(AffineMap.linear([[1, -1], [1, 1]]), X5, Y5, [1.0, 0.0]) == 0.0

    rand = AffineMap.linear([[0.3, -2.0], [5.0, 1e-3]])
    assert continuous_residual(rand, zero2, zero2, [0.4, -9.0]) == 0.0


def test_continuous_residual_detects_unrelated_pair():
    X = linear_field([[0, -1], [1, 0]])
    Y = linear_field([[1, 0], [0, -1]])
    # Y(Ax) - A X(x) at (1, 0) = (1, -1) - (-1, 1)
    assert continuous_residual(AffineMap.linear([[1, -1], [1, 1]]), X, Y, [1.0, 0.0]) == 4.0


def test_continuous_residual_dimension_check():
    X = parse_field(["x1"], 1)
    with pytest.raises(ValueError, match="does not fit"):
        continuous_residual(DIAG, X, X, [1.0])


def test_linear_field_row_order():
    M = [[1.0, 1e16, -1e16], [0, 0, 0], [0, 0, 0]]
    # left-to-right: (1 + 1e16) - 1e16 == 0 in doubles
    assert linear_field(M)([1.0, 1.0, 1.0]).tolist() == [0.0, 0.0, 0.0]
    with pytest.raises(ValueError, match="square"):
        linear_field([[1.0, 2.0]])


vec = st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=2).map(np.array)


@settings(max_examples=100, deadline=None)
@given(vec, vec, st.floats(-10, 10))
def test_linear_part_is_linear_on_exact_inputs(u, v, c):
    f = AffineMap.duplication([1, 0, 1], 2, p=[1.0, 2.0, 3.0])
    assert np.array_equal(f.linear_part(u + v), f.linear_part(u) + f.linear_part(v))
    assert np.array_equal(f.linear_part(c * u), c * f.linear_part(u))
    assert np.array_equal(f(u), f.linear_part(u) + f.p)


def test_l1():
    assert l1([1.0, -2.0, 0.5]) == 3.5
    assert l1(np.zeros(0)) == 0.0
