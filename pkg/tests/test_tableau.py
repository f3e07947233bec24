import json

import numpy as np
import pytest

from rkrelate.errors import TableauError
from rkrelate.tableau import BUILTIN_NAMES, ButcherTableau, builtin, describe_builtins, from_dict, load, validate

EXPECTED_KIND = {
    "euler": "explicit",
    "heun": "explicit",
    "rk4": "explicit",
    "implicit-midpoint": "implicit",
    "gauss2": "implicit",
}


def test_rk4_matches_printed_tableau():
    t = builtin("rk4")
    assert t.A.tolist() == [[0, 0, 0, 0], [0.5, 0, 0, 0], [0, 0.5, 0, 0], [0, 0, 1, 0]]
    assert t.b.tolist() == [1 / 6, 1 / 3, 1 / 3, 1 / 6]
    report = validate(t)
    assert report.valid and report.kind == "explicit"
    assert report.weight_sum == pytest.approx(1.0, abs=1e-15)
    assert report.warnings == []


def test_euler_and_implicit_midpoint():
    e = builtin("euler")
    assert (e.s, e.A.tolist(), e.b.tolist()) == (1, [[0.0]], [1.0])
    assert validate(e).kind == "explicit"
    m = builtin("implicit-midpoint")
    assert (m.s, m.A.tolist(), m.b.tolist()) == (1, [[0.5]], [1.0])
    assert validate(m).kind == "implicit"


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtins_validate_with_expected_class(name):
    t = builtin(name)
    report = validate(t)
    assert report.valid
    assert report.kind == EXPECTED_KIND[name]


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_classification_survives_serialization(name):
    t = builtin(name)
    again = from_dict(json.loads(t.to_json()))
    assert again == t
    assert again.kind == t.kind


def test_gauss2_rows():
    g = builtin("gauss2")
    # row sums are the Gauss-Legendre nodes 1/2 -+ sqrt(3)/6
    assert g.A.sum(axis=1) == pytest.approx([0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6])


def test_unknown_name_lists_available():
    with pytest.raises(TableauError, match="rk4"):
        builtin("dopri5")


def test_dimension_mismatch_is_invalid():
    t = ButcherTableau([[0, 0], [1, 0]], [1.0])
    report = validate(t)
    assert not report.valid
    assert "shape" in report.errors[0]
    with pytest.raises(TableauError):
        validate(t, strict=True)


def test_weight_sum_warning_is_not_fatal():
    t = ButcherTableau([[0.0]], [0.5])
    report = validate(t)
    assert report.valid
    assert report.kind == "explicit"
    assert len(report.warnings) == 1


def test_strictly_lower_triangular_is_explicit_diagonal_is_not():
    assert ButcherTableau([[0, 0], [3, 0]], [0.5, 0.5]).explicit
    assert not ButcherTableau([[0, 0], [3, 1e-300]], [0.5, 0.5]).explicit
    assert not ButcherTableau([[0, 1], [0, 0]], [0.5, 0.5]).explicit


def test_load_forms():
    assert load("rk4") == builtin("rk4")
    assert load('{"s": 1, "A": [[0.5]], "b": [1]}').kind == "implicit"
    with pytest.raises(TableauError, match='"s" is 2'):
        load({"s": 2, "A": [[0.5]], "b": [1]})
    with pytest.raises(TableauError):
        load({"A": [[0.5]]})


def test_tableau_is_read_only():
    t = builtin("rk4")
    with pytest.raises(ValueError):
        t.A[0, 0] = 1.0


def test_describe_builtins_order_and_format():
    lines = describe_builtins()
    assert "rk4 s=4 explicit" in lines
    assert "implicit-midpoint s=1 implicit" in lines
    assert lines == describe_builtins()
    assert [line.split()[0] for line in lines] == list(BUILTIN_NAMES)
