import math

import numpy as np
import pytest

from rkrelate.errors import NetworkError
from rkrelate.network import (
    CellType,
    Fibration,
    Network,
    Partition,
    assemble,
    balance_violation,
    fibration_from_dict,
    induced_map,
    is_balanced,
    network_from_dict,
    projection_fibration,
    quotient,
    validate_fibration,
)
from rkrelate.relatedness import discrete_residual
from rkrelate.systems import EX3_DEFAULTS, ex3_networks
from rkrelate.tableau import builtin
from rkrelate.vecfield import continuous_residual

F = ex3_networks(**EX3_DEFAULTS)
G, H = F.source, F.target


def test_example_fibration_validates():
    report = validate_fibration(F)
    assert report.valid and bool(report)
    assert str(report) == "valid fibration"


def test_induced_map_duplicates_first_cell():
    f = induced_map(F)
    assert f.L.tolist() == [[1, 0, 0], [1, 0, 0], [0, 1, 0]]
    assert f([1.5, -2.0, 9.0]).tolist() == [1.5, 1.5, -2.0]
    assert f.is_linear


def test_identity_fibration():
    I = Fibration(G, G, (0, 1, 2))
    assert validate_fibration(I).valid
    assert induced_map(I).L.tolist() == np.eye(3).tolist()


def test_third_cell_to_third_is_rejected():
    bad = Fibration(G, H, (0, 0, 2))
    report = validate_fibration(bad)
    assert not report.valid
    assert report.offending_cells == [2]
    assert "'w2'" in str(report) and "'w3'" in str(report)
    with pytest.raises(NetworkError, match="not a fibration"):
        induced_map(bad)


def test_psi_out_of_range_and_wrong_length():
    assert validate_fibration(Fibration(G, H, (0, 0, 5))).offending_cells == [2]
    assert not validate_fibration(Fibration(G, H, (0, 0))).valid


def test_slot_violation_names_slot_and_flags_permutation():
    types = (CellType("A", 1, 0, ("-x1",)), CellType("B", 1, 2, ("x2 - x3",)))
    src = Network(types, ("A", "A", "B"), ((), (), (0, 1)))
    tgt = Network(types, ("A", "A", "B"), ((), (), (1, 0)))
    report = validate_fibration(Fibration(src, tgt, (0, 1, 2)))
    assert [(v.cell, v.slot) for v in report.violations] == [(2, 0), (2, 1)]
    assert report.permutation_tolerant_would_pass
    assert "permutation" in str(report)


def test_type_violation_is_not_permutation_tolerant():
    assert not validate_fibration(Fibration(G, H, (0, 0, 2))).permutation_tolerant_would_pass


def test_assembled_fields_at_example_points():
    X, Y = assemble(G), assemble(H)
    assert X([1.0, 2.0, 3.0]).tolist() == [1.0, math.sin(1.0) / 2.0, 6.0]
    y = Y([1.0, 1.0, 3.0])
    assert y[0] == y[1] == 1.0


def test_assembled_pair_related_bit_exactly():
    X, Y, f = assemble(G), assemble(H), induced_map(F)
    rng = np.random.default_rng(11)
    for x in rng.uniform(0.2, 2.0, size=(50, 3)):
        assert continuous_residual(f, X, Y, x) == 0.0
        assert discrete_residual(f, X, Y, builtin("rk4"), 0.01, x) == 0.0


def test_multidimensional_cells():
    osc = CellType("osc", 2, 1, ("x2", "-x1 + 0.1*(x3 - x1)"))
    net = Network((osc,), ("osc", "osc"), ((1,), (0,)))
    assert net.offsets() == [0, 2, 4]
    X = assemble(net)
    assert X([1.0, 0.0, 3.0, 0.0]).tolist() == [0.0, -1.0 + 0.1 * 2.0, 0.0, -3.0 + 0.1 * -2.0]
    Q, emb = quotient(net, Partition((0, 0)))
    assert Q.size == 1 and Q.inputs == ((0,),)
    assert emb([0.5, -0.25]).tolist() == [0.5, -0.25, 0.5, -0.25]
    assert continuous_residual(emb, assemble(Q), X, [0.5, -0.25]) == 0.0


def test_bad_networks():
    t = CellType("t", 1, 1, ("x2",))
    with pytest.raises(NetworkError, match="arity"):
        Network((t,), ("t",), ((),))
    with pytest.raises(NetworkError, match="no cell 3"):
        Network((t,), ("t",), ((3,),))
    with pytest.raises(NetworkError, match="unknown type"):
        Network((t,), ("u",), ((0,),))
    with pytest.raises(NetworkError, match="duplicate"):
        Network((t, t), ("t",), ((0,),))
    with pytest.raises(NetworkError):
        CellType("bad", 2, 0, ("x1",))


def test_assemble_rejects_extra_variables():
    t = CellType("t", 1, 0, ("x1 + x2",))
    with pytest.raises(NetworkError, match="x2"):
        assemble(Network((t,), ("t",), ((),)))


def test_dict_round_trip():
    again = network_from_dict(G.to_dict())
    assert again == G
    assert fibration_from_dict({"psi": [0, 0, 1]}, G, H) == F
    with pytest.raises(NetworkError):
        network_from_dict({"cells": []})
    with pytest.raises(NetworkError):
        fibration_from_dict({}, G, H)


# --- partitions ------------------------------------------------------------


def test_two_identical_uncoupled_cells():
    t = CellType("t", 1, 0, ("-x1",))
    net = Network((t,), ("t", "t"), ((), ()))
    Q, emb = quotient(net, Partition.from_groups([[0, 1]], 2))
    assert Q.size == 1
    assert emb([4.0]).tolist() == [4.0, 4.0]


def test_second_network_quotient():
    P = Partition.from_groups([[0, 1], [2]], 3)
    assert is_balanced(H, P)
    Q, emb = quotient(H, P)
    assert Q.cells == ("w1", "w2")
    assert Q.inputs == ((), (0, 0))
    # same as the first network restricted to its first two cells
    assert (Q.cells, Q.inputs) == (G.cells[:2], G.inputs[:2])
    assert emb.L.tolist() == [[1, 0], [1, 0], [0, 1]]
    assert emb([1.5, -2.0]).tolist() == [1.5, 1.5, -2.0]
    # embedding agrees with induced_map on the first two coordinates
    assert emb([1.5, -2.0]).tolist() == induced_map(F)([1.5, -2.0, 7.0]).tolist()


def test_quotient_matches_projection_fibration():
    for net, groups in [(H, [[0, 1], [2]]), (G, [[0], [1], [2]]), (H, [[0], [1], [2]])]:
        P = Partition.from_groups(groups, net.size)
        Q, emb = quotient(net, P)
        proj = projection_fibration(net, P, Q)
        assert validate_fibration(proj).valid
        assert induced_map(proj).L.tolist() == emb.L.tolist()
        assert projection_fibration(net, P) == proj


def test_unbalanced_partitions():
    P = Partition.from_groups([[0, 2], [1]], 3)
    assert balance_violation(H, P) == (0, 2, "types 'w1' and 'w2' differ")
    with pytest.raises(NetworkError, match="cells 0 and 2"):
        quotient(H, P)
    # same type, different input classes
    t = CellType("t", 1, 1, ("x2",))
    net = Network((t,), ("t", "t", "t"), ((0,), (2,), (2,)))
    bad = balance_violation(net, Partition.from_groups([[0, 1], [2]], 3))
    assert bad[:2] == (0, 1) and "input classes" in bad[2]


def test_partition_groups_validation():
    with pytest.raises(NetworkError, match="more than one"):
        Partition.from_groups([[0, 1], [1]], 2)
    with pytest.raises(NetworkError, match="no group"):
        Partition.from_groups([[0]], 2)
    with pytest.raises(NetworkError):
        balance_violation(H, Partition((0, 0)))


def test_partition_labels_any_hashable():
    P = Partition(("b", "b", "a"))
    assert P.class_index() == [0, 0, 1]
    assert quotient(H, P)[0].size == 2
