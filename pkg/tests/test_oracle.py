import numpy as np
import pytest

from sscnet.errors import BudgetError, ShapeError
from sscnet.generate import random_network
from sscnet.graph import full_row_rank, is_independent
from sscnet.network import REDUCED, StructuredNetwork, is_controllable
from sscnet.node import NodeSystem
from sscnet.oracle import (
    EnumerationGrid,
    SampleConfig,
    class_size,
    closed_loop,
    enumerate_class,
    exact_rank,
    falsify_full_row_rank,
    grid_full_row_rank,
    kalman_controllable,
    kalman_matrix,
    network_numeric_check,
    numeric_rank,
    oracle_independent,
    pbh_controllable,
    replay_witness,
    sample,
    sample_network,
    witness_realization,
)
from sscnet.pattern import PatternMatrix, membership


def pm(*rows):
    return PatternMatrix.from_rows(rows)


def test_config_validation():
    with pytest.raises(ValueError):
        SampleConfig(star_range=(0.0, 1.0))
    with pytest.raises(ValueError):
        SampleConfig(quest_zero_probability=1.5)
    with pytest.raises(ValueError):
        SampleConfig(rank_tolerance=0)
    with pytest.raises(ValueError):
        EnumerationGrid(star_values=(0, 1))
    with pytest.raises(ValueError):
        EnumerationGrid(quest_values=(1, 2))


def test_sample_examples(example_net):
    cfg = SampleConfig(seed=3)
    assert sample(pm("0"), cfg, 0).tolist() == [[0.0]]
    values = [sample(pm("*"), cfg, t)[0, 0] for t in range(500)]
    assert min(abs(v) for v in values) >= 0.1
    assert any(v < 0 for v in values) and any(v > 0 for v in values)
    for t in range(1000):
        assert membership(example_net.W, sample(example_net.W, cfg, t))
    np.testing.assert_array_equal(sample(example_net.W, cfg, 7), sample(example_net.W, cfg, 7))
    assert not np.array_equal(sample(example_net.W, cfg, 7), sample(example_net.W, cfg, 8))


def test_quest_zero_branch_is_exercised():
    cfg = SampleConfig(seed=1)
    draws = np.array([sample(pm("?"), cfg, t)[0, 0] for t in range(2000)])
    frac = (draws == 0).mean()
    assert 0.25 < frac < 0.35
    assert (np.abs(draws[draws != 0]) >= 0.1).all()


def test_enumerate_examples():
    assert len(list(enumerate_class(pm("*")))) == 4
    quest = list(enumerate_class(pm("?")))
    assert len(quest) == 3 and any(not x.any() for x in quest)
    both = list(enumerate_class(pm("* ?")))
    assert len(both) == 12 == class_size(pm("* ?"), EnumerationGrid())
    assert len({x.tobytes() for x in both}) == 12
    assert all(membership(pm("* ?"), x) for x in both)
    with pytest.raises(BudgetError) as err:
        list(enumerate_class(pm("* * * * * * * * * * *")))
    assert err.value.count == 4**11


def test_numeric_rank_examples():
    assert numeric_rank(np.eye(3)) == 3
    assert numeric_rank([[1, 2], [2, 4]]) == 1
    assert numeric_rank([[0]]) == 0
    assert numeric_rank(np.zeros((0, 3))) == 0
    assert exact_rank([[1, 2], [2, 4]]) == 1
    with pytest.raises(ValueError):
        numeric_rank(np.eye(2), tol=0)


def test_kalman_and_pbh_examples():
    a, b = np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0], [1.0]])
    assert kalman_controllable(a, b) and pbh_controllable(a, b)
    a, b = np.eye(2), np.array([[1.0], [0.0]])
    assert not kalman_controllable(a, b) and not pbh_controllable(a, b)
    a = np.diag([1.0, 2.0, 3.0, 4.0])
    a[0, 1] = 1.0
    b = np.array([[0.0], [1.0], [0.0], [0.0]])
    assert not kalman_controllable(a, b) and not pbh_controllable(a, b)
    assert np.linalg.matrix_rank(kalman_matrix(a, b)) == 2
    with pytest.raises(ShapeError):
        kalman_controllable(np.zeros((2, 3)), np.zeros((2, 1)))
    with pytest.raises(ShapeError):
        pbh_controllable(np.eye(2), np.zeros((3, 1)))


def test_kalman_handles_large_powers():
    # companion form with roots 1..8: raw Krylov powers reach 8^7, still controllable.
    # PBH is not asked here: eigenvalues of companion matrices are too ill-conditioned
    n = 8
    coeffs = np.poly(np.arange(1, n + 1))
    a = np.zeros((n, n))
    a[:-1, 1:] = np.eye(n - 1)
    a[-1] = -coeffs[:0:-1]
    b = np.zeros((n, 1))
    b[-1] = 1.0
    assert kalman_controllable(a, b)


def test_kalman_pbh_agree_on_random_instances():
    rng = np.random.default_rng(2024)
    disagreements = 0
    for _ in range(1000):
        a = rng.normal(size=(4, 4))
        b = rng.normal(size=(4, 1))
        if rng.random() < 0.3:
            # make it uncontrollable: a decoupled mode b does not touch
            a[3, :3] = 0.0
            b[3] = 0.0
        disagreements += kalman_controllable(a, b) != pbh_controllable(a, b)
    assert disagreements <= 1


def test_falsify_examples(rng):
    assert falsify_full_row_rank(pm("?")).tolist() == [[0]]
    assert falsify_full_row_rank(pm("* 0", "0 *")) is None
    for _ in range(300):
        p, q = rng.integers(1, 4, 2)
        m = PatternMatrix(rng.choice(3, size=(p, q), p=(0.4, 0.4, 0.2)).astype(np.int8))
        x = falsify_full_row_rank(m)
        if full_row_rank(m):
            assert x is None
        else:
            assert x is not None and membership(m, x) and exact_rank(x) < p


def test_falsify_random_search_beyond_budget():
    m = pm("* * * *", "* * * *")
    x = falsify_full_row_rank(m, budget=10, seed=0)
    assert x is not None and membership(m, x) and exact_rank(x) < 2


def test_grid_oracles_match_structural_tests(rng):
    for _ in range(1000):
        p, q = rng.integers(1, 4), rng.integers(1, 5)
        m = PatternMatrix(rng.choice(3, size=(p, q), p=(0.4, 0.4, 0.2)).astype(np.int8))
        assert grid_full_row_rank(m, budget=10**7) == full_row_rank(m)
    checked = 0
    while checked < 2000:
        q, r = int(rng.integers(1, 5)), int(rng.integers(0, 4))
        row = PatternMatrix(rng.choice(3, size=(1, q), p=(0.4, 0.4, 0.2)).astype(np.int8))
        rest = PatternMatrix(rng.choice(3, size=(r, q), p=(0.4, 0.4, 0.2)).astype(np.int8))
        if class_size(row, EnumerationGrid()) * class_size(rest, EnumerationGrid()) > 10**6:
            continue
        assert oracle_independent(row, rest) == is_independent(row, rest)
        checked += 1


def test_oracle_independent_examples():
    assert oracle_independent(pm("* 0"), pm("0 *"))
    assert not oracle_independent(pm("? 0"), pm("0 *"))
    with pytest.raises(ShapeError):
        oracle_independent(pm("* 0", "0 *"), pm("0 *"))


def test_network_check_example(example_net):
    cfg = SampleConfig(seed=11, trials=1000)
    summary = network_numeric_check(example_net, cfg)
    assert summary["passes"] == summary["trials"] == 1000
    assert summary["first_failure_seed"] is None
    assert summary["pbh_runs"] == 0
    assert network_numeric_check(example_net, SampleConfig(seed=11, trials=20)) == network_numeric_check(
        example_net, SampleConfig(seed=11, trials=20))


def test_network_check_single_integrator():
    net = StructuredNetwork((NodeSystem.from_strings(["0"], ["*"], ["*"]),), pm("0"), pm("*"))
    summary = network_numeric_check(net, SampleConfig(trials=100))
    assert summary["passes"] == 100 and summary["pbh_runs"] == 100 and summary["pbh_disagreements"] == 0


def test_network_check_reports_failures():
    # an uncontrollable network: the input reaches no state
    net = StructuredNetwork((NodeSystem.from_strings(["?"], ["*"], ["*"]),), pm("0"), pm("0"))
    summary = network_numeric_check(net, SampleConfig(seed=5, trials=50))
    assert summary["failures"] == 50 and summary["first_failure_seed"] == [5, 0]


def test_sampled_network_members(example_net):
    cfg = SampleConfig(seed=2)
    mats = sample_network(example_net, cfg, 4)
    for node, (a, b, c) in zip(example_net.nodes, mats["nodes"]):
        assert membership(node.A, a) and membership(node.B, b) and membership(node.C, c)
    a, bh = closed_loop(example_net, mats)
    assert a.shape == (28, 28) and bh.shape == (28, 4)


def test_witness_replay_random_networks():
    rng = np.random.default_rng(77)
    replayed = 0
    for _ in range(150):
        net = random_network(rng)
        v = is_controllable(net)
        if v.controllable:
            continue
        for witness in (v.witness, is_controllable(net, REDUCED).witness, None):
            out = replay_witness(net, witness)
            assert not out["kalman_controllable"]
            assert out["residual"] < 1e-9
            mats = out["realization"]
            for node, (a, b, c) in zip(net.nodes, mats["nodes"]):
                assert membership(node.A, a) and membership(node.B, b) and membership(node.C, c)
            assert membership(net.W, mats["W"]) and membership(net.H, mats["H"])
        replayed += 1
    assert replayed > 50


def test_witness_realization_refuses_controllable(example_net):
    with pytest.raises(ValueError):
        witness_realization(example_net)
