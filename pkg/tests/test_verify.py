import itertools
import numpy as np
import pytest

from qexpander.errors import DomainError
from qexpander.generators import complete_graph, cycle_graph, random_channel
from qexpander.verify import (CheckResult, _Tracker, attained_conjugated_norm, check_classical_eml,
                              check_eml, discrepancy, inequality_suite, random_projection_pairs,
                              suite_passed, suite_to_json)
from qexpander.witness import mixing_witnesses


def subsets(n):
    for r in range(1, n + 1):
        yield from itertools.combinations(range(n), r)


def test_discrepancy_examples(identity2, pauli):
    p = np.diag([1.0, 0.0])
    assert discrepancy(identity2, p, p) == pytest.approx((0.5, 0.5))
    for p1, p2 in random_projection_pairs(2, 10, 3):
        assert discrepancy(pauli, p1, p2)[0] <= 1e-10
    T = random_channel(4, 3, 1)
    assert discrepancy(T, np.eye(4), np.eye(4))[0] == pytest.approx(0, abs=1e-12)
    with pytest.raises(DomainError):
        discrepancy(T, np.zeros((4, 4)), np.eye(4))


def test_check_eml_random_pairs():
    T = random_channel(6, 3, 13)
    res = check_eml(T, random_projection_pairs(6, 100, 13))
    assert res.passed and res.trials == 100


def test_check_eml_on_witness_pair_and_full_projection():
    T = random_channel(4, 3, 5)
    rep = mixing_witnesses(T)
    assert check_eml(T, [(rep.P1, rep.P2)]).passed
    p1 = random_projection_pairs(4, 1, 0)[0][0]
    assert discrepancy(T, p1, np.eye(4))[1] == pytest.approx(0, abs=1e-12)


def test_check_eml_reports_violation_with_replay():
    T = random_channel(3, 2, 2)
    res = check_eml(T, random_projection_pairs(3, 5, 1), rho=0.0)
    assert not res.passed
    assert res.worst_margin < 0
    assert res.replay["channel"]["dim"] == 3
    assert "replay" in res.to_dict()


def test_classical_eml_exhaustive():
    for g, count in ((complete_graph(4), 225), (cycle_graph(5), 31 ** 2)):
        pairs = [(a, b) for a in subsets(g.n) for b in subsets(g.n)]
        res = check_classical_eml(g, pairs)
        assert res.passed and res.trials == count
    # S1 = S2 = V has zero discrepancy, so the slack is the whole bound rho * n
    v = list(range(5))
    assert check_classical_eml(cycle_graph(5), [(v, v)]).worst_margin == pytest.approx(
        0.809017 * 5, abs=1e-5)


def test_tracker():
    tr = _Tracker("x", 1e-9, 4)
    tr.add(0.5)
    tr.add(-1e-10)
    assert tr.result().passed and tr.replay is None
    tr.add(-1.0, lambda: {"k": 1})
    r = tr.result()
    assert not r.passed and r.replay == {"k": 1} and r.trials == 3


def test_inequality_suite_small_run():
    results = inequality_suite(seed=3, trials=4)
    assert suite_passed(results)
    names = {r.check for r in results}
    assert {"gillespie", "schatten_holder", "adjoint_l2", "cptp_norms", "height_adjoint",
            "conjugated_map_upper", "conjugated_map_attain", "eml_forward",
            "bound_g_calibration", "restriction_invariance"} <= names
    for doc in suite_to_json(results):
        assert set(doc) == {"check", "trials", "worst_margin", "pass", "seed"}
    with pytest.raises(DomainError):
        inequality_suite(trials=0)


def test_suite_is_deterministic():
    a = suite_to_json(inequality_suite(seed=5, trials=2))
    b = suite_to_json(inequality_suite(seed=5, trials=2))
    assert a == b


def test_attainment_on_random_maps():
    from qexpander.channel import as_map, deflated_map, induced_norm
    for s in range(5):
        T = random_channel(2 + s, 3, s)
        for m in (as_map(T), deflated_map(T)):
            assert attained_conjugated_norm(m) == pytest.approx(induced_norm(m, 2), abs=1e-8)


def test_check_result_dict():
    r = CheckResult("a", 3, 0.1, True, 1)
    assert r.to_dict() == {"check": "a", "trials": 3, "worst_margin": 0.1, "pass": True, "seed": 1}
