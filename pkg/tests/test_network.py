import numpy as np
import pytest
from hypothesis import given, strategies as st

from circumnav.errors import ConfigError, TopologyError
from circumnav.network import FaultSchedule, RingTopology, exchange, incidence_ring

PX = [10.0, 0.0, -10.0, 0.0]
PY = [0.0, 10.0, 0.0, -10.0]
DB = [0.5, -0.25, 0.0, 1.0]


def test_ring_successor():
    topo = RingTopology(4)
    assert [topo.successor(i) for i in range(4)] == [1, 2, 3, 0]
    with pytest.raises(TopologyError):
        RingTopology(2)


def test_transparent_exchange():
    views = exchange(PX, PY, DB, RingTopology(4), FaultSchedule(), 0.0)
    for i, v in enumerate(views):
        assert v.shared.px == tuple(PX) and v.shared.d_b == tuple(DB)
        assert all(v.shared.valid)
        assert v.successor == (i + 1) % 4
        assert v.successor_p == (PX[(i + 1) % 4], PY[(i + 1) % 4])
    assert sum(views[0].shared.d_b) == sum(DB)


def test_fault_lookup():
    faults = FaultSchedule(((1, 10.0, 20.0),))
    views = exchange(PX, PY, DB, RingTopology(4), faults, 15.0)
    assert all(v.shared.valid == (True, False, True, True) for v in views)
    px, py, d = views[0].shared.valid_arrays()
    assert len(px) == 3 and d == [0.5, 0.0, 1.0]
    assert not views[1].own_valid
    # intervals are closed
    assert faults.faulty_at(10.0) == faults.faulty_at(20.0) == {1}
    assert faults.faulty_at(20.000001) == frozenset()


def test_noise_is_deterministic_and_bounded():
    faults = FaultSchedule(noise=0.1, seed=3)
    a = exchange(PX, PY, DB, RingTopology(4), faults, 1.0, step=5)
    b = exchange(PX, PY, DB, RingTopology(4), faults, 1.0, step=5)
    c = exchange(PX, PY, DB, RingTopology(4), faults, 1.0, step=6)
    assert a[0].shared == b[0].shared
    assert a[0].shared.d_b != c[0].shared.d_b
    diff = np.array(a[0].shared.d_b) - np.array(DB)
    assert np.all(np.abs(diff) <= 0.1) and np.any(diff != 0)
    assert len({v.shared for v in a}) == 1


def test_exchange_length_mismatch():
    with pytest.raises(TopologyError):
        exchange(PX[:3], PY[:3], DB[:3], RingTopology(4), FaultSchedule(), 0.0)


def test_schedule_check():
    FaultSchedule(((0, 0, 5), (1, 6, 9))).check(4, range(10))
    with pytest.raises(ConfigError):
        FaultSchedule(((0, 0, 5), (1, 3, 9))).check(4, range(10))
    with pytest.raises(ConfigError):
        FaultSchedule(((4, 0, 5),)).check(4, range(10))
    with pytest.raises(ConfigError):
        FaultSchedule(((0, 5, 1),))
    with pytest.raises(ConfigError):
        FaultSchedule(noise=-1.0)


def test_incidence_n3():
    assert incidence_ring(3).tolist() == [[1, -1, 0], [0, 1, -1], [-1, 0, 1]]
    with pytest.raises(TopologyError):
        incidence_ring(1)


@pytest.mark.parametrize("n", range(2, 13))
def test_incidence_laplacian(n):
    bt = incidence_ring(n)
    assert np.all(bt.sum(axis=1) == 0)
    assert np.all(bt @ np.ones(n) == 0)
    assert np.all(np.ones(n) @ bt == 0)  # column sums: sum(beta) is conserved
    ev = np.linalg.eigvals(bt)
    zero = np.abs(ev) < 1e-9
    assert zero.sum() == 1
    assert np.all(ev[~zero].real > 0)
    # Gershgorin: every disc is centred at 1 with radius 1
    assert np.all(np.abs(ev - 1) <= 1 + 1e-12)


@pytest.mark.parametrize("n", range(2, 9))
def test_incidence_single_zero_eigenvalue_exact(n):
    # det(B^T) = 0 and the (n-1) leading minor is 1, so 0 is a simple root
    bt = incidence_ring(n)
    assert abs(np.linalg.det(bt)) < 1e-12
    assert np.linalg.det(bt[:-1, :-1]) == pytest.approx(1.0)


@given(st.lists(st.floats(0, 10), min_size=3, max_size=10))
def test_consensus_flow_conserves_sum(beta):
    b = np.array(beta)
    rate = -incidence_ring(len(b)) @ b
    assert abs(rate.sum()) <= 1e-12 * max(1.0, b.sum())
