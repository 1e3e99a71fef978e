import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signed_dynamics import InvalidMatrix, InvalidParameter, Schedule, SignedMatrix, epsilon_skeleton, laplacian, validate
from signed_dynamics.signed_graph import WEIGHT_CAP, gauge, window_integral

from conftest import ANTAGONISTIC, EXAMPLE1, T0, example2_schedule, schedules, signed_matrices


def laplacian_oracle(a):
    n = len(a)
    out = np.empty((n, n))
    for j in range(n):
        for k in range(n):
            out[j, k] = sum(abs(a[j][m]) for m in range(n)) if j == k else -a[j][k]
    return out


class TestLaplacian:
    def test_empty_graph(self):
        assert np.array_equal(laplacian(np.zeros((3, 3))), np.zeros((3, 3)))

    def test_antagonistic_pair(self):
        assert np.array_equal(laplacian(ANTAGONISTIC), [[1, 1], [1, 1]])

    def test_example1_row_and_kernel(self):
        L = laplacian(EXAMPLE1)
        assert np.array_equal(L[2], [-1, -1, 2])
        assert np.array_equal(L @ [1, -1, 0], [0, 0, 0])

    @given(signed_matrices(max_n=8))
    def test_matches_elementwise_oracle(self, a):
        assert np.allclose(laplacian(a), laplacian_oracle(a), rtol=0, atol=1e-12)

    @given(signed_matrices(max_n=8), st.data())
    def test_gauge_identity(self, a, data):
        d = np.array(data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=len(a), max_size=len(a))))
        D = np.diag(d)
        assert np.array_equal(laplacian(gauge(d, a)), D @ laplacian(a) @ D)

    @settings(max_examples=100)
    @given(signed_matrices(max_n=12, max_abs=10.0))
    def test_gershgorin_right_half_plane(self, a):
        lam = np.linalg.eigvals(laplacian(a))
        nonzero = np.abs(lam) > 1e-9
        assert np.all(lam.real[nonzero] > -1e-9)


class TestSkeleton:
    def test_threshold_semantics(self):
        s = epsilon_skeleton([[0, 0.5], [-2, 0]], 1.0)
        assert np.array_equal(s.entries, [[0, 0], [-2, 0]])

    def test_large_eps_clears_everything(self):
        assert not epsilon_skeleton(EXAMPLE1, 1.5).entries.any()

    @pytest.mark.parametrize("eps", [0.0, -1.0])
    def test_rejects_nonpositive_eps(self, eps):
        with pytest.raises(InvalidParameter):
            epsilon_skeleton(EXAMPLE1, eps)

    @given(signed_matrices(), st.floats(0.01, 5))
    def test_idempotent(self, a, eps):
        once = epsilon_skeleton(a, eps)
        assert once == epsilon_skeleton(once, eps)

    def test_example2_two_period_window(self):
        w = window_integral(example2_schedule(), 0.0, 2 * T0)
        s = epsilon_skeleton(w, T0)
        for j, k in [(0, 1), (1, 0), (2, 0), (2, 1)]:
            assert s.entries[j, k] != 0
        assert np.count_nonzero(s.entries) == 4


class TestValidate:
    def test_diagonal(self):
        rep = validate([[1, 0], [0, 0]])
        assert rep.diagonal == [0] and not rep.ok

    def test_digon_flag(self):
        assert validate([[0, 1], [-1, 0]]).ok
        assert validate([[0, 1], [-1, 0]], require_digon_symmetry=True).digon == [(0, 1)]

    def test_example1_clean(self):
        assert validate(EXAMPLE1, require_digon_symmetry=True).ok

    def test_non_finite_and_cap(self):
        rep = validate([[0, np.inf], [2 * WEIGHT_CAP, 0]])
        assert rep.non_finite == [(0, 1)] and rep.too_large == [(1, 0)]

    def test_constructor_raises_with_report(self):
        with pytest.raises(InvalidMatrix) as err:
            SignedMatrix([[0, np.nan], [0, 0]])
        assert err.value.report.non_finite == [(0, 1)]

    def test_immutable(self):
        m = SignedMatrix(EXAMPLE1)
        with pytest.raises(ValueError):
            m.entries[0, 1] = 3.0


class TestSchedule:
    def test_must_start_at_zero(self):
        with pytest.raises(InvalidParameter):
            Schedule([(0.5, 1.0, EXAMPLE1)])

    def test_gap_rejected(self):
        with pytest.raises(InvalidParameter):
            Schedule([(0.0, 1.0, EXAMPLE1), (1.5, 2.0, EXAMPLE1)])

    def test_period_must_match_span(self):
        with pytest.raises(InvalidParameter):
            Schedule([(0.0, 1.0, EXAMPLE1)], period=2.0)

    def test_hold_last_matrix(self):
        s = Schedule([(0.0, 1.0, ANTAGONISTIC), (1.0, 2.0, -ANTAGONISTIC)])
        assert np.array_equal(s.matrix_at(50.0).entries, -ANTAGONISTIC)

    def test_periodic_lookup(self, example2):
        assert example2.matrix_at(2 * T0 + 0.1).entries[2, 0] == 1
        assert example2.matrix_at(3 * T0 + 0.1).entries[2, 1] == 1

    @given(schedules())
    def test_dict_round_trip(self, s):
        again = Schedule.from_dict(s.to_dict())
        assert again.to_dict() == s.to_dict()


class TestWindowIntegral:
    def test_constant(self):
        s = Schedule.constant(EXAMPLE1)
        assert np.allclose(window_integral(s, 0.3, 2.5), 2.5 * np.abs(EXAMPLE1))

    def test_example2_windows(self, example2):
        one = window_integral(example2, 0.0, T0)
        assert one[2, 0] == pytest.approx(T0) and one[2, 1] == 0
        two = window_integral(example2, 0.0, 2 * T0)
        assert two[2, 0] == pytest.approx(T0) and two[2, 1] == pytest.approx(T0)

    @given(schedules(), st.floats(0, 4), st.floats(0.01, 3), st.floats(0.01, 3))
    def test_additive(self, s, t, t1, t2):
        whole = window_integral(s, t, t1 + t2)
        parts = window_integral(s, t, t1) + window_integral(s, t + t1, t2)
        assert np.allclose(whole, parts, rtol=1e-12, atol=1e-12)
        assert np.all(whole >= 0)
