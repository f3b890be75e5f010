import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from halpern_lp import (
    InvalidProblemError,
    Iterate,
    LpProblem,
    SparseMatrix,
    p_support,
    project_box,
    project_dual_cone,
)

INF = np.inf
finite = st.floats(-1e6, 1e6, allow_nan=False)


def bounds_pair(n):
    lo = arrays(np.float64, n, elements=st.one_of(finite, st.just(-INF)))
    width = arrays(np.float64, n, elements=st.one_of(st.floats(0, 1e6), st.just(INF)))
    return st.tuples(lo, width).map(_upper_from_width)


def _upper_from_width(pair):
    lo, width = pair
    hi = np.where(np.isinf(lo), 0.0, lo) + width
    return lo, hi


class TestProjectBox:
    def test_clamp(self):
        np.testing.assert_array_equal(project_box([2, -1], [0, 0], [1, INF]), [1, 0])

    def test_identity(self):
        np.testing.assert_array_equal(project_box([0.5], [-INF], [INF]), [0.5])

    def test_fixed(self):
        np.testing.assert_array_equal(project_box([3, -3, 0], [1, 1, 1], [1, 1, 1]), [1, 1, 1])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            project_box([1, 2], [0], [1])

    def test_crossed_bounds(self):
        with pytest.raises(InvalidProblemError):
            project_box([1.0], [2.0], [1.0])

    @settings(max_examples=200)
    @given(st.integers(1, 8).flatmap(lambda n: st.tuples(
        arrays(np.float64, n, elements=finite), arrays(np.float64, n, elements=finite),
        bounds_pair(n))))
    def test_idempotent_and_nonexpansive(self, data):
        v, w, (lo, hi) = data
        pv = project_box(v, lo, hi)
        np.testing.assert_array_equal(project_box(pv, lo, hi), pv)
        pw = project_box(w, lo, hi)
        assert np.linalg.norm(pv - pw) <= np.linalg.norm(v - w) * (1 + 1e-12) + 1e-12


class TestPSupport:
    def test_hand_value(self):
        # u'y+ = 3, l'y- = -2
        assert p_support([1, -2], [0, -1], [3, 5]) == 5.0

    def test_zero(self):
        assert p_support([0, 0], [-INF, 1], [INF, 2]) == 0.0

    def test_infinite(self):
        assert p_support([1.0], [0.0], [INF]) == INF

    def test_infinite_lower(self):
        assert p_support([-1.0], [-INF], [0.0]) == INF

    @given(st.integers(1, 6).flatmap(lambda n: st.tuples(
        arrays(np.float64, n, elements=st.floats(-1e3, 1e3)), bounds_pair(n))),
        st.floats(0, 100))
    def test_positive_homogeneity(self, data, alpha):
        y, (lo, hi) = data
        base = p_support(y, lo, hi)
        if np.isfinite(base) and alpha > 0:
            assert p_support(alpha * y, lo, hi) == pytest.approx(alpha * base, rel=1e-9, abs=1e-6)


class TestDualConeProjection:
    def make(self, lc, uc):
        return LpProblem.from_arrays([0.0], [[1.0]] * len(lc), [0.0], [INF], lc, uc)

    def test_lower_only(self):
        assert project_dual_cone([5.0], self.make([1.0], [INF]))[0] == -1.0

    def test_upper_only(self):
        assert project_dual_cone([-3.0], self.make([-INF], [2.0]))[0] == -2.0

    def test_interior(self):
        assert project_dual_cone([0.0], self.make([-1.0], [1.0]))[0] == 0.0


class TestSparseMatrix:
    def test_layouts_agree(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            m, n = rng.integers(1, 30, 2)
            dense = rng.standard_normal((m, n)) * (rng.random((m, n)) < 0.3)
            A = SparseMatrix(dense)
            x = rng.standard_normal(n)
            y = rng.standard_normal(m)
            np.testing.assert_allclose(A.matvec(x), dense @ x, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(A.rmatvec(y), dense.T @ y, rtol=1e-12, atol=1e-12)
            # row-major A x versus the transpose of the column-major layout
            np.testing.assert_allclose(A.matvec(x), A.csc.T.T @ x, rtol=1e-12)
            assert set(zip(*A.csr.nonzero())) == set(zip(*A.csc.nonzero()))

    def test_no_explicit_zeros_and_sorted(self):
        A = SparseMatrix(sp.csr_matrix((np.array([0.0, 2.0, 1.0]),
                                        (np.array([0, 0, 1]), np.array([1, 0, 0]))), shape=(2, 2)))
        assert A.nnz == 2
        assert np.all(A.csr.data != 0)
        for i in range(2):
            idx = A.csr.indices[A.csr.indptr[i]:A.csr.indptr[i + 1]]
            assert np.all(np.diff(idx) > 0)

    def test_empty(self):
        A = SparseMatrix(np.zeros((0, 3)), shape=(0, 3))
        assert A.shape == (0, 3)
        assert A.matvec(np.ones(3)).shape == (0,)
        np.testing.assert_array_equal(A.rmatvec(np.zeros(0)), np.zeros(3))

    def test_product_counter(self):
        A = SparseMatrix(np.eye(2))
        A.matvec(np.ones(2))
        A.rmatvec(np.ones(2))
        assert A.products == 2


class TestLpProblem:
    def test_maximize_normalized(self):
        p = LpProblem.from_arrays([1.0, -2.0], [[1.0, 1.0]], [0, 0], [1, 1], [0], [1],
                                  objective_offset=3.0, maximize=True)
        np.testing.assert_array_equal(p.c, [-1.0, 2.0])
        assert p.objective_offset == -3.0
        assert p.objective(np.array([1.0, 0.0])) == 4.0

    @pytest.mark.parametrize("kw", [
        dict(var_lower=[2.0], var_upper=[1.0]),
        dict(con_lower=[3.0], con_upper=[1.0]),
        dict(c=[np.nan]),
        dict(var_lower=[INF], var_upper=[INF]),
    ])
    def test_invalid(self, kw):
        base = dict(c=[1.0], A=[[1.0]], var_lower=[0.0], var_upper=[INF], con_lower=[0.0],
                    con_upper=[INF])
        base.update(kw)
        with pytest.raises(InvalidProblemError):
            LpProblem(**base)

    def test_length_mismatch(self):
        with pytest.raises(InvalidProblemError):
            LpProblem.from_arrays([1.0, 2.0], [[1.0]], [0.0], [1.0], [0.0], [1.0])

    def test_vectors_immutable(self):
        p = LpProblem.from_arrays([1.0], [[1.0]], [0.0], [1.0], [0.0], [1.0])
        with pytest.raises(ValueError):
            p.c[0] = 2.0

    def test_iterate_cache_matches_recomputation(self):
        A = SparseMatrix(np.array([[1.0, 2.0], [0.0, 3.0]]))
        z = Iterate.with_products([1.0, -1.0], [2.0, 0.5], A)
        np.testing.assert_array_equal(z.ax, A.toarray() @ z.x)
        np.testing.assert_array_equal(z.aty, A.toarray().T @ z.y)
