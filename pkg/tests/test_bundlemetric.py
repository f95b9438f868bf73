"""Tests for the induced bundle metric, splits, and adapted frame vectors."""

import numpy as np
import pytest

from tbcurv.basemanifold import adapted_frame, euclidean, hyperbolic, sphere
from tbcurv.bundlemetric import (
    BundlePoint,
    adapted_frame_vectors,
    connection_split,
    frame_gram,
    induced_metric,
    squared_norm,
)
from tbcurv.errors import ValidityError
from tbcurv.metricfamily import preset


class TestConnectionSplit:
    def test_euclidean_plain_split(self):
        M = euclidean(2)
        p = BundlePoint.of([0.1, 0.2], [1.0, -1.0])
        hor, ver = connection_split(M, p, np.array([1.0, 2.0, 3.0, 4.0]))
        assert np.array_equal(hor, [1.0, 2.0])
        assert np.array_equal(ver, [3.0, 4.0])

    def test_vertical_basis_vectors(self):
        M = sphere(2)
        p = BundlePoint.of([0.9, 0.3], [0.4, -0.2])
        for a in range(2):
            A = np.zeros(4)
            A[2 + a] = 1.0
            hor, ver = connection_split(M, p, A)
            assert np.array_equal(hor, np.zeros(2))
            expected = np.zeros(2)
            expected[a] = 1.0
            assert np.array_equal(ver, expected)

    def test_horizontal_lift_solves_vertical_equation(self):
        # A_v^a = -Gamma^a_bc v^b u^c makes K(A) = 0
        M = sphere(2)
        x = np.array([0.9, 0.3])
        v = np.array([0.4, -0.2])
        u = np.array([0.7, 0.5])
        gamma = M.christoffels(x)
        assert np.max(np.abs(gamma)) > 0.01  # the point genuinely curves
        A = np.concatenate([u, -np.einsum("abc,b,c->a", gamma, v, u)])
        hor, ver = connection_split(M, BundlePoint(x, v), A)
        assert np.array_equal(hor, u)
        assert np.max(np.abs(ver)) <= 1e-15


class TestInducedMetric:
    def test_sasaki_euclidean_identity(self):
        M = euclidean(3)
        fam = preset("sasaki")
        rng = np.random.default_rng(5)
        for _ in range(4):
            p = BundlePoint(rng.normal(size=3), rng.normal(size=3))
            assert np.allclose(induced_metric(M, fam, p), np.eye(6), atol=1e-15)

    def test_zero_vector_block_diagonal(self):
        M = sphere(2)
        fam = preset("cheeger-gromoll")
        p = BundlePoint.of([0.9, 0.3], [0.0, 0.0])
        G = induced_metric(M, fam, p)
        g = M.metric(p.x)
        assert np.allclose(G[:2, :2], g, atol=1e-15)
        assert np.allclose(G[:2, 2:], 0.0, atol=1e-15)
        assert np.allclose(G[2:, 2:], fam.alpha_at(0.0) * g, atol=1e-15)

    def test_spd_at_random_points(self):
        M = hyperbolic(2)
        fam = preset("exp-")
        rng = np.random.default_rng(9)
        for _ in range(6):
            p = BundlePoint(0.2 * rng.normal(size=2), 0.4 * rng.normal(size=2))
            eig = np.linalg.eigvalsh(induced_metric(M, fam, p))
            assert np.all(eig > 0)

    def test_validity_horizon_enforced(self):
        M = euclidean(2)
        fam = preset("sasaki", t_max=4.0)
        with pytest.raises(ValidityError):
            induced_metric(M, fam, BundlePoint.of([0, 0], [3.0, 0.0]))

    def test_riemannian_submersion_on_horizontal_lifts(self):
        # G(A, B) = g(pi_* A, pi_* B) for horizontal A, B
        M = sphere(2)
        fam = preset("exp+")
        x = np.array([0.9, 0.3])
        v = np.array([0.4, -0.2])
        g = M.metric(x)
        gamma = M.christoffels(x)
        G = induced_metric(M, fam, BundlePoint(x, v))
        rng = np.random.default_rng(2)
        for _ in range(5):
            a = rng.normal(size=2)
            b = rng.normal(size=2)
            lift = lambda u: np.concatenate(
                [u, -np.einsum("abc,b,c->a", gamma, v, u)]
            )
            assert lift(a) @ G @ lift(b) == pytest.approx(a @ g @ b, rel=1e-13)


class TestAdaptedFrameVectors:
    def test_split_exactness(self):
        M = sphere(2)
        fam = preset("sasaki")
        x = np.array([0.9, 0.3])
        v = np.array([0.4, -0.2])
        fp = adapted_frame(M, x, v)
        frame = adapted_frame_vectors(M, fp)
        p = BundlePoint(x, v)
        for i in range(2):
            hor, ver = connection_split(M, p, frame[i])
            assert np.array_equal(hor, fp.u[i])
            assert np.max(np.abs(ver)) <= 1e-15
            hor, ver = connection_split(M, p, frame[2 + i])
            assert np.array_equal(hor, np.zeros(2))
            assert np.array_equal(ver, fp.u[i])

    def test_horizontal_vertical_orthogonal(self):
        M = hyperbolic(2)
        fam = preset("cheeger-gromoll")
        fp = adapted_frame(M, np.array([0.2, -0.1]), np.array([0.5, 0.3]))
        gram = frame_gram(M, fam, fp)
        assert np.max(np.abs(gram[:2, 2:])) <= 1e-12

    @pytest.mark.parametrize("fam_name", ["sasaki", "cheeger-gromoll", "exp+", "exp-"])
    def test_gram_identity_matches_fiber_block(self, fam_name):
        # the frame Gram equals the fiber-block matrix at xi = (t, 0, ..., 0)
        fam = preset(fam_name)
        cases = [
            (sphere(2), np.array([0.9, 0.3]), np.array([0.4, -0.2])),
            (sphere(3), np.array([0.2, -0.1, 0.3]), np.array([0.5, 0.1, -0.3])),
            (hyperbolic(2), np.array([0.2, -0.1]), np.array([0.6, 0.4])),
        ]
        for M, x, v in cases:
            fp = adapted_frame(M, x, v)
            gram = frame_gram(M, fam, fp)
            n = M.dim
            xi = np.zeros(n)
            xi[0] = fp.t
            expected = np.zeros((2 * n, 2 * n))
            expected[:n, :n] = np.eye(n)
            expected[n:, n:] = fam.fiber_block(xi)
            assert np.max(np.abs(gram - expected)) <= 1e-10

    def test_gram_identity_numeric_christoffels(self):
        # same identity through the pure finite-difference connection
        analytic = sphere(2)
        from tbcurv.basemanifold import ChartManifold

        M = ChartManifold(
            2,
            analytic.metric_fn,
            lo=analytic.lo,
            hi=analytic.hi,
            catalog_id="sphere-fd",
        )
        fam = preset("exp-")
        fp = adapted_frame(M, np.array([0.9, 0.3]), np.array([0.4, -0.2]))
        gram = frame_gram(M, fam, fp)
        xi = np.array([fp.t, 0.0])
        expected = np.zeros((4, 4))
        expected[:2, :2] = np.eye(2)
        expected[2:, 2:] = fam.fiber_block(xi)
        assert np.max(np.abs(gram - expected)) <= 1e-6

    def test_radial_vertical_norm(self):
        # <e_{n+1}, e_{n+1}> = alpha(t^2) + t^2 beta(t^2), others alpha(t^2)
        M = sphere(2)
        fam = preset("exp+")
        fp = adapted_frame(M, np.array([0.9, 0.3]), np.array([0.4, -0.2]))
        gram = frame_gram(M, fam, fp)
        t_sq = fp.t**2
        assert gram[2, 2] == pytest.approx(
            fam.alpha_at(t_sq) + t_sq * fam.beta_at(t_sq), rel=1e-12
        )
        assert gram[3, 3] == pytest.approx(fam.alpha_at(t_sq), rel=1e-12)

    def test_squared_norm_helper(self):
        M = sphere(2)
        x = np.array([np.pi / 4.0, 0.2])
        assert squared_norm(M, x, np.array([0.0, 1.0])) == pytest.approx(
            0.5, abs=1e-15
        )
