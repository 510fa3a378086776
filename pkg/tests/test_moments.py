import numpy as np
import pytest

from spinsq import (
    EnsembleShape,
    QuantumState,
    completely_mixed,
    completely_mixed_moments,
    dicke_moments,
    dicke_state,
    moment_matrices,
    moment_set,
    nematic_q0,
    random_frame,
    reduced_states,
    rotate_state,
    singlet_moments,
    singlet_state,
    spin_operators,
)
from spinsq.moments import partial_trace

from conftest import (
    random_mixed_state,
    random_product_ket,
    random_pure_state,
    random_state,
)

SHAPES = [
    EnsembleShape.make(4, "1/2"),
    EnsembleShape.make(2, 1),
    EnsembleShape.make(3, 1),
    EnsembleShape.make(2, "3/2"),
]


def rodrigues(axis, angle):
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    K = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


class TestReferenceMoments:
    def test_completely_mixed(self):
        for shape in SHAPES:
            ref = completely_mixed_moments(shape)
            got = moment_set(completely_mixed(shape))
            iso = shape.N * shape.j.value * (shape.j.value + 1) / 3
            assert np.allclose(ref.second, iso)
            assert np.max(np.abs(got.mod_second)) < 1e-10
            for field in ("jvec", "second", "local_second"):
                assert np.max(np.abs(getattr(ref, field) - getattr(got, field))) < 1e-10

    def test_singlet(self):
        shape = EnsembleShape.make(2, 1)
        ref = singlet_moments(shape)
        got = moment_set(singlet_state(shape))
        for field in ("jvec", "second", "local_second"):
            assert np.max(np.abs(getattr(ref, field) - getattr(got, field))) < 1e-10

    def test_dicke_with_nonzero_projection(self):
        shape = EnsembleShape.make(3, 1)
        for lz in (-2, 0, 1, 3):
            ref = dicke_moments(shape, lz)
            got = moment_set(dicke_state(shape, lz))
            for field in ("jvec", "second", "local_second"):
                assert np.max(np.abs(getattr(ref, field) - getattr(got, field))) < 1e-10


class TestExtractionPaths:
    def test_pure_and_dense_paths_agree(self, rng):
        for shape in SHAPES:
            st = random_pure_state(shape, rng)
            dense = QuantumState(shape, st.rho())
            m1, m2 = moment_set(st), moment_set(dense)
            for field in ("jvec", "second", "local_second"):
                assert np.max(np.abs(getattr(m1, field) - getattr(m2, field))) < 1e-10

    def test_ensemble_and_dense_paths_agree(self, rng):
        shape = EnsembleShape.make(3, 1)
        for _ in range(5):
            ks = [random_pure_state(shape, rng).data for _ in range(3)]
            w = rng.dirichlet(np.ones(3))
            ens = QuantumState.mixture(shape, list(zip(w, ks)))
            dense = QuantumState(shape, ens.rho())
            m1, m2 = moment_set(ens), moment_set(dense)
            mm1, mm2 = moment_matrices(ens), moment_matrices(dense)
            for field in ("jvec", "second", "local_second"):
                assert np.max(np.abs(getattr(m1, field) - getattr(m2, field))) < 1e-10
            assert np.max(np.abs(mm1.xmat - mm2.xmat)) < 1e-9


class TestInvariants:
    def test_sum_rule(self, rng):
        # sum of true second moments = sum of modified ones + N j(j+1)
        for _ in range(1000):
            shape = SHAPES[rng.integers(len(SHAPES))]
            m = moment_set(random_state(shape, rng))
            lhs = float(np.sum(m.second))
            rhs = float(np.sum(m.mod_second)) + shape.N * shape.j.value * (shape.j.value + 1)
            assert abs(lhs - rhs) < 1e-9

    def test_product_state_identities(self, rng):
        # for pure products: mod_var_l = -sum_n <j_l^(n)>^2 and
        # mod_second_l = sum_{n != m} <j_l^(n)><j_l^(m)>
        for shape in SHAPES:
            psi = random_product_ket(shape, rng)
            st = QuantumState(shape, psi)
            m = moment_set(st)
            ops = spin_operators(shape.j)
            site_means = np.zeros((shape.N, 3))
            for n in range(shape.N):
                r1 = partial_trace(st.rho(), [n], shape.d, shape.N)
                for l, op in enumerate(ops.triple):
                    site_means[n, l] = np.real(np.trace(r1 @ op))
            for l in range(3):
                b = site_means[:, l]
                assert abs(m.mod_var[l] + np.sum(b**2)) < 1e-9
                assert abs(m.mod_second[l] - (np.sum(b) ** 2 - np.sum(b**2))) < 1e-9

    def test_diagonal_identity(self, rng):
        # X_kk = (N-1) * mod_var_k + mod_second_k + N^2 q0, in any frame
        for _ in range(50):
            shape = SHAPES[rng.integers(len(SHAPES))]
            st = random_state(shape, rng)
            frame = random_frame(rng)
            m = moment_set(st, frame=frame)
            mm = moment_matrices(st, frame=frame)
            q0 = nematic_q0(shape.j)
            for k in range(3):
                expected = (shape.N - 1) * m.mod_var[k] + m.mod_second[k] + shape.N**2 * q0
                assert abs(mm.xmat[k, k] - expected) < 1e-9

    def test_combined_matrix_definition(self, rng):
        shape = EnsembleShape.make(2, "3/2")
        st = random_mixed_state(shape, rng)
        mm = moment_matrices(st)
        recomputed = (shape.N - 1) * mm.cov + mm.corr - shape.N**2 * mm.nematic
        assert np.max(np.abs(mm.xmat - recomputed)) < 1e-9


class TestFrames:
    def test_congruence_transformation(self, rng):
        shape = EnsembleShape.make(2, 1)
        st = random_mixed_state(shape, rng)
        mm0 = moment_matrices(st)
        f = random_frame(rng)
        mmf = moment_matrices(st, frame=f)
        assert np.max(np.abs(mmf.xmat - f @ mm0.xmat @ f.T)) < 1e-9
        e0 = np.sort(np.linalg.eigvalsh(mm0.xmat))
        e1 = np.sort(np.linalg.eigvalsh(mmf.xmat))
        assert np.max(np.abs(e0 - e1)) < 1e-9

    def test_frame_moments_equal_rotated_state_moments(self, rng):
        # frame transform of the moments == canonical moments of the rotated state
        for shape in (EnsembleShape.make(2, 1), EnsembleShape.make(3, "1/2")):
            st = random_pure_state(shape, rng)
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            angle = rng.uniform(0.2, 2.8)
            frame = rodrigues(axis, angle)
            m_frame = moment_set(st, frame=frame)
            m_rot = moment_set(rotate_state(st, axis, angle))
            for field in ("jvec", "second", "local_second"):
                assert np.max(np.abs(getattr(m_frame, field) - getattr(m_rot, field))) < 1e-9

    def test_rejects_degenerate_frame(self, rng):
        shape = EnsembleShape.make(2, 1)
        st = random_pure_state(shape, rng)
        with pytest.raises(ValueError):
            moment_set(st, frame=np.ones((3, 3)))


class TestReducedStates:
    def test_qubit_pair_singlet_correlations(self):
        shape = EnsembleShape.make(2, "1/2")
        r = reduced_states(singlet_state(shape, "pair_product"))
        assert np.allclose(r.pair_corr, -0.25, atol=1e-10)
        assert abs(r.sigma + 0.75) < 1e-10

    def test_completely_mixed_pair(self):
        shape = EnsembleShape.make(3, 1)
        r = reduced_states(completely_mixed(shape))
        assert np.max(np.abs(r.rho_av2 - np.eye(9) / 9)) < 1e-12

    def test_partial_trace_consistency(self, rng):
        for shape in SHAPES:
            r = reduced_states(random_state(shape, rng))
            traced = partial_trace(r.rho_av2, [0], shape.d, 2)
            assert np.max(np.abs(traced - r.rho_av1)) < 1e-10
            swap = r.rho_av2.reshape(shape.d, shape.d, shape.d, shape.d)
            swap = swap.transpose(1, 0, 3, 2).reshape(shape.d**2, shape.d**2)
            assert np.max(np.abs(swap - r.rho_av2)) < 1e-10
            assert abs(np.trace(r.rho_av2).real - 1.0) < 1e-10

    def test_permutation_invariant_state_equals_first_pair(self):
        shape = EnsembleShape.make(4, "1/2")
        st = singlet_state(shape, "permutation_invariant")
        r = reduced_states(st)
        first_pair = partial_trace(st.rho(), [0, 1], shape.d, shape.N)
        assert np.max(np.abs(r.rho_av2 - first_pair)) < 1e-10

    def test_pair_identities_reproduce_modified_moments(self, rng):
        # <Jt_l^2> = N(N-1) <j_l x j_l> and
        # mod_var_l = -N^2 <j_l x 1>^2 + N(N-1) <j_l x j_l>
        for _ in range(20):
            shape = SHAPES[rng.integers(len(SHAPES))]
            st = random_state(shape, rng)
            m = moment_set(st)
            r = reduced_states(st)
            N = shape.N
            for l in range(3):
                assert abs(m.mod_second[l] - N * (N - 1) * r.pair_corr[l]) < 1e-9
                expected_var = -(N**2) * r.pair_mean[l] ** 2 + N * (N - 1) * r.pair_corr[l]
                assert abs(m.mod_var[l] - expected_var) < 1e-9

    def test_rejects_single_particle(self, rng):
        shape = EnsembleShape.make(1, 1)
        with pytest.raises(ValueError):
            reduced_states(random_pure_state(shape, rng))


class TestSerialization:
    def test_flat_record(self):
        shape = EnsembleShape.make(2, 1)
        m = moment_set(completely_mixed(shape))
        blob = m.to_json()
        assert blob["schema"] == 1
        numeric = [k for k in blob if k.split("_")[0] in ("J", "K", "M", "Kt", "var", "vart")]
        assert len(numeric) == 18
