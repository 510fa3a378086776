import numpy as np
import pytest

from spinsq import (
    EnsembleShape,
    alpha_product_state,
    coherent_ensemble,
    completely_mixed,
    dicke_state,
    estimate_moment_set,
    evaluate_optimal_set,
    moment_set,
    simulate_population_measurement,
    singlet_state,
)


class TestSampling:
    def test_completely_mixed_qutrit(self):
        shape = EnsembleShape.make(1, 1)
        rec = simulate_population_measurement(completely_mixed(shape), "z", 9000, seed=7)
        freqs = rec.counts.mean(axis=0)
        assert np.allclose(freqs, 1 / 3, atol=0.02)
        m_hat = rec.local_second_moment().mean()
        assert abs(m_hat - 2 / 3) < 0.02

    def test_qubit_dicke_deterministic_outcome(self):
        shape = EnsembleShape.make(2, "1/2")
        rec = simulate_population_measurement(dicke_state(shape, 0), "z", 200, seed=3)
        assert np.all(rec.counts == 1)  # one up, one down in every shot

    def test_row_sums_equal_particle_number(self):
        shape = EnsembleShape.make(3, 1)
        rec = simulate_population_measurement(completely_mixed(shape), "x", 500, seed=1)
        assert np.all(rec.counts.sum(axis=1) == shape.N)
        assert np.all(rec.counts >= 0)

    def test_spin1_singlet_population_moment(self):
        shape = EnsembleShape.make(2, 1)
        rec = simulate_population_measurement(
            singlet_state(shape, "spin1_pair"), "z", 10_000, seed=11
        )
        vals = rec.local_second_moment().astype(float)
        se = vals.std(ddof=1) / np.sqrt(vals.size)
        assert abs(vals.mean() - 4.0 / 3.0) < 3 * se + 1e-12

    def test_seed_determinism(self):
        shape = EnsembleShape.make(2, 1)
        st = coherent_ensemble(shape, [1, 0, 0])
        a = simulate_population_measurement(st, "z", 100, seed=42)
        b = simulate_population_measurement(st, "z", 100, seed=42)
        assert np.array_equal(a.counts, b.counts)
        c = simulate_population_measurement(st, "z", 100, seed=43)
        assert not np.array_equal(a.counts, c.counts)

    def test_axis_validation_and_shots(self):
        shape = EnsembleShape.make(1, 1)
        st = completely_mixed(shape)
        with pytest.raises(ValueError):
            simulate_population_measurement(st, "w", 10)
        with pytest.raises(ValueError):
            simulate_population_measurement(st, "z", 0)

    def test_vector_axis_matches_named_axis(self):
        shape = EnsembleShape.make(2, "1/2")
        st = coherent_ensemble(shape, [0, 1, 0])
        a = simulate_population_measurement(st, "y", 300, seed=5)
        b = simulate_population_measurement(st, [0, 1, 0], 300, seed=5)
        assert np.array_equal(a.counts, b.counts)

    def test_csv_export(self, tmp_path):
        shape = EnsembleShape.make(2, 1)
        rec = simulate_population_measurement(completely_mixed(shape), "z", 20, seed=2)
        text = rec.to_csv()
        lines = text.strip().splitlines()
        assert lines[0] == "shot,chi=-1,chi=0,chi=1"
        assert len(lines) == 21
        path = tmp_path / "rec.csv"
        rec.to_csv(path)
        assert path.read_text().strip() == text.strip()


class TestEstimation:
    def test_zero_variance_axis_is_exact(self):
        shape = EnsembleShape.make(3, 1)
        est = estimate_moment_set(coherent_ensemble(shape, [0, 0, 1]), shots=500, seed=1)
        assert abs(est.jvec[2] - shape.Nj) < 1e-12
        assert est.se_jvec[2] < 1e-12

    def test_spin1_m0_population_bookkeeping(self):
        # every particle sits in m = 0, so the z population moment vanishes
        est = estimate_moment_set(alpha_product_state(4, 0.0), shots=100, seed=9)
        assert est.local_second[2] == 0.0
        rec = simulate_population_measurement(alpha_product_state(4, 0.0), "z", 50, seed=9)
        n0 = rec.counts[:, 1]
        assert np.all(n0 == 4)  # M_z = N - N_0 = 0

    def test_error_scales_with_inverse_sqrt_shots(self):
        shape = EnsembleShape.make(2, 1)
        st = completely_mixed(shape)
        small = estimate_moment_set(st, shots=100, seed=21)
        large = estimate_moment_set(st, shots=10_000, seed=22)
        for field in ("se_jvec", "se_second", "se_local_second"):
            s = np.mean(getattr(small, field))
            l = np.mean(getattr(large, field))
            assert 5.0 < s / l < 20.0

    def test_estimates_track_exact_moments(self):
        shape = EnsembleShape.make(2, 1)
        st = singlet_state(shape, "spin1_pair")
        exact = moment_set(st)
        est = estimate_moment_set(st, shots=20_000, seed=5)
        for i in range(3):
            for got, ref, se in (
                (est.jvec[i], exact.jvec[i], est.se_jvec[i]),
                (est.second[i], exact.second[i], est.se_second[i]),
                (est.local_second[i], exact.local_second[i], est.se_local_second[i]),
            ):
                assert abs(got - ref) <= 5 * se + 1e-9

    def test_unbiasedness_over_repetitions(self):
        shape = EnsembleShape.make(2, 1)
        st = singlet_state(shape, "spin1_pair")
        exact = moment_set(st)
        reps = 300
        means = np.zeros((reps, 3))
        for r in range(reps):
            est = estimate_moment_set(st, shots=40, seed=1000 + r)
            means[r] = est.local_second
        for i in range(3):
            mu = means[:, i].mean()
            se = means[:, i].std(ddof=1) / np.sqrt(reps)
            assert abs(mu - exact.local_second[i]) < 5 * se

    def test_exact_values_reproduce_report(self):
        # the estimated-moment container with exact inputs reproduces the
        # criteria report of the state itself
        shape = EnsembleShape.make(2, 1)
        st = singlet_state(shape, "spin1_pair")
        exact = moment_set(st)
        rebuilt = evaluate_optimal_set(
            moment_set(st).__class__.from_vectors(
                shape, exact.jvec, exact.second, exact.local_second
            )
        )
        direct = evaluate_optimal_set(exact)
        for a, b in zip(rebuilt.records, direct.records):
            assert a.name == b.name and a.margin == b.margin

    def test_violated_set_stabilizes_with_shots(self):
        shape = EnsembleShape.make(2, 1)
        st = singlet_state(shape, "spin1_pair")
        exact_report = evaluate_optimal_set(moment_set(st))
        est = estimate_moment_set(st, shots=50_000, seed=77)
        noisy_report = evaluate_optimal_set(est.as_moment_set())
        # margins that are decisively nonzero agree in sign with the truth
        se_scale = float(np.max(est.se_second) + np.max(est.se_local_second))
        for rec, ref in zip(noisy_report.records, exact_report.records):
            if abs(ref.margin) > 5 * se_scale:
                assert rec.violated == ref.violated, rec.name

    def test_rejects_single_shot(self):
        shape = EnsembleShape.make(2, 1)
        with pytest.raises(ValueError):
            estimate_moment_set(completely_mixed(shape), shots=1)
