from dataclasses import replace

import numpy as np
import pytest

from src.exceptions import InvalidConfigError
from src.exceptions import InvalidParameterError
from src.linalg.core import numerical_rank
from src.synthetic.generator import GeneratorConfig
from src.synthetic.generator import RawSequence
from src.synthetic.generator import drift
from src.synthetic.generator import generate

ATTRACTED = GeneratorConfig(r=2, v1=(0.2, 0.8), v2=(0.9, 0.1))


class TestDrift:
    def test_vanishes_without_nonlinearity(self, rng):
        x = rng.uniform(size=(5, 2))
        np.testing.assert_array_equal(drift(x, replace(ATTRACTED, epsilon=0.0)), 0.0)

    def test_single_vector_matches_rowwise(self, rng):
        x = rng.uniform(size=(4, 2))
        rows = np.stack([drift(row, ATTRACTED) for row in x])
        np.testing.assert_allclose(drift(x, ATTRACTED), rows)

    def test_at_first_attractor_only_second_term_remains(self):
        v1, v2 = np.array(ATTRACTED.v1), np.array(ATTRACTED.v2)
        expected = ATTRACTED.epsilon * np.exp(-np.linalg.norm(v1 - v2)) * (v1 - v2)
        np.testing.assert_allclose(drift(v1, ATTRACTED), expected)

    def test_symmetric_variant_squares_the_second_norm(self):
        cfg = replace(ATTRACTED, symmetric_drift=True)
        v1, v2 = np.array(cfg.v1), np.array(cfg.v2)
        expected = cfg.epsilon * np.exp(-np.sum((v1 - v2) ** 2)) * (v1 - v2)
        np.testing.assert_allclose(drift(v1, cfg), expected)

    def test_vanishes_far_from_both_attractors(self):
        x = np.array(ATTRACTED.v1) + 100.0 * np.array([0.6, 0.8])
        assert np.linalg.norm(drift(x, ATTRACTED)) <= 1e-6

    def test_needs_attractors(self):
        with pytest.raises(InvalidParameterError):
            drift(np.zeros(4), GeneratorConfig())


class TestGenerate:
    def test_shapes_and_graph_invariants(self, synthetic_sequence, small_generator):
        G, latent = synthetic_sequence
        assert G.snapshots.shape == (small_generator.T, small_generator.n, small_generator.n)
        assert latent.U.shape == (small_generator.T + 1, small_generator.n, small_generator.r)
        assert G.monotone
        assert np.all(np.diff(G.snapshots, axis=0) >= 0)
        assert np.all(G.snapshots >= 0)

    def test_same_seed_same_sequence(self, small_generator):
        a, _ = generate(small_generator)
        b, _ = generate(small_generator)
        np.testing.assert_array_equal(a.snapshots, b.snapshots)

    def test_different_seed_different_sequence(self, small_generator):
        a, _ = generate(small_generator)
        b, _ = generate(replace(small_generator, seed=small_generator.seed + 1))
        assert not np.array_equal(a.snapshots, b.snapshots)

    def test_attractors_are_resolved_and_recorded(self, synthetic_sequence):
        _, latent = synthetic_sequence
        assert len(latent.config.v1) == latent.config.r
        assert all(0.0 <= v < 1.0 for v in latent.config.v2)

    def test_single_step(self):
        G, _ = generate(GeneratorConfig(n=5, r=2, T=1, seed=0))
        assert G.T == 1

    def test_noise_free_linear_case_follows_latent_product(self):
        cfg = GeneratorConfig(
            n=6, r=2, T=3, delta=0.0, sigma_noise=0.0, epsilon=0.0, monotone=False, seed=4
        )
        G, latent = generate(cfg)
        for t in range(1, cfg.T + 1):
            P = latent.product(t)
            np.testing.assert_allclose(G[t - 1], np.maximum((P + P.T) / 2, 0))

    def test_frozen_dynamics_repeat_the_first_snapshot(self):
        cfg = GeneratorConfig(n=8, r=2, T=4, delta=0.0, sigma_noise=0.0, epsilon=0.0, seed=2)
        G, _ = generate(cfg)
        for t in range(1, cfg.T):
            np.testing.assert_array_equal(G[t], G[0])

    def test_latent_product_has_rank_at_most_r(self):
        cfg = GeneratorConfig(n=20, r=3, T=5, seed=9)
        _, latent = generate(cfg)
        for t in range(1, cfg.T + 1):
            assert numerical_rank(latent.product(t)) <= cfg.r

    def test_raw_output_keeps_asymmetry(self):
        G, _ = generate(GeneratorConfig(n=6, r=2, T=2, symmetrize=False, monotone=False, seed=1))
        assert isinstance(G, RawSequence)
        assert not np.array_equal(G[0], G[0].T)


class TestGeneratorConfig:
    def test_monotone_needs_symmetrize(self):
        with pytest.raises(InvalidConfigError):
            GeneratorConfig(symmetrize=False, monotone=True)

    def test_attractor_length_checked(self):
        with pytest.raises(InvalidConfigError):
            GeneratorConfig(r=3, v1=(0.1, 0.2))

    @pytest.mark.parametrize("field", ["n", "r", "T"])
    def test_sizes_positive(self, field):
        with pytest.raises(InvalidConfigError):
            GeneratorConfig(**{field: 0})

    def test_as_dict_is_plain(self):
        config = ATTRACTED.as_dict()
        assert config["v1"] == [0.2, 0.8]
        assert config["seed"] == 0
