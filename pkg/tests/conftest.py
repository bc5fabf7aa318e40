import numpy as np
import pytest

from src.graphs.features import FeatureConfig
from src.graphs.sequence import GraphSequence
from src.model.data import TrainingData
from src.model.data import prepare_training
from src.synthetic.generator import GeneratorConfig
from src.synthetic.generator import generate


def random_graphs(rng: np.random.Generator, T: int, n: int, scale: float = 0.5) -> GraphSequence:
    raw = rng.uniform(0.0, scale, (T, n, n))
    return GraphSequence((raw + np.transpose(raw, (0, 2, 1))) / 2.0)


def random_training(
    seed: int = 0, n: int = 6, T: int = 5, k_eig: int = 2, feature_scale: float = 0.3
) -> TrainingData:
    """Random graphs with random external features: a small, well-conditioned instance."""
    rng = np.random.default_rng(seed)
    G = random_graphs(rng, T, n)
    X = feature_scale * rng.standard_normal((T, n, k_eig + 1))
    return prepare_training(G, FeatureConfig(k_eig=k_eig, k_clusters=0), external_X=X)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_training() -> TrainingData:
    return random_training(seed=3)


@pytest.fixture(scope="session")
def small_generator() -> GeneratorConfig:
    return GeneratorConfig(n=12, r=2, T=8, seed=11)


@pytest.fixture(scope="session")
def synthetic_sequence(small_generator):
    G, latent = generate(small_generator)
    return G, latent


@pytest.fixture(scope="session")
def small_features() -> FeatureConfig:
    return FeatureConfig(k_eig=2, k_clusters=2, kmeans_restarts=5, seed=0)
