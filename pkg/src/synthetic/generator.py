"""
Latent-factor generator for dynamic graphs.

Each node carries latent rows ``U_t[i]``, ``V_t[i]`` in R^r that follow

    U_t[i] = U_{t-1}[i] + h(U_{t-1}[i]) + u_{t,i},   u ~ N(0, delta^2 I_r)

(likewise for V) with the drift

    h(x) = eps * ( exp(-||x - v1||^2 / s1^2) (x - v1) + exp(-||x - v2|| / s2) (x - v2) )

and the observed graph is ``A_t = U_t V_t^T + z_t`` with i.i.d. N(0, sigma^2)
noise, post-processed into a symmetric nonnegative, nondecreasing sequence.
"""

from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import replace
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from src.exceptions import DimensionMismatchError
from src.exceptions import InvalidConfigError
from src.exceptions import InvalidParameterError
from src.graphs.sequence import GraphSequence
from src.linalg.core import project_sym_nonneg

RNG_ALGORITHM = "numpy.random.PCG64"


@dataclass(frozen=True)
class GeneratorConfig:
    n: int = 100
    r: int = 4
    T: int = 60
    delta: float = 0.01
    sigma_noise: float = 0.05
    epsilon: float = 0.1
    sigma1: float = 1.0
    sigma2: float = 1.0
    v1: Optional[tuple[float, ...]] = None
    v2: Optional[tuple[float, ...]] = None
    seed: int = 0
    symmetrize: bool = True
    monotone: bool = True
    symmetric_drift: bool = False

    def __post_init__(self) -> None:
        for name in ("n", "r", "T"):
            if getattr(self, name) < 1:
                raise InvalidConfigError(f"generator.{name} must be >= 1")
        for name in ("delta", "sigma_noise", "epsilon", "sigma1", "sigma2"):
            if getattr(self, name) < 0:
                raise InvalidConfigError(f"generator.{name} must be >= 0")
        for name in ("v1", "v2"):
            vector = getattr(self, name)
            if vector is None:
                continue
            if len(vector) != self.r:
                raise InvalidConfigError(f"generator.{name} must have length r={self.r}")
            if min(vector) < 0:
                raise InvalidConfigError(f"generator.{name} entries must be >= 0")
            object.__setattr__(self, name, tuple(float(x) for x in vector))
        if self.monotone and not self.symmetrize:
            raise InvalidConfigError("generator.monotone requires generator.symmetrize")

    def as_dict(self) -> dict:
        config = asdict(self)
        for name in ("v1", "v2"):
            if config[name] is not None:
                config[name] = list(config[name])
        return config


@dataclass(frozen=True)
class LatentTrace:
    """Latent factors ``U_0 .. U_T`` and ``V_0 .. V_T`` (shape ``(T+1, n, r)``)."""

    U: NDArray[np.float64]
    V: NDArray[np.float64]
    config: GeneratorConfig

    def product(self, t: int) -> NDArray[np.float64]:
        """Noise-free ``U_t V_t^T`` for ``t`` in ``1..T``."""
        return self.U[t] @ self.V[t].T


class RawSequence(GraphSequence):
    """Unprocessed snapshots for ablations; skips the graph invariants."""

    def validate(self) -> None:
        if not np.all(np.isfinite(self.snapshots)):
            raise InvalidParameterError("Raw snapshots contain non-finite values")


def drift(x: NDArray[np.float64], cfg: GeneratorConfig) -> NDArray[np.float64]:
    """
    Drift ``h`` applied to a latent vector or to each row of an ``(m, r)`` array.

    The second attractor uses the plain norm over ``sigma2`` unless
    ``cfg.symmetric_drift`` squares both.
    """
    if cfg.v1 is None or cfg.v2 is None:
        raise InvalidParameterError("drift needs resolved attractors v1 and v2")
    if cfg.sigma1 <= 0 or cfg.sigma2 <= 0:
        raise InvalidParameterError("drift length-scales sigma1 and sigma2 must be > 0")
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != cfg.r:
        raise DimensionMismatchError(f"Latent vectors must have length r={cfg.r}")

    v1 = np.asarray(cfg.v1)
    v2 = np.asarray(cfg.v2)
    d1 = x - v1
    d2 = x - v2
    n1 = np.sum(d1**2, axis=-1, keepdims=True)
    n2 = np.sum(d2**2, axis=-1, keepdims=True)
    w1 = np.exp(-n1 / cfg.sigma1**2)
    if cfg.symmetric_drift:
        w2 = np.exp(-n2 / cfg.sigma2**2)
    else:
        w2 = np.exp(-np.sqrt(n2) / cfg.sigma2)
    return cfg.epsilon * (w1 * d1 + w2 * d2)


def resolve_attractors(cfg: GeneratorConfig, rng: np.random.Generator) -> GeneratorConfig:
    """Draw missing attractors uniformly in (0, 1)^r from the run generator."""
    v1 = cfg.v1 if cfg.v1 is not None else tuple(rng.uniform(0.0, 1.0, cfg.r))
    v2 = cfg.v2 if cfg.v2 is not None else tuple(rng.uniform(0.0, 1.0, cfg.r))
    return replace(cfg, v1=v1, v2=v2)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def generate(cfg: GeneratorConfig) -> tuple[GraphSequence, LatentTrace]:
    """
    Simulate ``T`` snapshots.

    Draw order from the seeded PCG64 stream: v1, v2 (when not given), U_0,
    V_0, then per step the U noise, V noise and edge noise.
    """
    rng = make_rng(cfg.seed)
    cfg = resolve_attractors(cfg, rng)
    n, r, T = cfg.n, cfg.r, cfg.T

    U = np.empty((T + 1, n, r))
    V = np.empty((T + 1, n, r))
    U[0] = rng.uniform(0.0, 1.0, (n, r))
    V[0] = rng.uniform(0.0, 1.0, (n, r))
    snapshots = np.empty((T, n, n))

    for t in range(1, T + 1):
        u_noise = rng.normal(0.0, 1.0, (n, r)) * cfg.delta
        v_noise = rng.normal(0.0, 1.0, (n, r)) * cfg.delta
        z = rng.normal(0.0, 1.0, (n, n)) * cfg.sigma_noise
        U[t] = U[t - 1] + drift(U[t - 1], cfg) + u_noise
        V[t] = V[t - 1] + drift(V[t - 1], cfg) + v_noise

        A = U[t] @ V[t].T + z
        if cfg.symmetrize:
            A = project_sym_nonneg(A)
        if cfg.monotone and t > 1:
            A = np.maximum(A, snapshots[t - 2])
        snapshots[t - 1] = A

    if cfg.symmetrize:
        G = GraphSequence(snapshots, monotone=cfg.monotone)
    else:
        G = RawSequence(snapshots)
    return G, LatentTrace(U=U, V=V, config=cfg)
