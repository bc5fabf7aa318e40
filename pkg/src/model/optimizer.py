"""
Projected gradient descent on the joint objective over the set

    E = { S symmetric nonnegative, ||W||_F <= sqrt(nu kappa) / (2 lambda (sqrt(n) + 1)) }

inside which the quadratic part of the objective is convex.
"""

import logging
from dataclasses import dataclass
from dataclasses import field
from typing import Callable
from typing import Optional

import numpy as np

from src.decorators import log_execution
from src.exceptions import InvalidConfigError
from src.exceptions import InvalidParameterError
from src.exceptions import NonFiniteError
from src.linalg.core import laplacian
from src.linalg.core import project_sym_nonneg
from src.model.data import TrainingData
from src.model.objective import Hyperparameters
from src.model.objective import ModelState
from src.model.objective import ObjectiveBreakdown
from src.model.objective import evaluate
from src.model.objective import gradient
from src.model.objective import quadratic_form

Monitor = Callable[[ModelState], float]


@dataclass(frozen=True)
class ConstraintSet:
    """``radius`` is None when the W-ball is dropped (kappa, nu or lambda zero)."""

    n: int
    radius: Optional[float]

    def contains(self, state: ModelState, slack: float = 1e-12) -> bool:
        S = state.S
        if not (np.array_equal(S, S.T) and np.all(S >= 0)):
            return False
        if self.radius is None:
            return True
        return float(np.linalg.norm(state.W)) <= self.radius + slack


@dataclass(frozen=True)
class OptimizerConfig:
    step_size: float = 1.0
    max_iters: int = 5000
    grad_tolerance: float = 1e-6
    beta: float = 0.5
    c: float = 1e-4
    max_backtracks: int = 60
    log_every: int = 100

    def __post_init__(self) -> None:
        if not self.step_size > 0:
            raise InvalidConfigError("optimizer.step_size must be > 0")
        if not 0 < self.beta < 1:
            raise InvalidConfigError("optimizer.beta must lie in (0, 1)")
        if not 0 < self.c < 1:
            raise InvalidConfigError("optimizer.c must lie in (0, 1)")
        if self.max_iters < 0 or self.max_backtracks < 1:
            raise InvalidConfigError("optimizer.max_iters / max_backtracks out of range")
        if not self.grad_tolerance > 0:
            raise InvalidConfigError("optimizer.grad_tolerance must be > 0")


@dataclass
class TraceRecord:
    iteration: int
    breakdown: ObjectiveBreakdown
    grad_norm: float
    step: float
    accepted: bool
    validation_error: Optional[float] = None

    def as_row(self) -> dict:
        row = {"iteration": self.iteration}
        row.update(self.breakdown.as_row())
        row.update(
            {
                "grad_norm": self.grad_norm,
                "step": self.step,
                "accepted": int(self.accepted),
                "validation_error": self.validation_error,
            }
        )
        return row


@dataclass
class Trace:
    records: list[TraceRecord] = field(default_factory=list)
    stop_reason: str = "max_iters"

    def append(self, record: TraceRecord) -> None:
        self.records.append(record)

    @property
    def accepted(self) -> list[TraceRecord]:
        return [r for r in self.records if r.accepted]

    def objective_values(self) -> list[float]:
        return [r.breakdown.total for r in self.accepted]

    def to_rows(self) -> list[dict]:
        return [r.as_row() for r in self.records]


def convexity_radius(h: Hyperparameters, n: int) -> float:
    """``sqrt(nu kappa) / (2 lambda (sqrt(n) + 1))``."""
    for name, value in (("nu", h.nu), ("kappa", h.kappa), ("lam", h.lam)):
        if not value > 0:
            raise InvalidParameterError(f"{name} must be > 0 for the convexity radius, got {value}")
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    return float(np.sqrt(h.nu * h.kappa) / (2.0 * h.lam * (np.sqrt(n) + 1.0)))


def constraint_set(h: Hyperparameters, n: int) -> ConstraintSet:
    if h.nu > 0 and h.kappa > 0 and h.lam > 0:
        return ConstraintSet(n=n, radius=convexity_radius(h, n))
    logging.warning(
        f"Convexity radius undefined (kappa={h.kappa}, nu={h.nu}, lam={h.lam}); "
        "only the S >= 0 projection applies"
    )
    return ConstraintSet(n=n, radius=None)


def project(state: ModelState, E: ConstraintSet) -> ModelState:
    S = project_sym_nonneg(state.S)
    W = state.W
    if E.radius is not None:
        norm = float(np.linalg.norm(W))
        if norm > E.radius:
            W = W * (E.radius / norm)
    return ModelState(W, S)


def _step(state: ModelState, grad: ModelState, s: float, E: ConstraintSet) -> ModelState:
    return project(ModelState(state.W - s * grad.W, state.S - s * grad.S), E)


def _finite(breakdown: ObjectiveBreakdown) -> bool:
    return bool(np.isfinite(breakdown.total))


@log_execution
def fit(
    initial: ModelState,
    data: TrainingData,
    h: Hyperparameters,
    cfg: OptimizerConfig = OptimizerConfig(),
    monitor: Optional[Monitor] = None,
) -> tuple[ModelState, Trace]:
    """
    Minimize the joint objective by projected gradient descent.

    Each iteration backtracks from ``min(step_size, s_prev / beta)`` until
    ``L(x+) <= L(x) - (c / s) ||x+ - x||^2`` with ``x+ = project(x - s grad)``.
    Without active projection this is the usual ``c s ||grad||^2`` decrease.

    Args:
        initial: starting point; projected onto E first.
        data: training window.
        h: regularization weights.
        cfg: step and stopping controls.
        monitor: optional validation error recorded in the trace.

    Returns:
        tuple: final state (inside E) and the iteration trace.

    Raises:
        NonFiniteError: objective or gradient not finite at an iterate.
    """
    E = constraint_set(h, data.n)
    state = project(initial, E)
    trace = Trace()

    current = evaluate(state, data, h)
    if not _finite(current):
        raise NonFiniteError(f"Objective is not finite at iterate 0: {current.total}", 0)

    def record(iteration, breakdown, grad_norm, step, accepted, point):
        value = monitor(point) if (monitor is not None and accepted) else None
        trace.append(TraceRecord(iteration, breakdown, grad_norm, step, accepted, value))

    step = cfg.step_size
    logging.info(f"Starting projected gradient descent: L0={current.total:.6g}, radius={E.radius}")

    for iteration in range(cfg.max_iters + 1):
        grad = gradient(state, data, h)
        grad_norm = grad.norm()
        if not np.isfinite(grad_norm):
            raise NonFiniteError(f"Gradient is not finite at iterate {iteration}", iteration)

        # projected-gradient step length; equals ||grad|| when E is inactive
        stationarity = (state - _step(state, grad, 1.0, E)).norm()
        record(iteration, current, grad_norm, 0.0 if iteration == 0 else step, True, state)

        if stationarity <= cfg.grad_tolerance * (1.0 + abs(current.total)):
            trace.stop_reason = "converged"
            break
        if iteration == cfg.max_iters:
            trace.stop_reason = "max_iters"
            break

        s = min(cfg.step_size, step / cfg.beta) if iteration > 0 else cfg.step_size
        for _ in range(cfg.max_backtracks):
            candidate = _step(state, grad, s, E)
            moved = (candidate - state).norm() ** 2
            trial = evaluate(candidate, data, h)
            if _finite(trial) and trial.total <= current.total - (cfg.c / s) * moved:
                break
            s *= cfg.beta
        else:
            record(iteration + 1, trial, grad_norm, s, False, candidate)
            trace.stop_reason = "line_search"
            logging.info(f"Line search exhausted at iterate {iteration}; stopping")
            break

        state, current, step = candidate, trial, s
        if cfg.log_every and (iteration + 1) % cfg.log_every == 0:
            logging.debug(
                f"iter={iteration + 1} L={current.total:.6g} |grad|={grad_norm:.3g} step={s:.3g}"
            )

    logging.info(
        f"Finished after {trace.records[-1].iteration} iterations "
        f"({trace.stop_reason}): L={current.total:.6g}"
    )
    return state, trace


@dataclass(frozen=True)
class ConvexityReport:
    radius: float
    samples: int
    scale: float
    min_curvature: float
    negative_count: int

    @property
    def convex(self) -> bool:
        return self.negative_count == 0


def psi(
    S: np.ndarray, W: np.ndarray, A_T: np.ndarray, h: Hyperparameters
) -> float:
    """Quadratic part ``kappa/2 ||W||^2 + nu/2 ||S - A_T||^2 + lambda Q(W, L(S), W)``."""
    return float(
        0.5 * h.kappa * np.sum(W**2)
        + 0.5 * h.nu * np.sum((S - A_T) ** 2)
        + h.lam * quadratic_form(W, laplacian(S), W)
    )


def check_convexity(
    h: Hyperparameters,
    n: int,
    samples: int = 200,
    d: int = 3,
    q: int = 2,
    scale: float = 1.0,
    seed: int = 0,
    step: float = 1e-2,
) -> ConvexityReport:
    """
    Sample points with ``||W||_F = u * scale * R`` (u uniform in [0, 1)) and
    random unit directions; record second directional differences of psi.

    ``scale <= 1`` samples inside E; larger scales sample outside it and the
    report flags any negative curvature found. With lambda = 0 there is no
    radius and W is drawn on the unit scale instead.
    """
    radius = convexity_radius(h, n) if h.lam > 0 else None
    base = radius if radius is not None else 1.0
    rng = np.random.default_rng(seed)
    curvatures = np.empty(samples)
    tolerance = 1e-8

    for k in range(samples):
        A_T = project_sym_nonneg(rng.uniform(0.0, 1.0, (n, n)))
        S = project_sym_nonneg(A_T + rng.uniform(0.0, 1.0, (n, n)))
        W = rng.standard_normal((n, d, q))
        W *= scale * base * rng.uniform() / np.linalg.norm(W)

        Z = rng.standard_normal((n, n))
        Z = (Z + Z.T) / 2.0
        V = rng.standard_normal((n, d, q))
        norm = np.sqrt(np.sum(Z**2) + np.sum(V**2))
        Z, V = Z / norm, V / norm

        center = psi(S, W, A_T, h)
        forward = psi(S + step * Z, W + step * V, A_T, h)
        backward = psi(S - step * Z, W - step * V, A_T, h)
        curvatures[k] = (forward - 2.0 * center + backward) / step**2

    negatives = int(np.sum(curvatures < -tolerance))
    if negatives:
        logging.warning(
            f"{negatives} of {samples} samples show negative curvature at scale {scale}"
        )
    return ConvexityReport(
        radius=radius,
        samples=samples,
        scale=scale,
        min_curvature=float(curvatures.min()) if samples else float("nan"),
        negative_count=negatives,
    )
