"""Grey wolf optimizers for box-constrained minimization.

Two variants are provided.  The standard optimizer steers every agent with the
three best solutions found so far (alpha, beta, delta).  The four-leader
variant adds a fourth leader (gamma) and replaces the three individual leader
distances with their four-way element-wise average before taking the leader
steps.

Conventions, fixed for reproducibility:

* Minimization throughout; lower fitness is better.
* A population is an ``(agents, dimension)`` float array; row ``i`` is agent
  ``i``'s position.
* All randomness flows through one ``numpy.random.Generator``.  Draws happen
  in a fixed order: agents in index order, leaders in alpha/beta/delta/gamma
  order, and within a leader the step-scale vector ``A`` before the distance
  weight vector ``C``, each filled coordinate by coordinate.
* Leaders are elitist: a slot changes only when a strictly better fitness
  arrives, so on equal fitness the earlier discovery keeps its slot and the
  best-so-far trace is monotone non-increasing.
* Every proposed position is clamped to the search box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import EvaluationError

VARIANTS = ("standard", "modified")

#: Leaders used by each variant.
LEADER_COUNT = {"standard": 3, "modified": 4}


@dataclass(frozen=True)
class GwoConfig:
    """Run parameters for :func:`optimize`.

    ``variant`` selects the update rule: ``"standard"`` uses three leaders,
    ``"modified"`` four.  The population must be able to fill every leader
    slot, hence the minimum agent counts.
    """

    agents: int
    max_iterations: int
    dimension: int
    lower_bound: float
    upper_bound: float
    variant: str = "standard"
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        minimum = LEADER_COUNT[self.variant]
        if self.agents < minimum:
            raise ValueError(
                f"variant {self.variant!r} needs at least {minimum} agents, got {self.agents}"
            )
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if not self.lower_bound <= self.upper_bound:
            raise ValueError("lower_bound must not exceed upper_bound")

    @property
    def leader_count(self) -> int:
        return LEADER_COUNT[self.variant]


@dataclass(frozen=True)
class Coefficients:
    """One leader's random step coefficients.

    ``A`` scales the step away from or toward the leader (each component in
    ``[-a, a]``); ``C`` weights the leader position inside the distance term
    (each component in ``[0, 2]``).
    """

    a: float
    A: np.ndarray
    C: np.ndarray


class LeaderSet:
    """The best-so-far solutions, ordered best first.

    Slot 0 is alpha.  Unfilled slots carry ``inf`` fitness and a zero
    position; they only exist before the first population evaluation.
    """

    def __init__(self, positions: np.ndarray, fitnesses: np.ndarray):
        self.positions = np.asarray(positions, dtype=float)
        self.fitnesses = np.asarray(fitnesses, dtype=float)
        if self.positions.ndim != 2 or len(self.fitnesses) != len(self.positions):
            raise ValueError("positions must be (k, d) with one fitness per row")
        # plain float comparison: inf sentinels would turn np.diff into nan
        for earlier, later in zip(self.fitnesses, self.fitnesses[1:]):
            if later < earlier:
                raise ValueError("leader fitnesses must be sorted ascending")

    @classmethod
    def fresh(cls, count: int, dimension: int) -> "LeaderSet":
        return cls(np.zeros((count, dimension)), np.full(count, math.inf))

    def __len__(self) -> int:
        return len(self.fitnesses)

    @property
    def alpha(self):
        return self.positions[0], float(self.fitnesses[0])

    @property
    def beta(self):
        return self.positions[1], float(self.fitnesses[1])

    @property
    def delta(self):
        return self.positions[2], float(self.fitnesses[2])

    @property
    def gamma(self):
        if len(self) < 4:
            raise ValueError("this leader set has no gamma slot")
        return self.positions[3], float(self.fitnesses[3])

    def copy(self) -> "LeaderSet":
        return LeaderSet(self.positions.copy(), self.fitnesses.copy())


@dataclass
class ConvergenceTrace:
    """Per-iteration progress: best-so-far fitness, population mean, and ``a``."""

    best_fitness: list = field(default_factory=list)
    mean_fitness: list = field(default_factory=list)
    a: list = field(default_factory=list)

    def append(self, best: float, mean: float, a: float) -> None:
        self.best_fitness.append(float(best))
        self.mean_fitness.append(float(mean))
        self.a.append(float(a))

    def __len__(self) -> int:
        return len(self.best_fitness)

    def to_csv(self) -> str:
        """Render as CSV with full-precision floats, one row per iteration."""
        lines = ["iteration,best_fitness,mean_fitness,a"]
        for i in range(len(self)):
            lines.append(
                f"{i + 1},{self.best_fitness[i]!r},{self.mean_fitness[i]!r},{self.a[i]!r}"
            )
        return "\n".join(lines) + "\n"


class OptimizeResult(NamedTuple):
    position: np.ndarray
    fitness: float
    trace: ConvergenceTrace


def init_population(config: GwoConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw the initial population uniformly inside the search box."""
    return rng.uniform(
        config.lower_bound, config.upper_bound, size=(config.agents, config.dimension)
    )


def decay_a(iteration: int, max_iterations: int) -> float:
    """Step-scale ceiling, linear from 2 at iteration 0 down to 0 at the end."""
    if max_iterations <= 0:
        raise ValueError("max_iterations must be positive")
    if not 0 <= iteration <= max_iterations:
        raise ValueError(f"iteration {iteration} outside [0, {max_iterations}]")
    return 2.0 * (1.0 - iteration / max_iterations)


def draw_coefficients(a: float, dimension: int, rng: np.random.Generator) -> Coefficients:
    """Draw one leader's coefficients: ``A = 2*a*r1 - a`` and ``C = 2*r2``."""
    if not 0.0 <= a <= 2.0:
        raise ValueError(f"a must lie in [0, 2], got {a}")
    r1 = rng.random(dimension)
    r2 = rng.random(dimension)
    return Coefficients(a=a, A=2.0 * a * r1 - a, C=2.0 * r2)


def leader_distance(leader_pos: np.ndarray, C: np.ndarray, current_pos: np.ndarray) -> np.ndarray:
    """Element-wise distance ``|C * leader - current|`` between leader and agent."""
    leader_pos = np.asarray(leader_pos, dtype=float)
    C = np.asarray(C, dtype=float)
    current_pos = np.asarray(current_pos, dtype=float)
    if not (leader_pos.shape == C.shape == current_pos.shape):
        raise ValueError("leader, C and current position must share one length")
    return np.abs(C * leader_pos - current_pos)


def standard_step(
    leaders: LeaderSet, current_pos: np.ndarray, coeffs: Sequence[Coefficients]
) -> np.ndarray:
    """Three-leader move: average of the per-leader steps ``X_k = leader_k - D_k * A_k``."""
    if len(coeffs) != 3:
        raise ValueError("standard step takes exactly three coefficient sets")
    total = np.zeros_like(np.asarray(current_pos, dtype=float))
    for k in range(3):
        pos = leaders.positions[k]
        dist = leader_distance(pos, coeffs[k].C, current_pos)
        total += pos - dist * coeffs[k].A
    return total / 3.0


def modified_step(
    leaders: LeaderSet, current_pos: np.ndarray, coeffs: Sequence[Coefficients]
) -> np.ndarray:
    """Four-leader move with distance averaging.

    The four leader distances are averaged element-wise and that single
    average replaces every individual distance in the leader steps:
    ``X_k = leader_k - D_avg * A_k``, returned as the four-way mean.
    """
    if len(leaders) < 4:
        raise ValueError("modified step requires a gamma leader (four slots)")
    if len(coeffs) != 4:
        raise ValueError("modified step takes exactly four coefficient sets")
    current = np.asarray(current_pos, dtype=float)
    d_avg = np.zeros_like(current)
    for k in range(4):
        d_avg += leader_distance(leaders.positions[k], coeffs[k].C, current)
    d_avg /= 4.0
    total = np.zeros_like(current)
    for k in range(4):
        total += leaders.positions[k] - d_avg * coeffs[k].A
    return total / 4.0


def _clamp(position: np.ndarray, lower: float, upper: float) -> np.ndarray:
    return np.clip(position, lower, upper)


def standard_update(
    leaders: LeaderSet,
    current_pos: np.ndarray,
    a: float,
    rng: np.random.Generator,
    lower_bound: float,
    upper_bound: float,
) -> np.ndarray:
    """Draw coefficients for alpha, beta, delta and apply the standard step, clamped."""
    d = len(current_pos)
    coeffs = [draw_coefficients(a, d, rng) for _ in range(3)]
    return _clamp(standard_step(leaders, current_pos, coeffs), lower_bound, upper_bound)


def modified_update(
    leaders: LeaderSet,
    current_pos: np.ndarray,
    a: float,
    rng: np.random.Generator,
    lower_bound: float,
    upper_bound: float,
) -> np.ndarray:
    """Draw coefficients for all four leaders and apply the averaged-distance step, clamped."""
    if len(leaders) < 4:
        raise ValueError("modified update requires a gamma leader (four slots)")
    d = len(current_pos)
    coeffs = [draw_coefficients(a, d, rng) for _ in range(4)]
    return _clamp(modified_step(leaders, current_pos, coeffs), lower_bound, upper_bound)


def update_leaders(
    positions: np.ndarray, fitnesses: np.ndarray, leaders: LeaderSet
) -> LeaderSet:
    """Fold a fully evaluated population into the leader hierarchy.

    Agents are considered in index order.  An agent displaces the first slot
    it strictly beats; worse slots shift down one and the last drops off.
    Equal fitness never displaces, so earlier discoveries persist.
    """
    lead_pos = leaders.positions.copy()
    lead_fit = leaders.fitnesses.copy()
    k = len(lead_fit)
    for i in range(len(fitnesses)):
        f = float(fitnesses[i])
        for slot in range(k):
            if f < lead_fit[slot]:
                lead_pos[slot + 1 :] = lead_pos[slot:-1]
                lead_fit[slot + 1 :] = lead_fit[slot:-1]
                lead_pos[slot] = positions[i]
                lead_fit[slot] = f
                break
    return LeaderSet(lead_pos, lead_fit)


def _evaluate(
    positions: np.ndarray,
    objective: Callable[[np.ndarray], float],
    batch_objective: Optional[Callable[[np.ndarray], np.ndarray]],
) -> np.ndarray:
    if batch_objective is not None:
        fitness = np.asarray(batch_objective(positions), dtype=float)
        if fitness.shape != (len(positions),):
            raise ValueError("batch objective must return one fitness per agent")
    else:
        fitness = np.array([float(objective(positions[i])) for i in range(len(positions))])
    bad = np.flatnonzero(~np.isfinite(fitness))
    if bad.size:
        i = int(bad[0])
        raise EvaluationError(
            f"objective returned non-finite value {fitness[i]} for agent {i} "
            f"at position {positions[i].tolist()}",
            position=positions[i].copy(),
        )
    return fitness


def optimize(
    config: GwoConfig,
    objective: Callable[[np.ndarray], float],
    batch_objective: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> OptimizeResult:
    """Minimize ``objective`` over the search box.

    Each iteration moves every agent with the configured update rule against
    the current leaders, re-evaluates the population, and refreshes the
    leaders.  ``batch_objective``, when given, evaluates a whole ``(agents,
    dimension)`` matrix at once and must agree with ``objective``; it exists
    so vectorized or compiled fitness kernels can be plugged in.  Runs are
    deterministic for a fixed config.

    Returns the best position ever seen, its fitness, and the per-iteration
    trace.
    """
    rng = np.random.default_rng(config.seed)
    update = modified_update if config.variant == "modified" else standard_update
    positions = init_population(config, rng)
    fitness = _evaluate(positions, objective, batch_objective)
    leaders = update_leaders(positions, fitness, LeaderSet.fresh(config.leader_count, config.dimension))

    trace = ConvergenceTrace()
    for t in range(config.max_iterations):
        a = decay_a(t, config.max_iterations)
        for i in range(config.agents):
            positions[i] = update(
                leaders, positions[i], a, rng, config.lower_bound, config.upper_bound
            )
        fitness = _evaluate(positions, objective, batch_objective)
        leaders = update_leaders(positions, fitness, leaders)
        trace.append(leaders.fitnesses[0], fitness.mean(), a)

    best_pos, best_fit = leaders.alpha
    return OptimizeResult(best_pos.copy(), best_fit, trace)
