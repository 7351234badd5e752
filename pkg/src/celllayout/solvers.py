"""Exhaustive, greedy and simulated-annealing solvers for the layout QAP."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import InstanceTooLarge, InvalidParams
from .instance import CellLayoutInstance
from .objective import Assignment, AssignmentLike, CostBreakdown, _checked, evaluate

BRUTE_FORCE_LIMIT = 10
TIE_TOLERANCE = 1e-12
# Acceptance probability targeted for the mean uphill move at t0.
T0_ACCEPTANCE = 0.8
T0_SAMPLES = 100


@dataclass(frozen=True)
class SaParams:
    """Simulated-annealing configuration.

    ``t0 = 0`` calibrates the initial temperature from sampled swap deltas.
    ``moves_per_temp = None`` means ``20 * n`` proposals per stage.
    """

    t0: float = 0.0
    alpha: float = 0.95
    moves_per_temp: Optional[int] = None
    t_min: float = 1e-6
    max_stages_without_improvement: int = 50
    restarts: int = 10
    seed: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.t0) and self.t0 >= 0):
            raise InvalidParams(f"t0 must be >= 0 (0 = auto), got {self.t0!r}")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidParams(f"alpha must be in (0, 1), got {self.alpha!r}")
        if not self.t_min > 0:
            raise InvalidParams(f"t_min must be positive, got {self.t_min!r}")
        if self.t0 > 0 and not self.t_min < self.t0:
            raise InvalidParams(f"t_min ({self.t_min!r}) must be below t0 ({self.t0!r})")
        if self.moves_per_temp is not None and self.moves_per_temp < 1:
            raise InvalidParams(f"moves_per_temp must be >= 1, got {self.moves_per_temp!r}")
        if self.max_stages_without_improvement < 1:
            raise InvalidParams("max_stages_without_improvement must be >= 1")
        if self.restarts < 1:
            raise InvalidParams(f"restarts must be >= 1, got {self.restarts!r}")
        if self.seed < 0:
            raise InvalidParams(f"seed must be non-negative, got {self.seed!r}")

    def moves_for(self, n: int) -> int:
        return self.moves_per_temp if self.moves_per_temp is not None else 20 * n


@dataclass(frozen=True)
class SolveResult:
    best: Assignment
    cost: CostBreakdown
    evaluations: int
    restarts_run: int
    trace: Optional[list[tuple[int, float, float]]] = None
    improvements: int = 0


@dataclass(frozen=True)
class RestartOutcome:
    """What a single annealing run saw: its start, its incumbent, its telemetry."""

    restart: int
    start: Assignment
    start_total: float
    best: Assignment
    best_total: float
    evaluations: int
    trace: list[tuple[int, float, float]] = field(default_factory=list)


def _trivial(instance: CellLayoutInstance) -> SolveResult:
    best = Assignment.identity(instance.n)
    return SolveResult(best=best, cost=evaluate(instance, best), evaluations=1, restarts_run=1, trace=[])


def brute_force(instance: CellLayoutInstance, *, allow_large: bool = False) -> SolveResult:
    """Global optimum over all n! assignments; lexicographically smallest on ties."""
    n = instance.n
    if n > BRUTE_FORCE_LIMIT and not allow_large:
        raise InstanceTooLarge(
            f"exhaustive search over {n}! permutations refused (limit n <= {BRUTE_FORCE_LIMIT}); "
            "pass allow_large=True to force"
        )
    if n == 1:
        return _trivial(instance)
    perm, _, count = _kernels.enumerate_all(instance.weights, instance.distance, TIE_TOLERANCE)
    best = Assignment(tuple(perm))
    return SolveResult(best=best, cost=evaluate(instance, best), evaluations=int(count), restarts_run=1)


def greedy_descent(instance: CellLayoutInstance, start: AssignmentLike) -> SolveResult:
    """Steepest-descent over pairwise swaps until no swap improves by more than 1e-12."""
    start = _checked(instance, start)
    n = instance.n
    perm = start.to_array()
    evaluations = 0
    moves = 0
    while n > 1:
        c, d = instance.weights, instance.distance
        best_delta, best_pair = -TIE_TOLERANCE, None
        for a in range(n - 1):
            for b in range(a + 1, n):
                delta = _kernels.swap_delta(c, d, perm, a, b)
                evaluations += 1
                if delta < best_delta:
                    best_delta, best_pair = delta, (a, b)
        if best_pair is None:
            break
        a, b = best_pair
        perm[a], perm[b] = perm[b], perm[a]
        moves += 1
    best = Assignment(tuple(perm))
    return SolveResult(
        best=best, cost=evaluate(instance, best), evaluations=evaluations, restarts_run=1, improvements=moves
    )


def _stream(seed: int, *spawn_key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=spawn_key)))


def _random_pairs(rng: np.random.Generator, n: int, size: int):
    first = rng.integers(0, n, size=size)
    second = rng.integers(0, n - 1, size=size)
    second += second >= first
    return first, second


def _sample_swap_deltas(instance: CellLayoutInstance, seed: int):
    """A random permutation, 100 random swap pairs, and their deltas from that permutation."""
    n = instance.n
    rng = _stream(seed)
    perm = rng.permutation(n).astype(np.int64)
    first, second = _random_pairs(rng, n, T0_SAMPLES)
    c, d = instance.weights, instance.distance
    deltas = [_kernels.swap_delta(c, d, perm, a, b) for a, b in zip(first, second)]
    return perm.tolist(), list(zip(first.tolist(), second.tolist())), deltas


def auto_initial_temperature(instance: CellLayoutInstance, seed: int) -> float:
    """Temperature at which the mean sampled uphill swap is accepted with probability 0.8.

    Falls back to 1.0 when none of the sampled swaps is uphill.
    """
    if instance.n < 2:
        return 1.0
    _, _, deltas = _sample_swap_deltas(instance, seed)
    uphill = [x for x in deltas if x > TIE_TOLERANCE]
    if not uphill:
        return 1.0
    return float(np.mean(uphill) / math.log(1.0 / T0_ACCEPTANCE))


def anneal_restart(
    instance: CellLayoutInstance, params: SaParams, restart: int, t0: Optional[float] = None
) -> RestartOutcome:
    """Run the ``restart``-th independent annealing chain.

    The chain draws from its own stream keyed by ``(params.seed, restart)``,
    so chains can run in any order or in parallel with identical results.
    """
    n = instance.n
    if t0 is None:
        t0 = params.t0 or auto_initial_temperature(instance, params.seed)
    rng = _stream(params.seed, restart)
    perm = rng.permutation(n).astype(np.int64)
    start = Assignment(tuple(perm))
    if n == 1:
        return RestartOutcome(restart, start, 0.0, start, 0.0, 0)

    c, d = instance.weights, instance.distance
    moves = params.moves_for(n)
    current = _kernels.qap_cost(c, d, perm)
    start_total = current
    best_perm, best_total = perm.copy(), current
    trace = []
    evaluations = 0
    stale = 0
    stage = 0
    temperature = t0
    while temperature >= params.t_min and stale < params.max_stages_without_improvement:
        first, second = _random_pairs(rng, n, moves)
        draws = rng.random(moves)
        current, best_total, improved = _kernels.anneal_stage(
            c, d, perm, current, best_perm, best_total, temperature, first, second, draws
        )
        evaluations += moves
        # resync against accumulated rounding drift
        current = _kernels.qap_cost(c, d, perm)
        trace.append((stage, temperature, best_total))
        stale = 0 if improved else stale + 1
        stage += 1
        temperature *= params.alpha

    best_total = _kernels.qap_cost(c, d, best_perm)
    return RestartOutcome(
        restart=restart,
        start=start,
        start_total=start_total,
        best=Assignment(tuple(best_perm)),
        best_total=best_total,
        evaluations=evaluations,
        trace=trace,
    )


def simulated_annealing(instance: CellLayoutInstance, params: Optional[SaParams] = None) -> SolveResult:
    """Best incumbent over ``params.restarts`` independent annealing chains.

    The trace lists every stage of every chain in restart order, with a
    global stage counter and the running best total across chains.
    """
    params = params or SaParams()
    if instance.n == 1:
        return _trivial(instance)
    t0 = params.t0 or auto_initial_temperature(instance, params.seed)
    outcomes = [anneal_restart(instance, params, r, t0) for r in range(params.restarts)]

    # min by total, ties to the lowest restart index
    winner = min(outcomes, key=lambda o: (o.best_total, o.restart))
    trace = []
    running = math.inf
    for outcome in outcomes:
        for _, temperature, incumbent in outcome.trace:
            running = min(running, incumbent)
            trace.append((len(trace), temperature, running))
    return SolveResult(
        best=winner.best,
        cost=evaluate(instance, winner.best),
        evaluations=sum(o.evaluations for o in outcomes),
        restarts_run=len(outcomes),
        trace=trace,
    )
