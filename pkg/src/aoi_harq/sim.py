"""Slot-by-slot Monte-Carlo simulation of the multiaccess update system.

One terminal is scheduled per slot and transmits a new or in-flight
packet; the attempt fails with the packet's current retransmission error
probability, every other terminal's age grows by one, and a delivered
packet resets its terminal's age to the packet's own age. `run` drives
the hot loop through a compiled kernel when the extension is available
(set ``AOI_HARQ_FORCE_PY=1`` to force the pure-Python fallback; both
kernels are bit-identical). `step` applies a single transition to
explicit state objects and exists as the readable reference semantics
that the kernels are tested against.

Reproducibility: every trial outcome is a pure function of
(seed, terminal, slot) through the counter-based stream in `rng`, so runs
are deterministic, independent of scheduling of parallel runs, and
identical across backends.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bounds import Population
from .errors import ContractViolationError, InsufficientSamplesError, ParameterError
from .harq import HarqModel, ModelKind, TerminalChannel, error_prob
from .moments import moment_set
from .policies import Action, Packet, policy_code
from .rng import MASK64

if os.environ.get("AOI_HARQ_FORCE_PY"):
    from . import _kernel_py as _impl

    _BACKEND = "python"
else:
    try:
        from . import _kernel as _impl  # compiled extension

        _BACKEND = "compiled"
    except ImportError:
        from . import _kernel_py as _impl

        _BACKEND = "python"


def backend_name() -> str:
    """Which kernel `run` dispatches to: "compiled" or "python"."""
    return _BACKEND


@dataclass
class TerminalState:
    """Per-terminal state: age ``h`` (>= 1 slots), retransmission count
    ``r`` of the in-flight packet (0 when idle), and whether an
    undelivered packet exists."""

    h: int = 1
    r: int = 0
    in_flight: bool = False


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: population, policy, horizon and seed.

    ``warmup`` slots are excluded from the age average (but not from the
    per-terminal delivery statistics). ``weights`` applies only to the
    randomized policy and defaults to access probabilities proportional
    to sqrt(E[K_n]).
    """

    population: Population
    policy: str = "rrp"
    horizon: int = 1_000_000
    seed: int = 1
    warmup: int = 0
    weights: Optional[tuple[float, ...]] = None


@dataclass(frozen=True)
class SimResult:
    """Outcome of one run.

    ``avg_aoi`` averages every terminal's post-transition age over the
    post-warmup window. ``delta_mean``/``delta_m2`` are each terminal's
    sample mean and sample second moment of inter-delivery times (NaN for
    terminals that never delivered; the first delivery is measured from
    slot 0). ``batch_means`` splits the window into equal batches for the
    ``aoi_stderr`` batch-means standard-error estimate.
    """

    avg_aoi: float
    delta_mean: np.ndarray
    delta_m2: np.ndarray
    deliveries: np.ndarray
    attempts: np.ndarray
    seed: int
    config: SimConfig
    batch_means: np.ndarray = field(repr=False)
    aoi_stderr: float = float("nan")


def step(
    states: Sequence[TerminalState],
    action: Action,
    model: HarqModel,
    channels: Sequence[TerminalChannel],
    rng,
) -> Optional[int]:
    """Apply one slot transition in place; return the delivering terminal
    index, or None on failure.

    Scheduling an OLD packet requires one in flight. Exactly one uniform
    draw is consumed from ``rng`` regardless of outcome. A NEW packet on a
    terminal with an in-flight packet abandons the old packet.
    """
    idx = action.terminal
    st = states[idx]
    if action.packet is Packet.OLD and not st.in_flight:
        raise ContractViolationError(
            f"terminal {idx} has no packet in flight to retransmit"
        )
    r_prev = st.r if action.packet is Packet.OLD else 0
    p = error_prob(model, channels[idx], r_prev)
    u = rng.random()
    for i, s in enumerate(states):
        if i != idx:
            s.h += 1
    if u < p:
        st.h += 1
        st.r = r_prev + 1
        st.in_flight = True
        return None
    st.h = r_prev + 1  # age of the delivered packet (1 for a fresh one)
    st.r = 0
    st.in_flight = False
    return idx


def run(config: SimConfig) -> SimResult:
    """Simulate ``config`` and return the accumulated statistics.

    Deterministic function of (config, seed); see the module docstring.
    """
    pop = config.population
    n = pop.n
    if config.horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {config.horizon}")
    if not (0 <= config.warmup < config.horizon):
        raise ParameterError(
            f"warmup must satisfy 0 <= warmup < horizon, got {config.warmup}"
        )
    if config.seed < 0:
        raise ParameterError(f"seed must be >= 0, got {config.seed}")
    code = policy_code(config.policy)

    p0 = np.array([ch.p0 for ch in pop.channels], dtype=np.float64)
    weights = np.empty(0, dtype=np.float64)
    scores = np.empty(0, dtype=np.float64)
    if config.policy == "rand":
        if config.weights is not None:
            raw = np.asarray(config.weights, dtype=np.float64)
            if raw.shape != (n,) or (raw < 0).any() or not np.isfinite(raw).all():
                raise ParameterError(
                    f"weights must be {n} finite nonnegative values"
                )
            if raw.sum() <= 0:
                raise ParameterError("weights must have a positive sum")
        else:
            raw = np.array(
                [math.sqrt(moment_set(pop.model, ch).ek) for ch in pop.channels]
            )
        weights = raw / raw.sum()
    else:
        if config.weights is not None:
            raise ParameterError("weights are only meaningful for the rand policy")
        if config.policy == "index":
            scores = np.array(
                [1.0 / math.sqrt(moment_set(pop.model, ch).ek) for ch in pop.channels]
            )

    window = config.horizon - config.warmup
    n_batches = min(32, window)
    kind = 0 if pop.model.kind is ModelKind.RECIPROCAL_DECAY else 1

    if _BACKEND == "compiled":
        args = (p0, weights, scores)
    else:
        args = (p0.tolist(), weights.tolist(), scores.tolist())
    age_acc, attempts, deliveries, dsum, d2sum, batch_sums = _impl.simulate(
        kind,
        pop.model.lam,
        args[0],
        code,
        args[1],
        args[2],
        config.horizon,
        config.warmup,
        config.seed & MASK64,
        n_batches,
    )
    attempts = np.asarray(attempts, dtype=np.int64)
    deliveries = np.asarray(deliveries, dtype=np.int64)
    dsum = np.asarray(dsum, dtype=np.int64)
    d2sum = np.asarray(d2sum, dtype=np.int64)
    batch_sums = np.asarray(batch_sums, dtype=np.int64)

    avg_aoi = age_acc / (window * n)
    with np.errstate(divide="ignore", invalid="ignore"):
        delta_mean = np.where(deliveries > 0, dsum / deliveries, np.nan)
        delta_m2 = np.where(deliveries > 0, d2sum / deliveries, np.nan)
    lens = np.bincount(
        np.arange(window, dtype=np.int64) * n_batches // window, minlength=n_batches
    )
    batch_means = batch_sums / (lens * n)
    if n_batches >= 2:
        stderr = float(np.std(batch_means, ddof=1) / math.sqrt(n_batches))
    else:
        stderr = float("nan")
    return SimResult(
        avg_aoi=avg_aoi,
        delta_mean=delta_mean,
        delta_m2=delta_m2,
        deliveries=deliveries,
        attempts=attempts,
        seed=config.seed,
        config=config,
        batch_means=batch_means,
        aoi_stderr=stderr,
    )


def inter_delivery_check(result: SimResult) -> float:
    """Empirical age floor from recorded inter-delivery samples:

        (1/2N) sum_n M[delta_n^2] / M[delta_n] + 1/2

    with M the per-terminal sample mean. Requires at least two deliveries
    per terminal; starved terminals raise InsufficientSamplesError. Up to
    statistical error this is a lower bound on ``result.avg_aoi``.
    """
    starved = np.nonzero(result.deliveries < 2)[0]
    if starved.size:
        counts = ", ".join(
            f"terminal {int(i)}: {int(result.deliveries[i])}" for i in starved
        )
        raise InsufficientSamplesError(
            f"need >= 2 deliveries per terminal for inter-delivery statistics "
            f"({counts})"
        )
    n = result.deliveries.size
    ratio = result.delta_m2 / result.delta_mean
    return float(ratio.sum() / (2.0 * n) + 0.5)
