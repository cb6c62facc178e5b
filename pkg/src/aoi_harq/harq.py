"""Packet-error models for HARQ retransmissions.

Two decay laws for the error probability of the r-th (re)transmission of
the same packet (r = 0 is the first transmission):

  reciprocal decay   g(r) = p0 / (r + 1)     combining gain of repeated
                                             transmissions over fading
  exponential decay  g(r) = p0 * lam**r      extra redundancy per round in
                                             the finite-blocklength regime

``p0`` is the per-terminal first-transmission error probability; ``lam``
is the decay rate of the exponential model. Retransmission counts are
unbounded: a persistent sender retries until the packet lands.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ParameterError


class ModelKind(enum.Enum):
    RECIPROCAL_DECAY = "fading"
    EXPONENTIAL_DECAY = "fbl"


@dataclass(frozen=True)
class HarqModel:
    """Which decay law applies, plus its parameters.

    ``lam`` is only meaningful for EXPONENTIAL_DECAY and must lie strictly
    inside (0, 1) there.
    """

    kind: ModelKind
    lam: float = 0.5


@dataclass(frozen=True)
class TerminalChannel:
    """Per-terminal channel: first-transmission error probability."""

    p0: float


def validate(model: HarqModel, ch: TerminalChannel) -> None:
    """Raise ParameterError unless (model, channel) parameters are legal.

    p0 = 0 (perfect channel) and p0 = 1 (first attempt always fails) are
    both allowed; lam must be strictly inside (0, 1).
    """
    if not isinstance(model.kind, ModelKind):
        raise ParameterError(f"unknown model kind: {model.kind!r}")
    if model.kind is ModelKind.EXPONENTIAL_DECAY:
        if not (0.0 < model.lam < 1.0):
            raise ParameterError(
                f"lam must be strictly inside (0, 1), got {model.lam!r}"
            )
    if not (0.0 <= ch.p0 <= 1.0):
        raise ParameterError(f"p0 must lie in [0, 1], got {ch.p0!r}")


def error_prob(model: HarqModel, ch: TerminalChannel, r: int) -> float:
    """Error probability of the r-th (re)transmission, r >= 0."""
    validate(model, ch)
    if r < 0:
        raise ParameterError(f"retransmission count must be >= 0, got {r}")
    if model.kind is ModelKind.RECIPROCAL_DECAY:
        return ch.p0 / (r + 1)
    return ch.p0 * model.lam**r


def sample_attempts(model: HarqModel, ch: TerminalChannel, rng) -> int:
    """Number of attempts until the first success, sampled from ``rng``.

    Sequential Bernoulli trials with failure probability g(r) for
    r = 0, 1, 2, ...; returns the 1-based index of the first success.
    ``rng`` is anything with a ``random()`` method returning U[0, 1);
    exactly one draw is consumed per attempt.
    """
    validate(model, ch)
    reciprocal = model.kind is ModelKind.RECIPROCAL_DECAY
    g = ch.p0
    r = 0
    while True:
        if rng.random() >= g:
            return r + 1
        r += 1
        g = ch.p0 / (r + 1) if reciprocal else g * model.lam


def attempt_pmf(model: HarqModel, ch: TerminalChannel, kmax: int) -> list[float]:
    """P(K = k) for k = 1..kmax from the product form
    prod_{i<k-1} g(i) * (1 - g(k-1)); reference mass for distribution tests.
    """
    validate(model, ch)
    pmf = []
    surv = 1.0  # probability the first k-1 attempts all failed
    for k in range(1, kmax + 1):
        g = error_prob(model, ch, k - 1)
        pmf.append(surv * (1.0 - g))
        surv *= g
    return pmf
