"""Scheduling policies: map system state to (terminal, new-or-old packet).

All policies are pure functions of their arguments; round-robin cursors
and randomized draws are owned by the caller (the simulation engine keeps
the cursor and advances it on delivery). States are objects exposing
``h`` (age), ``r`` (prior transmissions of the in-flight packet) and
``in_flight``. Ties always break toward the lowest terminal index so runs
are reproducible.

String ids used on the command line: ``rrp`` (persistent round-robin),
``rr1`` (round-robin, fresh packet every attempt), ``greedy`` (highest
age first), ``rand`` (stationary randomized), ``index`` (age scaled by
expected attempt count).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ParameterError


class Packet(enum.Enum):
    NEW = "new"
    OLD = "old"


@dataclass(frozen=True)
class Action:
    """Schedule ``terminal`` (0-based) with a NEW packet or the OLD one."""

    terminal: int
    packet: Packet


# Canonical table; the position of an id is its stable numeric code,
# used both by the kernels and for deriving per-point sweep seeds.
POLICY_IDS = ("rrp", "rr1", "greedy", "rand", "index")


def policy_code(policy: str) -> int:
    try:
        return POLICY_IDS.index(policy)
    except ValueError:
        raise ParameterError(
            f"unknown policy {policy!r}; expected one of {', '.join(POLICY_IDS)}"
        ) from None


def rr_persistent(states: Sequence, cursor: int) -> Action:
    """Stay on the cursor terminal, retransmitting its in-flight packet
    until delivery; the engine advances the cursor cyclically on success."""
    return Action(cursor, Packet.OLD if states[cursor].in_flight else Packet.NEW)


def rr_type1(states: Sequence, cursor: int) -> Action:
    """Like rr_persistent but every attempt sends a fresh packet, so each
    attempt fails with the first-transmission error probability."""
    return Action(cursor, Packet.NEW)


def greedy_max_age(states: Sequence) -> Action:
    """Schedule the terminal with the highest current age, fresh packet."""
    best = 0
    for i in range(1, len(states)):
        if states[i].h > states[best].h:
            best = i
    return Action(best, Packet.NEW)


def stationary_randomized(states: Sequence, weights: Sequence[float], rng) -> Action:
    """Sample a terminal from ``weights`` each slot; continue its in-flight
    packet if it has one, otherwise start a fresh one.

    Weights must be nonnegative with a positive sum; they are normalized
    here. Consumes exactly one draw from ``rng``.
    """
    total = _check_weights(states, weights)
    u = rng.random() * total
    acc = 0.0
    pick = len(states) - 1
    for i, w in enumerate(weights):
        acc += w
        if u < acc:
            pick = i
            break
    return Action(pick, Packet.OLD if states[pick].in_flight else Packet.NEW)


def age_index(states: Sequence, moments: Sequence[float]) -> Action:
    """Schedule argmax of h_n / sqrt(E[K_n]); persist on an in-flight
    packet until it delivers.

    ``moments`` holds each terminal's mean attempt count E[K]. The score
    is invariant to rescaling all E[K] by a common factor.
    """
    for i, s in enumerate(states):
        if s.in_flight:
            return Action(i, Packet.OLD)
    # Multiply by the reciprocal root (not divide) so the score arithmetic
    # matches the simulation kernels bit for bit.
    best = 0
    best_score = states[0].h * (1.0 / math.sqrt(moments[0]))
    for i in range(1, len(states)):
        score = states[i].h * (1.0 / math.sqrt(moments[i]))
        if score > best_score:
            best = i
            best_score = score
    return Action(best, Packet.NEW)


def default_randomized_weights(moments: Sequence[float]) -> list[float]:
    """Access weights proportional to sqrt(E[K_n]), normalized to sum 1."""
    raw = [math.sqrt(m) for m in moments]
    total = sum(raw)
    return [w / total for w in raw]


def _check_weights(states: Sequence, weights: Sequence[float]) -> float:
    if len(weights) != len(states):
        raise ParameterError(
            f"got {len(weights)} weights for {len(states)} terminals"
        )
    if any(w < 0.0 or not math.isfinite(w) for w in weights):
        raise ParameterError("weights must be finite and nonnegative")
    total = float(sum(weights))
    if total <= 0.0:
        raise ParameterError("weights must have a positive sum")
    return total
