"""Moments of the per-packet attempt count K under persistent HARQ.

K is the number of consecutive transmission attempts until a packet is
first delivered, with attempt-r error probability g(r). Its distribution
is the product form P(K = r+1) = prod_{i<r} g(i) * (1 - g(r)), which
telescopes into the series

  reciprocal decay:   E[K]   = sum_r p0^r / r!            = exp(p0)
                      E[K^2] = sum_r (2r+1) p0^r / r!     = (1+2 p0) exp(p0)
  exponential decay:  E[K]   = sum_r p0^r lam^(r(r-1)/2)        (no closed form)
                      E[K^2] = sum_r (2r+1) p0^r lam^(r(r-1)/2)

The exponential-decay sums are evaluated by a truncated series with a
certified geometric tail majorant (`series_oracle`, also usable for the
reciprocal model as an independent cross-check of the closed forms), or
bounded from above in closed form (`ek2_upper`, `ek2_upper_truncated`,
`ek2sq_upper`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ParameterError
from .harq import HarqModel, ModelKind, TerminalChannel, validate


class Moment(enum.Enum):
    FIRST = 1
    SECOND = 2


class Exactness(enum.Enum):
    EXACT = "exact"
    UPPER_BOUND = "upper-bound"


class MomentMode(enum.Enum):
    PREFER_EXACT = "prefer-exact"
    PREFER_BOUND = "prefer-bound"


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of K for one terminal.

    ``ek`` is E[K] in slots, ``ek2`` is E[K^2] in slots^2. With
    exactness = UPPER_BOUND both values are certified upper bounds.
    """

    ek: float
    ek2: float
    exactness: Exactness


def ek1_closed(p0: float) -> float:
    """E[K] under reciprocal decay: exp(p0)."""
    _check_p0(p0)
    return math.exp(p0)


def ek1sq_closed(p0: float) -> float:
    """E[K^2] under reciprocal decay: (1 + 2 p0) exp(p0)."""
    _check_p0(p0)
    return (1.0 + 2.0 * p0) * math.exp(p0)


def series_oracle(
    model: HarqModel, p0: float, which: Moment, tol: float = 1e-12
) -> float:
    """Direct summation of E[K] or E[K^2], truncated with a certified tail.

    Terms are added until a geometric majorant of the remaining tail drops
    below ``tol``, so the returned value is within ``tol`` of the infinite
    sum. Both models converge for any p0 in [0, 1] (and lam in (0, 1)).
    """
    validate(model, TerminalChannel(p0))
    if tol <= 0.0:
        raise ParameterError(f"tol must be positive, got {tol!r}")
    exponential = model.kind is ModelKind.EXPONENTIAL_DECAY
    lam = model.lam

    def ratio(r: int) -> float:
        # t_{r+1} / t_r for the base term; decreasing in r for both laws.
        return p0 * lam**r if exponential else p0 / (r + 1)

    total = 0.0
    t = 1.0  # base term t_0
    r = 0
    while True:
        total += (2 * r + 1) * t if which is Moment.SECOND else t
        t_next = t * ratio(r)
        # Tail after index r: base ratio is bounded by ratio(r+1) from
        # index r+1 on; the (2j+1) coefficient grows by at most
        # (2r+5)/(2r+3) per step there.
        q = ratio(r + 1)
        if which is Moment.SECOND:
            q *= (2 * r + 5) / (2 * r + 3)
            head = (2 * r + 3) * t_next
        else:
            head = t_next
        if q < 1.0 and head / (1.0 - q) <= tol:
            return total
        t = t_next
        r += 1
        if r > 1_000_000:  # unreachable for legal parameters
            raise RuntimeError("series did not certify convergence")


def ek2_upper(p0: float, lam: float) -> float:
    """Closed-form upper bound on E[K] under exponential decay:

        1 + (1 + sqrt(2*pi / -log(lam))) * p0

    Dominates series_oracle(..., FIRST) for all legal parameters.
    """
    _check_lam(lam)
    _check_p0(p0)
    return 1.0 + (1.0 + math.sqrt(2.0 * math.pi / -math.log(lam))) * p0


def ek2_upper_truncated(p0: float, lam: float, R: int) -> float:
    """Tighter upper bound on E[K] under exponential decay: sum the first
    R series terms exactly and majorize the tail,

        sum_{r<R} p0^r lam^(r(r-1)/2)
          + (1 + sqrt(2*pi / -log(lam))) * p0^R lam^(R(R-1)/2).

    R = 1 reproduces ek2_upper exactly.
    """
    _check_lam(lam)
    _check_p0(p0)
    if R < 1:
        raise ParameterError(f"truncation R must be >= 1, got {R}")
    head = 0.0
    t = 1.0
    for r in range(R):
        head += t
        t *= p0 * lam**r
    # t is now p0^R lam^(R(R-1)/2)
    return head + (1.0 + math.sqrt(2.0 * math.pi / -math.log(lam))) * t


def ek2sq_upper(p0: float, lam: float, ek2: float) -> float:
    """Upper bound on E[K^2] under exponential decay, in terms of an E[K]
    value ``ek2``:

        (2 log(p0) - 2)/log(lam) - 1 + (2 - 2 log(p0)/log(lam)) * ek2

    The coefficient of ``ek2`` changes sign at p0 = lam, so which E[K]
    value keeps this a certified bound depends on the regime: pass an
    upper bound on E[K] when p0 >= lam and the exact (series) value when
    p0 < lam. `moment_set` applies that selection. p0 = 0 is rejected
    (log(p0) diverges); use series_oracle for perfect channels.
    """
    _check_lam(lam)
    _check_p0(p0)
    if p0 == 0.0:
        raise ParameterError("ek2sq_upper is undefined at p0 = 0; use series_oracle")
    if ek2 < 1.0:
        raise ParameterError(f"ek2 must be >= 1, got {ek2!r}")
    lp = math.log(p0)
    ll = math.log(lam)
    return (2.0 * lp - 2.0) / ll - 1.0 + (2.0 - 2.0 * lp / ll) * ek2


def moment_set(
    model: HarqModel,
    ch: TerminalChannel,
    mode: MomentMode = MomentMode.PREFER_EXACT,
    r_trunc: int = 4,
) -> MomentSet:
    """Moments of K for one terminal, exact or certified-upper-bound.

    Reciprocal decay always uses the closed forms (exact). Exponential
    decay uses the series oracle at tol 1e-12 when exact values are
    requested, and the closed-form bounds (truncation ``r_trunc`` for
    E[K]) when bounds are requested. A perfect channel degenerates to
    K = 1 in either mode.
    """
    validate(model, ch)
    p0 = ch.p0
    if model.kind is ModelKind.RECIPROCAL_DECAY:
        return MomentSet(ek1_closed(p0), ek1sq_closed(p0), Exactness.EXACT)
    if p0 == 0.0:
        return MomentSet(1.0, 1.0, Exactness.EXACT)
    if mode is MomentMode.PREFER_EXACT:
        return MomentSet(
            series_oracle(model, p0, Moment.FIRST),
            series_oracle(model, p0, Moment.SECOND),
            Exactness.EXACT,
        )
    ek = ek2_upper_truncated(p0, model.lam, r_trunc)
    # E[K] feed that keeps ek2sq_upper a certified bound (see its docstring):
    # the coefficient (2 - 2 log p0 / log lam) is >= 0 iff p0 >= lam.
    if p0 >= model.lam:
        feed = ek2_upper(p0, model.lam)
    else:
        feed = series_oracle(model, p0, Moment.FIRST)
    return MomentSet(ek, ek2sq_upper(p0, model.lam, feed), Exactness.UPPER_BOUND)


def _check_p0(p0: float) -> None:
    if not (0.0 <= p0 <= 1.0):
        raise ParameterError(f"p0 must lie in [0, 1], got {p0!r}")


def _check_lam(lam: float) -> None:
    if not (0.0 < lam < 1.0):
        raise ParameterError(f"lam must be strictly inside (0, 1), got {lam!r}")
