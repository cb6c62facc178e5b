"""Counter-based random streams.

Every uniform draw is a pure function of (seed, lane, counter), so any
draw can be regenerated in isolation: simulations assign one lane per
terminal (plus one extra lane for scheduling decisions) and use the slot
index as the counter, which makes runs reproducible slot-by-slot and
safe to execute in parallel. The compiled simulation kernel implements
the identical bit-level arithmetic, so both backends consume identical
streams.
"""

MASK64 = 0xFFFFFFFFFFFFFFFF

_SEED_TAG = 0xA0761D6478BD642F
_LANE_MULT = 0xE7037ED1A0B428DB
_SLOT_MULT = 0x8EBC6AF09C88C6E3

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a 64-bit bijective scrambler."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def seed_state(seed: int) -> int:
    """Pre-mixed seed word shared by all lanes of one run."""
    return mix64((seed & MASK64) ^ _SEED_TAG)


def trial_uniform(seed: int, lane: int, counter: int) -> float:
    """Uniform draw in [0, 1) for (seed, lane, counter).

    53-bit resolution; strictly less than 1.
    """
    h = mix64(seed_state(seed) ^ ((lane * _LANE_MULT) & MASK64))
    h = mix64(h ^ ((counter * _SLOT_MULT) & MASK64))
    return (h >> 11) * _INV_2_53


def derive_seed(seed: int, a: int, b: int) -> int:
    """Derive an independent 64-bit child seed from (seed, a, b).

    Used to give sweep points and repeated runs their own streams.
    """
    h = mix64(seed_state(seed) ^ ((a * _LANE_MULT) & MASK64))
    return mix64(h ^ ((b * _SLOT_MULT) & MASK64))


class CounterRng:
    """Sequential view over one lane of the counter-based stream.

    Exposes the ``random()`` method shared with ``numpy.random.Generator``
    so it can be passed anywhere a seeded stream is expected. ``lane`` and
    ``counter`` are plain attributes; tests reposition them to replay the
    exact draw a simulation kernel consumed at a given slot.
    """

    def __init__(self, seed: int, lane: int = 0, counter: int = 1):
        self.seed = seed
        self.lane = lane
        self.counter = counter

    def random(self) -> float:
        u = trial_uniform(self.seed, self.lane, self.counter)
        self.counter += 1
        return u
