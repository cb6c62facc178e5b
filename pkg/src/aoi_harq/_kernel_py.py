"""Pure-Python simulation kernel.

Fallback used when the compiled extension (`aoi_harq._kernel`) is not
available. Both kernels implement the identical slot loop over the
identical counter-based random stream and must produce bit-identical
outputs; `tests/test_sim.py` enforces that whenever the extension is
importable.

Contract (shared with the compiled kernel): one terminal is scheduled per
slot; the scheduled terminal's transmission fails with the error
probability of its packet's current retransmission count; every other
terminal's age grows by one. Ages are recorded after the slot's
transition. The trial draw for terminal ``n`` at slot ``t`` is the
counter-based uniform for lane ``n``, counter ``t``; randomized
scheduling decisions draw from lane ``N``.

Ages are stored as offsets: terminal i's age at the end of slot t is
``base[i] + t``, so the per-slot aging of unscheduled terminals is
implicit and only deliveries write state.
"""

from .rng import MASK64, _LANE_MULT, _SLOT_MULT, seed_state

_INV_2_53 = 1.0 / 9007199254740992.0


def simulate(kind, lam, p0, policy, weights, scores, horizon, warmup, seed, n_batches):
    """Run one simulation; see module docstring for conventions.

    Returns (age_acc, attempts, deliveries, dsum, d2sum, batch_sums) where
    age_acc is the summed post-transition system age over the measurement
    window and the per-terminal lists count attempts, deliveries, and the
    first two power sums of inter-delivery times.
    """
    n = len(p0)
    window = horizon - warmup
    seedst = seed_state(seed)

    def u01(lane, counter):
        z = seedst ^ ((lane * _LANE_MULT) & MASK64)
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        z ^= z >> 31
        z ^= (counter * _SLOT_MULT) & MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        z ^= z >> 31
        return (z >> 11) * _INV_2_53

    base = [1] * n  # age(i, t) = base[i] + t
    r = [0] * n
    in_flight = [False] * n
    g_cur = list(p0)
    attempts = [0] * n
    deliveries = [0] * n
    dsum = [0] * n
    d2sum = [0] * n
    last = [0] * n
    batch_sums = [0] * n_batches

    age_total = n
    age_acc = 0
    cursor = 0
    active = -1  # in-flight terminal of the index policy, -1 if none

    for t in range(1, horizon + 1):
        # -- scheduling decision
        if policy == 0:  # round-robin, persistent
            sched = cursor
            is_old = in_flight[sched]
        elif policy == 1:  # round-robin, fresh packet each attempt
            sched = cursor
            is_old = False
        elif policy == 2:  # greedy max-age (argmax of base ~ argmax of age)
            sched = 0
            for i in range(1, n):
                if base[i] > base[sched]:
                    sched = i
            is_old = False
        elif policy == 3:  # stationary randomized, persistent per packet
            u = u01(n, t)
            sched = n - 1
            acc = 0.0
            for i in range(n):
                acc += weights[i]
                if u < acc:
                    sched = i
                    break
            is_old = in_flight[sched]
        else:  # age-index, persistent per burst
            if active >= 0:
                sched = active
                is_old = True
            else:
                sched = 0
                best = (base[0] + t - 1) * scores[0]
                for i in range(1, n):
                    s = (base[i] + t - 1) * scores[i]
                    if s > best:
                        best = s
                        sched = i
                is_old = False

        attempts[sched] += 1
        p = g_cur[sched] if is_old else p0[sched]

        age_total += n
        if u01(sched, t) < p:  # failed attempt; everyone just ages
            if is_old:
                r[sched] += 1
                if kind == 0:
                    g_cur[sched] = p0[sched] / (r[sched] + 1)
                else:
                    g_cur[sched] = g_cur[sched] * lam
            else:
                r[sched] = 1
                in_flight[sched] = True
                if kind == 0:
                    g_cur[sched] = p0[sched] / 2
                else:
                    g_cur[sched] = p0[sched] * lam
                if policy == 4:
                    active = sched
        else:  # delivery: age drops to the delivered packet's own age
            new_h = (r[sched] + 1) if is_old else 1
            age_total += new_h - (base[sched] + t)
            base[sched] = new_h - t
            r[sched] = 0
            in_flight[sched] = False
            g_cur[sched] = p0[sched]
            deliveries[sched] += 1
            delta = t - last[sched]
            dsum[sched] += delta
            d2sum[sched] += delta * delta
            last[sched] = t
            if policy <= 1:
                cursor = sched + 1
                if cursor == n:
                    cursor = 0
            elif policy == 4:
                active = -1

        if t > warmup:
            age_acc += age_total
            batch_sums[(t - warmup - 1) * n_batches // window] += age_total

    return age_acc, attempts, deliveries, dsum, d2sum, batch_sums
