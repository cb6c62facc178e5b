# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled simulation kernel.

Mirrors ``aoi_harq._kernel_py.simulate`` statement for statement; the two
must stay bit-identical (same counter-based draws, same IEEE arithmetic,
same tie-breaking). See the pure-Python module for the documented
contract, including the ``base[i] + t`` age representation.
"""

import numpy as np

from libc.stdint cimport int64_t, uint64_t

cdef uint64_t SEED_TAG = 0xA0761D6478BD642F
cdef uint64_t LANE_MULT = 0xE7037ED1A0B428DB
cdef uint64_t SLOT_MULT = 0x8EBC6AF09C88C6E3
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * (<uint64_t>0xBF58476D1CE4E5B9)
    z = (z ^ (z >> 27)) * (<uint64_t>0x94D049BB133111EB)
    return z ^ (z >> 31)


cdef inline double _u01(uint64_t seedst, uint64_t lane, uint64_t counter) noexcept nogil:
    cdef uint64_t z = _mix64(seedst ^ (lane * LANE_MULT))
    z = _mix64(z ^ (counter * SLOT_MULT))
    return <double>(z >> 11) * INV_2_53


def simulate(int kind, double lam, double[::1] p0, int policy,
             double[::1] weights, double[::1] scores,
             int64_t horizon, int64_t warmup, uint64_t seed, int n_batches):
    """Compiled counterpart of ``_kernel_py.simulate``; same contract."""
    cdef int n = p0.shape[0]
    cdef int64_t window = horizon - warmup
    cdef uint64_t seedst = _mix64(seed ^ SEED_TAG)

    base_arr = np.ones(n, dtype=np.int64)
    r_arr = np.zeros(n, dtype=np.int64)
    fl_arr = np.zeros(n, dtype=np.int64)
    g_arr = np.array(p0, dtype=np.float64, copy=True)
    attempts_arr = np.zeros(n, dtype=np.int64)
    deliveries_arr = np.zeros(n, dtype=np.int64)
    dsum_arr = np.zeros(n, dtype=np.int64)
    d2sum_arr = np.zeros(n, dtype=np.int64)
    last_arr = np.zeros(n, dtype=np.int64)
    batch_arr = np.zeros(n_batches, dtype=np.int64)

    cdef int64_t[::1] base = base_arr
    cdef int64_t[::1] r = r_arr
    cdef int64_t[::1] in_flight = fl_arr
    cdef double[::1] g_cur = g_arr
    cdef int64_t[::1] attempts = attempts_arr
    cdef int64_t[::1] deliveries = deliveries_arr
    cdef int64_t[::1] dsum = dsum_arr
    cdef int64_t[::1] d2sum = d2sum_arr
    cdef int64_t[::1] last = last_arr
    cdef int64_t[::1] batch_sums = batch_arr

    cdef int64_t age_total = n
    cdef int64_t age_acc = 0
    cdef int cursor = 0
    cdef int active = -1
    cdef int64_t t, new_h, delta
    cdef int i, sched
    cdef bint is_old
    cdef double p, u, acc, best, s

    with nogil:
        for t in range(1, horizon + 1):
            # -- scheduling decision
            if policy == 0:  # round-robin, persistent
                sched = cursor
                is_old = in_flight[sched] != 0
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
                u = _u01(seedst, <uint64_t>n, <uint64_t>t)
                sched = n - 1
                acc = 0.0
                for i in range(n):
                    acc += weights[i]
                    if u < acc:
                        sched = i
                        break
                is_old = in_flight[sched] != 0
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
            if _u01(seedst, <uint64_t>sched, <uint64_t>t) < p:
                # failed attempt; everyone just ages
                if is_old:
                    r[sched] += 1
                    if kind == 0:
                        g_cur[sched] = p0[sched] / (r[sched] + 1)
                    else:
                        g_cur[sched] = g_cur[sched] * lam
                else:
                    r[sched] = 1
                    in_flight[sched] = 1
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
                in_flight[sched] = 0
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

    return (
        int(age_acc),
        attempts_arr,
        deliveries_arr,
        dsum_arr,
        d2sum_arr,
        batch_arr,
    )
