"""Pure NumPy implementations of the second-moment kernels.

All kernels work on the second moment ``M = mu mu^T + Sigma`` of a Gaussian
belief. A mode ``A`` maps it to ``A M A^T`` and the squared Wasserstein
distance to the Dirac at the origin is ``trace(M)``.

Mode stacks have shape ``(m, n, n)``; sequences are integer arrays of
0-based mode indices.
"""

import itertools
import math

import numpy as np

# Largest batch of partial sequences expanded at once by exhaustive_search.
_BATCH_LEAVES = 1 << 16


def propagate_moment(M, A, steps):
    """Hold mode ``A`` for ``steps`` steps starting from ``M``.

    Returns ``(traces, M_end)`` where ``traces`` has ``steps + 1`` entries,
    the first being ``trace(M)``.
    """
    M = np.array(M, dtype=float)
    At = A.T
    traces = np.empty(steps + 1)
    traces[0] = np.trace(M)
    for k in range(steps):
        M = A @ M @ At
        traces[k + 1] = np.trace(M)
    return traces, M


def sequence_traces(M0, modes, seq):
    M = np.array(M0, dtype=float)
    traces = np.empty(len(seq) + 1)
    traces[0] = np.trace(M)
    for k, i in enumerate(seq):
        A = modes[i]
        M = A @ M @ A.T
        traces[k + 1] = np.trace(M)
    return traces


def horizon_costs(M, modes, T):
    """Undiscounted sums ``trace(M_0) + ... + trace(M_T)`` for each held mode.

    Returns ``(sums, end_traces)``, both of length ``m``.
    """
    modes_t = np.transpose(modes, (0, 2, 1))
    Ms = np.broadcast_to(M, modes.shape).copy()
    sums = np.full(len(modes), np.trace(M))
    for _ in range(T):
        Ms = modes @ Ms @ modes_t
        sums += np.trace(Ms, axis1=1, axis2=2)
    end = np.trace(Ms, axis1=1, axis2=2) if T > 0 else sums.copy()
    return sums, end


def exhaustive_search(M0, modes, steps):
    """Minimise ``sum_k trace(M_k)`` over every length-``steps`` sequence.

    Ties go to the lexicographically smallest sequence. Returns
    ``(best_sum, best_sequence)``.
    """
    M0 = np.array(M0, dtype=float)
    m = len(modes)
    if steps == 0:
        return float(np.trace(M0)), np.zeros(0, dtype=np.intp)

    inner = steps if m == 1 else min(steps, max(1, int(math.log(_BATCH_LEAVES) / math.log(m))))
    outer = steps - inner
    modes_t = np.transpose(modes, (0, 2, 1))

    best = math.inf
    best_seq = None
    for prefix in itertools.product(range(m), repeat=outer):
        M = M0
        total = np.trace(M0)
        for i in prefix:
            M = modes[i] @ M @ modes_t[i]
            total += np.trace(M)
        Ms = M[None]
        sums = np.array([total])
        for _ in range(inner):
            # children ordered parent-major so flat index order is lexicographic
            Ms = (modes[None] @ Ms[:, None] @ modes_t[None]).reshape(-1, *M0.shape)
            sums = np.repeat(sums, m) + np.trace(Ms, axis1=1, axis2=2)
        j = int(np.argmin(sums))
        if sums[j] < best:
            best = float(sums[j])
            tail = [0] * inner
            for d in range(inner - 1, -1, -1):
                j, tail[d] = divmod(j, m)
            best_seq = np.array(prefix + tuple(tail), dtype=np.intp)
    return best, best_seq
