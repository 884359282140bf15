"""Pure numpy versions of the hot loops; used when the extension is not built."""

import numpy as np


def step_batch(op, gamma, succ):
    """One synchronous update of a batch of γ rows.

    ``gamma`` is ``(B, N)``; ``succ[i]`` is the successor of cell ``i`` or -1
    when the cell is inactive.
    """
    gamma = np.asarray(gamma, dtype=np.int64)
    succ = np.asarray(succ, dtype=np.int64)
    active = succ >= 0
    idx = np.where(active, succ, np.arange(len(succ)))
    new = op[gamma, gamma[:, idx]]
    return np.where(active, new, gamma)


def path_lengths(succ, valid, cap):
    """Valid cells on the forward path from each cell, capped at ``cap``.

    ``succ[i]`` is -1 when the path stops after cell ``i``.  Cycles hit the cap.
    """
    succ = np.asarray(succ, dtype=np.int64)
    length = np.asarray(valid, dtype=np.int64).copy()
    nxt = np.where(length > 0, succ, -1)
    hops = 1
    while hops < cap and np.any(nxt >= 0):
        live = nxt >= 0
        add = np.zeros_like(length)
        add[live] = length[nxt[live]]
        length = np.minimum(length + add, cap)
        nn = np.full_like(nxt, -1)
        nn[live] = nxt[nxt[live]]
        nxt = nn
        hops *= 2
    return np.minimum(length, cap)
