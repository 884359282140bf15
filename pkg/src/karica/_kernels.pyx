# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot loops in ``_fallback``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def step_batch(op, gamma, succ):
    cdef long long[:, ::1] t = np.ascontiguousarray(op, dtype=np.int64)
    cdef long long[:, ::1] g = np.ascontiguousarray(gamma, dtype=np.int64)
    cdef long long[::1] s = np.ascontiguousarray(succ, dtype=np.int64)
    cdef Py_ssize_t b, i, nb = g.shape[0], n = g.shape[1]
    out = np.empty((nb, n), dtype=np.int64)
    cdef long long[:, ::1] o = out
    with nogil:
        for b in range(nb):
            for i in range(n):
                if s[i] >= 0:
                    o[b, i] = t[g[b, i], g[b, s[i]]]
                else:
                    o[b, i] = g[b, i]
    return out


def path_lengths(succ, valid, long long cap):
    cdef long long[::1] s = np.ascontiguousarray(succ, dtype=np.int64)
    cdef cnp.uint8_t[::1] v = np.ascontiguousarray(valid, dtype=np.uint8)
    cdef Py_ssize_t n = s.shape[0], i, j, k, top
    out = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] L = out
    stack_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] stack = stack_arr
    # 0 unvisited, 1 on the current walk, 2 done
    state_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] state = state_arr
    cdef long long acc
    with nogil:
        for i in range(n):
            if state[i] == 2:
                continue
            top = 0
            j = i
            while True:
                if state[j] == 2:
                    acc = L[j]
                    break
                if state[j] == 1:
                    acc = cap
                    break
                if not v[j]:
                    state[j] = 2
                    L[j] = 0
                    acc = 0
                    break
                state[j] = 1
                stack[top] = j
                top += 1
                if s[j] < 0:
                    acc = 0
                    break
                j = s[j]
            while top > 0:
                top -= 1
                k = stack[top]
                acc = acc + 1
                if acc > cap:
                    acc = cap
                L[k] = acc
                state[k] = 2
    return out
