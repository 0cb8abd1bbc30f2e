# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled kernels for exhaustive checks on multiplication tables.

Every function mirrors one in ``_kernels_py`` with identical semantics.
Tables are C-contiguous int64 arrays.
"""

import numpy as np

from libc.stdint cimport int64_t


def find_nonassociative(const int64_t[:, ::1] table):
    cdef Py_ssize_t n = table.shape[0]
    cdef Py_ssize_t a, b, c
    cdef int64_t ab
    for a in range(n):
        for b in range(n):
            ab = table[a, b]
            for c in range(n):
                if table[ab, c] != table[a, table[b, c]]:
                    return (a, b, c)
    return None


def closure(const int64_t[:, ::1] table, object gens, int64_t identity):
    cdef Py_ssize_t n = table.shape[0]
    cdef Py_ssize_t ng = len(gens)
    cdef int64_t[::1] g = np.asarray(gens, dtype=np.int64)
    cdef unsigned char[::1] seen = np.zeros(n, dtype=np.uint8)
    cdef int64_t[::1] queue = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t head = 0, tail = 0, k
    cdef int64_t x, y
    seen[identity] = 1
    queue[tail] = identity
    tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        for k in range(ng):
            y = table[x, g[k]]
            if not seen[y]:
                seen[y] = 1
                queue[tail] = y
                tail += 1
    return [i for i in range(n) if seen[i]]


def find_nonnormal(const int64_t[:, ::1] table, const int64_t[::1] inverse,
                   object members, object conjugators):
    cdef Py_ssize_t n = table.shape[0]
    cdef unsigned char[::1] mask = np.zeros(n, dtype=np.uint8)
    cdef int64_t[::1] mem = np.asarray(members, dtype=np.int64)
    cdef int64_t[::1] conj = np.asarray(conjugators, dtype=np.int64)
    cdef Py_ssize_t i, j
    cdef int64_t g, h, c
    for i in range(mem.shape[0]):
        mask[mem[i]] = 1
    for i in range(conj.shape[0]):
        g = conj[i]
        for j in range(mem.shape[0]):
            h = mem[j]
            c = table[table[g, h], inverse[g]]
            if not mask[c]:
                return (g, h)
    return None


def find_nonhomomorphic(const int64_t[:, ::1] src, const int64_t[:, ::1] tgt,
                        const int64_t[::1] images):
    cdef Py_ssize_t n = src.shape[0]
    cdef Py_ssize_t a, b
    for a in range(n):
        for b in range(n):
            if images[src[a, b]] != tgt[images[a], images[b]]:
                return (a, b)
    return None
