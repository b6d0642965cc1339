# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-loop kernels.

Semantics (including float evaluation order and libm calls) mirror
``_fallback.py`` exactly; the two backends are interchangeable and produce
bit-identical trajectories from the same pre-drawn randomness.
"""

from libc.math cimport tanh, atanh

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def swap_chunk(cnp.int64_t[::1] perm, cnp.int64_t[::1] edges):
    cdef Py_ssize_t n = perm.shape[0]
    cdef Py_ssize_t idx, v, w
    cdef cnp.int64_t tmp
    for idx in range(edges.shape[0]):
        v = edges[idx]
        w = v + 1
        if w == n:
            w = 0
        tmp = perm[v]
        perm[v] = perm[w]
        perm[w] = tmp


def sep_chunk(cnp.uint8_t[::1] occ, cnp.int64_t[::1] edges):
    cdef Py_ssize_t n = occ.shape[0]
    cdef Py_ssize_t idx, v, w
    cdef cnp.uint8_t tmp
    for idx in range(edges.shape[0]):
        v = edges[idx]
        w = v + 1
        if w == n:
            w = 0
        if occ[v] != occ[w]:
            tmp = occ[v]
            occ[v] = occ[w]
            occ[w] = tmp


def gap_chunk(cnp.int64_t[::1] g, cnp.int64_t[::1] moves):
    cdef Py_ssize_t k = g.shape[0]
    cdef Py_ssize_t idx, i, j
    cdef cnp.int64_t t
    for idx in range(moves.shape[0]):
        t = moves[idx]
        if t < 0:
            continue
        i = t >> 1
        j = i - 1 if i else k - 1
        if t & 1:
            if g[j] > 1:
                g[i] += 1
                g[j] -= 1
        else:
            if g[i] > 1:
                g[i] -= 1
                g[j] += 1


def coupled_gap_chunk(cnp.int64_t[::1] g, cnp.int64_t[::1] gp,
                      cnp.int64_t[::1] moves):
    cdef Py_ssize_t k = g.shape[0]
    cdef Py_ssize_t idx, i, j
    cdef cnp.int64_t t
    cdef long long violations = 0
    for idx in range(moves.shape[0]):
        t = moves[idx]
        if t < 0:
            continue
        i = t >> 1
        j = i - 1 if i else k - 1
        if t & 1:
            if g[j] > 1:
                g[i] += 1
                g[j] -= 1
            if gp[j] > 1:
                gp[i] += 1
                gp[j] -= 1
        else:
            if g[i] > 1:
                g[i] -= 1
                g[j] += 1
            if gp[i] > 1:
                gp[i] -= 1
                gp[j] += 1
        if gp[i] > g[i] or gp[j] > g[j]:
            violations += 1
    return violations


def metropolis_chunk(cnp.int8_t[::1] spins, cnp.int64_t[::1] bit_ptr,
                     cnp.int32_t[::1] bit_checks, cnp.uint8_t[::1] check_unsat,
                     cnp.int64_t[::1] sites, cnp.float64_t[::1] urand,
                     cnp.float64_t[::1] accept, long deg_max,
                     long long unsat_count):
    cdef Py_ssize_t idx, s, lo, hi, e
    cdef long hits, delta
    cdef cnp.int32_t c
    for idx in range(sites.shape[0]):
        s = sites[idx]
        lo = bit_ptr[s]
        hi = bit_ptr[s + 1]
        hits = 0
        for e in range(lo, hi):
            hits += check_unsat[bit_checks[e]]
        delta = (hi - lo) - 2 * hits
        if urand[idx] < accept[delta + deg_max]:
            spins[s] = -spins[s]
            for e in range(lo, hi):
                c = bit_checks[e]
                check_unsat[c] ^= 1
            unsat_count += delta
    return unsat_count


def flip_decode_run(cnp.uint8_t[::1] word, cnp.int64_t[::1] bit_ptr,
                    cnp.int32_t[::1] bit_checks, cnp.uint8_t[::1] check_unsat,
                    cnp.int64_t[::1] order, long long unsat_count,
                    long long max_sweeps):
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t idx, s, lo, hi, e
    cdef long hits, delta
    cdef cnp.int32_t c
    cdef long long flips = 0, sweeps = 0, flipped_this_sweep
    while unsat_count > 0 and sweeps < max_sweeps:
        sweeps += 1
        flipped_this_sweep = 0
        for idx in range(n):
            s = order[idx]
            lo = bit_ptr[s]
            hi = bit_ptr[s + 1]
            hits = 0
            for e in range(lo, hi):
                hits += check_unsat[bit_checks[e]]
            delta = (hi - lo) - 2 * hits
            if delta < 0:
                word[s] ^= 1
                for e in range(lo, hi):
                    c = bit_checks[e]
                    check_unsat[c] ^= 1
                unsat_count += delta
                flips += 1
                flipped_this_sweep += 1
                if unsat_count == 0:
                    return unsat_count, flips, sweeps
        if flipped_this_sweep == 0:
            break
    return unsat_count, flips, sweeps


cdef bint _posterior_and_check(cnp.float64_t[::1] llr0, cnp.int32_t[::1] edge_bit,
                               cnp.int64_t[::1] check_ptr, cnp.uint8_t[::1] hard,
                               cnp.float64_t[::1] c2v, cnp.float64_t[::1] marg):
    cdef Py_ssize_t n = llr0.shape[0]
    cdef Py_ssize_t n_edges = edge_bit.shape[0]
    cdef Py_ssize_t m = check_ptr.shape[0] - 1
    cdef Py_ssize_t b, e, j
    cdef int par
    for b in range(n):
        marg[b] = llr0[b]
    for e in range(n_edges):
        marg[edge_bit[e]] += c2v[e]
    for b in range(n):
        hard[b] = 1 if marg[b] < 0.0 else 0
    for j in range(m):
        par = 0
        for e in range(check_ptr[j], check_ptr[j + 1]):
            par ^= hard[edge_bit[e]]
        if par:
            return False
    return True


def bp_decode_run(cnp.float64_t[::1] llr0, cnp.int32_t[::1] edge_bit,
                  cnp.int64_t[::1] check_ptr, cnp.uint8_t[::1] hard,
                  long max_iters):
    cdef Py_ssize_t n = llr0.shape[0]
    cdef Py_ssize_t n_edges = edge_bit.shape[0]
    cdef Py_ssize_t m = check_ptr.shape[0] - 1
    cdef cnp.float64_t[::1] c2v = np.zeros(n_edges)
    cdef cnp.float64_t[::1] v2c = np.zeros(n_edges)
    cdef cnp.float64_t[::1] marg = np.zeros(n)
    cdef Py_ssize_t b, e, j, lo, hi
    cdef long it
    cdef double v, t, fwd, bwd, prod

    if _posterior_and_check(llr0, edge_bit, check_ptr, hard, c2v, marg):
        return True, 0

    for it in range(1, max_iters + 1):
        for b in range(n):
            marg[b] = llr0[b]
        for e in range(n_edges):
            marg[edge_bit[e]] += c2v[e]
        for e in range(n_edges):
            v = marg[edge_bit[e]] - c2v[e]
            if v > 35.0:
                v = 35.0
            elif v < -35.0:
                v = -35.0
            v2c[e] = tanh(0.5 * v)
        for j in range(m):
            lo = check_ptr[j]
            hi = check_ptr[j + 1]
            fwd = 1.0
            for e in range(lo, hi):
                t = v2c[e]
                v2c[e] = fwd
                fwd *= t
                c2v[e] = t
            bwd = 1.0
            for e in range(hi - 1, lo - 1, -1):
                t = c2v[e]
                prod = v2c[e] * bwd
                bwd *= t
                if prod > 0.9999999999999998:
                    prod = 0.9999999999999998
                elif prod < -0.9999999999999998:
                    prod = -0.9999999999999998
                c2v[e] = 2.0 * atanh(prod)
        if _posterior_and_check(llr0, edge_bit, check_ptr, hard, c2v, marg):
            return True, it
    return False, max_iters


def bp_decode_serial(cnp.float64_t[::1] llr0, cnp.int32_t[::1] edge_bit,
                     cnp.int64_t[::1] check_ptr, cnp.uint8_t[::1] hard,
                     long max_iters):
    cdef Py_ssize_t n = llr0.shape[0]
    cdef Py_ssize_t n_edges = edge_bit.shape[0]
    cdef Py_ssize_t m = check_ptr.shape[0] - 1
    cdef cnp.float64_t[::1] c2v = np.zeros(n_edges)
    cdef cnp.float64_t[::1] marg = np.zeros(n)
    cdef Py_ssize_t b, e, j, lo, hi, deg, i, deg_max
    cdef long it
    cdef int par
    cdef double v, t, bwd, prod, new

    for b in range(n):
        marg[b] = llr0[b]
    deg_max = 0
    for j in range(m):
        if check_ptr[j + 1] - check_ptr[j] > deg_max:
            deg_max = check_ptr[j + 1] - check_ptr[j]
    cdef cnp.float64_t[::1] ts = np.zeros(max(deg_max, 1))
    cdef cnp.float64_t[::1] pref = np.zeros(deg_max + 1)

    # initial hard decision / stop
    for b in range(n):
        hard[b] = 1 if marg[b] < 0.0 else 0
    par = 0
    for j in range(m):
        par = 0
        for e in range(check_ptr[j], check_ptr[j + 1]):
            par ^= hard[edge_bit[e]]
        if par:
            break
    if not par:
        return True, 0

    for it in range(1, max_iters + 1):
        for j in range(m):
            lo = check_ptr[j]
            hi = check_ptr[j + 1]
            deg = hi - lo
            pref[0] = 1.0
            for i in range(deg):
                v = marg[edge_bit[lo + i]] - c2v[lo + i]
                if v > 35.0:
                    v = 35.0
                elif v < -35.0:
                    v = -35.0
                t = tanh(0.5 * v)
                ts[i] = t
                pref[i + 1] = pref[i] * t
            bwd = 1.0
            for i in range(deg - 1, -1, -1):
                prod = pref[i] * bwd
                bwd *= ts[i]
                if prod > 0.9999999999999998:
                    prod = 0.9999999999999998
                elif prod < -0.9999999999999998:
                    prod = -0.9999999999999998
                new = 2.0 * atanh(prod)
                e = lo + i
                marg[edge_bit[e]] += new - c2v[e]
                c2v[e] = new
        for b in range(n):
            hard[b] = 1 if marg[b] < 0.0 else 0
        par = 0
        for j in range(m):
            par = 0
            for e in range(check_ptr[j], check_ptr[j + 1]):
                par ^= hard[edge_bit[e]]
            if par:
                break
        if not par:
            return True, it
    return False, max_iters


def bp_posteriors(cnp.float64_t[::1] llr0, cnp.int32_t[::1] edge_bit,
                  cnp.int64_t[::1] check_ptr, long n_iters):
    cdef Py_ssize_t n = llr0.shape[0]
    cdef Py_ssize_t n_edges = edge_bit.shape[0]
    cdef Py_ssize_t m = check_ptr.shape[0] - 1
    cdef cnp.float64_t[::1] c2v = np.zeros(n_edges)
    cdef cnp.float64_t[::1] v2c = np.zeros(n_edges)
    out = np.zeros(n)
    cdef cnp.float64_t[::1] marg = out
    cdef Py_ssize_t b, e, j, lo, hi
    cdef long it
    cdef double v, t, fwd, bwd, prod
    for it in range(n_iters):
        for b in range(n):
            marg[b] = llr0[b]
        for e in range(n_edges):
            marg[edge_bit[e]] += c2v[e]
        for e in range(n_edges):
            v = marg[edge_bit[e]] - c2v[e]
            if v > 35.0:
                v = 35.0
            elif v < -35.0:
                v = -35.0
            v2c[e] = tanh(0.5 * v)
        for j in range(m):
            lo = check_ptr[j]
            hi = check_ptr[j + 1]
            fwd = 1.0
            for e in range(lo, hi):
                t = v2c[e]
                v2c[e] = fwd
                fwd *= t
                c2v[e] = t
            bwd = 1.0
            for e in range(hi - 1, lo - 1, -1):
                t = c2v[e]
                prod = v2c[e] * bwd
                bwd *= t
                if prod > 0.9999999999999998:
                    prod = 0.9999999999999998
                elif prod < -0.9999999999999998:
                    prod = -0.9999999999999998
                c2v[e] = 2.0 * atanh(prod)
    for b in range(n):
        marg[b] = llr0[b]
    for e in range(n_edges):
        marg[edge_bit[e]] += c2v[e]
    return [float(x) for x in out]
