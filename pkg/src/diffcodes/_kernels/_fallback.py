"""Pure-Python reference kernels.

These mirror the compiled kernels in ``_core.pyx`` operation for operation
(including float evaluation order and libm calls), so the two backends
produce bit-identical trajectories from the same pre-drawn randomness.
They are the fallback when the extension is unavailable, and the baseline
for the kernel benchmark.
"""

from __future__ import annotations

import math

BACKEND = "python"


def swap_chunk(perm, edges):
    """Apply swaps on cycle edges (e, e+1 mod N) to the label array."""
    n = perm.shape[0]
    for e in edges:
        v = int(e)
        w = v + 1
        if w == n:
            w = 0
        perm[v], perm[w] = perm[w], perm[v]


def sep_chunk(occ, edges):
    """Exclusion-process updates: a swap moves a particle iff exactly one
    endpoint is occupied."""
    n = occ.shape[0]
    for e in edges:
        v = int(e)
        w = v + 1
        if w == n:
            w = 0
        if occ[v] != occ[w]:
            occ[v], occ[w] = occ[w], occ[v]


def gap_chunk(g, moves):
    """Gap-process proposals: move t encodes (index = t >> 1, up if t & 1);
    t < 0 is a lazy hold.  Rejected moves leave the state unchanged."""
    k = g.shape[0]
    for t in moves:
        t = int(t)
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


def coupled_gap_chunk(g, gp, moves):
    """Identical proposals applied to both chains; returns the number of
    steps after which the entrywise ordering gp <= g failed."""
    k = g.shape[0]
    violations = 0
    for t in moves:
        t = int(t)
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


def metropolis_chunk(spins, bit_ptr, bit_checks, check_unsat, sites, urand,
                     accept, deg_max, unsat_count):
    """Single-spin Metropolis proposals.

    ``accept[delta + deg_max]`` is the precomputed acceptance probability
    for a change ``delta`` in the number of unsatisfied checks.  Returns
    the updated unsatisfied-check count.
    """
    for idx in range(sites.shape[0]):
        s = int(sites[idx])
        lo = int(bit_ptr[s])
        hi = int(bit_ptr[s + 1])
        hits = 0
        for e in range(lo, hi):
            hits += int(check_unsat[bit_checks[e]])
        delta = (hi - lo) - 2 * hits
        if urand[idx] < accept[delta + deg_max]:
            spins[s] = -spins[s]
            for e in range(lo, hi):
                c = bit_checks[e]
                check_unsat[c] ^= 1
            unsat_count += delta
    return unsat_count


def flip_decode_run(word, bit_ptr, bit_checks, check_unsat, order,
                    unsat_count, max_sweeps):
    """Greedy flip decoding: repeated sweeps in the given bit order,
    flipping immediately whenever a flip strictly reduces the number of
    unsatisfied checks.  Returns (unsat_count, flips, sweeps).
    """
    n = order.shape[0]
    flips = 0
    sweeps = 0
    while unsat_count > 0 and sweeps < max_sweeps:
        sweeps += 1
        flipped_this_sweep = 0
        for idx in range(n):
            s = int(order[idx])
            lo = int(bit_ptr[s])
            hi = int(bit_ptr[s + 1])
            hits = 0
            for e in range(lo, hi):
                hits += int(check_unsat[bit_checks[e]])
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


def bp_decode_run(llr0, edge_bit, check_ptr, hard, max_iters):
    """Flooding sum-product decoding on a simple Tanner graph.

    Messages live on edges grouped by check (edges of check j occupy
    ``check_ptr[j]:check_ptr[j+1]``).  Hard decision after every
    iteration; stops as soon as the hard decision satisfies all checks.
    Returns (converged, iterations).
    """
    n = llr0.shape[0]
    n_edges = edge_bit.shape[0]
    m = check_ptr.shape[0] - 1
    c2v = [0.0] * n_edges
    v2c = [0.0] * n_edges
    marg = [0.0] * n

    def posterior_and_check():
        for b in range(n):
            marg[b] = llr0[b]
        for e in range(n_edges):
            marg[edge_bit[e]] += c2v[e]
        for b in range(n):
            hard[b] = 1 if marg[b] < 0.0 else 0
        for j in range(m):
            par = 0
            for e in range(int(check_ptr[j]), int(check_ptr[j + 1])):
                par ^= int(hard[edge_bit[e]])
            if par:
                return False
        return True

    if posterior_and_check():
        return True, 0

    for it in range(1, max_iters + 1):
        # bit-to-check
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
            v2c[e] = math.tanh(0.5 * v)
        # check-to-bit: forward/backward partial products per check
        for j in range(m):
            lo = int(check_ptr[j])
            hi = int(check_ptr[j + 1])
            fwd = 1.0
            for e in range(lo, hi):
                t = v2c[e]
                v2c[e] = fwd  # reuse as prefix storage
                fwd *= t
                c2v[e] = t    # stash original tanh in c2v temporarily
            bwd = 1.0
            for e in range(hi - 1, lo - 1, -1):
                t = c2v[e]
                prod = v2c[e] * bwd
                bwd *= t
                if prod > 0.9999999999999998:
                    prod = 0.9999999999999998
                elif prod < -0.9999999999999998:
                    prod = -0.9999999999999998
                c2v[e] = 2.0 * math.atanh(prod)
        if posterior_and_check():
            return True, it
    return False, max_iters


def bp_decode_serial(llr0, edge_bit, check_ptr, hard, max_iters):
    """Serial (check-by-check) sum-product: each check update reads the
    freshest posteriors.  Same stopping rule as the flooding variant.
    """
    n = llr0.shape[0]
    n_edges = edge_bit.shape[0]
    m = check_ptr.shape[0] - 1
    c2v = [0.0] * n_edges
    marg = [float(llr0[b]) for b in range(n)]
    deg_max = 0
    for j in range(m):
        deg_max = max(deg_max, int(check_ptr[j + 1]) - int(check_ptr[j]))
    ts = [0.0] * deg_max
    pref = [0.0] * (deg_max + 1)

    def hard_and_check():
        for b in range(n):
            hard[b] = 1 if marg[b] < 0.0 else 0
        for j in range(m):
            par = 0
            for e in range(int(check_ptr[j]), int(check_ptr[j + 1])):
                par ^= int(hard[edge_bit[e]])
            if par:
                return False
        return True

    if hard_and_check():
        return True, 0

    for it in range(1, max_iters + 1):
        for j in range(m):
            lo = int(check_ptr[j])
            hi = int(check_ptr[j + 1])
            deg = hi - lo
            pref[0] = 1.0
            for i in range(deg):
                v = marg[edge_bit[lo + i]] - c2v[lo + i]
                if v > 35.0:
                    v = 35.0
                elif v < -35.0:
                    v = -35.0
                t = math.tanh(0.5 * v)
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
                new = 2.0 * math.atanh(prod)
                e = lo + i
                marg[edge_bit[e]] += new - c2v[e]
                c2v[e] = new
        if hard_and_check():
            return True, it
    return False, max_iters


def bp_posteriors(llr0, edge_bit, check_ptr, n_iters):
    """Run n_iters of sum-product and return the posterior LLRs."""
    n = llr0.shape[0]
    n_edges = edge_bit.shape[0]
    m = check_ptr.shape[0] - 1
    c2v = [0.0] * n_edges
    v2c = [0.0] * n_edges
    marg = [0.0] * n
    for _ in range(n_iters):
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
            v2c[e] = math.tanh(0.5 * v)
        for j in range(m):
            lo = int(check_ptr[j])
            hi = int(check_ptr[j + 1])
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
                c2v[e] = 2.0 * math.atanh(prod)
    for b in range(n):
        marg[b] = llr0[b]
    for e in range(n_edges):
        marg[edge_bit[e]] += c2v[e]
    return list(marg)
