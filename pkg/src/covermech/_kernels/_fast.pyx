# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Line-for-line semantic twin of `_pure`; every comparison, scan order and
float accumulation order matches so both backends return identical results.
"""

from libc.stdlib cimport malloc, free

ctypedef unsigned long long u64


cdef inline bint _lex_better(u64 a, u64 b):
    cdef u64 diff = a ^ b
    if diff == 0:
        return False
    cdef u64 low = diff & (~diff + 1)
    return (a & low) != 0


cdef inline int _popcount(u64 x):
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


def min_cost_vertex_cover(int n, adj, costs):
    cdef u64 adj_c[64]
    cdef double cost_c[64]
    cdef int u, v, w, pick, m, i, sp
    for u in range(n):
        adj_c[u] = <u64> adj[u]
        cost_c[u] = <double> costs[u]

    cdef int eu[2080]
    cdef int ev[2080]
    m = 0
    for u in range(n):
        for v in range(u + 1, n):
            if (adj_c[u] >> v) & 1:
                eu[m] = u
                ev[m] = v
                m += 1

    cdef u64 best_mask = 0
    cdef double best_cost = 0.0
    for u in range(n):
        best_mask |= (<u64> 1) << u
    for u in range(n):
        best_cost += cost_c[u]

    cdef u64 s_in[200]
    cdef u64 s_out[200]
    cdef double s_acc[200]
    cdef u64 in_mask, out_mask, used, forced, fm, bit
    cdef double acc, bound, cu, cv, add_cost

    sp = 0
    s_in[0] = 0
    s_out[0] = 0
    s_acc[0] = 0.0
    sp = 1
    while sp > 0:
        sp -= 1
        in_mask = s_in[sp]
        out_mask = s_out[sp]
        acc = s_acc[sp]

        used = in_mask | out_mask
        bound = 0.0
        for i in range(m):
            u = eu[i]
            v = ev[i]
            if ((used >> u) & 1) == 0 and ((used >> v) & 1) == 0:
                used |= ((<u64> 1) << u) | ((<u64> 1) << v)
                cu = cost_c[u]
                cv = cost_c[v]
                bound += cu if cu < cv else cv
        if acc + bound > best_cost:
            continue

        pick = -1
        for i in range(m):
            u = eu[i]
            v = ev[i]
            if ((in_mask >> u) & 1) == 0 and ((in_mask >> v) & 1) == 0:
                if ((out_mask >> u) & 1) == 0 and ((out_mask >> v) & 1) == 0:
                    pick = u
                    break
        if pick < 0:
            if acc < best_cost or (acc == best_cost and _lex_better(in_mask, best_mask)):
                best_cost = acc
                best_mask = in_mask
            continue

        forced = adj_c[pick] & ~in_mask & ~out_mask
        add_cost = 0.0
        w = 0
        fm = forced
        while fm:
            if fm & 1:
                add_cost += cost_c[w]
            fm >>= 1
            w += 1
        s_in[sp] = in_mask | forced
        s_out[sp] = out_mask | ((<u64> 1) << pick)
        s_acc[sp] = acc + add_cost
        sp += 1
        s_in[sp] = in_mask | ((<u64> 1) << pick)
        s_out[sp] = out_mask
        s_acc[sp] = acc + cost_c[pick]
        sp += 1

    cdef double total = 0.0
    for u in range(n):
        if (best_mask >> u) & 1:
            total += cost_c[u]
    return int(best_mask), total


def maximal_independent_sets(int n, adj, limit):
    cdef u64 full = ((<u64> 1) << n) - 1 if n < 64 else <u64> 0xFFFFFFFFFFFFFFFF
    cdef u64 nonadj[64]
    cdef int u, v, pivot, pivot_deg, d, lim = <int> limit
    for u in range(n):
        nonadj[u] = full & ~(<u64> adj[u]) & ~((<u64> 1) << u)

    out = []
    # explicit stack; depth bounded by n branches each pushing <= n states
    cdef int cap = 64 * 64 + 16
    cdef u64 *s_r = <u64 *> malloc(cap * sizeof(u64) * 3)
    if s_r == NULL:
        raise MemoryError()
    cdef u64 *s_p = s_r + cap
    cdef u64 *s_x = s_r + 2 * cap
    cdef int sp = 0
    cdef u64 r, p, x, pm, cand, bit
    s_r[0] = 0
    s_p[0] = full
    s_x[0] = 0
    sp = 1
    try:
        while sp > 0:
            sp -= 1
            r = s_r[sp]
            p = s_p[sp]
            x = s_x[sp]
            if p == 0 and x == 0:
                out.append(int(r))
                if len(out) > lim:
                    raise RuntimeError(
                        "maximal independent set enumeration limit exceeded")
                continue
            pivot = -1
            pivot_deg = -1
            pm = p | x
            u = 0
            while pm:
                if pm & 1:
                    d = _popcount(p & nonadj[u])
                    if d > pivot_deg:
                        pivot_deg = d
                        pivot = u
                pm >>= 1
                u += 1
            cand = p & ~nonadj[pivot]
            v = 0
            while cand:
                if cand & 1:
                    bit = (<u64> 1) << v
                    if sp >= cap:
                        raise MemoryError("kernel stack overflow")
                    s_r[sp] = r | bit
                    s_p[sp] = p & nonadj[v]
                    s_x[sp] = x & nonadj[v]
                    sp += 1
                    p &= ~bit
                    x |= bit
                cand >>= 1
                v += 1
    finally:
        free(s_r)
    out.sort()
    return out


def max_weight_independent_set(int n, adj, weights):
    cdef u64 adj_c[64]
    cdef double w_c[64]
    cdef int u, v
    cdef u64 full = ((<u64> 1) << n) - 1 if n < 64 else <u64> 0xFFFFFFFFFFFFFFFF
    for u in range(n):
        adj_c[u] = <u64> adj[u]
        w_c[u] = <double> weights[u]

    cdef u64 best_mask = 0
    cdef double best_w = 0.0

    cdef u64 s_r[200]
    cdef u64 s_p[200]
    cdef double s_acc[200]
    cdef int sp = 0
    cdef u64 r, p, bit, tmp
    cdef double acc, pot

    s_r[0] = 0
    s_p[0] = full
    s_acc[0] = 0.0
    sp = 1
    while sp > 0:
        sp -= 1
        r = s_r[sp]
        p = s_p[sp]
        acc = s_acc[sp]
        if p == 0:
            if acc > best_w:
                best_w = acc
                best_mask = r
            continue
        pot = 0.0
        tmp = p
        u = 0
        while tmp:
            if tmp & 1:
                pot += w_c[u]
            tmp >>= 1
            u += 1
        if acc + pot <= best_w:
            continue
        bit = p & (~p + 1)
        v = 0
        tmp = bit
        while tmp > 1:
            tmp >>= 1
            v += 1
        s_r[sp] = r
        s_p[sp] = p & ~bit
        s_acc[sp] = acc
        sp += 1
        s_r[sp] = r | bit
        s_p[sp] = p & ~bit & ~adj_c[v]
        s_acc[sp] = acc + w_c[v]
        sp += 1
    return int(best_mask), best_w


cdef double _dfs(int u, double pushed, int t, int *head_start, int *head_flat,
                 int *to_c, double *cap_c, int *level, int *it) :
    if u == t:
        return pushed
    cdef int eid, v
    cdef double got, avail
    cdef double eps = 1e-12
    while it[u] < head_start[u + 1] - head_start[u]:
        eid = head_flat[head_start[u] + it[u]]
        v = to_c[eid]
        if cap_c[eid] > eps and level[v] == level[u] + 1:
            avail = pushed if pushed < cap_c[eid] else cap_c[eid]
            got = _dfs(v, avail, t, head_start, head_flat, to_c, cap_c, level, it)
            if got > eps:
                cap_c[eid] -= got
                cap_c[eid ^ 1] += got
                return got
        it[u] += 1
    return 0.0


def max_flow(int n, arcs, int s, int t):
    cdef int n_arcs = len(arcs)
    cdef int n_edges = 2 * n_arcs
    cdef double eps = 1e-12
    cdef int *to_c = <int *> malloc(n_edges * sizeof(int))
    cdef double *cap_c = <double *> malloc(n_edges * sizeof(double))
    cdef int *deg = <int *> malloc((n + 1) * sizeof(int))
    cdef int *head_start = <int *> malloc((n + 1) * sizeof(int))
    cdef int *head_flat = <int *> malloc(n_edges * sizeof(int))
    cdef int *level = <int *> malloc(n * sizeof(int))
    cdef int *it = <int *> malloc(n * sizeof(int))
    cdef int *queue = <int *> malloc(n * sizeof(int))
    cdef int *fill = <int *> malloc(n * sizeof(int))
    if (to_c == NULL or cap_c == NULL or deg == NULL or head_start == NULL or
            head_flat == NULL or level == NULL or it == NULL or queue == NULL or
            fill == NULL):
        raise MemoryError()

    cdef int i, u, v, eid, qh, qt
    cdef double c, value, got
    cdef double INF = float("inf")
    try:
        for i in range(n + 1):
            deg[i] = 0
        i = 0
        for arc in arcs:
            u = <int> arc[0]
            v = <int> arc[1]
            c = <double> arc[2]
            to_c[2 * i] = v
            cap_c[2 * i] = c
            to_c[2 * i + 1] = u
            cap_c[2 * i + 1] = 0.0
            deg[u] += 1
            deg[v] += 1
            i += 1
        head_start[0] = 0
        for u in range(n):
            head_start[u + 1] = head_start[u] + deg[u]
            fill[u] = 0
        # head lists in arc insertion order, forward arc before its reverse
        i = 0
        for arc in arcs:
            u = <int> arc[0]
            v = <int> arc[1]
            head_flat[head_start[u] + fill[u]] = 2 * i
            fill[u] += 1
            head_flat[head_start[v] + fill[v]] = 2 * i + 1
            fill[v] += 1
            i += 1

        value = 0.0
        while True:
            for i in range(n):
                level[i] = -1
            level[s] = 0
            queue[0] = s
            qh = 0
            qt = 1
            while qh < qt:
                u = queue[qh]
                qh += 1
                for i in range(head_start[u], head_start[u + 1]):
                    eid = head_flat[i]
                    v = to_c[eid]
                    if cap_c[eid] > eps and level[v] < 0:
                        level[v] = level[u] + 1
                        queue[qt] = v
                        qt += 1
            if level[t] < 0:
                break
            for i in range(n):
                it[i] = 0
            while True:
                got = _dfs(s, INF, t, head_start, head_flat, to_c, cap_c, level, it)
                if got <= eps:
                    break
                value += got

        reach = [False] * n
        reach[s] = True
        queue[0] = s
        qh = 0
        qt = 1
        while qh < qt:
            u = queue[qh]
            qh += 1
            for i in range(head_start[u], head_start[u + 1]):
                eid = head_flat[i]
                v = to_c[eid]
                if cap_c[eid] > eps and not reach[v]:
                    reach[v] = True
                    queue[qt] = v
                    qt += 1
        return value, reach
    finally:
        free(to_c)
        free(cap_c)
        free(deg)
        free(head_start)
        free(head_flat)
        free(level)
        free(it)
        free(queue)
        free(fill)
