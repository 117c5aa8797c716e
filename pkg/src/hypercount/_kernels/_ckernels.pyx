# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.  Mirrors ``_pykernels`` function for function."""

import numpy as np
from libc.stdlib cimport malloc, calloc, free

NAME = "cython"

ctypedef long long i64


# ---------------------------------------------------------------------------
# brute-force regular subset count

cdef struct Search:
    int ncells
    int target
    int r
    int d
    int *cellv
    int *deg
    int *rem


cdef i64 _subset_rec(Search *s, int c, int chosen):
    cdef int t, v, ok
    cdef i64 total = 0
    cdef int *vs
    if chosen == s.target:
        return 1
    if s.ncells - c < s.target - chosen:
        return 0
    vs = s.cellv + c * s.r
    for t in range(s.r):
        s.rem[vs[t]] -= 1
    ok = 1
    for t in range(s.r):
        if s.deg[vs[t]] >= s.d:
            ok = 0
            break
    if ok:
        for t in range(s.r):
            s.deg[vs[t]] += 1
        total += _subset_rec(s, c + 1, chosen + 1)
        for t in range(s.r):
            s.deg[vs[t]] -= 1
    ok = 1
    for t in range(s.r):
        v = vs[t]
        if s.deg[v] + s.rem[v] < s.d:
            ok = 0
            break
    if ok:
        total += _subset_rec(s, c + 1, chosen)
    for t in range(s.r):
        s.rem[vs[t]] += 1
    return total


def count_regular_subsets(int r, int m, int d):
    cdef Search s
    cdef int c, t, x, cap
    cdef i64 result
    s.ncells = m ** r
    s.target = m * d
    s.r = r
    s.d = d
    if s.target == 0:
        return 1
    cap = m ** (r - 1)
    s.cellv = <int *> malloc(s.ncells * r * sizeof(int))
    s.deg = <int *> calloc(r * m, sizeof(int))
    s.rem = <int *> malloc(r * m * sizeof(int))
    try:
        for c in range(s.ncells):
            x = c
            for t in range(r - 1, -1, -1):
                s.cellv[c * r + (r - 1 - t)] = t * m + x % m
                x //= m
        for t in range(r * m):
            s.rem[t] = cap
        result = _subset_rec(&s, 0, 0)
    finally:
        free(s.cellv)
        free(s.deg)
        free(s.rem)
    return int(result)


# ---------------------------------------------------------------------------
# multiplicity census over configurations

cdef void _codes(int r, int m, int d, int n, const i64[:, ::1] perms, int *idx, int *codes):
    cdef int i, t, code
    for i in range(n):
        code = i // d
        for t in range(r - 1):
            code = code * m + <int> (perms[idx[t], i] // d)
        codes[i] = code


cdef void _profile(int n, int *codes, int *mult, int *out):
    cdef int i, k
    out[0] = 0
    out[1] = 0
    out[2] = 0
    for i in range(n):
        mult[codes[i]] += 1
    for i in range(n):
        k = mult[codes[i]]
        if k:
            if k == 1:
                out[0] += 1
            elif k == 2:
                out[1] += 1
            else:
                out[2] += 1
            mult[codes[i]] = 0


def profile_histogram(int r, int m, int d, perms_in):
    cdef const i64[:, ::1] perms = np.ascontiguousarray(perms_in, dtype=np.int64)
    cdef int k = perms.shape[0]
    cdef int n = perms.shape[1]
    hist_arr = np.zeros((n + 1, n + 1, n + 1), dtype=np.int64)
    cdef i64[:, :, ::1] hist = hist_arr
    cdef int *idx = <int *> calloc(r, sizeof(int))
    cdef int *codes = <int *> malloc((n + 1) * sizeof(int))
    cdef int *mult = <int *> calloc(m ** r, sizeof(int))
    cdef int prof[3]
    cdef int t
    try:
        while True:
            if n == 0:
                hist[0, 0, 0] += 1
            else:
                _codes(r, m, d, n, perms, idx, codes)
                _profile(n, codes, mult, prof)
                hist[prof[0], prof[1], prof[2]] += 1
            t = r - 2
            while t >= 0:
                idx[t] += 1
                if idx[t] < k:
                    break
                idx[t] = 0
                t -= 1
            if t < 0:
                break
    finally:
        free(idx)
        free(codes)
        free(mult)
    return hist_arr


# ---------------------------------------------------------------------------
# r = 3 switchings

cdef struct Cfg:
    int m
    int d
    int n
    int *s2
    int *s3
    int *U
    int *V
    int *W
    int *inv2
    int *inv3
    int *mult      # indexed by vertex-triple code
    int *simple
    int nsimple
    int *halves
    int nhalves


cdef struct Groups:
    int free_[3][3]
    int nfree[3]
    int dist[3][4]
    int ndist[3]


cdef inline int _code(Cfg *cf, int u, int v, int w):
    return (u * cf.m + v) * cf.m + w


cdef inline int _absent(Cfg *cf, int u, int v, int w):
    return cf.mult[(u * cf.m + v) * cf.m + w] == 0


cdef inline int _gadd(Groups *g, int cls, int v, int isfree):
    cdef int i
    for i in range(g.ndist[cls]):
        if g.dist[cls][i] == v:
            return 0
    if isfree:
        g.free_[cls][g.nfree[cls]] = v
        g.nfree[cls] += 1
        return 1
    for i in range(g.nfree[cls]):
        if g.free_[cls][i] == v:
            return 0
    g.dist[cls][g.ndist[cls]] = v
    g.ndist[cls] += 1
    return 1


cdef inline int _gadd_edge(Groups *g, int u, int v, int w, int f0, int f1, int f2):
    cdef Groups saved = g[0]
    if _gadd(g, 0, u, f0) and _gadd(g, 1, v, f1) and _gadd(g, 2, w, f2):
        return 1
    g[0] = saved
    return 0


cdef int _cfg_init(Cfg *cf, int m, int d, const i64 *s2, const i64 *s3, int n, int *work, int *mult):
    """Fill per-configuration tables; ``work`` must hold 9*n ints and ``mult``
    must be zeroed, of size m^3.  Returns the largest multiplicity."""
    cdef int i, c, k, top = 0
    cf.m = m
    cf.d = d
    cf.n = n
    cf.s2 = work
    cf.s3 = work + n
    cf.U = work + 2 * n
    cf.V = work + 3 * n
    cf.W = work + 4 * n
    cf.inv2 = work + 5 * n
    cf.inv3 = work + 6 * n
    cf.simple = work + 7 * n
    cf.halves = work + 8 * n
    cf.mult = mult
    for i in range(n):
        cf.s2[i] = <int> s2[i]
        cf.s3[i] = <int> s3[i]
        cf.U[i] = i // d
        cf.V[i] = cf.s2[i] // d
        cf.W[i] = cf.s3[i] // d
        cf.inv2[cf.s2[i]] = i
        cf.inv3[cf.s3[i]] = i
        mult[_code(cf, cf.U[i], cf.V[i], cf.W[i])] += 1
    cf.nsimple = 0
    cf.nhalves = 0
    for i in range(n):
        k = mult[_code(cf, cf.U[i], cf.V[i], cf.W[i])]
        if k > top:
            top = k
        if k == 1:
            cf.simple[cf.nsimple] = i
            cf.nsimple += 1
        elif k == 2:
            cf.halves[cf.nhalves] = i
            cf.nhalves += 1
    return top


cdef void _cfg_clear(Cfg *cf):
    cdef int i
    for i in range(cf.n):
        cf.mult[_code(cf, cf.U[i], cf.V[i], cf.W[i])] = 0


cdef i64 _fwd_count(Cfg *cf):
    cdef int hi, i1, i2, i3, i4, i5, i6
    cdef int h, e1, e2, e3, e4, e5, e6
    cdef int *U = cf.U
    cdef int *V = cf.V
    cdef int *W = cf.W
    cdef int *S = cf.simple
    cdef int ns = cf.nsimple
    cdef int x1, x2, x3
    cdef i64 total = 0
    cdef Groups g0, g1, g2, g3, g4, g5, g6
    for hi in range(cf.nhalves):
        h = cf.halves[hi]
        g0.nfree[0] = 1; g0.nfree[1] = 1; g0.nfree[2] = 1
        g0.ndist[0] = 0; g0.ndist[1] = 0; g0.ndist[2] = 0
        g0.free_[0][0] = U[h]; g0.free_[1][0] = V[h]; g0.free_[2][0] = W[h]
        for i1 in range(ns):
            e1 = S[i1]
            g1 = g0
            if not _gadd_edge(&g1, U[e1], V[e1], W[e1], 1, 0, 0):
                continue
            for i2 in range(ns):
                e2 = S[i2]
                if e2 == e1:
                    continue
                g2 = g1
                if not _gadd_edge(&g2, U[e2], V[e2], W[e2], 1, 0, 0):
                    continue
                for i3 in range(ns):
                    e3 = S[i3]
                    if e3 == e1 or e3 == e2:
                        continue
                    g3 = g2
                    if not _gadd_edge(&g3, U[e3], V[e3], W[e3], 0, 1, 0):
                        continue
                    if not _absent(cf, U[e2], V[e3], W[h]):
                        continue
                    for i4 in range(ns):
                        e4 = S[i4]
                        if e4 == e1 or e4 == e2 or e4 == e3:
                            continue
                        g4 = g3
                        if not _gadd_edge(&g4, U[e4], V[e4], W[e4], 0, 0, 1):
                            continue
                        if not _absent(cf, U[e1], V[h], W[e4]):
                            continue
                        for i5 in range(ns):
                            e5 = S[i5]
                            if e5 == e1 or e5 == e2 or e5 == e3 or e5 == e4:
                                continue
                            g5 = g4
                            if not _gadd_edge(&g5, U[e5], V[e5], W[e5], 0, 0, 1):
                                continue
                            if not _absent(cf, U[e3], V[e5], W[e1]):
                                continue
                            if not _absent(cf, U[e5], V[e1], W[e3]):
                                continue
                            for i6 in range(ns):
                                e6 = S[i6]
                                if e6 == e1 or e6 == e2 or e6 == e3 or e6 == e4 or e6 == e5:
                                    continue
                                g6 = g5
                                if not _gadd_edge(&g6, U[e6], V[e6], W[e6], 0, 1, 0):
                                    continue
                                if not _absent(cf, U[h], V[e6], W[e5]):
                                    continue
                                if not _absent(cf, U[e4], V[e2], W[e6]):
                                    continue
                                if not _absent(cf, U[e6], V[e4], W[e2]):
                                    continue
                                x1 = _code(cf, U[h], V[e6], W[e5])
                                x2 = _code(cf, U[e1], V[h], W[e4])
                                x3 = _code(cf, U[e2], V[e3], W[h])
                                if x1 == x2 or x1 == x3 or x2 == x3:
                                    continue
                                total += 1
    return total


cdef inline int _is_simple(Cfg *cf, int e):
    return cf.mult[_code(cf, cf.U[e], cf.V[e], cf.W[e])] == 1


cdef i64 _rev_count(Cfg *cf):
    cdef int pi, p, u, v, w, a, b, c, ea, eb, ec
    cdef int i3, i4, i5, i6, e3, e4, e5, e6
    cdef int d = cf.d
    cdef int *U = cf.U
    cdef int *V = cf.V
    cdef int *W = cf.W
    cdef int *S = cf.simple
    cdef int ns = cf.nsimple
    cdef i64 total = 0
    cdef Groups g0, g3, g4, g5, g6
    for pi in range(ns):
        p = S[pi]
        u = U[p]; v = V[p]; w = W[p]
        for a in range(u * d, u * d + d):
            if a == p or not _is_simple(cf, a):
                continue
            ea = a
            for b in range(v * d, v * d + d):
                if b == cf.s2[p]:
                    continue
                eb = cf.inv2[b]
                if eb == ea or not _is_simple(cf, eb):
                    continue
                for c in range(w * d, w * d + d):
                    if c == cf.s3[p]:
                        continue
                    ec = cf.inv3[c]
                    if ec == ea or ec == eb or not _is_simple(cf, ec):
                        continue
                    g0.nfree[0] = 3; g0.nfree[1] = 3; g0.nfree[2] = 3
                    g0.ndist[0] = 0; g0.ndist[1] = 0; g0.ndist[2] = 0
                    g0.free_[0][0] = u; g0.free_[0][1] = U[eb]; g0.free_[0][2] = U[ec]
                    g0.free_[1][0] = v; g0.free_[1][1] = V[ea]; g0.free_[1][2] = V[ec]
                    g0.free_[2][0] = w; g0.free_[2][1] = W[ea]; g0.free_[2][2] = W[eb]
                    for i3 in range(ns):
                        e3 = S[i3]
                        if e3 == p or e3 == ea or e3 == eb or e3 == ec:
                            continue
                        g3 = g0
                        if not _gadd_edge(&g3, U[e3], V[e3], W[e3], 0, 0, 0):
                            continue
                        for i4 in range(ns):
                            e4 = S[i4]
                            if e4 == p or e4 == ea or e4 == eb or e4 == ec or e4 == e3:
                                continue
                            g4 = g3
                            if not _gadd_edge(&g4, U[e4], V[e4], W[e4], 0, 0, 0):
                                continue
                            for i5 in range(ns):
                                e5 = S[i5]
                                if e5 == p or e5 == ea or e5 == eb or e5 == ec or e5 == e3 or e5 == e4:
                                    continue
                                g5 = g4
                                if not _gadd_edge(&g5, U[e5], V[e5], W[e5], 0, 0, 0):
                                    continue
                                if not _absent(cf, U[eb], V[e5], W[e3]):
                                    continue
                                if not _absent(cf, U[e3], V[ec], W[e5]):
                                    continue
                                if not _absent(cf, U[e5], V[e3], W[ea]):
                                    continue
                                for i6 in range(ns):
                                    e6 = S[i6]
                                    if (e6 == p or e6 == ea or e6 == eb or e6 == ec
                                            or e6 == e3 or e6 == e4 or e6 == e5):
                                        continue
                                    g6 = g5
                                    if not _gadd_edge(&g6, U[e6], V[e6], W[e6], 0, 0, 0):
                                        continue
                                    if not _absent(cf, U[ec], V[e4], W[e6]):
                                        continue
                                    if not _absent(cf, U[e4], V[e6], W[eb]):
                                        continue
                                    if not _absent(cf, U[e6], V[ea], W[e4]):
                                        continue
                                    total += 1
    return total


cdef object _single(int m, int d, s2_in, s3_in, int forward):
    cdef const i64[::1] s2 = np.ascontiguousarray(s2_in, dtype=np.int64)
    cdef const i64[::1] s3 = np.ascontiguousarray(s3_in, dtype=np.int64)
    cdef int n = s2.shape[0]
    cdef Cfg cf
    cdef i64 result
    cdef int top
    if n == 0:
        return 0
    cdef int *work = <int *> malloc(9 * n * sizeof(int))
    cdef int *mult = <int *> calloc(m * m * m, sizeof(int))
    try:
        top = _cfg_init(&cf, m, d, &s2[0], &s3[0], n, work, mult)
        if top > 2:
            raise ValueError("configuration has an edge of multiplicity >= 3")
        result = _fwd_count(&cf) if forward else _rev_count(&cf)
    finally:
        free(work)
        free(mult)
    return int(result)


def count_forward(int m, int d, s2, s3):
    return _single(m, d, s2, s3, 1)


def count_reverse(int m, int d, s2, s3):
    return _single(m, d, s2, s3, 0)


def switching_census(int m, int d, perms_in):
    cdef const i64[:, ::1] perms = np.ascontiguousarray(perms_in, dtype=np.int64)
    cdef int k = perms.shape[0]
    cdef int n = perms.shape[1]
    cdef int size = n // 2 + 1
    T_arr = np.zeros(size, dtype=np.int64)
    fwd_arr = np.zeros(size, dtype=np.int64)
    rev_arr = np.zeros(size, dtype=np.int64)
    cdef i64[::1] T = T_arr
    cdef i64[::1] fwd = fwd_arr
    cdef i64[::1] rev = rev_arr
    cdef i64 heavy = 0
    cdef int i, j, top, ell
    cdef Cfg cf
    if n == 0:
        T[0] = k * k
        return T_arr, fwd_arr, rev_arr, 0
    cdef int *work = <int *> malloc(9 * n * sizeof(int))
    cdef int *mult = <int *> calloc(m * m * m, sizeof(int))
    try:
        for i in range(k):
            for j in range(k):
                top = _cfg_init(&cf, m, d, &perms[i, 0], &perms[j, 0], n, work, mult)
                if top > 2:
                    heavy += 1
                else:
                    ell = cf.nhalves // 2
                    T[ell] += 1
                    if ell:
                        fwd[ell] += _fwd_count(&cf)
                    rev[ell] += _rev_count(&cf)
                _cfg_clear(&cf)
    finally:
        free(work)
        free(mult)
    return T_arr, fwd_arr, rev_arr, int(heavy)
