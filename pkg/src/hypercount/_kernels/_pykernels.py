"""Pure-Python kernels.  Same signatures and results as the compiled module."""

import numpy as np

NAME = "python"


def count_regular_subsets(r, m, d):
    """Number of md-subsets of the m^r cells in which every vertex has degree d.

    Depth-first include/exclude search over cells in lexicographic order,
    cut as soon as a vertex exceeds d or can no longer reach d.
    """
    ncells = m ** r
    target = m * d
    cellv = []
    for c in range(ncells):
        vs = []
        x = c
        for t in range(r - 1, -1, -1):
            vs.append(t * m + x % m)
            x //= m
        cellv.append(tuple(vs))
    deg = [0] * (r * m)
    rem = [m ** (r - 1)] * (r * m)

    def rec(c, chosen):
        if chosen == target:
            # sum of class degrees is md with each <= d, hence all equal d
            return 1
        if ncells - c < target - chosen:
            return 0
        vs = cellv[c]
        for v in vs:
            rem[v] -= 1
        total = 0
        if all(deg[v] < d for v in vs):
            for v in vs:
                deg[v] += 1
            total += rec(c + 1, chosen + 1)
            for v in vs:
                deg[v] -= 1
        if all(deg[v] + rem[v] >= d for v in vs):
            total += rec(c + 1, chosen)
        for v in vs:
            rem[v] += 1
        return total

    if target == 0:
        return 1
    return rec(0, 0)


def _codes(r, m, d, rows):
    n = len(rows[0]) if rows else 0
    codes = []
    for i in range(n):
        code = i // d
        for s in rows:
            code = code * m + s[i] // d
        codes.append(code)
    return codes


def _profile(codes):
    mult = {}
    for c in codes:
        mult[c] = mult.get(c, 0) + 1
    simple = double = triple = 0
    for k in mult.values():
        if k == 1:
            simple += 1
        elif k == 2:
            double += 1
        else:
            triple += 1
    return simple, double, triple


def profile_histogram(r, m, d, perms):
    """hist[s, l, t] = number of configurations with s simple edges, l double
    edges and t edges of multiplicity >= 3, over all (r-1)-tuples of rows of
    ``perms``."""
    perms = np.asarray(perms, dtype=np.int64)
    k, n = perms.shape
    table = [list(map(int, row)) for row in perms]
    hist = np.zeros((n + 1, n + 1, n + 1), dtype=np.int64)
    for idx in np.ndindex(*([k] * (r - 1))):
        rows = [table[i] for i in idx]
        if n == 0:
            hist[0, 0, 0] += 1
            continue
        s, l, t = _profile(_codes(r, m, d, rows))
        hist[s, l, t] += 1
    return hist


class _Cfg:
    """Per-configuration tables used by the r=3 switching search."""

    def __init__(self, m, d, s2, s3):
        self.m, self.d = m, d
        self.s2 = [int(x) for x in s2]
        self.s3 = [int(x) for x in s3]
        n = len(self.s2)
        self.n = n
        self.U = [i // d for i in range(n)]
        self.V = [x // d for x in self.s2]
        self.W = [x // d for x in self.s3]
        self.inv2 = [0] * n
        self.inv3 = [0] * n
        for i in range(n):
            self.inv2[self.s2[i]] = i
            self.inv3[self.s3[i]] = i
        self.mult = {}
        for i in range(n):
            c = self.code(self.U[i], self.V[i], self.W[i])
            self.mult[c] = self.mult.get(c, 0) + 1
        self.simple = [i for i in range(n) if self.edge_mult(i) == 1]
        self.halves = [i for i in range(n) if self.edge_mult(i) == 2]
        if any(k > 2 for k in self.mult.values()):
            raise ValueError("configuration has an edge of multiplicity >= 3")

    def code(self, u, v, w):
        return (u * self.m + v) * self.m + w

    def edge_mult(self, i):
        return self.mult[self.code(self.U[i], self.V[i], self.W[i])]

    def absent(self, u, v, w):
        return self.code(u, v, w) not in self.mult


class _Groups:
    """Vertex bookkeeping for the 21 spines.

    Per class: the three 'free' vertices (of a, a1, a2 etc.) may coincide
    with each other; the four others must be distinct from everything.
    """

    def __init__(self):
        self.free = [[], [], []]
        self.dist = [[], [], []]

    def add(self, cls, v, free):
        if v in self.dist[cls]:
            return False
        if not free and v in self.free[cls]:
            return False
        (self.free if free else self.dist)[cls].append(v)
        return True

    def mark(self):
        return tuple(len(x) for x in self.free) + tuple(len(x) for x in self.dist)

    def undo(self, mark):
        for k in range(3):
            del self.free[k][mark[k]:]
            del self.dist[k][mark[3 + k]:]


# Role of each of the six extra edges in a forward switching: which class
# slot of spine-name it supplies, and whether that slot is a free one.
#   e1 = {a1, b5, c3}, e2 = {a2, b4, c6}, e3 = {a3, b1, c5},
#   e4 = {a4, b6, c2}, e5 = {a5, b3, c1}, e6 = {a6, b2, c4}
_FWD_FREE = ((True, False, False), (True, False, False), (False, True, False),
             (False, False, True), (False, False, True), (False, True, False))


def _add_edge(g, u, v, w, free):
    mark = g.mark()
    if g.add(0, u, free[0]) and g.add(1, v, free[1]) and g.add(2, w, free[2]):
        return True
    g.undo(mark)
    return False


def iter_forward(m, d, s2, s3):
    """Yield (h, e1, .., e6): class-1 spines of the seven F1 edges of every
    valid forward switching of the configuration."""
    cf = _Cfg(m, d, s2, s3)
    U, V, W, S = cf.U, cf.V, cf.W, cf.simple
    g = _Groups()
    for h in cf.halves:
        g.undo((0,) * 6)
        g.add(0, U[h], True)
        g.add(1, V[h], True)
        g.add(2, W[h], True)
        yield from _fwd_rec(cf, g, [h], S, U, V, W)


def _fwd_rec(cf, g, chosen, S, U, V, W):
    level = len(chosen)  # next edge is e_level
    if level == 7:
        h, e1, e2, e3, e4, e5, e6 = chosen
        # F2 sets {a,b2,c1}, {a1,b,c2}, {a2,b1,c} and {aj,bj,cj}
        x1 = (U[h], V[e6], W[e5])
        x2 = (U[e1], V[h], W[e4])
        x3 = (U[e2], V[e3], W[h])
        ys = ((U[e3], V[e5], W[e1]), (U[e4], V[e2], W[e6]),
              (U[e5], V[e1], W[e3]), (U[e6], V[e4], W[e2]))
        for t in (x1, x2, x3) + ys:
            if not cf.absent(*t):
                return
        if x1 == x2 or x1 == x3 or x2 == x3:
            return
        yield tuple(chosen)
        return
    free = _FWD_FREE[level - 1]
    for e in S:
        if e in chosen:
            continue
        mark = g.mark()
        if not _add_edge(g, U[e], V[e], W[e], free):
            continue
        chosen.append(e)
        if _fwd_partial_ok(cf, chosen, U, V, W):
            yield from _fwd_rec(cf, g, chosen, S, U, V, W)
        chosen.pop()
        g.undo(mark)


def _fwd_partial_ok(cf, ch, U, V, W):
    k = len(ch) - 1
    h = ch[0]
    if k == 3:  # {a2, b1, c} known
        return cf.absent(U[ch[2]], V[ch[3]], W[h])
    if k == 4:  # {a1, b, c2}
        return cf.absent(U[ch[1]], V[h], W[ch[4]])
    if k == 5:  # {a3,b3,c3} and {a5,b5,c5}
        return cf.absent(U[ch[3]], V[ch[5]], W[ch[1]]) and cf.absent(U[ch[5]], V[ch[1]], W[ch[3]])
    return True


def count_forward(m, d, s2, s3):
    return sum(1 for _ in iter_forward(m, d, s2, s3))


def iter_reverse(m, d, s2, s3):
    """Yield (p, Ea, Eb, Ec, E3, E4, E5, E6) for every valid reverse switching.

    ``p`` is the simple edge parallel to {a,b,c}; Ea = {a,b2,c1},
    Eb = {a1,b,c2}, Ec = {a2,b1,c} and Ej = {aj,bj,cj}, all given by their
    class-1 spine.
    """
    cf = _Cfg(m, d, s2, s3)
    U, V, W, S = cf.U, cf.V, cf.W, cf.simple
    simple = set(S)
    for p in S:
        u, v, w = U[p], V[p], W[p]
        for a in range(u * d, u * d + d):
            if a == p or a not in simple:
                continue
            ea = a
            for b in range(v * d, v * d + d):
                if b == cf.s2[p]:
                    continue
                eb = cf.inv2[b]
                if eb == ea or eb not in simple:
                    continue
                for c in range(w * d, w * d + d):
                    if c == cf.s3[p]:
                        continue
                    ec = cf.inv3[c]
                    if ec in (ea, eb) or ec not in simple:
                        continue
                    g = _Groups()
                    for cls, x in ((0, u), (0, U[eb]), (0, U[ec]),
                                   (1, v), (1, V[ea]), (1, V[ec]),
                                   (2, w), (2, W[ea]), (2, W[eb])):
                        g.add(cls, x, True)
                    yield from _rev_rec(cf, g, [p, ea, eb, ec], S, U, V, W)


def _rev_rec(cf, g, ch, S, U, V, W):
    k = len(ch)  # ch = [p, Ea, Eb, Ec, E3, ...]; next is E_{k-1}
    if k == 8:
        yield tuple(ch)
        return
    for e in S:
        if e in ch:
            continue
        mark = g.mark()
        if not _add_edge(g, U[e], V[e], W[e], (False, False, False)):
            continue
        ch.append(e)
        if _rev_partial_ok(cf, ch, U, V, W):
            yield from _rev_rec(cf, g, ch, S, U, V, W)
        ch.pop()
        g.undo(mark)


def _rev_partial_ok(cf, ch, U, V, W):
    # F1 sets other than {a,b,c} must not be parallel to any edge
    _, ea, eb, ec = ch[:4]
    k = len(ch)
    if k == 7:  # E5 just added
        e3, e5 = ch[4], ch[6]
        return (cf.absent(U[eb], V[e5], W[e3])       # {a1, b5, c3}
                and cf.absent(U[e3], V[ec], W[e5])   # {a3, b1, c5}
                and cf.absent(U[e5], V[e3], W[ea]))  # {a5, b3, c1}
    if k == 8:
        e3, e4, e5, e6 = ch[4:8]
        return (cf.absent(U[ec], V[e4], W[e6])       # {a2, b4, c6}
                and cf.absent(U[e4], V[e6], W[eb])   # {a4, b6, c2}
                and cf.absent(U[e6], V[ea], W[e4]))  # {a6, b2, c4}
    return True


def count_reverse(m, d, s2, s3):
    return sum(1 for _ in iter_reverse(m, d, s2, s3))


def switching_census(m, d, perms):
    """Exhaustive r=3 census over all pairs of rows of ``perms``.

    Returns (T, fwd, rev, n_heavy): T[l] = #configurations with exactly l
    double edges and no heavier edge, fwd[l] / rev[l] = total forward /
    reverse switchings available from those configurations, n_heavy = number
    of configurations with an edge of multiplicity >= 3.
    """
    perms = np.asarray(perms, dtype=np.int64)
    k, n = perms.shape
    size = n // 2 + 1
    T = np.zeros(size, dtype=np.int64)
    fwd = np.zeros(size, dtype=np.int64)
    rev = np.zeros(size, dtype=np.int64)
    heavy = 0
    table = [list(map(int, row)) for row in perms]
    for i in range(k):
        for j in range(k):
            s2, s3 = table[i], table[j]
            if n == 0:
                T[0] += 1
                continue
            _, l, t = _profile(_codes(3, m, d, [s2, s3]))
            if t:
                heavy += 1
                continue
            T[l] += 1
            if l:
                fwd[l] += count_forward(m, d, s2, s3)
            rev[l] += count_reverse(m, d, s2, s3)
    return T, fwd, rev, heavy
