"""Independent reference implementations used only by the tests."""

import numpy as np


def brute_force_coincidences(t1, t2, window, offset=0):
    """O(n*m) matcher: each t1 in order takes the earliest unused in-window t2."""
    half = window // 2
    u = [int(t) - offset for t in t2]
    used = [False] * len(u)
    n = 0
    for a in t1:
        a = int(a)
        best = None
        for j, b in enumerate(u):
            if not used[j] and a - half <= b <= a + half and (best is None or b < u[best]):
                best = j
        if best is not None:
            used[best] = True
            n += 1
    return n


def brute_force_vectorized(t1, t2, window, offset=0):
    """Same rule as :func:`brute_force_coincidences`, one numpy scan over all of t2 per t1 event."""
    half = window // 2
    u = np.asarray(t2, dtype=np.int64) - offset
    free = np.ones(u.size, dtype=bool)
    n = 0
    for a in np.asarray(t1, dtype=np.int64):
        ok = free & (u >= a - half) & (u <= a + half)
        if ok.any():
            free[np.flatnonzero(ok)[0]] = False
            n += 1
    return n


def clustered_brute_force(t1, t2, window, offset=0):
    """Exact brute force for long streams.

    Events are merged and split wherever consecutive times are more than
    ``window // 2`` apart; no coincidence can straddle such a gap, so each
    cluster is matched independently with the quadratic matcher.
    """
    half = window // 2
    t1 = np.asarray(t1, dtype=np.int64)
    u = np.asarray(t2, dtype=np.int64) - offset
    times = np.concatenate([t1, u])
    side = np.concatenate([np.zeros(t1.size, np.int8), np.ones(u.size, np.int8)])
    order = np.argsort(times, kind="stable")
    times, side = times[order], side[order]
    if times.size == 0:
        return 0
    breaks = np.flatnonzero(np.diff(times) > half) + 1
    starts = np.concatenate([[0], breaks])
    stops = np.concatenate([breaks, [times.size]])
    has1 = np.add.reduceat((side == 0).astype(np.int64), starts) > 0
    has2 = np.add.reduceat((side == 1).astype(np.int64), starts) > 0
    total = 0
    for a, b in zip(starts[has1 & has2], stops[has1 & has2]):
        seg_t, seg_s = times[a:b], side[a:b]
        total += brute_force_coincidences(seg_t[seg_s == 0], seg_t[seg_s == 1], window, 0)
    return total


def max_matching_count(t1, t2, window, offset=0):
    """Maximum bipartite matching size with networkx (Hopcroft-Karp)."""
    import networkx as nx

    half = window // 2
    g = nx.Graph()
    left = [("a", i) for i in range(len(t1))]
    g.add_nodes_from(left)
    g.add_nodes_from(("b", j) for j in range(len(t2)))
    for i, a in enumerate(t1):
        for j, b in enumerate(t2):
            if abs(int(b) - int(a) - offset) <= half:
                g.add_edge(("a", i), ("b", j))
    return len(nx.bipartite.hopcroft_karp_matching(g, top_nodes=left)) // 2


def quadrature_rate(dk, L, panels=10_000):
    """|int_0^L exp(i dk z) dz|^2 by composite Simpson."""
    from scipy.integrate import simpson

    z = np.linspace(0.0, L, panels + 1)
    val = simpson(np.exp(1j * dk * z), x=z)
    return abs(val) ** 2


def numerical_overlap(wa, wb, n=801, extent=6.0):
    """Power overlap of two 2-D Gaussian field profiles on a grid."""
    r = extent * max(wa, wb)
    x = np.linspace(-r, r, n)
    X, Y = np.meshgrid(x, x)
    rr = X**2 + Y**2
    ea = np.exp(-rr / wa**2)
    eb = np.exp(-rr / wb**2)
    num = np.sum(ea * eb) ** 2
    return num / (np.sum(ea**2) * np.sum(eb**2))
