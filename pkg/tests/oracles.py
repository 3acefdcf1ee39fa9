"""Independent reference implementations used to validate the package.

Everything here is deliberately written the slow, obvious way and shares no
code with the library: span enumeration instead of elimination, literal
nested sums instead of dynamic programming, and an exact distribution
recursion instead of sampling.
"""

from collections import defaultdict
from itertools import product
from math import comb


def gf2_span_rank(matrix) -> int:
    """Rank over GF(2) by enumerating the row span and counting its size."""
    rows = [tuple(int(x) & 1 for x in row) for row in matrix]
    width = len(rows[0]) if rows else 0
    span = set()
    for picks in product((0, 1), repeat=len(rows)):
        vec = tuple(
            sum(b * row[c] for b, row in zip(picks, rows)) & 1 for c in range(width)
        )
        span.add(vec)
    size = len(span)
    rank = 0
    while size > 1:
        size >>= 1
        rank += 1
    return rank


def binom_pmf(n: int, r: int, success: float) -> float:
    return comb(n, r) * success**r * (1.0 - success) ** (n - r)


def full_rank_prob(k: int, r: int, q: int) -> float:
    """Chance that r uniform rows over GF(q) span k coordinates."""
    if r < k:
        return 0.0
    out = 1.0
    for i in range(k):
        out *= 1.0 - float(q) ** (i - r)
    return out


def now_layer_prob(k: int, n: int, p: float, q: int) -> float:
    return sum(
        binom_pmf(n, r, 1.0 - p) * full_rank_prob(k, r, q) for r in range(k, n + 1)
    )


def nested_ew_prob(layer_sizes, window_packets, p, q, window) -> float:
    """Literal nested sum over all reception vectors of windows 1..window.

    The final window's lower limit carries forward each preceding window's
    deficit; everything else ranges freely. Exponential in the window count,
    so only usable on tiny instances.
    """
    kk = []
    total = 0
    for k in layer_sizes:
        total += k
        kk.append(total)
    ell = window
    outer = [range(window_packets[i] + 1) for i in range(ell - 1)]
    acc = 0.0
    for rs in product(*outer):
        need = kk[0]
        for i in range(1, ell):
            deficit = max(need - rs[i - 1], 0)
            need = kk[i] - kk[i - 1] + deficit
        w = 1.0
        for i, r in enumerate(rs):
            w *= binom_pmf(window_packets[i], r, 1.0 - p)
        for r_last in range(max(need, 0), window_packets[ell - 1] + 1):
            acc += (
                w
                * binom_pmf(window_packets[ell - 1], r_last, 1.0 - p)
                * full_rank_prob(kk[ell - 1], sum(rs) + r_last, q)
            )
    return acc


def exact_ew_window_prob(layer_sizes, window_packets, p, q, window) -> float:
    """Exact decode probability of one expanding window, no approximation.

    Tracks the distribution of d_j = dim(span of received rows intersected
    with the j-th window subspace). A received row of window i either falls
    inside the current span (probability q^(d_i - K_i)) or extends the span;
    in the latter case it raises d_t by one exactly for t >= j, where j is
    the smallest window index with row in span + window-j subspace. The
    class probabilities depend only on the d_j, which makes the recursion
    exact.
    """
    kk = []
    total = 0
    for k in layer_sizes:
        total += k
        kk.append(total)
    kk = kk[:window]
    counts = window_packets[:window]
    state = {(0,) * window: 1.0}
    for i in range(window):
        k_i = kk[i]
        scale = float(q) ** (-k_i)
        for _ in range(counts[i]):
            new = defaultdict(float)
            for d, wt in state.items():
                if p > 0.0:
                    new[d] += wt * p
                recv = wt * (1.0 - p)
                if recv == 0.0:
                    continue
                new[d] += recv * float(q) ** d[i] * scale
                prev = float(q) ** d[i]
                for j in range(i + 1):
                    cur = float(q) ** (d[i] + kk[j] - d[j]) if j < i else float(q) ** k_i
                    mass = (cur - prev) * scale
                    prev = cur
                    if mass <= 0.0:
                        continue
                    bumped = tuple(d[t] + 1 if t >= j else d[t] for t in range(window))
                    new[bumped] += recv * mass
            state = dict(new)
    return sum(wt for d, wt in state.items() if d[window - 1] == kk[window - 1])


def brute_force_packing(capacities, max_blocks):
    """Min-max-slack packet sizing by literal enumeration.

    Returns (packet_bits, blocks, worst_slack) with the largest length among
    slack ties, the library's documented preference.
    """
    caps = tuple(capacities)
    options = []
    for h in range(1, max_blocks * min(caps) + 1):
        blocks = tuple((h + c - 1) // c for c in caps)
        slack = max(b * c - h for b, c in zip(blocks, caps))
        options.append((slack, h, blocks))
    slack_min = min(entry[0] for entry in options)
    _, h_best, blocks_best = max(e for e in options if e[0] == slack_min)
    return h_best, blocks_best, slack_min
