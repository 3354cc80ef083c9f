"""Standard binary constructions on posets and their interaction with the
ideal-extension property.

Ordinal and direct sums put Q's elements after P's (shifted by n); the two
products put the pair (i, j) at position (i-1)*m + j, where m = |Q|.  The
ordinal product here keeps the relation exactly as commonly displayed,
(i, j) <= (i', j') iff i = i' and j <=_Q j', which makes it n disjoint copies
of Q; it is deliberately not replaced by the lexicographic version.
"""

from __future__ import annotations

from .errors import NotAnIdeal
from .poset import (
    DEFAULT_IDEAL_CAP,
    DEFAULT_NODE_CAP,
    IdealSet,
    Poset,
    _finish,
    _ideal_from_mask,
    antichain,
    chain,
    has_extension_property,
    is_ideal_mask,
)

COMBINE_KINDS = ("ordinal_sum", "direct_sum", "ordinal_product",
                 "direct_product")


def _from_leq(n, leq):
    """Poset from a strict comparability predicate on 1-based indices."""
    down_strict = [0] * n
    up_strict = [0] * n
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and leq(i, j):
                up_strict[i - 1] |= 1 << (j - 1)
                down_strict[j - 1] |= 1 << (i - 1)
    return _finish(n, tuple(down_strict), tuple(up_strict))


def combine(P, Q, kind):
    """Combine two posets; see COMBINE_KINDS for the accepted operations."""
    if kind not in COMBINE_KINDS:
        raise ValueError(f"unknown combination {kind!r}")
    n, m = P.n, Q.n
    if kind == "ordinal_sum":
        def leq(i, j):
            if i <= n and j <= n:
                return P.leq(i, j)
            if i > n and j > n:
                return Q.leq(i - n, j - n)
            return i <= n < j
        return _from_leq(n + m, leq)
    if kind == "direct_sum":
        def leq(i, j):
            if i <= n and j <= n:
                return P.leq(i, j)
            if i > n and j > n:
                return Q.leq(i - n, j - n)
            return False
        return _from_leq(n + m, leq)
    # products: position (i, j) -> (i-1)*m + j
    def split(k):
        return (k - 1) // m + 1, (k - 1) % m + 1
    if kind == "ordinal_product":
        def leq(a, b):
            i, j = split(a)
            i2, j2 = split(b)
            return i == i2 and Q.leq(j, j2)
    else:
        def leq(a, b):
            i, j = split(a)
            i2, j2 = split(b)
            return P.leq(i, i2) and Q.leq(j, j2)
    return _from_leq(n * m, leq)


def product_position(i, j, m):
    """1-based position of the pair (i, j) in a product with |Q| = m."""
    return (i - 1) * m + j


def hierarchical(sizes):
    """Ordinal sum of antichains: the hierarchical poset with these levels."""
    sizes = tuple(sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("level sizes must be positive")
    P = antichain(sizes[0])
    for s in sizes[1:]:
        P = combine(P, antichain(s), "ordinal_sum")
    return P


def nrt(m, r):
    """m disjoint chains of length r, chain k on positions (k-1)r+1 .. kr."""
    if m < 1 or r < 1:
        raise ValueError("need m >= 1 and r >= 1")
    P = chain(r)
    for _ in range(m - 1):
        P = combine(P, chain(r), "direct_sum")
    return P


def ie_inheritance_report(P, Q, ideal_cap=DEFAULT_IDEAL_CAP,
                          node_cap=DEFAULT_NODE_CAP):
    """IE verdicts for all four combinations of P and Q.

    Returns {kind: ExtensionReport}; witnesses are ideals of the combined
    poset in its own numbering.
    """
    out = {}
    for kind in COMBINE_KINDS:
        R = combine(P, Q, kind)
        out[kind] = has_extension_property(R, "IE", ideal_cap, node_cap)
    return out


def split_ideal(P, Q, I):
    """Split an ideal of an ordinal/direct sum into its P and Q parts.

    Returns (I_n, I_m) where I_n lives in P and I_m in Q (shifted back down).
    """
    n = P.n
    low = I.mask & ((1 << n) - 1)
    high = I.mask >> n
    return _ideal_from_mask(P, low), _ideal_from_mask(Q, high)


def shape_ordinal_sum(P, Q, shape_P, shape_Q, I):
    """Shape of an ideal of the ordinal sum from shapes of the parts.

    ``shape_P`` / ``shape_Q`` are maps from IdealSet of the respective poset
    to any comparable label.  The result tags which part decided: (0, s) when
    the Q-part of I is nonempty (the P-part is then forced to be all of P),
    else (1, s) from the P-part.
    """
    S = combine(P, Q, "ordinal_sum")
    if not is_ideal_mask(S, I.mask):
        raise NotAnIdeal(f"{sorted(I.members)} is not an ideal of the ordinal sum")
    I_n, I_m = split_ideal(P, Q, I)
    if I_m.mask:
        return (0, shape_Q(I_m))
    return (1, shape_P(I_n))
