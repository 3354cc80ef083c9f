"""Finite posets on {1..n}: ideals, filters, duality, automorphisms, and the
ideal/filter extension properties.

Elements are 1-based throughout.  Order data is stored as per-element
bitmasks (bit ``i-1`` stands for element ``i``), which keeps ideal tests,
subposet extraction and the exhaustive searches cheap at desk scale.

The extension property of a poset asks that every isomorphism between two
order ideals (IE) or two filters (FE) extends to an automorphism of the whole
poset.  ``has_extension_property`` decides it by exhaustive search:
enumerate ideals, partition them into isomorphism classes, and look for an
automorphism carrying the class representative onto each member.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded, CycleError, NotAnIdeal, RangeError

DEFAULT_IDEAL_CAP = 100_000
DEFAULT_NODE_CAP = 1_000_000


def _bits(mask):
    """Yield the 1-based positions of the set bits of mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length()
        mask ^= low


class Poset:
    """A finite partial order on ``{1..n}``.

    ``down[i-1]`` is the bitmask of the principal ideal of ``i`` (``i``
    included), ``up[i-1]`` the principal filter, ``covers`` the transitive
    reduction as sorted 1-based pairs, and ``level[i-1]`` the number of
    elements of a longest chain whose top is ``i``.
    """

    __slots__ = ("n", "down", "up", "covers", "level")

    def __init__(self, n, down, up, covers, level):
        self.n = n
        self.down = down
        self.up = up
        self.covers = covers
        self.level = level

    def leq(self, i, j):
        """True iff i is below-or-equal j."""
        return (self.down[j - 1] >> (i - 1)) & 1 == 1

    def less(self, i, j):
        return i != j and self.leq(i, j)

    @property
    def elements(self):
        return range(1, self.n + 1)

    def __eq__(self, other):
        return (
            isinstance(other, Poset)
            and self.n == other.n
            and self.down == other.down
        )

    def __hash__(self):
        return hash((self.n, self.down))

    def __repr__(self):
        return f"Poset(n={self.n}, covers={list(self.covers)})"


def _finish(n, down_strict, up_strict):
    """Assemble a Poset from strict closure masks (no validation)."""
    down = tuple(down_strict[i] | (1 << i) for i in range(n))
    up = tuple(up_strict[i] | (1 << i) for i in range(n))
    covers = []
    for i in range(n):
        for j in _bits(up_strict[i]):
            # i -< j iff nothing sits strictly between them
            if up_strict[i] & down_strict[j - 1] == 0:
                covers.append((i + 1, j))
    level = [0] * n
    for i in sorted(range(n), key=lambda k: down_strict[k].bit_count()):
        below = down_strict[i]
        level[i] = 1 + max((level[j - 1] for j in _bits(below)), default=0)
    return Poset(n, down, up, tuple(sorted(covers)), tuple(level))


def build_poset(n, covers):
    """Build a poset from an acyclic relation given as (i, j) pairs, i < j.

    The input need not be reduced; the transitive closure is taken and the
    stored ``covers`` are the transitive reduction.
    """
    if not isinstance(n, int) or n < 1:
        raise RangeError(f"ground-set size must be a positive integer, got {n!r}")
    up_strict = [0] * n
    for pair in covers:
        i, j = pair
        if not (1 <= i <= n and 1 <= j <= n):
            raise RangeError(f"pair {pair!r} outside 1..{n}")
        if i == j:
            raise CycleError(f"self-relation {pair!r}")
        up_strict[i - 1] |= 1 << (j - 1)
    for k in range(n):
        kb = 1 << k
        for i in range(n):
            if up_strict[i] & kb:
                up_strict[i] |= up_strict[k]
    for i in range(n):
        if (up_strict[i] >> i) & 1:
            raise CycleError(f"element {i + 1} lies on a cycle")
    down_strict = [0] * n
    for i in range(n):
        for j in _bits(up_strict[i]):
            down_strict[j - 1] |= 1 << i
    return _finish(n, down_strict, up_strict)


def chain(n):
    """The linear order 1 < 2 < ... < n."""
    return build_poset(n, [(i, i + 1) for i in range(1, n)])


def antichain(n):
    """n pairwise incomparable elements."""
    return build_poset(n, [])


def dual_poset(P):
    """Reverse all relations; ideals of the result are the filters of P."""
    n = P.n
    down_strict = tuple(P.up[i] & ~(1 << i) for i in range(n))
    up_strict = tuple(P.down[i] & ~(1 << i) for i in range(n))
    return _finish(n, down_strict, up_strict)


# -- ideals -------------------------------------------------------------------

@dataclass(frozen=True)
class IdealSet:
    """A downward-closed subset, as a membership mask plus its maximal set."""

    mask: int
    max_mask: int

    @property
    def members(self):
        return tuple(_bits(self.mask))

    @property
    def maximal(self):
        return tuple(_bits(self.max_mask))

    def __len__(self):
        return self.mask.bit_count()

    def __repr__(self):
        return f"IdealSet({set(self.members) or '{}'})"


def _ideal_from_mask(P, mask):
    mx = 0
    for i in _bits(mask):
        if P.up[i - 1] & ~(1 << (i - 1)) & mask == 0:
            mx |= 1 << (i - 1)
    return IdealSet(mask, mx)


def is_ideal_mask(P, mask):
    """True iff the masked subset is downward closed in P."""
    for i in _bits(mask):
        if P.down[i - 1] & ~mask:
            return False
    return True


def ideal_of(P, S):
    """Smallest ideal containing the elements of S."""
    mask = 0
    for i in S:
        if not (isinstance(i, int) and 1 <= i <= P.n):
            raise RangeError(f"element {i!r} outside 1..{P.n}")
        mask |= P.down[i - 1]
    return _ideal_from_mask(P, mask)


def support_ideal(P, x):
    """Ideal generated by the support of a vector (entries tested against 0)."""
    mask = 0
    for k, v in enumerate(x):
        if v:
            mask |= P.down[k]
    return _ideal_from_mask(P, mask)


def enumerate_ideals(P, cap=DEFAULT_IDEAL_CAP):
    """All ideals of P, sorted by (size, membership mask).

    The empty set and the full ground set are always present.  Raises
    CapExceeded once more than ``cap`` ideals exist.
    """
    if cap < 1:
        raise CapExceeded("ideal enumeration", cap)
    n = P.n
    need = tuple(P.down[i] & ~(1 << i) for i in range(n))
    seen = {0}
    queue = [0]
    for mask in queue:
        for e in range(n):
            bit = 1 << e
            if mask & bit or need[e] & ~mask:
                continue
            new = mask | bit
            if new not in seen:
                if len(seen) >= cap:
                    raise CapExceeded("ideal enumeration", cap)
                seen.add(new)
                queue.append(new)
    masks = sorted(seen, key=lambda m: (m.bit_count(), m))
    return [_ideal_from_mask(P, m) for m in masks]


def maximal_elements(P, I):
    """The elements of the ideal I with no strict successor inside I."""
    mask = I.mask if isinstance(I, IdealSet) else I
    if not is_ideal_mask(P, mask):
        raise NotAnIdeal(f"{sorted(_bits(mask))} is not downward closed")
    return _ideal_from_mask(P, mask).maximal


# -- isomorphism searches -----------------------------------------------------

class _Budget:
    __slots__ = ("left",)

    def __init__(self, cap):
        self.left = cap

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise CapExceeded("isomorphism search nodes", 0)


def _subposet(P, mask):
    """Local structure (verts, down, up, level) of the induced subposet."""
    verts = tuple(_bits(mask))
    k = len(verts)
    down = [0] * k
    for b, vb in enumerate(verts):
        m = P.down[vb - 1] & mask
        loc = 0
        for a, va in enumerate(verts):
            if (m >> (va - 1)) & 1:
                loc |= 1 << a
        down[b] = loc
    up = [0] * k
    for b in range(k):
        for a in _bits(down[b]):
            up[a - 1] |= 1 << b
    level = [0] * k
    for b in sorted(range(k), key=lambda t: down[t].bit_count()):
        below = down[b] & ~(1 << b)
        level[b] = 1 + max((level[a - 1] for a in _bits(below)), default=0)
    return verts, tuple(down), tuple(up), tuple(level)


def _vertex_keys(down, up, level):
    return tuple(
        (level[v], down[v].bit_count(), up[v].bit_count())
        for v in range(len(down))
    )


def _search_maps(downA, keysA, downB, keysB, budget,
                 pair_ok=None, found=None):
    """Backtracking search for order isomorphisms A -> B on local indices.

    ``pair_ok(a, b)`` further restricts candidates.  If ``found`` is given,
    every complete map is passed to it and the search continues (return True
    from ``found`` to stop early); otherwise the first map is returned.
    """
    k = len(downA)
    if k != len(downB):
        return None
    if sorted(keysA) != sorted(keysB):
        return None
    cand = []
    for a in range(k):
        cs = [b for b in range(k)
              if keysB[b] == keysA[a] and (pair_ok is None or pair_ok(a, b))]
        if not cs:
            return None
        cand.append(cs)
    order = sorted(range(k), key=lambda a: (len(cand[a]), a))
    assigned = []  # (a, b) pairs in assignment order
    image = [0] * k
    used = 0

    def rec(pos):
        nonlocal used
        if pos == k:
            m = list(image)
            if found is not None:
                return bool(found(tuple(m)))
            return tuple(m)
        a = order[pos]
        da = downA[a]
        for b in cand[a]:
            bit = 1 << b
            if used & bit:
                continue
            budget.spend()
            ok = True
            for a2, b2 in assigned:
                if ((da >> a2) & 1) != ((downB[b] >> b2) & 1):
                    ok = False
                    break
                if ((downA[a2] >> a) & 1) != ((downB[b2] >> b) & 1):
                    ok = False
                    break
            if not ok:
                continue
            assigned.append((a, b))
            image[a] = b
            used |= bit
            res = rec(pos + 1)
            if res:
                return res
            assigned.pop()
            used &= ~bit
        return None

    return rec(0)


@dataclass(frozen=True)
class AutomorphismGroup:
    """All order automorphisms of a poset, as 1-based image tuples."""

    elements: tuple
    order: int

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, perm):
        return tuple(perm) in set(self.elements)


def identity_perm(n):
    return tuple(range(1, n + 1))


def perm_compose(sigma, tau):
    """(sigma o tau)(i) = sigma(tau(i))."""
    return tuple(sigma[t - 1] for t in tau)


def perm_inverse(sigma):
    inv = [0] * len(sigma)
    for i, s in enumerate(sigma):
        inv[s - 1] = i + 1
    return tuple(inv)


def automorphism_group(P, node_cap=DEFAULT_NODE_CAP):
    """Enumerate Aut(P) by level-respecting backtracking.

    Raises CapExceeded when the search would expand more than ``node_cap``
    nodes; large symmetric posets should be handled through generators or
    targeted searches instead.
    """
    full = (1 << P.n) - 1
    _, down, up, level = _subposet(P, full)
    keys = _vertex_keys(down, up, level)
    budget = _Budget(node_cap)
    perms = []

    def collect(image):
        perms.append(tuple(b + 1 for b in image))
        return False

    _search_maps(down, keys, down, keys, budget, found=collect)
    perms.sort()
    return AutomorphismGroup(tuple(perms), len(perms))


def _mulclose_perms(gens, n):
    ident = identity_perm(n)
    els = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                prod = perm_compose(g, h)
                if prod not in els:
                    els.add(prod)
                    nxt.append(prod)
        frontier = nxt
    return els


def automorphism_generators(P, node_cap=DEFAULT_NODE_CAP):
    """A small generating set of Aut(P), greedily thinned from the full list."""
    group = automorphism_group(P, node_cap)
    gens = []
    closure = {identity_perm(P.n)}
    for sigma in group:
        if sigma in closure:
            continue
        gens.append(sigma)
        closure = _mulclose_perms(gens, P.n)
    return tuple(gens)


def ideal_isomorphism(P, I, J, node_cap=DEFAULT_NODE_CAP):
    """Order isomorphism between the induced subposets of two ideals.

    Returns a dict {element of I: element of J} or None.  Pruning is by
    per-vertex (level, downset size, upset size) profiles.
    """
    for S in (I, J):
        if not is_ideal_mask(P, S.mask):
            raise NotAnIdeal(f"{sorted(S.members)} is not downward closed")
    if len(I) != len(J):
        return None
    vertsA, downA, upA, levelA = _subposet(P, I.mask)
    vertsB, downB, upB, levelB = _subposet(P, J.mask)
    keysA = _vertex_keys(downA, upA, levelA)
    keysB = _vertex_keys(downB, upB, levelB)
    res = _search_maps(downA, keysA, downB, keysB, _Budget(node_cap))
    if res is None:
        return None
    return {vertsA[a]: vertsB[b] for a, b in enumerate(res)}


def automorphism_mapping(P, I_mask, J_mask, node_cap=DEFAULT_NODE_CAP):
    """An automorphism of P carrying the subset I onto J, or None."""
    if I_mask.bit_count() != J_mask.bit_count():
        return None
    full = (1 << P.n) - 1
    _, down, up, level = _subposet(P, full)
    keys = _vertex_keys(down, up, level)

    def pair_ok(a, b):
        return ((I_mask >> a) & 1) == ((J_mask >> b) & 1)

    res = _search_maps(down, keys, down, keys, _Budget(node_cap),
                       pair_ok=pair_ok)
    if res is None:
        return None
    return tuple(b + 1 for b in res)


def poset_isomorphism(P, Q, node_cap=DEFAULT_NODE_CAP):
    """An order isomorphism P -> Q as a 1-based image tuple, or None."""
    if P.n != Q.n:
        return None
    fullP = (1 << P.n) - 1
    _, downA, upA, levelA = _subposet(P, fullP)
    _, downB, upB, levelB = _subposet(Q, fullP)
    keysA = _vertex_keys(downA, upA, levelA)
    keysB = _vertex_keys(downB, upB, levelB)
    res = _search_maps(downA, keysA, downB, keysB, _Budget(node_cap))
    if res is None:
        return None
    return tuple(b + 1 for b in res)


def is_self_dual(P, node_cap=DEFAULT_NODE_CAP):
    """A permutation realizing P = P-dual, or None."""
    return poset_isomorphism(P, dual_poset(P), node_cap)


def ideal_classes(P, ideals=None, ideal_cap=DEFAULT_IDEAL_CAP,
                  node_cap=DEFAULT_NODE_CAP):
    """Partition the ideals of P into isomorphism classes.

    Classes are listed in order of their least member (the class
    representative is members[0]); members keep enumeration order.
    """
    if ideals is None:
        ideals = enumerate_ideals(P, ideal_cap)
    buckets = {}
    classes = []
    for I in ideals:
        verts, down, up, level = _subposet(P, I.mask)
        keys = _vertex_keys(down, up, level)
        bucket_key = (len(verts), tuple(sorted(keys)))
        hit = None
        for entry in buckets.setdefault(bucket_key, []):
            downB, keysB, members = entry
            if _search_maps(down, keys, downB, keysB,
                            _Budget(node_cap)) is not None:
                hit = members
                break
        if hit is None:
            members = [I]
            buckets[bucket_key].append((down, keys, members))
            classes.append(members)
        else:
            hit.append(I)
    return classes


@dataclass(frozen=True)
class ExtensionReport:
    """Outcome of an IE/FE decision with a minimal witness on failure."""

    property: str
    holds: bool
    witness: tuple | None

    def __repr__(self):
        if self.holds:
            return f"ExtensionReport({self.property}, holds=True)"
        I, J = self.witness
        return (f"ExtensionReport({self.property}, holds=False, "
                f"witness=({set(I.members)}, {set(J.members)}))")


def has_extension_property(P, mode="IE", ideal_cap=DEFAULT_IDEAL_CAP,
                           node_cap=DEFAULT_NODE_CAP):
    """Decide the ideal- (IE) or filter- (FE) extension property of P.

    FE is decided as IE of the dual poset, whose ideals are exactly the
    filters of P.  On failure the witness is the first isomorphic pair, in
    enumeration order, that no automorphism connects: smallest size first,
    then least membership mask.
    """
    if mode not in ("IE", "FE"):
        raise ValueError(f"mode must be 'IE' or 'FE', got {mode!r}")
    Q = P if mode == "IE" else dual_poset(P)
    classes = ideal_classes(Q, ideal_cap=ideal_cap, node_cap=node_cap)
    for members in classes:
        rep = members[0]
        for other in members[1:]:
            if automorphism_mapping(Q, rep.mask, other.mask, node_cap) is None:
                return ExtensionReport(mode, False, (rep, other))
    return ExtensionReport(mode, True, None)
