"""Level-regular rooted trees and their shape machinery.

A tree with degree sequence (d_0, ..., d_{m-2}) has one root, every vertex at
depth s has d_s children, and n = 1 + d_0 + d_0*d_1 + ... vertices.  Vertices
are numbered breadth-first in label order: the root is 1 and carries the
empty label; a vertex with label a_1...a_j is below exactly the vertices
whose labels extend its own.

Two shape invariants live here: the canonical bitstring label for tree
ideals (leaf -> 01, inner vertex -> 0|sorted child labels|1) and the shape
vector of the ordered Hamming (NRT) space, which counts maximal elements of
an ideal per level.  ``extend_ideal_isomorphism`` turns any isomorphism of
two tree ideals into a full tree automorphism restricting to it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .combine import nrt
from .errors import (
    NotAnIsomorphism,
    NotATree,
    ShapeDomainError,
    SizeOverflow,
)
from .poset import IdealSet, Poset, _bits, build_poset, is_ideal_mask

DEFAULT_TREE_CAP = 10_000


@dataclass(frozen=True)
class TreePoset:
    """A level-regular rooted tree with its order-consistent labeling."""

    degrees: tuple
    poset: Poset
    labels: tuple  # labels[v-1] = digit tuple of vertex v

    @property
    def n(self):
        return self.poset.n

    def vertex(self, label):
        """Vertex number carrying the given digit tuple."""
        return self.labels.index(tuple(label)) + 1


def build_tree(degrees, cap=DEFAULT_TREE_CAP):
    """Build the level-regular rooted tree with the given degree sequence."""
    degrees = tuple(degrees)
    if not degrees or any(not isinstance(d, int) or d < 1 for d in degrees):
        raise ValueError("degree sequence must be nonempty positive integers")
    width = 1
    n = 1
    for d in degrees:
        width *= d
        n += width
        if n > cap:
            raise SizeOverflow(f"tree would have more than {cap} vertices")
    labels = [()]
    covers = []
    start = 0  # index of first vertex of the current level
    for d in degrees:
        level_labels = labels[start:]
        start = len(labels)
        for parent_idx, lab in enumerate(level_labels, start=start - len(level_labels) + 1):
            for digit in range(d):
                labels.append(lab + (digit,))
                covers.append((parent_idx, len(labels)))
    P = build_poset(n, covers)
    return TreePoset(degrees, P, tuple(labels))


@dataclass(frozen=True)
class TreeLabel:
    """Canonical balanced bitstring of a rooted tree or forest."""

    bits: str

    def __str__(self):
        return self.bits


def ahu_label(P, I):
    """Canonical label of the tree (or forest) induced by the ideal I.

    Leaves get "01"; an inner vertex wraps the concatenation of its child
    labels, sorted ascending as plain strings ('0' < '1', prefixes first),
    in a 0/1 pair.  Forests concatenate their sorted component labels; the
    empty ideal gets the empty string.  Equal labels characterize isomorphic
    ideals.  Raises NotATree when some member has two immediate
    predecessors inside I.
    """
    mask = I.mask if isinstance(I, IdealSet) else I
    if mask == 0:
        return TreeLabel("")
    children = {}
    roots = []
    for v in _bits(mask):
        below = P.down[v - 1] & mask & ~(1 << (v - 1))
        # immediate predecessors = maximal elements of the strict down-set
        preds = [u for u in _bits(below)
                 if P.up[u - 1] & ~(1 << (u - 1)) & below == 0]
        if len(preds) > 1:
            raise NotATree(f"element {v} has {len(preds)} immediate predecessors")
        if preds:
            children.setdefault(preds[0], []).append(v)
        else:
            roots.append(v)

    def label(v):
        kids = children.get(v)
        if not kids:
            return "01"
        return "0" + "".join(sorted(label(c) for c in kids)) + "1"

    return TreeLabel("".join(sorted(label(r) for r in roots)))


def _order_isomorphism_ok(P, phi):
    for a, fa in phi.items():
        for b, fb in phi.items():
            if P.leq(a, b) != P.leq(fa, fb):
                return False
    return True


def extend_ideal_isomorphism(T, I, J, phi):
    """Extend an isomorphism of tree ideals to a full tree automorphism.

    ``phi`` maps the members of I bijectively onto J preserving the order.
    Outside I, a vertex descends through its deepest ancestor inside I; its
    first free digit is rerouted through a per-ancestor digit bijection that
    agrees with ``phi`` on children inside I and pairs the remaining digits
    in sorted order; deeper digits are kept verbatim.  The result restricts
    to ``phi`` on I.
    """
    P = T.poset
    phi = dict(phi)
    if set(phi) != set(I.members) or sorted(phi.values()) != sorted(J.members):
        raise NotAnIsomorphism("map is not a bijection from I onto J")
    if not _order_isomorphism_ok(P, phi):
        raise NotAnIsomorphism("map does not preserve the order")
    n = P.n
    if not phi:
        return tuple(range(1, n + 1))

    labels = T.labels
    vertex_by_label = {lab: v + 1 for v, lab in enumerate(labels)}
    in_I = I.mask
    in_J = J.mask

    def digit_bijection(a):
        """Child-digit map under a in I agreeing with phi, filled in order."""
        d = T.degrees[len(labels[a - 1])]
        lam_a = labels[a - 1]
        lam_fa = labels[phi[a] - 1]
        gamma = {}
        free_src = []
        for digit in range(d):
            child = vertex_by_label[lam_a + (digit,)]
            if (in_I >> (child - 1)) & 1:
                gamma[digit] = labels[phi[child] - 1][-1]
            else:
                free_src.append(digit)
        taken = set(gamma.values())
        free_dst = [digit for digit in range(d) if digit not in taken]
        free_dst = [digit for digit in free_dst
                    if not (in_J >> (vertex_by_label[lam_fa + (digit,)] - 1)) & 1]
        if len(free_src) != len(free_dst):
            raise NotAnIsomorphism("ideals have mismatched branching outside the map")
        gamma.update(zip(sorted(free_src), sorted(free_dst)))
        return gamma

    gammas = {}
    perm = [0] * n
    for v in range(1, n + 1):
        if (in_I >> (v - 1)) & 1:
            perm[v - 1] = phi[v]
            continue
        lab = labels[v - 1]
        # deepest proper prefix of lab whose vertex lies in I (root has label ())
        a = None
        for t in range(len(lab) - 1, -1, -1):
            u = vertex_by_label[lab[:t]]
            if (in_I >> (u - 1)) & 1:
                a = u
                cut = t
                break
        if a is None:
            raise NotAnIsomorphism("nonempty tree ideal must contain the root")
        if a not in gammas:
            gammas[a] = digit_bijection(a)
        tail = lab[cut:]
        image = labels[phi[a] - 1] + (gammas[a][tail[0]],) + tail[1:]
        perm[v - 1] = vertex_by_label[image]
    return tuple(perm)


def nrt_shape(m, r, x):
    """Shape vector of a vector or ideal of the NRT space of m chains of
    length r: entry j counts maximal elements of the generated ideal at
    level j."""
    if m < 1 or r < 1:
        raise ShapeDomainError("need m >= 1 and r >= 1")
    P = nrt(m, r)
    if isinstance(x, IdealSet):
        if not is_ideal_mask(P, x.mask):
            raise ShapeDomainError(
                f"{sorted(x.members)} is not an ideal of the NRT poset")
        ideal = x
    else:
        x = tuple(x)
        if len(x) != m * r:
            raise ShapeDomainError(f"vector length {len(x)} != m*r = {m * r}")
        mask = 0
        for k, v in enumerate(x):
            if v:
                mask |= P.down[k]
        members = mask
        mx = 0
        for i in _bits(members):
            if P.up[i - 1] & ~(1 << (i - 1)) & members == 0:
                mx |= 1 << (i - 1)
        ideal = IdealSet(members, mx)
    e = [0] * r
    for i in ideal.maximal:
        e[P.level[i - 1] - 1] += 1
    return tuple(e)
