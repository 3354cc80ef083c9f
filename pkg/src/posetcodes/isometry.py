"""The vector space F_p^n with a poset weight, and its linear isometries.

Vectors are tuples of ints mod p (p prime), rendered as digit strings with
coordinate 1 first, and encoded as integers base p with coordinate 1 least
significant.  The isometry group is generated by diagonal scalings, unit
transvections x_i += x_j for poset-comparable i < j, and coordinate
permutations from Aut(P); every element factors as (matrix in the triangular
pattern group) times (permutation), and we keep that factorization through
composition.

Orbit enumeration precomputes, per generator, the induced permutation of
vector codes and then runs a plain BFS, which keeps the partition and the
orbit numbering deterministic: orbits are numbered by their least vector
code.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    CapExceeded,
    DomainError,
    IEViolation,
    MalformedIsometry,
)
from .poset import (
    DEFAULT_IDEAL_CAP,
    DEFAULT_NODE_CAP,
    IdealSet,
    _bits,
    automorphism_generators,
    enumerate_ideals,
    has_extension_property,
    identity_perm,
    ideal_isomorphism,
    support_ideal,
)

DEFAULT_SPACE_CAP = 1 << 20
DEFAULT_GROUP_CAP = 1 << 20


def is_prime(p):
    if not isinstance(p, int) or p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def check_prime(p):
    if not is_prime(p):
        raise DomainError(f"modulus must plainly be prime, got {p!r}")


def inv_mod(a, p):
    return pow(a, -1, p)


def primitive_root(p):
    """Smallest generator of the multiplicative group mod p."""
    check_prime(p)
    if p == 2:
        return 1
    for g in range(2, p):
        x = g
        order = 1
        while x != 1:
            x = x * g % p
            order += 1
        if order == p - 1:
            return g
    raise AssertionError("unreachable for prime p")


# -- vectors ------------------------------------------------------------------

@lru_cache(maxsize=8)
def digit_table(p, n):
    """(p^n, n) array: row k holds the base-p digits of k, coordinate 1 first."""
    total = p ** n
    codes = np.arange(total, dtype=np.int64)
    cols = [(codes // p ** i) % p for i in range(n)]
    return np.stack(cols, axis=1).astype(np.int16)


def encode_vec(x, p):
    code = 0
    for v in reversed(x):
        code = code * p + int(v) % p
    return code


def decode_vec(code, p, n):
    out = []
    for _ in range(n):
        out.append(code % p)
        code //= p
    return tuple(out)


def vec_str(x):
    return "".join(str(v) for v in x)


def poset_weight(P, x):
    """Size of the smallest ideal containing the support of x."""
    return len(support_ideal(P, x))


def poset_distance(P, x, y, p):
    diff = tuple((a - b) % p for a, b in zip(x, y))
    return poset_weight(P, diff)


# -- isometries ---------------------------------------------------------------

def _identity_matrix(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(A, B, p):
    n = len(A)
    Bc = tuple(zip(*B))
    return tuple(
        tuple(sum(a * b for a, b in zip(row, col)) % p for col in Bc)
        for row in A
    )


def mat_vec(A, x, p):
    return tuple(sum(a * v for a, v in zip(row, x)) % p for row in A)


@dataclass(frozen=True)
class Isometry:
    """A linear isometry, factored as pattern matrix times permutation.

    The action is x -> matrix . (x o perm), where (x o perm)_k = x_{perm(k)}.
    """

    p: int
    matrix: tuple
    perm: tuple

    @property
    def n(self):
        return len(self.perm)

    def full_matrix(self):
        """The plain n x n matrix of the composite action."""
        n = self.n
        # column j of the composite collects matrix columns k with perm(k) = j+1
        return tuple(
            tuple(
                sum(self.matrix[i][k] for k in range(n)
                    if self.perm[k] - 1 == j) % self.p
                for j in range(n)
            )
            for i in range(n)
        )


def apply_isometry(T, x):
    permuted = tuple(x[T.perm[k] - 1] for k in range(T.n))
    return mat_vec(T.matrix, permuted, T.p)


def compose_isometries(S, T):
    """The isometry x -> S(T(x)); keeps the matrix/permutation factorization."""
    if S.p != T.p or S.n != T.n:
        raise MalformedIsometry("cannot compose isometries over different spaces")
    n = S.n
    # move S's permutation past T's matrix: conjugate T.matrix by S.perm
    conj = tuple(
        tuple(T.matrix[S.perm[i] - 1][S.perm[j] - 1] for j in range(n))
        for i in range(n)
    )
    matrix = mat_mul(S.matrix, conj, S.p)
    perm = tuple(T.perm[S.perm[i] - 1] for i in range(n))
    return Isometry(S.p, matrix, perm)


def identity_isometry(p, n):
    return Isometry(p, _identity_matrix(n), identity_perm(n))


def validate_isometry_matrix(P, A, p):
    """Check the three pattern conditions for a matrix to be an isometry of
    the identity-permutation kind: nonzero diagonal, zero below the diagonal,
    and zero at (i, j) with i < j unless i lies in the principal ideal of j.

    The pattern characterization presumes the ground set is numbered by a
    linear extension (i below j implies i < j as integers).
    """
    check_prime(p)
    n = P.n
    for i in range(n):
        if A[i][i] % p == 0:
            return False
        for j in range(n):
            if i == j or A[i][j] % p == 0:
                continue
            if i > j:
                return False
            if not P.leq(i + 1, j + 1):
                return False
    return True


def isometry_generators(P, p, node_cap=DEFAULT_NODE_CAP):
    """Generators of the linear isometry group of (F_p^n, d_P).

    Diagonal scalings by a primitive root (p > 2), unit transvections
    x_i += x_j for each strict poset pair i < j, and the coordinate
    permutations of a generating set of Aut(P).
    """
    check_prime(p)
    n = P.n
    gens = []
    ident = _identity_matrix(n)
    if p > 2:
        g = primitive_root(p)
        for i in range(n):
            rows = [list(r) for r in ident]
            rows[i][i] = g
            gens.append(Isometry(p, tuple(tuple(r) for r in rows),
                                 identity_perm(n)))
    for j in range(1, n + 1):
        for i in _bits(P.down[j - 1] & ~(1 << (j - 1))):
            rows = [list(r) for r in ident]
            rows[i - 1][j - 1] = 1
            gens.append(Isometry(p, tuple(tuple(r) for r in rows),
                                 identity_perm(n)))
    for sigma in automorphism_generators(P, node_cap):
        gens.append(Isometry(p, ident, sigma))
    return gens


def isometry_to_automorphism(P, T):
    """Extract the poset automorphism i -> max element of <T(e_i)>."""
    n = P.n
    if T.n != n:
        raise MalformedIsometry("isometry size does not match the poset")
    image = []
    for i in range(n):
        e = tuple(1 if k == i else 0 for k in range(n))
        col = apply_isometry(T, e)
        mx = support_ideal(P, col).maximal
        if len(mx) != 1:
            raise MalformedIsometry(
                f"image of basis vector {i + 1} has maximal set {mx}")
        image.append(mx[0])
    if sorted(image) != list(range(1, n + 1)):
        raise MalformedIsometry("extracted map is not a permutation")
    return tuple(image)


def isometry_group_order(P, p, cap=DEFAULT_GROUP_CAP,
                         node_cap=DEFAULT_NODE_CAP):
    """Order of the isometry group, by breadth-first closure of generators.

    Products are taken on the full matrices (the factored form embeds
    injectively), batched through numpy.
    """
    gens = isometry_generators(P, p, node_cap)
    n = P.n
    G = np.array([T.full_matrix() for T in gens], dtype=np.int64)
    ident = np.array(_identity_matrix(n), dtype=np.int64)
    seen = {ident.tobytes()}
    frontier = [ident]
    while frontier:
        F = np.stack(frontier)
        prods = np.einsum("fij,gjk->fgik", F, G) % p
        prods = prods.reshape(-1, n, n)
        frontier = []
        for M in prods:
            key = M.tobytes()
            if key not in seen:
                if len(seen) >= cap:
                    raise CapExceeded("isometry group order", cap)
                seen.add(key)
                frontier.append(M)
    return len(seen)


# -- canonical form -----------------------------------------------------------

def canonical_form(P, x, p):
    """Reduce x to the indicator vector of the maximal elements of <x>.

    Returns (xhat, T) with T(x) = xhat: T = B.A where A rescales the maximal
    coordinates to 1 and B adds, for each remaining support coordinate i, the
    multiple -x_i of the largest-index maximal element above i.
    """
    check_prime(p)
    n = P.n
    x = tuple(int(v) % p for v in x)
    I = support_ideal(P, x)
    mx = set(I.maximal)
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = inv_mod(x[i], p) if (i + 1) in mx else 1
    B = [[0] * n for _ in range(n)]
    for i in range(n):
        B[i][i] = 1
    for i in range(n):
        if x[i] and (i + 1) not in mx:
            j = max(k for k in mx if P.less(i + 1, k))
            B[i][j - 1] = (-x[i]) % p
    M = mat_mul(tuple(tuple(r) for r in B), tuple(tuple(r) for r in A), p)
    T = Isometry(p, M, identity_perm(n))
    xhat = tuple(1 if (i + 1) in mx else 0 for i in range(n))
    assert apply_isometry(T, x) == xhat
    return xhat, T


# -- orbits -------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitPartition:
    """Orbit decomposition of F_p^n under the isometry group.

    ``orbit_id`` maps vector codes to 0-based orbit ids; orbit 0 is {0} and
    ids increase with the least code of the orbit.
    """

    p: int
    n: int
    orbit_id: np.ndarray
    reps: tuple
    sizes: tuple

    @property
    def classes(self):
        return len(self.reps)

    def orbit_of(self, x):
        return int(self.orbit_id[encode_vec(x, self.p)])

    def rep_vector(self, idx):
        return decode_vec(self.reps[idx], self.p, self.n)


def _code_tables(P, p, gens):
    """Per-generator permutation of vector codes, as int32 arrays."""
    n = P.n
    D = digit_table(p, n).astype(np.int64)
    powers = p ** np.arange(n, dtype=np.int64)
    tables = []
    for T in gens:
        perm_idx = [T.perm[k] - 1 for k in range(n)]
        permuted = D[:, perm_idx]
        A = np.array(T.matrix, dtype=np.int64)
        image = (permuted @ A.T) % p
        tables.append((image @ powers).astype(np.int64))
    return tables


def orbit_partition(P, p, cap=DEFAULT_SPACE_CAP, node_cap=DEFAULT_NODE_CAP):
    """BFS orbit enumeration of the whole space under the isometry group."""
    check_prime(p)
    total = p ** P.n
    if total > cap:
        raise CapExceeded("vector space enumeration", cap)
    gens = isometry_generators(P, p, node_cap)
    tables = _code_tables(P, p, gens)
    orbit_id = np.full(total, -1, dtype=np.int64)
    reps = []
    sizes = []
    for seed in range(total):
        if orbit_id[seed] >= 0:
            continue
        oid = len(reps)
        orbit_id[seed] = oid
        stack = [seed]
        count = 1
        while stack:
            v = stack.pop()
            for t in tables:
                w = int(t[v])
                if orbit_id[w] < 0:
                    orbit_id[w] = oid
                    count += 1
                    stack.append(w)
        reps.append(seed)
        sizes.append(count)
    return OrbitPartition(p, P.n, orbit_id, tuple(reps), tuple(sizes))


def orbit_size_formula(P, p, I, ideal_cap=DEFAULT_IDEAL_CAP,
                       node_cap=DEFAULT_NODE_CAP):
    """Closed-form orbit size (p-1)^|M(I)| p^(|I|-|M(I)|) |class of I|.

    Only meaningful when the poset has the ideal-extension property, where
    vector orbits correspond to isomorphism classes of ideals; raises
    IEViolation otherwise.
    """
    check_prime(p)
    report = has_extension_property(P, "IE", ideal_cap, node_cap)
    if not report.holds:
        raise IEViolation(
            f"poset lacks the IE property, witness {report.witness}")
    size_class = 0
    for J in enumerate_ideals(P, ideal_cap):
        if len(J) == len(I) and ideal_isomorphism(P, I, J, node_cap) is not None:
            size_class += 1
    m = len(I.maximal)
    return (p - 1) ** m * p ** (len(I) - m) * size_class
