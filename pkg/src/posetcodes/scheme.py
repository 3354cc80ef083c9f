"""Translation association schemes on F_p^n, built from isometry orbits.

A partition of the space into difference classes N_0 = {0}, N_1, ..., N_s
induces relations R_a = {(x, y): x - y in N_a}.  Intersection numbers are
counted exactly; eigenmatrices come from character sums evaluated in exact
cyclotomic-integer arithmetic (characters chi_y(x) = w^(x.y) with the
standard dot product).  Dual classes group characters with identical
eigenvalue vectors; with this identification the dual scheme of a poset
scheme coincides, class by class, with the scheme of the dual poset (the
transpose of an isometry of P is an isometry of the dual of P).

Scheme isomorphism here is translation-scheme isomorphism, i.e. additive
bijections; over a prime field those are exactly the invertible linear maps,
so small spaces can be searched exhaustively.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import (
    AxiomViolation,
    CapExceeded,
    DimensionMismatch,
    DomainError,
    NonIntegralEigenvalue,
    NonIntegralQ,
    NotSelfDual,
)
from .isometry import (
    DEFAULT_SPACE_CAP,
    check_prime,
    decode_vec,
    digit_table,
    orbit_partition,
)
from .poset import (
    DEFAULT_NODE_CAP,
    IdealSet,
    dual_poset,
    is_ideal_mask,
    is_self_dual,
    support_ideal,
)

TENSOR_REPORT_LIMIT = 4096


@dataclass(frozen=True)
class Cyclotomic:
    """Integer combination of the p-th roots of unity.

    ``coeffs[k]`` multiplies w^k.  The canonical form subtracts the minimum
    coefficient (allowed because 1 + w + ... + w^(p-1) = 0).  A value is a
    rational integer iff the coefficients at k = 1..p-1 are all equal; the
    value is then coeffs[0] - coeffs[1].
    """

    p: int
    coeffs: tuple

    @classmethod
    def from_counts(cls, p, counts):
        counts = tuple(int(c) for c in counts)
        if len(counts) != p:
            raise ValueError("need one coefficient per power of the root")
        low = min(counts)
        return cls(p, tuple(c - low for c in counts))

    def reduce(self):
        low = min(self.coeffs)
        return Cyclotomic(self.p, tuple(c - low for c in self.coeffs))

    def __add__(self, other):
        if self.p != other.p:
            raise ValueError("mixed root orders")
        return Cyclotomic.from_counts(
            self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def is_integer(self):
        tail = self.coeffs[1:]
        return all(c == tail[0] for c in tail) if tail else True

    def as_integer(self):
        if not self.is_integer():
            raise NonIntegralEigenvalue(f"{self.coeffs} is not rational")
        if self.p == 1:
            return self.coeffs[0]
        return self.coeffs[0] - self.coeffs[1]


class Scheme:
    """A translation association scheme given by a difference partition.

    ``class_of`` maps vector codes to class ids; class ids are ordered by the
    least code of the class, so class 0 is {0}.  Heavy data (intersection
    tensor, eigenmatrices, dual classes) is computed on first use and cached.
    """

    def __init__(self, p, n, class_of, poset=None, check="pairs"):
        check_prime(p)
        self.p = p
        self.n = n
        self.poset = poset
        total = p ** n
        class_of = np.asarray(class_of, dtype=np.int64)
        if class_of.shape != (total,):
            raise DimensionMismatch(
                f"partition covers {class_of.shape}, space has {total} vectors")
        # renumber classes by least member code
        first = {}
        for code, c in enumerate(class_of.tolist()):
            if c not in first:
                first[c] = code
        order = sorted(first, key=first.get)
        relabel = {old: new for new, old in enumerate(order)}
        self.class_of = np.array([relabel[c] for c in class_of.tolist()],
                                 dtype=np.int64)
        self.reps = tuple(first[old] for old in order)
        self.sizes = tuple(int(c) for c in np.bincount(self.class_of))
        self._tensor = None
        self._eigen = None
        if check != "none":
            self._check_basic()
            self.verify_axioms(exhaustive=(check == "full"))

    # -- basic structure ----------------------------------------------------

    @property
    def s(self):
        return len(self.reps) - 1

    @property
    def valencies(self):
        return self.sizes

    def class_vectors(self, idx):
        codes = np.nonzero(self.class_of == idx)[0]
        return [decode_vec(int(c), self.p, self.n) for c in codes]

    def _check_basic(self):
        if self.reps[0] != 0 or self.sizes[0] != 1:
            raise AxiomViolation("class 0 is not the zero singleton")
        D = digit_table(self.p, self.n).astype(np.int64)
        powers = self.p ** np.arange(self.n, dtype=np.int64)
        neg = ((-D) % self.p) @ powers
        if not np.array_equal(self.class_of[neg], self.class_of):
            raise AxiomViolation("some class is not symmetric under negation")

    def _diff_class_rows(self, g):
        """class_of[u - g] for all u, as an int64 array."""
        D = digit_table(self.p, self.n).astype(np.int64)
        powers = self.p ** np.arange(self.n, dtype=np.int64)
        shifted = ((D - D[g]) % self.p) @ powers
        return self.class_of[shifted]

    def _histogram(self, g):
        k = self.s + 1
        key = self.class_of * k + self._diff_class_rows(g)
        return np.bincount(key, minlength=k * k).reshape(k, k)

    def intersection_tensor(self):
        """p[gamma][alpha][beta] = #{z: (x,z) in R_alpha, (y,z) in R_beta}
        for any (x, y) in R_gamma, as an (s+1)^3 integer array."""
        if self._tensor is None:
            k = self.s + 1
            tensor = np.zeros((k, k, k), dtype=np.int64)
            for gamma, g in enumerate(self.reps):
                tensor[gamma] = self._histogram(g)
            self._tensor = tensor
        return self._tensor

    def verify_axioms(self, exhaustive=False):
        """Check the association scheme axioms by brute-force counting.

        The default mode rechecks the intersection counts at a second
        representative of every class; ``exhaustive`` recomputes them at
        every group element.
        """
        tensor = self.intersection_tensor()
        if exhaustive:
            total = self.p ** self.n
            for g in range(total):
                if not np.array_equal(self._histogram(g),
                                      tensor[int(self.class_of[g])]):
                    raise AxiomViolation(
                        f"intersection counts vary inside class of code {g}")
        else:
            counts = [0] * (self.s + 1)
            total = self.p ** self.n
            for g in range(total):
                c = int(self.class_of[g])
                if g == self.reps[c] or counts[c] >= 1:
                    continue
                counts[c] += 1
                if not np.array_equal(self._histogram(g), tensor[c]):
                    raise AxiomViolation(
                        f"intersection counts vary inside class of code {g}")

    # -- eigenstructure -------------------------------------------------------

    def _compute_eigen(self):
        p, n = self.p, self.n
        total = p ** n
        k = self.s + 1
        D = digit_table(p, n).astype(np.int64)
        rows = {}
        dual_class_of = np.empty(total, dtype=np.int64)
        P_rows = []
        dual_reps = []
        for y in range(total):
            dots = (D @ D[y]) % p
            key = self.class_of * p + dots
            counts = np.bincount(key, minlength=k * p).reshape(k, p)
            if p > 2:
                tail = counts[:, 1:]
                if np.any(tail.max(axis=1) != tail.min(axis=1)):
                    beta = int(np.nonzero(tail.max(axis=1) != tail.min(axis=1))[0][0])
                    raise NonIntegralEigenvalue(
                        f"character {y} on class {beta}: counts {counts[beta]}")
            row = tuple(int(v) for v in counts[:, 0] - counts[:, 1])
            idx = rows.get(row)
            if idx is None:
                idx = len(rows)
                rows[row] = idx
                P_rows.append(row)
                dual_reps.append(y)
            dual_class_of[y] = idx
        if len(P_rows) != k:
            raise AxiomViolation(
                f"{len(P_rows)} distinct eigenvalue rows for {k} classes")
        mult = tuple(int(c) for c in np.bincount(dual_class_of, minlength=k))
        P_mat = tuple(P_rows)
        Q_rows = []
        for beta in range(k):
            v = self.sizes[beta]
            row = []
            for alpha in range(k):
                num = mult[alpha] * P_mat[alpha][beta]
                if num % v:
                    raise NonIntegralQ(
                        f"Q[{beta}][{alpha}] = {num}/{v} is not integral")
                row.append(num // v)
            Q_rows.append(tuple(row))
        Q_mat = tuple(Q_rows)
        self._eigen = {
            "P": P_mat,
            "Q": Q_mat,
            "dual_class_of": dual_class_of,
            "dual_reps": tuple(dual_reps),
            "multiplicities": mult,
        }

    def _eigen_data(self):
        if self._eigen is None:
            self._compute_eigen()
        return self._eigen

    @property
    def P_mat(self):
        return self._eigen_data()["P"]

    @property
    def Q_mat(self):
        return self._eigen_data()["Q"]

    @property
    def multiplicities(self):
        return self._eigen_data()["multiplicities"]

    @property
    def dual_class_of(self):
        return self._eigen_data()["dual_class_of"]

    @property
    def dual_reps(self):
        return self._eigen_data()["dual_reps"]

    def dual_classes(self):
        """Character codes per dual class, in class order."""
        dc = self.dual_class_of
        return tuple(
            tuple(int(c) for c in np.nonzero(dc == a)[0])
            for a in range(self.s + 1)
        )

    def dual_scheme(self, check="pairs"):
        """The dual translation scheme, realized on character codes."""
        return Scheme(self.p, self.n, self.dual_class_of, check=check)

    def character_sum(self, y, beta):
        """Sum of chi_y over class beta in exact cyclotomic arithmetic."""
        p = self.p
        D = digit_table(p, self.n).astype(np.int64)
        dots = (D @ D[y]) % p
        counts = np.bincount(dots[self.class_of == beta], minlength=p)
        return Cyclotomic.from_counts(p, counts)


def build_scheme(P, p, cap=DEFAULT_SPACE_CAP, node_cap=DEFAULT_NODE_CAP,
                 check="pairs"):
    """Association scheme of the isometry-orbit partition of (F_p^n, d_P)."""
    part = orbit_partition(P, p, cap, node_cap)
    return Scheme(p, P.n, part.orbit_id, poset=P, check=check)


def eigenmatrices(S):
    """(P, Q, dual classes) of a scheme, all exact."""
    return S.P_mat, S.Q_mat, S.dual_classes()


def dual_scheme_on_dual_poset(P, p, cap=DEFAULT_SPACE_CAP,
                              node_cap=DEFAULT_NODE_CAP, check="pairs"):
    """The scheme built from the isometry orbits of the dual poset."""
    return build_scheme(dual_poset(P), p, cap, node_cap, check)


def scheme_ideal_class(S, beta):
    """The ideals generated by the vectors of class beta (for poset schemes)."""
    if S.poset is None:
        raise DomainError("scheme carries no poset")
    seen = {}
    for x in S.class_vectors(beta):
        I = support_ideal(S.poset, x)
        seen[I.mask] = I
    return [seen[m] for m in sorted(seen)]


def eigen_closed_form_selfdual(P, p, alpha_rep, beta_class, q=None):
    """First-eigenmatrix entry of a self-dual poset scheme, in closed form.

    ``alpha_rep`` is the ideal J of the dual poset generated by any character
    of the dual class indexing the row; ``beta_class`` is the family of
    ideals generated by the vectors of the column's orbit.  The sum runs over
    the ideals I of the class whose intersection with J sits inside the
    maximal set M(I), each contributing
    (-1)^|M(I) & J| * q^|I \\ M(I)| * (q-1)^|M(I) \\ J|.

    ``q`` defaults to p; passing a different integer evaluates the same
    polynomial expression symbolically in q.
    """
    if q is None:
        check_prime(p)
        q = p
    if is_self_dual(P) is None:
        raise NotSelfDual("closed form applies to self-dual posets only")
    Pd = dual_poset(P)
    if not is_ideal_mask(Pd, alpha_rep.mask):
        raise DomainError("alpha_rep must be an ideal of the dual poset")
    J = alpha_rep.mask
    total = 0
    for I in beta_class:
        M = I.max_mask
        if I.mask & J & ~M:
            continue
        hits = (M & J).bit_count()
        inner = len(I) - M.bit_count()
        free = (M & ~J).bit_count()
        total += (-1) ** hits * q ** inner * (q - 1) ** free
    return total


# -- scheme isomorphism --------------------------------------------------------

@dataclass(frozen=True)
class SchemeIsoResult:
    """Outcome of a translation-scheme isomorphism test.

    ``isomorphic`` is True with a certificate (class map plus the matrix of
    the linear bijection), False with a reason proving non-isomorphism, or
    None when the search space was exhausted inconclusively.
    """

    isomorphic: bool | None
    class_map: tuple | None
    matrix: tuple | None
    reason: str


def _class_bijections(A, B):
    """Yield class bijections matching valencies and intersection tensors."""
    k = A.s + 1
    tA = A.intersection_tensor()
    tB = B.intersection_tensor()
    by_val = {}
    for b in range(k):
        by_val.setdefault(B.sizes[b], []).append(b)
    pi = [None] * k
    used = [False] * k

    def rec(a):
        if a == k:
            yield tuple(pi)
            return
        for b in by_val.get(A.sizes[a], []):
            if used[b] or (a == 0) != (b == 0):
                continue
            pi[a] = b
            used[b] = True
            ok = True
            for a1 in range(a + 1):
                if not ok:
                    break
                for a2 in range(a + 1):
                    if not ok:
                        break
                    for a3 in range(a + 1):
                        if pi[a1] is None or pi[a2] is None or pi[a3] is None:
                            continue
                        if tA[a1][a2][a3] != tB[pi[a1]][pi[a2]][pi[a3]]:
                            ok = False
                            break
            if ok:
                yield from rec(a + 1)
            pi[a] = None
            used[b] = False

    yield from rec(0)


def _linear_maps(p, n, matrix_cap):
    """All invertible n x n matrices over F_p, coordinate permutations first.

    Returns (maps, exhaustive); when p^(n*n) would exceed matrix_cap the
    listing stops at coordinate permutations and exhaustive is False.
    """
    perms = []
    for sigma in itertools.permutations(range(n)):
        M = np.zeros((n, n), dtype=np.int64)
        for i, s in enumerate(sigma):
            M[s][i] = 1
        perms.append(M)
    if p ** (n * n) > matrix_cap:
        return perms, False
    seen = {M.tobytes() for M in perms}
    out = list(perms)
    D = digit_table(p, n * n).astype(np.int64)
    for row in D:
        M = np.array(row, dtype=np.int64).reshape(n, n)
        if M.tobytes() in seen:
            continue
        if round(np.linalg.det(M.astype(float))) % p == 0:
            continue
        out.append(M)
    return out, True


def _induced_class_map(A, B, M):
    """Class bijection induced by x -> Mx if it maps A-classes onto B-classes."""
    p, n = A.p, A.n
    D = digit_table(p, n).astype(np.int64)
    powers = p ** np.arange(n, dtype=np.int64)
    image_codes = ((D @ M.T) % p) @ powers
    if len(np.unique(image_codes)) != p ** n:
        return None
    image_class = B.class_of[image_codes]
    k = A.s + 1
    pi = [-1] * k
    for a in range(k):
        vals = np.unique(image_class[A.class_of == a])
        if len(vals) != 1:
            return None
        pi[a] = int(vals[0])
    if sorted(pi) != list(range(k)):
        return None
    return tuple(pi)


def scheme_isomorphic(A, B, matrix_cap=100_000):
    """Decide translation-scheme isomorphism between two schemes on F_p^n.

    Stage one searches for a class bijection compatible with valencies and
    intersection tensors; failure is a proof of non-isomorphism.  Stage two
    searches for a certifying linear bijection, trying coordinate
    permutations first and then, when p^(n^2) <= matrix_cap, every invertible
    matrix; translation-scheme isomorphisms are additive, hence linear, so an
    exhausted matrix search is also a proof.
    """
    if A.p != B.p or A.n != B.n:
        raise DimensionMismatch("schemes live over different spaces")
    if sorted(A.sizes) != sorted(B.sizes):
        return SchemeIsoResult(False, None, None, "valency multisets differ")
    pi0 = next(_class_bijections(A, B), None)
    if pi0 is None:
        return SchemeIsoResult(
            False, None, None,
            "no class bijection matches valencies and intersection numbers")
    maps, exhaustive = _linear_maps(A.p, A.n, matrix_cap)
    for M in maps:
        pi = _induced_class_map(A, B, M)
        if pi is not None:
            return SchemeIsoResult(
                True, pi, tuple(tuple(int(v) for v in row) for row in M),
                "linear certificate")
    if exhaustive:
        return SchemeIsoResult(
            False, None, None,
            "no linear isomorphism (exhaustive over GL(n, p))")
    return SchemeIsoResult(
        None, None, None,
        "search exhausted (coordinate permutations only)")


# -- ordered Hamming valencies -------------------------------------------------

def multinomial(m, parts):
    """Number of ways to pick disjoint subsets of the given sizes from m."""
    rest = m
    out = 1
    for part in parts:
        out *= comb(rest, part)
        rest -= part
    return out


def nrt_valency(m, r, q, e):
    """Orbit size of shape e in the ordered Hamming space of m chains of
    length r over an alphabet of size q.

    Equals multinomial(m; e_1..e_r, m - sum e) * (q-1)^(sum e_i) *
    q^(sum (i-1) e_i): each of the e_i chains cut at level i contributes one
    unit (scaled q-1 ways) at its top and i-1 free coordinates below.
    """
    e = tuple(e)
    if len(e) != r or any(v < 0 for v in e) or sum(e) > m:
        raise DomainError(f"shape {e} is not valid for m={m}, r={r}")
    if q < 2:
        raise DomainError("alphabet size must be at least 2")
    tops = sum(e)
    below = sum(i * v for i, v in enumerate(e))
    return multinomial(m, e) * (q - 1) ** tops * q ** below
